//! Common interface over the two kinds of spherical quotients.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::groups::{MonomialGroup, TypeILiteral};
use crate::harmonic;
use crate::lens::LensSpace;

/// A quotient `S^{2n-1}/Γ` by a finite subgroup of `U(n)` acting freely.
pub trait SphereQuotient {
    /// Complex dimension `n`.
    fn n(&self) -> usize;

    /// `|Γ|`.
    fn group_order(&self) -> u64;

    /// `dim P^Γ_{p,q}` for `0 <= p, q <= bound`, indexed `[p][q]`.
    fn dim_p_table(&self, bound: usize) -> Result<Vec<Vec<BigUint>>>;

    fn descriptor(&self) -> String;
}

impl SphereQuotient for LensSpace {
    fn n(&self) -> usize {
        LensSpace::n(self)
    }

    fn group_order(&self) -> u64 {
        self.order()
    }

    fn dim_p_table(&self, bound: usize) -> Result<Vec<Vec<BigUint>>> {
        Ok(harmonic::lens_dim_p_table(self, bound))
    }

    fn descriptor(&self) -> String {
        self.to_string()
    }
}

impl SphereQuotient for MonomialGroup {
    fn n(&self) -> usize {
        self.dim()
    }

    fn group_order(&self) -> u64 {
        self.order() as u64
    }

    fn dim_p_table(&self, bound: usize) -> Result<Vec<Vec<BigUint>>> {
        harmonic::group_dim_p_table(self, bound)
    }

    fn descriptor(&self) -> String {
        self.label().to_string()
    }
}

/// Either kind of quotient, as parsed from a CLI literal.
#[derive(Clone, Debug)]
pub enum Quotient {
    Lens(LensSpace),
    Group(MonomialGroup),
}

impl Quotient {
    pub fn as_lens(&self) -> Option<&LensSpace> {
        match self {
            Quotient::Lens(l) => Some(l),
            Quotient::Group(_) => None,
        }
    }

    /// The group as explicit monomial matrices (cyclic diagonal for lenses).
    pub fn to_group(&self) -> MonomialGroup {
        match self {
            Quotient::Lens(l) => MonomialGroup::from_lens(l),
            Quotient::Group(g) => g.clone(),
        }
    }
}

impl SphereQuotient for Quotient {
    fn n(&self) -> usize {
        match self {
            Quotient::Lens(l) => SphereQuotient::n(l),
            Quotient::Group(g) => SphereQuotient::n(g),
        }
    }

    fn group_order(&self) -> u64 {
        match self {
            Quotient::Lens(l) => l.group_order(),
            Quotient::Group(g) => g.group_order(),
        }
    }

    fn dim_p_table(&self, bound: usize) -> Result<Vec<Vec<BigUint>>> {
        match self {
            Quotient::Lens(l) => l.dim_p_table(bound),
            Quotient::Group(g) => g.dim_p_table(bound),
        }
    }

    fn descriptor(&self) -> String {
        match self {
            Quotient::Lens(l) => l.descriptor(),
            Quotient::Group(g) => g.descriptor(),
        }
    }
}

impl fmt::Display for Quotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl FromStr for Quotient {
    type Err = Error;

    /// Accepts `L(k; s1,...,sn)` or `GammaI(m,n,r;k,l)`.
    fn from_str(src: &str) -> Result<Self> {
        let trimmed = src.trim_start();
        if trimmed.starts_with("GammaI") {
            let lit: TypeILiteral = src.parse()?;
            Ok(Quotient::Group(lit.build()?))
        } else if trimmed.starts_with('L') {
            Ok(Quotient::Lens(src.parse()?))
        } else {
            Err(Error::Parse {
                pos: src.len() - trimmed.len(),
                msg: "expected `L(...)` or `GammaI(...)`".into(),
            })
        }
    }
}
