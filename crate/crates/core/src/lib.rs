//! Exact spectral data of the Kohn Laplacian on elliptic CR manifolds.
//!
//! The crate works with quotients `S^{2n-1}/Γ` where `Γ` is either a cyclic
//! group (a lens space `L(k; s)`) or a finite monomial subgroup of `U(n)`
//! such as the image of a Type I metacyclic group. Everything is computed
//! with exact integer and cyclotomic arithmetic:
//!
//! * [`harmonic`] counts invariant bigraded harmonic polynomials, which give
//!   the Kohn, round Laplace and Berger multiplicities;
//! * [`genfun`] builds the numerator polynomial `P_L` of the bigraded
//!   generating function and decides equality of generating functions;
//! * [`search`] sweeps all CR classes at fixed `(n, k)` for isospectral,
//!   non-equivalent families;
//! * [`families`] builds the explicit prime-order and `r²`-order families.

pub mod arith;
pub mod berger;
pub mod cyclotomic;
pub mod error;
pub mod families;
pub mod genfun;
pub mod groups;
pub mod harmonic;
pub mod lens;
pub mod modular;
pub mod quotient;
pub mod search;

pub use berger::{berger_isospectral_upto, berger_spectrum, BergerLine};
pub use cyclotomic::{cyclotomic_polynomial, CycInt, CycPoly};
pub use error::{Error, Result};
pub use genfun::{compare_f, f_diag, f_equal, p_poly_direct, p_poly_from_dims, BivariatePoly, FComparison};
pub use groups::{almost_conjugate, type_one_group, MonomialElement, MonomialGroup, TypeIParams};
pub use harmonic::{dim_h_invariant, kohn_multiplicity, laplace_multiplicities, DimTable};
pub use lens::{are_cr_equivalent, are_isometric, enumerate_cr_classes, LensSpace};
pub use quotient::{Quotient, SphereQuotient};
pub use search::{search_isospectral, IsospectralFamily};
