//! Staged fingerprints of a lens space's generating function.

use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::genfun::{degree_bound, p_poly};
use crate::harmonic::DimTable;
use crate::lens::LensSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// Dimension table for `p, q <= min(2k, n(k-1))`.
    Small,
    /// Every coefficient of `P_L`.
    Full,
}

pub fn small_bound(l: &LensSpace) -> usize {
    (2 * l.order() as usize).min(degree_bound(l))
}

pub fn fingerprint(l: &LensSpace, stage: Stage) -> Result<String> {
    let mut h = Sha256::new();
    match stage {
        Stage::Small => {
            let table = DimTable::compute(l, small_bound(l))?;
            for row in table.rows() {
                for v in row {
                    let bytes = v.to_bytes_le();
                    h.update((bytes.len() as u32).to_le_bytes());
                    h.update(&bytes);
                }
            }
        }
        Stage::Full => h.update(p_poly(l)?.digest_bytes()),
    }
    Ok(hex::encode(h.finalize()))
}
