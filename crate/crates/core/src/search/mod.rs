//! Exhaustive search for CR isospectral, CR inequivalent lens spaces at a
//! fixed `(n, k)`.
//!
//! At fixed `(n, k)` two lens spaces have the same `F` iff they have the same
//! `P_L`, so the search groups CR classes by `P_L`. Candidates are narrowed in
//! stages, each a necessary condition for the next:
//!
//! 0. `P_L` evaluated at two points of a prime field;
//! 1. a hash of the dimension table for `p, q <= min(2k, n(k-1))`;
//! 2. `P_L` itself, compared exactly.

pub mod checkpoint;
mod fingerprint;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use fingerprint::{fingerprint, small_bound, Stage};

use crate::arith::units;
use crate::error::{Error, Result};
use crate::genfun::{p_poly, BivariatePoly};
use crate::lens::{are_cr_equivalent, enumerate_cr_classes_with_second, LensSpace};
use crate::modular::ModularEvaluator;

/// A maximal set of pairwise CR inequivalent lens spaces sharing `P_L`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub struct IsospectralFamily {
    pub n: usize,
    pub k: u64,
    pub members: Vec<LensSpace>,
    /// SHA-256 of the shared `P_L`; not serialized.
    pub certificate: Option<String>,
}

impl PartialEq for IsospectralFamily {
    fn eq(&self, other: &Self) -> bool {
        (self.n, self.k, &self.members) == (other.n, other.k, &other.members)
    }
}

impl Eq for IsospectralFamily {}

#[derive(Serialize, Deserialize)]
struct RawFamily {
    n: usize,
    k: u64,
    members: Vec<Vec<u64>>,
}

impl From<IsospectralFamily> for RawFamily {
    fn from(f: IsospectralFamily) -> Self {
        RawFamily {
            n: f.n,
            k: f.k,
            members: f.members.iter().map(|l| l.residues().to_vec()).collect(),
        }
    }
}

impl TryFrom<RawFamily> for IsospectralFamily {
    type Error = Error;
    fn try_from(raw: RawFamily) -> Result<Self> {
        let members = raw
            .members
            .iter()
            .map(|s| {
                if s.len() != raw.n {
                    return Err(Error::DimensionMismatch(s.len(), raw.n));
                }
                let s: Vec<i64> = s.iter().map(|&x| x as i64).collect();
                LensSpace::new(raw.k, &s)
            })
            .collect::<Result<Vec<_>>>()?;
        if members.len() < 2 {
            return Err(Error::InvalidLens("a family needs at least two members".into()));
        }
        Ok(IsospectralFamily {
            n: raw.n,
            k: raw.k,
            members,
            certificate: None,
        })
    }
}

impl fmt::Display for IsospectralFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" ~ "))
    }
}

impl IsospectralFamily {
    /// Members as `[s1,...,sn]` separated by spaces.
    pub fn member_list(&self) -> String {
        self.members
            .iter()
            .map(|l| {
                let s: Vec<String> = l.residues().iter().map(ToString::to_string).collect();
                format!("[{}]", s.join(","))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Candidate counts after each stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub classes: usize,
    pub after_modular: usize,
    pub after_small: usize,
    pub after_full: usize,
}

/// Every CR class at `(n, k)`, in canonical order.
pub fn all_classes(n: usize, k: u64) -> Vec<LensSpace> {
    let mut classes: Vec<LensSpace> = units(k)
        .into_par_iter()
        .flat_map_iter(|second| enumerate_cr_classes_with_second(n, k, second))
        .collect();
    classes.sort();
    classes
}

/// Splits each group by `key`, keeping subgroups of size at least two.
fn refine<K, F>(groups: Vec<Vec<LensSpace>>, key: F) -> Result<Vec<Vec<LensSpace>>>
where
    K: Eq + Hash + Ord + Send,
    F: Fn(&LensSpace) -> Result<K> + Sync,
{
    let keyed: Vec<Vec<(K, LensSpace)>> = groups
        .into_par_iter()
        .map(|g| {
            g.into_par_iter()
                .map(|l| Ok((key(&l)?, l)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for group in keyed {
        let mut buckets: BTreeMap<K, Vec<LensSpace>> = BTreeMap::new();
        for (key, l) in group {
            buckets.entry(key).or_default().push(l);
        }
        out.extend(buckets.into_values().filter(|b| b.len() >= 2));
    }
    Ok(out)
}

fn total(groups: &[Vec<LensSpace>]) -> usize {
    groups.iter().map(Vec::len).sum()
}

/// The families at `(n, k)` together with stage statistics.
pub fn search_cell(n: usize, k: u64) -> Result<(Vec<IsospectralFamily>, SearchStats)> {
    if n < 2 || k < 2 {
        return Err(Error::InvalidLens(format!("search needs n >= 2 and k >= 2, got n={n}, k={k}")));
    }
    let classes = all_classes(n, k);
    let mut stats = SearchStats {
        classes: classes.len(),
        ..Default::default()
    };

    let ev = ModularEvaluator::cached(k);
    let mut buckets: HashMap<Vec<u64>, Vec<LensSpace>> = HashMap::new();
    let values: Vec<Vec<u64>> = classes.par_iter().map(|l| ev.eval(l)).collect();
    for (v, l) in values.into_iter().zip(classes) {
        buckets.entry(v).or_default().push(l);
    }
    let groups: Vec<Vec<LensSpace>> = buckets.into_values().filter(|g| g.len() >= 2).collect();
    stats.after_modular = total(&groups);

    let groups = refine(groups, |l| fingerprint(l, Stage::Small))?;
    stats.after_small = total(&groups);

    let groups = refine(groups, p_poly)?;
    stats.after_full = total(&groups);

    let mut families = groups
        .into_par_iter()
        .map(|mut members| {
            members.sort();
            verify_family(n, k, members)
        })
        .collect::<Result<Vec<_>>>()?;
    families.sort_by(|a, b| a.members.cmp(&b.members));
    Ok((families, stats))
}

/// Re-checks pairwise inequivalence and equality of `P_L`.
fn verify_family(n: usize, k: u64, members: Vec<LensSpace>) -> Result<IsospectralFamily> {
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            if are_cr_equivalent(a, b) {
                return Err(Error::Inconsistent(format!("{a} and {b} are CR equivalent")));
            }
        }
    }
    let polys: Vec<BivariatePoly> = members.iter().map(p_poly).collect::<Result<_>>()?;
    if polys.windows(2).any(|w| !w[0].same_coefficients(&w[1])) {
        return Err(Error::Inconsistent(format!("P_L differs within the family at n={n}, k={k}")));
    }
    Ok(IsospectralFamily {
        n,
        k,
        members,
        certificate: Some(hex::encode(Sha256::digest(polys[0].digest_bytes()))),
    })
}

/// All CR isospectral families of maximal size at `(n, k)`.
pub fn search_isospectral(n: usize, k: u64) -> Result<Vec<IsospectralFamily>> {
    Ok(search_cell(n, k)?.0)
}

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// Directory holding one checkpoint per cell.
    pub checkpoint_dir: Option<PathBuf>,
    /// Reuse valid checkpoints instead of recomputing.
    pub resume: bool,
}

/// Searches `k` in `ks` in increasing order, calling `on_cell` after each
/// cell with its families and whether they came from a checkpoint.
pub fn sweep<F>(n: usize, ks: std::ops::RangeInclusive<u64>, opts: &SweepOptions, mut on_cell: F) -> Result<Vec<IsospectralFamily>>
where
    F: FnMut(u64, &[IsospectralFamily], bool) -> Result<()>,
{
    let mut all = Vec::new();
    for k in ks {
        let cached = match (&opts.checkpoint_dir, opts.resume) {
            (Some(dir), true) => checkpoint::load_cell(dir, n, k),
            _ => None,
        };
        let resumed = cached.is_some();
        let families = match cached {
            Some(f) => f,
            None => {
                let f = search_isospectral(n, k)?;
                if let Some(dir) = &opts.checkpoint_dir {
                    checkpoint::store_cell(dir, n, k, &f)?;
                }
                f
            }
        };
        on_cell(k, &families, resumed)?;
        all.extend(families);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfun::p_poly_direct;

    fn brute_force(n: usize, k: u64) -> Vec<Vec<LensSpace>> {
        let classes = all_classes(n, k);
        let polys: Vec<_> = classes.iter().map(|l| p_poly_direct(l).unwrap()).collect();
        let mut groups: BTreeMap<&BivariatePoly, Vec<LensSpace>> = BTreeMap::new();
        for (p, l) in polys.iter().zip(&classes) {
            groups.entry(p).or_default().push(l.clone());
        }
        let mut out: Vec<_> = groups.into_values().filter(|g| g.len() >= 2).collect();
        out.iter_mut().for_each(|g| g.sort());
        out.sort();
        out
    }

    #[test]
    fn complete_against_all_pairs() {
        for n in 2..=3 {
            for k in 2..=12 {
                let found: Vec<Vec<LensSpace>> = search_isospectral(n, k).unwrap().into_iter().map(|f| f.members).collect();
                assert_eq!(found, brute_force(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn classes_match_sequential_enumeration() {
        for (n, k) in [(2, 9), (3, 16), (4, 7)] {
            let mut seq: Vec<_> = crate::lens::enumerate_cr_classes(n, k).collect();
            seq.sort();
            assert_eq!(all_classes(n, k), seq);
        }
    }

    #[test]
    fn known_family_cells() {
        let (fams, stats) = search_cell(3, 49).unwrap();
        assert_eq!(fams.len(), 1);
        assert_eq!(fams[0].member_list(), "[1,8,22] [1,8,36]");
        assert!(stats.after_full <= stats.after_small && stats.after_small <= stats.after_modular);
        let fams = search_isospectral(4, 7).unwrap();
        assert_eq!(fams.len(), 1);
        assert_eq!(fams[0].member_list(), "[1,2,3,4] [1,2,3,5]");
    }

    #[test]
    fn family_json_roundtrip() {
        let fams = search_isospectral(4, 7).unwrap();
        let line = serde_json::to_string(&fams[0]).unwrap();
        assert_eq!(line, r#"{"n":4,"k":7,"members":[[1,2,3,4],[1,2,3,5]]}"#);
        let back: IsospectralFamily = serde_json::from_str(&line).unwrap();
        assert_eq!(back, fams[0]);
    }

    #[test]
    fn checkpoints_resume_and_reject_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let opts = SweepOptions {
            checkpoint_dir: Some(dir.path().to_path_buf()),
            resume: true,
        };
        let mut resumed = Vec::new();
        let first = sweep(4, 6..=8, &opts, |k, _, r| {
            resumed.push((k, r));
            Ok(())
        })
        .unwrap();
        assert!(resumed.iter().all(|&(_, r)| !r));
        resumed.clear();
        let path = checkpoint::cell_path(dir.path(), 4, 7);
        let mut rec: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
        rec["families"][0]["members"][1][3] = 6.into();
        std::fs::write(&path, serde_json::to_vec(&rec).unwrap()).unwrap();
        let second = sweep(4, 6..=8, &opts, |k, _, r| {
            resumed.push((k, r));
            Ok(())
        })
        .unwrap();
        assert_eq!(first, second);
        assert_eq!(resumed, vec![(6, true), (7, false), (8, true)]);
    }
}
