use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::setsystem::SetSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreePolicy {
    /// Scan ranges in canonical order.
    GreedyKeep,
    /// Scan ranges in a seeded random order.
    RandomKeep,
}

impl FromStr for DegreePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy-keep" => Ok(Self::GreedyKeep),
            "random-keep" => Ok(Self::RandomKeep),
            other => Err(Error::InvalidInput(format!("unknown degree policy `{other}`"))),
        }
    }
}

impl fmt::Display for DegreePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GreedyKeep => "greedy-keep",
            Self::RandomKeep => "random-keep",
        })
    }
}

/// Keeps a maximal subfamily of ranges in which every point lies in at most
/// `t` ranges.
///
/// Ranges are scanned in policy order and a range is kept iff none of its
/// points is already saturated. Kept ranges stay in canonical order. Since
/// saturation only grows, every dropped range still hits a saturated point
/// at the end, so no dropped range can be re-added.
pub fn enforce_degree(sys: &SetSystem, t: usize, policy: DegreePolicy, seed: u64) -> Result<SetSystem> {
    if t == 0 {
        return Err(Error::InvalidInput("degree bound t must be at least 1".into()));
    }
    let mut order: Vec<usize> = (0..sys.m()).collect();
    if policy == DegreePolicy::RandomKeep {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
    }
    let mut degree = vec![0usize; sys.n()];
    let mut saturated = Bitset::new(sys.n());
    let mut keep = Vec::new();
    for id in order {
        let range = &sys.ranges()[id];
        if range.intersects(&saturated) {
            continue;
        }
        for x in range.iter() {
            degree[x] += 1;
            if degree[x] == t {
                saturated.insert(x);
            }
        }
        keep.push(id);
    }
    keep.sort_unstable();
    Ok(sys.restrict_to(&keep))
}
