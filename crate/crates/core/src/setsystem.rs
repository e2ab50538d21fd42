//! Finite set systems: a ground set `[0, n)` and a deduplicated, canonically
//! ordered list of nonempty ranges.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::bitset::Bitset;
use crate::error::{Error, Result};

/// An immutable set system over the ground set `[0, n)`.
///
/// Ranges are nonempty, pairwise distinct and sorted by the lexicographic
/// order of their member lists (see [`Bitset`]'s `Ord`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    n: usize,
    ranges: Vec<Bitset>,
    family: Option<String>,
    labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub per_point_degree: Vec<usize>,
    pub max_degree: usize,
}

/// Result of scanning all range pairs for the smallest symmetric difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingCertificate {
    /// Minimum pairwise symmetric-difference size.
    pub delta: usize,
    /// Maximum range size.
    pub k: usize,
    /// Lexicographically first pair realizing `delta`.
    pub witness_pair: (usize, usize),
    requested: (usize, usize),
}

impl PackingCertificate {
    /// Whether the system is a `k`-shallow `delta`-packing for the requested
    /// parameters: every pair differs in more than `delta` elements and every
    /// range has at most `k` elements.
    pub fn holds(&self) -> bool {
        let (delta, k) = self.requested;
        self.delta > delta && self.k <= k
    }

    pub fn requested(&self) -> (usize, usize) {
        self.requested
    }
}

impl SetSystem {
    /// Builds a system from raw index lists. Duplicates collapse, empty
    /// ranges are dropped and the survivors are put in canonical order.
    pub fn build(n: usize, raw_ranges: &[Vec<usize>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGroundSet);
        }
        let mut sets = Vec::with_capacity(raw_ranges.len());
        for (id, raw) in raw_ranges.iter().enumerate() {
            let mut set = Bitset::new(n);
            for &index in raw {
                if index >= n {
                    return Err(Error::IndexOutOfBounds { range: id, index, n });
                }
                set.insert(index);
            }
            sets.push(set);
        }
        Ok(Self::from_bitsets(n, sets, None))
    }

    /// Same as [`SetSystem::build`], carrying one provenance label per raw
    /// range. A collapsed duplicate keeps the label of its first occurrence.
    pub fn build_labeled(n: usize, raw_ranges: &[Vec<usize>], labels: Vec<String>) -> Result<Self> {
        if labels.len() != raw_ranges.len() {
            return Err(Error::SizeMismatch {
                expected: raw_ranges.len(),
                actual: labels.len(),
            });
        }
        let unlabeled = Self::build(n, raw_ranges)?;
        let mut first: Vec<(Bitset, String)> = Vec::new();
        let mut seen = HashSet::new();
        for (raw, label) in raw_ranges.iter().zip(labels) {
            let set = Bitset::from_indices(n, raw.iter().copied());
            if !set.is_empty() && seen.insert(set.clone()) {
                first.push((set, label));
            }
        }
        first.sort_by(|a, b| a.0.cmp(&b.0));
        let labels = first.into_iter().map(|(_, l)| l).collect();
        Ok(SetSystem {
            labels: Some(labels),
            ..unlabeled
        })
    }

    /// Canonicalizes already-built bitsets. All bitsets must have universe `n`.
    pub fn from_bitsets(n: usize, mut sets: Vec<Bitset>, family: Option<String>) -> Self {
        assert!(n > 0, "ground set must be nonempty");
        debug_assert!(sets.iter().all(|s| s.universe() == n));
        sets.retain(|s| !s.is_empty());
        sets.sort_unstable();
        sets.dedup();
        SetSystem {
            n,
            ranges: sets,
            family,
            labels: None,
        }
    }

    pub fn with_family(mut self, family: impl Into<String>) -> Self {
        self.family = Some(family.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of ranges.
    pub fn m(&self) -> usize {
        self.ranges.len()
    }

    pub fn ranges(&self) -> &[Bitset] {
        &self.ranges
    }

    pub fn range(&self, id: usize) -> Result<&Bitset> {
        self.ranges.get(id).ok_or(Error::InvalidRange { id, m: self.m() })
    }

    pub fn family(&self) -> Option<&str> {
        self.family.as_deref()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Keeps the ranges whose ids are listed (ascending), preserving order.
    pub(crate) fn restrict_to(&self, keep: &[usize]) -> SetSystem {
        SetSystem {
            n: self.n,
            ranges: keep.iter().map(|&i| self.ranges[i].clone()).collect(),
            family: self.family.clone(),
            labels: self
                .labels
                .as_ref()
                .map(|l| keep.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    /// For every point, the ascending list of range ids containing it.
    pub fn incidence(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.n];
        for (id, range) in self.ranges.iter().enumerate() {
            for x in range.iter() {
                inc[x].push(id as u32);
            }
        }
        inc
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let mut per_point_degree = vec![0; self.n];
        for range in &self.ranges {
            for x in range.iter() {
                per_point_degree[x] += 1;
            }
        }
        let max_degree = per_point_degree.iter().copied().max().unwrap_or(0);
        DegreeProfile {
            per_point_degree,
            max_degree,
        }
    }

    pub fn symmetric_difference_size(&self, i: usize, j: usize) -> Result<usize> {
        Ok(self.range(i)?.symmetric_difference_count(self.range(j)?))
    }

    /// Scans every pair of ranges for the minimum symmetric difference.
    /// Quadratic in `m`; meant for small systems.
    pub fn verify_packing(&self, delta: usize, k: usize) -> Result<PackingCertificate> {
        let m = self.m();
        if m < 2 {
            return Err(Error::PackingTooSmall(m));
        }
        let mut best = (usize::MAX, (0, 1));
        for i in 0..m {
            for j in i + 1..m {
                let d = self.ranges[i].symmetric_difference_count(&self.ranges[j]);
                if d < best.0 {
                    best = (d, (i, j));
                }
            }
        }
        let max_size = self.ranges.iter().map(Bitset::count).max().unwrap_or(0);
        Ok(PackingCertificate {
            delta: best.0,
            k: max_size,
            witness_pair: best.1,
            requested: (delta, k),
        })
    }

    /// Number of distinct ranges with exactly `l` elements.
    pub fn shallow_cell_count(&self, l: usize) -> usize {
        self.ranges.iter().filter(|r| r.count() == l).count()
    }

    /// Range-size histogram: entry `l` counts ranges of size `l`, for `l` in `0..=n`.
    pub fn size_histogram(&self) -> Vec<usize> {
        let mut hist = vec![0; self.n + 1];
        for r in &self.ranges {
            hist[r.count()] += 1;
        }
        hist
    }

    /// Serializes to the system file format, one range per line.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        let family = serde_json::to_string(&self.family).expect("string serialization");
        let _ = write!(out, "{{\n  \"n\": {},\n  \"family\": {},\n  \"ranges\": [", self.n, family);
        for (i, r) in self.ranges.iter().enumerate() {
            out.push_str(if i == 0 { "\n    [" } else { ",\n    [" });
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{x}");
            }
            out.push(']');
        }
        out.push_str(if self.ranges.is_empty() { "]" } else { "\n  ]" });
        if let Some(labels) = &self.labels {
            let labels = serde_json::to_string(labels).expect("string serialization");
            let _ = write!(out, ",\n  \"labels\": {labels}");
        }
        out.push_str("\n}\n");
        out
    }

    /// Parses a system file. The file must already be canonical: ranges
    /// nonempty, strictly ascending within each range, and strictly
    /// increasing in canonical order.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let raw: RawSystem = serde_json::from_str(text).map_err(|e| {
            Error::format(origin, format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        if raw.n == 0 {
            return Err(Error::format(origin, "field `n`: ground set must be nonempty"));
        }
        let mut ranges = Vec::with_capacity(raw.ranges.len());
        for (i, list) in raw.ranges.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::format(origin, format!("ranges[{i}]: empty range")));
            }
            let mut set = Bitset::new(raw.n);
            for (j, &x) in list.iter().enumerate() {
                if x >= raw.n as u64 {
                    return Err(Error::format(
                        origin,
                        format!("ranges[{i}][{j}]: index {x} outside [0, {})", raw.n),
                    ));
                }
                if j > 0 && list[j - 1] >= x {
                    return Err(Error::format(
                        origin,
                        format!("ranges[{i}][{j}]: indices must be strictly ascending"),
                    ));
                }
                set.insert(x as usize);
            }
            if let Some(prev) = ranges.last() {
                if *prev >= set {
                    let what = if *prev == set {
                        "duplicates an earlier range"
                    } else {
                        "breaks canonical order"
                    };
                    return Err(Error::format(origin, format!("ranges[{i}]: {what}")));
                }
            }
            ranges.push(set);
        }
        if let Some(labels) = &raw.labels {
            if labels.len() != ranges.len() {
                return Err(Error::format(
                    origin,
                    format!("labels: {} entries for {} ranges", labels.len(), ranges.len()),
                ));
            }
        }
        Ok(SetSystem {
            n: raw.n,
            ranges,
            family: raw.family,
            labels: raw.labels,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    n: usize,
    family: Option<String>,
    ranges: Vec<Vec<u64>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

pub fn save_system(sys: &SetSystem, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, sys.to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_system(path: impl AsRef<Path>) -> Result<SetSystem> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SetSystem::from_json(&text, path)
}

/// Reads a system file without requiring canonical form and canonicalizes
/// it. Use this for hand-written incidence files.
pub fn import_system(path: impl AsRef<Path>) -> Result<SetSystem> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: RawSystem = serde_json::from_str(&text).map_err(|e| {
        Error::format(path, format!("line {} column {}: {e}", e.line(), e.column()))
    })?;
    let lists: Vec<Vec<usize>> = raw
        .ranges
        .iter()
        .map(|r| r.iter().map(|&x| x.min(usize::MAX as u64) as usize).collect())
        .collect();
    let sys = match raw.labels {
        Some(labels) => SetSystem::build_labeled(raw.n, &lists, labels)?,
        None => SetSystem::build(raw.n, &lists)?,
    };
    Ok(match raw.family {
        Some(f) => sys.with_family(f),
        None => sys,
    })
}
