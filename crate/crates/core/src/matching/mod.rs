//! Perfect matchings with low crossing number.
//!
//! A pair `{x, y}` crosses a range `S` when exactly one of `x, y` lies in
//! `S`; the crossing number of a matching is the largest number of its pairs
//! crossing a single range.

mod brute;
mod mwu;
mod weights;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use brute::brute_force_min_crossing_matching;
pub use mwu::{build_matching_mwu, CandidatePolicy, MwuMatcher, MwuOptions, TieBreak};
pub use weights::{Score, WeightMode, WeightState};

use crate::error::{Error, Result};
use crate::geometry::FamilyParams;
use crate::setsystem::SetSystem;

/// One greedy step.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub pair: (usize, usize),
    /// Weight, before the update, of the ranges the pair crosses.
    pub score: Score,
    pub ranges_crossed: usize,
    /// Chosen among sampled candidates rather than all unmatched pairs.
    pub sampled: bool,
}

/// Disjoint pairs covering the ground set, plus one leftover point when `n`
/// is odd.
#[derive(Clone, Debug, PartialEq)]
pub struct Matching {
    n: usize,
    pairs: Vec<(usize, usize)>,
    leftover: Option<usize>,
    trace: Vec<TraceStep>,
}

impl Matching {
    /// Validates and normalizes a matching: each pair is stored with its
    /// smaller id first.
    pub fn new(n: usize, pairs: Vec<(usize, usize)>, leftover: Option<usize>) -> Result<Self> {
        let m = Matching {
            n,
            pairs: pairs.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect(),
            leftover,
            trace: Vec::new(),
        };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn with_trace(mut self, trace: Vec<TraceStep>) -> Self {
        self.trace = trace;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.n];
        let mut mark = |x: usize| -> Result<()> {
            if x >= self.n {
                return Err(Error::InvalidPoint { id: x, n: self.n });
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidInput(format!("point {x} is matched more than once")));
            }
            Ok(())
        };
        for &(a, b) in &self.pairs {
            if a == b {
                return Err(Error::InvalidInput(format!("pair ({a}, {b}) repeats a point")));
            }
            mark(a)?;
            mark(b)?;
        }
        if let Some(x) = self.leftover {
            mark(x)?;
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidInput(format!("point {x} is not covered")));
        }
        if self.pairs.len() != self.n / 2 {
            return Err(Error::InvalidInput(format!(
                "{} pairs for {} points",
                self.pairs.len(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn leftover(&self) -> Option<usize> {
        self.leftover
    }

    pub fn trace(&self) -> &[TraceStep] {
        &self.trace
    }

    /// Serializes to the matching file format. `crossing_number`, when given,
    /// is stored so that `verify` can recheck it.
    pub fn to_json(&self, crossing_number: Option<usize>) -> String {
        let file = MatchingFile {
            n: self.n,
            pairs: self.pairs.iter().map(|&(a, b)| [a, b]).collect(),
            leftover: self.leftover,
            crossing_number,
        };
        let mut text = serde_json::to_string(&file).expect("matching serializes");
        text.push('\n');
        text
    }

    /// Parses a matching file, returning the matching and the stored
    /// crossing number, if any. Structural validation is left to the caller
    /// so that tampered files can be reported rather than rejected.
    pub fn from_json_unchecked(text: &str, origin: &Path) -> Result<(Self, Option<usize>)> {
        let file: MatchingFile = serde_json::from_str(text).map_err(|e| {
            Error::format(origin, format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        let m = Matching {
            n: file.n,
            pairs: file.pairs.iter().map(|&[a, b]| (a.min(b), a.max(b))).collect(),
            leftover: file.leftover,
            trace: Vec::new(),
        };
        Ok((m, file.crossing_number))
    }

    /// Trace as CSV: `step,x,y,score_log2,ranges_crossed`. A zero score has
    /// no logarithm and leaves the field empty.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("step,x,y,score_log2,ranges_crossed\n");
        for (i, s) in self.trace.iter().enumerate() {
            let log = s.score.log2().map(|v| format!("{v:.6}")).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{},{}", i + 1, s.pair.0, s.pair.1, log, s.ranges_crossed);
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatchingFile {
    n: usize,
    pairs: Vec<[usize; 2]>,
    leftover: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    crossing_number: Option<usize>,
}

pub fn save_matching(matching: &Matching, crossing_number: Option<usize>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, matching.to_json(crossing_number)).map_err(|e| Error::io(path, e))
}

/// Loads and validates a matching file.
pub fn load_matching(path: impl AsRef<Path>) -> Result<Matching> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (m, _) = Matching::from_json_unchecked(&text, path)?;
    m.validate().map_err(|e| Error::format(path, e.to_string()))?;
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingReport {
    pub per_range_crossings: Vec<usize>,
    /// The crossing number `N`.
    pub max_crossing: usize,
    /// First range attaining `max_crossing`; `None` for a system without ranges.
    pub argmax_range: Option<usize>,
}

impl CrossingReport {
    pub(crate) fn from_counts(per_range_crossings: Vec<usize>) -> Self {
        let mut max_crossing = 0;
        let mut argmax_range = None;
        for (s, &c) in per_range_crossings.iter().enumerate() {
            if argmax_range.is_none() || c > max_crossing {
                max_crossing = c;
                argmax_range = Some(s);
            }
        }
        CrossingReport {
            per_range_crossings,
            max_crossing,
            argmax_range,
        }
    }
}

/// Whether the pair `{x, y}` crosses range `s`.
pub fn pair_crosses(sys: &SetSystem, s: usize, pair: (usize, usize)) -> Result<bool> {
    let (x, y) = pair;
    check_pair(sys, pair)?;
    let range = sys.range(s)?;
    Ok(range.contains(x) != range.contains(y))
}

fn check_pair(sys: &SetSystem, (x, y): (usize, usize)) -> Result<()> {
    for p in [x, y] {
        if p >= sys.n() {
            return Err(Error::InvalidPoint { id: p, n: sys.n() });
        }
    }
    if x == y {
        return Err(Error::InvalidInput(format!("pair ({x}, {y}) repeats a point")));
    }
    Ok(())
}

/// Total weight of the ranges crossed by `pair`, summed in ascending range
/// order.
pub fn weighted_crossing_score(sys: &SetSystem, ws: &WeightState, pair: (usize, usize)) -> Result<Score> {
    check_pair(sys, pair)?;
    if ws.cross_count().len() != sys.m() {
        return Err(Error::SizeMismatch {
            expected: sys.m(),
            actual: ws.cross_count().len(),
        });
    }
    let (x, y) = pair;
    let crossed = sys
        .ranges()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.contains(x) != r.contains(y))
        .map(|(s, _)| s);
    Ok(match ws.mode() {
        WeightMode::Exact => {
            let mut total = num_bigint::BigUint::default();
            for s in crossed {
                total += num_bigint::BigUint::from(1u32) << ws.cross_count()[s];
            }
            Score::Exact(total)
        }
        WeightMode::Scaled => {
            let e = ws.exp_offset() as i64;
            let mut total = 0.0;
            for s in crossed {
                total += weights::pow2(ws.cross_count()[s] as i64 - e);
            }
            Score::Scaled {
                value: total,
                exp_offset: ws.exp_offset(),
            }
        }
    })
}

/// Per-range crossing counts of a matching.
pub fn crossing_report(sys: &SetSystem, matching: &Matching) -> Result<CrossingReport> {
    if matching.n() != sys.n() {
        return Err(Error::SizeMismatch {
            expected: sys.n(),
            actual: matching.n(),
        });
    }
    let inc = sys.incidence();
    let mut counts = vec![0usize; sys.m()];
    for &(x, y) in matching.pairs() {
        for_each_crossed(&inc[x], &inc[y], |s| counts[s as usize] += 1);
    }
    Ok(CrossingReport::from_counts(counts))
}

/// Calls `f` for every range id in the symmetric difference of two ascending
/// id lists, in ascending order.
#[inline]
pub(crate) fn for_each_crossed(a: &[u32], b: &[u32], mut f: impl FnMut(u32)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                f(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                f(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    a[i..].iter().for_each(|&s| f(s));
    b[j..].iter().for_each(|&s| f(s));
}

/// `B log2(n) + A (n^c1 t^c g(n))^(1 / (1 + c1 + c))`.
pub fn predicted_crossing_bound(n: usize, t: usize, params: &FamilyParams, constants: (f64, f64)) -> f64 {
    let (a, b) = constants;
    let n = n as f64;
    let inner = n.powf(params.c1) * (t as f64).powf(params.c) * params.g.eval(n);
    b * n.log2() + a * inner.powf(1.0 / (1.0 + params.c1 + params.c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::family_params;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pair_crossing_cases() {
        let sys = SetSystem::build(4, &[vec![0, 1]]).unwrap();
        assert!(!pair_crosses(&sys, 0, (0, 1)).unwrap());
        assert!(!pair_crosses(&sys, 0, (2, 3)).unwrap());
        assert!(pair_crosses(&sys, 0, (1, 2)).unwrap());
        assert!(pair_crosses(&sys, 0, (1, 1)).is_err());
        assert!(pair_crosses(&sys, 0, (1, 4)).is_err());
        assert!(pair_crosses(&sys, 1, (0, 2)).is_err());
    }

    #[test]
    fn fresh_scores_count_ranges() {
        let sys = SetSystem::build(4, &[vec![0, 1], vec![1, 2], vec![3]]).unwrap();
        for mode in [WeightMode::Exact, WeightMode::Scaled] {
            let ws = WeightState::new(sys.m(), mode);
            let s = weighted_crossing_score(&sys, &ws, (0, 2)).unwrap();
            assert_eq!(s.log2(), Some(1.0));
            let zero = SetSystem::build(4, &[vec![0, 1]]).unwrap();
            let ws = WeightState::new(1, mode);
            assert!(weighted_crossing_score(&zero, &ws, (2, 3)).unwrap().is_zero());
        }
    }

    #[test]
    fn score_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let raw: Vec<Vec<usize>> = (0..40)
            .map(|_| (0..20).filter(|_| rng.random_bool(0.4)).collect())
            .collect();
        let sys = SetSystem::build(20, &raw).unwrap();
        let mut ws = WeightState::new(sys.m(), WeightMode::Exact);
        for _ in 0..30 {
            let picks: Vec<u32> = (0..sys.m() as u32).filter(|_| rng.random_bool(0.3)).collect();
            ws.record_crossing(&picks, 64);
        }
        for x in 0..20 {
            for y in x + 1..20 {
                let mut naive = num_bigint::BigUint::default();
                for (s, r) in sys.ranges().iter().enumerate() {
                    if r.contains(x) ^ r.contains(y) {
                        naive += num_bigint::BigUint::from(2u32).pow(ws.cross_count()[s]);
                    }
                }
                assert_eq!(weighted_crossing_score(&sys, &ws, (x, y)).unwrap(), Score::Exact(naive));
            }
        }
    }

    #[test]
    fn crossing_report_cases() {
        let sys = SetSystem::build(4, &[vec![0, 1, 2, 3]]).unwrap();
        let m = Matching::new(4, vec![(0, 1), (2, 3)], None).unwrap();
        assert_eq!(crossing_report(&sys, &m).unwrap().max_crossing, 0);

        let sys = SetSystem::build(4, &[vec![0]]).unwrap();
        let r = crossing_report(&sys, &m).unwrap();
        assert_eq!((r.max_crossing, r.argmax_range), (1, Some(0)));

        let other = SetSystem::build(6, &[vec![0]]).unwrap();
        assert!(crossing_report(&other, &m).is_err());
    }

    #[test]
    fn crossing_report_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let n = 2 * rng.random_range(1..15);
            let raw: Vec<Vec<usize>> = (0..30)
                .map(|_| (0..n).filter(|_| rng.random_bool(0.4)).collect())
                .collect();
            let sys = SetSystem::build(n, &raw).unwrap();
            let mut perm: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
            let pairs: Vec<_> = perm.chunks(2).map(|c| (c[0], c[1])).collect();
            let m = Matching::new(n, pairs.clone(), None).unwrap();
            let r = crossing_report(&sys, &m).unwrap();
            for s in 0..sys.m() {
                let naive = pairs
                    .iter()
                    .filter(|&&(a, b)| pair_crosses(&sys, s, (a, b)).unwrap())
                    .count();
                assert_eq!(r.per_range_crossings[s], naive);
            }
            assert_eq!(r.max_crossing, r.per_range_crossings.iter().copied().max().unwrap_or(0));
        }
    }

    #[test]
    fn matching_validation() {
        assert!(Matching::new(4, vec![(0, 1), (1, 2)], None).is_err());
        assert!(Matching::new(4, vec![(0, 1)], None).is_err());
        assert!(Matching::new(3, vec![(0, 1)], None).is_err());
        assert!(Matching::new(3, vec![(0, 1)], Some(2)).is_ok());
        assert!(Matching::new(2, vec![(0, 0)], None).is_err());
        let m = Matching::new(4, vec![(3, 1), (0, 2)], None).unwrap();
        assert_eq!(m.pairs(), &[(1, 3), (0, 2)]);
        let (back, n) = Matching::from_json_unchecked(&m.to_json(Some(2)), Path::new("mem")).unwrap();
        assert_eq!((back, n), (m, Some(2)));
    }

    #[test]
    fn predicted_bounds() {
        let hp = family_params("halfplanes").unwrap();
        assert!((predicted_crossing_bound(1024, 16, &hp, (1.0, 1.0)) - 14.0).abs() < 1e-12);
        let hs = family_params("halfspaces3").unwrap();
        assert!((predicted_crossing_bound(1024, 64, &hs, (1.0, 1.0)) - 26.0).abs() < 1e-9);
        // log n + sqrt(t) shape: quadrupling t doubles the additive term
        let a = predicted_crossing_bound(1024, 64, &hp, (1.0, 0.0));
        let b = predicted_crossing_bound(1024, 256, &hp, (1.0, 0.0));
        assert!((b / a - 2.0).abs() < 1e-12);
    }
}
