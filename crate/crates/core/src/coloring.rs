//! ±1 colorings induced by matchings, and their discrepancy.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::matching::{crossing_report, Matching};
use crate::setsystem::SetSystem;

const BRUTE_MAX_N: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Origin {
    Deterministic,
    Random { seed: u64, attempt: u32 },
    Exhaustive,
    /// Loaded or built by hand.
    External,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    signs: Vec<i8>,
    origin: Origin,
}

impl Coloring {
    pub fn new(signs: Vec<i8>, origin: Origin) -> Result<Self> {
        if let Some(i) = signs.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput(format!("sign {} at point {i} is not ±1", signs[i])));
        }
        Ok(Coloring { signs, origin })
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn negated(&self) -> Coloring {
        Coloring {
            signs: self.signs.iter().map(|&s| -s).collect(),
            origin: self.origin,
        }
    }

    /// Serializes to the coloring file format, optionally storing the
    /// discrepancy for later verification.
    pub fn to_json(&self, discrepancy: Option<i64>) -> String {
        let file = ColoringFile {
            n: self.n(),
            signs: self.signs.iter().map(|&s| s as i64).collect(),
            origin: self.origin,
            discrepancy,
        };
        let mut text = serde_json::to_string(&file).expect("coloring serializes");
        text.push('\n');
        text
    }

    /// Parses a coloring file. Returns the stored discrepancy, if present.
    pub fn from_json(text: &str, origin: &Path) -> Result<(Self, Option<i64>)> {
        let file: ColoringFile = serde_json::from_str(text).map_err(|e| {
            Error::format(origin, format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        if file.signs.len() != file.n {
            return Err(Error::format(
                origin,
                format!("`n` is {} but {} signs are listed", file.n, file.signs.len()),
            ));
        }
        if let Some(i) = file.signs.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::format(origin, format!("signs[{i}] = {} is not ±1", file.signs[i])));
        }
        let c = Coloring {
            signs: file.signs.iter().map(|&s| s as i8).collect(),
            origin: file.origin,
        };
        Ok((c, file.discrepancy))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ColoringFile {
    n: usize,
    signs: Vec<i64>,
    #[serde(default = "external")]
    origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    discrepancy: Option<i64>,
}

fn external() -> Origin {
    Origin::External
}

pub fn save_coloring(c: &Coloring, discrepancy: Option<i64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, c.to_json(discrepancy)).map_err(|e| Error::io(path, e))
}

pub fn load_coloring(path: impl AsRef<Path>) -> Result<(Coloring, Option<i64>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Coloring::from_json(&text, path)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscrepancyReport {
    pub per_range_sum: Vec<i64>,
    pub max_abs: i64,
    /// First range attaining `max_abs`; `None` without ranges.
    pub argmax_range: Option<usize>,
}

/// First of each pair +1, second −1, leftover +1.
pub fn color_deterministic(matching: &Matching) -> Coloring {
    let mut signs = vec![1i8; matching.n()];
    for &(_, y) in matching.pairs() {
        signs[y] = -1;
    }
    Coloring {
        signs,
        origin: Origin::Deterministic,
    }
}

/// One draw: each pair is oriented by an independent fair coin, leftover
/// +1. Draws for different `(seed, attempt)` use independent streams.
pub fn random_coloring(matching: &Matching, seed: u64, attempt: u32) -> Coloring {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt as u64);
    let mut signs = vec![1i8; matching.n()];
    for &(x, y) in matching.pairs() {
        let s: i8 = if rng.random::<bool>() { 1 } else { -1 };
        signs[x] = s;
        signs[y] = -s;
    }
    Coloring {
        signs,
        origin: Origin::Random { seed, attempt },
    }
}

/// `ceil(slack * sqrt(2 N ln(4m)))`, or 0 when there are no ranges.
pub fn random_threshold(max_crossing: usize, m: usize, slack: f64) -> i64 {
    if m == 0 {
        return 0;
    }
    (slack * (2.0 * max_crossing as f64 * (4.0 * m as f64).ln()).sqrt()).ceil() as i64
}

/// `min(N, sqrt(N ln m))`, the shape of the two discrepancy bounds a
/// matching with crossing number `N` yields.
pub fn matching_discrepancy_bound(max_crossing: usize, m: usize) -> f64 {
    let n = max_crossing as f64;
    n.min((n * (m.max(1) as f64).ln()).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomColoring {
    pub coloring: Coloring,
    pub report: DiscrepancyReport,
    pub attempts: u32,
    pub threshold: i64,
    pub threshold_met: bool,
}

/// Rejection sampling over [`random_coloring`] until the discrepancy is at
/// most [`random_threshold`], or `max_attempts` draws. The best draw is
/// returned either way.
pub fn color_random(
    sys: &SetSystem,
    matching: &Matching,
    seed: u64,
    max_attempts: u32,
    slack: f64,
) -> Result<RandomColoring> {
    if slack.is_nan() || slack < 1.0 {
        return Err(Error::InvalidInput(format!("slack must be at least 1, got {slack}")));
    }
    if max_attempts == 0 {
        return Err(Error::InvalidInput("max_attempts must be positive".into()));
    }
    let cross = crossing_report(sys, matching)?;
    let threshold = random_threshold(cross.max_crossing, sys.m(), slack);
    let mut best: Option<(Coloring, DiscrepancyReport)> = None;
    for attempt in 1..=max_attempts {
        let c = random_coloring(matching, seed, attempt);
        let rep = discrepancy(sys, &c)?;
        let met = rep.max_abs <= threshold;
        if best.as_ref().is_none_or(|(_, b)| rep.max_abs < b.max_abs) {
            best = Some((c, rep));
        }
        if met {
            let (coloring, report) = best.expect("set above");
            return Ok(RandomColoring {
                coloring,
                report,
                attempts: attempt,
                threshold,
                threshold_met: true,
            });
        }
    }
    let (coloring, report) = best.expect("at least one attempt");
    Ok(RandomColoring {
        coloring,
        report,
        attempts: max_attempts,
        threshold,
        threshold_met: false,
    })
}

/// Exact signed range sums.
pub fn discrepancy(sys: &SetSystem, coloring: &Coloring) -> Result<DiscrepancyReport> {
    if coloring.n() != sys.n() {
        return Err(Error::SizeMismatch {
            expected: sys.n(),
            actual: coloring.n(),
        });
    }
    let plus = Bitset::from_indices(sys.n(), coloring.signs.iter().enumerate().filter(|(_, &s)| s > 0).map(|(i, _)| i));
    let per_range_sum: Vec<i64> = sys
        .ranges()
        .iter()
        .map(|r| 2 * r.intersection_count(&plus) as i64 - r.count() as i64)
        .collect();
    Ok(report_from_sums(per_range_sum))
}

fn report_from_sums(per_range_sum: Vec<i64>) -> DiscrepancyReport {
    let mut max_abs = 0;
    let mut argmax_range = None;
    for (s, &v) in per_range_sum.iter().enumerate() {
        if argmax_range.is_none() || v.abs() > max_abs {
            max_abs = v.abs();
            argmax_range = Some(s);
        }
    }
    DiscrepancyReport {
        per_range_sum,
        max_abs,
        argmax_range,
    }
}

/// Minimum-discrepancy coloring by exhaustive scan, `n <= 24`. Point 0 is
/// fixed to +1. Patterns are scanned with point 1 as the most significant
/// position and +1 before −1; the first minimizer is returned.
pub fn brute_force_min_discrepancy(sys: &SetSystem) -> Result<(Coloring, DiscrepancyReport)> {
    let n = sys.n();
    if n > BRUTE_MAX_N {
        return Err(Error::InvalidInput(format!(
            "exhaustive discrepancy needs n <= {BRUTE_MAX_N}, got {n}"
        )));
    }
    let inc = sys.incidence();
    let mut sums: Vec<i64> = sys.ranges().iter().map(|r| r.count() as i64).collect();
    let mut signs = vec![1i8; n];
    let free = n.saturating_sub(1);
    let mut best = i64::MAX;
    let mut best_signs = signs.clone();
    let total: u64 = 1 << free;
    for key in 0..total {
        if key > 0 {
            // bits that change from key - 1 to key; bit b is point n - 1 - b
            let changed = key ^ (key - 1);
            for b in 0..changed.trailing_ones() {
                let p = n - 1 - b as usize;
                signs[p] = -signs[p];
                let delta = 2 * signs[p] as i64;
                for &s in &inc[p] {
                    sums[s as usize] += delta;
                }
            }
        }
        let mut worst = 0;
        for &v in &sums {
            worst = worst.max(v.abs());
            if worst >= best {
                break;
            }
        }
        if worst < best {
            best = worst;
            best_signs.copy_from_slice(&signs);
        }
    }
    let coloring = Coloring {
        signs: best_signs,
        origin: Origin::Exhaustive,
    };
    let report = discrepancy(sys, &coloring)?;
    Ok((coloring, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{enforce_degree, generate_points, halfplane_system, interval_system, DegreePolicy, PointDistribution};
    use crate::matching::{build_matching_mwu, MwuOptions};
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};

    fn random_system(seed: u64, n: usize, m: usize, p: f64) -> SetSystem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<Vec<usize>> = (0..m).map(|_| (0..n).filter(|_| rng.random_bool(p)).collect()).collect();
        SetSystem::build(n, &raw).unwrap()
    }

    fn naive(sys: &SetSystem, c: &Coloring) -> Vec<i64> {
        (0..sys.m())
            .map(|s| (0..sys.n()).filter(|&i| sys.ranges()[s].contains(i)).map(|i| c.signs()[i] as i64).sum())
            .collect()
    }

    #[test]
    fn deterministic_examples() {
        let m = Matching::new(2, vec![(0, 1)], None).unwrap();
        assert_eq!(color_deterministic(&m).signs(), &[1, -1]);
        let m = Matching::new(4, vec![(0, 2), (1, 3)], None).unwrap();
        assert_eq!(color_deterministic(&m).signs(), &[1, 1, -1, -1]);
        let m = Matching::new(3, vec![(2, 0)], Some(1)).unwrap();
        assert_eq!(color_deterministic(&m).signs(), &[1, 1, -1]);
    }

    #[test]
    fn all_plus_on_five() {
        let sys = SetSystem::build(5, &[(0..5).collect()]).unwrap();
        let c = Coloring::new(vec![1; 5], Origin::External).unwrap();
        assert_eq!(discrepancy(&sys, &c).unwrap().per_range_sum, vec![5]);
    }

    #[test]
    fn alternating_on_intervals() {
        let pts = generate_points(4, 1, PointDistribution::UniformSquare, 8).unwrap();
        let sys = interval_system(&pts).unwrap();
        assert_eq!(sys.m(), 10);
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by_key(|&i| pts.grid(i)[0]);
        let mut signs = vec![0i8; 4];
        for (r, &i) in order.iter().enumerate() {
            signs[i] = if r % 2 == 0 { 1 } else { -1 };
        }
        let c = Coloring::new(signs, Origin::External).unwrap();
        assert_eq!(discrepancy(&sys, &c).unwrap().max_abs, 1);
    }

    #[test]
    fn sums_match_naive() {
        for seed in 0..30 {
            let sys = random_system(seed, 70, 40, 0.4);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            let c = Coloring::new((0..70).map(|_| if rng.random() { 1 } else { -1 }).collect(), Origin::External).unwrap();
            let rep = discrepancy(&sys, &c).unwrap();
            assert_eq!(rep.per_range_sum, naive(&sys, &c));
            assert_eq!(rep.max_abs, rep.per_range_sum.iter().map(|v| v.abs()).max().unwrap());
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let sys = SetSystem::build(3, &[vec![0]]).unwrap();
        let c = Coloring::new(vec![1, 1], Origin::External).unwrap();
        assert!(discrepancy(&sys, &c).is_err());
        assert!(Coloring::new(vec![1, 0], Origin::External).is_err());
    }

    #[test]
    fn brute_examples() {
        let sys = SetSystem::build(2, &[vec![0, 1]]).unwrap();
        assert_eq!(brute_force_min_discrepancy(&sys).unwrap().1.max_abs, 0);
        let sys = SetSystem::build(6, &(0..6).map(|i| vec![i]).collect::<Vec<_>>()).unwrap();
        let (c, rep) = brute_force_min_discrepancy(&sys).unwrap();
        assert_eq!(rep.max_abs, 1);
        assert_eq!(c.signs(), &[1; 6]);
        assert!(brute_force_min_discrepancy(&SetSystem::build(25, &[vec![0]]).unwrap()).is_err());
    }

    #[test]
    fn brute_matches_plain_enumeration() {
        for seed in 0..20 {
            let n = 1 + seed as usize % 9;
            let sys = random_system(seed, n, 12, 0.5);
            let (c, rep) = brute_force_min_discrepancy(&sys).unwrap();
            assert_eq!(c.signs()[0], 1);
            let mut expect = None;
            for key in 0u64..1 << (n - 1) {
                let mut signs = vec![1i8; n];
                for p in 1..n {
                    if key >> (n - 1 - p) & 1 == 1 {
                        signs[p] = -1;
                    }
                }
                let cc = Coloring::new(signs, Origin::External).unwrap();
                let d = discrepancy(&sys, &cc).unwrap().max_abs;
                if expect.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    expect = Some((d, cc));
                }
            }
            let (d, cc) = expect.unwrap();
            assert_eq!(rep.max_abs, d);
            assert_eq!(c.signs(), cc.signs());
        }
    }

    #[test]
    fn zero_crossing_accepted_first_try() {
        let sys = SetSystem::build(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        let m = Matching::new(4, vec![(0, 1), (2, 3)], None).unwrap();
        let r = color_random(&sys, &m, 3, 10, 1.0).unwrap();
        assert_eq!(r.attempts, 1);
        assert_eq!(r.threshold, 0);
        assert!(r.threshold_met);
        assert_eq!(r.report.max_abs, 0);
    }

    #[test]
    fn random_is_seeded() {
        let sys = random_system(2, 30, 50, 0.3);
        let (m, _, _) = build_matching_mwu(&sys, MwuOptions::default()).unwrap();
        let a = color_random(&sys, &m, 17, 20, 1.0).unwrap();
        let b = color_random(&sys, &m, 17, 20, 1.0).unwrap();
        assert_eq!(a, b);
        assert!(color_random(&sys, &m, 17, 20, 0.5).is_err());
    }

    #[test]
    fn zero_mean_over_seeds() {
        let pts = generate_points(48, 2, PointDistribution::UniformSquare, 1).unwrap();
        let sys = enforce_degree(&halfplane_system(&pts).unwrap(), 12, DegreePolicy::RandomKeep, 1).unwrap();
        let (m, _, cross) = build_matching_mwu(&sys, MwuOptions::default()).unwrap();
        let mut totals = vec![0i64; sys.m()];
        for seed in 0..1000 {
            let c = random_coloring(&m, seed, 1);
            for (t, v) in totals.iter_mut().zip(discrepancy(&sys, &c).unwrap().per_range_sum) {
                *t += v;
            }
        }
        // leftover-free, so each sum is a sum of N_S independent ±1 terms
        for s in 0..sys.m() {
            let mean = totals[s] as f64 / 1000.0;
            let ns = cross.per_range_crossings[s] as f64;
            assert!(mean.abs() <= 3.0 * ns.sqrt() / 1000f64.sqrt() + 1e-12, "range {s}: mean {mean}, N_S {ns}");
        }
    }

    #[test]
    fn file_round_trip() {
        let c = Coloring::new(vec![1, -1, -1], Origin::Random { seed: 4, attempt: 2 }).unwrap();
        let (back, d) = Coloring::from_json(&c.to_json(Some(3)), Path::new("c.json")).unwrap();
        assert_eq!(back, c);
        assert_eq!(d, Some(3));
        assert!(Coloring::from_json(r#"{"n":2,"signs":[1,2]}"#, Path::new("c.json")).is_err());
        assert!(Coloring::from_json(r#"{"n":3,"signs":[1,1]}"#, Path::new("c.json")).is_err());
        let (ext, _) = Coloring::from_json(r#"{"n":1,"signs":[-1]}"#, Path::new("c.json")).unwrap();
        assert_eq!(ext.origin(), Origin::External);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matching_colorings_behave(seed in 0u64..10_000, n in 2usize..40, m in 1usize..60) {
            let sys = random_system(seed, n, m, 0.35);
            let (mt, _, cross) = build_matching_mwu(&sys, MwuOptions::default()).unwrap();
            let det = color_deterministic(&mt);
            let rnd = color_random(&sys, &mt, seed, 5, 1.0).unwrap();
            for c in [&det, &rnd.coloring] {
                for &(x, y) in mt.pairs() {
                    prop_assert_eq!(c.signs()[x], -c.signs()[y]);
                }
                let rep = discrepancy(&sys, c).unwrap();
                // contributions of crossing pairs, plus the leftover point
                for s in 0..sys.m() {
                    let r = &sys.ranges()[s];
                    let mut expect: i64 = mt
                        .pairs()
                        .iter()
                        .filter(|&&(x, y)| r.contains(x) != r.contains(y))
                        .map(|&(x, y)| if r.contains(x) { c.signs()[x] } else { c.signs()[y] } as i64)
                        .sum();
                    if let Some(l) = mt.leftover() {
                        if r.contains(l) {
                            expect += c.signs()[l] as i64;
                        }
                    }
                    prop_assert_eq!(rep.per_range_sum[s], expect);
                }
                prop_assert_eq!(discrepancy(&sys, &c.negated()).unwrap().max_abs, rep.max_abs);
            }
            let det_rep = discrepancy(&sys, &det).unwrap();
            prop_assert!(det_rep.max_abs as usize <= cross.max_crossing + mt.leftover().is_some() as usize);
            if mt.leftover().is_none() {
                prop_assert!(det_rep.max_abs as usize <= cross.max_crossing);
            }
        }
    }
}
