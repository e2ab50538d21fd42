//! Experiment harness: generate, enforce degree, match, color, verify, and
//! sweep over `(n, t, seed)`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coloring::{color_deterministic, color_random, discrepancy, save_coloring, Coloring, RandomColoring};
use crate::error::{Error, Result};
use crate::geometry::{
    enforce_degree, family_dimension, family_params, generate_points, generate_system, DegreePolicy, PointDistribution,
    PointSet,
};
use crate::matching::{
    build_matching_mwu, crossing_report, predicted_crossing_bound, save_matching, CandidatePolicy, CrossingReport,
    Matching, MwuOptions,
};
use crate::setsystem::{load_system, save_system, SetSystem};

pub const CSV_HEADER: &str = "family,n,m,t_req,t_act,seed,N,N_pred,disc_det,disc_rand,attempts,ms";

/// Requested degree bound; `Unbounded` skips degree enforcement. Written as
/// an integer or `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DegreeBound {
    Finite(usize),
    Unbounded,
}

impl DegreeBound {
    pub fn finite(self) -> Option<usize> {
        match self {
            DegreeBound::Finite(t) => Some(t),
            DegreeBound::Unbounded => None,
        }
    }
}

impl fmt::Display for DegreeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeBound::Finite(t) => write!(f, "{t}"),
            DegreeBound::Unbounded => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for DegreeBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" => Ok(DegreeBound::Unbounded),
            _ => s
                .parse()
                .map(DegreeBound::Finite)
                .map_err(|_| Error::InvalidInput(format!("degree bound `{s}` is neither an integer nor `inf`"))),
        }
    }
}

impl Serialize for DegreeBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DegreeBound::Finite(t) => s.serialize_u64(*t as u64),
            DegreeBound::Unbounded => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for DegreeBound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(usize),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(t) => Ok(DegreeBound::Finite(t)),
            Raw::Str(s) if s == "inf" => Ok(DegreeBound::Unbounded),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected an integer or \"inf\", got \"{s}\""))),
        }
    }
}

fn default_max_attempts() -> u32 {
    100
}

fn default_dist() -> PointDistribution {
    PointDistribution::UniformSquare
}

fn default_degree_policy() -> DegreePolicy {
    DegreePolicy::RandomKeep
}

fn default_ceiling() -> f64 {
    10.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: String,
    pub n_values: Vec<usize>,
    pub t_values: Vec<DegreeBound>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub candidate_policy: CandidatePolicy,
    pub slack: f64,
    pub output_path: PathBuf,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: u32,
    #[serde(default = "default_dist")]
    pub dist: PointDistribution,
    #[serde(default = "default_degree_policy")]
    pub degree_policy: DegreePolicy,
    /// `A` in the per-cell check `N <= A (log2 n + t^(c/(1+c)) g)`.
    #[serde(default = "default_ceiling")]
    pub crossing_ceiling: f64,
    /// Records wall time in the `ms` column; otherwise it is written as 0 so
    /// that reruns produce identical files.
    #[serde(default)]
    pub timing: bool,
    /// Directory receiving per-cell system, matching and coloring files.
    #[serde(default)]
    pub artifacts_dir: Option<PathBuf>,
}

impl SweepConfig {
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text).map_err(|e| {
            Error::format(origin, format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        family_dimension(&self.family)?;
        for (name, empty) in [
            ("n_values", self.n_values.is_empty()),
            ("t_values", self.t_values.is_empty()),
            ("seeds", self.seeds.is_empty()),
        ] {
            if empty {
                return Err(Error::InvalidInput(format!("`{name}` must not be empty")));
            }
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 4) {
            return Err(Error::InvalidInput(format!("n values must be at least 4, got {n}")));
        }
        if self.t_values.contains(&DegreeBound::Finite(0)) {
            return Err(Error::InvalidInput("t values must be at least 1".into()));
        }
        if self.slack.is_nan() || self.slack < 1.0 {
            return Err(Error::InvalidInput(format!("slack must be at least 1, got {}", self.slack)));
        }
        if self.max_attempts == 0 {
            return Err(Error::InvalidInput("max_attempts must be positive".into()));
        }
        if self.crossing_ceiling.is_nan() || self.crossing_ceiling <= 0.0 {
            return Err(Error::InvalidInput("crossing_ceiling must be positive".into()));
        }
        if let CandidatePolicy::Sampled { size: 0, .. } = self.candidate_policy {
            return Err(Error::InvalidInput("sampled policy needs a positive sample size".into()));
        }
        Ok(())
    }

    fn params(&self, t: DegreeBound, seed: u64) -> PipelineParams {
        PipelineParams {
            family: self.family.clone(),
            t,
            seed,
            degree_policy: self.degree_policy,
            mwu: MwuOptions::default().with_policy(self.candidate_policy),
            max_attempts: self.max_attempts,
            slack: self.slack,
        }
    }
}

/// One pipeline run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub t_requested: DegreeBound,
    pub t_actual: usize,
    pub seed: u64,
    pub max_crossing: usize,
    /// Crossing bound with both constants set to 1, at `t_actual`.
    pub predicted: f64,
    pub discrepancy_det: i64,
    pub discrepancy_rand: i64,
    pub attempts: u32,
    pub threshold: i64,
    pub threshold_met: bool,
    pub wall_time_ms: u64,
}

impl SweepRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.3},{},{},{},{}",
            self.family,
            self.n,
            self.m,
            self.t_requested,
            self.t_actual,
            self.seed,
            self.max_crossing,
            self.predicted,
            self.discrepancy_det,
            self.discrepancy_rand,
            self.attempts,
            self.wall_time_ms
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineParams {
    pub family: String,
    pub t: DegreeBound,
    pub seed: u64,
    pub degree_policy: DegreePolicy,
    pub mwu: MwuOptions,
    pub max_attempts: u32,
    pub slack: f64,
}

impl PipelineParams {
    pub fn new(family: impl Into<String>, t: DegreeBound, seed: u64) -> Self {
        PipelineParams {
            family: family.into(),
            t,
            seed,
            degree_policy: DegreePolicy::RandomKeep,
            mwu: MwuOptions::default(),
            max_attempts: default_max_attempts(),
            slack: 1.5,
        }
    }
}

/// Everything a pipeline run produces.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub record: SweepRecord,
    pub system: SetSystem,
    pub matching: Matching,
    pub crossing: CrossingReport,
    pub deterministic: Coloring,
    pub random: RandomColoring,
}

impl PipelineRun {
    /// Writes `system.json`, `matching.json`, `coloring_det.json` and
    /// `coloring_rand.json` under `dir`.
    pub fn persist(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        save_system(&self.system, dir.join("system.json"))?;
        save_matching(&self.matching, Some(self.crossing.max_crossing), dir.join("matching.json"))?;
        save_coloring(&self.deterministic, Some(self.record.discrepancy_det), dir.join("coloring_det.json"))?;
        save_coloring(&self.random.coloring, Some(self.random.report.max_abs), dir.join("coloring_rand.json"))?;
        Ok(())
    }
}

/// Generates the family's ranges over `points`, then runs the rest of the
/// pipeline.
pub fn run_pipeline(points: &PointSet, params: &PipelineParams) -> Result<PipelineRun> {
    let full = generate_system(&params.family, points)?;
    run_on_system(&full, params, false)
}

/// Pipeline from an already generated range space.
pub fn run_on_system(full: &SetSystem, params: &PipelineParams, timing: bool) -> Result<PipelineRun> {
    let start = Instant::now();
    let fam = family_params(full.family().unwrap_or(&params.family))?;
    let system = match params.t.finite() {
        Some(t) => enforce_degree(full, t, params.degree_policy, params.seed)?,
        None => full.clone(),
    };
    let t_actual = system.degree_profile().max_degree;
    let (matching, _, crossing) = build_matching_mwu(&system, params.mwu)?;
    let deterministic = color_deterministic(&matching);
    let det_report = discrepancy(&system, &deterministic)?;
    let random = color_random(&system, &matching, params.seed, params.max_attempts, params.slack)?;
    let n = system.n();
    let record = SweepRecord {
        family: params.family.clone(),
        n,
        m: system.m(),
        t_requested: params.t,
        t_actual,
        seed: params.seed,
        max_crossing: crossing.max_crossing,
        predicted: predicted_crossing_bound(n, t_actual, &fam, (1.0, 1.0)),
        discrepancy_det: det_report.max_abs,
        discrepancy_rand: random.report.max_abs,
        attempts: random.attempts,
        threshold: random.threshold,
        threshold_met: random.threshold_met,
        wall_time_ms: if timing { start.elapsed().as_millis() as u64 } else { 0 },
    };
    Ok(PipelineRun {
        record,
        system,
        matching,
        crossing,
        deterministic,
        random,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CellId {
    pub n: usize,
    pub t: DegreeBound,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellFailure {
    pub cell: CellId,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopePoint {
    pub t: usize,
    pub mean_crossing: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BeckFialaSummary {
    /// Cells with `t_actual >= (log2 n)^2`.
    pub cells: usize,
    /// Those with `disc_rand <= sqrt(t_actual)`.
    pub satisfied: usize,
    pub misses: Vec<CellId>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub family: String,
    pub largest_n: usize,
    /// Mean crossing number per finite requested `t`, at the largest `n`.
    pub slope_points: Vec<SlopePoint>,
    /// Least-squares slope of `ln mean N` against `ln t` over all finite `t`.
    pub slope: Option<f64>,
    /// The same slope restricted to `t >= (log2 n)^2`.
    pub slope_large_t: Option<f64>,
    /// Largest `N / (log2 n + t^(c/(1+c)) g)` over all cells.
    pub max_ratio: f64,
    pub crossing_ceiling: f64,
    pub ceiling_violations: Vec<CellId>,
    pub beck_fiala: BeckFialaSummary,
    /// Cells whose deterministic discrepancy exceeds their crossing number.
    pub det_bound_violations: Vec<CellId>,
    pub failures: Vec<CellFailure>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub summary: SweepSummary,
}

impl SweepOutput {
    pub fn csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        text.push('\n');
        text
    }
}

/// Path of the summary written next to the CSV report.
pub fn summary_path(output_path: &Path) -> PathBuf {
    let mut name = output_path.file_stem().unwrap_or_default().to_os_string();
    name.push(".summary.json");
    output_path.with_file_name(name)
}

/// Full factorial sweep. Cells run in parallel; one point set and range
/// space is generated per `(n, seed)` and shared by every `t`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let dim = family_dimension(&cfg.family)?;
    let groups: Vec<(usize, u64)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| cfg.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let results: Vec<(CellId, Result<SweepRecord>)> = groups
        .par_iter()
        .flat_map_iter(|&(n, seed)| {
            let full = generate_points(n, dim, cfg.dist, seed).and_then(|pts| generate_system(&cfg.family, &pts));
            cfg.t_values
                .iter()
                .map(|&t| {
                    let cell = CellId { n, t, seed };
                    let rec = match &full {
                        Ok(full) => run_on_system(full, &cfg.params(t, seed), cfg.timing).and_then(|run| {
                            if let Some(dir) = &cfg.artifacts_dir {
                                run.persist(&dir.join(format!("{}_n{n}_t{t}_s{seed}", cfg.family)))?;
                            }
                            Ok(run.record)
                        }),
                        Err(e) => Err(Error::InvalidInput(format!("generation failed: {e}"))),
                    };
                    (cell, rec)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (cell, r) in results {
        match r {
            Ok(rec) => records.push((cell, rec)),
            Err(e) => failures.push(CellFailure {
                cell,
                error: e.to_string(),
            }),
        }
    }
    records.sort_by(|a, b| a.0.cmp(&b.0));
    failures.sort_by(|a, b| a.cell.cmp(&b.cell));
    let records: Vec<SweepRecord> = records.into_iter().map(|(_, r)| r).collect();
    let summary = summarize(cfg, &records, failures);
    Ok(SweepOutput { records, summary })
}

/// Runs the sweep and writes the CSV report and its summary.
pub fn run_sweep_to_files(cfg: &SweepConfig) -> Result<SweepOutput> {
    let out = run_sweep(cfg)?;
    if let Some(dir) = cfg.output_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(&cfg.output_path, out.csv()).map_err(|e| Error::io(&cfg.output_path, e))?;
    let sp = summary_path(&cfg.output_path);
    fs::write(&sp, out.summary_json()).map_err(|e| Error::io(&sp, e))?;
    Ok(out)
}

/// Least-squares slope of `y` on `x`; `None` with fewer than two distinct `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if points.len() < 2 || sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn summarize(cfg: &SweepConfig, records: &[SweepRecord], failures: Vec<CellFailure>) -> SweepSummary {
    let largest_n = records.iter().map(|r| r.n).max().unwrap_or(0);
    let log_sq = (largest_n.max(1) as f64).log2().powi(2);
    let mut by_t: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.n == largest_n) {
        if let Some(t) = r.t_requested.finite() {
            by_t.entry(t).or_default().push(r.max_crossing);
        }
    }
    let slope_points: Vec<SlopePoint> = by_t
        .iter()
        .map(|(&t, ns)| SlopePoint {
            t,
            mean_crossing: ns.iter().sum::<usize>() as f64 / ns.len() as f64,
        })
        .collect();
    let fit = |pred: &dyn Fn(usize) -> bool| {
        let pts: Vec<(f64, f64)> = slope_points
            .iter()
            .filter(|p| pred(p.t) && p.mean_crossing > 0.0)
            .map(|p| ((p.t as f64).ln(), p.mean_crossing.ln()))
            .collect();
        least_squares_slope(&pts)
    };
    let slope = fit(&|_| true);
    let slope_large_t = fit(&|t| t as f64 >= log_sq);

    let cell = |r: &SweepRecord| CellId {
        n: r.n,
        t: r.t_requested,
        seed: r.seed,
    };
    let mut max_ratio: f64 = 0.0;
    let mut ceiling_violations = Vec::new();
    let mut bf = BeckFialaSummary {
        cells: 0,
        satisfied: 0,
        misses: Vec::new(),
    };
    let mut det_bound_violations = Vec::new();
    for r in records {
        let ratio = r.max_crossing as f64 / r.predicted;
        max_ratio = max_ratio.max(ratio);
        if ratio > cfg.crossing_ceiling {
            ceiling_violations.push(cell(r));
        }
        if r.t_actual as f64 >= (r.n as f64).log2().powi(2) {
            bf.cells += 1;
            if (r.discrepancy_rand as f64) <= (r.t_actual as f64).sqrt() {
                bf.satisfied += 1;
            } else {
                bf.misses.push(cell(r));
            }
        }
        if r.discrepancy_det as usize > r.max_crossing {
            det_bound_violations.push(cell(r));
        }
    }
    SweepSummary {
        family: cfg.family.clone(),
        largest_n,
        slope_points,
        slope,
        slope_large_t,
        max_ratio,
        crossing_ceiling: cfg.crossing_ceiling,
        ceiling_violations,
        beck_fiala: bf,
        det_bound_violations,
        failures,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(VerifyCheck {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &VerifyCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        out
    }
}

/// Rechecks stored artifacts against their system: matching validity, the
/// stored crossing number, the stored discrepancy, pair antisymmetry and the
/// deterministic bound.
pub fn verify_artifacts(sys_path: &Path, matching_path: Option<&Path>, coloring_path: Option<&Path>) -> Result<VerifyReport> {
    let sys = load_system(sys_path)?;
    let mut report = VerifyReport::default();
    report.push("system", true, format!("n = {}, m = {}", sys.n(), sys.m()));

    let mut matching = None;
    if let Some(path) = matching_path {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let (m, stored) = Matching::from_json_unchecked(&text, path)?;
        let valid = if m.n() != sys.n() {
            Err(Error::SizeMismatch {
                expected: sys.n(),
                actual: m.n(),
            })
        } else {
            m.validate()
        };
        match valid {
            Ok(()) => {
                report.push("matching-valid", true, format!("{} pairs", m.pairs().len()));
                let cross = crossing_report(&sys, &m)?;
                match stored {
                    Some(s) if s != cross.max_crossing => report.push(
                        "crossing-number",
                        false,
                        format!("stored {s}, recomputed {} (range {:?})", cross.max_crossing, cross.argmax_range),
                    ),
                    _ => report.push("crossing-number", true, format!("N = {}", cross.max_crossing)),
                }
                matching = Some((m, cross));
            }
            Err(e) => report.push("matching-valid", false, e.to_string()),
        }
    }

    if let Some(path) = coloring_path {
        let (c, stored) = crate::coloring::load_coloring(path)?;
        if c.n() != sys.n() {
            report.push("coloring-length", false, format!("{} signs for {} points", c.n(), sys.n()));
            return Ok(report);
        }
        let rep = discrepancy(&sys, &c)?;
        match stored {
            Some(s) if s != rep.max_abs => report.push(
                "discrepancy",
                false,
                format!("stored {s}, recomputed {} (range {:?})", rep.max_abs, rep.argmax_range),
            ),
            _ => report.push("discrepancy", true, format!("disc = {}", rep.max_abs)),
        }
        if let Some((m, cross)) = &matching {
            let bad: Vec<(usize, usize)> = m
                .pairs()
                .iter()
                .copied()
                .filter(|&(x, y)| c.signs()[x] != -c.signs()[y])
                .collect();
            if bad.is_empty() {
                report.push("pair-antisymmetry", true, "every pair has opposite signs");
                let bound = cross.max_crossing as i64 + m.leftover().is_some() as i64;
                report.push(
                    "coloring-bound",
                    rep.max_abs <= bound,
                    format!("disc {} against crossing bound {bound}", rep.max_abs),
                );
            } else {
                report.push("pair-antisymmetry", false, format!("equal signs on pairs {bad:?}"));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::brute_force_min_crossing_matching;

    fn cfg(family: &str, n: Vec<usize>, t: Vec<DegreeBound>, seeds: Vec<u64>) -> SweepConfig {
        SweepConfig {
            family: family.into(),
            n_values: n,
            t_values: t,
            seeds,
            candidate_policy: CandidatePolicy::AllPairs,
            slack: 1.5,
            output_path: PathBuf::from("unused.csv"),
            max_attempts: 100,
            dist: PointDistribution::UniformSquare,
            degree_policy: DegreePolicy::RandomKeep,
            crossing_ceiling: 10.0,
            timing: false,
            artifacts_dir: None,
        }
    }

    #[test]
    fn intervals_unbounded() {
        for seed in 0..10 {
            let pts = generate_points(8, 1, PointDistribution::UniformSquare, seed).unwrap();
            let run = run_pipeline(&pts, &PipelineParams::new("intervals", DegreeBound::Unbounded, seed)).unwrap();
            assert_eq!(run.record.m, 36);
            assert!(run.record.max_crossing <= 3);
            assert!(run.record.discrepancy_det as usize <= run.record.max_crossing);
            let (_, best) = brute_force_min_crossing_matching(&run.system).unwrap();
            assert!(best.max_crossing <= run.record.max_crossing);
        }
    }

    #[test]
    fn halfplanes_degree_four() {
        let pts = generate_points(16, 2, PointDistribution::UniformSquare, 3).unwrap();
        let run = run_pipeline(&pts, &PipelineParams::new("halfplanes", DegreeBound::Finite(4), 3)).unwrap();
        assert!(run.record.t_actual <= 4);
        assert!(run.record.discrepancy_det as usize <= run.record.max_crossing);
    }

    #[test]
    fn single_cell_sweep_equals_pipeline() {
        let c = cfg("disks", vec![20], vec![DegreeBound::Finite(6)], vec![9]);
        let out = run_sweep(&c).unwrap();
        let pts = generate_points(20, 2, PointDistribution::UniformSquare, 9).unwrap();
        let run = run_pipeline(&pts, &c.params(DegreeBound::Finite(6), 9)).unwrap();
        assert_eq!(out.records, vec![run.record]);
    }

    #[test]
    fn sweep_is_sorted_and_reproducible() {
        let c = cfg(
            "orthants2",
            vec![24, 16],
            vec![DegreeBound::Finite(8), DegreeBound::Finite(2)],
            vec![2, 1],
        );
        let a = run_sweep(&c).unwrap();
        let b = run_sweep(&c).unwrap();
        assert_eq!(a.csv(), b.csv());
        assert_eq!(a.summary_json(), b.summary_json());
        let keys: Vec<_> = a.records.iter().map(|r| (r.n, r.t_requested, r.seed)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(a.csv().starts_with(CSV_HEADER));
        assert_eq!(a.summary.slope_points.len(), 2);
        assert!(a.summary.slope.is_some());
    }

    #[test]
    fn degree_bound_parsing() {
        let c: SweepConfig = serde_json::from_str(
            r#"{"family":"halfplanes","n_values":[8],"t_values":[4,"inf"],"seeds":[0],"slack":1.5,"output_path":"o.csv"}"#,
        )
        .unwrap();
        assert_eq!(c.t_values, vec![DegreeBound::Finite(4), DegreeBound::Unbounded]);
        assert_eq!(c.candidate_policy, CandidatePolicy::AllPairs);
        let bad = r#"{"family":"halfplanes","n_values":[2],"t_values":[4],"seeds":[0],"slack":1.5,"output_path":"o.csv"}"#;
        assert!(SweepConfig::from_json(bad, Path::new("c.json")).is_err());
        let bad = r#"{"family":"pseudodisks","n_values":[8],"t_values":[4],"seeds":[0],"slack":1.5,"output_path":"o.csv"}"#;
        assert!(SweepConfig::from_json(bad, Path::new("c.json")).is_err());
        let sampled = r#"{"family":"disks","n_values":[8],"t_values":["inf"],"seeds":[0],"slack":1.5,"output_path":"o.csv","candidate_policy":{"sampled":{"seed":3,"size":10}}}"#;
        let c = SweepConfig::from_json(sampled, Path::new("c.json")).unwrap();
        assert_eq!(c.candidate_policy, CandidatePolicy::Sampled { seed: 3, size: 10 });
    }

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = (1..5).map(|i| (i as f64, 0.5 * i as f64 + 2.0)).collect();
        assert!((least_squares_slope(&pts).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(least_squares_slope(&pts[..1]), None);
    }

    #[test]
    fn summary_path_sits_next_to_csv() {
        assert_eq!(summary_path(Path::new("out/run.csv")), PathBuf::from("out/run.summary.json"));
    }
}
