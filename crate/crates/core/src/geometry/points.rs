use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{MAX_COORD, SCALE};
use crate::error::{Error, Result};

/// Points in R^d, `d` in 1..=3, stored on the integer grid `Z^d / SCALE`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointDistribution {
    /// Uniform in `[0, 1]^d`.
    UniformSquare,
    /// Uniform on the sphere of radius 1/2 centred at `(1/2, ..., 1/2)`;
    /// in one dimension, uniform on `[0, 1]`.
    UniformSphere,
    /// Standard normal per coordinate.
    Gaussian,
    /// Unit-spaced lattice filled in row-major order, with a seeded jitter of
    /// at most 0.01 per coordinate.
    Grid,
}

impl FromStr for PointDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-square" => Ok(Self::UniformSquare),
            "uniform-sphere" => Ok(Self::UniformSphere),
            "gaussian" => Ok(Self::Gaussian),
            "grid" => Ok(Self::Grid),
            other => Err(Error::InvalidInput(format!("unknown point distribution `{other}`"))),
        }
    }
}

impl fmt::Display for PointDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::UniformSquare => "uniform-square",
            Self::UniformSphere => "uniform-sphere",
            Self::Gaussian => "gaussian",
            Self::Grid => "grid",
        })
    }
}

impl PointSet {
    /// Builds a point set from grid coordinates, `dim` entries per point.
    pub fn from_grid(dim: usize, coords: Vec<i64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidInput(format!("dimension {dim} not in 1..=3")));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| c.abs() > MAX_COORD) {
            return Err(Error::InvalidInput(format!(
                "grid coordinate {c} exceeds the supported magnitude {MAX_COORD}"
            )));
        }
        Ok(PointSet { dim, coords })
    }

    /// Builds a point set from real coordinates, snapping each to the grid.
    pub fn from_reals(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            for &x in p {
                if !x.is_finite() {
                    return Err(Error::InvalidInput(format!("point {i} has a non-finite coordinate")));
                }
                let g = (x * SCALE as f64).round();
                if g.abs() > MAX_COORD as f64 {
                    return Err(Error::InvalidInput(format!("point {i} coordinate {x} is too large")));
                }
                coords.push(g as i64);
            }
        }
        Self::from_grid(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Grid coordinates of point `i`.
    #[inline]
    pub fn grid(&self, i: usize) -> &[i64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn real(&self, i: usize) -> Vec<f64> {
        self.grid(i).iter().map(|&c| c as f64 / SCALE as f64).collect()
    }

    pub fn to_json(&self) -> String {
        let file = PointsFile {
            dim: self.dim,
            points: (0..self.len()).map(|i| self.real(i)).collect(),
        };
        let mut text = serde_json::to_string(&file).expect("finite floats serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let file: PointsFile = serde_json::from_str(text).map_err(|e| {
            Error::format(origin, format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        Self::from_reals(file.dim, &file.points).map_err(|e| Error::format(origin, e.to_string()))
    }

    /// Ids of points that share a coordinate value on some axis with an
    /// earlier point.
    pub(crate) fn axis_collisions(&self) -> Vec<usize> {
        let mut bad = HashSet::new();
        for axis in 0..self.dim {
            let mut seen = HashSet::new();
            for i in 0..self.len() {
                if !seen.insert(self.grid(i)[axis]) {
                    bad.insert(i);
                }
            }
        }
        let mut bad: Vec<usize> = bad.into_iter().collect();
        bad.sort_unstable();
        bad
    }

    /// One point from each collinear triple (the largest id), for 2-D sets.
    pub(crate) fn collinear_offenders(&self) -> Vec<usize> {
        debug_assert_eq!(self.dim, 2);
        let n = self.len();
        let mut bad = HashSet::new();
        for i in 0..n {
            let mut dirs = std::collections::HashMap::with_capacity(n);
            let p = self.grid(i);
            for j in i + 1..n {
                let q = self.grid(j);
                let (mut dx, mut dy) = (q[0] - p[0], q[1] - p[1]);
                let g = gcd(dx.unsigned_abs(), dy.unsigned_abs()) as i64;
                if g == 0 {
                    bad.insert(j);
                    continue;
                }
                dx /= g;
                dy /= g;
                if dx < 0 || (dx == 0 && dy < 0) {
                    dx = -dx;
                    dy = -dy;
                }
                if let Some(&k) = dirs.get(&(dx, dy)) {
                    bad.insert(j.max(k));
                } else {
                    dirs.insert((dx, dy), j);
                }
            }
        }
        let mut bad: Vec<usize> = bad.into_iter().collect();
        bad.sort_unstable();
        bad
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointsFile {
    dim: usize,
    points: Vec<Vec<f64>>,
}

pub fn save_points(pts: &PointSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, pts.to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_points(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    PointSet::from_json(&text, path)
}

/// Generates `n` points deterministically from `seed`.
///
/// Coordinates are pairwise distinct on every axis, and in two dimensions no
/// three points are collinear. Offending points are resampled from a
/// secondary stream until both properties hold.
pub fn generate_points(n: usize, dim: usize, dist: PointDistribution, seed: u64) -> Result<PointSet> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 points, got {n}")));
    }
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidInput(format!("dimension {dim} not in 1..=3")));
    }
    let mut primary = ChaCha8Rng::seed_from_u64(seed);
    primary.set_stream(dim as u64 * 16 + dist as u64);
    let mut resample = primary.clone();
    resample.set_stream(dim as u64 * 16 + dist as u64 + 1024);

    let side = lattice_side(n, dim);
    let mut coords = Vec::with_capacity(n * dim);
    for i in 0..n {
        coords.extend(sample(dist, dim, i, side, &mut primary));
    }
    let mut pts = PointSet::from_grid(dim, coords)?;
    loop {
        let mut bad = pts.axis_collisions();
        if dim == 2 {
            bad.extend(pts.collinear_offenders());
            bad.sort_unstable();
            bad.dedup();
        }
        if bad.is_empty() {
            return Ok(pts);
        }
        for i in bad {
            let p = sample(dist, dim, i, side, &mut resample);
            pts.coords[i * dim..(i + 1) * dim].copy_from_slice(&p);
        }
    }
}

fn lattice_side(n: usize, dim: usize) -> usize {
    let mut side: usize = 1;
    while side.pow(dim as u32) < n {
        side += 1;
    }
    side
}

fn snap(x: f64) -> i64 {
    (x * SCALE as f64).round() as i64
}

fn sample(dist: PointDistribution, dim: usize, index: usize, side: usize, rng: &mut ChaCha8Rng) -> Vec<i64> {
    match dist {
        PointDistribution::UniformSquare => (0..dim).map(|_| snap(rng.random::<f64>())).collect(),
        PointDistribution::UniformSphere if dim == 1 => vec![snap(rng.random::<f64>())],
        PointDistribution::UniformSphere => loop {
            let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-9 {
                break v.iter().map(|x| snap(0.5 + 0.5 * x / norm)).collect();
            }
        },
        PointDistribution::Gaussian => (0..dim)
            .map(|_| snap(StandardNormal.sample(rng)))
            .collect(),
        PointDistribution::Grid => {
            let mut rest = index;
            (0..dim)
                .map(|_| {
                    let cell = rest % side;
                    rest /= side;
                    let jitter = rng.random_range(-0.01..=0.01);
                    snap(cell as f64 + jitter)
                })
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .collect()
        }
    }
}
