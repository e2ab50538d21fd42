//! Generators for primal range spaces of points.
//!
//! Every range is closed. Boundary points are resolved by infinitesimal
//! perturbation of the bounding object: for an object defined by boundary
//! points `B`, each subset of `B` can be added to the strict interior, and
//! all of those subsets are emitted as candidates.

use rayon::prelude::*;

use super::points::PointSet;
use super::predicates::{collinear3, incircle, orient2d, orient3d};
use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::setsystem::SetSystem;

fn require_dim(pts: &PointSet, dims: &[usize], what: &str) -> Result<()> {
    if dims.contains(&pts.dim()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{what} need points of dimension {dims:?}, got {}",
            pts.dim()
        )))
    }
}

fn full_set(n: usize) -> Bitset {
    Bitset::from_indices(n, 0..n)
}

/// All subsets cut out by closed halfplanes.
///
/// For the directed line through `i -> j` with `L` the points strictly to
/// its left, the set `L + {i}` is realized by rotating the line slightly
/// around `i`. Every nonempty proper halfplane subset of points in general
/// position arises this way from exactly one ordered pair, so together with
/// the full set this yields `n(n-1) + 1` ranges.
pub fn halfplane_system(pts: &PointSet) -> Result<SetSystem> {
    require_dim(pts, &[2], "halfplanes")?;
    let n = pts.len();
    let per_point: Vec<Result<Vec<Bitset>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::with_capacity(2 * (n - i));
            let a = pts.grid(i);
            for j in i + 1..n {
                let b = pts.grid(j);
                let mut left = Bitset::new(n);
                let mut right = Bitset::new(n);
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let o = orient2d(a, b, pts.grid(k));
                    if o > 0 {
                        left.insert(k);
                    } else if o < 0 {
                        right.insert(k);
                    } else {
                        return Err(Error::Degenerate {
                            what: "collinear triple",
                            ids: vec![i, j, k],
                        });
                    }
                }
                left.insert(i);
                right.insert(j);
                out.push(left);
                out.push(right);
            }
            Ok(out)
        })
        .collect();
    let mut sets = Vec::with_capacity(n * n);
    for chunk in per_point {
        sets.extend(chunk?);
    }
    sets.push(full_set(n));
    Ok(SetSystem::from_bitsets(n, sets, Some("halfplanes".into())))
}

/// All subsets cut out by closed disks.
///
/// Under the lifting `(x, y) -> (x, y, x^2 + y^2)` disks become lower
/// halfspaces; candidates are circles through point triples (with every
/// boundary subset), the halfplane limit of very large disks, singletons and
/// the full set.
pub fn disk_system(pts: &PointSet) -> Result<SetSystem> {
    require_dim(pts, &[2], "disks")?;
    let n = pts.len();
    let mut sets: Vec<Bitset> = halfplane_system(pts)?.ranges().to_vec();
    sets.extend((0..n).map(|i| Bitset::from_indices(n, [i])));
    let per_point: Vec<Result<Vec<Bitset>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, mut b, mut c) = (pts.grid(i), pts.grid(j), pts.grid(k));
                    let o = orient2d(a, b, c);
                    if o == 0 {
                        continue;
                    }
                    if o < 0 {
                        std::mem::swap(&mut b, &mut c);
                    }
                    let mut inside = Bitset::new(n);
                    for l in 0..n {
                        if l == i || l == j || l == k {
                            continue;
                        }
                        let s = incircle(a, b, c, pts.grid(l));
                        if s > 0 {
                            inside.insert(l);
                        } else if s == 0 {
                            return Err(Error::Degenerate {
                                what: "cocircular quadruple",
                                ids: vec![i, j, k, l],
                            });
                        }
                    }
                    out.extend(with_boundary_subsets(&inside, &[i, j, k]));
                }
            }
            Ok(out)
        })
        .collect();
    for chunk in per_point {
        sets.extend(chunk?);
    }
    sets.push(full_set(n));
    Ok(SetSystem::from_bitsets(n, sets, Some("disks".into())))
}

fn with_boundary_subsets(interior: &Bitset, boundary: &[usize]) -> Vec<Bitset> {
    (0..1u32 << boundary.len())
        .map(|mask| {
            let mut s = interior.clone();
            for (b, &p) in boundary.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    s.insert(p);
                }
            }
            s
        })
        .collect()
}

/// All dominance ranges `{p : p <= q coordinatewise}` for apexes `q` on the
/// grid of point coordinates extended by `+inf` on every axis.
pub fn orthant_system(pts: &PointSet) -> Result<SetSystem> {
    require_dim(pts, &[2, 3], "orthants")?;
    let collisions = pts.axis_collisions();
    if !collisions.is_empty() {
        return Err(Error::Degenerate {
            what: "repeated coordinate on an axis",
            ids: collisions,
        });
    }
    let n = pts.len();
    let d = pts.dim();
    // rank[axis][point]
    let rank: Vec<Vec<usize>> = (0..d)
        .map(|axis| {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&i| pts.grid(i)[axis]);
            let mut r = vec![0; n];
            for (pos, &i) in order.iter().enumerate() {
                r[i] = pos;
            }
            r
        })
        .collect();
    let mut by_last: Vec<usize> = (0..n).collect();
    by_last.sort_by_key(|&i| rank[d - 1][i]);

    // Thresholds on all but the last axis range over ranks 0..=n, where n
    // stands for +inf. The last axis is swept in ascending order.
    let outer: Vec<Vec<usize>> = if d == 2 {
        (0..=n).map(|x| vec![x]).collect()
    } else {
        (0..=n).flat_map(|x| (0..=n).map(move |y| vec![x, y])).collect()
    };
    let sets: Vec<Bitset> = outer
        .par_iter()
        .flat_map_iter(|thresholds| {
            let mut cur = Bitset::new(n);
            let mut out = Vec::new();
            for &p in &by_last {
                if (0..d - 1).all(|a| rank[a][p] <= thresholds[a]) {
                    cur.insert(p);
                    out.push(cur.clone());
                }
            }
            out
        })
        .collect();
    let tag = if d == 2 { "orthants2" } else { "orthants3" };
    Ok(SetSystem::from_bitsets(n, sets, Some(tag.into())))
}

/// All subsets cut out by closed halfspaces in R^3, from planes through
/// point triples with every boundary subset on either side.
pub fn halfspace3_system(pts: &PointSet) -> Result<SetSystem> {
    require_dim(pts, &[3], "halfspaces")?;
    let n = pts.len();
    if n < 3 {
        let subsets = (1..1u32 << n)
            .map(|mask| Bitset::from_indices(n, (0..n).filter(|&i| mask >> i & 1 == 1)))
            .collect();
        return Ok(SetSystem::from_bitsets(n, subsets, Some("halfspaces3".into())));
    }
    let per_point: Vec<Result<Vec<Bitset>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, c) = (pts.grid(i), pts.grid(j), pts.grid(k));
                    if collinear3(a, b, c) {
                        return Err(Error::Degenerate {
                            what: "collinear triple",
                            ids: vec![i, j, k],
                        });
                    }
                    let mut above = Bitset::new(n);
                    let mut below = Bitset::new(n);
                    for l in 0..n {
                        if l == i || l == j || l == k {
                            continue;
                        }
                        let o = orient3d(a, b, c, pts.grid(l));
                        if o > 0 {
                            above.insert(l);
                        } else if o < 0 {
                            below.insert(l);
                        } else {
                            return Err(Error::Degenerate {
                                what: "coplanar quadruple",
                                ids: vec![i, j, k, l],
                            });
                        }
                    }
                    out.extend(with_boundary_subsets(&above, &[i, j, k]));
                    out.extend(with_boundary_subsets(&below, &[i, j, k]));
                }
            }
            Ok(out)
        })
        .collect();
    let mut sets = vec![full_set(n)];
    for chunk in per_point {
        sets.extend(chunk?);
    }
    Ok(SetSystem::from_bitsets(n, sets, Some("halfspaces3".into())))
}

/// All nonempty runs of consecutive points in sorted order.
pub fn interval_system(pts: &PointSet) -> Result<SetSystem> {
    require_dim(pts, &[1], "intervals")?;
    let collisions = pts.axis_collisions();
    if !collisions.is_empty() {
        return Err(Error::Degenerate {
            what: "repeated coordinate",
            ids: collisions,
        });
    }
    let n = pts.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| pts.grid(i)[0]);
    let mut sets = Vec::with_capacity(n * (n + 1) / 2);
    for start in 0..n {
        let mut cur = Bitset::new(n);
        for &p in &order[start..] {
            cur.insert(p);
            sets.push(cur.clone());
        }
    }
    Ok(SetSystem::from_bitsets(n, sets, Some("intervals".into())))
}
