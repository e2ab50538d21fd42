use super::{crossing_report, for_each_crossed, CrossingReport, Matching};
use crate::error::{Error, Result};
use crate::setsystem::SetSystem;

const MAX_N: usize = 12;

/// Minimum-crossing perfect matching by exhaustive search, for even
/// `n <= 12`. Among optimal matchings the first one found is returned, where
/// the smallest unmatched point is always paired first and partners are
/// tried in ascending order.
pub fn brute_force_min_crossing_matching(sys: &SetSystem) -> Result<(Matching, CrossingReport)> {
    let n = sys.n();
    if !n.is_multiple_of(2) || n > MAX_N {
        return Err(Error::InvalidInput(format!(
            "exhaustive matching needs an even n <= {MAX_N}, got {n}"
        )));
    }
    let mut search = Search {
        inc: sys.incidence(),
        counts: vec![0; sys.m()],
        matched: vec![false; n],
        current: Vec::with_capacity(n / 2),
        best: usize::MAX,
        best_pairs: Vec::new(),
    };
    search.dfs(0);
    let matching = Matching::new(n, search.best_pairs, None)?;
    let report = crossing_report(sys, &matching)?;
    Ok((matching, report))
}

struct Search {
    inc: Vec<Vec<u32>>,
    counts: Vec<u32>,
    matched: Vec<bool>,
    current: Vec<(usize, usize)>,
    best: usize,
    best_pairs: Vec<(usize, usize)>,
}

impl Search {
    fn dfs(&mut self, current_max: usize) {
        let Some(x) = self.matched.iter().position(|m| !m) else {
            if current_max < self.best {
                self.best = current_max;
                self.best_pairs = self.current.clone();
            }
            return;
        };
        self.matched[x] = true;
        for y in x + 1..self.matched.len() {
            if self.matched[y] {
                continue;
            }
            let mut new_max = current_max;
            let (ix, iy) = (std::mem::take(&mut self.inc[x]), std::mem::take(&mut self.inc[y]));
            for_each_crossed(&ix, &iy, |s| {
                let c = &mut self.counts[s as usize];
                *c += 1;
                new_max = new_max.max(*c as usize);
            });
            if new_max < self.best {
                self.matched[y] = true;
                self.current.push((x, y));
                self.dfs(new_max);
                self.current.pop();
                self.matched[y] = false;
            }
            for_each_crossed(&ix, &iy, |s| self.counts[s as usize] -= 1);
            self.inc[x] = ix;
            self.inc[y] = iy;
        }
        self.matched[x] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{build_matching_mwu, MwuOptions};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_matchings(points: &[usize], out: &mut Vec<Vec<(usize, usize)>>, cur: &mut Vec<(usize, usize)>) {
        if points.is_empty() {
            out.push(cur.clone());
            return;
        }
        let x = points[0];
        for k in 1..points.len() {
            let y = points[k];
            let rest: Vec<usize> = points[1..].iter().copied().filter(|&p| p != y).collect();
            cur.push((x, y));
            all_matchings(&rest, out, cur);
            cur.pop();
        }
    }

    #[test]
    fn agrees_with_full_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n = 2 * rng.random_range(1..=4);
            let m = rng.random_range(1..15);
            let raw: Vec<Vec<usize>> = (0..m).map(|_| (0..n).filter(|_| rng.random_bool(0.5)).collect()).collect();
            let Ok(sys) = SetSystem::build(n, &raw) else { continue };
            let mut all = Vec::new();
            all_matchings(&(0..n).collect::<Vec<_>>(), &mut all, &mut Vec::new());
            assert_eq!(all.len(), (1..n).step_by(2).product::<usize>());
            let opt = all
                .iter()
                .map(|p| crossing_report(&sys, &Matching::new(n, p.clone(), None).unwrap()).unwrap().max_crossing)
                .min()
                .unwrap();
            let (bm, rep) = brute_force_min_crossing_matching(&sys).unwrap();
            assert_eq!(rep.max_crossing, opt);
            bm.validate().unwrap();
            let (_, _, greedy) = build_matching_mwu(&sys, MwuOptions::exact()).unwrap();
            assert!(greedy.max_crossing >= opt);
        }
    }

    #[test]
    fn zero_when_ranges_are_pairs() {
        let sys = SetSystem::build(4, &[vec![0, 3], vec![1, 2]]).unwrap();
        let (m, rep) = brute_force_min_crossing_matching(&sys).unwrap();
        assert_eq!(rep.max_crossing, 0);
        assert_eq!(m.pairs(), &[(0, 3), (1, 2)]);
    }

    #[test]
    fn rejects_odd_or_large() {
        assert!(brute_force_min_crossing_matching(&SetSystem::build(3, &[vec![0]]).unwrap()).is_err());
        assert!(brute_force_min_crossing_matching(&SetSystem::build(14, &[vec![0]]).unwrap()).is_err());
    }
}
