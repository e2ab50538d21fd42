//! Greedy multiplicative-weights matching.
//!
//! Every range starts with weight 1. Each step picks, among unmatched
//! points, the pair minimizing the total weight of the ranges it crosses,
//! then doubles the weight of each crossed range. Range weights are `2^c_S`
//! where `c_S` counts the chosen pairs crossing `S`.
//!
//! With the all-pairs policy the minimum is found lazily: pair scores only
//! grow, so a heap of possibly stale scores is a valid lower bound, and a
//! popped pair whose recomputed score equals its key is a true minimum. Keys
//! are `(score, x, y)`, which makes ties resolve to the smallest `(x, y)`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::weights::{pow2, Score, WeightMode, WeightState};
use super::{crossing_report, for_each_crossed, CrossingReport, Matching, TraceStep};
use crate::error::{Error, Result};
use crate::setsystem::SetSystem;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Smallest `(x, y)` among equal scores.
    #[default]
    Lexicographic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidatePolicy {
    /// Every unmatched pair is a candidate at every step.
    #[default]
    AllPairs,
    /// `size` random unmatched pairs per step, drawn from a stream seeded
    /// by `seed`.
    Sampled { seed: u64, size: usize },
}

impl fmt::Display for CandidatePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidatePolicy::AllPairs => f.write_str("all-pairs"),
            CandidatePolicy::Sampled { seed, size } => write!(f, "sampled(seed={seed},size={size})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MwuOptions {
    pub tie_break: TieBreak,
    pub candidate_policy: CandidatePolicy,
    pub mode: WeightMode,
    /// Scaled mode keeps `max c_S - E` at most this large.
    pub headroom: u32,
}

impl Default for MwuOptions {
    fn default() -> Self {
        MwuOptions {
            tie_break: TieBreak::Lexicographic,
            candidate_policy: CandidatePolicy::AllPairs,
            mode: WeightMode::Scaled,
            headroom: 64,
        }
    }
}

impl MwuOptions {
    pub fn exact() -> Self {
        MwuOptions {
            mode: WeightMode::Exact,
            ..Self::default()
        }
    }

    pub fn with_policy(mut self, policy: CandidatePolicy) -> Self {
        self.candidate_policy = policy;
        self
    }
}

/// Runs the greedy procedure to completion.
pub fn build_matching_mwu(sys: &SetSystem, opts: MwuOptions) -> Result<(Matching, WeightState, CrossingReport)> {
    let mut matcher = MwuMatcher::new(sys, opts)?;
    while matcher.step().is_some() {}
    matcher.finish()
}

/// Step-by-step access to the greedy procedure.
pub struct MwuMatcher<'a> {
    inner: Inner<'a>,
}

enum Inner<'a> {
    Exact(Engine<'a, ExactArith>),
    Scaled(Engine<'a, ScaledArith>),
}

impl<'a> MwuMatcher<'a> {
    pub fn new(sys: &'a SetSystem, opts: MwuOptions) -> Result<Self> {
        if sys.n() < 2 {
            return Err(Error::InvalidInput(format!("matching needs n >= 2, got {}", sys.n())));
        }
        if let CandidatePolicy::Sampled { size: 0, .. } = opts.candidate_policy {
            return Err(Error::InvalidInput("sampled policy needs a positive sample size".into()));
        }
        let inner = match opts.mode {
            WeightMode::Exact => Inner::Exact(Engine::new(sys, opts)),
            WeightMode::Scaled => Inner::Scaled(Engine::new(sys, opts)),
        };
        Ok(MwuMatcher { inner })
    }

    /// Performs one greedy step; `None` once fewer than two points remain.
    pub fn step(&mut self) -> Option<&TraceStep> {
        match &mut self.inner {
            Inner::Exact(e) => e.step(),
            Inner::Scaled(e) => e.step(),
        }
    }

    pub fn weight_state(&self) -> &WeightState {
        match &self.inner {
            Inner::Exact(e) => &e.state,
            Inner::Scaled(e) => &e.state,
        }
    }

    pub fn trace(&self) -> &[TraceStep] {
        match &self.inner {
            Inner::Exact(e) => &e.trace,
            Inner::Scaled(e) => &e.trace,
        }
    }

    pub fn is_matched(&self, x: usize) -> bool {
        match &self.inner {
            Inner::Exact(e) => e.matched[x],
            Inner::Scaled(e) => e.matched[x],
        }
    }

    /// Completes any remaining steps and returns the matching, the final
    /// weights and the crossing report.
    pub fn finish(mut self) -> Result<(Matching, WeightState, CrossingReport)> {
        while self.step().is_some() {}
        match self.inner {
            Inner::Exact(e) => e.finish(),
            Inner::Scaled(e) => e.finish(),
        }
    }
}

trait Arith {
    type W: Clone + Ord + Send + Sync;
    fn zero() -> Self::W;
    fn add_term(acc: &mut Self::W, term: &Self::W);
    fn term(count: u32, offset: u32) -> Self::W;
    /// Re-expresses a value computed under offset `from` under offset `to`.
    fn rescale(w: &Self::W, from: u32, to: u32) -> Self::W;
    fn to_score(w: Self::W, offset: u32) -> Score;
}

struct ExactArith;

impl Arith for ExactArith {
    type W = BigUint;

    fn zero() -> BigUint {
        BigUint::zero()
    }

    fn add_term(acc: &mut BigUint, term: &BigUint) {
        *acc += term;
    }

    fn term(count: u32, _offset: u32) -> BigUint {
        BigUint::from(1u32) << count
    }

    fn rescale(w: &BigUint, _from: u32, _to: u32) -> BigUint {
        w.clone()
    }

    fn to_score(w: BigUint, _offset: u32) -> Score {
        Score::Exact(w)
    }
}

/// Nonnegative finite `f64` with a total order.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Ordf(f64);

impl Eq for Ordf {}

impl PartialOrd for Ordf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordf {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct ScaledArith;

impl Arith for ScaledArith {
    type W = Ordf;

    fn zero() -> Ordf {
        Ordf(0.0)
    }

    fn add_term(acc: &mut Ordf, term: &Ordf) {
        acc.0 += term.0;
    }

    fn term(count: u32, offset: u32) -> Ordf {
        Ordf(pow2(count as i64 - offset as i64))
    }

    fn rescale(w: &Ordf, from: u32, to: u32) -> Ordf {
        Ordf(w.0 * pow2(from as i64 - to as i64))
    }

    fn to_score(w: Ordf, offset: u32) -> Score {
        Score::Scaled {
            value: w.0,
            exp_offset: offset,
        }
    }
}

struct Engine<'a, A: Arith> {
    sys: &'a SetSystem,
    opts: MwuOptions,
    inc: Vec<Vec<u32>>,
    state: WeightState,
    weights: Vec<A::W>,
    matched: Vec<bool>,
    unmatched: usize,
    heap: BinaryHeap<Reverse<(A::W, u32, u32)>>,
    heap_ready: bool,
    rng: Option<ChaCha8Rng>,
    trace: Vec<TraceStep>,
}

impl<'a, A: Arith> Engine<'a, A> {
    fn new(sys: &'a SetSystem, opts: MwuOptions) -> Self {
        let state = WeightState::new(sys.m(), opts.mode);
        let weights = vec![A::term(0, 0); sys.m()];
        let rng = match opts.candidate_policy {
            CandidatePolicy::Sampled { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed)),
            CandidatePolicy::AllPairs => None,
        };
        Engine {
            sys,
            opts,
            inc: sys.incidence(),
            state,
            weights,
            matched: vec![false; sys.n()],
            unmatched: sys.n(),
            heap: BinaryHeap::new(),
            heap_ready: false,
            rng,
            trace: Vec::new(),
        }
    }

    /// Crossed weight of `{x, y}`, summed in ascending range order.
    fn score(&self, x: usize, y: usize) -> A::W {
        let mut acc = A::zero();
        for_each_crossed(&self.inc[x], &self.inc[y], |s| A::add_term(&mut acc, &self.weights[s as usize]));
        acc
    }

    fn fill_heap(&mut self) {
        let n = self.sys.n();
        let this = &*self;
        let entries: Vec<Reverse<(A::W, u32, u32)>> = (0..n)
            .into_par_iter()
            .filter(|&x| !this.matched[x])
            .flat_map_iter(|x| {
                (x + 1..n)
                    .filter(|&y| !this.matched[y])
                    .map(move |y| Reverse((this.score(x, y), x as u32, y as u32)))
            })
            .collect();
        self.heap = BinaryHeap::from(entries);
        self.heap_ready = true;
    }

    fn select_all_pairs(&mut self) -> (A::W, usize, usize) {
        if !self.heap_ready {
            self.fill_heap();
        }
        loop {
            let Reverse((key, x, y)) = self.heap.pop().expect("an unmatched pair remains");
            let (x, y) = (x as usize, y as usize);
            if self.matched[x] || self.matched[y] {
                continue;
            }
            let fresh = self.score(x, y);
            if fresh == key {
                return (fresh, x, y);
            }
            self.heap.push(Reverse((fresh, x as u32, y as u32)));
        }
    }

    fn select_sampled(&mut self, size: usize) -> (A::W, usize, usize) {
        let free: Vec<usize> = (0..self.sys.n()).filter(|&x| !self.matched[x]).collect();
        let rng = self.rng.as_mut().expect("sampled policy has an rng");
        let draws: Vec<(usize, usize)> = (0..size)
            .map(|_| {
                let a = rng.random_range(0..free.len());
                let mut b = rng.random_range(0..free.len() - 1);
                if b >= a {
                    b += 1;
                }
                (free[a].min(free[b]), free[a].max(free[b]))
            })
            .collect();
        draws
            .into_iter()
            .map(|(x, y)| (self.score(x, y), x, y))
            .min()
            .expect("sample size is positive")
    }

    fn step(&mut self) -> Option<&TraceStep> {
        if self.unmatched < 2 {
            return None;
        }
        let (score, x, y, sampled) = match self.opts.candidate_policy {
            CandidatePolicy::AllPairs => {
                let (s, x, y) = self.select_all_pairs();
                (s, x, y, false)
            }
            CandidatePolicy::Sampled { size, .. } => {
                let (s, x, y) = self.select_sampled(size);
                (s, x, y, true)
            }
        };
        let mut crossed = Vec::new();
        for_each_crossed(&self.inc[x], &self.inc[y], |s| crossed.push(s));

        let old_offset = self.state.exp_offset();
        let offset_moved = self.state.record_crossing(&crossed, self.opts.headroom);
        let offset = self.state.exp_offset();
        if offset_moved {
            for (w, &c) in self.weights.iter_mut().zip(self.state.cross_count()) {
                *w = A::term(c, offset);
            }
            let old = std::mem::take(&mut self.heap);
            self.heap = old
                .into_iter()
                .map(|Reverse((k, a, b))| Reverse((A::rescale(&k, old_offset, offset), a, b)))
                .collect();
        } else {
            for &s in &crossed {
                self.weights[s as usize] = A::term(self.state.cross_count()[s as usize], offset);
            }
        }
        self.matched[x] = true;
        self.matched[y] = true;
        self.unmatched -= 2;
        self.trace.push(TraceStep {
            pair: (x, y),
            score: A::to_score(score, old_offset),
            ranges_crossed: crossed.len(),
            sampled,
        });
        self.trace.last()
    }

    fn finish(self) -> Result<(Matching, WeightState, CrossingReport)> {
        let pairs = self.trace.iter().map(|s| s.pair).collect();
        let leftover = self.matched.iter().position(|m| !m);
        let matching = Matching::new(self.sys.n(), pairs, leftover)?.with_trace(self.trace);
        let report = crossing_report(self.sys, &matching)?;
        Ok((matching, self.state, report))
    }
}
