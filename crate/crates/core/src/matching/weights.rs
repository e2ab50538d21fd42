use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Arithmetic used for range weights.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// Weights `2^c` as arbitrary-precision integers. Exact; meant for small
    /// instances and identity checks.
    Exact,
    /// Weights `2^(c - E)` as `f64`, with a shared integer offset `E`.
    #[default]
    Scaled,
}

/// Per-range crossing counters `c_S` and the weights `2^c_S` derived from
/// them. The counters are the ground truth; weights are always recomputed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightState {
    cross_count: Vec<u32>,
    exp_offset: u32,
    max_count: u32,
    mode: WeightMode,
}

impl WeightState {
    pub fn new(m: usize, mode: WeightMode) -> Self {
        WeightState {
            cross_count: vec![0; m],
            exp_offset: 0,
            max_count: 0,
            mode,
        }
    }

    pub fn cross_count(&self) -> &[u32] {
        &self.cross_count
    }

    /// Shared offset `E`; the effective weight of range `S` is `2^(c_S - E)`.
    /// Always 0 in exact mode.
    pub fn exp_offset(&self) -> u32 {
        self.exp_offset
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn max_count(&self) -> u32 {
        self.max_count
    }

    /// Weight of range `s`, in this state's arithmetic.
    pub fn weight(&self, s: usize) -> Score {
        match self.mode {
            WeightMode::Exact => Score::Exact(BigUint::from(1u32) << self.cross_count[s]),
            WeightMode::Scaled => Score::Scaled {
                value: pow2(self.cross_count[s] as i64 - self.exp_offset as i64),
                exp_offset: self.exp_offset,
            },
        }
    }

    /// Total weight, summed in ascending range order.
    pub fn total_weight(&self) -> Score {
        match self.mode {
            WeightMode::Exact => Score::Exact(self.total_weight_exact()),
            WeightMode::Scaled => Score::Scaled {
                value: self
                    .cross_count
                    .iter()
                    .map(|&c| pow2(c as i64 - self.exp_offset as i64))
                    .sum(),
                exp_offset: self.exp_offset,
            },
        }
    }

    /// `sum_S 2^c_S` as an exact integer, in either mode.
    pub fn total_weight_exact(&self) -> BigUint {
        let mut total = BigUint::zero();
        for &c in &self.cross_count {
            total += BigUint::from(1u32) << c;
        }
        total
    }

    /// Increments the counter of every listed range. In scaled mode the
    /// offset is raised so that `max c_S - E <= headroom`.
    pub(crate) fn record_crossing(&mut self, ranges: &[u32], headroom: u32) -> bool {
        for &s in ranges {
            let c = &mut self.cross_count[s as usize];
            *c += 1;
            self.max_count = self.max_count.max(*c);
        }
        if self.mode == WeightMode::Scaled && self.max_count > self.exp_offset + headroom {
            self.exp_offset = self.max_count - headroom;
            return true;
        }
        false
    }
}

/// `2^k` as an `f64`, exact over the normal range.
#[inline]
pub(crate) fn pow2(k: i64) -> f64 {
    if (-1022..=1023).contains(&k) {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        2f64.powi(k.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }
}

/// A weight or a sum of weights.
#[derive(Clone, Debug, PartialEq)]
pub enum Score {
    Exact(BigUint),
    /// Represents `value * 2^exp_offset`.
    Scaled { value: f64, exp_offset: u32 },
}

impl Score {
    pub fn is_zero(&self) -> bool {
        match self {
            Score::Exact(v) => v.is_zero(),
            Score::Scaled { value, .. } => *value == 0.0,
        }
    }

    /// Base-2 logarithm of the represented value; `None` for zero.
    pub fn log2(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Score::Exact(v) => {
                let bits = v.bits();
                if bits <= 1000 {
                    v.to_f64().expect("fits in f64").log2()
                } else {
                    let shift = bits - 64;
                    (v >> shift).to_f64().expect("fits in f64").log2() + shift as f64
                }
            }
            Score::Scaled { value, exp_offset } => value.log2() + *exp_offset as f64,
        })
    }

    /// Exact integer value, when the score is exact.
    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            Score::Exact(v) => Some(v),
            Score::Scaled { .. } => None,
        }
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Score::Exact(a), Score::Exact(b)) => Some(a.cmp(b)),
            (
                Score::Scaled { value: a, exp_offset: ea },
                Score::Scaled { value: b, exp_offset: eb },
            ) => {
                if ea == eb {
                    a.partial_cmp(b)
                } else {
                    let shift = *ea as i64 - *eb as i64;
                    (a * pow2(shift)).partial_cmp(b)
                }
            }
            _ => None,
        }
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Score::Exact(v) => write!(f, "{v}"),
            Score::Scaled { value, exp_offset: 0 } => write!(f, "{value}"),
            Score::Scaled { value, exp_offset } => write!(f, "{value}*2^{exp_offset}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_is_exact() {
        for k in -1022..=1023i64 {
            assert_eq!(pow2(k), 2f64.powi(k as i32));
        }
        assert_eq!(pow2(-1100), 0.0);
    }

    #[test]
    fn offset_respects_headroom() {
        let mut ws = WeightState::new(3, WeightMode::Scaled);
        for _ in 0..10 {
            ws.record_crossing(&[0], 4);
            assert!(ws.max_count() - ws.exp_offset() <= 4);
        }
        assert_eq!(ws.exp_offset(), 6);
        assert_eq!(ws.total_weight_exact(), BigUint::from(1026u32));
        let total = ws.total_weight();
        assert!((total.log2().unwrap() - 1026f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn exact_mode_never_offsets() {
        let mut ws = WeightState::new(2, WeightMode::Exact);
        for _ in 0..100 {
            ws.record_crossing(&[1], 0);
        }
        assert_eq!(ws.exp_offset(), 0);
        assert_eq!(ws.weight(1), Score::Exact(BigUint::from(1u32) << 100u32));
        assert!((ws.total_weight().log2().unwrap() - 100.0).abs() < 1e-12);
    }
}
