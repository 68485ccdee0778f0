#![allow(dead_code)]

use fockloss::fock::{random_mixed, random_pure, CMatrix, DensityOperator, PureState};
use proptest::prelude::*;

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn pure_state(max_cutoff: usize) -> impl Strategy<Value = PureState> {
    (any::<u64>(), 1..=max_cutoff).prop_map(|(seed, c)| random_pure(seed, c).unwrap())
}

/// Random state of rank 1..=cutoff (so sometimes pure).
pub fn any_state(max_cutoff: usize) -> impl Strategy<Value = DensityOperator> {
    (any::<u64>(), 1..=max_cutoff, 1..=max_cutoff).prop_map(|(seed, c, r)| random_mixed(seed, c, r.min(c)).unwrap())
}

/// Random state of rank at least 2.
pub fn mixed_state(max_cutoff: usize) -> impl Strategy<Value = DensityOperator> {
    (any::<u64>(), 2..=max_cutoff, 2..=max_cutoff).prop_map(|(seed, c, r)| random_mixed(seed, c, r.min(c)).unwrap())
}

pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
