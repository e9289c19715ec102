#![allow(dead_code)]

use std::sync::Arc;

use besat::formula::{Formula, Signature};
use besat::gen::{gen_be_formula, gen_formula, GenConfig};

pub fn sig_pq() -> Arc<Signature> {
    Arc::new(Signature::new(["p", "q"]).unwrap())
}

/// The 500 formulas of size at most 10 and depth at most 4 over `{p, q}`.
pub fn main_corpus() -> Vec<Formula> {
    let cfg = GenConfig {
        seed: 5,
        ..Default::default()
    };
    (0..500).map(|i| gen_formula(&cfg, i)).collect()
}

/// 50 formulas of depth exactly 2 over `{p, q}`.
pub fn depth2_corpus() -> Vec<Formula> {
    let cfg = GenConfig {
        seed: 2,
        max_depth: 2,
        max_formula_size: 8,
        ..Default::default()
    };
    (0..)
        .map(|i| gen_formula(&cfg, i))
        .filter(|f| f.depth() == 2)
        .take(50)
        .collect()
}

/// Plain BE formulas, bare letters, size at most 8.
pub fn be_corpus(n: u64) -> Vec<Formula> {
    let cfg = GenConfig {
        seed: 1,
        max_formula_size: 8,
        ..Default::default()
    };
    (0..n).map(|i| gen_be_formula(&cfg, i)).collect()
}
