//! Fixtures shared by the benchmarks.

use besat::formula::{parse, Formula};
use besat::gen::{gen_formula, GenConfig};

/// Hand-picked inputs: a shallow one, the four-point example, and two that
/// need a rewrite step each way.
pub const NAMED: [&str; 4] = [
    "<B>(pi & p) & <E>(pi & q)",
    "<B><B><E>(pi & p)",
    "<E><E><B>(pi & p)",
    "<B>(<E><B>(pi & p) & ~<E>(pi & q))",
];

pub fn named() -> Vec<(&'static str, Formula)> {
    NAMED
        .iter()
        .map(|&s| (s, parse(s).expect("fixture parses")))
        .collect()
}

/// A seeded batch of random formulas over `{p, q}`.
pub fn corpus(n: u64) -> Vec<Formula> {
    let cfg = GenConfig {
        seed: 7,
        ..Default::default()
    };
    (0..n).map(|i| gen_formula(&cfg, i)).collect()
}
