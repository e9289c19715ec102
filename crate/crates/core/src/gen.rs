//! Seeded generators for formulas and structures. Output depends only on
//! the config and the index.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::formula::{Formula, LetterSet, Signature};
use crate::semantics::IntervalStructure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeWeights {
    pub leaf: u32,
    pub not: u32,
    pub and: u32,
    pub or: u32,
    pub hs_b: u32,
    pub hs_e: u32,
    pub box_b: u32,
    pub box_e: u32,
    pub box_g: u32,
}

impl Default for NodeWeights {
    fn default() -> Self {
        NodeWeights {
            leaf: 2,
            not: 2,
            and: 2,
            or: 2,
            hs_b: 3,
            hs_e: 3,
            box_b: 1,
            box_e: 1,
            box_g: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_formula_size: usize,
    pub max_depth: usize,
    pub signature_size: usize,
    pub max_points: usize,
    pub weights: NodeWeights,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_formula_size: 10,
            max_depth: 4,
            signature_size: 2,
            max_points: 5,
            weights: NodeWeights::default(),
        }
    }
}

const LETTERS: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

impl GenConfig {
    pub fn signature(&self) -> Signature {
        let names = (0..self.signature_size).map(|i| match LETTERS.get(i) {
            Some(n) => n.to_string(),
            None => format!("p{i}"),
        });
        Signature::new(names).expect("generated names are valid")
    }

    fn rng(&self, index: u64, salt: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ salt);
        rng.set_stream(index);
        rng
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Leaves {
    /// `true`, `false`, `pi`, `pi & p`
    Homogeneous,
    /// `true`, `false`, `p`
    Bare,
}

struct Builder<'a> {
    cfg: &'a GenConfig,
    sig: Signature,
    rng: ChaCha8Rng,
    leaves: Leaves,
}

impl Builder<'_> {
    fn leaf(&mut self) -> Formula {
        let n = self.sig.len();
        let (extra, letter): (usize, fn(&str) -> Formula) = match self.leaves {
            Leaves::Homogeneous => (3, Formula::point),
            Leaves::Bare => (2, Formula::atom),
        };
        let pick = self.rng.gen_range(0..n + extra);
        match pick {
            0 => Formula::top(),
            1 => Formula::bot(),
            2 if self.leaves == Leaves::Homogeneous => Formula::pi(),
            _ => letter(self.sig.name((pick - extra) as u32)),
        }
    }

    /// A formula of size exactly `size` (letters taken as single nodes) and
    /// depth at most `depth`.
    fn formula(&mut self, size: usize, depth: usize) -> Formula {
        let w = &self.cfg.weights;
        let modal = depth >= 1;
        let options: [(u32, bool); 9] = [
            (w.leaf, size == 1),
            (w.not, size >= 2),
            (w.and, size >= 3),
            (w.or, size >= 3),
            (w.hs_b, size >= 2 && modal),
            (w.hs_e, size >= 2 && modal),
            (w.box_b, size >= 2 && modal),
            (w.box_e, size >= 2 && modal),
            (w.box_g, size >= 2 && depth >= 2),
        ];
        let total: u32 = options.iter().filter(|(_, ok)| *ok).map(|(w, _)| w).sum();
        if total == 0 {
            return if size >= 2 {
                Formula::not(self.formula(size - 1, depth))
            } else {
                self.leaf()
            };
        }
        let mut x = self.rng.gen_range(0..total);
        let mut kind = 0;
        for (i, (w, ok)) in options.iter().enumerate() {
            if !ok {
                continue;
            }
            if x < *w {
                kind = i;
                break;
            }
            x -= w;
        }
        match kind {
            0 => self.leaf(),
            1 => Formula::not(self.formula(size - 1, depth)),
            2 | 3 => {
                let left = self.rng.gen_range(1..size - 1);
                let a = self.formula(left, depth);
                let b = self.formula(size - 1 - left, depth);
                if kind == 2 {
                    Formula::and(a, b)
                } else {
                    Formula::or(a, b)
                }
            }
            4 => Formula::hs_b(self.formula(size - 1, depth - 1)),
            5 => Formula::hs_e(self.formula(size - 1, depth - 1)),
            6 => Formula::box_b(self.formula(size - 1, depth - 1)),
            7 => Formula::box_e(self.formula(size - 1, depth - 1)),
            _ => Formula::box_g(self.formula(size - 1, depth - 2)),
        }
    }
}

fn build(cfg: &GenConfig, index: u64, leaves: Leaves) -> Formula {
    let mut b = Builder {
        cfg,
        sig: cfg.signature(),
        rng: cfg.rng(index, 0),
        leaves,
    };
    let size = b.rng.gen_range(1..=cfg.max_formula_size.max(1));
    b.formula(size, cfg.max_depth)
}

/// A formula in homogeneous normal form: letters only occur as `pi & p`.
pub fn gen_formula(cfg: &GenConfig, index: u64) -> Formula {
    build(cfg, index, Leaves::Homogeneous)
}

/// A formula of plain BE: bare letters, no `pi`.
pub fn gen_be_formula(cfg: &GenConfig, index: u64) -> Formula {
    build(cfg, index, Leaves::Bare)
}

/// A structure with `1..=max_points` points over [`GenConfig::signature`].
pub fn gen_structure(cfg: &GenConfig, index: u64) -> IntervalStructure {
    let mut rng = cfg.rng(index, 0x5bd1_e995);
    let sig = Arc::new(cfg.signature());
    let n = rng.gen_range(1..=cfg.max_points.max(1));
    let points = (0..n)
        .map(|_| {
            (0..sig.len() as u32)
                .filter(|_| rng.gen_bool(0.5))
                .collect()
        })
        .collect();
    IntervalStructure::new(sig, points).expect("non-empty")
}

/// Every labelling of `n` points over `sig`, in lexicographic order of
/// label masks.
pub fn all_structures(sig: Arc<Signature>, n: usize) -> impl Iterator<Item = IntervalStructure> {
    let labels: Vec<LetterSet> = sig.full().subsets();
    let k = labels.len();
    let total = k.checked_pow(n as u32).expect("too many structures");
    (0..total).map(move |mut code| {
        let mut points = vec![LetterSet::new(); n];
        for p in points.iter_mut().rev() {
            *p = labels[code % k].clone();
            code /= k;
        }
        IntervalStructure::new(sig.clone(), points).expect("non-empty")
    })
}

/// All structures with `1..=max_points` points.
pub fn all_structures_up_to(
    sig: Arc<Signature>,
    max_points: usize,
) -> impl Iterator<Item = IntervalStructure> {
    (1..=max_points).flat_map(move |n| all_structures(sig.clone(), n))
}
