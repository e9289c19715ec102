//! Interval structures and the satisfaction relation.

mod oracle;
mod table;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Dag, Formula, LetterSet, Signature, SignatureError};

pub use oracle::{oracle_sat, oracle_sat_pair};
pub use table::TruthTable;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("interval [{0}, {1}] is outside a structure of {2} points")]
    OutOfRange(usize, usize, usize),
    #[error("a structure needs at least one point")]
    Empty,
    #[error("operation needs a non-singleton interval")]
    Singleton,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: usize) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: usize) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_proper_prefix_of(&self, other: &Interval) -> bool {
        self.lo == other.lo && self.hi < other.hi
    }

    pub fn is_proper_suffix_of(&self, other: &Interval) -> bool {
        self.lo > other.lo && self.hi == other.hi
    }

    pub fn proper_prefixes(&self) -> impl Iterator<Item = Interval> {
        let lo = self.lo;
        (lo..self.hi).map(move |h| Interval::new(lo, h))
    }

    pub fn proper_suffixes(&self) -> impl Iterator<Item = Interval> {
        let hi = self.hi;
        (self.lo + 1..=hi).map(move |l| Interval::new(l, hi))
    }
}

impl From<[usize; 2]> for Interval {
    fn from(v: [usize; 2]) -> Self {
        Interval { lo: v[0], hi: v[1] }
    }
}

impl From<Interval> for [usize; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A finite structure given by its point labels. Interval labels are the
/// intersection of the point labels, so homogeneity holds by construction.
#[derive(Clone, PartialEq, Eq)]
pub struct IntervalStructure {
    signature: Arc<Signature>,
    points: Vec<LetterSet>,
}

#[derive(Serialize, Deserialize)]
struct StructureJson {
    points: Vec<Vec<String>>,
}

impl IntervalStructure {
    pub fn new(signature: Arc<Signature>, points: Vec<LetterSet>) -> Result<Self, SemanticsError> {
        if points.is_empty() {
            return Err(SemanticsError::Empty);
        }
        let n = signature.len() as u32;
        if let Some(bad) = points.iter().flat_map(|p| p.iter()).find(|&i| i >= n) {
            return Err(SignatureError::Unknown(format!("#{bad}")).into());
        }
        Ok(IntervalStructure { signature, points })
    }

    /// Builds a structure from letter names per point.
    pub fn from_names<P, S>(signature: Arc<Signature>, points: P) -> Result<Self, SemanticsError>
    where
        P: IntoIterator,
        P::Item: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let points = points
            .into_iter()
            .map(|p| signature.set(p))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(signature, points)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn points(&self) -> &[LetterSet] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn top(&self) -> Interval {
        Interval::new(0, self.len() - 1)
    }

    pub fn label(&self, i: Interval) -> LetterSet {
        let mut acc = self.points[i.lo].clone();
        for x in i.lo + 1..=i.hi {
            acc = acc.intersection(&self.points[x]);
        }
        acc
    }

    pub fn intervals(&self) -> impl Iterator<Item = Interval> {
        let n = self.len();
        (0..n).flat_map(move |lo| (lo..n).map(move |hi| Interval::new(lo, hi)))
    }

    pub fn check(&self, i: Interval) -> Result<(), SemanticsError> {
        if i.hi >= self.len() {
            return Err(SemanticsError::OutOfRange(i.lo, i.hi, self.len()));
        }
        Ok(())
    }

    /// The substructure on the points of `i`, renumbered from zero.
    pub fn restrict(&self, i: Interval) -> IntervalStructure {
        IntervalStructure {
            signature: self.signature.clone(),
            points: self.points[i.lo..=i.hi].to_vec(),
        }
    }

    /// Forgets every letter outside `sig`.
    pub fn project(&self, sig: Arc<Signature>) -> IntervalStructure {
        let points = self
            .points
            .iter()
            .map(|p| {
                p.iter()
                    .filter_map(|i| sig.get(self.signature.name(i)))
                    .collect()
            })
            .collect();
        IntervalStructure {
            signature: sig,
            points,
        }
    }

    pub fn point_names(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| self.signature.names(p))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(StructureJson {
            points: self.point_names(),
        })
        .expect("structure serializes")
    }

    /// Parses `{"points": [["p"], []]}`. Letters missing from `sig` are added.
    pub fn from_json(text: &str, sig: &Signature) -> Result<Self, StructureParseError> {
        let raw: StructureJson = serde_json::from_str(text)?;
        let mut sig = sig.clone();
        for name in raw.points.iter().flatten() {
            sig.ensure(name)?;
        }
        Ok(Self::from_names(Arc::new(sig), raw.points)?)
    }
}

#[derive(Debug, Error)]
pub enum StructureParseError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

impl fmt::Debug for IntervalStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.point_names()).finish()
    }
}

fn table_for(s: &IntervalStructure, f: &Formula) -> Result<(TruthTable, u32), SemanticsError> {
    let mut dag = Dag::new();
    let root = dag.add(f, s.signature())?;
    Ok((TruthTable::build(Arc::new(dag), s.points()), root))
}

pub fn evaluate(s: &IntervalStructure, i: Interval, f: &Formula) -> Result<bool, SemanticsError> {
    s.check(i)?;
    let (t, root) = table_for(s, f)?;
    Ok(t.value(root, i))
}

pub fn valid_over(s: &IntervalStructure, f: &Formula) -> Result<bool, SemanticsError> {
    let (t, root) = table_for(s, f)?;
    Ok(s.intervals().all(|i| t.value(root, i)))
}

/// Intervals satisfying `f` none of whose proper prefixes does.
pub fn prefix_minimal(
    s: &IntervalStructure,
    f: &Formula,
) -> Result<BTreeSet<Interval>, SemanticsError> {
    let (t, root) = table_for(s, f)?;
    Ok(s.intervals()
        .filter(|i| t.value(root, *i) && !i.proper_prefixes().any(|j| t.value(root, j)))
        .collect())
}

pub fn suffix_minimal(
    s: &IntervalStructure,
    f: &Formula,
) -> Result<BTreeSet<Interval>, SemanticsError> {
    let (t, root) = table_for(s, f)?;
    Ok(s.intervals()
        .filter(|i| t.value(root, *i) && !i.proper_suffixes().any(|j| t.value(root, j)))
        .collect())
}

pub type Profile = (BTreeSet<Formula>, BTreeSet<Formula>);

/// The arguments of outer `<B>`/`<E>` that some proper prefix/suffix satisfies.
pub fn phi_profile(
    s: &IntervalStructure,
    i: Interval,
    f: &Formula,
) -> Result<Profile, SemanticsError> {
    s.check(i)?;
    if i.is_singleton() {
        return Err(SemanticsError::Singleton);
    }
    let mut b = BTreeSet::new();
    for a in f.b_args() {
        let (t, root) = table_for(s, &a)?;
        if i.proper_prefixes().any(|j| t.value(root, j)) {
            b.insert(a);
        }
    }
    let mut e = BTreeSet::new();
    for a in f.e_args() {
        let (t, root) = table_for(s, &a)?;
        if i.proper_suffixes().any(|j| t.value(root, j)) {
            e.insert(a);
        }
    }
    Ok((b, e))
}

/// Checks that for every point, the non-singleton prefix-minimal intervals
/// through it have at most `2^(4|f|)` right endpoints, and likewise for
/// suffix-minimal intervals and left endpoints.
pub fn check_intersecting_bound(
    s: &IntervalStructure,
    f: &Formula,
) -> Result<bool, SemanticsError> {
    let exp = 4 * f.size();
    let bound = if exp >= 63 { u64::MAX } else { 1u64 << exp };
    let pre = prefix_minimal(s, f)?;
    let suf = suffix_minimal(s, f)?;
    for x in 0..s.len() {
        let rights: BTreeSet<usize> = pre
            .iter()
            .filter(|i| !i.is_singleton() && i.contains(x))
            .map(|i| i.hi)
            .collect();
        let lefts: BTreeSet<usize> = suf
            .iter()
            .filter(|i| !i.is_singleton() && i.contains(x))
            .map(|i| i.lo)
            .collect();
        if rights.len() as u64 > bound || lefts.len() as u64 > bound {
            return Ok(false);
        }
    }
    Ok(true)
}
