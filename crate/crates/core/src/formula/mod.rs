//! Formulas of BE logic: syntax tree, measures and rewriting.

mod dag;
mod parser;
mod print;
mod signature;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use dag::{Dag, DagNode, NodeId};
pub use parser::{parse, ParseError, ParseErrorKind};
pub use signature::{LetterSet, Signature, SignatureError};

pub type Letter = Arc<str>;

/// An immutable, structurally shared formula.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Formula(Arc<Node>);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    True,
    False,
    Pi,
    Atom(Letter),
    Not(Formula),
    And(Formula, Formula),
    Or(Formula, Formula),
    HsB(Formula),
    HsE(Formula),
    BoxB(Formula),
    BoxE(Formula),
    BoxG(Formula),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    B,
    E,
}

impl Formula {
    pub fn new(node: Node) -> Self {
        Formula(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn top() -> Self {
        Self::new(Node::True)
    }

    pub fn bot() -> Self {
        Self::new(Node::False)
    }

    pub fn pi() -> Self {
        Self::new(Node::Pi)
    }

    pub fn atom(name: &str) -> Self {
        Self::new(Node::Atom(Arc::from(name)))
    }

    /// The atomic pattern `pi & p`.
    pub fn point(name: &str) -> Self {
        Self::and(Self::pi(), Self::atom(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Self::new(Node::Not(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Self::new(Node::And(a, b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Self::new(Node::Or(a, b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Self::or(Self::not(a), b)
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Self::and(Self::implies(a.clone(), b.clone()), Self::implies(b, a))
    }

    pub fn hs_b(f: Formula) -> Self {
        Self::new(Node::HsB(f))
    }

    pub fn hs_e(f: Formula) -> Self {
        Self::new(Node::HsE(f))
    }

    pub fn hs(dir: Dir, f: Formula) -> Self {
        match dir {
            Dir::B => Self::hs_b(f),
            Dir::E => Self::hs_e(f),
        }
    }

    pub fn box_b(f: Formula) -> Self {
        Self::new(Node::BoxB(f))
    }

    pub fn box_e(f: Formula) -> Self {
        Self::new(Node::BoxE(f))
    }

    pub fn box_g(f: Formula) -> Self {
        Self::new(Node::BoxG(f))
    }

    /// Right-nested conjunction; `true` when empty.
    pub fn and_all<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Self::top();
        };
        while let Some(f) = items.pop() {
            acc = Self::and(f, acc);
        }
        acc
    }

    /// Right-nested disjunction; `false` when empty.
    pub fn or_all<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Self::bot();
        };
        while let Some(f) = items.pop() {
            acc = Self::or(f, acc);
        }
        acc
    }

    /// `pi & p` or `p & pi`.
    pub fn point_letter(&self) -> Option<&Letter> {
        match self.node() {
            Node::And(a, b) => match (a.node(), b.node()) {
                (Node::Pi, Node::Atom(p)) | (Node::Atom(p), Node::Pi) => Some(p),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self.node() {
            Node::True | Node::False | Node::Pi | Node::Atom(_) => vec![],
            Node::Not(a)
            | Node::HsB(a)
            | Node::HsE(a)
            | Node::BoxB(a)
            | Node::BoxE(a)
            | Node::BoxG(a) => vec![a],
            Node::And(a, b) | Node::Or(a, b) => vec![a, b],
        }
    }

    fn map_children(&self, mut f: impl FnMut(&Formula) -> Formula) -> Formula {
        match self.node() {
            Node::True | Node::False | Node::Pi | Node::Atom(_) => self.clone(),
            Node::Not(a) => Self::not(f(a)),
            Node::HsB(a) => Self::hs_b(f(a)),
            Node::HsE(a) => Self::hs_e(f(a)),
            Node::BoxB(a) => Self::box_b(f(a)),
            Node::BoxE(a) => Self::box_e(f(a)),
            Node::BoxG(a) => Self::box_g(f(a)),
            Node::And(a, b) => Self::and(f(a), f(b)),
            Node::Or(a, b) => Self::or(f(a), f(b)),
        }
    }

    /// Modal depth. `[B]`/`[E]` count one, `[G]` counts two, `pi` counts zero.
    pub fn depth(&self) -> usize {
        match self.node() {
            Node::True | Node::False | Node::Pi | Node::Atom(_) => 0,
            Node::Not(a) => a.depth(),
            Node::And(a, b) | Node::Or(a, b) => a.depth().max(b.depth()),
            Node::HsB(a) | Node::HsE(a) | Node::BoxB(a) | Node::BoxE(a) => a.depth() + 1,
            Node::BoxG(a) => a.depth() + 2,
        }
    }

    /// Node count, with each `pi & p` counted as a single node.
    pub fn size(&self) -> usize {
        if self.point_letter().is_some() {
            return 1;
        }
        1 + self
            .children()
            .into_iter()
            .map(Formula::size)
            .sum::<usize>()
    }

    pub fn letters(&self) -> BTreeSet<Letter> {
        let mut out = BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut BTreeSet<Letter>) {
        if let Node::Atom(p) = self.node() {
            out.insert(p.clone());
        }
        for c in self.children() {
            c.collect_letters(out);
        }
    }

    /// True iff every letter occurs inside a `pi & p` pattern.
    pub fn is_homogeneous_nf(&self) -> bool {
        match self.node() {
            Node::Atom(_) => false,
            _ if self.point_letter().is_some() => true,
            _ => self.children().into_iter().all(Formula::is_homogeneous_nf),
        }
    }

    /// Rewrites the box operators into the primitive grammar.
    pub fn canonical(&self) -> Formula {
        match self.node() {
            Node::BoxB(a) => Self::not(Self::hs_b(Self::not(a.canonical()))),
            Node::BoxE(a) => Self::not(Self::hs_e(Self::not(a.canonical()))),
            Node::BoxG(a) => {
                let a = a.canonical();
                let bx = |f: Formula, d: Dir| Self::not(Self::hs(d, Self::not(f)));
                Self::and_all([
                    a.clone(),
                    bx(a.clone(), Dir::B),
                    bx(a.clone(), Dir::E),
                    bx(bx(a, Dir::E), Dir::B),
                ])
            }
            _ => self.map_children(Formula::canonical),
        }
    }

    /// Replaces every letter not already guarded by `pi` with [`everywhere`].
    pub fn to_homogeneous_nf(&self) -> Formula {
        match self.node() {
            Node::Atom(p) => everywhere(p),
            _ if self.point_letter().is_some() => self.clone(),
            _ => self.map_children(Formula::to_homogeneous_nf),
        }
    }

    /// All distinct subformulas, `pi & p` treated as a leaf.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if !out.insert(self.clone()) || self.point_letter().is_some() {
            return;
        }
        for c in self.children() {
            c.collect_subformulas(out);
        }
    }

    pub fn depth1_subformulas(&self) -> BTreeSet<Formula> {
        self.subformulas()
            .into_iter()
            .filter(|f| f.depth() <= 1)
            .collect()
    }

    /// Number of distinct subformulas of depth greater than two.
    pub fn deep_subformula_count(&self) -> usize {
        self.subformulas().iter().filter(|f| f.depth() > 2).count()
    }

    /// Arguments of outermost `<B>` operators, computed on the canonical form.
    pub fn b_args(&self) -> BTreeSet<Formula> {
        self.outer_args(Dir::B)
    }

    pub fn e_args(&self) -> BTreeSet<Formula> {
        self.outer_args(Dir::E)
    }

    fn outer_args(&self, dir: Dir) -> BTreeSet<Formula> {
        fn walk(f: &Formula, dir: Dir, out: &mut BTreeSet<Formula>) {
            match (f.node(), dir) {
                (Node::HsB(a), Dir::B) | (Node::HsE(a), Dir::E) => {
                    out.insert(a.clone());
                }
                (Node::HsB(_), _) | (Node::HsE(_), _) => {}
                _ => {
                    for c in f.children() {
                        walk(c, dir, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(&self.canonical(), dir, &mut out);
        out
    }

    /// Replaces every occurrence of `from` by `to`.
    pub fn substitute(&self, from: &Formula, to: &Formula) -> Formula {
        if self == from {
            return to.clone();
        }
        self.map_children(|c| c.substitute(from, to))
    }
}

/// `(pi & p) | (<B>(pi & p) & <E>(pi & p) & [B](pi | <E>(pi & p)))`
pub fn everywhere(p: &str) -> Formula {
    let pt = Formula::point(p);
    Formula::or(
        pt.clone(),
        Formula::and_all([
            Formula::hs_b(pt.clone()),
            Formula::hs_e(pt.clone()),
            Formula::box_b(Formula::or(Formula::pi(), Formula::hs_e(pt))),
        ]),
    )
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// A formula `psi & [G]xi` kept in two parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkingPair {
    pub psi: Formula,
    pub xi: Formula,
    pub signature: Signature,
}

impl WorkingPair {
    pub fn new(psi: Formula, xi: Formula, signature: Signature) -> Self {
        WorkingPair { psi, xi, signature }
    }

    pub fn is_shallow(&self) -> bool {
        self.psi.depth() <= 2 && self.xi.depth() <= 2
    }

    pub fn as_formula(&self) -> Formula {
        Formula::and(self.psi.clone(), Formula::box_g(self.xi.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn depth_examples() {
        assert_eq!(Formula::pi().depth(), 0);
        assert_eq!(Formula::atom("p").depth(), 0);
        assert_eq!(p("<B><E>(pi & p)").depth(), 2);
        assert_eq!(p("[G]pi").depth(), 2);
        assert_eq!(p("[B]<E>pi").depth(), 2);
    }

    #[test]
    fn size_examples() {
        assert_eq!(Formula::pi().size(), 1);
        assert_eq!(Formula::point("p").size(), 1);
        assert_eq!(p("<B><E>(pi & p)").size(), 3);
        assert_eq!(p("p & q").size(), 3);
    }

    #[test]
    fn depth1_example() {
        let d1 = p("<B><E>(pi & p)").depth1_subformulas();
        let want: BTreeSet<_> = [p("pi & p"), p("<E>(pi & p)")].into_iter().collect();
        assert_eq!(d1, want);
        let d1 = p("<B>(pi & q) & <B><B>(pi & r)").depth1_subformulas();
        assert!(!d1.contains(&p("<B><B>(pi & r)")));
        assert!(d1.contains(&p("<B>(pi & r)")));
    }

    #[test]
    fn args_example() {
        let f = p("<B>(pi & a) & <B><B>(pi & b) & <E><B>(pi & c)");
        let b: BTreeSet<_> = [p("pi & a"), p("<B>(pi & b)")].into_iter().collect();
        let e: BTreeSet<_> = [p("<B>(pi & c)")].into_iter().collect();
        assert_eq!(f.b_args(), b);
        assert_eq!(f.e_args(), e);
        assert!(p("pi & p").b_args().is_empty());
        assert!(p("pi & p").e_args().is_empty());
    }

    #[test]
    fn homogeneous_nf() {
        let f = p("p | <B>q");
        assert!(!f.is_homogeneous_nf());
        let h = f.to_homogeneous_nf();
        assert!(h.is_homogeneous_nf());
        assert_eq!(Formula::atom("p").to_homogeneous_nf(), everywhere("p"));
        assert_eq!(Formula::pi().to_homogeneous_nf(), Formula::pi());
        assert!(p("<B>(p & pi)").is_homogeneous_nf());
    }

    #[test]
    fn canonical_keeps_depth() {
        for s in ["[G]<B>pi", "[B][E](pi & p)", "~[E]pi | [G]pi"] {
            let f = p(s);
            let c = f.canonical();
            assert_eq!(c.depth(), f.depth(), "{s}");
            assert!(!format!("{c}").contains('['));
        }
    }

    #[test]
    fn substitute_all_occurrences() {
        let f = p("<B><B>pi & ~<B><B>pi");
        let g = f.substitute(&p("<B><B>pi"), &Formula::top());
        assert_eq!(g, p("true & ~true"));
    }

    #[test]
    fn empty_connectives() {
        assert_eq!(Formula::and_all([]), Formula::top());
        assert_eq!(Formula::or_all([]), Formula::bot());
        assert_eq!(
            Formula::and_all([Formula::pi(), Formula::top(), Formula::bot()]),
            p("pi & true & false")
        );
    }
}
