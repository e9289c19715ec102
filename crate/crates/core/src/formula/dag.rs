use std::collections::HashMap;

use super::{Formula, Node, Signature, SignatureError};

pub type NodeId = u32;

/// A hash-consed node. Children always have smaller ids than their parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DagNode {
    True,
    False,
    Pi,
    Atom(u32),
    Not(NodeId),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    HsB(NodeId),
    HsE(NodeId),
    BoxB(NodeId),
    BoxE(NodeId),
    BoxG(NodeId),
}

/// Interned formulas with letters resolved against a signature.
#[derive(Clone, Debug, Default)]
pub struct Dag {
    nodes: Vec<DagNode>,
    depth: Vec<u32>,
    index: HashMap<DagNode, NodeId>,
}

impl Dag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> DagNode {
        self.nodes[id as usize]
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.depth[id as usize] as usize
    }

    pub fn intern(&mut self, n: DagNode) -> NodeId {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let d = match n {
            DagNode::True | DagNode::False | DagNode::Pi | DagNode::Atom(_) => 0,
            DagNode::Not(a) => self.depth[a as usize],
            DagNode::And(a, b) | DagNode::Or(a, b) => {
                self.depth[a as usize].max(self.depth[b as usize])
            }
            DagNode::HsB(a) | DagNode::HsE(a) | DagNode::BoxB(a) | DagNode::BoxE(a) => {
                self.depth[a as usize] + 1
            }
            DagNode::BoxG(a) => self.depth[a as usize] + 2,
        };
        let id = self.nodes.len() as NodeId;
        self.nodes.push(n);
        self.depth.push(d);
        self.index.insert(n, id);
        id
    }

    pub fn add(&mut self, f: &Formula, sig: &Signature) -> Result<NodeId, SignatureError> {
        let mut seen = HashMap::new();
        self.add_rec(f, sig, &mut seen)
    }

    fn add_rec(
        &mut self,
        f: &Formula,
        sig: &Signature,
        seen: &mut HashMap<*const Node, NodeId>,
    ) -> Result<NodeId, SignatureError> {
        let key = f.node() as *const Node;
        if let Some(&id) = seen.get(&key) {
            return Ok(id);
        }
        let n = match f.node() {
            Node::True => DagNode::True,
            Node::False => DagNode::False,
            Node::Pi => DagNode::Pi,
            Node::Atom(p) => DagNode::Atom(sig.lookup(p)?),
            Node::Not(a) => DagNode::Not(self.add_rec(a, sig, seen)?),
            Node::And(a, b) => {
                let a = self.add_rec(a, sig, seen)?;
                DagNode::And(a, self.add_rec(b, sig, seen)?)
            }
            Node::Or(a, b) => {
                let a = self.add_rec(a, sig, seen)?;
                DagNode::Or(a, self.add_rec(b, sig, seen)?)
            }
            Node::HsB(a) => DagNode::HsB(self.add_rec(a, sig, seen)?),
            Node::HsE(a) => DagNode::HsE(self.add_rec(a, sig, seen)?),
            Node::BoxB(a) => DagNode::BoxB(self.add_rec(a, sig, seen)?),
            Node::BoxE(a) => DagNode::BoxE(self.add_rec(a, sig, seen)?),
            Node::BoxG(a) => DagNode::BoxG(self.add_rec(a, sig, seen)?),
        };
        let id = self.intern(n);
        seen.insert(key, id);
        Ok(id)
    }

    pub fn to_formula(&self, id: NodeId, sig: &Signature) -> Formula {
        let f = |c: NodeId| self.to_formula(c, sig);
        match self.node(id) {
            DagNode::True => Formula::top(),
            DagNode::False => Formula::bot(),
            DagNode::Pi => Formula::pi(),
            DagNode::Atom(p) => Formula::atom(sig.name(p)),
            DagNode::Not(a) => Formula::not(f(a)),
            DagNode::And(a, b) => Formula::and(f(a), f(b)),
            DagNode::Or(a, b) => Formula::or(f(a), f(b)),
            DagNode::HsB(a) => Formula::hs_b(f(a)),
            DagNode::HsE(a) => Formula::hs_e(f(a)),
            DagNode::BoxB(a) => Formula::box_b(f(a)),
            DagNode::BoxE(a) => Formula::box_e(f(a)),
            DagNode::BoxG(a) => Formula::box_g(f(a)),
        }
    }

    /// Nodes reachable from `root`, children first.
    pub fn reachable(&self, root: NodeId) -> Vec<NodeId> {
        let mut mark = vec![false; self.len()];
        mark[root as usize] = true;
        for id in (0..=root).rev() {
            if !mark[id as usize] {
                continue;
            }
            for c in self.children(id) {
                mark[c as usize] = true;
            }
        }
        (0..=root).filter(|&i| mark[i as usize]).collect()
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = NodeId> {
        let (a, b) = match self.node(id) {
            DagNode::True | DagNode::False | DagNode::Pi | DagNode::Atom(_) => (None, None),
            DagNode::Not(a)
            | DagNode::HsB(a)
            | DagNode::HsE(a)
            | DagNode::BoxB(a)
            | DagNode::BoxE(a)
            | DagNode::BoxG(a) => (Some(a), None),
            DagNode::And(a, b) | DagNode::Or(a, b) => (Some(a), Some(b)),
        };
        a.into_iter().chain(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn shares_structure() {
        let sig = Signature::new(["p"]).unwrap();
        let mut dag = Dag::new();
        let a = dag
            .add(&parse("<B>(pi & p) | <B>(pi & p)").unwrap(), &sig)
            .unwrap();
        assert_eq!(dag.len(), 5);
        let b = dag.add(&parse("<B>(pi & p)").unwrap(), &sig).unwrap();
        assert!(b < a);
        assert_eq!(dag.depth(a), 1);
        assert_eq!(
            dag.to_formula(a, &sig),
            parse("<B>(pi & p) | <B>(pi & p)").unwrap()
        );
    }

    #[test]
    fn unknown_letter() {
        let sig = Signature::new(["p"]).unwrap();
        assert!(Dag::new().add(&parse("q").unwrap(), &sig).is_err());
    }
}
