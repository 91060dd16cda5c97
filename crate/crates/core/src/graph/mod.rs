//! Argument graph data model.
//!
//! A graph holds information nodes (I-nodes, one per argumentative unit),
//! scheme nodes (S-nodes, one per support or attack relation), directed
//! edges between them and a designated major claim. Relations always run
//! `premise -> S-node -> claim`, so the major claim is the single sink every
//! argument chain ends in.
//!
//! Graphs are plain values. [`ArgumentGraph::add_argument`] returns a new
//! graph instead of mutating, and [`GraphBuilder`] is the place where
//! incremental construction happens.

mod aif;
mod dot;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aif::{AifError, AifOptions};

/// Opaque node identifier, unique within one graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl From<u64> for NodeId {
    fn from(n: u64) -> Self {
        NodeId(n.to_string())
    }
}

/// Polarity of a relation between two I-nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stance {
    Support,
    Attack,
}

impl Stance {
    pub fn as_str(self) -> &'static str {
        match self {
            Stance::Support => "support",
            Stance::Attack => "attack",
        }
    }
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Information node: the text of one argumentative unit.
#[derive(Clone, Debug, PartialEq)]
pub struct INode {
    pub id: NodeId,
    pub text: String,
    /// Character offsets `(start, end)` into the source document.
    pub span: Option<(usize, usize)>,
}

impl INode {
    pub fn new(id: impl Into<NodeId>, text: impl Into<String>) -> Self {
        INode {
            id: id.into(),
            text: text.into(),
            span: None,
        }
    }

    pub fn with_span(mut self, start: usize, end: usize) -> Self {
        self.span = Some((start, end));
        self
    }
}

/// Scheme node: a support or attack relation.
#[derive(Clone, Debug, PartialEq)]
pub struct SNode {
    pub id: NodeId,
    pub stance: Stance,
    pub probability: Option<f64>,
}

impl SNode {
    pub fn new(id: impl Into<NodeId>, stance: Stance) -> Self {
        SNode {
            id: id.into(),
            stance,
            probability: None,
        }
    }

    pub fn with_probability(mut self, probability: f64) -> Self {
        self.probability = Some(probability);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
}

impl Edge {
    pub fn new(from: impl Into<NodeId>, to: impl Into<NodeId>) -> Self {
        Edge {
            from: from.into(),
            to: to.into(),
        }
    }
}

/// A broken structural rule, naming the offending node or edge.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    DuplicateId(NodeId),
    EmptyText(NodeId),
    InvalidSpan { node: NodeId, start: usize, end: usize },
    ProbabilityOutOfRange { node: NodeId, probability: f64 },
    DanglingEdge(Edge),
    DuplicateEdge(Edge),
    EdgeBypassesScheme(Edge),
    SchemeToScheme(Edge),
    SchemeWithoutPremise(NodeId),
    SchemeOutDegree { node: NodeId, count: usize },
    Cycle(Vec<NodeId>),
    MissingMajorClaim,
    MajorClaimNotInode(NodeId),
    MajorClaimNotRoot(NodeId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId(id) => write!(f, "duplicate node id {id}"),
            Violation::EmptyText(id) => write!(f, "I-node {id} has empty text"),
            Violation::InvalidSpan { node, start, end } => {
                write!(f, "I-node {node} has invalid span {start}..{end}")
            }
            Violation::ProbabilityOutOfRange { node, probability } => {
                write!(f, "S-node {node} probability {probability} outside [0, 1]")
            }
            Violation::DanglingEdge(e) => {
                write!(f, "edge {} -> {} references unknown node", e.from, e.to)
            }
            Violation::DuplicateEdge(e) => write!(f, "edge {} -> {} appears twice", e.from, e.to),
            Violation::EdgeBypassesScheme(e) => {
                write!(f, "edge {} -> {}: edge bypasses scheme node", e.from, e.to)
            }
            Violation::SchemeToScheme(e) => {
                write!(f, "edge {} -> {} connects two scheme nodes", e.from, e.to)
            }
            Violation::SchemeWithoutPremise(id) => {
                write!(f, "S-node {id} has no incoming edge")
            }
            Violation::SchemeOutDegree { node, count } => {
                write!(f, "S-node {node} has {count} outgoing edges, expected exactly 1")
            }
            Violation::Cycle(nodes) => {
                let ids: Vec<&str> = nodes.iter().map(NodeId::as_str).collect();
                write!(f, "cycle through nodes [{}]", ids.join(", "))
            }
            Violation::MissingMajorClaim => f.write_str("graph has no major claim"),
            Violation::MajorClaimNotInode(id) => {
                write!(f, "major claim {id} is not an I-node")
            }
            Violation::MajorClaimNotRoot(id) => write!(f, "{id}: major claim not root"),
        }
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("unknown claim node {0}")]
    UnknownClaim(NodeId),
    #[error("duplicate node id {0}")]
    DuplicateId(NodeId),
    #[error("invalid graph: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// The triple of nodes, edges and major claim.
///
/// The major claim is optional only so that benchmark graphs without an
/// annotated major claim can be loaded; [`ArgumentGraph::validate`] reports
/// its absence.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ArgumentGraph {
    inodes: Vec<INode>,
    snodes: Vec<SNode>,
    edges: Vec<Edge>,
    major_claim: Option<NodeId>,
}

impl ArgumentGraph {
    /// A graph consisting of the major claim only.
    pub fn new(major_claim: INode) -> Self {
        let id = major_claim.id.clone();
        ArgumentGraph {
            inodes: vec![major_claim],
            snodes: Vec::new(),
            edges: Vec::new(),
            major_claim: Some(id),
        }
    }

    /// Assembles a graph without checking any invariant.
    pub fn from_parts(
        inodes: Vec<INode>,
        snodes: Vec<SNode>,
        edges: Vec<Edge>,
        major_claim: Option<NodeId>,
    ) -> Self {
        ArgumentGraph {
            inodes,
            snodes,
            edges,
            major_claim,
        }
    }

    pub fn inodes(&self) -> &[INode] {
        &self.inodes
    }

    pub fn snodes(&self) -> &[SNode] {
        &self.snodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn major_claim(&self) -> Option<&NodeId> {
        self.major_claim.as_ref()
    }

    pub fn major_claim_node(&self) -> Option<&INode> {
        self.major_claim.as_ref().and_then(|id| self.inode(id))
    }

    pub fn inode(&self, id: &NodeId) -> Option<&INode> {
        self.inodes.iter().find(|n| &n.id == id)
    }

    pub fn snode(&self, id: &NodeId) -> Option<&SNode> {
        self.snodes.iter().find(|n| &n.id == id)
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.inode(id).is_some() || self.snode(id).is_some()
    }

    /// Smallest integer id strictly greater than every integer id in use.
    pub fn next_id(&self) -> u64 {
        self.inodes
            .iter()
            .map(|n| &n.id)
            .chain(self.snodes.iter().map(|n| &n.id))
            .filter_map(|id| id.as_str().parse::<u64>().ok())
            .max()
            .map_or(1, |m| m + 1)
    }

    /// Returns a new graph with `premise` linked to `claim_id` through `scheme`.
    pub fn add_argument(
        &self,
        premise: INode,
        scheme: SNode,
        claim_id: &NodeId,
    ) -> Result<ArgumentGraph, GraphError> {
        if self.inode(claim_id).is_none() {
            return Err(GraphError::UnknownClaim(claim_id.clone()));
        }
        if self.contains(&premise.id) {
            return Err(GraphError::DuplicateId(premise.id));
        }
        if self.contains(&scheme.id) || scheme.id == premise.id {
            return Err(GraphError::DuplicateId(scheme.id));
        }
        let mut next = self.clone();
        next.edges.push(Edge::new(premise.id.clone(), scheme.id.clone()));
        next.edges.push(Edge::new(scheme.id.clone(), claim_id.clone()));
        next.inodes.push(premise);
        next.snodes.push(scheme);
        Ok(next)
    }

    /// Like [`add_argument`](Self::add_argument) but allocates the two node ids.
    /// Returns the new graph and the id of the premise I-node.
    pub fn add_argument_text(
        &self,
        premise_text: impl Into<String>,
        stance: Stance,
        claim_id: &NodeId,
    ) -> Result<(ArgumentGraph, NodeId), GraphError> {
        let base = self.next_id();
        let premise = INode::new(base, premise_text);
        let id = premise.id.clone();
        let graph = self.add_argument(premise, SNode::new(base + 1, stance), claim_id)?;
        Ok((graph, id))
    }

    /// Edges leaving `id`, in insertion order.
    pub fn outgoing<'a>(&'a self, id: &'a NodeId) -> impl Iterator<Item = &'a NodeId> + 'a {
        self.edges.iter().filter(move |e| &e.from == id).map(|e| &e.to)
    }

    /// Edges entering `id`, in insertion order.
    pub fn incoming<'a>(&'a self, id: &'a NodeId) -> impl Iterator<Item = &'a NodeId> + 'a {
        self.edges.iter().filter(move |e| &e.to == id).map(|e| &e.from)
    }

    /// Every `(premise, scheme, claim)` triple with I-nodes on both ends.
    pub fn triples(&self) -> Vec<(&NodeId, &SNode, &NodeId)> {
        let inode_ids: HashSet<&NodeId> = self.inodes.iter().map(|n| &n.id).collect();
        let mut out = Vec::new();
        for s in &self.snodes {
            let ins: Vec<&NodeId> = self
                .incoming(&s.id)
                .filter(|id| inode_ids.contains(id))
                .collect();
            let outs: Vec<&NodeId> = self
                .outgoing(&s.id)
                .filter(|id| inode_ids.contains(id))
                .collect();
            for x in &ins {
                for z in &outs {
                    out.push((*x, s, *z));
                }
            }
        }
        out
    }

    /// Stances of every S-node leading from I-node `from` to I-node `to`.
    pub fn stances_between(&self, from: &NodeId, to: &NodeId) -> Vec<Stance> {
        self.snodes
            .iter()
            .filter(|s| {
                self.edges.iter().any(|e| &e.from == from && e.to == s.id)
                    && self.edges.iter().any(|e| e.from == s.id && &e.to == to)
            })
            .map(|s| s.stance)
            .collect()
    }

    /// Checks every structural invariant. An empty result means the graph is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();

        let mut seen = HashSet::new();
        for id in self
            .inodes
            .iter()
            .map(|n| &n.id)
            .chain(self.snodes.iter().map(|n| &n.id))
        {
            if !seen.insert(id) {
                violations.push(Violation::DuplicateId(id.clone()));
            }
        }

        for n in &self.inodes {
            if n.text.trim().is_empty() {
                violations.push(Violation::EmptyText(n.id.clone()));
            }
            if let Some((start, end)) = n.span {
                if start >= end {
                    violations.push(Violation::InvalidSpan {
                        node: n.id.clone(),
                        start,
                        end,
                    });
                }
            }
        }
        for s in &self.snodes {
            if let Some(p) = s.probability {
                if !(0.0..=1.0).contains(&p) {
                    violations.push(Violation::ProbabilityOutOfRange {
                        node: s.id.clone(),
                        probability: p,
                    });
                }
            }
        }

        let inode_ids: HashSet<&NodeId> = self.inodes.iter().map(|n| &n.id).collect();
        let snode_ids: HashSet<&NodeId> = self.snodes.iter().map(|n| &n.id).collect();
        let mut seen_edges = HashSet::new();
        for e in &self.edges {
            if !seen_edges.insert(e) {
                violations.push(Violation::DuplicateEdge(e.clone()));
            }
            let from_i = inode_ids.contains(&e.from);
            let from_s = snode_ids.contains(&e.from);
            let to_i = inode_ids.contains(&e.to);
            let to_s = snode_ids.contains(&e.to);
            if !(from_i || from_s) || !(to_i || to_s) {
                violations.push(Violation::DanglingEdge(e.clone()));
            } else if from_i && to_i {
                violations.push(Violation::EdgeBypassesScheme(e.clone()));
            } else if from_s && to_s {
                violations.push(Violation::SchemeToScheme(e.clone()));
            }
        }

        for s in &self.snodes {
            if self.incoming(&s.id).next().is_none() {
                violations.push(Violation::SchemeWithoutPremise(s.id.clone()));
            }
            let count = self.outgoing(&s.id).count();
            if count != 1 {
                violations.push(Violation::SchemeOutDegree {
                    node: s.id.clone(),
                    count,
                });
            }
        }

        if let Some(cycle) = self.cyclic_nodes() {
            violations.push(Violation::Cycle(cycle));
        }

        match &self.major_claim {
            None => violations.push(Violation::MissingMajorClaim),
            Some(mc) if !inode_ids.contains(mc) => {
                violations.push(Violation::MajorClaimNotInode(mc.clone()))
            }
            Some(mc) => {
                if self.outgoing(mc).next().is_some() {
                    violations.push(Violation::MajorClaimNotRoot(mc.clone()));
                }
            }
        }

        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Nodes that Kahn's algorithm cannot remove, i.e. nodes on or behind a cycle.
    fn cyclic_nodes(&self) -> Option<Vec<NodeId>> {
        let mut indegree: HashMap<&NodeId, usize> = HashMap::new();
        for id in self
            .inodes
            .iter()
            .map(|n| &n.id)
            .chain(self.snodes.iter().map(|n| &n.id))
        {
            indegree.entry(id).or_insert(0);
        }
        let mut successors: HashMap<&NodeId, Vec<&NodeId>> = HashMap::new();
        for e in &self.edges {
            if indegree.contains_key(&e.from) && indegree.contains_key(&e.to) {
                *indegree.get_mut(&e.to).unwrap() += 1;
                successors.entry(&e.from).or_default().push(&e.to);
            }
        }
        let mut queue: Vec<&NodeId> = indegree
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(id, _)| *id)
            .collect();
        let mut removed = 0;
        while let Some(id) = queue.pop() {
            removed += 1;
            for next in successors.get(id).into_iter().flatten() {
                let d = indegree.get_mut(next).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push(next);
                }
            }
        }
        if removed == indegree.len() {
            return None;
        }
        let left: BTreeSet<NodeId> = indegree
            .into_iter()
            .filter(|(_, d)| *d > 0)
            .map(|(id, _)| id.clone())
            .collect();
        Some(left.into_iter().collect())
    }

    /// Number of I-node layers on the longest I-node path into the major
    /// claim, counting the major claim itself as layer 1. I-nodes that do
    /// not reach the major claim are ignored.
    pub fn depth(&self) -> Result<usize, GraphError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(GraphError::Invalid(violations));
        }
        let mc = self.major_claim.as_ref().expect("validated graph has a major claim");

        // I-node -> I-nodes it argues for
        let mut parents: HashMap<&NodeId, Vec<&NodeId>> = HashMap::new();
        for (x, _, z) in self.triples() {
            parents.entry(x).or_default().push(z);
        }

        fn layer<'a>(
            node: &'a NodeId,
            mc: &NodeId,
            parents: &HashMap<&'a NodeId, Vec<&'a NodeId>>,
            memo: &mut HashMap<&'a NodeId, Option<usize>>,
        ) -> Option<usize> {
            if node == mc {
                return Some(1);
            }
            if let Some(v) = memo.get(node) {
                return *v;
            }
            let best = parents
                .get(node)
                .into_iter()
                .flatten()
                .filter_map(|p| layer(p, mc, parents, memo))
                .max()
                .map(|d| d + 1);
            memo.insert(node, best);
            best
        }

        let mut memo = HashMap::new();
        Ok(self
            .inodes
            .iter()
            .filter_map(|n| layer(&n.id, mc, &parents, &mut memo))
            .max()
            .unwrap_or(1))
    }

    /// Logical equality that ignores node and edge ordering.
    pub fn same_content(&self, other: &ArgumentGraph) -> bool {
        self.canonical() == other.canonical()
    }

    fn canonical(&self) -> ArgumentGraph {
        let mut g = self.clone();
        g.inodes.sort_by(|a, b| a.id.cmp(&b.id));
        g.snodes.sort_by(|a, b| a.id.cmp(&b.id));
        g.edges.sort();
        g
    }
}

/// Incremental construction with automatic integer ids.
///
/// Ids are handed out in insertion order starting at 1, so two builders fed
/// the same sequence of calls produce identical graphs.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    inodes: Vec<INode>,
    snodes: Vec<SNode>,
    edges: Vec<Edge>,
    major_claim: Option<NodeId>,
    next_id: u64,
}

impl GraphBuilder {
    pub fn new() -> Self {
        GraphBuilder {
            next_id: 1,
            ..Default::default()
        }
    }

    fn allocate(&mut self) -> NodeId {
        let id = NodeId::from(self.next_id);
        self.next_id += 1;
        id
    }

    pub fn inode(&mut self, text: impl Into<String>, span: Option<(usize, usize)>) -> NodeId {
        let id = self.allocate();
        self.inodes.push(INode {
            id: id.clone(),
            text: text.into(),
            span,
        });
        id
    }

    pub fn set_major_claim(&mut self, id: NodeId) {
        self.major_claim = Some(id);
    }

    /// Adds `child -> S-node -> parent` and returns the S-node id.
    pub fn link(
        &mut self,
        child: &NodeId,
        stance: Stance,
        probability: Option<f64>,
        parent: &NodeId,
    ) -> NodeId {
        let id = self.allocate();
        self.snodes.push(SNode {
            id: id.clone(),
            stance,
            probability,
        });
        self.edges.push(Edge::new(child.clone(), id.clone()));
        self.edges.push(Edge::new(id.clone(), parent.clone()));
        id
    }

    /// Finishes the graph, failing if any invariant is broken.
    pub fn build(self) -> Result<ArgumentGraph, GraphError> {
        let graph = ArgumentGraph::from_parts(self.inodes, self.snodes, self.edges, self.major_claim);
        let violations = graph.validate();
        if violations.is_empty() {
            Ok(graph)
        } else {
            Err(GraphError::Invalid(violations))
        }
    }
}
