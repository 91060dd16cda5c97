//! Agreement between a generated graph and a benchmark graph.
//!
//! Benchmark I-nodes are first mapped onto generated I-nodes by text
//! similarity; the four agreement scores are then read through that mapping.

use std::collections::{HashMap, HashSet};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{Construction, RelationMatrix};
use crate::graph::{ArgumentGraph, NodeId, Stance};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("generated graph has no I-nodes")]
    EmptyGenerated,
}

/// Edit distance counted in characters (insertions, deletions, substitutions).
pub fn levenshtein(a: &str, b: &str) -> usize {
    strsim::levenshtein(a, b)
}

/// `1 - levenshtein(u, v) / max(|u|, |v|)`; two empty strings are identical.
pub fn node_similarity(u: &str, v: &str) -> f64 {
    if u == v {
        return 1.0;
    }
    let longest = u.chars().count().max(v.chars().count());
    1.0 - levenshtein(u, v) as f64 / longest as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappedNode {
    pub benchmark: NodeId,
    pub generated: Option<NodeId>,
    pub similarity: f64,
}

/// Injective assignment of benchmark I-nodes to generated I-nodes, listed in
/// benchmark order. Benchmark nodes left over once the generated nodes run
/// out map to nothing with similarity 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeMapping {
    pairs: Vec<MappedNode>,
}

impl NodeMapping {
    pub fn pairs(&self) -> &[MappedNode] {
        &self.pairs
    }

    pub fn get(&self, benchmark: &NodeId) -> Option<&NodeId> {
        self.pairs
            .iter()
            .find(|p| &p.benchmark == benchmark)
            .and_then(|p| p.generated.as_ref())
    }

    pub fn similarity(&self, benchmark: &NodeId) -> Option<f64> {
        self.pairs.iter().find(|p| &p.benchmark == benchmark).map(|p| p.similarity)
    }

    fn index(&self) -> HashMap<&NodeId, &NodeId> {
        self.pairs
            .iter()
            .filter_map(|p| p.generated.as_ref().map(|g| (&p.benchmark, g)))
            .collect()
    }
}

/// Greedy global assignment: repeatedly takes the most similar pair of
/// unassigned nodes, breaking ties by benchmark order, then generated order.
pub fn build_mapping(benchmark: &ArgumentGraph, generated: &ArgumentGraph) -> Result<NodeMapping, MetricsError> {
    let bs = benchmark.inodes();
    let gs = generated.inodes();
    if gs.is_empty() {
        return Err(MetricsError::EmptyGenerated);
    }
    let mut candidates = Vec::with_capacity(bs.len() * gs.len());
    for (bi, b) in bs.iter().enumerate() {
        for (gi, g) in gs.iter().enumerate() {
            candidates.push((node_similarity(&b.text, &g.text), bi, gi));
        }
    }
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut assigned: Vec<Option<(usize, f64)>> = vec![None; bs.len()];
    let mut used = vec![false; gs.len()];
    let mut remaining = bs.len().min(gs.len());
    for (sim, bi, gi) in candidates {
        if remaining == 0 {
            break;
        }
        if assigned[bi].is_some() || used[gi] {
            continue;
        }
        assigned[bi] = Some((gi, sim));
        used[gi] = true;
        remaining -= 1;
    }

    let pairs = bs
        .iter()
        .zip(assigned)
        .map(|(b, a)| MappedNode {
            benchmark: b.id.clone(),
            generated: a.map(|(gi, _)| gs[gi].id.clone()),
            similarity: a.map_or(0.0, |(_, s)| s),
        })
        .collect();
    Ok(NodeMapping { pairs })
}

/// Weight of each benchmark I-node in the I-node agreement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Character length of the benchmark text.
    #[default]
    Length,
    Uniform,
}

impl std::str::FromStr for Weighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "length" => Ok(Weighting::Length),
            "uniform" => Ok(Weighting::Uniform),
            other => Err(format!("unknown weighting {other:?} (length, uniform)")),
        }
    }
}

/// Weighted mean similarity of benchmark I-nodes to their images.
pub fn inode_agreement(mapping: &NodeMapping, benchmark: &ArgumentGraph, weighting: Weighting) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for node in benchmark.inodes() {
        let w = match weighting {
            Weighting::Length => node.text.chars().count() as f64,
            Weighting::Uniform => 1.0,
        };
        num += w * mapping.similarity(&node.id).unwrap_or(0.0);
        den += w;
    }
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

/// 1 when the benchmark major claim maps onto the generated one, or when the
/// benchmark has none.
pub fn major_claim_agreement(mapping: &NodeMapping, benchmark: &ArgumentGraph, generated: &ArgumentGraph) -> u8 {
    match benchmark.major_claim() {
        None => 1,
        Some(mc) => u8::from(mapping.get(mc).is_some() && mapping.get(mc) == generated.major_claim()),
    }
}

/// Answers whether the generated side relates two of its I-nodes with a
/// given stance, premise first.
pub trait StanceLookup {
    fn has_stance(&self, from: &NodeId, to: &NodeId, stance: Stance) -> bool;
}

impl StanceLookup for ArgumentGraph {
    fn has_stance(&self, from: &NodeId, to: &NodeId, stance: Stance) -> bool {
        self.stances_between(from, to).contains(&stance)
    }
}

/// Relation predictions keyed by the I-node ids of a constructed graph, so
/// that stances can be checked for pairs the constructor did not link.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RelationLookup {
    stances: HashMap<(NodeId, NodeId), Stance>,
}

impl RelationLookup {
    pub fn new(construction: &Construction, relations: &RelationMatrix) -> Self {
        let mut stances = HashMap::new();
        for (from, to, p) in relations.iter() {
            if let (Some(f), Some(t)) = (construction.inode_ids.get(&from), construction.inode_ids.get(&to)) {
                stances.insert((f.clone(), t.clone()), p.stance);
            }
        }
        RelationLookup { stances }
    }

    pub fn len(&self) -> usize {
        self.stances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stances.is_empty()
    }
}

impl StanceLookup for RelationLookup {
    fn has_stance(&self, from: &NodeId, to: &NodeId, stance: Stance) -> bool {
        self.stances.get(&(from.clone(), to.clone())) == Some(&stance)
    }
}

/// Share of benchmark `(premise, claim)` tuples whose mapped pair carries the
/// same stance on the generated side. No tuples scores 1.
pub fn snode_agreement(mapping: &NodeMapping, benchmark: &ArgumentGraph, generated: &dyn StanceLookup) -> f64 {
    let index = mapping.index();
    let mut total = 0usize;
    let mut correct = 0usize;
    for (x, s, z) in benchmark.triples() {
        total += 1;
        if let (Some(mx), Some(mz)) = (index.get(x), index.get(z)) {
            if generated.has_stance(mx, mz, s.stance) {
                correct += 1;
            }
        }
    }
    if total == 0 {
        1.0
    } else {
        correct as f64 / total as f64
    }
}

/// Share of benchmark edges lying on a triple whose mapped I-nodes are
/// connected through some S-node in the generated graph, in either
/// direction. No benchmark edges scores 1.
pub fn edge_agreement(mapping: &NodeMapping, benchmark: &ArgumentGraph, generated: &ArgumentGraph) -> f64 {
    let total = benchmark.edges().len();
    if total == 0 {
        return 1.0;
    }
    let index = mapping.index();
    let connected: HashSet<(&NodeId, &NodeId)> = generated
        .triples()
        .into_iter()
        .flat_map(|(x, _, z)| [(x, z), (z, x)])
        .collect();
    let mut mapped: HashSet<(&NodeId, &NodeId)> = HashSet::new();
    for (x, s, z) in benchmark.triples() {
        if let (Some(mx), Some(mz)) = (index.get(x), index.get(z)) {
            if connected.contains(&(*mx, *mz)) {
                mapped.insert((x, &s.id));
                mapped.insert((&s.id, z));
            }
        }
    }
    mapped.len() as f64 / total as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub inode: f64,
    pub major_claim: u8,
    pub snode: f64,
    pub edge: f64,
    pub time_s: f64,
}

impl AgreementReport {
    /// Scores for a run that produced no graph at all: every check that has
    /// something to find fails, vacuous ones pass.
    pub fn nothing_generated(benchmark: &ArgumentGraph, elapsed: Duration) -> Self {
        let has_tuples = !benchmark.triples().is_empty();
        AgreementReport {
            inode: if benchmark.inodes().is_empty() { 1.0 } else { 0.0 },
            major_claim: u8::from(benchmark.major_claim().is_none()),
            snode: if has_tuples { 0.0 } else { 1.0 },
            edge: if benchmark.edges().is_empty() { 1.0 } else { 0.0 },
            time_s: elapsed.as_secs_f64(),
        }
    }
}

/// All scores, reading stances from the generated graph and weighting
/// I-nodes by length.
pub fn evaluate_pair(
    benchmark: &ArgumentGraph,
    generated: &ArgumentGraph,
    elapsed: Duration,
) -> Result<AgreementReport, MetricsError> {
    evaluate_pair_with(benchmark, generated, generated, Weighting::Length, elapsed)
}

pub fn evaluate_pair_with(
    benchmark: &ArgumentGraph,
    generated: &ArgumentGraph,
    stances: &dyn StanceLookup,
    weighting: Weighting,
    elapsed: Duration,
) -> Result<AgreementReport, MetricsError> {
    let mapping = build_mapping(benchmark, generated)?;
    Ok(AgreementReport {
        inode: inode_agreement(&mapping, benchmark, weighting),
        major_claim: major_claim_agreement(&mapping, benchmark, generated),
        snode: snode_agreement(&mapping, benchmark, stances),
        edge: edge_agreement(&mapping, benchmark, generated),
        time_s: elapsed.as_secs_f64(),
    })
}
