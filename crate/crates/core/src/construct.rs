//! Graph construction from a major claim, the remaining units and their
//! pairwise relation predictions.
//!
//! Every constructor adds the I-nodes in document order first (so node ids
//! follow sentence order), then the S-nodes. The stance and probability of
//! an S-node linking `child -> parent` come from the prediction for that
//! ordered pair; a missing prediction yields a support S-node without
//! probability.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{classify_relation, ClassifyError, ProbabilisticClassifier, RelationPrediction};
use crate::graph::{ArgumentGraph, GraphBuilder, GraphError, NodeId, Stance};
use crate::majorclaim::{Adu, AduId};

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("unit id {0} appears more than once")]
    DuplicateAdu(AduId),
    #[error("major claim {0} is also in the unit pool")]
    MajorClaimInPool(AduId),
    #[error("relation from unit {0} to itself")]
    SelfRelation(AduId),
    #[error("relation probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("bound factor {0} outside (0, 1]")]
    BadBoundFactor(f64),
    #[error("max_iterations must be at least 1")]
    NoIterations,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Predictions for ordered unit pairs `(from, to)`, read as "from argues for
/// or against to". The diagonal is always empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RelationMatrix {
    entries: BTreeMap<(AduId, AduId), RelationPrediction>,
}

impl RelationMatrix {
    pub fn insert(&mut self, from: AduId, to: AduId, prediction: RelationPrediction) -> Result<(), ConstructError> {
        if from == to {
            return Err(ConstructError::SelfRelation(from));
        }
        if !(0.0..=1.0).contains(&prediction.probability) {
            return Err(ConstructError::ProbabilityOutOfRange(prediction.probability));
        }
        self.entries.insert((from, to), prediction);
        Ok(())
    }

    pub fn get(&self, from: AduId, to: AduId) -> Option<&RelationPrediction> {
        self.entries.get(&(from, to))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AduId, AduId, &RelationPrediction)> {
        self.entries.iter().map(|(&(f, t), p)| (f, t, p))
    }

    /// Classifies every ordered pair of distinct units.
    pub fn predict(
        adus: &[Adu],
        model: &dyn ProbabilisticClassifier,
        neutral_threshold: f64,
    ) -> Result<Self, ClassifyError> {
        let mut m = RelationMatrix::default();
        for a in adus {
            for b in adus {
                if a.id() == b.id() {
                    continue;
                }
                let p = classify_relation(&a.embedding, &b.embedding, model, neutral_threshold)?;
                m.entries.insert((a.id(), b.id()), p);
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructionMethod {
    Flat,
    Position,
    Pairwise,
}

impl ConstructionMethod {
    pub const ALL: [ConstructionMethod; 3] = [
        ConstructionMethod::Position,
        ConstructionMethod::Flat,
        ConstructionMethod::Pairwise,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConstructionMethod::Flat => "flat",
            ConstructionMethod::Position => "position",
            ConstructionMethod::Pairwise => "pairwise",
        }
    }
}

impl fmt::Display for ConstructionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstructionMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "flat" => Ok(ConstructionMethod::Flat),
            "position" => Ok(ConstructionMethod::Position),
            "pairwise" => Ok(ConstructionMethod::Pairwise),
            other => Err(format!("unknown constructor {other:?} (flat, position, pairwise)")),
        }
    }
}

/// How the pairwise lower bound is derived from a unit's best probability.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMode {
    /// `bound = factor * best probability`
    #[default]
    Relative,
    /// `bound = factor`
    Absolute,
}

impl FromStr for BoundMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "relative" => Ok(BoundMode::Relative),
            "absolute" => Ok(BoundMode::Absolute),
            other => Err(format!("unknown bound mode {other:?} (relative, absolute)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseConfig {
    pub bound_factor: f64,
    pub max_iterations: usize,
    pub bound_mode: BoundMode,
}

impl Default for PairwiseConfig {
    fn default() -> Self {
        PairwiseConfig {
            bound_factor: 0.98,
            max_iterations: 10,
            bound_mode: BoundMode::Relative,
        }
    }
}

/// A constructed graph plus the I-node id assigned to each unit.
#[derive(Clone, Debug)]
pub struct Construction {
    pub graph: ArgumentGraph,
    pub inode_ids: BTreeMap<AduId, NodeId>,
}

struct Assembly<'a> {
    builder: GraphBuilder,
    ids: BTreeMap<AduId, NodeId>,
    mc: AduId,
    /// Non-major-claim units in document order.
    pool: Vec<&'a Adu>,
    relations: &'a RelationMatrix,
}

impl<'a> Assembly<'a> {
    fn begin(major_claim: &'a Adu, adus: &'a [Adu], relations: &'a RelationMatrix) -> Result<Self, ConstructError> {
        let mut seen = BTreeSet::new();
        for a in adus {
            if a.id() == major_claim.id() {
                return Err(ConstructError::MajorClaimInPool(a.id()));
            }
            if !seen.insert(a.id()) {
                return Err(ConstructError::DuplicateAdu(a.id()));
            }
        }
        let mut pool: Vec<&Adu> = adus.iter().collect();
        pool.sort_by_key(|a| a.id());
        let mut all = pool.clone();
        all.push(major_claim);
        all.sort_by_key(|a| a.id());

        let mut builder = GraphBuilder::new();
        let mut ids = BTreeMap::new();
        for a in all {
            let id = builder.inode(a.span.text.clone(), Some((a.span.start, a.span.end)));
            ids.insert(a.id(), id);
        }
        builder.set_major_claim(ids[&major_claim.id()].clone());
        Ok(Assembly {
            builder,
            ids,
            mc: major_claim.id(),
            pool,
            relations,
        })
    }

    fn link(&mut self, child: AduId, parent: AduId) {
        let (stance, probability) = match self.relations.get(child, parent) {
            Some(p) => (p.stance, Some(p.probability)),
            None => (Stance::Support, None),
        };
        self.link_with(child, stance, probability, parent);
    }

    fn link_with(&mut self, child: AduId, stance: Stance, probability: Option<f64>, parent: AduId) {
        let c = self.ids[&child].clone();
        let p = self.ids[&parent].clone();
        self.builder.link(&c, stance, probability, &p);
    }

    fn finish(self) -> Result<Construction, ConstructError> {
        Ok(Construction {
            graph: self.builder.build()?,
            inode_ids: self.ids,
        })
    }
}

/// Links every unit straight to the major claim.
pub fn flat_tree(major_claim: &Adu, adus: &[Adu], relations: &RelationMatrix) -> Result<Construction, ConstructError> {
    let mut asm = Assembly::begin(major_claim, adus, relations)?;
    let mc = asm.mc;
    for id in asm.pool.iter().map(|a| a.id()).collect::<Vec<_>>() {
        asm.link(id, mc);
    }
    asm.finish()
}

/// Claims link to the major claim; each premise links to the claim with the
/// smallest sentence distance (earlier claim on ties), or to the major claim
/// when there are no claims.
pub fn adu_position(major_claim: &Adu, adus: &[Adu], relations: &RelationMatrix) -> Result<Construction, ConstructError> {
    let mut asm = Assembly::begin(major_claim, adus, relations)?;
    let mc = asm.mc;
    let claims: Vec<AduId> = asm.pool.iter().filter(|a| a.role.is_claim()).map(|a| a.id()).collect();
    let premises: Vec<AduId> = asm.pool.iter().filter(|a| !a.role.is_claim()).map(|a| a.id()).collect();
    for &c in &claims {
        asm.link(c, mc);
    }
    for p in premises {
        // claims are sorted, so min_by_key keeps the earlier one on ties
        let parent = claims.iter().copied().min_by_key(|&c| c.abs_diff(p)).unwrap_or(mc);
        asm.link(p, parent);
    }
    asm.finish()
}

/// Probability-driven construction.
///
/// Each unit gets a lower bound derived from its best outgoing prediction.
/// Units whose prediction toward the major claim reaches their bound attach
/// to it; if none does, the first unit is attached anyway. Then, pass by
/// pass in document order, every unplaced unit attaches to all placed
/// I-nodes it reaches its bound for, so a unit may get several parents.
/// Whatever is left after `max_iterations` passes is attached to the major
/// claim with a support S-node.
pub fn pairwise(
    major_claim: &Adu,
    adus: &[Adu],
    relations: &RelationMatrix,
    config: &PairwiseConfig,
) -> Result<Construction, ConstructError> {
    if !(config.bound_factor > 0.0 && config.bound_factor <= 1.0) {
        return Err(ConstructError::BadBoundFactor(config.bound_factor));
    }
    if config.max_iterations == 0 {
        return Err(ConstructError::NoIterations);
    }
    let mut asm = Assembly::begin(major_claim, adus, relations)?;
    let mc = asm.mc;
    let order: Vec<AduId> = asm.pool.iter().map(|a| a.id()).collect();
    let all_nodes: Vec<AduId> = asm.ids.keys().copied().collect();

    let score = |from: AduId, to: AduId| relations.get(from, to).map(|p| p.probability);
    let bound: BTreeMap<AduId, f64> = order
        .iter()
        .map(|&a| {
            let best = all_nodes
                .iter()
                .filter(|&&b| b != a)
                .filter_map(|&b| score(a, b))
                .fold(0.0f64, f64::max);
            let l = match config.bound_mode {
                BoundMode::Relative => config.bound_factor * best,
                BoundMode::Absolute => config.bound_factor,
            };
            (a, l)
        })
        .collect();

    let mut placed: Vec<AduId> = vec![mc];
    let mut unplaced: Vec<AduId> = Vec::new();
    for &a in &order {
        if score(a, mc).is_some_and(|p| p >= bound[&a]) {
            asm.link(a, mc);
            placed.push(a);
        } else {
            unplaced.push(a);
        }
    }
    if placed.len() == 1 && !unplaced.is_empty() {
        let a = unplaced.remove(0);
        asm.link(a, mc);
        placed.push(a);
    }

    for _ in 0..config.max_iterations {
        if unplaced.is_empty() {
            break;
        }
        let mut progressed = false;
        let mut still = Vec::new();
        for a in std::mem::take(&mut unplaced) {
            let parents: Vec<AduId> = placed
                .iter()
                .copied()
                .filter(|&p| score(a, p).is_some_and(|s| s >= bound[&a]))
                .collect();
            if parents.is_empty() {
                still.push(a);
                continue;
            }
            for p in parents {
                asm.link(a, p);
            }
            placed.push(a);
            progressed = true;
        }
        unplaced = still;
        if !progressed {
            break;
        }
    }

    for a in unplaced {
        asm.link_with(a, Stance::Support, None, mc);
    }
    asm.finish()
}

/// Runs the named constructor.
pub fn build(
    method: ConstructionMethod,
    major_claim: &Adu,
    adus: &[Adu],
    relations: &RelationMatrix,
    pairwise_config: &PairwiseConfig,
) -> Result<Construction, ConstructError> {
    match method {
        ConstructionMethod::Flat => flat_tree(major_claim, adus, relations),
        ConstructionMethod::Position => adu_position(major_claim, adus, relations),
        ConstructionMethod::Pairwise => pairwise(major_claim, adus, relations, pairwise_config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segment::SentenceSpan;
    use crate::Role;

    fn adu(index: usize, role: Role) -> Adu {
        Adu::new(
            SentenceSpan {
                index,
                start: index * 20,
                end: index * 20 + 10,
                text: format!("Sentence number {index}."),
            },
            role,
            vec![index as f64, 1.0],
        )
    }

    fn pred(stance: Stance, probability: f64) -> RelationPrediction {
        RelationPrediction {
            stance,
            probability,
            neutral: false,
        }
    }

    fn parents_of(c: &Construction, unit: AduId) -> Vec<NodeId> {
        let id = &c.inode_ids[&unit];
        c.graph
            .triples()
            .into_iter()
            .filter(|(x, _, _)| *x == id)
            .map(|(_, _, z)| z.clone())
            .collect()
    }

    #[test]
    fn flat_counts() {
        let mc = adu(0, Role::MajorClaim);
        let adus = vec![adu(1, Role::Claim), adu(2, Role::Premise), adu(3, Role::Premise)];
        let c = flat_tree(&mc, &adus, &RelationMatrix::default()).unwrap();
        assert_eq!(c.graph.inodes().len(), 4);
        assert_eq!(c.graph.snodes().len(), 3);
        assert_eq!(c.graph.edges().len(), 6);
        assert_eq!(c.graph.depth().unwrap(), 2);

        let single = flat_tree(&mc, &[], &RelationMatrix::default()).unwrap();
        assert_eq!(single.graph.inodes().len(), 1);
        assert_eq!(single.graph.depth().unwrap(), 1);
    }

    #[test]
    fn flat_passes_stances_through() {
        let mc = adu(0, Role::MajorClaim);
        let adus = vec![adu(1, Role::Claim), adu(2, Role::Premise)];
        let mut r = RelationMatrix::default();
        r.insert(1, 0, pred(Stance::Support, 0.8)).unwrap();
        r.insert(2, 0, pred(Stance::Attack, 0.7)).unwrap();
        let c = flat_tree(&mc, &adus, &r).unwrap();
        let stances: Vec<Stance> = c.graph.snodes().iter().map(|s| s.stance).collect();
        assert_eq!(stances, vec![Stance::Support, Stance::Attack]);
        assert_eq!(c.graph.snodes()[1].probability, Some(0.7));
    }

    #[test]
    fn duplicate_and_pool_errors() {
        let mc = adu(0, Role::MajorClaim);
        let r = RelationMatrix::default();
        assert!(matches!(
            flat_tree(&mc, &[adu(1, Role::Claim), adu(1, Role::Claim)], &r),
            Err(ConstructError::DuplicateAdu(1))
        ));
        assert!(matches!(
            adu_position(&mc, &[adu(0, Role::Claim)], &r),
            Err(ConstructError::MajorClaimInPool(0))
        ));
    }

    #[test]
    fn position_nearest_claim() {
        let mc = adu(0, Role::MajorClaim);
        let adus = vec![adu(1, Role::Claim), adu(2, Role::Premise), adu(5, Role::Claim)];
        let c = adu_position(&mc, &adus, &RelationMatrix::default()).unwrap();
        assert_eq!(parents_of(&c, 2), vec![c.inode_ids[&1].clone()]);
        assert_eq!(c.graph.depth().unwrap(), 3);
    }

    #[test]
    fn position_tie_goes_to_earlier_claim() {
        let mc = adu(0, Role::MajorClaim);
        let adus = vec![adu(1, Role::Claim), adu(2, Role::Premise), adu(3, Role::Claim)];
        let c = adu_position(&mc, &adus, &RelationMatrix::default()).unwrap();
        assert_eq!(parents_of(&c, 2), vec![c.inode_ids[&1].clone()]);
    }

    #[test]
    fn position_without_claims() {
        let mc = adu(4, Role::MajorClaim);
        let adus = vec![adu(1, Role::Premise), adu(2, Role::Premise)];
        let c = adu_position(&mc, &adus, &RelationMatrix::default()).unwrap();
        for p in [1, 2] {
            assert_eq!(parents_of(&c, p), vec![c.inode_ids[&4].clone()]);
        }
        assert_eq!(c.graph.depth().unwrap(), 2);
        // I-nodes follow document order even though the major claim comes last
        assert_eq!(c.inode_ids[&1].as_str(), "1");
        assert_eq!(c.inode_ids[&4].as_str(), "3");
    }

    #[test]
    fn pairwise_above_bound_attaches_to_major_claim() {
        let mc = adu(0, Role::MajorClaim);
        let adus = vec![adu(1, Role::Claim), adu(2, Role::Claim)];
        let mut r = RelationMatrix::default();
        r.insert(1, 0, pred(Stance::Support, 0.99)).unwrap();
        r.insert(2, 0, pred(Stance::Support, 0.99)).unwrap();
        r.insert(1, 2, pred(Stance::Support, 0.6)).unwrap();
        r.insert(2, 1, pred(Stance::Attack, 0.6)).unwrap();
        let c = pairwise(&mc, &adus, &r, &PairwiseConfig::default()).unwrap();
        assert_eq!(parents_of(&c, 1), vec![c.inode_ids[&0].clone()]);
        assert_eq!(parents_of(&c, 2), vec![c.inode_ids[&0].clone()]);
    }

    #[test]
    fn pairwise_forces_first_unit_onto_major_claim() {
        let mc = adu(0, Role::MajorClaim);
        let adus = vec![adu(1, Role::Claim), adu(2, Role::Premise)];
        let mut r = RelationMatrix::default();
        r.insert(1, 0, pred(Stance::Attack, 0.5)).unwrap();
        r.insert(1, 2, pred(Stance::Support, 0.9)).unwrap();
        r.insert(2, 0, pred(Stance::Support, 0.5)).unwrap();
        r.insert(2, 1, pred(Stance::Support, 0.95)).unwrap();
        let c = pairwise(&mc, &adus, &r, &PairwiseConfig::default()).unwrap();
        assert_eq!(parents_of(&c, 1), vec![c.inode_ids[&0].clone()]);
        assert_eq!(c.graph.stances_between(&c.inode_ids[&1], &c.inode_ids[&0]), vec![Stance::Attack]);
        // second unit reaches its bound toward the now-placed first unit
        assert_eq!(parents_of(&c, 2), vec![c.inode_ids[&1].clone()]);
    }

    #[test]
    fn pairwise_leftovers_get_support_to_major_claim() {
        let mc = adu(0, Role::MajorClaim);
        let adus = vec![adu(1, Role::Claim), adu(2, Role::Premise), adu(3, Role::Premise)];
        let mut r = RelationMatrix::default();
        r.insert(1, 0, pred(Stance::Support, 0.5)).unwrap();
        // unit 3 only scores high toward unit 2, which never gets placed
        r.insert(2, 3, pred(Stance::Attack, 0.9)).unwrap();
        r.insert(3, 2, pred(Stance::Attack, 0.9)).unwrap();
        let c = pairwise(&mc, &adus, &r, &PairwiseConfig::default()).unwrap();
        for unit in [2, 3] {
            assert_eq!(parents_of(&c, unit), vec![c.inode_ids[&0].clone()]);
            assert_eq!(c.graph.stances_between(&c.inode_ids[&unit], &c.inode_ids[&0]), vec![Stance::Support]);
        }
        assert!(c.graph.validate().is_empty());
    }

    #[test]
    fn pairwise_multiple_parents() {
        let mc = adu(0, Role::MajorClaim);
        let adus = vec![adu(1, Role::Claim), adu(2, Role::Claim), adu(3, Role::Premise)];
        let mut r = RelationMatrix::default();
        r.insert(1, 0, pred(Stance::Support, 0.9)).unwrap();
        r.insert(2, 0, pred(Stance::Support, 0.9)).unwrap();
        r.insert(3, 0, pred(Stance::Support, 0.5)).unwrap();
        r.insert(3, 1, pred(Stance::Support, 0.8)).unwrap();
        r.insert(3, 2, pred(Stance::Attack, 0.79)).unwrap();
        let c = pairwise(&mc, &adus, &r, &PairwiseConfig::default()).unwrap();
        assert_eq!(parents_of(&c, 3).len(), 2);
    }

    #[test]
    fn pairwise_config_checks() {
        let mc = adu(0, Role::MajorClaim);
        let r = RelationMatrix::default();
        let bad = PairwiseConfig { bound_factor: 0.0, ..Default::default() };
        assert!(matches!(pairwise(&mc, &[], &r, &bad), Err(ConstructError::BadBoundFactor(_))));
        let bad = PairwiseConfig { max_iterations: 0, ..Default::default() };
        assert!(matches!(pairwise(&mc, &[], &r, &bad), Err(ConstructError::NoIterations)));
    }

    #[test]
    fn relation_matrix_rejects_diagonal_and_bad_probability() {
        let mut r = RelationMatrix::default();
        assert!(r.insert(1, 1, pred(Stance::Support, 0.5)).is_err());
        assert!(r.insert(1, 2, pred(Stance::Support, 1.5)).is_err());
        assert!(r.is_empty());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn constructors_keep_invariants(
                n in 0usize..15,
                probs in prop::collection::vec((0.5f64..=1.0, any::<bool>(), any::<bool>()), 256),
                claims in prop::collection::vec(any::<bool>(), 15),
                bound_factor in 0.5f64..=1.0,
                max_iterations in 1usize..6,
            ) {
                let mc = adu(n, Role::MajorClaim);
                let pool: Vec<Adu> = (0..n)
                    .map(|i| adu(i, if claims[i] { Role::Claim } else { Role::Premise }))
                    .collect();
                let mut relations = RelationMatrix::default();
                let mut k = 0;
                for a in 0..=n {
                    for b in 0..=n {
                        if a != b {
                            let (p, attack, neutral) = probs[k % probs.len()];
                            k += 1;
                            let stance = if attack { Stance::Attack } else { Stance::Support };
                            relations.insert(a, b, RelationPrediction { stance, probability: p, neutral }).unwrap();
                        }
                    }
                }
                let cfg = PairwiseConfig { bound_factor, max_iterations, ..Default::default() };
                for method in ConstructionMethod::ALL {
                    let c = build(method, &mc, &pool, &relations, &cfg).unwrap();
                    prop_assert!(c.graph.validate().is_empty());
                    prop_assert_eq!(c.graph.inodes().len(), n + 1);
                    prop_assert_eq!(c.inode_ids.len(), n + 1);
                    prop_assert_eq!(c.graph.major_claim(), Some(&c.inode_ids[&n]));
                    if method != ConstructionMethod::Pairwise {
                        for i in 0..n {
                            prop_assert_eq!(parents_of(&c, i).len(), 1);
                        }
                    }
                }
            }
        }
    }
}
