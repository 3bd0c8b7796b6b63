//! Bagging and boosting a parser induction procedure, plus the corpus
//! diagnostics that fall out of boosting.

mod bagging;
mod boosting;
mod corpus;
mod diagnostics;
mod simulation;

use rayon::prelude::*;

use crate::combiner::weighted_vote;
use crate::error::{Error, Result};
use crate::treebank::{evalb_transform, ConstituentSet, ParseTree};
use crate::weak_parser::{hypothesis_set, Learner};

pub use bagging::{bag, Bagging};
pub use boosting::{
    alpha_for, boost, clamp_alpha, decision_masses, update_weights, weak_learner_violation, AlphaMode, BoostConfig,
    Boosting, DecisionMasses, IterationRecord, VoteWeight, WeightLedger, ALPHA_CLAMP,
};
pub use corpus::{
    resample, resample_indices, sentence_distribution, stream_rng, unique_types, WeightScheme, WeightedCorpus,
};
pub use diagnostics::{diagnose_weights, memorization_check, MemorizationReport, WeightDiagnostics};
pub use simulation::{simulate, simulation_csv, simulation_ledger, SimulationRow};

/// One trained parser in an ensemble.
#[derive(Debug)]
pub struct EnsembleMember<M> {
    pub model: M,
    /// The iteration's α; 1 for bagging.
    pub alpha: f64,
    /// Weight of this member's vote in the final hypothesis.
    pub vote_weight: f64,
    /// 1-based iteration or replicate number.
    pub iteration: usize,
    /// Weighted constituent-decision error on the training corpus, when
    /// measured.
    pub error: Option<f64>,
    /// Why the member was dropped from voting, if it was.
    pub discarded: Option<String>,
}

impl<M> EnsembleMember<M> {
    pub fn retained(&self) -> bool {
        self.discarded.is_none()
    }
}

/// Reference constituent sets of a corpus.
pub fn reference_sets(corpus: &[ParseTree]) -> Result<Vec<ConstituentSet>> {
    corpus
        .iter()
        .enumerate()
        .map(|(i, t)| match evalb_transform(t) {
            Ok((set, _)) => Ok(set.with_id(i)),
            Err(Error::EmptyAfterPruning) => Ok(ConstituentSet::new(0).with_id(i)),
            Err(e) => Err(e),
        })
        .collect()
}

/// Parses every sentence of `corpus` with one model and scores the output
/// against the gold tokens.
pub fn parse_sets<L: Learner>(learner: &L, model: &L::Model, corpus: &[ParseTree]) -> Result<Vec<ConstituentSet>> {
    let sentences: Vec<_> = corpus.iter().map(ParseTree::sentence).collect();
    let parses = learner.parse_batch(model, &sentences)?;
    parses
        .iter()
        .zip(&sentences)
        .enumerate()
        .map(|(i, (p, s))| hypothesis_set(p.as_ref(), s).map(|set| set.with_id(i)))
        .collect()
}

/// Per-member hypothesis sets for every retained member, in member order.
pub fn member_sets<L: Learner>(
    learner: &L,
    members: &[EnsembleMember<L::Model>],
    corpus: &[ParseTree],
) -> Result<Vec<Vec<ConstituentSet>>> {
    members
        .par_iter()
        .filter(|m| m.retained())
        .map(|m| parse_sets(learner, &m.model, corpus))
        .collect()
}

/// Weighted constituent vote across members, sentence by sentence.
pub fn combine_members(per_member: &[Vec<ConstituentSet>], weights: &[f64]) -> Result<Vec<ConstituentSet>> {
    let first = per_member
        .first()
        .ok_or_else(|| Error::InvalidArgument("ensemble has no voting members".into()))?;
    (0..first.len())
        .map(|s| {
            let sets: Vec<ConstituentSet> = per_member.iter().map(|m| m[s].clone()).collect();
            weighted_vote(&sets, weights)
        })
        .collect()
}

/// Final hypotheses of an ensemble: retained members vote with their vote
/// weights and constituents with more than half the total weight are kept.
pub fn ensemble_sets<L: Learner>(
    learner: &L,
    members: &[EnsembleMember<L::Model>],
    corpus: &[ParseTree],
) -> Result<Vec<ConstituentSet>> {
    let weights: Vec<f64> = members.iter().filter(|m| m.retained()).map(|m| m.vote_weight).collect();
    combine_members(&member_sets(learner, members, corpus)?, &weights)
}
