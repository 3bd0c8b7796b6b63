use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::treebank::{Constituent, ConstituentSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VoteConfig {
    pub threshold: usize,
    pub k: usize,
}

impl VoteConfig {
    pub fn new(threshold: usize, k: usize) -> Result<Self> {
        if threshold == 0 || threshold > k {
            return Err(Error::InvalidArgument(format!(
                "vote threshold {threshold} must lie in 1..={k}"
            )));
        }
        Ok(VoteConfig { threshold, k })
    }

    /// Smallest threshold that is strictly more than half of `k`.
    pub fn majority(k: usize) -> Self {
        VoteConfig {
            threshold: k / 2 + 1,
            k: k.max(1),
        }
    }
}

pub(crate) fn common_length(sets: &[ConstituentSet]) -> Result<usize> {
    let first = sets
        .first()
        .ok_or_else(|| Error::InvalidArgument("no parses to combine".into()))?;
    for s in &sets[1..] {
        first.ensure_same_length(s)?;
    }
    Ok(first.length)
}

/// Number of sets proposing each constituent of the union.
pub fn vote_counts(sets: &[ConstituentSet]) -> BTreeMap<&Constituent, usize> {
    let mut counts = BTreeMap::new();
    for s in sets {
        for c in s.iter() {
            *counts.entry(c).or_insert(0) += 1;
        }
    }
    counts
}

pub fn constituent_vote(sets: &[ConstituentSet], cfg: VoteConfig) -> Result<ConstituentSet> {
    let length = common_length(sets)?;
    if sets.len() != cfg.k {
        return Err(Error::EnsembleSize {
            expected: cfg.k,
            found: sets.len(),
        });
    }
    let mut out = ConstituentSet::new(length).with_id(sets[0].sentence_id);
    out.items.extend(
        vote_counts(sets)
            .into_iter()
            .filter(|&(_, n)| n >= cfg.threshold)
            .map(|(c, _)| c.clone()),
    );
    Ok(out)
}

/// Keeps constituents whose summed member weight is strictly more than half
/// the total weight.
pub fn weighted_vote(sets: &[ConstituentSet], weights: &[f64]) -> Result<ConstituentSet> {
    let length = common_length(sets)?;
    if sets.len() != weights.len() {
        return Err(Error::EnsembleSize {
            expected: weights.len(),
            found: sets.len(),
        });
    }
    let half = weights.iter().sum::<f64>() / 2.0;
    let mut mass: BTreeMap<&Constituent, f64> = BTreeMap::new();
    for (s, w) in sets.iter().zip(weights) {
        for c in s.iter() {
            *mass.entry(c).or_insert(0.0) += w;
        }
    }
    let mut out = ConstituentSet::new(length).with_id(sets[0].sentence_id);
    out.items
        .extend(mass.into_iter().filter(|&(_, m)| m > half).map(|(c, _)| c.clone()));
    Ok(out)
}

/// `Ok` when every pair of spans is nested or disjoint, else the first
/// crossing pair.
pub fn check_no_crossing(set: &ConstituentSet) -> std::result::Result<(), (Constituent, Constituent)> {
    match set.find_crossing() {
        None => Ok(()),
        Some(pair) => Err(pair),
    }
}
