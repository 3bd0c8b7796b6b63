use serde::Serialize;

use super::vote::common_length;
use crate::error::{Error, Result};
use crate::treebank::ConstituentSet;

/// Which candidate a switching rule picked, with every candidate's score.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwitchDecision {
    pub chosen: usize,
    pub scores: Vec<f64>,
    /// Another candidate reached the winning score.
    pub tie: bool,
}

impl SwitchDecision {
    pub fn argmax(scores: Vec<f64>) -> Self {
        Self::pick(scores, |a, b| a > b)
    }

    pub fn argmin(scores: Vec<f64>) -> Self {
        Self::pick(scores, |a, b| a < b)
    }

    fn pick(scores: Vec<f64>, better: impl Fn(f64, f64) -> bool) -> Self {
        let mut chosen = 0;
        for (i, &s) in scores.iter().enumerate().skip(1) {
            if better(s, scores[chosen]) {
                chosen = i;
            }
        }
        let tie = scores
            .iter()
            .enumerate()
            .any(|(i, &s)| i != chosen && s == scores[chosen]);
        SwitchDecision { chosen, scores, tie }
    }
}

fn check(candidates: &[ConstituentSet]) -> Result<()> {
    if candidates.len() < 2 {
        return Err(Error::InvalidArgument("switching needs at least two candidates".into()));
    }
    common_length(candidates).map(|_| ())
}

/// Picks the candidate sharing the most constituents with the others.
pub fn similarity_switch(candidates: &[ConstituentSet]) -> Result<SwitchDecision> {
    check(candidates)?;
    let scores = candidates
        .iter()
        .enumerate()
        .map(|(i, a)| {
            candidates
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, b)| a.intersection_count(b) as f64)
                .sum()
        })
        .collect();
    Ok(SwitchDecision::argmax(scores))
}

/// Picks the candidate with the fewest mismatched constituents against the
/// others.
pub fn distance_switch(candidates: &[ConstituentSet]) -> Result<SwitchDecision> {
    check(candidates)?;
    let scores = candidates
        .iter()
        .map(|a| candidates.iter().map(|b| a.mismatch_count(b) as f64).sum())
        .collect();
    Ok(SwitchDecision::argmin(scores))
}

/// Similarity with a size penalty, Σ_{j≠i} m(i,j) − (n−2)·c(i)/2. Its argmax
/// is the distance switch's argmin.
pub fn penalized_similarity_switch(candidates: &[ConstituentSet]) -> Result<SwitchDecision> {
    let sim = similarity_switch(candidates)?;
    let n = candidates.len() as f64;
    let scores = sim
        .scores
        .iter()
        .zip(candidates)
        .map(|(m, c)| m - (n - 2.0) * c.len() as f64 / 2.0)
        .collect();
    Ok(SwitchDecision::argmax(scores))
}
