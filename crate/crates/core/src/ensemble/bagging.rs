use rayon::prelude::*;

use super::corpus::{resample_indices, sentence_distribution, stream_rng, WeightScheme};
use super::EnsembleMember;
use crate::error::{Error, Result};
use crate::treebank::ParseTree;
use crate::weak_parser::Learner;

#[derive(Debug)]
pub struct Bagging<M> {
    pub members: Vec<EnsembleMember<M>>,
    /// Corpus indices drawn for each replicate.
    pub replicates: Vec<Vec<usize>>,
}

/// Trains `k` parsers on bootstrap replicates drawn by `scheme`. All members
/// vote with weight 1, so the final hypothesis is a strict-majority vote.
///
/// Replicate r draws from its own stream of the `seed` generator, so results
/// do not depend on scheduling.
pub fn bag<L: Learner>(
    corpus: &[ParseTree],
    learner: &L,
    k: usize,
    scheme: WeightScheme,
    seed: u64,
) -> Result<Bagging<L::Model>> {
    if k == 0 {
        return Err(Error::InvalidArgument("bagging needs k >= 1".into()));
    }
    let wc = sentence_distribution(corpus, scheme)?;
    let replicates: Vec<Vec<usize>> = (0..k)
        .map(|r| resample_indices(&wc.weights, corpus.len(), &mut stream_rng(seed, r as u64)))
        .collect::<Result<_>>()?;
    let members = replicates
        .par_iter()
        .enumerate()
        .map(|(r, idx)| {
            let sample: Vec<ParseTree> = idx.iter().map(|&i| corpus[i].clone()).collect();
            log::info!("training bagging replicate {} of {k}", r + 1);
            let model = learner.train(&sample).map_err(|e| Error::Replicate {
                replicate: r + 1,
                source: Box::new(e),
            })?;
            Ok(EnsembleMember {
                model,
                alpha: 1.0,
                vote_weight: 1.0,
                iteration: r + 1,
                error: None,
                discarded: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Bagging { members, replicates })
}
