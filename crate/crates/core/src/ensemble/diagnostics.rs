use std::fmt::Write as _;

use rayon::prelude::*;

use super::boosting::WeightLedger;
use super::parse_sets;
use super::reference_sets;
use crate::error::{Error, Result};
use crate::metrics::score;
use crate::treebank::ParseTree;
use crate::weak_parser::Learner;

#[derive(Clone, Debug)]
pub struct MemorizationReport {
    /// Indices of samples the learner cannot reproduce when trained on them
    /// alone.
    pub unlearnable: Vec<usize>,
    /// F-measure of each sample against its own single-sentence model.
    pub f_measures: Vec<f64>,
    /// The corpus with the unlearnable samples removed.
    pub trimmed: Vec<ParseTree>,
}

/// Trains on each sample alone (repeated `replication` times), parses it
/// back, and reports the samples that do not come back with F = 1.
pub fn memorization_check<L: Learner>(
    corpus: &[ParseTree],
    learner: &L,
    replication: usize,
) -> Result<MemorizationReport> {
    if replication == 0 {
        return Err(Error::InvalidArgument("replication must be at least 1".into()));
    }
    let references = reference_sets(corpus)?;
    let f_measures = corpus
        .par_iter()
        .zip(&references)
        .map(|(tree, reference)| {
            let single = std::slice::from_ref(tree);
            let model = learner.train(&vec![tree.clone(); replication])?;
            let guess = parse_sets(learner, &model, single)?.remove(0);
            Ok(score(&guess, reference)?.f_measure())
        })
        .collect::<Result<Vec<f64>>>()?;
    let unlearnable: Vec<usize> = f_measures
        .iter()
        .enumerate()
        .filter(|(_, &f)| f < 1.0)
        .map(|(i, _)| i)
        .collect();
    let trimmed = corpus
        .iter()
        .enumerate()
        .filter(|(i, _)| unlearnable.binary_search(i).is_err())
        .map(|(_, t)| t.clone())
        .collect();
    Ok(MemorizationReport {
        unlearnable,
        f_measures,
        trimmed,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightDiagnostics {
    /// Bin count after clamping to the corpus size.
    pub bins: usize,
    /// Per snapshot, the mean weight in each bin of samples ranked by
    /// descending weight.
    pub bin_means: Vec<Vec<f64>>,
    /// Heaviest samples of the last snapshot as (sample, weight), heaviest
    /// first.
    pub heaviest: Vec<(usize, f64)>,
}

impl WeightDiagnostics {
    /// Long format, ready for a log-x plot of rank bin against mass.
    pub fn bins_csv(&self) -> String {
        let mut out = String::from("snapshot,bin,mean_weight\n");
        for (t, means) in self.bin_means.iter().enumerate() {
            for (b, m) in means.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", t + 1, b + 1, m);
            }
        }
        out
    }

    pub fn heaviest_csv(&self, corpus: Option<&[ParseTree]>) -> String {
        let mut out = String::from("rank,sample,weight,tree\n");
        for (rank, (i, w)) in self.heaviest.iter().enumerate() {
            let tree = corpus
                .and_then(|c| c.get(*i))
                .map(|t| format!("\"{}\"", t.to_string().replace('"', "\"\"")))
                .unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", rank + 1, i, w, tree);
        }
        out
    }
}

fn ranked(weights: &[f64]) -> Vec<(usize, f64)> {
    let mut r: Vec<(usize, f64)> = weights.iter().copied().enumerate().collect();
    r.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    r
}

/// Bins samples by weight rank for each snapshot, and lists the `top`
/// heaviest samples of the last one. More bins than samples are clamped.
pub fn diagnose_weights(ledger: &WeightLedger, bins: usize, top: usize) -> Result<WeightDiagnostics> {
    let last = ledger
        .snapshots
        .last()
        .ok_or_else(|| Error::InvalidArgument("ledger has no snapshots".into()))?;
    let m = last.len();
    if bins == 0 || m == 0 {
        return Err(Error::InvalidArgument("need at least one bin and one sample".into()));
    }
    let bins = bins.min(m);
    let bin_means = ledger
        .snapshots
        .iter()
        .map(|snap| {
            let r = ranked(snap);
            (0..bins)
                .map(|b| {
                    let (lo, hi) = (b * m / bins, (b + 1) * m / bins);
                    r[lo..hi].iter().map(|x| x.1).sum::<f64>() / (hi - lo) as f64
                })
                .collect()
        })
        .collect();
    let heaviest = ranked(last).into_iter().take(top).collect();
    Ok(WeightDiagnostics {
        bins,
        bin_means,
        heaviest,
    })
}
