use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::corpus::{normalize, resample_indices, sentence_distribution, stream_rng, WeightScheme};
use super::{parse_sets, reference_sets, EnsembleMember};
use crate::error::{Error, Result};
use crate::treebank::{ConstituentSet, ParseTree};
use crate::weak_parser::Learner;

/// Which error the iteration's α measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaMode {
    /// Precision errors over correct mass.
    Precision,
    /// Recall errors over correct mass.
    Recall,
    /// All errors over correct mass.
    F,
    /// All errors over twice the correct mass.
    ConstAcc,
}

impl fmt::Display for AlphaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlphaMode::Precision => "precision",
            AlphaMode::Recall => "recall",
            AlphaMode::F => "f",
            AlphaMode::ConstAcc => "const-acc",
        })
    }
}

impl FromStr for AlphaMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "precision" => Ok(AlphaMode::Precision),
            "recall" => Ok(AlphaMode::Recall),
            "f" => Ok(AlphaMode::F),
            "const-acc" | "const_acc" => Ok(AlphaMode::ConstAcc),
            _ => Err(Error::InvalidArgument(format!("unknown alpha mode {s:?}"))),
        }
    }
}

/// How a boosted member's α becomes its vote.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VoteWeight {
    /// Vote with α itself.
    Alpha,
    /// Vote with ln(1/α), the usual AdaBoost weight.
    LogInvAlpha,
}

impl fmt::Display for VoteWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VoteWeight::Alpha => "alpha",
            VoteWeight::LogInvAlpha => "log-inv-alpha",
        })
    }
}

impl FromStr for VoteWeight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(VoteWeight::Alpha),
            "log-inv-alpha" => Ok(VoteWeight::LogInvAlpha),
            _ => Err(Error::InvalidArgument(format!("unknown vote weight {s:?}"))),
        }
    }
}

impl VoteWeight {
    pub fn weight(self, alpha: f64) -> f64 {
        match self {
            VoteWeight::Alpha => alpha,
            VoteWeight::LogInvAlpha => (1.0 / alpha).ln(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoostConfig {
    pub iterations: usize,
    pub alpha_mode: AlphaMode,
    pub backoff: bool,
    pub seed: u64,
    /// Initial distribution.
    pub scheme: WeightScheme,
    pub vote_weight: VoteWeight,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            iterations: 10,
            alpha_mode: AlphaMode::ConstAcc,
            backoff: true,
            seed: 0,
            scheme: WeightScheme::Uniform,
            vote_weight: VoteWeight::Alpha,
        }
    }
}

/// Distribution mass on correct constituents (`a`), precision errors (`b`)
/// and recall errors (`c`). Each sentence's weight is split evenly over the
/// union of its reference and hypothesis constituents.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct DecisionMasses {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl DecisionMasses {
    /// Share of the committed decisions that were wrong; 0 when nothing was
    /// committed.
    pub fn error(&self) -> f64 {
        let total = self.a + self.b + self.c;
        if total == 0.0 {
            0.0
        } else {
            (self.b + self.c) / total
        }
    }
}

pub fn decision_masses(
    weights: &[f64],
    hypotheses: &[ConstituentSet],
    references: &[ConstituentSet],
) -> Result<DecisionMasses> {
    if weights.len() != hypotheses.len() || weights.len() != references.len() {
        return Err(Error::InvalidArgument("weights, hypotheses and references differ in length".into()));
    }
    let mut m = DecisionMasses::default();
    for ((w, h), r) in weights.iter().zip(hypotheses).zip(references) {
        h.ensure_same_length(r)?;
        let a = h.intersection_count(r);
        let union = h.len() + r.len() - a;
        if union == 0 {
            continue;
        }
        let share = w / union as f64;
        m.a += share * a as f64;
        m.b += share * (h.len() - a) as f64;
        m.c += share * (r.len() - a) as f64;
    }
    Ok(m)
}

/// Raw α for `mode`; infinite or NaN when there is no correct mass.
pub fn alpha_for(mode: AlphaMode, m: &DecisionMasses) -> f64 {
    match mode {
        AlphaMode::Precision => m.b / m.a,
        AlphaMode::Recall => m.c / m.a,
        AlphaMode::F => (m.b + m.c) / m.a,
        AlphaMode::ConstAcc => (m.b + m.c) / (2.0 * m.a),
    }
}

/// Bounds applied to α before it is used.
pub const ALPHA_CLAMP: (f64, f64) = (1e-6, 1.0 - 1e-6);

pub fn clamp_alpha(alpha: f64) -> f64 {
    alpha.clamp(ALPHA_CLAMP.0, ALPHA_CLAMP.1)
}

/// The learner failed to be a weak learner when more than half of the
/// weighted decisions were wrong.
pub fn weak_learner_violation(error: f64) -> bool {
    error > 0.5
}

/// Next distribution: each correct constituent's share of its sentence's
/// weight is multiplied by α, wrong ones are left alone, then everything is
/// renormalized. A sentence with nothing to decide counts as correct.
pub fn update_weights(
    weights: &[f64],
    hypotheses: &[ConstituentSet],
    references: &[ConstituentSet],
    alpha: f64,
) -> Result<Vec<f64>> {
    let mut next = Vec::with_capacity(weights.len());
    for ((w, h), r) in weights.iter().zip(hypotheses).zip(references) {
        let a = h.intersection_count(r);
        let union = h.len() + r.len() - a;
        let factor = if union == 0 {
            alpha
        } else {
            (alpha * a as f64 + (union - a) as f64) / union as f64
        };
        next.push(w * factor);
    }
    normalize(next)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub masses: DecisionMasses,
    pub error: f64,
    pub alpha_raw: f64,
    pub alpha: f64,
    pub violation: bool,
    pub discarded: bool,
    pub reset: bool,
    pub note: String,
}

/// Distribution history of a boosting run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightLedger {
    /// `snapshots[t]` is the distribution used at iteration t+1; the last
    /// entry is the one left after the final iteration.
    pub snapshots: Vec<Vec<f64>>,
    /// Per sample, how many updates raised its weight.
    pub up_counts: Vec<usize>,
    pub records: Vec<IterationRecord>,
}

impl WeightLedger {
    pub fn resets(&self) -> usize {
        self.records.iter().filter(|r| r.reset).count()
    }

    pub fn discards(&self) -> usize {
        self.records.iter().filter(|r| r.discarded).count()
    }

    /// One row per iteration.
    pub fn csv(&self) -> String {
        let mut out = String::from("iteration,correct_mass,precision_mass,recall_mass,error,alpha_raw,alpha,violation,discarded,reset,note\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.iteration,
                r.masses.a,
                r.masses.b,
                r.masses.c,
                r.error,
                r.alpha_raw,
                r.alpha,
                r.violation,
                r.discarded,
                r.reset,
                r.note.replace(',', ";")
            );
        }
        out
    }

    /// Long format: one row per (snapshot, sample).
    pub fn weights_csv(&self) -> String {
        let mut out = String::from("snapshot,sample,weight,up_count\n");
        for (t, snap) in self.snapshots.iter().enumerate() {
            for (i, w) in snap.iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{}", t + 1, i, w, self.up_counts.get(i).copied().unwrap_or(0));
            }
        }
        out
    }
}

#[derive(Debug)]
pub struct Boosting<M> {
    /// Every trained member, discarded ones included.
    pub members: Vec<EnsembleMember<M>>,
    pub ledger: WeightLedger,
    /// Corpus indices drawn at each iteration.
    pub replicates: Vec<Vec<usize>>,
}

/// Boosts `learner` for `cfg.iterations` rounds.
///
/// Each round draws a replicate from the current distribution, trains on it,
/// parses the whole training corpus and reweights. With back-off on, a round
/// whose weighted error exceeds one half is thrown away and the distribution
/// goes back to its initial state; the round still counts. A round whose α is
/// negative or not finite is also thrown away, leaving the distribution as
/// it was.
pub fn boost<L: Learner>(corpus: &[ParseTree], learner: &L, cfg: &BoostConfig) -> Result<Boosting<L::Model>> {
    if cfg.iterations == 0 {
        return Err(Error::InvalidArgument("boosting needs at least one iteration".into()));
    }
    let initial = sentence_distribution(corpus, cfg.scheme)?.weights;
    let references = reference_sets(corpus)?;
    let mut d = initial.clone();
    let mut ledger = WeightLedger {
        snapshots: vec![d.clone()],
        up_counts: vec![0; corpus.len()],
        records: Vec::new(),
    };
    let mut members = Vec::new();
    let mut replicates = Vec::new();

    for t in 1..=cfg.iterations {
        let idx = resample_indices(&d, corpus.len(), &mut stream_rng(cfg.seed, t as u64))?;
        let sample: Vec<ParseTree> = idx.iter().map(|&i| corpus[i].clone()).collect();
        replicates.push(idx);
        let model = learner.train(&sample).map_err(|e| Error::Replicate {
            replicate: t,
            source: Box::new(e),
        })?;
        let hyps = parse_sets(learner, &model, corpus)?;
        let masses = decision_masses(&d, &hyps, &references)?;
        let error = masses.error();
        let violation = weak_learner_violation(error);
        let alpha_raw = alpha_for(cfg.alpha_mode, &masses);
        let mut record = IterationRecord {
            iteration: t,
            masses,
            error,
            alpha_raw,
            alpha: f64::NAN,
            violation,
            discarded: false,
            reset: false,
            note: String::new(),
        };

        if violation && cfg.backoff {
            record.discarded = true;
            record.reset = true;
            record.note = format!("weighted error {error:.6} > 0.5; member discarded and distribution reset");
            log::warn!("iteration {t}: {}", record.note);
            d = initial.clone();
        } else if !alpha_raw.is_finite() || alpha_raw < 0.0 {
            record.discarded = true;
            record.note = format!("degenerate alpha {alpha_raw}; member discarded");
            log::warn!("iteration {t}: {}", record.note);
        } else {
            let alpha = clamp_alpha(alpha_raw);
            record.alpha = alpha;
            if alpha != alpha_raw {
                record.note = format!("alpha clamped from {alpha_raw}");
            }
            let next = update_weights(&d, &hyps, &references, alpha)?;
            for (i, (new, old)) in next.iter().zip(&d).enumerate() {
                if new > old {
                    ledger.up_counts[i] += 1;
                }
            }
            d = next;
        }
        log::info!("iteration {t}: error {error:.4}, alpha {:.6}", record.alpha);

        let alpha = record.alpha;
        members.push(EnsembleMember {
            model,
            alpha,
            vote_weight: if record.discarded { 0.0 } else { cfg.vote_weight.weight(alpha) },
            iteration: t,
            error: Some(error),
            discarded: record.discarded.then(|| record.note.clone()),
        });
        ledger.records.push(record);
        ledger.snapshots.push(d.clone());
    }
    Ok(Boosting {
        members,
        ledger,
        replicates,
    })
}
