use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::treebank::ParseTree;

/// How initial sentence weights are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightScheme {
    Uniform,
    /// Proportional to sentence length.
    Length,
    /// Proportional to s(s+1), the number of spans a sentence of length s has.
    Possibilities,
    /// Proportional to 1/s, favouring short sentences.
    InverseLength,
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightScheme::Uniform => "uniform",
            WeightScheme::Length => "length",
            WeightScheme::Possibilities => "possibilities",
            WeightScheme::InverseLength => "inverse",
        })
    }
}

impl FromStr for WeightScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(WeightScheme::Uniform),
            "length" => Ok(WeightScheme::Length),
            "possibilities" => Ok(WeightScheme::Possibilities),
            "inverse" | "inverse_length" | "inverse-length" => Ok(WeightScheme::InverseLength),
            _ => Err(Error::InvalidArgument(format!("unknown weight scheme {s:?}"))),
        }
    }
}

/// Training samples with a probability distribution over them.
#[derive(Clone, Debug)]
pub struct WeightedCorpus {
    pub samples: Vec<ParseTree>,
    pub weights: Vec<f64>,
}

impl WeightedCorpus {
    /// Normalizes `weights`, which must be nonnegative with a positive sum.
    pub fn new(samples: Vec<ParseTree>, weights: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("a weighted corpus needs at least one sample".into()));
        }
        if samples.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} samples",
                weights.len(),
                samples.len()
            )));
        }
        let weights = normalize(weights)?;
        Ok(WeightedCorpus { samples, weights })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

pub(crate) fn normalize(mut weights: Vec<f64>) -> Result<Vec<f64>> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidArgument("weights sum to zero".into()));
    }
    for w in &mut weights {
        *w /= total;
    }
    Ok(weights)
}

pub fn sentence_distribution(corpus: &[ParseTree], scheme: WeightScheme) -> Result<WeightedCorpus> {
    let mut weights = Vec::with_capacity(corpus.len());
    for (i, tree) in corpus.iter().enumerate() {
        let s = tree.sentence().len();
        if s == 0 {
            return Err(Error::InvalidArgument(format!("sentence {i} has no words")));
        }
        let s = s as f64;
        weights.push(match scheme {
            WeightScheme::Uniform => 1.0,
            WeightScheme::Length => s,
            WeightScheme::Possibilities => s * (s + 1.0),
            WeightScheme::InverseLength => 1.0 / s,
        });
    }
    WeightedCorpus::new(corpus.to_vec(), weights)
}

/// Generator for one replicate or iteration, split from the run seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `m` sample indices with replacement according to `weights`.
pub fn resample_indices(weights: &[f64], m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    if m == 0 {
        return Err(Error::InvalidArgument("replicate size must be at least 1".into()));
    }
    let dist = WeightedIndex::new(weights).map_err(|e| Error::InvalidArgument(format!("bad distribution: {e}")))?;
    Ok((0..m).map(|_| dist.sample(rng)).collect())
}

/// `m` draws from `wc`, deterministic in `seed`.
pub fn resample(wc: &WeightedCorpus, m: usize, seed: u64) -> Result<Vec<ParseTree>> {
    let idx = resample_indices(&wc.weights, m, &mut stream_rng(seed, 0))?;
    Ok(idx.into_iter().map(|i| wc.samples[i].clone()).collect())
}

/// Number of distinct sentences in each replicate.
pub fn unique_types(replicates: &[Vec<ParseTree>]) -> Vec<usize> {
    replicates
        .iter()
        .map(|r| r.iter().map(|t| t.words().join(" ")).collect::<HashSet<_>>().len())
        .collect()
}
