//! Naive Bayes hybridization and switching.
//!
//! Each candidate constituent `c` is an event with a hidden class π(c) (is it
//! in the reference?) and one observed vote M_i per parser. The model keeps raw
//! counts; probabilities are Lidstone-smoothed on demand:
//!
//! ```text
//! P(π = v)          = (C(v) + λ) / (N + 2λ)
//! P(M_i = m | π = v) = (C_i(m, v) + λ) / (C(v) + 2λ)
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use super::switch::SwitchDecision;
use super::vote::common_length;
use crate::error::{Error, Result};
use crate::metrics::length_bucket;
use crate::treebank::{Constituent, ConstituentSet};

const MODEL_HEADER: &str = "parse-ensemble-bayes 1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BayesKind {
    Plain,
    /// Every probability is conditioned on the joint context value.
    Coprediction,
    /// Each context contributes an extra P(T | π) factor.
    IndependentContext,
}

impl BayesKind {
    fn name(self) -> &'static str {
        match self {
            BayesKind::Plain => "plain",
            BayesKind::Coprediction => "coprediction",
            BayesKind::IndependentContext => "independent",
        }
    }
}

impl FromStr for BayesKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(BayesKind::Plain),
            "coprediction" => Ok(BayesKind::Coprediction),
            "independent" | "independent_context" => Ok(BayesKind::IndependentContext),
            _ => Err(Error::InvalidArgument(format!("unknown Bayes model kind {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ContextFeature {
    Label,
    ParentLabel,
    SpanLength,
    SentenceLength,
}

impl ContextFeature {
    pub fn name(self) -> &'static str {
        match self {
            ContextFeature::Label => "tag",
            ContextFeature::ParentLabel => "parenttag",
            ContextFeature::SpanLength => "clength",
            ContextFeature::SentenceLength => "slength",
        }
    }

    /// Parses a comma-separated list such as `tag,clength`.
    pub fn parse_list(s: &str) -> Result<Vec<ContextFeature>> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse())
            .collect()
    }
}

impl FromStr for ContextFeature {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tag" | "label" => Ok(ContextFeature::Label),
            "parenttag" | "parent" => Ok(ContextFeature::ParentLabel),
            "clength" | "span" => Ok(ContextFeature::SpanLength),
            "slength" | "sentence" => Ok(ContextFeature::SentenceLength),
            _ => Err(Error::InvalidArgument(format!("unknown context {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BayesConfig {
    pub kind: BayesKind,
    pub lambda: f64,
    pub contexts: Vec<ContextFeature>,
}

impl Default for BayesConfig {
    fn default() -> Self {
        BayesConfig {
            kind: BayesKind::Plain,
            lambda: 1.0,
            contexts: Vec::new(),
        }
    }
}

/// Counts for one conditioning context. `parser[i][v][m]` counts events of
/// class `v` on which parser `i` voted `m`.
#[derive(Clone, Debug, Default, PartialEq)]
struct Table {
    class: [u64; 2],
    parser: Vec<[[u64; 2]; 2]>,
}

impl Table {
    fn new(k: usize) -> Self {
        Table {
            class: [0; 2],
            parser: vec![[[0; 2]; 2]; k],
        }
    }

    fn add(&mut self, class: bool, votes: &[bool]) {
        self.class[class as usize] += 1;
        for (p, &m) in self.parser.iter_mut().zip(votes) {
            p[class as usize][m as usize] += 1;
        }
    }

    fn merge(&mut self, other: &Table) {
        for v in 0..2 {
            self.class[v] += other.class[v];
        }
        for (a, b) in self.parser.iter_mut().zip(&other.parser) {
            for v in 0..2 {
                for m in 0..2 {
                    a[v][m] += b[v][m];
                }
            }
        }
    }

    fn total(&self) -> u64 {
        self.class[0] + self.class[1]
    }

    fn prior(&self, class: bool, lambda: f64) -> f64 {
        (self.class[class as usize] as f64 + lambda) / (self.total() as f64 + 2.0 * lambda)
    }

    fn conditional(&self, i: usize, class: bool, m: bool, lambda: f64) -> f64 {
        let v = class as usize;
        (self.parser[i][v][m as usize] as f64 + lambda) / (self.class[v] as f64 + 2.0 * lambda)
    }

    fn log_score(&self, class: bool, votes: &[bool], lambda: f64) -> f64 {
        let mut s = self.prior(class, lambda).ln();
        for (i, &m) in votes.iter().enumerate() {
            s += self.conditional(i, class, m, lambda).ln();
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BayesModel {
    pub kind: BayesKind,
    pub lambda: f64,
    pub k: usize,
    pub contexts: Vec<ContextFeature>,
    plain: Table,
    joint: BTreeMap<String, Table>,
    // Per context feature: value -> class counts.
    independent: Vec<BTreeMap<String, [u64; 2]>>,
}

fn context_values(
    c: &Constituent,
    sets: &[ConstituentSet],
    reference: Option<&ConstituentSet>,
    length: usize,
    features: &[ContextFeature],
) -> Vec<String> {
    features
        .iter()
        .map(|f| match f {
            ContextFeature::Label => c.label.clone(),
            ContextFeature::ParentLabel => sets
                .iter()
                .find(|s| s.contains(c))
                .or(reference)
                .map_or("TOP", |s| s.parent_label(c))
                .to_string(),
            ContextFeature::SpanLength => length_bucket(c.span_len()).to_string(),
            ContextFeature::SentenceLength => length_bucket(length).to_string(),
        })
        .collect()
}

fn universe(sets: &[ConstituentSet]) -> Vec<&Constituent> {
    let mut all: Vec<&Constituent> = sets.iter().flat_map(|s| s.iter()).collect();
    all.sort();
    all.dedup();
    all
}

impl BayesModel {
    fn empty(cfg: &BayesConfig, k: usize) -> Self {
        BayesModel {
            kind: cfg.kind,
            lambda: cfg.lambda,
            k,
            contexts: cfg.contexts.clone(),
            plain: Table::new(k),
            joint: BTreeMap::new(),
            independent: vec![BTreeMap::new(); cfg.contexts.len()],
        }
    }

    fn observe(&mut self, class: bool, votes: &[bool], ctx: &[String]) {
        self.plain.add(class, votes);
        match self.kind {
            BayesKind::Plain => {}
            BayesKind::Coprediction => {
                self.joint
                    .entry(ctx.join("|"))
                    .or_insert_with(|| Table::new(self.k))
                    .add(class, votes);
            }
            BayesKind::IndependentContext => {
                for (map, value) in self.independent.iter_mut().zip(ctx) {
                    map.entry(value.clone()).or_insert([0; 2])[class as usize] += 1;
                }
            }
        }
    }

    fn merge(mut self, other: BayesModel) -> BayesModel {
        self.plain.merge(&other.plain);
        for (key, t) in other.joint {
            self.joint
                .entry(key)
                .or_insert_with(|| Table::new(self.k))
                .merge(&t);
        }
        for (mine, theirs) in self.independent.iter_mut().zip(other.independent) {
            for (value, counts) in theirs {
                let e = mine.entry(value).or_insert([0; 2]);
                e[0] += counts[0];
                e[1] += counts[1];
            }
        }
        self
    }

    pub fn prior(&self, class: bool) -> f64 {
        self.plain.prior(class, self.lambda)
    }

    /// P(M_i = m | π = class) in the context-free model.
    pub fn conditional(&self, i: usize, class: bool, m: bool) -> f64 {
        self.plain.conditional(i, class, m, self.lambda)
    }

    /// Number of training events of each class, `[false, true]`.
    pub fn class_counts(&self) -> [u64; 2] {
        self.plain.class
    }

    /// Log of P(π = class, evidence) up to a constant shared by both classes.
    fn log_score(&self, class: bool, votes: &[bool], ctx: &[String]) -> f64 {
        match self.kind {
            BayesKind::Plain => self.plain.log_score(class, votes, self.lambda),
            BayesKind::Coprediction => match self.joint.get(&ctx.join("|")) {
                Some(t) => t.log_score(class, votes, self.lambda),
                None => self.plain.log_score(class, votes, self.lambda),
            },
            BayesKind::IndependentContext => {
                let mut s = self.plain.log_score(class, votes, self.lambda);
                let v = class as usize;
                for (map, value) in self.independent.iter().zip(ctx) {
                    let seen = map.get(value).map_or(0, |c| c[v]);
                    // One extra slot reserves mass for unseen values.
                    let values = map.len() as f64 + 1.0;
                    s += ((seen as f64 + self.lambda)
                        / (self.plain.class[v] as f64 + self.lambda * values))
                        .ln();
                }
                s
            }
        }
    }

    fn check_size(&self, sets: &[ConstituentSet]) -> Result<usize> {
        if sets.len() != self.k {
            return Err(Error::EnsembleSize {
                expected: self.k,
                found: sets.len(),
            });
        }
        common_length(sets)
    }

    /// Log scores `(false, true)` for one candidate constituent.
    pub fn class_scores(&self, c: &Constituent, sets: &[ConstituentSet]) -> Result<(f64, f64)> {
        let length = self.check_size(sets)?;
        Ok(self.scores_unchecked(c, sets, length))
    }

    fn scores_unchecked(&self, c: &Constituent, sets: &[ConstituentSet], length: usize) -> (f64, f64) {
        let votes: Vec<bool> = sets.iter().map(|s| s.contains(c)).collect();
        let ctx = context_values(c, sets, None, length, &self.contexts);
        (self.log_score(false, &votes, &ctx), self.log_score(true, &votes, &ctx))
    }

    /// Versioned text dump of the counts.
    pub fn save(&self) -> String {
        let mut out = format!("{MODEL_HEADER}\n");
        let _ = writeln!(out, "kind {}", self.kind.name());
        let _ = writeln!(out, "lambda {}", self.lambda);
        let _ = writeln!(out, "parsers {}", self.k);
        let names: Vec<&str> = self.contexts.iter().map(|c| c.name()).collect();
        let _ = writeln!(out, "contexts {}", if names.is_empty() { "-".into() } else { names.join(",") });
        let mut table = |key: &str, t: &Table| {
            let _ = writeln!(out, "class {key} {} {}", t.class[0], t.class[1]);
            for (i, p) in t.parser.iter().enumerate() {
                let _ = writeln!(out, "parser {key} {i} {} {} {} {}", p[0][0], p[0][1], p[1][0], p[1][1]);
            }
        };
        table("*", &self.plain);
        for (key, t) in &self.joint {
            table(key, t);
        }
        for (f, map) in self.contexts.iter().zip(&self.independent) {
            for (value, c) in map {
                let _ = writeln!(out, "context {} {value} {} {}", f.name(), c[0], c[1]);
            }
        }
        out
    }

    pub fn load(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::ModelFormat(msg);
        let mut lines = text.lines();
        if lines.next() != Some(MODEL_HEADER) {
            return Err(bad("missing or unsupported header".into()));
        }
        let mut field = |name: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(format!("missing {name}")))?;
            line.strip_prefix(name)
                .and_then(|r| r.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| bad(format!("expected {name}, got {line:?}")))
        };
        let kind: BayesKind = field("kind")?.parse()?;
        let lambda: f64 = field("lambda")?.parse().map_err(|_| bad("bad lambda".into()))?;
        let k: usize = field("parsers")?.parse().map_err(|_| bad("bad parser count".into()))?;
        let contexts_field = field("contexts")?;
        let contexts = if contexts_field == "-" {
            Vec::new()
        } else {
            ContextFeature::parse_list(&contexts_field)?
        };
        let cfg = BayesConfig { kind, lambda, contexts };
        check_lambda(lambda)?;
        let mut model = BayesModel::empty(&cfg, k);
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad(format!("bad count {s:?}")));
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["class", key, f, t] => {
                    let table = if *key == "*" {
                        &mut model.plain
                    } else {
                        model.joint.entry(key.to_string()).or_insert_with(|| Table::new(k))
                    };
                    table.class = [num(f)?, num(t)?];
                }
                ["parser", key, i, a, b, c, d] => {
                    let table = if *key == "*" {
                        &mut model.plain
                    } else {
                        model.joint.entry(key.to_string()).or_insert_with(|| Table::new(k))
                    };
                    let i: usize = i.parse().map_err(|_| bad(format!("bad parser index {i:?}")))?;
                    let slot = table
                        .parser
                        .get_mut(i)
                        .ok_or_else(|| bad(format!("parser index {i} out of range")))?;
                    *slot = [[num(a)?, num(b)?], [num(c)?, num(d)?]];
                }
                ["context", name, value, f, t] => {
                    let feature: ContextFeature = name.parse()?;
                    let pos = model
                        .contexts
                        .iter()
                        .position(|c| *c == feature)
                        .ok_or_else(|| bad(format!("context {name} not declared")))?;
                    model.independent[pos].insert(value.to_string(), [num(f)?, num(t)?]);
                }
                _ => return Err(bad(format!("unrecognised line {line:?}"))),
            }
        }
        Ok(model)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "smoothing λ must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

/// Counts votes over each training sentence. The event universe is the union
/// of the parsers' constituents and the reference's.
pub fn bayes_train(
    data: &[(Vec<ConstituentSet>, ConstituentSet)],
    cfg: &BayesConfig,
) -> Result<BayesModel> {
    check_lambda(cfg.lambda)?;
    let k = data
        .first()
        .map(|(p, _)| p.len())
        .ok_or_else(|| Error::InvalidArgument("no training sentences".into()))?;
    if k == 0 {
        return Err(Error::InvalidArgument("training sentences carry no parses".into()));
    }
    if cfg.kind != BayesKind::Plain && cfg.contexts.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{} model needs at least one context",
            cfg.kind.name()
        )));
    }
    data.par_iter()
        .map(|(parsers, reference)| -> Result<BayesModel> {
            if parsers.len() != k {
                return Err(Error::EnsembleSize {
                    expected: k,
                    found: parsers.len(),
                });
            }
            let length = common_length(parsers)?;
            reference.ensure_same_length(&parsers[0])?;
            let mut model = BayesModel::empty(cfg, k);
            let mut all = universe(parsers);
            all.extend(reference.iter());
            all.sort();
            all.dedup();
            for c in all {
                let votes: Vec<bool> = parsers.iter().map(|s| s.contains(c)).collect();
                let ctx = context_values(c, parsers, Some(reference), length, &cfg.contexts);
                model.observe(reference.contains(c), &votes, &ctx);
            }
            Ok(model)
        })
        .try_reduce(|| BayesModel::empty(cfg, k), |a, b| Ok(a.merge(b)))
}

/// Keeps each proposed constituent whose true-class score beats its
/// false-class score.
pub fn bayes_hybrid(model: &BayesModel, sets: &[ConstituentSet]) -> Result<ConstituentSet> {
    let length = model.check_size(sets)?;
    let mut out = ConstituentSet::new(length).with_id(sets[0].sentence_id);
    for c in universe(sets) {
        let (f, t) = model.scores_unchecked(c, sets, length);
        if t > f {
            out.items.insert(c.clone());
        }
    }
    Ok(out)
}

/// Picks the candidate whose include/exclude decisions over the union of
/// candidates have the highest joint log probability.
pub fn bayes_switch(model: &BayesModel, candidates: &[ConstituentSet]) -> Result<SwitchDecision> {
    let length = model.check_size(candidates)?;
    let scored: Vec<(&Constituent, (f64, f64))> = universe(candidates)
        .into_iter()
        .map(|c| (c, model.scores_unchecked(c, candidates, length)))
        .collect();
    let scores = candidates
        .iter()
        .map(|cand| {
            scored
                .iter()
                .map(|(c, (f, t))| if cand.contains(c) { *t } else { *f })
                .sum()
        })
        .collect();
    Ok(SwitchDecision::argmax(scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combiner::{constituent_vote, VoteConfig};
    use crate::synthetic::{noisy_copy, random_bracketing};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(s: usize, e: usize, l: &str) -> Constituent {
        Constituent::new(s, e, l)
    }

    fn one(len: usize, items: &[Constituent]) -> ConstituentSet {
        ConstituentSet::from_items(len, items.iter().cloned()).unwrap()
    }

    fn synthetic(seed: u64, n: usize, rates: &[f64]) -> Vec<(Vec<ConstituentSet>, ConstituentSet)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let len = rng.gen_range(3..15);
                let r = random_bracketing(&mut rng, len, 4);
                let ps = rates.iter().map(|&e| noisy_copy(&mut rng, &r, e, 4)).collect();
                (ps, r)
            })
            .collect()
    }

    #[test]
    fn always_right_parser_gets_add_one_estimate() {
        let x = c(0, 2, "X");
        let data: Vec<_> = (0..5).map(|_| (vec![one(3, std::slice::from_ref(&x))], one(3, std::slice::from_ref(&x)))).collect();
        let m = bayes_train(&data, &BayesConfig::default()).unwrap();
        assert!((m.conditional(0, true, true) - 6.0 / 7.0).abs() < 1e-12);
        assert_eq!(m.class_counts(), [0, 5]);
    }

    #[test]
    fn lambda_must_be_positive() {
        let data = vec![(vec![one(3, &[])], one(3, &[]))];
        for lambda in [0.0, -1.0, f64::NAN] {
            let cfg = BayesConfig { lambda, ..BayesConfig::default() };
            assert!(bayes_train(&data, &cfg).is_err());
        }
        assert!(bayes_train(&[], &BayesConfig::default()).is_err());
    }

    #[test]
    fn symmetric_parsers_share_conditionals() {
        // Every sentence appears with each rotation of the parser outputs.
        let base = synthetic(1, 50, &[0.2, 0.3, 0.4]);
        let mut data = Vec::new();
        for (ps, r) in &base {
            for shift in 0..3 {
                let rotated = (0..3).map(|i| ps[(i + shift) % 3].clone()).collect();
                data.push((rotated, r.clone()));
            }
        }
        let m = bayes_train(&data, &BayesConfig::default()).unwrap();
        for class in [false, true] {
            for vote in [false, true] {
                let p0 = m.conditional(0, class, vote);
                assert_eq!(p0, m.conditional(1, class, vote));
                assert_eq!(p0, m.conditional(2, class, vote));
                assert!(p0 > 0.0 && p0 < 1.0);
            }
        }
        for (ps, _) in &data {
            assert_eq!(
                bayes_hybrid(&m, ps).unwrap(),
                constituent_vote(ps, VoteConfig::majority(3)).unwrap()
            );
        }
    }

    #[test]
    fn trusted_parser_dominates() {
        let data = synthetic(2, 300, &[0.6, 0.6, 0.02]);
        let m = bayes_train(&data, &BayesConfig::default()).unwrap();
        let test = synthetic(3, 100, &[0.6, 0.6, 0.02]);
        let mut agree = 0;
        let mut picked = 0;
        for (ps, _) in &test {
            agree += (bayes_hybrid(&m, ps).unwrap() == ps[2]) as usize;
            picked += (bayes_switch(&m, ps).unwrap().chosen == 2) as usize;
        }
        assert!(agree >= 90, "hybrid matched trusted parser on {agree}/100");
        assert!(picked >= 95, "switch chose trusted parser on {picked}/100");
    }

    #[test]
    fn empty_universe_gives_empty_set() {
        let data = synthetic(4, 20, &[0.2, 0.2, 0.2]);
        let m = bayes_train(&data, &BayesConfig::default()).unwrap();
        let empty = vec![ConstituentSet::new(4); 3];
        assert!(bayes_hybrid(&m, &empty).unwrap().is_empty());
        assert!(bayes_hybrid(&m, &empty[..2]).is_err());
    }

    #[test]
    fn switch_matches_brute_force_product() {
        let data = synthetic(5, 100, &[0.2, 0.2, 0.2]);
        let m = bayes_train(&data, &BayesConfig::default()).unwrap();
        let (x, y, z) = (c(0, 2, "NP"), c(2, 4, "VP"), c(1, 3, "PP"));
        let cands = [one(4, &[x.clone(), y.clone()]), one(4, std::slice::from_ref(&x)), one(4, std::slice::from_ref(&z))];
        let d = bayes_switch(&m, &cands).unwrap();
        let univ = [x, y, z];
        let mut best = (0, f64::NEG_INFINITY);
        for (i, cand) in cands.iter().enumerate() {
            let mut product = 1.0;
            for u in &univ {
                let class = cand.contains(u);
                let mut p = m.prior(class);
                for (j, s) in cands.iter().enumerate() {
                    p *= m.conditional(j, class, s.contains(u));
                }
                product *= p;
            }
            assert!((d.scores[i] - product.ln()).abs() < 1e-9);
            if product > best.1 {
                best = (i, product);
            }
        }
        assert_eq!(d.chosen, best.0);
        let same = vec![cands[0].clone(); 3];
        assert_eq!(bayes_switch(&m, &same).unwrap().chosen, 0);
    }

    #[test]
    fn context_models_train_and_round_trip() {
        let data = synthetic(6, 80, &[0.2, 0.3, 0.4]);
        for kind in [BayesKind::Coprediction, BayesKind::IndependentContext] {
            let cfg = BayesConfig {
                kind,
                lambda: 0.5,
                contexts: ContextFeature::parse_list("tag,parenttag,clength,slength").unwrap(),
            };
            let m = bayes_train(&data, &cfg).unwrap();
            let loaded = BayesModel::load(&m.save()).unwrap();
            assert_eq!(loaded, m);
            for (ps, _) in data.iter().take(10) {
                assert_eq!(bayes_hybrid(&m, ps).unwrap(), bayes_hybrid(&loaded, ps).unwrap());
            }
        }
        let plain = bayes_train(&data, &BayesConfig::default()).unwrap();
        assert_eq!(BayesModel::load(&plain.save()).unwrap(), plain);
        assert!(BayesModel::load("nonsense").is_err());
    }
}
