use std::collections::BTreeMap;

use serde::Serialize;

use super::length_bucket;
use crate::error::{Error, Result};
use crate::treebank::{Constituent, ConstituentSet};

/// How isolated constituents are partitioned for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsolatedContext {
    All,
    Label,
    ParentLabel,
    SpanLength,
    SentenceLength,
}

impl IsolatedContext {
    fn key(self, c: &Constituent, own: &ConstituentSet) -> String {
        match self {
            IsolatedContext::All => "all".into(),
            IsolatedContext::Label => c.label.clone(),
            IsolatedContext::ParentLabel => own.parent_label(c).to_string(),
            IsolatedContext::SpanLength => length_bucket(c.span_len()).into(),
            IsolatedContext::SentenceLength => length_bucket(own.length).into(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IsolatedCount {
    pub isolated: usize,
    pub correct: usize,
}

impl IsolatedCount {
    /// `None` when no constituent fell in this context.
    pub fn precision(&self) -> Option<f64> {
        (self.isolated > 0).then(|| self.correct as f64 / self.isolated as f64)
    }
}

/// Precision of parser `i` on the constituents it proposes that a strict
/// majority of the other parsers do not.
pub fn isolated_precision(
    parsers: &[ConstituentSet],
    reference: &ConstituentSet,
    i: usize,
    context: IsolatedContext,
) -> Result<BTreeMap<String, IsolatedCount>> {
    let mut out = BTreeMap::new();
    accumulate(parsers, reference, i, context, &mut out)?;
    Ok(out)
}

/// Corpus version: `sentences` pairs each ensemble output with its reference.
pub fn isolated_precision_corpus(
    sentences: &[(Vec<ConstituentSet>, ConstituentSet)],
    i: usize,
    context: IsolatedContext,
) -> Result<BTreeMap<String, IsolatedCount>> {
    let mut out = BTreeMap::new();
    for (parsers, reference) in sentences {
        accumulate(parsers, reference, i, context, &mut out)?;
    }
    Ok(out)
}

fn accumulate(
    parsers: &[ConstituentSet],
    reference: &ConstituentSet,
    i: usize,
    context: IsolatedContext,
    out: &mut BTreeMap<String, IsolatedCount>,
) -> Result<()> {
    if parsers.len() < 3 {
        return Err(Error::InvalidArgument(
            "isolated precision needs at least three parsers".into(),
        ));
    }
    if i >= parsers.len() {
        return Err(Error::InvalidArgument(format!("no parser {i}")));
    }
    for p in parsers {
        p.ensure_same_length(reference)?;
    }
    let others = parsers.len() - 1;
    let own = &parsers[i];
    for c in own.iter() {
        let votes = parsers
            .iter()
            .enumerate()
            .filter(|(j, p)| *j != i && p.contains(c))
            .count();
        if 2 * votes > others {
            continue;
        }
        let cell = out.entry(context.key(c, own)).or_default();
        cell.isolated += 1;
        cell.correct += reference.contains(c) as usize;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(len: usize, c: Option<Constituent>) -> ConstituentSet {
        ConstituentSet::from_items(len, c).unwrap()
    }

    #[test]
    fn lone_correct_constituent() {
        let x = Constituent::new(0, 1, "X");
        let y = Constituent::new(1, 2, "Y");
        let parsers = [one(2, Some(x.clone())), one(2, Some(y.clone())), one(2, Some(y))];
        let out = isolated_precision(&parsers, &one(2, Some(x)), 0, IsolatedContext::All).unwrap();
        assert_eq!(out["all"].precision(), Some(1.0));
    }

    #[test]
    fn identical_parsers_have_nothing_isolated() {
        let x = Constituent::new(0, 1, "X");
        let parsers = vec![one(2, Some(x.clone())); 3];
        let out = isolated_precision(&parsers, &one(2, Some(x)), 1, IsolatedContext::All).unwrap();
        assert!(out.get("all").and_then(|c| c.precision()).is_none());
    }

    #[test]
    fn lone_wrong_constituent() {
        let x = Constituent::new(0, 1, "X");
        let z = Constituent::new(1, 2, "Z");
        let parsers = [one(2, Some(x.clone())), one(2, Some(x.clone())), one(2, Some(z))];
        let out =
            isolated_precision(&parsers, &one(2, Some(x)), 2, IsolatedContext::Label).unwrap();
        assert_eq!(out["Z"], IsolatedCount { isolated: 1, correct: 0 });
        assert_eq!(out["Z"].precision(), Some(0.0));
    }

    #[test]
    fn needs_three_parsers() {
        let parsers = vec![one(2, None); 2];
        assert!(isolated_precision(&parsers, &one(2, None), 0, IsolatedContext::All).is_err());
    }
}
