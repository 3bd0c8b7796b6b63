use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Constituent, ConstituentSet, Node, ParseTree, Token};
use crate::error::{Error, Result};

pub const TRACE_TAG: &str = "-NONE-";
pub const PUNCTUATION_TAGS: [&str; 5] = [",", ":", "``", "''", "."];

/// Everything the transform throws away, so a tree can be rebuilt.
///
/// `kept` holds the scored tokens in order. `punctuation` entries are indexed
/// by position in the trace-free token sequence; `traces` by position in the
/// original sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PunctuationRecord {
    pub root_label: String,
    pub kept: Vec<Token>,
    pub punctuation: Vec<Token>,
    pub traces: Vec<Token>,
}

impl PunctuationRecord {
    /// Token count of the tree the record was taken from.
    pub fn original_len(&self) -> usize {
        self.kept.len() + self.punctuation.len() + self.traces.len()
    }

    /// A record for a bare sentence with no punctuation, used when rebuilding
    /// trees from sets that never came from a tree.
    pub fn plain(root_label: &str, tokens: &[Token]) -> Self {
        PunctuationRecord {
            root_label: root_label.to_string(),
            kept: tokens.to_vec(),
            punctuation: Vec::new(),
            traces: Vec::new(),
        }
    }
}

struct Walk<'a> {
    kept: usize,
    trace_free: usize,
    original: usize,
    record: PunctuationRecord,
    out: &'a mut dyn FnMut(Constituent),
}

impl Walk<'_> {
    // Returns the pruned span of `tree`, or None when nothing survives in it.
    fn visit(&mut self, tree: &ParseTree, is_root: bool) -> Option<(usize, usize)> {
        let start = self.kept;
        for child in &tree.children {
            match child {
                Node::Leaf(token) => {
                    let mut t = token.clone();
                    if token.is_trace() {
                        t.index = self.original;
                        self.record.traces.push(t);
                    } else {
                        if token.is_punctuation() {
                            t.index = self.trace_free;
                            self.record.punctuation.push(t);
                        } else {
                            t.index = self.kept;
                            self.record.kept.push(t);
                            self.kept += 1;
                        }
                        self.trace_free += 1;
                    }
                    self.original += 1;
                }
                Node::Tree(sub) => {
                    self.visit(sub, false);
                }
            }
        }
        if self.kept == start {
            return None;
        }
        if !is_root {
            (self.out)(Constituent::new(start, self.kept, tree.label.clone()));
        }
        Some((start, self.kept))
    }
}

fn transform_with(
    tree: &ParseTree,
    mut sink: impl FnMut(Constituent),
) -> Result<(usize, PunctuationRecord)> {
    let mut walk = Walk {
        kept: 0,
        trace_free: 0,
        original: 0,
        record: PunctuationRecord {
            root_label: tree.label.clone(),
            kept: Vec::new(),
            punctuation: Vec::new(),
            traces: Vec::new(),
        },
        out: &mut sink,
    };
    walk.visit(tree, true);
    if walk.kept == 0 {
        return Err(Error::EmptyAfterPruning);
    }
    let kept = walk.kept;
    Ok((kept, walk.record))
}

/// Reduces a tree to its scored constituent set.
///
/// Traces and punctuation are removed, constituents left empty are pruned,
/// preterminals are not constituents, and the root node is dropped. Inner
/// nodes that happen to span the whole sentence are kept.
pub fn evalb_transform(tree: &ParseTree) -> Result<(ConstituentSet, PunctuationRecord)> {
    let mut items = Vec::new();
    let (length, record) = transform_with(tree, |c| items.push(c))?;
    let set = ConstituentSet {
        sentence_id: 0,
        length,
        items: items.into_iter().collect(),
    };
    Ok((set, record))
}

/// Multiset variant: repeated unary constituents over one span are counted.
pub fn evalb_bag(tree: &ParseTree) -> Result<(usize, BTreeMap<Constituent, usize>)> {
    let mut bag = BTreeMap::new();
    let (length, _) = transform_with(tree, |c| *bag.entry(c).or_insert(0) += 1)?;
    Ok((length, bag))
}

/// Rebuilds a tree from a non-crossing set and the removed punctuation.
///
/// Each punctuation mark joins every constituent containing its nearest
/// scored token on the left, or on the right at the start of a sentence.
/// Constituents sharing a span nest in label order, outermost first.
/// Traces are not reinserted.
pub fn inverse_evalb(set: &ConstituentSet, record: &PunctuationRecord) -> Result<ParseTree> {
    if let Some((a, b)) = set.find_crossing() {
        return Err(Error::CrossingBrackets(a, b));
    }
    if set.length != record.kept.len() {
        return Err(Error::LengthMismatch(set.length, record.kept.len()));
    }
    let total = record.kept.len() + record.punctuation.len();

    // Lay out the trace-free sequence, tracking where each scored token lands.
    let mut leaves: Vec<Option<Token>> = vec![None; total];
    for p in &record.punctuation {
        if p.index >= total || leaves[p.index].is_some() {
            return Err(Error::InvalidArgument(format!(
                "punctuation index {} out of place",
                p.index
            )));
        }
        leaves[p.index] = Some(p.clone());
    }
    let mut kept_at = Vec::with_capacity(record.kept.len());
    let mut next = record.kept.iter();
    for (pos, slot) in leaves.iter_mut().enumerate() {
        if slot.is_none() {
            *slot = next.next().cloned();
            kept_at.push(pos);
        }
    }
    let leaves: Vec<Token> = leaves.into_iter().map(|t| t.expect("slot filled")).collect();

    // A constituent over scored tokens [s, e) widens to cover punctuation
    // trailing token e-1, and leading punctuation when s is the first token.
    let expanded_end = |e: usize| -> usize {
        if e == set.length {
            total
        } else {
            kept_at[e]
        }
    };
    let expanded_start = |s: usize| -> usize {
        if s == 0 {
            0
        } else {
            kept_at[s]
        }
    };

    let mut spans: Vec<(usize, usize, &str)> = set
        .iter()
        .map(|c| (expanded_start(c.start), expanded_end(c.end), c.label.as_str()))
        .collect();
    spans.sort_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)).then(x.2.cmp(y.2)));

    fn build(
        label: &str,
        lo: usize,
        hi: usize,
        spans: &[(usize, usize, &str)],
        idx: &mut usize,
        leaves: &[Token],
    ) -> ParseTree {
        let mut children = Vec::new();
        let mut pos = lo;
        while pos < hi {
            if *idx < spans.len() && spans[*idx].0 == pos && spans[*idx].1 <= hi {
                let (s, e, l) = spans[*idx];
                *idx += 1;
                children.push(Node::Tree(build(l, s, e, spans, idx, leaves)));
                pos = e;
            } else {
                children.push(Node::Leaf(leaves[pos].clone()));
                pos += 1;
            }
        }
        ParseTree {
            label: label.to_string(),
            children,
        }
    }

    let mut idx = 0;
    let mut tree = build(&record.root_label, 0, total, &spans, &mut idx, &leaves);
    tree.reindex();
    Ok(tree)
}
