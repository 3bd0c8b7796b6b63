//! Parser induction procedures that ensembles are built from.

mod external;
mod pcfg;
mod stub;

use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::treebank::{evalb_transform, ConstituentSet, Node, ParseTree, Token};

pub use external::{ExternalLearner, ExternalModel};
pub use pcfg::{PcfgLearner, PcfgModel};
pub use stub::{StubBehaviour, StubLearner, StubModel};

/// Trains a parser from trees and parses sentences with it.
pub trait Learner: Sync {
    type Model: Send + Sync;

    fn train(&self, corpus: &[ParseTree]) -> Result<Self::Model>;

    /// Parses one sentence; `None` means no parse was found.
    fn parse(&self, model: &Self::Model, tokens: &[Token]) -> Result<Option<ParseTree>>;

    /// Parses many sentences, in order.
    fn parse_batch(&self, model: &Self::Model, sentences: &[Vec<Token>]) -> Result<Vec<Option<ParseTree>>> {
        sentences.par_iter().map(|s| self.parse(model, s)).collect()
    }

    /// Same model and input always give the same tree.
    fn deterministic(&self) -> bool {
        true
    }

    fn save_model(&self, model: &Self::Model, path: &Path) -> Result<()>;
}

/// Copy of `tree` with trace leaves removed and emptied constituents pruned.
pub fn strip_traces(tree: &ParseTree) -> Option<ParseTree> {
    let children: Vec<Node> = tree
        .children
        .iter()
        .filter_map(|child| match child {
            Node::Leaf(t) if t.is_trace() => None,
            Node::Leaf(t) => Some(Node::Leaf(t.clone())),
            Node::Tree(sub) => strip_traces(sub).map(Node::Tree),
        })
        .collect();
    if children.is_empty() {
        return None;
    }
    let mut out = ParseTree {
        label: tree.label.clone(),
        children,
    };
    out.reindex();
    Some(out)
}

/// Observed sentences of a corpus, one token list per tree.
pub fn sentences_of(corpus: &[ParseTree]) -> Vec<Vec<Token>> {
    corpus.iter().map(ParseTree::sentence).collect()
}

/// Scored constituents of a parser's output for `gold` tokens.
///
/// Punctuation is decided by the gold tags, so a parser that tags a comma
/// differently cannot shift the sentence length. A missing parse scores as
/// the empty set.
pub fn hypothesis_set(parse: Option<&ParseTree>, gold: &[Token]) -> Result<ConstituentSet> {
    let length = gold.iter().filter(|t| !t.is_punctuation() && !t.is_trace()).count();
    let Some(parse) = parse else {
        return Ok(ConstituentSet::new(length));
    };
    let mut tree = parse.clone();
    let mut leaves = Vec::new();
    collect_leaves(&mut tree, &mut leaves);
    if leaves.len() != gold.len() {
        return Err(Error::LengthMismatch(leaves.len(), gold.len()));
    }
    for (leaf, g) in leaves.into_iter().zip(gold) {
        if g.is_punctuation() {
            leaf.pos = g.pos.clone();
        } else if leaf.is_punctuation() || leaf.is_trace() {
            // Any tag outside the punctuation and trace sets will do.
            leaf.pos = format!("{}~", leaf.pos);
        }
    }
    match evalb_transform(&tree) {
        Ok((set, _)) => Ok(set),
        Err(Error::EmptyAfterPruning) => Ok(ConstituentSet::new(length)),
        Err(e) => Err(e),
    }
}

fn collect_leaves<'a>(tree: &'a mut ParseTree, out: &mut Vec<&'a mut Token>) {
    for child in &mut tree.children {
        match child {
            Node::Leaf(t) => out.push(t),
            Node::Tree(sub) => collect_leaves(sub, out),
        }
    }
}
