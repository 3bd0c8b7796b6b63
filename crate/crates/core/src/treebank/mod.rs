//! Bracketed parse trees and their scored image.
//!
//! A [`ParseTree`] is the ordinary labelled tree read from a Penn-style
//! bracket file. Everything downstream (scoring, voting, alignment, boosting)
//! works on its [`ConstituentSet`]: the labelled spans left after traces and
//! punctuation are stripped, empty constituents pruned and the root dropped.

mod enumerate;
mod evalb;
mod io;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use enumerate::{enumerate_parses, MAX_ENUMERATION_LABELS, MAX_ENUMERATION_LENGTH};
pub use evalb::{
    evalb_bag, evalb_transform, inverse_evalb, PunctuationRecord, PUNCTUATION_TAGS, TRACE_TAG,
};
pub use io::{read_forest_lines, read_trees, write_tree, write_trees};

/// A terminal: word plus its part-of-speech tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub index: usize,
    pub word: String,
    pub pos: String,
}

impl Token {
    pub fn new(index: usize, word: impl Into<String>, pos: impl Into<String>) -> Self {
        Token {
            index,
            word: word.into(),
            pos: pos.into(),
        }
    }

    pub fn is_trace(&self) -> bool {
        self.pos == TRACE_TAG
    }

    pub fn is_punctuation(&self) -> bool {
        PUNCTUATION_TAGS.contains(&self.pos.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Tree(ParseTree),
    Leaf(Token),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseTree {
    pub label: String,
    pub children: Vec<Node>,
}

impl ParseTree {
    /// Builds a tree and renumbers its tokens left to right.
    pub fn new(label: impl Into<String>, children: Vec<Node>) -> Self {
        let mut tree = ParseTree {
            label: label.into(),
            children,
        };
        tree.reindex();
        tree
    }

    /// Renumbers token indices 0.. in reading order.
    pub fn reindex(&mut self) {
        fn walk(tree: &mut ParseTree, next: &mut usize) {
            for child in &mut tree.children {
                match child {
                    Node::Leaf(token) => {
                        token.index = *next;
                        *next += 1;
                    }
                    Node::Tree(sub) => walk(sub, next),
                }
            }
        }
        let mut next = 0;
        walk(self, &mut next);
    }

    pub fn tokens(&self) -> Vec<&Token> {
        fn walk<'a>(tree: &'a ParseTree, out: &mut Vec<&'a Token>) {
            for child in &tree.children {
                match child {
                    Node::Leaf(token) => out.push(token),
                    Node::Tree(sub) => walk(sub, out),
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Tokens that are not traces, i.e. the observed sentence.
    pub fn sentence(&self) -> Vec<Token> {
        self.tokens()
            .into_iter()
            .filter(|t| !t.is_trace())
            .cloned()
            .collect()
    }

    pub fn words(&self) -> Vec<&str> {
        self.tokens()
            .into_iter()
            .filter(|t| !t.is_trace())
            .map(|t| t.word.as_str())
            .collect()
    }

    pub fn token_count(&self) -> usize {
        self.tokens().len()
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.label)?;
        for child in &self.children {
            match child {
                Node::Leaf(t) => write!(f, " ({} {})", t.pos, t.word)?,
                Node::Tree(sub) => write!(f, " {sub}")?,
            }
        }
        write!(f, ")")
    }
}

/// A labelled span `(start, end, label)` over pruned token positions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Constituent {
    pub start: usize,
    pub end: usize,
    pub label: String,
}

impl Constituent {
    pub fn new(start: usize, end: usize, label: impl Into<String>) -> Self {
        Constituent {
            start,
            end,
            label: label.into(),
        }
    }

    pub fn span_len(&self) -> usize {
        self.end - self.start
    }

    pub fn same_span(&self, other: &Constituent) -> bool {
        self.start == other.start && self.end == other.end
    }

    pub fn contains_span(&self, other: &Constituent) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Overlapping without nesting.
    pub fn crosses(&self, other: &Constituent) -> bool {
        (self.start < other.start && other.start < self.end && self.end < other.end)
            || (other.start < self.start && self.start < other.end && other.end < self.end)
    }
}

impl fmt::Display for Constituent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.start, self.end, self.label)
    }
}

/// The scored image of one parse.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConstituentSet {
    pub sentence_id: usize,
    pub length: usize,
    pub items: BTreeSet<Constituent>,
}

impl ConstituentSet {
    pub fn new(length: usize) -> Self {
        ConstituentSet {
            sentence_id: 0,
            length,
            items: BTreeSet::new(),
        }
    }

    pub fn from_items<I>(length: usize, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = Constituent>,
    {
        let mut set = ConstituentSet::new(length);
        for c in items {
            set.insert(c)?;
        }
        Ok(set)
    }

    pub fn with_id(mut self, sentence_id: usize) -> Self {
        self.sentence_id = sentence_id;
        self
    }

    /// Inserts a constituent; returns whether it was new.
    pub fn insert(&mut self, c: Constituent) -> Result<bool> {
        if c.start >= c.end || c.end > self.length {
            return Err(Error::InvalidArgument(format!(
                "constituent {c} outside sentence of length {}",
                self.length
            )));
        }
        Ok(self.items.insert(c))
    }

    pub fn contains(&self, c: &Constituent) -> bool {
        self.items.contains(c)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constituent> {
        self.items.iter()
    }

    pub fn intersection_count(&self, other: &ConstituentSet) -> usize {
        self.items.intersection(&other.items).count()
    }

    /// Size of the symmetric difference.
    pub fn mismatch_count(&self, other: &ConstituentSet) -> usize {
        self.items.symmetric_difference(&other.items).count()
    }

    pub fn ensure_same_length(&self, other: &ConstituentSet) -> Result<()> {
        if self.length != other.length {
            return Err(Error::LengthMismatch(self.length, other.length));
        }
        Ok(())
    }

    /// First pair of crossing brackets, in set order.
    pub fn find_crossing(&self) -> Option<(Constituent, Constituent)> {
        let items: Vec<&Constituent> = self.items.iter().collect();
        for (i, a) in items.iter().enumerate() {
            for b in &items[i + 1..] {
                if a.crosses(b) {
                    return Some(((*a).clone(), (*b).clone()));
                }
            }
        }
        None
    }

    /// Label of the smallest strictly larger span containing `c`, or `TOP`.
    ///
    /// Unary chains over one span are not ordered by a set, so a parent is
    /// always a strictly longer span; ties go to the smallest label.
    pub fn parent_label(&self, c: &Constituent) -> &str {
        self.items
            .iter()
            .filter(|p| p.contains_span(c) && p.span_len() > c.span_len())
            .min_by(|x, y| x.span_len().cmp(&y.span_len()).then(x.label.cmp(&y.label)))
            .map(|p| p.label.as_str())
            .unwrap_or("TOP")
    }
}
