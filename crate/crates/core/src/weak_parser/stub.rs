//! A scripted learner for exercising ensemble control flow.

use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use super::Learner;
use crate::error::{Error, Result};
use crate::treebank::{write_trees, Node, ParseTree, Token};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StubBehaviour {
    /// Returns the training tree for any sentence it was trained on and a
    /// flat tree otherwise.
    Memorize,
    /// Returns a left-branching tree with a label no reference uses, so every
    /// predicted constituent is wrong.
    Garbage,
    /// Training fails.
    Fail,
}

/// Follows `plan[n]` on its n-th call to `train`; the last entry repeats.
#[derive(Debug)]
pub struct StubLearner {
    pub plan: Vec<StubBehaviour>,
    calls: AtomicUsize,
}

#[derive(Clone, Debug)]
pub struct StubModel {
    pub behaviour: StubBehaviour,
    pub call: usize,
    memory: HashMap<Vec<String>, ParseTree>,
}

pub const GARBAGE_LABEL: &str = "STUB";

impl StubLearner {
    pub fn new(plan: Vec<StubBehaviour>) -> Self {
        assert!(!plan.is_empty(), "stub plan must not be empty");
        StubLearner {
            plan,
            calls: AtomicUsize::new(0),
        }
    }

    /// Memorizes on every call except the 1-based `iterations`, where it
    /// produces garbage.
    pub fn violating_at(iterations: &[usize], total: usize) -> Self {
        let plan = (1..=total.max(1))
            .map(|t| {
                if iterations.contains(&t) {
                    StubBehaviour::Garbage
                } else {
                    StubBehaviour::Memorize
                }
            })
            .chain(std::iter::once(StubBehaviour::Memorize))
            .collect();
        StubLearner::new(plan)
    }

    pub fn train_calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

fn flat(tokens: &[Token]) -> ParseTree {
    ParseTree::new("TOP", tokens.iter().cloned().map(Node::Leaf).collect())
}

fn garbage(tokens: &[Token]) -> ParseTree {
    let mut nodes = tokens.iter().cloned().map(Node::Leaf);
    let mut acc = match nodes.next() {
        Some(n) => vec![n],
        None => return ParseTree::new("TOP", Vec::new()),
    };
    for n in nodes {
        acc = vec![Node::Tree(ParseTree::new(GARBAGE_LABEL, acc)), n];
    }
    ParseTree::new("TOP", acc)
}

impl Learner for StubLearner {
    type Model = StubModel;

    fn train(&self, corpus: &[ParseTree]) -> Result<StubModel> {
        let call = self.calls.fetch_add(1, Ordering::SeqCst);
        let behaviour = self.plan[call.min(self.plan.len() - 1)];
        if behaviour == StubBehaviour::Fail {
            return Err(Error::Learner(format!("stub told to fail on call {}", call + 1)));
        }
        let memory = corpus
            .iter()
            .map(|t| (t.words().into_iter().map(String::from).collect(), t.clone()))
            .collect();
        Ok(StubModel { behaviour, call, memory })
    }

    fn parse(&self, model: &StubModel, tokens: &[Token]) -> Result<Option<ParseTree>> {
        if tokens.is_empty() {
            return Ok(None);
        }
        Ok(Some(match model.behaviour {
            StubBehaviour::Garbage => garbage(tokens),
            _ => {
                let key: Vec<String> = tokens.iter().map(|t| t.word.clone()).collect();
                model.memory.get(&key).cloned().unwrap_or_else(|| flat(tokens))
            }
        }))
    }

    fn save_model(&self, model: &StubModel, path: &Path) -> Result<()> {
        let trees: Vec<ParseTree> = model.memory.values().cloned().collect();
        std::fs::write(path, write_trees(&trees)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{evalb_transform, read_trees};

    #[test]
    fn plan_is_followed() {
        let corpus = read_trees("(TOP (S (NP (N a)) (VP (V b) (N c))))").unwrap();
        let s = corpus[0].sentence();
        let stub = StubLearner::violating_at(&[2], 3);
        let m1 = stub.train(&corpus).unwrap();
        assert_eq!(stub.parse(&m1, &s).unwrap().unwrap(), corpus[0]);
        let m2 = stub.train(&corpus).unwrap();
        let g = stub.parse(&m2, &s).unwrap().unwrap();
        let (gs, _) = evalb_transform(&g).unwrap();
        let (rs, _) = evalb_transform(&corpus[0]).unwrap();
        assert!(!gs.is_empty());
        assert_eq!(gs.intersection_count(&rs), 0);
        assert_eq!(stub.train(&corpus).unwrap().behaviour, StubBehaviour::Memorize);
        assert_eq!(stub.train_calls(), 3);
    }

    #[test]
    fn failing_plan() {
        let stub = StubLearner::new(vec![StubBehaviour::Fail]);
        assert!(matches!(stub.train(&[]), Err(Error::Learner(_))));
    }
}
