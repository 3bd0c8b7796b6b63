//! A toy treebank PCFG: relative-frequency rules over right-factored trees,
//! Laplace-smoothed word emissions with one unknown-word class, and Viterbi
//! CKY decoding.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use super::{strip_traces, Learner};
use crate::error::{Error, Result};
use crate::treebank::{Node, ParseTree, Token};

const MODEL_HEADER: &str = "parse-ensemble-pcfg 1";
/// Prefix of the intermediate labels introduced by binarization.
pub const SYNTHETIC_PREFIX: char = '@';

/// A grammar symbol: a part-of-speech tag or a phrase label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Sym {
    pos: bool,
    name: String,
}

impl Sym {
    fn phrase(name: impl Into<String>) -> Self {
        Sym {
            pos: false,
            name: name.into(),
        }
    }

    fn tag(name: impl Into<String>) -> Self {
        Sym {
            pos: true,
            name: name.into(),
        }
    }

    fn encode(&self) -> String {
        format!("{}:{}", if self.pos { 't' } else { 'p' }, self.name)
    }

    fn decode(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("t", name)) if !name.is_empty() => Ok(Sym::tag(name)),
            Some(("p", name)) if !name.is_empty() => Ok(Sym::phrase(name)),
            _ => Err(Error::ModelFormat(format!("bad symbol {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
struct Counts {
    start: BTreeMap<Sym, u64>,
    binary: BTreeMap<(Sym, Sym, Sym), u64>,
    unary: BTreeMap<(Sym, Sym), u64>,
    lexical: BTreeMap<(String, String), u64>,
}

impl Counts {
    fn symbol(node: &Node) -> Sym {
        match node {
            Node::Leaf(t) => Sym::tag(&t.pos),
            Node::Tree(t) => Sym::phrase(&t.label),
        }
    }

    fn add_tree(&mut self, tree: &ParseTree) {
        *self.start.entry(Sym::phrase(&tree.label)).or_default() += 1;
        self.add_node(tree);
    }

    fn add_node(&mut self, tree: &ParseTree) {
        let parent = Sym::phrase(&tree.label);
        let kids: Vec<Sym> = tree.children.iter().map(Self::symbol).collect();
        match kids.len() {
            1 => *self.unary.entry((parent, kids[0].clone())).or_default() += 1,
            2 => {
                *self
                    .binary
                    .entry((parent, kids[0].clone(), kids[1].clone()))
                    .or_default() += 1
            }
            n => {
                let bar = Sym::phrase(format!("{SYNTHETIC_PREFIX}{}", tree.label));
                *self
                    .binary
                    .entry((parent, kids[0].clone(), bar.clone()))
                    .or_default() += 1;
                for kid in &kids[1..n - 2] {
                    *self
                        .binary
                        .entry((bar.clone(), kid.clone(), bar.clone()))
                        .or_default() += 1;
                }
                *self
                    .binary
                    .entry((bar, kids[n - 2].clone(), kids[n - 1].clone()))
                    .or_default() += 1;
            }
        }
        for child in &tree.children {
            match child {
                Node::Leaf(t) => {
                    *self.lexical.entry((t.pos.clone(), t.word.clone())).or_default() += 1;
                }
                Node::Tree(sub) => self.add_node(sub),
            }
        }
    }
}

struct BinaryRule {
    parent: usize,
    right: usize,
    logp: f64,
}

struct UnaryRule {
    parent: usize,
    child: usize,
    logp: f64,
}

/// Counts compiled into indexed log-probability tables for decoding.
struct Grammar {
    symbols: Vec<Sym>,
    start: Vec<f64>,
    // Rules indexed by left child; the index within the list is the rule's
    // rank in symbol order and breaks ties.
    by_left: Vec<Vec<(usize, BinaryRule)>>,
    unary: Vec<UnaryRule>,
    // Per tag symbol: word log-probabilities and the unknown-word fallback.
    emission: Vec<Option<(HashMap<String, f64>, f64)>>,
}

impl Grammar {
    fn compile(counts: &Counts) -> Self {
        let mut all: BTreeSet<Sym> = BTreeSet::new();
        all.extend(counts.start.keys().cloned());
        for (p, l, r) in counts.binary.keys() {
            all.extend([p.clone(), l.clone(), r.clone()]);
        }
        for (p, c) in counts.unary.keys() {
            all.extend([p.clone(), c.clone()]);
        }
        for (pos, _) in counts.lexical.keys() {
            all.insert(Sym::tag(pos));
        }
        let symbols: Vec<Sym> = all.into_iter().collect();
        let index: HashMap<&Sym, usize> = symbols.iter().enumerate().map(|(i, s)| (s, i)).collect();

        let mut lhs_total = vec![0u64; symbols.len()];
        for ((p, _, _), n) in &counts.binary {
            lhs_total[index[p]] += n;
        }
        for ((p, _), n) in &counts.unary {
            lhs_total[index[p]] += n;
        }
        let start_total: u64 = counts.start.values().sum();
        let mut start = vec![f64::NEG_INFINITY; symbols.len()];
        for (s, n) in &counts.start {
            start[index[s]] = (*n as f64 / start_total as f64).ln();
        }

        let mut by_left: Vec<Vec<(usize, BinaryRule)>> = (0..symbols.len()).map(|_| Vec::new()).collect();
        for (rank, ((p, l, r), n)) in counts.binary.iter().enumerate() {
            let parent = index[p];
            by_left[index[l]].push((
                rank,
                BinaryRule {
                    parent,
                    right: index[r],
                    logp: (*n as f64 / lhs_total[parent] as f64).ln(),
                },
            ));
        }
        let unary = counts
            .unary
            .iter()
            .map(|((p, c), n)| {
                let parent = index[p];
                UnaryRule {
                    parent,
                    child: index[c],
                    logp: (*n as f64 / lhs_total[parent] as f64).ln(),
                }
            })
            .collect();

        let vocab: BTreeSet<&str> = counts.lexical.keys().map(|(_, w)| w.as_str()).collect();
        let v = vocab.len() as f64;
        let mut tag_total: HashMap<&str, u64> = HashMap::new();
        for ((pos, _), n) in &counts.lexical {
            *tag_total.entry(pos).or_default() += n;
        }
        let mut emission: Vec<Option<(HashMap<String, f64>, f64)>> = vec![None; symbols.len()];
        for (i, s) in symbols.iter().enumerate() {
            if !s.pos {
                continue;
            }
            let total = tag_total.get(s.name.as_str()).copied().unwrap_or(0) as f64;
            let denom = total + v + 1.0;
            let unk = (1.0 / denom).ln();
            let mut words = HashMap::new();
            for w in &vocab {
                let n = counts
                    .lexical
                    .get(&(s.name.clone(), w.to_string()))
                    .copied()
                    .unwrap_or(0) as f64;
                words.insert(w.to_string(), ((n + 1.0) / denom).ln());
            }
            emission[i] = Some((words, unk));
        }
        Grammar {
            symbols,
            start,
            by_left,
            unary,
            emission,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Back {
    None,
    Lex,
    Unary(usize),
    Binary { rank: usize, split: usize, left: usize, right: usize },
}

#[derive(Clone, Copy)]
struct Entry {
    score: f64,
    back: Back,
}

const EMPTY: Entry = Entry {
    score: f64::NEG_INFINITY,
    back: Back::None,
};

pub struct PcfgModel {
    counts: Counts,
    grammar: Grammar,
}

impl std::fmt::Debug for PcfgModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PcfgModel")
            .field("symbols", &self.grammar.symbols.len())
            .field("binary_rules", &self.counts.binary.len())
            .field("unary_rules", &self.counts.unary.len())
            .finish()
    }
}

impl PcfgModel {
    fn from_counts(counts: Counts) -> Self {
        let grammar = Grammar::compile(&counts);
        PcfgModel { counts, grammar }
    }

    /// Rule probabilities summed per left-hand side, for inspection.
    pub fn lhs_totals(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        let g = &self.grammar;
        for rules in &g.by_left {
            for (_, r) in rules {
                *out.entry(g.symbols[r.parent].name.clone()).or_insert(0.0) += r.logp.exp();
            }
        }
        for r in &g.unary {
            *out.entry(g.symbols[r.parent].name.clone()).or_insert(0.0) += r.logp.exp();
        }
        out
    }

    /// Text dump of the counts, with derived probabilities for reading.
    pub fn save(&self) -> String {
        let mut out = format!("{MODEL_HEADER}\n");
        let c = &self.counts;
        let start_total: u64 = c.start.values().sum();
        for (s, n) in &c.start {
            let _ = writeln!(out, "start {} {n} {:.6}", s.encode(), *n as f64 / start_total as f64);
        }
        let mut lhs: BTreeMap<&Sym, u64> = BTreeMap::new();
        for ((p, _, _), n) in &c.binary {
            *lhs.entry(p).or_default() += n;
        }
        for ((p, _), n) in &c.unary {
            *lhs.entry(p).or_default() += n;
        }
        for ((p, l, r), n) in &c.binary {
            let prob = *n as f64 / lhs[p] as f64;
            let _ = writeln!(out, "binary {} {} {} {n} {prob:.6}", p.encode(), l.encode(), r.encode());
        }
        for ((p, ch), n) in &c.unary {
            let prob = *n as f64 / lhs[p] as f64;
            let _ = writeln!(out, "unary {} {} {n} {prob:.6}", p.encode(), ch.encode());
        }
        for ((pos, word), n) in &c.lexical {
            let _ = writeln!(out, "lex {pos} {word} {n}");
        }
        out
    }

    /// Reads a dump; probabilities are recomputed from the counts.
    pub fn load(text: &str) -> Result<Self> {
        let bad = |m: String| Error::ModelFormat(m);
        let mut lines = text.lines();
        if lines.next() != Some(MODEL_HEADER) {
            return Err(bad("missing or unsupported header".into()));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad(format!("bad count {s:?}")));
        let mut c = Counts::default();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["start", s, n, ..] => {
                    c.start.insert(Sym::decode(s)?, num(n)?);
                }
                ["binary", p, l, r, n, ..] => {
                    c.binary.insert((Sym::decode(p)?, Sym::decode(l)?, Sym::decode(r)?), num(n)?);
                }
                ["unary", p, ch, n, ..] => {
                    c.unary.insert((Sym::decode(p)?, Sym::decode(ch)?), num(n)?);
                }
                ["lex", pos, word, n] => {
                    c.lexical.insert((pos.to_string(), word.to_string()), num(n)?);
                }
                _ => return Err(bad(format!("unrecognised line {line:?}"))),
            }
        }
        if c.start.is_empty() {
            return Err(bad("model has no start symbols".into()));
        }
        Ok(PcfgModel::from_counts(c))
    }

    fn unary_closure(&self, cell: &mut [Entry]) {
        let g = &self.grammar;
        for _ in 0..=g.symbols.len() {
            let mut changed = false;
            for r in &g.unary {
                let child = cell[r.child].score;
                if child == f64::NEG_INFINITY {
                    continue;
                }
                let cand = child + r.logp;
                if cand > cell[r.parent].score {
                    cell[r.parent] = Entry {
                        score: cand,
                        back: Back::Unary(r.child),
                    };
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Viterbi parse of `words`, or `None` when the grammar cannot derive it.
    pub fn cky(&self, words: &[&str]) -> Option<ParseTree> {
        let g = &self.grammar;
        let n = words.len();
        if n == 0 {
            return None;
        }
        let ns = g.symbols.len();
        let cell_index = |i: usize, j: usize| (i * (n + 1) + j) * ns;
        let mut chart = vec![EMPTY; (n + 1) * (n + 1) * ns];

        for (i, w) in words.iter().enumerate() {
            let base = cell_index(i, i + 1);
            for (s, em) in g.emission.iter().enumerate() {
                if let Some((table, unk)) = em {
                    chart[base + s] = Entry {
                        score: table.get(*w).copied().unwrap_or(*unk),
                        back: Back::Lex,
                    };
                }
            }
            self.unary_closure(&mut chart[base..base + ns]);
        }

        let mut scratch = vec![EMPTY; ns];
        for len in 2..=n {
            for i in 0..=n - len {
                let j = i + len;
                scratch.fill(EMPTY);
                for k in i + 1..j {
                    let lb = cell_index(i, k);
                    let rb = cell_index(k, j);
                    for (left, rules) in g.by_left.iter().enumerate() {
                        let ls = chart[lb + left].score;
                        if ls == f64::NEG_INFINITY || rules.is_empty() {
                            continue;
                        }
                        for (rank, r) in rules {
                            let rs = chart[rb + r.right].score;
                            if rs == f64::NEG_INFINITY {
                                continue;
                            }
                            let cand = ls + rs + r.logp;
                            let cur = &mut scratch[r.parent];
                            let better = cand > cur.score
                                || (cand == cur.score
                                    && matches!(cur.back, Back::Binary { rank: cr, split: cs, .. }
                                        if (*rank, k) < (cr, cs)));
                            if better {
                                *cur = Entry {
                                    score: cand,
                                    back: Back::Binary {
                                        rank: *rank,
                                        split: k,
                                        left,
                                        right: r.right,
                                    },
                                };
                            }
                        }
                    }
                }
                self.unary_closure(&mut scratch);
                let base = cell_index(i, j);
                chart[base..base + ns].copy_from_slice(&scratch);
            }
        }

        let root = cell_index(0, n);
        let mut best: Option<(f64, usize)> = None;
        for s in 0..ns {
            let score = chart[root + s].score + g.start[s];
            if score > f64::NEG_INFINITY && best.is_none_or(|(b, _)| score > b) {
                best = Some((score, s));
            }
        }
        let (_, sym) = best?;
        let nodes = self.build(&chart, &cell_index, words, 0, n, sym);
        let mut tree = match nodes.into_iter().next() {
            Some(Node::Tree(t)) => t,
            _ => return None,
        };
        tree.reindex();
        Some(tree)
    }

    // Rebuilds the subtree for `sym` over [i, j); synthetic nodes return their
    // children so the caller splices them in.
    fn build(
        &self,
        chart: &[Entry],
        cell_index: &dyn Fn(usize, usize) -> usize,
        words: &[&str],
        i: usize,
        j: usize,
        sym: usize,
    ) -> Vec<Node> {
        let g = &self.grammar;
        let entry = chart[cell_index(i, j) + sym];
        let s = &g.symbols[sym];
        let children = match entry.back {
            Back::Lex => return vec![Node::Leaf(Token::new(i, words[i], s.name.clone()))],
            Back::Unary(child) => self.build(chart, cell_index, words, i, j, child),
            Back::Binary { split, left, right, .. } => {
                let mut kids = self.build(chart, cell_index, words, i, split, left);
                kids.extend(self.build(chart, cell_index, words, split, j, right));
                kids
            }
            Back::None => Vec::new(),
        };
        if s.name.starts_with(SYNTHETIC_PREFIX) {
            children
        } else {
            vec![Node::Tree(ParseTree {
                label: s.name.clone(),
                children,
            })]
        }
    }
}

/// Relative-frequency PCFG learner.
#[derive(Clone, Copy, Debug, Default)]
pub struct PcfgLearner;

impl Learner for PcfgLearner {
    type Model = PcfgModel;

    fn train(&self, corpus: &[ParseTree]) -> Result<PcfgModel> {
        let mut counts = Counts::default();
        for tree in corpus.iter().filter_map(strip_traces) {
            counts.add_tree(&tree);
        }
        if counts.start.is_empty() {
            return Err(Error::Learner("cannot train on an empty corpus".into()));
        }
        Ok(PcfgModel::from_counts(counts))
    }

    fn parse(&self, model: &PcfgModel, tokens: &[Token]) -> Result<Option<ParseTree>> {
        let words: Vec<&str> = tokens.iter().map(|t| t.word.as_str()).collect();
        Ok(model.cky(&words))
    }

    fn save_model(&self, model: &PcfgModel, path: &Path) -> Result<()> {
        std::fs::write(path, model.save())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::ToyGrammar;
    use crate::treebank::{evalb_transform, read_trees};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tree(s: &str) -> ParseTree {
        read_trees(s).unwrap().remove(0)
    }

    fn reparse(model: &PcfgModel, t: &ParseTree) -> Option<ParseTree> {
        PcfgLearner.parse(model, &t.sentence()).unwrap()
    }

    #[test]
    fn single_tree_is_reproduced() {
        for s in [
            "(TOP (S (NP (Det the) (N dog)) (VP (V saw) (NP (N cats)))) (. .))",
            "(TOP (S (NP (N x)) (VP (V y) (NP (N z)) (PP (P w) (NP (N v))))))",
            "(TOP (NP (Det a) (Adj b) (Adj c) (N d)))",
            "(TOP (X (Y (N a))))",
        ] {
            let t = tree(s);
            let m = PcfgLearner.train(std::slice::from_ref(&t)).unwrap();
            assert_eq!(reparse(&m, &t).as_ref(), Some(&t), "{s}");
        }
    }

    #[test]
    fn repeated_unary_label_is_not_learnable() {
        let t = tree("(TOP (S (S (N x)) (V y)))");
        let m = PcfgLearner.train(std::slice::from_ref(&t)).unwrap();
        assert_eq!(reparse(&m, &t).as_ref(), Some(&t));
        // Repetition of one label over a single span can never win: the
        // direct S -> N path is always more probable.
        let t = tree("(TOP (S (S (N x))))");
        let m = PcfgLearner.train(std::slice::from_ref(&t)).unwrap();
        let got = reparse(&m, &t).unwrap();
        assert_ne!(got, t);
        assert_eq!(got.to_string(), "(TOP (S (N x)))");
    }

    #[test]
    fn unknown_words_still_parse() {
        let t = tree("(TOP (S (NP (N dog)) (VP (V barks))))");
        let m = PcfgLearner.train(&[t]).unwrap();
        let got = m.cky(&["cat", "meows"]).unwrap();
        assert_eq!(got.to_string(), "(TOP (S (NP (N cat)) (VP (V meows))))");
    }

    #[test]
    fn underivable_length_fails() {
        let t = tree("(TOP (S (N a) (V b)))");
        let m = PcfgLearner.train(&[t]).unwrap();
        assert!(m.cky(&["a", "b", "a"]).is_none());
        assert!(m.cky(&[]).is_none());
    }

    #[test]
    fn ties_break_the_same_way_every_time() {
        // Two equally probable bracketings of "a a a".
        let corpus = [tree("(TOP (X (X (A a) (A a)) (A a)))"), tree("(TOP (X (A a) (X (A a) (A a))))")];
        let m = PcfgLearner.train(&corpus).unwrap();
        let first = m.cky(&["a", "a", "a"]).unwrap();
        for _ in 0..5 {
            let again = PcfgLearner.train(&corpus).unwrap().cky(&["a", "a", "a"]).unwrap();
            assert_eq!(again, first);
        }
    }

    #[test]
    fn duplicated_corpus_gives_same_probabilities() {
        let t = tree("(TOP (S (NP (N x)) (VP (V y))))");
        let a = PcfgLearner.train(std::slice::from_ref(&t)).unwrap();
        let b = PcfgLearner.train(&[t.clone(), t]).unwrap();
        assert_eq!(a.lhs_totals(), b.lhs_totals());
        assert_eq!(a.grammar.start, b.grammar.start);
    }

    #[test]
    fn rules_normalise_per_lhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let corpus = ToyGrammar::default().corpus(&mut rng, 200);
        let m = PcfgLearner.train(&corpus).unwrap();
        for (lhs, total) in m.lhs_totals() {
            assert!((total - 1.0).abs() < 1e-9, "{lhs}: {total}");
        }
    }

    #[test]
    fn model_file_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let corpus = ToyGrammar::default().corpus(&mut rng, 100);
        let m = PcfgLearner.train(&corpus).unwrap();
        let loaded = PcfgModel::load(&m.save()).unwrap();
        assert_eq!(loaded.counts, m.counts);
        for t in corpus.iter().take(20) {
            assert_eq!(reparse(&m, t), reparse(&loaded, t));
        }
        assert!(PcfgModel::load("garbage").is_err());
    }

    #[test]
    fn toy_corpus_is_mostly_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = ToyGrammar {
            label_noise: 0.0,
            ..ToyGrammar::default()
        };
        let train = g.corpus(&mut rng, 500);
        let test = g.corpus(&mut rng, 100);
        let m = PcfgLearner.train(&train).unwrap();
        let mut scorer = crate::metrics::Scorer::new();
        for t in &test {
            let (gold, _) = evalb_transform(t).unwrap();
            let guess = reparse(&m, t)
                .and_then(|p| evalb_transform(&p).ok())
                .map(|(s, _)| s)
                .unwrap_or_else(|| crate::treebank::ConstituentSet::new(gold.length));
            scorer.add(&guess, &gold).unwrap();
        }
        let f = scorer.report().unwrap().f_measure;
        assert!(f > 0.7, "F = {f}");
    }
}
