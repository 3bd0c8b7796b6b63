//! Random data for property tests, examples and the acceptance suite.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::treebank::{Constituent, ConstituentSet, Node, ParseTree, Token};

pub const LABELS: [&str; 5] = ["NP", "VP", "PP", "S", "ADJP"];

fn label<R: Rng>(rng: &mut R, num_labels: usize) -> &'static str {
    LABELS[rng.gen_range(0..num_labels.clamp(1, LABELS.len()))]
}

// Splits [lo, hi) into 2 or 3 random contiguous pieces.
fn split<R: Rng>(rng: &mut R, lo: usize, hi: usize) -> Vec<(usize, usize)> {
    let n = hi - lo;
    let pieces = if n >= 3 && rng.gen_bool(0.3) { 3 } else { 2 };
    let mut cuts: Vec<usize> = (lo + 1..hi).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(pieces - 1).collect();
    cuts.sort_unstable();
    let mut out = Vec::new();
    let mut prev = lo;
    for c in cuts {
        out.push((prev, c));
        prev = c;
    }
    out.push((prev, hi));
    out
}

fn grow<R: Rng>(rng: &mut R, lo: usize, hi: usize, num_labels: usize, out: &mut Vec<Constituent>) {
    if hi - lo < 2 {
        return;
    }
    for (s, e) in split(rng, lo, hi) {
        if e - s >= 2 {
            out.push(Constituent::new(s, e, label(rng, num_labels)));
            // Occasional unary chain over the same span.
            if rng.gen_bool(0.1) {
                out.push(Constituent::new(s, e, label(rng, num_labels)));
            }
            grow(rng, s, e, num_labels, out);
        } else if rng.gen_bool(0.3) {
            out.push(Constituent::new(s, e, label(rng, num_labels)));
        }
    }
}

/// Constituent set of a random tree over `length` tokens, root excluded.
pub fn random_bracketing<R: Rng>(rng: &mut R, length: usize, num_labels: usize) -> ConstituentSet {
    let mut items = Vec::new();
    if rng.gen_bool(0.2) {
        items.push(Constituent::new(0, length, label(rng, num_labels)));
    }
    grow(rng, 0, length, num_labels, &mut items);
    let mut set = ConstituentSet::new(length);
    set.items.extend(items);
    set
}

/// Degrades a reference bracketing the way an imperfect parser would:
/// constituents are dropped or relabelled, then non-crossing brackets added.
pub fn noisy_copy<R: Rng>(
    rng: &mut R,
    reference: &ConstituentSet,
    error_rate: f64,
    num_labels: usize,
) -> ConstituentSet {
    let mut out = ConstituentSet::new(reference.length).with_id(reference.sentence_id);
    for c in reference.iter() {
        if rng.gen_bool(error_rate) {
            if rng.gen_bool(0.5) {
                out.items.insert(Constituent::new(c.start, c.end, label(rng, num_labels)));
            }
        } else {
            out.items.insert(c.clone());
        }
    }
    let n = reference.length;
    let extra = (reference.len() as f64 * error_rate).ceil() as usize;
    for _ in 0..extra * 4 {
        if out.len() >= reference.len() + extra || n < 2 {
            break;
        }
        let s = rng.gen_range(0..n - 1);
        let e = rng.gen_range(s + 1..=n);
        let cand = Constituent::new(s, e, label(rng, num_labels));
        if out.iter().all(|x| !x.crosses(&cand)) {
            out.items.insert(cand);
        }
    }
    out
}

/// A random tree over `length` words with punctuation leaves mixed in.
pub fn random_tree<R: Rng>(rng: &mut R, length: usize, num_labels: usize, punct_prob: f64) -> ParseTree {
    let set = random_bracketing(rng, length, num_labels);
    let mut spans: Vec<&Constituent> = set.iter().collect();
    spans.sort_by(|a, b| a.start.cmp(&b.start).then(b.end.cmp(&a.end)).then(a.label.cmp(&b.label)));
    let words: Vec<Node> = (0..length)
        .map(|i| Node::Leaf(Token::new(i, format!("w{i}"), "X")))
        .collect();

    fn build(
        label: &str,
        lo: usize,
        hi: usize,
        spans: &[&Constituent],
        idx: &mut usize,
        words: &[Node],
    ) -> ParseTree {
        let mut children = Vec::new();
        let mut pos = lo;
        while pos < hi {
            if *idx < spans.len() && spans[*idx].start == pos && spans[*idx].end <= hi {
                let c = spans[*idx];
                *idx += 1;
                children.push(Node::Tree(build(&c.label, c.start, c.end, spans, idx, words)));
                pos = c.end;
            } else {
                children.push(words[pos].clone());
                pos += 1;
            }
        }
        ParseTree {
            label: label.to_string(),
            children,
        }
    }

    let mut idx = 0;
    let mut tree = build("TOP", 0, length, &spans, &mut idx, &words);
    sprinkle_punctuation(rng, &mut tree, punct_prob);
    tree.reindex();
    tree
}

fn sprinkle_punctuation<R: Rng>(rng: &mut R, tree: &mut ParseTree, p: f64) {
    const MARKS: [(&str, &str); 5] = [(",", ","), (".", "."), (":", ";"), ("``", "``"), ("''", "''")];
    let mut children = Vec::with_capacity(tree.children.len());
    for child in tree.children.drain(..) {
        if rng.gen_bool(p) {
            let (pos, word) = MARKS[rng.gen_range(0..MARKS.len())];
            children.push(Node::Leaf(Token::new(0, word, pos)));
        }
        children.push(match child {
            Node::Tree(mut sub) => {
                sprinkle_punctuation(rng, &mut sub, p);
                Node::Tree(sub)
            }
            leaf => leaf,
        });
    }
    if rng.gen_bool(p) {
        let (pos, word) = MARKS[rng.gen_range(0..MARKS.len())];
        children.push(Node::Leaf(Token::new(0, word, pos)));
    }
    tree.children = children;
}

/// Sentence generator for a small ambiguous English-like grammar: noun and
/// verb phrases with prepositional-phrase attachment ambiguity, and a
/// Zipf-distributed open-class vocabulary in which some words are both nouns
/// and verbs.
#[derive(Clone, Debug)]
pub struct ToyGrammar {
    pub max_len: usize,
    pub label_noise: f64,
    /// Size of the generated open-class noun vocabulary; verbs, adjectives
    /// and noun/verb ambiguous words scale with it.
    pub open_vocabulary: usize,
}

impl Default for ToyGrammar {
    fn default() -> Self {
        ToyGrammar {
            max_len: 15,
            label_noise: 0.05,
            open_vocabulary: 200,
        }
    }
}

const DET: [&str; 3] = ["the", "a", "every"];
const NOUN: [&str; 8] = ["dog", "cat", "man", "park", "telescope", "hill", "girl", "garden"];
const ADJ: [&str; 4] = ["big", "small", "old", "red"];
const VERB: [&str; 6] = ["saw", "chased", "walked", "liked", "found", "met"];
const PREP: [&str; 4] = ["in", "with", "on", "near"];
const PHRASAL: [&str; 4] = ["NP", "VP", "PP", "S"];

#[derive(Clone, Debug)]
struct WordClass {
    words: Vec<String>,
    dist: WeightedIndex<f64>,
}

impl WordClass {
    // Word at rank r is drawn with probability proportional to 1/(r+1).
    fn zipf(words: Vec<String>) -> Self {
        let dist = WeightedIndex::new((0..words.len()).map(|r| 1.0 / (r + 1) as f64)).expect("nonempty class");
        WordClass { words, dist }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> &str {
        &self.words[self.dist.sample(rng)]
    }
}

struct Lexicon {
    det: WordClass,
    noun: WordClass,
    adj: WordClass,
    verb: WordClass,
    prep: WordClass,
}

impl Lexicon {
    fn new(open: usize) -> Self {
        let base = |ws: &[&str]| ws.iter().map(|w| w.to_string()).collect::<Vec<_>>();
        fn generated(prefix: &'static str, n: usize) -> impl Iterator<Item = String> {
            (0..n).map(move |i| format!("{prefix}{i}"))
        }
        // Ambiguous words sit in the middle of both frequency rankings.
        let ambiguous: Vec<String> = generated("x", open / 4).collect();
        let mut noun = base(&NOUN);
        let mut verb = base(&VERB);
        let half = open / 2;
        noun.extend(generated("n", half));
        noun.extend(ambiguous.iter().cloned());
        noun.extend(generated("n", open).skip(half));
        verb.extend(generated("v", open / 4));
        verb.extend(ambiguous.iter().cloned());
        verb.extend(generated("v", open / 2).skip(open / 4));
        let mut adj = base(&ADJ);
        adj.extend(generated("j", open / 8));
        Lexicon {
            det: WordClass::zipf(base(&DET)),
            noun: WordClass::zipf(noun),
            adj: WordClass::zipf(adj),
            verb: WordClass::zipf(verb),
            prep: WordClass::zipf(base(&PREP)),
        }
    }
}

fn leaf<R: Rng>(rng: &mut R, pos: &str, class: &WordClass) -> Node {
    Node::Leaf(Token::new(0, class.draw(rng), pos))
}

fn phrase(label: &str, children: Vec<Node>) -> Node {
    Node::Tree(ParseTree {
        label: label.into(),
        children,
    })
}

impl ToyGrammar {
    fn np<R: Rng>(&self, lx: &Lexicon, rng: &mut R, depth: usize) -> Node {
        let r: f64 = rng.gen();
        let children = if r < 0.45 || (depth > 3 && r < 0.75) {
            vec![leaf(rng, "Det", &lx.det), leaf(rng, "N", &lx.noun)]
        } else if r < 0.6 || depth > 3 {
            vec![leaf(rng, "N", &lx.noun)]
        } else if r < 0.75 {
            vec![self.np(lx, rng, depth + 1), self.pp(lx, rng, depth + 1)]
        } else {
            vec![leaf(rng, "Det", &lx.det), leaf(rng, "Adj", &lx.adj), leaf(rng, "N", &lx.noun)]
        };
        phrase("NP", children)
    }

    fn pp<R: Rng>(&self, lx: &Lexicon, rng: &mut R, depth: usize) -> Node {
        phrase("PP", vec![leaf(rng, "P", &lx.prep), self.np(lx, rng, depth + 1)])
    }

    fn vp<R: Rng>(&self, lx: &Lexicon, rng: &mut R, depth: usize) -> Node {
        let r: f64 = rng.gen();
        let children = if r < 0.4 || (depth > 3 && r < 0.8) {
            vec![leaf(rng, "V", &lx.verb), self.np(lx, rng, depth + 1)]
        } else if r < 0.6 {
            vec![leaf(rng, "V", &lx.verb), self.np(lx, rng, depth + 1), self.pp(lx, rng, depth + 1)]
        } else if r < 0.8 || depth > 3 {
            vec![leaf(rng, "V", &lx.verb)]
        } else {
            vec![self.vp(lx, rng, depth + 1), self.pp(lx, rng, depth + 1)]
        };
        phrase("VP", children)
    }

    fn relabel<R: Rng>(&self, rng: &mut R, tree: &mut ParseTree) {
        for child in &mut tree.children {
            if let Node::Tree(sub) = child {
                if rng.gen_bool(self.label_noise) {
                    let others: Vec<&str> = PHRASAL.iter().copied().filter(|l| *l != sub.label).collect();
                    sub.label = others.choose(rng).expect("nonempty").to_string();
                }
                self.relabel(rng, sub);
            }
        }
    }

    fn generate<R: Rng>(&self, lx: &Lexicon, rng: &mut R) -> ParseTree {
        loop {
            let s = phrase("S", vec![self.np(lx, rng, 0), self.vp(lx, rng, 0)]);
            let mut tree = ParseTree {
                label: "TOP".into(),
                children: vec![s, Node::Leaf(Token::new(0, ".", "."))],
            };
            tree.reindex();
            if tree.token_count() - 1 > self.max_len {
                continue;
            }
            if self.label_noise > 0.0 {
                self.relabel(rng, &mut tree);
            }
            return tree;
        }
    }

    /// One tree `(TOP (S NP VP) (. .))`, resampled until it fits `max_len`.
    pub fn sentence<R: Rng>(&self, rng: &mut R) -> ParseTree {
        self.generate(&Lexicon::new(self.open_vocabulary), rng)
    }

    pub fn corpus<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<ParseTree> {
        let lx = Lexicon::new(self.open_vocabulary);
        (0..n).map(|_| self.generate(&lx, rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::evalb_transform;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bracketings_are_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let n = rng.gen_range(2..16);
            let set = random_bracketing(&mut rng, n, 5);
            assert!(set.find_crossing().is_none());
            let noisy = noisy_copy(&mut rng, &set, 0.3, 5);
            assert!(noisy.find_crossing().is_none());
        }
    }

    #[test]
    fn random_tree_matches_its_bracketing_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let n = rng.gen_range(1..12);
            let t = random_tree(&mut rng, n, 3, 0.3);
            let (set, _) = evalb_transform(&t).unwrap();
            assert_eq!(set.length, n);
        }
    }

    #[test]
    fn grammar_respects_length_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = ToyGrammar::default();
        for t in g.corpus(&mut rng, 300) {
            assert!(t.token_count() <= 16);
            assert!(evalb_transform(&t).is_ok());
        }
    }
}
