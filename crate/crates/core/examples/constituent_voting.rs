//! Majority voting over three parses never produces crossing brackets.

use parse_ensemble::combiner::{check_no_crossing, constituent_vote, VoteConfig};
use parse_ensemble::metrics::score;
use parse_ensemble::treebank::{evalb_transform, read_trees, ConstituentSet};

fn main() -> parse_ensemble::Result<()> {
    let sets = |text: &str| -> parse_ensemble::Result<Vec<ConstituentSet>> {
        read_trees(text)?.iter().map(|t| evalb_transform(t).map(|x| x.0)).collect()
    };
    let gold = sets("(TOP (S (NP (DT the) (NN dog)) (VP (VBD saw) (NP (DT a) (NN cat)))))")?.remove(0);
    let parses = sets(
        "(TOP (S (NP (DT the) (NN dog)) (VP (VBD saw) (NP (DT a) (NN cat)))))\n\
         (TOP (S (NP (DT the) (NN dog) (VBD saw)) (VP (DT a) (NN cat))))\n\
         (TOP (S (NP (DT the) (NN dog)) (VP (VBD saw) (DT a) (NN cat))))",
    )?;
    for (i, p) in parses.iter().enumerate() {
        println!("parser {}: F = {:.3}", i + 1, score(p, &gold)?.f_measure());
    }
    for threshold in 1..=3 {
        let out = constituent_vote(&parses, VoteConfig::new(threshold, 3)?)?;
        let t = score(&out, &gold)?;
        println!(
            "threshold {threshold}: P = {:.3} R = {:.3} crossing-free = {}",
            t.precision(),
            t.recall(),
            check_no_crossing(&out).is_ok()
        );
    }
    Ok(())
}
