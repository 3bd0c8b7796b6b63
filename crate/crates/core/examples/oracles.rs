//! Upper bounds for switching and hybridization, and isolated precision.

use parse_ensemble::metrics::{isolated_precision_corpus, max_precision_oracle, parser_switch_oracle, score_corpus,
                              IsolatedContext};
use parse_ensemble::synthetic::{noisy_copy, random_bracketing};
use parse_ensemble::treebank::ConstituentSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> parse_ensemble::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let data: Vec<(Vec<ConstituentSet>, ConstituentSet)> = (0..300)
        .map(|_| {
            let gold = random_bracketing(&mut rng, 15, 5);
            let parses = (0..3).map(|_| noisy_copy(&mut rng, &gold, 0.25, 5)).collect();
            (parses, gold)
        })
        .collect();
    let (cands, refs): (Vec<_>, Vec<_>) = data.iter().cloned().unzip();
    for i in 0..3 {
        let guesses: Vec<_> = cands.iter().map(|c| c[i].clone()).collect();
        println!("parser {}: F = {:.4}", i + 1, score_corpus(&guesses, &refs)?.f_measure);
    }
    println!("switch oracle F = {:.4}", parser_switch_oracle(&cands, &refs)?.f_measure);
    println!("max precision oracle recall = {:.4}", max_precision_oracle(&cands, &refs)?.recall);
    for (label, count) in isolated_precision_corpus(&data, 0, IsolatedContext::Label)? {
        println!("isolated precision of parser 1 on {label}: {:?}", count.precision());
    }
    Ok(())
}
