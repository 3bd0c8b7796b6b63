//! Naive Bayes hybridization trained on parser votes, against plain voting.

use parse_ensemble::combiner::{bayes_hybrid, bayes_train, constituent_vote, BayesConfig, BayesKind, ContextFeature,
                               VoteConfig};
use parse_ensemble::metrics::Scorer;
use parse_ensemble::synthetic::{noisy_copy, random_bracketing};
use parse_ensemble::treebank::ConstituentSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn data(seed: u64, n: usize) -> Vec<(Vec<ConstituentSet>, ConstituentSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let gold = random_bracketing(&mut rng, 12, 4);
            // One good parser and two noisy ones.
            let parses = [0.1, 0.4, 0.4].iter().map(|&p| noisy_copy(&mut rng, &gold, p, 4)).collect();
            (parses, gold)
        })
        .collect()
}

fn main() -> parse_ensemble::Result<()> {
    let train = data(1, 400);
    let test = data(2, 200);
    let cfg = BayesConfig {
        kind: BayesKind::IndependentContext,
        lambda: 0.5,
        contexts: vec![ContextFeature::Label],
    };
    for (name, cfg) in [("plain", BayesConfig::default()), ("independent(tag)", cfg)] {
        let model = bayes_train(&train, &cfg)?;
        let mut scorer = Scorer::new();
        for (parses, gold) in &test {
            scorer.add(&bayes_hybrid(&model, parses)?, gold)?;
        }
        println!("{name:>17}: F = {:.4}", scorer.report()?.f_measure);
    }
    let mut scorer = Scorer::new();
    for (parses, gold) in &test {
        scorer.add(&constituent_vote(parses, VoteConfig::majority(3))?, gold)?;
    }
    println!("{:>17}: F = {:.4}", "majority vote", scorer.report()?.f_measure);
    Ok(())
}
