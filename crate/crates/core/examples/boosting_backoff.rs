//! Boosting with a learner that breaks the weak-learner criterion once.

use parse_ensemble::ensemble::{boost, BoostConfig};
use parse_ensemble::synthetic::ToyGrammar;
use parse_ensemble::weak_parser::StubLearner;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> parse_ensemble::Result<()> {
    let corpus = ToyGrammar::default().corpus(&mut ChaCha8Rng::seed_from_u64(5), 100);
    let learner = StubLearner::violating_at(&[3], 5);
    let cfg = BoostConfig {
        iterations: 5,
        seed: 17,
        ..BoostConfig::default()
    };
    let run = boost(&corpus, &learner, &cfg)?;
    print!("{}", run.ledger.csv());
    let voting: Vec<usize> = run.members.iter().filter(|m| m.retained()).map(|m| m.iteration).collect();
    println!("discards {}, resets {}, voting members {voting:?}", run.ledger.discards(), run.ledger.resets());
    Ok(())
}
