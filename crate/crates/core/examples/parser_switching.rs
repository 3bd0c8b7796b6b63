//! Switching by similarity, distance and penalized similarity. The last two
//! always agree; plain similarity ignores parse size and can differ.

use parse_ensemble::combiner::{distance_switch, penalized_similarity_switch, similarity_switch};
use parse_ensemble::synthetic::{noisy_copy, random_bracketing};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> parse_ensemble::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gold = random_bracketing(&mut rng, 12, 4);
    let candidates: Vec<_> = (0..5).map(|_| noisy_copy(&mut rng, &gold, 0.3, 4)).collect();
    let sim = similarity_switch(&candidates)?;
    let dist = distance_switch(&candidates)?;
    let pen = penalized_similarity_switch(&candidates)?;
    println!("similarity scores {:?} -> {}", sim.scores, sim.chosen);
    println!("distance scores   {:?} -> {}", dist.scores, dist.chosen);
    println!("penalized scores  {:?} -> {}", pen.scores, pen.chosen);
    Ok(())
}
