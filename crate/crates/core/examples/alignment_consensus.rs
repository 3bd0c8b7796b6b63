//! Aligning two parses and building a consensus parse from four.

use parse_ensemble::alignment::{align, consensus_parse, default_consensus_threshold, DistanceKind};
use parse_ensemble::metrics::score;
use parse_ensemble::synthetic::{noisy_copy, random_bracketing};
use parse_ensemble::treebank::Constituent;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn show(c: &Option<Constituent>) -> String {
    c.as_ref().map_or("NULL".to_string(), Constituent::to_string)
}

fn main() -> parse_ensemble::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let gold = random_bracketing(&mut rng, 10, 3);
    let parses: Vec<_> = (0..4).map(|_| noisy_copy(&mut rng, &gold, 0.35, 3)).collect();

    let a = align(&parses[0], &parses[1], DistanceKind::Piecewise)?;
    println!("piecewise alignment cost {}", a.cost);
    for p in &a.pairs {
        println!("  {:>12} ~ {:<12} {}", show(&p.left), show(&p.right), p.weight);
    }

    for kind in DistanceKind::ALL {
        let threshold = default_consensus_threshold(kind, parses.len());
        let c = consensus_parse(&parses, kind, threshold)?;
        println!("{kind:>10}: consensus F = {:.3}", score(&c, &gold)?.f_measure());
    }
    Ok(())
}
