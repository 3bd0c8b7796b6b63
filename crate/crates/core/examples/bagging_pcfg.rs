//! Bagging the built-in PCFG learner on a generated treebank.

use parse_ensemble::ensemble::{bag, combine_members, member_sets, reference_sets, WeightScheme};
use parse_ensemble::metrics::score_corpus;
use parse_ensemble::synthetic::ToyGrammar;
use parse_ensemble::weak_parser::PcfgLearner;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> parse_ensemble::Result<()> {
    let grammar = ToyGrammar::default();
    let train = grammar.corpus(&mut ChaCha8Rng::seed_from_u64(1), 600);
    let test = grammar.corpus(&mut ChaCha8Rng::seed_from_u64(2), 200);
    let refs = reference_sets(&test)?;

    let bagged = bag(&train, &PcfgLearner, 7, WeightScheme::Uniform, 42)?;
    let per_member = member_sets(&PcfgLearner, &bagged.members, &test)?;
    for (i, sets) in per_member.iter().enumerate() {
        println!("member {}: F = {:.2}", i + 1, 100.0 * score_corpus(sets, &refs)?.f_measure);
    }
    let ensemble = combine_members(&per_member, &vec![1.0; per_member.len()])?;
    println!("bagged:   F = {:.2}", 100.0 * score_corpus(&ensemble, &refs)?.f_measure);
    Ok(())
}
