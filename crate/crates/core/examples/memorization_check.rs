//! Finding training samples a learner cannot reproduce from themselves alone.

use parse_ensemble::ensemble::memorization_check;
use parse_ensemble::treebank::read_trees;
use parse_ensemble::weak_parser::PcfgLearner;

fn main() -> parse_ensemble::Result<()> {
    let corpus = read_trees(
        "(TOP (S (NP (DT the) (NN dog)) (VP (VBD barked))))\n\
         (TOP (X (Y (A a)) (Y (A a)) (Y (Z (A a)))))\n\
         (TOP (NP (NP (NN cat)) (PP (IN on) (NP (NN mat)))))",
    )?;
    let report = memorization_check(&corpus, &PcfgLearner, 10)?;
    for (i, f) in report.f_measures.iter().enumerate() {
        println!("sample {i}: F = {f:.3}");
    }
    println!("unlearnable {:?}; {} samples kept", report.unlearnable, report.trimmed.len());
    Ok(())
}
