//! Scoring normalization and its inverse on one treebank sentence.

use parse_ensemble::treebank::{evalb_transform, inverse_evalb, read_trees};

fn main() -> parse_ensemble::Result<()> {
    let tree = read_trees(
        "(TOP (S (NP-SBJ (-NONE- *)) (NP (NNP Pierre) (NNP Vinken)) (, ,) \
         (VP (MD will) (VP (VB join) (NP (DT the) (NN board)))) (. .)))",
    )?
    .remove(0);
    let (set, record) = evalb_transform(&tree)?;
    println!("scored length {}", set.length);
    for c in set.iter() {
        println!("  {c}");
    }
    println!("dropped: {} punctuation, {} traces", record.punctuation.len(), record.traces.len());
    let rebuilt = inverse_evalb(&set, &record)?;
    println!("rebuilt {rebuilt}");
    assert_eq!(evalb_transform(&rebuilt)?.0, set);
    Ok(())
}
