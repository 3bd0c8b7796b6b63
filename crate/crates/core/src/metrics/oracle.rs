use super::{score, ScoreReport, Scorer};
use crate::error::{Error, Result};
use crate::treebank::ConstituentSet;

fn check_aligned(candidates: &[Vec<ConstituentSet>], references: &[ConstituentSet]) -> Result<()> {
    if candidates.len() != references.len() {
        return Err(Error::InvalidArgument(format!(
            "{} candidate lists for {} references",
            candidates.len(),
            references.len()
        )));
    }
    if let Some(i) = candidates.iter().position(|c| c.is_empty()) {
        return Err(Error::InvalidArgument(format!("sentence {i} has no candidates")));
    }
    Ok(())
}

/// Index of the best candidate per sentence by F-measure, lowest index on ties.
pub fn oracle_choices(
    candidates: &[Vec<ConstituentSet>],
    references: &[ConstituentSet],
) -> Result<Vec<usize>> {
    check_aligned(candidates, references)?;
    candidates
        .iter()
        .zip(references)
        .map(|(cands, r)| {
            let mut best = (0, f64::NEG_INFINITY);
            for (i, g) in cands.iter().enumerate() {
                let f = score(g, r)?.f_measure();
                if f > best.1 {
                    best = (i, f);
                }
            }
            Ok(best.0)
        })
        .collect()
}

/// Score of always picking the best parser for each sentence.
pub fn parser_switch_oracle(
    candidates: &[Vec<ConstituentSet>],
    references: &[ConstituentSet],
) -> Result<ScoreReport> {
    let choices = oracle_choices(candidates, references)?;
    let mut scorer = Scorer::new();
    for ((cands, r), &i) in candidates.iter().zip(references).zip(&choices) {
        scorer.add(&cands[i], r)?;
    }
    scorer.report()
}

/// Keeps every proposed constituent that is in the reference.
pub fn max_precision_oracle(
    candidates: &[Vec<ConstituentSet>],
    references: &[ConstituentSet],
) -> Result<ScoreReport> {
    check_aligned(candidates, references)?;
    let mut scorer = Scorer::new();
    for (cands, r) in candidates.iter().zip(references) {
        let mut kept = ConstituentSet::new(r.length).with_id(r.sentence_id);
        for g in cands {
            g.ensure_same_length(r)?;
            kept.items.extend(g.iter().filter(|c| r.contains(c)).cloned());
        }
        scorer.add(&kept, r)?;
    }
    scorer.report()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::score_corpus;
    use crate::synthetic::random_bracketing;
    use crate::treebank::Constituent;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn corpus(seed: u64) -> (Vec<Vec<ConstituentSet>>, Vec<ConstituentSet>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cands = Vec::new();
        let mut refs = Vec::new();
        for _ in 0..40 {
            let n = rng.gen_range(2..12);
            refs.push(random_bracketing(&mut rng, n, 3));
            cands.push((0..3).map(|_| random_bracketing(&mut rng, n, 3)).collect());
        }
        (cands, refs)
    }

    #[test]
    fn perfect_candidate_wins() {
        let r = ConstituentSet::from_items(3, [Constituent::new(0, 2, "A")]).unwrap();
        let cands = vec![vec![r.clone(), ConstituentSet::new(3)]];
        let rep = parser_switch_oracle(&cands, std::slice::from_ref(&r)).unwrap();
        assert_eq!(rep.f_measure, 1.0);
        assert_eq!(rep.exact, 1.0);
        let cands = vec![vec![ConstituentSet::new(3), r.clone()]];
        assert_eq!(oracle_choices(&cands, &[r]).unwrap(), vec![1]);
    }

    #[test]
    fn single_candidate_is_its_own_score() {
        let (cands, refs) = corpus(3);
        let single: Vec<_> = cands.iter().map(|c| vec![c[0].clone()]).collect();
        let firsts: Vec<_> = cands.iter().map(|c| c[0].clone()).collect();
        let own = score_corpus(&firsts, &refs).unwrap();
        let oracle = parser_switch_oracle(&single, &refs).unwrap();
        assert_eq!(own.totals, oracle.totals);
    }

    #[test]
    fn oracles_dominate_individuals() {
        for seed in 0..5 {
            let (cands, refs) = corpus(seed);
            let switch = parser_switch_oracle(&cands, &refs).unwrap();
            let maxp = max_precision_oracle(&cands, &refs).unwrap();
            assert_eq!(maxp.precision, 1.0);
            for i in 0..3 {
                let own: Vec<_> = cands.iter().map(|c| c[i].clone()).collect();
                let rep = score_corpus(&own, &refs).unwrap();
                assert!(switch.f_measure + 1e-12 >= rep.f_measure, "seed {seed} parser {i}");
                assert!(maxp.recall + 1e-12 >= rep.recall);
            }
            // Recall equals |(union) ∩ R| / |R| computed directly.
            let mut hit = 0;
            let mut total = 0;
            for (c, r) in cands.iter().zip(&refs) {
                total += r.len();
                hit += r.iter().filter(|x| c.iter().any(|g| g.contains(x))).count();
            }
            assert!((maxp.recall - hit as f64 / total as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn disjoint_candidates_give_vacuous_precision() {
        let r = ConstituentSet::from_items(3, [Constituent::new(0, 2, "A")]).unwrap();
        let g = ConstituentSet::from_items(3, [Constituent::new(1, 3, "B")]).unwrap();
        let rep = max_precision_oracle(&[vec![g]], &[r]).unwrap();
        assert_eq!(rep.precision, 1.0);
        assert_eq!(rep.recall, 0.0);
    }
}
