//! Aligning two parses constituent by constituent, and the switching and
//! consensus methods built on those alignments.
//!
//! Each parse becomes one side of a bipartite graph with an extra NULL vertex
//! (insertion or deletion). Edge weights come from a [`DistanceKind`]; an
//! alignment is a minimum-weight edge cover. Forbidden edges get a weight
//! larger than any cover built from finite edges, so they are never chosen.

mod cover;
mod distance;

use rayon::prelude::*;
use serde::Serialize;

use crate::combiner::SwitchDecision;
use crate::error::{Error, Result};
use crate::treebank::{Constituent, ConstituentSet};

pub use cover::{brute_force_edge_cover, min_edge_cover, CoverEdge, EdgeCover};
pub use distance::{constituent_distance, DistanceKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlignedPair {
    pub left: Option<Constituent>,
    pub right: Option<Constituent>,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alignment {
    pub pairs: Vec<AlignedPair>,
    pub cost: i64,
    /// Weight that stood in for forbidden edges in this instance.
    pub infinity: i64,
}

/// Edge weights between two constituent lists, with forbidden edges replaced
/// by twice the sum of all finite weights plus one.
pub fn weight_matrix(
    kind: DistanceKind,
    left: &[&Constituent],
    right: &[&Constituent],
) -> (Vec<Vec<i64>>, Vec<i64>, Vec<i64>, i64) {
    let raw: Vec<Vec<Option<i64>>> = left
        .iter()
        .map(|a| right.iter().map(|b| constituent_distance(kind, Some(a), Some(b))).collect())
        .collect();
    let left_null: Vec<i64> = left
        .iter()
        .map(|a| constituent_distance(kind, Some(a), None).expect("NULL edges are finite"))
        .collect();
    let right_null: Vec<i64> = right
        .iter()
        .map(|b| constituent_distance(kind, None, Some(b)).expect("NULL edges are finite"))
        .collect();
    let finite: i64 = raw.iter().flatten().flatten().sum::<i64>()
        + left_null.iter().sum::<i64>()
        + right_null.iter().sum::<i64>();
    let infinity = 2 * finite + 1;
    let cross = raw
        .into_iter()
        .map(|row| row.into_iter().map(|w| w.unwrap_or(infinity)).collect())
        .collect();
    (cross, left_null, right_null, infinity)
}

pub fn align(a: &ConstituentSet, b: &ConstituentSet, kind: DistanceKind) -> Result<Alignment> {
    a.ensure_same_length(b)?;
    let left: Vec<&Constituent> = a.iter().collect();
    let right: Vec<&Constituent> = b.iter().collect();
    let (cross, ln, rn, infinity) = weight_matrix(kind, &left, &right);
    let cover = min_edge_cover(&cross, &ln, &rn)?;
    let mut pairs = Vec::with_capacity(cover.edges.len());
    for (x, y) in cover.edges {
        let weight = match (x, y) {
            (Some(i), Some(j)) => cross[i][j],
            (Some(i), None) => ln[i],
            (None, Some(j)) => rn[j],
            (None, None) => 0,
        };
        if weight >= infinity {
            return Err(Error::InvalidArgument(
                "alignment selected a forbidden edge".into(),
            ));
        }
        pairs.push(AlignedPair {
            left: x.map(|i| left[i].clone()),
            right: y.map(|j| right[j].clone()),
            weight,
        });
    }
    Ok(Alignment {
        pairs,
        cost: cover.cost,
        infinity,
    })
}

fn pairwise(candidates: &[ConstituentSet], kind: DistanceKind) -> Result<Vec<(usize, usize, Alignment)>> {
    let n = candidates.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs
        .into_par_iter()
        .map(|(i, j)| align(&candidates[i], &candidates[j], kind).map(|a| (i, j, a)))
        .collect()
}

/// Picks the candidate with the smallest total alignment cost to the others.
pub fn alignment_switch(candidates: &[ConstituentSet], kind: DistanceKind) -> Result<SwitchDecision> {
    if candidates.len() < 2 {
        return Err(Error::InvalidArgument("switching needs at least two candidates".into()));
    }
    let mut totals = vec![0i64; candidates.len()];
    for (i, j, a) in pairwise(candidates, kind)? {
        totals[i] += a.cost;
        totals[j] += a.cost;
    }
    Ok(SwitchDecision::argmin(totals.into_iter().map(|t| t as f64).collect()))
}

/// Threshold under which a constituent is cheaper to keep than to delete
/// from half of the other parses.
pub fn default_consensus_threshold(kind: DistanceKind, k: usize) -> f64 {
    (k.saturating_sub(1) as f64) * kind.unit_null_cost() as f64 / 2.0
}

/// Greedy consensus over all pairwise alignments.
///
/// Every constituent of every candidate is a node; its cost f is the total
/// weight of alignment edges touching it (a NULL edge counts once per
/// alignment). Nodes are visited by ascending (f, parser, start, end, label).
/// A node with f at most `threshold` joins the output and it and its aligned
/// partners are retired; the scan stops at the first node above threshold.
pub fn consensus_parse(
    candidates: &[ConstituentSet],
    kind: DistanceKind,
    threshold: f64,
) -> Result<ConstituentSet> {
    let first = candidates
        .first()
        .ok_or_else(|| Error::InvalidArgument("no parses to combine".into()))?;
    let lists: Vec<Vec<&Constituent>> = candidates.iter().map(|s| s.iter().collect()).collect();
    let index_of = |p: usize, c: &Constituent| -> usize {
        lists[p].binary_search(&c).expect("aligned constituent belongs to its parse")
    };
    let offsets: Vec<usize> = lists
        .iter()
        .scan(0, |acc, l| {
            let o = *acc;
            *acc += l.len();
            Some(o)
        })
        .collect();
    let total = lists.iter().map(Vec::len).sum();
    let mut cost = vec![0i64; total];
    let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (i, j, alignment) in pairwise(candidates, kind)? {
        for pair in &alignment.pairs {
            let l = pair.left.as_ref().map(|c| offsets[i] + index_of(i, c));
            let r = pair.right.as_ref().map(|c| offsets[j] + index_of(j, c));
            if let Some(l) = l {
                cost[l] += pair.weight;
            }
            if let Some(r) = r {
                cost[r] += pair.weight;
            }
            if let (Some(l), Some(r)) = (l, r) {
                neighbours[l].push(r);
                neighbours[r].push(l);
            }
        }
    }
    let mut order: Vec<(usize, usize)> = (0..lists.len())
        .flat_map(|p| (0..lists[p].len()).map(move |k| (p, k)))
        .collect();
    order.sort_by(|&(p, k), &(q, m)| {
        cost[offsets[p] + k]
            .cmp(&cost[offsets[q] + m])
            .then(p.cmp(&q))
            .then(lists[p][k].cmp(lists[q][m]))
    });
    let mut removed = vec![false; total];
    let mut out = ConstituentSet::new(first.length).with_id(first.sentence_id);
    for (p, k) in order {
        let node = offsets[p] + k;
        if removed[node] {
            continue;
        }
        if cost[node] as f64 > threshold {
            break;
        }
        out.items.insert(lists[p][k].clone());
        removed[node] = true;
        for &n in &neighbours[node] {
            removed[n] = true;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combiner::{constituent_vote, distance_switch, VoteConfig};
    use crate::synthetic::random_bracketing;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(s: usize, e: usize, l: &str) -> Constituent {
        Constituent::new(s, e, l)
    }

    fn set(items: &[Constituent]) -> ConstituentSet {
        ConstituentSet::from_items(6, items.iter().cloned()).unwrap()
    }

    #[test]
    fn identical_sets_align_for_free() {
        let a = set(&[c(0, 2, "NP"), c(2, 6, "VP")]);
        for kind in DistanceKind::ALL {
            let al = align(&a, &a, kind).unwrap();
            assert_eq!(al.cost, 0);
            assert!(al.pairs.iter().all(|p| p.left == p.right));
        }
    }

    #[test]
    fn swap_costs_two_kronecker_edits() {
        let al = align(&set(&[c(0, 2, "NP")]), &set(&[c(0, 2, "VP")]), DistanceKind::Kronecker).unwrap();
        assert_eq!(al.cost, 2);
        assert!(al.pairs.iter().all(|p| p.left.is_none() || p.right.is_none()));
        let al = align(&set(&[c(0, 2, "NP")]), &set(&[c(0, 2, "VP")]), DistanceKind::Piecewise).unwrap();
        assert_eq!(al.cost, 3);
    }

    #[test]
    fn kronecker_cost_is_symmetric_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let n = rng.gen_range(2..12);
            let a = random_bracketing(&mut rng, n, 3);
            let b = random_bracketing(&mut rng, n, 3);
            let al = align(&a, &b, DistanceKind::Kronecker).unwrap();
            assert_eq!(al.cost as usize, a.mismatch_count(&b));
        }
    }

    #[test]
    fn cost_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let a = random_bracketing(&mut rng, 9, 3);
            let b = random_bracketing(&mut rng, 9, 3);
            for kind in DistanceKind::ALL {
                assert_eq!(align(&a, &b, kind).unwrap().cost, align(&b, &a, kind).unwrap().cost);
            }
        }
    }

    #[test]
    fn kronecker_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let s: Vec<_> = (0..3).map(|_| random_bracketing(&mut rng, 8, 2)).collect();
            let d = |x: usize, y: usize| align(&s[x], &s[y], DistanceKind::Kronecker).unwrap().cost;
            assert!(d(0, 2) <= d(0, 1) + d(1, 2));
        }
    }

    #[test]
    fn kronecker_switch_agrees_with_distance_switch() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let mut checked = 0;
        while checked < 100 {
            let sets: Vec<_> = (0..4).map(|_| random_bracketing(&mut rng, 8, 2)).collect();
            let d = distance_switch(&sets).unwrap();
            if d.tie {
                continue;
            }
            assert_eq!(alignment_switch(&sets, DistanceKind::Kronecker).unwrap().chosen, d.chosen);
            checked += 1;
        }
    }

    #[test]
    fn consensus_of_identical_candidates() {
        let a = set(&[c(0, 2, "NP"), c(2, 6, "VP"), c(3, 6, "NP")]);
        let cands = vec![a.clone(); 3];
        for kind in DistanceKind::ALL {
            assert_eq!(consensus_parse(&cands, kind, 0.0).unwrap(), a);
            assert!(consensus_parse(&cands, kind, -1.0).unwrap().is_empty());
        }
    }

    #[test]
    fn kronecker_consensus_is_majority_vote() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..200 {
            let sets: Vec<_> = (0..3).map(|_| random_bracketing(&mut rng, 10, 3)).collect();
            let t = default_consensus_threshold(DistanceKind::Kronecker, 3);
            assert_eq!(
                consensus_parse(&sets, DistanceKind::Kronecker, t).unwrap(),
                constituent_vote(&sets, VoteConfig::majority(3)).unwrap()
            );
        }
    }
}
