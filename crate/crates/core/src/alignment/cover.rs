//! Minimum-weight edge cover of a bipartite graph whose two sides each carry
//! an extra NULL vertex. Real vertices must be covered; NULL vertices need not
//! be.
//!
//! Let μ(v) be the cheapest edge at v, NULL edge included. For nonnegative
//! weights the optimal cover costs Σ μ(v) plus the cheapest matching under
//! reduced weights min(0, w(u, v) − μ(u) − μ(v)); matched edges are kept and
//! every unmatched vertex takes its cheapest edge.

use crate::error::{Error, Result};

/// One chosen edge: `None` on a side means that side's NULL vertex.
pub type CoverEdge = (Option<usize>, Option<usize>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCover {
    pub cost: i64,
    pub edges: Vec<CoverEdge>,
}

fn check(cross: &[Vec<i64>], left_null: &[i64], right_null: &[i64]) -> Result<()> {
    if cross.len() != left_null.len() || cross.iter().any(|row| row.len() != right_null.len()) {
        return Err(Error::InvalidArgument("edge cover weight matrix has the wrong shape".into()));
    }
    let all = cross.iter().flatten().chain(left_null).chain(right_null);
    if all.clone().any(|&w| w < 0) {
        return Err(Error::InvalidArgument("edge cover weights must be nonnegative".into()));
    }
    Ok(())
}

/// `cross[a][b]` weighs edge a–b, `left_null[a]` edge a–NULL and
/// `right_null[b]` edge NULL–b.
pub fn min_edge_cover(cross: &[Vec<i64>], left_null: &[i64], right_null: &[i64]) -> Result<EdgeCover> {
    check(cross, left_null, right_null)?;
    let (na, nb) = (left_null.len(), right_null.len());

    // Cheapest edge per vertex; ties prefer the lowest real partner, then NULL.
    let mut best_a: Vec<(i64, Option<usize>)> = Vec::with_capacity(na);
    for a in 0..na {
        let mut best = (left_null[a], None);
        for b in (0..nb).rev() {
            if cross[a][b] <= best.0 {
                best = (cross[a][b], Some(b));
            }
        }
        best_a.push(best);
    }
    let mut best_b: Vec<(i64, Option<usize>)> = Vec::with_capacity(nb);
    for b in 0..nb {
        let mut best = (right_null[b], None);
        for a in (0..na).rev() {
            if cross[a][b] <= best.0 {
                best = (cross[a][b], Some(a));
            }
        }
        best_b.push(best);
    }

    let n = na.max(nb);
    let mut reduced = vec![vec![0i64; n]; n];
    for a in 0..na {
        for b in 0..nb {
            reduced[a][b] = (cross[a][b] - best_a[a].0 - best_b[b].0).min(0);
        }
    }
    let assignment = hungarian(&reduced);

    let mut edges = Vec::new();
    let mut a_done = vec![false; na];
    let mut b_done = vec![false; nb];
    for (a, &b) in assignment.iter().enumerate().take(na) {
        if b < nb && reduced[a][b] < 0 {
            edges.push((Some(a), Some(b)));
            a_done[a] = true;
            b_done[b] = true;
        }
    }
    for a in (0..na).filter(|&a| !a_done[a]) {
        edges.push((Some(a), best_a[a].1));
        if let Some(b) = best_a[a].1 {
            b_done[b] = true;
        }
    }
    for b in (0..nb).filter(|&b| !b_done[b]) {
        edges.push((best_b[b].1, Some(b)));
    }
    edges.sort();
    edges.dedup();
    let cost = edges.iter().map(|&e| edge_weight(cross, left_null, right_null, e)).sum();
    Ok(EdgeCover { cost, edges })
}

fn edge_weight(cross: &[Vec<i64>], left_null: &[i64], right_null: &[i64], e: CoverEdge) -> i64 {
    match e {
        (Some(a), Some(b)) => cross[a][b],
        (Some(a), None) => left_null[a],
        (None, Some(b)) => right_null[b],
        (None, None) => 0,
    }
}

/// Minimum cost assignment on a square matrix; returns the column for each
/// row.
fn hungarian(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    const INF: i64 = i64::MAX / 4;
    // 1-based potentials over rows (u) and columns (v); p[j] is the row
    // matched to column j.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        row_to_col[p[j] - 1] = j - 1;
    }
    row_to_col
}

/// Exhaustive minimum cover cost for small instances (at most 12 vertices
/// on the right side).
pub fn brute_force_edge_cover(cross: &[Vec<i64>], left_null: &[i64], right_null: &[i64]) -> Result<i64> {
    check(cross, left_null, right_null)?;
    let nb = right_null.len();
    if nb > 12 {
        return Err(Error::Limit("brute-force cover allows at most 12 right vertices".into()));
    }
    let full = (1usize << nb) - 1;
    const INF: i64 = i64::MAX / 4;
    // dp[mask]: cheapest way to cover the left vertices seen so far while
    // covering exactly the right vertices in `mask`.
    let mut dp = vec![INF; full + 1];
    dp[0] = 0;
    for a in 0..left_null.len() {
        let mut next = vec![INF; full + 1];
        // Edge choices at a: any nonempty subset of the right vertices plus
        // NULL. Bit nb stands for the NULL edge.
        for choice in 1usize..(1 << (nb + 1)) {
            let mut w = 0;
            for b in 0..nb {
                if choice >> b & 1 == 1 {
                    w += cross[a][b];
                }
            }
            if choice >> nb & 1 == 1 {
                w += left_null[a];
            }
            let covers = choice & full;
            for mask in 0..=full {
                if dp[mask] < INF {
                    let m = mask | covers;
                    next[m] = next[m].min(dp[mask] + w);
                }
            }
        }
        dp = next;
    }
    let mut best = INF;
    for (mask, &d) in dp.iter().enumerate() {
        if d < INF {
            let rest: i64 = (0..nb).filter(|b| mask >> b & 1 == 0).map(|b| right_null[b]).sum();
            best = best.min(d + rest);
        }
    }
    Ok(best)
}
