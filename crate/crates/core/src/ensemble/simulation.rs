//! Boosting a three-sample inconsistent dataset in exact arithmetic.
//!
//! The samples are (a, −1), (a, 1) and (b, 1). The learner always gets (b, 1)
//! right and predicts, for feature a, the label of the heavier a-sample; on a
//! tie it predicts −1. So exactly one a-sample is wrong each round. Correct
//! samples are multiplied by α = ε/(1−ε) and the weights renormalized.

use std::fmt::Write as _;

use num_rational::Ratio;

use super::boosting::WeightLedger;

pub type Q = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationRow {
    pub iteration: usize,
    pub weights: [Q; 3],
    /// Index of the sample predicted wrongly this round.
    pub wrong: usize,
    pub error: Q,
    /// The update multiplier α applied to correct samples.
    pub multiplier: Q,
}

pub fn simulate(iterations: usize) -> Vec<SimulationRow> {
    let one = Q::from_integer(1);
    let mut w = [Q::new(1, 3); 3];
    let mut rows = Vec::with_capacity(iterations);
    for t in 1..=iterations {
        let wrong = if w[1] > w[0] { 0 } else { 1 };
        let error = w[wrong];
        let multiplier = error / (one - error);
        rows.push(SimulationRow {
            iteration: t,
            weights: w,
            wrong,
            error,
            multiplier,
        });
        let raw: Vec<Q> = (0..3).map(|i| if i == wrong { w[i] } else { w[i] * multiplier }).collect();
        let total: Q = raw.iter().copied().sum();
        for i in 0..3 {
            w[i] = raw[i] / total;
        }
    }
    rows
}

/// The table with exact fractions and their decimal values.
pub fn simulation_csv(rows: &[SimulationRow]) -> String {
    let mut out = String::from("iteration,w_a_neg,w_a_pos,w_b_pos,wrong_sample,weighted_error,multiplier,w_a_neg_f,w_a_pos_f,w_b_pos_f,weighted_error_f,multiplier_f\n");
    let f = |q: &Q| *q.numer() as f64 / *q.denom() as f64;
    let names = ["a-", "a+", "b+"];
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.iteration,
            r.weights[0],
            r.weights[1],
            r.weights[2],
            names[r.wrong],
            r.error,
            r.multiplier,
            f(&r.weights[0]),
            f(&r.weights[1]),
            f(&r.weights[2]),
            f(&r.error),
            f(&r.multiplier)
        );
    }
    out
}

/// The simulation's weight history as a ledger, for the weight diagnostics.
pub fn simulation_ledger(rows: &[SimulationRow]) -> WeightLedger {
    let to_f = |q: &Q| *q.numer() as f64 / *q.denom() as f64;
    let mut up_counts = vec![0; 3];
    for pair in rows.windows(2) {
        for i in 0..3 {
            if pair[1].weights[i] > pair[0].weights[i] {
                up_counts[i] += 1;
            }
        }
    }
    WeightLedger {
        snapshots: rows.iter().map(|r| r.weights.iter().map(to_f).collect()).collect(),
        up_counts,
        records: Vec::new(),
    }
}
