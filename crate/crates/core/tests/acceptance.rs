//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Run with `cargo test --test acceptance`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use parse_ensemble::alignment::{align, alignment_switch, brute_force_edge_cover, min_edge_cover, DistanceKind};
use parse_ensemble::combiner::{
    bayes_hybrid, bayes_train, check_no_crossing, constituent_vote, distance_switch, penalized_similarity_switch,
    BayesConfig, VoteConfig,
};
use parse_ensemble::ensemble::{
    alpha_for, bag, boost, combine_members, decision_masses, ensemble_sets, member_sets, parse_sets, reference_sets,
    simulate, AlphaMode, BoostConfig, WeightScheme,
};
use parse_ensemble::metrics::score_corpus;
use parse_ensemble::synthetic::{noisy_copy, random_bracketing, random_tree, ToyGrammar};
use parse_ensemble::treebank::{enumerate_parses, evalb_transform, inverse_evalb, ConstituentSet};
use parse_ensemble::weak_parser::{PcfgLearner, StubLearner};

// Tolerances and budgets.
const SIMULATION_TOL: f64 = 1e-9;
const ALPHA_TOL: f64 = 1e-12;
const BAGGING_SLACK_F: f64 = 0.5;
const SIMULATION_BUDGET: Duration = Duration::from_secs(1);
const TREE_BUDGET: Duration = Duration::from_secs(30);
const CENTROID_BUDGET: Duration = Duration::from_secs(120);
const BAGGING_BUDGET: Duration = Duration::from_secs(600);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn simulation() -> Outcome {
    let start = Instant::now();
    let rows = simulate(6);
    let elapsed = start.elapsed();
    let expected_weights = [
        [(1, 3), (1, 3), (1, 3)],
        [(1, 4), (1, 2), (1, 4)],
        [(1, 2), (1, 3), (1, 6)],
        [(3, 8), (1, 2), (1, 8)],
        [(1, 2), (2, 5), (1, 10)],
        [(5, 12), (1, 2), (1, 12)],
    ];
    let expected_multipliers = [(1, 2), (1, 3), (1, 2), (3, 5), (2, 3), (5, 7)];
    let f = |q: &Ratio<i64>| *q.numer() as f64 / *q.denom() as f64;
    let mut worst: f64 = 0.0;
    for (row, (w, m)) in rows.iter().zip(expected_weights.iter().zip(expected_multipliers)) {
        for (got, (n, d)) in row.weights.iter().zip(w) {
            worst = worst.max((f(got) - *n as f64 / *d as f64).abs());
        }
        worst = worst.max((f(&row.multiplier) - m.0 as f64 / m.1 as f64).abs());
    }
    let pass = rows.len() == 6 && worst <= SIMULATION_TOL && elapsed < SIMULATION_BUDGET;
    outcome(pass, format!("max deviation {worst:.1e}, {elapsed:.2?}"))
}

fn tree_guarantee() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut failures = 0;
    let mut total = 0;
    for k in [3, 5, 7] {
        for _ in 0..1000 {
            let n = rng.gen_range(2..=15);
            let sets: Vec<ConstituentSet> = (0..k).map(|_| random_bracketing(&mut rng, n, 5)).collect();
            let out = constituent_vote(&sets, VoteConfig::majority(k)).expect("vote");
            total += 1;
            if check_no_crossing(&out).is_err() {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < TREE_BUDGET,
        format!("{failures} crossing outputs in {total} ensembles, {elapsed:.2?}"),
    )
}

fn distance_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut bad_pairs = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=15);
        let a = random_bracketing(&mut rng, n, 5);
        let b = random_bracketing(&mut rng, n, 5);
        let sym = a.items.symmetric_difference(&b.items).count();
        let m = a.items.intersection(&b.items).count();
        if sym != a.len() + b.len() - 2 * m {
            bad_pairs += 1;
        }
        if sym != a.mismatch_count(&b) || m != a.intersection_count(&b) {
            bad_pairs += 1;
        }
    }
    let mut checked = 0;
    let mut disagreements = 0;
    while checked < 1000 {
        let k = rng.gen_range(3..=7);
        let n = rng.gen_range(2..=12);
        let sets: Vec<ConstituentSet> = (0..k).map(|_| random_bracketing(&mut rng, n, 3)).collect();
        let d = distance_switch(&sets).expect("switch");
        let p = penalized_similarity_switch(&sets).expect("switch");
        if d.tie || p.tie {
            continue;
        }
        checked += 1;
        if d.chosen != p.chosen {
            disagreements += 1;
        }
    }
    outcome(
        bad_pairs == 0 && disagreements == 0,
        format!("{bad_pairs} bad pairs of 10000, {disagreements} disagreements on {checked} tie-free ensembles"),
    )
}

fn alignment_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut cost_mismatch = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=15);
        let a = random_bracketing(&mut rng, n, 5);
        let b = random_bracketing(&mut rng, n, 5);
        let cost = align(&a, &b, DistanceKind::Kronecker).expect("align").cost;
        if cost as usize != a.items.symmetric_difference(&b.items).count() {
            cost_mismatch += 1;
        }
    }
    let mut cover_mismatch = 0;
    for _ in 0..200 {
        let na = rng.gen_range(0..=5);
        let nb = rng.gen_range(0..=5);
        let cross: Vec<Vec<i64>> = (0..na).map(|_| (0..nb).map(|_| rng.gen_range(0..20)).collect()).collect();
        let ln: Vec<i64> = (0..na).map(|_| rng.gen_range(0..10)).collect();
        let rn: Vec<i64> = (0..nb).map(|_| rng.gen_range(0..10)).collect();
        let fast = min_edge_cover(&cross, &ln, &rn).expect("cover").cost;
        let slow = brute_force_edge_cover(&cross, &ln, &rn).expect("brute force");
        if fast != slow {
            cover_mismatch += 1;
        }
    }
    outcome(
        cost_mismatch == 0 && cover_mismatch == 0,
        format!("{cost_mismatch}/1000 cost mismatches, {cover_mismatch}/200 cover mismatches"),
    )
}

fn centroid_bound() -> Outcome {
    let start = Instant::now();
    let labels = vec!["A".to_string(), "B".to_string()];
    let space = enumerate_parses(4, &labels, 4).expect("enumerate");
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(3..=7);
        let cands: Vec<ConstituentSet> = (0..n).map(|_| space[rng.gen_range(0..space.len())].clone()).collect();
        let chosen = alignment_switch(&cands, DistanceKind::Kronecker).expect("switch").chosen;
        let chosen_total: i64 = cands
            .iter()
            .map(|c| align(&cands[chosen], c, DistanceKind::Kronecker).expect("align").cost)
            .sum();
        let optimal: usize = space
            .iter()
            .map(|p| cands.iter().map(|c| p.items.symmetric_difference(&c.items).count()).sum())
            .min()
            .expect("nonempty space");
        // chosen_total <= 2(n-1)/n * optimal, in integers.
        if chosen_total as usize * n > 2 * (n - 1) * optimal {
            violations += 1;
        }
        if optimal > 0 {
            worst_ratio = worst_ratio.max(chosen_total as f64 / optimal as f64);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && elapsed < CENTROID_BUDGET,
        format!(
            "{violations}/50 violations over {} parses, worst ratio {worst_ratio:.3}, {elapsed:.2?}",
            space.len()
        ),
    )
}

fn bayes_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let sample = |count: usize, rng: &mut ChaCha8Rng| -> Vec<(Vec<ConstituentSet>, ConstituentSet)> {
        (0..count)
            .map(|_| {
                let n = rng.gen_range(4..=15);
                let reference = random_bracketing(rng, n, 5);
                let parsers = (0..3).map(|_| noisy_copy(rng, &reference, 0.15, 5)).collect();
                (parsers, reference)
            })
            .collect()
    };
    let train = sample(3000, &mut rng);
    let test = sample(500, &mut rng);
    let model = bayes_train(&train, &BayesConfig::default()).expect("train");
    let vote = VoteConfig::new(2, 3).expect("threshold");
    let same = test
        .iter()
        .filter(|(parsers, _)| {
            bayes_hybrid(&model, parsers).expect("hybrid") == constituent_vote(parsers, vote).expect("vote")
        })
        .count();
    outcome(same == test.len(), format!("{same}/{} sentences identical", test.len()))
}

fn alpha_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut oracle_mismatch = 0;
    while checked < 1000 {
        let m = rng.gen_range(1..=10);
        let mut refs = Vec::with_capacity(m);
        let mut hyps = Vec::with_capacity(m);
        for _ in 0..m {
            let n = rng.gen_range(2..10);
            let noise = rng.gen_range(0.0..1.0);
            let r = random_bracketing(&mut rng, n, 3);
            hyps.push(noisy_copy(&mut rng, &r, noise, 3));
            refs.push(r);
        }
        let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.001..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let d: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let masses = decision_masses(&d, &hyps, &refs).expect("masses");
        if masses.a == 0.0 {
            continue;
        }
        checked += 1;
        // Direct form over T(s) = reference ∪ hypothesis with explicit
        // indicator functions.
        let (mut num_f, mut den) = (0.0, 0.0);
        for ((w, h), r) in d.iter().zip(&hyps).zip(&refs) {
            let t: BTreeSet<_> = h.items.union(&r.items).collect();
            if t.is_empty() {
                continue;
            }
            let share = w / t.len() as f64;
            for c in t {
                let dr = r.contains(c) as u8 as f64;
                let dh = h.contains(c) as u8 as f64;
                num_f += share * (dr * (1.0 - dh) + (1.0 - dr) * dh);
                den += share * dr * dh;
            }
        }
        let oracle_f = num_f / den;
        let alpha_f = alpha_for(AlphaMode::F, &masses);
        let alpha_ca = alpha_for(AlphaMode::ConstAcc, &masses);
        if (oracle_f - alpha_f).abs() > ALPHA_TOL * oracle_f.max(1.0) {
            oracle_mismatch += 1;
        }
        worst = worst.max((alpha_f - 2.0 * alpha_ca).abs());
    }
    outcome(
        worst <= ALPHA_TOL && oracle_mismatch == 0,
        format!("max |aF - 2 aCA| = {worst:.1e} on {checked} instances, {oracle_mismatch} oracle mismatches"),
    )
}

fn evalb_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    let mut failures = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=15);
        // Punctuation layout from one random tree, brackets from another.
        let layout = random_tree(&mut rng, n, 5, 0.3);
        let (_, record) = evalb_transform(&layout).expect("transform");
        let set = random_bracketing(&mut rng, n, 5);
        let ok = inverse_evalb(&set, &record)
            .and_then(|tree| evalb_transform(&tree))
            .map(|(again, record_again)| again == set && record_again.punctuation == record.punctuation)
            .unwrap_or(false);
        if !ok {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures}/1000 sets changed by the round trip"))
}

fn bagging_gain() -> Outcome {
    let start = Instant::now();
    let grammar = ToyGrammar::default();
    let mut above_mean = 0;
    let mut near_best = 0;
    let mut details = Vec::new();
    for seed in 0..5u64 {
        let train = grammar.corpus(&mut ChaCha8Rng::seed_from_u64(2000 + seed), 2000);
        let test = grammar.corpus(&mut ChaCha8Rng::seed_from_u64(3000 + seed), 500);
        let refs = reference_sets(&test).expect("references");
        let bagged = bag(&train, &PcfgLearner, 15, WeightScheme::Uniform, seed).expect("bagging");
        let per_member = member_sets(&PcfgLearner, &bagged.members, &test).expect("parse");
        let member_f: Vec<f64> = per_member
            .iter()
            .map(|sets| score_corpus(sets, &refs).expect("score").f_measure * 100.0)
            .collect();
        let combined = combine_members(&per_member, &vec![1.0; per_member.len()]).expect("vote");
        let ensemble_f = score_corpus(&combined, &refs).expect("score").f_measure * 100.0;
        let mean = member_f.iter().sum::<f64>() / member_f.len() as f64;
        let best = member_f.iter().copied().fold(f64::MIN, f64::max);
        if ensemble_f >= mean {
            above_mean += 1;
        }
        if ensemble_f >= best - BAGGING_SLACK_F {
            near_best += 1;
        }
        details.push(format!("seed {seed}: ens {ensemble_f:.2} mean {mean:.2} best {best:.2}"));
    }
    let elapsed = start.elapsed();
    outcome(
        above_mean >= 4 && near_best == 5 && elapsed < BAGGING_BUDGET,
        format!("{}; {elapsed:.1?}", details.join("; ")),
    )
}

fn boosting_backoff() -> Outcome {
    let corpus = ToyGrammar::default().corpus(&mut ChaCha8Rng::seed_from_u64(4000), 200);
    let iterations = 6;
    let stub = StubLearner::violating_at(&[3], iterations);
    let cfg = BoostConfig {
        iterations,
        alpha_mode: AlphaMode::ConstAcc,
        backoff: true,
        seed: 17,
        ..BoostConfig::default()
    };
    let run = boost(&corpus, &stub, &cfg).expect("boosting");
    let ledger = &run.ledger;
    let third = &ledger.records[2];
    let reset_to_initial = ledger.snapshots[3] == ledger.snapshots[0];
    let excluded = !run.members[2].retained() && run.members.iter().filter(|m| m.retained()).count() == iterations - 1;
    // The final vote must equal a vote over the other members alone.
    let final_sets = ensemble_sets(&stub, &run.members, &corpus).expect("ensemble");
    let others: Vec<Vec<ConstituentSet>> = run
        .members
        .iter()
        .filter(|m| m.iteration != 3)
        .map(|m| parse_sets(&stub, &m.model, &corpus).expect("parse"))
        .collect();
    let weights: Vec<f64> = run.members.iter().filter(|m| m.iteration != 3).map(|m| m.vote_weight).collect();
    let expected = combine_members(&others, &weights).expect("vote");
    let pass = ledger.discards() == 1
        && ledger.resets() == 1
        && third.discarded
        && third.reset
        && reset_to_initial
        && excluded
        && final_sets == expected;
    outcome(
        pass,
        format!(
            "{} discards, {} resets, iteration 3 error {:.3}, D4 == D1: {reset_to_initial}, member 3 excluded: {excluded}",
            ledger.discards(),
            ledger.resets(),
            third.error
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("simulation reproduction", simulation),
        ("tree guarantee", tree_guarantee),
        ("distance/similarity identity", distance_identity),
        ("alignment oracle", alignment_oracle),
        ("centroid bound", centroid_bound),
        ("bayes reduction", bayes_reduction),
        ("alpha identity", alpha_identity),
        ("evalb round trip", evalb_round_trip),
        ("bagging gain", bagging_gain),
        ("boosting back-off", boosting_backoff),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
