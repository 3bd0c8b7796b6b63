use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{create_dir, emit, learner_choice, load_trees, read_input, BagArgs, BoostArgs, DiagnoseArgs,
            LearnerArgs, LearnerChoice, PcfgParseArgs, PcfgTrainArgs, SimulateArgs};
use crate::ensemble::{self, combine_members, diagnose_weights, memorization_check, parse_sets, reference_sets,
                      simulate as run_simulation, simulation_csv, BoostConfig, EnsembleMember, WeightLedger,
                      WeightScheme};
use crate::error::{Error, Result};
use crate::metrics::score_corpus;
use crate::report::{strip_manifest, Manifest};
use crate::treebank::{write_trees, ParseTree};
use crate::weak_parser::{Learner, PcfgLearner, PcfgModel};

struct Setup {
    manifest: Manifest,
    corpus: Vec<ParseTree>,
    test: Option<Vec<ParseTree>>,
    scheme: WeightScheme,
}

fn setup(command: &str, args: &LearnerArgs) -> Result<(Setup, LearnerChoice)> {
    let learner = learner_choice(&args.learner)?;
    let scheme: WeightScheme = args.scheme.parse()?;
    let mut manifest = Manifest::new(command);
    manifest.set("learner", &args.learner);
    manifest.set("scheme", scheme);
    manifest.set("seed", args.seed);
    let corpus = load_trees(&mut manifest, &args.corpus)?;
    let test = args.test.as_ref().map(|t| load_trees(&mut manifest, t)).transpose()?;
    create_dir(&args.out)?;
    Ok((
        Setup {
            manifest,
            corpus,
            test,
            scheme,
        },
        learner,
    ))
}

pub(super) fn bag(args: BagArgs) -> Result<()> {
    let (mut s, learner) = setup("bag", &args.common)?;
    s.manifest.set("k", args.k);
    let c = &args.common;
    match learner {
        LearnerChoice::Pcfg => {
            let b = ensemble::bag(&s.corpus, &PcfgLearner, args.k, s.scheme, c.seed)?;
            report_members(&PcfgLearner, &b.members, &b.replicates, &s, &c.out)
        }
        LearnerChoice::External(l) => {
            let b = ensemble::bag(&s.corpus, &l, args.k, s.scheme, c.seed)?;
            report_members(&l, &b.members, &b.replicates, &s, &c.out)
        }
    }
}

pub(super) fn boost(args: BoostArgs) -> Result<()> {
    let (mut s, learner) = setup("boost", &args.common)?;
    let cfg = BoostConfig {
        iterations: args.iterations,
        alpha_mode: args.alpha.parse()?,
        backoff: args.backoff,
        seed: args.common.seed,
        scheme: s.scheme,
        vote_weight: args.vote_weight.parse()?,
    };
    s.manifest.set("iterations", cfg.iterations);
    s.manifest.set("alpha", cfg.alpha_mode);
    s.manifest.set("backoff", cfg.backoff);
    s.manifest.set("vote_weight", cfg.vote_weight);
    let out = &args.common.out;
    let ledger = match learner {
        LearnerChoice::Pcfg => {
            let b = ensemble::boost(&s.corpus, &PcfgLearner, &cfg)?;
            report_members(&PcfgLearner, &b.members, &b.replicates, &s, out)?;
            b.ledger
        }
        LearnerChoice::External(l) => {
            let b = ensemble::boost(&s.corpus, &l, &cfg)?;
            report_members(&l, &b.members, &b.replicates, &s, out)?;
            b.ledger
        }
    };
    s.manifest.write(&out.join("ledger.csv"), &ledger.csv())?;
    s.manifest.write(&out.join("weights.csv"), &ledger.weights_csv())
}

/// Saves member models and writes members.csv; with a test set, also scores
/// every member and the ensemble and prints the headline numbers.
fn report_members<L: Learner>(
    learner: &L,
    members: &[EnsembleMember<L::Model>],
    replicates: &[Vec<usize>],
    s: &Setup,
    out: &Path,
) -> Result<()> {
    for m in members {
        learner.save_model(&m.model, &out.join(format!("member-{:02}.model", m.iteration)))?;
    }
    let test_f: Vec<Option<f64>>;
    let mut scores = String::from("system,sentences,a,b,c,precision,recall,f_measure,exact\n");
    if let Some(test) = &s.test {
        let refs = reference_sets(test)?;
        let per_member = members
            .iter()
            .map(|m| parse_sets(learner, &m.model, test))
            .collect::<Result<Vec<_>>>()?;
        let mut voting = Vec::new();
        let mut weights = Vec::new();
        let mut fs = Vec::new();
        for (m, sets) in members.iter().zip(per_member) {
            let r = score_corpus(&sets, &refs)?;
            score_row(&mut scores, &format!("member-{:02}", m.iteration), &r);
            fs.push(Some(r.f_measure));
            if m.retained() {
                voting.push(sets);
                weights.push(m.vote_weight);
            }
        }
        let ens = score_corpus(&combine_members(&voting, &weights)?, &refs)?;
        score_row(&mut scores, "ensemble", &ens);
        s.manifest.write(&out.join("scores.csv"), &scores)?;

        let retained: Vec<f64> = members
            .iter()
            .zip(&fs)
            .filter(|(m, _)| m.retained())
            .filter_map(|(_, f)| *f)
            .collect();
        let mean = retained.iter().sum::<f64>() / retained.len() as f64;
        let best = retained.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let summary = format!(
            "system,f_measure\nensemble,{:.6}\nmean_member,{mean:.6}\nbest_member,{best:.6}\n",
            ens.f_measure
        );
        emit(None, &s.manifest.wrap(&summary))?;
        test_f = fs;
    } else {
        test_f = vec![None; members.len()];
    }

    let mut csv =
        String::from("member,alpha,vote_weight,retained,training_error,unique_samples,test_f_measure,note\n");
    for ((m, idx), f) in members.iter().zip(replicates).zip(&test_f) {
        let unique = idx.iter().collect::<BTreeSet<_>>().len();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            m.iteration,
            m.alpha,
            m.vote_weight,
            m.retained(),
            m.error.map(|e| e.to_string()).unwrap_or_default(),
            unique,
            f.map(|f| format!("{f:.6}")).unwrap_or_default(),
            m.discarded.as_deref().unwrap_or("").replace(',', ";")
        );
    }
    s.manifest.write(&out.join("members.csv"), &csv)
}

fn score_row(out: &mut String, system: &str, r: &crate::metrics::ScoreReport) {
    let _ = writeln!(
        out,
        "{system},{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
        r.sentence_count, r.totals.a, r.totals.b, r.totals.c, r.precision, r.recall, r.f_measure, r.exact
    );
}

pub(super) fn diagnose(args: DiagnoseArgs) -> Result<()> {
    let mut manifest = Manifest::new("diagnose");
    create_dir(&args.out)?;
    let corpus = args.corpus.as_ref().map(|c| load_trees(&mut manifest, c)).transpose()?;
    if let Some(weights) = &args.weights {
        manifest.set("bins", args.bins);
        manifest.set("top", args.top);
        let ledger = read_weights(&read_input(&mut manifest, weights)?)?;
        let d = diagnose_weights(&ledger, args.bins, args.top)?;
        manifest.write(&args.out.join("bins.csv"), &d.bins_csv())?;
        return manifest.write(&args.out.join("heaviest.csv"), &d.heaviest_csv(corpus.as_deref()));
    }
    let corpus = corpus.ok_or_else(|| Error::InvalidArgument("diagnose needs --corpus or --weights".into()))?;
    manifest.set("learner", &args.learner);
    manifest.set("replication", args.replication);
    let report = match learner_choice(&args.learner)? {
        LearnerChoice::Pcfg => memorization_check(&corpus, &PcfgLearner, args.replication)?,
        LearnerChoice::External(l) => memorization_check(&corpus, &l, args.replication)?,
    };
    let mut csv = String::from("sample,f_measure,unlearnable\n");
    for (i, f) in report.f_measures.iter().enumerate() {
        let _ = writeln!(csv, "{i},{f:.6},{}", *f < 1.0);
    }
    manifest.write(&args.out.join("memorization.csv"), &csv)?;
    std::fs::write(args.out.join("trimmed.mrg"), write_trees(&report.trimmed)?)?;
    emit(
        None,
        &format!(
            "{} of {} samples unlearnable\n",
            report.unlearnable.len(),
            report.f_measures.len()
        ),
    )
}

/// Rebuilds a ledger's snapshots from the long-format weights table.
fn read_weights(text: &str) -> Result<WeightLedger> {
    let bad = |line: usize, message: String| Error::Parse { line, message };
    let mut ledger = WeightLedger::default();
    for (n, line) in strip_manifest(text).lines().enumerate().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(bad(n + 1, format!("expected 4 fields, got {}", fields.len())));
        }
        let parse_usize = |s: &str| s.parse::<usize>().map_err(|e| bad(n + 1, e.to_string()));
        let snapshot = parse_usize(fields[0])?;
        let sample = parse_usize(fields[1])?;
        let weight: f64 = fields[2].parse().map_err(|e| bad(n + 1, format!("{e}")))?;
        let up = parse_usize(fields[3])?;
        if snapshot == 0 || snapshot > ledger.snapshots.len() + 1 || sample != ledger_len(&ledger, snapshot) {
            return Err(bad(n + 1, "rows must be ordered by snapshot then sample".into()));
        }
        if snapshot > ledger.snapshots.len() {
            ledger.snapshots.push(Vec::new());
        }
        ledger.snapshots[snapshot - 1].push(weight);
        if snapshot == 1 {
            ledger.up_counts.push(up);
        }
    }
    Ok(ledger)
}

fn ledger_len(ledger: &WeightLedger, snapshot: usize) -> usize {
    ledger.snapshots.get(snapshot - 1).map_or(0, Vec::len)
}

pub(super) fn simulate(args: SimulateArgs) -> Result<()> {
    let mut manifest = Manifest::new("simulate");
    manifest.set("iterations", args.iterations);
    emit(args.output.as_deref(), &manifest.wrap(&simulation_csv(&run_simulation(args.iterations))))
}

pub(super) fn pcfg_train(args: PcfgTrainArgs) -> Result<()> {
    let mut manifest = Manifest::new("pcfg-train");
    let corpus = load_trees(&mut manifest, &args.corpus)?;
    let model = PcfgLearner.train(&corpus)?;
    PcfgLearner.save_model(&model, &args.model)
}

pub(super) fn pcfg_parse(args: PcfgParseArgs) -> Result<()> {
    let mut manifest = Manifest::new("pcfg-parse");
    let model = PcfgModel::load(&read_input(&mut manifest, &args.model)?)?;
    let input = read_input(&mut manifest, &args.input)?;
    let mut out = String::new();
    for line in input.lines() {
        let words: Vec<&str> = line.split_whitespace().collect();
        if let Some(tree) = (!words.is_empty()).then(|| model.cky(&words)).flatten() {
            out += &tree.to_string();
        }
        out.push('\n');
    }
    std::fs::write(&args.output, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::simulation_ledger;

    #[test]
    fn weights_table_round_trips() {
        let ledger = simulation_ledger(&run_simulation(4));
        let text = Manifest::new("boost").wrap(&ledger.weights_csv());
        let back = read_weights(&text).unwrap();
        assert_eq!(back.snapshots, ledger.snapshots);
        assert_eq!(back.up_counts, ledger.up_counts);
    }

    #[test]
    fn disordered_weights_are_rejected() {
        assert!(read_weights("snapshot,sample,weight,up_count\n1,1,0.5,0\n").is_err());
        assert!(read_weights("snapshot,sample,weight,up_count\n1,0,0.5\n").is_err());
    }
}
