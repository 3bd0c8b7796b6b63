use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{emit, emit_forest, load_forest, load_trees, read_input, AlignArgs, BayesArgs, CombineArgs, EvalArgs,
            OracleArgs, SwitchArgs};
use crate::alignment::{align as align_sets, alignment_switch, consensus_parse, default_consensus_threshold,
                       DistanceKind};
use crate::combiner::{bayes_hybrid, bayes_switch, bayes_train, constituent_vote, distance_switch,
                      penalized_similarity_switch, similarity_switch, weighted_vote, BayesConfig, BayesModel,
                      ContextFeature, SwitchDecision, VoteConfig};
use crate::ensemble::reference_sets;
use crate::error::{Error, Result};
use crate::metrics::{average_baseline, max_precision_oracle, parser_switch_oracle, score_corpus, score_multiset, ScoreReport, Scorer};
use crate::report::Manifest;
use crate::treebank::{evalb_bag, evalb_transform, inverse_evalb, ConstituentSet, ParseTree, PunctuationRecord};
use crate::weak_parser::hypothesis_set;

type Hybridizer = Box<dyn Fn(&[ConstituentSet]) -> Result<ConstituentSet> + Sync>;
type Chooser = Box<dyn Fn(&[ConstituentSet]) -> Result<SwitchDecision> + Sync>;

/// One test sentence as seen by every parser.
struct Sentence {
    parses: Vec<Option<ParseTree>>,
    /// Scored sets per parser; None when no parser and no gold tree covers
    /// the sentence.
    sets: Option<Vec<ConstituentSet>>,
    record: Option<PunctuationRecord>,
    /// Tree the tokens came from; written back when nothing is left to rebuild.
    source: Option<ParseTree>,
}

fn sentence_error(i: usize, e: Error) -> Error {
    Error::Parse {
        line: i + 1,
        message: e.to_string(),
    }
}

fn load_forests(manifest: &mut Manifest, files: &[PathBuf]) -> Result<Vec<Vec<Option<ParseTree>>>> {
    let forests = files
        .iter()
        .map(|f| load_forest(manifest, f))
        .collect::<Result<Vec<_>>>()?;
    if let Some(first) = forests.first() {
        for (f, path) in forests.iter().zip(files) {
            if f.len() != first.len() {
                return Err(Error::Parse {
                    line: f.len().min(first.len()) + 1,
                    message: format!(
                        "{} has {} lines but {} has {}",
                        path.display(),
                        f.len(),
                        files[0].display(),
                        first.len()
                    ),
                });
            }
        }
    }
    Ok(forests)
}

/// Aligns the parser outputs sentence by sentence. Tokens and punctuation
/// come from the gold tree when there is one, else from the first parser
/// that produced a parse.
fn prepare(forests: Vec<Vec<Option<ParseTree>>>, gold: Option<&[ParseTree]>) -> Result<Vec<Sentence>> {
    let n = forests.first().map_or(0, Vec::len);
    if let Some(g) = gold {
        if g.len() != n {
            return Err(Error::Parse {
                line: n.min(g.len()) + 1,
                message: format!("{n} parsed sentences but {} gold trees", g.len()),
            });
        }
    }
    let mut by_sentence: Vec<Vec<Option<ParseTree>>> = vec![Vec::with_capacity(forests.len()); n];
    for forest in forests {
        for (i, p) in forest.into_iter().enumerate() {
            by_sentence[i].push(p);
        }
    }
    by_sentence
        .into_par_iter()
        .enumerate()
        .map(|(i, parses)| {
            let source = match gold {
                Some(g) => Some(g[i].clone()),
                None => parses.iter().flatten().next().cloned(),
            };
            let Some(src) = &source else {
                return Ok(Sentence {
                    parses,
                    sets: None,
                    record: None,
                    source,
                });
            };
            let tokens = src.sentence();
            let sets = parses
                .iter()
                .map(|p| hypothesis_set(p.as_ref(), &tokens).map(|s| s.with_id(i)))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| sentence_error(i, e))?;
            let record = match evalb_transform(src) {
                Ok((_, r)) => Some(r),
                Err(Error::EmptyAfterPruning) => None,
                Err(e) => return Err(sentence_error(i, e)),
            };
            Ok(Sentence {
                parses,
                sets: Some(sets),
                record,
                source,
            })
        })
        .collect()
}

fn rebuild(s: &Sentence, set: &ConstituentSet) -> Result<String> {
    match (&s.record, &s.source) {
        (Some(r), _) => Ok(inverse_evalb(set, r)?.to_string()),
        (None, Some(t)) => Ok(t.to_string()),
        (None, None) => Ok(String::new()),
    }
}

fn forest_text(lines: Vec<String>) -> String {
    lines.into_iter().map(|l| l + "\n").collect()
}

fn load_gold(manifest: &mut Manifest, gold: Option<&Path>) -> Result<Option<Vec<ParseTree>>> {
    gold.map(|g| load_trees(manifest, g)).transpose()
}

fn bayes_model(args: &BayesArgs, k: usize, manifest: &mut Manifest) -> Result<BayesModel> {
    if let Some(path) = &args.model {
        return BayesModel::load(&read_input(manifest, path)?);
    }
    let gold_path = args
        .train_gold
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("bayes needs --model or --train-gold with --train files".into()))?;
    if args.train.len() != k {
        return Err(Error::InvalidArgument(format!(
            "{} --train files for {k} parsers",
            args.train.len()
        )));
    }
    let cfg = BayesConfig {
        kind: args.kind.parse()?,
        lambda: args.lambda,
        contexts: ContextFeature::parse_list(&args.contexts)?,
    };
    manifest.set("bayes_kind", &args.kind);
    manifest.set("lambda", args.lambda);
    manifest.set("contexts", &args.contexts);
    let gold = load_trees(manifest, gold_path)?;
    let refs = reference_sets(&gold)?;
    let sentences = prepare(load_forests(manifest, &args.train)?, Some(&gold))?;
    let data: Vec<(Vec<ConstituentSet>, ConstituentSet)> = sentences
        .into_iter()
        .zip(refs)
        .map(|(s, r)| (s.sets.expect("gold covers every sentence"), r))
        .collect();
    let model = bayes_train(&data, &cfg)?;
    if let Some(path) = &args.save_model {
        std::fs::write(path, model.save())?;
    }
    Ok(model)
}

pub(super) fn combine(args: CombineArgs) -> Result<()> {
    let mut manifest = Manifest::new("combine");
    let k = args.files.len();
    manifest.set("mode", &args.mode);
    let combiner: Hybridizer = match args.mode.as_str() {
        "vote" => {
            let cfg = match args.threshold {
                None => VoteConfig::majority(k),
                Some(t) if t.fract() == 0.0 && t >= 0.0 => VoteConfig::new(t as usize, k)?,
                Some(t) => return Err(Error::InvalidArgument(format!("vote threshold {t} is not a whole number"))),
            };
            manifest.set("threshold", cfg.threshold);
            Box::new(move |sets| constituent_vote(sets, cfg))
        }
        "weighted" => {
            if args.weights.len() != k {
                return Err(Error::InvalidArgument(format!("{} weights for {k} parsers", args.weights.len())));
            }
            let weights = args.weights.clone();
            manifest.set("weights", format!("{weights:?}"));
            Box::new(move |sets| weighted_vote(sets, &weights))
        }
        "bayes" => {
            let model = bayes_model(&args.bayes, k, &mut manifest)?;
            Box::new(move |sets| bayes_hybrid(&model, sets))
        }
        "consensus" => {
            let kind: DistanceKind = args.distance.parse()?;
            let threshold = args.threshold.unwrap_or_else(|| default_consensus_threshold(kind, k));
            manifest.set("distance", kind);
            manifest.set("threshold", threshold);
            Box::new(move |sets| consensus_parse(sets, kind, threshold))
        }
        other => return Err(Error::InvalidArgument(format!("unknown combination mode {other:?}"))),
    };
    let gold = load_gold(&mut manifest, args.gold.as_deref())?;
    let sentences = prepare(load_forests(&mut manifest, &args.files)?, gold.as_deref())?;
    let lines = sentences
        .par_iter()
        .enumerate()
        .map(|(i, s)| match &s.sets {
            None => Ok(String::new()),
            Some(sets) => combiner(sets).and_then(|c| rebuild(s, &c)).map_err(|e| sentence_error(i, e)),
        })
        .collect::<Result<Vec<_>>>()?;
    emit_forest(args.output.as_deref(), &forest_text(lines), &manifest)
}

pub(super) fn switch(args: SwitchArgs) -> Result<()> {
    let mut manifest = Manifest::new("switch");
    let k = args.files.len();
    manifest.set("method", &args.method);
    let chooser: Chooser = match args.method.as_str() {
        "similarity" => Box::new(similarity_switch),
        "distance" => Box::new(distance_switch),
        "penalized" => Box::new(penalized_similarity_switch),
        "align" => {
            let kind: DistanceKind = args.distance.parse()?;
            manifest.set("distance", kind);
            Box::new(move |c| alignment_switch(c, kind))
        }
        "bayes" => {
            let model = bayes_model(&args.bayes, k, &mut manifest)?;
            Box::new(move |c| bayes_switch(&model, c))
        }
        other => return Err(Error::InvalidArgument(format!("unknown switching method {other:?}"))),
    };
    let gold = load_gold(&mut manifest, args.gold.as_deref())?;
    let sentences = prepare(load_forests(&mut manifest, &args.files)?, gold.as_deref())?;
    let decisions = sentences
        .par_iter()
        .enumerate()
        .map(|(i, s)| s.sets.as_deref().map(&chooser).transpose().map_err(|e| sentence_error(i, e)))
        .collect::<Result<Vec<_>>>()?;

    let mut forest = String::new();
    let mut csv = String::from("sentence,chosen_file,tie");
    for j in 1..=k {
        let _ = write!(csv, ",score_{j}");
    }
    csv.push('\n');
    for (i, (s, d)) in sentences.iter().zip(&decisions).enumerate() {
        match d {
            Some(d) => {
                if let Some(tree) = &s.parses[d.chosen] {
                    forest += &tree.to_string();
                }
                let _ = write!(csv, "{},{},{}", i + 1, d.chosen + 1, d.tie);
                for score in &d.scores {
                    let _ = write!(csv, ",{score}");
                }
            }
            None => {
                let _ = write!(csv, "{},,false{}", i + 1, ",".repeat(k));
            }
        }
        forest.push('\n');
        csv.push('\n');
    }
    emit_forest(args.output.as_deref(), &forest, &manifest)?;
    if let Some(path) = &args.choices {
        manifest.write(path, &csv)?;
    }
    Ok(())
}

fn csv_constituent(c: Option<&crate::treebank::Constituent>) -> String {
    match c {
        Some(c) => format!("{},{},{}", c.start, c.end, c.label),
        None => ",,NULL".to_string(),
    }
}

pub(super) fn align(args: AlignArgs) -> Result<()> {
    let mut manifest = Manifest::new("align");
    let kind: DistanceKind = args.distance.parse()?;
    manifest.set("distance", kind);
    let gold = load_gold(&mut manifest, args.gold.as_deref())?;
    let files = [args.left.clone(), args.right.clone()];
    let sentences = prepare(load_forests(&mut manifest, &files)?, gold.as_deref())?;
    let alignments = sentences
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            s.sets
                .as_ref()
                .map(|sets| align_sets(&sets[0], &sets[1], kind))
                .transpose()
                .map_err(|e| sentence_error(i, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut csv = String::from(
        "sentence,sentence_cost,left_start,left_end,left_label,right_start,right_end,right_label,weight\n",
    );
    for (i, a) in alignments.iter().enumerate() {
        let Some(a) = a else { continue };
        for p in &a.pairs {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                i + 1,
                a.cost,
                csv_constituent(p.left.as_ref()),
                csv_constituent(p.right.as_ref()),
                p.weight
            );
        }
    }
    emit(args.output.as_deref(), &manifest.wrap(&csv))
}

fn report_row(out: &mut String, system: &str, r: &ScoreReport) {
    let _ = writeln!(
        out,
        "{system},{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
        r.sentence_count, r.totals.a, r.totals.b, r.totals.c, r.precision, r.recall, r.f_measure, r.exact
    );
}

pub(super) fn oracle(args: OracleArgs) -> Result<()> {
    let mut manifest = Manifest::new("oracle");
    let gold = load_trees(&mut manifest, &args.gold)?;
    let refs = reference_sets(&gold)?;
    let sentences = prepare(load_forests(&mut manifest, &args.files)?, Some(&gold))?;
    let candidates: Vec<Vec<ConstituentSet>> = sentences
        .into_iter()
        .map(|s| s.sets.expect("gold covers every sentence"))
        .collect();
    let mut csv = String::from("system,sentences,a,b,c,precision,recall,f_measure,exact\n");
    let mut singles = Vec::new();
    for (j, path) in args.files.iter().enumerate() {
        let guesses: Vec<ConstituentSet> = candidates.iter().map(|c| c[j].clone()).collect();
        let r = score_corpus(&guesses, &refs)?;
        report_row(&mut csv, &path.display().to_string().replace(',', "_"), &r);
        singles.push(r);
    }
    report_row(&mut csv, "average", &average_baseline(&singles)?);
    report_row(&mut csv, "switch_oracle", &parser_switch_oracle(&candidates, &refs)?);
    report_row(&mut csv, "max_precision_oracle", &max_precision_oracle(&candidates, &refs)?);
    emit(args.output.as_deref(), &manifest.wrap(&csv))
}

pub(super) fn eval(args: EvalArgs) -> Result<()> {
    let mut manifest = Manifest::new("eval");
    manifest.set("multiset", args.multiset);
    let gold = load_trees(&mut manifest, &args.gold)?;
    let guess = load_forest(&mut manifest, &args.guess)?;
    if guess.len() != gold.len() {
        return Err(Error::Parse {
            line: guess.len().min(gold.len()) + 1,
            message: format!("{} guessed lines for {} gold trees", guess.len(), gold.len()),
        });
    }
    let mut scorer = Scorer::new();
    if args.multiset {
        for (i, (g, r)) in guess.iter().zip(&gold).enumerate() {
            let (_, reference) = evalb_bag(r).or_else(empty_bag).map_err(|e| sentence_error(i, e))?;
            let hypothesis = match g {
                Some(g) => evalb_bag(g).or_else(empty_bag).map_err(|e| sentence_error(i, e))?.1,
                None => Default::default(),
            };
            scorer.add_table(score_multiset(&hypothesis, &reference));
        }
    } else {
        let refs = reference_sets(&gold)?;
        for (i, ((g, r), tree)) in guess.iter().zip(&refs).zip(&gold).enumerate() {
            let h = hypothesis_set(g.as_ref(), &tree.sentence()).map_err(|e| sentence_error(i, e))?;
            scorer.add(&h, r).map_err(|e| sentence_error(i, e))?;
        }
    }
    let report = scorer.report()?;
    if let Some(dir) = &args.out {
        super::create_dir(dir)?;
        manifest.write(&dir.join("summary.csv"), &report.summary_csv())?;
        manifest.write(&dir.join("per_label.csv"), &report.per_label_csv())?;
        manifest.write(&dir.join("per_parent.csv"), &report.per_parent_csv())?;
        manifest.write(&dir.join("recall_errors.csv"), &report.recall_error_csv())?;
    }
    emit(None, &manifest.wrap(&report.summary_csv()))
}

type Bag = (usize, std::collections::BTreeMap<crate::treebank::Constituent, usize>);

fn empty_bag(e: Error) -> Result<Bag> {
    match e {
        Error::EmptyAfterPruning => Ok((0, Default::default())),
        other => Err(other),
    }
}
