//! Scoring against a reference: the (a, b, c) error table, precision, recall,
//! F-measure, exact match, directed parser distance, isolated precision and
//! the two upper-bound oracles.
//!
//! A ratio with a zero denominator and zero numerator counts as 1.0 (nothing
//! to get wrong); any other zero-numerator ratio is 0.

mod isolated;
mod oracle;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::treebank::{Constituent, ConstituentSet};

pub use isolated::{isolated_precision, isolated_precision_corpus, IsolatedContext, IsolatedCount};
pub use oracle::{max_precision_oracle, oracle_choices, parser_switch_oracle};

/// Correct constituents `a`, precision errors `b`, recall errors `c`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

impl CountTable {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        CountTable { a, b, c }
    }

    pub fn precision(&self) -> f64 {
        ratio(self.a, self.a + self.b)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.a, self.a + self.c)
    }

    pub fn f_measure(&self) -> f64 {
        ratio(2 * self.a, 2 * self.a + self.b + self.c)
    }

    pub fn mean(&self) -> f64 {
        (self.precision() + self.recall()) / 2.0
    }

    pub fn is_exact(&self) -> bool {
        self.b == 0 && self.c == 0
    }
}

impl Add for CountTable {
    type Output = CountTable;
    fn add(self, o: CountTable) -> CountTable {
        CountTable::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }
}

impl AddAssign for CountTable {
    fn add_assign(&mut self, o: CountTable) {
        *self = *self + o;
    }
}

impl Sum for CountTable {
    fn sum<I: Iterator<Item = CountTable>>(iter: I) -> CountTable {
        iter.fold(CountTable::default(), Add::add)
    }
}

pub fn score(guess: &ConstituentSet, reference: &ConstituentSet) -> Result<CountTable> {
    guess.ensure_same_length(reference)?;
    let a = guess.intersection_count(reference);
    Ok(CountTable::new(a, guess.len() - a, reference.len() - a))
}

/// Scores constituent bags, where a repeated constituent must be matched as
/// many times as it occurs.
pub fn score_multiset(
    guess: &BTreeMap<Constituent, usize>,
    reference: &BTreeMap<Constituent, usize>,
) -> CountTable {
    let a: usize = guess
        .iter()
        .map(|(c, n)| (*n).min(reference.get(c).copied().unwrap_or(0)))
        .sum();
    let g: usize = guess.values().sum();
    let r: usize = reference.values().sum();
    CountTable::new(a, g - a, r - a)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ScoreReport {
    pub precision: f64,
    pub recall: f64,
    pub mean: f64,
    pub f_measure: f64,
    pub exact: f64,
    pub totals: CountTable,
    pub per_label: BTreeMap<String, CountTable>,
    pub per_parent: BTreeMap<String, CountTable>,
    pub sentence_count: usize,
}

impl ScoreReport {
    fn finish(totals: CountTable, exact_count: usize, sentence_count: usize) -> Self {
        ScoreReport {
            precision: totals.precision(),
            recall: totals.recall(),
            mean: totals.mean(),
            f_measure: totals.f_measure(),
            exact: if sentence_count == 0 {
                0.0
            } else {
                exact_count as f64 / sentence_count as f64
            },
            totals,
            per_label: BTreeMap::new(),
            per_parent: BTreeMap::new(),
            sentence_count,
        }
    }

    /// Per-label table as CSV sorted by label.
    pub fn per_label_csv(&self) -> String {
        table_csv("label", &self.per_label)
    }

    pub fn per_parent_csv(&self) -> String {
        table_csv("parent", &self.per_parent)
    }

    /// Recall errors per label with their share of all recall errors.
    pub fn recall_error_csv(&self) -> String {
        let total: usize = self.per_label.values().map(|t| t.c).sum();
        let mut out = String::from("label,recall_errors,fraction\n");
        for (label, t) in &self.per_label {
            let frac = if total == 0 { 0.0 } else { t.c as f64 / total as f64 };
            let _ = writeln!(out, "{label},{},{frac:.6}", t.c);
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        format!(
            "sentences,a,b,c,precision,recall,mean,f_measure,exact\n{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            self.sentence_count,
            self.totals.a,
            self.totals.b,
            self.totals.c,
            self.precision,
            self.recall,
            self.mean,
            self.f_measure,
            self.exact
        )
    }
}

fn table_csv(key: &str, tables: &BTreeMap<String, CountTable>) -> String {
    let mut out = format!("{key},a,b,c,precision,recall,f_measure\n");
    for (label, t) in tables {
        let _ = writeln!(
            out,
            "{label},{},{},{},{:.6},{:.6},{:.6}",
            t.a,
            t.b,
            t.c,
            t.precision(),
            t.recall(),
            t.f_measure()
        );
    }
    out
}

/// Sums per-sentence tables and derives the corpus-level measures.
pub fn aggregate(tables: &[CountTable]) -> Result<ScoreReport> {
    if tables.is_empty() {
        return Err(Error::InvalidArgument("cannot aggregate zero tables".into()));
    }
    let totals: CountTable = tables.iter().copied().sum();
    let exact = tables.iter().filter(|t| t.is_exact()).count();
    Ok(ScoreReport::finish(totals, exact, tables.len()))
}

/// Incremental scorer that also keeps per-label and per-parent tables.
#[derive(Clone, Debug, Default)]
pub struct Scorer {
    tables: Vec<CountTable>,
    per_label: BTreeMap<String, CountTable>,
    per_parent: BTreeMap<String, CountTable>,
}

impl Scorer {
    pub fn new() -> Self {
        Scorer::default()
    }

    pub fn add(&mut self, guess: &ConstituentSet, reference: &ConstituentSet) -> Result<CountTable> {
        let table = score(guess, reference)?;
        for c in guess.iter() {
            let hit = reference.contains(c);
            let cell = CountTable::new(hit as usize, (!hit) as usize, 0);
            *self.per_label.entry(c.label.clone()).or_default() += cell;
            // Hits are credited under the reference parent below.
            if !hit {
                *self.per_parent.entry(guess.parent_label(c).to_string()).or_default() += cell;
            }
        }
        for c in reference.iter() {
            let hit = guess.contains(c);
            let parent = reference.parent_label(c).to_string();
            if hit {
                *self.per_parent.entry(parent).or_default() += CountTable::new(1, 0, 0);
            } else {
                *self.per_label.entry(c.label.clone()).or_default() += CountTable::new(0, 0, 1);
                *self.per_parent.entry(parent).or_default() += CountTable::new(0, 0, 1);
            }
        }
        self.tables.push(table);
        Ok(table)
    }

    /// Adds a precomputed table, e.g. from multiset scoring.
    pub fn add_table(&mut self, table: CountTable) {
        self.tables.push(table);
    }

    pub fn tables(&self) -> &[CountTable] {
        &self.tables
    }

    pub fn report(&self) -> Result<ScoreReport> {
        let mut report = aggregate(&self.tables)?;
        report.per_label = self.per_label.clone();
        report.per_parent = self.per_parent.clone();
        Ok(report)
    }
}

/// Scores a whole corpus of aligned guess and reference sets.
pub fn score_corpus(guesses: &[ConstituentSet], references: &[ConstituentSet]) -> Result<ScoreReport> {
    if guesses.len() != references.len() {
        return Err(Error::InvalidArgument(format!(
            "{} guesses for {} references",
            guesses.len(),
            references.len()
        )));
    }
    let mut scorer = Scorer::new();
    for (g, r) in guesses.iter().zip(references) {
        scorer.add(g, r)?;
    }
    scorer.report()
}

/// Fraction of `a`'s constituents missing from `b`; 0 when `a` is empty.
pub fn directed_distance(a: &ConstituentSet, b: &ConstituentSet) -> Result<f64> {
    a.ensure_same_length(b)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    let missing = a.len() - a.intersection_count(b);
    Ok(missing as f64 / a.len() as f64)
}

/// An "average parser" baseline row. Precision, recall and F come from the
/// summed count tables; exact match is the mean of the per-parser rates.
pub fn average_baseline(reports: &[ScoreReport]) -> Result<ScoreReport> {
    if reports.is_empty() {
        return Err(Error::InvalidArgument("no reports to average".into()));
    }
    let totals: CountTable = reports.iter().map(|r| r.totals).sum();
    let mut out = ScoreReport::finish(totals, 0, reports[0].sentence_count);
    out.exact = reports.iter().map(|r| r.exact).sum::<f64>() / reports.len() as f64;
    Ok(out)
}

/// Buckets used for span-length and sentence-length contexts.
pub fn length_bucket(n: usize) -> &'static str {
    match n {
        0 | 1 => "1",
        2 => "2",
        3 => "3",
        4 => "4",
        5 => "5",
        6..=10 => "6-10",
        11..=20 => "11-20",
        _ => "21+",
    }
}
