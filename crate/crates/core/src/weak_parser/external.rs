//! Adapter for parsers that live behind shell commands and exchange bracket
//! files.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use tempfile::TempDir;

use super::Learner;
use crate::error::{Error, Result};
use crate::treebank::{read_forest_lines, write_trees, ParseTree, Token};

/// Trains and parses by running two command templates through `sh -c`.
///
/// The training template may use `{corpus}` (one tree per line) and
/// `{model}` (a path the command must create). The parse template may use
/// `{model}`, `{input}` (one sentence per line, words separated by spaces)
/// and `{output}` (one tree per line; a blank line means no parse).
#[derive(Clone, Debug)]
pub struct ExternalLearner {
    pub train_template: String,
    pub parse_template: String,
    pub deterministic: bool,
}

#[derive(Debug)]
pub struct ExternalModel {
    pub path: PathBuf,
    _dir: Arc<TempDir>,
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

fn fill(template: &str, vars: &[(&str, &Path)]) -> String {
    vars.iter().fold(template.to_string(), |acc, (name, path)| {
        acc.replace(&format!("{{{name}}}"), &quote(&path.to_string_lossy()))
    })
}

fn run(command: &str) -> Result<()> {
    log::debug!("running {command}");
    let out = Command::new("sh").arg("-c").arg(command).output()?;
    if !out.status.success() {
        return Err(Error::External(format!(
            "command `{command}` failed with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        )));
    }
    Ok(())
}

impl ExternalLearner {
    pub fn new(train_template: impl Into<String>, parse_template: impl Into<String>) -> Self {
        ExternalLearner {
            train_template: train_template.into(),
            parse_template: parse_template.into(),
            deterministic: true,
        }
    }

    /// Parses `train=<command>;parse=<command>`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("learner spec must look like train=CMD;parse=CMD, got {spec:?}"));
        let rest = spec.trim().strip_prefix("train=").ok_or_else(bad)?;
        let (train, parse) = rest.split_once(";parse=").ok_or_else(bad)?;
        if train.trim().is_empty() || parse.trim().is_empty() {
            return Err(bad());
        }
        Ok(ExternalLearner::new(train.trim(), parse.trim()))
    }
}

impl Learner for ExternalLearner {
    type Model = ExternalModel;

    fn train(&self, corpus: &[ParseTree]) -> Result<ExternalModel> {
        let dir = TempDir::new()?;
        let corpus_path = dir.path().join("corpus.mrg");
        let model_path = dir.path().join("model");
        std::fs::write(&corpus_path, write_trees(corpus)?)?;
        run(&fill(&self.train_template, &[("corpus", &corpus_path), ("model", &model_path)]))?;
        Ok(ExternalModel {
            path: model_path,
            _dir: Arc::new(dir),
        })
    }

    fn parse(&self, model: &ExternalModel, tokens: &[Token]) -> Result<Option<ParseTree>> {
        let mut out = self.parse_batch(model, &[tokens.to_vec()])?;
        Ok(out.pop().flatten())
    }

    fn parse_batch(&self, model: &ExternalModel, sentences: &[Vec<Token>]) -> Result<Vec<Option<ParseTree>>> {
        if sentences.is_empty() {
            return Ok(Vec::new());
        }
        let dir = TempDir::new()?;
        let input = dir.path().join("input.txt");
        let output = dir.path().join("output.mrg");
        let mut text = String::new();
        for s in sentences {
            let words: Vec<&str> = s.iter().map(|t| t.word.as_str()).collect();
            text.push_str(&words.join(" "));
            text.push('\n');
        }
        std::fs::write(&input, text)?;
        run(&fill(
            &self.parse_template,
            &[("model", &model.path), ("input", &input), ("output", &output)],
        ))?;
        let raw = std::fs::read_to_string(&output)
            .map_err(|e| Error::External(format!("parser produced no readable output: {e}")))?;
        let trees = read_forest_lines(&raw).map_err(|e| Error::External(format!("malformed parser output: {e}")))?;
        if trees.len() != sentences.len() {
            return Err(Error::External(format!(
                "parser returned {} lines for {} sentences",
                trees.len(),
                sentences.len()
            )));
        }
        Ok(trees)
    }

    fn deterministic(&self) -> bool {
        self.deterministic
    }

    fn save_model(&self, model: &ExternalModel, path: &Path) -> Result<()> {
        std::fs::copy(&model.path, path)?;
        Ok(())
    }
}
