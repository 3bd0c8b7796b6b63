//! Run manifests: the `#`-prefixed header carried by every report so a
//! result can be traced to its configuration and inputs.

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Manifest::default();
        m.set("tool", concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")));
        m.set("command", command);
        m
    }

    /// Adds or replaces an entry; newlines in values are flattened.
    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string().replace(['\n', '\r'], " ");
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    /// Records the SHA-256 of an input file's contents.
    pub fn input(&mut self, path: &Path, contents: &[u8]) {
        self.entries
            .push(("input".to_string(), format!("{} sha256:{}", path.display(), sha256_hex(contents))));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn header(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("# {k}: {v}\n")).collect()
    }

    /// `body` with the manifest header in front.
    pub fn wrap(&self, body: &str) -> String {
        format!("{}{body}", self.header())
    }

    /// Writes `body` under the manifest header.
    pub fn write(&self, path: &Path, body: &str) -> Result<()> {
        std::fs::write(path, self.wrap(body))?;
        Ok(())
    }
}

/// Strips manifest lines from a report so the rest parses as plain CSV.
pub fn strip_manifest(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip() {
        let mut m = Manifest::new("eval");
        m.set("seed", 7);
        m.set("seed", 8);
        m.input(Path::new("a.mrg"), b"abc");
        let text = m.wrap("x,y\n1,2\n");
        assert!(text.starts_with("# tool: parse-ensemble "));
        assert!(text.contains("# seed: 8\n"));
        assert!(text.contains("a.mrg sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"));
        assert_eq!(strip_manifest(&text), "x,y\n1,2\n");
        assert_eq!(m.get("command"), Some("eval"));
    }
}
