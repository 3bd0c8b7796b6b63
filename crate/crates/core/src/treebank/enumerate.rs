use super::{Constituent, ConstituentSet};
use crate::error::{Error, Result};

pub const MAX_ENUMERATION_LENGTH: usize = 5;
pub const MAX_ENUMERATION_LABELS: usize = 3;

/// Every properly nested labelled bracketing of `length` tokens whose nodes
/// have between 2 and `max_branching` children. The root span is excluded,
/// and preterminals are not brackets, so a child covering one token adds
/// nothing to the set.
pub fn enumerate_parses(
    length: usize,
    labels: &[String],
    max_branching: usize,
) -> Result<Vec<ConstituentSet>> {
    if length == 0 || length > MAX_ENUMERATION_LENGTH {
        return Err(Error::Limit(format!(
            "enumeration needs 1..={MAX_ENUMERATION_LENGTH} tokens, got {length}"
        )));
    }
    if labels.is_empty() || labels.len() > MAX_ENUMERATION_LABELS {
        return Err(Error::Limit(format!(
            "enumeration needs 1..={MAX_ENUMERATION_LABELS} labels, got {}",
            labels.len()
        )));
    }
    if max_branching < 2 {
        return Err(Error::InvalidArgument("max_branching must be at least 2".into()));
    }
    let mut out = Vec::new();
    for inner in node_parses(0, length, labels, max_branching) {
        let mut set = ConstituentSet::new(length);
        set.items.extend(inner);
        out.push(set);
    }
    Ok(out)
}

// Bracketings strictly inside a node covering [lo, hi).
fn node_parses(
    lo: usize,
    hi: usize,
    labels: &[String],
    max_branching: usize,
) -> Vec<Vec<Constituent>> {
    if hi - lo == 1 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut cuts = Vec::new();
    partitions(lo, hi, max_branching, &mut cuts, &mut |pieces| {
        let mut acc: Vec<Vec<Constituent>> = vec![Vec::new()];
        for &(s, e) in pieces {
            let mut options = Vec::new();
            if e - s == 1 {
                options.push(Vec::new());
            } else {
                for sub in node_parses(s, e, labels, max_branching) {
                    for label in labels {
                        let mut v = sub.clone();
                        v.push(Constituent::new(s, e, label.clone()));
                        options.push(v);
                    }
                }
            }
            acc = acc
                .iter()
                .flat_map(|prefix| {
                    options.iter().map(move |o| {
                        let mut v = prefix.clone();
                        v.extend(o.iter().cloned());
                        v
                    })
                })
                .collect();
        }
        out.extend(acc);
    });
    out
}

// Calls `f` with each split of [lo, hi) into 2..=max contiguous pieces.
fn partitions(
    lo: usize,
    hi: usize,
    max: usize,
    pieces: &mut Vec<(usize, usize)>,
    f: &mut dyn FnMut(&[(usize, usize)]),
) {
    let start = pieces.last().map_or(lo, |p| p.1);
    if start == hi {
        if pieces.len() >= 2 {
            f(pieces);
        }
        return;
    }
    if pieces.len() == max {
        return;
    }
    for end in start + 1..=hi {
        // A single piece covering the whole node is not a split.
        if start == lo && end == hi {
            continue;
        }
        pieces.push((start, end));
        partitions(lo, hi, max, pieces, f);
        pieces.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        ["A", "B", "C"][..n].iter().map(|s| s.to_string()).collect()
    }

    fn catalan(n: u64) -> u64 {
        (0..n).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
    }

    #[test]
    fn single_token_has_one_empty_parse() {
        let parses = enumerate_parses(1, &labels(2), 3).unwrap();
        assert_eq!(parses.len(), 1);
        assert!(parses[0].is_empty());
    }

    #[test]
    fn binary_unlabelled_counts_are_catalan() {
        for n in 1..=5 {
            let parses = enumerate_parses(n, &labels(1), 2).unwrap();
            assert_eq!(parses.len() as u64, catalan(n as u64 - 1), "length {n}");
        }
        assert_eq!(enumerate_parses(3, &labels(1), 2).unwrap().len(), 2);
    }

    #[test]
    fn limits_are_enforced() {
        assert!(enumerate_parses(6, &labels(1), 2).is_err());
        let four: Vec<String> = ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect();
        assert!(enumerate_parses(3, &four, 2).is_err());
    }

    #[test]
    fn parses_are_distinct_and_nested() {
        let parses = enumerate_parses(4, &labels(2), 4).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for p in &parses {
            assert!(p.find_crossing().is_none());
            assert!(seen.insert(p.items.clone()));
        }
    }
}
