use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::treebank::Constituent;

/// Constituent edit distances. `None` from [`constituent_distance`] means the
/// edit is forbidden (infinite cost).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceKind {
    Kronecker,
    Piecewise,
    LooseLabel,
    Linear,
    Stringent,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 5] = [
        DistanceKind::Kronecker,
        DistanceKind::Piecewise,
        DistanceKind::LooseLabel,
        DistanceKind::Linear,
        DistanceKind::Stringent,
    ];

    /// Cost of deleting a one-word constituent; the scale for consensus
    /// thresholds.
    pub fn unit_null_cost(self) -> i64 {
        match self {
            DistanceKind::Kronecker | DistanceKind::Linear => 1,
            DistanceKind::Piecewise | DistanceKind::LooseLabel | DistanceKind::Stringent => 2,
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceKind::Kronecker => "kronecker",
            DistanceKind::Piecewise => "piecewise",
            DistanceKind::LooseLabel => "looselabel",
            DistanceKind::Linear => "linear",
            DistanceKind::Stringent => "stringent",
        })
    }
}

impl FromStr for DistanceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DistanceKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown distance {s:?}")))
    }
}

fn abs_diff(a: usize, b: usize) -> i64 {
    (a as i64 - b as i64).abs()
}

/// Distance between two constituents, either of which may be NULL.
///
/// Panics if both are NULL.
pub fn constituent_distance(
    kind: DistanceKind,
    x: Option<&Constituent>,
    y: Option<&Constituent>,
) -> Option<i64> {
    let (x, y) = match (x, y) {
        (None, None) => panic!("distance between two NULL vertices is undefined"),
        (Some(c), None) | (None, Some(c)) => {
            return Some(match kind {
                DistanceKind::Kronecker => 1,
                DistanceKind::Linear => c.span_len() as i64,
                _ => 2,
            })
        }
        (Some(x), Some(y)) => (x, y),
    };
    if x == y {
        return Some(0);
    }
    let ds = x.start != y.start;
    let de = x.end != y.end;
    let dl = x.label != y.label;
    match kind {
        DistanceKind::Kronecker => None,
        DistanceKind::Piecewise => (ds as u8 + de as u8 + dl as u8 == 1).then_some(3),
        DistanceKind::LooseLabel => (!ds && !de).then_some(3),
        DistanceKind::Linear => {
            (!dl && !(ds && de)).then(|| abs_diff(x.end, y.end) + abs_diff(x.start, y.start))
        }
        DistanceKind::Stringent => {
            if ds && de {
                None
            } else if dl {
                (!ds && !de).then_some(3)
            } else {
                Some(3 * (abs_diff(x.end, y.end) + abs_diff(x.start, y.start)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(s: usize, e: usize, l: &str) -> Constituent {
        Constituent::new(s, e, l)
    }

    #[test]
    fn kronecker() {
        let x = c(0, 2, "NP");
        assert_eq!(constituent_distance(DistanceKind::Kronecker, Some(&x), Some(&x)), Some(0));
        assert_eq!(constituent_distance(DistanceKind::Kronecker, Some(&x), None), Some(1));
        assert_eq!(constituent_distance(DistanceKind::Kronecker, Some(&x), Some(&c(0, 2, "VP"))), None);
    }

    #[test]
    fn piecewise() {
        let d = |a: &Constituent, b: &Constituent| constituent_distance(DistanceKind::Piecewise, Some(a), Some(b));
        assert_eq!(d(&c(0, 2, "NP"), &c(0, 2, "VP")), Some(3));
        assert_eq!(d(&c(0, 2, "NP"), &c(0, 3, "NP")), Some(3));
        assert_eq!(d(&c(0, 2, "NP"), &c(0, 3, "VP")), None);
        assert_eq!(constituent_distance(DistanceKind::Piecewise, None, Some(&c(0, 2, "NP"))), Some(2));
    }

    #[test]
    fn looselabel() {
        let d = |a: &Constituent, b: &Constituent| constituent_distance(DistanceKind::LooseLabel, Some(a), Some(b));
        assert_eq!(d(&c(0, 2, "NP"), &c(0, 2, "VP")), Some(3));
        assert_eq!(d(&c(0, 2, "NP"), &c(1, 2, "NP")), None);
    }

    #[test]
    fn linear() {
        let d = |a: &Constituent, b: &Constituent| constituent_distance(DistanceKind::Linear, Some(a), Some(b));
        assert_eq!(d(&c(0, 3, "NP"), &c(0, 4, "NP")), Some(1));
        assert_eq!(d(&c(0, 3, "NP"), &c(2, 3, "NP")), Some(2));
        assert_eq!(d(&c(0, 3, "NP"), &c(0, 4, "VP")), None);
        assert_eq!(d(&c(0, 3, "NP"), &c(1, 4, "NP")), None);
        assert_eq!(constituent_distance(DistanceKind::Linear, Some(&c(0, 3, "NP")), None), Some(3));
    }

    #[test]
    fn stringent() {
        let d = |a: &Constituent, b: &Constituent| constituent_distance(DistanceKind::Stringent, Some(a), Some(b));
        assert_eq!(d(&c(0, 3, "NP"), &c(0, 3, "VP")), Some(3));
        assert_eq!(d(&c(0, 3, "NP"), &c(0, 5, "NP")), Some(6));
        assert_eq!(d(&c(0, 3, "NP"), &c(0, 4, "VP")), None);
        assert_eq!(d(&c(0, 3, "NP"), &c(1, 4, "NP")), None);
    }

    #[test]
    fn names_round_trip() {
        for k in DistanceKind::ALL {
            assert_eq!(k.to_string().parse::<DistanceKind>().unwrap(), k);
        }
        assert!("euclid".parse::<DistanceKind>().is_err());
    }

    fn arb() -> impl Strategy<Value = Option<Constituent>> {
        prop::option::of((0usize..5, 1usize..4, 0usize..2).prop_map(|(s, w, l)| c(s, s + w, ["A", "B"][l])))
    }

    proptest! {
        #[test]
        fn well_defined(x in arb(), y in arb(), k in 0usize..5) {
            let kind = DistanceKind::ALL[k];
            prop_assume!(x.is_some() || y.is_some());
            let d = constituent_distance(kind, x.as_ref(), y.as_ref());
            prop_assert_eq!(d, constituent_distance(kind, y.as_ref(), x.as_ref()));
            if let Some(v) = d {
                prop_assert!(v >= 0);
            }
            if let Some(x) = &x {
                prop_assert_eq!(constituent_distance(kind, Some(x), Some(x)), Some(0));
            }
        }
    }
}
