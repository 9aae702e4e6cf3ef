use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{contract, Error, Result};

/// A vertex of the Gelfand-Tsetlin graph: a nonincreasing integer vector.
///
/// The level is the length of the vector. The empty signature is the root `*`
/// at level 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(Vec<i64>);

impl Signature {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if let Some(i) = entries.windows(2).position(|w| w[0] < w[1]) {
            return Err(contract!(
                "signature entries must be nonincreasing, got {:?} (position {})",
                entries,
                i + 1
            ));
        }
        Ok(Signature(entries))
    }

    /// Caller guarantees the entries are nonincreasing.
    pub(crate) fn from_sorted(entries: Vec<i64>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0] >= w[1]));
        Signature(entries)
    }

    /// The root `*`.
    pub fn root() -> Self {
        Signature(Vec::new())
    }

    /// `(a, a, ..., a)` at the given level.
    pub fn constant(a: i64, level: usize) -> Self {
        Signature(vec![a; level])
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// `|λ|`, the sum of the entries; `0` for the root.
    pub fn size(&self) -> i64 {
        self.0.iter().sum()
    }

    /// 1-based entry access.
    pub fn get(&self, i: usize) -> i64 {
        self.0[i - 1]
    }

    pub fn max_entry(&self) -> Option<i64> {
        self.0.first().copied()
    }

    pub fn min_entry(&self) -> Option<i64> {
        self.0.last().copied()
    }

    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for Signature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(s)
            .trim();
        if s.is_empty() || s == "*" {
            return Ok(Signature::root());
        }
        let entries = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("bad signature entry {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Signature::new(entries).map_err(|e| match e {
            Error::Contract(m) => Error::Parse(m),
            other => other,
        })
    }
}

impl Serialize for Signature {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All nonincreasing vectors `v` with `lo[i] <= v[i] <= hi[i]`, in ascending
/// lexicographic order.
pub fn nonincreasing_in_boxes(bounds: &[(i64, i64)]) -> Vec<Vec<i64>> {
    fn rec(bounds: &[(i64, i64)], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let i = cur.len();
        if i == bounds.len() {
            out.push(cur.clone());
            return;
        }
        let (lo, mut hi) = bounds[i];
        if let Some(&prev) = cur.last() {
            hi = hi.min(prev);
        }
        for x in lo..=hi {
            cur.push(x);
            rec(bounds, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if bounds.iter().any(|&(lo, hi)| lo > hi) {
        return out;
    }
    rec(bounds, &mut Vec::with_capacity(bounds.len()), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s: Signature = "3,1,0".parse().unwrap();
        assert_eq!(s.entries(), &[3, 1, 0]);
        assert_eq!(s.to_string(), "3,1,0");
        assert_eq!("".parse::<Signature>().unwrap(), Signature::root());
        assert_eq!("*".parse::<Signature>().unwrap(), Signature::root());
        assert_eq!(Signature::root().to_string(), "");
        assert_eq!("(-2, -2)".parse::<Signature>().unwrap().entries(), &[-2, -2]);
    }

    #[test]
    fn rejects_increasing() {
        assert!(matches!("1,0,2".parse::<Signature>(), Err(Error::Parse(_))));
        assert!(matches!(Signature::new(vec![0, 1]), Err(Error::Contract(_))));
        assert!("1,x".parse::<Signature>().is_err());
    }

    #[test]
    fn size_of_examples() {
        assert_eq!(Signature::new(vec![3, 1, 0]).unwrap().size(), 4);
        assert_eq!(Signature::root().size(), 0);
        assert_eq!(Signature::new(vec![-2, -2]).unwrap().size(), -4);
    }

    #[test]
    fn boxes_enumeration() {
        let v = nonincreasing_in_boxes(&[(0, 1), (0, 1)]);
        assert_eq!(v, vec![vec![0, 0], vec![1, 0], vec![1, 1]]);
        assert!(nonincreasing_in_boxes(&[(2, 1)]).is_empty());
        assert_eq!(nonincreasing_in_boxes(&[]), vec![Vec::<i64>::new()]);
    }
}
