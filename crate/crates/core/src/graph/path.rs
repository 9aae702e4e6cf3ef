use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::{interlaces, Signature};
use crate::error::{contract, Error, Result};

/// A finite path on the Gelfand-Tsetlin graph.
///
/// `steps[k]` is the vertex reached after `k + 1` edges, so the path visits
/// `start, steps[0], steps[1], ...` at consecutive levels. A path from the root
/// is the index of a cylinder set; an edge is a path with one step.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathPrefix {
    start: Signature,
    steps: Vec<Signature>,
}

impl PathPrefix {
    pub fn new(start: Signature, steps: Vec<Signature>) -> Result<Self> {
        let mut prev = &start;
        for s in &steps {
            if s.level() != prev.level() + 1 || !interlaces(prev, s)? {
                return Err(contract!("[{prev}] -> [{s}] is not an edge"));
            }
            prev = s;
        }
        Ok(PathPrefix { start, steps })
    }

    /// Caller guarantees consecutive vertices interlace.
    pub(crate) fn from_parts(start: Signature, steps: Vec<Signature>) -> Self {
        PathPrefix { start, steps }
    }

    pub fn from_root(steps: Vec<Signature>) -> Result<Self> {
        Self::new(Signature::root(), steps)
    }

    /// The empty path sitting at `v`.
    pub fn trivial(v: Signature) -> Self {
        PathPrefix {
            start: v,
            steps: Vec::new(),
        }
    }

    pub fn start(&self) -> &Signature {
        &self.start
    }

    pub fn steps(&self) -> &[Signature] {
        &self.steps
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> &Signature {
        self.steps.last().unwrap_or(&self.start)
    }

    pub fn start_level(&self) -> usize {
        self.start.level()
    }

    pub fn end_level(&self) -> usize {
        self.start.level() + self.steps.len()
    }

    pub fn starts_at_root(&self) -> bool {
        self.start.is_root()
    }

    /// Vertex at absolute graph level `n`.
    pub fn vertex_at_level(&self, n: usize) -> Option<&Signature> {
        let k = self.start.level();
        if n == k {
            Some(&self.start)
        } else if n > k {
            self.steps.get(n - k - 1)
        } else {
            None
        }
    }

    /// Vertices strictly between start and end.
    pub fn intermediate(&self) -> &[Signature] {
        if self.steps.is_empty() {
            &[]
        } else {
            &self.steps[..self.steps.len() - 1]
        }
    }

    /// The first `k` edges.
    pub fn truncate(&self, k: usize) -> PathPrefix {
        PathPrefix {
            start: self.start.clone(),
            steps: self.steps[..k.min(self.steps.len())].to_vec(),
        }
    }

    /// The edges after the first `k`, as a path starting at the vertex reached
    /// after `k` edges.
    pub fn suffix_from(&self, k: usize) -> PathPrefix {
        let start = if k == 0 {
            self.start.clone()
        } else {
            self.steps[k - 1].clone()
        };
        PathPrefix {
            start,
            steps: self.steps[k..].to_vec(),
        }
    }

    pub fn push(&mut self, next: Signature) -> Result<()> {
        if next.level() != self.end_level() + 1 || !interlaces(self.end(), &next)? {
            return Err(contract!("[{}] -> [{next}] is not an edge", self.end()));
        }
        self.steps.push(next);
        Ok(())
    }

    pub fn extended(&self, next: Signature) -> Result<PathPrefix> {
        let mut p = self.clone();
        p.push(next)?;
        Ok(p)
    }

    /// Concatenates a path that starts where `self` ends.
    pub fn concat(&self, tail: &PathPrefix) -> Result<PathPrefix> {
        if tail.start() != self.end() {
            return Err(contract!(
                "cannot attach a path starting at [{}] to one ending at [{}]",
                tail.start(),
                self.end()
            ));
        }
        let mut steps = self.steps.clone();
        steps.extend(tail.steps.iter().cloned());
        Ok(PathPrefix {
            start: self.start.clone(),
            steps,
        })
    }

    /// Parses a path that starts at a given vertex: the first `;`-separated
    /// signature is the start.
    pub fn parse_segment(s: &str) -> Result<Self> {
        let mut sigs = split_sigs(s)?;
        if sigs.is_empty() {
            return Err(Error::Parse("empty segment".into()));
        }
        let start = sigs.remove(0);
        Self::new(start, sigs).map_err(to_parse)
    }
}

fn to_parse(e: Error) -> Error {
    match e {
        Error::Contract(m) => Error::Parse(m),
        other => other,
    }
}

fn split_sigs(s: &str) -> Result<Vec<Signature>> {
    let s = s.trim();
    if s.is_empty() || s == "*" {
        return Ok(Vec::new());
    }
    let s = s.strip_prefix("*;").unwrap_or(s);
    s.split(';').map(str::parse).collect()
}

/// Root paths print as the `;`-joined vertices from level 1 up; other paths
/// print their start vertex first.
impl fmt::Display for PathPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.start.is_root() {
            write!(f, "{}", self.start)?;
            first = false;
        }
        for s in &self.steps {
            if !first {
                f.write_str(";")?;
            }
            write!(f, "{s}")?;
            first = false;
        }
        Ok(())
    }
}

/// Parses a path from the root.
impl FromStr for PathPrefix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sigs = split_sigs(s)?;
        PathPrefix::from_root(sigs).map_err(to_parse)
    }
}

impl Serialize for PathPrefix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
