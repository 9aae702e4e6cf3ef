//! Finitely described nondecreasing integer sequences `θ = (θ_1, θ_2, ...)`.
//!
//! A [`ThetaSpec`] is an explicit prefix followed by either a constant tail or
//! an affine tail with positive step. Boundedness is therefore decidable, which
//! is what the classification needs.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{contract, Error, Result};
use crate::graph::{PathPrefix, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tail {
    Const(i64),
    Affine { start: i64, step: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThetaSpec {
    prefix: Vec<i64>,
    tail: Tail,
}

/// The three factor types of the classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ThetaType {
    #[serde(rename = "I_1")]
    I1,
    #[serde(rename = "I_inf")]
    IInf,
    #[serde(rename = "III_q2")]
    IIIq2,
}

impl fmt::Display for ThetaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThetaType::I1 => "I_1",
            ThetaType::IInf => "I_inf",
            ThetaType::IIIq2 => "III_q2",
        })
    }
}

impl ThetaSpec {
    pub fn new(prefix: Vec<i64>, tail: Tail) -> Result<Self> {
        if prefix.windows(2).any(|w| w[0] > w[1]) {
            return Err(contract!("theta prefix must be nondecreasing: {prefix:?}"));
        }
        let first_tail = match tail {
            Tail::Const(a) => a,
            Tail::Affine { start, step } => {
                if step < 1 {
                    return Err(contract!("affine tail needs step >= 1, got {step}"));
                }
                start
            }
        };
        if let Some(&last) = prefix.last() {
            if first_tail < last {
                return Err(contract!(
                    "tail starts at {first_tail}, below the last prefix entry {last}"
                ));
            }
        }
        Ok(ThetaSpec { prefix, tail })
    }

    /// `θ = (a, a, ...)`.
    pub fn constant(a: i64) -> Self {
        ThetaSpec {
            prefix: Vec::new(),
            tail: Tail::Const(a),
        }
    }

    pub fn affine(start: i64, step: i64) -> Result<Self> {
        Self::new(Vec::new(), Tail::Affine { start, step })
    }

    pub fn prefix(&self) -> &[i64] {
        &self.prefix
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.tail, Tail::Const(_))
    }

    pub fn is_constant(&self) -> bool {
        match self.tail {
            Tail::Const(a) => self.prefix.iter().all(|&x| x == a),
            Tail::Affine { .. } => false,
        }
    }

    /// `θ_i`, 1-based.
    pub fn value(&self, i: usize) -> i64 {
        assert!(i >= 1, "theta is indexed from 1");
        if i <= self.prefix.len() {
            return self.prefix[i - 1];
        }
        let j = (i - self.prefix.len() - 1) as i64;
        match self.tail {
            Tail::Const(a) => a,
            Tail::Affine { start, step } => start + step * j,
        }
    }

    /// `λ(n; θ) = (θ_n, θ_{n-1}, ..., θ_1)`.
    pub fn lambda(&self, n: usize) -> Signature {
        Signature::from_sorted((1..=n).rev().map(|i| self.value(i)).collect())
    }

    /// The smallest `N` with `θ_n = θ_N` for all `n >= N`; `None` when unbounded.
    pub fn stable_index(&self) -> Option<usize> {
        match self.tail {
            Tail::Const(a) => Some(self.prefix.iter().filter(|&&x| x < a).count() + 1),
            Tail::Affine { .. } => None,
        }
    }

    /// The path `* -> λ(1;θ) -> ... -> λ(n;θ)`.
    pub fn distinguished_path(&self, n: usize) -> PathPrefix {
        PathPrefix::from_parts(Signature::root(), (1..=n).map(|k| self.lambda(k)).collect())
    }

    pub fn classify(&self) -> ThetaType {
        if self.is_constant() {
            ThetaType::I1
        } else if self.is_bounded() {
            ThetaType::IInf
        } else {
            ThetaType::IIIq2
        }
    }
}

pub fn lambda_of(theta: &ThetaSpec, n: usize) -> Result<Signature> {
    if n == 0 {
        return Err(contract!("lambda_of needs n >= 1"));
    }
    Ok(theta.lambda(n))
}

pub fn theta_value(theta: &ThetaSpec, i: usize) -> Result<i64> {
    if i == 0 {
        return Err(contract!("theta_value needs i >= 1"));
    }
    Ok(theta.value(i))
}

pub fn classify(theta: &ThetaSpec) -> ThetaType {
    theta.classify()
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("prefix=")?;
        for (i, x) in self.prefix.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        match self.tail {
            Tail::Const(a) => write!(f, ";tail=const:{a}"),
            Tail::Affine { start, step } => write!(f, ";tail=affine:start={start},step={step}"),
        }
    }
}

/// `prefix=0,1;tail=const:1` or `prefix=;tail=affine:start=1,step=1`. The
/// `prefix=` field may be omitted.
impl FromStr for ThetaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("bad theta spec {s:?}: {why}"));
        let int = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| bad(&format!("{t:?} is not an integer")))
        };
        let mut prefix = Vec::new();
        let mut tail = None;
        for field in s.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (key, val) = field.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            match key.trim() {
                "prefix" => {
                    prefix = val
                        .split(',')
                        .map(str::trim)
                        .filter(|t| !t.is_empty())
                        .map(int)
                        .collect::<Result<_>>()?;
                }
                "tail" => {
                    let (kind, args) = val.split_once(':').ok_or_else(|| bad("tail needs kind:args"))?;
                    tail = Some(match kind.trim() {
                        "const" => Tail::Const(int(args)?),
                        "affine" => {
                            let (mut start, mut step) = (None, None);
                            for kv in args.split(',') {
                                let (k, v) = kv.split_once('=').ok_or_else(|| bad("affine args are start=..,step=.."))?;
                                match k.trim() {
                                    "start" => start = Some(int(v)?),
                                    "step" => step = Some(int(v)?),
                                    other => return Err(bad(&format!("unknown affine key {other:?}"))),
                                }
                            }
                            Tail::Affine {
                                start: start.ok_or_else(|| bad("missing start"))?,
                                step: step.ok_or_else(|| bad("missing step"))?,
                            }
                        }
                        other => return Err(bad(&format!("unknown tail kind {other:?}"))),
                    });
                }
                other => return Err(bad(&format!("unknown key {other:?}"))),
            }
        }
        let tail = tail.ok_or_else(|| bad("missing tail"))?;
        ThetaSpec::new(prefix, tail).map_err(|e| bad(&e.to_string()))
    }
}

impl Serialize for ThetaSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th(s: &str) -> ThetaSpec {
        s.parse().unwrap()
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(ThetaSpec::constant(0).lambda(3).entries(), &[0, 0, 0]);
        assert_eq!(th("prefix=0;tail=const:1").lambda(3).entries(), &[1, 1, 0]);
        assert_eq!(ThetaSpec::affine(1, 1).unwrap().lambda(4).entries(), &[4, 3, 2, 1]);
        assert!(lambda_of(&ThetaSpec::constant(0), 0).is_err());
    }

    #[test]
    fn value_examples() {
        assert_eq!(th("prefix=0,2;tail=const:2").value(5), 2);
        assert_eq!(th("prefix=;tail=affine:start=1,step=2").value(3), 5);
        assert_eq!(th("prefix=-1;tail=const:0").value(1), -1);
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "prefix=0,1;tail=const:1",
            "prefix=;tail=affine:start=1,step=1",
            "prefix=-3,-3;tail=affine:start=0,step=4",
        ] {
            assert_eq!(th(s).to_string(), s);
        }
        assert_eq!(th("tail=const:3"), ThetaSpec::constant(3));
    }

    #[test]
    fn rejects_invalid() {
        for s in [
            "prefix=1,0;tail=const:1",
            "prefix=2;tail=const:1",
            "prefix=;tail=affine:start=1,step=0",
            "prefix=3;tail=affine:start=1,step=1",
            "prefix=0",
            "prefix=a;tail=const:1",
            "prefix=;tail=poly:1",
        ] {
            assert!(matches!(s.parse::<ThetaSpec>(), Err(Error::Parse(_))), "{s}");
        }
    }

    #[test]
    fn classification() {
        assert_eq!(th("prefix=;tail=const:5").classify(), ThetaType::I1);
        assert_eq!(th("prefix=5,5;tail=const:5").classify(), ThetaType::I1);
        assert_eq!(th("prefix=0;tail=const:1").classify(), ThetaType::IInf);
        assert_eq!(th("prefix=;tail=affine:start=1,step=1").classify(), ThetaType::IIIq2);
    }

    #[test]
    fn stable_index() {
        assert_eq!(ThetaSpec::constant(2).stable_index(), Some(1));
        assert_eq!(th("prefix=0;tail=const:1").stable_index(), Some(2));
        assert_eq!(th("prefix=0,1,1;tail=const:1").stable_index(), Some(2));
        assert_eq!(ThetaSpec::affine(0, 1).unwrap().stable_index(), None);
        assert_eq!(
            th("prefix=0;tail=const:1").distinguished_path(2).to_string(),
            "0;1,0"
        );
    }
}
