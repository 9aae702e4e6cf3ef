//! Exact arithmetic in a fixed rational `q` and q-weighted dimensions.
//!
//! The weight of an edge `[μ, λ]` with `λ` at level `N` is
//! `q^(N|μ| - (N-1)|λ|)`; path weights multiply along edges and `dim_q(μ, λ)`
//! sums the weights of all paths `μ -> λ`. Pure powers of `q` are carried by
//! their integer exponent and only expanded when sums are formed.

mod schur;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use dashu_int::IBig;
use dashu_ratio::RBig;
use serde::{Serialize, Serializer};

pub use schur::{qdim_product, relative_dimension, BranchingRatios};

use crate::error::{contract, Error, Result};
use crate::exact::{self, rat};
use crate::graph::{self, PathPrefix, Signature};

/// The deformation parameter, an exact rational in `(0, 1)`.
///
/// [`QContext::classical`] builds the `q = 1` evaluation mode in which every
/// weight is 1; it is only meant as an oracle linking `dim_q` to the Weyl
/// dimension, and [`QContext::new`] rejects `q = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QContext {
    q: RBig,
}

impl QContext {
    pub fn new(q: RBig) -> Result<Self> {
        if q <= RBig::ZERO || q >= RBig::ONE {
            return Err(contract!("q must lie in (0,1), got {q}"));
        }
        Ok(QContext { q })
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(contract!("zero denominator"));
        }
        Self::new(rat(num, den))
    }

    /// The `q = 1` degeneration.
    pub fn classical() -> Self {
        QContext {
            q: RBig::ONE,
        }
    }

    pub fn is_classical(&self) -> bool {
        self.q.is_one()
    }

    pub fn q(&self) -> &RBig {
        &self.q
    }

    /// `q^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> RBig {
        exact::pow(&self.q, k)
    }

    /// `q^2`.
    pub fn t(&self) -> RBig {
        &self.q * &self.q
    }
}

impl FromStr for QContext {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let q = parse_rational(s)?;
        QContext::new(q).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Parses `p/r`, an integer, a decimal (`0.25`) or scientific notation
/// (`1e-9`) into an exact rational.
pub fn parse_rational(s: &str) -> Result<RBig> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: IBig = n.trim().parse().map_err(|_| bad())?;
        let d: IBig = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(rat(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits == "-" || digits == "+" || digits.is_empty() {
        return Err(bad());
    } else {
        digits
    };
    let n: IBig = digits.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i64;
    let ten = RBig::from(10u8);
    Ok(RBig::from(n) * exact::pow(&ten, scale))
}

/// An exact nonnegative value, remembering the exponent when it is a pure
/// power of `q`.
#[derive(Clone, Debug)]
pub struct QValue {
    value: RBig,
    power: Option<i64>,
}

impl QValue {
    pub fn q_power(ctx: &QContext, k: i64) -> Self {
        QValue {
            value: ctx.pow(k),
            power: Some(k),
        }
    }

    pub fn exact(value: RBig) -> Self {
        QValue { value, power: None }
    }

    pub fn zero() -> Self {
        Self::exact(RBig::ZERO)
    }

    pub fn value(&self) -> &RBig {
        &self.value
    }

    pub fn into_value(self) -> RBig {
        self.value
    }

    /// The exponent `k` when the value is known to be exactly `q^k`.
    pub fn exponent(&self) -> Option<i64> {
        self.power
    }

    pub fn mul(&self, other: &QValue) -> QValue {
        QValue {
            value: &self.value * &other.value,
            power: match (self.power, other.power) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
        }
    }

    pub fn to_f64(&self) -> f64 {
        exact::to_f64(&self.value)
    }
}

// equality is numeric; the remembered exponent is only a rendering hint
impl PartialEq for QValue {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Eq for QValue {}

impl fmt::Display for QValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)?;
        if let Some(k) = self.power {
            write!(f, " (q^{k})")?;
        }
        Ok(())
    }
}

impl Serialize for QValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("exact", &self.value.to_string())?;
        m.serialize_entry("float", &crate::report::render_float(&self.value))?;
        if let Some(k) = self.power {
            m.serialize_entry("power", &format!("q^{k}"))?;
        }
        m.end()
    }
}

/// Exponent of `w([mu, lam])`, i.e. `N|mu| - (N-1)|lam|`.
pub fn edge_exponent(mu: &Signature, lam: &Signature) -> i64 {
    let n = lam.level() as i64;
    n * mu.size() - (n - 1) * lam.size()
}

pub fn edge_weight(ctx: &QContext, mu: &Signature, lam: &Signature) -> Result<QValue> {
    if !graph::interlaces(mu, lam)? {
        return Err(contract!("[{mu}] -> [{lam}] is not an edge"));
    }
    Ok(QValue::q_power(ctx, edge_exponent(mu, lam)))
}

/// Exponent of `w(alpha)`.
pub fn path_exponent(alpha: &PathPrefix) -> i64 {
    let mut prev = alpha.start();
    let mut k = 0;
    for s in alpha.steps() {
        k += edge_exponent(prev, s);
        prev = s;
    }
    k
}

pub fn path_weight(ctx: &QContext, alpha: &PathPrefix) -> QValue {
    QValue::q_power(ctx, path_exponent(alpha))
}

/// The `k` with `w(beta) / w(alpha) = q^k`, for two paths with common start and
/// end. It equals `2 (Σ|β_i| - Σ|α_i|)` over the intermediate vertices and is
/// therefore always even.
pub fn weight_ratio_exponent(alpha: &PathPrefix, beta: &PathPrefix) -> Result<i64> {
    if alpha.start() != beta.start() || alpha.end() != beta.end() {
        return Err(contract!(
            "paths must share endpoints: [{}]->[{}] vs [{}]->[{}]",
            alpha.start(),
            alpha.end(),
            beta.start(),
            beta.end()
        ));
    }
    Ok(path_exponent(beta) - path_exponent(alpha))
}

/// `dim_q(mu, lam)` by level-wise dynamic programming over the vertices that
/// lie on some path `mu -> lam`.
pub fn qdim_between(ctx: &QContext, mu: &Signature, lam: &Signature) -> Result<QValue> {
    if mu.level() >= lam.level() {
        return Err(contract!(
            "qdim_between needs mu.level < lam.level, got {} and {}",
            mu.level(),
            lam.level()
        ));
    }
    if !graph::has_path(mu, lam)? {
        return Ok(QValue::zero());
    }
    let mut powers: BTreeMap<i64, RBig> = BTreeMap::new();
    let mut pw = |k: i64| -> RBig {
        powers.entry(k).or_insert_with(|| ctx.pow(k)).clone()
    };
    let mut layer: BTreeMap<Signature, RBig> = BTreeMap::new();
    layer.insert(mu.clone(), RBig::ONE);
    for _ in mu.level()..lam.level() {
        let mut next: BTreeMap<Signature, RBig> = BTreeMap::new();
        for (v, acc) in &layer {
            for s in graph::successors_in_envelope(mu, lam, v) {
                let w = pw(edge_exponent(v, &s));
                *next.entry(s).or_insert_with(|| RBig::ZERO) += acc * w;
            }
        }
        layer = next;
    }
    Ok(QValue::exact(layer.remove(lam).unwrap_or(RBig::ZERO)))
}

/// `dim_q(lam) = dim_q(*, lam)`; `1` for the root.
pub fn qdim(ctx: &QContext, lam: &Signature) -> QValue {
    if lam.is_root() {
        return QValue::q_power(ctx, 0);
    }
    qdim_between(ctx, &Signature::root(), lam).expect("root is below every vertex")
}
