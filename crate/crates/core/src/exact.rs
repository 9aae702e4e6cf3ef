//! Small helpers around the arbitrary-precision rationals used throughout.

use dashu_int::IBig;
use dashu_ratio::{RBig, Relaxed};

pub fn rat(n: impl Into<IBig>, d: impl Into<IBig>) -> RBig {
    RBig::from_parts_signed(n.into(), d.into())
}

/// `x^k` for any integer `k`.
pub fn pow(x: &RBig, k: i64) -> RBig {
    x.pow(k as isize)
}

/// Multiplies without intermediate reductions and reduces once at the end.
pub fn product<I: IntoIterator<Item = RBig>>(it: I) -> RBig {
    it.into_iter()
        .fold(Relaxed::ONE, |acc, x| acc * x.relax())
        .canonicalize()
}

pub fn to_f64(x: &RBig) -> f64 {
    x.to_f64().value()
}

pub fn abs(x: &RBig) -> RBig {
    if x < &RBig::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

pub fn sum<I: IntoIterator<Item = RBig>>(it: I) -> RBig {
    it.into_iter().fold(RBig::ZERO, |acc, x| acc + x)
}
