//! Helpers shared by the JSON and text renderers.

use dashu_ratio::RBig;
use serde::{Serialize, Serializer};

/// A float rendered with 15 significant digits.
pub fn render_float(x: &RBig) -> String {
    format_sig(crate::exact::to_f64(x))
}

pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.14e}");
    // normalise through a parse so trailing zeros disappear
    let v: f64 = s.parse().unwrap();
    let e = v.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        let decimals = (14 - e).max(0) as usize;
        let mut out = format!("{v:.decimals$}");
        if out.contains('.') {
            out = out.trim_end_matches('0').trim_end_matches('.').to_string();
        }
        out
    } else {
        s
    }
}

/// An exact rational next to its float rendering.
#[derive(Clone, Debug, Serialize)]
pub struct ExactJson {
    pub exact: String,
    pub float: String,
}

impl From<&RBig> for ExactJson {
    fn from(x: &RBig) -> Self {
        ExactJson {
            exact: x.to_string(),
            float: render_float(x),
        }
    }
}

pub fn ser_rational<S: Serializer>(x: &RBig, s: S) -> Result<S::Ok, S::Error> {
    ExactJson::from(x).serialize(s)
}

pub fn ser_opt_rational<S: Serializer>(x: &Option<RBig>, s: S) -> Result<S::Ok, S::Error> {
    x.as_ref().map(ExactJson::from).serialize(s)
}
