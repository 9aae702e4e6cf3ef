//! Closed forms for q-dimensions through Schur polynomials at the geometric
//! point `(1, t, ..., t^{N-1})`, `t = q^2`.
//!
//! `dim_q(λ)` is `q^{-(N-1)|λ|} s_λ(1, t, ..., t^{N-1})` and factors into a
//! product. The ratio `dim_q(λ, Λ) / dim_q(Λ)` is a skew Schur function over a
//! Schur function; expanding the bialternant of `Λ` along the rows that carry
//! `λ` (Laplace expansion) turns it into a sum over `K`-subsets of the rows of
//! `Λ`, which stays cheap even when `Λ` has many rows and the level-wise DP
//! would not.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use dashu_ratio::RBig;

use super::{qdim_between, QContext, QValue};
use crate::exact::{pow as pow_rational, product};
use crate::error::{contract, Result};
use crate::graph::{self, Signature};

/// `dim_q(lam)` from the product formula. Agrees with [`super::qdim`]; in the
/// classical mode this is the Weyl dimension.
pub fn qdim_product(ctx: &QContext, lam: &Signature) -> QValue {
    if ctx.is_classical() {
        return QValue::exact(RBig::from(graph::weyl_dim(lam)));
    }
    let n = lam.level();
    if n <= 1 {
        return QValue::q_power(ctx, 0);
    }
    let t = ctx.t();
    let l: Vec<i64> = lam
        .entries()
        .iter()
        .enumerate()
        .map(|(i, &x)| x + (n - 1 - i) as i64)
        .collect();
    let mut factors = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in i + 1..n {
            let num = pow_rational(&t, l[j]) - pow_rational(&t, l[i]);
            let den = pow_rational(&t, (n - 1 - j) as i64) - pow_rational(&t, (n - 1 - i) as i64);
            factors.push(num / den);
        }
    }
    let s = product(factors);
    QValue::exact(ctx.pow(-((n as i64) - 1) * lam.size()) * s)
}

/// `dim_q(lam, top) / dim_q(top)` for `lam` strictly below `top`.
pub fn relative_dimension(ctx: &QContext, lam: &Signature, top: &Signature) -> Result<RBig> {
    BranchingRatios::new(ctx.clone(), top.clone()).ratio(lam)
}

/// `t^e ∏_d (1 - t^d)^{c_d}` held as exponents, so products and quotients
/// are additions. The sum over row subsets is formed only after dividing out
/// the exponent-wise minimum of all its terms, which keeps the big common
/// factor out of every addition.
#[derive(Clone, Debug, Default)]
struct Mono {
    e: i64,
    c: Vec<i32>,
}

impl Mono {
    /// `t^lo - t^hi` for `lo < hi`.
    fn diff(lo: i64, hi: i64) -> Mono {
        debug_assert!(lo < hi);
        let mut m = Mono { e: lo, c: Vec::new() };
        m.bump((hi - lo) as usize, 1);
        m
    }

    fn bump(&mut self, d: usize, by: i32) {
        if self.c.len() <= d {
            self.c.resize(d + 1, 0);
        }
        self.c[d] += by;
    }

    /// `self *= other^sign`.
    fn absorb(&mut self, other: &Mono, sign: i32) {
        self.e += sign as i64 * other.e;
        if self.c.len() < other.c.len() {
            self.c.resize(other.c.len(), 0);
        }
        for (d, &k) in other.c.iter().enumerate() {
            self.c[d] += sign * k;
        }
    }

    fn meet(&mut self, other: &Mono) {
        self.e = self.e.min(other.e);
        let n = self.c.len().max(other.c.len());
        self.c.resize(n, 0);
        for d in 0..n {
            self.c[d] = self.c[d].min(other.c.get(d).copied().unwrap_or(0));
        }
    }

    fn eval(&self, t: &RBig) -> RBig {
        let one = RBig::ONE;
        let mut num = vec![pow_rational(t, self.e)];
        let mut den = Vec::new();
        for (d, &k) in self.c.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let f = (&one - pow_rational(t, d as i64)).pow(k.unsigned_abs() as isize);
            if k > 0 {
                num.push(f);
            } else {
                den.push(f);
            }
        }
        product(num) / product(den)
    }
}

/// Evaluates `dim_q(λ, Λ) / dim_q(Λ)` for one fixed top vertex `Λ` and many
/// `λ`, caching everything that depends only on `Λ`. Caches are write-once and
/// the struct can be shared between threads.
pub struct BranchingRatios {
    ctx: QContext,
    top: Signature,
    t: RBig,
    l: Vec<i64>,
    // P_i = ∏_{j != i} |t^{l_i} - t^{l_j}|
    row_products: Vec<OnceLock<Mono>>,
    // indexed by the level of λ
    vandermonde: Vec<OnceLock<Mono>>,
    entries: Mutex<HashMap<(usize, i64), RBig>>,
}

impl BranchingRatios {
    pub fn new(ctx: QContext, top: Signature) -> Self {
        let m = top.level();
        let t = ctx.t();
        let l: Vec<i64> = top
            .entries()
            .iter()
            .enumerate()
            .map(|(i, &x)| x + (m - 1 - i) as i64)
            .collect();
        BranchingRatios {
            ctx,
            top,
            t,
            l,
            row_products: (0..m).map(|_| OnceLock::new()).collect(),
            vandermonde: (0..m).map(|_| OnceLock::new()).collect(),
            entries: Mutex::new(HashMap::new()),
        }
    }

    pub fn top(&self) -> &Signature {
        &self.top
    }

    pub fn ratio(&self, lam: &Signature) -> Result<RBig> {
        let k = lam.level();
        let m = self.top.level();
        if k >= m {
            return Err(contract!(
                "relative dimension needs lam below top, got levels {k} and {m}"
            ));
        }
        if k == 0 {
            return Ok(RBig::ONE);
        }
        if !graph::has_path(lam, &self.top)? {
            return Ok(RBig::ZERO);
        }
        if self.ctx.is_classical() {
            let a = qdim_between(&self.ctx, lam, &self.top)?.into_value();
            let b = RBig::from(graph::weyl_dim(&self.top));
            return Ok(a / b);
        }
        let r = m - k;
        let e: Vec<i64> = lam
            .entries()
            .iter()
            .enumerate()
            .map(|(c, &x)| x + (k - 1 - c) as i64)
            .collect();
        let rows: Vec<usize> = (0..m).filter(|&i| self.l[i] <= e[0]).collect();

        let mut terms = Vec::new();
        let mut chosen = Vec::with_capacity(k);
        self.expand(&rows, 0, &e, r, &mut chosen, &mut terms);
        let Some(first) = terms.first() else {
            return Ok(RBig::ZERO);
        };
        let mut common = first.1.clone();
        for (_, mono) in &terms[1..] {
            common.meet(mono);
        }
        let mut total = RBig::ZERO;
        for (coeff, mut mono) in terms {
            mono.absorb(&common, -1);
            total += coeff * mono.eval(&self.t);
        }

        // every row of the minor carries (-1)^r t^{-r(r-1)/2}
        let mut outer = self.vandermonde(k).clone();
        outer.absorb(&common, 1);
        outer.e -= (r * (r - 1) / 2 * k) as i64;
        if (r * k) % 2 == 1 {
            total = -total;
        }
        let exponent = (2 * m as i64 - k as i64 - 1) * lam.size();
        Ok(self.ctx.pow(exponent) * outer.eval(&self.t) * total)
    }

    // Walks K-subsets of `rows` in increasing order. A minor can only be
    // nonzero when its a-th row has l <= e_a, which prunes most subsets.
    fn expand(
        &self,
        rows: &[usize],
        from: usize,
        e: &[i64],
        r: usize,
        chosen: &mut Vec<usize>,
        terms: &mut Vec<(RBig, Mono)>,
    ) {
        let a = chosen.len();
        if a == e.len() {
            self.push_term(chosen, e, r, terms);
            return;
        }
        let need = e.len() - a;
        for idx in from..rows.len() {
            if rows.len() - idx < need {
                break;
            }
            let i = rows[idx];
            if self.l[i] > e[a] {
                continue;
            }
            chosen.push(i);
            self.expand(rows, idx + 1, e, r, chosen, terms);
            chosen.pop();
        }
    }

    fn push_term(&self, chosen: &[usize], e: &[i64], r: usize, terms: &mut Vec<(RBig, Mono)>) {
        let k = e.len();
        let matrix: Vec<Vec<RBig>> = chosen
            .iter()
            .map(|&i| e.iter().map(|&ec| self.entry(r, ec - self.l[i])).collect())
            .collect();
        let mut d = det(matrix);
        if d.is_zero() {
            return;
        }
        let mut mono = Mono::default();
        for (a, &i) in chosen.iter().enumerate() {
            for &j in &chosen[a + 1..] {
                mono.absorb(&Mono::diff(self.l[j], self.l[i]), 1);
            }
            mono.absorb(self.row_product(i), -1);
        }
        // 1-based row indices in the sign
        let idx_sum: usize = chosen.iter().map(|&i| i + 1).sum();
        if (idx_sum + k * (k + 1) / 2) % 2 == 1 {
            d = -d;
        }
        terms.push((d, mono));
    }

    fn row_product(&self, i: usize) -> &Mono {
        self.row_products[i].get_or_init(|| {
            let mut p = Mono::default();
            for j in (0..self.l.len()).filter(|&j| j != i) {
                let (lo, hi) = (self.l[i].min(self.l[j]), self.l[i].max(self.l[j]));
                p.absorb(&Mono::diff(lo, hi), 1);
            }
            p
        })
    }

    // ∏_{1<=j<j'<=M, j'>r} (t^{j-1} - t^{j'-1})
    fn vandermonde(&self, k: usize) -> &Mono {
        self.vandermonde[k].get_or_init(|| {
            let m = self.top.level();
            let r = m - k;
            let mut v = Mono::default();
            for jj in r..m {
                for j in 0..jj {
                    v.absorb(&Mono::diff(j as i64, jj as i64), 1);
                }
            }
            v
        })
    }

    // t^{-d(r-1)} [d+r-1 choose d]_t, zero for d < 0
    fn entry(&self, r: usize, d: i64) -> RBig {
        if d < 0 {
            return RBig::ZERO;
        }
        if let Some(v) = self.entries.lock().unwrap().get(&(r, d)) {
            return v.clone();
        }
        let v = pow_rational(&self.t, -d * (r as i64 - 1)) * gauss_binomial(d + r as i64 - 1, d, &self.t);
        self.entries.lock().unwrap().entry((r, d)).or_insert(v).clone()
    }
}

/// `[n choose k]_t`.
fn gauss_binomial(n: i64, k: i64, t: &RBig) -> RBig {
    if k < 0 || k > n {
        return RBig::ZERO;
    }
    let one = RBig::ONE;
    product((1..=k).map(|i| (&one - pow_rational(t, n - k + i)) / (&one - pow_rational(t, i))))
}

fn det(mut a: Vec<Vec<RBig>>) -> RBig {
    let n = a.len();
    let mut d = RBig::ONE;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return RBig::ZERO;
        };
        if p != c {
            a.swap(c, p);
            d = -d;
        }
        d *= &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let sub = &f * &a[c][j];
                a[i][j] -= sub;
            }
        }
    }
    d
}
