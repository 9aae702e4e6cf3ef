//! The Gelfand-Tsetlin graph: signatures, interlacing edges, paths between
//! vertices and the Weyl dimension formula.
//!
//! Every enumeration returns its results in ascending lexicographic order of
//! the entry vectors (for paths: of the sequence of visited vertices).

mod path;
mod signature;

use dashu_int::UBig;

pub use path::PathPrefix;
pub use signature::nonincreasing_in_boxes;
pub use signature::Signature;

use crate::error::{contract, Result};

/// `mu ≺ lam`: `lam_1 >= mu_1 >= lam_2 >= ... >= mu_{N-1} >= lam_N`.
pub fn interlaces(mu: &Signature, lam: &Signature) -> Result<bool> {
    if lam.level() != mu.level() + 1 {
        return Err(contract!(
            "interlacing needs consecutive levels, got {} and {}",
            mu.level(),
            lam.level()
        ));
    }
    let (m, l) = (mu.entries(), lam.entries());
    Ok(m.iter().enumerate().all(|(i, &x)| l[i] >= x && x >= l[i + 1]))
}

/// All `mu` one level down with `mu ≺ lam`.
pub fn predecessors(lam: &Signature) -> Vec<Signature> {
    if lam.is_root() {
        return Vec::new();
    }
    let l = lam.entries();
    let bounds: Vec<_> = (0..l.len() - 1).map(|i| (l[i + 1], l[i])).collect();
    nonincreasing_in_boxes(&bounds)
        .into_iter()
        .map(Signature::from_sorted)
        .collect()
}

/// All `lam` one level up with `mu ≺ lam` and every entry in `[lo, hi]`.
pub fn successors_within(mu: &Signature, lo: i64, hi: i64) -> Vec<Signature> {
    let m = mu.entries();
    let n = m.len();
    let bounds: Vec<_> = (0..=n)
        .map(|i| {
            let upper = if i == 0 { hi } else { m[i - 1].min(hi) };
            let lower = if i == n { lo } else { m[i].max(lo) };
            (lower, upper)
        })
        .collect();
    nonincreasing_in_boxes(&bounds)
        .into_iter()
        .map(Signature::from_sorted)
        .collect()
}

/// Entry bounds of the vertices at level `n` lying on some path `from -> to`.
///
/// Coordinate `i` (0-based) of such a vertex lies in
/// `[max(from_i, to_{i+M-n}), min(from_{i-(n-K)}, to_i)]` where `K` and `M`
/// are the levels of `from` and `to` (out-of-range `from` indices impose no
/// constraint).
pub(crate) fn envelope(from: &Signature, to: &Signature, n: usize) -> Vec<(i64, i64)> {
    let (k, m) = (from.level(), to.level());
    debug_assert!(k <= n && n <= m);
    let (f, t) = (from.entries(), to.entries());
    (0..n)
        .map(|i| {
            let mut lo = t[i + m - n];
            let mut hi = t[i];
            if i < k {
                lo = lo.max(f[i]);
            }
            if i >= n - k {
                hi = hi.min(f[i - (n - k)]);
            }
            (lo, hi)
        })
        .collect()
}

/// Whether some path leads from `from` up to `to`.
///
/// A path exists iff `to_{i+M-K} <= from_i <= to_i` for every coordinate of
/// `from`; the intermediate vertices can then be chosen greedily level by
/// level, so no enumeration is needed.
pub fn has_path(from: &Signature, to: &Signature) -> Result<bool> {
    let (k, m) = (from.level(), to.level());
    if k >= m {
        return Err(contract!("has_path needs from.level < to.level, got {k} and {m}"));
    }
    let (f, t) = (from.entries(), to.entries());
    Ok(f.iter()
        .enumerate()
        .all(|(i, &x)| t[i + m - k] <= x && x <= t[i]))
}

/// All paths from `from` up to `to`.
pub fn enumerate_paths(from: &Signature, to: &Signature) -> Result<Vec<PathPrefix>> {
    if from.level() >= to.level() {
        return Err(contract!(
            "enumerate_paths needs from.level < to.level, got {} and {}",
            from.level(),
            to.level()
        ));
    }
    let mut out = Vec::new();
    if !has_path(from, to)? {
        return Ok(out);
    }
    let mut steps = Vec::with_capacity(to.level() - from.level());
    walk(from, to, from, &mut steps, &mut out);
    Ok(out)
}

fn walk(
    from: &Signature,
    to: &Signature,
    cur: &Signature,
    steps: &mut Vec<Signature>,
    out: &mut Vec<PathPrefix>,
) {
    let n = cur.level() + 1;
    if n == to.level() {
        steps.push(to.clone());
        out.push(PathPrefix::from_parts(from.clone(), steps.clone()));
        steps.pop();
        return;
    }
    for next in successors_in_envelope(from, to, cur) {
        steps.push(next);
        let next = steps.last().unwrap().clone();
        walk(from, to, &next, steps, out);
        steps.pop();
    }
}

/// Successors of `cur` that still lie on a path `from -> to`.
pub(crate) fn successors_in_envelope(
    from: &Signature,
    to: &Signature,
    cur: &Signature,
) -> Vec<Signature> {
    let n = cur.level() + 1;
    let env = envelope(from, to, n);
    let c = cur.entries();
    let bounds: Vec<_> = env
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            let hi = if i == 0 { hi } else { hi.min(c[i - 1]) };
            let lo = if i == n - 1 { lo } else { lo.max(c[i]) };
            (lo, hi)
        })
        .collect();
    nonincreasing_in_boxes(&bounds)
        .into_iter()
        .map(Signature::from_sorted)
        .collect()
}

/// Weyl dimension `∏_{i<j} ((λ_i - i) - (λ_j - j)) / (j - i)`, i.e. the number
/// of paths from the root to `lam`.
pub fn weyl_dim(lam: &Signature) -> UBig {
    let l = lam.entries();
    let mut num = UBig::ONE;
    let mut den = UBig::ONE;
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            // (l_i - i) - (l_j - j) >= j - i > 0 for a signature
            num *= (l[i] - l[j]) as u64 + (j - i) as u64;
            den *= (j - i) as u64;
        }
    }
    num / den
}

/// `|λ|`.
pub fn size(lam: &Signature) -> i64 {
    lam.size()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[i64]) -> Signature {
        Signature::new(v.to_vec()).unwrap()
    }

    #[test]
    fn interlacing_examples() {
        assert!(interlaces(&sig(&[0]), &sig(&[1, 0])).unwrap());
        assert!(!interlaces(&sig(&[2]), &sig(&[1, 0])).unwrap());
        assert!(interlaces(&Signature::root(), &sig(&[-3])).unwrap());
        assert!(interlaces(&sig(&[0]), &sig(&[0])).is_err());
    }

    #[test]
    fn predecessor_examples() {
        assert_eq!(predecessors(&sig(&[1, 0])), vec![sig(&[0]), sig(&[1])]);
        assert_eq!(predecessors(&sig(&[2, 2, 2])), vec![sig(&[2, 2])]);
        assert_eq!(predecessors(&sig(&[7])), vec![Signature::root()]);
        assert!(predecessors(&Signature::root()).is_empty());
    }

    #[test]
    fn successor_examples() {
        assert_eq!(
            successors_within(&sig(&[0]), 0, 1),
            vec![sig(&[0, 0]), sig(&[1, 0])]
        );
        assert!(successors_within(&sig(&[5]), 0, 4).is_empty());
        assert_eq!(
            successors_within(&Signature::root(), -1, 1),
            vec![sig(&[-1]), sig(&[0]), sig(&[1])]
        );
    }

    #[test]
    fn path_examples() {
        let p = enumerate_paths(&Signature::root(), &sig(&[1, 0])).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].steps()[0], sig(&[0]));
        assert_eq!(p[1].steps()[0], sig(&[1]));

        let p = enumerate_paths(&sig(&[1]), &sig(&[1, 1, 0])).unwrap();
        let mids: Vec<_> = p.iter().map(|a| a.steps()[0].clone()).collect();
        assert_eq!(mids, vec![sig(&[1, 0]), sig(&[1, 1])]);

        let p = enumerate_paths(&sig(&[3, 3]), &sig(&[3, 3, 3])).unwrap();
        assert_eq!(p.len(), 1);
        assert!(enumerate_paths(&sig(&[1, 0]), &sig(&[1])).is_err());
    }

    #[test]
    fn has_path_examples() {
        assert!(!has_path(&sig(&[2]), &sig(&[1, 1, 0])).unwrap());
        assert!(has_path(&sig(&[1]), &sig(&[2, 1])).unwrap());
        // (0,0) ≺ ν forces ν_2 = 0, which (2,1,0) does not allow
        assert!(!has_path(&sig(&[0, 0]), &sig(&[2, 1, 0])).unwrap());
        assert!(has_path(&sig(&[0, 0]), &sig(&[2, 0, 0])).unwrap());
        assert!(has_path(&Signature::root(), &sig(&[5, -5])).unwrap());
    }

    #[test]
    fn weyl_examples() {
        assert_eq!(weyl_dim(&sig(&[4, 4, 4, 4])), UBig::from(1u32));
        assert_eq!(weyl_dim(&sig(&[1, 0])), UBig::from(2u32));
        assert_eq!(weyl_dim(&sig(&[1, 1, 0])), UBig::from(3u32));
        assert_eq!(weyl_dim(&Signature::root()), UBig::from(1u32));
        assert_eq!(weyl_dim(&sig(&[-9])), UBig::from(1u32));
    }
}
