//! Young diagrams in a rectangle and their chain partitions.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::chains::ChainPartition;
use crate::error::{contract, domain, Result};
use crate::graph::nonincreasing_in_boxes;

/// A diagram with at most `l` columns of height at most `k`, stored as its
/// column heights `k >= e_1 >= ... >= e_l >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RectYoungDiagram {
    k: i64,
    entries: Vec<i64>,
}

impl RectYoungDiagram {
    pub fn new(k: i64, entries: Vec<i64>) -> Result<Self> {
        let ok = entries.first().is_none_or(|&e| e <= k)
            && entries.last().is_none_or(|&e| e >= 0)
            && entries.windows(2).all(|w| w[0] >= w[1]);
        if !ok {
            return Err(contract!("{entries:?} is not a diagram in a {k} x {} rectangle", entries.len()));
        }
        Ok(RectYoungDiagram { k, entries })
    }

    pub fn zero(k: i64, l: usize) -> Self {
        RectYoungDiagram {
            k,
            entries: vec![0; l],
        }
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn l(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// Number of boxes.
    pub fn size(&self) -> i64 {
        self.entries.iter().sum()
    }

    pub fn contains(&self, other: &RectYoungDiagram) -> bool {
        self.l() == other.l() && self.entries.iter().zip(&other.entries).all(|(a, b)| a >= b)
    }

    /// `self ↗ other`: `other` is `self` plus one box.
    pub fn covered_by(&self, other: &RectYoungDiagram) -> bool {
        other.contains(self) && other.size() == self.size() + 1
    }

    /// Every entry moved by `d`, in a rectangle of height `k + d`.
    fn shifted(&self, d: i64) -> Self {
        RectYoungDiagram {
            k: self.k + d,
            entries: self.entries.iter().map(|e| e + d).collect(),
        }
    }
}

impl fmt::Display for RectYoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for RectYoungDiagram {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// All diagrams of the `k x l` rectangle containing `lam`, ascending
/// lexicographically.
pub fn young_interval(k: i64, l: usize, lam: &RectYoungDiagram) -> Result<Vec<RectYoungDiagram>> {
    if lam.l() != l || lam.k() > k || lam.entries.first().is_some_and(|&e| e > k) {
        return Err(contract!("{lam} does not fit a {k} x {l} rectangle"));
    }
    let bounds: Vec<_> = lam.entries.iter().map(|&e| (e, k)).collect();
    Ok(nonincreasing_in_boxes(&bounds)
        .into_iter()
        .map(|entries| RectYoungDiagram { k, entries })
        .collect())
}

pub fn validate_young_chains(p: &ChainPartition<RectYoungDiagram>) -> std::result::Result<(), String> {
    p.validate(|a, b| a.covered_by(b))
}

/// Chain partition of `young_interval(k, l, lam)` into saturated chains of
/// length at least 2, for `lam` with last entry 0.
///
/// Splits by the first entry `i`; the fibre `{i} x Y_{i,l-1}(lam')` is handled
/// recursively. For `lam_1 = 0` the fibre `i = 0` is the single zero diagram,
/// which is put in front of the chain that starts at `(1, 0, ..., 0)`. If the
/// result ever fails validation the exhaustive search takes over.
pub fn chain_partition_young(
    k: i64,
    l: usize,
    lam: &RectYoungDiagram,
) -> Result<ChainPartition<RectYoungDiagram>> {
    if k < 1 || l < 1 {
        return Err(contract!("chain partitions need k, l >= 1"));
    }
    if lam.entries.last() != Some(&0) {
        return Err(contract!("{lam} must end in 0"));
    }
    let universe = young_interval(k, l, lam)?;
    if universe.len() < 2 {
        return Err(domain!("the interval above {lam} has a single element"));
    }
    let chains = recursive_chains(k, &lam.entries)
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|entries| RectYoungDiagram { k, entries })
                .collect()
        })
        .collect();
    let p = ChainPartition::new(universe.clone(), chains);
    if validate_young_chains(&p).is_ok() {
        return Ok(p);
    }
    let chains = chain_cover_search(&universe, |a, b| a.covered_by(b), DEFAULT_BUDGET)
        .ok_or_else(|| domain!("no chain partition found above {lam} in a {k} x {l} rectangle"))?;
    Ok(ChainPartition::new(universe, chains))
}

fn recursive_chains(k: i64, lam: &[i64]) -> Vec<Vec<Vec<i64>>> {
    if lam.len() == 1 {
        return vec![(lam[0]..=k).map(|e| vec![e]).collect()];
    }
    let rest = &lam[1..];
    let mut chains = Vec::new();
    for i in lam[0].max(1)..=k {
        for c in recursive_chains(i, rest) {
            chains.push(c.into_iter().map(|mut d| {
                d.insert(0, i);
                d
            }).collect::<Vec<_>>());
        }
    }
    if lam[0] == 0 {
        let zero = vec![0; lam.len()];
        let mut one = zero.clone();
        one[0] = 1;
        if let Some(c) = chains.iter_mut().find(|c| c[0] == one) {
            c.insert(0, zero);
        } else {
            chains.push(vec![zero]);
        }
    }
    chains
}

/// Chain partition of `Y_{k,l}(nu)` for arbitrary `nu`: the rectangle is
/// shifted down by `nu_l` first. `None` when the interval is a single diagram.
pub fn chain_partition_interval(
    k: i64,
    nu: &RectYoungDiagram,
) -> Result<Option<ChainPartition<RectYoungDiagram>>> {
    let l = nu.l();
    let s = *nu.entries.last().ok_or_else(|| contract!("empty diagram"))?;
    if s == k {
        return Ok(None);
    }
    let base = nu.shifted(-s);
    let p = chain_partition_young(k - s, l, &base)?;
    let universe = p.universe().iter().map(|d| d.shifted(s)).collect();
    let chains = p
        .chains()
        .iter()
        .map(|c| c.iter().map(|d| d.shifted(s)).collect())
        .collect();
    Ok(Some(ChainPartition::new(universe, chains)))
}

pub const DEFAULT_BUDGET: usize = 5_000_000;

/// Exhaustive search for a partition of a graded poset into saturated chains
/// of length at least 2, where `covers` is the cover relation of a graded
/// poset on `elements`. Gives up after `budget` steps.
pub fn chain_cover_search<T, F>(elements: &[T], covers: F, budget: usize) -> Option<Vec<Vec<T>>>
where
    T: Clone,
    F: Fn(&T, &T) -> bool,
{
    let n = elements.len();
    let up: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| covers(&elements[i], &elements[j])).collect())
        .collect();
    let mut down = vec![Vec::new(); n];
    for (i, ups) in up.iter().enumerate() {
        for &j in ups {
            down[j].push(i);
        }
    }
    // process in an order where every element comes after all of its lower covers
    let mut order: Vec<usize> = (0..n).collect();
    let mut depth = vec![0usize; n];
    for &i in &topological(&up) {
        for &j in &up[i] {
            depth[j] = depth[j].max(depth[i] + 1);
        }
    }
    order.sort_by_key(|&i| depth[i]);

    struct State<'a> {
        up: &'a [Vec<usize>],
        down: &'a [Vec<usize>],
        order: &'a [usize],
        next: Vec<Option<usize>>,
        prev: Vec<Option<usize>>,
        steps: usize,
        budget: usize,
    }

    // an element that is the only member of its chain and can no longer get a successor
    fn stranded(s: &State, placed: &[bool], i: usize) -> bool {
        s.prev[i].is_none() && s.next[i].is_none() && s.up[i].iter().all(|&j| placed[j])
    }

    fn go(s: &mut State, pos: usize, placed: &mut Vec<bool>) -> bool {
        s.steps += 1;
        if s.steps > s.budget {
            return false;
        }
        if pos == s.order.len() {
            return (0..placed.len()).all(|i| s.prev[i].is_some() || s.next[i].is_some());
        }
        let x = s.order[pos];
        // attach below: lonely chain tails first
        let mut cands: Vec<usize> = s.down[x]
            .iter()
            .copied()
            .filter(|&t| placed[t] && s.next[t].is_none())
            .collect();
        cands.sort_by_key(|&t| s.prev[t].is_some());
        placed[x] = true;
        for t in cands {
            s.next[t] = Some(x);
            s.prev[x] = Some(t);
            if !s.down[x].iter().any(|&d| placed[d] && stranded(s, placed, d)) && go(s, pos + 1, placed) {
                return true;
            }
            s.next[t] = None;
            s.prev[x] = None;
        }
        if !stranded(s, placed, x)
            && !s.down[x].iter().any(|&d| placed[d] && stranded(s, placed, d))
            && go(s, pos + 1, placed)
        {
            return true;
        }
        placed[x] = false;
        false
    }

    let mut s = State {
        up: &up,
        down: &down,
        order: &order,
        next: vec![None; n],
        prev: vec![None; n],
        steps: 0,
        budget,
    };
    let mut placed = vec![false; n];
    if !go(&mut s, 0, &mut placed) {
        return None;
    }
    let mut chains = Vec::new();
    for i in 0..n {
        if s.prev[i].is_none() {
            let mut c = vec![elements[i].clone()];
            let mut cur = i;
            while let Some(j) = s.next[cur] {
                c.push(elements[j].clone());
                cur = j;
            }
            chains.push(c);
        }
    }
    Some(chains)
}

fn topological(up: &[Vec<usize>]) -> Vec<usize> {
    let n = up.len();
    let mut indeg = vec![0usize; n];
    for ups in up {
        for &j in ups {
            indeg[j] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(i) = stack.pop() {
        out.push(i);
        for &j in &up[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                stack.push(j);
            }
        }
    }
    out
}

/// Greedy partition of a multiset of grades into runs of consecutive grades
/// of length at least 2.
///
/// `items` are `(grade, value)`; returns the runs, each ascending in grade,
/// and the elements that could not be placed in any run.
pub fn grade_runs<T: Clone>(items: &[(i64, T)]) -> (Vec<Vec<T>>, Vec<T>) {
    let mut by_grade: std::collections::BTreeMap<i64, Vec<T>> = std::collections::BTreeMap::new();
    for (g, v) in items {
        by_grade.entry(*g).or_default().push(v.clone());
    }
    let mut done: Vec<Vec<T>> = Vec::new();
    let mut lonely: Vec<T> = Vec::new();
    // open runs ending at the previous grade
    let mut open: Vec<Vec<T>> = Vec::new();
    let mut prev: Option<i64> = None;
    for (g, vals) in by_grade {
        if prev != Some(g - 1) {
            close(&mut open, &mut done, &mut lonely);
        }
        // runs of length 1 must be extended first
        open.sort_by_key(|r| r.len() > 1);
        let mut vals = vals.into_iter();
        let mut extended = Vec::new();
        for mut r in open.drain(..) {
            match vals.next() {
                Some(v) => {
                    r.push(v);
                    extended.push(r);
                }
                None => finish(r, &mut done, &mut lonely),
            }
        }
        extended.extend(vals.map(|v| vec![v]));
        open = extended;
        prev = Some(g);
    }
    close(&mut open, &mut done, &mut lonely);
    (done, lonely)
}

fn close<T>(open: &mut Vec<Vec<T>>, done: &mut Vec<Vec<T>>, lonely: &mut Vec<T>) {
    for r in open.drain(..) {
        finish(r, done, lonely);
    }
}

fn finish<T>(mut r: Vec<T>, done: &mut Vec<Vec<T>>, lonely: &mut Vec<T>) {
    if r.len() >= 2 {
        done.push(r);
    } else {
        lonely.push(r.pop().unwrap());
    }
}

/// The diagrams sorted by box count.
pub fn graded(universe: &[RectYoungDiagram]) -> Vec<RectYoungDiagram> {
    let mut v = universe.to_vec();
    v.sort_by_key(|d| (d.size(), d.entries.clone()));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(k: i64, e: &[i64]) -> RectYoungDiagram {
        RectYoungDiagram::new(k, e.to_vec()).unwrap()
    }

    #[test]
    fn intervals() {
        let show = |v: Vec<RectYoungDiagram>| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(show(young_interval(1, 1, &d(1, &[0])).unwrap()), ["(0)", "(1)"]);
        assert_eq!(
            show(young_interval(1, 2, &d(1, &[0, 0])).unwrap()),
            ["(0,0)", "(1,0)", "(1,1)"]
        );
        assert_eq!(show(young_interval(2, 1, &d(2, &[1])).unwrap()), ["(1)", "(2)"]);
        assert!(RectYoungDiagram::new(2, vec![1, 2]).is_err());
        assert!(RectYoungDiagram::new(2, vec![3, 0]).is_err());
    }

    #[test]
    fn small_partitions() {
        let p = chain_partition_young(1, 1, &d(1, &[0])).unwrap();
        assert_eq!(p.chains().len(), 1);
        let p = chain_partition_young(2, 1, &d(2, &[0])).unwrap();
        assert_eq!(p.chains(), &[vec![d(2, &[0]), d(2, &[1]), d(2, &[2])]]);
        let p = chain_partition_young(1, 2, &d(1, &[0, 0])).unwrap();
        assert_eq!(p.chains(), &[vec![d(1, &[0, 0]), d(1, &[1, 0]), d(1, &[1, 1])]]);
        assert!(chain_partition_young(2, 2, &d(2, &[1, 1])).is_err());
    }

    #[test]
    fn every_small_interval() {
        for k in 1..=4 {
            for l in 1..=4 {
                let bounds: Vec<_> = (0..l).map(|i| (0, if i + 1 == l { 0 } else { k })).collect();
                for e in nonincreasing_in_boxes(&bounds) {
                    let lam = d(k, &e);
                    let p = chain_partition_young(k, l, &lam).unwrap();
                    validate_young_chains(&p).unwrap_or_else(|m| panic!("{lam} in {k}x{l}: {m}"));
                    let g = graded(p.universe());
                    let brute = chain_cover_search(&g, |a, b| a.covered_by(b), DEFAULT_BUDGET)
                        .unwrap_or_else(|| panic!("search failed for {lam} in {k}x{l}"));
                    validate_young_chains(&ChainPartition::new(g, brute)).unwrap();
                }
            }
        }
    }

    #[test]
    fn search_reports_impossible() {
        let one = [d(1, &[1])];
        assert!(chain_cover_search(&one, |a, b| a.covered_by(b), 100).is_none());
        // (2,0) and (1,1) both need (1,0)
        let v = vec![d(2, &[0, 0]), d(2, &[1, 0]), d(2, &[2, 0]), d(2, &[1, 1])];
        assert!(chain_cover_search(&v, |a, b| a.covered_by(b), 1000).is_none());
        let full = young_interval(2, 2, &d(2, &[0, 0])).unwrap();
        assert!(chain_cover_search(&full, |a, b| a.covered_by(b), 1000).is_some());
    }

    #[test]
    fn shifted_interval() {
        let nu = d(3, &[2, 1]);
        let p = chain_partition_interval(3, &nu).unwrap().unwrap();
        assert_eq!(p.universe().len(), young_interval(3, 2, &nu).unwrap().len());
        validate_young_chains(&p).unwrap();
        assert!(chain_partition_interval(3, &d(3, &[3, 3])).unwrap().is_none());
    }

    #[test]
    fn runs_by_grade() {
        let items = [(0, 'a'), (1, 'b'), (1, 'c'), (2, 'd'), (5, 'e')];
        let (runs, lonely) = grade_runs(&items);
        assert_eq!(lonely, vec!['e']);
        assert_eq!(runs.iter().map(Vec::len).sum::<usize>(), 4);
        assert!(runs.iter().all(|r| r.len() >= 2));
        let (runs, lonely) = grade_runs(&[(0, 1), (0, 2), (1, 3), (1, 4)]);
        assert_eq!((runs.len(), lonely.len()), (2, 0));
    }
}
