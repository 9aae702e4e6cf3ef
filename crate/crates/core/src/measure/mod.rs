//! The extreme q-central measures `P^θ`.
//!
//! Every mass is an exact rational evaluated at a finite depth `m`:
//! `P(C_α) ≈ w(α) · R_m(λ)` and `P(level set of λ) ≈ dim_q(λ) · R_m(λ)` with
//! `R_m(λ) = dim_q(λ, λ(m;θ)) / dim_q(λ(m;θ))`. The depth is picked by doubling
//! until three consecutive relative changes fall below `eps` or the cap is
//! reached; floating point never enters the values themselves.

mod sampler;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use dashu_ratio::RBig;
use serde::Serialize;

pub use sampler::{sample_path, PathSampler};

use crate::error::{contract, domain, Result};
use crate::graph::{self, nonincreasing_in_boxes, PathPrefix, Signature};
use crate::qweights::{self, path_weight, qdim_product, BranchingRatios, QContext};
use crate::exact::abs;
use crate::report::ExactJson;
use crate::theta::ThetaSpec;

/// A mass evaluated at a finite depth.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureApprox {
    pub theta: ThetaSpec,
    #[serde(serialize_with = "crate::report::ser_rational", rename = "q")]
    pub q: RBig,
    /// Depth `m` of the last evaluation.
    pub depth: usize,
    /// Relative change between the last two evaluations; `None` when it is
    /// undefined (a single evaluation, or both values zero).
    #[serde(serialize_with = "crate::report::ser_opt_rational")]
    pub eps_achieved: Option<RBig>,
    /// Whether the stopping rule fired before the depth cap.
    pub converged: bool,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub value: RBig,
}

impl MeasureApprox {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

/// One converged limit `R(λ)`.
#[derive(Clone, Debug)]
pub struct Limit {
    pub value: RBig,
    pub depth: usize,
    pub eps_achieved: Option<RBig>,
    pub converged: bool,
}

/// Number of consecutive small relative changes the stopping rule asks for.
pub const STREAK: usize = 3;

/// `|a - b| / |a|`, with `None` when both vanish and `+inf` (also `None`, but
/// never counted as small) when exactly one does.
pub fn relative_change(new: &RBig, old: &RBig) -> Option<RBig> {
    if new.is_zero() {
        return if old.is_zero() { None } else { Some(RBig::ONE) };
    }
    Some(abs(&((new - old) / new)))
}

/// Depths visited by the doubling rule from `start` up to `cap`.
pub fn depth_schedule(start: usize, cap: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = start.max(1);
    loop {
        out.push(m.min(cap));
        if m >= cap {
            break;
        }
        m *= 2;
    }
    out
}

/// Runs the doubling rule on `f(m)`. Steps where both values are zero do not
/// count towards the streak, since zero at a shallow depth says nothing about
/// deeper ones.
pub fn converge<F>(start: usize, cap: usize, eps: &RBig, mut f: F) -> Result<Limit>
where
    F: FnMut(usize) -> Result<RBig>,
{
    let mut prev: Option<RBig> = None;
    let mut streak = 0;
    let mut last_change = None;
    let mut depth = start;
    for m in depth_schedule(start, cap) {
        let v = f(m)?;
        depth = m;
        if let Some(p) = &prev {
            last_change = relative_change(&v, p);
            match &last_change {
                Some(c) if c < eps && !v.is_zero() => streak += 1,
                _ => streak = 0,
            }
        }
        prev = Some(v);
        if streak >= STREAK {
            return Ok(Limit {
                value: prev.unwrap(),
                depth,
                eps_achieved: last_change,
                converged: true,
            });
        }
    }
    Ok(Limit {
        value: prev.unwrap(),
        depth,
        eps_achieved: last_change,
        converged: false,
    })
}

/// `P^θ` for one `(θ, q)`, with the per-depth tables shared between queries.
pub struct ThetaMeasure {
    theta: ThetaSpec,
    ctx: QContext,
    tops: Mutex<HashMap<usize, Arc<BranchingRatios>>>,
    limits: Mutex<HashMap<(Signature, usize, RBig), Limit>>,
    transitions: Mutex<HashMap<(Signature, usize, RBig), Transition>>,
}

impl ThetaMeasure {
    pub fn new(theta: ThetaSpec, ctx: QContext) -> Self {
        ThetaMeasure {
            theta,
            ctx,
            tops: Mutex::new(HashMap::new()),
            limits: Mutex::new(HashMap::new()),
            transitions: Mutex::new(HashMap::new()),
        }
    }

    pub fn theta(&self) -> &ThetaSpec {
        &self.theta
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    fn top(&self, m: usize) -> Arc<BranchingRatios> {
        let mut tops = self.tops.lock().unwrap();
        tops.entry(m)
            .or_insert_with(|| Arc::new(BranchingRatios::new(self.ctx.clone(), self.theta.lambda(m))))
            .clone()
    }

    /// `R_m(λ) = dim_q(λ, λ(m;θ)) / dim_q(λ(m;θ))` for `level(λ) <= m`.
    pub fn ratio_at(&self, lam: &Signature, m: usize) -> Result<RBig> {
        let k = lam.level();
        if k > m {
            return Err(contract!("depth {m} is below the level {k} of [{lam}]"));
        }
        if k == m {
            let top = self.theta.lambda(m);
            return Ok(if *lam == top {
                RBig::ONE / qdim_product(&self.ctx, &top).into_value()
            } else {
                RBig::ZERO
            });
        }
        self.top(m).ratio(lam)
    }

    /// `R(λ)` under the doubling rule, starting at `level(λ) + 1`.
    pub fn limit(&self, lam: &Signature, eps: &RBig, depth_cap: usize) -> Result<Limit> {
        let n = lam.level();
        if depth_cap < n + 1 {
            return Err(contract!("depth cap {depth_cap} must exceed the level {n}"));
        }
        if *eps <= RBig::ZERO {
            return Err(contract!("eps must be positive"));
        }
        let key = (lam.clone(), depth_cap, eps.clone());
        if let Some(l) = self.limits.lock().unwrap().get(&key) {
            return Ok(l.clone());
        }
        let l = converge(n + 1, depth_cap, eps, |m| self.ratio_at(lam, m))?;
        self.limits.lock().unwrap().insert(key, l.clone());
        Ok(l)
    }

    fn approx(&self, value: RBig, l: &Limit) -> MeasureApprox {
        MeasureApprox {
            theta: self.theta.clone(),
            q: self.ctx.q().clone(),
            depth: l.depth,
            eps_achieved: l.eps_achieved.clone(),
            converged: l.converged,
            value,
        }
    }

    /// `P^θ(C_α) = w(α) · R(λ)` for a path `α` from the root to `λ`.
    pub fn cylinder_mass(&self, alpha: &PathPrefix, eps: &RBig, depth_cap: usize) -> Result<MeasureApprox> {
        if !alpha.starts_at_root() {
            return Err(contract!("cylinder paths start at the root, got [{}]", alpha.start()));
        }
        let l = self.limit(alpha.end(), eps, depth_cap)?;
        let w = path_weight(&self.ctx, alpha).into_value();
        Ok(self.approx(w * &l.value, &l))
    }

    /// `P^θ(C_α)` at a prescribed depth.
    pub fn cylinder_mass_at(&self, alpha: &PathPrefix, m: usize) -> Result<RBig> {
        if !alpha.starts_at_root() {
            return Err(contract!("cylinder paths start at the root, got [{}]", alpha.start()));
        }
        Ok(path_weight(&self.ctx, alpha).into_value() * self.ratio_at(alpha.end(), m)?)
    }

    /// `P^θ(paths through λ) = dim_q(λ) · R(λ)`.
    pub fn level_marginal(&self, lam: &Signature, eps: &RBig, depth_cap: usize) -> Result<MeasureApprox> {
        let l = self.limit(lam, eps, depth_cap)?;
        let d = qdim_product(&self.ctx, lam).into_value();
        Ok(self.approx(d * &l.value, &l))
    }

    pub fn level_marginal_at(&self, lam: &Signature, m: usize) -> Result<RBig> {
        Ok(qdim_product(&self.ctx, lam).into_value() * self.ratio_at(lam, m)?)
    }

    /// Level-`k` signatures from which `λ(probe;θ)` is reachable.
    pub fn support_at_level(&self, k: usize, probe_depth: usize) -> Result<Vec<Signature>> {
        support_at_level(&self.theta, k, probe_depth)
    }

    /// One-step law `P(C_{(α,e)}) / P(C_α)` over the successors of the end of
    /// `α`. All entries are evaluated at one common depth, so they sum to 1
    /// exactly; the depth is chosen by the doubling rule applied to the total
    /// variation between successive laws.
    pub fn conditional_transition(
        &self,
        alpha: &PathPrefix,
        eps: &RBig,
        depth_cap: usize,
    ) -> Result<Transition> {
        let mass = self.cylinder_mass(alpha, eps, depth_cap)?;
        if mass.is_zero() {
            return Err(domain!("cylinder [{alpha}] has zero mass at depth {}", mass.depth));
        }
        self.transition_from(alpha.end(), eps, depth_cap)
    }

    /// The one-step law out of `lam`; it depends on the path only through its
    /// endpoint.
    pub fn transition_from(&self, lam: &Signature, eps: &RBig, depth_cap: usize) -> Result<Transition> {
        let n = lam.level();
        if depth_cap < n + 1 {
            return Err(contract!("depth cap {depth_cap} must exceed the level {}", n + 1));
        }
        let key = (lam.clone(), depth_cap, eps.clone());
        if let Some(t) = self.transitions.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let mut prev: Option<Vec<(Signature, RBig)>> = None;
        let mut streak = 0;
        let mut last = None;
        let mut depth = n + 1;
        let mut converged = false;
        for m in depth_schedule(n + 1, depth_cap) {
            depth = m;
            let law = self.transition_at(lam, m)?;
            if law.is_empty() {
                // lam is not yet reachable at this depth
                prev = None;
                streak = 0;
                continue;
            }
            if let Some(p) = &prev {
                let tv = total_variation(p, &law);
                streak = if &tv < eps { streak + 1 } else { 0 };
                last = Some(tv);
            }
            prev = Some(law);
            if streak >= STREAK {
                converged = true;
                break;
            }
        }
        let law = prev.ok_or_else(|| domain!("[{lam}] has zero mass up to depth {depth_cap}"))?;
        let t = Transition {
            from: lam.clone(),
            depth,
            tv_achieved: last,
            converged,
            law,
        };
        self.transitions.lock().unwrap().insert(key, t.clone());
        Ok(t)
    }

    /// The law at depth `m`; empty when `lam` has zero mass there.
    pub fn transition_at(&self, lam: &Signature, m: usize) -> Result<Vec<(Signature, RBig)>> {
        let n = lam.level();
        let here = self.ratio_at(lam, m)?;
        if here.is_zero() {
            return Ok(Vec::new());
        }
        let top = self.theta.lambda(m);
        let mut law = Vec::new();
        for next in graph::successors_in_envelope(lam, &top, lam) {
            debug_assert_eq!(next.level(), n + 1);
            let w = self.ctx.pow(qweights::edge_exponent(lam, &next));
            let p = w * self.ratio_at(&next, m)? / &here;
            if !p.is_zero() {
                law.push((next, p));
            }
        }
        Ok(law)
    }

    /// Mass of the atom `(e^θ_n)`, i.e. `P(C_{α^θ_N})` for the index `N` at
    /// which the constant tail begins.
    pub fn atom_mass(&self, eps: &RBig, depth_cap: usize) -> Result<MeasureApprox> {
        let n = self
            .theta
            .stable_index()
            .ok_or_else(|| domain!("theta {} is unbounded and has no atom", self.theta))?;
        self.cylinder_mass(&self.theta.distinguished_path(n), eps, depth_cap)
    }

    /// Compares `P(C_α)/w(α)` with `P(λ)/dim_q(λ)` over every path to every
    /// supported `λ` at `level`. `dim_q(λ)` here comes from the level-wise
    /// DP, the masses from the closed form.
    pub fn q_centrality_check(&self, level: usize, eps: &RBig, depth_cap: usize) -> Result<CentralityReport> {
        let probe = depth_cap.min(self.probe_depth_for(level, eps, depth_cap)?);
        let mut worst = RBig::ZERO;
        let mut entries = Vec::new();
        for lam in self.support_at_level(level, probe)? {
            let marginal = self.level_marginal(&lam, eps, depth_cap)?;
            let dq = qweights::qdim(&self.ctx, &lam).into_value();
            let per_weight = &marginal.value / &dq;
            let paths = if lam.is_root() {
                vec![PathPrefix::trivial(lam.clone())]
            } else {
                graph::enumerate_paths(&Signature::root(), &lam)?
            };
            for alpha in paths {
                let c = self.cylinder_mass(&alpha, eps, depth_cap)?;
                let w = path_weight(&self.ctx, &alpha).into_value();
                let dev = if per_weight.is_zero() {
                    abs(&(&c.value / w))
                } else {
                    abs(&((&c.value / w - &per_weight) / &per_weight))
                };
                if dev > worst {
                    worst = dev.clone();
                }
                entries.push(CentralityEntry {
                    path: alpha,
                    deviation: dev,
                });
            }
        }
        Ok(CentralityReport {
            level,
            probe_depth: probe,
            pass: worst < *eps,
            worst_deviation: worst,
            entries,
        })
    }

    /// Smallest doubling probe depth at which the supported level-`k`
    /// marginals cover all but `eps` of the mass.
    fn probe_depth_for(&self, k: usize, eps: &RBig, depth_cap: usize) -> Result<usize> {
        Ok(self.normalization_check(k, eps, depth_cap)?.probe_depth)
    }

    /// Sums the level-`k` marginals over the support, growing the probe depth
    /// by doubling until the deficit is below `eps` (or the cap is reached).
    /// For bounded θ it also reports the exact sum at one common depth, which
    /// is 1 on the nose.
    pub fn normalization_check(&self, k: usize, eps: &RBig, depth_cap: usize) -> Result<NormalizationReport> {
        if depth_cap < k + 1 {
            return Err(contract!("depth cap {depth_cap} must exceed the level {k}"));
        }
        let mut cache: HashMap<Signature, RBig> = HashMap::new();
        let mut last = None;
        for p in depth_schedule(k + 1, depth_cap) {
            let support = self.support_at_level(k, p)?;
            let mut total = RBig::ZERO;
            for lam in &support {
                if !cache.contains_key(lam) {
                    let v = self.level_marginal(lam, eps, depth_cap)?.value;
                    cache.insert(lam.clone(), v);
                }
                total += &cache[lam];
            }
            let deficit = abs(&(RBig::ONE - &total));
            let done = deficit < *eps || p >= depth_cap;
            last = Some((p, support.len(), total, deficit));
            if done {
                break;
            }
        }
        let (probe_depth, support_size, total, deficit) = last.unwrap();
        let exact_sum_at_common_depth = if self.theta.is_bounded() {
            let m = depth_cap;
            let mut s = RBig::ZERO;
            for lam in self.support_at_level(k, m)? {
                s += self.level_marginal_at(&lam, m)?;
            }
            Some(s)
        } else {
            None
        };
        Ok(NormalizationReport {
            level: k,
            probe_depth,
            support_size,
            pass: deficit < *eps,
            total,
            deficit,
            exact_sum_at_common_depth,
        })
    }
}

/// The one-step law out of a vertex.
#[derive(Clone, Debug, Serialize)]
pub struct Transition {
    pub from: Signature,
    pub depth: usize,
    #[serde(serialize_with = "crate::report::ser_opt_rational")]
    pub tv_achieved: Option<RBig>,
    pub converged: bool,
    #[serde(serialize_with = "ser_law")]
    pub law: Vec<(Signature, RBig)>,
}

fn ser_law<S: serde::Serializer>(law: &[(Signature, RBig)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(law.len()))?;
    for (sig, p) in law {
        seq.serialize_element(&serde_json::json!({
            "next": sig.to_string(),
            "probability": ExactJson::from(p),
        }))?;
    }
    seq.end()
}

fn total_variation(a: &[(Signature, RBig)], b: &[(Signature, RBig)]) -> RBig {
    let mut diff: HashMap<&Signature, RBig> = HashMap::new();
    for (s, p) in a {
        *diff.entry(s).or_insert_with(|| RBig::ZERO) += p;
    }
    for (s, p) in b {
        *diff.entry(s).or_insert_with(|| RBig::ZERO) -= p;
    }
    diff.values().fold(RBig::ZERO, |acc, d| acc + abs(d)) / RBig::from(2u8)
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralityEntry {
    pub path: PathPrefix,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub deviation: RBig,
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralityReport {
    pub level: usize,
    pub probe_depth: usize,
    pub pass: bool,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub worst_deviation: RBig,
    pub entries: Vec<CentralityEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalizationReport {
    pub level: usize,
    pub probe_depth: usize,
    pub support_size: usize,
    pub pass: bool,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub total: RBig,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub deficit: RBig,
    #[serde(serialize_with = "crate::report::ser_opt_rational")]
    pub exact_sum_at_common_depth: Option<RBig>,
}

/// Level-`k` signatures from which `λ(probe;θ)` is reachable. Reachability
/// only grows with the probe depth, so membership is conclusive.
pub fn support_at_level(theta: &ThetaSpec, k: usize, probe_depth: usize) -> Result<Vec<Signature>> {
    if probe_depth <= k {
        return Err(contract!("probe depth {probe_depth} must exceed the level {k}"));
    }
    let top = theta.lambda(probe_depth);
    let t = top.entries();
    let shift = probe_depth - k;
    let bounds: Vec<_> = (0..k).map(|i| (t[i + shift], t[i])).collect();
    Ok(nonincreasing_in_boxes(&bounds)
        .into_iter()
        .map(Signature::from_sorted)
        .collect())
}

pub fn cylinder_mass(
    theta: &ThetaSpec,
    ctx: &QContext,
    alpha: &PathPrefix,
    eps: &RBig,
    depth_cap: usize,
) -> Result<MeasureApprox> {
    ThetaMeasure::new(theta.clone(), ctx.clone()).cylinder_mass(alpha, eps, depth_cap)
}

pub fn level_marginal(
    theta: &ThetaSpec,
    ctx: &QContext,
    lam: &Signature,
    eps: &RBig,
    depth_cap: usize,
) -> Result<MeasureApprox> {
    ThetaMeasure::new(theta.clone(), ctx.clone()).level_marginal(lam, eps, depth_cap)
}

pub fn conditional_transition(
    theta: &ThetaSpec,
    ctx: &QContext,
    alpha: &PathPrefix,
    eps: &RBig,
    depth_cap: usize,
) -> Result<Transition> {
    ThetaMeasure::new(theta.clone(), ctx.clone()).conditional_transition(alpha, eps, depth_cap)
}

pub fn q_centrality_check(
    theta: &ThetaSpec,
    ctx: &QContext,
    level: usize,
    eps: &RBig,
    depth_cap: usize,
) -> Result<CentralityReport> {
    ThetaMeasure::new(theta.clone(), ctx.clone()).q_centrality_check(level, eps, depth_cap)
}

pub fn atom_mass(theta: &ThetaSpec, ctx: &QContext, eps: &RBig, depth_cap: usize) -> Result<MeasureApprox> {
    ThetaMeasure::new(theta.clone(), ctx.clone()).atom_mass(eps, depth_cap)
}

/// `[dim λ(n;θ)]` for `n = 1..=n_max`.
pub fn dim_growth_evidence(theta: &ThetaSpec, n_max: usize) -> Result<Vec<dashu_int::UBig>> {
    if theta.is_constant() {
        return Err(domain!("theta {theta} is constant, its dimensions are all 1"));
    }
    if !theta.is_bounded() {
        return Err(domain!("theta {theta} is unbounded"));
    }
    Ok((1..=n_max).map(|n| graph::weyl_dim(&theta.lambda(n))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, to_f64};

    fn sig(s: &str) -> Signature {
        s.parse().unwrap()
    }

    fn path(s: &str) -> PathPrefix {
        s.parse().unwrap()
    }

    fn half() -> QContext {
        QContext::from_ratio(1, 2).unwrap()
    }

    fn eps() -> RBig {
        rat(1, 1_000_000_000)
    }

    fn affine() -> ThetaSpec {
        ThetaSpec::affine(1, 1).unwrap()
    }

    fn step() -> ThetaSpec {
        "prefix=0;tail=const:1".parse().unwrap()
    }

    #[test]
    fn schedule_doubles_to_cap() {
        assert_eq!(depth_schedule(2, 64), vec![2, 4, 8, 16, 32, 64]);
        assert_eq!(depth_schedule(3, 20), vec![3, 6, 12, 20]);
        assert_eq!(depth_schedule(5, 5), vec![5]);
    }

    #[test]
    fn stopping_rule_needs_three_small_changes() {
        let e = rat(1, 100);
        // constant sequence stops after three zero changes
        let l = converge(1, 64, &e, |_| Ok(RBig::ONE)).unwrap();
        assert!(l.converged);
        assert_eq!(l.depth, 8);
        // zeros never count
        let l = converge(1, 16, &e, |_| Ok(RBig::ZERO)).unwrap();
        assert!(!l.converged);
        assert_eq!(l.depth, 16);
        assert!(l.eps_achieved.is_none());
    }

    #[test]
    fn constant_theta_is_a_point_mass() {
        let m = ThetaMeasure::new(ThetaSpec::constant(2), half());
        for n in 1..5 {
            let a = ThetaSpec::constant(2).distinguished_path(n);
            for depth in [n + 1, n + 3, 20] {
                assert!(m.cylinder_mass_at(&a, depth).unwrap().is_one());
            }
            assert!(m.cylinder_mass(&a, &eps(), 64).unwrap().value.is_one());
        }
        assert!(m.level_marginal(&sig("2,2,2"), &eps(), 64).unwrap().value.is_one());
        assert!(m.level_marginal(&sig("2,1,1"), &eps(), 64).unwrap().is_zero());
    }

    #[test]
    fn golden_affine_masses() {
        let m = ThetaMeasure::new(affine(), half());
        let a = m.cylinder_mass(&path("1"), &eps(), 64).unwrap();
        assert!((to_f64(&a.value) - 0.737_512_254_153_801_2).abs() < 1e-12);
        assert_eq!(a.depth, 64);
        let b = m.cylinder_mass(&path("1;2,1"), &eps(), 64).unwrap();
        assert!((to_f64(&b.value) - 0.543_924_325_027_020_9).abs() < 1e-12);
        assert!(m.cylinder_mass(&path("0;1,0"), &eps(), 64).unwrap().is_zero());
    }

    #[test]
    fn golden_step_masses() {
        let m = ThetaMeasure::new(step(), half());
        let atom = m.atom_mass(&eps(), 64).unwrap();
        assert!((to_f64(&atom.value) - 0.75).abs() < 1e-12);
        let p = m.cylinder_mass(&path("1;1,0"), &eps(), 64).unwrap();
        assert!((to_f64(&p.value) - 0.1875).abs() < 1e-12);
        let lm = m.level_marginal(&sig("1,0"), &eps(), 64).unwrap();
        assert!((to_f64(&lm.value) - 0.9375).abs() < 1e-12);
    }

    #[test]
    fn marginal_is_sum_of_cylinders_at_fixed_depth() {
        for theta in [affine(), step()] {
            let m = ThetaMeasure::new(theta, half());
            for lam in ["1,0", "2,1", "1,1", "3,1,0", "2,1,1"] {
                let lam = sig(lam);
                for depth in [4, 9] {
                    let total = crate::exact::sum(
                        graph::enumerate_paths(&Signature::root(), &lam)
                            .unwrap()
                            .iter()
                            .map(|a| m.cylinder_mass_at(a, depth).unwrap()),
                    );
                    assert_eq!(total, m.level_marginal_at(&lam, depth).unwrap());
                }
            }
        }
    }

    #[test]
    fn closed_form_agrees_with_dp_at_each_depth() {
        let ctx = QContext::from_ratio(4, 5).unwrap();
        for theta in [affine(), step(), "prefix=-1,0;tail=affine:start=2,step=2".parse().unwrap()] {
            let m = ThetaMeasure::new(theta.clone(), ctx.clone());
            for depth in [3, 5, 7] {
                let top = theta.lambda(depth);
                let dq = qweights::qdim(&ctx, &top).into_value();
                for lam in support_at_level(&theta, 2, depth).unwrap() {
                    let dp = qweights::qdim_between(&ctx, &lam, &top).unwrap().into_value() / &dq;
                    assert_eq!(m.ratio_at(&lam, depth).unwrap(), dp);
                }
            }
        }
    }

    #[test]
    fn support_examples() {
        assert_eq!(
            support_at_level(&step(), 1, 5).unwrap(),
            vec![sig("0"), sig("1")]
        );
        for k in 1..4 {
            assert_eq!(
                support_at_level(&ThetaSpec::constant(3), k, 9).unwrap(),
                vec![Signature::constant(3, k)]
            );
        }
        let s = support_at_level(&affine(), 1, 4).unwrap();
        assert_eq!(s, vec![sig("1"), sig("2"), sig("3"), sig("4")]);
        assert!(support_at_level(&affine(), 3, 3).is_err());
    }

    #[test]
    fn transitions_sum_to_one() {
        let m = ThetaMeasure::new(affine(), half());
        let t = m.conditional_transition(&path("1"), &eps(), 64).unwrap();
        let total = crate::exact::sum(t.law.iter().map(|(_, p)| p.clone()));
        assert!(total.is_one());
        let t = m.transition_at(&sig("1"), 3).unwrap();
        assert!(crate::exact::sum(t.into_iter().map(|(_, p)| p)).is_one());

        let c = ThetaMeasure::new(ThetaSpec::constant(0), half());
        let t = c.conditional_transition(&path("0;0,0"), &eps(), 64).unwrap();
        assert_eq!(t.law.len(), 1);
        assert!(t.law[0].1.is_one());

        let s = ThetaMeasure::new(step(), half());
        assert!(matches!(
            s.conditional_transition(&path("1;2,1"), &eps(), 64),
            Err(crate::Error::Domain(_))
        ));
        // one-step law is the ratio of cylinder masses at the common depth
        let t = s.conditional_transition(&path("1"), &eps(), 64).unwrap();
        for (next, p) in &t.law {
            let ext = path("1").extended(next.clone()).unwrap();
            let expect = s.cylinder_mass_at(&ext, t.depth).unwrap()
                / s.cylinder_mass_at(&path("1"), t.depth).unwrap();
            assert_eq!(p, &expect);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let theta = step();
        let a = sample_path(&theta, &half(), 4, 7, &eps(), 64).unwrap();
        let b = sample_path(&theta, &half(), 4, 7, &eps(), 64).unwrap();
        assert_eq!(a, b);
        let z = sample_path(&ThetaSpec::constant(0), &half(), 3, 99, &eps(), 64).unwrap();
        assert_eq!(z, ThetaSpec::constant(0).distinguished_path(3));
    }

    #[test]
    fn atoms_and_growth() {
        let c = ThetaMeasure::new(ThetaSpec::constant(4), half());
        assert!(c.atom_mass(&eps(), 64).unwrap().value.is_one());
        let a = ThetaMeasure::new(affine(), half());
        assert!(matches!(a.atom_mass(&eps(), 64), Err(crate::Error::Domain(_))));
        let g = dim_growth_evidence(&step(), 6).unwrap();
        let g: Vec<u32> = g.iter().map(|x| u32::try_from(x.clone()).unwrap()).collect();
        assert_eq!(g, vec![1, 2, 3, 4, 5, 6]);
        assert!(dim_growth_evidence(&ThetaSpec::constant(1), 3).is_err());
    }

    #[test]
    fn centrality_and_normalization() {
        for theta in [ThetaSpec::constant(0), step(), affine()] {
            let m = ThetaMeasure::new(theta, half());
            let tol = rat(1, 1_000_000);
            let c = m.q_centrality_check(3, &tol, 64).unwrap();
            assert!(c.pass);
            let n = m.normalization_check(2, &tol, 64).unwrap();
            assert!(n.pass, "{:?}", n);
            if let Some(s) = n.exact_sum_at_common_depth {
                assert!(s.is_one());
            }
        }
    }

    #[test]
    fn depth_cap_below_level_is_rejected() {
        let m = ThetaMeasure::new(affine(), half());
        assert!(m.cylinder_mass(&path("1;2,1"), &eps(), 2).is_err());
        assert!(m.cylinder_mass(&path("1;2,1"), &eps(), 3).is_ok());
    }
}
