//! Chains of segment paths with weight ratio `q^2`, and certificates that
//! `q^2` lies in the ratio set of `P^θ` for unbounded `θ`.

mod young;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};

use dashu_ratio::RBig;
use serde::Serialize;

pub use young::{
    chain_cover_search, chain_partition_interval, chain_partition_young, grade_runs, graded,
    validate_young_chains, young_interval, RectYoungDiagram, DEFAULT_BUDGET,
};

use crate::chains::ChainPartition;
use crate::dynamics::{rn_exponent, PathMap, SegmentShift};
use crate::error::{contract, domain, Result};
use crate::exact::sum;
use crate::graph::{enumerate_paths, has_path, nonincreasing_in_boxes, PathPrefix, Signature};
use crate::measure::{MeasureApprox, ThetaMeasure};
use crate::qweights::{path_exponent, path_weight, weight_ratio_exponent};
use crate::report::ser_rational;
use crate::theta::ThetaSpec;

/// Segment paths from `λ` (the end of `α`) up to level `horizon`, grouped by
/// their endpoint, for endpoints with positive mass.
#[derive(Clone, Debug, Serialize)]
pub struct SegmentSet {
    pub lambda: Signature,
    pub horizon: usize,
    /// Positivity of an endpoint `μ` is `has_path(μ, λ(probe;θ))`.
    pub probe_depth: usize,
    pub groups: BTreeMap<Signature, Vec<PathPrefix>>,
}

impl SegmentSet {
    pub fn len(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PathPrefix> {
        self.groups.values().flatten()
    }
}

/// Smallest `L > N + 1` with `θ_L > λ_1`.
pub fn default_horizon(theta: &ThetaSpec, lam: &Signature) -> Result<usize> {
    if theta.is_bounded() {
        return Err(domain!("theta {theta} is bounded"));
    }
    let n = lam.level();
    let top = lam.get(1);
    Ok((n + 2..).find(|&l| theta.value(l) > top).expect("theta is unbounded"))
}

fn check_setting(theta: &ThetaSpec, alpha: &PathPrefix, horizon: usize) -> Result<()> {
    if theta.is_bounded() {
        return Err(domain!("theta {theta} is bounded; its ratio set is trivial"));
    }
    if !alpha.starts_at_root() || alpha.is_empty() {
        return Err(contract!("alpha must be a nonempty path from the root"));
    }
    let n = alpha.len();
    let lam = alpha.end();
    if horizon <= n + 1 {
        return Err(domain!("horizon {horizon} must exceed {}", n + 1));
    }
    if theta.value(horizon) <= lam.get(1) {
        return Err(domain!(
            "theta_{horizon} = {} does not exceed the first entry {} of [{lam}]",
            theta.value(horizon),
            lam.get(1)
        ));
    }
    Ok(())
}

pub fn segment_paths(
    theta: &ThetaSpec,
    alpha: &PathPrefix,
    horizon: usize,
    probe_depth: usize,
) -> Result<SegmentSet> {
    check_setting(theta, alpha, horizon)?;
    if probe_depth <= horizon {
        return Err(contract!("probe depth {probe_depth} must exceed the horizon {horizon}"));
    }
    let lam = alpha.end();
    let n = lam.level();
    let r = horizon - n;
    let top = theta.lambda(probe_depth);
    let (l, t) = (lam.entries(), top.entries());
    let bounds: Vec<_> = (0..horizon)
        .map(|i| {
            let mut lo = t[i + probe_depth - horizon];
            let mut hi = t[i];
            if i < n {
                lo = lo.max(l[i]);
            }
            if i >= r {
                hi = hi.min(l[i - r]);
            }
            (lo, hi)
        })
        .collect();
    let mut groups = BTreeMap::new();
    for e in nonincreasing_in_boxes(&bounds) {
        let mu = Signature::new(e)?;
        if has_path(lam, &mu)? && has_path(&mu, &top)? {
            let segs = enumerate_paths(lam, &mu)?;
            groups.insert(mu, segs);
        }
    }
    Ok(SegmentSet {
        lambda: lam.clone(),
        horizon,
        probe_depth,
        groups,
    })
}

/// The split of a segment `λ -> μ` into the first coordinates of its
/// intermediate vertices and everything else.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Kappa {
    /// `(m_{L-1,1} - λ_1, ..., m_{N+1,1} - λ_1)` in the `(μ_1 - λ_1) x (L-N-1)`
    /// rectangle.
    pub first: RectYoungDiagram,
    /// `(m_{n,2}, ..., m_{n,n})` for `n = N+1, ..., L-1`.
    pub rest: Vec<Vec<i64>>,
}

impl Kappa {
    /// Smallest diagram compatible with `rest`: `ν_i = max(0, m_{L-i+1,2} - λ_1)`,
    /// where `m_{L,2} = μ_2`.
    pub fn lower_bound(&self, lam: &Signature, mu: &Signature) -> RectYoungDiagram {
        let l = self.rest.len();
        let second = |level_from_top: usize| {
            if level_from_top == 0 {
                mu.get(2)
            } else {
                self.rest[l - level_from_top][0]
            }
        };
        let nu = (1..=l).map(|i| (second(i - 1) - lam.get(1)).max(0)).collect();
        RectYoungDiagram::new(self.first.k(), nu).expect("bounds are nonincreasing")
    }
}

pub fn kappa_decompose(seg: &PathPrefix, lam: &Signature, horizon: usize) -> Result<Kappa> {
    if seg.start() != lam || seg.end_level() != horizon || seg.len() < 2 {
        return Err(contract!(
            "[{seg}] is not a segment from [{lam}] to level {horizon} with an intermediate vertex"
        ));
    }
    let l1 = lam.get(1);
    let k = seg.end().get(1) - l1;
    let first = seg.intermediate().iter().rev().map(|s| s.get(1) - l1).collect();
    let first = RectYoungDiagram::new(k, first)?;
    let rest = seg
        .intermediate()
        .iter()
        .map(|s| s.entries()[1..].to_vec())
        .collect();
    Ok(Kappa { first, rest })
}

pub fn kappa_reassemble(lam: &Signature, mu: &Signature, kappa: &Kappa) -> Result<PathPrefix> {
    let l = kappa.rest.len();
    if kappa.first.l() != l {
        return Err(contract!("kappa parts have different lengths"));
    }
    let mut steps = Vec::with_capacity(l + 1);
    for (j, rest) in kappa.rest.iter().enumerate() {
        let mut e = vec![lam.get(1) + kappa.first.entries()[l - 1 - j]];
        e.extend_from_slice(rest);
        steps.push(Signature::new(e)?);
    }
    steps.push(mu.clone());
    PathPrefix::new(lam.clone(), steps)
}

/// Chains of segment paths with common endpoint and weight ratio `q^2`
/// between consecutive members.
#[derive(Clone, Debug, Serialize)]
pub struct PathChains {
    pub lambda: Signature,
    pub horizon: usize,
    pub probe_depth: usize,
    pub endpoints: usize,
    pub segments: usize,
    pub partition: ChainPartition<PathPrefix>,
    /// Segments that are alone at their weight within their endpoint group and
    /// therefore cannot be placed in any chain.
    pub unchained: Vec<PathPrefix>,
    /// Endpoints where the κ construction left a single-element group and the
    /// group was re-chained by weight.
    pub regrouped_endpoints: Vec<Signature>,
}

fn step_ok(a: &PathPrefix, b: &PathPrefix) -> bool {
    a.end() == b.end() && weight_ratio_exponent(a, b).ok() == Some(2)
}

pub fn validate_path_chains(p: &ChainPartition<PathPrefix>) -> std::result::Result<(), String> {
    p.validate(step_ok)
}

/// Chains for one endpoint: split by `κ_2`, chain each piece through its
/// Young interval, and pull back. `None` if some piece is a single segment.
fn kappa_chains(lam: &Signature, mu: &Signature, horizon: usize, segs: &[PathPrefix]) -> Result<Option<Vec<Vec<PathPrefix>>>> {
    let mut pieces: BTreeMap<Vec<Vec<i64>>, Vec<(Kappa, &PathPrefix)>> = BTreeMap::new();
    for s in segs {
        let kp = kappa_decompose(s, lam, horizon)?;
        pieces.entry(kp.rest.clone()).or_default().push((kp, s));
    }
    let mut chains = Vec::new();
    for members in pieces.values() {
        let nu = members[0].0.lower_bound(lam, mu);
        let Some(p) = chain_partition_interval(nu.k(), &nu)? else {
            return Ok(None);
        };
        let by_first: HashMap<&RectYoungDiagram, &PathPrefix> =
            members.iter().map(|(kp, s)| (&kp.first, *s)).collect();
        if p.universe().len() != members.len() || p.universe().iter().any(|d| !by_first.contains_key(d)) {
            return Err(contract!("segments to [{mu}] do not match their Young interval"));
        }
        for c in p.chains() {
            chains.push(c.iter().map(|d| by_first[d].clone()).collect());
        }
    }
    Ok(Some(chains))
}

pub fn chain_partition_paths(
    theta: &ThetaSpec,
    alpha: &PathPrefix,
    horizon: usize,
    probe_depth: usize,
) -> Result<PathChains> {
    let set = segment_paths(theta, alpha, horizon, probe_depth)?;
    chains_for(&set)
}

fn chains_for(set: &SegmentSet) -> Result<PathChains> {
    let lam = &set.lambda;
    let mut chains: Vec<Vec<PathPrefix>> = Vec::new();
    let mut unchained = Vec::new();
    let mut regrouped = Vec::new();
    for (mu, segs) in &set.groups {
        if let Some(c) = kappa_chains(lam, mu, set.horizon, segs)? {
            chains.extend(c);
            continue;
        }
        regrouped.push(mu.clone());
        let base = segs.iter().map(path_exponent).min().unwrap();
        let graded: Vec<(i64, PathPrefix)> = segs
            .iter()
            .map(|s| ((path_exponent(s) - base) / 2, s.clone()))
            .collect();
        let (runs, lonely) = grade_runs(&graded);
        chains.extend(runs);
        unchained.extend(lonely);
    }
    let universe: Vec<PathPrefix> = chains.iter().flatten().cloned().collect();
    let partition = ChainPartition::new(universe, chains);
    validate_path_chains(&partition).map_err(|e| contract!("path chains are invalid: {e}"))?;
    Ok(PathChains {
        lambda: lam.clone(),
        horizon: set.horizon,
        probe_depth: set.probe_depth,
        endpoints: set.groups.len(),
        segments: set.len(),
        partition,
        unchained,
        regrouped_endpoints: regrouped,
    })
}

/// Evidence that `q^2` is in the ratio set, built on one cylinder `C_α`.
///
/// The shift `γ` moves each chained segment to its successor in the chain.
/// On `E_γ` (cylinders through all but the last member of each chain) the
/// cocycle is exactly `q^2`, and `E_γ` carries more than half the mass of
/// `C_α`. All masses are evaluated at one working depth so their sums are
/// exact. Endpoints are enumerated up to a probe depth that doubles until the
/// bound holds; `coverage_deficit` is the relative mass of `C_α` on endpoints
/// beyond it, which can only add to `E_γ`.
#[derive(Clone, Debug, Serialize)]
pub struct RatioCertificate {
    pub alpha: PathPrefix,
    pub lambda: Signature,
    pub horizon: usize,
    pub cylinder_mass: MeasureApprox,
    pub working_depth: usize,
    pub probe_depth: usize,
    #[serde(serialize_with = "ser_rational")]
    pub mass_at_working_depth: RBig,
    #[serde(serialize_with = "ser_rational")]
    pub covered_mass: RBig,
    #[serde(serialize_with = "ser_rational")]
    pub coverage_deficit: RBig,
    pub endpoints: usize,
    pub segments: usize,
    pub chains: usize,
    pub unchained: Vec<PathPrefix>,
    #[serde(serialize_with = "ser_rational")]
    pub unchained_mass: RBig,
    pub e_gamma_size: usize,
    #[serde(serialize_with = "ser_rational")]
    pub e_gamma_mass: RBig,
    #[serde(serialize_with = "ser_rational")]
    pub half_mass: RBig,
    /// `mass(E_γ) - mass(C_α)/2`.
    #[serde(serialize_with = "ser_rational")]
    pub margin: RBig,
    /// Exponents of `dP∘γ/dP` on `E_γ`; a single `2` when the check passes.
    pub rn_exponents_on_e: BTreeSet<i64>,
    /// Exponents of `dP∘γ/dP` on every moved cylinder.
    pub rn_histogram: BTreeMap<i64, usize>,
    pub rn_is_q2: bool,
    pub mass_inequality: bool,
    pub preserves_cylinder: bool,
    pub ratio: String,
    pub beta: String,
    pub pass: bool,
    pub gamma: SegmentShift,
}

pub fn ratio_certificate(
    measure: &ThetaMeasure,
    alpha: &PathPrefix,
    horizon: usize,
    eps: &RBig,
    depth_cap: usize,
) -> Result<RatioCertificate> {
    let theta = measure.theta();
    check_setting(theta, alpha, horizon)?;
    let mass = measure.cylinder_mass(alpha, eps, depth_cap)?;
    if mass.is_zero() {
        return Err(domain!("the cylinder of [{alpha}] has zero mass at depth {}", mass.depth));
    }
    let m = mass.depth.max(horizon + 1);
    let total = measure.cylinder_mass_at(alpha, m)?;
    if total == RBig::ZERO {
        return Err(domain!("the cylinder of [{alpha}] has zero mass at depth {m}"));
    }

    // masses of extended cylinders: w(α) w(α') R_m(μ)
    let w_alpha = path_weight(measure.ctx(), alpha).into_value();
    let mut ratios: HashMap<Signature, RBig> = HashMap::new();
    let mut seg_mass = |seg: &PathPrefix| -> Result<RBig> {
        let mu = seg.end();
        if !ratios.contains_key(mu) {
            ratios.insert(mu.clone(), measure.ratio_at(mu, m)?);
        }
        Ok(&w_alpha * path_weight(measure.ctx(), seg).into_value() * &ratios[mu])
    };

    let half = &total / RBig::from(2u8);
    // Chains are built per endpoint, so raising the probe depth only adds
    // chains and mass(E_γ) only grows: stop as soon as the bound holds.
    let mut p = horizon + 1;
    let (set, chains, covered, e_mass) = loop {
        let set = segment_paths(theta, alpha, horizon, p)?;
        let chains = chains_for(&set)?;
        let covered = sum(set.iter().map(&mut seg_mass).collect::<Result<Vec<_>>>()?);
        let e_mass = sum(
            chains
                .partition
                .chains()
                .iter()
                .flat_map(|c| &c[..c.len() - 1])
                .map(&mut seg_mass)
                .collect::<Result<Vec<_>>>()?,
        );
        if e_mass > half || p >= m {
            break (set, chains, covered, e_mass);
        }
        p = (2 * p).min(m);
    };
    let deficit = (&total - &covered) / &total;
    drop(set);

    let gamma = SegmentShift::new(alpha.clone(), horizon, chains.partition.chains().to_vec())?;
    let mut e_size = 0;
    let mut rn_on_e = BTreeSet::new();
    let mut hist = BTreeMap::new();
    let mut preserves = true;
    for c in gamma.chains() {
        for (i, seg) in c.iter().enumerate() {
            let omega = alpha.concat(seg)?;
            let k = rn_exponent(&gamma, &omega)?;
            *hist.entry(k).or_insert(0) += 1;
            let img = gamma.apply(&omega)?;
            preserves &= img.truncate(alpha.len()) == *alpha && img.end() == omega.end();
            if i + 1 < c.len() {
                rn_on_e.insert(k);
                e_size += 1;
            }
        }
    }
    let unchained_mass = sum(chains.unchained.iter().map(&mut seg_mass).collect::<Result<Vec<_>>>()?);
    let margin = &e_mass - &half;
    let rn_is_q2 = rn_on_e.iter().all(|&k| k == 2) && !rn_on_e.is_empty();
    let mass_inequality = margin > RBig::ZERO;
    Ok(RatioCertificate {
        alpha: alpha.clone(),
        lambda: alpha.end().clone(),
        horizon,
        cylinder_mass: mass,
        working_depth: m,
        probe_depth: p,
        mass_at_working_depth: total,
        covered_mass: covered,
        coverage_deficit: deficit,
        endpoints: chains.endpoints,
        segments: chains.segments,
        chains: gamma.chains().len(),
        unchained: chains.unchained,
        unchained_mass,
        e_gamma_size: e_size,
        e_gamma_mass: e_mass,
        half_mass: half,
        margin,
        rn_exponents_on_e: rn_on_e,
        rn_histogram: hist,
        rn_is_q2,
        mass_inequality,
        preserves_cylinder: preserves,
        ratio: "q^2".into(),
        beta: "1/2".into(),
        pass: rn_is_q2 && mass_inequality && preserves,
        gamma,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SummaryEntry {
    pub alpha: PathPrefix,
    pub horizon: usize,
    pub pass: bool,
    #[serde(serialize_with = "ser_rational")]
    pub margin: RBig,
    /// `margin / mass(C_α)`.
    #[serde(serialize_with = "ser_rational")]
    pub relative_margin: RBig,
    pub chains: usize,
    pub unchained: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioSetSummary {
    pub theta: ThetaSpec,
    pub level_cap: usize,
    pub cylinder_probe: usize,
    pub entries: Vec<SummaryEntry>,
    pub rn_histogram: BTreeMap<i64, usize>,
    pub exponents_even: bool,
    pub all_pass: bool,
    pub conclusion: String,
}

/// Certificates for every root path up to `level_cap` whose endpoint is in
/// the support at `cylinder_probe`. Each uses the default horizon plus
/// `l_extra`.
pub fn ratio_set_summary(
    measure: &ThetaMeasure,
    level_cap: usize,
    l_extra: usize,
    cylinder_probe: usize,
    eps: &RBig,
    depth_cap: usize,
) -> Result<RatioSetSummary> {
    let theta = measure.theta();
    if theta.is_bounded() {
        return Err(domain!("theta {theta} is bounded; its ratio set is trivial"));
    }
    let mut alphas = Vec::new();
    for k in 1..=level_cap {
        for lam in measure.support_at_level(k, cylinder_probe)? {
            alphas.extend(enumerate_paths(&Signature::root(), &lam)?);
        }
    }
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(alphas.len()).max(1);
    let mut results: Vec<(usize, Result<Option<(SummaryEntry, BTreeMap<i64, usize>)>>)> =
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    s.spawn(|| {
                        let mut out = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            let Some(alpha) = alphas.get(i) else { break };
                            out.push((i, summarise(measure, alpha, l_extra, eps, depth_cap)));
                        }
                        out
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("certificate worker panicked"))
                .collect()
        });
    results.sort_by_key(|(i, _)| *i);
    let mut entries = Vec::new();
    let mut hist: BTreeMap<i64, usize> = BTreeMap::new();
    for (_, r) in results {
        let Some((entry, h)) = r? else { continue };
        for (k, n) in h {
            *hist.entry(k).or_insert(0) += n;
        }
        entries.push(entry);
    }
    let exponents_even = hist.keys().all(|k| k % 2 == 0);
    let all_pass = !entries.is_empty() && entries.iter().all(|e| e.pass);
    let conclusion = if all_pass && exponents_even {
        "consistent with type III_q2: q^2 is in the ratio set on every tested cylinder, and all cocycle values are powers of q^2"
    } else {
        "inconclusive: some certificate failed"
    };
    Ok(RatioSetSummary {
        theta: theta.clone(),
        level_cap,
        cylinder_probe,
        entries,
        rn_histogram: hist,
        exponents_even,
        all_pass,
        conclusion: conclusion.into(),
    })
}

fn summarise(
    measure: &ThetaMeasure,
    alpha: &PathPrefix,
    l_extra: usize,
    eps: &RBig,
    depth_cap: usize,
) -> Result<Option<(SummaryEntry, BTreeMap<i64, usize>)>> {
    if measure.cylinder_mass(alpha, eps, depth_cap)?.is_zero() {
        return Ok(None);
    }
    let horizon = default_horizon(measure.theta(), alpha.end())? + l_extra;
    let c = ratio_certificate(measure, alpha, horizon, eps, depth_cap)?;
    let entry = SummaryEntry {
        relative_margin: &c.margin / &c.mass_at_working_depth,
        alpha: c.alpha,
        horizon: c.horizon,
        pass: c.pass,
        margin: c.margin,
        chains: c.chains,
        unchained: c.unchained.len(),
    };
    Ok(Some((entry, c.rn_histogram)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::rn_value_lattice_check;
    use crate::exact::rat;
    use crate::graph::weyl_dim;
    use crate::qweights::QContext;

    fn staircase() -> ThetaSpec {
        ThetaSpec::affine(1, 1).unwrap()
    }

    fn path(s: &str) -> PathPrefix {
        s.parse().unwrap()
    }

    fn sig(v: &[i64]) -> Signature {
        Signature::new(v.to_vec()).unwrap()
    }

    #[test]
    fn segments_have_large_first_entry() {
        let set = segment_paths(&staircase(), &path("1"), 3, 8).unwrap();
        assert!(!set.is_empty());
        for (mu, segs) in &set.groups {
            assert!(mu.get(1) >= 3);
            // every path from (1) to mu, counted independently of the enumeration
            let count = crate::qweights::qdim_between(&QContext::classical(), &sig(&[1]), mu).unwrap();
            assert_eq!(count.value(), &RBig::from(segs.len() as u64));
        }
        assert!(segment_paths(&ThetaSpec::constant(2), &path("1"), 3, 8).is_err());
        assert!(segment_paths(&staircase(), &path("1"), 2, 8).is_err());
        assert!(segment_paths(&staircase(), &path("3"), 3, 8).is_err());
    }

    #[test]
    fn kappa_round_trip_and_weights() {
        let set = segment_paths(&staircase(), &path("1"), 4, 8).unwrap();
        let lam = sig(&[1]);
        for (mu, segs) in &set.groups {
            let ks: Vec<Kappa> = segs.iter().map(|s| kappa_decompose(s, &lam, 4).unwrap()).collect();
            for (s, k) in segs.iter().zip(&ks) {
                assert_eq!(&kappa_reassemble(&lam, mu, k).unwrap(), s);
                assert!(k.first.contains(&k.lower_bound(&lam, mu)));
            }
            for (a, ka) in segs.iter().zip(&ks) {
                for (b, kb) in segs.iter().zip(&ks) {
                    if ka.rest == kb.rest {
                        let d = kb.first.size() - ka.first.size();
                        assert_eq!(weight_ratio_exponent(a, b).unwrap(), 2 * d);
                    }
                }
            }
        }
        let flat = kappa_decompose(&PathPrefix::parse_segment("1;1,1;2,1,1").unwrap(), &lam, 3).unwrap();
        assert_eq!(flat.first.size(), 0);
    }

    #[test]
    fn singleton_endpoint_is_reported() {
        // (1) -> (3,1) -> (3,3,1) is the only segment to (3,3,1)
        let chains = chain_partition_paths(&staircase(), &path("1"), 3, 8).unwrap();
        validate_path_chains(&chains.partition).unwrap();
        let lone = PathPrefix::parse_segment("1;3,1;3,3,1").unwrap();
        assert!(chains.unchained.contains(&lone));
        assert_eq!(
            chains.partition.universe().len() + chains.unchained.len(),
            chains.segments
        );
    }

    #[test]
    fn path_chains_for_small_cases() {
        for alpha in ["1", "2"] {
            let alpha = path(alpha);
            let l0 = default_horizon(&staircase(), alpha.end()).unwrap();
            for horizon in [3, 4] {
                if horizon < l0 {
                    continue;
                }
                let c = chain_partition_paths(&staircase(), &alpha, horizon, horizon + 4).unwrap();
                validate_path_chains(&c.partition).unwrap();
                assert!(c.partition.chains().iter().all(|ch| ch.len() >= 2));
            }
        }
    }

    #[test]
    fn certificate_on_level_one() {
        let ctx = QContext::from_ratio(1, 2).unwrap();
        let m = ThetaMeasure::new(staircase(), ctx.clone());
        let eps = rat(1, 1_000_000_000);
        for (alpha, horizon) in [("1", 3), ("2", 3)] {
            let c = ratio_certificate(&m, &path(alpha), horizon, &eps, 64).unwrap();
            assert!(c.pass, "{alpha}: margin {}", c.margin);
            assert_eq!(c.rn_exponents_on_e, BTreeSet::from([2]));
            assert!(c.margin > RBig::ZERO);
            let omegas: Vec<PathPrefix> = c
                .gamma
                .chains()
                .iter()
                .flatten()
                .map(|s| path(alpha).concat(s).unwrap())
                .collect();
            let r = rn_value_lattice_check(&ctx, &[&c.gamma], &omegas).unwrap();
            assert!(r.pass);
            for ch in c.gamma.chains() {
                let k = ch.len() as i64;
                let wrap = path(alpha).concat(ch.last().unwrap()).unwrap();
                assert_eq!(rn_exponent(&c.gamma, &wrap).unwrap(), -2 * (k - 1));
            }
        }
        assert!(ratio_certificate(&ThetaMeasure::new(ThetaSpec::constant(1), ctx), &path("1"), 3, &eps, 64).is_err());
        let _ = weyl_dim(&sig(&[1]));
    }
}
