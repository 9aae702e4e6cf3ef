//! Finite permutations of path prefixes and the cocycle `dP∘γ/dP`.
//!
//! A transformation acts on an infinite path through its first `depth` edges
//! and leaves the tail alone, so everything here works on root paths that are
//! at least `depth` edges long.

use std::collections::{BTreeMap, HashMap};

use dashu_ratio::RBig;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::chains::ChainPartition;
use crate::error::{contract, Result};
use crate::exact::abs;
use crate::graph::{enumerate_paths, PathPrefix, Signature};
use crate::measure::{MeasureApprox, ThetaMeasure};
use crate::qweights::{path_exponent, path_weight, QContext, QValue};
use crate::report::ser_rational;
use crate::theta::ThetaSpec;

/// Something that permutes root paths of a fixed length.
pub trait PathMap {
    /// Number of leading edges the map looks at and may rewrite.
    fn depth(&self) -> usize;

    /// Image of a root path of exactly `depth()` edges, or `None` if the map
    /// fixes it.
    fn map_head(&self, head: &PathPrefix) -> Option<PathPrefix>;

    fn apply(&self, omega: &PathPrefix) -> Result<PathPrefix> {
        check_long_enough(self.depth(), omega)?;
        let d = self.depth();
        match self.map_head(&omega.truncate(d)) {
            Some(img) => img.concat(&omega.suffix_from(d)),
            None => Ok(omega.clone()),
        }
    }
}

fn check_long_enough(depth: usize, omega: &PathPrefix) -> Result<()> {
    if !omega.starts_at_root() {
        return Err(contract!("transformations act on paths from the root, got one from [{}]", omega.start()));
    }
    if omega.len() < depth {
        return Err(contract!(
            "path has {} edges but the transformation acts on the first {depth}",
            omega.len()
        ));
    }
    Ok(())
}

#[derive(Clone, Debug)]
struct Block {
    paths: Vec<PathPrefix>,
    index: HashMap<PathPrefix, usize>,
    perm: Vec<usize>,
}

impl Block {
    fn new(target: &Signature, perm: Vec<usize>) -> Result<Self> {
        let paths = enumerate_paths(&Signature::root(), target)?;
        if perm.len() != paths.len() {
            return Err(contract!(
                "block for [{target}] has {} entries but there are {} paths",
                perm.len(),
                paths.len()
            ));
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(contract!("block for [{target}] is not a permutation: {perm:?}"));
            }
        }
        let index = paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Ok(Block { paths, index, perm })
    }

    fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }
}

/// An element of the finite group acting on the paths `* -> λ` for every
/// `λ` at one level; targets without a block are acted on trivially.
///
/// Block entries refer to `enumerate_paths(*, λ)`: path `i` goes to path
/// `perm[i]`.
#[derive(Clone, Debug)]
pub struct LevelPermutation {
    level: usize,
    blocks: BTreeMap<Signature, Block>,
}

impl LevelPermutation {
    pub fn identity(level: usize) -> Result<Self> {
        if level == 0 {
            return Err(contract!("a level permutation needs level >= 1"));
        }
        Ok(LevelPermutation {
            level,
            blocks: BTreeMap::new(),
        })
    }

    pub fn with_block(mut self, target: Signature, perm: Vec<usize>) -> Result<Self> {
        if target.level() != self.level {
            return Err(contract!("[{target}] is not at level {}", self.level));
        }
        let b = Block::new(&target, perm)?;
        if b.is_identity() {
            self.blocks.remove(&target);
        } else {
            self.blocks.insert(target, b);
        }
        Ok(self)
    }

    /// Swaps two root paths with a common endpoint.
    pub fn transposition(a: &PathPrefix, b: &PathPrefix) -> Result<Self> {
        if !a.starts_at_root() || !b.starts_at_root() || a.end() != b.end() || a.is_empty() {
            return Err(contract!("a transposition needs two root paths to the same vertex"));
        }
        let target = a.end().clone();
        let paths = enumerate_paths(&Signature::root(), &target)?;
        let find = |p: &PathPrefix| {
            paths
                .iter()
                .position(|x| x == p)
                .ok_or_else(|| contract!("[{p}] is not a path from the root"))
        };
        let (i, j) = (find(a)?, find(b)?);
        let mut perm: Vec<usize> = (0..paths.len()).collect();
        perm.swap(i, j);
        Self::identity(target.level())?.with_block(target, perm)
    }

    /// A uniformly random permutation on each of the given targets.
    pub fn random<R: Rng + ?Sized>(level: usize, targets: &[Signature], rng: &mut R) -> Result<Self> {
        let mut g = Self::identity(level)?;
        for t in targets {
            let n = enumerate_paths(&Signature::root(), t)?.len();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            g = g.with_block(t.clone(), perm)?;
        }
        Ok(g)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Non-identity blocks as `(target, permutation)`.
    pub fn blocks(&self) -> impl Iterator<Item = (&Signature, &[usize])> {
        self.blocks.iter().map(|(t, b)| (t, b.perm.as_slice()))
    }

    pub fn inverse(&self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|(t, b)| {
                let mut inv = vec![0; b.perm.len()];
                for (i, &p) in b.perm.iter().enumerate() {
                    inv[p] = i;
                }
                (t.clone(), Block { perm: inv, ..b.clone() })
            })
            .collect();
        LevelPermutation {
            level: self.level,
            blocks,
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &LevelPermutation) -> Result<Self> {
        if self.level != other.level {
            return Err(contract!(
                "cannot compose level permutations at levels {} and {}",
                self.level,
                other.level
            ));
        }
        let mut out = Self::identity(self.level)?;
        let targets: std::collections::BTreeSet<&Signature> =
            self.blocks.keys().chain(other.blocks.keys()).collect();
        for t in targets {
            let outer = self.blocks.get(t);
            let inner = other.blocks.get(t);
            let n = outer.or(inner).unwrap().perm.len();
            let perm = (0..n)
                .map(|i| {
                    let j = inner.map_or(i, |b| b.perm[i]);
                    outer.map_or(j, |b| b.perm[j])
                })
                .collect();
            out = out.with_block(t.clone(), perm)?;
        }
        Ok(out)
    }
}

impl PathMap for LevelPermutation {
    fn depth(&self) -> usize {
        self.level
    }

    fn map_head(&self, head: &PathPrefix) -> Option<PathPrefix> {
        let b = self.blocks.get(head.end())?;
        let i = *b.index.get(head)?;
        Some(b.paths[b.perm[i]].clone())
    }
}

impl Serialize for LevelPermutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct B<'a> {
            target: &'a Signature,
            permutation: &'a [usize],
        }
        let blocks: Vec<B> = self
            .blocks()
            .map(|(target, permutation)| B { target, permutation })
            .collect();
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("kind", "level_permutation")?;
        m.serialize_entry("level", &self.level)?;
        m.serialize_entry("blocks", &blocks)?;
        m.end()
    }
}

/// Cyclic shift of segment paths following a fixed root path `base`.
///
/// A path that runs through `base` and then through a chain member `a_i` up to
/// level `horizon` is sent to the same path with `a_i` replaced by `a_{i+1}`
/// (the last member wraps to the first). Every other path is fixed.
#[derive(Clone, Debug)]
pub struct SegmentShift {
    base: PathPrefix,
    horizon: usize,
    chains: ChainPartition<PathPrefix>,
    next: HashMap<PathPrefix, PathPrefix>,
}

impl SegmentShift {
    pub fn new(base: PathPrefix, horizon: usize, chains: Vec<Vec<PathPrefix>>) -> Result<Self> {
        if !base.starts_at_root() || base.is_empty() {
            return Err(contract!("the base of a segment shift must be a nonempty root path"));
        }
        if horizon <= base.len() {
            return Err(contract!("horizon {horizon} must exceed the base level {}", base.len()));
        }
        for seg in chains.iter().flatten() {
            if seg.start() != base.end() || seg.end_level() != horizon {
                return Err(contract!(
                    "segment [{seg}] does not run from [{}] to level {horizon}",
                    base.end()
                ));
            }
        }
        let universe: Vec<PathPrefix> = chains.iter().flatten().cloned().collect();
        let chains = ChainPartition::new(universe, chains);
        chains
            .validate(|a, b| a.end() == b.end())
            .map_err(|e| contract!("invalid chains: {e}"))?;
        let mut next = HashMap::new();
        for c in chains.chains() {
            for (i, a) in c.iter().enumerate() {
                next.insert(a.clone(), c[(i + 1) % c.len()].clone());
            }
        }
        Ok(SegmentShift {
            base,
            horizon,
            chains,
            next,
        })
    }

    pub fn base(&self) -> &PathPrefix {
        &self.base
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn chains(&self) -> &[Vec<PathPrefix>] {
        self.chains.chains()
    }
}

impl PathMap for SegmentShift {
    fn depth(&self) -> usize {
        self.horizon
    }

    fn map_head(&self, head: &PathPrefix) -> Option<PathPrefix> {
        let n = self.base.len();
        if head.truncate(n) != self.base {
            return None;
        }
        let seg = self.next.get(&head.suffix_from(n))?;
        Some(self.base.concat(seg).expect("segments start at the base endpoint"))
    }
}

impl Serialize for SegmentShift {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let chains: Vec<Vec<String>> = self
            .chains()
            .iter()
            .map(|c| c.iter().map(ToString::to_string).collect())
            .collect();
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("kind", "segment_shift")?;
        m.serialize_entry("base", &self.base)?;
        m.serialize_entry("horizon", &self.horizon)?;
        m.serialize_entry("chains", &chains)?;
        m.end()
    }
}

/// `outer ∘ inner`.
pub struct Composed<'a> {
    pub outer: &'a dyn PathMap,
    pub inner: &'a dyn PathMap,
}

impl PathMap for Composed<'_> {
    fn depth(&self) -> usize {
        self.outer.depth().max(self.inner.depth())
    }

    fn map_head(&self, head: &PathPrefix) -> Option<PathPrefix> {
        let mid = self.inner.apply(head).expect("head covers the inner depth");
        let out = self.outer.apply(&mid).expect("head covers the outer depth");
        (out != *head).then_some(out)
    }
}

pub fn apply(gamma: &dyn PathMap, omega: &PathPrefix) -> Result<PathPrefix> {
    gamma.apply(omega)
}

/// The `k` with `w(γ(α)) / w(α) = q^k`, both truncated to the acting depth.
pub fn rn_exponent(gamma: &dyn PathMap, alpha: &PathPrefix) -> Result<i64> {
    check_long_enough(gamma.depth(), alpha)?;
    let head = alpha.truncate(gamma.depth());
    Ok(match gamma.map_head(&head) {
        Some(img) => path_exponent(&img) - path_exponent(&head),
        None => 0,
    })
}

/// Value of `dP∘γ/dP` on the cylinder `C_α`.
pub fn rn_on_cylinder(ctx: &QContext, gamma: &dyn PathMap, alpha: &PathPrefix) -> Result<QValue> {
    Ok(QValue::q_power(ctx, rn_exponent(gamma, alpha)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct PushforwardReport {
    pub alpha: PathPrefix,
    pub image: PathPrefix,
    pub rn: QValue,
    /// `P(γ(C_α))`.
    pub lhs: MeasureApprox,
    /// `rn · P(C_α)`.
    #[serde(serialize_with = "ser_rational")]
    pub rhs: RBig,
    #[serde(serialize_with = "ser_rational")]
    pub relative_error: RBig,
    /// Both sides evaluated at one common depth, where they must agree exactly.
    pub common_depth: usize,
    pub exact_at_common_depth: bool,
    pub pass: bool,
}

/// Checks `P(γ(C_α)) = (dP∘γ/dP on C_α) · P(C_α)`.
pub fn pushforward_mass_check(
    measure: &ThetaMeasure,
    gamma: &dyn PathMap,
    alpha: &PathPrefix,
    eps: &RBig,
    depth_cap: usize,
) -> Result<PushforwardReport> {
    let image = gamma.apply(alpha)?;
    let rn = rn_on_cylinder(measure.ctx(), gamma, alpha)?;
    let lhs = measure.cylinder_mass(&image, eps, depth_cap)?;
    let base = measure.cylinder_mass(alpha, eps, depth_cap)?;
    let rhs = rn.value() * &base.value;
    let relative_error = relative_gap(&lhs.value, &rhs);

    let common_depth = lhs.depth.max(base.depth);
    let at_lhs = measure.cylinder_mass_at(&image, common_depth)?;
    let at_rhs = rn.value() * measure.cylinder_mass_at(alpha, common_depth)?;

    Ok(PushforwardReport {
        pass: relative_error <= *eps,
        alpha: alpha.clone(),
        image,
        rn,
        lhs,
        rhs,
        relative_error,
        common_depth,
        exact_at_common_depth: at_lhs == at_rhs,
    })
}

/// `|a - b| / max(|a|, |b|)`, and 0 when both vanish.
fn relative_gap(a: &RBig, b: &RBig) -> RBig {
    let scale = std::cmp::max(abs(a), abs(b));
    if scale == RBig::ZERO {
        RBig::ZERO
    } else {
        abs(&(a - b)) / scale
    }
}

pub fn pushforward_mass_check_for(
    theta: &ThetaSpec,
    ctx: &QContext,
    gamma: &dyn PathMap,
    alpha: &PathPrefix,
    eps: &RBig,
    depth_cap: usize,
) -> Result<PushforwardReport> {
    let m = ThetaMeasure::new(theta.clone(), ctx.clone());
    pushforward_mass_check(&m, gamma, alpha, eps, depth_cap)
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeEntry {
    pub gamma: usize,
    pub alpha: PathPrefix,
    pub exponent: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeReport {
    pub entries: Vec<LatticeEntry>,
    /// Pairs where the path was shorter than the acting depth.
    pub skipped: usize,
    pub histogram: BTreeMap<i64, usize>,
    pub pass: bool,
}

/// Evaluates `dP∘γ/dP` over a grid of transformations and cylinders and
/// checks each value is an integer power of `q^2`.
pub fn rn_value_lattice_check(
    ctx: &QContext,
    gammas: &[&dyn PathMap],
    alphas: &[PathPrefix],
) -> Result<LatticeReport> {
    let mut entries = Vec::new();
    let mut skipped = 0;
    let mut histogram = BTreeMap::new();
    let mut pass = true;
    for (g, gamma) in gammas.iter().enumerate() {
        for alpha in alphas {
            if !alpha.starts_at_root() || alpha.len() < gamma.depth() {
                skipped += 1;
                continue;
            }
            let exponent = rn_exponent(*gamma, alpha)?;
            let head = alpha.truncate(gamma.depth());
            let image = gamma.apply(&head)?;
            let ratio = path_weight(ctx, &image).into_value() / path_weight(ctx, &head).into_value();
            pass &= exponent % 2 == 0 && ratio == ctx.pow(exponent);
            *histogram.entry(exponent).or_insert(0) += 1;
            entries.push(LatticeEntry {
                gamma: g,
                alpha: alpha.clone(),
                exponent,
            });
        }
    }
    Ok(LatticeReport {
        entries,
        skipped,
        histogram,
        pass,
    })
}
