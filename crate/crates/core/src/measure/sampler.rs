use std::collections::HashMap;

use dashu_int::IBig;
use dashu_ratio::RBig;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ThetaMeasure;
use crate::error::{contract, Result};
use crate::graph::{PathPrefix, Signature};
use crate::qweights::QContext;
use crate::theta::ThetaSpec;

/// Draws paths from `P^θ` by iterating the one-step laws.
///
/// Each law is turned into 64-bit thresholds `floor(2^64 · cumulative)` once,
/// so a draw is a single `u64` from the generator and an exact integer
/// comparison.
pub struct PathSampler<'a> {
    measure: &'a ThetaMeasure,
    eps: RBig,
    depth_cap: usize,
    tables: HashMap<Signature, (Vec<Signature>, Vec<u128>)>,
}

impl<'a> PathSampler<'a> {
    pub fn new(measure: &'a ThetaMeasure, eps: RBig, depth_cap: usize) -> Self {
        PathSampler {
            measure,
            eps,
            depth_cap,
            tables: HashMap::new(),
        }
    }

    fn table(&mut self, lam: &Signature) -> Result<&(Vec<Signature>, Vec<u128>)> {
        if !self.tables.contains_key(lam) {
            let t = self.measure.transition_from(lam, &self.eps, self.depth_cap)?;
            let scale = RBig::from(IBig::from(1u128 << 64));
            let mut cum = RBig::ZERO;
            let mut next = Vec::with_capacity(t.law.len());
            let mut thresholds = Vec::with_capacity(t.law.len());
            for (s, p) in t.law {
                cum += p;
                next.push(s);
                thresholds.push(u128::try_from((&cum * &scale).floor()).unwrap_or(u128::MAX));
            }
            // the law sums to 1 exactly, but guard the last bucket anyway
            if let Some(last) = thresholds.last_mut() {
                *last = 1u128 << 64;
            }
            self.tables.insert(lam.clone(), (next, thresholds));
        }
        Ok(&self.tables[lam])
    }

    /// One path of `depth` edges from the root.
    pub fn sample<R: RngCore>(&mut self, rng: &mut R, depth: usize) -> Result<PathPrefix> {
        if depth == 0 {
            return Err(contract!("sample depth must be at least 1"));
        }
        let mut cur = Signature::root();
        let mut steps = Vec::with_capacity(depth);
        for _ in 0..depth {
            let u = rng.next_u64() as u128;
            let (next, thresholds) = self.table(&cur)?;
            let i = thresholds.partition_point(|&t| t <= u);
            cur = next[i].clone();
            steps.push(cur.clone());
        }
        Ok(PathPrefix::from_parts(Signature::root(), steps))
    }

    /// `count` paths from one generator seeded with `seed`.
    pub fn sample_many(&mut self, seed: u64, depth: usize, count: usize) -> Result<Vec<PathPrefix>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample(&mut rng, depth)).collect()
    }
}

pub fn sample_path(
    theta: &ThetaSpec,
    ctx: &QContext,
    depth: usize,
    seed: u64,
    eps: &RBig,
    depth_cap: usize,
) -> Result<PathPrefix> {
    let measure = ThetaMeasure::new(theta.clone(), ctx.clone());
    let mut sampler = PathSampler::new(&measure, eps.clone(), depth_cap);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sampler.sample(&mut rng, depth)
}
