use dashu_ratio::RBig;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gt_ergodica::dynamics::{rn_exponent, Composed, LevelPermutation, PathMap};
use gt_ergodica::exact::rat;
use gt_ergodica::graph::{enumerate_paths, has_path, interlaces, predecessors, weyl_dim};
use gt_ergodica::measure::ThetaMeasure;
use gt_ergodica::qweights::{path_exponent, path_weight, qdim, qdim_between, qdim_product, weight_ratio_exponent, QContext};
use gt_ergodica::ratio::{chain_partition_young, validate_young_chains, young_interval, RectYoungDiagram};
use gt_ergodica::{PathPrefix, Signature, ThetaSpec};

fn signature(max_level: usize, lo: i64, hi: i64) -> impl Strategy<Value = Signature> {
    (1..=max_level)
        .prop_flat_map(move |n| proptest::collection::vec(lo..=hi, n))
        .prop_map(|mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            Signature::new(v).unwrap()
        })
}

fn q_value() -> impl Strategy<Value = QContext> {
    (1i64..20, 2i64..21)
        .prop_filter("q < 1", |(n, d)| n < d)
        .prop_map(|(n, d)| QContext::from_ratio(n, d).unwrap())
}

/// A uniformly random root path to `lam`, chosen by index.
fn some_path(lam: &Signature, pick: usize) -> PathPrefix {
    let paths = enumerate_paths(&Signature::root(), lam).unwrap();
    paths[pick % paths.len()].clone()
}

fn theta_spec() -> impl Strategy<Value = ThetaSpec> {
    let prefix = proptest::collection::vec(-3i64..3, 0..4).prop_map(|mut v| {
        v.sort_unstable();
        v
    });
    prop_oneof![
        (prefix.clone(), 3i64..6).prop_map(|(p, a)| format!("prefix={};tail=const:{a}", join(&p))),
        (prefix, 3i64..6, 1i64..3).prop_map(|(p, s, d)| {
            format!("prefix={};tail=affine:start={s},step={d}", join(&p))
        }),
    ]
    .prop_map(|s| s.parse().unwrap())
}

fn join(v: &[i64]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn predecessors_are_exactly_the_interlacing_signatures(lam in signature(4, -3, 3)) {
        let preds = predecessors(&lam);
        for mu in &preds {
            prop_assert!(interlaces(mu, &lam).unwrap());
        }
        if lam.level() > 1 {
            let n = lam.level() - 1;
            let lo = lam.min_entry().unwrap();
            let hi = lam.max_entry().unwrap();
            let all = gt_ergodica::graph::nonincreasing_in_boxes(&vec![(lo, hi); n]);
            let count = all
                .into_iter()
                .filter(|v| interlaces(&Signature::new(v.clone()).unwrap(), &lam).unwrap())
                .count();
            prop_assert_eq!(count, preds.len());
        }
    }

    #[test]
    fn weyl_dimension_counts_paths(lam in signature(4, -3, 3)) {
        let n = enumerate_paths(&Signature::root(), &lam).unwrap().len();
        prop_assert_eq!(weyl_dim(&lam), n.into());
    }

    #[test]
    fn has_path_matches_enumeration(mu in signature(2, -2, 2), lam in signature(4, -2, 2)) {
        prop_assume!(mu.level() < lam.level());
        let exists = !enumerate_paths(&mu, &lam).unwrap().is_empty();
        prop_assert_eq!(has_path(&mu, &lam).unwrap(), exists);
    }

    #[test]
    fn qdim_dp_matches_product(lam in signature(5, -3, 4), ctx in q_value()) {
        prop_assert_eq!(qdim(&ctx, &lam).into_value(), qdim_product(&ctx, &lam).into_value());
    }

    #[test]
    fn path_weights_multiply_and_sum_to_qdim(lam in signature(4, -2, 3), ctx in q_value(), pick in 0usize..1000) {
        let alpha = some_path(&lam, pick);
        let k = alpha.len() / 2;
        if k >= 1 {
            let head = alpha.truncate(k);
            let tail = alpha.suffix_from(k);
            let product = path_weight(&ctx, &head).into_value() * path_weight(&ctx, &tail).into_value();
            prop_assert_eq!(path_weight(&ctx, &alpha).into_value(), product);
            let mid = head.end().clone();
            let between = qdim_between(&ctx, &mid, &lam).unwrap().into_value();
            let summed = enumerate_paths(&mid, &lam)
                .unwrap()
                .iter()
                .fold(RBig::ZERO, |acc, p| acc + path_weight(&ctx, p).into_value());
            prop_assert_eq!(between, summed);
        }
    }

    #[test]
    fn weight_ratio_is_even_and_antisymmetric(lam in signature(4, -2, 3), i in 0usize..1000, j in 0usize..1000) {
        let a = some_path(&lam, i);
        let b = some_path(&lam, j);
        let k = weight_ratio_exponent(&a, &b).unwrap();
        prop_assert_eq!(k % 2, 0);
        prop_assert_eq!(k, -weight_ratio_exponent(&b, &a).unwrap());
        prop_assert_eq!(k, path_exponent(&b) - path_exponent(&a));
    }

    #[test]
    fn permutations_fix_endpoints_and_invert(lam in signature(3, 0, 3), seed in any::<u64>(), pick in 0usize..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let level = lam.level();
        let g = LevelPermutation::random(level, std::slice::from_ref(&lam), &mut rng).unwrap();
        let alpha = some_path(&lam, pick);
        let img = g.apply(&alpha).unwrap();
        prop_assert_eq!(img.end(), alpha.end());
        let inv = g.inverse();
        prop_assert_eq!(inv.apply(&img).unwrap(), alpha.clone());
        // cocycle identity for g then its inverse: the exponents cancel
        let id = Composed { outer: &inv, inner: &g };
        prop_assert_eq!(rn_exponent(&id, &alpha).unwrap(), 0);
        prop_assert_eq!(rn_exponent(&g, &alpha).unwrap(), -rn_exponent(&inv, &img).unwrap());
    }

    #[test]
    fn cocycle_identity(lam in signature(3, 0, 3), s1 in any::<u64>(), s2 in any::<u64>(), pick in 0usize..1000) {
        let level = lam.level();
        let a = LevelPermutation::random(level, std::slice::from_ref(&lam), &mut ChaCha8Rng::seed_from_u64(s1)).unwrap();
        let b = LevelPermutation::random(level, std::slice::from_ref(&lam), &mut ChaCha8Rng::seed_from_u64(s2)).unwrap();
        let alpha = some_path(&lam, pick);
        let ab = Composed { outer: &a, inner: &b };
        let lhs = rn_exponent(&ab, &alpha).unwrap();
        let rhs = rn_exponent(&b, &alpha).unwrap() + rn_exponent(&a, &b.apply(&alpha).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.compose(&b).unwrap().apply(&alpha).unwrap(), ab.apply(&alpha).unwrap());
    }

    #[test]
    fn young_chain_partitions_validate(k in 1i64..6, l in 1usize..5, raw in proptest::collection::vec(0i64..6, 4)) {
        let mut entries: Vec<i64> = raw.into_iter().take(l).map(|x| x.min(k)).collect();
        entries.sort_unstable_by(|a, b| b.cmp(a));
        *entries.last_mut().unwrap() = 0;
        let lam = RectYoungDiagram::new(k, entries).unwrap();
        let size = young_interval(k, l, &lam).unwrap().len();
        prop_assume!(size >= 2);
        let p = chain_partition_young(k, l, &lam).unwrap();
        prop_assert!(validate_young_chains(&p).is_ok());
        prop_assert_eq!(p.universe().len(), size);
    }

    #[test]
    fn theta_text_round_trips(t in theta_spec()) {
        let again: ThetaSpec = t.to_string().parse().unwrap();
        prop_assert_eq!(again.to_string(), t.to_string());
        prop_assert_eq!(again.classify(), t.classify());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn transition_laws_sum_to_one(t in theta_spec(), lam_pick in 0usize..100) {
        let m = ThetaMeasure::new(t, QContext::from_ratio(1, 2).unwrap());
        let support = m.support_at_level(2, 6).unwrap();
        let lam = &support[lam_pick % support.len()];
        let law = m.transition_from(lam, &rat(1, 1_000_000_000), 24).unwrap();
        let total = law.law.iter().fold(RBig::ZERO, |acc, (_, p)| acc + p);
        prop_assert_eq!(total, RBig::ONE);
    }

    #[test]
    fn cylinder_masses_are_central(t in theta_spec(), m_depth in 4usize..12) {
        let m = ThetaMeasure::new(t, QContext::from_ratio(1, 2).unwrap());
        let ctx = m.ctx().clone();
        for lam in m.support_at_level(2, m_depth).unwrap() {
            let paths = enumerate_paths(&Signature::root(), &lam).unwrap();
            let ratios: Vec<RBig> = paths
                .iter()
                .map(|p| m.cylinder_mass_at(p, m_depth).unwrap() / path_weight(&ctx, p).into_value())
                .collect();
            prop_assert!(ratios.windows(2).all(|w| w[0] == w[1]));
        }
    }
}
