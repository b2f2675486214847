use proptest::prelude::*;
use stvqm::distortion::{inject_distortion, DistortionKind, DistortionSpec};
use stvqm::divergence::jsd;
use stvqm::eval::{average_ranks, roc_auc, spearman};
use stvqm::fusion::st_vqm;
use stvqm::keypoints::{filter_with, FilterConfig, MatchPair};
use stvqm::sketch::{StVector, N_CLASSES};
use stvqm::spatial::minkowski_pool;
use stvqm::temporal::{st_t, TemporalVector};
use stvqm::video::{Frame, Sequence};
use stvqm::Fusion;

fn simplex() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], N_CLASSES).prop_map(|mut v| {
        if v.iter().all(|&x| x == 0.0) {
            v[0] = 1.0;
        }
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    })
}

fn distances() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..std::f64::consts::LN_2, 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn jsd_symmetric_and_bounded(p in simplex(), q in simplex()) {
        let a = jsd(&p, &q).unwrap();
        let b = jsd(&q, &p).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
        prop_assert!((0.0..=std::f64::consts::LN_2).contains(&a));
        prop_assert_eq!(jsd(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn st_vector_normalizes_onto_simplex(contour in prop::collection::vec(-0.01f64..0.05, N_CLASSES - 1)) {
        let v = StVector::from_contour_probabilities(&contour);
        let checked = StVector::new(v.as_slice().to_vec()).unwrap();
        prop_assert_eq!(checked.len(), N_CLASSES);
        prop_assert!(checked.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn pooling_permutation_invariant(d in distances(), rot in 0usize..40) {
        let mut e = d.clone();
        e.rotate_left(rot % d.len());
        e.reverse();
        let a = minkowski_pool(&d, 4.0);
        let b = minkowski_pool(&e, 4.0);
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn pooling_homogeneous(d in distances(), c in 0.01f64..10.0) {
        let scaled: Vec<f64> = d.iter().map(|x| x * c).collect();
        let a = minkowski_pool(&scaled, 4.0);
        let b = c * minkowski_pool(&d, 4.0);
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
    }

    #[test]
    fn fusion_is_affine(s1 in 0.0f64..1e-9, s2 in 0.0f64..1e-9, t1 in 0.0f64..1e-4, t2 in 0.0f64..1e-4) {
        let p = Fusion::default();
        let lhs = st_vqm(s1 + s2, t1 + t2, &p) - p.gamma;
        let rhs = (st_vqm(s1, t1, &p) - p.gamma) + (st_vqm(s2, t2, &p) - p.gamma);
        prop_assert!((lhs - rhs).abs() <= 1e-9);
        prop_assert_eq!(st_vqm(0.0, 0.0, &p), p.gamma);
    }

    #[test]
    fn temporal_distance_is_a_metric(
        a in prop::collection::vec(0.0f64..1e-3, 2..30),
        seed in any::<u64>(),
    ) {
        let b: Vec<f64> = a.iter().enumerate().map(|(i, x)| x + ((seed >> (i % 64)) & 1) as f64 * 1e-4).collect();
        let va = TemporalVector::from_values(a.clone());
        let vb = TemporalVector::from_values(b.clone());
        let ab = st_t(&va, &vb).unwrap();
        let ba = st_t(&vb, &va).unwrap();
        prop_assert_eq!(ab.value, ba.value);
        prop_assert_eq!(st_t(&va, &va).unwrap().value, 0.0);
        prop_assert!(ab.value >= 0.0);
        prop_assert_eq!(ab.retained, a.len());
    }

    #[test]
    fn temporal_distance_skips_gaps(a in prop::collection::vec(0.0f64..1.0, 3..30), gap in 0usize..30) {
        let gap = gap % a.len();
        let mut with_gap = TemporalVector::from_values(a.clone());
        with_gap.values[gap] = None;
        let other = TemporalVector::from_values(a.iter().map(|x| x + 1.0));
        let d = st_t(&with_gap, &other).unwrap();
        prop_assert_eq!(d.retained, a.len() - 1);
        prop_assert_eq!(d.excluded, vec![gap]);
        prop_assert!((d.value - ((a.len() - 1) as f64).sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn ranks_sum_to_triangular_number(x in prop::collection::vec(prop_oneof![0.0f64..10.0, Just(1.0)], 1..50)) {
        let r = average_ranks(&x);
        let n = x.len() as f64;
        prop_assert!((r.iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() <= 1e-9);
    }

    #[test]
    fn spearman_invariant_under_monotone_maps(
        pairs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..40),
    ) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let fa: Vec<f64> = a.iter().map(|x| x.exp() + x.powi(3)).collect();
        match (spearman(&a, &b), spearman(&fa, &b)) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-12),
            (x, y) => prop_assert_eq!(x.is_none(), y.is_none()),
        }
    }

    #[test]
    fn auc_complements(
        p in prop::collection::vec(prop_oneof![0.0f64..1.0, Just(0.5)], 1..30),
        n in prop::collection::vec(prop_oneof![0.0f64..1.0, Just(0.5)], 1..30),
    ) {
        let a = roc_auc(&p, &n).unwrap();
        let b = roc_auc(&n, &p).unwrap();
        prop_assert!((a + b - 1.0).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn filtered_matches_respect_limits(
        raw in prop::collection::vec(((0.0f64..320.0, 0.0f64..240.0), (-80.0f64..80.0, -20.0f64..20.0), 0.0f64..1.0), 0..60),
    ) {
        let matches: Vec<MatchPair> = raw
            .iter()
            .map(|&((x, y), (dx, dy), d)| MatchPair { ref_point: (x, y), test_point: (x + dx, y + dy), descriptor_distance: d })
            .collect();
        let cfg = FilterConfig::default();
        let kept = filter_with(&matches, (320, 240), &cfg);
        for m in &kept.pairs {
            prop_assert!((m.ref_point.0 - m.test_point.0).abs() <= cfg.dx_max);
            prop_assert!((m.ref_point.1 - m.test_point.1).abs() <= cfg.dy_max);
            for (x, y) in [m.ref_point, m.test_point] {
                prop_assert!(x >= cfg.margin && x <= 320.0 - 1.0 - cfg.margin);
                prop_assert!(y >= cfg.margin && y <= 240.0 - 1.0 - cfg.margin);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn zero_magnitude_is_identity(
        seed in any::<u64>(),
        kind in prop_oneof![
            Just(DistortionKind::GlobalShift),
            Just(DistortionKind::LocalWarp),
            Just(DistortionKind::Flicker),
            Just(DistortionKind::Blur),
            Just(DistortionKind::Noise),
        ],
    ) {
        let frames: Vec<Frame> = (0..3)
            .map(|i| Frame::from_fn(64, 64, i, |x, y| ((x * 7 + y * 13 + i) as u64 ^ seed) as u8).unwrap())
            .collect();
        let seq = Sequence::new(frames, 25.0, "p").unwrap();
        let out = inject_distortion(&seq, &DistortionSpec::new(kind, 0.0).with_seed(seed)).unwrap();
        for (a, b) in seq.frames().iter().zip(out.frames()) {
            prop_assert_eq!(a.luma(), b.luma());
        }
    }
}
