use std::collections::BTreeSet;

use lu_orbit::lie_action::{apply, real_view, side_matrix, Generator};
use lu_orbit::lu_group::{apply_local, LocalUnitary};
use lu_orbit::orbit_analysis::{analyze, min_orbit_dimension, orbit_dimension, subset_span_lower_bound};
use lu_orbit::rank_engine::{real_rank, span_dim, ColumnSelector, RankOptions};
use lu_orbit::rng;
use lu_orbit::state_core::{
    random_gaussian_integer_state, random_state, tensor, Amplitudes, GaussianRational, Mode, MultiIndex, StateVector,
};
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use proptest::prelude::*;

fn float_state(n: usize, seed: u64) -> StateVector {
    random_state(n, seed).unwrap()
}

fn exact_state(n: usize, seed: u64) -> StateVector {
    random_gaussian_integer_state(n, 3, &mut rng::seeded(seed, 0)).unwrap()
}

fn wrap(a: Amplitudes) -> StateVector {
    match a {
        Amplitudes::Float(v) => StateVector::from_float(v).unwrap(),
        Amplitudes::Exact(v) => StateVector::from_exact(v).unwrap(),
    }
}

fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
}

fn subset_of(n: usize, bits: u32) -> BTreeSet<usize> {
    (1..=n).filter(|k| bits & (1 << (k - 1)) != 0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flip_is_xor_and_involution(n in 1usize..12, raw in any::<usize>(), k in 1usize..12) {
        prop_assume!(k <= n);
        let code = raw % (1 << n);
        let idx = MultiIndex::new(n, code).unwrap();
        let flipped = idx.flip(k).unwrap();
        prop_assert_eq!(flipped.code(), code ^ (1 << (n - k)));
        prop_assert_eq!(flipped.flip(k).unwrap(), idx);
        prop_assert_eq!(flipped.bit(k).unwrap(), 1 - idx.bit(k).unwrap());
    }

    #[test]
    fn tensor_is_associative_and_normalized(a in 1usize..3, b in 1usize..3, c in 1usize..3, seed in any::<u64>()) {
        let (x, y, z) = (float_state(a, seed), float_state(b, seed ^ 1), float_state(c, seed ^ 2));
        let left = tensor(&tensor(&x, &y).unwrap(), &z).unwrap();
        let right = tensor(&x, &tensor(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left.n(), a + b + c);
        prop_assert!((left.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!(close(&left.float_amplitudes(), &right.float_amplitudes(), 1e-14));
    }

    #[test]
    fn generators_square_to_minus_one(n in 1usize..6, k in 1usize..6, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let psi = float_state(n, seed);
        let minus: Vec<Complex64> = psi.float_amplitudes().iter().map(|z| -z).collect();
        for g in Generator::ALL {
            let once = wrap(apply(&psi, k, g).unwrap());
            let twice = apply(&once, k, g).unwrap().to_f64();
            prop_assert!(close(&twice, &minus, 1e-14));
        }
    }

    #[test]
    fn generators_on_distinct_qubits_commute(n in 2usize..6, k in 1usize..6, l in 1usize..6, seed in any::<u64>()) {
        prop_assume!(k <= n && l <= n && k != l);
        let psi = exact_state(n, seed);
        for g in Generator::ALL {
            for h in Generator::ALL {
                let gh = apply(&wrap(apply(&psi, l, h).unwrap()), k, g).unwrap();
                let hg = apply(&wrap(apply(&psi, k, g).unwrap()), l, h).unwrap();
                prop_assert_eq!(gh, hg);
            }
        }
    }

    #[test]
    fn exact_generators_stay_exact(n in 1usize..5, k in 1usize..5, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let psi = exact_state(n, seed);
        for g in Generator::ALL {
            let out = apply(&psi, k, g).unwrap();
            prop_assert_eq!(out.mode(), Mode::Exact);
            let back = wrap(out);
            prop_assert_eq!(back.exact_norm_sqr(), psi.exact_norm_sqr());
        }
    }

    #[test]
    fn triples_are_orthogonal_in_float(n in 1usize..7, seed in any::<u64>()) {
        let m = side_matrix(&float_state(n, seed)).unwrap();
        for k in 1..=n {
            let view = real_view(&m.triple(k).unwrap()).unwrap();
            for i in 0..3 {
                prop_assert!((view.dot(i, i) - 1.0).abs() < 1e-12);
                for j in i + 1..3 {
                    prop_assert!(view.dot(i, j).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn triples_are_orthogonal_exactly(n in 1usize..5, seed in any::<u64>()) {
        let psi = exact_state(n, seed);
        let m = side_matrix(&psi).unwrap();
        for k in 1..=n {
            let view = real_view(&m.triple(k).unwrap()).unwrap();
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                prop_assert_eq!(view.dot(i, j), 0.0);
            }
        }
    }

    #[test]
    fn span_dim_is_monotone_and_subadditive(n in 2usize..6, s in any::<u32>(), t in any::<u32>(), seed in any::<u64>()) {
        let m = side_matrix(&float_state(n, seed)).unwrap();
        let opts = RankOptions::default();
        let (s, t) = (subset_of(n, s), subset_of(n, t));
        prop_assume!(!s.is_empty() && !t.is_empty());
        let union: BTreeSet<usize> = s.union(&t).copied().collect();
        let ds = span_dim(&m, s.iter().copied(), false, &opts).unwrap();
        let dt = span_dim(&m, t.iter().copied(), false, &opts).unwrap();
        let du = span_dim(&m, union.iter().copied(), false, &opts).unwrap();
        prop_assert!(du >= ds.max(dt));
        prop_assert!(du <= ds + dt);
        let with_last = span_dim(&m, s.iter().copied(), true, &opts).unwrap();
        prop_assert!(with_last == ds || with_last == ds + 1);
    }

    #[test]
    fn subset_bound_holds(n in 1usize..6, s in any::<u32>(), seed in any::<u64>()) {
        let m = side_matrix(&float_state(n, seed)).unwrap();
        let s = subset_of(n, s);
        prop_assume!(!s.is_empty());
        let d = span_dim(&m, s.iter().copied(), true, &RankOptions::default()).unwrap();
        prop_assert!(d >= subset_span_lower_bound(s.len()));
    }

    #[test]
    fn rank_ignores_global_phase(n in 1usize..6, theta in 0.0f64..std::f64::consts::TAU, seed in any::<u64>()) {
        let psi = float_state(n, seed);
        let phase = Complex64::from_polar(1.0, theta);
        let turned = StateVector::from_float(psi.float_amplitudes().iter().map(|z| z * phase).collect()).unwrap();
        let opts = RankOptions::default();
        prop_assert_eq!(orbit_dimension(&psi, &opts).unwrap(), orbit_dimension(&turned, &opts).unwrap());
    }

    #[test]
    fn exact_rank_ignores_scale_and_phase(n in 1usize..4, scale in 1i64..20, seed in any::<u64>()) {
        let psi = exact_state(n, seed);
        let Amplitudes::Exact(v) = psi.amplitudes() else { unreachable!() };
        let factor: GaussianRational = Complex::new(BigRational::from_integer(0.into()), BigRational::from_integer(scale.into()));
        let scaled = StateVector::from_exact(v.iter().map(|z| z * &factor).collect()).unwrap();
        let opts = RankOptions::exact();
        prop_assert_eq!(orbit_dimension(&psi, &opts).unwrap(), orbit_dimension(&scaled, &opts).unwrap());
    }

    #[test]
    fn orbit_dimension_lies_between_bounds(n in 1usize..7, seed in any::<u64>()) {
        let d = orbit_dimension(&float_state(n, seed), &RankOptions::default()).unwrap();
        prop_assert!(d >= min_orbit_dimension(n).unwrap());
        prop_assert!(d <= 3 * n);
    }

    #[test]
    fn span_tables_are_lu_invariant(n in 2usize..6, seed in any::<u64>()) {
        let psi = float_state(n, seed);
        let moved = apply_local(&psi, &LocalUnitary::random(n, seed ^ 0x55)).unwrap();
        let opts = RankOptions::default();
        let (a, b) = (analyze(&psi, &opts).unwrap(), analyze(&moved, &opts).unwrap());
        prop_assert_eq!(a.rank, b.rank);
        prop_assert_eq!(a.pair_span, b.pair_span);
        prop_assert_eq!(a.lone_span, b.lone_span);
    }

    #[test]
    fn orbit_dimensions_add_under_tensor(a in 1usize..4, b in 1usize..4, seed in any::<u64>()) {
        let opts = RankOptions::default();
        for (x, y) in [
            (float_state(a, seed), float_state(b, seed ^ 7)),
            (exact_state(a, seed), exact_state(b, seed ^ 7)),
        ] {
            let joint = tensor(&x, &y).unwrap();
            let o = if x.mode() == Mode::Exact { RankOptions::exact() } else { opts };
            prop_assert_eq!(
                orbit_dimension(&joint, &o).unwrap(),
                orbit_dimension(&x, &o).unwrap() + orbit_dimension(&y, &o).unwrap()
            );
        }
    }

    #[test]
    fn float_and_exact_backends_agree(n in 1usize..5, seed in any::<u64>()) {
        let psi = exact_state(n, seed);
        let m = side_matrix(&psi).unwrap();
        let fm = side_matrix(&psi.to_float()).unwrap();
        let all = ColumnSelector::all(n);
        let exact = real_rank(&m, &all, &RankOptions::exact()).unwrap();
        let float = real_rank(&fm, &all, &RankOptions::default()).unwrap();
        prop_assert_eq!(exact.rank, float.rank);
        for l in 1..=n {
            for k in l + 1..=n {
                let sel = ColumnSelector::new([l, k], false);
                prop_assert_eq!(
                    real_rank(&m, &sel, &RankOptions::exact()).unwrap().rank,
                    real_rank(&fm, &sel, &RankOptions::default()).unwrap().rank
                );
            }
        }
    }
}
