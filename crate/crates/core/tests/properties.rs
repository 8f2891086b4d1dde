mod common;

use proptest::prelude::*;

use common::sylvester_member;
use spectra_core::estimators::{derive_seed, signs_from_index};
use spectra_core::instance::{from_json, random_regular_instance, to_json};
use spectra_core::mollifier::{big_g, log_big_g};
use spectra_core::prg::{Gf2a, MzGenerator, SeedTuple};
use spectra_core::spectral::{divided_diff, frechet_d1, ScalarFunction};
use spectra_core::{eig_sym, lambda_max, SymMatrix};

fn sym_from(k: usize, upper: &[f64]) -> SymMatrix<f64> {
    let mut m = SymMatrix::zeros(k);
    let mut it = upper.iter();
    for i in 0..k {
        for j in i..k {
            m.set_sym(i, j, *it.next().unwrap());
        }
    }
    m
}

fn sym_strategy(k: usize) -> impl Strategy<Value = SymMatrix<f64>> {
    prop::collection::vec(-10.0f64..10.0, k * (k + 1) / 2).prop_map(move |v| sym_from(k, &v))
}

/// Rayleigh quotient after `iters` steps of power iteration on `M + cI`.
fn power_iteration(m: &SymMatrix<f64>, iters: usize) -> f64 {
    let k = m.dim();
    let c = m.frobenius();
    let mut v: Vec<f64> = (0..k).map(|i| 1.0 + 0.1 * i as f64).collect();
    for _ in 0..iters {
        let mut w: Vec<f64> = (0..k).map(|i| (0..k).map(|j| m.get(i, j) * v[j]).sum::<f64>() + c * v[i]).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= norm);
        v = w;
    }
    (0..k).map(|i| v[i] * (0..k).map(|j| m.get(i, j) * v[j]).sum::<f64>()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs(m in sym_strategy(5)) {
        let e = eig_sym(&m).unwrap();
        let r = e.reconstruct();
        let scale = 1.0 + m.max_abs();
        for (a, b) in r.as_slice().iter().zip(m.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-11 * scale);
        }
    }

    #[test]
    fn lambda_max_dominates_rayleigh(m in sym_strategy(4)) {
        let lm = lambda_max(&m).unwrap();
        let rq = power_iteration(&m, 3000);
        let scale = 1.0 + m.frobenius();
        prop_assert!(rq <= lm + 1e-10 * scale);
        prop_assert!(lm - rq <= 1e-3 * scale);
    }

    #[test]
    fn membership_matches_sylvester(seed in 0u64..10_000, n in 2usize..7, k in 1usize..4, idx in 0u64..64) {
        let s = random_regular_instance(n, k, 1.0, 4.0, 1.0, seed).unwrap();
        let mut x = vec![1i8; n];
        signs_from_index(idx % (1 << n), &mut x);
        let lm = s.lambda_max_at_signs(&x).unwrap();
        prop_assume!(lm.abs() > 1e-6);
        prop_assert_eq!(s.membership_signs(&x).unwrap(), sylvester_member(&s, &x));
    }

    #[test]
    fn json_round_trip_is_exact(seed in 0u64..10_000, n in 1usize..12, k in 1usize..5) {
        let s = random_regular_instance(n, k, 1.0, 8.0, 2.0, seed).unwrap();
        let back = from_json(&to_json(&s).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn gf2_is_a_field(a in 1u32..=16, x in any::<u32>(), y in any::<u32>(), z in any::<u32>()) {
        let f = Gf2a::new(a).unwrap();
        let mask = (f.order() - 1) as u32;
        let (x, y, z) = (x & mask, y & mask, z & mask);
        prop_assert_eq!(f.mul(x, y), f.mul(y, x));
        prop_assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
        prop_assert_eq!(f.mul(x, y ^ z), f.mul(x, y) ^ f.mul(x, z));
        prop_assert_eq!(f.mul(x, 1), x);
    }

    #[test]
    fn seed_hex_round_trip(index in any::<u64>()) {
        let gen = MzGenerator::new(10, 2, 3).unwrap();
        let mut seed = SeedTuple(Vec::new());
        gen.seed_from_index(index, &mut seed);
        let hex = gen.seed_to_hex(&seed).unwrap();
        prop_assert_eq!(gen.seed_from_hex(&hex).unwrap(), seed);
    }

    #[test]
    fn sign_index_round_trip(idx in 0u64..(1 << 20)) {
        let mut x = vec![0i8; 20];
        signs_from_index(idx, &mut x);
        let back = x.iter().enumerate().fold(0u64, |acc, (i, &v)| acc | (((v < 0) as u64) << i));
        prop_assert_eq!(back, idx);
    }

    #[test]
    fn bentkus_product_is_permutation_invariant(mut x in prop::collection::vec(-12.0f64..12.0, 1..10)) {
        let v = log_big_g(&x);
        x.reverse();
        prop_assert_eq!(log_big_g(&x), v);
        let g = big_g(&x);
        prop_assert!((0.0..=1.0).contains(&g));
    }

    #[test]
    fn divided_difference_is_symmetric(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        let f = ScalarFunction::Exp;
        let d1 = divided_diff(&f, &[a, b, c]).unwrap();
        let d2 = divided_diff(&f, &[c, a, b]).unwrap();
        prop_assert!((d1 - d2).abs() <= 1e-6 * d1.abs().max(1.0));
    }

    #[test]
    fn frechet_of_square_is_anticommutator(x in sym_strategy(3), a in sym_strategy(3)) {
        let f = ScalarFunction::Polynomial(vec![0.0, 0.0, 1.0]);
        let d = frechet_d1(&f, &x, &a).unwrap();
        let want = x.matmul(&a).add(&a.matmul(&x)).symmetric_part();
        let scale = 1.0 + x.max_abs() * a.max_abs();
        for (u, v) in d.as_slice().iter().zip(want.as_slice()) {
            prop_assert!((u - v).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn labeled_seeds_are_stable(master in any::<u64>()) {
        prop_assert_eq!(derive_seed(master, "a"), derive_seed(master, "a"));
        prop_assert_ne!(derive_seed(master, "a"), derive_seed(master, "b"));
    }
}

#[test]
fn power_iteration_oracle_on_known_spectrum() {
    let m = SymMatrix::diag(&[3.0, -1.0, 0.5]);
    assert!((power_iteration(&m, 200) - 3.0).abs() < 1e-12);
}
