#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spectra_core::estimators::{calibrate_offset, chunk_rng, uniform_signs};
use spectra_core::instance::random_regular_instance;
use spectra_core::normal::standard_normal;
use spectra_core::{check_regularity, eig_sym, Declared, Mat, PositiveSpectrahedron, SpectrahedronPair, SymMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric matrix with `N(0, s²)` entries (GOE-like).
pub fn random_sym(rng: &mut ChaCha8Rng, k: usize, s: f64) -> SymMatrix<f64> {
    let data: Vec<f64> = (0..k * k).map(|_| s * standard_normal(rng)).collect();
    Mat::from_row_major(k, data).unwrap().symmetric_part()
}

/// Random orthogonal matrix from the eigenvectors of a random symmetric matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, k: usize) -> Mat<f64> {
    eig_sym(&random_sym(rng, k, 1.0)).unwrap().eigenvectors
}

/// `V diag(λ) Vᵀ` with a non-increasing spectrum whose consecutive gaps are at least `gap`.
pub fn spread_spectrum(rng: &mut ChaCha8Rng, k: usize, gap: f64) -> SymMatrix<f64> {
    let mut lam = Vec::with_capacity(k);
    let mut v = rng.gen_range(-1.0..1.0);
    for _ in 0..k {
        lam.push(v);
        v -= gap + rng.gen_range(0.0..0.5);
    }
    SymMatrix::diag(&lam).congruence(&random_orthogonal(rng, k))
}

/// Exact membership oracle: `Σᵢ xᵢAⁱ − B` is evaluated in rationals and
/// `B − Σᵢ xᵢAⁱ` is tested for positive definiteness through the signs of its
/// leading principal minors (Sylvester). Only meaningful off the boundary.
pub fn sylvester_member(s: &PositiveSpectrahedron<f64>, x: &[i8]) -> bool {
    let k = s.k();
    let q = |v: f64| BigRational::from_float(v).expect("finite");
    let mut m: Vec<Vec<BigRational>> = (0..k).map(|i| (0..k).map(|j| q(s.offset().get(i, j))).collect()).collect();
    for (a, &xi) in s.coeffs().iter().zip(x) {
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                let t = q(a.get(i, j));
                if xi < 0 {
                    *e += t;
                } else {
                    *e -= t;
                }
            }
        }
    }
    leading_minors(m).iter().all(|d| d.is_positive())
}

/// Leading principal minors by fraction-free elimination (Bareiss).
pub fn leading_minors(mut m: Vec<Vec<BigRational>>) -> Vec<BigRational> {
    let n = m.len();
    let mut out = Vec::with_capacity(n);
    let mut prev = BigRational::from_integer(BigInt::from(1));
    for p in 0..n {
        let piv = m[p][p].clone();
        out.push(piv.clone());
        if piv.is_zero() {
            // the remaining minors are not needed once one vanishes
            out.extend(std::iter::repeat_n(BigRational::zero(), n - p - 1));
            break;
        }
        for i in p + 1..n {
            for j in p + 1..n {
                let v = (&m[i][j] * &piv - &m[i][p] * &m[p][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = piv;
    }
    out
}

/// PSD and NSD members built from regular instances, each shifted so that
/// `λ_max` has median zero under uniform inputs.
pub fn centered_pair(n: usize, k: usize, tau: f64, seed: u64, calib: u64) -> SpectrahedronPair<f64> {
    let psd = random_regular_instance(n, k, tau, 2.0, 1.0, seed).unwrap();
    let nsd = random_regular_instance(n, k, tau, 2.0, 1.0, seed.wrapping_add(1_000_003)).unwrap().negate_coeffs();
    let psd = calibrate_offset(&psd, 0.5, calib, seed ^ 0x5a5a).unwrap();
    let nsd = calibrate_offset(&nsd, 0.5, calib, seed ^ 0xa5a5).unwrap();
    SpectrahedronPair::new(psd, nsd).unwrap()
}

/// Regular instance rescaled until the largest coefficient eigenvalue hits `tau`,
/// so `Σ(Aⁱ)²` sits well above `I` (about `nτ²/… · I`).
pub fn saturated_instance(n: usize, k: usize, tau: f64, seed: u64) -> PositiveSpectrahedron<f64> {
    let base = random_regular_instance(n, k, tau, 2.0, 1.0, seed).unwrap();
    let r = check_regularity(&base).unwrap();
    let c = tau / r.tau_actual;
    let coeffs = base.coeffs().iter().map(|a| a.scale(c)).collect();
    PositiveSpectrahedron::new(coeffs, base.offset().clone(), base.sign())
        .unwrap()
        .with_declared(Declared { tau, m_width: c * c * r.lambda_max_sum * (1.0 + 1e-9), gamma: r.gamma_actual })
        .unwrap()
}

/// Pair of saturated instances (PSD and NSD) whose intersection accepts half the cube.
///
/// Both blocks are shifted to the same per-block quantile, found by bisection on
/// `calib` paired samples.
pub fn saturated_pair(n: usize, k: usize, tau: f64, seed: u64, calib: u64) -> SpectrahedronPair<f64> {
    let psd = saturated_instance(n, k, tau, seed);
    let nsd = saturated_instance(n, k, tau, seed.wrapping_add(1_000_003)).negate_coeffs();
    let mut r = chunk_rng(seed ^ 0x5a5a, 0);
    let mut x = vec![1i8; n];
    let pts: Vec<(f64, f64)> = (0..calib)
        .map(|_| {
            uniform_signs(&mut r, &mut x);
            (psd.lambda_max_at_signs(&x).unwrap(), nsd.lambda_max_at_signs(&x).unwrap())
        })
        .collect();
    let sorted = |f: fn(&(f64, f64)) -> f64| {
        let mut v: Vec<f64> = pts.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let (a, b) = (sorted(|p| p.0), sorted(|p| p.1));
    let quantile = |v: &[f64], q: f64| v[((q * v.len() as f64) as usize).min(v.len() - 1)];
    let (mut lo, mut hi) = (0.5, 1.0);
    for _ in 0..40 {
        let q = 0.5 * (lo + hi);
        let (oa, ob) = (quantile(&a, q), quantile(&b, q));
        let acc = pts.iter().filter(|p| p.0 <= oa && p.1 <= ob).count() as f64 / pts.len() as f64;
        if acc < 0.5 {
            lo = q;
        } else {
            hi = q;
        }
    }
    let shift = |s: &PositiveSpectrahedron<f64>, o: f64| {
        s.with_offset(s.offset().add(&SymMatrix::scaled_identity(k, o))).unwrap()
    };
    SpectrahedronPair::new(shift(&psd, quantile(&a, lo)), shift(&nsd, quantile(&b, lo))).unwrap()
}
