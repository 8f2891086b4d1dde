//! Third-order Fréchet derivative of a spectral function `F = f∘λ` as the sum
//! of seven eigenbasis terms built from `∇f`, `∇²f`, `∇³f` and their divided
//! differences across eigenvalues.

use super::functions::{MultivariateSymmetricFunction, Partials};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, SymMatrix};

/// Multiplicity of each term in `D³F(X)[H, H, H]`.
///
/// Terms 2, 4 and 5 each stand for several orderings of the same index pattern
/// that merge once `H` is symmetric; the multiplicities follow from
/// third-order eigenvalue perturbation (for `k = 2`, `f = x₁²x₂ + x₁x₂²`,
/// `F = det·tr` and `D³F[H,H,H] = 6·det(H)·tr(H)` pins terms 2 and 4).
pub const TERM_MULTIPLICITY: [f64; 7] = [1.0, 3.0, 1.0, 6.0, 3.0, 1.0, 1.0];

/// Default minimum eigenvalue gap relative to the spread of the spectrum.
pub const DEFAULT_GAP_TOL: f64 = 1e-5;

/// The partials of `f` at a spectrum with pairwise distinct entries, exposing
/// the seven coefficient tensors.
#[derive(Clone, Debug)]
pub struct SendovCoefficients {
    pub x: Vec<f64>,
    pub partials: Partials,
}

impl SendovCoefficients {
    /// `∇³ᵢᵢᵢ`
    pub fn t1(&self, i: usize) -> f64 {
        self.partials.d3(i, i, i)
    }

    /// `∇³_{i₁i₂i₁}`
    pub fn t2(&self, i1: usize, i2: usize) -> f64 {
        self.partials.d3(i1, i2, i1)
    }

    /// `∇³_{i₁i₂i₃}`
    pub fn t3(&self, i1: usize, i2: usize, i3: usize) -> f64 {
        self.partials.d3(i1, i2, i3)
    }

    /// `(∇²_{i₂i₂} − ∇²_{i₁i₂})/(x_{i₂} − x_{i₁}) − (∇_{i₂} − ∇_{i₁})/(x_{i₂} − x_{i₁})²`
    pub fn t4(&self, i1: usize, i2: usize) -> f64 {
        let p = &self.partials;
        let d = self.x[i2] - self.x[i1];
        (p.d2(i2, i2) - p.d2(i1, i2)) / d - (p.d1(i2) - p.d1(i1)) / (d * d)
    }

    /// `(∇²_{i₂i₃} − ∇²_{i₁i₃})/(x_{i₂} − x_{i₁})`
    pub fn t5(&self, i1: usize, i2: usize, i3: usize) -> f64 {
        let p = &self.partials;
        (p.d2(i2, i3) - p.d2(i1, i3)) / (self.x[i2] - self.x[i1])
    }

    /// `(∇_{i₃} − ∇_{i₁})/((x_{i₃} − x_{i₂})(x_{i₃} − x_{i₁})) − (∇_{i₂} − ∇_{i₁})/((x_{i₃} − x_{i₂})(x_{i₂} − x_{i₁}))`
    pub fn t6(&self, i1: usize, i2: usize, i3: usize) -> f64 {
        let p = &self.partials;
        let x = &self.x;
        (p.d1(i3) - p.d1(i1)) / ((x[i3] - x[i2]) * (x[i3] - x[i1]))
            - (p.d1(i2) - p.d1(i1)) / ((x[i3] - x[i2]) * (x[i2] - x[i1]))
    }

    /// `(∇_{i₂} − ∇_{i₃})/((x_{i₃} − x_{i₁})(x_{i₂} − x_{i₃})) − (∇_{i₂} − ∇_{i₁})/((x_{i₃} − x_{i₁})(x_{i₂} − x_{i₁}))`
    pub fn t7(&self, i1: usize, i2: usize, i3: usize) -> f64 {
        let p = &self.partials;
        let x = &self.x;
        (p.d1(i2) - p.d1(i3)) / ((x[i3] - x[i1]) * (x[i2] - x[i3]))
            - (p.d1(i2) - p.d1(i1)) / ((x[i3] - x[i1]) * (x[i2] - x[i1]))
    }

    /// Unweighted sums of the seven terms for `Q` in the eigenbasis.
    pub fn terms(&self, q: &SymMatrix<f64>) -> [f64; 7] {
        let k = self.x.len();
        let mut t = [0.0; 7];
        for i in 0..k {
            let qi = q[(i, i)];
            t[0] += self.t1(i) * qi * qi * qi;
        }
        for i1 in 0..k {
            for i2 in 0..k {
                if i1 == i2 {
                    continue;
                }
                let (d1, d2, o) = (q[(i1, i1)], q[(i2, i2)], q[(i1, i2)]);
                t[1] += self.t2(i1, i2) * d1 * d1 * d2;
                t[3] += self.t4(i1, i2) * d2 * o * o;
                for i3 in 0..k {
                    if i3 == i1 || i3 == i2 {
                        continue;
                    }
                    let d3 = q[(i3, i3)];
                    t[2] += self.t3(i1, i2, i3) * d1 * d2 * d3;
                    t[4] += self.t5(i1, i2, i3) * o * o * d3;
                    t[5] += self.t6(i1, i2, i3) * o * q[(i2, i3)] * q[(i3, i1)];
                    t[6] += self.t7(i1, i2, i3) * q[(i1, i3)] * q[(i2, i1)] * q[(i3, i2)];
                }
            }
        }
        t
    }

    /// `Σ multiplicity · term`
    pub fn d3(&self, q: &SymMatrix<f64>) -> f64 {
        self.terms(q).iter().zip(TERM_MULTIPLICITY).map(|(t, m)| t * m).sum()
    }
}

fn gap_scale(x: &[f64]) -> f64 {
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let spread = hi - lo;
    if spread > 0.0 {
        spread
    } else {
        x.iter().fold(1.0f64, |m, v| m.max(v.abs()))
    }
}

fn min_gap(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Coefficient tensors at `x`; fails if two entries are closer than `gap_tol_rel·spread`.
pub fn sendov_tensors(
    f: &dyn MultivariateSymmetricFunction,
    x: &[f64],
    gap_tol_rel: f64,
) -> Result<SendovCoefficients> {
    let tol = gap_tol_rel * gap_scale(x);
    let gap = min_gap(x);
    if gap < tol {
        return Err(Error::DegenerateSpectrum { gap, tol });
    }
    Ok(SendovCoefficients { x: x.to_vec(), partials: f.partials(x, 3) })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct D3Options {
    pub gap_tol_rel: f64,
    /// Separate clustered eigenvalues instead of failing.
    pub jitter: bool,
}

impl Default for D3Options {
    fn default() -> Self {
        Self { gap_tol_rel: DEFAULT_GAP_TOL, jitter: false }
    }
}

/// `D³F(X)[H, H, H]` for `F = f∘λ`.
///
/// With `jitter`, a spectrum whose gaps fall below tolerance is pushed apart
/// by subtracting `2·i·tol` from the `i`-th (non-increasing) eigenvalue, which
/// keeps the order and makes every gap at least `2·tol`.
pub fn frechet_d3_spectral(
    f: &dyn MultivariateSymmetricFunction,
    x: &SymMatrix<f64>,
    h: &SymMatrix<f64>,
    opts: D3Options,
) -> Result<f64> {
    if h.dim() != x.dim() {
        return Err(Error::Dimension { expected: x.dim(), got: h.dim() });
    }
    let e = eig_sym(x)?;
    let q = h.congruence_t(&e.eigenvectors);
    let mut lam = e.eigenvalues.clone();
    let coeffs = match sendov_tensors(f, &lam, opts.gap_tol_rel) {
        Err(Error::DegenerateSpectrum { tol, .. }) if opts.jitter => {
            for (i, l) in lam.iter_mut().enumerate() {
                *l -= 2.0 * tol * i as f64;
            }
            sendov_tensors(f, &lam, opts.gap_tol_rel)?
        }
        other => other?,
    };
    Ok(coeffs.d3(&q))
}

#[cfg(test)]
mod tests {
    use super::super::functions::{ProductFunction, SeparableFunction};
    use super::*;

    #[test]
    fn linear_function_has_zero_third_derivative() {
        let x = SymMatrix::from_rows(&[vec![1.0, 0.3, 0.0], vec![0.3, -1.0, 0.2], vec![0.0, 0.2, 0.5]]).unwrap();
        let h = SymMatrix::from_rows(&[vec![0.1, -0.7, 0.4], vec![-0.7, 0.9, 0.0], vec![0.4, 0.0, -0.3]]).unwrap();
        let d = frechet_d3_spectral(&SeparableFunction::linear(), &x, &h, D3Options::default()).unwrap();
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn diagonal_case_uses_third_partials() {
        let f = ProductFunction::bentkus();
        let x = SymMatrix::diag(&[0.9, -0.2, 0.4]);
        let h = SymMatrix::diag(&[0.5, 1.0, -0.3]);
        let d = frechet_d3_spectral(&f, &x, &h, D3Options::default()).unwrap();
        let e = eig_sym(&x).unwrap();
        let q = h.congruence_t(&e.eigenvectors);
        let p = f.partials(&e.eigenvalues, 3);
        let mut expect = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    expect += p.d3(i, j, l) * q[(i, i)] * q[(j, j)] * q[(l, l)];
                }
            }
        }
        assert!((d - expect).abs() < 1e-14);
    }

    #[test]
    fn degenerate_spectrum_needs_permission() {
        let f = ProductFunction::bentkus();
        let x = SymMatrix::diag(&[0.5, 0.5, -0.1]);
        let h = SymMatrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(frechet_d3_spectral(&f, &x, &h, D3Options::default()), Err(Error::DegenerateSpectrum { .. })));
        let opts = D3Options { jitter: true, ..D3Options::default() };
        assert!(frechet_d3_spectral(&f, &x, &h, opts).unwrap().is_finite());
    }

    /// `f(x₁, x₂) = x₁²x₂ + x₁x₂²` gives `F(X) = det(X)·tr(X)`, whose third
    /// derivative in direction `H` is `6·det(H)·tr(H)`.
    struct DetTrace;

    impl MultivariateSymmetricFunction for DetTrace {
        fn value(&self, x: &[f64]) -> f64 {
            x[0] * x[0] * x[1] + x[0] * x[1] * x[1]
        }
        fn partials(&self, x: &[f64], _order: usize) -> Partials {
            let (a, b) = (x[0], x[1]);
            let grad = vec![2.0 * a * b + b * b, a * a + 2.0 * a * b];
            let hess = vec![2.0 * b, 2.0 * (a + b), 2.0 * (a + b), 2.0 * a];
            // ∇³₁₁₂ = 2 and permutations, ∇³₁₁₁ = ∇³₂₂₂ = 0
            let mut third = vec![2.0; 8];
            third[0] = 0.0;
            third[7] = 0.0;
            Partials { k: 2, grad, hess, third }
        }
    }

    #[test]
    fn hand_expansion_for_det_trace() {
        let x = SymMatrix::from_rows(&[vec![1.3, 0.4], vec![0.4, -0.6]]).unwrap();
        let h = SymMatrix::from_rows(&[vec![0.7, -0.2], vec![-0.2, 0.5]]).unwrap();
        let det = 0.7 * 0.5 - 0.04;
        let d = frechet_d3_spectral(&DetTrace, &x, &h, D3Options::default()).unwrap();
        assert!((d - 6.0 * det * 1.2).abs() < 1e-12);

        let c = sendov_tensors(&DetTrace, &[2.0, -1.0], DEFAULT_GAP_TOL).unwrap();
        assert_eq!(c.t2(0, 1), 2.0);
        // (2a − 2(a+b))/(b − a) − ((a²+2ab) − (2ab+b²))/(b − a)² = −1 at (a, b) = (2, −1)
        assert!((c.t4(0, 1) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn terms_six_and_seven_agree() {
        let f = ProductFunction::bentkus_theta(0.5, 0.1).unwrap();
        let c = sendov_tensors(&f, &[0.8, -0.3, 0.1, -1.1], DEFAULT_GAP_TOL).unwrap();
        for (a, b, d) in [(0, 1, 2), (3, 1, 0), (2, 3, 1)] {
            assert!((c.t6(a, b, d) - c.t7(a, b, d)).abs() < 1e-12 * (1.0 + c.t6(a, b, d).abs()));
            assert!((c.t6(a, b, d) - c.t6(b, d, a)).abs() < 1e-12 * (1.0 + c.t6(a, b, d).abs()));
        }
    }
}
