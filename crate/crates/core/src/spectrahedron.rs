//! Spectrahedra `{x : Σᵢ xᵢAⁱ ⪯ B}`, their positive (uniformly PSD or NSD)
//! specialization, regularity checking and block-diagonal packing of a
//! PSD/NSD pair.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigvals_sym, lambda_max, SymMatrix};
use crate::scalar::Scalar;

/// Tolerance on the declared regularity bounds.
pub const REGULARITY_TOL: f64 = 1e-8;
/// Tolerance on the semidefiniteness of each coefficient matrix.
pub const SEMIDEFINITE_TOL: f64 = 1e-9;

/// Anything that can be evaluated on the Boolean cube and on `ℝⁿ`.
pub trait CubeFunction: Sync {
    fn n_vars(&self) -> usize;
    fn eval_signs(&self, x: &[i8]) -> bool;
    fn eval_real(&self, x: &[f64]) -> bool;
}

/// Common semidefiniteness of the coefficient matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "PSD")]
    Psd,
    #[serde(rename = "NSD")]
    Nsd,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Psd => Sign::Nsd,
            Sign::Nsd => Sign::Psd,
        }
    }
}

/// Dot product with four independent accumulators, so the loop pipelines.
#[inline]
fn dot4<T: Scalar, W>(a: &[T], w: &[W], f: impl Fn(&W) -> T) -> T {
    let mut s = [T::zero(); 4];
    let (a4, w4) = (a.chunks_exact(4), w.chunks_exact(4));
    let (ar, wr) = (a4.remainder(), w4.remainder());
    for (x, y) in a4.zip(w4) {
        for l in 0..4 {
            s[l] += x[l] * f(&y[l]);
        }
    }
    for (x, y) in ar.iter().zip(wr) {
        s[0] += *x * f(y);
    }
    (s[0] + s[1]) + (s[2] + s[3])
}

/// General spectrahedron with no sign constraint on the coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrahedron<T> {
    coeffs: Vec<SymMatrix<T>>,
    offset: SymMatrix<T>,
    /// Entry-major copy of the upper triangles: row `e` holds entry `e` of every `Aⁱ`.
    entries: Vec<T>,
}

impl<T: Scalar> Spectrahedron<T> {
    pub fn new(coeffs: Vec<SymMatrix<T>>, offset: SymMatrix<T>) -> Result<Self> {
        let k = offset.dim();
        if coeffs.is_empty() {
            return Err(Error::Input("spectrahedron needs at least one coefficient matrix".into()));
        }
        for a in &coeffs {
            if a.dim() != k {
                return Err(Error::Dimension { expected: k, got: a.dim() });
            }
        }
        let mut entries = Vec::with_capacity(k * (k + 1) / 2 * coeffs.len());
        for r in 0..k {
            for c in r..k {
                entries.extend(coeffs.iter().map(|a| a.get(r, c)));
            }
        }
        Ok(Self { coeffs, offset, entries })
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn k(&self) -> usize {
        self.offset.dim()
    }

    pub fn coeffs(&self) -> &[SymMatrix<T>] {
        &self.coeffs
    }

    pub fn offset(&self) -> &SymMatrix<T> {
        &self.offset
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::Dimension { expected: self.n(), got: len });
        }
        Ok(())
    }

    fn combine(&self, dot: impl Fn(&[T]) -> T) -> SymMatrix<T> {
        let (k, n) = (self.k(), self.n());
        let mut out = vec![T::zero(); k * k];
        let mut rows = self.entries.chunks_exact(n);
        for r in 0..k {
            for c in r..k {
                let v = dot(rows.next().expect("k(k+1)/2 rows")) - self.offset.get(r, c);
                out[r * k + c] = v;
                out[c * k + r] = v;
            }
        }
        SymMatrix::from_raw(k, out)
    }

    /// `Σᵢ xᵢAⁱ − B`
    pub fn matrix_at(&self, x: &[T]) -> Result<SymMatrix<T>> {
        self.check_len(x.len())?;
        Ok(self.combine(|row| dot4(row, x, |&v| v)))
    }

    /// `Σᵢ xᵢAⁱ − B` for a point of `{−1, +1}ⁿ`.
    pub fn matrix_at_signs(&self, x: &[i8]) -> Result<SymMatrix<T>> {
        self.check_len(x.len())?;
        // `(v >> 7) | 1` is −1 for negative `v` and +1 otherwise, without a branch.
        Ok(self.combine(|row| dot4(row, x, |&v| T::lit(((v >> 7) | 1) as f64))))
    }

    pub fn lambda_max_at(&self, x: &[T]) -> Result<T> {
        lambda_max(&self.matrix_at(x)?)
    }

    pub fn lambda_max_at_signs(&self, x: &[i8]) -> Result<T> {
        lambda_max(&self.matrix_at_signs(x)?)
    }

    /// `1` iff `λ_max(Σᵢ xᵢAⁱ − B) ≤ tol`.
    pub fn membership_with_tol(&self, x: &[T], tol: T) -> Result<bool> {
        Ok(self.lambda_max_at(x)? <= tol)
    }

    pub fn membership(&self, x: &[T]) -> Result<bool> {
        self.membership_with_tol(x, T::zero())
    }

    pub fn membership_signs(&self, x: &[i8]) -> Result<bool> {
        Ok(self.lambda_max_at_signs(x)? <= T::zero())
    }
}

impl<T: Scalar> CubeFunction for Spectrahedron<T> {
    fn n_vars(&self) -> usize {
        self.n()
    }

    fn eval_signs(&self, x: &[i8]) -> bool {
        self.membership_signs(x).expect("cube point of matching length")
    }

    fn eval_real(&self, x: &[f64]) -> bool {
        let xs: Vec<T> = x.iter().map(|&v| T::lit(v)).collect();
        self.membership(&xs).expect("point of matching length")
    }
}

/// Declared `(τ, M)`-regularity and offset bound `‖B‖ ≤ γ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Declared<T> {
    pub tau: T,
    pub m_width: T,
    pub gamma: T,
}

/// Spectrahedron whose coefficients are all PSD or all NSD.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveSpectrahedron<T> {
    inner: Spectrahedron<T>,
    sign: Sign,
    declared: Option<Declared<T>>,
}

impl<T: Scalar> PositiveSpectrahedron<T> {
    /// Checks that every coefficient is semidefinite with the declared sign.
    pub fn new(coeffs: Vec<SymMatrix<T>>, offset: SymMatrix<T>, sign: Sign) -> Result<Self> {
        let inner = Spectrahedron::new(coeffs, offset)?;
        for (i, a) in inner.coeffs.iter().enumerate() {
            let ev = eigvals_sym(a)?;
            let tol = T::lit(SEMIDEFINITE_TOL).max(T::epsilon() * T::lit(16.0) * (T::one() + a.max_abs()));
            let bad = match sign {
                Sign::Psd => *ev.last().unwrap() < -tol,
                Sign::Nsd => ev[0] > tol,
            };
            if bad {
                return Err(Error::Input(format!("coefficient {i} is not {sign:?}")));
            }
        }
        Ok(Self { inner, sign, declared: None })
    }

    /// Attaches declared parameters, rejecting them if the instance violates them.
    pub fn with_declared(mut self, declared: Declared<T>) -> Result<Self> {
        self.declared = Some(declared);
        let report = check_regularity(&self)?;
        if !report.pass {
            return Err(Error::Input(format!("declared regularity does not hold: {report:?}")));
        }
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.inner.n()
    }

    pub fn k(&self) -> usize {
        self.inner.k()
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn declared(&self) -> Option<Declared<T>> {
        self.declared
    }

    pub fn coeffs(&self) -> &[SymMatrix<T>] {
        self.inner.coeffs()
    }

    pub fn offset(&self) -> &SymMatrix<T> {
        self.inner.offset()
    }

    pub fn as_spectrahedron(&self) -> &Spectrahedron<T> {
        &self.inner
    }

    /// Negates the coefficients (PSD ↔ NSD); the offset is kept.
    pub fn negate_coeffs(&self) -> Self {
        let coeffs = self.inner.coeffs.iter().map(SymMatrix::neg).collect();
        Self {
            inner: Spectrahedron::new(coeffs, self.inner.offset.clone()).expect("same shapes"),
            sign: self.sign.flip(),
            declared: self.declared,
        }
    }

    /// Same coefficients, different offset. Declared `γ` is dropped if the new offset violates it.
    pub fn with_offset(&self, offset: SymMatrix<T>) -> Result<Self> {
        if offset.dim() != self.k() {
            return Err(Error::Dimension { expected: self.k(), got: offset.dim() });
        }
        let mut out = self.clone();
        out.inner.offset = offset;
        if let Some(d) = out.declared {
            let norm = out.inner.offset.spectral_norm()?;
            out.declared = Some(Declared { gamma: d.gamma.max(norm), ..d });
        }
        Ok(out)
    }

    /// Coefficients in PSD normal form (negated when the sign is NSD).
    pub fn normal_form_coeffs(&self) -> Vec<SymMatrix<T>> {
        match self.sign {
            Sign::Psd => self.inner.coeffs.clone(),
            Sign::Nsd => self.inner.coeffs.iter().map(SymMatrix::neg).collect(),
        }
    }

    pub fn matrix_at(&self, x: &[T]) -> Result<SymMatrix<T>> {
        self.inner.matrix_at(x)
    }

    pub fn lambda_max_at(&self, x: &[T]) -> Result<T> {
        self.inner.lambda_max_at(x)
    }

    pub fn lambda_max_at_signs(&self, x: &[i8]) -> Result<T> {
        self.inner.lambda_max_at_signs(x)
    }

    pub fn membership(&self, x: &[T]) -> Result<bool> {
        self.inner.membership(x)
    }

    pub fn membership_with_tol(&self, x: &[T], tol: T) -> Result<bool> {
        self.inner.membership_with_tol(x, tol)
    }

    pub fn membership_signs(&self, x: &[i8]) -> Result<bool> {
        self.inner.membership_signs(x)
    }
}

impl<T: Scalar> CubeFunction for PositiveSpectrahedron<T> {
    fn n_vars(&self) -> usize {
        self.n()
    }
    fn eval_signs(&self, x: &[i8]) -> bool {
        self.inner.eval_signs(x)
    }
    fn eval_real(&self, x: &[f64]) -> bool {
        self.inner.eval_real(x)
    }
}

/// Intersection of a PSD-signed and an NSD-signed positive spectrahedron.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrahedronPair<T> {
    psd: PositiveSpectrahedron<T>,
    nsd: PositiveSpectrahedron<T>,
}

impl<T: Scalar> SpectrahedronPair<T> {
    pub fn new(psd: PositiveSpectrahedron<T>, nsd: PositiveSpectrahedron<T>) -> Result<Self> {
        if psd.sign() != Sign::Psd || nsd.sign() != Sign::Nsd {
            return Err(Error::Input("pair needs a PSD first member and an NSD second member".into()));
        }
        if psd.n() != nsd.n() {
            return Err(Error::Dimension { expected: psd.n(), got: nsd.n() });
        }
        Ok(Self { psd, nsd })
    }

    /// Pairs `s` with the always-true NSD spectrahedron `A = 0, B = I`.
    pub fn with_vacuous_nsd(psd: PositiveSpectrahedron<T>) -> Result<Self> {
        let k = psd.k();
        let zeros = vec![SymMatrix::zeros(k); psd.n()];
        let nsd = PositiveSpectrahedron::new(zeros, SymMatrix::identity(k), Sign::Nsd)?;
        Self::new(psd, nsd)
    }

    pub fn psd(&self) -> &PositiveSpectrahedron<T> {
        &self.psd
    }

    pub fn nsd(&self) -> &PositiveSpectrahedron<T> {
        &self.nsd
    }

    pub fn n(&self) -> usize {
        self.psd.n()
    }

    pub fn membership(&self, x: &[T]) -> Result<bool> {
        Ok(self.psd.membership(x)? && self.nsd.membership(x)?)
    }

    pub fn membership_signs(&self, x: &[i8]) -> Result<bool> {
        Ok(self.psd.membership_signs(x)? && self.nsd.membership_signs(x)?)
    }
}

impl<T: Scalar> CubeFunction for SpectrahedronPair<T> {
    fn n_vars(&self) -> usize {
        self.n()
    }
    fn eval_signs(&self, x: &[i8]) -> bool {
        self.psd.eval_signs(x) && self.nsd.eval_signs(x)
    }
    fn eval_real(&self, x: &[f64]) -> bool {
        self.psd.eval_real(x) && self.nsd.eval_real(x)
    }
}

/// Block-diagonal packing `Aⁱ = diag(Aⁱ₁, Aⁱ₂)`, `B = diag(B₁, B₂)` of dimension `k₁ + k₂`.
pub fn pack_intersection<T: Scalar>(pair: &SpectrahedronPair<T>) -> Result<Spectrahedron<T>> {
    let (s1, s2) = (&pair.psd, &pair.nsd);
    if s1.n() != s2.n() {
        return Err(Error::Dimension { expected: s1.n(), got: s2.n() });
    }
    let coeffs = s1.coeffs().iter().zip(s2.coeffs()).map(|(a, b)| SymMatrix::block_diag(a, b)).collect();
    Spectrahedron::new(coeffs, SymMatrix::block_diag(s1.offset(), s2.offset()))
}

/// Measured regularity parameters of a positive spectrahedron.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularityReport<T> {
    /// `maxᵢ λ_max(Aⁱ)` in PSD normal form.
    pub tau_actual: T,
    /// `λ_min(Σᵢ (Aⁱ)²)`
    pub lambda_min_sum: T,
    /// `λ_max(Σᵢ (Aⁱ)²)`
    pub lambda_max_sum: T,
    /// `‖B‖`
    pub gamma_actual: T,
    pub pass: bool,
}

/// Measures `τ`, the spectrum of `Σ(Aⁱ)²` and `‖B‖`.
///
/// `pass` requires `Σ(Aⁱ)² ⪰ I`, plus the declared `τ`, `M`, `γ` bounds when
/// present, each up to [`REGULARITY_TOL`].
pub fn check_regularity<T: Scalar>(s: &PositiveSpectrahedron<T>) -> Result<RegularityReport<T>> {
    let k = s.k();
    let mut tau_actual = T::neg_infinity();
    let mut sum_sq = SymMatrix::zeros(k);
    for a in s.normal_form_coeffs() {
        tau_actual = tau_actual.max(lambda_max(&a)?);
        sum_sq = sum_sq.add(&a.square());
    }
    let ev = eigvals_sym(&sum_sq)?;
    let lambda_max_sum = ev[0];
    let lambda_min_sum = *ev.last().unwrap();
    let gamma_actual = s.offset().spectral_norm()?;
    let tol = T::lit(REGULARITY_TOL);
    let mut pass = lambda_min_sum >= T::one() - tol;
    if let Some(d) = s.declared() {
        pass &= tau_actual <= d.tau + tol;
        pass &= lambda_max_sum <= d.m_width + tol;
        pass &= gamma_actual <= d.gamma + tol;
    }
    Ok(RegularityReport { tau_actual, lambda_min_sum, lambda_max_sum, gamma_actual, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_dim(a: f64, b: f64) -> PositiveSpectrahedron<f64> {
        PositiveSpectrahedron::new(vec![SymMatrix::diag(&[a])], SymMatrix::diag(&[b]), Sign::Psd).unwrap()
    }

    #[test]
    fn scalar_membership() {
        let s = one_dim(2.0, 1.0);
        assert!(!s.membership(&[1.0]).unwrap());
        assert!(s.membership(&[-1.0]).unwrap());
        assert!(s.membership_signs(&[-1]).unwrap());
    }

    #[test]
    fn membership_dimension_mismatch() {
        let s = one_dim(2.0, 1.0);
        assert!(matches!(s.membership(&[1.0, 1.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn closed_boundary_and_tolerance() {
        let s = one_dim(1.0, 1.0);
        assert!(s.membership(&[1.0]).unwrap());
        assert!(!s.membership_with_tol(&[1.5], 0.4).unwrap());
        assert!(s.membership_with_tol(&[1.5], 0.5).unwrap());
    }

    #[test]
    fn rejects_wrong_sign() {
        let a = SymMatrix::diag(&[1.0, -0.5]);
        assert!(PositiveSpectrahedron::new(vec![a.clone()], SymMatrix::identity(2), Sign::Psd).is_err());
        assert!(PositiveSpectrahedron::new(vec![a], SymMatrix::identity(2), Sign::Nsd).is_err());
    }

    #[test]
    fn half_identity_family_is_regular() {
        let a = SymMatrix::<f64>::scaled_identity(2, 0.5);
        let s = PositiveSpectrahedron::new(vec![a; 4], SymMatrix::zeros(2), Sign::Psd).unwrap();
        let r = check_regularity(&s).unwrap();
        assert!((r.tau_actual - 0.5).abs() < 1e-15);
        assert!((r.lambda_min_sum - 1.0).abs() < 1e-15 && (r.lambda_max_sum - 1.0).abs() < 1e-15);
        assert!(r.pass);
        let declared = s.with_declared(Declared { tau: 0.5, m_width: 1.0, gamma: 0.0 }).unwrap();
        assert!(check_regularity(&declared).unwrap().pass);
    }

    #[test]
    fn rank_deficient_sum_fails() {
        let s = PositiveSpectrahedron::<f64>::new(vec![SymMatrix::diag(&[1.0, 0.0])], SymMatrix::zeros(2), Sign::Psd)
            .unwrap();
        let r = check_regularity(&s).unwrap();
        assert_eq!(r.lambda_min_sum, 0.0);
        assert!(!r.pass);
    }

    #[test]
    fn nsd_regularity_uses_normal_form() {
        let a = SymMatrix::<f64>::scaled_identity(2, 0.5);
        let s = PositiveSpectrahedron::new(vec![a; 4], SymMatrix::zeros(2), Sign::Psd).unwrap();
        let r = check_regularity(&s.negate_coeffs()).unwrap();
        assert!((r.tau_actual - 0.5).abs() < 1e-15);
    }

    #[test]
    fn declared_violation_rejected() {
        let a = SymMatrix::<f64>::scaled_identity(2, 0.5);
        let s = PositiveSpectrahedron::new(vec![a; 4], SymMatrix::zeros(2), Sign::Psd).unwrap();
        assert!(s.with_declared(Declared { tau: 0.4, m_width: 1.0, gamma: 0.0 }).is_err());
    }

    #[test]
    fn packed_vacuous_pair_matches_single() {
        let s = PositiveSpectrahedron::<f64>::new(
            vec![SymMatrix::diag(&[1.0, 0.5]), SymMatrix::diag(&[0.25, 1.0])],
            SymMatrix::diag(&[0.3, 0.7]),
            Sign::Psd,
        )
        .unwrap();
        let pair = SpectrahedronPair::with_vacuous_nsd(s.clone()).unwrap();
        let packed = pack_intersection(&pair).unwrap();
        assert_eq!(packed.k(), 4);
        for x in [[1i8, 1], [1, -1], [-1, 1], [-1, -1]] {
            assert_eq!(packed.membership_signs(&x).unwrap(), s.membership_signs(&x).unwrap());
            let l = packed.lambda_max_at_signs(&x).unwrap();
            let l1 = s.lambda_max_at_signs(&x).unwrap();
            assert!((l - l1.max(-1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn pair_sign_order_enforced() {
        let s = one_dim(1.0, 1.0);
        assert!(SpectrahedronPair::new(s.clone(), s).is_err());
    }
}
