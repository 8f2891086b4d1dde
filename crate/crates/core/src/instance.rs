//! Instance files and the random regular instance generator.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigvals_sym, SymMatrix};
use crate::normal::standard_normal;
use crate::spectrahedron::{check_regularity, Declared, PositiveSpectrahedron, Sign};

/// Matrix as stored on disk: nested rows or a flat row-major array.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixRepr {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl MatrixRepr {
    fn to_sym(&self, k: usize) -> Result<SymMatrix<f64>> {
        match self {
            MatrixRepr::Rows(rows) => {
                if rows.len() != k {
                    return Err(Error::Dimension { expected: k, got: rows.len() });
                }
                SymMatrix::from_rows(rows)
            }
            MatrixRepr::Flat(v) => SymMatrix::from_row_major(k, v.clone()),
        }
    }
}

/// On-disk instance: `{"n","k","sign","A","B","tau","M","gamma"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub k: usize,
    pub sign: Sign,
    #[serde(rename = "A")]
    pub a: Vec<MatrixRepr>,
    #[serde(rename = "B")]
    pub b: MatrixRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl InstanceFile {
    pub fn from_spectrahedron(s: &PositiveSpectrahedron<f64>) -> Self {
        let d = s.declared();
        Self {
            n: s.n(),
            k: s.k(),
            sign: s.sign(),
            a: s.coeffs().iter().map(|m| MatrixRepr::Rows(m.rows())).collect(),
            b: MatrixRepr::Rows(s.offset().rows()),
            tau: d.map(|d| d.tau),
            m_width: d.map(|d| d.m_width),
            gamma: d.map(|d| d.gamma),
        }
    }

    pub fn declared(&self) -> Result<Option<Declared<f64>>> {
        match (self.tau, self.m_width, self.gamma) {
            (None, None, None) => Ok(None),
            (Some(tau), Some(m_width), Some(gamma)) => {
                if !(tau >= 0.0 && m_width >= 1.0 && gamma >= 0.0) {
                    return Err(Error::Input(format!(
                        "declared parameters out of range: tau={tau}, M={m_width}, gamma={gamma}"
                    )));
                }
                Ok(Some(Declared { tau, m_width, gamma }))
            }
            _ => Err(Error::Input("tau, M and gamma must be declared together".into())),
        }
    }

    /// Builds the spectrahedron without attaching the declared parameters.
    pub fn to_undeclared(&self) -> Result<PositiveSpectrahedron<f64>> {
        if self.a.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: self.a.len() });
        }
        if self.k == 0 || self.n == 0 {
            return Err(Error::Input("n and k must be positive".into()));
        }
        let coeffs = self.a.iter().map(|m| m.to_sym(self.k)).collect::<Result<Vec<_>>>()?;
        PositiveSpectrahedron::new(coeffs, self.b.to_sym(self.k)?, self.sign)
    }

    /// Builds the spectrahedron, rejecting it if the declared parameters do not hold.
    pub fn to_spectrahedron(&self) -> Result<PositiveSpectrahedron<f64>> {
        let s = self.to_undeclared()?;
        match self.declared()? {
            Some(d) => s.with_declared(d),
            None => Ok(s),
        }
    }
}

pub fn to_json(s: &PositiveSpectrahedron<f64>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&InstanceFile::from_spectrahedron(s))?)
}

pub fn from_json(text: &str) -> Result<PositiveSpectrahedron<f64>> {
    serde_json::from_str::<InstanceFile>(text)?.to_spectrahedron()
}

pub fn read_instance_file(path: impl AsRef<Path>) -> Result<InstanceFile> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_instance(path: impl AsRef<Path>, s: &PositiveSpectrahedron<f64>) -> Result<()> {
    std::fs::write(path, to_json(s)? + "\n")?;
    Ok(())
}

fn gaussian_sym(rng: &mut ChaCha8Rng, k: usize) -> SymMatrix<f64> {
    let data: Vec<f64> = (0..k * k).map(|_| standard_normal(rng)).collect();
    let w = crate::linalg::Mat::from_row_major(k, data).expect("k*k entries");
    w.symmetric_part()
}

fn random_unit_psd(rng: &mut ChaCha8Rng, k: usize) -> Result<SymMatrix<f64>> {
    let data: Vec<f64> = (0..k * k).map(|_| standard_normal(rng)).collect();
    let w = crate::linalg::Mat::from_row_major(k, data)?;
    let q = w.matmul(&w.transpose()).symmetric_part();
    let top = eigvals_sym(&q)?[0];
    Ok(if top > 0.0 { q.scale(1.0 / top) } else { SymMatrix::identity(k) })
}

/// `λ_min` and `λ_max` of `τ² Σ ((1−ρ)I + ρQⁱ)²`.
fn mixed_spectrum(qs: &[SymMatrix<f64>], tau: f64, rho: f64) -> Result<(f64, f64)> {
    let k = qs[0].dim();
    let mut sum = SymMatrix::zeros(k);
    for q in qs {
        let p = q.scale(rho).shift(1.0 - rho);
        sum.axpy(tau * tau, &p.square());
    }
    let ev = eigvals_sym(&sum)?;
    Ok((*ev.last().unwrap(), ev[0]))
}

fn feasible(spec: (f64, f64), m_target: f64) -> bool {
    let (lo, hi) = spec;
    lo >= 1.0 && hi <= m_target * lo
}

/// Random PSD-signed instance that is `(τ, M)`-regular with `‖B‖ ≤ γ`.
///
/// Coefficients are `Aⁱ = c·τ·((1−ρ)I + ρQⁱ)` with random unit-norm PSD `Qⁱ`,
/// `ρ ∈ [0, 1]` as large as the `M` budget allows and `c ≤ 1` chosen so that
/// `λ_min(Σ(Aⁱ)²) = 1`. The offset is a random symmetric matrix of norm at most `γ`.
pub fn random_regular_instance(
    n: usize,
    k: usize,
    tau: f64,
    m_target: f64,
    gamma: f64,
    seed: u64,
) -> Result<PositiveSpectrahedron<f64>> {
    if n == 0 || k == 0 {
        return Err(Error::Input("n and k must be positive".into()));
    }
    let tau_ok = tau > 0.0 && tau.is_finite();
    let m_ok = m_target >= 1.0;
    let gamma_ok = gamma >= 0.0 && gamma.is_finite();
    if !(tau_ok && m_ok && gamma_ok) {
        return Err(Error::Input(format!("need tau > 0, M >= 1, gamma >= 0 (got {tau}, {m_target}, {gamma})")));
    }
    if (n as f64) * tau * tau < 1.0 - 1e-12 {
        return Err(Error::Infeasible(format!(
            "n*tau^2 = {} < 1, so sum of squares cannot dominate the identity",
            n as f64 * tau * tau
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qs = (0..n).map(|_| random_unit_psd(&mut rng, k)).collect::<Result<Vec<_>>>()?;

    let mut rho_max = 0.0;
    if feasible(mixed_spectrum(&qs, tau, 1.0)?, m_target) {
        rho_max = 1.0;
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if feasible(mixed_spectrum(&qs, tau, mid)?, m_target) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        rho_max = f64::max(rho_max, lo);
    }
    let mut rho = rho_max * rng.gen_range(0.5..=1.0);
    let mut spec = mixed_spectrum(&qs, tau, rho)?;
    while !feasible(spec, m_target) && rho > 0.0 {
        rho = if rho < 1e-6 { 0.0 } else { 0.5 * rho };
        spec = mixed_spectrum(&qs, tau, rho)?;
    }
    let c = 1.0 / spec.0.sqrt();
    let coeffs: Vec<SymMatrix<f64>> = qs.iter().map(|q| q.scale(c * tau * rho).shift(c * tau * (1.0 - rho))).collect();

    let offset = if gamma > 0.0 {
        let g = gaussian_sym(&mut rng, k);
        let norm = g.spectral_norm()?;
        let target = gamma * rng.gen_range(0.25..=1.0);
        if norm > 0.0 {
            g.scale(target / norm)
        } else {
            SymMatrix::zeros(k)
        }
    } else {
        SymMatrix::zeros(k)
    };

    let s = PositiveSpectrahedron::new(coeffs, offset, Sign::Psd)?;
    let report = check_regularity(&s)?;
    let declared = Declared { tau, m_width: m_target, gamma };
    if !report.pass || report.tau_actual > tau + 1e-8 || report.lambda_max_sum > m_target + 1e-8 {
        return Err(Error::Infeasible(format!("generated instance failed its post-check: {report:?}")));
    }
    s.with_declared(declared)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_passes_post_check() {
        let s = random_regular_instance(16, 3, 0.3, 2.0, 1.0, 7).unwrap();
        let r = check_regularity(&s).unwrap();
        assert!(r.pass);
        assert!(r.tau_actual <= 0.3 + 1e-8);
        assert!(r.lambda_max_sum <= 2.0 + 1e-8);
        assert!(r.gamma_actual <= 1.0 + 1e-8);
        assert!((r.lambda_min_sum - 1.0).abs() < 1e-8);
    }

    #[test]
    fn generator_is_deterministic() {
        let a = random_regular_instance(16, 3, 0.3, 2.0, 1.0, 7).unwrap();
        let b = random_regular_instance(16, 3, 0.3, 2.0, 1.0, 7).unwrap();
        assert_eq!(a, b);
        let c = random_regular_instance(16, 3, 0.3, 2.0, 1.0, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generator_precondition() {
        assert!(matches!(random_regular_instance(50, 3, 0.1, 2.0, 1.0, 1), Err(Error::Infeasible(_))));
    }

    #[test]
    fn generator_tight_tau() {
        // n τ² = 1 forces every coefficient to τ·I.
        let s = random_regular_instance(16, 3, 0.25, 2.0, 1.0, 3).unwrap();
        for a in s.coeffs() {
            assert!(a.sub(&SymMatrix::scaled_identity(3, 0.25)).max_abs() < 1e-9);
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let s = random_regular_instance(8, 2, 0.5, 3.0, 0.7, 11).unwrap();
        let text = to_json(&s).unwrap();
        let back = from_json(&text).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn json_accepts_flat_matrices() {
        let text = r#"{"n":1,"k":2,"sign":"PSD","A":[[1,0,0,1]],"B":[[0.5,0],[0,0.5]]}"#;
        let s = from_json(text).unwrap();
        assert_eq!(s.k(), 2);
        assert!(s.declared().is_none());
    }

    #[test]
    fn json_rejects_false_declaration() {
        let text = r#"{"n":1,"k":1,"sign":"PSD","A":[[[2]]],"B":[[0]],"tau":1,"M":4,"gamma":0}"#;
        assert!(from_json(text).is_err());
    }
}
