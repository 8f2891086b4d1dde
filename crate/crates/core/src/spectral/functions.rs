//! Scalar functions with analytic derivatives and symmetric multivariate
//! functions with analytic partials up to third order.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::normal;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied function: value plus derivatives of orders `1..=derivs.len()`.
#[derive(Clone)]
pub struct CustomFunction {
    pub name: String,
    pub value: RealFn,
    pub derivs: Vec<RealFn>,
}

impl fmt::Debug for CustomFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFunction")
            .field("name", &self.name)
            .field("derivative_orders", &self.derivs.len())
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum ScalarFunction {
    /// The standard normal CDF `g`.
    GaussCdf,
    Exp,
    /// `e^{−x²/2}`
    NegHalfSquareExp,
    /// Coefficients in increasing degree.
    Polynomial(Vec<f64>),
    Custom(CustomFunction),
}

impl ScalarFunction {
    pub fn name(&self) -> &str {
        match self {
            ScalarFunction::GaussCdf => "gauss_cdf",
            ScalarFunction::Exp => "exp",
            ScalarFunction::NegHalfSquareExp => "neg_half_square_exp",
            ScalarFunction::Polynomial(_) => "polynomial",
            ScalarFunction::Custom(c) => &c.name,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            ScalarFunction::GaussCdf => normal::g(x),
            ScalarFunction::Exp => x.exp(),
            ScalarFunction::NegHalfSquareExp => (-0.5 * x * x).exp(),
            ScalarFunction::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &a| acc * x + a),
            ScalarFunction::Custom(c) => (c.value)(x),
        }
    }

    /// `f^{(order)}(x)`; order 0 is the value.
    pub fn deriv(&self, order: usize, x: f64) -> Result<f64> {
        if order == 0 {
            return Ok(self.value(x));
        }
        match self {
            ScalarFunction::GaussCdf => {
                let (d1, d2, d3) = normal::g_derivs(x);
                match order {
                    1 => Ok(d1),
                    2 => Ok(d2),
                    3 => Ok(d3),
                    _ => {
                        // g^{(r)} = (−1)^{r−1} He_{r−1}(x) φ(x)
                        let (mut h0, mut h1) = (1.0, x);
                        for n in 1..(order - 1) {
                            let h2 = x * h1 - n as f64 * h0;
                            h0 = h1;
                            h1 = h2;
                        }
                        let sign = if (order - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
                        Ok(sign * h1 * d1)
                    }
                }
            }
            ScalarFunction::Exp => Ok(x.exp()),
            ScalarFunction::NegHalfSquareExp => {
                // f^{(r)} = (−1)^r He_r(x) e^{−x²/2}
                let (mut h0, mut h1) = (1.0, x);
                for n in 1..order {
                    let h2 = x * h1 - n as f64 * h0;
                    h0 = h1;
                    h1 = h2;
                }
                let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
                Ok(sign * h1 * (-0.5 * x * x).exp())
            }
            ScalarFunction::Polynomial(c) => {
                let mut acc = 0.0;
                for (p, &a) in c.iter().enumerate().skip(order).rev() {
                    let falling: f64 = ((p - order + 1)..=p).map(|v| v as f64).product();
                    acc = acc * x + a * falling;
                }
                Ok(acc)
            }
            ScalarFunction::Custom(c) => c.derivs.get(order - 1).map(|d| d(x)).ok_or(Error::MissingDerivative(order)),
        }
    }

    /// Applies `f` to a spectrum.
    pub fn map(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.value(x)).collect()
    }
}

/// Gradient, Hessian and third-derivative tensor at one point (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct Partials {
    pub k: usize,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
    pub third: Vec<f64>,
}

impl Partials {
    #[inline]
    pub fn d1(&self, i: usize) -> f64 {
        self.grad[i]
    }
    #[inline]
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.k + j]
    }
    #[inline]
    pub fn d3(&self, i: usize, j: usize, l: usize) -> f64 {
        self.third[(i * self.k + j) * self.k + l]
    }
}

/// A permutation-symmetric `f: ℝᵏ → ℝ` with analytic partials up to order 3.
pub trait MultivariateSymmetricFunction: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    /// Partials up to `order` (1..=3); higher tensors may be left empty.
    fn partials(&self, x: &[f64], order: usize) -> Partials;
}

/// `f(x) = Πᵢ h(a·xᵢ + b)` for a scalar `h`.
#[derive(Clone, Debug)]
pub struct ProductFunction {
    pub factor: ScalarFunction,
    pub scale: f64,
    pub offset: f64,
}

impl ProductFunction {
    /// The Bentkus function `G(x) = Πᵢ g(xᵢ)`.
    pub fn bentkus() -> Self {
        Self { factor: ScalarFunction::GaussCdf, scale: 1.0, offset: 0.0 }
    }

    /// `x ↦ G_θ(x + shift) = Πᵢ g(−(xᵢ + shift)/θ)`.
    pub fn bentkus_theta(theta: f64, shift: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Input(format!("theta must be positive and finite, got {theta}")));
        }
        Ok(Self { factor: ScalarFunction::GaussCdf, scale: -1.0 / theta, offset: -shift / theta })
    }

    fn factors(&self, x: &[f64], order: usize) -> Vec<[f64; 4]> {
        let s = self.scale;
        x.iter()
            .map(|&v| {
                let u = s * v + self.offset;
                let mut out = [0.0; 4];
                let mut sp = 1.0;
                for (r, o) in out.iter_mut().enumerate().take(order + 1) {
                    *o = sp * self.factor.deriv(r, u).expect("factor derivatives up to order 3");
                    sp *= s;
                }
                out
            })
            .collect()
    }
}

impl MultivariateSymmetricFunction for ProductFunction {
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| self.factor.value(self.scale * v + self.offset)).product()
    }

    fn partials(&self, x: &[f64], order: usize) -> Partials {
        let k = x.len();
        let h = self.factors(x, order.min(3));
        let mut counts = vec![0usize; k];
        let mut prod = |idx: &[usize]| -> f64 {
            for &i in idx {
                counts[i] += 1;
            }
            let mut p = 1.0;
            for (c, hi) in counts.iter().zip(&h) {
                p *= hi[*c];
            }
            for &i in idx {
                counts[i] = 0;
            }
            p
        };
        let grad = (0..k).map(|i| prod(&[i])).collect();
        let mut hess = Vec::new();
        if order >= 2 {
            hess = vec![0.0; k * k];
            for i in 0..k {
                for j in 0..k {
                    hess[i * k + j] = prod(&[i, j]);
                }
            }
        }
        let mut third = Vec::new();
        if order >= 3 {
            third = vec![0.0; k * k * k];
            for i in 0..k {
                for j in 0..k {
                    for l in 0..k {
                        third[(i * k + j) * k + l] = prod(&[i, j, l]);
                    }
                }
            }
        }
        Partials { k, grad, hess, third }
    }
}

/// `f(x) = Σᵢ h(xᵢ)`
#[derive(Clone, Debug)]
pub struct SeparableFunction {
    pub h: ScalarFunction,
}

impl SeparableFunction {
    /// `f(x) = Σ xᵢ`, i.e. `F = trace`.
    pub fn linear() -> Self {
        Self { h: ScalarFunction::Polynomial(vec![0.0, 1.0]) }
    }

    /// `f(x) = Σ xᵢ²`
    pub fn sum_of_squares() -> Self {
        Self { h: ScalarFunction::Polynomial(vec![0.0, 0.0, 1.0]) }
    }
}

impl MultivariateSymmetricFunction for SeparableFunction {
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| self.h.value(v)).sum()
    }

    fn partials(&self, x: &[f64], order: usize) -> Partials {
        let k = x.len();
        let d = |r: usize, v: f64| self.h.deriv(r, v).expect("separable factor derivatives up to order 3");
        let grad = x.iter().map(|&v| d(1, v)).collect();
        let mut hess = Vec::new();
        if order >= 2 {
            hess = vec![0.0; k * k];
            for (i, &v) in x.iter().enumerate() {
                hess[i * k + i] = d(2, v);
            }
        }
        let mut third = Vec::new();
        if order >= 3 {
            third = vec![0.0; k * k * k];
            for (i, &v) in x.iter().enumerate() {
                third[(i * k + i) * k + i] = d(3, v);
            }
        }
        Partials { k, grad, hess, third }
    }
}
