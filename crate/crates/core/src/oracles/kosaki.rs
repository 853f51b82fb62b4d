//! Kosaki's variational formula for relative entropy, evaluated on step
//! paths:
//! `S(ρ, σ) >= ln k - ∫_{1/k}^∞ [Tr(ρ x_t* x_t)/t + Tr(σ y_t y_t*)/t²] dt`,
//! `y_t = 1 - x_t`. On a step the integrand is `α/t + β/t²` with constant
//! `α`, `β`, so every segment integrates exactly.

use crate::error::{Error, Result};
use crate::linalg::{real_trace, CMatrix, C64};

use super::density::{DensityMatrix, PositiveMatrix};

/// Piecewise-constant `x_t` on `[t_0, t_1), ..., [t_{n-1}, t_n]` with
/// `t_0 = 1/k`, `t_n = m`, and `x_t = 0` beyond `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPath {
    knots: Vec<f64>,
    values: Vec<CMatrix>,
}

impl StepPath {
    pub fn new(knots: Vec<f64>, values: Vec<CMatrix>) -> Result<Self> {
        if knots.len() < 2 || values.len() + 1 != knots.len() {
            return Err(Error::InvalidPath(format!(
                "{} knots need {} values, got {}",
                knots.len(),
                knots.len().saturating_sub(1),
                values.len()
            )));
        }
        if !(knots[0] > 0.0) || knots.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidPath("knots must be finite and start above 0".into()));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidPath("knots must be strictly increasing".into()));
        }
        let d = values[0].nrows();
        if values.iter().any(|v| v.nrows() != d || v.ncols() != d) {
            return Err(Error::InvalidPath("step values must share one square shape".into()));
        }
        Ok(Self { knots, values })
    }

    /// `steps + 1` geometrically spaced knots from `1/k` to `m`.
    pub fn geometric_knots(k: f64, m: f64, steps: usize) -> Result<Vec<f64>> {
        if !(k > 0.0 && m > 1.0 / k && m.is_finite()) || steps == 0 {
            return Err(Error::InvalidPath(format!("need k > 0, m > 1/k, steps > 0 (k={k}, m={m})")));
        }
        let (lo, hi) = ((1.0 / k).ln(), m.ln());
        let mut knots: Vec<f64> = (0..=steps)
            .map(|i| (lo + (hi - lo) * i as f64 / steps as f64).exp())
            .collect();
        knots[0] = 1.0 / k;
        knots[steps] = m;
        Ok(knots)
    }

    /// Samples `f` at the geometric midpoint of each step.
    pub fn from_fn(k: f64, m: f64, steps: usize, mut f: impl FnMut(f64) -> CMatrix) -> Result<Self> {
        let knots = Self::geometric_knots(k, m, steps)?;
        let values = knots.windows(2).map(|w| f((w[0] * w[1]).sqrt())).collect();
        Self::new(knots, values)
    }

    /// Scalar path for the pair `(ω, λω)`: on each step the constant that
    /// minimizes `x² ln(t1/t0) + λ(1-x)²(1/t0 - 1/t1)`, i.e. the exact optimum
    /// `λ/(λ+t)` averaged against the step's weights.
    pub fn scalar(lambda: f64, k: f64, m: f64, steps: usize, dim: usize) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidPath(format!("lambda {lambda} must be positive")));
        }
        let knots = Self::geometric_knots(k, m, steps)?;
        let id = CMatrix::identity(dim, dim);
        let values = knots
            .windows(2)
            .map(|w| {
                let a = (w[1] / w[0]).ln();
                let b = 1.0 / w[0] - 1.0 / w[1];
                &id * C64::new(lambda * b / (a + lambda * b), 0.0)
            })
            .collect();
        Self::new(knots, values)
    }

    /// `x_t = 0` on `[1/k, m]`.
    pub fn zero(k: f64, m: f64, dim: usize) -> Result<Self> {
        let knots = Self::geometric_knots(k, m, 1)?;
        Self::new(knots, vec![CMatrix::zeros(dim, dim)])
    }

    /// `x_t = (σ + tρ)^{-1} σ`, the operator analogue of `λ/(λ+t)`.
    pub fn operator(
        rho: &DensityMatrix,
        sigma: &PositiveMatrix,
        k: f64,
        m: f64,
        steps: usize,
    ) -> Result<Self> {
        let (r, s) = (rho.matrix(), sigma.matrix());
        let mut failed = false;
        let path = Self::from_fn(k, m, steps, |t| {
            match (s + r * C64::new(t, 0.0)).try_inverse() {
                Some(inv) => inv * s,
                None => {
                    failed = true;
                    CMatrix::zeros(r.nrows(), r.ncols())
                }
            }
        });
        if failed {
            return Err(Error::InvalidPath("σ + tρ is singular".into()));
        }
        path
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[CMatrix] {
        &self.values
    }

    /// Resolution `k` with first knot `1/k`.
    pub fn resolution(&self) -> f64 {
        1.0 / self.knots[0]
    }

    /// Horizon `m` beyond which `x_t = 0`.
    pub fn horizon(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    pub fn dim(&self) -> usize {
        self.values[0].nrows()
    }
}

/// `ln k - Σ_steps [Tr(ρ x* x) ln(t1/t0) + Tr(σ y y*)(1/t0 - 1/t1)] - Tr σ / m`.
pub fn kosaki_lower_bound(rho: &DensityMatrix, sigma: &PositiveMatrix, path: &StepPath) -> Result<f64> {
    if rho.dim() != sigma.dim() || path.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: if path.dim() != rho.dim() { path.dim() } else { sigma.dim() },
        });
    }
    let (r, s) = (rho.matrix(), sigma.matrix());
    let id = CMatrix::identity(rho.dim(), rho.dim());
    let mut terms = Vec::with_capacity(path.values.len() + 2);
    terms.push(path.resolution().ln());
    for (w, x) in path.knots.windows(2).zip(&path.values) {
        let y = &id - x;
        let alpha = real_trace(&(r * x.adjoint() * x));
        let beta = real_trace(&(s * &y * y.adjoint()));
        terms.push(-alpha * (w[1] / w[0]).ln());
        terms.push(-beta * (1.0 / w[0] - 1.0 / w[1]));
    }
    terms.push(-sigma.trace() / path.horizon());
    Ok(crate::quadrature::compensated_sum(terms))
}
