//! Singular-integral machinery for the Hardy-projection kernel restricted to
//! a multi-interval `I`: the phase function `Z`, the resolvent kernel, the
//! continuous kernel `G(t, x, y)`, and the kernel `K` whose trace over a
//! sub-collection `I1` of components gives that collection's share of the
//! mutual information.
//!
//! The improper `t`-integrals over `(1/2, ∞)` are evaluated after the
//! substitution `u = ln((t - 1/2)/(t + 1/2))`, which maps them onto `(-∞, 0)`
//! with an integrand decaying like `|u| e^u`. The infinite end is cut at a
//! window `-U` whose tail bound is below a tenth of the absolute tolerance.

use std::f64::consts::PI;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Interval, MultiInterval};
use crate::quadrature::{compensated_sum, integrate, QuadResult, QuadratureConfig};

fn check_interior(x: f64, region: &MultiInterval, op: &'static str) -> Result<usize> {
    region
        .component_of(x)
        .ok_or_else(|| Error::domain(op, format!("point {x} is not interior to {:?}", region.pairs())))
}

/// `Z(x) = ln(-Π(x - a_i) / Π(x - b_i))` for `x` inside a component of `I`.
pub fn z_function(x: f64, region: &MultiInterval) -> Result<f64> {
    check_interior(x, region, "z_function")?;
    Ok(z_unchecked(x, region.parts()))
}

/// `Z'(x) = Σ 1/(x - a_i) - Σ 1/(x - b_i)`, positive inside `I`.
pub fn z_prime(x: f64, region: &MultiInterval) -> Result<f64> {
    check_interior(x, region, "z_prime")?;
    Ok(z_prime_unchecked(x, region.parts()))
}

// The log argument is a product of positive factors |x - a|/|x - b| up to the
// overall sign, so sums of logs avoid overflow for many components.
fn z_unchecked(x: f64, parts: &[Interval]) -> f64 {
    compensated_sum(parts.iter().map(|p| (x - p.a()).abs().ln() - (x - p.b()).abs().ln()))
}

fn z_prime_unchecked(x: f64, parts: &[Interval]) -> f64 {
    compensated_sum(parts.iter().map(|p| 1.0 / (x - p.a()) - 1.0 / (x - p.b())))
}

/// `ln((β - 1/2)/(β + 1/2))` for `|β| > 1/2`.
pub fn log_ratio(beta: f64) -> f64 {
    ((beta - 0.5) / (beta + 0.5)).ln()
}

/// Non-delta part of the resolvent `(C - 1/2 + β)^{-1}` on `I`:
/// `(β² - 1/4)^{-1} (i/2π) exp(-(i/2π) ln((β-1/2)/(β+1/2)) (Z(x) - Z(y))) / (x - y)`.
pub fn resolvent_kernel_regular_part(
    beta: f64,
    x: f64,
    y: f64,
    region: &MultiInterval,
) -> Result<Complex<f64>> {
    if !(beta.abs() > 0.5) {
        return Err(Error::domain(
            "resolvent_kernel_regular_part",
            format!("|beta| = {} must exceed 1/2", beta.abs()),
        ));
    }
    if x == y {
        return Err(Error::domain("resolvent_kernel_regular_part", "coincident points"));
    }
    let dz = z_function(x, region)? - z_function(y, region)?;
    let phase = -log_ratio(beta) * dz / (2.0 * PI);
    let pref = 1.0 / ((beta * beta - 0.25) * 2.0 * PI * (x - y));
    Ok(Complex::new(0.0, pref) * Complex::from_polar(1.0, phase))
}

/// Full region `I`, the sub-collection `I1` whose trace is taken, the
/// regularization `ε₀ >= 0`, and quadrature settings.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConfig {
    region: MultiInterval,
    sub: MultiInterval,
    rest: MultiInterval,
    eps0: f64,
    quad: QuadratureConfig,
}

impl KernelConfig {
    pub fn new(
        region: MultiInterval,
        sub: MultiInterval,
        eps0: f64,
        quad: QuadratureConfig,
    ) -> Result<Self> {
        if region.geometry() != Geometry::Line || sub.geometry() != Geometry::Line {
            return Err(Error::domain("kernel_config", "kernel traces are defined on the line"));
        }
        if !(eps0 >= 0.0 && eps0.is_finite()) {
            return Err(Error::domain("kernel_config", format!("eps0 {eps0} must be >= 0")));
        }
        quad.validate()?;
        for p in sub.parts() {
            if !region.parts().contains(p) {
                return Err(Error::domain(
                    "kernel_config",
                    format!("({}, {}) is not a component of the full region", p.a(), p.b()),
                ));
            }
        }
        let rest: Vec<Interval> = region
            .parts()
            .iter()
            .filter(|p| !sub.parts().contains(p))
            .copied()
            .collect();
        let rest = MultiInterval::from_intervals(rest, Geometry::Line)?;
        Ok(Self {
            region,
            sub,
            rest,
            eps0,
            quad,
        })
    }

    /// Configuration with `I = I1 ∪ I2` for separated `I1`, `I2`.
    pub fn from_split(
        sub: &MultiInterval,
        rest: &MultiInterval,
        eps0: f64,
        quad: QuadratureConfig,
    ) -> Result<Self> {
        Self::new(sub.union_disjoint(rest)?, sub.clone(), eps0, quad)
    }

    /// Same region with the roles of `I1` and its complement exchanged.
    pub fn swapped(&self) -> Result<Self> {
        Self::new(self.region.clone(), self.rest.clone(), self.eps0, self.quad)
    }

    pub fn with_eps0(&self, eps0: f64) -> Result<Self> {
        Self::new(self.region.clone(), self.sub.clone(), eps0, self.quad)
    }

    pub fn region(&self) -> &MultiInterval {
        &self.region
    }

    pub fn sub(&self) -> &MultiInterval {
        &self.sub
    }

    /// Components of `I` not in `I1`.
    pub fn rest(&self) -> &MultiInterval {
        &self.rest
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn quad(&self) -> &QuadratureConfig {
        &self.quad
    }

    /// `Z_{I,I1}(x) = Z_I(x) - Z_{I1}(x)`, evaluated directly from the
    /// components of `I2`; smooth on the closure of `I1`.
    pub fn z_relative(&self, x: f64) -> f64 {
        z_unchecked(x, self.rest.parts())
    }

    /// Derivative of [`Self::z_relative`].
    pub fn z_relative_prime(&self, x: f64) -> f64 {
        z_prime_unchecked(x, self.rest.parts())
    }

    /// `M = sup |Z_{I,I1}'|` over the closure of `I1`. Each term of
    /// `|Z_{I,I1}'|` is convex on a component of `I1`, so the supremum is
    /// attained at an endpoint.
    pub fn lipschitz_constant(&self) -> f64 {
        self.sub
            .parts()
            .iter()
            .flat_map(|p| [p.a(), p.b()])
            .map(|x| self.z_relative_prime(x).abs())
            .fold(0.0, f64::max)
    }

    fn check_sub_interior(&self, x: f64, op: &'static str) -> Result<()> {
        check_interior(x, &self.sub, op).map(|_| ())
    }
}

/// `G` as a function of `u = ln((t - 1/2)/(t + 1/2))`.
fn g_kernel_u(u: f64, x: f64, y: f64, cfg: &KernelConfig) -> f64 {
    let s = u / (2.0 * PI);
    if x == y {
        return s * cfg.z_relative_prime(x);
    }
    // sin a - sin b = 2 cos((a+b)/2) sin((a-b)/2), with a - b taken from the
    // smooth difference Z_{I,I1} to avoid cancelling two singular terms.
    let dz_full = z_unchecked(x, cfg.region.parts()) - z_unchecked(y, cfg.region.parts());
    let dz_sub = z_unchecked(x, cfg.sub.parts()) - z_unchecked(y, cfg.sub.parts());
    let dz_rel = cfg.z_relative(x) - cfg.z_relative(y);
    2.0 * (0.5 * s * (dz_full + dz_sub)).cos() * (0.5 * s * dz_rel).sin() / (x - y)
}

/// `G(t, x, y) = [sin(s(Z_I(x) - Z_I(y))) - sin(s(Z_{I1}(x) - Z_{I1}(y)))] / (x - y)`
/// with `s = ln((t-1/2)/(t+1/2)) / 2π`, and `s (Z_I'(x) - Z_{I1}'(x))` on the diagonal.
pub fn g_kernel(t: f64, x: f64, y: f64, cfg: &KernelConfig) -> Result<f64> {
    if !(t > 0.5) {
        return Err(Error::domain("g_kernel", format!("t = {t} must exceed 1/2")));
    }
    cfg.check_sub_interior(x, "g_kernel")?;
    cfg.check_sub_interior(y, "g_kernel")?;
    Ok(g_kernel_u(log_ratio(t), x, y, cfg))
}

/// `t(u) - 1/2 = e^u / (1 - e^u)`.
fn t_minus_half(u: f64) -> f64 {
    u.exp() / -u.exp_m1()
}

/// Window `U` such that `c · (U + 1) e^{-U} / (1 - e^{-U}) <= target`.
fn tail_window(c: f64, target: f64) -> f64 {
    let mut u: f64 = 1.0;
    while c * (u + 1.0) * (-u).exp() / -(-u).exp_m1() > target && u < 700.0 {
        u += 0.5;
    }
    u
}

/// Upper `u` limit from an optional finite `t` cutoff.
fn upper_u(quad: &QuadratureConfig) -> f64 {
    quad.t_truncation.map_or(0.0, log_ratio)
}

/// Regularized kernel
/// `K^{ε₀}(x, y) = (1/π) ∫_{(1+2ε₀)/2}^∞ (t/(1+2ε₀) - 1/2)/(t² - 1/4) G(t, x, y) dt`,
/// evaluated in the `u` variable where `dt/(t² - 1/4) = du`.
pub fn k_kernel(x: f64, y: f64, cfg: &KernelConfig) -> Result<QuadResult> {
    cfg.check_sub_interior(x, "k_kernel")?;
    cfg.check_sub_interior(y, "k_kernel")?;
    k_kernel_unchecked(x, y, cfg, cfg.quad.abs_tol)
}

fn k_kernel_unchecked(x: f64, y: f64, cfg: &KernelConfig, abs_tol: f64) -> Result<QuadResult> {
    let eps0 = cfg.eps0;
    let scale = 1.0 + 2.0 * eps0;
    let weight = |u: f64| (t_minus_half(u) - eps0) / scale;
    // |w G| <= e^u/(1-e^u) |u| M / 2π near -∞.
    let m = cfg.lipschitz_constant().max(1e-300);
    let window = -tail_window(m / (2.0 * PI * PI), abs_tol / 10.0);
    let lower = if eps0 > 0.0 {
        (eps0 / (1.0 + eps0)).ln().max(window)
    } else {
        window
    };
    let upper = upper_u(&cfg.quad);
    let quad = cfg.quad.with_abs_tol(abs_tol);
    let r = integrate(|u| weight(u) * g_kernel_u(u, x, y, cfg), lower, upper, &quad)?;
    Ok(QuadResult {
        value: r.value / PI,
        abs_err: r.abs_err / PI,
        subdivisions: r.subdivisions,
    })
}

/// Diagonal `K^{ε₀}(x, x)`; for `ε₀ = 0` this is `-(1/12)(Z_I'(x) - Z_{I1}'(x))`.
pub fn k0_diagonal(x: f64, cfg: &KernelConfig) -> Result<f64> {
    Ok(k_kernel(x, x, cfg)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelTrace {
    pub numeric: f64,
    pub closed_form: f64,
    pub abs_err: f64,
    pub subdivisions: usize,
}

/// `(1/12) Σ_{(a_i,b_i) ∈ I2, (a_j,b_j) ∈ I1} ln[(a_j - a_i)(b_j - b_i) / ((b_j - a_i)(a_j - b_i))]`.
pub fn kernel_trace_closed_form(cfg: &KernelConfig) -> f64 {
    let mut terms = Vec::new();
    for i in cfg.rest.parts() {
        for j in cfg.sub.parts() {
            let num = (j.a() - i.a()) * (j.b() - i.b());
            let den = (j.b() - i.a()) * (j.a() - i.b());
            terms.push((num / den).ln());
        }
    }
    compensated_sum(terms) / 12.0
}

/// Trace `∫_{I1} K^{ε₀}(x, x) dx` by nested quadrature, alongside the closed
/// form of the `ε₀ -> 0` limit.
pub fn k0_trace(cfg: &KernelConfig) -> Result<KernelTrace> {
    if cfg.rest.is_empty() || cfg.sub.is_empty() {
        return Err(Error::domain(
            "k0_trace",
            "needs a nonempty sub-collection and a nonempty complement",
        ));
    }
    let total_len: f64 = cfg.sub.parts().iter().map(Interval::length).sum();
    let n = cfg.sub.len() as f64;
    let inner_tol = cfg.quad.abs_tol / (10.0 * total_len.max(1.0));
    let outer = cfg.quad.with_abs_tol(cfg.quad.abs_tol / (2.0 * n));
    let mut values = Vec::new();
    let mut abs_err = 0.0;
    let mut subdivisions = 0;
    for p in cfg.sub.parts() {
        let failure = std::cell::Cell::new(None);
        let r = integrate(
            |x| match k_kernel_unchecked(x, x, cfg, inner_tol) {
                Ok(v) => v.value,
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            },
            p.a(),
            p.b(),
            &outer,
        );
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let r = r?;
        values.push(r.value);
        abs_err += r.abs_err + inner_tol * p.length();
        subdivisions += r.subdivisions;
    }
    Ok(KernelTrace {
        numeric: compensated_sum(values),
        closed_form: kernel_trace_closed_form(cfg),
        abs_err,
        subdivisions,
    })
}

/// Integrand `u e^u / (1 - e^u)` of the dilogarithm integral.
pub fn dilog_integrand(u: f64) -> f64 {
    u * u.exp() / -u.exp_m1()
}

/// `∫_{-∞}^0 u e^u / (1 - e^u) du = -π²/6`.
pub fn dilog_integral(quad: &QuadratureConfig) -> Result<f64> {
    quad.validate()?;
    let window = -tail_window(1.0, quad.abs_tol / 10.0);
    Ok(integrate(dilog_integrand, window, upper_u(quad), quad)?.value)
}

/// `-(1/2π²) ∫_{1/2}^∞ ln((t-1/2)/(t+1/2)) / (t + 1/2) dt = 1/12`, computed in
/// the variable `s = (t - 1/2)/(t + 1/2) ∈ (0, 1)` where the integrand becomes
/// `ln s / (1 - s)`. A finite `t_truncation` cuts the upper limit.
pub fn t_profile_integral(quad: &QuadratureConfig) -> Result<f64> {
    quad.validate()?;
    let upper = quad
        .t_truncation
        .map_or(1.0, |t| (t - 0.5) / (t + 0.5));
    let r = integrate(|s: f64| s.ln() / (1.0 - s), 0.0, upper, quad)?;
    Ok(-r.value / (2.0 * PI * PI))
}

/// Spectral bounds `[ε₀/(1+2ε₀), (1+ε₀)/(1+2ε₀)]` of `E = (C + ε₀)/(1 + 2ε₀)`.
pub fn regularized_spectrum_bounds(eps0: f64) -> Result<(f64, f64)> {
    if !(eps0 > 0.0 && eps0.is_finite()) {
        return Err(Error::domain(
            "regularized_spectrum_bounds",
            format!("eps0 {eps0} must be > 0"),
        ));
    }
    let den = 1.0 + 2.0 * eps0;
    Ok((eps0 / den, (1.0 + eps0) / den))
}
