//! Globally adaptive 21-point Gauss–Kronrod integration on finite intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and limits for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Finite upper cutoff for the improper `t`-integrals; `None` integrates to infinity.
    pub t_truncation: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
            t_truncation: None,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::domain("quadrature", "tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::domain("quadrature", "max_subdivisions must be positive"));
        }
        if let Some(t) = self.t_truncation {
            if !(t > 0.5) {
                return Err(Error::domain("quadrature", "t_truncation must exceed 1/2"));
            }
        }
        Ok(())
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub subdivisions: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_034_589_436,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();
    let mut fv = [(0.0, 0.0); 10];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        *slot = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, err }
}

/// Neumaier-compensated sum in the given order.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Integrate `f` over `[a, b]`, bisecting the segment with the largest error
/// estimate until the total estimate is within `max(abs_tol, rel_tol·|I|)`.
///
/// The integrand is never evaluated at `a` or `b`. Results depend only on the
/// integrand and the configuration.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_err: 0.0,
            subdivisions: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integrate", "limits must be finite"));
    }
    let mut segments = vec![gk21(&f, a, b)];
    loop {
        let total = compensated_sum(segments.iter().map(|s| s.value));
        let err = compensated_sum(segments.iter().map(|s| s.err));
        if !total.is_finite() {
            return Err(Error::QuadratureFailure {
                subdivisions: segments.len(),
                abs_err: f64::INFINITY,
            });
        }
        if err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            segments.sort_by(|x, y| x.a.total_cmp(&y.a));
            return Ok(QuadResult {
                value: compensated_sum(segments.iter().map(|s| s.value)),
                abs_err: err,
                subdivisions: segments.len(),
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("at least one segment");
        let s = segments[worst];
        let mid = 0.5 * (s.a + s.b);
        if segments.len() >= cfg.max_subdivisions || !(s.a < mid && mid < s.b) {
            return Err(Error::QuadratureFailure {
                subdivisions: segments.len(),
                abs_err: err,
            });
        }
        segments[worst] = gk21(&f, s.a, mid);
        segments.push(gk21(&f, mid, s.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, &QuadratureConfig::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert_relative_eq!(r.value, exact, epsilon = 1e-13);
        assert_eq!(r.subdivisions, 1);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫_0^1 ln x dx = -1 with a log singularity at 0.
        let r = integrate(|x: f64| x.ln(), 0.0, 1.0, &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(r.value, -1.0, epsilon = 1e-10);
        assert!(r.subdivisions > 1);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let cfg = QuadratureConfig::default();
        let f = |x: f64| x.sin();
        let fwd = integrate(f, 0.0, 2.0, &cfg).unwrap().value;
        let rev = integrate(f, 2.0, 0.0, &cfg).unwrap().value;
        assert_relative_eq!(fwd, -rev, epsilon = 1e-14);
    }

    #[test]
    fn failure_when_budget_exhausted() {
        let cfg = QuadratureConfig {
            max_subdivisions: 3,
            ..Default::default()
        };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &cfg);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn validate_rejects_bad_config() {
        assert!(QuadratureConfig::default().validate().is_ok());
        assert!(QuadratureConfig::default().with_abs_tol(0.0).validate().is_err());
        let t = QuadratureConfig {
            t_truncation: Some(0.4),
            ..Default::default()
        };
        assert!(t.validate().is_err());
    }
}
