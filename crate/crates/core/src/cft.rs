//! Closed-form entropy functions of `r` chiral free fermions.
//!
//! All entropies are in nats. The regularized entropy `G` of a multi-interval
//! carries the `r/6` prefactor, so the mutual information of two regions with
//! disjoint closures is `F(A, B) = G(A) + G(B) - G(A ∪ B)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cross_ratio_in, Interval, MultiInterval};

/// Number of free fermions, `r >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FermionCount(u32);

impl FermionCount {
    pub const ONE: FermionCount = FermionCount(1);

    pub fn new(r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::domain("fermion_count", "r must be at least 1"));
        }
        Ok(Self(r))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// The `r/6` prefactor of every closed form.
    pub fn prefactor(self) -> f64 {
        f64::from(self.0) / 6.0
    }
}

impl TryFrom<u32> for FermionCount {
    type Error = Error;
    fn try_from(r: u32) -> Result<Self> {
        Self::new(r)
    }
}

impl From<FermionCount> for u32 {
    fn from(r: FermionCount) -> u32 {
        r.0
    }
}

/// Global index `μ` and Jones index of a finite-index subnet, with `μ = index²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubnetParams {
    mu: f64,
    index: f64,
}

impl SubnetParams {
    pub const TRIVIAL: SubnetParams = SubnetParams { mu: 1.0, index: 1.0 };

    pub fn from_index(index: f64) -> Result<Self> {
        if !(index.is_finite() && index >= 1.0) {
            return Err(Error::domain("subnet", format!("index {index} must be >= 1")));
        }
        Ok(Self {
            mu: index * index,
            index,
        })
    }

    pub fn from_mu(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 1.0) {
            return Err(Error::domain("subnet", format!("mu {mu} must be >= 1")));
        }
        Ok(Self {
            mu,
            index: mu.sqrt(),
        })
    }

    /// Both values given; they must satisfy `mu = index²` to relative 1e-12.
    pub fn new(mu: f64, index: f64) -> Result<Self> {
        let p = Self::from_index(index)?;
        if ((p.mu - mu) / mu).abs() > 1e-12 {
            return Err(Error::domain(
                "subnet",
                format!("mu {mu} is not the square of index {index}"),
            ));
        }
        Ok(p)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn index(&self) -> f64 {
        self.index
    }
}

/// Which of the three routes produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Method {
    ClosedForm,
    Lattice,
    KernelTrace,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::ClosedForm => "ClosedForm",
            Method::Lattice => "Lattice",
            Method::KernelTrace => "KernelTrace",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subdivisions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
}

/// One entropy-type value together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub value: f64,
    pub method: Method,
    pub inputs: String,
    pub diagnostics: Diagnostics,
}

/// Regularized entropy `G(I) = (r/6)[Σ_{i,j} ln|b_i - a_j| - Σ_{i<j} ln|a_i - a_j| - Σ_{i<j} ln|b_i - b_j|]`,
/// with chordal distances on the circle and `G(∅) = 0`.
pub fn g_value(region: &MultiInterval, r: FermionCount) -> f64 {
    let geo = region.geometry();
    let ln_d = |x: f64, y: f64| geo.distance(x, y).ln();
    let parts = region.parts();
    let mut total = 0.0;
    for p in parts {
        for q in parts {
            total += ln_d(p.b(), q.a());
        }
    }
    for (i, p) in parts.iter().enumerate() {
        for q in &parts[i + 1..] {
            total -= ln_d(p.a(), q.a()) + ln_d(p.b(), q.b());
        }
    }
    r.prefactor() * total
}

fn describe(a: &MultiInterval, b: &MultiInterval) -> String {
    format!("A={:?} B={:?}", a.pairs(), b.pairs())
}

/// `F(A, B) = G(A) + G(B) - G(A ∪ B)` for regions with disjoint closures.
pub fn mutual_information_exact(
    a: &MultiInterval,
    b: &MultiInterval,
    r: FermionCount,
) -> Result<EntropyReport> {
    let union = a.union_disjoint(b)?;
    let value = if a.is_empty() || b.is_empty() {
        0.0
    } else {
        g_value(a, r) + g_value(b, r) - g_value(&union, r)
    };
    let eta = match (a.parts(), b.parts()) {
        ([x], [y]) => Some(cross_ratio_in(a.geometry(), x, y)?),
        _ => None,
    };
    Ok(EntropyReport {
        value,
        method: Method::ClosedForm,
        inputs: format!("{} r={}", describe(a, b), r.get()),
        diagnostics: Diagnostics {
            eta,
            ..Default::default()
        },
    })
}

/// `F(X, Y) = G(X) + G(Y) - G(X ∪ Y) - G(X ∩ Y)` for regions on the line
/// that may overlap.
pub fn mutual_information_overlapping(
    x: &MultiInterval,
    y: &MultiInterval,
    r: FermionCount,
) -> Result<f64> {
    let union = x.union(y)?;
    let inter = x.intersection(y)?;
    Ok(g_value(x, r) + g_value(y, r) - g_value(&union, r) - g_value(&inter, r))
}

/// Two-interval mutual information from the cross ratio, `-(r/6) ln η`.
pub fn mi_from_cross_ratio(eta: f64, r: FermionCount) -> Result<f64> {
    check_unit_open(eta, "mi_from_cross_ratio")?;
    Ok(-r.prefactor() * eta.ln())
}

fn f_value(a: &MultiInterval, b: &MultiInterval, r: FermionCount) -> Result<f64> {
    Ok(mutual_information_exact(a, b, r)?.value)
}

/// `F(A ∪ B, A ∪ C)` for pairwise separated `A`, `B`, `C`, evaluated through
/// `F(A, B ∪ C) + F(B, C) - F(A, C) - F(A, B)`.
pub fn extended_mi(
    a: &MultiInterval,
    b: &MultiInterval,
    c: &MultiInterval,
    r: FermionCount,
) -> Result<f64> {
    // Validates pairwise separation.
    a.union_disjoint(b)?.union_disjoint(c)?;
    let bc = b.union_disjoint(c)?;
    Ok(f_value(a, &bc, r)? + f_value(b, c, r)? - f_value(a, c, r)? - f_value(a, b, r)?)
}

/// `F(η) - F(1 - η) = -(r/6) ln(η / (1 - η))`.
pub fn duality_gap(eta: f64, r: FermionCount) -> Result<f64> {
    check_unit_open(eta, "duality_gap")?;
    Ok(-r.prefactor() * (eta / (1.0 - eta)).ln())
}

fn check_unit_open(eta: f64, op: &'static str) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::domain(op, format!("cross ratio {eta} outside (0, 1)")));
    }
    Ok(())
}

/// Leading behaviour of `F(B, C)` for `B = (a1, a2 - ε)`, `C = (a2, b2)` as
/// `ε -> 0` in a subnet of global index `μ`:
/// `(r/6)(ln|a2 - a1| + ln|b2 - a2| - ln|b2 - a1| - ln ε) - ½ ln μ`.
pub fn singular_limit_mi(
    a1: f64,
    a2: f64,
    b2: f64,
    eps: f64,
    r: FermionCount,
    sub: SubnetParams,
) -> Result<f64> {
    if !(a1 < a2 && a2 < b2) {
        return Err(Error::domain(
            "singular_limit_mi",
            format!("need a1 < a2 < b2, got {a1}, {a2}, {b2}"),
        ));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain("singular_limit_mi", format!("eps {eps} must be > 0")));
    }
    let geometric = (a2 - a1).ln() + (b2 - a2).ln() - (b2 - a1).ln() - eps.ln();
    Ok(r.prefactor() * geometric - 0.5 * sub.mu.ln())
}

/// Limit of the relative entropy between the state and its conditional
/// expectation onto the subnet as the gap closes: `ln [A:B] = ½ ln μ`.
pub fn index_limit(sub: SubnetParams) -> f64 {
    sub.index.ln()
}

/// `F(A^c, B^c)` on the circle for separated arcs `A`, `B`, through
/// `G(A^c) + G(B^c) - G(A^c ∪ B^c) - G(A^c ∩ B^c)` with `A^c ∪ B^c` the whole
/// circle (`G = 0` there, matching `G(X) = G(X^c)`) and
/// `A^c ∩ B^c = (A ∪ B)^c`.
pub fn mutual_information_complements(
    a: &MultiInterval,
    b: &MultiInterval,
    r: FermionCount,
) -> Result<f64> {
    let ac = a.complement()?;
    let bc = b.complement()?;
    let gaps = a.union_disjoint(b)?.complement()?;
    Ok(g_value(&ac, r) + g_value(&bc, r) - g_value(&gaps, r))
}

/// Pair of unit intervals on the line realizing cross ratio `η`:
/// `A = (0, 1)`, `B = (1 + g, 2 + g)` with `η = 1 - 1/(1 + g)²`.
pub fn intervals_with_cross_ratio(eta: f64) -> Result<(MultiInterval, MultiInterval)> {
    check_unit_open(eta, "intervals_with_cross_ratio")?;
    let g = 1.0 / (1.0 - eta).sqrt() - 1.0;
    let a = MultiInterval::single(Interval::new(0.0, 1.0)?);
    let b = MultiInterval::single(Interval::new(1.0 + g, 2.0 + g)?);
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityRow {
    pub eta: f64,
    pub f_eta: f64,
    pub f_complement: f64,
    pub duality_gap: f64,
}

/// Sweep `F(η)`, `F(1 - η)` (each from realized intervals) and the formula gap.
pub fn duality_scan(etas: &[f64], r: FermionCount) -> Result<Vec<DualityRow>> {
    etas.iter()
        .map(|&eta| {
            let (a, b) = intervals_with_cross_ratio(eta)?;
            let (ac, bc) = intervals_with_cross_ratio(1.0 - eta)?;
            Ok(DualityRow {
                eta,
                f_eta: f_value(&a, &b, r)?,
                f_complement: f_value(&ac, &bc, r)?,
                duality_gap: duality_gap(eta, r)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::normalize;
    use approx::assert_relative_eq;

    fn r(n: u32) -> FermionCount {
        FermionCount::new(n).unwrap()
    }

    #[test]
    fn g_value_examples() {
        assert_eq!(g_value(&normalize(&[(0.0, 1.0)]).unwrap(), r(1)), 0.0);
        let e6 = 6f64.exp();
        assert_relative_eq!(g_value(&normalize(&[(0.0, e6)]).unwrap(), r(1)), 1.0, epsilon = 1e-14);
        let two = normalize(&[(0.0, 1.0), (2.0, 3.0)]).unwrap();
        let expected = (3f64.ln() - 2.0 * 2f64.ln()) / 6.0;
        assert_relative_eq!(g_value(&two, r(1)), expected, epsilon = 1e-15);
        assert_relative_eq!(g_value(&two, r(1)), -0.047947, epsilon = 1e-6);
        assert_eq!(g_value(&normalize(&[]).unwrap(), r(3)), 0.0);
    }

    #[test]
    fn mutual_information_examples() {
        let a = normalize(&[(0.0, 1.0)]).unwrap();
        let b = normalize(&[(2.0, 3.0)]).unwrap();
        let f1 = mutual_information_exact(&a, &b, r(1)).unwrap();
        assert_relative_eq!(f1.value, (4.0f64 / 3.0).ln() / 6.0, epsilon = 1e-15);
        assert_relative_eq!(f1.value, 0.047947, epsilon = 1e-6);
        assert_eq!(f1.diagnostics.eta, Some(0.75));
        let f2 = mutual_information_exact(&a, &b, r(2)).unwrap();
        assert_relative_eq!(f2.value, 2.0 * f1.value, epsilon = 1e-15);

        let far = normalize(&[(1e8, 1e8 + 1.0)]).unwrap();
        assert!(mutual_information_exact(&a, &far, r(1)).unwrap().value < 1e-15);

        let touching = normalize(&[(1.0, 2.0)]).unwrap();
        assert!(matches!(
            mutual_information_exact(&a, &touching, r(1)),
            Err(Error::TouchingIntervals { .. })
        ));
        let empty = normalize(&[]).unwrap();
        assert_eq!(mutual_information_exact(&a, &empty, r(1)).unwrap().value, 0.0);
    }

    #[test]
    fn extended_mi_examples() {
        let a = normalize(&[(0.0, 1.0)]).unwrap();
        let b = normalize(&[(2.0, 3.0)]).unwrap();
        let c = normalize(&[(4.0, 5.0)]).unwrap();
        let empty = normalize(&[]).unwrap();
        // F(A ∪ ∅, A ∪ C) = F(A, A ∪ C) = 0.
        assert!(extended_mi(&a, &empty, &c, r(1)).unwrap().abs() < 1e-15);
        let v = extended_mi(&a, &b, &c, r(1)).unwrap();
        assert!(v >= 0.0);
        let wider = normalize(&[(4.0, 6.0)]).unwrap();
        assert!(extended_mi(&a, &b, &wider, r(1)).unwrap() >= v);

        let ab = a.union(&b).unwrap();
        let ac = a.union(&c).unwrap();
        let direct = mutual_information_overlapping(&ab, &ac, r(1)).unwrap();
        assert_relative_eq!(v, direct, epsilon = 1e-14);
    }

    #[test]
    fn duality_gap_examples() {
        assert_eq!(duality_gap(0.5, r(1)).unwrap(), 0.0);
        assert_relative_eq!(duality_gap(0.75, r(1)).unwrap(), -(3f64.ln()) / 6.0, epsilon = 1e-15);
        assert_relative_eq!(duality_gap(0.75, r(1)).unwrap(), -0.183102, epsilon = 1e-6);
        assert!(duality_gap(0.0, r(1)).is_err());
        assert!(duality_gap(1.0, r(1)).is_err());

        let (a, b) = intervals_with_cross_ratio(0.75).unwrap();
        let (c, d) = intervals_with_cross_ratio(0.25).unwrap();
        let diff = mutual_information_exact(&a, &b, r(1)).unwrap().value
            - mutual_information_exact(&c, &d, r(1)).unwrap().value;
        assert_relative_eq!(diff, duality_gap(0.75, r(1)).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn singular_limit_examples() {
        let eps = (-6f64).exp();
        let v1 = singular_limit_mi(0.0, 1.0, 2.0, eps, r(1), SubnetParams::TRIVIAL).unwrap();
        assert_relative_eq!(v1, (6.0 - 2f64.ln()) / 6.0, epsilon = 1e-14);
        assert_relative_eq!(v1, 0.884475, epsilon = 1e-6);
        let v4 = singular_limit_mi(0.0, 1.0, 2.0, eps, r(1), SubnetParams::from_mu(4.0).unwrap())
            .unwrap();
        assert_relative_eq!(v1 - v4, 2f64.ln(), epsilon = 1e-14);
        assert!(singular_limit_mi(1.0, 0.0, 2.0, eps, r(1), SubnetParams::TRIVIAL).is_err());
        assert!(singular_limit_mi(0.0, 1.0, 2.0, 0.0, r(1), SubnetParams::TRIVIAL).is_err());
    }

    #[test]
    fn singular_limit_matches_exact_at_small_gap() {
        // μ = 1: the asymptotic form against the exact F(B_ε, C).
        for &eps in &[1e-4, 1e-6, 1e-8] {
            let b = normalize(&[(0.0, 1.0 - eps)]).unwrap();
            let c = normalize(&[(1.0, 2.0)]).unwrap();
            let exact = mutual_information_exact(&b, &c, r(1)).unwrap().value;
            let asym = singular_limit_mi(0.0, 1.0, 2.0, eps, r(1), SubnetParams::TRIVIAL).unwrap();
            assert!((exact - asym).abs() < 2.0 * eps, "eps={eps}: {exact} vs {asym}");
        }
    }

    #[test]
    fn index_limit_examples() {
        assert_eq!(index_limit(SubnetParams::TRIVIAL), 0.0);
        assert_relative_eq!(index_limit(SubnetParams::from_index(2.0).unwrap()), 2f64.ln());
        assert_relative_eq!(index_limit(SubnetParams::from_mu(4.0).unwrap()), 2f64.ln());
        assert!(SubnetParams::new(4.0, 2.0).is_ok());
        assert!(SubnetParams::new(5.0, 2.0).is_err());
        assert!(SubnetParams::from_mu(0.5).is_err());
    }

    #[test]
    fn fermion_count_rejects_zero() {
        assert!(FermionCount::new(0).is_err());
        assert!(serde_json::from_str::<FermionCount>("0").is_err());
        assert_eq!(serde_json::from_str::<FermionCount>("3").unwrap().get(), 3);
    }

    #[test]
    fn complement_duality_two_arcs() {
        let a = MultiInterval::circle(&[(0.3, 1.1)]).unwrap();
        let b = MultiInterval::circle(&[(2.0, 4.5)]).unwrap();
        let f = mutual_information_exact(&a, &b, r(1)).unwrap().value;
        let fc = mutual_information_complements(&a, &b, r(1)).unwrap();
        assert_relative_eq!(f, fc, epsilon = 1e-12);
    }
}
