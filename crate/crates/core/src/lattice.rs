//! Free fermions on a chain: region entropies from covariance spectra and the
//! continuum limit of lattice mutual information.
//!
//! The lattice model is the ground state of the half-filled nearest-neighbour
//! hopping chain. Its restriction to any site set is a valid covariance
//! (spectrum in `[0, 1]`), unlike direct sampling of the singular continuum
//! kernel. The chain carries a left- and a right-moving chiral fermion, so its
//! mutual information tends to twice the single-fermion closed form;
//! [`convergence_study`] reports values per chiral copy.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cft::{self, Diagnostics, EntropyReport, FermionCount, Method};
use crate::error::{Error, Result};
use crate::geometry::{Geometry, MultiInterval};
use crate::quadrature::compensated_sum;

/// Slack allowed outside `[0, 1]` before eigenvalues are clamped.
pub const SPECTRUM_TOL: f64 = 1e-10;

/// Chiral components carried by the hopping chain.
pub const CHIRAL_COPIES: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates symmetry and that the spectrum lies in `[-tol, 1 + tol]`.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: entries.ncols(),
            });
        }
        for i in 0..n {
            for j in 0..i {
                if (entries[(i, j)] - entries[(j, i)]).abs() > 1e-12 {
                    return Err(Error::domain("covariance", format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        let c = Self { entries };
        if n > 0 {
            clamped_spectrum(&c.entries)?;
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Restriction `C|_R` to the sites of `region`.
    pub fn restrict(&self, region: &SiteRegion) -> Result<DMatrix<f64>> {
        region.check_within(self.dim())?;
        let idx: Vec<usize> = region.indices().to_vec();
        Ok(self.entries.select_rows(&idx).select_columns(&idx))
    }

    /// `r` independent copies as a block-diagonal matrix.
    pub fn replicate(&self, r: usize) -> Self {
        let n = self.dim();
        let mut m = DMatrix::zeros(n * r, n * r);
        for k in 0..r {
            m.view_mut((k * n, k * n), (n, n)).copy_from(&self.entries);
        }
        Self { entries: m }
    }

    /// `E = (C + ε₀)/(1 + 2ε₀)`, with its spectrum checked against
    /// `[ε₀/(1+2ε₀), (1+ε₀)/(1+2ε₀)]`.
    pub fn regularized(&self, eps0: f64) -> Result<DMatrix<f64>> {
        let (lo, hi) = crate::kernel::regularized_spectrum_bounds(eps0)?;
        let n = self.dim();
        let e = (&self.entries + DMatrix::identity(n, n) * eps0) / (1.0 + 2.0 * eps0);
        if n > 0 {
            for v in SymmetricEigen::new(e.clone()).eigenvalues.iter() {
                if *v < lo - SPECTRUM_TOL || *v > hi + SPECTRUM_TOL {
                    return Err(Error::SpectrumOutOfRange { value: *v });
                }
            }
        }
        Ok(e)
    }
}

/// `C_jk = sin(π(j-k)/2) / (π(j-k))`, `C_jj = 1/2`.
pub fn half_filled_entry(d: i64) -> f64 {
    if d == 0 {
        return 0.5;
    }
    // sin(πd/2) is exactly 0 or ±1.
    let s = match d.rem_euclid(4) {
        1 => 1.0,
        3 => -1.0,
        _ => return 0.0,
    };
    s / (std::f64::consts::PI * d as f64)
}

pub fn build_half_filled_covariance(n: usize) -> Result<CovarianceMatrix> {
    if n == 0 {
        return Err(Error::domain("build_half_filled_covariance", "N must be at least 1"));
    }
    let entries = DMatrix::from_fn(n, n, |i, j| half_filled_entry(i as i64 - j as i64));
    Ok(CovarianceMatrix { entries })
}

/// Sorted set of distinct site indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SiteRegion {
    indices: Vec<usize>,
}

impl SiteRegion {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        Self {
            indices: set.into_iter().collect(),
        }
    }

    pub fn range(start: usize, end: usize) -> Self {
        Self {
            indices: (start..end).collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.indices.iter().chain(&other.indices).copied())
    }

    /// First shared site, if any.
    pub fn first_overlap(&self, other: &Self) -> Option<usize> {
        let other: BTreeSet<usize> = other.indices.iter().copied().collect();
        self.indices.iter().copied().find(|i| other.contains(i))
    }

    /// Same sites in each of `r` copies of an `n`-site chain.
    pub fn replicate(&self, r: usize, n: usize) -> Self {
        Self::new((0..r).flat_map(|k| self.indices.iter().map(move |i| k * n + i)))
    }

    fn check_within(&self, len: usize) -> Result<()> {
        match self.indices.last() {
            Some(&site) if site >= len => Err(Error::SiteOutOfRange { site, len }),
            _ => Ok(()),
        }
    }
}

/// Eigenvalues of a symmetric matrix, clamped to `[0, 1]` after checking they
/// lie within `SPECTRUM_TOL` of it.
fn clamped_spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    eig.iter()
        .map(|&v| {
            if !(-SPECTRUM_TOL..=1.0 + SPECTRUM_TOL).contains(&v) {
                Err(Error::SpectrumOutOfRange { value: v })
            } else {
                Ok(v.clamp(0.0, 1.0))
            }
        })
        .collect()
}

/// `h(ν) = -ν ln ν - (1-ν) ln(1-ν)` with `0 ln 0 = 0`.
pub fn binary_entropy(nu: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    term(nu) + term(1.0 - nu)
}

/// `S(R) = Σ h(ν)` over the spectrum of `C|_R`.
pub fn region_entropy(c: &CovarianceMatrix, region: &SiteRegion) -> Result<f64> {
    if region.is_empty() {
        region.check_within(c.dim())?;
        return Ok(0.0);
    }
    let spec = clamped_spectrum(&c.restrict(region)?)?;
    Ok(compensated_sum(spec.into_iter().map(binary_entropy)))
}

/// Entropies entering a lattice mutual information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeEntropies {
    pub s_a: f64,
    pub s_b: f64,
    pub s_ab: f64,
}

impl LatticeEntropies {
    pub fn mutual_information(&self) -> f64 {
        self.s_a + self.s_b - self.s_ab
    }
}

pub fn lattice_entropies(
    c: &CovarianceMatrix,
    a: &SiteRegion,
    b: &SiteRegion,
) -> Result<LatticeEntropies> {
    if let Some(site) = a.first_overlap(b) {
        return Err(Error::RegionsOverlap { site });
    }
    Ok(LatticeEntropies {
        s_a: region_entropy(c, a)?,
        s_b: region_entropy(c, b)?,
        s_ab: region_entropy(c, &a.union(b))?,
    })
}

/// `S(A) + S(B) - S(A∪B)` for disjoint site sets.
pub fn mutual_information_lattice(
    c: &CovarianceMatrix,
    a: &SiteRegion,
    b: &SiteRegion,
) -> Result<EntropyReport> {
    let e = lattice_entropies(c, a, b)?;
    Ok(EntropyReport {
        value: e.mutual_information(),
        method: Method::Lattice,
        inputs: format!("N={} |A|={} |B|={}", c.dim(), a.len(), b.len()),
        diagnostics: Diagnostics {
            sites: Some(a.len() + b.len()),
            ..Default::default()
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub scale: usize,
    pub sites_a: usize,
    pub sites_b: usize,
    pub s_a: f64,
    pub s_b: f64,
    pub s_ab: f64,
    /// Lattice mutual information per chiral copy.
    pub mi_lattice: f64,
    pub mi_closed: f64,
    pub rel_error: f64,
}

/// Sites `j` with `[jΔ, (j+1)Δ)` inside the region, `Δ = 1/scale`, measured
/// from `origin`.
pub fn sites_inside(region: &MultiInterval, origin: f64, scale: usize) -> SiteRegion {
    const SNAP: f64 = 1e-9;
    let s = scale as f64;
    let mut idx = Vec::new();
    for p in region.parts() {
        let lo = ((p.a() - origin) * s - SNAP).ceil().max(0.0) as usize;
        let hi = ((p.b() - origin) * s + SNAP).floor() as usize;
        idx.extend(lo..hi);
    }
    SiteRegion::new(idx)
}

/// Lattice mutual information of a fixed continuum shape at increasing
/// resolution, against the single-fermion closed form.
pub fn convergence_study(
    a: &MultiInterval,
    b: &MultiInterval,
    scales: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    if a.geometry() != Geometry::Line || b.geometry() != Geometry::Line {
        return Err(Error::domain("convergence_study", "shapes must lie on the line"));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("convergence_study", "both regions must be nonempty"));
    }
    let mi_closed = cft::mutual_information_exact(a, b, FermionCount::ONE)?.value;
    let origin = a.lefts().chain(b.lefts()).fold(f64::INFINITY, f64::min);
    let end = a.rights().chain(b.rights()).fold(f64::NEG_INFINITY, f64::max);
    scales
        .par_iter()
        .map(|&scale| {
            if scale == 0 {
                return Err(Error::domain("convergence_study", "scale must be positive"));
            }
            let sa = sites_inside(a, origin, scale);
            let sb = sites_inside(b, origin, scale);
            if sa.is_empty() || sb.is_empty() {
                return Err(Error::domain(
                    "convergence_study",
                    format!("scale {scale} leaves a region without sites"),
                ));
            }
            let n = (((end - origin) * scale as f64).ceil() as usize).max(1);
            let c = build_half_filled_covariance(n)?;
            let e = lattice_entropies(&c, &sa, &sb)?;
            let mi = e.mutual_information() / CHIRAL_COPIES;
            Ok(ConvergenceRow {
                scale,
                sites_a: sa.len(),
                sites_b: sb.len(),
                s_a: e.s_a,
                s_b: e.s_b,
                s_ab: e.s_ab,
                mi_lattice: mi,
                mi_closed,
                rel_error: (mi - mi_closed) / mi_closed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::normalize;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn half_filled_entries() {
        let c = build_half_filled_covariance(8).unwrap();
        for j in 0..8 {
            assert_eq!(c.entries()[(j, j)], 0.5);
        }
        assert_eq!(c.entries()[(1, 3)], 0.0);
        assert_relative_eq!(c.entries()[(2, 3)], 1.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(c.entries()[(0, 3)], -1.0 / (3.0 * PI), epsilon = 1e-15);
        assert!(build_half_filled_covariance(0).is_err());
        // Toeplitz.
        assert_eq!(c.entries()[(1, 4)], c.entries()[(3, 6)]);
    }

    #[test]
    fn region_entropy_examples() {
        let c = build_half_filled_covariance(10).unwrap();
        assert_eq!(region_entropy(&c, &SiteRegion::empty()).unwrap(), 0.0);
        assert_relative_eq!(region_entropy(&c, &SiteRegion::new([4])).unwrap(), LN_2, epsilon = 1e-14);
        let two = region_entropy(&c, &SiteRegion::range(3, 5)).unwrap();
        let expected = binary_entropy(0.5 + 1.0 / PI) + binary_entropy(0.5 - 1.0 / PI);
        assert_relative_eq!(two, expected, epsilon = 1e-14);
        assert_relative_eq!(two, 0.947893, epsilon = 1e-6);
        assert!(matches!(
            region_entropy(&c, &SiteRegion::new([10])),
            Err(Error::SiteOutOfRange { site: 10, len: 10 })
        ));
    }

    #[test]
    fn rejects_spectrum_outside_unit_interval() {
        let m = DMatrix::from_row_slice(2, 2, &[1.5, 0.0, 0.0, 0.5]);
        assert!(matches!(CovarianceMatrix::new(m), Err(Error::SpectrumOutOfRange { .. })));
        let ok = DMatrix::from_row_slice(2, 2, &[1.0 + 1e-11, 0.0, 0.0, -1e-11]);
        let c = CovarianceMatrix::new(ok).unwrap();
        assert_eq!(region_entropy(&c, &SiteRegion::range(0, 2)).unwrap(), 0.0);
    }

    #[test]
    fn mutual_information_examples() {
        let c = build_half_filled_covariance(20).unwrap();
        let a = SiteRegion::new([5]);
        assert_eq!(mutual_information_lattice(&c, &a, &SiteRegion::empty()).unwrap().value, 0.0);
        // Sites at distance 2 are uncorrelated (C = 0) so MI vanishes; at
        // distance 3 the 2x2 problem has eigenvalues 1/2 ± 1/(3π).
        let d2 = mutual_information_lattice(&c, &a, &SiteRegion::new([7])).unwrap().value;
        assert!(d2.abs() < 1e-14);
        let d3 = mutual_information_lattice(&c, &a, &SiteRegion::new([8])).unwrap().value;
        let x = 1.0 / (3.0 * PI);
        assert_relative_eq!(d3, 2.0 * LN_2 - binary_entropy(0.5 + x) - binary_entropy(0.5 - x), epsilon = 1e-14);
        assert!(d3 > 0.0);
        assert!(matches!(
            mutual_information_lattice(&c, &SiteRegion::range(0, 3), &SiteRegion::range(2, 5)),
            Err(Error::RegionsOverlap { site: 2 })
        ));
    }

    #[test]
    fn large_blocks_approach_closed_form() {
        let c = build_half_filled_covariance(300).unwrap();
        let mi = mutual_information_lattice(&c, &SiteRegion::range(0, 100), &SiteRegion::range(200, 300))
            .unwrap()
            .value;
        let closed = (4.0f64 / 3.0).ln() / 6.0;
        assert!(((mi / CHIRAL_COPIES - closed) / closed).abs() < 0.05);
    }

    #[test]
    fn replication_scales_mutual_information() {
        let c = build_half_filled_covariance(30).unwrap();
        let (a, b) = (SiteRegion::range(2, 9), SiteRegion::range(13, 21));
        let base = mutual_information_lattice(&c, &a, &b).unwrap().value;
        for r in 1..=3 {
            let cr = c.replicate(r);
            let v = mutual_information_lattice(&cr, &a.replicate(r, 30), &b.replicate(r, 30))
                .unwrap()
                .value;
            assert_relative_eq!(v, r as f64 * base, epsilon = 1e-12);
        }
    }

    #[test]
    fn regularized_spectrum_within_bounds() {
        let c = build_half_filled_covariance(64).unwrap();
        let e = c.regularized(0.1).unwrap();
        for v in SymmetricEigen::new(e).eigenvalues.iter() {
            assert!(*v > 1.0 / 12.0 - 1e-12 && *v < 11.0 / 12.0 + 1e-12);
        }
        assert!(c.regularized(0.0).is_err());
    }

    fn random_region(rng: &mut ChaCha8Rng, taken: &mut [bool]) -> SiteRegion {
        let mut idx = Vec::new();
        for (i, t) in taken.iter_mut().enumerate() {
            if !*t && rng.random_bool(0.2) {
                *t = true;
                idx.push(i);
            }
        }
        SiteRegion::new(idx)
    }

    #[test]
    fn strong_subadditivity_on_random_triples() {
        let c = build_half_filled_covariance(60).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = |r: &SiteRegion| region_entropy(&c, r).unwrap();
        for _ in 0..200 {
            let mut taken = vec![false; 60];
            let a = random_region(&mut rng, &mut taken);
            let b = random_region(&mut rng, &mut taken);
            let cc = random_region(&mut rng, &mut taken);
            let gap = s(&a.union(&b)) + s(&a.union(&cc)) - s(&a) - s(&a.union(&b).union(&cc));
            assert!(gap >= -1e-9, "gap {gap}");
        }
    }

    #[test]
    fn monotone_in_second_region_and_symmetric() {
        let c = build_half_filled_covariance(60).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut taken = vec![false; 60];
            let a = random_region(&mut rng, &mut taken);
            let b = random_region(&mut rng, &mut taken);
            let extra = random_region(&mut rng, &mut taken);
            let mi = mutual_information_lattice(&c, &a, &b).unwrap().value;
            let mi_big = mutual_information_lattice(&c, &a, &b.union(&extra)).unwrap().value;
            assert!(mi_big >= mi - 1e-10);
            assert!(mi >= -1e-10);
            assert_eq!(mi, mutual_information_lattice(&c, &b, &a).unwrap().value);
        }
    }

    #[test]
    fn restriction_spectrum_in_unit_interval() {
        let c = build_half_filled_covariance(40).unwrap();
        let r = SiteRegion::new([0, 3, 4, 9, 17, 18, 30]);
        for v in SymmetricEigen::new(c.restrict(&r).unwrap()).eigenvalues.iter() {
            assert!(*v >= -1e-12 && *v <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn site_mapping() {
        let a = normalize(&[(0.0, 1.0)]).unwrap();
        assert_eq!(sites_inside(&a, 0.0, 4).indices(), &[0, 1, 2, 3]);
        let b = normalize(&[(0.3, 0.9)]).unwrap();
        assert_eq!(sites_inside(&b, 0.0, 10).indices(), &[3, 4, 5, 6, 7, 8]);
        assert_eq!(sites_inside(&b, 0.0, 4).indices(), &[2]);
    }

    #[test]
    fn convergence_rows() {
        let a = normalize(&[(0.0, 1.0)]).unwrap();
        let b = normalize(&[(2.0, 3.0)]).unwrap();
        let rows = convergence_study(&a, &b, &[10, 20, 40]).unwrap();
        assert_eq!(rows.iter().map(|r| r.scale).collect::<Vec<_>>(), vec![10, 20, 40]);
        assert_eq!(rows[1].sites_a, 20);
        for w in rows.windows(2) {
            assert!(w[1].rel_error.abs() < w[0].rel_error.abs());
        }
        assert!(rows[2].rel_error.abs() < 0.05);
        assert!(convergence_study(&a, &b, &[0]).is_err());
        assert!(matches!(normalize(&[(1.0, 1.0)]), Err(Error::InvalidInterval { .. })));
    }
}
