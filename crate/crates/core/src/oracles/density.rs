use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, eigvalsh, hermitian_part, hermiticity_defect, partial_trace, random_positive_definite,
    real_trace, xlogx, CMatrix, C64,
};

/// Eigenvalues at or below this are treated as zero.
pub const ZERO_EIGENVALUE: f64 = 1e-14;

const PSD_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-12;

/// Hermitian positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveMatrix(CMatrix);

impl PositiveMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let defect = hermiticity_defect(&m);
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (defect {defect:e})")));
        }
        let h = hermitian_part(&m);
        let min = eigvalsh(&h).iter().copied().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self(h))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        real_trace(&self.0)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::domain("scaled", "scale must be nonnegative"));
        }
        Ok(Self(&self.0 * C64::new(lambda, 0.0)))
    }
}

/// Positive semidefinite matrix of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(PositiveMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let p = PositiveMatrix::new(m)?;
        let tr = p.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} differs from 1")));
        }
        Ok(Self(p))
    }

    /// Normalizes a nonzero positive matrix to unit trace.
    pub fn normalized(m: CMatrix) -> Result<Self> {
        let p = PositiveMatrix::new(m)?;
        let tr = p.trace();
        if !(tr > 0.0) {
            return Err(Error::InvalidDensityMatrix("zero trace".into()));
        }
        Ok(Self(PositiveMatrix(p.0 / C64::new(tr, 0.0))))
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            C64::new(if i == j { probs[i] } else { 0.0 }, 0.0)
        }))
    }

    /// `|ψ⟩⟨ψ|` for a normalized copy of `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        Self::normalized(&v * v.adjoint())
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(PositiveMatrix(CMatrix::identity(d, d) / C64::new(d as f64, 0.0)))
    }

    /// `G G*/Tr` with a complex Gaussian `G`; full rank almost surely.
    pub fn random<R: Rng>(rng: &mut R, d: usize) -> Self {
        Self::normalized(random_positive_definite(rng, d, 0.0)).expect("Gram matrix is positive")
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0 .0
    }

    pub fn as_positive(&self) -> &PositiveMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self(PositiveMatrix(self.matrix().kronecker(other.matrix())))
    }

    /// Reduced state on the factors in `keep`.
    pub fn reduce(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: self.dim(),
            });
        }
        Self::normalized(partial_trace(self.matrix(), dims, keep))
    }
}

/// `S(ρ) = -Tr ρ ln ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    -eigvalsh(rho.matrix()).iter().map(|&v| xlogx(v.max(0.0))).sum::<f64>()
}

/// `Tr ρ(ln ρ - ln σ)` for a positive (not necessarily normalized) `σ`.
/// Fails with `SupportViolation` when `ρ` has weight outside the support of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &PositiveMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let (svals, svecs) = eigh(sigma.matrix());
    let r = svecs.adjoint() * rho.matrix() * &svecs;
    let mut leak = 0.0;
    let mut cross = 0.0;
    for (i, &s) in svals.iter().enumerate() {
        let w = r[(i, i)].re;
        if s <= ZERO_EIGENVALUE {
            leak += w;
        } else {
            cross += w * s.ln();
        }
    }
    if leak > 1e-12 {
        return Err(Error::SupportViolation { leak });
    }
    Ok(-von_neumann_entropy(rho) - cross)
}

/// `S(ρ_A) + S(ρ_B) - S(ρ_AB)`.
pub fn mutual_information_density(rho: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    let d = [dims.0, dims.1];
    let a = rho.reduce(&d, &[0])?;
    let b = rho.reduce(&d, &[1])?;
    Ok(von_neumann_entropy(&a) + von_neumann_entropy(&b) - von_neumann_entropy(rho))
}
