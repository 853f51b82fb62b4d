//! Each `*_gap` returns "larger side minus smaller side" of an inequality, so
//! a valid inequality means a nonnegative gap up to roundoff.

use crate::error::{Error, Result};
use crate::linalg::{apply_fn, eigh, min_eigenvalue, real_trace, xlogx, CMatrix, C64};

use super::density::{relative_entropy, von_neumann_entropy, DensityMatrix, PositiveMatrix};

const PROJ_TOL: f64 = 1e-10;

/// `S(ρ_AB) + S(ρ_AC) - S(ρ_A) - S(ρ_ABC)`.
pub fn ssa_gap(rho: &DensityMatrix, dims: (usize, usize, usize)) -> Result<f64> {
    let d = [dims.0, dims.1, dims.2];
    let s = |keep: &[usize]| rho.reduce(&d, keep).map(|r| von_neumann_entropy(&r));
    Ok(s(&[0, 1])? + s(&[0, 2])? - s(&[0])? - von_neumann_entropy(rho))
}

fn check_projection(p: &CMatrix, dim: usize) -> Result<()> {
    if p.nrows() != dim || p.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: p.nrows(),
        });
    }
    let defect = (p * p - p).norm().max((p - p.adjoint()).norm());
    if defect > PROJ_TOL {
        return Err(Error::domain("projection", format!("p² = p = p* fails by {defect:e}")));
    }
    Ok(())
}

/// Orthonormal basis `V` of the range of a projection.
fn range_basis(p: &CMatrix) -> CMatrix {
    let (vals, vecs) = eigh(p);
    let idx: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
    vecs.select_columns(&idx)
}

fn check_positive_definite(m: &CMatrix, what: &str) -> Result<()> {
    let min = min_eigenvalue(m);
    if !(min > 0.0) {
        return Err(Error::domain("positive_definite", format!("{what} has eigenvalue {min:e}")));
    }
    Ok(())
}

/// Minimum eigenvalue of `p f(A) p - p f(pAp) p` on the range of `p`, with
/// `f(t) = t ln t`.
pub fn sherman_davis_gap(a: &PositiveMatrix, p: &CMatrix) -> Result<f64> {
    check_projection(p, a.dim())?;
    let v = range_basis(p);
    if v.ncols() == 0 {
        return Ok(0.0);
    }
    let fa = apply_fn(a.matrix(), xlogx);
    let compressed = v.adjoint() * a.matrix() * &v;
    let lhs = v.adjoint() * fa * &v;
    Ok(min_eigenvalue(&(lhs - apply_fn(&compressed, xlogx))))
}

/// `Φ(A, B) = Tr(K* A ln A K) - Tr(K* A K ln B)`.
fn lieb_phi(a: &CMatrix, b: &CMatrix, k: &CMatrix) -> f64 {
    let a_log_a = apply_fn(a, xlogx);
    let ln_b = apply_fn(b, f64::ln);
    real_trace(&(k.adjoint() * a_log_a * k)) - real_trace(&(k.adjoint() * a * k * ln_b))
}

type Pair<'a> = (&'a CMatrix, &'a CMatrix);

fn check_pairs(pairs: (Pair, Pair), k: &CMatrix) -> Result<()> {
    let n = pairs.0 .0.nrows();
    for m in [pairs.0 .0, pairs.0 .1, pairs.1 .0, pairs.1 .1, k] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.nrows(),
            });
        }
    }
    for m in [pairs.0 .0, pairs.0 .1, pairs.1 .0, pairs.1 .1] {
        check_positive_definite(m, "Lieb argument")?;
    }
    Ok(())
}

fn midpoint(x: &CMatrix, y: &CMatrix) -> CMatrix {
    (x + y) * C64::new(0.5, 0.0)
}

/// `(Φ(A1,B1) + Φ(A2,B2))/2 - Φ((A1+A2)/2, (B1+B2)/2)`: joint convexity.
pub fn lieb_convexity_gap(pairs: (Pair, Pair), k: &CMatrix) -> Result<f64> {
    check_pairs(pairs, k)?;
    let ((a1, b1), (a2, b2)) = pairs;
    let avg = 0.5 * (lieb_phi(a1, b1, k) + lieb_phi(a2, b2, k));
    Ok(avg - lieb_phi(&midpoint(a1, a2), &midpoint(b1, b2), k))
}

/// `Ψ((A1+A2)/2, (B1+B2)/2) - (Ψ(A1,B1) + Ψ(A2,B2))/2` with
/// `Ψ(A, B) = Tr(K* A^{1-t} K B^t)`, `0 <= t <= 1`: joint concavity.
pub fn lieb_concavity_gap(pairs: (Pair, Pair), k: &CMatrix, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain("lieb_concavity_gap", format!("t = {t} outside [0, 1]")));
    }
    check_pairs(pairs, k)?;
    let psi = |a: &CMatrix, b: &CMatrix| {
        let at = apply_fn(a, |x| x.powf(1.0 - t));
        let bt = apply_fn(b, |x| x.powf(t));
        real_trace(&(k.adjoint() * at * k * bt))
    };
    let ((a1, b1), (a2, b2)) = pairs;
    Ok(psi(&midpoint(a1, a2), &midpoint(b1, b2)) - 0.5 * (psi(a1, b1) + psi(a2, b2)))
}

/// `Tr A(ln A - ln B)` for positive definite `A`, `B`.
fn trace_rel(a: &CMatrix, b: &CMatrix) -> f64 {
    real_trace(&(a * (apply_fn(a, f64::ln) - apply_fn(b, f64::ln))))
}

/// `Tr A(ln A - ln B) - Tr A_p(ln A_p - ln B_p)` with `B = P1 A P1 + P2 A P2`,
/// `P2 = 1 - P1`, and `X_p` the compression of `X` to the range of `p`.
pub fn theorem_ab_gap(a: &PositiveMatrix, p1: &CMatrix, p: &CMatrix) -> Result<f64> {
    let n = a.dim();
    check_projection(p1, n)?;
    check_projection(p, n)?;
    let comm = (p * p1 - p1 * p).norm();
    if comm > PROJ_TOL {
        return Err(Error::domain("theorem_ab_gap", format!("[p, P1] has norm {comm:e}")));
    }
    let am = a.matrix();
    check_positive_definite(am, "A")?;
    let p2 = CMatrix::identity(n, n) - p1;
    let b = p1 * am * p1 + &p2 * am * &p2;
    let v = range_basis(p);
    let full = trace_rel(am, &b);
    if v.ncols() == 0 {
        return Ok(full);
    }
    let ap = v.adjoint() * am * &v;
    let bp = v.adjoint() * &b * &v;
    Ok(full - trace_rel(&ap, &bp))
}

/// `S(ρ, σ) - S(ρ_A, σ_A)` with the reduction tracing out `B`.
pub fn monotonicity_gap(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    dims: (usize, usize),
) -> Result<f64> {
    let d = [dims.0, dims.1];
    let ra = rho.reduce(&d, &[0])?;
    let sa = sigma.reduce(&d, &[0])?;
    Ok(relative_entropy(rho, sigma.as_positive())? - relative_entropy(&ra, sa.as_positive())?)
}

/// Largest `μ <= 1` with `σ >= μ ρ`, shrunk by `1e-9` relative for safety:
/// `λ_min(ρ^{-1/2} σ ρ^{-1/2})`. Requires `ρ` of full rank.
pub fn dominance_constant(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_positive_definite(rho.matrix(), "ρ")?;
    let inv_sqrt = apply_fn(rho.matrix(), |x| 1.0 / x.sqrt());
    let m = &inv_sqrt * sigma.matrix() * &inv_sqrt;
    Ok((min_eigenvalue(&m) * (1.0 - 1e-9)).min(1.0))
}

/// `ln(1/μ) - S(ρ, σ)`, after checking `σ >= μ ρ` and `0 < μ <= 1`.
pub fn dominance_margin(rho: &DensityMatrix, sigma: &DensityMatrix, mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::domain("dominance", format!("mu = {mu} outside (0, 1]")));
    }
    let diff = sigma.matrix() - rho.matrix() * C64::new(mu, 0.0);
    let min = min_eigenvalue(&diff);
    if min < -1e-12 {
        return Err(Error::domain("dominance", format!("σ - μρ has eigenvalue {min:e}")));
    }
    Ok(-mu.ln() - relative_entropy(rho, sigma.as_positive())?)
}

/// True iff `S(ρ, σ) <= ln(1/μ) + 1e-9`.
pub fn dominance_bound_check(rho: &DensityMatrix, sigma: &DensityMatrix, mu: f64) -> Result<bool> {
    Ok(dominance_margin(rho, sigma, mu)? >= -1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{projection_from, random_positive_definite, random_unitary};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn ssa_examples() {
        let z = DensityMatrix::pure(&[c(1.0), c(0.0)]).unwrap();
        let prod = z.tensor(&z).tensor(&z);
        assert!(ssa_gap(&prod, (2, 2, 2)).unwrap().abs() < 1e-12);

        let mut r = rng(1);
        let a = DensityMatrix::random(&mut r, 2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bc = DensityMatrix::pure(&[c(h), c(0.0), c(0.0), c(h)]).unwrap();
        let rho = a.tensor(&bc);
        let sb = von_neumann_entropy(&rho.reduce(&[2, 2, 2], &[1]).unwrap());
        assert_relative_eq!(ssa_gap(&rho, (2, 2, 2)).unwrap(), 2.0 * sb, epsilon = 1e-12);
    }

    #[test]
    fn sherman_davis_examples() {
        let mut r = rng(2);
        let a = PositiveMatrix::new(random_positive_definite(&mut r, 6, 1e-3)).unwrap();
        let id = CMatrix::identity(6, 6);
        assert!(sherman_davis_gap(&a, &id).unwrap().abs() < 1e-10);

        // p built from A's own eigenvectors commutes with A.
        let (_, vecs) = eigh(a.matrix());
        let p = projection_from(&vecs, &[true, false, true, false, true, false]);
        assert!(sherman_davis_gap(&a, &p).unwrap().abs() < 1e-9);

        let u = random_unitary(&mut r, 6);
        let p = projection_from(&u, &[true, true, true, false, false, false]);
        assert!(sherman_davis_gap(&a, &p).unwrap() >= -1e-10);

        assert!(sherman_davis_gap(&a, &(id * c(0.5))).is_err());
    }

    #[test]
    fn lieb_examples() {
        let mut r = rng(3);
        let a = random_positive_definite(&mut r, 5, 1e-3);
        let b = random_positive_definite(&mut r, 5, 1e-3);
        let k = crate::linalg::complex_gaussian(&mut r, 5, 5);
        assert!(lieb_convexity_gap(((&a, &b), (&a, &b)), &k).unwrap().abs() < 1e-9);

        // Commuting diagonal family with K = 1 reduces to scalar a ln a - a ln b.
        let diag = |v: &[f64]| CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(v.len(), v.iter().map(|&x| c(x))));
        let (a1, b1) = (diag(&[1.0, 2.0]), diag(&[3.0, 0.5]));
        let (a2, b2) = (diag(&[0.2, 4.0]), diag(&[1.0, 1.0]));
        let f = |a: f64, b: f64| a * a.ln() - a * b.ln();
        let expected: f64 = [(1.0, 3.0, 0.2, 1.0), (2.0, 0.5, 4.0, 1.0)]
            .iter()
            .map(|&(x1, y1, x2, y2)| 0.5 * (f(x1, y1) + f(x2, y2)) - f(0.5 * (x1 + x2), 0.5 * (y1 + y2)))
            .sum();
        let id = CMatrix::identity(2, 2);
        let gap = lieb_convexity_gap(((&a1, &b1), (&a2, &b2)), &id).unwrap();
        assert_relative_eq!(gap, expected, epsilon = 1e-12);
        assert!(gap > 0.0);

        assert!(lieb_concavity_gap(((&a1, &b1), (&a2, &b2)), &id, 0.3).unwrap() >= 0.0);
        assert!(lieb_concavity_gap(((&a1, &b1), (&a2, &b2)), &id, 1.5).is_err());
        let bad = diag(&[1.0, -1.0]);
        assert!(lieb_convexity_gap(((&bad, &b1), (&a2, &b2)), &id).is_err());
    }

    #[test]
    fn theorem_ab_examples() {
        let mut r = rng(4);
        let a = PositiveMatrix::new(random_positive_definite(&mut r, 8, 1e-3)).unwrap();
        let u = random_unitary(&mut r, 8);
        let p1 = projection_from(&u, &[true, true, true, true, false, false, false, false]);
        let id = CMatrix::identity(8, 8);
        assert!(theorem_ab_gap(&a, &p1, &id).unwrap().abs() < 1e-9);

        // A block-diagonal with respect to P1 gives B = A.
        let p2 = &id - &p1;
        let block = &p1 * a.matrix() * &p1 + &p2 * a.matrix() * &p2;
        let block = PositiveMatrix::new(block).unwrap();
        let p = projection_from(&u, &[true, false, true, false, true, false, true, false]);
        assert!(theorem_ab_gap(&block, &p1, &p).unwrap().abs() < 1e-9);

        assert!(theorem_ab_gap(&a, &p1, &p).unwrap() >= -1e-10);

        let other = projection_from(&random_unitary(&mut r, 8), &[true; 4].iter().chain(&[false; 4]).copied().collect::<Vec<_>>());
        assert!(theorem_ab_gap(&a, &p1, &other).is_err());
    }

    #[test]
    fn monotonicity_examples() {
        let mut r = rng(5);
        let rho = DensityMatrix::random(&mut r, 4);
        assert!(monotonicity_gap(&rho, &rho, (2, 2)).unwrap().abs() < 1e-12);

        let (ra, rb) = (DensityMatrix::random(&mut r, 2), DensityMatrix::random(&mut r, 2));
        let (sa, sb) = (DensityMatrix::random(&mut r, 2), DensityMatrix::random(&mut r, 2));
        let gap = monotonicity_gap(&ra.tensor(&rb), &sa.tensor(&sb), (2, 2)).unwrap();
        assert_relative_eq!(gap, relative_entropy(&rb, sb.as_positive()).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn dominance_examples() {
        let mut r = rng(6);
        let rho = DensityMatrix::random(&mut r, 3);
        assert!(dominance_bound_check(&rho, &rho, 1.0).unwrap());
        let mix = DensityMatrix::new(
            (rho.matrix() + CMatrix::identity(3, 3) / c(3.0)) * c(0.5),
        )
        .unwrap();
        assert!(dominance_bound_check(&rho, &mix, 0.5).unwrap());
        let sigma = DensityMatrix::random(&mut r, 3);
        let mu = dominance_constant(&rho, &sigma).unwrap();
        assert!(mu > 0.0 && mu <= 1.0);
        assert!(dominance_bound_check(&rho, &sigma, mu).unwrap());
        if mu < 0.5 {
            assert!(dominance_margin(&rho, &sigma, 1.5 * mu / (1.0 - 1e-9)).is_err());
        }
        assert!(dominance_bound_check(&rho, &sigma, 0.0).is_err());
    }
}
