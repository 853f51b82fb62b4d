//! Dense complex Hermitian helpers: spectral calculus, partial traces and
//! random sampling.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Hermitian part `(M + M*)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Largest entry of `|M - M*|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `m`.
pub fn eigh(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn eigvalsh(m: &CMatrix) -> DVector<f64> {
    eigh(m).0
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigvalsh(m).iter().copied().fold(f64::INFINITY, f64::min)
}

/// `U diag(f(λ)) U*` for Hermitian `m`.
pub fn apply_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let d = CMatrix::from_diagonal(&vals.map(|v| C64::new(f(v), 0.0)));
    &vecs * d * vecs.adjoint()
}

/// `t ln t` with `0 ln 0 = 0`.
pub fn xlogx(t: f64) -> f64 {
    if t > 0.0 {
        t * t.ln()
    } else {
        0.0
    }
}

pub fn real_trace(m: &CMatrix) -> f64 {
    m.trace().re
}

pub fn from_real(m: &DMatrix<f64>) -> CMatrix {
    m.map(|v| C64::new(v, 0.0))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Partial trace keeping the tensor factors listed in `keep` (in order).
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let n: usize = dims.iter().product();
    assert_eq!(m.nrows(), n, "matrix does not match tensor dimensions");
    let out_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let digits = |mut i: usize| {
        let mut d = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            d[k] = i % dims[k];
            i /= dims[k];
        }
        d
    };
    let compose = |d: &[usize]| keep.iter().fold(0, |acc, &k| acc * dims[k] + d[k]);
    let all: Vec<Vec<usize>> = (0..n).map(digits).collect();
    let mut out = CMatrix::zeros(out_dim, out_dim);
    for i in 0..n {
        for j in 0..n {
            if traced.iter().all(|&k| all[i][k] == all[j][k]) {
                out[(compose(&all[i]), compose(&all[j]))] += m[(i, j)];
            }
        }
    }
    out
}

/// Matrix with independent standard complex normal entries (real and
/// imaginary parts each `N(0, 1)`).
pub fn complex_gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// `G G* + εI`.
pub fn random_positive_definite<R: Rng>(rng: &mut R, n: usize, eps: f64) -> CMatrix {
    let g = complex_gaussian(rng, n, n);
    hermitian_part(&(&g * g.adjoint())) + CMatrix::identity(n, n) * C64::new(eps, 0.0)
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix,
/// with the phases of `R`'s diagonal absorbed.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let qr = complex_gaussian(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMatrix::from_diagonal(&DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        }),
    ));
    q * phases
}

/// Columns of `u` selected by `mask`.
pub fn select_columns(u: &CMatrix, mask: &[bool]) -> CMatrix {
    let idx: Vec<usize> = mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect();
    u.select_columns(&idx)
}

/// Projection `V V*` onto the span of the selected columns of a unitary.
pub fn projection_from(u: &CMatrix, mask: &[bool]) -> CMatrix {
    let v = select_columns(u, mask);
    &v * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigh_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_positive_definite(&mut rng, 5, 1e-3);
        let rebuilt = apply_fn(&a, |x| x);
        assert!((rebuilt - &a).norm() < 1e-10);
        let vals = eigvalsh(&a);
        assert!(vals.iter().zip(vals.iter().skip(1)).all(|(x, y)| x <= y));
        assert!(min_eigenvalue(&a) >= 1e-3 - 1e-12);
    }

    #[test]
    fn log_and_exp_are_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_positive_definite(&mut rng, 4, 0.1);
        let back = apply_fn(&apply_fn(&a, f64::ln), f64::exp);
        assert!((back - &a).norm() < 1e-9);
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(&mut rng, 6);
        assert!((&u * u.adjoint() - CMatrix::identity(6, 6)).norm() < 1e-12);
        let p = projection_from(&u, &[true, false, true, false, false, true]);
        assert!((&p * &p - &p).norm() < 1e-12);
        assert_relative_eq!(real_trace(&p), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_positive_definite(&mut rng, 2, 0.0);
        let b = random_positive_definite(&mut rng, 3, 0.0);
        let c = random_positive_definite(&mut rng, 2, 0.0);
        let abc = kron(&kron(&a, &b), &c);
        let (ta, tb, tc) = (a.trace(), b.trace(), c.trace());
        assert!((partial_trace(&abc, &[2, 3, 2], &[0]) - &a * (tb * tc)).norm() < 1e-10);
        assert!((partial_trace(&abc, &[2, 3, 2], &[1]) - &b * (ta * tc)).norm() < 1e-10);
        assert!((partial_trace(&abc, &[2, 3, 2], &[0, 2]) - kron(&a, &c) * tb).norm() < 1e-10);
        assert!((partial_trace(&abc, &[2, 3, 2], &[0, 1, 2]) - &abc).norm() < 1e-12);
    }

    #[test]
    fn xlogx_at_zero() {
        assert_eq!(xlogx(0.0), 0.0);
        assert_relative_eq!(xlogx(std::f64::consts::E), std::f64::consts::E);
    }
}
