#![allow(dead_code)]

use fermion_mi::geometry::{normalize, MultiInterval};
use rand::Rng;

/// Two single intervals with gaps of at least `min_gap` between all endpoints.
pub fn random_pair<R: Rng>(rng: &mut R, min_gap: f64) -> (MultiInterval, MultiInterval) {
    loop {
        let mut x: Vec<f64> = (0..4).map(|_| rng.random_range(-10.0..10.0)).collect();
        x.sort_by(f64::total_cmp);
        if x.windows(2).all(|w| w[1] - w[0] > min_gap) {
            let a = normalize(&[(x[0], x[1])]).unwrap();
            let b = normalize(&[(x[2], x[3])]).unwrap();
            return if rng.random_bool(0.5) { (a, b) } else { (b, a) };
        }
    }
}

/// Sorted, well-separated endpoints for `n` intervals.
pub fn random_endpoints<R: Rng>(rng: &mut R, n: usize, min_gap: f64) -> Vec<(f64, f64)> {
    loop {
        let mut x: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-5.0..5.0)).collect();
        x.sort_by(f64::total_cmp);
        if x.windows(2).all(|w| w[1] - w[0] > min_gap) {
            return x.chunks(2).map(|c| (c[0], c[1])).collect();
        }
    }
}

/// Direct evaluation of `(1/6)[Σ ln|b_i - a_j| - Σ_{i<j} ln|a_i - a_j| - Σ_{i<j} ln|b_i - b_j|]`.
pub fn g_direct(parts: &[(f64, f64)]) -> f64 {
    let mut s = 0.0;
    for &(_, b) in parts {
        for &(a, _) in parts {
            s += (b - a).abs().ln();
        }
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            s -= (parts[i].0 - parts[j].0).abs().ln();
            s -= (parts[i].1 - parts[j].1).abs().ln();
        }
    }
    s / 6.0
}

/// `F(A, B)` from [`g_direct`].
pub fn f_direct(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut u: Vec<(f64, f64)> = a.iter().chain(b).copied().collect();
    u.sort_by(|x, y| x.0.total_cmp(&y.0));
    g_direct(a) + g_direct(b) - g_direct(&u)
}

/// Cross ratio of two single intervals in increasing order.
pub fn eta_direct(first: (f64, f64), second: (f64, f64)) -> f64 {
    let ((a1, b1), (a2, b2)) = if first.0 < second.0 { (first, second) } else { (second, first) };
    (a2 - b1) * (b2 - a1) / ((a2 - a1) * (b2 - b1))
}
