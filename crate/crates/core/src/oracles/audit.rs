//! Randomized audits. Trial `i` of an audit with base seed `s` draws all of its
//! inputs from `ChaCha8Rng::seed_from_u64(s + i)`, so any failing trial can be
//! replayed from its seed alone.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, projection_from, random_positive_definite, random_unitary};

use super::density::{relative_entropy, DensityMatrix, PositiveMatrix};
use super::inequalities::{
    dominance_constant, dominance_margin, lieb_concavity_gap, lieb_convexity_gap,
    monotonicity_gap, sherman_davis_gap, ssa_gap, theorem_ab_gap,
};
use super::kosaki::{kosaki_lower_bound, StepPath};

/// Shift added to positive-definite samples.
pub const PD_EPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    StrongSubadditivity,
    ShermanDavis,
    LiebConvexity,
    LiebConcavity,
    TheoremAb,
    Monotonicity,
    KosakiScalar,
    KosakiOperator,
    Dominance,
}

impl Inequality {
    pub const ALL: [Inequality; 9] = [
        Inequality::StrongSubadditivity,
        Inequality::ShermanDavis,
        Inequality::LiebConvexity,
        Inequality::LiebConcavity,
        Inequality::TheoremAb,
        Inequality::Monotonicity,
        Inequality::KosakiScalar,
        Inequality::KosakiOperator,
        Inequality::Dominance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Inequality::StrongSubadditivity => "strong_subadditivity",
            Inequality::ShermanDavis => "sherman_davis",
            Inequality::LiebConvexity => "lieb_convexity",
            Inequality::LiebConcavity => "lieb_concavity",
            Inequality::TheoremAb => "theorem_ab",
            Inequality::Monotonicity => "monotonicity",
            Inequality::KosakiScalar => "kosaki_scalar",
            Inequality::KosakiOperator => "kosaki_operator",
            Inequality::Dominance => "dominance",
        }
    }

    /// Gap of one randomized trial; nonnegative when the inequality holds.
    pub fn trial_gap(self, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rng = &mut rng;
        match self {
            Inequality::StrongSubadditivity => ssa_gap(&DensityMatrix::random(rng, 8), (2, 2, 2)),
            Inequality::ShermanDavis => {
                let a = PositiveMatrix::new(random_positive_definite(rng, 6, PD_EPS))?;
                let u = random_unitary(rng, 6);
                let p = projection_from(&u, &random_mask(rng, 6, 3));
                sherman_davis_gap(&a, &p)
            }
            Inequality::LiebConvexity => {
                let m: Vec<_> = (0..4).map(|_| random_positive_definite(rng, 5, PD_EPS)).collect();
                let k = complex_gaussian(rng, 5, 5);
                lieb_convexity_gap(((&m[0], &m[1]), (&m[2], &m[3])), &k)
            }
            Inequality::LiebConcavity => {
                let m: Vec<_> = (0..4).map(|_| random_positive_definite(rng, 5, PD_EPS)).collect();
                let k = complex_gaussian(rng, 5, 5);
                let t = rng.random_range(0.0..=1.0);
                lieb_concavity_gap(((&m[0], &m[1]), (&m[2], &m[3])), &k, t)
            }
            Inequality::TheoremAb => {
                let a = PositiveMatrix::new(random_positive_definite(rng, 8, PD_EPS))?;
                // P1 and p are diagonal in one shared random basis, so they commute.
                let u = random_unitary(rng, 8);
                let p1 = projection_from(&u, &[true, true, true, true, false, false, false, false]);
                let p = projection_from(&u, &random_mask(rng, 8, 4));
                theorem_ab_gap(&a, &p1, &p)
            }
            Inequality::Monotonicity => {
                let rho = DensityMatrix::random(rng, 4);
                let sigma = DensityMatrix::random(rng, 4);
                monotonicity_gap(&rho, &sigma, (2, 2))
            }
            Inequality::KosakiScalar => {
                let rho = DensityMatrix::random(rng, 2);
                let sigma = DensityMatrix::random(rng, 2);
                let lambda = rng.random_range(0.05..2.0);
                let path = StepPath::scalar(lambda, 100.0, 100.0, 200, 2)?;
                Ok(relative_entropy(&rho, sigma.as_positive())?
                    - kosaki_lower_bound(&rho, sigma.as_positive(), &path)?)
            }
            Inequality::KosakiOperator => {
                let rho = DensityMatrix::random(rng, 2);
                let sigma = DensityMatrix::random(rng, 2);
                let path = StepPath::operator(&rho, sigma.as_positive(), 100.0, 100.0, 400)?;
                Ok(relative_entropy(&rho, sigma.as_positive())?
                    - kosaki_lower_bound(&rho, sigma.as_positive(), &path)?)
            }
            Inequality::Dominance => {
                let rho = DensityMatrix::random(rng, 3);
                let sigma = DensityMatrix::random(rng, 3);
                let mu = dominance_constant(&rho, &sigma)?;
                dominance_margin(&rho, &sigma, mu)
            }
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Inequality::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::domain("inequality", format!("unknown inequality {s:?}")))
    }
}

/// Mask with exactly `rank` of `n` entries set, uniformly at random.
fn random_mask<R: Rng>(rng: &mut R, n: usize, rank: usize) -> Vec<bool> {
    let mut mask = vec![false; n];
    for i in rand::seq::index::sample(rng, n, rank) {
        mask[i] = true;
    }
    mask
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub inequality_name: String,
    pub trials: usize,
    pub min_gap: f64,
    pub argmin_seed: u64,
}

/// Minimum gap over `trials` trials with seeds `base_seed + i`; ties go to the
/// smallest seed.
pub fn run_audit(inequality: Inequality, trials: usize, base_seed: u64) -> Result<AuditRow> {
    if trials == 0 {
        return Err(Error::domain("audit", "trials must be positive"));
    }
    let gaps: Vec<(u64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            inequality.trial_gap(seed).map(|g| (seed, g))
        })
        .collect::<Result<_>>()?;
    let (argmin_seed, min_gap) = gaps
        .into_iter()
        .fold((base_seed, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    Ok(AuditRow {
        inequality_name: inequality.name().to_string(),
        trials,
        min_gap,
        argmin_seed,
    })
}

pub fn run_audits(inequalities: &[Inequality], trials: usize, base_seed: u64) -> Result<Vec<AuditRow>> {
    inequalities.iter().map(|&i| run_audit(i, trials, base_seed)).collect()
}
