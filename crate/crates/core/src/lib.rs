//! Mutual information of free chiral fermions on intervals: closed forms in
//! the cross ratio, lattice spectra of the half-filled hopping chain, traces of
//! the singular Hardy-projection kernel, and randomized oracles for the matrix
//! inequalities behind them.

pub mod cft;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod lattice;
pub mod linalg;
pub mod oracles;
pub mod quadrature;
pub mod scenario;

pub use error::{Error, Result};
pub use geometry::{Geometry, Interval, MobiusMap, MultiInterval};
