//! Exact distributions, moments, and Gumbel extreme-value asymptotics of
//! inversion and descent statistics on finite Coxeter groups.
//!
//! The crate is organized around [`groups::GroupDescriptor`], a finite Coxeter
//! group given as a product of irreducible factors of types A, B, D and I2(m).
//! From a descriptor one can build the exact Mahonian (inversion) and Eulerian
//! (descent) distributions, extract the Bernoulli parameters hiding in the
//! real roots of the Eulerian polynomial, evaluate Gumbel norming constants
//! and convergence diagnostics for row-wise maxima of i.i.d. statistics, run
//! deterministic parallel Monte-Carlo simulations of those maxima, and check
//! the growth conditions that govern whether the Gumbel limit applies along a
//! sequence of groups.
//!
//! Everything analytic is backed by a brute-force oracle ([`oracle`]) that
//! enumerates small groups via breadth-first search over their Cayley graphs.

pub mod conditions;
pub mod error;
pub mod extremes;
pub mod groups;
pub mod montecarlo;
pub mod oracle;
pub mod polynomials;
pub mod rng;
pub mod statistics;

pub use error::Error;
pub use groups::{FactorKind, GroupDescriptor, IrreducibleFactor};
pub use polynomials::{IntPolynomial, RootList};
pub use statistics::{Moments, Pmf, Statistic};

pub type Result<T> = std::result::Result<T, Error>;
