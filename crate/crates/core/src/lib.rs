//! Negative binomial distributions of order k.
//!
//! `NB(k, r)` is the number of Bernoulli trials needed to observe `r` success
//! runs of length `k`. The crate evaluates its pmf and moments through several
//! independent routes (recurrences, combinatorial and hypergeometric sums,
//! generating-function expansions, and sums over the roots of the auxiliary
//! polynomial), covers overlapping runs, Type II runs and runs separated by a
//! gap, and ships exact enumeration and Monte Carlo oracles to check them
//! against each other.

pub mod error;
pub mod model;
pub mod moments;
pub mod oracle;
pub mod pmf;
pub mod roots;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use model::{
    convert_index, shift_factorial_moments, shift_raw_moments, IndexScheme, MomentKind, MomentSet,
    PmfTable, RunParams, VariantSpec,
};
pub use scalar::{parse_rational, DoubleDouble, Field, Scalar};
