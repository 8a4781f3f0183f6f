//! Exact analysis of the greatest-integer sum
//!
//! ```text
//! f_n(x) = [nx] - ([x]/1 + [2x]/2 + ... + [nx]/n)
//! ```
//!
//! All values are exact rationals. The crate evaluates `f_n`, enumerates its
//! finite value set `S_n` by walking Farey breakpoints, classifies values
//! relative to the smallest limit point `λ = 1 - log 2`, constructs values
//! arbitrarily close to any target `u >= λ`, and audits the known bounds
//! exhaustively on small orders.

#![allow(clippy::result_large_err)]

pub mod classifier;
pub mod density;
pub mod evaluator;
pub mod farey;
pub mod par;
pub mod range;
pub mod ratcore;
pub mod verify;

pub use classifier::{below_lambda_membership, classify, Classification, Membership, Tag};
pub use density::{approximate, find_m_hat, refine, ApproxResult, DensityError};
pub use evaluator::{breakpoint_delta, eval_detail, eval_f, EvalDetail};
pub use farey::{farey_next, farey_sequence, mediant, Breakpoint};
pub use range::{enumerate_range, equality_locus_check, range_max, RangeReport};
pub use ratcore::{floor_rat, harmonic, lambda_enclosure, partial_sum_t, rat, Enclosure, Rat};
pub use verify::{run_checks, CheckResult};
