//! Classification of values of `f_n` relative to `λ`.
//!
//! Below `λ` the only values are `0`, `4/15` and the partial sums `t_m`;
//! which one occurs is decided by `d = d_{n,x}`, the jump `[dx] - d[x]`,
//! and `n`:
//!
//! | condition                              | value              |
//! |----------------------------------------|--------------------|
//! | `d = 1`                                | `0`                |
//! | `d = 2, n = 3`                         | `t_1 = 1/6`        |
//! | `d = 2, n = 5`                         | `4/15`             |
//! | `d = 2`, other `n`                     | `>= 71/210 > λ`    |
//! | `d > 2`, jump `= 1`, `n = 2d - 1`      | `t_{d-1}`          |
//! | `d > 2`, otherwise                     | `> λ`              |
//!
//! [`classify`] re-evaluates `f_n(x)` and fails loudly if the branch's
//! implied value does not match.

use std::cmp::Ordering;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::evaluator::{eval_detail, EvalDetail, EvalError};
use crate::ratcore::{lambda_cmp, partial_sum_t, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("membership is only defined for v >= 0, got {0}")]
    Negative(Rat),
    #[error("classification inconsistent at n = {n}, x = {x}: branch {branch} implies {implied}, evaluated {value}")]
    Inconsistent {
        n: u64,
        x: Rat,
        branch: &'static str,
        implied: String,
        value: Rat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    Zero,
    PartialSum(u64),
    FourFifteenths,
    AboveLambda,
}

impl Tag {
    pub fn name(&self) -> &'static str {
        match self {
            Tag::Zero => "Zero",
            Tag::PartialSum(_) => "PartialSum",
            Tag::FourFifteenths => "FourFifteenths",
            Tag::AboveLambda => "AboveLambda",
        }
    }
}

impl std::fmt::Display for Tag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tag::PartialSum(m) => write!(f, "PartialSum({m})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub tag: Tag,
    pub value: Rat,
    pub certificate: EvalDetail,
}

impl Serialize for Classification {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("n", &self.certificate.n)?;
        map.serialize_entry("x", &self.certificate.x)?;
        map.serialize_entry("tag", self.tag.name())?;
        if let Tag::PartialSum(m) = self.tag {
            map.serialize_entry("m", &m)?;
        }
        map.serialize_entry("value", &self.value)?;
        map.serialize_entry("d", &self.certificate.d)?;
        map.serialize_entry("x_n", &self.certificate.x_n)?;
        map.end()
    }
}

pub fn classify(n: u64, x: &Rat) -> Result<Classification, ClassifyError> {
    let detail = eval_detail(n, x)?;
    let value = detail.f.clone();
    let d = detail.d;
    let inconsistent = |branch: &'static str, implied: String| ClassifyError::Inconsistent {
        n,
        x: x.clone(),
        branch,
        implied,
        value: value.clone(),
    };
    let exact = |tag: Tag, implied: Rat, branch: &'static str| {
        if value == implied {
            Ok(tag)
        } else {
            Err(inconsistent(branch, implied.to_string()))
        }
    };
    let above = |branch: &'static str| {
        if lambda_cmp(&value) == Ordering::Greater {
            Ok(Tag::AboveLambda)
        } else {
            Err(inconsistent(branch, "a value above lambda".to_string()))
        }
    };
    let tag = match d {
        1 => exact(Tag::Zero, Rat::zero(), "d = 1")?,
        2 => match n {
            3 => exact(Tag::PartialSum(1), Rat::of(1, 6), "d = 2, n = 3")?,
            5 => exact(Tag::FourFifteenths, Rat::of(4, 15), "d = 2, n = 5")?,
            _ => {
                if value < Rat::of(71, 210) {
                    return Err(inconsistent(
                        "d = 2, n not in {3, 5}",
                        ">= 71/210".to_string(),
                    ));
                }
                above("d = 2, n not in {3, 5}")?
            }
        },
        _ if detail.jump == 1 && n == 2 * d - 1 => exact(
            Tag::PartialSum(d - 1),
            partial_sum_t(d - 1),
            "d > 2, jump = 1, n = 2d - 1",
        )?,
        _ => above("d > 2, jump != 1 or n != 2d - 1")?,
    };
    Ok(Classification {
        tag,
        value,
        certificate: detail,
    })
}

/// Outcome of [`below_lambda_membership`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Membership {
    Zero,
    PartialSum(u64),
    FourFifteenths,
    /// `v >= λ`, or `v < λ` but not one of the exceptional values.
    NotBelowLambda,
}

/// Decides whether `v` is one of the values `{0, 4/15} ∪ {t_m : m >= 1}`
/// lying below `λ`.
pub fn below_lambda_membership(v: &Rat) -> Result<Membership, ClassifyError> {
    if v.is_negative() {
        return Err(ClassifyError::Negative(v.clone()));
    }
    if v.is_zero() {
        return Ok(Membership::Zero);
    }
    if *v == Rat::of(4, 15) {
        return Ok(Membership::FourFifteenths);
    }
    if lambda_cmp(v) == Ordering::Greater {
        return Ok(Membership::NotBelowLambda);
    }
    // t_m increases to λ > v, so this scan terminates
    let mut t = Rat::zero();
    for m in 1u64.. {
        t = t + Rat::of(1, (2 * m * (2 * m + 1)) as i64);
        match t.cmp(v) {
            Ordering::Less => continue,
            Ordering::Equal => return Ok(Membership::PartialSum(m)),
            Ordering::Greater => return Ok(Membership::NotBelowLambda),
        }
    }
    unreachable!()
}
