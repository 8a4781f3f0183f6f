//! Exact evaluation of `f_n(x)` and the auxiliary data `x_n`, `d_{n,x}`
//! used by the classification.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ratcore::{harmonic, LcmBasis, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("order n must be at least 1")]
    ZeroOrder,
    #[error("breakpoint denominator q = {q} must satisfy 1 <= q <= n = {n}")]
    DenominatorOutOfRange { q: u64, n: u64 },
}

/// The greatest-integer function used by an [`Evaluator`].
///
/// Only [`ExactFloor`] is correct; the trait exists so that the audit in
/// [`crate::verify`] can be run against a deliberately broken rule.
pub trait FloorRule: Send + Sync {
    fn floor(&self, num: &BigInt, den: &BigInt) -> BigInt;
}

/// Floor toward negative infinity.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactFloor;

impl FloorRule for ExactFloor {
    fn floor(&self, num: &BigInt, den: &BigInt) -> BigInt {
        num.div_floor(den)
    }
}

/// Full evaluation record for one `(n, x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalDetail {
    pub n: u64,
    pub x: Rat,
    /// `[nx] - sum_{k=1}^{n} [kx]/k`
    pub f: Rat,
    /// `max_k [kx]/k`, the smallest `y` with `[ky] = [kx]` for all `k <= n`
    pub x_n: Rat,
    /// Smallest `k` attaining `x_n`; equals the reduced denominator of `x_n`.
    pub d: u64,
    /// `n mod d`
    pub r: u64,
    /// `[dx] - d[x]`
    pub jump: i64,
}

#[derive(Debug, Clone, Default)]
pub struct Evaluator<R = ExactFloor> {
    rule: R,
}

impl Evaluator<ExactFloor> {
    pub fn new() -> Self {
        Evaluator { rule: ExactFloor }
    }
}

impl<R: FloorRule> Evaluator<R> {
    pub fn with_rule(rule: R) -> Self {
        Evaluator { rule }
    }

    fn floor_of(&self, x: &Rat) -> BigInt {
        self.rule.floor(x.numer(), x.denom())
    }

    fn floor_multiple(&self, k: u64, x: &Rat) -> BigInt {
        self.rule.floor(&(x.numer() * k), x.denom())
    }

    /// `f_n(x)`, reduced to the fractional part of `x` first (f has period 1).
    pub fn eval_f(&self, n: u64, x: &Rat) -> Result<Rat, EvalError> {
        if n == 0 {
            return Err(EvalError::ZeroOrder);
        }
        let y = x - &Rat::from_integer(self.floor_of(x));
        let basis = LcmBasis::new(n);
        let lcm = BigInt::from(basis.lcm().clone());
        let mut acc = BigInt::zero();
        for k in 1..=n {
            let fl = self.floor_multiple(k, &y);
            if !fl.is_zero() {
                acc += fl * BigInt::from(basis.cofactor(k));
            }
        }
        let scaled = self.floor_multiple(n, &y) * lcm - acc;
        Ok(basis.to_rat(scaled))
    }

    pub fn eval_detail(&self, n: u64, x: &Rat) -> Result<EvalDetail, EvalError> {
        let f = self.eval_f(n, x)?;
        // first maximizer of [kx]/k, compared by cross-multiplication
        let mut best_num = self.floor_multiple(1, x);
        let mut d = 1u64;
        for k in 2..=n {
            let num = self.floor_multiple(k, x);
            if &num * d > &best_num * k {
                best_num = num;
                d = k;
            }
        }
        let x_n = Rat::new(best_num.clone(), d).expect("d >= 1");
        let jump = best_num - self.floor_of(x) * d;
        Ok(EvalDetail {
            n,
            x: x.clone(),
            f,
            x_n,
            d,
            r: n % d,
            jump: jump.to_i64().expect("jump is bounded by d"),
        })
    }
}

/// `f_n(x) = [nx] - sum_{k=1}^{n} [kx]/k`, exactly.
pub fn eval_f(n: u64, x: &Rat) -> Result<Rat, EvalError> {
    Evaluator::new().eval_f(n, x)
}

pub fn eval_detail(n: u64, x: &Rat) -> Result<EvalDetail, EvalError> {
    Evaluator::new().eval_detail(n, x)
}

/// Jump of `f_n` at a breakpoint `p/q` in lowest terms:
/// `(1 if q | n else 0) - H_{floor(n/q)} / q`.
///
/// Crossing `p/q` raises `[kx]` by one exactly for the multiples `k` of `q`.
pub fn breakpoint_delta(n: u64, q: u64) -> Result<Rat, EvalError> {
    if q == 0 || q > n {
        return Err(EvalError::DenominatorOutOfRange { q, n });
    }
    let h = harmonic(n / q).expect("n / q >= 1");
    let own = if n.is_multiple_of(q) {
        Rat::one()
    } else {
        Rat::zero()
    };
    Ok(own - h * Rat::of(1, q as i64))
}

/// Scaled breakpoint deltas `L * delta(n, q)` for `q = 1..=n` on the basis
/// `L = lcm(1..n)`; index 0 is unused and holds zero.
pub(crate) fn scaled_deltas(basis: &LcmBasis) -> Vec<BigInt> {
    let n = basis.order();
    let lcm = basis.lcm();
    // harmonic_scaled[m] = L * H_m
    let mut harmonic_scaled = Vec::with_capacity(n as usize + 1);
    harmonic_scaled.push(BigUint::zero());
    for m in 1..=n {
        let next = &harmonic_scaled[m as usize - 1] + lcm / m;
        harmonic_scaled.push(next);
    }
    let mut deltas = Vec::with_capacity(n as usize + 1);
    deltas.push(BigInt::zero());
    for q in 1..=n {
        let tail = BigInt::from(&harmonic_scaled[(n / q) as usize] / q);
        let own = if n.is_multiple_of(q) {
            BigInt::from(lcm.clone())
        } else {
            BigInt::zero()
        };
        deltas.push(own - tail);
    }
    deltas
}
