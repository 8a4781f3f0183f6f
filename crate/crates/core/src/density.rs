//! Values of `f_n(1/t)` approximating any target `u >= λ`.
//!
//! For `t >= 2` the values `g(m) = f_{mt+t-1}(1/t)` increase strictly with
//! `m`, start at `g(1) = t_{t-1}`, and grow without bound. With `m̂` the
//! largest `m` such that `g(m) < u`, the `t` values `f_n(1/t)` for
//! `n = m̂t, ..., m̂t+t-1` step down from above `u` to below it in steps
//! smaller than `1/t`, so one of them is within `1/t` of `u`.
//!
//! All values are exact, which caps how far this can go: `f_n(1/t)` has a
//! denominator of roughly `n / ln 10` digits. Every entry point therefore
//! takes a [`DensityConfig`] with a hard bound on the order `n` it may
//! evaluate.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ratcore::{lambda_cmp, partial_sum_t, LcmBasis, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    #[error("t must be at least 2, got {0}")]
    InvalidT(u64),
    #[error("target {u} is not above t_{{t-1}} = {floor} for t = {t}; increase t or u")]
    BelowPartialSum { u: Rat, t: u64, floor: Rat },
    #[error("target {0} is below lambda = 1 - log 2; density is only guaranteed on [lambda, inf)")]
    BelowLambda(Rat),
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(Rat),
    #[error(
        "reaching {u} with t = {t} needs f_n(1/t) beyond n = {max_n}, the exact-evaluation budget"
    )]
    BudgetExceeded { u: Rat, t: u64, max_n: u64 },
}

/// Limits for the exact search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityConfig {
    /// Largest order `n` at which `f_n(1/t)` may be evaluated exactly.
    pub max_n: u64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { max_n: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApproxResult {
    pub u: Rat,
    pub t: u64,
    pub m_hat: u64,
    pub n_hat: u64,
    /// `f_{n_hat}(1/t)`
    pub s: Rat,
    /// `|u - s|`
    pub err: Rat,
}

/// `L * sum_{k=1}^{n} [k/t]/k` on `basis` (order `>= n`).
fn scaled_floor_sum(basis: &LcmBasis, n: u64, t: u64) -> BigUint {
    let lcm = basis.lcm();
    let mut acc = BigUint::zero();
    let mut j = 1u64;
    while j * t <= n {
        let end = (j * t + t - 1).min(n);
        let mut block = BigUint::zero();
        for k in j * t..=end {
            block += lcm / k;
        }
        acc += block * j;
        j += 1;
    }
    acc
}

/// `L * f_n(1/t)` with `L = lcm(1..n)`, plus the basis used.
fn scaled_unit_value(n: u64, t: u64) -> (LcmBasis, BigInt) {
    let basis = LcmBasis::new(n);
    let sum = scaled_floor_sum(&basis, n, t);
    let value = BigInt::from(basis.lcm() * (n / t)) - BigInt::from(sum);
    (basis, value)
}

/// Exact `f_n(1/t)`.
pub fn unit_fraction_value(n: u64, t: u64) -> Rat {
    let (basis, scaled) = scaled_unit_value(n, t);
    basis.to_rat(scaled)
}

/// `g(m) = f_{mt+t-1}(1/t) < u`, compared without reducing.
fn below_target(m: u64, t: u64, u: &Rat) -> bool {
    let (basis, scaled) = scaled_unit_value(m * t + t - 1, t);
    let lhs = scaled * u.denom();
    let rhs = u.numer() * BigInt::from(basis.lcm().clone());
    lhs < rhs
}

/// Floating estimate of `g(m)`, accurate to ~1e-12 for the orders the budget
/// allows. Only used to give up early; never to decide a result.
fn estimate(m: u64, t: u64) -> f64 {
    let n = m * t + t - 1;
    let mut sum = 0.0f64;
    for k in t..=n {
        sum += (k / t) as f64 / k as f64;
    }
    m as f64 - sum
}

fn check_t(t: u64) -> Result<(), DensityError> {
    if t < 2 {
        return Err(DensityError::InvalidT(t));
    }
    Ok(())
}

pub fn find_m_hat(u: &Rat, t: u64) -> Result<u64, DensityError> {
    find_m_hat_with(u, t, &DensityConfig::default())
}

/// Largest `m` with `f_{mt+t-1}(1/t) < u`, by doubling then bisection.
pub fn find_m_hat_with(u: &Rat, t: u64, config: &DensityConfig) -> Result<u64, DensityError> {
    check_t(t)?;
    let floor = partial_sum_t(t - 1);
    if *u <= floor {
        return Err(DensityError::BelowPartialSum {
            u: u.clone(),
            t,
            floor,
        });
    }
    let over_budget = || DensityError::BudgetExceeded {
        u: u.clone(),
        t,
        max_n: config.max_n,
    };
    let order_of = |m: u64| m.checked_mul(t).and_then(|v| v.checked_add(t - 1));
    let within = |m: u64| order_of(m).is_some_and(|n| n <= config.max_n);

    // the answer needs g(m̂ + 1) >= u evaluated inside the budget
    let m_cap = (config.max_n.saturating_sub(t - 1)) / t;
    if m_cap >= 1 && estimate(m_cap, t) < u.to_f64() - 1e-9 * u.to_f64().max(1.0) {
        return Err(over_budget());
    }

    // g(1) = t_{t-1} < u
    let mut lo = 1u64;
    let mut hi = 2u64;
    loop {
        if !within(hi) {
            return Err(over_budget());
        }
        if !below_target(hi, t, u) {
            break;
        }
        lo = hi;
        hi *= 2;
    }
    // g(lo) < u <= g(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below_target(mid, t, u) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `(n, f_n(1/t))` for `n = m̂t, ..., m̂t+t-1`.
pub fn candidate_values(m_hat: u64, t: u64) -> Vec<(u64, Rat)> {
    let top = m_hat * t + t - 1;
    let basis = LcmBasis::new(top);
    let lcm = BigInt::from(basis.lcm().clone());
    let mut sum = BigInt::from(scaled_floor_sum(&basis, m_hat * t, t));
    let mut out = Vec::with_capacity(t as usize);
    for n in m_hat * t..=top {
        if n > m_hat * t {
            sum += BigInt::from(basis.lcm() / n) * m_hat;
        }
        out.push((n, basis.to_rat(&lcm * m_hat - &sum)));
    }
    out
}

pub fn approximate(u: &Rat, t: u64) -> Result<ApproxResult, DensityError> {
    approximate_with(u, t, &DensityConfig::default())
}

/// Element `s = f_n(1/t)` of the value set within `1/t` of `u`; among the
/// candidate orders the one minimizing `|u - s|` is returned, ties going to
/// the smaller order.
pub fn approximate_with(
    u: &Rat,
    t: u64,
    config: &DensityConfig,
) -> Result<ApproxResult, DensityError> {
    let m_hat = find_m_hat_with(u, t, config)?;
    let top = m_hat * t + t - 1;
    let basis = LcmBasis::new(top);
    let lcm = BigInt::from(basis.lcm().clone());
    let target = u.numer() * &lcm;
    let mut sum = BigInt::from(scaled_floor_sum(&basis, m_hat * t, t));
    // distances are compared on the common scale u.den * L
    let mut best: Option<(u64, BigInt, BigInt)> = None;
    for n in m_hat * t..=top {
        if n > m_hat * t {
            sum += BigInt::from(basis.lcm() / n) * m_hat;
        }
        let scaled = &lcm * m_hat - &sum;
        let dist = (&target - &scaled * u.denom()).abs();
        if best.as_ref().is_none_or(|(_, _, d)| dist < *d) {
            best = Some((n, scaled, dist));
        }
    }
    let (n_hat, scaled, _) = best.expect("t >= 2 candidates");
    let s = basis.to_rat(scaled);
    let err = (u - &s).abs();
    Ok(ApproxResult {
        u: u.clone(),
        t,
        m_hat,
        n_hat,
        s,
        err,
    })
}

pub fn refine(u: &Rat, eps: &Rat) -> Result<ApproxResult, DensityError> {
    refine_with(u, eps, &DensityConfig::default())
}

/// Runs [`approximate_with`] at `t = max(2, ceil(1/eps) + 1)`, so that
/// `err < 1/t < eps`.
pub fn refine_with(
    u: &Rat,
    eps: &Rat,
    config: &DensityConfig,
) -> Result<ApproxResult, DensityError> {
    if !eps.numer().is_positive() {
        return Err(DensityError::NonPositiveTolerance(eps.clone()));
    }
    if lambda_cmp(u) == Ordering::Less {
        return Err(DensityError::BelowLambda(u.clone()));
    }
    let inv = eps.recip().expect("eps > 0");
    let ceil = inv.numer().div_ceil(inv.denom());
    let mut t = u64::try_from(ceil + 1u32).unwrap_or(u64::MAX).max(2);
    // unreachable for rational u > λ > t_{t-1}, kept for the contract
    while *u <= partial_sum_t(t - 1) {
        t += 1;
    }
    approximate_with(u, t, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::eval_f;

    /// Linear scan with the general evaluator.
    fn m_hat_by_scan(u: &Rat, t: u64) -> u64 {
        let x = Rat::of(1, t as i64);
        let mut m = 1;
        while eval_f((m + 1) * t + t - 1, &x).unwrap() < *u {
            m += 1;
        }
        m
    }

    #[test]
    fn unit_values_match_general_evaluator() {
        for t in 2..=7u64 {
            let x = Rat::of(1, t as i64);
            for n in 1..=60u64 {
                assert_eq!(
                    unit_fraction_value(n, t),
                    eval_f(n, &x).unwrap(),
                    "n={n} t={t}"
                );
            }
        }
    }

    #[test]
    fn m_hat_examples() {
        assert_eq!(find_m_hat(&Rat::of(1, 3), 3).unwrap(), 1);
        let u = Rat::of(13, 60) + Rat::of(1, 1000);
        assert_eq!(find_m_hat(&u, 3).unwrap(), 1);
        let m = find_m_hat(&Rat::one(), 2).unwrap();
        let half = Rat::of(1, 2);
        assert!(eval_f(2 * m + 1, &half).unwrap() < Rat::one());
        assert!(eval_f(2 * m + 3, &half).unwrap() >= Rat::one());
    }

    #[test]
    fn m_hat_rejects_low_targets() {
        assert!(matches!(
            find_m_hat(&Rat::of(1, 6), 2),
            Err(DensityError::BelowPartialSum { .. })
        ));
        assert!(matches!(
            find_m_hat(&Rat::of(1, 5), 3),
            Err(DensityError::BelowPartialSum { .. })
        ));
        assert_eq!(find_m_hat(&Rat::one(), 1), Err(DensityError::InvalidT(1)));
    }

    #[test]
    fn bisection_agrees_with_scan() {
        for u in [
            Rat::of(31, 100),
            Rat::of(1, 3),
            Rat::of(2, 5),
            Rat::of(1, 2),
            Rat::of(7, 10),
            Rat::one(),
        ] {
            for t in 2..=12u64 {
                assert_eq!(
                    find_m_hat(&u, t).unwrap(),
                    m_hat_by_scan(&u, t),
                    "u={u} t={t}"
                );
            }
        }
    }

    #[test]
    fn approximate_examples() {
        let r = approximate(&Rat::of(1, 3), 3).unwrap();
        assert_eq!(
            (r.n_hat, r.s.clone(), r.err.clone()),
            (4, Rat::of(5, 12), Rat::of(1, 12))
        );
        // m̂ is the largest m with g(m) < u, so 2/3 = f_3(1/3) is not a candidate
        let r = approximate(&Rat::of(2, 3), 3).unwrap();
        assert_eq!(r.m_hat, 6);
        assert_eq!((r.n_hat, r.s.clone()), (20, Rat::of(16185413, 25865840)));
        assert_eq!(r.err, Rat::of(3175441, 77597520));
        let r = approximate(&Rat::of(1, 2), 2).unwrap();
        assert!(r.err < Rat::of(1, 2));
        assert_eq!(r.s, eval_f(r.n_hat, &Rat::of(1, 2)).unwrap());
    }

    #[test]
    fn candidates_step_down_by_less_than_one_over_t() {
        for (u, t) in [(Rat::of(1, 2), 5u64), (Rat::one(), 9), (Rat::of(7, 10), 17)] {
            let m = find_m_hat(&u, t).unwrap();
            let c = candidate_values(m, t);
            assert_eq!(c.len() as u64, t);
            let bound = Rat::new(m, m * t + 1).unwrap();
            for w in c.windows(2) {
                assert!(w[1].1 < w[0].1);
                assert!(&w[0].1 - &w[1].1 <= bound);
            }
            assert!(bound < Rat::of(1, t as i64));
            // the top candidate is g(m̂) < u, the bottom one is above u
            assert!(c.last().unwrap().1 < u);
            assert!(c[0].1 > u);
        }
    }

    #[test]
    fn refine_examples() {
        let r = refine(&Rat::of(1, 2), &Rat::of(1, 100)).unwrap();
        assert_eq!(r.t, 101);
        assert!(r.err < Rat::of(1, 100));
        let r = refine(&Rat::of(31, 100), &Rat::of(1, 50)).unwrap();
        assert!(r.err < Rat::of(1, 50));
        assert_eq!(r.s, eval_f(r.n_hat, &Rat::of(1, r.t as i64)).unwrap());
        assert_eq!(
            refine(&Rat::of(1, 4), &Rat::of(1, 10)),
            Err(DensityError::BelowLambda(Rat::of(1, 4)))
        );
        assert!(matches!(
            refine(&Rat::one(), &Rat::zero()),
            Err(DensityError::NonPositiveTolerance(_))
        ));
    }

    #[test]
    fn budget_is_enforced_quickly() {
        let tight = DensityConfig { max_n: 1_000 };
        assert!(matches!(
            approximate_with(&Rat::from(5), 3, &tight),
            Err(DensityError::BudgetExceeded { .. })
        ));
        assert!(approximate_with(&Rat::one(), 3, &tight).is_ok());
    }
}
