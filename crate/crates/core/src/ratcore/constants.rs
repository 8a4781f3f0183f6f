use std::cmp::Ordering;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::Serialize;

use super::{LcmBasis, Rat, RatError};

/// `HARMONIC[i] = H_{i+1}`, grown on demand.
static HARMONIC: RwLock<Vec<Rat>> = RwLock::new(Vec::new());

/// `LAMBDA_TABLE[i] = lambda_enclosure(2^i)`, grown on demand.
static LAMBDA_TABLE: RwLock<Vec<Enclosure>> = RwLock::new(Vec::new());

/// Exact `H_n = 1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: u64) -> Result<Rat, RatError> {
    if n == 0 {
        return Err(RatError::Domain("harmonic numbers are defined for n >= 1"));
    }
    let idx = (n - 1) as usize;
    if let Some(h) = HARMONIC.read().expect("harmonic memo poisoned").get(idx) {
        return Ok(h.clone());
    }
    let mut table = HARMONIC.write().expect("harmonic memo poisoned");
    while table.len() <= idx {
        let k = table.len() as i64 + 1;
        let next = match table.last() {
            Some(prev) => prev + &Rat::of(1, k),
            None => Rat::one(),
        };
        table.push(next);
    }
    Ok(table[idx].clone())
}

/// Exact `t_m = sum_{k=1}^{m} 1/(2k(2k+1))`; `t_0 = 0`.
pub fn partial_sum_t(m: u64) -> Rat {
    if m == 0 {
        return Rat::zero();
    }
    let basis = LcmBasis::new(2 * m + 1);
    let lcm = basis.lcm();
    let mut acc = BigUint::zero();
    for k in 1..=m {
        acc += lcm / (2 * k) / (2 * k + 1);
    }
    basis.to_rat(BigInt::from(acc))
}

/// Closed interval `[lo, hi]` known to contain `λ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Enclosure {
    pub lo: Rat,
    pub hi: Rat,
}

impl Enclosure {
    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rat) -> bool {
        self.lo <= *v && *v <= self.hi
    }
}

/// `[t_m, t_m + 1/(4m)]`.
///
/// The tail after `m` terms is below `sum_{k>m} 1/(4k^2) < 1/(4m)`.
pub fn lambda_enclosure(m: u64) -> Result<Enclosure, RatError> {
    if m == 0 {
        return Err(RatError::Domain("lambda enclosure needs m >= 1"));
    }
    let lo = partial_sum_t(m);
    let hi = &lo + &Rat::new(1, BigInt::from(m) * 4)?;
    Ok(Enclosure { lo, hi })
}

fn enclosure_at_level(level: usize) -> Enclosure {
    if let Some(e) = LAMBDA_TABLE
        .read()
        .expect("lambda table poisoned")
        .get(level)
    {
        return e.clone();
    }
    let mut table = LAMBDA_TABLE.write().expect("lambda table poisoned");
    while table.len() <= level {
        let m = 1u64 << table.len();
        table.push(lambda_enclosure(m).expect("m >= 1"));
    }
    table[level].clone()
}

/// Orders a rational against `λ`. Never returns `Equal`: `λ` is irrational,
/// so shrinking the enclosure always separates it from `v` eventually.
pub fn lambda_cmp(v: &Rat) -> Ordering {
    for level in 0.. {
        let e = enclosure_at_level(level);
        if *v < e.lo {
            return Ordering::Less;
        }
        if *v > e.hi {
            return Ordering::Greater;
        }
    }
    unreachable!("enclosure levels are unbounded")
}

/// Checks `1 - sum_{k=m}^{2m-1} 1/k = t_{m-1}` with both sides computed
/// independently.
pub fn telescoping_check(m: u64) -> Result<bool, RatError> {
    if m == 0 {
        return Err(RatError::Domain("telescoping identity needs m >= 1"));
    }
    let basis = LcmBasis::new(2 * m - 1);
    let mut acc = BigUint::zero();
    for k in m..=2 * m - 1 {
        acc += basis.cofactor(k);
    }
    let lhs = Rat::one() - basis.to_rat(BigInt::from(acc));
    Ok(lhs == partial_sum_t(m - 1))
}
