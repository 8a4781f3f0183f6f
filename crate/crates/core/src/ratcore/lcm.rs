use std::ops::Range;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

use super::Rat;

/// Common denominator `L = lcm(1, ..., order)` together with its prime
/// factorization.
///
/// Any sum of terms `c_k / k` with `k <= order` is an integer multiple of
/// `1/L`, so such sums can be accumulated as plain big integers and reduced
/// once at the end using the known factorization of `L`.
#[derive(Debug, Clone)]
pub struct LcmBasis {
    order: u64,
    lcm: BigUint,
    /// `(p, p^e)` with `p^e || L`.
    powers: Vec<(u64, u64)>,
    /// Products of consecutive `p^e` that fit in a `u64`, with the slice of
    /// `powers` each one covers; one big remainder per batch.
    batches: Vec<(u64, Range<usize>)>,
}

impl LcmBasis {
    /// Panics if `order == 0`.
    pub fn new(order: u64) -> LcmBasis {
        assert!(order >= 1, "lcm basis needs order >= 1");
        let mut lcm = BigUint::one();
        let mut powers = Vec::new();
        for p in primes_up_to(order) {
            let mut power = p;
            while let Some(next) = power.checked_mul(p).filter(|&v| v <= order) {
                power = next;
            }
            lcm *= power;
            powers.push((p, power));
        }
        let mut batches: Vec<(u64, Range<usize>)> = Vec::new();
        for (i, &(_, pe)) in powers.iter().enumerate() {
            match batches.last_mut() {
                Some((m, r)) if m.checked_mul(pe).is_some() => {
                    *m *= pe;
                    r.end = i + 1;
                }
                _ => batches.push((pe, i..i + 1)),
            }
        }
        LcmBasis {
            order,
            lcm,
            powers,
            batches,
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn lcm(&self) -> &BigUint {
        &self.lcm
    }

    /// `L / k`. Panics unless `1 <= k <= order`.
    pub fn cofactor(&self, k: u64) -> BigUint {
        assert!(
            k >= 1 && k <= self.order,
            "cofactor index {k} outside 1..={}",
            self.order
        );
        &self.lcm / k
    }

    /// Converts the scaled numerator `num` (meaning `num / L`) to a reduced
    /// rational.
    pub fn to_rat(&self, num: BigInt) -> Rat {
        if num.is_zero() {
            return Rat::zero();
        }
        let (sign, mag) = num.into_parts();
        // p^min(e, v_p(num)) is read off num mod p^e
        let mut g = BigUint::one();
        let mut small: u64 = 1;
        for (modulus, range) in &self.batches {
            let rem = (&mag % *modulus)
                .to_u64()
                .expect("remainder below a u64 modulus");
            for &(p, pe) in &self.powers[range.clone()] {
                let mut r = rem % pe;
                let mut common = 1;
                while common < pe && r % p == 0 {
                    common *= p;
                    r /= p;
                }
                match small.checked_mul(common) {
                    Some(v) => small = v,
                    None => {
                        g *= small;
                        small = common;
                    }
                }
            }
        }
        g *= small;
        let sign = if sign == Sign::Minus {
            Sign::Minus
        } else {
            Sign::Plus
        };
        if g.is_one() {
            return Rat::from_reduced(
                BigInt::from_biguint(sign, mag),
                BigInt::from(self.lcm.clone()),
            );
        }
        Rat::from_reduced(
            BigInt::from_biguint(sign, mag / &g),
            BigInt::from(&self.lcm / &g),
        )
    }

    /// Scales `x` onto this basis when its denominator divides `L`.
    pub fn scale(&self, x: &Rat) -> Option<BigInt> {
        let den = x.denom().magnitude();
        if !(&self.lcm % den).is_zero() {
            return None;
        }
        Some(x.numer() * BigInt::from(&self.lcm / den))
    }
}

pub(crate) fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}
