//! Farey fractions of order `n` in `[0, 1)`: exactly the points where
//! `f_n` jumps on one period.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ratcore::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FareyError {
    #[error("{a} and {b} are not consecutive in the Farey sequence of order {order}")]
    NotConsecutive { a: String, b: String, order: u64 },
}

/// A reduced fraction `p/q` in `[0, 1)` with `q <= order`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Breakpoint {
    pub p: u64,
    pub q: u64,
    pub order: u64,
}

impl Breakpoint {
    pub fn new(p: u64, q: u64, order: u64) -> Option<Breakpoint> {
        if q == 0 || p >= q || q > order || num_integer::gcd(p, q) != 1 {
            return None;
        }
        Some(Breakpoint { p, q, order })
    }

    pub fn to_rat(&self) -> Rat {
        Rat::new(self.p, self.q).expect("q >= 1")
    }

    fn cmp_value(&self, other: &Breakpoint) -> Ordering {
        (self.p as u128 * other.q as u128).cmp(&(other.p as u128 * self.q as u128))
    }
}

impl PartialOrd for Breakpoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Breakpoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other).then(self.order.cmp(&other.order))
    }
}

impl fmt::Display for Breakpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl Serialize for Breakpoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn is_consecutive(a: &Breakpoint, b: &Breakpoint, order: u64) -> bool {
    a.q <= order
        && b.q <= order
        && (b.p as u128 * a.q as u128) == (a.p as u128 * b.q as u128) + 1
        && a.q + b.q > order
}

/// Successor of `b` given its predecessor `a` in the Farey sequence of order
/// `order`, or `None` when `b` is the last fraction below 1.
pub fn farey_next(
    a: &Breakpoint,
    b: &Breakpoint,
    order: u64,
) -> Result<Option<Breakpoint>, FareyError> {
    if !is_consecutive(a, b, order) {
        return Err(FareyError::NotConsecutive {
            a: a.to_string(),
            b: b.to_string(),
            order,
        });
    }
    Ok(step(a, b, order))
}

fn step(a: &Breakpoint, b: &Breakpoint, order: u64) -> Option<Breakpoint> {
    let k = (order + a.q) / b.q;
    let p = k * b.p - a.p;
    let q = k * b.q - a.q;
    (p < q).then_some(Breakpoint { p, q, order })
}

/// Iterator over the Farey sequence of a fixed order, starting at `0/1`.
#[derive(Debug, Clone)]
pub struct FareyIter {
    order: u64,
    prev: Option<Breakpoint>,
    next: Option<Breakpoint>,
}

impl FareyIter {
    /// Panics if `order == 0`.
    pub fn new(order: u64) -> FareyIter {
        assert!(order >= 1, "Farey order must be at least 1");
        FareyIter {
            order,
            prev: None,
            next: Some(Breakpoint { p: 0, q: 1, order }),
        }
    }
}

impl Iterator for FareyIter {
    type Item = Breakpoint;

    fn next(&mut self) -> Option<Breakpoint> {
        let current = self.next?;
        self.next = match self.prev {
            // the first step from 0/1 goes to 1/order
            None => (self.order >= 2).then_some(Breakpoint {
                p: 1,
                q: self.order,
                order: self.order,
            }),
            Some(prev) => step(&prev, &current, self.order),
        };
        self.prev = Some(current);
        Some(current)
    }
}

pub fn farey_sequence(order: u64) -> Vec<Breakpoint> {
    FareyIter::new(order).collect()
}

/// `(a.p + b.p) / (a.q + b.q)`; strictly inside the gap between Farey
/// neighbours, where `f_n` is constant.
pub fn mediant(a: &Breakpoint, b: &Breakpoint) -> Rat {
    Rat::new(a.p + b.p, a.q + b.q).expect("positive denominator")
}

/// The mediant of `b` with its right neighbour, or of `b` with `1/1` when `b`
/// is the last fraction. Either way a point inside the gap starting at `b`.
pub fn gap_interior(b: &Breakpoint, right: Option<&Breakpoint>) -> Rat {
    match right {
        Some(c) => mediant(b, c),
        None => Rat::new(b.p + 1, b.q + 1).expect("positive denominator"),
    }
}
