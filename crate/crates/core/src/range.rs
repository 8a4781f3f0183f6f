//! Exact enumeration of `S_n`, the value set of `f_n`.
//!
//! `f_n` is right-continuous and constant on every half-open Farey gap
//! `[p/q, next)`, so one value per gap gives the whole range. The default
//! method walks the gaps left to right adding the precomputed jump at each
//! breakpoint; all arithmetic happens on the common denominator
//! `lcm(1..n)`, so the walk is one big-integer addition per gap.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::evaluator::{eval_f, scaled_deltas, EvalError};
use crate::farey::{farey_sequence, gap_interior, Breakpoint};
use crate::par::{self, Exec};
use crate::ratcore::{harmonic, lambda_cmp, LcmBasis, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RangeError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Domain(&'static str),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// How gap values are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Accumulate breakpoint jumps along the Farey walk.
    #[default]
    DeltaWalk,
    /// Evaluate `f_n` from scratch at every gap's interior point.
    Naive,
}

/// The half-open interval `[left, right)` on which `f_n` takes one value;
/// `right` is the next breakpoint, or `1` for the final gap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub left: Breakpoint,
    pub right: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RangeEntry {
    pub value: Rat,
    /// Gaps attaining `value`, in increasing `x` order.
    pub witnesses: Vec<Witness>,
}

impl RangeEntry {
    pub fn multiplicity(&self) -> usize {
        self.witnesses.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RangeReport {
    pub n: u64,
    /// Distinct values, ascending.
    pub entries: Vec<RangeEntry>,
    /// Smallest positive value; `None` only for `n = 1`.
    pub min_nonzero: Option<Rat>,
    pub max_value: Rat,
    /// Values below `λ`, ascending.
    pub below_lambda: Vec<Rat>,
}

/// One row of the step function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapRow<'a> {
    pub left: Breakpoint,
    pub right: &'a Rat,
    pub value: &'a Rat,
}

impl RangeReport {
    pub fn values(&self) -> impl Iterator<Item = &Rat> {
        self.entries.iter().map(|e| &e.value)
    }

    pub fn contains(&self, v: &Rat) -> bool {
        self.entries.binary_search_by(|e| e.value.cmp(v)).is_ok()
    }

    pub fn gap_count(&self) -> usize {
        self.entries.iter().map(RangeEntry::multiplicity).sum()
    }

    /// Every gap with its value, in increasing `x` order.
    pub fn gaps(&self) -> Vec<GapRow<'_>> {
        let mut rows: Vec<GapRow<'_>> = self
            .entries
            .iter()
            .flat_map(|e| {
                e.witnesses.iter().map(move |w| GapRow {
                    left: w.left,
                    right: &w.right,
                    value: &e.value,
                })
            })
            .collect();
        rows.sort_by_key(|r| r.left);
        rows
    }
}

pub fn enumerate_range(n: u64) -> Result<RangeReport, RangeError> {
    enumerate_range_with(n, Method::DeltaWalk, Exec::default())
}

pub fn enumerate_range_with(n: u64, method: Method, exec: Exec) -> Result<RangeReport, RangeError> {
    if n == 0 {
        return Err(EvalError::ZeroOrder.into());
    }
    let seq = farey_sequence(n);
    let (values, order) = match method {
        Method::DeltaWalk => delta_walk_values(n, &seq, exec),
        Method::Naive => {
            let values = naive_values(n, &seq, exec)?;
            let mut order: Vec<usize> = (0..values.len()).collect();
            order.sort_by(|&a, &b| values[a].cmp(&values[b]));
            (values, order)
        }
    };
    Ok(assemble(n, &seq, values, order))
}

fn chunk_len(total: usize) -> usize {
    (total / (par::current_workers() * 4).max(1)).max(256)
}

/// `L * f_n(p/q)` straight from the definition, `L = lcm(1..n)`.
fn scaled_value_at(basis: &LcmBasis, b: &Breakpoint) -> BigInt {
    let n = basis.order();
    let mut acc = BigInt::zero();
    for k in 1..=n {
        let fl = (k * b.p) / b.q;
        if fl != 0 {
            acc += BigInt::from(basis.cofactor(k)) * fl;
        }
    }
    BigInt::from(basis.lcm().clone()) * ((n * b.p) / b.q) - acc
}

/// Gap values plus the gap indices sorted by value (stable in `x`). The
/// scaled integers share one denominator, so they order the values exactly.
fn delta_walk_values(n: u64, seq: &[Breakpoint], exec: Exec) -> (Vec<Rat>, Vec<usize>) {
    let basis = LcmBasis::new(n);
    let deltas = scaled_deltas(&basis);
    let chunks = par::map_chunks(seq, chunk_len(seq.len()), exec, |offset, chunk| {
        // each chunk seeds itself with one direct evaluation
        let mut value = if offset == 0 {
            BigInt::zero()
        } else {
            scaled_value_at(&basis, &chunk[0])
        };
        let mut out = Vec::with_capacity(chunk.len());
        out.push(value.clone());
        for b in &chunk[1..] {
            value += &deltas[b.q as usize];
            out.push(value.clone());
        }
        out
    });
    let scaled: Vec<BigInt> = chunks.into_iter().flatten().collect();
    // reduce each distinct value once
    let mut order: Vec<usize> = (0..scaled.len()).collect();
    order.sort_by(|&a, &b| scaled[a].cmp(&scaled[b]));
    let mut values = vec![Rat::zero(); scaled.len()];
    let mut i = 0;
    while i < order.len() {
        let v = basis.to_rat(scaled[order[i]].clone());
        let mut j = i;
        while j < order.len() && scaled[order[j]] == scaled[order[i]] {
            values[order[j]] = v.clone();
            j += 1;
        }
        i = j;
    }
    (values, order)
}

fn naive_values(n: u64, seq: &[Breakpoint], exec: Exec) -> Result<Vec<Rat>, RangeError> {
    let idx: Vec<usize> = (0..seq.len()).collect();
    par::map(&idx, exec, |&i| {
        eval_f(n, &gap_interior(&seq[i], seq.get(i + 1)))
    })
    .into_iter()
    .collect::<Result<_, _>>()
    .map_err(Into::into)
}

/// `order` lists gap indices by ascending value, ties in increasing `x`.
fn assemble(n: u64, seq: &[Breakpoint], values: Vec<Rat>, order: Vec<usize>) -> RangeReport {
    let right_of = |i: usize| {
        seq.get(i + 1)
            .map(Breakpoint::to_rat)
            .unwrap_or_else(Rat::one)
    };
    let mut entries: Vec<RangeEntry> = Vec::new();
    for i in order {
        let w = Witness {
            left: seq[i],
            right: right_of(i),
        };
        match entries.last_mut() {
            Some(e) if e.value == values[i] => e.witnesses.push(w),
            _ => entries.push(RangeEntry {
                value: values[i].clone(),
                witnesses: vec![w],
            }),
        }
    }
    let min_nonzero = entries
        .iter()
        .map(|e| &e.value)
        .find(|v| !v.is_zero())
        .cloned();
    let max_value = entries
        .last()
        .map(|e| e.value.clone())
        .unwrap_or_else(Rat::zero);
    let below_lambda = entries
        .iter()
        .map(|e| &e.value)
        .take_while(|v| lambda_cmp(v) == Ordering::Less)
        .cloned()
        .collect();
    RangeReport {
        n,
        entries,
        min_nonzero,
        max_value,
        below_lambda,
    }
}

/// `(H_n - 1, 1 - 1/n)`: the largest value of `f_n` and a point attaining it.
pub fn range_max(n: u64) -> Result<(Rat, Rat), RangeError> {
    if n == 0 {
        return Err(EvalError::ZeroOrder.into());
    }
    let value = harmonic(n).expect("n >= 1") - Rat::one();
    let witness = Rat::one() - Rat::of(1, n as i64);
    let attained = eval_f(n, &witness)?;
    if attained != value {
        return Err(RangeError::Inconsistent(format!(
            "f_{n}({witness}) = {attained}, expected {value}"
        )));
    }
    Ok((value, witness))
}

/// True iff `f_n` equals `H_n - 1` on exactly the gaps whose left endpoint
/// is at least `1 - 1/n`.
pub fn equality_locus_check(n: u64) -> Result<bool, RangeError> {
    if n < 2 {
        return Err(RangeError::Domain("equality locus needs n >= 2"));
    }
    let report = enumerate_range(n)?;
    let max = harmonic(n).expect("n >= 1") - Rat::one();
    let threshold = Rat::one() - Rat::of(1, n as i64);
    Ok(report
        .gaps()
        .iter()
        .all(|g| (*g.value == max) == (g.left.to_rat() >= threshold)))
}

/// Wall-clock comparison of the two enumeration methods.
#[derive(Debug, Clone, Serialize)]
pub struct MethodTiming {
    pub n: u64,
    pub gaps: usize,
    pub values: usize,
    pub naive: Duration,
    pub delta_walk: Duration,
}

impl MethodTiming {
    pub fn speedup(&self) -> f64 {
        self.naive.as_secs_f64() / self.delta_walk.as_secs_f64().max(1e-9)
    }
}

/// Runs both methods at order `n`, checks that they agree, and times them.
pub fn time_methods(n: u64, exec: Exec) -> Result<MethodTiming, RangeError> {
    let start = Instant::now();
    let walk = enumerate_range_with(n, Method::DeltaWalk, exec)?;
    let delta_walk = start.elapsed();
    let start = Instant::now();
    let naive = enumerate_range_with(n, Method::Naive, exec)?;
    let naive_time = start.elapsed();
    if walk != naive {
        return Err(RangeError::Inconsistent(format!(
            "delta walk and naive enumeration disagree at n = {n}"
        )));
    }
    Ok(MethodTiming {
        n,
        gaps: walk.gap_count(),
        values: walk.entries.len(),
        naive: naive_time,
        delta_walk,
    })
}
