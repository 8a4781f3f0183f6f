//! Exhaustive audit of the known properties of `f_n` on small orders.
//!
//! Point checks run over every gap of the Farey sequence of order `max_n`:
//! at the gap's left breakpoint and at its interior (mediant), each also
//! shifted by `-1`, for every order `n = 1..=max_n`. Since the gaps of order
//! `max_n` refine those of every smaller order, this covers every value of
//! every `f_n` with `n <= max_n` from both sides of each jump. A case is
//! one gap of order `max_n`.
//!
//! The remaining checks run over their own natural domains, stated in each
//! result's `domain` string.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::classifier::{below_lambda_membership, classify, Membership, Tag};
use crate::evaluator::{EvalDetail, Evaluator, ExactFloor, FloorRule};
use crate::farey::{farey_sequence, gap_interior};
use crate::par::{self, Exec};
use crate::range::{enumerate_range, equality_locus_check, range_max};
use crate::ratcore::{harmonic, telescoping_check, partial_sum_t, Rat};

/// Failure records kept per check; the total is always counted.
const MAX_RECORDED_FAILURES: usize = 100;

pub const CHECKS: &[&str] = &[
    "definition",
    "usamo",
    "gap",
    "zero-locus",
    "jump-bound",
    "residues",
    "step-monotone",
    "classification",
    "telescoping",
    "partial-sum-family",
    "upper-bound",
    "equality-locus",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("unknown check {name:?}; available: {}", CHECKS.join(", "))]
    UnknownCheck { name: String },
    #[error("max_n must be at least 2, got {0}")]
    MaxNTooSmall(u64),
}

/// A counterexample, rendered exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub n: u64,
    pub x: String,
    pub observed: String,
    pub expected: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub domain: String,
    pub cases: u64,
    pub passed: bool,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
    /// Extremal quantity seen during the run, when the check tracks one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<String>,
    #[serde(rename = "elapsed_ms", serialize_with = "millis")]
    pub elapsed: Duration,
}

fn millis<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Default)]
struct Tally {
    cases: u64,
    failure_count: u64,
    failures: Vec<Failure>,
    observed: Option<String>,
}

impl Tally {
    fn fail(&mut self, n: u64, x: impl ToString, observed: impl ToString, expected: impl ToString) {
        self.failure_count += 1;
        if self.failures.len() < MAX_RECORDED_FAILURES {
            self.failures.push(Failure {
                n,
                x: x.to_string(),
                observed: observed.to_string(),
                expected: expected.to_string(),
            });
        }
    }

    fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        self.failure_count += other.failure_count;
        let room = MAX_RECORDED_FAILURES - self.failures.len();
        self.failures.extend(other.failures.into_iter().take(room));
    }
}

pub fn run_checks(max_n: u64, selection: &[&str]) -> Result<Vec<CheckResult>, VerifyError> {
    run_checks_with(
        &Evaluator::<ExactFloor>::new(),
        max_n,
        selection,
        Exec::default(),
    )
}

/// Runs the selected checks (all of them when `selection` is empty) in
/// parallel; results come back in selection order.
pub fn run_checks_with<R: FloorRule>(
    evaluator: &Evaluator<R>,
    max_n: u64,
    selection: &[&str],
    exec: Exec,
) -> Result<Vec<CheckResult>, VerifyError> {
    if max_n < 2 {
        return Err(VerifyError::MaxNTooSmall(max_n));
    }
    let names: Vec<&'static str> =
        if selection.is_empty() {
            CHECKS.to_vec()
        } else {
            selection
                .iter()
                .map(|s| {
                    CHECKS.iter().copied().find(|c| c == s).ok_or_else(|| {
                        VerifyError::UnknownCheck {
                            name: s.to_string(),
                        }
                    })
                })
                .collect::<Result<_, _>>()?
        };
    Ok(par::map(&names, exec, |name| {
        run_one(evaluator, name, max_n)
    }))
}

fn run_one<R: FloorRule>(ev: &Evaluator<R>, name: &'static str, max_n: u64) -> CheckResult {
    let start = Instant::now();
    let points_domain =
        format!("gaps of the Farey sequence of order {max_n}: breakpoint and mediant, shifts 0 and -1; n = 1..={max_n}");
    let (domain, tally) = match name {
        "definition" => (points_domain, point_check(ev, max_n, definition)),
        "usamo" => (points_domain, point_check(ev, max_n, usamo)),
        "gap" => {
            let mut t = point_check(ev, max_n, gap);
            t.observed =
                min_nonzero_observed(ev, max_n).map(|v| format!("min nonzero value = {v}"));
            (points_domain, t)
        }
        "zero-locus" => (points_domain, point_check(ev, max_n, zero_locus)),
        "jump-bound" => (points_domain, point_check(ev, max_n, jump_bound)),
        "residues" => (points_domain, point_check(ev, max_n, residues)),
        "step-monotone" => (
            format!("coprime p/q with 2 <= q <= {max_n}, 1 <= p < q; n = 1..={max_n}"),
            step_monotone(ev, max_n),
        ),
        "classification" => (
            format!("every Farey gap of order n, n = 1..={max_n}"),
            classification(max_n),
        ),
        "telescoping" => (format!("m = 1..={max_n}"), telescoping(max_n)),
        "partial-sum-family" => (
            format!("n = 2m+1, x = 1/(m+1), m = 1..={max_n}"),
            partial_sum_family(ev, max_n),
        ),
        "upper-bound" => (format!("n = 1..={max_n}"), upper_bound(max_n)),
        "equality-locus" => (
            format!("every Farey gap of order n, n = 2..={max_n}"),
            locus(max_n),
        ),
        _ => unreachable!("names are validated"),
    };
    CheckResult {
        name: name.to_string(),
        domain,
        cases: tally.cases,
        passed: tally.failure_count == 0,
        failure_count: tally.failure_count,
        failures: tally.failures,
        observed: tally.observed,
        elapsed: start.elapsed(),
    }
}

/// The four probe points of every gap of order `max_n`.
fn probe_points(max_n: u64) -> Vec<[Rat; 4]> {
    let seq = farey_sequence(max_n);
    (0..seq.len())
        .map(|i| {
            let b = seq[i].to_rat();
            let m = gap_interior(&seq[i], seq.get(i + 1));
            let one = Rat::one();
            [&b - &one, &m - &one, b, m]
        })
        .collect()
}

type PointFn<R> = fn(&Evaluator<R>, u64, &Rat, &mut Tally);

fn point_check<R: FloorRule>(ev: &Evaluator<R>, max_n: u64, check: PointFn<R>) -> Tally {
    let points = probe_points(max_n);
    let parts = par::map_chunks(&points, 64, Exec::Parallel, |_, chunk| {
        let mut t = Tally::default();
        for probe in chunk {
            t.cases += 1;
            for x in probe {
                for n in 1..=max_n {
                    check(ev, n, x, &mut t);
                }
            }
        }
        t
    });
    let mut total = Tally::default();
    for p in parts {
        total.merge(p);
    }
    total
}

/// Term-by-term definition with general rational sums and exact floors.
fn definition_oracle(n: u64, x: &Rat) -> Rat {
    let floor_of = |k: u64| Rat::from_integer(x.mul_int(k).floor());
    let sum: Rat = (1..=n).map(|k| floor_of(k) * Rat::of(1, k as i64)).sum();
    floor_of(n) - sum
}

fn definition<R: FloorRule>(ev: &Evaluator<R>, n: u64, x: &Rat, t: &mut Tally) {
    let got = ev.eval_f(n, x).expect("n >= 1");
    let want = definition_oracle(n, x);
    if got != want {
        t.fail(n, x, got, want);
    }
}

fn usamo<R: FloorRule>(ev: &Evaluator<R>, n: u64, x: &Rat, t: &mut Tally) {
    let f = ev.eval_f(n, x).expect("n >= 1");
    if f.is_negative() {
        t.fail(n, x, f, ">= 0");
    }
}

fn detail<R: FloorRule>(ev: &Evaluator<R>, n: u64, x: &Rat) -> EvalDetail {
    ev.eval_detail(n, x).expect("n >= 1")
}

fn gap<R: FloorRule>(ev: &Evaluator<R>, n: u64, x: &Rat, t: &mut Tally) {
    let d = detail(ev, n, x);
    if d.d == 1 && !d.f.is_zero() {
        t.fail(n, x, &d.f, "0 since d = 1");
    }
    if d.d != 1 && d.f < Rat::of(1, 6) {
        t.fail(n, x, &d.f, format!(">= 1/6 since d = {}", d.d));
    }
}

fn min_nonzero_observed<R: FloorRule>(ev: &Evaluator<R>, max_n: u64) -> Option<Rat> {
    let seq = farey_sequence(max_n);
    let mut best: Option<Rat> = None;
    for b in &seq {
        for n in 1..=max_n {
            let f = ev.eval_f(n, &b.to_rat()).expect("n >= 1");
            if !f.is_zero() && best.as_ref().is_none_or(|v| f < *v) {
                best = Some(f);
            }
        }
    }
    best
}

fn zero_locus<R: FloorRule>(ev: &Evaluator<R>, n: u64, x: &Rat, t: &mut Tally) {
    let d = detail(ev, n, x);
    let small = x.fract() < Rat::of(1, n as i64);
    if (d.d == 1) != small {
        t.fail(
            n,
            x,
            format!("d = {}", d.d),
            format!("d = 1 iff frac(x) < 1/{n}"),
        );
    }
}

fn jump_bound<R: FloorRule>(ev: &Evaluator<R>, n: u64, x: &Rat, t: &mut Tally) {
    let d = detail(ev, n, x);
    if d.jump >= 2 && d.f < Rat::of(1, 3) {
        t.fail(n, x, &d.f, format!(">= 1/3 since jump = {}", d.jump));
    }
}

fn residues<R: FloorRule>(ev: &Evaluator<R>, n: u64, x: &Rat, t: &mut Tally) {
    let det = detail(ev, n, x);
    let d = det.d;
    if *det.x_n.denom() != BigInt::from(d) {
        t.fail(
            n,
            x,
            format!("x_n = {}", det.x_n),
            format!("denominator {d}"),
        );
    }
    for k in 1..=n {
        if det.x_n.mul_int(k).floor() != x.mul_int(k).floor() {
            t.fail(
                n,
                x,
                format!("[{k} x_n] != [{k} x]"),
                "equal floors for k <= n",
            );
        }
    }
    let got: BTreeSet<Rat> = (det.r + 1..=det.r + d)
        .map(|k| det.x_n.mul_int(k).fract())
        .collect();
    let want: BTreeSet<Rat> = (0..d).map(|j| Rat::of(j as i64, d as i64)).collect();
    if got != want {
        t.fail(
            n,
            x,
            "fractional parts of k x_n, k = r+1..r+d",
            format!("all multiples of 1/{d}"),
        );
    }
    let below = &det.x_n - &Rat::new(1, BigInt::from(2 * d * n)).expect("positive");
    if below.mul_int(d).floor() >= det.x_n.mul_int(d).floor() {
        t.fail(
            n,
            x,
            format!("x_n = {} not minimal", det.x_n),
            "[d(x_n - eps)] < [d x_n]",
        );
    }
}

fn step_monotone<R: FloorRule>(ev: &Evaluator<R>, max_n: u64) -> Tally {
    let pairs: Vec<(u64, u64)> = (2..=max_n)
        .flat_map(|q| {
            (1..q)
                .filter(move |&p| num_integer::gcd(p, q) == 1)
                .map(move |p| (p, q))
        })
        .collect();
    let parts = par::map_chunks(&pairs, 32, Exec::Parallel, |_, chunk| {
        let mut t = Tally::default();
        for &(p, q) in chunk {
            let x = Rat::new(p, q).expect("q >= 2");
            for n in 1..=max_n {
                t.cases += 1;
                let lo = ev.eval_f(n, &x).expect("n >= 1");
                let hi = ev.eval_f(n + q, &x).expect("n >= 1");
                if lo >= hi {
                    t.fail(
                        n,
                        &x,
                        format!("f_n = {lo}, f_(n+q) = {hi}"),
                        "f_n < f_(n+q)",
                    );
                }
            }
        }
        t
    });
    let mut total = Tally::default();
    for p in parts {
        total.merge(p);
    }
    total
}

fn implied_value(tag: Tag) -> Option<Rat> {
    match tag {
        Tag::Zero => Some(Rat::zero()),
        Tag::PartialSum(m) => Some(partial_sum_t(m)),
        Tag::FourFifteenths => Some(Rat::of(4, 15)),
        Tag::AboveLambda => None,
    }
}

fn classification(max_n: u64) -> Tally {
    let orders: Vec<u64> = (1..=max_n).collect();
    let parts = par::map(&orders, Exec::Parallel, |&n| {
        let mut t = Tally::default();
        let report = enumerate_range(n).expect("n >= 1");
        let mut below = BTreeSet::new();
        for g in report.gaps() {
            t.cases += 1;
            let x = g.left.to_rat();
            match classify(n, &x) {
                Err(e) => t.fail(n, &x, e, "a consistent classification"),
                Ok(c) => {
                    if c.value != *g.value {
                        t.fail(n, &x, &c.value, g.value);
                    }
                    if let Some(v) = implied_value(c.tag) {
                        if v != *g.value {
                            t.fail(n, &x, format!("{} implies {v}", c.tag), g.value);
                        }
                        below.insert(v);
                    }
                }
            }
        }
        let enumerated: BTreeSet<Rat> = report.below_lambda.iter().cloned().collect();
        if below != enumerated {
            t.fail(
                n,
                "all gaps",
                format!("{below:?}"),
                format!("{enumerated:?}"),
            );
        }
        for v in &enumerated {
            if below_lambda_membership(v) == Ok(Membership::NotBelowLambda) {
                t.fail(n, "all gaps", v, "0, 4/15 or a partial sum t_m");
            }
        }
        t
    });
    let mut total = Tally::default();
    for p in parts {
        total.merge(p);
    }
    total
}

fn telescoping(max_n: u64) -> Tally {
    let mut t = Tally::default();
    for m in 1..=max_n {
        t.cases += 1;
        if !telescoping_check(m).expect("m >= 1") {
            t.fail(m, "-", "1 - sum_{k=m}^{2m-1} 1/k", format!("t_{}", m - 1));
        }
    }
    t
}

fn partial_sum_family<R: FloorRule>(ev: &Evaluator<R>, max_n: u64) -> Tally {
    let mut t = Tally::default();
    for m in 1..=max_n {
        t.cases += 1;
        let x = Rat::of(1, m as i64 + 1);
        let f = ev.eval_f(2 * m + 1, &x).expect("n >= 1");
        let want = partial_sum_t(m);
        if f != want {
            t.fail(2 * m + 1, &x, f, want);
        }
    }
    t
}

fn upper_bound(max_n: u64) -> Tally {
    let mut t = Tally::default();
    for n in 1..=max_n {
        t.cases += 1;
        let bound = harmonic(n).expect("n >= 1") - Rat::one();
        let report = enumerate_range(n).expect("n >= 1");
        if report.max_value != bound {
            t.fail(n, "all gaps", &report.max_value, &bound);
        }
        match range_max(n) {
            Ok((v, _)) if v == bound => {}
            Ok((v, w)) => t.fail(n, w, v, bound),
            Err(e) => t.fail(n, "1 - 1/n", e, bound),
        }
    }
    t
}

fn locus(max_n: u64) -> Tally {
    let mut t = Tally::default();
    for n in 2..=max_n {
        t.cases += 1;
        match equality_locus_check(n) {
            Ok(true) => {}
            Ok(false) => t.fail(
                n,
                "all gaps",
                "maximum attained off [1 - 1/n, 1)",
                "exactly on [1 - 1/n, 1)",
            ),
            Err(e) => t.fail(n, "all gaps", e, "a completed scan"),
        }
    }
    t
}
