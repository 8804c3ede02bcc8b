//! Minimization over complements of `k`-hierarchical lattices.
//!
//! If `F`'s complement is a `k`-hierarchical lattice, a containment-minimal
//! minimizer `X*` of `f` over `F` is the unique minimal minimizer of `f` over
//! some box `{X : S ⊆ X ⊆ V \ T}` with `S ∩ T = ∅` and `|S|, |T| <= k`. So
//! it suffices to solve every such box, keep the boxes whose minimal
//! minimizer lands in `F`, and take the best of those.
//!
//! Every candidate is membership-checked, so a wrong `k` degrades the result
//! to a feasible but possibly suboptimal answer rather than an infeasible one.

use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use web_time::Instant;

use crate::error::{Error, Result};
use crate::families::{
    validate_crossing, validate_intersecting, ComplementWithAdjoined, ConstraintFamily,
    ExplicitFamily, FnFamily, Membership, Unconstrained, WITNESS_LIMIT,
};
use crate::ground::{enumerate_st_pairs, Mask};
use crate::oracle::{Counting, SubmodularOracle};
use crate::sfm::{min_over_box, SfmConfig};

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub sfm: SfmConfig,
    /// Worker threads for the box loop; 0 or 1 runs sequentially.
    pub parallel: usize,
    /// Stop once a feasible box matches the unconstrained minimum. The
    /// candidate counts in the report are then partial.
    pub early_exit: bool,
    /// Overrides the oracle's own `value_bound`.
    pub value_bound: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Infeasible,
    NumericalStall,
}

/// Outcome of one box: `X` is the minimal minimizer of `f` over `[S, V \ T]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub s: Mask,
    pub t: Mask,
    pub x: Mask,
    pub value: i64,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: Status,
    pub minimizer: Option<Mask>,
    pub value: Option<i64>,
    /// The `(S, T)` box that produced the minimizer, if the solver loop did.
    pub witness_box: Option<(Mask, Mask)>,
    pub candidates_examined: u64,
    pub feasible_candidates: u64,
    pub oracle_calls: u64,
    /// Most evaluations spent on any single box.
    pub max_inner_oracle_calls: u64,
    pub wall_time: Duration,
}

impl SolveReport {
    fn infeasible() -> Self {
        SolveReport {
            status: Status::Infeasible,
            minimizer: None,
            value: None,
            witness_box: None,
            candidates_examined: 0,
            feasible_candidates: 0,
            oracle_calls: 0,
            max_inner_oracle_calls: 0,
            wall_time: Duration::ZERO,
        }
    }

    /// Replace the answer by `x` if it is strictly better (or there is none).
    fn offer(&mut self, x: Mask, value: i64) {
        if self.status == Status::NumericalStall {
            return;
        }
        if self.value.is_none_or(|v| value < v) {
            self.status = Status::Optimal;
            self.minimizer = Some(x);
            self.value = Some(value);
            self.witness_box = None;
        }
    }
}

fn resolve_bound<F: SubmodularOracle + ?Sized>(f: &F, options: &SolveOptions) -> Result<i64> {
    options
        .value_bound
        .or_else(|| f.value_bound())
        .ok_or(Error::OverflowRisk {
            n: f.n(),
            bound: i64::MAX,
        })
}

struct Outcome {
    candidate: Candidate,
    rank: usize,
    calls: u64,
}

fn solve_box<F, C>(
    f: &F,
    family: &C,
    rank: usize,
    (s, t): (Mask, Mask),
    bound: i64,
    config: &SfmConfig,
) -> Result<Outcome>
where
    F: SubmodularOracle + ?Sized,
    C: ConstraintFamily + ?Sized,
{
    let sol = min_over_box(f, s, t, f.n(), bound, config)?;
    Ok(Outcome {
        candidate: Candidate {
            s,
            t,
            x: sol.minimizer,
            value: sol.value,
            feasible: family.contains(sol.minimizer),
        },
        rank,
        calls: sol.oracle_calls,
    })
}

/// Every box candidate in enumeration order. Intended for inspection and
/// tests; [`minimize_over_hierarchical_complement`] does not keep them.
pub fn collect_candidates<F, C>(f: &F, family: &C, options: &SolveOptions) -> Result<Vec<Candidate>>
where
    F: SubmodularOracle + ?Sized,
    C: ConstraintFamily + ?Sized,
{
    let n = f.n();
    let k = family.hierarchy_bound();
    if k > n {
        return Err(Error::InvalidBound { k, n });
    }
    let bound = resolve_bound(f, options)?;
    enumerate_st_pairs(n, k)
        .enumerate()
        .map(|(rank, st)| solve_box(f, family, rank, st, bound, &options.sfm).map(|o| o.candidate))
        .collect()
}

/// Minimize `f` over `F`, trusting that `2^V \ F` is a
/// `family.hierarchy_bound()`-hierarchical lattice.
pub fn minimize_over_hierarchical_complement<F, C>(
    f: &F,
    family: &C,
    options: &SolveOptions,
) -> Result<SolveReport>
where
    F: SubmodularOracle + ?Sized,
    C: ConstraintFamily + ?Sized,
{
    let start = Instant::now();
    let n = f.n();
    let k = family.hierarchy_bound();
    if k > n {
        return Err(Error::InvalidBound { k, n });
    }
    let bound = resolve_bound(f, options)?;
    let f = Counting::new(f);

    let mut report = SolveReport::infeasible();
    let mut best: Option<(i64, usize, Candidate)> = None;
    let mut stalled = false;
    let mut absorb = |report: &mut SolveReport, o: Outcome| {
        report.candidates_examined += 1;
        report.max_inner_oracle_calls = report.max_inner_oracle_calls.max(o.calls);
        if o.candidate.feasible {
            report.feasible_candidates += 1;
            let key = (o.candidate.value, o.rank);
            if best.is_none_or(|(v, r, _)| key < (v, r)) {
                best = Some((key.0, key.1, o.candidate));
            }
        }
    };

    if options.parallel > 1 && !options.early_exit {
        let pairs: Vec<(Mask, Mask)> = enumerate_st_pairs(n, k).collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.parallel)
            .build()
            .map_err(|e| Error::InvalidInstance(format!("thread pool: {e}")))?;
        let outcomes: Vec<Result<Outcome>> = pool.install(|| {
            pairs
                .par_iter()
                .enumerate()
                .map(|(rank, &st)| solve_box(&f, family, rank, st, bound, &options.sfm))
                .collect()
        });
        for outcome in outcomes {
            match outcome {
                Ok(o) => absorb(&mut report, o),
                Err(Error::NumericalStall { .. }) => stalled = true,
                Err(e) => return Err(e),
            }
        }
    } else {
        let mut unconstrained = None;
        for (rank, st) in enumerate_st_pairs(n, k).enumerate() {
            match solve_box(&f, family, rank, st, bound, &options.sfm) {
                Ok(o) => {
                    let (value, feasible) = (o.candidate.value, o.candidate.feasible);
                    unconstrained.get_or_insert(value);
                    absorb(&mut report, o);
                    if options.early_exit && feasible && Some(value) == unconstrained {
                        break;
                    }
                }
                Err(Error::NumericalStall { .. }) => {
                    stalled = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }

    if stalled {
        report.status = Status::NumericalStall;
    } else if let Some((value, _, c)) = best {
        report.status = Status::Optimal;
        report.minimizer = Some(c.x);
        report.value = Some(value);
        report.witness_box = Some((c.s, c.t));
    }
    report.oracle_calls = f.calls();
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Compare the solver's answer with the sets adjoined to `G` that `G`
/// itself does not contain (they are feasible but were excluded).
fn finish_with_adjoined<F, G>(
    f: &F,
    g: &G,
    adjoined: &[Mask],
    mut report: SolveReport,
    start: Instant,
) -> SolveReport
where
    F: SubmodularOracle + ?Sized,
    G: Membership + ?Sized,
{
    for &x in adjoined {
        if report.status != Status::NumericalStall && !g.contains(x) {
            let value = f.evaluate(x);
            report.oracle_calls += 1;
            report.offer(x, value);
        }
    }
    report.wall_time = start.elapsed();
    report
}

/// Minimize `f` over `2^V \ G` for an intersecting family `G`: solve over
/// the complement of `G ∪ {∅}` (2-hierarchical) and compare with `f(∅)`.
///
/// When `explicit` lists `G` and `n` is small, `G` is validated first.
pub fn minimize_over_intersecting_complement<F, G>(
    f: &F,
    g: &G,
    explicit: Option<&ExplicitFamily>,
    options: &SolveOptions,
) -> Result<SolveReport>
where
    F: SubmodularOracle + ?Sized,
    G: Membership + ?Sized,
{
    let start = Instant::now();
    let n = f.n();
    if let Some(e) = explicit.filter(|_| n <= WITNESS_LIMIT) {
        if !validate_intersecting(e) {
            return Err(Error::StructureViolation("family is not intersecting".into()));
        }
    }
    let family = ComplementWithAdjoined::intersecting(n, g, explicit);
    let report = minimize_over_hierarchical_complement(f, &family, options)?;
    Ok(finish_with_adjoined(f, g, family.adjoined(), report, start))
}

/// Minimize `f` over `2^V \ G` for a crossing family `G`: solve over the
/// complement of `G ∪ {∅, V}` and compare with `f(∅)` and `f(V)`.
pub fn minimize_over_crossing_complement<F, G>(
    f: &F,
    g: &G,
    explicit: Option<&ExplicitFamily>,
    options: &SolveOptions,
) -> Result<SolveReport>
where
    F: SubmodularOracle + ?Sized,
    G: Membership + ?Sized,
{
    let start = Instant::now();
    let n = f.n();
    if let Some(e) = explicit.filter(|_| n <= WITNESS_LIMIT) {
        if !validate_crossing(e) {
            return Err(Error::StructureViolation("family is not crossing".into()));
        }
    }
    let family = ComplementWithAdjoined::crossing(n, g, explicit);
    let report = minimize_over_hierarchical_complement(f, &family, options)?;
    Ok(finish_with_adjoined(f, g, family.adjoined(), report, start))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KthSmallestResult {
    /// Strictly increasing: the smallest distinct values of `f`.
    pub values: Vec<i64>,
    pub witnesses: Vec<Mask>,
    pub oracle_calls: u64,
}

/// The `k` smallest distinct values of `f`, with a witness set for each.
///
/// The `i`-th value is the minimum of `f` over `{X : f(X) > v_{i-1}}`, whose
/// complement (the sets holding one of the first `i-1` values) is an
/// `(i-1)`-hierarchical lattice.
pub fn kth_smallest<F>(f: &F, k: usize, options: &SolveOptions) -> Result<KthSmallestResult>
where
    F: SubmodularOracle + ?Sized,
{
    let n = f.n();
    if k == 0 {
        return Err(Error::InvalidBound { k, n });
    }
    let f = Counting::new(f);
    let mut values = Vec::with_capacity(k);
    let mut witnesses = Vec::with_capacity(k);
    for i in 1..=k {
        let report = match values.last() {
            None => minimize_over_hierarchical_complement(&f, &Unconstrained { n }, options)?,
            Some(&prev) => {
                // Beyond n the box enumeration is already complete.
                let level = FnFamily::new((i - 1).min(n), |x| f.evaluate(x) > prev);
                minimize_over_hierarchical_complement(&f, &level, options)?
            }
        };
        match report.status {
            Status::Optimal => {
                values.push(report.value.expect("optimal report carries a value"));
                witnesses.push(report.minimizer.expect("optimal report carries a set"));
            }
            Status::Infeasible => {
                return Err(Error::ExhaustedValues {
                    found: values.len(),
                    requested: k,
                })
            }
            Status::NumericalStall => {
                return Err(Error::NumericalStall {
                    iterations: 0,
                    gap: f64::NAN,
                })
            }
        }
    }
    Ok(KthSmallestResult {
        values,
        witnesses,
        oracle_calls: f.calls(),
    })
}
