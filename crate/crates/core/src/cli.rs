//! Command implementations behind the `hsfm` binary: solve, verify, kth,
//! gen and bench. Each returns a report plus the process exit code.

use serde::{Deserialize, Serialize};

use crate::brute::{
    brute_check_box_optimality, brute_check_intervals, brute_check_unique_minimal, brute_min,
    StructureCheck, STRUCTURE_LIMIT,
};
use crate::error::{Error, Result};
use crate::families::{
    validate_crossing, validate_intersecting, validate_k_hierarchical, validate_lattice,
    ComplementWithAdjoined, ConstraintFamily, WITNESS_LIMIT,
};
use crate::functions::check_submodular;
use crate::gen::{generate, InstanceKind};
use crate::ground::Mask;
use crate::instance::{Constraint, Instance};
use crate::oracle::SubmodularOracle;
use crate::solver::{
    kth_smallest, minimize_over_crossing_complement, minimize_over_hierarchical_complement,
    minimize_over_intersecting_complement, KthSmallestResult, SolveOptions, SolveReport, Status,
};

pub const REPORT_SCHEMA: &str = "hsfm-report/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_STRUCTURE: i32 = 4;
pub const EXIT_STALL: i32 = 5;

/// Exit code for a failed command.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::StructureViolation(_) | Error::OverlappingParts(_) => EXIT_STRUCTURE,
        Error::NumericalStall { .. } => EXIT_STALL,
        Error::ExhaustedValues { .. } => EXIT_INFEASIBLE,
        _ => EXIT_INPUT,
    }
}

pub fn status_exit_code(status: Status) -> i32 {
    match status {
        Status::Optimal => EXIT_OK,
        Status::Infeasible => EXIT_INFEASIBLE,
        Status::NumericalStall => EXIT_STALL,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: String,
    pub version: String,
    pub instance_digest: String,
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub body: ReportBody,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum ReportBody {
    Solve(SolveOutput),
    Kth(KthOutput),
    Verify(VerifyOutput),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub constraint: String,
    pub k: usize,
    pub report: SolveReport,
    pub minimizer_labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KthOutput {
    pub requested: usize,
    /// False when `f` has fewer distinct values than requested; the lists
    /// then hold all of them.
    pub complete: bool,
    pub values: Vec<i64>,
    pub witnesses: Vec<Mask>,
    pub oracle_calls: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// `(S, T)` found for a set by one of the exhaustive structure checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub check: String,
    pub set: Mask,
    pub s: Option<Mask>,
    pub t: Option<Mask>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyOutcome {
    Pass,
    StructuralViolation,
    Mismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub outcome: VerifyOutcome,
    pub checks: Vec<CheckOutcome>,
    pub solver: Option<SolveReport>,
    pub brute_value: Option<i64>,
    pub brute_minimal_minimizers: Vec<Mask>,
    pub witnesses: Vec<WitnessEntry>,
}

impl ReportFile {
    pub fn new(inst: &Instance, body: ReportBody) -> Self {
        ReportFile {
            schema: REPORT_SCHEMA.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            instance_digest: inst.digest.clone(),
            seed: inst.seed,
            body,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Run the solver driver that matches the instance's constraint kind.
pub fn solve_instance(inst: &Instance, options: &SolveOptions) -> Result<SolveReport> {
    let options = SolveOptions {
        value_bound: Some(inst.value_bound),
        ..options.clone()
    };
    let f = &inst.function;
    match &inst.constraint {
        Constraint::None(u) => minimize_over_hierarchical_complement(f, u, &options),
        Constraint::Rings(r) => minimize_over_hierarchical_complement(f, r, &options),
        Constraint::Explicit(p) => minimize_over_hierarchical_complement(f, p, &options),
        Constraint::Intersecting(g) => minimize_over_intersecting_complement(f, g, Some(g), &options),
        Constraint::Crossing(g) => minimize_over_crossing_complement(f, g, Some(g), &options),
    }
}

pub fn cmd_solve(inst: &Instance, options: &SolveOptions) -> Result<(ReportFile, i32)> {
    let report = solve_instance(inst, options)?;
    let code = status_exit_code(report.status);
    let output = SolveOutput {
        constraint: inst.constraint.kind().to_string(),
        k: inst.k,
        minimizer_labels: report.minimizer.map(|x| inst.labels_of(x)),
        report,
    };
    Ok((ReportFile::new(inst, ReportBody::Solve(output)), code))
}

pub fn cmd_kth(inst: &Instance, k: usize, options: &SolveOptions) -> Result<(ReportFile, i32)> {
    let options = SolveOptions {
        value_bound: Some(inst.value_bound),
        ..options.clone()
    };
    let (result, complete): (KthSmallestResult, bool) = match kth_smallest(&inst.function, k, &options) {
        Ok(r) => (r, true),
        Err(Error::ExhaustedValues { found, .. }) => (kth_smallest(&inst.function, found, &options)?, false),
        Err(e) => return Err(e),
    };
    let output = KthOutput {
        requested: k,
        complete,
        values: result.values,
        witnesses: result.witnesses,
        oracle_calls: result.oracle_calls,
    };
    let code = if complete { EXIT_OK } else { EXIT_INFEASIBLE };
    Ok((ReportFile::new(inst, ReportBody::Kth(output)), code))
}

/// Largest ground set `verify` accepts.
pub const VERIFY_LIMIT: usize = WITNESS_LIMIT;

fn check(name: impl Into<String>, passed: bool, detail: Option<String>) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        passed,
        detail,
    }
}

fn structure_checks(inst: &Instance) -> Result<Vec<CheckOutcome>> {
    let mut checks = Vec::new();
    let violation = check_submodular(&inst.function)?;
    checks.push(check(
        "function is submodular",
        violation.is_none(),
        violation.map(|v| format!("fails at X = {:?}, u = {}, v = {}", v.x, v.u, v.v)),
    ));
    let n = inst.n();
    match &inst.constraint {
        Constraint::None(_) => {}
        Constraint::Rings(r) => {
            for (i, ring) in r.rings().iter().enumerate() {
                checks.push(check(format!("ring {i} is a lattice"), validate_lattice(&ring.expand()), None));
            }
            let parts = r.witness_partition().expect("verify runs within the witness limit");
            checks.push(check("excluded family is hierarchical", validate_k_hierarchical(&parts)?, None));
        }
        Constraint::Intersecting(g) => {
            checks.push(check("excluded family is intersecting", validate_intersecting(g), None));
            let parts = ComplementWithAdjoined::intersecting(n, g, Some(g))
                .witness_partition()
                .expect("explicit family gives a partition");
            checks.push(check("excluded family with ∅ is 2-hierarchical", validate_k_hierarchical(&parts)?, None));
        }
        Constraint::Crossing(g) => {
            checks.push(check("excluded family is crossing", validate_crossing(g), None));
            let parts = ComplementWithAdjoined::crossing(n, g, Some(g))
                .witness_partition()
                .expect("explicit family gives a partition");
            checks.push(check(
                "excluded family with ∅ and V is 2-hierarchical",
                validate_k_hierarchical(&parts)?,
                None,
            ));
        }
        Constraint::Explicit(p) => {
            checks.push(check("excluded family is hierarchical", validate_k_hierarchical(p.parts())?, None));
        }
    }
    Ok(checks)
}

/// Membership in the family the box enumeration actually runs over. For
/// the intersecting and crossing kinds this also excludes the adjoined sets.
fn hierarchical_member(inst: &Instance, x: Mask) -> bool {
    let full = Mask::full(inst.n());
    match &inst.constraint {
        Constraint::Intersecting(_) => !x.is_empty() && inst.constraint.feasible(x),
        Constraint::Crossing(_) => !x.is_empty() && x != full && inst.constraint.feasible(x),
        _ => inst.constraint.feasible(x),
    }
}

fn record(
    name: &str,
    result: &StructureCheck,
    checks: &mut Vec<CheckOutcome>,
    witnesses: &mut Vec<WitnessEntry>,
) {
    checks.push(check(
        name,
        result.holds(),
        result.first_failure().map(|x| format!("no witness for {x:?}")),
    ));
    witnesses.extend(result.witnesses.iter().map(|&(set, w)| WitnessEntry {
        check: name.to_string(),
        set,
        s: w.map(|(s, _)| s),
        t: w.map(|(_, t)| t),
    }));
}

/// Validate the instance's declared structure, compare the solver with an
/// exhaustive scan and, for small `n`, run the exhaustive box and interval
/// checks.
pub fn cmd_verify(inst: &Instance, options: &SolveOptions) -> Result<(ReportFile, i32)> {
    let n = inst.n();
    if n > VERIFY_LIMIT {
        return Err(Error::GroundSetTooLarge { n, max: VERIFY_LIMIT });
    }
    let mut output = VerifyOutput {
        outcome: VerifyOutcome::Pass,
        checks: structure_checks(inst)?,
        solver: None,
        brute_value: None,
        brute_minimal_minimizers: Vec::new(),
        witnesses: Vec::new(),
    };
    if output.checks.iter().any(|c| !c.passed) {
        output.outcome = VerifyOutcome::StructuralViolation;
        return Ok((ReportFile::new(inst, ReportBody::Verify(output)), EXIT_STRUCTURE));
    }

    let f = &inst.function;
    let report = solve_instance(inst, options)?;
    let brute = brute_min(f, |x| inst.constraint.feasible(x))?;
    let agree = match report.status {
        Status::Optimal => report.minimizer.is_some_and(|x| {
            inst.constraint.feasible(x) && Some(f.evaluate(x)) == report.value && report.value == brute.min_value
        }),
        Status::Infeasible => brute.min_value.is_none(),
        Status::NumericalStall => false,
    };
    output.checks.push(check(
        "solver matches exhaustive scan",
        agree,
        (!agree).then(|| format!("solver {:?} {:?}, scan {:?}", report.status, report.value, brute.min_value)),
    ));
    output.brute_value = brute.min_value;
    output.brute_minimal_minimizers = brute.minimal_minimizers;
    output.solver = Some(report);

    if n <= STRUCTURE_LIMIT {
        let member = |x: Mask| hierarchical_member(inst, x);
        let k = inst.k;
        let (checks, witnesses) = (&mut output.checks, &mut output.witnesses);
        record("box optimality", &brute_check_box_optimality(f, member, k)?, checks, witnesses);
        record("unique minimal minimizer", &brute_check_unique_minimal(f, member, k)?, checks, witnesses);
        let (down, up) = brute_check_intervals(n, member, k)?;
        record("downward intervals", &down, checks, witnesses);
        record("upward intervals", &up, checks, witnesses);
    }

    let code = if output.checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        output.outcome = VerifyOutcome::Mismatch;
        EXIT_MISMATCH
    };
    Ok((ReportFile::new(inst, ReportBody::Verify(output)), code))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub candidates: u64,
    pub oracle_calls: u64,
    pub max_inner_calls: u64,
    pub wall_ms: f64,
    pub status: Status,
}

pub const BENCH_HEADER: &str = "n,k,seed,candidates,oracle_calls,max_inner_calls,wall_ms,status";

impl BenchRow {
    pub fn to_csv(&self) -> String {
        let status = match self.status {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::NumericalStall => "numerical_stall",
        };
        format!(
            "{},{},{},{},{},{},{:.3},{}",
            self.n, self.k, self.seed, self.candidates, self.oracle_calls, self.max_inner_calls, self.wall_ms, status
        )
    }
}

/// Generate and solve one instance per `(n, k, seed)`.
pub fn cmd_bench(
    kind: InstanceKind,
    ns: impl IntoIterator<Item = usize> + Clone,
    ks: impl IntoIterator<Item = usize> + Clone,
    seeds: impl IntoIterator<Item = u64> + Clone,
    options: &SolveOptions,
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for n in ns {
        for k in ks.clone() {
            for seed in seeds.clone() {
                let inst = Instance::from_file(&generate(kind, n, k, seed)?)?;
                let report = solve_instance(&inst, options)?;
                rows.push(BenchRow {
                    n,
                    k,
                    seed,
                    candidates: report.candidates_examined,
                    oracle_calls: report.oracle_calls,
                    max_inner_calls: report.max_inner_oracle_calls,
                    wall_ms: report.wall_time.as_secs_f64() * 1e3,
                    status: report.status,
                });
            }
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceFile;

    fn inst(text: &str) -> Instance {
        Instance::from_file(&InstanceFile::from_json(text).unwrap()).unwrap()
    }

    const TRIANGLE_NONEMPTY: &str = r#"{"n":3,
        "function":{"kind":"cut","edges":[[0,1,1],[1,2,1],[0,2,1]]},
        "constraint":{"kind":"complement_of_rings","rings":[{"forced_in":[],"allowed":[]}]},
        "k":1}"#;

    #[test]
    fn solve_triangle() {
        let (report, code) = cmd_solve(&inst(TRIANGLE_NONEMPTY), &SolveOptions::default()).unwrap();
        assert_eq!(code, EXIT_OK);
        let ReportBody::Solve(out) = &report.body else {
            panic!("expected a solve report")
        };
        assert_eq!(out.report.value, Some(0));
        assert_eq!(out.report.minimizer, Some(Mask::full(3)));
        assert_eq!(out.minimizer_labels.as_deref(), Some(&["0".to_string(), "1".into(), "2".into()][..]));
        assert_eq!(ReportFile::from_json(&report.to_json()).unwrap(), report);
    }

    #[test]
    fn solve_infeasible() {
        // The single ring is all of 2^V.
        let i = inst(
            r#"{"n":3,"function":{"kind":"cut","edges":[[0,1,1]]},
                "constraint":{"kind":"complement_of_rings","rings":[{}]}}"#,
        );
        let (_, code) = cmd_solve(&i, &SolveOptions::default()).unwrap();
        assert_eq!(code, EXIT_INFEASIBLE);
    }

    #[test]
    fn verify_passes_and_flags() {
        let (report, code) = cmd_verify(&inst(TRIANGLE_NONEMPTY), &SolveOptions::default()).unwrap();
        assert_eq!(code, EXIT_OK, "{}", report.to_json());

        let bad = inst(
            r#"{"n":3,"function":{"kind":"cut","edges":[[0,1,1]]},
                "constraint":{"kind":"complement_of_intersecting","members":[[0,1],[1,2]]}}"#,
        );
        let (report, code) = cmd_verify(&bad, &SolveOptions::default()).unwrap();
        assert_eq!(code, EXIT_STRUCTURE);
        let ReportBody::Verify(out) = report.body else {
            panic!("expected a verify report")
        };
        assert_eq!(out.outcome, VerifyOutcome::StructuralViolation);

        let big = inst(r#"{"n":16,"function":{"kind":"cut","edges":[]}}"#);
        let err = cmd_verify(&big, &SolveOptions::default()).unwrap_err();
        assert_eq!(error_exit_code(&err), EXIT_INPUT);
    }

    #[test]
    fn kth_codes() {
        let card = inst(r#"{"n":3,"function":{"kind":"table","values":[0,1,1,2,1,2,2,3]}}"#);
        let (report, code) = cmd_kth(&card, 2, &SolveOptions::default()).unwrap();
        assert_eq!(code, EXIT_OK);
        let ReportBody::Kth(out) = report.body else {
            panic!("expected a kth report")
        };
        assert_eq!(out.values, vec![0, 1]);

        let constant = inst(r#"{"n":2,"function":{"kind":"table","values":[4,4,4,4]}}"#);
        let (report, code) = cmd_kth(&constant, 2, &SolveOptions::default()).unwrap();
        assert_eq!(code, EXIT_INFEASIBLE);
        let ReportBody::Kth(out) = report.body else {
            panic!("expected a kth report")
        };
        assert!(!out.complete);
        assert_eq!(out.values, vec![4]);
    }

    #[test]
    fn bench_rows() {
        let rows = cmd_bench(InstanceKind::CutRings, 6..=8, [1], 0..2, &SolveOptions::default()).unwrap();
        assert_eq!(rows.len(), 6);
        for r in &rows {
            let n = r.n as u64;
            assert_eq!(r.candidates, 1 + n + n + n * (n - 1));
        }
        let csv = bench_csv(&rows);
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.starts_with(BENCH_HEADER));
    }
}
