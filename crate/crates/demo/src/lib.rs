//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes plain numbers, runs one library operation and returns
//! a JSON string; errors come back as a JS string.

use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use hsfm::brute::brute_min;
use hsfm::cli::solve_instance;
use hsfm::gen::{generate, InstanceKind};
use hsfm::instance::{FunctionSpec, Instance, InstanceFile};
use hsfm::sfm::{min_norm_sfm, WolfeConfig};
use hsfm::solver::{kth_smallest, SolveOptions};
use hsfm::{enumerate_subsets, Error, Mask};

/// Ground sets above this are refused so the page stays responsive.
pub const DEMO_LIMIT: usize = 12;

fn load(kind: &str, n: usize, k: usize, seed: u64) -> hsfm::Result<(InstanceFile, Instance)> {
    if n > DEMO_LIMIT {
        return Err(Error::GroundSetTooLarge { n, max: DEMO_LIMIT });
    }
    let file = generate(kind.parse::<InstanceKind>()?, n, k, seed)?;
    let inst = Instance::from_file(&file)?;
    Ok((file, inst))
}

#[derive(Serialize)]
struct Graph {
    directed: bool,
    edges: Vec<(usize, usize, i64)>,
    shift: Vec<i64>,
}

fn graph_of(spec: &FunctionSpec) -> Option<Graph> {
    match spec {
        FunctionSpec::Cut { directed, edges } => Some(Graph {
            directed: *directed,
            edges: edges.clone(),
            shift: Vec::new(),
        }),
        FunctionSpec::ModularShift { base, weights } => graph_of(base).map(|g| Graph {
            shift: weights.clone(),
            ..g
        }),
        _ => None,
    }
}

/// Generate an instance, solve it and compare with an exhaustive scan.
pub fn solve_generated_value(kind: &str, n: usize, k: usize, seed: u64) -> hsfm::Result<Value> {
    let (file, inst) = load(kind, n, k, seed)?;
    let report = solve_instance(&inst, &SolveOptions::default())?;
    let brute = brute_min(&inst.function, |x| inst.constraint.feasible(x))?;
    let feasible = enumerate_subsets(n).filter(|&x| inst.constraint.feasible(x)).count();
    Ok(json!({
        "n": n,
        "k": inst.k,
        "constraint": inst.constraint.kind(),
        "graph": graph_of(&file.function),
        "report": report,
        "brute_value": brute.min_value,
        "feasible_sets": feasible,
        "total_sets": 1u64 << n,
    }))
}

/// Per-cycle bounds of the minimum-norm-point method on the instance's
/// function, ignoring the constraint.
pub fn wolfe_trace_value(kind: &str, n: usize, seed: u64) -> hsfm::Result<Value> {
    let (_, inst) = load(kind, n, 0, seed)?;
    let config = WolfeConfig {
        record_trace: true,
        ..WolfeConfig::default()
    };
    let r = min_norm_sfm(&inst.function, &config)?;
    let steps: Vec<Value> = r
        .trace
        .iter()
        .map(|s| json!({ "best": s.best_value, "lower": s.lower_bound, "norm_sq": s.norm_sq }))
        .collect();
    Ok(json!({
        "value": r.value,
        "minimizer": r.minimizer,
        "certificate_gap": r.certificate_gap,
        "oracle_calls": r.oracle_calls,
        "steps": steps,
    }))
}

/// The `k` smallest distinct values of the instance's function.
pub fn kth_values_value(kind: &str, n: usize, seed: u64, k: usize) -> hsfm::Result<Value> {
    let (_, inst) = load(kind, n, 0, seed)?;
    let options = SolveOptions {
        value_bound: Some(inst.value_bound),
        ..SolveOptions::default()
    };
    let (result, complete) = match kth_smallest(&inst.function, k, &options) {
        Ok(r) => (r, true),
        Err(Error::ExhaustedValues { found, .. }) => (kth_smallest(&inst.function, found, &options)?, false),
        Err(e) => return Err(e),
    };
    let sizes: Vec<usize> = result.witnesses.iter().map(|w: &Mask| w.cardinality()).collect();
    Ok(json!({
        "values": result.values,
        "witnesses": result.witnesses,
        "witness_sizes": sizes,
        "complete": complete,
        "oracle_calls": result.oracle_calls,
    }))
}

fn to_js(result: hsfm::Result<Value>) -> Result<String, JsValue> {
    result
        .map(|v| v.to_string())
        .map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn solve_generated(kind: &str, n: u32, k: u32, seed: u32) -> Result<String, JsValue> {
    to_js(solve_generated_value(kind, n as usize, k as usize, seed.into()))
}

#[wasm_bindgen]
pub fn wolfe_trace(kind: &str, n: u32, seed: u32) -> Result<String, JsValue> {
    to_js(wolfe_trace_value(kind, n as usize, seed.into()))
}

#[wasm_bindgen]
pub fn kth_values(kind: &str, n: u32, seed: u32, k: u32) -> Result<String, JsValue> {
    to_js(kth_values_value(kind, n as usize, seed.into(), k as usize))
}
