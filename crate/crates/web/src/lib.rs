//! Browser bindings: check a net pasted into the page, show the ground
//! program, or load a dining philosophers benchmark.

use wasm_bindgen::prelude::*;

use stablebmc::check::{build_program, gen_benchmark, run_check, CheckRequest, Query};
use stablebmc::ltl::parse_formula;
use stablebmc::net::{parse_net, Net, Semantics};
use stablebmc::parse_condition;

/// Largest bound the page accepts; keeps the tab responsive.
pub const MAX_BOUND: usize = 30;

fn request(net: &Net, mode: &str, property: &str, semantics: &str) -> Result<CheckRequest, String> {
    let query = match mode {
        "deadlock" => Query::Deadlock,
        "reach" => Query::Reach(parse_condition(property, net).map_err(|e| e.to_string())?),
        "ltl" => Query::Ltl(parse_formula(property).map_err(|e| e.to_string())?),
        other => return Err(format!("unknown mode `{other}`")),
    };
    let mut req = CheckRequest::new(net, query);
    req.semantics = semantics.parse::<Semantics>()?;
    req.oracle_budget = 100_000;
    Ok(req)
}

/// Runs a check over bounds `min..=max` and returns the JSON report.
#[wasm_bindgen]
pub fn check(
    net_text: &str,
    mode: &str,
    property: &str,
    semantics: &str,
    min: usize,
    max: usize,
) -> Result<String, String> {
    if max > MAX_BOUND {
        return Err(format!("bounds above {MAX_BOUND} are not supported here"));
    }
    let net = parse_net(net_text).map_err(|e| e.to_string())?;
    let mut req = request(&net, mode, property, semantics)?;
    req.min_bound = min;
    req.max_bound = max;
    let report = run_check(&net, &req).map_err(|e| e.to_string())?;
    Ok(report.to_json())
}

/// Ground program of a single bound in the text format.
#[wasm_bindgen]
pub fn program_text(
    net_text: &str,
    mode: &str,
    property: &str,
    semantics: &str,
    bound: usize,
) -> Result<String, String> {
    if bound == 0 || bound > MAX_BOUND {
        return Err(format!("the bound must lie in 1..{MAX_BOUND}"));
    }
    let net = parse_net(net_text).map_err(|e| e.to_string())?;
    let req = request(&net, mode, property, semantics)?;
    let prog = build_program(&net, &req, bound).map_err(|e| e.to_string())?;
    Ok(prog.to_text())
}

/// Dining philosophers net with `k` philosophers.
#[wasm_bindgen]
pub fn dp_net(k: usize) -> Result<String, String> {
    if k > 50 {
        return Err("at most 50 philosophers".into());
    }
    gen_benchmark(k).map_err(|e| e.to_string())
}
