//! Browser bindings: gallery listing, criterion table, classification and
//! orbit traces. Every function takes a gallery id or a JSON spec and
//! returns text (TSV or JSON); errors come back as strings.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use odolab::criteria::table::{build_table, TableOptions};
use odolab::criteria::verdict::{self, EvalParams};
use odolab::function::orbit_trace;
use odolab::gallery;
use odolab::scalar::parse_rational;
use odolab::space::{build_truncation, DepthSet, SimpleFunction};
use odolab::{AnySpec, Backend, Rational, Scalar};

/// Browser work stays small: at most this many cells per truncation.
const WEB_CAP: u64 = 1 << 16;
const MAX_HORIZON: usize = 400;

fn resolve(target: &str) -> Result<AnySpec, String> {
    if target.trim_start().starts_with('{') {
        AnySpec::parse(target).map_err(|e| e.to_string())
    } else {
        gallery::lookup(target.trim()).map(|e| e.spec).map_err(|e| e.to_string())
    }
}

fn check_horizon(h: usize) -> Result<usize, String> {
    if h == 0 || h > MAX_HORIZON {
        return Err(format!("horizon must be in 1..={MAX_HORIZON}"));
    }
    Ok(h)
}

/// Gallery entries as a JSON array of {id, summary, kind}.
#[wasm_bindgen]
pub fn gallery_list() -> String {
    let v: Vec<Value> = gallery::all()
        .iter()
        .map(|e| {
            let kind = match &e.spec {
                AnySpec::Product(s) => s.kind.name(),
                AnySpec::Shift(_) => "shift",
            };
            json!({"id": e.id, "summary": e.summary, "kind": kind, "spec": e.spec.to_json()})
        })
        .collect();
    Value::Array(v).to_string()
}

fn table_with<S: Scalar>(spec: &AnySpec, horizon: usize) -> Result<String, String> {
    let AnySpec::Product(s) = spec else { return Err("criterion tables need an odometer or translation".into()) };
    let opts = TableOptions { quadratic_limit: 1024, gamma_limit: 16, ..Default::default() };
    build_table::<S>(s, horizon, &opts).map(|t| t.to_tsv()).map_err(|e| e.to_string())
}

/// Criterion quantities η, δ, θ, κ, γ, ω, β per index, as TSV.
#[wasm_bindgen]
pub fn sequences(target: &str, horizon: usize) -> Result<String, String> {
    let spec = resolve(target)?;
    let h = check_horizon(horizon)?;
    match gallery::backend_for(&spec, h) {
        Backend::Rational => table_with::<Rational>(&spec, h),
        Backend::Float => table_with::<f64>(&spec, h),
    }
}

fn classify_with<S: Scalar>(spec: &AnySpec, horizon: usize) -> Result<String, String> {
    let params = EvalParams { horizon, quadratic_limit: 1024, gamma_limit: 16, shifts: 16, ..Default::default() };
    let verdicts = verdict::classify::<S>(spec, &params).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = verdicts
        .iter()
        .map(|v| json!({"rule": v.rule, "status": v.status.tag(), "statement": v.statement}))
        .collect();
    Ok(Value::Array(rows).to_string())
}

/// Every applicable criterion with its status, as a JSON array.
#[wasm_bindgen]
pub fn classify(target: &str, horizon: usize) -> Result<String, String> {
    let spec = resolve(target)?;
    let h = check_horizon(horizon)?;
    match gallery::backend_for(&spec, h) {
        Backend::Rational => classify_with::<Rational>(&spec, h),
        Backend::Float => classify_with::<f64>(&spec, h),
    }
}

fn digits(text: &str) -> Result<Vec<u64>, String> {
    text.split(',').map(|d| d.trim().parse::<u64>().map_err(|_| format!("bad digit list `{text}`"))).collect()
}

fn orbit_with<S: Scalar>(spec: &AnySpec, depth: usize, f: &str, g: &str, epsilon: &Rational, horizon: usize) -> Result<String, String> {
    let AnySpec::Product(s) = spec else { return Err("orbits need an odometer or translation".into()) };
    let space = build_truncation::<S>(s, depth, WEB_CAP).map_err(|e| e.to_string())?;
    let radices = space.radix.radices().to_vec();
    let cylinder = |text: &str| -> Result<SimpleFunction<S>, String> {
        let d = digits(text)?;
        if d.len() > radices.len() || d.iter().zip(&radices).any(|(x, m)| x >= m) {
            return Err(format!("cylinder `{text}` does not fit the alphabets {radices:?}"));
        }
        let symbols: Vec<Vec<u64>> = radices.iter().enumerate().map(|(i, &m)| d.get(i).map(|&x| vec![x]).unwrap_or_else(|| (0..m).collect())).collect();
        Ok(SimpleFunction::indicator(&space, &DepthSet::from_symbols(&radices, &symbols)))
    };
    let trace = orbit_trace(&space, &cylinder(f)?, &cylinder(g)?, epsilon, &Rational::from_integer(2.into()), horizon as u64).map_err(|e| e.to_string())?;
    Ok(trace.to_tsv())
}

/// ‖C^n 1_F − 1_G‖_2 for n ≤ horizon, F and G cylinders given as digit
/// lists such as "0,1".
#[wasm_bindgen]
pub fn orbit(target: &str, depth: usize, f: &str, g: &str, epsilon: &str, horizon: usize) -> Result<String, String> {
    let spec = resolve(target)?;
    let h = check_horizon(horizon)?;
    let eps = parse_rational(epsilon).map_err(|e| e.to_string())?;
    match gallery::backend_for(&spec, depth) {
        Backend::Rational => orbit_with::<Rational>(&spec, depth, f, g, &eps, h),
        Backend::Float => orbit_with::<f64>(&spec, depth, f, g, &eps, h),
    }
}
