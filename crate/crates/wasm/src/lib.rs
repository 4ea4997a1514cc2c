//! Browser bindings. Each entry point takes a matrix as JSON `{"n", "entries"}`
//! or CSV text and returns JSON; errors come back as a one-line message.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use tropicore::report::round_sig;
use tropicore::{build_report, parse_matrix, spectrum, Matrix, ReportOptions, Semiring, Tolerance};

fn semiring(algebra: &str) -> Result<Semiring, String> {
    match algebra {
        "max" => Ok(Semiring::MaxTimes),
        "nonneg" => Ok(Semiring::PlusTimes),
        other => Err(format!("unknown algebra {other:?}; expected max or nonneg")),
    }
}

fn load(text: &str, algebra: &str) -> Result<(Matrix, Semiring), String> {
    let sr = semiring(algebra)?;
    let a = parse_matrix(text, sr).map_err(|e| e.to_string())?;
    Ok((a, sr))
}

/// Full analysis report.
pub fn analyze_json(text: &str, algebra: &str) -> Result<String, String> {
    let (a, sr) = load(text, algebra)?;
    let report = build_report(&a, sr, &ReportOptions::default(), &Tolerance::default()).map_err(|e| e.to_string())?;
    Ok(report.to_json())
}

#[derive(Serialize)]
struct PowerEntry {
    k: usize,
    rows: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct PowerSequence {
    scale: f64,
    powers: Vec<PowerEntry>,
}

/// `(A/r)^k` for `k = 1..=max_k`, where `r` is the largest eigenvalue (1 if there is none).
pub fn power_sequence_json(text: &str, algebra: &str, max_k: usize) -> Result<String, String> {
    let (a, sr) = load(text, algebra)?;
    if max_k == 0 || max_k > 200 {
        return Err("number of powers must be between 1 and 200".into());
    }
    let scale = spectrum(&a, sr, &Tolerance::default()).first().copied().unwrap_or(1.0);
    let b = a.scaled(1.0 / scale);
    let mut cur = b.clone();
    let mut powers = Vec::with_capacity(max_k);
    for k in 1..=max_k {
        powers.push(PowerEntry {
            k,
            rows: cur.rows().into_iter().map(|r| r.into_iter().map(round_sig).collect()).collect(),
        });
        cur = cur.mul(&b).map_err(|e| e.to_string())?;
    }
    let seq = PowerSequence {
        scale: round_sig(scale),
        powers,
    };
    Ok(serde_json::to_string(&seq).expect("sequence serializes"))
}

/// Eigencones of `A^k`, optionally restricted to one eigenvalue.
pub fn eigencone_json(text: &str, algebra: &str, k: usize, rho: Option<f64>) -> Result<String, String> {
    let (a, sr) = load(text, algebra)?;
    let opts = ReportOptions { power: Some(k), rho };
    let report = build_report(&a, sr, &opts, &Tolerance::default()).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&report.eigencones).expect("eigencones serialize"))
}

#[wasm_bindgen]
pub fn analyze(text: &str, algebra: &str) -> Result<String, JsValue> {
    analyze_json(text, algebra).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn power_sequence(text: &str, algebra: &str, max_k: usize) -> Result<String, JsValue> {
    power_sequence_json(text, algebra, max_k).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn eigencone(text: &str, algebra: &str, k: usize, rho: Option<f64>) -> Result<String, JsValue> {
    eigencone_json(text, algebra, k, rho).map_err(|e| JsValue::from_str(&e))
}
