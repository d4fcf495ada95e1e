//! Browser bindings: JSON in, JSON out.

use num_complex::Complex64;
use serde_json::json;
use wasm_bindgen::prelude::*;

use pickfn::evaluation::eval;
use pickfn::moebius::Matrix2C;
use pickfn::rational::{check_rational, RationalFunction};
use pickfn::{HerglotzFunction, DEFAULT_TOL};

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// `φ(re + i im)` as `[re, im]`.
pub fn eval_json(phi: &str, re: f64, im: f64) -> Result<String, String> {
    let phi: HerglotzFunction = serde_json::from_str(phi).map_err(|e| e.to_string())?;
    let w = eval(&phi, Complex64::new(re, im), DEFAULT_TOL).map_err(|e| e.to_string())?;
    Ok(json!([w.re, w.im]).to_string())
}

/// Class of the matrix `{"a":[re,im], ...}` with `kappa` merged in.
pub fn classify_json(matrix: &str) -> Result<String, String> {
    let m: Matrix2C = serde_json::from_str(matrix).map_err(|e| e.to_string())?;
    let class = m.classify().map_err(|e| e.to_string())?;
    let mut out = serde_json::to_value(class).map_err(|e| e.to_string())?;
    out["kappa"] = json!(class.kappa());
    Ok(out.to_string())
}

/// Endofunction certificate for `{"num": [[re,im],...], "den": [...]}`.
pub fn check_rational_json(f: &str) -> Result<String, String> {
    let f: RationalFunction = serde_json::from_str(f).map_err(|e| e.to_string())?;
    let cert = check_rational(&f).map_err(|e| e.to_string())?;
    serde_json::to_string_pretty(&cert).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = evaluate)]
pub fn evaluate(phi: &str, re: f64, im: f64) -> Result<String, JsError> {
    eval_json(phi, re, im).map_err(js_err)
}

#[wasm_bindgen(js_name = classify)]
pub fn classify(matrix: &str) -> Result<String, JsError> {
    classify_json(matrix).map_err(js_err)
}

#[wasm_bindgen(js_name = checkRational)]
pub fn check_rational_js(f: &str) -> Result<String, JsError> {
    check_rational_json(f).map_err(js_err)
}
