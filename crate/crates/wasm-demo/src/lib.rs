//! wasm-bindgen bindings for the static page in `www/`. Every export takes
//! JSON text and returns the same JSON report the command-line tool prints.

use fuchsian_cli::commands::{certify_text, check_text, solve_text, CertifyArgs, REMARK2_JSON, REMARK3_JSON};
use wasm_bindgen::prelude::*;

const W_TX2_JSON: &str = include_str!("../../cli/data/w_tx2.json");

fn check_impl(spec: &str, depth: u32) -> Result<String, String> {
    check_text(spec, depth).map(|r| r.to_json()).map_err(|e| e.to_string())
}

fn solve_impl(spec: &str, order: u32) -> Result<String, String> {
    solve_text(spec, order).map(|(r, _)| r.to_json()).map_err(|e| e.to_string())
}

fn certify_impl(spec: &str, w: &str, seed: Option<u32>, grid: u32) -> Result<String, String> {
    let args = CertifyArgs {
        w_random: seed.is_some(),
        seed: seed.map_or(0, u64::from),
        grid: grid as usize,
        ..Default::default()
    };
    let w = if seed.is_some() { None } else { Some(w) };
    certify_text(spec, w, &args).map(|(r, _)| r.to_json()).map_err(|e| e.to_string())
}

/// Validation and characteristic exponents.
#[wasm_bindgen]
pub fn check(spec: &str, depth: u32) -> Result<String, JsError> {
    check_impl(spec, depth).map_err(|e| JsError::new(&e))
}

/// Formal solution through `t^order`.
#[wasm_bindgen]
pub fn solve(spec: &str, order: u32) -> Result<String, JsError> {
    solve_impl(spec, order).map_err(|e| JsError::new(&e))
}

/// Barrier certificate for the candidate `w`, or for a seeded random
/// candidate when `seed` is given.
#[wasm_bindgen]
pub fn certify(spec: &str, w: &str, seed: Option<u32>, grid: u32) -> Result<String, JsError> {
    certify_impl(spec, w, seed, grid).map_err(|e| JsError::new(&e))
}

/// Bundled inputs: `remark2`, `remark3` and `w_tx2`.
#[wasm_bindgen]
pub fn bundled(name: &str) -> Option<String> {
    match name {
        "remark2" => Some(REMARK2_JSON.to_string()),
        "remark3" => Some(REMARK3_JSON.to_string()),
        "w_tx2" => Some(W_TX2_JSON.to_string()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn status(report: &str) -> &str {
        if report.contains("\"status\": \"pass\"") {
            "pass"
        } else {
            "violation"
        }
    }

    #[test]
    fn exports_produce_reports() {
        let r3 = bundled("remark3").unwrap();
        assert_eq!(status(&check_impl(&r3, 8).unwrap()), "pass");
        assert!(solve_impl(&r3, 4).unwrap().contains("\"residual_exact_zero\""));
        assert!(check_impl("{", 8).is_err());
        let cert = certify_impl(&bundled("remark2").unwrap(), &bundled("w_tx2").unwrap(), None, 10).unwrap();
        assert!(cert.contains("HypothesisViolated"));
    }
}
