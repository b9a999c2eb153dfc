//! Browser bindings. Each export has a plain Rust twin returning
//! `Result<String, String>` so the logic is testable off the browser.

use liquidity_core::report::{render_scenario, Format};
use liquidity_core::stats::Sample;
use liquidity_core::svg::{boxplot_svg, sz_curve_svg};
use liquidity_core::{ScenarioConfig, SzCurve};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Scenario files offered by the demo page, keyed by label.
pub const PRESETS: [(&str, &str); 4] = [
    ("pre-crisis, SZ1", include_str!("../../core/fixtures/pre_crisis_sz1.cfg")),
    ("after crisis, SZ1", include_str!("../../core/fixtures/after_crisis_sz1.cfg")),
    ("pre-crisis, SZ3", include_str!("../../core/fixtures/pre_crisis_sz3.cfg")),
    ("after crisis, SZ3", include_str!("../../core/fixtures/after_crisis_sz3.cfg")),
];

/// Parses and evaluates a scenario file. The JSON carries the full
/// comparison plus the rendered text table.
pub fn scenario_json(config_text: &str) -> Result<String, String> {
    let cfg: ScenarioConfig = config_text.parse().map_err(|e| format!("{e}"))?;
    let cmp = cfg.evaluate().map_err(|e| e.to_string())?;
    let table = render_scenario(&cmp, &cfg.curve, cfg.rounding, Format::Text);
    Ok(json!({ "comparison": cmp, "curve": cfg.curve, "table": table }).to_string())
}

/// `spec` is a built-in name such as `SZ1`, or an anchor list `0.3:0.2, 0.45:0.1`.
pub fn curve_svg(spec: &str, highlight: Option<f64>) -> Result<String, String> {
    let spec = spec.trim();
    let curve = if spec.contains(':') {
        SzCurve::from_anchor_list("custom", spec)
    } else {
        SzCurve::builtin(spec)
    }
    .map_err(|e| e.to_string())?;
    match highlight {
        Some(h) if !h.is_finite() || h < 0.0 => Err(format!("CA/CR must be a non-negative number, got {h}")),
        _ => Ok(sz_curve_svg(&curve, highlight)),
    }
}

/// Numbers separated by whitespace, commas or semicolons.
pub fn parse_numbers(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c.is_whitespace() || c == ',' || c == ';')
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("`{t}` is not a finite number")),
        })
        .collect()
}

/// Summary statistics and a box plot for pasted values.
pub fn sample_json(values_text: &str, trim: f64, winsor: f64) -> Result<String, String> {
    for f in [trim, winsor] {
        if !(0.0..0.5).contains(&f) {
            return Err(format!("tail fraction must be in [0, 0.5), got {f}"));
        }
    }
    let sample = Sample::new(parse_numbers(values_text)?).map_err(|e| e.to_string())?;
    let five = sample.five_number().map_err(|_| "enter at least one number".to_string())?;
    let svg = boxplot_svg("Pasted values", &[("values".to_string(), five)]);
    Ok(json!({ "summary": sample.summarize(trim, winsor), "five_number": five, "svg": svg }).to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = presetNames)]
pub fn preset_names() -> Vec<String> {
    PRESETS.iter().map(|(n, _)| n.to_string()).collect()
}

#[wasm_bindgen(js_name = presetText)]
pub fn preset_text(index: usize) -> Option<String> {
    PRESETS.get(index).map(|(_, t)| t.to_string())
}

#[wasm_bindgen(js_name = evaluateScenario)]
pub fn evaluate_scenario(config_text: &str) -> Result<String, JsError> {
    js(scenario_json(config_text))
}

#[wasm_bindgen(js_name = szCurveSvg)]
pub fn sz_curve_svg_js(spec: &str, highlight: Option<f64>) -> Result<String, JsError> {
    js(curve_svg(spec, highlight))
}

#[wasm_bindgen(js_name = summarizeValues)]
pub fn summarize_values(values_text: &str, trim: f64, winsor: f64) -> Result<String, JsError> {
    js(sample_json(values_text, trim, winsor))
}
