//! Browser bindings for a small interactive demo: draw a Cantor prefractal,
//! plot its box counts, and plot the equi-homogeneity ratio curve.
//!
//! Every export takes plain strings and numbers and returns JSON.

use fracdim::cantor::{cantor_prefractal, pi_product};
use fracdim::dims::{box_counts, box_dimension_estimate};
use fracdim::equihom::equihom_certify;
use fracdim::{AnySet, CantorSpec, PointSet, RatioRule, Scalar};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Deepest prefractal the page will build.
pub const MAX_DEPTH: usize = 14;

fn spec_for(kind: &str, ratio: &str, depth: usize) -> Result<CantorSpec, String> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(format!("depth must be in 1..={MAX_DEPTH}"));
    }
    let rule = match kind {
        "constant" => RatioRule::Constant(ratio.trim().parse::<Scalar>().map_err(|e| e.to_string())?),
        "blocks" => RatioRule::DyadicBlocks { even: Scalar::new(1, 3), odd: Scalar::new(1, 9) },
        other => return Err(format!("unknown kind {other:?}")),
    };
    CantorSpec::new(rule, depth).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Prefractal {
    pieces: usize,
    length: String,
    intervals: Vec<(f64, f64)>,
}

pub fn prefractal_json(kind: &str, ratio: &str, depth: usize) -> Result<String, String> {
    let spec = spec_for(kind, ratio, depth)?;
    let set = cantor_prefractal(&spec, 0, depth).map_err(|e| e.to_string())?;
    let out = Prefractal {
        pieces: set.len(),
        length: set.length().to_string(),
        intervals: set.intervals().iter().map(|i| (i.lo().to_f64(), i.hi().to_f64())).collect(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct LogLog {
    points: Vec<(f64, f64)>,
    lower: Option<f64>,
    upper: Option<f64>,
}

/// `(log10 1/δ, log10 N)` at `δ = π(0, n)/2`, `n < depth`.
pub fn box_counts_json(kind: &str, ratio: &str, depth: usize) -> Result<String, String> {
    let spec = spec_for(kind, ratio, depth)?;
    let set = cantor_prefractal(&spec, 0, depth).map_err(|e| e.to_string())?;
    let scales = (1..depth)
        .map(|n| pi_product(&spec, 0, n).map(|p| p.value / Scalar::from_integer(2)))
        .collect::<fracdim::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let counts = box_counts(&set, &scales).map_err(|e| e.to_string())?;
    let est = box_dimension_estimate(&counts).ok();
    let points =
        counts.iter().map(|b| (-b.delta.to_f64().log10(), (b.count as f64).log10())).collect();
    let out = LogLog { points, lower: est.as_ref().map(|e| e.lower), upper: est.as_ref().map(|e| e.upper) };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Curve {
    verdict: String,
    max_ratio: f64,
    /// `(log2 1/ρ, ratio)`.
    points: Vec<(f64, f64)>,
}

/// Ratio curve for `"dyadic"` (`δ = 1/4`, `ρ = 2^-3 … 2^-depth`) or
/// `"middle-third"` (`δ = 1/9`, `ρ = 3^-3 … 3^-min(depth, 9)` on the depth-9 prefractal).
pub fn equihom_json(set: &str, depth: usize) -> Result<String, String> {
    if !(4..=MAX_DEPTH).contains(&depth) {
        return Err(format!("depth must be in 4..={MAX_DEPTH}"));
    }
    let (f, delta, base, finest): (AnySet, Scalar, Scalar, usize) = match set {
        "dyadic" => (PointSet::dyadic_sequence(depth as u32 + 4).into(), Scalar::new(1, 4), Scalar::new(1, 2), depth),
        "middle-third" => {
            let spec = CantorSpec::constant(Scalar::new(1, 3), 9).map_err(|e| e.to_string())?;
            let c = cantor_prefractal(&spec, 0, 9).map_err(|e| e.to_string())?;
            (c.into(), Scalar::new(1, 9), Scalar::new(1, 3), depth.min(9))
        }
        other => return Err(format!("unknown set {other:?}")),
    };
    let pairs: Vec<_> = (3..=finest as i32).map(|j| (delta.clone(), base.pow(j))).collect();
    let one = Scalar::one();
    let r = equihom_certify(&f, &pairs, &one, &one, None).map_err(|e| e.to_string())?;
    let out = Curve {
        verdict: format!("{:?}", r.verdict).to_lowercase(),
        max_ratio: r.max_ratio,
        points: r.rows.iter().map(|row| (-row.rho.to_f64().log2(), row.ratio)).collect(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn prefractal(kind: &str, ratio: &str, depth: usize) -> Result<String, JsValue> {
    prefractal_json(kind, ratio, depth).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = boxCounts)]
pub fn box_counts_js(kind: &str, ratio: &str, depth: usize) -> Result<String, JsValue> {
    box_counts_json(kind, ratio, depth).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = equihomCurve)]
pub fn equihom_curve(set: &str, depth: usize) -> Result<String, JsValue> {
    equihom_json(set, depth).map_err(|e| JsValue::from_str(&e))
}
