//! The JSON documents describing filters, length functions, and length
//! strategies.
//!
//! Schema: `{"type": "pwl" | "uniform" | "triangular" | "step" | "constant"
//! | "tabulated", "nodes": [[x, v], ...], "normalized": bool}`. Node values
//! are written as decimal strings with 17 significant digits so documents
//! round-trip doubles exactly; numbers are accepted on input. Step functions
//! encode `nodes` as `[interval start, value]` pairs starting at 0
//! (right-continuous). The extra `{"type": "extrema", "multiplier": m}`
//! form names the remainder-driven window strategy for `decompose`.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use alif_core::alif::LengthStrategy;
use alif_core::filters::{Filter, FilterDescriptor, LengthDescriptor, LengthFunction};
use serde_json::{json, Map, Value};

use crate::CliError;

/// Render a double with 17 significant digits (exact round-trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_number(v: &Value, what: &str) -> Result<f64, CliError> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| CliError::config(format!("{what}: not a finite number"))),
        Value::String(s) => s
            .parse::<f64>()
            .map_err(|_| CliError::config(format!("{what}: cannot parse `{s}` as a number"))),
        _ => Err(CliError::config(format!(
            "{what}: expected number or string"
        ))),
    }
}

fn parse_nodes(doc: &Map<String, Value>, what: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let nodes = doc
        .get("nodes")
        .ok_or_else(|| CliError::config(format!("{what}: missing `nodes`")))?
        .as_array()
        .ok_or_else(|| CliError::config(format!("{what}: `nodes` must be an array")))?;
    nodes
        .iter()
        .map(|pair| {
            let pair = pair
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| CliError::config(format!("{what}: node must be a [x, v] pair")))?;
            Ok((parse_number(&pair[0], what)?, parse_number(&pair[1], what)?))
        })
        .collect()
}

/// Load a document from an inline JSON string (starts with `{`) or a path.
pub fn load_document(spec: &str) -> Result<Value, CliError> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        fs::read_to_string(Path::new(spec))
            .map_err(|e| CliError::config(format!("cannot read `{spec}`: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("invalid JSON: {e}")))
}

pub fn parse_filter(spec: &str) -> Result<Filter, CliError> {
    let doc = load_document(spec)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::config("filter spec must be a JSON object"))?;
    let kind = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::config("filter spec: missing `type`"))?;
    let filter = match kind {
        "uniform" => Filter::uniform(),
        "triangular" => Filter::triangular(),
        "pwl" => {
            let nodes = parse_nodes(obj, "pwl filter")?;
            Filter::piecewise_linear(&nodes)
                .map_err(|e| CliError::config(format!("pwl filter: {e}")))?
        }
        other => {
            return Err(CliError::config(format!(
                "unknown filter type `{other}` (expected uniform | triangular | pwl)"
            )))
        }
    };
    if obj.get("normalized").and_then(Value::as_bool) == Some(true) {
        filter
            .normalized()
            .map_err(|e| CliError::config(format!("normalize: {e}")))
    } else {
        Ok(filter)
    }
}

pub fn parse_length(spec: &str) -> Result<LengthFunction, CliError> {
    let doc = load_document(spec)?;
    length_from_document(&doc)
}

pub fn length_from_document(doc: &Value) -> Result<LengthFunction, CliError> {
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::config("length spec must be a JSON object"))?;
    let kind = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::config("length spec: missing `type`"))?;
    match kind {
        "constant" => {
            let nodes = parse_nodes(obj, "constant length")?;
            if nodes.len() != 1 {
                return Err(CliError::config(
                    "constant length: expected exactly one [0, value] node",
                ));
            }
            LengthFunction::constant(nodes[0].1)
                .map_err(|e| CliError::config(format!("constant length: {e}")))
        }
        "step" => {
            let nodes = parse_nodes(obj, "step length")?;
            if nodes.is_empty() || nodes[0].0 != 0.0 {
                return Err(CliError::config(
                    "step length: nodes must start with [0, value]",
                ));
            }
            let breakpoints: Vec<f64> = nodes[1..].iter().map(|&(b, _)| b).collect();
            let values: Vec<f64> = nodes.iter().map(|&(_, v)| v).collect();
            LengthFunction::step(&breakpoints, &values)
                .map_err(|e| CliError::config(format!("step length: {e}")))
        }
        "tabulated" => {
            let nodes = parse_nodes(obj, "tabulated length")?;
            let xs: Vec<f64> = nodes.iter().map(|&(x, _)| x).collect();
            let ys: Vec<f64> = nodes.iter().map(|&(_, y)| y).collect();
            LengthFunction::tabulated(&xs, &ys)
                .map_err(|e| CliError::config(format!("tabulated length: {e}")))
        }
        "affine" => {
            // Convenience for smooth widths a + b x without tabulation.
            let a = parse_number(
                obj.get("offset")
                    .ok_or_else(|| CliError::config("affine length: missing `offset`"))?,
                "affine length offset",
            )?;
            let b = parse_number(
                obj.get("slope")
                    .ok_or_else(|| CliError::config("affine length: missing `slope`"))?,
                "affine length slope",
            )?;
            LengthFunction::continuous(Arc::new(move |x: f64| a + b * x))
                .map_err(|e| CliError::config(format!("affine length: {e}")))
        }
        other => Err(CliError::config(format!(
            "unknown length type `{other}` (expected constant | step | tabulated | affine)"
        ))),
    }
}

/// Length strategies for `decompose`: any length document, or the
/// remainder-driven `extrema` form.
pub fn parse_strategy(spec: &str) -> Result<LengthStrategy, CliError> {
    let doc = load_document(spec)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::config("length spec must be a JSON object"))?;
    if obj.get("type").and_then(Value::as_str) == Some("extrema") {
        let multiplier = parse_number(
            obj.get("multiplier").unwrap_or(&json!(2.0)),
            "extrema multiplier",
        )?;
        if !(multiplier > 0.0) {
            return Err(CliError::config("extrema multiplier must be positive"));
        }
        return Ok(LengthStrategy::ExtremaBased { multiplier });
    }
    Ok(LengthStrategy::Fixed(length_from_document(&doc)?))
}

/// Serialize a filter back to its document form.
pub fn filter_document(filter: &Filter) -> Value {
    match filter.descriptor() {
        FilterDescriptor::Uniform { scale } => json!({
            "type": "uniform",
            "scale": fmt_f64(scale),
            "normalized": filter.is_normalized(),
        }),
        FilterDescriptor::Triangular { scale } => json!({
            "type": "triangular",
            "scale": fmt_f64(scale),
            "normalized": filter.is_normalized(),
        }),
        FilterDescriptor::PiecewiseLinear { nodes } => json!({
            "type": "pwl",
            "nodes": nodes
                .iter()
                .map(|&(x, v)| json!([fmt_f64(x), fmt_f64(v)]))
                .collect::<Vec<_>>(),
            "normalized": filter.is_normalized(),
        }),
        FilterDescriptor::Custom => json!({ "type": "custom" }),
    }
}

/// Serialize a length function back to its document form.
pub fn length_document(length: &LengthFunction) -> Value {
    match length.descriptor() {
        LengthDescriptor::Constant { value } => json!({
            "type": "constant",
            "nodes": [[fmt_f64(0.0), fmt_f64(value)]],
        }),
        LengthDescriptor::Step {
            breakpoints,
            values,
        } => {
            let mut nodes = vec![json!([fmt_f64(0.0), fmt_f64(values[0])])];
            for (b, v) in breakpoints.iter().zip(values[1..].iter()) {
                nodes.push(json!([fmt_f64(*b), fmt_f64(*v)]));
            }
            json!({ "type": "step", "nodes": nodes })
        }
        LengthDescriptor::Tabulated { xs, ys } => json!({
            "type": "tabulated",
            "nodes": xs
                .iter()
                .zip(ys.iter())
                .map(|(&x, &y)| json!([fmt_f64(x), fmt_f64(y)]))
                .collect::<Vec<_>>(),
        }),
        LengthDescriptor::Continuous => json!({ "type": "affine" }),
    }
}

pub fn strategy_document(strategy: &LengthStrategy) -> Value {
    match strategy {
        LengthStrategy::Fixed(l) => length_document(l),
        LengthStrategy::ExtremaBased { multiplier } => json!({
            "type": "extrema",
            "multiplier": fmt_f64(*multiplier),
        }),
    }
}
