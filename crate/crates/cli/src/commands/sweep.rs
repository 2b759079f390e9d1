//! Cartesian parameter grids over any other verb.

use std::cmp::Ordering;

use anyhow::Result;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::Context;
use crate::config::overlay;
use crate::exit::{code_of, usage, USAGE};
use crate::output::{Outcome, Table};

/// One grid axis; a compound axis sets several keys per value.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub keys: Vec<String>,
    pub values: Vec<Vec<Value>>,
}

fn scalar(text: &str) -> Value {
    if let Ok(i) = text.parse::<i64>() {
        return json!(i);
    }
    match text.parse::<f64>() {
        Ok(f) if f.is_finite() => json!(f),
        _ => Value::String(text.to_string()),
    }
}

/// Parses `key=v1,v2` or `a:b=1:2,3:4`.
pub fn parse_axis(spec: &str) -> Result<Axis> {
    let (keys, values) = spec
        .split_once('=')
        .ok_or_else(|| usage(format!("grid axis {spec:?} needs the form key=v1,v2")))?;
    let keys: Vec<String> = keys.split(':').map(|k| k.trim().to_string()).collect();
    if keys.iter().any(String::is_empty) {
        return Err(usage(format!("grid axis {spec:?} has an empty key")));
    }
    let mut tuples = Vec::new();
    for item in values.split(',').map(str::trim).filter(|v| !v.is_empty()) {
        let parts: Vec<Value> = item.split(':').map(|v| scalar(v.trim())).collect();
        if parts.len() != keys.len() {
            return Err(usage(format!(
                "grid value {item:?} does not match keys {}",
                keys.join(":")
            )));
        }
        tuples.push(parts);
    }
    if tuples.is_empty() {
        return Err(usage(format!("grid axis {spec:?} has no values")));
    }
    Ok(Axis {
        keys,
        values: tuples,
    })
}

/// Every combination of axis values as ordered `(key, value)` lists.
pub fn expand(axes: &[Axis]) -> Vec<Vec<(String, Value)>> {
    let mut cells: Vec<Vec<(String, Value)>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(cells.len() * axis.values.len());
        for cell in &cells {
            for tuple in &axis.values {
                let mut c = cell.clone();
                c.extend(axis.keys.iter().cloned().zip(tuple.iter().cloned()));
                next.push(c);
            }
        }
        cells = next;
    }
    cells
}

fn compare_values(a: &Value, b: &Value) -> Ordering {
    match (a.as_f64(), b.as_f64()) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.to_string().cmp(&b.to_string()),
    }
}

fn compare_cells(a: &[(String, Value)], b: &[(String, Value)]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|((_, x), (_, y))| compare_values(x, y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn run_cell(verb: &str, base: &Value, cell: &[(String, Value)], ctx: &Context) -> (u8, Value) {
    let params: Map<String, Value> = cell.iter().cloned().collect();
    let mut args = params.clone();
    let seed = args.remove("seed");
    let unknown = args
        .keys()
        .find(|k| base.get(k.as_str()).is_none())
        .cloned();
    let result = match (unknown, seed.map(|s| s.as_u64())) {
        (Some(key), _) => Err(usage(format!("{verb} has no parameter {key:?}"))),
        (None, Some(None)) => Err(usage("seed values must be non-negative integers")),
        (None, seed) => {
            let ctx = Context {
                seed: seed.flatten().unwrap_or(ctx.seed),
            };
            super::run(verb, overlay(base, &Value::Object(args)), &ctx)
        }
    };
    match result {
        Ok(outcome) => (
            outcome.code,
            json!({"params": params, "exit_code": outcome.code, "report": outcome.report}),
        ),
        Err(err) => {
            let code = code_of(&err);
            (
                code,
                json!({"params": params, "exit_code": code, "error": format!("{err:#}")}),
            )
        }
    }
}

/// Runs `verb` on every grid cell; `base` holds its merged arguments with
/// every field present (unset ones as `null`). A `seed` key overrides the
/// global seed per cell.
pub fn run(verb: &str, base: &Value, grid: &[String], ctx: &Context) -> Result<Outcome> {
    let axes = grid
        .iter()
        .map(|g| parse_axis(g))
        .collect::<Result<Vec<_>>>()?;
    if axes.is_empty() {
        return Err(usage("sweep needs at least one --grid axis"));
    }
    let keys: Vec<String> = axes.iter().flat_map(|a| a.keys.clone()).collect();
    if let Some(dup) = keys
        .iter()
        .enumerate()
        .find(|(i, k)| keys[..*i].contains(k))
    {
        return Err(usage(format!("grid key {:?} appears twice", dup.1)));
    }
    let mut cells = expand(&axes);
    cells.sort_by(|a, b| compare_cells(a, b));

    let results: Vec<(u8, Value)> = cells
        .par_iter()
        .map(|cell| run_cell(verb, base, cell, ctx))
        .collect();

    let code = results.iter().map(|r| r.0).max().unwrap_or(USAGE);
    let mut header = keys.clone();
    header.push("exit_code".into());
    let mut table = Table::new(header);
    for (cell, (code, _)) in cells.iter().zip(&results) {
        let mut row: Vec<String> = cell
            .iter()
            .map(|(_, v)| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect();
        row.push(code.to_string());
        table.push(row);
    }
    let report = json!({
        "command": "sweep",
        "verb": verb,
        "seed": ctx.seed,
        "grid": grid,
        "cells": results.into_iter().map(|r| r.1).collect::<Vec<_>>(),
        "exit_code": code,
    });
    Ok(Outcome::new(code, report, Some(table)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes_parse_and_expand() {
        let a = parse_axis("n:m=1:1,2:1").unwrap();
        let b = parse_axis("K=-0.2,0,0.2").unwrap();
        assert_eq!(a.keys, ["n", "m"]);
        assert_eq!(b.values[1], vec![json!(0)]);
        let cells = expand(&[a, b]);
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[0][2], ("K".to_string(), json!(-0.2)));
    }

    #[test]
    fn bad_axes() {
        for spec in ["n", "n=", "a:b=1", "=1"] {
            assert!(parse_axis(spec).is_err(), "{spec}");
        }
        assert_eq!(scalar("plus"), json!("plus"));
    }

    #[test]
    fn cells_sort_numerically() {
        let mut cells = expand(&[parse_axis("x=10,2,-1").unwrap()]);
        cells.sort_by(|a, b| compare_cells(a, b));
        let xs: Vec<_> = cells.iter().map(|c| c[0].1.clone()).collect();
        assert_eq!(xs, vec![json!(-1), json!(2), json!(10)]);
    }
}
