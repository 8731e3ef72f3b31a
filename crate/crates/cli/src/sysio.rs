//! JSON round-trip for constraint systems, plus preset-or-file resolution.
//!
//! A system file stores each constraint as its label plus the same textual
//! relation syntax the preset tables use, so files written by `derive` can
//! be fed back to any subcommand that takes a system.

use serde_json::{json, Map, Value};

use secrecy_regions::algebra::presets::preset;
use secrecy_regions::algebra::{parse_constraint, ConstraintSystem, RateVar, SampleFamily};

pub fn system_to_json(sys: &ConstraintSystem) -> Value {
    let family = match sys.family {
        SampleFamily::Gated => "gated".to_string(),
        SampleFamily::Collapsed { side } => format!("collapsed-{side}"),
    };
    json!({
        "name": sys.name,
        "provenance": sys.provenance,
        "free": sys.free.iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
        "bound": sys.bound.iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
        "family": family,
        "constraints": sys
            .constraints
            .iter()
            .map(|c| json!({ "label": c.label, "text": c.text() }))
            .collect::<Vec<_>>(),
    })
}

pub fn system_from_json(v: &Value) -> Result<ConstraintSystem, String> {
    // Accept either a bare system or a `derive` report wrapping one.
    let obj = match v.get("system") {
        Some(inner) => as_object(inner, "system")?,
        None => as_object(v, "root")?,
    };
    let name = str_field(obj, "name")?;
    let provenance = str_field(obj, "provenance")?;
    let family = match str_field(obj, "family")?.as_str() {
        "gated" => SampleFamily::Gated,
        "collapsed-1" => SampleFamily::Collapsed { side: 1 },
        "collapsed-2" => SampleFamily::Collapsed { side: 2 },
        other => return Err(format!("unknown family {other:?}")),
    };
    let vars = |key: &str| -> Result<Vec<RateVar>, String> {
        let arr = obj
            .get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| format!("missing array field {key:?}"))?;
        arr.iter()
            .map(|e| {
                e.as_str()
                    .map(RateVar::new)
                    .ok_or_else(|| format!("non-string entry in {key:?}"))
            })
            .collect()
    };
    let rows = obj
        .get("constraints")
        .and_then(Value::as_array)
        .ok_or_else(|| "missing array field \"constraints\"".to_string())?;
    let mut constraints = Vec::with_capacity(rows.len());
    for row in rows {
        let row = as_object(row, "constraint")?;
        let label = str_field(row, "label")?;
        let text = str_field(row, "text")?;
        constraints
            .push(parse_constraint(&label, &text).map_err(|e| format!("row {label:?}: {e}"))?);
    }
    Ok(ConstraintSystem {
        name,
        provenance,
        free: vars("free")?,
        bound: vars("bound")?,
        constraints,
        family,
    })
}

/// Resolves a `--system`-style argument: a preset id when one matches,
/// otherwise a path to a system JSON file.
pub fn load_system(spec: &str) -> Result<(ConstraintSystem, String), String> {
    if let Some(sys) = preset(spec) {
        return Ok((sys, format!("preset:{spec}")));
    }
    let raw = std::fs::read_to_string(spec)
        .map_err(|e| format!("{spec}: not a preset id and not a readable file: {e}"))?;
    let v: Value = serde_json::from_str(&raw).map_err(|e| format!("{spec}: invalid JSON: {e}"))?;
    let sys = system_from_json(&v).map_err(|e| format!("{spec}: {e}"))?;
    Ok((sys, format!("file:{spec}")))
}

fn as_object<'v>(v: &'v Value, what: &str) -> Result<&'v Map<String, Value>, String> {
    v.as_object().ok_or_else(|| format!("{what} is not a JSON object"))
}

fn str_field(obj: &Map<String, Value>, key: &str) -> Result<String, String> {
    obj.get(key)
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| format!("missing string field {key:?}"))
}
