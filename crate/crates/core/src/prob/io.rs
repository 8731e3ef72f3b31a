//! Distribution file format: a JSON object with `alphabets` (label -> size)
//! and `factors`, a list of `{child, parents, probs}` where `probs` nests
//! row-major with parent coordinates outermost.

use serde_json::{json, Map, Value};

use super::{Alphabet, Factor, Joint, ProbError, Var, VARS};

fn fmt_err(msg: impl Into<String>) -> ProbError {
    ProbError::Format(msg.into())
}

fn parse_vars(v: &Value, key: &str) -> Result<Vec<Var>, ProbError> {
    let items: Vec<&str> = match v {
        Value::String(s) => vec![s.as_str()],
        Value::Array(a) => a
            .iter()
            .map(|x| x.as_str().ok_or_else(|| fmt_err(format!("{key}: expected strings"))))
            .collect::<Result<_, _>>()?,
        _ => return Err(fmt_err(format!("{key}: expected string or list"))),
    };
    items
        .into_iter()
        .map(|s| Var::parse(s).ok_or_else(|| fmt_err(format!("unknown variable {s:?}"))))
        .collect()
}

/// Flattens a nested row-major array against the expected dimensions.
fn flatten_probs(v: &Value, dims: &[usize], out: &mut Vec<f64>) -> Result<(), ProbError> {
    match dims.split_first() {
        None => match v.as_f64() {
            Some(x) => {
                out.push(x);
                Ok(())
            }
            None => Err(fmt_err("probs: expected a number at the innermost level")),
        },
        Some((&d, rest)) => {
            let arr = v
                .as_array()
                .ok_or_else(|| fmt_err("probs: expected a nested array"))?;
            if arr.len() != d {
                return Err(fmt_err(format!(
                    "probs: dimension mismatch (got {}, expected {d})",
                    arr.len()
                )));
            }
            for item in arr {
                flatten_probs(item, rest, out)?;
            }
            Ok(())
        }
    }
}

fn nest_probs(flat: &[f64], dims: &[usize]) -> Value {
    match dims.split_first() {
        None => json!(flat[0]),
        Some((&d, rest)) => {
            let stride = flat.len() / d;
            Value::Array(
                (0..d)
                    .map(|i| nest_probs(&flat[i * stride..(i + 1) * stride], rest))
                    .collect(),
            )
        }
    }
}

pub fn joint_from_json(v: &Value) -> Result<Joint, ProbError> {
    let obj = v.as_object().ok_or_else(|| fmt_err("expected a JSON object"))?;
    let alpha_obj = obj
        .get("alphabets")
        .and_then(Value::as_object)
        .ok_or_else(|| fmt_err("missing alphabets object"))?;
    let mut alphabets = Vec::with_capacity(8);
    for var in VARS {
        let size = alpha_obj
            .get(var.name())
            .and_then(Value::as_u64)
            .ok_or_else(|| fmt_err(format!("missing alphabet size for {var}")))?;
        alphabets.push(Alphabet::atomic(size as usize));
    }
    let size_of = |v: Var| alphabets[v.index()].size;

    let factor_list = obj
        .get("factors")
        .and_then(Value::as_array)
        .ok_or_else(|| fmt_err("missing factors list"))?;
    let mut factors = Vec::with_capacity(factor_list.len());
    for f in factor_list {
        let fo = f.as_object().ok_or_else(|| fmt_err("factor: expected object"))?;
        let children = parse_vars(fo.get("child").ok_or_else(|| fmt_err("factor: missing child"))?, "child")?;
        let parents = parse_vars(
            fo.get("parents").unwrap_or(&Value::Array(vec![])),
            "parents",
        )?;
        let child_sizes: Vec<usize> = children.iter().map(|&v| size_of(v)).collect();
        let parent_sizes: Vec<usize> = parents.iter().map(|&v| size_of(v)).collect();
        let dims: Vec<usize> = parent_sizes.iter().chain(&child_sizes).copied().collect();
        let mut table = Vec::new();
        flatten_probs(
            fo.get("probs").ok_or_else(|| fmt_err("factor: missing probs"))?,
            &dims,
            &mut table,
        )?;
        factors.push(Factor::new(children, parents, child_sizes, parent_sizes, table));
    }
    Joint::build(alphabets, factors)
}

pub fn joint_to_json(j: &Joint) -> Value {
    let mut alphabets = Map::new();
    for var in VARS {
        alphabets.insert(var.name().to_string(), json!(j.size_of(var)));
    }
    let factors: Vec<Value> = j
        .factors
        .iter()
        .map(|f| {
            let dims: Vec<usize> = f.parent_sizes.iter().chain(&f.child_sizes).copied().collect();
            json!({
                "child": f.children.iter().map(|v| v.name()).collect::<Vec<_>>(),
                "parents": f.parents.iter().map(|v| v.name()).collect::<Vec<_>>(),
                "probs": nest_probs(&f.table, &dims),
            })
        })
        .collect();
    json!({ "alphabets": alphabets, "factors": factors })
}

pub fn read_joint(path: &std::path::Path) -> Result<Joint, ProbError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fmt_err(format!("{}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| fmt_err(format!("{}: {e}", path.display())))?;
    joint_from_json(&value)
}

pub fn write_joint(path: &std::path::Path, j: &Joint) -> Result<(), ProbError> {
    let text = serde_json::to_string_pretty(&joint_to_json(j))
        .expect("joint serializes");
    std::fs::write(path, text).map_err(|e| fmt_err(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::sample::{random_joint, seeded};

    #[test]
    fn json_round_trip_preserves_pmf() {
        let mut rng = seeded(0x10_0001);
        let j = random_joint(&mut rng, 2);
        let v = joint_to_json(&j);
        let back = joint_from_json(&v).unwrap();
        for (a, b) in j.pmf().iter().zip(back.pmf()) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn malformed_row_rejected_with_context() {
        let v = serde_json::json!({
            "alphabets": {"U":2,"V":2,"V1":2,"V2":2,"X":2,"Y1":2,"Y2":2,"Z":2},
            "factors": [
                {"child": "U", "parents": [], "probs": [0.7, 0.7]},
            ]
        });
        assert!(joint_from_json(&v).is_err());
    }
}
