//! JSON serialization for constraint systems and elimination outcomes.
//!
//! A system file is an object with `name`, `free`, `bound`, `family`, and
//! `constraints`; rational numbers are `{num, den}` decimal strings so
//! exact coefficients survive the trip. A bare JSON array of constraint
//! objects is also accepted as a system (free variables default to
//! `R1`/`R2`, everything else bound). Files produced by `derive` wrap a
//! system together with its base rows and multiplier certificates; readers
//! here unwrap that form transparently.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::fm::{BaseRow, FmOutcome};
use super::{
    AlgebraError, Constraint, ConstraintSystem, InfoTerm, LinearExpr, Rat, RateVar, Relation,
    SampleFamily,
};
use crate::prob::Var;

#[derive(Debug, Serialize, Deserialize)]
struct RatJson {
    num: String,
    den: String,
}

impl RatJson {
    fn encode(r: &Rat) -> RatJson {
        RatJson { num: r.numer().to_string(), den: r.denom().to_string() }
    }

    fn decode(&self) -> Result<Rat, AlgebraError> {
        let num = BigInt::from_str(self.num.trim())
            .map_err(|_| AlgebraError::Format(format!("bad numerator {:?}", self.num)))?;
        let den = BigInt::from_str(self.den.trim())
            .map_err(|_| AlgebraError::Format(format!("bad denominator {:?}", self.den)))?;
        if den.is_zero() {
            return Err(AlgebraError::Format("zero denominator".into()));
        }
        Ok(Rat::new(num, den))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RateCoefJson {
    var: String,
    num: String,
    den: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct InfoCoefJson {
    a: Vec<String>,
    b: Vec<String>,
    #[serde(default)]
    c: Vec<String>,
    num: String,
    den: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ConstraintJson {
    label: String,
    relation: String,
    #[serde(default)]
    rates: Vec<RateCoefJson>,
    #[serde(default)]
    infos: Vec<InfoCoefJson>,
    constant: RatJson,
    /// Derived field (no rate variables); ignored on input.
    #[serde(default)]
    gate: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct SystemJson {
    name: String,
    #[serde(default)]
    provenance: String,
    free: Vec<String>,
    #[serde(default)]
    bound: Vec<String>,
    #[serde(default = "default_family")]
    family: String,
    constraints: Vec<ConstraintJson>,
}

fn default_family() -> String {
    "gated".into()
}

#[derive(Debug, Serialize, Deserialize)]
struct CertEntryJson {
    row: usize,
    num: String,
    den: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct SubstitutionJson {
    var: String,
    expr: ConstraintJson,
}

#[derive(Debug, Serialize, Deserialize)]
struct OutcomeJson {
    system: SystemJson,
    /// Inequalities certificates refer to, oriented `expr (<|<=) 0`.
    base: Vec<ConstraintJson>,
    substitutions: Vec<SubstitutionJson>,
    certificates: Vec<Vec<CertEntryJson>>,
}

fn family_to_str(f: SampleFamily) -> String {
    match f {
        SampleFamily::Gated => "gated".into(),
        SampleFamily::Collapsed { side } => format!("collapsed-rx{side}"),
    }
}

fn family_from_str(s: &str) -> Result<SampleFamily, AlgebraError> {
    match s {
        "gated" => Ok(SampleFamily::Gated),
        "collapsed-rx1" => Ok(SampleFamily::Collapsed { side: 1 }),
        "collapsed-rx2" => Ok(SampleFamily::Collapsed { side: 2 }),
        other => Err(AlgebraError::Format(format!("unknown family {other:?}"))),
    }
}

fn expr_to_json(label: &str, expr: &LinearExpr, rel: &str, gate: bool) -> ConstraintJson {
    ConstraintJson {
        label: label.to_string(),
        relation: rel.to_string(),
        rates: expr
            .rates
            .iter()
            .map(|(v, c)| RateCoefJson {
                var: v.0.clone(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect(),
        infos: expr
            .infos
            .iter()
            .map(|(t, c)| {
                let (a, b, cc) = t.sets();
                InfoCoefJson {
                    a: a.iter().map(|v| v.name().to_string()).collect(),
                    b: b.iter().map(|v| v.name().to_string()).collect(),
                    c: cc.iter().map(|v| v.name().to_string()).collect(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                }
            })
            .collect(),
        constant: RatJson::encode(&expr.constant),
        gate,
    }
}

fn vars_from_names(names: &[String]) -> Result<Vec<Var>, AlgebraError> {
    names
        .iter()
        .map(|n| {
            Var::parse(n).ok_or_else(|| AlgebraError::Format(format!("unknown variable {n:?}")))
        })
        .collect()
}

fn expr_from_json(c: &ConstraintJson) -> Result<LinearExpr, AlgebraError> {
    let mut expr = LinearExpr::zero();
    for r in &c.rates {
        let coef = RatJson { num: r.num.clone(), den: r.den.clone() }.decode()?;
        expr.add_rate(RateVar::new(&r.var), coef);
    }
    for i in &c.infos {
        let coef = RatJson { num: i.num.clone(), den: i.den.clone() }.decode()?;
        let term = InfoTerm::new(
            vars_from_names(&i.a)?,
            vars_from_names(&i.b)?,
            vars_from_names(&i.c)?,
        )?;
        expr.add_info(term, coef);
    }
    expr.constant = c.constant.decode()?;
    Ok(expr)
}

fn constraint_from_json(c: &ConstraintJson) -> Result<Constraint, AlgebraError> {
    let rel = Relation::parse(&c.relation)
        .ok_or_else(|| AlgebraError::Format(format!("unknown relation {:?}", c.relation)))?;
    Ok(Constraint { label: c.label.clone(), expr: expr_from_json(c)?, rel })
}

fn system_to_struct(sys: &ConstraintSystem) -> SystemJson {
    SystemJson {
        name: sys.name.clone(),
        provenance: sys.provenance.clone(),
        free: sys.free.iter().map(|v| v.0.clone()).collect(),
        bound: sys.bound.iter().map(|v| v.0.clone()).collect(),
        family: family_to_str(sys.family),
        constraints: sys
            .constraints
            .iter()
            .map(|c| expr_to_json(&c.label, &c.expr, c.rel.as_str(), c.is_gate()))
            .collect(),
    }
}

fn system_from_struct(s: &SystemJson) -> Result<ConstraintSystem, AlgebraError> {
    Ok(ConstraintSystem {
        name: s.name.clone(),
        provenance: s.provenance.clone(),
        free: s.free.iter().map(|v| RateVar::new(v)).collect(),
        bound: s.bound.iter().map(|v| RateVar::new(v)).collect(),
        constraints: s
            .constraints
            .iter()
            .map(constraint_from_json)
            .collect::<Result<_, _>>()?,
        family: family_from_str(&s.family)?,
    })
}

pub fn system_to_json(sys: &ConstraintSystem) -> serde_json::Value {
    serde_json::to_value(system_to_struct(sys)).expect("system serialization cannot fail")
}

/// Accepts a full system object, a bare constraint array, or a `derive`
/// outcome wrapper (its embedded system is extracted).
pub fn system_from_json(value: &serde_json::Value) -> Result<ConstraintSystem, AlgebraError> {
    if let Some(arr) = value.as_array() {
        let constraints: Vec<ConstraintJson> = serde_json::from_value(
            serde_json::Value::Array(arr.clone()),
        )
        .map_err(|e| AlgebraError::Format(e.to_string()))?;
        let constraints: Vec<Constraint> = constraints
            .iter()
            .map(constraint_from_json)
            .collect::<Result<_, _>>()?;
        let free = vec![RateVar::new("R1"), RateVar::new("R2")];
        let mut bound: Vec<RateVar> = Vec::new();
        for c in &constraints {
            for v in c.expr.rates.keys() {
                if !free.contains(v) && !bound.contains(v) {
                    bound.push(v.clone());
                }
            }
        }
        bound.sort();
        return Ok(ConstraintSystem {
            name: "file".into(),
            provenance: "loaded from bare constraint list".into(),
            free,
            bound,
            constraints,
            family: SampleFamily::Gated,
        });
    }
    if let Some(inner) = value.get("system") {
        return system_from_json(inner);
    }
    let s: SystemJson =
        serde_json::from_value(value.clone()).map_err(|e| AlgebraError::Format(e.to_string()))?;
    system_from_struct(&s)
}

pub fn read_system(path: &Path) -> Result<ConstraintSystem, AlgebraError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AlgebraError::Format(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| AlgebraError::Format(e.to_string()))?;
    system_from_json(&value)
}

pub fn write_system(path: &Path, sys: &ConstraintSystem) -> Result<(), AlgebraError> {
    let text = serde_json::to_string_pretty(&system_to_json(sys))
        .expect("system serialization cannot fail");
    std::fs::write(path, text).map_err(|e| AlgebraError::Format(format!("{}: {e}", path.display())))
}

pub fn outcome_to_json(out: &FmOutcome) -> serde_json::Value {
    let base: Vec<ConstraintJson> = out
        .base
        .iter()
        .map(|BaseRow { label, expr, strict }| {
            expr_to_json(label, expr, if *strict { "<" } else { "<=" }, !expr.has_rates())
        })
        .collect();
    let substitutions: Vec<SubstitutionJson> = out
        .substitutions
        .iter()
        .map(|(v, e)| SubstitutionJson { var: v.0.clone(), expr: expr_to_json(&v.0, e, "=", false) })
        .collect();
    let certificates: Vec<Vec<CertEntryJson>> = out
        .certificates
        .iter()
        .map(|cert| {
            cert.iter()
                .map(|(row, m)| CertEntryJson {
                    row: *row,
                    num: m.numer().to_string(),
                    den: m.denom().to_string(),
                })
                .collect()
        })
        .collect();
    serde_json::to_value(OutcomeJson {
        system: system_to_struct(&out.system),
        base,
        substitutions,
        certificates,
    })
    .expect("outcome serialization cannot fail")
}
