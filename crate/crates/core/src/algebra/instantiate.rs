//! Numeric instantiation: evaluate a projected system's information terms
//! on a concrete joint, producing halfplanes over `(R1, R2)` plus gate
//! checks for the subject-to rows.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use super::{AlgebraError, ConstraintSystem, InfoTerm, Relation};
use crate::prob::Joint;

/// Closure margin for gate evaluation: a gate written strictly still counts
/// as holding when its slack is within this tolerance of zero, so that
/// joints sitting exactly on a gate boundary (the only way some gates can
/// hold at all) are admitted.
pub const GATE_TOL: f64 = 1e-9;

/// One halfplane `a*R1 + b*R2 <= c` (or `< c` when `strict`).
#[derive(Debug, Clone)]
pub struct Halfplane {
    pub label: String,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub strict: bool,
}

impl Halfplane {
    /// Signed distance from `(r1, r2)` to the boundary, positive outside.
    /// Unit-normalized so distances are comparable across constraints.
    pub fn residual(&self, r1: f64, r2: f64) -> f64 {
        let norm = self.a.hypot(self.b);
        (self.a * r1 + self.b * r2 - self.c) / norm
    }
}

/// One evaluated subject-to condition, oriented as `value <= 0` holds.
#[derive(Debug, Clone)]
pub struct GateCheck {
    pub label: String,
    pub value: f64,
    pub strict: bool,
}

impl GateCheck {
    /// Closure semantics: within `tol` of the boundary counts as holding.
    pub fn holds(&self, tol: f64) -> bool {
        self.value <= tol
    }
}

/// A constraint system evaluated on one joint.
#[derive(Debug, Clone)]
pub struct Instantiated {
    pub name: String,
    pub halfplanes: Vec<Halfplane>,
    pub gates: Vec<GateCheck>,
    /// Box radius covering the whole region: 1 + the largest |c|.
    pub rmax: f64,
}

impl Instantiated {
    pub fn gates_hold(&self, tol: f64) -> bool {
        self.gates.iter().all(|g| g.holds(tol))
    }

    /// Membership of the closed region described by the halfplanes (gates
    /// not included): the largest unit-normalized residual must be <= 0.
    pub fn contains(&self, r1: f64, r2: f64) -> bool {
        self.margin(r1, r2) <= 0.0
    }

    /// Largest unit-normalized halfplane residual at the point; positive
    /// means outside. Infinity when some gate fails under closure
    /// semantics (the region is empty).
    pub fn margin(&self, r1: f64, r2: f64) -> f64 {
        if !self.gates_hold(GATE_TOL) {
            return f64::INFINITY;
        }
        let mut worst = f64::NEG_INFINITY;
        for h in &self.halfplanes {
            let r = h.residual(r1, r2);
            if r > worst {
                worst = r;
            }
        }
        worst
    }
}

/// Memoizes information-term values for one joint so several systems can
/// be instantiated against it cheaply.
pub struct TermCache<'a> {
    joint: &'a Joint,
    values: BTreeMap<InfoTerm, f64>,
}

impl<'a> TermCache<'a> {
    pub fn new(joint: &'a Joint) -> Self {
        TermCache { joint, values: BTreeMap::new() }
    }

    pub fn eval(&mut self, term: &InfoTerm) -> Result<f64, AlgebraError> {
        if let Some(v) = self.values.get(term) {
            return Ok(*v);
        }
        let v = term.eval(self.joint)?;
        self.values.insert(term.clone(), v);
        Ok(v)
    }
}

pub fn instantiate(sys: &ConstraintSystem, joint: &Joint) -> Result<Instantiated, AlgebraError> {
    instantiate_cached(sys, &mut TermCache::new(joint))
}

/// Instantiates against a shared cache. Only fully projected systems are
/// accepted: every rate variable must be one of the two free coordinates.
pub fn instantiate_cached(
    sys: &ConstraintSystem,
    cache: &mut TermCache<'_>,
) -> Result<Instantiated, AlgebraError> {
    let (r1, r2) = match &sys.free[..] {
        [a, b] => (a.clone(), b.clone()),
        _ => {
            return Err(AlgebraError::NotProjected(format!(
                "expected two free rate variables, found {}",
                sys.free.len()
            )))
        }
    };
    let mut halfplanes = Vec::new();
    let mut gates = Vec::new();
    for c in &sys.constraints {
        for (v, _) in &c.expr.rates {
            if *v != r1 && *v != r2 {
                return Err(AlgebraError::NotProjected(v.0.clone()));
            }
        }
        // Evaluate the non-rate part once: info terms plus the constant.
        let mut offset = c
            .expr
            .constant
            .to_f64()
            .ok_or_else(|| AlgebraError::Format("constant out of f64 range".into()))?;
        for (t, coef) in &c.expr.infos {
            let coef = coef
                .to_f64()
                .ok_or_else(|| AlgebraError::Format("coefficient out of f64 range".into()))?;
            offset += coef * cache.eval(t)?;
        }
        let a = c.expr.coef_of(&r1).to_f64().unwrap_or(0.0);
        let b = c.expr.coef_of(&r2).to_f64().unwrap_or(0.0);

        // Orient as `lhs (<|<=) 0`; equalities become a closed pair.
        let rows: Vec<(f64, f64, f64, bool)> = match c.rel {
            Relation::Lt => vec![(a, b, offset, true)],
            Relation::Le => vec![(a, b, offset, false)],
            Relation::Gt => vec![(-a, -b, -offset, true)],
            Relation::Ge => vec![(-a, -b, -offset, false)],
            Relation::Eq => vec![(a, b, offset, false), (-a, -b, -offset, false)],
        };
        for (a, b, off, strict) in rows {
            if a == 0.0 && b == 0.0 {
                gates.push(GateCheck { label: c.label.clone(), value: off, strict });
            } else {
                halfplanes.push(Halfplane { label: c.label.clone(), a, b, c: -off, strict });
            }
        }
    }
    let rmax = 1.0
        + halfplanes
            .iter()
            .map(|h| h.c.abs())
            .fold(0.0, f64::max);
    Ok(Instantiated { name: sys.name.clone(), halfplanes, gates, rmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::presets::preset;
    use crate::algebra::{parse_constraint, ConstraintSystem, RateVar, SampleFamily};
    use crate::prob::sample::{random_gated_joint, seeded, SampleOpts};

    fn tiny_system(rows: &[(&str, &str)]) -> ConstraintSystem {
        ConstraintSystem {
            name: "tiny".into(),
            provenance: "unit test".into(),
            free: vec![RateVar::new("R1"), RateVar::new("R2")],
            bound: vec![],
            constraints: rows.iter().map(|(l, t)| parse_constraint(l, t).unwrap()).collect(),
            family: SampleFamily::Gated,
        }
    }

    #[test]
    fn halfplane_orientation_and_membership() {
        let sys = tiny_system(&[
            ("cap", "R1 + 2 R2 <= 4"),
            ("floor", "R1 >= 1"),
            ("nn2", "R2 >= 0"),
        ]);
        let j = random_gated_joint(&mut seeded(5), &SampleOpts::base(2)).unwrap();
        let inst = instantiate(&sys, &j).unwrap();
        assert_eq!(inst.halfplanes.len(), 3);
        assert_eq!(inst.gates.len(), 0);
        assert!(inst.contains(1.0, 1.5));
        assert!(!inst.contains(0.5, 0.5)); // violates the floor
        assert!(!inst.contains(3.0, 1.0)); // violates the cap
        assert!((inst.rmax - 5.0).abs() < 1e-12); // 1 + |c|max = 1 + 4
    }

    #[test]
    fn equality_becomes_closed_pair() {
        let sys = tiny_system(&[("diag", "R1 = R2")]);
        let j = random_gated_joint(&mut seeded(6), &SampleOpts::base(2)).unwrap();
        let inst = instantiate(&sys, &j).unwrap();
        assert_eq!(inst.halfplanes.len(), 2);
        assert!(inst.contains(0.7, 0.7));
        assert!(!inst.contains(0.7, 0.8));
    }

    #[test]
    fn region_preset_gates_pass_on_gated_samples() {
        let sys = preset("region-original").unwrap();
        let mut rng = seeded(7);
        for _ in 0..5 {
            let j = random_gated_joint(&mut rng, &SampleOpts::base(2)).unwrap();
            let inst = instantiate(&sys, &j).unwrap();
            assert_eq!(inst.gates.len(), 5);
            assert!(inst.gates_hold(GATE_TOL), "{:?}", inst.gates);
            // The region has positive area: caps exceed floors.
            assert!(inst.contains(1e-4, 1e-4), "near-origin point missing");
        }
    }

    #[test]
    fn unprojected_system_is_rejected() {
        let mut sys = tiny_system(&[("bad", "R1 + Rq <= 1")]);
        sys.bound.push(RateVar::new("Rq"));
        let j = random_gated_joint(&mut seeded(8), &SampleOpts::base(2)).unwrap();
        assert!(matches!(
            instantiate(&sys, &j),
            Err(AlgebraError::NotProjected(_))
        ));
    }
}
