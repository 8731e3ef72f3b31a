//! Recovery of the off-axis landmarks through the single-satellite systems,
//! and the time-sharing argument that pushes the interior component's floor
//! to the axes.
//!
//! Landmark recovery evaluates the grouped-substitution system on the
//! original chain and the reduced system on the collapsed chain; the two
//! must agree row-for-row, and both must strictly contain the backed-off
//! landmark. The boundary approach mixes the original chain with its
//! collapsed branch: the floor of the mixture scales with the mixing weight,
//! so the interior component reaches points an epsilon away from the axes.

use std::collections::BTreeMap;

use serde::Serialize;

use super::special::special_terms;
use crate::algebra::instantiate::{instantiate, Instantiated, GATE_TOL};
use crate::algebra::presets::preset;
use crate::algebra::AlgebraError;
use crate::prob::construct::{substitute_aux, timeshare_mix, CollapseMode, MIX_TERMS};
use crate::prob::Joint;

/// Default back-off from a landmark; shrunk further when the landmark sits
/// closer to the origin than twice this.
pub const DEFAULT_EPS: f64 = 1e-4;

/// Default distance-to-axis for the boundary approach.
pub const APPROACH_EPS: f64 = 1e-3;

/// Default mixing-weight ladder, largest first.
pub const GAMMA_LADDER: [f64; 4] = [0.5, 0.1, 0.02, 0.004];

/// Strict membership: strict rows need negative residual, closed rows get
/// tolerance slack; failed gates empty the region.
fn strict_member(inst: &Instantiated, r1: f64, r2: f64) -> bool {
    inst.gates_hold(GATE_TOL)
        && inst.halfplanes.iter().all(|h| {
            let r = h.residual(r1, r2);
            if h.strict {
                r < 0.0
            } else {
                r <= GATE_TOL
            }
        })
}

/// Halfplane constants keyed by rate signature `(a, b)`, for row-for-row
/// comparison of two instantiations. Coefficients in these systems are
/// exactly 0 or +/-1, so rounding to integers is lossless.
fn signature_constants(inst: &Instantiated) -> BTreeMap<(i64, i64), Vec<(f64, bool)>> {
    let mut m: BTreeMap<(i64, i64), Vec<(f64, bool)>> = BTreeMap::new();
    for h in &inst.halfplanes {
        m.entry((h.a.round() as i64, h.b.round() as i64))
            .or_default()
            .push((h.c, h.strict));
    }
    for v in m.values_mut() {
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    }
    m
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoverReport {
    /// Landmark name: "s2" (side 2) or "s4" (side 1).
    pub label: String,
    /// Which receiver's satellite is pinned to the cloud.
    pub side: usize,
    pub point: (f64, f64),
    pub epsilon: f64,
    /// The informative receiver's advantage locating the landmark.
    pub advantage: f64,
    /// Strict membership in the grouped-substitution system on the
    /// original chain.
    pub member_grouped: bool,
    /// Strict membership in the reduced system on the collapsed chain.
    pub member_collapsed: bool,
    /// Instantiated constants agree row-for-row across the two systems.
    pub constants_match: bool,
    pub max_constant_gap: f64,
}

impl RecoverReport {
    pub fn ok(&self) -> bool {
        self.member_grouped && self.member_collapsed && self.constants_match
    }
}

/// Recovers the off-axis landmark owned by `side` (2 recovers `s2`, 1
/// recovers `s4`) by backing off `eps_hint` from it, and cross-checks the
/// grouped-substitution system against the reduced system on the collapsed
/// chain.
pub fn recover_axis_point(
    j: &Joint,
    side: usize,
    eps_hint: f64,
) -> Result<RecoverReport, AlgebraError> {
    let (label, mode) = match side {
        1 => ("s4", CollapseMode::Collapse1),
        2 => ("s2", CollapseMode::Collapse2),
        _ => return Err(AlgebraError::Format(format!("side must be 1 or 2, got {side}"))),
    };
    let t = special_terms(j)?;
    let advantage = if side == 2 { t.b } else { t.d };
    if advantage <= 0.0 {
        return Err(AlgebraError::Format(format!(
            "receiver advantage {advantage} is not positive; the landmark degenerates"
        )));
    }
    let epsilon = eps_hint.min(advantage / 2.0);
    let point = if side == 2 { (advantage - epsilon, 0.0) } else { (0.0, advantage - epsilon) };

    let grouped = preset(&format!("region-cloud-rx{side}-sub")).expect("preset id");
    let reduced = preset(&format!("region-cloud-rx{side}")).expect("preset id");
    let collapsed = substitute_aux(j, mode)?;
    let inst_grouped = instantiate(&grouped, j)?;
    let inst_reduced = instantiate(&reduced, &collapsed)?;

    let sig_g = signature_constants(&inst_grouped);
    let sig_r = signature_constants(&inst_reduced);
    let mut constants_match = sig_g.len() == sig_r.len();
    let mut max_constant_gap: f64 = 0.0;
    if constants_match {
        'outer: for (key, rows_g) in &sig_g {
            match sig_r.get(key) {
                Some(rows_r) if rows_r.len() == rows_g.len() => {
                    for ((cg, sg), (cr, sr)) in rows_g.iter().zip(rows_r) {
                        if sg != sr {
                            constants_match = false;
                            break 'outer;
                        }
                        max_constant_gap = max_constant_gap.max((cg - cr).abs());
                    }
                }
                _ => {
                    constants_match = false;
                    break 'outer;
                }
            }
        }
    }
    if constants_match && max_constant_gap > 1e-9 {
        constants_match = false;
    }

    Ok(RecoverReport {
        label: label.into(),
        side,
        point,
        epsilon,
        advantage,
        member_grouped: strict_member(&inst_grouped, point.0, point.1),
        member_collapsed: strict_member(&inst_reduced, point.0, point.1),
        constants_match,
        max_constant_gap,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ApproachStep {
    pub gamma: f64,
    /// Strict membership of the target in the interior component on the
    /// mixed chain.
    pub member: bool,
    /// The mixture's shared floor; scales linearly with gamma.
    pub floor: f64,
    /// Largest deviation of the nine tracked terms from exact linear
    /// combination across the two branches.
    pub linearity_dev: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ApproachReport {
    pub target_label: String,
    /// Which satellite the mixing branch pins to the cloud.
    pub branch_side: usize,
    pub target: (f64, f64),
    pub epsilon: f64,
    pub steps: Vec<ApproachStep>,
    /// True when some ladder weight puts the target strictly inside.
    pub achieved: bool,
}

/// Time-sharing approach to the axis landmarks: mixes `j` with a collapsed
/// branch at each ladder weight and tests three targets an `eps` away from
/// the boundary of the closure:
/// near the origin, near the `R1`-axis landmark, near the `R2`-axis one.
pub fn boundary_approach(
    j: &Joint,
    eps: f64,
    ladder: &[f64],
) -> Result<Vec<ApproachReport>, AlgebraError> {
    let t = special_terms(j)?;
    let region = preset("region-simplified2").expect("preset id");
    let branch2 = substitute_aux(j, CollapseMode::Collapse2)?;
    let branch1 = substitute_aux(j, CollapseMode::Collapse1)?;

    let targets: [(&str, usize, &Joint, (f64, f64)); 3] = [
        ("near-origin", 2, &branch2, (eps, eps)),
        ("r1-axis", 2, &branch2, (t.b - eps, eps)),
        ("r2-axis", 1, &branch1, (eps, t.d - eps)),
    ];

    let mut reports = Vec::with_capacity(targets.len());
    for (label, side, branch, target) in targets {
        let mut steps = Vec::with_capacity(ladder.len());
        for &gamma in ladder {
            let mix = timeshare_mix(j, branch, gamma)?;
            let inst = instantiate(&region, &mix)?;
            let mut linearity_dev: f64 = 0.0;
            for term in MIX_TERMS {
                let want = gamma * term.eval(j) + (1.0 - gamma) * term.eval(branch);
                linearity_dev = linearity_dev.max((term.eval(&mix) - want).abs());
            }
            steps.push(ApproachStep {
                gamma,
                member: strict_member(&inst, target.0, target.1),
                floor: MIX_TERMS[0].eval(&mix),
                linearity_dev,
            });
        }
        let achieved = steps.iter().any(|s| s.member);
        reports.push(ApproachReport {
            target_label: label.into(),
            branch_side: side,
            target,
            epsilon: eps,
            steps,
            achieved,
        });
    }
    Ok(reports)
}
