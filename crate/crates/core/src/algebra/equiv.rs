//! Numeric region equivalence: two projected systems agree when their
//! instantiated regions match on a dense raster for every sampled joint.
//!
//! Symbolic comparison is deliberately avoided — differently written
//! systems can agree through chain-rule identities the symbolic layer does
//! not apply. Instead each sampled joint turns both systems into concrete
//! halfplane sets, and membership is compared at grid cell centers whose
//! unit-normalized boundary distance exceeds a small band (open/closed
//! boundary differences and float noise live inside the band).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::instantiate::{instantiate_cached, TermCache, GATE_TOL};
use super::{AlgebraError, ConstraintSystem, SampleFamily};
use crate::prob::sample::{random_collapsed_joint, random_gated_joint, SampleOpts};
use crate::prob::Joint;

#[derive(Debug, Clone)]
pub struct EquivOptions {
    /// Joints drawn with binary alphabets, then with ternary alphabets.
    pub binary_samples: usize,
    pub ternary_samples: usize,
    /// Raster resolution per axis.
    pub grid: usize,
    /// Unit-normalized no-compare band around either region's boundary.
    pub band: f64,
    pub seed: u64,
    /// Draws allowed per sample slot before giving up as inconclusive.
    pub retries: usize,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions {
            binary_samples: 100,
            ternary_samples: 10,
            grid: 400,
            band: 1e-6,
            seed: 0x5ec2ec7,
            retries: 50,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Disagreement {
    pub sample: usize,
    pub r1: f64,
    pub r2: f64,
    pub in_first: bool,
    pub in_second: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivReport {
    pub first: String,
    pub second: String,
    pub verdict: Verdict,
    pub samples: usize,
    pub grid: usize,
    pub band: f64,
    pub seed: u64,
    pub points_compared: u64,
    pub points_skipped_band: u64,
    pub disagreements: u64,
    pub example: Option<Disagreement>,
    /// Set when the verdict is inconclusive.
    pub reason: Option<String>,
}

/// Outcome for one sampled joint.
struct SampleOutcome {
    compared: u64,
    skipped: u64,
    disagreements: u64,
    example: Option<Disagreement>,
    failure: Option<String>,
}

pub fn equiv_check(
    a: &ConstraintSystem,
    b: &ConstraintSystem,
    opts: &EquivOptions,
) -> Result<EquivReport, AlgebraError> {
    let family = match (a.family, b.family) {
        (SampleFamily::Gated, f) | (f, SampleFamily::Gated) => f,
        (SampleFamily::Collapsed { side: sa }, SampleFamily::Collapsed { side: sb }) => {
            if sa == sb {
                a.family
            } else {
                return Ok(inconclusive(
                    a,
                    b,
                    opts,
                    "systems quantify over incompatible collapsed families".into(),
                ));
            }
        }
    };
    let total = opts.binary_samples + opts.ternary_samples;

    let outcomes: Vec<SampleOutcome> = (0..total)
        .into_par_iter()
        .map(|i| run_sample(a, b, opts, family, i))
        .collect();

    let mut report = EquivReport {
        first: a.name.clone(),
        second: b.name.clone(),
        verdict: Verdict::Pass,
        samples: total,
        grid: opts.grid,
        band: opts.band,
        seed: opts.seed,
        points_compared: 0,
        points_skipped_band: 0,
        disagreements: 0,
        example: None,
        reason: None,
    };
    for o in outcomes {
        report.points_compared += o.compared;
        report.points_skipped_band += o.skipped;
        report.disagreements += o.disagreements;
        if report.example.is_none() {
            report.example = o.example;
        }
        if report.reason.is_none() {
            report.reason = o.failure;
        }
    }
    report.verdict = if report.reason.is_some() {
        Verdict::Inconclusive
    } else if report.disagreements > 0 {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    Ok(report)
}

fn inconclusive(
    a: &ConstraintSystem,
    b: &ConstraintSystem,
    opts: &EquivOptions,
    reason: String,
) -> EquivReport {
    EquivReport {
        first: a.name.clone(),
        second: b.name.clone(),
        verdict: Verdict::Inconclusive,
        samples: 0,
        grid: opts.grid,
        band: opts.band,
        seed: opts.seed,
        points_compared: 0,
        points_skipped_band: 0,
        disagreements: 0,
        example: None,
        reason: Some(reason),
    }
}

fn run_sample(
    a: &ConstraintSystem,
    b: &ConstraintSystem,
    opts: &EquivOptions,
    family: SampleFamily,
    index: usize,
) -> SampleOutcome {
    let base = if index < opts.binary_samples { 2 } else { 3 };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index as u64 + 1);

    // Joints must satisfy the union of both systems' gates (closure
    // semantics), so the regions being compared are both meaningful.
    for _attempt in 0..opts.retries {
        let drawn = draw(&mut rng, family, base);
        let Ok(joint) = drawn else { continue };
        let mut cache = TermCache::new(&joint);
        let (ia, ib) = match (instantiate_cached(a, &mut cache), instantiate_cached(b, &mut cache))
        {
            (Ok(x), Ok(y)) => (x, y),
            (Err(e), _) | (_, Err(e)) => return fail_outcome(format!("instantiation: {e}")),
        };
        if !ia.gates_hold(GATE_TOL) || !ib.gates_hold(GATE_TOL) {
            continue;
        }
        return raster_compare(&ia, &ib, opts, index);
    }
    fail_outcome(format!(
        "sample {index}: no joint passing both systems' gates within {} draws",
        opts.retries
    ))
}

fn draw(rng: &mut ChaCha8Rng, family: SampleFamily, base: usize) -> Result<Joint, crate::prob::ProbError> {
    match family {
        SampleFamily::Gated => random_gated_joint(rng, &SampleOpts::base(base)),
        SampleFamily::Collapsed { side } => Ok(random_collapsed_joint(rng, base, side)),
    }
}

fn fail_outcome(reason: String) -> SampleOutcome {
    SampleOutcome {
        compared: 0,
        skipped: 0,
        disagreements: 0,
        example: None,
        failure: Some(reason),
    }
}

fn raster_compare(
    ia: &super::instantiate::Instantiated,
    ib: &super::instantiate::Instantiated,
    opts: &EquivOptions,
    index: usize,
) -> SampleOutcome {
    let rmax = ia.rmax.max(ib.rmax);
    let step = rmax / opts.grid as f64;
    let mut out = SampleOutcome {
        compared: 0,
        skipped: 0,
        disagreements: 0,
        example: None,
        failure: None,
    };
    for iy in 0..opts.grid {
        let r2 = (iy as f64 + 0.5) * step;
        for ix in 0..opts.grid {
            let r1 = (ix as f64 + 0.5) * step;
            let ma = ia.margin(r1, r2);
            let mb = ib.margin(r1, r2);
            // Cells near either boundary are not classified.
            if ma.abs() < opts.band || mb.abs() < opts.band {
                out.skipped += 1;
                continue;
            }
            out.compared += 1;
            let in_a = ma < 0.0;
            let in_b = mb < 0.0;
            if in_a != in_b {
                out.disagreements += 1;
                if out.example.is_none() {
                    out.example = Some(Disagreement {
                        sample: index,
                        r1,
                        r2,
                        in_first: in_a,
                        in_second: in_b,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_constraint, RateVar};

    fn sys(name: &str, rows: &[(&str, &str)], family: SampleFamily) -> ConstraintSystem {
        ConstraintSystem {
            name: name.into(),
            provenance: "unit test".into(),
            free: vec![RateVar::new("R1"), RateVar::new("R2")],
            bound: vec![],
            constraints: rows.iter().map(|(l, t)| parse_constraint(l, t).unwrap()).collect(),
            family,
        }
    }

    fn quick() -> EquivOptions {
        EquivOptions {
            binary_samples: 3,
            ternary_samples: 1,
            grid: 96,
            ..EquivOptions::default()
        }
    }

    #[test]
    fn identical_systems_pass() {
        let a = sys(
            "a",
            &[
                ("cap", "R1 < I(U;Y1) + I(V1;Y1|V)"),
                ("gap", "R1 - R2 < I(V,V1;Y1|U)"),
                ("nn1", "R1 >= 0"),
                ("nn2", "R2 >= 0"),
            ],
            SampleFamily::Gated,
        );
        let report = equiv_check(&a, &a.clone(), &quick()).unwrap();
        assert!(matches!(report.verdict, Verdict::Pass), "{report:?}");
        assert_eq!(report.disagreements, 0);
        assert!(report.points_compared > 0);
    }

    #[test]
    fn chain_rule_rewrites_pass_numerically() {
        // I(U,V,V1;Y1) vs I(U;Y1) + I(V,V1;Y1|U): different syntax, equal
        // as numbers on every joint.
        let a = sys(
            "whole",
            &[("cap", "R1 + R2 < I(U,V,V1;Y1)"), ("nn1", "R1 >= 0"), ("nn2", "R2 >= 0")],
            SampleFamily::Gated,
        );
        let b = sys(
            "split",
            &[
                ("cap", "R1 + R2 < I(U;Y1) + I(V,V1;Y1|U)"),
                ("nn1", "R1 >= 0"),
                ("nn2", "R2 >= 0"),
            ],
            SampleFamily::Gated,
        );
        let report = equiv_check(&a, &b, &quick()).unwrap();
        assert!(matches!(report.verdict, Verdict::Pass), "{report:?}");
    }

    #[test]
    fn different_regions_fail_with_example() {
        let a = sys(
            "narrow",
            &[("cap", "R1 < I(U;Y1)"), ("nn1", "R1 >= 0"), ("nn2", "R2 >= 0"), ("cap2", "R2 < 1")],
            SampleFamily::Gated,
        );
        let b = sys(
            "wide",
            &[
                ("cap", "R1 < I(U;Y1) + 1/2"),
                ("nn1", "R1 >= 0"),
                ("nn2", "R2 >= 0"),
                ("cap2", "R2 < 1"),
            ],
            SampleFamily::Gated,
        );
        let report = equiv_check(&a, &b, &quick()).unwrap();
        assert!(matches!(report.verdict, Verdict::Fail));
        let ex = report.example.unwrap();
        assert!(!ex.in_first && ex.in_second);
    }

    #[test]
    fn incompatible_families_are_inconclusive() {
        let a = sys("c1", &[("nn1", "R1 >= 0")], SampleFamily::Collapsed { side: 1 });
        let b = sys("c2", &[("nn1", "R1 >= 0")], SampleFamily::Collapsed { side: 2 });
        let report = equiv_check(&a, &b, &quick()).unwrap();
        assert!(matches!(report.verdict, Verdict::Inconclusive));
    }

    #[test]
    fn raster_is_deterministic() {
        let a = sys(
            "a",
            &[("cap", "R1 + R2 < I(U;Y1) + I(U;Y2)"), ("nn1", "R1 >= 0"), ("nn2", "R2 >= 0")],
            SampleFamily::Gated,
        );
        let r1 = equiv_check(&a, &a.clone(), &quick()).unwrap();
        let r2 = equiv_check(&a, &a.clone(), &quick()).unwrap();
        assert_eq!(r1.points_compared, r2.points_compared);
        assert_eq!(r1.points_skipped_band, r2.points_skipped_band);
    }
}
