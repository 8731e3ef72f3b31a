//! End-to-end verification battery.
//!
//! Eight checks exercise the crate's main claims against independent
//! oracles: the six scheme projections land on their closed-form regions,
//! every elimination certificate reproduces its row, the simplified region
//! sits inside the original one with the expected corner structure, the
//! collapsed branches recover the axis landmarks and span the original
//! region, the time-sharing mixtures are exactly linear in the tracked
//! terms, the leakage computation agrees with full enumeration, finite
//! blocklengths show the expected error/leakage trends, and the polygon
//! builder matches raster membership.
//!
//! Each check pins its own sample counts and tolerances, runs from a seed,
//! and returns a [`CheckReport`] with a machine-readable detail payload;
//! [`run_all`] bundles them in a fixed order for the CLI `suite`
//! subcommand and the workspace acceptance tests.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::equiv::{equiv_check, EquivOptions, Verdict};
use crate::algebra::fm::{project_to_free, verify_certificates, FmOptions};
use crate::algebra::instantiate::{instantiate, Halfplane, Instantiated, GATE_TOL};
use crate::algebra::presets::{fm_pairs, preset, PRESET_IDS};
use crate::geometry::recover::{
    boundary_approach, recover_axis_point, APPROACH_EPS, DEFAULT_EPS, GAMMA_LADDER,
};
use crate::geometry::special::{classify_cut, special_terms};
use crate::geometry::{convex_contains, hull_union, polygon};
use crate::prob::construct::{substitute_aux, CollapseMode};
use crate::prob::sample::{copy_satellite_joint, random_gated_joint, random_joint, seeded, SampleOpts};
use crate::prob::{entropy_bits, Alphabet, Factor, Joint, Var};
use crate::sim::codebook::{generate_codebook, Codebook};
use crate::sim::coding::select_codewords;
use crate::sim::experiment::run_experiment;
use crate::sim::leakage::exact_leakage;
use crate::sim::{Caps, LayerSizes, SchemeConfig, Tables, Variant};

/// Agreement tolerance for exact quantities (certificates aside, which are
/// rational and must match exactly).
pub const EXACT_TOL: f64 = 1e-12;

/// Slack for closure containment and linearity identities.
pub const LINEAR_TOL: f64 = 1e-9;

/// Slack for hull coverage of region vertices.
pub const HULL_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Divides the heavier sample counts; 1 runs the full battery.
    pub shrink: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0x0acc_e97, shrink: 1 }
    }
}

impl SuiteOptions {
    fn count(&self, full: usize) -> usize {
        (full / self.shrink.max(1)).max(1)
    }
}

/// Verdict and evidence for one check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub verdict: Verdict,
    /// Check-specific measurements backing the verdict.
    pub detail: Value,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub shrink: usize,
    pub checks: Vec<CheckReport>,
    pub verdict: Verdict,
}

/// Check names in battery order, as accepted by [`run_check`].
pub const CHECK_NAMES: [&str; 8] = [
    "derivation-equivalences",
    "certificate-soundness",
    "containment-and-cuts",
    "landmark-recovery",
    "mixture-linearity",
    "leakage-exactness",
    "finite-length-trend",
    "geometry-oracle",
];

/// Runs the full battery in declaration order.
pub fn run_all(opts: &SuiteOptions) -> SuiteReport {
    let checks: Vec<CheckReport> = CHECK_NAMES
        .iter()
        .map(|name| run_check(name, opts).expect("battery names are valid"))
        .collect();
    let verdict = combine(checks.iter().map(|c| c.verdict));
    SuiteReport { seed: opts.seed, shrink: opts.shrink, checks, verdict }
}

/// Runs a single check by name; `None` for unknown names.
pub fn run_check(name: &str, opts: &SuiteOptions) -> Option<CheckReport> {
    match name {
        "derivation-equivalences" => Some(check_derivations(opts)),
        "certificate-soundness" => Some(check_certificates(opts)),
        "containment-and-cuts" => Some(check_containment(opts)),
        "landmark-recovery" => Some(check_landmarks(opts)),
        "mixture-linearity" => Some(check_mixtures(opts)),
        "leakage-exactness" => Some(check_leakage_exactness(opts)),
        "finite-length-trend" => Some(check_trend(opts)),
        "geometry-oracle" => Some(check_geometry(opts)),
        _ => None,
    }
}

fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::Pass;
    for v in verdicts {
        match v {
            Verdict::Fail => return Verdict::Fail,
            Verdict::Inconclusive => out = Verdict::Inconclusive,
            Verdict::Pass => {}
        }
    }
    out
}

fn fail(name: &'static str, error: String) -> CheckReport {
    CheckReport { name, verdict: Verdict::Fail, detail: json!({ "error": error }) }
}

fn verdict_of(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Per-task RNG stream: one tag per check, one stream per work item.
fn stream(seed: u64, tag: u64, index: usize) -> ChaCha8Rng {
    let mut rng = seeded(seed);
    rng.set_stream((tag << 40) | index as u64);
    rng
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Every scheme preset, eliminated down to the plane, must describe the
/// same set as its closed-form region preset: zero raster disagreements
/// off the boundary band on every sampled joint.
fn check_derivations(opts: &SuiteOptions) -> CheckReport {
    const NAME: &str = "derivation-equivalences";
    let eq = EquivOptions {
        binary_samples: opts.count(100),
        ternary_samples: opts.count(10),
        grid: 400,
        band: 1e-6,
        seed: opts.seed,
        retries: 50,
    };
    let fm = FmOptions::from_env();
    let mut pairs = Vec::new();
    let mut verdicts = Vec::new();
    for (scheme, region, _) in fm_pairs() {
        let sys = preset(scheme).expect("preset id");
        let target = preset(region).expect("preset id");
        match project_to_free(&sys, &fm).and_then(|out| equiv_check(&out.system, &target, &eq)) {
            Ok(rep) => {
                verdicts.push(rep.verdict);
                pairs.push(serde_json::to_value(&rep).expect("report serializes"));
            }
            Err(e) => {
                verdicts.push(Verdict::Fail);
                pairs.push(json!({ "first": scheme, "second": region, "error": e.to_string() }));
            }
        }
    }
    CheckReport {
        name: NAME,
        verdict: combine(verdicts),
        detail: json!({
            "samples_per_pair": eq.binary_samples + eq.ternary_samples,
            "grid": eq.grid,
            "band": eq.band,
            "pairs": pairs,
        }),
    }
}

/// Every constraint emitted by an elimination must be reproduced exactly
/// (in rational arithmetic) by its recorded nonnegative combination of
/// base rows, for every preset system.
fn check_certificates(opts: &SuiteOptions) -> CheckReport {
    const NAME: &str = "certificate-soundness";
    let _ = opts;
    let fm = FmOptions::from_env();
    let mut rows = Vec::new();
    let mut ok = true;
    for id in PRESET_IDS {
        let sys = preset(id).expect("preset id");
        let bound = sys.bound.len();
        match project_to_free(&sys, &fm).and_then(|out| verify_certificates(&out).map(|_| out)) {
            Ok(out) => rows.push(json!({
                "preset": id,
                "eliminated": bound,
                "output_rows": out.system.constraints.len(),
                "certificates": out.certificates.len(),
                "ok": true,
            })),
            Err(e) => {
                ok = false;
                rows.push(json!({ "preset": id, "ok": false, "error": e.to_string() }));
            }
        }
    }
    CheckReport { name: NAME, verdict: verdict_of(ok), detail: json!({ "presets": rows }) }
}

/// On every gated joint the simplified region must sit inside the original
/// one (closure containment through its polygon vertices), the corner-cut
/// classification must come back for every joint, and the shared floor can
/// exceed neither axis cap.
fn check_containment(opts: &SuiteOptions) -> CheckReport {
    const NAME: &str = "containment-and-cuts";
    let joints = opts.count(100);
    let outer_sys = preset("region-original").expect("preset id");
    let inner_sys = preset("region-simplified2").expect("preset id");

    let per_joint: Result<Vec<_>, String> = (0..joints)
        .into_par_iter()
        .map(|i| {
            // Every tenth joint is ternary; the rest are binary.
            let base = if (i + 1) % 10 == 0 { 3 } else { 2 };
            let mut rng = stream(opts.seed, 3, i);
            let j = random_gated_joint(&mut rng, &SampleOpts::base(base))
                .map_err(|e| format!("joint {i}: {e}"))?;
            let outer = instantiate(&outer_sys, &j).map_err(|e| format!("joint {i}: {e}"))?;
            let inner = instantiate(&inner_sys, &j).map_err(|e| format!("joint {i}: {e}"))?;
            let ip = polygon(&inner);
            if ip.is_empty() {
                return Err(format!("joint {i}: inner region came back empty"));
            }
            if !outer.gates_hold(GATE_TOL) {
                return Err(format!("joint {i}: outer gates failed on a gated sample"));
            }
            let worst = ip
                .vertices
                .iter()
                .map(|v| outer.margin(v.0, v.1))
                .fold(f64::NEG_INFINITY, f64::max);
            let t = special_terms(&j).map_err(|e| format!("joint {i}: {e}"))?;
            let case = classify_cut(&t).as_str();
            Ok((worst, case, t.e - t.a, t.e - t.c))
        })
        .collect();

    let per_joint = match per_joint {
        Ok(v) => v,
        Err(e) => return fail(NAME, e),
    };

    let worst_containment = per_joint.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let mut cut_cases: BTreeMap<&'static str, usize> = BTreeMap::new();
    for r in &per_joint {
        *cut_cases.entry(r.1).or_default() += 1;
    }
    let max_e_minus_a = per_joint.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let max_e_minus_c = per_joint.iter().map(|r| r.3).fold(f64::NEG_INFINITY, f64::max);
    let ok = worst_containment <= LINEAR_TOL
        && max_e_minus_a <= LINEAR_TOL
        && max_e_minus_c <= LINEAR_TOL;

    CheckReport {
        name: NAME,
        verdict: verdict_of(ok),
        detail: json!({
            "joints": joints,
            "tolerance": LINEAR_TOL,
            "worst_containment_margin": worst_containment,
            "cut_cases": cut_cases,
            "max_e_minus_a": max_e_minus_a,
            "max_e_minus_c": max_e_minus_c,
        }),
    }
}

/// Both axis landmarks must be recovered through the collapsed branches on
/// every gated joint, and the hull of the simplified region with the two
/// collapsed-branch regions must cover every vertex of the original one.
fn check_landmarks(opts: &SuiteOptions) -> CheckReport {
    const NAME: &str = "landmark-recovery";
    let joints = opts.count(100);
    let original = preset("region-original").expect("preset id");
    let simplified = preset("region-simplified2").expect("preset id");
    let cloud1 = preset("region-cloud-rx1").expect("preset id");
    let cloud2 = preset("region-cloud-rx2").expect("preset id");

    let per_joint: Result<Vec<_>, String> = (0..joints)
        .into_par_iter()
        .map(|i| {
            let base = if (i + 1) % 10 == 0 { 3 } else { 2 };
            let mut rng = stream(opts.seed, 4, i);
            let j = random_gated_joint(&mut rng, &SampleOpts::base(base))
                .map_err(|e| format!("joint {i}: {e}"))?;

            let mut recovered = true;
            for side in [1, 2] {
                let rep = recover_axis_point(&j, side, DEFAULT_EPS)
                    .map_err(|e| format!("joint {i} side {side}: {e}"))?;
                recovered &= rep.ok();
            }

            let err = |e: &dyn std::fmt::Display| format!("joint {i}: {e}");
            let outer = polygon(&instantiate(&original, &j).map_err(|e| err(&e))?);
            let inner = polygon(&instantiate(&simplified, &j).map_err(|e| err(&e))?);
            let b1 = substitute_aux(&j, CollapseMode::Collapse1).map_err(|e| err(&e))?;
            let b2 = substitute_aux(&j, CollapseMode::Collapse2).map_err(|e| err(&e))?;
            let r1 = polygon(&instantiate(&cloud1, &b1).map_err(|e| err(&e))?);
            let r2 = polygon(&instantiate(&cloud2, &b2).map_err(|e| err(&e))?);
            let hull = hull_union(&[&inner, &r1, &r2]);
            let covered = outer
                .vertices
                .iter()
                .all(|v| convex_contains(&hull.vertices, *v, HULL_TOL));
            Ok((recovered, covered))
        })
        .collect();

    let per_joint = match per_joint {
        Ok(v) => v,
        Err(e) => return fail(NAME, e),
    };
    let recovery_failures = per_joint.iter().filter(|r| !r.0).count();
    let hull_failures = per_joint.iter().filter(|r| !r.1).count();

    CheckReport {
        name: NAME,
        verdict: verdict_of(recovery_failures == 0 && hull_failures == 0),
        detail: json!({
            "joints": joints,
            "epsilon": DEFAULT_EPS,
            "hull_tolerance": HULL_TOL,
            "recovery_failures": recovery_failures,
            "hull_failures": hull_failures,
        }),
    }
}

/// The tracked information terms must be exactly linear across every
/// time-sharing mixture on the ladder, and the mixtures must bring all
/// three near-axis targets strictly inside the region.
fn check_mixtures(opts: &SuiteOptions) -> CheckReport {
    const NAME: &str = "mixture-linearity";
    let joints = opts.count(50);

    let per_joint: Result<Vec<_>, String> = (0..joints)
        .into_par_iter()
        .map(|i| {
            let base = if (i + 1) % 10 == 0 { 3 } else { 2 };
            let mut rng = stream(opts.seed, 5, i);
            let j = random_gated_joint(&mut rng, &SampleOpts::base(base))
                .map_err(|e| format!("joint {i}: {e}"))?;
            let reports = boundary_approach(&j, APPROACH_EPS, &GAMMA_LADDER)
                .map_err(|e| format!("joint {i}: {e}"))?;
            let max_dev = reports
                .iter()
                .flat_map(|r| r.steps.iter().map(|s| s.linearity_dev))
                .fold(0.0f64, f64::max);
            let unreached = reports.iter().filter(|r| !r.achieved).count();
            Ok((max_dev, unreached))
        })
        .collect();

    let per_joint = match per_joint {
        Ok(v) => v,
        Err(e) => return fail(NAME, e),
    };
    let max_linearity_dev = per_joint.iter().map(|r| r.0).fold(0.0f64, f64::max);
    let unreached_targets: usize = per_joint.iter().map(|r| r.1).sum();

    CheckReport {
        name: NAME,
        verdict: verdict_of(max_linearity_dev <= LINEAR_TOL && unreached_targets == 0),
        detail: json!({
            "joints": joints,
            "gammas": GAMMA_LADDER,
            "epsilon": APPROACH_EPS,
            "tolerance": LINEAR_TOL,
            "max_linearity_dev": max_linearity_dev,
            "unreached_targets": unreached_targets,
        }),
    }
}

/// Reference leakage by full enumeration: walks every (own message, other
/// message, randomness triple) combination through the shared codeword
/// selection, then sums the factor products over every input word and
/// eavesdropper word, and takes the mutual information as an entropy
/// difference. Exponential in the blocklength; meant only as a
/// cross-check for [`exact_leakage`] on tiny instances.
pub fn reference_leakage(cb: &Codebook, cfg: &SchemeConfig, j: &Joint, receiver: usize) -> f64 {
    let t = Tables::new(j);
    let s = cfg.sizes;
    let n = cfg.n;
    let kx = j.size_of(Var::X);
    let kz = j.size_of(Var::Z);
    let (ky1, ky2) = (j.size_of(Var::Y1), j.size_of(Var::Y2));
    let p_z_x = |x: usize, z: usize| -> f64 {
        let mut p = 0.0;
        for y1 in 0..ky1 {
            for y2 in 0..ky2 {
                p += j.factors[4].prob(x, (y1 * ky2 + y2) * kz + z);
            }
        }
        p
    };

    let m_own = cfg.message_count(receiver) as usize;
    let m_other = cfg.message_count(3 - receiver) as usize;
    let combos = (m_other * s.nd * s.nd1 * s.nd2) as f64;
    let kzn = kz.pow(n as u32);
    let kxn = kx.pow(n as u32);
    let mut dists = vec![vec![0.0f64; kzn]; m_own];

    for (own_flat, dist) in dists.iter_mut().enumerate() {
        let own = cfg.split(receiver, own_flat as u64);
        for other_flat in 0..m_other {
            let other = cfg.split(3 - receiver, other_flat as u64);
            let (m1, m2) = if receiver == 1 { (own, other) } else { (other, own) };
            for d in 0..s.nd {
                for d1 in 0..s.nd1 {
                    for d2 in 0..s.nd2 {
                        let sel = select_codewords(cb, cfg, &t, m1, m2, d, d1, d2);
                        let w1 = &cb.v1_words[sel.v1_index];
                        let w2 = &cb.v2_words[sel.v2_index];
                        // Words flatten big-endian: position 0 is the
                        // slowest digit.
                        for xw in 0..kxn {
                            let xs: Vec<usize> =
                                (0..n).map(|p| xw / kx.pow((n - 1 - p) as u32) % kx).collect();
                            let px: f64 = (0..n)
                                .map(|p| j.factors[3].prob(w1[p] * t.k2 + w2[p], xs[p]))
                                .product();
                            if px == 0.0 {
                                continue;
                            }
                            for zw in 0..kzn {
                                let pz: f64 = (0..n)
                                    .map(|p| p_z_x(xs[p], zw / kz.pow((n - 1 - p) as u32) % kz))
                                    .product();
                                dist[zw] += px * pz / combos;
                            }
                        }
                    }
                }
            }
        }
    }

    let pm = 1.0 / m_own as f64;
    let mut p_z = vec![0.0f64; kzn];
    for dist in &dists {
        for (i, &p) in dist.iter().enumerate() {
            p_z[i] += pm * p;
        }
    }
    let h_cond: f64 = dists.iter().map(|d| pm * entropy_bits(d)).sum();
    ((entropy_bits(&p_z) - h_cond) / n as f64).max(0.0)
}

fn layered(variant: Variant, edit: impl Fn(&mut LayerSizes)) -> SchemeConfig {
    let mut sizes = LayerSizes::unit();
    edit(&mut sizes);
    SchemeConfig { n: 2, variant, sizes, delta: 0.5, caps: Caps::default() }
}

/// The fast leakage computation must agree with [`reference_leakage`] on
/// small instances of all three variants, report zero for pad-only
/// configurations, and report zero when the eavesdropper's output is
/// independent of the input.
fn check_leakage_exactness(opts: &SuiteOptions) -> CheckReport {
    const NAME: &str = "leakage-exactness";
    let run = || -> Result<(bool, Value), String> {
        let configs = [
            layered(Variant::Simplified2, |s| {
                s.na = 2;
                s.n1c = 2;
                s.n2c = 2;
                s.nl1 = 2;
                s.nl2 = 2;
            }),
            layered(Variant::Simplified1, |s| {
                s.na = 2;
                s.n1c = 2;
                s.n2c = 2;
                s.nd1 = 2;
                s.nd2 = 2;
            }),
            layered(Variant::Original, |s| {
                s.na = 2;
                s.nb = 2;
                s.nd = 2;
            }),
        ];
        let joints_per_config = 3usize;
        let mut instances = 0usize;
        let mut max_reference_gap = 0.0f64;
        for (ci, cfg) in configs.iter().enumerate() {
            for k in 0..joints_per_config {
                let mut rng = stream(opts.seed, 6, ci * joints_per_config + k);
                let j = random_joint(&mut rng, 2);
                let t = Tables::new(&j);
                let cb = generate_codebook(cfg, &t, rng.gen()).map_err(|e| e.to_string())?;
                for receiver in [1, 2] {
                    let fast = exact_leakage(&cb, cfg, &t, receiver).map_err(|e| e.to_string())?;
                    let reference = reference_leakage(&cb, cfg, &j, receiver);
                    max_reference_gap = max_reference_gap.max((fast - reference).abs());
                    instances += 1;
                }
            }
        }

        // Pad-only: the padded segment is uniform and independent of
        // either message, so nothing reaches the eavesdropper.
        let pad_cfg = layered(Variant::Simplified2, |s| s.na = 2);
        let pad_channels = opts.count(20);
        let mut max_pad = 0.0f64;
        for k in 0..pad_channels {
            let mut rng = stream(opts.seed, 7, k);
            let j = random_joint(&mut rng, 2);
            let t = Tables::new(&j);
            let cb = generate_codebook(&pad_cfg, &t, rng.gen()).map_err(|e| e.to_string())?;
            for receiver in [1, 2] {
                max_pad =
                    max_pad.max(exact_leakage(&cb, &pad_cfg, &t, receiver).map_err(|e| e.to_string())?);
            }
        }

        // A coin-flip eavesdropper output carries nothing regardless of
        // the layering.
        let ind_cfg = SchemeConfig {
            n: 3,
            variant: Variant::Simplified2,
            sizes: LayerSizes { na: 2, n1c: 2, n2c: 2, nl1: 2, nl2: 2, ..LayerSizes::unit() },
            delta: 0.5,
            caps: Caps::default(),
        };
        let independent_channels = 5usize;
        let mut max_ind = 0.0f64;
        for k in 0..independent_channels {
            let mut rng = stream(opts.seed, 11, k);
            let e = |r: &mut ChaCha8Rng| 0.05 + 0.4 * r.gen::<f64>();
            let j = copy_satellite_joint(e(&mut rng), e(&mut rng), e(&mut rng), 0.5);
            let t = Tables::new(&j);
            let cb = generate_codebook(&ind_cfg, &t, rng.gen()).map_err(|e| e.to_string())?;
            for receiver in [1, 2] {
                max_ind =
                    max_ind.max(exact_leakage(&cb, &ind_cfg, &t, receiver).map_err(|e| e.to_string())?);
            }
        }

        let ok = max_reference_gap <= EXACT_TOL && max_pad <= EXACT_TOL && max_ind <= EXACT_TOL;
        Ok((
            ok,
            json!({
                "tolerance": EXACT_TOL,
                "enumeration_instances": instances,
                "max_reference_gap": max_reference_gap,
                "pad_channels": pad_channels,
                "max_pad_leakage": max_pad,
                "independent_channels": independent_channels,
                "max_independent_leakage": max_ind,
            }),
        ))
    };
    match run() {
        Ok((ok, detail)) => CheckReport { name: NAME, verdict: verdict_of(ok), detail },
        Err(e) => fail(NAME, e),
    }
}

/// Two private satellites riding a degenerate cloud: `V = U` uniform,
/// `V1` and `V2` independent sticky copies of `V` with flip rates `a1`,
/// `a2`, and `X = (V1, V2)`. Each receiver observes its own component
/// through a symmetric channel and the eavesdropper taps the first one.
/// The degenerate cloud zeroes the region's rate floors, so small-message
/// operating points sit strictly inside.
fn split_satellite_joint(a1: f64, a2: f64, e1: f64, e2: f64, ez: f64) -> Joint {
    let bsc = |e: f64, a: usize, b: usize| if a == b { 1.0 - e } else { e };
    let p_u = Factor::new(vec![Var::U], vec![], vec![2], vec![], vec![0.5, 0.5]);
    let p_v =
        Factor::new(vec![Var::V], vec![Var::U], vec![2], vec![2], vec![1.0, 0.0, 0.0, 1.0]);
    let mut pair = Vec::with_capacity(8);
    for v in 0..2 {
        for v1 in 0..2 {
            for v2 in 0..2 {
                pair.push(bsc(a1, v, v1) * bsc(a2, v, v2));
            }
        }
    }
    let p_pair =
        Factor::new(vec![Var::V1, Var::V2], vec![Var::V], vec![2, 2], vec![2], pair);
    let mut x_table = vec![0.0; 16];
    for v1 in 0..2 {
        for v2 in 0..2 {
            x_table[(v1 * 2 + v2) * 4 + (v1 * 2 + v2)] = 1.0;
        }
    }
    let p_x = Factor::new(vec![Var::X], vec![Var::V1, Var::V2], vec![4], vec![2, 2], x_table);
    let mut out = Vec::with_capacity(32);
    for x in 0..4usize {
        let (v1, v2) = (x / 2, x % 2);
        for y1 in 0..2 {
            for y2 in 0..2 {
                for z in 0..2 {
                    out.push(bsc(e1, v1, y1) * bsc(e2, v2, y2) * bsc(ez, v1, z));
                }
            }
        }
    }
    let channel = Factor::new(
        vec![Var::Y1, Var::Y2, Var::Z],
        vec![Var::X],
        vec![2, 2, 2],
        vec![4],
        out,
    );
    let alphabets = vec![
        Alphabet::atomic(2),
        Alphabet::atomic(2),
        Alphabet::atomic(2),
        Alphabet::atomic(2),
        Alphabet::atomic(4),
        Alphabet::atomic(2),
        Alphabet::atomic(2),
        Alphabet::atomic(2),
    ];
    Joint::build(alphabets, vec![p_u, p_v, p_pair, p_x, channel])
        .expect("split-satellite chain is a valid factorization")
}

/// At a fixed rate point strictly inside the simplified region, growing
/// the blocklength must not raise the worst-codebook leakage (non-positive
/// regression slope) and must help decoding: the longest blocklength beats
/// the shortest, or both error rates are already small.
fn check_trend(opts: &SuiteOptions) -> CheckReport {
    const NAME: &str = "finite-length-trend";
    let run = || -> Result<(bool, Value), String> {
        // Clean receiver links keep decoding collision-driven (errors fall
        // as private codewords decorrelate with length), while the
        // eavesdropper reads the first satellite nearly noiselessly, so
        // its one-bit take on each message is saturated early and the
        // normalized leakage decays like 1/n.
        let j = split_satellite_joint(0.3, 0.3, 0.0, 0.0, 0.05);
        let sizes = LayerSizes { n1d: 2, n2d: 2, ..LayerSizes::unit() };
        let codebooks = 10usize;
        let trials = opts.count(400);
        let ns = [4usize, 6, 8, 10];

        let mut rates = Vec::new();
        let mut margins = Vec::new();
        let mut max_leak = Vec::new();
        let mut worst_error = Vec::new();
        let mut encoding_failures = 0u64;
        for n in ns {
            let cfg = SchemeConfig {
                n,
                variant: Variant::Simplified2,
                sizes,
                delta: 0.2,
                caps: Caps::default(),
            };
            let rep =
                run_experiment(&cfg, &j, codebooks, trials, opts.seed).map_err(|e| e.to_string())?;
            rates.push((rep.rate_point.r1, rep.rate_point.r2));
            margins.push(rep.rate_point.margin);
            max_leak.push(rep.leakage[0].max.max(rep.leakage[1].max));
            worst_error.push(rep.error[0].rate.max(rep.error[1].rate));
            encoding_failures += rep.encoding_failures;
        }

        let inside = margins.iter().all(|&m| m < -1e-6);
        let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let leak_slope = slope(&xs, &max_leak);
        let error_ok = worst_error[ns.len() - 1] < worst_error[0]
            || worst_error.iter().all(|&p| p < 0.05);
        let ok = inside && leak_slope <= 0.0 && error_ok;
        Ok((
            ok,
            json!({
                "blocklengths": ns,
                "codebooks": codebooks,
                "trials_per_codebook": trials,
                "rates": rates,
                "margins": margins,
                "max_leakage": max_leak,
                "leakage_slope": leak_slope,
                "worst_error_rate": worst_error,
                "encoding_failures": encoding_failures,
            }),
        ))
    };
    match run() {
        Ok((ok, detail)) => CheckReport { name: NAME, verdict: verdict_of(ok), detail },
        Err(e) => fail(NAME, e),
    }
}

fn halfplane(label: &str, a: f64, b: f64, c: f64) -> Halfplane {
    Halfplane { label: label.into(), a, b, c, strict: false }
}

/// The polygon builder must agree with raw halfplane membership on a
/// raster, off a thin boundary band, for a large family of random
/// systems; and it must reproduce the worked pentagon's vertices exactly.
fn check_geometry(opts: &SuiteOptions) -> CheckReport {
    const NAME: &str = "geometry-oracle";
    let systems = opts.count(1000);
    let grid = 48usize;
    let rmax = 4.0f64;
    let band = 1e-6f64;

    let per_system: Vec<(usize, usize, u64)> = (0..systems)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(opts.seed, 8, i);
            let rows = rng.gen_range(3..=8);
            let halfplanes: Vec<Halfplane> = (0..rows)
                .map(|k| {
                    // Unit normals keep residuals comparable to the band.
                    let th = rng.gen::<f64>() * std::f64::consts::TAU;
                    let c = rng.gen::<f64>() * 1.8 - 0.3;
                    halfplane(&format!("h{k}"), th.cos(), th.sin(), c)
                })
                .collect();
            let inst = Instantiated {
                name: format!("random-{i}"),
                halfplanes,
                gates: vec![],
                rmax,
            };
            let region = polygon(&inst);

            let mut compared = 0usize;
            let mut mismatches = 0usize;
            for gx in 0..grid {
                for gy in 0..grid {
                    let x = (gx as f64 + 0.5) * rmax / grid as f64;
                    let y = (gy as f64 + 0.5) * rmax / grid as f64;
                    if region.halfplanes.iter().any(|h| h.residual(x, y).abs() <= band) {
                        continue;
                    }
                    compared += 1;
                    let direct = region.halfplanes.iter().all(|h| h.residual(x, y) <= 0.0);
                    let by_polygon = convex_contains(&region.vertices, (x, y), LINEAR_TOL);
                    if direct != by_polygon {
                        mismatches += 1;
                    }
                }
            }
            (compared, mismatches, u64::from(!region.is_empty()))
        })
        .collect();

    let compared: usize = per_system.iter().map(|r| r.0).sum();
    let mismatches: usize = per_system.iter().map(|r| r.1).sum();
    let nonempty: u64 = per_system.iter().map(|r| r.2).sum();

    let pentagon = Instantiated {
        name: "pentagon".into(),
        halfplanes: vec![
            halfplane("r1-cap", 1.0, 0.0, 3.0),
            halfplane("r2-cap", 0.0, 1.0, 2.0),
            halfplane("sum-cap", 1.0, 1.0, 4.0),
            halfplane("nn1", -1.0, 0.0, 0.0),
            halfplane("nn2", 0.0, -1.0, 0.0),
        ],
        gates: vec![],
        rmax: 10.0,
    };
    let pent = polygon(&pentagon);
    let corners = [(3.0, 0.0), (3.0, 1.0), (2.0, 2.0)];
    let pentagon_ok = pent.vertices.len() == 5
        && corners.iter().all(|w| {
            pent.vertices
                .iter()
                .any(|v| (v.0 - w.0).abs() <= LINEAR_TOL && (v.1 - w.1).abs() <= LINEAR_TOL)
        });

    CheckReport {
        name: NAME,
        verdict: verdict_of(mismatches == 0 && pentagon_ok),
        detail: json!({
            "systems": systems,
            "grid": grid,
            "band": band,
            "points_compared": compared,
            "nonempty_regions": nonempty,
            "mismatches": mismatches,
            "pentagon_ok": pentagon_ok,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SuiteOptions {
        SuiteOptions { seed: 0x51e57, shrink: 25 }
    }

    #[test]
    fn quick_battery_passes() {
        let report = run_all(&quick());
        for c in &report.checks {
            assert!(c.passed(), "{} failed: {:#}", c.name, c.detail);
        }
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.checks.len(), CHECK_NAMES.len());
    }

    #[test]
    fn unknown_checks_are_rejected() {
        assert!(run_check("no-such-check", &quick()).is_none());
        let r = run_check("geometry-oracle", &quick()).unwrap();
        assert_eq!(r.name, "geometry-oracle");
        assert!(r.passed());
    }

    #[test]
    fn reports_carry_machine_readable_detail() {
        let r = run_check("geometry-oracle", &quick()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["name"], "geometry-oracle");
        assert_eq!(v["verdict"], "Pass");
        assert!(v["detail"]["points_compared"].as_u64().unwrap() > 0);
        assert!(v["detail"]["nonempty_regions"].as_u64().unwrap() > 0);
    }
}
