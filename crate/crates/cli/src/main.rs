//! Command-line front end: derives regions from layered-scheme constraint
//! systems, instantiates and exports them on concrete distributions, runs
//! the equivalence/recovery/mixture checks, drives finite-blocklength
//! coding experiments, and runs the full verification battery.
//!
//! Every subcommand prints one JSON report to stdout that echoes its full
//! resolved configuration (including the seed, when one is used), so any
//! report can be reproduced bit-exactly by rerunning the echoed settings.
//! File outputs are written atomically. Exit codes: 0 pass, 1 fail,
//! 2 inconclusive, 3 usage or input error.

mod export;
mod sysio;

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use secrecy_regions::algebra::equiv::{equiv_check, EquivOptions, Verdict};
use secrecy_regions::algebra::fm::{eliminate, project_to_free, verify_certificates, FmOptions};
use secrecy_regions::algebra::instantiate::{instantiate, GATE_TOL};
use secrecy_regions::algebra::{Constraint, ConstraintSystem, RateVar, Relation};
use secrecy_regions::geometry::polygon;
use secrecy_regions::geometry::recover::{
    boundary_approach, recover_axis_point, APPROACH_EPS, DEFAULT_EPS, GAMMA_LADDER,
};
use secrecy_regions::geometry::special::{classify_cut, s_points, special_terms};
use secrecy_regions::prob::sample::{random_gated_joint, seeded, SampleOpts};
use secrecy_regions::prob::Joint;
use secrecy_regions::sim::experiment::run_experiment;
use secrecy_regions::sim::{Caps, LayerSizes, SchemeConfig, Variant};
use secrecy_regions::suite;

#[derive(Parser)]
#[command(
    name = "secrecy-regions",
    version,
    about = "Rate-region derivation, geometry, and coding experiments \
             for two-receiver broadcast channels with side information"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Project a constraint system onto its free rates and emit the result
    /// with elimination certificates.
    Derive(DeriveArgs),
    /// Instantiate a region on a distribution and export its polygon.
    Region(RegionArgs),
    /// Numerically compare two systems over sampled distributions.
    Equiv(EquivArgs),
    /// Classify the near-origin cut shape on one or more distributions.
    Cases(CasesArgs),
    /// Recover the off-axis landmarks through the collapsed branches.
    Recover(RecoverArgs),
    /// Approach the boundary landmarks by mixing with a collapsed branch.
    Mix(MixArgs),
    /// Run a finite-blocklength coding experiment on a channel file.
    Simulate(SimulateArgs),
    /// Run the verification battery (all checks, or a subset).
    Suite(SuiteArgs),
}

#[derive(Args)]
struct DeriveArgs {
    /// Preset id or system JSON file.
    #[arg(long)]
    system: String,
    /// Comma-separated bound variables to eliminate, or "default" for all
    /// of them in declared order.
    #[arg(long, default_value = "default")]
    eliminate: String,
    /// Output file for the projected system and its certificates.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RegionArgs {
    /// Preset id or system JSON file; must be fully projected.
    #[arg(long)]
    system: String,
    /// Joint distribution JSON file.
    #[arg(long)]
    dist: PathBuf,
    /// Output file; format chosen by extension (.csv or .svg).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EquivArgs {
    /// Preset id or system JSON file (projected automatically if needed).
    #[arg(long)]
    first: String,
    /// Preset id or system JSON file (projected automatically if needed).
    #[arg(long)]
    second: String,
    /// Binary-alphabet sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Ternary-alphabet sample count.
    #[arg(long)]
    ternary: Option<usize>,
    /// Raster resolution per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// No-compare band around either boundary.
    #[arg(long)]
    band: Option<f64>,
    /// Sampler retries per slot before declaring the run inconclusive.
    #[arg(long)]
    retries: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CasesArgs {
    /// Joint distribution JSON files; may repeat.
    #[arg(long)]
    dist: Vec<PathBuf>,
    /// Additionally classify this many sampled admissible joints.
    #[arg(long)]
    count: Option<usize>,
    /// Alphabet size for sampled joints.
    #[arg(long, default_value_t = 2)]
    base: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    /// Joint distribution JSON file.
    #[arg(long)]
    dist: PathBuf,
    /// Which landmark side to recover: 1, 2, or both.
    #[arg(long, default_value = "both")]
    side: String,
    /// Back-off distance from the landmark.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MixArgs {
    /// Joint distribution JSON file.
    #[arg(long)]
    dist: PathBuf,
    /// Distance from the boundary for each approach target.
    #[arg(long, default_value_t = APPROACH_EPS)]
    eps: f64,
    /// Comma-separated mixing weights, tried in order.
    #[arg(long)]
    gammas: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Channel (joint distribution) JSON file.
    #[arg(long)]
    channel: PathBuf,
    /// Coding scheme: original, simplified1, or simplified2.
    #[arg(long)]
    variant: String,
    /// Blocklength.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Comma-separated layer size overrides, e.g. "na=4,n1c=2"; all sizes
    /// start at 1.
    #[arg(long)]
    sizes: Option<String>,
    /// Robust-typicality deviation.
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    #[arg(long, default_value_t = 10)]
    codebooks: usize,
    /// Decode trials per codebook.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0xc0de)]
    seed: u64,
    /// Enumeration cap for the exact leakage computation.
    #[arg(long)]
    cap_leakage: Option<u64>,
    /// Cap on stored codeword symbols.
    #[arg(long)]
    cap_codebook: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Divide the heavier sample counts by this factor (1 = full battery).
    #[arg(long, default_value_t = 1)]
    shrink: usize,
    /// Check name to run; may repeat. Defaults to every check.
    #[arg(long = "check")]
    checks: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failures that end the process: usage and input problems exit 3, a
/// completed-but-failed operation exits 1.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String),
    Run(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 3,
            CliError::Run(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Run(m) => m,
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let info = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            std::process::exit(if info { 0 } else { 3 });
        }
    };
    let result = match cli.cmd {
        Cmd::Derive(a) => cmd_derive(&a),
        Cmd::Region(a) => cmd_region(&a),
        Cmd::Equiv(a) => cmd_equiv(&a),
        Cmd::Cases(a) => cmd_cases(&a),
        Cmd::Recover(a) => cmd_recover(&a),
        Cmd::Mix(a) => cmd_mix(&a),
        Cmd::Simulate(a) => cmd_simulate(&a),
        Cmd::Suite(a) => cmd_suite(&a),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.code());
        }
    }
}

/// Prints the report to stdout and optionally mirrors it to a file.
fn emit(payload: &Value, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(payload)
        .map_err(|e| CliError::Run(format!("serializing report: {e}")))?;
    text.push('\n');
    if let Some(path) = out {
        export::write_atomic(path, &text)
            .map_err(|e| CliError::Input(format!("writing {}: {e}", path.display())))?;
    }
    print!("{text}");
    Ok(())
}

fn read_joint(path: &Path) -> Result<Joint, CliError> {
    secrecy_regions::prob::io::read_joint(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_system(spec: &str) -> Result<(ConstraintSystem, String), CliError> {
    sysio::load_system(spec).map_err(CliError::Input)
}

fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 2,
    }
}

fn cmd_derive(a: &DeriveArgs) -> Result<i32, CliError> {
    let (sys, source) = load_system(&a.system)?;
    let fm_opts = FmOptions::from_env();
    let order: Vec<RateVar> = if a.eliminate == "default" {
        sys.bound.clone()
    } else {
        a.eliminate.split(',').map(|s| RateVar::new(s.trim())).collect()
    };
    let outcome = if a.eliminate == "default" {
        project_to_free(&sys, &fm_opts)
    } else {
        eliminate(&sys, &order, &fm_opts)
    }
    .map_err(|e| match e {
        secrecy_regions::algebra::AlgebraError::CapExceeded { .. } => {
            CliError::Run(format!("elimination aborted: {e}"))
        }
        other => CliError::Usage(format!("cannot eliminate: {other}")),
    })?;
    verify_certificates(&outcome)
        .map_err(|e| CliError::Run(format!("certificate verification failed: {e}")))?;

    let base: Vec<Value> = outcome
        .base
        .iter()
        .map(|b| {
            let rel = if b.strict { Relation::Lt } else { Relation::Le };
            let c = Constraint { label: b.label.clone(), expr: b.expr.clone(), rel };
            json!({ "label": b.label, "text": c.text(), "strict": b.strict })
        })
        .collect();
    let substitutions: Vec<Value> = outcome
        .substitutions
        .iter()
        .map(|(var, rhs)| {
            let one = secrecy_regions::algebra::rat(1, 1);
            let mut expr = rhs.clone().scaled(&-one.clone());
            expr.add_rate(var.clone(), one);
            let c = Constraint { label: var.0.clone(), expr, rel: Relation::Eq };
            json!({ "var": var.0, "text": c.text() })
        })
        .collect();
    let certificates: Vec<Value> = outcome
        .certificates
        .iter()
        .map(|cert| {
            cert.iter()
                .map(|(idx, coef)| json!([idx, coef.to_string()]))
                .collect::<Vec<_>>()
                .into()
        })
        .collect();

    let payload = json!({
        "command": "derive",
        "config": {
            "system": source,
            "eliminate": order.iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
            "fm_cap": fm_opts.cap,
            "out": a.out.display().to_string(),
        },
        "seed": Value::Null,
        "system": sysio::system_to_json(&outcome.system),
        "base": base,
        "substitutions": substitutions,
        "certificates": certificates,
        "certificates_verified": true,
    });
    emit(&payload, Some(&a.out))?;
    Ok(0)
}

fn cmd_region(a: &RegionArgs) -> Result<i32, CliError> {
    let format = match a.out.extension().and_then(|e| e.to_str()) {
        Some("csv") => "csv",
        Some("svg") => "svg",
        other => {
            return Err(CliError::Usage(format!(
                "--out must end in .csv or .svg, got {other:?}"
            )))
        }
    };
    let (sys, source) = load_system(&a.system)?;
    let j = read_joint(&a.dist)?;
    let inst = instantiate(&sys, &j)
        .map_err(|e| CliError::Input(format!("instantiating {source}: {e}")))?;
    let region = polygon(&inst);
    let terms = special_terms(&j).map_err(|e| CliError::Input(format!("{e}")))?;
    let landmarks = s_points(&terms);

    let warning = if region.is_empty() {
        let msg = format!("region {} is empty on this distribution", region.name);
        eprintln!("warning: {msg}");
        Some(msg)
    } else {
        None
    };

    let ex = export::RegionExport {
        region: &region,
        gates: &inst.gates,
        terms: &terms,
        landmarks: &landmarks,
        rmax: inst.rmax,
        dist: &a.dist.display().to_string(),
    };
    let rendered = if format == "csv" { export::region_csv(&ex) } else { export::region_svg(&ex) };
    export::write_atomic(&a.out, &rendered)
        .map_err(|e| CliError::Input(format!("writing {}: {e}", a.out.display())))?;

    let payload = json!({
        "command": "region",
        "config": {
            "system": source,
            "dist": a.dist.display().to_string(),
            "out": a.out.display().to_string(),
            "format": format,
        },
        "seed": Value::Null,
        "region": {
            "name": region.name,
            "rmax": inst.rmax,
            "gated_out": region.gated_out,
            "empty": region.is_empty(),
            "area": region.area(),
            "gates": inst.gates.iter().map(|g| json!({
                "label": g.label, "value": g.value, "holds": g.holds(GATE_TOL),
            })).collect::<Vec<_>>(),
            "special": {
                "a": terms.a, "b": terms.b, "c": terms.c, "d": terms.d, "e": terms.e,
            },
            "landmarks": landmarks.iter().map(|p| json!({
                "label": p.label, "r1": p.r1, "r2": p.r2, "limit": p.limit,
            })).collect::<Vec<_>>(),
            "halfplanes": region.halfplanes.iter().map(|h| json!({
                "label": h.label, "a": h.a, "b": h.b, "c": h.c, "strict": h.strict,
            })).collect::<Vec<_>>(),
            "vertices": region.vertices,
        },
        "warning": warning,
    });
    emit(&payload, None)?;
    Ok(0)
}

/// Projects a loaded system when it still has bound variables, so scheme
/// presets and region presets can be compared directly.
fn resolve_for_equiv(
    spec: &str,
    fm_opts: &FmOptions,
) -> Result<(ConstraintSystem, String, bool), CliError> {
    let (sys, source) = load_system(spec)?;
    if sys.bound.is_empty() {
        return Ok((sys, source, false));
    }
    let outcome = project_to_free(&sys, fm_opts)
        .map_err(|e| CliError::Input(format!("projecting {source}: {e}")))?;
    Ok((outcome.system, source, true))
}

fn cmd_equiv(a: &EquivArgs) -> Result<i32, CliError> {
    let fm_opts = FmOptions::from_env();
    let (first, first_src, first_projected) = resolve_for_equiv(&a.first, &fm_opts)?;
    let (second, second_src, second_projected) = resolve_for_equiv(&a.second, &fm_opts)?;

    let mut opts = EquivOptions::default();
    if let Some(v) = a.samples {
        opts.binary_samples = v;
    }
    if let Some(v) = a.ternary {
        opts.ternary_samples = v;
    }
    if let Some(v) = a.grid {
        opts.grid = v;
    }
    if let Some(v) = a.band {
        opts.band = v;
    }
    if let Some(v) = a.retries {
        opts.retries = v;
    }
    if let Some(v) = a.seed {
        opts.seed = v;
    }

    let report = equiv_check(&first, &second, &opts)
        .map_err(|e| CliError::Input(format!("equivalence check: {e}")))?;
    let verdict = report.verdict;
    let payload = json!({
        "command": "equiv",
        "config": {
            "first": first_src,
            "first_projected": first_projected,
            "second": second_src,
            "second_projected": second_projected,
            "samples": opts.binary_samples,
            "ternary": opts.ternary_samples,
            "grid": opts.grid,
            "band": opts.band,
            "retries": opts.retries,
            "fm_cap": fm_opts.cap,
        },
        "seed": opts.seed,
        "report": serde_json::to_value(&report)
            .map_err(|e| CliError::Run(format!("serializing report: {e}")))?,
    });
    emit(&payload, a.out.as_deref())?;
    Ok(verdict_exit(verdict))
}

fn cmd_cases(a: &CasesArgs) -> Result<i32, CliError> {
    let seed = a.seed.unwrap_or(0xca5e5);
    // Default to a small sampled batch when no inputs are given at all.
    let sampled = a.count.unwrap_or(if a.dist.is_empty() { 4 } else { 0 });

    let mut sources: Vec<(String, Joint)> = Vec::new();
    for path in &a.dist {
        sources.push((path.display().to_string(), read_joint(path)?));
    }
    let mut rng = seeded(seed);
    let sample_opts = SampleOpts::base(a.base);
    for i in 0..sampled {
        let j = random_gated_joint(&mut rng, &sample_opts)
            .map_err(|e| CliError::Run(format!("sampling joint {i}: {e}")))?;
        sources.push((format!("sampled-{i}"), j));
    }

    let mut rows = Vec::with_capacity(sources.len());
    let mut histogram: std::collections::BTreeMap<&'static str, usize> = Default::default();
    let mut all_floor_ok = true;
    for (source, j) in &sources {
        let t = special_terms(j).map_err(|e| CliError::Input(format!("{source}: {e}")))?;
        let case = classify_cut(&t);
        *histogram.entry(case.as_str()).or_default() += 1;
        // The floor never exceeds the single-user caps on admissible chains.
        let floor_ok = t.e <= t.a + 1e-9 && t.e <= t.c + 1e-9;
        all_floor_ok &= floor_ok;
        rows.push(json!({
            "source": source,
            "terms": { "a": t.a, "b": t.b, "c": t.c, "d": t.d, "e": t.e },
            "case": case.as_str(),
            "floor_ok": floor_ok,
        }));
    }

    let payload = json!({
        "command": "cases",
        "config": {
            "dist": a.dist.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "count": sampled,
            "base": a.base,
        },
        "seed": seed,
        "cases": rows,
        "histogram": histogram,
        "all_floor_ok": all_floor_ok,
    });
    emit(&payload, a.out.as_deref())?;
    Ok(if all_floor_ok { 0 } else { 1 })
}

fn cmd_recover(a: &RecoverArgs) -> Result<i32, CliError> {
    let sides: Vec<usize> = match a.side.as_str() {
        "1" => vec![1],
        "2" => vec![2],
        "both" => vec![1, 2],
        other => return Err(CliError::Usage(format!("--side must be 1, 2, or both, got {other}"))),
    };
    let j = read_joint(&a.dist)?;
    let mut reports = Vec::with_capacity(sides.len());
    let mut all_ok = true;
    for &side in &sides {
        let r = recover_axis_point(&j, side, a.eps)
            .map_err(|e| CliError::Run(format!("side {side}: {e}")))?;
        all_ok &= r.ok();
        reports.push(
            serde_json::to_value(&r)
                .map_err(|e| CliError::Run(format!("serializing report: {e}")))?,
        );
    }
    let payload = json!({
        "command": "recover",
        "config": {
            "dist": a.dist.display().to_string(),
            "sides": sides,
            "eps": a.eps,
        },
        "seed": Value::Null,
        "reports": reports,
        "ok": all_ok,
    });
    emit(&payload, a.out.as_deref())?;
    Ok(if all_ok { 0 } else { 1 })
}

fn cmd_mix(a: &MixArgs) -> Result<i32, CliError> {
    let gammas: Vec<f64> = match &a.gammas {
        None => GAMMA_LADDER.to_vec(),
        Some(text) => text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Usage(format!("--gammas entry {s:?}: {e}")))
            })
            .collect::<Result<_, _>>()?,
    };
    if gammas.iter().any(|g| !(*g > 0.0 && *g < 1.0)) {
        return Err(CliError::Usage("every gamma must lie in (0, 1)".into()));
    }
    let j = read_joint(&a.dist)?;
    let reports = boundary_approach(&j, a.eps, &gammas)
        .map_err(|e| CliError::Run(format!("boundary approach: {e}")))?;
    let achieved_all = reports.iter().all(|r| r.achieved);
    let max_linearity_dev = reports
        .iter()
        .flat_map(|r| r.steps.iter().map(|s| s.linearity_dev))
        .fold(0.0_f64, f64::max);
    let payload = json!({
        "command": "mix",
        "config": {
            "dist": a.dist.display().to_string(),
            "eps": a.eps,
            "gammas": gammas,
        },
        "seed": Value::Null,
        "reports": serde_json::to_value(&reports)
            .map_err(|e| CliError::Run(format!("serializing report: {e}")))?,
        "achieved_all": achieved_all,
        "max_linearity_dev": max_linearity_dev,
    });
    emit(&payload, a.out.as_deref())?;
    Ok(if achieved_all { 0 } else { 1 })
}

fn parse_variant(s: &str) -> Result<Variant, CliError> {
    match s {
        "original" => Ok(Variant::Original),
        "simplified1" => Ok(Variant::Simplified1),
        "simplified2" => Ok(Variant::Simplified2),
        other => Err(CliError::Usage(format!(
            "--variant must be original, simplified1, or simplified2, got {other}"
        ))),
    }
}

fn parse_sizes(spec: Option<&str>) -> Result<LayerSizes, CliError> {
    let mut sizes = LayerSizes::unit();
    let Some(spec) = spec else { return Ok(sizes) };
    for pair in spec.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--sizes entry {pair:?} is not key=value")))?;
        let value: usize = value
            .trim()
            .parse()
            .map_err(|e| CliError::Usage(format!("--sizes entry {pair:?}: {e}")))?;
        let slot = match key.trim() {
            "na" => &mut sizes.na,
            "nb" => &mut sizes.nb,
            "n1c" => &mut sizes.n1c,
            "n2c" => &mut sizes.n2c,
            "n1d" => &mut sizes.n1d,
            "n2d" => &mut sizes.n2d,
            "nd" => &mut sizes.nd,
            "nd1" => &mut sizes.nd1,
            "nd2" => &mut sizes.nd2,
            "nl1" => &mut sizes.nl1,
            "nl2" => &mut sizes.nl2,
            other => return Err(CliError::Usage(format!("unknown layer size {other:?}"))),
        };
        *slot = value;
    }
    Ok(sizes)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<i32, CliError> {
    let variant = parse_variant(&a.variant)?;
    let sizes = parse_sizes(a.sizes.as_deref())?;
    let mut caps = Caps::default();
    if let Some(v) = a.cap_leakage {
        caps.leakage = v;
    }
    if let Some(v) = a.cap_codebook {
        caps.codebook = v;
    }
    let cfg = SchemeConfig { n: a.n, variant, sizes, delta: a.delta, caps };
    let j = read_joint(&a.channel)?;
    let report = run_experiment(&cfg, &j, a.codebooks, a.trials, a.seed)
        .map_err(|e| CliError::Input(format!("experiment: {e}")))?;
    let payload = json!({
        "command": "simulate",
        "config": {
            "channel": a.channel.display().to_string(),
            "scheme": serde_json::to_value(&cfg)
                .map_err(|e| CliError::Run(format!("serializing config: {e}")))?,
            "codebooks": a.codebooks,
            "trials": a.trials,
        },
        "seed": a.seed,
        "report": serde_json::to_value(&report)
            .map_err(|e| CliError::Run(format!("serializing report: {e}")))?,
    });
    emit(&payload, a.out.as_deref())?;
    Ok(0)
}

fn cmd_suite(a: &SuiteArgs) -> Result<i32, CliError> {
    let mut opts = suite::SuiteOptions::default();
    if let Some(seed) = a.seed {
        opts.seed = seed;
    }
    if a.shrink == 0 {
        return Err(CliError::Usage("--shrink must be at least 1".into()));
    }
    opts.shrink = a.shrink;

    let names: Vec<String> = if a.checks.is_empty() {
        suite::CHECK_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        a.checks.clone()
    };
    let mut checks = Vec::with_capacity(names.len());
    let mut verdict = Verdict::Pass;
    for name in &names {
        let report = suite::run_check(name, &opts).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown check {name:?}; valid names: {}",
                suite::CHECK_NAMES.join(", ")
            ))
        })?;
        verdict = match (verdict, report.verdict) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        };
        checks.push(report);
    }
    let payload = json!({
        "command": "suite",
        "config": {
            "checks": names,
            "shrink": opts.shrink,
        },
        "seed": opts.seed,
        "checks": serde_json::to_value(&checks)
            .map_err(|e| CliError::Run(format!("serializing reports: {e}")))?,
        "verdict": serde_json::to_value(verdict)
            .map_err(|e| CliError::Run(format!("serializing verdict: {e}")))?,
    });
    emit(&payload, a.out.as_deref())?;
    Ok(verdict_exit(verdict))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_size_overrides_apply_on_top_of_unit() {
        let s = parse_sizes(Some("na=4, n1c=2,n2c=2")).unwrap();
        assert_eq!((s.na, s.n1c, s.n2c), (4, 2, 2));
        assert_eq!((s.nb, s.nd, s.nl1), (1, 1, 1));
        assert!(parse_sizes(Some("bogus=2")).is_err());
        assert!(parse_sizes(Some("na2")).is_err());
    }

    #[test]
    fn variant_names_match_their_serialized_form() {
        for v in [Variant::Original, Variant::Simplified1, Variant::Simplified2] {
            assert_eq!(parse_variant(v.as_str()).unwrap(), v);
        }
        assert!(parse_variant("simplified3").is_err());
    }
}
