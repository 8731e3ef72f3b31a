//! Built-in constraint systems.
//!
//! Six *scheme* systems describe layered broadcast constructions through
//! their per-codebook rate constraints over bound split rates; six *region*
//! systems are two-dimensional descriptions the schemes project to. Preset
//! pairs that should agree after elimination are listed in [`fm_pairs`].
//!
//! Naming: `original` is the full construction (shared pad, per-user padded
//! segments, explicit randomization, double binning, pairwise covering);
//! `original-relaxed` weakens its randomization floor by letting each
//! user's padded message segment count as randomness for the other;
//! `simplified1` drops the shared pad; `simplified2` additionally drops the
//! explicit randomization symbol; `cloud-rx{i}` reduces `simplified2` to
//! plain superposition where receiver `i` decodes only the cloud layer
//! (its satellite collapses onto the cloud, `Vi = V = U`).

use super::{parse_constraint, ConstraintSystem, RateVar, SampleFamily};

pub const PRESET_IDS: [&str; 12] = [
    "scheme-original",
    "scheme-original-relaxed",
    "scheme-simplified1",
    "scheme-simplified2",
    "scheme-cloud-rx1",
    "scheme-cloud-rx2",
    "region-original",
    "region-simplified2",
    "region-cloud-rx1",
    "region-cloud-rx2",
    "region-cloud-rx1-sub",
    "region-cloud-rx2-sub",
];

/// Scheme/region pairs expected to describe the same rate region, with the
/// bound-variable elimination order that links them.
pub fn fm_pairs() -> Vec<(&'static str, &'static str, Vec<&'static str>)> {
    vec![
        (
            "scheme-original",
            "region-original",
            vec!["Ra", "Rb", "R1c", "R1d", "R2c", "R2d", "RD", "RD1", "RD2", "RL1", "RL2"],
        ),
        (
            "scheme-original-relaxed",
            "region-original",
            vec!["Ra", "Rb", "R1c", "R1d", "R2c", "R2d", "RD", "RD1", "RD2", "RL1", "RL2"],
        ),
        (
            "scheme-simplified1",
            "region-original",
            vec!["Ra", "R1c", "R1d", "R2c", "R2d", "RD", "RD1", "RD2", "RL1", "RL2"],
        ),
        (
            "scheme-simplified2",
            "region-simplified2",
            vec!["Ra", "R1c", "R1d", "R2c", "R2d", "RD1", "RD2", "RL1", "RL2"],
        ),
        ("scheme-cloud-rx1", "region-cloud-rx1", vec!["Ra", "R2d", "RD2"]),
        ("scheme-cloud-rx2", "region-cloud-rx2", vec!["Ra", "R1d", "RD1"]),
    ]
}

pub fn preset(id: &str) -> Option<ConstraintSystem> {
    Some(match id {
        "scheme-original" => scheme_original(),
        "scheme-original-relaxed" => scheme_original_relaxed(),
        "scheme-simplified1" => scheme_simplified1(),
        "scheme-simplified2" => scheme_simplified2(),
        "scheme-cloud-rx1" => scheme_cloud(1),
        "scheme-cloud-rx2" => scheme_cloud(2),
        "region-original" => region_original(),
        "region-simplified2" => region_simplified2(),
        "region-cloud-rx1" => region_cloud(1),
        "region-cloud-rx2" => region_cloud(2),
        "region-cloud-rx1-sub" => region_cloud_sub(1),
        "region-cloud-rx2-sub" => region_cloud_sub(2),
        _ => return None,
    })
}

fn make(
    name: &str,
    provenance: &str,
    free: &[&str],
    bound: &[&str],
    family: SampleFamily,
    rows: &[(&str, &str)],
) -> ConstraintSystem {
    ConstraintSystem {
        name: name.to_string(),
        provenance: format!("built-in preset: {provenance}"),
        free: free.iter().map(|s| RateVar::new(s)).collect(),
        bound: bound.iter().map(|s| RateVar::new(s)).collect(),
        constraints: rows
            .iter()
            .map(|(label, text)| {
                parse_constraint(label, text)
                    .unwrap_or_else(|e| panic!("preset {name}, row {label}: {e}"))
            })
            .collect(),
        family,
    }
}

fn nonneg(vars: &[&str]) -> Vec<(String, String)> {
    vars.iter().map(|v| (format!("nn-{v}"), format!("{v} >= 0"))).collect()
}

fn with_nonneg(rows: &[(&str, &str)], vars: &[&str]) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> =
        rows.iter().map(|(l, t)| (l.to_string(), t.to_string())).collect();
    out.extend(nonneg(vars));
    out
}

fn make_owned(
    name: &str,
    provenance: &str,
    free: &[&str],
    bound: &[&str],
    family: SampleFamily,
    rows: Vec<(String, String)>,
) -> ConstraintSystem {
    let refs: Vec<(&str, &str)> = rows.iter().map(|(l, t)| (l.as_str(), t.as_str())).collect();
    make(name, provenance, free, bound, family, &refs)
}

fn scheme_original() -> ConstraintSystem {
    let rows = [
        ("split-1", "R1 = Ra + Rb + R1c + R1d"),
        ("split-2", "R2 = Ra + Rb + R2c + R2d"),
        ("marton-cover", "RL1 + RL2 > I(V1;V2|V)"),
        ("y1-sum", "R1 + RD + RD1 + RL1 < I(U,V,V1;Y1)"),
        ("y1-sat", "R1 - Ra + RD + RD1 + RL1 < I(V,V1;Y1|U)"),
        ("y1-priv", "R1d + RD1 + RL1 < I(V1;Y1|V)"),
        ("y2-sum", "R2 + RD + RD2 + RL2 < I(U,V,V2;Y2)"),
        ("y2-sat", "R2 - Ra + RD + RD2 + RL2 < I(V,V2;Y2|U)"),
        ("y2-priv", "R2d + RD2 + RL2 < I(V2;Y2|V)"),
        ("leak-floor-1", "RD1 + RL1 >= I(V1;Z|V)"),
        ("leak-floor-2", "RD2 + RL2 >= I(V2;Z|V)"),
        ("pad-floor(a)", "Rb + RD >= I(V;Z|U)"),
        ("marton-cap", "RL1 + RL2 <= I(V1;Z|V) + I(V2;Z|V) - I(V1,V2;Z|V)"),
    ];
    let vars =
        ["R1", "Ra", "Rb", "R1c", "R1d", "R2", "R2c", "R2d", "RD", "RD1", "RD2", "RL1", "RL2"];
    make_owned(
        "scheme-original",
        "full layered construction",
        &["R1", "R2"],
        &["Ra", "Rb", "R1c", "R1d", "R2c", "R2d", "RD", "RD1", "RD2", "RL1", "RL2"],
        SampleFamily::Gated,
        with_nonneg(&rows, &vars),
    )
}

fn scheme_original_relaxed() -> ConstraintSystem {
    let rows = [
        ("split-1", "R1 = Ra + Rb + R1c + R1d"),
        ("split-2", "R2 = Ra + Rb + R2c + R2d"),
        ("marton-cover", "RL1 + RL2 > I(V1;V2|V)"),
        ("y1-sum", "R1 + RD + RD1 + RL1 < I(U,V,V1;Y1)"),
        ("y1-sat", "R1 - Ra + RD + RD1 + RL1 < I(V,V1;Y1|U)"),
        ("y1-priv", "R1d + RD1 + RL1 < I(V1;Y1|V)"),
        ("y2-sum", "R2 + RD + RD2 + RL2 < I(U,V,V2;Y2)"),
        ("y2-sat", "R2 - Ra + RD + RD2 + RL2 < I(V,V2;Y2|U)"),
        ("y2-priv", "R2d + RD2 + RL2 < I(V2;Y2|V)"),
        ("leak-floor-1", "RD1 + RL1 >= I(V1;Z|V)"),
        ("leak-floor-2", "RD2 + RL2 >= I(V2;Z|V)"),
        ("pad-floor-1(a)", "Rb + R1c + RD >= I(V;Z|U)"),
        ("pad-floor-2(b)", "Rb + R2c + RD >= I(V;Z|U)"),
        ("marton-cap", "RL1 + RL2 <= I(V1;Z|V) + I(V2;Z|V) - I(V1,V2;Z|V)"),
    ];
    let vars =
        ["R1", "Ra", "Rb", "R1c", "R1d", "R2", "R2c", "R2d", "RD", "RD1", "RD2", "RL1", "RL2"];
    make_owned(
        "scheme-original-relaxed",
        "full layered construction, randomization floor relaxed by padded message segments",
        &["R1", "R2"],
        &["Ra", "Rb", "R1c", "R1d", "R2c", "R2d", "RD", "RD1", "RD2", "RL1", "RL2"],
        SampleFamily::Gated,
        with_nonneg(&rows, &vars),
    )
}

fn scheme_simplified1() -> ConstraintSystem {
    let rows = [
        ("split-1", "R1 = Ra + R1c + R1d"),
        ("split-2", "R2 = Ra + R2c + R2d"),
        ("marton-cover", "RL1 + RL2 > I(V1;V2|V)"),
        ("y1-sum", "R1 + RD + RD1 + RL1 < I(U,V,V1;Y1)"),
        ("y1-sat", "R1 - Ra + RD + RD1 + RL1 < I(V,V1;Y1|U)"),
        ("y1-priv", "R1d + RD1 + RL1 < I(V1;Y1|V)"),
        ("y2-sum", "R2 + RD + RD2 + RL2 < I(U,V,V2;Y2)"),
        ("y2-sat", "R2 - Ra + RD + RD2 + RL2 < I(V,V2;Y2|U)"),
        ("y2-priv", "R2d + RD2 + RL2 < I(V2;Y2|V)"),
        ("leak-floor-1", "RD1 + RL1 >= I(V1;Z|V)"),
        ("leak-floor-2", "RD2 + RL2 >= I(V2;Z|V)"),
        ("pad-floor-1", "R1c + RD >= I(V;Z|U)"),
        ("pad-floor-2", "R2c + RD >= I(V;Z|U)"),
        ("marton-cap", "RL1 + RL2 <= I(V1;Z|V) + I(V2;Z|V) - I(V1,V2;Z|V)"),
    ];
    let vars = ["R1", "Ra", "R1c", "R1d", "R2", "R2c", "R2d", "RD", "RD1", "RD2", "RL1", "RL2"];
    make_owned(
        "scheme-simplified1",
        "layered construction without the shared pad",
        &["R1", "R2"],
        &["Ra", "R1c", "R1d", "R2c", "R2d", "RD", "RD1", "RD2", "RL1", "RL2"],
        SampleFamily::Gated,
        with_nonneg(&rows, &vars),
    )
}

fn scheme_simplified2() -> ConstraintSystem {
    let rows = [
        ("split-1", "R1 = Ra + R1c + R1d"),
        ("split-2", "R2 = Ra + R2c + R2d"),
        ("marton-cover(a)", "RL1 + RL2 > I(V1;V2|V)"),
        ("y1-sum", "R1 + RD1 + RL1 < I(U,V,V1;Y1)"),
        ("y1-sat(b)", "R1 - Ra + RD1 + RL1 < I(V,V1;Y1|U)"),
        ("y1-priv(c)", "R1d + RD1 + RL1 < I(V1;Y1|V)"),
        ("y2-sum", "R2 + RD2 + RL2 < I(U,V,V2;Y2)"),
        ("y2-sat(d)", "R2 - Ra + RD2 + RL2 < I(V,V2;Y2|U)"),
        ("y2-priv(e)", "R2d + RD2 + RL2 < I(V2;Y2|V)"),
        ("leak-floor-1(f)", "RD1 + RL1 >= I(V1;Z|V)"),
        ("leak-floor-2(g)", "RD2 + RL2 >= I(V2;Z|V)"),
        ("pad-floor-1(h)", "R1c >= I(V;Z|U)"),
        ("pad-floor-2(i)", "R2c >= I(V;Z|U)"),
        ("marton-cap(j)", "RL1 + RL2 <= I(V1;Z|V) + I(V2;Z|V) - I(V1,V2;Z|V)"),
    ];
    let vars = ["R1", "Ra", "R1c", "R1d", "R2", "R2c", "R2d", "RD1", "RD2", "RL1", "RL2"];
    make_owned(
        "scheme-simplified2",
        "layered construction without the shared pad or explicit randomization",
        &["R1", "R2"],
        &["Ra", "R1c", "R1d", "R2c", "R2d", "RD1", "RD2", "RL1", "RL2"],
        SampleFamily::Gated,
        with_nonneg(&rows, &vars),
    )
}

/// Superposition-only reduction: receiver `rx` decodes just the cloud, the
/// other receiver gets the single remaining satellite.
fn scheme_cloud(rx: usize) -> ConstraintSystem {
    let (i, o) = (rx.to_string(), if rx == 1 { "2" } else { "1" }.to_string());
    let rows = [
        (format!("split-{o}"), format!("R{o} = Ra + R{o}d")),
        (format!("split-{i}"), format!("R{i} = Ra")),
        (format!("y{o}-sum"), format!("R{o} + RD{o} < I(U,V{o};Y{o})")),
        (format!("y{o}-sat"), format!("R{o}d + RD{o} < I(V{o};Y{o}|U)")),
        (format!("y{i}-cloud"), format!("R{i} < I(U;Y{i})")),
        (format!("leak-floor-{o}"), format!("RD{o} >= I(V{o};Z|U)")),
    ];
    let mut all: Vec<(String, String)> = rows.to_vec();
    for v in [format!("R{o}"), "Ra".into(), format!("R{o}d"), format!("R{i}"), format!("RD{o}")] {
        all.push((format!("nn-{v}"), format!("{v} >= 0")));
    }
    make_owned(
        &format!("scheme-cloud-rx{rx}"),
        "superposition-only reduction: one cloud layer plus one satellite",
        &["R1", "R2"],
        &["Ra", &format!("R{o}d"), &format!("RD{o}")],
        SampleFamily::Collapsed { side: rx },
        all,
    )
}

fn region_original() -> ConstraintSystem {
    let rows = [
        ("r1-cap", "R1 < I(U;Y1) + I(V,V1;Y1|U) - I(V,V1;Z|U) + I(V;Z|U)"),
        ("r1-gap", "R1 - R2 < I(V,V1;Y1|U) - I(V,V1;Z|U)"),
        ("r2-cap", "R2 < I(U;Y2) + I(V,V2;Y2|U) - I(V,V2;Z|U) + I(V;Z|U)"),
        ("r2-gap", "R2 - R1 < I(V,V2;Y2|U) - I(V,V2;Z|U)"),
        ("marton-window(a)", "I(V1;V2|V) < I(V1;Z|V) + I(V2;Z|V) - I(V1,V2;Z|V)"),
        ("sat-adv-1(b)", "I(V,V1;Y1|U) > I(V,V1;Z|U)"),
        ("sat-adv-2(b)", "I(V,V2;Y2|U) > I(V,V2;Z|U)"),
        ("priv-adv-1(c)", "I(V1;Y1|V) > I(V1;Z|V)"),
        ("priv-adv-2(c)", "I(V2;Y2|V) > I(V2;Z|V)"),
    ];
    make_owned(
        "region-original",
        "projected region of the full layered construction",
        &["R1", "R2"],
        &[],
        SampleFamily::Gated,
        with_nonneg(&rows, &["R1", "R2"]),
    )
}

fn region_simplified2() -> ConstraintSystem {
    let rows = [
        ("r1-floor(a)", "R1 > I(V;Z|U)"),
        ("r1-cap(b)", "R1 < I(U;Y1) + I(V,V1;Y1|U) - I(V,V1;Z|U) + I(V;Z|U)"),
        ("r1-gap(c)", "R1 - R2 < I(V,V1;Y1|U) - I(V,V1;Z|U)"),
        ("r2-floor(d)", "R2 > I(V;Z|U)"),
        ("r2-cap(e)", "R2 < I(U;Y2) + I(V,V2;Y2|U) - I(V,V2;Z|U) + I(V;Z|U)"),
        ("r2-gap(f)", "R2 - R1 < I(V,V2;Y2|U) - I(V,V2;Z|U)"),
        ("marton-window(g)", "I(V1;V2|V) < I(V1;Z|V) + I(V2;Z|V) - I(V1,V2;Z|V)"),
        ("sat-adv-1(h)", "I(V,V1;Y1|U) > I(V,V1;Z|U)"),
        ("sat-adv-2(h)", "I(V,V2;Y2|U) > I(V,V2;Z|U)"),
        ("priv-adv-1(i)", "I(V1;Y1|V) > I(V1;Z|V)"),
        ("priv-adv-2(i)", "I(V2;Y2|V) > I(V2;Z|V)"),
    ];
    make_owned(
        "region-simplified2",
        "interior component of the pad-free construction's region",
        &["R1", "R2"],
        &[],
        SampleFamily::Gated,
        with_nonneg(&rows, &["R1", "R2"]),
    )
}

/// The axis component for receiver `rx`: the interior component's caps with
/// the floors and subject-to conditions dropped, evaluated on chains where
/// receiver `rx`'s satellite equals the cloud (`Vrx = V = U`).
fn region_cloud(rx: usize) -> ConstraintSystem {
    let rows = [
        ("r1-cap(b)", "R1 < I(U;Y1) + I(V,V1;Y1|U) - I(V,V1;Z|U) + I(V;Z|U)"),
        ("r1-gap(c)", "R1 - R2 < I(V,V1;Y1|U) - I(V,V1;Z|U)"),
        ("r2-cap(e)", "R2 < I(U;Y2) + I(V,V2;Y2|U) - I(V,V2;Z|U) + I(V;Z|U)"),
        ("r2-gap(f)", "R2 - R1 < I(V,V2;Y2|U) - I(V,V2;Z|U)"),
    ];
    make_owned(
        &format!("region-cloud-rx{rx}"),
        "axis component of the pad-free construction's region, collapsed-satellite form",
        &["R1", "R2"],
        &[],
        SampleFamily::Collapsed { side: rx },
        with_nonneg(&rows, &["R1", "R2"]),
    )
}

/// The axis component for receiver `rx` rewritten over an uncollapsed chain
/// by substituting the grouped pair `(V, Vother)` for the live satellite.
fn region_cloud_sub(rx: usize) -> ConstraintSystem {
    let (i, o) = (rx.to_string(), if rx == 1 { "2" } else { "1" }.to_string());
    let rows = vec![
        (
            format!("r{o}-cap(a)"),
            format!("R{o} < I(U;Y{o}) + I(V,V{o};Y{o}|U) - I(V,V{o};Z|U)"),
        ),
        (
            format!("r{o}-gap(b)"),
            format!("R{o} - R{i} < I(V,V{o};Y{o}|U) - I(V,V{o};Z|U)"),
        ),
        (format!("r{i}-cap(c)"), format!("R{i} < I(U;Y{i})")),
        (format!("order(d)"), format!("R{i} < R{o}")),
        ("nn-R1".to_string(), "R1 >= 0".to_string()),
        ("nn-R2".to_string(), "R2 >= 0".to_string()),
    ];
    make_owned(
        &format!("region-cloud-rx{rx}-sub"),
        "axis component of the pad-free construction's region, over the uncollapsed chain",
        &["R1", "R2"],
        &[],
        SampleFamily::Gated,
        rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fm::{eliminate, verify_certificates, FmOptions};
    use crate::algebra::{rat, InfoTerm, Relation};
    use crate::prob::Var;

    #[test]
    fn all_presets_build() {
        for id in PRESET_IDS {
            let sys = preset(id).unwrap();
            assert_eq!(sys.name, id);
            assert!(!sys.constraints.is_empty());
        }
        assert!(preset("region-bogus").is_none());
    }

    #[test]
    fn scheme_original_shape() {
        let s = preset("scheme-original").unwrap();
        assert_eq!(s.bound.len(), 11);
        assert_eq!(s.equalities().count(), 2);
        assert_eq!(s.constraints.len(), 2 + 11 + 13);
        assert_eq!(s.gates().count(), 0);
    }

    #[test]
    fn region_shapes() {
        let r = preset("region-original").unwrap();
        assert_eq!(r.gates().count(), 5);
        assert_eq!(r.rate_constraints().count(), 6); // 4 caps + 2 nonneg
        let r0 = preset("region-simplified2").unwrap();
        assert_eq!(r0.gates().count(), 5);
        assert_eq!(r0.rate_constraints().count(), 8); // 6 caps/floors + 2 nonneg
        for rx in [1, 2] {
            let rc = preset(&format!("region-cloud-rx{rx}")).unwrap();
            assert_eq!(rc.gates().count(), 0);
            assert_eq!(rc.constraints.len(), 6);
            assert_eq!(rc.family, SampleFamily::Collapsed { side: rx });
            let rs = preset(&format!("region-cloud-rx{rx}-sub")).unwrap();
            assert_eq!(rs.constraints.len(), 6);
            assert_eq!(rs.family, SampleFamily::Gated);
        }
    }

    #[test]
    fn fm_pair_orders_are_bound_vars() {
        for (scheme, region, order) in fm_pairs() {
            let s = preset(scheme).unwrap();
            let r = preset(region).unwrap();
            assert_eq!(r.bound.len(), 0);
            for v in &order {
                assert!(
                    s.bound.contains(&RateVar::new(v)),
                    "{scheme}: {v} not bound"
                );
            }
            assert_eq!(order.len(), s.bound.len(), "{scheme}: order must cover all bound vars");
        }
    }

    #[test]
    fn cloud_scheme_projects_to_expected_rows() {
        let s = preset("scheme-cloud-rx2").unwrap();
        let order: Vec<RateVar> =
            ["Ra", "R1d", "RD1"].iter().map(|v| RateVar::new(v)).collect();
        let out = eliminate(&s, &order, &FmOptions::default()).unwrap();
        verify_certificates(&out).unwrap();
        assert_eq!(out.system.constraints.len(), 8, "{:#?}", out.system.constraints);

        let r1 = RateVar::new("R1");
        let r2 = RateVar::new("R2");
        // Receiver 2 rides the cloud: R2 <= R1 appears with non-strict
        // relation (it comes from a non-negativity row).
        assert!(out.system.constraints.iter().any(|c| {
            c.rel == Relation::Le
                && c.expr.infos.is_empty()
                && c.expr.coef_of(&r1) == rat(-1, 1)
                && c.expr.coef_of(&r2) == rat(1, 1)
                && c.expr.constant == rat(0, 1)
        }));
        // Satellite cap with the leakage floor folded in.
        let want_pos = InfoTerm::new([Var::V1], [Var::Y1], [Var::U]).unwrap();
        let want_neg = InfoTerm::new([Var::V1], [Var::Z], [Var::U]).unwrap();
        assert!(out.system.constraints.iter().any(|c| {
            c.rel == Relation::Lt
                && c.expr.coef_of(&r1) == rat(1, 1)
                && c.expr.coef_of(&r2) == rat(-1, 1)
                && c.expr.infos.get(&want_pos) == Some(&rat(-1, 1))
                && c.expr.infos.get(&want_neg) == Some(&rat(1, 1))
        }));
    }

    #[test]
    fn pad_free_scheme_yields_pairwise_window_gate() {
        let s = preset("scheme-simplified2").unwrap();
        let order: Vec<RateVar> = s.bound.clone();
        let out = eliminate(&s, &order, &FmOptions::default()).unwrap();
        verify_certificates(&out).unwrap();
        let window = [
            (InfoTerm::new([Var::V1], [Var::V2], [Var::V]).unwrap(), rat(1, 1)),
            (InfoTerm::new([Var::V1], [Var::Z], [Var::V]).unwrap(), rat(-1, 1)),
            (InfoTerm::new([Var::V2], [Var::Z], [Var::V]).unwrap(), rat(-1, 1)),
            (
                InfoTerm::new([Var::V1, Var::V2], [Var::Z], [Var::V]).unwrap(),
                rat(1, 1),
            ),
        ];
        assert!(
            out.system.constraints.iter().any(|c| {
                c.is_gate()
                    && c.rel == Relation::Lt
                    && c.expr.infos.len() == 4
                    && window.iter().all(|(t, coef)| c.expr.infos.get(t) == Some(coef))
            }),
            "pairwise covering window gate missing from projection"
        );
    }
}
