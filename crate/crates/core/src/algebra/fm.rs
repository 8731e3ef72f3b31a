//! Fourier–Motzkin elimination over exact rationals, with nonnegative
//! combination certificates.
//!
//! Information terms are carried as opaque symbols: they are never expanded
//! through entropy identities, so every output row is a consequence of the
//! input rows alone and each one comes with multipliers proving it.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::{AlgebraError, Constraint, ConstraintSystem, LinearExpr, Rat, RateVar, Relation};

/// Elimination limits. `cap` bounds the working row count after each
/// elimination round; the environment variable `SECRECY_REGIONS_FM_CAP`
/// overrides it for callers that opt in via [`FmOptions::from_env`].
#[derive(Debug, Clone)]
pub struct FmOptions {
    pub cap: usize,
}

impl Default for FmOptions {
    fn default() -> Self {
        FmOptions { cap: 10_000 }
    }
}

impl FmOptions {
    pub fn from_env() -> Self {
        let mut opts = FmOptions::default();
        if let Ok(v) = std::env::var("SECRECY_REGIONS_FM_CAP") {
            if let Ok(cap) = v.trim().parse::<usize>() {
                if cap > 0 {
                    opts.cap = cap;
                }
            }
        }
        opts
    }
}

/// One inequality of the post-substitution base system, oriented as
/// `expr < 0` (strict) or `expr <= 0`.
#[derive(Debug, Clone)]
pub struct BaseRow {
    pub label: String,
    pub expr: LinearExpr,
    pub strict: bool,
}

/// Result of an elimination: the projected system, the base it was derived
/// from, and one multiplier vector per output constraint.
#[derive(Debug)]
pub struct FmOutcome {
    pub system: ConstraintSystem,
    pub base: Vec<BaseRow>,
    /// Equalities folded away before elimination, as `var = expr`.
    pub substitutions: Vec<(RateVar, LinearExpr)>,
    /// `certificates[i]` lists `(base_index, multiplier >= 0)` pairs whose
    /// combination reproduces `system.constraints[i]` exactly.
    pub certificates: Vec<Vec<(usize, Rat)>>,
}

#[derive(Debug, Clone)]
struct WorkRow {
    expr: LinearExpr,
    strict: bool,
    cert: Vec<(usize, Rat)>,
}

impl WorkRow {
    fn rescale(&mut self, s: &Rat) {
        self.expr = self.expr.scaled(s);
        for (_, m) in &mut self.cert {
            *m *= s;
        }
    }
}

/// Eliminates every bound variable, in the system's declared order.
pub fn project_to_free(sys: &ConstraintSystem, opts: &FmOptions) -> Result<FmOutcome, AlgebraError> {
    let order = sys.bound.clone();
    eliminate(sys, &order, opts)
}

/// Eliminates `order` (a subset of the bound variables) from the system.
///
/// Equalities are folded first: each is solved for its first
/// elimination-order variable and substituted everywhere; an equality
/// mentioning none of them is split into a `<=`/`>=` pair and kept.
pub fn eliminate(
    sys: &ConstraintSystem,
    order: &[RateVar],
    opts: &FmOptions,
) -> Result<FmOutcome, AlgebraError> {
    for v in order {
        if !sys.bound.contains(v) {
            return Err(AlgebraError::NotBound(v.0.clone()));
        }
    }

    // Orient everything as `expr (<|<=) 0`; collect equalities separately.
    let mut rows: Vec<(String, LinearExpr, bool)> = Vec::new();
    let mut equalities: Vec<(String, LinearExpr)> = Vec::new();
    for c in &sys.constraints {
        match c.rel {
            Relation::Lt => rows.push((c.label.clone(), c.expr.clone(), true)),
            Relation::Le => rows.push((c.label.clone(), c.expr.clone(), false)),
            Relation::Gt => rows.push((c.label.clone(), c.expr.scaled(&-Rat::one()), true)),
            Relation::Ge => rows.push((c.label.clone(), c.expr.scaled(&-Rat::one()), false)),
            Relation::Eq => equalities.push((c.label.clone(), c.expr.clone())),
        }
    }

    // Fold equalities into the inequality rows.
    let mut substitutions: Vec<(RateVar, LinearExpr)> = Vec::new();
    let mut remaining: Vec<RateVar> = order.to_vec();
    while let Some((label, eq)) = equalities.first().cloned() {
        equalities.remove(0);
        let solve = remaining.iter().find(|v| !eq.coef_of(v).is_zero()).cloned();
        let Some(v) = solve else {
            // No eliminated variable involved: keep as a two-sided pair.
            rows.push((format!("{label}<="), eq.clone(), false));
            rows.push((format!("{label}>="), eq.scaled(&-Rat::one()), false));
            continue;
        };
        let coef = eq.coef_of(&v);
        // v = -(eq - coef*v)/coef
        let mut rest = eq.clone();
        rest.add_rate(v.clone(), -coef.clone());
        let solution = rest.scaled(&(-coef.recip()));
        for (_, expr, _) in &mut rows {
            substitute(expr, &v, &solution);
        }
        for (_, e) in &mut equalities {
            substitute(e, &v, &solution);
        }
        remaining.retain(|r| r != &v);
        substitutions.push((v, solution));
    }

    // The base system certificates refer to.
    let base: Vec<BaseRow> = rows
        .iter()
        .map(|(label, expr, strict)| BaseRow {
            label: label.clone(),
            expr: expr.clone(),
            strict: *strict,
        })
        .collect();

    let mut work: Vec<WorkRow> = base
        .iter()
        .enumerate()
        .map(|(i, r)| WorkRow {
            expr: r.expr.clone(),
            strict: r.strict,
            cert: vec![(i, Rat::one())],
        })
        .collect();
    work.retain(|r| !trivially_true(r));

    for v in &remaining {
        let mut kept: Vec<WorkRow> = Vec::new();
        let mut uppers: Vec<WorkRow> = Vec::new();
        let mut lowers: Vec<WorkRow> = Vec::new();
        for r in work.drain(..) {
            let c = r.expr.coef_of(v);
            if c.is_zero() {
                kept.push(r);
            } else if c.is_positive() {
                uppers.push(r); // c*v + rest <= 0: upper bound on v
            } else {
                lowers.push(r);
            }
        }
        for u in &uppers {
            for l in &lowers {
                let cu = u.expr.coef_of(v);
                let cl = l.expr.coef_of(v);
                // cu > 0 > cl; multipliers (-cl) and cu cancel v exactly.
                let mut expr = u.expr.scaled(&-cl.clone());
                expr.add_scaled(&l.expr, &cu);
                debug_assert!(expr.coef_of(v).is_zero());
                let mut cert = scale_cert(&u.cert, &-cl.clone());
                merge_cert(&mut cert, &scale_cert(&l.cert, &cu));
                let row = WorkRow { expr, strict: u.strict || l.strict, cert };
                if !trivially_true(&row) {
                    kept.push(row);
                }
            }
        }
        work = canonicalize(kept);
        if work.len() > opts.cap {
            return Err(AlgebraError::CapExceeded {
                var: v.0.clone(),
                count: work.len(),
                cap: opts.cap,
            });
        }
    }
    work = canonicalize(work);

    // Solved equality variables are always elimination-order variables, so
    // removing `order` covers them too.
    let bound: Vec<RateVar> = sys
        .bound
        .iter()
        .filter(|v| !order.contains(v))
        .cloned()
        .collect();

    let mut constraints = Vec::with_capacity(work.len());
    let mut certificates = Vec::with_capacity(work.len());
    for (i, r) in work.iter().enumerate() {
        constraints.push(Constraint {
            label: format!("d{i}"),
            expr: r.expr.clone(),
            rel: if r.strict { Relation::Lt } else { Relation::Le },
        });
        certificates.push(r.cert.clone());
    }

    let order_names: Vec<&str> = order.iter().map(|v| v.0.as_str()).collect();
    let system = ConstraintSystem {
        name: format!("{}/proj", sys.name),
        provenance: format!("eliminated [{}] from {}", order_names.join(","), sys.name),
        free: sys.free.clone(),
        bound,
        constraints,
        family: sys.family,
    };
    Ok(FmOutcome { system, base, substitutions, certificates })
}

fn substitute(expr: &mut LinearExpr, v: &RateVar, solution: &LinearExpr) {
    let c = expr.coef_of(v);
    if c.is_zero() {
        return;
    }
    expr.add_rate(v.clone(), -c.clone());
    expr.add_scaled(solution, &c);
}

fn scale_cert(cert: &[(usize, Rat)], s: &Rat) -> Vec<(usize, Rat)> {
    cert.iter().map(|(i, m)| (*i, m * s)).collect()
}

fn merge_cert(into: &mut Vec<(usize, Rat)>, from: &[(usize, Rat)]) {
    let mut map: BTreeMap<usize, Rat> = into.drain(..).collect();
    for (i, m) in from {
        let slot = map.entry(*i).or_insert_with(Rat::zero);
        *slot += m;
    }
    into.extend(map.into_iter().filter(|(_, m)| !m.is_zero()));
}

/// A row with no variables and no information terms holds outright iff its
/// constant satisfies the relation; such rows carry no content.
fn trivially_true(r: &WorkRow) -> bool {
    if r.expr.has_rates() || !r.expr.infos.is_empty() {
        return false;
    }
    if r.strict {
        r.expr.constant.is_negative()
    } else {
        !r.expr.constant.is_positive()
    }
}

/// Positive-rescales every row to a canonical leading coefficient, drops
/// exact duplicates, and keeps only the tightest row among those sharing
/// the same variable and information parts.
fn canonicalize(rows: Vec<WorkRow>) -> Vec<WorkRow> {
    let mut scaled: Vec<WorkRow> = rows
        .into_iter()
        .map(|mut r| {
            let s = r.expr.canonical_scale();
            if !s.is_one() {
                r.rescale(&s);
            }
            r
        })
        .collect();

    // Group rows by everything except the constant; the tightest bound wins:
    // larger constant dominates, strict beats non-strict at equal constants.
    let mut best: BTreeMap<(Vec<(RateVar, Rat)>, Vec<(super::InfoTerm, Rat)>), usize> =
        BTreeMap::new();
    let mut keep: Vec<Option<WorkRow>> = Vec::with_capacity(scaled.len());
    for r in scaled.drain(..) {
        let key = (
            r.expr.rates.iter().map(|(k, v)| (k.clone(), v.clone())).collect::<Vec<_>>(),
            r.expr.infos.iter().map(|(k, v)| (k.clone(), v.clone())).collect::<Vec<_>>(),
        );
        match best.get(&key) {
            None => {
                best.insert(key, keep.len());
                keep.push(Some(r));
            }
            Some(&at) => {
                let cur = keep[at].as_ref().unwrap();
                let tighter = match r.expr.constant.cmp(&cur.expr.constant) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Equal => r.strict && !cur.strict,
                    std::cmp::Ordering::Less => false,
                };
                if tighter {
                    keep[at] = Some(r);
                }
            }
        }
    }
    keep.into_iter().flatten().collect()
}

/// Recomputes every output constraint from its certificate against the base
/// system: multipliers must be nonnegative, the combination must reproduce
/// the expression exactly, and strictness must match the strict-parent rule.
pub fn verify_certificates(out: &FmOutcome) -> Result<(), AlgebraError> {
    for (i, c) in out.system.constraints.iter().enumerate() {
        let cert = &out.certificates[i];
        let mut acc = LinearExpr::zero();
        let mut strict = false;
        for (j, m) in cert {
            if m.is_negative() {
                return Err(AlgebraError::CertificateMismatch { index: i });
            }
            if m.is_zero() {
                continue;
            }
            let row = out
                .base
                .get(*j)
                .ok_or(AlgebraError::CertificateMismatch { index: i })?;
            acc.add_scaled(&row.expr, m);
            strict |= row.strict;
        }
        let want_strict = c.rel == Relation::Lt;
        if acc != c.expr || strict != want_strict {
            return Err(AlgebraError::CertificateMismatch { index: i });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_constraint, SampleFamily};

    fn sys(free: &[&str], bound: &[&str], cons: &[(&str, &str)]) -> ConstraintSystem {
        ConstraintSystem {
            name: "test".into(),
            provenance: "unit test".into(),
            free: free.iter().map(|s| RateVar::new(s)).collect(),
            bound: bound.iter().map(|s| RateVar::new(s)).collect(),
            constraints: cons
                .iter()
                .map(|(l, t)| parse_constraint(l, t).unwrap())
                .collect(),
            family: SampleFamily::Gated,
        }
    }

    fn texts(out: &FmOutcome) -> Vec<String> {
        out.system.constraints.iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn one_variable_shadow() {
        let s = sys(
            &["R1", "R2"],
            &["Rx"],
            &[
                ("ub", "Rx <= R1"),
                ("lb", "R2 <= Rx"),
                ("nonneg", "0 <= Rx"),
            ],
        );
        let out = eliminate(&s, &[RateVar::new("Rx")], &FmOptions::default()).unwrap();
        // Shadow: R2 <= R1 and 0 <= R1.
        assert_eq!(out.system.constraints.len(), 2);
        verify_certificates(&out).unwrap();
        let mut want_hit = [false, false];
        for c in &out.system.constraints {
            assert_eq!(c.rel, Relation::Le);
            let r1 = c.expr.coef_of(&RateVar::new("R1"));
            let r2 = c.expr.coef_of(&RateVar::new("R2"));
            if r2.is_zero() {
                assert_eq!(r1, crate::algebra::rat(-1, 1));
                want_hit[0] = true;
            } else {
                assert_eq!(r1, crate::algebra::rat(-1, 1));
                assert_eq!(r2, crate::algebra::rat(1, 1));
                want_hit[1] = true;
            }
        }
        assert!(want_hit.iter().all(|b| *b), "{:?}", texts(&out));
    }

    #[test]
    fn strictness_propagates_through_combination() {
        let s = sys(
            &["R1", "R2"],
            &["Rx"],
            &[("ub", "Rx < R1"), ("lb", "R2 <= Rx")],
        );
        let out = eliminate(&s, &[RateVar::new("Rx")], &FmOptions::default()).unwrap();
        assert_eq!(out.system.constraints.len(), 1);
        assert_eq!(out.system.constraints[0].rel, Relation::Lt);
        verify_certificates(&out).unwrap();
    }

    #[test]
    fn equalities_fold_before_elimination() {
        let s = sys(
            &["R1", "R2"],
            &["Rx", "Ry"],
            &[
                ("split", "Rx = R1 + R2"),
                ("cap", "Rx + Ry <= 1"),
                ("nn", "0 <= Ry"),
            ],
        );
        let out = eliminate(
            &s,
            &[RateVar::new("Rx"), RateVar::new("Ry")],
            &FmOptions::default(),
        )
        .unwrap();
        assert_eq!(out.substitutions.len(), 1);
        assert_eq!(out.substitutions[0].0, RateVar::new("Rx"));
        // After Rx := R1+R2 and eliminating Ry: R1 + R2 <= 1.
        assert_eq!(out.system.constraints.len(), 1);
        let c = &out.system.constraints[0];
        assert_eq!(c.expr.coef_of(&RateVar::new("R1")), crate::algebra::rat(1, 1));
        assert_eq!(c.expr.coef_of(&RateVar::new("R2")), crate::algebra::rat(1, 1));
        assert_eq!(c.expr.constant, crate::algebra::rat(-1, 1));
        verify_certificates(&out).unwrap();
    }

    #[test]
    fn looser_parallel_row_is_dominated() {
        let s = sys(
            &["R1", "R2"],
            &["Rx"],
            &[
                ("tight", "Rx <= R1"),
                ("loose", "Rx <= R1 + 1"),
                ("nn", "0 <= Rx"),
            ],
        );
        let out = eliminate(&s, &[RateVar::new("Rx")], &FmOptions::default()).unwrap();
        // Only -R1 <= 0 survives; -R1 - 1 <= 0 is weaker.
        assert_eq!(out.system.constraints.len(), 1, "{:?}", texts(&out));
        assert!(out.system.constraints[0].expr.constant.is_zero());
        verify_certificates(&out).unwrap();
    }

    #[test]
    fn info_only_rows_become_gates() {
        let s = sys(
            &["R1", "R2"],
            &["Rx"],
            &[
                ("ub", "Rx <= I(U;Y1)"),
                ("lb", "I(U;Y2) <= Rx"),
            ],
        );
        let out = eliminate(&s, &[RateVar::new("Rx")], &FmOptions::default()).unwrap();
        assert_eq!(out.system.constraints.len(), 1);
        assert!(out.system.constraints[0].is_gate());
        verify_certificates(&out).unwrap();
    }

    #[test]
    fn cap_is_enforced() {
        // 6 uppers x 6 lowers = 36 combinations > cap 10.
        let mut cons: Vec<(String, String)> = Vec::new();
        for i in 0..6 {
            cons.push((format!("u{i}"), format!("Rx <= {i} R1 + {} R2", i + 1)));
            cons.push((format!("l{i}"), format!("{i} R2 - {} R1 <= Rx", i + 2)));
        }
        let refs: Vec<(&str, &str)> =
            cons.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let s = sys(&["R1", "R2"], &["Rx"], &refs);
        let err = eliminate(&s, &[RateVar::new("Rx")], &FmOptions { cap: 10 }).unwrap_err();
        assert!(matches!(err, AlgebraError::CapExceeded { .. }));
    }

    #[test]
    fn tampered_certificate_fails_verification() {
        let s = sys(&["R1", "R2"], &["Rx"], &[("ub", "Rx <= R1"), ("lb", "0 <= Rx")]);
        let mut out = eliminate(&s, &[RateVar::new("Rx")], &FmOptions::default()).unwrap();
        verify_certificates(&out).unwrap();
        out.certificates[0][0].1 += crate::algebra::rat(1, 3);
        assert!(verify_certificates(&out).is_err());
    }
}
