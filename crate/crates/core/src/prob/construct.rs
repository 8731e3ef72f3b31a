//! Distribution constructions used by the region-recovery and convexity
//! arguments: collapsing the auxiliary chain onto one satellite, and
//! time-sharing two chains through a hidden binary selector.
//!
//! Both constructions return ordinary eight-variable [`Joint`]s: the extra
//! structure (pairings, the selector) is folded into product alphabets so
//! every downstream operation keeps working unchanged.

use super::{Alphabet, Factor, Joint, ProbError, Var};

/// Which satellite the substitution keeps informative.
///
/// `Collapse2` sets `U' = V' = V2' = U` and `V1' = (V, V1)`; `Collapse1` is
/// the mirror image. The channel input behaviour is preserved: the composed
/// `p(x | v1', v2')` marginalizes the dropped satellite, so the distribution
/// of `(X, Y1, Y2, Z)` is untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollapseMode {
    Collapse1,
    Collapse2,
}

/// Rebuilds `j` with the auxiliaries of one side collapsed onto `U`.
pub fn substitute_aux(j: &Joint, mode: CollapseMode) -> Result<Joint, ProbError> {
    let ku = j.size_of(Var::U);
    let kv = j.size_of(Var::V);
    let k1 = j.size_of(Var::V1);
    let k2 = j.size_of(Var::V2);
    let kx = j.size_of(Var::X);

    // Single-letter tables of the source chain.
    let f_u = &j.factors[0];
    let f_v = &j.factors[1];
    let f_pair = &j.factors[2];
    let f_x = &j.factors[3];

    // Marginal of the kept satellite given V, and the conditional of the
    // dropped one given (V, kept).
    let (kept_size, dropped_size) = match mode {
        CollapseMode::Collapse2 => (k1, k2),
        CollapseMode::Collapse1 => (k2, k1),
    };
    let pair_prob = |v: usize, v1: usize, v2: usize| f_pair.prob(v, v1 * k2 + v2);
    let kept_given_v = |v: usize, kept: usize| -> f64 {
        (0..dropped_size)
            .map(|d| match mode {
                CollapseMode::Collapse2 => pair_prob(v, kept, d),
                CollapseMode::Collapse1 => pair_prob(v, d, kept),
            })
            .sum()
    };

    // New alphabets: the composite carries (V, kept-satellite).
    let comp_size = kv * kept_size;
    let mut alphabets = j.alphabets.clone();
    alphabets[Var::U.index()] = Alphabet::atomic(ku);
    alphabets[Var::V.index()] = Alphabet::atomic(ku);
    match mode {
        CollapseMode::Collapse2 => {
            alphabets[Var::V1.index()] = Alphabet::product(vec![kv, kept_size]);
            alphabets[Var::V2.index()] = Alphabet::atomic(ku);
        }
        CollapseMode::Collapse1 => {
            alphabets[Var::V1.index()] = Alphabet::atomic(ku);
            alphabets[Var::V2.index()] = Alphabet::product(vec![kv, kept_size]);
        }
    }

    let p_u = Factor::new(vec![Var::U], vec![], vec![ku], vec![], f_u.table.clone());
    let mut ident = vec![0.0; ku * ku];
    for u in 0..ku {
        ident[u * ku + u] = 1.0;
    }
    let p_v = Factor::new(vec![Var::V], vec![Var::U], vec![ku], vec![ku], ident);

    // p(v1', v2' | v' = u): composite = (v, kept) with law p(v, kept | u),
    // plain side pinned to u.
    let (s1, s2) = match mode {
        CollapseMode::Collapse2 => (comp_size, ku),
        CollapseMode::Collapse1 => (ku, comp_size),
    };
    let mut pair_table = vec![0.0; ku * s1 * s2];
    for u in 0..ku {
        for v in 0..kv {
            for kept in 0..kept_size {
                let mass = f_v.prob(u, v) * kept_given_v(v, kept);
                let comp = v * kept_size + kept;
                let (a, b) = match mode {
                    CollapseMode::Collapse2 => (comp, u),
                    CollapseMode::Collapse1 => (u, comp),
                };
                pair_table[u * s1 * s2 + a * s2 + b] = mass;
            }
        }
    }
    let p_pair = Factor::new(
        vec![Var::V1, Var::V2],
        vec![Var::V],
        vec![s1, s2],
        vec![ku],
        pair_table,
    );

    // p(x | composite, pinned) = sum over the dropped satellite. The value
    // does not depend on the pinned coordinate, so every row is filled.
    let mut x_table = vec![0.0; s1 * s2 * kx];
    for a in 0..s1 {
        for b in 0..s2 {
            let comp = match mode {
                CollapseMode::Collapse2 => a,
                CollapseMode::Collapse1 => b,
            };
            let v = comp / kept_size;
            let kept = comp % kept_size;
            let norm = kept_given_v(v, kept);
            for x in 0..kx {
                let p = if norm > 0.0 {
                    (0..dropped_size)
                        .map(|d| {
                            let (v1, v2) = match mode {
                                CollapseMode::Collapse2 => (kept, d),
                                CollapseMode::Collapse1 => (d, kept),
                            };
                            let w = match mode {
                                CollapseMode::Collapse2 => pair_prob(v, kept, d),
                                CollapseMode::Collapse1 => pair_prob(v, d, kept),
                            };
                            (w / norm) * f_x.prob(v1 * k2 + v2, x)
                        })
                        .sum()
                } else {
                    1.0 / kx as f64
                };
                x_table[(a * s2 + b) * kx + x] = p;
            }
        }
    }
    let p_x = Factor::new(vec![Var::X], vec![Var::V1, Var::V2], vec![kx], vec![s1, s2], x_table);

    Joint::build(
        alphabets,
        vec![p_u, p_v, p_pair, p_x, j.factors[4].clone()],
    )
}

/// Time-shares two chains through a hidden binary selector `Q` with
/// `P(Q = first branch) = gamma`, folding `Q` into every auxiliary:
/// `U' = (U,Q)`, `V' = (V,Q)`, `Vi' = (Vi,Q)`. Requires both branches to
/// share the `X, Y1, Y2, Z` alphabets and the channel law.
pub fn timeshare_mix(ja: &Joint, jb: &Joint, gamma: f64) -> Result<Joint, ProbError> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(ProbError::BadMixtureWeight(gamma));
    }
    for v in [Var::X, Var::Y1, Var::Y2, Var::Z] {
        if ja.size_of(v) != jb.size_of(v) {
            return Err(ProbError::AlphabetMismatch(v));
        }
    }
    let dev = ja.factors[4]
        .table
        .iter()
        .zip(&jb.factors[4].table)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if dev > super::MASS_TOL {
        return Err(ProbError::ChannelMismatch(dev));
    }

    let kx = ja.size_of(Var::X);
    let mu = ja.size_of(Var::U).max(jb.size_of(Var::U));
    let mv = ja.size_of(Var::V).max(jb.size_of(Var::V));
    let m1 = ja.size_of(Var::V1).max(jb.size_of(Var::V1));
    let m2 = ja.size_of(Var::V2).max(jb.size_of(Var::V2));

    // Component index = base * 2 + q, q = 0 for the gamma branch.
    let branch = |q: usize| if q == 0 { ja } else { jb };
    let weight = |q: usize| if q == 0 { gamma } else { 1.0 - gamma };
    let in_range = |q: usize, v: Var, s: usize| s < branch(q).size_of(v);

    let mut u_table = vec![0.0; mu * 2];
    for q in 0..2 {
        for u in 0..mu {
            if in_range(q, Var::U, u) {
                u_table[u * 2 + q] = weight(q) * branch(q).factors[0].prob(0, u);
            }
        }
    }
    let p_u = Factor::new(vec![Var::U], vec![], vec![mu * 2], vec![], u_table);

    let mut v_table = vec![0.0; (mu * 2) * (mv * 2)];
    for q in 0..2 {
        for u in 0..mu {
            let row = u * 2 + q;
            if !in_range(q, Var::U, u) || weight(q) == 0.0 {
                // Unreachable row; any valid distribution works.
                for col in 0..mv * 2 {
                    v_table[row * (mv * 2) + col] = 1.0 / (mv * 2) as f64;
                }
                continue;
            }
            for v in 0..mv {
                if in_range(q, Var::V, v) {
                    v_table[row * (mv * 2) + v * 2 + q] = branch(q).factors[1].prob(u, v);
                }
            }
        }
    }
    let p_v = Factor::new(vec![Var::V], vec![Var::U], vec![mv * 2], vec![mu * 2], v_table);

    let (s1, s2) = (m1 * 2, m2 * 2);
    let mut pair_table = vec![0.0; (mv * 2) * s1 * s2];
    for q in 0..2 {
        for v in 0..mv {
            let row = v * 2 + q;
            if !in_range(q, Var::V, v) || weight(q) == 0.0 {
                for col in 0..s1 * s2 {
                    pair_table[row * s1 * s2 + col] = 1.0 / (s1 * s2) as f64;
                }
                continue;
            }
            let b = branch(q);
            let k2b = b.size_of(Var::V2);
            for v1 in 0..m1 {
                for v2 in 0..m2 {
                    if in_range(q, Var::V1, v1) && in_range(q, Var::V2, v2) {
                        pair_table[row * s1 * s2 + (v1 * 2 + q) * s2 + (v2 * 2 + q)] =
                            b.factors[2].prob(v, v1 * k2b + v2);
                    }
                }
            }
        }
    }
    let p_pair = Factor::new(
        vec![Var::V1, Var::V2],
        vec![Var::V],
        vec![s1, s2],
        vec![mv * 2],
        pair_table,
    );

    let mut x_table = vec![0.0; s1 * s2 * kx];
    for a in 0..s1 {
        for b_idx in 0..s2 {
            let (v1, q1) = (a / 2, a % 2);
            let (v2, q2) = (b_idx / 2, b_idx % 2);
            let row = a * s2 + b_idx;
            if q1 == q2 && in_range(q1, Var::V1, v1) && in_range(q1, Var::V2, v2) {
                let b = branch(q1);
                let k2b = b.size_of(Var::V2);
                for x in 0..kx {
                    x_table[row * kx + x] = b.factors[3].prob(v1 * k2b + v2, x);
                }
            } else {
                for x in 0..kx {
                    x_table[row * kx + x] = 1.0 / kx as f64;
                }
            }
        }
    }
    let p_x = Factor::new(vec![Var::X], vec![Var::V1, Var::V2], vec![kx], vec![s1, s2], x_table);

    let mut alphabets = ja.alphabets.clone();
    alphabets[Var::U.index()] = Alphabet::product(vec![mu, 2]);
    alphabets[Var::V.index()] = Alphabet::product(vec![mv, 2]);
    alphabets[Var::V1.index()] = Alphabet::product(vec![m1, 2]);
    alphabets[Var::V2.index()] = Alphabet::product(vec![m2, 2]);

    Joint::build(
        alphabets,
        vec![p_u, p_v, p_pair, p_x, ja.factors[4].clone()],
    )
}

/// One conditional-information term `I(a; b | c)`.
#[derive(Debug, Clone, Copy)]
pub struct TermSpec {
    pub name: &'static str,
    pub a: &'static [Var],
    pub b: &'static [Var],
    pub c: &'static [Var],
}

impl TermSpec {
    pub fn eval(&self, j: &Joint) -> f64 {
        j.cond_mutual_info(self.a, self.b, self.c)
            .expect("term sets are disjoint")
    }
}

/// The nine information terms whose values combine linearly under
/// time-sharing (given a common output marginal for the unconditional
/// `I(U;Y1)` entry, which the collapse construction guarantees).
pub const MIX_TERMS: [TermSpec; 9] = [
    TermSpec { name: "I(V;Z|U)", a: &[Var::V], b: &[Var::Z], c: &[Var::U] },
    TermSpec { name: "I(U;Y1)", a: &[Var::U], b: &[Var::Y1], c: &[] },
    TermSpec { name: "I(V,V1;Y1|U)", a: &[Var::V, Var::V1], b: &[Var::Y1], c: &[Var::U] },
    TermSpec { name: "I(V,V2;Y2|U)", a: &[Var::V, Var::V2], b: &[Var::Y2], c: &[Var::U] },
    TermSpec { name: "I(V1;Z|V)", a: &[Var::V1], b: &[Var::Z], c: &[Var::V] },
    TermSpec { name: "I(V2;Z|V)", a: &[Var::V2], b: &[Var::Z], c: &[Var::V] },
    TermSpec { name: "I(V1;V2|V)", a: &[Var::V1], b: &[Var::V2], c: &[Var::V] },
    TermSpec { name: "I(V1;Y1|V)", a: &[Var::V1], b: &[Var::Y1], c: &[Var::V] },
    TermSpec { name: "I(V2;Y2|V)", a: &[Var::V2], b: &[Var::Y2], c: &[Var::V] },
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::sample::{random_gated_joint, random_joint, seeded, SampleOpts};

    #[test]
    fn collapse2_zeroes_the_plain_side() {
        let mut rng = seeded(0xc011_0001);
        for _ in 0..20 {
            let j = random_joint(&mut rng, 2);
            let c = substitute_aux(&j, CollapseMode::Collapse2).unwrap();
            let z1 = c
                .cond_mutual_info(&[Var::V, Var::V2], &[Var::Y2], &[Var::U])
                .unwrap();
            let z2 = c.cond_mutual_info(&[Var::V], &[Var::Z], &[Var::U]).unwrap();
            assert!(z1 <= 1e-12, "I(V,V2;Y2|U) = {z1}");
            assert!(z2 <= 1e-12, "I(V;Z|U) = {z2}");
        }
    }

    #[test]
    fn collapse_preserves_composite_terms_and_channel_output() {
        let mut rng = seeded(0xc011_0002);
        for _ in 0..20 {
            let j = random_joint(&mut rng, 2);
            let c = substitute_aux(&j, CollapseMode::Collapse2).unwrap();
            let before = j
                .cond_mutual_info(&[Var::V, Var::V1], &[Var::Y1], &[Var::U])
                .unwrap();
            let after = c
                .cond_mutual_info(&[Var::V, Var::V1], &[Var::Y1], &[Var::U])
                .unwrap();
            assert!((before - after).abs() <= 1e-9);
            // (X, Y1, Y2, Z) marginal untouched.
            let ma = j.marginal(&[Var::X, Var::Y1, Var::Y2, Var::Z]);
            let mb = c.marginal(&[Var::X, Var::Y1, Var::Y2, Var::Z]);
            for (a, b) in ma.p.iter().zip(&mb.p) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn collapse_of_collapsed_chain_is_relabeling() {
        let mut rng = seeded(0xc011_0003);
        let j = crate::prob::sample::random_collapsed_joint(&mut rng, 2, 2);
        let c = substitute_aux(&j, CollapseMode::Collapse2).unwrap();
        for t in MIX_TERMS {
            assert!(
                (t.eval(&j) - t.eval(&c)).abs() <= 1e-9,
                "{} changed under identity substitution",
                t.name
            );
        }
    }

    #[test]
    fn mixture_weight_one_reproduces_first_branch() {
        let mut rng = seeded(0xc011_0004);
        let ja = random_joint(&mut rng, 2);
        let jb = substitute_aux(&ja, CollapseMode::Collapse2).unwrap();
        let m = timeshare_mix(&ja, &jb, 1.0).unwrap();
        for t in MIX_TERMS {
            assert!((t.eval(&m) - t.eval(&ja)).abs() <= 1e-9, "{} at gamma=1", t.name);
        }
    }

    #[test]
    fn mixture_terms_combine_linearly_against_collapse_branch() {
        let mut rng = seeded(0xc011_0005);
        for _ in 0..10 {
            let ja = random_gated_joint(&mut rng, &SampleOpts::default()).unwrap();
            let jb = substitute_aux(&ja, CollapseMode::Collapse2).unwrap();
            for &gamma in &[0.5, 0.1, 0.02] {
                let m = timeshare_mix(&ja, &jb, gamma).unwrap();
                for t in MIX_TERMS {
                    let want = gamma * t.eval(&ja) + (1.0 - gamma) * t.eval(&jb);
                    let got = t.eval(&m);
                    assert!(
                        (got - want).abs() <= 1e-9,
                        "{} at gamma={gamma}: {got} vs {want}",
                        t.name
                    );
                }
            }
        }
    }

    #[test]
    fn conditional_terms_are_linear_for_arbitrary_pairs() {
        // Terms conditioned on an auxiliary absorb the selector, so linearity
        // needs no shared output marginal.
        let mut rng = seeded(0xc011_0006);
        for _ in 0..10 {
            let ja = random_joint(&mut rng, 2);
            let mut jb = random_joint(&mut rng, 2);
            jb.factors[4] = ja.factors[4].clone();
            let jb = Joint::build(jb.alphabets.clone(), jb.factors.clone()).unwrap();
            let m = timeshare_mix(&ja, &jb, 0.3).unwrap();
            let t = TermSpec {
                name: "I(V,V1;Y1|U)",
                a: &[Var::V, Var::V1],
                b: &[Var::Y1],
                c: &[Var::U],
            };
            let want = 0.3 * t.eval(&ja) + 0.7 * t.eval(&jb);
            assert!((t.eval(&m) - want).abs() <= 1e-9);
        }
    }

    #[test]
    fn mixture_requires_common_channel() {
        let mut rng = seeded(0xc011_0007);
        let ja = random_joint(&mut rng, 2);
        let jb = random_joint(&mut rng, 2);
        assert!(matches!(
            timeshare_mix(&ja, &jb, 0.5),
            Err(ProbError::ChannelMismatch(_))
        ));
    }
}
