//! Seeded random factories for joint distributions.
//!
//! Two families matter downstream:
//!
//! * fully random chains ([`random_joint`]) for algebraic identities that
//!   hold for every distribution, and
//! * gated chains ([`random_gated_joint`]) for region work. The subject-to
//!   conditions of the derived regions hold only on the boundary where one
//!   of the private auxiliaries is deterministic given `V` (the Marton
//!   compatibility condition is an equality there), so the sampler builds
//!   that structure directly instead of rejection-sampling for it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Alphabet, Factor, Joint, ProbError, Var};

/// Deterministic RNG for everything in this crate. ChaCha keeps streams
/// stable across platforms and releases.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform conditional table.
pub fn uniform_factor(
    children: &[Var],
    parents: &[Var],
    child_sizes: &[usize],
    parent_sizes: &[usize],
) -> Factor {
    let rows: usize = parent_sizes.iter().product::<usize>().max(1);
    let row_len: usize = child_sizes.iter().product();
    Factor::new(
        children.to_vec(),
        parents.to_vec(),
        child_sizes.to_vec(),
        parent_sizes.to_vec(),
        vec![1.0 / row_len as f64; rows * row_len],
    )
}

/// Channel factor for binary `X`: `Y1`, `Y2`, `Z` are independent
/// symmetric-noise observations of `X` with the given flip probabilities.
pub fn binary_symmetric(e1: f64, e2: f64, ez: f64) -> Factor {
    symmetric_channel(2, e1, e2, ez)
}

/// Channel factor for `k`-ary `X`: each output stays at `x` with
/// probability `1 - e` and spreads `e` uniformly over the other symbols;
/// the three outputs are conditionally independent given `X`.
pub fn symmetric_channel(k: usize, e1: f64, e2: f64, ez: f64) -> Factor {
    let single = |e: f64, x: usize, y: usize| -> f64 {
        if y == x {
            1.0 - e
        } else {
            e / (k - 1) as f64
        }
    };
    let mut table = Vec::with_capacity(k * k * k * k);
    for x in 0..k {
        for y1 in 0..k {
            for y2 in 0..k {
                for z in 0..k {
                    table.push(single(e1, x, y1) * single(e2, x, y2) * single(ez, x, z));
                }
            }
        }
    }
    Factor::new(
        vec![Var::Y1, Var::Y2, Var::Z],
        vec![Var::X],
        vec![k, k, k],
        vec![k],
        table,
    )
}

/// Uniform draw from the probability simplex, mixed toward uniform so no
/// entry collapses to zero.
pub fn random_row(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let mut row: Vec<f64> = (0..k)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let sum: f64 = row.iter().sum();
    for x in &mut row {
        *x = 0.9 * (*x / sum) + 0.1 / k as f64;
    }
    row
}

fn random_table(rng: &mut impl Rng, rows: usize, row_len: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(rows * row_len);
    for _ in 0..rows {
        t.extend(random_row(rng, row_len));
    }
    t
}

/// Fully random chain with all eight alphabets of size `base`.
pub fn random_joint(rng: &mut impl Rng, base: usize) -> Joint {
    let k = base;
    let factors = vec![
        Factor::new(vec![Var::U], vec![], vec![k], vec![], random_row(rng, k)),
        Factor::new(vec![Var::V], vec![Var::U], vec![k], vec![k], random_table(rng, k, k)),
        Factor::new(
            vec![Var::V1, Var::V2],
            vec![Var::V],
            vec![k, k],
            vec![k],
            random_table(rng, k, k * k),
        ),
        Factor::new(
            vec![Var::X],
            vec![Var::V1, Var::V2],
            vec![k],
            vec![k, k],
            random_table(rng, k * k, k),
        ),
        {
            let mut f = uniform_factor(&[Var::Y1, Var::Y2, Var::Z], &[Var::X], &[k, k, k], &[k]);
            f.table = random_table(rng, k, k * k * k);
            f
        },
    ];
    Joint::build(vec![Alphabet::atomic(k); 8], factors).expect("random chain is valid")
}

/// Which private auxiliary stays informative in a gated sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxFamily {
    /// `V1 = V2 = V`: both satellites degenerate.
    Diagonal,
    /// `V1` informative, `V2 = V`.
    RichLeft,
    /// `V2` informative, `V1 = V`.
    RichRight,
}

/// Margins the gated sampler enforces beyond the subject-to conditions
/// themselves. All values in bits.
#[derive(Debug, Clone)]
pub struct SampleOpts {
    pub base: usize,
    /// Fixed family, or `None` to rotate through all three.
    pub family: Option<AuxFamily>,
    /// Lower bound on both receiver gaps
    /// `I(V,Vi;Yi|U) - I(V,Vi;Z|U)`.
    pub min_receiver_gap: f64,
    /// Lower bound on `I(U;Y1)` and `I(U;Y2)`.
    pub min_cloud_info: f64,
    /// Bounds on the secrecy floor `I(V;Z|U)`.
    pub min_floor: f64,
    pub max_floor: f64,
    pub attempts: usize,
}

impl Default for SampleOpts {
    fn default() -> Self {
        SampleOpts {
            base: 2,
            family: None,
            min_receiver_gap: 0.01,
            min_cloud_info: 0.01,
            min_floor: 1e-3,
            max_floor: 0.2,
            attempts: 400,
        }
    }
}

impl SampleOpts {
    pub fn base(base: usize) -> SampleOpts {
        SampleOpts { base, ..SampleOpts::default() }
    }
}

/// Point mass `child = f(parent)` table over one parent variable.
fn deterministic_factor(
    children: &[Var],
    parents: &[Var],
    child_sizes: &[usize],
    parent_sizes: &[usize],
    map: impl Fn(usize) -> usize,
) -> Factor {
    let rows: usize = parent_sizes.iter().product::<usize>().max(1);
    let row_len: usize = child_sizes.iter().product();
    let mut table = vec![0.0; rows * row_len];
    for r in 0..rows {
        table[r * row_len + map(r)] = 1.0;
    }
    Factor::new(
        children.to_vec(),
        parents.to_vec(),
        child_sizes.to_vec(),
        parent_sizes.to_vec(),
        table,
    )
}

/// `p(v|u)`-style sticky row: stays at the parent symbol with probability
/// `1 - e`, spreads `e` uniformly over the rest.
fn sticky_table(k: usize, e: f64) -> Vec<f64> {
    let mut t = vec![0.0; k * k];
    for u in 0..k {
        for v in 0..k {
            t[u * k + v] = if v == u { 1.0 - e } else { e / (k - 1) as f64 };
        }
    }
    t
}

/// Binary chain with every layer aligned: `V|U` sticky with flip rate
/// `e_v`, `V1 = V2 = V`, `X = V1`, and a symmetric output channel with flip
/// rates `(e1, e2, ez)`. Useful for controlled coding experiments where the
/// satellite layers carry no extra randomness of their own.
pub fn copy_satellite_joint(e_v: f64, e1: f64, e2: f64, ez: f64) -> Joint {
    let k = 2;
    let p_u = Factor::new(vec![Var::U], vec![], vec![k], vec![], vec![0.5, 0.5]);
    let p_v = Factor::new(vec![Var::V], vec![Var::U], vec![k], vec![k], sticky_table(k, e_v));
    let p_pair =
        deterministic_factor(&[Var::V1, Var::V2], &[Var::V], &[k, k], &[k], |v| v * k + v);
    let p_x = deterministic_factor(&[Var::X], &[Var::V1, Var::V2], &[k], &[k, k], |pr| pr / k);
    let channel = binary_symmetric(e1, e2, ez);
    Joint::build(vec![Alphabet::atomic(k); 8], vec![p_u, p_v, p_pair, p_x, channel])
        .expect("aligned chain is a valid factorization")
}

fn build_gated_candidate(rng: &mut impl Rng, family: AuxFamily, k: usize) -> Joint {
    let e_v: f64 = rng.gen_range(0.08..0.30);
    let e_s: f64 = rng.gen_range(0.15..0.45);
    let e_x: f64 = rng.gen_range(0.02..0.25);
    let w: f64 = rng.gen_range(0.55..0.95);
    let (e1, e2): (f64, f64) = (rng.gen_range(0.03..0.12), rng.gen_range(0.03..0.12));
    let ez: f64 = if k == 2 {
        rng.gen_range(0.35..0.45)
    } else {
        rng.gen_range(0.48..0.60)
    };

    let p_u = Factor::new(vec![Var::U], vec![], vec![k], vec![], random_row(rng, k));
    let p_v = Factor::new(vec![Var::V], vec![Var::U], vec![k], vec![k], sticky_table(k, e_v));

    // Private layer: at least one side deterministic given V so the Marton
    // compatibility condition holds (with equality).
    let sticky = sticky_table(k, e_s);
    let mut pair = vec![0.0; k * k * k];
    for v in 0..k {
        for v1 in 0..k {
            for v2 in 0..k {
                let p = match family {
                    AuxFamily::Diagonal => {
                        if v1 == v && v2 == v {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    AuxFamily::RichLeft => {
                        if v2 == v {
                            sticky[v * k + v1]
                        } else {
                            0.0
                        }
                    }
                    AuxFamily::RichRight => {
                        if v1 == v {
                            sticky[v * k + v2]
                        } else {
                            0.0
                        }
                    }
                };
                pair[v * k * k + v1 * k + v2] = p;
            }
        }
    }
    let p_pair = Factor::new(vec![Var::V1, Var::V2], vec![Var::V], vec![k, k], vec![k], pair);

    // X leans toward V1 with weight w and V2 otherwise, then symmetric noise.
    let mut p_x = vec![0.0; k * k * k];
    for v1 in 0..k {
        for v2 in 0..k {
            for x in 0..k {
                let lean = w * f64::from(u8::from(x == v1)) + (1.0 - w) * f64::from(u8::from(x == v2));
                p_x[(v1 * k + v2) * k + x] = (1.0 - e_x) * lean + e_x / k as f64;
            }
        }
    }
    let p_x = Factor::new(vec![Var::X], vec![Var::V1, Var::V2], vec![k], vec![k, k], p_x);

    let channel = symmetric_channel(k, e1, e2, ez);
    Joint::build(
        vec![Alphabet::atomic(k); 8],
        vec![p_u, p_v, p_pair, p_x, channel],
    )
    .expect("gated candidate is a valid chain")
}

/// Checks the five subject-to conditions (closure semantics) plus the extra
/// margins in `opts`. Returns true when the joint qualifies.
pub fn passes_gates(j: &Joint, opts: &SampleOpts) -> bool {
    let i = |a: &[Var], b: &[Var], c: &[Var]| j.cond_mutual_info(a, b, c).unwrap();
    let marton_lhs = i(&[Var::V1], &[Var::V2], &[Var::V]);
    let marton_rhs = i(&[Var::V1], &[Var::Z], &[Var::V]) + i(&[Var::V2], &[Var::Z], &[Var::V])
        - i(&[Var::V1, Var::V2], &[Var::Z], &[Var::V]);
    if marton_lhs > marton_rhs + super::INFO_CLAMP_TOL {
        return false;
    }
    let gap1 = i(&[Var::V, Var::V1], &[Var::Y1], &[Var::U]) - i(&[Var::V, Var::V1], &[Var::Z], &[Var::U]);
    let gap2 = i(&[Var::V, Var::V2], &[Var::Y2], &[Var::U]) - i(&[Var::V, Var::V2], &[Var::Z], &[Var::U]);
    if gap1 < opts.min_receiver_gap || gap2 < opts.min_receiver_gap {
        return false;
    }
    let sat1 = i(&[Var::V1], &[Var::Y1], &[Var::V]) - i(&[Var::V1], &[Var::Z], &[Var::V]);
    let sat2 = i(&[Var::V2], &[Var::Y2], &[Var::V]) - i(&[Var::V2], &[Var::Z], &[Var::V]);
    if sat1 < -super::INFO_CLAMP_TOL || sat2 < -super::INFO_CLAMP_TOL {
        return false;
    }
    let floor = i(&[Var::V], &[Var::Z], &[Var::U]);
    if floor < opts.min_floor || floor > opts.max_floor {
        return false;
    }
    i(&[Var::U], &[Var::Y1], &[]) >= opts.min_cloud_info
        && i(&[Var::U], &[Var::Y2], &[]) >= opts.min_cloud_info
}

/// Random joint satisfying the region gates (closure semantics) and the
/// margins in `opts`.
pub fn random_gated_joint(rng: &mut impl Rng, opts: &SampleOpts) -> Result<Joint, ProbError> {
    let families = [AuxFamily::Diagonal, AuxFamily::RichLeft, AuxFamily::RichRight];
    for attempt in 0..opts.attempts {
        let family = opts.family.unwrap_or(families[attempt % families.len()]);
        let j = build_gated_candidate(rng, family, opts.base);
        if passes_gates(&j, opts) {
            return Ok(j);
        }
    }
    Err(ProbError::SamplerExhausted { attempts: opts.attempts })
}

/// Random joint with the collapsed structure `V_side = V = U` (the other
/// satellite stays informative). This is the family over which the reduced
/// single-satellite systems are defined.
pub fn random_collapsed_joint(rng: &mut impl Rng, base: usize, side: usize) -> Joint {
    assert!(side == 1 || side == 2, "side is 1 or 2");
    let k = base;
    loop {
        let e_s: f64 = rng.gen_range(0.10..0.40);
        let e_x: f64 = rng.gen_range(0.02..0.20);
        let (e1, e2): (f64, f64) = (rng.gen_range(0.03..0.12), rng.gen_range(0.03..0.12));
        let ez: f64 = if k == 2 {
            rng.gen_range(0.35..0.45)
        } else {
            rng.gen_range(0.48..0.60)
        };

        let p_u = Factor::new(vec![Var::U], vec![], vec![k], vec![], random_row(rng, k));
        let p_v = deterministic_factor(&[Var::V], &[Var::U], &[k], &[k], |u| u);
        let sticky = sticky_table(k, e_s);
        let mut pair = vec![0.0; k * k * k];
        for v in 0..k {
            for v1 in 0..k {
                for v2 in 0..k {
                    let p = if side == 2 {
                        // V2 = V, V1 informative.
                        if v2 == v { sticky[v * k + v1] } else { 0.0 }
                    } else {
                        if v1 == v { sticky[v * k + v2] } else { 0.0 }
                    };
                    pair[v * k * k + v1 * k + v2] = p;
                }
            }
        }
        let p_pair = Factor::new(vec![Var::V1, Var::V2], vec![Var::V], vec![k, k], vec![k], pair);

        // X follows the informative satellite, with symmetric noise.
        let rich_is_v1 = side == 2;
        let mut p_x = vec![0.0; k * k * k];
        for v1 in 0..k {
            for v2 in 0..k {
                let lead = if rich_is_v1 { v1 } else { v2 };
                for x in 0..k {
                    p_x[(v1 * k + v2) * k + x] =
                        if x == lead { 1.0 - e_x } else { e_x / (k - 1) as f64 };
                }
            }
        }
        let p_x = Factor::new(vec![Var::X], vec![Var::V1, Var::V2], vec![k], vec![k, k], p_x);
        let channel = symmetric_channel(k, e1, e2, ez);
        let j = Joint::build(
            vec![Alphabet::atomic(k); 8],
            vec![p_u, p_v, p_pair, p_x, channel],
        )
        .expect("collapsed chain is valid");

        // Keep regions nondegenerate: the informative satellite must beat the
        // eavesdropper and the cloud must reach both receivers.
        let rich = if rich_is_v1 { Var::V1 } else { Var::V2 };
        let y_rich = if rich_is_v1 { Var::Y1 } else { Var::Y2 };
        let gap = j.cond_mutual_info(&[rich], &[y_rich], &[Var::U]).unwrap()
            - j.cond_mutual_info(&[rich], &[Var::Z], &[Var::U]).unwrap();
        let c1 = j.cond_mutual_info(&[Var::U], &[Var::Y1], &[]).unwrap();
        let c2 = j.cond_mutual_info(&[Var::U], &[Var::Y2], &[]).unwrap();
        if gap >= 0.01 && c1 >= 0.01 && c2 >= 0.01 {
            return j;
        }
    }
}
