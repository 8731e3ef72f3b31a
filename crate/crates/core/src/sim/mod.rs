//! Small-blocklength realizations of the layered secrecy schemes: random
//! codebooks, superposition-Marton encoding with a one-time-pad cloud
//! layer, side-information-aided typicality decoding, exact per-codebook
//! leakage, and Monte Carlo error estimation.
//!
//! The three variants share one code path. Index layout per codeword layer:
//!
//! * cloud `u^n(k)` — `k` is the pad of the two `a`-segments;
//! * common satellite `v^n(k, m1c, m2c, r)` — `r` folds the `b`-segment pad
//!   together with the Wyner randomness `d` (`r = kb*nd + d`), which is a
//!   no-op for the simplified variants where `nb = 1`;
//! * private satellites `v_i^n(ctx, m_id, d_i, l_i)` — superimposed on the
//!   `v`-layer context with Wyner randomness `d_i` and Marton bin `l_i`.

pub mod codebook;
pub mod coding;
pub mod experiment;
pub mod leakage;
pub mod typicality;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prob::{Joint, Var};
use typicality::CondTable;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{what} needs {need} states, cap is {cap}")]
    CapExceeded { what: &'static str, need: u128, cap: u64 },
    #[error(transparent)]
    Prob(#[from] crate::prob::ProbError),
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}

/// Which layered scheme the experiment realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Four message segments per receiver; `b`-segments pad each other and
    /// ride the common satellite next to the Wyner randomness `d`.
    Original,
    /// No `b`-segments; the `c`-segments protect each other with `d` as
    /// extra randomness.
    Simplified1,
    /// No `b`-segments and no `d`: the `c`-segments alone protect each
    /// other.
    Simplified2,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Original => "original",
            Variant::Simplified1 => "simplified1",
            Variant::Simplified2 => "simplified2",
        }
    }
}

/// Entries per index coordinate of the codebook layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSizes {
    /// Pad segment count (both receivers share it).
    pub na: usize,
    /// Secondary pad segment count (original variant only; 1 otherwise).
    pub nb: usize,
    pub n1c: usize,
    pub n2c: usize,
    pub n1d: usize,
    pub n2d: usize,
    /// Wyner randomness of the common satellite.
    pub nd: usize,
    /// Wyner randomness of the private satellites.
    pub nd1: usize,
    pub nd2: usize,
    /// Marton bin sizes.
    pub nl1: usize,
    pub nl2: usize,
}

impl LayerSizes {
    /// All-ones layout: a single deterministic-sampled codeword chain.
    pub fn unit() -> LayerSizes {
        LayerSizes { na: 1, nb: 1, n1c: 1, n2c: 1, n1d: 1, n2d: 1, nd: 1, nd1: 1, nd2: 1, nl1: 1, nl2: 1 }
    }
}

/// Enumeration limits. `leakage` bounds `|Z|^n * (message and randomness
/// combinations)`; `codebook` bounds the total stored codeword symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub leakage: u64,
    pub codebook: u64,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps { leakage: 1 << 22, codebook: 1 << 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub n: usize,
    pub variant: Variant,
    pub sizes: LayerSizes,
    /// Additive robust-typicality deviation.
    pub delta: f64,
    #[serde(default)]
    pub caps: Caps,
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidConfig(msg));
        if self.n == 0 {
            return bad("blocklength must be at least 1".into());
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return bad(format!("delta {} outside (0, 1]", self.delta));
        }
        let s = &self.sizes;
        for (name, v) in [
            ("na", s.na),
            ("nb", s.nb),
            ("n1c", s.n1c),
            ("n2c", s.n2c),
            ("n1d", s.n1d),
            ("n2d", s.n2d),
            ("nd", s.nd),
            ("nd1", s.nd1),
            ("nd2", s.nd2),
            ("nl1", s.nl1),
            ("nl2", s.nl2),
        ] {
            if v == 0 {
                return bad(format!("layer size {name} must be at least 1"));
            }
        }
        match self.variant {
            Variant::Original => Ok(()),
            Variant::Simplified1 => {
                if s.nb != 1 {
                    bad("simplified1 has no b-segments (nb must be 1)".into())
                } else {
                    Ok(())
                }
            }
            Variant::Simplified2 => {
                if s.nb != 1 {
                    bad("simplified2 has no b-segments (nb must be 1)".into())
                } else if s.nd != 1 {
                    bad("simplified2 has no common-satellite randomness (nd must be 1)".into())
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Number of distinct messages for receiver `i`.
    pub fn message_count(&self, i: usize) -> u64 {
        let s = &self.sizes;
        let (nc, nd) = if i == 1 { (s.n1c, s.n1d) } else { (s.n2c, s.n2d) };
        (s.na * s.nb * nc * nd) as u64
    }

    /// Message rate in bits per symbol.
    pub fn rate(&self, i: usize) -> f64 {
        (self.message_count(i) as f64).log2() / self.n as f64
    }

    /// Splits a flat message index into segments (a slowest, d fastest).
    pub fn split(&self, i: usize, m: u64) -> SplitMessage {
        let s = &self.sizes;
        let (nc, nd) = if i == 1 { (s.n1c, s.n1d) } else { (s.n2c, s.n2d) };
        let mut m = m as usize;
        let d = m % nd;
        m /= nd;
        let c = m % nc;
        m /= nc;
        let b = m % s.nb;
        m /= s.nb;
        SplitMessage { a: m, b, c, d }
    }

    pub fn join(&self, i: usize, m: SplitMessage) -> u64 {
        let s = &self.sizes;
        let (nc, nd) = if i == 1 { (s.n1c, s.n1d) } else { (s.n2c, s.n2d) };
        (((m.a * s.nb + m.b) * nc + m.c) * nd + m.d) as u64
    }
}

/// One receiver's message split into the four layer segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitMessage {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

/// Group one-time pad: addition modulo `n` (index-equivalent to bitwise XOR
/// when `n` is a power of two). A uniform operand makes the sum uniform and
/// independent of the other operand.
pub fn pad(m1: usize, m2: usize, n: usize) -> usize {
    (m1 + m2) % n
}

/// Recovers the unknown operand from the pad and the known one.
pub fn unpad(k: usize, known: usize, n: usize) -> usize {
    (k + n - known % n) % n
}

/// Index arithmetic for the codeword tables.
#[derive(Debug, Clone, Copy)]
pub struct Layout {
    pub s: LayerSizes,
}

impl Layout {
    pub fn new(s: LayerSizes) -> Layout {
        Layout { s }
    }

    /// Size of the folded randomization coordinate of the v-layer.
    pub fn nr(&self) -> usize {
        self.s.nb * self.s.nd
    }

    pub fn fold_r(&self, kb: usize, d: usize) -> usize {
        kb * self.s.nd + d
    }

    pub fn v_count(&self) -> usize {
        self.s.na * self.s.n1c * self.s.n2c * self.nr()
    }

    pub fn v_index(&self, k: usize, m1c: usize, m2c: usize, r: usize) -> usize {
        ((k * self.s.n1c + m1c) * self.s.n2c + m2c) * self.nr() + r
    }

    pub fn v1_count(&self) -> usize {
        self.v_count() * self.s.n1d * self.s.nd1 * self.s.nl1
    }

    pub fn v1_index(&self, ctx: usize, m1d: usize, d1: usize, l1: usize) -> usize {
        ((ctx * self.s.n1d + m1d) * self.s.nd1 + d1) * self.s.nl1 + l1
    }

    pub fn v2_count(&self) -> usize {
        self.v_count() * self.s.n2d * self.s.nd2 * self.s.nl2
    }

    pub fn v2_index(&self, ctx: usize, m2d: usize, d2: usize, l2: usize) -> usize {
        ((ctx * self.s.n2d + m2d) * self.s.nd2 + d2) * self.s.nl2 + l2
    }
}

/// Single-letter tables the simulator needs, extracted once from a joint.
pub struct Tables {
    pub ku: usize,
    pub kv: usize,
    pub k1: usize,
    pub k2: usize,
    pub kx: usize,
    pub ky1: usize,
    pub ky2: usize,
    pub kz: usize,
    /// `p(u)`.
    pub p_u: Vec<f64>,
    /// `p(v|u)`, u-major.
    pub p_v: Vec<f64>,
    /// Marginals `p(v1|v)`, `p(v2|v)` used for independent Marton draws.
    pub p_v1: Vec<f64>,
    pub p_v2: Vec<f64>,
    /// `p(x|v1,v2)`, pair-major (`v1*k2+v2`).
    pub p_x: Vec<f64>,
    /// Channel `p(y1,y2,z|x)`, x-major, child index `(y1*ky2+y2)*kz+z`.
    pub p_out: Vec<f64>,
    /// Composed eavesdropper channel `p(z|v1,v2)`, pair-major.
    pub p_z_pair: Vec<f64>,
    /// Marton pairing law `p(v1,v2|v)` with `p(v)` context mass.
    pub marton: CondTable,
    /// Decoder references `p(y_i | u, v, v_i)` with context support.
    pub dec1: CondTable,
    pub dec2: CondTable,
}

impl Tables {
    pub fn new(j: &Joint) -> Tables {
        let (ku, kv) = (j.size_of(Var::U), j.size_of(Var::V));
        let (k1, k2) = (j.size_of(Var::V1), j.size_of(Var::V2));
        let kx = j.size_of(Var::X);
        let (ky1, ky2, kz) = (j.size_of(Var::Y1), j.size_of(Var::Y2), j.size_of(Var::Z));

        let p_u: Vec<f64> = (0..ku).map(|u| j.factors[0].prob(0, u)).collect();
        let p_v: Vec<f64> = (0..ku * kv)
            .map(|i| j.factors[1].prob(i / kv, i % kv))
            .collect();
        let pair = &j.factors[2];
        let mut p_v1 = vec![0.0; kv * k1];
        let mut p_v2 = vec![0.0; kv * k2];
        for v in 0..kv {
            for v1 in 0..k1 {
                for v2 in 0..k2 {
                    let p = pair.prob(v, v1 * k2 + v2);
                    p_v1[v * k1 + v1] += p;
                    p_v2[v * k2 + v2] += p;
                }
            }
        }
        let p_x: Vec<f64> = (0..k1 * k2 * kx)
            .map(|i| j.factors[3].prob(i / kx, i % kx))
            .collect();
        let out_len = ky1 * ky2 * kz;
        let p_out: Vec<f64> = (0..kx * out_len)
            .map(|i| j.factors[4].prob(i / out_len, i % out_len))
            .collect();

        // p(z|x), then composed through p(x|v1,v2).
        let mut p_z_x = vec![0.0; kx * kz];
        for x in 0..kx {
            for y1 in 0..ky1 {
                for y2 in 0..ky2 {
                    for z in 0..kz {
                        p_z_x[x * kz + z] += p_out[x * out_len + (y1 * ky2 + y2) * kz + z];
                    }
                }
            }
        }
        let mut p_z_pair = vec![0.0; k1 * k2 * kz];
        for pr in 0..k1 * k2 {
            for x in 0..kx {
                let w = p_x[pr * kx + x];
                for z in 0..kz {
                    p_z_pair[pr * kz + z] += w * p_z_x[x * kz + z];
                }
            }
        }

        let p_v_marginal = j.marginal(&[Var::V]).p;
        let marton = CondTable::new(
            kv,
            k1 * k2,
            (0..kv * k1 * k2)
                .map(|i| pair.prob(i / (k1 * k2), i % (k1 * k2)))
                .collect(),
            p_v_marginal,
        );
        let dec1 = CondTable::from_joint(j, &[Var::U, Var::V, Var::V1], Var::Y1);
        let dec2 = CondTable::from_joint(j, &[Var::U, Var::V, Var::V2], Var::Y2);

        Tables {
            ku,
            kv,
            k1,
            k2,
            kx,
            ky1,
            ky2,
            kz,
            p_u,
            p_v,
            p_v1,
            p_v2,
            p_x,
            p_out,
            p_z_pair,
            marton,
            dec1,
            dec2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::sample::{random_joint, seeded};

    fn cfg(variant: Variant, sizes: LayerSizes) -> SchemeConfig {
        SchemeConfig { n: 4, variant, sizes, delta: 0.2, caps: Caps::default() }
    }

    #[test]
    fn pad_is_a_group_operation() {
        for n in [1usize, 2, 3, 8] {
            for a in 0..n {
                assert_eq!(pad(a, 0, n), a); // identity pad
                for b in 0..n {
                    let k = pad(a, b, n);
                    assert_eq!(unpad(k, b, n), a);
                    assert_eq!(unpad(k, a, n), b);
                }
            }
        }
        assert_eq!(pad(1, 1, 2), 0); // XOR on bits
    }

    #[test]
    fn uniform_operand_makes_pad_uniform_and_independent() {
        // Exact distribution check over all pairs: for each fixed m1a the
        // pad value is a bijection of m2a.
        let n = 8;
        for m1a in 0..n {
            let mut seen = vec![false; n];
            for m2a in 0..n {
                let k = pad(m1a, m2a, n);
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
    }

    #[test]
    fn variant_constraints_enforced() {
        let mut s = LayerSizes::unit();
        s.nb = 2;
        assert!(cfg(Variant::Original, s).validate().is_ok());
        assert!(cfg(Variant::Simplified1, s).validate().is_err());
        s.nb = 1;
        s.nd = 3;
        assert!(cfg(Variant::Simplified1, s).validate().is_ok());
        assert!(cfg(Variant::Simplified2, s).validate().is_err());
        s.nd = 1;
        assert!(cfg(Variant::Simplified2, s).validate().is_ok());
        s.nl1 = 0;
        assert!(cfg(Variant::Simplified2, s).validate().is_err());
    }

    #[test]
    fn split_and_join_roundtrip() {
        let mut s = LayerSizes::unit();
        s.na = 3;
        s.nb = 2;
        s.n1c = 4;
        s.n1d = 5;
        let c = cfg(Variant::Original, s);
        for m in 0..c.message_count(1) {
            let parts = c.split(1, m);
            assert_eq!(c.join(1, parts), m);
        }
        assert_eq!(c.message_count(1), 3 * 2 * 4 * 5);
        let r = c.rate(1);
        assert!((r - (120f64).log2() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn tables_compose_the_eavesdropper_channel() {
        let j = random_joint(&mut seeded(0x7ab1e), 2);
        let t = Tables::new(&j);
        // Rows are distributions.
        for pr in 0..t.k1 * t.k2 {
            let s: f64 = (0..t.kz).map(|z| t.p_z_pair[pr * t.kz + z]).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
        // Composition matches a direct sum on one entry.
        let (v1, v2, z) = (1, 0, 1);
        let direct: f64 = (0..t.kx)
            .map(|x| {
                let py: f64 = (0..t.ky1 * t.ky2)
                    .map(|y| t.p_out[x * t.ky1 * t.ky2 * t.kz + y * t.kz + z])
                    .sum();
                t.p_x[(v1 * t.k2 + v2) * t.kx + x] * py
            })
            .sum();
        assert!((t.p_z_pair[(v1 * t.k2 + v2) * t.kz + z] - direct).abs() < 1e-12);
    }
}
