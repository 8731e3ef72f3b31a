//! Robust conditional typicality over finite alphabets.

use crate::prob::{Joint, Var};

/// A conditional law `p(child | ctx)` together with the reference marginal
/// mass of each context. Zero-mass contexts are unsupported: any sequence
/// visiting one is atypical regardless of frequencies.
#[derive(Debug, Clone)]
pub struct CondTable {
    pub n_ctx: usize,
    pub n_child: usize,
    /// Row-major, contexts slow.
    rows: Vec<f64>,
    ctx_mass: Vec<f64>,
}

impl CondTable {
    pub fn new(n_ctx: usize, n_child: usize, rows: Vec<f64>, ctx_mass: Vec<f64>) -> CondTable {
        assert_eq!(rows.len(), n_ctx * n_child);
        assert_eq!(ctx_mass.len(), n_ctx);
        CondTable { n_ctx, n_child, rows, ctx_mass }
    }

    /// Builds `p(child | ctx)` from a joint distribution. The context index
    /// is row-major over `ctx` in the order given.
    pub fn from_joint(j: &Joint, ctx: &[Var], child: Var) -> CondTable {
        let mut vars = ctx.to_vec();
        vars.push(child);
        let m = j.marginal(&vars);
        let n_child = j.size_of(child);
        let n_ctx = m.p.len() / n_child;
        let mut rows = vec![0.0; n_ctx * n_child];
        let mut ctx_mass = vec![0.0; n_ctx];
        for c in 0..n_ctx {
            let mass: f64 = m.p[c * n_child..(c + 1) * n_child].iter().sum();
            ctx_mass[c] = mass;
            if mass > 0.0 {
                for ch in 0..n_child {
                    rows[c * n_child + ch] = m.p[c * n_child + ch] / mass;
                }
            }
        }
        CondTable { n_ctx, n_child, rows, ctx_mass }
    }

    pub fn p(&self, ctx: usize, child: usize) -> f64 {
        self.rows[ctx * self.n_child + child]
    }

    pub fn supported(&self, ctx: usize) -> bool {
        self.ctx_mass[ctx] > 0.0
    }
}

/// Checks robust conditional typicality of a paired sequence: every visited
/// context must be supported, no zero-probability child may occur, and for
/// every visited context each positive-probability child's empirical
/// conditional frequency must lie within an additive `delta` of the law.
pub fn cond_typical(pairs: &[(usize, usize)], t: &CondTable, delta: f64) -> bool {
    let mut counts = vec![0u32; t.n_ctx * t.n_child];
    let mut totals = vec![0u32; t.n_ctx];
    for &(c, ch) in pairs {
        if !t.supported(c) || t.p(c, ch) <= 0.0 {
            return false;
        }
        counts[c * t.n_child + ch] += 1;
        totals[c] += 1;
    }
    for c in 0..t.n_ctx {
        if totals[c] == 0 {
            continue;
        }
        let nc = totals[c] as f64;
        for ch in 0..t.n_child {
            let p = t.p(c, ch);
            if p <= 0.0 {
                continue; // occurrences already rejected above
            }
            if (counts[c * t.n_child + ch] as f64 / nc - p).abs() > delta {
                return false;
            }
        }
    }
    true
}
