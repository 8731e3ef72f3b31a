//! Finite joint distributions over the fixed broadcast-channel variable chain
//! `U -> V -> (V1,V2) -> X -> (Y1,Y2,Z)` and exact information measures.
//!
//! Everything is measured in bits (`log2`), with `0 * log 0 := 0`. A
//! [`Joint`] is always a full table over the eight standard variables; the
//! auxiliary-substitution and time-sharing constructions in [`construct`]
//! keep the same eight labels and fold their extra structure into product
//! alphabets, so downstream consumers never deal with a variable count
//! other than eight.

pub mod construct;
pub mod io;
pub mod sample;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for probability-mass checks (row sums, joint sum,
/// factor reproduction).
pub const MASS_TOL: f64 = 1e-9;
/// Entrywise tolerance for the joint-equals-product-of-factors check.
pub const PRODUCT_TOL: f64 = 1e-12;
/// Largest negative round-off accepted (and clamped to zero) for an
/// information quantity; anything below this is a hard error.
pub const INFO_CLAMP_TOL: f64 = 1e-9;

/// The eight variables of the channel chain, in canonical table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    U,
    V,
    V1,
    V2,
    X,
    Y1,
    Y2,
    Z,
}

/// Canonical variable order used for pmf table strides.
pub const VARS: [Var; 8] = [
    Var::U,
    Var::V,
    Var::V1,
    Var::V2,
    Var::X,
    Var::Y1,
    Var::Y2,
    Var::Z,
];

impl Var {
    /// Position in [`VARS`].
    pub fn index(self) -> usize {
        match self {
            Var::U => 0,
            Var::V => 1,
            Var::V1 => 2,
            Var::V2 => 3,
            Var::X => 4,
            Var::Y1 => 5,
            Var::Y2 => 6,
            Var::Z => 7,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::U => "U",
            Var::V => "V",
            Var::V1 => "V1",
            Var::V2 => "V2",
            Var::X => "X",
            Var::Y1 => "Y1",
            Var::Y2 => "Y2",
            Var::Z => "Z",
        }
    }

    pub fn parse(s: &str) -> Option<Var> {
        Some(match s {
            "U" => Var::U,
            "V" => Var::V,
            "V1" => Var::V1,
            "V2" => Var::V2,
            "X" => Var::X,
            "Y1" => Var::Y1,
            "Y2" => Var::Y2,
            "Z" => Var::Z,
            _ => return None,
        })
    }
}

impl std::fmt::Display for Var {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum ProbError {
    #[error("factor chain has wrong shape at position {0}: expected {1}")]
    ChainShape(usize, &'static str),
    #[error("alphabet size for {0} must be >= 1")]
    EmptyAlphabet(Var),
    #[error("factor {factor} has wrong table length {got}, expected {want}")]
    TableLength { factor: usize, got: usize, want: usize },
    #[error("factor {factor} row {row} sums to {sum}, expected 1")]
    RowSum { factor: usize, row: usize, sum: f64 },
    #[error("factor {factor} contains a negative entry {value}")]
    NegativeEntry { factor: usize, value: f64 },
    #[error("joint pmf sums to {0}, expected 1")]
    JointSum(f64),
    #[error("joint pmf deviates from factor product by {0} at entry {1}")]
    ProductMismatch(f64, usize),
    #[error("marginal fails to reproduce factor {factor} (deviation {dev})")]
    FactorReproduction { factor: usize, dev: f64 },
    #[error("information term has overlapping variable sets")]
    OverlappingSets,
    #[error("information quantity {0} is negative beyond round-off")]
    NumericalInstability(f64),
    #[error("distributions disagree on the {0} alphabet")]
    AlphabetMismatch(Var),
    #[error("channel laws p(y1,y2,z|x) differ by {0}; time sharing requires a common channel")]
    ChannelMismatch(f64),
    #[error("mixture weight {0} outside (0, 1]")]
    BadMixtureWeight(f64),
    #[error("no joint satisfied the gates within {attempts} attempts")]
    SamplerExhausted { attempts: usize },
    #[error("distribution file: {0}")]
    Format(String),
}

/// Alphabet of one variable. `parts` records the component sizes when the
/// alphabet is a product built by a construction (index = row-major over
/// parts); atomic alphabets have a single part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    pub size: usize,
    pub parts: Vec<usize>,
}

impl Alphabet {
    pub fn atomic(size: usize) -> Alphabet {
        Alphabet { size, parts: vec![size] }
    }

    pub fn product(parts: Vec<usize>) -> Alphabet {
        Alphabet { size: parts.iter().product(), parts }
    }
}

/// One conditional table of the factorization. `table` is row-major with
/// parent coordinates (in `parents` order) as the slow indices and child
/// coordinates (in `children` order) as the fast indices; each parent row
/// sums to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub children: Vec<Var>,
    pub parents: Vec<Var>,
    pub child_sizes: Vec<usize>,
    pub parent_sizes: Vec<usize>,
    pub table: Vec<f64>,
}

impl Factor {
    pub fn new(
        children: Vec<Var>,
        parents: Vec<Var>,
        child_sizes: Vec<usize>,
        parent_sizes: Vec<usize>,
        table: Vec<f64>,
    ) -> Factor {
        Factor { children, parents, child_sizes, parent_sizes, table }
    }

    pub fn rows(&self) -> usize {
        self.parent_sizes.iter().product()
    }

    pub fn row_len(&self) -> usize {
        self.child_sizes.iter().product()
    }

    pub fn prob(&self, parent_idx: usize, child_idx: usize) -> f64 {
        self.table[parent_idx * self.row_len() + child_idx]
    }

    fn validate(&self, position: usize) -> Result<(), ProbError> {
        let want = self.rows() * self.row_len();
        if self.table.len() != want {
            return Err(ProbError::TableLength { factor: position, got: self.table.len(), want });
        }
        for &p in &self.table {
            if p < 0.0 {
                return Err(ProbError::NegativeEntry { factor: position, value: p });
            }
        }
        for row in 0..self.rows() {
            let sum: f64 = self.table[row * self.row_len()..(row + 1) * self.row_len()]
                .iter()
                .sum();
            if (sum - 1.0).abs() > MASS_TOL {
                return Err(ProbError::RowSum { factor: position, row, sum });
            }
        }
        Ok(())
    }
}

/// Expected chain shape: children/parents of the five factors, in order.
const CHAIN: [(&[Var], &[Var]); 5] = [
    (&[Var::U], &[]),
    (&[Var::V], &[Var::U]),
    (&[Var::V1, Var::V2], &[Var::V]),
    (&[Var::X], &[Var::V1, Var::V2]),
    (&[Var::Y1, Var::Y2, Var::Z], &[Var::X]),
];

/// Full joint pmf over the eight chain variables together with the factors
/// it was built from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Joint {
    pub alphabets: Vec<Alphabet>,
    pub factors: Vec<Factor>,
    pmf: Vec<f64>,
}

/// Marginal pmf over an ordered subset of the chain variables.
#[derive(Debug, Clone)]
pub struct Marginal {
    pub vars: Vec<Var>,
    pub sizes: Vec<usize>,
    pub p: Vec<f64>,
}

impl Joint {
    /// Multiplies the factor chain into a full table and validates every
    /// distribution invariant (row sums, joint sum, entrywise product,
    /// factor reproduction by marginalization).
    pub fn build(alphabets: Vec<Alphabet>, factors: Vec<Factor>) -> Result<Joint, ProbError> {
        if alphabets.len() != 8 {
            return Err(ProbError::ChainShape(0, "eight alphabets"));
        }
        for (i, a) in alphabets.iter().enumerate() {
            if a.size == 0 || a.parts.iter().product::<usize>() != a.size {
                return Err(ProbError::EmptyAlphabet(VARS[i]));
            }
        }
        if factors.len() != 5 {
            return Err(ProbError::ChainShape(0, "five factors"));
        }
        let size_of = |v: Var| alphabets[v.index()].size;
        for (i, f) in factors.iter().enumerate() {
            let (children, parents) = CHAIN[i];
            if f.children != children || f.parents != parents {
                return Err(ProbError::ChainShape(i, "chain children/parents"));
            }
            let child_sizes: Vec<usize> = children.iter().map(|&v| size_of(v)).collect();
            let parent_sizes: Vec<usize> = parents.iter().map(|&v| size_of(v)).collect();
            if f.child_sizes != child_sizes || f.parent_sizes != parent_sizes {
                return Err(ProbError::ChainShape(i, "alphabet sizes"));
            }
            f.validate(i)?;
        }

        let sizes: Vec<usize> = VARS.iter().map(|&v| size_of(v)).collect();
        let total: usize = sizes.iter().product();
        let mut pmf = vec![0.0; total];
        let mut idx = vec![0usize; 8];
        for (flat, slot) in pmf.iter_mut().enumerate() {
            unflatten(flat, &sizes, &mut idx);
            let u = idx[0];
            let v = idx[1];
            let (v1, v2) = (idx[2], idx[3]);
            let x = idx[4];
            let (y1, y2, z) = (idx[5], idx[6], idx[7]);
            let p = factors[0].prob(0, u)
                * factors[1].prob(u, v)
                * factors[2].prob(v, v1 * sizes[3] + v2)
                * factors[3].prob(v1 * sizes[3] + v2, x)
                * factors[4].prob(x, (y1 * sizes[6] + y2) * sizes[7] + z);
            *slot = p;
        }

        let joint = Joint { alphabets, factors, pmf };
        joint.validate()?;
        Ok(joint)
    }

    fn validate(&self) -> Result<(), ProbError> {
        let sum: f64 = self.pmf.iter().sum();
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(ProbError::JointSum(sum));
        }
        // Entrywise product check. The table was constructed as the product,
        // so this guards against post-construction mutation and validates
        // deserialized joints.
        let sizes = self.sizes();
        let mut idx = vec![0usize; 8];
        for (flat, &p) in self.pmf.iter().enumerate() {
            unflatten(flat, &sizes, &mut idx);
            let prod = self.factors[0].prob(0, idx[0])
                * self.factors[1].prob(idx[0], idx[1])
                * self.factors[2].prob(idx[1], idx[2] * sizes[3] + idx[3])
                * self.factors[3].prob(idx[2] * sizes[3] + idx[3], idx[4])
                * self.factors[4].prob(idx[4], (idx[5] * sizes[6] + idx[6]) * sizes[7] + idx[7]);
            if (p - prod).abs() > PRODUCT_TOL {
                return Err(ProbError::ProductMismatch((p - prod).abs(), flat));
            }
        }
        // Marginalizing the joint must reproduce each factor on every parent
        // row with positive mass.
        for (i, (children, parents)) in CHAIN.iter().enumerate() {
            let f = &self.factors[i];
            let all: Vec<Var> = parents.iter().chain(children.iter()).copied().collect();
            let m = self.marginal(&all);
            let parent_len: usize = f.rows();
            let child_len = f.row_len();
            for pr in 0..parent_len {
                let mass: f64 = (0..child_len).map(|c| m.p[pr * child_len + c]).sum();
                if mass <= MASS_TOL {
                    continue;
                }
                for c in 0..child_len {
                    let dev = (m.p[pr * child_len + c] / mass - f.prob(pr, c)).abs();
                    if dev > MASS_TOL {
                        return Err(ProbError::FactorReproduction { factor: i, dev });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.alphabets.iter().map(|a| a.size).collect()
    }

    pub fn size_of(&self, v: Var) -> usize {
        self.alphabets[v.index()].size
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Marginal over `vars` (in the given order), row-major.
    pub fn marginal(&self, vars: &[Var]) -> Marginal {
        let sizes = self.sizes();
        let out_sizes: Vec<usize> = vars.iter().map(|v| sizes[v.index()]).collect();
        let total: usize = out_sizes.iter().product();
        let mut p = vec![0.0; total];
        let mut idx = vec![0usize; 8];
        for (flat, &mass) in self.pmf.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            unflatten(flat, &sizes, &mut idx);
            let mut out = 0usize;
            for (k, v) in vars.iter().enumerate() {
                out = out * out_sizes[k] + idx[v.index()];
            }
            p[out] += mass;
        }
        Marginal { vars: vars.to_vec(), sizes: out_sizes, p }
    }

    /// Joint entropy `H(vars)` in bits.
    pub fn entropy(&self, vars: &[Var]) -> f64 {
        entropy_bits(&self.marginal(vars).p)
    }

    /// Conditional mutual information `I(a; b | c)` in bits, computed as
    /// `H(a,c) + H(b,c) - H(a,b,c) - H(c)`. The three sets must be disjoint.
    /// Negative round-off within [`INFO_CLAMP_TOL`] clamps to zero.
    pub fn cond_mutual_info(&self, a: &[Var], b: &[Var], c: &[Var]) -> Result<f64, ProbError> {
        let mut seen = std::collections::BTreeSet::new();
        for v in a.iter().chain(b).chain(c) {
            if !seen.insert(*v) {
                return Err(ProbError::OverlappingSets);
            }
        }
        let ac: Vec<Var> = a.iter().chain(c).copied().collect();
        let bc: Vec<Var> = b.iter().chain(c).copied().collect();
        let abc: Vec<Var> = a.iter().chain(b).chain(c).copied().collect();
        let h_c = if c.is_empty() { 0.0 } else { self.entropy(c) };
        let value = self.entropy(&ac) + self.entropy(&bc) - self.entropy(&abc) - h_c;
        if value < -INFO_CLAMP_TOL {
            return Err(ProbError::NumericalInstability(value));
        }
        Ok(value.max(0.0))
    }
}

/// `-sum p log2 p` with `0 log 0 := 0`.
pub fn entropy_bits(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &x in p {
        if x > 0.0 {
            h -= x * x.log2();
        }
    }
    h
}

fn unflatten(mut flat: usize, sizes: &[usize], out: &mut [usize]) {
    for i in (0..sizes.len()).rev() {
        out[i] = flat % sizes[i];
        flat /= sizes[i];
    }
}

/// Row-major flatten of `idx` against `sizes`.
pub fn flatten(idx: &[usize], sizes: &[usize]) -> usize {
    let mut flat = 0;
    for (i, &s) in sizes.iter().enumerate() {
        debug_assert!(idx[i] < s);
        flat = flat * s + idx[i];
    }
    flat
}
