//! Random codebook generation.
//!
//! Every codeword gets its own counter-mode stream keyed by the codebook
//! seed and tagged with its layer and entry index, so regeneration is
//! deterministic and independent of generation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Layout, SchemeConfig, SimError, Tables};

const TAG_U: u64 = 1;
const TAG_V: u64 = 2;
const TAG_V1: u64 = 3;
const TAG_V2: u64 = 4;

/// Samples one symbol from a probability row.
pub fn draw(rng: &mut impl Rng, row: &[f64]) -> usize {
    let mut x: f64 = rng.gen();
    let mut last = 0;
    for (i, &p) in row.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last = i;
        if x < p {
            return i;
        }
        x -= p;
    }
    last // rounding slack lands on the last supported symbol
}

/// All four codeword layers of one realized code.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub seed: u64,
    pub n: usize,
    pub u_words: Vec<Vec<usize>>,
    pub v_words: Vec<Vec<usize>>,
    pub v1_words: Vec<Vec<usize>>,
    pub v2_words: Vec<Vec<usize>>,
}

fn entry_rng(seed: u64, tag: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 40) | index as u64);
    rng
}

/// Draws the layered codebook for `cfg` from `seed`.
///
/// Layer hierarchy: `u` words are i.i.d. from `p(u)`; each `v` word is drawn
/// positionwise from `p(v|u)` against its cloud word; each `v_i` word from
/// the marginal `p(v_i|v)` against its context's `v` word.
pub fn generate_codebook(cfg: &SchemeConfig, t: &Tables, seed: u64) -> Result<Codebook, SimError> {
    cfg.validate()?;
    let lay = Layout::new(cfg.sizes);
    let cells = (cfg.sizes.na + lay.v_count() + lay.v1_count() + lay.v2_count()) as u128
        * cfg.n as u128;
    if cells > cfg.caps.codebook as u128 {
        return Err(SimError::CapExceeded {
            what: "codebook",
            need: cells,
            cap: cfg.caps.codebook,
        });
    }

    let n = cfg.n;
    let u_words: Vec<Vec<usize>> = (0..cfg.sizes.na)
        .map(|k| {
            let mut rng = entry_rng(seed, TAG_U, k);
            (0..n).map(|_| draw(&mut rng, &t.p_u)).collect()
        })
        .collect();

    let v_words: Vec<Vec<usize>> = (0..lay.v_count())
        .map(|idx| {
            let mut rng = entry_rng(seed, TAG_V, idx);
            let k = idx / (lay.s.n1c * lay.s.n2c * lay.nr());
            let uw = &u_words[k];
            (0..n)
                .map(|pos| draw(&mut rng, &t.p_v[uw[pos] * t.kv..(uw[pos] + 1) * t.kv]))
                .collect()
        })
        .collect();

    let sat = |tag: u64, count: usize, per_ctx: usize, table: &[f64], kk: usize| -> Vec<Vec<usize>> {
        (0..count)
            .map(|idx| {
                let mut rng = entry_rng(seed, tag, idx);
                let vw = &v_words[idx / per_ctx];
                (0..n)
                    .map(|pos| draw(&mut rng, &table[vw[pos] * kk..(vw[pos] + 1) * kk]))
                    .collect()
            })
            .collect()
    };
    let per1 = lay.s.n1d * lay.s.nd1 * lay.s.nl1;
    let per2 = lay.s.n2d * lay.s.nd2 * lay.s.nl2;
    let v1_words = sat(TAG_V1, lay.v1_count(), per1, &t.p_v1, t.k1);
    let v2_words = sat(TAG_V2, lay.v2_count(), per2, &t.p_v2, t.k2);

    Ok(Codebook { seed, n, u_words, v_words, v1_words, v2_words })
}
