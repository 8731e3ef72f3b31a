//! Encoding and decoding on a realized codebook.

use rand::Rng;

use super::codebook::{draw, Codebook};
use super::typicality::cond_typical;
use super::{pad, unpad, Layout, SchemeConfig, SplitMessage, Tables};

/// Everything the encoder commits to before sampling `x`: the codeword
/// indices implied by the message pair and the randomization indices.
#[derive(Debug, Clone, Copy)]
pub struct Selection {
    /// Index of the common-satellite word.
    pub ctx: usize,
    pub v1_index: usize,
    pub v2_index: usize,
    pub l1: usize,
    pub l2: usize,
    /// No jointly typical Marton bin pair existed; (0, 0) was used.
    pub fallback: bool,
}

/// Result of one encoding attempt.
#[derive(Debug, Clone)]
pub struct EncodeOutcome {
    pub x: Vec<usize>,
    pub selection: Selection,
}

#[derive(Debug, Clone, Copy)]
pub struct DecodeOutcome {
    /// The unique decoded message, if exactly one distinct message survived
    /// the typicality test.
    pub message: Option<u64>,
    /// Number of typical index tuples (diagnostic).
    pub typical: usize,
}

/// Deterministic Marton bin selection: the first bin pair, in lexicographic
/// order, whose satellite words are conditionally typical with the context
/// word. Returns `(0, 0)` with the fallback flag when no pair fits.
pub(crate) fn marton_select(
    cb: &Codebook,
    cfg: &SchemeConfig,
    t: &Tables,
    ctx: usize,
    m1d: usize,
    d1: usize,
    m2d: usize,
    d2: usize,
) -> (usize, usize, bool) {
    let lay = Layout::new(cfg.sizes);
    let vw = &cb.v_words[ctx];
    for l1 in 0..cfg.sizes.nl1 {
        let w1 = &cb.v1_words[lay.v1_index(ctx, m1d, d1, l1)];
        for l2 in 0..cfg.sizes.nl2 {
            let w2 = &cb.v2_words[lay.v2_index(ctx, m2d, d2, l2)];
            let pairs: Vec<(usize, usize)> = (0..cb.n)
                .map(|pos| (vw[pos], w1[pos] * t.k2 + w2[pos]))
                .collect();
            if cond_typical(&pairs, &t.marton, cfg.delta) {
                return (l1, l2, false);
            }
        }
    }
    (0, 0, true)
}

/// Deterministic part of the encoder: pads the `a`/`b` segments, folds the
/// given randomization indices into the codeword chain, and scans for the
/// Marton bin pair.
pub fn select_codewords(
    cb: &Codebook,
    cfg: &SchemeConfig,
    t: &Tables,
    m1: SplitMessage,
    m2: SplitMessage,
    d: usize,
    d1: usize,
    d2: usize,
) -> Selection {
    let lay = Layout::new(cfg.sizes);
    let s = cfg.sizes;
    let k = pad(m1.a, m2.a, s.na);
    let kb = pad(m1.b, m2.b, s.nb);
    let ctx = lay.v_index(k, m1.c, m2.c, lay.fold_r(kb, d));
    let (l1, l2, fallback) = marton_select(cb, cfg, t, ctx, m1.d, d1, m2.d, d2);
    Selection {
        ctx,
        v1_index: lay.v1_index(ctx, m1.d, d1, l1),
        v2_index: lay.v2_index(ctx, m2.d, d2, l2),
        l1,
        l2,
        fallback,
    }
}

/// Encodes the message pair: draws the Wyner randomness uniformly, commits
/// to codewords via [`select_codewords`], and samples `x` positionwise from
/// the realized satellite pair.
pub fn encode(
    cb: &Codebook,
    cfg: &SchemeConfig,
    t: &Tables,
    m1: SplitMessage,
    m2: SplitMessage,
    rng: &mut impl Rng,
) -> EncodeOutcome {
    let s = cfg.sizes;
    let d = if s.nd > 1 { rng.gen_range(0..s.nd) } else { 0 };
    let d1 = if s.nd1 > 1 { rng.gen_range(0..s.nd1) } else { 0 };
    let d2 = if s.nd2 > 1 { rng.gen_range(0..s.nd2) } else { 0 };
    let selection = select_codewords(cb, cfg, t, m1, m2, d, d1, d2);
    let w1 = &cb.v1_words[selection.v1_index];
    let w2 = &cb.v2_words[selection.v2_index];
    let x = (0..cb.n)
        .map(|pos| {
            let pr = w1[pos] * t.k2 + w2[pos];
            draw(rng, &t.p_x[pr * t.kx..(pr + 1) * t.kx])
        })
        .collect();
    EncodeOutcome { x, selection }
}

/// Joint typicality decoding for `receiver` given its channel output and
/// the other receiver's message.
///
/// The search runs over every index coordinate the receiver cannot deduce:
/// the cloud index, its own `c`/`d` segments, the folded randomization
/// coordinate, the Wyner randomness, and the Marton bin. With `use_side`
/// the other message's `c`-segment is fixed from the side information;
/// without it that coordinate is searched too (worst case). Either way the
/// side message is used to un-pad the recovered `a`/`b` segments, and
/// uniqueness is judged on the decoded message projection: exactly one
/// distinct message among the typical candidates, anything else an error.
pub fn decode(
    cb: &Codebook,
    cfg: &SchemeConfig,
    t: &Tables,
    receiver: usize,
    y: &[usize],
    side: SplitMessage,
    use_side: bool,
) -> DecodeOutcome {
    assert_eq!(y.len(), cb.n);
    let lay = Layout::new(cfg.sizes);
    let s = cfg.sizes;
    let (nc_own, nd_own, n_wyner, n_bin, nc_other, ki) = if receiver == 1 {
        (s.n1c, s.n1d, s.nd1, s.nl1, s.n2c, t.k1)
    } else {
        (s.n2c, s.n2d, s.nd2, s.nl2, s.n1c, t.k2)
    };
    let table = if receiver == 1 { &t.dec1 } else { &t.dec2 };
    let other_c = if use_side { side.c..side.c + 1 } else { 0..nc_other };

    let mut messages: Vec<u64> = Vec::new();
    let mut typical = 0usize;
    for k in 0..s.na {
        let uw = &cb.u_words[k];
        for mc in 0..nc_own {
            for oc in other_c.clone() {
                for r in 0..lay.nr() {
                    let ctx = if receiver == 1 {
                        lay.v_index(k, mc, oc, r)
                    } else {
                        lay.v_index(k, oc, mc, r)
                    };
                    let vw = &cb.v_words[ctx];
                    for md in 0..nd_own {
                        for di in 0..n_wyner {
                            for li in 0..n_bin {
                                let wi = if receiver == 1 {
                                    &cb.v1_words[lay.v1_index(ctx, md, di, li)]
                                } else {
                                    &cb.v2_words[lay.v2_index(ctx, md, di, li)]
                                };
                                let pairs: Vec<(usize, usize)> = (0..cb.n)
                                    .map(|pos| {
                                        ((uw[pos] * t.kv + vw[pos]) * ki + wi[pos], y[pos])
                                    })
                                    .collect();
                                if !cond_typical(&pairs, table, cfg.delta) {
                                    continue;
                                }
                                typical += 1;
                                let msg = cfg.join(
                                    receiver,
                                    SplitMessage {
                                        a: unpad(k, side.a, s.na),
                                        b: unpad(r / s.nd, side.b, s.nb),
                                        c: mc,
                                        d: md,
                                    },
                                );
                                if !messages.contains(&msg) {
                                    messages.push(msg);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let message = if messages.len() == 1 { Some(messages[0]) } else { None };
    DecodeOutcome { message, typical }
}
