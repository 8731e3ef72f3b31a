//! Rate-region tooling for the two-receiver discrete memoryless broadcast
//! channel with complementary receiver side information and a passive
//! eavesdropper.
//!
//! The crate is organised in four layers:
//!
//! * [`prob`] — finite joint distributions over the fixed variable chain
//!   `U -> V -> (V1,V2) -> X -> (Y1,Y2,Z)`, exact entropy / conditional
//!   mutual information in bits, and the auxiliary-substitution and
//!   time-sharing constructions used by the convexity arguments.
//! * [`algebra`] — symbolic linear rate constraints over uninterpreted
//!   information terms, preset constraint systems, Fourier–Motzkin
//!   elimination with nonnegative-combination certificates, and numeric
//!   equivalence checking of derived regions.
//! * [`geometry`] — 2-D rate-region polygons, corner-point analysis,
//!   convex hulls of unions, and CSV/SVG export.
//! * [`sim`] — layered random-coding simulations: superposition codebooks
//!   with one-time-pad, mutual-randomization, binning and Marton layers,
//!   joint-typicality decoding with side information, and exact per-codebook
//!   leakage by enumeration.
//!
//! [`suite`] bundles the end-to-end checks the CLI exposes as `suite`.

pub mod algebra;
pub mod geometry;
pub mod prob;
pub mod sim;
pub mod suite;
