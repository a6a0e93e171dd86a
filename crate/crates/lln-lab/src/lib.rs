//! Desk-scale Monte Carlo laboratory for weak laws of large numbers under
//! weak dependence and heavy tails.
//!
//! The crate simulates ensembles of dependent, non-identically distributed
//! sequences, evaluates the hypothesis functionals of four convergence laws
//! analytically or empirically, and issues verdicts validated against
//! closed-form oracles.
//!
//! Module map:
//!
//! * [`tailcalc`] — scalar distribution calculus (tails, truncated moments).
//! * [`procgen`] — the catalog of dependent-sequence generators with exact
//!   conditional-mean oracles.
//! * [`mcengine`] — reproducible parallel ensemble simulation and estimation
//!   primitives.
//! * [`hypotheses`] — evaluation of the condition functionals (Cesàro UI,
//!   compensator drift, sum-conditioned drift, tail profiles).
//! * [`diagnostics`] — theorem-level checks turning conditions plus
//!   conclusion curves into verdicts.
//! * [`cli`] — batch experiment runner emitting plot-ready tables.

pub mod cli;
pub mod diagnostics;
pub mod hypotheses;
pub mod mcengine;
pub mod procgen;
pub mod quad;
pub mod rng;
pub mod tailcalc;
