//! Toolkit for the two-user interference channel with destination
//! cooperation: two full-duplex receivers that can also transmit in-band and
//! relay functions of their past observations to each other.
//!
//! The crate covers two channel models:
//!
//! * the **linear-deterministic (LD) model**, where signals are vectors over
//!   a prime field and channel gains are down-shift matrices truncating
//!   low-order levels, and
//! * the **Gaussian model** with complex gains normalized to a single phase
//!   parameter.
//!
//! For both models it evaluates the five sum-capacity upper bounds and the
//! matching achievable sum-rates (exactly equal for LD; within a uniform
//! 43-bit gap for Gaussian), and it simulates the LD coding schemes
//! bit-exactly, time step by time step.
//!
//! Module map:
//!
//! * [`gf_linalg`] — finite-field vectors/matrices, shift matrices, rank,
//!   and linear solving (the substrate of the LD model).
//! * [`channel`] — channel parameter containers, Gaussian phase
//!   normalization, and the Gaussian-to-level mapping.
//! * [`bounds`] — closed-form sum-capacity upper bounds for both models,
//!   plus the level-domain "primed" surrogate bounds.
//! * [`info_calc`] — exact entropies and mutual informations for linear
//!   functions of uniform field vectors (rank) and of independent Gaussians
//!   (log-det).
//! * [`polytope`] — exact rational linear-inequality systems,
//!   Fourier–Motzkin elimination, and linear maximization.
//! * [`schemes`] — achievable-rate evaluation: block-Markov nulling
//!   closed forms, compress-and-forward constraint generation, fallbacks,
//!   and the regime-composition logic.
//! * [`simulator`] — bit-exact time-stepped execution of the LD network
//!   with causal full-duplex destinations.
//! * [`cli`] — command-line front end: verification sweeps and data
//!   emission.

pub mod bounds;
pub mod channel;
pub mod cli;
pub mod gf_linalg;
pub mod info_calc;
pub mod polytope;
pub mod schemes;
pub mod simulator;
