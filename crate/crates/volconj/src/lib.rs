//! Numerical evidence for volume conjectures of colored Jones polynomials at
//! the root of unity `t = exp(2πi/(N+½))`.
//!
//! The crate is organised bottom-up:
//!
//! * [`numeric`] — multiprecision complex numbers, evaluation points,
//!   quantum integers and q-Pochhammer tables;
//! * [`special`] — dilogarithm, Lobachevsky function, quantum dilogarithm;
//! * [`links`] — the link families, their JSJ profiles and volumes;
//! * [`jones`] — colored Jones evaluators (factorised engine, windowed sums,
//!   literal nested transcriptions);
//! * [`tv`] — Turaev–Viro invariants of the link complements;
//! * [`potential`] — potential functions, critical points, deformed volumes;
//! * [`asymptotics`] — growth tables, extrapolation and saddle predictions.

pub mod asymptotics;
pub mod error;
pub mod jones;
pub mod links;
pub mod numeric;
pub mod potential;
pub mod special;
pub mod tv;

pub use error::{Error, Result};
pub use jones::{SumWindow, DEFAULT_TERM_BUDGET};
pub use links::{LinkFamily, VolumeConstants};
pub use numeric::{make_eval_point, Cx, EvalPoint, Precision};
