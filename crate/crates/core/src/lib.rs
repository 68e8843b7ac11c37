//! Generalized continuity equations for one-dimensional Schrödinger problems.
//!
//! Two wave fields living in different potential landscapes `V1`, `V2` are
//! linked by
//!
//! ```text
//! ∂t(Ψ1 Ψ2*) + (1/2i) ∂x(Ψ2* ∂xΨ1 − Ψ1 ∂xΨ2*) = i (V2 − V1) Ψ1 Ψ2*
//! ```
//!
//! This crate solves the stationary and time-dependent problems needed to
//! evaluate every term of that balance law and checks it numerically:
//!
//! * [`numerics`]: grids, sampled complex fields, finite differences, Numerov.
//! * [`potentials`]: piecewise-constant landscapes, `F(x) = σx + ρ`, equality
//!   and local-symmetry domains.
//! * [`stationary`]: exact transfer-matrix scattering states and second
//!   solutions on sub-domains.
//! * [`currents`]: the two-field current `J12`, the sub-domain Wronskian `Jχ`,
//!   the non-local invariants `Q`/`Q̃`, and the two-landscape amplitude
//!   reconstruction.
//! * [`sun`]: SU(N) Cartan and ladder generators, potential decomposition and
//!   commutator identities.
//! * [`timedep`]: Crank–Nicolson evolution and the discrete continuity residual.
//! * [`scenario`]: JSON scenario files driving the `gencont` binary.
//!
//! Units follow `ħ = m = 1`, so `H = −½ ∂²/∂x² + V(x)` and `k = √(2E)`.

mod cjson;
pub mod currents;
pub mod error;
pub mod numerics;
pub mod potentials;
pub mod scenario;
pub mod stationary;
pub mod sun;
pub mod timedep;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
