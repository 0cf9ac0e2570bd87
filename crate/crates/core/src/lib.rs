//! Quantum baker's maps on N qubits and the statistics used to detect
//! chaos in them.
//!
//! The crate covers the full pipeline:
//!
//! - [`baker`]: the map family itself (a centered discrete Fourier
//!   transform, partial transforms, qubit shifts) applied either to state
//!   vectors or materialized as dense unitaries for cross-checking.
//! - [`perturb`]: stochastic single-qubit perturbations and the ensembles
//!   of all 2^t perturbation histories they generate.
//! - [`signatures`]: entropy growth and fidelity decay series.
//! - [`hyper`]: information/entropy trade-off of grouping measurements on
//!   a history ensemble (temporal, exhaustive, and genetic-search
//!   groupings) and the hypersensitivity parameter s.
//! - [`analytic`]: closed-form baseline curves (sphere packing, half-space
//!   partitions, product ensembles) plus a Monte Carlo oracle for them.
//!
//! States live in [`state`]; everything is plain `f64`/`Complex64`
//! numerics with no global state, so the whole crate is `Send + Sync`
//! friendly and deterministic for fixed seeds.

pub mod analytic;
pub mod baker;
pub mod error;
pub mod fourier;
pub mod hyper;
pub mod perturb;
pub mod signatures;
pub mod state;

pub use error::{Error, Result};
pub use state::{DensityMatrix, PureState, Spectrum, von_neumann_entropy};
