//! Exact distributions, hitting probabilities, Laplace transforms and
//! Monte Carlo samplers for fractional and subordinated Poisson point
//! processes.
//!
//! The crate covers six counting-process families built by time-changing a
//! homogeneous Poisson process: the space-fractional process (stable
//! subordinator), the time-fractional process (inverse stable clock), their
//! space-time combination, processes driven by a catalogued Bernstein
//! function, superpositions of independent subordinators (optionally run at
//! an inverse-stable time), and the Poisson process at a generalized grey
//! Brownian clock. For each family it provides:
//!
//! - exact marginal pmfs, probability generating functions and moments
//!   ([`processes`]);
//! - first-passage (hitting) probabilities, exact, asymptotic and by
//!   simulation ([`hitting`]);
//! - reproducible samplers for the subordinators and the composed counts
//!   ([`samplers`]), with a deterministic parallel Monte Carlo driver
//!   ([`mc`]);
//! - Laplace-transform machinery quantifying which families are renewal
//!   processes and which are not ([`renewal`]);
//! - Erdelyi-Kober integrals and fractional powers of t^{1-2H} d/dt with
//!   Caputo-style regularization, used to verify the governing equations
//!   numerically ([`fracops`]);
//! - the scalar special functions everything rests on ([`specfun`]).
//!
//! Monte Carlo batches run in parallel with `rayon` when the default
//! `parallel` feature is enabled; results are independent of the worker
//! count because streams are assigned per fixed-size chunk, never per
//! thread.

pub mod bernstein;
pub mod error;
pub mod fracops;
pub mod hitting;
pub mod mc;
pub mod processes;
pub mod quad;
pub mod renewal;
pub mod rng;
pub mod samplers;
pub mod specfun;
pub mod stats;

pub use bernstein::BernsteinFunction;
pub use error::{Error, Result};
pub use processes::{PmfTable, ProcessSpec};
pub use rng::{McEstimate, RngStream};
