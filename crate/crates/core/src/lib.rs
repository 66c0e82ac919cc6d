//! Coherent (pure-dephasing) dynamics of multi-level quantum systems coupled
//! to nonstationary, non-Markovian random telegraph noise.
//!
//! The off-diagonal element of the reduced density matrix for a level pair
//! factorizes as ρ_nm(t) = e^{−iω t} F(t) ρ_nm(0), where the decoherence
//! function F(t) is the noise average of the accumulated random phase. This
//! crate computes F(t) through several independent backends that
//! cross-validate each other:
//!
//! * [`closed_form`] — exact time-domain expression in the memoryless limit;
//! * [`laplace`] — the Laplace-domain solution F̃(p) as an explicit rational
//!   function, inverted exactly via polynomial roots and residues;
//! * [`contour`] — numerical inverse Laplace transform on a deformed
//!   (Talbot-type) contour;
//! * [`volterra`] — direct time stepping of the coupled Volterra
//!   integro-differential equations for the partial averages;
//! * [`mc`] — Monte Carlo averaging over explicitly sampled telegraph
//!   trajectories, with statistical error bars.
//!
//! [`molecule`] assembles per-pair decoherence functions into an N-level
//! reduced density matrix and the l1-norm coherence.

pub mod backend;
pub mod closed_form;
pub mod contour;
pub mod error;
pub mod kernel;
pub mod laplace;
pub mod mc;
pub mod molecule;
pub mod params;
pub(crate) mod poly;
pub mod series;
pub mod volterra;

pub use backend::{decoherence_series, BackendSpec};
pub use error::{Error, Result};
pub use kernel::{KernelKind, MemoryKernel};
pub use params::RtnPairParams;
pub use series::{uniform_grid, Backend, DecoherenceSeries, StdErr};
