//! Quantum samplers built from a driven Harper Hamiltonian on the torus.
//!
//! The crate builds Floquet and drifted propagators by split-step
//! integration, compares them against Haar-random unitaries with
//! random-matrix diagnostics, and estimates k-frame potentials of sampler
//! families. A classical counterpart provides Poincaré sections of the same
//! Hamiltonian.
//!
//! ```
//! use qsampler_core::{floquet_propagator, eigenphases, HarperParams};
//!
//! let u = floquet_propagator(&HarperParams::u_ta(31), 124).unwrap();
//! assert!(u.defect() < 1e-10);
//! assert_eq!(eigenphases(&u).len(), 31);
//! ```

pub mod classical;
pub mod diagnostics;
pub mod error;
pub mod harper;
pub mod io;
pub mod linalg;
pub mod samplers;
pub mod weyl;

pub use classical::{Integrator, PhasePoint, PoincareSection};
pub use diagnostics::{
    cue_surmise_cdf, cue_surmise_pdf, ipr, ipr_set, spacing_sample, trans_moments,
    transition_matrix, HusimiGrid, MomentReport, SpacingSample, SurmiseForm, TransitionMatrix,
};
pub use error::{Error, Result};
pub use harper::{
    drift_propagator, floquet_propagator, h0_eigenbasis, Basis, BasisLabel, DriftSchedule,
    HarperParams, HarperRates, Param,
};
pub use linalg::{eigenphases, ComplexMatrix, Hermitian, StateVector, Unitary, C64};
pub use samplers::{
    frame_potentials, haar_unitary, sample_pair_traces, EpsilonReport, FramePotentialEstimate,
    Sampler, SamplerSpec,
};
pub use weyl::{op_decompose, DisplacementIndex, OperatorCoefficients};

/// Library version recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
