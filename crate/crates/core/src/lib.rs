//! Numerical laboratory for the almost Mathieu operator
//! `(H u)_n = u_{n+1} + u_{n-1} + 2 lambda cos(2 pi (n alpha + theta)) u_n`.
//!
//! The crate is organized around the quantities that drive the spectral
//! phase diagram: exact continued-fraction arithmetic for the frequency,
//! transfer-matrix cocycles and their periodic approximants, Lyapunov
//! exponents, finite-volume spectra, localization diagnostics, the
//! cohomological equation, and a parameter sweep that assembles the
//! phase portrait.
//!
//! Numerics are generic over the real field through [`scalar::Real`]
//! (`f32`/`f64`) and over matrix entries through [`scalar::MatScalar`]
//! (real or complexified); frequency arithmetic is exact big-rational.
//! Concrete `f64` aliases are re-exported at the crate root.

pub mod arithmetic;
pub mod cocycle;
pub mod localization;
pub mod lyapunov;
pub mod phaselab;
pub mod reducibility;
pub mod scalar;
pub mod spectrum;
pub mod tridiag;

pub use arithmetic::{ArithmeticError, BetaEstimate, Frequency};
pub use cocycle::{
    cayley_sum, gordon_growth, rotation_number_of, AmoParams, ApproximationGaps, CocycleError,
    GordonGrowth, Mat2, Mat2c64, Mat2f64, ScaledProduct, ScaledProductc64, ScaledProductf64,
};
pub use localization::{
    analyze_eigenpairs, good_fraction, good_fraction_median, sc_witness, EigenpairReport,
    LocalizationError, PhaseStatistics, ScWitness,
};
pub use lyapunov::{bj_reference, le_estimate, strip_profile, LeEstimate, StripProfile};
pub use phaselab::{
    classify_cell, run_sweep, CellFailure, Classification, PhaseCell, PhaselabError, SweepConfig,
    SweepReport, Thresholds,
};
pub use reducibility::{
    bloch_transport, solve_cohomological, BlochTransport, CohomologicalSolution, FourierSeries,
    ReducibilityError,
};
pub use scalar::{MatScalar, Real};
pub use spectrum::{
    bands_rational, duality_scale_check, ids, spectrum_measure, truncate, BandSet, EighResult,
    SpectrumError, TridiagonalOperator, TridiagonalOperatorf64,
};
pub use tridiag::SymTridiag;
