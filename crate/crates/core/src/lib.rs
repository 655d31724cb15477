//! Direct readout of quantum state vectors through weighted projector sums.
//!
//! The expectation of the non-Hermitian operator |a><j|, built from a fixed
//! reference mode a, equals the state coefficient c_j times one global factor
//! shared by all j. Each such operator splits into a short weighted sum of
//! rank-one projectors whose expectation values are ordinary count rates, so
//! scanning j reads the state off coefficient by coefficient. This crate
//! implements the projector decompositions, measurement planning, shot-noise
//! simulation, reconstruction with error bounds, and the numerical studies
//! built on top of them.

pub mod basis;
pub mod decomp;
pub mod density;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod observable;
pub mod rng;
pub mod schmidt;
pub mod sparse;
pub mod state;
pub mod studies;

pub use basis::{Basis, Dims};
pub use decomp::de::{de_search, DESearchConfig, SearchOutcome};
pub use decomp::{
    decompose_column, ColumnOperator, ProjectorDecomposition, ProjectorTerm,
};
pub use density::{DensityMatrix, DominantMode};
pub use error::{Error, Result};
pub use measure::plan::{
    build_full_plan, choose_reference, expected_setting_count, MeasurementPlan,
    PlanCoefficient, PlanTerm, Setting,
};
pub use measure::reconstruct::{
    error_bounds, raw_coefficients, reconstruct, CoefficientError,
};
pub use measure::shot::{
    simulate_counts, BlockRecord, CountRecord, Measurement, NoiseMode, ShotModel,
    Source,
};
pub use observable::HermitianObservable;
pub use schmidt::{schmidt_decompose, SchmidtResult};
pub use sparse::SparseState;
pub use state::StateVector;
pub use studies::demo::{generate_demo_state, DemoStateParams};
pub use studies::mixed::{
    run_mixed_state_study, FidelityQuantiles, MixedStudyConfig, StudyCell, StudyResult,
};
pub use studies::tomography::{
    cross_validate, random_projector_settings, reconstruct_density_linear, BatchReport,
    CrossValidationOptions, CrossValidationReport,
};
pub use studies::{random_bipartite_state, random_density_matrix, random_pure_state};
