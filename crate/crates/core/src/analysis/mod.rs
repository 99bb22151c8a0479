//! Checks that a synthesized field realizes its hierarchy.

mod eigen;
mod itinerary;
mod realization;
mod residuals;
mod witness;

use thiserror::Error;

use crate::integrator::IntegrationError;
use crate::vectorfield::FieldError;

pub use eigen::{
    check_edge_eigen_correspondence, eigen_at, AttributedEigenvalue, EigenCheck, VertexEigenCheck,
    EIGEN_TOL,
};
pub use itinerary::{
    check_itinerary_against, extract_itinerary, ItineraryCheck, ItineraryConfig, ItineraryReport, Visit,
    VisitKind,
};
pub use realization::{
    itineraries_of, verify_realization, Criterion, RealizationOptions, RealizationReport, ScenarioItineraries,
    ScenarioRun,
};
pub use residuals::{verify_equilibria, ResidualReport};
pub use witness::{
    run_witness, run_witnesses, witness_initial_condition, BackwardOutcome, WitnessConfig, WitnessResult,
    WitnessSpec,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("NumericalFailure: eigenvalue iteration did not converge at {0}")]
    NumericalFailure(String),
    #[error("NotAnEdge: ({}, {}) is not an edge of the superstructure", .j + 1, .k + 1)]
    NotAnEdge { j: usize, k: usize },
    #[error("witness amplitude delta = {0} must be positive and below 1")]
    BadDelta(f64),
    #[error("vertex {vertex} out of range for {n} superstructure vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}
