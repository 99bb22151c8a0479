//! Realization of two-level hierarchical digraph collections as excitable networks.

pub mod analysis;
pub mod exec;
pub mod hierarchy;
pub mod integrator;
pub mod presets;
pub mod vectorfield;
pub mod workbench;
