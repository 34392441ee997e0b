//! Power delivery network simulation for wafer-scale dielet assemblies.
//!
//! The crate builds the delivery network of a (topology, application)
//! pair on a wafer-scale interposer, solves it for the DC operating point
//! and the load-step transient, and reduces the results to comparable
//! figures of merit:
//!
//! - [`platform`]: feature-dimension catalog, decap stages, application specs
//! - [`floorplan`]: usable-area fractions, tile layouts, dielet placement
//! - [`parasitics`]: R/L/C element values from geometry
//! - [`netlist`]: per-topology PDN graph builders and the interchange format
//! - [`solver`]: sparse MNA, DC operating point, trapezoidal transient
//! - [`metrics`]: figures of merit, baseline normalization, ranking
//! - [`scenario`]: config-driven end-to-end runs and the comparison matrix

pub mod error;
pub mod floorplan;
pub mod metrics;
pub mod netlist;
pub mod parasitics;
pub mod platform;
pub mod scenario;
pub mod solver;

pub use error::{Error, Result};
