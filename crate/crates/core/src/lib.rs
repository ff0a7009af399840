//! Exact and semiclassical propagation for one-dimensional systems, with the
//! Kerr oscillator `H = (q² + p²)²` as the analytic testbed.
//!
//! Units: ħ = 1. Coherent states have unit width.

pub mod caustics;
pub mod error;
pub mod grid;
pub mod linear_metaplectic;
pub mod phase_complex;
pub mod quantum;
pub mod root_search;
pub mod semiclassical;
pub mod system;

pub use error::{Error, Result};
pub use grid::{Axis, ComplexField2D, GridSpec, TimeSeries, WaveFunction};
pub use phase_complex::{ComplexMonodromy, ComplexPhasePoint, Monodromy2, PhasePoint};
pub use system::{FlowResult, KerrTimes, SystemId};
