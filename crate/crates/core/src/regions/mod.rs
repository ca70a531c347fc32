//! Boundary tracers for every receiver architecture.
//!
//! Each tracer returns an [`crate::boundary::REBoundary`] whose energies
//! already include the conversion efficiency passed in. Sweep samples are
//! independent, so tracers evaluate them in parallel; results are reduced
//! by grid index and therefore identical to a sequential run.

mod envelope;
pub mod outer;
pub mod power_splitting;
pub mod separated;
pub mod simo;
pub mod sweep;
pub mod time_switching;

pub use outer::colocated_outer_bound;
pub use power_splitting::{
    antenna_switching, antenna_switching_union, default_split_candidates,
    power_splitting_envelope, uniform_power_splitting, AntennaPartition, SplitVector,
};
pub use separated::separated_boundary;
pub use simo::{simo_power_splitting_closed, siso_power_splitting};
pub use sweep::{CornerHandling, SweepSpec};
pub use time_switching::{time_switching_fixed, time_switching_flexible};
