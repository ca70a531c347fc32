//! Transmit covariance optimization for simultaneous wireless information
//! and power transfer (SWIPT) over MIMO broadcast channels.
//!
//! The library answers one family of questions: given an information channel
//! `H` and an energy channel `G` seen from a common multi-antenna
//! transmitter, which transmit covariance matrices are Pareto-optimal for
//! the tradeoff between information rate and harvested power, and what does
//! the full rate-energy boundary look like for each receiver architecture?
//!
//! Organization:
//!
//! - [`linalg`]: complex Hermitian eigendecompositions and SVDs with a
//!   deterministic phase convention, plus seeded Gaussian matrix sampling.
//! - [`channel`], [`covariance`], [`boundary`]: the domain types shared by
//!   every solver (channel pairs with cached factorizations, PSD transmit
//!   covariances with a trace budget, rate-energy boundary curves).
//! - [`metrics`]: the two scalar figures of merit, `log2 det(I + H S H^H)`
//!   and `zeta * tr(G S G^H)`.
//! - [`solvers`]: energy beamforming, water-filling, and the
//!   harvest-constrained rate maximization solved by a two-dimensional
//!   ellipsoid method on the dual, with closed forms for MISO channels and
//!   co-located receivers.
//! - [`regions`]: boundary tracers for the separated-receiver region, the
//!   co-located outer bound, time switching, and power splitting.
//! - [`oracle`]: independent brute-force verifiers (grid search, random
//!   beam sampling, region containment) used by tests.

pub mod boundary;
pub mod channel;
pub mod covariance;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod regions;
pub mod solvers;

pub use boundary::{REBoundary, REPoint, Scheme, TraceMetadata, TracedPoint};
pub use channel::{ChannelPair, NoiseSplit};
pub use covariance::TransmitCovariance;
pub use error::{Error, Result};
pub use metrics::{harvested_power, mutual_information};
pub use solvers::colocated::harvest_constrained_rate_colocated;
pub use solvers::energy::energy_beamforming;
pub use solvers::miso::{harvest_constrained_rate_miso, miso_miso_closed_form};
pub use solvers::tradeoff::{harvest_constrained_rate, lagrangian_maximizer};
pub use solvers::waterfill::maximize_rate;
pub use solvers::{DualPoint, TradeoffSolution};

/// Complex scalar used throughout: `f64` real and imaginary parts.
pub type C64 = num_complex::Complex<f64>;
/// Dynamically sized complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dynamically sized complex column vector.
pub type CVector = nalgebra::DVector<C64>;
