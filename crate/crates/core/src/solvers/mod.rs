//! Transmit covariance solvers.
//!
//! Three problems are solved here, all over Hermitian PSD covariances `S`
//! with `tr(S) <= P`:
//!
//! 1. maximize harvested power `tr(G S G^H)` — closed form, rank-one
//!    beamforming along the top right-singular vector of `G`
//!    ([`energy::energy_beamforming`]);
//! 2. maximize the information rate `log2 det(I + H S H^H)` — spatial
//!    multiplexing with water-filling power allocation
//!    ([`waterfill::maximize_rate`]);
//! 3. maximize the rate subject to a harvested-power floor
//!    `tr(G S G^H) >= q_bar` — a convex program solved through its
//!    two-dimensional Lagrange dual by the ellipsoid method
//!    ([`tradeoff::harvest_constrained_rate`]), with rank-one closed forms
//!    for single-antenna receivers ([`miso`]) and an eigenmode power
//!    allocation for co-located receivers ([`colocated`]).
//!
//! Internally every Lagrangian is written with natural logs, so the dual
//! variables are in nat units; reported rates are always bits per channel
//! use.

pub mod colocated;
mod ellipsoid;
pub mod energy;
pub mod miso;
pub mod tradeoff;
pub mod waterfill;

use crate::covariance::TransmitCovariance;

/// Default dual convergence tolerance.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default ellipsoid iteration cap.
pub const DEFAULT_MAX_ITER: usize = 5000;
/// Multiplicative margin kept on the strict dual-feasibility cone
/// `mu > lambda * g1`.
pub const EPS_FEAS: f64 = 1e-9;

/// Dual variables of the harvest-constrained rate problem: `lambda` prices
/// the harvested-power floor, `mu` prices the transmit power budget. Inside
/// the feasible cone `mu > lambda * g1` the Lagrangian maximizer is bounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPoint {
    pub lambda: f64,
    pub mu: f64,
}

impl DualPoint {
    pub fn new(lambda: f64, mu: f64) -> Self {
        Self { lambda, mu }
    }

    /// Strict feasibility with the [`EPS_FEAS`] margin.
    pub fn is_feasible(&self, g1: f64) -> bool {
        self.lambda >= 0.0 && self.mu > self.lambda * g1 * (1.0 + EPS_FEAS) + 1e-12
    }
}

/// Solution of the harvest-constrained rate maximization.
#[derive(Debug, Clone)]
pub struct TradeoffSolution {
    pub covariance: TransmitCovariance,
    /// Achieved rate, bits per channel use.
    pub rate: f64,
    /// Achieved harvested power at unit conversion efficiency.
    pub harvested: f64,
    /// Converged dual variables; `None` when the solution came from a
    /// closed form that never touches the dual.
    pub dual: Option<DualPoint>,
    pub iterations: usize,
    pub converged: bool,
}

impl TradeoffSolution {
    /// Dimensionless KKT residuals against a harvest floor `q_bar` and
    /// budget `power`: (harvest shortfall, budget excess, harvest
    /// complementary slackness, budget complementary slackness).
    pub fn residuals(&self, q_bar: f64, power: f64) -> [f64; 4] {
        let q = self.harvested;
        let tr = self.covariance.trace();
        let (lambda, mu) = match self.dual {
            Some(d) => (d.lambda, d.mu),
            None => (0.0, 0.0),
        };
        [
            (q_bar - q).max(0.0) / q_bar.abs().max(1.0),
            (tr - power).max(0.0) / power.max(1.0),
            (lambda * (q - q_bar)).abs() / (lambda * q_bar.abs()).max(1.0),
            (mu * (power - tr)).abs() / (mu * power).max(1.0),
        ]
    }
}
