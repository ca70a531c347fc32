//! Time-switching tracers: the receiver alternates whole slots between
//! harvesting and decoding.

use crate::boundary::{PointFailure, REBoundary, Scheme, TraceMetadata, TracedPoint};
use crate::channel::ChannelPair;
use crate::error::{Error, Result};
use crate::regions::separated::check_zeta;
use crate::regions::sweep::SweepSpec;
use crate::solvers::waterfill::water_fill;

/// Sample count for the fixed-budget line (exact after linear
/// interpolation, the grid only aids plotting).
const LINE_POINTS: usize = 101;

/// Fixed per-slot power budget: each slot may spend up to `P`, so the
/// boundary is the straight line between the rate corner `(r_max, 0)` and
/// the energy corner `(0, h1 P)`.
pub fn time_switching_fixed(channels: &ChannelPair, power: f64, zeta: f64) -> Result<REBoundary> {
    require_colocated(channels)?;
    check_zeta(zeta)?;
    let gains = channels.h_gains();
    let r_max = water_fill(&gains, power).rate;
    let q_max = channels.h1() * power;
    let points = (0..LINE_POINTS)
        .map(|i| {
            let alpha = i as f64 / (LINE_POINTS - 1) as f64;
            TracedPoint::ok((1.0 - alpha) * r_max, alpha * q_max)
        })
        .collect();
    let metadata = TraceMetadata {
        n_points: LINE_POINTS,
        rho_points: None,
        solver_tol: None,
        failures: Vec::new(),
        ..Default::default()
    };
    Ok(REBoundary::assemble(Scheme::Ts1, points, metadata)?.with_energy_scaled(zeta))
}

/// Flexible average power budget, optionally peak-limited.
///
/// Harvesting a total `Q` costs `Q / h1` of the energy budget no matter
/// how briefly the transmitter beams, so without a peak limit the
/// harvesting slot shrinks to nothing and the rate is the water-filling
/// rate at the residual budget `P - Q/h1`. With a peak limit `P_peak` the
/// harvesting slot must last `alpha = Q / (h1 P_peak)`, and the decoding
/// slot water-fills the per-slot budget `(P - Q/h1) / (1 - alpha)` capped
/// at `P_peak`.
pub fn time_switching_flexible(
    channels: &ChannelPair,
    power: f64,
    zeta: f64,
    sweep: &SweepSpec,
    peak_power: Option<f64>,
) -> Result<REBoundary> {
    require_colocated(channels)?;
    check_zeta(zeta)?;
    if !(power > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "transmit power must be positive, got {power}"
        )));
    }
    if let Some(peak) = peak_power {
        if peak < power {
            return Err(Error::InvalidParameter(format!(
                "peak power {peak} must be at least the average power {power}"
            )));
        }
    }
    let gains = channels.h_gains();
    let h1 = channels.h1();
    let q_max = h1 * power;
    let scheme = if peak_power.is_some() {
        Scheme::Ts2Peak
    } else {
        Scheme::Ts2
    };
    if h1 <= 0.0 {
        let metadata = TraceMetadata {
            n_points: 1,
            solver_tol: None,
            ..Default::default()
        };
        return Ok(
            REBoundary::assemble(scheme, vec![TracedPoint::ok(0.0, 0.0)], metadata)?
                .with_energy_scaled(zeta),
        );
    }
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (i, q) in sweep.values(0.0, q_max).into_iter().enumerate() {
        match flexible_rate_at(&gains, h1, power, peak_power, q) {
            Ok(rate) => points.push(TracedPoint::ok(rate, q)),
            Err(e) => failures.push(PointFailure {
                index: i,
                energy: q,
                message: e.to_string(),
            }),
        }
    }
    let metadata = TraceMetadata {
        n_points: sweep.n_points(),
        rho_points: None,
        solver_tol: None,
        failures,
        ..Default::default()
    };
    Ok(REBoundary::assemble(scheme, points, metadata)?.with_energy_scaled(zeta))
}

/// Rate of the flexible scheme at one harvested power `q`, in the
/// zero-slot limit (`peak_power = None`) or at the peak-limited optimal
/// slot split.
pub fn flexible_rate_at(
    gains: &[f64],
    h1: f64,
    power: f64,
    peak_power: Option<f64>,
    q: f64,
) -> Result<f64> {
    let q_max = h1 * power;
    if q > q_max * (1.0 + 1e-12) {
        return Err(Error::InfeasibleHarvest { q_bar: q, q_max });
    }
    let residual = (power - q / h1).max(0.0);
    match peak_power {
        None => Ok(water_fill(gains, residual).rate),
        Some(peak) => {
            let alpha = (q / (h1 * peak)).min(1.0);
            if alpha >= 1.0 {
                return Ok(0.0);
            }
            let slot_budget = (residual / (1.0 - alpha)).min(peak);
            Ok((1.0 - alpha) * water_fill(gains, slot_budget).rate)
        }
    }
}

fn require_colocated(channels: &ChannelPair) -> Result<()> {
    if !channels.is_colocated() {
        return Err(Error::InvalidParameter(
            "time-switching tracers require co-located channels".into(),
        ));
    }
    Ok(())
}
