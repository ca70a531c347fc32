//! Closed-form power-splitting curves for single-transmit-antenna and
//! single-antenna channels.

use crate::boundary::{REBoundary, Scheme, TraceMetadata, TracedPoint};
use crate::channel::NoiseSplit;
use crate::error::{Error, Result};
use crate::regions::separated::check_zeta;
use crate::regions::sweep::SweepSpec;
use crate::CVector;

/// Receive-vector channel (`M = 1`): splitting and combining commute, so
/// the whole power-splitting region is the closed curve
/// `rate = log2(1 + |h|^2 P - Q)` for `Q` in `[0, |h|^2 P]`.
pub fn simo_power_splitting_closed(
    h: &CVector,
    power: f64,
    zeta: f64,
    sweep: &SweepSpec,
) -> Result<REBoundary> {
    check_zeta(zeta)?;
    if !(power > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "transmit power must be positive, got {power}"
        )));
    }
    let gain = h.norm_squared();
    let q_max = gain * power;
    let points = sweep
        .values(0.0, q_max)
        .into_iter()
        .map(|q| TracedPoint::ok((1.0 + (q_max - q).max(0.0)).log2(), q))
        .collect();
    let metadata = TraceMetadata {
        n_points: sweep.n_points(),
        solver_tol: None,
        ..Default::default()
    };
    Ok(REBoundary::assemble(Scheme::SimoClosed, points, metadata)?.with_energy_scaled(zeta))
}

/// Single-antenna power splitting under an explicit antenna/processing
/// noise split. `h` is the channel power gain.
///
/// The decoder SNR at split ratio `rho` depends on where the unit noise
/// enters: all in processing gives `(1-rho) P h`; all at the antenna gives
/// `P h` independent of the split (the splitter scales signal and noise
/// alike); in between, `(1-rho) P h / (1 - rho sigma_a^2)`.
pub fn siso_power_splitting(
    h: f64,
    power: f64,
    noise: NoiseSplit,
    sweep: &SweepSpec,
) -> Result<REBoundary> {
    if !(h >= 0.0) || !(power > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need h >= 0 and power > 0, got ({h}, {power})"
        )));
    }
    let sigma_a_sq = noise.sigma_a_sq();
    let points = sweep
        .values(0.0, 1.0)
        .into_iter()
        .map(|rho| {
            let snr = if sigma_a_sq <= 0.0 {
                (1.0 - rho) * power * h
            } else if sigma_a_sq >= 1.0 {
                power * h
            } else {
                (1.0 - rho) * power * h / (1.0 - rho * sigma_a_sq)
            };
            TracedPoint::ok((1.0 + snr).log2(), rho * power * h)
        })
        .collect();
    let metadata = TraceMetadata {
        n_points: sweep.n_points(),
        solver_tol: None,
        ..Default::default()
    };
    REBoundary::assemble(Scheme::SisoCase, points, metadata)
}
