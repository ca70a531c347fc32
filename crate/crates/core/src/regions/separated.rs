//! Boundary tracer for separated receivers.

use rayon::prelude::*;

use crate::boundary::{PointFailure, REBoundary, Scheme, TraceMetadata, TracedPoint};
use crate::channel::ChannelPair;
use crate::error::Result;
use crate::metrics::{harvested_power, mutual_information};
use crate::regions::sweep::SweepSpec;
use crate::solvers::energy::energy_beamforming;
use crate::solvers::tradeoff::harvest_constrained_rate;
use crate::solvers::waterfill::maximize_rate;
use crate::solvers::DEFAULT_TOL;

/// Trace the full rate-energy boundary for a separated-receiver pair:
/// the flat segment at the unconstrained maximum rate up to its harvest,
/// the swept tradeoff curve, and the energy-beamforming corner. Energies
/// are scaled by `zeta` on output.
pub fn separated_boundary(
    channels: &ChannelPair,
    power: f64,
    zeta: f64,
    sweep: &SweepSpec,
) -> Result<REBoundary> {
    check_zeta(zeta)?;
    let wf = maximize_rate(channels, power)?;
    let r_max = wf.allocation.rate;
    let q_id = harvested_power(channels.g(), &wf.covariance, 1.0)?;
    let eh = energy_beamforming(channels, power)?;
    let q_max = eh.q_max;
    let r_eh = mutual_information(channels.h(), &eh.covariance)?;

    let mut points = vec![TracedPoint::ok(r_max, 0.0)];
    let mut failures = Vec::new();
    if q_max > q_id {
        let targets = sweep.values(q_id, q_max);
        let results: Vec<_> = targets
            .par_iter()
            .map(|&q_bar| harvest_constrained_rate(channels, power, q_bar, DEFAULT_TOL))
            .collect();
        for (i, (q_bar, result)) in targets.iter().zip(results).enumerate() {
            match result {
                Ok(sol) => points.push(TracedPoint {
                    energy: sol.harvested,
                    rate: sol.rate,
                    converged: sol.converged,
                }),
                Err(e) => failures.push(PointFailure {
                    index: i,
                    energy: *q_bar,
                    message: e.to_string(),
                }),
            }
        }
    } else {
        // The rate-optimal covariance already harvests the maximum: the
        // region is a box.
        points.push(TracedPoint::ok(r_max, q_max));
    }
    points.push(TracedPoint::ok(r_eh, q_max));

    let metadata = TraceMetadata {
        n_points: sweep.n_points(),
        rho_points: None,
        solver_tol: Some(DEFAULT_TOL),
        failures,
        ..Default::default()
    };
    Ok(REBoundary::assemble(Scheme::Separated, points, metadata)?.with_energy_scaled(zeta))
}

pub(crate) fn check_zeta(zeta: f64) -> Result<()> {
    if !(zeta > 0.0 && zeta <= 1.0) {
        return Err(crate::error::Error::InvalidParameter(format!(
            "conversion efficiency must lie in (0, 1], got {zeta}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cmatrix_from_diagonal, complex_gaussian_matrix};
    use crate::oracle::region_contains;
    use approx::assert_relative_eq;

    #[test]
    fn siso_identical_channels_give_a_box() {
        let pair = ChannelPair::colocated(cmatrix_from_diagonal(&[1.0])).unwrap();
        let b = separated_boundary(&pair, 2.0, 1.0, &SweepSpec::with_corners(11).unwrap())
            .unwrap();
        let pts = b.points();
        assert_eq!(pts.len(), 2);
        assert_relative_eq!(pts[0].rate, 3.0f64.log2(), epsilon = 1e-12);
        assert_relative_eq!(pts[1].energy, 2.0, epsilon = 1e-12);
        assert_relative_eq!(pts[1].rate, 3.0f64.log2(), epsilon = 1e-12);
    }

    #[test]
    fn swept_boundary_is_concave_and_dominates_time_sharing() {
        let pair = ChannelPair::separated(
            complex_gaussian_matrix(2, 2, 1.0, 41),
            complex_gaussian_matrix(2, 2, 1.0, 42),
        )
        .unwrap();
        let b = separated_boundary(&pair, 1.0, 1.0, &SweepSpec::with_corners(21).unwrap())
            .unwrap();
        assert!(b.all_converged());
        assert!(b.max_concavity_violation() <= 1e-6);
        // Time-sharing chord between (r_max, q_id) and (r_eh, q_max).
        let pts = b.points();
        let (first, last) = (pts[1], pts[pts.len() - 1]);
        for k in 1..20 {
            let t = k as f64 / 20.0;
            let e = first.energy + t * (last.energy - first.energy);
            let chord = first.rate + t * (last.rate - first.rate);
            let rate = b.rate_at(e).unwrap();
            assert!(
                rate >= chord - 1e-6,
                "boundary below chord at energy {e}: {rate} vs {chord}"
            );
        }
    }

    #[test]
    fn zeta_scales_energies_only() {
        let pair = ChannelPair::separated(
            complex_gaussian_matrix(2, 2, 1.0, 51),
            complex_gaussian_matrix(2, 2, 1.0, 52),
        )
        .unwrap();
        let sweep = SweepSpec::with_corners(9).unwrap();
        let full = separated_boundary(&pair, 1.0, 1.0, &sweep).unwrap();
        let half = separated_boundary(&pair, 1.0, 0.5, &sweep).unwrap();
        for (a, b) in full.points().iter().zip(half.points()) {
            assert_relative_eq!(a.rate, b.rate, epsilon = 1e-12);
            assert_relative_eq!(a.energy * 0.5, b.energy, epsilon = 1e-12);
        }
    }

    #[test]
    fn boundary_contains_itself_and_scaled_copy() {
        let pair = ChannelPair::separated(
            complex_gaussian_matrix(3, 3, 1.0, 61),
            complex_gaussian_matrix(3, 3, 1.0, 62),
        )
        .unwrap();
        let sweep = SweepSpec::with_corners(15).unwrap();
        let b = separated_boundary(&pair, 1.0, 1.0, &sweep).unwrap();
        assert!(region_contains(&b, &b, 1e-9).unwrap().contained);
    }
}
