//! Outer bound for co-located receivers.
//!
//! Computed as if one receiver could harvest and decode the same signal
//! simultaneously; practical architectures (time switching, power
//! splitting) live inside this region.

use rayon::prelude::*;

use crate::boundary::{PointFailure, REBoundary, Scheme, TraceMetadata, TracedPoint};
use crate::channel::ChannelPair;
use crate::error::{Error, Result};
use crate::metrics::harvested_power;
use crate::regions::separated::check_zeta;
use crate::regions::sweep::SweepSpec;
use crate::solvers::colocated::harvest_constrained_rate_colocated;
use crate::solvers::waterfill::maximize_rate;
use crate::solvers::DEFAULT_TOL;

/// Trace the co-located outer bound: modified water-filling across the
/// eigenmodes of `H`, swept from the unconstrained-rate corner to the
/// beamforming corner at `h1 * P`.
pub fn colocated_outer_bound(
    channels: &ChannelPair,
    power: f64,
    zeta: f64,
    sweep: &SweepSpec,
) -> Result<REBoundary> {
    if !channels.is_colocated() {
        return Err(Error::InvalidParameter(
            "outer bound tracer requires co-located channels".into(),
        ));
    }
    check_zeta(zeta)?;
    let wf = maximize_rate(channels, power)?;
    let r_max = wf.allocation.rate;
    let q_id = harvested_power(channels.g(), &wf.covariance, 1.0)?;
    let h1 = channels.h1();
    let q_max = h1 * power;
    let r_eh = (1.0 + h1 * power).log2();

    let mut points = vec![TracedPoint::ok(r_max, 0.0)];
    let mut failures = Vec::new();
    if q_max > q_id * (1.0 + 1e-12) {
        let targets = sweep.values(q_id, q_max);
        let results: Vec<_> = targets
            .par_iter()
            .map(|&q_bar| harvest_constrained_rate_colocated(channels, power, q_bar, DEFAULT_TOL))
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
    Ok(REBoundary::assemble(Scheme::OuterBound, points, metadata)?.with_energy_scaled(zeta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cmatrix_from_diagonal, complex_gaussian_matrix};
    use approx::assert_relative_eq;

    #[test]
    fn siso_outer_bound_is_a_box() {
        let pair = ChannelPair::colocated(cmatrix_from_diagonal(&[1.0])).unwrap();
        let b =
            colocated_outer_bound(&pair, 100.0, 1.0, &SweepSpec::with_corners(5).unwrap())
                .unwrap();
        let pts = b.points();
        assert_eq!(pts.len(), 2);
        assert_relative_eq!(pts[0].rate, 101.0f64.log2(), epsilon = 1e-12);
        assert_relative_eq!(pts[1].rate, 101.0f64.log2(), epsilon = 1e-12);
        assert_relative_eq!(pts[1].energy, 100.0, epsilon = 1e-12);
    }

    #[test]
    fn beamforming_corner_rate() {
        // h gains (4, 1), P = 1: the point at energy 4 has rate
        // log2(1 + 4).
        let pair = ChannelPair::colocated(cmatrix_from_diagonal(&[2.0, 1.0])).unwrap();
        let b = colocated_outer_bound(&pair, 1.0, 1.0, &SweepSpec::with_corners(9).unwrap())
            .unwrap();
        let last = b.points().last().unwrap();
        assert_relative_eq!(last.energy, 4.0, epsilon = 1e-12);
        assert_relative_eq!(last.rate, 5.0f64.log2(), epsilon = 1e-12);
    }

    #[test]
    fn outer_bound_is_concave() {
        let pair =
            ChannelPair::colocated(complex_gaussian_matrix(2, 2, 1.0, 71)).unwrap();
        let b = colocated_outer_bound(&pair, 10.0, 1.0, &SweepSpec::with_corners(31).unwrap())
            .unwrap();
        assert!(b.all_converged());
        assert!(b.max_concavity_violation() <= 1e-6);
    }

    #[test]
    fn rejects_separated_channels() {
        let pair = ChannelPair::separated(
            complex_gaussian_matrix(2, 2, 1.0, 1),
            complex_gaussian_matrix(2, 2, 1.0, 2),
        )
        .unwrap();
        assert!(colocated_outer_bound(&pair, 1.0, 1.0, &SweepSpec::default()).is_err());
    }
}
