//! Co-located receivers: the tradeoff collapses onto the eigenmodes of `H`.
//!
//! With `G = H` the optimal covariance shares the right-singular basis of
//! `H`, so the whole problem reduces to allocating powers across the
//! eigenmode gains `h_i`. At a feasible dual point the allocation is a
//! modified water-filling whose per-mode level `1/(mu - lambda h_i)` rises
//! with the gain; `lambda = 0` recovers the flat-level allocation of the
//! unconstrained rate maximizer.
//!
//! The same diagonal engine also solves the sub-problems of uniform power
//! splitting, where the information and harvesting paths see `a^2 H` and
//! `b^2 H`: only the per-mode gains change.

use super::ellipsoid::{primal_residual, run_dual, InnerEval};
use super::waterfill::water_fill;
use super::{DualPoint, TradeoffSolution, DEFAULT_MAX_ITER};
use crate::channel::ChannelPair;
use crate::covariance::TransmitCovariance;
use crate::error::{Error, Result};
use crate::metrics::nats_to_bits;

/// Relative corner snap width, shared with the general solver.
use super::tradeoff::validate_inputs;
const CORNER_REL: f64 = 1e-9;

/// Tradeoff over shared eigenmodes described only by gains.
#[derive(Debug, Clone)]
pub struct DiagTradeoff {
    /// Per-mode powers, aligned with the gains passed in.
    pub powers: Vec<f64>,
    /// Rate in bits per channel use.
    pub rate: f64,
    /// Harvested power at unit conversion efficiency.
    pub harvested: f64,
    pub dual: Option<DualPoint>,
    pub iterations: usize,
    pub converged: bool,
}

/// Solve the harvest-constrained rate maximization when both figures of
/// merit diagonalize in one basis: the information path sees mode gains
/// `id_scale * gains[i]`, the harvesting path `eh_scale * gains[i]`.
pub fn diag_tradeoff(
    gains: &[f64],
    id_scale: f64,
    eh_scale: f64,
    power: f64,
    q_bar: f64,
    tol: f64,
    max_iter: usize,
) -> Result<DiagTradeoff> {
    validate_inputs(power, q_bar)?;
    if gains.is_empty() {
        return Err(Error::InvalidParameter("no eigenmode gains".into()));
    }
    if id_scale < 0.0 || eh_scale < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "mode scales must be nonnegative: ({id_scale}, {eh_scale})"
        )));
    }
    let rate_gains: Vec<f64> = gains.iter().map(|&h| id_scale * h).collect();
    let eh_gains: Vec<f64> = gains.iter().map(|&h| eh_scale * h).collect();
    let g1 = eh_gains[0];
    let q_max = g1 * power;
    if q_bar > q_max * (1.0 + CORNER_REL) + 1e-12 {
        return Err(Error::InfeasibleHarvest { q_bar, q_max });
    }

    let wf = water_fill(&rate_gains, power);
    let q_wf: f64 = wf
        .powers
        .iter()
        .zip(&eh_gains)
        .map(|(&p, &g)| p * g)
        .sum();
    if q_bar <= q_wf * (1.0 + 1e-12) + 1e-15 {
        let dual = if wf.water_level > 0.0 && rate_gains[0] > 0.0 {
            Some(DualPoint::new(0.0, 1.0 / wf.water_level))
        } else {
            None
        };
        return Ok(DiagTradeoff {
            powers: wf.powers,
            rate: wf.rate,
            harvested: q_wf,
            dual,
            iterations: 0,
            converged: true,
        });
    }

    // Beamforming corner: everything on the top mode. Also the fallback
    // when the information path is dead (zero rate whatever we do).
    if rate_gains[0] <= 0.0 || q_bar >= q_max * (1.0 - CORNER_REL) {
        let mut powers = vec![0.0; gains.len()];
        powers[0] = power;
        return Ok(DiagTradeoff {
            powers,
            rate: (1.0 + rate_gains[0] * power).log2(),
            harvested: q_max,
            dual: None,
            iterations: 0,
            converged: true,
        });
    }

    let r_max_nat = wf.rate * std::f64::consts::LN_2;
    let lambda_ub = r_max_nat / (q_max - q_bar + 1e-12 * q_max.max(1.0));
    let mu_ub = gains.len() as f64 * rate_gains[0] + lambda_ub * g1;
    let allocate = |dual: DualPoint| -> Vec<f64> {
        rate_gains
            .iter()
            .zip(&eh_gains)
            .map(|(&rh, &eh)| {
                if rh <= 0.0 {
                    0.0
                } else {
                    (1.0 / (dual.mu - dual.lambda * eh) - 1.0 / rh).max(0.0)
                }
            })
            .collect()
    };
    let summarize = |powers: &[f64]| -> (f64, f64) {
        let q = powers.iter().zip(&eh_gains).map(|(&p, &g)| p * g).sum();
        let tr = powers.iter().sum();
        (q, tr)
    };
    let run = run_dual(
        g1,
        q_bar,
        power,
        [1.0 / (2.0 * g1), 1.0],
        lambda_ub,
        mu_ub,
        tol,
        max_iter,
        |dual| {
            let (q, trace) = summarize(&allocate(dual));
            InnerEval { q, trace }
        },
    );
    let mut powers = allocate(run.best);
    let (_, trace) = summarize(&powers);
    if trace > power {
        let scale = power / trace;
        for p in &mut powers {
            *p *= scale;
        }
    }
    let (q, trace) = summarize(&powers);
    let rate_nat: f64 = powers
        .iter()
        .zip(&rate_gains)
        .map(|(&p, &h)| (1.0 + h * p).ln())
        .sum();
    let eval = InnerEval { q, trace };
    let converged = run.converged && primal_residual(run.best, eval, q_bar, power) <= tol;
    if run.best.lambda > 0.0 {
        // Effective water level 1/(mu - lambda h) must rise with the gain.
        debug_assert!(eh_gains
            .windows(2)
            .all(|w| run.best.mu - run.best.lambda * w[0] <= run.best.mu - run.best.lambda * w[1]
                + 1e-15));
    }
    Ok(DiagTradeoff {
        powers,
        rate: nats_to_bits(rate_nat),
        harvested: q,
        dual: Some(run.best),
        iterations: run.iterations,
        converged,
    })
}

/// Harvest-constrained rate maximization for co-located receivers
/// (`G = H`): the diagonal engine on the eigenmode gains of `H`, mapped
/// back through the right-singular basis.
pub fn harvest_constrained_rate_colocated(
    channels: &ChannelPair,
    power: f64,
    q_bar: f64,
    tol: f64,
) -> Result<TradeoffSolution> {
    harvest_constrained_rate_colocated_with(channels, power, q_bar, tol, DEFAULT_MAX_ITER)
}

pub fn harvest_constrained_rate_colocated_with(
    channels: &ChannelPair,
    power: f64,
    q_bar: f64,
    tol: f64,
    max_iter: usize,
) -> Result<TradeoffSolution> {
    if !channels.is_colocated() {
        return Err(Error::InvalidParameter(
            "co-located solver requires G = H".into(),
        ));
    }
    let gains = channels.h_gains();
    let diag = diag_tradeoff(&gains, 1.0, 1.0, power, q_bar, tol, max_iter)?;
    let covariance =
        TransmitCovariance::from_eigenbasis(&channels.h_svd().v.clone(), &diag.powers, power)?;
    Ok(TradeoffSolution {
        covariance,
        rate: diag.rate,
        harvested: diag.harvested,
        dual: diag.dual,
        iterations: diag.iterations,
        converged: diag.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cmatrix_from_diagonal;
    use crate::metrics::{harvested_power, mutual_information};
    use crate::solvers::waterfill::maximize_rate;
    use approx::assert_relative_eq;

    #[test]
    fn siso_box_corner() {
        // Single mode: full power regardless of the target, so the region
        // is a box. h = 1 power gain, P arbitrary.
        let pair = ChannelPair::colocated(cmatrix_from_diagonal(&[1.0])).unwrap();
        let power = 100.0;
        for q_bar in [0.0, 30.0, 99.9, 100.0] {
            let sol = harvest_constrained_rate_colocated(&pair, power, q_bar, 1e-6).unwrap();
            assert_relative_eq!(sol.rate, 101.0f64.log2(), epsilon = 1e-9);
            assert_relative_eq!(sol.harvested, 100.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn inactive_target_equals_unconstrained_solution() {
        let pair = ChannelPair::colocated(crate::linalg::complex_gaussian_matrix(3, 3, 1.0, 31))
            .unwrap();
        let power = 2.0;
        let wf = maximize_rate(&pair, power).unwrap();
        let q_wf = harvested_power(pair.g(), &wf.covariance, 1.0).unwrap();
        let sol = harvest_constrained_rate_colocated(&pair, power, 0.9 * q_wf, 1e-6).unwrap();
        assert_relative_eq!(sol.rate, wf.allocation.rate, epsilon = 1e-10);
        assert_eq!(sol.dual.unwrap().lambda, 0.0);
    }

    #[test]
    fn interior_target_is_tight_and_consistent() {
        let pair = ChannelPair::colocated(cmatrix_from_diagonal(&[2.0, 1.0])).unwrap();
        let power = 1.0;
        // gains (4, 1): q_wf = 4*0.875 + 1*0.125 = 3.625, q_max = 4.
        let q_bar = 3.8;
        let sol = harvest_constrained_rate_colocated(&pair, power, q_bar, 1e-6).unwrap();
        assert!(sol.converged);
        assert!(sol.harvested >= q_bar - 1e-6 * q_bar);
        assert!(sol.covariance.trace() <= power + 1e-8);
        let mi = mutual_information(pair.h(), &sol.covariance).unwrap();
        assert_relative_eq!(sol.rate, mi, epsilon = 1e-8);
        let lam = sol.dual.unwrap().lambda;
        assert!(lam > 0.0, "harvest constraint should price in");
    }

    #[test]
    fn effective_water_level_rises_with_gain() {
        let gains = [4.0, 2.0, 0.5];
        let diag = diag_tradeoff(&gains, 1.0, 1.0, 1.5, 5.0, 1e-8, 5000).unwrap();
        let dual = diag.dual.unwrap();
        assert!(dual.lambda > 0.0);
        let levels: Vec<f64> = gains
            .iter()
            .map(|&h| 1.0 / (dual.mu - dual.lambda * h))
            .collect();
        assert!(levels[0] >= levels[1] && levels[1] >= levels[2]);
    }

    #[test]
    fn matches_general_solver_on_colocated_instance() {
        let h = crate::linalg::complex_gaussian_matrix(2, 2, 1.0, 77);
        let pair = ChannelPair::colocated(h).unwrap();
        let power = 1.0;
        let q_max = pair.g1() * power;
        for k in [3, 5, 7, 9] {
            let q_bar = q_max * k as f64 / 10.0;
            let fast =
                harvest_constrained_rate_colocated(&pair, power, q_bar, 1e-8).unwrap();
            let general =
                crate::solvers::tradeoff::harvest_constrained_rate(&pair, power, q_bar, 1e-8)
                    .unwrap();
            assert!(
                (fast.rate - general.rate).abs() <= 1e-5 * fast.rate.max(1.0),
                "k={k}: {} vs {}",
                fast.rate,
                general.rate
            );
        }
    }

    #[test]
    fn scaled_engine_endpoint_behaviors() {
        // id_scale = 0 (all power split to harvesting): zero rate, target
        // still met by beamforming.
        let diag = diag_tradeoff(&[4.0, 1.0], 0.0, 1.0, 1.0, 2.0, 1e-6, 5000).unwrap();
        assert_eq!(diag.rate, 0.0);
        assert!(diag.harvested >= 2.0 - 1e-9);
        // eh_scale = 0: only q_bar = 0 is feasible.
        assert!(diag_tradeoff(&[4.0, 1.0], 1.0, 0.0, 1.0, 0.5, 1e-6, 5000).is_err());
        let ok = diag_tradeoff(&[4.0, 1.0], 1.0, 0.0, 1.0, 0.0, 1e-6, 5000).unwrap();
        assert!(ok.rate > 0.0);
    }
}
