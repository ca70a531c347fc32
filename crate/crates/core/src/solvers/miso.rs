//! Rank-one tradeoff solutions for single-antenna information receivers.
//!
//! When `H` is a single row `h^H` the Lagrangian maximizer collapses to a
//! beamformer along `A^{-1} h`, so the dual iteration only ever touches
//! scalars ([`harvest_constrained_rate_miso`]). When the energy receiver is
//! also single-antenna the whole problem has a closed form with no
//! iteration at all ([`miso_miso_closed_form`]): below the
//! maximal-ratio-combining threshold the harvest constraint is inactive and
//! the beam is `h`-matched; above it the beam is the exact linear
//! combination of the energy direction and the part of `h` orthogonal to
//! it that meets the harvest target with equality.

use nalgebra::DVector;

use super::ellipsoid::{primal_residual, run_dual, InnerEval};
use super::tradeoff::{
    energy_corner_solution, gate, validate_inputs, waterfilling_solution, Gate,
};
use super::waterfill::maximize_rate;
use super::{DualPoint, TradeoffSolution, DEFAULT_MAX_ITER};
use crate::channel::ChannelPair;
use crate::covariance::TransmitCovariance;
use crate::error::{Error, Result};
use crate::linalg;
use crate::metrics::{harvested_power, nats_to_bits};
use crate::{C64, CVector};

fn require_miso_id(channels: &ChannelPair) -> Result<CVector> {
    if channels.h().nrows() != 1 {
        return Err(Error::DimensionMismatch {
            context: "harvest_constrained_rate_miso",
            expected: "1 receive antenna at the information decoder".into(),
            got: format!("{}", channels.h().nrows()),
        });
    }
    Ok(channels.h().row(0).adjoint())
}

/// Harvest-constrained rate maximization specialized to `N_ID = 1`.
/// Follows the same dual iteration as the general solver but assembles the
/// rank-one maximizer directly.
pub fn harvest_constrained_rate_miso(
    channels: &ChannelPair,
    power: f64,
    q_bar: f64,
    tol: f64,
) -> Result<TradeoffSolution> {
    harvest_constrained_rate_miso_with(channels, power, q_bar, tol, DEFAULT_MAX_ITER)
}

pub fn harvest_constrained_rate_miso_with(
    channels: &ChannelPair,
    power: f64,
    q_bar: f64,
    tol: f64,
    max_iter: usize,
) -> Result<TradeoffSolution> {
    let h = require_miso_id(channels)?;
    validate_inputs(power, q_bar)?;
    let wf = maximize_rate(channels, power)?;
    let q_wf = harvested_power(channels.g(), &wf.covariance, 1.0)?;
    match gate(
        channels,
        power,
        q_bar,
        q_wf,
        wf.allocation.rate,
        wf.zero_channel,
    )? {
        Gate::Waterfilling => waterfilling_solution(channels, power),
        Gate::EnergyCorner => energy_corner_solution(channels, power),
        Gate::Interior { r_max_nat } => {
            let gram = channels.g().adjoint() * channels.g();
            let eig = linalg::hermitian_eigen(&gram, 1e-8)?;
            let gram_values: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
            let g1 = gram_values[0];
            // Coordinates of h in the eigenbasis of G^H G; A is diagonal
            // there, so every per-iteration quantity is a weighted sum.
            let y = eig.vectors.adjoint() * &h;
            let g_cols = channels.g() * &eig.vectors;
            let q_max = g1 * power;
            let lambda_ub = r_max_nat / (q_max - q_bar + 1e-12 * q_max.max(1.0));
            let mu_ub = channels.tx_count() as f64 * channels.h1() + lambda_ub * g1;
            let evaluate = |dual: DualPoint| -> (f64, f64, f64, Vec<C64>) {
                // w = A^{-1} h in eigenbasis coordinates.
                let w: Vec<C64> = y
                    .iter()
                    .zip(&gram_values)
                    .map(|(&yi, &gi)| yi / (dual.mu - dual.lambda * gi))
                    .collect();
                // gain = h^H A^{-1} h = |A^{-1/2} h|^2.
                let gain: f64 = y
                    .iter()
                    .zip(&gram_values)
                    .map(|(&yi, &gi)| yi.norm_sqr() / (dual.mu - dual.lambda * gi))
                    .sum();
                let coeff = if gain > 1.0 {
                    (1.0 / gain - 1.0 / (gain * gain)).max(0.0)
                } else {
                    0.0
                };
                let w_norm_sq: f64 = w.iter().map(|z| z.norm_sqr()).sum();
                let gw = {
                    let wv = DVector::from_vec(w.clone());
                    (&g_cols * wv).norm_squared()
                };
                (gain, coeff * w_norm_sq, coeff * gw, w)
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
                    let (_, trace, q, _) = evaluate(dual);
                    InnerEval { q, trace }
                },
            );
            let (gain, trace, q, w) = evaluate(run.best);
            let coeff = if gain > 1.0 {
                (1.0 / gain - 1.0 / (gain * gain)).max(0.0)
            } else {
                0.0
            };
            let scale = if trace > power { power / trace } else { 1.0 };
            // Back to the standard basis: S = coeff * (V w)(V w)^H.
            let w_std = &eig.vectors * DVector::from_vec(w);
            let s = (&w_std * w_std.adjoint()).map(|z| z * (coeff * scale));
            let covariance = TransmitCovariance::new(linalg::hermitian_part(&s), power)?;
            let rate_nat = (1.0 + gain * (1.0 - 1.0 / gain).max(0.0) * scale).ln();
            let harvested = q * scale;
            let eval = InnerEval {
                q: harvested,
                trace: covariance.trace(),
            };
            let converged = run.converged && primal_residual(run.best, eval, q_bar, power) <= tol;
            Ok(TradeoffSolution {
                covariance,
                rate: nats_to_bits(rate_nat),
                harvested,
                dual: Some(run.best),
                iterations: run.iterations,
                converged,
            })
        }
    }
}

/// Closed-form tradeoff beamformer when both receivers are single-antenna
/// (`H = h^H`, `G = g^H`). Returns the exact optimum; no iteration, no
/// tolerance.
pub fn miso_miso_closed_form(
    h: &CVector,
    g: &CVector,
    power: f64,
    q_bar: f64,
) -> Result<TradeoffSolution> {
    validate_inputs(power, q_bar)?;
    if h.len() != g.len() {
        return Err(Error::DimensionMismatch {
            context: "miso_miso_closed_form",
            expected: format!("{} transmit antennas", h.len()),
            got: format!("{}", g.len()),
        });
    }
    let h_norm_sq = h.norm_squared();
    let g_norm_sq = g.norm_squared();
    let q_max = power * g_norm_sq;
    if q_bar > q_max * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::InfeasibleHarvest { q_bar, q_max });
    }
    let dim = h.len();
    if h_norm_sq <= 0.0 {
        // No information channel: any harvest-feasible beam works; use the
        // energy direction (or an arbitrary one if g = 0 too).
        let v = unit_or_first_basis(g, dim);
        let covariance = TransmitCovariance::rank_one(&v, power, power)?;
        let harvested = power * beam_gain(g, &v);
        return Ok(closed_form_solution(covariance, 0.0, harvested));
    }
    let h_hat = h / C64::new(h_norm_sq.sqrt(), 0.0);
    let mrc_harvest = power * beam_gain(g, &h_hat);
    if q_bar <= mrc_harvest * (1.0 + 1e-12) + 1e-15 {
        let rate = (1.0 + h_norm_sq * power).log2();
        let covariance = TransmitCovariance::rank_one(&h_hat, power, power)?;
        return Ok(closed_form_solution(covariance, rate, mrc_harvest));
    }
    // Active harvest constraint. Here g != 0 necessarily (otherwise
    // mrc_harvest = q_max = 0 >= q_bar was already handled).
    let g_hat = g / C64::new(g_norm_sq.sqrt(), 0.0);
    let alpha = g_hat.dotc(h); // conjugated dot: g_hat^H h
    let phase = if alpha.norm() > 0.0 {
        alpha / alpha.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let h_perp = h - &g_hat * alpha;
    let h_perp_norm = h_perp.norm();
    let t = (q_bar / q_max).clamp(0.0, 1.0);
    let v = if h_perp_norm < 1e-10 * h_norm_sq.sqrt() {
        // h parallel to g: the orthogonal component vanishes and the beam
        // degenerates to the (phase-aligned) energy direction.
        &g_hat * phase
    } else {
        let h_perp_hat = &h_perp / C64::new(h_perp_norm, 0.0);
        &g_hat * (phase * t.sqrt()) + h_perp_hat * C64::new((1.0 - t).sqrt(), 0.0)
    };
    let amplitude = (q_bar / g_norm_sq).sqrt() * alpha.norm()
        + (power - q_bar / g_norm_sq).max(0.0).sqrt()
            * (h_norm_sq - alpha.norm_sqr()).max(0.0).sqrt();
    let rate = (1.0 + amplitude * amplitude).log2();
    let covariance = TransmitCovariance::rank_one(&v, power, power)?;
    let harvested = power * beam_gain(g, &v);
    Ok(closed_form_solution(covariance, rate, harvested))
}

fn beam_gain(g: &CVector, v: &CVector) -> f64 {
    g.dotc(v).norm_sqr()
}

fn unit_or_first_basis(g: &CVector, dim: usize) -> CVector {
    let norm = g.norm();
    if norm > 1e-12 {
        g / C64::new(norm, 0.0)
    } else {
        let mut v = CVector::zeros(dim);
        v[0] = C64::new(1.0, 0.0);
        v
    }
}

fn closed_form_solution(
    covariance: TransmitCovariance,
    rate: f64,
    harvested: f64,
) -> TradeoffSolution {
    TradeoffSolution {
        covariance,
        rate,
        harvested,
        dual: None,
        iterations: 0,
        converged: true,
    }
}

/// Numerical rank of a covariance: modes above `tol` times the top one.
pub fn numerical_rank(covariance: &TransmitCovariance, tol: f64) -> usize {
    let eig = match linalg::hermitian_eigen(covariance.matrix(), 1e-8) {
        Ok(e) => e,
        Err(_) => return 0,
    };
    let top = eig.eigenvalues[0].max(0.0);
    if top <= 0.0 {
        return 0;
    }
    eig.eigenvalues.iter().filter(|&&v| v > tol * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::mutual_information;
    use crate::CMatrix;
    use approx::assert_relative_eq;

    fn vec2(a: (f64, f64), b: (f64, f64)) -> CVector {
        CVector::from_vec(vec![C64::new(a.0, a.1), C64::new(b.0, b.1)])
    }

    #[test]
    fn orthogonal_channels_second_branch() {
        // |h| = |g| = 1, g orthogonal to h, P = 10, q_bar = 5:
        // rate = log2(1 + (0 + sqrt(5) * 1)^2) = log2(6).
        let h = vec2((1.0, 0.0), (0.0, 0.0));
        let g = vec2((0.0, 0.0), (1.0, 0.0));
        let sol = miso_miso_closed_form(&h, &g, 10.0, 5.0).unwrap();
        assert_relative_eq!(sol.rate, 6.0f64.log2(), epsilon = 1e-12);
        assert_relative_eq!(sol.harvested, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn mrc_branch_when_target_below_threshold() {
        // |alpha|^2 = 0.9, P = 10: threshold 9 >= q_bar = 8, so the beam is
        // h-matched and the rate is log2(11).
        let h = vec2((0.9f64.sqrt(), 0.0), (0.1f64.sqrt(), 0.0));
        let g = vec2((1.0, 0.0), (0.0, 0.0));
        let sol = miso_miso_closed_form(&h, &g, 10.0, 8.0).unwrap();
        assert_relative_eq!(sol.rate, 11.0f64.log2(), epsilon = 1e-12);
        assert_relative_eq!(sol.harvested, 9.0, epsilon = 1e-12);
    }

    #[test]
    fn full_harvest_endpoint() {
        // |alpha|^2 = 0.5, q_bar = P|g|^2 = 10: beam collapses onto the
        // energy direction, rate = log2(1 + 10 * 0.5).
        let h = vec2((0.5f64.sqrt(), 0.0), (0.5f64.sqrt(), 0.0));
        let g = vec2((1.0, 0.0), (0.0, 0.0));
        let sol = miso_miso_closed_form(&h, &g, 10.0, 10.0).unwrap();
        assert_relative_eq!(sol.rate, 6.0f64.log2(), epsilon = 1e-12);
        assert_relative_eq!(sol.harvested, 10.0, epsilon = 1e-12);
        // Beam is g_hat up to phase: covariance concentrates on antenna 1.
        assert_relative_eq!(sol.covariance.matrix()[(0, 0)].re, 10.0, epsilon = 1e-9);
    }

    #[test]
    fn closed_form_rate_matches_direct_evaluation() {
        let h = vec2((0.8, 0.3), (-0.2, 0.5));
        let g = vec2((0.1, -0.6), (0.7, 0.2));
        let power = 4.0;
        let q_max = power * g.norm_squared();
        for k in 1..10 {
            let q_bar = q_max * k as f64 / 10.0;
            let sol = miso_miso_closed_form(&h, &g, power, q_bar).unwrap();
            let h_row = CMatrix::from_fn(1, 2, |_, j| h[j].conj());
            let mi = mutual_information(&h_row, &sol.covariance).unwrap();
            assert_relative_eq!(sol.rate, mi, epsilon = 1e-9);
            assert!(sol.harvested >= q_bar - 1e-9);
        }
    }

    #[test]
    fn parallel_channels_stay_on_mrc_branch() {
        let h = vec2((2.0, 0.0), (0.0, 2.0));
        let g = vec2((1.0, 0.0), (0.0, 1.0));
        let power = 3.0;
        let q_max = power * g.norm_squared();
        let sol = miso_miso_closed_form(&h, &g, power, q_max).unwrap();
        assert_relative_eq!(sol.harvested, q_max, epsilon = 1e-9);
        assert_relative_eq!(sol.rate, (1.0 + h.norm_squared() * power).log2(), epsilon = 1e-9);
    }

    #[test]
    fn miso_dual_path_matches_closed_form() {
        let h = vec2((0.9, 0.1), (0.3, -0.4));
        let g = vec2((-0.2, 0.5), (0.8, 0.1));
        let h_row = CMatrix::from_fn(1, 2, |_, j| h[j].conj());
        let g_row = CMatrix::from_fn(1, 2, |_, j| g[j].conj());
        let pair = ChannelPair::separated(h_row, g_row).unwrap();
        let power = 5.0;
        let q_max = pair.g1() * power;
        for k in 1..10 {
            let q_bar = q_max * k as f64 / 10.0;
            let iterative =
                harvest_constrained_rate_miso(&pair, power, q_bar, 1e-8).unwrap();
            let closed = miso_miso_closed_form(&h, &g, power, q_bar).unwrap();
            assert!(
                (iterative.rate - closed.rate).abs() <= 1e-6 * closed.rate.max(1e-6),
                "q_bar {q_bar}: {} vs {}",
                iterative.rate,
                closed.rate
            );
            assert!(numerical_rank(&iterative.covariance, 1e-8) <= 1);
        }
    }

    #[test]
    fn miso_rejects_multi_antenna_id() {
        let pair = ChannelPair::colocated(crate::linalg::complex_gaussian_matrix(2, 2, 1.0, 1))
            .unwrap();
        assert!(harvest_constrained_rate_miso(&pair, 1.0, 0.1, 1e-6).is_err());
    }
}
