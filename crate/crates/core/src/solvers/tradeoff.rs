//! Harvest-constrained rate maximization for arbitrary channel pairs.
//!
//! maximize `log det(I + H S H^H)` over `S >= 0` subject to
//! `tr(G S G^H) >= q_bar` and `tr(S) <= power`.
//!
//! The problem is convex with a Slater point whenever
//! `q_bar < g1 * power`, so it is solved through its two-dimensional dual.
//! For a feasible dual point the Lagrangian maximizer is closed-form: with
//! `A = mu I - lambda G^H G > 0`, whiten to `H A^{-1/2}`, water-fill the
//! whitened modes at unit level, and map back. The dual itself is
//! minimized by the ellipsoid method with the subgradient
//! `(tr(G S G^H) - q_bar, power - tr(S))`.
//!
//! Harvest targets at or below the water-filling harvest, or within a
//! relative `1e-9` of the beamforming maximum `g1 * power`, short-circuit
//! to the closed-form corner solutions instead of exercising the dual
//! machinery against an ill-conditioned target.

use nalgebra::DVector;

use super::ellipsoid::{primal_residual, run_dual, InnerEval};
use super::energy::energy_beamforming;
use super::waterfill::maximize_rate;
use super::{DualPoint, TradeoffSolution, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::channel::ChannelPair;
use crate::covariance::TransmitCovariance;
use crate::error::{Error, Result};
use crate::linalg;
use crate::metrics::{harvested_power, mutual_information, nats_to_bits};
use crate::{C64, CMatrix, CVector};

/// Relative width of the corner snap region around `q_max`.
pub(super) const CORNER_REL: f64 = 1e-9;

/// How a harvest target relates to the closed-form corners.
pub(super) enum Gate {
    /// Target inactive: the unconstrained rate maximizer already harvests
    /// enough.
    Waterfilling,
    /// Target is (numerically) the beamforming maximum.
    EnergyCorner,
    /// Strictly interior target: run the dual iteration. Carries the
    /// unconstrained maximum rate in nats for the dual bounding box.
    Interior { r_max_nat: f64 },
}

pub(super) fn validate_inputs(power: f64, q_bar: f64) -> Result<()> {
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "transmit power must be positive, got {power}"
        )));
    }
    if !(q_bar >= 0.0) || !q_bar.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "harvest target must be finite and nonnegative, got {q_bar}"
        )));
    }
    Ok(())
}

/// Lagrangian maximizer context: everything that does not change across
/// dual iterations.
pub struct LagrangianContext<'a> {
    h: &'a CMatrix,
    g: &'a CMatrix,
    /// Eigenvalues of `G^H G` (clamped to be nonnegative), non-increasing.
    gram_values: Vec<f64>,
    gram_vectors: CMatrix,
}

/// The Lagrangian maximizer in spectral form: `S = sum_j p_j w_j w_j^H`
/// with whitened-domain gains `h_j` (rate contribution `ln(1 + h_j p_j)`).
pub struct LagrangianModes {
    directions: Vec<CVector>,
    powers: Vec<f64>,
    whitened_gains: Vec<f64>,
    q: f64,
    trace: f64,
}

impl LagrangianModes {
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    /// Build the covariance matrix with every mode power multiplied by
    /// `scale`, returning the matrix, the rate in nats, and the harvested
    /// power.
    fn assemble(&self, scale: f64, dim: usize) -> (CMatrix, f64, f64) {
        let mut matrix = CMatrix::zeros(dim, dim);
        let mut rate_nat = 0.0;
        for ((w, &p), &g) in self
            .directions
            .iter()
            .zip(&self.powers)
            .zip(&self.whitened_gains)
        {
            let p = p * scale;
            matrix += (w * w.adjoint()).map(|z| z * p);
            rate_nat += (1.0 + g * p).ln();
        }
        (matrix, rate_nat, self.q * scale)
    }
}

impl<'a> LagrangianContext<'a> {
    pub fn new(channels: &'a ChannelPair) -> Result<Self> {
        let gram = channels.g().adjoint() * channels.g();
        let eig = linalg::hermitian_eigen(&gram, 1e-8)?;
        Ok(Self {
            h: channels.h(),
            g: channels.g(),
            gram_values: eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect(),
            gram_vectors: eig.vectors,
        })
    }

    /// Largest eigenvalue of `G^H G` as seen by this context; the cone test
    /// uses this exact value so `A` stays invertible.
    pub fn g1(&self) -> f64 {
        self.gram_values.first().copied().unwrap_or(0.0)
    }

    /// Maximize the Lagrangian at a feasible dual point.
    pub fn maximize(&self, dual: DualPoint) -> Result<LagrangianModes> {
        if !dual.is_feasible(self.g1()) {
            return Err(Error::DualInfeasible {
                lambda: dual.lambda,
                mu: dual.mu,
                g1: self.g1(),
            });
        }
        let m = self.h.ncols();
        let inv_sqrt = DVector::from_iterator(
            m,
            self.gram_values
                .iter()
                .map(|&gi| C64::new(1.0 / (dual.mu - dual.lambda * gi).sqrt(), 0.0)),
        );
        let a_inv_sqrt =
            &self.gram_vectors * CMatrix::from_diagonal(&inv_sqrt) * self.gram_vectors.adjoint();
        let whitened = self.h * &a_inv_sqrt;
        let svd = linalg::svd(&whitened)?;
        let mut modes = LagrangianModes {
            directions: Vec::new(),
            powers: Vec::new(),
            whitened_gains: Vec::new(),
            q: 0.0,
            trace: 0.0,
        };
        for (j, sigma) in svd.singular_values.iter().enumerate() {
            let gain = sigma * sigma;
            if gain <= 1.0 {
                break; // gains are sorted; the rest are inactive
            }
            let p = 1.0 - 1.0 / gain;
            let w = &a_inv_sqrt * svd.v.column(j);
            modes.trace += p * w.norm_squared();
            modes.q += p * (self.g * &w).norm_squared();
            modes.directions.push(w);
            modes.powers.push(p);
            modes.whitened_gains.push(gain);
        }
        Ok(modes)
    }
}

/// The Lagrangian maximizer at a fixed dual point (the inner problem of
/// the dual iteration), exposed for direct inspection. The returned
/// covariance's budget is its own trace: the inner problem has no power
/// constraint of its own.
pub fn lagrangian_maximizer(channels: &ChannelPair, dual: DualPoint) -> Result<TransmitCovariance> {
    let ctx = LagrangianContext::new(channels)?;
    let modes = ctx.maximize(dual)?;
    let (matrix, _, _) = modes.assemble(1.0, channels.tx_count());
    TransmitCovariance::new(matrix, modes.trace() + 1.0)
}

pub(super) fn gate(
    channels: &ChannelPair,
    power: f64,
    q_bar: f64,
    q_wf: f64,
    r_max: f64,
    zero_h: bool,
) -> Result<Gate> {
    let q_max = channels.g1() * power;
    if q_bar > q_max * (1.0 + CORNER_REL) + 1e-12 {
        return Err(Error::InfeasibleHarvest { q_bar, q_max });
    }
    if q_bar <= q_wf * (1.0 + 1e-12) + 1e-15 {
        return Ok(Gate::Waterfilling);
    }
    if zero_h || q_bar >= q_max * (1.0 - CORNER_REL) {
        return Ok(Gate::EnergyCorner);
    }
    Ok(Gate::Interior {
        r_max_nat: r_max * std::f64::consts::LN_2,
    })
}

/// Water-filling corner solution packaged as a tradeoff solution
/// (`lambda = 0`; `mu` is the reciprocal water level in nat units).
pub(super) fn waterfilling_solution(
    channels: &ChannelPair,
    power: f64,
) -> Result<TradeoffSolution> {
    let wf = maximize_rate(channels, power)?;
    let q = harvested_power(channels.g(), &wf.covariance, 1.0)?;
    let dual = if wf.allocation.water_level > 0.0 && !wf.zero_channel {
        Some(DualPoint::new(0.0, 1.0 / wf.allocation.water_level))
    } else {
        None
    };
    Ok(TradeoffSolution {
        covariance: wf.covariance,
        rate: wf.allocation.rate,
        harvested: q,
        dual,
        iterations: 0,
        converged: true,
    })
}

/// Energy-beamforming corner solution: maximum harvest, whatever rate the
/// beam happens to deliver.
pub(super) fn energy_corner_solution(
    channels: &ChannelPair,
    power: f64,
) -> Result<TradeoffSolution> {
    let eh = energy_beamforming(channels, power)?;
    let rate = mutual_information(channels.h(), &eh.covariance)?;
    Ok(TradeoffSolution {
        covariance: eh.covariance,
        rate,
        harvested: eh.q_max,
        dual: None,
        iterations: 0,
        converged: true,
    })
}

/// Maximize the information rate subject to a harvested-power floor, with
/// the default tolerance and iteration cap.
pub fn harvest_constrained_rate(
    channels: &ChannelPair,
    power: f64,
    q_bar: f64,
    tol: f64,
) -> Result<TradeoffSolution> {
    harvest_constrained_rate_with(channels, power, q_bar, tol, DEFAULT_MAX_ITER)
}

/// As [`harvest_constrained_rate`] with an explicit iteration cap. A run
/// that exhausts the cap still returns its best iterate, flagged
/// `converged: false`.
pub fn harvest_constrained_rate_with(
    channels: &ChannelPair,
    power: f64,
    q_bar: f64,
    tol: f64,
    max_iter: usize,
) -> Result<TradeoffSolution> {
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
            let ctx = LagrangianContext::new(channels)?;
            let g1 = ctx.g1();
            let q_max = g1 * power;
            let lambda_ub = r_max_nat / (q_max - q_bar + 1e-12 * q_max.max(1.0));
            let mu_ub =
                channels.tx_count() as f64 * channels.h1() + lambda_ub * g1;
            let center = [1.0 / (2.0 * g1), 1.0];
            let mut inner_err: Option<Error> = None;
            let run = run_dual(
                g1,
                q_bar,
                power,
                center,
                lambda_ub,
                mu_ub,
                tol,
                max_iter,
                |dual| match ctx.maximize(dual) {
                    Ok(modes) => InnerEval {
                        q: modes.q(),
                        trace: modes.trace(),
                    },
                    Err(e) => {
                        inner_err = Some(e);
                        // Zero subgradient terminates the dual loop.
                        InnerEval {
                            q: q_bar,
                            trace: power,
                        }
                    }
                },
            );
            if let Some(e) = inner_err {
                return Err(e);
            }
            let modes = ctx.maximize(run.best)?;
            let scale = if modes.trace() > power {
                power / modes.trace()
            } else {
                1.0
            };
            let (matrix, rate_nat, q) = modes.assemble(scale, channels.tx_count());
            let covariance = TransmitCovariance::new(matrix, power)?;
            let eval = InnerEval {
                q,
                trace: covariance.trace(),
            };
            let converged = run.converged && primal_residual(run.best, eval, q_bar, power) <= tol;
            Ok(TradeoffSolution {
                covariance,
                rate: nats_to_bits(rate_nat),
                harvested: q,
                dual: Some(run.best),
                iterations: run.iterations,
                converged,
            })
        }
    }
}

/// Convenience wrapper with the default tolerance.
pub fn harvest_constrained_rate_default(
    channels: &ChannelPair,
    power: f64,
    q_bar: f64,
) -> Result<TradeoffSolution> {
    harvest_constrained_rate(channels, power, q_bar, DEFAULT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cmatrix_from_diagonal, complex_gaussian_matrix, frobenius_norm, hermitian_eigen};
    use approx::assert_relative_eq;

    fn seeded_pair(seed: u64, n_id: usize, n_eh: usize, m: usize) -> ChannelPair {
        ChannelPair::separated(
            complex_gaussian_matrix(n_id, m, 1.0, seed),
            complex_gaussian_matrix(n_eh, m, 1.0, seed + 1000),
        )
        .unwrap()
    }

    #[test]
    fn maximizer_with_zero_lambda_is_waterfilling_at_unit_level() {
        // mu = 1, lambda = 0: whitening is the identity, so modes with
        // gain <= 1 stay off. For H = [[1]] that means S = 0.
        let pair = ChannelPair::colocated(cmatrix_from_diagonal(&[1.0])).unwrap();
        let s = lagrangian_maximizer(&pair, DualPoint::new(0.0, 1.0)).unwrap();
        assert_eq!(s.trace(), 0.0);
    }

    #[test]
    fn maximizer_with_zero_lambda_matches_waterfilling_structure() {
        let pair = seeded_pair(3, 3, 3, 3);
        let mu = 0.4;
        let s = lagrangian_maximizer(&pair, DualPoint::new(0.0, mu)).unwrap();
        // Expected: eigenmodes of H with powers (1/mu - 1/h_i)^+.
        let gains = pair.h_gains();
        let powers: Vec<f64> = gains.iter().map(|&h| (1.0 / mu - 1.0 / h).max(0.0)).collect();
        let expected = TransmitCovariance::from_eigenbasis(
            &pair.h_svd().v.clone(),
            &powers,
            powers.iter().sum::<f64>() + 1.0,
        )
        .unwrap();
        let diff = frobenius_norm(&(s.matrix() - expected.matrix()));
        assert!(diff < 1e-9, "structure mismatch {diff}");
    }

    #[test]
    fn maximizer_rejects_infeasible_dual() {
        let pair = seeded_pair(4, 2, 2, 2);
        let g1 = pair.g1();
        let err = lagrangian_maximizer(&pair, DualPoint::new(1.0, g1 * 0.5)).unwrap_err();
        assert!(matches!(err, Error::DualInfeasible { .. }));
    }

    #[test]
    fn maximizer_satisfies_first_order_optimality() {
        // KKT for max L(S) over S >= 0: grad(L)(S*) is negative
        // semidefinite and grad(L)(S*) S* = 0, with
        // grad(L) = H^H (I + H S H^H)^{-1} H + lambda G^H G - mu I (nats).
        let pair = seeded_pair(7, 2, 2, 2);
        let g1 = pair.g1();
        let dual = DualPoint::new(0.3 / g1, 1.0);
        let s = lagrangian_maximizer(&pair, dual).unwrap();
        let h = pair.h();
        let g = pair.g();
        let n = h.nrows();
        let mut inner = h * s.matrix() * h.adjoint();
        for i in 0..n {
            inner[(i, i)] += C64::new(1.0, 0.0);
        }
        let inv = inner.try_inverse().unwrap();
        let grad = h.adjoint() * inv * h
            + (g.adjoint() * g).map(|z| z * dual.lambda)
            - CMatrix::identity(2, 2).map(|z| z * dual.mu);
        let grad = linalg::hermitian_part(&grad);
        let eig = hermitian_eigen(&grad, 1e-9).unwrap();
        assert!(
            eig.eigenvalues[0] <= 1e-6,
            "gradient not nonpositive: {}",
            eig.eigenvalues[0]
        );
        let slack = frobenius_norm(&(&grad * s.matrix()));
        assert!(slack <= 1e-6, "complementarity violated: {slack}");
    }

    #[test]
    fn inactive_target_returns_waterfilling() {
        let pair = seeded_pair(10, 2, 2, 2);
        let wf = maximize_rate(&pair, 1.0).unwrap();
        let q_wf = harvested_power(pair.g(), &wf.covariance, 1.0).unwrap();
        let sol = harvest_constrained_rate(&pair, 1.0, q_wf * 0.5, 1e-6).unwrap();
        assert_relative_eq!(sol.rate, wf.allocation.rate, epsilon = 1e-12);
        assert_eq!(sol.dual.unwrap().lambda, 0.0);
        assert!(sol.converged);
    }

    #[test]
    fn max_harvest_target_with_orthogonal_beams_gives_zero_rate() {
        // MISO/MISO, g orthogonal to h: the energy corner carries no
        // information.
        let h = CMatrix::from_row_slice(1, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let g = CMatrix::from_row_slice(1, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let pair = ChannelPair::separated(h, g).unwrap();
        let power = 2.0;
        let q_max = pair.g1() * power;
        let sol = harvest_constrained_rate(&pair, power, q_max, 1e-6).unwrap();
        assert_eq!(sol.rate, 0.0);
        assert_relative_eq!(sol.harvested, q_max, epsilon = 1e-12);
        assert_relative_eq!(sol.covariance.matrix()[(1, 1)].re, power, epsilon = 1e-9);
    }

    #[test]
    fn infeasible_target_is_an_error() {
        let pair = seeded_pair(11, 2, 2, 2);
        let q_max = pair.g1() * 1.0;
        assert!(matches!(
            harvest_constrained_rate(&pair, 1.0, q_max * 1.01, 1e-6),
            Err(Error::InfeasibleHarvest { .. })
        ));
    }

    #[test]
    fn interior_solution_is_feasible_tight_and_consistent() {
        let pair = seeded_pair(12, 3, 3, 3);
        let power = 1.0;
        let wf = maximize_rate(&pair, power).unwrap();
        let q_wf = harvested_power(pair.g(), &wf.covariance, 1.0).unwrap();
        let q_max = pair.g1() * power;
        let q_bar = 0.5 * (q_wf + q_max);
        let sol = harvest_constrained_rate(&pair, power, q_bar, 1e-6).unwrap();
        assert!(sol.converged, "not converged: {:?}", sol.residuals(q_bar, power));
        assert!(sol.harvested >= q_bar * (1.0 - 1e-6));
        assert!(sol.covariance.trace() <= power + 1e-8);
        // Rate field agrees with a direct evaluation on the covariance.
        let mi = mutual_information(pair.h(), &sol.covariance).unwrap();
        assert_relative_eq!(sol.rate, mi, epsilon = 1e-8);
        // Constrained rate cannot beat the unconstrained maximum.
        assert!(sol.rate <= wf.allocation.rate + 1e-9);
        let r = sol.residuals(q_bar, power);
        assert!(r.iter().all(|&x| x <= 1e-6), "residuals {r:?}");
    }

    #[test]
    fn tightening_the_target_never_raises_the_rate() {
        let pair = seeded_pair(13, 2, 2, 2);
        let power = 1.0;
        let q_max = pair.g1() * power;
        let mut last = f64::INFINITY;
        for k in 1..10 {
            let q_bar = q_max * k as f64 / 10.0;
            let sol = harvest_constrained_rate(&pair, power, q_bar, 1e-6).unwrap();
            assert!(
                sol.rate <= last + 1e-7,
                "rate increased from {last} to {} at q_bar {q_bar}",
                sol.rate
            );
            last = sol.rate;
        }
    }
}
