//! Independent brute-force verifiers.
//!
//! Nothing in this module shares code with the solvers it checks: the grid
//! searches enumerate power allocations directly, the beam search samples
//! random directions, and containment checks work on traced boundary
//! points. Tests and the acceptance suite use these as ground truth.

use rand_chacha::rand_core::RngCore;

use crate::boundary::REBoundary;
use crate::covariance::TransmitCovariance;
use crate::error::{Error, Result};
use crate::linalg::{self, cmatrix_from_diagonal};
use crate::{C64, CMatrix, CVector};

/// Exhaustive grid search result over diagonal power allocations.
#[derive(Debug, Clone)]
pub struct GridOracle {
    pub best_rate: f64,
    pub best_powers: Vec<f64>,
    pub grid_size: u64,
    pub resolution: f64,
}

impl GridOracle {
    /// The best allocation as a diagonal covariance.
    pub fn best_covariance(&self, power: f64) -> Result<TransmitCovariance> {
        TransmitCovariance::new(cmatrix_from_diagonal(&self.best_powers), power)
    }
}

/// Exhaustive search over diagonal power vectors `p_i = k_i * step`,
/// `sum k_i <= K`, `step = resolution * power`, maximizing
/// `sum log2(1 + h_i p_i)` among points with `sum g_i p_i >= q_bar`.
///
/// Valid as an oracle whenever the true optimum is known to be diagonal in
/// the same basis (co-located receivers, or any pair of channels sharing
/// eigenvectors). Cost is `O(K^T / T!)`; keep `T <= 3` at fine resolutions.
pub fn grid_search_constrained_rate_diag(
    h_gains: &[f64],
    g_gains: &[f64],
    power: f64,
    q_bar: f64,
    resolution: f64,
) -> Result<GridOracle> {
    if h_gains.len() != g_gains.len() || h_gains.is_empty() {
        return Err(Error::DimensionMismatch {
            context: "grid_search_constrained_rate_diag",
            expected: "matching nonempty gain vectors".into(),
            got: format!("{} vs {}", h_gains.len(), g_gains.len()),
        });
    }
    if !(resolution > 0.0 && resolution <= 1.0) || !(power > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < resolution <= 1 and power > 0, got ({resolution}, {power})"
        )));
    }
    let steps = (1.0 / resolution).round() as usize;
    let step = power / steps as f64;
    let t = h_gains.len();
    // Per-axis lookup tables: rate and harvest contributions of k steps.
    let rate_table: Vec<Vec<f64>> = h_gains
        .iter()
        .map(|&h| {
            (0..=steps)
                .map(|k| (1.0 + h * k as f64 * step).log2())
                .collect()
        })
        .collect();
    let harvest_table: Vec<Vec<f64>> = g_gains
        .iter()
        .map(|&g| (0..=steps).map(|k| g * k as f64 * step).collect())
        .collect();

    let mut best_rate = f64::NEG_INFINITY;
    let mut best_index = vec![0usize; t];
    let mut index = vec![0usize; t];
    let mut grid_size = 0u64;

    recurse(
        0,
        steps,
        0.0,
        0.0,
        q_bar,
        &rate_table,
        &harvest_table,
        &mut index,
        &mut best_rate,
        &mut best_index,
        &mut grid_size,
    );

    if !best_rate.is_finite() {
        return Err(Error::EmptyFeasibleGrid);
    }
    Ok(GridOracle {
        best_rate,
        best_powers: best_index.iter().map(|&k| k as f64 * step).collect(),
        grid_size,
        resolution,
    })
}

/// Depth-first enumeration of the simplex; the innermost axis is a tight
/// loop over the precomputed tables.
#[allow(clippy::too_many_arguments)]
fn recurse(
    axis: usize,
    remaining: usize,
    rate_acc: f64,
    harvest_acc: f64,
    q_bar: f64,
    rate_table: &[Vec<f64>],
    harvest_table: &[Vec<f64>],
    index: &mut [usize],
    best_rate: &mut f64,
    best_index: &mut [usize],
    grid_size: &mut u64,
) {
    let t = rate_table.len();
    if axis == t - 1 {
        let rates = &rate_table[axis];
        let harvests = &harvest_table[axis];
        for k in 0..=remaining {
            *grid_size += 1;
            if harvest_acc + harvests[k] >= q_bar {
                let rate = rate_acc + rates[k];
                if rate > *best_rate {
                    *best_rate = rate;
                    index[axis] = k;
                    best_index.copy_from_slice(index);
                }
            }
        }
        return;
    }
    for k in 0..=remaining {
        index[axis] = k;
        recurse(
            axis + 1,
            remaining - k,
            rate_acc + rate_table[axis][k],
            harvest_acc + harvest_table[axis][k],
            q_bar,
            rate_table,
            harvest_table,
            index,
            best_rate,
            best_index,
            grid_size,
        );
    }
}

/// Result of a randomized beamforming search.
#[derive(Debug, Clone)]
pub struct BeamSearch {
    pub best_power: f64,
    pub best_beam: CVector,
    pub n_samples: usize,
}

/// Harvested power of the rank-one covariance `power * v v^H`: `power *
/// |G v|^2` for a unit `v`.
pub fn beam_power(g_matrix: &CMatrix, power: f64, v: &CVector) -> f64 {
    power * (g_matrix * v).norm_squared()
}

/// Sample `n_samples` random unit beams and return the best harvested
/// power. Never exceeds the top-eigenmode value, approaching it as the
/// sample count grows.
pub fn random_beam_search(
    g_matrix: &CMatrix,
    power: f64,
    n_samples: usize,
    seed: u64,
) -> Result<BeamSearch> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let mut rng = linalg::seeded_rng(seed);
    let dim = g_matrix.ncols();
    let mut best_power = f64::NEG_INFINITY;
    let mut best_beam = CVector::zeros(dim);
    for _ in 0..n_samples {
        let v = linalg::random_unit_vector(dim, &mut rng);
        let q = beam_power(g_matrix, power, &v);
        if q > best_power {
            best_power = q;
            best_beam = v;
        }
    }
    Ok(BeamSearch {
        best_power,
        best_beam,
        n_samples,
    })
}

/// Random PSD matrix with trace exactly `trace`, for property tests.
pub fn random_psd_with_trace<R: RngCore>(dim: usize, trace: f64, rng: &mut R) -> CMatrix {
    let w = CMatrix::from_fn(dim, dim, |_, _| linalg::standard_complex_gaussian(rng));
    let mut s = &w * w.adjoint();
    let current = linalg::trace_re(&s);
    if current > 0.0 {
        s *= C64::new(trace / current, 0.0);
    }
    linalg::hermitian_part(&s)
}

/// One containment violation: the inner boundary exceeds the outer one.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentViolation {
    pub energy: f64,
    pub inner_rate: f64,
    /// Interpolated outer rate, or `None` when the inner sample lies
    /// outside the outer boundary's energy span.
    pub outer_rate: Option<f64>,
}

/// Report from [`region_contains`].
#[derive(Debug, Clone)]
pub struct ContainmentReport {
    pub contained: bool,
    pub violations: Vec<ContainmentViolation>,
    pub points_checked: usize,
}

/// Check that `inner`'s boundary lies inside `outer`'s region: at every
/// converged inner sample, the linearly interpolated outer rate must be at
/// least the inner rate minus `tol`.
pub fn region_contains(
    outer: &REBoundary,
    inner: &REBoundary,
    tol: f64,
) -> Result<ContainmentReport> {
    let (o_min, o_max) = (outer.min_energy(), outer.max_energy());
    let (i_min, i_max) = (inner.min_energy(), inner.max_energy());
    if !(o_min <= i_max && i_min <= o_max) {
        return Err(Error::DisjointEnergyRanges {
            a_min: o_min,
            a_max: o_max,
            b_min: i_min,
            b_max: i_max,
        });
    }
    let mut violations = Vec::new();
    let mut points_checked = 0;
    for p in inner.converged_points() {
        points_checked += 1;
        match outer.rate_at(p.energy) {
            Some(outer_rate) => {
                if p.rate > outer_rate + tol {
                    violations.push(ContainmentViolation {
                        energy: p.energy,
                        inner_rate: p.rate,
                        outer_rate: Some(outer_rate),
                    });
                }
            }
            None => violations.push(ContainmentViolation {
                energy: p.energy,
                inner_rate: p.rate,
                outer_rate: None,
            }),
        }
    }
    Ok(ContainmentReport {
        contained: violations.is_empty(),
        violations,
        points_checked,
    })
}

/// Best rate over real symmetric PSD 2x2 covariances `[[a, c], [c, b]]`
/// with `a + b <= power`, `a b >= c^2`, subject to `tr(G S G^H) >= q_bar`.
/// An independent check for the general solver on real 2x2 instances.
#[derive(Debug, Clone)]
pub struct Psd2x2Oracle {
    pub best_rate: f64,
    pub best_matrix: [[f64; 2]; 2],
    pub grid_size: u64,
}

pub fn grid_search_constrained_rate_real2x2(
    h: &CMatrix,
    g: &CMatrix,
    power: f64,
    q_bar: f64,
    resolution: f64,
) -> Result<Psd2x2Oracle> {
    if h.ncols() != 2 || g.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            context: "grid_search_constrained_rate_real2x2",
            expected: "2 transmit antennas".into(),
            got: format!("{} / {}", h.ncols(), g.ncols()),
        });
    }
    let steps = (1.0 / resolution).round() as usize;
    let step = power / steps as f64;
    let mut best_rate = f64::NEG_INFINITY;
    let mut best = [[0.0; 2]; 2];
    let mut grid_size = 0u64;
    for ia in 0..=steps {
        let a = ia as f64 * step;
        for ib in 0..=(steps - ia) {
            let b = ib as f64 * step;
            let c_max = (a * b).sqrt();
            let kc = (c_max / step).floor() as i64;
            for ic in -kc..=kc {
                let c = ic as f64 * step;
                grid_size += 1;
                let s = CMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        C64::new(a, 0.0),
                        C64::new(c, 0.0),
                        C64::new(c, 0.0),
                        C64::new(b, 0.0),
                    ],
                );
                let harvest = linalg::trace_re(&(g * &s * g.adjoint()));
                if harvest < q_bar {
                    continue;
                }
                let m = h * &s * h.adjoint();
                let n = m.nrows();
                let mut det_arg = CMatrix::identity(n, n);
                det_arg += m;
                let rate = log2_det_hermitian(&det_arg);
                if rate > best_rate {
                    best_rate = rate;
                    best = [[a, c], [c, b]];
                }
            }
        }
    }
    if !best_rate.is_finite() {
        return Err(Error::EmptyFeasibleGrid);
    }
    Ok(Psd2x2Oracle {
        best_rate,
        best_matrix: best,
        grid_size,
    })
}

fn log2_det_hermitian(m: &CMatrix) -> f64 {
    match m.clone().cholesky() {
        Some(chol) => {
            let l = chol.l();
            2.0 * (0..m.nrows()).map(|i| l[(i, i)].re.log2()).sum::<f64>()
        }
        None => f64::NEG_INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{Scheme, TraceMetadata, TracedPoint};
    use crate::channel::ChannelPair;
    use crate::linalg::complex_gaussian_matrix;
    use crate::solvers::colocated::harvest_constrained_rate_colocated;
    use crate::solvers::energy::energy_beamforming;
    use crate::solvers::waterfill::water_fill;

    #[test]
    fn siso_grid_matches_closed_form() {
        let oracle = grid_search_constrained_rate_diag(&[2.0], &[2.0], 1.0, 1.5, 1e-3).unwrap();
        let expected = (1.0f64 + 2.0).log2();
        assert!((oracle.best_rate - expected).abs() <= 2e-3);
    }

    #[test]
    fn unconstrained_grid_matches_waterfilling() {
        let gains = [4.0, 1.0];
        let oracle = grid_search_constrained_rate_diag(&gains, &gains, 1.0, 0.0, 1e-3).unwrap();
        let wf = water_fill(&gains, 1.0);
        assert!(
            (oracle.best_rate - wf.rate).abs() <= 5e-3,
            "oracle {} vs wf {}",
            oracle.best_rate,
            wf.rate
        );
    }

    #[test]
    fn grid_certifies_colocated_solver() {
        // gains (4, 1), P = 1: q_wf = 4*0.875 + 0.125 = 3.625, q_max = 4.
        // q_bar = 3.5 sits on the flat part, 3.8 prices the constraint in.
        let pair =
            ChannelPair::colocated(crate::linalg::cmatrix_from_diagonal(&[2.0, 1.0])).unwrap();
        for q_bar in [3.5, 3.8] {
            let sol = harvest_constrained_rate_colocated(&pair, 1.0, q_bar, 1e-8).unwrap();
            let oracle =
                grid_search_constrained_rate_diag(&[4.0, 1.0], &[4.0, 1.0], 1.0, q_bar, 1e-3)
                    .unwrap();
            assert!(
                (sol.rate - oracle.best_rate).abs() <= 1e-2,
                "q_bar {q_bar}: solver {} vs oracle {}",
                sol.rate,
                oracle.best_rate
            );
            // The solver is optimal: the oracle may not beat it by more
            // than its own quantization.
            assert!(oracle.best_rate <= sol.rate + 1e-4);
        }
    }

    #[test]
    fn infeasible_target_empty_grid() {
        let err = grid_search_constrained_rate_diag(&[1.0], &[1.0], 1.0, 2.0, 1e-2).unwrap_err();
        assert!(matches!(err, Error::EmptyFeasibleGrid));
    }

    #[test]
    fn beam_search_never_beats_energy_beamforming() {
        let g = complex_gaussian_matrix(3, 3, 1.0, 123);
        let pair =
            ChannelPair::separated(complex_gaussian_matrix(3, 3, 1.0, 124), g.clone()).unwrap();
        let sol = energy_beamforming(&pair, 1.0).unwrap();
        let search = random_beam_search(&g, 1.0, 20_000, 7).unwrap();
        assert!(search.best_power <= sol.q_max + 1e-9);
        assert!(search.best_power >= 0.5 * sol.q_max, "search too weak");
        // The exact top singular direction achieves q_max.
        let exact = beam_power(&g, 1.0, &pair.energy_beam());
        assert!((exact - sol.q_max).abs() <= 1e-9 * sol.q_max.max(1.0));
    }

    fn boundary_from(points: &[(f64, f64)]) -> REBoundary {
        REBoundary::assemble(
            Scheme::Ts1,
            points
                .iter()
                .map(|&(rate, energy)| TracedPoint::ok(rate, energy))
                .collect(),
            TraceMetadata::default(),
        )
        .unwrap()
    }

    #[test]
    fn region_contains_is_reflexive() {
        let b = boundary_from(&[(3.0, 0.0), (2.0, 1.0), (0.0, 2.0)]);
        let report = region_contains(&b, &b, 1e-9).unwrap();
        assert!(report.contained);
    }

    #[test]
    fn region_contains_detects_violation() {
        let outer = boundary_from(&[(3.0, 0.0), (0.0, 2.0)]);
        let inner = boundary_from(&[(3.5, 0.0), (0.0, 1.0)]);
        let report = region_contains(&outer, &inner, 1e-6).unwrap();
        assert!(!report.contained);
        assert_eq!(report.violations[0].energy, 0.0);
    }

    #[test]
    fn region_contains_rejects_disjoint_ranges() {
        let a = boundary_from(&[(1.0, 0.0), (0.5, 1.0)]);
        let b = boundary_from(&[(1.0, 5.0), (0.5, 6.0)]);
        assert!(matches!(
            region_contains(&a, &b, 1e-6),
            Err(Error::DisjointEnergyRanges { .. })
        ));
    }

    #[test]
    fn real2x2_grid_certifies_general_solver() {
        let h = crate::linalg::cmatrix_from_real_rows(&[vec![1.0, 0.3], vec![0.2, 0.8]]);
        let g = crate::linalg::cmatrix_from_real_rows(&[vec![0.5, 0.9], vec![0.7, 0.1]]);
        let pair = ChannelPair::separated(h.clone(), g.clone()).unwrap();
        let power = 1.0;
        let q_max = pair.g1() * power;
        let wf = crate::solvers::waterfill::maximize_rate(&pair, power).unwrap();
        let q_wf = crate::metrics::harvested_power(pair.g(), &wf.covariance, 1.0).unwrap();
        let q_bar = 0.5 * (q_wf + q_max);
        let sol =
            crate::solvers::tradeoff::harvest_constrained_rate(&pair, power, q_bar, 1e-8).unwrap();
        let oracle = grid_search_constrained_rate_real2x2(&h, &g, power, q_bar, 2e-3).unwrap();
        assert!(
            (sol.rate - oracle.best_rate).abs() <= 1e-3,
            "solver {} vs oracle {}",
            sol.rate,
            oracle.best_rate
        );
        assert!(oracle.best_rate <= sol.rate + 1e-4);
    }
}
