//! Power-splitting tracers: each receive antenna divides its signal
//! between the harvester and the decoder.
//!
//! A split vector `rho` turns one co-located channel `H` into the pair
//! `H' = (I - diag(rho))^{1/2} H` (decoding path) and
//! `G' = diag(rho)^{1/2} H` (harvesting path); each fixed split yields a
//! sub-region traced like a separated-receiver instance, and the scheme's
//! region is the union over the splits. Uniform splits keep the eigenbasis
//! of `H`, so their sub-problems run on the fast diagonal engine; general
//! splits go through the full solver.
//!
//! The uniform family is a continuum (every `rho` in `[0, 1]` is
//! admissible), so its envelope is not left at the swept samples: at every
//! energy gridpoint the best ratio is located by a golden-section search
//! bracketed by the neighboring swept values. Without this the envelope
//! staircases near each sub-region's energy endpoint and fails the
//! concavity the continuum union actually has. Finite unions (antenna
//! switching, explicit candidate lists) have no such continuum and keep
//! the raw pointwise-max envelope.

use rayon::prelude::*;

use crate::boundary::{PointFailure, REBoundary, Scheme, TraceMetadata, TracedPoint};
use crate::channel::ChannelPair;
use crate::error::{Error, Result};
use crate::regions::envelope::{concave_majorant, upper_envelope, SubCurve};
use crate::regions::separated::check_zeta;
use crate::regions::sweep::SweepSpec;
use crate::solvers::colocated::diag_tradeoff;
use crate::solvers::tradeoff::harvest_constrained_rate;
use crate::solvers::waterfill::water_fill;
use crate::solvers::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::{C64, CMatrix};

/// Per-antenna power split ratios, each in `[0, 1]` (the share sent to
/// the harvester).
#[derive(Debug, Clone, PartialEq)]
pub struct SplitVector {
    rho: Vec<f64>,
}

impl SplitVector {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::InvalidParameter("empty split vector".into()));
        }
        if rho.iter().any(|&r| !(0.0..=1.0).contains(&r)) {
            return Err(Error::InvalidParameter(format!(
                "split ratios must lie in [0, 1]: {rho:?}"
            )));
        }
        Ok(Self { rho })
    }

    pub fn uniform(rho: f64, n: usize) -> Result<Self> {
        Self::new(vec![rho; n])
    }

    pub fn ratios(&self) -> &[f64] {
        &self.rho
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// A uniform split collapses to a scalar ratio.
    pub fn as_uniform(&self) -> Option<f64> {
        let first = self.rho[0];
        self.rho.iter().all(|&r| r == first).then_some(first)
    }
}

/// Subset of receive antennas switched entirely to harvesting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntennaPartition {
    eh_antennas: Vec<usize>,
}

impl AntennaPartition {
    /// `eh_antennas` are 0-based receive antenna indices, each `< n`.
    pub fn new(mut eh_antennas: Vec<usize>, n: usize) -> Result<Self> {
        eh_antennas.sort_unstable();
        eh_antennas.dedup();
        if eh_antennas.iter().any(|&i| i >= n) {
            return Err(Error::InvalidParameter(format!(
                "antenna index out of range (n = {n}): {eh_antennas:?}"
            )));
        }
        Ok(Self { eh_antennas })
    }

    pub fn eh_antennas(&self) -> &[usize] {
        &self.eh_antennas
    }

    pub fn to_split(&self, n: usize) -> Result<SplitVector> {
        let mut rho = vec![0.0; n];
        for &i in &self.eh_antennas {
            if i >= n {
                return Err(Error::InvalidParameter(format!(
                    "antenna index {i} out of range (n = {n})"
                )));
            }
            rho[i] = 1.0;
        }
        SplitVector::new(rho)
    }

    /// All `2^n` partitions (for exhaustive antenna-switching sweeps).
    pub fn enumerate_all(n: usize) -> Result<Vec<Self>> {
        if n > 8 {
            return Err(Error::InvalidParameter(format!(
                "refusing to enumerate 2^{n} partitions; supply them explicitly"
            )));
        }
        Ok((0u32..(1 << n))
            .map(|mask| Self {
                eh_antennas: (0..n).filter(|&i| mask & (1 << i) != 0).collect(),
            })
            .collect())
    }
}

/// One traced sub-region plus bookkeeping.
struct TracedSubCurve {
    curve: SubCurve,
    failures: Vec<PointFailure>,
    non_converged: usize,
    max_energy: f64,
}

/// Converged rate of the uniform-split sub-problem at one harvest target,
/// `None` when infeasible or not converged.
fn uniform_rate(gains: &[f64], power: f64, rho: f64, q_bar: f64) -> Option<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return None;
    }
    diag_tradeoff(
        gains,
        1.0 - rho,
        rho,
        power,
        q_bar,
        DEFAULT_TOL,
        DEFAULT_MAX_ITER,
    )
    .ok()
    .filter(|sol| sol.converged)
    .map(|sol| sol.rate)
}

/// Sub-region of a uniform split, on the diagonal engine.
fn uniform_subcurve(
    gains: &[f64],
    power: f64,
    rho: f64,
    qbar_sweep: &SweepSpec,
    label: &str,
) -> TracedSubCurve {
    let h1 = gains.first().copied().unwrap_or(0.0);
    let q_max = rho * h1 * power;
    if rho <= 0.0 {
        let r_max = water_fill(gains, power).rate;
        return TracedSubCurve {
            curve: SubCurve::new(vec![(0.0, r_max)]),
            failures: Vec::new(),
            non_converged: 0,
            max_energy: 0.0,
        };
    }
    if rho >= 1.0 {
        return TracedSubCurve {
            curve: SubCurve::new(vec![(0.0, 0.0), (q_max, 0.0)]),
            failures: Vec::new(),
            non_converged: 0,
            max_energy: q_max,
        };
    }
    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut non_converged = 0;
    for (i, q_bar) in qbar_sweep.values(0.0, q_max).into_iter().enumerate() {
        match diag_tradeoff(
            gains,
            1.0 - rho,
            rho,
            power,
            q_bar,
            DEFAULT_TOL,
            DEFAULT_MAX_ITER,
        ) {
            Ok(sol) => {
                if sol.converged {
                    if i == 0 {
                        // Anchor the flat segment down to zero energy.
                        points.push((0.0, sol.rate));
                    }
                    points.push((sol.harvested, sol.rate));
                } else {
                    non_converged += 1;
                }
            }
            Err(e) => failures.push(PointFailure {
                index: i,
                energy: q_bar,
                message: format!("{label}: {e}"),
            }),
        }
    }
    TracedSubCurve {
        curve: SubCurve::new(points),
        failures,
        non_converged,
        max_energy: q_max,
    }
}

/// Golden-section maximization of a possibly-partial function on
/// `[lo, hi]`. Returns the best (argument, value) among all evaluations.
fn golden_max(
    lo: f64,
    hi: f64,
    iters: usize,
    f: impl Fn(f64) -> Option<f64>,
) -> Option<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best: Option<(f64, f64)> = None;
    let mut track = |x: f64, v: Option<f64>| -> f64 {
        match v {
            Some(v) => {
                if best.map_or(true, |(_, b)| v > b) {
                    best = Some((x, v));
                }
                v
            }
            None => f64::NEG_INFINITY,
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = track(x1, f(x1));
    let mut f2 = track(x2, f(x2));
    for _ in 0..iters {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = track(x1, f(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = track(x2, f(x2));
        }
    }
    best
}

/// Envelope of the uniform-split family on a shared energy grid:
/// pointwise max over the swept sub-curves, tightened by a golden-section
/// search over the continuous ratio interval spanned by the seeds (plus
/// the smallest feasible ratio, whose sub-region corner sits exactly at
/// the gridpoint). Ratios outside the seed span are never explored, so a
/// degenerate seed list stays a plain finite union.
struct UniformFamilyEnvelope {
    values: Vec<Option<f64>>,
    failures: Vec<PointFailure>,
    non_converged: usize,
}

fn uniform_family_envelope(
    gains: &[f64],
    power: f64,
    rho_seeds: &[f64],
    qbar_sweep: &SweepSpec,
    grid: &[f64],
) -> UniformFamilyEnvelope {
    let h1 = gains.first().copied().unwrap_or(0.0);
    let q_top = h1 * power;
    let mut seeds: Vec<f64> = rho_seeds.to_vec();
    seeds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    seeds.dedup();
    let subcurves: Vec<TracedSubCurve> = seeds
        .par_iter()
        .map(|&rho| uniform_subcurve(gains, power, rho, qbar_sweep, &format!("rho={rho}")))
        .collect();
    let curves: Vec<SubCurve> = subcurves.iter().map(|s| s.curve.clone()).collect();
    let base = upper_envelope(&curves, grid);
    let span_lo = seeds.first().copied().unwrap_or(0.0);
    let span_hi = seeds.last().copied().unwrap_or(0.0);

    let values: Vec<Option<f64>> = grid
        .par_iter()
        .zip(&base)
        .map(|(&energy, &base_rate)| {
            if q_top <= 0.0 || span_hi <= span_lo {
                return base_rate;
            }
            let rho_min = (energy / q_top).clamp(0.0, 1.0);
            let lo = rho_min.max(span_lo);
            let hi = span_hi;
            if lo > hi {
                return base_rate; // no ratio in the span reaches this far
            }
            let f = |rho: f64| uniform_rate(gains, power, rho.clamp(lo, hi), energy);
            let mut best = base_rate;
            let mut consider = |r: Option<f64>| {
                if let Some(r) = r {
                    if best.map_or(true, |b| r > b) {
                        best = Some(r);
                    }
                }
            };
            // Corner candidate: the smallest feasible ratio meets the
            // target exactly at its beamforming corner.
            consider(f(lo));
            consider(golden_max(lo, hi, 40, &f).map(|(_, r)| r));
            best
        })
        .collect();

    let mut failures = Vec::new();
    let mut non_converged = 0;
    for s in subcurves {
        failures.extend(s.failures);
        non_converged += s.non_converged;
    }
    UniformFamilyEnvelope {
        values,
        failures,
        non_converged,
    }
}

/// Sub-region of an arbitrary split, on the general solver.
fn split_subcurve(
    channels: &ChannelPair,
    power: f64,
    split: &SplitVector,
    qbar_sweep: &SweepSpec,
) -> Result<TracedSubCurve> {
    if let Some(rho) = split.as_uniform() {
        return Ok(uniform_subcurve(
            &channels.h_gains(),
            power,
            rho,
            qbar_sweep,
            &format!("rho={rho}"),
        ));
    }
    let h = channels.h();
    let n = h.nrows();
    if split.len() != n {
        return Err(Error::DimensionMismatch {
            context: "split_subcurve",
            expected: format!("{n} split ratios"),
            got: format!("{}", split.len()),
        });
    }
    let scale_rows = |weights: &dyn Fn(f64) -> f64| -> CMatrix {
        let mut m = h.clone();
        for i in 0..n {
            let w = C64::new(weights(split.ratios()[i]), 0.0);
            for j in 0..m.ncols() {
                m[(i, j)] *= w;
            }
        }
        m
    };
    let id_path = scale_rows(&|r| (1.0 - r).sqrt());
    let eh_path = scale_rows(&|r| r.sqrt());
    let pair = ChannelPair::separated(id_path, eh_path)?;
    let q_max = pair.g1() * power;
    let label = format!("rho={:?}", split.ratios());
    if q_max <= 0.0 {
        let r_max = water_fill(&pair.h_gains(), power).rate;
        return Ok(TracedSubCurve {
            curve: SubCurve::new(vec![(0.0, r_max)]),
            failures: Vec::new(),
            non_converged: 0,
            max_energy: 0.0,
        });
    }
    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut non_converged = 0;
    for (i, q_bar) in qbar_sweep.values(0.0, q_max).into_iter().enumerate() {
        match harvest_constrained_rate(&pair, power, q_bar, DEFAULT_TOL) {
            Ok(sol) => {
                if sol.converged {
                    if i == 0 {
                        points.push((0.0, sol.rate));
                    }
                    points.push((sol.harvested, sol.rate));
                } else {
                    non_converged += 1;
                }
            }
            Err(e) => failures.push(PointFailure {
                index: i,
                energy: q_bar,
                message: format!("{label}: {e}"),
            }),
        }
    }
    Ok(TracedSubCurve {
        curve: SubCurve::new(points),
        failures,
        non_converged,
        max_energy: q_max,
    })
}

struct EnvelopeParts {
    points: Vec<TracedPoint>,
    failures: Vec<PointFailure>,
    non_converged: usize,
}

fn finite_union_points(
    subcurves: Vec<TracedSubCurve>,
    grid: &[f64],
) -> EnvelopeParts {
    let curves: Vec<SubCurve> = subcurves
        .iter()
        .filter(|s| !s.curve.is_empty())
        .map(|s| s.curve.clone())
        .collect();
    let envelope = upper_envelope(&curves, grid);
    let mut points = Vec::new();
    for (&energy, rate) in grid.iter().zip(&envelope) {
        if let Some(rate) = rate {
            points.push(TracedPoint::ok(*rate, energy));
        }
    }
    let mut failures = Vec::new();
    let mut non_converged = 0;
    for s in subcurves {
        failures.extend(s.failures);
        non_converged += s.non_converged;
    }
    EnvelopeParts {
        points,
        failures,
        non_converged,
    }
}

fn assemble_boundary(
    scheme: Scheme,
    mut parts: EnvelopeParts,
    qbar_sweep: &SweepSpec,
    rho_points: Option<usize>,
    zeta: f64,
    mut notes: Vec<String>,
) -> Result<REBoundary> {
    if matches!(scheme, Scheme::Ups | Scheme::Ps) {
        // These regions are convex (time-sharing two splitter settings
        // achieves any chord), so the boundary is the concave hull of the
        // traced union. The hull walk needs ascending energies.
        debug_assert!(parts
            .points
            .windows(2)
            .all(|w| w[0].energy <= w[1].energy));
        let raw: Vec<(f64, f64)> = parts.points.iter().map(|p| (p.energy, p.rate)).collect();
        for (p, (_, rate)) in parts.points.iter_mut().zip(concave_majorant(&raw)) {
            p.rate = rate;
        }
    }
    if parts.non_converged > 0 {
        notes.push(format!(
            "{} sub-region samples did not converge and were excluded",
            parts.non_converged
        ));
    }
    let metadata = TraceMetadata {
        n_points: qbar_sweep.n_points(),
        rho_points,
        solver_tol: Some(DEFAULT_TOL),
        failures: parts.failures,
        notes,
    };
    Ok(REBoundary::assemble(scheme, parts.points, metadata)?.with_energy_scaled(zeta))
}

fn grid_points(grid: &[f64], values: &[Option<f64>]) -> Vec<TracedPoint> {
    grid.iter()
        .zip(values)
        .filter_map(|(&energy, rate)| rate.map(|rate| TracedPoint::ok(rate, energy)))
        .collect()
}

/// Uniform power splitting: one shared ratio, swept over `[0, 1]` and
/// refined per energy gridpoint.
pub fn uniform_power_splitting(
    channels: &ChannelPair,
    power: f64,
    zeta: f64,
    rho_sweep: &SweepSpec,
    qbar_sweep: &SweepSpec,
) -> Result<REBoundary> {
    require_colocated(channels)?;
    check_zeta(zeta)?;
    let gains = channels.h_gains();
    let seeds = rho_sweep.values(0.0, 1.0);
    let q_top = seeds.last().copied().unwrap_or(0.0) * channels.h1() * power;
    let grid = qbar_sweep.values(0.0, q_top);
    let envelope = uniform_family_envelope(&gains, power, &seeds, qbar_sweep, &grid);
    assemble_boundary(
        Scheme::Ups,
        EnvelopeParts {
            points: grid_points(&grid, &envelope.values),
            failures: envelope.failures,
            non_converged: envelope.non_converged,
        },
        qbar_sweep,
        Some(rho_sweep.n_points()),
        zeta,
        Vec::new(),
    )
}

/// General power splitting: the envelope over an explicit candidate list.
/// Uniform candidates are treated as samples of the continuum uniform
/// family (with the same per-gridpoint refinement as the uniform tracer);
/// non-uniform candidates contribute their finite sub-regions.
pub fn power_splitting_envelope(
    channels: &ChannelPair,
    power: f64,
    zeta: f64,
    candidates: &[SplitVector],
    qbar_sweep: &SweepSpec,
) -> Result<REBoundary> {
    require_colocated(channels)?;
    check_zeta(zeta)?;
    if candidates.is_empty() {
        return Err(Error::InvalidParameter(
            "power splitting needs at least one candidate split".into(),
        ));
    }
    let gains = channels.h_gains();
    let uniform_seeds: Vec<f64> = candidates.iter().filter_map(|c| c.as_uniform()).collect();
    let general: Vec<&SplitVector> = candidates
        .iter()
        .filter(|c| c.as_uniform().is_none())
        .collect();

    let general_curves: Vec<Result<TracedSubCurve>> = general
        .par_iter()
        .map(|split| split_subcurve(channels, power, split, qbar_sweep))
        .collect();
    let general_curves = general_curves.into_iter().collect::<Result<Vec<_>>>()?;

    // The union's reach: the farthest general sub-region, or the largest
    // uniform seed's beamforming corner (the continuum between seeds
    // cannot go further than the largest seed).
    let uniform_reach = uniform_seeds
        .iter()
        .fold(0.0f64, |acc, &r| acc.max(r * channels.h1() * power));
    let q_top = general_curves
        .iter()
        .map(|s| s.max_energy)
        .fold(uniform_reach, f64::max);
    let grid = qbar_sweep.values(0.0, q_top);
    let mut parts = finite_union_points(general_curves, &grid);

    if !uniform_seeds.is_empty() {
        let envelope = uniform_family_envelope(&gains, power, &uniform_seeds, qbar_sweep, &grid);
        let mut merged = Vec::new();
        for (i, &energy) in grid.iter().enumerate() {
            let general_rate = parts
                .points
                .iter()
                .find(|p| p.energy == energy)
                .map(|p| p.rate);
            let rate = match (general_rate, envelope.values[i]) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
            if let Some(rate) = rate {
                merged.push(TracedPoint::ok(rate, energy));
            }
        }
        parts.points = merged;
        parts.failures.extend(envelope.failures);
        parts.non_converged += envelope.non_converged;
    }

    assemble_boundary(Scheme::Ps, parts, qbar_sweep, None, zeta, Vec::new())
}

/// Antenna switching: binary splits from one explicit partition.
pub fn antenna_switching(
    channels: &ChannelPair,
    power: f64,
    zeta: f64,
    partition: &AntennaPartition,
    qbar_sweep: &SweepSpec,
) -> Result<REBoundary> {
    require_colocated(channels)?;
    check_zeta(zeta)?;
    let n = channels.h().nrows();
    let split = partition.to_split(n)?;
    let mut notes = Vec::new();
    if partition.eh_antennas().len() == n {
        notes.push(
            "all antennas switched to harvesting: region degenerates to the energy axis".into(),
        );
    }
    let subcurve = split_subcurve(channels, power, &split, qbar_sweep)?;
    let grid = qbar_sweep.values(0.0, subcurve.max_energy.max(0.0));
    let parts = finite_union_points(vec![subcurve], &grid);
    assemble_boundary(Scheme::As, parts, qbar_sweep, None, zeta, notes)
}

/// Antenna switching over every partition at once: the union of the
/// per-partition regions (what the scheme can achieve with the best
/// partition per operating point).
pub fn antenna_switching_union(
    channels: &ChannelPair,
    power: f64,
    zeta: f64,
    qbar_sweep: &SweepSpec,
) -> Result<REBoundary> {
    require_colocated(channels)?;
    check_zeta(zeta)?;
    let n = channels.h().nrows();
    let partitions = AntennaPartition::enumerate_all(n)?;
    let subcurves: Vec<Result<TracedSubCurve>> = partitions
        .par_iter()
        .map(|p| split_subcurve(channels, power, &p.to_split(n)?, qbar_sweep))
        .collect();
    let subcurves = subcurves.into_iter().collect::<Result<Vec<_>>>()?;
    let q_top = subcurves
        .iter()
        .map(|s| s.max_energy)
        .fold(0.0f64, f64::max);
    let grid = qbar_sweep.values(0.0, q_top);
    let parts = finite_union_points(subcurves, &grid);
    assemble_boundary(Scheme::As, parts, qbar_sweep, None, zeta, Vec::new())
}

/// Default candidate generation: a coarse per-antenna grid (full cross
/// product only up to 2 antennas), every uniform split on a finer grid,
/// and every antenna partition.
pub fn default_split_candidates(n: usize) -> Result<Vec<SplitVector>> {
    const PER_ANTENNA: usize = 11;
    const UNIFORM: usize = 51;
    let mut out = Vec::new();
    if n <= 2 {
        let axis: Vec<f64> = (0..PER_ANTENNA)
            .map(|i| i as f64 / (PER_ANTENNA - 1) as f64)
            .collect();
        let mut stack = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for prefix in &stack {
                for &v in &axis {
                    let mut p = prefix.clone();
                    p.push(v);
                    next.push(p);
                }
            }
            stack = next;
        }
        for rho in stack {
            out.push(SplitVector::new(rho)?);
        }
    }
    for i in 0..UNIFORM {
        out.push(SplitVector::uniform(i as f64 / (UNIFORM - 1) as f64, n)?);
    }
    if n <= 8 {
        for partition in AntennaPartition::enumerate_all(n)? {
            out.push(partition.to_split(n)?);
        }
    }
    Ok(out)
}

fn require_colocated(channels: &ChannelPair) -> Result<()> {
    if !channels.is_colocated() {
        return Err(Error::InvalidParameter(
            "power-splitting tracers require co-located channels".into(),
        ));
    }
    Ok(())
}
