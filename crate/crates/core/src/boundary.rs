//! Rate-energy points and traced boundary curves.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One achievable (rate, energy) pair. Rate is in bits per channel use
/// (base-2 logs); energy is harvested power in the same normalized units
/// as the transmit budget, conversion efficiency included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct REPoint {
    pub rate: f64,
    pub energy: f64,
}

impl REPoint {
    pub fn new(rate: f64, energy: f64) -> Result<Self> {
        if !rate.is_finite() || !energy.is_finite() || rate < 0.0 || energy < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "rate-energy point must be finite and nonnegative: ({rate}, {energy})"
            )));
        }
        Ok(Self { rate, energy })
    }
}

/// Receiver architecture / tracing scheme that produced a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Co-located outer bound (harvest and decode the same signal).
    OuterBound,
    /// Separated receivers, optimal covariance per harvest target.
    Separated,
    /// Time switching with a fixed per-slot power budget (a straight line).
    Ts1,
    /// Time switching with a flexible average power budget.
    Ts2,
    /// Flexible time switching under an additional peak power budget.
    Ts2Peak,
    /// Uniform power splitting (one split ratio shared by all antennas).
    Ups,
    /// General per-antenna power splitting envelope.
    Ps,
    /// Antenna switching (binary split ratios).
    As,
    /// Closed-form single-transmit-antenna power-splitting curve.
    SimoClosed,
    /// Single-antenna power splitting under an antenna/processing
    /// noise split.
    SisoCase,
}

impl Scheme {
    pub const ALL: [Scheme; 10] = [
        Scheme::OuterBound,
        Scheme::Separated,
        Scheme::Ts1,
        Scheme::Ts2,
        Scheme::Ts2Peak,
        Scheme::Ups,
        Scheme::Ps,
        Scheme::As,
        Scheme::SimoClosed,
        Scheme::SisoCase,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::OuterBound => "outer_bound",
            Scheme::Separated => "separated",
            Scheme::Ts1 => "ts1",
            Scheme::Ts2 => "ts2",
            Scheme::Ts2Peak => "ts2_peak",
            Scheme::Ups => "ups",
            Scheme::Ps => "ps",
            Scheme::As => "as",
            Scheme::SimoClosed => "simo_closed",
            Scheme::SisoCase => "siso_case",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .iter()
            .copied()
            .find(|scheme| scheme.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme `{s}`")))
    }
}

/// One swept boundary sample. Non-converged samples keep their energy slot
/// (so curves stay index-aligned across schemes) and carry the solver's
/// best-effort rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracedPoint {
    pub energy: f64,
    pub rate: f64,
    pub converged: bool,
}

impl TracedPoint {
    pub fn ok(rate: f64, energy: f64) -> Self {
        Self {
            energy,
            rate,
            converged: true,
        }
    }
}

/// A sweep sample that failed outright (infeasible or solver error).
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub index: usize,
    pub energy: f64,
    pub message: String,
}

/// How a boundary was traced: grid sizes, solver tolerance, failures.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceMetadata {
    pub n_points: usize,
    pub rho_points: Option<usize>,
    pub solver_tol: Option<f64>,
    pub failures: Vec<PointFailure>,
    /// Degenerate-configuration flags (for example an antenna partition
    /// that leaves the information decoder with no antennas).
    pub notes: Vec<String>,
}

/// A traced rate-energy boundary: energies strictly increasing, rates
/// non-increasing (checked over the converged samples).
#[derive(Debug, Clone, PartialEq)]
pub struct REBoundary {
    scheme: Scheme,
    points: Vec<TracedPoint>,
    metadata: TraceMetadata,
}

/// Rates may wiggle upward by at most this much before assembly fails;
/// anything larger indicates a solver bug rather than round-off.
const RATE_MONOTONE_SLACK: f64 = 1e-6;

impl REBoundary {
    /// Sort samples by energy, merge duplicates (keeping the best rate),
    /// and validate monotonicity.
    pub fn assemble(
        scheme: Scheme,
        mut points: Vec<TracedPoint>,
        metadata: TraceMetadata,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter(
                "boundary needs at least one point".into(),
            ));
        }
        if points
            .iter()
            .any(|p| !p.energy.is_finite() || !p.rate.is_finite())
        {
            return Err(Error::NonFinite);
        }
        points.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
        let mut merged: Vec<TracedPoint> = Vec::with_capacity(points.len());
        for p in points {
            match merged.last_mut() {
                Some(last) if (p.energy - last.energy).abs() <= energy_merge_tol(p.energy) => {
                    if p.rate > last.rate {
                        last.rate = p.rate;
                    }
                    last.converged |= p.converged;
                }
                _ => merged.push(p),
            }
        }
        let mut prev_rate = f64::INFINITY;
        for p in merged.iter().filter(|p| p.converged) {
            if p.rate > prev_rate + RATE_MONOTONE_SLACK {
                return Err(Error::InvalidParameter(format!(
                    "boundary rates increase with energy: {} -> {} at energy {}",
                    prev_rate, p.rate, p.energy
                )));
            }
            prev_rate = prev_rate.min(p.rate);
        }
        Ok(Self {
            scheme,
            points: merged,
            metadata,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn points(&self) -> &[TracedPoint] {
        &self.points
    }

    pub fn metadata(&self) -> &TraceMetadata {
        &self.metadata
    }

    pub fn converged_points(&self) -> impl Iterator<Item = &TracedPoint> {
        self.points.iter().filter(|p| p.converged)
    }

    pub fn all_converged(&self) -> bool {
        self.metadata.failures.is_empty() && self.points.iter().all(|p| p.converged)
    }

    pub fn min_energy(&self) -> f64 {
        self.converged_points()
            .map(|p| p.energy)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_energy(&self) -> f64 {
        self.converged_points()
            .map(|p| p.energy)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Linearly interpolated boundary rate at `energy`, or `None` outside
    /// the converged energy span (a relative slack of 1e-9 is allowed at
    /// the ends before giving up).
    pub fn rate_at(&self, energy: f64) -> Option<f64> {
        let pts: Vec<&TracedPoint> = self.converged_points().collect();
        if pts.is_empty() {
            return None;
        }
        let lo = pts.first().unwrap();
        let hi = pts.last().unwrap();
        let slack = 1e-9 * hi.energy.abs().max(1.0);
        if energy < lo.energy - slack || energy > hi.energy + slack {
            return None;
        }
        if energy <= lo.energy {
            return Some(lo.rate);
        }
        if energy >= hi.energy {
            return Some(hi.rate);
        }
        let idx = pts.partition_point(|p| p.energy < energy);
        let (a, b) = (pts[idx - 1], pts[idx]);
        if (b.energy - a.energy).abs() < 1e-300 {
            return Some(a.rate.max(b.rate));
        }
        let t = (energy - a.energy) / (b.energy - a.energy);
        Some(a.rate + t * (b.rate - a.rate))
    }

    /// Worst chord-test violation over converged interior points: positive
    /// when some point falls below the chord of its neighbors, i.e. the
    /// curve fails to be concave by that much (in rate).
    pub fn max_concavity_violation(&self) -> f64 {
        let pts: Vec<&TracedPoint> = self.converged_points().collect();
        let mut worst: f64 = 0.0;
        for w in pts.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let span = c.energy - a.energy;
            if span <= 0.0 {
                continue;
            }
            let t = (b.energy - a.energy) / span;
            let chord = a.rate + t * (c.rate - a.rate);
            worst = worst.max(chord - b.rate);
        }
        worst
    }

    /// Same boundary with all energies multiplied by `factor` (used when a
    /// tracer works in unit conversion efficiency and the caller applies
    /// the real efficiency afterwards).
    pub fn with_energy_scaled(mut self, factor: f64) -> Self {
        for p in &mut self.points {
            p.energy *= factor;
        }
        for f in &mut self.metadata.failures {
            f.energy *= factor;
        }
        self
    }
}

fn energy_merge_tol(energy: f64) -> f64 {
    1e-12 * energy.abs().max(1.0)
}
