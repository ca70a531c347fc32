//! Scenario configuration: flat JSON with matrix literals as nested
//! arrays of `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use swipt_core::regions::{CornerHandling, SweepSpec};
use swipt_core::{C64, CMatrix, ChannelPair, NoiseSplit, Scheme};

use crate::rayleigh::generate_rayleigh_channel;

/// A complex matrix literal: rows of `[re, im]` pairs.
pub type MatrixLiteral = Vec<Vec<[f64; 2]>>;

pub fn matrix_from_literal(lit: &MatrixLiteral) -> Result<CMatrix, String> {
    let rows = lit.len();
    let cols = lit.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 {
        return Err("matrix literal must be non-empty".into());
    }
    if lit.iter().any(|r| r.len() != cols) {
        return Err("matrix literal rows have inconsistent lengths".into());
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        C64::new(lit[i][j][0], lit[i][j][1])
    }))
}

pub fn matrix_to_literal(m: &CMatrix) -> MatrixLiteral {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Where the channel matrices come from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSource {
    /// Explicit matrix literals. `g` may be omitted only when `colocated`.
    Explicit {
        h: MatrixLiteral,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<MatrixLiteral>,
        #[serde(default)]
        colocated: bool,
    },
    /// Seeded Rayleigh fading draw: every entry circularly symmetric
    /// complex Gaussian with the given per-element variance.
    Rayleigh {
        m: usize,
        n_id: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_eh: Option<usize>,
        variance: f64,
        seed: u64,
        #[serde(default)]
        colocated: bool,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSplitConfig {
    pub sigma_a_sq: f64,
    pub sigma_p_sq: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_points: usize,
    #[serde(default = "default_corner_handling")]
    pub corner_handling: CornerHandlingConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_points: 101,
            corner_handling: CornerHandlingConfig::IncludeCorners,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CornerHandlingConfig {
    IncludeCorners,
    InteriorOnly,
}

fn default_corner_handling() -> CornerHandlingConfig {
    CornerHandlingConfig::IncludeCorners
}

/// Presentation-layer scaling to physical units; never feeds back into the
/// solvers.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalUnits {
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub pathloss_db_eh: f64,
    pub pathloss_db_id: f64,
}

impl PhysicalUnits {
    /// Physical transmit power in watts.
    pub fn tx_power_w(&self) -> f64 {
        10f64.powf((self.tx_power_dbm - 30.0) / 10.0)
    }

    /// Solver-unit harvested power to milliwatts: undo the solver
    /// normalization, apply the harvesting-link pathloss.
    pub fn energy_to_mw(&self, energy: f64, solver_power: f64) -> f64 {
        energy / solver_power * self.tx_power_w() * 10f64.powf(-self.pathloss_db_eh / 10.0)
            * 1000.0
    }

    /// Bits per channel use to megabits per second.
    pub fn rate_to_mbps(&self, rate: f64) -> f64 {
        rate * self.bandwidth_hz / 1e6
    }
}

/// One scenario: a channel source, budgets, requested schemes, sweep
/// resolutions, and optional physical-unit presentation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub channel: ChannelSource,
    pub power: f64,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_split: Option<NoiseSplitConfig>,
    pub schemes: Vec<String>,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default = "default_rho_points")]
    pub rho_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical_units: Option<PhysicalUnits>,
}

fn default_zeta() -> f64 {
    1.0
}

fn default_rho_points() -> usize {
    51
}

/// A config with every reference resolved: matrices built, schemes parsed.
#[derive(Debug)]
pub struct ResolvedScenario {
    pub channels: ChannelPair,
    pub schemes: Vec<Scheme>,
    pub sweep: SweepSpec,
    pub rho_sweep: SweepSpec,
    pub noise_split: Option<NoiseSplit>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }

    pub fn resolve(&self) -> Result<ResolvedScenario, String> {
        if self.schemes.is_empty() {
            return Err("config error: `schemes` must be non-empty".into());
        }
        let schemes = self
            .schemes
            .iter()
            .map(|s| s.parse::<Scheme>().map_err(|e| format!("config error: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        let channels = self.build_channels()?;
        let sweep = SweepSpec::new(
            self.sweep.n_points,
            match self.sweep.corner_handling {
                CornerHandlingConfig::IncludeCorners => CornerHandling::IncludeCorners,
                CornerHandlingConfig::InteriorOnly => CornerHandling::InteriorOnly,
            },
        )
        .map_err(|e| format!("config error: {e}"))?;
        let rho_sweep = SweepSpec::new(self.rho_points, CornerHandling::IncludeCorners)
            .map_err(|e| format!("config error: {e}"))?;
        let noise_split = match &self.noise_split {
            Some(ns) => Some(
                NoiseSplit::new(ns.sigma_a_sq, ns.sigma_p_sq)
                    .map_err(|e| format!("config error: {e}"))?,
            ),
            None => None,
        };
        if !(self.power > 0.0) {
            return Err(format!("config error: power must be positive, got {}", self.power));
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(format!("config error: zeta must lie in (0, 1], got {}", self.zeta));
        }
        if let Some(peak) = self.peak_power {
            if peak < self.power {
                return Err(format!(
                    "config error: peak_power {peak} below average power {}",
                    self.power
                ));
            }
        }
        Ok(ResolvedScenario {
            channels,
            schemes,
            sweep,
            rho_sweep,
            noise_split,
        })
    }

    fn build_channels(&self) -> Result<ChannelPair, String> {
        match &self.channel {
            ChannelSource::Explicit { h, g, colocated } => {
                let h = matrix_from_literal(h).map_err(|e| format!("config error in `h`: {e}"))?;
                if *colocated {
                    if let Some(g) = g {
                        let g = matrix_from_literal(g)
                            .map_err(|e| format!("config error in `g`: {e}"))?;
                        if g != h {
                            return Err(
                                "config error: colocated channel requires g = h (or omit g)"
                                    .into(),
                            );
                        }
                    }
                    ChannelPair::colocated(h).map_err(|e| format!("config error: {e}"))
                } else {
                    let g = g.as_ref().ok_or("config error: separated channel needs `g`")?;
                    let g =
                        matrix_from_literal(g).map_err(|e| format!("config error in `g`: {e}"))?;
                    ChannelPair::separated(h, g).map_err(|e| format!("config error: {e}"))
                }
            }
            ChannelSource::Rayleigh {
                m,
                n_id,
                n_eh,
                variance,
                seed,
                colocated,
            } => {
                if !(*variance > 0.0) {
                    return Err(format!(
                        "config error: variance must be positive, got {variance}"
                    ));
                }
                let h = generate_rayleigh_channel(*m, *n_id, *variance, *seed);
                if *colocated {
                    if n_eh.is_some_and(|n| n != *n_id) {
                        return Err("config error: colocated channel requires n_eh = n_id".into());
                    }
                    ChannelPair::colocated(h).map_err(|e| format!("config error: {e}"))
                } else {
                    let n_eh = n_eh.unwrap_or(*n_id);
                    // Independent draw: offset stream so H and G never share
                    // samples even for equal shapes.
                    let g = generate_rayleigh_channel(*m, n_eh, *variance, seed.wrapping_add(1));
                    ChannelPair::separated(h, g).map_err(|e| format!("config error: {e}"))
                }
            }
        }
    }
}
