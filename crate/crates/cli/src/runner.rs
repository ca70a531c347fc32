//! Batch scenario execution: trace every requested scheme, emit one CSV
//! per scheme plus a JSON manifest.
//!
//! Output is deterministic byte for byte: traces are gathered fully (in
//! deterministic grid order) before anything is written, and floats are
//! printed with the shortest round-trip formatting.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use swipt_core::boundary::REBoundary;
use swipt_core::metrics::{harvested_power, mutual_information};
use swipt_core::regions::{
    antenna_switching_union, colocated_outer_bound, default_split_candidates,
    power_splitting_envelope, separated_boundary, simo_power_splitting_closed,
    siso_power_splitting, time_switching_fixed, time_switching_flexible,
    uniform_power_splitting,
};
use swipt_core::solvers::energy::energy_beamforming;
use swipt_core::solvers::waterfill::maximize_rate;
use swipt_core::solvers::DEFAULT_TOL;
use swipt_core::{covariance, Error as CoreError, Scheme};

use crate::config::{PhysicalUnits, ResolvedScenario, ScenarioConfig};

/// Why a run failed, mapped to distinct process exit codes by the binary.
#[derive(Debug)]
pub enum RunError {
    /// Bad configuration or unusable output location (exit 2).
    Config(String),
    /// A requested constraint cannot be met by any covariance (exit 4).
    Infeasible(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "{m}"),
            RunError::Infeasible(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for RunError {}

/// What a completed run produced.
#[derive(Debug)]
pub struct RunSummary {
    /// Every sweep point of every scheme converged.
    pub all_converged: bool,
    pub manifest_path: PathBuf,
    pub csv_paths: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a ScenarioConfig,
    tolerances: Tolerances,
    corners: Corners,
    schemes: Vec<SchemeReport>,
}

#[derive(Serialize)]
struct Tolerances {
    solver_tol: f64,
    trace_tol: f64,
    psd_tol: f64,
}

#[derive(Serialize)]
struct Corners {
    /// Unconstrained maximum rate, bits per channel use.
    r_max: f64,
    /// Harvest of the rate-optimal covariance (efficiency applied).
    q_id: f64,
    /// Rate of the energy-beamforming covariance.
    r_eh: f64,
    /// Maximum harvested power (efficiency applied).
    q_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    physical: Option<PhysicalCorners>,
}

#[derive(Serialize)]
struct PhysicalCorners {
    r_max_mbps: f64,
    q_max_mw: f64,
}

#[derive(Serialize)]
struct SchemeReport {
    scheme: String,
    file: String,
    points: usize,
    converged_points: usize,
    all_converged: bool,
    failures: Vec<String>,
    notes: Vec<String>,
}

fn map_core(e: CoreError) -> RunError {
    match e {
        CoreError::InfeasibleHarvest { .. } => RunError::Infeasible(e.to_string()),
        other => RunError::Config(other.to_string()),
    }
}

fn trace_scheme(
    scheme: Scheme,
    config: &ScenarioConfig,
    resolved: &ResolvedScenario,
) -> Result<REBoundary, RunError> {
    let channels = &resolved.channels;
    let power = config.power;
    let zeta = config.zeta;
    let sweep = &resolved.sweep;
    match scheme {
        Scheme::Separated => {
            separated_boundary(channels, power, zeta, sweep).map_err(map_core)
        }
        Scheme::OuterBound => {
            colocated_outer_bound(channels, power, zeta, sweep).map_err(map_core)
        }
        Scheme::Ts1 => time_switching_fixed(channels, power, zeta).map_err(map_core),
        Scheme::Ts2 => {
            time_switching_flexible(channels, power, zeta, sweep, None).map_err(map_core)
        }
        Scheme::Ts2Peak => {
            let peak = config.peak_power.ok_or_else(|| {
                RunError::Config("config error: scheme `ts2_peak` needs `peak_power`".into())
            })?;
            time_switching_flexible(channels, power, zeta, sweep, Some(peak)).map_err(map_core)
        }
        Scheme::Ups => {
            uniform_power_splitting(channels, power, zeta, &resolved.rho_sweep, sweep)
                .map_err(map_core)
        }
        Scheme::Ps => {
            let candidates = default_split_candidates(channels.h().nrows()).map_err(map_core)?;
            power_splitting_envelope(channels, power, zeta, &candidates, sweep).map_err(map_core)
        }
        Scheme::As => antenna_switching_union(channels, power, zeta, sweep).map_err(map_core),
        Scheme::SimoClosed => {
            if channels.tx_count() != 1 {
                return Err(RunError::Config(
                    "config error: scheme `simo_closed` needs a single transmit antenna".into(),
                ));
            }
            let h = channels.h().column(0).into_owned();
            simo_power_splitting_closed(&h, power, zeta, sweep).map_err(map_core)
        }
        Scheme::SisoCase => {
            if channels.tx_count() != 1 || channels.h().nrows() != 1 {
                return Err(RunError::Config(
                    "config error: scheme `siso_case` needs a 1x1 channel".into(),
                ));
            }
            let noise = resolved.noise_split.ok_or_else(|| {
                RunError::Config("config error: scheme `siso_case` needs `noise_split`".into())
            })?;
            let gain = channels.h1();
            siso_power_splitting(gain, power, noise, sweep)
                .map(|b| b.with_energy_scaled(zeta))
                .map_err(map_core)
        }
    }
}

fn csv_for(boundary: &REBoundary, physical: Option<&PhysicalUnits>, solver_power: f64) -> String {
    let mut out = String::new();
    if physical.is_some() {
        out.push_str("energy,rate,converged,energy_mw,rate_mbps\n");
    } else {
        out.push_str("energy,rate,converged\n");
    }
    for p in boundary.points() {
        match physical {
            Some(u) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    p.energy,
                    p.rate,
                    p.converged,
                    u.energy_to_mw(p.energy, solver_power),
                    u.rate_to_mbps(p.rate)
                );
            }
            None => {
                let _ = writeln!(out, "{},{},{}", p.energy, p.rate, p.converged);
            }
        }
    }
    out
}

/// Run one scenario, writing `<scheme>.csv` per scheme and
/// `manifest.json` into `out_dir`.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> Result<RunSummary, RunError> {
    let resolved = config.resolve().map_err(RunError::Config)?;
    let channels = &resolved.channels;
    let power = config.power;
    let zeta = config.zeta;

    let wf = maximize_rate(channels, power).map_err(map_core)?;
    let q_id = zeta * harvested_power(channels.g(), &wf.covariance, 1.0).map_err(map_core)?;
    let eh = energy_beamforming(channels, power).map_err(map_core)?;
    let r_eh = mutual_information(channels.h(), &eh.covariance).map_err(map_core)?;
    let q_max = zeta * eh.q_max;

    let mut boundaries = Vec::new();
    for &scheme in &resolved.schemes {
        boundaries.push((scheme, trace_scheme(scheme, config, &resolved)?));
    }

    fs::create_dir_all(out_dir)
        .map_err(|e| RunError::Config(format!("cannot create output dir: {e}")))?;
    let mut csv_paths = Vec::new();
    let mut reports = Vec::new();
    let mut all_converged = true;
    for (scheme, boundary) in &boundaries {
        let file = format!("{scheme}.csv");
        let path = out_dir.join(&file);
        let body = csv_for(boundary, config.physical_units.as_ref(), power);
        fs::write(&path, body)
            .map_err(|e| RunError::Config(format!("cannot write {}: {e}", path.display())))?;
        let converged_points = boundary.converged_points().count();
        let ok = boundary.all_converged();
        all_converged &= ok;
        reports.push(SchemeReport {
            scheme: scheme.to_string(),
            file,
            points: boundary.points().len(),
            converged_points,
            all_converged: ok,
            failures: boundary
                .metadata()
                .failures
                .iter()
                .map(|f| format!("index {} (target {}): {}", f.index, f.energy, f.message))
                .collect(),
            notes: boundary.metadata().notes.clone(),
        });
        csv_paths.push(path);
    }

    let manifest = Manifest {
        config,
        tolerances: Tolerances {
            solver_tol: DEFAULT_TOL,
            trace_tol: covariance::TRACE_TOL,
            psd_tol: covariance::PSD_TOL,
        },
        corners: Corners {
            r_max: wf.allocation.rate,
            q_id,
            r_eh,
            q_max,
            physical: config.physical_units.map(|u| PhysicalCorners {
                r_max_mbps: u.rate_to_mbps(wf.allocation.rate),
                q_max_mw: u.energy_to_mw(q_max, power),
            }),
        },
        schemes: reports,
    };
    let manifest_path = out_dir.join("manifest.json");
    let body = serde_json::to_string_pretty(&manifest)
        .map_err(|e| RunError::Config(format!("manifest serialization failed: {e}")))?;
    fs::write(&manifest_path, body + "\n")
        .map_err(|e| RunError::Config(format!("cannot write manifest: {e}")))?;

    Ok(RunSummary {
        all_converged,
        manifest_path,
        csv_paths,
    })
}
