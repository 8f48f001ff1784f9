//! Scenario and scan configuration files.
//!
//! Both are strict JSON documents: unknown keys are rejected so that a
//! misspelt physics parameter cannot silently fall back to a default.

use std::collections::BTreeMap;
use std::path::Path;

use errbar_core::states::gaussian_state;
use errbar_core::{
    CalibrationConfig, ConfidencePair, GridMeasure, GridSpec, MixedState, PiecewiseLinear, ProbeKind, StateSpec,
    WarpMap,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Prefix of every row id; defaults to the file stem.
    #[serde(default)]
    pub id: Option<String>,
    /// Falls back to `--hbar`.
    #[serde(default)]
    pub hbar: Option<f64>,
    pub grid: GridConfig,
    pub confidence: Vec<(f64, f64)>,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub smearings: Vec<MeasureSpec>,
    #[serde(default)]
    pub warps: Vec<WarpSpec>,
    pub calibration: CalibrationSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Falls back to `--grid-n`.
    #[serde(default)]
    pub n: Option<usize>,
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpec {
    pub sigma: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub p0: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub gaussian: GaussianSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Gaussian(GaussianSpec),
    Mixture(Vec<MixtureComponent>),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Delta { c: f64 },
    Gaussian { sigma: f64 },
    Uniform { a: f64, b: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity,
    Shift(f64),
    Knots(Vec<(f64, f64)>),
    Sinusoidal { amplitude: f64, period: f64, start: f64, periods: usize, pieces_per_period: usize },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpSpec {
    #[serde(default)]
    pub gamma_q: Option<MapSpec>,
    #[serde(default)]
    pub gamma_p: Option<MapSpec>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKindSpec {
    #[default]
    Box,
    TruncatedGaussian,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSpec {
    /// Position-axis ladder.
    #[serde(default)]
    pub delta_ladder: Vec<f64>,
    /// Ladder in grid cells for both axes; replaces the absolute ladders.
    #[serde(default)]
    pub delta_ladder_cells: Option<Vec<f64>>,
    /// Momentum-axis ladder; defaults to `delta_ladder` scaled by `dp / dx`.
    #[serde(default)]
    pub delta_ladder_p: Option<Vec<f64>>,
    #[serde(default)]
    pub probe_centers: Vec<f64>,
    /// Defaults to `probe_centers` scaled by `dp / dx`.
    #[serde(default)]
    pub probe_centers_p: Option<Vec<f64>>,
    #[serde(default)]
    pub probe_kind: ProbeKindSpec,
}

/// A validated scenario with every object built.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub hbar: f64,
    pub grid: GridSpec,
    pub confidence: Vec<ConfidencePair>,
    pub generators: Vec<MixedState>,
    pub smearings: Vec<GridMeasure>,
    pub warps: Vec<WarpMap>,
    pub calibration: CalibrationConfig,
}

/// Command-line fallbacks for optional config fields.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub hbar: f64,
    pub grid_n: usize,
}

fn field(name: impl Into<String>, reason: impl ToString) -> CliError {
    CliError::Config { field: name.into(), reason: reason.to_string() }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.to_path_buf(), source: e })
}

pub fn check_hbar(hbar: f64) -> Result<f64, CliError> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(hbar)
    } else {
        Err(field("hbar", format!("{hbar} is not a positive number")))
    }
}

pub fn check_n(n: usize, name: &str) -> Result<usize, CliError> {
    if n.is_power_of_two() && n >= 16 {
        Ok(n)
    } else {
        Err(field(name, format!("{n} is not a power of two >= 16")))
    }
}

pub fn check_eps(name: &str, e1: f64, e2: f64) -> Result<ConfidencePair, CliError> {
    ConfidencePair::new(e1, e2).map_err(|e| field(name, e))
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    pub fn build(&self, fallback_id: &str, defaults: Defaults) -> Result<Scenario, CliError> {
        let id = self.id.clone().unwrap_or_else(|| fallback_id.to_string());
        if id.is_empty() || id.contains(|c: char| c == ',' || c == '"' || c.is_control()) {
            return Err(field("id", "must be non-empty without commas, quotes or control characters"));
        }
        let hbar = check_hbar(self.hbar.unwrap_or(defaults.hbar))?;
        let n = check_n(self.grid.n.unwrap_or(defaults.grid_n), "grid.n")?;
        if self.grid.x_max.partial_cmp(&self.grid.x_min) != Some(std::cmp::Ordering::Greater) {
            return Err(field("grid.x_max", "must exceed grid.x_min"));
        }
        let grid = GridSpec::from_range(n, self.grid.x_min, self.grid.x_max).map_err(|e| field("grid", e))?;
        let dx = grid.dx();
        let dp = 2.0 * std::f64::consts::PI * hbar / (n as f64 * dx);

        if self.confidence.is_empty() {
            return Err(field("confidence", "needs at least one (eps1, eps2) pair"));
        }
        let confidence = self
            .confidence
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| check_eps(&format!("confidence[{i}]"), a, b))
            .collect::<Result<Vec<_>, _>>()?;

        let generators = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| build_generator(g, grid, hbar).map_err(|e| field(format!("generators[{i}]"), e)))
            .collect::<Result<Vec<_>, _>>()?;
        let smearings = self
            .smearings
            .iter()
            .enumerate()
            .map(|(i, m)| build_measure(m, dx).map_err(|e| field(format!("smearings[{i}]"), e)))
            .collect::<Result<Vec<_>, _>>()?;
        let warps = self
            .warps
            .iter()
            .enumerate()
            .map(|(i, w)| build_warp(w).map_err(|e| field(format!("warps[{i}]"), e)))
            .collect::<Result<Vec<_>, _>>()?;

        let cal = &self.calibration;
        let ladder = match &cal.delta_ladder_cells {
            Some(_) if !cal.delta_ladder.is_empty() || cal.delta_ladder_p.is_some() => {
                return Err(field("calibration.delta_ladder_cells", "give either cells or absolute ladders"))
            }
            Some(cells) => cells.iter().map(|c| c * dx).collect(),
            None => cal.delta_ladder.clone(),
        };
        let ladder_p = cal.delta_ladder_p.clone().unwrap_or_else(|| ladder.iter().map(|d| d * dp / dx).collect());
        let centers_p =
            cal.probe_centers_p.clone().unwrap_or_else(|| cal.probe_centers.iter().map(|c| c * dp / dx).collect());
        for (name, ladder, step) in
            [("calibration.delta_ladder", &ladder, dx), ("calibration.delta_ladder_p", &ladder_p, dp)]
        {
            if let Some((i, d)) = ladder.iter().enumerate().find(|(_, d)| **d < 2.0 * step * (1.0 - 1e-9)) {
                return Err(field(format!("{name}[{i}]"), format!("{d} is below two grid steps ({})", 2.0 * step)));
            }
        }
        if !warps.is_empty() && (cal.probe_centers.is_empty() || centers_p.is_empty()) {
            return Err(field("calibration.probe_centers", "warped observables need probe centres"));
        }
        let kind = match cal.probe_kind {
            ProbeKindSpec::Box => ProbeKind::Box,
            ProbeKindSpec::TruncatedGaussian => ProbeKind::TruncatedGaussian,
        };
        let calibration = CalibrationConfig::new(ladder, cal.probe_centers.clone(), kind)
            .and_then(|c| c.with_momentum(ladder_p, centers_p))
            .map_err(|e| field("calibration", e))?
            .with_lattice(grid);

        Ok(Scenario { id, hbar, grid, confidence, generators, smearings, warps, calibration })
    }
}

fn build_generator(g: &GeneratorSpec, grid: GridSpec, hbar: f64) -> errbar_core::Result<MixedState> {
    match g {
        GeneratorSpec::Gaussian(s) => gaussian_state(s.x0, s.p0, s.sigma, grid, hbar).map(Into::into),
        GeneratorSpec::Mixture(parts) => {
            let total: f64 = parts.iter().map(|p| p.weight).sum();
            let comps = parts
                .iter()
                .map(|p| {
                    let s = p.gaussian;
                    gaussian_state(s.x0, s.p0, s.sigma, grid, hbar).map(|psi| (p.weight / total, psi))
                })
                .collect::<errbar_core::Result<Vec<_>>>()?;
            MixedState::new(comps)
        }
    }
}

/// Smearing measure on a centred grid of step `dx` wide enough for its support.
pub fn build_measure(m: &MeasureSpec, dx: f64) -> errbar_core::Result<GridMeasure> {
    let reach = match *m {
        MeasureSpec::Delta { c } => c.abs(),
        MeasureSpec::Gaussian { sigma } => 8.0 * sigma.abs(),
        MeasureSpec::Uniform { a, b } => a.abs().max(b.abs()),
    };
    let half = (reach / dx).ceil() as usize + 2;
    let grid = GridSpec::centered(2 * half + 1, dx)?;
    match *m {
        MeasureSpec::Delta { c } => GridMeasure::dirac(grid, c),
        MeasureSpec::Gaussian { sigma } => GridMeasure::gaussian(grid, 0.0, sigma),
        MeasureSpec::Uniform { a, b } => GridMeasure::uniform(grid, a, b),
    }
}

fn build_map(m: &Option<MapSpec>) -> errbar_core::Result<PiecewiseLinear> {
    match m {
        None | Some(MapSpec::Identity) => Ok(PiecewiseLinear::identity()),
        Some(MapSpec::Shift(c)) => Ok(PiecewiseLinear::shift(*c)),
        Some(MapSpec::Knots(k)) => PiecewiseLinear::new(k.clone()),
        Some(MapSpec::Sinusoidal { amplitude, period, start, periods, pieces_per_period }) => {
            PiecewiseLinear::sinusoidal(*amplitude, *period, *start, *periods, *pieces_per_period)
        }
    }
}

fn build_warp(w: &WarpSpec) -> errbar_core::Result<WarpMap> {
    Ok(WarpMap::new(build_map(&w.gamma_q)?, build_map(&w.gamma_p)?))
}

/// Parameter sweep over one state family.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default)]
    pub hbar: Option<f64>,
    #[serde(default)]
    pub grid_n: Option<usize>,
    /// Base state; lattice entries override its parameters.
    pub state: StateConfig,
    /// `(eps1, eps2)` unless swept through the lattice.
    #[serde(default)]
    pub eps: Option<(f64, f64)>,
    /// One or two swept parameters: state parameters, `eps`, `eps1` or `eps2`.
    pub lattice: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub max_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    Gaussian {
        sigma: f64,
        #[serde(default)]
        x0: f64,
        #[serde(default)]
        p0: f64,
    },
    Box {
        width: f64,
        #[serde(default)]
        center: f64,
    },
    Superposition {
        sigma: f64,
        separation: f64,
    },
    Mixture {
        sigma: f64,
        separation: f64,
    },
}

impl From<StateConfig> for StateSpec {
    fn from(s: StateConfig) -> StateSpec {
        match s {
            StateConfig::Gaussian { sigma, x0, p0 } => StateSpec::Gaussian { sigma, x0, p0 },
            StateConfig::Box { width, center } => StateSpec::Box { center, width },
            StateConfig::Superposition { sigma, separation } => StateSpec::Superposition { sigma, separation },
            StateConfig::Mixture { sigma, separation } => StateSpec::Mixture { sigma, separation },
        }
    }
}
