use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vortex_core::lattice::{ChargePair, GridShape, Hopping, Model, VortexSpec};
use vortex_core::spectrum::TrackingConfig;
use vortex_core::stationary::NewtonConfig;

use crate::error::CliError;

/// Environment variable that relocates relative output directories.
pub const OUT_ROOT_VAR: &str = "VORTEX_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl EpsGrid {
    pub fn points(&self) -> Vec<f64> {
        vortex_core::stationary::eps_grid(self.start, self.stop, self.step)
    }
}

impl Default for EpsGrid {
    fn default() -> Self {
        Self { start: 0.0, stop: 0.1, step: 0.01 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Emit {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Default for Emit {
    fn default() -> Self {
        Self { csv: true, json: true, svg: false }
    }
}

impl std::str::FromStr for Emit {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        let mut e = Emit { csv: false, json: false, svg: false };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "csv" => e.csv = true,
                "json" => e.json = true,
                "svg" => e.svg = true,
                other => return Err(CliError::Config(format!("unknown emit kind {other:?}"))),
            }
        }
        Ok(e)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: Model,
    pub charges: ChargePair,
    pub beta: f64,
    pub omega: f64,
    pub delta: Option<f64>,
    pub hopping: Hopping,
    pub grid_n: usize,
    pub eps_grid: EpsGrid,
    pub outputs: PathBuf,
    pub emit: Emit,
    pub seed_order: usize,
    pub newton: NewtonConfig,
    pub tracking: TrackingConfig,
    /// Threshold on `max Re λ` for instability.
    pub hh_tol: f64,
    pub hh_resolution: f64,
    /// Figure this run feeds, if any.
    pub figure: Option<u8>,
    /// Charge pairs swept as separate panels; empty means `charges` only.
    pub panels: Vec<ChargePair>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: Model::Scalar,
            charges: ChargePair::Equal,
            beta: 0.0,
            omega: 1.0,
            delta: None,
            hopping: Hopping::NeighborSum,
            grid_n: vortex_core::lattice::DEFAULT_HALF_WIDTH,
            eps_grid: EpsGrid::default(),
            outputs: PathBuf::from("runs/default"),
            emit: Emit::default(),
            seed_order: 0,
            newton: NewtonConfig::default(),
            tracking: TrackingConfig::default(),
            hh_tol: 1e-6,
            hh_resolution: 1e-4,
            figure: None,
            panels: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn spec(&self) -> Result<VortexSpec, CliError> {
        let grid = GridShape::new(self.grid_n)?;
        let spec = VortexSpec {
            model: self.model,
            charges: self.charges,
            beta: self.beta,
            omega: self.omega,
            delta: self.delta,
            epsilon: self.eps_grid.start,
            grid,
            hopping: self.hopping,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.eps_grid;
        if !(g.step > 0.0) || !g.step.is_finite() {
            return Err(CliError::Config(format!("eps_grid.step must be positive, got {}", g.step)));
        }
        if !(g.start >= 0.0) || !(g.stop >= g.start) {
            return Err(CliError::Config(format!(
                "eps_grid must satisfy 0 <= start <= stop, got {} .. {}",
                g.start, g.stop
            )));
        }
        self.spec()?;
        Ok(())
    }

    /// Output directory, placed under `$VORTEX_OUT` when relative and the variable is set.
    pub fn out_dir(&self) -> PathBuf {
        match std::env::var_os(OUT_ROOT_VAR) {
            Some(root) if self.outputs.is_relative() => PathBuf::from(root).join(&self.outputs),
            _ => self.outputs.clone(),
        }
    }

    pub fn newton_config(&self) -> NewtonConfig {
        NewtonConfig { seed_order: self.seed_order, ..self.newton.clone() }
    }
}

/// Command-line values that override the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub model: Option<Model>,
    pub charges: Option<ChargePair>,
    pub beta: Option<f64>,
    pub omega: Option<f64>,
    pub delta: Option<f64>,
    pub hopping: Option<Hopping>,
    pub eps_start: Option<f64>,
    pub eps_stop: Option<f64>,
    pub eps_step: Option<f64>,
    pub grid_n: Option<usize>,
    pub out: Option<PathBuf>,
    pub emit: Option<Emit>,
}

impl Overrides {
    pub fn apply(&self, mut cfg: RunConfig) -> Result<RunConfig, CliError> {
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field.clone() { $target = v; })*
            };
        }
        set!(
            model => cfg.model,
            charges => cfg.charges,
            beta => cfg.beta,
            omega => cfg.omega,
            hopping => cfg.hopping,
            eps_start => cfg.eps_grid.start,
            eps_stop => cfg.eps_grid.stop,
            eps_step => cfg.eps_grid.step,
            grid_n => cfg.grid_n,
            out => cfg.outputs,
            emit => cfg.emit,
        );
        if let Some(d) = self.delta {
            cfg.delta = Some(d);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
