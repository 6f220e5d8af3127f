//! ε-sweeps: continuation, spectra, tracking, Hamiltonian–Hopf scan and artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vortex_core::lattice::{ChargePair, LatticeField, Node, VortexSpec};
use vortex_core::spectrum::{
    detect_hh_with, pair_reports, solve_many, HhConfig, HhScan, KreinSign, PairingWarning, SpectrumOptions,
    SpectrumReport, TrackedBranch,
};
use vortex_core::stationary::{advance, seed_state, solve_at, GaugeAnchor, StationaryState};
use vortex_core::{Complex64, VortexError};

use crate::compare::{compare_tracks, ComparisonRow};
use crate::config::RunConfig;
use crate::error::CliError;

pub const BRANCH_HEADER: &str = "# vortex branch v1";
pub const COMPARISON_HEADER: &str = "# vortex comparison v1";
pub const MANIFEST_SCHEMA: &str = "vortex manifest v1";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn eps_tag(eps: f64) -> String {
    format!("{eps:.6}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    /// Stopped on request; `--resume` continues it.
    Partial,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub config: RunConfig,
    pub status: RunStatus,
    pub last_good_eps: Option<f64>,
    pub points: Vec<f64>,
    pub error: Option<String>,
    pub first_hh_eps: Option<f64>,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join("manifest.json");
        let text = fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeValues {
    pub index: usize,
    pub n: i32,
    pub m: i32,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// On-disk form of a converged state: interior node values per component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub epsilon: f64,
    pub spec: VortexSpec,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub anchors: Vec<GaugeAnchor>,
    pub nodes: Vec<NodeValues>,
}

impl StateDump {
    pub fn from_state(state: &StationaryState) -> Self {
        let grid = state.spec.grid;
        let nc = state.field.n_components();
        let nodes = grid
            .interior()
            .map(|nd| NodeValues {
                index: grid.index(nd).expect("interior node"),
                n: nd.n,
                m: nd.m,
                re: (0..nc).map(|c| state.field.at(c, nd).re).collect(),
                im: (0..nc).map(|c| state.field.at(c, nd).im).collect(),
            })
            .collect();
        Self {
            epsilon: state.epsilon(),
            spec: state.spec,
            residual_norm: state.residual_norm,
            newton_iters: state.newton_iters,
            anchors: state.anchors.clone(),
            nodes,
        }
    }

    pub fn into_state(self) -> Result<StationaryState, CliError> {
        let nc = self.spec.components();
        let mut field = LatticeField::zeros(self.spec.grid, nc);
        for v in &self.nodes {
            if v.re.len() != nc || v.im.len() != nc {
                return Err(CliError::Config(format!(
                    "state dump node ({}, {}) has the wrong component count",
                    v.n, v.m
                )));
            }
            for c in 0..nc {
                field.set(c, Node::new(v.n, v.m), Complex64::new(v.re[c], v.im[c]))?;
            }
        }
        let state = StationaryState {
            field,
            spec: self.spec,
            residual_norm: self.residual_norm,
            newton_iters: self.newton_iters,
            anchors: self.anchors,
        };
        let r = state.recompute_residual()?;
        if r != self.residual_norm {
            return Err(CliError::Config(format!(
                "state dump at eps {} is inconsistent: residual {r:e} recorded {:e}",
                self.epsilon, self.residual_norm
            )));
        }
        Ok(state)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    pub resume: bool,
    /// Stop after this many converged points, leaving a resumable partial run.
    pub max_points: Option<usize>,
    /// Also compute zero-eigenvalue multiplicities and the negative index.
    pub kernel: bool,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub branch: TrackedBranch,
    pub hh: HhScan,
    pub comparison: Vec<ComparisonRow>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn state_path(dir: &Path, eps: f64) -> PathBuf {
    dir.join("states").join(format!("eps_{}.json", eps_tag(eps)))
}

/// Directory of one panel of a multi-panel run.
pub fn panel_dir(base: &Path, charges: ChargePair) -> PathBuf {
    base.join(match charges {
        ChargePair::Equal => "11",
        ChargePair::Opposite => "1-1",
    })
}

/// Per-panel configs: one per entry of `panels`, or the config itself.
pub fn expand_panels(cfg: &RunConfig) -> Vec<RunConfig> {
    if cfg.panels.is_empty() {
        return vec![cfg.clone()];
    }
    cfg.panels
        .iter()
        .map(|&p| RunConfig { charges: p, panels: Vec::new(), outputs: panel_dir(&cfg.outputs, p), ..cfg.clone() })
        .collect()
}

fn krein_code(k: Option<KreinSign>) -> &'static str {
    match k {
        Some(KreinSign::Positive) => "+",
        Some(KreinSign::Negative) => "-",
        Some(KreinSign::Indefinite) => "0",
        None => "",
    }
}

pub fn branch_csv(branch: &TrackedBranch) -> String {
    let mut out = format!("{BRANCH_HEADER}\neps,track_id,re_lambda,im_lambda,krein\n");
    for (step, report) in branch.reports.iter().enumerate() {
        let mut rows: Vec<(usize, Complex64, Option<KreinSign>)> = branch
            .tracks
            .iter()
            .filter_map(|t| t.points.iter().find(|p| p.step == step).map(|p| (t.id, p.lambda, p.krein)))
            .collect();
        rows.sort_by(|a, b| a.1.im.abs().total_cmp(&b.1.im.abs()).then(a.1.re.total_cmp(&b.1.re)).then(a.0.cmp(&b.0)));
        for (id, z, k) in rows {
            let _ =
                writeln!(out, "{},{id},{},{},{}", fmt_f64(report.epsilon), fmt_f64(z.re), fmt_f64(z.im), krein_code(k));
        }
    }
    out
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = format!(
        "{COMPARISON_HEADER}\neps,track_id,label,re_numeric,im_numeric,re_predicted,im_predicted,abs_error,rel_error\n"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.eps),
            r.track_id,
            r.label,
            fmt_f64(r.numeric_lambda.re),
            fmt_f64(r.numeric_lambda.im),
            fmt_f64(r.predicted_lambda.re),
            fmt_f64(r.predicted_lambda.im),
            fmt_f64(r.abs_error),
            fmt_f64(r.rel_error)
        );
    }
    out
}

#[derive(Serialize)]
struct HhFile<'a> {
    scan: &'a HhScan,
    pairing_warnings: &'a [PairingWarning],
}

fn load_states(dir: &Path, manifest: &Manifest) -> Result<Vec<StationaryState>, CliError> {
    manifest
        .points
        .iter()
        .map(|&eps| {
            let text = fs::read_to_string(state_path(dir, eps))?;
            serde_json::from_str::<StateDump>(&text)?.into_state()
        })
        .collect()
}

fn first_state(cfg: &RunConfig, spec: &VortexSpec) -> vortex_core::Result<StationaryState> {
    let start = cfg.eps_grid.start;
    if start == 0.0 {
        seed_state(spec)
    } else {
        solve_at(spec, start, cfg.eps_grid.step.min(start), &cfg.newton_config())
    }
}

/// Runs the configured sweep and writes every artifact under the output directory.
///
/// On a continuation failure the artifacts of the converged prefix are still
/// written and the manifest records the last good `ε`.
pub fn run_sweep(cfg: &RunConfig, opts: &SweepOptions) -> Result<SweepOutcome, CliError> {
    cfg.validate()?;
    if !cfg.panels.is_empty() {
        return Err(CliError::Config("multi-panel config: use run_panels".into()));
    }
    let spec = cfg.spec()?;
    let dir = cfg.out_dir();
    fs::create_dir_all(dir.join("states"))?;
    let grid = cfg.eps_grid.points();

    let mut states: Vec<StationaryState> = Vec::new();
    if opts.resume && dir.join("manifest.json").exists() {
        let old = Manifest::load(&dir)?;
        if old.config != *cfg {
            return Err(CliError::Config(format!("{} belongs to a different configuration", dir.display())));
        }
        states = load_states(&dir, &old)?;
    }

    let mut manifest = Manifest {
        schema: MANIFEST_SCHEMA.into(),
        config: cfg.clone(),
        status: RunStatus::Partial,
        last_good_eps: None,
        points: states.iter().map(|s| s.epsilon()).collect(),
        error: None,
        first_hh_eps: None,
    };
    manifest.last_good_eps = manifest.points.last().copied();

    let mut failure: Option<VortexError> = None;
    let newton = cfg.newton_config();
    for &eps in grid.iter().skip(states.len()) {
        if opts.max_points.is_some_and(|m| states.len() >= m) {
            break;
        }
        let next = match states.last() {
            None => first_state(cfg, &spec),
            Some(prev) => advance(prev, eps, &newton),
        };
        match next {
            Ok(s) => {
                write_json(&state_path(&dir, eps), &StateDump::from_state(&s))?;
                manifest.points.push(eps);
                manifest.last_good_eps = Some(eps);
                states.push(s);
                write_json(&dir.join("manifest.json"), &manifest)?;
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    manifest.status = match (&failure, states.len() == grid.len()) {
        (Some(_), _) => RunStatus::Failed,
        (None, true) => RunStatus::Complete,
        (None, false) => RunStatus::Partial,
    };
    manifest.error = failure.as_ref().map(|e| e.to_string());

    let spectrum_opts = SpectrumOptions { krein: true, kernel: opts.kernel };
    let reports: Vec<SpectrumReport> = solve_many(&states, &spectrum_opts)?;
    let (tracks, warnings) = pair_reports(&reports, &cfg.tracking);
    let branch = TrackedBranch { states, reports, tracks, warnings };
    let hh =
        detect_hh_with(&branch, &HhConfig { tol: cfg.hh_tol, resolution: cfg.hh_resolution, newton: newton.clone() })?;
    manifest.first_hh_eps = hh.first().map(|e| e.eps_star);
    let steps: Vec<f64> = branch.reports.iter().map(|r| r.epsilon).collect();
    let comparison = compare_tracks(&spec, &branch.tracks, &steps);

    if cfg.emit.csv {
        fs::write(dir.join("branch.csv"), branch_csv(&branch))?;
        fs::write(dir.join("comparison.csv"), comparison_csv(&comparison))?;
    }
    if cfg.emit.json {
        write_json(&dir.join("hh_events.json"), &HhFile { scan: &hh, pairing_warnings: &branch.warnings })?;
        fs::create_dir_all(dir.join("reports"))?;
        for r in &branch.reports {
            write_json(&dir.join("reports").join(format!("eps_{}.json", eps_tag(r.epsilon))), r)?;
        }
    }
    write_json(&dir.join("manifest.json"), &manifest)?;

    if let Some(source) = failure {
        return Err(CliError::SweepFailed { last_good_eps: manifest.last_good_eps.unwrap_or(f64::NAN), source });
    }
    Ok(SweepOutcome { dir, manifest, branch, hh, comparison })
}

/// Runs every panel of the config in turn.
pub fn run_panels(cfg: &RunConfig, opts: &SweepOptions) -> Result<Vec<SweepOutcome>, CliError> {
    expand_panels(cfg).iter().map(|c| run_sweep(c, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EpsGrid;
    use vortex_core::lattice::Model;

    fn small(dir: &Path) -> RunConfig {
        RunConfig {
            grid_n: 4,
            eps_grid: EpsGrid { start: 0.0, stop: 0.06, step: 0.02 },
            outputs: dir.to_path_buf(),
            ..RunConfig::default()
        }
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 123_456_789.123_456_79] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn single_point_run() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = small(tmp.path());
        cfg.eps_grid = EpsGrid { start: 0.03, stop: 0.03, step: 0.01 };
        let out = run_sweep(&cfg, &SweepOptions::default()).unwrap();
        assert_eq!(out.manifest.status, RunStatus::Complete);
        assert_eq!(out.manifest.points, vec![0.03]);
        let csv = fs::read_to_string(tmp.path().join("branch.csv")).unwrap();
        assert!(csv.starts_with(BRANCH_HEADER));
        assert!(csv.lines().count() > 2);
    }

    #[test]
    fn state_dump_round_trip() {
        let spec = VortexSpec::vector(vortex_core::GridShape::new(4).unwrap(), ChargePair::Opposite, 0.5, 1.0);
        let s = solve_at(&spec, 0.05, 0.05, &Default::default()).unwrap();
        let text = serde_json::to_string(&StateDump::from_state(&s)).unwrap();
        let back = serde_json::from_str::<StateDump>(&text).unwrap().into_state().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn deterministic_and_resumable() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let ca = small(a.path());
        run_sweep(&ca, &SweepOptions::default()).unwrap();
        let cb = small(b.path());
        let part = run_sweep(&cb, &SweepOptions { max_points: Some(2), ..Default::default() }).unwrap();
        assert_eq!(part.manifest.status, RunStatus::Partial);
        assert_eq!(part.manifest.last_good_eps, Some(0.02));
        let full = run_sweep(&cb, &SweepOptions { resume: true, ..Default::default() }).unwrap();
        assert_eq!(full.manifest.status, RunStatus::Complete);
        for f in ["branch.csv", "comparison.csv", "hh_events.json"] {
            assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
        }
    }

    #[test]
    fn resume_rejects_other_config() {
        let a = tempfile::tempdir().unwrap();
        run_sweep(&small(a.path()), &SweepOptions { max_points: Some(1), ..Default::default() }).unwrap();
        let mut other = small(a.path());
        other.model = Model::Vector;
        other.beta = 0.5;
        assert!(matches!(
            run_sweep(&other, &SweepOptions { resume: true, ..Default::default() }),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn failure_keeps_prefix() {
        let a = tempfile::tempdir().unwrap();
        let mut cfg = small(a.path());
        cfg.newton.max_iters = 1;
        cfg.newton.min_step = 0.015;
        cfg.eps_grid = EpsGrid { start: 0.0, stop: 0.3, step: 0.1 };
        match run_sweep(&cfg, &SweepOptions::default()) {
            Err(CliError::SweepFailed { last_good_eps, .. }) => {
                let m = Manifest::load(a.path()).unwrap();
                assert_eq!(m.status, RunStatus::Failed);
                assert_eq!(m.last_good_eps, Some(last_good_eps));
                assert!(a.path().join("branch.csv").exists());
            }
            other => panic!("expected a failure, got {:?}", other.map(|o| o.manifest.status)),
        }
    }
}
