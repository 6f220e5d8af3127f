use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{assemble_operators, solve_spectrum_with, SpectrumOptions, SpectrumReport, TrackedBranch};
use crate::error::Result;
use crate::stationary::{advance, NewtonConfig, StationaryState};

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Collision {
    ComplexQuartet,
    RealPair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HhEvent {
    pub eps_star: f64,
    /// Bracket `[lo, hi]` with `hi − lo ≤ resolution`.
    pub bracket: (f64, f64),
    pub colliding_pair_ids: (usize, usize),
    pub post_collision: Collision,
    /// Most unstable eigenvalue at the upper end of the bracket.
    pub lambda_after: C,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HhScan {
    pub events: Vec<HhEvent>,
    /// The first point of the branch is already unstable.
    pub unstable_at_start: bool,
}

impl HhScan {
    pub fn first(&self) -> Option<&HhEvent> {
        self.events.first()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HhConfig {
    pub tol: f64,
    pub resolution: f64,
    pub newton: NewtonConfig,
}

impl Default for HhConfig {
    fn default() -> Self {
        Self { tol: 1e-6, resolution: 1e-4, newton: NewtonConfig::default() }
    }
}

pub fn detect_hh(branch: &TrackedBranch, tol: f64) -> Result<HhScan> {
    detect_hh_with(branch, &HhConfig { tol, ..HhConfig::default() })
}

fn spectrum_at(state: &StationaryState) -> Result<SpectrumReport> {
    solve_spectrum_with(&assemble_operators(state)?, &SpectrumOptions::eigenvalues_only())
}

/// Locates every upward crossing of `max Re λ` through `tol` along the branch by bisection.
pub fn detect_hh_with(branch: &TrackedBranch, cfg: &HhConfig) -> Result<HhScan> {
    let mut scan = HhScan::default();
    let Some(first) = branch.reports.first() else {
        return Ok(scan);
    };
    scan.unstable_at_start = first.max_real_part > cfg.tol;

    for i in 0..branch.reports.len().saturating_sub(1) {
        let (r0, r1) = (&branch.reports[i], &branch.reports[i + 1]);
        if !(r0.max_real_part <= cfg.tol && r1.max_real_part > cfg.tol) {
            continue;
        }
        let mut lo = branch.states[i].clone();
        let mut hi_eps = branch.states[i + 1].epsilon();
        let mut hi_report = r1.clone();
        while hi_eps - lo.epsilon() > cfg.resolution {
            let mid = 0.5 * (lo.epsilon() + hi_eps);
            let state = advance(&lo, mid, &cfg.newton)?;
            let report = spectrum_at(&state)?;
            if report.max_real_part > cfg.tol {
                hi_eps = mid;
                hi_report = report;
            } else {
                lo = state;
            }
        }
        let lambda_after = hi_report.most_unstable().unwrap_or_default();
        let post_collision =
            if lambda_after.im.abs() > cfg.tol { Collision::ComplexQuartet } else { Collision::RealPair };
        let ids = colliding_ids(branch, i, lambda_after, post_collision);
        scan.events.push(HhEvent {
            eps_star: 0.5 * (lo.epsilon() + hi_eps),
            bracket: (lo.epsilon(), hi_eps),
            colliding_pair_ids: ids,
            post_collision,
            lambda_after,
        });
    }
    Ok(scan)
}

/// Two tracks closest to the collision point at the last stable branch point.
fn colliding_ids(branch: &TrackedBranch, step: usize, lambda: C, kind: Collision) -> (usize, usize) {
    let target = match kind {
        Collision::ComplexQuartet => C::new(0.0, lambda.im.abs()),
        Collision::RealPair => C::new(0.0, 0.0),
    };
    let mut near: Vec<(f64, usize)> = branch
        .tracks
        .iter()
        .filter_map(|t| t.points.iter().find(|p| p.step == step).map(|p| ((p.lambda - target).norm(), t.id)))
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    match near.as_slice() {
        [] => (usize::MAX, usize::MAX),
        [(_, a), ..] if kind == Collision::RealPair => (*a, *a),
        [(_, a)] => (*a, *a),
        [(_, a), (_, b), ..] => (*a.min(b), *a.max(b)),
    }
}
