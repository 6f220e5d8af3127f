use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{solve_many, KreinSign, SpectrumOptions, SpectrumReport};
use crate::error::Result;
use crate::stationary::StationaryState;

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackingConfig {
    /// Only eigenvalues with `|λ| ≤ window` are tracked.
    pub window: f64,
    /// Largest admissible move of a tracked eigenvalue between neighbouring steps.
    pub radius: f64,
    /// Eigenvalues closer than this to the origin are treated as zero.
    pub zero: f64,
}

impl Default for TrackingConfig {
    fn default() -> Self {
        Self { window: 0.6, radius: 0.05, zero: 1e-7 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub step: usize,
    pub epsilon: f64,
    pub lambda: C,
    pub krein: Option<KreinSign>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub id: usize,
    pub points: Vec<TrackPoint>,
}

impl Track {
    pub fn last(&self) -> &TrackPoint {
        self.points.last().expect("tracks are never empty")
    }

    pub fn is_quartet_at(&self, tol: f64) -> bool {
        self.points.iter().any(|p| p.lambda.re.abs() > tol && p.lambda.im.abs() > tol)
    }

    pub fn is_real_pair_at(&self, re_tol: f64, im_tol: f64) -> bool {
        self.points.iter().any(|p| p.lambda.re > re_tol && p.lambda.im.abs() <= im_tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingWarning {
    pub step: usize,
    pub epsilon: f64,
    pub track_ids: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackedBranch {
    pub states: Vec<StationaryState>,
    pub reports: Vec<SpectrumReport>,
    pub tracks: Vec<Track>,
    pub warnings: Vec<PairingWarning>,
}

/// Representatives of each `±λ, ±λ̄` orbit inside the window: `Im λ > 0`, or
/// `Im λ = 0` with `Re λ > 0`.
fn representatives(report: &SpectrumReport, cfg: &TrackingConfig) -> Vec<C> {
    report
        .eigenvalues
        .iter()
        .copied()
        .filter(|z| z.norm() > cfg.zero && z.norm() <= cfg.window)
        .filter(|z| z.im > 1e-10 || (z.im.abs() <= 1e-10 && z.re > 0.0))
        .collect()
}

pub fn track_branch(
    states: Vec<StationaryState>,
    opts: &SpectrumOptions,
    cfg: &TrackingConfig,
) -> Result<TrackedBranch> {
    let reports = solve_many(&states, opts)?;
    let (tracks, warnings) = pair_reports(&reports, cfg);
    Ok(TrackedBranch { states, reports, tracks, warnings })
}

/// Nearest-match pairing of small eigenvalues between consecutive reports.
pub fn pair_reports(reports: &[SpectrumReport], cfg: &TrackingConfig) -> (Vec<Track>, Vec<PairingWarning>) {
    let mut tracks: Vec<Track> = Vec::new();
    let mut warnings = Vec::new();
    let mut active: Vec<usize> = Vec::new();

    for (step, report) in reports.iter().enumerate() {
        let cands = representatives(report, cfg);
        let mut edges: Vec<(f64, usize, usize)> = Vec::new();
        for (ti, &t) in active.iter().enumerate() {
            let prev = tracks[t].last().lambda;
            for (ci, &c) in cands.iter().enumerate() {
                let d = (c - prev).norm();
                if d <= cfg.radius {
                    edges.push((d, ti, ci));
                }
            }
        }
        edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let mut track_taken = vec![false; active.len()];
        let mut cand_owner: Vec<Option<usize>> = vec![None; cands.len()];
        for &(_, ti, ci) in &edges {
            if !track_taken[ti] && cand_owner[ci].is_none() {
                track_taken[ti] = true;
                cand_owner[ci] = Some(active[ti]);
            }
        }

        let mut next_active = Vec::with_capacity(cands.len());
        for (ci, &c) in cands.iter().enumerate() {
            let id = match cand_owner[ci] {
                Some(id) => id,
                None => {
                    tracks.push(Track { id: tracks.len(), points: Vec::new() });
                    tracks.len() - 1
                }
            };
            cand_owner[ci] = Some(id);
            tracks[id].points.push(TrackPoint { step, epsilon: report.epsilon, lambda: c, krein: report.krein_of(c) });
            next_active.push(id);
        }

        // A track is ambiguous when a second, distinct candidate is nearly as close.
        for (ti, &t) in active.iter().enumerate() {
            let mut near: Vec<(f64, usize)> = edges.iter().filter(|e| e.1 == ti).map(|e| (e.0, e.2)).collect();
            if near.len() < 2 {
                continue;
            }
            near.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (d0, c0) = near[0];
            let (d1, c1) = near[1];
            let distinct = (cands[c0] - cands[c1]).norm() > 1e-6;
            if distinct && d1 <= 2.0 * d0.max(1e-12) {
                let other = if cand_owner[c0] == Some(t) { cand_owner[c1] } else { cand_owner[c0] };
                if let Some(o) = other {
                    warnings.push(PairingWarning { step, epsilon: report.epsilon, track_ids: (t, o) });
                }
            }
        }
        active = next_active;
    }
    (tracks, warnings)
}
