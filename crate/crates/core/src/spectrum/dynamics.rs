//! Direct integration of the lattice flow in the frame rotating with the state.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{assemble_operators, LinearizedOperators, SpectrumReport};
use crate::error::{Result, VortexError};
use crate::lattice::{Model, VortexSpec};
use crate::linearize::{neighbor_table, residual_slots, slot_values};
use crate::stationary::StationaryState;

type C = Complex64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrowthConfig {
    pub dt: f64,
    /// Initial perturbation size relative to `‖Φ‖₂`.
    pub amplitude: f64,
    /// Fraction of the horizon discarded before fitting.
    pub skip: f64,
    pub max_drift: f64,
    pub samples: usize,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self { dt: 0.01, amplitude: 1e-8, skip: 0.25, max_drift: 1e-6, samples: 400 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub rate: f64,
    pub spectral_rate: f64,
    pub relative_error: f64,
    pub power_drift: f64,
    pub energy_drift: f64,
    pub horizon: f64,
    /// `(t, ln ‖U(t) − Φ‖₂)` samples.
    pub log_deviation: Vec<(f64, f64)>,
}

/// `Σ |u|² + |v|²`.
pub fn power(values: &[C]) -> f64 {
    values.iter().map(|z| z.norm_sqr()).sum()
}

/// Conserved energy whose `∂/∂ū` is the stationary residual.
pub fn energy(spec: &VortexSpec, values: &[C]) -> f64 {
    let nc = spec.components();
    let s = spec.hopping.onsite_shift(spec.epsilon);
    let nbrs = neighbor_table(spec);
    let mut e = 0.0;
    for (i, nb) in nbrs.iter().enumerate() {
        for c in 0..nc {
            let w = values[i * nc + c];
            let base = if c == 0 { 1.0 } else { spec.omega };
            e += (base + s) * w.norm_sqr() - 0.5 * w.norm_sqr().powi(2);
            let hop: C = nb.iter().map(|&j| values[j * nc + c]).sum();
            e -= spec.epsilon * (w.conj() * hop).re;
        }
        if spec.model == Model::Vector {
            e -= spec.beta * values[i * nc].norm_sqr() * values[i * nc + 1].norm_sqr();
        }
    }
    e
}

fn rhs(spec: &VortexSpec, u: &[C]) -> Vec<C> {
    residual_slots(spec, u).into_iter().map(|f| -C::i() * f).collect()
}

fn rk4_step(spec: &VortexSpec, u: &mut [C], dt: f64) {
    let k1 = rhs(spec, u);
    let tmp: Vec<C> = u.iter().zip(&k1).map(|(a, k)| a + k * (0.5 * dt)).collect();
    let k2 = rhs(spec, &tmp);
    let tmp: Vec<C> = u.iter().zip(&k2).map(|(a, k)| a + k * (0.5 * dt)).collect();
    let k3 = rhs(spec, &tmp);
    let tmp: Vec<C> = u.iter().zip(&k3).map(|(a, k)| a + k * dt).collect();
    let k4 = rhs(spec, &tmp);
    for i in 0..u.len() {
        u[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
    }
}

/// Eigenvector of the generator for the eigenvalue nearest `mu`, by inverse iteration.
fn eigenvector_near(ops: &LinearizedOperators, mu: C) -> Vec<C> {
    let n = ops.dim();
    let shift = mu + C::new(1e-10, 1e-10) * (1.0 + mu.norm());
    let mut m = Mat::<C>::zeros(n, n);
    for (r, c, v) in ops.generator.triplets() {
        m[(r, c)] = C::new(v, 0.0);
    }
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    let lu = m.partial_piv_lu();
    let mut x = Mat::<C>::from_fn(n, 1, |i, _| C::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.05));
    for _ in 0..4 {
        lu.solve_in_place(x.as_mut());
        let norm = (0..n).map(|i| x[(i, 0)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            x[(i, 0)] /= norm;
        }
    }
    (0..n).map(|i| x[(i, 0)]).collect()
}

pub fn validate_growth_rate(state: &StationaryState, report: &SpectrumReport, horizon: f64) -> Result<GrowthFit> {
    validate_growth_rate_with(state, report, horizon, &GrowthConfig::default())
}

/// Integrates the flow from the state plus a small push along the most unstable
/// eigenvector and fits the exponential growth rate of the deviation.
pub fn validate_growth_rate_with(
    state: &StationaryState,
    report: &SpectrumReport,
    horizon: f64,
    cfg: &GrowthConfig,
) -> Result<GrowthFit> {
    let rate = report.max_real_part;
    if !(rate > 1e-4) {
        return Err(VortexError::Precondition(format!("max real part {rate:e} is not above 1e-4")));
    }
    if rate * horizon < 3.0 {
        return Err(VortexError::Precondition(format!(
            "horizon {horizon} covers only {:.2} e-folds (need 3)",
            rate * horizon
        )));
    }
    let ops = assemble_operators(state)?;
    let mu = report.most_unstable().expect("non-empty spectrum");
    let x = eigenvector_near(&ops, mu);

    let pivot = x.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
    let rot = pivot.conj() / pivot.norm();
    let real_dir: Vec<f64> = x.iter().map(|z| (z * rot).re).collect();
    let base = slot_values(&state.field);
    let dir_norm = real_dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = cfg.amplitude * power(&base).sqrt() / dir_norm;
    let mut u: Vec<C> =
        base.iter().enumerate().map(|(k, z)| z + C::new(real_dir[2 * k], real_dir[2 * k + 1]) * scale).collect();

    let spec = state.spec;
    let (p0, e0) = (power(&u), energy(&spec, &u));
    let steps = (horizon / cfg.dt).ceil() as usize;
    let dt = horizon / steps as f64;
    let every = (steps / cfg.samples.max(1)).max(1);
    let deviation = |u: &[C]| u.iter().zip(&base).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();

    let mut samples = vec![(0.0, deviation(&u).ln())];
    let (mut power_drift, mut energy_drift) = (0.0f64, 0.0f64);
    for k in 1..=steps {
        rk4_step(&spec, &mut u, dt);
        if k % every == 0 || k == steps {
            samples.push((k as f64 * dt, deviation(&u).ln()));
            power_drift = power_drift.max(((power(&u) - p0) / p0).abs());
            energy_drift = energy_drift.max(((energy(&spec, &u) - e0) / e0.abs().max(1e-300)).abs());
        }
    }
    if power_drift > cfg.max_drift || energy_drift > cfg.max_drift {
        return Err(VortexError::ConservationDrift { power: power_drift, energy: energy_drift });
    }

    let t0 = cfg.skip * horizon;
    let fit: Vec<&(f64, f64)> = samples.iter().filter(|(t, _)| *t >= t0).collect();
    let n = fit.len() as f64;
    let (st, sy) = fit.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
    let (mt, my) = (st / n, sy / n);
    let (num, den) = fit.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + (t - mt) * (y - my), b + (t - mt).powi(2)));
    let fitted = num / den;

    Ok(GrowthFit {
        rate: fitted,
        spectral_rate: rate,
        relative_error: (fitted - rate).abs() / rate,
        power_drift,
        energy_drift,
        horizon,
        log_deviation: samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ChargePair, GridShape};
    use crate::spectrum::{solve_spectrum_with, SpectrumOptions};
    use crate::stationary::{solve_at, NewtonConfig};

    #[test]
    fn energy_gradient_is_residual() {
        let spec = VortexSpec::vector(GridShape::new(4).unwrap(), ChargePair::Opposite, 0.7, 1.2).with_epsilon(0.1);
        let u: Vec<C> = (0..spec.grid.interior_count() * 2)
            .map(|k| C::new(((k * 13 % 7) as f64 - 3.0) * 0.1, ((k * 5 % 11) as f64 - 5.0) * 0.07))
            .collect();
        let f = residual_slots(&spec, &u);
        let h = 1e-6;
        for k in (0..u.len()).step_by(5) {
            let mut up = u.clone();
            let mut um = u.clone();
            up[k] += h;
            um[k] -= h;
            let dre = (energy(&spec, &up) - energy(&spec, &um)) / (2.0 * h);
            up[k] = u[k] + C::new(0.0, h);
            um[k] = u[k] - C::new(0.0, h);
            let dim = (energy(&spec, &up) - energy(&spec, &um)) / (2.0 * h);
            // ∂E/∂ū = (∂_re + i ∂_im) E / 2
            let grad = C::new(dre, dim) * 0.5;
            assert!((grad - f[k]).norm() < 1e-7, "{grad} vs {}", f[k]);
        }
    }

    #[test]
    fn stable_state_fails_precondition() {
        let state =
            solve_at(&VortexSpec::scalar(GridShape::new(6).unwrap()), 0.1, 0.05, &NewtonConfig::default()).unwrap();
        let ops = assemble_operators(&state).unwrap();
        let report = solve_spectrum_with(&ops, &SpectrumOptions::eigenvalues_only()).unwrap();
        assert!(matches!(validate_growth_rate(&state, &report, 100.0), Err(VortexError::Precondition(_))));
    }
}
