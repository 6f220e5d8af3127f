//! Amplitude algebra, residuals, gauge-fixed Newton continuation and
//! perturbation-series reference fields.

use faer::{Mat, MatRef};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VortexError};
use crate::lattice::{
    anti_continuum_seed, build_contours, ChargePair, Hopping, LatticeField, Model, Node, VortexSpec, MANAKOV_TOL, S0,
};
use crate::linearize::{expansion, field_from_slots, pack_real, residual_slots, slot_values, unpack_real};

type C = Complex64;

/// Site amplitudes `(a, b)` of the two components at the anti-continuum limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudePair {
    pub a: f64,
    pub b: f64,
}

impl AmplitudePair {
    pub fn scalar() -> Self {
        Self { a: 1.0, b: 0.0 }
    }
}

/// Solves `a² + βb² = 1`, `βa² + b² = ω`.
///
/// For `β = 1` the system is degenerate and the pair is parametrized by the
/// polarization angle, `(cos δ, sin δ)`.
pub fn solve_amplitudes(beta: f64, omega: f64, delta: Option<f64>) -> Result<AmplitudePair> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(VortexError::InvalidParameter(format!("beta = {beta} must be >= 0")));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(VortexError::InvalidParameter(format!("omega = {omega} must be > 0")));
    }
    if (beta - 1.0).abs() < MANAKOV_TOL {
        if (omega - 1.0).abs() > MANAKOV_TOL {
            return Err(VortexError::DegenerateLine { omega });
        }
        let d = delta.ok_or(VortexError::MissingDelta)?;
        return Ok(AmplitudePair { a: d.cos(), b: d.sin() });
    }
    let (lo, hi) = if beta == 0.0 { (0.0, f64::INFINITY) } else { (beta.min(1.0 / beta), beta.max(1.0 / beta)) };
    let slack = 1e-14 * (1.0 + omega);
    if omega < lo - slack || omega > hi + slack {
        return Err(VortexError::ExistenceDomain { beta, omega, lo, hi });
    }
    let den = 1.0 - beta * beta;
    let a2 = ((1.0 - beta * omega) / den).max(0.0);
    let b2 = ((omega - beta) / den).max(0.0);
    Ok(AmplitudePair { a: a2.sqrt(), b: b2.sqrt() })
}

/// Left-hand side minus right-hand side of the stationary equations at every node.
pub fn residual(field: &LatticeField, spec: &VortexSpec) -> Result<LatticeField> {
    field.check_shape(spec)?;
    let r = residual_slots(spec, &slot_values(field));
    Ok(field_from_slots(spec, &r))
}

fn residual_norm(spec: &VortexSpec, values: &[C]) -> f64 {
    residual_slots(spec, values).iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max)
}

/// Phase pinned at one node of one component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeAnchor {
    pub component: usize,
    pub node: Node,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryState {
    pub field: LatticeField,
    pub spec: VortexSpec,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub anchors: Vec<GaugeAnchor>,
}

impl StationaryState {
    pub fn epsilon(&self) -> f64 {
        self.spec.epsilon
    }

    /// Recomputes the residual from the stored field.
    pub fn recompute_residual(&self) -> Result<f64> {
        self.field.check_shape(&self.spec)?;
        Ok(residual_norm(&self.spec, &slot_values(&self.field)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonConfig {
    pub tol: f64,
    pub max_iters: usize,
    /// Extra iterations after reaching `tol`, kept while they still reduce the residual.
    pub polish_iters: usize,
    pub min_step: f64,
    /// Series order used as the initial guess for the first continuation step.
    pub seed_order: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_iters: 50, polish_iters: 4, min_step: 1e-4, seed_order: 0 }
    }
}

pub const DEFAULT_STEP: f64 = 0.01;
const PIVOT_RATIO_MIN: f64 = 1e-14;

fn anchors_for(spec: &VortexSpec) -> Vec<GaugeAnchor> {
    (0..spec.gauge_count()).map(|c| GaugeAnchor { component: c, node: S0[0], phase: 0.0 }).collect()
}

fn lu_pivot_ratio(u: MatRef<'_, f64>) -> f64 {
    let n = u.nrows();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..n {
        let v = u[(i, i)].abs();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}

/// Newton iteration at fixed `spec.epsilon`, starting from `guess`.
///
/// Solves the real form of the stationary equations. For each component the
/// imaginary-part equation at the anchor node is replaced by the phase
/// constraint, which removes the gauge kernel.
pub fn newton_solve(spec: &VortexSpec, guess: &LatticeField, cfg: &NewtonConfig) -> Result<StationaryState> {
    spec.validate()?;
    guess.check_shape(spec)?;
    if spec.is_manakov() {
        return newton_solve_manakov(spec, guess, cfg);
    }
    let anchors = anchors_for(spec);
    let nc = spec.components();
    let grid = spec.grid;
    let anchor_rows: Vec<(usize, f64)> = anchors
        .iter()
        .map(|a| {
            let i = grid.interior_index(a.node).expect("anchor is interior");
            (2 * (i * nc + a.component) + 1, a.phase)
        })
        .collect();

    let mut x = pack_real(&slot_values(guess));
    let mut iters = 0usize;
    let mut norm = residual_norm(spec, &unpack_real(&x));
    let mut converged_at: Option<usize> = None;
    let mut best = (norm, x.clone());

    loop {
        if !norm.is_finite() || norm > 1e6 {
            break;
        }
        if norm <= cfg.tol && converged_at.is_none() {
            converged_at = Some(iters);
        }
        if let Some(k) = converged_at {
            if iters >= k + cfg.polish_iters {
                break;
            }
        } else if iters >= cfg.max_iters {
            break;
        }

        let values = unpack_real(&x);
        let f = pack_real(&residual_slots(spec, &values));
        let jac = expansion(spec, &values).real_jacobian();
        let dim = x.len();
        let mut m = Mat::<f64>::zeros(dim, dim);
        for (r, c, v) in jac.triplets() {
            m[(r, c)] = v;
        }
        let mut rhs = Mat::<f64>::from_fn(dim, 1, |r, _| -f[r]);
        for &(row, phase) in &anchor_rows {
            for c in 0..dim {
                m[(row, c)] = 0.0;
            }
            m[(row, row - 1)] = -phase.sin();
            m[(row, row)] = phase.cos();
            rhs[(row, 0)] = -(-phase.sin() * x[row - 1] + phase.cos() * x[row]);
        }
        let lu = m.partial_piv_lu();
        let ratio = lu_pivot_ratio(lu.U());
        if ratio < PIVOT_RATIO_MIN {
            return Err(VortexError::Singular { eps: spec.epsilon, pivot_ratio: ratio });
        }
        use faer::linalg::solvers::Solve;
        lu.solve_in_place(rhs.as_mut());
        for r in 0..dim {
            x[r] += rhs[(r, 0)];
        }
        iters += 1;
        norm = residual_norm(spec, &unpack_real(&x));
        if converged_at.is_some() && norm >= best.0 {
            break;
        }
        if norm < best.0 || converged_at.is_none() {
            best = (norm, x.clone());
        }
    }

    if best.0 > cfg.tol {
        return Err(VortexError::NewtonDivergence { eps: spec.epsilon, iters, residual: norm });
    }
    let field = field_from_slots(spec, &unpack_real(&best.1));
    Ok(StationaryState { field, spec: *spec, residual_norm: best.0, newton_iters: iters, anchors })
}

/// Manakov states are lifts of the scalar state: `φ = cos δ Φ`, `ψ = sin δ Φ`
/// (or `sin δ Φ̄` for opposite charges). Solving the scalar problem avoids the
/// extra rotation symmetry that a per-component gauge cannot remove.
fn newton_solve_manakov(spec: &VortexSpec, guess: &LatticeField, cfg: &NewtonConfig) -> Result<StationaryState> {
    let amps = spec.amplitudes()?;
    let scalar_spec = manakov_scalar_spec(spec);
    let use_first = amps.a.abs() >= amps.b.abs();
    let scalar_guess = guess.map_components(|_, node, _| {
        if use_first {
            guess.at(0, node) / amps.a
        } else {
            let v = guess.at(1, node) / amps.b;
            if spec.charges == ChargePair::Opposite {
                v.conj()
            } else {
                v
            }
        }
    });
    let mut scalar_only = LatticeField::zeros(spec.grid, 1);
    for node in spec.grid.interior() {
        scalar_only.set(0, node, scalar_guess.at(0, node))?;
    }
    let s = newton_solve(&scalar_spec, &scalar_only, cfg)?;
    lift_manakov(spec, &s)
}

fn manakov_scalar_spec(spec: &VortexSpec) -> VortexSpec {
    VortexSpec::scalar(spec.grid).with_epsilon(spec.epsilon).with_hopping(spec.hopping)
}

fn lift_manakov(spec: &VortexSpec, scalar: &StationaryState) -> Result<StationaryState> {
    let amps = spec.amplitudes()?;
    let mut field = LatticeField::zeros(spec.grid, 2);
    for node in spec.grid.interior() {
        let z = scalar.field.at(0, node);
        let second = if spec.charges == ChargePair::Opposite { z.conj() } else { z };
        field.set(0, node, z * amps.a)?;
        field.set(1, node, second * amps.b)?;
    }
    let residual_norm = residual_norm(spec, &slot_values(&field));
    Ok(StationaryState {
        field,
        spec: *spec,
        residual_norm,
        newton_iters: scalar.newton_iters,
        anchors: anchors_for(spec),
    })
}

/// Seed state at `ε = 0`.
pub fn seed_state(spec: &VortexSpec) -> Result<StationaryState> {
    spec.validate()?;
    let spec = spec.with_epsilon(0.0);
    let field = anti_continuum_seed(&spec, spec.amplitudes()?)?;
    let residual_norm = residual_norm(&spec, &slot_values(&field));
    Ok(StationaryState { field, spec, residual_norm, newton_iters: 0, anchors: anchors_for(&spec) })
}

/// Advances a converged state to `eps_next`, halving the step on failure.
pub fn advance(state: &StationaryState, eps_next: f64, cfg: &NewtonConfig) -> Result<StationaryState> {
    let mut current = state.clone();
    let mut h = eps_next - current.epsilon();
    if h == 0.0 {
        return Ok(current);
    }
    while current.epsilon() != eps_next {
        let target = if (eps_next - current.epsilon()).abs() <= h.abs() * (1.0 + 1e-12) {
            eps_next
        } else {
            current.epsilon() + h
        };
        let spec = current.spec.with_epsilon(target);
        let guess = if current.epsilon() == 0.0 && cfg.seed_order > 0 {
            series_field(&spec, cfg.seed_order)?.field
        } else {
            current.field.clone()
        };
        match newton_solve(&spec, &guess, cfg) {
            Ok(next) => current = next,
            Err(err @ (VortexError::NewtonDivergence { .. } | VortexError::Singular { .. })) => {
                let last_residual = match err {
                    VortexError::NewtonDivergence { residual, .. } => residual,
                    _ => f64::NAN,
                };
                h *= 0.5;
                if h.abs() < cfg.min_step {
                    return Err(VortexError::ContinuationFailure {
                        last_good_eps: current.epsilon(),
                        target_eps: eps_next,
                        residual: last_residual,
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(current)
}

/// Values `0, step, 2·step, …` up to and including `eps_target`.
pub fn eps_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if stop <= start {
        return vec![start];
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    let mut out: Vec<f64> = (0..=n).map(|k| start + k as f64 * step).collect();
    if (stop - out[n]).abs() > 1e-9 * step {
        out.push(stop);
    } else {
        out[n] = stop;
    }
    out
}

pub fn newton_continue(spec: &VortexSpec, eps_target: f64, step: f64) -> Result<Vec<StationaryState>> {
    newton_continue_with(spec, eps_target, step, &NewtonConfig::default())
}

/// Path-following from the anti-continuum limit to `eps_target`.
pub fn newton_continue_with(
    spec: &VortexSpec,
    eps_target: f64,
    step: f64,
    cfg: &NewtonConfig,
) -> Result<Vec<StationaryState>> {
    if !(step > 0.0) {
        return Err(VortexError::InvalidParameter(format!("step = {step} must be > 0")));
    }
    if !(eps_target >= 0.0) {
        return Err(VortexError::InvalidParameter(format!("eps_target = {eps_target} must be >= 0")));
    }
    let mut states = vec![seed_state(spec)?];
    for &eps in eps_grid(0.0, eps_target, step).iter().skip(1) {
        let next = advance(states.last().unwrap(), eps, cfg)?;
        states.push(next);
    }
    Ok(states)
}

/// Continues to `eps` and returns only the final state.
pub fn solve_at(spec: &VortexSpec, eps: f64, step: f64, cfg: &NewtonConfig) -> Result<StationaryState> {
    let mut state = seed_state(spec)?;
    for &e in eps_grid(0.0, eps, step).iter().skip(1) {
        state = advance(&state, e, cfg)?;
    }
    Ok(state)
}

/// Partial sum of the perturbation series in `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesField {
    pub order: usize,
    pub field: LatticeField,
}

fn add_interior(field: &mut LatticeField, c: usize, node: Node, v: C) {
    if field.grid().is_interior(node) {
        let cur = field.at(c, node);
        field.set(c, node, cur + v).expect("interior node");
    }
}

/// Contour coefficient `4 + 2cos(θ_{j+1}−θ_j) + 2cos(θ_{j−1}−θ_j) + cos(θ_{j+2}−θ_j)`.
pub fn contour_coefficient(theta: &[f64; 4], j: usize) -> f64 {
    let d = |k: usize| (theta[(j + k) % 4] - theta[j]).cos();
    4.0 + 2.0 * d(1) + 2.0 * d(3) + d(2)
}

/// Series for the vortex cross up to `order` (≤ 3 scalar, ≤ 2 vector).
///
/// For the `Laplacian` convention the series of the equivalent neighbour-sum
/// problem is mapped back, so the result is accurate to the same order but is
/// not a polynomial in `ε`.
pub fn series_field(spec: &VortexSpec, order: usize) -> Result<SeriesField> {
    spec.validate()?;
    let max = match spec.model {
        Model::Scalar => 3,
        Model::Vector => 2,
    };
    if order > max {
        return Err(VortexError::InvalidParameter(format!("series order {order} exceeds {max}")));
    }
    if spec.hopping == Hopping::Laplacian {
        let eps = spec.epsilon;
        let scale = (1.0 + 4.0 * eps).sqrt();
        let mut reduced = spec.with_hopping(Hopping::NeighborSum).with_epsilon(Hopping::Laplacian.reduced_epsilon(eps));
        reduced.omega = (spec.omega + 4.0 * eps) / (1.0 + 4.0 * eps);
        let s = series_field(&reduced, order)?;
        return Ok(SeriesField { order, field: s.field.scaled(scale) });
    }
    let field = match spec.model {
        Model::Scalar => scalar_series(spec, order)?,
        Model::Vector => vector_series(spec, order)?,
    };
    Ok(SeriesField { order, field })
}

fn theta_of(spec: &VortexSpec, c: usize) -> [f64; 4] {
    let sign = if c == 0 { 1.0 } else { spec.charges.sign() as f64 };
    std::array::from_fn(|j| sign * std::f64::consts::FRAC_PI_2 * j as f64)
}

fn scalar_series(spec: &VortexSpec, order: usize) -> Result<LatticeField> {
    let grid = spec.grid;
    let cs = build_contours(grid)?;
    let eps = spec.epsilon;
    let phases: [C; 4] = std::array::from_fn(|j| spec.contour_phase(0, j));
    let theta = theta_of(spec, 0);

    let mut orders = vec![LatticeField::zeros(grid, 1); 4];
    for (j, &nd) in cs.s0.iter().enumerate() {
        add_interior(&mut orders[0], 0, nd, phases[j]);
    }
    for s in &cs.s1 {
        add_interior(&mut orders[1], 0, s.node, s.phase_sum(&phases));
    }
    for (j, &nd) in cs.s0.iter().enumerate() {
        let s2 = -0.5 * contour_coefficient(&theta, j);
        add_interior(&mut orders[2], 0, nd, phases[j] * s2);
    }
    for s in &cs.s2 {
        add_interior(&mut orders[2], 0, s.node, s.phase_sum(&phases));
    }
    let (f1, f2) = (orders[1].clone(), orders[2].clone());
    for s in &cs.s1 {
        let p1 = f1.at(0, s.node);
        add_interior(&mut orders[3], 0, s.node, p1 * p1.norm_sqr() + f2.neighbor_sum(0, s.node));
    }
    for &nd in &cs.s3 {
        add_interior(&mut orders[3], 0, nd, f2.neighbor_sum(0, nd));
    }

    let mut out = LatticeField::zeros(grid, 1);
    for (k, f) in orders.iter().enumerate().take(order + 1) {
        let w = eps.powi(k as i32);
        for node in grid.interior() {
            add_interior(&mut out, 0, node, f.at(0, node) * w);
        }
    }
    Ok(out)
}

/// Real corrections `(s_j, r_j)` on `s0` at second order of the vector series.
///
/// Solves `−2(a s + βb r) = R_θ`, `−2(βa s + b r) = R_ν / ω` with `R` the
/// contour coefficient of each component's phases.
pub fn vector_second_order(spec: &VortexSpec) -> Result<[(f64, f64); 4]> {
    let amps = spec.amplitudes()?;
    let (a, b, beta, omega) = (amps.a, amps.b, spec.beta, spec.omega);
    let det = 4.0 * a * b * (1.0 - beta * beta);
    if spec.is_manakov() || det.abs() < 1e-12 {
        return Err(VortexError::SingularSeries(format!(
            "second-order system has determinant {det:e} at beta = {beta}"
        )));
    }
    let (th, nu) = (theta_of(spec, 0), theta_of(spec, 1));
    Ok(std::array::from_fn(|j| {
        let r1 = contour_coefficient(&th, j);
        let r2 = contour_coefficient(&nu, j) / omega;
        let (m11, m12, m21, m22) = (-2.0 * a, -2.0 * beta * b, -2.0 * beta * a, -2.0 * b);
        let s = (r1 * m22 - m12 * r2) / (m11 * m22 - m12 * m21);
        let r = (m11 * r2 - m21 * r1) / (m11 * m22 - m12 * m21);
        (s, r)
    }))
}

fn vector_series(spec: &VortexSpec, order: usize) -> Result<LatticeField> {
    let grid = spec.grid;
    let cs = build_contours(grid)?;
    let eps = spec.epsilon;
    let amps = spec.amplitudes()?;
    let amp = [amps.a, amps.b];
    let omega_scale = [1.0, spec.omega];
    let mut out = LatticeField::zeros(grid, 2);
    let second = if order >= 2 { Some(vector_second_order(spec)?) } else { None };
    for c in 0..2 {
        let phases: [C; 4] = std::array::from_fn(|j| spec.contour_phase(c, j));
        for (j, &nd) in cs.s0.iter().enumerate() {
            add_interior(&mut out, c, nd, phases[j] * amp[c]);
        }
        if order >= 1 {
            for s in &cs.s1 {
                add_interior(&mut out, c, s.node, s.phase_sum(&phases) * (amp[c] / omega_scale[c] * eps));
            }
        }
        if let Some(sr) = second {
            for (j, &nd) in cs.s0.iter().enumerate() {
                let x = if c == 0 { sr[j].0 } else { sr[j].1 };
                add_interior(&mut out, c, nd, phases[j] * (x * eps * eps));
            }
            for s in &cs.s2 {
                let w = amp[c] / omega_scale[c].powi(2) * eps * eps;
                add_interior(&mut out, c, s.node, s.phase_sum(&phases) * w);
            }
        }
    }
    Ok(out)
}

/// `(Σ|Φ|²)² − |ΣΦ²|²` on the first component.
pub fn check_nondegeneracy(state: &StationaryState) -> f64 {
    nondegeneracy(&state.field)
}

pub fn nondegeneracy(field: &LatticeField) -> f64 {
    let p: f64 = field.component(0).iter().map(|z| z.norm_sqr()).sum();
    let q: C = field.component(0).iter().map(|z| z * z).sum();
    p * p - q.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GridShape;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn g(n: usize) -> GridShape {
        GridShape::new(n).unwrap()
    }

    #[test]
    fn amplitudes_examples() {
        let p = solve_amplitudes(2.0 / 3.0, 1.0, None).unwrap();
        assert!((p.a - 0.6f64.sqrt()).abs() < 1e-15 && (p.b - 0.6f64.sqrt()).abs() < 1e-15);
        assert!((p.a - 0.774597).abs() < 1e-6);
        let p = solve_amplitudes(0.0, 1.0, None).unwrap();
        assert_eq!((p.a, p.b), (1.0, 1.0));
        assert!(matches!(solve_amplitudes(2.0, 0.3, None), Err(VortexError::ExistenceDomain { .. })));
        let p = solve_amplitudes(1.0, 1.0, Some(PI / 4.0)).unwrap();
        assert!((p.a - 0.5f64.sqrt()).abs() < 1e-15 && (p.b - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(matches!(solve_amplitudes(1.0, 1.2, Some(0.1)), Err(VortexError::DegenerateLine { .. })));
        assert!(matches!(solve_amplitudes(1.0, 1.0, None), Err(VortexError::MissingDelta)));
    }

    proptest! {
        #[test]
        fn amplitude_identities(beta in 0.0f64..5.0, t in 0.0f64..1.0) {
            prop_assume!((beta - 1.0).abs() > 1e-3);
            let (lo, hi) = if beta == 0.0 { (0.01, 3.0) } else { (beta.min(1.0 / beta), beta.max(1.0 / beta)) };
            let omega = lo + t * (hi - lo);
            let p = solve_amplitudes(beta, omega, None).unwrap();
            prop_assert!((p.a * p.a + beta * p.b * p.b - 1.0).abs() < 1e-12);
            prop_assert!((beta * p.a * p.a + p.b * p.b - omega).abs() < 1e-12);
        }

        #[test]
        fn residual_is_gauge_equivariant(alpha in 0.0f64..std::f64::consts::TAU, gamma in 0.0f64..std::f64::consts::TAU) {
            let spec = VortexSpec::vector(g(4), ChargePair::Opposite, 0.4, 1.1).with_epsilon(0.07);
            let f = series_field(&spec, 2).unwrap().field;
            let mut rot = f.clone();
            rot.scale_component(0, C::from_polar(1.0, alpha));
            rot.scale_component(1, C::from_polar(1.0, gamma));
            let r0 = residual(&f, &spec).unwrap();
            let mut r0rot = r0.clone();
            r0rot.scale_component(0, C::from_polar(1.0, alpha));
            r0rot.scale_component(1, C::from_polar(1.0, gamma));
            let r1 = residual(&rot, &spec).unwrap();
            prop_assert!(r1.distance_inf(&r0rot).unwrap() < 1e-14);
        }
    }

    #[test]
    fn seed_residual_vanishes_at_zero_coupling() {
        for spec in [
            VortexSpec::scalar(g(5)),
            VortexSpec::vector(g(5), ChargePair::Opposite, 2.0 / 3.0, 1.0),
            VortexSpec::vector(g(5), ChargePair::Equal, 2.0, 1.3),
            VortexSpec::manakov(g(5), ChargePair::Opposite, 0.3),
        ] {
            let s = seed_state(&spec).unwrap();
            assert!(s.residual_norm < 1e-15, "{:?}", spec.model);
        }
    }

    #[test]
    fn zero_field_is_a_solution() {
        let spec = VortexSpec::scalar(g(5)).with_epsilon(0.3);
        let r = residual(&LatticeField::zeros(spec.grid, 1), &spec).unwrap();
        assert_eq!(r.norm_inf(), 0.0);
    }

    #[test]
    fn residual_rejects_shape_mismatch() {
        let spec = VortexSpec::vector(g(5), ChargePair::Equal, 0.5, 1.0);
        assert!(matches!(residual(&LatticeField::zeros(spec.grid, 1), &spec), Err(VortexError::ShapeMismatch { .. })));
    }

    #[test]
    fn series_first_order_center_vanishes() {
        let spec = VortexSpec::scalar(g(5)).with_epsilon(0.1);
        let cs = build_contours(spec.grid).unwrap();
        let phases: [C; 4] = std::array::from_fn(|j| spec.contour_phase(0, j));
        let center = &cs.s1[0];
        assert_eq!(center.phase_sum(&phases), C::new(0.0, 0.0));
        let f = series_field(&spec, 1).unwrap().field;
        assert_eq!(f.at(0, Node::new(0, 0)), C::new(0.0, 0.0));
    }

    #[test]
    fn series_second_order_contour_value() {
        let theta = [0.0, PI / 2.0, PI, 1.5 * PI];
        for j in 0..4 {
            assert!((-0.5 * contour_coefficient(&theta, j) + 1.5).abs() < 1e-15);
        }
    }

    #[test]
    fn vector_second_order_equal_charges() {
        // Frozen from solving the 2x2 system by hand with right-hand side 3.
        let golden = -1.1618950038622249;
        let spec = VortexSpec::vector(g(5), ChargePair::Equal, 2.0 / 3.0, 1.0);
        let sr = vector_second_order(&spec).unwrap();
        for (s, r) in sr {
            assert!((s - golden).abs() < 1e-12 && (r - golden).abs() < 1e-12);
        }
        let a = 0.6f64.sqrt();
        assert!((golden + 3.0 / (2.0 * a * (1.0 + 2.0 / 3.0))).abs() < 1e-12);
    }

    #[test]
    fn vector_second_order_singular_for_manakov() {
        let spec = VortexSpec::manakov(g(5), ChargePair::Equal, 0.3).with_epsilon(0.01);
        assert!(matches!(series_field(&spec, 2), Err(VortexError::SingularSeries(_))));
        assert!(series_field(&spec, 1).is_ok());
    }

    #[test]
    fn series_order_zero_is_seed() {
        let spec = VortexSpec::vector(g(5), ChargePair::Opposite, 0.5, 1.0).with_epsilon(0.2);
        let s = series_field(&spec, 0).unwrap().field;
        let seed = anti_continuum_seed(&spec, spec.amplitudes().unwrap()).unwrap();
        assert_eq!(s, seed);
    }

    fn series_residual(spec: &VortexSpec, order: usize) -> f64 {
        let f = series_field(spec, order).unwrap().field;
        residual(&f, spec).unwrap().norm_inf()
    }

    // The residual of the order-k partial sum must scale as ε^{k+1}.
    fn residual_order(spec: VortexSpec, order: usize) -> f64 {
        let r1 = series_residual(&spec.with_epsilon(0.02), order);
        let r2 = series_residual(&spec.with_epsilon(0.01), order);
        (r1 / r2).log2()
    }

    #[test]
    fn series_residual_orders_scalar() {
        for k in 0..=3 {
            let p = residual_order(VortexSpec::scalar(g(8)), k);
            assert!((p - (k + 1) as f64).abs() < 0.2, "order {k}: slope {p}");
        }
        let r = series_residual(&VortexSpec::scalar(g(8)).with_epsilon(0.05), 2);
        let r_half = series_residual(&VortexSpec::scalar(g(8)).with_epsilon(0.025), 2);
        assert!(r / 0.05f64.powi(3) < 6.0 && (r / r_half - 8.0).abs() < 1.2, "{r} {}", r / r_half);
    }

    #[test]
    fn series_residual_orders_vector() {
        for charges in [ChargePair::Equal, ChargePair::Opposite] {
            for (beta, omega) in [(2.0 / 3.0, 1.0), (0.3, 1.4), (2.0, 0.8)] {
                for k in 0..=2 {
                    let p = residual_order(VortexSpec::vector(g(8), charges, beta, omega), k);
                    assert!((p - (k + 1) as f64).abs() < 0.2, "{charges} beta {beta} order {k}: slope {p}");
                }
            }
        }
    }

    #[test]
    fn series_residual_orders_laplacian() {
        for k in 0..=3 {
            let p = residual_order(VortexSpec::scalar(g(8)).with_hopping(Hopping::Laplacian), k);
            assert!((p - (k + 1) as f64).abs() < 0.25, "order {k}: slope {p}");
        }
    }

    #[test]
    fn continuation_to_zero_returns_seed() {
        let spec = VortexSpec::vector(g(5), ChargePair::Opposite, 2.0 / 3.0, 1.0);
        let states = newton_continue(&spec, 0.0, 0.01).unwrap();
        assert_eq!(states.len(), 1);
        let seed = anti_continuum_seed(&spec, spec.amplitudes().unwrap()).unwrap();
        assert_eq!(states[0].field, seed);
    }

    #[test]
    fn scalar_continuation_converges() {
        let spec = VortexSpec::scalar(g(8));
        let states = newton_continue(&spec, 0.1, 0.02).unwrap();
        assert_eq!(states.len(), 6);
        let last = states.last().unwrap();
        assert!(last.residual_norm < 1e-10);
        assert!((last.epsilon() - 0.1).abs() < 1e-15);
        assert!(last.recompute_residual().unwrap() < 1e-10);
        // The four contour sites stay dominant.
        let lead = S0.iter().map(|&n| last.field.at(0, n).norm()).fold(f64::INFINITY, f64::min);
        let rest =
            spec.grid.nodes().filter(|n| !S0.contains(n)).map(|n| last.field.at(0, n).norm()).fold(0.0, f64::max);
        assert!(lead > 0.9 && rest < 0.3);
        assert_eq!(last.field.at(0, S0[0]).im, 0.0);
        assert!(check_nondegeneracy(last) > 1.0);
    }

    #[test]
    fn nondegeneracy_examples() {
        let seed = seed_state(&VortexSpec::scalar(g(5))).unwrap();
        assert!((check_nondegeneracy(&seed) - 16.0).abs() < 1e-12);
        assert_eq!(nondegeneracy(&LatticeField::zeros(g(5), 1)), 0.0);
    }

    #[test]
    fn opposite_charge_second_component_winds_backwards() {
        let spec = VortexSpec::vector(g(7), ChargePair::Opposite, 2.0 / 3.0, 1.0);
        let last = newton_continue(&spec, 0.1, 0.025).unwrap().pop().unwrap();
        assert!(last.residual_norm < 1e-10);
        let mut winding = 0.0;
        for j in 0..4 {
            let z0 = last.field.at(1, S0[j]);
            let z1 = last.field.at(1, S0[(j + 1) % 4]);
            winding += (z1 / z0).arg();
        }
        assert!((winding + 2.0 * PI).abs() < 1e-10, "{winding}");
    }

    #[test]
    fn newton_error_decays_like_series_order() {
        let spec = VortexSpec::scalar(g(8));
        let err = |eps: f64, k: usize| {
            let s = solve_at(&spec, eps, eps, &NewtonConfig::default()).unwrap();
            let f = series_field(&spec.with_epsilon(eps), k).unwrap().field;
            s.field.distance_inf(&f).unwrap()
        };
        for k in 1..=3 {
            let ratio = err(0.02, k) / err(0.01, k);
            let want = 2f64.powi(k as i32 + 1);
            assert!((ratio / want - 1.0).abs() < 0.15, "order {k}: ratio {ratio}");
        }
    }

    #[test]
    fn manakov_continuation_lifts_scalar_state() {
        let spec = VortexSpec::manakov(g(6), ChargePair::Opposite, PI / 8.0);
        let last = newton_continue(&spec, 0.06, 0.02).unwrap().pop().unwrap();
        assert!(last.residual_norm < 1e-10);
        assert!(last.recompute_residual().unwrap() < 1e-10);
        let r = last.field.at(1, S0[1]) / last.field.at(0, S0[1]).conj();
        assert!((r.re - (PI / 8.0).tan()).abs() < 1e-12 && r.im.abs() < 1e-12);
    }

    #[test]
    fn eps_grid_includes_target() {
        assert_eq!(eps_grid(0.0, 0.0, 0.01), vec![0.0]);
        let v = eps_grid(0.0, 0.05, 0.02);
        assert_eq!(v.len(), 4);
        assert_eq!(*v.last().unwrap(), 0.05);
        assert_eq!(eps_grid(0.0, 0.1, 0.02).len(), 6);
    }
}
