//! Linear stability of stationary states.
//!
//! Perturbations `Φ + δ` evolve as `δ̇ = A δ` where `A` is the real form of
//! `−iσH`. Eigenvalues of `A` are the stability exponents `λ`; `Re λ > 0`
//! means instability.

mod dynamics;
mod hh;
mod tracking;

pub use dynamics::{energy, power, validate_growth_rate, validate_growth_rate_with, GrowthConfig, GrowthFit};
pub use hh::{detect_hh, detect_hh_with, Collision, HhConfig, HhEvent, HhScan};
pub use tracking::{pair_reports, track_branch, PairingWarning, Track, TrackPoint, TrackedBranch, TrackingConfig};

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VortexError};
use crate::lattice::{Model, VortexSpec};
use crate::linearize::{dynamics_from_jacobian, expansion, slot_values};
use crate::sparse::Csr;
use crate::stationary::StationaryState;

type C = Complex64;

/// Residual above which a state is considered stale.
pub const STALE_TOL: f64 = 1e-10;
/// Relative zero threshold, scaled by `1 + ‖H‖∞`.
pub const ZERO_TOL: f64 = 1e-8;
/// Imaginary part below which Krein signatures are not assigned.
pub const KREIN_MIN_IM: f64 = 1e-8;
/// Real part below which an eigenvalue counts as purely imaginary.
pub const IMAGINARY_TOL: f64 = 1e-6;
const CLUSTER_TOL: f64 = 1e-7;
const NEGATIVE_TOL: f64 = 1e-10;

/// `H`, its real form and the generator of the linearized flow.
#[derive(Clone, Debug)]
pub struct LinearizedOperators {
    pub spec: VortexSpec,
    /// Hermitian operator on (perturbation, conjugate) pairs per slot.
    pub h: Csr<C>,
    /// Real symmetric form of `H` acting on (real, imaginary) parts.
    pub jacobian: Csr<f64>,
    /// Real form of `−iσH`.
    pub generator: Csr<f64>,
    pub sigma: Vec<f64>,
    pub h_norm: f64,
    field_slots: Vec<C>,
}

impl LinearizedOperators {
    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    /// `‖H − H*‖∞`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|r| self.h.row(r).map(|(c, v)| (v - self.h.get(c, r).conj()).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn zero_threshold(&self) -> f64 {
        ZERO_TOL * (1.0 + self.h_norm)
    }

    pub fn apply_sigma_h(&self, v: &[C]) -> Vec<C> {
        let hv = self.h.mul_vec(v);
        hv.iter().zip(&self.sigma).map(|(z, s)| z * *s).collect()
    }

    /// Phase-rotation kernel vectors `(iΦ, −iΦ̄)` per gauge, in complex form.
    pub fn gauge_kernel(&self) -> Vec<Vec<C>> {
        let nc = self.spec.components();
        (0..self.spec.gauge_count())
            .map(|g| {
                let mut v = vec![C::new(0.0, 0.0); self.dim()];
                for (k, z) in self.field_slots.iter().enumerate() {
                    if k % nc == g {
                        v[2 * k] = C::i() * z;
                        v[2 * k + 1] = -C::i() * z.conj();
                    }
                }
                v
            })
            .collect()
    }

    /// Complex-form vector of a real-form vector `(P, Q)`: `(P + iQ, P − iQ)`.
    pub fn complex_form(real_form: &[C]) -> Vec<C> {
        real_form.chunks_exact(2).flat_map(|pq| [pq[0] + C::i() * pq[1], pq[0] - C::i() * pq[1]]).collect()
    }

    pub fn dense_generator(&self) -> Mat<f64> {
        self.generator.to_dense()
    }
}

pub fn assemble_operators(state: &StationaryState) -> Result<LinearizedOperators> {
    let residual = state.recompute_residual()?;
    if residual > STALE_TOL {
        return Err(VortexError::StaleState { residual, tol: STALE_TOL });
    }
    let spec = state.spec;
    let values = slot_values(&state.field);
    let ex = expansion(&spec, &values);
    let h = ex.hermitian();
    let jacobian = ex.real_jacobian();
    let generator = dynamics_from_jacobian(&jacobian);
    let sigma = (0..h.rows()).map(|r| if r % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let h_norm = h.norm_inf_by(|z| z.norm());
    Ok(LinearizedOperators { spec, h, jacobian, generator, sigma, h_norm, field_slots: values })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KreinSign {
    Positive,
    Negative,
    /// Energy form vanishes to working precision, as at a collision.
    Indefinite,
}

impl KreinSign {
    pub fn as_i8(&self) -> i8 {
        match self {
            KreinSign::Positive => 1,
            KreinSign::Negative => -1,
            KreinSign::Indefinite => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KreinEntry {
    /// Upper-half-plane member of the pair.
    pub lambda: C,
    pub sign: KreinSign,
    /// Size of the near-degenerate cluster this member belongs to.
    pub cluster: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub krein: bool,
    pub kernel: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { krein: true, kernel: true }
    }
}

impl SpectrumOptions {
    pub fn eigenvalues_only() -> Self {
        Self { krein: false, kernel: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub epsilon: f64,
    /// Sorted by `|Im λ|`, then `Re λ`, then `Im λ`.
    pub eigenvalues: Vec<C>,
    pub krein: Vec<KreinEntry>,
    pub zero_algebraic: Option<usize>,
    pub zero_geometric: Option<usize>,
    pub n_negative_h: Option<usize>,
    pub n_constraints: usize,
    pub max_real_part: f64,
    /// Eigenvalues of `H` with modulus below 0.25, ascending.
    pub h_small: Vec<f64>,
}

impl SpectrumReport {
    /// Eigenvalue with the largest real part, choosing `Im λ ≥ 0` on ties.
    pub fn most_unstable(&self) -> Option<C> {
        self.eigenvalues.iter().copied().max_by(|a, b| a.re.total_cmp(&b.re).then_with(|| a.im.total_cmp(&b.im)))
    }

    /// Eigenvalues with `Im λ > tol` and `|Re λ| ≤ IMAGINARY_TOL`, ascending.
    pub fn imaginary_upper(&self, tol: f64) -> Vec<f64> {
        let mut v: Vec<f64> =
            self.eigenvalues.iter().filter(|z| z.im > tol && z.re.abs() <= IMAGINARY_TOL).map(|z| z.im).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Positive real parts of eigenvalues with `|Im λ| ≤ im_tol`, ascending.
    pub fn real_positive(&self, re_tol: f64, im_tol: f64) -> Vec<f64> {
        let mut v: Vec<f64> =
            self.eigenvalues.iter().filter(|z| z.re > re_tol && z.im.abs() <= im_tol).map(|z| z.re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn krein_of(&self, lambda: C) -> Option<KreinSign> {
        self.krein.iter().filter(|k| (k.lambda - lambda).norm() < 1e-9 * (1.0 + lambda.norm())).map(|k| k.sign).next()
    }
}

/// Negative directions removed by the symmetry constraints.
pub fn constraint_count(spec: &VortexSpec) -> usize {
    match spec.model {
        Model::Scalar => 1,
        Model::Vector if spec.beta < 1.0 && !spec.is_manakov() => 2,
        Model::Vector => 1,
    }
}

fn eig_error(detail: impl std::fmt::Debug, ops: &LinearizedOperators) -> VortexError {
    VortexError::Eigen { detail: format!("{detail:?}"), dim: ops.dim(), norm: ops.h_norm }
}

pub(crate) fn sort_spectrum(v: &mut [C]) {
    v.sort_by(|a, b| {
        a.im.abs().total_cmp(&b.im.abs()).then_with(|| a.re.total_cmp(&b.re)).then_with(|| a.im.total_cmp(&b.im))
    });
}

/// Pairs each eigenvalue with its nearest `−λ` partner and averages the pair.
pub(crate) fn symmetrize(raw: &[C]) -> Vec<C> {
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&i, &j| {
        raw[i]
            .im
            .abs()
            .total_cmp(&raw[j].im.abs())
            .then_with(|| raw[i].re.total_cmp(&raw[j].re))
            .then_with(|| raw[i].im.total_cmp(&raw[j].im))
    });
    let mut used = vec![false; raw.len()];
    let mut out = Vec::with_capacity(raw.len());
    for (pos, &i) in order.iter().enumerate() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut best: Option<(usize, f64)> = None;
        for &j in &order[pos + 1..] {
            if used[j] {
                continue;
            }
            let d = (raw[i] + raw[j]).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, _)) => {
                used[j] = true;
                let m = (raw[i] - raw[j]) * 0.5;
                let m = if m.re < 0.0 || (m.re == 0.0 && m.im < 0.0) { -m } else { m };
                out.push(m);
                out.push(-m);
            }
            None => out.push(raw[i]),
        }
    }
    sort_spectrum(&mut out);
    out
}

pub fn solve_spectrum(ops: &LinearizedOperators) -> Result<SpectrumReport> {
    solve_spectrum_with(ops, &SpectrumOptions::default())
}

pub fn solve_spectrum_with(ops: &LinearizedOperators, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    let a = ops.dense_generator();
    let (raw, krein) = if opts.krein {
        let eig = a.eigen().map_err(|e| eig_error(e, ops))?;
        let s = eig.S();
        let raw: Vec<C> = (0..s.dim()).map(|i| s[i]).collect();
        let krein = krein_signatures(ops, &raw, eig.U())?;
        (raw, krein)
    } else {
        (a.eigenvalues().map_err(|e| eig_error(e, ops))?, Vec::new())
    };
    let eigenvalues = symmetrize(&raw);
    let max_real_part = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);

    let (zero_algebraic, zero_geometric, n_negative_h, h_small) = if opts.kernel {
        let thr = ops.zero_threshold();
        let jac = ops.jacobian.to_dense();
        let h_eigs = jac.self_adjoint_eigenvalues(Side::Lower).map_err(|e| eig_error(e, ops))?;
        let geometric = h_eigs.iter().filter(|h| h.abs() < thr).count();
        let negative = h_eigs.iter().filter(|&&h| h < -NEGATIVE_TOL).count();
        let small = h_eigs.iter().copied().filter(|h| h.abs() < 0.25).collect();
        let algebraic = zero_algebraic(ops)?;
        (Some(algebraic), Some(geometric), Some(negative), small)
    } else {
        (None, None, None, Vec::new())
    };

    Ok(SpectrumReport {
        epsilon: ops.spec.epsilon,
        eigenvalues,
        krein,
        zero_algebraic,
        zero_geometric,
        n_negative_h,
        n_constraints: constraint_count(&ops.spec),
        max_real_part,
        h_small,
    })
}

/// Dimension of the generalized kernel of the generator.
///
/// Nested null spaces `ker Aᵏ = {v : Av ∈ ker Aᵏ⁻¹}`, each the null space of
/// `(I − WWᵀ)A` by SVD with the threshold `1e-8 (1 + ‖H‖∞)`. This sees Jordan
/// chains of any length without squaring the threshold.
pub fn zero_algebraic(ops: &LinearizedOperators) -> Result<usize> {
    let a = ops.dense_generator();
    let n = a.nrows();
    let thr = ops.zero_threshold();
    let mut basis = Mat::<f64>::zeros(n, 0);
    for _ in 0..n {
        let m = if basis.ncols() == 0 {
            a.clone()
        } else {
            let coeff = basis.transpose() * &a;
            &a - &basis * coeff
        };
        let svd = m.svd().map_err(|e| eig_error(e, ops))?;
        let s = svd.S();
        let null: Vec<usize> = (0..s.dim()).filter(|&i| s[i] < thr).collect();
        if null.len() <= basis.ncols() {
            break;
        }
        let v = svd.V();
        basis = Mat::<f64>::from_fn(n, null.len(), |r, c| v[(r, null[c])]);
    }
    Ok(basis.ncols())
}

fn krein_signatures(ops: &LinearizedOperators, raw: &[C], vectors: faer::MatRef<'_, C>) -> Result<Vec<KreinEntry>> {
    let mut idx: Vec<usize> =
        (0..raw.len()).filter(|&i| raw[i].im > KREIN_MIN_IM && raw[i].re.abs() <= IMAGINARY_TOL).collect();
    idx.sort_by(|&i, &j| raw[i].im.total_cmp(&raw[j].im));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in idx {
        match clusters.last_mut() {
            Some(cl) if (raw[i].im - raw[*cl.last().unwrap()].im).abs() <= CLUSTER_TOL * (1.0 + raw[i].im) => {
                cl.push(i)
            }
            _ => clusters.push(vec![i]),
        }
    }

    let n = ops.dim();
    let mut out = Vec::new();
    for cl in clusters {
        let phis: Vec<Vec<C>> = cl
            .iter()
            .map(|&i| {
                let col: Vec<C> = (0..n).map(|r| vectors[(r, i)]).collect();
                let phi = LinearizedOperators::complex_form(&col);
                let norm = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                phi.into_iter().map(|z| z / norm).collect()
            })
            .collect();
        let hphis: Vec<Vec<C>> = phis.iter().map(|p| ops.h.mul_vec(p)).collect();
        let k = cl.len();
        let gram = Mat::<C>::from_fn(k, k, |a, b| phis[a].iter().zip(&hphis[b]).map(|(x, y)| x.conj() * y).sum());
        let signs: Vec<f64> = if k == 1 {
            vec![gram[(0, 0)].re]
        } else {
            gram.self_adjoint_eigenvalues(Side::Lower).map_err(|e| eig_error(e, ops))?
        };
        let scale = ops.zero_threshold();
        for (pos, &i) in cl.iter().enumerate() {
            let g = signs[pos];
            let sign = if g > scale {
                KreinSign::Positive
            } else if g < -scale {
                KreinSign::Negative
            } else {
                KreinSign::Indefinite
            };
            out.push(KreinEntry { lambda: raw[i], sign, cluster: k });
        }
    }
    Ok(out)
}

/// Assembles operators and solves the spectrum for each state in parallel.
pub fn solve_many(states: &[StationaryState], opts: &SpectrumOptions) -> Result<Vec<SpectrumReport>> {
    use rayon::prelude::*;
    states.par_iter().map(|s| assemble_operators(s).and_then(|ops| solve_spectrum_with(&ops, opts))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ChargePair, GridShape, Hopping, Node, S0};
    use crate::stationary::{newton_continue, seed_state, solve_at, NewtonConfig};
    use std::f64::consts::PI;

    /// Matches every eigenvalue of `a` to a distinct nearest one in `b`.
    ///
    /// A double zero eigenvalue is a Jordan block and splits by about √(machine ε),
    /// so the zero cluster gets a looser tolerance.
    fn assert_same_spectrum(a: &[C], b: &[C], tol: f64) {
        assert_eq!(a.len(), b.len());
        let mut used = vec![false; b.len()];
        for x in a {
            let (k, d) = b
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .map(|(k, y)| (k, (x - y).norm()))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            let t = if x.norm() < 1e-6 { 1e-6 } else { tol };
            assert!(d < t, "{x} unmatched (nearest {})", b[k]);
            used[k] = true;
        }
    }

    fn g(n: usize) -> GridShape {
        GridShape::new(n).unwrap()
    }

    fn block(ops: &LinearizedOperators, node: Node) -> [[C; 2]; 2] {
        let i = ops.spec.grid.interior_index(node).unwrap();
        std::array::from_fn(|r| std::array::from_fn(|c| ops.h.get(2 * i + r, 2 * i + c)))
    }

    #[test]
    fn seed_blocks() {
        let ops = assemble_operators(&seed_state(&VortexSpec::scalar(g(5))).unwrap()).unwrap();
        for (j, &nd) in S0.iter().enumerate() {
            let b = block(&ops, nd);
            let e2 = crate::lattice::quarter_turn(2 * j as i32);
            assert_eq!(b[0][0], C::new(-1.0, 0.0));
            assert!((b[0][1] + e2).norm() < 1e-15 && (b[1][0] + e2.conj()).norm() < 1e-15);
            // eigenvalues of [[-1, -z],[-z̄, -1]] with |z| = 1 are 0 and -2
            let tr = b[0][0] + b[1][1];
            let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
            assert!((tr + 2.0).norm() < 1e-15 && det.norm() < 1e-15);
        }
        let b = block(&ops, Node::new(2, 2));
        assert_eq!(b, [[C::new(1.0, 0.0), C::new(0.0, 0.0)], [C::new(0.0, 0.0), C::new(1.0, 0.0)]]);
    }

    #[test]
    fn hermitian_assembly() {
        let state = solve_at(&VortexSpec::scalar(g(6)), 0.1, 0.05, &NewtonConfig::default()).unwrap();
        let ops = assemble_operators(&state).unwrap();
        assert!(ops.hermitian_defect() < 1e-12);
    }

    #[test]
    fn stale_state_is_rejected() {
        let mut state = seed_state(&VortexSpec::scalar(g(5))).unwrap();
        state.spec.epsilon = 0.1;
        assert!(matches!(assemble_operators(&state), Err(VortexError::StaleState { .. })));
    }

    #[test]
    fn jacobian_and_hermitian_form_share_eigenvalues() {
        let spec = VortexSpec::vector(g(4), ChargePair::Opposite, 0.6, 1.0);
        let state = solve_at(&spec, 0.15, 0.05, &NewtonConfig::default()).unwrap();
        let ops = assemble_operators(&state).unwrap();
        let mut a = ops.jacobian.to_dense().self_adjoint_eigenvalues(Side::Lower).unwrap();
        let mut b = ops.h.to_dense().self_adjoint_eigenvalues(Side::Lower).unwrap();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    // Brute force: eigenvalues of the dense complex σH, rotated by −i, must agree
    // with the real-form generator.
    #[test]
    fn generator_matches_sigma_h() {
        let spec = VortexSpec::scalar(g(4)).with_hopping(Hopping::Laplacian);
        let state = solve_at(&spec, 0.2, 0.05, &NewtonConfig::default()).unwrap();
        let ops = assemble_operators(&state).unwrap();
        let mut sh = ops.h.to_dense();
        for r in 0..sh.nrows() {
            for c in 0..sh.ncols() {
                sh[(r, c)] *= ops.sigma[r];
            }
        }
        let brute: Vec<C> = sh.eigenvalues().unwrap().into_iter().map(|z| z * -C::i()).collect();
        let brute = symmetrize(&brute);
        let report = solve_spectrum_with(&ops, &SpectrumOptions::eigenvalues_only()).unwrap();
        assert_same_spectrum(&brute, &report.eigenvalues, 1e-9);
    }

    #[test]
    fn quartet_symmetry() {
        let spec = VortexSpec::vector(g(5), ChargePair::Equal, 2.0, 1.0);
        let state = solve_at(&spec, 0.05, 0.025, &NewtonConfig::default()).unwrap();
        let r =
            solve_spectrum_with(&assemble_operators(&state).unwrap(), &SpectrumOptions::eigenvalues_only()).unwrap();
        for &l in &r.eigenvalues {
            assert!(r.eigenvalues.iter().any(|&m| (m + l).norm() < 1e-8));
            assert!(r.eigenvalues.iter().any(|&m| (m - l.conj()).norm() < 1e-8));
        }
        assert!(r.max_real_part > 1e-4);
    }

    #[test]
    fn gauge_kernel_vectors() {
        for spec in [VortexSpec::scalar(g(6)), VortexSpec::vector(g(6), ChargePair::Opposite, 0.5, 1.0)] {
            let state = solve_at(&spec, 0.1, 0.05, &NewtonConfig::default()).unwrap();
            let ops = assemble_operators(&state).unwrap();
            let ks = ops.gauge_kernel();
            assert_eq!(ks.len(), spec.gauge_count());
            for k in ks {
                let r = ops.apply_sigma_h(&k);
                assert!(r.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-8);
            }
        }
    }

    #[test]
    fn scalar_spectrum_small_coupling() {
        let spec = VortexSpec::scalar(g(8));
        let state = solve_at(&spec, 0.05, 0.025, &NewtonConfig::default()).unwrap();
        let r = solve_spectrum(&assemble_operators(&state).unwrap()).unwrap();
        assert_eq!(r.zero_algebraic, Some(2));
        assert_eq!(r.zero_geometric, Some(1));
        assert_eq!(r.n_negative_h, Some(7));
        let small: Vec<f64> = r.imaginary_upper(1e-6).into_iter().filter(|&y| y < 0.5).collect();
        assert_eq!(small.len(), 3);
        assert!((small[0] / 0.01 - 1.0).abs() < 0.15);
        assert!((small[1] / 0.1 - 1.0).abs() < 0.05 && (small[2] / 0.1 - 1.0).abs() < 0.05);
        for &y in &small {
            assert_eq!(
                r.krein_of(C::new(0.0, y))
                    .or_else(|| { r.krein.iter().find(|k| (k.lambda.im - y).abs() < 1e-9).map(|k| k.sign) }),
                Some(KreinSign::Negative)
            );
        }
        // Only the split Jordan block at zero may leave the axis.
        assert!(r.max_real_part < 1e-7, "{}", r.max_real_part);
        assert!(r.eigenvalues.iter().filter(|z| z.re.abs() > 1e-12).all(|z| z.norm() < 1e-6));
    }

    #[test]
    fn manakov_equal_charges_decouples() {
        let grid = g(4);
        let eps = 0.08;
        let m = solve_at(&VortexSpec::manakov(grid, ChargePair::Equal, PI / 5.0), eps, 0.04, &NewtonConfig::default())
            .unwrap();
        let s = solve_at(&VortexSpec::scalar(grid), eps, 0.04, &NewtonConfig::default()).unwrap();
        let full = solve_spectrum_with(&assemble_operators(&m).unwrap(), &SpectrumOptions::eigenvalues_only()).unwrap();
        let scalar =
            solve_spectrum_with(&assemble_operators(&s).unwrap(), &SpectrumOptions::eigenvalues_only()).unwrap();
        let mut union = scalar.eigenvalues.clone();
        // Self-adjoint block (1 − |Φ|²) − εΣ, whose eigenvalues μ give λ = ±iμ.
        let nodes: Vec<Node> = grid.interior().collect();
        let l = Mat::<f64>::from_fn(nodes.len(), nodes.len(), |r, c| {
            let (a, b) = (nodes[r], nodes[c]);
            if a == b {
                1.0 - s.field.at(0, a).norm_sqr()
            } else if (a.n - b.n).abs() + (a.m - b.m).abs() == 1 {
                -eps
            } else {
                0.0
            }
        });
        for mu in l.self_adjoint_eigenvalues(Side::Lower).unwrap() {
            union.push(C::new(0.0, mu));
            union.push(C::new(0.0, -mu));
        }
        sort_spectrum(&mut union);
        assert_same_spectrum(&union, &full.eigenvalues, 1e-8);
    }

    #[test]
    fn continuation_reports_are_deterministic() {
        let spec = VortexSpec::scalar(g(5));
        let states = newton_continue(&spec, 0.04, 0.02).unwrap();
        let a = solve_many(&states, &SpectrumOptions::eigenvalues_only()).unwrap();
        let b = solve_many(&states, &SpectrumOptions::eigenvalues_only()).unwrap();
        assert_eq!(a, b);
    }
}
