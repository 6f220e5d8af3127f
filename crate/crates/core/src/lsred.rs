//! Closed-form reductions near the anti-continuum limit.
//!
//! Bifurcation functions, reduction matrices and the small-eigenvalue
//! asymptotics of the vortex cross for every coupling regime. Contour indices
//! `j` are 0-based here and wrap modulo 4.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VortexError};
use crate::lattice::{ChargePair, Hopping};
use crate::stationary::solve_amplitudes;

type C = Complex64;
pub type Mat4 = [[f64; 4]; 4];

const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    pub theta: [f64; 4],
    pub nu: Option<[f64; 4]>,
}

impl PhaseVector {
    pub fn cross() -> Self {
        Self { theta: std::array::from_fn(|j| FRAC_PI_2 * j as f64), nu: None }
    }

    pub fn cross_vector(charges: ChargePair) -> Self {
        let s = charges.sign() as f64;
        Self { nu: Some(std::array::from_fn(|j| s * FRAC_PI_2 * j as f64)), ..Self::cross() }
    }

    /// `(0, θ, π, π + θ)`.
    pub fn asymmetric(theta: f64) -> Self {
        let pi = std::f64::consts::PI;
        Self { theta: [0.0, theta, pi, pi + theta], nu: None }
    }

    pub fn from_theta(theta: [f64; 4]) -> Self {
        Self { theta, nu: None }
    }
}

fn at(t: &[f64; 4], j: usize, k: isize) -> f64 {
    t[(j as isize + k).rem_euclid(4) as usize]
}

/// Second-order bifurcation function.
pub fn g2(phases: &PhaseVector) -> [f64; 4] {
    let t = &phases.theta;
    std::array::from_fn(|j| {
        let tj = t[j];
        2.0 * (tj - at(t, j, 1)).sin() + 2.0 * (tj - at(t, j, -1)).sin() + (tj - at(t, j, 2)).sin()
    })
}

/// Fourth-order bifurcation function.
pub fn g4(phases: &PhaseVector) -> [f64; 4] {
    let t = &phases.theta;
    let mut pair_cos = 0.0;
    for a in 0..4 {
        for b in a + 1..4 {
            pair_cos += (t[b] - t[a]).cos();
        }
    }
    std::array::from_fn(|j| {
        let th = |k: isize| at(t, j, k);
        let tj = t[j];
        let coef = |p: f64, q: f64, r: f64| 4.0 + 2.0 * p.cos() + 2.0 * q.cos() + r.cos();
        let mut v = coef(th(2) - th(1), tj - th(1), th(-1) - th(1)) * (th(1) - tj).sin();
        v += coef(th(-2) - th(-1), tj - th(-1), th(1) - th(-1)) * (th(-1) - tj).sin();
        v += 0.5 * coef(th(-1) - th(-2), th(1) - th(2), tj - th(2)) * (th(2) - tj).sin();
        v += 0.5 * coef(th(1) - th(2), th(-1) - th(-2), tj - th(-2)) * (th(-2) - tj).sin();
        v += 2.0 * (1.0 + (th(1) - tj).cos()) * (tj - th(1)).sin();
        v += 2.0 * (1.0 + (th(-1) - tj).cos()) * (tj - th(-1)).sin();
        v += 2.0 * (2.0 + pair_cos) * ((tj - th(1)).sin() + (tj - th(-1)).sin() + (tj - th(2)).sin());
        v += 4.0 * (tj - th(1)).sin() + 4.0 * (tj - th(-1)).sin();
        v
    })
}

pub const P1: [f64; 4] = [1.0, 1.0, 1.0, 1.0];
pub const P2: [f64; 4] = [-1.0, 1.0, -1.0, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionMatrices {
    pub m2: Mat4,
    pub m4: Mat4,
    pub p1: [f64; 4],
    pub p2: [f64; 4],
}

impl ReductionMatrices {
    pub fn cross() -> Self {
        Self { m2: m2_matrix(FRAC_PI_2).0, m4: m4_matrix(), p1: P1, p2: P2 }
    }
}

/// Jacobian of `g2` on the asymmetric family, with its eigenvalues `{0, 0, −2 ± 4cos θ}`.
pub fn m2_matrix(theta: f64) -> (Mat4, [f64; 4]) {
    let c = 2.0 * theta.cos();
    let m = [[-1.0, -c, 1.0, c], [-c, -1.0, c, 1.0], [1.0, c, -1.0, -c], [c, 1.0, -c, -1.0]];
    let mut e = [0.0, 0.0, -2.0 + 2.0 * c, -2.0 - 2.0 * c];
    e.sort_by(f64::total_cmp);
    (m, e)
}

/// Jacobian of `g4` at the vortex cross.
pub fn m4_matrix() -> Mat4 {
    [[3.0, 2.0, -7.0, 2.0], [2.0, 3.0, 2.0, -7.0], [-7.0, 2.0, 3.0, 2.0], [2.0, -7.0, 2.0, 3.0]]
}

pub fn mat_vec(m: &Mat4, v: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| (0..4).map(|k| m[i][k] * v[k]).sum())
}

pub fn rayleigh(m: &Mat4, v: &[f64; 4]) -> f64 {
    let mv = mat_vec(m, v);
    let num: f64 = (0..4).map(|i| v[i] * mv[i]).sum();
    let den: f64 = v.iter().map(|x| x * x).sum();
    num / den
}

/// Eigenvalues of a real symmetric 4×4 matrix, ascending.
pub fn symmetric_eigenvalues(m: &Mat4) -> [f64; 4] {
    let a = faer::Mat::<f64>::from_fn(4, 4, |i, j| m[i][j]);
    let e = a.self_adjoint_eigenvalues(faer::Side::Lower).expect("4x4 symmetric eigensolve");
    std::array::from_fn(|i| e[i])
}

/// Eigenvalues of `ε²M2 + ε⁴M4` at the cross, ascending.
pub fn extended_problem(epsilon: f64) -> [f64; 4] {
    let (m2, m4) = (m2_matrix(FRAC_PI_2).0, m4_matrix());
    let e2 = epsilon * epsilon;
    let m: Mat4 = std::array::from_fn(|i| std::array::from_fn(|j| e2 * m2[i][j] + e2 * e2 * m4[i][j]));
    symmetric_eigenvalues(&m)
}

/// Circulant `α_j + α_{j+2} + 2(α_{j+1} + α_{j−1})` and its eigenvalues `{−2, 0, 0, 6}`.
pub fn circulant_reduced_problem() -> (Mat4, [f64; 4]) {
    let m = std::array::from_fn(|i| {
        std::array::from_fn(|j| match (j + 4 - i) % 4 {
            0 | 2 => 1.0,
            _ => 2.0,
        })
    });
    (m, [-2.0, 0.0, 0.0, 6.0])
}

/// Coefficients `(A₊, B₊, A₋, B₋)` of the generalized kernel vectors.
pub fn generalized_kernel_coefficients(a: f64, b: f64, beta: f64) -> (f64, f64, f64, f64) {
    let d = 1.0 - beta * beta;
    let ap = 1.0 / (a * a * d);
    let bp = -beta / (a * b * d);
    (ap, bp, bp, 1.0 / (b * b * d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictedKind {
    NegativeKrein,
    PositiveKrein,
    RealPair,
    ComplexQuartet,
    /// Leading coefficient vanishes.
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub label: String,
    pub leading_coeff: C,
    /// Power of `ε`.
    pub order: u32,
    pub kind: PredictedKind,
    /// `leading_coeff · ε^order` in the units of the requested convention.
    pub value: C,
}

impl AsymptoticPrediction {
    fn new(label: &str, coeff: C, order: u32, kind: PredictedKind, epsilon: f64) -> Self {
        Self { label: label.to_string(), leading_coeff: coeff, order, kind, value: coeff * epsilon.powi(order as i32) }
    }

    pub fn is_imaginary(&self) -> bool {
        matches!(self.kind, PredictedKind::NegativeKrein | PredictedKind::PositiveKrein)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    pub epsilon: f64,
    pub pairs: Vec<AsymptoticPrediction>,
    /// Small eigenvalues of the linearized Jacobian, `(label, value)`.
    pub gammas: Vec<(String, f64)>,
    pub zero_algebraic: Option<usize>,
    pub zero_geometric: Option<usize>,
    pub stability: Option<ManakovStability>,
}

impl PredictionSet {
    /// Re-expresses the prediction for the `Laplacian` convention through the
    /// exact rescaling `ε' = ε/(1+4ε)`, `λ = (1+4ε) λ'(ε')`.
    pub fn in_hopping(mut self, hopping: Hopping) -> Self {
        if hopping == Hopping::Laplacian {
            let eps = self.epsilon;
            let red = hopping.reduced_epsilon(eps);
            let scale = hopping.eigen_scale(eps);
            for p in &mut self.pairs {
                p.value = p.leading_coeff * red.powi(p.order as i32) * scale;
            }
            self.gammas.clear();
        }
        self
    }

    pub fn values(&self) -> Vec<C> {
        self.pairs.iter().map(|p| p.value).collect()
    }
}

fn imag(y: f64) -> C {
    C::new(0.0, y)
}

pub fn predict_scalar(epsilon: f64) -> PredictionSet {
    let e2 = epsilon * epsilon;
    PredictionSet {
        epsilon,
        pairs: vec![
            AsymptoticPrediction::new("lambda_1_2", imag(2.0), 1, PredictedKind::NegativeKrein, epsilon),
            AsymptoticPrediction::new("lambda_3_4", imag(2.0), 1, PredictedKind::NegativeKrein, epsilon),
            AsymptoticPrediction::new("lambda_5_6", imag(4.0), 2, PredictedKind::NegativeKrein, epsilon),
        ],
        gammas: vec![
            ("gamma_1".into(), -2.0 * e2),
            ("gamma_2".into(), -2.0 * e2),
            ("gamma_3".into(), -8.0 * e2 * e2),
            ("gamma_4".into(), 0.0),
        ],
        zero_algebraic: Some(2),
        zero_geometric: Some(1),
        stability: None,
    }
}

/// Roots of `(γ + 2a²)(γ + 2b²) = 4a²b²β²`, more negative first.
pub fn vector_gamma_roots(a: f64, b: f64, beta: f64) -> [f64; 2] {
    let (a2, b2) = (a * a, b * b);
    let disc = ((a2 - b2).powi(2) + 4.0 * a2 * b2 * beta * beta).sqrt();
    [-(a2 + b2) - disc, -(a2 + b2) + disc]
}

fn pair_from_gamma(
    label: &str,
    gamma: f64,
    order: u32,
    epsilon: f64,
    imaginary_kind: PredictedKind,
) -> AsymptoticPrediction {
    if gamma < 0.0 {
        AsymptoticPrediction::new(label, imag((-2.0 * gamma).sqrt()), order, imaginary_kind, epsilon)
    } else if gamma > 0.0 {
        AsymptoticPrediction::new(label, C::new((2.0 * gamma).sqrt(), 0.0), order, PredictedKind::RealPair, epsilon)
    } else {
        AsymptoticPrediction::new(label, C::new(0.0, 0.0), order, PredictedKind::Zero, epsilon)
    }
}

/// Small eigenvalues of the two-component cross for `β ≠ 1`.
///
/// Fourth-order pairs and the Jacobian eigenvalues `γ₅, γ₆` are only known for `ω = 1`.
pub fn predict_vector(beta: f64, omega: f64, charges: ChargePair, epsilon: f64) -> Result<PredictionSet> {
    if (beta - 1.0).abs() < 1e-12 {
        return Err(VortexError::ManakovRegime);
    }
    let amps = solve_amplitudes(beta, omega, None)?;
    let [g_lo, g_hi] = vector_gamma_roots(amps.a, amps.b, beta);
    let neg = PredictedKind::NegativeKrein;
    let mut pairs = vec![
        pair_from_gamma("lambda_1_2", g_lo, 1, epsilon, neg),
        pair_from_gamma("lambda_3_4", g_lo, 1, epsilon, neg),
        pair_from_gamma("lambda_5_6", g_hi, 1, epsilon, neg),
        pair_from_gamma("lambda_7_8", g_hi, 1, epsilon, neg),
    ];
    let e2 = epsilon * epsilon;
    let mut gammas = Vec::new();
    let unit_omega = (omega - 1.0).abs() < 1e-12;
    if unit_omega {
        let q = (1.0 - beta) / (1.0 + beta);
        match charges {
            ChargePair::Equal => {
                pairs.push(AsymptoticPrediction::new("lambda_9_10", imag(4.0), 2, neg, epsilon));
                let kind = if beta > 1.0 { PredictedKind::PositiveKrein } else { neg };
                pairs.push(AsymptoticPrediction::new("lambda_11_12", imag(4.0 * q.abs()), 2, kind, epsilon));
            }
            ChargePair::Opposite => {
                for label in ["lambda_9_10", "lambda_11_12"] {
                    let p = if q >= 0.0 {
                        AsymptoticPrediction::new(label, imag(4.0 * q.sqrt()), 2, neg, epsilon)
                    } else {
                        AsymptoticPrediction::new(
                            label,
                            C::new(4.0 * (-q).sqrt(), 0.0),
                            2,
                            PredictedKind::RealPair,
                            epsilon,
                        )
                    };
                    pairs.push(p);
                }
            }
        }
        for k in 1..=4 {
            gammas.push((format!("gamma_{k}"), -2.0 * e2));
        }
        gammas.push(("gamma_5".into(), -8.0 * e2 * e2));
        gammas.push(("gamma_6".into(), -8.0 * q * e2 * e2));
    }
    Ok(PredictionSet { epsilon, pairs, gammas, zero_algebraic: Some(4), zero_geometric: Some(2), stability: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManakovStability {
    Stable,
    /// Double negative root of the quartic: boundary of the instability interval.
    Marginal,
    Unstable,
}

/// Roots of `γ² + 4(1 + 4cos4δ)γ + 36 = 0`.
pub fn manakov_quartic_roots(delta: f64) -> [C; 2] {
    let p = 4.0 * (1.0 + 4.0 * (4.0 * delta).cos());
    let disc = C::new(p * p - 144.0, 0.0).sqrt();
    [(-p - disc) * 0.5, (-p + disc) * 0.5]
}

/// `cos 4δ + cos 8δ`; the quartic has complex roots where this is negative.
pub fn manakov_discriminant(delta: f64) -> f64 {
    (4.0 * delta).cos() + (8.0 * delta).cos()
}

pub fn manakov_stability(delta: f64) -> ManakovStability {
    const TOL: f64 = 1e-9;
    let d = manakov_discriminant(delta);
    let roots = manakov_quartic_roots(delta);
    if d < -TOL || roots.iter().any(|g| g.re > 0.0) {
        ManakovStability::Unstable
    } else if d.abs() <= TOL {
        ManakovStability::Marginal
    } else {
        ManakovStability::Stable
    }
}

pub fn predict_manakov(delta: f64, charges: ChargePair, epsilon: f64) -> PredictionSet {
    let neg = PredictedKind::NegativeKrein;
    let mut pairs = vec![
        AsymptoticPrediction::new("lambda_1_2", imag(2.0), 1, neg, epsilon),
        AsymptoticPrediction::new("lambda_3_4", imag(2.0), 1, neg, epsilon),
    ];
    match charges {
        ChargePair::Equal => {
            pairs.push(AsymptoticPrediction::new("lambda_5_6", imag(2.0), 2, PredictedKind::PositiveKrein, epsilon));
            pairs.push(AsymptoticPrediction::new("lambda_7_8", imag(6.0), 2, neg, epsilon));
            pairs.push(AsymptoticPrediction::new("lambda_9_10", imag(4.0), 2, neg, epsilon));
            PredictionSet {
                epsilon,
                pairs,
                gammas: Vec::new(),
                zero_algebraic: Some(6),
                zero_geometric: Some(5),
                stability: Some(ManakovStability::Stable),
            }
        }
        ChargePair::Opposite => {
            let roots = manakov_quartic_roots(delta);
            let stability = manakov_stability(delta);
            let complex = manakov_discriminant(delta) < -1e-9;
            for (k, label) in [(0usize, "lambda_5_6"), (1, "lambda_7_8")] {
                let g = roots[k];
                let p = if complex {
                    let mut z = (g * 2.0).sqrt();
                    if z.re < 0.0 {
                        z = -z;
                    }
                    AsymptoticPrediction::new(label, z, 2, PredictedKind::ComplexQuartet, epsilon)
                } else {
                    // The more negative root carries negative energy.
                    let kind = if k == 0 { neg } else { PredictedKind::PositiveKrein };
                    pair_from_gamma(label, g.re, 2, epsilon, kind)
                };
                pairs.push(p);
            }
            let c2 = 4.0 * (2.0 * delta).cos();
            let kind = if c2.abs() < 1e-12 { PredictedKind::Zero } else { neg };
            pairs.push(AsymptoticPrediction::new("lambda_9_10", imag(c2.abs()), 2, kind, epsilon));
            let quarter = (delta - std::f64::consts::FRAC_PI_4).abs() < 1e-12;
            PredictionSet {
                epsilon,
                pairs,
                gammas: Vec::new(),
                zero_algebraic: Some(if quarter { 8 } else { 6 }),
                zero_geometric: Some(5),
                stability: Some(stability),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn jacobian(f: fn(&PhaseVector) -> [f64; 4], at: [f64; 4]) -> Mat4 {
        let h = 1e-6;
        let mut m = [[0.0; 4]; 4];
        for k in 0..4 {
            let mut p = at;
            let mut q = at;
            p[k] += h;
            q[k] -= h;
            let (fp, fq) = (f(&PhaseVector::from_theta(p)), f(&PhaseVector::from_theta(q)));
            for i in 0..4 {
                m[i][k] = (fp[i] - fq[i]) / (2.0 * h);
            }
        }
        m
    }

    #[test]
    fn g2_and_g4_vanish_on_cross() {
        for v in g2(&PhaseVector::cross()).into_iter().chain(g4(&PhaseVector::cross())) {
            assert!(v.abs() < 1e-12);
        }
        for v in g4(&PhaseVector::from_theta([0.0; 4])) {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn g2_off_family_direct_value() {
        // Direct trigonometric evaluation for θ = (0, π/3, π, π).
        let t = [0.0, PI / 3.0, PI, PI];
        let brute: Vec<f64> = (0..4)
            .map(|j| {
                let (a, b, c) = (t[(j + 1) % 4], t[(j + 3) % 4], t[(j + 2) % 4]);
                2.0 * (t[j] - a).sin() + 2.0 * (t[j] - b).sin() + (t[j] - c).sin()
            })
            .collect();
        let golden = [-1.7320508075688776, -0.8660254037844383, 1.7320508075688772, 0.8660254037844387];
        let got = g2(&PhaseVector::from_theta(t));
        for j in 0..4 {
            assert!(close(got[j], brute[j], 1e-12) && close(got[j], golden[j], 1e-12));
        }
        assert!(got.iter().any(|v| v.abs() > 0.1));
    }

    #[test]
    fn g4_on_asymmetric_family() {
        let got = g4(&PhaseVector::asymmetric(PI / 6.0));
        let s3 = 3f64.sqrt();
        let want = [-s3, s3, -s3, s3];
        for j in 0..4 {
            assert!(close(got[j], want[j], 1e-12), "{got:?}");
        }
    }

    proptest! {
        #[test]
        fn asymmetric_family_values(theta in 0.0f64..PI) {
            let p = PhaseVector::asymmetric(theta);
            let a = g2(&p);
            let b = g4(&p);
            for j in 0..4 {
                prop_assert!(a[j].abs() < 1e-12);
                let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
                prop_assert!((b[j] - sign * 2.0 * (2.0 * theta).sin()).abs() < 1e-12);
            }
        }

        #[test]
        fn m2_spectrum(theta in 0.0f64..PI) {
            let (m, exact) = m2_matrix(theta);
            let num = symmetric_eigenvalues(&m);
            for i in 0..4 {
                prop_assert!((num[i] - exact[i]).abs() < 1e-12);
            }
            let fd = jacobian(g2, PhaseVector::asymmetric(theta).theta);
            for i in 0..4 {
                for k in 0..4 {
                    prop_assert!((fd[i][k] - m[i][k]).abs() < 1e-8);
                }
            }
        }

        #[test]
        fn g4_orthogonal_to_p2_only_at_exceptional_points(theta in 0.01f64..(PI - 0.01)) {
            prop_assume!((theta - PI / 2.0).abs() > 0.01);
            let g = g4(&PhaseVector::asymmetric(theta));
            let dot: f64 = (0..4).map(|j| g[j] * P2[j]).sum();
            prop_assert!(dot.abs() > 1e-3);
        }

        #[test]
        fn quadratic_roots_satisfy_definition(beta in 0.0f64..4.0, t in 0.0f64..1.0) {
            prop_assume!((beta - 1.0).abs() > 1e-3);
            let (lo, hi) = if beta == 0.0 { (0.1, 3.0) } else { (beta.min(1.0 / beta), beta.max(1.0 / beta)) };
            let omega = lo + t * (hi - lo);
            let amps = solve_amplitudes(beta, omega, None).unwrap();
            let (a2, b2) = (amps.a * amps.a, amps.b * amps.b);
            for g in vector_gamma_roots(amps.a, amps.b, beta) {
                let r = (g + 2.0 * a2) * (g + 2.0 * b2) - 4.0 * a2 * b2 * beta * beta;
                prop_assert!(r.abs() < 1e-12 * (a2 + b2).powi(2));
            }
        }

        #[test]
        fn quartic_roots_satisfy_definition(delta in 0.0f64..(PI / 2.0)) {
            let p = 4.0 * (1.0 + 4.0 * (4.0 * delta).cos());
            for g in manakov_quartic_roots(delta) {
                prop_assert!((g * g + g * p + 36.0).norm() < 1e-12);
            }
        }

        #[test]
        fn manakov_spectrum_symmetric_under_reflection(delta in 0.0f64..(PI / 2.0), eps in 0.0f64..0.2) {
            let a = predict_manakov(delta, ChargePair::Opposite, eps);
            let b = predict_manakov(PI / 2.0 - delta, ChargePair::Opposite, eps);
            for (x, y) in a.pairs.iter().zip(&b.pairs) {
                prop_assert!((x.value - y.value).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn m2_examples() {
        let e = m2_matrix(PI / 2.0).1;
        assert!(close(e[0], -2.0, 1e-12) && close(e[1], -2.0, 1e-12) && e[2] == 0.0 && e[3] == 0.0);
        assert_eq!(m2_matrix(0.0).1, [-6.0, 0.0, 0.0, 2.0]);
        let e = symmetric_eigenvalues(&m2_matrix(PI / 3.0).0);
        assert!(close(e[0], -4.0, 1e-12) && e[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn reduction_matrices_at_cross() {
        let r = ReductionMatrices::cross();
        assert!(mat_vec(&r.m2, &P1).iter().chain(mat_vec(&r.m2, &P2).iter()).all(|v| v.abs() < 1e-12));
        assert_eq!(mat_vec(&r.m4, &P1), [0.0; 4]);
        assert_eq!(mat_vec(&r.m4, &P2), P2.map(|x| -8.0 * x));
        assert_eq!(rayleigh(&r.m4, &P2), -8.0);
        let fd2 = jacobian(g2, PhaseVector::cross().theta);
        let fd4 = jacobian(g4, PhaseVector::cross().theta);
        for i in 0..4 {
            for k in 0..4 {
                assert!(close(fd2[i][k], r.m2[i][k], 1e-8));
                assert!(close(fd4[i][k], r.m4[i][k], 1e-7), "{i}{k}: {} vs {}", fd4[i][k], r.m4[i][k]);
            }
        }
    }

    #[test]
    fn extended_problem_small_eigenvalues() {
        let e = extended_problem(0.1);
        assert!(close(e[2], -8e-4, 1e-12));
        assert!(close(e[3], 0.0, 1e-15));
        // M4 acts as 10 on the −2 eigenspace of M2, so γ₁,₂ = −2ε² + 10ε⁴ exactly.
        assert!(close(e[0], -0.019, 1e-12) && close(e[1], -0.019, 1e-12));
    }

    #[test]
    fn circulant_spectrum() {
        let (m, exact) = circulant_reduced_problem();
        let num = symmetric_eigenvalues(&m);
        for i in 0..4 {
            assert!(close(num[i], exact[i], 1e-12));
        }
        assert_eq!(mat_vec(&m, &P1), P1.map(|x| 6.0 * x));
        assert_eq!(mat_vec(&m, &P2), P2.map(|x| -2.0 * x));
    }

    #[test]
    fn quartic_double_root_at_quarter() {
        let [a, b] = manakov_quartic_roots(PI / 4.0);
        assert!((a - 6.0).norm() < 1e-6 && (b - 6.0).norm() < 1e-6);
        // (γ − 6)² = γ² − 12γ + 36
        assert!((4.0 * (1.0 + 4.0 * (PI).cos()) + 12.0).abs() < 1e-12);
        let [a, b] = manakov_quartic_roots(PI / 12.0);
        assert!((a - b).norm() < 1e-6 && a.re < 0.0);
    }

    #[test]
    fn scalar_predictions() {
        let p = predict_scalar(0.1);
        let v = p.values();
        assert!((v[0] - imag(0.2)).norm() < 1e-15 && (v[1] - imag(0.2)).norm() < 1e-15);
        assert!((v[2] - imag(0.04)).norm() < 1e-15);
        assert!(p.pairs.iter().all(|q| q.kind == PredictedKind::NegativeKrein));
        let g: Vec<f64> = p.gammas.iter().map(|x| x.1).collect();
        assert!(close(g[0], -0.02, 1e-15) && close(g[2], -8e-4, 1e-15) && g[3] == 0.0);
        assert!(predict_scalar(0.0).values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn vector_predictions_hidden_charge() {
        let p = predict_vector(2.0 / 3.0, 1.0, ChargePair::Opposite, 0.1).unwrap();
        let v = p.values();
        let s = (0.2f64).sqrt();
        assert!((v[0] - imag(0.2)).norm() < 1e-12 && (v[1] - imag(0.2)).norm() < 1e-12);
        assert!((v[2] - imag(0.2 * s)).norm() < 1e-12 && (v[3] - imag(0.2 * s)).norm() < 1e-12);
        assert!((v[2].im - 0.08944).abs() < 1e-5);
        assert!((v[4] - imag(0.04 * s)).norm() < 1e-12 && (v[5].im - 0.017889).abs() < 1e-6);
    }

    #[test]
    fn vector_predictions_double_charge() {
        let p = predict_vector(2.0 / 3.0, 1.0, ChargePair::Equal, 0.1).unwrap();
        let v = p.values();
        assert!((v[4] - imag(0.04)).norm() < 1e-12 && (v[5] - imag(0.008)).norm() < 1e-12);
    }

    #[test]
    fn vector_predictions_strong_coupling() {
        for charges in [ChargePair::Equal, ChargePair::Opposite] {
            let p = predict_vector(2.0, 1.0, charges, 0.1).unwrap();
            for q in &p.pairs[2..4] {
                assert_eq!(q.kind, PredictedKind::RealPair);
                assert!((q.value.re - 0.2 / 3f64.sqrt()).abs() < 1e-12 && (q.value.re - 0.11547).abs() < 1e-5);
            }
        }
        let p = predict_vector(2.0, 1.0, ChargePair::Opposite, 0.1).unwrap();
        assert!(p.pairs[4..].iter().all(|q| q.kind == PredictedKind::RealPair));
        let p = predict_vector(2.0, 1.0, ChargePair::Equal, 0.1).unwrap();
        assert_eq!(p.pairs[5].kind, PredictedKind::PositiveKrein);
    }

    #[test]
    fn vector_predictions_decoupled_limit() {
        let s = predict_scalar(0.07).values();
        for charges in [ChargePair::Equal, ChargePair::Opposite] {
            let v = predict_vector(0.0, 1.0, charges, 0.07).unwrap().values();
            for vk in &v[..4] {
                assert!((vk - s[0]).norm() < 1e-14);
            }
            assert!((v[4] - s[2]).norm() < 1e-14 && (v[5] - s[2]).norm() < 1e-14);
        }
    }

    #[test]
    fn vector_prediction_errors() {
        assert!(matches!(predict_vector(1.0, 1.0, ChargePair::Equal, 0.1), Err(VortexError::ManakovRegime)));
        assert!(matches!(predict_vector(2.0, 0.3, ChargePair::Equal, 0.1), Err(VortexError::ExistenceDomain { .. })));
        let p = predict_vector(0.5, 1.5, ChargePair::Equal, 0.1).unwrap();
        assert_eq!(p.pairs.len(), 4);
    }

    #[test]
    fn vector_seam_towards_manakov() {
        let p = predict_vector(1.0 - 1e-8, 1.0, ChargePair::Equal, 0.1).unwrap();
        assert!(p.pairs[2].leading_coeff.norm() < 1e-3 && p.pairs[3].leading_coeff.norm() < 1e-3);
    }

    #[test]
    fn manakov_predictions() {
        let p = predict_manakov(PI / 4.0, ChargePair::Opposite, 0.1);
        let v = p.values();
        let r = 2.0 * 3f64.sqrt() * 0.01;
        assert!((v[2] - C::new(r, 0.0)).norm() < 1e-6 && (v[3] - C::new(r, 0.0)).norm() < 1e-6);
        assert!((r - 0.034641).abs() < 1e-6);
        assert!(v[4].norm() < 1e-15);
        assert_eq!(p.zero_algebraic, Some(8));
        assert_eq!(p.stability, Some(ManakovStability::Unstable));

        let eq = predict_manakov(0.3, ChargePair::Equal, 0.1).values();
        let want = [imag(0.2), imag(0.2), imag(0.02), imag(0.06), imag(0.04)];
        for (a, b) in eq.iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
        let op = predict_manakov(0.0, ChargePair::Opposite, 0.1);
        let mut op_v: Vec<f64> = op.values().iter().map(|z| z.im).collect();
        let mut eq_v: Vec<f64> = eq.iter().map(|z| z.im).collect();
        op_v.sort_by(f64::total_cmp);
        eq_v.sort_by(f64::total_cmp);
        for (a, b) in op_v.iter().zip(&eq_v) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(op.pairs[2].kind, PredictedKind::NegativeKrein);
        assert_eq!(op.pairs[3].kind, PredictedKind::PositiveKrein);
        assert_eq!(predict_manakov(PI / 8.0, ChargePair::Opposite, 0.1).zero_algebraic, Some(6));
    }

    #[test]
    fn manakov_interval() {
        let cases = [
            (0.0, ManakovStability::Stable),
            (PI / 24.0, ManakovStability::Stable),
            (PI / 12.0, ManakovStability::Marginal),
            (PI / 8.0, ManakovStability::Unstable),
            (PI / 4.0, ManakovStability::Unstable),
            (3.0 * PI / 8.0, ManakovStability::Unstable),
            (5.0 * PI / 12.0, ManakovStability::Marginal),
            (11.0 * PI / 24.0, ManakovStability::Stable),
            (PI / 2.0, ManakovStability::Stable),
        ];
        for (d, want) in cases {
            assert_eq!(manakov_stability(d), want, "delta = {d}");
        }
    }

    #[test]
    fn laplacian_rescaling() {
        let p = predict_scalar(0.1).in_hopping(Hopping::Laplacian);
        let red = 0.1 / 1.4;
        assert!((p.pairs[0].value - imag(2.0 * red * 1.4)).norm() < 1e-15);
        assert!((p.pairs[2].value - imag(4.0 * red * red * 1.4)).norm() < 1e-15);
    }
}
