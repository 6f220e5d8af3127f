//! Residual and first-order expansion of the stationary equations.
//!
//! Unknowns live on interior nodes only. Slot `k = i * nc + c` addresses
//! component `c` at interior node `i`; its real form uses indices `2k` (real
//! part) and `2k + 1` (imaginary part), and its complex form uses `2k`
//! (perturbation) and `2k + 1` (conjugate perturbation).

use num_complex::Complex64;

use crate::lattice::{LatticeField, Model, VortexSpec};
use crate::sparse::Csr;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// `F(w) = ∂F/∂w δw + ∂F/∂w̄ δw̄`, stored as two complex matrices over slots.
pub(crate) struct Expansion {
    pub slots: usize,
    pub d: Vec<(usize, usize, C)>,
    pub e: Vec<(usize, usize, C)>,
}

pub(crate) fn slot_values(field: &LatticeField) -> Vec<C> {
    let grid = field.grid();
    let nc = field.n_components();
    let mut out = vec![ZERO; grid.interior_count() * nc];
    for (i, node) in grid.interior().enumerate() {
        for c in 0..nc {
            out[i * nc + c] = field.at(c, node);
        }
    }
    out
}

pub(crate) fn field_from_slots(spec: &VortexSpec, values: &[C]) -> LatticeField {
    let grid = spec.grid;
    let nc = spec.components();
    let mut field = LatticeField::zeros(grid, nc);
    for (i, node) in grid.interior().enumerate() {
        for c in 0..nc {
            field.set(c, node, values[i * nc + c]).expect("interior node");
        }
    }
    field
}

pub(crate) fn pack_real(values: &[C]) -> Vec<f64> {
    values.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub(crate) fn unpack_real(x: &[f64]) -> Vec<C> {
    x.chunks_exact(2).map(|p| C::new(p[0], p[1])).collect()
}

/// Interior neighbours of each interior node, as interior indices.
pub(crate) fn neighbor_table(spec: &VortexSpec) -> Vec<Vec<usize>> {
    let grid = spec.grid;
    grid.interior().map(|node| node.neighbors().iter().filter_map(|&nb| grid.interior_index(nb)).collect()).collect()
}

pub(crate) fn residual_slots(spec: &VortexSpec, values: &[C]) -> Vec<C> {
    let nc = spec.components();
    let eps = spec.epsilon;
    let shift = spec.hopping.onsite_shift(eps);
    let nbrs = neighbor_table(spec);
    let mut out = vec![ZERO; values.len()];
    for (i, nb) in nbrs.iter().enumerate() {
        for c in 0..nc {
            let w = values[i * nc + c];
            let hop: C = nb.iter().map(|&j| values[j * nc + c]).sum();
            let onsite = match spec.model {
                Model::Scalar => 1.0 + shift - w.norm_sqr(),
                Model::Vector => {
                    let other = values[i * nc + 1 - c].norm_sqr();
                    let base = if c == 0 { 1.0 } else { spec.omega };
                    base + shift - w.norm_sqr() - spec.beta * other
                }
            };
            out[i * nc + c] = w * onsite - hop * eps;
        }
    }
    out
}

pub(crate) fn expansion(spec: &VortexSpec, values: &[C]) -> Expansion {
    let nc = spec.components();
    let eps = spec.epsilon;
    let shift = spec.hopping.onsite_shift(eps);
    let nbrs = neighbor_table(spec);
    let mut d = Vec::with_capacity(values.len() * (4 + nc));
    let mut e = Vec::with_capacity(values.len() * nc);
    for (i, nb) in nbrs.iter().enumerate() {
        match spec.model {
            Model::Scalar => {
                let w = values[i];
                d.push((i, i, C::new(1.0 + shift - 2.0 * w.norm_sqr(), 0.0)));
                e.push((i, i, -w * w));
            }
            Model::Vector => {
                let (p, q) = (values[2 * i], values[2 * i + 1]);
                let b = spec.beta;
                let (k0, k1) = (2 * i, 2 * i + 1);
                d.push((k0, k0, C::new(1.0 + shift - 2.0 * p.norm_sqr() - b * q.norm_sqr(), 0.0)));
                d.push((k1, k1, C::new(spec.omega + shift - b * p.norm_sqr() - 2.0 * q.norm_sqr(), 0.0)));
                d.push((k0, k1, -p * q.conj() * b));
                d.push((k1, k0, -q * p.conj() * b));
                e.push((k0, k0, -p * p));
                e.push((k1, k1, -q * q));
                e.push((k0, k1, -p * q * b));
                e.push((k1, k0, -p * q * b));
            }
        }
        for &j in nb {
            for c in 0..nc {
                d.push((i * nc + c, j * nc + c, C::new(-eps, 0.0)));
            }
        }
    }
    Expansion { slots: values.len(), d, e }
}

impl Expansion {
    /// Hermitian operator on (perturbation, conjugate perturbation) pairs.
    pub fn hermitian(&self) -> Csr<C> {
        let mut t = Vec::with_capacity(2 * (self.d.len() + self.e.len()));
        for &(k, l, v) in &self.d {
            t.push((2 * k, 2 * l, v));
            t.push((2 * k + 1, 2 * l + 1, v.conj()));
        }
        for &(k, l, v) in &self.e {
            t.push((2 * k, 2 * l + 1, v));
            t.push((2 * k + 1, 2 * l, v.conj()));
        }
        Csr::from_triplets(2 * self.slots, 2 * self.slots, t)
    }

    /// Real Jacobian of `(Re F, Im F)` with respect to `(Re w, Im w)`; symmetric.
    pub fn real_jacobian(&self) -> Csr<f64> {
        let mut t = Vec::with_capacity(4 * (self.d.len() + self.e.len()));
        for &(k, l, v) in &self.d {
            t.push((2 * k, 2 * l, v.re));
            t.push((2 * k, 2 * l + 1, -v.im));
            t.push((2 * k + 1, 2 * l, v.im));
            t.push((2 * k + 1, 2 * l + 1, v.re));
        }
        for &(k, l, v) in &self.e {
            t.push((2 * k, 2 * l, v.re));
            t.push((2 * k, 2 * l + 1, v.im));
            t.push((2 * k + 1, 2 * l, v.im));
            t.push((2 * k + 1, 2 * l + 1, -v.re));
        }
        Csr::from_triplets(2 * self.slots, 2 * self.slots, t)
    }
}

/// Generator of the linearized flow in real form: `ṗ = Im δF`, `q̇ = −Re δF`.
pub(crate) fn dynamics_from_jacobian(jac: &Csr<f64>) -> Csr<f64> {
    let t = jac.triplets().map(|(r, c, v)| if r % 2 == 0 { (r + 1, c, -v) } else { (r - 1, c, v) }).collect();
    Csr::from_triplets(jac.rows(), jac.cols(), t)
}
