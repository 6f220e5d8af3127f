//! Grid geometry, contour shells, field storage and the anti-continuum seed.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VortexError};
use crate::stationary::{solve_amplitudes, AmplitudePair};

pub const MIN_HALF_WIDTH: usize = 3;
pub const DEFAULT_HALF_WIDTH: usize = 10;

/// Lattice site `(n, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Node {
    pub n: i32,
    pub m: i32,
}

impl Node {
    pub const fn new(n: i32, m: i32) -> Self {
        Self { n, m }
    }

    pub fn l1(&self) -> i32 {
        self.n.abs() + self.m.abs()
    }

    /// The four nearest neighbours in the order `(n+1,m), (n-1,m), (n,m+1), (n,m-1)`.
    pub fn neighbors(&self) -> [Node; 4] {
        [
            Node::new(self.n + 1, self.m),
            Node::new(self.n - 1, self.m),
            Node::new(self.n, self.m + 1),
            Node::new(self.n, self.m - 1),
        ]
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

/// Square grid `n, m ∈ [-N, N]` with the outer ring pinned to zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridShape {
    half_width: usize,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    half_width: usize,
}

impl TryFrom<RawGrid> for GridShape {
    type Error = VortexError;
    fn try_from(raw: RawGrid) -> Result<Self> {
        GridShape::new(raw.half_width)
    }
}

impl From<GridShape> for RawGrid {
    fn from(g: GridShape) -> Self {
        RawGrid { half_width: g.half_width }
    }
}

impl Default for GridShape {
    fn default() -> Self {
        Self { half_width: DEFAULT_HALF_WIDTH }
    }
}

impl GridShape {
    pub fn new(half_width: usize) -> Result<Self> {
        if half_width < MIN_HALF_WIDTH {
            return Err(VortexError::GridTooSmall { half_width, min: MIN_HALF_WIDTH });
        }
        Ok(Self { half_width })
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn node_count(&self) -> usize {
        self.side() * self.side()
    }

    pub fn contains(&self, node: Node) -> bool {
        let h = self.half_width as i32;
        node.n.abs() <= h && node.m.abs() <= h
    }

    pub fn is_boundary(&self, node: Node) -> bool {
        let h = self.half_width as i32;
        self.contains(node) && (node.n.abs() == h || node.m.abs() == h)
    }

    pub fn is_interior(&self, node: Node) -> bool {
        let h = self.half_width as i32;
        node.n.abs() < h && node.m.abs() < h
    }

    /// Row-major index over the full grid, `n` fastest.
    pub fn index(&self, node: Node) -> Option<usize> {
        if !self.contains(node) {
            return None;
        }
        let h = self.half_width as i32;
        Some((node.m + h) as usize * self.side() + (node.n + h) as usize)
    }

    pub fn node(&self, index: usize) -> Node {
        let h = self.half_width as i32;
        let side = self.side();
        Node::new((index % side) as i32 - h, (index / side) as i32 - h)
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        (0..self.node_count()).map(move |i| self.node(i))
    }

    pub fn interior_count(&self) -> usize {
        let s = 2 * self.half_width - 1;
        s * s
    }

    /// Compact row-major index over interior nodes, `n` fastest.
    pub fn interior_index(&self, node: Node) -> Option<usize> {
        if !self.is_interior(node) {
            return None;
        }
        let h = self.half_width as i32 - 1;
        let s = 2 * self.half_width - 1;
        Some((node.m + h) as usize * s + (node.n + h) as usize)
    }

    pub fn interior_node(&self, index: usize) -> Node {
        let h = self.half_width as i32 - 1;
        let s = 2 * self.half_width - 1;
        Node::new((index % s) as i32 - h, (index / s) as i32 - h)
    }

    pub fn interior(&self) -> impl Iterator<Item = Node> + '_ {
        (0..self.interior_count()).map(move |i| self.interior_node(i))
    }
}

/// A shell node together with the contour indices `j` (0-based into `s0`) of the
/// phases it collects and their integer weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellNode {
    pub node: Node,
    pub weights: Vec<(usize, u32)>,
}

impl ShellNode {
    fn new(node: Node, weights: &[(usize, u32)]) -> Self {
        Self { node, weights: weights.to_vec() }
    }

    /// `Σ w e^{iθ_j}` for the given phases.
    pub fn phase_sum(&self, phases: &[Complex64; 4]) -> Complex64 {
        self.weights.iter().map(|&(j, w)| phases[j] * w as f64).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSet {
    pub s0: [Node; 4],
    pub s1: Vec<ShellNode>,
    pub s2: Vec<ShellNode>,
    pub s3: Vec<Node>,
}

impl ContourSet {
    pub fn s0_position(&self, node: Node) -> Option<usize> {
        self.s0.iter().position(|&s| s == node)
    }
}

pub const S0: [Node; 4] = [Node::new(-1, 0), Node::new(0, -1), Node::new(1, 0), Node::new(0, 1)];

pub fn build_contours(grid: GridShape) -> Result<ContourSet> {
    if grid.half_width() < MIN_HALF_WIDTH {
        return Err(VortexError::GridTooSmall { half_width: grid.half_width(), min: MIN_HALF_WIDTH });
    }
    let nx = |j: usize| (j + 1) % 4;

    let mut s1 = vec![ShellNode::new(Node::new(0, 0), &[(0, 1), (1, 1), (2, 1), (3, 1)])];
    let diag = [Node::new(-1, -1), Node::new(1, -1), Node::new(1, 1), Node::new(-1, 1)];
    for (j, &node) in diag.iter().enumerate() {
        s1.push(ShellNode::new(node, &[(j, 1), (nx(j), 1)]));
    }
    let axis2 = [Node::new(-2, 0), Node::new(0, -2), Node::new(2, 0), Node::new(0, 2)];
    for (j, &node) in axis2.iter().enumerate() {
        s1.push(ShellNode::new(node, &[(j, 1)]));
    }

    let mut s2 = Vec::with_capacity(12);
    let heavy_first = [Node::new(-2, -1), Node::new(1, -2), Node::new(2, 1), Node::new(-1, 2)];
    for (j, &node) in heavy_first.iter().enumerate() {
        s2.push(ShellNode::new(node, &[(j, 2), (nx(j), 1)]));
    }
    let heavy_second = [Node::new(-1, -2), Node::new(2, -1), Node::new(1, 2), Node::new(-2, 1)];
    for (j, &node) in heavy_second.iter().enumerate() {
        s2.push(ShellNode::new(node, &[(j, 1), (nx(j), 2)]));
    }
    let axis3 = [Node::new(-3, 0), Node::new(0, -3), Node::new(3, 0), Node::new(0, 3)];
    for (j, &node) in axis3.iter().enumerate() {
        s2.push(ShellNode::new(node, &[(j, 1)]));
    }

    let h = grid.half_width() as i32;
    let mut s3 = Vec::new();
    for m in -h..=h {
        for n in -h..=h {
            let node = Node::new(n, m);
            if node.l1() == 4 {
                s3.push(node);
            }
        }
    }

    Ok(ContourSet { s0: S0, s1, s2, s3 })
}

/// Convention for the coupling term.
///
/// `NeighborSum` couples through the plain four-neighbour sum. `Laplacian`
/// couples through the discrete Laplacian, which adds an on-site shift of
/// `4ε` to every site. The two are related exactly by
/// `ε' = ε/(1+4ε)`, `Φ = √(1+4ε) Φ'(ε')`, `λ = (1+4ε) λ'(ε')`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hopping {
    #[default]
    NeighborSum,
    Laplacian,
}

impl Hopping {
    pub fn onsite_shift(&self, epsilon: f64) -> f64 {
        match self {
            Hopping::NeighborSum => 0.0,
            Hopping::Laplacian => 4.0 * epsilon,
        }
    }

    /// Coupling of the equivalent `NeighborSum` problem.
    pub fn reduced_epsilon(&self, epsilon: f64) -> f64 {
        match self {
            Hopping::NeighborSum => epsilon,
            Hopping::Laplacian => epsilon / (1.0 + 4.0 * epsilon),
        }
    }

    /// Factor by which eigenvalues of the equivalent `NeighborSum` problem are scaled.
    pub fn eigen_scale(&self, epsilon: f64) -> f64 {
        match self {
            Hopping::NeighborSum => 1.0,
            Hopping::Laplacian => 1.0 + 4.0 * epsilon,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Scalar,
    Vector,
}

impl Model {
    pub fn components(&self) -> usize {
        match self {
            Model::Scalar => 1,
            Model::Vector => 2,
        }
    }
}

/// Relative winding of the two components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChargePair {
    /// `(1, 1)`
    #[default]
    #[serde(rename = "++")]
    Equal,
    /// `(1, -1)`
    #[serde(rename = "+-")]
    Opposite,
}

impl ChargePair {
    pub fn sign(&self) -> i32 {
        match self {
            ChargePair::Equal => 1,
            ChargePair::Opposite => -1,
        }
    }
}

impl std::str::FromStr for ChargePair {
    type Err = VortexError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "++" | "11" | "equal" => Ok(ChargePair::Equal),
            "+-" | "1-1" | "opposite" => Ok(ChargePair::Opposite),
            _ => Err(VortexError::InvalidParameter(format!("unknown charge pair {s:?}"))),
        }
    }
}

impl fmt::Display for ChargePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChargePair::Equal => "(1,1)",
            ChargePair::Opposite => "(1,-1)",
        })
    }
}

pub(crate) const MANAKOV_TOL: f64 = 1e-12;

/// Problem parameters and lattice truncation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VortexSpec {
    pub model: Model,
    #[serde(default)]
    pub charges: ChargePair,
    #[serde(default)]
    pub beta: f64,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub grid: GridShape,
    #[serde(default)]
    pub hopping: Hopping,
}

fn one() -> f64 {
    1.0
}

impl VortexSpec {
    pub fn scalar(grid: GridShape) -> Self {
        Self {
            model: Model::Scalar,
            charges: ChargePair::Equal,
            beta: 0.0,
            omega: 1.0,
            delta: None,
            epsilon: 0.0,
            grid,
            hopping: Hopping::NeighborSum,
        }
    }

    pub fn vector(grid: GridShape, charges: ChargePair, beta: f64, omega: f64) -> Self {
        Self { model: Model::Vector, charges, beta, omega, ..Self::scalar(grid) }
    }

    pub fn manakov(grid: GridShape, charges: ChargePair, delta: f64) -> Self {
        Self { delta: Some(delta), ..Self::vector(grid, charges, 1.0, 1.0) }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_hopping(mut self, hopping: Hopping) -> Self {
        self.hopping = hopping;
        self
    }

    pub fn components(&self) -> usize {
        self.model.components()
    }

    pub fn is_manakov(&self) -> bool {
        self.model == Model::Vector && (self.beta - 1.0).abs() < MANAKOV_TOL
    }

    /// Number of independent phase symmetries removed by gauge fixing.
    pub fn gauge_count(&self) -> usize {
        match self.model {
            Model::Scalar => 1,
            Model::Vector => 2,
        }
    }

    pub fn amplitudes(&self) -> Result<AmplitudePair> {
        match self.model {
            Model::Scalar => Ok(AmplitudePair::scalar()),
            Model::Vector => solve_amplitudes(self.beta, self.omega, self.delta),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(VortexError::InvalidParameter(format!("epsilon = {} must be >= 0", self.epsilon)));
        }
        if let Some(d) = self.delta {
            if !(0.0..=std::f64::consts::TAU).contains(&d) {
                return Err(VortexError::InvalidParameter(format!("delta = {d} outside [0, 2pi]")));
            }
        }
        self.amplitudes().map(|_| ())
    }

    /// Phase of component `c` at contour index `j` as an exact unit complex number.
    pub fn contour_phase(&self, component: usize, j: usize) -> Complex64 {
        let sign = if component == 0 { 1 } else { self.charges.sign() };
        quarter_turn(sign * j as i32)
    }
}

/// `i^k` without rounding.
pub(crate) fn quarter_turn(k: i32) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// One or two complex components on the full grid, zero on the boundary ring.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeField {
    grid: GridShape,
    components: Vec<Vec<Complex64>>,
}

#[derive(Deserialize)]
struct RawField {
    grid: GridShape,
    components: Vec<Vec<Complex64>>,
}

impl<'de> Deserialize<'de> for LatticeField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawField::deserialize(d)?;
        LatticeField::from_components(raw.grid, raw.components).map_err(serde::de::Error::custom)
    }
}

impl LatticeField {
    pub fn zeros(grid: GridShape, components: usize) -> Self {
        Self { grid, components: vec![vec![Complex64::new(0.0, 0.0); grid.node_count()]; components] }
    }

    pub fn from_components(grid: GridShape, components: Vec<Vec<Complex64>>) -> Result<Self> {
        if components.is_empty() || components.len() > 2 {
            return Err(VortexError::ShapeMismatch {
                expected: "1 or 2 components".into(),
                found: format!("{} components", components.len()),
            });
        }
        for c in &components {
            if c.len() != grid.node_count() {
                return Err(VortexError::ShapeMismatch {
                    expected: format!("{} nodes", grid.node_count()),
                    found: format!("{} nodes", c.len()),
                });
            }
        }
        let field = Self { grid, components };
        if field.boundary_power() != 0.0 {
            return Err(VortexError::NonzeroBoundary);
        }
        Ok(field)
    }

    pub fn grid(&self) -> GridShape {
        self.grid
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.components[c]
    }

    pub fn into_components(self) -> Vec<Vec<Complex64>> {
        self.components
    }

    /// Value at `node`, zero outside the grid.
    pub fn at(&self, c: usize, node: Node) -> Complex64 {
        self.grid.index(node).map_or(Complex64::new(0.0, 0.0), |i| self.components[c][i])
    }

    pub fn set(&mut self, c: usize, node: Node, value: Complex64) -> Result<()> {
        if !self.grid.is_interior(node) {
            if value == Complex64::new(0.0, 0.0) {
                return Ok(());
            }
            return Err(VortexError::NonzeroBoundary);
        }
        let i = self.grid.index(node).expect("interior node has an index");
        self.components[c][i] = value;
        Ok(())
    }

    pub fn neighbor_sum(&self, c: usize, node: Node) -> Complex64 {
        node.neighbors().iter().map(|&nb| self.at(c, nb)).sum()
    }

    pub fn check_shape(&self, spec: &VortexSpec) -> Result<()> {
        if self.grid != spec.grid || self.n_components() != spec.components() {
            return Err(VortexError::ShapeMismatch {
                expected: format!("{} component(s) on N = {}", spec.components(), spec.grid.half_width()),
                found: format!("{} component(s) on N = {}", self.n_components(), self.grid.half_width()),
            });
        }
        Ok(())
    }

    pub fn norm_inf(&self) -> f64 {
        self.components.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn power(&self) -> f64 {
        self.components.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn boundary_power(&self) -> f64 {
        self.grid
            .nodes()
            .filter(|&nd| self.grid.is_boundary(nd))
            .map(|nd| {
                let i = self.grid.index(nd).unwrap();
                self.components.iter().map(|c| c[i].norm_sqr()).sum::<f64>()
            })
            .sum()
    }

    pub fn distance_inf(&self, other: &LatticeField) -> Result<f64> {
        if self.grid != other.grid || self.n_components() != other.n_components() {
            return Err(VortexError::ShapeMismatch {
                expected: format!("{} component(s) on N = {}", self.n_components(), self.grid.half_width()),
                found: format!("{} component(s) on N = {}", other.n_components(), other.grid.half_width()),
            });
        }
        Ok(self
            .components
            .iter()
            .flatten()
            .zip(other.components.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Multiplies component `c` by `factor` everywhere.
    pub fn scale_component(&mut self, c: usize, factor: Complex64) {
        for z in &mut self.components[c] {
            *z *= factor;
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for c in 0..out.n_components() {
            out.scale_component(c, Complex64::new(factor, 0.0));
        }
        out
    }

    pub fn map_components(&self, f: impl Fn(usize, Node, Complex64) -> Complex64) -> Self {
        let mut out = self.clone();
        for (c, comp) in out.components.iter_mut().enumerate() {
            for (i, z) in comp.iter_mut().enumerate() {
                let node = self.grid.node(i);
                if self.grid.is_interior(node) {
                    *z = f(c, node, *z);
                }
            }
        }
        out
    }
}

/// Field at the anti-continuum limit: the vortex cross on `s0`, zero elsewhere.
pub fn anti_continuum_seed(spec: &VortexSpec, amplitudes: AmplitudePair) -> Result<LatticeField> {
    let mut field = LatticeField::zeros(spec.grid, spec.components());
    let amps = match spec.model {
        Model::Scalar => [1.0, 0.0],
        Model::Vector => [amplitudes.a, amplitudes.b],
    };
    for (j, &node) in S0.iter().enumerate() {
        for (c, &amp) in amps.iter().take(spec.components()).enumerate() {
            field.set(c, node, spec.contour_phase(c, j) * amp)?;
        }
    }
    Ok(field)
}
