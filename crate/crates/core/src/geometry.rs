//! Compact convex symmetric spectra, their gauges and polar bodies, midpoint
//! quadrature grids, and the grid-based covering test.
//!
//! Coordinates are in cycles per unit. A spectrum lives in frequency space and
//! its polar body lives in time space; both use [`SpectrumSet`] since the
//! representation is the same.
//!
//! The polar set is defined with the one-sided condition `x·γ ≤ 1` on all of
//! `Λ`. Because every supported shape is symmetric this coincides with the
//! absolute-value form `|x·γ| ≤ 1`, which is what the membership tests use.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when deciding whether a point sits on a boundary.
const BOUNDARY_SLACK: f64 = 1e-12;

/// Shape of a symmetric convex body.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Axis-aligned box `Π [-h_i, h_i]`.
    Box { half_widths: Vec<f64> },
    /// Euclidean ball about the origin.
    Ball { radius: f64 },
    /// Convex hull of a vertex list closed under negation.
    Polytope { vertices: Vec<Vec<f64>> },
}

/// Half-space `normal·γ ≤ offset`, `offset > 0`.
#[derive(Debug, Clone, PartialEq)]
struct Facet {
    normal: Vec<f64>,
    offset: f64,
}

/// A compact, convex set symmetric about the origin with nonempty interior,
/// in dimension 1 or 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRepr", into = "SpectrumRepr")]
pub struct SpectrumSet {
    dim: usize,
    shape: Shape,
    /// Half-space description, populated for polytopes only.
    facets: Vec<Facet>,
}

impl SpectrumSet {
    pub fn new_box(half_widths: Vec<f64>) -> Result<Self> {
        let dim = half_widths.len();
        check_dim(dim)?;
        if half_widths.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return Err(Error::InvalidSpectrum(format!(
                "box half-widths must be positive and finite, got {half_widths:?}"
            )));
        }
        Ok(Self { dim, shape: Shape::Box { half_widths }, facets: Vec::new() })
    }

    /// Cube `[-h, h]^dim`.
    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        Self::new_box(vec![half_width; dim])
    }

    pub fn new_ball(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidSpectrum(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self { dim, shape: Shape::Ball { radius }, facets: Vec::new() })
    }

    /// Symmetric polytope from a vertex list. The list must be closed under
    /// negation and affinely span the space; interior (non-extreme) points are
    /// allowed and ignored.
    pub fn new_polytope(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vertices.first().map(Vec::len).unwrap_or(0);
        check_dim(dim)?;
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidSpectrum("vertices have mixed dimensions".into()));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpectrum("vertex coordinates must be finite".into()));
        }
        let scale = vertices
            .iter()
            .flatten()
            .fold(0.0f64, |m, c| m.max(c.abs()))
            .max(f64::MIN_POSITIVE);
        for v in &vertices {
            let closed = vertices
                .iter()
                .any(|w| v.iter().zip(w).all(|(a, b)| (a + b).abs() <= 1e-12 * scale));
            if !closed {
                return Err(Error::InvalidSpectrum(format!(
                    "vertex list is not closed under negation: missing the mirror of {v:?}"
                )));
            }
        }
        let facets = match dim {
            1 => {
                let m = vertices.iter().fold(0.0f64, |m, v| m.max(v[0].abs()));
                if !(m > 0.0) {
                    return Err(Error::InvalidSpectrum("degenerate polytope".into()));
                }
                vec![
                    Facet { normal: vec![1.0], offset: m },
                    Facet { normal: vec![-1.0], offset: m },
                ]
            }
            _ => planar_facets(&vertices)?,
        };
        Ok(Self { dim, shape: Shape::Polytope { vertices }, facets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Minkowski gauge `inf {ρ > 0 : γ ∈ ρΛ}`.
    pub fn lambda_norm(&self, gamma: &[f64]) -> f64 {
        debug_assert_eq!(gamma.len(), self.dim);
        match &self.shape {
            Shape::Box { half_widths } => gamma
                .iter()
                .zip(half_widths)
                .fold(0.0f64, |m, (g, h)| m.max(g.abs() / h)),
            Shape::Ball { radius } => norm2(gamma) / radius,
            Shape::Polytope { .. } => self
                .facets
                .iter()
                .fold(0.0f64, |m, f| m.max(dot(&f.normal, gamma) / f.offset)),
        }
    }

    /// Membership test `‖γ‖_Λ ≤ 1`.
    pub fn contains(&self, gamma: &[f64]) -> bool {
        self.lambda_norm(gamma) <= 1.0 + BOUNDARY_SLACK
    }

    /// Strict interior test.
    pub fn contains_interior(&self, gamma: &[f64]) -> bool {
        self.lambda_norm(gamma) < 1.0 - BOUNDARY_SLACK
    }

    /// Euclidean distance from `γ` to the set (zero inside).
    pub fn distance(&self, gamma: &[f64]) -> f64 {
        match &self.shape {
            Shape::Box { half_widths } => gamma
                .iter()
                .zip(half_widths)
                .map(|(g, h)| (g.abs() - h).max(0.0).powi(2))
                .sum::<f64>()
                .sqrt(),
            Shape::Ball { radius } => (norm2(gamma) - radius).max(0.0),
            Shape::Polytope { .. } if self.dim == 1 => {
                (gamma[0].abs() - self.facets[0].offset).max(0.0)
            }
            Shape::Polytope { .. } => {
                if self.contains(gamma) {
                    return 0.0;
                }
                let hull = self.hull_vertices();
                (0..hull.len())
                    .map(|i| segment_distance(gamma, &hull[i], &hull[(i + 1) % hull.len()]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Whether the closed ball `B̄(center, radius)` lies inside the set.
    pub fn contains_ball(&self, center: &[f64], radius: f64) -> bool {
        match &self.shape {
            Shape::Box { half_widths } => center
                .iter()
                .zip(half_widths)
                .all(|(c, h)| c.abs() + radius <= h * (1.0 + BOUNDARY_SLACK)),
            Shape::Ball { radius: r } => norm2(center) + radius <= r * (1.0 + BOUNDARY_SLACK),
            Shape::Polytope { .. } => self.facets.iter().all(|f| {
                dot(&f.normal, center) + radius * norm2(&f.normal)
                    <= f.offset * (1.0 + BOUNDARY_SLACK)
            }),
        }
    }

    /// Polar body `{x : x·γ ≤ 1 for all γ ∈ Λ}`.
    pub fn polar(&self) -> SpectrumSet {
        match &self.shape {
            Shape::Ball { radius } => SpectrumSet {
                dim: self.dim,
                shape: Shape::Ball { radius: 1.0 / radius },
                facets: Vec::new(),
            },
            Shape::Box { half_widths } => {
                let mut vertices = Vec::with_capacity(2 * self.dim);
                for (i, h) in half_widths.iter().enumerate() {
                    for sign in [1.0, -1.0] {
                        let mut v = vec![0.0; self.dim];
                        v[i] = sign / h;
                        vertices.push(v);
                    }
                }
                SpectrumSet::new_polytope(vertices).expect("cross-polytope is valid")
            }
            Shape::Polytope { .. } => {
                let vertices = self
                    .facets
                    .iter()
                    .map(|f| f.normal.iter().map(|n| n / f.offset).collect())
                    .collect();
                SpectrumSet::new_polytope(vertices).expect("polar of a valid polytope is valid")
            }
        }
    }

    /// Dilation `ρΛ`.
    pub fn scale(&self, rho: f64) -> Result<SpectrumSet> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidArgument(format!("scale factor must be positive, got {rho}")));
        }
        Ok(match &self.shape {
            Shape::Box { half_widths } => {
                SpectrumSet::new_box(half_widths.iter().map(|h| h * rho).collect())?
            }
            Shape::Ball { radius } => SpectrumSet::new_ball(self.dim, radius * rho)?,
            Shape::Polytope { vertices } => SpectrumSet::new_polytope(
                vertices.iter().map(|v| v.iter().map(|c| c * rho).collect()).collect(),
            )?,
        })
    }

    /// Half-widths of the smallest axis-aligned box containing the set.
    pub fn bounding_half_widths(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Box { half_widths } => half_widths.clone(),
            Shape::Ball { radius } => vec![*radius; self.dim],
            Shape::Polytope { vertices } => (0..self.dim)
                .map(|i| vertices.iter().fold(0.0f64, |m, v| m.max(v[i].abs())))
                .collect(),
        }
    }

    /// Euclidean diameter.
    pub fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Box { half_widths } => 2.0 * norm2(half_widths),
            Shape::Ball { radius } => 2.0 * radius,
            Shape::Polytope { vertices } => 2.0 * vertices.iter().map(|v| norm2(v)).fold(0.0, f64::max),
        }
    }

    /// Lebesgue measure.
    pub fn volume(&self) -> f64 {
        match (&self.shape, self.dim) {
            (Shape::Box { half_widths }, _) => half_widths.iter().map(|h| 2.0 * h).product(),
            (Shape::Ball { radius }, 1) => 2.0 * radius,
            (Shape::Ball { radius }, _) => std::f64::consts::PI * radius * radius,
            (Shape::Polytope { .. }, 1) => 2.0 * self.facets[0].offset,
            (Shape::Polytope { .. }, _) => polygon_area(&self.hull_vertices()),
        }
    }

    /// Perimeter (2-D) or point count of the boundary (1-D, i.e. 2).
    fn boundary_measure(&self) -> f64 {
        match (&self.shape, self.dim) {
            (_, 1) => 2.0,
            (Shape::Box { half_widths }, _) => 4.0 * (half_widths[0] + half_widths[1]),
            (Shape::Ball { radius }, _) => 2.0 * std::f64::consts::PI * radius,
            (Shape::Polytope { .. }, _) => {
                let hull = self.hull_vertices();
                (0..hull.len())
                    .map(|i| {
                        let (a, b) = (&hull[i], &hull[(i + 1) % hull.len()]);
                        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
                    })
                    .sum()
            }
        }
    }

    /// Radius of the largest centred ball inside the set.
    pub fn inradius(&self) -> f64 {
        match &self.shape {
            Shape::Box { half_widths } => half_widths.iter().copied().fold(f64::INFINITY, f64::min),
            Shape::Ball { radius } => *radius,
            Shape::Polytope { .. } => self
                .facets
                .iter()
                .map(|f| f.offset / norm2(&f.normal))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Counter-clockwise hull vertices of a planar polytope, or the two
    /// endpoints of a 1-D one.
    fn hull_vertices(&self) -> Vec<Vec<f64>> {
        match &self.shape {
            Shape::Polytope { vertices } if self.dim == 2 => convex_hull(vertices),
            Shape::Polytope { .. } => {
                let m = self.facets[0].offset;
                vec![vec![-m], vec![m]]
            }
            _ => Vec::new(),
        }
    }

    /// Closed `ε`-neighbourhood `Λ_ε = {γ : dist(γ, Λ) ≤ ε}`.
    pub fn enlarged(&self, epsilon: f64) -> Result<Enlarged> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("epsilon must be nonnegative, got {epsilon}")));
        }
        Ok(Enlarged { base: self.clone(), epsilon })
    }
}

/// Regions a quadrature grid can be laid over.
pub trait Region: Sync {
    fn dim(&self) -> usize;
    fn contains(&self, gamma: &[f64]) -> bool;
    /// Half-widths of a centred axis-aligned bounding box.
    fn bounding_half_widths(&self) -> Vec<f64>;
    /// Closed-form measure, used to document quadrature accuracy.
    fn volume(&self) -> f64;
}

impl Region for SpectrumSet {
    fn dim(&self) -> usize {
        self.dim
    }
    fn contains(&self, gamma: &[f64]) -> bool {
        SpectrumSet::contains(self, gamma)
    }
    fn bounding_half_widths(&self) -> Vec<f64> {
        SpectrumSet::bounding_half_widths(self)
    }
    fn volume(&self) -> f64 {
        SpectrumSet::volume(self)
    }
}

/// The `ε`-neighbourhood of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Enlarged {
    pub base: SpectrumSet,
    pub epsilon: f64,
}

impl Region for Enlarged {
    fn dim(&self) -> usize {
        self.base.dim
    }
    fn contains(&self, gamma: &[f64]) -> bool {
        self.base.distance(gamma) <= self.epsilon * (1.0 + BOUNDARY_SLACK)
    }
    fn bounding_half_widths(&self) -> Vec<f64> {
        self.base.bounding_half_widths().iter().map(|h| h + self.epsilon).collect()
    }
    fn volume(&self) -> f64 {
        // Steiner formula for convex bodies.
        let e = self.epsilon;
        match self.base.dim {
            1 => self.base.volume() + 2.0 * e,
            _ => self.base.volume() + self.base.boundary_measure() * e + std::f64::consts::PI * e * e,
        }
    }
}

/// How the nodes of a [`SpectralGrid`] were laid out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridLayout {
    /// Cell midpoints of a tensor grid over the bounding box.
    Midpoint { per_axis: usize },
    /// Lattice `step·ℤ^d` with `half_nodes` steps from the centre to the
    /// bounding-box edge along each axis.
    Lattice { step: Vec<f64>, half_nodes: usize },
}

/// Quadrature nodes and weights discretizing `L²` over a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    dim: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    layout: GridLayout,
    /// Closed-form measure of the region the grid covers.
    region_volume: f64,
}

impl SpectralGrid {
    /// Tensor-product midpoint rule over the bounding box of `region`,
    /// keeping only nodes that fall inside. Each kept node carries the full
    /// cell volume, so curved boundaries contribute an `O(h)` error to the
    /// weight sum; for boxes the sum is exact.
    pub fn midpoint<R: Region + ?Sized>(region: &R, per_axis: usize) -> Result<Self> {
        if per_axis < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 nodes per axis, got {per_axis}"
            )));
        }
        let dim = region.dim();
        let half = region.bounding_half_widths();
        let steps: Vec<f64> = half.iter().map(|h| 2.0 * h / per_axis as f64).collect();
        let cell: f64 = steps.iter().product();
        let axis = |i: usize, k: usize| -half[i] + (k as f64 + 0.5) * steps[i];
        let mut nodes = Vec::new();
        match dim {
            1 => {
                for k in 0..per_axis {
                    let p = vec![axis(0, k)];
                    if region.contains(&p) {
                        nodes.push(p);
                    }
                }
            }
            _ => {
                for k0 in 0..per_axis {
                    for k1 in 0..per_axis {
                        let p = vec![axis(0, k0), axis(1, k1)];
                        if region.contains(&p) {
                            nodes.push(p);
                        }
                    }
                }
            }
        }
        if nodes.is_empty() {
            return Err(Error::EmptyGrid(per_axis.pow(dim as u32)));
        }
        let weights = vec![cell; nodes.len()];
        Ok(Self {
            dim,
            nodes,
            weights,
            layout: GridLayout::Midpoint { per_axis },
            region_volume: region.volume(),
        })
    }

    /// Lattice rule on `step·ℤ^d ∩ Λ` where `step = h_i / half_nodes` along
    /// axis `i`. Because nodes are integer multiples of the step, `jγ` is a
    /// node whenever `γ` is and `jγ ∈ Λ`. Box spectra get trapezoid end
    /// weights and an exact weight sum.
    pub fn lattice(spectrum: &SpectrumSet, half_nodes: usize) -> Result<Self> {
        if half_nodes < 1 {
            return Err(Error::InvalidArgument("lattice needs half_nodes ≥ 1".into()));
        }
        let dim = spectrum.dim;
        let half = spectrum.bounding_half_widths();
        let step: Vec<f64> = half.iter().map(|h| h / half_nodes as f64).collect();
        let n = half_nodes as i64;
        let is_box = matches!(spectrum.shape, Shape::Box { .. });
        let end_weight = |m: i64| if is_box && m.abs() == n { 0.5 } else { 1.0 };
        let cell: f64 = step.iter().product();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut push = |p: Vec<f64>, w: f64| {
            if spectrum.contains(&p) {
                nodes.push(p);
                weights.push(w);
            }
        };
        match dim {
            1 => {
                for m in -n..=n {
                    push(vec![m as f64 * step[0]], cell * end_weight(m));
                }
            }
            _ => {
                for m0 in -n..=n {
                    for m1 in -n..=n {
                        push(
                            vec![m0 as f64 * step[0], m1 as f64 * step[1]],
                            cell * end_weight(m0) * end_weight(m1),
                        );
                    }
                }
            }
        }
        Ok(Self {
            dim,
            nodes,
            weights,
            layout: GridLayout::Lattice { step, half_nodes },
            region_volume: spectrum.volume(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn layout(&self) -> &GridLayout {
        &self.layout
    }
    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
    pub fn region_volume(&self) -> f64 {
        self.region_volume
    }
    /// Relative deviation of the weight sum from the region's exact measure.
    pub fn volume_error(&self) -> f64 {
        (self.weight_sum() - self.region_volume).abs() / self.region_volume
    }

    /// Index of the node at `gamma`, if any (lattice grids only).
    pub fn lattice_index(&self, gamma: &[f64]) -> Option<usize> {
        let GridLayout::Lattice { step, half_nodes } = &self.layout else {
            return None;
        };
        let n = *half_nodes as i64;
        let mut key = Vec::with_capacity(self.dim);
        for (g, s) in gamma.iter().zip(step) {
            let m = (g / s).round();
            if (g / s - m).abs() > 1e-9 || (m as i64).abs() > n {
                return None;
            }
            key.push(m as i64);
        }
        // Nodes were pushed in lexicographic order of the lattice index but
        // some were dropped, so fall back to a search for non-box shapes.
        self.nodes.iter().position(|p| {
            p.iter()
                .zip(step)
                .zip(&key)
                .all(|((c, s), &m)| ((c / s).round() as i64) == m)
        })
    }
}

/// Axis-aligned box `[lo, hi]` in time space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidArgument("box corners must have equal, nonzero length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidArgument(format!("degenerate box {lo:?} .. {hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    /// Cube `[-half, half]^dim`.
    pub fn centered(dim: usize, half: f64) -> Self {
        Self { lo: vec![-half; dim], hi: vec![half; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().zip(&self.lo).zip(&self.hi).all(|((x, a), b)| *a <= *x && *x <= *b)
    }

    /// Box shrunk by `margin` on every side.
    pub fn shrink(&self, margin: f64) -> Result<Self> {
        Self::new(
            self.lo.iter().map(|a| a + margin).collect(),
            self.hi.iter().map(|b| b - margin).collect(),
        )
    }

    /// Regular grid with spacing `step` starting at `lo`, inclusive of `hi`
    /// up to rounding.
    pub fn grid(&self, step: f64) -> Vec<Vec<f64>> {
        let counts: Vec<usize> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| ((b - a) / step + 1e-9).floor() as usize + 1)
            .collect();
        let mut out = Vec::with_capacity(counts.iter().product());
        match self.dim() {
            1 => {
                for i in 0..counts[0] {
                    out.push(vec![self.lo[0] + i as f64 * step]);
                }
            }
            _ => {
                for i in 0..counts[0] {
                    for j in 0..counts[1] {
                        out.push(vec![self.lo[0] + i as f64 * step, self.lo[1] + j as f64 * step]);
                    }
                }
            }
        }
        out
    }
}

/// Outcome of [`covering_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub covered: bool,
    /// Grid points not covered by any translate.
    pub witnesses: Vec<Vec<f64>>,
    pub resolution: f64,
    pub grid_points: usize,
}

/// Tests whether translates `y + K`, `y ∈ points`, cover every point of a
/// regular grid over `region`. Points on the boundary of a translate count as
/// covered (up to a `1e-9` relative slack in the gauge).
pub fn covering_check(
    points: &[Vec<f64>],
    body: &SpectrumSet,
    region: &AxisBox,
    resolution: f64,
) -> Result<CoveringReport> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidArgument(format!("resolution must be positive, got {resolution}")));
    }
    if region.dim() != body.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim(), got: region.dim() });
    }
    let grid = region.grid(resolution);
    let reach = body.bounding_half_widths();
    let witnesses: Vec<Vec<f64>> = grid
        .par_iter()
        .filter(|p| {
            !points.iter().any(|y| {
                let diff: Vec<f64> = p.iter().zip(y).map(|(a, b)| a - b).collect();
                diff.iter().zip(&reach).all(|(d, r)| d.abs() <= r * (1.0 + 1e-9))
                    && body.lambda_norm(&diff) <= 1.0 + 1e-9
            })
        })
        .cloned()
        .collect();
    Ok(CoveringReport {
        covered: witnesses.is_empty(),
        witnesses,
        resolution,
        grid_points: grid.len(),
    })
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::InvalidSpectrum(format!("dimension must be 1 or 2, got {dim}")))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; returns the hull counter-clockwise without
/// collinear points.
fn convex_hull(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Vec<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_area(hull: &[Vec<f64>]) -> f64 {
    let n = hull.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (&hull[i], &hull[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        .abs()
}

fn planar_facets(vertices: &[Vec<f64>]) -> Result<Vec<Facet>> {
    let hull = convex_hull(vertices);
    if hull.len() < 3 || polygon_area(&hull) <= 0.0 {
        return Err(Error::InvalidSpectrum("polytope vertices do not span the plane".into()));
    }
    let n = hull.len();
    let mut facets = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (&hull[i], &hull[(i + 1) % n]);
        let normal = vec![b[1] - a[1], a[0] - b[0]];
        let offset = dot(&normal, a);
        if !(offset > 0.0) {
            return Err(Error::InvalidSpectrum("origin is not interior to the polytope".into()));
        }
        facets.push(Facet { normal, offset });
    }
    Ok(facets)
}

fn segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let q = [a[0] + t * ab[0] - p[0], a[1] + t * ab[1] - p[1]];
    (q[0] * q[0] + q[1] * q[1]).sqrt()
}

/// JSON form: `{"dim", "shape": "box"|"ball"|"polytope", "half_widths" |
/// "radius" | "vertices"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpectrumRepr {
    dim: usize,
    shape: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    half_widths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<Vec<f64>>>,
}

impl TryFrom<SpectrumRepr> for SpectrumSet {
    type Error = Error;

    fn try_from(r: SpectrumRepr) -> Result<Self> {
        let set = match r.shape.as_str() {
            "box" => SpectrumSet::new_box(
                r.half_widths.ok_or_else(|| Error::InvalidSpectrum("box needs half_widths".into()))?,
            )?,
            "ball" => SpectrumSet::new_ball(
                r.dim,
                r.radius.ok_or_else(|| Error::InvalidSpectrum("ball needs radius".into()))?,
            )?,
            "polytope" => SpectrumSet::new_polytope(
                r.vertices.ok_or_else(|| Error::InvalidSpectrum("polytope needs vertices".into()))?,
            )?,
            other => return Err(Error::InvalidSpectrum(format!("unknown shape {other:?}"))),
        };
        if set.dim != r.dim {
            return Err(Error::DimensionMismatch { expected: r.dim, got: set.dim });
        }
        Ok(set)
    }
}

impl From<SpectrumSet> for SpectrumRepr {
    fn from(s: SpectrumSet) -> Self {
        let mut r = SpectrumRepr {
            dim: s.dim,
            shape: String::new(),
            half_widths: None,
            radius: None,
            vertices: None,
        };
        match s.shape {
            Shape::Box { half_widths } => {
                r.shape = "box".into();
                r.half_widths = Some(half_widths);
            }
            Shape::Ball { radius } => {
                r.shape = "ball".into();
                r.radius = Some(radius);
            }
            Shape::Polytope { vertices } => {
                r.shape = "polytope".into();
                r.vertices = Some(vertices);
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn square() -> SpectrumSet {
        SpectrumSet::cube(2, 1.0).unwrap()
    }

    #[test]
    fn gauge_of_square_is_sup_norm() {
        assert_eq!(square().lambda_norm(&[0.5, -0.3]), 0.5);
        assert_eq!(square().lambda_norm(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn gauge_of_unit_ball_is_euclidean() {
        let ball = SpectrumSet::new_ball(2, 1.0).unwrap();
        assert!((ball.lambda_norm(&[3.0, 4.0]) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn polar_of_square_is_cross_polytope() {
        let polar = square().polar();
        assert!(polar.contains(&[0.5, 0.5]));
        assert!(polar.contains(&[-0.2, 0.7]));
        assert!(!polar.contains(&[0.6, 0.5]));
        assert!((polar.lambda_norm(&[0.3, -0.4]) - 0.7).abs() < 1e-15);
        assert!((polar.volume() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn unit_ball_is_self_polar() {
        let ball = SpectrumSet::new_ball(2, 1.0).unwrap();
        assert_eq!(ball.polar(), ball);
    }

    #[test]
    fn polar_scales_inversely() {
        let rho = 0.25;
        let lhs = square().scale(rho).unwrap().polar();
        let rhs = square().polar().scale(1.0 / rho).unwrap();
        match (lhs.shape(), rhs.shape()) {
            (Shape::Polytope { vertices: a }, Shape::Polytope { vertices: b }) => {
                assert_eq!(a, b);
            }
            _ => panic!("expected polytopes"),
        }
    }

    #[test]
    fn scale_rules() {
        let b = square().scale(0.25).unwrap();
        assert_eq!(b.shape(), &Shape::Box { half_widths: vec![0.25, 0.25] });
        let ball = SpectrumSet::new_ball(2, 2.0).unwrap().scale(0.5).unwrap();
        assert_eq!(ball.shape(), &Shape::Ball { radius: 1.0 });
        let p = SpectrumSet::new_polytope(vec![vec![1.0, 2.0], vec![-1.0, -2.0], vec![2.0, -1.0], vec![-2.0, 1.0]])
            .unwrap()
            .scale(0.5)
            .unwrap();
        match p.shape() {
            Shape::Polytope { vertices } => assert_eq!(vertices[0], vec![0.5, 1.0]),
            _ => unreachable!(),
        }
        assert!(square().scale(0.0).is_err());
        assert!(square().scale(-1.0).is_err());
    }

    #[test]
    fn construction_rejects_degenerate_input() {
        assert!(SpectrumSet::new_box(vec![1.0, 0.0]).is_err());
        assert!(SpectrumSet::new_ball(2, 0.0).is_err());
        assert!(SpectrumSet::new_ball(3, 1.0).is_err());
        assert!(SpectrumSet::new_polytope(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).is_err());
        assert!(SpectrumSet::new_polytope(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]]).is_err());
    }

    #[test]
    fn polytope_gauge_matches_vertex_hull() {
        // Hexagon with vertices at unit distance.
        let verts: Vec<Vec<f64>> = (0..6)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / 3.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let hex = SpectrumSet::new_polytope(verts).unwrap();
        assert!((hex.lambda_norm(&[1.0, 0.0]) - 1.0).abs() < 1e-12);
        let apothem = (3.0f64).sqrt() / 2.0;
        assert!((hex.lambda_norm(&[0.0, apothem]) - 1.0).abs() < 1e-12);
        assert!((hex.inradius() - apothem).abs() < 1e-12);
        assert!((hex.volume() - 1.5 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn distance_to_box_and_ball() {
        assert!((square().distance(&[2.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!((square().distance(&[2.0, 2.0]) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(square().distance(&[0.2, 0.2]), 0.0);
        let diamond = square().polar();
        assert!((diamond.distance(&[1.0, 1.0]) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn midpoint_grid_box_1d() {
        let l = SpectrumSet::cube(1, 0.5).unwrap();
        let g = SpectralGrid::midpoint(&l, 64).unwrap();
        assert_eq!(g.len(), 64);
        assert!(g.weights().iter().all(|&w| (w - 1.0 / 64.0).abs() < 1e-15));
        assert!((g.weight_sum() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn midpoint_grid_square_and_disc() {
        let g = SpectralGrid::midpoint(&square(), 32).unwrap();
        assert_eq!(g.len(), 1024);
        assert!((g.weight_sum() - 4.0).abs() < 1e-12);

        let disc = SpectrumSet::new_ball(2, 1.0).unwrap();
        let g = SpectralGrid::midpoint(&disc, 64).unwrap();
        // Oracle: count of cell midpoints inside the disc times cell area.
        let h = 2.0 / 64.0;
        let mut count = 0;
        for i in 0..64 {
            for j in 0..64 {
                let (x, y) = (-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h);
                if x * x + y * y <= 1.0 {
                    count += 1;
                }
            }
        }
        assert_eq!(g.len(), count);
        assert!((g.weight_sum() - std::f64::consts::PI).abs() / std::f64::consts::PI < 0.02);
        assert!(g.nodes().iter().all(|p| disc.contains(p)));
    }

    #[test]
    fn midpoint_grid_rejects_tiny_targets() {
        assert!(SpectralGrid::midpoint(&square(), 1).is_err());
        struct Nowhere;
        impl Region for Nowhere {
            fn dim(&self) -> usize {
                2
            }
            fn contains(&self, _: &[f64]) -> bool {
                false
            }
            fn bounding_half_widths(&self) -> Vec<f64> {
                vec![1.0, 1.0]
            }
            fn volume(&self) -> f64 {
                0.0
            }
        }
        assert!(matches!(SpectralGrid::midpoint(&Nowhere, 2), Err(Error::EmptyGrid(4))));
    }

    #[test]
    fn enlarged_interval_grid() {
        let l = SpectrumSet::cube(1, 0.25).unwrap();
        let le = l.enlarged(0.025).unwrap();
        let g = SpectralGrid::midpoint(&le, 110).unwrap();
        assert_eq!(g.len(), 110);
        assert!((g.weight_sum() - 0.55).abs() < 1e-12);
        assert!((le.volume() - 0.55).abs() < 1e-15);
    }

    #[test]
    fn lattice_grid_is_closed_under_dilation() {
        let l = SpectrumSet::cube(1, 0.25).unwrap();
        let g = SpectralGrid::lattice(&l, 12).unwrap();
        assert_eq!(g.len(), 25);
        assert!((g.weight_sum() - 0.5).abs() < 1e-15);
        for (k, p) in g.nodes().iter().enumerate() {
            assert_eq!(g.lattice_index(p), Some(k));
            let twice: Vec<f64> = p.iter().map(|c| 2.0 * c).collect();
            assert_eq!(g.lattice_index(&twice).is_some(), l.contains(&twice));
        }
    }

    #[test]
    fn covering_unit_lattice_by_diamonds() {
        let diamond = square().polar();
        let lattice: Vec<Vec<f64>> = (-3..=3)
            .flat_map(|i| (-3..=3).map(move |j| vec![i as f64, j as f64]))
            .collect();
        let region = AxisBox::centered(2, 1.0);
        let rep = covering_check(&lattice, &diamond, &region, 0.05).unwrap();
        assert!(rep.covered, "uncovered: {:?}", &rep.witnesses[..rep.witnesses.len().min(5)]);
        assert_eq!(rep.grid_points, 41 * 41);
    }

    #[test]
    fn covering_even_lattice_leaves_holes() {
        let diamond = square().polar();
        let lattice: Vec<Vec<f64>> = (-2..=2)
            .flat_map(|i| (-2..=2).map(move |j| vec![2.0 * i as f64, 2.0 * j as f64]))
            .collect();
        let rep = covering_check(&lattice, &diamond, &AxisBox::centered(2, 1.0), 0.05).unwrap();
        assert!(!rep.covered);
        assert!(rep.witnesses.iter().any(|w| (w[0] - 1.0).abs() < 1e-9 && (w[1] - 1.0).abs() < 1e-9));
    }

    #[test]
    fn covering_singleton_region_and_empty_set() {
        let ball = SpectrumSet::new_ball(2, 1.0).unwrap();
        let region = AxisBox::new(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        let rep = covering_check(&[vec![0.0, 0.0]], &ball, &region, 0.1).unwrap();
        assert!(rep.covered);
        assert_eq!(rep.grid_points, 1);

        let rep = covering_check(&[], &ball, &AxisBox::centered(2, 1.0), 0.5).unwrap();
        assert!(!rep.covered);
        assert_eq!(rep.witnesses.len(), rep.grid_points);
    }

    #[test]
    fn json_roundtrip_and_schema() {
        let s = square();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"dim":2,"shape":"box","half_widths":[1.0,1.0]}"#);
        let back: SpectrumSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"dim":2,"shape":"ball"}"#;
        assert!(serde_json::from_str::<SpectrumSet>(bad).is_err());
    }

    fn arb_point() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-3.0f64..3.0, 2)
    }

    proptest! {
        #[test]
        fn gauge_is_homogeneous(p in arb_point(), t in -5.0f64..5.0) {
            for set in [square(), SpectrumSet::new_ball(2, 0.7).unwrap(), square().polar()] {
                let tp: Vec<f64> = p.iter().map(|c| c * t).collect();
                let lhs = set.lambda_norm(&tp);
                let rhs = t.abs() * set.lambda_norm(&p);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
            }
        }

        #[test]
        fn polar_membership_is_support_condition(p in arb_point()) {
            let verts = vec![vec![1.0, 0.5], vec![-1.0, -0.5], vec![0.2, 1.0], vec![-0.2, -1.0], vec![0.9, -0.8], vec![-0.9, 0.8]];
            let poly = SpectrumSet::new_polytope(verts.clone()).unwrap();
            let support = verts.iter().map(|v| dot(&p, v)).fold(f64::NEG_INFINITY, f64::max);
            let polar = poly.polar();
            if (support - 1.0).abs() > 1e-9 {
                prop_assert_eq!(polar.contains(&p), support <= 1.0);
            }
        }

        #[test]
        fn bipolar_agrees_with_original(p in arb_point()) {
            for set in [SpectrumSet::new_box(vec![0.6, 1.3]).unwrap(), SpectrumSet::new_ball(2, 1.7).unwrap()] {
                let bi = set.polar().polar();
                let g = set.lambda_norm(&p);
                if (g - 1.0).abs() > 1e-9 {
                    prop_assert_eq!(bi.contains(&p), set.contains(&p));
                }
            }
        }

        #[test]
        fn covering_is_monotone(extra in prop::collection::vec(arb_point(), 0..6)) {
            let body = SpectrumSet::new_ball(2, 0.8).unwrap();
            let base: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
            let region = AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
            let small = covering_check(&base, &body, &region, 0.1).unwrap();
            let mut sup = base.clone();
            sup.extend(extra);
            let big = covering_check(&sup, &body, &region, 0.1).unwrap();
            prop_assert!(big.witnesses.len() <= small.witnesses.len());
            if small.covered { prop_assert!(big.covered); }
        }
    }
}
