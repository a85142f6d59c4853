//! Fourier frames on the discretized Paley-Wiener space.
//!
//! For a sampling set `E` and a spectral grid the analysis operator is
//! `T F = (f(x))_{x∈E}` and its adjoint with respect to the weighted spectral
//! inner product is the synthesis `T^♯ v = Σ_x v_x e^{−2πi x·γ}`. The frame
//! operator `S = T^♯T` is self-adjoint and positive semidefinite; its extreme
//! eigenvalues are the frame bounds.
//!
//! A finite `E` cannot sample all of the discrete space (whose time functions
//! are periodic), so bounds meant to reflect the infinite set are taken over a
//! [`TestSubspace`] of signals concentrated inside a time box well within the
//! sampling window.

use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{covering_check, dot, AxisBox, GridLayout, SpectralGrid, SpectrumSet};
use crate::linalg::{cis, conjugate_gradient, dot_c, hermitian_eigen, hermitian_eigenvalues, C64};
use crate::sampling::SamplingSet;
use crate::spectral::{same_grid, weighted_inner, BandlimitedSignal};

/// Largest matrix side handed to the dense eigensolver.
pub const DENSE_LIMIT: usize = 4096;
/// Largest number of entries in a materialized analysis matrix.
pub const MATRIX_ENTRY_LIMIT: usize = 1 << 23;
/// Eigenvalues below this are reported as zero.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// Frame-bound estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub lower: f64,
    pub upper: f64,
    /// `upper / lower`, infinite when `lower` is zero.
    pub condition: f64,
    pub node_count: usize,
    pub sample_count: usize,
    /// Dimension of the space the bounds were taken over.
    pub space_dim: usize,
    pub method: String,
}

impl FrameReport {
    fn from_extremes(lower: f64, upper: f64, node_count: usize, sample_count: usize, space_dim: usize, method: &str) -> Self {
        let lower = if lower < EIGEN_FLOOR { 0.0 } else { lower };
        let upper = upper.max(0.0);
        let condition = if lower > 0.0 { upper / lower } else { f64::INFINITY };
        Self { lower, upper, condition, node_count, sample_count, space_dim, method: method.into() }
    }

    pub fn is_frame(&self) -> bool {
        self.lower > 0.0
    }
}

/// Sample values `f(x)`, `x ∈ E`, in the order of the set's points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleVector {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<C64>,
}

impl SampleVector {
    pub fn new(set: &SamplingSet, values: Vec<C64>) -> Result<Self> {
        if values.len() != set.len() {
            return Err(Error::DimensionMismatch { expected: set.len(), got: values.len() });
        }
        Ok(Self { points: set.points().to_vec(), values })
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// `(f(x))_{x∈E}` by direct quadrature.
pub fn analysis(f: &BandlimitedSignal, set: &SamplingSet) -> SampleVector {
    SampleVector { points: set.points().to_vec(), values: f.evaluate_many(set.points()) }
}

/// `G(γ_k) = Σ_x v_x e^{−2πi x·γ_k}`.
pub fn synthesis(v: &SampleVector, grid: Arc<SpectralGrid>) -> BandlimitedSignal {
    let coeffs = grid
        .nodes()
        .par_iter()
        .map(|g| v.points.iter().zip(&v.values).map(|(x, c)| c * cis(-dot(x, g))).sum())
        .collect();
    BandlimitedSignal::new(grid, coeffs).expect("one coefficient per node")
}

/// Sampling set together with the materialized analysis matrix
/// `T_{x,k} = w_k e^{2πi x·γ_k}`.
#[derive(Debug, Clone)]
pub struct FrameSystem {
    grid: Arc<SpectralGrid>,
    points: Vec<Vec<f64>>,
    t: DMatrix<C64>,
}

impl FrameSystem {
    pub fn new(set: &SamplingSet, grid: Arc<SpectralGrid>) -> Result<Self> {
        Self::from_points(set.points(), grid)
    }

    pub fn from_points(points: &[Vec<f64>], grid: Arc<SpectralGrid>) -> Result<Self> {
        let (m, n) = (points.len(), grid.len());
        if m * n > MATRIX_ENTRY_LIMIT {
            return Err(Error::Capacity { what: "analysis matrix entries", size: m * n, limit: MATRIX_ENTRY_LIMIT });
        }
        if let Some(p) = points.iter().find(|p| p.len() != grid.dim()) {
            return Err(Error::DimensionMismatch { expected: grid.dim(), got: p.len() });
        }
        let rows: Vec<Vec<C64>> = points
            .par_iter()
            .map(|x| grid.nodes().iter().zip(grid.weights()).map(|(g, w)| cis(dot(x, g)) * *w).collect())
            .collect();
        let t = DMatrix::from_fn(m, n, |i, k| rows[i][k]);
        Ok(Self { grid, points: points.to_vec(), t })
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
    pub fn sample_count(&self) -> usize {
        self.points.len()
    }

    /// `T F`.
    pub fn analyze(&self, coeffs: &[C64]) -> Vec<C64> {
        (&self.t * DVector::from_column_slice(coeffs)).iter().copied().collect()
    }

    /// `T^♯ v`.
    pub fn synthesize(&self, v: &[C64]) -> Vec<C64> {
        let tv = self.t.ad_mul(&DVector::from_column_slice(v));
        tv.iter().zip(self.grid.weights()).map(|(z, w)| z / *w).collect()
    }

    /// `S F = T^♯ T F`.
    pub fn apply_frame_operator(&self, coeffs: &[C64]) -> Vec<C64> {
        self.synthesize(&self.analyze(coeffs))
    }

    /// Matrix of `S` in the coordinates `u = W^{1/2}F`, where it is Hermitian.
    pub fn frame_matrix(&self) -> Result<DMatrix<C64>> {
        let n = self.grid.len();
        if n > DENSE_LIMIT {
            return Err(Error::Capacity { what: "frame matrix side", size: n, limit: DENSE_LIMIT });
        }
        let scale: Vec<f64> = self.grid.weights().iter().map(|w| 1.0 / w.sqrt()).collect();
        let mut m = self.t.ad_mul(&self.t);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] *= scale[i] * scale[j];
            }
        }
        Ok(m)
    }

    /// `T T^♯` on sample space, `(x, y) ↦ Σ_k w_k e^{2πi (x−y)·γ_k}`.
    pub fn sample_gram(&self) -> Result<DMatrix<C64>> {
        let m = self.points.len();
        if m > DENSE_LIMIT {
            return Err(Error::Capacity { what: "sample Gram side", size: m, limit: DENSE_LIMIT });
        }
        let inv_w = DVector::from_iterator(self.grid.len(), self.grid.weights().iter().map(|w| C64::new(1.0 / w, 0.0)));
        let scaled = DMatrix::from_fn(self.t.nrows(), self.t.ncols(), |i, k| self.t[(i, k)].conj() * inv_w[k]);
        Ok(&self.t * scaled.transpose())
    }

    /// Extreme eigenvalues of `S` over the whole discretized space, computed
    /// on whichever side of `T` is smaller. When `|E|` is below the node
    /// count the operator has a kernel and the lower bound is zero.
    pub fn bounds(&self) -> Result<FrameReport> {
        let (m, n) = (self.points.len(), self.grid.len());
        if m == 0 {
            return Ok(FrameReport::from_extremes(0.0, 0.0, n, 0, n, "empty sampling set"));
        }
        if n <= m {
            let vals = hermitian_eigenvalues(self.frame_matrix()?);
            Ok(FrameReport::from_extremes(vals[0], *vals.last().unwrap(), n, m, n, "dense eigensolve, spectral side"))
        } else {
            let vals = hermitian_eigenvalues(self.sample_gram()?);
            Ok(FrameReport::from_extremes(0.0, *vals.last().unwrap(), n, m, n, "dense eigensolve, sample side (kernel present)"))
        }
    }

    /// Extreme eigenvalues of `S` restricted to a test subspace.
    pub fn bounds_on(&self, subspace: &TestSubspace) -> Result<FrameReport> {
        same_grid(&self.grid, &subspace.grid)?;
        let k = subspace.dim();
        if k == 0 {
            return Err(Error::InvalidArgument("test subspace is empty".into()));
        }
        let tp = &self.t * &subspace.basis;
        let vals = hermitian_eigenvalues(tp.ad_mul(&tp));
        Ok(FrameReport::from_extremes(
            vals[0],
            *vals.last().unwrap(),
            self.grid.len(),
            self.points.len(),
            k,
            "dense eigensolve on concentrated subspace",
        ))
    }

    /// Solves `S F = T^♯ v` by conjugate gradients in the weighted inner
    /// product when `|E|` is at least the node count, and the sample-space
    /// system `T T^♯ c = v`, `F = T^♯ c` (minimum-norm solution) otherwise.
    pub fn reconstruct(&self, v: &[C64], tol: f64, max_iter: usize) -> Result<Reconstruction> {
        if v.len() != self.points.len() {
            return Err(Error::DimensionMismatch { expected: self.points.len(), got: v.len() });
        }
        let weights = self.grid.weights().to_vec();
        let (coeffs, out, space) = if self.points.len() >= self.grid.len() {
            let rhs = self.synthesize(v);
            let out = conjugate_gradient(
                |p| self.apply_frame_operator(p),
                &rhs,
                |a, b| weighted_inner(&weights, a, b),
                tol,
                max_iter,
            );
            (out.x.clone(), out, "spectral")
        } else {
            let gram = self.sample_gram()?;
            let out = conjugate_gradient(
                |p| (&gram * DVector::from_column_slice(p)).iter().copied().collect(),
                v,
                dot_c,
                tol,
                max_iter,
            );
            (self.synthesize(&out.x), out, "sample")
        };
        if !out.converged && out.iterations < max_iter {
            return Err(Error::NotAFrame { lower: 0.0, condition: f64::INFINITY });
        }
        Ok(Reconstruction {
            signal: BandlimitedSignal::new(self.grid.clone(), coeffs)?,
            iterations: out.iterations,
            residual: out.residual,
            converged: out.converged,
            history: out.history,
            space: space.into(),
        })
    }
}

/// Outcome of an iterative reconstruction.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub signal: BandlimitedSignal,
    pub iterations: usize,
    /// Final relative residual of the normal equations.
    pub residual: f64,
    /// `false` when `max_iter` ran out first; the best iterate is returned.
    pub converged: bool,
    pub history: Vec<f64>,
    /// Which normal equations were solved, `"spectral"` or `"sample"`.
    pub space: String,
}

impl Reconstruction {
    /// CSV `iteration,residual`.
    pub fn write_history_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "residual"])?;
        for (i, r) in self.history.iter().enumerate() {
            w.write_record([i.to_string(), r.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Convenience wrapper around [`FrameSystem::bounds`].
pub fn frame_bounds(set: &SamplingSet, grid: Arc<SpectralGrid>) -> Result<FrameReport> {
    FrameSystem::new(set, grid)?.bounds()
}

/// Convenience wrapper around [`FrameSystem::reconstruct`].
pub fn reconstruct(v: &SampleVector, grid: Arc<SpectralGrid>, tol: f64, max_iter: usize) -> Result<Reconstruction> {
    FrameSystem::from_points(&v.points, grid)?.reconstruct(&v.values, tol, max_iter)
}

/// Signals whose time-domain energy is concentrated in a box.
///
/// The concentration operator `F ↦ 1_R f` restricted to the grid is the
/// Hermitian matrix `C_{lk} = √(w_k w_l) ∫_R e^{2πi x·(γ_k−γ_l)} dx`, with a
/// closed-form product of sinc factors for a box `R`. Eigenvectors with
/// eigenvalue at least `1 − leakage` keep all but a `leakage` fraction of
/// their energy (per period) inside `R`, and are orthonormal in the weighted
/// spectral inner product once mapped back through `W^{−1/2}`.
#[derive(Debug, Clone)]
pub struct TestSubspace {
    grid: Arc<SpectralGrid>,
    /// Columns are the spectral coefficients of an orthonormal basis.
    basis: DMatrix<C64>,
    pub region: AxisBox,
    pub leakage: f64,
    /// Concentration eigenvalues of the retained vectors.
    pub concentrations: Vec<f64>,
}

impl TestSubspace {
    pub fn concentrated(grid: Arc<SpectralGrid>, region: &AxisBox, leakage: f64) -> Result<Self> {
        let n = grid.len();
        if n > DENSE_LIMIT {
            return Err(Error::Capacity { what: "concentration matrix side", size: n, limit: DENSE_LIMIT });
        }
        if region.dim() != grid.dim() {
            return Err(Error::DimensionMismatch { expected: grid.dim(), got: region.dim() });
        }
        if !(leakage > 0.0 && leakage < 1.0) {
            return Err(Error::InvalidArgument(format!("leakage must lie in (0, 1), got {leakage}")));
        }
        let centre: Vec<f64> = region.lo.iter().zip(&region.hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let length: Vec<f64> = region.lo.iter().zip(&region.hi).map(|(a, b)| b - a).collect();
        let nodes = grid.nodes();
        let sw: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
        let mut c = DMatrix::<C64>::zeros(n, n);
        for l in 0..n {
            for k in 0..=l {
                let mut v = C64::new(sw[k] * sw[l], 0.0);
                for i in 0..grid.dim() {
                    let delta = nodes[k][i] - nodes[l][i];
                    v *= cis(centre[i] * delta) * (length[i] * sinc(length[i] * delta));
                }
                c[(l, k)] = v;
                c[(k, l)] = v.conj();
            }
        }
        let (vals, vecs) = hermitian_eigen(c);
        let keep: Vec<usize> = (0..n).filter(|&j| vals[j] >= 1.0 - leakage).collect();
        let basis = DMatrix::from_fn(n, keep.len(), |r, j| vecs[(r, keep[j])] / sw[r]);
        Ok(Self {
            grid,
            basis,
            region: region.clone(),
            leakage,
            concentrations: keep.iter().map(|&j| vals[j]).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    /// Signal with coordinates `c` in the orthonormal basis.
    pub fn signal(&self, c: &[C64]) -> Result<BandlimitedSignal> {
        if c.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: c.len() });
        }
        let coeffs = &self.basis * DVector::from_column_slice(c);
        BandlimitedSignal::new(self.grid.clone(), coeffs.iter().copied().collect())
    }

    /// Unit-norm signal with complex normal coordinates.
    pub fn random_signal(&self, seed: u64) -> BandlimitedSignal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<C64> = (0..self.dim())
            .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        let mut f = self.signal(&c).expect("coordinates match dimension");
        f.normalize();
        f
    }
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-12 {
        1.0
    } else {
        let a = std::f64::consts::PI * t;
        a.sin() / a
    }
}

/// Lower/middle/upper terms of an inequality chain `lhs ≤ mid ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
}

impl Chain {
    pub const ZERO: Chain = Chain { lhs: 0.0, mid: 0.0, rhs: 0.0 };

    /// `lhs ≤ mid ≤ rhs` up to a relative slack for rounding.
    pub fn holds(&self, rel_slack: f64) -> bool {
        self.lhs <= self.mid * (1.0 + rel_slack) + f64::MIN_POSITIVE
            && self.mid <= self.rhs * (1.0 + rel_slack) + f64::MIN_POSITIVE
    }
}

/// Constants for the three-dilate inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeDilateConstants {
    /// `Â^{1/2} = 1 / (K̂ ‖h‖₂ Σ_{j=1}^{3} j^{−d/2})`.
    pub a_sqrt: f64,
    /// `B̂^{1/2} = Σ_{j=1}^{3} j^{−1} B_j^{1/2}` with `B_j` the Bessel bound of
    /// `E/j`.
    pub b_sqrt: f64,
    pub bessel: [f64; 3],
}

impl ThreeDilateConstants {
    /// `k_hat` and `h_norm` come from the balayage module; the Bessel bounds
    /// are full-space upper frame bounds of the contracted sets on `grid`.
    pub fn new(set: &SamplingSet, grid: Arc<SpectralGrid>, k_hat: f64, h_norm: f64) -> Result<Self> {
        let d = grid.dim() as f64;
        let mut bessel = [0.0; 3];
        for (j, b) in bessel.iter_mut().enumerate() {
            *b = frame_bounds(&set.contract((j + 1) as f64), grid.clone())?.upper;
        }
        let dilation_sum: f64 = (1..=3).map(|j| (j as f64).powf(-d / 2.0)).sum();
        Ok(Self {
            a_sqrt: 1.0 / (k_hat * h_norm * dilation_sum),
            b_sqrt: (1..=3).map(|j| bessel[j - 1].sqrt() / j as f64).sum(),
            bessel,
        })
    }
}

/// Terms of the three-dilate inequality for one signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeDilateTerms {
    /// `∫_Λ |F(γ) + F(2γ) + F(3γ)|² dγ / ‖F‖`.
    pub dilate_ratio: f64,
    /// `Σ_j j^{−1} (Σ_x |f(x/j)|²)^{1/2}`.
    pub mid: f64,
    /// `‖F‖`.
    pub norm: f64,
    /// `(Â^{1/2}·dilate_ratio, mid, B̂^{1/2}·norm)`.
    pub chain: Chain,
}

/// Evaluates the three-dilate chain. The grid must be a lattice grid whose
/// half-node count is a multiple of 6, so that `2γ` and `3γ` are exact node
/// lookups; `F` is taken as zero outside `Λ`.
pub fn three_dilate_check(f: &BandlimitedSignal, set: &SamplingSet, constants: &ThreeDilateConstants) -> Result<ThreeDilateTerms> {
    let grid = f.grid();
    let GridLayout::Lattice { step, half_nodes } = grid.layout() else {
        return Err(Error::NotNested("three-dilate check needs a lattice grid".into()));
    };
    if half_nodes % 6 != 0 {
        return Err(Error::NotNested(format!("half-node count {half_nodes} is not a multiple of 6")));
    }
    let key = |g: &[f64], j: f64| -> Vec<i64> { g.iter().zip(step).map(|(c, s)| (j * c / s).round() as i64).collect() };
    let index: HashMap<Vec<i64>, usize> = grid.nodes().iter().enumerate().map(|(k, g)| (key(g, 1.0), k)).collect();
    let coeffs = f.coeffs();
    let j_f: Vec<C64> = grid
        .nodes()
        .iter()
        .map(|g| {
            (1..=3)
                .filter_map(|j| index.get(&key(g, j as f64)).map(|&k| coeffs[k]))
                .sum()
        })
        .collect();
    let norm = f.norm();
    if norm == 0.0 {
        return Ok(ThreeDilateTerms { dilate_ratio: 0.0, mid: 0.0, norm: 0.0, chain: Chain::ZERO });
    }
    let dilate_ratio = weighted_inner(grid.weights(), &j_f, &j_f).re / norm;
    let mid: f64 = (1..=3)
        .map(|j| {
            let pts = set.contract(j as f64);
            let e: f64 = f.evaluate_many(pts.points()).iter().map(|v| v.norm_sqr()).sum();
            e.sqrt() / j as f64
        })
        .sum();
    Ok(ThreeDilateTerms {
        dilate_ratio,
        mid,
        norm,
        chain: Chain { lhs: constants.a_sqrt * dilate_ratio, mid, rhs: constants.b_sqrt * norm },
    })
}

/// Constants for the weighted inequality: `A = 1/(K̂ ‖h‖₂²)` and the Bessel
/// bound `B₁` of `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedConstants {
    pub a: f64,
    pub bessel: f64,
}

impl WeightedConstants {
    pub fn new(set: &SamplingSet, grid: Arc<SpectralGrid>, k_hat: f64, h_norm: f64) -> Result<Self> {
        Ok(Self { a: 1.0 / (k_hat * h_norm * h_norm), bessel: frame_bounds(set, grid)?.upper })
    }
}

/// Weighted chain `A(∫|F|²G)²/∫|F|² ≤ Σ_x |(FG)^∨(x)|² ≤ B₁‖G‖∞² ∫|F|²` with
/// `G` given by its values on the grid nodes.
pub fn weighted_frame_check(
    f: &BandlimitedSignal,
    weight: &[f64],
    set: &SamplingSet,
    constants: &WeightedConstants,
) -> Result<Chain> {
    let grid = f.grid();
    if weight.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: weight.len() });
    }
    if let Some(g) = weight.iter().find(|g| !(**g >= 0.0) || !g.is_finite()) {
        return Err(Error::InvalidArgument(format!("weight must be nonnegative and bounded, got {g}")));
    }
    let energy = f.norm_sqr();
    if energy == 0.0 {
        return Ok(Chain::ZERO);
    }
    let weighted: f64 = grid.weights().iter().zip(f.coeffs()).zip(weight).map(|((w, c), g)| w * c.norm_sqr() * g).sum();
    let fg = BandlimitedSignal::new(grid.clone(), f.coeffs().iter().zip(weight).map(|(c, g)| c * *g).collect())?;
    let mid: f64 = fg.evaluate_many(set.points()).iter().map(|v| v.norm_sqr()).sum();
    let sup = weight.iter().copied().fold(0.0, f64::max);
    Ok(Chain {
        lhs: constants.a * weighted * weighted / energy,
        mid,
        rhs: constants.bessel * sup * sup * energy,
    })
}

/// Outcome of [`covering_frame_experiment`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoveringExperiment {
    pub covered: bool,
    pub uncovered_points: usize,
    pub witnesses: Vec<Vec<f64>>,
    pub grid_points: usize,
    pub resolution: f64,
    pub rho: f64,
    /// `ρ < 1/4`.
    pub rho_ok: bool,
    /// Whether the theorem predicts a frame (`covered ∧ rho_ok`).
    pub predicted: bool,
    /// `None` when no prediction is made, else whether `A > 0` was observed.
    pub confirmed: Option<bool>,
    pub report: FrameReport,
}

/// Parameters of the frame half of [`covering_frame_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringFrameParams {
    /// Nodes per axis of the `ρΛ` grid.
    pub nodes: usize,
    /// Box in which test signals are concentrated.
    pub subspace_region: AxisBox,
    pub leakage: f64,
}

/// Checks that translates of `Λ*` by `E` cover `region`, whether `ρ < 1/4`,
/// and estimates frame bounds of `E` for `PW_{ρΛ}` on a concentrated
/// subspace.
pub fn covering_frame_experiment(
    spectrum: &SpectrumSet,
    set: &SamplingSet,
    rho: f64,
    region: &AxisBox,
    resolution: f64,
    params: &CoveringFrameParams,
) -> Result<CoveringExperiment> {
    let cover = covering_check(set.points(), &spectrum.polar(), region, resolution)?;
    let scaled = spectrum.scale(rho)?;
    let grid = Arc::new(SpectralGrid::midpoint(&scaled, params.nodes)?);
    let subspace = TestSubspace::concentrated(grid.clone(), &params.subspace_region, params.leakage)?;
    let report = FrameSystem::new(set, grid)?.bounds_on(&subspace)?;
    let rho_ok = rho < 0.25;
    let predicted = cover.covered && rho_ok;
    Ok(CoveringExperiment {
        covered: cover.covered,
        uncovered_points: cover.witnesses.len(),
        witnesses: cover.witnesses.into_iter().take(100).collect(),
        grid_points: cover.grid_points,
        resolution,
        rho,
        rho_ok,
        predicted,
        confirmed: predicted.then_some(report.is_frame()),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band(h: f64, n: usize) -> Arc<SpectralGrid> {
        Arc::new(SpectralGrid::midpoint(&SpectrumSet::cube(1, h).unwrap(), n).unwrap())
    }

    fn integers(delta: f64, half: f64) -> SamplingSet {
        SamplingSet::uniform(delta, AxisBox::centered(1, half)).unwrap()
    }

    #[test]
    fn constant_spectrum_samples_to_a_spike() {
        let f = BandlimitedSignal::from_fn(band(0.5, 512), |_| C64::new(1.0, 0.0));
        let v = analysis(&f, &integers(1.0, 10.0));
        for (x, val) in v.points.iter().zip(&v.values) {
            let expect = if x[0] == 0.0 { 1.0 } else { 0.0 };
            assert!((val - C64::new(expect, 0.0)).norm() < 1e-2, "x = {x:?}");
        }
        let zero = analysis(&BandlimitedSignal::zero(band(0.5, 64)), &integers(1.0, 10.0));
        assert!(zero.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn synthesis_of_spike_at_origin_is_constant() {
        let e = SamplingSet::from_1d(&[0.0]).unwrap();
        let g = synthesis(&SampleVector::new(&e, vec![C64::new(1.0, 0.0)]).unwrap(), band(0.5, 32));
        assert!(g.coeffs().iter().all(|c| (c - C64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn synthesis_is_adjoint_of_analysis() {
        let grid = band(0.5, 128);
        let e = integers(0.7, 20.0);
        for seed in 0..5 {
            let f = BandlimitedSignal::random(grid.clone(), seed);
            let v: Vec<C64> = (0..e.len()).map(|i| C64::new((i as f64 * 0.37 + seed as f64).sin(), (i as f64).cos())).collect();
            let v = SampleVector::new(&e, v).unwrap();
            let lhs = dot_c(&analysis(&f, &e).values, &v.values);
            let rhs = crate::spectral::pw_inner(&f, &synthesis(&v, grid.clone())).unwrap();
            assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn frame_matrix_is_hermitian() {
        let sys = FrameSystem::new(&integers(0.5, 40.0), band(0.5, 128)).unwrap();
        assert!(crate::linalg::hermitian_defect(&sys.frame_matrix().unwrap()) <= 1e-12);
    }

    #[test]
    fn rayleigh_quotients_are_sandwiched() {
        let grid = band(0.5, 128);
        let sys = FrameSystem::new(&integers(0.5, 80.0), grid.clone()).unwrap();
        let rep = sys.bounds().unwrap();
        assert!(rep.lower > 0.0);
        for seed in 0..50 {
            let f = BandlimitedSignal::random(grid.clone(), seed);
            let q: f64 = sys.analyze(f.coeffs()).iter().map(|v| v.norm_sqr()).sum::<f64>() / f.norm_sqr();
            assert!(q >= rep.lower * (1.0 - 1e-9) && q <= rep.upper * (1.0 + 1e-9));
        }
    }

    #[test]
    fn adding_samples_never_decreases_bounds() {
        let grid = band(0.5, 64);
        let base = integers(1.0, 40.0);
        let more = base.union(&[vec![0.5], vec![3.3], vec![-7.25]]).unwrap();
        let a = FrameSystem::new(&base, grid.clone()).unwrap().bounds().unwrap();
        let b = FrameSystem::new(&more, grid).unwrap().bounds().unwrap();
        assert!(b.lower >= a.lower - 1e-12 && b.upper >= a.upper - 1e-12);
    }

    #[test]
    fn bessel_bound_holds_for_contracted_sets() {
        let grid = band(0.25, 128);
        let e = integers(0.5, 20.0);
        for j in 1..=3 {
            let ej = e.contract(j as f64);
            let b = frame_bounds(&ej, grid.clone()).unwrap().upper;
            assert!(b.is_finite());
            for seed in 0..10 {
                let f = BandlimitedSignal::random(grid.clone(), seed);
                let s: f64 = analysis(&f, &ej).values.iter().map(|v| v.norm_sqr()).sum();
                assert!(s <= b * f.norm_sqr() * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn subspace_is_orthonormal_and_concentrated() {
        let grid = band(0.5, 256);
        let sub = TestSubspace::concentrated(grid.clone(), &AxisBox::centered(1, 20.0), 1e-8).unwrap();
        assert!(sub.dim() > 25 && sub.dim() < 45, "dim {}", sub.dim());
        for seed in 0..3 {
            let f = sub.random_signal(seed);
            assert!((f.norm() - 1.0).abs() < 1e-12);
            // Energy of the samples at spacing 1/4 outside the box is tiny.
            let far: f64 = (0..4 * 200)
                .map(|i| -128.0 + i as f64 / 4.0)
                .filter(|x| x.abs() > 22.0)
                .map(|x| f.evaluate(&[x]).norm_sqr() / 4.0)
                .sum();
            assert!(far < 1e-6, "leakage {far}");
        }
    }

    #[test]
    fn nyquist_subspace_bounds() {
        let grid = band(0.5, 256);
        let sub = TestSubspace::concentrated(grid.clone(), &AxisBox::centered(1, 20.0), 1e-8).unwrap();
        let one = FrameSystem::new(&integers(1.0, 30.0), grid.clone()).unwrap().bounds_on(&sub).unwrap();
        assert!((one.lower - 1.0).abs() < 0.05 && (one.upper - 1.0).abs() < 0.05, "{one:?}");
        let two = FrameSystem::new(&integers(2.0, 30.0), grid).unwrap().bounds_on(&sub).unwrap();
        assert_eq!(two.lower, 0.0);
        assert!(two.condition.is_infinite());
    }

    #[test]
    fn reconstruct_zero_and_oversampled() {
        let grid = band(0.5, 64);
        // One period of the 64-node discrete space is 64 time units.
        let e = integers(0.5, 32.0);
        let sys = FrameSystem::new(&e, grid.clone()).unwrap();
        let zero = sys.reconstruct(&vec![C64::new(0.0, 0.0); e.len()], 1e-10, 50).unwrap();
        assert_eq!(zero.iterations, 0);
        assert_eq!(zero.signal.norm(), 0.0);
        let f = BandlimitedSignal::random(grid.clone(), 5);
        let rec = sys.reconstruct(&sys.analyze(f.coeffs()), 1e-12, 200).unwrap();
        let err = rec.signal.combine(C64::new(1.0, 0.0), &f, C64::new(-1.0, 0.0)).unwrap().norm();
        assert!(err <= 1e-6, "err {err}");
        assert!(rec.converged);
    }

    #[test]
    fn sample_side_reconstruction_is_minimum_norm() {
        let grid = band(0.5, 64);
        let e = integers(1.0, 5.0);
        let sys = FrameSystem::new(&e, grid.clone()).unwrap();
        let f = BandlimitedSignal::random(grid, 1);
        let v = sys.analyze(f.coeffs());
        let rec = sys.reconstruct(&v, 1e-12, 200).unwrap();
        assert_eq!(rec.space, "sample");
        let back = sys.analyze(rec.signal.coeffs());
        assert!(back.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-8));
        assert!(rec.signal.norm() <= f.norm() + 1e-9);
    }

    #[test]
    fn three_dilate_requires_nesting() {
        let l = SpectrumSet::cube(1, 0.25).unwrap();
        let bad = Arc::new(SpectralGrid::lattice(&l, 10).unwrap());
        let f = BandlimitedSignal::random(bad.clone(), 0);
        let c = ThreeDilateConstants { a_sqrt: 1.0, b_sqrt: 1.0, bessel: [1.0; 3] };
        assert!(matches!(three_dilate_check(&f, &integers(0.5, 5.0), &c), Err(Error::NotNested(_))));
        let mid = Arc::new(SpectralGrid::midpoint(&l, 12).unwrap());
        let f = BandlimitedSignal::random(mid, 0);
        assert!(matches!(three_dilate_check(&f, &integers(0.5, 5.0), &c), Err(Error::NotNested(_))));
    }

    #[test]
    fn three_dilate_separated_dilates() {
        let l = SpectrumSet::cube(1, 0.25).unwrap();
        let grid = Arc::new(SpectralGrid::lattice(&l, 24).unwrap());
        let step = 0.25 / 24.0;
        // F lives on the nodes ±18·step, so F(γ), F(2γ), F(3γ) have disjoint
        // supports of one node each and ∫|J_F|² = 3‖F‖².
        let f = BandlimitedSignal::from_fn(grid.clone(), |g| {
            if ((g[0].abs() / step).round() as i64) == 18 { C64::new(1.0, g[0]) } else { C64::new(0.0, 0.0) }
        });
        let c = ThreeDilateConstants { a_sqrt: 1.0, b_sqrt: 1.0, bessel: [1.0; 3] };
        let t = three_dilate_check(&f, &integers(0.5, 10.0), &c).unwrap();
        assert!((t.dilate_ratio - 3.0 * f.norm()).abs() < 1e-12 * f.norm());
        let z = three_dilate_check(&BandlimitedSignal::zero(grid), &integers(0.5, 10.0), &c).unwrap();
        assert_eq!(z.chain, Chain::ZERO);
    }

    #[test]
    fn weighted_check_degenerate_weights() {
        let grid = band(0.25, 64);
        let e = integers(0.5, 20.0);
        let f = BandlimitedSignal::random(grid.clone(), 2);
        let c = WeightedConstants { a: 0.1, bessel: frame_bounds(&e, grid.clone()).unwrap().upper };
        let zero = weighted_frame_check(&f, &vec![0.0; 64], &e, &c).unwrap();
        assert_eq!((zero.lhs, zero.mid), (0.0, 0.0));
        let one = weighted_frame_check(&f, &vec![1.0; 64], &e, &c).unwrap();
        let plain: f64 = analysis(&f, &e).values.iter().map(|v| v.norm_sqr()).sum();
        assert!((one.mid - plain).abs() < 1e-12 * plain);
        assert!(weighted_frame_check(&f, &vec![-1.0; 64], &e, &c).is_err());
    }

    #[test]
    fn covering_experiment_flags() {
        let l = SpectrumSet::cube(1, 1.0).unwrap();
        let params = CoveringFrameParams { nodes: 128, subspace_region: AxisBox::centered(1, 30.0), leakage: 1e-8 };
        let region = AxisBox::centered(1, 30.0);
        let e = integers(1.0, 40.0);
        let ok = covering_frame_experiment(&l, &e, 0.2, &region, 0.05, &params).unwrap();
        assert!(ok.covered && ok.rho_ok && ok.confirmed == Some(true));
        assert!(ok.report.condition < 1e3, "{:?}", ok.report);
        let wide = covering_frame_experiment(&l, &e, 0.3, &region, 0.05, &params).unwrap();
        assert!(wide.covered && !wide.rho_ok && wide.confirmed.is_none());
        let sparse = SamplingSet::uniform(3.0, AxisBox::centered(1, 120.0)).unwrap();
        let params = CoveringFrameParams { nodes: 256, subspace_region: AxisBox::centered(1, 100.0), leakage: 1e-8 };
        let bad = covering_frame_experiment(&l, &sparse, 0.2, &AxisBox::centered(1, 30.0), 0.05, &params).unwrap();
        assert!(!bad.covered && bad.confirmed.is_none());
        assert!(bad.report.lower <= 1e-6, "{:?}", bad.report);
    }
}
