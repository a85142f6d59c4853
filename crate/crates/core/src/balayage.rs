//! Ingham-type windows and balayage coefficient systems.
//!
//! Balayage of `δ_y` onto `E` for the spectrum `Λ_ε` means finding
//! coefficients `a_x(y)` with `Σ_{x∈E} a_x(y) e^{−2πi x·γ} = e^{−2πi y·γ}` on
//! `Λ_ε`. The solver fits this identity on a quadrature grid of `Λ_ε` with an
//! ℓ¹ penalty, and the window `h` (with `ĥ` supported in `B̄(0, ε)` and
//! `h(0) = 1`) turns the coefficients into the reproducing identity
//! `f(y) = Σ_x f(x) a_x(y) h(x − y)` for every trigonometric polynomial `f`
//! with frequencies in `Λ`.
//!
//! Coefficients never depend on the frequency variable.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, norm2, SpectralGrid, SpectrumSet};
use crate::linalg::{cis, solve_psd, C64};
use crate::sampling::SamplingSet;
use crate::spectral::TrigPolynomial;

/// Relative eigenvalue cutoff used when the normal equations are singular.
pub const SPECTRAL_CUTOFF: f64 = 1e-10;

/// Window `h = β²` where `β̂` is a smooth bump sampled on a lattice in
/// `B(0, ε/2)`, so that `ĥ = β̂ ∗ β̂` is a nonnegative discrete measure
/// supported strictly inside `B(0, ε)`.
///
/// The masses are normalized to `β(0) = 1`, which gives `h(0) = 1` and
/// `0 ≤ h ≤ 1`. Because `ĥ` is discrete, `h` is a trigonometric polynomial
/// with period `1/Δ` (`Δ` the lattice step); within its first period it
/// decays like the transform of a `C^∞` bump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InghamWindow {
    pub dim: usize,
    pub epsilon: f64,
    /// Lattice step `Δ`.
    pub step: f64,
    /// Nodes `ζ_m` of `β̂` and their masses `b_m` (summing to 1).
    profile_nodes: Vec<Vec<f64>>,
    profile_masses: Vec<f64>,
    /// Lattice indices and masses of `ĥ = β̂ ∗ β̂`.
    spectral_index: Vec<Vec<i64>>,
    spectral_masses: Vec<f64>,
}

impl InghamWindow {
    /// `profile_nodes` is the number of lattice steps from the centre of
    /// `B(0, ε/2)` to its edge along each axis.
    pub fn new(epsilon: f64, dim: usize, profile_nodes: usize) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidArgument(format!("dimension must be 1 or 2, got {dim}")));
        }
        if profile_nodes < 2 {
            return Err(Error::InvalidArgument("window profile needs at least 2 nodes".into()));
        }
        let p = profile_nodes as i64;
        let radius = epsilon / 2.0;
        let step = radius / (p + 1) as f64;
        let bump = |t: f64| if t < 1.0 { (-1.0 / (1.0 - t * t)).exp() } else { 0.0 };
        let mut index = Vec::new();
        let mut masses = Vec::new();
        let mut visit = |m: Vec<i64>| {
            let r = m.iter().map(|&i| (i as f64).powi(2)).sum::<f64>().sqrt() / (p + 1) as f64;
            let b = bump(r);
            if b > 0.0 {
                index.push(m);
                masses.push(b);
            }
        };
        if dim == 1 {
            (-p..=p).for_each(|i| visit(vec![i]));
        } else {
            for i in -p..=p {
                for j in -p..=p {
                    visit(vec![i, j]);
                }
            }
        }
        let total: f64 = masses.iter().sum();
        masses.iter_mut().for_each(|b| *b /= total);
        let mut conv: HashMap<Vec<i64>, f64> = HashMap::new();
        for (a, ma) in index.iter().zip(&masses) {
            for (b, mb) in index.iter().zip(&masses) {
                let key: Vec<i64> = a.iter().zip(b).map(|(u, v)| u + v).collect();
                *conv.entry(key).or_insert(0.0) += ma * mb;
            }
        }
        let mut spectral: Vec<(Vec<i64>, f64)> = conv.into_iter().collect();
        spectral.sort_by(|a, b| a.0.cmp(&b.0));
        let profile_nodes = index.iter().map(|m| m.iter().map(|&i| i as f64 * step).collect()).collect();
        Ok(Self {
            dim,
            epsilon,
            step,
            profile_nodes,
            profile_masses: masses,
            spectral_index: spectral.iter().map(|s| s.0.clone()).collect(),
            spectral_masses: spectral.iter().map(|s| s.1).collect(),
        })
    }

    /// `β(x) = Σ_m b_m cos(2π x·ζ_m)` (the profile is symmetric).
    fn beta(&self, x: &[f64]) -> f64 {
        self.profile_nodes
            .iter()
            .zip(&self.profile_masses)
            .map(|(z, b)| b * (std::f64::consts::TAU * dot(x, z)).cos())
            .sum()
    }

    /// `h(x) = β(x)²`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let b = self.beta(x);
        b * b
    }

    /// Density of `ĥ` at `γ`: the mass of the nearest lattice node divided
    /// by the cell volume, and exactly zero outside `B̄(0, ε)`.
    pub fn spectral_value(&self, gamma: &[f64]) -> f64 {
        if norm2(gamma) > self.epsilon {
            return 0.0;
        }
        let key: Vec<i64> = gamma.iter().map(|g| (g / self.step).round() as i64).collect();
        match self.spectral_index.binary_search(&key) {
            Ok(i) => self.spectral_masses[i] / self.step.powi(self.dim as i32),
            Err(_) => 0.0,
        }
    }

    /// Frequencies and masses of the discrete measure `ĥ`.
    pub fn spectral_measure(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        self.spectral_index
            .iter()
            .zip(&self.spectral_masses)
            .map(|(m, w)| (m.iter().map(|&i| i as f64 * self.step).collect(), *w))
    }

    /// Largest `‖γ‖` carrying mass in `ĥ`.
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_measure().map(|(g, _)| norm2(&g)).fold(0.0, f64::max)
    }

    /// `‖h‖₂` over one period, `(Σ_n m_n² / Δ^d)^{1/2}` by Parseval.
    pub fn l2_norm(&self) -> f64 {
        (self.spectral_masses.iter().map(|m| m * m).sum::<f64>() / self.step.powi(self.dim as i32)).sqrt()
    }

    /// `max |h(x)| (1 + ‖x‖)⁴` over radii in `[r0, r1]` (sampled along the
    /// first axis at spacing 0.1).
    pub fn decay_constant(&self, r0: f64, r1: f64) -> f64 {
        let n = ((r1 - r0) / 0.1).ceil() as usize;
        (0..=n)
            .map(|i| {
                let r = r0 + (r1 - r0) * i as f64 / n as f64;
                let mut x = vec![0.0; self.dim];
                x[0] = r;
                self.eval(&x).abs() * (1.0 + r).powi(4)
            })
            .fold(0.0, f64::max)
    }
}

/// Convenience constructor matching [`InghamWindow::new`].
pub fn ingham_window(epsilon: f64, dim: usize, profile_nodes: usize) -> Result<InghamWindow> {
    InghamWindow::new(epsilon, dim, profile_nodes)
}

/// Default enlargement `ε = 0.05 · diam(Λ)`.
pub fn default_epsilon(spectrum: &SpectrumSet) -> f64 {
    0.05 * spectrum.diameter()
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalayageParams {
    /// Fit tolerance `η` on the maximum pointwise error over the grid.
    pub tolerance: f64,
    /// ℓ¹ penalty weight.
    pub reg: f64,
    pub max_iter: usize,
}

impl Default for BalayageParams {
    fn default() -> Self {
        Self { tolerance: 1e-6, reg: 1e-8, max_iter: 50 }
    }
}

/// Coefficients `a_x(y)` for one centre `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalayageSolution {
    pub y: Vec<f64>,
    pub coeffs: Vec<C64>,
    /// `max_k |Σ_x a_x e^{−2πi x·γ_k} − e^{−2πi y·γ_k}|` over the grid.
    pub fit_residual: f64,
    /// `Σ_x |a_x|`.
    pub l1_mass: f64,
    pub iterations: usize,
}

/// JSON layout of a solution with coefficients split into real and
/// imaginary arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionExport {
    pub y: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub coeffs_re: Vec<f64>,
    pub coeffs_im: Vec<f64>,
    pub fit_residual: f64,
    pub l1_mass: f64,
    pub iterations: usize,
}

impl BalayageSolution {
    pub fn export(&self, points: &[Vec<f64>]) -> SolutionExport {
        SolutionExport {
            y: self.y.clone(),
            points: points.to_vec(),
            coeffs_re: self.coeffs.iter().map(|c| c.re).collect(),
            coeffs_im: self.coeffs.iter().map(|c| c.im).collect(),
            fit_residual: self.fit_residual,
            l1_mass: self.l1_mass,
            iterations: self.iterations,
        }
    }

    pub fn write_json<W: std::io::Write>(&self, points: &[Vec<f64>], out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, &self.export(points))?;
        Ok(())
    }
}

/// Writes `y_1..y_d,residual,l1_mass` rows for a batch of solutions.
pub fn write_batch_csv<W: std::io::Write>(solutions: &[Arc<BalayageSolution>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let dim = solutions.first().map_or(1, |s| s.y.len());
    let mut header: Vec<String> = (1..=dim).map(|i| format!("y_{i}")).collect();
    header.extend(["residual".to_string(), "l1_mass".to_string()]);
    w.write_record(&header)?;
    for s in solutions {
        let mut row: Vec<String> = s.y.iter().map(|v| v.to_string()).collect();
        row.push(s.fit_residual.to_string());
        row.push(s.l1_mass.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Balayage onto a fixed `E` over a fixed grid of `Λ_ε`, with memoized
/// solves keyed by the exact bit pattern of `y`.
#[derive(Debug)]
pub struct BalayageSolver {
    points: Vec<Vec<f64>>,
    grid: Arc<SpectralGrid>,
    params: BalayageParams,
    /// `e^{−2πi x·γ_k}`, rows indexed by grid node.
    exps: DMatrix<C64>,
    /// `Φ*Φ` with `Φ_{k,x} = √w_k e^{−2πi x·γ_k}`.
    gram: DMatrix<C64>,
    /// `Φ` itself, kept for least-squares solves by SVD.
    phi: DMatrix<C64>,
    phi_svd: nalgebra::SVD<C64, nalgebra::Dyn, nalgebra::Dyn>,
    cache: Mutex<HashMap<Vec<u64>, Arc<BalayageSolution>>>,
}

impl BalayageSolver {
    pub fn new(set: &SamplingSet, grid: Arc<SpectralGrid>, params: BalayageParams) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::InvalidSamplingSet("balayage needs a nonempty set".into()));
        }
        if set.dim() != grid.dim() {
            return Err(Error::DimensionMismatch { expected: grid.dim(), got: set.dim() });
        }
        if !(params.tolerance > 0.0) || !(params.reg >= 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive and reg nonnegative".into()));
        }
        let (n, m) = (grid.len(), set.len());
        if n * m > crate::frames::MATRIX_ENTRY_LIMIT || m > crate::frames::DENSE_LIMIT {
            return Err(Error::Capacity { what: "balayage system entries", size: n * m, limit: crate::frames::MATRIX_ENTRY_LIMIT });
        }
        let points = set.points().to_vec();
        let rows: Vec<Vec<C64>> = grid
            .nodes()
            .par_iter()
            .map(|g| points.iter().map(|x| cis(-dot(x, g))).collect())
            .collect();
        let exps = DMatrix::from_fn(n, m, |k, x| rows[k][x]);
        let sqrt_w: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
        let phi = DMatrix::from_fn(n, m, |k, x| exps[(k, x)] * sqrt_w[k]);
        let gram = phi.ad_mul(&phi);
        let phi_svd = phi.clone().svd(true, true);
        Ok(Self { points, grid, params, exps, gram, phi, phi_svd, cache: Mutex::new(HashMap::new()) })
    }

    /// Solver over the midpoint grid of `Λ_ε` with `nodes` per axis.
    pub fn for_spectrum(set: &SamplingSet, spectrum: &SpectrumSet, epsilon: f64, nodes: usize, params: BalayageParams) -> Result<Self> {
        let grid = Arc::new(SpectralGrid::midpoint(&spectrum.enlarged(epsilon)?, nodes)?);
        Self::new(set, grid, params)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }
    pub fn params(&self) -> &BalayageParams {
        &self.params
    }

    /// Cached single-point solve; errors when the fit misses the tolerance.
    pub fn solve(&self, y: &[f64]) -> Result<Arc<BalayageSolution>> {
        let key: Vec<u64> = y.iter().map(|c| c.to_bits()).collect();
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let sol = Arc::new(self.solve_uncached(y)?);
        self.cache.lock().expect("cache poisoned").insert(key, sol.clone());
        Ok(sol)
    }

    fn solve_uncached(&self, y: &[f64]) -> Result<BalayageSolution> {
        if let Some(i) = self.points.iter().position(|x| x.iter().zip(y).all(|(a, b)| (a - b).abs() <= 1e-12)) {
            let mut coeffs = vec![C64::new(0.0, 0.0); self.points.len()];
            coeffs[i] = C64::new(1.0, 0.0);
            let fit_residual = self.fit_residual(&coeffs, &[(y.to_vec(), C64::new(1.0, 0.0))]);
            return Ok(BalayageSolution { y: y.to_vec(), coeffs, fit_residual, l1_mass: 1.0, iterations: 0 });
        }
        let (coeffs, iterations) = self.irls(&[(y.to_vec(), C64::new(1.0, 0.0))]);
        let fit_residual = self.fit_residual(&coeffs, &[(y.to_vec(), C64::new(1.0, 0.0))]);
        if !(fit_residual <= self.params.tolerance) {
            return Err(Error::Infeasible { y: y.to_vec(), residual: fit_residual, tolerance: self.params.tolerance });
        }
        let l1_mass = coeffs.iter().map(|c| c.norm()).sum();
        Ok(BalayageSolution { y: y.to_vec(), coeffs, fit_residual, l1_mass, iterations })
    }

    /// Uncached solve for a finite measure `Σ_j c_j δ_{y_j}`; returns the
    /// coefficients and the fit residual without enforcing the tolerance.
    pub fn solve_measure(&self, spikes: &[(Vec<f64>, C64)]) -> (Vec<C64>, f64) {
        let (coeffs, _) = self.irls(spikes);
        let r = self.fit_residual(&coeffs, spikes);
        (coeffs, r)
    }

    fn target(&self, spikes: &[(Vec<f64>, C64)], k: usize) -> C64 {
        let g = &self.grid.nodes()[k];
        spikes.iter().map(|(y, c)| c * cis(-dot(y, g))).sum()
    }

    /// Penalized fit of `‖Φa − b‖² + reg Σ|a_x|`.
    ///
    /// The penalty is minimized by iteratively reweighted least squares,
    /// `(Φ*Φ + D) a = Φ*b` with `D = diag(reg / (2 max(|a_x|, floor)))`.
    /// Because the penalty biases the fit, two unpenalized candidates are
    /// also formed: refits on the IRLS support and the minimum-norm
    /// least-squares solution, both by SVD of `Φ` with truncation. The candidate with the smallest ℓ¹ mass among
    /// those meeting the tolerance wins, otherwise the best fit.
    fn irls(&self, spikes: &[(Vec<f64>, C64)]) -> (Vec<C64>, usize) {
        let (n, m) = (self.grid.len(), self.points.len());
        let w = self.grid.weights();
        let targets: Vec<C64> = (0..n).map(|k| self.target(spikes, k)).collect();
        let rhs: Vec<C64> = (0..m)
            .map(|x| (0..n).map(|k| self.exps[(k, x)].conj() * targets[k] * w[k]).sum())
            .collect();
        let trace_scale = (0..m).map(|i| self.gram[(i, i)].re).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let ridged = |ridge: f64| {
            let mut system = self.gram.clone();
            for i in 0..m {
                system[(i, i)] += C64::new(ridge, 0.0);
            }
            solve_psd(&system, &rhs, SPECTRAL_CUTOFF)
        };
        let sqrt_w: Vec<C64> = w.iter().map(|v| C64::new(v.sqrt(), 0.0)).collect();
        let b = nalgebra::DVector::from_iterator(n, targets.iter().zip(&sqrt_w).map(|(t, s)| t * s));
        let mut candidates = vec![truncated_lstsq(&self.phi_svd, &b)];
        let mut iterations = 1;
        if self.params.reg > 0.0 {
            let mut a = ridged(self.params.reg.max(1e-14 * trace_scale));
            while iterations < self.params.max_iter {
                let top = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
                let floor = (1e-10 * top).max(f64::MIN_POSITIVE);
                let mut system = self.gram.clone();
                for i in 0..m {
                    system[(i, i)] += C64::new(self.params.reg / (2.0 * a[i].norm().max(floor)), 0.0);
                }
                let next = solve_psd(&system, &rhs, SPECTRAL_CUTOFF);
                iterations += 1;
                let change = next.iter().zip(&a).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
                a = next;
                if change <= 1e-10 * top.max(f64::MIN_POSITIVE) {
                    break;
                }
            }
            for threshold in [1e-8, 1e-4] {
                candidates.push(self.refit_on_support(&a, &b, threshold));
            }
            candidates.push(a);
        }
        let scored: Vec<(f64, f64, Vec<C64>)> = candidates
            .into_iter()
            .map(|c| (self.fit_residual_against(&c, &targets), c.iter().map(|z| z.norm()).sum(), c))
            .collect();
        let feasible = scored
            .iter()
            .filter(|c| c.0 <= self.params.tolerance)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let best = feasible.unwrap_or_else(|| scored.iter().min_by(|a, b| a.0.total_cmp(&b.0)).expect("nonempty"));
        (best.2.clone(), iterations)
    }

    /// Unpenalized least-squares refit on `{x : |a_x| > threshold · max|a|}`.
    fn refit_on_support(&self, a: &[C64], b: &nalgebra::DVector<C64>, threshold: f64) -> Vec<C64> {
        let top = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let support: Vec<usize> = (0..a.len()).filter(|&i| a[i].norm() > threshold * top).collect();
        let sub = self.phi.select_columns(&support);
        let mut out = vec![C64::new(0.0, 0.0); a.len()];
        for (&i, v) in support.iter().zip(truncated_lstsq(&sub.svd(true, true), b)) {
            out[i] = v;
        }
        out
    }

    fn fit_residual_against(&self, coeffs: &[C64], targets: &[C64]) -> f64 {
        (0..self.grid.len())
            .into_par_iter()
            .map(|k| {
                let fit: C64 = (0..self.points.len()).map(|x| self.exps[(k, x)] * coeffs[x]).sum();
                (fit - targets[k]).norm()
            })
            .reduce(|| 0.0, f64::max)
    }

    fn fit_residual(&self, coeffs: &[C64], spikes: &[(Vec<f64>, C64)]) -> f64 {
        let targets: Vec<C64> = (0..self.grid.len()).map(|k| self.target(spikes, k)).collect();
        self.fit_residual_against(coeffs, &targets)
    }
}

/// Minimum-norm least-squares solution from an SVD, discarding singular
/// values below `SPECTRAL_CUTOFF · σ_max`.
fn truncated_lstsq(svd: &nalgebra::SVD<C64, nalgebra::Dyn, nalgebra::Dyn>, b: &nalgebra::DVector<C64>) -> Vec<C64> {
    let (u, vt) = (svd.u.as_ref().expect("u computed"), svd.v_t.as_ref().expect("v computed"));
    let top = svd.singular_values.max();
    let ub = u.ad_mul(b);
    let mut x = nalgebra::DVector::<C64>::zeros(vt.ncols());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > SPECTRAL_CUTOFF * top && s > 0.0 {
            x += vt.row(k).adjoint() * (ub[k] / s);
        }
    }
    x.iter().copied().collect()
}

/// Convenience single solve on a fresh solver.
pub fn solve_balayage(set: &SamplingSet, grid: Arc<SpectralGrid>, y: &[f64], tolerance: f64, reg: f64) -> Result<BalayageSolution> {
    let solver = BalayageSolver::new(set, grid, BalayageParams { tolerance, reg, ..Default::default() })?;
    Ok((*solver.solve(y)?).clone())
}

/// `K̂ = max_y Σ_x |a_x(y)|` over a sample of centres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalayageConstant {
    pub k_hat: f64,
    pub argmax: Vec<f64>,
    pub l1_masses: Vec<f64>,
    pub max_fit_residual: f64,
}

pub fn balayage_constant(solver: &BalayageSolver, ys: &[Vec<f64>]) -> Result<BalayageConstant> {
    if ys.is_empty() {
        return Err(Error::InvalidArgument("need at least one centre".into()));
    }
    let sols: Vec<Arc<BalayageSolution>> = ys.par_iter().map(|y| solver.solve(y)).collect::<Result<_>>()?;
    let (imax, best) = sols
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.l1_mass.total_cmp(&b.1.l1_mass))
        .expect("nonempty");
    Ok(BalayageConstant {
        k_hat: best.l1_mass,
        argmax: ys[imax].clone(),
        l1_masses: sols.iter().map(|s| s.l1_mass).collect(),
        max_fit_residual: sols.iter().map(|s| s.fit_residual).fold(0.0, f64::max),
    })
}

/// Per-centre and worst normalized residual of the reproducing identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub max_residual: f64,
    pub residuals: Vec<f64>,
    /// `max |f|` over the centres and `E`, used for normalization.
    pub scale: f64,
}

/// `max_y |f(y) − Σ_x f(x) a_x(y) h(x − y)| / max|f|`.
pub fn fundamental_identity_residual(
    f: &TrigPolynomial,
    solver: &BalayageSolver,
    window: &InghamWindow,
    ys: &[Vec<f64>],
) -> Result<IdentityReport> {
    let fx: Vec<C64> = solver.points().iter().map(|x| f.eval(x)).collect();
    let scale = ys
        .iter()
        .map(|y| f.eval(y).norm())
        .chain(fx.iter().map(|v| v.norm()))
        .fold(0.0, f64::max);
    let residuals: Vec<f64> = ys
        .par_iter()
        .map(|y| -> Result<f64> {
            if scale == 0.0 {
                return Ok(0.0);
            }
            let sol = solver.solve(y)?;
            let s: C64 = solver
                .points()
                .iter()
                .zip(&fx)
                .zip(&sol.coeffs)
                .filter(|(_, a)| a.norm() > 0.0)
                .map(|((x, v), a)| {
                    let d: Vec<f64> = x.iter().zip(y.iter()).map(|(p, q)| p - q).collect();
                    v * a * window.eval(&d)
                })
                .sum();
            Ok((f.eval(y) - s).norm() / scale)
        })
        .collect::<Result<_>>()?;
    Ok(IdentityReport { max_residual: residuals.iter().copied().fold(0.0, f64::max), residuals, scale })
}

/// Time-domain function sampled on a quadrature rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub values: Vec<C64>,
}

impl SampledFunction {
    /// Uniform 1-D rule on `[lo, hi]` with `n` midpoint nodes.
    pub fn uniform_1d(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> C64) -> Self {
        let step = (hi - lo) / n as f64;
        let xs: Vec<f64> = (0..n).map(|i| lo + (i as f64 + 0.5) * step).collect();
        Self {
            points: xs.iter().map(|&x| vec![x]).collect(),
            weights: vec![step; n],
            values: xs.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self { values: self.values.iter().map(|v| v * alpha).collect(), ..self.clone() }
    }
}

/// `Σ_x |k_x|^p` against `∫ |k|^p`, where `k_x = ∫ a_x(y) h(x − y) k(y) dy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpBound {
    pub lhs: f64,
    pub norm_p: f64,
    /// `lhs / ∫|k|^p` (zero when `k` vanishes).
    pub ratio: f64,
}

pub fn lp_balayage_bound(solver: &BalayageSolver, window: &InghamWindow, k: &SampledFunction, p: f64) -> Result<LpBound> {
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!("p must exceed 1, got {p}")));
    }
    let m = solver.points().len();
    let active: Vec<usize> = (0..k.points.len()).filter(|&j| k.values[j].norm() > 0.0).collect();
    let partial: Vec<Vec<C64>> = active
        .par_iter()
        .map(|&j| -> Result<Vec<C64>> {
            let y = &k.points[j];
            let sol = solver.solve(y)?;
            Ok(solver
                .points()
                .iter()
                .zip(&sol.coeffs)
                .map(|(x, a)| {
                    let d: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
                    a * window.eval(&d) * k.values[j] * k.weights[j]
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut kx = vec![C64::new(0.0, 0.0); m];
    for row in &partial {
        for (acc, v) in kx.iter_mut().zip(row) {
            *acc += v;
        }
    }
    let lhs: f64 = kx.iter().map(|v| v.norm().powf(p)).sum();
    let norm_p: f64 = k.values.iter().zip(&k.weights).map(|(v, w)| v.norm().powf(p) * w).sum();
    Ok(LpBound { lhs, norm_p, ratio: if norm_p > 0.0 { lhs / norm_p } else { 0.0 } })
}
