//! Discretized Paley-Wiener space.
//!
//! A bandlimited signal is stored through its spectral values `F(γ_k)` on a
//! [`SpectralGrid`]; time values are always derived by quadrature,
//! `f(x) = Σ_k w_k F(γ_k) e^{2πi x·γ_k}`, and the norm is the weighted
//! `‖F‖² = Σ_k w_k |F(γ_k)|²`.
//!
//! On a uniform 1-D grid with step `Δγ` the discrete `f` satisfies
//! `|f(x + 1/Δγ)| = |f(x)|`, so time-domain statements are meaningful on one
//! period `1/Δγ` (512 for the default `[-½, ½]` grid).

use std::io::Write;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, SpectralGrid, SpectrumSet};
use crate::linalg::{cis, C64};

/// Default node count per axis for 1-D spectra.
pub const DEFAULT_NODES_1D: usize = 512;
/// Default ambient node count per axis for 2-D spectra.
pub const DEFAULT_NODES_2D: usize = 64;

/// Element of the discretized `PW_Λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandlimitedSignal {
    grid: Arc<SpectralGrid>,
    coeffs: Vec<C64>,
}

impl BandlimitedSignal {
    pub fn new(grid: Arc<SpectralGrid>, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: coeffs.len() });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zero(grid: Arc<SpectralGrid>) -> Self {
        let n = grid.len();
        Self { grid, coeffs: vec![C64::new(0.0, 0.0); n] }
    }

    /// Spectral values from a closure of the node.
    pub fn from_fn(grid: Arc<SpectralGrid>, f: impl Fn(&[f64]) -> C64) -> Self {
        let coeffs = grid.nodes().iter().map(|g| f(g)).collect();
        Self { grid, coeffs }
    }

    /// Complex standard normal coefficients normalized to `‖F‖ = 1`.
    pub fn random(grid: Arc<SpectralGrid>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<C64> = (0..grid.len())
            .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        let mut s = Self { grid, coeffs };
        s.normalize();
        s
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }
    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }
    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// `f(x) = Σ_k w_k F(γ_k) e^{2πi x·γ_k}`.
    pub fn evaluate(&self, x: &[f64]) -> C64 {
        self.grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(&self.coeffs)
            .map(|((g, w), c)| c * cis(dot(x, g)) * *w)
            .sum()
    }

    /// Evaluates at many points in parallel.
    pub fn evaluate_many(&self, xs: &[Vec<f64>]) -> Vec<C64> {
        xs.par_iter().map(|x| self.evaluate(x)).collect()
    }

    /// `‖F‖² = Σ_k w_k |F(γ_k)|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.grid.weights().iter().zip(&self.coeffs).map(|(w, c)| w * c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm; the zero signal is left unchanged.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.coeffs.iter_mut().for_each(|c| *c /= n);
        }
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self { grid: self.grid.clone(), coeffs: self.coeffs.iter().map(|c| c * alpha).collect() }
    }

    /// `αf + βg` on a shared grid.
    pub fn combine(&self, alpha: C64, other: &Self, beta: C64) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * alpha + b * beta).collect(),
        })
    }

    /// CSV with columns `gamma_0[, gamma_1], weight, re, im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (0..self.grid.dim()).map(|i| format!("gamma_{i}")).collect();
        header.extend(["weight", "re", "im"].map(String::from));
        w.write_record(&header)?;
        for ((g, wt), c) in self.grid.nodes().iter().zip(self.grid.weights()).zip(&self.coeffs) {
            let mut row: Vec<String> = g.iter().map(|v| v.to_string()).collect();
            row.extend([wt.to_string(), c.re.to_string(), c.im.to_string()]);
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Random unit-norm signal on a fresh midpoint grid with `nodes` per axis.
pub fn random_pw_signal(spectrum: &SpectrumSet, nodes: usize, seed: u64) -> Result<BandlimitedSignal> {
    let grid = Arc::new(SpectralGrid::midpoint(spectrum, nodes)?);
    Ok(BandlimitedSignal::random(grid, seed))
}

/// `⟨f, g⟩ = Σ_k w_k F(γ_k) conj(G(γ_k))`.
pub fn pw_inner(f: &BandlimitedSignal, g: &BandlimitedSignal) -> Result<C64> {
    same_grid(&f.grid, &g.grid)?;
    Ok(weighted_inner(f.grid.weights(), &f.coeffs, &g.coeffs))
}

/// `Σ_k w_k a_k conj(b_k)`.
pub fn weighted_inner(weights: &[f64], a: &[C64], b: &[C64]) -> C64 {
    weights.iter().zip(a).zip(b).map(|((w, x), y)| x * y.conj() * *w).sum()
}

pub(crate) fn same_grid(a: &Arc<SpectralGrid>, b: &Arc<SpectralGrid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Finite character sum `p(x) = Σ_j c_j e^{2πi x·λ_j}` with every `λ_j ∈ Λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    frequencies: Vec<Vec<f64>>,
    coefficients: Vec<C64>,
}

impl TrigPolynomial {
    pub fn new(spectrum: &SpectrumSet, frequencies: Vec<Vec<f64>>, coefficients: Vec<C64>) -> Result<Self> {
        if frequencies.len() != coefficients.len() {
            return Err(Error::DimensionMismatch { expected: frequencies.len(), got: coefficients.len() });
        }
        if let Some(l) = frequencies.iter().find(|l| l.len() != spectrum.dim() || !spectrum.contains(l)) {
            return Err(Error::InvalidArgument(format!("frequency {l:?} is not in the spectrum")));
        }
        Ok(Self { frequencies, coefficients })
    }

    /// `terms` frequencies uniform in `Λ` (rejection from the bounding box)
    /// with complex standard normal coefficients.
    pub fn random(spectrum: &SpectrumSet, terms: usize, seed: u64) -> Self {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = spectrum.bounding_half_widths();
        let mut frequencies = Vec::with_capacity(terms);
        while frequencies.len() < terms {
            let g: Vec<f64> = half.iter().map(|h| rng.random_range(-*h..=*h)).collect();
            if spectrum.contains(&g) {
                frequencies.push(g);
            }
        }
        let coefficients = (0..terms)
            .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        Self { frequencies, coefficients }
    }

    pub fn zero() -> Self {
        Self { frequencies: Vec::new(), coefficients: Vec::new() }
    }

    pub fn frequencies(&self) -> &[Vec<f64>] {
        &self.frequencies
    }
    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    /// Exact evaluation.
    pub fn eval(&self, x: &[f64]) -> C64 {
        self.frequencies.iter().zip(&self.coefficients).map(|(l, c)| c * cis(dot(x, l))).sum()
    }

    /// `Σ_j |c_j|`, an upper bound for `sup |p|`.
    pub fn coefficient_l1(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).sum()
    }
}
