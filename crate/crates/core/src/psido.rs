//! Pseudo-differential operators with separable Kohn-Nirenberg symbols
//! `s(y, γ) = Σ_j a_j(y) b_j(γ) e^{−2πi y·λ_j}`, their Hilbert-Schmidt
//! norms, symbol-class validation, and the frame inequality chain
//! `A ‖K_s f̂‖⁴/‖f‖² ≤ Σ_{x∈E} |∫ (K_s f̂)(γ) s(x, γ) e^{−2πi x·γ} dγ|² ≤
//! B̂ ‖s‖² ‖K_s f̂‖²`.
//!
//! `(K_s f̂)(γ) = ∫ s(y, γ) f(y) e^{−2πi y·γ} dy`. Symbols are
//! one-dimensional. Each `b_j` is either a smooth bump supported in
//! `[−ρ_j, ρ_j]` or a constant; with the bump, `k_γ = s_γ e_{−γ}` has
//! spectrum in `⋃_j B̄(−λ_j, ε_j + ρ_j)` for every `γ`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balayage::{balayage_constant, BalayageSolver, InghamWindow};
use crate::error::{Error, Result};
use crate::frames::{frame_bounds, Chain};
use crate::geometry::{SpectralGrid, SpectrumSet};
use crate::linalg::{cis, C64};
use crate::sampling::SamplingSet;
use crate::stft::{TimeSignal, UniformGrid};

/// Leakage threshold for the spectral support check of `a_j`.
pub const LEAKAGE_LIMIT: f64 = 1e-8;

/// Time profile `a_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TimeProfile {
    /// Ingham-type window with `â` supported in `B(0, ε)`.
    Ingham(InghamWindow),
    /// Samples with linear interpolation, zero outside the grid; the
    /// declared spectral radius is checked by DFT leakage.
    Sampled { signal: TimeSignal, epsilon: f64 },
}

impl TimeProfile {
    pub fn ingham(epsilon: f64, profile_nodes: usize) -> Result<Self> {
        Ok(Self::Ingham(InghamWindow::new(epsilon, 1, profile_nodes)?))
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            Self::Ingham(h) => h.eval(&[y]),
            Self::Sampled { signal, .. } => {
                let g = &signal.grid;
                let q = (y - g.start) / g.step;
                if q < 0.0 || q > (g.len - 1) as f64 {
                    return 0.0;
                }
                let i = (q.floor() as usize).min(g.len - 2);
                let frac = q - i as f64;
                (signal.values[i] * (1.0 - frac) + signal.values[i + 1] * frac).re
            }
        }
    }

    /// Claimed radius of `supp â`.
    pub fn epsilon(&self) -> f64 {
        match self {
            Self::Ingham(h) => h.epsilon,
            Self::Sampled { epsilon, .. } => *epsilon,
        }
    }

    /// Period of an Ingham profile, `None` for sampled profiles.
    pub fn period(&self) -> Option<f64> {
        match self {
            Self::Ingham(h) => Some(1.0 / h.step),
            Self::Sampled { .. } => None,
        }
    }

    /// Relative spectral energy outside `B(0, ε)`, from a DFT over one
    /// period (Ingham) or over the sample grid (sampled).
    pub fn leakage(&self) -> f64 {
        let eps = self.epsilon();
        let (grid, values) = match self {
            Self::Ingham(h) => {
                let period = 1.0 / h.step;
                let n = (period * 8.0 * eps).ceil().max(16.0) as usize;
                let grid = UniformGrid { start: -period / 2.0, step: period / n as f64, len: n };
                let values: Vec<C64> = grid.nodes().iter().map(|&y| C64::new(h.eval(&[y]), 0.0)).collect();
                (grid, values)
            }
            Self::Sampled { signal, .. } => (signal.grid, signal.values.clone()),
        };
        let n = grid.len;
        let span = grid.step * n as f64;
        let signal = TimeSignal { grid, values };
        let freq = UniformGrid { start: -((n / 2) as f64) / span, step: 1.0 / span, len: n };
        let spectrum = signal.fourier(&freq);
        let (mut inside, mut outside) = (0.0, 0.0);
        for (g, v) in freq.nodes().iter().zip(&spectrum.values) {
            if g.abs() <= eps * (1.0 + 1e-9) {
                inside += v.norm_sqr();
            } else {
                outside += v.norm_sqr();
            }
        }
        let total = inside + outside;
        if total > 0.0 { (outside / total).sqrt() } else { 0.0 }
    }
}

/// Frequency profile `b_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FrequencyProfile {
    /// `amplitude · exp(−1/(1 − (γ/ρ)²))` on `|γ| < ρ`.
    Bump { radius: f64, amplitude: f64 },
    Constant(f64),
}

impl FrequencyProfile {
    pub fn eval(&self, gamma: f64) -> f64 {
        match *self {
            Self::Bump { radius, amplitude } => {
                let t = gamma / radius;
                if t.abs() < 1.0 { amplitude * (-1.0 / (1.0 - t * t)).exp() } else { 0.0 }
            }
            Self::Constant(c) => c,
        }
    }

    /// Radius of the support, `None` when unbounded.
    pub fn support_radius(&self) -> Option<f64> {
        match *self {
            Self::Bump { radius, .. } => Some(radius),
            Self::Constant(0.0) => Some(0.0),
            Self::Constant(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolTerm {
    pub a: TimeProfile,
    pub b: FrequencyProfile,
    pub lambda: f64,
}

/// Finite separable symbol over a one-dimensional spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KNSymbol {
    pub spectrum: SpectrumSet,
    pub terms: Vec<SymbolTerm>,
}

impl KNSymbol {
    pub fn new(spectrum: SpectrumSet, terms: Vec<SymbolTerm>) -> Result<Self> {
        if spectrum.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: spectrum.dim() });
        }
        Ok(Self { spectrum, terms })
    }

    /// Two terms at `λ = ±λ₀` with Ingham profiles of radius `ε` and bumps
    /// of radius `ρ` and amplitudes 1 and ½.
    pub fn two_term(spectrum: SpectrumSet, lambda: f64, epsilon: f64, rho: f64) -> Result<Self> {
        let a = TimeProfile::ingham(epsilon, 32)?;
        let terms = vec![
            SymbolTerm { a: a.clone(), b: FrequencyProfile::Bump { radius: rho, amplitude: 1.0 }, lambda },
            SymbolTerm { a, b: FrequencyProfile::Bump { radius: rho, amplitude: 0.5 }, lambda: -lambda },
        ];
        Self::new(spectrum, terms)
    }

    /// Largest support radius of the `b_j`, `None` if any is unbounded.
    pub fn frequency_reach(&self) -> Option<f64> {
        self.terms.iter().try_fold(0.0f64, |acc, t| t.b.support_radius().map(|r| acc.max(r)))
    }

    /// Midpoint grid on `[−R, R]` with `nodes` nodes, `R` the frequency reach.
    pub fn gamma_grid(&self, nodes: usize) -> Result<UniformGrid> {
        let r = self
            .frequency_reach()
            .ok_or_else(|| Error::SymbolClass("a frequency profile has unbounded support".into()))?;
        if r == 0.0 {
            return Err(Error::SymbolClass("symbol vanishes identically".into()));
        }
        let step = 2.0 * r / nodes as f64;
        UniformGrid::new(-r + step / 2.0, step, nodes)
    }

    /// One full period of the slowest Ingham profile, sampled finely enough
    /// for `|s|²` to be integrated exactly.
    pub fn hs_time_grid(&self) -> Result<UniformGrid> {
        let period = self
            .terms
            .iter()
            .map(|t| t.a.period())
            .collect::<Option<Vec<f64>>>()
            .and_then(|p| p.into_iter().reduce(f64::max))
            .ok_or_else(|| Error::SymbolClass("time grid for the norm needs Ingham profiles".into()))?;
        let top = self.terms.iter().map(|t| t.a.epsilon()).fold(0.0, f64::max);
        let n = (period * 8.0 * top).ceil().max(16.0) as usize;
        UniformGrid::new(-period / 2.0, period / n as f64, n)
    }
}

/// `s(y, γ)`.
pub fn symbol_eval(s: &KNSymbol, y: f64, gamma: f64) -> C64 {
    s.terms.iter().map(|t| cis(-y * t.lambda) * (t.a.eval(y) * t.b.eval(gamma))).sum()
}

/// `(K_s f̂)(γ_k) = Δy Σ_i s(y_i, γ_k) f(y_i) e^{−2πi y_i γ_k}`.
pub fn apply_ks(s: &KNSymbol, f: &TimeSignal, gamma: &UniformGrid) -> TimeSignal {
    let ys = f.grid.nodes();
    let dy = f.grid.step;
    // Per term, the samples a_j(y) f(y) e^{−2πi y λ_j}.
    let weighted: Vec<Vec<C64>> = s
        .terms
        .iter()
        .map(|t| ys.iter().zip(&f.values).map(|(&y, v)| v * cis(-y * t.lambda) * t.a.eval(y)).collect())
        .collect();
    let values = gamma
        .nodes()
        .par_iter()
        .map(|&g| {
            s.terms
                .iter()
                .zip(&weighted)
                .map(|(t, w)| {
                    let b = t.b.eval(g);
                    if b == 0.0 {
                        return C64::new(0.0, 0.0);
                    }
                    ys.iter().zip(w).map(|(&y, v)| v * cis(-y * g)).sum::<C64>() * (b * dy)
                })
                .sum()
        })
        .collect();
    TimeSignal { grid: *gamma, values }
}

/// `‖s‖_{L²}` by the rectangle rule on `ygrid × γgrid`.
pub fn hs_norm(s: &KNSymbol, ygrid: &UniformGrid, gamma: &UniformGrid) -> f64 {
    let gs = gamma.nodes();
    let b: Vec<Vec<f64>> = s.terms.iter().map(|t| gs.iter().map(|&g| t.b.eval(g)).collect()).collect();
    let total: f64 = ygrid
        .nodes()
        .par_iter()
        .map(|&y| {
            let a: Vec<C64> = s.terms.iter().map(|t| cis(-y * t.lambda) * t.a.eval(y)).collect();
            (0..gs.len()).map(|k| a.iter().zip(&b).map(|(aj, bj)| aj * bj[k]).sum::<C64>().norm_sqr()).sum::<f64>()
        })
        .sum();
    (total * ygrid.step * gamma.step).sqrt()
}

/// Per-term outcome of the class conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermCheck {
    pub index: usize,
    /// `B̄(λ_j, ε_j + ρ_j) ⊆ Λ`.
    pub ball_inside: bool,
    pub leakage: f64,
    pub support_ok: bool,
    pub frequency_bounded: bool,
    /// `‖a_j‖₂ ‖b_j‖₂` on the norm grids.
    pub l2_product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolClassReport {
    pub terms: Vec<TermCheck>,
    /// `max Σ_j |a_j(y) b_j(γ)|` over the norm grids.
    pub sup_bound: f64,
    /// `Σ_j ‖a_j‖₂ ‖b_j‖₂`.
    pub l2_bound: f64,
    pub violations: Vec<String>,
}

impl SymbolClassReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn require(&self) -> Result<()> {
        if self.ok() { Ok(()) } else { Err(Error::SymbolClass(self.violations.join("; "))) }
    }
}

/// Checks ball containment, spectral support of each `a_j` and bounded
/// support of each `b_j`, and records the finite-sum bounds.
pub fn validate_symbol_class(s: &KNSymbol) -> SymbolClassReport {
    let ygrid = s.hs_time_grid().ok();
    let ggrid = s.gamma_grid(256).ok();
    let mut violations = Vec::new();
    let mut terms = Vec::new();
    for (j, t) in s.terms.iter().enumerate() {
        let rho = t.b.support_radius();
        let frequency_bounded = rho.is_some();
        if !frequency_bounded {
            violations.push(format!("term {j}: b has unbounded support"));
        }
        let radius = t.a.epsilon() + rho.unwrap_or(0.0);
        let ball_inside = s.spectrum.contains_ball(&[t.lambda], radius)
            && !(radius == 0.0 && !s.spectrum.contains_interior(&[t.lambda]));
        if !ball_inside {
            violations.push(format!("term {j}: closed ball of radius {radius} about λ = {} leaves Λ", t.lambda));
        }
        let leakage = t.a.leakage();
        let support_ok = leakage < LEAKAGE_LIMIT;
        if !support_ok {
            violations.push(format!("term {j}: spectral leakage {leakage:e} outside radius {}", t.a.epsilon()));
        }
        let l2_product = match (&ygrid, &ggrid) {
            (Some(yg), Some(gg)) => {
                let a2: f64 = yg.nodes().iter().map(|&y| t.a.eval(y).powi(2)).sum::<f64>() * yg.step;
                let b2: f64 = gg.nodes().iter().map(|&g| t.b.eval(g).powi(2)).sum::<f64>() * gg.step;
                (a2 * b2).sqrt()
            }
            _ => f64::INFINITY,
        };
        terms.push(TermCheck { index: j, ball_inside, leakage, support_ok, frequency_bounded, l2_product });
    }
    let sup_bound = match (&ygrid, &ggrid) {
        (Some(yg), Some(gg)) => {
            let gs = gg.nodes();
            yg.nodes()
                .par_iter()
                .map(|&y| {
                    gs.iter()
                        .map(|&g| s.terms.iter().map(|t| (t.a.eval(y) * t.b.eval(g)).abs()).sum::<f64>())
                        .fold(0.0, f64::max)
                })
                .reduce(|| 0.0, f64::max)
        }
        _ => f64::INFINITY,
    };
    let l2_bound = terms.iter().map(|t| t.l2_product).sum();
    SymbolClassReport { terms, sup_bound, l2_bound, violations }
}

/// Constants of the chain, all taken from the other modules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsidoConstants {
    /// `A = 1/(K̂ ‖h‖₂)²`.
    pub a: f64,
    /// Full-space upper frame bound of `E` for `Λ`.
    pub b_hat: f64,
    pub k_hat: f64,
    pub h_norm: f64,
    /// `‖s‖_{L²}`.
    pub s_norm: f64,
}

impl PsidoConstants {
    /// `ys` samples the time support of the test signals for `K̂`;
    /// `lambda_grid` is the quadrature grid of `Λ` for `B̂`.
    pub fn new(
        s: &KNSymbol,
        set: &SamplingSet,
        solver: &BalayageSolver,
        window: &InghamWindow,
        ys: &[Vec<f64>],
        lambda_grid: Arc<SpectralGrid>,
        gamma_nodes: usize,
    ) -> Result<Self> {
        validate_symbol_class(s).require()?;
        let k_hat = balayage_constant(solver, ys)?.k_hat;
        let h_norm = window.l2_norm();
        let b_hat = frame_bounds(&set.symmetrize(), lambda_grid)?.upper;
        let s_norm = hs_norm(s, &s.hs_time_grid()?, &s.gamma_grid(gamma_nodes)?);
        Ok(Self { a: 1.0 / (k_hat * h_norm).powi(2), b_hat, k_hat, h_norm, s_norm })
    }
}

/// Chain terms for one signal, plus the adjoint-paired middle term
/// `Σ_x |∫ conj((K_s f̂)(γ)) k(x, γ) dγ|²` used by the lower-bound argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsidoChain {
    pub chain: Chain,
    pub mid_adjoint: f64,
    pub ks_energy: f64,
    pub signal_energy: f64,
}

/// Chain for `f` on the symmetrized `E`; `f = 0` gives the zero chain.
pub fn psido_frame_check(
    s: &KNSymbol,
    f: &TimeSignal,
    set: &SamplingSet,
    constants: &PsidoConstants,
    gamma: &UniformGrid,
) -> Result<PsidoChain> {
    if set.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: set.dim() });
    }
    let signal_energy = f.norm().powi(2);
    if signal_energy == 0.0 {
        return Ok(PsidoChain { chain: Chain::ZERO, mid_adjoint: 0.0, ks_energy: 0.0, signal_energy });
    }
    let k = apply_ks(s, f, gamma);
    let ks_energy = k.norm().powi(2);
    let gs = gamma.nodes();
    let e = set.symmetrize();
    let (mid, mid_adjoint) = e
        .points()
        .par_iter()
        .map(|x| {
            let x = x[0];
            let (mut direct, mut adjoint) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            for (&g, kv) in gs.iter().zip(&k.values) {
                let kern = symbol_eval(s, x, g) * cis(-x * g);
                direct += kv * kern;
                adjoint += kv.conj() * kern;
            }
            ((direct * gamma.step).norm_sqr(), (adjoint * gamma.step).norm_sqr())
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let chain = Chain {
        lhs: constants.a * ks_energy * ks_energy / signal_energy,
        mid,
        rhs: constants.b_hat * constants.s_norm.powi(2) * ks_energy,
    };
    Ok(PsidoChain { chain, mid_adjoint, ks_energy, signal_energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stft::default_time_grid;

    fn quarter() -> SpectrumSet {
        SpectrumSet::cube(1, 0.25).unwrap()
    }

    fn fixture() -> KNSymbol {
        KNSymbol::two_term(quarter(), 0.1, 0.05, 0.09).unwrap()
    }

    fn unit_term(a: TimeProfile) -> SymbolTerm {
        SymbolTerm { a, b: FrequencyProfile::Constant(1.0), lambda: 0.0 }
    }

    fn ones_on(grid: UniformGrid) -> TimeProfile {
        TimeProfile::Sampled { signal: TimeSignal::from_fn(grid, |_| C64::new(1.0, 0.0)), epsilon: 0.0 }
    }

    #[test]
    fn eval_basic_cases() {
        let empty = KNSymbol::new(quarter(), vec![]).unwrap();
        assert_eq!(symbol_eval(&empty, 1.0, 0.1), C64::new(0.0, 0.0));
        let a = TimeProfile::ingham(0.05, 16).unwrap();
        let one = KNSymbol::new(quarter(), vec![unit_term(a.clone())]).unwrap();
        for (y, g) in [(0.0, 0.0), (3.3, 0.1), (-7.0, -0.2)] {
            assert!((symbol_eval(&one, y, g) - C64::new(a.eval(y), 0.0)).norm() < 1e-15);
        }
        let s = fixture();
        let mut doubled = s.clone();
        doubled.terms.extend(s.terms.clone());
        let v = symbol_eval(&s, 2.5, 0.03);
        assert!((symbol_eval(&doubled, 2.5, 0.03) - v * 2.0).norm() < 1e-15);
    }

    #[test]
    fn identity_symbol_reproduces_dft() {
        let grid = default_time_grid();
        let s = KNSymbol::new(quarter(), vec![unit_term(ones_on(grid))]).unwrap();
        let f = TimeSignal::random_atoms(grid, 3, 2.0, 4);
        let gamma = UniformGrid::symmetric(2.0, 1.0 / 32.0).unwrap();
        let k = apply_ks(&s, &f, &gamma);
        let oracle = f.fourier(&gamma);
        let dev = k.values.iter().zip(&oracle.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(dev <= 1e-3 * oracle.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }

    #[test]
    fn apply_is_linear_and_kills_zero() {
        let s = fixture();
        let grid = default_time_grid();
        let gamma = s.gamma_grid(64).unwrap();
        assert!(apply_ks(&s, &TimeSignal::zeros(grid), &gamma).values.iter().all(|v| v.norm() == 0.0));
        let f = TimeSignal::random_atoms(grid, 3, 2.0, 1);
        let h = TimeSignal::random_atoms(grid, 3, 2.0, 2);
        let (al, be) = (C64::new(0.3, -1.2), C64::new(-2.0, 0.5));
        let comb = TimeSignal::new(grid, f.values.iter().zip(&h.values).map(|(a, b)| a * al + b * be).collect()).unwrap();
        let lhs = apply_ks(&s, &comb, &gamma);
        let kf = apply_ks(&s, &f, &gamma);
        let kh = apply_ks(&s, &h, &gamma);
        for i in 0..gamma.len {
            assert!((lhs.values[i] - (kf.values[i] * al + kh.values[i] * be)).norm() < 1e-12);
        }
    }

    #[test]
    fn modulation_shifts_output() {
        let grid = default_time_grid();
        let a = TimeProfile::ingham(0.05, 16).unwrap();
        let s = KNSymbol::new(quarter(), vec![SymbolTerm { a, b: FrequencyProfile::Constant(1.0), lambda: 0.05 }]).unwrap();
        let f = TimeSignal::random_atoms(grid, 2, 1.5, 8);
        let lam = 0.25;
        let shifted = TimeSignal::from_fn(grid, |t| cis(lam * t)).values;
        let ef = TimeSignal::new(grid, f.values.iter().zip(&shifted).map(|(a, b)| a * b).collect()).unwrap();
        let gamma = UniformGrid::symmetric(1.0, 0.125).unwrap();
        let moved = UniformGrid { start: gamma.start - lam, ..gamma };
        let lhs = apply_ks(&s, &ef, &gamma);
        let rhs = apply_ks(&s, &f, &moved);
        for (a, b) in lhs.values.iter().zip(&rhs.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn separable_norm_factorizes() {
        let a = TimeProfile::ingham(0.05, 32).unwrap();
        let b = FrequencyProfile::Bump { radius: 0.09, amplitude: 1.0 };
        let s = KNSymbol::new(quarter(), vec![SymbolTerm { a: a.clone(), b, lambda: 0.1 }]).unwrap();
        let n = hs_norm(&s, &s.hs_time_grid().unwrap(), &s.gamma_grid(256).unwrap());
        // Oracles: Parseval for the window, fine Simpson rule for the bump.
        let TimeProfile::Ingham(h) = &a else { unreachable!() };
        let m = 200_000;
        let dx = 0.18 / m as f64;
        let simpson: f64 = (0..=m)
            .map(|i| {
                let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w * b.eval(-0.09 + i as f64 * dx).powi(2)
            })
            .sum::<f64>()
            * dx
            / 3.0;
        let oracle = h.l2_norm() * simpson.sqrt();
        assert!((n - oracle).abs() <= 1e-6 * oracle, "{n} vs {oracle}");
        let zero = KNSymbol::new(quarter(), vec![SymbolTerm { a, b: FrequencyProfile::Bump { radius: 0.09, amplitude: 0.0 }, lambda: 0.1 }]).unwrap();
        assert_eq!(hs_norm(&zero, &zero.hs_time_grid().unwrap(), &zero.gamma_grid(64).unwrap()), 0.0);
    }

    #[test]
    fn norm_obeys_triangle_inequality() {
        let s = fixture();
        let (yg, gg) = (s.hs_time_grid().unwrap(), s.gamma_grid(128).unwrap());
        let total = hs_norm(&s, &yg, &gg);
        let parts: f64 = s.terms.iter().map(|t| hs_norm(&KNSymbol::new(quarter(), vec![t.clone()]).unwrap(), &yg, &gg)).sum();
        assert!(total <= parts * (1.0 + 1e-12));
    }

    #[test]
    fn validation_accepts_fixture_and_flags_violations() {
        let rep = validate_symbol_class(&fixture());
        assert!(rep.ok(), "{rep:?}");
        assert!(rep.terms.iter().all(|t| t.leakage < LEAKAGE_LIMIT));
        assert!(rep.sup_bound.is_finite() && rep.l2_bound.is_finite());

        let mut edge = fixture();
        edge.terms[0].lambda = 0.25;
        let r = validate_symbol_class(&edge);
        assert!(!r.ok() && !r.terms[0].ball_inside && r.terms[1].ball_inside);

        // Hard truncation of the window has spectrum beyond ε.
        let TimeProfile::Ingham(h) = TimeProfile::ingham(0.05, 32).unwrap() else { unreachable!() };
        let grid = UniformGrid::symmetric(40.0, 0.25).unwrap();
        let truncated = TimeSignal::from_fn(grid, |y| C64::new(if y.abs() <= 20.0 { h.eval(&[y]) } else { 0.0 }, 0.0));
        let mut cut = fixture();
        cut.terms[1].a = TimeProfile::Sampled { signal: truncated, epsilon: 0.05 };
        let r = validate_symbol_class(&cut);
        assert!(!r.terms[1].support_ok && r.terms[1].leakage > LEAKAGE_LIMIT, "{r:?}");
        assert!(r.require().is_err());
    }

    #[test]
    fn zero_inputs_give_zero_chain() {
        let s = fixture();
        let constants = PsidoConstants { a: 0.1, b_hat: 2.0, k_hat: 1.0, h_norm: 1.0, s_norm: 1.0 };
        let e = SamplingSet::uniform(0.5, crate::geometry::AxisBox::centered(1, 5.0)).unwrap();
        let gamma = s.gamma_grid(64).unwrap();
        let z = psido_frame_check(&s, &TimeSignal::zeros(default_time_grid()), &e, &constants, &gamma).unwrap();
        assert_eq!(z.chain, Chain::ZERO);
        let mut silent = s.clone();
        for t in &mut silent.terms {
            t.b = FrequencyProfile::Bump { radius: 0.09, amplitude: 0.0 };
        }
        let f = TimeSignal::random_atoms(default_time_grid(), 3, 2.0, 5);
        let c = psido_frame_check(&silent, &f, &e, &constants, &gamma).unwrap();
        assert_eq!((c.chain.lhs, c.chain.mid), (0.0, 0.0));
    }
}
