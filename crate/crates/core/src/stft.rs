//! Short-time Fourier transform on uniform grids, the Gaussian window, the
//! transform identities, the Feichtinger norm, the explicit STFT frame bound
//! on `PW_Λ`, and non-uniform Gabor frame operators.
//!
//! `V_g f(x, ω) = ∫ f(t) conj(g(t − x)) e^{−2πi t·ω} dt`, computed by the
//! rectangle rule on the signal grid. Gabor atoms are `e^{2πi σ t} g(t − s)`
//! (translation first), so `⟨f, atom⟩ = V_g f(s, σ)` with no extra phase.
//! Signals and windows are one-dimensional.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{DENSE_LIMIT, MATRIX_ENTRY_LIMIT};
use crate::linalg::{cis, conjugate_gradient, hermitian_eigenvalues, C64};
use crate::sampling::SamplingSet;
use crate::spectral::BandlimitedSignal;

/// Largest condition number accepted by [`gabor_reconstruct`].
pub const GABOR_CONDITION_LIMIT: f64 = 1e8;

/// Nodes `start + i·step`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !start.is_finite() {
            return Err(Error::InvalidArgument(format!("grid needs a positive step, got {step}")));
        }
        if len < 2 {
            return Err(Error::InvalidArgument(format!("grid needs at least 2 nodes, got {len}")));
        }
        Ok(Self { start, step, len })
    }

    /// Nodes of `step·ℤ ∩ [−half, half]`.
    pub fn symmetric(half: f64, step: f64) -> Result<Self> {
        let m = (half / step + 1e-9).floor();
        Self::new(-m * step, step, 2 * m as usize + 1)
    }

    /// Nodes of `step·ℤ ∩ [−half, half)`, one period of a discrete
    /// frequency axis when `2·half·step` divides 1.
    pub fn half_open(half: f64, step: f64) -> Result<Self> {
        let m = (half / step + 1e-9).floor();
        Self::new(-m * step, step, 2 * m as usize)
    }

    pub fn node(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.node(i)).collect()
    }
    pub fn end(&self) -> f64 {
        self.node(self.len - 1)
    }

    /// Same extent with half the step.
    pub fn refined(&self) -> Self {
        Self { start: self.start, step: self.step / 2.0, len: 2 * (self.len - 1) + 1 }
    }

    /// `(t − start)/step` when it is an integer up to `1e-9`.
    fn offset_of(&self, t: f64) -> Option<i64> {
        let q = (t - self.start) / self.step;
        let r = q.round();
        ((q - r).abs() <= 1e-9).then_some(r as i64)
    }

    /// Index of the node at `t`, if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.offset_of(t).filter(|&i| i >= 0 && (i as usize) < self.len).map(|i| i as usize)
    }

    fn same_step(&self, other: &Self) -> bool {
        (self.step - other.step).abs() <= 1e-12 * self.step
    }
}

/// Samples of a function on a uniform grid, in time or in frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSignal {
    pub grid: UniformGrid,
    pub values: Vec<C64>,
}

impl TimeSignal {
    pub fn new(grid: UniformGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len {
            return Err(Error::DimensionMismatch { expected: grid.len, got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> C64) -> Self {
        Self { grid, values: grid.nodes().into_iter().map(f).collect() }
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.len] }
    }

    /// Random combination of `terms` Gaussian atoms `e^{2πiσt} g₀((t−s)/w)`
    /// with centres in `[−reach, reach]²` and widths in `[0.5, 1.5]`.
    pub fn random_atoms(grid: UniformGrid, terms: usize, reach: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms: Vec<(f64, f64, f64, C64)> = (0..terms)
            .map(|_| {
                let s = rng.random_range(-reach..=reach);
                let sigma = rng.random_range(-reach..=reach);
                let w = rng.random_range(0.5..=1.5);
                let c = C64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
                (s, sigma, w, c)
            })
            .collect();
        Self::from_fn(grid, |t| {
            atoms.iter().map(|&(s, sigma, w, c)| c * cis(sigma * t) * gaussian_profile((t - s) / w)).sum()
        })
    }

    /// `‖f‖₂ = (Δt Σ|f_j|²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        (self.grid.step * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `⟨f, h⟩ = Δt Σ f_j conj(h_j)` on a shared grid.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<C64>() * self.grid.step)
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * alpha).collect() }
    }

    /// Sample at a node, zero off the support.
    pub fn value_at(&self, t: f64) -> Option<C64> {
        match self.grid.offset_of(t) {
            Some(i) if i >= 0 && (i as usize) < self.grid.len => Some(self.values[i as usize]),
            Some(_) => Some(C64::new(0.0, 0.0)),
            None => None,
        }
    }

    /// `F(γ_k) = Δt Σ_j f_j e^{−2πi t_j γ_k}` on `freq`.
    pub fn fourier(&self, freq: &UniformGrid) -> TimeSignal {
        let t = self.grid.nodes();
        let dt = self.grid.step;
        let values = freq
            .nodes()
            .par_iter()
            .map(|&g| t.iter().zip(&self.values).map(|(&tj, v)| v * cis(-tj * g)).sum::<C64>() * dt)
            .collect();
        TimeSignal { grid: *freq, values }
    }
}

/// `e^{−π t²} · 2^{1/4}`.
fn gaussian_profile(t: f64) -> f64 {
    2f64.powf(0.25) * (-std::f64::consts::PI * t * t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindowKind {
    /// `g₀(t) = 2^{1/4} e^{−π t²}`, evaluated in closed form off the grid.
    Gaussian,
    /// Samples only; off-grid values by linear interpolation.
    Sampled,
}

/// Analysis window with its `L²` norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowFunction {
    pub signal: TimeSignal,
    pub norm: f64,
    pub kind: WindowKind,
}

impl WindowFunction {
    /// Normalizes the samples to unit `L²` norm.
    pub fn new(signal: TimeSignal) -> Result<Self> {
        let n = signal.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("window must have positive finite norm".into()));
        }
        Ok(Self { signal: signal.scale(C64::new(1.0 / n, 0.0)), norm: 1.0, kind: WindowKind::Sampled })
    }

    /// `g₀` sampled on `grid` without renormalization, so `g₀(0) = 2^{1/4}`
    /// exactly; the recorded norm is the quadrature value.
    pub fn gaussian_on(grid: UniformGrid) -> Self {
        let signal = TimeSignal::from_fn(grid, |t| C64::new(gaussian_profile(t), 0.0));
        let norm = signal.norm();
        Self { signal, norm, kind: WindowKind::Gaussian }
    }

    /// Window value at any `t`.
    pub fn eval(&self, t: f64) -> C64 {
        match self.kind {
            WindowKind::Gaussian => C64::new(gaussian_profile(t), 0.0),
            WindowKind::Sampled => {
                let g = &self.signal.grid;
                let q = (t - g.start) / g.step;
                if q < 0.0 || q > (g.len - 1) as f64 {
                    return C64::new(0.0, 0.0);
                }
                let i = (q.floor() as usize).min(g.len - 2);
                let frac = q - i as f64;
                self.signal.values[i] * (1.0 - frac) + self.signal.values[i + 1] * frac
            }
        }
    }
}

/// Default signal grid: `[−8, 8]` with step `1/16`.
pub fn default_time_grid() -> UniformGrid {
    UniformGrid::symmetric(8.0, 1.0 / 16.0).expect("valid constant grid")
}

/// `g₀` on the default signal grid. Only `dim = 1` is supported.
pub fn gaussian_window(dim: usize) -> Result<WindowFunction> {
    if dim != 1 {
        return Err(Error::InvalidArgument(format!("sampled windows are one-dimensional, got dimension {dim}")));
    }
    Ok(WindowFunction::gaussian_on(default_time_grid()))
}

/// Phase-space box of STFT nodes `(x_m, ω_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeFrequencyGrid {
    pub times: UniformGrid,
    pub freqs: UniformGrid,
}

impl TimeFrequencyGrid {
    pub fn new(times: UniformGrid, freqs: UniformGrid) -> Self {
        Self { times, freqs }
    }

    pub fn refined(&self) -> Self {
        Self { times: self.times.refined(), freqs: self.freqs.refined() }
    }

    /// Area element `Δx Δω`.
    pub fn cell(&self) -> f64 {
        self.times.step * self.freqs.step
    }
}

/// Grids shared by the identity checks: the signal grid, the grid carrying
/// Fourier transforms, and the STFT grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StftSetup {
    pub time: UniformGrid,
    pub spectral: UniformGrid,
    pub tf: TimeFrequencyGrid,
}

impl Default for StftSetup {
    /// Signals on `[−8, 8]` at step `1/16`, transforms on `[−8, 8]` at step
    /// `1/8`, STFT nodes on `[−5, 5]²` at step `1/2`.
    fn default() -> Self {
        let tf_axis = UniformGrid::symmetric(5.0, 0.5).expect("valid constant grid");
        Self {
            time: default_time_grid(),
            spectral: UniformGrid::symmetric(8.0, 0.125).expect("valid constant grid"),
            tf: TimeFrequencyGrid::new(tf_axis, tf_axis),
        }
    }
}

impl StftSetup {
    /// All steps halved, extents kept.
    pub fn refined(&self) -> Self {
        Self { time: self.time.refined(), spectral: self.spectral.refined(), tf: self.tf.refined() }
    }
}

/// STFT values, rows indexed by time node and columns by frequency node.
#[derive(Debug, Clone, PartialEq)]
pub struct StftMatrix {
    pub tf: TimeFrequencyGrid,
    pub values: DMatrix<C64>,
}

impl StftMatrix {
    /// `‖V‖₂` by the rectangle rule over the grid.
    pub fn l2_norm(&self) -> f64 {
        (self.tf.cell() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `‖V‖₁` by the rectangle rule over the grid.
    pub fn l1_norm(&self) -> f64 {
        self.tf.cell() * self.values.iter().map(|v| v.norm()).sum::<f64>()
    }

    /// Rows `x,omega,re,im`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "omega", "re", "im"])?;
        for (m, x) in self.tf.times.nodes().into_iter().enumerate() {
            for (n, om) in self.tf.freqs.nodes().into_iter().enumerate() {
                let v = self.values[(m, n)];
                w.write_record(&[x.to_string(), om.to_string(), v.re.to_string(), v.im.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Rows `x,omega,magnitude`.
    pub fn write_spectrogram_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "omega", "magnitude"])?;
        for (m, x) in self.tf.times.nodes().into_iter().enumerate() {
            for (n, om) in self.tf.freqs.nodes().into_iter().enumerate() {
                w.write_record(&[x.to_string(), om.to_string(), self.values[(m, n)].norm().to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_binary<W: std::io::Write>(&self, out: W) -> Result<()> {
        crate::io::write_complex_matrix(&self.values, out)
    }
}

/// `V_g f` on `tf`. The window grid must share the signal step and every
/// STFT time node must shift the signal grid onto the window grid.
pub fn stft(f: &TimeSignal, g: &WindowFunction, tf: &TimeFrequencyGrid) -> Result<StftMatrix> {
    stft_samples(f, &g.signal, tf).map(|values| StftMatrix { tf: *tf, values })
}

fn stft_samples(f: &TimeSignal, g: &TimeSignal, tf: &TimeFrequencyGrid) -> Result<DMatrix<C64>> {
    if !f.grid.same_step(&g.grid) {
        return Err(Error::Incommensurate(format!("signal step {} differs from window step {}", f.grid.step, g.grid.step)));
    }
    let dt = f.grid.step;
    let t = f.grid.nodes();
    let xs = tf.times.nodes();
    let omegas = tf.freqs.nodes();
    let rows: Vec<Vec<C64>> = xs
        .par_iter()
        .map(|&x| -> Result<Vec<C64>> {
            // g(t_j − x) = g_{j + shift}
            let shift = g.grid.offset_of(f.grid.start - x).ok_or_else(|| {
                Error::Incommensurate(format!("time node {x} is not a multiple of the signal step {dt}"))
            })?;
            let products: Vec<(f64, C64)> = (0..f.grid.len)
                .filter_map(|j| {
                    let k = j as i64 + shift;
                    (k >= 0 && (k as usize) < g.grid.len).then(|| (t[j], f.values[j] * g.values[k as usize].conj()))
                })
                .filter(|(_, p)| p.norm() > 0.0)
                .collect();
            Ok(omegas
                .iter()
                .map(|&om| products.iter().map(|&(tj, p)| p * cis(-tj * om)).sum::<C64>() * dt)
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(xs.len(), omegas.len(), |m, n| rows[m][n]))
}

/// `‖V_g f‖₂` against `‖g‖₂‖f‖₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsometryReport {
    pub stft_norm: f64,
    pub product: f64,
    /// Relative deviation, zero when both sides vanish.
    pub deviation: f64,
}

pub fn isometry_check(f: &TimeSignal, g: &WindowFunction, tf: &TimeFrequencyGrid) -> Result<IsometryReport> {
    let v = stft(f, g, tf)?;
    let stft_norm = v.l2_norm();
    let product = g.signal.norm() * f.norm();
    let deviation = if product == 0.0 { stft_norm } else { (stft_norm - product).abs() / product };
    Ok(IsometryReport { stft_norm, product, deviation })
}

/// Pointwise comparison of `V_g f(x, ω)` with `e^{−2πi x·ω} V_G F(ω, −x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfIdentityReport {
    pub max_deviation: f64,
    /// `max |V_g f|` over the grid.
    pub scale: f64,
}

/// `F`, `G` are the transforms of the sampled `f`, `g` on `setup.spectral`.
pub fn tf_identity_check(f: &TimeSignal, g: &WindowFunction, setup: &StftSetup) -> Result<TfIdentityReport> {
    let lhs = stft(f, g, &setup.tf)?;
    let big_f = f.fourier(&setup.spectral);
    let big_g = g.signal.fourier(&setup.spectral);
    let neg_x = UniformGrid { start: -setup.tf.times.end(), ..setup.tf.times };
    let swapped = TimeFrequencyGrid::new(setup.tf.freqs, neg_x);
    // rhs[(n, k)] = V_G F(ω_n, −x_{M−1−k})
    let rhs = stft_samples(&big_f, &big_g, &swapped)?;
    let (nx, nw) = (setup.tf.times.len, setup.tf.freqs.len);
    let xs = setup.tf.times.nodes();
    let omegas = setup.tf.freqs.nodes();
    let mut max_deviation = 0.0f64;
    for m in 0..nx {
        for n in 0..nw {
            let other = cis(-xs[m] * omegas[n]) * rhs[(n, nx - 1 - m)];
            max_deviation = max_deviation.max((lhs.values[(m, n)] - other).norm());
        }
    }
    let scale = lhs.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(TfIdentityReport { max_deviation, scale })
}

/// Two-dimensional transform of `V_g f` against its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormReport {
    /// `max |Ŵ − e^{2πi z·ζ} f(−z) conj(ĝ(ζ))| / max |closed form|`.
    pub deviation: f64,
    /// The same with the phase `e^{−2πi z·ζ}`.
    pub opposite_phase_deviation: f64,
    pub scale: f64,
}

/// `Ŵ(ζ, z) = ∫∫ V_g f(x, ω) e^{−2πi (x·ζ + ω·z)} dx dω` by the rectangle
/// rule on `setup.tf`, compared on the nodes `zeta × z`. The closed form
/// `e^{2πi z·ζ} f(−z) conj(ĝ(ζ))` reduces to `e^{2πi z·ζ} f(−z) ĝ(−ζ)` for
/// real `g`; each `−z` must be a node of the signal grid.
pub fn stft_fourier_closed_form(
    f: &TimeSignal,
    g: &WindowFunction,
    setup: &StftSetup,
    zeta: &UniformGrid,
    z: &UniformGrid,
) -> Result<ClosedFormReport> {
    let v = stft(f, g, &setup.tf)?;
    let xs = setup.tf.times.nodes();
    let omegas = setup.tf.freqs.nodes();
    let zetas = zeta.nodes();
    let zs = z.nodes();
    // Partial transform over ω: P[m][b] = Σ_n V(x_m, ω_n) e^{−2πi ω_n z_b}.
    let partial: Vec<Vec<C64>> = (0..xs.len())
        .into_par_iter()
        .map(|m| zs.iter().map(|&zb| (0..omegas.len()).map(|n| v.values[(m, n)] * cis(-omegas[n] * zb)).sum()).collect())
        .collect();
    let g_hat = g.signal.fourier(zeta);
    let f_at: Vec<C64> = zs
        .iter()
        .map(|&zb| f.value_at(-zb).ok_or_else(|| Error::Incommensurate(format!("−z = {} is not a signal node", -zb))))
        .collect::<Result<_>>()?;
    let cell = setup.tf.cell();
    let rows: Vec<(f64, f64, f64)> = zetas
        .par_iter()
        .enumerate()
        .map(|(a, &za)| {
            let mut worst = (0.0f64, 0.0f64, 0.0f64);
            for (b, &zb) in zs.iter().enumerate() {
                let w: C64 = (0..xs.len()).map(|m| partial[m][b] * cis(-xs[m] * za)).sum::<C64>() * cell;
                let base = f_at[b] * g_hat.values[a].conj();
                let closed = cis(zb * za) * base;
                let opposite = cis(-zb * za) * base;
                worst.0 = worst.0.max((w - closed).norm());
                worst.1 = worst.1.max((w - opposite).norm());
                worst.2 = worst.2.max(closed.norm());
            }
            worst
        })
        .collect();
    let scale = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let (d, o) = rows.iter().fold((0.0f64, 0.0f64), |acc, r| (acc.0.max(r.0), acc.1.max(r.1)));
    let norm = |e: f64| if scale > 0.0 { e / scale } else { e };
    Ok(ClosedFormReport { deviation: norm(d), opposite_phase_deviation: norm(o), scale })
}

/// `‖f‖_{S₀} = ‖V_{g₀} f‖₁` by the rectangle rule on `tf`.
pub fn feichtinger_norm(f: &TimeSignal, tf: &TimeFrequencyGrid) -> Result<f64> {
    let g0 = WindowFunction::gaussian_on(f.grid);
    Ok(stft(f, &g0, tf)?.l1_norm())
}

/// `C = sup_u Σ_{x∈E} e^{−‖x − u‖²}` maximized over a grid of `u` with the
/// given step covering the window of `E` enlarged by 3.
pub fn gaussian_sum_constant(set: &SamplingSet, u_step: f64) -> Result<f64> {
    if set.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: set.dim() });
    }
    if set.is_empty() {
        return Ok(0.0);
    }
    let lo = set.window().lo[0] - 3.0;
    let n = ((set.window().hi[0] + 3.0 - lo) / u_step).ceil() as usize;
    let pts: Vec<f64> = set.points().iter().map(|p| p[0]).collect();
    Ok((0..=n)
        .into_par_iter()
        .map(|i| {
            let u = lo + i as f64 * u_step;
            pts.iter().map(|x| (-(x - u) * (x - u)).exp()).sum::<f64>()
        })
        .reduce(|| 0.0, f64::max))
}

/// Sampled STFT energy of a `PW_Λ` signal over a symmetric set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PwStftReport {
    /// `Σ_{x∈E} ∫ |V_g f(x, ω)|² dω`.
    pub energy: f64,
    pub signal_energy: f64,
    /// `energy / ‖f‖²`.
    pub lower_ratio: f64,
    /// `energy / (B ‖f‖²)`.
    pub upper_ratio: f64,
    /// `B = 2^{1/2} C ‖V_{g₀} g‖₁²`.
    pub b_formula: f64,
    pub c_constant: f64,
    pub holds: bool,
}

/// Frequency band `[−(λ + 2.5), λ + 2.5]` at step `1/32`, where the
/// Gaussian tail of the integrand is below `1e-6` of its peak.
pub fn default_omega_grid(spectral_half_width: f64) -> UniformGrid {
    UniformGrid::symmetric(spectral_half_width + 2.5, 1.0 / 32.0).expect("valid band")
}

/// Energy check for the explicit upper bound. `E` is symmetrized first;
/// `f` is evaluated at `x + s_i` for the nodes `s_i` of the window grid.
pub fn pw_stft_frame_check(
    f: &BandlimitedSignal,
    g: &WindowFunction,
    set: &SamplingSet,
    omega: &UniformGrid,
    tf: &TimeFrequencyGrid,
) -> Result<PwStftReport> {
    if set.dim() != 1 || f.grid().dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: set.dim().max(f.grid().dim()) });
    }
    let e = set.symmetrize();
    let s = g.signal.grid.nodes();
    let dt = g.signal.grid.step;
    let omegas = omega.nodes();
    let energy: f64 = e
        .points()
        .par_iter()
        .map(|x| {
            let ts: Vec<Vec<f64>> = s.iter().map(|si| vec![x[0] + si]).collect();
            let fx = f.evaluate_many(&ts);
            let products: Vec<(f64, C64)> =
                ts.iter().zip(&fx).zip(&g.signal.values).map(|((t, v), gv)| (t[0], v * gv.conj())).collect();
            omegas
                .iter()
                .map(|&om| (products.iter().map(|&(t, p)| p * cis(-t * om)).sum::<C64>() * dt).norm_sqr())
                .sum::<f64>()
                * omega.step
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    let signal_energy = f.norm_sqr();
    let c_constant = gaussian_sum_constant(&e, 1.0 / 64.0)?;
    let s0 = feichtinger_norm(&g.signal, tf)?;
    let b_formula = std::f64::consts::SQRT_2 * c_constant * s0 * s0;
    let ratio = |d: f64| if d > 0.0 { energy / d } else { 0.0 };
    Ok(PwStftReport {
        energy,
        signal_energy,
        lower_ratio: ratio(signal_energy),
        upper_ratio: ratio(b_formula * signal_energy),
        b_formula,
        c_constant,
        holds: energy <= b_formula * signal_energy,
    })
}

/// Phase-space points `(s_n, σ_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceSamples {
    pub points: Vec<(f64, f64)>,
    /// Minimum Euclidean distance in time × frequency (`None` below two points).
    pub separation: Option<f64>,
}

impl PhaseSpaceSamples {
    /// Rejects coincident points.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::InvalidSamplingSet("phase-space points must be finite".into()));
        }
        let separation = if points.len() >= 2 {
            let set = SamplingSet::from_points(points.iter().map(|p| vec![p.0, p.1]).collect())?;
            Some(set.separation()?)
        } else {
            None
        };
        Ok(Self { points, separation })
    }

    pub fn empty() -> Self {
        Self { points: Vec::new(), separation: None }
    }

    /// `(a ℤ ∩ times) × (b ℤ ∩ freqs)` for closed time and half-open
    /// frequency ranges `[lo, hi]` and `[lo, hi)`.
    pub fn lattice(a: f64, b: f64, times: (f64, f64), freqs: (f64, f64)) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidArgument("lattice steps must be positive".into()));
        }
        let s0 = (times.0 / a - 1e-9).ceil() as i64;
        let s1 = (times.1 / a + 1e-9).floor() as i64;
        let w0 = (freqs.0 / b - 1e-9).ceil() as i64;
        let w1 = (freqs.1 / b - 1e-9).ceil() as i64;
        let points = (s0..=s1).flat_map(|i| (w0..w1).map(move |j| (i as f64 * a, j as f64 * b))).collect();
        Self::new(points)
    }

    /// Each coordinate moved by an independent uniform draw from
    /// `[−jitter, jitter]`.
    pub fn jittered(&self, jitter: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || if jitter > 0.0 { rng.random_range(-jitter..=jitter) } else { 0.0 };
        let points = self.points.iter().map(|&(s, w)| (s + draw(), w + draw())).collect();
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Extreme eigenvalues of the discrete Gabor frame operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaborBounds {
    pub lower: f64,
    pub upper: f64,
    pub condition: f64,
    pub dimension: usize,
    pub atoms: usize,
}

/// Atoms `e^{2πiσ_n t_j} g(t_j − s_n)` on a signal grid.
#[derive(Debug, Clone)]
pub struct GaborSystem {
    grid: UniformGrid,
    atoms: Vec<Vec<C64>>,
}

impl GaborSystem {
    pub fn new(grid: UniformGrid, g: &WindowFunction, samples: &PhaseSpaceSamples) -> Result<Self> {
        let size = grid.len * samples.len();
        if size > MATRIX_ENTRY_LIMIT {
            return Err(Error::Capacity { what: "Gabor atom samples", size, limit: MATRIX_ENTRY_LIMIT });
        }
        let t = grid.nodes();
        let atoms = samples
            .points
            .par_iter()
            .map(|&(s, sigma)| t.iter().map(|&tj| cis(sigma * tj) * g.eval(tj - s)).collect())
            .collect();
        Ok(Self { grid, atoms })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    /// `⟨f, atom_n⟩ = V_g f(s_n, σ_n)`.
    pub fn coefficients(&self, f: &[C64]) -> Vec<C64> {
        let dt = self.grid.step;
        self.atoms.par_iter().map(|a| f.iter().zip(a).map(|(v, p)| v * p.conj()).sum::<C64>() * dt).collect()
    }

    /// `Σ_n c_n atom_n`, summed in atom order for each sample.
    pub fn synthesize(&self, c: &[C64]) -> Vec<C64> {
        (0..self.grid.len)
            .into_par_iter()
            .map(|j| self.atoms.iter().zip(c).map(|(a, cn)| cn * a[j]).sum())
            .collect()
    }

    /// `S f = Σ_n ⟨f, atom_n⟩ atom_n`.
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        self.synthesize(&self.coefficients(f))
    }

    /// Dense matrix of `S` acting on sample vectors.
    pub fn matrix(&self) -> Result<DMatrix<C64>> {
        let n = self.grid.len;
        if n > DENSE_LIMIT {
            return Err(Error::Capacity { what: "dense Gabor operator dimension", size: n, limit: DENSE_LIMIT });
        }
        let dt = self.grid.step;
        let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for a in &self.atoms {
            for i in 0..n {
                let ai = a[i] * dt;
                for j in 0..n {
                    m[(i, j)] += ai * a[j].conj();
                }
            }
        }
        Ok(m)
    }

    pub fn bounds(&self) -> Result<GaborBounds> {
        let vals = hermitian_eigenvalues(self.matrix()?);
        let upper = vals.last().copied().unwrap_or(0.0).max(0.0);
        let lower = vals.first().copied().unwrap_or(0.0).max(0.0);
        let lower = if lower <= crate::frames::EIGEN_FLOOR * upper.max(1.0) { 0.0 } else { lower };
        let condition = if lower > 0.0 { upper / lower } else { f64::INFINITY };
        Ok(GaborBounds { lower, upper, condition, dimension: self.grid.len, atoms: self.atoms.len() })
    }
}

/// `S_{g,E} f` by direct summation over the atoms.
pub fn gabor_frame_operator(f: &TimeSignal, g: &WindowFunction, samples: &PhaseSpaceSamples) -> Result<TimeSignal> {
    let sys = GaborSystem::new(f.grid, g, samples)?;
    TimeSignal::new(f.grid, sys.apply(&f.values))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaborReconstruction {
    pub signal: TimeSignal,
    /// `‖f_rec − f‖₂ / ‖f‖₂`.
    pub error: f64,
    pub iterations: usize,
    pub converged: bool,
    pub bounds: GaborBounds,
}

/// `f_rec = Σ_n ⟨f, atom_n⟩ S⁻¹ atom_n = S⁻¹ (S f)`, with `S⁻¹` applied by
/// conjugate gradients. Fails when the condition number exceeds
/// [`GABOR_CONDITION_LIMIT`].
pub fn gabor_reconstruct(
    f: &TimeSignal,
    g: &WindowFunction,
    samples: &PhaseSpaceSamples,
    tol: f64,
    max_iter: usize,
) -> Result<GaborReconstruction> {
    let sys = GaborSystem::new(f.grid, g, samples)?;
    let bounds = sys.bounds()?;
    if !(bounds.condition <= GABOR_CONDITION_LIMIT) {
        return Err(Error::NotAFrame { lower: bounds.lower, condition: bounds.condition });
    }
    let rhs = sys.synthesize(&sys.coefficients(&f.values));
    let dt = f.grid.step;
    let out = conjugate_gradient(
        |v| sys.apply(v),
        &rhs,
        |a, b| a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<C64>() * dt,
        tol,
        max_iter,
    );
    let signal = TimeSignal::new(f.grid, out.x)?;
    let fnorm = f.norm();
    let diff = TimeSignal::new(f.grid, signal.values.iter().zip(&f.values).map(|(a, b)| a - b).collect())?;
    let error = if fnorm > 0.0 { diff.norm() / fnorm } else { diff.norm() };
    Ok(GaborReconstruction { signal, error, iterations: out.iterations, converged: out.converged, bounds })
}
