//! Finite sampling configurations: separation, symmetry, lower Beurling
//! density and jittered-grid generators.
//!
//! A sampling set is a finite window onto what is conceptually an infinite
//! sequence, so every set carries the window inside which it is meant to be
//! dense.

use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::AxisBox;

/// Finite point configuration in time space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SamplingRepr", into = "SamplingRepr")]
pub struct SamplingSet {
    dim: usize,
    points: Vec<Vec<f64>>,
    window: AxisBox,
}

impl SamplingSet {
    /// Validates dimensions, window containment and distinctness.
    pub fn new(points: Vec<Vec<f64>>, window: AxisBox) -> Result<Self> {
        let dim = window.dim();
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidSamplingSet(format!("dimension must be 1 or 2, got {dim}")));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        if let Some(p) = points.iter().find(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidSamplingSet(format!("non-finite point {p:?}")));
        }
        if let Some(p) = points.iter().find(|p| !window.contains(p)) {
            return Err(Error::InvalidSamplingSet(format!("point {p:?} lies outside the window")));
        }
        let mut sorted = points.clone();
        sorted.sort_by(|a, b| lex_cmp(a, b));
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidSamplingSet(format!("duplicate point {:?}", w[0])));
        }
        Ok(Self { dim, points, window })
    }

    /// Set whose window is the bounding box of its points.
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidSamplingSet("cannot infer a window from no points".into()))?;
        let lo = (0..dim)
            .map(|i| points.iter().map(|p| p.get(i).copied().unwrap_or(f64::NAN)).fold(f64::INFINITY, f64::min))
            .collect();
        let hi = (0..dim)
            .map(|i| points.iter().map(|p| p.get(i).copied().unwrap_or(f64::NAN)).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        Self::new(points, AxisBox::new(lo, hi)?)
    }

    /// Set of 1-D points, window = bounding interval.
    pub fn from_1d(xs: &[f64]) -> Result<Self> {
        Self::from_points(xs.iter().map(|&x| vec![x]).collect())
    }

    /// Empty set over a window.
    pub fn empty(window: AxisBox) -> Self {
        Self { dim: window.dim(), points: Vec::new(), window }
    }

    /// `δℤ^d ∩ window`.
    pub fn uniform(delta: f64, window: AxisBox) -> Result<Self> {
        generate_jittered_grid(delta, 0.0, window, 0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
    pub fn window(&self) -> &AxisBox {
        &self.window
    }

    /// Minimum pairwise Euclidean distance.
    pub fn separation(&self) -> Result<f64> {
        if self.points.len() < 2 {
            return Err(Error::UndefinedSeparation(self.points.len()));
        }
        if self.dim == 1 {
            let mut xs: Vec<f64> = self.points.iter().map(|p| p[0]).collect();
            xs.sort_by(f64::total_cmp);
            return Ok(xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min));
        }
        let pts = &self.points;
        Ok((0..pts.len())
            .into_par_iter()
            .map(|i| {
                pts[i + 1..]
                    .iter()
                    .map(|q| dist(&pts[i], q))
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| f64::INFINITY, f64::min))
    }

    /// Whether every pair of distinct points is at least `r` apart.
    pub fn is_separated(&self, r: f64) -> Result<bool> {
        Ok(self.separation()? >= r)
    }

    /// `E ∪ (−E)` with duplicates removed; the window is widened to its
    /// symmetric hull.
    pub fn symmetrize(&self) -> SamplingSet {
        let mut pts = self.points.clone();
        pts.extend(self.points.iter().map(|p| p.iter().map(|c| if *c == 0.0 { 0.0 } else { -c }).collect()));
        pts.sort_by(|a, b| lex_cmp(a, b));
        pts.dedup();
        let lo: Vec<f64> =
            self.window.lo.iter().zip(&self.window.hi).map(|(a, b)| a.min(-b)).collect();
        let hi: Vec<f64> = lo.iter().map(|a| -a).collect();
        SamplingSet { dim: self.dim, points: pts, window: AxisBox { lo, hi } }
    }

    /// Whether `−x ∈ E` for every `x ∈ E`.
    pub fn is_symmetric(&self) -> bool {
        let mut a = self.points.clone();
        a.sort_by(|a, b| lex_cmp(a, b));
        let mut b: Vec<Vec<f64>> =
            self.points.iter().map(|p| p.iter().map(|c| if *c == 0.0 { 0.0 } else { -c }).collect()).collect();
        b.sort_by(|a, b| lex_cmp(a, b));
        a == b
    }

    /// Points scaled by `1/j`, used for the dilated sampling sums `f(x/j)`.
    pub fn contract(&self, j: f64) -> SamplingSet {
        SamplingSet {
            dim: self.dim,
            points: self.points.iter().map(|p| p.iter().map(|c| c / j).collect()).collect(),
            window: AxisBox {
                lo: self.window.lo.iter().map(|c| c / j).collect(),
                hi: self.window.hi.iter().map(|c| c / j).collect(),
            },
        }
    }

    /// Superset obtained by adding points (window widened as needed).
    pub fn union(&self, extra: &[Vec<f64>]) -> Result<SamplingSet> {
        let mut pts = self.points.clone();
        for p in extra {
            if !pts.contains(p) {
                pts.push(p.clone());
            }
        }
        let lo = (0..self.dim)
            .map(|i| pts.iter().map(|p| p[i]).fold(self.window.lo[i], f64::min))
            .collect();
        let hi = (0..self.dim)
            .map(|i| pts.iter().map(|p| p[i]).fold(self.window.hi[i], f64::max))
            .collect();
        SamplingSet::new(pts, AxisBox::new(lo, hi)?)
    }

    /// One point per CSV row, no header; window = bounding box.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut points = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let p: Vec<f64> = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| Error::InvalidSamplingSet(format!("bad coordinate {s:?}: {e}"))))
                .collect::<Result<_>>()?;
            points.push(p);
        }
        Self::from_points(points)
    }

    /// Lower Beurling density sweep; see [`DensityReport`].
    pub fn lower_beurling_density(&self, radii: &[f64]) -> Result<DensityReport> {
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0)) {
            return Err(Error::InvalidArgument(format!("radii must be positive, got {r}")));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("radii must be increasing".into()));
        }
        let mut samples = Vec::new();
        let mut skipped = Vec::new();
        for &r in radii {
            let Ok(centers_box) = self.window.shrink(r / 2.0) else {
                log::warn!("density radius {r} exceeds the sampling window; skipped");
                skipped.push(r);
                continue;
            };
            // The step-r/10 grid plus its half-step shift, so that lattices
            // commensurate with the step are not sampled only at their
            // worst-case-for-minimum alignment.
            let step = r / 10.0;
            let mut centers = centers_box.grid(step);
            let half: Vec<Vec<f64>> = centers
                .iter()
                .map(|c| c.iter().map(|v| v + step / 2.0).collect::<Vec<f64>>())
                .filter(|c| centers_box.contains(c))
                .collect();
            centers.extend(half);
            let min_count = centers
                .par_iter()
                .map(|c| {
                    self.points
                        .iter()
                        .filter(|p| dist(p, c) <= r / 2.0 * (1.0 + 1e-12))
                        .count()
                })
                .min()
                .unwrap_or(0);
            samples.push(DensitySample {
                radius: r,
                min_count,
                density: min_count as f64 / r.powi(self.dim as i32),
                centers: centers.len(),
            });
        }
        let estimate = samples.last().map(|s| s.density);
        Ok(DensityReport { samples, skipped, estimate })
    }
}

/// One entry of the density sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySample {
    pub radius: f64,
    /// Minimum number of points in a closed ball of radius `r/2`, minimized
    /// over a grid of centres with step `r/10` (and its half-step shift)
    /// keeping the ball in the window.
    pub min_count: usize,
    /// `n⁻(r) / r^d`.
    pub density: f64,
    /// Number of centres examined.
    pub centers: usize,
}

/// Lower-density sweep over increasing radii. The estimate is the value at the
/// largest admissible radius; the raw curve is kept so convergence can be
/// judged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub samples: Vec<DensitySample>,
    /// Radii too large for the window.
    pub skipped: Vec<f64>,
    pub estimate: Option<f64>,
}

/// `δℤ^d ∩ window` with each point perturbed by independent uniform noise in
/// `[−jitter, jitter]^d` (clamped to the window). Separation is at least
/// `δ − 2·jitter`.
pub fn generate_jittered_grid(delta: f64, jitter: f64, window: AxisBox, seed: u64) -> Result<SamplingSet> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {delta}")));
    }
    if !(jitter >= 0.0) || jitter >= delta / 2.0 {
        return Err(Error::InvalidArgument(format!(
            "jitter must lie in [0, δ/2) = [0, {}), got {jitter}",
            delta / 2.0
        )));
    }
    let dim = window.dim();
    let ranges: Vec<(i64, i64)> = window
        .lo
        .iter()
        .zip(&window.hi)
        .map(|(a, b)| ((a / delta - 1e-9).ceil() as i64, (b / delta + 1e-9).floor() as i64))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jittered = |m: i64, axis: usize| {
        let base = m as f64 * delta;
        let shift = if jitter > 0.0 { rng.random_range(-jitter..=jitter) } else { 0.0 };
        (base + shift).clamp(window.lo[axis], window.hi[axis])
    };
    let mut points = Vec::new();
    match dim {
        1 => {
            for m in ranges[0].0..=ranges[0].1 {
                points.push(vec![jittered(m, 0)]);
            }
        }
        _ => {
            for m0 in ranges[0].0..=ranges[0].1 {
                for m1 in ranges[1].0..=ranges[1].1 {
                    let x = jittered(m0, 0);
                    let y = jittered(m1, 1);
                    points.push(vec![x, y]);
                }
            }
        }
    }
    SamplingSet::new(points, window)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SamplingRepr {
    dim: usize,
    points: Vec<Vec<f64>>,
    window: AxisBox,
}

impl TryFrom<SamplingRepr> for SamplingSet {
    type Error = Error;
    fn try_from(r: SamplingRepr) -> Result<Self> {
        if r.window.dim() != r.dim {
            return Err(Error::DimensionMismatch { expected: r.dim, got: r.window.dim() });
        }
        SamplingSet::new(r.points, AxisBox::new(r.window.lo, r.window.hi)?)
    }
}

impl From<SamplingSet> for SamplingRepr {
    fn from(s: SamplingSet) -> Self {
        SamplingRepr { dim: s.dim, points: s.points, window: s.window }
    }
}
