//! Experiment configuration files.
//!
//! Every config is a JSON object with `"schema": 1`, an `experiment` name, a
//! `seed`, and the fields of one command. Paths are resolved relative to the
//! directory of the config file.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use nusample::geometry::{AxisBox, SpectrumSet};
use nusample::sampling::{generate_jittered_grid, SamplingSet};

use crate::CliError;

pub const SCHEMA_VERSION: u64 = 1;

/// Parsed config together with its canonical form and hash.
#[derive(Debug)]
pub struct Loaded<T> {
    pub config: T,
    pub seed: u64,
    pub experiment: String,
    pub hash: String,
    pub base_dir: PathBuf,
}

#[derive(Deserialize)]
struct Header {
    schema: u64,
    experiment: String,
    seed: u64,
}

/// Reads, validates and hashes a config; `seed` overrides the file's seed.
pub fn load<T: DeserializeOwned>(path: &Path, seed: Option<u64>) -> Result<Loaded<T>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("malformed JSON in {}: {e}", path.display())))?;
    if let Some(s) = seed {
        value
            .as_object_mut()
            .ok_or_else(|| CliError::Config("config must be a JSON object".into()))?
            .insert("seed".into(), s.into());
    }
    let header: Header = serde_json::from_value(value.clone()).map_err(|e| CliError::Config(format!("config header: {e}")))?;
    if header.schema != SCHEMA_VERSION {
        return Err(CliError::Config(format!("unsupported schema {}, expected {SCHEMA_VERSION}", header.schema)));
    }
    let config: T = serde_json::from_value(value.clone()).map_err(|e| CliError::Config(format!("config: {e}")))?;
    // serde_json maps keep keys sorted, so this text is canonical.
    let canonical = serde_json::to_string(&value).expect("value serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    let hash = digest.iter().map(|b| format!("{b:02x}")).collect();
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { config, seed: header.seed, experiment: header.experiment, hash, base_dir })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumSpec {
    Box { half_widths: Vec<f64> },
    Ball { dim: usize, radius: f64 },
    Polytope { vertices: Vec<Vec<f64>> },
}

impl SpectrumSpec {
    pub fn build(&self) -> Result<SpectrumSet, CliError> {
        match self {
            Self::Box { half_widths } => SpectrumSet::new_box(half_widths.clone()),
            Self::Ball { dim, radius } => SpectrumSet::new_ball(*dim, *radius),
            Self::Polytope { vertices } => SpectrumSet::new_polytope(vertices.clone()),
        }
        .map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplingSpec {
    /// `δℤ^d` in the cube `[−half, half]^d`.
    Lattice {
        spacing: f64,
        half: f64,
        #[serde(default = "one")]
        dim: usize,
    },
    /// Lattice with uniform jitter; the seed defaults to the config seed.
    Jittered {
        spacing: f64,
        jitter: f64,
        half: f64,
        #[serde(default = "one")]
        dim: usize,
        seed: Option<u64>,
    },
    /// CSV file, one point per row.
    File { path: PathBuf },
}

fn one() -> usize {
    1
}

impl SamplingSpec {
    /// Builds the set; a missing file is a config error.
    pub fn build(&self, base_dir: &Path, seed: u64) -> Result<SamplingSet, CliError> {
        match self {
            Self::Lattice { spacing, half, dim } => {
                SamplingSet::uniform(*spacing, AxisBox::centered(*dim, *half)).map_err(|e| CliError::Config(e.to_string()))
            }
            Self::Jittered { spacing, jitter, half, dim, seed: own } => {
                generate_jittered_grid(*spacing, *jitter, AxisBox::centered(*dim, *half), own.unwrap_or(seed))
                    .map_err(|e| CliError::Config(e.to_string()))
            }
            Self::File { path } => {
                let full = base_dir.join(path);
                let file = std::fs::File::open(&full)
                    .map_err(|e| CliError::Config(format!("sampling file {}: {e}", full.display())))?;
                SamplingSet::from_csv(file).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceSpec {
    pub half: f64,
    pub leakage: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoveringConfig {
    pub spectrum: SpectrumSpec,
    pub sampling: SamplingSpec,
    pub rho: f64,
    /// Half-width of the cube that the translates must cover.
    pub region_half: f64,
    pub resolution: f64,
    pub nodes: usize,
    pub subspace: SubspaceSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameBoundsConfig {
    pub spectrum: SpectrumSpec,
    pub sampling: SamplingSpec,
    pub nodes: usize,
    /// Bounds over a concentrated subspace instead of the full grid space.
    pub subspace: Option<SubspaceSpec>,
    /// Random signals for the Rayleigh-quotient histogram.
    pub trials: usize,
    /// Exit with status 1 when the lower bound vanishes.
    #[serde(default)]
    pub require_frame: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructConfig {
    pub spectrum: SpectrumSpec,
    pub sampling: SamplingSpec,
    pub nodes: usize,
    pub cg_tolerance: f64,
    pub max_iter: usize,
    /// Largest accepted relative L² error of the reconstruction.
    pub error_tolerance: f64,
    /// Reconstruct the zero signal instead of a random one.
    #[serde(default)]
    pub zero_signal: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityConfig {
    pub spectrum: SpectrumSpec,
    pub sampling: SamplingSpec,
    pub nodes: usize,
    /// Enlargement radius; defaults to 0.05·diam(Λ).
    pub epsilon: Option<f64>,
    pub profile_nodes: usize,
    pub terms: usize,
    pub trials: usize,
    pub centres: usize,
    /// Centres are drawn uniformly from `[−centre_half, centre_half]^d`.
    pub centre_half: f64,
    pub tolerance: f64,
    pub balayage_tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StftTolerances {
    pub isometry: f64,
    pub tf_identity: f64,
    pub closed_form: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StftBoundSpec {
    /// Half-width of the spectrum `[−h, h]`.
    pub half_width: f64,
    pub sampling: SamplingSpec,
    pub nodes: usize,
    pub signals: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StftConfig {
    /// Number of 2× refinements of the default grids.
    pub refinements: u32,
    pub tolerances: StftTolerances,
    /// Half-width of the `(ζ, z)` box for the closed-form check.
    pub closed_form_half: f64,
    pub bound: Option<StftBoundSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub a: f64,
    pub b: f64,
    pub times: (f64, f64),
    pub freqs: (f64, f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaborConfig {
    pub time_half: f64,
    pub time_step: f64,
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub jitter: f64,
    pub terms: usize,
    pub reach: f64,
    pub cg_tolerance: f64,
    pub max_iter: usize,
    pub error_tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsidoConfig {
    /// Half-width of `Λ = [−h, h]`.
    pub half_width: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub rho: f64,
    pub sampling: SamplingSpec,
    pub balayage_nodes: usize,
    pub spectrum_nodes: usize,
    pub gamma_nodes: usize,
    pub signals: usize,
    pub atoms: usize,
    pub reach: f64,
    /// Relative slack allowed in the chain comparisons.
    pub slack: f64,
}
