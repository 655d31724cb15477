//! Artifact files shared by the library and the command-line tool.
//!
//! Every artifact is a JSON object with a `meta` provenance header and a
//! payload flattened beside it. Saves are deterministic byte for byte, so
//! rerunning a command with the same configuration reproduces its outputs
//! exactly.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basis::Basis;
use crate::decomp::ProjectorDecomposition;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::state::StateVector;

/// Provenance header embedded in every artifact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
}

impl Meta {
    pub fn new(tool: &str, version: &str, seed: u64, config_hash: String) -> Self {
        Meta { tool: tool.into(), version: version.into(), seed, config_hash }
    }
}

/// Hex SHA-256 of a configuration's canonical JSON encoding.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    Ok(content_hash(&serde_json::to_vec(config)?))
}

/// Hex SHA-256 of raw bytes, for folding input-file contents into a config
/// hash.
pub fn content_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Provenance plus payload, flattened into a single JSON object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub meta: Meta,
    #[serde(flatten)]
    pub payload: T,
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    fs::write(path, bytes)?;
    Ok(())
}

/// Compact single-line save that streams to the file instead of building the
/// whole encoding in memory; meant for bulky artifacts like plans and count
/// records.
pub fn save_json_compact<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut writer = std::io::BufWriter::new(file);
    serde_json::to_writer(&mut writer, value)?;
    std::io::Write::write_all(&mut writer, b"\n")?;
    std::io::Write::flush(&mut writer)?;
    Ok(())
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

/// State-vector file: `{dim, shape, basis, anchor, coefficients}` with
/// coefficients as `[re, im]` pairs. `anchor` records the gauge (the mode
/// held real and nonnegative); files without it fall back to the
/// largest-probability mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub shape: Option<(usize, usize)>,
    pub basis: Basis,
    #[serde(default)]
    pub anchor: Option<usize>,
    pub coefficients: Vec<(f64, f64)>,
}

impl StateFile {
    pub fn from_state(state: &StateVector) -> Self {
        StateFile {
            dim: state.dim(),
            shape: state.shape(),
            basis: state.basis(),
            anchor: Some(state.anchor()),
            coefficients: state.coefficients().iter().map(|c| (c.re, c.im)).collect(),
        }
    }

    pub fn to_state(&self) -> Result<StateVector> {
        if self.coefficients.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "state file declares dim {} but carries {} coefficients",
                self.dim,
                self.coefficients.len()
            )));
        }
        let coefficients: Vec<Complex64> =
            self.coefficients.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let anchor = self.anchor.unwrap_or_else(|| {
            let mut best = 0;
            for (i, c) in coefficients.iter().enumerate() {
                if c.norm_sqr() > coefficients[best].norm_sqr() {
                    best = i;
                }
            }
            best
        });
        StateVector::normalized_with(coefficients, self.shape, self.basis, anchor)
    }
}

/// Density-matrix file: `{dim, entries}` with entries row-major `[re, im]`
/// pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub dim: usize,
    pub entries: Vec<(f64, f64)>,
}

impl DensityFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        let m = rho.matrix();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push((m[(r, c)].re, m[(r, c)].im));
            }
        }
        DensityFile { dim, entries }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::DimensionMismatch(format!(
                "density file declares dim {} but carries {} entries",
                self.dim,
                self.entries.len()
            )));
        }
        let mat = CMatrix::from_fn(self.dim, self.dim, |r, c| {
            let (re, im) = self.entries[r * self.dim + c];
            Complex64::new(re, im)
        });
        DensityMatrix::new(mat)
    }
}

/// A dimension or mode index that is a plain integer for single systems and
/// a `[first, second]` pair for bipartite ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexValue {
    Single(usize),
    Pair([usize; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTermFile {
    pub weight: (f64, f64),
    /// Dense direction over the joint mode space.
    pub direction: Vec<(f64, f64)>,
    /// Per-subsystem factor vectors, present for bipartite decompositions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_factors: Option<Vec<Vec<(f64, f64)>>>,
}

/// Column-operator decomposition file: `{dims, reference, target, terms,
/// residual}` with each term carrying its complex weight and projector
/// direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub dims: IndexValue,
    pub reference: IndexValue,
    pub target: IndexValue,
    pub terms: Vec<DecompositionTermFile>,
    pub residual: f64,
}

impl DecompositionFile {
    pub fn from_decomposition(decomposition: &ProjectorDecomposition) -> Self {
        let dims = decomposition.dims();
        let total = dims.total();
        let as_index = |flat: usize| {
            if dims.is_bipartite() {
                let (a, b) = dims.split(flat);
                IndexValue::Pair([a, b])
            } else {
                IndexValue::Single(flat)
            }
        };
        let terms = decomposition
            .terms()
            .iter()
            .map(|term| {
                let mut direction = vec![(0.0, 0.0); total];
                for (i, c) in term.joint_entries(dims) {
                    direction[i] = (c.re, c.im);
                }
                let local_factors = if term.factors.len() == 2 {
                    Some(
                        term.factors
                            .iter()
                            .zip([dims.d1, dims.d2])
                            .map(|(factor, d)| {
                                factor.to_dense(d).iter().map(|c| (c.re, c.im)).collect()
                            })
                            .collect(),
                    )
                } else {
                    None
                };
                DecompositionTermFile {
                    weight: (term.weight.re, term.weight.im),
                    direction,
                    local_factors,
                }
            })
            .collect();
        DecompositionFile {
            dims: if dims.is_bipartite() {
                IndexValue::Pair([dims.d1, dims.d2])
            } else {
                IndexValue::Single(dims.d1)
            },
            reference: as_index(decomposition.reference()),
            target: as_index(decomposition.target()),
            terms,
            residual: decomposition.residual(),
        }
    }
}
