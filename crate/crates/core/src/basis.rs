//! Mode labels and index maps.
//!
//! States are stored as flat coefficient arrays. A [`Basis`] gives the flat
//! indices physical meaning: either anonymous (`Flat`) or orbital-angular-
//! momentum crossed with Walsh radial modes (`OamWalsh`), where the mode
//! (l, k) sits at flat index `(l + l_max) * (k_max + 1) + k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Plain index basis with no extra structure.
    Flat,
    /// OAM index l in -l_max..=l_max crossed with Walsh index k in 0..=k_max.
    OamWalsh { l_max: u32, k_max: u32 },
}

impl Basis {
    /// Number of modes, for bases that fix their own dimension.
    pub fn mode_count(&self) -> Option<usize> {
        match *self {
            Basis::Flat => None,
            Basis::OamWalsh { l_max, k_max } => {
                Some((2 * l_max as usize + 1) * (k_max as usize + 1))
            }
        }
    }

    /// Flat index of the labelled mode (l, k).
    pub fn index_of(&self, l: i64, k: u32) -> Result<usize> {
        match *self {
            Basis::Flat => Err(Error::InvalidBasis(
                "flat basis has no (l, k) labels".into(),
            )),
            Basis::OamWalsh { l_max, k_max } => {
                if l.unsigned_abs() > l_max as u64 || k > k_max {
                    return Err(Error::InvalidBasis(format!(
                        "mode ({l}, {k}) outside l_max={l_max}, k_max={k_max}"
                    )));
                }
                Ok((l + l_max as i64) as usize * (k_max as usize + 1) + k as usize)
            }
        }
    }

    /// Mode label (l, k) of a flat index, when the basis carries labels.
    pub fn label_of(&self, index: usize) -> Option<(i64, u32)> {
        match *self {
            Basis::Flat => None,
            Basis::OamWalsh { l_max, k_max } => {
                let stride = k_max as usize + 1;
                if index >= (2 * l_max as usize + 1) * stride {
                    return None;
                }
                Some(((index / stride) as i64 - l_max as i64, (index % stride) as u32))
            }
        }
    }

    /// Whether a mode pair belongs to the correlated diagonal of a bipartite
    /// state in this basis: equal indices for `Flat`, opposite OAM and equal
    /// Walsh index for `OamWalsh`.
    pub fn diagonal_pair(&self, j1: usize, j2: usize) -> bool {
        match *self {
            Basis::Flat => j1 == j2,
            Basis::OamWalsh { .. } => match (self.label_of(j1), self.label_of(j2)) {
                (Some((l1, k1)), Some((l2, k2))) => l1 == -l2 && k1 == k2,
                _ => false,
            },
        }
    }
}

/// Subsystem dimensions of the mode space. Single systems use `d2 = 1`;
/// bipartite states flatten (j1, j2) to `j1 * d2 + j2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub d1: usize,
    pub d2: usize,
}

impl Dims {
    pub fn single(d: usize) -> Self {
        Dims { d1: d, d2: 1 }
    }

    pub fn bipartite(d1: usize, d2: usize) -> Self {
        Dims { d1, d2 }
    }

    pub fn total(&self) -> usize {
        self.d1 * self.d2
    }

    pub fn is_bipartite(&self) -> bool {
        self.d2 > 1
    }

    pub fn subsystems(&self) -> usize {
        if self.is_bipartite() { 2 } else { 1 }
    }

    pub fn split(&self, flat: usize) -> (usize, usize) {
        (flat / self.d2, flat % self.d2)
    }

    pub fn flatten(&self, j1: usize, j2: usize) -> usize {
        j1 * self.d2 + j2
    }
}
