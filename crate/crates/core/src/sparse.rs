//! Sparse unit vectors.
//!
//! Projector directions in the measurement plans touch at most two modes per
//! subsystem, while the mode space can hold hundreds of thousands of joint
//! modes. Directions are therefore stored as sorted (index, amplitude) pairs
//! and never materialized densely.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    entries: Vec<(u32, Complex64)>,
}

impl SparseState {
    /// Builds a unit vector from (index, amplitude) pairs. Entries are sorted
    /// by index and the vector is normalized; duplicate indices or a zero
    /// vector are rejected. Inputs already unit norm within 1e-12 keep their
    /// exact bits, so serialization round trips losslessly.
    pub fn new(mut entries: Vec<(u32, Complex64)>) -> Result<Self> {
        entries.retain(|(_, c)| c.norm_sqr() > 0.0);
        entries.sort_by_key(|&(i, _)| i);
        if entries.is_empty() {
            return Err(Error::DegenerateState);
        }
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidConfig(
                "sparse state has duplicate mode indices".into(),
            ));
        }
        let norm_sqr = entries.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>();
        if !norm_sqr.is_finite() || norm_sqr == 0.0 {
            return Err(Error::DegenerateState);
        }
        if (norm_sqr - 1.0).abs() > 1e-12 {
            let norm = norm_sqr.sqrt();
            for (_, c) in &mut entries {
                *c /= norm;
            }
        }
        Ok(SparseState { entries })
    }

    /// The basis vector |index>.
    pub fn basis(index: u32) -> Self {
        SparseState { entries: vec![(index, Complex64::new(1.0, 0.0))] }
    }

    /// The balanced superposition (|base> + e^{i phase} |partner>) / sqrt(2).
    pub fn superposition(base: u32, partner: u32, phase: f64) -> Result<Self> {
        if base == partner {
            return Err(Error::InvalidConfig(
                "superposition needs two distinct modes".into(),
            ));
        }
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(vec![
            (base, Complex64::new(amp, 0.0)),
            (partner, Complex64::from_polar(amp, phase)),
        ])
    }

    pub fn entries(&self) -> &[(u32, Complex64)] {
        &self.entries
    }

    pub fn max_index(&self) -> u32 {
        self.entries.last().map(|&(i, _)| i).unwrap_or(0)
    }

    /// Inner product <self|psi> against a dense coefficient slice.
    pub fn amplitude(&self, psi: &[Complex64]) -> Complex64 {
        self.entries
            .iter()
            .map(|&(i, c)| c.conj() * psi[i as usize])
            .sum()
    }

    /// Born probability |<self|psi>|^2.
    pub fn probability_pure(&self, psi: &[Complex64]) -> f64 {
        self.amplitude(psi).norm_sqr()
    }

    /// Born probability <self|rho|self> for a density matrix.
    pub fn probability_density(&self, rho: &CMatrix) -> f64 {
        let mut acc = Complex64::default();
        for &(i, ci) in &self.entries {
            for &(k, ck) in &self.entries {
                acc += ci.conj() * rho[(i as usize, k as usize)] * ck;
            }
        }
        acc.re.max(0.0)
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); dim];
        for &(i, c) in &self.entries {
            out[i as usize] = c;
        }
        out
    }

    /// Sparse view of a dense vector, dropping exact zeros.
    pub fn from_dense(v: &[Complex64]) -> Result<Self> {
        Self::new(
            v.iter()
                .enumerate()
                .filter(|(_, c)| c.norm_sqr() > 0.0)
                .map(|(i, &c)| (i as u32, c))
                .collect(),
        )
    }

    /// Exact bit-pattern key, used to deduplicate settings.
    pub fn bit_key(&self, out: &mut Vec<u64>) {
        out.push(self.entries.len() as u64);
        for &(i, c) in &self.entries {
            out.push(i as u64);
            out.push(c.re.to_bits());
            out.push(c.im.to_bits());
        }
    }

    /// Multiplies every amplitude by the phase that makes the first entry
    /// real and positive.
    pub fn gauged(&self) -> Self {
        let first = self.entries[0].1;
        let phase = first / first.norm();
        if phase.im == 0.0 && phase.re > 0.0 {
            return self.clone();
        }
        let scale = phase.conj();
        let mut entries: Vec<(u32, Complex64)> =
            self.entries.iter().map(|&(i, c)| (i, c * scale)).collect();
        entries[0].1 = Complex64::new(first.norm(), 0.0);
        SparseState { entries }
    }
}

/// Entries of the tensor product of per-subsystem factors, as flat joint
/// indices `i1 * d2 + i2`. A single factor passes through unchanged.
pub fn joint_entries(factors: &[SparseState], d2: usize) -> Vec<(usize, Complex64)> {
    match factors {
        [single] => single.entries.iter().map(|&(i, c)| (i as usize, c)).collect(),
        [f1, f2] => {
            let mut out = Vec::with_capacity(f1.entries.len() * f2.entries.len());
            for &(i1, c1) in &f1.entries {
                for &(i2, c2) in &f2.entries {
                    out.push((i1 as usize * d2 + i2 as usize, c1 * c2));
                }
            }
            out
        }
        _ => panic!("settings have one or two subsystem factors"),
    }
}

impl Serialize for SparseState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<(u32, f64, f64)> =
            self.entries.iter().map(|&(i, c)| (i, c.re, c.im)).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SparseState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<(u32, f64, f64)> = Vec::deserialize(deserializer)?;
        SparseState::new(
            rows.into_iter()
                .map(|(i, re, im)| (i, Complex64::new(re, im)))
                .collect(),
        )
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normalizes_and_sorts() {
        let s = SparseState::new(vec![
            (5, Complex64::new(0.0, 2.0)),
            (1, Complex64::new(2.0, 0.0)),
        ])
        .unwrap();
        assert_eq!(s.entries()[0].0, 1);
        let norm: f64 = s.entries().iter().map(|(_, c)| c.norm_sqr()).sum();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SparseState::new(vec![]).is_err());
        assert!(SparseState::new(vec![(0, Complex64::default())]).is_err());
        assert!(SparseState::new(vec![
            (2, Complex64::new(1.0, 0.0)),
            (2, Complex64::new(0.0, 1.0)),
        ])
        .is_err());
        assert!(SparseState::superposition(3, 3, 0.1).is_err());
    }

    #[test]
    fn amplitude_matches_dense_inner_product() {
        let s = SparseState::superposition(0, 2, std::f64::consts::FRAC_PI_3).unwrap();
        let psi = [
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(0.3, -0.2),
        ];
        let dense = s.to_dense(3);
        let expected: Complex64 = dense.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum();
        assert_relative_eq!(s.amplitude(&psi).re, expected.re, epsilon = 1e-15);
        assert_relative_eq!(s.amplitude(&psi).im, expected.im, epsilon = 1e-15);
    }

    #[test]
    fn serde_round_trip() {
        let s = SparseState::superposition(3, 17, 1.234).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: SparseState = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
    }
}
