//! State vectors with a fixed global-phase convention.
//!
//! Reconstruction determines a state only up to one complex factor, so every
//! `StateVector` is unit norm with the phase anchored: the coefficient at the
//! anchor index is real and nonnegative. When the anchor coefficient is zero
//! the phase is fixed by the largest-magnitude coefficient instead (lowest
//! index on ties), which keeps the convention total.

use num_complex::Complex64;

use crate::basis::{Basis, Dims};
use crate::error::{Error, Result};

/// Compensated accumulator; keeps norm and overlap errors near machine
/// epsilon even for six-figure mode counts.
#[derive(Default, Clone, Copy)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, value: f64) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

fn norm_sqr_compensated(c: &[Complex64]) -> f64 {
    let mut acc = KahanSum::default();
    for z in c {
        acc.add(z.re * z.re);
        acc.add(z.im * z.im);
    }
    acc.sum
}

fn largest_magnitude_index(c: &[Complex64]) -> usize {
    let mut best = 0;
    let mut best_mag = c[0].norm_sqr();
    for (i, z) in c.iter().enumerate().skip(1) {
        let mag = z.norm_sqr();
        if mag > best_mag {
            best = i;
            best_mag = mag;
        }
    }
    best
}

/// Normalizes in place and anchors the global phase, returning the index the
/// phase was actually pinned to. Idempotent to the bit: a vector that is
/// already canonical is returned untouched.
pub fn normalize_in_place(c: &mut [Complex64], anchor: usize) -> Result<usize> {
    if anchor >= c.len() {
        return Err(Error::IndexOutOfRange { index: anchor, dim: c.len() });
    }
    let norm_sqr = norm_sqr_compensated(c);
    if !norm_sqr.is_finite() || norm_sqr == 0.0 {
        return Err(Error::DegenerateState);
    }
    let effective = if c[anchor].norm_sqr() > 0.0 { anchor } else { largest_magnitude_index(c) };
    let za = c[effective];
    if za.im == 0.0 && za.re > 0.0 && (norm_sqr - 1.0).abs() <= 1e-12 {
        return Ok(effective);
    }
    let norm = norm_sqr.sqrt();
    let scale = za.conj() / (za.norm() * norm);
    for z in c.iter_mut() {
        *z *= scale;
    }
    c[effective] = Complex64::new(za.norm() / norm, 0.0);
    Ok(effective)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    coefficients: Vec<Complex64>,
    shape: Option<(usize, usize)>,
    basis: Basis,
    anchor: usize,
}

impl StateVector {
    /// Normalized single-system state in the flat basis.
    pub fn normalized(coefficients: Vec<Complex64>, anchor: usize) -> Result<Self> {
        Self::normalized_with(coefficients, None, Basis::Flat, anchor)
    }

    /// Normalized state with an optional bipartite shape and an explicit
    /// basis; bipartite coefficients are flattened as `j1 * d2 + j2`.
    pub fn normalized_with(
        mut coefficients: Vec<Complex64>,
        shape: Option<(usize, usize)>,
        basis: Basis,
        anchor: usize,
    ) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::DegenerateState);
        }
        if let Some((d1, d2)) = shape {
            if d1 == 0 || d2 == 0 || d1 * d2 != coefficients.len() {
                return Err(Error::DimensionMismatch(format!(
                    "shape {d1}x{d2} does not match {} coefficients",
                    coefficients.len()
                )));
            }
            if let Some(m) = basis.mode_count() {
                if m != d1 || m != d2 {
                    return Err(Error::InvalidBasis(format!(
                        "basis has {m} modes per subsystem, shape is {d1}x{d2}"
                    )));
                }
            }
        } else if let Some(m) = basis.mode_count() {
            if m != coefficients.len() {
                return Err(Error::InvalidBasis(format!(
                    "basis has {m} modes, state has {}",
                    coefficients.len()
                )));
            }
        }
        let effective = normalize_in_place(&mut coefficients, anchor)?;
        Ok(StateVector { coefficients, shape, basis, anchor: effective })
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    /// Index the global phase is pinned to; the coefficient there is real
    /// and positive.
    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn shape(&self) -> Option<(usize, usize)> {
        self.shape
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Subsystem dimensions; single systems report `d2 = 1`.
    pub fn dims(&self) -> Dims {
        match self.shape {
            Some((d1, d2)) => Dims::bipartite(d1, d2),
            None => Dims::single(self.dim()),
        }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficient(&self, index: usize) -> Complex64 {
        self.coefficients[index]
    }

    pub fn born_probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.coefficients[index].norm_sqr()
    }

    /// Inner product <self|other>.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "overlap of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        let mut re = KahanSum::default();
        let mut im = KahanSum::default();
        for (a, b) in self.coefficients.iter().zip(&other.coefficients) {
            let p = a.conj() * b;
            re.add(p.re);
            im.add(p.im);
        }
        Ok(Complex64::new(re.sum, im.sum))
    }

    /// |<self|other>|, the fidelity between two pure states.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.overlap(other)?.norm().min(1.0))
    }
}
