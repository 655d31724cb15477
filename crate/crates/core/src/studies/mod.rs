//! Numerical studies and the random ensembles feeding them.

pub mod demo;
pub mod mixed;
pub mod tomography;

use num_complex::Complex64;
use rand::Rng;

use crate::basis::Basis;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{ginibre, hermitian_eigen, standard_complex, CMatrix};
use crate::state::StateVector;

/// Haar-uniform pure state (up to the anchored global phase): a vector of
/// independent standard complex Gaussians, normalized.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    let coefficients: Vec<Complex64> = (0..dim).map(|_| standard_complex(rng)).collect();
    StateVector::normalized(coefficients, 0).expect("gaussian vector is nonzero")
}

/// Haar-uniform bipartite pure state with a declared (d1, d2) shape.
pub fn random_bipartite_state<R: Rng + ?Sized>(
    d1: usize,
    d2: usize,
    rng: &mut R,
) -> StateVector {
    let coefficients: Vec<Complex64> = (0..d1 * d2).map(|_| standard_complex(rng)).collect();
    StateVector::normalized_with(coefficients, Some((d1, d2)), Basis::Flat, 0)
        .expect("gaussian vector is nonzero")
}

fn spectrum_purity(spectrum: &[f64]) -> f64 {
    spectrum.iter().map(|p| p * p).sum()
}

/// Random density matrix of the requested rank and purity: a rank-limited
/// Ginibre mixture whose spectrum is interpolated toward pure or toward
/// uniform, with the mixing parameter bisected until Tr(rho^2) matches.
/// The eigenbasis stays Haar-random throughout.
pub fn random_density_matrix<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    purity: f64,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::InvalidConfig(format!(
            "rank {rank} invalid for dimension {dim}"
        )));
    }
    let min = 1.0 / rank as f64;
    if !purity.is_finite() || purity > 1.0 + 1e-9 || purity < min - 1e-9 {
        return Err(Error::InfeasiblePurity { purity, rank, min });
    }
    if purity >= 1.0 - 1e-9 {
        let psi = random_pure_state(dim, rng);
        return Ok(DensityMatrix::from_pure(&psi));
    }
    if rank == 1 {
        return Err(Error::InfeasiblePurity { purity, rank: 1, min: 1.0 });
    }

    let a = ginibre(dim, rank, rng);
    let rho0 = &a * a.adjoint();
    let trace: f64 = (0..dim).map(|i| rho0[(i, i)].re).sum();
    let rho0 = rho0 / Complex64::new(trace, 0.0);
    let (values, vectors) = hermitian_eigen(&rho0);

    let mut base: Vec<f64> = values[..rank].iter().map(|&v| v.max(0.0)).collect();
    let base_sum: f64 = base.iter().sum();
    for v in &mut base {
        *v /= base_sum;
    }
    let base_purity = spectrum_purity(&base);
    let target: Vec<f64> = if purity >= base_purity {
        let mut t = vec![0.0; rank];
        t[0] = 1.0;
        t
    } else {
        vec![min; rank]
    };
    let toward_pure = purity >= base_purity;

    let blend = |t: f64| -> Vec<f64> {
        base.iter().zip(&target).map(|(&b, &g)| (1.0 - t) * b + t * g).collect()
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut spectrum = blend(0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        spectrum = blend(mid);
        let p = spectrum_purity(&spectrum);
        if (p - purity).abs() <= 1e-12 {
            break;
        }
        // Purity is monotone along the blend: rising toward the pure
        // endpoint, falling toward the uniform one.
        if (p < purity) == toward_pure {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (spectrum_purity(&spectrum) - purity).abs() > 1e-6 {
        return Err(Error::InfeasiblePurity { purity, rank, min });
    }

    let mut mat = CMatrix::zeros(dim, dim);
    for (i, &p) in spectrum.iter().enumerate() {
        let v = vectors.column(i);
        let scale = Complex64::new(p, 0.0);
        for r in 0..dim {
            for c in 0..dim {
                mat[(r, c)] += scale * v[r] * v[c].conj();
            }
        }
    }
    let hermitized = (&mat + mat.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(hermitized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_distance;
    use crate::rng::derive_rng;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pure_states_are_unit_norm_and_deterministic() {
        let a = random_pure_state(7, &mut derive_rng(3, &[0]));
        let b = random_pure_state(7, &mut derive_rng(3, &[0]));
        assert_eq!(a, b);
        let total: f64 = a.born_probabilities().iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        let single = random_pure_state(1, &mut derive_rng(4, &[0]));
        assert_abs_diff_eq!(single.coefficient(0).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn pure_state_overlaps_concentrate_at_one_over_d() {
        // Mean squared overlap between independent Haar states is 1/d; the
        // sample mean over n pairs has std below sqrt(2)/(d sqrt(n)).
        let d = 6;
        let pairs = 1000;
        let mut total = 0.0;
        for i in 0..pairs {
            let a = random_pure_state(d, &mut derive_rng(100, &[i, 0]));
            let b = random_pure_state(d, &mut derive_rng(100, &[i, 1]));
            total += a.overlap(&b).unwrap().norm_sqr();
        }
        let mean = total / pairs as f64;
        let sigma = (2.0f64).sqrt() / (d as f64 * (pairs as f64).sqrt());
        assert!(
            (mean - 1.0 / d as f64).abs() < 3.0 * sigma,
            "mean overlap {mean} vs expected {}",
            1.0 / d as f64
        );
    }

    #[test]
    fn bipartite_states_carry_their_shape() {
        let s = random_bipartite_state(3, 5, &mut derive_rng(9, &[0]));
        assert_eq!(s.shape(), Some((3, 5)));
        assert_eq!(s.dim(), 15);
    }

    #[test]
    fn density_hits_requested_purity_and_rank() {
        for (dim, rank, purity) in
            [(8, 3, 0.85), (16, 4, 0.5), (4, 2, 0.9), (6, 6, 0.2), (64, 4, 0.85)]
        {
            let rho =
                random_density_matrix(dim, rank, purity, &mut derive_rng(11, &[rank as u64]))
                    .unwrap();
            assert_abs_diff_eq!(rho.purity(), purity, epsilon = 1e-6);
            let (values, _) = hermitian_eigen(rho.matrix());
            let effective = values.iter().filter(|&&v| v > 1e-10).count();
            assert_eq!(effective, rank, "dim {dim} rank {rank} purity {purity}");
        }
    }

    #[test]
    fn purity_floor_gives_maximally_mixed() {
        let rho = random_density_matrix(4, 4, 0.25, &mut derive_rng(12, &[0])).unwrap();
        let uniform = DensityMatrix::maximally_mixed(4);
        assert!(frobenius_distance(rho.matrix(), uniform.matrix()) < 1e-5);
    }

    #[test]
    fn purity_one_is_exactly_pure() {
        let rho = random_density_matrix(5, 1, 1.0, &mut derive_rng(13, &[0])).unwrap();
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
        let rho = random_density_matrix(5, 3, 1.0, &mut derive_rng(13, &[1])).unwrap();
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn infeasible_requests_error() {
        let mut rng = derive_rng(14, &[0]);
        assert!(matches!(
            random_density_matrix(4, 2, 0.3, &mut rng),
            Err(Error::InfeasiblePurity { .. })
        ));
        assert!(matches!(
            random_density_matrix(4, 1, 0.9, &mut rng),
            Err(Error::InfeasiblePurity { .. })
        ));
        assert!(random_density_matrix(4, 5, 0.9, &mut rng).is_err());
        assert!(random_density_matrix(4, 0, 1.0, &mut rng).is_err());
        assert!(matches!(
            random_density_matrix(4, 2, 1.2, &mut rng),
            Err(Error::InfeasiblePurity { .. })
        ));
    }
}
