//! A seeded two-photon demo state on the OAM-Walsh mode grid.
//!
//! The state concentrates on the anti-correlated diagonal (l1 = -l2,
//! k1 = k2) with Gaussian envelopes over |l| and k, a linear phase advance
//! along the diagonal of the kind a Gouy shift produces, and a small seeded
//! leakage into off-diagonal mode pairs. The fundamental joint mode
//! (l = 0, k = 0 on both sides) always carries the largest probability, so it
//! is the natural reference for direct readout.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{Basis, Dims};
use crate::error::{Error, Result};
use crate::rng::derive_rng;
use crate::state::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DemoStateParams {
    /// OAM indices range over -l_max ..= l_max.
    pub l_max: u32,
    /// Walsh indices range over 0 ..= k_max.
    pub k_max: u32,
    /// Gaussian width of the diagonal envelope in |l|.
    pub oam_width: f64,
    /// Gaussian width of the diagonal envelope in k.
    pub radial_width: f64,
    /// Phase advance per diagonal mode step, radians.
    pub phase_rate: f64,
    /// Relative amplitude scale of off-diagonal leakage, in [0, 1).
    pub leakage: f64,
    pub seed: u64,
}

impl Default for DemoStateParams {
    fn default() -> Self {
        DemoStateParams {
            l_max: 15,
            k_max: 10,
            oam_width: 8.0,
            radial_width: 5.0,
            phase_rate: 0.2,
            leakage: 0.05,
            seed: 7,
        }
    }
}

impl DemoStateParams {
    /// The 5x5 subset used by the desk-scale studies: l in -2..=2, k = 0.
    pub fn five_mode_subset() -> Self {
        DemoStateParams { l_max: 2, k_max: 0, ..DemoStateParams::default() }
    }

    pub fn basis(&self) -> Basis {
        Basis::OamWalsh { l_max: self.l_max, k_max: self.k_max }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("oam_width", self.oam_width), ("radial_width", self.radial_width)] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {w}")));
            }
        }
        if !(0.0..1.0).contains(&self.leakage) {
            return Err(Error::InvalidConfig(format!(
                "leakage must lie in [0, 1), got {}",
                self.leakage
            )));
        }
        if !self.phase_rate.is_finite() {
            return Err(Error::InvalidConfig("phase_rate must be finite".into()));
        }
        Ok(())
    }

    fn envelope(&self, l: i64, k: u32) -> f64 {
        let l = l as f64;
        let k = k as f64;
        (-l * l / (2.0 * self.oam_width * self.oam_width)
            - k * k / (2.0 * self.radial_width * self.radial_width))
            .exp()
    }
}

/// Builds the demo state. The anchor is the fundamental joint mode, which is
/// strictly the largest coefficient by construction.
pub fn generate_demo_state(params: &DemoStateParams) -> Result<StateVector> {
    params.validate()?;
    let basis = params.basis();
    let d = basis.mode_count().expect("oam-walsh basis is finite");
    let dims = Dims::bipartite(d, d);
    let mut coefficients = vec![Complex64::default(); dims.total()];

    for j1 in 0..d {
        let (l, k) = basis.label_of(j1).expect("index within basis");
        let j2 = basis.index_of(-l, k).expect("mirror mode within basis");
        let envelope = params.envelope(l, k);
        let phase = params.phase_rate * (l.unsigned_abs() as f64 + 2.0 * k as f64);
        coefficients[dims.flatten(j1, j2)] =
            Complex64::from_polar(envelope, phase);
    }

    if params.leakage > 0.0 {
        let mut rng = derive_rng(params.seed, &[0]);
        for j1 in 0..d {
            let (l1, k1) = basis.label_of(j1).expect("index within basis");
            for j2 in 0..d {
                if basis.diagonal_pair(j1, j2) {
                    continue;
                }
                let (l2, k2) = basis.label_of(j2).expect("index within basis");
                let scale = (params.envelope(l1, k1) * params.envelope(l2, k2)).sqrt();
                let magnitude = params.leakage * rng.gen_range(0.0..1.0) * scale;
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                coefficients[dims.flatten(j1, j2)] = Complex64::from_polar(magnitude, phase);
            }
        }
    }

    let fundamental = basis.index_of(0, 0).expect("fundamental mode within basis");
    let anchor = dims.flatten(fundamental, fundamental);
    StateVector::normalized_with(coefficients, Some((d, d)), basis, anchor)
}
