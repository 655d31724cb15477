//! State reconstruction from count records, with propagated error bounds.
//!
//! Each coefficient block yields a raw estimate
//! `c_j = sum_q w_q (N_q / t_q) / r`, where `r` is the count rate seen on the
//! block's own monitor measurement. Dividing by the block-local monitor rate
//! cancels both the unknown reference-mode amplitude and any slow source
//! drift, because every measurement in a block sits close to its monitor on
//! the shared clock. Normalizing the raw vector with the phase anchored at
//! the reference mode then gives the state estimate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::plan::MeasurementPlan;
use crate::measure::shot::{BlockRecord, CountRecord, NoiseMode};
use crate::state::StateVector;

fn check_consistency(record: &CountRecord, plan: &MeasurementPlan) -> Result<()> {
    if record.dims != plan.dims {
        return Err(Error::PlanMismatch(format!(
            "record shape {}x{} vs plan shape {}x{}",
            record.dims.d1, record.dims.d2, plan.dims.d1, plan.dims.d2
        )));
    }
    if record.basis != plan.basis {
        return Err(Error::PlanMismatch("record and plan bases differ".into()));
    }
    if record.reference != plan.reference {
        return Err(Error::PlanMismatch(format!(
            "record reference {} vs plan reference {}",
            record.reference, plan.reference
        )));
    }
    if record.blocks.len() != plan.coefficients.len() {
        return Err(Error::PlanMismatch(format!(
            "record has {} blocks, plan has {} coefficients",
            record.blocks.len(),
            plan.coefficients.len()
        )));
    }
    for (block, coeff) in record.blocks.iter().zip(&plan.coefficients) {
        if block.target != coeff.target {
            return Err(Error::PlanMismatch(format!(
                "block target {} vs plan target {}",
                block.target, coeff.target
            )));
        }
        if block.monitor.setting != plan.monitor {
            return Err(Error::PlanMismatch(format!(
                "block {} monitor uses setting {}, plan monitor is {}",
                block.target, block.monitor.setting, plan.monitor
            )));
        }
        if block.projectors.len() != coeff.terms.len() {
            return Err(Error::PlanMismatch(format!(
                "block {} has {} measurements, plan wants {}",
                block.target,
                block.projectors.len(),
                coeff.terms.len()
            )));
        }
        for (m, term) in block.projectors.iter().zip(&coeff.terms) {
            if m.setting != term.setting {
                return Err(Error::PlanMismatch(format!(
                    "block {} measured setting {}, plan wants setting {}",
                    block.target, m.setting, term.setting
                )));
            }
        }
        for m in std::iter::once(&block.monitor).chain(&block.projectors) {
            if !(m.duration > 0.0 && m.duration.is_finite()) || !m.counts.is_finite() {
                return Err(Error::PlanMismatch(format!(
                    "block {} carries a measurement with duration {} and counts {}",
                    block.target, m.duration, m.counts
                )));
            }
        }
    }
    Ok(())
}

fn monitor_rate(block: &BlockRecord) -> Result<f64> {
    if block.monitor.counts <= 0.0 {
        return Err(Error::ReferenceUnobserved { block: block.target });
    }
    Ok(block.monitor.counts / block.monitor.duration)
}

fn block_estimate(block: &BlockRecord, plan: &MeasurementPlan) -> Result<Complex64> {
    let rate = monitor_rate(block)?;
    let coeff = &plan.coefficients[block.target];
    let mut c = Complex64::default();
    for (m, term) in block.projectors.iter().zip(&coeff.terms) {
        c += term.weight * ((m.counts / m.duration) / rate);
    }
    Ok(c)
}

/// Unnormalized coefficient estimates, one per flat mode index. The entry at
/// the reference index estimates 1 by construction.
pub fn raw_coefficients(record: &CountRecord, plan: &MeasurementPlan) -> Result<Vec<Complex64>> {
    check_consistency(record, plan)?;
    record.blocks.iter().map(|block| block_estimate(block, plan)).collect()
}

/// Full state estimate: raw coefficients, normalized and phase-anchored at
/// the reference mode.
pub fn reconstruct(record: &CountRecord, plan: &MeasurementPlan) -> Result<StateVector> {
    let raw = raw_coefficients(record, plan)?;
    let shape = if record.dims.is_bipartite() {
        Some((record.dims.d1, record.dims.d2))
    } else {
        None
    };
    StateVector::normalized_with(raw, shape, record.basis, record.reference)
}

/// One-sigma uncertainties on a reconstructed coefficient, from Poisson
/// count statistics propagated through the weighted sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientError {
    pub target: usize,
    /// Uncertainty on the normalized amplitude `|c|`.
    pub sigma_amplitude: f64,
    /// Uncertainty on the phase in radians; `pi` when the estimate is zero
    /// and the phase carries no information.
    pub sigma_phase: f64,
}

/// Error bounds for every coefficient of a record. Exact-mode records carry
/// no sampling noise, so their bounds are zero.
pub fn error_bounds(record: &CountRecord, plan: &MeasurementPlan) -> Result<Vec<CoefficientError>> {
    check_consistency(record, plan)?;
    if record.shot.noise == NoiseMode::Exact {
        return Ok(record
            .blocks
            .iter()
            .map(|b| CoefficientError { target: b.target, sigma_amplitude: 0.0, sigma_phase: 0.0 })
            .collect());
    }

    let raw = record
        .blocks
        .iter()
        .map(|block| block_estimate(block, plan))
        .collect::<Result<Vec<_>>>()?;
    let norm: f64 = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let scale = 1.0 / norm;

    let mut bounds = Vec::with_capacity(record.blocks.len());
    for (block, c) in record.blocks.iter().zip(&raw) {
        let rate = monitor_rate(block)?;
        let monitor_counts = block.monitor.counts;
        let coeff = &plan.coefficients[block.target];
        let mut var_re = 0.0;
        let mut var_im = 0.0;
        for (m, term) in block.projectors.iter().zip(&coeff.terms) {
            let x = (m.counts / m.duration) / rate;
            let var_x = m.counts / (m.duration * m.duration * rate * rate)
                + x * x / monitor_counts;
            var_re += term.weight.re * term.weight.re * var_x;
            var_im += term.weight.im * term.weight.im * var_x;
        }
        let amp = c.norm();
        let (sigma_amplitude, sigma_phase) = if amp > 0.0 {
            let var_amp = (c.re * c.re * var_re + c.im * c.im * var_im) / (amp * amp);
            let var_phase = (c.im * c.im * var_re + c.re * c.re * var_im)
                / (amp * amp * amp * amp);
            (var_amp.sqrt() * scale, var_phase.sqrt())
        } else {
            ((var_re + var_im).sqrt() * scale, std::f64::consts::PI)
        };
        bounds.push(CoefficientError { target: block.target, sigma_amplitude, sigma_phase });
    }
    Ok(bounds)
}
