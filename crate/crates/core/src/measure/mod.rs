//! Measurement planning, count simulation, and state reconstruction.

pub mod plan;
pub mod reconstruct;
pub mod shot;
