//! Dual-engine simulator for adiabatic cluster-state quantum computing.
//!
//! The crate pairs two independent engines over one Pauli-word substrate:
//!
//! - a **symbolic engine** ([`pauli`], [`frame`], [`recursion`]) that tracks
//!   stabilizer generators and logical operators through piecewise adiabatic
//!   dragging steps exactly, and
//! - an **exact numerical engine** ([`hamiltonian`], [`schedule`], [`evolve`])
//!   that builds the cluster Hamiltonians as Pauli sums, integrates the
//!   time-dependent Schrödinger equation matrix-free, scans instantaneous
//!   spectral gaps and extracts the induced logical unitary on the degenerate
//!   ground space.
//!
//! [`compiler`] maps small logical circuits onto cluster layouts, emits
//! dragging plans and verifies them against circuit-model oracle unitaries.

pub mod error;
pub mod pauli;
pub mod frame;
pub mod gates;
pub mod recursion;
pub mod hamiltonian;
pub mod schedule;
pub mod evolve;
pub mod compiler;

pub use nalgebra;
pub use num_complex;

pub use error::{Error, Result};
pub use frame::{LogicalPair, StabilizerFrame};
pub use hamiltonian::{HamiltonianSpec, Spectrum, StateVector};
pub use pauli::{
    conj_by_clifford, z_rotate_conjugate, Axis, CliffordGate, PauliString, PauliSum, Phase,
    RotationProfile,
};
pub use schedule::{DraggingPlan, Schedule, ScheduleShape};

/// Dense-path qubit cap; `ACSQC_DENSE_CAP` overrides the default of 12.
pub fn dense_cap() -> usize {
    std::env::var("ACSQC_DENSE_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(12)
}
