//! Numerics for reactant–product coherence in two-step electron transfer and
//! for radical-pair spin master equations.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrices, a Hermitian eigensolver, unitary
//!   propagation, density-matrix diagnostics and a fixed-step RK4 integrator.
//! - [`et_model`]: the reactant / intermediate-manifold / product-plus-photon
//!   model, its exact propagation and the golden-rule and sequential-kinetics
//!   reference predictions.
//! - [`perturbation`]: order-by-order time-dependent perturbation amplitudes
//!   for the same model.
//! - [`spin`]: two-electron radical-pair master equations and the entropy,
//!   purity and yield diagnostics built on them.
//!
//! All quantities use ħ = 1: energies share one arbitrary unit and times are
//! measured in its inverse.

pub mod et_model;
pub mod linalg;
pub mod perturbation;
pub mod spin;

pub use linalg::{CMatrix, DensityMatrix, HermitianOperator, StateVector, C64};
