//! Simulation of single-photon temporal-shape conversion by multi-photon
//! wavepacket interference on a multimode linear-optical network, with
//! time-resolved post-selection.
//!
//! The crate is `no_std` (with `alloc`); all file/CLI concerns live in the
//! companion `photonshape` binary crate.
//!
//! Pipeline: [`shapes`] define single-photon temporal amplitudes and their
//! overlap (Gram) kernel; [`network`] builds the mode unitaries;
//! [`interference`] expands the N-photon product state into bosonic output
//! components with symbolic term lists; [`postselect`] conditions a component
//! on detection events and produces the remaining photon's shape;
//! [`metrics`] and [`optimize`] evaluate fidelities, sweeps, and parameter
//! searches; [`oracle`] is an independent brute-force validator.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod faddeeva;
pub mod interference;
pub mod metrics;
pub mod network;
pub mod optimize;
pub mod oracle;
pub mod postselect;
pub mod quadrature;
pub mod shapes;

/// Complex double, the scalar type of every amplitude in the crate.
pub type C64 = num_complex::Complex<f64>;

pub use error::Error;
