//! Simulator and calibration toolkit for quantum-dot single-photon sources
//! driven by phonon-assisted excitation of a linearly polarized exciton
//! dipole.
//!
//! The crate covers the full chain from drive pulse to detected photon:
//!
//! - [`params`] — physical parameters of dot, cavity, phonon bath and laser,
//!   plus the unit conversions between wavelength, energy and angular
//!   frequency used everywhere else.
//! - [`pulse`] — drive envelopes (quasi-Gaussian and top-hat-spectrum
//!   pulses) and the cavity transmission that maps incident power to
//!   intra-cavity pulse area.
//! - [`dynamics`] — Lindblad master equation for the driven exciton with
//!   radiative decay, pure dephasing and dressed-state phonon relaxation.
//! - [`correlations`] — pulsed two-time correlations via the quantum
//!   regression theorem: g²(0), mean wavepacket overlap and HOM visibility.
//! - [`polarization`] — cross-polarized emission of the two exciton dipoles
//!   and the degree of linear polarization.
//! - [`budget`] — optical transmission chains, detector dead-time saturation
//!   and first-lens brightness.
//! - [`runner`] — sweep orchestration (excitation curves, power scans,
//!   figure-of-merit maps) with CSV output and bath calibration.
//!
//! All internal computation uses natural units (time in ps, angular
//! frequency in rad/ps, ħ = 1); conversions to and from nm, µeV and meV
//! happen at the API boundary. Start with the runnable examples
//! (`cargo run --release --example excitation_curves`) or the `spsim`
//! command-line tool.

pub mod budget;
pub mod config;
pub mod consts;
pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod linalg;
mod ode;
pub mod params;
pub mod polarization;
pub mod pulse;
pub mod report;
pub mod runner;

pub use error::{Error, Result};
