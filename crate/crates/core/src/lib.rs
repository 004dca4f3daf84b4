//! Simulation models for uncompressed 4K video transport from a drone to a
//! ground access point over a 60 GHz link.
//!
//! The crate is organised bottom-up:
//!
//! * [`linkbudget`] - free-space path loss, noise floor, SNR and range inversion
//! * [`mcs`] - SNR threshold tables and capacity selection
//! * [`kinematics`] - trajectories, beam pointing offsets and the polarization gimbal
//! * [`video`] - raw frame sizes, bitrates and the abstract codec
//! * [`detection`] - calibrated face-detection probability model
//! * [`engine`] - the time-stepped run tying everything together

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detection;
pub mod engine;
pub mod error;
pub mod kinematics;
pub mod linkbudget;
pub mod mcs;
pub mod video;

pub use error::{Error, Result};
