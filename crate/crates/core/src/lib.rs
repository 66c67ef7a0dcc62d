//! Autocorrelation and diffraction of finite superpositions of plane and
//! spherical waves.
//!
//! The crate has two independent routes to the same objects. The
//! [`closed_form`] module writes autocorrelations and diffraction measures
//! down exactly; the [`averaging`] module computes the defining finite-window
//! averages numerically. The [`verify`] harness checks one against the other.

pub mod averaging;
pub mod builtins;
pub mod closed_form;
pub mod error;
pub mod formats;
pub mod measure;
pub mod quad;
pub mod render;
pub mod special;
pub mod verify;
pub mod wave;

pub use error::{Error, ErrorClass, Result};
