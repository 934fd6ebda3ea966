//! Stationary discs for strongly pseudoconvex hypersurfaces in almost complex
//! coordinate charts.
//!
//! The crate is organised bottom-up: [`algebra`] supplies polynomial and disc
//! arithmetic, [`structures`] models almost complex structures and
//! hypersurfaces, [`cotangent`] lifts them to the cotangent bundle,
//! [`rhmodel`] solves the osculating model problem and its linearization, and
//! [`continuation`] deforms model discs into discs of a general pair.
//! [`cli`] runs whole scenarios from a config document.

pub mod algebra;
pub mod error;
pub mod structures;
pub mod cotangent;
pub mod rhmodel;
pub mod continuation;
pub mod cli;

pub use error::{Error, Result};
