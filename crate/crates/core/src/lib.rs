//! Lattice theta functions, their measure-smeared ("soft") generalisations,
//! completely monotone lattice energies, and numerical criticality and
//! minimality checks over lattice shapes, translations and smearing scales.

pub mod energy;
pub mod error;
pub mod lattice;
pub mod measure;
pub mod optimize;
pub mod quad;
pub mod report;
pub mod special_fn;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
