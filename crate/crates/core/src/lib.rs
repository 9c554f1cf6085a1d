//! Certified upper and lower bounds on sum-of-squares relaxations of sphere
//! maxima of random tensors, via explicit spectral constructions instead of a
//! generic SDP solver.
//!
//! The pipeline: generate a seeded random tensor ([`tensor`]), pick a
//! certificate route — quotient compression at `q = d` ([`quotient`]),
//! symmetrized Kronecker powers for even orders ([`upper_even`]), the slice
//! pipeline for 3-tensors ([`upper_odd3`]), or a feasible moment matrix for
//! lower bounds ([`lower`]) — and report the bounds next to a heuristic
//! maximum estimate ([`fmax`], [`report`]).

pub mod error;
pub mod fmax;
pub mod index;
pub mod lower;
pub mod matrix;
pub mod quotient;
pub mod report;
pub mod spectral;
pub mod stats;
pub mod tensor;
pub mod upper_even;
pub mod upper_odd3;
pub mod verify;
pub mod wigner;

pub use error::{Error, Result};
