//! Exact computations with non-symmetric operads in non-negatively graded
//! chain complexes over Q.
//!
//! The crate builds free operads on planar trees and the odd-tree presentation
//! of cell attachments, Poisson operads of any degree, the cosimplicial complex
//! of a multiplicative operad with its Hochschild cohomology and Gerstenhaber
//! operations, and the pages of the associated spectral sequence.

pub mod chain;
pub mod cli;
pub mod error;
pub mod exactla;
pub mod free;
pub mod hochschild;
pub mod operad;
pub mod poisson;
pub mod specseq;
pub mod trees;

pub use error::{Error, Result};
