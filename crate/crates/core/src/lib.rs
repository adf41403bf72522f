//! Extremal operations on grid functions: infimal convolution, sup-min and
//! inf-max, radial transforms built from minimal enclosing balls of level
//! sets, Luxemburg norms, and Hamilton-Jacobi solution formulas.

pub mod conjugate;
pub mod error;
pub mod extremal;
pub mod gridfn;
pub mod harness;
pub mod hj;
pub mod minball;
pub mod orlicz;
pub mod par;
pub mod transform;

pub use error::{Error, Result};
