//! Physics-informed networks for second-order elliptic PDEs on closed surfaces.
//!
//! The surface operators are rewritten in terms of Euclidean derivatives of the
//! network (value, gradient and Hessian at each collocation point), the
//! pointwise residual is squared and averaged, and the network parameters are
//! fitted with L-BFGS.

pub mod check;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod jet;
pub mod net;
pub mod optim;
pub mod pde;
pub mod sampling;

mod par;

pub use error::{Error, Result};
