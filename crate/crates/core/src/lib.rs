//! Translating solitons of mean curvature flow in products `ℝ × P`, where
//! `P` carries a rotationally invariant metric.
//!
//! The crate is organised bottom-up:
//!
//! * [`warp`]: base metrics `dr² + ξ²(r) dϑ²` and their curvature.
//! * [`ode`], [`quadrature`]: the adaptive integrator and quadrature used
//!   throughout.
//! * [`profile`]: arc-length profile curves of bowls, wings and ideal
//!   solitons.
//! * [`graph`]: the same solitons written as radial graphs, plus grim
//!   reapers and closed-form references.
//! * [`diagnostics`]: independent checks of the identities satisfied by
//!   computed solitons.
//! * [`flow`]: method-of-lines radial graphical mean curvature flow and
//!   its monotone weighted area.
//! * [`lorentz`]: the hyperboloid model of ℍⁿ and its translations.
//! * [`mesh`], [`io`]: surfaces of revolution and file export.

// `!(x > 0.0)` is used deliberately so that NaN fails every guard.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod graph;
pub mod io;
pub mod lorentz;
pub mod mesh;
pub mod ode;
pub mod profile;
pub mod quadrature;
pub mod warp;

pub use error::{Result, SolitonError};
pub use warp::{CurvatureBounds, WarpKind, WarpModel};
