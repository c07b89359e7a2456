//! Interior membership for truncated moment cones.
//!
//! A moment sequence `y` lies in the interior of the cone of sequences
//! representable by measures on `K` exactly when the concave dual problem
//! `sup_p <p, y> - int e^p dmu` has a finite value. When it does, the maximizer
//! `p*` gives a representing density `e^{p*}` relative to `mu`, and the optimal
//! value `f*(y)` is a barrier for the cone. Unbounded supports `K` (full space,
//! orthants) are handled by homogenizing onto a sector of the unit sphere.

pub mod basis;
pub mod domain;
pub mod error;
pub mod objective;
pub mod quadrature;
pub mod reconstruct;
pub mod reduce;
pub mod solver;

pub use basis::{Basis, BasisMode, BasisSpec, MomentSequence, MultiIndex, PolyCoeffs};
pub use domain::{DensitySpec, DomainSpec, MeasureSpec, Sign};
pub use error::{MomentError, Result};

pub use objective::ObjectiveContext;
pub use quadrature::QuadratureRule;
pub use reconstruct::{DensityModel, VerifyReport};
pub use reduce::ExecPolicy;
pub use solver::{SolveReport, SolveStatus, SolverConfig};

