//! Calculus of generalized partial-slice monogenic functions of type (p,q)
//! with values in the real Clifford algebra R_{p+q}.

pub mod cli;
pub mod clifford;
pub mod error;
pub mod fueter;
pub mod kernel;
pub mod mobius;
pub mod poly;
pub mod quad;
pub mod slice;
pub mod stem;
pub mod tolerances;
pub mod verify;

pub use clifford::{AlgebraSignature, Blade, Multivector, Paravector};
pub use error::{Error, Result};
pub use slice::{Point, SliceContext, SliceUnit};
pub use poly::{apply, CliffordPolynomial, MultiIndex, OperatorSpec, PolyKind};
pub use fueter::{FueterTable, Side};
pub use stem::StemPolynomial;
pub use kernel::KernelExpr;
