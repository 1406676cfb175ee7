//! Moore-Penrose, Drazin and composite generalized inverses of complex
//! matrices, the matrix classes they characterize, and tooling to verify
//! identities between them numerically and in exact rational arithmetic.

pub mod classify;
pub mod drazin;
pub mod error;
pub mod factor;
pub mod fixtures;
pub mod geninv;
pub mod numkernel;
pub mod orders;
pub mod verify;

pub use error::{GenInvError, Result};
pub use geninv::InverseReport;
pub use numkernel::{approx_eq, CMatrix, Check, Tolerance, C64};
