//! Homology and cohomology of finite models at a fixed cover scale, the integral
//! pairing between them, one-dimensional cycle surgery, exact spectral analysis
//! of induced endomorphisms, and cover-entropy estimates.

pub mod chains;
pub mod cochains;
pub mod entropy;
pub mod error;
pub mod field;
pub mod linalg;
pub mod model;
pub mod numberfield;
pub mod onecycles;
pub mod pairing;
pub mod pipeline;
pub mod poly;
pub mod scale_algebra;
pub mod spaces;
pub mod spectral;
pub mod suites;

pub use error::{Error, ErrorKind, Result};
pub use field::{Field, Q};
