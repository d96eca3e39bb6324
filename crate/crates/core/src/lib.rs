//! Orbits, orbit closures and their defining equations for
//! `GL(E) x Sp(F)` and `GL(E) x SO(F)` acting on `E (x) F`.

pub mod equations;
pub mod error;
pub mod facts;
pub mod fields;
pub mod forms;
pub mod linalg;
pub mod orbits;
pub mod poly;
pub mod verify;

pub use error::{Error, Result};
pub use fields::{Field, Scalar};
pub use forms::{BilinearForm, FormKind, SpaceConfig, WittBasis};
pub use linalg::Matrix;
pub use equations::{GeneratorSet, Label, StarOperator};
pub use facts::OrbitFacts;
pub use orbits::{OrbitParams, Sign};
pub use poly::Polynomial;
pub use verify::VerificationReport;
