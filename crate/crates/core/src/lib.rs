//! Discriminantal arrangements of hyperplane arrangements: exact rank
//! computations, canonical presentations, singularity-variety membership and
//! small-case classification.

pub mod arrangement;
pub mod canonical;
pub mod classify;
pub mod discriminantal;
pub mod error;
pub mod io;
pub mod matrix;
pub mod presentation;
pub mod prime_field;
pub mod scalar;
pub mod subset;
pub mod varieties;

pub use arrangement::{Arrangement, Circuit};
pub use discriminantal::TranslationVector;
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use presentation::Presentation;
pub use prime_field::{FieldMode, PrimeField};
pub use scalar::Scalar;
pub use subset::Subset;
