//! Numerical toolkit for universal unitary conjugation: antisymmetrizers,
//! Kraus/Choi calculus, Haar twirls, concurrence monotones and the
//! clone-amplification no-go for state conjugation.

pub mod antisym;
pub mod channel;
pub mod combinatorics;
pub mod conjugation;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod nogo;
pub mod random;
pub mod tensor;
pub mod twirl;

pub use error::{Error, Result};
