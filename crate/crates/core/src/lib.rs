pub mod conjecture;
pub mod corpus;
pub mod error;
pub mod fock;
pub mod inequalities;
pub mod loss;
pub mod phase_space;
pub mod report;
pub mod purity;
pub mod qcs;
pub mod special;
pub mod two_mode;

pub use error::{Error, Result};
