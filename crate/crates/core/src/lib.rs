//! Dissipative Fornasini-Marchesini systems on the lattice `Z₊ᵈ` and on the free
//! semigroup with `d` generators: simulation, energy balance, Z-transforms,
//! transfer and observation functions, and truncated input-output operators.

pub mod algebra;
pub mod commutative;
pub mod error;
pub mod io;
pub mod levels;
pub mod noncommutative;
pub mod random;
pub mod system;
pub mod words;

pub use algebra::{kron, operator_norm, C64, ComplexMatrix, ComplexVector};
pub use commutative::{EvaluationPoint, LatticeSequence, LatticeTrajectory, LatticeWeight};
pub use error::{Error, Result};
pub use io::{build_io_pair, io_apply, io_contractivity_norm, IOOperatorPair};
pub use noncommutative::{RowContractionTuple, WordSequence, WordTrajectory};
pub use system::SystemRealization;
pub use words::{MultiIndex, Word};
