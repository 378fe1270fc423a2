//! Exact-arithmetic chip-firing on finite connected graphs.
//!
//! The library decides reachability and debt-reachability between chip
//! configurations, enumerates and counts configurations by debt-reachability
//! class, partitions configurations into blocks, and fits exact-rational
//! quasipolynomials to count sequences.
//!
//! All arithmetic in the math core is exact. Every algorithm is generic over
//! an integer scalar implementing [`ExactInt`]; the crate-root aliases pin
//! the default arbitrary-precision instantiation:
//!
//! * [`Int`] — `num::BigInt`, the scalar used throughout the CLI and tests,
//! * [`Rat`] — `num::BigRational`, for quasipolynomial coefficients and
//!   simplex vertex coordinates.
//!
//! Quick tour:
//!
//! ```
//! use chipfire::{Graph, IntConfiguration, Limits};
//!
//! let g = Graph::cycle(3).unwrap();
//! let from: IntConfiguration = "3,0,0".parse().unwrap();
//! let to: IntConfiguration = "0,3,0".parse().unwrap();
//!
//! // (0,3,0) can be reached from (3,0,0) with debt moves but not legally.
//! assert!(chipfire::reach::debt_reachability_vector(&g, &from, &to).is_some());
//! assert!(!chipfire::reach::is_reachable(&g, &from, &to));
//!
//! let n = chipfire::enumerate::count_debt_reachable(&g, &from, &Limits::default()).unwrap();
//! assert_eq!(n, 4u32.into());
//! ```

pub mod chip;
pub mod enumerate;
mod error;
pub mod graph;
pub mod linalg;
pub mod matrix;
pub mod quasipoly;
pub mod reach;
mod scalar;

pub use error::{Error, Result};
pub use graph::{Graph, GraphSpec};
pub use matrix::Matrix;
pub use reach::Limits;
pub use scalar::ExactInt;

/// Default exact integer scalar.
pub type Int = num::BigInt;
/// Default exact rational scalar.
pub type Rat = num::BigRational;

/// [`Matrix`] over the default scalar.
pub type IntMatrix = Matrix<Int>;
/// [`chip::Configuration`] over the default scalar.
pub type IntConfiguration = chip::Configuration<Int>;
/// [`chip::GeneralConfiguration`] over the default scalar.
pub type IntGeneralConfiguration = chip::GeneralConfiguration<Int>;
/// [`chip::FiringVector`] over the default scalar.
pub type IntFiringVector = chip::FiringVector<Int>;
/// [`quasipoly::Quasipolynomial`] over the default scalar.
pub type IntQuasipolynomial = quasipoly::Quasipolynomial<Int>;
