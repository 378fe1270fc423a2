use std::fmt::{Debug, Display};
use std::hash::Hash;

use num::integer::Integer;
use num::traits::{FromPrimitive, Signed, ToPrimitive};

/// Exact signed integer scalar for all chip-firing arithmetic.
///
/// The blanket impl covers `num::BigInt` (the [`crate::Int`] alias used by
/// the CLI and the test suites) as well as the machine integer types.
/// The math core assumes exact ring arithmetic; fixed-width instantiations
/// are the caller's responsibility with respect to overflow.
pub trait ExactInt:
    Integer
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Clone
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    fn from_usize_exact(value: usize) -> Self {
        Self::from_usize(value).expect("usize must convert into the scalar")
    }

    fn from_u64_exact(value: u64) -> Self {
        Self::from_u64(value).expect("u64 must convert into the scalar")
    }

    fn from_i64_exact(value: i64) -> Self {
        Self::from_i64(value).expect("i64 must convert into the scalar")
    }
}

impl<T> ExactInt for T where
    T: Integer
        + Signed
        + FromPrimitive
        + ToPrimitive
        + Clone
        + Hash
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}
