//! Numeric traits the counting, operator and cumulant code is generic over.
//!
//! Counts only need a commutative semiring with conversion from machine
//! integers; operator entries additionally need checked arithmetic so that
//! machine-width computations can detect overflow and be redone in
//! arbitrary precision. Cumulants need a field.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg};

use num_traits::{CheckedAdd, CheckedMul, FromPrimitive, Num, One, Zero};

/// Exact (or approximate) counting scalar: `u64`, `u128`, `BigUint`, `BigInt`, `f64`, ...
pub trait Count:
    Clone + Debug + PartialEq + Zero + One + Add<Output = Self> + Mul<Output = Self> + FromPrimitive
{
}

impl<T> Count for T where
    T: Clone + Debug + PartialEq + Zero + One + Add<Output = T> + Mul<Output = T> + FromPrimitive
{
}

/// Matrix entry type for sparse operators. Arithmetic goes through the
/// checked operations so an `i64` computation can report overflow.
pub trait Scalar: Count + CheckedAdd + CheckedMul {}

impl<T> Scalar for T where T: Count + CheckedAdd + CheckedMul {}

/// Field used by the moment/cumulant transforms (`BigRational`, `Ratio<i64>`, `f64`).
pub trait Field: Clone + Debug + PartialEq + Num + Neg<Output = Self> + FromPrimitive {}

impl<T> Field for T where T: Clone + Debug + PartialEq + Num + Neg<Output = T> + FromPrimitive {}

/// Checked sum of two scalars; `None` on overflow.
pub(crate) fn add<T: Scalar>(a: &T, b: &T) -> Option<T> {
    a.checked_add(b)
}

/// Checked product of two scalars; `None` on overflow.
pub(crate) fn mul<T: Scalar>(a: &T, b: &T) -> Option<T> {
    a.checked_mul(b)
}
