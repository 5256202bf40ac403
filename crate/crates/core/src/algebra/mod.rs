//! Exact numeric substrate: rationals, dense rational polynomials,
//! cyclotomic fields Q(ζ_N) with their complex embeddings, q-brackets and
//! p-adic valuations.

pub mod arith;
pub mod cyclotomic;
pub mod padic;
pub mod poly;
pub mod rational;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use cyclotomic::{cyclotomic_polynomial, embed_complex, CyclotomicField, CyclotomicNumber};
pub use padic::{padic_valuation, q_bracket, q_bracket_neg, Valuation};
pub use poly::Polynomial;
pub use rational::Rational;

use crate::error::Result;

/// Complex values produced by embeddings and the analytic L-series.
pub type ComplexValue = num_complex::Complex64;

/// Elements of a field that may carry runtime context (such as the order
/// of a cyclotomic field), so constants are built "like" an existing value.
///
/// Operator impls panic on operands from different fields; call
/// [`FieldElement::same_field`] first when the operands are untrusted.
pub trait FieldElement:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    /// Image of a rational scalar in the field of `self`.
    fn scalar(&self, r: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn inverse(&self) -> Result<Self>;
    fn same_field(&self, other: &Self) -> bool;

    fn field_order(&self) -> u64 {
        1
    }

    fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.clone() * rhs.inverse()?)
    }

    /// `self^exp`, with `0^0 = 1`.
    fn powu(&self, mut exp: u64) -> Self {
        let mut acc = self.one_like();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base.clone();
            }
            exp >>= 1;
            if exp > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl FieldElement for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }

    fn one_like(&self) -> Self {
        Rational::one()
    }

    fn scalar(&self, r: &Rational) -> Self {
        r.clone()
    }

    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }

    fn inverse(&self) -> Result<Self> {
        Rational::inverse(self)
    }

    fn same_field(&self, _other: &Self) -> bool {
        true
    }
}
