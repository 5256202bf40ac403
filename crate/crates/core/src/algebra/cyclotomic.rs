//! Cyclotomic number fields Q(ζ_N) = Q[x]/(Φ_N).
//!
//! Elements are coefficient vectors of length φ(N) in the power basis
//! 1, ζ, …, ζ^{φ(N)-1}. Reducing modulo Φ_N rather than x^N − 1 keeps the
//! ring a field, which series inversion depends on.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::arith::{divisors, euler_phi, gcd, mobius};
use super::{ComplexValue, FieldElement, Polynomial, Rational};
use crate::error::{Error, Result};

/// Φ_N as integer coefficients in ascending order, via the Möbius product
/// Φ_N(x) = Π_{e | N} (x^e − 1)^{μ(N/e)} with exact divisions.
pub fn cyclotomic_polynomial(order: u64) -> Vec<BigInt> {
    assert!(order >= 1, "cyclotomic polynomial of order 0");
    let mut numer = vec![BigInt::one()];
    let mut denoms = Vec::new();
    for e in divisors(order) {
        match mobius(order / e) {
            1 => numer = mul_by_xe_minus_one(&numer, e as usize),
            -1 => denoms.push(e as usize),
            _ => {}
        }
    }
    for e in denoms {
        numer = div_by_xe_minus_one(&numer, e);
    }
    numer
}

fn mul_by_xe_minus_one(p: &[BigInt], e: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() + e];
    for (i, c) in p.iter().enumerate() {
        out[i + e] += c;
        out[i] -= c;
    }
    out
}

fn div_by_xe_minus_one(p: &[BigInt], e: usize) -> Vec<BigInt> {
    let mut rem = p.to_vec();
    let mut quot = vec![BigInt::zero(); p.len() - e];
    for i in (e..rem.len()).rev() {
        let c = std::mem::take(&mut rem[i]);
        rem[i - e] += &c;
        quot[i - e] = c;
    }
    assert!(
        rem.iter().all(Zero::is_zero),
        "x^{e} - 1 does not divide the Möbius numerator"
    );
    quot
}

/// The field Q(ζ_N) together with its defining polynomial.
#[derive(Debug)]
pub struct CyclotomicField {
    order: u64,
    degree: usize,
    // Φ_N without its leading 1.
    tail: Vec<Rational>,
    minimal: Polynomial,
}

impl CyclotomicField {
    pub fn new(order: u64) -> Result<Arc<Self>> {
        if order == 0 {
            return Err(Error::InvalidParameter("cyclotomic order must be >= 1".into()));
        }
        let phi_poly = cyclotomic_polynomial(order);
        let degree = euler_phi(order) as usize;
        debug_assert_eq!(phi_poly.len(), degree + 1);
        let coeffs: Vec<Rational> = phi_poly.into_iter().map(Rational::from).collect();
        Ok(Arc::new(CyclotomicField {
            order,
            degree,
            tail: coeffs[..degree].to_vec(),
            minimal: Polynomial::from_coeffs(coeffs),
        }))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// φ(N), the dimension over Q.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn minimal_polynomial(&self) -> &Polynomial {
        &self.minimal
    }

    /// Reduce an arbitrary-length power-basis vector modulo Φ_N.
    fn reduce(&self, mut v: Vec<Rational>) -> Vec<Rational> {
        let deg = self.degree;
        for i in (deg..v.len()).rev() {
            let c = std::mem::take(&mut v[i]);
            if c.is_zero() {
                continue;
            }
            for (j, t) in self.tail.iter().enumerate() {
                if !t.is_zero() {
                    v[i - deg + j] = &v[i - deg + j] - &(&c * t);
                }
            }
        }
        v.resize(deg, Rational::zero());
        v
    }
}

#[derive(Clone)]
pub struct CyclotomicNumber {
    field: Arc<CyclotomicField>,
    coeffs: Vec<Rational>,
}

impl CyclotomicNumber {
    /// Build from power-basis coefficients of any length; the vector is
    /// reduced modulo Φ_N.
    pub fn from_coeffs(field: &Arc<CyclotomicField>, coeffs: Vec<Rational>) -> Self {
        CyclotomicNumber {
            coeffs: field.reduce(coeffs),
            field: Arc::clone(field),
        }
    }

    pub fn from_rational(field: &Arc<CyclotomicField>, r: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); field.degree];
        coeffs[0] = r;
        CyclotomicNumber {
            field: Arc::clone(field),
            coeffs,
        }
    }

    pub fn zero(field: &Arc<CyclotomicField>) -> Self {
        Self::from_rational(field, Rational::zero())
    }

    pub fn one(field: &Arc<CyclotomicField>) -> Self {
        Self::from_rational(field, Rational::one())
    }

    /// ζ_N^e for any integer exponent.
    pub fn root_of_unity(field: &Arc<CyclotomicField>, exponent: i64) -> Self {
        let e = exponent.rem_euclid(field.order as i64) as usize;
        let mut v = vec![Rational::zero(); (e + 1).max(field.degree)];
        v[e] = Rational::one();
        Self::from_coeffs(field, v)
    }

    /// The generator ζ_N.
    pub fn generator(field: &Arc<CyclotomicField>) -> Self {
        Self::root_of_unity(field, 1)
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn order(&self) -> u64 {
        self.field.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    /// The rational value when the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        self.coeffs[1..]
            .iter()
            .all(Rational::is_zero)
            .then(|| self.coeffs[0].clone())
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field.order == other.field.order {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.field.order,
                right: other.field.order,
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(self * other)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against Φ_N.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let a = Polynomial::from_coeffs(self.coeffs.clone());
        let inv = a.inverse_mod(&self.field.minimal)?;
        Ok(Self::from_coeffs(&self.field, inv.into_coeffs()))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CyclotomicNumber {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Value under the embedding ζ_N ↦ e^{2πik/N}.
    pub fn embed(&self, k: u64) -> Result<ComplexValue> {
        let n = self.field.order;
        if gcd(k % n, n) != 1 {
            return Err(Error::NotAPrimitiveEmbedding { k, order: n });
        }
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let angle = TAU * (((i as u64) * k) % n) as f64 / n as f64;
                ComplexValue::from_polar(c.to_f64(), angle)
            })
            .sum())
    }

    /// The Galois automorphism ζ_N ↦ ζ_N^k (k coprime to N).
    pub fn galois(&self, k: u64) -> Result<Self> {
        let n = self.field.order;
        if gcd(k % n, n) != 1 {
            return Err(Error::NotAPrimitiveEmbedding { k, order: n });
        }
        let mut v = vec![Rational::zero(); (n as usize).max(self.field.degree)];
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = ((i as u64 * k) % n) as usize;
            v[j] = &v[j] + c;
        }
        Ok(Self::from_coeffs(&self.field, v))
    }

    /// Image in Q(ζ_M) for a multiple M of N, via ζ_N ↦ ζ_M^{M/N}.
    pub fn lift_to(&self, target: &Arc<CyclotomicField>) -> Result<Self> {
        let n = self.field.order;
        if target.order % n != 0 {
            return Err(Error::FieldMismatch {
                left: n,
                right: target.order,
            });
        }
        let step = (target.order / n) as usize;
        let mut v = vec![Rational::zero(); (step * self.coeffs.len()).max(target.degree)];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * step] = c.clone();
        }
        Ok(Self::from_coeffs(target, v))
    }
}

/// Free-function form of [`CyclotomicNumber::embed`].
pub fn embed_complex(a: &CyclotomicNumber, k: u64) -> Result<ComplexValue> {
    a.embed(k)
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.field.order == other.field.order && self.coeffs == other.coeffs
    }
}

impl Eq for CyclotomicNumber {}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.field.order;
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})z{n}"),
                _ => format!("({c})z{n}^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0 in Q(z{n})")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

fn assert_same(a: &CyclotomicNumber, b: &CyclotomicNumber) {
    assert_eq!(
        a.field.order, b.field.order,
        "cyclotomic operands from different fields"
    );
}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        assert_same(self, rhs);
        CyclotomicNumber {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        assert_same(self, rhs);
        CyclotomicNumber {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        assert_same(self, rhs);
        let deg = self.field.degree;
        let mut prod = vec![Rational::zero(); 2 * deg - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] = &prod[i + j] + &(a * b);
                }
            }
        }
        CyclotomicNumber::from_coeffs(&self.field, prod)
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $method(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        -&self
    }
}

impl FieldElement for CyclotomicNumber {
    fn zero_like(&self) -> Self {
        Self::zero(&self.field)
    }

    fn one_like(&self) -> Self {
        Self::one(&self.field)
    }

    fn scalar(&self, r: &Rational) -> Self {
        Self::from_rational(&self.field, r.clone())
    }

    fn is_zero(&self) -> bool {
        CyclotomicNumber::is_zero(self)
    }

    fn inverse(&self) -> Result<Self> {
        CyclotomicNumber::inverse(self)
    }

    fn same_field(&self, other: &Self) -> bool {
        self.field.order == other.field.order
    }

    fn field_order(&self) -> u64 {
        self.field.order
    }
}

#[derive(Serialize, Deserialize)]
struct CyclotomicRepr {
    order: u64,
    coeffs: Vec<Rational>,
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CyclotomicRepr {
            order: self.field.order,
            coeffs: self.coeffs.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CyclotomicNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CyclotomicRepr::deserialize(deserializer)?;
        let field = CyclotomicField::new(repr.order).map_err(D::Error::custom)?;
        if repr.coeffs.len() != field.degree {
            return Err(D::Error::custom(format!(
                "expected {} coefficients for order {}, got {}",
                field.degree,
                repr.order,
                repr.coeffs.len()
            )));
        }
        Ok(CyclotomicNumber {
            field,
            coeffs: repr.coeffs,
        })
    }
}
