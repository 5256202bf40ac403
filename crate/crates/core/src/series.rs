//! Truncated formal power series Σ_{i<T} a_i t^i over a [`FieldElement`].
//!
//! Coefficients are stored in ordinary normalization (the coefficient of
//! t^i, not of t^i/i!); [`TruncatedSeries::taylor_coefficient`] applies the
//! i! only on extraction. Binary operations truncate to the smaller order.

use serde::{Serialize, Serializer};

use crate::algebra::{FieldElement, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<F> {
    coeffs: Vec<F>,
}

fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * Rational::from(k))
}

impl<F: FieldElement> TruncatedSeries<F> {
    /// A series of order `coeffs.len()`, which must be at least 1.
    pub fn from_coeffs(coeffs: Vec<F>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("series order must be >= 1".into()));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.same_field(&coeffs[0])) {
            return Err(mismatch(&coeffs[0], bad));
        }
        Ok(TruncatedSeries { coeffs })
    }

    /// `c + 0·t + …` to the given order.
    pub fn constant(c: F, order: usize) -> Self {
        assert!(order >= 1, "series order must be >= 1");
        let zero = c.zero_like();
        let mut coeffs = vec![zero; order];
        coeffs[0] = c;
        TruncatedSeries { coeffs }
    }

    pub fn zero(template: &F, order: usize) -> Self {
        Self::constant(template.zero_like(), order)
    }

    pub fn one(template: &F, order: usize) -> Self {
        Self::constant(template.one_like(), order)
    }

    /// e^{ct} = Σ c^n t^n / n! truncated to `order` terms.
    pub fn exp_linear(c: &F, order: usize) -> Self {
        assert!(order >= 1, "series order must be >= 1");
        let mut coeffs = Vec::with_capacity(order);
        let mut term = c.one_like();
        coeffs.push(term.clone());
        for n in 1..order {
            term = term * c.clone() * c.scalar(&Rational::frac(1, n as i64));
            coeffs.push(term.clone());
        }
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Result<&F> {
        self.coeffs.get(i).ok_or(Error::OrderTooLow {
            index: i,
            order: self.order(),
        })
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order >= 1, "series order must be >= 1");
        TruncatedSeries {
            coeffs: self.coeffs[..order.min(self.order())].to_vec(),
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.coeffs[0].same_field(&other.coeffs[0]) {
            Ok(())
        } else {
            Err(mismatch(&self.coeffs[0], &other.coeffs[0]))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() + b.clone()))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() - b.clone()))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&F, &F) -> F) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Truncated Cauchy product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let order = self.order().min(other.order());
        let coeffs = (0..order)
            .map(|n| {
                (0..=n)
                    .filter(|&k| !self.coeffs[k].is_zero() && !other.coeffs[n - k].is_zero())
                    .fold(self.coeffs[0].zero_like(), |acc, k| {
                        acc + self.coeffs[k].clone() * other.coeffs[n - k].clone()
                    })
            })
            .collect();
        Ok(TruncatedSeries { coeffs })
    }

    pub fn scale(&self, c: &F) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Multiplicative inverse: b_0 = 1/a_0 and
    /// b_n = −a_0^{−1} Σ_{j=1..n} a_j b_{n−j}.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::NonUnitConstantTerm);
        }
        let neg_inv = -a0.inverse()?;
        let mut out: Vec<F> = Vec::with_capacity(self.order());
        out.push(a0.inverse()?);
        for n in 1..self.order() {
            let sum = (1..=n)
                .filter(|&j| !self.coeffs[j].is_zero())
                .fold(a0.zero_like(), |acc, j| {
                    acc + self.coeffs[j].clone() * out[n - j].clone()
                });
            out.push(sum * neg_inv.clone());
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// The exponential-generating-function coefficient n!·a_n.
    pub fn taylor_coefficient(&self, n: usize) -> Result<F> {
        let a = self.coeff(n)?;
        Ok(a.clone() * a.scalar(&factorial(n)))
    }

    /// All n!·a_n for n < order.
    pub fn taylor_coefficients(&self) -> Vec<F> {
        (0..self.order())
            .map(|n| self.taylor_coefficient(n).expect("index below order"))
            .collect()
    }
}

fn mismatch<F: FieldElement>(a: &F, b: &F) -> Error {
    Error::FieldMismatch {
        left: a.field_order(),
        right: b.field_order(),
    }
}

impl<F: Serialize> Serialize for TruncatedSeries<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a, F> {
            order: usize,
            coeffs: &'a [F],
        }
        Repr {
            order: self.coeffs.len(),
            coeffs: &self.coeffs,
        }
        .serialize(serializer)
    }
}
