//! p-adic valuations of rationals and the q-brackets [x]_q, [x]_{-q}.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use super::Rational;
use crate::error::{Error, Result};

/// v_p of a rational; zero has infinite valuation.
///
/// The derived order puts every finite valuation below `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_at_least(self, bound: i64) -> bool {
        self >= Valuation::Finite(bound)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => serializer.serialize_i64(*v),
            Valuation::Infinite => serializer.serialize_str("inf"),
        }
    }
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// v_p(a) = v_p(numerator) − v_p(denominator), so that |a|_p = p^{−v_p(a)}.
pub fn padic_valuation(a: &Rational, p: u64) -> Valuation {
    assert!(p >= 2, "valuation needs a prime");
    if a.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p);
    Valuation::Finite(int_valuation(a.numer(), &p) - int_valuation(a.denom(), &p))
}

/// [x]_q = (1 − q^x)/(1 − q), with the limit value x at q = 1.
pub fn q_bracket(x: u64, q: &Rational) -> Rational {
    if q.is_one() {
        return Rational::from(x as i64);
    }
    // 1 + q + … + q^{x-1}
    let mut acc = Rational::zero();
    let mut pow = Rational::one();
    for _ in 0..x {
        acc = acc + &pow;
        pow = pow * q;
    }
    acc
}

/// [x]_{−q} = (1 − (−q)^x)/(1 + q).
pub fn q_bracket_neg(x: u64, q: &Rational) -> Result<Rational> {
    let denom = Rational::one() + q;
    if denom.is_zero() {
        return Err(Error::PoleAtMinusOne);
    }
    let numer = Rational::one() - (-q).powu(x);
    Ok(numer / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(padic_valuation(&Rational::frac(1, 5), 5), Valuation::Finite(-1));
        assert_eq!(padic_valuation(&Rational::zero(), 3), Valuation::Infinite);
        assert_eq!(padic_valuation(&Rational::frac(50, 3), 5), Valuation::Finite(2));
        assert_eq!(padic_valuation(&Rational::frac(3, 65), 3), Valuation::Finite(1));
        assert!(Valuation::Infinite > Valuation::Finite(1_000));
        assert!(Valuation::Finite(2).is_at_least(2));
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(q_bracket(2, &Rational::from(3)), Rational::from(4));
        assert_eq!(q_bracket(5, &Rational::one()), Rational::from(5));
        assert_eq!(q_bracket(0, &Rational::from(7)), Rational::zero());
        assert_eq!(q_bracket_neg(3, &Rational::one()).unwrap(), Rational::one());
        assert_eq!(q_bracket_neg(2, &Rational::from(-1)), Err(Error::PoleAtMinusOne));
        // [d]_{-1/q} at d = 3, q = 2: (1 + 1/8)/(3/2) = 3/4
        assert_eq!(
            q_bracket_neg(3, &Rational::frac(1, 2)).unwrap(),
            Rational::frac(3, 4)
        );
    }

    #[test]
    fn bracket_closed_form_identity() {
        for q in [Rational::from(2), Rational::frac(-3, 5), Rational::frac(7, 2)] {
            for x in 0..8u64 {
                let lhs = q_bracket(x, &q) * (Rational::one() - &q) + q.powu(x);
                assert_eq!(lhs, Rational::one());
            }
        }
    }
}
