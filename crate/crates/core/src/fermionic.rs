//! The fermionic p-adic integral I_{−r}(f) = lim [Σ_{x<M} (−r)^x f(x)] / [M]_{−r}.
//!
//! Exact values come from triangular solves of the functional equation
//! r·I(f₁) + I(f) = (1 + r)·f(0), f₁(x) = f(x + 1), and its d-step iterate.
//! Truncated Riemann sums with p-adic valuations check the limit itself.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::arith::{binomial, is_prime, lcm};
use crate::algebra::{
    padic_valuation, q_bracket_neg, CyclotomicField, CyclotomicNumber, FieldElement, Rational,
    Valuation,
};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::twisted::{twisted_a_values, TwistedConfig};

/// The integrand ω^x (x + u)^n against μ_{−r}.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSpec<F> {
    pub degree: usize,
    pub shift: F,
    pub twist: F,
    pub measure: Rational,
}

impl<F: FieldElement> IntegralSpec<F> {
    pub fn new(degree: usize, shift: F, twist: F, measure: Rational) -> Result<Self> {
        if measure.is_zero() {
            return Err(Error::InvalidParameter("measure parameter r must be nonzero".into()));
        }
        if !shift.same_field(&twist) {
            return Err(Error::FieldMismatch {
                left: shift.field_order(),
                right: twist.field_order(),
            });
        }
        Ok(IntegralSpec {
            degree,
            shift,
            twist,
            measure,
        })
    }
}

fn binomial_row(n: usize) -> Vec<Rational> {
    (0..=n)
        .map(|k| Rational::from(binomial(n as u64, k as u64)))
        .collect()
}

/// K_0, …, K_n with K_k = I_{−r}(ω^x (x + u)^k).
pub fn poly_twist_moments<F: FieldElement>(spec: &IntegralSpec<F>) -> Result<Vec<F>> {
    let omega = &spec.twist;
    let r = omega.scalar(&spec.measure);
    let r_omega = r.clone() * omega.clone();
    let lead = omega.one_like() + r_omega.clone();
    if lead.is_zero() {
        return Err(Error::SingularFunctionalEquation);
    }
    let lead_inv = lead.inverse()?;
    let one_plus_r = omega.scalar(&(Rational::one() + &spec.measure));
    let mut moments: Vec<F> = Vec::with_capacity(spec.degree + 1);
    for n in 0..=spec.degree {
        let binom = binomial_row(n);
        let lower = moments
            .iter()
            .enumerate()
            .fold(omega.zero_like(), |acc, (k, m)| acc + m.clone() * omega.scalar(&binom[k]));
        let rhs = one_plus_r.clone() * spec.shift.powu(n as u64) - r_omega.clone() * lower;
        moments.push(rhs * lead_inv.clone());
    }
    Ok(moments)
}

pub fn poly_twist_integral<F: FieldElement>(spec: &IntegralSpec<F>) -> Result<F> {
    Ok(poly_twist_moments(spec)?.pop().expect("at least K_0"))
}

/// Q(ζ_L) holding both ζ and the values of χ, with ζ lifted into it.
pub fn ambient_field(
    chi: &DirichletCharacter,
    zeta: &CyclotomicNumber,
) -> Result<(Arc<CyclotomicField>, CyclotomicNumber)> {
    let field = CyclotomicField::new(lcm(zeta.order(), chi.value_order()))?;
    let zeta = zeta.lift_to(&field)?;
    Ok((field, zeta))
}

/// I_0, …, I_n with I_k = I_{−q^{−1}}(ζ^x χ(x) x^k), from the d-step equation
/// ζ^d Σ_k C(n,k) d^{n−k} I_k + q^d I_n = (1+q) Σ_{l<d} (−1)^l q^{d−1−l} ζ^l χ(l) l^n.
pub fn char_twist_moments(
    n: usize,
    chi: &DirichletCharacter,
    zeta: &CyclotomicNumber,
    q: &Rational,
) -> Result<Vec<CyclotomicNumber>> {
    check_q(q)?;
    let (field, zeta) = ambient_field(chi, zeta)?;
    let d = chi.modulus();
    let zeta_d = zeta.powu(d);
    let q_d = q.powu(d);
    let lead = &zeta_d + &CyclotomicNumber::from_rational(&field, q_d);
    if lead.is_zero() {
        return Err(Error::SingularFunctionalEquation);
    }
    let lead_inv = lead.inverse()?;
    let one_plus_q = Rational::one() + q;

    // w_l = (1+q)(−1)^l q^{d−1−l} ζ^l χ(l), independent of n
    let mut weights = Vec::with_capacity(d as usize);
    let mut zeta_l = CyclotomicNumber::one(&field);
    for l in 0..d {
        let sign = if l % 2 == 0 { Rational::one() } else { Rational::from(-1) };
        let c = &one_plus_q * &sign * q.powu(d - 1 - l);
        weights.push((&zeta_l * &chi.value_in(&field, l as i64)?).scale(&c));
        zeta_l = &zeta_l * &zeta;
    }

    let d_rat = Rational::from(d as i64);
    let mut moments: Vec<CyclotomicNumber> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let rhs = weights
            .iter()
            .enumerate()
            .fold(CyclotomicNumber::zero(&field), |acc, (l, w)| {
                acc + w.scale(&Rational::from(l as i64).powu(m as u64))
            });
        let binom = binomial_row(m);
        let lower = moments
            .iter()
            .enumerate()
            .fold(CyclotomicNumber::zero(&field), |acc, (k, i_k)| {
                acc + i_k.scale(&(&binom[k] * d_rat.powu((m - k) as u64)))
            });
        moments.push((rhs - &zeta_d * &lower) * lead_inv.clone());
    }
    Ok(moments)
}

pub fn char_twist_integral(
    n: usize,
    chi: &DirichletCharacter,
    zeta: &CyclotomicNumber,
    q: &Rational,
) -> Result<CyclotomicNumber> {
    Ok(char_twist_moments(n, chi, zeta, q)?.pop().expect("at least I_0"))
}

fn check_q(q: &Rational) -> Result<()> {
    if q.is_zero() || (Rational::one() + q).is_zero() {
        return Err(Error::InvalidParameter(format!("q must avoid 0 and -1, got {q}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub equal: bool,
}

impl<T: PartialEq> IdentityReport<T> {
    pub fn new(lhs: T, rhs: T) -> Self {
        let equal = lhs == rhs;
        IdentityReport { lhs, rhs, equal }
    }
}

/// (d^n / [d]_{−q^{−1}}) Σ_{a<d} (−1)^a χ(a) ζ^a q^{−a} I_{−q^{−d}}(ζ^{dx}(x + a/d)^n).
pub fn multiplication_formula_rhs(
    n: usize,
    chi: &DirichletCharacter,
    zeta: &CyclotomicNumber,
    q: &Rational,
) -> Result<CyclotomicNumber> {
    check_q(q)?;
    let (field, zeta) = ambient_field(chi, zeta)?;
    let d = chi.modulus();
    let q_inv = q.inverse()?;
    let zeta_d = zeta.powu(d);
    let r = q_inv.powu(d);
    let mut sum = CyclotomicNumber::zero(&field);
    let mut zeta_a = CyclotomicNumber::one(&field);
    for a in 0..d {
        let chi_a = chi.value_in(&field, a as i64)?;
        if !chi_a.is_zero() {
            let shift = CyclotomicNumber::from_rational(&field, Rational::frac(a as i64, d as i64));
            let spec = IntegralSpec::new(n, shift, zeta_d.clone(), r.clone())?;
            let sign = if a % 2 == 0 { Rational::one() } else { Rational::from(-1) };
            let term = &chi_a * &zeta_a * poly_twist_integral(&spec)?;
            sum = sum + term.scale(&(sign * q_inv.powu(a)));
        }
        zeta_a = &zeta_a * &zeta;
    }
    let factor = Rational::from(d as i64).powu(n as u64) / q_bracket_neg(d, &q_inv)?;
    Ok(sum.scale(&factor))
}

/// The distribution relation between the character integral and the
/// residue-class decomposition; both sides exact.
pub fn distribution_identity_check(
    n: usize,
    chi: &DirichletCharacter,
    zeta: &CyclotomicNumber,
    q: &Rational,
) -> Result<IdentityReport<CyclotomicNumber>> {
    Ok(IdentityReport::new(
        char_twist_integral(n, chi, zeta, q)?,
        multiplication_formula_rhs(n, chi, zeta, q)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationLevel {
    pub level: u32,
    pub partial: Rational,
    pub valuation: Valuation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    pub p: u64,
    pub exact: Rational,
    pub levels: Vec<TruncationLevel>,
}

impl TruncationReport {
    /// v_p(S_N − exact) ≥ N at every level.
    pub fn converges(&self) -> bool {
        self.levels
            .iter()
            .all(|l| l.valuation.is_at_least(l.level as i64))
    }

    /// v_p(S_N − exact) nondecreasing in N. Not implied by convergence: an
    /// accidental cancellation can push one level above the next.
    pub fn is_monotone(&self) -> bool {
        self.levels.windows(2).all(|w| w[0].valuation <= w[1].valuation)
    }

    /// CSV with columns N, S_N, valuation.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InternalInconsistency(e.to_string());
        w.write_record(["N", "S_N", "valuation"]).map_err(io)?;
        for l in &self.levels {
            w.write_record([l.level.to_string(), l.partial.to_string(), l.valuation.to_string()])
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InternalInconsistency(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::InternalInconsistency(e.to_string()))
    }
}

fn check_regime(q: &Rational, p: u64, chi: Option<&DirichletCharacter>) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(Error::NotPadicallyConvergent(format!("p = {p} is not an odd prime")));
    }
    if !padic_valuation(&(q - Rational::one()), p).is_at_least(1) {
        return Err(Error::NotPadicallyConvergent(format!("need v_p(q - 1) >= 1, q = {q}")));
    }
    if padic_valuation(q, p) != Valuation::Finite(0) {
        return Err(Error::NotPadicallyConvergent(format!("need v_p(q) = 0, q = {q}")));
    }
    if let Some(chi) = chi {
        if !chi.is_rational_valued() {
            return Err(Error::NotPadicallyConvergent(
                "character values must lie in {0, 1, -1}".into(),
            ));
        }
    }
    Ok(())
}

/// Exact integer table c_x = χ(x)·x^n for x < len (χ absent means 1).
fn integrand_table(n: usize, chi: Option<&DirichletCharacter>, len: u64) -> Vec<BigInt> {
    (0..len)
        .map(|x| {
            let chi_x: i64 = match chi {
                None => 1,
                Some(c) => match c.exponent(x as i64) {
                    None => 0,
                    Some(0) => 1,
                    Some(_) => -1,
                },
            };
            if chi_x == 0 {
                BigInt::zero()
            } else {
                BigInt::from(chi_x) * num_traits::pow(BigInt::from(x), n)
            }
        })
        .collect()
}

/// Σ_{x<len} (−q^{−1})^x c_x exactly, by Horner over the numerator of q.
fn alternating_sum(table: &[BigInt], q: &Rational) -> Rational {
    let (a, b) = (q.numer().clone(), q.denom().clone());
    let neg_b = -b;
    let mut acc = BigInt::zero();
    let mut pow = BigInt::one();
    for c in table {
        acc = acc * &a + c * &pow;
        pow *= &neg_b;
    }
    let len = table.len();
    let denom = num_traits::pow(a, len.saturating_sub(1));
    Rational::new(acc, denom).expect("q is nonzero")
}

/// Σ_{x<M} (−q^{−1})^x χ(x) x^n / [M]_{−q^{−1}} with M = d·p^N for N ≤ max_level.
///
/// With d = 1 this is the plain Riemann sum over Z/p^N. For a character mod
/// d the sum runs over Z/dp^N, the residue system of the limit over
/// X_d = lim Z/dp^N; this is what converges when gcd(d, p) = 1.
pub fn padic_truncation(
    n: usize,
    chi: Option<&DirichletCharacter>,
    q: &Rational,
    p: u64,
    max_level: u32,
) -> Result<TruncationReport> {
    check_regime(q, p, chi)?;
    let d = chi.map_or(1, DirichletCharacter::modulus);
    let exact = match chi {
        None => {
            let spec = IntegralSpec::new(n, Rational::zero(), Rational::one(), q.inverse()?)?;
            poly_twist_integral(&spec)?
        }
        Some(c) => {
            let one = CyclotomicNumber::one(&CyclotomicField::new(1)?);
            char_twist_integral(n, c, &one, q)?
                .as_rational()
                .ok_or_else(|| Error::InternalInconsistency("irrational integral value".into()))?
        }
    };
    let r = q.inverse()?;
    let table = integrand_table(n, chi, d * p.pow(max_level));
    let levels = (0..=max_level)
        .map(|level| {
            let len = d * p.pow(level);
            let sum = alternating_sum(&table[..len as usize], q);
            let partial = sum / q_bracket_neg(len, &r)?;
            let valuation = padic_valuation(&(&partial - &exact), p);
            Ok(TruncationLevel {
                level,
                partial,
                valuation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncationReport { p, exact, levels })
}

/// Unnormalized alternating sums against the closed series value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternatingSumReport {
    /// Σ_closed = Σ_{m≥1} (−1)^m χ(m) m^n q^{−m} in closed form.
    pub closed_sum: Rational,
    /// U_N with v_p(U_N − 2·Σ_closed).
    pub truncation: TruncationReport,
    /// (claimed limit 2q²Σ_closed) / (observed limit 2Σ_closed); None when Σ_closed = 0.
    pub claimed_ratio: Option<Rational>,
}

/// U_N = Σ_{x<dp^N} (−q^{−1})^x χ(x) x^n compared with 2·Σ_closed, where
/// Σ_closed = (−1)^n A_{n,χ,1}(−q)/(q(1+q)^{n+1}).
pub fn alternating_sum_convergence(
    n: usize,
    chi: &DirichletCharacter,
    q: &Rational,
    p: u64,
    max_level: u32,
) -> Result<AlternatingSumReport> {
    check_regime(q, p, Some(chi))?;
    let cfg = TwistedConfig::new(chi.clone(), 1, 1, q.clone())?;
    let a_n = twisted_a_values(&cfg, n)?
        .pop()
        .expect("at least A_0")
        .as_rational()
        .ok_or_else(|| Error::InternalInconsistency("irrational A value".into()))?;
    let sign = if n % 2 == 0 { Rational::one() } else { Rational::from(-1) };
    let closed_sum = sign * a_n / (q * (Rational::one() + q).powu(n as u64 + 1));
    let target = &closed_sum * Rational::from(2);
    let claimed = &target * q.powu(2);
    let claimed_ratio = claimed.checked_div(&target).ok();

    let d = chi.modulus();
    let table = integrand_table(n, Some(chi), d * p.pow(max_level));
    let levels = (0..=max_level)
        .map(|level| {
            let len = (d * p.pow(level)) as usize;
            let partial = alternating_sum(&table[..len], q);
            let valuation = padic_valuation(&(&partial - &target), p);
            TruncationLevel {
                level,
                partial,
                valuation,
            }
        })
        .collect();
    Ok(AlternatingSumReport {
        closed_sum,
        truncation: TruncationReport {
            p,
            exact: target,
            levels,
        },
        claimed_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eulerian::eulerian_recurrence;

    fn one() -> CyclotomicNumber {
        CyclotomicNumber::one(&CyclotomicField::new(1).unwrap())
    }

    fn rat(c: &CyclotomicNumber) -> Rational {
        c.as_rational().unwrap()
    }

    fn classic_spec(n: usize, q: &Rational) -> IntegralSpec<Rational> {
        IntegralSpec::new(n, Rational::zero(), Rational::one(), q.inverse().unwrap()).unwrap()
    }

    #[test]
    fn poly_twist_examples() {
        let q = Rational::from(2);
        for r in [Rational::from(3), Rational::frac(1, 7)] {
            let spec = IntegralSpec::new(0, Rational::frac(5, 3), Rational::one(), r).unwrap();
            assert_eq!(poly_twist_integral(&spec).unwrap(), Rational::one());
        }
        assert_eq!(poly_twist_integral(&classic_spec(1, &q)).unwrap(), Rational::frac(-1, 3));
        assert_eq!(poly_twist_integral(&classic_spec(2, &q)).unwrap(), Rational::frac(-1, 9));
        let bad = IntegralSpec::new(1, Rational::zero(), Rational::from(-1), Rational::one()).unwrap();
        assert_eq!(poly_twist_integral(&bad), Err(Error::SingularFunctionalEquation));
    }

    #[test]
    fn functional_equation_residual_vanishes() {
        let field = CyclotomicField::new(9).unwrap();
        let omega = CyclotomicNumber::root_of_unity(&field, 2);
        let u = CyclotomicNumber::from_rational(&field, Rational::frac(2, 5));
        let r = Rational::frac(3, 7);
        let spec = IntegralSpec::new(6, u.clone(), omega.clone(), r.clone()).unwrap();
        let k = poly_twist_moments(&spec).unwrap();
        for n in 0..=6 {
            let binom = binomial_row(n);
            let shifted = (0..=n).fold(CyclotomicNumber::zero(&field), |acc, j| {
                acc + k[j].scale(&binom[j])
            });
            let residual = (&omega * &shifted).scale(&r) + k[n].clone()
                - u.powu(n as u64).scale(&(Rational::one() + &r));
            assert!(residual.is_zero(), "n = {n}");
        }
    }

    #[test]
    fn classical_witt_formula() {
        for q in [Rational::from(2), Rational::from(3), Rational::frac(5, 2)] {
            let moments = poly_twist_moments(&classic_spec(8, &q)).unwrap();
            for (n, k) in moments.iter().enumerate() {
                let sign = if n % 2 == 0 { Rational::one() } else { Rational::from(-1) };
                let expected = sign * eulerian_recurrence(n).unwrap().eval(&-&q)
                    / (Rational::one() + &q).powu(n as u64);
                assert_eq!(k, &expected, "n = {n}, q = {q}");
            }
        }
    }

    #[test]
    fn char_twist_examples() {
        let quad = DirichletCharacter::quadratic(3).unwrap();
        let triv = DirichletCharacter::principal(1).unwrap();
        assert_eq!(rat(&char_twist_integral(0, &quad, &one(), &Rational::from(2)).unwrap()), -1);
        for q in [Rational::from(2), Rational::frac(-3, 4)] {
            assert_eq!(rat(&char_twist_integral(0, &triv, &one(), &q).unwrap()), 1);
        }
        assert_eq!(
            rat(&char_twist_integral(1, &triv, &one(), &Rational::from(2)).unwrap()),
            Rational::frac(-1, 3)
        );
    }

    #[test]
    fn distribution_examples() {
        let q = Rational::from(2);
        let quad3 = DirichletCharacter::quadratic(3).unwrap();
        let report = distribution_identity_check(0, &quad3, &one(), &q).unwrap();
        assert!(report.equal);
        assert_eq!(rat(&report.lhs), -1);

        let triv = DirichletCharacter::principal(1).unwrap();
        for n in 0..4 {
            assert!(distribution_identity_check(n, &triv, &one(), &q).unwrap().equal);
        }

        let quad5 = DirichletCharacter::quadratic(5).unwrap();
        let zeta3 = CyclotomicNumber::generator(&CyclotomicField::new(3).unwrap());
        for n in 0..=4 {
            let r = distribution_identity_check(n, &quad5, &zeta3, &Rational::from(3)).unwrap();
            assert!(r.equal, "n = {n}");
        }
    }

    #[test]
    fn truncation_examples() {
        let q = Rational::from(4);
        let report = padic_truncation(0, None, &q, 3, 3).unwrap();
        assert_eq!(report.levels[0].partial, Rational::one());
        for l in &report.levels {
            assert_eq!(l.partial, Rational::one());
            assert_eq!(l.valuation, Valuation::Infinite);
        }
        let report = padic_truncation(1, None, &q, 3, 4).unwrap();
        assert_eq!(report.exact, Rational::frac(-1, 5));
        assert_eq!(report.levels[1].partial, Rational::frac(-2, 13));
        assert_eq!(report.levels[1].valuation, Valuation::Finite(1));
        assert!(report.converges() && report.is_monotone());
        let csv = report.to_csv().unwrap();
        assert!(csv.starts_with("N,S_N,valuation\n0,"));
    }

    #[test]
    fn truncation_with_characters_converges() {
        for (p, d) in [(3u64, 5u64), (5, 3), (3, 3), (5, 5)] {
            let q = Rational::from(1 + p as i64);
            let chi = DirichletCharacter::quadratic(d).unwrap();
            for n in 0..=3 {
                let report = padic_truncation(n, Some(&chi), &q, p, 3).unwrap();
                assert!(report.converges() && report.is_monotone(), "p = {p}, d = {d}, n = {n}: {report:?}");
            }
        }
    }

    #[test]
    fn truncation_regime_errors() {
        let chi5 = crate::characters::enumerate_characters(5)
            .unwrap()
            .into_iter()
            .find(|c| c.character_order() == 4)
            .unwrap();
        assert!(matches!(
            padic_truncation(1, None, &Rational::from(2), 3, 2),
            Err(Error::NotPadicallyConvergent(_))
        ));
        assert!(matches!(
            padic_truncation(1, None, &Rational::from(4), 2, 2),
            Err(Error::NotPadicallyConvergent(_))
        ));
        assert!(matches!(
            padic_truncation(1, Some(&chi5), &Rational::from(4), 3, 2),
            Err(Error::NotPadicallyConvergent(_))
        ));
    }

    #[test]
    fn alternating_sums_tend_to_twice_the_closed_sum() {
        let q = Rational::from(4);
        let chi = DirichletCharacter::quadratic(3).unwrap();
        for n in 0..=3 {
            let report = alternating_sum_convergence(n, &chi, &q, 3, 4).unwrap();
            assert!(report.truncation.converges() && report.truncation.is_monotone(), "n = {n}");
            assert_eq!(report.claimed_ratio, Some(Rational::from(16)));
        }
    }
}
