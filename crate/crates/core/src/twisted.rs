//! Dirichlet-type twisted Eulerian polynomials A_{n,χ,ζ}(−q), twisted Euler
//! polynomials E_{n,ζ}(x), and the relations tying them to the fermionic
//! integral.
//!
//! A_{n,χ,ζ}(−q) is defined as n! times the t^n coefficient of
//!
//! G(t) = (1+q) Σ_{l<d} (−1)^l q^{d−l+1} ζ^l χ(l) e^{−l(1+q)t} / (ζ^d e^{−d(1+q)t} + q^d).
//!
//! An independent closed form of Σ_m (−1)^m ζ^m χ(m) m^n q^{−m} must agree
//! with it exactly whenever |q| ≠ 1.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::arith::{binomial, gcd, lcm};
use crate::algebra::{CyclotomicField, CyclotomicNumber, FieldElement, Rational};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::eulerian::power_sums_rational;
use crate::fermionic::{
    char_twist_moments, multiplication_formula_rhs, poly_twist_integral, poly_twist_moments,
    IdentityReport, IntegralSpec,
};
use crate::series::TruncatedSeries;

/// χ mod d, ζ = ζ_N^k of odd order N, and q, all realized in Q(ζ_L) with
/// L = lcm(N, M).
#[derive(Debug, Clone)]
pub struct TwistedConfig {
    chi: DirichletCharacter,
    zeta_order: u64,
    zeta_k: u64,
    q: Rational,
    field: Arc<CyclotomicField>,
    zeta: CyclotomicNumber,
}

impl TwistedConfig {
    pub fn new(chi: DirichletCharacter, zeta_order: u64, zeta_k: u64, q: Rational) -> Result<Self> {
        if zeta_order == 0 || zeta_order % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "zeta order must be odd and positive, got {zeta_order}"
            )));
        }
        if gcd(zeta_k % zeta_order, zeta_order) != 1 {
            return Err(Error::InvalidParameter(format!(
                "zeta exponent {zeta_k} is not coprime to {zeta_order}"
            )));
        }
        if q.is_zero() || (Rational::one() + &q).is_zero() {
            return Err(Error::InvalidParameter(format!("q must avoid 0 and -1, got {q}")));
        }
        let field = CyclotomicField::new(lcm(zeta_order, chi.value_order()))?;
        let step = field.order() / zeta_order;
        let zeta = CyclotomicNumber::root_of_unity(&field, ((zeta_k % zeta_order) * step) as i64);
        let d = chi.modulus();
        if (zeta.powu(d) + CyclotomicNumber::from_rational(&field, q.powu(d))).is_zero() {
            return Err(Error::SingularFunctionalEquation);
        }
        Ok(TwistedConfig {
            chi,
            zeta_order,
            zeta_k: zeta_k % zeta_order,
            q,
            field,
            zeta,
        })
    }

    pub fn chi(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn modulus(&self) -> u64 {
        self.chi.modulus()
    }

    pub fn zeta_order(&self) -> u64 {
        self.zeta_order
    }

    pub fn zeta_k(&self) -> u64 {
        self.zeta_k
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    /// ζ inside Q(ζ_L).
    pub fn zeta(&self) -> &CyclotomicNumber {
        &self.zeta
    }

    /// Same data at a different q.
    pub fn with_q(&self, q: Rational) -> Result<Self> {
        Self::new(self.chi.clone(), self.zeta_order, self.zeta_k, q)
    }

    /// χ̄ and ζ^{−1}; the image of this configuration under complex conjugation.
    pub fn conjugate(&self) -> Result<Self> {
        let k = (self.zeta_order - self.zeta_k) % self.zeta_order;
        Self::new(self.chi.conjugate(), self.zeta_order, k, self.q.clone())
    }

    fn rational(&self, r: Rational) -> CyclotomicNumber {
        CyclotomicNumber::from_rational(&self.field, r)
    }

    fn chi_at(&self, m: i64) -> CyclotomicNumber {
        self.chi.value_in(&self.field, m).expect("L is a multiple of M")
    }
}

fn sign(n: u64) -> Rational {
    if n % 2 == 0 {
        Rational::one()
    } else {
        Rational::from(-1)
    }
}

/// The generating function G(t) to order T over Q(ζ_L).
pub fn twisted_gf(cfg: &TwistedConfig, order: usize) -> Result<TruncatedSeries<CyclotomicNumber>> {
    if order == 0 {
        return Err(Error::InvalidParameter("series order must be >= 1".into()));
    }
    let q = &cfg.q;
    let d = cfg.modulus();
    let one_plus_q = Rational::one() + q;
    let mut numer = TruncatedSeries::zero(&CyclotomicNumber::zero(&cfg.field), order);
    let mut zeta_l = CyclotomicNumber::one(&cfg.field);
    for l in 0..d {
        let chi_l = cfg.chi_at(l as i64);
        if !chi_l.is_zero() {
            let weight = (&zeta_l * &chi_l).scale(&(&one_plus_q * sign(l) * q.powu(d - l + 1)));
            let rate = cfg.rational(-(Rational::from(l as i64) * &one_plus_q));
            numer = numer.try_add(&TruncatedSeries::exp_linear(&rate, order).scale(&weight))?;
        }
        zeta_l = &zeta_l * &cfg.zeta;
    }
    let rate = cfg.rational(-(Rational::from(d as i64) * &one_plus_q));
    let denom = TruncatedSeries::exp_linear(&rate, order)
        .scale(&cfg.zeta.powu(d))
        .try_add(&TruncatedSeries::constant(cfg.rational(q.powu(d)), order))?;
    if denom.coeffs()[0].is_zero() {
        return Err(Error::SingularFunctionalEquation);
    }
    numer.try_mul(&denom.inverse()?)
}

/// A_{0..=n_max,χ,ζ}(−q) from the generating function alone.
pub fn twisted_a_values(cfg: &TwistedConfig, n_max: usize) -> Result<Vec<CyclotomicNumber>> {
    Ok(twisted_gf(cfg, n_max + 1)?.taylor_coefficients())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluationPath {
    GeneratingFunction,
    PowerSumSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistedValue {
    pub n: usize,
    pub value: CyclotomicNumber,
    pub paths: Vec<EvaluationPath>,
}

/// A_0, …, A_{n_max}, each confirmed by the power-sum path when |q| ≠ 1.
pub fn twisted_eulerian_table(cfg: &TwistedConfig, n_max: usize) -> Result<Vec<TwistedValue>> {
    let gf = twisted_a_values(cfg, n_max)?;
    let series_available = !cfg.q.abs().is_one();
    gf.into_iter()
        .enumerate()
        .map(|(n, value)| {
            let mut paths = vec![EvaluationPath::GeneratingFunction];
            if series_available {
                if twisted_eulerian_series_path(cfg, n)? != value {
                    return Err(Error::PathDisagreement(n));
                }
                paths.push(EvaluationPath::PowerSumSeries);
            }
            Ok(TwistedValue { n, value, paths })
        })
        .collect()
}

pub fn twisted_eulerian(cfg: &TwistedConfig, n: usize) -> Result<TwistedValue> {
    Ok(twisted_eulerian_table(cfg, n)?.pop().expect("at least A_0"))
}

/// Closed form of Σ_{m≥1} (−1)^m ζ^m χ(m) m^n q^{−m}.
///
/// c(m) = (−1)^m ζ^m χ(m) has period P = lcm(2, d, N), so with z = 1/q the
/// sum regroups as Σ_{l=1}^{P} c(l) z^l Σ_j C(n,j) l^{n−j} P^j S_j(z^P),
/// S_j(w) = Σ_{k≥0} k^j w^k.
pub fn power_sum_series_sum(cfg: &TwistedConfig, n: usize) -> Result<CyclotomicNumber> {
    let z = cfg.q.inverse()?;
    let period = lcm(lcm(2, cfg.modulus()), cfg.zeta_order);
    let sums = power_sums_rational(n, &z.powu(period))?;
    let p = Rational::from(period as i64);
    let binom: Vec<Rational> = (0..=n as u64).map(|j| Rational::from(binomial(n as u64, j))).collect();
    let mut total = CyclotomicNumber::zero(&cfg.field);
    let mut zeta_l = CyclotomicNumber::one(&cfg.field);
    for l in 1..=period {
        zeta_l = &zeta_l * &cfg.zeta;
        let chi_l = cfg.chi_at(l as i64);
        if chi_l.is_zero() {
            continue;
        }
        let lr = Rational::from(l as i64);
        let inner = (0..=n).fold(Rational::zero(), |acc, j| {
            acc + &binom[j] * lr.powu((n - j) as u64) * p.powu(j as u64) * &sums[j]
        });
        let c = sign(l) * z.powu(l) * inner;
        total = total + (&zeta_l * &chi_l).scale(&c);
    }
    Ok(total)
}

/// q(1+q)^{n+1}(−1)^n (Σ_{m≥1} … + [n = 0]·χ(0)); the m = 0 term only
/// matters for d = 1.
pub fn twisted_eulerian_series_path(cfg: &TwistedConfig, n: usize) -> Result<CyclotomicNumber> {
    let mut sum = power_sum_series_sum(cfg, n)?;
    if n == 0 {
        sum = sum + cfg.chi_at(0);
    }
    let factor = &cfg.q * (Rational::one() + &cfg.q).powu(n as u64 + 1) * sign(n as u64);
    Ok(sum.scale(&factor))
}

/// E_{n,ζ}(x) = I_{−1}(ζ^y (x + y)^n).
pub fn twisted_euler_polynomial<F: FieldElement>(n: usize, zeta: &F, x: &F) -> Result<F> {
    poly_twist_integral(&IntegralSpec::new(n, x.clone(), zeta.clone(), Rational::one())?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerGfReport {
    /// d-fold form equals 2/(ζe^t + 1) through the order.
    pub telescopes: bool,
    /// Its Taylor coefficients equal E_{n,ζ}(0).
    pub matches_moments: bool,
    pub coefficients: Vec<CyclotomicNumber>,
}

/// 2 Σ_{l<d} (−1)^l ζ^l e^{lt} / (ζ^d e^{dt} + 1) versus 2/(ζe^t + 1).
pub fn euler_gf_consistency(d_fold: u64, zeta: &CyclotomicNumber, order: usize) -> Result<EulerGfReport> {
    if d_fold % 2 == 0 {
        return Err(Error::InvalidParameter(format!("fold {d_fold} must be odd")));
    }
    if order == 0 {
        return Err(Error::InvalidParameter("series order must be >= 1".into()));
    }
    let field = zeta.field();
    let two = CyclotomicNumber::from_rational(field, Rational::from(2));
    let mut numer = TruncatedSeries::zero(&two, order);
    let mut zeta_l = CyclotomicNumber::one(field);
    for l in 0..d_fold {
        let rate = CyclotomicNumber::from_rational(field, Rational::from(l as i64));
        numer = numer.try_add(&TruncatedSeries::exp_linear(&rate, order).scale(&zeta_l.scale(&sign(l))))?;
        zeta_l = &zeta_l * zeta;
    }
    let one = TruncatedSeries::one(&two, order);
    let d_rate = CyclotomicNumber::from_rational(field, Rational::from(d_fold as i64));
    let denom = TruncatedSeries::exp_linear(&d_rate, order)
        .scale(&zeta_l)
        .try_add(&one)?;
    let folded = numer.scale(&two).try_mul(&denom.inverse()?)?;
    let simple = TruncatedSeries::exp_linear(&two.one_like(), order)
        .scale(zeta)
        .try_add(&one)?
        .inverse()?
        .scale(&two);
    let coefficients = folded.taylor_coefficients();
    let moments = poly_twist_moments(&IntegralSpec::new(
        order - 1,
        CyclotomicNumber::zero(field),
        zeta.clone(),
        Rational::one(),
    )?)?;
    Ok(EulerGfReport {
        telescopes: folded == simple,
        matches_moments: coefficients == moments,
        coefficients,
    })
}

fn ratio(numer: &CyclotomicNumber, denom: &CyclotomicNumber) -> Result<CyclotomicNumber> {
    if denom.is_zero() {
        return Err(Error::ResidualUndefined);
    }
    Ok(numer * &denom.inverse()?)
}

/// A_n / ((−1)^n (1+q)^n I_{−q^{−1}}(ζ^x χ(x) x^n)) for n ≤ n_max.
pub fn witt_residuals(cfg: &TwistedConfig, n_max: usize) -> Result<Vec<Result<CyclotomicNumber>>> {
    let a = twisted_a_values(cfg, n_max)?;
    let integrals = char_twist_moments(n_max, &cfg.chi, &cfg.zeta, &cfg.q)?;
    let one_plus_q = Rational::one() + &cfg.q;
    Ok((0..=n_max)
        .map(|n| {
            let scaled = integrals[n].scale(&(sign(n as u64) * one_plus_q.powu(n as u64)));
            ratio(&a[n], &scaled)
        })
        .collect())
}

pub fn witt_residual(cfg: &TwistedConfig, n: usize) -> Result<CyclotomicNumber> {
    witt_residuals(cfg, n)?.pop().expect("at least n = 0")
}

/// ((−1)^n A_n/(1+q)^n) divided by the residue-class decomposition of the integral.
pub fn distribution_residual(cfg: &TwistedConfig, n: usize) -> Result<CyclotomicNumber> {
    let a = twisted_a_values(cfg, n)?.pop().expect("at least A_0");
    let lhs = a.scale(&(sign(n as u64) / (Rational::one() + &cfg.q).powu(n as u64)));
    let rhs = multiplication_formula_rhs(n, &cfg.chi, &cfg.zeta, &cfg.q)?;
    ratio(&lhs, &rhs)
}

/// At q = 1: A_{n,χ,ζ}(−1) against (−2d)^n Σ_{a<d} (−1)^a χ(a) ζ^a E_{n,ζ^d}(a/d).
pub fn euler_decomposition_check(
    chi: &DirichletCharacter,
    zeta_order: u64,
    zeta_k: u64,
    n: usize,
) -> Result<IdentityReport<CyclotomicNumber>> {
    let cfg = TwistedConfig::new(chi.clone(), zeta_order, zeta_k, Rational::one())?;
    let lhs = twisted_a_values(&cfg, n)?.pop().expect("at least A_0");
    let d = cfg.modulus();
    let zeta_d = cfg.zeta.powu(d);
    let mut sum = CyclotomicNumber::zero(&cfg.field);
    let mut zeta_a = CyclotomicNumber::one(&cfg.field);
    for a in 0..d {
        let chi_a = cfg.chi_at(a as i64);
        if !chi_a.is_zero() {
            let x = cfg.rational(Rational::frac(a as i64, d as i64));
            let e = twisted_euler_polynomial(n, &zeta_d, &x)?;
            sum = sum + (&chi_a * &zeta_a * e).scale(&sign(a));
        }
        zeta_a = &zeta_a * &cfg.zeta;
    }
    let rhs = sum.scale(&Rational::from(-2 * d as i64).powu(n as u64));
    Ok(IdentityReport::new(lhs, rhs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelReport {
    /// The d-step identity J(f_d) + q^d J(f) = (1+q) Σ (−1)^l q^{d−1−l} f(l) holds.
    pub iterated_holds: bool,
    /// Σ with kernel q^{d−l+1} divided by Σ with kernel q^{d−1−l}.
    pub ratio: Option<Rational>,
}

/// Iterates J(f_{k+1}) = −q J(f_k) + (1+q) f(k) from J(f) = `start` through d
/// steps and compares both kernel normalizations on the values f(0..d).
pub fn kernel_normalization_check(q: &Rational, start: &Rational, f: &[Rational]) -> Result<KernelReport> {
    let d = f.len() as u64;
    if d % 2 == 0 {
        return Err(Error::InvalidParameter(format!("fold {d} must be odd")));
    }
    let one_plus_q = Rational::one() + q;
    let mut j = start.clone();
    for value in f {
        j = -(q * &j) + &one_plus_q * value;
    }
    let kernel = |shift: i64| -> Result<Rational> {
        f.iter().enumerate().try_fold(Rational::zero(), |acc, (l, v)| {
            Ok(acc + sign(l as u64) * q.pow(d as i64 - l as i64 + shift)? * v)
        })
    };
    let iterated = &one_plus_q * kernel(-1)?;
    let printed = &one_plus_q * kernel(1)?;
    Ok(KernelReport {
        iterated_holds: j + q.powu(d) * start == iterated,
        ratio: printed.checked_div(&iterated).ok(),
    })
}
