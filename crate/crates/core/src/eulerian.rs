//! Classical Eulerian polynomials A_n(t).
//!
//! Three independent routes: the umbral recurrence (canonical), expansion
//! of the exponential generating function, and a brute-force count of
//! descents over S_n. Also hosts the closed form of Σ_k k^j w^k, which other
//! modules use as a second evaluation path.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::algebra::arith::binomial;
use crate::algebra::{FieldElement, Polynomial, Rational};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

const MAX_ORACLE_N: usize = 9;

/// A_0, …, A_{n_max} from the umbral recurrence
/// (t − 1)·A_n(t) = Σ_{k<n} C(n,k) A_k(t) (t − 1)^{n−k}.
pub fn eulerian_table(n_max: usize) -> Result<Vec<Polynomial>> {
    let t_minus_one = Polynomial::from_ints(&[-1, 1]);
    let mut table = vec![Polynomial::one()];
    for n in 1..=n_max {
        let mut rhs = Polynomial::zero();
        for (k, a_k) in table.iter().enumerate() {
            let c = Rational::from(binomial(n as u64, k as u64));
            rhs = &rhs + &(a_k * &t_minus_one.pow((n - k) as u32)).scale(&c);
        }
        let (quot, rem) = rhs.div_rem(&t_minus_one)?;
        if !rem.is_zero() {
            return Err(Error::InternalInconsistency(format!(
                "recurrence for A_{n} left remainder {rem:?}"
            )));
        }
        table.push(quot);
    }
    Ok(table)
}

pub fn eulerian_recurrence(n: usize) -> Result<Polynomial> {
    Ok(eulerian_table(n)?.pop().expect("table is nonempty"))
}

/// Σ_{σ ∈ S_n} t^{des(σ)} by enumerating all n! permutations.
pub fn descent_oracle(n: usize) -> Result<Polynomial> {
    if !(1..=MAX_ORACLE_N).contains(&n) {
        return Err(Error::OracleTooLarge(n));
    }
    let mut counts = vec![0i64; n];
    for perm in (0..n).permutations(n) {
        let descents = perm.windows(2).filter(|w| w[0] > w[1]).count();
        counts[descents] += 1;
    }
    Ok(Polynomial::from_ints(&counts))
}

/// Sign convention for the exponential generating function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GfConvention {
    /// (1 − x)/(e^{t(x−1)} − x); agrees with the recurrence.
    RecurrenceConsistent,
    /// (1 − x)/(e^{t(1−x)} − x); yields (−1)^n A_n.
    AsPrinted,
}

/// Taylor coefficients of the Eulerian generating function for n ≤ n_max.
///
/// x is treated as a parameter: the series in t is expanded exactly at
/// n_max + 1 rational points x ∉ {1}, and each coefficient is recovered by
/// Lagrange interpolation (A_n has degree < n_max + 1).
pub fn eulerian_gf_coefficients(n_max: usize, convention: GfConvention) -> Result<Vec<Polynomial>> {
    let order = n_max + 1;
    let points: Vec<Rational> = (0..order).map(|i| Rational::from(i as i64 + 2)).collect();
    let samples = points
        .iter()
        .map(|x| {
            let one_minus_x = Rational::one() - x;
            let rate = match convention {
                GfConvention::RecurrenceConsistent => -&one_minus_x,
                GfConvention::AsPrinted => one_minus_x.clone(),
            };
            let denom = TruncatedSeries::exp_linear(&rate, order)
                .try_sub(&TruncatedSeries::constant(x.clone(), order))?;
            Ok(denom.inverse()?.scale(&one_minus_x).taylor_coefficients())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..order)
        .map(|n| {
            let values: Vec<Rational> = samples.iter().map(|s| s[n].clone()).collect();
            lagrange_interpolate(&points, &values)
        })
        .collect())
}

fn lagrange_interpolate(xs: &[Rational], ys: &[Rational]) -> Polynomial {
    let mut acc = Polynomial::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = Polynomial::constant(yi.clone());
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                let inv = (xi - xj).inverse().expect("distinct nodes");
                basis = &basis * &Polynomial::linear(-xj).scale(&inv);
            }
        }
        acc = &acc + &basis;
    }
    acc
}

/// Closed form of Σ_{k≥0} k^j w^k: 1/(1 − w) for j = 0 and
/// w·A_j(w)/(1 − w)^{j+1} for j ≥ 1.
pub fn power_sum_rational<F: FieldElement>(j: usize, w: &F) -> Result<F> {
    let one_minus_w = w.one_like() - w.clone();
    if one_minus_w.is_zero() {
        return Err(Error::PoleAtOne);
    }
    let inv = one_minus_w.inverse()?;
    if j == 0 {
        return Ok(inv);
    }
    let a_j = eulerian_recurrence(j)?;
    Ok(w.clone() * a_j.eval_in(w) * inv.powu(j as u64 + 1))
}

/// Same as [`power_sum_rational`] for several j at once, sharing one table.
pub fn power_sums_rational<F: FieldElement>(j_max: usize, w: &F) -> Result<Vec<F>> {
    let one_minus_w = w.one_like() - w.clone();
    if one_minus_w.is_zero() {
        return Err(Error::PoleAtOne);
    }
    let inv = one_minus_w.inverse()?;
    let table = eulerian_table(j_max)?;
    Ok((0..=j_max)
        .map(|j| {
            if j == 0 {
                inv.clone()
            } else {
                w.clone() * table[j].eval_in(w) * inv.powu(j as u64 + 1)
            }
        })
        .collect())
}
