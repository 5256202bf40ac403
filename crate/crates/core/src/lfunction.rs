//! The twisted Eulerian L-series
//! L(s) = q(1+q)^{1−s} Σ_{m≥1} (−1)^m χ(m) ζ^m q^{−m} m^{−s}
//! in double precision, and its interpolation of A_{n,χ,ζ}(−q) at s = −n.

use crate::algebra::arith::lcm;
use crate::algebra::{ComplexValue, CyclotomicNumber, Rational};
use crate::error::{Error, Result};
use crate::twisted::{power_sum_series_sum, twisted_a_values, TwistedConfig};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_TERMS: usize = 100_000;

#[derive(Debug, Clone)]
pub struct LParams {
    pub s: ComplexValue,
    pub cfg: TwistedConfig,
    /// Embedding ζ_L ↦ e^{2πik/L}.
    pub embedding: u64,
    pub tol: f64,
    pub max_terms: usize,
}

impl LParams {
    pub fn new(s: ComplexValue, cfg: TwistedConfig) -> Self {
        LParams {
            s,
            cfg,
            embedding: 1,
            tol: DEFAULT_TOL,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LEvaluation {
    pub value: ComplexValue,
    /// Σ_{m ≤ terms_used} without the prefactor.
    pub series_sum: ComplexValue,
    pub prefactor: ComplexValue,
    pub terms_used: usize,
    /// Bound on |value − L(s)|, i.e. the series tail times |prefactor|.
    pub tail_bound: f64,
}

/// Complex images of c(l) = (−1)^l ζ^l χ(l) for l in one period.
fn coefficient_cycle(cfg: &TwistedConfig, k: u64) -> Result<Vec<ComplexValue>> {
    let period = lcm(lcm(2, cfg.modulus()), cfg.zeta_order());
    let mut zeta_l = CyclotomicNumber::one(cfg.field());
    (0..period)
        .map(|l| {
            let sign = if l % 2 == 0 { Rational::one() } else { Rational::from(-1) };
            let c = (&zeta_l * &cfg.chi().value_in(cfg.field(), l as i64)?).scale(&sign);
            zeta_l = &zeta_l * cfg.zeta();
            c.embed(k)
        })
        .collect()
}

/// Smallest M with m^{|σ|} ≤ q^{m/2} for every m ≥ M.
fn majorant_start(sigma: f64, ln_q: f64) -> usize {
    let g = |m: usize| 0.5 * m as f64 * ln_q - sigma.abs() * (m as f64).ln();
    // g falls until 2|σ|/ln q and rises after it
    let mut m = ((2.0 * sigma.abs() / ln_q).ceil() as usize).max(1);
    while g(m) < 0.0 {
        m += 1;
    }
    while m > 1 && g(m - 1) >= 0.0 {
        m -= 1;
    }
    m
}

pub fn l_eval(params: &LParams) -> Result<LEvaluation> {
    let cfg = &params.cfg;
    if *cfg.q() <= 1 {
        return Err(Error::OutsideConvergence);
    }
    if !(params.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", params.tol)));
    }
    let cycle = coefficient_cycle(cfg, params.embedding)?;
    let q = cfg.q().to_f64();
    let ln_q = q.ln();
    let s = params.s;
    let prefactor = q * ((1.0 - s) * (1.0 + q).ln()).exp();
    let scale = prefactor.norm();
    let start = majorant_start(s.re, ln_q);
    let ratio = 1.0 - q.powf(-0.5);

    let mut sum = ComplexValue::new(0.0, 0.0);
    for m in 1..=params.max_terms {
        let c = cycle[m % cycle.len()];
        if c != ComplexValue::new(0.0, 0.0) {
            let mf = m as f64;
            sum += c * (-(m as f64) * ln_q - s * mf.ln()).exp();
        }
        if m >= start {
            let tail_bound = scale * q.powf(-0.5 * (m + 1) as f64) / ratio;
            if tail_bound < params.tol {
                return Ok(LEvaluation {
                    value: prefactor * sum,
                    series_sum: sum,
                    prefactor,
                    terms_used: m,
                    tail_bound,
                });
            }
        }
    }
    Err(Error::NotConverged {
        max_terms: params.max_terms,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericComparison {
    pub numeric: ComplexValue,
    pub exact: ComplexValue,
    pub gap: f64,
    pub allowed: f64,
    pub pass: bool,
}

impl NumericComparison {
    fn new(numeric: ComplexValue, exact: ComplexValue, allowed: f64) -> Self {
        let gap = (numeric - exact).norm();
        NumericComparison {
            numeric,
            exact,
            gap,
            allowed,
            pass: gap <= allowed,
        }
    }
}

/// |L(−n) − (−1)^n A_n| ≤ tol·(1 + |A_n|) under embedding k.
pub fn interpolation_check(cfg: &TwistedConfig, n: usize, tol: f64, k: u64) -> Result<NumericComparison> {
    if cfg.modulus() == 1 && n == 0 {
        return Err(Error::InvalidParameter(
            "the m = 0 term separates L(0) from A_0 when d = 1".into(),
        ));
    }
    let a = twisted_a_values(cfg, n)?.pop().expect("at least A_0");
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let exact = a.embed(k)? * sign;
    let params = LParams {
        s: ComplexValue::new(-(n as f64), 0.0),
        cfg: cfg.clone(),
        embedding: k,
        tol: tol * 1e-3,
        max_terms: DEFAULT_MAX_TERMS,
    };
    let value = l_eval(&params)?.value;
    Ok(NumericComparison::new(value, exact, tol * (1.0 + exact.norm())))
}

/// Partial sums of Σ_{m≥1} (−1)^m ζ^m χ(m) m^n q^{−m} against the exact closed form.
pub fn power_sum_series_check(cfg: &TwistedConfig, n: usize, tol: f64, k: u64) -> Result<NumericComparison> {
    let exact = power_sum_series_sum(cfg, n)?.embed(k)?;
    let params = LParams {
        s: ComplexValue::new(-(n as f64), 0.0),
        cfg: cfg.clone(),
        embedding: k,
        tol: tol * 1e-3,
        max_terms: DEFAULT_MAX_TERMS,
    };
    let numeric = l_eval(&params)?.series_sum;
    Ok(NumericComparison::new(numeric, exact, tol))
}
