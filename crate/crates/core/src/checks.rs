//! Relation checks over parameter grids.
//!
//! Each relation evaluates one identity along independent paths at every
//! grid point and records pass, fail or skip. Points are independent and run
//! on the rayon pool; reports are sorted by point key.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{CyclotomicNumber, Rational};
use crate::characters::{enumerate_characters, DirichletCharacter};
use crate::error::{Error, Result};
use crate::eulerian::eulerian_table;
use crate::fermionic::{
    alternating_sum_convergence, distribution_identity_check, padic_truncation,
    poly_twist_moments, IntegralSpec,
};
use crate::lfunction::{interpolation_check, power_sum_series_check};
use crate::twisted::{
    distribution_residual, euler_decomposition_check, euler_gf_consistency, kernel_normalization_check,
    power_sum_series_sum, twisted_a_values, twisted_eulerian_series_path, witt_residuals, TwistedConfig,
};

const THM6_TOL: f64 = 1e-9;
const SERIES_TOL: f64 = 1e-10;
const KERNEL_TRIALS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Eq15,
    Thm2,
    Thm3,
    Thm6,
    Distribution,
    Thm1Residual,
    Thm5Residual,
    Cor2Residual,
    Cor3,
    Eq22,
    Eq28Residual,
}

impl Relation {
    pub const ALL: [Relation; 11] = [
        Relation::Eq15,
        Relation::Thm2,
        Relation::Thm3,
        Relation::Thm6,
        Relation::Distribution,
        Relation::Thm1Residual,
        Relation::Thm5Residual,
        Relation::Cor2Residual,
        Relation::Cor3,
        Relation::Eq22,
        Relation::Eq28Residual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Eq15 => "eq15",
            Relation::Thm2 => "thm2",
            Relation::Thm3 => "thm3",
            Relation::Thm6 => "thm6",
            Relation::Distribution => "distribution",
            Relation::Thm1Residual => "thm1-residual",
            Relation::Thm5Residual => "thm5-residual",
            Relation::Cor2Residual => "cor2-residual",
            Relation::Cor3 => "cor3",
            Relation::Eq22 => "eq22",
            Relation::Eq28Residual => "eq28-residual",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Relation::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Relation::ALL.iter().map(|r| r.name()).collect();
                format!("unknown relation {s:?}; expected one of {}", names.join(", "))
            })
    }
}

impl Serialize for Relation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Which characters to take for each modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CharacterKind {
    Principal,
    Quadratic,
    /// The first enumerated character of this exact order, if any.
    Order(u64),
}

impl TryFrom<String> for CharacterKind {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        match s.as_str() {
            "principal" => Ok(CharacterKind::Principal),
            "quadratic" => Ok(CharacterKind::Quadratic),
            other => other
                .strip_prefix("order:")
                .and_then(|k| k.parse().ok())
                .map(CharacterKind::Order)
                .ok_or_else(|| format!("unknown character kind {other:?}")),
        }
    }
}

impl From<CharacterKind> for String {
    fn from(kind: CharacterKind) -> String {
        kind.to_string()
    }
}

impl fmt::Display for CharacterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharacterKind::Principal => f.write_str("principal"),
            CharacterKind::Quadratic => f.write_str("quadratic"),
            CharacterKind::Order(k) => write!(f, "order:{k}"),
        }
    }
}

impl CharacterKind {
    /// The character of this kind mod d, or None when there is none.
    pub fn resolve(&self, d: u64) -> Result<Option<DirichletCharacter>> {
        Ok(match self {
            CharacterKind::Principal => Some(DirichletCharacter::principal(d)?),
            CharacterKind::Quadratic => match DirichletCharacter::quadratic(d) {
                Ok(chi) => Some(chi),
                Err(Error::NotSquarefree(_)) | Err(Error::InvalidParameter(_)) => None,
                Err(e) => return Err(e),
            },
            CharacterKind::Order(k) => enumerate_characters(d)?
                .into_iter()
                .find(|c| c.character_order() == *k),
        })
    }
}

/// Parameter grid; missing fields in a grid file take the default values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub n: Vec<usize>,
    pub moduli: Vec<u64>,
    pub characters: Vec<CharacterKind>,
    pub zeta_orders: Vec<u64>,
    pub zeta_k: u64,
    pub q: Vec<Rational>,
    pub padic_primes: Vec<u64>,
    pub padic_levels: u32,
    pub euler_order: usize,
    pub seed: u64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            n: (0..=5).collect(),
            moduli: vec![1, 3, 5],
            characters: vec![
                CharacterKind::Principal,
                CharacterKind::Quadratic,
                CharacterKind::Order(4),
            ],
            zeta_orders: vec![1, 3, 9],
            zeta_k: 1,
            q: vec![Rational::from(2), Rational::from(3), Rational::frac(5, 2)],
            padic_primes: vec![3, 5],
            padic_levels: 4,
            euler_order: 12,
            seed: 20_240_229,
        }
    }
}

impl Grid {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    fn n_max(&self) -> Option<usize> {
        self.n.iter().copied().max()
    }

    /// (label, χ) for every modulus and kind, without duplicates.
    fn characters(&self) -> Result<Vec<(String, DirichletCharacter)>> {
        let mut out: Vec<(String, DirichletCharacter)> = Vec::new();
        for &d in &self.moduli {
            for kind in &self.characters {
                if let Some(chi) = kind.resolve(d)? {
                    if !out.iter().any(|(_, c)| c.modulus() == d && c.normalized() == chi.normalized()) {
                        out.push((kind.to_string(), chi));
                    }
                }
            }
        }
        Ok(out)
    }

    fn configs(&self, q_values: &[Rational]) -> Result<Vec<Labeled>> {
        let mut out = Vec::new();
        for (label, chi) in self.characters()? {
            for &order in &self.zeta_orders {
                for q in q_values {
                    let cfg = TwistedConfig::new(chi.clone(), order, self.zeta_k, q.clone())?;
                    let key = format!(
                        "d={} chi={label} zeta={order}^{} q={q}",
                        chi.modulus(),
                        cfg.zeta_k()
                    );
                    out.push(Labeled { key, cfg });
                }
            }
        }
        Ok(out)
    }
}

struct Labeled {
    key: String,
    cfg: TwistedConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointResult {
    pub key: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

impl PointResult {
    fn pass(key: String, residual: impl Into<Option<String>>) -> Self {
        PointResult {
            key,
            verdict: Verdict::Pass,
            reason: None,
            residual: residual.into(),
        }
    }

    fn fail(key: String, reason: impl Into<String>, residual: impl Into<Option<String>>) -> Self {
        PointResult {
            key,
            verdict: Verdict::Fail,
            reason: Some(reason.into()),
            residual: residual.into(),
        }
    }

    fn skip(key: String, reason: impl Into<String>) -> Self {
        PointResult {
            key,
            verdict: Verdict::Skip,
            reason: Some(reason.into()),
            residual: None,
        }
    }

    fn judge(key: String, ok: bool, residual: String, reason: &str) -> Self {
        if ok {
            Self::pass(key, residual)
        } else {
            Self::fail(key, reason, residual)
        }
    }

    fn error(key: String, e: &Error) -> Self {
        Self::fail(key, format!("{}: {e}", e.name()), None)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub points: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub relation: Relation,
    pub grid: Grid,
    pub summary: CheckSummary,
    pub points: Vec<PointResult>,
}

impl CheckReport {
    fn new(relation: Relation, grid: &Grid, mut points: Vec<PointResult>) -> Self {
        points.sort_by(|a, b| a.key.cmp(&b.key));
        let count = |v: Verdict| points.iter().filter(|p| p.verdict == v).count();
        CheckReport {
            relation,
            grid: grid.clone(),
            summary: CheckSummary {
                points: points.len(),
                passed: count(Verdict::Pass),
                failed: count(Verdict::Fail),
                skipped: count(Verdict::Skip),
            },
            points,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }
}

fn show(c: &CyclotomicNumber) -> String {
    match c.as_rational() {
        Some(r) => r.to_string(),
        None => format!("{c:?}"),
    }
}

fn sign(n: usize) -> Rational {
    if n % 2 == 0 {
        Rational::one()
    } else {
        Rational::from(-1)
    }
}

pub fn run_check(relation: Relation, grid: &Grid) -> Result<CheckReport> {
    let points = match relation {
        Relation::Eq15 => eq15(grid)?,
        Relation::Thm2 => per_config(grid, &grid.q, thm2)?,
        Relation::Thm3 => per_config(grid, &grid.q, thm3)?,
        Relation::Thm6 => per_config(grid, &grid.q, thm6)?,
        Relation::Distribution => per_config(grid, &grid.q, distribution)?,
        Relation::Thm1Residual => per_config(grid, &grid.q, thm1_residual)?,
        Relation::Thm5Residual => per_config(grid, &grid.q, thm5_residual)?,
        Relation::Cor2Residual => cor2(grid)?,
        Relation::Cor3 => per_config(grid, &[Rational::one()], cor3)?,
        Relation::Eq22 => eq22(grid)?,
        Relation::Eq28Residual => eq28(grid)?,
    };
    Ok(CheckReport::new(relation, grid, points))
}

fn n_key(prefix: &str, n: usize) -> String {
    format!("{prefix} n={n}")
}

type ConfigCheck = fn(&TwistedConfig, &[usize], &str) -> Result<Vec<PointResult>>;

/// Runs `check` once per (χ, ζ, q) configuration with all n at once.
fn per_config(grid: &Grid, q_values: &[Rational], check: ConfigCheck) -> Result<Vec<PointResult>> {
    if grid.n.is_empty() {
        return Ok(Vec::new());
    }
    let configs = grid.configs(q_values)?;
    Ok(configs
        .par_iter()
        .flat_map_iter(|c| match check(&c.cfg, &grid.n, &c.key) {
            Ok(points) => points,
            Err(e) => vec![PointResult::error(c.key.clone(), &e)],
        })
        .collect())
}

fn max_n(ns: &[usize]) -> usize {
    ns.iter().copied().max().unwrap_or(0)
}

fn eq15(grid: &Grid) -> Result<Vec<PointResult>> {
    let Some(n_max) = grid.n_max() else {
        return Ok(Vec::new());
    };
    let table = eulerian_table(n_max)?;
    Ok(grid
        .q
        .par_iter()
        .flat_map_iter(|q| {
            let spec = IntegralSpec::new(n_max, Rational::zero(), Rational::one(), q.inverse().expect("q != 0"));
            let moments = spec.and_then(|s| poly_twist_moments(&s));
            grid.n
                .iter()
                .map(|&n| {
                    let key = format!("q={q} n={n}");
                    match &moments {
                        Err(e) => PointResult::error(key, e),
                        Ok(k) => {
                            let expected =
                                sign(n) * table[n].eval(&-q) / (Rational::one() + q).powu(n as u64);
                            let diff = &k[n] - &expected;
                            PointResult::judge(key, diff.is_zero(), diff.to_string(), "integral differs")
                        }
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect())
}

fn thm2(cfg: &TwistedConfig, ns: &[usize], prefix: &str) -> Result<Vec<PointResult>> {
    let a = twisted_a_values(cfg, max_n(ns))?;
    Ok(ns
        .iter()
        .map(|&n| {
            let key = n_key(prefix, n);
            if cfg.q().abs().is_one() {
                return PointResult::skip(key, "closed form has a pole at |q| = 1");
            }
            match twisted_eulerian_series_path(cfg, n) {
                Err(e) => PointResult::error(key, &e),
                Ok(series) => {
                    let diff = &a[n] - &series;
                    PointResult::judge(key, diff.is_zero(), show(&diff), "paths disagree")
                }
            }
        })
        .collect())
}

fn thm3(cfg: &TwistedConfig, ns: &[usize], prefix: &str) -> Result<Vec<PointResult>> {
    let a = twisted_a_values(cfg, max_n(ns))?;
    let q = cfg.q();
    Ok(ns
        .iter()
        .map(|&n| {
            let key = n_key(prefix, n);
            if cfg.modulus() == 1 && n == 0 {
                return PointResult::skip(key, "m = 0 term: covered by thm2");
            }
            if q.abs().is_one() {
                return PointResult::skip(key, "closed form has a pole at |q| = 1");
            }
            let result = (|| {
                let exact = power_sum_series_sum(cfg, n)?;
                let lhs = a[n].scale(&(sign(n) / (q * (Rational::one() + q).powu(n as u64 + 1))));
                let diff = &lhs - &exact;
                if !diff.is_zero() {
                    return Ok(PointResult::fail(key.clone(), "closed form differs", show(&diff)));
                }
                if *q > 1 {
                    let numeric = power_sum_series_check(cfg, n, SERIES_TOL, 1)?;
                    if !numeric.pass {
                        return Ok(PointResult::fail(
                            key.clone(),
                            "partial sums miss the closed form",
                            format!("{:e}", numeric.gap),
                        ));
                    }
                }
                Ok(PointResult::pass(key.clone(), show(&diff)))
            })();
            result.unwrap_or_else(|e: Error| PointResult::error(key, &e))
        })
        .collect())
}

fn thm6(cfg: &TwistedConfig, ns: &[usize], prefix: &str) -> Result<Vec<PointResult>> {
    Ok(ns
        .iter()
        .map(|&n| {
            let key = n_key(prefix, n);
            if cfg.modulus() == 1 && n == 0 {
                return PointResult::skip(key, "m = 0 term separates L(0) from A_0 when d = 1");
            }
            if *cfg.q() <= 1 {
                return PointResult::skip(key, "series needs q > 1");
            }
            match interpolation_check(cfg, n, THM6_TOL, 1) {
                Err(e) => PointResult::error(key, &e),
                Ok(r) => PointResult::judge(key, r.pass, format!("{:e}", r.gap), "gap exceeds tolerance"),
            }
        })
        .collect())
}

fn distribution(cfg: &TwistedConfig, ns: &[usize], prefix: &str) -> Result<Vec<PointResult>> {
    Ok(ns
        .iter()
        .map(|&n| {
            let key = n_key(prefix, n);
            match distribution_identity_check(n, cfg.chi(), cfg.zeta(), cfg.q()) {
                Err(e) => PointResult::error(key, &e),
                Ok(r) => PointResult::judge(key, r.equal, show(&(&r.lhs - &r.rhs)), "sides differ"),
            }
        })
        .collect())
}

fn q_squared(cfg: &TwistedConfig) -> CyclotomicNumber {
    CyclotomicNumber::from_rational(cfg.field(), cfg.q().powu(2))
}

fn residual_point(key: String, cfg: &TwistedConfig, value: Result<CyclotomicNumber>) -> PointResult {
    match value {
        Err(Error::ResidualUndefined) => PointResult::skip(key, "integral side vanishes"),
        Err(e) => PointResult::error(key, &e),
        Ok(rho) => PointResult::judge(key, rho == q_squared(cfg), show(&rho), "residual is not q^2"),
    }
}

fn thm1_residual(cfg: &TwistedConfig, ns: &[usize], prefix: &str) -> Result<Vec<PointResult>> {
    let mut residuals = witt_residuals(cfg, max_n(ns))?;
    Ok(ns
        .iter()
        .map(|&n| {
            let value = std::mem::replace(&mut residuals[n], Err(Error::ResidualUndefined));
            residual_point(n_key(prefix, n), cfg, value)
        })
        .collect())
}

fn thm5_residual(cfg: &TwistedConfig, ns: &[usize], prefix: &str) -> Result<Vec<PointResult>> {
    let witt = witt_residuals(cfg, max_n(ns))?;
    Ok(ns
        .iter()
        .map(|&n| {
            let key = n_key(prefix, n);
            let value = distribution_residual(cfg, n);
            if let (Ok(a), Ok(b)) = (&value, &witt[n]) {
                if a != b {
                    return PointResult::fail(key, "differs from the Witt residual", show(a));
                }
            }
            residual_point(key, cfg, value)
        })
        .collect())
}

fn cor3(cfg: &TwistedConfig, ns: &[usize], prefix: &str) -> Result<Vec<PointResult>> {
    Ok(ns
        .iter()
        .map(|&n| {
            let key = n_key(prefix, n);
            match euler_decomposition_check(cfg.chi(), cfg.zeta_order(), cfg.zeta_k(), n) {
                Err(e) => PointResult::error(key, &e),
                Ok(r) => PointResult::judge(key, r.equal, show(&(&r.lhs - &r.rhs)), "sides differ"),
            }
        })
        .collect())
}

/// Truncated Riemann sums and unnormalized alternating sums over the
/// rational-valued characters of the grid, at q = 1 + p.
fn cor2(grid: &Grid) -> Result<Vec<PointResult>> {
    let mut tasks = Vec::new();
    for (label, chi) in grid.characters()? {
        if !chi.is_rational_valued() {
            continue;
        }
        for &p in &grid.padic_primes {
            for &n in &grid.n {
                tasks.push((label.clone(), chi.clone(), p, n));
            }
        }
    }
    Ok(tasks
        .par_iter()
        .map(|(label, chi, p, n)| {
            let q = Rational::from(1 + *p as i64);
            let key = format!("d={} chi={label} p={p} q={q} n={n}", chi.modulus());
            let result = (|| {
                let principal_one = chi.modulus() == 1;
                let truncation = padic_truncation(*n, (!principal_one).then_some(chi), &q, *p, grid.padic_levels)?;
                let sums = alternating_sum_convergence(*n, chi, &q, *p, grid.padic_levels)?;
                Ok::<_, Error>((truncation, sums))
            })();
            match result {
                Err(e) => PointResult::error(key, &e),
                Ok((truncation, sums)) => {
                    let monotone = truncation.is_monotone() && sums.truncation.is_monotone();
                    let ratio = match &sums.claimed_ratio {
                        Some(r) => r.to_string(),
                        None => "undefined".to_string(),
                    };
                    let residual = format!("ratio={ratio} monotone={monotone}");
                    if !truncation.converges() {
                        PointResult::fail(key, "normalized sums do not converge at rate p^N", residual)
                    } else if !sums.truncation.converges() {
                        PointResult::fail(key, "alternating sums do not approach twice the closed sum", residual)
                    } else {
                        match &sums.claimed_ratio {
                            None => PointResult::pass(key, residual),
                            Some(r) => PointResult::judge(key, *r == q.powu(2), residual, "ratio is not q^2"),
                        }
                    }
                }
            }
        })
        .collect())
}

fn eq22(grid: &Grid) -> Result<Vec<PointResult>> {
    let mut tasks = Vec::new();
    for &d in &grid.moduli {
        for &order in &grid.zeta_orders {
            tasks.push((d, order));
        }
    }
    Ok(tasks
        .par_iter()
        .map(|&(d, order)| {
            let key = format!("fold={d} zeta={order}^{} T={}", grid.zeta_k, grid.euler_order);
            let result = (|| {
                let cfg = TwistedConfig::new(DirichletCharacter::principal(1)?, order, grid.zeta_k, Rational::one())?;
                euler_gf_consistency(d, cfg.zeta(), grid.euler_order)
            })();
            match result {
                Err(e) => PointResult::error(key, &e),
                Ok(r) => {
                    let ok = r.telescopes && r.matches_moments;
                    let reason = if r.telescopes { "coefficients differ from moments" } else { "does not telescope" };
                    PointResult::judge(key, ok, format!("telescopes={} moments={}", r.telescopes, r.matches_moments), reason)
                }
            }
        })
        .collect())
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::frac(rng.gen_range(-50..=50), rng.gen_range(1..=12))
}

/// Random J(f) and f tables: the iterated one-step equation must hold and
/// the printed kernel must be q² times the iterated one.
fn eq28(grid: &Grid) -> Result<Vec<PointResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut tasks = Vec::new();
    for &d in &grid.moduli {
        for q in &grid.q {
            for trial in 0..KERNEL_TRIALS {
                let start = random_rational(&mut rng);
                let mut f: Vec<Rational> = (0..d).map(|_| random_rational(&mut rng)).collect();
                if f.iter().all(Rational::is_zero) {
                    f[0] = Rational::one();
                }
                tasks.push((d, q.clone(), trial, start, f));
            }
        }
    }
    Ok(tasks
        .par_iter()
        .map(|(d, q, trial, start, f)| {
            let key = format!("d={d} q={q} trial={trial}");
            match kernel_normalization_check(q, start, f) {
                Err(e) => PointResult::error(key, &e),
                Ok(r) => match &r.ratio {
                    _ if !r.iterated_holds => PointResult::fail(key, "iterated equation fails", None),
                    None => PointResult::skip(key, "iterated kernel sum vanishes"),
                    Some(ratio) => {
                        PointResult::judge(key, *ratio == q.powu(2), ratio.to_string(), "ratio is not q^2")
                    }
                },
            }
        })
        .collect())
}
