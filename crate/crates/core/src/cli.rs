//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a relation check failed, 2 usage error, 3 a
//! mathematical precondition was violated (the message names the error).
//! Output is compact JSON (or CSV where offered); rationals are "a/b"
//! strings and floats carry 17 significant digits.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::algebra::{ComplexValue, CyclotomicNumber, Rational, Valuation};
use crate::characters::{enumerate_characters, parse_character_json, CharacterFile, DirichletCharacter};
use crate::checks::{run_check, Grid, Relation};
use crate::error::Error;
use crate::eulerian::{descent_oracle, eulerian_recurrence};
use crate::fermionic::padic_truncation;
use crate::lfunction::{l_eval, LParams, DEFAULT_MAX_TERMS, DEFAULT_TOL};
use crate::twisted::{twisted_eulerian_table, TwistedConfig};

#[derive(Debug, Parser)]
#[command(name = "twisted-eulerian", version, about = "Exact twisted Eulerian polynomials, fermionic integrals and L-values")]
pub struct Cli {
    /// Write the document to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classical Eulerian polynomial A_n(t).
    Classic {
        #[arg(long)]
        n: usize,
        /// Also compare with the permutation descent count (n <= 9).
        #[arg(long)]
        check_oracle: bool,
    },
    /// Twisted Eulerian values A_{n,χ,ζ}(−q).
    Twisted {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_parser = parse_range)]
        n: Indices,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Truncated fermionic integral sums with p-adic valuations.
    Integral {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        q: Rational,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        levels: u32,
        /// Modulus of an optional character factor χ(x).
        #[arg(long, default_value_t = 1)]
        d: u64,
        #[arg(long = "char", value_parser = parse_char_spec, default_value = "principal")]
        chi: CharSpec,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// The twisted Eulerian L-series at a complex point.
    Lfun {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// RE or RE,IM
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: ComplexValue,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
        max_terms: usize,
    },
    /// All Dirichlet characters mod d.
    Chars {
        #[arg(long)]
        d: u64,
    },
    /// Verify a relation over a parameter grid.
    Check {
        #[arg(long)]
        relation: Relation,
        /// `default` or `file:PATH` (JSON, missing fields default).
        #[arg(long, default_value = "default")]
        grid: String,
    },
}

#[derive(Debug, Args)]
struct ConfigArgs {
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    q: Rational,
    #[arg(long)]
    d: u64,
    /// principal | quadratic | index:I | file:PATH
    #[arg(long = "char", value_parser = parse_char_spec)]
    chi: CharSpec,
    #[arg(long, default_value_t = 1)]
    zeta_order: u64,
    #[arg(long, default_value_t = 1)]
    zeta_k: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum CharSpec {
    Principal,
    Quadratic,
    Index(usize),
    File(PathBuf),
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

fn parse_char_spec(s: &str) -> Result<CharSpec, String> {
    match s {
        "principal" => Ok(CharSpec::Principal),
        "quadratic" => Ok(CharSpec::Quadratic),
        _ => {
            if let Some(i) = s.strip_prefix("index:") {
                i.parse().map(CharSpec::Index).map_err(|_| format!("bad index in {s:?}"))
            } else if let Some(path) = s.strip_prefix("file:") {
                Ok(CharSpec::File(PathBuf::from(path)))
            } else {
                Err(format!("expected principal, quadratic, index:I or file:PATH, got {s:?}"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Indices(Vec<usize>);

/// Comma-separated integers and inclusive ranges, e.g. `0-3,7`.
fn parse_range(s: &str) -> Result<Indices, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let bad = || format!("bad range item {part:?}");
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(Indices(out))
}

fn parse_complex(s: &str) -> Result<ComplexValue, String> {
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("bad number {x:?}"));
    let value = match s.split_once(',') {
        Some((re, im)) => ComplexValue::new(parse(re)?, parse(im)?),
        None => ComplexValue::new(parse(s)?, 0.0),
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(format!("non-finite value {s:?}"))
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Math(e)
    }
}

type CliResult<T> = Result<T, Failure>;

/// A float printed with 17 significant digits.
struct Float(f64);

impl Serialize for Float {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

fn complex(z: ComplexValue) -> [Float; 2] {
    [Float(z.re), Float(z.im)]
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string(value).map_err(|e| Failure::Math(Error::InternalInconsistency(e.to_string())))
}

fn resolve_character(d: u64, spec: &CharSpec) -> CliResult<DirichletCharacter> {
    Ok(match spec {
        CharSpec::Principal => DirichletCharacter::principal(d)?,
        CharSpec::Quadratic => DirichletCharacter::quadratic(d)?,
        CharSpec::Index(i) => {
            let all = enumerate_characters(d)?;
            let count = all.len();
            all.into_iter()
                .nth(*i)
                .ok_or_else(|| Failure::Usage(format!("index {i} out of range: {count} characters mod {d}")))?
        }
        CharSpec::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let chi = parse_character_json(&text)?;
            if chi.modulus() != d {
                return Err(Failure::Usage(format!(
                    "character file has modulus {}, but --d is {d}",
                    chi.modulus()
                )));
            }
            chi
        }
    })
}

fn build_config(args: &ConfigArgs) -> CliResult<TwistedConfig> {
    let n = args.zeta_order;
    if n == 0 || n % 2 == 0 {
        return Err(Failure::Usage(format!("--zeta-order must be odd and positive, got {n}")));
    }
    if crate::algebra::arith::gcd(args.zeta_k % n, n) != 1 {
        return Err(Failure::Usage(format!("--zeta-k {} must be coprime to --zeta-order {n}", args.zeta_k)));
    }
    let chi = resolve_character(args.d, &args.chi)?;
    Ok(TwistedConfig::new(chi, n, args.zeta_k, args.q.clone())?)
}

#[derive(Serialize)]
struct ConfigParams {
    q: Rational,
    d: u64,
    #[serde(rename = "char")]
    chi: CharacterFile,
    zeta_order: u64,
    zeta_k: u64,
    field_order: u64,
}

fn config_params(cfg: &TwistedConfig) -> ConfigParams {
    ConfigParams {
        q: cfg.q().clone(),
        d: cfg.modulus(),
        chi: cfg.chi().to_file(),
        zeta_order: cfg.zeta_order(),
        zeta_k: cfg.zeta_k(),
        field_order: cfg.field().order(),
    }
}

/// Exit status and document of one command.
struct Emitted {
    code: i32,
    document: String,
}

fn ok(document: String) -> CliResult<Emitted> {
    Ok(Emitted { code: 0, document })
}

fn classic(n: usize, check_oracle: bool) -> CliResult<Emitted> {
    #[derive(Serialize)]
    struct Doc {
        n: usize,
        coeffs: Vec<Rational>,
        #[serde(skip_serializing_if = "Option::is_none")]
        oracle_match: Option<bool>,
    }
    let poly = eulerian_recurrence(n)?;
    let oracle_match = if check_oracle {
        Some(descent_oracle(n)? == poly)
    } else {
        None
    };
    let code = if oracle_match == Some(false) { 1 } else { 0 };
    let doc = Doc {
        n,
        coeffs: poly.into_coeffs(),
        oracle_match,
    };
    Ok(Emitted {
        code,
        document: to_json(&doc)?,
    })
}

fn twisted(args: &ConfigArgs, ns: &[usize], format: Format) -> CliResult<Emitted> {
    #[derive(Serialize)]
    struct Value {
        n: usize,
        cyclotomic: CyclotomicNumber,
        complex: [Float; 2],
    }
    #[derive(Serialize)]
    struct Doc {
        params: ConfigParams,
        values: Vec<Value>,
    }
    let cfg = build_config(args)?;
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let table = twisted_eulerian_table(&cfg, n_max)?;
    let mut values = Vec::with_capacity(ns.len());
    for &n in ns {
        let value = table[n].value.clone();
        let z = value.embed(1)?;
        values.push(Value {
            n,
            cyclotomic: value,
            complex: complex(z),
        });
    }
    match format {
        Format::Json => ok(to_json(&Doc {
            params: config_params(&cfg),
            values,
        })?),
        Format::Csv => {
            let mut out = String::from("n,field_order,coeffs,re,im\n");
            for v in values {
                let coeffs: Vec<String> = v.cyclotomic.coeffs().iter().map(Rational::to_string).collect();
                out.push_str(&format!(
                    "{},{},{},{:.16e},{:.16e}\n",
                    v.n,
                    v.cyclotomic.order(),
                    coeffs.join(" "),
                    v.complex[0].0,
                    v.complex[1].0
                ));
            }
            ok(out)
        }
    }
}

fn integral(n: usize, q: &Rational, p: u64, levels: u32, d: u64, spec: &CharSpec, format: Format) -> CliResult<Emitted> {
    #[derive(Serialize)]
    struct Level {
        #[serde(rename = "N")]
        level: u32,
        #[serde(rename = "S_N")]
        partial: Rational,
        valuation: Valuation,
    }
    #[derive(Serialize)]
    struct Doc {
        n: usize,
        q: Rational,
        p: u64,
        d: u64,
        exact: Rational,
        converges: bool,
        levels: Vec<Level>,
    }
    let chi = if d == 1 { None } else { Some(resolve_character(d, spec)?) };
    let report = padic_truncation(n, chi.as_ref(), q, p, levels)?;
    match format {
        Format::Csv => ok(report.to_csv()?),
        Format::Json => ok(to_json(&Doc {
            n,
            q: q.clone(),
            p,
            d,
            exact: report.exact.clone(),
            converges: report.converges(),
            levels: report
                .levels
                .into_iter()
                .map(|l| Level {
                    level: l.level,
                    partial: l.partial,
                    valuation: l.valuation,
                })
                .collect(),
        })?),
    }
}

fn lfun(args: &ConfigArgs, s: ComplexValue, tol: f64, max_terms: usize) -> CliResult<Emitted> {
    #[derive(Serialize)]
    struct Doc {
        s: [Float; 2],
        value: [Float; 2],
        terms: usize,
        tail_bound: Float,
    }
    let cfg = build_config(args)?;
    let eval = l_eval(&LParams {
        s,
        cfg,
        embedding: 1,
        tol,
        max_terms,
    })?;
    ok(to_json(&Doc {
        s: complex(s),
        value: complex(eval.value),
        terms: eval.terms_used,
        tail_bound: Float(eval.tail_bound),
    })?)
}

fn chars(d: u64) -> CliResult<Emitted> {
    #[derive(Serialize)]
    struct Entry {
        index: usize,
        character_order: u64,
        #[serde(flatten)]
        file: CharacterFile,
    }
    #[derive(Serialize)]
    struct Doc {
        d: u64,
        count: usize,
        characters: Vec<Entry>,
    }
    let all = enumerate_characters(d)?;
    ok(to_json(&Doc {
        d,
        count: all.len(),
        characters: all
            .iter()
            .enumerate()
            .map(|(index, c)| Entry {
                index,
                character_order: c.character_order(),
                file: c.to_file(),
            })
            .collect(),
    })?)
}

fn check(relation: Relation, grid: &str) -> CliResult<Emitted> {
    let grid = match grid {
        "default" => Grid::default(),
        other => {
            let path = other
                .strip_prefix("file:")
                .ok_or_else(|| Failure::Usage(format!("--grid must be default or file:PATH, got {other:?}")))?;
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?;
            Grid::from_json(&text).map_err(|e| Failure::Usage(e.to_string()))?
        }
    };
    let report = run_check(relation, &grid)?;
    Ok(Emitted {
        code: if report.passed() { 0 } else { 1 },
        document: to_json(&report)?,
    })
}

fn dispatch(cli: &Cli) -> CliResult<Emitted> {
    match &cli.command {
        Command::Classic { n, check_oracle } => classic(*n, *check_oracle),
        Command::Twisted { cfg, n, format } => twisted(cfg, &n.0, *format),
        Command::Integral {
            n,
            q,
            p,
            levels,
            d,
            chi,
            format,
        } => integral(*n, q, *p, *levels, *d, chi, *format),
        Command::Lfun { cfg, s, tol, max_terms } => lfun(cfg, *s, *tol, *max_terms),
        Command::Chars { d } => chars(*d),
        Command::Check { relation, grid } => check(*relation, grid),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let emitted = match dispatch(&cli) {
        Ok(e) => e,
        Err(Failure::Usage(msg)) => {
            return Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("error: {msg}\n"),
            }
        }
        Err(Failure::Math(e)) => {
            return Outcome {
                code: 3,
                stdout: String::new(),
                stderr: format!("error: {}: {e}\n", e.name()),
            }
        }
    };
    let mut document = emitted.document;
    if !document.ends_with('\n') {
        document.push('\n');
    }
    match &cli.output {
        None => Outcome {
            code: emitted.code,
            stdout: document,
            stderr: String::new(),
        },
        Some(path) => match std::fs::write(path, document) {
            Ok(()) => Outcome {
                code: emitted.code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            },
        },
    }
}
