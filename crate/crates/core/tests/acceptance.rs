use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::Value;
use twisted_eulerian::algebra::arith::{euler_phi, lcm};
use twisted_eulerian::algebra::{ComplexValue, CyclotomicField, CyclotomicNumber, Rational, Valuation};
use twisted_eulerian::characters::{enumerate_characters, DirichletCharacter};
use twisted_eulerian::checks::{run_check, Grid, Relation};
use twisted_eulerian::eulerian::{descent_oracle, eulerian_recurrence};
use twisted_eulerian::fermionic::{alternating_sum_convergence, padic_truncation, poly_twist_integral, IntegralSpec};
use twisted_eulerian::lfunction::{interpolation_check, l_eval, LParams};
use twisted_eulerian::twisted::{euler_gf_consistency, euler_decomposition_check, twisted_a_values, twisted_euler_polynomial, TwistedConfig};

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fact(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * Rational::from(k))
}

fn sign(n: usize) -> Rational {
    if n % 2 == 0 {
        Rational::one()
    } else {
        Rational::from(-1)
    }
}

fn check_clean(relation: Relation, grid: &Grid, allow_skips: bool) -> Outcome {
    let report = run_check(relation, grid).map_err(|e| e.to_string())?;
    let bad: Vec<_> = report
        .points
        .iter()
        .filter(|p| !matches!(p.verdict, twisted_eulerian::checks::Verdict::Pass))
        .filter(|p| !(allow_skips && matches!(p.verdict, twisted_eulerian::checks::Verdict::Skip)))
        .map(|p| format!("{} {:?} {:?}", p.key, p.verdict, p.reason))
        .collect();
    ensure(report.summary.points > 0 && bad.is_empty(), || {
        format!("{relation}: {} bad of {}: {:?}", bad.len(), report.summary.points, &bad[..bad.len().min(5)])
    })
}

fn ac1() -> Outcome {
    for n in 1..=8 {
        let a = eulerian_recurrence(n).map_err(|e| e.to_string())?;
        ensure(a == descent_oracle(n).map_err(|e| e.to_string())?, || format!("oracle mismatch at n={n}"))?;
        ensure(a.eval(&Rational::one()) == fact(n), || format!("A_{n}(1) != {n}!"))?;
        let c = a.coeffs();
        ensure(c.iter().eq(c.iter().rev()), || format!("asymmetric at n={n}"))?;
    }
    Ok(())
}

fn ac2() -> Outcome {
    for q in [Rational::from(2), Rational::from(3), Rational::frac(5, 2)] {
        for n in 0..=8 {
            let spec = IntegralSpec::new(n, Rational::zero(), Rational::one(), q.inverse().unwrap()).unwrap();
            let lhs = poly_twist_integral(&spec).map_err(|e| e.to_string())?;
            let a = eulerian_recurrence(n).unwrap().eval(&-&q);
            let rhs = sign(n) * a / (Rational::one() + &q).powu(n as u64);
            ensure(lhs == rhs, || format!("n={n} q={q}: {lhs} != {rhs}"))?;
        }
    }
    Ok(())
}

fn ac3() -> Outcome {
    let grid = Grid {
        n: (0..=6).collect(),
        ..Grid::default()
    };
    check_clean(Relation::Thm2, &grid, false)
}

fn ac4() -> Outcome {
    for d in [3u64, 5] {
        for chi in enumerate_characters(d).unwrap() {
            for zeta_order in [1u64, 3] {
                for q in [2i64, 3] {
                    let cfg = TwistedConfig::new(chi.clone(), zeta_order, 1, Rational::from(q)).unwrap();
                    for n in 0..=5 {
                        let c = interpolation_check(&cfg, n, 1e-9, 1).map_err(|e| e.to_string())?;
                        ensure(c.pass, || format!("d={d} zeta={zeta_order} q={q} n={n}: gap {:e}", c.gap))?;
                    }
                }
            }
        }
    }
    let cfg = TwistedConfig::new(DirichletCharacter::quadratic(3).unwrap(), 1, 1, Rational::from(2)).unwrap();
    let a = twisted_a_values(&cfg, 2).unwrap();
    let expected = [-4i64, 12, -12];
    for n in 0..=2 {
        ensure(a[n].as_rational() == Some(Rational::from(expected[n])), || format!("A_{n} = {:?}", a[n]))?;
        let target = sign(n).to_f64() * expected[n] as f64;
        let l = l_eval(&LParams::new(ComplexValue::new(-(n as f64), 0.0), cfg.clone())).unwrap();
        ensure((l.value - ComplexValue::new(target, 0.0)).norm() < 1e-9, || format!("L(-{n}) = {}", l.value))?;
    }
    Ok(())
}

fn ac5() -> Outcome {
    check_clean(Relation::Distribution, &Grid::default(), false)
}

fn ac6() -> Outcome {
    let grid = Grid::default();
    check_clean(Relation::Thm1Residual, &grid, false)?;
    check_clean(Relation::Thm5Residual, &grid, false)?;
    ensure(grid.moduli == [1, 3, 5], || "grid moduli changed".into())?;
    check_clean(Relation::Eq28Residual, &grid, false)
}

fn ac7() -> Outcome {
    for d in [3u64, 5] {
        for chi in enumerate_characters(d).unwrap() {
            for zeta_order in [1u64, 3] {
                for n in 0..=5 {
                    let r = euler_decomposition_check(&chi, zeta_order, 1, n).map_err(|e| e.to_string())?;
                    ensure(r.equal, || format!("d={d} zeta={zeta_order} n={n}: {:?} != {:?}", r.lhs, r.rhs))?;
                }
            }
        }
    }
    let r = euler_decomposition_check(&DirichletCharacter::quadratic(3).unwrap(), 1, 1, 0).unwrap();
    let two = Some(Rational::from(-2));
    ensure(r.lhs.as_rational() == two && r.rhs.as_rational() == two, || format!("anchor {:?} {:?}", r.lhs, r.rhs))
}

fn ac8() -> Outcome {
    for p in [3u64, 5] {
        let q = Rational::from(1 + p as i64);
        let chars = [None, Some(DirichletCharacter::quadratic(3).unwrap()), Some(DirichletCharacter::quadratic(5).unwrap())];
        for chi in &chars {
            let label = chi.as_ref().map_or("none".to_string(), |c| format!("quadratic mod {}", c.modulus()));
            for n in 0..=4 {
                let t = padic_truncation(n, chi.as_ref(), &q, p, 4).map_err(|e| e.to_string())?;
                ensure(t.converges() && t.is_monotone(), || format!("p={p} chi={label} n={n}: {:?}", t.levels))?;
                if let Some(chi) = chi {
                    let s = alternating_sum_convergence(n, chi, &q, p, 4).map_err(|e| e.to_string())?;
                    ensure(s.truncation.converges(), || format!("alternating p={p} chi={label} n={n}"))?;
                    if let Some(r) = &s.claimed_ratio {
                        ensure(*r == q.powu(2), || format!("ratio {r}"))?;
                    }
                }
            }
        }
    }
    let t = padic_truncation(1, None, &Rational::from(4), 3, 1).unwrap();
    let level = &t.levels[1];
    ensure(
        &level.partial - &t.exact == Rational::frac(3, 65) && level.valuation == Valuation::Finite(1),
        || format!("anchor S_1 = {} exact {} v = {:?}", level.partial, t.exact, level.valuation),
    )
}

fn ac9() -> Outcome {
    for d in [1u64, 3, 5] {
        for order in [1u64, 3, 9] {
            let field = CyclotomicField::new(order).unwrap();
            let zeta = CyclotomicNumber::generator(&field);
            let r = euler_gf_consistency(d, &zeta, 12).map_err(|e| e.to_string())?;
            ensure(r.telescopes && r.matches_moments, || format!("d={d} zeta={order}"))?;
        }
    }
    let one = Rational::one();
    let e0 = twisted_euler_polynomial(0, &one, &Rational::zero()).unwrap();
    let e1 = twisted_euler_polynomial(1, &one, &Rational::zero()).unwrap();
    ensure(e0 == one && e1 == Rational::frac(-1, 2), || format!("E_0 = {e0}, E_1 = {e1}"))
}

fn ac10() -> Outcome {
    for d in [1u64, 3, 5, 9, 15, 27] {
        let chars = enumerate_characters(d).map_err(|e| e.to_string())?;
        ensure(chars.len() as u64 == euler_phi(d), || format!("d={d}: {} characters", chars.len()))?;
        let order = chars.iter().fold(1, |acc, c| lcm(acc, c.value_order()));
        let field = CyclotomicField::new(order).unwrap();
        let value = |c: &DirichletCharacter, a: i64| c.value_in(&field, a).unwrap();
        for chi in &chars {
            let sum = (0..d as i64).fold(CyclotomicNumber::zero(&field), |acc, a| &acc + &value(chi, a));
            let expected = if chi.is_principal() { euler_phi(d) as i64 } else { 0 };
            ensure(sum.as_rational() == Some(Rational::from(expected)), || format!("d={d} row sum {sum:?}"))?;
        }
        for a in 0..d as i64 {
            let sum = chars.iter().fold(CyclotomicNumber::zero(&field), |acc, c| &acc + &value(c, a));
            let expected = if a % d as i64 == 1 % d as i64 { euler_phi(d) as i64 } else { 0 };
            ensure(sum.as_rational() == Some(Rational::from(expected)), || format!("d={d} a={a} column sum {sum:?}"))?;
        }
    }
    Ok(())
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_twisted-eulerian")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn ac11() -> Outcome {
    let args = ["twisted", "--q", "5/2", "--d", "5", "--char", "index:1", "--zeta-order", "9", "--n", "0-4"];
    let (code, first) = cli(&args);
    ensure(code == 0 && cli(&args).1 == first, || "twisted output not deterministic".into())?;
    let doc: Value = serde_json::from_str(&first).map_err(|e| e.to_string())?;
    let cfg = TwistedConfig::new(enumerate_characters(5).unwrap().remove(1), 9, 1, Rational::frac(5, 2)).unwrap();
    let exact = twisted_a_values(&cfg, 4).unwrap();
    for (entry, value) in doc["values"].as_array().unwrap().iter().zip(&exact) {
        let parsed: CyclotomicNumber = serde_json::from_value(entry["cyclotomic"].clone()).map_err(|e| e.to_string())?;
        ensure(&parsed == value, || format!("round trip {parsed:?} != {value:?}"))?;
    }
    let reparsed: Value = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    ensure(reparsed == doc, || "json re-serialization differs".into())?;

    let codes = [
        (cli(&["classic", "--n", "5"]).0, 0),
        (cli(&["check", "--relation", "eq15", "--grid", "nowhere"]).0, 2),
        (cli(&["lfun", "--q", "1", "--d", "3", "--char", "quadratic", "--s", "0"]).0, 3),
    ];
    for (got, want) in codes {
        ensure(got == want, || format!("exit code {got}, expected {want}"))?;
    }
    let dir = std::env::temp_dir().join(format!("acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let grid = dir.join("singular.json");
    std::fs::write(&grid, r#"{"n":[1],"q":["-1"]}"#).map_err(|e| e.to_string())?;
    let failing = cli(&["check", "--relation", "eq15", "--grid", &format!("file:{}", grid.display())]).0;
    let _ = std::fs::remove_dir_all(&dir);
    ensure(failing == 1, || format!("failing check exited {failing}"))?;

    let start = Instant::now();
    for relation in Relation::ALL {
        let name = relation.to_string();
        let (code, out) = cli(&["check", "--relation", &name, "--grid", "default"]);
        let doc: Value = serde_json::from_str(&out).map_err(|e| format!("{name}: {e}"))?;
        ensure(code == 0 && doc["summary"]["failed"] == 0, || format!("{name}: exit {code} {}", doc["summary"]))?;
        ensure(doc["summary"]["points"].as_u64().unwrap_or(0) > 0, || format!("{name}: no points"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("checks took {elapsed:?}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, Option<u64>, fn() -> Outcome); 11] = [
        ("AC01", "classical Eulerian recurrence vs descent oracle", Some(10), ac1),
        ("AC02", "exact Witt formula", None, ac2),
        ("AC03", "generating function vs power-sum closed form", None, ac3),
        ("AC04", "L-series interpolation at negative integers", Some(30), ac4),
        ("AC05", "distribution identity", None, ac5),
        ("AC06", "normalization residual q^2", None, ac6),
        ("AC07", "Euler decomposition at q = 1", None, ac7),
        ("AC08", "p-adic convergence", Some(60), ac8),
        ("AC09", "twisted Euler generating function", None, ac9),
        ("AC10", "character enumeration and orthogonality", None, ac10),
        ("AC11", "CLI contract and all check relations", Some(300), ac11),
    ];
    let mut failures = 0;
    for (id, title, limit, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| match limit {
            Some(secs) if elapsed > Duration::from_secs(secs) => Err(format!("over the {secs} s budget")),
            _ => Ok(()),
        });
        match outcome {
            Ok(()) => println!("{id} {title}: PASS ({:.2} s)", elapsed.as_secs_f64()),
            Err(why) => {
                failures += 1;
                println!("{id} {title}: FAIL ({:.2} s) {why}", elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
