use anyhow::{anyhow, bail, Context, Result};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};
use toricdyn::act::{degree_sequence, dyn_degree_estimate, ActConfig};
use toricdyn::equidist::{convergence_report, cstar, log_grid, rational_rotation_control};
use toricdyn::oracle::{oracle_degrees, topological_degree, LineDegreeConfig, PolyMap};
use toricdyn::scalar::{ratio_to_f64, ratio_to_string};
use toricdyn::support::{homogenize, newton_polygon, newton_support, ronkin_function, LaurentPoly, PLFunction};
use toricdyn::tmap::{classify_profile, is_internally_stable, profile, Generator, StabilityVerdict, ToricWord};
use toricdyn::trop::{rotation_angle_linear, rotation_is_rational_linear, RotationClass};
use toricdyn::{Exec, Fan, IntegerMatrix};

use crate::report::{emit, fmt12, Outcome};
use crate::{Cli, Command, Mode, Opts};

fn lib<T>(r: toricdyn::Result<T>) -> Result<T> {
    r.map_err(|e| anyhow!("[{}] {e}", e.code()))
}

fn word(s: &str) -> Result<ToricWord> {
    lib(ToricWord::parse(s)).with_context(|| format!("in word {s:?}"))
}

fn matrix(s: &str) -> Result<IntegerMatrix> {
    let w = word(&format!("m{}", s.trim()))?;
    match w.letters() {
        [Generator::Monomial(a)] => Ok(a.clone()),
        _ => bail!("expected a matrix like [1,-2;2,1], got {s:?}"),
    }
}

fn exec(o: &Opts) -> Exec {
    if o.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn act_config(o: &Opts) -> ActConfig {
    ActConfig { ray_budget: o.budget_rays, ..ActConfig::default() }
}

fn check_budgets(o: &Opts) -> Result<()> {
    if o.budget_rays < 3 || o.budget_degree == 0 || o.n == Some(0) {
        bail!("budgets must be positive (and at least 3 rays)");
    }
    if o.tol.is_some_and(|t| t.is_nan() || t <= 0.0) {
        bail!("--tol must be positive");
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let o = &cli.opts;
    check_budgets(o)?;
    let out = match &cli.command {
        Command::Analyze { word: w } => analyze(w, o)?,
        Command::Degrees { word: w, oracle_check } => degrees(w, *oracle_check, o)?,
        Command::Rotation { word: w } => rotation(w, o)?,
        Command::Stability { word: w } => stability(w, o)?,
        Command::Equidist { a, psi, directions, quad, grid } => equidist(a, psi, *directions, *quad, *grid, o)?,
        Command::OracleCheck { word: w } => oracle_check(w, o)?,
        Command::Newton { poly } => newton(poly, o)?,
        Command::Ronkin { poly, quad, directions } => ronkin(poly, *quad, *directions, o)?,
    };
    let config = json!({ "command": cli.command, "options": o });
    emit(&config, o, &out)?;
    Ok(out)
}

fn degree_value(d: &BigRational, mode: Mode) -> Value {
    match mode {
        Mode::Exact => Value::String(ratio_to_string(d)),
        Mode::Numeric => json!(ratio_to_f64(d)),
    }
}

fn analyze(s: &str, o: &Opts) -> Result<Outcome> {
    let w = word(s)?;
    let p = lib(profile(&w))?;
    let mut notes: Vec<String> = Vec::new();
    let regime = match classify_profile(&p, o.n.unwrap_or(6), o.n.unwrap_or(64) as u64) {
        Ok(r) => Some(r),
        Err(e) => {
            notes.push(format!("regime not classified: [{}] {e}", e.code()));
            None
        }
    };
    let ind_points: u64 = p.ind.iter().map(|i| i.point.len()).sum();
    Outcome::new(json!({
        "profile": p,
        "trop_linear": p.trop.as_linear(),
        "exceptional_curves": p.exc.len(),
        "indeterminate_points": ind_points,
        "stability": regime.as_ref().and_then(|r| r.stability.clone()),
        "regime": regime,
        "notes": notes,
    }))
}

#[derive(Serialize)]
struct OracleRow {
    n: usize,
    class: Value,
    oracle: u64,
    equal: bool,
}

fn compare_with_oracle(w: &ToricWord, degrees: &[BigRational], mode: Mode) -> Result<Vec<OracleRow>> {
    let oracle = lib(oracle_degrees(w, degrees.len(), &LineDegreeConfig::default()))?;
    Ok(degrees
        .iter()
        .zip(oracle)
        .enumerate()
        .map(|(i, (d, od))| OracleRow {
            n: i + 1,
            class: degree_value(d, mode),
            oracle: od,
            equal: d.is_integer() && d.to_integer().to_u64() == Some(od),
        })
        .collect())
}

fn degrees(s: &str, with_oracle: bool, o: &Opts) -> Result<Outcome> {
    let w = word(s)?;
    let n = o.n.unwrap_or(6);
    let p = lib(profile(&w))?;
    let stab = if p.verified { is_internally_stable(&p, n as u64).ok() } else { None };
    let seq = degree_sequence(&w, n, stab.as_ref(), &act_config(o));
    let est = dyn_degree_estimate(&seq.degrees, &p.dtop).ok();
    let rows = if with_oracle { Some(compare_with_oracle(&w, &seq.degrees, o.mode)?) } else { None };
    let d = seq.as_f64();
    let mut csv = Vec::new();
    for (i, x) in seq.degrees.iter().enumerate() {
        let mut r = vec![
            (i + 1).to_string(),
            match o.mode {
                Mode::Exact => ratio_to_string(x),
                Mode::Numeric => fmt12(d[i]),
            },
            if i == 0 { String::new() } else { fmt12(d[i] / d[i - 1]) },
            fmt12(d[i].powf(1.0 / (i + 1) as f64)),
        ];
        if let Some(rows) = &rows {
            r.push(rows[i].oracle.to_string());
            r.push(rows[i].equal.to_string());
        }
        csv.push(r);
    }
    let head = if rows.is_some() {
        vec!["n", "degree", "ratio", "root", "oracle", "equal"]
    } else {
        vec!["n", "degree", "ratio", "root"]
    };
    let passed = rows.as_ref().is_none_or(|r| r.iter().all(|x| x.equal));
    let degrees: Vec<Value> = seq.degrees.iter().map(|x| degree_value(x, o.mode)).collect();
    let mut out = Outcome::new(json!({
        "word": w.to_string(),
        "dtop": p.dtop.to_string(),
        "degrees": degrees,
        "flags": seq.flags,
        "truncated": seq.truncated,
        "max_rays": seq.max_rays,
        "stability": stab,
        "estimate": est,
        "oracle": rows,
    }))?;
    out.csv = Some((head, csv));
    out.passed = passed;
    Ok(out)
}

/// Distance on R/Z.
fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn rotation(s: &str, o: &Opts) -> Result<Outcome> {
    let w = word(s)?;
    let t = lib(w.trop())?;
    let n = o.n.unwrap_or(10_000);
    let (estimate, bound) = lib(t.rotation_number(n))?;
    let exact = t.as_linear().map(|a| lib(rotation_is_rational_linear(a))).transpose()?;
    let certified: Option<f64> = match (exact, t.as_linear()) {
        (Some(RotationClass::Rational { p, q }), _) => Some(p as f64 / q as f64),
        (Some(RotationClass::RealEigenvalues { rotation: Some((p, q)) }), _) => Some(p as f64 / q as f64),
        (Some(RotationClass::IrrationalCertified), Some(a)) => Some(rotation_angle_linear(a)),
        _ => None,
    };
    let agree = certified.map(|c| circle_dist(c, estimate) <= bound);
    let mut out = Outcome::new(json!({
        "word": w.to_string(),
        "class": exact,
        "estimate": estimate,
        "error_bound": bound,
        "n": n,
        "certified_value": certified,
        "agrees": agree,
    }))?;
    out.passed = agree != Some(false);
    Ok(out)
}

fn stability(s: &str, o: &Opts) -> Result<Outcome> {
    let w = word(s)?;
    let p = lib(profile(&w))?;
    let budget = o.n.unwrap_or(64) as u64;
    let exact = lib(is_internally_stable(&p, budget))?;
    // cross-check (fⁿ)* against (f*)ⁿ on degrees for a few n when not certified
    let check_n = budget.min(4) as usize;
    let mut witness = None;
    let mut rows = None;
    if !matches!(exact, StabilityVerdict::CertifiedStable { .. }) {
        let seq = degree_sequence(&w, check_n, None, &act_config(o));
        let r = compare_with_oracle(&w, &seq.degrees, o.mode)?;
        witness = r.iter().find(|x| !x.equal).map(|x| x.n as u64);
        rows = Some(r);
    }
    let verdict = match (&exact, witness) {
        (StabilityVerdict::Unstable { .. }, _) => exact.clone(),
        (_, Some(n)) => StabilityVerdict::Unstable { n },
        _ => exact.clone(),
    };
    let method = match (&exact, witness) {
        (StabilityVerdict::Unstable { .. }, _) => "exact point descent",
        (_, Some(_)) => "degree mismatch against the oracle",
        (StabilityVerdict::CertifiedStable { .. }, _) => "exact",
        _ => "bounded search",
    };
    Outcome::new(json!({
        "word": p.word.to_string(),
        "verdict": verdict,
        "method": method,
        "exact_check": exact,
        "oracle_witness": witness,
        "oracle_rows": rows,
        "notes": p.notes,
    }))
}

fn parse_psi(s: &str) -> Result<PLFunction<f64>> {
    let vals: Vec<f64> = if s == "line" {
        vec![0.0, 0.0, 1.0]
    } else {
        s.split(',').map(|t| t.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().with_context(|| {
            format!("--psi expects \"line\" or three values on the P2 rays, got {s:?}")
        })?
    };
    lib(PLFunction::new(Fan::p2(), vals))
}

fn equidist(a: &str, psi: &str, directions: usize, quad: usize, grid: usize, o: &Opts) -> Result<Outcome> {
    let a = matrix(a)?;
    let psi = parse_psi(psi)?;
    let n = o.n.unwrap_or(10_000);
    let tol = o.tol.unwrap_or(1e-2);
    if directions == 0 || quad < 2 || grid < 2 {
        bail!("--directions, --quad and --grid must be positive");
    }
    let e = exec(o);
    let rep = lib(convergence_report(&psi, &a, directions, &log_grid(n, grid), e))?;
    let c1 = lib(cstar(&psi, &a, quad, e))?;
    let c2 = lib(cstar(&psi, &a, 2 * quad, e))?;
    let control = match lib(rotation_is_rational_linear(&a))? {
        RotationClass::Rational { .. } => Some(lib(rational_rotation_control(&psi, &a, directions, tol))?),
        _ => None,
    };
    let csv = rep.rows.iter().map(|(n, e)| vec![n.to_string(), fmt12(*e)]).collect();
    let passed = rep.final_error < tol && rep.decreasing;
    let mut out = Outcome::new(json!({
        "matrix": a,
        "psi": psi,
        "n": n,
        "tol": tol,
        "report": rep,
        "cstar_quadrature": { "nodes": quad, "value": c1, "doubled": c2, "difference": (c1 - c2).abs() },
        "negative_control": control,
    }))?;
    out.csv = Some((vec!["n", "e_n"], csv));
    out.passed = passed;
    Ok(out)
}

fn oracle_check(s: &str, o: &Opts) -> Result<Outcome> {
    let w = word(s)?;
    let n = o.n.unwrap_or(5);
    let seq = degree_sequence(&w, n, None, &act_config(o));
    let rows = compare_with_oracle(&w, &seq.degrees, o.mode)?;
    let p = lib(profile(&w))?;
    let dtop = match PolyMap::from_word(&w, o.budget_degree) {
        Ok(f) => Some(lib(topological_degree(&f))?),
        Err(_) => None,
    };
    let dtop_equal = dtop.map(|d| p.dtop.to_u64() == Some(d));
    let csv = rows
        .iter()
        .map(|r| {
            let c = match &r.class {
                Value::String(s) => s.clone(),
                v => v.to_string(),
            };
            vec![r.n.to_string(), c, r.oracle.to_string(), r.equal.to_string()]
        })
        .collect();
    let passed = rows.iter().all(|r| r.equal) && dtop_equal != Some(false) && !seq.truncated;
    let mut out = Outcome::new(json!({
        "word": w.to_string(),
        "rows": rows,
        "truncated": seq.truncated,
        "dtop": { "profile": p.dtop.to_string(), "oracle": dtop, "equal": dtop_equal },
    }))?;
    out.csv = Some((vec!["n", "class", "oracle", "equal"], csv));
    out.passed = passed;
    Ok(out)
}

fn laurent(s: &str) -> Result<LaurentPoly> {
    lib(LaurentPoly::parse(s)).with_context(|| format!("in polynomial {s:?}"))
}

fn newton(s: &str, o: &Opts) -> Result<Outcome> {
    let p = laurent(s)?;
    let psi = lib(newton_support(&p))?;
    let support = match o.mode {
        Mode::Exact => serde_json::to_value(&psi)?,
        Mode::Numeric => serde_json::to_value(psi.to_f64())?,
    };
    Outcome::new(json!({
        "poly": p.to_string(),
        "polygon": newton_polygon(&p),
        "support": support,
        "kinks": psi.kink_fan(),
        "degree": degree_value(&psi.degree(), o.mode),
    }))
}

fn ronkin(s: &str, quad: usize, directions: usize, o: &Opts) -> Result<Outcome> {
    let p = laurent(s)?;
    let tol = o.tol.unwrap_or(1e-3);
    if directions == 0 {
        bail!("--directions must be positive");
    }
    let bar = lib(newton_support(&p))?.to_f64();
    let hom = lib(homogenize(&ronkin_function(&p, quad), 1e-9, 64))?;
    let rows: Vec<(usize, f64, f64, f64)> = exec(o).map_range(directions, |k| {
        let t = std::f64::consts::TAU * k as f64 / directions as f64;
        let u = [t.cos(), t.sin()];
        (k, t, hom.eval(u), bar.eval_f64(u))
    });
    let max_dev = rows.iter().map(|r| (r.2 - r.3).abs()).fold(0.0, f64::max);
    let csv = rows
        .iter()
        .map(|r| vec![r.0.to_string(), fmt12(r.1), fmt12(r.2), fmt12(r.3), fmt12((r.2 - r.3).abs())])
        .collect();
    let table: Vec<Value> = rows.iter().map(|r| json!({ "angle": r.1, "ronkin": r.2, "newton": r.3 })).collect();
    let mut out = Outcome::new(json!({
        "poly": p.to_string(),
        "quadrature": quad,
        "directions": directions,
        "max_deviation": max_dev,
        "tol": tol,
        "rows": table,
        "ronkin_at_origin": lib(toricdyn::support::ronkin(&p, [0.0, 0.0], quad, exec(o)))?.value,
        "degree": bar.degree(),
    }))?;
    out.csv = Some((vec!["direction", "angle", "ronkin", "newton", "deviation"], csv));
    out.passed = max_dev < tol;
    Ok(out)
}
