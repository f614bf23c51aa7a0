//! One function per subcommand. Each returns the rendered output and whether
//! every residual stayed within tolerance.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use moddouble::exec::{self, Exec};
use moddouble::kernel::{identity_grid, peq_residuals, phi_csv, residual_csv, square_grid, IdentityKind, GRID_OFFSET};
use moddouble::params::{central_charge, ParamsRecord, Regime};
use moddouble::qdilog::GammaRow;
use moddouble::representation::inner::{
    centered_basis, continuous_series_check, default_test_pair, gram_matrix, hermiticity_on_grid, region_center,
    WeightedGrid, DEFAULT_SIGMA, HERMITIAN_PAIRS,
};
use moddouble::representation::GepFunction;
use moddouble::suite;
use moddouble::weyl::{self, AlgebraElement};
use moddouble::Error;

use crate::config::{CommandName, Format, RunConfig, WeightArg};
use crate::error::ConfigError;

pub enum Body {
    Json(Value),
    Csv(String),
}

pub struct Outcome {
    pub body: Body,
    pub passed: bool,
    /// One human-readable line for stderr.
    pub summary: String,
}

#[derive(Serialize)]
struct Report<'a> {
    command: CommandName,
    config: &'a RunConfig,
    params: ParamsRecord,
    passed: bool,
    result: Value,
}

fn report(cfg: &RunConfig, passed: bool, result: Value, summary: String) -> Result<Outcome, ConfigError> {
    let spin = cfg.spin()?;
    let r = Report {
        command: cfg.command,
        config: cfg,
        params: ParamsRecord::new(&cfg.params, Some(&spin)),
        passed,
        result,
    };
    let value = serde_json::to_value(&r).expect("report serializes");
    Ok(Outcome {
        body: Body::Json(value),
        passed,
        summary,
    })
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let exec = Exec::default();
    match cfg.command {
        CommandName::Params => params(cfg),
        CommandName::SymbolicCheck => symbolic_check(cfg),
        CommandName::GammaEval => gamma_eval(cfg, exec),
        CommandName::GammaCheck => gamma_check(cfg, exec),
        CommandName::Zeros => zeros(cfg, exec),
        CommandName::PhiEval => phi_eval(cfg, exec),
        CommandName::KernelCheck => kernel_check(cfg, exec),
        CommandName::HermCheck => herm_check(cfg, exec),
        CommandName::Gram => gram(cfg, exec),
        CommandName::ContinuousCheck => continuous_check(cfg),
        CommandName::Suite => run_suite(cfg, exec),
    }
}

fn params(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let p = &cfg.params;
    let defects: serde_json::Map<String, Value> = p
        .invariant_defects()
        .into_iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    let worst = p.max_invariant_defect();
    let result = json!({
        "omega_pp": p.omega_pp(),
        "q_tilde": p.q_tilde(),
        "central_charge": central_charge(p.tau())?,
        "invariant_defects": defects,
        "max_invariant_defect": worst,
    });
    let passed = worst <= cfg.tol;
    report(cfg, passed, result, format!("max invariant defect {worst:.3e}"))
}

fn symbolic_check(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let names = ["KE - q^2 EK", "KF - q^-2 FK", "EF - FE - (K - K^-1)/(q - q^-1)"];
    let mut entries: Vec<(String, AlgebraElement)> = weyl::relation_residuals()
        .into_iter()
        .zip(names)
        .map(|(r, n)| (n.to_string(), r))
        .collect();
    let c = weyl::casimir();
    let central = &AlgebraElement::z(1) + &AlgebraElement::z(-1);
    entries.push(("C + Z + Z^-1".to_string(), &c + &central));
    let passed = entries.iter().all(|(_, r)| r.is_zero());
    let relations: Vec<Value> = entries
        .iter()
        .map(|(n, r)| json!({ "relation": n, "nonzero_terms": r.len(), "text": r.canonical_text() }))
        .collect();
    let verdict = if passed { "exact zero" } else { "nonzero" };
    let result = json!({
        "residuals": verdict,
        "relations": relations,
        "casimir": c.canonical_text(),
    });
    report(cfg, passed, result, format!("residuals: {verdict}"))
}

/// Points where evaluation was refused, with the reason.
type Failures = Vec<(Complex64, Error)>;

fn gamma_rows(cfg: &RunConfig, exec: Exec) -> Result<(Vec<GammaRow>, Failures), ConfigError> {
    let dilog = cfg.dilog()?;
    let points = cfg.grid.points(cfg.params.mu());
    let results = exec::map(exec, &points, |&zeta| {
        Ok::<_, Error>(GammaRow {
            zeta,
            gamma: dilog.gamma(zeta)?,
            d1_residual: dilog.d1_residual(zeta)?,
            d2_residual: dilog.d2_residual(zeta)?,
        })
    });
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for (z, r) in points.into_iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failed.push((z, e)),
        }
    }
    Ok((rows, failed))
}

fn failures_json(failed: &[(Complex64, Error)]) -> Value {
    Value::Array(
        failed
            .iter()
            .map(|(z, e)| json!({ "point": z, "error": e.to_string() }))
            .collect(),
    )
}

fn gamma_eval(cfg: &RunConfig, exec: Exec) -> Result<Outcome, ConfigError> {
    let (rows, failed) = gamma_rows(cfg, exec)?;
    let worst = max_of(rows.iter().map(|r| r.d1_residual.max(r.d2_residual)));
    let passed = failed.is_empty() && worst <= cfg.tol;
    let summary = format!(
        "{} rows, {} skipped, max residual {worst:.3e}",
        rows.len(),
        failed.len()
    );
    match cfg.format {
        Format::Csv => {
            let mut out = String::from(GammaRow::csv_header());
            out.push('\n');
            for r in &rows {
                out.push_str(&r.to_csv());
                out.push('\n');
            }
            Ok(Outcome {
                body: Body::Csv(out),
                passed,
                summary,
            })
        }
        Format::Json => {
            let table: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "zeta": r.zeta, "gamma": r.gamma, "d1": r.d1_residual, "d2": r.d2_residual }))
                .collect();
            let result = json!({ "rows": table, "failed": failures_json(&failed), "max_residual": worst });
            report(cfg, passed, result, summary)
        }
    }
}

fn gamma_check(cfg: &RunConfig, exec: Exec) -> Result<Outcome, ConfigError> {
    let (rows, failed) = gamma_rows(cfg, exec)?;
    let dilog = cfg.dilog()?;
    let points = cfg.grid.points(cfg.params.mu());
    let shift = exec::map(exec, &points, |&z| dilog.shift_relation_residual(z));
    let shift_ok: Vec<f64> = shift.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
    let d1 = max_of(rows.iter().map(|r| r.d1_residual));
    let d2 = max_of(rows.iter().map(|r| r.d2_residual));
    let sr = max_of(shift_ok.iter().copied());
    let shift_failed = shift.len() - shift_ok.len();
    let passed = failed.is_empty() && shift_failed == 0 && d1.max(d2).max(sr) <= cfg.tol;
    let result = json!({
        "points": points.len(),
        "d1_max": d1,
        "d2_max": d2,
        "shift_relation_max": sr,
        "failed": failures_json(&failed),
        "shift_relation_failed": shift_failed,
        "calibration": dilog.calibration(),
        "strip_half_width": dilog.strip_half_width(),
    });
    report(cfg, passed, result, format!("d1 {d1:.3e}, d2 {d2:.3e}, shift {sr:.3e}"))
}

fn zeros(cfg: &RunConfig, exec: Exec) -> Result<Outcome, ConfigError> {
    if cfg.level == 0 {
        return Err(ConfigError::Core(Error::NonPositiveSpin(0)));
    }
    if cfg.regime != Regime::II {
        return Err(ConfigError::Core(Error::RequiresRegimeII));
    }
    let dilog = cfg.dilog()?;
    let (windings, error) = match dilog.level_windings(cfg.level, exec) {
        Ok(w) => (w, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let count: i64 = windings.iter().map(|(_, w)| w).sum();
    let passed = error.is_none() && count == cfg.level as i64 && windings.iter().all(|(_, w)| *w == 1);
    let points: Vec<Value> = windings
        .iter()
        .map(|(z, w)| json!({ "point": z, "winding": w }))
        .collect();
    let result = json!({
        "level": cfg.level,
        "count": count,
        "predicted": points,
        "error": error,
    });
    report(cfg, passed, result, format!("level {} count {count}", cfg.level))
}

fn phi_eval(cfg: &RunConfig, exec: Exec) -> Result<Outcome, ConfigError> {
    let ys = cfg.grid.line(cfg.params.mu())?;
    let spec = cfg.weight_spec()?;
    let csv = match phi_csv(&spec, &ys, exec) {
        Ok(csv) => csv,
        Err(e) => {
            return Ok(Outcome {
                body: Body::Csv(String::new()),
                passed: false,
                summary: format!("evaluation failed: {e}"),
            })
        }
    };
    let values: Vec<(f64, f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().expect("own CSV")).collect();
            (v[0], v[1], v[2])
        })
        .collect();
    let (min, argmin) = values.iter().fold(
        (f64::INFINITY, f64::NAN),
        |acc, &(y, re, _)| if re < acc.0 { (re, y) } else { acc },
    );
    // Positivity is a claim about the discrete product weight in Regime II only.
    let asserted = cfg.regime == Regime::II && cfg.weight == WeightArg::Product;
    let passed = !asserted || min >= -cfg.tol;
    let summary = format!("{} samples, min Re Phi {min:.6e} at y = {argmin:.6e}", values.len());
    match cfg.format {
        Format::Csv => Ok(Outcome {
            body: Body::Csv(csv),
            passed,
            summary,
        }),
        Format::Json => {
            let rows: Vec<Value> = values.iter().map(|&(y, re, im)| json!([y, re, im])).collect();
            let result = json!({
                "columns": ["y", "re_phi", "im_phi"],
                "rows": rows,
                "min_re_phi": min,
                "argmin_y": argmin,
                "positivity_asserted": asserted,
            });
            report(cfg, passed, result, summary)
        }
    }
}

fn kernel_check(cfg: &RunConfig, exec: Exec) -> Result<Outcome, ConfigError> {
    let spec = cfg.weight_spec()?;
    let ws = square_grid(cfg.points * cfg.points, 1.0);
    let zs: Vec<Complex64> = ws.iter().map(|&w| w + GRID_OFFSET).collect();
    let kinds = [
        (IdentityKind::K, "K"),
        (IdentityKind::E, "E"),
        (IdentityKind::DualK, "dual K"),
        (IdentityKind::DualE, "dual E"),
    ];
    let mut passed = true;
    let mut identities = Vec::new();
    let mut csv = String::from("identity,re_w,im_w,re_z,im_z,residual\n");
    let mut worst: f64 = 0.0;
    for (kind, label) in kinds {
        match identity_grid(kind, &spec, &ws, &zs, exec) {
            Ok(g) => {
                let m = g.max_residual();
                worst = worst.max(m);
                passed &= m <= cfg.tol && g.skipped.is_empty();
                identities.push(json!({ "identity": label, "max_residual": m, "points": g.points.len(), "skipped": g.skipped.len() }));
                for line in residual_csv(&g.points).lines().skip(1) {
                    csv.push_str(label);
                    csv.push(',');
                    csv.push_str(line);
                    csv.push('\n');
                }
            }
            Err(e) => {
                passed = false;
                identities.push(json!({ "identity": label, "error": e.to_string() }));
            }
        }
    }
    let ts = square_grid(100, 1.0);
    let peq = exec::map(exec, &ts, |&t| peq_residuals(t, &spec));
    let (mut r1, mut r2, mut skipped) = (0.0f64, 0.0f64, 0usize);
    for r in &peq {
        match r {
            Ok((a, b)) => {
                r1 = r1.max(*a);
                r2 = r2.max(*b);
            }
            Err(_) => skipped += 1,
        }
    }
    passed &= r1.max(r2) <= cfg.tol && skipped == 0;
    let summary = format!("max identity residual {worst:.3e}, shift equations {:.3e}", r1.max(r2));
    match cfg.format {
        Format::Csv => Ok(Outcome {
            body: Body::Csv(csv),
            passed,
            summary,
        }),
        Format::Json => {
            let result = json!({
                "grid": { "w_points": ws.len(), "z_points": zs.len(), "half_width": 1.0, "z_offset": GRID_OFFSET },
                "identities": identities,
                "shift_equations": { "points": ts.len(), "first": r1, "second": r2, "skipped": skipped },
            });
            report(cfg, passed, result, summary)
        }
    }
}

fn herm_check(cfg: &RunConfig, exec: Exec) -> Result<Outcome, ConfigError> {
    let spec = cfg.weight_spec()?;
    let dom = cfg.domain_spec()?;
    let yc = region_center(&dom, &cfg.params)?;
    let (f, g) = default_test_pair(DEFAULT_SIGMA, yc)?;
    let rect = dom.rectangle(&cfg.params)?;
    let grid = WeightedGrid::build(&dom, &spec, exec)?;
    let mut passed = true;
    let mut pairs = Vec::new();
    let mut worst: f64 = 0.0;
    for pair in HERMITIAN_PAIRS {
        let label = format!("({},{})", pair.0, pair.1);
        match hermiticity_on_grid(pair, &f, &g, &grid, &spec, exec) {
            Ok(h) => {
                passed &= h.residual <= cfg.tol;
                worst = worst.max(h.residual);
                pairs.push(json!({ "pair": label, "lhs": h.lhs, "rhs": h.rhs, "residual": h.residual }));
            }
            Err(e) => {
                passed = false;
                pairs.push(json!({ "pair": label, "error": e.to_string() }));
            }
        }
    }
    let result = json!({
        "domain": dom,
        "rectangle": rect,
        "quadrature_nodes": grid.len(),
        "test_functions": { "sigma": DEFAULT_SIGMA, "y_center": yc, "f": f, "g": g },
        "pairs": pairs,
    });
    report(cfg, passed, result, format!("max Hermiticity residual {worst:.3e}"))
}

fn gram(cfg: &RunConfig, exec: Exec) -> Result<Outcome, ConfigError> {
    let spec = cfg.weight_spec()?;
    let dom = cfg.domain_spec()?;
    let yc = region_center(&dom, &cfg.params)?;
    let basis = centered_basis(DEFAULT_SIGMA, yc, cfg.basis)?;
    let (result, passed, summary) = match gram_matrix(&basis, &dom, &spec, exec) {
        Ok(g) => {
            let ratio = g.min_eigenvalue / g.max_eigenvalue;
            let passed = ratio >= -cfg.tol;
            let summary = format!(
                "min/max eigenvalue {ratio:.3e}, Hermitian defect {:.3e}",
                g.hermitian_defect
            );
            let result = json!({
                "domain": dom,
                "basis": { "sigma": DEFAULT_SIGMA, "y_center": yc, "size": cfg.basis },
                "eigenvalue_ratio": ratio,
                "gram": g,
            });
            (result, passed, summary)
        }
        Err(e) => (
            json!({ "error": e.to_string() }),
            false,
            format!("evaluation failed: {e}"),
        ),
    };
    report(cfg, passed, result, summary)
}

fn continuous_check(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let dom = cfg.domain_spec()?;
    let gauss = GepFunction::gaussian(1.0)?;
    let r = continuous_series_check(&cfg.params, &gauss, &gauss, &dom)?;
    let positive = r.u_form.re > 0.0 && r.u_form.im.abs() <= cfg.tol * r.u_form.norm();
    let passed = r.v_residual <= cfg.tol && r.u_residual <= cfg.tol && positive;
    let summary = format!("v adjoint {:.3e}, u adjoint {:.3e}", r.v_residual, r.u_residual);
    let result = json!({ "domain": dom, "test_function": gauss, "check": r, "u_form_positive": positive });
    report(cfg, passed, result, summary)
}

fn run_suite(cfg: &RunConfig, exec: Exec) -> Result<Outcome, ConfigError> {
    let outcomes = suite::run_all(exec, cfg.seed, !cfg.keep_going);
    let passed = outcomes.len() == suite::TITLES.len() && outcomes.iter().all(|o| o.passed);
    let lines: Vec<String> = outcomes.iter().map(|o| o.summary_line()).collect();
    let summary = lines.join("\n");
    let result = json!({ "fail_fast": !cfg.keep_going, "criteria": outcomes });
    report(cfg, passed, result, summary)
}
