//! The acceptance battery: twelve criteria, each a list of measured
//! sub-checks against fixed thresholds.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::kernel::{
    identity_grid, peq_residuals, positivity_scan, square_grid, weight_ratio_scan, IdentityKind, WeightSpec,
    GRID_OFFSET,
};
use crate::params::{discrete_spin, params_from_angle, params_from_tau, Convention, Regime, RegimeParams, Spin};
use crate::qdilog::QDilog;
use crate::representation::inner::{centered_basis, default_test_pair, DEFAULT_SIGMA};
use crate::representation::{
    casimir_residual, compose, continuous_series_check, gram_matrix, hermiticity_residual, pointwise_gap, DomainSpec,
    GepFunction, GepTerm, OpName,
};
use crate::weyl;

pub const DEFAULT_SEED: u64 = 20240611;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubCheck {
    pub label: String,
    pub value: f64,
    /// `"< 1e-8"`, `">= -1e-12"`, `"== 3"` and so on.
    pub requirement: String,
    pub passed: bool,
}

impl SubCheck {
    fn below(label: impl Into<String>, value: f64, bound: f64) -> SubCheck {
        SubCheck {
            label: label.into(),
            value,
            requirement: format!("< {bound:e}"),
            passed: value < bound,
        }
    }

    fn at_least(label: impl Into<String>, value: f64, bound: f64) -> SubCheck {
        SubCheck {
            label: label.into(),
            value,
            requirement: format!(">= {bound:e}"),
            passed: value >= bound,
        }
    }

    fn equals(label: impl Into<String>, value: i64, want: i64) -> SubCheck {
        SubCheck {
            label: label.into(),
            value: value as f64,
            requirement: format!("== {want}"),
            passed: value == want,
        }
    }

    fn error(label: impl Into<String>, err: &Error) -> SubCheck {
        SubCheck {
            label: format!("{}: {err}", label.into()),
            value: f64::NAN,
            requirement: "evaluable".into(),
            passed: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub checks: Vec<SubCheck>,
}

impl Outcome {
    fn new(id: u32, title: &'static str, checks: Vec<SubCheck>) -> Outcome {
        Outcome {
            id,
            title,
            passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
            checks,
        }
    }

    /// The worst sub-check: the first failing one, otherwise the first.
    pub fn headline(&self) -> Option<&SubCheck> {
        self.checks.iter().find(|c| !c.passed).or(self.checks.first())
    }

    pub fn summary_line(&self) -> String {
        let detail = self
            .headline()
            .map(|c| format!("{} = {:.3e} ({})", c.label, c.value, c.requirement))
            .unwrap_or_default();
        format!(
            "[{}] criterion {:>2}: {} | {} of {} sub-checks | {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len(),
            detail
        )
    }
}

pub const TITLES: [&str; 12] = [
    "exact algebra relations and Casimir",
    "dilogarithm functional equations",
    "omega''-shift sine relation",
    "zero lattice windings",
    "weight consistency",
    "kernel identities",
    "weight shift equations",
    "positivity of the weight",
    "operator checks",
    "quadrature Hermiticity",
    "Gram positivity",
    "continuous-series adjoints",
];

pub fn run_criterion(id: u32, exec: Exec, seed: u64) -> Outcome {
    let checks = match id {
        1 => algebra(),
        2 => functional_equations(exec),
        3 => shift_relation(exec),
        4 => zero_lattice(exec),
        5 => weight_consistency(exec),
        6 => kernel_identities(exec),
        7 => shift_equations(exec),
        8 => positivity(exec),
        9 => operators(seed),
        10 => hermiticity(exec),
        11 => gram(exec),
        12 => continuous(),
        _ => vec![SubCheck::error(
            "criterion",
            &Error::InvalidDomain(format!("no criterion {id}")),
        )],
    };
    let title = TITLES.get(id.wrapping_sub(1) as usize).copied().unwrap_or("unknown");
    Outcome::new(id, title, checks)
}

/// Run criteria `1..=12` in order; with `fail_fast` stop after the first failure.
pub fn run_all(exec: Exec, seed: u64, fail_fast: bool) -> Vec<Outcome> {
    let mut out = Vec::new();
    for id in 1..=12 {
        let o = run_criterion(id, exec, seed);
        let stop = fail_fast && !o.passed;
        out.push(o);
        if stop {
            break;
        }
    }
    out
}

fn regime_two_taus() -> [(&'static str, RegimeParams); 2] {
    [
        (
            "tau=i",
            params_from_tau(Complex64::new(0.0, 1.0), Regime::II).expect("valid"),
        ),
        ("tau=e^(i pi/3)", params_from_angle(PI / 3.0).expect("valid")),
    ]
}

fn sixty() -> RegimeParams {
    params_from_angle(PI / 3.0).expect("valid")
}

fn collect<T>(label: &str, r: Result<T>, f: impl FnOnce(T) -> Vec<SubCheck>) -> Vec<SubCheck> {
    match r {
        Ok(v) => f(v),
        Err(e) => vec![SubCheck::error(label, &e)],
    }
}

fn algebra() -> Vec<SubCheck> {
    let names = ["KE - q^2 EK", "KF - q^-2 FK", "EF - FE - (K - K^-1)/(q - q^-1)"];
    let mut checks: Vec<SubCheck> = weyl::relation_residuals()
        .iter()
        .zip(names)
        .map(|(r, n)| SubCheck::equals(format!("{n}: nonzero terms"), r.len() as i64, 0))
        .collect();
    let c = &weyl::casimir() + &(&weyl::AlgebraElement::z(1) + &weyl::AlgebraElement::z(-1));
    checks.push(SubCheck::equals("C + Z + Z^-1: nonzero terms", c.len() as i64, 0));
    checks
}

/// Max of a residual over points, skipping points flagged as too close to a
/// zero or pole; the number skipped is reported as its own sub-check.
fn max_residual(
    label: &str,
    points: &[Complex64],
    exec: Exec,
    bound: f64,
    f: impl Fn(Complex64) -> Result<f64> + Sync,
) -> Vec<SubCheck> {
    let values = exec::map(exec, points, |&z| f(z));
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for v in values {
        match v {
            Ok(r) => worst = worst.max(r),
            Err(Error::NearPole { .. } | Error::NearZero { .. }) => skipped += 1,
            Err(e) => return vec![SubCheck::error(label, &e)],
        }
    }
    let mut out = vec![SubCheck::below(label, worst, bound)];
    if skipped > 0 {
        out.push(SubCheck::equals(
            format!("{label}: points skipped near zeros/poles"),
            skipped,
            0,
        ));
    }
    out
}

fn strip_grid(params: &RegimeParams, count: usize) -> Vec<Complex64> {
    let mu = params.mu();
    let mut pts = Vec::with_capacity(count * count);
    for j in 0..count {
        let y = mu * (-0.5 + (j as f64 + 0.5) / count as f64);
        for k in 0..count {
            let x = -1.0 + 2.0 * (k as f64 + 0.5) / count as f64;
            pts.push(Complex64::new(x, y));
        }
    }
    pts
}

fn functional_equations(exec: Exec) -> Vec<SubCheck> {
    let mut cases: Vec<(String, Result<RegimeParams>)> = vec![
        ("tau=e^(i pi/3)".into(), params_from_angle(PI / 3.0)),
        ("tau=i".into(), params_from_tau(Complex64::new(0.0, 1.0), Regime::II)),
        ("tau=e^(2 pi i/5)".into(), params_from_angle(2.0 * PI / 5.0)),
    ];
    for t in [2.0, 0.5] {
        cases.push((format!("tau={t}"), params_from_tau(Complex64::new(t, 0.0), Regime::I)));
    }
    let mut checks = Vec::new();
    for (label, p) in cases {
        checks.extend(collect(&label, p.and_then(QDilog::new), |g| {
            let pts = strip_grid(g.params(), 10);
            let mut c = max_residual(&format!("{label} d1"), &pts, exec, 1e-8, |z| g.d1_residual(z));
            c.extend(max_residual(&format!("{label} d2"), &pts, exec, 1e-8, |z| {
                g.d2_residual(z)
            }));
            c
        }));
    }
    checks
}

fn shift_relation(exec: Exec) -> Vec<SubCheck> {
    collect("tau=e^(i pi/3)", QDilog::new(sixty()), |g| {
        let mu = g.params().mu();
        // 50 points of a Kronecker sequence in [-1, 1] x [-0.45 mu, 0.45 mu]
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let pts: Vec<Complex64> = (0..50)
            .map(|k| {
                let a = (k as f64 * phi + 0.1).fract();
                let b = (k as f64 * 2f64.sqrt() + 0.3).fract();
                Complex64::new(-1.0 + 2.0 * a, mu * (-0.45 + 0.9 * b))
            })
            .collect();
        max_residual("shift relation, 50 points", &pts, exec, 1e-8, |z| {
            g.shift_relation_residual(z)
        })
    })
}

fn zero_lattice(exec: Exec) -> Vec<SubCheck> {
    let mut checks = Vec::new();
    for (label, p) in regime_two_taus() {
        checks.extend(collect(label, QDilog::new(p), |g| {
            let mut c = Vec::new();
            for n in 1..=4u32 {
                match g.count_zeros_on_level(n) {
                    Ok(count) => c.push(SubCheck::equals(
                        format!("{label} level {n} zero count"),
                        count,
                        n as i64,
                    )),
                    Err(e) => c.push(SubCheck::error(format!("{label} level {n}"), &e)),
                }
                match g.level_windings(n, exec) {
                    Ok(w) => {
                        let bad = w.iter().filter(|(_, k)| *k != 1).count() as i64;
                        c.push(SubCheck::equals(format!("{label} level {n} windings != 1"), bad, 0));
                    }
                    Err(e) => c.push(SubCheck::error(format!("{label} level {n} windings"), &e)),
                }
            }
            c
        }));
    }
    checks
}

fn weight_consistency(exec: Exec) -> Vec<SubCheck> {
    let mut checks = Vec::new();
    for (label, p) in regime_two_taus() {
        checks.extend(collect(label, QDilog::new(p), |g| {
            (1..=3)
                .map(|n| match weight_ratio_scan(&g, n, 20, exec) {
                    Ok(s) => SubCheck::below(format!("{label} n={n} ratio spread"), s.relative_spread, 1e-6),
                    Err(e) => SubCheck::error(format!("{label} n={n}"), &e),
                })
                .collect()
        }));
    }
    checks
}

fn weight_set(p: RegimeParams) -> Result<Vec<(String, WeightSpec)>> {
    let mut out = Vec::new();
    for n in 1..=3 {
        out.push((format!("n={n}"), WeightSpec::discrete(p, n, Convention::Sec3)?));
    }
    out.push((
        "a=1.5 omega''".to_string(),
        WeightSpec::generic(p, 1.5 * p.omega_pp(), Convention::Sec3)?,
    ));
    Ok(out)
}

fn kernel_identities(exec: Exec) -> Vec<SubCheck> {
    let ws = square_grid(20, 1.0);
    let zs: Vec<Complex64> = ws.iter().map(|&w| w + GRID_OFFSET).collect();
    let mut checks = Vec::new();
    for (tl, p) in regime_two_taus() {
        checks.extend(collect(tl, weight_set(p), |set| {
            let mut c = Vec::new();
            for (wl, spec) in set {
                for (kind, kl) in [
                    (IdentityKind::K, "K"),
                    (IdentityKind::E, "E"),
                    (IdentityKind::DualK, "dual K"),
                    (IdentityKind::DualE, "dual E"),
                ] {
                    let label = format!("{tl} {wl} {kl} identity");
                    match identity_grid(kind, &spec, &ws, &zs, exec) {
                        Ok(g) => {
                            c.push(SubCheck::below(label.clone(), g.max_residual(), 1e-8));
                            if !g.skipped.is_empty() {
                                c.push(SubCheck::equals(
                                    format!("{label} pairs at a pole"),
                                    g.skipped.len() as i64,
                                    0,
                                ));
                            }
                        }
                        Err(e) => c.push(SubCheck::error(label, &e)),
                    }
                }
            }
            c
        }));
    }
    checks
}

fn shift_equations(exec: Exec) -> Vec<SubCheck> {
    let ts = square_grid(100, 1.0);
    let mut checks = Vec::new();
    for (tl, p) in regime_two_taus() {
        checks.extend(collect(tl, weight_set(p), |set| {
            let mut c = Vec::new();
            for (wl, spec) in set {
                let values = exec::map(exec, &ts, |&t| peq_residuals(t, &spec));
                let (mut r1, mut r2, mut guarded) = (0.0f64, 0.0f64, 0);
                let mut failure = None;
                for v in values {
                    match v {
                        Ok((a, b)) => {
                            r1 = r1.max(a);
                            r2 = r2.max(b);
                        }
                        Err(Error::DenominatorZero { .. }) => guarded += 1,
                        Err(e) => failure = Some(e),
                    }
                }
                if let Some(e) = failure {
                    c.push(SubCheck::error(format!("{tl} {wl}"), &e));
                    continue;
                }
                c.push(SubCheck::below(format!("{tl} {wl} first shift equation"), r1, 1e-8));
                c.push(SubCheck::below(format!("{tl} {wl} second shift equation"), r2, 1e-8));
                if guarded > 0 {
                    c.push(SubCheck::equals(format!("{tl} {wl} points at sine zeros"), guarded, 0));
                }
            }
            c
        }));
    }
    checks
}

fn positivity(exec: Exec) -> Vec<SubCheck> {
    let mut checks = Vec::new();
    for (label, p) in regime_two_taus() {
        for n in 2..=4 {
            let s = positivity_scan(n, &p, 1000, exec);
            checks.push(SubCheck::at_least(format!("{label} n={n} min Phi"), s.min, -1e-12));
            checks.push(SubCheck::below(
                format!("{label} n={n} relative |Im Phi|"),
                s.max_imag,
                1e-10,
            ));
        }
    }
    match params_from_tau(Complex64::new(2.0, 0.0), Regime::I) {
        Ok(p) => {
            let s = positivity_scan(2, &p, 1000, exec);
            checks.push(SubCheck {
                label: "tau=2 (Regime I) n=2 min Phi".into(),
                value: s.min,
                requirement: "< -1e-3".into(),
                passed: s.min < -1e-3,
            });
        }
        Err(e) => checks.push(SubCheck::error("tau=2", &e)),
    }
    checks
}

fn random_gep(rng: &mut ChaCha8Rng) -> GepFunction {
    let terms = (0..rng.random_range(1..4))
        .map(|_| GepTerm {
            coeff: Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            beta: Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)),
            k: rng.random_range(0..4),
        })
        .collect();
    GepFunction::new(DEFAULT_SIGMA, terms).expect("positive width")
}

fn operators(seed: u64) -> Vec<SubCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    for (label, p) in regime_two_taus() {
        let spin = match discrete_spin(&p, 2, Convention::Sec3) {
            Ok(s) => s,
            Err(e) => return vec![SubCheck::error(label, &e)],
        };
        let (mut weyl, mut euler, mut cas) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..5 {
            let f = random_gep(&mut rng);
            let zs: Vec<Complex64> = (0..10)
                .map(|_| Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)))
                .collect();
            weyl = weyl.max(weyl_gap(&p, &spin, &f, &zs));
            for a in OpName::PLAIN {
                for b in OpName::TILDE {
                    euler = euler.max(pointwise_gap(
                        &compose(a, b, &p, &spin, &f),
                        &compose(b, a, &p, &spin, &f),
                        &zs,
                    ));
                }
            }
            cas = cas.max(casimir_residual(&f, &spin, &p, &zs));
        }
        checks.push(SubCheck::below(format!("{label} uv = q^2 vu"), weyl, 1e-10));
        checks.push(SubCheck::below(
            format!("{label} plain/tilde commutators"),
            euler,
            1e-10,
        ));
        checks.push(SubCheck::below(format!("{label} n=2 Casimir"), cas, 1e-10));
    }
    checks
}

fn weyl_gap(p: &RegimeParams, s: &Spin, f: &GepFunction, zs: &[Complex64]) -> f64 {
    let q2 = p.q() * p.q();
    let qt2 = p.q_tilde() * p.q_tilde();
    pointwise_gap(
        &compose(OpName::U, OpName::V, p, s, f),
        &compose(OpName::V, OpName::U, p, s, f).scale(q2),
        zs,
    )
    .max(pointwise_gap(
        &compose(OpName::UTilde, OpName::VTilde, p, s, f),
        &compose(OpName::VTilde, OpName::UTilde, p, s, f).scale(qt2),
        zs,
    ))
}

fn middle_strip() -> Result<(WeightSpec, DomainSpec, f64)> {
    let p = sixty();
    let spec = WeightSpec::discrete(p, 3, Convention::Sec3)?;
    Ok((spec, DomainSpec::strip(3, 2), 1.5 * p.mu()))
}

fn hermiticity(exec: Exec) -> Vec<SubCheck> {
    collect("middle strip", middle_strip(), |(spec, dom, yc)| {
        collect("test pair", default_test_pair(DEFAULT_SIGMA, yc), |(f, g)| {
            let mut c = Vec::new();
            for pair in [
                (OpName::KTilde, OpName::K),
                (OpName::ETilde, OpName::E),
                (OpName::FTilde, OpName::F),
            ] {
                let label = format!("({},{})", pair.0, pair.1);
                let r5 = hermiticity_residual(pair, &f, &g, &dom.with_x(5.0), &spec, exec);
                let r7 = hermiticity_residual(pair, &f, &g, &dom.with_x(7.0), &spec, exec);
                match (r5, r7) {
                    (Ok(a), Ok(b)) => {
                        c.push(SubCheck::below(format!("{label} X=5"), a.residual, 1e-3));
                        c.push(SubCheck {
                            label: format!("{label} shrink X=5 -> 7"),
                            value: a.residual / b.residual,
                            requirement: ">= 10".into(),
                            passed: b.residual * 10.0 <= a.residual,
                        });
                    }
                    (Err(e), _) | (_, Err(e)) => c.push(SubCheck::error(label, &e)),
                }
            }
            c
        })
    })
}

fn gram(exec: Exec) -> Vec<SubCheck> {
    collect("middle strip", middle_strip(), |(spec, dom, yc)| {
        let r = centered_basis(DEFAULT_SIGMA, yc, 8).and_then(|b| gram_matrix(&b, &dom, &spec, exec));
        collect("gram", r, |g| {
            vec![
                SubCheck::at_least(
                    "min eigenvalue / max eigenvalue",
                    g.min_eigenvalue / g.max_eigenvalue,
                    -1e-6,
                ),
                SubCheck::below("Hermitian defect", g.hermitian_defect, 1e-10),
            ]
        })
    })
}

fn continuous() -> Vec<SubCheck> {
    let p = match params_from_tau(Complex64::new(4.0, 0.0), Regime::I) {
        Ok(p) => p,
        Err(e) => return vec![SubCheck::error("tau=4", &e)],
    };
    let dom = DomainSpec::real_line(10.0);
    let one = Complex64::new(1.0, 0.0);
    let gauss = GepFunction::gaussian(1.0).expect("positive width");
    let shifted = GepFunction::new(
        1.0,
        vec![
            GepTerm {
                coeff: one,
                beta: Complex64::new(0.3, 0.0),
                k: 2,
            },
            GepTerm {
                coeff: Complex64::new(0.0, 0.5),
                beta: Complex64::new(0.0, 0.0),
                k: 1,
            },
        ],
    )
    .expect("positive width");
    let mut checks = Vec::new();
    for (label, f, g) in [("f=g=e^(-x^2)", &gauss, &gauss), ("mixed pair", &gauss, &shifted)] {
        checks.extend(collect(label, continuous_series_check(&p, f, g, &dom), |r| {
            vec![
                SubCheck::below(format!("{label} v adjoint"), r.v_residual, 1e-8),
                SubCheck::below(format!("{label} u adjoint"), r.u_residual, 1e-8),
            ]
        }));
    }
    checks
}
