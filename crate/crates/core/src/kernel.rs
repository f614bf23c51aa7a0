//! The weight `Phi(t)`, the kernel `S(w, z) = exp(i pi (z^2 - w^2)) Phi(w - z)`,
//! and pointwise checks of the functional identities that make the dual
//! generators mutually adjoint.
//!
//! The conjugate slot `w` is an independent complex variable throughout; the
//! planar measure substitutes `w = conj(z)`, so `t = w - z = -2 i y`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::params::{discrete_spin, Convention, Regime, RegimeParams, Spin};
use crate::qdilog::{relative_gap, QDilog};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Both sides below this magnitude make an identity check inconclusive.
pub const UNDERFLOW: f64 = 1e-300;

/// Denominator guard for the sine ratios in the shift equations.
pub const SINE_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WeightVariant {
    /// Finite product of sines, spin `a = n omega_pp`.
    DiscreteProduct(u32),
    /// Ratio of dilogarithms, arbitrary spin `a`.
    GenericSpin(Complex64),
}

#[derive(Debug, Clone)]
pub struct WeightSpec {
    variant: WeightVariant,
    params: RegimeParams,
    spin: Spin,
    dilog: Option<QDilog>,
}

impl WeightSpec {
    pub fn discrete(params: RegimeParams, n: u32, convention: Convention) -> Result<WeightSpec> {
        let spin = discrete_spin(&params, n as i64, convention)?;
        Ok(WeightSpec {
            variant: WeightVariant::DiscreteProduct(n),
            params,
            spin,
            dilog: None,
        })
    }

    pub fn generic(params: RegimeParams, a: Complex64, convention: Convention) -> Result<WeightSpec> {
        Ok(WeightSpec {
            variant: WeightVariant::GenericSpin(a),
            params,
            spin: Spin::new(&params, a, convention),
            dilog: Some(QDilog::new(params)?),
        })
    }

    /// Generic-spin weight reusing an already calibrated evaluator.
    pub fn generic_with(dilog: QDilog, a: Complex64, convention: Convention) -> WeightSpec {
        let params = *dilog.params();
        WeightSpec {
            variant: WeightVariant::GenericSpin(a),
            params,
            spin: Spin::new(&params, a, convention),
            dilog: Some(dilog),
        }
    }

    pub fn variant(&self) -> WeightVariant {
        self.variant
    }

    pub fn params(&self) -> &RegimeParams {
        &self.params
    }

    pub fn spin(&self) -> &Spin {
        &self.spin
    }

    /// The spin value entering the weight formulas.
    pub fn a(&self) -> Complex64 {
        self.spin.a
    }

    /// Same weight with `omega` and `omega_p` interchanged.
    pub fn dual(&self) -> Result<WeightSpec> {
        let params = self.params.dual();
        let dilog = match &self.dilog {
            Some(d) => Some(QDilog::with_settings(params, *d.settings())?),
            None => None,
        };
        Ok(WeightSpec {
            variant: self.variant,
            params,
            spin: Spin::new(&params, self.spin.a, self.spin.convention),
            dilog,
        }
        .with_n(self.spin.n))
    }

    fn with_n(mut self, n: Option<u32>) -> WeightSpec {
        self.spin.n = n;
        self
    }

    pub fn phi(&self, t: Complex64) -> Result<Complex64> {
        match self.variant {
            WeightVariant::DiscreteProduct(n) => Ok(phi_product(&self.params, t, n)),
            WeightVariant::GenericSpin(a) => {
                phi_gamma(self.dilog.as_ref().expect("generic weight carries an evaluator"), t, a)
            }
        }
    }
}

/// `prod_{m=1}^{n-1} sin(pi (t + 2 m omega_pp)/(2 omega_p)) sin(pi (t + 2 m omega_pp)/(2 omega))`
pub fn phi_product(params: &RegimeParams, t: Complex64, n: u32) -> Complex64 {
    (1..n).fold(ONE, |acc, m| {
        let x = t + 2.0 * m as f64 * params.omega_pp();
        acc * (PI * x / (2.0 * params.omega_p())).sin() * (PI * x / (2.0 * params.omega())).sin()
    })
}

/// `prod_{m=1}^{n-1} |sin(pi (t + 2 m omega_pp)/(2 omega_p))|^2`, equal to
/// [`phi_product`] on the imaginary axis in Regime II.
pub fn phi_product_abs_form(params: &RegimeParams, t: Complex64, n: u32) -> f64 {
    (1..n).fold(1.0, |acc, m| {
        let x = t + 2.0 * m as f64 * params.omega_pp();
        acc * (PI * x / (2.0 * params.omega_p())).sin().norm_sqr()
    })
}

/// Generic-spin weight
/// `exp(2 pi i (a + omega_pp) - 2 pi i (a - omega_pp) t) gamma(t - omega_pp + 2a) / gamma(t + omega_pp)`.
///
/// The factor linear in `t` in the exponent is what makes both shift
/// equations hold with unit constant; without it the ratio of consecutive
/// shifts is off by a `t`-independent multiplier.
///
/// Unless `a` is a multiple of `omega_pp` the weight has poles where
/// `gamma(t + omega_pp)` vanishes, among them `t = 0`; these are reported as
/// [`Error::WeightPole`].
pub fn phi_gamma(dilog: &QDilog, t: Complex64, a: Complex64) -> Result<Complex64> {
    let p = dilog.params();
    let w = p.omega_pp();
    let tol = dilog.settings().pole_tolerance;
    if let Some(distance) = dilog.nearest_zero_distance(t + w) {
        if distance < tol {
            return Err(Error::WeightPole { t, distance });
        }
    }
    let num = match dilog.gamma(t - w + 2.0 * a) {
        Err(Error::NearPole { distance, .. }) => return Err(Error::WeightPole { t, distance }),
        other => other?,
    };
    let den = dilog.gamma(t + w)?;
    let pref = (2.0 * PI * I * (a + w) - 2.0 * PI * I * (a - w) * t).exp();
    Ok(pref * num / den)
}

/// `S(w, z) = exp(i pi (z^2 - w^2)) Phi(w - z)`.
pub fn kernel_s(w: Complex64, z: Complex64, spec: &WeightSpec) -> Result<Complex64> {
    Ok((I * PI * (z * z - w * w)).exp() * spec.phi(w - z)?)
}

fn identity_gap(lhs: Complex64, rhs: Complex64, w: Complex64, z: Complex64) -> Result<f64> {
    if lhs.norm() < UNDERFLOW && rhs.norm() < UNDERFLOW {
        return Err(Error::Underflow { w, z });
    }
    Ok(relative_gap(lhs, rhs))
}

/// `|lhs - rhs|` over the summed magnitudes of the individual terms, so that
/// sides which cancel internally do not turn roundoff into an O(1) residual.
fn term_scaled_gap(lhs: [Complex64; 2], rhs: [Complex64; 2], w: Complex64, z: Complex64) -> Result<f64> {
    let scale: f64 = lhs.iter().chain(&rhs).map(|c| c.norm()).sum();
    if scale < UNDERFLOW {
        return Err(Error::Underflow { w, z });
    }
    Ok((lhs[0] + lhs[1] - rhs[0] - rhs[1]).norm() / scale)
}

/// Residual of `q S(w, z - 2 omega_p) e^{-i pi z/omega} = q^{-1} S(w + 2 omega_p, z) e^{-i pi w/omega}`.
pub fn k_identity_residual(w: Complex64, z: Complex64, spec: &WeightSpec) -> Result<f64> {
    let p = spec.params();
    let (q, om, omp) = (p.q(), p.omega(), p.omega_p());
    let lhs = q * kernel_s(w, z - 2.0 * omp, spec)? * (-I * PI * z / om).exp();
    let rhs = q.inv() * kernel_s(w + 2.0 * omp, z, spec)? * (-I * PI * w / om).exp();
    identity_gap(lhs, rhs, w, z)
}

/// Residual, scaled by the four term magnitudes, of
/// `S(w, z - 2 omega_p) + Z e^{i pi z/omega} S(w, z) = S(w + 2 omega_p, z) + Z^{-1} e^{i pi w/omega} S(w, z)`.
pub fn e_identity_residual(w: Complex64, z: Complex64, spec: &WeightSpec) -> Result<f64> {
    let p = spec.params();
    let (om, omp) = (p.omega(), p.omega_p());
    let zc = spec.spin().z;
    let s0 = kernel_s(w, z, spec)?;
    let lhs = [kernel_s(w, z - 2.0 * omp, spec)?, zc * (I * PI * z / om).exp() * s0];
    let rhs = [
        kernel_s(w + 2.0 * omp, z, spec)?,
        zc.inv() * (I * PI * w / om).exp() * s0,
    ];
    term_scaled_gap(lhs, rhs, w, z)
}

/// Residuals of the two shift equations for the weight,
/// `Phi(t + 2 omega_p)/Phi(t) = sin(pi (t + 2a)/2 omega) / sin(pi (t + 2 omega_pp)/2 omega)`
/// and its `omega <-> omega_p` partner, checked in cross-multiplied form.
pub fn peq_residuals(t: Complex64, spec: &WeightSpec) -> Result<(f64, f64)> {
    let p = spec.params();
    let a = spec.a();
    let one = |shift: Complex64, period: Complex64| -> Result<f64> {
        let den = (PI * (t + 2.0 * p.omega_pp()) / (2.0 * period)).sin();
        if den.norm() < SINE_GUARD {
            return Err(Error::DenominatorZero { t, value: den.norm() });
        }
        let num = (PI * (t + 2.0 * a) / (2.0 * period)).sin();
        let lhs = spec.phi(t + 2.0 * shift)? * den;
        let rhs = spec.phi(t)? * num;
        identity_gap(lhs, rhs, t, t)
    };
    Ok((one(p.omega_p(), p.omega())?, one(p.omega(), p.omega_p())?))
}

/// Regions of the plane cut out by the zero lines `y = m mu` of `Phi(-2 i y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainDecomposition {
    pub n: u32,
    pub mu: f64,
    /// `y`-levels of the zero lines, `m = 1..n-1`.
    pub levels: Vec<f64>,
    /// `(y_lo, y_hi)` per region, bottom to top; unbounded ends are infinite.
    pub regions: Vec<(f64, f64)>,
}

impl DomainDecomposition {
    /// Region `index` in `1..=n`.
    pub fn region(&self, index: usize) -> Result<(f64, f64)> {
        if index == 0 || index > self.regions.len() {
            return Err(Error::DomainIndex { index, n: self.n });
        }
        Ok(self.regions[index - 1])
    }
}

pub fn decompose_domains(n: u32, params: &RegimeParams) -> Result<DomainDecomposition> {
    if params.regime() != Regime::II {
        return Err(Error::RequiresRegimeII);
    }
    if n == 0 {
        return Err(Error::NonPositiveSpin(0));
    }
    let mu = params.mu();
    let levels: Vec<f64> = (1..n).map(|m| m as f64 * mu).collect();
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend(&levels);
    edges.push(f64::INFINITY);
    let regions = edges.windows(2).map(|w| (w[0], w[1])).collect();
    Ok(DomainDecomposition { n, mu, levels, regions })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityScan {
    pub samples: usize,
    /// Minimum of `Re Phi(t)` over the samples.
    pub min: f64,
    /// Where the minimum was attained (imaginary part of `t`).
    pub argmin: f64,
    /// Largest `|Im Phi(t)| / max(1, |Phi(t)|)` seen.
    pub max_imag: f64,
    /// Largest gap between the product and `|sin|^2` forms, scaled the same way.
    pub max_abs_form_gap: f64,
}

/// Scan `Phi(t)` for the discrete weight on `t = i s`, `s` uniform in
/// `[-3 mu, 3 mu]` (endpoints included).
pub fn positivity_scan(n: u32, params: &RegimeParams, samples: usize, exec: Exec) -> PositivityScan {
    let mu = params.mu();
    let samples = samples.max(2);
    let ss: Vec<f64> = (0..samples)
        .map(|k| -3.0 * mu + 6.0 * mu * k as f64 / (samples - 1) as f64)
        .collect();
    let values = exec::map(exec, &ss, |&s| {
        let t = Complex64::new(0.0, s);
        (s, phi_product(params, t, n), phi_product_abs_form(params, t, n))
    });
    let mut scan = PositivityScan {
        samples,
        min: f64::INFINITY,
        argmin: 0.0,
        max_imag: 0.0,
        max_abs_form_gap: 0.0,
    };
    for (s, v, abs_form) in values {
        if v.re < scan.min {
            scan.min = v.re;
            scan.argmin = s;
        }
        let scale = v.norm().max(1.0);
        scan.max_imag = scan.max_imag.max(v.im.abs() / scale);
        scan.max_abs_form_gap = scan.max_abs_form_gap.max((v - abs_form).norm() / scale);
    }
    scan
}

/// Ratio `phi_gamma(t, n omega_pp) / phi_product(t, n)` on `t = i s`,
/// `s` uniform in `[0.15 mu, 1.85 mu]`, away from the zeros and poles of both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioScan {
    pub n: u32,
    pub samples: usize,
    pub mean: Complex64,
    /// Standard deviation of the ratios divided by `|mean|`.
    pub relative_spread: f64,
}

pub fn weight_ratio_scan(dilog: &QDilog, n: u32, samples: usize, exec: Exec) -> Result<RatioScan> {
    let p = *dilog.params();
    let mu = p.mu();
    let a = p.omega_pp() * n as f64;
    let samples = samples.max(2);
    let ts: Vec<Complex64> = (0..samples)
        .map(|k| Complex64::new(0.0, mu * (0.15 + 1.7 * k as f64 / (samples - 1) as f64)))
        .collect();
    let ratios = exec::try_map(exec, &ts, |&t| Ok(phi_gamma(dilog, t, a)? / phi_product(&p, t, n)))?;
    let mean = ratios.iter().sum::<Complex64>() / samples as f64;
    let var = ratios.iter().map(|r| (r - mean).norm_sqr()).sum::<f64>() / samples as f64;
    Ok(RatioScan {
        n,
        samples,
        mean,
        relative_spread: var.sqrt() / mean.norm(),
    })
}

/// Locate the zero line near `y_guess` by golden-section minimisation of
/// `log |Phi(-2 i y)|` on `[y_guess - 0.3 mu, y_guess + 0.3 mu]`.
pub fn locate_zero_line(params: &RegimeParams, n: u32, y_guess: f64) -> f64 {
    let f = |y: f64| phi_product(params, Complex64::new(0.0, -2.0 * y), n).norm().ln();
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (y_guess - 0.3 * params.mu(), y_guess + 0.3 * params.mu());
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-14 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// CSV rows `y, re(Phi), im(Phi)` with `Phi` evaluated at `t = -2 i y`.
pub fn phi_csv(spec: &WeightSpec, ys: &[f64], exec: Exec) -> Result<String> {
    let rows = exec::try_map(exec, ys, |&y| {
        let v = spec.phi(Complex64::new(0.0, -2.0 * y))?;
        Ok(format!("{:.17e},{:.17e},{:.17e}", y, v.re, v.im))
    })?;
    let mut out = String::from("y,re_phi,im_phi\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

/// Which pointwise identity a residual grid reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IdentityKind {
    K,
    E,
    DualK,
    DualE,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualPoint {
    pub w: Complex64,
    pub z: Complex64,
    pub residual: f64,
}

/// Residuals of one identity over `ws x zs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityGrid {
    pub points: Vec<ResidualPoint>,
    /// Pairs left out because the weight has a pole within tolerance.
    pub skipped: Vec<(Complex64, Complex64)>,
}

impl IdentityGrid {
    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual).fold(0.0, f64::max)
    }
}

/// Evaluate one identity on every `(w, z)` pair of `ws x zs`.
pub fn identity_grid(
    kind: IdentityKind,
    spec: &WeightSpec,
    ws: &[Complex64],
    zs: &[Complex64],
    exec: Exec,
) -> Result<IdentityGrid> {
    let target = match kind {
        IdentityKind::K | IdentityKind::E => spec.clone(),
        IdentityKind::DualK | IdentityKind::DualE => spec.dual()?,
    };
    let pairs: Vec<(Complex64, Complex64)> = ws.iter().flat_map(|&w| zs.iter().map(move |&z| (w, z))).collect();
    let results = exec::map(exec, &pairs, |&(w, z)| match kind {
        IdentityKind::K | IdentityKind::DualK => k_identity_residual(w, z, &target),
        IdentityKind::E | IdentityKind::DualE => e_identity_residual(w, z, &target),
    });
    let mut grid = IdentityGrid {
        points: Vec::with_capacity(pairs.len()),
        skipped: Vec::new(),
    };
    for (&(w, z), r) in pairs.iter().zip(results) {
        match r {
            Ok(residual) => grid.points.push(ResidualPoint { w, z, residual }),
            Err(Error::WeightPole { .. }) => grid.skipped.push((w, z)),
            Err(e) => return Err(e),
        }
    }
    Ok(grid)
}

pub fn residual_csv(points: &[ResidualPoint]) -> String {
    let mut out = String::from("re_w,im_w,re_z,im_z,residual\n");
    for p in points {
        out.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.6e}\n",
            p.w.re, p.w.im, p.z.re, p.z.im, p.residual
        ));
    }
    out
}

/// Offset for the `z` grid of a `(w, z)` identity grid built from two copies of
/// [`square_grid`], so that `w - z` stays off the pole lattice of the generic weight.
pub const GRID_OFFSET: Complex64 = Complex64::new(0.0137, 0.0291);

/// `count` points of a square grid covering `[-half, half]^2`, row by row.
pub fn square_grid(count: usize, half: f64) -> Vec<Complex64> {
    let side = (count as f64).sqrt().ceil() as usize;
    let coord = |k: usize| -half + 2.0 * half * (k as f64 + 0.5) / side as f64;
    (0..count)
        .map(|k| Complex64::new(coord(k % side), coord(k / side)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{params_from_angle, params_from_tau};

    fn p60() -> RegimeParams {
        params_from_angle(PI / 3.0).unwrap()
    }

    fn pi2() -> RegimeParams {
        params_from_tau(I, Regime::II).unwrap()
    }

    #[test]
    fn product_weight_values() {
        let p = p60();
        assert_eq!(phi_product(&p, Complex64::new(0.3, -0.7), 1), ONE);
        assert!(phi_product(&p, -2.0 * p.omega_pp(), 3).norm() < 1e-14);
        let p = pi2();
        let v = phi_product(&p, Complex64::new(0.0, 0.37 * p.mu()), 2);
        assert!(v.re >= 0.0 && v.im.abs() < 1e-12, "{v}");
    }

    #[test]
    fn kernel_basic_values() {
        let p = p60();
        let spec = WeightSpec::discrete(p, 2, Convention::Sec3).unwrap();
        let z = Complex64::new(0.4, 0.2);
        let phi0 = spec.phi(Complex64::new(0.0, 0.0)).unwrap();
        assert!((kernel_s(z, z, &spec).unwrap() - phi0).norm() < 1e-14);
        let x = Complex64::new(0.8, 0.0);
        let s = kernel_s(x.conj(), x, &spec).unwrap();
        assert!((s - phi0).norm() < 1e-14);
        let one = WeightSpec::discrete(p, 1, Convention::Sec3).unwrap();
        let w = Complex64::new(-0.3, 0.5);
        let s1 = kernel_s(w, z, &one).unwrap();
        assert!((s1 - (I * PI * (z * z - w * w)).exp()).norm() < 1e-15);
    }

    #[test]
    fn identities_for_product_weight() {
        let p = p60();
        let spec = WeightSpec::discrete(p, 2, Convention::Sec3).unwrap();
        let (w, z) = (Complex64::new(0.1, -0.3), Complex64::new(0.2, 0.1));
        assert!(k_identity_residual(w, z, &spec).unwrap() < 1e-8);
        assert!(e_identity_residual(w, z, &spec).unwrap() < 1e-8);
        let dual = spec.dual().unwrap();
        assert!(e_identity_residual(w, z, &dual).unwrap() < 1e-8);
        let one = WeightSpec::discrete(p, 1, Convention::Sec3).unwrap();
        assert!(k_identity_residual(w, z, &one).unwrap() < 1e-12);
        assert!(e_identity_residual(w, z, &one).unwrap() < 1e-10);
    }

    #[test]
    fn opposite_convention_breaks_e_identity() {
        // a = n omega_pp read with Z = exp(+i pi a/omega) is not compatible
        // with the product weight; a = -n omega_pp in that convention is.
        let p = p60();
        let (w, z) = (Complex64::new(0.1, -0.3), Complex64::new(0.2, 0.1));
        let wrong = WeightSpec::discrete(p, 2, Convention::Sec2).unwrap();
        assert!(e_identity_residual(w, z, &wrong).unwrap() > 1e-4);
        let mut flipped = WeightSpec::discrete(p, 2, Convention::Sec2).unwrap();
        flipped.spin = Spin::new(&p, -2.0 * p.omega_pp(), Convention::Sec2);
        assert!(e_identity_residual(w, z, &flipped).unwrap() < 1e-8);
    }

    #[test]
    fn peq_for_product_and_trivial_spin() {
        let p = p60();
        let spec = WeightSpec::discrete(p, 3, Convention::Sec3).unwrap();
        let (r1, r2) = peq_residuals(Complex64::new(0.15, 0.05), &spec).unwrap();
        assert!(r1 < 1e-8 && r2 < 1e-8, "{r1} {r2}");
        let one = WeightSpec::discrete(p, 1, Convention::Sec3).unwrap();
        let (r1, r2) = peq_residuals(Complex64::new(0.15, 0.05), &one).unwrap();
        assert!(r1 < 1e-12 && r2 < 1e-12);
    }

    #[test]
    fn generic_spin_weight_identities() {
        let p = p60();
        let spec = WeightSpec::generic(p, 1.3 * p.omega_pp(), Convention::Sec3).unwrap();
        let t = Complex64::new(0.1, 0.2);
        let (r1, r2) = peq_residuals(t, &spec).unwrap();
        assert!(r1 < 1e-8 && r2 < 1e-8, "{r1} {r2}");
        let spec = WeightSpec::generic(p, 0.7 * p.omega_pp(), Convention::Sec3).unwrap();
        let (r1, r2) = peq_residuals(Complex64::new(0.15, 0.05), &spec).unwrap();
        assert!(r1 < 1e-8 && r2 < 1e-8, "{r1} {r2}");
        let spec = WeightSpec::generic(p, 1.5 * p.omega_pp(), Convention::Sec3).unwrap();
        let (w, z) = (Complex64::new(0.1, -0.3), Complex64::new(0.2, 0.1));
        assert!(k_identity_residual(w, z, &spec).unwrap() < 1e-8);
        assert!(e_identity_residual(w, z, &spec).unwrap() < 1e-8);
    }

    #[test]
    fn generic_weight_vanishes_with_numerator_gamma() {
        let p = p60();
        let a = 1.3 * p.omega_pp();
        let dilog = QDilog::new(p).unwrap();
        // numerator gamma(t - omega_pp + 2a) vanishes at t = 2 omega_pp - 2a
        let t0 = 2.0 * p.omega_pp() - 2.0 * a;
        let near = phi_gamma(&dilog, t0 + 0.05, a).unwrap();
        let at = phi_gamma(&dilog, t0, a).unwrap();
        assert!(at.norm() < 1e-8 * near.norm(), "{at} {near}");
    }

    #[test]
    fn ratio_to_product_is_constant() {
        let p = pi2();
        let dilog = QDilog::new(p).unwrap();
        for n in 1..=3 {
            let scan = weight_ratio_scan(&dilog, n, 20, Exec::default()).unwrap();
            assert!(scan.relative_spread < 1e-6, "n={n}: {scan:?}");
        }
    }

    #[test]
    fn domain_decomposition_shapes() {
        let p = pi2();
        let d1 = decompose_domains(1, &p).unwrap();
        assert!(d1.levels.is_empty());
        assert_eq!(d1.regions, vec![(f64::NEG_INFINITY, f64::INFINITY)]);
        let d3 = decompose_domains(3, &p).unwrap();
        let mu = 2f64.sqrt() / 2.0;
        assert!((d3.levels[0] - mu).abs() < 1e-15 && (d3.levels[1] - 2.0 * mu).abs() < 1e-15);
        assert_eq!(d3.regions.len(), 3);
        assert_eq!(d3.region(2).unwrap(), (d3.levels[0], d3.levels[1]));
        for &y in &d3.levels {
            assert!(phi_product(&p, Complex64::new(0.0, -2.0 * y), 3).norm() < 1e-14);
        }
        let d2 = decompose_domains(2, &p).unwrap();
        assert_eq!(d2.levels.len(), 1);
        assert_eq!(d2.regions.len(), 2);
        assert!(d3.region(4).is_err());
        assert!(decompose_domains(2, &params_from_tau(ONE * 2.0, Regime::I).unwrap()).is_err());
    }

    #[test]
    fn zero_lines_match_levels() {
        let p = p60();
        for n in 2..=4 {
            let d = decompose_domains(n, &p).unwrap();
            for &level in &d.levels {
                let found = locate_zero_line(&p, n, level + 0.1 * p.mu());
                assert!((found - level).abs() < 1e-8, "n={n}: {found} vs {level}");
            }
        }
    }

    #[test]
    fn positivity_regime_two_and_sign_change_regime_one() {
        for n in 2..=4 {
            let scan = positivity_scan(n, &p60(), 1000, Exec::default());
            assert!(scan.min >= -1e-12, "{scan:?}");
            assert!(scan.max_imag < 1e-10, "{scan:?}");
            assert!(scan.max_abs_form_gap < 1e-10, "{scan:?}");
        }
        let r1 = params_from_tau(Complex64::new(2.0, 0.0), Regime::I).unwrap();
        let scan = positivity_scan(2, &r1, 1000, Exec::default());
        assert!(scan.min < -1e-3, "{scan:?}");
    }

    #[test]
    fn generic_weight_poles_are_flagged() {
        let p = p60();
        let spec = WeightSpec::generic(p, 1.5 * p.omega_pp(), Convention::Sec3).unwrap();
        for t in [Complex64::new(0.0, 0.0), 2.0 * p.omega_p(), 2.0 * p.omega()] {
            assert!(matches!(spec.phi(t), Err(Error::WeightPole { .. })), "{t}");
        }
        let z = square_grid(4, 1.0);
        let g = identity_grid(IdentityKind::K, &spec, &z, &z, Exec::Sequential).unwrap();
        // the 4 pairs w = z, plus the 2 with w - z = 1, where t + 2 omega_p = 2 omega
        assert_eq!(g.skipped.len(), 6);
        assert!(g.max_residual() < 1e-8);
        let product = WeightSpec::discrete(p, 2, Convention::Sec3).unwrap();
        assert!(product.phi(2.0 * p.omega_p()).is_ok());
    }

    #[test]
    fn csv_headers() {
        let spec = WeightSpec::discrete(p60(), 2, Convention::Sec3).unwrap();
        let csv = phi_csv(&spec, &[0.0, 0.5], Exec::Sequential).unwrap();
        assert!(csv.starts_with("y,re_phi,im_phi\n"));
        assert_eq!(csv.lines().count(), 3);
        let pts = identity_grid(
            IdentityKind::E,
            &spec,
            &square_grid(4, 1.0),
            &square_grid(4, 1.0),
            Exec::Sequential,
        )
        .unwrap();
        assert_eq!(pts.points.len(), 16);
        assert!(residual_csv(&pts.points).starts_with("re_w,im_w,re_z,im_z,residual\n"));
    }
}
