use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::gep::{GepFunction, GepTerm};
use super::operators::{apply, OpName};
use crate::error::{Error, Result};
use crate::exec::{self, pairwise_sum, Exec};
use crate::kernel::{decompose_domains, WeightSpec};
use crate::params::{Regime, RegimeParams};
use crate::quadrature::{composite_by_length, Rule};

/// Longest Gauss–Legendre panel, in either direction.
pub const PANEL: f64 = 1.0;

pub const DEFAULT_ORDER: usize = 24;
pub const DEFAULT_X: f64 = 5.0;
pub const DEFAULT_YPAD: f64 = 1.0;
pub const MAX_BASIS: usize = 32;

/// Gaussian width of the default test functions and basis.
pub const DEFAULT_SIGMA: f64 = 1.0;

const EPS: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Region {
    /// Region `index` (1-based, bottom to top) of the `n`-line decomposition.
    Strip { n: u32, index: usize },
    /// The real axis with the flat `L^2` measure.
    RealLine,
}

/// Truncated integration rectangle.
///
/// `nx` and `ny` are Gauss–Legendre orders per panel; panels have length at
/// most [`PANEL`]. Unbounded `y` ends of a region are cut at distance `ypad`
/// from its finite edge, or at `+-ypad` for the whole plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainSpec {
    pub region: Region,
    pub x_half: f64,
    pub ypad: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rectangle {
    pub x: (f64, f64),
    pub y: (f64, f64),
    /// Whether either `y` end was cut from an unbounded region.
    pub truncated_y: bool,
}

impl DomainSpec {
    pub fn strip(n: u32, index: usize) -> DomainSpec {
        DomainSpec {
            region: Region::Strip { n, index },
            x_half: DEFAULT_X,
            ypad: DEFAULT_YPAD,
            nx: DEFAULT_ORDER,
            ny: DEFAULT_ORDER,
        }
    }

    pub fn real_line(x_half: f64) -> DomainSpec {
        DomainSpec {
            region: Region::RealLine,
            x_half,
            ypad: 0.0,
            nx: DEFAULT_ORDER,
            ny: 1,
        }
    }

    pub fn with_x(self, x_half: f64) -> DomainSpec {
        DomainSpec { x_half, ..self }
    }

    pub fn with_orders(self, nx: usize, ny: usize) -> DomainSpec {
        DomainSpec { nx, ny, ..self }
    }

    pub fn rectangle(&self, params: &RegimeParams) -> Result<Rectangle> {
        if !(self.x_half > 0.0 && self.x_half.is_finite()) {
            return Err(Error::InvalidDomain(format!("x half-width {}", self.x_half)));
        }
        let x = (-self.x_half, self.x_half);
        match self.region {
            Region::RealLine => {
                if self.nx < 8 {
                    return Err(Error::InvalidDomain(format!("quadrature order nx = {} < 8", self.nx)));
                }
                Ok(Rectangle {
                    x,
                    y: (0.0, 0.0),
                    truncated_y: false,
                })
            }
            Region::Strip { n, index } => {
                if self.nx < 8 || self.ny < 8 {
                    return Err(Error::InvalidDomain(format!(
                        "quadrature orders ({}, {}) below 8",
                        self.nx, self.ny
                    )));
                }
                let (lo, hi) = decompose_domains(n, params)?.region(index)?;
                let bounded = lo.is_finite() && hi.is_finite();
                if !bounded && !(self.ypad > 0.0 && self.ypad.is_finite()) {
                    return Err(Error::InvalidDomain(format!("y padding {}", self.ypad)));
                }
                let y = match (lo.is_finite(), hi.is_finite()) {
                    (true, true) => (lo, hi),
                    (true, false) => (lo, lo + self.ypad),
                    (false, true) => (hi - self.ypad, hi),
                    (false, false) => (-self.ypad, self.ypad),
                };
                Ok(Rectangle {
                    x,
                    y,
                    truncated_y: !bounded,
                })
            }
        }
    }
}

/// Quadrature nodes of a planar domain with the kernel folded into the weights:
/// `weight = w_x w_y S(conj z, z) / pi`.
#[derive(Debug, Clone)]
pub struct WeightedGrid {
    rows: Vec<Vec<(Complex64, Complex64)>>,
}

impl WeightedGrid {
    pub fn build(dom: &DomainSpec, spec: &WeightSpec, exec: Exec) -> Result<WeightedGrid> {
        let rect = dom.rectangle(spec.params())?;
        if dom.region == Region::RealLine {
            return Err(Error::InvalidDomain("planar grid needs a strip region".into()));
        }
        let rx = composite_by_length(rect.x.0, rect.x.1, PANEL, dom.nx);
        let ry = composite_by_length(rect.y.0, rect.y.1, PANEL, dom.ny);
        let ys: Vec<(f64, f64)> = ry.nodes.iter().copied().zip(ry.weights.iter().copied()).collect();
        let rows = exec::try_map(exec, &ys, |&(y, wy)| {
            let phi = spec.phi(Complex64::new(0.0, -2.0 * y))?;
            Ok(row(&rx, y, wy, phi))
        })?;
        Ok(WeightedGrid { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `sum weight * conj(f(z)) * g(z)`, summed pairwise per row then over rows.
    pub fn inner(&self, f: &GepFunction, g: &GepFunction, exec: Exec) -> Result<Complex64> {
        let sums = exec::try_map(exec, &self.rows, |r| {
            let terms = r
                .iter()
                .map(|&(z, w)| {
                    let v = f.eval(z).conj() * w * g.eval(z);
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::NonFiniteIntegrand(z))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(pairwise_sum(&terms))
        })?;
        Ok(pairwise_sum(&sums))
    }

    /// Every `<b_i, b_j>`, evaluating each basis function once per node.
    pub fn gram(&self, basis: &[GepFunction], exec: Exec) -> Result<Vec<Vec<Complex64>>> {
        let m = basis.len();
        let per_row = exec::try_map(exec, &self.rows, |r| {
            let vals: Vec<Vec<Complex64>> = basis
                .iter()
                .map(|b| r.iter().map(|&(z, _)| b.eval(z)).collect())
                .collect();
            let mut out = vec![Complex64::new(0.0, 0.0); m * m];
            let mut buf = Vec::with_capacity(r.len());
            for i in 0..m {
                for j in 0..m {
                    buf.clear();
                    buf.extend(
                        r.iter()
                            .enumerate()
                            .map(|(k, &(_, w))| vals[i][k].conj() * w * vals[j][k]),
                    );
                    let s = pairwise_sum(&buf);
                    if !s.is_finite() {
                        return Err(Error::NonFiniteIntegrand(r[0].0));
                    }
                    out[i * m + j] = s;
                }
            }
            Ok(out)
        })?;
        let mut g = vec![vec![Complex64::new(0.0, 0.0); m]; m];
        let mut col = Vec::with_capacity(per_row.len());
        for i in 0..m {
            for j in 0..m {
                col.clear();
                col.extend(per_row.iter().map(|r| r[i * m + j]));
                g[i][j] = pairwise_sum(&col);
            }
        }
        Ok(g)
    }
}

fn row(rx: &Rule, y: f64, wy: f64, phi: Complex64) -> Vec<(Complex64, Complex64)> {
    rx.nodes
        .iter()
        .zip(&rx.weights)
        .map(|(&x, &wx)| {
            // exp(i pi (z^2 - conj(z)^2)) = exp(-4 pi x y)
            let s = (-4.0 * PI * x * y).exp() * phi;
            (Complex64::new(x, y), s * (wx * wy / PI))
        })
        .collect()
}

/// `(1/pi) iint conj(f(z)) S(conj z, z) g(z) dx dy` over the truncated domain.
pub fn inner_product(
    f: &GepFunction,
    g: &GepFunction,
    dom: &DomainSpec,
    spec: &WeightSpec,
    exec: Exec,
) -> Result<Complex64> {
    WeightedGrid::build(dom, spec, exec)?.inner(f, g, exec)
}

pub const HERMITIAN_PAIRS: [(OpName, OpName); 5] = [
    (OpName::KTilde, OpName::K),
    (OpName::ETilde, OpName::E),
    (OpName::FTilde, OpName::F),
    (OpName::E, OpName::ETilde),
    (OpName::F, OpName::FTilde),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hermiticity {
    pub left: OpName,
    pub right: OpName,
    /// `<left f, g>`
    pub lhs: Complex64,
    /// `<f, right g>`
    pub rhs: Complex64,
    pub residual: f64,
}

/// `|<A f, g> - <f, B g>| / (|<A f, g>| + |<f, B g>| + eps)` for a pair `(A, B)`
/// expected to satisfy `A^* = B`.
pub fn hermiticity_residual(
    pair: (OpName, OpName),
    f: &GepFunction,
    g: &GepFunction,
    dom: &DomainSpec,
    spec: &WeightSpec,
    exec: Exec,
) -> Result<Hermiticity> {
    let grid = WeightedGrid::build(dom, spec, exec)?;
    hermiticity_on_grid(pair, f, g, &grid, spec, exec)
}

pub fn hermiticity_on_grid(
    pair: (OpName, OpName),
    f: &GepFunction,
    g: &GepFunction,
    grid: &WeightedGrid,
    spec: &WeightSpec,
    exec: Exec,
) -> Result<Hermiticity> {
    if !HERMITIAN_PAIRS.contains(&pair) {
        return Err(Error::NotADualPair(pair.0.as_str(), pair.1.as_str()));
    }
    let (p, s) = (spec.params(), spec.spin());
    let lhs = grid.inner(&apply(pair.0, p, s, f), g, exec)?;
    let rhs = grid.inner(f, &apply(pair.1, p, s, g), exec)?;
    Ok(Hermiticity {
        left: pair.0,
        right: pair.1,
        lhs,
        rhs,
        residual: (lhs - rhs).norm() / (lhs.norm() + rhs.norm() + EPS),
    })
}

/// `exp(-sigma z^2 + beta0 z) z^k` for `k < count`, with `beta0` placing the
/// integrand's mass at `y = y_center`, `x = 0`.
pub fn centered_basis(sigma: f64, y_center: f64, count: usize) -> Result<Vec<GepFunction>> {
    let beta0 = Complex64::new(2.0 * PI * y_center, 2.0 * sigma * y_center);
    (0..count)
        .map(|k| GepFunction::monomial(sigma, Complex64::new(1.0, 0.0), beta0, k as u32))
        .collect()
}

/// Fixed pair of test functions built from [`centered_basis`].
pub fn default_test_pair(sigma: f64, y_center: f64) -> Result<(GepFunction, GepFunction)> {
    let b = centered_basis(sigma, y_center, 3)?;
    let mix = |c: [Complex64; 3]| {
        let terms = b
            .iter()
            .zip(c)
            .flat_map(|(f, c)| {
                f.terms().iter().map(move |t| GepTerm {
                    coeff: t.coeff * c,
                    ..*t
                })
            })
            .collect();
        GepFunction::new(sigma, terms)
    };
    let f = mix([
        Complex64::new(1.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(0.0, 0.0),
    ])?;
    let g = mix([
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, -0.3),
    ])?;
    Ok((f, g))
}

/// Centre line of a strip, or of the truncated rectangle for unbounded regions.
pub fn region_center(dom: &DomainSpec, params: &RegimeParams) -> Result<f64> {
    let r = dom.rectangle(params)?;
    Ok(0.5 * (r.y.0 + r.y.1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramResult {
    pub matrix: Vec<Vec<Complex64>>,
    /// `max |G_ij - conj(G_ji)|` relative to the largest entry.
    pub hermitian_defect: f64,
    /// Eigenvalues of the Hermitian part, ascending.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

pub fn gram_matrix(basis: &[GepFunction], dom: &DomainSpec, spec: &WeightSpec, exec: Exec) -> Result<GramResult> {
    if basis.len() > MAX_BASIS {
        return Err(Error::BasisTooLarge(basis.len()));
    }
    let grid = WeightedGrid::build(dom, spec, exec)?;
    let matrix = grid.gram(basis, exec)?;
    let m = basis.len();
    let scale = matrix.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    let defect = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| (matrix[i][j] - matrix[j][i].conj()).norm())
        .fold(0.0, f64::max);
    let herm = DMatrix::from_fn(m, m, |i, j| 0.5 * (matrix[i][j] + matrix[j][i].conj()));
    let mut eigenvalues: Vec<f64> = if m == 0 {
        Vec::new()
    } else {
        herm.symmetric_eigenvalues().iter().copied().collect()
    };
    eigenvalues.sort_by(f64::total_cmp);
    Ok(GramResult {
        hermitian_defect: if scale > 0.0 { defect / scale } else { 0.0 },
        min_eigenvalue: eigenvalues.first().copied().unwrap_or(0.0),
        max_eigenvalue: eigenvalues.last().copied().unwrap_or(0.0),
        eigenvalues,
        matrix,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuousSeries {
    /// `|(f, v g) - (v^* f, g)|`, relative.
    pub v_residual: f64,
    /// `|(f, u g) - (u f, g)|`, relative.
    pub u_residual: f64,
    /// `(f, u f)`, real and positive for a Hermitian positive `u`.
    pub u_form: Complex64,
}

/// `int conj(f(x)) g(x) dx` on `[-X, X]`.
pub fn l2_inner(f: &GepFunction, g: &GepFunction, dom: &DomainSpec) -> Result<Complex64> {
    let rule = composite_by_length(-dom.x_half, dom.x_half, PANEL, dom.nx);
    let terms = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| {
            let z = Complex64::new(x, 0.0);
            let v = f.eval(z).conj() * g.eval(z) * w;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFiniteIntegrand(z))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms))
}

/// Adjoints of `u` and `v` in the flat `L^2(R)` product, Regime I only.
/// `v^* f(x) = f(x - conj(2 omega_p))`, which is `v` itself in this regime.
pub fn continuous_series_check(
    params: &RegimeParams,
    f: &GepFunction,
    g: &GepFunction,
    dom: &DomainSpec,
) -> Result<ContinuousSeries> {
    if params.regime() != Regime::I {
        return Err(Error::RequiresRegimeI);
    }
    if dom.region != Region::RealLine {
        return Err(Error::InvalidDomain("continuous series lives on the real line".into()));
    }
    dom.rectangle(params)?;
    let rel = |a: Complex64, b: Complex64| (a - b).norm() / (a.norm() + b.norm() + EPS);
    let vg = g.shift(2.0 * params.omega_p());
    let v_star_f = f.shift(-(2.0 * params.omega_p()).conj());
    let v_residual = rel(l2_inner(f, &vg, dom)?, l2_inner(&v_star_f, g, dom)?);
    let gamma = -Complex64::new(0.0, PI) / params.omega();
    let u_residual = rel(
        l2_inner(f, &g.mul_exp(gamma), dom)?,
        l2_inner(&f.mul_exp(gamma), g, dom)?,
    );
    let u_form = l2_inner(f, &f.mul_exp(gamma), dom)?;
    Ok(ContinuousSeries {
        v_residual,
        u_residual,
        u_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{params_from_angle, params_from_tau, Convention};

    fn setup() -> (WeightSpec, DomainSpec, f64) {
        let p = params_from_angle(PI / 3.0).unwrap();
        let spec = WeightSpec::discrete(p, 3, Convention::Sec3).unwrap();
        (spec, DomainSpec::strip(3, 2), 1.5 * p.mu())
    }

    #[test]
    fn rectangles() {
        let (spec, dom, _) = setup();
        let mu = spec.params().mu();
        let r = dom.rectangle(spec.params()).unwrap();
        assert_eq!(r.y, (mu, 2.0 * mu));
        assert!(!r.truncated_y);
        let top = DomainSpec::strip(3, 3).rectangle(spec.params()).unwrap();
        assert_eq!(top.y, (2.0 * mu, 2.0 * mu + DEFAULT_YPAD));
        assert!(top.truncated_y);
        let whole = DomainSpec::strip(1, 1).rectangle(spec.params()).unwrap();
        assert_eq!(whole.y, (-DEFAULT_YPAD, DEFAULT_YPAD));
        assert!(DomainSpec::strip(3, 4).rectangle(spec.params()).is_err());
        assert!(dom.with_orders(7, 24).rectangle(spec.params()).is_err());
        assert!(dom.with_x(-1.0).rectangle(spec.params()).is_err());
    }

    #[test]
    fn zero_conjugate_symmetry_and_sesquilinearity() {
        let (spec, dom, yc) = setup();
        let (f, g) = default_test_pair(DEFAULT_SIGMA, yc).unwrap();
        let z = GepFunction::zero(DEFAULT_SIGMA).unwrap();
        assert_eq!(
            inner_product(&z, &z, &dom, &spec, Exec::Sequential).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let fg = inner_product(&f, &g, &dom, &spec, Exec::Sequential).unwrap();
        let gf = inner_product(&g, &f, &dom, &spec, Exec::Sequential).unwrap();
        assert!((fg - gf.conj()).norm() < 1e-10 * fg.norm());
        let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(-2.0, 0.5));
        let h = centered_basis(DEFAULT_SIGMA, yc, 3).unwrap().remove(2);
        let mix = g.scale(a).add(&h.scale(b));
        let lhs = inner_product(&f, &mix, &dom, &spec, Exec::Sequential).unwrap();
        let fh = inner_product(&f, &h, &dom, &spec, Exec::Sequential).unwrap();
        assert!((lhs - (a * fg + b * fh)).norm() < 1e-12 * lhs.norm());
    }

    #[test]
    fn norm_is_positive_on_middle_strip() {
        let (spec, dom, yc) = setup();
        let (f, _) = default_test_pair(DEFAULT_SIGMA, yc).unwrap();
        let n = inner_product(&f, &f, &dom, &spec, Exec::Sequential).unwrap();
        assert!(n.re > 0.0 && n.im.abs() < 1e-12 * n.re, "{n}");
    }

    #[test]
    fn modes_agree_bitwise() {
        let (spec, dom, yc) = setup();
        let (f, g) = default_test_pair(DEFAULT_SIGMA, yc).unwrap();
        let a = inner_product(&f, &g, &dom, &spec, Exec::Sequential).unwrap();
        let b = inner_product(&f, &g, &dom, &spec, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn order_doubling_converges() {
        let (spec, dom, yc) = setup();
        let (f, g) = default_test_pair(DEFAULT_SIGMA, yc).unwrap();
        let a = inner_product(&f, &g, &dom, &spec, Exec::default()).unwrap();
        let b = inner_product(&f, &g, &dom.with_orders(48, 48), &spec, Exec::default()).unwrap();
        assert!((a - b).norm() < 1e-8 * a.norm());
    }

    #[test]
    fn k_pair_truncation_decays() {
        let (spec, dom, yc) = setup();
        let (f, g) = default_test_pair(DEFAULT_SIGMA, yc).unwrap();
        let pair = (OpName::KTilde, OpName::K);
        let r4 = hermiticity_residual(pair, &f, &g, &dom.with_x(4.0), &spec, Exec::default()).unwrap();
        let r6 = hermiticity_residual(pair, &f, &g, &dom.with_x(6.0), &spec, Exec::default()).unwrap();
        assert!(r6.residual * 10.0 <= r4.residual, "{} {}", r4.residual, r6.residual);
        assert!(r6.residual < 1e-8);
    }

    #[test]
    fn rejects_non_pairs_and_large_bases() {
        let (spec, dom, yc) = setup();
        let (f, g) = default_test_pair(DEFAULT_SIGMA, yc).unwrap();
        let err = hermiticity_residual((OpName::K, OpName::E), &f, &g, &dom, &spec, Exec::default());
        assert_eq!(err.unwrap_err(), Error::NotADualPair("K", "E"));
        let basis = centered_basis(DEFAULT_SIGMA, yc, 33).unwrap();
        assert_eq!(
            gram_matrix(&basis, &dom, &spec, Exec::default()).unwrap_err(),
            Error::BasisTooLarge(33)
        );
    }

    #[test]
    fn gram_single_and_congruence() {
        let (spec, dom, yc) = setup();
        let basis = centered_basis(DEFAULT_SIGMA, yc, 1).unwrap();
        let g = gram_matrix(&basis, &dom, &spec, Exec::default()).unwrap();
        assert!(g.matrix[0][0].im.abs() < 1e-12 * g.matrix[0][0].re);
        let basis = centered_basis(DEFAULT_SIGMA, yc, 4).unwrap();
        let g = gram_matrix(&basis, &dom, &spec, Exec::default()).unwrap();
        let scaled: Vec<GepFunction> = basis
            .iter()
            .enumerate()
            .map(|(k, b)| b.scale(Complex64::new(1.0 + k as f64, -0.5)))
            .collect();
        let gs = gram_matrix(&scaled, &dom, &spec, Exec::default()).unwrap();
        let signs = |r: &GramResult| r.eigenvalues.iter().map(|e| *e > 0.0).collect::<Vec<_>>();
        assert_eq!(signs(&g), signs(&gs));
        assert!(g.hermitian_defect < 1e-10);
    }

    #[test]
    fn continuous_series_adjoints() {
        let p = params_from_tau(Complex64::new(4.0, 0.0), Regime::I).unwrap();
        let f = GepFunction::gaussian(1.0).unwrap();
        let dom = DomainSpec::real_line(10.0);
        let r = continuous_series_check(&p, &f, &f, &dom).unwrap();
        assert!(r.v_residual < 1e-8 && r.u_residual < 1e-8, "{r:?}");
        assert!(r.u_form.re > 0.0 && r.u_form.im.abs() < 1e-12 * r.u_form.re);
        let back = f.shift(2.0 * p.omega_p()).shift(-2.0 * p.omega_p());
        assert!((back.eval(Complex64::new(0.3, 0.1)) - f.eval(Complex64::new(0.3, 0.1))).norm() < 1e-12);
        let p2 = params_from_angle(PI / 3.0).unwrap();
        assert_eq!(
            continuous_series_check(&p2, &f, &f, &dom).unwrap_err(),
            Error::RequiresRegimeI
        );
    }
}
