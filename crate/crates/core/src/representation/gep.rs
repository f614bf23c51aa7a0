use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Two exponents closer than this are merged into one term.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GepTerm {
    pub coeff: Complex64,
    pub beta: Complex64,
    pub k: u32,
}

/// `f(z) = sum coeff * exp(-sigma z^2 + beta z) * z^k` with one shared `sigma > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GepFunction {
    sigma: f64,
    terms: Vec<GepTerm>,
}

fn term_order(a: &GepTerm, b: &GepTerm) -> Ordering {
    a.k.cmp(&b.k)
        .then(a.beta.re.total_cmp(&b.beta.re))
        .then(a.beta.im.total_cmp(&b.beta.im))
}

impl GepFunction {
    pub fn new(sigma: f64, terms: Vec<GepTerm>) -> Result<GepFunction> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidSigma(sigma));
        }
        Ok(Self::canonical(sigma, terms))
    }

    pub fn zero(sigma: f64) -> Result<GepFunction> {
        Self::new(sigma, Vec::new())
    }

    /// `coeff * exp(-sigma z^2 + beta z) z^k`.
    pub fn monomial(sigma: f64, coeff: Complex64, beta: Complex64, k: u32) -> Result<GepFunction> {
        Self::new(sigma, vec![GepTerm { coeff, beta, k }])
    }

    /// `exp(-sigma z^2)`.
    pub fn gaussian(sigma: f64) -> Result<GepFunction> {
        Self::monomial(sigma, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 0)
    }

    pub(crate) fn canonical(sigma: f64, mut terms: Vec<GepTerm>) -> GepFunction {
        terms.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
        terms.sort_by(term_order);
        let mut merged: Vec<GepTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.k == t.k && (last.beta - t.beta).norm() <= MERGE_TOL => {
                    last.coeff += t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
        GepFunction { sigma, terms: merged }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn terms(&self) -> &[GepTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let g = -self.sigma * z * z;
        self.terms
            .iter()
            .map(|t| t.coeff * (g + t.beta * z).exp() * z.powu(t.k))
            .sum()
    }

    pub fn scale(&self, c: Complex64) -> GepFunction {
        let terms = self
            .terms
            .iter()
            .map(|t| GepTerm {
                coeff: c * t.coeff,
                ..*t
            })
            .collect();
        Self::canonical(self.sigma, terms)
    }

    /// `self + other`; both must share `sigma`.
    pub fn add(&self, other: &GepFunction) -> GepFunction {
        assert_eq!(self.sigma, other.sigma, "GEP functions with different widths");
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::canonical(self.sigma, terms)
    }

    /// Multiplication by `exp(gamma z)`.
    pub fn mul_exp(&self, gamma: Complex64) -> GepFunction {
        let terms = self
            .terms
            .iter()
            .map(|t| GepTerm {
                beta: t.beta + gamma,
                ..*t
            })
            .collect();
        Self::canonical(self.sigma, terms)
    }

    /// `z -> f(z + h)`.
    pub fn shift(&self, h: Complex64) -> GepFunction {
        let s = self.sigma;
        let mut out = Vec::new();
        for t in &self.terms {
            let c = t.coeff * (-s * h * h + t.beta * h).exp();
            let beta = t.beta - 2.0 * s * h;
            let mut binom = 1.0;
            for j in (0..=t.k).rev() {
                // C(k, j) h^(k-j), j descending from k
                out.push(GepTerm {
                    coeff: c * binom * h.powu(t.k - j),
                    beta,
                    k: j,
                });
                binom = binom * j as f64 / (t.k - j + 1) as f64;
            }
        }
        Self::canonical(s, out)
    }

    /// Coefficientwise conjugate: `conj(f(conj(z)))`.
    pub fn conj(&self) -> GepFunction {
        let terms = self
            .terms
            .iter()
            .map(|t| GepTerm {
                coeff: t.coeff.conj(),
                beta: t.beta.conj(),
                k: t.k,
            })
            .collect();
        Self::canonical(self.sigma, terms)
    }
}
