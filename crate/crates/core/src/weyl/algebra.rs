//! Normal-ordered Laurent polynomials in the Weyl pair `u, v` (with
//! `u v = q^2 v u`) and a central `Z`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::qcoeff::QCoefficient;

/// Exponents of the normal-ordered monomial `u^a v^b Z^c`.
pub type Exponents = (i64, i64, i64);

/// Finite sum of `coefficient * u^a v^b Z^c`, zero coefficients never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlgebraElement {
    terms: BTreeMap<Exponents, QCoefficient>,
}

impl AlgebraElement {
    pub fn zero() -> AlgebraElement {
        AlgebraElement::default()
    }

    pub fn one() -> AlgebraElement {
        AlgebraElement::monomial((0, 0, 0), QCoefficient::one())
    }

    pub fn monomial(exp: Exponents, coeff: QCoefficient) -> AlgebraElement {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        AlgebraElement { terms }
    }

    pub fn u(power: i64) -> AlgebraElement {
        AlgebraElement::monomial((power, 0, 0), QCoefficient::one())
    }

    pub fn v(power: i64) -> AlgebraElement {
        AlgebraElement::monomial((0, power, 0), QCoefficient::one())
    }

    pub fn z(power: i64) -> AlgebraElement {
        AlgebraElement::monomial((0, 0, power), QCoefficient::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: Exponents) -> QCoefficient {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &QCoefficient)> {
        self.terms.iter()
    }

    fn accumulate(&mut self, exp: Exponents, coeff: QCoefficient) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_default();
        let sum = &*entry + &coeff;
        if sum.is_zero() {
            self.terms.remove(&exp);
        } else {
            *entry = sum;
        }
    }

    pub fn scale(&self, c: &QCoefficient) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (e, x) in &self.terms {
            out.accumulate(*e, x * c);
        }
        out
    }

    /// Normal-ordered product using `v^b u^a = q^{-2ab} u^a v^b`.
    pub fn multiply(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (&(a1, b1, c1), x) in &self.terms {
            for (&(a2, b2, c2), y) in &other.terms {
                let reorder = QCoefficient::q_pow(-2 * b1 * a2);
                out.accumulate((a1 + a2, b1 + b2, c1 + c2), &(x * y) * &reorder);
            }
        }
        out
    }

    /// Canonical one-term-per-line text form `c · u^a v^b Z^c`, sorted by
    /// exponent triple.
    pub fn canonical_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(&(a, b, c), x)| format!("{x} · u^{a} v^{b} Z^{c}"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_text().replace('\n', " + "))
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (e, x) in &rhs.terms {
            out.accumulate(*e, x.clone());
        }
        out
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement {
            terms: self.terms.iter().map(|(e, x)| (*e, -x)).collect(),
        }
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self + &(-rhs)
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.multiply(rhs)
    }
}

/// `E, F, K, K^{-1}` in terms of `u, v, Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generators {
    pub e: AlgebraElement,
    pub f: AlgebraElement,
    pub k: AlgebraElement,
    pub k_inv: AlgebraElement,
}

/// `1 / (q - q^{-1})`
pub fn inv_q_difference() -> QCoefficient {
    (&QCoefficient::q_pow(1) - &QCoefficient::q_pow(-1))
        .inv()
        .expect("q - 1/q is a nonzero rational function")
}

/// `E = i (v + u^{-1} Z)/(q - q^{-1})`, `F = i (u + v^{-1} Z^{-1})/(q - q^{-1})`,
/// `K = q^{-1} u v`.
pub fn build_generators() -> Generators {
    let pref = &QCoefficient::i() * &inv_q_difference();
    let e = (&AlgebraElement::v(1) + &AlgebraElement::monomial((-1, 0, 1), QCoefficient::one())).scale(&pref);
    let f = (&AlgebraElement::u(1) + &AlgebraElement::monomial((0, -1, -1), QCoefficient::one())).scale(&pref);
    let k = AlgebraElement::monomial((1, 1, 0), QCoefficient::q_pow(-1));
    // (q^{-1} u v)^{-1} = q v^{-1} u^{-1} = q^{-1} u^{-1} v^{-1}
    let k_inv = AlgebraElement::monomial((-1, -1, 0), QCoefficient::q_pow(-1));
    Generators { e, f, k, k_inv }
}

/// `[KE - q^2 EK, KF - q^{-2} FK, EF - FE - (K - K^{-1})/(q - q^{-1})]`;
/// every entry is exactly zero.
pub fn relation_residuals() -> [AlgebraElement; 3] {
    let g = build_generators();
    let q2 = QCoefficient::q_pow(2);
    let qm2 = QCoefficient::q_pow(-2);
    let r1 = &(&g.k * &g.e) - &(&g.e * &g.k).scale(&q2);
    let r2 = &(&g.k * &g.f) - &(&g.f * &g.k).scale(&qm2);
    let r3 = &(&(&g.e * &g.f) - &(&g.f * &g.e)) - &(&g.k - &g.k_inv).scale(&inv_q_difference());
    [r1, r2, r3]
}

/// `C = q K + q^{-1} K^{-1} + (q - q^{-1})^2 F E`, which reduces to `-(Z + Z^{-1})`.
pub fn casimir() -> AlgebraElement {
    let g = build_generators();
    let diff = &QCoefficient::q_pow(1) - &QCoefficient::q_pow(-1);
    let diff2 = &diff * &diff;
    &(&g.k.scale(&QCoefficient::q_pow(1)) + &g.k_inv.scale(&QCoefficient::q_pow(-1))) + &(&g.f * &g.e).scale(&diff2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_times_u_reorders() {
        let vu = &AlgebraElement::v(1) * &AlgebraElement::u(1);
        assert_eq!(vu, AlgebraElement::monomial((1, 1, 0), QCoefficient::q_pow(-2)));
    }

    #[test]
    fn uv_squared() {
        let uv = AlgebraElement::monomial((1, 1, 0), QCoefficient::one());
        assert_eq!(&uv * &uv, AlgebraElement::monomial((2, 2, 0), QCoefficient::q_pow(-2)));
    }

    #[test]
    fn identity_element() {
        let g = build_generators();
        assert_eq!(&g.e * &AlgebraElement::one(), g.e);
        assert_eq!(&AlgebraElement::one() * &g.e, g.e);
    }

    #[test]
    fn generator_shapes() {
        let g = build_generators();
        assert_eq!(g.k.len(), 1);
        assert_eq!(g.k.coefficient((1, 1, 0)), QCoefficient::q_pow(-1));
        let exps: Vec<_> = g.e.terms().map(|(e, _)| *e).collect();
        assert_eq!(exps, vec![(-1, 0, 1), (0, 1, 0)]);
        assert_eq!(&g.k * &g.k_inv, AlgebraElement::one());
        assert_eq!(&g.k_inv * &g.k, AlgebraElement::one());
    }

    #[test]
    fn relations_vanish_exactly() {
        for r in relation_residuals() {
            assert!(r.is_zero(), "nonzero residual: {r}");
        }
    }

    #[test]
    fn casimir_reduces_to_central_element() {
        let c = casimir();
        let target = &(-&AlgebraElement::z(1)) - &AlgebraElement::z(-1);
        assert_eq!(c, target);
        assert!((&c + &(&AlgebraElement::z(1) + &AlgebraElement::z(-1))).is_zero());
        assert_eq!(c.coefficient((0, 0, 1)), -&QCoefficient::one());
        let g = build_generators();
        assert!((&(&c * &g.e) - &(&g.e * &c)).is_zero());
        assert!((&(&c * &g.f) - &(&g.f * &c)).is_zero());
        assert!((&(&c * &g.k) - &(&g.k * &c)).is_zero());
    }

    #[test]
    fn canonical_text_golden() {
        let g = build_generators();
        assert_eq!(
            g.e.canonical_text(),
            "(i*q)/(q^2 + -1) · u^-1 v^0 Z^1\n(i*q)/(q^2 + -1) · u^0 v^1 Z^0"
        );
        assert_eq!(casimir().canonical_text(), "(-1) · u^0 v^0 Z^-1\n(-1) · u^0 v^0 Z^1");
        assert_eq!(AlgebraElement::zero().canonical_text(), "0");
    }
}
