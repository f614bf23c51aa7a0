use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use super::gep::GepFunction;
use crate::error::Error;
use crate::params::{RegimeParams, Spin};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OpName {
    U,
    UInv,
    V,
    VInv,
    UTilde,
    UTildeInv,
    VTilde,
    VTildeInv,
    K,
    KInv,
    E,
    F,
    KTilde,
    KTildeInv,
    ETilde,
    FTilde,
    C,
}

impl OpName {
    pub const ALL: [OpName; 17] = [
        OpName::U,
        OpName::UInv,
        OpName::V,
        OpName::VInv,
        OpName::UTilde,
        OpName::UTildeInv,
        OpName::VTilde,
        OpName::VTildeInv,
        OpName::K,
        OpName::KInv,
        OpName::E,
        OpName::F,
        OpName::KTilde,
        OpName::KTildeInv,
        OpName::ETilde,
        OpName::FTilde,
        OpName::C,
    ];

    pub const PLAIN: [OpName; 8] = [
        OpName::U,
        OpName::UInv,
        OpName::V,
        OpName::VInv,
        OpName::K,
        OpName::KInv,
        OpName::E,
        OpName::F,
    ];

    pub const TILDE: [OpName; 8] = [
        OpName::UTilde,
        OpName::UTildeInv,
        OpName::VTilde,
        OpName::VTildeInv,
        OpName::KTilde,
        OpName::KTildeInv,
        OpName::ETilde,
        OpName::FTilde,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OpName::U => "u",
            OpName::UInv => "u^-1",
            OpName::V => "v",
            OpName::VInv => "v^-1",
            OpName::UTilde => "u~",
            OpName::UTildeInv => "u~^-1",
            OpName::VTilde => "v~",
            OpName::VTildeInv => "v~^-1",
            OpName::K => "K",
            OpName::KInv => "K^-1",
            OpName::E => "E",
            OpName::F => "F",
            OpName::KTilde => "K~",
            OpName::KTildeInv => "K~^-1",
            OpName::ETilde => "E~",
            OpName::FTilde => "F~",
            OpName::C => "C",
        }
    }

    /// The operator obtained by interchanging `omega` and `omega_p`.
    pub fn tilde(self) -> OpName {
        use OpName::*;
        match self {
            U => UTilde,
            UInv => UTildeInv,
            V => VTilde,
            VInv => VTildeInv,
            K => KTilde,
            KInv => KTildeInv,
            E => ETilde,
            F => FTilde,
            UTilde => U,
            UTildeInv => UInv,
            VTilde => V,
            VTildeInv => VInv,
            KTilde => K,
            KTildeInv => KInv,
            ETilde => E,
            FTilde => F,
            C => C,
        }
    }
}

impl fmt::Display for OpName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OpName {
    type Err = Error;

    fn from_str(s: &str) -> Result<OpName, Error> {
        OpName::ALL
            .into_iter()
            .find(|op| op.as_str() == s)
            .ok_or_else(|| Error::UnknownOperator(s.to_string()))
    }
}

/// An operator name together with the numeric data it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSymbol {
    pub name: OpName,
    pub spin: Spin,
    pub params: RegimeParams,
}

/// Data for one member of the modular double: periods, deformation
/// parameter, and central value.
struct Side {
    omega: Complex64,
    omega_p: Complex64,
    q: Complex64,
    z: Complex64,
}

impl Side {
    fn u(&self, f: &GepFunction, power: i32) -> GepFunction {
        f.mul_exp(-(power as f64) * I * PI / self.omega)
    }

    fn v(&self, f: &GepFunction, power: i32) -> GepFunction {
        f.shift(2.0 * power as f64 * self.omega_p)
    }

    fn k(&self, f: &GepFunction) -> GepFunction {
        self.u(&self.v(f, 1), 1).scale(self.q.inv())
    }

    fn k_inv(&self, f: &GepFunction) -> GepFunction {
        self.v(&self.u(f, -1), -1).scale(self.q)
    }

    fn e(&self, f: &GepFunction) -> GepFunction {
        let c = I / (self.q - self.q.inv());
        self.v(f, 1).add(&self.u(f, -1).scale(self.z)).scale(c)
    }

    fn f(&self, f: &GepFunction) -> GepFunction {
        let c = I / (self.q - self.q.inv());
        self.u(f, 1).add(&self.v(f, -1).scale(self.z.inv())).scale(c)
    }

    fn casimir(&self, f: &GepFunction) -> GepFunction {
        let d = self.q - self.q.inv();
        self.k(f)
            .scale(self.q)
            .add(&self.k_inv(f).scale(self.q.inv()))
            .add(&self.f(&self.e(f)).scale(d * d))
    }
}

impl OperatorSymbol {
    pub fn new(name: OpName, params: RegimeParams, spin: Spin) -> OperatorSymbol {
        OperatorSymbol { name, spin, params }
    }

    fn plain(&self) -> Side {
        Side {
            omega: self.params.omega(),
            omega_p: self.params.omega_p(),
            q: self.params.q(),
            z: self.spin.z,
        }
    }

    fn dual(&self) -> Side {
        Side {
            omega: self.params.omega_p(),
            omega_p: self.params.omega(),
            q: self.params.q_tilde(),
            z: self.spin.z_tilde,
        }
    }

    pub fn apply(&self, f: &GepFunction) -> GepFunction {
        use OpName::*;
        let (p, d) = (self.plain(), self.dual());
        match self.name {
            U => p.u(f, 1),
            UInv => p.u(f, -1),
            V => p.v(f, 1),
            VInv => p.v(f, -1),
            UTilde => d.u(f, 1),
            UTildeInv => d.u(f, -1),
            VTilde => d.v(f, 1),
            VTildeInv => d.v(f, -1),
            K => p.k(f),
            KInv => p.k_inv(f),
            E => p.e(f),
            F => p.f(f),
            KTilde => d.k(f),
            KTildeInv => d.k_inv(f),
            ETilde => d.e(f),
            FTilde => d.f(f),
            C => p.casimir(f),
        }
    }
}

/// `apply(op, f)` with the operator assembled from `params` and `spin`.
pub fn apply(name: OpName, params: &RegimeParams, spin: &Spin, f: &GepFunction) -> GepFunction {
    OperatorSymbol::new(name, *params, *spin).apply(f)
}

/// Composition `a(b(f))`.
pub fn compose(a: OpName, b: OpName, params: &RegimeParams, spin: &Spin, f: &GepFunction) -> GepFunction {
    apply(a, params, spin, &apply(b, params, spin, f))
}

/// `max |lhs(z) - rhs(z)| / (|lhs(z)| + |rhs(z)| + eps)` over the samples.
pub fn pointwise_gap(lhs: &GepFunction, rhs: &GepFunction, samples: &[Complex64]) -> f64 {
    samples
        .iter()
        .map(|&z| {
            let (a, b) = (lhs.eval(z), rhs.eval(z));
            (a - b).norm() / (a.norm() + b.norm() + f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// `max |(C f)(z) + (Z + Z^{-1}) f(z)| / (|f(z)| + eps)`.
pub fn casimir_residual(f: &GepFunction, spin: &Spin, params: &RegimeParams, samples: &[Complex64]) -> f64 {
    let cf = apply(OpName::C, params, spin, f);
    let central = spin.z + spin.z.inv();
    samples
        .iter()
        .map(|&z| {
            let fz = f.eval(z);
            (cf.eval(z) + central * fz).norm() / (fz.norm() + f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// Residual of the eigen-equation `C f = -(Z + Z^{-1}) f` relative to the size
/// of either side: `max |(C f)(z) + (Z + Z^{-1}) f(z)| / ((|Z + Z^{-1}| + 1) |f(z)| + eps)`.
/// Unlike [`casimir_residual`] it does not grow with `|Z|`.
pub fn casimir_eigen_residual(f: &GepFunction, spin: &Spin, params: &RegimeParams, samples: &[Complex64]) -> f64 {
    let central = spin.z + spin.z.inv();
    casimir_residual(f, spin, params, samples) / (central.norm() + 1.0)
}

/// Pointwise residuals of the three defining relations at numeric `q`:
/// `KE - q^2 EK`, `KF - q^{-2} FK`, `EF - FE - (K - K^{-1})/(q - q^{-1})`.
pub fn relation_residuals(f: &GepFunction, spin: &Spin, params: &RegimeParams, samples: &[Complex64]) -> [f64; 3] {
    use OpName::*;
    let q = params.q();
    let c = |a, b| compose(a, b, params, spin, f);
    let r1 = pointwise_gap(&c(K, E), &c(E, K).scale(q * q), samples);
    let r2 = pointwise_gap(&c(K, F), &c(F, K).scale((q * q).inv()), samples);
    let kk = apply(K, params, spin, f).add(&apply(KInv, params, spin, f).scale(-Complex64::new(1.0, 0.0)));
    let rhs = c(F, E).add(&kk.scale((q - q.inv()).inv()));
    let r3 = pointwise_gap(&c(E, F), &rhs, samples);
    [r1, r2, r3]
}
