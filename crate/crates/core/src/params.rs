//! Half-period parameter sets for the two real forms.
//!
//! All quantities are derived from `tau` through `omega * omega_p = -1/4` and
//! `tau = omega_p / omega`. The square-root branch is fixed so that
//! `omega_pp = omega + omega_p = i * mu` with `mu > 0` in both regimes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance used to decide whether a user-supplied `tau` lies on a regime locus.
pub const LOCUS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `tau` real and positive; `omega`, `omega_p` purely imaginary.
    I,
    /// `|tau| = 1`, `Im tau > 0`; `conj(omega) = -omega_p`.
    II,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::I => write!(f, "I"),
            Regime::II => write!(f, "II"),
        }
    }
}

/// Immutable parameter set. Construct with [`params_from_tau`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    regime: Regime,
    tau: Complex64,
    tau_inv: Complex64,
    omega: Complex64,
    omega_p: Complex64,
    omega_pp: Complex64,
    q: Complex64,
    q_tilde: Complex64,
    mu: f64,
}

impl RegimeParams {
    pub fn regime(&self) -> Regime {
        self.regime
    }
    pub fn tau(&self) -> Complex64 {
        self.tau
    }
    pub fn omega(&self) -> Complex64 {
        self.omega
    }
    pub fn omega_p(&self) -> Complex64 {
        self.omega_p
    }
    pub fn omega_pp(&self) -> Complex64 {
        self.omega_pp
    }
    pub fn q(&self) -> Complex64 {
        self.q
    }
    pub fn q_tilde(&self) -> Complex64 {
        self.q_tilde
    }
    /// `mu = omega_pp / i`, the spacing of the zero lines of the weight.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Interchange `omega` and `omega_p`. An exact involution.
    pub fn dual(&self) -> RegimeParams {
        RegimeParams {
            regime: self.regime,
            tau: self.tau_inv,
            tau_inv: self.tau,
            omega: self.omega_p,
            omega_p: self.omega,
            omega_pp: self.omega_pp,
            q: self.q_tilde,
            q_tilde: self.q,
            mu: self.mu,
        }
    }

    /// Largest violation of the structural invariants, for property tests and
    /// report sanity checks. Returns `(name, defect)` pairs.
    pub fn invariant_defects(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![
            ("omega*omega_p = -1/4", (self.omega * self.omega_p + 0.25).norm()),
            (
                "tau = omega_p/omega",
                (self.tau - self.omega_p / self.omega).norm() / self.tau.norm(),
            ),
            (
                "omega_pp = omega + omega_p",
                (self.omega_pp - self.omega - self.omega_p).norm(),
            ),
            ("omega_pp pure imaginary", self.omega_pp.re.abs()),
            ("mu = omega_pp/i", (self.omega_pp / I - self.mu).norm()),
            ("q = exp(i pi tau)", (self.q - (I * PI * self.tau).exp()).norm()),
            (
                "q_tilde = exp(i pi/tau)",
                (self.q_tilde - (I * PI / self.tau).exp()).norm(),
            ),
            (
                "q = -exp(i pi omega_pp/omega)",
                (self.q + (I * PI * self.omega_pp / self.omega).exp()).norm(),
            ),
        ];
        match self.regime {
            Regime::I => {
                out.push(("tau real", self.tau.im.abs()));
                out.push(("conj(omega) = -omega", (self.omega.conj() + self.omega).norm()));
                out.push(("conj(omega_p) = -omega_p", (self.omega_p.conj() + self.omega_p).norm()));
            }
            Regime::II => {
                out.push(("|tau| = 1", (self.tau.norm() - 1.0).abs()));
                out.push(("conj(omega) = -omega_p", (self.omega.conj() + self.omega_p).norm()));
            }
        }
        out
    }

    pub fn max_invariant_defect(&self) -> f64 {
        self.invariant_defects().into_iter().map(|(_, d)| d).fold(0.0, f64::max)
    }
}

/// Build the parameter set for `tau` in the given regime.
///
/// Regime I uses `omega = i / (2 sqrt(tau))`; Regime II with `tau = e^{i theta}`
/// uses `omega = e^{i (pi - theta)/2} / 2`. Both give `mu > 0`.
pub fn params_from_tau(tau: Complex64, regime: Regime) -> Result<RegimeParams> {
    if !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(Error::OffRegimeLocus {
            tau,
            regime: regime_name(regime),
            reason: "tau must be finite",
        });
    }
    match regime {
        Regime::I => {
            if tau.im.abs() > LOCUS_TOL * tau.norm().max(1.0) || tau.re <= 0.0 {
                return Err(Error::OffRegimeLocus {
                    tau,
                    regime: "I",
                    reason: "tau must be real and positive",
                });
            }
            let t = tau.re;
            let s = t.sqrt();
            let omega = Complex64::new(0.0, 0.5 / s);
            let omega_p = Complex64::new(0.0, 0.5 * s);
            Ok(assemble(
                Regime::I,
                Complex64::new(t, 0.0),
                Complex64::new(1.0 / t, 0.0),
                omega,
                omega_p,
                0.5 * (s + 1.0 / s),
            ))
        }
        Regime::II => {
            if (tau.norm() - 1.0).abs() > LOCUS_TOL {
                return Err(Error::OffRegimeLocus {
                    tau,
                    regime: "II",
                    reason: "|tau| must equal 1",
                });
            }
            let theta = tau.arg();
            if !(theta > LOCUS_TOL && theta < PI - LOCUS_TOL) {
                return Err(Error::OffRegimeLocus {
                    tau,
                    regime: "II",
                    reason: "Im tau must be strictly positive (tau = +-1 is degenerate)",
                });
            }
            Ok(from_angle(theta))
        }
    }
}

/// Regime II parameters for `tau = e^{i theta}`, `theta` in radians.
pub fn params_from_angle(theta: f64) -> Result<RegimeParams> {
    params_from_tau(Complex64::from_polar(1.0, theta), Regime::II)
}

fn from_angle(theta: f64) -> RegimeParams {
    let omega = Complex64::from_polar(0.5, 0.5 * (PI - theta));
    let omega_p = Complex64::from_polar(0.5, 0.5 * (PI + theta));
    assemble(
        Regime::II,
        Complex64::from_polar(1.0, theta),
        Complex64::from_polar(1.0, -theta),
        omega,
        omega_p,
        (0.5 * theta).cos(),
    )
}

fn assemble(
    regime: Regime,
    tau: Complex64,
    tau_inv: Complex64,
    omega: Complex64,
    omega_p: Complex64,
    mu: f64,
) -> RegimeParams {
    RegimeParams {
        regime,
        tau,
        tau_inv,
        omega,
        omega_p,
        omega_pp: Complex64::new(0.0, mu),
        q: (I * PI * tau).exp(),
        q_tilde: (I * PI * tau_inv).exp(),
        mu,
    }
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::I => "I",
        Regime::II => "II",
    }
}

/// Sign convention for the central element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    /// `Z = exp(i pi a / omega)`, `Z~ = exp(i pi a / omega_p)`.
    Sec2,
    /// `Z = exp(-i pi a / omega)`, `Z~ = exp(-i pi a / omega_p)`.
    Sec3,
}

impl std::str::FromStr for Convention {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sec2" | "2" => Ok(Convention::Sec2),
            "sec3" | "3" => Ok(Convention::Sec3),
            other => Err(format!("unknown convention '{other}' (expected sec2 or sec3)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spin {
    pub convention: Convention,
    pub a: Complex64,
    pub z: Complex64,
    pub z_tilde: Complex64,
    /// Set when `a = n * omega_pp`.
    pub n: Option<u32>,
}

impl Spin {
    pub fn new(params: &RegimeParams, a: Complex64, convention: Convention) -> Spin {
        let sign = match convention {
            Convention::Sec2 => 1.0,
            Convention::Sec3 => -1.0,
        };
        Spin {
            convention,
            a,
            z: (sign * I * PI * a / params.omega()).exp(),
            z_tilde: (sign * I * PI * a / params.omega_p()).exp(),
            n: None,
        }
    }

    /// The same spin seen from the dual side: `Z` and `Z~` trade places.
    pub fn dual(&self) -> Spin {
        Spin {
            z: self.z_tilde,
            z_tilde: self.z,
            ..*self
        }
    }
}

/// Discrete spin `a = n * omega_pp`.
pub fn discrete_spin(params: &RegimeParams, n: i64, convention: Convention) -> Result<Spin> {
    if n <= 0 {
        return Err(Error::NonPositiveSpin(n));
    }
    let mut spin = Spin::new(params, params.omega_pp() * n as f64, convention);
    spin.n = Some(n as u32);
    Ok(spin)
}

/// Liouville central charge `c = 1 + 6 (tau + 1/tau + 2)`.
pub fn central_charge(tau: Complex64) -> Result<Complex64> {
    if tau == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroTau);
    }
    Ok(1.0 + 6.0 * (tau + tau.inv() + 2.0))
}

/// JSON shape shared by the CLI `params` command and every report header.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ParamsRecord {
    pub regime: Regime,
    pub tau: Complex64,
    pub omega: Complex64,
    pub omega_p: Complex64,
    pub q: Complex64,
    pub mu: f64,
    pub a: Option<Complex64>,
    #[serde(rename = "Z")]
    pub z: Option<Complex64>,
    pub convention: Option<Convention>,
}

impl ParamsRecord {
    pub fn new(params: &RegimeParams, spin: Option<&Spin>) -> ParamsRecord {
        ParamsRecord {
            regime: params.regime(),
            tau: params.tau(),
            omega: params.omega(),
            omega_p: params.omega_p(),
            q: params.q(),
            mu: params.mu(),
            a: spin.map(|s| s.a),
            z: spin.map(|s| s.z),
            convention: spin.map(|s| s.convention),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn regime_one_tau_four() {
        let p = params_from_tau(c(4.0, 0.0), Regime::I).unwrap();
        assert!(close(p.omega(), c(0.0, 0.25), 1e-15));
        assert!(close(p.omega_p(), c(0.0, 1.0), 1e-15));
        assert!(close(p.omega_pp(), c(0.0, 1.25), 1e-15));
        assert!(p.max_invariant_defect() < 1e-14);
    }

    #[test]
    fn regime_one_symmetric_point() {
        let p = params_from_tau(c(1.0, 0.0), Regime::I).unwrap();
        assert!(close(p.omega(), c(0.0, 0.5), 1e-15));
        assert!(close(p.omega_p(), c(0.0, 0.5), 1e-15));
        assert!(close(p.omega_pp(), c(0.0, 1.0), 1e-15));
    }

    #[test]
    fn regime_two_tau_i() {
        let p = params_from_tau(c(0.0, 1.0), Regime::II).unwrap();
        let r = 2f64.sqrt() / 4.0;
        assert!(close(p.omega(), c(r, r), 1e-15));
        assert!(close(p.omega_p(), c(-r, r), 1e-15));
        assert!(close(p.omega_pp(), c(0.0, 2f64.sqrt() / 2.0), 1e-15));
        assert_abs_diff_eq!(p.mu(), 2f64.sqrt() / 2.0, epsilon = 1e-15);
        assert!(close(p.omega().conj(), -p.omega_p(), 1e-15));
        assert!(p.max_invariant_defect() < 1e-14);
    }

    #[test]
    fn rejects_off_locus() {
        assert!(params_from_tau(c(-1.0, 0.0), Regime::I).is_err());
        assert!(params_from_tau(c(1.0, 0.5), Regime::I).is_err());
        assert!(params_from_tau(c(0.5, 0.5), Regime::II).is_err());
        assert!(params_from_tau(c(1.0, 0.0), Regime::II).is_err());
        assert!(params_from_tau(c(-1.0, 0.0), Regime::II).is_err());
        assert!(params_from_tau(c(0.0, -1.0), Regime::II).is_err());
    }

    #[test]
    fn dual_swaps_and_is_involution() {
        let p = params_from_tau(c(4.0, 0.0), Regime::I).unwrap();
        let d = p.dual();
        assert!(close(d.tau(), c(0.25, 0.0), 1e-15));
        assert!(close(d.omega(), c(0.0, 1.0), 1e-15));
        assert!(close(d.omega_p(), c(0.0, 0.25), 1e-15));

        let p = params_from_tau(c(0.0, 1.0), Regime::II).unwrap();
        assert_eq!(p.dual().dual(), p);

        let p = params_from_angle(PI / 3.0).unwrap();
        let d = p.dual();
        assert_eq!(d.q(), p.q_tilde());
        assert_eq!(d.q_tilde(), p.q());
    }

    #[test]
    fn discrete_spin_tau_i() {
        let p = params_from_tau(c(0.0, 1.0), Regime::II).unwrap();
        let s = discrete_spin(&p, 1, Convention::Sec3).unwrap();
        assert!(close(s.a, c(0.0, 2f64.sqrt() / 2.0), 1e-15));
        let expected = (-I * PI * s.a / p.omega()).exp();
        assert!(close(s.z, expected, 1e-15));
        assert_eq!(s.n, Some(1));
        // imaginary spin in Regime II: conj(Z) * Z~ = 1
        assert!(close(s.z.conj() * s.z_tilde, c(1.0, 0.0), 1e-12));
        assert!(discrete_spin(&p, 0, Convention::Sec3).is_err());
        assert!(discrete_spin(&p, -2, Convention::Sec2).is_err());
    }

    #[test]
    fn central_charge_values() {
        assert!(close(central_charge(c(1.0, 0.0)).unwrap(), c(25.0, 0.0), 1e-13));
        assert!(close(central_charge(c(0.0, 1.0)).unwrap(), c(13.0, 0.0), 1e-13));
        // 1 + 6 (4 + 1/4 + 2)
        assert!(close(central_charge(c(4.0, 0.0)).unwrap(), c(38.5, 0.0), 1e-13));
        assert_eq!(central_charge(c(0.0, 0.0)), Err(Error::ZeroTau));
    }

    #[test]
    fn record_serializes_pairs() {
        let p = params_from_tau(c(0.0, 1.0), Regime::II).unwrap();
        let s = discrete_spin(&p, 2, Convention::Sec3).unwrap();
        let v = serde_json::to_value(ParamsRecord::new(&p, Some(&s))).unwrap();
        assert_eq!(v["regime"], "II");
        assert!(v["tau"].as_array().unwrap().len() == 2);
        assert!(v["Z"].is_array());
        assert_eq!(v["convention"], "Sec3");
        for key in ["omega", "omega_p", "q", "mu", "a"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
