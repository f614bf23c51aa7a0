//! Rational functions of `q` with Gaussian-rational coefficients.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::One;

use super::poly::{GaussRational, Poly};

/// `num / den`, reduced, with `den` monic. Equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QCoefficient {
    num: Poly,
    den: Poly,
}

impl QCoefficient {
    pub fn new(num: Poly, den: Poly) -> QCoefficient {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return QCoefficient::zero();
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead_inv = GaussRational::one() / den.lead().unwrap();
        QCoefficient {
            num: num.scale(&lead_inv),
            den: den.scale(&lead_inv),
        }
    }

    pub fn zero() -> QCoefficient {
        QCoefficient {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> QCoefficient {
        QCoefficient::constant(GaussRational::one())
    }

    pub fn constant(c: GaussRational) -> QCoefficient {
        QCoefficient::new(Poly::constant(c), Poly::one())
    }

    /// The imaginary unit.
    pub fn i() -> QCoefficient {
        QCoefficient::constant(GaussRational::i())
    }

    /// `q^k` for any integer `k`.
    pub fn q_pow(k: i64) -> QCoefficient {
        let m = Poly::monomial(GaussRational::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            QCoefficient {
                num: m,
                den: Poly::one(),
            }
        } else {
            QCoefficient {
                num: Poly::one(),
                den: m,
            }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == Poly::one() && self.den == Poly::one()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<QCoefficient> {
        (!self.is_zero()).then(|| QCoefficient::new(self.den.clone(), self.num.clone()))
    }

    /// Evaluate at a numeric `q`.
    pub fn eval(&self, q: num_complex::Complex64) -> num_complex::Complex64 {
        let ev = |p: &Poly| {
            p.coeffs()
                .iter()
                .rev()
                .fold(num_complex::Complex64::new(0.0, 0.0), |acc, c| {
                    acc * q + num_complex::Complex64::new(to_f64(&c.re), to_f64(&c.im))
                })
        };
        ev(&self.num) / ev(&self.den)
    }
}

fn to_f64(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl Default for QCoefficient {
    fn default() -> Self {
        QCoefficient::zero()
    }
}

impl Add for &QCoefficient {
    type Output = QCoefficient;
    fn add(self, rhs: &QCoefficient) -> QCoefficient {
        if self.den == rhs.den {
            return QCoefficient::new(self.num.add(&rhs.num), self.den.clone());
        }
        QCoefficient::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl Sub for &QCoefficient {
    type Output = QCoefficient;
    fn sub(self, rhs: &QCoefficient) -> QCoefficient {
        self + &(-rhs)
    }
}

impl Neg for &QCoefficient {
    type Output = QCoefficient;
    fn neg(self) -> QCoefficient {
        QCoefficient {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Mul for &QCoefficient {
    type Output = QCoefficient;
    fn mul(self, rhs: &QCoefficient) -> QCoefficient {
        if self.is_zero() || rhs.is_zero() {
            return QCoefficient::zero();
        }
        QCoefficient::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl Div for &QCoefficient {
    type Output = QCoefficient;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &QCoefficient) -> QCoefficient {
        self * &rhs.inv().expect("division by zero coefficient")
    }
}

impl fmt::Display for QCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "({})", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
