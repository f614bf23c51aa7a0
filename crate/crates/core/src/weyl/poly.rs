//! Dense univariate polynomials in the formal symbol `q` over `Q(i)`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact Gaussian rational `re + im * i`.
pub type GaussRational = Complex<BigRational>;

pub fn gq(re: i64, im: i64) -> GaussRational {
    Complex::new(
        BigRational::from_integer(BigInt::from(re)),
        BigRational::from_integer(BigInt::from(im)),
    )
}

pub fn gq_ratio(re: (i64, i64), im: (i64, i64)) -> GaussRational {
    Complex::new(
        BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
        BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
    )
}

/// Coefficients stored from the constant term upward, with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<GaussRational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: GaussRational) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    pub fn one() -> Poly {
        Poly::constant(GaussRational::one())
    }

    /// `c * q^k`
    pub fn monomial(c: GaussRational, k: usize) -> Poly {
        let mut coeffs = vec![GaussRational::zero(); k];
        coeffs.push(c);
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<GaussRational>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[GaussRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&GaussRational> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = GaussRational::zero();
        let coeffs = (0..n)
            .map(|k| self.coeffs.get(k).unwrap_or(&zero) + other.coeffs.get(k).unwrap_or(&zero))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![GaussRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + a * b;
            }
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &GaussRational) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division over the field `Q(i)`. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let d_deg = divisor.degree().expect("division by the zero polynomial");
        let d_lead_inv = GaussRational::one() / divisor.lead().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d_deg {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![GaussRational::zero(); rem.len() - d_deg];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + d_deg] * &d_lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &c * dc;
            }
            quot[k] = c;
        }
        rem.truncate(d_deg);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Scale so the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => Poly::zero(),
            Some(l) => self.scale(&(GaussRational::one() / l)),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

pub(crate) fn fmt_gauss(c: &GaussRational) -> String {
    let unit_im = |im: &BigRational| -> String {
        if im.is_one() {
            "i".to_string()
        } else if (-im).is_one() {
            "-i".to_string()
        } else {
            format!("{im}i")
        }
    };
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => format!("{}", c.re),
        (true, false) => unit_im(&c.im),
        (false, false) => {
            let sign = if c.im.is_negative() { "-" } else { "+" };
            format!("({}{}{})", c.re, sign, unit_im(&c.im.abs()))
        }
    }
}

impl fmt::Display for Poly {
    /// Highest power first, e.g. `q^2 + -1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = fmt_gauss(c);
            match k {
                0 => write!(f, "{cs}")?,
                _ => {
                    let qs = if k == 1 { "q".to_string() } else { format!("q^{k}") };
                    if c.is_one() {
                        write!(f, "{qs}")?
                    } else if (-c).is_one() {
                        write!(f, "-{qs}")?
                    } else {
                        write!(f, "{cs}*{qs}")?
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> Poly {
        Poly::from_coeffs(cs.iter().map(|&c| gq(c, 0)).collect())
    }

    #[test]
    fn division_identity() {
        let a = p(&[-1, 0, 0, 1]); // q^3 - 1
        let b = p(&[-1, 1]); // q - 1
        let (quot, rem) = a.div_rem(&b);
        assert_eq!(quot, p(&[1, 1, 1]));
        assert!(rem.is_zero());
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let a = p(&[-2, 0, 2]); // 2(q^2 - 1)
        let b = p(&[3, 3]); // 3(q + 1)
        assert_eq!(a.gcd(&b), p(&[1, 1]));
    }

    #[test]
    fn display_forms() {
        let x = Poly::from_coeffs(vec![gq(-1, 0), gq(0, 0), gq(0, 1)]);
        assert_eq!(x.to_string(), "i*q^2 + -1");
        assert_eq!(Poly::constant(gq_ratio((1, 2), (-3, 4))).to_string(), "(1/2-3/4i)");
    }
}
