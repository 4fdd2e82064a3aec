//! Gaussian-rational coefficients: complex numbers with exact rational parts.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An exact complex rational `re + i*im`. Equality is exact; `Ratio` keeps
/// numerator and denominator in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        GaussianRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussianRational {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn imaginary_unit() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    /// `i^k` for any (possibly negative) integer `k`.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::imaginary_unit(),
            2 => -Self::one(),
            _ => -Self::imaginary_unit(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        GaussianRational {
            re: &self.re * s,
            im: &self.im * s,
        }
    }

    /// Exact reciprocal; panics on zero.
    pub fn recip(&self) -> Self {
        let norm = &self.re * &self.re + &self.im * &self.im;
        assert!(!norm.is_zero(), "reciprocal of zero");
        GaussianRational {
            re: &self.re / &norm,
            im: -(&self.im / &norm),
        }
    }

    pub fn div(&self, rhs: &GaussianRational) -> Self {
        self * &rhs.recip()
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}*i", self.im)
        } else {
            write!(f, "{} + {}*i", self.re, self.im)
        }
    }
}

/// Convert a big rational to `f64`, scaling by powers of two first so that
/// huge numerators or denominators do not overflow the direct conversion.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let num_bits = r.numer().bits() as i64;
    let den_bits = r.denom().bits() as i64;
    if num_bits < 1000 && den_bits < 1000 {
        if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
            if n.is_finite() && d.is_finite() && d != 0.0 {
                return n / d;
            }
        }
    }
    // Shift both parts near 64 bits and track the exponent difference.
    // The power of two is applied in halves so a representable result never
    // overflows through an intermediate factor.
    let shift_n = (num_bits - 64).max(0);
    let shift_d = (den_bits - 64).max(0);
    let n = (r.numer() >> shift_n).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift_d).to_f64().unwrap_or(f64::NAN);
    let e = (shift_n - shift_d) as i32;
    (n / d) * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
}

/// Natural log of a positive big rational, computed from bit lengths so the
/// value never overflows. Accurate to a few ulps.
pub fn ln_rational(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "ln of a non-positive rational");
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits() as i64;
    if bits <= 53 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn i_pow_cycles() {
        assert_eq!(GaussianRational::i_pow(0), GaussianRational::one());
        assert_eq!(GaussianRational::i_pow(1), GaussianRational::imaginary_unit());
        assert_eq!(GaussianRational::i_pow(2), -GaussianRational::one());
        assert_eq!(GaussianRational::i_pow(-1), -GaussianRational::imaginary_unit());
        assert_eq!(GaussianRational::i_pow(-4), GaussianRational::one());
    }

    #[test]
    fn exact_product() {
        let a = GaussianRational::from_ratio(1, 2);
        let i = GaussianRational::imaginary_unit();
        let ai = &a * &i;
        assert_eq!(ai, GaussianRational::new(BigRational::zero(), BigRational::new(BigInt::from(1), BigInt::from(2))));
        assert_eq!(&ai * &i, GaussianRational::from_ratio(-1, 2));
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = BigInt::from(10).pow(400);
        let r = BigRational::new(big.clone() * 3, big);
        assert!((rational_to_f64(&r) - 3.0).abs() < 1e-12);
        let huge = BigRational::new(BigInt::from(10).pow(250), BigInt::from(1));
        let v = rational_to_f64(&huge);
        assert!((v.log10() - 250.0).abs() < 1e-12);
        // Out-of-range magnitudes saturate rather than panic.
        let over = BigRational::new(BigInt::from(10).pow(400), BigInt::from(1));
        assert!(rational_to_f64(&over).is_infinite());
    }

    #[test]
    fn ln_of_huge_rational() {
        let r = BigRational::new(BigInt::from(10).pow(1000), BigInt::from(3));
        let expect = 1000.0 * std::f64::consts::LN_10 - 3f64.ln();
        assert!((ln_rational(&r) - expect).abs() < 1e-9 * expect.abs());
    }
}
