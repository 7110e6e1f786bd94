//! Exact complex-rational scalars and the few irrational operations the
//! majorant calculus needs (moduli, square roots) as directed enclosures.

use num_bigint::{BigInt, Sign};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact complex rational coefficient.
pub type Coeff = Complex<BigRational>;

/// Bits of scaling used when a square root has to be enclosed from above.
/// The resulting relative upward bias is below 2^-48.
const SQRT_GUARD_BITS: u64 = 112;

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn c_rat(re: BigRational, im: BigRational) -> Coeff {
    Complex::new(re, im)
}

/// Real coefficient `num/den`.
pub fn c_real(num: i64, den: i64) -> Coeff {
    Complex::new(rat(num, den), BigRational::zero())
}

pub fn c_int(v: i64) -> Coeff {
    c_real(v, 1)
}

pub fn c_zero() -> Coeff {
    Complex::new(BigRational::zero(), BigRational::zero())
}

pub fn c_one() -> Coeff {
    Complex::new(BigRational::one(), BigRational::zero())
}

pub fn from_big(v: &BigInt) -> Coeff {
    Complex::new(BigRational::from_integer(v.clone()), BigRational::zero())
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Out of f64 range: fall back to the sign and an infinity.
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn coeff_to_c64(c: &Coeff) -> Complex<f64> {
    Complex::new(rational_to_f64(&c.re), rational_to_f64(&c.im))
}

/// |c|², exact.
pub fn modulus_sq(c: &Coeff) -> BigRational {
    &c.re * &c.re + &c.im * &c.im
}

/// Exact square root of a nonnegative rational, when it is rational.
pub fn rational_sqrt_exact(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Rational upper enclosure of √q (q ≥ 0): exact when √q is rational,
/// otherwise biased upward by less than 2^-48 relative.
pub fn sqrt_upper(q: &BigRational) -> BigRational {
    assert!(!q.is_negative(), "sqrt_upper of a negative rational");
    if let Some(exact) = rational_sqrt_exact(q) {
        return exact;
    }
    // √(a/b) = √(a·b) / b, scaled by 2^s so the integer root carries enough bits.
    let a = q.numer();
    let b = q.denom();
    let ab = a * b;
    let bits = ab.bits();
    let shift = if bits >= 2 * SQRT_GUARD_BITS {
        0
    } else {
        (2 * SQRT_GUARD_BITS - bits).div_ceil(2)
    };
    let scaled: BigInt = ab << (2 * shift);
    let mut root = scaled.sqrt();
    if &root * &root < scaled {
        root += 1;
    }
    BigRational::new(root, b * (BigInt::one() << shift))
}

/// Upper enclosure of |c|.
pub fn modulus_upper(c: &Coeff) -> BigRational {
    if c.im.is_zero() {
        return c.re.abs();
    }
    if c.re.is_zero() {
        return c.im.abs();
    }
    sqrt_upper(&modulus_sq(c))
}

/// Exact square root in ℚ(i), if one exists. Returns the root with
/// nonnegative real part (nonnegative imaginary part when purely imaginary).
pub fn complex_sqrt_exact(c: &Coeff) -> Option<Coeff> {
    if c.im.is_zero() {
        if !c.re.is_negative() {
            return rational_sqrt_exact(&c.re).map(|r| Complex::new(r, BigRational::zero()));
        }
        return rational_sqrt_exact(&-c.re.clone()).map(|r| Complex::new(BigRational::zero(), r));
    }
    let modulus = rational_sqrt_exact(&modulus_sq(c))?;
    let two = int(2);
    let p_sq = (&c.re + &modulus) / &two;
    let p = rational_sqrt_exact(&p_sq)?;
    if p.is_zero() {
        return None;
    }
    let q = &c.im / (&two * &p);
    Some(Complex::new(p, q))
}

/// Exact rational value of a finite float.
pub fn f64_to_rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite float")
}

pub fn sign_of(q: &BigRational) -> Sign {
    if q.is_zero() {
        Sign::NoSign
    } else if q.is_negative() {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// Display a complex rational compactly, e.g. `3/2`, `-1+2i`, `1/3i`.
pub fn fmt_coeff(c: &Coeff) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (true, true) => "0".to_string(),
        (false, true) => c.re.to_string(),
        (true, false) => format!("{}i", c.im),
        (false, false) => {
            if c.im.is_negative() {
                format!("({}-{}i)", c.re, -c.im.clone())
            } else {
                format!("({}+{}i)", c.re, c.im)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_roots() {
        assert_eq!(rational_sqrt_exact(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt_exact(&rat(2, 1)), None);
        let c = c_rat(int(3), int(4));
        assert_eq!(modulus_upper(&c), int(5));
        // (1+2i)² = -3+4i
        let r = complex_sqrt_exact(&c_rat(int(-3), int(4))).unwrap();
        assert_eq!(r, c_rat(int(1), int(2)));
        assert_eq!(complex_sqrt_exact(&c_int(-4)), Some(c_rat(int(0), int(2))));
        assert!(complex_sqrt_exact(&c_int(2)).is_none());
    }

    #[test]
    fn sqrt_enclosure_is_tight_and_above() {
        for v in [2i64, 3, 5, 7, 1_000_003] {
            let q = int(v);
            let up = sqrt_upper(&q);
            assert!(&up * &up >= q);
            let f = rational_to_f64(&up);
            let rel = (f - (v as f64).sqrt()) / (v as f64).sqrt();
            assert!(rel >= -1e-15 && rel < 2f64.powi(-48));
        }
        let tiny = rat(1, 1_000_000_007);
        let up = sqrt_upper(&tiny);
        assert!(&up * &up >= tiny);
        let c = c_rat(int(1), int(1));
        let m = modulus_upper(&c);
        assert!(&m * &m >= int(2));
    }
}
