//! Exact rational-complex scalars.
//!
//! Symbolic computations in this crate never degrade to floating point;
//! coefficients are complex numbers with `BigRational` real and imaginary
//! parts. Conversion to `Complex64` happens only at the matrix boundary.

use num::complex::Complex64;
use num::{BigInt, BigRational, Complex, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact complex scalar with rational components.
pub type Rc = Complex<BigRational>;

pub fn rc_zero() -> Rc {
    Complex::new(BigRational::zero(), BigRational::zero())
}

pub fn rc_one() -> Rc {
    Complex::new(BigRational::one(), BigRational::zero())
}

pub fn rc_from_i64(re: i64, im: i64) -> Rc {
    Complex::new(
        BigRational::from_integer(BigInt::from(re)),
        BigRational::from_integer(BigInt::from(im)),
    )
}

pub fn rc_from_ratio(num: i64, den: i64) -> Rc {
    Complex::new(
        BigRational::new(BigInt::from(num), BigInt::from(den)),
        BigRational::zero(),
    )
}

pub fn rc_real(q: BigRational) -> Rc {
    Complex::new(q, BigRational::zero())
}

pub fn rc_is_zero(z: &Rc) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

/// Lossy conversion to machine precision, used only when entering matrix land.
pub fn rc_to_c64(z: &Rc) -> Complex64 {
    Complex64::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

pub fn rc_abs(z: &Rc) -> f64 {
    rc_to_c64(z).norm()
}

/// Parses a rational from `"p/q"`, an integer, or a plain decimal like `"-0.25"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let err = || Error::RationalSyntax {
        text: text.to_string(),
    };
    if t.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = t.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| err())?;
        let d: BigInt = den.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || frac.is_empty()
        {
            return Err(err());
        }
        let whole_part: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            whole_digits.parse().map_err(|_| err())?
        };
        let frac_part: BigInt = frac.parse().map_err(|_| err())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let mut q = BigRational::new(whole_part * &scale + frac_part, scale);
        if negative {
            q = -q;
        }
        return Ok(q);
    }
    let n: BigInt = t.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(n))
}

/// Canonical rendering: integers without denominator, otherwise `"p/q"`.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Total order key for grouping exact complex values.
pub fn rc_order_key(z: &Rc) -> (BigRational, BigRational) {
    (z.re.clone(), z.im.clone())
}

/// Squared modulus as an exact rational.
pub fn rc_norm_sqr(z: &Rc) -> BigRational {
    &z.re * &z.re + &z.im * &z.im
}

/// True when both components are small enough to survive f64 conversion scrutiny.
pub fn rc_is_real_one(z: &Rc) -> bool {
    z.re.is_one() && z.im.is_zero()
}

pub fn rational_abs(q: &BigRational) -> BigRational {
    q.abs()
}
