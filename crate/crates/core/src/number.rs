//! Scalar types shared across the crate: exact rationals, Gaussian rationals,
//! and double-precision complex numbers.
//!
//! Kernel evaluation, reciprocal series, shift models and polynomial
//! arithmetic all run over `Rat`/`CRat` so that algebraic cancellations are
//! exact; conversion to `C64` happens once, at the boundary to the
//! floating-point eigenvalue/SVD backends.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact arbitrary-precision rational.
pub type Rat = BigRational;

/// Gaussian rational: complex number with exact rational parts.
pub type CRat = Complex<Rat>;

/// Double-precision complex scalar used by the floating-point backends.
pub type C64 = Complex<f64>;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exact conversion; every finite f64 is a rational.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational magnitude exceeds f64 range")
}

pub fn crat(re: Rat, im: Rat) -> CRat {
    Complex::new(re, im)
}

pub fn crat_zero() -> CRat {
    Complex::new(Rat::zero(), Rat::zero())
}

pub fn crat_one() -> CRat {
    Complex::new(Rat::one(), Rat::zero())
}

pub fn crat_from_rat(re: Rat) -> CRat {
    Complex::new(re, Rat::zero())
}

/// Exact conversion of a complex double; `None` if either part is non-finite.
pub fn crat_from_c64(z: C64) -> Option<CRat> {
    Some(Complex::new(rat_from_f64(z.re)?, rat_from_f64(z.im)?))
}

pub fn crat_to_c64(z: &CRat) -> C64 {
    Complex::new(rat_to_f64(&z.re), rat_to_f64(&z.im))
}

/// Exact integer binomial coefficient as a rational.
pub fn binomial(n: u32, k: u32) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k.min(n - k) {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    Rat::new(num, den)
}

/// Exact factorial as a rational.
pub fn factorial(n: u32) -> Rat {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    Rat::from_integer(acc)
}

/// Render a rational as `p/q` (or just `p` when the denominator is one).
pub fn rat_to_string(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `p/q`, a bare integer, or a decimal literal into an exact rational.
pub fn rat_from_str(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(Rat::from_integer(n));
    }
    // Decimal literals are exact: shift the point into a power of ten.
    // The integer part carries the sign through the concatenation.
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let digits = format!("{}{}", int_part, frac_part);
        let n: BigInt = digits.parse().ok()?;
        let d = BigInt::from(10u32).pow(frac_part.len() as u32);
        return Some(Rat::new(n, d));
    }
    None
}

/// Serde adapter: rationals as `"p/q"` strings.
pub mod rat_string {
    use super::{rat_from_str, rat_to_string, Rat};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rat, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&rat_to_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(de)?;
        rat_from_str(&s).ok_or_else(|| de::Error::custom(format!("invalid rational `{s}`")))
    }
}

/// Serde adapter: vectors of rationals as `"p/q"` strings.
pub mod rat_vec_string {
    use super::{rat_from_str, rat_to_string, Rat};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Rat], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(xs.iter().map(rat_to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Rat>, D::Error> {
        let strs = Vec::<String>::deserialize(de)?;
        strs.iter()
            .map(|s| {
                rat_from_str(s).ok_or_else(|| de::Error::custom(format!("invalid rational `{s}`")))
            })
            .collect()
    }
}

/// Serde adapter: complex doubles as `[re, im]` pairs.
pub mod c64_pair {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &C64, ser: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(de)?;
        Ok(C64::new(re, im))
    }
}

/// Serde adapter: a complex point (one `[re, im]` pair per coordinate).
pub mod point_pairs {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(pt: &[C64], ser: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = pt.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<C64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(de)?;
        Ok(pairs.iter().map(|p| C64::new(p[0], p[1])).collect())
    }
}

/// Serde adapter: a list of complex points.
pub mod point_list_pairs {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(pts: &[Vec<C64>], ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = pts
            .iter()
            .map(|pt| pt.iter().map(|c| [c.re, c.im]).collect())
            .collect();
        rows.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Vec<C64>>, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(de)?;
        Ok(rows
            .iter()
            .map(|pt| pt.iter().map(|p| C64::new(p[0], p[1])).collect())
            .collect())
    }
}

pub fn is_real(z: &CRat) -> bool {
    z.im.is_zero()
}

pub fn rat_abs(x: &Rat) -> Rat {
    x.abs()
}
