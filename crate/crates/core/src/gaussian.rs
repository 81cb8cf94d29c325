//! Exact Gaussian rationals, `a + b*i` with `a, b` in Q.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An element of Q(i). Both parts are kept in lowest terms by `BigRational`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    /// `(re_num/re_den) + (im_num/im_den) i`. Panics on a zero denominator.
    pub fn from_fractions(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self::new(
            BigRational::new(re_num.into(), re_den.into()),
            BigRational::new(im_num.into(), im_den.into()),
        )
    }

    pub fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    /// `|z|^2 = z * conj(z)`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_unit_modulus(&self) -> bool {
        self.norm_sqr().is_one()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    pub fn pow(&self, exp: i64) -> Option<Self> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Some(acc)
    }

    /// Text form accepted back by the expression parser: `3`, `-2/5`, `i`,
    /// `-3/2*i`, `(1 - 2*i)`.
    pub fn to_expr_string(&self) -> String {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => fmt_rational(&self.re),
            (true, false) => fmt_imag(&self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                format!("({} {} {})", fmt_rational(&self.re), sign, fmt_imag(&self.im.abs()))
            }
        }
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Ratio::to_f64 only fails on overflow of both parts; fall back to a scaled quotient.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_imag(r: &BigRational) -> String {
    if r.is_one() {
        "i".to_string()
    } else if (-r).is_one() {
        "-i".to_string()
    } else {
        format!("{}*i", fmt_rational(r))
    }
}

/// Parses the `to_expr_string` form; used by serde.
fn parse_gaussian_str(s: &str) -> Option<GaussianRational> {
    let s = s.trim();
    let s = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s).trim();
    let parse_rat = |t: &str| -> Option<BigRational> {
        let t = t.trim();
        match t.split_once('/') {
            Some((n, d)) => {
                let d: BigInt = d.trim().parse().ok()?;
                if d.is_zero() {
                    return None;
                }
                Some(BigRational::new(n.trim().parse().ok()?, d))
            }
            None => Some(BigRational::from_integer(t.parse().ok()?)),
        }
    };
    let parse_im = |t: &str| -> Option<BigRational> {
        let t = t.trim();
        let body = t.strip_suffix('i')?.trim_end();
        let body = body.strip_suffix('*').unwrap_or(body).trim();
        match body {
            "" | "+" => Some(BigRational::one()),
            "-" => Some(-BigRational::one()),
            b => parse_rat(b),
        }
    };
    if !s.ends_with('i') {
        return parse_rat(s).map(GaussianRational::real);
    }
    // Split at the last top-level sign that is not leading and not inside an exponent.
    let bytes = s.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| {
        (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] == b' '
    });
    match split {
        Some(k) => {
            let re = parse_rat(&s[..k])?;
            let mut im = parse_im(&s[k + 1..])?;
            if bytes[k] == b'-' {
                im = -im;
            }
            Some(GaussianRational::new(re, im))
        }
        None => Some(GaussianRational::new(BigRational::zero(), parse_im(s)?)),
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr_string())
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_expr_string())
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_gaussian_str(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid Gaussian rational `{s}`")))
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        Self::from_ints(v, 0)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(v: BigRational) -> Self {
        Self::real(v)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    /// Panics on division by zero, like the integer types.
    fn div(self, o: &GaussianRational) -> GaussianRational {
        self * &o.inv().expect("division by zero Gaussian rational")
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: GaussianRational) -> GaussianRational {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, o: &GaussianRational) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64, c: i64, d: i64) -> GaussianRational {
        GaussianRational::from_fractions(a, b, c, d)
    }

    #[test]
    fn lowest_terms_and_positive_denominators() {
        let x = g(2, -4, 6, 9);
        assert_eq!(x.re, BigRational::new((-1).into(), 2.into()));
        assert!(x.re.denom().is_positive());
        assert_eq!(x.im, BigRational::new(2.into(), 3.into()));
    }

    #[test]
    fn conjugation_fixes_real_part() {
        let x = g(3, 5, -7, 2);
        let c = x.conj();
        assert_eq!(c.re, x.re);
        assert_eq!(c.im, -&x.im);
        assert_eq!(c.conj(), x);
    }

    #[test]
    fn field_operations_are_exact() {
        let x = g(1, 3, 2, 5);
        let y = g(-4, 7, 1, 1);
        let q = &x / &y;
        assert_eq!(&q * &y, x);
        assert_eq!(&(&x + &y) - &y, x);
        assert!((&x * &x.inv().unwrap()).is_one());
    }

    #[test]
    fn unit_modulus_is_decided_exactly() {
        assert!(g(3, 5, 4, 5).is_unit_modulus());
        assert!(GaussianRational::i().is_unit_modulus());
        assert!(!g(1, 1, 1, 1).is_unit_modulus());
    }

    #[test]
    fn power_with_negative_exponent() {
        let x = GaussianRational::from_ints(1, 1);
        assert_eq!(x.pow(2).unwrap(), GaussianRational::from_ints(0, 2));
        assert_eq!(&x.pow(-3).unwrap() * &x.pow(3).unwrap(), GaussianRational::one());
        assert!(GaussianRational::zero().pow(-1).is_none());
    }

    #[test]
    fn expression_text_round_trips() {
        for x in [
            g(6, 5, 23, 5),
            g(-6, 5, -23, 5),
            g(0, 1, -1, 1),
            g(0, 1, 3, 2),
            g(-7, 1, 0, 1),
            GaussianRational::zero(),
            GaussianRational::i(),
        ] {
            let s = x.to_expr_string();
            assert_eq!(parse_gaussian_str(&s), Some(x.clone()), "{s}");
        }
        assert_eq!(g(6, 5, 23, 5).to_expr_string(), "(6/5 + 23/5*i)");
        assert_eq!(g(0, 1, -1, 1).to_expr_string(), "-i");
    }
}
