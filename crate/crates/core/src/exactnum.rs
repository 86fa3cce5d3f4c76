//! Exact scalars: Gaussian rationals and affine forms over the two series
//! constants `A2 = Σ a(n)/n²` and `A1 = Σ a(n)/n`.
//!
//! A [`ConstLinear`] is zero exactly when its three coefficients are zero, so
//! an identity whose constants cancel symbolically can be checked without ever
//! assigning a numeric value to `A2` or `A1`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `re + im·i` with both parts reduced big rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::real(BigRational::from_integer(n))
    }

    /// `num/den`; panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn imag_unit() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True for a real integer value.
    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(GaussianRational {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        GaussianRational {
            re: &self.re * r,
            im: &self.im * r,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

/// Nearest-ish `f64` for a big rational, robust to numerators and
/// denominators that overflow `f64` individually.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Scale both parts down to a common bit length before dividing.
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(960);
    let ns: BigInt = n >> shift;
    let ds: BigInt = d >> shift;
    match (ns.to_f64(), ds.to_f64()) {
        (Some(a), Some(b)) if b != 0.0 => a / b,
        _ => f64::NAN,
    }
}

macro_rules! forward_binop {
    ($ty:ident, $tr:ident, $method:ident) => {
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                (&self).$method(rhs)
            }
        }
        impl $tr<$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::real(&self.re * &rhs.re);
        }
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

/// Panics on division by zero, like the integer operators; use
/// [`GaussianRational::checked_div`] when the divisor is untrusted.
impl Div<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self.checked_div(rhs).expect("division by zero")
    }
}

forward_binop!(GaussianRational, Add, add);
forward_binop!(GaussianRational, Sub, sub);
forward_binop!(GaussianRational, Mul, mul);
forward_binop!(GaussianRational, Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -self.clone()
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
    }
}

impl From<BigRational> for GaussianRational {
    fn from(r: BigRational) -> Self {
        GaussianRational::real(r)
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        GaussianRational::from_int(n)
    }
}

/// `p/q`, also for integers.
pub fn fmt_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.re))?;
        if !self.im.is_zero() {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{}*i", sign, fmt_rational(&self.im.abs()))?;
        }
        Ok(())
    }
}

/// Parses `p`, `p/q`, or a finite decimal such as `-1.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: '{s}'"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_digits}{frac_part}");
        let mut n: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac_part.len());
        return Ok(BigRational::new(n, d));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Accepts `a`, `b*i`, `a+b*i`, `a-b*i` where `a`, `b` are rationals in
    /// any form accepted by [`parse_rational`]; a bare `i` means `1*i`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(body) = s.strip_suffix('i') else {
            return Ok(GaussianRational::real(parse_rational(s)?));
        };
        let body = body.strip_suffix('*').unwrap_or(body);
        // Split at the last sign that follows a digit.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1].is_ascii_digit());
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = im.strip_prefix('+').unwrap_or(im);
        let im = match im {
            "" => BigRational::one(),
            "-" => -BigRational::one(),
            _ => parse_rational(im)?,
        };
        Ok(GaussianRational::new(parse_rational(re)?, im))
    }
}

/// `c1 + cA2·A2 + cA1·A1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ConstLinear {
    pub c1: GaussianRational,
    pub c_a2: GaussianRational,
    pub c_a1: GaussianRational,
}

impl ConstLinear {
    pub fn new(c1: GaussianRational, c_a2: GaussianRational, c_a1: GaussianRational) -> Self {
        ConstLinear { c1, c_a2, c_a1 }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: GaussianRational) -> Self {
        ConstLinear {
            c1: c,
            ..Default::default()
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(GaussianRational::from_int(n))
    }

    /// The symbol `A2`.
    pub fn a2() -> Self {
        ConstLinear {
            c_a2: GaussianRational::one(),
            ..Default::default()
        }
    }

    /// The symbol `A1`.
    pub fn a1() -> Self {
        ConstLinear {
            c_a1: GaussianRational::one(),
            ..Default::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c1.is_zero() && self.c_a2.is_zero() && self.c_a1.is_zero()
    }

    /// No `A2` or `A1` component.
    pub fn is_constant(&self) -> bool {
        self.c_a2.is_zero() && self.c_a1.is_zero()
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        ConstLinear {
            c1: &self.c1 * s,
            c_a2: &self.c_a2 * s,
            c_a1: &self.c_a1 * s,
        }
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        ConstLinear {
            c1: self.c1.scale(r),
            c_a2: self.c_a2.scale(r),
            c_a1: self.c_a1.scale(r),
        }
    }

    /// `s·u + t·v`, coefficientwise.
    pub fn combine(u: &Self, v: &Self, s: &GaussianRational, t: &GaussianRational) -> Self {
        ConstLinear {
            c1: &u.c1 * s + &v.c1 * t,
            c_a2: &u.c_a2 * s + &v.c_a2 * t,
            c_a1: &u.c_a1 * s + &v.c_a1 * t,
        }
    }

    /// Product, defined only when at least one factor is a pure constant.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_constant() {
            Ok(self.scale(&rhs.c1))
        } else if self.is_constant() {
            Ok(rhs.scale(&self.c1))
        } else {
            Err(Error::NonLinearProduct)
        }
    }

    /// Replaces the symbol `A1` by a known exact value.
    pub fn substitute_a1(&self, value: &GaussianRational) -> Self {
        ConstLinear {
            c1: &self.c1 + &(&self.c_a1 * value),
            c_a2: self.c_a2.clone(),
            c_a1: GaussianRational::zero(),
        }
    }

    /// Floating-point value for numeric `A2`, `A1`; terms are added in the
    /// order constant, `A2`, `A1`.
    pub fn numeric(&self, a2: Complex64, a1: Complex64) -> Complex64 {
        let mut acc = self.c1.to_complex();
        if !self.c_a2.is_zero() {
            acc += self.c_a2.to_complex() * a2;
        }
        if !self.c_a1.is_zero() {
            acc += self.c_a1.to_complex() * a1;
        }
        acc
    }
}

impl Add<&ConstLinear> for &ConstLinear {
    type Output = ConstLinear;
    fn add(self, rhs: &ConstLinear) -> ConstLinear {
        ConstLinear {
            c1: &self.c1 + &rhs.c1,
            c_a2: &self.c_a2 + &rhs.c_a2,
            c_a1: &self.c_a1 + &rhs.c_a1,
        }
    }
}

impl Sub<&ConstLinear> for &ConstLinear {
    type Output = ConstLinear;
    fn sub(self, rhs: &ConstLinear) -> ConstLinear {
        ConstLinear {
            c1: &self.c1 - &rhs.c1,
            c_a2: &self.c_a2 - &rhs.c_a2,
            c_a1: &self.c_a1 - &rhs.c_a1,
        }
    }
}

forward_binop!(ConstLinear, Add, add);
forward_binop!(ConstLinear, Sub, sub);

impl AddAssign<&ConstLinear> for ConstLinear {
    fn add_assign(&mut self, rhs: &ConstLinear) {
        self.c1 += &rhs.c1;
        self.c_a2 += &rhs.c_a2;
        self.c_a1 += &rhs.c_a1;
    }
}

impl SubAssign<&ConstLinear> for ConstLinear {
    fn sub_assign(&mut self, rhs: &ConstLinear) {
        self.c1 -= &rhs.c1;
        self.c_a2 -= &rhs.c_a2;
        self.c_a1 -= &rhs.c_a1;
    }
}

impl Neg for ConstLinear {
    type Output = ConstLinear;
    fn neg(self) -> ConstLinear {
        ConstLinear {
            c1: -self.c1,
            c_a2: -self.c_a2,
            c_a1: -self.c_a1,
        }
    }
}

impl Neg for &ConstLinear {
    type Output = ConstLinear;
    fn neg(self) -> ConstLinear {
        -self.clone()
    }
}

impl From<GaussianRational> for ConstLinear {
    fn from(c: GaussianRational) -> Self {
        ConstLinear::constant(c)
    }
}

impl fmt::Display for ConstLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*A2 + {}*A1", self.c1, self.c_a2, self.c_a1)
    }
}

impl FromStr for ConstLinear {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(" + ").collect();
        let [c1, a2, a1] = parts.as_slice() else {
            return Err(Error::Parse(format!("expected 'c1 + c*A2 + c*A1', got '{s}'")));
        };
        let a2 = a2
            .strip_suffix("*A2")
            .ok_or_else(|| Error::Parse(format!("missing '*A2' term in '{s}'")))?;
        let a1 = a1
            .strip_suffix("*A1")
            .ok_or_else(|| Error::Parse(format!("missing '*A1' term in '{s}'")))?;
        Ok(ConstLinear::new(c1.parse()?, a2.parse()?, a1.parse()?))
    }
}
