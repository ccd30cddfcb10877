//! Binary floating point numbers of configurable precision and complex
//! numbers built on top of them.
//!
//! A [`BigFloat`] is `mant * 2^exp` where `mant` is kept to at most `prec`
//! significant bits. Arithmetic truncates toward negative infinity after
//! every operation; the result of a binary operation carries the larger of
//! the two operand precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Clone, Debug)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat {
            mant: BigInt::zero(),
            exp: 0,
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_parts(BigInt::from(v), 0, prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        Self::from_parts(v.clone(), 0, prec)
    }

    fn from_parts(mant: BigInt, exp: i64, prec: u32) -> Self {
        let mut f = BigFloat { mant, exp, prec };
        f.normalize();
        f
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        if v == 0.0 || !v.is_finite() {
            return Self::zero(prec);
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac as i64, -1074)
        } else {
            ((frac | (1u64 << 52)) as i64, raw_exp - 1075)
        };
        Self::from_parts(BigInt::from(sign * m), e, prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let num = q.numer();
        if num.is_zero() {
            return Self::zero(prec);
        }
        let den = q.denom();
        let shift = (prec as i64 + 2 + den.bits() as i64 - num.bits() as i64).max(0);
        let scaled: BigInt = num << (shift as usize);
        Self::from_parts(scaled / den, -shift, prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::from_parts(self.mant.clone(), self.exp, prec)
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let bits = self.mant.bits();
        if bits > self.prec as u64 {
            let excess = bits - self.prec as u64;
            self.mant = &self.mant >> (excess as usize);
            self.exp += excess as i64;
        }
        // strip trailing zero bits so equal values share a representation
        if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant = &self.mant >> (tz as usize);
                self.exp += tz as i64;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    /// Position of the most significant bit: `2^(top-1) <= |x| < 2^top`.
    /// Zero maps to `i64::MIN`.
    pub fn top_bit(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.mant.bits() as i64
        }
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mant: self.mant.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    /// Multiply by `2^n`.
    pub fn ldexp(&self, n: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat {
            mant: self.mant.clone(),
            exp: self.exp + n,
            prec: self.prec,
        }
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of negative BigFloat");
        if self.is_zero() {
            return self.clone();
        }
        let want = 2 * self.prec as i64 + 4;
        let mut shift = (want - self.mant.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m: BigInt = &self.mant << (shift as usize);
        let root = m.sqrt();
        Self::from_parts(root, (self.exp - shift) / 2, self.prec)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let drop = (bits - 60).max(0);
        let m = (&self.mant >> (drop as usize)).to_f64().unwrap_or(0.0);
        let e = self.exp + drop;
        if e > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        // split the scaling to avoid intermediate overflow of powi
        let half = (e / 2) as i32;
        m * 2f64.powi(half) * 2f64.powi(e as i32 - half)
    }

    /// Approximate base-2 logarithm of `|x|`; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mant.bits() as i64;
        let drop = (bits - 60).max(0);
        let m = (&self.mant >> (drop as usize)).abs().to_f64().unwrap_or(1.0);
        m.log2() + (self.exp + drop) as f64
    }

    /// Scientific notation with `digits` significant decimal digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let mut e10 = (self.log2_abs() * std::f64::consts::LOG10_2).floor() as i64;
        for _ in 0..3 {
            let s = self.scaled_integer(digits as i64 - 1 - e10);
            let len = s.abs().to_string().len();
            if len == digits {
                let body = s.abs().to_string();
                let sign = if s.is_negative() { "-" } else { "" };
                let (head, tail) = body.split_at(1);
                return if tail.is_empty() {
                    format!("{sign}{head}e{e10}")
                } else {
                    format!("{sign}{head}.{tail}e{e10}")
                };
            } else if len > digits {
                e10 += 1;
            } else {
                e10 -= 1;
            }
        }
        format!("{:e}", self.to_f64())
    }

    /// `x * 10^p` rounded to the nearest integer, halves away from zero.
    fn scaled_integer(&self, p: i64) -> BigInt {
        let mut num = self.mant.clone();
        let mut den = BigInt::one();
        let ten = BigInt::from(10);
        if p >= 0 {
            num *= num_traits::pow(ten, p as usize);
        } else {
            den *= num_traits::pow(ten, (-p) as usize);
        }
        if self.exp >= 0 {
            num <<= self.exp as usize;
        } else {
            den <<= (-self.exp) as usize;
        }
        let neg = num.is_negative();
        let q: BigInt = (num.abs() * 2 + &den) / (den * 2);
        if neg {
            -q
        } else {
            q
        }
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl BigFloat {
    fn cmp_value(&self, other: &Self) -> Ordering {
        let d = self - other;
        match d.mant.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        write!(f, "{}", self.to_sci_string(digits))
    }
}

fn add_impl(a: &BigFloat, b: &BigFloat, negate_b: bool) -> BigFloat {
    let prec = a.prec.max(b.prec);
    if b.is_zero() {
        return a.with_prec(prec);
    }
    if a.is_zero() {
        let r = b.with_prec(prec);
        return if negate_b { -r } else { r };
    }
    let bm = if negate_b { -&b.mant } else { b.mant.clone() };
    // operands too far apart: the smaller one is below the last kept bit
    let gap = a.top_bit() - b.top_bit();
    if gap > prec as i64 + 4 {
        return a.with_prec(prec);
    }
    if -gap > prec as i64 + 4 {
        return BigFloat::from_parts(bm, b.exp, prec);
    }
    let (mant, exp) = if a.exp >= b.exp {
        ((&a.mant << ((a.exp - b.exp) as usize)) + bm, b.exp)
    } else {
        (&a.mant + (bm << ((b.exp - a.exp) as usize)), a.exp)
    };
    BigFloat::from_parts(mant, exp, prec)
}

impl<'a> Add<&'a BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: &BigFloat) -> BigFloat {
        add_impl(self, rhs, false)
    }
}

impl<'a> Sub<&'a BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: &BigFloat) -> BigFloat {
        add_impl(self, rhs, true)
    }
}

impl<'a> Mul<&'a BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: &BigFloat) -> BigFloat {
        BigFloat::from_parts(
            &self.mant * &rhs.mant,
            self.exp + rhs.exp,
            self.prec.max(rhs.prec),
        )
    }
}

impl<'a> Div<&'a BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn div(self, rhs: &BigFloat) -> BigFloat {
        assert!(!rhs.is_zero(), "BigFloat division by zero");
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return BigFloat::zero(prec);
        }
        let shift =
            (prec as i64 + 2 + rhs.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let num: BigInt = &self.mant << (shift as usize);
        BigFloat::from_parts(num / &rhs.mant, self.exp - rhs.exp - shift, prec)
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat {
            mant: -self.mant,
            exp: self.exp,
            prec: self.prec,
        }
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        -(self.clone())
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a $ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty { (&self).$m(rhs) }
        }
        impl<'a> $tr<$ty> for &'a $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { self.$m(&rhs) }
        }
    )*};
}

forward_owned!(BigFloat, Add add, Sub sub, Mul mul, Div div);

/// Complex number with [`BigFloat`] parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Cx {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Cx {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Cx { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Cx::new(BigFloat::zero(prec), BigFloat::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Cx::new(BigFloat::one(prec), BigFloat::zero(prec))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Cx::new(BigFloat::from_f64(re, prec), BigFloat::from_f64(im, prec))
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        Cx::new(BigFloat::from_rational(q, prec), BigFloat::zero(prec))
    }

    pub fn from_c64(z: num_complex::Complex64, prec: u32) -> Self {
        Cx::from_f64(z.re, z.im, prec)
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Cx::new(self.re.with_prec(prec), self.im.with_prec(prec))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Cx::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> BigFloat {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> BigFloat {
        self.norm_sqr().sqrt()
    }

    /// Cheap magnitude estimate `max(|re|, |im|)`, within a factor `sqrt 2`
    /// of the modulus.
    pub fn max_abs(&self) -> BigFloat {
        let a = self.re.abs();
        let b = self.im.abs();
        if a >= b {
            a
        } else {
            b
        }
    }

    pub fn scale(&self, s: &BigFloat) -> Self {
        Cx::new(&self.re * s, &self.im * s)
    }

    pub fn ldexp(&self, n: i64) -> Self {
        Cx::new(self.re.ldexp(n), self.im.ldexp(n))
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let prec = self.prec();
        if self.is_zero() {
            return Cx::zero(prec);
        }
        let r = self.abs();
        let two = BigFloat::from_i64(2, prec);
        let half_sum = &(&r + &self.re) / &two;
        let a = if half_sum.is_negative() {
            BigFloat::zero(prec)
        } else {
            half_sum.sqrt()
        };
        if a.is_zero() {
            // purely negative real input
            let b = (&(&r - &self.re) / &two).abs().sqrt();
            return Cx::new(BigFloat::zero(prec), b);
        }
        let b = &self.im / &(&a * &two);
        Cx::new(a, b)
    }

    pub fn powu(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Cx::one(self.prec());
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_strings(&self, digits: usize) -> [String; 2] {
        [self.re.to_sci_string(digits), self.im.to_sci_string(digits)]
    }
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(12);
        let im = self.im.to_sci_string(digits);
        if im.starts_with('-') {
            write!(f, "{}{}i", self.re.to_sci_string(digits), im)
        } else {
            write!(f, "{}+{}i", self.re.to_sci_string(digits), im)
        }
    }
}

impl<'a> Add<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn add(self, rhs: &Cx) -> Cx {
        Cx::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn sub(self, rhs: &Cx) -> Cx {
        Cx::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn mul(self, rhs: &Cx) -> Cx {
        Cx::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

impl<'a> Div<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn div(self, rhs: &Cx) -> Cx {
        let den = rhs.norm_sqr();
        let num = self * &rhs.conj();
        Cx::new(&num.re / &den, &num.im / &den)
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx::new(-self.re, -self.im)
    }
}

impl Neg for &Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        -(self.clone())
    }
}

forward_owned!(Cx, Add add, Sub sub, Mul mul, Div div);
