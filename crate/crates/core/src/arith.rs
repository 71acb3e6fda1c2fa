//! Number-theoretic and special-function primitives.
//!
//! Everything here is a pure function of its inputs. Real and complex values
//! are carried as [`BigFloat`]s at the working precision of a
//! [`PrecisionPolicy`]; there is no ambient global precision.

use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{d} is not invertible modulo {c}")]
    NonInvertible { d: i64, c: i64 },
    #[error("epsilon_d needs an odd argument, got {0}")]
    EvenArgument(i64),
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("invalid precision policy: {0}")]
    InvalidPolicy(String),
}

/// Working precision and the certification threshold for rounding numeric
/// values to integers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub precision_bits: usize,
    pub rounding_threshold: f64,
}

impl PrecisionPolicy {
    pub const DEFAULT_BITS: usize = 192;
    /// Rademacher partial sums at desk-scale truncation carry a heuristic
    /// error of order 1e-3; the threshold has to sit above that.
    pub const DEFAULT_THRESHOLD: f64 = 0.05;

    pub fn new(precision_bits: usize, rounding_threshold: f64) -> Result<Self, ArithError> {
        if precision_bits < 64 {
            return Err(ArithError::InvalidPolicy(format!(
                "precision_bits must be at least 64, got {precision_bits}"
            )));
        }
        if !(rounding_threshold > 0.0 && rounding_threshold < 0.5) {
            return Err(ArithError::InvalidPolicy(format!(
                "rounding_threshold must lie in (0, 0.5), got {rounding_threshold}"
            )));
        }
        Ok(Self {
            precision_bits,
            rounding_threshold,
        })
    }

    pub fn context(&self) -> MpContext {
        MpContext::new(self.precision_bits)
    }
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self {
            precision_bits: Self::DEFAULT_BITS,
            rounding_threshold: Self::DEFAULT_THRESHOLD,
        }
    }
}

/// An exact fourth root of unity `i^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnitFourth(u8);

impl UnitFourth {
    pub const ONE: Self = Self(0);
    pub const I: Self = Self(1);
    pub const MINUS_ONE: Self = Self(2);
    pub const MINUS_I: Self = Self(3);

    pub fn from_power(k: i64) -> Self {
        Self(k.rem_euclid(4) as u8)
    }

    /// The exponent `k` in `i^k`, in `0..4`.
    pub fn power(self) -> u8 {
        self.0
    }

    pub fn mul(self, other: Self) -> Self {
        Self((self.0 + other.0) % 4)
    }

    pub fn inverse(self) -> Self {
        Self((4 - self.0) % 4)
    }

    pub fn pow(self, e: u32) -> Self {
        Self(((self.0 as u32 * e) % 4) as u8)
    }

    pub fn to_f64_pair(self) -> (f64, f64) {
        match self.0 {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    }
}

impl fmt::Display for UnitFourth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["1", "i", "-1", "-i"][self.0 as usize])
    }
}

/// Kronecker symbol `(c/d)`, defined for all integer pairs.
pub fn kronecker(c: i64, d: i64) -> i64 {
    if d == 0 {
        return if c == 1 || c == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut d = d;
    if d < 0 {
        d = -d;
        if c < 0 {
            result = -result;
        }
    }
    let twos = d.trailing_zeros();
    d >>= twos;
    if twos > 0 {
        if c % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(c.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    result * jacobi(c, d)
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: i64) -> i64 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut result = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        let t = n % a;
        n = a;
        a = t;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// `d̄` in `[0, c)` with `d·d̄ ≡ 1 (mod c)`.
pub fn mod_inverse(d: i64, c: i64) -> Result<i64, ArithError> {
    if c <= 0 {
        return Err(ArithError::NonPositiveArgument(c.to_string()));
    }
    let (g, x) = ext_gcd(d.rem_euclid(c), c);
    if g != 1 {
        return Err(ArithError::NonInvertible { d, c });
    }
    Ok(x.rem_euclid(c))
}

/// Returns `(gcd(a, m), x)` with `a·x ≡ gcd (mod m)`.
#[inline]
pub(crate) fn ext_gcd(a: i64, m: i64) -> (i64, i64) {
    let (mut r0, mut r1) = (a, m);
    let (mut x0, mut x1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
    }
    (r0, x0)
}

/// `ε_d`: 1 for `d ≡ 1 (mod 4)`, `i` for `d ≡ 3 (mod 4)`.
pub fn eps(d: i64) -> Result<UnitFourth, ArithError> {
    match d.rem_euclid(4) {
        1 => Ok(UnitFourth::ONE),
        3 => Ok(UnitFourth::I),
        _ => Err(ArithError::EvenArgument(d)),
    }
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Genus of `X_0(M)` from the index, elliptic points and cusps.
pub fn genus_gamma0(m: u64) -> u64 {
    assert!(m >= 1, "level must be positive");
    let factors = prime_factors(m);
    let index: u64 = factors
        .iter()
        .map(|&(p, e)| p.pow(e) + p.pow(e - 1))
        .product();
    let nu2: u64 = if m.is_multiple_of(4) {
        0
    } else {
        factors
            .iter()
            .map(|&(p, _)| match p {
                2 => 1,
                p if p % 4 == 1 => 2,
                _ => 0,
            })
            .product()
    };
    let nu3: u64 = if m.is_multiple_of(9) {
        0
    } else {
        factors
            .iter()
            .map(|&(p, _)| match p {
                3 => 1,
                p if p % 3 == 1 => 2,
                _ => 0,
            })
            .product()
    };
    let cusps: u64 = divisors(m)
        .into_iter()
        .map(|d| totient(d.gcd(&(m / d))))
        .sum();
    // 12g = 12 + index - 3 nu2 - 4 nu3 - 6 cusps
    let twelve_g = 12 + index as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * cusps as i64;
    debug_assert!(twelve_g >= 0 && twelve_g % 12 == 0);
    (twelve_g / 12) as u64
}

/// A complex number at working precision.
#[derive(Debug, Clone)]
pub struct MpComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

/// Precision, rounding mode and cached constants for one thread of
/// multi-precision work.
pub struct MpContext {
    bits: usize,
    rm: RoundingMode,
    consts: Consts,
}

impl fmt::Debug for MpContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MpContext").field("bits", &self.bits).finish()
    }
}

impl MpContext {
    pub fn new(bits: usize) -> Self {
        Self {
            bits,
            rm: RoundingMode::ToEven,
            consts: Consts::new().expect("astro-float constants cache"),
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_word(0, self.bits)
    }

    pub fn from_f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.bits)
    }

    pub fn from_i64(&self, x: i64) -> BigFloat {
        let mut v = BigFloat::from_u64(x.unsigned_abs(), self.bits);
        if x < 0 {
            v.inv_sign();
        }
        v
    }

    pub fn from_bigint(&self, x: &BigInt) -> BigFloat {
        let (sign, digits) = x.to_u64_digits();
        if digits.is_empty() {
            return self.zero();
        }
        let words = digits.len();
        // mantissa words are little-endian, normalized so the top bit is set
        let lead = digits[words - 1].leading_zeros() as usize;
        let mag = BigUint::from_slice(&to_u32_digits(&digits)) << lead;
        let mant: Vec<u64> = mag.to_u64_digits();
        let e = (words * 64 - lead) as i32;
        let s = if sign == num_bigint::Sign::Minus {
            Sign::Neg
        } else {
            Sign::Pos
        };
        let exact = BigFloat::from_raw_parts(&mant, words * 64, s, e, false);
        exact.add(&self.zero(), self.bits, self.rm)
    }

    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> BigFloat {
        self.div(&self.from_bigint(num), &self.from_bigint(den))
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, self.rm)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, self.rm)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, self.rm)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, self.rm)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, self.rm)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.consts.pi(self.bits, self.rm)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, self.rm, &mut self.consts)
    }

    pub fn sinh(&mut self, a: &BigFloat) -> BigFloat {
        a.sinh(self.bits, self.rm, &mut self.consts)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.bits, self.rm, &mut self.consts)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.bits, self.rm, &mut self.consts)
    }

    pub fn powf(&mut self, a: &BigFloat, e: &BigFloat) -> BigFloat {
        a.pow(e, self.bits, self.rm, &mut self.consts)
    }

    pub fn cmul(&self, a: &MpComplex, b: &MpComplex) -> MpComplex {
        MpComplex {
            re: self.sub(&self.mul(&a.re, &b.re), &self.mul(&a.im, &b.im)),
            im: self.add(&self.mul(&a.re, &b.im), &self.mul(&a.im, &b.re)),
        }
    }

    pub fn cadd(&self, a: &MpComplex, b: &MpComplex) -> MpComplex {
        MpComplex {
            re: self.add(&a.re, &b.re),
            im: self.add(&a.im, &b.im),
        }
    }

    pub fn cabs(&self, a: &MpComplex) -> BigFloat {
        self.sqrt(&self.add(&self.mul(&a.re, &a.re), &self.mul(&a.im, &a.im)))
    }

    /// `e(num/den) = exp(2πi·num/den)`. The argument is reduced into `[0, 1)`
    /// in exact integer arithmetic before any floating evaluation.
    pub fn e_frac(&mut self, num: i64, den: i64) -> Result<MpComplex, ArithError> {
        if den == 0 {
            return Err(ArithError::ZeroDenominator);
        }
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let r = num.rem_euclid(den);
        let g = r.gcd(&den);
        let (r, den) = (r / g, den / g);
        // exact values at the quarter points
        if den == 1 {
            return Ok(self.unit(UnitFourth::ONE));
        }
        if den == 2 {
            return Ok(self.unit(UnitFourth::MINUS_ONE));
        }
        if den == 4 {
            return Ok(self.unit(UnitFourth::from_power(r)));
        }
        let pi = self.pi();
        let two_pi = self.mul(&pi, &self.from_i64(2));
        let angle = self.div(&self.mul(&two_pi, &self.from_i64(r)), &self.from_i64(den));
        Ok(MpComplex {
            re: self.cos(&angle),
            im: self.sin(&angle),
        })
    }

    pub fn unit(&self, u: UnitFourth) -> MpComplex {
        let (re, im) = u.to_f64_pair();
        MpComplex {
            re: self.from_f64(re),
            im: self.from_f64(im),
        }
    }

    /// `I_{1/2}(x) = sqrt(2/(πx))·sinh(x)`.
    pub fn bessel_i_half(&mut self, x: &BigFloat) -> Result<BigFloat, ArithError> {
        if !x.is_positive() || x.is_zero() {
            return Err(ArithError::NonPositiveArgument(format!("{x}")));
        }
        let pi = self.pi();
        let two = self.from_i64(2);
        let scale = self.sqrt(&self.div(&two, &self.mul(&pi, x)));
        let sh = self.sinh(x);
        Ok(self.mul(&scale, &sh))
    }

    /// Decimal text that [`MpContext::parse_dec`] reads back.
    pub fn format_dec(&mut self, x: &BigFloat) -> String {
        x.format(Radix::Dec, self.rm, &mut self.consts)
            .unwrap_or_else(|_| "0".into())
    }

    pub fn parse_dec(&mut self, s: &str) -> Option<BigFloat> {
        let v = BigFloat::parse(s, Radix::Dec, self.bits, self.rm, &mut self.consts);
        (!v.is_nan()).then_some(v)
    }

    pub fn to_f64(&self, x: &BigFloat) -> f64 {
        bigfloat_to_f64(x)
    }

    /// Nearest integer, ties away from zero.
    pub fn round_to_bigint(&self, x: &BigFloat) -> BigInt {
        let half = self.from_f64(0.5);
        let shifted = if x.is_negative() {
            self.sub(x, &half)
        } else {
            self.add(x, &half)
        };
        trunc_to_bigint(&shifted)
    }
}

fn to_u32_digits(words: &[u64]) -> Vec<u32> {
    words
        .iter()
        .flat_map(|w| [(*w & 0xffff_ffff) as u32, (*w >> 32) as u32])
        .collect()
}

/// Conversion through the raw mantissa; exact up to f64 rounding.
pub fn bigfloat_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let Some((mant, _, sign, exp, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let n = mant.len();
    let top = mant[n - 1] as f64;
    let next = if n >= 2 { mant[n - 2] as f64 } else { 0.0 };
    // value = 0.m × 2^exp, top word holds the leading 64 mantissa bits
    let frac = (top + next / 18446744073709551616.0) / 18446744073709551616.0;
    let v = frac * 2f64.powi(exp);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Integer part, truncating toward zero.
pub fn trunc_to_bigint(x: &BigFloat) -> BigInt {
    if x.is_zero() {
        return BigInt::zero();
    }
    let Some((mant, _, sign, exp, _)) = x.as_raw_parts() else {
        return BigInt::zero();
    };
    if exp <= 0 {
        return BigInt::zero();
    }
    let m = BigUint::from_slice(&to_u32_digits(mant));
    let total_bits = (mant.len() * 64) as i64;
    let shift = exp as i64 - total_bits;
    let mag = if shift >= 0 {
        m << shift as usize
    } else {
        m >> (-shift) as usize
    };
    let v = BigInt::from(mag);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Distance from `x` to the nearest integer, as f64.
pub fn distance_to_integer(ctx: &MpContext, x: &BigFloat) -> f64 {
    let r = ctx.round_to_bigint(x);
    let diff = ctx.sub(x, &ctx.from_bigint(&r));
    bigfloat_to_f64(&diff).abs()
}

pub fn bigint_abs_f64(x: &BigInt) -> f64 {
    x.abs().to_string().parse::<f64>().unwrap_or(f64::INFINITY)
}
