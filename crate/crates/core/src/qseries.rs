//! Exact truncated Laurent q-series over the rationals.
//!
//! A [`QSeries`] knows every coefficient from its leading exponent up to its
//! truncation order `trunc`; coefficients above `trunc` are unknown, not zero.
//! Products shorten the valid range by the other factor's principal-part
//! depth, exactly as one would by hand.
//!
//! The classical building blocks (θ, Δ, E_k, j(4τ)) are produced on integer
//! vectors and only wrapped as rationals at the end.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{bigfloat_to_f64, MpComplex, MpContext, PrecisionPolicy};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QSeriesError {
    #[error("tail bound {bound:e} exceeds 2^-{half_bits}; raise Im(tau) or the truncation order")]
    TailTooLarge { bound: f64, half_bits: usize },
    #[error("cannot parse series line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("empty linear combination")]
    EmptyCombination,
    #[error("series has no invertible leading term")]
    NotInvertible,
}

/// A truncated Laurent series `Σ_{n=start}^{trunc} a_n q^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    start: i64,
    trunc: i64,
    coeffs: Vec<BigRational>,
}

/// Coefficients sitting at exponents ≡ 2, 3 (mod 4).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlusSupportReport {
    pub violations: Vec<(i64, BigRational)>,
}

impl PlusSupportReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl QSeries {
    /// Builds a series from dense coefficients starting at `start`; exponents
    /// beyond `trunc` are dropped and missing ones up to `trunc` are zero.
    pub fn from_dense(start: i64, trunc: i64, mut coeffs: Vec<BigRational>) -> Self {
        let len = (trunc - start + 1).max(0) as usize;
        coeffs.resize(len, BigRational::zero());
        let mut s = Self {
            start,
            trunc,
            coeffs,
        };
        s.normalize();
        s
    }

    pub fn from_integers(start: i64, trunc: i64, coeffs: Vec<BigInt>) -> Self {
        Self::from_dense(
            start,
            trunc,
            coeffs.into_iter().map(BigRational::from_integer).collect(),
        )
    }

    /// Builds a series from sparse `(exponent, coefficient)` pairs.
    pub fn from_terms<I>(trunc: i64, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let terms: Vec<_> = terms.into_iter().filter(|(e, _)| *e <= trunc).collect();
        let start = terms.iter().map(|(e, _)| *e).min().unwrap_or(0).min(trunc.max(0));
        let mut dense = vec![BigRational::zero(); (trunc - start + 1).max(0) as usize];
        for (e, c) in terms {
            dense[(e - start) as usize] += c;
        }
        Self::from_dense(start, trunc, dense)
    }

    pub fn zero(trunc: i64) -> Self {
        Self::from_dense(0, trunc, Vec::new())
    }

    pub fn monomial(exp: i64, coeff: BigRational, trunc: i64) -> Self {
        Self::from_terms(trunc, [(exp, coeff)])
    }

    pub fn constant(c: BigRational, trunc: i64) -> Self {
        Self::monomial(0, c, trunc)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(0) => {}
            Some(k) => {
                self.coeffs.drain(..k);
                self.start += k as i64;
            }
            None => {
                self.coeffs.clear();
                self.start = 0.min(self.trunc + 1);
                let len = (self.trunc - self.start + 1).max(0) as usize;
                self.coeffs = vec![BigRational::zero(); len];
            }
        }
    }

    /// Most negative exponent with a nonzero coefficient; 0 for the zero series.
    pub fn min_exp(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.start
        }
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// Lower bound for the order of vanishing: the leading exponent, or
    /// `trunc + 1` for a series known to vanish up to `trunc`.
    fn valuation(&self) -> i64 {
        if self.is_zero() {
            self.trunc + 1
        } else {
            self.start
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Coefficient at `exp`, or `None` above the truncation order.
    pub fn coeff(&self, exp: i64) -> Option<BigRational> {
        if exp > self.trunc {
            return None;
        }
        if exp < self.start {
            return Some(BigRational::zero());
        }
        Some(self.coeffs[(exp - self.start) as usize].clone())
    }

    /// Coefficient at `exp` as an integer; panics if it is not one or lies
    /// beyond the truncation order. Intended for series known to be integral.
    pub fn int_coeff(&self, exp: i64) -> BigInt {
        let c = self
            .coeff(exp)
            .unwrap_or_else(|| panic!("exponent {exp} beyond truncation {}", self.trunc));
        assert!(c.is_integer(), "coefficient at {exp} is not integral: {c}");
        c.to_integer()
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.start + i as i64, c))
    }

    /// The terms with negative exponent.
    pub fn principal_part(&self) -> Vec<(i64, BigRational)> {
        self.terms()
            .filter(|(e, _)| *e < 0)
            .map(|(e, c)| (e, c.clone()))
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(BigRational::is_integer)
    }

    /// Dense integer coefficients from `start` to `trunc`, if all are integral.
    pub fn to_integers(&self) -> Option<(i64, Vec<BigInt>)> {
        if !self.is_integral() {
            return None;
        }
        Some((
            self.start,
            self.coeffs.iter().map(|c| c.to_integer()).collect(),
        ))
    }

    pub fn truncate(&self, trunc: i64) -> Self {
        let trunc = trunc.min(self.trunc);
        let keep = (trunc - self.start + 1).max(0) as usize;
        Self::from_dense(self.start, trunc, self.coeffs[..keep.min(self.coeffs.len())].to_vec())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::from_dense(
            self.start,
            self.trunc,
            self.coeffs.iter().map(|c| c * s).collect(),
        )
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn add(&self, other: &Self) -> Self {
        combine(&[(BigRational::one(), self), (BigRational::one(), other)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        combine(&[(BigRational::one(), self), (-BigRational::one(), other)])
    }

    /// Cauchy product. The result is valid up to
    /// `min(a.trunc + b.min_exp, b.trunc + a.min_exp)`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            let t = (self.trunc + other.valuation()).min(other.trunc + self.valuation());
            return Self::zero(t);
        }
        let trunc = (self.trunc + other.start).min(other.trunc + self.start);
        let start = self.start + other.start;
        if let (Some((_, a)), Some((_, b))) = (self.to_integers(), other.to_integers()) {
            let len = (trunc - start + 1).max(0) as usize;
            return Self::from_integers(start, trunc, int_mul(&a, &b, len));
        }
        let len = (trunc - start + 1).max(0) as usize;
        let mut out = vec![BigRational::zero(); len];
        for (i, x) in self.coeffs.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate().take(len - i) {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        Self::from_dense(start, trunc, out)
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Self::constant(BigRational::one(), self.trunc - self.start);
        }
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result.expect("positive exponent")
    }

    /// Substitutes `q → q^k`.
    pub fn dilate(&self, k: i64) -> Self {
        assert!(k >= 1, "dilation factor must be positive");
        let trunc = self.trunc * k + (k - 1);
        Self::from_terms(trunc, self.terms().map(|(e, c)| (e * k, c.clone())))
    }

    /// Multiplies by `q^s`.
    pub fn shift(&self, s: i64) -> Self {
        Self {
            start: self.start + s,
            trunc: self.trunc + s,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Lists coefficients at exponents ≡ 2, 3 (mod 4).
    pub fn plus_support(&self) -> PlusSupportReport {
        PlusSupportReport {
            violations: self
                .terms()
                .filter(|(e, _)| matches!(e.rem_euclid(4), 2 | 3))
                .map(|(e, c)| (e, c.clone()))
                .collect(),
        }
    }

    /// Numerically evaluates the truncated sum at `tau`.
    ///
    /// The tail beyond `trunc` is bounded by `C·|q|^{trunc+1}/(1−|q|)` with `C`
    /// the largest absolute coefficient in the upper half of the stored range,
    /// a heuristic suited to the slowly growing series evaluated here.
    pub fn eval_at(
        &self,
        tau: &MpComplex,
        policy: &PrecisionPolicy,
    ) -> Result<MpComplex, QSeriesError> {
        let mut ctx = policy.context();
        let y = bigfloat_to_f64(&tau.im);
        let abs_q = (-2.0 * std::f64::consts::PI * y).exp();
        let upper = self.coeffs.len() / 2;
        let cmax = self.coeffs[upper..]
            .iter()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0f64, f64::max)
            .max(1.0);
        let bound = if abs_q >= 1.0 {
            f64::INFINITY
        } else {
            cmax * abs_q.powf((self.trunc + 1) as f64) / (1.0 - abs_q)
        };
        let half_bits = policy.precision_bits / 2;
        if !(bound < 2f64.powi(-(half_bits as i32))) {
            return Err(QSeriesError::TailTooLarge { bound, half_bits });
        }
        let q = exp_2pi_i(&mut ctx, tau, 1);
        let mut power = exp_2pi_i(&mut ctx, tau, self.start);
        let mut acc = MpComplex {
            re: ctx.zero(),
            im: ctx.zero(),
        };
        for c in &self.coeffs {
            if !c.is_zero() {
                let v = ctx.from_ratio(c.numer(), c.denom());
                acc.re = ctx.add(&acc.re, &ctx.mul(&v, &power.re));
                acc.im = ctx.add(&acc.im, &ctx.mul(&v, &power.im));
            }
            power = ctx.cmul(&power, &q);
        }
        Ok(acc)
    }

    /// Text form: one `exponent numerator/denominator` line per nonzero
    /// coefficient, preceded by a `trunc <n>` header.
    pub fn to_text(&self) -> String {
        let mut out = format!("trunc {}\n", self.trunc);
        for (e, c) in self.terms() {
            let _ = writeln!(out, "{} {}/{}", e, c.numer(), c.denom());
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, QSeriesError> {
        let mut trunc = None;
        let mut terms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: &str| QSeriesError::Parse {
                line: i + 1,
                reason: reason.to_string(),
            };
            let mut parts = line.split_whitespace();
            let head = parts.next().ok_or_else(|| err("empty line"))?;
            let tail = parts.next().ok_or_else(|| err("missing value"))?;
            if parts.next().is_some() {
                return Err(err("trailing tokens"));
            }
            if head == "trunc" {
                trunc = Some(tail.parse::<i64>().map_err(|e| err(&e.to_string()))?);
                continue;
            }
            let e: i64 = head.parse().map_err(|_| err("bad exponent"))?;
            let c = BigRational::from_str(tail).map_err(|_| err("bad rational"))?;
            terms.push((e, c));
        }
        let trunc = trunc.ok_or(QSeriesError::Parse {
            line: 0,
            reason: "missing trunc header".into(),
        })?;
        Ok(Self::from_terms(trunc, terms))
    }
}

fn exp_2pi_i(ctx: &mut MpContext, tau: &MpComplex, n: i64) -> MpComplex {
    let pi = ctx.pi();
    let two_pi_n = ctx.mul(&ctx.mul(&pi, &ctx.from_i64(2)), &ctx.from_i64(n));
    let modulus = {
        let arg = ctx.mul(&two_pi_n, &tau.im);
        let mut neg = arg.clone();
        neg.inv_sign();
        ctx.exp(&neg)
    };
    let angle = ctx.mul(&two_pi_n, &tau.re);
    let (c, s) = (ctx.cos(&angle), ctx.sin(&angle));
    MpComplex {
        re: ctx.mul(&modulus, &c),
        im: ctx.mul(&modulus, &s),
    }
}

/// Exact linear combination `Σ s_i·f_i`; the result is valid up to the
/// smallest truncation order among the inputs.
pub fn combine(terms: &[(BigRational, &QSeries)]) -> QSeries {
    assert!(!terms.is_empty(), "combination needs at least one term");
    let trunc = terms.iter().map(|(_, f)| f.trunc).min().unwrap();
    let start = terms.iter().map(|(_, f)| f.start).min().unwrap().min(trunc);
    let len = (trunc - start + 1).max(0) as usize;
    let mut out = vec![BigRational::zero(); len];
    for (s, f) in terms {
        if s.is_zero() {
            continue;
        }
        for (e, c) in f.terms() {
            if e > trunc {
                break;
            }
            out[(e - start) as usize] += s * c;
        }
    }
    QSeries::from_dense(start, trunc, out)
}

/// Same as [`combine`] with integer scalars.
pub fn combine_int(terms: &[(i64, &QSeries)]) -> QSeries {
    let terms: Vec<_> = terms
        .iter()
        .map(|(s, f)| (BigRational::from_integer(BigInt::from(*s)), *f))
        .collect();
    combine(&terms)
}

/// Truncated product of dense integer vectors (both starting at exponent 0).
pub(crate) fn int_mul(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Inverse of an integer power series with constant term ±1.
pub(crate) fn int_inverse(a: &[BigInt], len: usize) -> Result<Vec<BigInt>, QSeriesError> {
    let a0 = a.first().ok_or(QSeriesError::NotInvertible)?;
    if !(a0.is_one() || (-a0).is_one()) {
        return Err(QSeriesError::NotInvertible);
    }
    let mut out = vec![BigInt::zero(); len];
    for n in 0..len {
        let mut acc = if n == 0 { BigInt::one() } else { BigInt::zero() };
        for k in 1..=n.min(a.len() - 1) {
            if !a[k].is_zero() {
                acc -= &a[k] * &out[n - k];
            }
        }
        out[n] = acc * a0;
    }
    Ok(out)
}

fn int_pow(a: &[BigInt], e: u32, len: usize) -> Vec<BigInt> {
    let mut result = vec![BigInt::zero(); len];
    if len > 0 {
        result[0] = BigInt::one();
    }
    let mut base = a[..a.len().min(len)].to_vec();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = int_mul(&result, &base, len);
        }
        e >>= 1;
        if e > 0 {
            base = int_mul(&base, &base, len);
        }
    }
    result
}

/// `∏_{n≥1}(1−q^n)` via Euler's pentagonal-number theorem, coefficients
/// `0..len`.
pub(crate) fn euler_product(len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for k in 0i64.. {
        let p1 = k * (3 * k - 1) / 2;
        if p1 as usize >= len {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        out[p1 as usize] += sign;
        if k > 0 {
            let p2 = k * (3 * k + 1) / 2;
            if (p2 as usize) < len {
                out[p2 as usize] += sign;
            }
        }
    }
    out
}

/// `σ_k(n)` for `n` in `0..len` (with `σ_k(0) = 0`).
fn divisor_sums(k: u32, len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for d in 1..len {
        let dk = BigInt::from(d).pow(k);
        for m in (d..len).step_by(d) {
            out[m] += &dk;
        }
    }
    out
}

/// Normalized Eisenstein series `E_k = 1 + c_k Σ σ_{k−1}(n) q^n` for the
/// weights with integral `c_k = −2k/B_k`.
pub fn eisenstein_series(k: u32, trunc: i64) -> QSeries {
    let ck: i64 = match k {
        4 => 240,
        6 => -504,
        8 => 480,
        10 => -264,
        14 => -24,
        _ => panic!("E_{k} is not tabulated"),
    };
    QSeries::from_integers(0, trunc, eisenstein_ints(k, ck, (trunc + 1).max(0) as usize))
}

fn eisenstein_ints(k: u32, ck: i64, len: usize) -> Vec<BigInt> {
    let mut v: Vec<BigInt> = divisor_sums(k - 1, len)
        .into_iter()
        .map(|s| s * ck)
        .collect();
    if len > 0 {
        v[0] = BigInt::one();
    }
    v
}

/// `θ(m²τ) = Σ_{n∈ℤ} q^{m²n²}` up to `trunc`.
pub fn theta_series(m: u64, trunc: i64) -> QSeries {
    assert!(m >= 1, "theta dilation must be positive");
    let len = (trunc + 1).max(0) as usize;
    let mut v = vec![BigInt::zero(); len];
    let step = (m * m) as usize;
    for k in 0usize.. {
        let e = step * k * k;
        if e >= len {
            break;
        }
        v[e] = BigInt::from(if k == 0 { 1 } else { 2 });
    }
    QSeries::from_integers(0, trunc, v)
}

/// `Δ = q·∏(1−q^n)^{24}` up to `trunc`.
pub fn delta_series(trunc: i64) -> QSeries {
    let len = trunc.max(0) as usize;
    let p = int_pow(&euler_product(len), 24, len);
    QSeries::from_integers(1, trunc, p)
}

/// `j(τ) = E_4³/Δ` up to `trunc`, as integers from exponent −1.
pub(crate) fn j_ints(trunc: i64) -> Vec<BigInt> {
    // j = q^{-1}·E4³·P^{-1} where Δ = q·P
    let len = (trunc + 2).max(1) as usize;
    let e4 = eisenstein_ints(4, 240, len);
    let e4c = int_pow(&e4, 3, len);
    let p = int_pow(&euler_product(len), 24, len);
    let pinv = int_inverse(&p, len).expect("Euler product is invertible");
    int_mul(&e4c, &pinv, len)
}

/// `j(τ) = E_4³/Δ = q^{−1} + 744 + 196884q + …` up to `trunc`.
pub fn j_series(trunc: i64) -> QSeries {
    QSeries::from_integers(-1, trunc, j_ints(trunc))
}

/// `j(4τ) = q^{−4} + 744 + 196884q⁴ + …` up to `trunc`.
pub fn j4_series(trunc: i64) -> QSeries {
    j_series(Integer::div_floor(&trunc, &4)).dilate(4).truncate(trunc)
}
