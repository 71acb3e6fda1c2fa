//! Plus-space Rademacher sums `Z^{[−m]}_{N,ψ}` of weight 1/2 on Γ₀(4N).
//!
//! The Fourier coefficients are
//!
//! ```text
//! c(−m; 0) = 4π√m (1−i) Σ_{4N|c} (1+δ_odd(c/4)) K_ψ(−m, 0, c) / c^{3/2}
//! c(−m; n) = π√2 (n/m)^{−1/4} (1−i) Σ_{4N|c} (1+δ_odd(c/4)) K_ψ(−m, n, c)/c · I_{1/2}(4π√(mn)/c)
//! K_ψ(m, n, c) = Σ_{d ∈ (ℤ/c)^*} ψ(c,d) (c/d) ε_d e((m d̄ + n d)/c)
//! ```
//!
//! with `ψ(c,d) = e(−v·c·d/(N·h))`. Every phase is assembled as an exact
//! rational before it is evaluated.
//!
//! # Evaluation strategy
//!
//! The c-sum converges only conditionally and slowly. Each c-term is computed
//! independently (in parallel), then reduced in increasing-c order at full
//! working precision. Terms whose f64 evaluation could be off by more than
//! [`F64_TERM_TOLERANCE`] (the first few, where the Bessel factor is
//! exponentially large) are evaluated at the policy's precision instead.
//!
//! By default the truncated sum is smoothed: term `c = 4Nk` is weighted by a
//! C^∞ bump `w(k/X)` equal to 1 on `[0, X/4]` and vanishing at `X`. At
//! desk-scale cutoffs this is typically a few times more accurate than the
//! sharp partial sum, but both are limited by the slow (roughly `X^{-1/2}`)
//! decay of the tail: at 8000 terms the level-1 coefficients sit within a
//! few 10⁻³ of their limits. The heuristic error estimate is the spread of the
//! smoothed sums over `tail_window` cutoffs `X ∈ [c_max/2, c_max]`; for the
//! sharp sum it is the oscillation of the last `tail_window` partial sums.

use std::fmt;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{
    bigfloat_to_f64, ext_gcd, genus_gamma0, ArithError,
    MpComplex, MpContext, PrecisionPolicy,
};
use crate::cache::{TermCache, TermKey};
use crate::qseries::QSeries;

/// Absolute error allowed for a c-term evaluated in f64 before it is
/// recomputed at the working precision.
pub const F64_TERM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum RademacherError {
    #[error("4N = {four_n} does not divide c = {c}")]
    LevelMismatch { c: i64, four_n: i64 },
    #[error("exponent {0} is ≡ 2, 3 (mod 4); plus-space coefficients vanish there")]
    NotPlusExponent(i64),
    #[error("coefficient at q^{n} has imaginary part {imag:e} against error estimate {error:e}")]
    ImaginaryResidue { n: i64, imag: f64, error: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// The multiplier `ψ(c,d) = e(−v·c·d/(N·h))` on Γ₀(4N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiplierSystem {
    /// `N`: the group is Γ₀(4N).
    pub level: u64,
    pub v: i64,
    pub h: u64,
}

impl MultiplierSystem {
    pub fn new(level: u64, v: i64, h: u64) -> Result<Self, RademacherError> {
        if level == 0 || h == 0 {
            return Err(RademacherError::InvalidParams(format!(
                "level and h must be positive, got N={level}, h={h}"
            )));
        }
        Ok(Self { level, v, h })
    }

    pub fn trivial(level: u64) -> Self {
        Self { level, v: 0, h: 1 }
    }

    /// `(v̂, ĥ)` with `ĥ = h/gcd(h,4)` and `v̂ = 4v/gcd(h,4) mod ĥ`.
    pub fn hat(&self) -> (i64, u64) {
        let g = self.h.gcd(&4);
        let h_hat = self.h / g;
        let v_hat = (4 * self.v / g as i64).rem_euclid(h_hat as i64);
        (v_hat, h_hat)
    }

    /// Whether `v̂ ≡ ±1 (mod ĥ)`.
    pub fn satisfies_hat_constraint(&self) -> bool {
        let (v_hat, h_hat) = self.hat();
        let h_hat = h_hat as i64;
        h_hat == 1 || v_hat == 1 % h_hat || v_hat == h_hat - 1
    }

    /// On `c = 4Nk` the multiplier is `e(−4v·k·d/h)`; returns the reduced
    /// fraction `a/b ≡ 4v/h (mod 1)` with `0 ≤ a < b`, so that
    /// `ψ = e(−a·k·d/b)`.
    pub fn phase_fraction(&self) -> (i64, i64) {
        let num = 4 * self.v;
        let den = self.h as i64;
        let g = num.gcd(&den);
        let (a, b) = (num / g, den / g);
        (a.rem_euclid(b), b)
    }

    pub fn is_trivial(&self) -> bool {
        self.phase_fraction().1 == 1
    }

    /// The smallest-`h` system inducing the same phases: `(a, 4b)` for
    /// `ψ = e(−a·k·d/b)`, or `(0, 1)` when ψ is trivial.
    pub fn canonical(&self) -> Self {
        let (a, b) = self.phase_fraction();
        if b == 1 {
            Self::trivial(self.level)
        } else {
            Self {
                level: self.level,
                v: a,
                h: 4 * b as u64,
            }
        }
    }
}

impl fmt::Display for MultiplierSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.v, self.h)
    }
}

/// One Rademacher sum `Z^{[−m]}_{N,ψ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RademacherSpec {
    /// Polar order: the sum starts `q^{−m}`.
    pub m: i64,
    pub mult: MultiplierSystem,
}

impl RademacherSpec {
    pub fn new(m: i64, mult: MultiplierSystem) -> Result<Self, RademacherError> {
        if m <= 0 {
            return Err(RademacherError::InvalidParams(format!(
                "polar order must be positive, got {m}"
            )));
        }
        Ok(Self { m, mult })
    }

    pub fn trivial(m: i64, level: u64) -> Self {
        Self {
            m,
            mult: MultiplierSystem::trivial(level),
        }
    }

    pub fn level(&self) -> u64 {
        self.mult.level
    }

    /// Plus-space polar terms have `m ≡ 0, 3 (mod 4)`.
    pub fn is_plus_polar(&self) -> bool {
        matches!(self.m.rem_euclid(4), 0 | 3)
    }

    /// The same sum with its multiplier in canonical form.
    pub fn canonical(&self) -> Self {
        Self {
            m: self.m,
            mult: self.mult.canonical(),
        }
    }

    /// A warning when the coefficient formulas are outside their stated
    /// range of validity: even `N` with Γ₀(4N) of positive genus, or a polar
    /// order outside the plus-space pattern.
    pub fn validity_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let n = self.level();
        if n.is_multiple_of(2) {
            let g = genus_gamma0(4 * n);
            if g != 0 {
                w.push(format!(
                    "N = {n} is even and X_0({}) has genus {g}; the coefficient formulas are not established here",
                    4 * n
                ));
            }
        }
        if !self.is_plus_polar() {
            w.push(format!("polar order {} is not ≡ 0, 3 (mod 4)", self.m));
        }
        w
    }
}

impl fmt::Display for RademacherSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z^[-{}]_{}", self.m, self.level())?;
        if !self.mult.is_trivial() {
            write!(f, ",{}", self.mult)?;
        }
        Ok(())
    }
}

/// How the truncated c-sum is turned into a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Summation {
    /// Weighted by a smooth cutoff; the default.
    #[default]
    Smooth,
    /// Plain partial sum up to `c_max`.
    Sharp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalParams {
    pub policy: PrecisionPolicy,
    /// Number of c-terms: `c` runs over `4N, 8N, …, 4N·c_max`.
    pub c_max: u64,
    pub tail_window: usize,
    pub summation: Summation,
}

impl EvalParams {
    pub const DEFAULT_C_MAX: u64 = 2000;
    pub const DEFAULT_TAIL_WINDOW: usize = 8;

    pub fn new(
        policy: PrecisionPolicy,
        c_max: u64,
        tail_window: usize,
        summation: Summation,
    ) -> Result<Self, RademacherError> {
        if c_max < 16 {
            return Err(RademacherError::InvalidParams(format!(
                "c_max must be at least 16, got {c_max}"
            )));
        }
        if tail_window < 8 || tail_window as u64 > c_max {
            return Err(RademacherError::InvalidParams(format!(
                "tail_window must lie in [8, c_max], got {tail_window}"
            )));
        }
        Ok(Self {
            policy,
            c_max,
            tail_window,
            summation,
        })
    }

    pub fn with_c_max(&self, c_max: u64) -> Self {
        Self { c_max, ..*self }
    }
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            policy: PrecisionPolicy::default(),
            c_max: Self::DEFAULT_C_MAX,
            tail_window: Self::DEFAULT_TAIL_WINDOW,
            summation: Summation::Smooth,
        }
    }
}

/// A numerically evaluated coefficient.
#[derive(Debug, Clone)]
pub struct CoefficientResult {
    pub n: i64,
    /// Real part of the assembled sum.
    pub value: BigFloat,
    /// Imaginary part of the assembled sum (expected to vanish).
    pub imag: f64,
    /// Heuristic truncation error plus the f64 rounding bound.
    pub error_estimate: f64,
    /// Distance from `value` to the nearest integer.
    pub rounding_distance: f64,
    /// Present when both the rounding distance and the error estimate are
    /// below the policy's rounding threshold.
    pub certified_integer: Option<BigInt>,
}

impl CoefficientResult {
    pub fn value_f64(&self) -> f64 {
        bigfloat_to_f64(&self.value)
    }
}

/// Exact Kloosterman sum `K_ψ(m, n, c)` at the policy's precision.
pub fn kloosterman(
    mult: &MultiplierSystem,
    m: i64,
    n: i64,
    c: i64,
    policy: &PrecisionPolicy,
) -> Result<MpComplex, RademacherError> {
    check_level(mult, c)?;
    let mut ctx = policy.context();
    let phases = PhaseTable::new(mult, m, c);
    let mut acc = MpComplex {
        re: ctx.zero(),
        im: ctx.zero(),
    };
    for unit in &phases.units {
        let e = ctx.e_frac(phases.numerator(unit, n), phases.modulus)?;
        acc = ctx.cadd(&acc, &e);
    }
    Ok(acc)
}

/// Kloosterman sums for several `n` at once, in f64.
pub fn kloosterman_f64(
    mult: &MultiplierSystem,
    m: i64,
    ns: &[i64],
    c: i64,
) -> Result<Vec<(f64, f64)>, RademacherError> {
    check_level(mult, c)?;
    let phases = PhaseTable::new(mult, m, c);
    Ok(phases.sums_f64(ns))
}

fn check_level(mult: &MultiplierSystem, c: i64) -> Result<(), RademacherError> {
    let four_n = 4 * mult.level as i64;
    if c <= 0 || c % four_n != 0 {
        return Err(RademacherError::LevelMismatch { c, four_n });
    }
    Ok(())
}

struct Unit {
    d: i64,
    /// Phase numerator of everything except the `n·d` part.
    base: i64,
}

/// Exact phases `ψ(c,d)(c/d)ε_d e((m d̄ + n d)/c) = e(num/L)` with
/// `L = 4·c·b`, where `ψ = e(−a·k·d/b)` and `k = c/(4N)`.
struct PhaseTable {
    c: i64,
    b: i64,
    modulus: i64,
    units: Vec<Unit>,
}

impl PhaseTable {
    fn new(mult: &MultiplierSystem, m: i64, c: i64) -> Self {
        let (a, b) = mult.phase_fraction();
        let k = c / (4 * mult.level as i64);
        // L ≤ 16c, so every product below stays far inside i64 for the
        // c-ranges this crate evaluates (c < 2^24).
        let l = 4 * c * b;
        let psi_step = (4 * a * (k % b.max(1))).rem_euclid(l) * c % l;
        let m_step = (4 * b * m).rem_euclid(l);
        let symbol = KroneckerTable::new(c);
        let ds: Vec<i64> = (1..c)
            .step_by(2)
            .filter(|&d| symbol.get(d) != 0)
            .collect();
        let dbars = batch_inverse(&ds, c);
        let mut units = Vec::with_capacity(ds.len());
        for (&d, &dbar) in ds.iter().zip(&dbars) {
            let mut num = m_step * dbar % l;
            if d % 4 == 3 {
                num += c * b;
            }
            if symbol.get(d) == -1 {
                num += 2 * c * b;
            }
            num -= psi_step * d % l;
            units.push(Unit {
                d,
                base: num.rem_euclid(l),
            });
        }
        Self {
            c,
            b,
            modulus: l,
            units,
        }
    }

    fn numerator(&self, unit: &Unit, n: i64) -> i64 {
        let step = (4 * self.b * n).rem_euclid(self.modulus) * unit.d % self.modulus;
        (unit.base + step) % self.modulus
    }

    /// Σ over units in f64. For each unit, `e(base/L)` and `e(d/c)` are
    /// evaluated once and the `n`-dependence is built by complex powers.
    fn sums_f64(&self, ns: &[i64]) -> Vec<(f64, f64)> {
        let l = self.modulus as f64;
        let cf = self.c as f64;
        let tau = std::f64::consts::TAU;
        let mut order: Vec<usize> = (0..ns.len()).collect();
        order.sort_by_key(|&j| ns[j]);
        let mut out = vec![(0.0, 0.0); ns.len()];
        for unit in &self.units {
            let (bs, bc) = (tau * unit.base as f64 / l).sin_cos();
            let (ws, wc) = (tau * (unit.d % self.c) as f64 / cf).sin_cos();
            let w = (wc, ws);
            // running value e(base/L)·w^n along increasing n
            let mut cur = (bc, bs);
            let mut at = 0i64;
            for &j in &order {
                let gap = ns[j] - at;
                if gap > 0 {
                    cur = cmul(cur, cpow(w, gap as u64));
                    at = ns[j];
                }
                out[j].0 += cur.0;
                out[j].1 += cur.1;
            }
        }
        out
    }
}

/// `d ↦ (c/d)` on odd positive `d`, for `4 | c`, by table lookup.
///
/// With `c = 2^e·c'`, `(c/d) = (2/d)^e (c'/d)` and by reciprocity
/// `(c'/d) = (d/c')·(−1)^{(c'−1)/2·(d−1)/2}`; `(·/c')` is tabulated from
/// Legendre symbols of the prime factors of `c'`. A zero entry marks a
/// non-unit.
struct KroneckerTable {
    odd: i64,
    two_power_odd: bool,
    odd_is_3_mod_4: bool,
    table: Vec<i8>,
}

impl KroneckerTable {
    fn new(c: i64) -> Self {
        let e = c.trailing_zeros();
        let odd = c >> e;
        let mut table = vec![1i8; odd as usize];
        let mut rest = odd;
        let mut p = 3;
        while rest > 1 {
            if p * p > rest {
                p = rest;
            }
            if rest % p == 0 {
                let mut mult = 0;
                while rest % p == 0 {
                    rest /= p;
                    mult += 1;
                }
                let mut legendre = vec![-1i8; p as usize];
                legendre[0] = 0;
                for x in 1..=(p / 2) {
                    legendre[(x * x % p) as usize] = 1;
                }
                for (x, t) in table.iter_mut().enumerate() {
                    let s = legendre[x % p as usize];
                    *t *= if mult % 2 == 1 { s } else { s * s };
                }
            }
            p += 2;
        }
        if odd == 1 {
            table[0] = 1;
        }
        Self {
            odd,
            two_power_odd: e % 2 == 1,
            odd_is_3_mod_4: odd % 4 == 3,
            table,
        }
    }

    #[inline]
    fn get(&self, d: i64) -> i8 {
        let mut s = self.table[(d % self.odd) as usize];
        if self.two_power_odd && matches!(d % 8, 3 | 5) {
            s = -s;
        }
        if self.odd_is_3_mod_4 && d % 4 == 3 {
            s = -s;
        }
        s
    }
}

/// Inverses modulo `c` of units `ds` with one extended gcd.
fn batch_inverse(ds: &[i64], c: i64) -> Vec<i64> {
    let mut prefix = Vec::with_capacity(ds.len());
    let mut acc = 1 % c;
    for &d in ds {
        acc = acc * d % c;
        prefix.push(acc);
    }
    let (_, x) = ext_gcd(acc, c);
    let mut inv = x.rem_euclid(c);
    let mut out = vec![0; ds.len()];
    for i in (0..ds.len()).rev() {
        let before = if i == 0 { 1 % c } else { prefix[i - 1] };
        out[i] = inv * before % c;
        inv = inv * ds[i] % c;
    }
    out
}

#[inline]
fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cpow(mut z: (f64, f64), mut e: u64) -> (f64, f64) {
    let mut r = (1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            r = cmul(r, z);
        }
        e >>= 1;
        if e > 0 {
            z = cmul(z, z);
        }
    }
    r
}

/// One c-term `(1+δ)·pref·B_c·(1−i)K`, real and imaginary parts.
#[derive(Debug, Clone)]
enum Term {
    Fast(f64, f64),
    Precise(BigFloat, BigFloat),
}

impl Term {
    fn to_line(&self, k: u64, ctx: &mut MpContext) -> String {
        match self {
            Term::Fast(re, im) => format!("{k} f {re:e} {im:e}"),
            Term::Precise(re, im) => {
                format!("{k} h {} {}", fmt_dec(re, ctx), fmt_dec(im, ctx))
            }
        }
    }

    fn from_line(line: &str, ctx: &mut MpContext) -> Option<(u64, Term)> {
        let mut it = line.split_whitespace();
        let k = it.next()?.parse().ok()?;
        let tag = it.next()?;
        let re = it.next()?;
        let im = it.next()?;
        let term = match tag {
            "f" => Term::Fast(re.parse().ok()?, im.parse().ok()?),
            "h" => Term::Precise(parse_dec(re, ctx)?, parse_dec(im, ctx)?),
            _ => return None,
        };
        Some((k, term))
    }

    fn parts(&self, ctx: &MpContext) -> (BigFloat, BigFloat) {
        match self {
            Term::Fast(re, im) => (ctx.from_f64(*re), ctx.from_f64(*im)),
            Term::Precise(re, im) => (re.clone(), im.clone()),
        }
    }
}

fn fmt_dec(x: &BigFloat, ctx: &mut MpContext) -> String {
    ctx.format_dec(x)
}

fn parse_dec(s: &str, ctx: &mut MpContext) -> Option<BigFloat> {
    ctx.parse_dec(s)
}

/// Per-coefficient constants shared by all c-terms.
struct CoeffShape {
    n: i64,
    m: i64,
    /// Prefactor in f64: `4π√m` (n = 0) or `π√2 (m/n)^{1/4}`.
    pref: f64,
}

impl CoeffShape {
    fn new(m: i64, n: i64) -> Self {
        let pi = std::f64::consts::PI;
        let pref = if n == 0 {
            4.0 * pi * (m as f64).sqrt()
        } else {
            pi * 2f64.sqrt() * (m as f64 / n as f64).powf(0.25)
        };
        Self { n, m, pref }
    }

    /// `B_c`: `c^{−3/2}` or `I_{1/2}(4π√(mn)/c)/c`, in f64.
    fn weight_f64(&self, c: f64) -> f64 {
        if self.n == 0 {
            c.powf(-1.5)
        } else {
            let x = 4.0 * std::f64::consts::PI * ((self.m * self.n) as f64).sqrt() / c;
            (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sinh() / c
        }
    }

    /// `pref·B_c` at full precision.
    fn scale_mp(&self, c: i64, ctx: &mut MpContext) -> Result<BigFloat, ArithError> {
        let pi = ctx.pi();
        let cf = ctx.from_i64(c);
        let m = ctx.from_i64(self.m);
        if self.n == 0 {
            let pref = ctx.mul(&ctx.mul(&ctx.from_i64(4), &pi), &ctx.sqrt(&m));
            let c32 = ctx.mul(&cf, &ctx.sqrt(&cf));
            Ok(ctx.div(&pref, &c32))
        } else {
            let n = ctx.from_i64(self.n);
            let ratio = ctx.div(&m, &n);
            let quarter = ctx.sqrt(&ctx.sqrt(&ratio));
            let pref = ctx.mul(&ctx.mul(&pi, &ctx.sqrt(&ctx.from_i64(2))), &quarter);
            let mn = ctx.from_i64(self.m * self.n);
            let x = ctx.div(&ctx.mul(&ctx.mul(&ctx.from_i64(4), &pi), &ctx.sqrt(&mn)), &cf);
            let bessel = ctx.bessel_i_half(&x)?;
            Ok(ctx.div(&ctx.mul(&pref, &bessel), &cf))
        }
    }
}

/// Computes all requested c-terms `c = 4N·k` for `k ∈ ks`.
fn compute_terms(
    spec: &RademacherSpec,
    shapes: &[CoeffShape],
    ks: std::ops::RangeInclusive<u64>,
    policy: &PrecisionPolicy,
) -> Result<Vec<Vec<Term>>, RademacherError> {
    let four_n = 4 * spec.level();
    let ns: Vec<i64> = shapes.iter().map(|s| s.n).collect();
    let ks: Vec<u64> = ks.collect();
    ks.par_iter()
        .map(|&k| {
            let c = (four_n * k) as i64;
            let doubling = if (c / 4) % 2 == 1 { 2.0 } else { 1.0 };
            let phases = PhaseTable::new(&spec.mult, -spec.m, c);
            let units = phases.units.len() as f64;
            let scale: Vec<f64> = shapes
                .iter()
                .map(|s| doubling * s.pref * s.weight_f64(c as f64))
                .collect();
            // f64 error of Σ over `units` unit vectors, times the scale
            let precise: Vec<bool> = scale
                .iter()
                .map(|s| s.abs() * (units + 1.0) * 2f64.powi(-50) > F64_TERM_TOLERANCE)
                .collect();
            let fast = phases.sums_f64(&ns);
            let mut out = Vec::with_capacity(shapes.len());
            let mut ctx: Option<MpContext> = None;
            for (j, shape) in shapes.iter().enumerate() {
                if !precise[j] {
                    let (kr, ki) = fast[j];
                    let s = scale[j];
                    out.push(Term::Fast(s * (kr + ki), s * (ki - kr)));
                    continue;
                }
                let ctx = ctx.get_or_insert_with(|| policy.context());
                let mut acc = MpComplex {
                    re: ctx.zero(),
                    im: ctx.zero(),
                };
                for unit in &phases.units {
                    let e = ctx.e_frac(phases.numerator(unit, shape.n), phases.modulus)?;
                    acc = ctx.cadd(&acc, &e);
                }
                let sc = shape.scale_mp(c, ctx)?;
                let s = ctx.mul(&sc, &ctx.from_f64(doubling));
                let re = ctx.mul(&s, &ctx.add(&acc.re, &acc.im));
                let im = ctx.mul(&s, &ctx.sub(&acc.im, &acc.re));
                // canonical decimal form, so cached and fresh runs agree bit for bit
                let re = parse_dec(&fmt_dec(&re, ctx), ctx).unwrap_or(re);
                let im = parse_dec(&fmt_dec(&im, ctx), ctx).unwrap_or(im);
                out.push(Term::Precise(re, im));
            }
            Ok(out)
        })
        .collect()
}

/// `w(u)`: 1 on `[0, 1/4]`, a C^∞ transition to 0 at `u = 1`.
pub fn smooth_weight(u: f64) -> f64 {
    if u <= 0.25 {
        return 1.0;
    }
    if u >= 1.0 {
        return 0.0;
    }
    let v = (u - 0.25) / 0.75;
    let f = |y: f64| if y <= 0.0 { 0.0 } else { (-1.0 / y).exp() };
    let (a, b) = (f(1.0 - v), f(v));
    a / (a + b)
}

/// Reduces ordered c-terms to a value and error estimate.
fn reduce(
    terms: &[Term],
    params: &EvalParams,
    ctx: &MpContext,
) -> (BigFloat, BigFloat, f64) {
    let c_max = params.c_max as usize;
    let terms = &terms[..c_max];
    let parts: Vec<(BigFloat, BigFloat)> = terms.iter().map(|t| t.parts(ctx)).collect();
    let w = params.tail_window;
    match params.summation {
        Summation::Sharp => {
            let mut re = ctx.zero();
            let mut im = ctx.zero();
            let mut tail = Vec::with_capacity(w);
            for (i, (r, m)) in parts.iter().enumerate() {
                re = ctx.add(&re, r);
                im = ctx.add(&im, m);
                if i + w >= c_max {
                    tail.push(re.clone());
                }
            }
            let err = spread(&tail, ctx);
            (re, im, err)
        }
        Summation::Smooth => {
            let mut sums = Vec::with_capacity(w);
            let mut last = (ctx.zero(), ctx.zero());
            for j in 0..w {
                let x = c_max as f64 * (0.5 + 0.5 * j as f64 / (w - 1) as f64);
                let mut re = ctx.zero();
                let mut im = ctx.zero();
                for (i, (r, m)) in parts.iter().enumerate() {
                    let wt = smooth_weight((i + 1) as f64 / x);
                    if wt == 0.0 {
                        break;
                    }
                    if wt == 1.0 {
                        re = ctx.add(&re, r);
                        im = ctx.add(&im, m);
                    } else {
                        let wb = ctx.from_f64(wt);
                        re = ctx.add(&re, &ctx.mul(&wb, r));
                        im = ctx.add(&im, &ctx.mul(&wb, m));
                    }
                }
                sums.push(re.clone());
                last = (re, im);
            }
            let err = spread(&sums, ctx);
            (last.0, last.1, err)
        }
    }
}

/// `max − min` of the values, computed relative to the first so that huge
/// values keep their low-order digits.
fn spread(xs: &[BigFloat], ctx: &MpContext) -> f64 {
    let Some(first) = xs.first() else {
        return 0.0;
    };
    let rel: Vec<f64> = xs
        .iter()
        .map(|x| bigfloat_to_f64(&ctx.sub(x, first)))
        .collect();
    let lo = rel.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = rel.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

fn term_key(spec: &RademacherSpec, n: i64, bits: usize) -> TermKey {
    let c = spec.canonical();
    TermKey {
        level: c.level(),
        v: c.mult.v,
        h: c.mult.h,
        m: c.m,
        n,
        precision_bits: bits,
    }
}

/// Evaluates `c_N(−m; n)` for every `n` in `ns` with one pass over the
/// Kloosterman units.
pub fn rad_coefficients(
    spec: &RademacherSpec,
    ns: &[i64],
    params: &EvalParams,
    cache: Option<&TermCache>,
) -> Result<Vec<CoefficientResult>, RademacherError> {
    for &n in ns {
        if n < 0 || matches!(n.rem_euclid(4), 2 | 3) {
            return Err(RademacherError::NotPlusExponent(n));
        }
    }
    let policy = params.policy;
    let bits = policy.precision_bits;
    let mut ctx = policy.context();
    let mut vectors: Vec<Option<Vec<Term>>> = vec![None; ns.len()];
    if let Some(cache) = cache {
        for (j, &n) in ns.iter().enumerate() {
            if let Some((_, text)) = cache.load(&term_key(spec, n, bits), params.c_max) {
                let parsed: Option<Vec<Term>> = text
                    .lines()
                    .take(params.c_max as usize)
                    .map(|l| Term::from_line(l, &mut ctx).map(|(_, t)| t))
                    .collect();
                if let Some(v) = parsed.filter(|v| v.len() == params.c_max as usize) {
                    vectors[j] = Some(v);
                }
            }
        }
    }
    let missing: Vec<usize> = (0..ns.len()).filter(|&j| vectors[j].is_none()).collect();
    if !missing.is_empty() {
        let shapes: Vec<CoeffShape> = missing
            .iter()
            .map(|&j| CoeffShape::new(spec.m, ns[j]))
            .collect();
        let rows = compute_terms(spec, &shapes, 1..=params.c_max, &policy)?;
        for (col, &j) in missing.iter().enumerate() {
            let v: Vec<Term> = rows.iter().map(|row| row[col].clone()).collect();
            if let Some(cache) = cache {
                let text: String = v
                    .iter()
                    .enumerate()
                    .map(|(i, t)| t.to_line(i as u64 + 1, &mut ctx) + "\n")
                    .collect();
                if let Err(e) = cache.store(&term_key(spec, ns[j], bits), params.c_max, &text) {
                    eprintln!("warning: could not write cache entry: {e}");
                }
            }
            vectors[j] = Some(v);
        }
    }
    ns.iter()
        .zip(vectors)
        .map(|(&n, v)| finish(n, &v.expect("every vector is filled"), params, &ctx))
        .collect()
}

fn finish(
    n: i64,
    terms: &[Term],
    params: &EvalParams,
    ctx: &MpContext,
) -> Result<CoefficientResult, RademacherError> {
    let (re, im, spread_err) = reduce(terms, params, ctx);
    // every f64 term is within F64_TERM_TOLERANCE by construction
    let fast_terms = terms
        .iter()
        .take(params.c_max as usize)
        .filter(|t| matches!(t, Term::Fast(..)))
        .count();
    let f64_bound = F64_TERM_TOLERANCE * fast_terms as f64;
    let error_estimate = spread_err + f64_bound;
    let imag = bigfloat_to_f64(&im);
    if imag.abs() > 10.0 * error_estimate + 1e-9 {
        return Err(RademacherError::ImaginaryResidue {
            n,
            imag,
            error: error_estimate,
        });
    }
    let nearest = ctx.round_to_bigint(&re);
    let rounding_distance = bigfloat_to_f64(&ctx.sub(&re, &ctx.from_bigint(&nearest))).abs();
    let t = params.policy.rounding_threshold;
    let certified_integer = (rounding_distance < t && error_estimate < t).then_some(nearest);
    Ok(CoefficientResult {
        n,
        value: re,
        imag,
        error_estimate,
        rounding_distance,
        certified_integer,
    })
}

pub fn rad_coefficient(
    spec: &RademacherSpec,
    n: i64,
    params: &EvalParams,
    cache: Option<&TermCache>,
) -> Result<CoefficientResult, RademacherError> {
    Ok(rad_coefficients(spec, &[n], params, cache)?.remove(0))
}

/// A Rademacher sum assembled as a q-series.
#[derive(Debug, Clone)]
pub struct RadSeries {
    pub spec: RademacherSpec,
    /// `q^{−m}` plus certified integers, or 2^{-32}-rounded rationals where
    /// certification failed (see `results`).
    pub series: QSeries,
    pub results: Vec<CoefficientResult>,
}

impl RadSeries {
    pub fn all_certified(&self) -> bool {
        self.results.iter().all(|r| r.certified_integer.is_some())
    }
}

pub fn rad_series(
    spec: &RademacherSpec,
    trunc: i64,
    params: &EvalParams,
    cache: Option<&TermCache>,
) -> Result<RadSeries, RademacherError> {
    let ns = plus_exponents(trunc);
    let results = rad_coefficients(spec, &ns, params, cache)?;
    let ctx = params.policy.context();
    let scale = ctx.from_f64(2f64.powi(32));
    let denom: BigInt = BigInt::one() << 32usize;
    let terms = std::iter::once((-spec.m, BigRational::one())).chain(results.iter().map(|r| {
        let v = match &r.certified_integer {
            Some(k) => BigRational::from_integer(k.clone()),
            None => BigRational::new(ctx.round_to_bigint(&ctx.mul(&r.value, &scale)), denom.clone()),
        };
        (r.n, v)
    }));
    Ok(RadSeries {
        spec: *spec,
        series: QSeries::from_terms(trunc, terms),
        results,
    })
}

/// `n ∈ [0, trunc]` with `n ≡ 0, 1 (mod 4)`.
pub fn plus_exponents(trunc: i64) -> Vec<i64> {
    (0..=trunc)
        .filter(|n| matches!(n.rem_euclid(4), 0 | 1))
        .collect()
}

/// Distance of `value` to the integer `exact`, at the value's precision.
pub fn distance_to(value: &BigFloat, exact: &BigInt, ctx: &MpContext) -> f64 {
    bigfloat_to_f64(&ctx.sub(value, &ctx.from_bigint(exact))).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_constraint() {
        let ok = |v, h| MultiplierSystem::new(2, v, h).unwrap().satisfies_hat_constraint();
        assert!(ok(0, 1));
        assert!(ok(1, 8));
        assert!(!ok(2, 8));
        assert!(ok(3, 16));
        assert!(!ok(2, 16));
        assert!(ok(5, 16));
    }

    #[test]
    fn canonical_forms() {
        let c = |v, h| MultiplierSystem::new(1, v, h).unwrap().canonical();
        assert_eq!(c(1, 4), MultiplierSystem::trivial(1));
        assert_eq!(c(3, 8), MultiplierSystem::new(1, 1, 8).unwrap());
        assert_eq!(c(5, 16), MultiplierSystem::new(1, 1, 16).unwrap());
        assert_eq!(c(7, 16), MultiplierSystem::new(1, 3, 16).unwrap());
    }

    #[test]
    fn kloosterman_hand_values() {
        let p = PrecisionPolicy::default();
        let t = MultiplierSystem::trivial(1);
        for (m, n) in [(-3, 0), (0, 0)] {
            let k = kloosterman(&t, m, n, 4, &p).unwrap();
            assert!((bigfloat_to_f64(&k.re) - 1.0).abs() < 1e-40);
            assert!((bigfloat_to_f64(&k.im) - 1.0).abs() < 1e-40);
        }
        assert!(matches!(
            kloosterman(&MultiplierSystem::trivial(3), 1, 1, 8, &p),
            Err(RademacherError::LevelMismatch { .. })
        ));
    }

    #[test]
    fn fast_and_precise_kloosterman_agree() {
        let p = PrecisionPolicy::default();
        for mult in [
            MultiplierSystem::trivial(1),
            MultiplierSystem::new(2, 1, 8).unwrap(),
            MultiplierSystem::new(8, 3, 16).unwrap(),
        ] {
            let c = 4 * mult.level as i64 * 7;
            let fast = kloosterman_f64(&mult, -7, &[0, 1, 5], c).unwrap();
            for (j, n) in [0, 1, 5].into_iter().enumerate() {
                let k = kloosterman(&mult, -7, n, c, &p).unwrap();
                assert!((bigfloat_to_f64(&k.re) - fast[j].0).abs() < 1e-10);
                assert!((bigfloat_to_f64(&k.im) - fast[j].1).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn kronecker_table_matches_symbol() {
        for c in (4..=1200).step_by(4) {
            let t = KroneckerTable::new(c);
            for d in (1..c).step_by(2) {
                assert_eq!(t.get(d) as i64, crate::arith::kronecker(c, d), "c={c} d={d}");
            }
        }
    }

    #[test]
    fn batch_inverse_is_inverse() {
        let ds = [1, 3, 5, 7, 11, 13];
        for (d, x) in ds.iter().zip(batch_inverse(&ds, 16)) {
            assert_eq!(d * x % 16, 1);
        }
    }

    #[test]
    fn smooth_weight_shape() {
        assert_eq!(smooth_weight(0.1), 1.0);
        assert_eq!(smooth_weight(1.0), 0.0);
        assert!((smooth_weight(0.625) - 0.5).abs() < 1e-12);
        let mut prev = 1.0;
        for i in 0..100 {
            let w = smooth_weight(0.25 + 0.0075 * i as f64);
            assert!(w <= prev);
            prev = w;
        }
    }

    #[test]
    fn rejects_non_plus_exponents() {
        let spec = RademacherSpec::trivial(3, 1);
        assert!(matches!(
            rad_coefficient(&spec, 2, &EvalParams::default(), None),
            Err(RademacherError::NotPlusExponent(2))
        ));
    }

    #[test]
    fn genus_gate_warnings() {
        assert!(RademacherSpec::trivial(3, 2).validity_warnings().is_empty());
        assert!(RademacherSpec::trivial(3, 4).validity_warnings().is_empty());
        assert_eq!(RademacherSpec::trivial(3, 6).validity_warnings().len(), 1);
        assert!(RademacherSpec::trivial(3, 9).validity_warnings().is_empty());
    }
}
