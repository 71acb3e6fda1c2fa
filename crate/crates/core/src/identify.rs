//! Identification of McKay–Thompson series with sums of Rademacher sums
//! plus theta corrections.
//!
//! For a class `g` the ansatz is
//! `Σ_μ Z^{[−μ]}_{N^{(μ)},ψ^{(μ)}} + Σ_{m² | h_g·|g|} κ_m θ(m²τ)`
//! with `lcm N^{(μ)} = |g|`. The extended ansatz also allows one canceling
//! pair `Z^{[−m]}_{N₊} − Z^{[−m]}_{N₋}` whose polar terms cancel.
//! Rademacher sums are numeric, the McKay–Thompson series exact; the
//! residual between them must be a theta correction with rational
//! coefficients of denominator dividing `2h_g`, up to a numeric tolerance.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{bigfloat_to_f64, divisors, MpContext};
use crate::cache::TermCache;
use crate::groupdata::{normalize_label, CharacterTable, Group, GroupDataError};
use crate::moonshine::{mckay_thompson, DecompositionSet, MTSeries, MoonshineError, TargetSeriesSpec};
use crate::rademacher::{
    plus_exponents, rad_coefficients, CoefficientResult, EvalParams, MultiplierSystem,
    RademacherSpec,
};

#[derive(Debug, Error)]
pub enum IdentifyError {
    #[error(transparent)]
    GroupData(#[from] GroupDataError),
    #[error(transparent)]
    Moonshine(#[from] MoonshineError),
    #[error("identification fixture: {0}")]
    Fixture(String),
}

/// `Z^{[−m]}_{N₊} − Z^{[−m]}_{N₋}` with trivial multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CancelingPair {
    pub m: i64,
    #[serde(rename = "N_plus")]
    pub n_plus: u64,
    #[serde(rename = "N_minus")]
    pub n_minus: u64,
}

impl CancelingPair {
    pub fn specs(&self) -> [RademacherSpec; 2] {
        [
            RademacherSpec::trivial(self.m, self.n_plus),
            RademacherSpec::trivial(self.m, self.n_minus),
        ]
    }
}

/// Levels and multipliers for every polar order, plus canceling pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnsatzChoice {
    /// One sum per polar order of the target, in the target's order.
    pub polar: Vec<RademacherSpec>,
    pub pairs: Vec<CancelingPair>,
}

impl AnsatzChoice {
    /// `h_g`: lcm of the multipliers' `h` (1 for trivial multipliers).
    pub fn h_g(&self) -> u64 {
        self.polar
            .iter()
            .map(|s| if s.mult.is_trivial() { 1 } else { s.mult.h })
            .fold(1, |a, b| a.lcm(&b))
    }

    pub fn nontrivial_multipliers(&self) -> usize {
        self.polar.iter().filter(|s| !s.mult.is_trivial()).count()
    }

    /// Every Rademacher sum the choice needs.
    pub fn specs(&self) -> Vec<RademacherSpec> {
        let mut out = self.polar.clone();
        for p in &self.pairs {
            out.extend(p.specs());
        }
        out
    }

    fn sort_key(&self) -> (usize, usize, u64, Vec<u64>, Vec<(u64, i64)>) {
        (
            self.pairs.len(),
            self.nontrivial_multipliers(),
            self.polar.iter().map(|s| s.level()).sum(),
            self.polar.iter().map(|s| s.level()).collect(),
            self.polar.iter().map(|s| (s.mult.h, s.mult.v)).collect(),
        )
    }

    pub fn render(&self) -> String {
        let mut parts: Vec<String> = self.polar.iter().map(|s| s.to_string()).collect();
        for p in &self.pairs {
            parts.push(format!("(Z^[-{}]_{} - Z^[-{}]_{})", p.m, p.n_plus, p.m, p.n_minus));
        }
        parts.join(" + ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentifyOptions {
    /// Allowed multiplier denominators `h`.
    pub h_set: Vec<u64>,
    /// Only use multipliers with `h | 4N` at level `N`. Every multiplier in
    /// the published identifications satisfies this; without it, extra
    /// fits appear at the tabulated depth (see `relaxed_multipliers`).
    pub h_divides_4n: bool,
    /// Also try canceling pairs.
    pub extended: bool,
    /// Polar orders for canceling pairs; default: the plus-space orders
    /// between 4 and the largest polar order that are not polar orders
    /// of the target.
    pub pair_orders: Option<Vec<i64>>,
    /// Largest absolute residual accepted after theta corrections.
    pub residual_tolerance: f64,
}

impl IdentifyOptions {
    pub const DEFAULT_RESIDUAL_TOLERANCE: f64 = 0.4;

    pub fn restricted() -> Self {
        Self {
            h_set: vec![1, 2, 4, 8, 16],
            h_divides_4n: true,
            extended: false,
            pair_orders: None,
            residual_tolerance: Self::DEFAULT_RESIDUAL_TOLERANCE,
        }
    }

    pub fn extended() -> Self {
        Self {
            extended: true,
            ..Self::restricted()
        }
    }

    /// Drops the `h | 4N` rule, trying every `h` in `h_set` at every level.
    pub fn relaxed_multipliers(self) -> Self {
        Self {
            h_divides_4n: false,
            ..self
        }
    }

    fn pair_orders(&self, spec: &TargetSeriesSpec) -> Vec<i64> {
        self.pair_orders.clone().unwrap_or_else(|| {
            (4..=spec.max_polar_order())
                .filter(|m| matches!(m % 4, 0 | 3) && !spec.polar_orders.contains(m))
                .collect()
        })
    }
}

impl Default for IdentifyOptions {
    fn default() -> Self {
        Self::restricted()
    }
}

/// Distinct multiplier systems at `level` with `h` in `h_set` and
/// `v̂ ≡ ±1 (mod ĥ)`, in canonical form, trivial first.
pub fn multipliers(level: u64, h_set: &[u64]) -> Vec<MultiplierSystem> {
    let mut out: Vec<MultiplierSystem> = Vec::new();
    for &h in h_set {
        for v in 0..h as i64 {
            let Ok(m) = MultiplierSystem::new(level, v, h) else {
                continue;
            };
            if !m.satisfies_hat_constraint() {
                continue;
            }
            let c = m.canonical();
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out.sort_by_key(|m| (!m.is_trivial(), m.h, m.v));
    out
}

/// All ansatz choices for a class of order `class_order`, in the order in
/// which they are tried: no pairs before pairs, then fewer nontrivial
/// multipliers, then smaller levels.
pub fn enumerate_ansatz(
    class_order: u64,
    spec: &TargetSeriesSpec,
    opts: &IdentifyOptions,
) -> Vec<AnsatzChoice> {
    let levels = divisors(class_order);
    let options: Vec<(u64, MultiplierSystem)> = levels
        .iter()
        .flat_map(|&n| {
            let hs: Vec<u64> = opts
                .h_set
                .iter()
                .copied()
                .filter(|h| !opts.h_divides_4n || (4 * n) % h == 0)
                .collect();
            multipliers(n, &hs).into_iter().map(move |m| (n, m))
        })
        .collect();
    let mut polar_sets: Vec<Vec<RademacherSpec>> = vec![Vec::new()];
    for &mu in &spec.polar_orders {
        polar_sets = polar_sets
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |&(_, mult)| {
                    let mut p = prefix.clone();
                    p.push(RademacherSpec { m: mu, mult });
                    p
                })
            })
            .collect();
    }
    polar_sets.retain(|p| p.iter().fold(1, |a, s| a.lcm(&s.level())) == class_order);
    let mut choices: Vec<AnsatzChoice> = polar_sets
        .iter()
        .map(|p| AnsatzChoice {
            polar: p.clone(),
            pairs: Vec::new(),
        })
        .collect();
    if opts.extended {
        let mut pairs = Vec::new();
        for m in opts.pair_orders(spec) {
            for &a in &levels {
                for &b in &levels {
                    if a != b {
                        pairs.push(CancelingPair {
                            m,
                            n_plus: a,
                            n_minus: b,
                        });
                    }
                }
            }
        }
        for p in &polar_sets {
            for pair in &pairs {
                choices.push(AnsatzChoice {
                    polar: p.clone(),
                    pairs: vec![*pair],
                });
            }
        }
    }
    choices.sort_by_cached_key(|c| {
        let pair_key: Vec<CancelingPair> = c.pairs.clone();
        (c.sort_key(), pair_key)
    });
    choices
}

/// Theta corrections that were fitted and the residual left after them.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaFit {
    /// `(m, κ_m)` with `κ_m ≠ 0`, ascending in `m`.
    pub kappas: Vec<(i64, BigRational)>,
    /// Residual after subtracting `Σ κ_m θ(m²τ)`.
    pub residuals: BTreeMap<i64, f64>,
}

impl ThetaFit {
    pub fn max_residual(&self) -> (i64, f64) {
        self.residuals
            .iter()
            .map(|(&n, &r)| (n, r.abs()))
            .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("no theta correction fits: residual {value} at q^{n}")]
pub struct NoSolution {
    pub n: i64,
    pub value: f64,
    /// The best attempt, for diagnostics.
    pub fit: ThetaFit,
}

/// `m ≥ 1` with `m² | h_g·|g|`.
pub fn allowed_theta_orders(h_g: u64, class_order: u64) -> Vec<i64> {
    let bound = h_g * class_order;
    (1..)
        .take_while(|m: &u64| m * m <= bound)
        .filter(|m| bound.is_multiple_of(m * m))
        .map(|m| m as i64)
        .collect()
}

/// Coefficient of `q^n` in `θ(m²τ)`.
fn theta_coeff(m: i64, n: i64) -> i64 {
    if n == 0 {
        return 1;
    }
    let m2 = m * m;
    if n % m2 != 0 {
        return 0;
    }
    let k = n / m2;
    let r = (k as f64).sqrt().round() as i64;
    if r * r == k {
        2
    } else {
        0
    }
}

/// Nearest rational with denominator dividing `max_den`, smallest
/// denominator first, within `tol` of `x`.
fn round_rational(x: f64, max_den: u64, tol: f64) -> Option<BigRational> {
    for d in divisors(max_den) {
        let k = (x * d as f64).round();
        if (x - k / d as f64).abs() < tol {
            return Some(BigRational::new(
                BigInt::from(k as i64),
                BigInt::from(d),
            ));
        }
    }
    None
}

/// Fits `Σ κ_m θ(m²τ)` to a residual.
///
/// `κ_m` for `m² ≤ depth` is read off at `n = m²` (where `θ(m'²τ)`
/// contributes 2 for every `m' | m`). Allowed `m` beyond the depth are only
/// visible through the constant term; the leftover constant is assigned to
/// the smallest of them. Every remaining residual must be below `tol`.
pub fn solve_thetas(
    residual: &BTreeMap<i64, f64>,
    h_g: u64,
    class_order: u64,
    tol: f64,
) -> Result<ThetaFit, NoSolution> {
    let depth = residual.keys().copied().max().unwrap_or(0);
    let allowed = allowed_theta_orders(h_g, class_order);
    let max_den = 2 * h_g;
    let mut kappas: BTreeMap<i64, BigRational> = BTreeMap::new();
    let as_f64 = |k: &BigRational| k.to_f64().unwrap_or(f64::NAN);
    let fail = |n: i64, value: f64, kappas: &BTreeMap<i64, BigRational>| NoSolution {
        n,
        value,
        fit: ThetaFit {
            kappas: kappas.iter().map(|(m, k)| (*m, k.clone())).collect(),
            residuals: residual.clone(),
        },
    };
    for &m in allowed.iter().filter(|&&m| m * m <= depth) {
        let Some(&r) = residual.get(&(m * m)) else {
            continue;
        };
        let lower: f64 = kappas
            .iter()
            .filter(|(mp, _)| m % **mp == 0)
            .map(|(_, k)| as_f64(k))
            .sum();
        let x = r / 2.0 - lower;
        let k = round_rational(x, max_den, tol / 2.0).ok_or_else(|| fail(m * m, r, &kappas))?;
        kappas.insert(m, k);
    }
    if let (Some(&m0), Some(&r0)) = (
        allowed.iter().find(|&&m| m * m > depth),
        residual.get(&0),
    ) {
        let x = r0 - kappas.values().map(as_f64).sum::<f64>();
        let k = round_rational(x, max_den, tol / 2.0).ok_or_else(|| fail(0, r0, &kappas))?;
        kappas.insert(m0, k);
    }
    kappas.retain(|_, k| !k.is_zero());
    let residuals: BTreeMap<i64, f64> = residual
        .iter()
        .map(|(&n, &r)| {
            let theta: f64 = kappas
                .iter()
                .map(|(&m, k)| as_f64(k) * theta_coeff(m, n) as f64)
                .sum();
            (n, r - theta)
        })
        .collect();
    let fit = ThetaFit {
        kappas: kappas.into_iter().collect(),
        residuals,
    };
    let (n, worst) = fit.max_residual();
    if worst < tol {
        Ok(fit)
    } else {
        Err(NoSolution {
            n,
            value: fit.residuals[&n],
            fit,
        })
    }
}

type Evaluated = Result<Arc<Vec<CoefficientResult>>, String>;

/// Memoizing evaluator of Rademacher coefficients at a fixed set of
/// exponents. Each sum is computed once; concurrent requests for the same
/// sum wait for the first.
pub struct SumEvaluator {
    params: EvalParams,
    ns: Vec<i64>,
    cache: Option<TermCache>,
    memo: Mutex<HashMap<RademacherSpec, Arc<OnceLock<Evaluated>>>>,
}

impl SumEvaluator {
    pub fn new(params: EvalParams, depth: i64, cache: Option<TermCache>) -> Self {
        Self {
            params,
            ns: plus_exponents(depth),
            cache,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> &EvalParams {
        &self.params
    }

    pub fn exponents(&self) -> &[i64] {
        &self.ns
    }

    pub fn evaluate(&self, spec: &RademacherSpec) -> Evaluated {
        let key = spec.canonical();
        let cell = {
            let mut memo = self.memo.lock().expect("memo lock");
            memo.entry(key).or_default().clone()
        };
        cell.get_or_init(|| {
            rad_coefficients(&key, &self.ns, &self.params, self.cache.as_ref())
                .map(Arc::new)
                .map_err(|e| format!("{key}: {e}"))
        })
        .clone()
    }

    /// Number of distinct sums evaluated so far.
    pub fn evaluated(&self) -> usize {
        self.memo.lock().expect("memo lock").len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Identified,
    NoMatch,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarTermRecord {
    pub m: i64,
    #[serde(rename = "N")]
    pub level: u64,
    pub v: i64,
    pub h: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaRecord {
    pub m: i64,
    pub num: i64,
    pub den: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub n: i64,
    pub value: f64,
    pub error_estimate: f64,
}

/// Outcome of identifying one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentificationCertificate {
    pub group: Group,
    pub class: String,
    pub status: Status,
    pub polar_terms: Vec<PolarTermRecord>,
    pub pairs: Vec<CancelingPair>,
    pub kappas: Vec<KappaRecord>,
    pub residual_max: f64,
    pub residuals: Vec<ResidualRecord>,
    pub c_max: u64,
    pub precision_bits: usize,
    pub tolerance: f64,
    pub extended: bool,
    pub choices_tried: usize,
    pub warnings: Vec<String>,
}

impl IdentificationCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    /// `(m, κ_m)` as exact rationals.
    pub fn kappa_map(&self) -> BTreeMap<i64, BigRational> {
        self.kappas
            .iter()
            .map(|k| (k.m, BigRational::new(k.num.into(), k.den.into())))
            .collect()
    }
}

struct Attempt {
    fit: ThetaFit,
    errors: BTreeMap<i64, f64>,
    worst: f64,
}

/// Residual `MT(n) − Σ Z(n)` at every exponent, with summed error
/// estimates, or the evaluation failure.
fn residual_for(
    series: &MTSeries,
    choice: &AnsatzChoice,
    eval: &SumEvaluator,
    ctx: &MpContext,
) -> Result<(BTreeMap<i64, f64>, BTreeMap<i64, f64>), String> {
    let mut terms: Vec<(i64, Arc<Vec<CoefficientResult>>)> = Vec::new();
    for s in &choice.polar {
        terms.push((1, eval.evaluate(s)?));
    }
    for p in &choice.pairs {
        let [plus, minus] = p.specs();
        terms.push((1, eval.evaluate(&plus)?));
        terms.push((-1, eval.evaluate(&minus)?));
    }
    let mut residual = BTreeMap::new();
    let mut errors = BTreeMap::new();
    for (j, &n) in eval.exponents().iter().enumerate() {
        let exact = series
            .coeff(n)
            .ok_or_else(|| format!("series does not cover q^{n}"))?;
        let mut acc: BigFloat = ctx.from_bigint(&BigInt::from(exact));
        let mut err = 0.0;
        for (sign, results) in &terms {
            let r = &results[j];
            acc = if *sign > 0 {
                ctx.sub(&acc, &r.value)
            } else {
                ctx.add(&acc, &r.value)
            };
            err += r.error_estimate;
        }
        residual.insert(n, bigfloat_to_f64(&acc));
        errors.insert(n, err);
    }
    Ok((residual, errors))
}

/// Tries every ansatz choice in order and returns the first that fits.
///
/// A class is `NoMatch` only when every choice was evaluated and missed by
/// more than the tolerance plus twice the numeric error estimate; otherwise
/// it is `Inconclusive`.
pub fn identify_class(
    series: &MTSeries,
    spec: &TargetSeriesSpec,
    opts: &IdentifyOptions,
    eval: &SumEvaluator,
) -> IdentificationCertificate {
    let params = eval.params();
    let ctx = params.policy.context();
    let tol = opts.residual_tolerance;
    let choices = enumerate_ansatz(series.class_order, spec, opts);
    let mut best: Option<(AnsatzChoice, Attempt)> = None;
    let mut failures: Vec<String> = Vec::new();
    let mut near_miss = false;
    let mut tried = 0;
    for choice in &choices {
        tried += 1;
        let (residual, errors) = match residual_for(series, choice, eval, &ctx) {
            Ok(r) => r,
            Err(e) => {
                if !failures.contains(&e) {
                    failures.push(e);
                }
                continue;
            }
        };
        match solve_thetas(&residual, choice.h_g(), series.class_order, tol) {
            Ok(fit) => {
                let worst = fit.max_residual().1;
                let attempt = Attempt { fit, errors, worst };
                return certificate(series, opts, eval, choice, &attempt, Status::Identified, tried, vec![]);
            }
            Err(ns) => {
                let worst = ns.value.abs();
                let err = errors.values().copied().fold(0.0, f64::max);
                if worst < tol + 2.0 * err {
                    near_miss = true;
                }
                if best.as_ref().is_none_or(|(_, b)| worst < b.worst) {
                    best = Some((
                        choice.clone(),
                        Attempt {
                            fit: ns.fit,
                            errors,
                            worst,
                        },
                    ));
                }
            }
        }
    }
    let status = if failures.is_empty() && !near_miss {
        Status::NoMatch
    } else {
        Status::Inconclusive
    };
    let mut notes = failures;
    if near_miss {
        notes.push("a choice missed by less than the numeric error estimate".into());
    }
    match best {
        Some((choice, attempt)) => certificate(series, opts, eval, &choice, &attempt, status, tried, notes),
        None => IdentificationCertificate {
            group: series.group,
            class: series.class_label.clone(),
            status,
            polar_terms: vec![],
            pairs: vec![],
            kappas: vec![],
            residual_max: f64::INFINITY,
            residuals: vec![],
            c_max: params.c_max,
            precision_bits: params.policy.precision_bits,
            tolerance: tol,
            extended: opts.extended,
            choices_tried: tried,
            warnings: notes,
        },
    }
}

/// Fits theta corrections for one given ansatz choice, without searching.
/// The certificate is `Identified` when the residual fits, `NoMatch` when
/// it clearly does not, and `Inconclusive` otherwise.
pub fn evaluate_choice(
    series: &MTSeries,
    choice: &AnsatzChoice,
    opts: &IdentifyOptions,
    eval: &SumEvaluator,
) -> IdentificationCertificate {
    let ctx = eval.params().policy.context();
    let tol = opts.residual_tolerance;
    let (residual, errors) = match residual_for(series, choice, eval, &ctx) {
        Ok(r) => r,
        Err(e) => {
            let attempt = Attempt {
                fit: ThetaFit {
                    kappas: vec![],
                    residuals: BTreeMap::new(),
                },
                errors: BTreeMap::new(),
                worst: f64::INFINITY,
            };
            return certificate(series, opts, eval, choice, &attempt, Status::Inconclusive, 1, vec![e]);
        }
    };
    match solve_thetas(&residual, choice.h_g(), series.class_order, tol) {
        Ok(fit) => {
            let worst = fit.max_residual().1;
            let attempt = Attempt { fit, errors, worst };
            certificate(series, opts, eval, choice, &attempt, Status::Identified, 1, vec![])
        }
        Err(ns) => {
            let worst = ns.value.abs();
            let err = errors.values().copied().fold(0.0, f64::max);
            let status = if worst < tol + 2.0 * err {
                Status::Inconclusive
            } else {
                Status::NoMatch
            };
            let attempt = Attempt {
                fit: ns.fit,
                errors,
                worst,
            };
            certificate(series, opts, eval, choice, &attempt, status, 1, vec![])
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn certificate(
    series: &MTSeries,
    opts: &IdentifyOptions,
    eval: &SumEvaluator,
    choice: &AnsatzChoice,
    attempt: &Attempt,
    status: Status,
    tried: usize,
    mut warnings: Vec<String>,
) -> IdentificationCertificate {
    let params = eval.params();
    for s in choice.specs() {
        for w in s.validity_warnings() {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    IdentificationCertificate {
        group: series.group,
        class: series.class_label.clone(),
        status,
        polar_terms: choice
            .polar
            .iter()
            .map(|s| PolarTermRecord {
                m: s.m,
                level: s.level(),
                v: s.mult.v,
                h: s.mult.h,
            })
            .collect(),
        pairs: choice.pairs.clone(),
        kappas: attempt
            .fit
            .kappas
            .iter()
            .map(|(m, k)| KappaRecord {
                m: *m,
                num: k.numer().to_i64().unwrap_or(i64::MAX),
                den: k.denom().to_i64().unwrap_or(i64::MAX),
            })
            .collect(),
        residual_max: attempt.worst,
        residuals: attempt
            .fit
            .residuals
            .iter()
            .map(|(&n, &value)| ResidualRecord {
                n,
                value,
                error_estimate: attempt.errors.get(&n).copied().unwrap_or(0.0),
            })
            .collect(),
        c_max: params.c_max,
        precision_bits: params.policy.precision_bits,
        tolerance: opts.residual_tolerance,
        extended: opts.extended,
        choices_tried: tried,
        warnings,
    }
}

/// What the published list says about one class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpectedIdentification {
    pub group: Group,
    pub class: String,
    /// `identified`, `extended` or `no-match`.
    pub expect: String,
    pub polar_terms: Vec<PolarTermRecord>,
    pub kappas: BTreeMap<i64, (i64, i64)>,
    pub pairs: Vec<CancelingPair>,
    /// Whether the class also appears in the in-text summary lists.
    pub in_text_list: bool,
}

impl ExpectedIdentification {
    /// The published ansatz as a choice that can be evaluated directly.
    pub fn choice(&self) -> Result<AnsatzChoice, IdentifyError> {
        let polar = self
            .polar_terms
            .iter()
            .map(|p| {
                MultiplierSystem::new(p.level, p.v, p.h)
                    .and_then(|mult| RademacherSpec::new(p.m, mult))
                    .map_err(|e| IdentifyError::Fixture(format!("{} {}: {e}", self.group, self.class)))
            })
            .collect::<Result<_, _>>()?;
        Ok(AnsatzChoice {
            polar,
            pairs: self.pairs.clone(),
        })
    }
}

#[derive(Debug, Deserialize)]
struct ExpectedRow {
    group: String,
    class: String,
    expect: String,
    polar_terms: String,
    kappas: String,
    pairs: String,
    in_text_list: String,
}

fn parse_ints(s: &str, what: &str) -> Result<Vec<i64>, IdentifyError> {
    s.split(':')
        .map(|t| {
            t.parse()
                .map_err(|_| IdentifyError::Fixture(format!("bad {what} {s:?}")))
        })
        .collect()
}

/// Parses the identification fixture CSV
/// (`group,class,expect,polar_terms,kappas,pairs,in_text_list`).
pub fn parse_expected(text: &str) -> Result<Vec<ExpectedIdentification>, IdentifyError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in reader.deserialize() {
        let row: ExpectedRow = row.map_err(|e| IdentifyError::Fixture(e.to_string()))?;
        let mut polar_terms = Vec::new();
        for t in row.polar_terms.split_whitespace() {
            let v = parse_ints(t, "polar term")?;
            let (m, level, mv, h) = match v[..] {
                [m, n] => (m, n, 0, 1),
                [m, n, mv, h] => (m, n, mv, h),
                _ => return Err(IdentifyError::Fixture(format!("bad polar term {t:?}"))),
            };
            let mult = MultiplierSystem::new(level as u64, mv, h as u64)
                .map_err(|e| IdentifyError::Fixture(e.to_string()))?
                .canonical();
            polar_terms.push(PolarTermRecord {
                m,
                level: level as u64,
                v: mult.v,
                h: mult.h,
            });
        }
        let mut kappas = BTreeMap::new();
        for t in row.kappas.split_whitespace() {
            let (m, val) = t
                .split_once('=')
                .ok_or_else(|| IdentifyError::Fixture(format!("bad kappa {t:?}")))?;
            let (num, den) = val.split_once('/').unwrap_or((val, "1"));
            let parse = |x: &str| {
                x.parse::<i64>()
                    .map_err(|_| IdentifyError::Fixture(format!("bad kappa {t:?}")))
            };
            kappas.insert(parse(m)?, (parse(num)?, parse(den)?));
        }
        let mut pairs = Vec::new();
        for t in row.pairs.split_whitespace() {
            match parse_ints(t, "pair")?[..] {
                [m, a, b] => pairs.push(CancelingPair {
                    m,
                    n_plus: a as u64,
                    n_minus: b as u64,
                }),
                _ => return Err(IdentifyError::Fixture(format!("bad pair {t:?}"))),
            }
        }
        out.push(ExpectedIdentification {
            group: row.group.parse()?,
            class: normalize_label(&row.class),
            expect: row.expect,
            polar_terms,
            kappas,
            pairs,
            in_text_list: row.in_text_list == "yes",
        });
    }
    Ok(out)
}

/// Whether a certificate carries exactly the expected ansatz and κ.
pub fn matches_expected(cert: &IdentificationCertificate, exp: &ExpectedIdentification) -> bool {
    let kappas: BTreeMap<i64, BigRational> = exp
        .kappas
        .iter()
        .map(|(&m, &(n, d))| (m, BigRational::new(n.into(), d.into())))
        .collect();
    cert.status == Status::Identified
        && cert.polar_terms == exp.polar_terms
        && cert.pairs == exp.pairs
        && cert.kappa_map() == kappas
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassOutcome {
    pub class: String,
    pub order: u64,
    /// `identified`, `extended`, `no-match` or `unlisted`.
    pub expected: String,
    /// The search result matches the published one, or the search settled
    /// on a different choice and the published choice fits as well, with
    /// the published κ (the two are indistinguishable at this depth).
    pub agrees: bool,
    pub certificate: IdentificationCertificate,
    /// The published ansatz evaluated directly, when the search result
    /// differs from it.
    pub published: Option<IdentificationCertificate>,
}

/// Comparison of a full run with the published identifications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixAReport {
    pub group: Group,
    pub max_order: u64,
    pub identified_expected: usize,
    pub identified_matching: usize,
    pub no_match_expected: usize,
    pub no_match_confirmed: usize,
    pub extended_expected: usize,
    pub extended_matching: usize,
    /// Classes whose outcome differs from the published list.
    pub disagreements: Vec<String>,
    /// Published identifications missing from the in-text summary list.
    pub text_list_omissions: Vec<String>,
    pub outcomes: Vec<ClassOutcome>,
    pub sums_evaluated: usize,
}

impl AppendixAReport {
    pub fn all_agree(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Runs the identification for every class with `|g| ≤ max_order` (and,
/// if given, in `only`), and compares with the published list.
pub fn reproduce_appendix_a(
    data_dir: &Path,
    group: Group,
    max_order: u64,
    only: Option<&[String]>,
    opts: &IdentifyOptions,
    eval: &SumEvaluator,
) -> Result<AppendixAReport, IdentifyError> {
    let table = CharacterTable::load_group(data_dir, group)?;
    let decs = DecompositionSet::paper(group);
    let spec = TargetSeriesSpec::for_group(group);
    let text = std::fs::read_to_string(data_dir.join("appendix_a.csv"))
        .map_err(|e| IdentifyError::Fixture(e.to_string()))?;
    let expected: Vec<ExpectedIdentification> = parse_expected(&text)?
        .into_iter()
        .filter(|e| e.group == group)
        .collect();
    let depth = spec.fixture_depth();
    let classes: Vec<(String, u64)> = table
        .classes
        .iter()
        .filter(|c| c.order <= max_order)
        .filter(|c| only.is_none_or(|o| o.iter().any(|l| normalize_label(l) == c.label)))
        .map(|c| (c.label.clone(), c.order))
        .collect();
    let restricted = IdentifyOptions {
        extended: false,
        ..opts.clone()
    };
    let extended = IdentifyOptions {
        extended: true,
        ..opts.clone()
    };
    let runs: Vec<Vec<ClassOutcome>> = classes
        .par_iter()
        .map(|(label, order)| -> Result<Vec<ClassOutcome>, IdentifyError> {
            let series = mckay_thompson(&table, &decs, &spec, label, depth)?;
            let mine: Vec<&ExpectedIdentification> =
                expected.iter().filter(|e| &e.class == label).collect();
            let mut out = Vec::new();
            let cert = identify_class(&series, &spec, &restricted, eval);
            let plain = mine.iter().find(|e| e.expect != "extended");
            let outcome = match plain {
                Some(e) if e.expect == "identified" => {
                    compare(label, *order, "identified", cert, e, &series, &restricted, eval)?
                }
                Some(_) => ClassOutcome {
                    class: label.clone(),
                    order: *order,
                    expected: "no-match".into(),
                    agrees: cert.status == Status::NoMatch,
                    certificate: cert,
                    published: None,
                },
                None => ClassOutcome {
                    class: label.clone(),
                    order: *order,
                    expected: "unlisted".into(),
                    agrees: true,
                    certificate: cert,
                    published: None,
                },
            };
            out.push(outcome);
            if let Some(e) = mine.iter().find(|e| e.expect == "extended") {
                let cert = identify_class(&series, &spec, &extended, eval);
                out.push(compare(label, *order, "extended", cert, e, &series, &extended, eval)?);
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    let outcomes: Vec<ClassOutcome> = runs.into_iter().flatten().collect();
    let count = |kind: &str, agree: bool| {
        outcomes
            .iter()
            .filter(|o| o.expected == kind && (!agree || o.agrees))
            .count()
    };
    let disagreements = outcomes
        .iter()
        .filter(|o| !o.agrees)
        .map(|o| {
            let mut line = format!(
                "{} ({}): got {:?} with {}",
                o.class,
                o.expected,
                o.certificate.status,
                describe(&o.certificate)
            );
            if let Some(p) = &o.published {
                line.push_str(&format!(
                    "; published ansatz gives {:?} with {}",
                    p.status,
                    describe(p)
                ));
            }
            line
        })
        .collect();
    let text_list_omissions = expected
        .iter()
        .filter(|e| e.expect == "identified" && !e.in_text_list)
        .map(|e| e.class.clone())
        .collect();
    Ok(AppendixAReport {
        group,
        max_order,
        identified_expected: count("identified", false),
        identified_matching: count("identified", true),
        no_match_expected: count("no-match", false),
        no_match_confirmed: count("no-match", true),
        extended_expected: count("extended", false),
        extended_matching: count("extended", true),
        disagreements,
        text_list_omissions,
        outcomes,
        sums_evaluated: eval.evaluated(),
    })
}

/// Outcome for a class with a published identification; evaluates the
/// published choice directly when the search settled elsewhere.
#[allow(clippy::too_many_arguments)]
fn compare(
    label: &str,
    order: u64,
    kind: &str,
    cert: IdentificationCertificate,
    exp: &ExpectedIdentification,
    series: &MTSeries,
    opts: &IdentifyOptions,
    eval: &SumEvaluator,
) -> Result<ClassOutcome, IdentifyError> {
    let (agrees, published) = if matches_expected(&cert, exp) {
        (true, None)
    } else {
        let published = evaluate_choice(series, &exp.choice()?, opts, eval);
        (
            cert.status == Status::Identified && matches_expected(&published, exp),
            Some(published),
        )
    };
    Ok(ClassOutcome {
        class: label.to_string(),
        order,
        expected: kind.into(),
        agrees,
        certificate: cert,
        published,
    })
}

/// One-line rendering of a certificate's ansatz and κ.
pub fn describe(cert: &IdentificationCertificate) -> String {
    let mut parts: Vec<String> = cert
        .polar_terms
        .iter()
        .map(|p| {
            if p.h == 1 {
                format!("Z[-{}]_{}", p.m, p.level)
            } else {
                format!("Z[-{}]_{},({},{})", p.m, p.level, p.v, p.h)
            }
        })
        .collect();
    for p in &cert.pairs {
        parts.push(format!("Z[-{}]_{} - Z[-{}]_{}", p.m, p.n_plus, p.m, p.n_minus));
    }
    for k in &cert.kappas {
        let theta = if k.m == 1 {
            "θ(τ)".to_string()
        } else {
            format!("θ({}τ)", k.m * k.m)
        };
        let value = if k.den == 1 {
            k.num.to_string()
        } else {
            format!("{}/{}", k.num, k.den)
        };
        parts.push(format!("{value}·{theta}"));
    }
    format!("{} [residual {:.3e}]", parts.join(" + "), cert.residual_max)
}

/// Rounds a residual to the exact rational it is supposed to represent,
/// for synthetic tests: `Σ κ_m θ(m²τ)` evaluated at `n`.
pub fn theta_combination(kappas: &[(i64, BigRational)], n: i64) -> BigRational {
    kappas
        .iter()
        .map(|(m, k)| k * BigInt::from(theta_coeff(*m, n)))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// The absolute value of the largest residual in a certificate.
pub fn residual_abs_max(cert: &IdentificationCertificate) -> f64 {
    cert.residuals
        .iter()
        .map(|r| r.value.abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(pairs: &[(i64, f64)]) -> BTreeMap<i64, f64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn kappa_for_identity_class() {
        let r = residual(&[(0, -18.0), (1, -36.0), (4, -36.0), (5, 0.0), (8, 0.0)]);
        let fit = solve_thetas(&r, 1, 1, 0.4).unwrap();
        assert_eq!(fit.kappas, vec![(1, BigRational::from_integer((-18).into()))]);
    }

    #[test]
    fn kappa_pair_with_hidden_order() {
        // 4G-style residual: κ₁ = 2, κ₂ = −8, h_g = 8 so m = 4 is allowed
        // but invisible below q^16
        let r = residual(&[(0, -6.0), (1, 4.0), (4, -12.0), (5, 0.0), (8, 0.0)]);
        let fit = solve_thetas(&r, 8, 4, 0.4).unwrap();
        assert_eq!(
            fit.kappas,
            vec![
                (1, BigRational::from_integer(2.into())),
                (2, BigRational::from_integer((-8).into()))
            ]
        );
        assert!(solve_thetas(&residual(&[(0, 0.0), (1, 0.0), (5, 3.0)]), 1, 1, 0.4).is_err());
        assert!(solve_thetas(&residual(&[(0, 0.0), (1, 0.0)]), 1, 1, 0.4)
            .unwrap()
            .kappas
            .is_empty());
    }

    #[test]
    fn half_integer_kappa() {
        let r = residual(&[(0, 4.5), (1, 9.0), (4, 9.0), (5, 0.01), (8, -0.02)]);
        let fit = solve_thetas(&r, 1, 3, 0.4).unwrap();
        assert_eq!(fit.kappas, vec![(1, BigRational::new(9.into(), 2.into()))]);
    }

    #[test]
    fn enumeration_small_orders() {
        let b = TargetSeriesSpec::baby_monster();
        let one = enumerate_ansatz(1, &b, &IdentifyOptions::restricted());
        // h ∈ {2, 4} collapse to the trivial system and 8, 16 ∤ 4
        assert_eq!(one.len(), 1);
        assert!(one[0].polar.iter().all(|s| s.level() == 1 && s.mult.is_trivial()));
        let relaxed = IdentifyOptions::restricted().relaxed_multipliers();
        // trivial plus the (1,8), (1,16), (3,16) systems at level 1
        assert_eq!(enumerate_ansatz(1, &b, &relaxed).len(), 16);
        let four = enumerate_ansatz(4, &b, &IdentifyOptions::restricted());
        assert!(four.iter().any(|c| c.polar[0].level() == 4
            && c.polar[1].level() == 2
            && c.polar[1].mult == MultiplierSystem::new(2, 1, 8).unwrap()));
        for c in &four {
            let l = c.polar.iter().fold(1u64, |a, s| a.lcm(&s.level()));
            assert_eq!(l, 4);
            assert!(c.polar.iter().all(|s| s.mult.satisfies_hat_constraint()));
        }
        let ext = enumerate_ansatz(2, &b, &IdentifyOptions::extended());
        assert!(ext.iter().any(|c| c.pairs == vec![CancelingPair { m: 4, n_plus: 1, n_minus: 2 }]));
        assert!(ext.first().unwrap().pairs.is_empty());
    }

    #[test]
    fn allowed_orders() {
        assert_eq!(allowed_theta_orders(8, 4), vec![1, 2, 4]);
        assert_eq!(allowed_theta_orders(1, 9), vec![1, 3]);
        assert_eq!(allowed_theta_orders(1, 6), vec![1]);
    }

    #[test]
    fn expected_fixture_parses() {
        let text = std::fs::read_to_string(crate::default_data_dir().join("appendix_a.csv")).unwrap();
        let rows = parse_expected(&text).unwrap();
        let g4 = rows.iter().find(|r| r.group == Group::BabyMonster && r.class == "4G").unwrap();
        assert_eq!(g4.polar_terms[1], PolarTermRecord { m: 3, level: 2, v: 1, h: 8 });
        assert_eq!(g4.kappas[&2], (-8, 1));
    }
}
