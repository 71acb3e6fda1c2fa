//! The target series 𝓕, 𝓖, 𝓗, McKay–Thompson series built from graded
//! decompositions, the signed decomposition search, and verification
//! against the tabulated coefficients.
//!
//! Grades are keyed by their q-exponent: the Monster decomposition covers
//! `n = 1, 4, 5, 8, 9`, the Baby monster one `n = 1, 4, 5, 8`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::groupdata::{
    supertrace, CharacterTable, Decomposition, FixtureRow, Group, GroupDataError,
};
use crate::qseries::{combine, QSeries};
use crate::zagier::{basis_up_to, ZagierError};

#[derive(Debug, Error)]
pub enum MoonshineError {
    #[error("grade {n} is not covered by the decompositions (highest grade {max})")]
    GradeNotCovered { n: i64, max: i64 },
    #[error("search would visit {needed} nodes, above the limit {limit}")]
    SearchSpaceExceeded { needed: u64, limit: u64 },
    #[error("dimensions must be sorted ascending")]
    UnsortedDims,
    #[error("decomposition set belongs to {found}, table to {expected}")]
    GroupMismatch { expected: Group, found: Group },
    #[error(transparent)]
    GroupData(#[from] GroupDataError),
    #[error(transparent)]
    Zagier(#[from] ZagierError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TargetKind {
    Monster,
    BabyMonster,
    Thompson,
}

/// `Σ_{μ} mult·f_μ + constant·θ`, a plus-space form with constant term
/// `constant` (every `f_μ` with `μ > 0` has constant term 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TargetSeriesSpec {
    pub kind: TargetKind,
    /// Polar orders, largest first.
    pub polar_orders: Vec<i64>,
    /// Common coefficient of the polar terms (2 for 𝓕, else 1).
    pub polar_mult: i64,
    pub constant_term: i64,
}

impl TargetSeriesSpec {
    /// 𝓗 = f₁₅ + f₇ + f₃ − 2θ.
    pub fn monster() -> Self {
        Self {
            kind: TargetKind::Monster,
            polar_orders: vec![15, 7, 3],
            polar_mult: 1,
            constant_term: -2,
        }
    }

    /// 𝓖 = f₇ + f₃ − 2θ.
    pub fn baby_monster() -> Self {
        Self {
            kind: TargetKind::BabyMonster,
            polar_orders: vec![7, 3],
            polar_mult: 1,
            constant_term: -2,
        }
    }

    /// 𝓕 = 2f₃ + 248θ.
    pub fn thompson() -> Self {
        Self {
            kind: TargetKind::Thompson,
            polar_orders: vec![3],
            polar_mult: 2,
            constant_term: 248,
        }
    }

    pub fn for_group(group: Group) -> Self {
        match group {
            Group::Monster => Self::monster(),
            Group::BabyMonster => Self::baby_monster(),
        }
    }

    pub fn max_polar_order(&self) -> i64 {
        self.polar_orders.iter().copied().max().unwrap_or(0)
    }

    /// Highest tabulated grade: 9 for 𝓗, 8 otherwise.
    pub fn fixture_depth(&self) -> i64 {
        match self.kind {
            TargetKind::Monster => 9,
            _ => 8,
        }
    }
}

/// The exact target series up to `trunc`.
pub fn target_series(spec: &TargetSeriesSpec, trunc: i64) -> Result<QSeries, MoonshineError> {
    let basis = basis_up_to(spec.max_polar_order(), trunc)?;
    let get = |d: i64| {
        &basis
            .iter()
            .find(|e| e.d == d)
            .expect("every polar order is a basis index")
            .series
    };
    let mult = BigRational::from_integer(BigInt::from(spec.polar_mult));
    let mut terms: Vec<(BigRational, &QSeries)> = spec
        .polar_orders
        .iter()
        .map(|&m| (mult.clone(), get(m)))
        .collect();
    terms.push((BigRational::from_integer(BigInt::from(spec.constant_term)), get(0)));
    Ok(combine(&terms))
}

/// The published graded decompositions, keyed by q-exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionSet {
    pub group: Group,
    pub grades: BTreeMap<i64, Decomposition>,
}

const DEC_MONSTER: &[(i64, &str)] = &[
    (1, "V2- V1-"),
    (4, "V6+ V4- V2- 2V1-"),
    (5, "V4+ V1+ V7-"),
    (8, "V11+ V10+ V7+ V2+ V8- V1-"),
    (9, "V15- V2-"),
];

const DEC_BABY: &[(i64, &str)] = &[
    (1, "U2-"),
    (4, "U6+ U4- U3- 2U1-"),
    (5, "U3+ U5+ U4+ 2U1+ U7- U2-"),
    (8, "U13+ U11+ U6+ U2+ U10- U9- 2U1-"),
];

impl DecompositionSet {
    /// The shipped decompositions for `group`.
    pub fn paper(group: Group) -> Self {
        let table = match group {
            Group::Monster => DEC_MONSTER,
            Group::BabyMonster => DEC_BABY,
        };
        let grades = table
            .iter()
            .map(|&(n, s)| (n, s.parse().expect("shipped decompositions parse")))
            .collect();
        Self { group, grades }
    }

    pub fn max_grade(&self) -> i64 {
        self.grades.keys().copied().max().unwrap_or(0)
    }
}

/// A McKay–Thompson series: polar part and constant from the target, and
/// supertraces at the covered grades.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MTSeries {
    pub group: Group,
    pub class_label: String,
    pub class_order: u64,
    /// `(exponent, coefficient)` of the principal part.
    pub polar: Vec<(i64, i64)>,
    pub constant: i64,
    /// Coefficients at `n > 0`, `n ≡ 0, 1 (mod 4)`, up to `trunc`.
    pub coeffs: BTreeMap<i64, i128>,
    pub trunc: i64,
}

impl MTSeries {
    /// Coefficient of `q^n`, including the polar part and constant.
    pub fn coeff(&self, n: i64) -> Option<i128> {
        if n > self.trunc {
            return None;
        }
        if n == 0 {
            return Some(self.constant as i128);
        }
        if n < 0 {
            return Some(
                self.polar
                    .iter()
                    .find(|p| p.0 == n)
                    .map_or(0, |p| p.1 as i128),
            );
        }
        Some(self.coeffs.get(&n).copied().unwrap_or(0))
    }

    pub fn to_qseries(&self) -> QSeries {
        let rat = |x: i128| BigRational::from_integer(BigInt::from(x));
        let terms = self
            .polar
            .iter()
            .map(|&(e, c)| (e, rat(c as i128)))
            .chain(std::iter::once((0, rat(self.constant as i128))))
            .chain(self.coeffs.iter().map(|(&n, &c)| (n, rat(c))));
        QSeries::from_terms(self.trunc, terms)
    }
}

/// Twists the target series by the class `class_label`.
pub fn mckay_thompson(
    table: &CharacterTable,
    decs: &DecompositionSet,
    spec: &TargetSeriesSpec,
    class_label: &str,
    trunc: i64,
) -> Result<MTSeries, MoonshineError> {
    if decs.group != table.group {
        return Err(MoonshineError::GroupMismatch {
            expected: table.group,
            found: decs.group,
        });
    }
    let class = table.class(class_label)?.clone();
    let max = decs.max_grade();
    if trunc > max {
        return Err(MoonshineError::GradeNotCovered { n: trunc, max });
    }
    let mut coeffs = BTreeMap::new();
    for n in (1..=trunc).filter(|n| matches!(n % 4, 0 | 1)) {
        let dec = decs
            .grades
            .get(&n)
            .ok_or(MoonshineError::GradeNotCovered { n, max })?;
        coeffs.insert(n, supertrace(table, dec, &class.label)?);
    }
    Ok(MTSeries {
        group: table.group,
        class_label: class.label,
        class_order: class.order,
        polar: spec
            .polar_orders
            .iter()
            .map(|&m| (-m, spec.polar_mult))
            .collect(),
        constant: spec.constant_term,
        coeffs,
        trunc,
    })
}

/// Bounds for [`decomposition_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchOptions {
    /// Largest |multiplicity| per irreducible.
    pub max_mult: u32,
    /// Only irreducibles `1..=max_index` take part.
    pub max_index: usize,
    /// Upper bound on enumerated half-sums.
    pub node_limit: u64,
}

impl SearchOptions {
    pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;

    pub fn new(max_mult: u32, max_index: usize) -> Self {
        Self {
            max_mult,
            max_index,
            node_limit: Self::DEFAULT_NODE_LIMIT,
        }
    }
}

/// All signed decompositions `Σ ±mult·dim_i = target` within the bounds,
/// by meet-in-the-middle over the multiplicity lattice. Results are sorted
/// by total multiplicity, then largest index, then lexicographically.
pub fn decomposition_search(
    target: i128,
    dims: &[i64],
    opts: &SearchOptions,
) -> Result<Vec<Decomposition>, MoonshineError> {
    if dims.windows(2).any(|w| w[0] > w[1]) {
        return Err(MoonshineError::UnsortedDims);
    }
    let k = opts.max_index.min(dims.len());
    let radix = 2 * opts.max_mult as u64 + 1;
    let (lo_len, hi_len) = (k / 2, k - k / 2);
    let size = |len: usize| radix.checked_pow(len as u32).unwrap_or(u64::MAX);
    let needed = size(lo_len).saturating_add(size(hi_len));
    if needed > opts.node_limit {
        return Err(MoonshineError::SearchSpaceExceeded {
            needed,
            limit: opts.node_limit,
        });
    }
    let max = opts.max_mult as i64;
    // all multiplicity vectors of `len` irreducibles starting at `offset`
    let half = |offset: usize, len: usize| -> Vec<(i128, Vec<i64>)> {
        let mut out = vec![(0i128, Vec::with_capacity(len))];
        for i in 0..len {
            let d = dims[offset + i] as i128;
            out = out
                .into_iter()
                .flat_map(|(s, v)| {
                    (-max..=max).map(move |m| {
                        let mut v = v.clone();
                        v.push(m);
                        (s + m as i128 * d, v)
                    })
                })
                .collect();
        }
        out
    };
    let low = half(0, lo_len);
    let high = half(lo_len, hi_len);
    let mut index: HashMap<i128, Vec<usize>> = HashMap::new();
    for (i, (s, _)) in low.iter().enumerate() {
        index.entry(*s).or_default().push(i);
    }
    let mut found: Vec<Vec<i64>> = high
        .par_iter()
        .flat_map_iter(|(s, hv)| {
            index
                .get(&(target - s))
                .into_iter()
                .flatten()
                .map(|&i| {
                    let mut v = low[i].1.clone();
                    v.extend_from_slice(hv);
                    v
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let key = |v: &Vec<i64>| {
        let total: i64 = v.iter().map(|m| m.abs()).sum();
        let top = v.iter().rposition(|&m| m != 0).map_or(0, |i| i + 1);
        // lexicographic from the largest index down
        let lex: Vec<i64> = v.iter().rev().map(|&m| -m).collect();
        (total, top, lex)
    };
    found.sort_by_cached_key(key);
    Ok(found
        .into_iter()
        .map(|v| {
            let pairs: Vec<(usize, i64)> = v.iter().enumerate().map(|(i, &m)| (i + 1, m)).collect();
            Decomposition::from_signed(&pairs)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub class: String,
    pub n: i64,
    pub expected: String,
    pub got: String,
}

/// Outcome of comparing McKay–Thompson series with tabulated coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixtureReport {
    pub group: Group,
    pub checked: usize,
    pub classes: usize,
    pub mismatches: Vec<Mismatch>,
    /// Fixture rows that could not be compared (unknown class or grade).
    pub uncovered: Vec<Mismatch>,
}

impl FixtureReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty() && self.uncovered.is_empty()
    }
}

/// Compares every fixture row of the table's group with the supertrace.
pub fn verify_fixtures(
    table: &CharacterTable,
    decs: &DecompositionSet,
    spec: &TargetSeriesSpec,
    fixtures: &[FixtureRow],
) -> FixtureReport {
    let rows: Vec<&FixtureRow> = fixtures.iter().filter(|r| r.group == table.group).collect();
    let outcomes: Vec<(Option<Mismatch>, Option<Mismatch>)> = rows
        .par_iter()
        .map(|r| {
            let record = |got: String| Mismatch {
                class: r.class.clone(),
                n: r.n,
                expected: r.coefficient.to_string(),
                got,
            };
            match mckay_thompson(table, decs, spec, &r.class, r.n).map(|s| s.coeff(r.n)) {
                Ok(Some(c)) if c == r.coefficient => (None, None),
                Ok(Some(c)) => (Some(record(c.to_string())), None),
                Ok(None) => (None, Some(record("uncovered".into()))),
                Err(e) => (None, Some(record(e.to_string()))),
            }
        })
        .collect();
    let mut classes: Vec<&str> = rows.iter().map(|r| r.class.as_str()).collect();
    classes.sort_unstable();
    classes.dedup();
    let (mismatches, uncovered): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    FixtureReport {
        group: table.group,
        checked: rows.len(),
        classes: classes.len(),
        mismatches: mismatches.into_iter().flatten().collect(),
        uncovered: uncovered.into_iter().flatten().collect(),
    }
}

/// Exact integer coefficient of an integral target series.
pub fn int_coeff(series: &QSeries, n: i64) -> Option<i128> {
    let c = series.coeff(n)?;
    if !c.denom().is_one() {
        return None;
    }
    c.numer().to_i128()
}

/// Whether all of `series`' coefficients up to its truncation are zero.
pub fn vanishes(series: &QSeries) -> bool {
    series.terms().all(|(_, c)| c.is_zero())
}
