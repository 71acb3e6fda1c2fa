//! End-to-end acceptance run. Prints one `PASS`/`FAIL` line per criterion,
//! with details underneath.
//!
//! A failing criterion is reported, not hidden: the process exits 0 unless
//! `ACCEPTANCE_STRICT=1` is set, in which case any failure exits 1.
//! `ACCEPTANCE_ONLY=1,4` restricts the run to some criteria.
//!
//! Criterion 5 evaluates a few thousand Rademacher sums; term vectors are
//! cached under the cargo target's temporary directory, so only the first
//! run pays for them.

mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use mf_core::arith::{genus_gamma0, totient};
use mf_core::cache::TermCache;
use mf_core::groupdata::{load_fixtures, supertrace, CharacterTable, Group};
use mf_core::identify::{
    describe, identify_class, reproduce_appendix_a, AppendixAReport, IdentificationCertificate,
    IdentifyOptions, Status, SumEvaluator,
};
use mf_core::moonshine::{
    decomposition_search, int_coeff, mckay_thompson, target_series, verify_fixtures,
    DecompositionSet, SearchOptions, TargetSeriesSpec,
};
use mf_core::qseries::{delta_series, eisenstein_series};
use mf_core::rademacher::{
    distance_to, kloosterman_f64, rad_coefficients, EvalParams, MultiplierSystem, RademacherSpec,
};
use mf_core::zagier::{borcherds_lift_3c, seed_f3, seed_f3_rademacher};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<Vec<String>, Vec<String>>;

/// Collects detail lines and failures for one criterion.
#[derive(Default)]
struct Check {
    lines: Vec<String>,
    failed: bool,
}

impl Check {
    fn note(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn expect(&mut self, ok: bool, line: impl Into<String>) {
        let line = line.into();
        if ok {
            self.lines.push(format!("ok: {line}"));
        } else {
            self.failed = true;
            self.lines.push(format!("FAILED: {line}"));
        }
    }

    fn within(&mut self, elapsed: Duration, limit: Duration, what: &str) {
        self.expect(elapsed < limit, format!("{what} took {elapsed:.1?} (limit {limit:?})"));
    }

    fn finish(self) -> Outcome {
        if self.failed {
            Err(self.lines)
        } else {
            Ok(self.lines)
        }
    }
}

fn data_dir() -> PathBuf {
    mf_core::default_data_dir()
}

fn cache() -> TermCache {
    TermCache::new(PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-cache"))
}

fn minute() -> Duration {
    Duration::from_secs(60)
}

/// Exact Thompson anchor, including the numeric certification of the seed.
fn thompson_anchor() -> Outcome {
    let mut c = Check::default();
    let start = Instant::now();
    let f = target_series(&TargetSeriesSpec::thompson(), 8).map_err(|e| vec![e.to_string()])?;
    for (n, want) in [(0, 248), (4, 54000), (5, -171990), (8, 3414528)] {
        let got = int_coeff(&f, n);
        c.expect(got == Some(want), format!("2f_3 + 248θ at q^{n}: {got:?}, printed {want}"));
    }
    match seed_f3_rademacher(8, &EvalParams::default(), None) {
        Ok(numeric) => c.expect(
            numeric.series == seed_f3(8).series,
            "certified Rademacher seed equals the exact f_3 through q^8",
        ),
        Err(e) => c.expect(false, format!("seed certification: {e}")),
    }
    c.within(start.elapsed(), minute(), "anchor with seed certification");
    c.finish()
}

fn target_coefficients() -> Outcome {
    let mut c = Check::default();
    let cases: [(TargetSeriesSpec, &str, &[(i64, i128)]); 2] = [
        (
            TargetSeriesSpec::monster(),
            "𝓗",
            &[
                (1, -196884),
                (4, 18517256316),
                (5, -292711124971),
                (8, 312217411718400),
                (9, -2374124840259859),
            ],
        ),
        (
            TargetSeriesSpec::baby_monster(),
            "𝓖",
            &[(1, -4371), (4, 8315004), (5, -52842475), (8, 5736480000)],
        ),
    ];
    for (spec, name, coeffs) in cases {
        let series = target_series(&spec, 9).map_err(|e| vec![e.to_string()])?;
        for &(n, want) in coeffs {
            let got = int_coeff(&series, n);
            c.expect(got == Some(want), format!("{name} at q^{n}: {got:?}"));
        }
    }
    c.finish()
}

fn appendix_b() -> Outcome {
    let mut c = Check::default();
    let start = Instant::now();
    let fixtures =
        load_fixtures(&data_dir().join("appendix_b.csv")).map_err(|e| vec![e.to_string()])?;
    for group in [Group::BabyMonster, Group::Monster] {
        let table =
            CharacterTable::load_group(&data_dir(), group).map_err(|e| vec![e.to_string()])?;
        let report = verify_fixtures(
            &table,
            &DecompositionSet::paper(group),
            &TargetSeriesSpec::for_group(group),
            &fixtures,
        );
        c.expect(
            report.is_clean() && report.classes == table.classes.len(),
            format!(
                "{}: {} values over {} classes, {} mismatches",
                group.name(),
                report.checked,
                report.classes,
                report.mismatches.len()
            ),
        );
    }
    c.within(start.elapsed(), minute(), "both tables");
    c.finish()
}

fn is_square(n: i64) -> bool {
    let r = (n as f64).sqrt().round() as i64;
    r * r == n
}

fn rademacher_oracle() -> Outcome {
    let mut c = Check::default();

    // Z^[-3]_1 = f_3 + 4θ at 8000 terms of c
    let start = Instant::now();
    let f3 = seed_f3(24);
    let ns: Vec<i64> = (1..=24)
        .filter(|n| matches!(n % 4, 0 | 1) && !is_square(*n))
        .collect();
    let params = EvalParams::default().with_c_max(8000);
    let results = rad_coefficients(&RademacherSpec::trivial(3, 1), &ns, &params, Some(&cache()))
        .map_err(|e| vec![e.to_string()])?;
    let mut worst: f64 = 0.0;
    for r in &results {
        let exact = f3.coeff(r.n);
        c.expect(
            r.certified_integer.as_ref() == Some(&exact),
            format!(
                "Z^[-3]_1 at q^{}: certified {:?}, exact {exact}",
                r.n,
                r.certified_integer.as_ref().map(ToString::to_string)
            ),
        );
        worst = worst.max(r.rounding_distance);
    }
    c.expect(worst < 1e-4, format!("largest rounding distance {worst:.2e} (required < 1e-4)"));
    c.note(format!("f_3 check at c_max 8000 took {:.1?}", start.elapsed()));

    // Monster 1A = Z^[-15]_1 + Z^[-7]_1 + Z^[-3]_1 − 42θ at n = 8, 9,
    // compared at the working precision
    let exact =
        target_series(&TargetSeriesSpec::monster(), 9).map_err(|e| vec![e.to_string()])?;
    let kappa = -42;
    let mut errors: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for c_max in [1000, 2000] {
        let params = EvalParams::default().with_c_max(c_max);
        let ctx = params.policy.context();
        let mut sums = [ctx.zero(), ctx.zero()];
        for m in [15, 7, 3] {
            let r = rad_coefficients(&RademacherSpec::trivial(m, 1), &[8, 9], &params, Some(&cache()))
                .map_err(|e| vec![e.to_string()])?;
            for (s, v) in sums.iter_mut().zip(&r) {
                *s = ctx.add(s, &v.value);
            }
        }
        for (i, n) in [8i64, 9].into_iter().enumerate() {
            let want = int_coeff(&exact, n).unwrap();
            let theta = if is_square(n) { 2 * kappa } else { 0 };
            let abs = distance_to(&sums[i], &BigInt::from(want - theta as i128), &ctx);
            let rel = abs / (want as f64).abs();
            errors.entry(c_max).or_default().push(abs);
            c.expect(
                rel <= 1e-3,
                format!("Monster 1A at q^{n}, c_max {c_max}: |numeric − exact| = {abs:.2e}, relative {rel:.1e}"),
            );
        }
    }
    for (i, n) in [8, 9].into_iter().enumerate() {
        let (coarse, fine) = (errors[&1000][i], errors[&2000][i]);
        c.expect(
            fine < coarse,
            format!("Monster 1A at q^{n}: error {coarse:.2e} → {fine:.2e} as c_max doubles"),
        );
    }
    c.finish()
}

fn summarize(c: &mut Check, report: &AppendixAReport) {
    c.note(format!(
        "{}: identified {}/{} as published, no-match {}/{}, extended {}/{}",
        report.group.name(),
        report.identified_matching,
        report.identified_expected,
        report.no_match_confirmed,
        report.no_match_expected,
        report.extended_matching,
        report.extended_expected
    ));
    for d in &report.disagreements {
        c.note(format!("  disagreement: {d}"));
    }
    if !report.text_list_omissions.is_empty() {
        c.note(format!(
            "  published identifications missing from the summary list: {}",
            report.text_list_omissions.join(", ")
        ));
    }
}

fn certificate<'a>(
    report: &'a AppendixAReport,
    class: &str,
    expected: &str,
) -> Option<&'a IdentificationCertificate> {
    report
        .outcomes
        .iter()
        .find(|o| o.class == class && o.expected == expected)
        .map(|o| &o.certificate)
}

fn kappa(cert: &IdentificationCertificate, m: i64) -> Option<BigRational> {
    cert.kappa_map().get(&m).cloned()
}

fn int(k: i64) -> Option<BigRational> {
    Some(BigRational::from_integer(BigInt::from(k)))
}

fn appendix_a() -> Outcome {
    let mut c = Check::default();
    let opts = IdentifyOptions::restricted();
    let run = |group: Group, max_order: u64| {
        let depth = TargetSeriesSpec::for_group(group).fixture_depth();
        let eval = SumEvaluator::new(EvalParams::default(), depth, Some(cache()));
        reproduce_appendix_a(&data_dir(), group, max_order, None, &opts, &eval)
            .map_err(|e| vec![e.to_string()])
    };

    let start = Instant::now();
    for group in [Group::BabyMonster, Group::Monster] {
        let report = run(group, 6)?;
        c.note(format!(
            "reduced suite |g| ≤ 6, {}: {} classes, {} disagreements",
            group.name(),
            report.outcomes.len(),
            report.disagreements.len()
        ));
    }
    c.within(start.elapsed(), Duration::from_secs(30 * 60), "reduced suite (|g| ≤ 6, both groups)");

    let start = Instant::now();
    let b = run(Group::BabyMonster, 11)?;
    let m = run(Group::Monster, 11)?;
    c.note(format!("full suite |g| ≤ 11 took {:.1?}", start.elapsed()));
    for report in [&b, &m] {
        summarize(&mut c, report);
        c.expect(
            report.all_agree(),
            format!("{}: every class agrees with the published list", report.group.name()),
        );
    }

    match certificate(&b, "4G", "identified") {
        Some(cert) => c.expect(
            cert.status == Status::Identified
                && cert.polar_terms.iter().any(|p| (p.v, p.h) == (1, 8))
                && kappa(cert, 1) == int(2)
                && kappa(cert, 2) == int(-8),
            format!("B 4G: {}", describe(cert)),
        ),
        None => c.expect(false, "B 4G missing from the report"),
    }
    match certificate(&b, "2A", "extended") {
        Some(cert) => c.expect(
            cert.status == Status::Identified
                && cert.pairs.iter().any(|p| (p.m, p.n_plus, p.n_minus) == (4, 1, 2))
                && kappa(cert, 1) == int(-10),
            format!("B 2A extended: {}", describe(cert)),
        ),
        None => c.expect(false, "B 2A extended run missing from the report"),
    }
    for (report, class) in [(&b, "2A"), (&m, "3A")] {
        match certificate(report, class, "no-match") {
            Some(cert) => c.expect(
                cert.status == Status::NoMatch,
                format!(
                    "{} {class} restricted: {:?} after {} choices",
                    report.group.name(),
                    cert.status,
                    cert.choices_tried
                ),
            ),
            None => c.expect(false, format!("{} {class} missing from the report", report.group.name())),
        }
    }
    c.finish()
}

fn borcherds_lift() -> Outcome {
    let mut c = Check::default();
    let trunc = 50;
    // (q^{-1/3} P)^3 = E4³/Δ  ⇔  P³ · (Δ/q) = E4³
    let cube = borcherds_lift_3c(trunc).series.pow(3);
    let lhs = cube.mul(&delta_series(trunc + 1).shift(-1)).truncate(trunc);
    let rhs = eisenstein_series(4, trunc).pow(3);
    c.expect(lhs == rhs, format!("lift cube times Δ/q equals E4³ through q^{trunc}"));
    c.finish()
}

fn property_suites() -> Outcome {
    let mut c = Check::default();

    let (checked, worst) = common::theta::sample_errors();
    c.expect(
        worst < common::theta::TOLERANCE,
        format!("theta transformation over {checked} matrices: largest error {worst:.1e}"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0x6b6c);
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..1000 {
        let level = [1u64, 2, 3, 4, 7, 8][rng.gen_range(0..6)];
        let mult = if level.is_multiple_of(2) {
            MultiplierSystem::new(level, 1, 8).unwrap()
        } else {
            MultiplierSystem::trivial(level)
        };
        let four_n = 4 * level as i64;
        let cc = four_n * rng.gen_range(1..=4000 / four_n);
        let m = -rng.gen_range(1..=15i64);
        let n = rng.gen_range(0..=40i64);
        let (re, im) = kloosterman_f64(&mult, m, &[n], cc).map_err(|e| vec![e.to_string()])?[0];
        worst_ratio = worst_ratio.max(re.hypot(im) / totient(cc as u64) as f64);
    }
    c.expect(
        worst_ratio <= 1.0 + 1e-12,
        format!("Kloosterman bound over 1000 random inputs: max |K|/φ(c) = {worst_ratio:.4}"),
    );

    let text = std::fs::read_to_string(data_dir().join("genus_table.txt"))
        .map_err(|e| vec![e.to_string()])?;
    let rows: Vec<(u64, u64)> = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            Some((it.next()?.parse().ok()?, it.next()?.parse().ok()?))
        })
        .collect();
    let bad: Vec<u64> = rows.iter().filter(|(m, g)| genus_gamma0(*m) != *g).map(|r| r.0).collect();
    c.expect(
        rows.len() == 100 && bad.is_empty(),
        format!("genus of Γ₀(M), M ≤ 100: {} rows, disagreements at {bad:?}", rows.len()),
    );

    let table = CharacterTable::load_group(&data_dir(), Group::BabyMonster)
        .map_err(|e| vec![e.to_string()])?;
    let dims = table.dims();
    let mut found = 0;
    let mut round_trip = true;
    for (target, max_index) in [(-4371i128, 13usize), (8315004, 6), (-52842475, 8)] {
        let decs = decomposition_search(target, &dims, &SearchOptions::new(2, max_index))
            .map_err(|e| vec![e.to_string()])?;
        found += decs.len();
        round_trip &= !decs.is_empty()
            && decs.iter().all(|d| supertrace(&table, d, "1A").ok() == Some(target));
    }
    c.expect(round_trip, format!("decomposition search round trip: {found} decompositions re-evaluated"));

    let dir = tempfile::tempdir().map_err(|e| vec![e.to_string()])?;
    let spec = TargetSeriesSpec::baby_monster();
    let series = mckay_thompson(
        &table,
        &DecompositionSet::paper(Group::BabyMonster),
        &spec,
        "3B",
        spec.fixture_depth(),
    )
    .map_err(|e| vec![e.to_string()])?;
    let certify = || {
        let eval = SumEvaluator::new(
            EvalParams::default(),
            spec.fixture_depth(),
            Some(TermCache::new(dir.path())),
        );
        identify_class(&series, &spec, &IdentifyOptions::restricted(), &eval).to_json()
    };
    let (cold, warm) = (certify(), certify());
    c.expect(cold == warm, "B 3B certificate byte-identical on a cold and a warm cache");
    c.finish()
}

fn main() {
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("exact Thompson anchor", thompson_anchor),
        ("exact target series", target_coefficients),
        ("tabulated McKay–Thompson coefficients", appendix_b),
        ("Rademacher oracle equivalence", rademacher_oracle),
        ("published identifications", appendix_a),
        ("Borcherds lift identity", borcherds_lift),
        ("property suites", property_suites),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let k = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&k)) {
            continue;
        }
        let start = Instant::now();
        let (verdict, lines) = match run() {
            Ok(lines) => ("PASS", lines),
            Err(lines) => {
                failures += 1;
                ("FAIL", lines)
            }
        };
        println!("{verdict} criterion {k}: {name} ({:.1?})", start.elapsed());
        for line in lines {
            println!("    {line}");
        }
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        if strict {
            std::process::exit(1);
        }
    }
}
