//! The `mf` command-line front end.
//!
//! Every subcommand prints a JSON report by default (`--format text` for a
//! human rendering, `--format csv` for coefficient lists). Global flags can
//! be set through `MF_*` environment variables; flags win.
//!
//! Exit codes: 0 success, 1 computational failure (uncertified rounding,
//! missing identification, fixture mismatch), 2 usage or data errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::PrecisionPolicy;
use crate::cache::TermCache;
use crate::groupdata::{load_fixtures, CharacterTable, Group, GroupDataError};
use crate::identify::{
    describe, identify_class, reproduce_appendix_a, IdentifyOptions, Status, SumEvaluator,
};
use crate::moonshine::{
    decomposition_search, mckay_thompson, target_series, verify_fixtures,
    DecompositionSet, MoonshineError, SearchOptions, TargetSeriesSpec,
};
use crate::qseries::QSeries;
use crate::rademacher::{
    rad_coefficients, rad_series, EvalParams, MultiplierSystem, RademacherError, RademacherSpec,
    Summation,
};
use crate::zagier::{
    basis_cached, borcherds_lift_3c, q_times_j, seed_f3, seed_f3_rademacher, ZagierError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SummationArg {
    Smooth,
    Sharp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    /// 𝓗 = f15 + f7 + f3 − 2θ
    M,
    /// 𝓖 = f7 + f3 − 2θ
    B,
    /// 𝓕 = 2f3 + 248θ
    Th,
}

#[derive(Debug, Parser)]
#[command(name = "mf", version, about = "Weight 1/2 moonshine for the Monster and the Baby monster")]
pub struct Cli {
    /// Directory with character tables and fixtures.
    #[arg(long, global = true, env = "MF_DATA_DIR")]
    pub data_dir: Option<PathBuf>,
    /// Directory for cached Rademacher terms and basis series.
    #[arg(long, global = true, env = "MF_CACHE_DIR", default_value = "mf-cache")]
    pub cache_dir: PathBuf,
    /// Do not read or write the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[arg(long, global = true, env = "MF_PRECISION_BITS", default_value_t = PrecisionPolicy::DEFAULT_BITS)]
    pub precision_bits: usize,
    #[arg(long, global = true, env = "MF_ROUNDING_THRESHOLD", default_value_t = PrecisionPolicy::DEFAULT_THRESHOLD)]
    pub rounding_threshold: f64,
    /// Number of c-terms (c = 4N, 8N, …, 4N·c_max).
    #[arg(long, global = true, env = "MF_C_MAX", default_value_t = EvalParams::DEFAULT_C_MAX)]
    pub c_max: u64,
    #[arg(long, global = true, env = "MF_TAIL_WINDOW", default_value_t = EvalParams::DEFAULT_TAIL_WINDOW)]
    pub tail_window: usize,
    #[arg(long, global = true, env = "MF_SUMMATION", value_enum, default_value = "smooth")]
    pub summation: SummationArg,
    #[arg(long, global = true, env = "MF_FORMAT", value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "MF_PARALLELISM", value_parser = clap::value_parser!(u32).range(1..))]
    pub parallelism: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Zagier basis element f_d, exact.
    Basis {
        #[arg(long)]
        d: i64,
        #[arg(long, default_value_t = 20)]
        trunc: i64,
        /// Also derive f_3 from the Rademacher sum and compare.
        #[arg(long)]
        check_seed: bool,
    },
    /// One Rademacher coefficient c_N(−m; n).
    Coeff {
        #[arg(long)]
        m: i64,
        #[arg(long, default_value_t = 1)]
        level: u64,
        #[arg(long, default_value_t = 0)]
        v: i64,
        #[arg(long, default_value_t = 1)]
        h: u64,
        #[arg(long)]
        n: i64,
    },
    /// The Rademacher sum Z^[−m]_{N,(v,h)} up to q^trunc.
    Series {
        #[arg(long)]
        m: i64,
        #[arg(long, default_value_t = 1)]
        level: u64,
        #[arg(long, default_value_t = 0)]
        v: i64,
        #[arg(long, default_value_t = 1)]
        h: u64,
        #[arg(long, default_value_t = 8)]
        trunc: i64,
    },
    /// Target series 𝓗, 𝓖 or 𝓕, exact.
    Target {
        #[arg(long, value_enum)]
        group: TargetArg,
        #[arg(long, default_value_t = 9)]
        trunc: i64,
    },
    /// McKay–Thompson series of a class.
    Mt {
        #[arg(long)]
        group: String,
        #[arg(long)]
        class: String,
        /// Default: the tabulated depth (9 for M, 8 for B).
        #[arg(long)]
        trunc: Option<i64>,
    },
    /// Signed decompositions of an integer into irreducible dimensions.
    Decompose {
        #[arg(long)]
        group: String,
        #[arg(long, allow_hyphen_values = true)]
        target: i128,
        #[arg(long, default_value_t = 2)]
        max_mult: u32,
        #[arg(long)]
        max_index: Option<usize>,
        #[arg(long, default_value_t = SearchOptions::DEFAULT_NODE_LIMIT)]
        node_limit: u64,
        /// Print at most this many decompositions.
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
    /// Identify one class with Rademacher sums plus theta corrections.
    Identify {
        #[arg(long)]
        group: String,
        #[arg(long)]
        class: String,
        /// Allow canceling pairs Z^[−m]_{N+} − Z^[−m]_{N−}.
        #[arg(long)]
        extended: bool,
        /// Try every h at every level instead of only h | 4N.
        #[arg(long)]
        relaxed_multipliers: bool,
        #[arg(long, default_value_t = IdentifyOptions::DEFAULT_RESIDUAL_TOLERANCE)]
        tolerance: f64,
    },
    /// Compare all McKay–Thompson series with the tabulated coefficients.
    VerifyB {
        #[arg(long)]
        group: String,
    },
    /// Re-run the identifications for all classes up to an order.
    ReproduceA {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 11)]
        max_order: u64,
        /// Restrict to these classes (comma separated).
        #[arg(long, value_delimiter = ',')]
        classes: Option<Vec<String>>,
        /// Try every h at every level instead of only h | 4N.
        #[arg(long)]
        relaxed_multipliers: bool,
        #[arg(long, default_value_t = IdentifyOptions::DEFAULT_RESIDUAL_TOLERANCE)]
        tolerance: f64,
    },
    /// Check that the cube of the Borcherds lift of f_3 is q·j(τ).
    LiftCheck {
        #[arg(long, default_value_t = 50)]
        trunc: i64,
    },
    /// Evict least-recently-used cache files down to a size budget.
    #[command(name = "cache-gc", alias = "cache_gc")]
    CacheGc {
        #[arg(long)]
        max_bytes: u64,
    },
}

/// Settings shared by all commands, after flags and environment.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub group: Option<String>,
    pub trunc: Option<i64>,
    pub precision_bits: usize,
    pub rounding_threshold: f64,
    pub c_max: u64,
    pub tail_window: usize,
    pub data_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub parallelism: usize,
}

#[derive(Debug)]
enum Failure {
    /// Exit 2.
    Usage(String),
    /// Exit 1.
    Compute(String),
}

impl From<GroupDataError> for Failure {
    fn from(e: GroupDataError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<MoonshineError> for Failure {
    fn from(e: MoonshineError) -> Self {
        match e {
            MoonshineError::SearchSpaceExceeded { .. } | MoonshineError::Zagier(_) => {
                Failure::Compute(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<RademacherError> for Failure {
    fn from(e: RademacherError) -> Self {
        match e {
            RademacherError::ImaginaryResidue { .. } | RademacherError::Arith(_) => {
                Failure::Compute(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<ZagierError> for Failure {
    fn from(e: ZagierError) -> Self {
        match e {
            ZagierError::InvalidIndex(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

/// What a command produced: a JSON document, optional text and CSV
/// renderings, and whether it counts as success.
struct Output {
    json: Value,
    text: String,
    csv: Option<String>,
    ok: bool,
}

/// Entry point for the binary: parses `std::env::args` and writes to the
/// standard streams.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs one invocation with explicit arguments and streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let threads = cli.parallelism.map_or(0, |p| p as usize);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let cfg = config(&cli, pool.current_num_threads());
    let result = pool.install(|| execute(&cli, &cfg));
    match result {
        Ok(mut output) => {
            if let Value::Object(map) = &mut output.json {
                map.insert("run".into(), serde_json::to_value(&cfg).expect("config serializes"));
            }
            let body = match cli.format {
                OutputFormat::Json => {
                    serde_json::to_string_pretty(&output.json).expect("reports serialize") + "\n"
                }
                OutputFormat::Text => output.text,
                OutputFormat::Csv => match output.csv {
                    Some(c) => c,
                    None => {
                        let _ = writeln!(err, "error: this command has no CSV rendering");
                        return 2;
                    }
                },
            };
            let _ = out.write_all(body.as_bytes());
            if output.ok {
                0
            } else {
                1
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Compute(msg)) => {
            let _ = writeln!(err, "computation failed: {msg}");
            1
        }
    }
}

fn config(cli: &Cli, threads: usize) -> RunConfig {
    RunConfig {
        command: command_name(&cli.command).into(),
        group: match &cli.command {
            Command::Mt { group, .. }
            | Command::Decompose { group, .. }
            | Command::Identify { group, .. }
            | Command::VerifyB { group, .. }
            | Command::ReproduceA { group, .. } => Some(group.clone()),
            Command::Target { group, .. } => Some(format!("{group:?}")),
            _ => None,
        },
        trunc: match &cli.command {
            Command::Basis { trunc, .. }
            | Command::Series { trunc, .. }
            | Command::Target { trunc, .. }
            | Command::LiftCheck { trunc } => Some(*trunc),
            Command::Mt { trunc, .. } => *trunc,
            _ => None,
        },
        precision_bits: cli.precision_bits,
        rounding_threshold: cli.rounding_threshold,
        c_max: cli.c_max,
        tail_window: cli.tail_window,
        data_dir: cli.data_dir.clone().unwrap_or_else(crate::default_data_dir),
        cache_dir: (!cli.no_cache).then(|| cli.cache_dir.clone()),
        output_format: cli.format,
        parallelism: threads,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Basis { .. } => "basis",
        Command::Coeff { .. } => "coeff",
        Command::Series { .. } => "series",
        Command::Target { .. } => "target",
        Command::Mt { .. } => "mt",
        Command::Decompose { .. } => "decompose",
        Command::Identify { .. } => "identify",
        Command::VerifyB { .. } => "verify-b",
        Command::ReproduceA { .. } => "reproduce-a",
        Command::LiftCheck { .. } => "lift-check",
        Command::CacheGc { .. } => "cache-gc",
    }
}

fn eval_params(cli: &Cli) -> Result<EvalParams, Failure> {
    let policy = PrecisionPolicy::new(cli.precision_bits, cli.rounding_threshold)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let summation = match cli.summation {
        SummationArg::Smooth => Summation::Smooth,
        SummationArg::Sharp => Summation::Sharp,
    };
    EvalParams::new(policy, cli.c_max, cli.tail_window, summation).map_err(Failure::from)
}

fn precision_meta(params: &EvalParams) -> Value {
    json!({
        "precision_bits": params.policy.precision_bits,
        "rounding_threshold": params.policy.rounding_threshold,
        "c_max": params.c_max,
        "tail_window": params.tail_window,
        "summation": params.summation,
    })
}

fn series_csv(series: &QSeries) -> String {
    let mut s = String::from("n,coefficient\n");
    for (e, c) in series.terms() {
        if c.denom() == &BigInt::from(1) {
            s.push_str(&format!("{e},{}\n", c.numer()));
        } else {
            s.push_str(&format!("{e},{}/{}\n", c.numer(), c.denom()));
        }
    }
    s
}

fn series_json(series: &QSeries) -> Value {
    Value::Array(
        series
            .terms()
            .map(|(e, c)| {
                let v = if c.denom() == &BigInt::from(1) {
                    c.numer().to_string()
                } else {
                    format!("{}/{}", c.numer(), c.denom())
                };
                json!({ "n": e, "coefficient": v })
            })
            .collect(),
    )
}

fn series_text(title: &str, series: &QSeries) -> String {
    let mut s = format!("{title}\n");
    for (e, c) in series.terms() {
        s.push_str(&format!("  q^{e:<4} {c}\n"));
    }
    s
}

fn parse_group(s: &str) -> Result<Group, Failure> {
    s.parse::<Group>().map_err(Failure::from)
}

fn cache(cfg: &RunConfig) -> Option<TermCache> {
    cfg.cache_dir.as_ref().map(TermCache::new)
}

fn spec_from(m: i64, level: u64, v: i64, h: u64) -> Result<RademacherSpec, Failure> {
    let mult = MultiplierSystem::new(level, v, h)?;
    Ok(RademacherSpec::new(m, mult)?)
}

fn execute(cli: &Cli, cfg: &RunConfig) -> Result<Output, Failure> {
    let data: &Path = &cfg.data_dir;
    match &cli.command {
        Command::Basis {
            d,
            trunc,
            check_seed,
        } => {
            let seed_depth = trunc + (d - 3).max(0);
            let basis_dir = cfg.cache_dir.as_ref().map(|c| c.join("basis"));
            let el = basis_cached(*d, *trunc, basis_dir.as_deref())?;
            let mut ok = true;
            let mut seed = Value::Null;
            if *check_seed {
                let params = eval_params(cli)?;
                let numeric = seed_f3_rademacher(seed_depth, &params, cache(cfg).as_ref())?;
                let exact = seed_f3(seed_depth);
                let agree = numeric.series == exact.series;
                ok &= agree;
                seed = json!({ "depth": seed_depth, "agrees_with_exact": agree, "params": precision_meta(&params) });
            }
            Ok(Output {
                text: series_text(&format!("f_{d} up to q^{trunc} (f_3 seed depth {seed_depth})"), &el.series),
                csv: Some(series_csv(&el.series)),
                json: json!({
                    "d": d,
                    "trunc": trunc,
                    "seed_depth": seed_depth,
                    "coefficients": series_json(&el.series),
                    "seed_check": seed,
                }),
                ok,
            })
        }
        Command::Coeff { m, level, v, h, n } => {
            let spec = spec_from(*m, *level, *v, *h)?;
            let params = eval_params(cli)?;
            let r = rad_coefficients(&spec, &[*n], &params, cache(cfg).as_ref())?.remove(0);
            let mut ctx = params.policy.context();
            let value = ctx.format_dec(&r.value);
            let cert = r.certified_integer.as_ref().map(|k| k.to_string());
            Ok(Output {
                text: format!(
                    "{spec} at q^{n}: {value}\n  error estimate {:e}, rounding distance {:e}, certified {}\n",
                    r.error_estimate,
                    r.rounding_distance,
                    cert.as_deref().unwrap_or("no")
                ),
                csv: Some(format!("n,value,error_estimate,certified\n{n},{value},{},{}\n", r.error_estimate, cert.clone().unwrap_or_default())),
                json: json!({
                    "spec": spec.to_string(),
                    "n": n,
                    "value": value,
                    "imag": r.imag,
                    "error_estimate": r.error_estimate,
                    "rounding_distance": r.rounding_distance,
                    "certified_integer": cert,
                    "warnings": spec.validity_warnings(),
                    "params": precision_meta(&params),
                }),
                ok: r.certified_integer.is_some(),
            })
        }
        Command::Series { m, level, v, h, trunc } => {
            let spec = spec_from(*m, *level, *v, *h)?;
            let params = eval_params(cli)?;
            let rs = rad_series(&spec, *trunc, &params, cache(cfg).as_ref())?;
            let mut ctx = params.policy.context();
            let details: Vec<Value> = rs
                .results
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "value": ctx.format_dec(&r.value),
                        "error_estimate": r.error_estimate,
                        "certified_integer": r.certified_integer.as_ref().map(|k| k.to_string()),
                    })
                })
                .collect();
            Ok(Output {
                text: series_text(&format!("{spec} up to q^{trunc}"), &rs.series),
                csv: Some(series_csv(&rs.series)),
                json: json!({
                    "spec": spec.to_string(),
                    "trunc": trunc,
                    "coefficients": details,
                    "all_certified": rs.all_certified(),
                    "warnings": spec.validity_warnings(),
                    "params": precision_meta(&params),
                }),
                ok: rs.all_certified(),
            })
        }
        Command::Target { group, trunc } => {
            let spec = match group {
                TargetArg::M => TargetSeriesSpec::monster(),
                TargetArg::B => TargetSeriesSpec::baby_monster(),
                TargetArg::Th => TargetSeriesSpec::thompson(),
            };
            let s = target_series(&spec, *trunc)?;
            Ok(Output {
                text: series_text(&format!("{:?} target up to q^{trunc}", spec.kind), &s),
                csv: Some(series_csv(&s)),
                json: json!({ "target": spec, "trunc": trunc, "coefficients": series_json(&s) }),
                ok: true,
            })
        }
        Command::Mt { group, class, trunc } => {
            let group = parse_group(group)?;
            let table = CharacterTable::load_group(data, group)?;
            let spec = TargetSeriesSpec::for_group(group);
            let trunc = trunc.unwrap_or(spec.fixture_depth());
            let mt = mckay_thompson(&table, &DecompositionSet::paper(group), &spec, class, trunc)?;
            let q = mt.to_qseries();
            Ok(Output {
                text: series_text(&format!("{}{} McKay–Thompson series", group, mt.class_label), &q),
                csv: Some(series_csv(&q)),
                json: json!({
                    "group": group,
                    "class": mt.class_label,
                    "order": mt.class_order,
                    "trunc": trunc,
                    "coefficients": series_json(&q),
                }),
                ok: true,
            })
        }
        Command::Decompose {
            group,
            target,
            max_mult,
            max_index,
            node_limit,
            limit,
        } => {
            let group = parse_group(group)?;
            let table = CharacterTable::load_group(data, group)?;
            let dims = table.dims();
            let opts = SearchOptions {
                max_mult: *max_mult,
                max_index: max_index.unwrap_or(dims.len()),
                node_limit: *node_limit,
            };
            let found = decomposition_search(*target, &dims, &opts)?;
            let letter = group.irrep_letter();
            let rendered: Vec<String> = found.iter().take(*limit).map(|d| d.render(letter)).collect();
            let mut text = format!("{} decompositions of {target}\n", found.len());
            for r in &rendered {
                text.push_str(&format!("  {r}\n"));
            }
            Ok(Output {
                text,
                csv: Some(
                    std::iter::once("decomposition\n".to_string())
                        .chain(rendered.iter().map(|r| format!("{r}\n")))
                        .collect(),
                ),
                json: json!({
                    "group": group,
                    "target": target.to_string(),
                    "options": opts,
                    "count": found.len(),
                    "decompositions": rendered,
                }),
                ok: true,
            })
        }
        Command::Identify {
            group,
            class,
            extended,
            relaxed_multipliers,
            tolerance,
        } => {
            let group = parse_group(group)?;
            let table = CharacterTable::load_group(data, group)?;
            let spec = TargetSeriesSpec::for_group(group);
            let series = mckay_thompson(
                &table,
                &DecompositionSet::paper(group),
                &spec,
                class,
                spec.fixture_depth(),
            )?;
            let params = eval_params(cli)?;
            let eval = SumEvaluator::new(params, spec.fixture_depth(), cache(cfg));
            let opts = IdentifyOptions {
                extended: *extended,
                h_divides_4n: !relaxed_multipliers,
                residual_tolerance: *tolerance,
                ..IdentifyOptions::restricted()
            };
            let cert = identify_class(&series, &spec, &opts, &eval);
            Ok(Output {
                text: format!("{}{}: {:?} {}\n", group, cert.class, cert.status, describe(&cert)),
                csv: None,
                json: serde_json::to_value(&cert).expect("certificates serialize"),
                ok: cert.status == Status::Identified,
            })
        }
        Command::VerifyB { group } => {
            let group = parse_group(group)?;
            let table = CharacterTable::load_group(data, group)?;
            let fixtures = load_fixtures(&data.join("appendix_b.csv"))?;
            let report = verify_fixtures(
                &table,
                &DecompositionSet::paper(group),
                &TargetSeriesSpec::for_group(group),
                &fixtures,
            );
            let mut text = format!(
                "{}: {} coefficients over {} classes, {} mismatches, {} uncovered\n",
                group.name(),
                report.checked,
                report.classes,
                report.mismatches.len(),
                report.uncovered.len()
            );
            for m in report.mismatches.iter().chain(&report.uncovered) {
                text.push_str(&format!("  {} q^{}: expected {} got {}\n", m.class, m.n, m.expected, m.got));
            }
            Ok(Output {
                text,
                csv: None,
                ok: report.is_clean(),
                json: serde_json::to_value(&report).expect("reports serialize"),
            })
        }
        Command::ReproduceA {
            group,
            max_order,
            classes,
            relaxed_multipliers,
            tolerance,
        } => {
            let group = parse_group(group)?;
            let spec = TargetSeriesSpec::for_group(group);
            let params = eval_params(cli)?;
            let eval = SumEvaluator::new(params, spec.fixture_depth(), cache(cfg));
            let opts = IdentifyOptions {
                h_divides_4n: !relaxed_multipliers,
                residual_tolerance: *tolerance,
                ..IdentifyOptions::restricted()
            };
            let report = reproduce_appendix_a(data, group, *max_order, classes.as_deref(), &opts, &eval)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let mut text = String::new();
            for o in &report.outcomes {
                text.push_str(&format!(
                    "{:>4} {:<10} {:<4} {:?}: {}\n",
                    o.class,
                    o.expected,
                    if o.agrees { "ok" } else { "DIFF" },
                    o.certificate.status,
                    describe(&o.certificate)
                ));
                if let Some(p) = &o.published {
                    text.push_str(&format!("{:>21} published ansatz: {:?}: {}\n", "", p.status, describe(p)));
                }
            }
            text.push_str(&format!(
                "identified {}/{}, no-match {}/{}, extended {}/{}\n",
                report.identified_matching,
                report.identified_expected,
                report.no_match_confirmed,
                report.no_match_expected,
                report.extended_matching,
                report.extended_expected
            ));
            Ok(Output {
                text,
                csv: None,
                ok: report.all_agree(),
                json: json!({ "report": report, "params": precision_meta(&params) }),
            })
        }
        Command::LiftCheck { trunc } => {
            let lift = borcherds_lift_3c(*trunc);
            let cube = lift.series.pow(3);
            let expected = q_times_j(*trunc);
            let ok = cube == expected;
            let head: Vec<String> = (0..=(*trunc).min(8))
                .map(|n| lift.series.int_coeff(n).to_string())
                .collect();
            Ok(Output {
                text: format!(
                    "lift q^(-1/3)·(1 + {} …); cube equals q·j(τ) up to q^{trunc}: {ok}\n",
                    head[1..].join(", ")
                ),
                csv: Some(series_csv(&lift.series)),
                json: json!({
                    "trunc": trunc,
                    "prefactor": "-1/3",
                    "leading_coefficients": head,
                    "cube_equals_q_j": ok,
                }),
                ok,
            })
        }
        Command::CacheGc { max_bytes } => {
            let root = cfg
                .cache_dir
                .clone()
                .ok_or_else(|| Failure::Usage("cache-gc needs a cache directory".into()))?;
            let report = TermCache::new(&root)
                .gc(*max_bytes)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(Output {
                text: format!(
                    "scanned {} files, evicted {} ({} bytes), {} bytes remain, skipped {} in-flight files\n",
                    report.scanned_files,
                    report.evicted_files,
                    report.freed_bytes,
                    report.remaining_bytes,
                    report.skipped_temp_files
                ),
                csv: None,
                json: serde_json::to_value(&report).expect("reports serialize"),
                ok: true,
            })
        }
    }
}
