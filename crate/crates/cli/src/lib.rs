//! Command implementations behind the `benford-smooth` binary.
//!
//! Every command returns an exit status: 0 for success (for `analyze`, no
//! test rejected), 1 when `analyze` rejects with at least one test, and
//! errors map to 2 in the binary.

pub mod args;
pub mod figure;
pub mod input;
pub mod report;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use thiserror::Error;

use benford_smooth::alternatives::{alternative_pmf, AlternativeSpec, DigitSampler, Family};
use benford_smooth::benford::{tabulate_digits, DigitPolicy, Observation};
use benford_smooth::mc::{
    mc_critical_values, power_curve, replication_rng, CacheOutcome, CriticalValueCache, CriticalValueRecord,
    McConfig, PowerCurve,
};
use benford_smooth::smooth::DEFAULT_K_MAX;
use benford_smooth::statistic::{run_test, McSettings, Statistic};

use args::{AnalyzeArgs, Cli, Command, CriticalArgs, FigureArgs, PowerArgs, SampleArgs};
use report::{AnalysisReport, CalibrationInfo, InputDescriptor, SeedSource, TestEntry};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] benford_smooth::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("write failed: {0}")]
    Output(#[from] io::Error),
    #[error("delimited input: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Input(String),
}

/// Header of every power CSV.
pub const POWER_CSV_HEADER: [&str; 7] = ["family", "test", "n", "beta", "power", "replications", "seed"];

pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Sample(a) => sample(a).map(|()| 0),
        Command::CriticalValues(a) => critical_values_cmd(a).map(|()| 0),
        Command::Power(a) => power(a).map(|()| 0),
        Command::Figure1(a) => figure1(a).map(|()| 0),
    }
}

/// The given seed, or a fresh one from the operating system.
pub fn resolve_seed(seed: Option<u64>) -> (u64, SeedSource) {
    match seed {
        Some(s) => (s, SeedSource::Explicit),
        None => (rand::random(), SeedSource::Entropy),
    }
}

pub fn parse_statistics(ids: &[String]) -> Result<Vec<Statistic>, CliError> {
    let mut out = Vec::with_capacity(ids.len());
    for id in ids.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        let s: Statistic = id.parse()?;
        s.validate()?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    if out.is_empty() {
        return Err(CliError::Input("no statistics requested".into()));
    }
    Ok(out)
}

/// Requested battery; `kmax` replaces the default K_max of the data-driven
/// statistic in the default and full batteries.
fn battery(tests: Option<&[String]>, full: bool, kmax: usize) -> Result<Vec<Statistic>, CliError> {
    if let Some(ids) = tests {
        return parse_statistics(ids);
    }
    let base = if full {
        Statistic::full_battery()
    } else {
        Statistic::DEFAULT_BATTERY.to_vec()
    };
    let out: Vec<Statistic> = base
        .into_iter()
        .map(|s| match s {
            Statistic::DataDriven(DEFAULT_K_MAX) => Statistic::DataDriven(kmax),
            other => other,
        })
        .collect();
    for s in &out {
        s.validate()?;
    }
    Ok(out)
}

fn policy_name(p: DigitPolicy) -> &'static str {
    match p {
        DigitPolicy::Strict => "strict",
        DigitPolicy::Absolute => "absolute",
        DigitPolicy::SkipInvalid => "skip-invalid",
    }
}

fn analyze(args: AnalyzeArgs) -> Result<i32, CliError> {
    let tests = battery(args.tests.as_deref(), args.full, args.kmax)?;
    let policy = DigitPolicy::from(args.policy);
    let records = input::read_records(&args.input, args.column.as_deref(), args.delimiter)?;
    let tabulation = tabulate_digits(records.iter().map(|r| Observation::Text(r)), policy)?;
    let sample = tabulation.sample;
    let (seed, seed_source) = resolve_seed(args.seed);
    let settings = McSettings {
        replications: args.reps,
        master_seed: seed,
        workers: args.workers,
    };
    let calibration = args.calibration.into();
    let mut entries = Vec::with_capacity(tests.len());
    for statistic in tests {
        let result = run_test(statistic, &sample, args.alpha, calibration, Some(&settings))?;
        entries.push(TestEntry { id: statistic, result });
    }
    let any_rejection = entries.iter().any(|e| e.result.reject);
    let report = AnalysisReport {
        schema_version: report::SCHEMA_VERSION,
        input: InputDescriptor {
            path: args.input.clone(),
            column: args.column.clone(),
            policy: policy_name(policy).into(),
        },
        n: sample.n(),
        skipped: tabulation.skipped,
        frequencies: report::frequency_table(&sample),
        alpha: args.alpha,
        calibration: CalibrationInfo {
            requested: calibration,
            replications: args.reps,
            seed,
            seed_source,
        },
        tests: entries,
        any_rejection,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    let mut stdout = io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, &report)?;
    writeln!(stdout)?;
    if args.table {
        eprint!("{}", report.render_table());
    }
    Ok(i32::from(any_rejection))
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).map_err(|source| CliError::Io {
            path: p.clone(),
            source,
        })?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn sample(args: SampleArgs) -> Result<(), CliError> {
    let family: Family = args.family.parse()?;
    let spec = AlternativeSpec::new(family, args.beta)?;
    let sampler = DigitSampler::new(&alternative_pmf(&spec)?);
    let (seed, _) = resolve_seed(args.seed);
    eprintln!("seed: {seed}");
    let mut rng = replication_rng(seed, 0, 0);
    let mut out = open_output(args.output.as_ref())?;
    for _ in 0..args.n {
        writeln!(out, "{}", sampler.draw(&mut rng))?;
    }
    out.flush()?;
    Ok(())
}

/// Critical values for `statistics`, through the cache when one is given.
pub fn critical_values(
    statistics: &[Statistic],
    config: &McConfig,
    cache: Option<&mut CriticalValueCache>,
) -> Result<Vec<CriticalValueRecord>, CliError> {
    Ok(match cache {
        Some(c) => c.get_or_compute_many(statistics, config)?,
        None => mc_critical_values(statistics, config)?,
    })
}

fn open_cache(path: Option<&PathBuf>) -> Result<Option<CriticalValueCache>, CliError> {
    Ok(match path {
        Some(p) => Some(CriticalValueCache::open(p)?),
        None => None,
    })
}

fn critical_values_cmd(args: CriticalArgs) -> Result<(), CliError> {
    let statistics = parse_statistics(&args.statistic)?;
    let (seed, _) = resolve_seed(args.seed);
    let config = McConfig {
        replications: args.reps,
        master_seed: seed,
        n: args.n,
        alpha: args.alpha,
        workers: args.workers,
    };
    config.validate()?;
    let mut stdout = io::stdout().lock();
    match open_cache(args.cache.as_ref())? {
        Some(mut cache) => {
            for s in statistics {
                let (record, outcome) = cache.get_or_compute(s, &config)?;
                let what = match outcome {
                    CacheOutcome::Hit => "cache hit",
                    CacheOutcome::Computed => "computed",
                };
                eprintln!("{what}: {} n={} alpha={} reps={} seed={}", s, args.n, args.alpha, args.reps, seed);
                serde_json::to_writer(&mut stdout, &record)?;
                writeln!(stdout)?;
            }
        }
        None => {
            for record in mc_critical_values(&statistics, &config)? {
                eprintln!("computed: {} n={} alpha={} reps={} seed={}", record.statistic_id, args.n, args.alpha, args.reps, seed);
                serde_json::to_writer(&mut stdout, &record)?;
                writeln!(stdout)?;
            }
        }
    }
    Ok(())
}

/// Long-format power table, one row per (test, β).
pub fn write_power_csv<W: Write>(out: W, curves: &[PowerCurve], seed: u64) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(POWER_CSV_HEADER)?;
    for curve in curves {
        for point in &curve.points {
            writer.write_record([
                curve.family.name().to_string(),
                curve.test_id.clone(),
                curve.n.to_string(),
                point.beta.to_string(),
                point.power.to_string(),
                point.replications.to_string(),
                seed.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

fn power(args: PowerArgs) -> Result<(), CliError> {
    let family: Family = args.family.parse()?;
    let panel = figure::panel_for(family);
    let grid = args.betas.clone().unwrap_or_else(|| panel.grid());
    if grid.is_empty() {
        return Err(CliError::Input("empty parameter grid".into()));
    }
    for &b in &grid {
        AlternativeSpec::new(family, b)?;
    }
    let n = args.n.unwrap_or(panel.n);
    let tests = battery(args.tests.as_deref(), false, DEFAULT_K_MAX)?;
    let (seed, _) = resolve_seed(args.seed);
    eprintln!("seed: {seed}");
    let null_config = McConfig {
        replications: args.null_reps,
        master_seed: seed,
        n,
        alpha: args.alpha,
        workers: args.workers,
    };
    null_config.validate()?;
    let power_config = McConfig {
        replications: args.reps,
        ..null_config
    };
    power_config.validate()?;
    let mut cache = open_cache(args.cache.as_ref())?;
    let criticals = critical_values(&tests, &null_config, cache.as_mut())?;
    let curves = power_curve(&tests, family, &grid, &power_config, &criticals)?;
    write_power_csv(open_output(args.output.as_ref())?, &curves, seed)
}

fn figure1(args: FigureArgs) -> Result<(), CliError> {
    let (seed, _) = resolve_seed(args.seed);
    eprintln!("seed: {seed}");
    let config = figure::FigureConfig {
        replications: args.reps,
        null_replications: args.null_reps,
        seed,
        alpha: 0.05,
        workers: args.workers,
    };
    let mut cache = open_cache(args.cache.as_ref())?;
    let result = figure::compute(&config, cache.as_mut())?;
    figure::write(&result, &config, &args.output_dir)?;
    eprintln!("wrote {}", args.output_dir.display());
    Ok(())
}
