//! Deterministic Monte-Carlo engine: null critical values, power estimates
//! and power curves, plus a plain-text cache of critical values.
//!
//! Replication `r` always draws from its own ChaCha8 stream, selected by
//! `r` under a key derived from the master seed and the simulated law, so
//! results do not depend on the number of workers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alternatives::{alternative_pmf, AlternativeSpec, DigitSampler, Family};
use crate::benford::{benford_pmf, Pmf9};
use crate::error::{Error, Result};
use crate::statistic::{check_alpha, Statistic};

pub const MIN_REPLICATIONS: usize = 100;

/// Replication counts used when nothing else is requested.
pub const DESK_NULL_REPLICATIONS: usize = 20_000;
pub const DESK_POWER_REPLICATIONS: usize = 2_000;
pub const FULL_NULL_REPLICATIONS: usize = 50_000;
pub const FULL_POWER_REPLICATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub replications: usize,
    pub master_seed: u64,
    pub n: u64,
    pub alpha: f64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::Configuration(format!(
                "{} replications requested, at least {MIN_REPLICATIONS} needed",
                self.replications
            )));
        }
        if self.n == 0 {
            return Err(Error::Configuration("sample size must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Configuration("worker count must be positive".into()));
        }
        check_alpha(self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueRecord {
    pub statistic_id: String,
    pub n: u64,
    pub alpha: f64,
    pub value: f64,
    pub replications: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPoint {
    pub beta: f64,
    pub power: f64,
    pub replications: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurve {
    pub family: Family,
    pub test_id: String,
    pub n: u64,
    pub points: Vec<PowerPoint>,
}

// ---------------------------------------------------------------------------
// Streams and parallel execution
// ---------------------------------------------------------------------------

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key for a simulated law: the null law, or one alternative.
fn law_key(alt: Option<&AlternativeSpec>) -> u64 {
    match alt {
        None => 0,
        Some(spec) => {
            let family = Family::ALL.iter().position(|f| *f == spec.family).unwrap_or(0) as u64;
            splitmix64(splitmix64(family + 1) ^ spec.beta.to_bits())
        }
    }
}

/// Stream of replication `r` for the given master seed and law key.
pub fn replication_rng(master_seed: u64, key: u64, r: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(master_seed) ^ splitmix64(key));
    rng.set_stream(r);
    rng
}

/// Runs `f` on a pool with the requested number of workers.
pub(crate) fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::Configuration(format!("cannot build worker pool: {e}"))),
    }
}

/// Values of every statistic on `replications` samples of size `n` from
/// `pmf`; outer index follows `statistics`, inner index is the replication.
fn simulate(
    statistics: &[Statistic],
    pmf: &Pmf9,
    key: u64,
    n: u64,
    replications: usize,
    master_seed: u64,
    workers: Option<usize>,
) -> Result<Vec<Vec<f64>>> {
    for s in statistics {
        s.validate()?;
    }
    let sampler = DigitSampler::new(pmf);
    let rows: Vec<Vec<f64>> = with_workers(workers, || {
        (0..replications as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = replication_rng(master_seed, key, r);
                let sample = sampler.sample(n, &mut rng)?;
                statistics.iter().map(|s| s.evaluate(&sample)).collect()
            })
            .collect::<Result<Vec<Vec<f64>>>>()
    })??;
    let mut columns = vec![Vec::with_capacity(replications); statistics.len()];
    for row in rows {
        for (col, v) in columns.iter_mut().zip(row) {
            col.push(v);
        }
    }
    Ok(columns)
}

// ---------------------------------------------------------------------------
// Critical values
// ---------------------------------------------------------------------------

/// Type-7 quantile (linear interpolation between order statistics) of an
/// ascending slice.
pub fn empirical_quantile(sorted: &[f64], prob: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::Configuration("no values to take a quantile of".into()));
    }
    if !(0.0..=1.0).contains(&prob) {
        return Err(Error::Domain(format!("probability {prob} outside [0, 1]")));
    }
    let h = (sorted.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// Statistic values on `config.replications` Benford samples of size `config.n`.
pub fn simulate_null(statistic: Statistic, config: &McConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let mut cols = simulate(
        &[statistic],
        &benford_pmf(),
        law_key(None),
        config.n,
        config.replications,
        config.master_seed,
        config.workers,
    )?;
    Ok(cols.remove(0))
}

fn record_from(statistic: Statistic, config: &McConfig, mut values: Vec<f64>) -> Result<CriticalValueRecord> {
    values.sort_by(f64::total_cmp);
    Ok(CriticalValueRecord {
        statistic_id: statistic.id(),
        n: config.n,
        alpha: config.alpha,
        value: empirical_quantile(&values, 1.0 - config.alpha)?,
        replications: config.replications,
        master_seed: config.master_seed,
    })
}

/// Empirical (1 − α)-quantile of the statistic under the Benford law.
pub fn mc_critical_value(statistic: Statistic, config: &McConfig) -> Result<CriticalValueRecord> {
    let values = simulate_null(statistic, config)?;
    record_from(statistic, config, values)
}

/// Critical values of several statistics from one shared set of null samples.
pub fn mc_critical_values(statistics: &[Statistic], config: &McConfig) -> Result<Vec<CriticalValueRecord>> {
    config.validate()?;
    let cols = simulate(
        statistics,
        &benford_pmf(),
        law_key(None),
        config.n,
        config.replications,
        config.master_seed,
        config.workers,
    )?;
    statistics
        .iter()
        .zip(cols)
        .map(|(s, values)| record_from(*s, config, values))
        .collect()
}

// ---------------------------------------------------------------------------
// Power
// ---------------------------------------------------------------------------

fn check_record(statistic: Statistic, config: &McConfig, critical: &CriticalValueRecord) -> Result<()> {
    if critical.statistic_id != statistic.id() {
        return Err(Error::Configuration(format!(
            "critical value is for {}, not {statistic}",
            critical.statistic_id
        )));
    }
    if critical.n != config.n {
        return Err(Error::Configuration(format!(
            "critical value is for n = {}, not {}",
            critical.n, config.n
        )));
    }
    Ok(())
}

fn rejection_rate(values: &[f64], critical: f64) -> f64 {
    values.iter().filter(|&&v| v > critical).count() as f64 / values.len() as f64
}

/// Rejection rates of several statistics on shared samples from one alternative.
pub fn mc_power_many(
    statistics: &[Statistic],
    alt: &AlternativeSpec,
    config: &McConfig,
    criticals: &[CriticalValueRecord],
) -> Result<Vec<f64>> {
    config.validate()?;
    if statistics.len() != criticals.len() {
        return Err(Error::Configuration("one critical value per statistic is needed".into()));
    }
    for (s, c) in statistics.iter().zip(criticals) {
        check_record(*s, config, c)?;
    }
    let pmf = alternative_pmf(alt)?;
    let cols = simulate(
        statistics,
        &pmf,
        law_key(Some(alt)),
        config.n,
        config.replications,
        config.master_seed,
        config.workers,
    )?;
    Ok(cols
        .iter()
        .zip(criticals)
        .map(|(values, c)| rejection_rate(values, c.value))
        .collect())
}

/// Fraction of alternative samples whose statistic exceeds the critical value.
pub fn mc_power(
    statistic: Statistic,
    alt: &AlternativeSpec,
    config: &McConfig,
    critical: &CriticalValueRecord,
) -> Result<f64> {
    Ok(mc_power_many(&[statistic], alt, config, std::slice::from_ref(critical))?[0])
}

/// Rejection rate on samples from an arbitrary law, with streams keyed by
/// `key` (use distinct keys for independent studies).
pub fn mc_rejection_rate(
    statistic: Statistic,
    pmf: &Pmf9,
    key: u64,
    config: &McConfig,
    critical: &CriticalValueRecord,
) -> Result<f64> {
    config.validate()?;
    check_record(statistic, config, critical)?;
    let cols = simulate(
        &[statistic],
        pmf,
        splitmix64(key ^ 0xA5A5_A5A5_5A5A_5A5A),
        config.n,
        config.replications,
        config.master_seed,
        config.workers,
    )?;
    Ok(rejection_rate(&cols[0], critical.value))
}

/// One curve per statistic over `grid`, all points sharing `criticals`.
pub fn power_curve(
    statistics: &[Statistic],
    family: Family,
    grid: &[f64],
    config: &McConfig,
    criticals: &[CriticalValueRecord],
) -> Result<Vec<PowerCurve>> {
    let specs = grid
        .iter()
        .map(|&beta| AlternativeSpec::new(family, beta))
        .collect::<Result<Vec<_>>>()?;
    let mut curves: Vec<PowerCurve> = statistics
        .iter()
        .map(|s| PowerCurve {
            family,
            test_id: s.id(),
            n: config.n,
            points: Vec::with_capacity(grid.len()),
        })
        .collect();
    for spec in &specs {
        let powers = mc_power_many(statistics, spec, config, criticals)?;
        for (curve, power) in curves.iter_mut().zip(powers) {
            curve.points.push(PowerPoint {
                beta: spec.beta,
                power,
                replications: config.replications,
            });
        }
    }
    Ok(curves)
}

// ---------------------------------------------------------------------------
// Critical-value cache
// ---------------------------------------------------------------------------

/// Header line of a cache file.
pub const CACHE_HEADER: &str = "# statistic_id\tn\talpha\treplications\tmaster_seed\tvalue";

/// Critical values persisted as tab-separated text, one record per line
/// (tabs shown as spaces):
///
/// ```text
/// # statistic_id  n  alpha  replications  master_seed  value
/// T2  2000  0.05  50000  7  5.9873...
/// ```
///
/// Lines starting with `#` are comments. Floats are written in shortest
/// round-trip form so cached values reload bit-exactly.
#[derive(Debug, Clone)]
pub struct CriticalValueCache {
    path: PathBuf,
    records: Vec<CriticalValueRecord>,
}

/// How a cached lookup was satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Computed,
}

impl CriticalValueCache {
    /// Loads the cache at `path`; a missing file is an empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let records = match fs::read_to_string(&path) {
            Ok(text) => parse_cache(&text)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(Error::Cache(format!("{}: {e}", path.display()))),
        };
        Ok(Self { path, records })
    }

    pub fn records(&self) -> &[CriticalValueRecord] {
        &self.records
    }

    pub fn lookup(&self, statistic: Statistic, config: &McConfig) -> Option<&CriticalValueRecord> {
        let id = statistic.id();
        self.records.iter().find(|r| {
            r.statistic_id == id
                && r.n == config.n
                && r.alpha == config.alpha
                && r.replications == config.replications
                && r.master_seed == config.master_seed
        })
    }

    /// Appends a record to memory and to the file.
    pub fn insert(&mut self, record: CriticalValueRecord) -> Result<()> {
        let fresh = !self.path.exists();
        let mut file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| Error::Cache(format!("{}: {e}", self.path.display())))?;
        let mut text = String::new();
        if fresh {
            text.push_str(CACHE_HEADER);
            text.push('\n');
        }
        text.push_str(&format_record(&record));
        text.push('\n');
        file.write_all(text.as_bytes())
            .map_err(|e| Error::Cache(format!("{}: {e}", self.path.display())))?;
        self.records.push(record);
        Ok(())
    }

    pub fn get_or_compute(
        &mut self,
        statistic: Statistic,
        config: &McConfig,
    ) -> Result<(CriticalValueRecord, CacheOutcome)> {
        if let Some(hit) = self.lookup(statistic, config) {
            return Ok((hit.clone(), CacheOutcome::Hit));
        }
        let record = mc_critical_value(statistic, config)?;
        self.insert(record.clone())?;
        Ok((record, CacheOutcome::Computed))
    }

    /// Cached or freshly computed values for several statistics; misses are
    /// simulated together on shared null samples.
    pub fn get_or_compute_many(
        &mut self,
        statistics: &[Statistic],
        config: &McConfig,
    ) -> Result<Vec<CriticalValueRecord>> {
        let missing: Vec<Statistic> = statistics
            .iter()
            .copied()
            .filter(|s| self.lookup(*s, config).is_none())
            .collect();
        if !missing.is_empty() {
            for record in mc_critical_values(&missing, config)? {
                self.insert(record)?;
            }
        }
        Ok(statistics
            .iter()
            .map(|s| self.lookup(*s, config).cloned().expect("inserted above"))
            .collect())
    }
}

fn format_record(r: &CriticalValueRecord) -> String {
    format!(
        "{}\t{}\t{:?}\t{}\t{}\t{:?}",
        r.statistic_id, r.n, r.alpha, r.replications, r.master_seed, r.value
    )
}

fn parse_cache(text: &str) -> Result<Vec<CriticalValueRecord>> {
    let bad = |line_no: usize, what: &str| Error::Cache(format!("line {line_no}: {what}"));
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(bad(line_no, "expected 6 tab-separated fields"));
        }
        out.push(CriticalValueRecord {
            statistic_id: fields[0].to_string(),
            n: fields[1].parse().map_err(|_| bad(line_no, "bad n"))?,
            alpha: fields[2].parse().map_err(|_| bad(line_no, "bad alpha"))?,
            replications: fields[3].parse().map_err(|_| bad(line_no, "bad replications"))?,
            master_seed: fields[4].parse().map_err(|_| bad(line_no, "bad master_seed"))?,
            value: fields[5].parse().map_err(|_| bad(line_no, "bad value"))?,
        });
    }
    Ok(out)
}
