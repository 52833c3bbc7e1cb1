//! The six-panel power study: one family per panel, each at its reference
//! sample size, five tests sharing Monte-Carlo critical values.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use benford_smooth::alternatives::Family;
use benford_smooth::mc::{power_curve, CriticalValueCache, CriticalValueRecord, McConfig, PowerCurve};
use benford_smooth::statistic::Statistic;

use crate::{critical_values, write_power_csv, CliError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub label: char,
    pub family: Family,
    pub n: u64,
    lo: f64,
    step: f64,
    points: usize,
}

impl Panel {
    pub fn grid(&self) -> Vec<f64> {
        // Rounded so that grid values print as written, e.g. 0.3 not 0.30000000000000004.
        (0..self.points)
            .map(|i| ((self.lo + i as f64 * self.step) * 1e9).round() / 1e9)
            .collect()
    }

    pub fn file_name(&self) -> String {
        format!("panel_{}_{}.csv", self.label, self.family)
    }
}

/// Grids span the Benford point and run out to where the smooth tests reach
/// power near one, as located with the analytic power approximation.
pub const PANELS: [Panel; 6] = [
    Panel { label: 'a', family: Family::Rodriguez, n: 250, lo: -3.0, step: 0.25, points: 17 },
    Panel { label: 'b', family: Family::Pietronero, n: 50, lo: 0.2, step: 0.1, points: 19 },
    Panel { label: 'c', family: Family::Hurlimann, n: 750, lo: 0.6, step: 0.2, points: 13 },
    Panel { label: 'd', family: Family::Mixture, n: 500, lo: 0.0, step: 0.025, points: 17 },
    Panel { label: 'e', family: Family::Contaminated1, n: 500, lo: 0.0, step: 0.005, points: 17 },
    Panel { label: 'f', family: Family::Contaminated2, n: 500, lo: -2.0, step: 1.0, points: 21 },
];

pub fn panel_for(family: Family) -> &'static Panel {
    PANELS.iter().find(|p| p.family == family).expect("every family has a panel")
}

#[derive(Debug, Clone, Copy)]
pub struct FigureConfig {
    pub replications: usize,
    pub null_replications: usize,
    pub seed: u64,
    pub alpha: f64,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct PanelResult {
    pub panel: Panel,
    pub curves: Vec<PowerCurve>,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub panels: Vec<PanelResult>,
    /// Critical values by sample size, in battery order.
    pub critical_values: BTreeMap<u64, Vec<CriticalValueRecord>>,
}

impl Figure {
    pub fn panel(&self, label: char) -> &PanelResult {
        self.panels.iter().find(|p| p.panel.label == label).expect("known panel label")
    }
}

impl PanelResult {
    pub fn curve(&self, statistic: Statistic) -> &PowerCurve {
        let id = statistic.id();
        self.curves.iter().find(|c| c.test_id == id).expect("statistic in battery")
    }
}

pub fn compute(config: &FigureConfig, mut cache: Option<&mut CriticalValueCache>) -> Result<Figure, CliError> {
    let tests = Statistic::DEFAULT_BATTERY;
    let mut criticals: BTreeMap<u64, Vec<CriticalValueRecord>> = BTreeMap::new();
    let mut panels = Vec::with_capacity(PANELS.len());
    for panel in PANELS {
        if let Entry::Vacant(slot) = criticals.entry(panel.n) {
            let null_config = McConfig {
                replications: config.null_replications,
                master_seed: config.seed,
                n: panel.n,
                alpha: config.alpha,
                workers: config.workers,
            };
            slot.insert(critical_values(&tests, &null_config, cache.as_deref_mut())?);
        }
        let power_config = McConfig {
            replications: config.replications,
            master_seed: config.seed,
            n: panel.n,
            alpha: config.alpha,
            workers: config.workers,
        };
        let curves = power_curve(&tests, panel.family, &panel.grid(), &power_config, &criticals[&panel.n])?;
        panels.push(PanelResult { panel, curves });
    }
    Ok(Figure {
        panels,
        critical_values: criticals,
    })
}

#[derive(Serialize)]
struct ManifestPanel {
    panel: String,
    family: Family,
    n: u64,
    file: String,
    grid: Vec<f64>,
}

/// Contents depend only on the inputs that determine the curves, so reruns
/// with the same seed reproduce every file byte for byte.
#[derive(Serialize)]
struct Manifest {
    schema_version: u32,
    seed: u64,
    alpha: f64,
    replications: usize,
    null_replications: usize,
    tests: Vec<Statistic>,
    panels: Vec<ManifestPanel>,
    critical_values: Vec<CriticalValueRecord>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn write(figure: &Figure, config: &FigureConfig, dir: &Path) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    for result in &figure.panels {
        let path = dir.join(result.panel.file_name());
        let file = fs::File::create(&path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        write_power_csv(file, &result.curves, config.seed)?;
    }
    let manifest = Manifest {
        schema_version: crate::report::SCHEMA_VERSION,
        seed: config.seed,
        alpha: config.alpha,
        replications: config.replications,
        null_replications: config.null_replications,
        tests: Statistic::DEFAULT_BATTERY.to_vec(),
        panels: figure
            .panels
            .iter()
            .map(|r| ManifestPanel {
                panel: r.panel.label.to_string(),
                family: r.panel.family,
                n: r.panel.n,
                file: r.panel.file_name(),
                grid: r.panel.grid(),
            })
            .collect(),
        critical_values: figure.critical_values.values().flatten().cloned().collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join(MANIFEST_FILE), text).map_err(io)
}
