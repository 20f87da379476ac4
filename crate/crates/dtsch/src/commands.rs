//! The `run`, `compare` and `scenario` commands, minus argument parsing.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::thread;

use dtsch_core::sim::{run as simulate, MetricsReport, SimOutput};
use dtsch_core::AntennaMode;

use crate::config::{ConfigError, RunConfig};
use crate::formats::{events_tsv, links_tsv, nodes_tsv, report_text, schedule_csv};
use crate::scenarios::{self, UnknownScenario, Verdict, SCENARIOS};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Sim(#[from] dtsch_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}; available: {list}", list = available())]
    UnknownScenario(#[from] UnknownScenario),
    #[error("scenario {0} failed")]
    ScenarioFailed(String),
}

fn available() -> String {
    SCENARIOS.iter().map(|s| s.0).collect::<Vec<_>>().join(", ")
}

impl CliError {
    /// 2 for a failed scenario assertion, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ScenarioFailed(_) => 2,
            _ => 1,
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn simulate_mode(cfg: &RunConfig, mode: AntennaMode) -> Result<SimOutput, CliError> {
    let (topo, routes) = cfg.network()?;
    let sim = dtsch_core::SimConfig { mode, ..cfg.sim.clone() };
    Ok(simulate(&sim, &topo, &routes)?)
}

/// Writes `report.txt`, `report_nodes.tsv`, `report_links.tsv`,
/// `schedule.csv` and, if enabled, `events.tsv` into `dir`.
pub fn write_run(cfg: &RunConfig, mode: AntennaMode, out: &SimOutput, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_owned(), source })?;
    let header = [
        ("mode", mode.as_str().to_owned()),
        ("seed", cfg.sim.seed.to_string()),
        ("channels", cfg.sim.schedule.num_channels.to_string()),
        ("beams", cfg.sim.schedule.beams.sectors().to_string()),
    ];
    write(&dir.join("report.txt"), &report_text(&out.report, &header))?;
    write(&dir.join("report_nodes.tsv"), &nodes_tsv(&out.report))?;
    write(&dir.join("report_links.tsv"), &links_tsv(&out.report))?;
    write(&dir.join("schedule.csv"), &schedule_csv(&out.longest_schedule))?;
    if cfg.write_events {
        write(&dir.join("events.tsv"), &events_tsv(&out.log))?;
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.6}"))
}

pub fn summary(mode: AntennaMode, r: &MetricsReport) -> String {
    format!(
        "{mode}: generated {} delivered {} dropped {} | throughput {:.1} bit/s | mean delay {} s | \
         schedule length max {} mean {:.3} | energy {:.6} J",
        r.generated,
        r.delivered,
        r.dropped,
        r.aggregate_throughput,
        fmt_opt(r.mean_delay()),
        r.schedule_length_max,
        r.schedule_length_mean,
        r.total_energy,
    )
}

/// Runs the configured mode and writes its files under `dir`.
pub fn cmd_run(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let mode = cfg.sim.mode;
    let out = simulate_mode(cfg, mode)?;
    write_run(cfg, mode, &out, dir)?;
    Ok(summary(mode, &out.report))
}

/// `directional / omni`, or `None` when the omni value is zero or either
/// side is undefined.
pub fn ratio(directional: Option<f64>, omni: Option<f64>) -> Option<f64> {
    match (directional, omni) {
        (Some(d), Some(o)) if o != 0.0 => Some(d / o),
        _ => None,
    }
}

type Metric = fn(&MetricsReport) -> Option<f64>;

/// Metrics compared side by side, with their extractors.
pub const COMPARED: &[(&str, Metric)] = &[
    ("throughput_bps", |r| Some(r.aggregate_throughput)),
    ("delay_mean_s", |r| r.mean_delay()),
    ("schedule_length_max", |r| Some(f64::from(r.schedule_length_max))),
    ("schedule_length_mean", |r| Some(r.schedule_length_mean)),
    ("total_energy_j", |r| Some(r.total_energy)),
    ("delivery_ratio", |r| r.delivery_ratio()),
];

pub fn compare_table(omni: &MetricsReport, directional: &MetricsReport) -> String {
    let show = |v: Option<f64>| v.map_or_else(|| "n/a".into(), |x| x.to_string());
    let mut out = String::from("metric\tomni\tdirectional\tratio\n");
    for (name, get) in COMPARED {
        let (o, d) = (get(omni), get(directional));
        writeln!(out, "{name}\t{}\t{}\t{}", show(o), show(d), show(ratio(d, o))).unwrap();
    }
    out
}

/// Runs both modes on the same topology, traffic and seed. Each mode's files
/// go to `dir/omni` and `dir/directional`; the table to `dir/compare.txt`.
pub fn cmd_compare(cfg: &RunConfig, dir: &Path) -> Result<String, CliError> {
    let (omni, directional) = thread::scope(|s| {
        let o = s.spawn(|| simulate_mode(cfg, AntennaMode::Omni));
        let d = simulate_mode(cfg, AntennaMode::Directional);
        (o.join().expect("omni run panicked"), d)
    });
    let (omni, directional) = (omni?, directional?);
    write_run(cfg, AntennaMode::Omni, &omni, &dir.join("omni"))?;
    write_run(cfg, AntennaMode::Directional, &directional, &dir.join("directional"))?;
    let table = compare_table(&omni.report, &directional.report);
    write(&dir.join("compare.txt"), &table)?;
    Ok(format!(
        "{}\n{}\n{}",
        summary(AntennaMode::Omni, &omni.report),
        summary(AntennaMode::Directional, &directional.report),
        table.trim_end()
    ))
}

pub fn cmd_scenario(name: &str) -> Result<Verdict, CliError> {
    Ok(scenarios::run(name)?)
}

pub fn list_scenarios() -> String {
    SCENARIOS.iter().map(|(n, d)| format!("{n:<12} {d}\n")).collect()
}
