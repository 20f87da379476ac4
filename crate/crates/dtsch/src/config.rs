//! Flat `key = value` run configuration.
//!
//! Values are applied in order: built-in defaults, then the config file, then
//! command-line overrides. A later source replaces an earlier one key by key.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use dtsch_core::antenna::BeamConfig;
use dtsch_core::link::dbm_to_watts;
use dtsch_core::scheduler::Routes;
use dtsch_core::sim::TrafficModel;
use dtsch_core::topology::{build_topology, build_tree, Placement, Position, Topology, TopologyConfig};
use dtsch_core::{AntennaMode, SimConfig};

/// Where a setting came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Default,
    File { path: PathBuf, line: usize },
    Flag(String),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Default => f.write_str("defaults"),
            Source::File { path, line } => write!(f, "{}:{}", path.display(), line),
            Source::Flag(name) => write!(f, "--{name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{origin}: {}{message}", key.as_ref().map(|k| format!("{k}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub origin: Source,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn new(source: &Source, key: Option<&str>, message: impl Into<String>) -> Self {
        ConfigError { origin: source.clone(), key: key.map(str::to_owned), message: message.into() }
    }
}

/// Recognised keys with a one-line description each.
pub const KEYS: &[(&str, &str)] = &[
    ("area_width", "deployment area width, m"),
    ("area_height", "deployment area height, m"),
    ("nodes", "number of nodes including the sink"),
    ("radius", "communication radius, m"),
    ("topology_file", "file of `id,x,y` lines fixing every position"),
    ("seed", "seed for placement, traffic and fading"),
    ("mode", "omni or directional"),
    ("duration", "simulated time, s"),
    ("timeslot", "slot length, s"),
    ("mac_rate", "MAC data rate, bit/s"),
    ("packet_bytes", "packet size, bytes"),
    ("traffic", "cbr or poisson"),
    ("rate", "packets per second generated at each non-sink node"),
    ("buffer", "buffer capacity per node, packets"),
    ("channels", "channel offsets"),
    ("beams", "antenna sectors"),
    ("slotframe_length", "maximum data slotframe length, slots"),
    ("adaptive_slotframe", "shrink the slotframe to the negotiated schedule (true/false)"),
    ("reschedule_period", "slotframes between scheduling periods"),
    ("interference_factor", "interference range as a multiple of the radius"),
    ("tx_power_dbm", "transmit power ceiling, dBm"),
    ("path_loss_exponent", "path-loss exponent"),
    ("ber", "target bit error rate"),
    ("timer_base", "contention timer base, micro-ticks"),
    ("ticks_per_slot", "micro-ticks per scheduling slot"),
    ("idle_energy", "energy per idle slot and node, J"),
    ("events", "write the event log (true/false)"),
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub topology: TopologyConfig,
    pub sim: SimConfig,
    pub write_events: bool,
    pub topology_file: Option<PathBuf>,
}

fn parse<T: std::str::FromStr>(value: &str, what: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("expected {what}, got '{value}'"))
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(format!("expected true or false, got '{value}'")),
    }
}

fn parse_mode(value: &str) -> Result<AntennaMode, String> {
    match value {
        "omni" => Ok(AntennaMode::Omni),
        "directional" | "dir" => Ok(AntennaMode::Directional),
        _ => Err(format!("expected omni or directional, got '{value}'")),
    }
}

impl RunConfig {
    /// Applies one setting. `base` resolves relative paths.
    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<(), String> {
        let sim = &mut self.sim;
        let topo = &mut self.topology;
        match key {
            "area_width" => topo.area.width = parse(value, "a length in meters")?,
            "area_height" => topo.area.height = parse(value, "a length in meters")?,
            "nodes" => topo.nodes = parse(value, "a node count")?,
            "radius" => topo.radius = parse(value, "a length in meters")?,
            "topology_file" => {
                let p = PathBuf::from(value);
                self.topology_file = Some(match base {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p,
                });
            }
            "seed" => {
                let seed = parse(value, "an unsigned integer")?;
                topo.seed = seed;
                sim.seed = seed;
            }
            "mode" => sim.mode = parse_mode(value)?,
            "duration" => sim.duration = parse(value, "seconds")?,
            "timeslot" => sim.timeslot = parse(value, "seconds")?,
            "mac_rate" => sim.mac_rate = parse(value, "bits per second")?,
            "packet_bytes" => sim.packet_bytes = parse(value, "a byte count")?,
            "traffic" => {
                let rate = sim.traffic.rate();
                sim.traffic = match value {
                    "cbr" => TrafficModel::Cbr { rate_pps: rate },
                    "poisson" => TrafficModel::Poisson { rate_pps: rate },
                    _ => return Err(format!("expected cbr or poisson, got '{value}'")),
                };
            }
            "rate" => {
                let r = parse(value, "packets per second")?;
                sim.traffic = match sim.traffic {
                    TrafficModel::Cbr { .. } => TrafficModel::Cbr { rate_pps: r },
                    TrafficModel::Poisson { .. } => TrafficModel::Poisson { rate_pps: r },
                };
            }
            "buffer" => sim.buffer_capacity = parse(value, "a packet count")?,
            "channels" => sim.schedule.num_channels = parse(value, "a channel count")?,
            "beams" => {
                let m = parse(value, "a sector count")?;
                sim.schedule.beams = BeamConfig::new(m).map_err(|e| e.to_string())?;
            }
            "slotframe_length" => sim.schedule.slotframe_length = parse(value, "a slot count")?,
            "adaptive_slotframe" => sim.adaptive_slotframe = parse_bool(value)?,
            "reschedule_period" => sim.reschedule_period = parse(value, "a slotframe count")?,
            "interference_factor" => sim.schedule.interference_factor = parse(value, "a number")?,
            "tx_power_dbm" => sim.max_tx_power = dbm_to_watts(parse(value, "dBm")?),
            "path_loss_exponent" => sim.link.path_loss_exponent = parse(value, "a number")?,
            "ber" => sim.link.ber = parse(value, "a probability")?,
            "timer_base" => sim.timer.base_ticks = parse(value, "a tick count")?,
            "ticks_per_slot" => sim.timer.ticks_per_slot = parse(value, "a tick count")?,
            "idle_energy" => sim.idle_energy_per_slot = parse(value, "joules")?,
            "events" => self.write_events = parse_bool(value)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Applies the lines of a config file.
    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<(), ConfigError> {
        let base = path.parent();
        for (i, raw) in text.lines().enumerate() {
            let source = Source::File { path: path.to_owned(), line: i + 1 };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::new(&source, None, format!("expected key = value, got '{line}'")));
            };
            let (key, value) = (key.trim(), value.trim());
            self.set(key, value, base).map_err(|m| ConfigError::new(&source, Some(key), m))?;
        }
        Ok(())
    }

    /// Defaults, then `path` if given, then `overrides` as `(flag, key, value)`.
    pub fn load(path: Option<&Path>, overrides: &[(&str, &str, String)]) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(p) = path {
            let text = fs::read_to_string(p)
                .map_err(|e| ConfigError::new(&Source::File { path: p.to_owned(), line: 0 }, None, e.to_string()))?;
            cfg.apply_text(&text, p)?;
        }
        for (flag, key, value) in overrides {
            cfg.set(key, value, None).map_err(|m| ConfigError::new(&Source::Flag((*flag).into()), Some(key), m))?;
        }
        if let Some(file) = cfg.topology_file.clone() {
            let source = Source::File { path: file.clone(), line: 0 };
            let text = fs::read_to_string(&file).map_err(|e| ConfigError::new(&source, None, e.to_string()))?;
            let positions = parse_topology(&text, &file)?;
            cfg.topology.nodes = positions.len();
            cfg.topology.placement = Placement::Explicit(positions);
        }
        cfg.sim.validate().map_err(|e| ConfigError::new(&Source::Default, None, e.to_string()))?;
        Ok(cfg)
    }

    /// Places the nodes and builds the convergecast tree.
    pub fn network(&self) -> dtsch_core::Result<(Topology, Routes)> {
        let topo = match &self.topology.placement {
            Placement::Explicit(p) => Topology::from_positions(self.topology.area, self.topology.radius, p.clone())?,
            Placement::Uniform { .. } => build_topology(&self.topology)?,
        };
        let tree = build_tree(&topo)?;
        Ok((topo, Routes::from_tree(&tree)))
    }
}

/// Reads `id,x,y` lines. Ids must be exactly `0..n` in any order.
pub fn parse_topology(text: &str, path: &Path) -> Result<Vec<Position>, ConfigError> {
    let mut found: Vec<Option<Position>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let source = Source::File { path: path.to_owned(), line: i + 1 };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [id, x, y] = fields[..] else {
            return Err(ConfigError::new(&source, None, format!("expected id,x,y, got '{line}'")));
        };
        let field = |name: &str, v: &str| -> Result<f64, ConfigError> {
            let value: f64 = v.parse().map_err(|_| ConfigError::new(&source, Some(name), format!("expected a number, got '{v}'")))?;
            if !value.is_finite() {
                return Err(ConfigError::new(&source, Some(name), "must be finite"));
            }
            Ok(value)
        };
        let id: usize = id.parse().map_err(|_| ConfigError::new(&source, Some("id"), format!("expected a node id, got '{id}'")))?;
        let p = Position::new(field("x", x)?, field("y", y)?);
        if id >= found.len() {
            found.resize(id + 1, None);
        }
        if found[id].replace(p).is_some() {
            return Err(ConfigError::new(&source, Some("id"), format!("node {id} listed twice")));
        }
    }
    let source = Source::File { path: path.to_owned(), line: 0 };
    if found.is_empty() {
        return Err(ConfigError::new(&source, None, "no nodes listed"));
    }
    found
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| ConfigError::new(&source, Some("id"), format!("node {i} missing"))))
        .collect()
}
