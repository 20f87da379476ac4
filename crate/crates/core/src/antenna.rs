//! Switched-beam antenna geometry and the interference predicates built on it.
//!
//! Azimuth is measured counterclockwise from east. With `M` sectors of width
//! `360/M` degrees, beam `k` (1-indexed) covers the half-open interval
//! `[(k-1)·360/M, k·360/M)`, so for the default `M = 4` beam 1 faces east,
//! beam 2 north, beam 3 west and beam 4 south. Sectors have no side lobes:
//! coverage is exactly "in range and inside the active sector".

use core::f64::consts::TAU;
use core::fmt;

use crate::error::{Error, Result};
use crate::topology::{Locate, NodeId, Position, Topology};

pub const DEFAULT_SECTORS: u16 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BeamConfig {
    sectors: u16,
}

impl BeamConfig {
    pub fn new(sectors: u16) -> Result<Self> {
        if sectors < 2 {
            return Err(Error::Config(alloc::format!(
                "need at least 2 beam sectors, got {sectors}"
            )));
        }
        Ok(BeamConfig { sectors })
    }

    /// Like [`BeamConfig::new`], additionally rejecting odd sector counts, for
    /// which a receiver beam facing back at the sender is undefined.
    pub fn paired(sectors: u16) -> Result<Self> {
        let cfg = Self::new(sectors)?;
        if !sectors.is_multiple_of(2) {
            return Err(Error::OddSectorCount(sectors));
        }
        Ok(cfg)
    }

    pub fn sectors(self) -> u16 {
        self.sectors
    }

    pub fn beam_width_deg(self) -> f64 {
        360.0 / f64::from(self.sectors)
    }

    pub fn beams(self) -> impl Iterator<Item = BeamIndex> {
        (1..=self.sectors).map(BeamIndex)
    }
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig { sectors: DEFAULT_SECTORS }
    }
}

/// 1-indexed beam (sector) number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BeamIndex(u16);

impl BeamIndex {
    pub fn new(value: u16, config: BeamConfig) -> Result<Self> {
        if value == 0 || value > config.sectors {
            return Err(Error::Config(alloc::format!(
                "beam {value} outside 1..={}",
                config.sectors
            )));
        }
        Ok(BeamIndex(value))
    }

    pub fn value(self) -> u16 {
        self.0
    }
}

impl fmt::Display for BeamIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Azimuth from `from` towards `to` in radians, normalized to `[0, 2π)`.
pub fn azimuth(from: Position, to: Position) -> Result<f64> {
    let (dx, dy) = (to.x - from.x, to.y - from.y);
    if dx == 0.0 && dy == 0.0 {
        return Err(Error::UndefinedDirection);
    }
    let mut a = libm::atan2(dy, dx);
    if a < 0.0 {
        a += TAU;
    }
    if a >= TAU {
        a = 0.0;
    }
    Ok(a)
}

pub fn beam_of(from: Position, to: Position, config: BeamConfig) -> Result<BeamIndex> {
    let a = azimuth(from, to)?;
    let m = config.sectors;
    let sector = libm::floor(a * f64::from(m) / TAU) as u16;
    Ok(BeamIndex(sector.min(m - 1) + 1))
}

pub fn opposite_beam(beam: BeamIndex, config: BeamConfig) -> Result<BeamIndex> {
    let m = config.sectors;
    if !m.is_multiple_of(2) {
        return Err(Error::OddSectorCount(m));
    }
    Ok(BeamIndex((beam.0 - 1 + m / 2) % m + 1))
}

/// Whether a node at `observer` radiating on `active_beam` reaches `target`.
pub fn covers(
    observer: Position,
    active_beam: BeamIndex,
    target: Position,
    config: BeamConfig,
    radius: f64,
) -> bool {
    observer.distance_to(target) <= radius
        && beam_of(observer, target, config).is_ok_and(|b| b == active_beam)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AntennaMode {
    Omni,
    #[default]
    Directional,
}

impl AntennaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AntennaMode::Omni => "omni",
            AntennaMode::Directional => "directional",
        }
    }
}

impl fmt::Display for AntennaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for AntennaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omni" => Ok(AntennaMode::Omni),
            "directional" | "dir" => Ok(AntennaMode::Directional),
            other => Err(Error::Config(alloc::format!("unknown antenna mode {other:?}"))),
        }
    }
}

/// One link activation: sender, receiver and (in directional mode) the beam
/// each side points at the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transmission {
    pub tx: NodeId,
    pub rx: NodeId,
    pub beams: Option<(BeamIndex, BeamIndex)>,
}

impl Transmission {
    pub fn omni(tx: NodeId, rx: NodeId) -> Self {
        Transmission { tx, rx, beams: None }
    }

    pub fn directional(tx: NodeId, rx: NodeId, tx_beam: BeamIndex, rx_beam: BeamIndex) -> Self {
        Transmission { tx, rx, beams: Some((tx_beam, rx_beam)) }
    }

    /// Beams from geometry: the sender points at the receiver, the receiver
    /// points back. With an even sector count the receiver beam is the
    /// sender beam's opposite, which keeps the pair consistent even when the
    /// reverse azimuth rounds across a sector edge.
    pub fn aimed(tx: NodeId, rx: NodeId, locate: &impl Locate, config: BeamConfig) -> Result<Self> {
        let ptx = locate.locate(tx).ok_or(Error::UnknownNode(tx))?;
        let prx = locate.locate(rx).ok_or(Error::UnknownNode(rx))?;
        let tx_beam = beam_of(ptx, prx, config)?;
        let rx_beam = match opposite_beam(tx_beam, config) {
            Ok(b) => b,
            Err(_) => beam_of(prx, ptx, config)?,
        };
        Ok(Self::directional(tx, rx, tx_beam, rx_beam))
    }

    pub fn shares_node_with(&self, other: &Transmission) -> bool {
        self.tx == other.tx || self.tx == other.rx || self.rx == other.tx || self.rx == other.rx
    }

    pub fn involves(&self, node: NodeId) -> bool {
        self.tx == node || self.rx == node
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConflictKind {
    /// A node would transmit and receive at once, or take part in two links.
    Primary,
    /// An omni sender is in range of the other link's receiver.
    SecondaryOmni,
    /// A directional sender's active beam reaches the other link's receiver.
    SecondaryDirectional,
}

impl ConflictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConflictKind::Primary => "primary",
            ConflictKind::SecondaryOmni => "secondary-omni",
            ConflictKind::SecondaryDirectional => "secondary-directional",
        }
    }
}

/// Conflict predicate for concurrent transmissions on one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceModel {
    pub mode: AntennaMode,
    pub beams: BeamConfig,
    /// Interference range in meters.
    pub range: f64,
}

impl InterferenceModel {
    pub fn new(mode: AntennaMode, beams: BeamConfig, range: f64) -> Self {
        InterferenceModel { mode, beams, range }
    }

    /// Interference range equal to the communication radius times `factor`.
    pub fn for_topology(mode: AntennaMode, beams: BeamConfig, topology: &Topology, factor: f64) -> Self {
        Self::new(mode, beams, topology.radius() * factor)
    }

    /// Whether `sender`'s radiation reaches `victim`. Falls back to omni
    /// radiation when the model is directional but the link has no beams.
    fn reaches(&self, sender: NodeId, beam: Option<BeamIndex>, victim: NodeId, locate: &impl Locate) -> bool {
        let (Some(ps), Some(pv)) = (locate.locate(sender), locate.locate(victim)) else {
            return false;
        };
        match (self.mode, beam) {
            (AntennaMode::Directional, Some(b)) => covers(ps, b, pv, self.beams, self.range),
            _ => ps.distance_to(pv) <= self.range,
        }
    }

    /// The strongest conflict between `a` and `b` if both were active on the
    /// same channel in the same slot, or `None` if they can coexist.
    pub fn conflict(&self, a: &Transmission, b: &Transmission, locate: &impl Locate) -> Option<ConflictKind> {
        if a.shares_node_with(b) {
            return Some(ConflictKind::Primary);
        }
        let a_hits_b = self.reaches(a.tx, a.beams.map(|x| x.0), b.rx, locate);
        let b_hits_a = self.reaches(b.tx, b.beams.map(|x| x.0), a.rx, locate);
        if !(a_hits_b || b_hits_a) {
            return None;
        }
        match self.mode {
            AntennaMode::Omni => Some(ConflictKind::SecondaryOmni),
            AntennaMode::Directional => Some(ConflictKind::SecondaryDirectional),
        }
    }
}

/// Directional-mode conflict between two fully specified transmissions, with
/// interference range equal to the topology radius.
pub fn directional_conflict(a: &Transmission, b: &Transmission, topology: &Topology, config: BeamConfig) -> bool {
    InterferenceModel::for_topology(AntennaMode::Directional, config, topology, 1.0)
        .conflict(a, b, topology)
        .is_some()
}

/// Omni-mode counterpart of [`directional_conflict`].
pub fn omni_conflict(a: &Transmission, b: &Transmission, topology: &Topology) -> bool {
    InterferenceModel::for_topology(AntennaMode::Omni, BeamConfig::default(), topology, 1.0)
        .conflict(a, b, topology)
        .is_some()
}
