//! Cells, the node-channel and node-directional matrices, and conflict checks.
//!
//! A [`Schedule`] holds the cells a node (or the whole network) owns, plus
//! foreign cells learned from neighbours' adverts. Foreign cells constrain
//! allocation but cannot be deallocated locally. Both matrices are views
//! derived from `owned ∪ foreign` and are kept in step on every mutation.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::antenna::{opposite_beam, AntennaMode, BeamConfig, BeamIndex, ConflictKind, InterferenceModel, Transmission};
use crate::error::{Error, Result};
use crate::topology::{Locate, NodeId, Topology};

pub const DEFAULT_SLOTFRAME_LENGTH: u16 = 16;
pub const DEFAULT_CHANNELS: u16 = 16;

/// One (timeslot, channel offset) reservation for a directed link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub slot: u16,
    pub channel: u16,
    pub tx: NodeId,
    pub rx: NodeId,
    /// `(tx_beam, rx_beam)`; absent in omni mode.
    pub beams: Option<(BeamIndex, BeamIndex)>,
}

impl Cell {
    pub fn omni(slot: u16, channel: u16, tx: NodeId, rx: NodeId) -> Self {
        Cell { slot, channel, tx, rx, beams: None }
    }

    pub fn with_transmission(slot: u16, channel: u16, t: Transmission) -> Self {
        Cell { slot, channel, tx: t.tx, rx: t.rx, beams: t.beams }
    }

    pub fn transmission(&self) -> Transmission {
        Transmission { tx: self.tx, rx: self.rx, beams: self.beams }
    }

    pub fn involves(&self, node: NodeId) -> bool {
        self.tx == node || self.rx == node
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Tx,
    Rx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChannelEntry {
    pub node: NodeId,
    pub slot: u16,
    pub channel: u16,
    pub role: Role,
    pub peer: NodeId,
}

/// Per-node, per-(slot, channel) occupancy.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChannelMatrix {
    entries: BTreeSet<ChannelEntry>,
}

impl ChannelMatrix {
    pub fn from_cells<'a>(cells: impl IntoIterator<Item = &'a Cell>) -> Self {
        let mut m = Self::default();
        for c in cells {
            m.insert(c);
        }
        m
    }

    fn entries_of(cell: &Cell) -> [ChannelEntry; 2] {
        let e = |node, role, peer| ChannelEntry { node, slot: cell.slot, channel: cell.channel, role, peer };
        [e(cell.tx, Role::Tx, cell.rx), e(cell.rx, Role::Rx, cell.tx)]
    }

    fn insert(&mut self, cell: &Cell) {
        self.entries.extend(Self::entries_of(cell));
    }

    fn remove(&mut self, cell: &Cell) {
        for e in Self::entries_of(cell) {
            self.entries.remove(&e);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &ChannelEntry> {
        self.entries.iter()
    }

    pub fn occupancy(&self, node: NodeId) -> impl Iterator<Item = &ChannelEntry> {
        self.entries.iter().filter(move |e| e.node == node)
    }

    pub fn role(&self, node: NodeId, slot: u16, channel: u16) -> Option<Role> {
        self.occupancy(node).find(|e| e.slot == slot && e.channel == channel).map(|e| e.role)
    }

    /// Whether `node` transmits or receives anywhere in `slot`.
    pub fn busy_in_slot(&self, node: NodeId, slot: u16) -> bool {
        self.occupancy(node).any(|e| e.slot == slot)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BeamEntry {
    pub node: NodeId,
    pub toward: NodeId,
    pub beam: BeamIndex,
    pub slot: u16,
    pub channel: u16,
}

/// Which beam each node points at each scheduled peer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirectionalMatrix {
    entries: BTreeSet<BeamEntry>,
}

impl DirectionalMatrix {
    pub fn from_cells<'a>(cells: impl IntoIterator<Item = &'a Cell>) -> Self {
        let mut m = Self::default();
        for c in cells {
            m.insert(c);
        }
        m
    }

    fn entries_of(cell: &Cell) -> Option<[BeamEntry; 2]> {
        let (tb, rb) = cell.beams?;
        let e = |node, toward, beam| BeamEntry { node, toward, beam, slot: cell.slot, channel: cell.channel };
        Some([e(cell.tx, cell.rx, tb), e(cell.rx, cell.tx, rb)])
    }

    fn insert(&mut self, cell: &Cell) {
        if let Some(es) = Self::entries_of(cell) {
            self.entries.extend(es);
        }
    }

    fn remove(&mut self, cell: &Cell) {
        if let Some(es) = Self::entries_of(cell) {
            for e in es {
                self.entries.remove(&e);
            }
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &BeamEntry> {
        self.entries.iter()
    }

    /// Beam `node` uses towards `toward`, if any cell pairs them.
    pub fn beam(&self, node: NodeId, toward: NodeId) -> Option<BeamIndex> {
        self.entries.iter().find(|e| e.node == node && e.toward == toward).map(|e| e.beam)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConfig {
    pub mode: AntennaMode,
    pub slotframe_length: u16,
    pub num_channels: u16,
    pub beams: BeamConfig,
    /// Interference range as a multiple of the communication radius.
    pub interference_factor: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            mode: AntennaMode::Directional,
            slotframe_length: DEFAULT_SLOTFRAME_LENGTH,
            num_channels: DEFAULT_CHANNELS,
            beams: BeamConfig::default(),
            interference_factor: 1.0,
        }
    }
}

/// A clash between a candidate and an existing cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Conflict {
    pub with: Cell,
    pub kind: ConflictKind,
    /// The clashing cell was learned from an advert.
    pub foreign: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdvertDiagnostic {
    OutOfBounds(Cell),
    Conflicting { cell: Cell, conflicts: Vec<Conflict> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    config: ScheduleConfig,
    cells: BTreeSet<Cell>,
    foreign: BTreeSet<Cell>,
    channel_matrix: ChannelMatrix,
    directional_matrix: DirectionalMatrix,
}

impl Schedule {
    pub fn new(config: ScheduleConfig) -> Self {
        Schedule {
            config,
            cells: BTreeSet::new(),
            foreign: BTreeSet::new(),
            channel_matrix: ChannelMatrix::default(),
            directional_matrix: DirectionalMatrix::default(),
        }
    }

    pub fn config(&self) -> &ScheduleConfig {
        &self.config
    }

    pub fn mode(&self) -> AntennaMode {
        self.config.mode
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter()
    }

    pub fn foreign_cells(&self) -> impl Iterator<Item = &Cell> {
        self.foreign.iter()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.cells.contains(cell)
    }

    pub fn channel_matrix(&self) -> &ChannelMatrix {
        &self.channel_matrix
    }

    pub fn directional_matrix(&self) -> &DirectionalMatrix {
        &self.directional_matrix
    }

    pub fn cells_in_slot(&self, slot: u16) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(move |c| c.slot == slot)
    }

    /// `1 + max slot` over owned cells; 0 when empty.
    pub fn schedule_length(&self) -> u16 {
        self.cells.iter().map(|c| c.slot + 1).max().unwrap_or(0)
    }

    fn model(&self, range: f64) -> InterferenceModel {
        InterferenceModel::new(self.config.mode, self.config.beams, range)
    }

    fn check_shape(&self, cell: &Cell) -> Result<()> {
        if cell.slot >= self.config.slotframe_length {
            return Err(Error::MalformedCell("slot beyond slotframe"));
        }
        if cell.channel >= self.config.num_channels {
            return Err(Error::MalformedCell("channel offset beyond channel count"));
        }
        if cell.tx == cell.rx {
            return Err(Error::MalformedCell("sender and receiver coincide"));
        }
        match (self.config.mode, cell.beams) {
            (AntennaMode::Omni, Some(_)) => Err(Error::MalformedCell("beams given in omni mode")),
            (AntennaMode::Directional, None) => Err(Error::MalformedCell("missing beams in directional mode")),
            (AntennaMode::Directional, Some((tb, rb))) => {
                let m = self.config.beams.sectors();
                if tb.value() == 0 || tb.value() > m || rb.value() == 0 || rb.value() > m {
                    return Err(Error::MalformedCell("beam index beyond sector count"));
                }
                if m.is_multiple_of(2) && opposite_beam(tb, self.config.beams)? != rb {
                    return Err(Error::MalformedCell("receiver beam does not face sender"));
                }
                Ok(())
            }
            (AntennaMode::Omni, None) => Ok(()),
        }
    }

    /// Conflicts between `candidate` and every known cell, using `locate`
    /// for positions and `range` as the interference range.
    pub fn conflicts_with(&self, candidate: &Cell, locate: &impl Locate, range: f64) -> Result<Vec<Conflict>> {
        self.check_shape(candidate)?;
        for n in [candidate.tx, candidate.rx] {
            if locate.locate(n).is_none() {
                return Err(Error::UnknownNode(n));
            }
        }
        let model = self.model(range);
        let cand = candidate.transmission();
        let mut out = Vec::new();
        let known = self.cells.iter().map(|c| (c, false)).chain(self.foreign.iter().map(|c| (c, true)));
        for (cell, foreign) in known {
            if cell.slot != candidate.slot {
                continue;
            }
            let kind = if cell.transmission().shares_node_with(&cand) {
                // half-duplex: one transceiver, so this spans every channel
                Some(ConflictKind::Primary)
            } else if cell.channel == candidate.channel {
                model.conflict(&cand, &cell.transmission(), locate)
            } else {
                None
            };
            if let Some(kind) = kind {
                out.push(Conflict { with: *cell, kind, foreign });
            }
        }
        Ok(out)
    }

    pub fn conflicts(&self, candidate: &Cell, topology: &Topology) -> Result<Vec<Conflict>> {
        self.conflicts_with(candidate, topology, topology.radius() * self.config.interference_factor)
    }

    pub fn allocate_with(&mut self, candidate: Cell, locate: &impl Locate, range: f64) -> Result<()> {
        let conflicts = self.conflicts_with(&candidate, locate, range)?;
        if !conflicts.is_empty() {
            return Err(Error::Conflict(conflicts));
        }
        self.cells.insert(candidate);
        self.channel_matrix.insert(&candidate);
        self.directional_matrix.insert(&candidate);
        Ok(())
    }

    pub fn allocate(&mut self, candidate: Cell, topology: &Topology) -> Result<()> {
        self.allocate_with(candidate, topology, topology.radius() * self.config.interference_factor)
    }

    pub fn deallocate(&mut self, cell: &Cell) -> Result<()> {
        if !self.cells.remove(cell) {
            return Err(Error::CellNotFound);
        }
        self.channel_matrix.remove(cell);
        self.directional_matrix.remove(cell);
        Ok(())
    }

    /// Records a neighbour's advertised cells as foreign constraints.
    /// Idempotent. Foreign cells that clash with what is already known are
    /// still recorded and reported back as diagnostics.
    pub fn merge_advert_with<'a>(
        &mut self,
        advert: impl IntoIterator<Item = &'a Cell>,
        locate: &impl Locate,
        range: f64,
    ) -> Vec<AdvertDiagnostic> {
        let mut diagnostics = Vec::new();
        for cell in advert {
            if self.cells.contains(cell) || self.foreign.contains(cell) {
                continue;
            }
            if self.check_shape(cell).is_err() {
                diagnostics.push(AdvertDiagnostic::OutOfBounds(*cell));
                continue;
            }
            if let Ok(conflicts) = self.conflicts_with(cell, locate, range) {
                if !conflicts.is_empty() {
                    diagnostics.push(AdvertDiagnostic::Conflicting { cell: *cell, conflicts });
                }
            }
            self.foreign.insert(*cell);
            self.channel_matrix.insert(cell);
            self.directional_matrix.insert(cell);
        }
        diagnostics
    }

    pub fn merge_advert<'a>(&mut self, advert: impl IntoIterator<Item = &'a Cell>, topology: &Topology) -> Vec<AdvertDiagnostic> {
        let range = topology.radius() * self.config.interference_factor;
        self.merge_advert_with(advert, topology, range)
    }

    /// Every known cell, owned first.
    pub fn known_cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().chain(self.foreign.iter())
    }
}

/// A pair of owned cells that must not coexist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub a: Cell,
    pub b: Cell,
    pub kind: ConflictKind,
}

/// Exhaustive pairwise audit of a cell set under `model`. Independent of the
/// incremental checks in [`Schedule::allocate`].
pub fn audit<'a>(cells: impl IntoIterator<Item = &'a Cell>, model: &InterferenceModel, locate: &impl Locate) -> Vec<Violation> {
    let cells: Vec<&Cell> = cells.into_iter().collect();
    let mut out = Vec::new();
    for (i, a) in cells.iter().enumerate() {
        for b in &cells[i + 1..] {
            if a.slot != b.slot {
                continue;
            }
            let ta = a.transmission();
            let tb = b.transmission();
            let kind = if ta.shares_node_with(&tb) {
                Some(ConflictKind::Primary)
            } else if a.channel == b.channel {
                model.conflict(&ta, &tb, locate)
            } else {
                None
            };
            if let Some(kind) = kind {
                out.push(Violation { a: **a, b: **b, kind });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{Area, Position};
    use alloc::vec;

    /// Sink n0 with children n1..n3 in mutual range; n4 and n10 hang off n1
    /// and n3 respectively. Ids between are placeholders far away.
    fn three_link_fixture() -> Topology {
        let mut p = vec![Position::new(900.0, 900.0); 11];
        let at = |x: f64, y: f64| Position::new(x + 500.0, y + 500.0);
        p[0] = at(0.0, 0.0);
        p[1] = at(-50.0, 30.0);
        p[2] = at(-40.0, -10.0);
        p[3] = at(-50.0, -40.0);
        p[4] = at(-120.0, 0.0);
        p[10] = at(-20.0, -130.0);
        for (i, q) in p.iter_mut().enumerate().take(10).skip(5) {
            *q = Position::new(950.0, 50.0 + 90.0 * i as f64);
        }
        Topology::from_positions(Area::new(1000.0, 1000.0), 100.0, p).unwrap()
    }

    fn cfg(mode: AntennaMode, channels: u16) -> ScheduleConfig {
        ScheduleConfig { mode, num_channels: channels, ..ScheduleConfig::default() }
    }

    fn link(topo: &Topology, mode: AntennaMode, slot: u16, tx: u16, rx: u16) -> Cell {
        match mode {
            AntennaMode::Omni => Cell::omni(slot, 0, NodeId(tx), NodeId(rx)),
            AntennaMode::Directional => {
                let t = Transmission::aimed(NodeId(tx), NodeId(rx), topo, BeamConfig::default()).unwrap();
                Cell::with_transmission(slot, 0, t)
            }
        }
    }

    #[test]
    fn empty_schedule_has_no_conflicts() {
        let t = three_link_fixture();
        let s = Schedule::new(cfg(AntennaMode::Directional, 1));
        assert!(s.conflicts(&link(&t, AntennaMode::Directional, 0, 2, 0), &t).unwrap().is_empty());
        assert_eq!(s.schedule_length(), 0);
    }

    #[test]
    fn fixture_beams_match_the_three_link_pattern() {
        let t = three_link_fixture();
        let beams = |tx, rx| link(&t, AntennaMode::Directional, 0, tx, rx).beams.map(|(a, b)| (a.value(), b.value()));
        assert_eq!(beams(2, 0), Some((1, 3)));
        assert_eq!(beams(4, 1), Some((1, 3)));
        assert_eq!(beams(10, 3), Some((2, 4)));
    }

    #[test]
    fn omni_reports_secondary_conflict() {
        let t = three_link_fixture();
        let mut s = Schedule::new(cfg(AntennaMode::Omni, 1));
        s.allocate(link(&t, AntennaMode::Omni, 0, 2, 0), &t).unwrap();
        let c = s.conflicts(&link(&t, AntennaMode::Omni, 0, 4, 1), &t).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].kind, ConflictKind::SecondaryOmni);
        assert_eq!(c[0].with, link(&t, AntennaMode::Omni, 0, 2, 0));
        assert!(!c[0].foreign);
    }

    #[test]
    fn directional_three_links_share_one_cell() {
        let t = three_link_fixture();
        let mut s = Schedule::new(cfg(AntennaMode::Directional, 1));
        for (tx, rx) in [(2, 0), (4, 1), (10, 3)] {
            s.allocate(link(&t, AntennaMode::Directional, 0, tx, rx), &t).unwrap();
        }
        assert_eq!(s.schedule_length(), 1);
    }

    #[test]
    fn omni_three_links_need_three_slots() {
        let t = three_link_fixture();
        // exhaustive minimal colouring: try every slot assignment in 0..k
        let links = [(2, 0), (4, 1), (10, 3)];
        let mut best = u16::MAX;
        for a in 0..3u16 {
            for b in 0..3u16 {
                for c in 0..3u16 {
                    let mut s = Schedule::new(cfg(AntennaMode::Omni, 1));
                    let ok = [a, b, c]
                        .iter()
                        .zip(links)
                        .all(|(&slot, (tx, rx))| s.allocate(link(&t, AntennaMode::Omni, slot, tx, rx), &t).is_ok());
                    if ok {
                        best = best.min(s.schedule_length().max(a.max(b).max(c) + 1));
                    }
                }
            }
        }
        assert_eq!(best, 3);
    }

    #[test]
    fn primary_conflict_spans_channels() {
        let t = three_link_fixture();
        let mut s = Schedule::new(cfg(AntennaMode::Omni, 4));
        s.allocate(Cell::omni(3, 0, NodeId(2), NodeId(0)), &t).unwrap();
        let c = s.conflicts(&Cell::omni(3, 2, NodeId(1), NodeId(0)), &t).unwrap();
        assert_eq!(c[0].kind, ConflictKind::Primary);
        assert!(s.conflicts(&Cell::omni(4, 2, NodeId(1), NodeId(0)), &t).unwrap().is_empty());
    }

    #[test]
    fn allocation_round_trip_restores_schedule() {
        let t = three_link_fixture();
        let mut s = Schedule::new(cfg(AntennaMode::Directional, 2));
        s.allocate(link(&t, AntennaMode::Directional, 0, 2, 0), &t).unwrap();
        let before = s.clone();
        let extra = link(&t, AntennaMode::Directional, 1, 4, 1);
        s.allocate(extra, &t).unwrap();
        s.deallocate(&extra).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn deallocating_missing_cell_fails() {
        let t = three_link_fixture();
        let mut s = Schedule::new(cfg(AntennaMode::Omni, 1));
        assert_eq!(s.deallocate(&link(&t, AntennaMode::Omni, 0, 2, 0)), Err(Error::CellNotFound));
    }

    #[test]
    fn saturated_endpoints_reject_more_cells() {
        let t = three_link_fixture();
        let config = ScheduleConfig { slotframe_length: 3, ..cfg(AntennaMode::Omni, 2) };
        let mut s = Schedule::new(config);
        for slot in 0..3 {
            for ch in 0..2 {
                let c = Cell::omni(slot, ch, NodeId(2), NodeId(0));
                // the second channel in each slot is already a primary conflict
                let r = s.allocate(c, &t);
                assert_eq!(r.is_ok(), ch == 0);
            }
        }
        for slot in 0..3 {
            for ch in 0..2 {
                assert!(matches!(s.allocate(Cell::omni(slot, ch, NodeId(2), NodeId(0)), &t), Err(Error::Conflict(_))));
            }
        }
    }

    #[test]
    fn malformed_cells_are_rejected() {
        let t = three_link_fixture();
        let s = Schedule::new(cfg(AntennaMode::Omni, 1));
        assert!(matches!(s.conflicts(&Cell::omni(16, 0, NodeId(2), NodeId(0)), &t), Err(Error::MalformedCell(_))));
        assert!(matches!(s.conflicts(&Cell::omni(0, 1, NodeId(2), NodeId(0)), &t), Err(Error::MalformedCell(_))));
        assert!(matches!(s.conflicts(&Cell::omni(0, 0, NodeId(2), NodeId(2)), &t), Err(Error::MalformedCell(_))));
        assert_eq!(s.conflicts(&Cell::omni(0, 0, NodeId(2), NodeId(40)), &t), Err(Error::UnknownNode(NodeId(40))));
        let d = Schedule::new(cfg(AntennaMode::Directional, 1));
        assert!(d.conflicts(&Cell::omni(0, 0, NodeId(2), NodeId(0)), &t).is_err());
        let mut bad = link(&t, AntennaMode::Directional, 0, 2, 0);
        bad.beams = bad.beams.map(|(tb, _)| (tb, tb));
        assert!(matches!(d.conflicts(&bad, &t), Err(Error::MalformedCell(_))));
    }

    #[test]
    fn advert_merge_is_idempotent_and_constrains() {
        let t = three_link_fixture();
        let advert = [link(&t, AntennaMode::Omni, 0, 2, 0)];
        let mut s = Schedule::new(cfg(AntennaMode::Omni, 1));
        assert!(s.merge_advert(&[], &t).is_empty());
        assert_eq!(s, Schedule::new(cfg(AntennaMode::Omni, 1)));
        s.merge_advert(&advert, &t);
        let once = s.clone();
        s.merge_advert(&advert, &t);
        assert_eq!(s, once);
        assert_eq!(s.schedule_length(), 0);
        let c = s.conflicts(&link(&t, AntennaMode::Omni, 0, 4, 1), &t).unwrap();
        assert!(c[0].foreign);
        assert!(matches!(s.allocate(link(&t, AntennaMode::Omni, 0, 4, 1), &t), Err(Error::Conflict(_))));
        assert_eq!(s.deallocate(&advert[0]), Err(Error::CellNotFound));
    }

    #[test]
    fn conflicting_advert_is_recorded_with_diagnostic() {
        let t = three_link_fixture();
        let mut s = Schedule::new(cfg(AntennaMode::Omni, 1));
        s.allocate(link(&t, AntennaMode::Omni, 0, 2, 0), &t).unwrap();
        let diag = s.merge_advert(&[link(&t, AntennaMode::Omni, 0, 4, 1)], &t);
        assert!(matches!(diag.as_slice(), [AdvertDiagnostic::Conflicting { .. }]));
        assert_eq!(s.foreign_cells().count(), 1);
    }

    #[test]
    fn matrices_track_cells() {
        let t = three_link_fixture();
        let mut s = Schedule::new(cfg(AntennaMode::Directional, 1));
        let c = link(&t, AntennaMode::Directional, 0, 2, 0);
        s.allocate(c, &t).unwrap();
        assert_eq!(s.channel_matrix().role(NodeId(2), 0, 0), Some(Role::Tx));
        assert_eq!(s.channel_matrix().role(NodeId(0), 0, 0), Some(Role::Rx));
        assert!(s.channel_matrix().busy_in_slot(NodeId(0), 0));
        assert_eq!(s.directional_matrix().beam(NodeId(2), NodeId(0)).map(|b| b.value()), Some(1));
        assert_eq!(s.directional_matrix().beam(NodeId(0), NodeId(2)).map(|b| b.value()), Some(3));
        assert_eq!(*s.channel_matrix(), ChannelMatrix::from_cells(s.cells()));
        assert_eq!(*s.directional_matrix(), DirectionalMatrix::from_cells(s.cells()));
    }
}
