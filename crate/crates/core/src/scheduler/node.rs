//! Per-node scheduling state machine.
//!
//! A node only ever sees its own state plus the messages it physically
//! hears. Its adjacency table holds neighbour positions (from discovery and
//! message payloads), the modes neighbours announced this round, and a local
//! [`Schedule`] with its own cells and every reservation it overheard.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::antenna::{AntennaMode, Transmission};
use crate::schedule::{Cell, Schedule, ScheduleConfig};
use crate::topology::{NodeId, Position};

use super::message::{MessageKind, Payload, Reservation, SchedMessage};
use super::timer::{timer_value, TimerPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Idle,
    Timing,
    Sending,
    Receiving,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Idle => "idle",
            Mode::Timing => "timing",
            Mode::Sending => "sending",
            Mode::Receiving => "receiving",
        }
    }
}

/// What a node believes about its parent in the current round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParentState {
    Unknown,
    Available,
    /// Parent is transmitting, or already accepted another child.
    Busy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyTable {
    pub positions: BTreeMap<NodeId, Position>,
    pub receiving: BTreeMap<NodeId, u16>,
    pub cells: Schedule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MessageError {
    PayloadMismatch(MessageKind),
    BeamsInconsistent,
    NonFinitePosition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSchedState {
    pub id: NodeId,
    pub position: Position,
    pub level: u32,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub mode: Mode,
    /// Tick at which the running timer expires, within the current phase.
    pub timer: Option<u32>,
    pub backlog_packets: u32,
    /// Cells still wanted towards the parent.
    pub demand: u32,
    pub round: u16,
    pub parent_state: ParentState,
    /// Uplink cell requested and awaiting CTS, or confirmed this round.
    pub pending: Option<Cell>,
    pub confirmed: Option<Cell>,
    /// Child cell accepted as receiver this round.
    pub accepted: Option<Cell>,
    pub adjacency: AdjacencyTable,
    range: f64,
}

impl NodeSchedState {
    /// `neighbors` is the discovery result: ids and positions of nodes in range.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: NodeId,
        position: Position,
        level: u32,
        parent: Option<NodeId>,
        children: Vec<NodeId>,
        neighbors: &[(NodeId, Position)],
        backlog_packets: u32,
        demand: u32,
        schedule: ScheduleConfig,
        range: f64,
    ) -> Self {
        let mut positions: BTreeMap<NodeId, Position> = neighbors.iter().copied().collect();
        positions.insert(id, position);
        NodeSchedState {
            id,
            position,
            level,
            parent,
            children,
            mode: Mode::Idle,
            timer: None,
            backlog_packets,
            demand,
            round: 0,
            parent_state: ParentState::Unknown,
            pending: None,
            confirmed: None,
            accepted: None,
            adjacency: AdjacencyTable {
                positions,
                receiving: BTreeMap::new(),
                cells: Schedule::new(schedule),
            },
            range,
        }
    }

    pub fn is_root(&self) -> bool {
        self.parent.is_none()
    }

    pub fn owned_cells(&self) -> impl Iterator<Item = &Cell> {
        self.adjacency.cells.cells()
    }

    pub fn awaiting_cts(&self) -> bool {
        self.mode == Mode::Sending && self.pending.is_some() && self.confirmed.is_none()
    }

    /// Start of negotiation for data slot `round`.
    pub fn begin_round(&mut self, round: u16) {
        self.round = round;
        self.timer = None;
        self.pending = None;
        self.confirmed = None;
        self.accepted = None;
        self.adjacency.receiving.clear();
        self.mode = if self.is_root() { Mode::Receiving } else { Mode::Idle };
        self.parent_state = ParentState::Unknown;
    }

    /// Called when this node's level phase begins. Returns the expiry tick.
    pub fn start_timer(&mut self, policy: &TimerPolicy) -> u32 {
        let t = timer_value(self.backlog_packets, policy);
        self.timer = Some(t);
        self.mode = Mode::Timing;
        t
    }

    /// Marks the parent as a root of the routing structure (always listening).
    pub fn parent_is_root(&mut self) {
        if self.parent_state == ParentState::Unknown {
            self.parent_state = ParentState::Available;
        }
    }

    fn transmission_to(&self, rx: NodeId) -> Option<Transmission> {
        let cfg = self.adjacency.cells.config();
        match cfg.mode {
            AntennaMode::Omni => Some(Transmission::omni(self.id, rx)),
            AntennaMode::Directional => Transmission::aimed(self.id, rx, &self.adjacency.positions, cfg.beams).ok(),
        }
    }

    fn channel_free(&self, cell: &Cell) -> bool {
        self.adjacency
            .cells
            .conflicts_with(cell, &self.adjacency.positions, self.range)
            .is_ok_and(|c| c.is_empty())
    }

    fn reservation(&self, cell: Cell) -> Option<Reservation> {
        Some(Reservation {
            cell,
            tx_pos: *self.adjacency.positions.get(&cell.tx)?,
            rx_pos: *self.adjacency.positions.get(&cell.rx)?,
        })
    }

    fn message(&self, kind: MessageKind, dst: Option<NodeId>, payload: Payload) -> SchedMessage {
        SchedMessage { kind, src: self.id, dst, src_pos: self.position, round: self.round, payload }
    }

    fn become_receiving(&mut self) -> Vec<SchedMessage> {
        self.pending = None;
        let lost_to_sibling = self.parent_state == ParentState::Busy && self.demand > 0;
        if self.children.is_empty() && !lost_to_sibling {
            self.mode = Mode::Idle;
            return Vec::new();
        }
        self.mode = Mode::Receiving;
        vec![self.message(MessageKind::Available, None, Payload::None)]
    }

    pub fn on_timer(&mut self) -> Vec<SchedMessage> {
        if self.mode != Mode::Timing {
            return Vec::new();
        }
        self.timer = None;
        let Some(parent) = self.parent else {
            return self.become_receiving();
        };
        if self.demand == 0 || self.parent_state != ParentState::Available {
            return self.become_receiving();
        }
        let Some(link) = self.transmission_to(parent) else {
            return self.become_receiving();
        };
        let channels: Vec<u16> = (0..self.adjacency.cells.config().num_channels)
            .filter(|&ch| self.channel_free(&Cell::with_transmission(self.round, ch, link)))
            .collect();
        let Some(&first) = channels.first() else {
            return self.become_receiving();
        };
        let cell = Cell::with_transmission(self.round, first, link);
        let Some(reservation) = self.reservation(cell) else {
            return self.become_receiving();
        };
        self.mode = Mode::Sending;
        self.pending = Some(cell);
        vec![self.message(MessageKind::Rts, Some(parent), Payload::Request { reservation, channels })]
    }

    /// No CTS arrived in time: give up on the uplink for this round.
    pub fn on_rts_timeout(&mut self) -> Vec<SchedMessage> {
        if !self.awaiting_cts() {
            return Vec::new();
        }
        self.become_receiving()
    }

    fn validate(&self, msg: &SchedMessage) -> Result<(), MessageError> {
        let finite = |p: &Position| p.x.is_finite() && p.y.is_finite();
        if !finite(&msg.src_pos) {
            return Err(MessageError::NonFinitePosition);
        }
        let ok_shape = matches!(
            (msg.kind, &msg.payload),
            (MessageKind::Rts, Payload::Request { .. })
                | (MessageKind::Cts | MessageKind::Nav, Payload::Reservation(_))
                | (MessageKind::Available, Payload::None)
                | (MessageKind::SchedAdvert, Payload::Advert(_))
        );
        if !ok_shape {
            return Err(MessageError::PayloadMismatch(msg.kind));
        }
        let reservations: &[Reservation] = match &msg.payload {
            Payload::Request { reservation, .. } | Payload::Reservation(reservation) => core::slice::from_ref(reservation),
            Payload::Advert(rs) => rs,
            Payload::None => &[],
        };
        let beams = self.adjacency.cells.config().beams;
        for r in reservations {
            if !finite(&r.tx_pos) || !finite(&r.rx_pos) {
                return Err(MessageError::NonFinitePosition);
            }
            if let Some((tb, _)) = r.cell.beams {
                let expected = crate::antenna::beam_of(r.tx_pos, r.rx_pos, beams).map_err(|_| MessageError::BeamsInconsistent)?;
                if expected != tb {
                    return Err(MessageError::BeamsInconsistent);
                }
            }
        }
        Ok(())
    }

    fn learn(&mut self, msg: &SchedMessage) {
        self.adjacency.positions.insert(msg.src, msg.src_pos);
        let mut note = |r: &Reservation| {
            self.adjacency.positions.insert(r.cell.tx, r.tx_pos);
            self.adjacency.positions.insert(r.cell.rx, r.rx_pos);
        };
        match &msg.payload {
            Payload::Request { reservation, .. } | Payload::Reservation(reservation) => note(reservation),
            Payload::Advert(rs) => rs.iter().for_each(note),
            Payload::None => {}
        }
    }

    fn record_foreign(&mut self, cells: &[Cell]) {
        let range = self.range;
        let positions = &self.adjacency.positions;
        // conflicts in overheard cells are not this node's to resolve
        let _ = self.adjacency.cells.merge_advert_with(cells, positions, range);
    }

    /// Processes one overheard or addressed message. Pure in the sense that
    /// the same state and message always produce the same successor and
    /// output. Malformed messages leave the state untouched.
    pub fn handle_message(&mut self, msg: &SchedMessage) -> Result<Vec<SchedMessage>, MessageError> {
        self.validate(msg)?;
        self.learn(msg);
        if msg.round != self.round && msg.kind != MessageKind::SchedAdvert {
            return Ok(Vec::new());
        }
        let to_me = msg.dst == Some(self.id);
        let from_parent = Some(msg.src) == self.parent;
        match (&msg.payload, msg.kind) {
            (Payload::Request { reservation, channels }, MessageKind::Rts) if to_me => {
                Ok(self.consider_request(msg.src, reservation, channels))
            }
            (Payload::Request { .. }, _) => Ok(Vec::new()),
            (Payload::Reservation(r), MessageKind::Cts) if to_me => {
                if !self.awaiting_cts() {
                    return Ok(Vec::new());
                }
                let cell = r.cell;
                if self.pending.is_some_and(|p| p.tx != cell.tx || p.rx != cell.rx || p.slot != cell.slot) {
                    return Ok(Vec::new());
                }
                if self.adjacency.cells.allocate_with(cell, &self.adjacency.positions, self.range).is_err() {
                    return Ok(self.become_receiving());
                }
                self.pending = None;
                self.confirmed = Some(cell);
                self.demand = self.demand.saturating_sub(1);
                Ok(vec![self.message(MessageKind::Nav, None, Payload::Reservation(*r))])
            }
            (Payload::Reservation(r), _) => {
                self.record_foreign(&[r.cell]);
                if from_parent && !(msg.kind == MessageKind::Cts && r.cell.tx == self.id) {
                    self.parent_state = ParentState::Busy;
                }
                Ok(Vec::new())
            }
            (Payload::None, _) => {
                self.adjacency.receiving.insert(msg.src, msg.round);
                if from_parent && self.parent_state == ParentState::Unknown {
                    self.parent_state = ParentState::Available;
                }
                Ok(Vec::new())
            }
            (Payload::Advert(rs), _) => {
                let cells: Vec<Cell> = rs.iter().map(|r| r.cell).filter(|c| !c.involves(self.id)).collect();
                self.record_foreign(&cells);
                Ok(Vec::new())
            }
        }
    }

    fn consider_request(&mut self, from: NodeId, request: &Reservation, channels: &[u16]) -> Vec<SchedMessage> {
        let listening = self.is_root() || self.mode == Mode::Receiving;
        if !listening || self.accepted.is_some() || !self.children.contains(&from) {
            return Vec::new();
        }
        let chosen = channels
            .iter()
            .map(|&ch| Cell { channel: ch, ..request.cell })
            .find(|c| c.slot == self.round && self.channel_free(c));
        let Some(cell) = chosen else {
            return Vec::new();
        };
        let Some(reservation) = self.reservation(cell) else {
            return Vec::new();
        };
        self.accepted = Some(cell);
        self.record_foreign(&[cell]);
        vec![self.message(MessageKind::Cts, Some(from), Payload::Reservation(reservation))]
    }

    /// End-of-period advert of this node's own cells.
    pub fn advert(&self) -> Option<SchedMessage> {
        let rs: Vec<Reservation> = self.owned_cells().filter_map(|c| self.reservation(*c)).collect();
        if rs.is_empty() {
            return None;
        }
        Some(self.message(MessageKind::SchedAdvert, None, Payload::Advert(rs)))
    }
}
