//! Level-based, timer-driven RTS/CTS scheduling.
//!
//! One scheduling period negotiates the cells of one slotframe. Data slots
//! are negotiated in order, one *round* per slot. Every round walks the
//! routing levels from the top: level `l` contends in scheduling slot
//! `(l - 1) % 3`. Inside a scheduling slot, time is counted in micro-ticks;
//! each contending node arms a timer that shrinks with its backlog, and the
//! node whose timer fires first gets the first chance to reserve.
//!
//! Node logic lives in [`node::NodeSchedState`] and only ever reads its own
//! state and the messages it hears. The engine here just delivers messages
//! to every node within interference range and fires timers.

pub mod message;
pub mod node;
pub mod timer;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::antenna::AntennaMode;
use crate::error::{Error, Result};
use crate::rng::{stream, STREAM_CONTROL_LOSS};
use crate::schedule::{AdvertDiagnostic, Cell, Conflict, Schedule, ScheduleConfig};
use crate::topology::{NodeId, Position, Topology, Tree};

pub use message::{MessageKind, Payload, Reservation, SchedMessage};
pub use node::{MessageError, Mode, NodeSchedState, ParentState};
pub use timer::{timer_value, TimerPolicy};

/// Packets of 127 bytes that fit in a 10 ms slot at 2 Mbps.
pub const DEFAULT_PACKETS_PER_CELL: u32 = 19;

/// Scheduling slots per round; deeper levels wrap around.
pub const SCHED_SLOTS: u32 = 3;

/// Uplink routing: a parent per node plus hop levels. Nodes without a
/// parent are roots and always listen. A [`Tree`] gives a single root; an
/// explicit link list may give several.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Routes {
    parent: Vec<Option<NodeId>>,
    level: Vec<u32>,
    children: Vec<Vec<NodeId>>,
}

impl Routes {
    pub fn from_tree(tree: &Tree) -> Self {
        let children = (0..tree.len()).map(|i| tree.children(NodeId(i as u16)).to_vec()).collect();
        Routes { parent: tree.parents().to_vec(), level: tree.levels().to_vec(), children }
    }

    /// `links` are `(child, parent)` pairs. Every link must be within radio
    /// range, each child may appear once, and the relation must be acyclic.
    pub fn from_links(topology: &Topology, links: &[(NodeId, NodeId)]) -> Result<Self> {
        let n = topology.len();
        let mut parent = vec![None; n];
        for &(c, p) in links {
            for id in [c, p] {
                if !topology.contains(id) {
                    return Err(Error::UnknownNode(id));
                }
            }
            if c == p || parent[c.index()].is_some() {
                return Err(Error::RoutingCycle(c));
            }
            if !topology.in_range(c, p) {
                return Err(Error::Disconnected(vec![c]));
            }
            parent[c.index()] = Some(p);
        }
        let mut level = vec![u32::MAX; n];
        for start in 0..n {
            let mut path = Vec::new();
            let mut cur = NodeId(start as u16);
            while level[cur.index()] == u32::MAX {
                if path.contains(&cur) {
                    return Err(Error::RoutingCycle(cur));
                }
                path.push(cur);
                match parent[cur.index()] {
                    Some(p) => cur = p,
                    None => {
                        level[cur.index()] = 0;
                        path.pop();
                        break;
                    }
                }
            }
            let mut l = level[cur.index()];
            for &node in path.iter().rev() {
                l += 1;
                level[node.index()] = l;
            }
        }
        let mut children = vec![Vec::new(); n];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[p.index()].push(NodeId(i as u16));
            }
        }
        Ok(Routes { parent, level, children })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.parent.get(node.index()).copied().flatten()
    }

    pub fn level(&self, node: NodeId) -> u32 {
        self.level[node.index()]
    }

    pub fn children(&self, node: NodeId) -> &[NodeId] {
        &self.children[node.index()]
    }

    pub fn max_level(&self) -> u32 {
        self.level.iter().copied().max().unwrap_or(0)
    }

    pub fn is_root(&self, node: NodeId) -> bool {
        self.parent(node).is_none()
    }

    /// Uplink pairs `(child, parent)` in child order.
    pub fn links(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.parent.iter().enumerate().filter_map(|(i, p)| p.map(|p| (NodeId(i as u16), p)))
    }
}

impl From<&Tree> for Routes {
    fn from(tree: &Tree) -> Self {
        Routes::from_tree(tree)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedulerConfig {
    pub schedule: ScheduleConfig,
    pub timer: TimerPolicy,
    pub packets_per_cell: u32,
    /// Probability that a control message is lost at one receiver.
    pub control_loss: f64,
    pub seed: u64,
    /// Keep every node transition for replay.
    pub record_steps: bool,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        SchedulerConfig {
            schedule: ScheduleConfig::default(),
            timer: TimerPolicy::default(),
            packets_per_cell: DEFAULT_PACKETS_PER_CELL,
            control_loss: 0.0,
            seed: 1,
            record_steps: false,
        }
    }
}

impl SchedulerConfig {
    pub fn with_mode(mut self, mode: AntennaMode) -> Self {
        self.schedule.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.timer.validate()?;
        if self.packets_per_cell == 0 {
            return Err(Error::Config("packets per cell must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.control_loss) {
            return Err(crate::error::domain("control loss probability", self.control_loss));
        }
        let s = &self.schedule;
        if s.slotframe_length == 0 || s.num_channels == 0 {
            return Err(Error::Config("slotframe and channel count must be positive".into()));
        }
        if !(s.interference_factor.is_finite() && s.interference_factor > 0.0) {
            return Err(crate::error::domain("interference factor", s.interference_factor));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Level { level: u32, sched_slot: u32 },
    /// End-of-period schedule adverts.
    Advert,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub round: u16,
    pub phase: Phase,
    pub tick: u32,
    pub msg: SchedMessage,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            Phase::Level { level, sched_slot } => {
                write!(f, "round {} level {} sslot {} tick {} {}", self.round, level, sched_slot, self.tick, self.msg)
            }
            Phase::Advert => write!(f, "advert {}", self.msg),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepInput {
    Timer,
    RtsTimeout,
    Message(SchedMessage),
}

/// One node transition, recorded when [`SchedulerConfig::record_steps`] is on.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub before: NodeSchedState,
    pub input: StepInput,
    pub after: NodeSchedState,
    pub output: Vec<SchedMessage>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    /// A negotiated cell clashed with the global schedule and was dropped.
    Rejected { cell: Cell, conflicts: Vec<Conflict> },
    Malformed { node: NodeId, error: MessageError },
    Advert { node: NodeId, diagnostic: AdvertDiagnostic },
    Other(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedulingOutcome {
    pub schedule: Schedule,
    pub trace: Vec<TraceEntry>,
    /// Cells still wanted per node after the slotframe was exhausted.
    pub unscheduled: Vec<(NodeId, u32)>,
    pub diagnostics: Vec<Diagnostic>,
    pub steps: Vec<Step>,
}

impl SchedulingOutcome {
    pub fn schedule_length(&self) -> u16 {
        self.schedule.schedule_length()
    }

    pub fn trace_lines(&self) -> Vec<String> {
        self.trace.iter().map(|e| alloc::format!("{e}")).collect()
    }
}

pub fn demand_cells(backlog_packets: u32, packets_per_cell: u32) -> u32 {
    backlog_packets.div_ceil(packets_per_cell)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    Deliver,
    Timer,
    Timeout,
}

#[derive(Debug, Clone, PartialEq)]
enum Event {
    Deliver(NodeId, SchedMessage),
    Timer(NodeId),
    Timeout(NodeId),
}

struct Engine<'a, R> {
    topology: &'a Topology,
    config: &'a SchedulerConfig,
    range: f64,
    nodes: Vec<NodeSchedState>,
    queue: BTreeMap<(u32, EventKind, u32, u64), Event>,
    seq: u64,
    trace: Vec<TraceEntry>,
    steps: Vec<Step>,
    diagnostics: Vec<Diagnostic>,
    rng: R,
}

impl<R: Rng> Engine<'_, R> {
    fn push(&mut self, tick: u32, event: Event) {
        // Timers that expire on the same tick fire larger backlog first, so
        // the floor of the timer rule cannot invert priorities. Equal
        // backlogs keep insertion order, which is ascending node id.
        let (kind, rank) = match event {
            Event::Deliver(..) => (EventKind::Deliver, 0),
            Event::Timer(n) => (EventKind::Timer, u32::MAX - self.nodes[n.index()].backlog_packets),
            Event::Timeout(_) => (EventKind::Timeout, 0),
        };
        self.queue.insert((tick, kind, rank, self.seq), event);
        self.seq += 1;
    }

    fn hears(&self, src: NodeId) -> Vec<NodeId> {
        let Ok(p) = self.topology.position(src) else {
            return Vec::new();
        };
        self.topology
            .node_ids()
            .filter(|&n| n != src)
            .filter(|&n| self.topology.position(n).is_ok_and(|q| p.distance_to(q) <= self.range))
            .collect()
    }

    fn send(&mut self, round: u16, phase: Phase, tick: u32, msgs: Vec<SchedMessage>) {
        for msg in msgs {
            self.trace.push(TraceEntry { round, phase, tick, msg: msg.clone() });
            if msg.kind == MessageKind::Rts {
                self.push(tick + 1, Event::Timeout(msg.src));
            }
            for rx in self.hears(msg.src) {
                if self.config.control_loss > 0.0 && self.rng.gen::<f64>() < self.config.control_loss {
                    continue;
                }
                self.push(tick, Event::Deliver(rx, msg.clone()));
            }
        }
    }

    fn step(&mut self, node: NodeId, input: StepInput) -> Vec<SchedMessage> {
        let idx = node.index();
        let before = self.config.record_steps.then(|| self.nodes[idx].clone());
        let state = &mut self.nodes[idx];
        let output = match &input {
            StepInput::Timer => state.on_timer(),
            StepInput::RtsTimeout => state.on_rts_timeout(),
            StepInput::Message(m) => match state.handle_message(m) {
                Ok(out) => out,
                Err(error) => {
                    self.diagnostics.push(Diagnostic::Malformed { node, error });
                    Vec::new()
                }
            },
        };
        if let Some(before) = before {
            self.steps.push(Step { before, input, after: self.nodes[idx].clone(), output: output.clone() });
        }
        output
    }

    fn drain(&mut self, round: u16, phase: Phase) {
        while let Some(((tick, ..), event)) = self.queue.pop_first() {
            let (node, input) = match event {
                Event::Deliver(n, m) => (n, StepInput::Message(m)),
                Event::Timer(n) => (n, StepInput::Timer),
                Event::Timeout(n) => (n, StepInput::RtsTimeout),
            };
            let out = self.step(node, input);
            self.send(round, phase, tick, out);
        }
    }
}

/// Runs one scheduling period and returns the negotiated slotframe.
///
/// `backlog` gives the queued packets per node, indexed by node id; each
/// node asks for `ceil(backlog / packets_per_cell)` uplink cells.
pub fn run_scheduling_period(
    topology: &Topology,
    routes: &Routes,
    backlog: &[u32],
    config: &SchedulerConfig,
) -> Result<SchedulingOutcome> {
    config.validate()?;
    let n = topology.len();
    if routes.len() != n || backlog.len() != n {
        return Err(Error::Config(alloc::format!(
            "expected {} nodes in routes and backlog, got {} and {}",
            n,
            routes.len(),
            backlog.len()
        )));
    }
    let range = topology.radius() * config.schedule.interference_factor;

    let mut nodes = Vec::with_capacity(n);
    for id in topology.node_ids() {
        let neighbors: Vec<(NodeId, Position)> = topology
            .node_ids()
            .filter(|&m| m != id && topology.in_range(id, m))
            .map(|m| (m, topology.positions()[m.index()]))
            .collect();
        let demand = if routes.is_root(id) { 0 } else { demand_cells(backlog[id.index()], config.packets_per_cell) };
        nodes.push(NodeSchedState::new(
            id,
            topology.positions()[id.index()],
            routes.level(id),
            routes.parent(id),
            routes.children(id).to_vec(),
            &neighbors,
            backlog[id.index()],
            demand,
            config.schedule,
            range,
        ));
    }

    let mut engine = Engine {
        topology,
        config,
        range,
        nodes,
        queue: BTreeMap::new(),
        seq: 0,
        trace: Vec::new(),
        steps: Vec::new(),
        diagnostics: Vec::new(),
        rng: stream(config.seed, STREAM_CONTROL_LOSS),
    };

    let max_level = routes.max_level();
    let mut last_round = 0;
    for round in 0..config.schedule.slotframe_length {
        if engine.nodes.iter().all(|s| s.demand == 0) {
            break;
        }
        last_round = round;
        for s in engine.nodes.iter_mut() {
            s.begin_round(round);
            if s.parent.is_some_and(|p| routes.is_root(p)) {
                s.parent_is_root();
            }
        }
        for level in 1..=max_level {
            let phase = Phase::Level { level, sched_slot: (level - 1) % SCHED_SLOTS };
            for i in 0..n {
                if engine.nodes[i].level == level {
                    let t = engine.nodes[i].start_timer(&config.timer);
                    engine.push(t, Event::Timer(NodeId(i as u16)));
                }
            }
            engine.drain(round, phase);
        }
    }

    let adverts: Vec<SchedMessage> = engine.nodes.iter().filter_map(|s| s.advert()).collect();
    for msg in adverts {
        engine.send(last_round, Phase::Advert, 0, vec![msg]);
    }
    engine.drain(last_round, Phase::Advert);

    let mut schedule = Schedule::new(config.schedule);
    let mut diagnostics = engine.diagnostics;
    for state in &engine.nodes {
        for cell in state.owned_cells() {
            match schedule.allocate_with(*cell, topology, range) {
                Ok(()) => {}
                Err(Error::Conflict(conflicts)) => diagnostics.push(Diagnostic::Rejected { cell: *cell, conflicts }),
                Err(e) => diagnostics.push(Diagnostic::Other(alloc::format!("{cell:?}: {e}"))),
            }
        }
    }
    let unscheduled = engine.nodes.iter().filter(|s| s.demand > 0).map(|s| (s.id, s.demand)).collect();
    Ok(SchedulingOutcome { schedule, trace: engine.trace, unscheduled, diagnostics, steps: engine.steps })
}

/// Same protocol with every data cell sent omni-directionally.
pub fn omni_baseline(
    topology: &Topology,
    routes: &Routes,
    backlog: &[u32],
    config: &SchedulerConfig,
) -> Result<SchedulingOutcome> {
    run_scheduling_period(topology, routes, backlog, &config.with_mode(AntennaMode::Omni))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_tree, Area};

    fn star(k: usize) -> Topology {
        let mut pos = vec![Position::new(500.0, 500.0)];
        for i in 0..k {
            let a = i as f64 * core::f64::consts::TAU / k as f64 + 0.1;
            pos.push(Position::new(500.0 + 50.0 * libm::cos(a), 500.0 + 50.0 * libm::sin(a)));
        }
        Topology::from_positions(Area::new(1000.0, 1000.0), 100.0, pos).unwrap()
    }

    fn one_channel(mode: AntennaMode) -> SchedulerConfig {
        let mut c = SchedulerConfig::default().with_mode(mode);
        c.schedule.num_channels = 1;
        c
    }

    #[test]
    fn sink_only_is_empty() {
        let topo = star(0);
        let routes = Routes::from_tree(&build_tree(&topo).unwrap());
        let out = run_scheduling_period(&topo, &routes, &[5], &SchedulerConfig::default()).unwrap();
        assert!(out.schedule.is_empty());
        assert!(out.trace.is_empty());
    }

    #[test]
    fn star_omni_needs_one_slot_per_child() {
        for k in 1..=6 {
            let topo = star(k);
            let routes = Routes::from_tree(&build_tree(&topo).unwrap());
            let mut backlog = vec![0; k + 1];
            for b in backlog.iter_mut().skip(1) {
                *b = 1;
            }
            let out = omni_baseline(&topo, &routes, &backlog, &one_channel(AntennaMode::Omni)).unwrap();
            assert_eq!(out.schedule_length() as usize, k);
            assert!(out.unscheduled.is_empty());
        }
    }

    #[test]
    fn routes_from_links_reject_cycles() {
        let topo = star(3);
        let err = Routes::from_links(&topo, &[(NodeId(1), NodeId(2)), (NodeId(2), NodeId(1))]);
        assert!(matches!(err, Err(Error::RoutingCycle(_))));
        let ok = Routes::from_links(&topo, &[(NodeId(1), NodeId(2)), (NodeId(3), NodeId(1))]).unwrap();
        assert_eq!(ok.level(NodeId(3)), 2);
        assert_eq!(ok.level(NodeId(0)), 0);
        assert!(ok.is_root(NodeId(2)));
    }

    #[test]
    fn mismatched_backlog_is_config_error() {
        let topo = star(2);
        let routes = Routes::from_tree(&build_tree(&topo).unwrap());
        assert!(matches!(
            run_scheduling_period(&topo, &routes, &[1], &SchedulerConfig::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn demand_rounds_up() {
        assert_eq!(demand_cells(0, 19), 0);
        assert_eq!(demand_cells(1, 19), 1);
        assert_eq!(demand_cells(19, 19), 1);
        assert_eq!(demand_cells(20, 19), 2);
    }
}
