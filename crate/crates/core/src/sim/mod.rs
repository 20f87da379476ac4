//! Slot-stepped convergecast simulation.
//!
//! Time alternates between scheduling periods (which take no simulated
//! time) and data slotframes. In every data slot, each active cell moves up
//! to `packets_per_cell` packets one hop towards a sink, taken FIFO from
//! what the sender held when the slot began. Packets generated during a slot
//! join their buffer at its end.

pub mod metrics;
pub mod traffic;

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::antenna::AntennaMode;
use crate::error::{domain, Error, Result};
use crate::link::{dbm_to_watts, sample_fading, tx_energy, BacklogRate, LinkParams};
use crate::rng::{stream, STREAM_FADING, STREAM_TRAFFIC};
use crate::schedule::{Schedule, ScheduleConfig};
use crate::scheduler::{run_scheduling_period, Routes, SchedulerConfig, TimerPolicy};
use crate::topology::{NodeId, Topology};

pub use metrics::{collect_metrics, DelayStats, Event, EventLog, LinkThroughput, MetricsReport, PacketId};
pub use traffic::{generate_traffic, TrafficModel, TrafficSource};

pub const DEFAULT_TIMESLOT_S: f64 = 0.010;
pub const DEFAULT_MAC_RATE_BPS: f64 = 2e6;
pub const DEFAULT_PACKET_BYTES: u32 = 127;
pub const DEFAULT_DURATION_S: f64 = 300.0;
pub const DEFAULT_TX_POWER_DBM: f64 = 15.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub duration: f64,
    pub timeslot: f64,
    pub mac_rate: f64,
    pub packet_bytes: u32,
    /// Arrival process at every non-sink node.
    pub traffic: TrafficModel,
    pub buffer_capacity: usize,
    pub seed: u64,
    pub mode: AntennaMode,
    /// Slotframes between scheduling periods.
    pub reschedule_period: u32,
    /// Shrink each data slotframe to the negotiated schedule length, so a
    /// shorter schedule repeats sooner. Otherwise the configured slotframe
    /// length is used as is.
    pub adaptive_slotframe: bool,
    pub schedule: ScheduleConfig,
    pub timer: TimerPolicy,
    pub link: LinkParams,
    /// Transmit power ceiling, W.
    pub max_tx_power: f64,
    /// Energy per non-transmitting slot and node, J.
    pub idle_energy_per_slot: f64,
    /// Downlink backlog assumed per node for the downlink delay bound, bits.
    pub downlink_bits: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            duration: DEFAULT_DURATION_S,
            timeslot: DEFAULT_TIMESLOT_S,
            mac_rate: DEFAULT_MAC_RATE_BPS,
            packet_bytes: DEFAULT_PACKET_BYTES,
            traffic: TrafficModel::Cbr { rate_pps: DEFAULT_RATE_PPS },
            buffer_capacity: DEFAULT_BUFFER_CAPACITY,
            seed: 1,
            mode: AntennaMode::Directional,
            reschedule_period: 1,
            adaptive_slotframe: true,
            schedule: ScheduleConfig { num_channels: 1, ..ScheduleConfig::default() },
            timer: TimerPolicy::default(),
            link: LinkParams::default(),
            max_tx_power: dbm_to_watts(DEFAULT_TX_POWER_DBM),
            idle_energy_per_slot: 0.0,
            downlink_bits: 0.0,
        }
    }
}

/// Per-node packet rate of the default workload.
pub const DEFAULT_RATE_PPS: f64 = 10.0;
pub const DEFAULT_BUFFER_CAPACITY: usize = 1000;

impl SimConfig {
    pub fn packet_bits(&self) -> u64 {
        u64::from(self.packet_bytes) * 8
    }

    /// Whole packets one cell carries: `floor(mac_rate · timeslot / bits)`.
    pub fn packets_per_cell(&self) -> u32 {
        libm::floor(self.mac_rate * self.timeslot / self.packet_bits() as f64 + 1e-9) as u32
    }

    pub fn slots(&self) -> u64 {
        libm::round(self.duration / self.timeslot) as u64
    }

    pub fn scheduler_config(&self) -> SchedulerConfig {
        SchedulerConfig {
            schedule: ScheduleConfig { mode: self.mode, ..self.schedule },
            timer: self.timer,
            packets_per_cell: self.packets_per_cell().max(1),
            control_loss: 0.0,
            seed: self.seed,
            record_steps: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(domain("duration", self.duration));
        }
        if !(self.timeslot > 0.0 && self.timeslot.is_finite()) {
            return Err(domain("timeslot", self.timeslot));
        }
        if !(self.mac_rate > 0.0) {
            return Err(domain("MAC rate", self.mac_rate));
        }
        if self.packet_bytes == 0 {
            return Err(Error::Config("packet size must be positive".into()));
        }
        if self.packets_per_cell() == 0 {
            return Err(Error::Config("a slot cannot carry a single packet at this rate".into()));
        }
        if self.buffer_capacity == 0 {
            return Err(Error::Config("buffer capacity must be at least one packet".into()));
        }
        if self.reschedule_period == 0 {
            return Err(Error::Config("reschedule period must be at least one slotframe".into()));
        }
        if !(self.max_tx_power > 0.0) {
            return Err(domain("maximum transmit power", self.max_tx_power));
        }
        if !(self.idle_energy_per_slot >= 0.0) {
            return Err(domain("idle energy", self.idle_energy_per_slot));
        }
        if !(self.downlink_bits >= 0.0) {
            return Err(domain("downlink backlog", self.downlink_bits));
        }
        self.traffic.validate()?;
        self.link.validate()?;
        self.scheduler_config().validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub report: MetricsReport,
    pub log: EventLog,
    /// The first schedule of maximal length negotiated during the run.
    pub longest_schedule: Schedule,
}

#[derive(Debug, Clone, Copy)]
struct Packet {
    id: PacketId,
}

/// Shannon rate of `node`'s uplink at full power and unit fading.
fn nominal_rate(link: &LinkParams, p_max: f64, distance: f64) -> Result<f64> {
    Ok(link.link_state(p_max, distance, 1.0)?.rate)
}

pub fn run(config: &SimConfig, topology: &Topology, routes: &Routes) -> Result<SimOutput> {
    config.validate()?;
    let n = topology.len();
    if routes.len() != n {
        return Err(Error::Config("routes do not match topology".into()));
    }
    let sched = config.scheduler_config();
    let ppc = sched.packets_per_cell as usize;
    let packet_bits = config.packet_bits();
    let slots = config.slots();
    let max_frame = u64::from(config.schedule.slotframe_length);
    let mut frame = max_frame;
    let mut frame_start = 0;
    let mut next_period = 0;

    let mut traffic_rng = stream(config.seed, STREAM_TRAFFIC);
    let mut fading_rng = stream(config.seed, STREAM_FADING);
    let mut sources: Vec<Option<TrafficSource>> = topology
        .node_ids()
        .map(|id| (!routes.is_root(id)).then(|| TrafficSource::new(config.traffic)))
        .collect();
    let mut buffers: Vec<VecDeque<Packet>> = vec![VecDeque::new(); n];
    let mut log = EventLog::new(n, slots, config.timeslot, packet_bits);
    log.idle_energy_per_slot = config.idle_energy_per_slot;
    let mut next_id: PacketId = 0;
    let mut longest = Schedule::new(sched.schedule);
    let mut cells_by_slot: Vec<Vec<crate::schedule::Cell>> = vec![Vec::new(); max_frame as usize];

    let distances: Vec<Option<f64>> = topology
        .node_ids()
        .map(|id| routes.parent(id).map(|p| topology.distance(id, p)).transpose())
        .collect::<Result<_>>()?;

    for slot in 0..slots {
        if slot == next_period {
            let backlog: Vec<u32> = buffers.iter().map(|b| b.len() as u32).collect();
            let outcome = run_scheduling_period(topology, routes, &backlog, &sched)?;
            for v in cells_by_slot.iter_mut() {
                v.clear();
            }
            for c in outcome.schedule.cells() {
                cells_by_slot[c.slot as usize].push(*c);
            }
            if outcome.schedule_length() > longest.schedule_length() {
                longest = outcome.schedule.clone();
            }
            frame = if config.adaptive_slotframe { u64::from(outcome.schedule_length()).max(1) } else { max_frame };
            frame_start = slot;
            next_period = slot + frame * u64::from(config.reschedule_period);
            let mut up = Vec::new();
            let mut down = Vec::new();
            for id in topology.node_ids() {
                if let Some(d) = distances[id.index()] {
                    let r = nominal_rate(&config.link, config.max_tx_power, d)?;
                    up.push(BacklogRate { backlog_bits: (backlog[id.index()] as u64 * packet_bits) as f64, rate_bps: r });
                    down.push(BacklogRate { backlog_bits: config.downlink_bits, rate_bps: r });
                }
            }
            log.events.push(Event::Period {
                slot,
                schedule_length: outcome.schedule_length(),
                cells: outcome.schedule.len() as u32,
                unscheduled: outcome.unscheduled.iter().map(|&(_, d)| d).sum(),
                uplink_delay: crate::link::max_uplink_delay(&up, config.link.access_time_up)?,
                downlink_delay: crate::link::max_downlink_delay(&down, config.link.access_time_down)?,
            });
        }

        let end_time = (slot + 1) as f64 * config.timeslot;
        let active = &cells_by_slot[((slot - frame_start) % frame) as usize];
        let mut moved: Vec<(NodeId, Vec<Packet>)> = Vec::new();
        for cell in active {
            let take = ppc.min(buffers[cell.tx.index()].len());
            if take == 0 {
                continue;
            }
            let packets: Vec<Packet> = buffers[cell.tx.index()].drain(..take).collect();
            let bits = packets.len() as u64 * packet_bits;
            let distance = topology.distance(cell.tx, cell.rx)?;
            let gain = config.link.gain(distance, sample_fading(&mut fading_rng).max(f64::MIN_POSITIVE))?;
            let power = config.link.power_for_rate(config.mac_rate, gain)?.min(config.max_tx_power);
            log.events.push(Event::Tx {
                slot,
                channel: cell.channel,
                tx: cell.tx,
                rx: cell.rx,
                packets: packets.iter().map(|p| p.id).collect(),
                bits,
                energy: tx_energy(power, bits as f64, config.mac_rate)?,
            });
            moved.push((cell.rx, packets));
        }
        for (rx, packets) in moved {
            for p in packets {
                if routes.is_root(rx) {
                    log.events.push(Event::Deliver { slot, time: end_time, node: rx, packet: p.id });
                } else if buffers[rx.index()].len() < config.buffer_capacity {
                    buffers[rx.index()].push_back(p);
                } else {
                    log.events.push(Event::Drop { slot, time: end_time, node: rx, packet: p.id });
                }
            }
        }

        for id in topology.node_ids() {
            let Some(src) = sources[id.index()].as_mut() else {
                continue;
            };
            for time in generate_traffic(&mut traffic_rng, src, slot, config.timeslot) {
                let packet = Packet { id: next_id };
                next_id += 1;
                log.events.push(Event::Generate { slot, time, node: id, packet: packet.id });
                if buffers[id.index()].len() < config.buffer_capacity {
                    buffers[id.index()].push_back(packet);
                } else {
                    log.events.push(Event::Drop { slot, time: end_time, node: id, packet: packet.id });
                }
            }
        }
    }

    let report = collect_metrics(&log)?;
    Ok(SimOutput { report, log, longest_schedule: longest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_tree, Area, Position};

    fn pair() -> (Topology, Routes) {
        let topo = Topology::from_positions(
            Area::new(100.0, 100.0),
            50.0,
            vec![Position::new(50.0, 50.0), Position::new(80.0, 50.0)],
        )
        .unwrap();
        let routes = Routes::from_tree(&build_tree(&topo).unwrap());
        (topo, routes)
    }

    #[test]
    fn packets_per_cell_default() {
        assert_eq!(SimConfig::default().packets_per_cell(), 19);
    }

    #[test]
    fn zero_traffic() {
        let (topo, routes) = pair();
        let cfg = SimConfig { traffic: TrafficModel::Cbr { rate_pps: 0.0 }, duration: 2.0, ..SimConfig::default() };
        let out = run(&cfg, &topo, &routes).unwrap();
        assert_eq!(out.report.delivered, 0);
        assert_eq!(out.report.total_energy, 0.0);
        assert_eq!(out.report.delay, None);
    }

    #[test]
    fn rejects_bad_config() {
        let (topo, routes) = pair();
        let cfg = SimConfig { buffer_capacity: 0, ..SimConfig::default() };
        assert!(run(&cfg, &topo, &routes).is_err());
        let cfg = SimConfig { duration: -1.0, ..SimConfig::default() };
        assert!(run(&cfg, &topo, &routes).is_err());
    }
}
