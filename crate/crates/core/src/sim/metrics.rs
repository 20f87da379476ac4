use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::topology::NodeId;

pub type PacketId = u64;

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    /// A packet was created at `node`. It enters the buffer unless a
    /// matching `Drop` follows in the same slot.
    Generate { slot: u64, time: f64, node: NodeId, packet: PacketId },
    /// One cell's worth of packets moved one hop.
    Tx { slot: u64, channel: u16, tx: NodeId, rx: NodeId, packets: Vec<PacketId>, bits: u64, energy: f64 },
    /// A packet reached a sink.
    Deliver { slot: u64, time: f64, node: NodeId, packet: PacketId },
    /// A packet was discarded at `node` because its buffer was full.
    Drop { slot: u64, time: f64, node: NodeId, packet: PacketId },
    /// A scheduling period ran before `slot`.
    Period { slot: u64, schedule_length: u16, cells: u32, unscheduled: u32, uplink_delay: f64, downlink_delay: f64 },
}

impl Event {
    pub fn slot(&self) -> u64 {
        match *self {
            Event::Generate { slot, .. }
            | Event::Tx { slot, .. }
            | Event::Deliver { slot, .. }
            | Event::Drop { slot, .. }
            | Event::Period { slot, .. } => slot,
        }
    }
}

/// Everything the metrics are computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub nodes: usize,
    pub slots: u64,
    pub timeslot: f64,
    pub packet_bits: u64,
    /// Energy drawn by a node in a slot where it does not transmit, J.
    pub idle_energy_per_slot: f64,
    pub events: Vec<Event>,
}

impl EventLog {
    pub fn new(nodes: usize, slots: u64, timeslot: f64, packet_bits: u64) -> Self {
        EventLog { nodes, slots, timeslot, packet_bits, idle_energy_per_slot: 0.0, events: Vec::new() }
    }

    pub fn duration(&self) -> f64 {
        self.slots as f64 * self.timeslot
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkThroughput {
    pub tx: NodeId,
    pub rx: NodeId,
    pub packets: u64,
    pub bits: u64,
    pub bps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DelayStats {
    pub count: u64,
    pub mean: f64,
    pub p50: f64,
    pub p95: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsReport {
    pub nodes: usize,
    pub duration: f64,
    pub generated: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub in_buffers: u64,
    pub aggregate_throughput: f64,
    pub links: Vec<LinkThroughput>,
    /// `None` when nothing was delivered.
    pub delay: Option<DelayStats>,
    /// Worst per-period maximum uplink and downlink delay.
    pub max_uplink_delay: f64,
    pub max_downlink_delay: f64,
    pub node_energy: Vec<f64>,
    pub total_energy: f64,
    pub periods: u64,
    pub schedule_length_max: u16,
    pub schedule_length_mean: f64,
    pub unscheduled_cells: u64,
    pub buffer_peak: Vec<u64>,
}

impl MetricsReport {
    pub fn delivery_ratio(&self) -> Option<f64> {
        (self.generated > 0).then(|| self.delivered as f64 / self.generated as f64)
    }

    pub fn mean_delay(&self) -> Option<f64> {
        self.delay.map(|d| d.mean)
    }
}

/// Nearest-rank percentile of a sorted, non-empty slice.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = libm::ceil(p / 100.0 * n as f64) as usize;
    sorted[rank.clamp(1, n) - 1]
}

fn node_index(log: &EventLog, node: NodeId) -> Result<usize> {
    let i = node.index();
    if i >= log.nodes {
        return Err(Error::MalformedLog(format!("event names unknown node {node}")));
    }
    Ok(i)
}

/// Computes the report from the event log alone.
pub fn collect_metrics(log: &EventLog) -> Result<MetricsReport> {
    if !(log.timeslot > 0.0) && log.slots > 0 {
        return Err(Error::MalformedLog(format!("timeslot {}", log.timeslot)));
    }
    let n = log.nodes;
    let duration = log.duration();
    let mut created: BTreeMap<PacketId, f64> = BTreeMap::new();
    let mut finished: BTreeSet<PacketId> = BTreeSet::new();
    let mut occupancy = vec![0i64; n];
    let mut peak = vec![0u64; n];
    let mut energy = vec![0.0; n];
    let mut tx_slots = vec![0u64; n];
    let mut links: BTreeMap<(NodeId, NodeId), (u64, u64)> = BTreeMap::new();
    let mut delays = Vec::new();
    let (mut generated, mut delivered, mut dropped) = (0u64, 0u64, 0u64);
    let mut lengths = Vec::new();
    let (mut up, mut down) = (0.0f64, 0.0f64);
    let mut unscheduled = 0u64;
    let mut last_slot = 0;

    let settle = |occupancy: &[i64], peak: &mut [u64]| -> Result<()> {
        for (o, p) in occupancy.iter().zip(peak.iter_mut()) {
            if *o < 0 {
                return Err(Error::MalformedLog("buffer occupancy went negative".into()));
            }
            *p = (*p).max(*o as u64);
        }
        Ok(())
    };

    for ev in &log.events {
        if ev.slot() < last_slot {
            return Err(Error::MalformedLog("events out of slot order".into()));
        }
        if ev.slot() != last_slot {
            settle(&occupancy, &mut peak)?;
            last_slot = ev.slot();
        }
        match ev {
            Event::Generate { time, node, packet, .. } => {
                let i = node_index(log, *node)?;
                if created.insert(*packet, *time).is_some() {
                    return Err(Error::MalformedLog(format!("packet {packet} generated twice")));
                }
                generated += 1;
                occupancy[i] += 1;
            }
            Event::Tx { tx, rx, packets, bits, energy: e, .. } => {
                let (a, b) = (node_index(log, *tx)?, node_index(log, *rx)?);
                if !(*e >= 0.0) {
                    return Err(Error::MalformedLog(format!("negative energy {e}")));
                }
                for p in packets {
                    if !created.contains_key(p) || finished.contains(p) {
                        return Err(Error::MalformedLog(format!("packet {p} moved while not in flight")));
                    }
                }
                energy[a] += e;
                tx_slots[a] += 1;
                occupancy[a] -= packets.len() as i64;
                occupancy[b] += packets.len() as i64;
                let entry = links.entry((*tx, *rx)).or_insert((0, 0));
                entry.0 += packets.len() as u64;
                entry.1 += bits;
            }
            Event::Deliver { time, node, packet, .. } => {
                let i = node_index(log, *node)?;
                let Some(&c) = created.get(packet) else {
                    return Err(Error::MalformedLog(format!("packet {packet} delivered before creation")));
                };
                if !finished.insert(*packet) {
                    return Err(Error::MalformedLog(format!("packet {packet} finished twice")));
                }
                if *time < c {
                    return Err(Error::MalformedLog(format!("packet {packet} delivered before it was created")));
                }
                delivered += 1;
                occupancy[i] -= 1;
                delays.push(time - c);
            }
            Event::Drop { node, packet, .. } => {
                let i = node_index(log, *node)?;
                if !created.contains_key(packet) || !finished.insert(*packet) {
                    return Err(Error::MalformedLog(format!("packet {packet} dropped while not in flight")));
                }
                dropped += 1;
                occupancy[i] -= 1;
            }
            Event::Period { schedule_length, unscheduled: u, uplink_delay, downlink_delay, .. } => {
                lengths.push(*schedule_length);
                up = up.max(*uplink_delay);
                down = down.max(*downlink_delay);
                unscheduled += u64::from(*u);
            }
        }
    }
    settle(&occupancy, &mut peak)?;

    if log.idle_energy_per_slot > 0.0 {
        for (e, t) in energy.iter_mut().zip(&tx_slots) {
            *e += log.idle_energy_per_slot * log.slots.saturating_sub(*t) as f64;
        }
    }

    let per_second = |bits: u64| if duration > 0.0 { bits as f64 / duration } else { 0.0 };
    let delay = (!delays.is_empty()).then(|| {
        let mut sorted = delays.clone();
        sorted.sort_by(f64::total_cmp);
        DelayStats {
            count: sorted.len() as u64,
            mean: delays.iter().sum::<f64>() / delays.len() as f64,
            p50: percentile(&sorted, 50.0),
            p95: percentile(&sorted, 95.0),
            max: sorted[sorted.len() - 1],
        }
    });
    Ok(MetricsReport {
        nodes: n,
        duration,
        generated,
        delivered,
        dropped,
        in_buffers: generated - delivered - dropped,
        aggregate_throughput: per_second(delivered * log.packet_bits),
        links: links
            .into_iter()
            .map(|((tx, rx), (packets, bits))| LinkThroughput { tx, rx, packets, bits, bps: per_second(bits) })
            .collect(),
        delay,
        max_uplink_delay: up,
        max_downlink_delay: down,
        total_energy: energy.iter().sum(),
        node_energy: energy,
        periods: lengths.len() as u64,
        schedule_length_max: lengths.iter().copied().max().unwrap_or(0),
        schedule_length_mean: if lengths.is_empty() {
            0.0
        } else {
            lengths.iter().map(|&l| f64::from(l)).sum::<f64>() / lengths.len() as f64
        },
        unscheduled_cells: unscheduled,
        buffer_peak: peak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_log_gives_zero_report() {
        let r = collect_metrics(&EventLog::new(3, 100, 0.01, 1016)).unwrap();
        assert_eq!(r.generated, 0);
        assert_eq!(r.delivered, 0);
        assert_eq!(r.delay, None);
        assert_eq!(r.total_energy, 0.0);
        assert_eq!(r.aggregate_throughput, 0.0);
        assert_eq!(r.node_energy, [0.0; 3]);
    }

    #[test]
    fn three_packets_with_known_delays() {
        let mut log = EventLog::new(2, 100, 0.01, 1000);
        let n1 = NodeId(1);
        for (p, (c, d)) in [(0.0, 0.1), (0.2, 0.5), (0.3, 0.9)].into_iter().enumerate() {
            log.events.push(Event::Generate { slot: p as u64, time: c, node: n1, packet: p as u64 });
            log.events.push(Event::Tx {
                slot: p as u64,
                channel: 0,
                tx: n1,
                rx: NodeId::SINK,
                packets: vec![p as u64],
                bits: 1000,
                energy: 0.5,
            });
            log.events.push(Event::Deliver { slot: p as u64, time: d, node: NodeId::SINK, packet: p as u64 });
        }
        let r = collect_metrics(&log).unwrap();
        let d = r.delay.unwrap();
        assert!((d.mean - (0.1 + 0.3 + 0.6) / 3.0).abs() < 1e-12);
        assert_eq!(d.count, 3);
        assert!((d.max - 0.6).abs() < 1e-12);
        assert_eq!(r.delivered, 3);
        assert_eq!(r.aggregate_throughput, 3000.0);
        assert_eq!(r.links.len(), 1);
        assert_eq!(r.total_energy, 1.5);
    }

    #[test]
    fn rejects_unknown_packets() {
        let mut log = EventLog::new(2, 1, 0.01, 8);
        log.events.push(Event::Deliver { slot: 0, time: 0.0, node: NodeId::SINK, packet: 7 });
        assert!(matches!(collect_metrics(&log), Err(Error::MalformedLog(_))));
    }

    #[test]
    fn percentile_nearest_rank() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 50.0), 2.0);
        assert_eq!(percentile(&v, 95.0), 4.0);
        assert_eq!(percentile(&v, 0.0), 1.0);
    }
}
