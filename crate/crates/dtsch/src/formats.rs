//! Text formats for schedules, traces, event logs and reports.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a value
//! read back from any of these files is bit-identical to the one written.

use std::collections::BTreeMap;
use std::fmt::Write;

use dtsch_core::scheduler::TraceEntry;
use dtsch_core::sim::{Event, EventLog, MetricsReport};
use dtsch_core::Schedule;

pub const SCHEDULE_HEADER: &str = "slot,channel,tx,rx,tx_beam,rx_beam";

/// One line per cell; beams are `-` in omni mode.
pub fn schedule_csv(schedule: &Schedule) -> String {
    let mut out = String::from(SCHEDULE_HEADER);
    out.push('\n');
    for c in schedule.cells() {
        let (tb, rb) = match c.beams {
            Some((t, r)) => (t.value().to_string(), r.value().to_string()),
            None => ("-".into(), "-".into()),
        };
        writeln!(out, "{},{},{},{},{},{}", c.slot, c.channel, c.tx.0, c.rx.0, tb, rb).unwrap();
    }
    out
}

pub fn trace_text(trace: &[TraceEntry]) -> String {
    trace.iter().map(|e| format!("{e}\n")).collect()
}

pub const EVENTS_HEADER: &str = "slot\tkind\tdetail";

/// Tab-separated event log. The `detail` column is a space-separated
/// `key=value` list whose keys depend on the event kind.
pub fn events_tsv(log: &EventLog) -> String {
    let mut out = String::new();
    writeln!(out, "# nodes={} slots={} timeslot={} packet_bits={}", log.nodes, log.slots, log.timeslot, log.packet_bits).unwrap();
    out.push_str(EVENTS_HEADER);
    out.push('\n');
    for ev in &log.events {
        let _ = match ev {
            Event::Generate { slot, time, node, packet } => {
                writeln!(out, "{slot}\tgenerate\ttime={time} node={} packet={packet}", node.0)
            }
            Event::Tx { slot, channel, tx, rx, packets, bits, energy } => {
                let ids: Vec<String> = packets.iter().map(u64::to_string).collect();
                writeln!(
                    out,
                    "{slot}\ttx\tchannel={channel} tx={} rx={} bits={bits} energy={energy} packets={}",
                    tx.0,
                    rx.0,
                    ids.join(",")
                )
            }
            Event::Deliver { slot, time, node, packet } => {
                writeln!(out, "{slot}\tdeliver\ttime={time} node={} packet={packet}", node.0)
            }
            Event::Drop { slot, time, node, packet } => {
                writeln!(out, "{slot}\tdrop\ttime={time} node={} packet={packet}", node.0)
            }
            Event::Period { slot, schedule_length, cells, unscheduled, uplink_delay, downlink_delay } => writeln!(
                out,
                "{slot}\tperiod\tschedule_length={schedule_length} cells={cells} unscheduled={unscheduled} \
                 uplink_delay={uplink_delay} downlink_delay={downlink_delay}"
            ),
        };
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| x.to_string())
}

/// Scalar metrics as `key=value` lines, headed by `extra` lines.
pub fn report_text(report: &MetricsReport, extra: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in extra {
        writeln!(out, "{k}={v}").unwrap();
    }
    let d = report.delay;
    let rows: [(&str, String); 21] = [
        ("nodes", report.nodes.to_string()),
        ("duration_s", report.duration.to_string()),
        ("generated", report.generated.to_string()),
        ("delivered", report.delivered.to_string()),
        ("dropped", report.dropped.to_string()),
        ("in_buffers", report.in_buffers.to_string()),
        ("delivery_ratio", opt(report.delivery_ratio())),
        ("throughput_bps", report.aggregate_throughput.to_string()),
        ("delay_mean_s", opt(d.map(|d| d.mean))),
        ("delay_p50_s", opt(d.map(|d| d.p50))),
        ("delay_p95_s", opt(d.map(|d| d.p95))),
        ("delay_max_s", opt(d.map(|d| d.max))),
        ("max_uplink_delay_s", report.max_uplink_delay.to_string()),
        ("max_downlink_delay_s", report.max_downlink_delay.to_string()),
        ("total_energy_j", report.total_energy.to_string()),
        ("periods", report.periods.to_string()),
        ("schedule_length_max", report.schedule_length_max.to_string()),
        ("schedule_length_mean", report.schedule_length_mean.to_string()),
        ("unscheduled_cells", report.unscheduled_cells.to_string()),
        ("links", report.links.len().to_string()),
        ("buffer_peak_max", report.buffer_peak.iter().max().copied().unwrap_or(0).to_string()),
    ];
    for (k, v) in rows {
        writeln!(out, "{k}={v}").unwrap();
    }
    out
}

/// Per-node energy and buffer peak.
pub fn nodes_tsv(report: &MetricsReport) -> String {
    let mut out = String::from("node\tenergy_j\tbuffer_peak\n");
    for (i, (e, p)) in report.node_energy.iter().zip(&report.buffer_peak).enumerate() {
        writeln!(out, "{i}\t{e}\t{p}").unwrap();
    }
    out
}

/// Per-link packet, bit and throughput totals.
pub fn links_tsv(report: &MetricsReport) -> String {
    let mut out = String::from("tx\trx\tpackets\tbits\tbps\n");
    for l in &report.links {
        writeln!(out, "{}\t{}\t{}\t{}\t{}", l.tx.0, l.rx.0, l.packets, l.bits, l.bps).unwrap();
    }
    out
}

/// Reads `key=value` lines, skipping blanks and `#` comments.
pub fn parse_key_values(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_owned(), v.trim().to_owned()))
        .collect()
}
