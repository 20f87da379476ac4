//! End-to-end acceptance checks. Prints one line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use dtsch::formats::report_text;
use dtsch::scenarios;
use dtsch_core::link::{
    channel_gain, max_downlink_delay, max_uplink_delay, rate, received_power, required_tx_power, snr, tx_energy, upsilon,
    BacklogRate,
};
use dtsch_core::schedule::audit;
use dtsch_core::scheduler::{omni_baseline, run_scheduling_period, Routes, SchedulerConfig};
use dtsch_core::sim::{run, Event, SimConfig, TrafficModel};
use dtsch_core::topology::{build_topology, build_tree, TopologyConfig};
use dtsch_core::{AntennaMode, InterferenceModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn scenario(name: &str) -> Outcome {
    let v = scenarios::run(name).map_err(|e| e.to_string())?;
    let detail = v.checks.iter().map(|c| c.what.clone()).collect::<Vec<_>>().join("; ");
    ensure(v.passed(), detail)
}

fn three_links() -> Outcome {
    let a = scenario("dir-3tx")?;
    let b = scenario("omni-3tx")?;
    Ok(format!("directional {a} | omni {b}"))
}

fn dominance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut cases, mut equal) = (0, 0);
    for case in 0..100u64 {
        let nodes = rng.gen_range(8..=32);
        let channels = rng.gen_range(1..=4);
        let topo = build_topology(&TopologyConfig { nodes, seed: 1000 + case, ..TopologyConfig::default() })
            .map_err(|e| format!("case {case}: {e}"))?;
        let routes = Routes::from_tree(&build_tree(&topo).map_err(|e| e.to_string())?);
        let backlog: Vec<u32> = (0..nodes).map(|i| if i == 0 { 0 } else { rng.gen_range(0..60) }).collect();
        let mut cfg = SchedulerConfig::default();
        cfg.schedule.num_channels = channels;
        let dir = run_scheduling_period(&topo, &routes, &backlog, &cfg).map_err(|e| e.to_string())?;
        let omni = omni_baseline(&topo, &routes, &backlog, &cfg).map_err(|e| e.to_string())?;
        let beams = cfg.schedule.beams;
        let violations = audit(dir.schedule.cells(), &InterferenceModel::for_topology(AntennaMode::Directional, beams, &topo, 1.0), &topo)
            .len()
            + audit(omni.schedule.cells(), &InterferenceModel::for_topology(AntennaMode::Omni, beams, &topo, 1.0), &topo).len();
        if violations > 0 {
            return Err(format!("case {case}: {violations} conflict violations"));
        }
        if dir.schedule_length() > omni.schedule_length() {
            return Err(format!("case {case}: directional {} > omni {}", dir.schedule_length(), omni.schedule_length()));
        }
        equal += usize::from(dir.schedule_length() == omni.schedule_length());
        cases += 1;
    }
    Ok(format!("{cases}/{cases} cases directional <= omni ({equal} equal), zero violations"))
}

fn table_defaults() -> Outcome {
    let topo_cfg = TopologyConfig::default();
    let sim = SimConfig::default();
    let start = Instant::now();
    let topo = build_topology(&topo_cfg).map_err(|e| e.to_string())?;
    let routes = Routes::from_tree(&build_tree(&topo).map_err(|e| e.to_string())?);
    let omni = run(&SimConfig { mode: AntennaMode::Omni, ..sim.clone() }, &topo, &routes).map_err(|e| e.to_string())?;
    let dir = run(&SimConfig { mode: AntennaMode::Directional, ..sim.clone() }, &topo, &routes).map_err(|e| e.to_string())?;
    let wall = start.elapsed().as_secs_f64();
    let shape = topo.len() == 16
        && (topo.area().width, topo.area().height) == (1000.0, 1000.0)
        && sim.mac_rate == 2e6
        && sim.packet_bytes == 127
        && omni.report.duration == 300.0;
    let (o, d) = (&omni.report, &dir.report);
    let ratio = match (d.mean_delay(), o.mean_delay()) {
        (Some(a), Some(b)) => a / b,
        _ => f64::NAN,
    };
    let detail = format!(
        "wall {wall:.1} s; throughput directional {:.1} vs omni {:.1} bit/s; delay ratio directional/omni = {ratio}",
        d.aggregate_throughput, o.aggregate_throughput
    );
    let complete = o.delay.is_some() && d.delay.is_some() && o.periods > 0 && d.periods > 0;
    ensure(
        shape && complete && wall < 60.0 && d.aggregate_throughput >= o.aggregate_throughput && ratio <= 0.8,
        detail,
    )
}

fn formulas() -> Outcome {
    let u = upsilon(1e-5).map_err(|e| e.to_string())?;
    if (u - 0.15147).abs() > 1e-4 {
        return Err(format!("upsilon(1e-5) = {u}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 10_000 {
        let p_tx = 10f64.powf(rng.gen_range(-6.0..0.0));
        let d = rng.gen_range(1.0..1000.0);
        let alpha = rng.gen_range(2.0..6.0);
        let omega = rng.gen_range(0.1..10.0);
        let h2 = rng.gen_range(0.01..5.0);
        let w = rng.gen_range(1e5..5e7);
        let n0 = 10f64.powf(rng.gen_range(-21.0..-17.0));
        let ups = upsilon(10f64.powf(rng.gen_range(-9.0..-1.5))).unwrap();
        let gamma = snr(received_power(p_tx, omega, d, alpha).unwrap(), h2, n0, w).unwrap();
        let r = rate(w, ups, gamma).unwrap();
        if r < 1e-3 {
            continue;
        }
        let back = required_tx_power(r, w, n0, channel_gain(ups, omega, d, alpha, h2).unwrap()).unwrap();
        worst = worst.max(((back - p_tx) / p_tx).abs());
        checked += 1;
    }
    let mut energy_ok = true;
    for _ in 0..1000 {
        let (p, bits, r) = (rng.gen_range(0.0..1.0), rng.gen_range(1.0..1e7), rng.gen_range(1e3..1e8));
        let direct = p * (bits / r);
        energy_ok &= (tx_energy(p, bits, r).unwrap() - direct).abs() <= 1e-12 * (1.0 + direct);
    }
    let mut delay_ok = true;
    for _ in 0..500 {
        let zeta = rng.gen_range(0.0..0.1);
        let nodes: Vec<BacklogRate> = (0..rng.gen_range(0..20))
            .map(|_| BacklogRate { backlog_bits: rng.gen_range(0.0..1e6), rate_bps: rng.gen_range(1e3..1e7) })
            .collect();
        let brute = nodes.iter().map(|n| n.backlog_bits / n.rate_bps + zeta).fold(0.0, f64::max);
        delay_ok &= max_uplink_delay(&nodes, zeta).unwrap() == brute && max_downlink_delay(&nodes, zeta).unwrap() == brute;
    }
    ensure(
        worst < 1e-9 && energy_ok && delay_ok,
        format!("upsilon(1e-5) = {u:.6}; worst round-trip error {worst:.2e} over {checked}; energy {energy_ok}; max delay {delay_ok}"),
    )
}

fn conservation() -> Outcome {
    let topo = build_topology(&TopologyConfig::default()).map_err(|e| e.to_string())?;
    let routes = Routes::from_tree(&build_tree(&topo).map_err(|e| e.to_string())?);
    let configs = [
        SimConfig { duration: 30.0, ..SimConfig::default() },
        SimConfig { duration: 10.0, mode: AntennaMode::Omni, traffic: TrafficModel::Poisson { rate_pps: 60.0 }, buffer_capacity: 10, ..SimConfig::default() },
        SimConfig { duration: 10.0, traffic: TrafficModel::Poisson { rate_pps: 200.0 }, buffer_capacity: 5, seed: 3, ..SimConfig::default() },
        SimConfig { duration: 5.0, traffic: TrafficModel::Cbr { rate_pps: 0.0 }, ..SimConfig::default() },
    ];
    let mut boundaries = 0u64;
    for (i, cfg) in configs.iter().enumerate() {
        let a = run(cfg, &topo, &routes).map_err(|e| e.to_string())?;
        let b = run(cfg, &topo, &routes).map_err(|e| e.to_string())?;
        if report_text(&a.report, &[]) != report_text(&b.report, &[]) || a.log != b.log {
            return Err(format!("config {i}: reruns differ"));
        }
        let (mut g, mut d, mut x, mut slot) = (0u64, 0u64, 0u64, 0u64);
        let mut held = vec![0i64; topo.len()];
        let mut check = |g: u64, d: u64, x: u64, held: &[i64]| -> Result<(), String> {
            boundaries += 1;
            let inside: i64 = held.iter().sum();
            if held.iter().any(|&h| h < 0) || g != d + x + inside as u64 {
                return Err(format!("config {i}: conservation broken: {g} != {d} + {x} + {inside}"));
            }
            Ok(())
        };
        for ev in &a.log.events {
            if ev.slot() != slot {
                check(g, d, x, &held)?;
                slot = ev.slot();
            }
            match ev {
                Event::Generate { node, .. } => {
                    g += 1;
                    held[node.index()] += 1;
                }
                Event::Tx { tx, rx, packets, .. } => {
                    held[tx.index()] -= packets.len() as i64;
                    held[rx.index()] += packets.len() as i64;
                }
                Event::Deliver { node, .. } => {
                    d += 1;
                    held[node.index()] -= 1;
                }
                Event::Drop { node, .. } => {
                    x += 1;
                    held[node.index()] -= 1;
                }
                Event::Period { .. } => {}
            }
        }
        check(g, d, x, &held)?;
        let r = &a.report;
        if r.generated != r.delivered + r.dropped + r.in_buffers {
            return Err(format!("config {i}: report totals do not balance"));
        }
    }
    Ok(format!("{} configurations, {boundaries} slot boundaries balanced, reruns byte-identical", configs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("three links: 1 slot directional, 3 omni", three_links),
        ("four-node pairs", || scenario("four-node")),
        ("walk-through golden trace", || scenario("walkthrough")),
        ("dominance over random topologies", dominance),
        ("default configuration comparison", table_defaults),
        ("formula suite", formulas),
        ("conservation and determinism", conservation),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
