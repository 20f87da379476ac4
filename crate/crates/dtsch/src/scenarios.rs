//! Pinned fixtures with known expected outcomes.

use std::fmt;

use dtsch_core::scheduler::{omni_baseline, run_scheduling_period, MessageKind, Phase, Routes, SchedulerConfig, SchedulingOutcome};
use dtsch_core::topology::{build_tree, Area, NodeId, Position, Topology, Tree};
use dtsch_core::AntennaMode;

use crate::formats::trace_text;

pub const SCENARIOS: &[(&str, &str)] = &[
    ("four-node", "two pairs on a square: concurrent only with beams"),
    ("omni-3tx", "three level-1/2 links on one channel, omni: three slots"),
    ("dir-3tx", "the same three links with beams: one slot"),
    ("walkthrough", "sixteen-node scheduling period against the golden message trace"),
    ("tree16", "sixteen-node tree shape and directional vs omni schedule length"),
];

/// Expected trace of the `walkthrough` scenario.
pub const WALKTHROUGH_GOLDEN: &str = include_str!("../fixtures/walkthrough.trace");

/// Sixteen-node, three-level tree around a sink at (500, 500), radius 100.
pub const TREE16_OFFSETS: [(f64, f64); 16] = [
    (0.0, 0.0),
    (-50.0, 30.0),
    (-40.0, -10.0),
    (-50.0, -40.0),
    (-120.0, 0.0),
    (-90.0, 110.0),
    (-10.0, 115.0),
    (-60.0, -105.0),
    (-120.0, -60.0),
    (-5.0, -102.0),
    (-20.0, -130.0),
    (-90.0, -125.0),
    (-125.0, -95.0),
    (-200.0, 20.0),
    (-60.0, -200.0),
    (-200.0, -150.0),
];

/// Packets queued per node in the walk-through.
pub const WALKTHROUGH_LOADS: [u32; 16] = [0, 4, 9, 2, 14, 5, 3, 6, 2, 1, 11, 3, 2, 1, 2, 3];

pub fn tree16() -> (Topology, Tree) {
    let pos = TREE16_OFFSETS.iter().map(|&(x, y)| Position::new(500.0 + x, 500.0 + y)).collect();
    let topo = Topology::from_positions(Area::new(1000.0, 1000.0), 100.0, pos).expect("fixture is valid");
    let tree = build_tree(&topo).expect("fixture is connected");
    (topo, tree)
}

/// Square A, B, C, D with side 60 and radius 100; links A→B and C→D.
pub fn four_node() -> (Topology, Routes) {
    let pos = vec![
        Position::new(50.0, 50.0),
        Position::new(110.0, 50.0),
        Position::new(110.0, 110.0),
        Position::new(50.0, 110.0),
    ];
    let topo = Topology::from_positions(Area::new(200.0, 200.0), 100.0, pos).expect("fixture is valid");
    let routes = Routes::from_links(&topo, &[(NodeId(0), NodeId(1)), (NodeId(2), NodeId(3))]).expect("fixture links");
    (topo, routes)
}

/// One packet each at n2, n4 and n10.
pub fn three_link_backlog() -> Vec<u32> {
    let mut b = vec![0; 16];
    for i in [2, 4, 10] {
        b[i] = 1;
    }
    b
}

pub fn one_channel() -> SchedulerConfig {
    let mut c = SchedulerConfig::default();
    c.schedule.num_channels = 1;
    c
}

pub fn walkthrough() -> SchedulingOutcome {
    let (topo, tree) = tree16();
    run_scheduling_period(&topo, &Routes::from_tree(&tree), &WALKTHROUGH_LOADS, &one_channel()).expect("fixture runs")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub what: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub checks: Vec<Check>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn check(&mut self, what: impl Into<String>, passed: bool) {
        self.checks.push(Check { what: what.into(), passed });
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "  [{}] {}", if c.passed { "ok" } else { "FAIL" }, c.what)?;
        }
        write!(f, "scenario {}: {}", self.name, if self.passed() { "pass" } else { "fail" })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown scenario '{0}'")]
pub struct UnknownScenario(pub String);

fn slots_of(out: &SchedulingOutcome, tx: u16) -> Vec<u16> {
    out.schedule.cells().filter(|c| c.tx == NodeId(tx)).map(|c| c.slot).collect()
}

pub fn run(name: &str) -> Result<Verdict, UnknownScenario> {
    let mut v = Verdict { name: name.to_owned(), checks: Vec::new() };
    match name {
        "dir-3tx" | "omni-3tx" => {
            let (topo, tree) = tree16();
            let routes = Routes::from_tree(&tree);
            let (out, want) = if name == "dir-3tx" {
                (run_scheduling_period(&topo, &routes, &three_link_backlog(), &one_channel()), 1)
            } else {
                (omni_baseline(&topo, &routes, &three_link_backlog(), &one_channel()), 3)
            };
            let out = out.expect("fixture runs");
            let links: Vec<_> = out.schedule.cells().map(|c| (c.tx.0, c.rx.0)).collect();
            v.check(format!("links n2->n0, n4->n1, n10->n3 scheduled (got {links:?})"), links == [(2, 0), (4, 1), (10, 3)]);
            v.check(format!("schedule length {} (want {want})", out.schedule_length()), out.schedule_length() == want);
        }
        "four-node" => {
            let (topo, routes) = four_node();
            let mut cfg = one_channel();
            cfg.schedule.slotframe_length = 4;
            // four cells' worth each at the default 19 packets per cell
            let backlog = [76, 0, 76, 0];
            let dir = run_scheduling_period(&topo, &routes, &backlog, &cfg).expect("fixture runs");
            let omni = omni_baseline(&topo, &routes, &backlog, &cfg).expect("fixture runs");
            v.check("directional: A->B holds slots 0..4", slots_of(&dir, 0) == [0, 1, 2, 3]);
            v.check("directional: C->D holds the same slots", slots_of(&dir, 2) == [0, 1, 2, 3]);
            v.check("omni: A->B holds slots 0..4", slots_of(&omni, 0) == [0, 1, 2, 3]);
            v.check("omni: C->D holds no cell this slotframe", slots_of(&omni, 2).is_empty());
        }
        "walkthrough" => {
            let out = walkthrough();
            let first: Vec<(MessageKind, u16)> = out
                .trace
                .iter()
                .filter(|e| matches!(e.phase, Phase::Level { level: 1..=2, .. }))
                .take(6)
                .map(|e| (e.msg.kind, e.msg.src.0))
                .collect();
            let want = [
                (MessageKind::Rts, 2),
                (MessageKind::Cts, 0),
                (MessageKind::Nav, 2),
                (MessageKind::Available, 1),
                (MessageKind::Available, 3),
                (MessageKind::Rts, 4),
            ];
            v.check("opens with n2 RTS, n0 CTS, n2 NAV, n1 and n3 available, n4 RTS", first == want);
            let got = trace_text(&out.trace);
            v.check(format!("trace matches the golden file ({} lines)", got.lines().count()), got == WALKTHROUGH_GOLDEN);
            v.check("all demand scheduled", out.unscheduled.is_empty());
        }
        "tree16" => {
            let (topo, tree) = tree16();
            let routes = Routes::from_tree(&tree);
            v.check("sink children are n1, n2, n3", tree.children(tree.root()) == [NodeId(1), NodeId(2), NodeId(3)]);
            v.check("three levels", routes.max_level() == 3);
            let cfg = one_channel();
            let dir = run_scheduling_period(&topo, &routes, &WALKTHROUGH_LOADS, &cfg).expect("fixture runs");
            let omni = omni_baseline(&topo, &routes, &WALKTHROUGH_LOADS, &cfg).expect("fixture runs");
            v.check(
                format!("directional length {} <= omni length {}", dir.schedule_length(), omni.schedule_length()),
                dir.schedule_length() <= omni.schedule_length(),
            );
            let model = |mode| dtsch_core::InterferenceModel::for_topology(mode, cfg.schedule.beams, &topo, 1.0);
            let clean = dtsch_core::schedule::audit(dir.schedule.cells(), &model(AntennaMode::Directional), &topo).is_empty()
                && dtsch_core::schedule::audit(omni.schedule.cells(), &model(AntennaMode::Omni), &topo).is_empty();
            v.check("both schedules conflict-free", clean);
        }
        _ => return Err(UnknownScenario(name.to_owned())),
    }
    Ok(v)
}
