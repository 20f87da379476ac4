#![allow(dead_code)]

use dtsch_core::scheduler::Routes;
use dtsch_core::topology::{build_tree, Area, NodeId, Position, Topology, Tree};

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
    let topo = Topology::from_positions(Area::new(1000.0, 1000.0), 100.0, pos).unwrap();
    let tree = build_tree(&topo).unwrap();
    (topo, tree)
}

/// Square A, B, C, D with side 60, radius 100: every pair in range.
pub fn four_node() -> (Topology, Routes) {
    let pos = vec![
        Position::new(50.0, 50.0),
        Position::new(110.0, 50.0),
        Position::new(110.0, 110.0),
        Position::new(50.0, 110.0),
    ];
    let topo = Topology::from_positions(Area::new(200.0, 200.0), 100.0, pos).unwrap();
    let routes = Routes::from_links(&topo, &[(NodeId(0), NodeId(1)), (NodeId(2), NodeId(3))]).unwrap();
    (topo, routes)
}

pub fn n(i: u16) -> NodeId {
    NodeId(i)
}
