//! Node layout, the radius graph, and the convergecast tree rooted at the sink.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Node identifier. `NodeId(0)` is always the sink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u16);

impl NodeId {
    pub const SINK: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn distance_to(self, other: Position) -> f64 {
        libm::hypot(other.x - self.x, other.y - self.y)
    }
}

/// Anything that can resolve a node to a position. The global [`Topology`]
/// implements it, and so does a node's locally learned position table.
pub trait Locate {
    fn locate(&self, id: NodeId) -> Option<Position>;
}

impl Locate for BTreeMap<NodeId, Position> {
    fn locate(&self, id: NodeId) -> Option<Position> {
        self.get(&id).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

impl Area {
    pub const fn new(width: f64, height: f64) -> Self {
        Area { width, height }
    }

    pub fn center(self) -> Position {
        Position::new(self.width / 2.0, self.height / 2.0)
    }

    pub fn contains(self, p: Position) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Placement {
    /// Sink at the configured position, every other node uniform over the
    /// area. With `require_connected`, the layout is redrawn (from the same
    /// seeded stream) until the radius graph is connected.
    Uniform { require_connected: bool },
    /// Positions indexed by node id.
    Explicit(Vec<Position>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyConfig {
    pub area: Area,
    pub nodes: usize,
    pub radius: f64,
    /// Defaults to the area center.
    pub sink_position: Option<Position>,
    pub placement: Placement,
    pub seed: u64,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig {
            area: Area::new(1000.0, 1000.0),
            nodes: 16,
            radius: DEFAULT_RADIUS_M,
            sink_position: None,
            placement: Placement::Uniform { require_connected: true },
            seed: 1,
        }
    }
}

pub const DEFAULT_RADIUS_M: f64 = 350.0;
pub const MAX_PLACEMENT_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    area: Area,
    radius: f64,
    positions: Vec<Position>,
}

impl Topology {
    pub fn from_positions(area: Area, radius: f64, positions: Vec<Position>) -> Result<Self> {
        if !(area.width > 0.0 && area.height > 0.0) {
            return Err(Error::Config(format!(
                "area must be positive, got {}x{}",
                area.width, area.height
            )));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Config(format!("radius must be positive, got {radius}")));
        }
        if positions.is_empty() {
            return Err(Error::Config("topology needs at least the sink".into()));
        }
        if positions.len() > u16::MAX as usize {
            return Err(Error::Config(format!("too many nodes: {}", positions.len())));
        }
        if let Some((i, p)) = positions.iter().enumerate().find(|(_, p)| !area.contains(**p)) {
            return Err(Error::Config(format!(
                "node {i} at ({}, {}) lies outside the {}x{} area",
                p.x, p.y, area.width, area.height
            )));
        }
        Ok(Topology { area, radius, positions })
    }

    pub fn area(&self) -> Area {
        self.area
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn sink(&self) -> NodeId {
        NodeId::SINK
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.index() < self.positions.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.positions.len()).map(|i| NodeId(i as u16))
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn position(&self, id: NodeId) -> Result<Position> {
        self.positions.get(id.index()).copied().ok_or(Error::UnknownNode(id))
    }

    pub fn distance(&self, a: NodeId, b: NodeId) -> Result<f64> {
        Ok(self.position(a)?.distance_to(self.position(b)?))
    }

    /// Closed-ball connectivity: distance equal to the radius is in range.
    pub fn in_range(&self, a: NodeId, b: NodeId) -> bool {
        match (self.position(a), self.position(b)) {
            (Ok(pa), Ok(pb)) => pa.distance_to(pb) <= self.radius,
            _ => false,
        }
    }

    /// All other nodes within the communication radius, in id order.
    pub fn neighbors(&self, node: NodeId) -> Result<Vec<NodeId>> {
        let p = self.position(node)?;
        Ok(self
            .node_ids()
            .filter(|&j| j != node && p.distance_to(self.positions[j.index()]) <= self.radius)
            .collect())
    }

    pub fn adjacency(&self) -> Vec<Vec<NodeId>> {
        self.node_ids()
            .map(|i| self.neighbors(i).unwrap_or_default())
            .collect()
    }

    /// Nodes with no path to the sink in the radius graph.
    pub fn unreachable(&self) -> Vec<NodeId> {
        let hops = hop_counts(&self.adjacency(), NodeId::SINK);
        self.node_ids().filter(|n| hops[n.index()].is_none()).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.unreachable().is_empty()
    }
}

impl Locate for Topology {
    fn locate(&self, id: NodeId) -> Option<Position> {
        self.positions.get(id.index()).copied()
    }
}

pub fn build_topology(config: &TopologyConfig) -> Result<Topology> {
    let TopologyConfig { area, nodes, radius, sink_position, ref placement, seed } = *config;
    if nodes == 0 {
        return Err(Error::Config("node count must be at least 1".into()));
    }
    if !(area.width > 0.0 && area.height > 0.0) {
        return Err(Error::Config(format!(
            "area must be positive, got {}x{}",
            area.width, area.height
        )));
    }
    if !(radius > 0.0) {
        return Err(Error::Config(format!("radius must be positive, got {radius}")));
    }
    match placement {
        Placement::Explicit(positions) => {
            if positions.len() != nodes {
                return Err(Error::Config(format!(
                    "explicit placement lists {} positions for {} nodes",
                    positions.len(),
                    nodes
                )));
            }
            Topology::from_positions(area, radius, positions.clone())
        }
        Placement::Uniform { require_connected } => {
            let sink = sink_position.unwrap_or_else(|| area.center());
            let mut rng = rng::stream(seed, rng::STREAM_PLACEMENT);
            let mut last = None;
            for _ in 0..MAX_PLACEMENT_ATTEMPTS {
                let mut positions = Vec::with_capacity(nodes);
                positions.push(sink);
                for _ in 1..nodes {
                    let x = rng.gen::<f64>() * area.width;
                    let y = rng.gen::<f64>() * area.height;
                    positions.push(Position::new(x, y));
                }
                let topo = Topology::from_positions(area, radius, positions)?;
                if !require_connected || topo.is_connected() {
                    return Ok(topo);
                }
                last = Some(topo);
            }
            let unreachable = last.map(|t| t.unreachable()).unwrap_or_default();
            Err(Error::Disconnected(unreachable))
        }
    }
}

fn hop_counts(adjacency: &[Vec<NodeId>], root: NodeId) -> Vec<Option<u32>> {
    let mut hops = vec![None; adjacency.len()];
    if root.index() >= adjacency.len() {
        return hops;
    }
    hops[root.index()] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let next = hops[u.index()].map(|h| h + 1);
        for &v in &adjacency[u.index()] {
            if hops[v.index()].is_none() {
                hops[v.index()] = next;
                queue.push_back(v);
            }
        }
    }
    hops
}

/// Convergecast tree rooted at the sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    parent: Vec<Option<NodeId>>,
    level: Vec<u32>,
    children: Vec<Vec<NodeId>>,
}

impl Tree {
    /// Builds a tree from an explicit parent assignment, checking that every
    /// edge is within radius, the sink is the only root, and there are no
    /// cycles.
    pub fn from_parents(topology: &Topology, parents: &[(NodeId, NodeId)]) -> Result<Self> {
        let n = topology.len();
        let mut parent = vec![None; n];
        for &(child, p) in parents {
            if !topology.contains(child) {
                return Err(Error::UnknownNode(child));
            }
            if !topology.contains(p) {
                return Err(Error::UnknownNode(p));
            }
            if child == NodeId::SINK {
                return Err(Error::Config("the sink cannot have a parent".into()));
            }
            if !topology.in_range(child, p) {
                return Err(Error::Config(format!("{child} and {p} are not within radius")));
            }
            parent[child.index()] = Some(p);
        }
        let orphans: Vec<NodeId> = topology
            .node_ids()
            .filter(|&v| v != NodeId::SINK && parent[v.index()].is_none())
            .collect();
        if !orphans.is_empty() {
            return Err(Error::Disconnected(orphans));
        }
        let level = levels_from_parents(&parent)?;
        Ok(Tree::assemble(parent, level))
    }

    fn assemble(parent: Vec<Option<NodeId>>, level: Vec<u32>) -> Self {
        let mut children = vec![Vec::new(); parent.len()];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[p.index()].push(NodeId(i as u16));
            }
        }
        Tree { parent, level, children }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> NodeId {
        NodeId::SINK
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.parent.get(node.index()).copied().flatten()
    }

    pub fn level(&self, node: NodeId) -> Option<u32> {
        self.level.get(node.index()).copied()
    }

    pub fn children(&self, node: NodeId) -> &[NodeId] {
        self.children.get(node.index()).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn parents(&self) -> &[Option<NodeId>] {
        &self.parent
    }

    pub fn levels(&self) -> &[u32] {
        &self.level
    }

    pub fn depth(&self) -> u32 {
        self.level.iter().copied().max().unwrap_or(0)
    }

    /// Hop path from `node` up to the sink, inclusive at both ends.
    pub fn path_to_sink(&self, node: NodeId) -> Vec<NodeId> {
        let mut path = vec![node];
        let mut cur = node;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path
    }

    /// `node` plus every descendant.
    pub fn subtree(&self, node: NodeId) -> BTreeSet<NodeId> {
        let mut members = BTreeSet::new();
        let mut stack = vec![node];
        while let Some(u) = stack.pop() {
            if members.insert(u) {
                stack.extend_from_slice(self.children(u));
            }
        }
        members
    }
}

fn levels_from_parents(parent: &[Option<NodeId>]) -> Result<Vec<u32>> {
    let n = parent.len();
    let mut level: Vec<Option<u32>> = vec![None; n];
    if n > 0 {
        level[0] = Some(0);
    }
    for start in 0..n {
        let mut chain = Vec::new();
        let mut cur = NodeId(start as u16);
        while level[cur.index()].is_none() {
            if chain.contains(&cur) {
                return Err(Error::RoutingCycle(cur));
            }
            chain.push(cur);
            match parent[cur.index()] {
                Some(p) => cur = p,
                None => return Err(Error::Disconnected(vec![cur])),
            }
        }
        let mut l = level[cur.index()].unwrap_or(0);
        for &v in chain.iter().rev() {
            l += 1;
            level[v.index()] = Some(l);
        }
    }
    Ok(level.into_iter().map(|l| l.unwrap_or(0)).collect())
}

/// Shortest-hop tree rooted at the sink. Among parent candidates one hop
/// closer to the sink, the lowest node id wins.
pub fn build_tree(topology: &Topology) -> Result<Tree> {
    let adjacency = topology.adjacency();
    let hops = hop_counts(&adjacency, NodeId::SINK);
    let unreachable: Vec<NodeId> = topology.node_ids().filter(|n| hops[n.index()].is_none()).collect();
    if !unreachable.is_empty() {
        return Err(Error::Disconnected(unreachable));
    }
    let level: Vec<u32> = hops.into_iter().map(|h| h.unwrap_or(0)).collect();
    let parent = topology
        .node_ids()
        .map(|v| {
            if v == NodeId::SINK {
                return None;
            }
            // adjacency lists are id-sorted, so the first match is the lowest id
            adjacency[v.index()]
                .iter()
                .copied()
                .find(|u| level[u.index()] + 1 == level[v.index()])
        })
        .collect();
    Ok(Tree::assemble(parent, level))
}

/// Subtree hanging off one child of the sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopSubtree {
    pub root: NodeId,
    pub members: BTreeSet<NodeId>,
}

impl TopSubtree {
    /// A top-subtree is eligible when its root has at least one packet queued.
    pub fn is_eligible(&self, backlog: &[u32]) -> bool {
        backlog.get(self.root.index()).is_some_and(|&b| b > 0)
    }
}

pub fn top_subtrees(tree: &Tree) -> Vec<TopSubtree> {
    tree.children(tree.root())
        .iter()
        .map(|&root| TopSubtree { root, members: tree.subtree(root) })
        .collect()
}
