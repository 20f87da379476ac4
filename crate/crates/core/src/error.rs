use alloc::string::String;
use alloc::vec::Vec;

use crate::schedule::Conflict;
use crate::topology::NodeId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("direction undefined between coincident positions")]
    UndefinedDirection,

    #[error("opposite beam undefined for odd sector count {0}")]
    OddSectorCount(u16),

    #[error("{what} outside its domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("topology disconnected; unreachable from sink: {0:?}")]
    Disconnected(Vec<NodeId>),

    #[error("routing contains a cycle through {0}")]
    RoutingCycle(NodeId),

    #[error("cell rejected: {} conflict(s)", .0.len())]
    Conflict(Vec<Conflict>),

    #[error("malformed cell: {0}")]
    MalformedCell(&'static str),

    #[error("cell not present in schedule")]
    CellNotFound,

    #[error("malformed event log: {0}")]
    MalformedLog(String),
}

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
