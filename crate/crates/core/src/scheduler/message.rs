use alloc::vec::Vec;
use core::fmt;

use crate::schedule::Cell;
use crate::topology::{NodeId, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MessageKind {
    Rts,
    Cts,
    Nav,
    Available,
    SchedAdvert,
}

impl MessageKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MessageKind::Rts => "RTS",
            MessageKind::Cts => "CTS",
            MessageKind::Nav => "NAV",
            MessageKind::Available => "AVAILABLE",
            MessageKind::SchedAdvert => "SCHED_ADVERT",
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A cell together with the endpoint positions, so any node that hears it can
/// evaluate interference geometry without global knowledge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reservation {
    pub cell: Cell,
    pub tx_pos: Position,
    pub rx_pos: Position,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    None,
    /// RTS body: the preferred cell plus every channel offset the requester
    /// found free, in preference order.
    Request { reservation: Reservation, channels: Vec<u16> },
    /// CTS and NAV body.
    Reservation(Reservation),
    Advert(Vec<Reservation>),
}

/// Control-plane message. Sent omni-directionally; `dst` is `None` for
/// broadcasts, and every node in range overhears regardless of `dst`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedMessage {
    pub kind: MessageKind,
    pub src: NodeId,
    pub dst: Option<NodeId>,
    pub src_pos: Position,
    /// Data slot under negotiation.
    pub round: u16,
    pub payload: Payload,
}

impl SchedMessage {
    pub fn reservation(&self) -> Option<&Reservation> {
        match &self.payload {
            Payload::Request { reservation, .. } | Payload::Reservation(reservation) => Some(reservation),
            _ => None,
        }
    }
}

impl fmt::Display for SchedMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}->", self.kind, self.src)?;
        match self.dst {
            Some(d) => write!(f, "{d}")?,
            None => f.write_str("*")?,
        }
        let cell = |f: &mut fmt::Formatter<'_>, c: &Cell| -> fmt::Result {
            write!(f, " {}->{}@{}/{}", c.tx, c.rx, c.slot, c.channel)?;
            if let Some((tb, rb)) = c.beams {
                write!(f, " beams {tb},{rb}")?;
            }
            Ok(())
        };
        match &self.payload {
            Payload::None => Ok(()),
            Payload::Request { reservation, channels } => {
                cell(f, &reservation.cell)?;
                f.write_str(" ch")?;
                for (i, c) in channels.iter().enumerate() {
                    write!(f, "{}{c}", if i == 0 { " " } else { "," })?;
                }
                Ok(())
            }
            Payload::Reservation(r) => cell(f, &r.cell),
            Payload::Advert(rs) => {
                write!(f, " {} cell(s)", rs.len())?;
                for r in rs {
                    cell(f, &r.cell)?;
                }
                Ok(())
            }
        }
    }
}
