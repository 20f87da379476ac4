use alloc::vec::Vec;

use rand::Rng;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrafficModel {
    /// Constant bit rate: the k-th packet appears at `(k + 0.5) / rate`.
    Cbr { rate_pps: f64 },
    /// Exponential inter-arrival times with mean `1 / rate`.
    Poisson { rate_pps: f64 },
}

impl TrafficModel {
    pub fn rate(&self) -> f64 {
        match *self {
            TrafficModel::Cbr { rate_pps } | TrafficModel::Poisson { rate_pps } => rate_pps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.rate();
        if !(r.is_finite() && r >= 0.0) {
            return Err(domain("traffic rate", r));
        }
        Ok(())
    }
}

impl Default for TrafficModel {
    fn default() -> Self {
        TrafficModel::Cbr { rate_pps: 1.0 }
    }
}

/// Arrival process of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficSource {
    model: TrafficModel,
    emitted: u64,
    next_arrival: Option<f64>,
}

impl TrafficSource {
    pub fn new(model: TrafficModel) -> Self {
        TrafficSource { model, emitted: 0, next_arrival: None }
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// Creation times of packets arriving in `[start, end)`. Calls must cover
    /// consecutive, non-overlapping intervals.
    pub fn arrivals<R: Rng + ?Sized>(&mut self, rng: &mut R, start: f64, end: f64) -> Vec<f64> {
        let mut out = Vec::new();
        match self.model {
            TrafficModel::Cbr { rate_pps } => {
                if rate_pps <= 0.0 {
                    return out;
                }
                loop {
                    let t = (self.emitted as f64 + 0.5) / rate_pps;
                    if t >= end {
                        break;
                    }
                    if t >= start {
                        out.push(t);
                    }
                    self.emitted += 1;
                }
            }
            TrafficModel::Poisson { rate_pps } => {
                if rate_pps <= 0.0 {
                    return out;
                }
                let mut next = match self.next_arrival {
                    Some(t) => t,
                    None => exponential(rng, rate_pps),
                };
                while next < end {
                    if next >= start {
                        out.push(next);
                    }
                    self.emitted += 1;
                    next += exponential(rng, rate_pps);
                }
                self.next_arrival = Some(next);
            }
        }
        out
    }
}

fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.gen();
    -libm::log(1.0 - u) / rate
}

/// Packets created at `node` during slot `slot` of length `timeslot`.
pub fn generate_traffic<R: Rng + ?Sized>(rng: &mut R, source: &mut TrafficSource, slot: u64, timeslot: f64) -> Vec<f64> {
    let start = slot as f64 * timeslot;
    let end = (slot + 1) as f64 * timeslot;
    source.arrivals(rng, start, end)
}
