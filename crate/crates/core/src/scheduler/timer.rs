use crate::error::{Error, Result};

/// Contention timer: `base_ticks / (1 + backlog)`, at least one tick. Ties
/// between equal timers resolve to the lower node id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimerPolicy {
    pub base_ticks: u32,
    /// Micro-ticks per scheduling slot.
    pub ticks_per_slot: u32,
}

impl Default for TimerPolicy {
    fn default() -> Self {
        TimerPolicy { base_ticks: 60, ticks_per_slot: 64 }
    }
}

impl TimerPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.base_ticks == 0 {
            return Err(Error::Config("timer base must be at least one tick".into()));
        }
        // expiry, then one tick of RTS timeout, must land inside the slot
        if self.base_ticks.saturating_add(2) > self.ticks_per_slot {
            return Err(Error::Config(alloc::format!(
                "timer base {} does not fit a {}-tick scheduling slot",
                self.base_ticks, self.ticks_per_slot
            )));
        }
        Ok(())
    }
}

pub fn timer_value(backlog_packets: u32, policy: &TimerPolicy) -> u32 {
    (policy.base_ticks / backlog_packets.saturating_add(1)).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let p = TimerPolicy { base_ticks: 60, ticks_per_slot: 64 };
        assert_eq!(timer_value(0, &p), 60);
        assert_eq!(timer_value(59, &p), 1);
        assert_eq!(timer_value(u32::MAX, &p), 1);
        assert_eq!(timer_value(2, &p), 20);
    }

    #[test]
    fn validation() {
        assert!(TimerPolicy::default().validate().is_ok());
        assert!(TimerPolicy { base_ticks: 0, ticks_per_slot: 64 }.validate().is_err());
        assert!(TimerPolicy { base_ticks: 63, ticks_per_slot: 64 }.validate().is_err());
    }
}
