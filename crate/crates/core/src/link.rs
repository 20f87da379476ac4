//! Radio link formulas: path loss, SNR, achievable rate, the power needed to
//! sustain a rate, transmit energy, and the worst-case per-node delays.
//!
//! All quantities are linear SI units (W, Hz, W/Hz, bit/s, J, s).

use rand::Rng;

use crate::error::{domain, Result};

/// Base of the logarithm in the BER gap factor. Natural log.
pub const UPSILON_LOG_BASE: f64 = core::f64::consts::E;

/// Thermal noise floor at room temperature, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Reference radio thresholds, dBm. Not used by the simulator, which takes
/// its range from the configured radius; see [`range_for_threshold`].
pub const RX_THRESHOLD_DBM: f64 = -81.0;
pub const SENSING_THRESHOLD_DBM: f64 = -91.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Noise power spectral density, W/Hz.
    pub noise_density: f64,
    /// Bandwidth per link, Hz.
    pub bandwidth: f64,
    /// Path-loss exponent, 2..=6.
    pub path_loss_exponent: f64,
    /// Path-loss reference constant.
    pub path_loss_constant: f64,
    /// Target bit error rate, strictly inside (0, 0.2).
    pub ber: f64,
    /// Uplink channel access time, s.
    pub access_time_up: f64,
    /// Downlink channel access time, s.
    pub access_time_down: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        LinkParams {
            noise_density: dbm_to_watts(THERMAL_NOISE_DBM_PER_HZ),
            bandwidth: 20e6,
            path_loss_exponent: 3.0,
            path_loss_constant: 1.0,
            ber: 1e-5,
            access_time_up: 0.0,
            access_time_down: 0.0,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_density > 0.0) {
            return Err(domain("noise density", self.noise_density));
        }
        if !(self.bandwidth > 0.0) {
            return Err(domain("bandwidth", self.bandwidth));
        }
        if !(2.0..=6.0).contains(&self.path_loss_exponent) {
            return Err(domain("path-loss exponent", self.path_loss_exponent));
        }
        if !(self.path_loss_constant > 0.0) {
            return Err(domain("path-loss constant", self.path_loss_constant));
        }
        upsilon(self.ber)?;
        if !(self.access_time_up >= 0.0) {
            return Err(domain("uplink access time", self.access_time_up));
        }
        if !(self.access_time_down >= 0.0) {
            return Err(domain("downlink access time", self.access_time_down));
        }
        Ok(())
    }

    /// Channel gain for a link of length `distance` under `fading_power`.
    pub fn gain(&self, distance: f64, fading_power: f64) -> Result<f64> {
        channel_gain(
            upsilon(self.ber)?,
            self.path_loss_constant,
            distance,
            self.path_loss_exponent,
            fading_power,
        )
    }

    /// Transmit power needed to sustain `rate` over a link with gain `gain`.
    pub fn power_for_rate(&self, rate_bps: f64, gain: f64) -> Result<f64> {
        required_tx_power(rate_bps, self.bandwidth, self.noise_density, gain)
    }

    /// Fully derived state of one link at one instant.
    pub fn link_state(&self, p_tx: f64, distance: f64, fading_power: f64) -> Result<LinkState> {
        let ups = upsilon(self.ber)?;
        let p_rx = received_power(p_tx, self.path_loss_constant, distance, self.path_loss_exponent)?;
        let snr = snr(p_rx, fading_power, self.noise_density, self.bandwidth)?;
        Ok(LinkState {
            distance,
            fading_power,
            gain: channel_gain(ups, self.path_loss_constant, distance, self.path_loss_exponent, fading_power)?,
            snr,
            rate: rate(self.bandwidth, ups, snr)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub distance: f64,
    pub fading_power: f64,
    pub gain: f64,
    pub snr: f64,
    pub rate: f64,
}

/// Per-node inputs to the delay and computation formulas.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NodeLoad {
    pub backlog_bits: f64,
    /// CPU cycles per data unit.
    pub compute_density: f64,
    /// Data units.
    pub data_size: f64,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    libm::pow(10.0, dbm / 10.0) / 1000.0
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * libm::log10(watts * 1000.0)
}

/// BER gap factor `-1.5 / ln(5·BER)`.
pub fn upsilon(ber: f64) -> Result<f64> {
    if !(ber > 0.0 && ber < 0.2) {
        return Err(domain("BER", ber));
    }
    Ok(-1.5 / libm::log(5.0 * ber))
}

/// Received power after path loss: `p_tx · ω · d^-α`.
pub fn received_power(p_tx: f64, omega: f64, distance: f64, alpha: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(domain("distance", distance));
    }
    if !(p_tx >= 0.0) {
        return Err(domain("transmit power", p_tx));
    }
    Ok(p_tx * omega * libm::pow(distance, -alpha))
}

/// Signal-to-noise ratio `p_rx·|h|² / (N0·W)`.
pub fn snr(p_rx: f64, fading_power: f64, noise_density: f64, bandwidth: f64) -> Result<f64> {
    if !(noise_density > 0.0) {
        return Err(domain("noise density", noise_density));
    }
    if !(bandwidth > 0.0) {
        return Err(domain("bandwidth", bandwidth));
    }
    Ok(p_rx * fading_power / (noise_density * bandwidth))
}

/// Achievable rate `W·log2(1 + υγ)`, bit/s.
pub fn rate(bandwidth: f64, upsilon: f64, snr: f64) -> Result<f64> {
    if !(snr >= 0.0) {
        return Err(domain("SNR", snr));
    }
    // log1p keeps precision when the SNR term is tiny
    Ok(bandwidth * libm::log1p(upsilon * snr) / core::f64::consts::LN_2)
}

/// Channel gain `υ·ω·d^-α·|h|²`.
pub fn channel_gain(upsilon: f64, omega: f64, distance: f64, alpha: f64, fading_power: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(domain("distance", distance));
    }
    Ok(upsilon * omega * libm::pow(distance, -alpha) * fading_power)
}

/// Transmit power needed for rate `r`: `(N0·W/g)·(2^(r/W) − 1)`.
pub fn required_tx_power(rate_bps: f64, bandwidth: f64, noise_density: f64, gain: f64) -> Result<f64> {
    if !(gain > 0.0) {
        return Err(domain("channel gain", gain));
    }
    if !(bandwidth > 0.0) {
        return Err(domain("bandwidth", bandwidth));
    }
    if !(rate_bps >= 0.0) {
        return Err(domain("rate", rate_bps));
    }
    Ok(noise_density * bandwidth / gain * libm::expm1(rate_bps / bandwidth * core::f64::consts::LN_2))
}

/// Energy to push `bits` at `rate_bps` with transmit power `p_tx`, J.
pub fn tx_energy(p_tx: f64, bits: f64, rate_bps: f64) -> Result<f64> {
    if bits == 0.0 {
        return Ok(0.0);
    }
    if !(rate_bps > 0.0) {
        return Err(domain("rate", rate_bps));
    }
    Ok(p_tx * bits / rate_bps)
}

/// Backlog and link rate for one node in the max-delay formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacklogRate {
    pub backlog_bits: f64,
    pub rate_bps: f64,
}

fn max_delay(nodes: &[BacklogRate], access_time: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in nodes {
        let drain = if n.backlog_bits == 0.0 {
            0.0
        } else if n.rate_bps > 0.0 {
            n.backlog_bits / n.rate_bps
        } else {
            return Err(domain("link rate", n.rate_bps));
        };
        worst = worst.max(drain + access_time);
    }
    Ok(worst)
}

/// Worst per-node uplink delay `max_i(|B_i|/ru_i + ζ_u)`; 0 with no nodes.
pub fn max_uplink_delay(nodes: &[BacklogRate], access_time_up: f64) -> Result<f64> {
    max_delay(nodes, access_time_up)
}

/// Downlink mirror of [`max_uplink_delay`].
pub fn max_downlink_delay(nodes: &[BacklogRate], access_time_down: f64) -> Result<f64> {
    max_delay(nodes, access_time_down)
}

/// CPU cycles to process `data_size` units at `compute_density` cycles each.
/// Not used by the scheduler.
pub fn compute_cycles(compute_density: f64, data_size: f64) -> f64 {
    compute_density * data_size
}

/// Fading power `|h|²` for a Rayleigh amplitude: exponential with unit mean.
pub fn sample_fading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 1 - U lies in (0, 1], so the log is finite
    let u: f64 = rng.gen();
    -libm::log(1.0 - u)
}

/// Distance at which `p_tx` decays to `threshold` under the path-loss model.
pub fn range_for_threshold(p_tx: f64, threshold: f64, omega: f64, alpha: f64) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(domain("threshold", threshold));
    }
    Ok(libm::pow(p_tx * omega / threshold, 1.0 / alpha))
}
