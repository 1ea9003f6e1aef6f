//! Virtual network: latency/bandwidth profiles, the round clock and the
//! per-session counters.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct NetProfile {
    pub name: String,
    /// One-way latency per round, milliseconds.
    pub latency_ms: f64,
    /// Link bandwidth, bits per second.
    pub bandwidth_bps: f64,
}

const GBPS: f64 = 1e9;

impl NetProfile {
    pub fn n_low() -> Self {
        Self::named("n_low", 0.1, GBPS)
    }

    pub fn n_med() -> Self {
        Self::named("n_med", 5.0, GBPS)
    }

    pub fn n_high() -> Self {
        Self::named("n_high", 40.0, GBPS)
    }

    pub fn custom(latency_ms: f64, bandwidth_bps: f64) -> Result<Self> {
        let p = Self::named("custom", latency_ms, bandwidth_bps);
        p.validate()?;
        Ok(p)
    }

    /// Looks up a named preset (`n_low`, `n_med`, `n_high`).
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "n_low" => Ok(Self::n_low()),
            "n_med" => Ok(Self::n_med()),
            "n_high" => Ok(Self::n_high()),
            other => Err(Error::Config(format!("unknown network profile `{other}`"))),
        }
    }

    fn named(name: &str, latency_ms: f64, bandwidth_bps: f64) -> Self {
        NetProfile {
            name: name.to_string(),
            latency_ms,
            bandwidth_bps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.latency_ms >= 0.0 && self.latency_ms.is_finite()) {
            return Err(Error::Config(format!(
                "latency must be >= 0, got {}",
                self.latency_ms
            )));
        }
        if !(self.bandwidth_bps > 0.0 && self.bandwidth_bps.is_finite()) {
            return Err(Error::Config(format!(
                "bandwidth must be > 0, got {}",
                self.bandwidth_bps
            )));
        }
        Ok(())
    }

    /// Milliseconds needed to push `bytes` through one link.
    pub fn transfer_ms(&self, bytes: u64) -> f64 {
        bytes as f64 * 8.0 / self.bandwidth_bps * 1000.0
    }
}

impl Default for NetProfile {
    fn default() -> Self {
        Self::n_low()
    }
}

/// Rounds and bytes charged to one operation label.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OpCost {
    pub rounds: u64,
    pub bytes: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RoundStats {
    pub online_rounds: u64,
    /// Sum over rounds of the per-party payload.
    pub online_bytes: u64,
    /// Per-party bytes received from the dealer.
    pub offline_bytes: u64,
    pub simulated_time_ms: f64,
    pub latency_time_ms: f64,
    pub transfer_time_ms: f64,
    /// Online messages by sender; the last slot is the dealer.
    pub online_messages: Vec<u64>,
    /// Rounds and bytes by outermost operation label.
    pub attribution: BTreeMap<String, OpCost>,
}

impl RoundStats {
    pub fn new(n_parties: usize) -> Self {
        RoundStats {
            online_messages: vec![0; n_parties + 1],
            ..Default::default()
        }
    }

    /// Charges one completed round: `simulated_time += latency + transfer`.
    /// Returns the increment in milliseconds.
    pub fn advance_clock(&mut self, round_bytes: u64, profile: &NetProfile) -> f64 {
        let transfer = profile.transfer_ms(round_bytes);
        self.latency_time_ms += profile.latency_ms;
        self.transfer_time_ms += transfer;
        let dt = profile.latency_ms + transfer;
        self.simulated_time_ms += dt;
        dt
    }

    pub fn dealer_online_messages(&self) -> u64 {
        self.online_messages.last().copied().unwrap_or(0)
    }
}
