//! The simulated classical channel: in-order, reliable, authenticated.
//! Every message is logged for audit and counted per protocol step.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusEvent {
    pub step: String,
    pub sender: String,
    /// A party name, or "broadcast".
    pub receiver: String,
    pub payload_bits: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MessageBus {
    pub events: Vec<BusEvent>,
    pub bits_per_step: BTreeMap<String, usize>,
}

impl MessageBus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn send(&mut self, step: &str, sender: String, receiver: String, payload_bits: usize) {
        *self.bits_per_step.entry(step.to_string()).or_insert(0) += payload_bits;
        self.events.push(BusEvent {
            step: step.to_string(),
            sender,
            receiver,
            payload_bits,
        });
    }

    pub fn broadcast(&mut self, step: &str, sender: String, payload_bits: usize) {
        self.send(step, sender, "broadcast".into(), payload_bits);
    }

    pub fn bits_for(&self, step: &str) -> usize {
        self.bits_per_step.get(step).copied().unwrap_or(0)
    }

    pub fn total_bits(&self) -> usize {
        self.bits_per_step.values().sum()
    }
}

pub fn party_name(index: usize) -> String {
    format!("P{index}")
}
