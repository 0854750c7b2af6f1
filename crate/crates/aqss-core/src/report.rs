//! Run reports: every command echoes what it ran, a digest of its inputs,
//! and a deterministic outputs section.

use crate::error::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// The envelope every CLI command emits. For a fixed seed and inputs the
/// `outputs` section is byte-identical across runs; `timing_ms` is the only
/// nondeterministic field.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub inputs_digest: String,
    pub outputs: serde_json::Value,
    pub timing_ms: u128,
}

impl RunReport {
    pub fn new(
        command: &str,
        seed: u64,
        inputs: &impl Serialize,
        outputs: serde_json::Value,
        timing_ms: u128,
    ) -> Result<Self> {
        let canonical = serde_json::to_vec(inputs)?;
        let mut hasher = Sha256::new();
        hasher.update(&canonical);
        let digest = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect::<String>();
        Ok(RunReport {
            command: command.to_string(),
            seed,
            inputs_digest: format!("sha256:{digest}"),
            outputs,
            timing_ms,
        })
    }

    pub fn render(&self, pretty: bool) -> String {
        if pretty {
            serde_json::to_string_pretty(self).expect("report serializes")
        } else {
            serde_json::to_string(self).expect("report serializes")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_depends_on_inputs_only() {
        let a = RunReport::new("x", 1, &("gamma", 3), serde_json::json!({"k": 1}), 5).unwrap();
        let b = RunReport::new("x", 1, &("gamma", 3), serde_json::json!({"k": 2}), 9).unwrap();
        let c = RunReport::new("x", 1, &("other", 3), serde_json::json!({"k": 1}), 5).unwrap();
        assert_eq!(a.inputs_digest, b.inputs_digest);
        assert_ne!(a.inputs_digest, c.inputs_digest);
    }

    #[test]
    fn outputs_section_serializes_with_sorted_keys() {
        let report = RunReport::new(
            "x",
            0,
            &"in",
            serde_json::json!({"zeta": 1, "alpha": 2}),
            0,
        )
        .unwrap();
        let rendered = report.render(false);
        let alpha = rendered.find("alpha").unwrap();
        let zeta = rendered.find("zeta").unwrap();
        assert!(alpha < zeta, "keys must serialize in sorted order");
    }
}
