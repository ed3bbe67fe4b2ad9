//! JSON report envelope shared by the CLI and the verifiers: every output
//! embeds the full run configuration so results are replayable byte-for-byte.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    /// Flags in canonical (sorted) order.
    pub args: BTreeMap<String, String>,
    pub seed: u64,
    pub mode: String,
    pub workers: usize,
    pub exact_threshold: usize,
    pub samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub schema: u32,
    pub config: RunConfig,
    pub payload: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(config: RunConfig, payload: T) -> Self {
        Report { schema: SCHEMA_VERSION, config, payload }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_deterministic() {
        let mut cfg = RunConfig { command: "verify".into(), seed: 7, ..Default::default() };
        cfg.args.insert("eps".into(), "0.3".into());
        cfg.args.insert("mode".into(), "exact".into());
        let a = Report::new(cfg.clone(), vec![1, 2, 3]).to_json();
        let b = Report::new(cfg, vec![1, 2, 3]).to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": 1"));
    }
}
