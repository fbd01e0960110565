use std::time::{SystemTime, UNIX_EPOCH};

use lp_extremal::Tolerances;
use serde::{Deserialize, Serialize};

/// What produced an output file. Two runs with equal manifests (ignoring
/// `timestamp`) write equal numerical payloads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    /// Effective tolerances after applying `--tol`.
    pub tolerances: Tolerances,
    pub tol_override: Option<f64>,
    pub rng_seed: Option<u64>,
    pub version: String,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` wins when set.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, args: Vec<String>, tol_override: Option<f64>, rng_seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_owned(),
            args,
            tolerances: tol_override.map_or_else(Tolerances::default, Tolerances::uniform),
            tol_override,
            rng_seed,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp: timestamp(),
        }
    }
}

fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()))
}
