//! Experiment manifest embedded in every JSON artifact: the command, the
//! sha256 digests of its input files, its parameters, the toolkit version,
//! and the seed when randomness is involved.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub inputs: BTreeMap<String, String>,
    pub params: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Manifest {
    pub fn new(command: &str, params: serde_json::Value) -> Manifest {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: BTreeMap::new(),
            params,
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Manifest {
        self.seed = seed;
        self
    }

    /// Records a digest for an input file already read into `bytes`.
    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        let digest = Sha256::digest(bytes);
        self.inputs
            .insert(path.display().to_string(), hex::encode(digest));
    }
}

/// The uniform output envelope: manifest plus command-specific result.
#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub manifest: Manifest,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serializes")
    }
}
