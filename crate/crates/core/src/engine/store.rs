//! Per-user profile weights and recorded query runtimes, each persisted as a
//! small JSON file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::EngineError;

fn load_json<T: Default + DeserializeOwned>(path: &Path) -> Result<T, EngineError> {
    match std::fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text)
            .map_err(|e| EngineError::Format { path: path.to_path_buf(), message: e.to_string() }),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(T::default()),
        Err(e) => Err(EngineError::Io { path: path.to_path_buf(), source: e }),
    }
}

fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), EngineError> {
    let mut text = serde_json::to_string_pretty(value).expect("store serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| EngineError::Io { path: path.to_path_buf(), source: e })
}

/// Weights per `(user, object)`; unset pairs weigh 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProfileStore {
    weights: BTreeMap<String, BTreeMap<String, u64>>,
}

impl ProfileStore {
    pub fn new() -> ProfileStore {
        ProfileStore::default()
    }

    /// Loads the store at `path`; a missing file is an empty store.
    pub fn load(path: impl AsRef<Path>) -> Result<ProfileStore, EngineError> {
        load_json(path.as_ref())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), EngineError> {
        save_json(path.as_ref(), self)
    }

    pub fn put(&mut self, user: &str, object: &str, weight: i64) -> Result<(), EngineError> {
        let w = u64::try_from(weight).map_err(|_| EngineError::NegativeWeight(weight))?;
        self.weights.entry(user.to_string()).or_default().insert(object.to_string(), w);
        Ok(())
    }

    pub fn get(&self, user: &str, object: &str) -> u64 {
        self.weights.get(user).and_then(|m| m.get(object)).copied().unwrap_or(0)
    }

    /// All weights recorded for `user`, by object name.
    pub fn user(&self, user: &str) -> BTreeMap<String, u64> {
        self.weights.get(user).cloned().unwrap_or_default()
    }
}

/// Observed runtimes in milliseconds per query-shape key.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RuntimeHistory {
    samples: BTreeMap<String, Vec<f64>>,
}

impl RuntimeHistory {
    pub fn new() -> RuntimeHistory {
        RuntimeHistory::default()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RuntimeHistory, EngineError> {
        load_json(path.as_ref())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), EngineError> {
        save_json(path.as_ref(), self)
    }

    pub fn record(&mut self, key: &str, millis: f64) -> Result<(), EngineError> {
        if millis.is_nan() || millis < 0.0 || !millis.is_finite() {
            return Err(EngineError::NegativeDuration(millis));
        }
        self.samples.entry(key.to_string()).or_default().push(millis);
        Ok(())
    }

    /// Mean of the recorded runtimes for `key`, `None` without history.
    pub fn estimate(&self, key: &str) -> Option<f64> {
        let s = self.samples.get(key).filter(|s| !s.is_empty())?;
        Some(s.iter().sum::<f64>() / s.len() as f64)
    }

    pub fn samples(&self, key: &str) -> &[f64] {
        self.samples.get(key).map_or(&[], Vec::as_slice)
    }
}
