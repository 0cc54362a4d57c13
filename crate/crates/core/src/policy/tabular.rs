use super::{uniform_probs, validate_distribution, Policy, PolicyError, ValueFn};
use crate::game::{GameParams, History, InfoState};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Metadata stored at the top of a table file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableHeader {
    pub params: GameParams,
    /// `"policy"` or `"value"`.
    pub kind: String,
}

#[derive(Serialize, Deserialize)]
struct TableFile<T> {
    header: TableHeader,
    table: BTreeMap<String, T>,
}

fn read_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<TableFile<T>, PolicyError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PolicyError::Other(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| PolicyError::Other(format!("{}: {e}", path.display())))
}

fn write_file<T: Serialize>(path: &Path, file: &TableFile<T>) -> Result<(), PolicyError> {
    let mut text = serde_json::to_string_pretty(file).expect("table serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| PolicyError::Other(format!("cannot write {}: {e}", path.display())))
}

/// Infostate-keyed action distributions; unseen keys play uniformly.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularPolicy {
    pub name: String,
    pub params: GameParams,
    pub table: BTreeMap<String, Vec<f64>>,
}

impl TabularPolicy {
    pub fn new(name: impl Into<String>, params: GameParams) -> Self {
        TabularPolicy { name: name.into(), params, table: BTreeMap::new() }
    }

    /// Stores a distribution after checking it against the infostate.
    pub fn insert(&mut self, s: &InfoState, probs: Vec<f64>) -> Result<(), PolicyError> {
        validate_distribution(s, &probs)?;
        self.table.insert(s.key(), probs);
        Ok(())
    }

    pub fn load(path: &Path, name: impl Into<String>) -> Result<Self, PolicyError> {
        let file: TableFile<Vec<f64>> = read_file(path)?;
        if file.header.kind != "policy" {
            return Err(PolicyError::Other(format!("{}: expected a policy table, found `{}`", path.display(), file.header.kind)));
        }
        let params = file.header.params;
        for (key, probs) in &file.table {
            let s = InfoState::from_key(key, params.max_rounds)
                .map_err(|e| PolicyError::Other(format!("{}: {e}", path.display())))?;
            validate_distribution(&s, probs)?;
        }
        Ok(TabularPolicy { name: name.into(), params, table: file.table })
    }

    pub fn save(&self, path: &Path) -> Result<(), PolicyError> {
        let file = TableFile {
            header: TableHeader { params: self.params, kind: "policy".into() },
            table: self.table.clone(),
        };
        write_file(path, &file)
    }
}

impl Policy for TabularPolicy {
    fn name(&self) -> &str {
        &self.name
    }

    fn probs(&self, s: &InfoState) -> Result<Vec<f64>, PolicyError> {
        s.legal_actions()?;
        Ok(self.table.get(&s.key()).cloned().unwrap_or_else(|| uniform_probs(s)))
    }
}

/// Infostate-keyed value estimates for both players; unseen keys give `default`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularValue {
    pub params: GameParams,
    pub table: BTreeMap<String, [f64; 2]>,
    pub default: [f64; 2],
}

impl TabularValue {
    pub fn new(params: GameParams) -> Self {
        TabularValue { params, table: BTreeMap::new(), default: [0.0, 0.0] }
    }

    pub fn get(&self, s: &InfoState) -> [f64; 2] {
        self.table.get(&s.key()).copied().unwrap_or(self.default)
    }

    pub fn load(path: &Path) -> Result<Self, PolicyError> {
        let file: TableFile<[f64; 2]> = read_file(path)?;
        if file.header.kind != "value" {
            return Err(PolicyError::Other(format!("{}: expected a value table, found `{}`", path.display(), file.header.kind)));
        }
        for (key, v) in &file.table {
            if !v.iter().all(|x| x.is_finite()) {
                return Err(PolicyError::Other(format!("{}: non-finite value at key {key}", path.display())));
            }
        }
        Ok(TabularValue { params: file.header.params, table: file.table, default: [0.0, 0.0] })
    }

    pub fn save(&self, path: &Path) -> Result<(), PolicyError> {
        let file = TableFile {
            header: TableHeader { params: self.params, kind: "value".into() },
            table: self.table.clone(),
        };
        write_file(path, &file)
    }
}

impl ValueFn for TabularValue {
    fn values(&self, s: &InfoState, _h: &History, _rng: &mut dyn RngCore) -> Result<[f64; 2], PolicyError> {
        Ok(self.get(s))
    }
}
