//! On-disk record formats.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use unfun_core::analysis::PairAnnotation;
use unfun_core::chunking::ChunkSequence;

/// One line of a corpus file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusLine {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_chunks: Option<ChunkSequence>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditOpCounts {
    #[serde(rename = "SUBSTITUTE")]
    pub substitute: usize,
    #[serde(rename = "DELETE")]
    pub delete: usize,
    #[serde(rename = "INSERT")]
    pub insert: usize,
}

/// One line of the pair export. The derived fields (`edit_distance`,
/// `chunk_edit_distance`, `edit_ops`) are recomputed on import.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairExportRecord {
    #[serde(default)]
    pub pair_id: String,
    pub original: String,
    pub modified: String,
    #[serde(default)]
    pub ratings: Vec<f64>,
    #[serde(default)]
    pub edit_distance: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chunk_edit_distance: Option<usize>,
    #[serde(default)]
    pub edit_ops: EditOpCounts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<PairAnnotation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_gold_chunks: Option<ChunkSequence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modified_gold_chunks: Option<ChunkSequence>,
}

/// Renames top-level keys of foreign JSONL records to the field names
/// used here, e.g. `{"headline": "text"}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldMap(pub BTreeMap<String, String>);

impl FieldMap {
    pub fn apply(&self, mut value: Value) -> Value {
        if self.0.is_empty() {
            return value;
        }
        if let Value::Object(map) = &mut value {
            for (from, to) in &self.0 {
                if let Some(v) = map.remove(from) {
                    map.insert(to.clone(), v);
                }
            }
        }
        value
    }

    /// Parses a line, renaming fields first.
    pub fn parse<T: for<'de> Deserialize<'de>>(&self, line: &str) -> serde_json::Result<T> {
        let value: Value = serde_json::from_str(line)?;
        serde_json::from_value(self.apply(value))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineError {
    /// 1-based.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ImportReport {
    pub inserted: usize,
    pub duplicates: usize,
    pub errors: Vec<LineError>,
}
