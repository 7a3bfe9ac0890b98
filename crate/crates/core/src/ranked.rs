use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RankedListError {
    #[error("duplicate item `{0}` in ranked list")]
    DuplicateItem(String),
    #[error("entry {position} has rank {rank}, expected {expected}")]
    BadRank {
        position: usize,
        rank: usize,
        expected: usize,
    },
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed ranked list: {0}")]
    Json(#[from] serde_json::Error),
}

/// One row of a ranked list. Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub item_id: String,
    pub score: f64,
    pub rank: usize,
}

/// An ordered list of distinct items with ranks `1..=len`.
///
/// Scores are carried along but are not required to be monotone: a list built
/// by concatenating per-file blocks can put a low score ahead of a high one.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RankedList {
    entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a list from `(item, score)` pairs already in rank order.
    pub fn from_scored<I, S>(items: I) -> Result<Self, RankedListError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut seen = HashSet::new();
        let mut entries = Vec::new();
        for (item, score) in items {
            let item_id = item.into();
            if !seen.insert(item_id.clone()) {
                return Err(RankedListError::DuplicateItem(item_id));
            }
            entries.push(RankedEntry {
                item_id,
                score,
                rank: entries.len() + 1,
            });
        }
        Ok(Self { entries })
    }

    /// Builds a list from item ids in rank order, scoring each as `1/rank`.
    pub fn from_order<I, S>(items: I) -> Result<Self, RankedListError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::from_scored(items.into_iter().enumerate().map(|(i, s)| (s, 1.0 / (i + 1) as f64)))
    }

    /// Validates externally supplied entries (ranks must be exactly `1..=len`).
    pub fn from_entries(entries: Vec<RankedEntry>) -> Result<Self, RankedListError> {
        let mut seen = HashSet::new();
        for (i, e) in entries.iter().enumerate() {
            if e.rank != i + 1 {
                return Err(RankedListError::BadRank {
                    position: i,
                    rank: e.rank,
                    expected: i + 1,
                });
            }
            if !seen.insert(e.item_id.as_str()) {
                return Err(RankedListError::DuplicateItem(e.item_id.clone()));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn items(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.iter().map(|e| e.item_id.as_str())
    }

    pub fn get(&self, index: usize) -> Option<&RankedEntry> {
        self.entries.get(index)
    }

    /// 1-based rank of `item`, if present.
    pub fn rank_of(&self, item: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.item_id == item).map(|e| e.rank)
    }

    /// The first `k` entries (ranks are unchanged).
    pub fn truncated(&self, k: usize) -> RankedList {
        RankedList {
            entries: self.entries.iter().take(k).cloned().collect(),
        }
    }

    /// Serializes as a JSON array of `{item_id, score, rank}` with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.entries).expect("ranked list serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, RankedListError> {
        let entries: Vec<RankedEntry> = serde_json::from_str(text)?;
        Self::from_entries(entries)
    }

    pub fn write_json(&self, path: &Path) -> Result<(), RankedListError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self, RankedListError> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

impl<'de> Deserialize<'de> for RankedList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let entries = Vec::<RankedEntry>::deserialize(d)?;
        RankedList::from_entries(entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_list_serializes_as_empty_array() {
        assert_eq!(RankedList::new().to_json(), "[]\n");
    }

    #[test]
    fn single_entry_has_rank_one() {
        let l = RankedList::from_scored([("s1", 0.5)]).unwrap();
        let json = l.to_json();
        assert!(json.ends_with("]\n"));
        let back = RankedList::from_json(&json).unwrap();
        assert_eq!(back, l);
        assert_eq!(back.get(0).unwrap().rank, 1);
    }

    #[test]
    fn key_order_is_stable() {
        let l = RankedList::from_scored([("a", 1.0)]).unwrap();
        let json = l.to_json();
        let id = json.find("item_id").unwrap();
        let score = json.find("score").unwrap();
        let rank = json.find("rank").unwrap();
        assert!(id < score && score < rank);
    }

    #[test]
    fn rejects_duplicates_and_bad_ranks() {
        assert!(matches!(
            RankedList::from_scored([("a", 1.0), ("a", 0.5)]),
            Err(RankedListError::DuplicateItem(_))
        ));
        let bad = r#"[{"item_id":"a","score":1.0,"rank":2}]"#;
        assert!(matches!(
            RankedList::from_json(bad),
            Err(RankedListError::BadRank { .. })
        ));
    }

    #[test]
    fn from_order_scores_reciprocal_rank() {
        let l = RankedList::from_order(["x", "y"]).unwrap();
        assert_eq!(l.get(1).unwrap().score, 0.5);
        assert_eq!(l.rank_of("y"), Some(2));
        assert_eq!(l.truncated(1).len(), 1);
    }
}
