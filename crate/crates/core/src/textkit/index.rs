use crate::ranked::RankedList;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TextError {
    #[error("duplicate document id `{0}`")]
    DuplicateDocId(String),
    #[error("unknown document `{0}`")]
    UnknownDoc(String),
    #[error("index is empty")]
    EmptyIndex,
    #[error("invalid BM25 parameters k1={k1}, b={b}")]
    InvalidParams { k1: f64, b: f64 },
    #[error("malformed index dump: {0}")]
    Dump(String),
}

/// A document (or query) split into named token fields.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldedDocument {
    pub doc_id: String,
    pub fields: BTreeMap<String, Vec<String>>,
}

impl FieldedDocument {
    pub fn new(doc_id: impl Into<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            fields: BTreeMap::new(),
        }
    }

    pub fn with_field(mut self, name: impl Into<String>, tokens: Vec<String>) -> Self {
        self.fields.insert(name.into(), tokens);
        self
    }
}

/// Term statistics for one field across the collection.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldStats {
    /// term -> doc_id -> term frequency
    pub postings: BTreeMap<String, BTreeMap<String, u32>>,
    /// term -> number of documents whose field contains it
    pub df: BTreeMap<String, u32>,
    /// doc_id -> token count of this field
    pub lengths: BTreeMap<String, u32>,
    pub avg_len: f64,
}

/// An inverted index over fielded documents. Immutable once built.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Index {
    pub n: usize,
    pub doc_ids: BTreeSet<String>,
    pub fields: BTreeMap<String, FieldStats>,
}

impl Index {
    pub fn build(docs: &[FieldedDocument]) -> Result<Self, TextError> {
        let mut doc_ids = BTreeSet::new();
        for d in docs {
            if !doc_ids.insert(d.doc_id.clone()) {
                return Err(TextError::DuplicateDocId(d.doc_id.clone()));
            }
        }
        let field_names: BTreeSet<&String> = docs.iter().flat_map(|d| d.fields.keys()).collect();

        let mut fields = BTreeMap::new();
        for name in field_names {
            let mut stats = FieldStats::default();
            let mut total: u64 = 0;
            for d in docs {
                let tokens = d.fields.get(name).map(Vec::as_slice).unwrap_or(&[]);
                stats.lengths.insert(d.doc_id.clone(), tokens.len() as u32);
                total += tokens.len() as u64;
                for t in tokens {
                    *stats
                        .postings
                        .entry(t.clone())
                        .or_default()
                        .entry(d.doc_id.clone())
                        .or_insert(0) += 1;
                }
            }
            stats.df = stats
                .postings
                .iter()
                .map(|(t, p)| (t.clone(), p.len() as u32))
                .collect();
            stats.avg_len = total as f64 / docs.len() as f64;
            fields.insert(name.clone(), stats);
        }
        Ok(Self {
            n: docs.len(),
            doc_ids,
            fields,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.doc_ids.contains(doc_id)
    }

    pub fn df(&self, field: &str, term: &str) -> u32 {
        self.fields
            .get(field)
            .and_then(|f| f.df.get(term))
            .copied()
            .unwrap_or(0)
    }

    pub fn tf(&self, field: &str, term: &str, doc_id: &str) -> u32 {
        self.fields
            .get(field)
            .and_then(|f| f.postings.get(term))
            .and_then(|p| p.get(doc_id))
            .copied()
            .unwrap_or(0)
    }

    /// `ln(N / DF)` for `term` in `field`; zero when the term is absent.
    pub fn idf(&self, field: &str, term: &str) -> f64 {
        match self.df(field, term) {
            0 => 0.0,
            df => (self.n as f64 / df as f64).ln(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("index serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, TextError> {
        serde_json::from_str(text).map_err(|e| TextError::Dump(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn new(k1: f64, b: f64) -> Result<Self, TextError> {
        if !(k1 > 0.0 && k1.is_finite()) || !(0.0..=1.0).contains(&b) {
            return Err(TextError::InvalidParams { k1, b });
        }
        Ok(Self { k1, b })
    }

    /// Saturated, length-normalized term frequency.
    pub fn tf_weight(&self, tf: u32, len: u32, avg_len: f64) -> f64 {
        if tf == 0 {
            return 0.0;
        }
        let tf = tf as f64;
        let norm = 1.0 - self.b + self.b * len as f64 / avg_len;
        tf * (self.k1 + 1.0) / (tf + self.k1 * norm)
    }
}

/// Which (query field, document field) pairs contribute to a score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub enum FieldMap {
    /// Every query field against every indexed field, unit weights.
    #[default]
    AllPairs,
    Explicit(Vec<(String, String, f64)>),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bm25Scorer {
    pub params: Bm25Params,
    pub field_map: FieldMap,
}

impl Bm25Scorer {
    pub fn new(params: Bm25Params) -> Self {
        Self {
            params,
            field_map: FieldMap::AllPairs,
        }
    }

    fn pairs<'a>(&'a self, index: &'a Index, query: &'a FieldedDocument) -> Vec<(&'a str, &'a str, f64)> {
        match &self.field_map {
            FieldMap::AllPairs => query
                .fields
                .keys()
                .flat_map(|q| index.fields.keys().map(move |d| (q.as_str(), d.as_str(), 1.0)))
                .collect(),
            FieldMap::Explicit(pairs) => pairs.iter().map(|(q, d, w)| (q.as_str(), d.as_str(), *w)).collect(),
        }
    }

    /// Sum over field pairs and distinct query terms of `IDF * tf_weight`.
    pub fn score(&self, index: &Index, query: &FieldedDocument, doc_id: &str) -> Result<f64, TextError> {
        if !index.contains(doc_id) {
            return Err(TextError::UnknownDoc(doc_id.to_string()));
        }
        let mut total = 0.0;
        for (qf, df, weight) in self.pairs(index, query) {
            let (Some(terms), Some(stats)) = (query.fields.get(qf), index.fields.get(df)) else {
                continue;
            };
            let len = stats.lengths.get(doc_id).copied().unwrap_or(0);
            let distinct: BTreeSet<&String> = terms.iter().collect();
            let mut field_score = 0.0;
            for term in distinct {
                let tf = index.tf(df, term, doc_id);
                if tf > 0 {
                    field_score += index.idf(df, term) * self.params.tf_weight(tf, len, stats.avg_len);
                }
            }
            total += weight * field_score;
        }
        Ok(total)
    }

    /// Score of every indexed document, in doc_id order.
    pub fn score_all(&self, index: &Index, query: &FieldedDocument) -> Vec<(String, f64)> {
        index
            .doc_ids
            .iter()
            .map(|id| {
                let s = self.score(index, query, id).expect("doc id comes from the index");
                (id.clone(), s)
            })
            .collect()
    }

    /// Documents with a positive score, best first, ties by ascending doc_id.
    pub fn rank(&self, index: &Index, query: &FieldedDocument) -> Result<RankedList, TextError> {
        if index.is_empty() {
            return Err(TextError::EmptyIndex);
        }
        let mut scored: Vec<(String, f64)> = self
            .score_all(index, query)
            .into_iter()
            .filter(|(_, s)| *s > 0.0)
            .collect();
        scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.0.cmp(&b.0))
        });
        Ok(RankedList::from_scored(scored).expect("doc ids are unique"))
    }
}

/// BM25 score with default parameters and the all-pairs field map.
pub fn bm25_score(index: &Index, query: &FieldedDocument, doc_id: &str) -> Result<f64, TextError> {
    Bm25Scorer::default().score(index, query, doc_id)
}

/// Ranks documents with default parameters and the all-pairs field map.
pub fn rank_documents(index: &Index, query: &FieldedDocument) -> Result<RankedList, TextError> {
    Bm25Scorer::default().rank(index, query)
}
