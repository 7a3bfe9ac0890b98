use super::RaflError;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// Distance between two top-k lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distance {
    /// Spearman footrule.
    Spearman,
    /// Kendall tau distance (count of discordant pairs).
    Kendall,
}

impl FromStr for Distance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "spearman" | "footrule" => Ok(Distance::Spearman),
            "kendall" => Ok(Distance::Kendall),
            other => Err(format!("unknown distance `{other}` (expected spearman or kendall)")),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distance::Spearman => "spearman",
            Distance::Kendall => "kendall",
        })
    }
}

/// A reference list in index form: the rank (1-based) of every universe item,
/// with `k + 1` for absent items, plus the present items themselves.
#[derive(Debug, Clone)]
pub(crate) struct IndexedList {
    ranks: Vec<u32>,
    members: Vec<usize>,
}

impl IndexedList {
    pub(crate) fn new(order: &[usize], n: usize, k: usize) -> Self {
        let mut ranks = vec![k as u32 + 1; n];
        let members: Vec<usize> = order.iter().copied().take(k).collect();
        for (pos, &j) in members.iter().enumerate() {
            ranks[j] = pos as u32 + 1;
        }
        Self { ranks, members }
    }
}

/// Distance between two index lists over a universe of `n` items.
pub(crate) fn indexed_distance(metric: Distance, a: &IndexedList, b: &IndexedList) -> f64 {
    // Union in a deterministic order: members of a, then members of b not in a.
    let mut union: Vec<usize> = a.members.clone();
    union.extend(
        b.members
            .iter()
            .copied()
            .filter(|&j| a.ranks[j] as usize > a.members.len()),
    );
    match metric {
        Distance::Spearman => union
            .iter()
            .map(|&j| (a.ranks[j] as i64 - b.ranks[j] as i64).unsigned_abs())
            .sum::<u64>() as f64,
        Distance::Kendall => {
            let mut discordant = 0u64;
            for (i, &x) in union.iter().enumerate() {
                for &y in &union[i + 1..] {
                    let da = a.ranks[x] as i64 - a.ranks[y] as i64;
                    let db = b.ranks[x] as i64 - b.ranks[y] as i64;
                    if da.signum() * db.signum() < 0 {
                        discordant += 1;
                    }
                }
            }
            discordant as f64
        }
    }
}

/// Maps string lists onto a shared universe in first-appearance order.
pub(crate) struct Universe {
    pub items: Vec<String>,
    index: HashMap<String, usize>,
}

impl Universe {
    pub(crate) fn from_lists<S: AsRef<str>>(lists: &[&[S]]) -> Self {
        let mut u = Universe {
            items: Vec::new(),
            index: HashMap::new(),
        };
        for list in lists {
            for s in list.iter() {
                let s = s.as_ref();
                if !u.index.contains_key(s) {
                    u.index.insert(s.to_string(), u.items.len());
                    u.items.push(s.to_string());
                }
            }
        }
        u
    }

    pub(crate) fn len(&self) -> usize {
        self.items.len()
    }

    pub(crate) fn indices<S: AsRef<str>>(&self, list: &[S]) -> Vec<usize> {
        list.iter().map(|s| self.index[s.as_ref()]).collect()
    }
}

fn string_distance<A: AsRef<str>, B: AsRef<str>>(metric: Distance, a: &[A], b: &[B], k: usize) -> f64 {
    let a = &a[..a.len().min(k)];
    let b = &b[..b.len().min(k)];
    let a: Vec<&str> = a.iter().map(AsRef::as_ref).collect();
    let b: Vec<&str> = b.iter().map(AsRef::as_ref).collect();
    let u = Universe::from_lists(&[&a[..], &b[..]]);
    let ia = IndexedList::new(&u.indices(&a), u.len(), k);
    let ib = IndexedList::new(&u.indices(&b), u.len(), k);
    indexed_distance(metric, &ia, &ib)
}

/// Spearman footrule between the top-k prefixes of `a` and `b`. Items absent
/// from a list take rank `k + 1`.
pub fn spearman_footrule<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B], k: usize) -> f64 {
    string_distance(Distance::Spearman, a, b, k)
}

/// Number of discordant pairs between the top-k prefixes of `a` and `b`.
/// Absent items take rank `k + 1`; pairs tied in either list do not count.
pub fn kendall_distance<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B], k: usize) -> f64 {
    string_distance(Distance::Kendall, a, b, k)
}

pub fn distance<A: AsRef<str>, B: AsRef<str>>(metric: Distance, a: &[A], b: &[B], k: usize) -> f64 {
    string_distance(metric, a, b, k)
}

/// Weighted sum of distances from `delta` to every list.
pub fn aggregate_objective<D: AsRef<str>, S: AsRef<str>>(
    delta: &[D],
    lists: &[Vec<S>],
    weights: &[f64],
    metric: Distance,
    k: usize,
) -> Result<f64, RaflError> {
    if lists.len() != weights.len() {
        return Err(RaflError::ArityMismatch {
            lists: lists.len(),
            weights: weights.len(),
        });
    }
    Ok(lists
        .iter()
        .zip(weights)
        .map(|(l, w)| w * string_distance(metric, delta, l, k))
        .sum())
}

/// Objective evaluator over a fixed universe, shared by the optimizers.
pub(crate) struct Objective {
    pub metric: Distance,
    pub k: usize,
    pub n: usize,
    pub lists: Vec<IndexedList>,
    pub weights: Vec<f64>,
}

impl Objective {
    pub(crate) fn eval(&self, delta: &[usize]) -> f64 {
        let d = IndexedList::new(delta, self.n, self.k);
        self.lists
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| w * indexed_distance(self.metric, &d, l))
            .sum()
    }
}
