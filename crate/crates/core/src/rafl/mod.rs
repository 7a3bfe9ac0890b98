//! Rank aggregation over top-k lists.
//!
//! The aggregate of lists `L_1..L_m` with weights `w_i` is the length-k list
//! `δ` minimizing `Σ w_i d(δ, L_i)` for a distance `d` (Spearman footrule or
//! Kendall). [`ce_aggregate`] searches with the cross-entropy Monte Carlo
//! method; [`brute_force_aggregate`] enumerates for small instances.
//! [`sbir_localize`] aggregates the SBFL and Blues rankings of a bundle.

mod ce;
mod distance;

pub use ce::{
    ce_aggregate, ce_aggregate_observed, elite_threshold, sample_candidate, update_probabilities, CeLog, CeOutcome,
    IterationState, ProbabilityMatrix, StopReason,
};
pub use distance::{aggregate_objective, distance, kendall_distance, spearman_footrule, Distance};

use crate::blues::{run_blues, BluesError, BluesOptions};
use crate::corpus::{validate_bundle, DefectBundle, Mode};
use crate::ranked::RankedList;
use crate::sbfl::{rank_sbfl, SbflError};
use distance::{IndexedList, Objective, Universe};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Enumeration limit for [`brute_force_aggregate`].
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// List length used by SBIR.
pub const SBIR_K: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum RaflError {
    #[error("{lists} lists but {weights} weights")]
    ArityMismatch { lists: usize, weights: usize },
    #[error("no input lists")]
    EmptyInput,
    #[error("weights must be finite and non-negative")]
    InvalidWeights,
    #[error("invalid aggregation config: {0}")]
    InvalidConfig(String),
    #[error("{count} candidate lists exceed the enumeration limit of {limit}")]
    TooLarge { count: u128, limit: u64 },
    #[error("bundle not runnable for sbir: {0}")]
    NotRunnable(String),
    #[error(transparent)]
    Sbfl(#[from] SbflError),
    #[error(transparent)]
    Blues(#[from] BluesError),
}

/// Optimizer settings. `samples` defaults to `10 n k` and `rho` to 0.01 when
/// there are at least 100 samples, 0.1 otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AggregationConfig {
    pub k: usize,
    pub seed: u64,
    pub distance: Distance,
    pub max_iter: usize,
    pub conv_in: usize,
    pub samples: Option<usize>,
    pub rho: Option<f64>,
    pub update_weight: f64,
}

impl Default for AggregationConfig {
    fn default() -> Self {
        Self {
            k: SBIR_K,
            seed: 1,
            distance: Distance::Spearman,
            max_iter: 1000,
            conv_in: 7,
            samples: None,
            rho: None,
            update_weight: 0.25,
        }
    }
}

impl AggregationConfig {
    pub fn validate(&self) -> Result<(), RaflError> {
        let bad = |m: &str| Err(RaflError::InvalidConfig(m.to_string()));
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if self.max_iter == 0 || self.conv_in == 0 {
            return bad("max_iter and conv_in must be at least 1");
        }
        if self.samples == Some(0) {
            return bad("samples must be at least 1");
        }
        if let Some(rho) = self.rho {
            if !(rho > 0.0 && rho < 1.0) {
                return bad("rho must lie in (0, 1)");
            }
        }
        if !(self.update_weight > 0.0 && self.update_weight <= 1.0) {
            return bad("update_weight must lie in (0, 1]");
        }
        Ok(())
    }
}

/// Inputs in index form: non-empty lists cut to `k`, their weights, the
/// universe in first-appearance order and the effective length `min(k, n)`.
pub(crate) struct Prepared {
    pub universe: Universe,
    pub lists: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
    pub k: usize,
}

pub(crate) fn prepare<S: AsRef<str>>(lists: &[Vec<S>], weights: &[f64], k: usize) -> Result<Prepared, RaflError> {
    if lists.is_empty() {
        return Err(RaflError::EmptyInput);
    }
    if lists.len() != weights.len() {
        return Err(RaflError::ArityMismatch {
            lists: lists.len(),
            weights: weights.len(),
        });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(RaflError::InvalidWeights);
    }
    let (kept, kept_weights): (Vec<&[S]>, Vec<f64>) = lists
        .iter()
        .zip(weights)
        .filter(|(l, _)| !l.is_empty())
        .map(|(l, w)| (&l[..l.len().min(k)], *w))
        .unzip();
    let universe = Universe::from_lists(&kept);
    let k = k.min(universe.len());
    let lists = kept.iter().map(|l| universe.indices(l)).collect();
    Ok(Prepared {
        universe,
        lists,
        weights: kept_weights,
        k,
    })
}

/// An aggregate list and its objective value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub items: Vec<String>,
    pub objective: f64,
}

/// Exact optimum by enumerating every k-permutation of the universe.
/// Ties go to the lexicographically smallest sequence of ids.
pub fn brute_force_aggregate<S: AsRef<str>>(
    lists: &[Vec<S>],
    weights: &[f64],
    k: usize,
    metric: Distance,
) -> Result<Aggregate, RaflError> {
    brute_force_aggregate_bounded(lists, weights, k, metric, BRUTE_FORCE_LIMIT)
}

pub fn brute_force_aggregate_bounded<S: AsRef<str>>(
    lists: &[Vec<S>],
    weights: &[f64],
    k: usize,
    metric: Distance,
    limit: u64,
) -> Result<Aggregate, RaflError> {
    let p = prepare(lists, weights, k)?;
    let n = p.universe.len();
    if n == 0 {
        return Ok(Aggregate {
            items: Vec::new(),
            objective: 0.0,
        });
    }
    let count = (n - p.k + 1..=n).fold(1u128, |acc, x| acc.saturating_mul(x as u128));
    if count > limit as u128 {
        return Err(RaflError::TooLarge { count, limit });
    }
    let objective = Objective {
        metric,
        k: p.k,
        n,
        lists: p.lists.iter().map(|l| IndexedList::new(l, n, p.k)).collect(),
        weights: p.weights,
    };
    let mut by_name: Vec<usize> = (0..n).collect();
    by_name.sort_by(|&a, &b| p.universe.items[a].cmp(&p.universe.items[b]));

    struct Search<'a> {
        objective: &'a Objective,
        order: &'a [usize],
        used: Vec<bool>,
        current: Vec<usize>,
        best: Option<(Vec<usize>, f64)>,
    }
    impl Search<'_> {
        fn walk(&mut self) {
            if self.current.len() == self.objective.k {
                let f = self.objective.eval(&self.current);
                if self.best.as_ref().is_none_or(|(_, b)| f < *b) {
                    self.best = Some((self.current.clone(), f));
                }
                return;
            }
            for &j in self.order {
                if !self.used[j] {
                    self.used[j] = true;
                    self.current.push(j);
                    self.walk();
                    self.current.pop();
                    self.used[j] = false;
                }
            }
        }
    }
    let mut search = Search {
        objective: &objective,
        order: &by_name,
        used: vec![false; n],
        current: Vec::with_capacity(p.k),
        best: None,
    };
    search.walk();
    let (best, f) = search.best.expect("k <= n gives at least one candidate");
    Ok(Aggregate {
        items: best.iter().map(|&j| p.universe.items[j].clone()).collect(),
        objective: f,
    })
}

/// Settings for [`sbir_localize_with`].
#[derive(Debug, Clone, Default)]
pub struct SbirOptions {
    pub blues: BluesOptions,
    pub aggregation: AggregationConfig,
}

/// The inputs and result of one SBIR run.
#[derive(Debug, Clone)]
pub struct SbirRun {
    pub sbfl: RankedList,
    pub blues: RankedList,
    pub outcome: CeOutcome,
    pub ranked: RankedList,
}

/// Aggregates the SBFL ranking and the Blues ensemble of a bundle (each cut
/// to the top 100) into one list with CE, Spearman footrule, seed 1 and equal
/// weights. Scores are `1/rank`.
pub fn sbir_localize(bundle: &DefectBundle) -> Result<RankedList, RaflError> {
    Ok(sbir_localize_with(bundle, &SbirOptions::default())?.ranked)
}

pub fn sbir_localize_with(bundle: &DefectBundle, opts: &SbirOptions) -> Result<SbirRun, RaflError> {
    let report = validate_bundle(bundle, Mode::Sbir);
    if !report.runnable {
        return Err(RaflError::NotRunnable(report.reasons.join("; ")));
    }
    let k = opts.aggregation.k;
    let sbfl = rank_sbfl(bundle)?.truncated(k);
    let blues = run_blues(bundle, &opts.blues)?.ensemble.truncated(k);
    let (ranked, outcome) = sbir_aggregate(&sbfl, &blues, &opts.aggregation)?;
    Ok(SbirRun {
        sbfl,
        blues,
        outcome,
        ranked,
    })
}

/// Aggregates an SBFL and a Blues ranking, each cut to `cfg.k`, with equal
/// weights.
pub fn sbir_aggregate(
    sbfl: &RankedList,
    blues: &RankedList,
    cfg: &AggregationConfig,
) -> Result<(RankedList, CeOutcome), RaflError> {
    let cut = |l: &RankedList| l.items().take(cfg.k).map(str::to_string).collect::<Vec<_>>();
    let outcome = ce_aggregate(&[cut(sbfl), cut(blues)], &[1.0, 1.0], cfg)?;
    let ranked = RankedList::from_order(&outcome.items).expect("aggregate items are distinct");
    Ok((ranked, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_examples() {
        let single = brute_force_aggregate(&[vec!["c", "a", "b"]], &[1.0], 2, Distance::Spearman).unwrap();
        assert_eq!(
            (single.items, single.objective),
            (vec!["c".to_string(), "a".into()], 0.0)
        );

        let lists = [vec!["a", "b", "c"], vec!["b", "a", "c"]];
        let two = brute_force_aggregate(&lists, &[1.0, 1.0], 3, Distance::Spearman).unwrap();
        assert_eq!(two.items, ["a", "b", "c"]);
        assert_eq!(two.objective, 2.0);

        let k1 = [vec!["b"], vec!["a"]];
        let kendall = brute_force_aggregate(&k1, &[1.0, 1.0], 1, Distance::Kendall).unwrap();
        assert_eq!((kendall.items, kendall.objective), (vec!["a".to_string()], 1.0));
        // the footrule charges both misplaced items
        let foot = brute_force_aggregate(&k1, &[1.0, 1.0], 1, Distance::Spearman).unwrap();
        assert_eq!((foot.items, foot.objective), (vec!["a".to_string()], 2.0));
    }

    #[test]
    fn brute_force_guard() {
        let big: Vec<String> = (0..20).map(|i| format!("s{i:02}")).collect();
        let rev: Vec<String> = big.iter().rev().cloned().collect();
        let err = brute_force_aggregate(&[big, rev], &[1.0, 1.0], 10, Distance::Spearman).unwrap_err();
        assert!(matches!(err, RaflError::TooLarge { .. }));
    }

    #[test]
    fn prepare_drops_empty_lists_and_shrinks_k() {
        let lists = [vec![], vec!["x", "y"]];
        let p = prepare(&lists, &[1.0, 3.0], 5).unwrap();
        assert_eq!(p.lists, [vec![0, 1]]);
        assert_eq!(p.weights, [3.0]);
        assert_eq!(p.k, 2);
        assert_eq!(prepare::<&str>(&[], &[], 3).err(), Some(RaflError::EmptyInput));
        assert_eq!(prepare(&lists, &[1.0, -1.0], 5).err(), Some(RaflError::InvalidWeights));
    }

    #[test]
    fn all_empty_lists_give_empty_result() {
        let lists: [Vec<&str>; 2] = [vec![], vec![]];
        let out = ce_aggregate(&lists, &[1.0, 1.0], &AggregationConfig::default()).unwrap();
        assert!(out.items.is_empty());
        let bf = brute_force_aggregate(&lists, &[1.0, 1.0], 3, Distance::Kendall).unwrap();
        assert!(bf.items.is_empty());
    }

    #[test]
    fn config_validation() {
        let mut c = AggregationConfig::default();
        assert!(c.validate().is_ok());
        c.rho = Some(1.0);
        assert!(c.validate().is_err());
        c.rho = None;
        c.k = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_from_toml() {
        let c: AggregationConfig = toml::from_str("k = 10\ndistance = \"kendall\"\n").unwrap();
        assert_eq!(c.k, 10);
        assert_eq!(c.distance, Distance::Kendall);
        assert_eq!(c.seed, 1);
    }
}
