use super::distance::{IndexedList, Objective};
use super::{AggregationConfig, RaflError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Column-stochastic `n x k` matrix: entry `(j, r)` is the probability that
/// item `j` is placed at position `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    n: usize,
    k: usize,
    // row-major, n rows of k cells
    cells: Vec<f64>,
}

impl ProbabilityMatrix {
    /// Every cell set to `1/n`.
    pub fn uniform(n: usize, k: usize) -> Self {
        assert!(n >= 1 && k >= 1 && k <= n, "need 1 <= k <= n");
        Self {
            n,
            k,
            cells: vec![1.0 / n as f64; n * k],
        }
    }

    /// Builds a matrix from rows. Panics if the shape is ragged or empty.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        assert!(n >= 1 && k >= 1 && k <= n, "need 1 <= k <= n");
        assert!(rows.iter().all(|r| r.len() == k), "ragged probability matrix");
        Self {
            n,
            k,
            cells: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> usize {
        self.k
    }

    pub fn get(&self, item: usize, position: usize) -> f64 {
        self.cells[item * self.k + position]
    }

    pub fn column_sum(&self, position: usize) -> f64 {
        (0..self.n).map(|j| self.get(j, position)).sum()
    }

    /// Draws `k` distinct items, one position at a time, each with probability
    /// proportional to its cell among the items not drawn yet. A position whose
    /// remaining mass is zero falls back to a uniform draw.
    pub fn sample_candidate<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut taken = vec![false; self.n];
        let mut out = Vec::with_capacity(self.k);
        for r in 0..self.k {
            let mass: f64 = (0..self.n).filter(|&j| !taken[j]).map(|j| self.get(j, r)).sum();
            let pick = if mass > 0.0 {
                let u = rng.gen::<f64>() * mass;
                let mut acc = 0.0;
                let mut last = None;
                let mut chosen = None;
                for j in (0..self.n).filter(|&j| !taken[j]) {
                    let p = self.get(j, r);
                    if p <= 0.0 {
                        continue;
                    }
                    acc += p;
                    last = Some(j);
                    if u < acc {
                        chosen = Some(j);
                        break;
                    }
                }
                // rounding can leave u just above the final sum
                chosen.or(last).expect("positive mass has a positive cell")
            } else {
                let remaining: Vec<usize> = (0..self.n).filter(|&j| !taken[j]).collect();
                remaining[rng.gen_range(0..remaining.len())]
            };
            taken[pick] = true;
            out.push(pick);
        }
        out
    }

    /// Blends the matrix toward the elite samples:
    /// `p' = (1 - w) p + w * (elite frequency of item j at position r)`.
    ///
    /// The threshold is the `ceil(rho * N)`-th smallest score; every sample
    /// scoring at or below it is elite, so the elite set is never empty.
    /// Returns the number of elite samples.
    pub fn update(&mut self, samples: &[Vec<usize>], scores: &[f64], rho: f64, w: f64) -> usize {
        assert_eq!(samples.len(), scores.len(), "one score per sample");
        assert!(!samples.is_empty(), "update needs at least one sample");
        let threshold = elite_threshold(scores, rho);
        let mut counts = vec![0u32; self.n * self.k];
        let mut elite = 0usize;
        for (s, &score) in samples.iter().zip(scores) {
            if score <= threshold {
                elite += 1;
                for (r, &j) in s.iter().enumerate() {
                    counts[j * self.k + r] += 1;
                }
            }
        }
        let e = elite as f64;
        for (cell, c) in self.cells.iter_mut().zip(counts) {
            *cell = (1.0 - w) * *cell + w * (c as f64 / e);
        }
        elite
    }
}

/// The `ceil(rho * N)`-th smallest score (1-based, clamped to `1..=N`).
pub fn elite_threshold(scores: &[f64], rho: f64) -> f64 {
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let idx = ((rho * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

/// Free-function form of [`ProbabilityMatrix::sample_candidate`].
pub fn sample_candidate<R: Rng + ?Sized>(p: &ProbabilityMatrix, rng: &mut R) -> Vec<usize> {
    p.sample_candidate(rng)
}

/// Free-function form of [`ProbabilityMatrix::update`]; returns the new matrix.
pub fn update_probabilities(
    p: &ProbabilityMatrix,
    samples: &[Vec<usize>],
    scores: &[f64],
    rho: f64,
    w: f64,
) -> ProbabilityMatrix {
    let mut next = p.clone();
    next.update(samples, scores, rho, w);
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The per-iteration minimum stayed the same for `conv_in` iterations.
    Converged,
    MaxIterations,
    /// Nothing to optimize: no items, a single list, or identical lists.
    Trivial,
}

/// What the optimizer reports besides the answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeLog {
    pub iterations: usize,
    pub k: usize,
    pub universe: usize,
    pub samples_per_iteration: usize,
    pub rho: f64,
    pub best_objective: f64,
    pub final_iteration_objective: f64,
    pub final_iteration_best: Vec<String>,
    pub reason: StopReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CeOutcome {
    /// Best candidate seen in any iteration.
    pub items: Vec<String>,
    pub objective: f64,
    pub log: CeLog,
}

/// Snapshot handed to an observer after each iteration.
pub struct IterationState<'a> {
    pub iteration: usize,
    pub matrix: &'a ProbabilityMatrix,
    pub iteration_best: f64,
    pub best_so_far: f64,
    pub elite: usize,
}

pub fn ce_aggregate<S: AsRef<str>>(
    lists: &[Vec<S>],
    weights: &[f64],
    cfg: &AggregationConfig,
) -> Result<CeOutcome, RaflError> {
    ce_aggregate_observed(lists, weights, cfg, |_| {})
}

/// Cross-entropy Monte Carlo search for the list minimizing the weighted
/// distance to `lists`. `observe` runs after every iteration.
pub fn ce_aggregate_observed<S, F>(
    lists: &[Vec<S>],
    weights: &[f64],
    cfg: &AggregationConfig,
    mut observe: F,
) -> Result<CeOutcome, RaflError>
where
    S: AsRef<str>,
    F: FnMut(&IterationState<'_>),
{
    cfg.validate()?;
    let prepared = super::prepare(lists, weights, cfg.k)?;
    let super::Prepared {
        universe,
        lists: kept,
        weights,
        k,
    } = prepared;
    let n = universe.len();

    let trivial = |items: Vec<String>| {
        let log = CeLog {
            iterations: 0,
            k,
            universe: n,
            samples_per_iteration: 0,
            rho: 0.0,
            best_objective: 0.0,
            final_iteration_objective: 0.0,
            final_iteration_best: items.clone(),
            reason: StopReason::Trivial,
        };
        CeOutcome {
            items,
            objective: 0.0,
            log,
        }
    };
    if n == 0 {
        return Ok(trivial(Vec::new()));
    }
    if kept.windows(2).all(|w| w[0] == w[1]) {
        // One list, or all the same: that list is an exact optimum at 0.
        let items = kept[0].iter().map(|&j| universe.items[j].clone()).collect();
        return Ok(trivial(items));
    }

    let objective = Objective {
        metric: cfg.distance,
        k,
        n,
        lists: kept.iter().map(|l| IndexedList::new(l, n, k)).collect(),
        weights,
    };
    let samples = cfg.samples.unwrap_or(10 * n * k).max(1);
    let rho = cfg.rho.unwrap_or(if samples >= 100 { 0.01 } else { 0.1 });

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut p = ProbabilityMatrix::uniform(n, k);
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut last_min: Option<f64> = None;
    let mut last_best_candidate = Vec::new();
    let mut stagnant = 0usize;
    let mut iterations = 0usize;
    let mut reason = StopReason::MaxIterations;

    while iterations < cfg.max_iter {
        iterations += 1;
        let candidates: Vec<Vec<usize>> = (0..samples).map(|_| p.sample_candidate(&mut rng)).collect();
        let scores: Vec<f64> = candidates.par_iter().map(|c| objective.eval(c)).collect();

        // first sample wins ties so the result does not depend on scheduling
        let (arg, &min) = scores
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
            .expect("at least one sample");
        if best.as_ref().is_none_or(|(_, b)| min < *b) {
            best = Some((candidates[arg].clone(), min));
        }
        last_best_candidate = candidates[arg].clone();

        let elite = p.update(&candidates, &scores, rho, cfg.update_weight);
        let best_so_far = best.as_ref().map_or(f64::INFINITY, |b| b.1);
        observe(&IterationState {
            iteration: iterations,
            matrix: &p,
            iteration_best: min,
            best_so_far,
            elite,
        });
        log::debug!("ce iteration {iterations}: min {min}, best {best_so_far}, elite {elite}");

        if last_min == Some(min) {
            stagnant += 1;
        } else {
            stagnant = 0;
        }
        last_min = Some(min);
        if stagnant >= cfg.conv_in {
            reason = StopReason::Converged;
            break;
        }
    }

    let (best_items, best_score) = best.expect("at least one iteration ran");
    let names = |v: &[usize]| v.iter().map(|&j| universe.items[j].clone()).collect::<Vec<_>>();
    Ok(CeOutcome {
        items: names(&best_items),
        objective: best_score,
        log: CeLog {
            iterations,
            k,
            universe: n,
            samples_per_iteration: samples,
            rho,
            best_objective: best_score,
            final_iteration_objective: last_min.unwrap_or(best_score),
            final_iteration_best: names(&last_best_candidate),
            reason,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rafl::Distance;

    #[test]
    fn concentrated_matrix_is_deterministic() {
        let p = ProbabilityMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            assert_eq!(p.sample_candidate(&mut rng), [0, 1]);
        }
    }

    #[test]
    fn exhausted_column_falls_back_to_uniform() {
        // column 2 puts all mass on item 0, which column 1 always takes
        let p = ProbabilityMatrix::from_rows(vec![vec![1.0, 1.0], vec![0.0, 0.0], vec![0.0, 0.0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = [0usize; 3];
        for _ in 0..2000 {
            let c = p.sample_candidate(&mut rng);
            assert_eq!(c[0], 0);
            seen[c[1]] += 1;
        }
        assert_eq!(seen[0], 0);
        assert!(seen[1] > 850 && seen[2] > 850, "{seen:?}");
    }

    #[test]
    fn uniform_two_by_two_chi_square() {
        let p = ProbabilityMatrix::uniform(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws = 10_000;
        let ab = (0..draws).filter(|_| p.sample_candidate(&mut rng) == [0, 1]).count() as f64;
        let expected = draws as f64 / 2.0;
        let chi2 = 2.0 * (ab - expected).powi(2) / expected;
        // 1 degree of freedom, p = 0.001
        assert!(chi2 < 10.83, "chi2 = {chi2}");
    }

    #[test]
    fn single_elite_update_example() {
        let p = ProbabilityMatrix::from_rows(vec![vec![0.5], vec![0.5]]);
        let next = update_probabilities(&p, &[vec![0], vec![1]], &[1.0, 5.0], 0.1, 0.25);
        assert!((next.get(0, 0) - 0.625).abs() < 1e-12);
        assert!((next.get(1, 0) - 0.375).abs() < 1e-12);
    }

    #[test]
    fn identical_samples_move_diagonal() {
        let mut p = ProbabilityMatrix::uniform(3, 2);
        let samples = vec![vec![2, 0]; 4];
        p.update(&samples, &[3.0; 4], 0.5, 0.25);
        let base = 1.0 / 3.0;
        assert!((p.get(2, 0) - (0.75 * base + 0.25)).abs() < 1e-12);
        assert!((p.get(0, 1) - (0.75 * base + 0.25)).abs() < 1e-12);
        assert!((p.get(1, 0) - 0.75 * base).abs() < 1e-12);
        for r in 0..2 {
            assert!((p.column_sum(r) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn threshold_index() {
        let s = [5.0, 1.0, 3.0, 2.0];
        assert_eq!(elite_threshold(&s, 0.01), 1.0);
        assert_eq!(elite_threshold(&s, 0.5), 2.0);
        assert_eq!(elite_threshold(&s, 0.51), 3.0);
    }

    fn cfg(k: usize) -> AggregationConfig {
        AggregationConfig {
            k,
            ..AggregationConfig::default()
        }
    }

    #[test]
    fn identical_lists_return_the_list() {
        let l = vec!["a", "b", "c"];
        let out = ce_aggregate(&[l.clone(), l.clone()], &[1.0, 1.0], &cfg(3)).unwrap();
        assert_eq!(out.items, l);
        assert_eq!(out.objective, 0.0);
        assert_eq!(out.log.reason, StopReason::Trivial);
    }

    #[test]
    fn two_optimal_answers() {
        let lists = [vec!["a", "b", "c"], vec!["b", "a", "c"]];
        let out = ce_aggregate(&lists, &[1.0, 1.0], &cfg(3)).unwrap();
        assert_eq!(out.objective, 2.0);
        assert!(
            out.items == ["a", "b", "c"] || out.items == ["b", "a", "c"],
            "{:?}",
            out.items
        );
        assert!(out.log.iterations >= 1);
    }

    #[test]
    fn observer_sees_monotone_best_and_stochastic_columns() {
        let lists = [vec!["a", "b", "c", "d"], vec!["d", "c", "e", "a"], vec!["b", "e"]];
        let config = AggregationConfig {
            distance: Distance::Kendall,
            ..cfg(3)
        };
        let mut prev = f64::INFINITY;
        let mut calls = 0;
        let out = ce_aggregate_observed(&lists, &[1.0, 0.5, 2.0], &config, |st| {
            calls += 1;
            assert!(st.best_so_far <= prev);
            prev = st.best_so_far;
            for r in 0..st.matrix.columns() {
                assert!((st.matrix.column_sum(r) - 1.0).abs() < 1e-9);
            }
        })
        .unwrap();
        assert_eq!(calls, out.log.iterations);
        assert_eq!(out.objective, prev);
        assert_eq!(out.items.len(), 3);
    }

    #[test]
    fn same_seed_same_answer() {
        let lists = [vec!["a", "b", "c", "d", "e"], vec!["e", "d", "c", "b", "a"]];
        let a = ce_aggregate(&lists, &[1.0, 1.0], &cfg(4)).unwrap();
        let b = ce_aggregate(&lists, &[1.0, 1.0], &cfg(4)).unwrap();
        assert_eq!(a, b);
    }
}
