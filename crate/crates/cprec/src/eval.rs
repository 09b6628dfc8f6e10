//! Per-user AUC evaluation and the dimensionality sweep.
//!
//! For user u with held-out item t, the per-user AUC is the fraction of
//! candidate items the target outranks:
//!
//! AUC_u = |{ j ∈ D_u : x̂_ut > x̂_uj }| / |D_u|
//!
//! with D_u every item the user never consumed (train, validation, and
//! test all excluded). The inequality is strict: ties count as losses, so
//! a constant scorer earns 0, not 0.5. An opt-in half-credit tie policy
//! exists for diagnostics and is off by default. The report averages
//! per-user AUCs uniformly (macro average) over all evaluated users and
//! again over the cold slice, users with fewer than `cold_threshold`
//! training positives.
//!
//! Exact mode ranks against all of D_u; sampled mode against a fixed-size
//! uniform subset drawn without replacement from a per-user stream seeded
//! only by (eval seed, user id), so results are independent of thread
//! scheduling. Requesting at least |D_u| negatives falls back to the exact
//! path, making sampled(|D_u|) bit-identical to exact.

use rayon::prelude::*;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, Split};
use crate::error::Error;
use crate::linalg::{splitmix64, KahanSum};
use crate::model::{ModelKind, ModelParams, ModelScorer, Scorer};
use crate::train::{grid_search, TrainConfig};
use crate::{ItemId, Result, UserId};

/// Which held-out item to rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalTarget {
    Test,
    Validation,
}

/// Candidate-set construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Rank against every non-consumed item.
    Exact,
    /// Rank against `n_negatives` items drawn uniformly without
    /// replacement from D_u. An estimate, labeled as such in the report.
    Sampled { n_negatives: usize, seed: u64 },
}

/// How a score tie between target and candidate is credited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiePolicy {
    /// Ties lose: the literal strict-inequality indicator. Default.
    Strict,
    /// Ties earn half credit. Diagnostic mode.
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub target: EvalTarget,
    pub cold_threshold: usize,
    pub mode: EvalMode,
    pub ties: TiePolicy,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            target: EvalTarget::Test,
            cold_threshold: 5,
            mode: EvalMode::Exact,
            ties: TiePolicy::Strict,
        }
    }
}

/// Aggregate and per-user results.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub auc_all: f64,
    /// NaN when no evaluated user is cold.
    pub auc_cold: f64,
    pub n_eval_users: usize,
    pub n_cold_users: usize,
    /// Consumers with positives but no held-out target; excluded from the
    /// averages.
    pub n_skipped: usize,
    /// (user, AUC) for every evaluated user, in user-id order.
    pub per_user: Vec<(UserId, f64)>,
    pub mode: EvalMode,
}

impl EvalReport {
    /// `slice,auc,n_users` rows under one header line.
    pub fn render(&self) -> String {
        let mode = match self.mode {
            EvalMode::Exact => "exact".to_string(),
            EvalMode::Sampled { n_negatives, .. } => format!("sampled({n_negatives})"),
        };
        let mut s = format!("# auc mode={mode} skipped={}\n", self.n_skipped);
        s.push_str("slice,auc,n_users\n");
        s.push_str(&format!("all,{},{}\n", self.auc_all, self.n_eval_users));
        s.push_str(&format!("cold,{},{}\n", self.auc_cold, self.n_cold_users));
        s
    }
}

enum UserOutcome {
    /// No positives at all; not an evaluation subject.
    NotConsumer,
    /// Consumer without a held-out target.
    Skipped,
    Evaluated { auc: f64, cold: bool },
}

fn count_wins(target_score: f64, candidate_scores: &[f64], ties: TiePolicy) -> f64 {
    let mut wins = 0usize;
    let mut tied = 0usize;
    for &s in candidate_scores {
        if target_score > s {
            wins += 1;
        } else if target_score == s {
            tied += 1;
        }
    }
    match ties {
        TiePolicy::Strict => wins as f64,
        TiePolicy::Half => wins as f64 + 0.5 * tied as f64,
    }
}

fn eval_user<S: Scorer>(
    scorer: &S,
    positives: &[ItemId],
    target: ItemId,
    u: UserId,
    opts: &EvalOptions,
) -> Result<f64> {
    let n_items = scorer.n_items();
    let n_candidates = n_items - positives.len();
    if n_candidates == 0 {
        return Err(Error::EmptyCandidateSet { user: u });
    }

    let sample_n = match opts.mode {
        EvalMode::Exact => None,
        EvalMode::Sampled { n_negatives, seed } => {
            if n_negatives >= n_candidates {
                None // degenerates to exact
            } else {
                Some((n_negatives, seed))
            }
        }
    };

    match sample_n {
        None => {
            let scores = scorer.score_all(u);
            let ts = scores[target];
            // Walk items and the sorted positive list in lockstep.
            let mut pos = positives.iter().peekable();
            let mut wins = 0usize;
            let mut tied = 0usize;
            for (j, &s) in scores.iter().enumerate() {
                if pos.peek() == Some(&&j) {
                    pos.next();
                    continue;
                }
                if ts > s {
                    wins += 1;
                } else if ts == s {
                    tied += 1;
                }
            }
            let numer = match opts.ties {
                TiePolicy::Strict => wins as f64,
                TiePolicy::Half => wins as f64 + 0.5 * tied as f64,
            };
            Ok(numer / n_candidates as f64)
        }
        Some((n, seed)) => {
            let mut rng =
                ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(u as u64 ^ 0x5eed)));
            let negatives = draw_negatives(&mut rng, positives, n_items, n_candidates, n);
            let mut items = Vec::with_capacity(n + 1);
            items.push(target);
            items.extend_from_slice(&negatives);
            let scores = scorer.score_items(u, &items);
            let numer = count_wins(scores[0], &scores[1..], opts.ties);
            Ok(numer / n as f64)
        }
    }
}

/// `n` distinct non-consumed items, uniform without replacement.
fn draw_negatives(
    rng: &mut ChaCha8Rng,
    positives: &[ItemId],
    n_items: usize,
    n_candidates: usize,
    n: usize,
) -> Vec<ItemId> {
    debug_assert!(n < n_candidates);
    if 4 * n >= 3 * n_candidates {
        // Dense draw: materialize D_u and take a partial Fisher–Yates
        // prefix. Cheaper than rejection when most items qualify as picks.
        let mut candidates = Vec::with_capacity(n_candidates);
        let mut pos = positives.iter().peekable();
        for j in 0..n_items {
            if pos.peek() == Some(&&j) {
                pos.next();
                continue;
            }
            candidates.push(j);
        }
        for idx in 0..n {
            let pick = rng.random_range(idx..candidates.len());
            candidates.swap(idx, pick);
        }
        candidates.truncate(n);
        candidates
    } else {
        let mut drawn = std::collections::HashSet::with_capacity(n);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let j = rng.random_range(0..n_items);
            if positives.binary_search(&j).is_ok() || !drawn.insert(j) {
                continue;
            }
            out.push(j);
        }
        out
    }
}

/// Evaluates every user holding the requested target item.
///
/// `positives` is the dataset's full per-user sets; candidates exclude all
/// of them. Consumers without a target are skipped and counted. Fails with
/// [`Error::NothingToEvaluate`] when no user qualifies and with
/// [`Error::EmptyCandidateSet`] when a qualifying user consumed the whole
/// catalogue.
pub fn evaluate_auc<S: Scorer + Sync>(
    scorer: &S,
    positives: &[Vec<ItemId>],
    split: &Split,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    let n_users = positives.len();
    let targets = match opts.target {
        EvalTarget::Test => &split.test,
        EvalTarget::Validation => &split.val,
    };
    assert_eq!(targets.len(), n_users, "split does not match dataset");

    let outcomes: Result<Vec<UserOutcome>> = (0..n_users)
        .into_par_iter()
        .map(|u| -> Result<UserOutcome> {
            match targets[u] {
                None => {
                    if positives[u].is_empty() {
                        Ok(UserOutcome::NotConsumer)
                    } else {
                        Ok(UserOutcome::Skipped)
                    }
                }
                Some(t) => {
                    let auc = eval_user(scorer, &positives[u], t, u, opts)?;
                    Ok(UserOutcome::Evaluated {
                        auc,
                        cold: split.train[u].len() < opts.cold_threshold,
                    })
                }
            }
        })
        .collect();
    let outcomes = outcomes?;

    let mut all = KahanSum::new();
    let mut cold_sum = KahanSum::new();
    let mut per_user = Vec::new();
    let mut n_cold = 0usize;
    let mut n_skipped = 0usize;
    for (u, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            UserOutcome::NotConsumer => {}
            UserOutcome::Skipped => n_skipped += 1,
            UserOutcome::Evaluated { auc, cold } => {
                all.add(auc);
                per_user.push((u, auc));
                if cold {
                    cold_sum.add(auc);
                    n_cold += 1;
                }
            }
        }
    }
    let n_eval = per_user.len();
    if n_eval == 0 {
        return Err(Error::NothingToEvaluate {
            context: format!("no user holds a {:?} item", opts.target),
        });
    }
    Ok(EvalReport {
        auc_all: all.value() / n_eval as f64,
        auc_cold: cold_sum.value() / n_cold as f64,
        n_eval_users: n_eval,
        n_cold_users: n_cold,
        n_skipped,
        per_user,
        mode: opts.mode,
    })
}

/// [`evaluate_auc`] for concrete model parameters.
pub fn evaluate_model(
    params: &ModelParams,
    dataset: &Dataset,
    split: &Split,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    let scorer = ModelScorer::new(params, dataset.producer_of());
    evaluate_auc(&scorer, dataset.all_positives(), split, opts)
}

/// One sweep cell: a (model, K) pair after λ selection and test evaluation.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub model: ModelKind,
    pub k: usize,
    /// Selected regularization weight; NaN when the cell failed.
    pub lambda: f64,
    pub auc_all: f64,
    pub auc_cold: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Plot-ready CSV, `model,K,auc_all,auc_cold`. Failed cells carry NaN.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("model,K,auc_all,auc_cold\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.model, r.k, r.auc_all, r.auc_cold));
        }
        s
    }
}

/// Trains and evaluates every (model, K) cell: grid search on λ against
/// validation AUC, then a test-slice evaluation at the winner. Cell
/// failures are recorded in the row and the sweep continues. Seeds come
/// from `base`, shared across cells.
pub fn k_sweep(
    dataset: &Dataset,
    split: &Split,
    kinds: &[ModelKind],
    k_list: &[usize],
    base: &TrainConfig,
    lambda_grid: &[f64],
    eval_opts: &EvalOptions,
) -> SweepTable {
    assert!(!k_list.is_empty(), "empty K list");
    let mut table = SweepTable::default();
    for &kind in kinds {
        for &k in k_list {
            let cfg = TrainConfig { k, ..base.clone() };
            let cell = grid_search(dataset, split, kind, &cfg, lambda_grid)
                .and_then(|res| {
                    let report = evaluate_model(&res.best_params, dataset, split, eval_opts)?;
                    Ok((res.best_lambda, report))
                });
            match cell {
                Ok((lambda, report)) => table.rows.push(SweepRow {
                    model: kind,
                    k,
                    lambda,
                    auc_all: report.auc_all,
                    auc_cold: report.auc_cold,
                    error: None,
                }),
                Err(e) => table.rows.push(SweepRow {
                    model: kind,
                    k,
                    lambda: f64::NAN,
                    auc_all: f64::NAN,
                    auc_cold: f64::NAN,
                    error: Some(e.to_string()),
                }),
            }
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scores fixed per (user, item) by hashing; deterministic, no ties.
    struct HashScorer {
        n_items: usize,
        salt: u64,
    }

    impl Scorer for HashScorer {
        fn n_items(&self) -> usize {
            self.n_items
        }
        fn score(&self, u: UserId, i: ItemId) -> f64 {
            let h = splitmix64(self.salt ^ ((u as u64) << 32) ^ i as u64);
            (h >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    /// Scores depending only on the item.
    struct ItemScorer {
        n_items: usize,
        salt: u64,
    }

    impl Scorer for ItemScorer {
        fn n_items(&self) -> usize {
            self.n_items
        }
        fn score(&self, _u: UserId, i: ItemId) -> f64 {
            (splitmix64(self.salt ^ i as u64) >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    struct ConstScorer {
        n_items: usize,
    }

    impl Scorer for ConstScorer {
        fn n_items(&self) -> usize {
            self.n_items
        }
        fn score(&self, _u: UserId, _i: ItemId) -> f64 {
            1.0
        }
    }

    fn simple_split(train: Vec<Vec<ItemId>>, test: Vec<Option<ItemId>>) -> Split {
        let n = train.len();
        Split {
            train,
            val: vec![None; n],
            test,
            seed: 0,
        }
    }

    /// Brute-force oracle: enumerate D_u and count strict wins.
    fn oracle_user_auc<S: Scorer>(
        scorer: &S,
        positives: &[ItemId],
        t: ItemId,
        u: UserId,
    ) -> f64 {
        let mut wins = 0usize;
        let mut total = 0usize;
        for j in 0..scorer.n_items() {
            if positives.binary_search(&j).is_ok() {
                continue;
            }
            total += 1;
            if scorer.score(u, t) > scorer.score(u, j) {
                wins += 1;
            }
        }
        wins as f64 / total as f64
    }

    #[test]
    fn exact_auc_matches_pair_counting_oracle() {
        let scorer = HashScorer {
            n_items: 20,
            salt: 5,
        };
        let positives = vec![vec![0, 3, 7], vec![1, 2], vec![4, 9, 10, 11]];
        let split = simple_split(
            vec![vec![0, 3], vec![1], vec![4, 9, 10]],
            vec![Some(7), Some(2), Some(11)],
        );
        let report = evaluate_auc(&scorer, &positives, &split, &EvalOptions::default()).unwrap();
        assert_eq!(report.n_eval_users, 3);
        for &(u, auc) in &report.per_user {
            let want = oracle_user_auc(&scorer, &positives[u], split.test[u].unwrap(), u);
            assert_eq!(auc, want, "user {u}");
        }
    }

    #[test]
    fn top_and_bottom_targets_hit_the_extremes() {
        // Item scores are their index; target 9 beats everything,
        // target 0 loses everything.
        struct Ladder;
        impl Scorer for Ladder {
            fn n_items(&self) -> usize {
                10
            }
            fn score(&self, _u: UserId, i: ItemId) -> f64 {
                i as f64
            }
        }
        let positives = vec![vec![9], vec![0]];
        let split = simple_split(vec![vec![], vec![]], vec![Some(9), Some(0)]);
        let report = evaluate_auc(&Ladder, &positives, &split, &EvalOptions::default()).unwrap();
        assert_eq!(report.per_user[0].1, 1.0);
        assert_eq!(report.per_user[1].1, 0.0);
    }

    #[test]
    fn ties_lose_by_default_and_split_under_half_policy() {
        let positives = vec![vec![0]];
        let split = simple_split(vec![vec![]], vec![Some(0)]);
        let strict =
            evaluate_auc(&ConstScorer { n_items: 5 }, &positives, &split, &EvalOptions::default())
                .unwrap();
        assert_eq!(strict.auc_all, 0.0);
        let half_opts = EvalOptions {
            ties: TiePolicy::Half,
            ..EvalOptions::default()
        };
        let half =
            evaluate_auc(&ConstScorer { n_items: 5 }, &positives, &split, &half_opts).unwrap();
        assert_eq!(half.auc_all, 0.5);
    }

    #[test]
    fn auc_is_invariant_under_increasing_transforms() {
        struct Affine<S> {
            inner: S,
            a: f64,
            b: f64,
        }
        impl<S: Scorer> Scorer for Affine<S> {
            fn n_items(&self) -> usize {
                self.inner.n_items()
            }
            fn score(&self, u: UserId, i: ItemId) -> f64 {
                self.a * self.inner.score(u, i) + self.b
            }
        }
        let positives = vec![vec![2, 5], vec![0, 8, 12]];
        let split = simple_split(vec![vec![2], vec![0, 8]], vec![Some(5), Some(12)]);
        let base = HashScorer {
            n_items: 15,
            salt: 77,
        };
        let before =
            evaluate_auc(&base, &positives, &split, &EvalOptions::default()).unwrap();
        let scaled = Affine {
            inner: HashScorer {
                n_items: 15,
                salt: 77,
            },
            a: 3.5,
            b: -2.0,
        };
        let after = evaluate_auc(&scaled, &positives, &split, &EvalOptions::default()).unwrap();
        assert_eq!(before.per_user, after.per_user);
        assert_eq!(before.auc_all, after.auc_all);
    }

    #[test]
    fn sampling_all_candidates_equals_exact() {
        let scorer = HashScorer {
            n_items: 30,
            salt: 3,
        };
        let positives = vec![vec![1, 2, 3], vec![4, 5]];
        let split = simple_split(vec![vec![1, 2], vec![4]], vec![Some(3), Some(5)]);
        let exact = evaluate_auc(&scorer, &positives, &split, &EvalOptions::default()).unwrap();
        // Largest candidate set is 28 items (user 1); meeting or
        // exceeding it must reproduce exact mode bit for bit.
        for extra in [0usize, 5, 100] {
            let opts = EvalOptions {
                mode: EvalMode::Sampled {
                    n_negatives: 28 + extra,
                    seed: 9,
                },
                ..EvalOptions::default()
            };
            let sampled = evaluate_auc(&scorer, &positives, &split, &opts).unwrap();
            assert_eq!(sampled.auc_all, exact.auc_all);
            assert_eq!(sampled.per_user, exact.per_user);
        }
    }

    #[test]
    fn sampled_mode_is_deterministic_and_seed_sensitive() {
        let scorer = HashScorer {
            n_items: 200,
            salt: 8,
        };
        let positives = vec![vec![0, 1, 2, 3]];
        let split = simple_split(vec![vec![0, 1, 2]], vec![Some(3)]);
        let opts = |seed| EvalOptions {
            mode: EvalMode::Sampled {
                n_negatives: 20,
                seed,
            },
            ..EvalOptions::default()
        };
        let a = evaluate_auc(&scorer, &positives, &split, &opts(1)).unwrap();
        let b = evaluate_auc(&scorer, &positives, &split, &opts(1)).unwrap();
        assert_eq!(a, b);
        let sweep: Vec<f64> = (0..20)
            .map(|s| {
                evaluate_auc(&scorer, &positives, &split, &opts(s))
                    .unwrap()
                    .auc_all
            })
            .collect();
        assert!(sweep.iter().any(|&v| v != sweep[0]), "seed never mattered");
    }

    #[test]
    fn both_draw_strategies_sample_without_replacement() {
        // Dense branch: ask for 90 of 95 candidates. Sparse branch: 10 of 95.
        let positives: Vec<ItemId> = vec![7, 20, 33, 41, 88];
        for n in [90usize, 10] {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let negs = draw_negatives(&mut rng, &positives, 100, 95, n);
            assert_eq!(negs.len(), n);
            let mut sorted = negs.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), n, "duplicates drawn");
            assert!(sorted.iter().all(|j| positives.binary_search(j).is_err()));
        }
    }

    #[test]
    fn cold_slice_counts_users_below_threshold() {
        let scorer = HashScorer {
            n_items: 40,
            salt: 6,
        };
        // User 0: 2 train items (cold); user 1: 7 (warm).
        let positives = vec![vec![0, 1, 2], vec![3, 4, 5, 6, 7, 8, 9, 10]];
        let split = simple_split(
            vec![vec![0, 1], vec![3, 4, 5, 6, 7, 8, 9]],
            vec![Some(2), Some(10)],
        );
        let report = evaluate_auc(&scorer, &positives, &split, &EvalOptions::default()).unwrap();
        assert_eq!(report.n_eval_users, 2);
        assert_eq!(report.n_cold_users, 1);
        let cold_auc = report.per_user[0].1;
        assert_eq!(report.auc_cold, cold_auc);
    }

    #[test]
    fn consumers_without_targets_are_skipped_and_counted() {
        let scorer = HashScorer {
            n_items: 10,
            salt: 2,
        };
        // User 0 evaluable; user 1 train-only; user 2 a pure producer.
        let positives = vec![vec![0, 1], vec![2, 3], vec![]];
        let split = simple_split(vec![vec![0], vec![2, 3], vec![]], vec![Some(1), None, None]);
        let report = evaluate_auc(&scorer, &positives, &split, &EvalOptions::default()).unwrap();
        assert_eq!(report.n_eval_users, 1);
        assert_eq!(report.n_skipped, 1);
    }

    #[test]
    fn empty_candidate_set_is_an_error() {
        let scorer = HashScorer {
            n_items: 3,
            salt: 1,
        };
        let positives = vec![vec![0, 1, 2]];
        let split = simple_split(vec![vec![0, 1]], vec![Some(2)]);
        let err =
            evaluate_auc(&scorer, &positives, &split, &EvalOptions::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyCandidateSet { user: 0 }));
    }

    #[test]
    fn no_evaluable_users_is_an_error() {
        let scorer = HashScorer {
            n_items: 5,
            salt: 0,
        };
        let positives = vec![vec![0, 1]];
        let split = simple_split(vec![vec![0, 1]], vec![None]);
        let err =
            evaluate_auc(&scorer, &positives, &split, &EvalOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NothingToEvaluate { .. }));
    }

    #[test]
    fn random_scores_average_near_one_half() {
        // 200 users, ~1/12 per-user variance: 3σ ≈ 0.063 on the mean.
        let n_users = 200;
        let scorer = HashScorer {
            n_items: 50,
            salt: 404,
        };
        let positives: Vec<Vec<ItemId>> = (0..n_users).map(|u| vec![(u % 50) as ItemId]).collect();
        let split = simple_split(
            vec![vec![]; n_users],
            (0..n_users).map(|u| Some((u % 50) as ItemId)).collect(),
        );
        let report = evaluate_auc(&scorer, &positives, &split, &EvalOptions::default()).unwrap();
        assert!(
            (report.auc_all - 0.5).abs() < 0.07,
            "auc {}",
            report.auc_all
        );
    }

    #[test]
    fn duplicated_user_leaves_other_contributions_unchanged() {
        // Scores depend only on the item, so adding a copy of user 1
        // must not move user 0's per-user AUC.
        let scorer3 = ItemScorer {
            n_items: 12,
            salt: 9,
        };
        let positives_small = vec![vec![0, 4], vec![5, 6]];
        let split_small = simple_split(vec![vec![0], vec![5]], vec![Some(4), Some(6)]);
        let small =
            evaluate_auc(&scorer3, &positives_small, &split_small, &EvalOptions::default())
                .unwrap();

        let positives_big = vec![vec![0, 4], vec![5, 6], vec![5, 6]];
        let split_big = simple_split(
            vec![vec![0], vec![5], vec![5]],
            vec![Some(4), Some(6), Some(6)],
        );
        let big = evaluate_auc(&scorer3, &positives_big, &split_big, &EvalOptions::default())
            .unwrap();
        assert_eq!(small.per_user[0].1, big.per_user[0].1);
        assert_eq!(small.per_user[1].1, big.per_user[1].1);
        assert_eq!(big.per_user[1].1, big.per_user[2].1);
    }

    #[test]
    fn report_renders_the_documented_rows() {
        let scorer = HashScorer {
            n_items: 10,
            salt: 15,
        };
        let positives = vec![vec![0, 1]];
        let split = simple_split(vec![vec![0]], vec![Some(1)]);
        let report = evaluate_auc(&scorer, &positives, &split, &EvalOptions::default()).unwrap();
        let text = report.render();
        assert!(text.contains("slice,auc,n_users"));
        assert!(text.contains("all,"));
        assert!(text.contains("cold,"));
    }
}
