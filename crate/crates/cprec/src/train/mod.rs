//! Pairwise-ranking training loop and regularization grid search.
//!
//! One epoch draws ceil(n_train / batch) batches of (user, positive,
//! negative) triples, takes an Adam step per batch, then measures
//! validation AUC. Training stops after `patience` epochs without strict
//! validation improvement and returns the parameters from the best epoch.
//! Corpora with no validation items disable early stopping (there is
//! nothing to compare against) and return the final epoch instead.
//!
//! Everything downstream of the seed is deterministic: the triple stream
//! and the validation evaluator draw from fixed, separately tagged
//! substreams, so reruns with one config produce byte-identical
//! parameters and reports (wall-clock columns aside).

pub mod adam;
pub mod loss;
pub mod sampler;

pub use adam::{adam_step, AdamState};
pub use loss::{bpr_loss, bpr_gradients, bpr_loss_and_gradients};
pub use sampler::{Triple, TripleSampler};

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, Split};
use crate::error::Error;
use crate::eval::{evaluate_model, EvalMode, EvalOptions, EvalTarget};
use crate::linalg::{splitmix64, KahanSum};
use crate::model::{init_params, ModelKind, ModelParams, PopRecParams};
use crate::Result;

/// Keeps the triple stream and the validation stream from colliding when
/// both derive from one user-facing seed.
const SAMPLER_STREAM: u64 = 0x73616d706c6572; // "sampler"
const VAL_STREAM: u64 = 0x76616c; // "val"

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub k: usize,
    pub lambda: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without strict validation improvement before stopping.
    pub patience: usize,
    pub seed: u64,
    /// Negatives per user for the per-epoch validation AUC; 0 means exact.
    pub val_negatives: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            k: 20,
            lambda: 0.01,
            learning_rate: 0.01,
            batch_size: 10_000,
            max_epochs: 200,
            patience: 10,
            seed: 42,
            val_negatives: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean batch loss over the epoch; NaN for the counting model, which
    /// has no loss.
    pub loss: f64,
    /// NaN when the split holds no validation items.
    pub val_auc: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochStats>,
    /// Epoch whose parameters were returned; None when nothing was
    /// selected on validation (no val items, or zero epochs).
    pub best_epoch: Option<usize>,
}

impl TrainReport {
    /// `epoch,loss,val_auc,seconds` rows. The seconds column is wall
    /// clock and is the one part of a run that legitimately varies.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,loss,val_auc,seconds\n");
        for row in &self.epochs {
            s.push_str(&format!(
                "{},{},{},{}\n",
                row.epoch, row.loss, row.val_auc, row.seconds
            ));
        }
        s
    }
}

fn validation_options(cfg: &TrainConfig) -> EvalOptions {
    EvalOptions {
        target: EvalTarget::Validation,
        mode: if cfg.val_negatives == 0 {
            EvalMode::Exact
        } else {
            EvalMode::Sampled {
                n_negatives: cfg.val_negatives,
                seed: splitmix64(cfg.seed ^ VAL_STREAM),
            }
        },
        ..EvalOptions::default()
    }
}

/// Trains `kind` on the split's training actions.
///
/// Returns the selected parameters and the per-epoch log. The counting
/// baseline has no gradient phase: its single "epoch" tallies training
/// popularity. `max_epochs == 0` returns the untrained initialization
/// with an empty log for every model.
pub fn train(
    dataset: &Dataset,
    split: &Split,
    kind: ModelKind,
    cfg: &TrainConfig,
) -> Result<(ModelParams, TrainReport)> {
    let n_users = dataset.n_users();
    let n_items = dataset.n_items();
    let mut params = init_params(kind, n_users, n_items, cfg.k, cfg.seed);
    if cfg.max_epochs == 0 {
        return Ok((params, TrainReport::default()));
    }

    let has_val = split.val.iter().any(|t| t.is_some());
    let val_opts = validation_options(cfg);
    let val_auc_of = |p: &ModelParams| -> Result<f64> {
        if !has_val {
            return Ok(f64::NAN);
        }
        Ok(evaluate_model(p, dataset, split, &val_opts)?.auc_all)
    };

    if kind == ModelKind::PopRec {
        let started = Instant::now();
        let mut popularity = vec![0.0; n_items];
        for items in &split.train {
            for &i in items {
                popularity[i] += 1.0;
            }
        }
        params = ModelParams::PopRec(PopRecParams { popularity });
        let val_auc = val_auc_of(&params)?;
        let report = TrainReport {
            epochs: vec![EpochStats {
                epoch: 0,
                loss: f64::NAN,
                val_auc,
                seconds: started.elapsed().as_secs_f64(),
            }],
            best_epoch: Some(0),
        };
        return Ok((params, report));
    }

    let n_train = split.n_train_actions();
    if n_train == 0 {
        return Err(Error::EmptyAfterFilter {
            what: "training actions",
            min_actions: 0,
        });
    }
    let batch = cfg.batch_size.min(n_train).max(1);
    let batches_per_epoch = n_train.div_ceil(batch);

    let sampler = TripleSampler::new(split, dataset.all_positives(), n_items);
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(cfg.seed ^ SAMPLER_STREAM));
    let mut adam = AdamState::new(&params);

    let mut report = TrainReport::default();
    let mut best_val = f64::NEG_INFINITY;
    let mut best_params: Option<ModelParams> = None;
    let mut since_improvement = 0usize;

    for epoch in 0..cfg.max_epochs {
        let started = Instant::now();
        let mut loss_sum = KahanSum::new();
        for _ in 0..batches_per_epoch {
            let triples = sampler.sample_batch(batch, &mut rng)?;
            let (loss, grads) =
                bpr_loss_and_gradients(&params, dataset.producer_of(), &triples, cfg.lambda);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, loss });
            }
            adam_step(&mut params, &grads, &mut adam, cfg.learning_rate);
            loss_sum.add(loss);
        }
        let loss = loss_sum.value() / batches_per_epoch as f64;
        let val_auc = val_auc_of(&params)?;
        report.epochs.push(EpochStats {
            epoch,
            loss,
            val_auc,
            seconds: started.elapsed().as_secs_f64(),
        });

        if has_val {
            if val_auc > best_val {
                best_val = val_auc;
                report.best_epoch = Some(epoch);
                best_params = Some(params.clone());
                since_improvement = 0;
            } else {
                since_improvement += 1;
                if since_improvement >= cfg.patience {
                    break;
                }
            }
        }
    }

    if let Some(best) = best_params {
        params = best;
    }
    Ok((params, report))
}

/// Validation score of a finished run: the best epoch's AUC.
fn selected_val_auc(report: &TrainReport) -> f64 {
    match report.best_epoch {
        Some(e) => report
            .epochs
            .iter()
            .find(|row| row.epoch == e)
            .map(|row| row.val_auc)
            .unwrap_or(f64::NAN),
        None => f64::NAN,
    }
}

/// Grid-search preference. Ties within an absolute tolerance go to the
/// stronger regularizer; the held-out signal cannot separate them, and
/// the smaller model generalizes no worse.
pub(crate) fn better_candidate(
    new_val: f64,
    new_lambda: f64,
    best_val: f64,
    best_lambda: f64,
) -> bool {
    const TOL: f64 = 1e-9;
    new_val > best_val + TOL || (new_val >= best_val - TOL && new_lambda > best_lambda)
}

#[derive(Debug, Clone)]
pub struct GridRow {
    pub lambda: f64,
    pub val_auc: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GridSearchResult {
    pub best_params: ModelParams,
    pub best_lambda: f64,
    pub best_val_auc: f64,
    pub rows: Vec<GridRow>,
}

/// Trains once per λ and keeps the best validation AUC. A failing cell
/// is logged and skipped; the search fails only if every cell does, or if
/// the split has no validation items to select on.
pub fn grid_search(
    dataset: &Dataset,
    split: &Split,
    kind: ModelKind,
    base: &TrainConfig,
    lambda_grid: &[f64],
) -> Result<GridSearchResult> {
    assert!(!lambda_grid.is_empty(), "empty regularization grid");
    if !split.val.iter().any(|t| t.is_some()) {
        return Err(Error::NothingToEvaluate {
            context: "grid search needs validation items".to_string(),
        });
    }

    // Popularity counting has no regularizer; one run covers the grid.
    if kind == ModelKind::PopRec {
        let (params, report) = train(dataset, split, kind, base)?;
        let val = selected_val_auc(&report);
        return Ok(GridSearchResult {
            best_params: params,
            best_lambda: base.lambda,
            best_val_auc: val,
            rows: vec![GridRow {
                lambda: base.lambda,
                val_auc: val,
                error: None,
            }],
        });
    }

    let mut rows = Vec::new();
    let mut best: Option<(ModelParams, f64, f64)> = None;
    let mut first_error: Option<Error> = None;
    for &lambda in lambda_grid {
        let cfg = TrainConfig {
            lambda,
            ..base.clone()
        };
        match train(dataset, split, kind, &cfg) {
            Ok((params, report)) => {
                let val = selected_val_auc(&report);
                rows.push(GridRow {
                    lambda,
                    val_auc: val,
                    error: None,
                });
                let replace = match &best {
                    None => true,
                    Some((_, best_val, best_lambda)) => {
                        better_candidate(val, lambda, *best_val, *best_lambda)
                    }
                };
                if replace {
                    best = Some((params, val, lambda));
                }
            }
            Err(e) => {
                rows.push(GridRow {
                    lambda,
                    val_auc: f64::NAN,
                    error: Some(e.to_string()),
                });
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    match best {
        Some((params, val, lambda)) => Ok(GridSearchResult {
            best_params: params,
            best_lambda: lambda,
            best_val_auc: val,
            rows,
        }),
        None => Err(first_error.expect("no rows and no error")),
    }
}
