//! Head-to-head comparison of all five models on one synthetic corpus
//! with a strong producer-appreciation signal. Regularization is
//! grid-searched per model on validation AUC; the table reports test AUC.
//!
//!     cargo run --example compare_models

use cprec::eval::{evaluate_model, EvalOptions};
use cprec::model::ModelKind;
use cprec::synth::{generate_synthetic, SynthConfig};
use cprec::train::{grid_search, TrainConfig};

fn main() -> cprec::Result<()> {
    let corpus = generate_synthetic(&SynthConfig {
        n_users: 500,
        n_items_per_producer: 4,
        appreciation_weight: 0.7,
        mean_actions: 20.0,
        seed: 17,
        ..SynthConfig::default()
    });
    let split = corpus.split_leave_one_out(17);
    println!("{}", corpus.corpus_stats().render_table("shootout"));

    let base = TrainConfig {
        k: 10,
        batch_size: 1024,
        max_epochs: 60,
        patience: 5,
        val_negatives: 100,
        seed: 17,
        ..TrainConfig::default()
    };
    let grid = [0.001, 0.01, 0.1, 1.0];

    println!("{:>7}  {:>9}  {:>8}  {:>8}", "model", "test auc", "lambda", "val auc");
    for kind in ModelKind::ALL {
        let res = grid_search(&corpus, &split, kind, &base, &grid)?;
        let eval = evaluate_model(&res.best_params, &corpus, &split, &EvalOptions::default())?;
        println!(
            "{:>7}  {:>9.4}  {:>8}  {:>8.4}",
            kind.to_string(),
            eval.auc_all,
            res.best_lambda,
            res.best_val_auc
        );
    }
    Ok(())
}
