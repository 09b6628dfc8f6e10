//! Smallest end-to-end run: synthesize a corpus, split it, train the
//! consumer/producer model, and report test AUC.
//!
//!     cargo run --example quickstart

use cprec::eval::{evaluate_model, EvalOptions};
use cprec::model::ModelKind;
use cprec::synth::{generate_synthetic, SynthConfig};
use cprec::train::{train, TrainConfig};

fn main() -> cprec::Result<()> {
    let corpus = generate_synthetic(&SynthConfig {
        n_users: 300,
        n_items_per_producer: 2,
        appreciation_weight: 0.7,
        mean_actions: 20.0,
        seed: 1,
        ..SynthConfig::default()
    });
    println!("{}", corpus.corpus_stats().render_table("quickstart"));

    let split = corpus.split_leave_one_out(1);
    let cfg = TrainConfig {
        k: 8,
        lambda: 0.01,
        batch_size: 512,
        max_epochs: 40,
        patience: 5,
        val_negatives: 100,
        seed: 1,
        ..TrainConfig::default()
    };
    let (params, report) = train(&corpus, &split, ModelKind::CpRec, &cfg)?;
    println!(
        "trained {} epochs, best validation at epoch {:?}",
        report.epochs.len(),
        report.best_epoch
    );

    let eval = evaluate_model(&params, &corpus, &split, &EvalOptions::default())?;
    println!(
        "test AUC: {:.4} over {} users ({} cold)",
        eval.auc_all, eval.n_eval_users, eval.n_cold_users
    );
    Ok(())
}
