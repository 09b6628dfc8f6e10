//! Sweep embedding dimension per model and emit the plot-ready CSV.
//!
//!     cargo run --example k_sweep

use cprec::eval::{k_sweep, EvalOptions};
use cprec::model::ModelKind;
use cprec::synth::{generate_synthetic, SynthConfig};
use cprec::train::TrainConfig;

fn main() {
    let corpus = generate_synthetic(&SynthConfig {
        n_users: 300,
        n_items_per_producer: 2,
        appreciation_weight: 0.6,
        mean_actions: 15.0,
        seed: 23,
        ..SynthConfig::default()
    });
    let split = corpus.split_leave_one_out(23);

    let base = TrainConfig {
        batch_size: 512,
        max_epochs: 30,
        patience: 4,
        val_negatives: 50,
        seed: 23,
        ..TrainConfig::default()
    };
    let table = k_sweep(
        &corpus,
        &split,
        &[ModelKind::PopRec, ModelKind::BprMf, ModelKind::CpRec],
        &[4, 8, 16],
        &base,
        &[0.01, 0.1],
        &EvalOptions::default(),
    );
    print!("{}", table.to_csv());
    for row in &table.rows {
        if let Some(err) = &row.error {
            eprintln!("cell {} K={} failed: {err}", row.model, row.k);
        }
    }
}
