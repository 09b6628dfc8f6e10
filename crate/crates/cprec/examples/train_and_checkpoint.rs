//! Train a model, write the binary checkpoint, reload it, and confirm the
//! reloaded parameters score identically.
//!
//!     cargo run --example train_and_checkpoint

use cprec::eval::{evaluate_model, EvalOptions};
use cprec::model::checkpoint::{load_checkpoint, save_checkpoint};
use cprec::model::ModelKind;
use cprec::synth::{generate_synthetic, SynthConfig};
use cprec::train::{train, TrainConfig};

fn main() -> cprec::Result<()> {
    let corpus = generate_synthetic(&SynthConfig {
        n_users: 200,
        n_items_per_producer: 2,
        mean_actions: 15.0,
        seed: 9,
        ..SynthConfig::default()
    });
    let split = corpus.split_leave_one_out(9);
    let cfg = TrainConfig {
        k: 8,
        batch_size: 256,
        max_epochs: 15,
        patience: 15,
        val_negatives: 50,
        seed: 9,
        ..TrainConfig::default()
    };
    let (params, _) = train(&corpus, &split, ModelKind::Vista, &cfg)?;

    let dir = std::env::temp_dir().join("cprec-checkpoint-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("vista.ckpt");
    save_checkpoint(&path, &params, cfg.seed)?;
    println!(
        "wrote {} ({} bytes)",
        path.display(),
        std::fs::metadata(&path)?.len()
    );

    let (reloaded, seed) = load_checkpoint(&path)?;
    assert_eq!(reloaded, params, "round trip must be lossless");
    println!("reloaded checkpoint trained with seed {seed}");

    let before = evaluate_model(&params, &corpus, &split, &EvalOptions::default())?;
    let after = evaluate_model(&reloaded, &corpus, &split, &EvalOptions::default())?;
    assert_eq!(before.auc_all, after.auc_all);
    println!("test AUC from reloaded parameters: {:.4}", after.auc_all);
    Ok(())
}
