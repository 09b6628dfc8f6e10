//! Check analytic ranking-loss gradients against central finite
//! differences, coordinate by coordinate, for every model.
//!
//!     cargo run --example gradient_check

use cprec::model::{init_params, ModelKind, ModelParams};
use cprec::train::{bpr_gradients, bpr_loss, Triple};

fn finite_difference(
    params: &ModelParams,
    producer_of: &[usize],
    batch: &[Triple],
    lambda: f64,
    h: f64,
) -> ModelParams {
    let mut fd = params.zeros_like();
    for t in 0..params.tensors().len() {
        for e in 0..params.tensors()[t].1.len() {
            let mut plus = params.clone();
            plus.tensors_mut()[t].1[e] += h;
            let up = bpr_loss(&plus, producer_of, batch, lambda);
            let mut minus = params.clone();
            minus.tensors_mut()[t].1[e] -= h;
            let down = bpr_loss(&minus, producer_of, batch, lambda);
            fd.tensors_mut()[t].1[e] = (up - down) / (2.0 * h);
        }
    }
    fd
}

fn main() {
    // 4 users, 6 items; user 0 produced items 0 and 4, so the batch
    // includes a self-produced positive, the hardest accumulation case.
    let producer_of = vec![0, 1, 2, 3, 0, 1];
    let batch: Vec<Triple> = [(0, 0, 3), (1, 2, 5), (3, 4, 1), (0, 4, 2)]
        .iter()
        .map(|&(user, pos, neg)| Triple { user, pos, neg })
        .collect();
    let lambda = 0.05;

    for kind in [
        ModelKind::BprMf,
        ModelKind::Fm,
        ModelKind::Vista,
        ModelKind::CpRec,
    ] {
        let params = init_params(kind, 4, 6, 4, 7);
        let analytic = bpr_gradients(&params, &producer_of, &batch, lambda);
        let fd = finite_difference(&params, &producer_of, &batch, lambda, 1e-5);

        let mut worst = 0.0f64;
        let mut coords = 0usize;
        for ((_, a), (_, f)) in analytic.tensors().iter().zip(fd.tensors().iter()) {
            for (&x, &y) in a.iter().zip(f.iter()) {
                let rel = (x - y).abs() / (1e-7 + x.abs().max(y.abs()));
                worst = worst.max(rel);
                coords += 1;
            }
        }
        println!("{kind:>7}: {coords} coordinates, worst relative error {worst:.3e}");
        assert!(worst < 1e-4, "{kind} gradients disagree with the loss");
    }
    println!("all analytic gradients agree with finite differences");
}
