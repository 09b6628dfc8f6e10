//! Pairwise ranking loss and its analytic gradients.
//!
//! For a batch B of triples, with s = x̂_ui − x̂_uj per triple:
//!
//! loss(B) = (1/|B|) [ Σ softplus(−s) + λ‖Θ_B‖² ]
//!
//! where Θ_B is the set of parameters the batch touches, each row counted
//! once: the embedding rows of the batch's users, items, and producers,
//! plus the whole projection matrices for CpRec. Biases are exempt from
//! the penalty. Averaging the penalty together with the data term keeps
//! the decay pressure per parameter on the per-triple scale of stochastic
//! BPR implementations, independent of the batch size.
//!
//! Gradients use dℓ/ds = σ(s) − 1 per triple; the whole gradient is
//! averaged over the batch and the penalty contributes 2λθ/|B| on touched
//! rows. Rows touched twice (a triple whose positive and negative share a
//! producer, or a user who produced their own positive) accumulate both
//! pathway terms, which is exactly the derivative of the combined
//! expression.

use crate::linalg::{axpy, sigmoid, softplus, sq_norm, Mat};
use crate::model::ModelParams;
use crate::train::sampler::Triple;
use crate::UserId;

/// Sorted, deduplicated row indexes referenced by a batch.
#[derive(Debug, Default)]
struct TouchedRows {
    /// Users appearing as the consumer of a triple.
    users: Vec<usize>,
    /// Positive and negative items.
    items: Vec<usize>,
    /// Producers of positive and negative items.
    producers: Vec<usize>,
    /// users ∪ producers, for tables indexed by both roles.
    users_and_producers: Vec<usize>,
}

fn touched_rows(producer_of: &[UserId], batch: &[Triple]) -> TouchedRows {
    let mut t = TouchedRows::default();
    for tr in batch {
        t.users.push(tr.user);
        t.items.push(tr.pos);
        t.items.push(tr.neg);
        t.producers.push(producer_of[tr.pos]);
        t.producers.push(producer_of[tr.neg]);
    }
    let dedup = |v: &mut Vec<usize>| {
        v.sort_unstable();
        v.dedup();
    };
    dedup(&mut t.users);
    dedup(&mut t.items);
    dedup(&mut t.producers);
    t.users_and_producers = t
        .users
        .iter()
        .chain(t.producers.iter())
        .copied()
        .collect();
    dedup(&mut t.users_and_producers);
    t
}

/// Squared norm of the parameters the batch touches. Fixed summation
/// order: declared tensor order, rows ascending.
fn touched_sq_norm(params: &ModelParams, rows: &TouchedRows) -> f64 {
    let row_sum = |m: &Mat, idx: &[usize]| -> f64 {
        let mut s = 0.0;
        for &r in idx {
            s += sq_norm(m.row(r));
        }
        s
    };
    match params {
        ModelParams::PopRec(_) => 0.0,
        ModelParams::BprMf(p) => row_sum(&p.user_emb, &rows.users) + row_sum(&p.item_emb, &rows.items),
        ModelParams::Fm(p) => {
            row_sum(&p.user_emb, &rows.users)
                + row_sum(&p.item_emb, &rows.items)
                + row_sum(&p.producer_emb, &rows.producers)
        }
        ModelParams::Vista(p) => {
            row_sum(&p.user_emb1, &rows.users)
                + row_sum(&p.user_emb2, &rows.users_and_producers)
                + row_sum(&p.item_emb, &rows.items)
        }
        ModelParams::CpRec(p) => {
            row_sum(&p.core_emb, &rows.users_and_producers)
                + row_sum(&p.item_emb, &rows.items)
                + sq_norm(p.w_consumer.as_slice())
                + sq_norm(p.w_producer.as_slice())
        }
    }
}

/// Batch mean of the pairwise loss and the touched-parameter penalty.
pub fn bpr_loss(
    params: &ModelParams,
    producer_of: &[UserId],
    batch: &[Triple],
    lambda: f64,
) -> f64 {
    assert!(!batch.is_empty(), "empty batch");
    let mut data = 0.0;
    for t in batch {
        let s = params.score(producer_of, t.user, t.pos) - params.score(producer_of, t.user, t.neg);
        data += softplus(-s);
    }
    if lambda != 0.0 {
        data += lambda * touched_sq_norm(params, &touched_rows(producer_of, batch));
    }
    data / batch.len() as f64
}

/// Analytic gradients of [`bpr_loss`] with respect to every tensor.
/// Untouched rows stay zero. PopRec has no trainable gradient.
pub fn bpr_gradients(
    params: &ModelParams,
    producer_of: &[UserId],
    batch: &[Triple],
    lambda: f64,
) -> ModelParams {
    bpr_loss_and_gradients(params, producer_of, batch, lambda).1
}

/// Loss and gradients in one pass over the batch (scores computed once).
pub fn bpr_loss_and_gradients(
    params: &ModelParams,
    producer_of: &[UserId],
    batch: &[Triple],
    lambda: f64,
) -> (f64, ModelParams) {
    assert!(!batch.is_empty(), "empty batch");
    let mut grads = params.zeros_like();
    let mut data = 0.0;

    match (params, &mut grads) {
        (ModelParams::PopRec(p), ModelParams::PopRec(_)) => {
            for t in batch {
                let s = p.score(t.pos) - p.score(t.neg);
                data += softplus(-s);
            }
        }
        (ModelParams::BprMf(p), ModelParams::BprMf(g)) => {
            for t in batch {
                let s = p.score(t.user, t.pos) - p.score(t.user, t.neg);
                data += softplus(-s);
                let e = sigmoid(s) - 1.0;
                let gu = p.user_emb.row(t.user);
                // ∂γ_u += e(γ_i − γ_j)
                axpy(g.user_emb.row_mut(t.user), e, p.item_emb.row(t.pos));
                axpy(g.user_emb.row_mut(t.user), -e, p.item_emb.row(t.neg));
                // ∂γ_i += e γ_u, ∂γ_j −= e γ_u
                axpy(g.item_emb.row_mut(t.pos), e, gu);
                axpy(g.item_emb.row_mut(t.neg), -e, gu);
                g.item_bias[t.pos] += e;
                g.item_bias[t.neg] -= e;
            }
        }
        (ModelParams::Fm(p), ModelParams::Fm(g)) => {
            for t in batch {
                let (pi, pj) = (producer_of[t.pos], producer_of[t.neg]);
                let s =
                    p.score(producer_of, t.user, t.pos) - p.score(producer_of, t.user, t.neg);
                data += softplus(-s);
                let e = sigmoid(s) - 1.0;
                let gu = p.user_emb.row(t.user);
                let gi = p.item_emb.row(t.pos);
                let gj = p.item_emb.row(t.neg);
                let gpi = p.producer_emb.row(pi);
                let gpj = p.producer_emb.row(pj);
                // ∂γ⁽¹⁾_u += e[(γ_i + γ⁽²⁾_pi) − (γ_j + γ⁽²⁾_pj)]
                let gur = g.user_emb.row_mut(t.user);
                axpy(gur, e, gi);
                axpy(gur, e, gpi);
                axpy(gur, -e, gj);
                axpy(gur, -e, gpj);
                // ∂γ_i += e(γ⁽¹⁾_u + γ⁽²⁾_pi); ∂γ_j −= e(γ⁽¹⁾_u + γ⁽²⁾_pj)
                let gir = g.item_emb.row_mut(t.pos);
                axpy(gir, e, gu);
                axpy(gir, e, gpi);
                let gjr = g.item_emb.row_mut(t.neg);
                axpy(gjr, -e, gu);
                axpy(gjr, -e, gpj);
                // ∂γ⁽²⁾_pi += e(γ⁽¹⁾_u + γ_i); ∂γ⁽²⁾_pj −= e(γ⁽¹⁾_u + γ_j)
                let gpir = g.producer_emb.row_mut(pi);
                axpy(gpir, e, gu);
                axpy(gpir, e, gi);
                let gpjr = g.producer_emb.row_mut(pj);
                axpy(gpjr, -e, gu);
                axpy(gpjr, -e, gj);
                g.item_bias[t.pos] += e;
                g.item_bias[t.neg] -= e;
                g.producer_bias[pi] += e;
                g.producer_bias[pj] -= e;
                // β_u cancels in s: zero gradient.
            }
        }
        (ModelParams::Vista(p), ModelParams::Vista(g)) => {
            for t in batch {
                let (pi, pj) = (producer_of[t.pos], producer_of[t.neg]);
                let s =
                    p.score(producer_of, t.user, t.pos) - p.score(producer_of, t.user, t.neg);
                data += softplus(-s);
                let e = sigmoid(s) - 1.0;
                let g1u = p.user_emb1.row(t.user);
                let g2u = p.user_emb2.row(t.user);
                // Consumer-item pathway.
                let g1r = g.user_emb1.row_mut(t.user);
                axpy(g1r, e, p.item_emb.row(t.pos));
                axpy(g1r, -e, p.item_emb.row(t.neg));
                axpy(g.item_emb.row_mut(t.pos), e, g1u);
                axpy(g.item_emb.row_mut(t.neg), -e, g1u);
                // Symmetric pathway through the shared table; when
                // t.user == pi the row receives both contributions.
                let g2r = g.user_emb2.row_mut(t.user);
                axpy(g2r, e, p.user_emb2.row(pi));
                axpy(g2r, -e, p.user_emb2.row(pj));
                axpy(g.user_emb2.row_mut(pi), e, g2u);
                axpy(g.user_emb2.row_mut(pj), -e, g2u);
                g.item_bias[t.pos] += e;
                g.item_bias[t.neg] -= e;
            }
        }
        (ModelParams::CpRec(p), ModelParams::CpRec(g)) => {
            for t in batch {
                let (pi, pj) = (producer_of[t.pos], producer_of[t.neg]);
                let s =
                    p.score(producer_of, t.user, t.pos) - p.score(producer_of, t.user, t.neg);
                data += softplus(-s);
                let e = sigmoid(s) - 1.0;
                let core_u = p.core_emb.row(t.user);
                let c = p.w_consumer.matvec(core_u);
                let q_pi = p.w_producer.matvec(p.core_emb.row(pi));
                let q_pj = p.w_producer.matvec(p.core_emb.row(pj));
                // d = (γ_i − γ_j) + (q_pi − q_pj): everything ⟨c, ·⟩ meets.
                let mut d = p.item_emb.row(t.pos).to_vec();
                axpy(&mut d, -1.0, p.item_emb.row(t.neg));
                axpy(&mut d, 1.0, &q_pi);
                axpy(&mut d, -1.0, &q_pj);
                // ∂γ_i += e c; ∂γ_j −= e c
                axpy(g.item_emb.row_mut(t.pos), e, &c);
                axpy(g.item_emb.row_mut(t.neg), -e, &c);
                // ∂γ_u += e W_cᵀ d (consumer pathway through the core).
                axpy(g.core_emb.row_mut(t.user), e, &p.w_consumer.matvec_t(&d));
                // ∂W_c += e d γ_uᵀ
                g.w_consumer.add_outer(e, &d, core_u);
                // Producer pathway: ∂γ_p += e W_pᵀ c on each side.
                let wt_c = p.w_producer.matvec_t(&c);
                axpy(g.core_emb.row_mut(pi), e, &wt_c);
                axpy(g.core_emb.row_mut(pj), -e, &wt_c);
                // ∂W_p += e c (γ_pi − γ_pj)ᵀ
                g.w_producer.add_outer(e, &c, p.core_emb.row(pi));
                g.w_producer.add_outer(-e, &c, p.core_emb.row(pj));
                g.item_bias[t.pos] += e;
                g.item_bias[t.neg] -= e;
            }
        }
        _ => unreachable!("zeros_like preserves the model kind"),
    }

    if lambda != 0.0 {
        let rows = touched_rows(producer_of, batch);
        data += lambda * touched_sq_norm(params, &rows);
        add_reg_gradients(params, &mut grads, &rows, lambda);
    }

    let inv_b = 1.0 / batch.len() as f64;
    for (_, tensor) in grads.tensors_mut() {
        for v in tensor.iter_mut() {
            *v *= inv_b;
        }
    }
    (data * inv_b, grads)
}

/// Adds 2λθ for every touched, penalized parameter. The caller divides
/// the accumulated gradient by |B| afterwards.
fn add_reg_gradients(
    params: &ModelParams,
    grads: &mut ModelParams,
    rows: &TouchedRows,
    lambda: f64,
) {
    let two_lambda = 2.0 * lambda;
    let add_rows = |gm: &mut Mat, pm: &Mat, idx: &[usize]| {
        for &r in idx {
            axpy(gm.row_mut(r), two_lambda, pm.row(r));
        }
    };
    match (params, grads) {
        (ModelParams::PopRec(_), ModelParams::PopRec(_)) => {}
        (ModelParams::BprMf(p), ModelParams::BprMf(g)) => {
            add_rows(&mut g.user_emb, &p.user_emb, &rows.users);
            add_rows(&mut g.item_emb, &p.item_emb, &rows.items);
        }
        (ModelParams::Fm(p), ModelParams::Fm(g)) => {
            add_rows(&mut g.user_emb, &p.user_emb, &rows.users);
            add_rows(&mut g.item_emb, &p.item_emb, &rows.items);
            add_rows(&mut g.producer_emb, &p.producer_emb, &rows.producers);
        }
        (ModelParams::Vista(p), ModelParams::Vista(g)) => {
            add_rows(&mut g.user_emb1, &p.user_emb1, &rows.users);
            add_rows(&mut g.user_emb2, &p.user_emb2, &rows.users_and_producers);
            add_rows(&mut g.item_emb, &p.item_emb, &rows.items);
        }
        (ModelParams::CpRec(p), ModelParams::CpRec(g)) => {
            add_rows(&mut g.core_emb, &p.core_emb, &rows.users_and_producers);
            add_rows(&mut g.item_emb, &p.item_emb, &rows.items);
            axpy(g.w_consumer.as_mut_slice(), two_lambda, p.w_consumer.as_slice());
            axpy(g.w_producer.as_mut_slice(), two_lambda, p.w_producer.as_slice());
        }
        _ => unreachable!("shape checked by caller"),
    }
}
