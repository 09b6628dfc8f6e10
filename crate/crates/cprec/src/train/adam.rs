//! Adam with bias correction.
//!
//! Moments are kept dense, one slot per parameter, and every slot updates
//! on every step whether or not its gradient is zero. This matches how the
//! common framework implementations apply sparse gradients to a dense
//! optimizer state, and keeps the update independent of which rows a batch
//! happened to touch.

use crate::model::ModelParams;

/// First/second moment accumulators plus the step counter, shaped like the
/// parameters they optimize.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: ModelParams,
    v: ModelParams,
    t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    /// Fresh state (zero moments, step zero) with the standard defaults
    /// β₁ = 0.9, β₂ = 0.999, ε = 1e-8.
    pub fn new(params: &ModelParams) -> Self {
        AdamState {
            m: params.zeros_like(),
            v: params.zeros_like(),
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    /// Steps taken so far.
    pub fn t(&self) -> u64 {
        self.t
    }
}

/// One Adam update:
/// m ← β₁m + (1−β₁)g, v ← β₂v + (1−β₂)g²,
/// θ ← θ − lr·m̂/(√v̂ + ε) with m̂ = m/(1−β₁ᵗ), v̂ = v/(1−β₂ᵗ).
/// The step counter increments once per call.
pub fn adam_step(
    params: &mut ModelParams,
    grads: &ModelParams,
    state: &mut AdamState,
    learning_rate: f64,
) {
    state.t += 1;
    let b1 = state.beta1;
    let b2 = state.beta2;
    let c1 = 1.0 - b1.powi(state.t as i32);
    let c2 = 1.0 - b2.powi(state.t as i32);

    let mut pt = params.tensors_mut();
    let gt = grads.tensors();
    let mut mt = state.m.tensors_mut();
    let mut vt = state.v.tensors_mut();
    assert_eq!(pt.len(), gt.len(), "parameter/gradient shape mismatch");
    for idx in 0..pt.len() {
        let p = &mut pt[idx].1;
        let g = gt[idx].1;
        let m = &mut mt[idx].1;
        let v = &mut vt[idx].1;
        assert_eq!(p.len(), g.len(), "tensor {idx} length mismatch");
        for e in 0..p.len() {
            let gi = g[e];
            m[e] = b1 * m[e] + (1.0 - b1) * gi;
            v[e] = b2 * v[e] + (1.0 - b2) * gi * gi;
            let m_hat = m[e] / c1;
            let v_hat = v[e] / c2;
            p[e] -= learning_rate * m_hat / (v_hat.sqrt() + state.epsilon);
        }
    }
}
