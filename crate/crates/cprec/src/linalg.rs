//! Small dense-matrix kernels used by the scorers and gradient code.
//!
//! Everything is `f64` and row-major. The kernels are deliberately plain
//! loops: the matrices involved are at most a few hundred elements per row,
//! and fixed evaluation order is what makes scores and gradients
//! bit-for-bit reproducible across runs.

use serde::{Deserialize, Serialize};

/// Row-major dense matrix. Rows are embeddings; `row(i)` is contiguous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity-like matrix; ones on the main diagonal, zero elsewhere.
    pub fn eye(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "shape does not match data length");
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// y = self * x. `x` has `cols` entries, the result has `rows`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for r in 0..self.rows {
            y[r] = dot(self.row(r), x);
        }
        y
    }

    /// y = selfᵀ * x. `x` has `rows` entries, the result has `cols`.
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for r in 0..self.rows {
            let xr = x[r];
            let row = self.row(r);
            for c in 0..self.cols {
                y[c] += xr * row[c];
            }
        }
        y
    }

    /// self += coef * a bᵀ (rank-one update).
    pub fn add_outer(&mut self, coef: f64, a: &[f64], b: &[f64]) {
        debug_assert_eq!(a.len(), self.rows);
        debug_assert_eq!(b.len(), self.cols);
        for r in 0..self.rows {
            let ca = coef * a[r];
            let row = self.row_mut(r);
            for c in 0..row.len() {
                row[c] += ca * b[c];
            }
        }
    }
}

/// Plain sequential dot product. Fixed order, no fused ops.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// y += coef * x.
pub fn axpy(y: &mut [f64], coef: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for i in 0..y.len() {
        y[i] += coef * x[i];
    }
}

/// Sum of squares of a slice.
pub fn sq_norm(a: &[f64]) -> f64 {
    let mut s = 0.0;
    for &v in a {
        s += v * v;
    }
    s
}

/// Compensated (Kahan) summation. Used wherever many per-user terms are
/// averaged, so the aggregate does not drift with user count.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum::default()
    }

    pub fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// ln(1 + e^z), computed without overflow for large |z|.
pub fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Logistic function.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// SplitMix64 step. Decorrelates derived seeds (per-user evaluation
/// streams, validation sampling) from one master seed.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_hand_computation() {
        assert_eq!(dot(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]), 32.0);
        assert_eq!(dot(&[], &[]), 0.0);
    }

    #[test]
    fn matvec_and_transpose_agree_with_hand_example() {
        // [[1,2],[3,4],[5,6]] * [1,10] = [21,43,65]
        let m = Mat::from_vec(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(m.matvec(&[1.0, 10.0]), vec![21.0, 43.0, 65.0]);
        // Mᵀ * [1,10,100] = [1+30+500, 2+40+600]
        assert_eq!(m.matvec_t(&[1.0, 10.0, 100.0]), vec![531.0, 642.0]);
    }

    #[test]
    fn matvec_t_equals_explicit_transpose() {
        let m = Mat::from_vec(2, 3, vec![1.0, -2.0, 0.5, 3.0, 4.0, -1.0]);
        let x = [0.3, -0.7];
        let got = m.matvec_t(&x);
        let mut want = vec![0.0; 3];
        for c in 0..3 {
            for r in 0..2 {
                want[c] += m.row(r)[c] * x[r];
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn add_outer_is_rank_one_update() {
        let mut m = Mat::zeros(2, 3);
        m.add_outer(2.0, &[1.0, -1.0], &[1.0, 2.0, 3.0]);
        assert_eq!(m.as_slice(), &[2.0, 4.0, 6.0, -2.0, -4.0, -6.0]);
    }

    #[test]
    fn eye_matvec_is_identity() {
        let m = Mat::eye(4);
        let x = [1.5, -2.0, 0.0, 7.0];
        assert_eq!(m.matvec(&x), x.to_vec());
        assert_eq!(m.matvec_t(&x), x.to_vec());
    }

    #[test]
    fn kahan_recovers_small_terms_lost_by_naive_sum() {
        // 1 + 1e-16 * 10_000 in naive f64 arithmetic stays exactly 1.0.
        let mut naive = 1.0f64;
        let mut kahan = KahanSum::new();
        kahan.add(1.0);
        for _ in 0..10_000 {
            naive += 1e-16;
            kahan.add(1e-16);
        }
        assert_eq!(naive, 1.0);
        let err = (kahan.value() - (1.0 + 1e-12)).abs();
        assert!(err < 1e-15, "kahan value {} too far off", kahan.value());
    }

    #[test]
    fn softplus_is_stable_at_extremes() {
        assert_eq!(softplus(1000.0), 1000.0);
        assert_eq!(softplus(-1000.0), 0.0);
        let z = 0.37f64;
        let direct = (1.0 + z.exp()).ln();
        assert!((softplus(z) - direct).abs() < 1e-15);
        assert!((softplus(0.0) - 2.0f64.ln()).abs() < 1e-16);
    }

    #[test]
    fn sigmoid_matches_softplus_derivative_identity() {
        // d/dz softplus(z) = sigmoid(z); check via central difference.
        for &z in &[-5.0, -0.3, 0.0, 0.9, 4.2] {
            let h = 1e-6;
            let fd = (softplus(z + h) - softplus(z - h)) / (2.0 * h);
            assert!((fd - sigmoid(z)).abs() < 1e-9);
        }
        assert!((sigmoid(0.0) - 0.5).abs() < 1e-16);
        assert!(sigmoid(40.0) <= 1.0 && sigmoid(40.0) > 0.999_999);
        assert!(sigmoid(-40.0) >= 0.0 && sigmoid(-40.0) < 1e-6);
    }

    #[test]
    fn splitmix_is_deterministic_and_spreads_neighbours() {
        assert_eq!(splitmix64(0), splitmix64(0));
        // Neighbouring inputs should not produce neighbouring outputs.
        let a = splitmix64(1);
        let b = splitmix64(2);
        assert!(a.abs_diff(b) > 1 << 32);
    }
}
