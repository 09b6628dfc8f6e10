//! Parameter stores and score predictors.
//!
//! Five models share one scoring contract so the trainer and evaluator
//! never branch on model identity:
//!
//! * `PopRec`: item popularity from the training split, user-independent.
//! * `BprMf`: biased matrix factorization, `β_i + ⟨γ_u, γ_i⟩`.
//! * `Fm`: factorization machine over the one-hot features (user, item,
//!   producer), which expands to three pairwise inner products plus biases.
//! * `Vista`: a reduced dual-embedding model where one shared table serves
//!   both sides of the user–producer term, making that term symmetric.
//! * `CpRec`: one core embedding per user plus two K×K role projections;
//!   the consumer view of a user meets both the item embedding and the
//!   producer view of the item's creator. The producer term
//!   `⟨W_c γ_u, W_p γ_p⟩` is asymmetric in (u, p) for generic parameters,
//!   unlike Vista's.
//!
//! Global intercepts and per-user biases are omitted where they cancel in
//! pairwise score differences and cannot affect per-user ranking; `Fm`
//! keeps its user bias because the FM feature expansion defines it, and it
//! stays rank-inert.

pub mod checkpoint;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::linalg::{dot, Mat};
use crate::{ItemId, UserId};

/// Model selector. The string forms (`poprec`, `bpr`, `fm`, `vista`,
/// `cprec`) appear in CLI flags, checkpoints, and sweep tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    PopRec,
    BprMf,
    Fm,
    Vista,
    CpRec,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::PopRec,
        ModelKind::BprMf,
        ModelKind::Fm,
        ModelKind::Vista,
        ModelKind::CpRec,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::PopRec => "poprec",
            ModelKind::BprMf => "bpr",
            ModelKind::Fm => "fm",
            ModelKind::Vista => "vista",
            ModelKind::CpRec => "cprec",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "poprec" => Ok(ModelKind::PopRec),
            "bpr" | "bpr-mf" | "bprmf" => Ok(ModelKind::BprMf),
            "fm" => Ok(ModelKind::Fm),
            "vista" => Ok(ModelKind::Vista),
            "cprec" => Ok(ModelKind::CpRec),
            other => Err(format!(
                "unknown model {other:?}; expected one of poprec, bpr, fm, vista, cprec"
            )),
        }
    }
}

/// Training-split interaction count per item.
#[derive(Debug, Clone, PartialEq)]
pub struct PopRecParams {
    pub popularity: Vec<f64>,
}

impl PopRecParams {
    /// Popularity of `i`, independent of the user.
    pub fn score(&self, i: ItemId) -> f64 {
        self.popularity[i]
    }
}

/// Biased matrix factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct BprMfParams {
    pub user_emb: Mat,
    pub item_emb: Mat,
    pub item_bias: Vec<f64>,
}

impl BprMfParams {
    /// `β_i + ⟨γ_u, γ_i⟩`
    pub fn score(&self, u: UserId, i: ItemId) -> f64 {
        self.item_bias[i] + dot(self.user_emb.row(u), self.item_emb.row(i))
    }
}

/// Factorization machine over one-hot (user, item, producer) features.
#[derive(Debug, Clone, PartialEq)]
pub struct FmParams {
    pub user_emb: Mat,
    pub item_emb: Mat,
    pub producer_emb: Mat,
    pub item_bias: Vec<f64>,
    pub producer_bias: Vec<f64>,
    pub user_bias: Vec<f64>,
}

impl FmParams {
    /// `β_u + β_i + β_p + ⟨γ⁽¹⁾_u, γ_i⟩ + ⟨γ⁽¹⁾_u, γ⁽²⁾_p⟩ + ⟨γ_i, γ⁽²⁾_p⟩`
    /// with `p` the producer of `i`. The user bias never changes a
    /// pairwise difference; it is kept because the feature expansion
    /// defines it.
    pub fn score(&self, producer_of: &[UserId], u: UserId, i: ItemId) -> f64 {
        let p = producer_of[i];
        let gu = self.user_emb.row(u);
        let gi = self.item_emb.row(i);
        let gp = self.producer_emb.row(p);
        self.user_bias[u]
            + self.item_bias[i]
            + self.producer_bias[p]
            + dot(gu, gi)
            + dot(gu, gp)
            + dot(gi, gp)
    }
}

/// Reduced dual-embedding model: `user_emb2` serves as both the user's
/// appreciation vector and the producer's style vector, so the
/// user–producer term is symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct VistaParams {
    pub user_emb1: Mat,
    pub user_emb2: Mat,
    pub item_emb: Mat,
    pub item_bias: Vec<f64>,
}

impl VistaParams {
    /// `β_i + ⟨γ⁽¹⁾_u, γ_i⟩ + ⟨γ⁽²⁾_u, γ⁽²⁾_p⟩`
    pub fn score(&self, producer_of: &[UserId], u: UserId, i: ItemId) -> f64 {
        let p = producer_of[i];
        self.item_bias[i]
            + dot(self.user_emb1.row(u), self.item_emb.row(i))
            + dot(self.user_emb2.row(u), self.user_emb2.row(p))
    }
}

/// Core embedding per user plus two K×K role projections.
#[derive(Debug, Clone, PartialEq)]
pub struct CpRecParams {
    pub core_emb: Mat,
    pub item_emb: Mat,
    pub item_bias: Vec<f64>,
    pub w_consumer: Mat,
    pub w_producer: Mat,
}

impl CpRecParams {
    /// The consumer and producer views of user `u`:
    /// `(W_c γ_u, W_p γ_u)`.
    pub fn role_embeddings(&self, u: UserId) -> (Vec<f64>, Vec<f64>) {
        let core = self.core_emb.row(u);
        (self.w_consumer.matvec(core), self.w_producer.matvec(core))
    }

    /// `β_i + ⟨W_c γ_u, γ_i⟩ + ⟨W_c γ_u, W_p γ_p⟩` with `p` the producer
    /// of `i`.
    pub fn score(&self, producer_of: &[UserId], u: UserId, i: ItemId) -> f64 {
        let c = self.w_consumer.matvec(self.core_emb.row(u));
        let q = self.w_producer.matvec(self.core_emb.row(producer_of[i]));
        self.item_bias[i] + dot(&c, self.item_emb.row(i)) + dot(&c, &q)
    }
}

/// Any model's parameters, tagged by kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    PopRec(PopRecParams),
    BprMf(BprMfParams),
    Fm(FmParams),
    Vista(VistaParams),
    CpRec(CpRecParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::PopRec(_) => ModelKind::PopRec,
            ModelParams::BprMf(_) => ModelKind::BprMf,
            ModelParams::Fm(_) => ModelKind::Fm,
            ModelParams::Vista(_) => ModelKind::Vista,
            ModelParams::CpRec(_) => ModelKind::CpRec,
        }
    }

    pub fn k(&self) -> usize {
        match self {
            ModelParams::PopRec(_) => 0,
            ModelParams::BprMf(p) => p.user_emb.cols(),
            ModelParams::Fm(p) => p.user_emb.cols(),
            ModelParams::Vista(p) => p.user_emb1.cols(),
            ModelParams::CpRec(p) => p.core_emb.cols(),
        }
    }

    /// User-table size; `None` for PopRec, which has no user parameters.
    pub fn n_users(&self) -> Option<usize> {
        match self {
            ModelParams::PopRec(_) => None,
            ModelParams::BprMf(p) => Some(p.user_emb.rows()),
            ModelParams::Fm(p) => Some(p.user_emb.rows()),
            ModelParams::Vista(p) => Some(p.user_emb1.rows()),
            ModelParams::CpRec(p) => Some(p.core_emb.rows()),
        }
    }

    pub fn n_items(&self) -> usize {
        match self {
            ModelParams::PopRec(p) => p.popularity.len(),
            ModelParams::BprMf(p) => p.item_emb.rows(),
            ModelParams::Fm(p) => p.item_emb.rows(),
            ModelParams::Vista(p) => p.item_emb.rows(),
            ModelParams::CpRec(p) => p.item_emb.rows(),
        }
    }

    /// Predicted score of item `i` for user `u`.
    pub fn score(&self, producer_of: &[UserId], u: UserId, i: ItemId) -> f64 {
        match self {
            ModelParams::PopRec(p) => p.score(i),
            ModelParams::BprMf(p) => p.score(u, i),
            ModelParams::Fm(p) => p.score(producer_of, u, i),
            ModelParams::Vista(p) => p.score(producer_of, u, i),
            ModelParams::CpRec(p) => p.score(producer_of, u, i),
        }
    }

    /// Tensors in declared field order, as named flat slices. The order is
    /// the checkpoint layout and the optimizer's iteration order.
    pub fn tensors(&self) -> Vec<(&'static str, &[f64])> {
        match self {
            ModelParams::PopRec(p) => vec![("popularity", p.popularity.as_slice())],
            ModelParams::BprMf(p) => vec![
                ("user_emb", p.user_emb.as_slice()),
                ("item_emb", p.item_emb.as_slice()),
                ("item_bias", p.item_bias.as_slice()),
            ],
            ModelParams::Fm(p) => vec![
                ("user_emb", p.user_emb.as_slice()),
                ("item_emb", p.item_emb.as_slice()),
                ("producer_emb", p.producer_emb.as_slice()),
                ("item_bias", p.item_bias.as_slice()),
                ("producer_bias", p.producer_bias.as_slice()),
                ("user_bias", p.user_bias.as_slice()),
            ],
            ModelParams::Vista(p) => vec![
                ("user_emb1", p.user_emb1.as_slice()),
                ("user_emb2", p.user_emb2.as_slice()),
                ("item_emb", p.item_emb.as_slice()),
                ("item_bias", p.item_bias.as_slice()),
            ],
            ModelParams::CpRec(p) => vec![
                ("core_emb", p.core_emb.as_slice()),
                ("item_emb", p.item_emb.as_slice()),
                ("item_bias", p.item_bias.as_slice()),
                ("w_consumer", p.w_consumer.as_slice()),
                ("w_producer", p.w_producer.as_slice()),
            ],
        }
    }

    /// Mutable view of the same tensors, in the same order.
    pub fn tensors_mut(&mut self) -> Vec<(&'static str, &mut [f64])> {
        match self {
            ModelParams::PopRec(p) => vec![("popularity", p.popularity.as_mut_slice())],
            ModelParams::BprMf(p) => vec![
                ("user_emb", p.user_emb.as_mut_slice()),
                ("item_emb", p.item_emb.as_mut_slice()),
                ("item_bias", p.item_bias.as_mut_slice()),
            ],
            ModelParams::Fm(p) => vec![
                ("user_emb", p.user_emb.as_mut_slice()),
                ("item_emb", p.item_emb.as_mut_slice()),
                ("producer_emb", p.producer_emb.as_mut_slice()),
                ("item_bias", p.item_bias.as_mut_slice()),
                ("producer_bias", p.producer_bias.as_mut_slice()),
                ("user_bias", p.user_bias.as_mut_slice()),
            ],
            ModelParams::Vista(p) => vec![
                ("user_emb1", p.user_emb1.as_mut_slice()),
                ("user_emb2", p.user_emb2.as_mut_slice()),
                ("item_emb", p.item_emb.as_mut_slice()),
                ("item_bias", p.item_bias.as_mut_slice()),
            ],
            ModelParams::CpRec(p) => vec![
                ("core_emb", p.core_emb.as_mut_slice()),
                ("item_emb", p.item_emb.as_mut_slice()),
                ("item_bias", p.item_bias.as_mut_slice()),
                ("w_consumer", p.w_consumer.as_mut_slice()),
                ("w_producer", p.w_producer.as_mut_slice()),
            ],
        }
    }

    /// Total scalar parameter count.
    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }

    /// Same shapes, all zeros. Gradient and moment buffers start here.
    pub fn zeros_like(&self) -> ModelParams {
        let mut z = self.clone();
        for (_, t) in z.tensors_mut() {
            t.fill(0.0);
        }
        z
    }
}

/// Initialization knobs. The default draws embeddings from
/// Normal(0, 0.1²) and sets the role projections to identity plus
/// Normal(0, 0.1²) noise; `w_noise_std = 0` gives exact identities for
/// debugging, and `w_identity = false` drops the identity offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitOptions {
    pub emb_std: f64,
    pub w_noise_std: f64,
    pub w_identity: bool,
}

impl Default for InitOptions {
    fn default() -> Self {
        InitOptions {
            emb_std: 0.1,
            w_noise_std: 0.1,
            w_identity: true,
        }
    }
}

/// Deterministic parameter initialization with the default options.
pub fn init_params(
    kind: ModelKind,
    n_users: usize,
    n_items: usize,
    k: usize,
    seed: u64,
) -> ModelParams {
    init_params_with(kind, n_users, n_items, k, seed, &InitOptions::default())
}

/// All-zero parameters of the requested shape. Useful as gradient and
/// moment buffers and as the target when loading a checkpoint.
pub fn zero_params(kind: ModelKind, n_users: usize, n_items: usize, k: usize) -> ModelParams {
    match kind {
        ModelKind::PopRec => ModelParams::PopRec(PopRecParams {
            popularity: vec![0.0; n_items],
        }),
        ModelKind::BprMf => ModelParams::BprMf(BprMfParams {
            user_emb: Mat::zeros(n_users, k),
            item_emb: Mat::zeros(n_items, k),
            item_bias: vec![0.0; n_items],
        }),
        ModelKind::Fm => ModelParams::Fm(FmParams {
            user_emb: Mat::zeros(n_users, k),
            item_emb: Mat::zeros(n_items, k),
            producer_emb: Mat::zeros(n_users, k),
            item_bias: vec![0.0; n_items],
            producer_bias: vec![0.0; n_users],
            user_bias: vec![0.0; n_users],
        }),
        ModelKind::Vista => ModelParams::Vista(VistaParams {
            user_emb1: Mat::zeros(n_users, k),
            user_emb2: Mat::zeros(n_users, k),
            item_emb: Mat::zeros(n_items, k),
            item_bias: vec![0.0; n_items],
        }),
        ModelKind::CpRec => ModelParams::CpRec(CpRecParams {
            core_emb: Mat::zeros(n_users, k),
            item_emb: Mat::zeros(n_items, k),
            item_bias: vec![0.0; n_items],
            w_consumer: Mat::zeros(k, k),
            w_producer: Mat::zeros(k, k),
        }),
    }
}

/// Deterministic parameter initialization: embeddings i.i.d. normal,
/// biases zero, projections per `opts`. The same arguments always produce
/// bit-identical parameters. Draws happen in declared tensor order.
pub fn init_params_with(
    kind: ModelKind,
    n_users: usize,
    n_items: usize,
    k: usize,
    seed: u64,
    opts: &InitOptions,
) -> ModelParams {
    assert!(k >= 1 || kind == ModelKind::PopRec, "K must be at least 1");
    let mut params = zero_params(kind, n_users, n_items, k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let emb = Normal::new(0.0, opts.emb_std).expect("valid std");
    let wn = Normal::new(0.0, opts.w_noise_std).expect("valid std");
    for (name, t) in params.tensors_mut() {
        match name {
            "user_emb" | "item_emb" | "producer_emb" | "user_emb1" | "user_emb2" | "core_emb" => {
                for v in t.iter_mut() {
                    *v = emb.sample(&mut rng);
                }
            }
            "w_consumer" | "w_producer" => {
                // k×k flat; index multiples of k+1 are the diagonal.
                for (idx, v) in t.iter_mut().enumerate() {
                    let diag = opts.w_identity && idx % (k + 1) == 0;
                    *v = if diag { 1.0 } else { 0.0 } + wn.sample(&mut rng);
                }
            }
            // Biases and popularity stay zero.
            _ => {}
        }
    }
    params
}

/// Scoring contract shared by the evaluator and any test double.
///
/// The one law: `score_items(u, L)[k] == score(u, L[k])`, bit for bit.
/// Implementations may hoist per-user or per-producer work, but only in
/// ways that reproduce the exact same floating-point operations.
pub trait Scorer {
    fn n_items(&self) -> usize;

    fn score(&self, u: UserId, i: ItemId) -> f64;

    fn score_items(&self, u: UserId, items: &[ItemId]) -> Vec<f64> {
        items.iter().map(|&i| self.score(u, i)).collect()
    }

    /// Scores for every item id in order.
    fn score_all(&self, u: UserId) -> Vec<f64> {
        let all: Vec<ItemId> = (0..self.n_items()).collect();
        self.score_items(u, &all)
    }
}

/// Parameters plus the producer map, ready to score.
#[derive(Debug, Clone, Copy)]
pub struct ModelScorer<'a> {
    pub params: &'a ModelParams,
    pub producer_of: &'a [UserId],
}

impl<'a> ModelScorer<'a> {
    pub fn new(params: &'a ModelParams, producer_of: &'a [UserId]) -> Self {
        ModelScorer {
            params,
            producer_of,
        }
    }
}

impl Scorer for ModelScorer<'_> {
    fn n_items(&self) -> usize {
        self.params.n_items()
    }

    fn score(&self, u: UserId, i: ItemId) -> f64 {
        self.params.score(self.producer_of, u, i)
    }

    /// Hoists per-user vectors and caches one value per distinct producer.
    /// Every cached value is computed by the same operation sequence as in
    /// `score`, so results stay bit-identical to the one-call path.
    fn score_items(&self, u: UserId, items: &[ItemId]) -> Vec<f64> {
        match self.params {
            ModelParams::PopRec(p) => items.iter().map(|&i| p.score(i)).collect(),
            ModelParams::BprMf(p) => items.iter().map(|&i| p.score(u, i)).collect(),
            ModelParams::Fm(p) => {
                let gu = p.user_emb.row(u);
                let bu = p.user_bias[u];
                let mut producer_dot: Vec<Option<f64>> = vec![None; p.producer_emb.rows()];
                items
                    .iter()
                    .map(|&i| {
                        let pr = self.producer_of[i];
                        let gp = p.producer_emb.row(pr);
                        let up = *producer_dot[pr].get_or_insert_with(|| dot(gu, gp));
                        let gi = p.item_emb.row(i);
                        bu + p.item_bias[i] + p.producer_bias[pr] + dot(gu, gi) + up + dot(gi, gp)
                    })
                    .collect()
            }
            ModelParams::Vista(p) => {
                let g1 = p.user_emb1.row(u);
                let g2 = p.user_emb2.row(u);
                let mut producer_dot: Vec<Option<f64>> = vec![None; p.user_emb2.rows()];
                items
                    .iter()
                    .map(|&i| {
                        let pr = self.producer_of[i];
                        let sym = *producer_dot[pr]
                            .get_or_insert_with(|| dot(g2, p.user_emb2.row(pr)));
                        p.item_bias[i] + dot(g1, p.item_emb.row(i)) + sym
                    })
                    .collect()
            }
            ModelParams::CpRec(p) => {
                let c = p.w_consumer.matvec(p.core_emb.row(u));
                let mut producer_term: Vec<Option<f64>> = vec![None; p.core_emb.rows()];
                items
                    .iter()
                    .map(|&i| {
                        let pr = self.producer_of[i];
                        let appreciation = *producer_term[pr].get_or_insert_with(|| {
                            let q = p.w_producer.matvec(p.core_emb.row(pr));
                            dot(&c, &q)
                        });
                        p.item_bias[i] + dot(&c, p.item_emb.row(i)) + appreciation
                    })
                    .collect()
            }
        }
    }
}
