//! Uniform (user, positive, negative) triple sampling.
//!
//! A triple pairs one of a user's training positives against an item the
//! user never consumed anywhere, including validation and test; rejecting
//! against the full positive set keeps held-out items out of the negative
//! pool. Sampling is uniform at each stage: user over users with training
//! positives, positive over that user's training items, negative over the
//! catalogue with rejection.

use rand::Rng;

use crate::data::Split;
use crate::error::Error;
use crate::{ItemId, Result, UserId};

/// One ranking comparison: `pos` should outrank `neg` for `user`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triple {
    pub user: UserId,
    pub pos: ItemId,
    pub neg: ItemId,
}

/// Rejection budget per negative draw. A user must consume nearly the whole
/// catalogue for an honest draw to fail this often.
pub const MAX_REJECTIONS: usize = 100;

/// Sampling state bound to one split. Immutable once built; all randomness
/// comes from the caller's generator.
#[derive(Debug)]
pub struct TripleSampler<'a> {
    train: &'a [Vec<ItemId>],
    positives: &'a [Vec<ItemId>],
    n_items: usize,
    eligible: Vec<UserId>,
}

impl<'a> TripleSampler<'a> {
    /// `positives` is the dataset's full per-user sets (train ∪ val ∪ test),
    /// sorted ascending as the dataset maintains them.
    pub fn new(split: &'a Split, positives: &'a [Vec<ItemId>], n_items: usize) -> Self {
        let eligible = (0..split.train.len())
            .filter(|&u| !split.train[u].is_empty())
            .collect();
        TripleSampler {
            train: &split.train,
            positives,
            n_items,
            eligible,
        }
    }

    /// Users that can appear in triples.
    pub fn eligible_users(&self) -> &[UserId] {
        &self.eligible
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Result<Triple> {
        debug_assert!(!self.eligible.is_empty(), "no user has training positives");
        let user = self.eligible[rng.random_range(0..self.eligible.len())];
        let train = &self.train[user];
        let pos = train[rng.random_range(0..train.len())];
        let owned = &self.positives[user];
        for _ in 0..MAX_REJECTIONS {
            let neg = rng.random_range(0..self.n_items);
            if owned.binary_search(&neg).is_err() {
                return Ok(Triple { user, pos, neg });
            }
        }
        Err(Error::SamplerStarved {
            user,
            attempts: MAX_REJECTIONS,
        })
    }

    pub fn sample_batch(&self, n: usize, rng: &mut impl Rng) -> Result<Vec<Triple>> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(self.sample(rng)?);
        }
        Ok(out)
    }
}
