//! Corpus ingestion, activity filtering, leave-one-out splitting, and
//! descriptive statistics.
//!
//! A [`Dataset`] stores implicit positive feedback (who consumed what) and
//! an attribution map (who made what) over one shared user id space, so a
//! user can appear as consumer, producer, or both. All ids are dense and
//! assigned in first-seen order, which keeps every downstream artifact
//! reproducible from the raw files alone.

pub mod io;

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::{ItemId, Result, UserId};

/// One positive feedback event in token form, straight from the log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawInteraction {
    pub user_token: String,
    pub item_token: String,
}

impl RawInteraction {
    pub fn new(user: impl Into<String>, item: impl Into<String>) -> Self {
        RawInteraction {
            user_token: user.into(),
            item_token: item.into(),
        }
    }
}

/// Id-mapped interaction store.
///
/// Invariants, maintained by every constructor:
/// * `positives[u]` is sorted ascending with no duplicates;
/// * every item id in any positives list is `< n_items()`;
/// * `producer_of` is total: every item has exactly one producer `< n_users()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    positives: Vec<Vec<ItemId>>,
    producer_of: Vec<UserId>,
    user_tokens: Vec<String>,
    item_tokens: Vec<String>,
    user_index: HashMap<String, UserId>,
    item_index: HashMap<String, ItemId>,
}

/// Users grouped by role. A prosumer both consumes and produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RolePartition {
    pub consumers: Vec<UserId>,
    pub producers: Vec<UserId>,
    pub prosumers: Vec<UserId>,
}

/// Per-user leave-one-out assignment. Indexes are parallel to the dataset's
/// user ids; users with fewer than three positives keep everything in train
/// and hold no validation or test item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<Vec<ItemId>>,
    pub val: Vec<Option<ItemId>>,
    pub test: Vec<Option<ItemId>>,
    pub seed: u64,
}

impl Split {
    /// Total number of training actions. One epoch samples this many triples.
    pub fn n_train_actions(&self) -> usize {
        self.train.iter().map(Vec::len).sum()
    }
}

/// Corpus summary: headline counts plus the per-consumer
/// (distinct producers consumed, items consumed) pairs behind the
/// producer-concentration scatter.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub n_users: usize,
    pub n_items: usize,
    pub n_actions: usize,
    pub n_consumers: usize,
    pub n_producers: usize,
    pub n_prosumers: usize,
    pub consumer_ratio: f64,
    pub producer_ratio: f64,
    pub prosumer_ratio: f64,
    /// One entry per consumer, in user-id order:
    /// (user, distinct producers consumed, items consumed).
    pub pairs: Vec<(UserId, usize, usize)>,
}

impl Dataset {
    /// Builds a dataset from an interaction stream and an item→producer
    /// attribution stream.
    ///
    /// Ids are assigned in first-seen order: interaction users first, then
    /// producers of known items that never interacted. Duplicate (user,
    /// item) events collapse to one positive. An attribution for an item
    /// that never appears in the interactions is ignored; repeated
    /// attributions for one item keep the first. Every interacted item must
    /// be attributed or ingestion fails with [`Error::MissingProducer`].
    pub fn ingest<I, P>(interactions: I, producers: P) -> Result<Dataset>
    where
        I: IntoIterator<Item = RawInteraction>,
        P: IntoIterator<Item = (String, String)>,
    {
        let mut user_tokens: Vec<String> = Vec::new();
        let mut item_tokens: Vec<String> = Vec::new();
        let mut user_index: HashMap<String, UserId> = HashMap::new();
        let mut item_index: HashMap<String, ItemId> = HashMap::new();
        let mut positives: Vec<Vec<ItemId>> = Vec::new();

        for rec in interactions {
            let u = match user_index.get(&rec.user_token) {
                Some(&u) => u,
                None => {
                    let u = user_tokens.len();
                    user_index.insert(rec.user_token.clone(), u);
                    user_tokens.push(rec.user_token);
                    positives.push(Vec::new());
                    u
                }
            };
            let i = match item_index.get(&rec.item_token) {
                Some(&i) => i,
                None => {
                    let i = item_tokens.len();
                    item_index.insert(rec.item_token.clone(), i);
                    item_tokens.push(rec.item_token);
                    i
                }
            };
            positives[u].push(i);
        }
        for list in &mut positives {
            list.sort_unstable();
            list.dedup();
        }

        let mut producer_of: Vec<Option<UserId>> = vec![None; item_tokens.len()];
        for (item_token, user_token) in producers {
            let Some(&i) = item_index.get(&item_token) else {
                continue;
            };
            if producer_of[i].is_some() {
                continue;
            }
            let p = match user_index.get(&user_token) {
                Some(&p) => p,
                None => {
                    let p = user_tokens.len();
                    user_index.insert(user_token.clone(), p);
                    user_tokens.push(user_token);
                    positives.push(Vec::new());
                    p
                }
            };
            producer_of[i] = Some(p);
        }

        let mut resolved = Vec::with_capacity(producer_of.len());
        for (i, p) in producer_of.into_iter().enumerate() {
            match p {
                Some(p) => resolved.push(p),
                None => {
                    return Err(Error::MissingProducer {
                        item: item_tokens[i].clone(),
                    })
                }
            }
        }

        Ok(Dataset {
            positives,
            producer_of: resolved,
            user_tokens,
            item_tokens,
            user_index,
            item_index,
        })
    }

    /// Assembles a dataset from already-dense parts. Used by the synthetic
    /// generator and tests; validates the invariants in debug builds.
    pub(crate) fn from_parts(
        user_tokens: Vec<String>,
        item_tokens: Vec<String>,
        positives: Vec<Vec<ItemId>>,
        producer_of: Vec<UserId>,
    ) -> Dataset {
        debug_assert_eq!(positives.len(), user_tokens.len());
        debug_assert_eq!(producer_of.len(), item_tokens.len());
        debug_assert!(producer_of.iter().all(|&p| p < user_tokens.len()));
        debug_assert!(positives.iter().all(|l| {
            l.windows(2).all(|w| w[0] < w[1]) && l.iter().all(|&i| i < item_tokens.len())
        }));
        let user_index = user_tokens
            .iter()
            .enumerate()
            .map(|(u, t)| (t.clone(), u))
            .collect();
        let item_index = item_tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Dataset {
            positives,
            producer_of,
            user_tokens,
            item_tokens,
            user_index,
            item_index,
        }
    }

    pub fn n_users(&self) -> usize {
        self.user_tokens.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_tokens.len()
    }

    /// Total positive events after duplicate collapse.
    pub fn n_actions(&self) -> usize {
        self.positives.iter().map(Vec::len).sum()
    }

    /// Items consumed by `u`, sorted ascending.
    pub fn positives(&self, u: UserId) -> &[ItemId] {
        &self.positives[u]
    }

    pub fn all_positives(&self) -> &[Vec<ItemId>] {
        &self.positives
    }

    pub fn producer_of(&self) -> &[UserId] {
        &self.producer_of
    }

    pub fn producer(&self, i: ItemId) -> UserId {
        self.producer_of[i]
    }

    pub fn user_token(&self, u: UserId) -> &str {
        &self.user_tokens[u]
    }

    pub fn item_token(&self, i: ItemId) -> &str {
        &self.item_tokens[i]
    }

    pub fn user_id(&self, token: &str) -> Option<UserId> {
        self.user_index.get(token).copied()
    }

    pub fn item_id(&self, token: &str) -> Option<ItemId> {
        self.item_index.get(token).copied()
    }

    /// Drops users with fewer than `min_actions` positives and items with
    /// fewer than `min_actions` interactions.
    ///
    /// One pass filters users first (on their raw counts), then items (on
    /// interactions from surviving users). With `iterate_to_fixpoint` the
    /// pass repeats until nothing changes, since removing items can drag
    /// users back under the threshold and vice versa.
    ///
    /// Producers of retained items are always retained as users, even with
    /// zero surviving consumption; consumers whose every item was removed
    /// are dropped unless they produce. Ids are re-densified in ascending
    /// old-id order.
    pub fn filter_inactive(
        &self,
        min_actions: usize,
        iterate_to_fixpoint: bool,
    ) -> Result<Dataset> {
        assert!(min_actions >= 1, "min_actions must be at least 1");
        let mut keep_user = vec![true; self.n_users()];
        let mut keep_item = vec![true; self.n_items()];

        loop {
            let mut changed = false;
            for u in 0..self.n_users() {
                let live = self.positives[u]
                    .iter()
                    .filter(|&&i| keep_item[i])
                    .count();
                let keep = live >= min_actions;
                if keep != keep_user[u] {
                    changed = true;
                }
                keep_user[u] = keep;
            }
            let mut item_count = vec![0usize; self.n_items()];
            for u in 0..self.n_users() {
                if !keep_user[u] {
                    continue;
                }
                for &i in &self.positives[u] {
                    if keep_item[i] {
                        item_count[i] += 1;
                    }
                }
            }
            for i in 0..self.n_items() {
                let keep = keep_item[i] && item_count[i] >= min_actions;
                if keep != keep_item[i] {
                    changed = true;
                }
                keep_item[i] = keep;
            }
            if !iterate_to_fixpoint || !changed {
                break;
            }
        }

        if !keep_item.iter().any(|&k| k) {
            return Err(Error::EmptyAfterFilter {
                what: "items",
                min_actions,
            });
        }

        // Final retention: a user survives with their remaining consumption,
        // or as the producer of a surviving item.
        let mut produces_kept = vec![false; self.n_users()];
        for i in 0..self.n_items() {
            if keep_item[i] {
                produces_kept[self.producer_of[i]] = true;
            }
        }
        let surviving_pos: Vec<Vec<ItemId>> = (0..self.n_users())
            .map(|u| {
                if keep_user[u] {
                    self.positives[u]
                        .iter()
                        .copied()
                        .filter(|&i| keep_item[i])
                        .collect()
                } else {
                    Vec::new()
                }
            })
            .collect();

        let mut user_map = vec![usize::MAX; self.n_users()];
        let mut user_tokens = Vec::new();
        for u in 0..self.n_users() {
            if !surviving_pos[u].is_empty() || produces_kept[u] {
                user_map[u] = user_tokens.len();
                user_tokens.push(self.user_tokens[u].clone());
            }
        }
        if user_tokens.is_empty() {
            return Err(Error::EmptyAfterFilter {
                what: "users",
                min_actions,
            });
        }

        let mut item_map = vec![usize::MAX; self.n_items()];
        let mut item_tokens = Vec::new();
        let mut producer_of = Vec::new();
        for i in 0..self.n_items() {
            if keep_item[i] {
                item_map[i] = item_tokens.len();
                item_tokens.push(self.item_tokens[i].clone());
                producer_of.push(user_map[self.producer_of[i]]);
            }
        }

        let mut positives = vec![Vec::new(); user_tokens.len()];
        for u in 0..self.n_users() {
            if user_map[u] == usize::MAX {
                continue;
            }
            positives[user_map[u]] = surviving_pos[u].iter().map(|&i| item_map[i]).collect();
        }

        Ok(Dataset::from_parts(
            user_tokens,
            item_tokens,
            positives,
            producer_of,
        ))
    }

    /// Splits each user's positives into train/validation/test by
    /// withholding one uniformly random item for validation and one for
    /// test. Users with fewer than three positives stay train-only.
    /// Deterministic: the same seed always yields the same split.
    pub fn split_leave_one_out(&self, seed: u64) -> Split {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut train = Vec::with_capacity(self.n_users());
        let mut val = Vec::with_capacity(self.n_users());
        let mut test = Vec::with_capacity(self.n_users());
        for u in 0..self.n_users() {
            let pos = &self.positives[u];
            let n = pos.len();
            if n < 3 {
                train.push(pos.clone());
                val.push(None);
                test.push(None);
                continue;
            }
            let val_idx = rng.random_range(0..n);
            let mut test_idx = rng.random_range(0..n - 1);
            if test_idx >= val_idx {
                test_idx += 1;
            }
            let mut tr = Vec::with_capacity(n - 2);
            for (idx, &item) in pos.iter().enumerate() {
                if idx != val_idx && idx != test_idx {
                    tr.push(item);
                }
            }
            train.push(tr);
            val.push(Some(pos[val_idx]));
            test.push(Some(pos[test_idx]));
        }
        Split {
            train,
            val,
            test,
            seed,
        }
    }

    /// Groups users into consumers (≥1 positive), producers (own ≥1 item),
    /// and their intersection.
    pub fn role_partition(&self) -> RolePartition {
        let mut owns = vec![false; self.n_users()];
        for &p in &self.producer_of {
            owns[p] = true;
        }
        let mut consumers = Vec::new();
        let mut producers = Vec::new();
        let mut prosumers = Vec::new();
        for u in 0..self.n_users() {
            let consumes = !self.positives[u].is_empty();
            if consumes {
                consumers.push(u);
            }
            if owns[u] {
                producers.push(u);
            }
            if consumes && owns[u] {
                prosumers.push(u);
            }
        }
        RolePartition {
            consumers,
            producers,
            prosumers,
        }
    }

    /// Headline counts, role ratios, and the per-consumer
    /// (distinct producers, items consumed) pairs.
    pub fn corpus_stats(&self) -> CorpusStats {
        let part = self.role_partition();
        let n_users = self.n_users();
        let ratio = |n: usize| {
            if n_users == 0 {
                0.0
            } else {
                n as f64 / n_users as f64
            }
        };
        let mut pairs = Vec::with_capacity(part.consumers.len());
        let mut seen: Vec<UserId> = Vec::new();
        for &u in &part.consumers {
            seen.clear();
            seen.extend(self.positives[u].iter().map(|&i| self.producer_of[i]));
            seen.sort_unstable();
            seen.dedup();
            pairs.push((u, seen.len(), self.positives[u].len()));
        }
        CorpusStats {
            n_users,
            n_items: self.n_items(),
            n_actions: self.n_actions(),
            n_consumers: part.consumers.len(),
            n_producers: part.producers.len(),
            n_prosumers: part.prosumers.len(),
            consumer_ratio: ratio(part.consumers.len()),
            producer_ratio: ratio(part.producers.len()),
            prosumer_ratio: ratio(part.prosumers.len()),
            pairs,
        }
    }
}

impl CorpusStats {
    /// Renders the summary as an aligned text table, one corpus per call.
    pub fn render_table(&self, name: &str) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "{:<12} {:>9} {:>9} {:>10} {:>10} {:>10} {:>10}\n",
            "corpus", "users", "items", "actions", "consumers", "producers", "prosumers"
        ));
        s.push_str(&format!(
            "{:<12} {:>9} {:>9} {:>10} {:>9.2}% {:>9.2}% {:>9.2}%\n",
            name,
            self.n_users,
            self.n_items,
            self.n_actions,
            100.0 * self.consumer_ratio,
            100.0 * self.producer_ratio,
            100.0 * self.prosumer_ratio,
        ));
        s
    }
}
