//! Plain-text file formats for corpora and splits.
//!
//! Interaction files are UTF-8, one record per line,
//! `user_token<TAB>item_token`; producer files are
//! `item_token<TAB>user_token`. Columns past the second are ignored so logs
//! with timestamps or counts ingest unchanged. A split is three interaction
//! files plus a small JSON manifest recording the seed and filter settings.
//! All writers emit tokens in dense-id order, so a rewrite of the same data
//! is byte-identical.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{CorpusStats, Dataset, RawInteraction, Split};
use crate::error::Error;
use crate::{ItemId, Result};

pub const INTERACTIONS_FILE: &str = "interactions.tsv";
pub const PRODUCERS_FILE: &str = "producers.tsv";
pub const TRAIN_FILE: &str = "train.tsv";
pub const VAL_FILE: &str = "val.tsv";
pub const TEST_FILE: &str = "test.tsv";
pub const SPLIT_META_FILE: &str = "split_manifest.json";
pub const STATS_FILE: &str = "stats.txt";
pub const SCATTER_FILE: &str = "scatter.tsv";

/// Provenance of a persisted split: the split seed plus the filter settings
/// that produced the corpus it partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitMeta {
    pub seed: u64,
    pub min_actions: usize,
    pub fixpoint: bool,
}

fn parse_two_columns(path: &Path) -> Result<Vec<(String, String)>> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let display = path.display().to_string();
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let first = fields.next().unwrap_or("");
        let second = fields.next().unwrap_or("");
        if second.is_empty() || first.is_empty() {
            return Err(Error::MalformedRecord {
                path: display,
                line: idx + 1,
                reason: "expected two non-empty tab-separated fields".to_string(),
            });
        }
        out.push((first.to_string(), second.to_string()));
    }
    Ok(out)
}

/// Reads `user_token<TAB>item_token` records.
pub fn read_interactions(path: &Path) -> Result<Vec<RawInteraction>> {
    Ok(parse_two_columns(path)?
        .into_iter()
        .map(|(user_token, item_token)| RawInteraction {
            user_token,
            item_token,
        })
        .collect())
}

/// Reads `item_token<TAB>user_token` attribution records.
pub fn read_producers(path: &Path) -> Result<Vec<(String, String)>> {
    parse_two_columns(path)
}

/// Writes the dataset's interactions in user-id order, items ascending.
pub fn write_interactions(path: &Path, d: &Dataset) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for u in 0..d.n_users() {
        for &i in d.positives(u) {
            writeln!(w, "{}\t{}", d.user_token(u), d.item_token(i))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes the item→producer map in item-id order.
pub fn write_producers(path: &Path, d: &Dataset) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for i in 0..d.n_items() {
        writeln!(w, "{}\t{}", d.item_token(i), d.user_token(d.producer(i)))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `interactions.tsv` and `producers.tsv` into `dir`.
pub fn write_dataset(dir: &Path, d: &Dataset) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_interactions(&dir.join(INTERACTIONS_FILE), d)?;
    write_producers(&dir.join(PRODUCERS_FILE), d)?;
    Ok(())
}

/// Ingests a directory previously written by [`write_dataset`].
pub fn read_dataset(dir: &Path) -> Result<Dataset> {
    let interactions = read_interactions(&dir.join(INTERACTIONS_FILE))?;
    let producers = read_producers(&dir.join(PRODUCERS_FILE))?;
    Dataset::ingest(interactions, producers)
}

/// Writes `train.tsv`, `val.tsv`, `test.tsv`, and the split manifest.
pub fn write_split(dir: &Path, d: &Dataset, split: &Split, meta: &SplitMeta) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let write_rows = |name: &str, rows: &dyn Fn(&mut Vec<(usize, ItemId)>)| -> Result<()> {
        let mut pairs = Vec::new();
        rows(&mut pairs);
        let mut w = BufWriter::new(File::create(dir.join(name))?);
        for (u, i) in pairs {
            writeln!(w, "{}\t{}", d.user_token(u), d.item_token(i))?;
        }
        w.flush()?;
        Ok(())
    };
    write_rows(TRAIN_FILE, &|pairs| {
        for (u, items) in split.train.iter().enumerate() {
            for &i in items {
                pairs.push((u, i));
            }
        }
    })?;
    write_rows(VAL_FILE, &|pairs| {
        for (u, item) in split.val.iter().enumerate() {
            if let Some(i) = item {
                pairs.push((u, *i));
            }
        }
    })?;
    write_rows(TEST_FILE, &|pairs| {
        for (u, item) in split.test.iter().enumerate() {
            if let Some(i) = item {
                pairs.push((u, *i));
            }
        }
    })?;
    let mut meta_json = serde_json::to_string_pretty(meta)?;
    meta_json.push('\n');
    std::fs::write(dir.join(SPLIT_META_FILE), meta_json)?;
    Ok(())
}

/// Loads a persisted split back against `d`, resolving tokens to ids.
pub fn read_split(dir: &Path, d: &Dataset) -> Result<Split> {
    let meta: SplitMeta =
        serde_json::from_str(&std::fs::read_to_string(dir.join(SPLIT_META_FILE))?)?;
    let resolve = |name: &str| -> Result<Vec<(usize, ItemId)>> {
        let mut out = Vec::new();
        for (user_token, item_token) in parse_two_columns(&dir.join(name))? {
            let u = d.user_id(&user_token).ok_or(Error::UnknownToken {
                kind: "user",
                token: user_token,
            })?;
            let i = d.item_id(&item_token).ok_or(Error::UnknownToken {
                kind: "item",
                token: item_token,
            })?;
            out.push((u, i));
        }
        Ok(out)
    };

    let mut train = vec![Vec::new(); d.n_users()];
    for (u, i) in resolve(TRAIN_FILE)? {
        train[u].push(i);
    }
    for list in &mut train {
        list.sort_unstable();
    }

    let single = |name: &'static str| -> Result<Vec<Option<ItemId>>> {
        let mut col = vec![None; d.n_users()];
        for (u, i) in resolve(name)? {
            if col[u].is_some() {
                return Err(Error::MalformedRecord {
                    path: dir.join(name).display().to_string(),
                    line: 0,
                    reason: format!("user {} listed twice", d.user_token(u)),
                });
            }
            col[u] = Some(i);
        }
        Ok(col)
    };
    let val = single(VAL_FILE)?;
    let test = single(TEST_FILE)?;

    Ok(Split {
        train,
        val,
        test,
        seed: meta.seed,
    })
}

/// Writes the per-consumer `distinct_producers<TAB>items_consumed` scatter.
pub fn write_scatter(path: &Path, stats: &CorpusStats) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for &(_, distinct, consumed) in &stats.pairs {
        writeln!(w, "{distinct}\t{consumed}")?;
    }
    w.flush()?;
    Ok(())
}
