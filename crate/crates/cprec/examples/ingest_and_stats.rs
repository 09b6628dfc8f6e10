//! Ingest raw (user, item) events plus (item, producer) attributions,
//! filter low-activity users, and print the corpus summary and role
//! partition.
//!
//!     cargo run --example ingest_and_stats

use cprec::data::{Dataset, RawInteraction};

fn main() -> cprec::Result<()> {
    // A miniature community: smith posts recipes, jones posts photos,
    // lee only consumes, and a lurker drops out of the filter.
    let interactions = vec![
        RawInteraction::new("lee", "recipe-1"),
        RawInteraction::new("lee", "recipe-2"),
        RawInteraction::new("lee", "photo-1"),
        RawInteraction::new("smith", "photo-1"),
        RawInteraction::new("smith", "photo-2"),
        RawInteraction::new("smith", "recipe-2"),
        RawInteraction::new("jones", "recipe-1"),
        RawInteraction::new("jones", "recipe-2"),
        RawInteraction::new("jones", "photo-2"),
        RawInteraction::new("lurker", "photo-1"),
    ];
    let producers = vec![
        ("recipe-1".to_string(), "smith".to_string()),
        ("recipe-2".to_string(), "smith".to_string()),
        ("photo-1".to_string(), "jones".to_string()),
        ("photo-2".to_string(), "jones".to_string()),
    ];

    let raw = Dataset::ingest(interactions, producers)?;
    println!("{}", raw.corpus_stats().render_table("raw"));

    let filtered = raw.filter_inactive(2, false)?;
    println!("{}", filtered.corpus_stats().render_table("filtered"));

    let roles = filtered.role_partition();
    println!(
        "consumers: {:?}",
        roles
            .consumers
            .iter()
            .map(|&u| filtered.user_token(u))
            .collect::<Vec<_>>()
    );
    println!(
        "prosumers: {:?}",
        roles
            .prosumers
            .iter()
            .map(|&u| filtered.user_token(u))
            .collect::<Vec<_>>()
    );

    // Per-consumer (distinct producers, consumed items) pairs: the data
    // behind the producer-concentration scatter.
    for &(u, distinct, consumed) in &filtered.corpus_stats().pairs {
        println!(
            "{}: {} items from {} producers",
            filtered.user_token(u),
            consumed,
            distinct
        );
    }
    Ok(())
}
