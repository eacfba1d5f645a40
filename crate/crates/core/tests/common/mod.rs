#![allow(dead_code)]

pub mod oracles;
pub mod props;

use std::path::PathBuf;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub const FIXTURE_TICKET_PRICE: f64 = 5.81;

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wom_density::dataset::{CriticReview, Dataset, ItemRecord, RatingEvent, WeeklySales};

/// Four items, five sales weeks each, and raw ratings that include
/// re-ratings, pre-release ratings and ratings after week five.
pub fn four_by_five() -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let first = NaiveDate::from_ymd_opt(2002, 3, 1).unwrap();
    let genres = [&["DRAMA"][..], &["SCIFI", "ACTION"], &["KIDS", "COMEDY", "HORROR"], &["THRILLER"]];
    let mut items = Vec::new();
    let mut sales = Vec::new();
    let mut critics = Vec::new();
    let mut ratings = Vec::new();
    for (j, g) in genres.iter().enumerate() {
        let id = format!("m{j}");
        let release = first + Duration::days(7 * j as i64 + [0, 0, 3, 1][j]);
        items.push(ItemRecord {
            item_id: id.clone(),
            title: format!("Item {j}"),
            release_date: release,
            genres: g.iter().map(|s| s.to_string()).collect(),
            marketing_budget: 5.0 + 7.0 * j as f64,
        });
        for c in 0..3 + j {
            critics.push(CriticReview {
                item_id: id.clone(),
                critic_id: format!("c{c}"),
                score: rng.random_range(1.0..5.0),
            });
        }
        for w in 1..=5u32 {
            sales.push(WeeklySales {
                item_id: id.clone(),
                week_index: w,
                revenue: rng.random_range(2.0e5..3.0e6),
                screens: rng.random_range(50..3000),
            });
        }
        let t0 = Utc.from_utc_datetime(&release.and_hms_opt(0, 0, 0).unwrap());
        for _ in 0..250 {
            let user = format!("u{}", rng.random_range(0..120));
            let ts = t0 + Duration::seconds(rng.random_range(-3 * 86_400..40 * 86_400));
            ratings.push(RatingEvent {
                user_id: user,
                item_id: id.clone(),
                timestamp: ts,
                score: rng.random_range(1..=5),
                text: None,
            });
        }
    }
    Dataset {
        ratings,
        critics,
        items,
        sales,
        profiles: None,
        ticket_price: FIXTURE_TICKET_PRICE,
    }
}
