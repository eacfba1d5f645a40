use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Dataset, ItemRecord, RatingEvent};
use crate::error::{Error, Result};

/// Weeks 1..=5 after release.
pub const DEFAULT_MAX_WEEK: u32 = 5;

/// One item-week observation with every regressor of the density model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRow {
    pub item_id: String,
    pub week_index: u32,
    pub revenue: f64,
    /// Estimated purchasers, revenue / ticket price.
    pub viewers: f64,
    pub unique_raters: u64,
    /// Unique raters over estimated purchasers, strictly inside (0, 1).
    pub density: f64,
    /// Logit of `density`.
    pub ld: f64,
    /// Mean of the item-week's deduplicated scores.
    pub avg_rating: f64,
    pub mkt: f64,
    pub scr: f64,
    pub crstd: f64,
    /// 1/k for each of the item's k listed genres.
    pub genre_weights: BTreeMap<String, f64>,
    /// ln(week_index).
    pub lweek: f64,
}

impl PanelRow {
    pub fn density_per_million(&self) -> f64 {
        self.density * 1.0e6
    }
}

/// Counts of everything the panel builder dropped, by reason.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelDiagnostics {
    pub duplicates_removed: usize,
    pub pre_release: usize,
    pub beyond_max_week: usize,
    /// Item-weeks with a sales row but no ratings.
    pub zero_rating: usize,
    pub zero_revenue: usize,
    /// Item-weeks whose raters exceed estimated viewers.
    pub density_at_least_one: usize,
    /// Item-weeks dropped because the item has fewer than two critic reviews.
    pub insufficient_critics: usize,
    /// Item-weeks that have ratings but no sales row.
    pub ratings_without_sales: usize,
    pub warnings: Vec<String>,
}

impl PanelDiagnostics {
    /// Sum of the row-exclusion counters reported by `validate`.
    pub fn total_exclusions(&self) -> usize {
        self.pre_release
            + self.zero_rating
            + self.zero_revenue
            + self.density_at_least_one
            + self.insufficient_critics
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelBuild {
    pub rows: Vec<PanelRow>,
    pub diagnostics: PanelDiagnostics,
}

/// Keeps one rating per (user, item): the earliest. Output is sorted by
/// item, then user.
pub fn dedupe_ratings(events: &[RatingEvent]) -> Vec<RatingEvent> {
    let mut sorted: Vec<&RatingEvent> = events.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.item_id, &a.user_id, a.timestamp, a.score, &a.text)
            .cmp(&(&b.item_id, &b.user_id, b.timestamp, b.score, &b.text))
    });
    let mut out: Vec<RatingEvent> = Vec::with_capacity(sorted.len());
    for e in sorted {
        match out.last() {
            Some(prev) if prev.item_id == e.item_id && prev.user_id == e.user_id => {}
            _ => out.push(e.clone()),
        }
    }
    out
}

/// Ratings grouped by (item, period index since release).
#[derive(Debug, Clone, Default)]
pub struct WeekBuckets<'a> {
    pub buckets: BTreeMap<(String, u32), Vec<&'a RatingEvent>>,
    pub pre_release: usize,
    pub beyond_max: usize,
    pub unknown_item: usize,
}

/// Buckets events into periods of `period_days` calendar days since the
/// item's release date; period 1 covers days `0..period_days`. Events before
/// release or past `max_period` are counted and dropped.
pub fn bucket_periods<'a>(
    events: &'a [RatingEvent],
    items: &[ItemRecord],
    period_days: u32,
    max_period: Option<u32>,
) -> WeekBuckets<'a> {
    assert!(period_days > 0, "period length must be positive");
    let release: HashMap<&str, chrono::NaiveDate> = items
        .iter()
        .map(|it| (it.item_id.as_str(), it.release_date))
        .collect();
    let mut out = WeekBuckets::default();
    for e in events {
        let Some(&released) = release.get(e.item_id.as_str()) else {
            out.unknown_item += 1;
            continue;
        };
        let days = (e.timestamp.date_naive() - released).num_days();
        if days < 0 {
            out.pre_release += 1;
            continue;
        }
        let period = u32::try_from(days / i64::from(period_days)).unwrap_or(u32::MAX - 1) + 1;
        if max_period.is_some_and(|m| period > m) {
            out.beyond_max += 1;
            continue;
        }
        out.buckets
            .entry((e.item_id.clone(), period))
            .or_default()
            .push(e);
    }
    out
}

/// Weekly buckets: `week_index = floor(days_since_release / 7) + 1`.
pub fn bucket_weeks<'a>(
    events: &'a [RatingEvent],
    items: &[ItemRecord],
    max_week: u32,
) -> WeekBuckets<'a> {
    bucket_periods(events, items, 7, Some(max_week))
}

pub(crate) fn sample_sd(sorted_values: &[f64]) -> Option<f64> {
    let n = sorted_values.len();
    if n < 2 {
        return None;
    }
    let mean = sorted_values.iter().sum::<f64>() / n as f64;
    let ss: f64 = sorted_values.iter().map(|v| (v - mean).powi(2)).sum();
    Some((ss / (n - 1) as f64).sqrt())
}

/// `ln(p / (1 - p))`.
pub fn logit(p: f64) -> f64 {
    p.ln() - (-p).ln_1p()
}

/// Weight `1/k` for each of an item's k distinct genres.
pub fn genre_weights(genres: &[String]) -> BTreeMap<String, f64> {
    let mut unique: Vec<&String> = genres.iter().collect();
    unique.sort();
    unique.dedup();
    let w = 1.0 / unique.len() as f64;
    unique.into_iter().map(|g| (g.clone(), w)).collect()
}

/// Assembles the item-week panel for weeks `1..=max_week`.
///
/// Ratings are deduplicated and bucketed by week. A row is emitted for each
/// sales record that has positive revenue, at least one rating, a density
/// below one and an item with at least two critic reviews; every other
/// item-week is counted in the diagnostics under the first reason it fails.
pub fn build_panel(ds: &Dataset, max_week: u32) -> Result<PanelBuild> {
    if max_week == 0 {
        return Err(Error::Config("max_week must be at least 1".into()));
    }
    let deduped = dedupe_ratings(&ds.ratings);
    let mut diag = PanelDiagnostics {
        duplicates_removed: ds.ratings.len() - deduped.len(),
        ..Default::default()
    };
    let buckets = bucket_weeks(&deduped, &ds.items, max_week);
    diag.pre_release = buckets.pre_release;
    diag.beyond_max_week = buckets.beyond_max;

    let items = ds.item_index();
    let critics = ds.critic_scores();
    let crstd: HashMap<&str, Option<f64>> = critics
        .iter()
        .map(|(id, scores)| (*id, sample_sd(scores)))
        .collect();

    let mut sales: Vec<_> = ds
        .sales
        .iter()
        .filter(|s| s.week_index <= max_week)
        .collect();
    sales.sort_by(|a, b| (&a.item_id, a.week_index).cmp(&(&b.item_id, b.week_index)));

    let mut rows = Vec::with_capacity(sales.len());
    let mut covered = 0usize;
    for s in sales {
        let key = (s.item_id.clone(), s.week_index);
        let events = buckets.buckets.get(&key);
        if events.is_some() {
            covered += 1;
        }
        if s.revenue <= 0.0 {
            diag.zero_revenue += 1;
            continue;
        }
        let Some(events) = events.filter(|e| !e.is_empty()) else {
            diag.zero_rating += 1;
            continue;
        };
        let unique_raters = events.len() as u64;
        let density = unique_raters as f64 * ds.ticket_price / s.revenue;
        if density >= 1.0 {
            diag.density_at_least_one += 1;
            diag.warnings.push(format!(
                "item {} week {}: {} raters exceed estimated viewers {:.1}; check ticket_price",
                s.item_id,
                s.week_index,
                unique_raters,
                s.revenue / ds.ticket_price
            ));
            continue;
        }
        let Some(sd) = crstd.get(s.item_id.as_str()).copied().flatten() else {
            diag.insufficient_critics += 1;
            continue;
        };
        let item = items[s.item_id.as_str()];
        let score_sum: u64 = events.iter().map(|e| u64::from(e.score)).sum();
        rows.push(PanelRow {
            item_id: s.item_id.clone(),
            week_index: s.week_index,
            revenue: s.revenue,
            viewers: s.revenue / ds.ticket_price,
            unique_raters,
            density,
            ld: logit(density),
            avg_rating: score_sum as f64 / unique_raters as f64,
            mkt: item.marketing_budget,
            scr: f64::from(s.screens),
            crstd: sd,
            genre_weights: genre_weights(&item.genres),
            lweek: f64::from(s.week_index).ln(),
        });
    }
    diag.ratings_without_sales = buckets.buckets.len() - covered;
    Ok(PanelBuild {
        rows,
        diagnostics: diag,
    })
}
