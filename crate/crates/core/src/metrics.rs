//! Descriptive word-of-mouth statistics: score usage, volume–revenue lag
//! correlation, first-week density distribution and rankings, dataset
//! summaries and rater demographics.
//!
//! Everything here is a pure function of its inputs and gives the same
//! result for any ordering of the input rows.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{bucket_weeks, dedupe_ratings, Dataset, Gender, ItemRecord, PanelRow, RaterProfile, RatingEvent};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreHistogram {
    pub total: u64,
    pub counts: BTreeMap<u8, u64>,
    /// `None` when there are no events.
    pub fractions: Option<BTreeMap<u8, f64>>,
}

impl ScoreHistogram {
    pub fn fraction(&self, score: u8) -> Option<f64> {
        self.fractions.as_ref().and_then(|f| f.get(&score).copied())
    }
}

pub fn score_histogram(events: &[RatingEvent]) -> ScoreHistogram {
    let mut counts: BTreeMap<u8, u64> = (1..=5).map(|s| (s, 0)).collect();
    for e in events {
        *counts.entry(e.score).or_default() += 1;
    }
    let total: u64 = counts.values().sum();
    let fractions = (total > 0).then(|| {
        counts
            .iter()
            .map(|(&s, &c)| (s, c as f64 / total as f64))
            .collect()
    });
    ScoreHistogram {
        total,
        counts,
        fractions,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagCorrelationTable {
    pub lags: Vec<u32>,
    /// Pearson correlation per lag; `None` where either side has zero variance.
    pub correlations: Vec<Option<f64>>,
    /// Number of (volume, lagged revenue) pairs behind each correlation.
    pub pairs: Vec<usize>,
}

impl LagCorrelationTable {
    /// Lag with the largest defined correlation.
    pub fn argmax(&self) -> Option<u32> {
        self.lags
            .iter()
            .zip(&self.correlations)
            .filter_map(|(l, c)| c.map(|c| (*l, c)))
            .fold(None, |best: Option<(u32, f64)>, (l, c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((l, c)),
            })
            .map(|(l, _)| l)
    }
}

fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    let n = pairs.len();
    if n < 2 {
        return None;
    }
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn lagged_pairs(volume: &[f64], revenue: &[f64], lag: usize, out: &mut Vec<(f64, f64)>) {
    let len = volume.len().min(revenue.len());
    for t in lag..len {
        out.push((volume[t], revenue[t - lag]));
    }
}

/// Correlation of volume at week t with revenue at week t − lag, for
/// lag = 0..=max_lag, over the overlapping weeks of one series pair.
pub fn lag_correlation(volume: &[f64], revenue: &[f64], max_lag: u32) -> Result<LagCorrelationTable> {
    if volume.len() != revenue.len() {
        return Err(Error::Config(format!(
            "volume has {} weeks but revenue has {}",
            volume.len(),
            revenue.len()
        )));
    }
    if volume.len() < max_lag as usize + 3 {
        return Err(Error::InsufficientData {
            rows: volume.len(),
            cols: max_lag as usize + 3,
        });
    }
    Ok(correlations(volume, revenue, max_lag))
}

fn correlations(volume: &[f64], revenue: &[f64], max_lag: u32) -> LagCorrelationTable {
    let mut table = LagCorrelationTable {
        lags: (0..=max_lag).collect(),
        correlations: Vec::new(),
        pairs: Vec::new(),
    };
    let mut buf = Vec::new();
    for lag in 0..=max_lag as usize {
        buf.clear();
        lagged_pairs(volume, revenue, lag, &mut buf);
        table.pairs.push(buf.len());
        table.correlations.push(pearson(&buf));
    }
    table
}

/// Market-wide rating volume and revenue per calendar week.
///
/// Weeks are 7-day periods starting at the earliest release date. Week t of
/// an item lands in the period containing its first day, so an item's
/// ratings and revenue for that week always share a period. Ratings are
/// deduplicated and limited to weeks `1..=max_week`, like the panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketSeries {
    pub volume: Vec<f64>,
    pub revenue: Vec<f64>,
}

pub fn market_weekly_series(ds: &Dataset, max_week: u32) -> MarketSeries {
    let Some(origin) = ds.items.iter().map(|i| i.release_date).min() else {
        return MarketSeries {
            volume: Vec::new(),
            revenue: Vec::new(),
        };
    };
    let offset: BTreeMap<&str, i64> = ds
        .items
        .iter()
        .map(|i| (i.item_id.as_str(), (i.release_date - origin).num_days()))
        .collect();
    let period = |item: &str, week: u32| ((offset[item] + 7 * (i64::from(week) - 1)) / 7) as usize;

    let deduped = dedupe_ratings(&ds.ratings);
    let buckets = bucket_weeks(&deduped, &ds.items, max_week);
    let mut volume: BTreeMap<usize, f64> = BTreeMap::new();
    for ((item, week), events) in &buckets.buckets {
        *volume.entry(period(item, *week)).or_default() += events.len() as f64;
    }
    let mut revenue: BTreeMap<usize, f64> = BTreeMap::new();
    let mut sales: Vec<_> = ds.sales.iter().filter(|s| s.week_index <= max_week).collect();
    sales.sort_by(|a, b| (&a.item_id, a.week_index).cmp(&(&b.item_id, b.week_index)));
    for s in sales {
        *revenue.entry(period(&s.item_id, s.week_index)).or_default() += s.revenue;
    }
    let len = volume.keys().chain(revenue.keys()).max().map_or(0, |m| m + 1);
    MarketSeries {
        volume: (0..len).map(|i| volume.get(&i).copied().unwrap_or(0.0)).collect(),
        revenue: (0..len).map(|i| revenue.get(&i).copied().unwrap_or(0.0)).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcdfPoint {
    pub density_per_million: f64,
    pub cumulative_probability: f64,
}

fn first_week(panel: &[PanelRow]) -> impl Iterator<Item = &PanelRow> {
    panel.iter().filter(|r| r.week_index == 1)
}

/// Step points of the empirical CDF of first-week density, per million viewers.
pub fn first_week_density_ecdf(panel: &[PanelRow]) -> Result<Vec<EcdfPoint>> {
    let mut d: Vec<f64> = first_week(panel).map(PanelRow::density_per_million).collect();
    if d.is_empty() {
        return Err(Error::Empty("panel has no week-1 rows"));
    }
    d.sort_by(f64::total_cmp);
    let n = d.len() as f64;
    let mut out: Vec<EcdfPoint> = Vec::new();
    for (i, v) in d.iter().enumerate() {
        let p = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.density_per_million == *v => last.cumulative_probability = p,
            _ => out.push(EcdfPoint {
                density_per_million: *v,
                cumulative_probability: p,
            }),
        }
    }
    if let Some(last) = out.last_mut() {
        last.cumulative_probability = 1.0;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedItem {
    pub item_id: String,
    pub title: String,
    pub genres: Vec<String>,
    pub first_week_density_per_million: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRanking {
    /// Highest first-week density first.
    pub top: Vec<RankedItem>,
    /// Lowest first-week density first.
    pub bottom: Vec<RankedItem>,
    /// True when fewer than `k` items were available.
    pub truncated: bool,
}

/// Top-k and bottom-k items by first-week density. The full order is
/// density descending, then item id ascending; `bottom` is the tail of
/// that order reversed.
pub fn rank_by_density(panel: &[PanelRow], items: &[ItemRecord], k: usize) -> Result<DensityRanking> {
    if k == 0 {
        return Err(Error::Config("ranking size k must be at least 1".into()));
    }
    let meta: BTreeMap<&str, &ItemRecord> = items.iter().map(|i| (i.item_id.as_str(), i)).collect();
    let mut ranked: Vec<RankedItem> = first_week(panel)
        .map(|r| {
            let item = meta.get(r.item_id.as_str());
            RankedItem {
                item_id: r.item_id.clone(),
                title: item.map(|i| i.title.clone()).unwrap_or_default(),
                genres: item.map(|i| i.genres.clone()).unwrap_or_default(),
                first_week_density_per_million: r.density_per_million(),
            }
        })
        .collect();
    if ranked.is_empty() {
        return Err(Error::Empty("panel has no week-1 rows"));
    }
    ranked.sort_by(|a, b| {
        b.first_week_density_per_million
            .total_cmp(&a.first_week_density_per_million)
            .then_with(|| a.item_id.cmp(&b.item_id))
    });
    let truncated = k > ranked.len();
    let k = k.min(ranked.len());
    let top = ranked[..k].to_vec();
    let bottom = ranked[ranked.len() - k..].iter().rev().cloned().collect();
    Ok(DensityRanking {
        top,
        bottom,
        truncated,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation; `None` for a single value.
    pub sd: Option<f64>,
    pub min: f64,
    pub max: f64,
}

impl VariableSummary {
    /// `None` for an empty input.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let mean = if v[0] == v[n - 1] {
            v[0]
        } else {
            (v.iter().sum::<f64>() / n as f64).clamp(v[0], v[n - 1])
        };
        let sd = (n > 1).then(|| {
            let ss: f64 = v.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        });
        Some(VariableSummary {
            n,
            mean,
            sd,
            min: v[0],
            max: v[n - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub marketing_budget: Option<VariableSummary>,
    pub opening_screens: Option<VariableSummary>,
    pub weekly_revenue: Option<VariableSummary>,
    pub weekly_volume: Option<VariableSummary>,
    pub weekly_density_per_million: Option<VariableSummary>,
    pub weekly_avg_user_rating: Option<VariableSummary>,
    pub avg_critic_rating: Option<VariableSummary>,
    pub total_items: usize,
    pub total_user_ratings: usize,
    pub total_critic_ratings: usize,
    pub total_unique_users: usize,
}

/// Item-level variables come from the dataset, weekly variables from the panel.
pub fn summary_stats(ds: &Dataset, panel: &[PanelRow]) -> SummaryStats {
    let critics = ds.critic_scores();
    let unique_users: std::collections::HashSet<&str> =
        ds.ratings.iter().map(|r| r.user_id.as_str()).collect();
    SummaryStats {
        marketing_budget: VariableSummary::of(ds.items.iter().map(|i| i.marketing_budget)),
        opening_screens: VariableSummary::of(
            ds.sales.iter().filter(|s| s.week_index == 1).map(|s| f64::from(s.screens)),
        ),
        weekly_revenue: VariableSummary::of(panel.iter().map(|r| r.revenue)),
        weekly_volume: VariableSummary::of(panel.iter().map(|r| r.unique_raters as f64)),
        weekly_density_per_million: VariableSummary::of(panel.iter().map(PanelRow::density_per_million)),
        weekly_avg_user_rating: VariableSummary::of(panel.iter().map(|r| r.avg_rating)),
        avg_critic_rating: VariableSummary::of(
            critics.values().map(|s| s.iter().sum::<f64>() / s.len() as f64),
        ),
        total_items: ds.items.len(),
        total_user_ratings: ds.ratings.len(),
        total_critic_ratings: ds.critics.len(),
        total_unique_users: unique_users.len(),
    }
}

/// Inclusive age range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgeBracket {
    pub min: u32,
    pub max: u32,
}

impl AgeBracket {
    pub fn label(&self) -> String {
        format!("{}-{}", self.min, self.max)
    }
}

pub const DEFAULT_AGE_BRACKETS: [AgeBracket; 1] = [AgeBracket { min: 18, max: 29 }];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketShare {
    pub bracket: String,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemographicSummary {
    pub profiles: usize,
    pub gender_coverage: f64,
    pub age_coverage: f64,
    /// Shares among profiles that list a gender.
    pub male_share: Option<f64>,
    pub female_share: Option<f64>,
    /// Shares among profiles that list an age; the last entry is `other`.
    pub age_brackets: Option<Vec<BracketShare>>,
}

pub fn demographic_summary(profiles: &[RaterProfile], brackets: &[AgeBracket]) -> DemographicSummary {
    let n = profiles.len();
    let frac = |k: usize, of: usize| if of == 0 { 0.0 } else { k as f64 / of as f64 };
    let gendered: Vec<Gender> = profiles.iter().filter_map(|p| p.gender).collect();
    let ages: Vec<u32> = profiles.iter().filter_map(|p| p.age).collect();
    let males = gendered.iter().filter(|g| **g == Gender::Male).count();
    let share = |k: usize| (!gendered.is_empty()).then(|| frac(k, gendered.len()));

    let age_brackets = (!ages.is_empty()).then(|| {
        let mut in_any = 0;
        let mut out: Vec<BracketShare> = brackets
            .iter()
            .map(|b| {
                let k = ages.iter().filter(|a| (b.min..=b.max).contains(*a)).count();
                BracketShare {
                    bracket: b.label(),
                    share: frac(k, ages.len()),
                }
            })
            .collect();
        for a in &ages {
            if brackets.iter().any(|b| (b.min..=b.max).contains(a)) {
                in_any += 1;
            }
        }
        out.push(BracketShare {
            bracket: "other".into(),
            share: frac(ages.len() - in_any, ages.len()),
        });
        out
    });

    DemographicSummary {
        profiles: n,
        gender_coverage: frac(gendered.len(), n),
        age_coverage: frac(ages.len(), n),
        male_share: share(males),
        female_share: share(gendered.len() - males),
        age_brackets,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    fn ev(score: u8) -> RatingEvent {
        RatingEvent {
            user_id: "u".into(),
            item_id: "A".into(),
            timestamp: Utc.with_ymd_and_hms(2002, 5, 3, 0, 0, 0).unwrap(),
            score,
            text: None,
        }
    }

    pub(crate) fn week1(item: &str, density_per_million: f64) -> PanelRow {
        let d = density_per_million * 1e-6;
        PanelRow {
            item_id: item.into(),
            week_index: 1,
            revenue: 1e6,
            viewers: 2e5,
            unique_raters: 1,
            density: d,
            ld: (d / (1.0 - d)).ln(),
            avg_rating: 3.0,
            mkt: 1.0,
            scr: 1.0,
            crstd: 1.0,
            genre_weights: BTreeMap::new(),
            lweek: 0.0,
        }
    }

    #[test]
    fn histogram_fractions() {
        let h = score_histogram(&[ev(5), ev(5), ev(1), ev(3)]);
        assert_eq!(h.fraction(5), Some(0.5));
        assert_eq!(h.fraction(1), Some(0.25));
        assert_eq!(h.fraction(3), Some(0.25));
        assert_eq!(h.fraction(2), Some(0.0));
        assert_eq!(score_histogram(&[ev(4)]).fraction(4), Some(1.0));
        let empty = score_histogram(&[]);
        assert_eq!(empty.total, 0);
        assert!(empty.fractions.is_none());
        assert!(empty.counts.values().all(|c| *c == 0));
    }

    #[test]
    fn lag_correlation_self_and_shift() {
        let v = [5.0, 9.0, 3.0, 7.0, 1.0, 8.0, 2.0, 6.0];
        let t = lag_correlation(&v, &v, 0).unwrap();
        assert!((t.correlations[0].unwrap() - 1.0).abs() < 1e-12);

        // revenue[t] = volume[t + 1]: volume at t equals revenue at t - 1.
        let vol = [1.0, 4.0, 2.0, 8.0, 3.0, 9.0, 5.0, 6.0];
        let rev: Vec<f64> = (0..vol.len()).map(|t| vol.get(t + 1).copied().unwrap_or(0.0)).collect();
        let t = lag_correlation(&vol, &rev, 2).unwrap();
        assert_eq!(t.argmax(), Some(1));
        assert!((t.correlations[1].unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lag_correlation_undefined_and_too_short() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        let t = lag_correlation(&v, &[7.0; 5], 2).unwrap();
        assert!(t.correlations.iter().all(Option::is_none));
        assert!(lag_correlation(&v, &v, 3).is_err());
        assert!(lag_correlation(&v, &v[..4], 0).is_err());
    }

    #[test]
    fn ecdf_points() {
        let panel = vec![week1("A", 20.0), week1("B", 10.0), week1("C", 30.0)];
        let e = first_week_density_ecdf(&panel).unwrap();
        let probs: Vec<f64> = e.iter().map(|p| p.cumulative_probability).collect();
        assert!((probs[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((probs[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(probs[2], 1.0);
        assert!((e[0].density_per_million - 10.0).abs() < 1e-9);

        let single = first_week_density_ecdf(&[week1("A", 42.0)]).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].cumulative_probability, 1.0);

        let mut later = week1("A", 5.0);
        later.week_index = 2;
        assert!(first_week_density_ecdf(&[later]).is_err());
    }

    #[test]
    fn ecdf_spans_fixture_extremes() {
        // 104 items log-spaced between 14 and 701 per million.
        let panel: Vec<PanelRow> = (0..104)
            .map(|i| {
                let d = 14.0 * (701.0f64 / 14.0).powf(i as f64 / 103.0);
                week1(&format!("m{i:03}"), d)
            })
            .collect();
        let e = first_week_density_ecdf(&panel).unwrap();
        assert_eq!(e.len(), 104);
        assert!((e[0].density_per_million - 14.0).abs() < 1e-9);
        assert!((e[103].density_per_million - 701.0).abs() < 1e-9);
    }

    fn items(ids: &[&str]) -> Vec<ItemRecord> {
        ids.iter()
            .map(|id| ItemRecord {
                item_id: id.to_string(),
                title: format!("Title {id}"),
                release_date: chrono::NaiveDate::from_ymd_opt(2002, 1, 1).unwrap(),
                genres: vec!["DRAMA".into()],
                marketing_budget: 1.0,
            })
            .collect()
    }

    #[test]
    fn ranking_top_and_bottom() {
        let panel = vec![week1("A", 701.0), week1("B", 380.0), week1("C", 14.0)];
        let r = rank_by_density(&panel, &items(&["A", "B", "C"]), 1).unwrap();
        assert_eq!(r.top[0].item_id, "A");
        assert_eq!(r.bottom[0].item_id, "C");
        assert!(!r.truncated);

        let all = rank_by_density(&panel, &items(&["A", "B", "C"]), 3).unwrap();
        let rev: Vec<_> = all.bottom.iter().rev().collect();
        assert_eq!(all.top.iter().collect::<Vec<_>>(), rev);

        let over = rank_by_density(&panel, &items(&["A", "B", "C"]), 10).unwrap();
        assert!(over.truncated);
        assert_eq!(over.top.len(), 3);
        assert!(rank_by_density(&panel, &[], 0).is_err());
    }

    #[test]
    fn ranking_ties_by_item_id() {
        let panel = vec![week1("Z", 50.0), week1("B", 50.0), week1("M", 50.0)];
        let r = rank_by_density(&panel, &items(&["Z", "B", "M"]), 3).unwrap();
        let ids: Vec<&str> = r.top.iter().map(|i| i.item_id.as_str()).collect();
        assert_eq!(ids, ["B", "M", "Z"]);
    }

    #[test]
    fn variable_summary_hand_values() {
        let one = VariableSummary::of([3.0]).unwrap();
        assert_eq!((one.mean, one.min, one.max, one.sd), (3.0, 3.0, 3.0, None));
        let two = VariableSummary::of([2.0, 6.0]).unwrap();
        assert_eq!(two.mean, 4.0);
        // sqrt(((2-4)^2 + (6-4)^2) / 1) = sqrt(8)
        assert!((two.sd.unwrap() - 8f64.sqrt()).abs() < 1e-15);
        assert!(VariableSummary::of([]).is_none());
    }

    fn profile(gender: Option<Gender>, age: Option<u32>) -> RaterProfile {
        RaterProfile {
            user_id: "u".into(),
            gender,
            age,
        }
    }

    #[test]
    fn demographic_coverage_and_shares() {
        let mut profiles = Vec::new();
        for i in 0..100 {
            let gender = (i < 85).then(|| if i < 63 { Gender::Male } else { Gender::Female });
            let age = (i < 34).then_some(if i < 20 { 22 } else { 40 });
            profiles.push(profile(gender, age));
        }
        let d = demographic_summary(&profiles, &DEFAULT_AGE_BRACKETS);
        assert_eq!((d.gender_coverage, d.age_coverage), (0.85, 0.34));
        assert!((d.male_share.unwrap() - 63.0 / 85.0).abs() < 1e-15);
        let b = d.age_brackets.unwrap();
        assert!((b[0].share - 20.0 / 34.0).abs() < 1e-15);
        assert_eq!(b[1].bracket, "other");

        let gendered: Vec<_> = (0..100)
            .map(|i| profile(Some(if i < 74 { Gender::Male } else { Gender::Female }), None))
            .collect();
        assert_eq!(demographic_summary(&gendered, &DEFAULT_AGE_BRACKETS).male_share, Some(0.74));

        let blank = demographic_summary(&[profile(None, None)], &DEFAULT_AGE_BRACKETS);
        assert_eq!((blank.gender_coverage, blank.age_coverage), (0.0, 0.0));
        assert!(blank.male_share.is_none() && blank.age_brackets.is_none());
    }
}
