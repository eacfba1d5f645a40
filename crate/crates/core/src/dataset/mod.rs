//! Ratings, items, sales and critic data, and the item-week panel built from them.
//!
//! Ingestion ([`io`]) produces a validated [`Dataset`]. The panel builder
//! ([`panel`]) deduplicates ratings, buckets them into weeks since release
//! and computes one [`PanelRow`] per item-week.

mod io;
mod panel;

use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{parse_dataset, write_dataset, DatasetPaths};
pub use panel::{
    bucket_periods, bucket_weeks, build_panel, dedupe_ratings, genre_weights, logit, PanelBuild, PanelDiagnostics,
    PanelRow, WeekBuckets, DEFAULT_MAX_WEEK,
};
pub(crate) use panel::sample_sd;

/// One user's score for one item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingEvent {
    pub user_id: String,
    pub item_id: String,
    pub timestamp: DateTime<Utc>,
    pub score: u8,
    pub text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticReview {
    pub item_id: String,
    pub critic_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemRecord {
    pub item_id: String,
    pub title: String,
    pub release_date: NaiveDate,
    /// Normalized genre labels, see [`normalize_genre`].
    pub genres: Vec<String>,
    /// Cumulative marketing budget in millions.
    pub marketing_budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeeklySales {
    pub item_id: String,
    /// Weeks since release, starting at 1.
    pub week_index: u32,
    pub revenue: f64,
    pub screens: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaterProfile {
    pub user_id: String,
    pub gender: Option<Gender>,
    pub age: Option<u32>,
}

/// A validated collection of everything the pipeline consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub ratings: Vec<RatingEvent>,
    pub critics: Vec<CriticReview>,
    pub items: Vec<ItemRecord>,
    pub sales: Vec<WeeklySales>,
    pub profiles: Option<Vec<RaterProfile>>,
    /// Average ticket price, in the same currency unit as revenue.
    pub ticket_price: f64,
}

/// Uppercases a genre label and strips everything that is not alphanumeric,
/// so `Sci-Fi` and `SCIFI` are the same genre. `CHILDREN` maps to `KIDS`.
pub fn normalize_genre(label: &str) -> String {
    let cleaned: String = label
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_uppercase)
        .collect();
    match cleaned.as_str() {
        "CHILDREN" | "CHILDRENS" | "FAMILY" => "KIDS".to_string(),
        "SCIENCEFICTION" => "SCIFI".to_string(),
        _ => cleaned,
    }
}

impl Dataset {
    /// Builds a dataset and checks every cross-record invariant.
    pub fn new(
        ratings: Vec<RatingEvent>,
        critics: Vec<CriticReview>,
        items: Vec<ItemRecord>,
        sales: Vec<WeeklySales>,
        profiles: Option<Vec<RaterProfile>>,
        ticket_price: f64,
    ) -> Result<Self> {
        let ds = Dataset {
            ratings,
            critics,
            items,
            sales,
            profiles,
            ticket_price,
        };
        ds.validate()?;
        Ok(ds)
    }

    /// Checks the dataset invariants. Line numbers in errors assume the
    /// records were read from files with a header row, in order.
    pub fn validate(&self) -> Result<()> {
        if !(self.ticket_price.is_finite() && self.ticket_price > 0.0) {
            return Err(Error::Config(format!(
                "ticket_price must be positive, got {}",
                self.ticket_price
            )));
        }
        let line = |i: usize| i as u64 + 2;

        let mut item_ids = HashSet::with_capacity(self.items.len());
        for (i, item) in self.items.iter().enumerate() {
            validate_item(item, "items", line(i))?;
            if !item_ids.insert(item.item_id.as_str()) {
                return Err(Error::parse(
                    "items",
                    line(i),
                    "item_id",
                    format!("duplicate item_id `{}`", item.item_id),
                ));
            }
        }
        let known = |file: &str, i: usize, id: &str| -> Result<()> {
            if item_ids.contains(id) {
                Ok(())
            } else {
                Err(Error::UnknownItem {
                    file: file.to_string(),
                    line: line(i),
                    item_id: id.to_string(),
                })
            }
        };

        for (i, r) in self.ratings.iter().enumerate() {
            validate_score(r.score, "ratings", line(i))?;
            known("ratings", i, &r.item_id)?;
        }
        for (i, c) in self.critics.iter().enumerate() {
            validate_critic_score(c.score, "critics", line(i))?;
            known("critics", i, &c.item_id)?;
        }
        let mut weeks = HashSet::with_capacity(self.sales.len());
        for (i, s) in self.sales.iter().enumerate() {
            validate_sales(s, "sales", line(i))?;
            known("sales", i, &s.item_id)?;
            if !weeks.insert((s.item_id.as_str(), s.week_index)) {
                return Err(Error::DuplicateSales {
                    file: "sales".to_string(),
                    line: line(i),
                    item_id: s.item_id.clone(),
                    week: s.week_index,
                });
            }
        }
        if let Some(profiles) = &self.profiles {
            for (i, p) in profiles.iter().enumerate() {
                validate_age(p.age, "profiles", line(i))?;
            }
        }
        Ok(())
    }

    pub fn item_index(&self) -> HashMap<&str, &ItemRecord> {
        self.items.iter().map(|it| (it.item_id.as_str(), it)).collect()
    }

    /// Critic scores per item, each list sorted ascending.
    pub fn critic_scores(&self) -> BTreeMap<&str, Vec<f64>> {
        let mut out: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for c in &self.critics {
            out.entry(c.item_id.as_str()).or_default().push(c.score);
        }
        for v in out.values_mut() {
            v.sort_by(f64::total_cmp);
        }
        out
    }
}

pub(crate) fn validate_score(score: u8, file: &str, line: u64) -> Result<()> {
    if (1..=5).contains(&score) {
        Ok(())
    } else {
        Err(Error::parse(
            file,
            line,
            "score",
            format!("score {score} outside [1,5]"),
        ))
    }
}

pub(crate) fn validate_critic_score(score: f64, file: &str, line: u64) -> Result<()> {
    if score.is_finite() && (1.0..=5.0).contains(&score) {
        Ok(())
    } else {
        Err(Error::parse(
            file,
            line,
            "score",
            format!("critic score {score} outside [1,5]"),
        ))
    }
}

pub(crate) fn validate_item(item: &ItemRecord, file: &str, line: u64) -> Result<()> {
    if item.genres.is_empty() {
        return Err(Error::parse(file, line, "genres", "at least one genre required"));
    }
    if !(item.marketing_budget.is_finite() && item.marketing_budget >= 0.0) {
        return Err(Error::parse(
            file,
            line,
            "marketing_budget_millions",
            format!("must be a finite non-negative number, got {}", item.marketing_budget),
        ));
    }
    Ok(())
}

pub(crate) fn validate_sales(s: &WeeklySales, file: &str, line: u64) -> Result<()> {
    if s.week_index < 1 {
        return Err(Error::parse(file, line, "week_index", "week_index must be >= 1"));
    }
    if !(s.revenue.is_finite() && s.revenue >= 0.0) {
        return Err(Error::parse(
            file,
            line,
            "revenue",
            format!("must be a finite non-negative number, got {}", s.revenue),
        ));
    }
    Ok(())
}

pub(crate) fn validate_age(age: Option<u32>, file: &str, line: u64) -> Result<()> {
    match age {
        Some(a) if !(1..=120).contains(&a) => Err(Error::parse(
            file,
            line,
            "age",
            format!("age {a} outside [1,120]"),
        )),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(id: &str) -> ItemRecord {
        ItemRecord {
            item_id: id.into(),
            title: id.into(),
            release_date: NaiveDate::from_ymd_opt(2002, 5, 3).unwrap(),
            genres: vec!["DRAMA".into()],
            marketing_budget: 10.0,
        }
    }

    fn sales(id: &str, week: u32) -> WeeklySales {
        WeeklySales {
            item_id: id.into(),
            week_index: week,
            revenue: 1.0e6,
            screens: 100,
        }
    }

    #[test]
    fn genre_normalization() {
        assert_eq!(normalize_genre("Sci-Fi"), "SCIFI");
        assert_eq!(normalize_genre(" comedy "), "COMEDY");
        assert_eq!(normalize_genre("Children"), "KIDS");
    }

    #[test]
    fn rejects_non_positive_ticket_price() {
        let err = Dataset::new(vec![], vec![], vec![item("A")], vec![], None, 0.0).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn rejects_unknown_item_in_sales() {
        let err = Dataset::new(vec![], vec![], vec![item("A")], vec![sales("B", 1)], None, 5.0)
            .unwrap_err();
        assert!(matches!(err, Error::UnknownItem { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_duplicate_sales_week() {
        let err = Dataset::new(
            vec![],
            vec![],
            vec![item("A")],
            vec![sales("A", 1), sales("A", 1)],
            None,
            5.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateSales { line: 3, week: 1, .. }), "{err}");
    }

    #[test]
    fn rejects_out_of_range_age() {
        let profiles = vec![RaterProfile {
            user_id: "u".into(),
            gender: None,
            age: Some(130),
        }];
        let err = Dataset::new(vec![], vec![], vec![item("A")], vec![], Some(profiles), 5.0)
            .unwrap_err();
        assert!(err.to_string().contains("age"));
    }
}
