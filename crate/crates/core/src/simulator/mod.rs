//! Synthetic ratings and sales generated from a known logit-density model.
//!
//! Every viewer of item j in week t rates with probability
//! `p_jt = logistic(x_jtᵀβ + ε_jt)`. The number of raters is drawn as one
//! binomial sample per item-week, which has the same distribution as one
//! Bernoulli draw per viewer.
//!
//! The quality covariate in `x_jt` is a latent per-cell mean score. The
//! raters' scores are allocated so that their realized mean tracks it, and
//! the regression later sees that realized mean.

mod recovery;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::dataset::{
    CriticReview, Dataset, Gender, ItemRecord, RaterProfile, RatingEvent, WeeklySales,
};
use crate::econometrics::{
    DesignSpec, AVG, AVG_SQUARED, CRSTD, DEFAULT_GENRES, INTERCEPT, LWEEK, MKT, SCR,
};
use crate::error::{Error, Result};

pub use recovery::{
    recovery_experiment, replicate, CoefficientRecovery, RecoveryReport, Replicate,
};

/// Ground-truth coefficients, idiosyncratic noise and ticket price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueModel {
    pub beta: BTreeMap<String, f64>,
    /// Standard deviation of the normal error added to the linear predictor.
    pub noise_sd: f64,
    pub ticket_price: f64,
}

pub const DEFAULT_TICKET_PRICE: f64 = 5.81;
pub const DEFAULT_NOISE_SD: f64 = 0.05;

impl TrueModel {
    /// The published WLS estimates, used as truth.
    pub fn published() -> Self {
        let beta = [
            (MKT, 0.02),
            (SCR, -0.0005),
            (AVG, 0.07),
            (AVG_SQUARED, 0.11),
            (CRSTD, 0.33),
            ("SCIFI", 0.54),
            ("KIDS", -0.82),
            ("DRAMA", -0.15),
            ("COMEDY", -0.21),
            ("ROMANCE", -0.11),
            ("ACTION", -0.15),
            ("THRILLER", 0.09),
            (LWEEK, -0.55),
            (INTERCEPT, -11.14),
        ];
        TrueModel {
            beta: beta.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            noise_sd: DEFAULT_NOISE_SD,
            ticket_price: DEFAULT_TICKET_PRICE,
        }
    }

    /// Every coefficient zero except the intercept, and no noise.
    pub fn intercept_only(b0: f64) -> Self {
        let mut m = Self::published();
        for v in m.beta.values_mut() {
            *v = 0.0;
        }
        m.beta.insert(INTERCEPT.to_string(), b0);
        m.noise_sd = 0.0;
        m
    }

    pub fn coefficient(&self, name: &str) -> f64 {
        self.beta.get(name).copied().unwrap_or(0.0)
    }

    /// Sets one coefficient; the name must be a column of `spec`.
    pub fn set_coefficient(&mut self, name: &str, value: f64, spec: &DesignSpec) -> Result<()> {
        if !spec.column_names().iter().any(|c| c == name) {
            return Err(Error::Config(format!(
                "unknown coefficient `{name}`; expected one of {}",
                spec.column_names().join(", ")
            )));
        }
        if !value.is_finite() {
            return Err(Error::Config(format!("coefficient {name} must be finite")));
        }
        self.beta.insert(name.to_string(), value);
        Ok(())
    }

    pub fn validate(&self, spec: &DesignSpec) -> Result<()> {
        if !(self.ticket_price.is_finite() && self.ticket_price > 0.0) {
            return Err(Error::Config(format!("ticket_price must be positive, got {}", self.ticket_price)));
        }
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return Err(Error::Config(format!("noise_sd must be non-negative, got {}", self.noise_sd)));
        }
        let names = spec.column_names();
        for (k, v) in &self.beta {
            if !names.contains(k) {
                return Err(Error::Config(format!("unknown coefficient `{k}` in true model")));
            }
            if !v.is_finite() {
                return Err(Error::Config(format!("coefficient {k} must be finite")));
            }
        }
        Ok(())
    }
}

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Generator settings. Ranges are inclusive `[lo, hi]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub n_items: usize,
    pub weeks: u32,
    pub seed: u64,
    /// Opening-week viewers, drawn log-uniformly.
    pub opening_viewers: (f64, f64),
    /// Week-over-week retention of viewers and screens.
    pub weekly_decay: (f64, f64),
    /// Log-scale noise on weekly viewers.
    pub viewer_noise_sd: f64,
    /// Marketing budget in millions.
    pub budget: (f64, f64),
    pub opening_screens: (u32, u32),
    /// Gaussian-copula correlation between budget and opening screens.
    pub mkt_scr_correlation: f64,
    pub tracked_genres: Vec<String>,
    /// Genres outside the design; they dilute the tracked genre weights.
    pub untracked_genres: Vec<String>,
    pub genres_per_item: (usize, usize),
    pub critics_per_item: (usize, usize),
    /// Mean and sd of an item's average critic score.
    pub critic_mean: (f64, f64),
    /// Range of the per-item sd of critic scores around their mean.
    pub critic_dispersion: (f64, f64),
    /// Mean score over all generated ratings. The per-cell qualities are
    /// shifted together to hit it; the shift leaves every `p_jt` unchanged
    /// because quality enters the model centred.
    pub rater_mean_score: f64,
    /// Spread of item quality around that level, on the 1..5 scale.
    pub quality_sd: f64,
    /// Week-to-week wobble of quality.
    pub quality_drift_sd: f64,
    /// Share of each rater cohort scoring 2, 3 and 4. Scores 1 and 5 take
    /// the rest, split so the cohort mean equals the cell's quality.
    pub intermediate_scores: [f64; 3],
    pub ratings_per_user: f64,
    /// Probability that a rating is followed by a re-rating from the same user.
    pub duplicate_rate: f64,
    pub profiles: Option<ProfileConfig>,
    /// Releases fall on this date plus a whole number of weeks.
    pub first_release: NaiveDate,
    pub release_span_weeks: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    pub gender_listed: f64,
    pub male: f64,
    pub age_listed: f64,
    pub age_18_29: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            gender_listed: 0.85,
            male: 0.74,
            age_listed: 0.34,
            age_18_29: 0.58,
        }
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_items: 104,
            weeks: 5,
            seed: 2002,
            opening_viewers: (5.0e6, 5.0e7),
            weekly_decay: (0.6, 0.9),
            viewer_noise_sd: 0.1,
            budget: (1.0, 50.0),
            opening_screens: (4, 3876),
            mkt_scr_correlation: 0.0,
            tracked_genres: DEFAULT_GENRES.iter().map(|g| g.to_string()).collect(),
            untracked_genres: ["MUSICAL", "HORROR", "DOCUMENTARY", "WESTERN"]
                .map(String::from)
                .to_vec(),
            genres_per_item: (1, 3),
            critics_per_item: (8, 18),
            critic_mean: (3.35, 0.6),
            critic_dispersion: (0.3, 1.3),
            rater_mean_score: 3.66,
            quality_sd: 0.5,
            quality_drift_sd: 0.1,
            intermediate_scores: [0.08, 0.115, 0.12],
            ratings_per_user: 1.4,
            duplicate_rate: 0.02,
            profiles: Some(ProfileConfig::default()),
            first_release: NaiveDate::from_ymd_opt(2002, 1, 4).expect("valid date"),
            release_span_weeks: 44,
        }
    }
}

/// Room kept between the quality deviations and the score-share bounds so
/// the final level shift does not need clamping.
const QUALITY_MARGIN: f64 = 0.15;

fn check_range(name: &str, (lo, hi): (f64, f64), min: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo >= min && lo <= hi {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} range [{lo}, {hi}] is invalid")))
    }
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be a probability, got {p}")))
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_items == 0 {
            return Err(Error::Config("n_items must be at least 1".into()));
        }
        if self.weeks == 0 {
            return Err(Error::Config("weeks must be at least 1".into()));
        }
        check_range("opening_viewers", self.opening_viewers, 1.0)?;
        check_range("budget", self.budget, 0.0)?;
        check_range("critic_dispersion", self.critic_dispersion, 0.0)?;
        let (dlo, dhi) = self.weekly_decay;
        if !(dlo > 0.0 && dlo <= dhi && dhi <= 1.0) {
            return Err(Error::Config(format!("weekly_decay range [{dlo}, {dhi}] must lie in (0, 1]")));
        }
        if self.opening_screens.0 == 0 || self.opening_screens.0 > self.opening_screens.1 {
            return Err(Error::Config("opening_screens range is invalid".into()));
        }
        if !(self.mkt_scr_correlation > -1.0 && self.mkt_scr_correlation < 1.0) {
            return Err(Error::Config("mkt_scr_correlation must lie in (-1, 1)".into()));
        }
        let n_genres = self.tracked_genres.len() + self.untracked_genres.len();
        let (glo, ghi) = self.genres_per_item;
        if glo == 0 || glo > ghi || ghi > n_genres {
            return Err(Error::Config(format!(
                "genres_per_item [{glo}, {ghi}] must lie in [1, {n_genres}]"
            )));
        }
        let all: BTreeSet<&String> = self.tracked_genres.iter().chain(&self.untracked_genres).collect();
        if all.len() != n_genres {
            return Err(Error::Config("genre lists overlap or repeat".into()));
        }
        let (clo, chi) = self.critics_per_item;
        if clo < 2 || clo > chi {
            return Err(Error::Config("critics_per_item needs at least 2 critics".into()));
        }
        let (cm, csd) = self.critic_mean;
        if !(cm.is_finite() && csd >= 0.0 && self.quality_sd >= 0.0) {
            return Err(Error::Config("critic_mean and quality_sd need a finite mean and non-negative sds".into()));
        }
        if !(self.viewer_noise_sd >= 0.0 && self.quality_drift_sd >= 0.0) {
            return Err(Error::Config("noise parameters must be non-negative".into()));
        }
        let s: f64 = self.intermediate_scores.iter().sum();
        if self.intermediate_scores.iter().any(|f| *f < 0.0) || s >= 1.0 {
            return Err(Error::Config("intermediate_scores must be non-negative and sum below 1".into()));
        }
        let (lo, hi) = self.quality_bounds();
        if !(self.rater_mean_score > lo + QUALITY_MARGIN && self.rater_mean_score < hi - QUALITY_MARGIN) {
            return Err(Error::Config(format!(
                "rater_mean_score must lie in ({:.2}, {:.2}) for these intermediate_scores",
                lo + QUALITY_MARGIN,
                hi - QUALITY_MARGIN
            )));
        }
        if !(self.ratings_per_user >= 1.0) {
            return Err(Error::Config("ratings_per_user must be at least 1".into()));
        }
        check_prob("duplicate_rate", self.duplicate_rate)?;
        if let Some(p) = &self.profiles {
            for (name, v) in [
                ("gender_listed", p.gender_listed),
                ("male", p.male),
                ("age_listed", p.age_listed),
                ("age_18_29", p.age_18_29),
            ] {
                check_prob(name, v)?;
            }
        }
        Ok(())
    }

    /// Design with this config's tracked genres.
    pub fn design_spec(&self) -> DesignSpec {
        DesignSpec {
            tracked_genres: self.tracked_genres.clone(),
            ..DesignSpec::default()
        }
    }

    /// Quality range for which the score shares stay non-negative.
    fn quality_bounds(&self) -> (f64, f64) {
        let [a, b, c] = self.intermediate_scores;
        let extreme = 1.0 - a - b - c;
        let lo = extreme + 2.0 * a + 3.0 * b + 4.0 * c;
        (lo, lo + 4.0 * extreme)
    }

    /// Shares of scores 1..=5 whose mean is `quality`.
    pub fn score_shares(&self, quality: f64) -> [f64; 5] {
        let [a, b, c] = self.intermediate_scores;
        let (lo, hi) = self.quality_bounds();
        let q = quality.clamp(lo, hi);
        let f5 = (q - lo) / 4.0;
        let f1 = (1.0 - a - b - c - f5).max(0.0);
        [f1, a, b, c, f5]
    }
}

/// One generated item-week.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimCell {
    pub item_id: String,
    pub week_index: u32,
    pub viewers: u64,
    pub screens: u32,
    pub quality: f64,
    pub p: f64,
    pub raters: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedData {
    pub dataset: Dataset,
    pub cells: Vec<SimCell>,
    /// Item-weeks dropped because they had no viewers.
    pub skipped: Vec<String>,
}

/// Generates a dataset from `model` with the config's seed.
pub fn simulate_dataset(model: &TrueModel, config: &SimConfig) -> Result<SimulatedData> {
    simulate_stream(model, config, 0)
}

/// Like [`simulate_dataset`] but on an independent random stream of the
/// same seed. Stream 0 is what [`simulate_dataset`] uses.
pub fn simulate_stream(model: &TrueModel, config: &SimConfig, stream: u64) -> Result<SimulatedData> {
    config.validate()?;
    model.validate(&config.design_spec())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(stream);
    Generator { model, config, rng: &mut rng }.run()
}

struct ItemDraw {
    record: ItemRecord,
    opening_viewers: f64,
    decay: f64,
    opening_screens: f64,
    /// Deviation from the common quality level.
    quality: f64,
    crstd: f64,
}

struct Generator<'a> {
    model: &'a TrueModel,
    config: &'a SimConfig,
    rng: &'a mut ChaCha8Rng,
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn round_to(v: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (v * f).round() / f
}

/// Splits `k` into counts proportional to `shares`, largest remainder first.
fn quota(k: u64, shares: &[f64; 5]) -> [u64; 5] {
    let total: f64 = shares.iter().sum();
    let exact: Vec<f64> = shares.iter().map(|s| k as f64 * s / total).collect();
    let mut counts = [0u64; 5];
    for (c, e) in counts.iter_mut().zip(&exact) {
        *c = e.floor() as u64;
    }
    let mut left = k - counts.iter().sum::<u64>();
    let mut order: Vec<usize> = (0..5).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for i in order.into_iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

impl Generator<'_> {
    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn uniform(&mut self, (lo, hi): (f64, f64)) -> f64 {
        if lo == hi {
            lo
        } else {
            self.rng.random_range(lo..=hi)
        }
    }

    fn draw_item(&mut self, j: usize, critics: &mut Vec<CriticReview>) -> ItemDraw {
        let cfg = self.config;
        let width = cfg.n_items.to_string().len().max(3);
        let item_id = format!("m{:0width$}", j + 1);

        let offset = self.rng.random_range(0..=cfg.release_span_weeks);
        let release_date = cfg.first_release + Duration::weeks(i64::from(offset));

        let pool: Vec<&String> = cfg.tracked_genres.iter().chain(&cfg.untracked_genres).collect();
        let k = self.rng.random_range(cfg.genres_per_item.0..=cfg.genres_per_item.1);
        let mut picked: Vec<usize> = index::sample(self.rng, pool.len(), k).into_vec();
        picked.sort_unstable();
        let genres = picked.into_iter().map(|i| pool[i].clone()).collect();

        let z1 = self.normal();
        let z2 = cfg.mkt_scr_correlation * z1
            + (1.0 - cfg.mkt_scr_correlation.powi(2)).sqrt() * self.normal();
        let (blo, bhi) = cfg.budget;
        let budget = round_to(blo + (bhi - blo) * normal_cdf(z1), 2);
        let (slo, shi) = (f64::from(cfg.opening_screens.0), f64::from(cfg.opening_screens.1));
        let opening_screens = (slo + (shi - slo) * normal_cdf(z2)).round();

        let (vlo, vhi) = cfg.opening_viewers;
        let opening_viewers = (self.uniform((vlo.ln(), vhi.ln()))).exp();
        let decay = self.uniform(cfg.weekly_decay);
        let quality = cfg.quality_sd * self.normal();

        let n_critics = self.rng.random_range(cfg.critics_per_item.0..=cfg.critics_per_item.1);
        let centre = (cfg.critic_mean.0 + cfg.critic_mean.1 * self.normal()).clamp(1.0, 5.0);
        let spread = self.uniform(cfg.critic_dispersion);
        let mut scores = Vec::with_capacity(n_critics);
        for c in 0..n_critics {
            let s = round_to((centre + spread * self.normal()).clamp(1.0, 5.0), 2);
            scores.push(s);
            critics.push(CriticReview {
                item_id: item_id.clone(),
                critic_id: format!("{item_id}-c{:02}", c + 1),
                score: s,
            });
        }
        scores.sort_by(f64::total_cmp);
        let crstd = crate::dataset::sample_sd(&scores).unwrap_or(0.0);

        ItemDraw {
            record: ItemRecord {
                title: format!("Feature {}", j + 1),
                item_id,
                release_date,
                genres,
                marketing_budget: budget,
            },
            opening_viewers,
            decay,
            opening_screens,
            quality,
            crstd,
        }
    }

    fn run(mut self) -> Result<SimulatedData> {
        let cfg = self.config;
        let model = self.model;
        let mut critics = Vec::new();
        let items: Vec<ItemDraw> = (0..cfg.n_items).map(|j| self.draw_item(j, &mut critics)).collect();

        let (qlo, qhi) = cfg.quality_bounds();
        let (dlo, dhi) = (
            qlo + QUALITY_MARGIN - cfg.rater_mean_score,
            qhi - QUALITY_MARGIN - cfg.rater_mean_score,
        );
        let mut cells = Vec::new();
        let mut cell_item = Vec::new();
        let mut skipped = Vec::new();
        let mut sales = Vec::new();
        for (j, it) in items.iter().enumerate() {
            for w in 1..=cfg.weeks {
                let fade = it.decay.powi(w as i32 - 1);
                let noise = (cfg.viewer_noise_sd * self.normal()).exp();
                let viewers = (it.opening_viewers * fade * noise).round() as u64;
                let screens = (it.opening_screens * fade).round().max(1.0) as u32;
                let quality = (it.quality + cfg.quality_drift_sd * self.normal()).clamp(dlo, dhi);
                if viewers == 0 {
                    skipped.push(format!("item {} week {w}: no viewers", it.record.item_id));
                    continue;
                }
                sales.push(WeeklySales {
                    item_id: it.record.item_id.clone(),
                    week_index: w,
                    revenue: viewers as f64 * model.ticket_price,
                    screens,
                });
                cells.push(SimCell {
                    item_id: it.record.item_id.clone(),
                    week_index: w,
                    viewers,
                    screens,
                    quality,
                    p: 0.0,
                    raters: 0,
                });
                cell_item.push(j);
            }
        }
        if cells.is_empty() {
            return Err(Error::Config("configuration produced no item-weeks with viewers".into()));
        }

        let quality_mean = cells.iter().map(|c| c.quality).sum::<f64>() / cells.len() as f64;
        let genre_names = cfg.design_spec().tracked_genres;
        for (cell, &j) in cells.iter_mut().zip(&cell_item) {
            let it = &items[j];
            let centred = cell.quality - quality_mean;
            let k = it.record.genres.len() as f64;
            let mut eta = model.coefficient(INTERCEPT)
                + model.coefficient(MKT) * it.record.marketing_budget
                + model.coefficient(SCR) * f64::from(cell.screens)
                + model.coefficient(AVG) * centred
                + model.coefficient(AVG_SQUARED) * centred * centred
                + model.coefficient(CRSTD) * it.crstd
                + model.coefficient(LWEEK) * f64::from(cell.week_index).ln();
            for g in &genre_names {
                if it.record.genres.contains(g) {
                    eta += model.coefficient(g) / k;
                }
            }
            let eps = model.noise_sd * self.rng.sample::<f64, _>(StandardNormal);
            cell.p = logistic(eta + eps);
            let binom = Binomial::new(cell.viewers, cell.p)
                .map_err(|e| Error::Domain(format!("binomial draw: {e}")))?;
            cell.raters = binom.sample(self.rng);
        }

        let raters: u64 = cells.iter().map(|c| c.raters).sum();
        let level = if raters == 0 {
            cfg.rater_mean_score
        } else {
            let weighted: f64 = cells.iter().map(|c| c.raters as f64 * c.quality).sum();
            cfg.rater_mean_score - weighted / raters as f64
        };
        for cell in &mut cells {
            cell.quality = (cell.quality + level).clamp(qlo, qhi);
        }

        let ratings = self.ratings(&items, &cells, &cell_item);
        let profiles = cfg.profiles.map(|p| self.profiles(&ratings, &p));
        let dataset = Dataset::new(
            ratings,
            critics,
            items.into_iter().map(|i| i.record).collect(),
            sales,
            profiles,
            model.ticket_price,
        )?;
        Ok(SimulatedData {
            dataset,
            cells,
            skipped,
        })
    }

    fn ratings(&mut self, items: &[ItemDraw], cells: &[SimCell], cell_item: &[usize]) -> Vec<RatingEvent> {
        let cfg = self.config;
        let mut per_item = vec![0u64; items.len()];
        for (c, &j) in cells.iter().zip(cell_item) {
            per_item[j] += c.raters;
        }
        let total: u64 = per_item.iter().sum();
        let max_item = per_item.iter().copied().max().unwrap_or(0);
        let n_users = ((total as f64 / cfg.ratings_per_user).ceil() as u64).max(max_item).max(1) as usize;
        let width = n_users.to_string().len().max(5);

        let mut users: Vec<Vec<usize>> = per_item
            .iter()
            .map(|&n| {
                let mut v = index::sample(self.rng, n_users, n as usize).into_vec();
                v.reverse();
                v
            })
            .collect();

        let mut out = Vec::with_capacity(total as usize);
        for (c, &j) in cells.iter().zip(cell_item) {
            let it = &items[j].record;
            let counts = quota(c.raters, &cfg.score_shares(c.quality));
            let mut scores: Vec<u8> = counts
                .iter()
                .enumerate()
                .flat_map(|(s, &n)| std::iter::repeat_n(s as u8 + 1, n as usize))
                .collect();
            scores.shuffle(self.rng);
            let week_start = Utc.from_utc_datetime(&it.release_date.and_hms_opt(0, 0, 0).expect("midnight"))
                + Duration::days(7 * i64::from(c.week_index - 1));
            for score in scores {
                let user = users[j].pop().expect("enough users sampled");
                let secs = self.rng.random_range(0..7 * 86_400);
                let event = RatingEvent {
                    user_id: format!("u{user:0width$}"),
                    item_id: it.item_id.clone(),
                    timestamp: week_start + Duration::seconds(secs),
                    score,
                    text: None,
                };
                if self.rng.random_bool(cfg.duplicate_rate) {
                    let later = self.rng.random_range(3_600..=3 * 86_400);
                    out.push(RatingEvent {
                        timestamp: event.timestamp + Duration::seconds(later),
                        ..event.clone()
                    });
                }
                out.push(event);
            }
        }
        out.sort_by(|a, b| {
            (a.timestamp, &a.item_id, &a.user_id).cmp(&(b.timestamp, &b.item_id, &b.user_id))
        });
        out
    }

    fn profiles(&mut self, ratings: &[RatingEvent], p: &ProfileConfig) -> Vec<RaterProfile> {
        let users: BTreeSet<&str> = ratings.iter().map(|r| r.user_id.as_str()).collect();
        users
            .into_iter()
            .map(|u| {
                let gender = self.rng.random_bool(p.gender_listed).then(|| {
                    if self.rng.random_bool(p.male) {
                        Gender::Male
                    } else {
                        Gender::Female
                    }
                });
                let age = self.rng.random_bool(p.age_listed).then(|| {
                    if self.rng.random_bool(p.age_18_29) {
                        self.rng.random_range(18..=29)
                    } else if self.rng.random_bool(0.2) {
                        self.rng.random_range(13..=17)
                    } else {
                        self.rng.random_range(30..=70)
                    }
                });
                RaterProfile {
                    user_id: u.to_string(),
                    gender,
                    age,
                }
            })
            .collect()
    }
}
