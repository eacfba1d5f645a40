//! Property suites shared by the `properties` tests and the acceptance run.
//! Each suite runs [`CASES`] generated cases on a fixed proptest seed.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wom_density::dataset::{build_panel, dedupe_ratings, genre_weights, logit, Dataset, PanelRow, RatingEvent};
use wom_density::econometrics::linalg::Matrix;
use wom_density::econometrics::{fit_ols, fit_wls, DesignMatrix};
use wom_density::metrics::{
    demographic_summary, first_week_density_ecdf, market_weekly_series, rank_by_density, score_histogram,
    summary_stats, DEFAULT_AGE_BRACKETS,
};
use wom_density::simulator::{logistic, simulate_dataset, SimConfig, TrueModel};

pub const CASES: u32 = 128;

pub fn run<S: Strategy>(
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

pub fn release() -> NaiveDate {
    NaiveDate::from_ymd_opt(2002, 5, 3).unwrap()
}

pub fn events() -> impl Strategy<Value = Vec<RatingEvent>> {
    prop::collection::vec((0u8..6, 0u8..3, -3i64..40, 0i64..86_400, 1u8..=5), 0..60).prop_map(|raw| {
        let t0 = Utc.from_utc_datetime(&release().and_hms_opt(0, 0, 0).unwrap());
        raw.into_iter()
            .map(|(u, i, day, sec, score)| RatingEvent {
                user_id: format!("u{u}"),
                item_id: format!("i{i}"),
                timestamp: t0 + Duration::days(day) + Duration::seconds(sec),
                score,
                text: None,
            })
            .collect()
    })
}

pub fn dedup_idempotent() -> Result<(), String> {
    run(events(), |ev| {
        let once = dedupe_ratings(&ev);
        let twice = dedupe_ratings(&once);
        prop_assert_eq!(&once, &twice);
        let pairs: BTreeSet<(&str, &str)> = ev.iter().map(|e| (e.user_id.as_str(), e.item_id.as_str())).collect();
        prop_assert_eq!(once.len(), pairs.len());
        for kept in &once {
            let earliest = ev
                .iter()
                .filter(|e| e.user_id == kept.user_id && e.item_id == kept.item_id)
                .map(|e| e.timestamp)
                .min()
                .unwrap();
            prop_assert_eq!(kept.timestamp, earliest);
        }
        Ok(())
    })
}

pub fn logit_round_trip() -> Result<(), String> {
    let p = prop_oneof![1e-12f64..0.5, 0.5f64..(1.0 - 1e-6)];
    run(p, |p| {
        let back = logistic(logit(p));
        prop_assert!((back - p).abs() <= 1e-12 * p, "p = {p}, back = {back}");
        Ok(())
    })
}

pub fn genre_weight_sum() -> Result<(), String> {
    let labels = prop::collection::vec(
        prop::sample::select(vec!["DRAMA", "COMEDY", "SCIFI", "KIDS", "HORROR", "MUSICAL"]),
        1..8,
    );
    run(labels, |labels| {
        let genres: Vec<String> = labels.iter().map(|g| g.to_string()).collect();
        let w = genre_weights(&genres);
        let sum: f64 = w.values().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12, "sum {sum}");
        let distinct: BTreeSet<&&str> = labels.iter().collect();
        prop_assert_eq!(w.len(), distinct.len());
        Ok(())
    })
}

/// A full-column-rank regression problem with positive weights.
#[derive(Debug, Clone)]
pub struct Problem {
    pub rows: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
}

impl Problem {
    pub fn design(&self, weights: Option<Vec<f64>>) -> DesignMatrix {
        let names = (0..self.rows[0].len()).map(|j| format!("x{j}")).collect();
        DesignMatrix::new(names, Matrix::from_rows(&self.rows), self.y.clone(), weights).unwrap()
    }
}

pub fn problems() -> impl Strategy<Value = Problem> {
    (1usize..=4)
        .prop_flat_map(|p| (Just(p), p + 2..=p + 14))
        .prop_flat_map(|(p, n)| {
            (
                prop::collection::vec(prop::collection::vec(-10.0f64..10.0, p - 1), n),
                prop::collection::vec(-50.0f64..50.0, n),
                prop::collection::vec(0.01f64..100.0, n),
            )
        })
        .prop_map(|(cols, y, w)| Problem {
            rows: cols
                .into_iter()
                .map(|c| std::iter::once(1.0).chain(c).collect())
                .collect(),
            y,
            w,
        })
}

pub fn wls_weight_scale_invariance() -> Result<(), String> {
    run((problems(), -3.0f64..6.0), |(pb, exp)| {
        let c = 10f64.powf(exp);
        let a = fit_wls(&pb.design(Some(pb.w.clone())));
        prop_assume!(a.is_ok());
        let a = a.unwrap();
        let b = fit_wls(&pb.design(Some(pb.w.iter().map(|v| v * c).collect()))).unwrap();
        for (ta, tb) in a.terms.iter().zip(&b.terms) {
            let tol = 1e-8 * ta.coefficient.abs().max(1.0);
            prop_assert!((ta.coefficient - tb.coefficient).abs() <= tol, "{} vs {}", ta.coefficient, tb.coefficient);
            if ta.t_value.is_finite() {
                let tol = 1e-6 * ta.t_value.abs().max(1.0);
                prop_assert!((ta.t_value - tb.t_value).abs() <= tol, "t {} vs {}", ta.t_value, tb.t_value);
            }
        }
        Ok(())
    })
}

pub fn residual_orthogonality() -> Result<(), String> {
    run(problems(), |pb| {
        for weighted in [false, true] {
            let fit = if weighted {
                fit_wls(&pb.design(Some(pb.w.clone())))
            } else {
                fit_ols(&pb.design(None))
            };
            prop_assume!(fit.is_ok());
            let fit = fit.unwrap();
            for j in 0..pb.rows[0].len() {
                let (mut dot, mut scale) = (0.0, 0.0);
                for (i, row) in pb.rows.iter().enumerate() {
                    let w = if weighted { pb.w[i] } else { 1.0 };
                    dot += w * row[j] * fit.residuals[i];
                    scale += (w * row[j] * fit.residuals[i]).abs() + (w * row[j] * pb.y[i]).abs();
                }
                prop_assert!(dot.abs() <= 1e-10 * scale.max(1e-300), "column {j}: {dot} vs scale {scale}");
            }
        }
        Ok(())
    })
}

pub fn week1_row(item: String, density_per_million: f64) -> PanelRow {
    let d = density_per_million * 1e-6;
    PanelRow {
        item_id: item,
        week_index: 1,
        revenue: 1e6,
        viewers: 1e6 / 5.81,
        unique_raters: 1,
        density: d,
        ld: logit(d),
        avg_rating: 3.0,
        mkt: 1.0,
        scr: 1.0,
        crstd: 1.0,
        genre_weights: BTreeMap::new(),
        lweek: 0.0,
    }
}

pub fn densities() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1u32..800, Just(50)].prop_map(f64::from), 1..50)
}

pub fn ecdf_monotone() -> Result<(), String> {
    run(densities(), |d| {
        let rows: Vec<PanelRow> = d.iter().enumerate().map(|(i, v)| week1_row(format!("m{i}"), *v)).collect();
        let e = first_week_density_ecdf(&rows).unwrap();
        prop_assert_eq!(e.last().unwrap().cumulative_probability, 1.0);
        for pair in e.windows(2) {
            prop_assert!(pair[0].density_per_million < pair[1].density_per_million);
            prop_assert!(pair[0].cumulative_probability < pair[1].cumulative_probability);
        }
        prop_assert!(e[0].cumulative_probability > 0.0);
        Ok(())
    })
}

/// A small simulated dataset for a given seed.
pub fn small_dataset(seed: u64, n_items: usize) -> Dataset {
    let cfg = SimConfig {
        n_items,
        weeks: 3,
        seed,
        opening_viewers: (2e5, 5e6),
        ..SimConfig::default()
    };
    simulate_dataset(&TrueModel::published(), &cfg).unwrap().dataset
}

fn shuffled(ds: &Dataset, key: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    let mut out = ds.clone();
    out.ratings.shuffle(&mut rng);
    out.critics.shuffle(&mut rng);
    out.items.shuffle(&mut rng);
    out.sales.shuffle(&mut rng);
    if let Some(p) = out.profiles.as_mut() {
        p.shuffle(&mut rng);
    }
    out
}

pub fn permutation_invariance() -> Result<(), String> {
    run((any::<u64>(), any::<u64>(), 2usize..6), |(seed, key, n)| {
        let a = small_dataset(seed, n);
        let b = shuffled(&a, key);
        let pa = build_panel(&a, 3).unwrap();
        let pb = build_panel(&b, 3).unwrap();
        prop_assert_eq!(&pa, &pb);
        prop_assert_eq!(summary_stats(&a, &pa.rows), summary_stats(&b, &pb.rows));
        prop_assert_eq!(score_histogram(&a.ratings), score_histogram(&b.ratings));
        prop_assert_eq!(market_weekly_series(&a, 3), market_weekly_series(&b, 3));
        prop_assert_eq!(
            demographic_summary(a.profiles.as_deref().unwrap(), &DEFAULT_AGE_BRACKETS),
            demographic_summary(b.profiles.as_deref().unwrap(), &DEFAULT_AGE_BRACKETS)
        );
        if !pa.rows.is_empty() {
            let rows_b: Vec<PanelRow> = pb.rows.iter().rev().cloned().collect();
            prop_assert_eq!(
                first_week_density_ecdf(&pa.rows).ok(),
                first_week_density_ecdf(&rows_b).ok()
            );
            prop_assert_eq!(
                rank_by_density(&pa.rows, &a.items, 3).ok(),
                rank_by_density(&rows_b, &b.items, 3).ok()
            );
        }
        Ok(())
    })
}

/// The seven invariant suites named by the acceptance gate.
pub fn core_suites() -> Vec<(&'static str, fn() -> Result<(), String>)> {
    vec![
        ("dedup idempotence", dedup_idempotent),
        ("logit round-trip", logit_round_trip),
        ("genre-weight sum", genre_weight_sum),
        ("WLS weight-scale invariance", wls_weight_scale_invariance),
        ("residual orthogonality", residual_orthogonality),
        ("ECDF monotonicity", ecdf_monotone),
        ("input-permutation invariance", permutation_invariance),
    ]
}
