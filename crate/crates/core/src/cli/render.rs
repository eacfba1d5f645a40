//! Text layouts for the command reports.

use std::fmt::Write;

use super::{FitReport, MetricsReport, RegressReport, SimulateReport, ValidateReport};
use crate::econometrics::INTERCEPT;
use crate::metrics::{RankedItem, VariableSummary};
use crate::simulator::RecoveryReport;

/// Left-aligned first column, right-aligned rest.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let ncol = header.len();
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            let pad = width[i] - c.chars().count();
            if i == 0 {
                s.push_str(c);
                s.extend(std::iter::repeat_n(' ', pad));
            } else {
                s.push_str("  ");
                s.extend(std::iter::repeat_n(' ', pad));
                s.push_str(c);
            }
        }
        s.trim_end().to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    out.push_str(&"-".repeat(width.iter().sum::<usize>() + 2 * (ncol - 1)));
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

/// At least two decimals, more for small magnitudes so one significant
/// digit survives.
pub fn fmt_coef(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let a = v.abs();
    let decimals = if a == 0.0 || a >= 0.01 {
        2
    } else {
        (-a.log10().floor() as usize).min(8)
    };
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn fmt_p(p: f64) -> String {
    if p < 0.001 {
        "<0.001".into()
    } else {
        format!("{p:.3}")
    }
}

pub fn render_validate(r: &ValidateReport) -> String {
    let d = &r.diagnostics;
    let mut rows = vec![
        vec!["items".into(), r.items.to_string()],
        vec!["ratings".into(), r.ratings.to_string()],
        vec!["critic reviews".into(), r.critic_reviews.to_string()],
        vec!["sales rows".into(), r.sales_rows.to_string()],
    ];
    if let Some(p) = r.profiles {
        rows.push(vec!["profiles".into(), p.to_string()]);
    }
    rows.push(vec!["panel rows".into(), r.panel_rows.to_string()]);
    let mut out = table(&["Dataset", "Count"], &rows);
    out.push('\n');
    let excl = [
        ("duplicates removed", d.duplicates_removed),
        ("pre-release ratings", d.pre_release),
        ("ratings beyond max week", d.beyond_max_week),
        ("ratings without sales row", d.ratings_without_sales),
        ("zero-revenue weeks", d.zero_revenue),
        ("zero-rating weeks", d.zero_rating),
        ("density >= 1 weeks", d.density_at_least_one),
        ("fewer than 2 critics", d.insufficient_critics),
    ];
    let rows: Vec<Vec<String>> = excl.iter().map(|(k, v)| vec![k.to_string(), v.to_string()]).collect();
    out.push_str(&table(&["Exclusion", "Count"], &rows));
    for w in &d.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

fn summary_row(name: &str, s: &Option<VariableSummary>, scale: f64, decimals: usize) -> Vec<String> {
    match s {
        Some(s) => vec![
            name.to_string(),
            format!("{:.decimals$}", s.mean / scale),
            s.sd.map_or("-".into(), |sd| format!("{:.decimals$}", sd / scale)),
            format!("{:.decimals$}", s.min / scale),
            format!("{:.decimals$}", s.max / scale),
        ],
        None => vec![name.to_string(), "-".into(), "-".into(), "-".into(), "-".into()],
    }
}

fn ranking_rows(items: &[RankedItem]) -> Vec<Vec<String>> {
    items
        .iter()
        .map(|i| {
            vec![
                i.title.clone(),
                i.genres.join(", "),
                format!("{:.0}", i.first_week_density_per_million),
            ]
        })
        .collect()
}

pub fn render_metrics(r: &MetricsReport) -> String {
    let s = &r.summary_stats;
    let mut out = String::from("Summary statistics\n\n");
    let rows = vec![
        summary_row("Marketing budget (millions)", &s.marketing_budget, 1.0, 2),
        summary_row("Screens in opening week", &s.opening_screens, 1.0, 2),
        summary_row("Weekly revenue (millions)", &s.weekly_revenue, 1e6, 2),
        summary_row("Weekly volume of user ratings", &s.weekly_volume, 1.0, 2),
        summary_row("Weekly density (per million viewers)", &s.weekly_density_per_million, 1.0, 0),
        summary_row("Weekly average user rating", &s.weekly_avg_user_rating, 1.0, 2),
        summary_row("Average critic rating", &s.avg_critic_rating, 1.0, 2),
    ];
    out.push_str(&table(&["Variable", "Mean", "Std. dev.", "Min", "Max"], &rows));
    for (k, v) in [
        ("Total number of items", s.total_items),
        ("Total number of user ratings", s.total_user_ratings),
        ("Total number of critic ratings", s.total_critic_ratings),
        ("Total number of unique users", s.total_unique_users),
    ] {
        let _ = writeln!(out, "{k}: {v}");
    }

    let header = ["Title", "Genres", "Ratings per million viewers"];
    out.push_str("\nHighest first-week density\n\n");
    out.push_str(&table(&header, &ranking_rows(&r.rankings.top)));
    out.push_str("\nLowest first-week density\n\n");
    out.push_str(&table(&header, &ranking_rows(&r.rankings.bottom)));
    if r.rankings.truncated {
        out.push_str("(fewer items than requested)\n");
    }

    out.push_str("\nScore usage\n\n");
    let rows: Vec<Vec<String>> = r
        .histogram
        .counts
        .iter()
        .map(|(score, count)| {
            let share = r.histogram.fraction(*score).map_or("-".into(), |f| format!("{:.3}", f));
            vec![score.to_string(), count.to_string(), share]
        })
        .collect();
    out.push_str(&table(&["Score", "Count", "Share"], &rows));

    out.push_str("\nFirst-week density distribution\n\n");
    let rows: Vec<Vec<String>> = r
        .ecdf
        .iter()
        .map(|p| vec![format!("{:.0}", p.density_per_million), format!("{:.3}", p.cumulative_probability)])
        .collect();
    out.push_str(&table(&["Ratings per million viewers", "Cumulative share"], &rows));

    out.push_str("\nVolume vs lagged revenue (market-wide calendar weeks)\n\n");
    match &r.lag_correlation {
        Some(t) => {
            let rows: Vec<Vec<String>> = t
                .lags
                .iter()
                .zip(&t.correlations)
                .zip(&t.pairs)
                .map(|((l, c), n)| {
                    vec![
                        l.to_string(),
                        c.map_or("undefined".into(), |c| format!("{c:.3}")),
                        n.to_string(),
                    ]
                })
                .collect();
            out.push_str(&table(&["Lag (weeks)", "Correlation", "Pairs"], &rows));
        }
        None => out.push_str("series too short for the requested lags\n"),
    }

    if let Some(d) = &r.demographics {
        out.push_str("\nRater demographics\n\n");
        let pct = |v: Option<f64>| v.map_or("-".into(), |v| format!("{:.0}%", 100.0 * v));
        let mut rows = vec![
            vec!["profiles".into(), d.profiles.to_string()],
            vec!["listing gender".into(), pct(Some(d.gender_coverage))],
            vec!["listing age".into(), pct(Some(d.age_coverage))],
            vec!["male (of gendered)".into(), pct(d.male_share)],
            vec!["female (of gendered)".into(), pct(d.female_share)],
        ];
        for b in d.age_brackets.iter().flatten() {
            rows.push(vec![format!("age {} (of aged)", b.bracket), pct(Some(b.share))]);
        }
        out.push_str(&table(&["Profile field", "Value"], &rows));
    }
    out
}

/// Coefficient table with the intercept last.
pub fn render_fit(title: &str, fit: &FitReport) -> String {
    let mut terms: Vec<_> = fit.terms.iter().filter(|t| t.name != INTERCEPT).collect();
    terms.extend(fit.terms.iter().filter(|t| t.name == INTERCEPT));
    let rows: Vec<Vec<String>> = terms
        .iter()
        .map(|t| {
            vec![
                t.name.clone(),
                fmt_coef(t.coefficient),
                fmt_coef(t.std_error),
                format!("{:.2}", t.t_value),
                fmt_p(t.p_value),
                t.significance.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let mut out = format!("{title}\n\n");
    out.push_str(&table(&["Variable", "Coeff.", "Std. err.", "t-value", "P>t", ""], &rows));
    let _ = writeln!(
        out,
        "n = {}, R² = {:.2}, adjusted R² = {:.2}",
        fit.n_obs, fit.r_squared, fit.adj_r_squared
    );
    out
}

pub fn render_regress(r: &RegressReport) -> String {
    let mut out = render_fit("OLS", &r.ols);
    let bp = &r.bp_test;
    let _ = writeln!(
        out,
        "\nBreusch–Pagan test on OLS residuals: LM = {:.2}, df = {}, p = {}{}\n",
        bp.lm_statistic,
        bp.df,
        fmt_p(bp.p_value),
        if bp.degenerate { " (squared residuals constant)" } else { "" }
    );
    out.push_str(&render_fit("WLS (weights: estimated viewers)", &r.wls));
    out.push_str("Significance codes: c < 0.001, b < 0.01, a < 0.05\n\n");
    let rows: Vec<Vec<String>> = r
        .hypotheses
        .outcomes
        .iter()
        .map(|o| {
            vec![
                o.id.clone(),
                o.statement.clone(),
                o.coefficient.clone(),
                fmt_coef(o.estimate),
                fmt_p(o.p_value),
                o.verdict.to_string(),
            ]
        })
        .collect();
    let _ = writeln!(out, "Hypotheses at alpha = {}\n", r.hypotheses.alpha);
    out.push_str(&table(&["", "Statement", "Term", "Estimate", "P>t", "Verdict"], &rows));
    out
}

pub fn render_recovery(r: &RecoveryReport) -> String {
    let mut out = format!(
        "Recovery: {} replications, {} items x {} weeks, seed {}, {:.0} panel rows on average\n\n",
        r.reps, r.n_items, r.weeks, r.seed, r.mean_panel_rows
    );
    let opt = |v: Option<f64>| v.map_or("-".into(), fmt_coef);
    let rows: Vec<Vec<String>> = r
        .coefficients
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                fmt_coef(c.truth),
                fmt_coef(c.wls_mean),
                opt(c.wls_sd),
                fmt_coef(c.ols_mean),
                opt(c.ols_sd),
                format!("{:.2}", c.coverage),
                c.variance_ratio.map_or("-".into(), |v| format!("{v:.2}")),
            ]
        })
        .collect();
    out.push_str(&table(
        &["Term", "Truth", "WLS mean", "WLS sd", "OLS mean", "OLS sd", "Coverage", "Var OLS/WLS"],
        &rows,
    ));
    out
}

pub fn render_simulate(r: &SimulateReport) -> String {
    let mut out = format!(
        "Wrote {} items, {} ratings over {} item-weeks (seed {}) to:\n",
        r.items, r.ratings, r.item_weeks, r.seed
    );
    let f = &r.files;
    for p in [&f.ratings, &f.items, &f.sales, &f.critics].into_iter().chain(&f.profiles) {
        let _ = writeln!(out, "  {}", p.display());
    }
    for s in &r.skipped {
        let _ = writeln!(out, "skipped: {s}");
    }
    if let Some(rec) = &r.recovery {
        out.push('\n');
        out.push_str(&render_recovery(rec));
    }
    out
}
