//! Reference computations that share no code with the library.

use std::collections::{BTreeMap, HashMap};

use chrono::{DateTime, NaiveDate, Utc};

/// Solves `XᵀWX β = XᵀWy` by Gaussian elimination with partial pivoting.
pub fn normal_equations(x: &[Vec<f64>], y: &[f64], w: Option<&[f64]>) -> Vec<f64> {
    let p = x[0].len();
    let mut a = vec![vec![0.0; p + 1]; p];
    for (i, row) in x.iter().enumerate() {
        let wi = w.map_or(1.0, |w| w[i]);
        for r in 0..p {
            for c in 0..p {
                a[r][c] += wi * row[r] * row[c];
            }
            a[r][p] += wi * row[r] * y[i];
        }
    }
    for col in 0..p {
        let piv = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        for r in col + 1..p {
            let f = a[r][col] / a[col][col];
            for c in col..=p {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut beta = vec![0.0; p];
    for r in (0..p).rev() {
        let s: f64 = (r + 1..p).map(|c| a[r][c] * beta[c]).sum();
        beta[r] = (a[r][p] - s) / a[r][r];
    }
    beta
}

/// Unique raters per (item, week) straight from raw events: each
/// (user, item) pair counts once, in the week of its earliest event.
pub fn unique_raters_by_week(
    events: &[(String, String, DateTime<Utc>)],
    release: &HashMap<String, NaiveDate>,
    max_week: i64,
) -> BTreeMap<(String, u32), u64> {
    let mut first: HashMap<(&str, &str), DateTime<Utc>> = HashMap::new();
    for (user, item, ts) in events {
        first
            .entry((user.as_str(), item.as_str()))
            .and_modify(|t| *t = (*t).min(*ts))
            .or_insert(*ts);
    }
    let mut out = BTreeMap::new();
    for ((_, item), ts) in first {
        let days = (ts.date_naive() - release[item]).num_days();
        if days < 0 {
            continue;
        }
        let week = days / 7 + 1;
        if week <= max_week {
            *out.entry((item.to_string(), week as u32)).or_insert(0) += 1;
        }
    }
    out
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Split into panels first so narrow peaks are not missed.
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson(f, lo, hi, fa, fm, fb, whole, tol / panels as f64, 40)
        })
        .sum()
}

/// Γ(n/2) for a positive integer n, by the recurrence from Γ(1) and Γ(1/2).
pub fn gamma_half(n: u32) -> f64 {
    let mut g = if n % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut z = if n % 2 == 0 { 1.0 } else { 0.5 };
    while (2.0 * z) < f64::from(n) {
        g *= z;
        z += 1.0;
    }
    g
}

/// Student t CDF for integer `df` by quadrature of the density.
pub fn t_cdf(x: f64, df: u32) -> f64 {
    let nu = f64::from(df);
    let c = gamma_half(df + 1) / ((nu * std::f64::consts::PI).sqrt() * gamma_half(df));
    let pdf = move |t: f64| c * (1.0 + t * t / nu).powf(-(nu + 1.0) / 2.0);
    let half = integrate(&pdf, 0.0, x.abs(), 1e-14);
    if x >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// Chi-squared CDF for integer `df`. For df = 1 the integrable singularity
/// at zero is removed with `t = u²`.
pub fn chi2_cdf(x: f64, df: u32) -> f64 {
    let k = f64::from(df);
    let norm = 2f64.powf(k / 2.0) * gamma_half(df);
    if df == 1 {
        let f = move |u: f64| 2.0 * (-u * u / 2.0).exp() / norm;
        integrate(&f, 0.0, x.sqrt(), 1e-14)
    } else {
        let f = move |t: f64| t.powf(k / 2.0 - 1.0) * (-t / 2.0).exp() / norm;
        integrate(&f, 0.0, x, 1e-14)
    }
}
