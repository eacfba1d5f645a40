//! Delimited-text ingestion and emission of the dataset files.
//!
//! Every file has a header row; columns are located by name so their order
//! does not matter. Row errors carry the physical line number.

use std::collections::HashSet;
use std::fs::File;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, NaiveDateTime, SecondsFormat, Utc};
use csv::StringRecord;

use super::{
    normalize_genre, validate_age, validate_critic_score, validate_item, validate_sales,
    validate_score, CriticReview, Dataset, Gender, ItemRecord, RaterProfile, RatingEvent,
    WeeklySales,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DatasetPaths {
    pub ratings: PathBuf,
    pub items: PathBuf,
    pub sales: PathBuf,
    pub critics: PathBuf,
    pub profiles: Option<PathBuf>,
}

impl DatasetPaths {
    /// The conventional file names inside one directory.
    pub fn in_dir(dir: impl AsRef<Path>, with_profiles: bool) -> Self {
        let dir = dir.as_ref();
        DatasetPaths {
            ratings: dir.join("ratings.csv"),
            items: dir.join("items.csv"),
            sales: dir.join("sales.csv"),
            critics: dir.join("critics.csv"),
            profiles: with_profiles.then(|| dir.join("profiles.csv")),
        }
    }
}

struct Table {
    name: String,
    headers: StringRecord,
    reader: csv::Reader<File>,
}

impl Table {
    fn open(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile {
                path: path.to_path_buf(),
            });
        }
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(file);
        let name = path.display().to_string();
        let headers = reader
            .headers()
            .map_err(|e| Error::parse(&name, 1, "header", e.to_string()))?
            .clone();
        Ok(Table {
            name,
            headers,
            reader,
        })
    }

    fn column(&self, field: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(field))
            .ok_or_else(|| Error::parse(&self.name, 1, field, "required column missing from header"))
    }

    fn optional_column(&self, field: &str) -> Option<usize> {
        self.headers.iter().position(|h| h.eq_ignore_ascii_case(field))
    }

    fn rows(&mut self) -> impl Iterator<Item = Result<(u64, StringRecord)>> + '_ {
        let name = self.name.clone();
        self.reader.records().map(move |rec| {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                Error::parse(&name, line, "record", e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            Ok((line, rec))
        })
    }
}

fn field<'r>(rec: &'r StringRecord, idx: usize, file: &str, line: u64, name: &str) -> Result<&'r str> {
    match rec.get(idx) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(Error::parse(file, line, name, "missing value")),
    }
}

fn optional_field(rec: &StringRecord, idx: Option<usize>) -> Option<&str> {
    idx.and_then(|i| rec.get(i)).filter(|v| !v.is_empty())
}

fn parse_num<T: std::str::FromStr>(raw: &str, file: &str, line: u64, name: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>()
        .map_err(|e| Error::parse(file, line, name, format!("cannot parse `{raw}`: {e}")))
}

/// Accepts RFC 3339, a naive `YYYY-MM-DDTHH:MM:SS` (read as UTC) or a bare date.
pub(crate) fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(raw) {
        return Some(t.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(t.and_utc());
        }
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .ok()
        .map(|d| d.and_hms_opt(0, 0, 0).expect("midnight").and_utc())
}

fn read_items(path: &Path) -> Result<Vec<ItemRecord>> {
    let mut t = Table::open(path)?;
    let (c_id, c_title, c_rel, c_gen, c_mkt) = (
        t.column("item_id")?,
        t.column("title")?,
        t.column("release_date")?,
        t.column("genres")?,
        t.column("marketing_budget_millions")?,
    );
    let name = t.name.clone();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in t.rows() {
        let (line, rec) = row?;
        let item_id = field(&rec, c_id, &name, line, "item_id")?.to_string();
        let raw_date = field(&rec, c_rel, &name, line, "release_date")?;
        let release_date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d").map_err(|e| {
            Error::parse(&name, line, "release_date", format!("cannot parse `{raw_date}`: {e}"))
        })?;
        let mut genres: Vec<String> = Vec::new();
        for g in rec.get(c_gen).unwrap_or("").split(';') {
            let g = normalize_genre(g);
            if !g.is_empty() && !genres.contains(&g) {
                genres.push(g);
            }
        }
        let item = ItemRecord {
            title: rec.get(c_title).unwrap_or("").to_string(),
            release_date,
            genres,
            marketing_budget: parse_num(
                field(&rec, c_mkt, &name, line, "marketing_budget_millions")?,
                &name,
                line,
                "marketing_budget_millions",
            )?,
            item_id,
        };
        validate_item(&item, &name, line)?;
        if !seen.insert(item.item_id.clone()) {
            return Err(Error::parse(
                &name,
                line,
                "item_id",
                format!("duplicate item_id `{}`", item.item_id),
            ));
        }
        out.push(item);
    }
    Ok(out)
}

fn check_known(known: &HashSet<String>, file: &str, line: u64, id: &str) -> Result<()> {
    if known.contains(id) {
        Ok(())
    } else {
        Err(Error::UnknownItem {
            file: file.to_string(),
            line,
            item_id: id.to_string(),
        })
    }
}

fn read_ratings(path: &Path, known: &HashSet<String>) -> Result<Vec<RatingEvent>> {
    let mut t = Table::open(path)?;
    let (c_user, c_item, c_ts, c_score) = (
        t.column("user_id")?,
        t.column("item_id")?,
        t.column("timestamp")?,
        t.column("score")?,
    );
    let c_text = t.optional_column("text");
    let name = t.name.clone();
    let mut out = Vec::new();
    for row in t.rows() {
        let (line, rec) = row?;
        let item_id = field(&rec, c_item, &name, line, "item_id")?;
        check_known(known, &name, line, item_id)?;
        let raw_ts = field(&rec, c_ts, &name, line, "timestamp")?;
        let timestamp = parse_timestamp(raw_ts).ok_or_else(|| {
            Error::parse(&name, line, "timestamp", format!("not an ISO-8601 instant: `{raw_ts}`"))
        })?;
        let score: u8 = parse_num(field(&rec, c_score, &name, line, "score")?, &name, line, "score")?;
        validate_score(score, &name, line)?;
        out.push(RatingEvent {
            user_id: field(&rec, c_user, &name, line, "user_id")?.to_string(),
            item_id: item_id.to_string(),
            timestamp,
            score,
            text: optional_field(&rec, c_text).map(str::to_string),
        });
    }
    Ok(out)
}

fn read_sales(path: &Path, known: &HashSet<String>) -> Result<Vec<WeeklySales>> {
    let mut t = Table::open(path)?;
    let (c_item, c_week, c_rev, c_scr) = (
        t.column("item_id")?,
        t.column("week_index")?,
        t.column("revenue")?,
        t.column("screens")?,
    );
    let name = t.name.clone();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in t.rows() {
        let (line, rec) = row?;
        let item_id = field(&rec, c_item, &name, line, "item_id")?;
        check_known(known, &name, line, item_id)?;
        let s = WeeklySales {
            item_id: item_id.to_string(),
            week_index: parse_num(field(&rec, c_week, &name, line, "week_index")?, &name, line, "week_index")?,
            revenue: parse_num(field(&rec, c_rev, &name, line, "revenue")?, &name, line, "revenue")?,
            screens: parse_num(field(&rec, c_scr, &name, line, "screens")?, &name, line, "screens")?,
        };
        validate_sales(&s, &name, line)?;
        if !seen.insert((s.item_id.clone(), s.week_index)) {
            return Err(Error::DuplicateSales {
                file: name.clone(),
                line,
                item_id: s.item_id,
                week: s.week_index,
            });
        }
        out.push(s);
    }
    Ok(out)
}

fn read_critics(path: &Path, known: &HashSet<String>) -> Result<Vec<CriticReview>> {
    let mut t = Table::open(path)?;
    let (c_item, c_critic, c_score) = (
        t.column("item_id")?,
        t.column("critic_id")?,
        t.column("score")?,
    );
    let name = t.name.clone();
    let mut out = Vec::new();
    for row in t.rows() {
        let (line, rec) = row?;
        let item_id = field(&rec, c_item, &name, line, "item_id")?;
        check_known(known, &name, line, item_id)?;
        let score: f64 = parse_num(field(&rec, c_score, &name, line, "score")?, &name, line, "score")?;
        validate_critic_score(score, &name, line)?;
        out.push(CriticReview {
            item_id: item_id.to_string(),
            critic_id: field(&rec, c_critic, &name, line, "critic_id")?.to_string(),
            score,
        });
    }
    Ok(out)
}

fn read_profiles(path: &Path) -> Result<Vec<RaterProfile>> {
    let mut t = Table::open(path)?;
    let c_user = t.column("user_id")?;
    let c_gender = t.optional_column("gender");
    let c_age = t.optional_column("age");
    let name = t.name.clone();
    let mut out = Vec::new();
    for row in t.rows() {
        let (line, rec) = row?;
        let gender = match optional_field(&rec, c_gender).map(str::to_ascii_lowercase).as_deref() {
            None => None,
            Some("m") | Some("male") => Some(Gender::Male),
            Some("f") | Some("female") => Some(Gender::Female),
            Some(other) => {
                return Err(Error::parse(&name, line, "gender", format!("unrecognized gender `{other}`")))
            }
        };
        let age = optional_field(&rec, c_age)
            .map(|raw| parse_num::<u32>(raw, &name, line, "age"))
            .transpose()?;
        validate_age(age, &name, line)?;
        out.push(RaterProfile {
            user_id: field(&rec, c_user, &name, line, "user_id")?.to_string(),
            gender,
            age,
        });
    }
    Ok(out)
}

/// Reads and validates all dataset files.
pub fn parse_dataset(paths: &DatasetPaths, ticket_price: f64) -> Result<Dataset> {
    if !(ticket_price.is_finite() && ticket_price > 0.0) {
        return Err(Error::Config(format!(
            "ticket_price must be positive, got {ticket_price}"
        )));
    }
    let items = read_items(&paths.items)?;
    let known: HashSet<String> = items.iter().map(|i| i.item_id.clone()).collect();
    let ratings = read_ratings(&paths.ratings, &known)?;
    let sales = read_sales(&paths.sales, &known)?;
    let critics = read_critics(&paths.critics, &known)?;
    let profiles = paths.profiles.as_deref().map(read_profiles).transpose()?;
    Ok(Dataset {
        ratings,
        critics,
        items,
        sales,
        profiles,
        ticket_price,
    })
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })
}

fn io_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

/// Writes the dataset in the ingestion formats under `dir`, returning the paths.
pub fn write_dataset(dir: &Path, ds: &Dataset) -> Result<DatasetPaths> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let paths = DatasetPaths::in_dir(dir, ds.profiles.is_some());

    let p = &paths.items;
    let mut w = writer(p)?;
    w.write_record(["item_id", "title", "release_date", "genres", "marketing_budget_millions"])
        .map_err(io_err(p))?;
    for it in &ds.items {
        w.write_record([
            it.item_id.as_str(),
            it.title.as_str(),
            &it.release_date.format("%Y-%m-%d").to_string(),
            &it.genres.join(";"),
            &it.marketing_budget.to_string(),
        ])
        .map_err(io_err(p))?;
    }
    w.flush().map_err(|source| Error::Io { path: p.clone(), source })?;

    let p = &paths.ratings;
    let mut w = writer(p)?;
    w.write_record(["user_id", "item_id", "timestamp", "score", "text"])
        .map_err(io_err(p))?;
    for r in &ds.ratings {
        w.write_record([
            r.user_id.as_str(),
            r.item_id.as_str(),
            &r.timestamp.to_rfc3339_opts(SecondsFormat::Secs, true),
            &r.score.to_string(),
            r.text.as_deref().unwrap_or(""),
        ])
        .map_err(io_err(p))?;
    }
    w.flush().map_err(|source| Error::Io { path: p.clone(), source })?;

    let p = &paths.sales;
    let mut w = writer(p)?;
    w.write_record(["item_id", "week_index", "revenue", "screens"])
        .map_err(io_err(p))?;
    for s in &ds.sales {
        w.write_record([
            s.item_id.as_str(),
            &s.week_index.to_string(),
            &s.revenue.to_string(),
            &s.screens.to_string(),
        ])
        .map_err(io_err(p))?;
    }
    w.flush().map_err(|source| Error::Io { path: p.clone(), source })?;

    let p = &paths.critics;
    let mut w = writer(p)?;
    w.write_record(["item_id", "critic_id", "score"]).map_err(io_err(p))?;
    for c in &ds.critics {
        w.write_record([c.item_id.as_str(), c.critic_id.as_str(), &c.score.to_string()])
            .map_err(io_err(p))?;
    }
    w.flush().map_err(|source| Error::Io { path: p.clone(), source })?;

    if let (Some(p), Some(profiles)) = (&paths.profiles, &ds.profiles) {
        let mut w = writer(p)?;
        w.write_record(["user_id", "gender", "age"]).map_err(io_err(p))?;
        for pr in profiles {
            let gender = match pr.gender {
                Some(Gender::Male) => "male",
                Some(Gender::Female) => "female",
                None => "",
            };
            let age = pr.age.map(|a| a.to_string()).unwrap_or_default();
            w.write_record([pr.user_id.as_str(), gender, &age]).map_err(io_err(p))?;
        }
        w.flush().map_err(|source| Error::Io { path: p.clone(), source })?;
    }
    Ok(paths)
}
