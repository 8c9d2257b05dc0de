use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::matrix::{EntrySet, LowRankFactorization};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatingsFormat {
    /// `user,item,rating[,timestamp]`, optionally with a header line.
    Csv,
    /// `user::item::rating[::timestamp]`.
    DoubleColon,
}

impl RatingsFormat {
    /// Guesses the format from the first non-empty line.
    pub fn detect(text: &str) -> RatingsFormat {
        match text.lines().find(|l| !l.trim().is_empty()) {
            Some(line) if line.contains("::") => RatingsFormat::DoubleColon,
            _ => RatingsFormat::Csv,
        }
    }
}

/// Ratings reindexed to dense ids, with a train/test partition.
#[derive(Clone, Debug, PartialEq)]
pub struct RatingsDataset {
    /// Original user ids by dense index (first-appearance order).
    pub users: Vec<String>,
    pub items: Vec<String>,
    /// `(user, item, rating)` in dense ids, one per distinct pair.
    pub ratings: Vec<(usize, usize, f64)>,
    /// `true` where the rating with the same position is in the training split.
    pub in_train: Vec<bool>,
}

impl RatingsDataset {
    pub fn rows(&self) -> usize {
        self.users.len()
    }

    pub fn cols(&self) -> usize {
        self.items.len()
    }

    fn split(&self, train: bool) -> Result<EntrySet> {
        let triples = self
            .ratings
            .iter()
            .zip(&self.in_train)
            .filter(|(_, &t)| t == train)
            .map(|(&r, _)| r)
            .collect();
        EntrySet::new(self.rows(), self.cols(), triples)
    }

    pub fn train(&self) -> Result<EntrySet> {
        self.split(true)
    }

    pub fn test(&self) -> Result<EntrySet> {
        self.split(false)
    }

    /// Builds a dataset from dense-index triples (used for synthetic data).
    pub fn from_triples(
        rows: usize,
        cols: usize,
        ratings: Vec<(usize, usize, f64)>,
        split_fraction: f64,
        seed: u64,
    ) -> Result<Self> {
        if ratings.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let in_train = split_assignment(ratings.len(), split_fraction, seed)?;
        Ok(RatingsDataset {
            users: (0..rows).map(|i| i.to_string()).collect(),
            items: (0..cols).map(|j| j.to_string()).collect(),
            ratings,
            in_train,
        })
    }
}

fn split_assignment(len: usize, fraction: f64, seed: u64) -> Result<Vec<bool>> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidProbability(fraction));
    }
    let n_train = (fraction * len as f64).round() as usize;
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut rng::seeded(seed));
    let mut in_train = vec![false; len];
    for &i in &order[..n_train] {
        in_train[i] = true;
    }
    Ok(in_train)
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: line as usize,
        message: message.into(),
    }
}

/// Raw `(user, item, rating)` records with their 1-based line numbers.
fn parse_records(path: &Path, text: &str, format: RatingsFormat) -> Result<Vec<(String, String, f64)>> {
    let mut out = Vec::new();
    let mut push = |line: u64, fields: Vec<&str>, header_ok: bool| -> Result<()> {
        if fields.len() < 3 || fields.len() > 4 {
            return Err(parse_error(
                path,
                line,
                format!("expected 3 or 4 fields, found {}", fields.len()),
            ));
        }
        let rating = match fields[2].trim().parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            Ok(_) => return Err(parse_error(path, line, "rating is not finite")),
            // a non-numeric first line is a header
            Err(_) if header_ok => return Ok(()),
            Err(_) => return Err(parse_error(path, line, format!("rating {:?} is not a number", fields[2]))),
        };
        let (user, item) = (fields[0].trim(), fields[1].trim());
        if user.is_empty() || item.is_empty() {
            return Err(parse_error(path, line, "empty user or item id"));
        }
        out.push((user.to_string(), item.to_string(), rating));
        Ok(())
    };

    match format {
        RatingsFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .flexible(true)
                .from_reader(text.as_bytes());
            let mut first = true;
            for record in reader.records() {
                let record = record.map_err(|e| {
                    let line = e.position().map_or(0, |p| p.line());
                    parse_error(path, line, e.to_string())
                })?;
                let line = record.position().map_or(0, |p| p.line());
                if record.iter().all(|f| f.trim().is_empty()) {
                    continue;
                }
                push(line, record.iter().collect(), first)?;
                first = false;
            }
        }
        RatingsFormat::DoubleColon => {
            let mut first = true;
            for (idx, raw) in text.lines().enumerate() {
                let line = raw.trim_end_matches('\r');
                if line.trim().is_empty() {
                    continue;
                }
                push(idx as u64 + 1, line.split("::").collect(), first)?;
                first = false;
            }
        }
    }
    Ok(out)
}

/// Reads a ratings file, reindexes users and items to dense ids in order of
/// first appearance and splits ratings into train/test with the given
/// training fraction. Repeated `(user, item)` pairs keep the last rating.
pub fn ingest_ratings(path: &Path, format: Option<RatingsFormat>, split_fraction: f64, seed: u64) -> Result<RatingsDataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let format = format.unwrap_or_else(|| RatingsFormat::detect(&text));
    let records = parse_records(path, &text, format)?;
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut users: Vec<String> = Vec::new();
    let mut items: Vec<String> = Vec::new();
    let mut user_ids: HashMap<String, usize> = HashMap::new();
    let mut item_ids: HashMap<String, usize> = HashMap::new();
    let mut position: HashMap<(usize, usize), usize> = HashMap::new();
    let mut ratings: Vec<(usize, usize, f64)> = Vec::new();
    let mut duplicates = 0usize;
    for (user, item, value) in records {
        let next_user = users.len();
        let u = *user_ids.entry(user.clone()).or_insert_with(|| {
            users.push(user);
            next_user
        });
        let next_item = items.len();
        let i = *item_ids.entry(item.clone()).or_insert_with(|| {
            items.push(item);
            next_item
        });
        match position.get(&(u, i)) {
            Some(&at) => {
                ratings[at].2 = value;
                duplicates += 1;
            }
            None => {
                position.insert((u, i), ratings.len());
                ratings.push((u, i, value));
            }
        }
    }
    if duplicates > 0 {
        log::warn!("{}: {duplicates} repeated (user, item) pairs; kept the last rating", path.display());
    }
    let in_train = split_assignment(ratings.len(), split_fraction, seed)?;
    Ok(RatingsDataset {
        users,
        items,
        ratings,
        in_train,
    })
}

/// Writes `user,item,prediction` for the test split using the original ids.
pub fn write_predictions(dataset: &RatingsDataset, model: &LowRankFactorization, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(["user", "item", "prediction"])?;
    for (&(u, i, _), _) in dataset.ratings.iter().zip(&dataset.in_train).filter(|(_, &t)| !t) {
        let prediction = model.entry(u, i);
        writer.write_record([dataset.users[u].as_str(), dataset.items[i].as_str(), &prediction.to_string()])?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Reads a file written by [`write_predictions`].
pub fn read_predictions(path: &Path) -> Result<Vec<(String, String, f64)>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    reader.deserialize().map(|r| r.map_err(Error::from)).collect()
}
