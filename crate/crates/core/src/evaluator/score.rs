use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalError;

/// Similarity scores, one row per video and one column per caption.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    video_ids: Vec<String>,
    caption_ids: Vec<String>,
    scores: Vec<f64>,
}

fn check_unique(ids: &[String]) -> Result<(), EvalError> {
    let mut seen = HashSet::new();
    match ids.iter().find(|id| !seen.insert(id.as_str())) {
        Some(dup) => Err(EvalError::DuplicateId(dup.clone())),
        None => Ok(()),
    }
}

impl ScoreMatrix {
    pub fn new(video_ids: Vec<String>, caption_ids: Vec<String>, scores: Vec<f64>) -> Result<Self, EvalError> {
        if scores.len() != video_ids.len() * caption_ids.len() {
            return Err(EvalError::MalformedMatrix(format!(
                "{} scores for a {}x{} matrix",
                scores.len(),
                video_ids.len(),
                caption_ids.len()
            )));
        }
        check_unique(&video_ids)?;
        check_unique(&caption_ids)?;
        let cols = caption_ids.len();
        if let Some(bad) = scores.iter().position(|s| !s.is_finite()) {
            return Err(EvalError::NonFiniteScore {
                video_id: video_ids[bad / cols].clone(),
                caption_id: caption_ids[bad % cols].clone(),
            });
        }
        Ok(Self {
            video_ids,
            caption_ids,
            scores,
        })
    }

    pub fn from_rows(video_ids: Vec<String>, caption_ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, EvalError> {
        if rows.len() != video_ids.len() || rows.iter().any(|r| r.len() != caption_ids.len()) {
            return Err(EvalError::MalformedMatrix("row lengths do not match the id lists".into()));
        }
        Self::new(video_ids, caption_ids, rows.into_iter().flatten().collect())
    }

    pub fn video_ids(&self) -> &[String] {
        &self.video_ids
    }

    pub fn caption_ids(&self) -> &[String] {
        &self.caption_ids
    }

    pub fn rows(&self) -> usize {
        self.video_ids.len()
    }

    pub fn cols(&self) -> usize {
        self.caption_ids.len()
    }

    #[inline]
    pub fn get(&self, video: usize, caption: usize) -> f64 {
        self.scores[video * self.caption_ids.len() + caption]
    }

    pub fn read_csv(path: &Path) -> Result<Self, EvalError> {
        let file = std::fs::File::open(path).map_err(|source| EvalError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_csv_reader(file).map_err(|e| match e {
            EvalError::MalformedMatrix(m) => EvalError::MalformedMatrix(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self, EvalError> {
        let malformed = |m: String| EvalError::MalformedMatrix(m);
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = rdr.headers().map_err(|e| malformed(e.to_string()))?.clone();
        if header.get(0) != Some("video_id") {
            return Err(malformed("first header cell must be video_id".into()));
        }
        let caption_ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut video_ids = Vec::new();
        let mut scores = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| malformed(e.to_string()))?;
            let mut cells = record.iter();
            video_ids.push(cells.next().unwrap_or_default().to_string());
            for cell in cells {
                let v: f64 = cell
                    .trim()
                    .parse()
                    .map_err(|_| malformed(format!("row {}: {cell:?} is not a number", line + 2)))?;
                scores.push(v);
            }
        }
        Self::new(video_ids, caption_ids, scores)
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), EvalError> {
        let io = |source| EvalError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(|e| EvalError::Csv(e.to_string()))?;
        let mut header = vec!["video_id".to_string()];
        header.extend(self.caption_ids.iter().cloned());
        w.write_record(&header).map_err(|e| EvalError::Csv(e.to_string()))?;
        for (r, vid) in self.video_ids.iter().enumerate() {
            let mut row = vec![vid.clone()];
            row.extend((0..self.cols()).map(|c| self.get(r, c).to_string()));
            w.write_record(&row).map_err(|e| EvalError::Csv(e.to_string()))?;
        }
        w.flush().map_err(io)
    }
}

/// Correct captions per video. Every caption belongs to exactly one video.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, BTreeSet<String>>", into = "BTreeMap<String, BTreeSet<String>>")]
pub struct GroundTruth {
    by_video: BTreeMap<String, BTreeSet<String>>,
    by_caption: BTreeMap<String, String>,
}

impl GroundTruth {
    pub fn new(by_video: BTreeMap<String, BTreeSet<String>>) -> Result<Self, EvalError> {
        let mut by_caption = BTreeMap::new();
        for (video, captions) in &by_video {
            for c in captions {
                if let Some(other) = by_caption.insert(c.clone(), video.clone()) {
                    return Err(EvalError::InconsistentGroundTruth(format!(
                        "caption {c} is correct for both {other} and {video}"
                    )));
                }
            }
        }
        Ok(Self { by_video, by_caption })
    }

    /// One-to-one ground truth from (video, caption) pairs.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self, EvalError> {
        let mut by_video: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (v, c) in pairs {
            by_video.entry(v.to_string()).or_default().insert(c.to_string());
        }
        Self::new(by_video)
    }

    pub fn captions_of(&self, video_id: &str) -> Option<&BTreeSet<String>> {
        self.by_video.get(video_id)
    }

    pub fn video_of(&self, caption_id: &str) -> Option<&str> {
        self.by_caption.get(caption_id).map(String::as_str)
    }

    pub fn videos(&self) -> impl Iterator<Item = (&String, &BTreeSet<String>)> {
        self.by_video.iter()
    }

    pub fn captions(&self) -> impl Iterator<Item = (&String, &String)> {
        self.by_caption.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.by_caption.is_empty()
    }

    pub(crate) fn index_in(&self, m: &ScoreMatrix) -> Result<Indexed, EvalError> {
        let rows: HashMap<&str, usize> = m.video_ids.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let cols: HashMap<&str, usize> =
            m.caption_ids.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let row = |v: &str| rows.get(v).copied().ok_or_else(|| EvalError::UnknownId(v.to_string()));
        let col = |c: &str| cols.get(c).copied().ok_or_else(|| EvalError::UnknownId(c.to_string()));
        let mut video_queries = Vec::new();
        for (v, captions) in &self.by_video {
            let correct = captions.iter().map(|c| col(c)).collect::<Result<Vec<_>, _>>()?;
            video_queries.push((row(v)?, correct));
        }
        let mut caption_queries = Vec::new();
        for (c, v) in &self.by_caption {
            caption_queries.push((col(c)?, row(v)?));
        }
        Ok(Indexed {
            video_queries,
            caption_queries,
        })
    }
}

impl TryFrom<BTreeMap<String, BTreeSet<String>>> for GroundTruth {
    type Error = EvalError;

    fn try_from(m: BTreeMap<String, BTreeSet<String>>) -> Result<Self, EvalError> {
        Self::new(m)
    }
}

impl From<GroundTruth> for BTreeMap<String, BTreeSet<String>> {
    fn from(g: GroundTruth) -> Self {
        g.by_video
    }
}

/// Ground truth resolved to matrix indices.
pub(crate) struct Indexed {
    /// (row, correct columns)
    pub video_queries: Vec<(usize, Vec<usize>)>,
    /// (column, correct row)
    pub caption_queries: Vec<(usize, usize)>,
}
