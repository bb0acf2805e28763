use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LossError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("batch contains a non-finite entry")]
    NonFinite,
    #[error("batch must contain at least one pair with dimension at least one")]
    EmptyBatch,
    #[error("invalid loss parameters: {0}")]
    InvalidParams(String),
    #[error("item {0} has generated negatives but the batch has no in-batch negatives to normalize their weights")]
    EmptyNormalizer(usize),
    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),
}

/// Dense row-major matrix of embeddings, one row per vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, LossError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LossError::ShapeMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from a flat row-major buffer.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LossError> {
        if data.len() != rows * cols {
            return Err(LossError::ShapeMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    fn with_cols(mut self, cols: usize) -> Self {
        if self.rows == 0 {
            self.cols = cols;
        }
        self
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = LossError;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        Matrix::from_rows(rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.to_rows()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// In-batch video/text embeddings plus generated hard-negative text embeddings per item.
#[derive(Debug, Clone, PartialEq)]
pub struct LossBatch {
    video: Matrix,
    text: Matrix,
    generated: Vec<Matrix>,
}

impl LossBatch {
    /// `generated` holds one matrix per item (possibly with zero rows); an empty vector
    /// means no item has generated negatives.
    pub fn new(video: Matrix, text: Matrix, generated: Vec<Matrix>) -> Result<Self, LossError> {
        let n = video.rows();
        let d = video.cols();
        if n == 0 || d == 0 {
            return Err(LossError::EmptyBatch);
        }
        if text.rows() != n || text.cols() != d {
            return Err(LossError::ShapeMismatch(format!(
                "video is {n}x{d}, text is {}x{}",
                text.rows(),
                text.cols()
            )));
        }
        let generated = if generated.is_empty() {
            vec![Matrix::zeros(0, d); n]
        } else {
            generated.into_iter().map(|g| g.with_cols(d)).collect()
        };
        if generated.len() != n {
            return Err(LossError::ShapeMismatch(format!(
                "{} generated-negative sets for {n} items",
                generated.len()
            )));
        }
        if let Some(g) = generated.iter().find(|g| g.cols() != d) {
            return Err(LossError::ShapeMismatch(format!(
                "generated negatives have dimension {}, expected {d}",
                g.cols()
            )));
        }
        let finite = video.as_slice().iter().all(|x| x.is_finite())
            && text.as_slice().iter().all(|x| x.is_finite())
            && generated
                .iter()
                .all(|g| g.as_slice().iter().all(|x| x.is_finite()));
        if !finite {
            return Err(LossError::NonFinite);
        }
        Ok(Self {
            video,
            text,
            generated,
        })
    }

    pub fn len(&self) -> usize {
        self.video.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.video.cols()
    }

    pub fn video(&self) -> &Matrix {
        &self.video
    }

    pub fn text(&self) -> &Matrix {
        &self.text
    }

    pub fn generated(&self) -> &[Matrix] {
        &self.generated
    }

    pub fn generated_count(&self, i: usize) -> usize {
        self.generated[i].rows()
    }
}

/// Temperature `tau` and weight sharpness `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossParams {
    pub tau: f64,
    pub beta: f64,
}

impl LossParams {
    pub fn new(tau: f64, beta: f64) -> Result<Self, LossError> {
        let p = Self { tau, beta };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<(), LossError> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(LossError::InvalidParams(format!("tau must be > 0, got {}", self.tau)));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(LossError::InvalidParams(format!("beta must be >= 0, got {}", self.beta)));
        }
        Ok(())
    }
}

impl Default for LossParams {
    fn default() -> Self {
        Self { tau: 0.05, beta: 0.5 }
    }
}

/// Scales every nonzero row to unit Euclidean norm. Zero rows are left as they are.
pub fn unit_normalize(m: &Matrix) -> Matrix {
    let mut out = m.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let norm = dot(row, row).sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|x| *x /= norm);
        }
    }
    out
}
