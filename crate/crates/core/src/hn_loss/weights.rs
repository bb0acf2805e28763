use super::batch::{dot, LossBatch, LossError, LossParams, Matrix};

/// Scaled similarities: `pair[i][j] = v_i·t_j / tau`, `generated[i][k] = v_i·g_ik / tau`.
pub(crate) struct Logits {
    pub n: usize,
    pub pair: Vec<f64>,
    pub generated: Vec<Vec<f64>>,
}

impl Logits {
    pub fn new(batch: &LossBatch, tau: f64) -> Self {
        let n = batch.len();
        let (v, t) = (batch.video(), batch.text());
        let mut pair = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                pair[i * n + j] = dot(v.row(i), t.row(j)) / tau;
            }
        }
        let generated = (0..n)
            .map(|i| {
                let g = &batch.generated()[i];
                (0..g.rows()).map(|k| dot(v.row(i), g.row(k)) / tau).collect()
            })
            .collect();
        Logits { n, pair, generated }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.pair[i * self.n + j]
    }
}

pub(crate) fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Hardness weights of one batch, stored as logarithms.
///
/// In-batch matrices are `N x N` with a `-inf` diagonal (an item is never its own negative).
/// With a single item the weight sets are empty.
#[derive(Debug, Clone, PartialEq)]
pub struct HnWeights {
    pub(crate) log_v2t: Matrix,
    pub(crate) log_v2t_generated: Vec<Vec<f64>>,
    pub(crate) log_t2v: Matrix,
}

impl HnWeights {
    pub fn len(&self) -> usize {
        self.log_v2t.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Weight of text `j` as a negative for video anchor `i` (zero on the diagonal).
    pub fn v2t(&self, i: usize, j: usize) -> f64 {
        self.log_v2t.get(i, j).exp()
    }

    /// Weight of the `k`-th generated negative of item `i`.
    pub fn v2t_generated(&self, i: usize, k: usize) -> f64 {
        self.log_v2t_generated[i][k].exp()
    }

    /// Weight of video `j` as a negative for text anchor `i` (zero on the diagonal).
    pub fn t2v(&self, j: usize, i: usize) -> f64 {
        self.log_t2v.get(j, i).exp()
    }

    pub fn log_v2t(&self, i: usize, j: usize) -> f64 {
        self.log_v2t.get(i, j)
    }

    pub fn log_v2t_generated(&self, i: usize, k: usize) -> f64 {
        self.log_v2t_generated[i][k]
    }

    pub fn log_t2v(&self, j: usize, i: usize) -> f64 {
        self.log_t2v.get(j, i)
    }

    pub fn generated_count(&self, i: usize) -> usize {
        self.log_v2t_generated[i].len()
    }
}

/// Computes the hardness weights for `batch`.
pub fn hn_nce_weights(batch: &LossBatch, params: &LossParams) -> Result<HnWeights, LossError> {
    params.check()?;
    let logits = Logits::new(batch, params.tau);
    weights_from_logits(batch, &logits, params.beta)
}

pub(crate) fn weights_from_logits(
    batch: &LossBatch,
    logits: &Logits,
    beta: f64,
) -> Result<HnWeights, LossError> {
    let n = logits.n;
    if n == 1 && batch.generated_count(0) > 0 {
        return Err(LossError::EmptyNormalizer(0));
    }
    let mut log_v2t = Matrix::from_flat(n, n, vec![f64::NEG_INFINITY; n * n])?;
    let mut log_t2v = Matrix::from_flat(n, n, vec![f64::NEG_INFINITY; n * n])?;
    let mut log_v2t_generated = Vec::with_capacity(n);

    for i in 0..n {
        let others = (0..n).filter(move |&m| m != i);
        let gen_count = batch.generated_count(i);

        // video anchor i, normalized over texts m != i
        let norm = log_sum_exp(others.clone().map(|m| logits.at(i, m)));
        let scale = ((n + gen_count - 1) as f64).ln();
        for j in others.clone() {
            log_v2t.row_mut(i)[j] = scale + beta * logits.at(i, j) - norm;
        }
        log_v2t_generated.push(
            logits.generated[i]
                .iter()
                .map(|&g| scale + beta * g - norm)
                .collect(),
        );

        // text anchor i, normalized over videos m != i
        let norm = log_sum_exp(others.clone().map(|m| logits.at(m, i)));
        let scale = ((n - 1) as f64).ln();
        for j in others {
            log_t2v.row_mut(j)[i] = scale + beta * logits.at(j, i) - norm;
        }
    }
    Ok(HnWeights {
        log_v2t,
        log_v2t_generated,
        log_t2v,
    })
}
