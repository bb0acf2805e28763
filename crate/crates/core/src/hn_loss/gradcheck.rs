use super::batch::{LossBatch, LossError, LossParams};
use super::dd::{dot_dd, Dd};
use super::forward::{hn_nce_grad_with_weights, LossOutput};
use super::weights::{hn_nce_weights, HnWeights};
use crate::exec::Exec;

/// Largest relative error between the analytic gradient and central differences with
/// step `h`, over every embedding entry. Weights are frozen at the unperturbed batch,
/// matching the gradient's contract.
///
/// The difference quotients come from a separate double-double evaluation of the loss, so
/// partials far below the loss magnitude are resolved instead of drowning in f64 round-off.
pub fn finite_diff_check(batch: &LossBatch, params: &LossParams, h: f64) -> Result<f64, LossError> {
    let weights = hn_nce_weights(batch, params)?;
    let analytic = hn_nce_grad_with_weights(batch, params, &weights)?;
    finite_diff_check_against(batch, params, h, &analytic, Exec::default())
}

#[derive(Clone, Copy)]
enum Block {
    Video,
    Text,
    Generated(usize),
}

/// Compares a supplied gradient against central differences.
///
/// The relative error of each entry is `|a - n| / max(|a|, |n|, 1e-12)`.
pub fn finite_diff_check_against(
    batch: &LossBatch,
    params: &LossParams,
    h: f64,
    analytic: &LossOutput,
    exec: Exec,
) -> Result<f64, LossError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(LossError::InvalidStep(h));
    }
    let weights = hn_nce_weights(batch, params)?;
    let d = batch.dim();

    let mut entries: Vec<(Block, usize, f64)> = Vec::new();
    for (idx, &a) in analytic.grad_video.as_slice().iter().enumerate() {
        entries.push((Block::Video, idx, a));
    }
    for (idx, &a) in analytic.grad_text.as_slice().iter().enumerate() {
        entries.push((Block::Text, idx, a));
    }
    for (i, g) in analytic.grad_generated.iter().enumerate() {
        for (idx, &a) in g.as_slice().iter().enumerate() {
            entries.push((Block::Generated(i), idx, a));
        }
    }
    let expected = batch.len() * d * 2 + (0..batch.len()).map(|i| batch.generated_count(i) * d).sum::<usize>();
    if entries.len() != expected {
        return Err(LossError::ShapeMismatch("gradient does not match batch".into()));
    }

    let n = batch.len();
    let base = DdLogits::new(batch, params.tau);
    let tau = Dd::from(params.tau);
    let errors = exec.map_slice(&entries, |&(block, idx, a)| {
        // perturbing one entry moves a known set of logits by an exact double-double
        // amount, and only the per-item terms that read those logits change
        let (row, c) = (idx / d, idx % d);
        let affected = |delta: f64| {
            let mut l = base.clone();
            let shift = |x: f64| Dd::from(x) * delta / tau;
            let mut sum = Dd::ZERO;
            match block {
                Block::Video => {
                    for j in 0..n {
                        l.pair[row * n + j] = l.pair[row * n + j] + shift(batch.text().get(j, c));
                    }
                    for (k, x) in l.generated[row].iter_mut().enumerate() {
                        *x = *x + shift(batch.generated()[row].get(k, c));
                    }
                    sum = sum + l.v2t(&weights, row);
                    for j in 0..n {
                        sum = sum + l.t2v(&weights, j);
                    }
                }
                Block::Text => {
                    for i in 0..n {
                        l.pair[i * n + row] = l.pair[i * n + row] + shift(batch.video().get(i, c));
                    }
                    for i in 0..n {
                        sum = sum + l.v2t(&weights, i);
                    }
                    sum = sum + l.t2v(&weights, row);
                }
                Block::Generated(i) => {
                    l.generated[i][row] = l.generated[i][row] + shift(batch.video().get(i, c));
                    sum = sum + l.v2t(&weights, i);
                }
            }
            sum
        };
        let numeric = ((affected(h) - affected(-h)) / (2.0 * h * n as f64)).to_f64();
        let denom = a.abs().max(numeric.abs()).max(1e-12);
        (a - numeric).abs() / denom
    });
    Ok(errors.into_iter().fold(0.0, f64::max))
}

/// Logits `v_i·t_j / tau` and `v_i·g_ik / tau` in double-double.
#[derive(Clone)]
struct DdLogits {
    n: usize,
    pair: Vec<Dd>,
    generated: Vec<Vec<Dd>>,
}

impl DdLogits {
    fn new(batch: &LossBatch, tau: f64) -> Self {
        let n = batch.len();
        let (v, t) = (batch.video(), batch.text());
        let mut pair = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                pair.push(dot_dd(v.row(i), t.row(j)) / tau);
            }
        }
        let generated = batch
            .generated()
            .iter()
            .enumerate()
            .map(|(i, g)| (0..g.rows()).map(|k| dot_dd(v.row(i), g.row(k)) / tau).collect())
            .collect();
        DdLogits { n, pair, generated }
    }

    fn at(&self, i: usize, j: usize) -> Dd {
        self.pair[i * self.n + j]
    }

    /// Video-to-text term of item `i`.
    fn v2t(&self, weights: &HnWeights, i: usize) -> Dd {
        let pos = self.at(i, i);
        let mut y: Vec<Dd> = (0..self.n)
            .filter(|&j| j != i)
            .map(|j| self.at(i, j) + weights.log_v2t(i, j) - pos)
            .collect();
        for (k, &g) in self.generated[i].iter().enumerate() {
            y.push(g + weights.log_v2t_generated(i, k) - pos);
        }
        softplus_sum_dd(&y)
    }

    /// Text-to-video term of item `i`.
    fn t2v(&self, weights: &HnWeights, i: usize) -> Dd {
        let pos = self.at(i, i);
        let y: Vec<Dd> = (0..self.n)
            .filter(|&j| j != i)
            .map(|j| self.at(j, i) + weights.log_t2v(j, i) - pos)
            .collect();
        softplus_sum_dd(&y)
    }

    #[cfg(test)]
    fn mean_loss(&self, weights: &HnWeights) -> Dd {
        let total = (0..self.n).fold(Dd::ZERO, |acc, i| acc + self.v2t(weights, i) + self.t2v(weights, i));
        total / self.n as f64
    }
}

/// `ln(1 + Σ e^y)`.
fn softplus_sum_dd(y: &[Dd]) -> Dd {
    let shift = y.iter().copied().fold(Dd::ZERO, Dd::max_hi);
    let sum = y
        .iter()
        .fold((-shift).exp(), |acc, &v| acc + (v - shift).exp());
    shift + sum.ln()
}
