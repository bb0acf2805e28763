use super::batch::{LossBatch, LossError, LossParams, Matrix};
use super::dd::{dot_dd, Dd};
use super::weights::{hn_nce_weights, HnWeights};

#[derive(Debug, Clone, PartialEq)]
pub struct LossOutput {
    pub loss: f64,
    pub grad_video: Matrix,
    pub grad_text: Matrix,
    pub grad_generated: Vec<Matrix>,
}

/// `ln(1 + Σ e^y)` and the softmax probabilities `e^y_j / (1 + Σ e^y)`.
///
/// Shifting by `max(0, max y)` keeps every exponential in range.
fn softplus_sum(y: &[Dd]) -> (Dd, Vec<Dd>) {
    let shift = y.iter().copied().fold(Dd::ZERO, Dd::max_hi);
    let e: Vec<Dd> = y.iter().map(|&v| (v - shift).exp()).collect();
    let denom = e.iter().fold((-shift).exp(), |acc, &v| acc + v);
    (shift + denom.ln(), e.into_iter().map(|v| v / denom).collect())
}

/// Similarities divided by tau, with exact products and double-double sums.
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
        let generated = (0..n)
            .map(|i| {
                let g = &batch.generated()[i];
                (0..g.rows()).map(|k| dot_dd(v.row(i), g.row(k)) / tau).collect()
            })
            .collect();
        DdLogits { n, pair, generated }
    }

    fn at(&self, i: usize, j: usize) -> Dd {
        self.pair[i * self.n + j]
    }
}

struct ItemTerms {
    /// Video-to-text term: in-batch texts (skipping i) followed by generated negatives.
    v2t: (Dd, Vec<Dd>),
    /// Text-to-video term over in-batch videos (skipping i).
    t2v: (Dd, Vec<Dd>),
}

fn item_terms(logits: &DdLogits, weights: &HnWeights, i: usize) -> ItemTerms {
    let n = logits.n;
    let pos = logits.at(i, i);
    let mut y: Vec<Dd> = (0..n)
        .filter(|&j| j != i)
        .map(|j| logits.at(i, j) + weights.log_v2t(i, j) - pos)
        .collect();
    y.extend(
        logits.generated[i]
            .iter()
            .enumerate()
            .map(|(k, &g)| g + weights.log_v2t_generated(i, k) - pos),
    );
    let v2t = softplus_sum(&y);

    let y: Vec<Dd> = (0..n)
        .filter(|&j| j != i)
        .map(|j| logits.at(j, i) + weights.log_t2v(j, i) - pos)
        .collect();
    let t2v = softplus_sum(&y);
    ItemTerms { v2t, t2v }
}

fn check_weights(batch: &LossBatch, weights: &HnWeights) -> Result<(), LossError> {
    let n = batch.len();
    if weights.len() != n || (0..n).any(|i| weights.generated_count(i) != batch.generated_count(i)) {
        return Err(LossError::ShapeMismatch("weights do not match batch".into()));
    }
    Ok(())
}

/// Batch-mean loss.
pub fn hn_nce_forward(batch: &LossBatch, params: &LossParams) -> Result<f64, LossError> {
    let weights = hn_nce_weights(batch, params)?;
    Ok(forward_from_logits(&DdLogits::new(batch, params.tau), &weights))
}

/// Loss with externally fixed weights.
pub fn hn_nce_forward_with_weights(
    batch: &LossBatch,
    params: &LossParams,
    weights: &HnWeights,
) -> Result<f64, LossError> {
    params.check()?;
    check_weights(batch, weights)?;
    Ok(forward_from_logits(&DdLogits::new(batch, params.tau), weights))
}

fn forward_from_logits(logits: &DdLogits, weights: &HnWeights) -> f64 {
    let n = logits.n;
    let total = (0..n).fold(Dd::ZERO, |acc, i| {
        let t = item_terms(logits, weights, i);
        acc + t.v2t.0 + t.t2v.0
    });
    (total / n as f64).to_f64()
}

/// Loss and its gradient with respect to every embedding, holding the weights constant.
///
/// Sums are carried in double-double and rounded once, so partials that cancel to (nearly)
/// zero come out accurate relative to themselves rather than to the loss.
pub fn hn_nce_grad(batch: &LossBatch, params: &LossParams) -> Result<LossOutput, LossError> {
    let weights = hn_nce_weights(batch, params)?;
    Ok(grad_from_logits(batch, params, &weights))
}

pub fn hn_nce_grad_with_weights(
    batch: &LossBatch,
    params: &LossParams,
    weights: &HnWeights,
) -> Result<LossOutput, LossError> {
    params.check()?;
    check_weights(batch, weights)?;
    Ok(grad_from_logits(batch, params, weights))
}

/// Row-major double-double accumulator.
struct Acc {
    cols: usize,
    data: Vec<Dd>,
}

impl Acc {
    fn new(rows: usize, cols: usize) -> Self {
        Acc { cols, data: vec![Dd::ZERO; rows * cols] }
    }

    /// `row += alpha * x`
    fn axpy(&mut self, row: usize, alpha: Dd, x: &[f64]) {
        let dst = &mut self.data[row * self.cols..(row + 1) * self.cols];
        for (y, &xi) in dst.iter_mut().zip(x) {
            *y = *y + alpha * xi;
        }
    }

    fn finish(self, rows: usize) -> Matrix {
        let flat = self.data.into_iter().map(Dd::to_f64).collect();
        Matrix::from_flat(rows, self.cols, flat).expect("accumulator shape")
    }
}

fn grad_from_logits(batch: &LossBatch, params: &LossParams, weights: &HnWeights) -> LossOutput {
    let n = batch.len();
    let d = batch.dim();
    let logits = DdLogits::new(batch, params.tau);
    let (v, t, g) = (batch.video(), batch.text(), batch.generated());
    let mut grad_video = Acc::new(n, d);
    let mut grad_text = Acc::new(n, d);
    let mut grad_generated: Vec<Acc> = g.iter().map(|m| Acc::new(m.rows(), d)).collect();
    // d(x_ij)/d(v_i) = t_j / tau, and the batch mean contributes 1/n
    let c = Dd::ONE / (n as f64 * params.tau);
    let mut total = Dd::ZERO;

    for i in 0..n {
        let terms = item_terms(&logits, weights, i);
        total = total + terms.v2t.0 + terms.t2v.0;

        // video -> text
        let probs = &terms.v2t.1;
        let in_batch = (0..n).filter(|&j| j != i);
        let mass = probs.iter().fold(Dd::ZERO, |a, &p| a + p);
        for (&p, j) in probs.iter().zip(in_batch.clone()) {
            grad_video.axpy(i, c * p, t.row(j));
            grad_text.axpy(j, c * p, v.row(i));
        }
        for (k, &p) in probs[n - 1..].iter().enumerate() {
            grad_video.axpy(i, c * p, g[i].row(k));
            grad_generated[i].axpy(k, c * p, v.row(i));
        }
        grad_video.axpy(i, -(c * mass), t.row(i));
        grad_text.axpy(i, -(c * mass), v.row(i));

        // text -> video
        let probs = &terms.t2v.1;
        let mass = probs.iter().fold(Dd::ZERO, |a, &p| a + p);
        for (&p, j) in probs.iter().zip(in_batch) {
            grad_text.axpy(i, c * p, v.row(j));
            grad_video.axpy(j, c * p, t.row(i));
        }
        grad_text.axpy(i, -(c * mass), v.row(i));
        grad_video.axpy(i, -(c * mass), t.row(i));
    }

    LossOutput {
        loss: (total / n as f64).to_f64(),
        grad_video: grad_video.finish(n),
        grad_text: grad_text.finish(n),
        grad_generated: grad_generated
            .into_iter()
            .zip(g)
            .map(|(a, m)| a.finish(m.rows()))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn batch(v: Vec<Vec<f64>>, t: Vec<Vec<f64>>, g: Vec<Vec<Vec<f64>>>) -> LossBatch {
        LossBatch::new(
            Matrix::from_rows(v).unwrap(),
            Matrix::from_rows(t).unwrap(),
            g.into_iter().map(|m| Matrix::from_rows(m).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_item_is_zero_with_zero_gradients() {
        let b = batch(vec![vec![0.3, -2.0]], vec![vec![1.5, 0.2]], vec![]);
        let out = hn_nce_grad(&b, &LossParams::new(0.05, 0.5).unwrap()).unwrap();
        assert_eq!(out.loss, 0.0);
        assert!(out.grad_video.as_slice().iter().all(|&x| x == 0.0));
        assert!(out.grad_text.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn generated_negative_increases_loss() {
        let v = vec![vec![0.5, 0.1], vec![-0.2, 0.7]];
        let t = vec![vec![0.4, 0.3], vec![0.1, 0.9]];
        let params = LossParams::new(0.1, 0.5).unwrap();
        let base = hn_nce_forward(&batch(v.clone(), t.clone(), vec![]), &params).unwrap();
        let with = hn_nce_forward(
            &batch(v, t, vec![vec![vec![0.45, 0.25]], vec![]]),
            &params,
        )
        .unwrap();
        assert!(with > base, "{with} <= {base}");
    }

    #[test]
    fn forward_and_grad_agree_on_value() {
        let b = batch(
            vec![vec![0.5, 0.1], vec![-0.2, 0.7], vec![0.3, -0.3]],
            vec![vec![0.4, 0.3], vec![0.1, 0.9], vec![-0.5, 0.2]],
            vec![vec![vec![0.4, 0.2]], vec![], vec![vec![0.0, 1.0], vec![1.0, 0.0]]],
        );
        let p = LossParams::new(0.2, 1.3).unwrap();
        assert_eq!(hn_nce_forward(&b, &p).unwrap(), hn_nce_grad(&b, &p).unwrap().loss);
    }

    #[test]
    fn extreme_logits_stay_finite() {
        let b = batch(
            vec![vec![100.0, 0.0], vec![0.0, -100.0]],
            vec![vec![-100.0, 0.0], vec![0.0, 100.0]],
            vec![vec![vec![100.0, 0.0]], vec![vec![0.0, -100.0]]],
        );
        let p = LossParams::new(0.01, 2.0).unwrap();
        let out = hn_nce_grad(&b, &p).unwrap();
        assert!(out.loss.is_finite() && out.loss >= 0.0);
        assert!(out.grad_video.as_slice().iter().all(|x| x.is_finite()));
        assert!(out.grad_generated.iter().all(|m| m.as_slice().iter().all(|x| x.is_finite())));
    }

    #[test]
    fn softplus_sum_small_and_large() {
        let (v, p) = softplus_sum(&[]);
        assert_eq!(v.to_f64(), 0.0);
        assert!(p.is_empty());
        let (v, _) = softplus_sum(&[Dd::from(-700.0)]);
        assert!(v.to_f64() > 0.0 && v.to_f64() < 1e-300);
        let (v, p) = softplus_sum(&[Dd::from(800.0)]);
        assert!((v.to_f64() - 800.0).abs() < 1e-12);
        assert!((p[0].to_f64() - 1.0).abs() < 1e-15);
    }
}
