//! Hard-negative noise-contrastive video/text alignment loss.
//!
//! For a batch of `N` paired embeddings `(v_i, t_i)` with per-item generated hard negatives
//! `g_ik`, and logits `x_ij = v_i·t_j / tau`, the per-item loss is
//!
//! ```text
//! L_i = -log  e^{x_ii} / (e^{x_ii} + Σ_{j≠i} w_ij e^{x_ij} + Σ_k w_ik e^{v_i·g_ik/tau})
//!       -log  e^{x_ii} / (e^{x_ii} + Σ_{j≠i} u_ji e^{x_ji})
//! ```
//!
//! with hardness weights
//!
//! ```text
//! w_ij = (N + G_i - 1) e^{beta x_ij} / Σ_{m≠i} e^{x_im}
//! u_ji = (N - 1)       e^{beta x_ji} / Σ_{m≠i} e^{x_mi}
//! ```
//!
//! Generated-negative weights `w_ik` use the first formula with `g_ik` in the numerator; the
//! normalizers run over in-batch texts only. The batch loss is the mean of `L_i`. Weights
//! are treated as constants when differentiating.

mod batch;
mod dd;
mod forward;
mod gradcheck;
mod selftest;
mod weights;

pub use batch::{unit_normalize, LossBatch, LossError, LossParams, Matrix};
pub use forward::{hn_nce_forward, hn_nce_forward_with_weights, hn_nce_grad, hn_nce_grad_with_weights, LossOutput};
pub use gradcheck::{finite_diff_check, finite_diff_check_against};
pub use selftest::{run_selftest, SelfTestInput, SelfTestOutput};
pub use weights::{hn_nce_weights, HnWeights};
