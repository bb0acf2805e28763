use serde::{Deserialize, Serialize};

use super::batch::{LossBatch, LossError, LossParams, Matrix};
use super::forward::hn_nce_forward;
use super::gradcheck::finite_diff_check;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelfTestInput {
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(rename = "V")]
    pub video: Vec<Vec<f64>>,
    #[serde(rename = "T")]
    pub text: Vec<Vec<f64>>,
    #[serde(rename = "G", default)]
    pub generated: Vec<Vec<Vec<f64>>>,
}

fn default_tau() -> f64 {
    LossParams::default().tau
}

fn default_beta() -> f64 {
    LossParams::default().beta
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTestOutput {
    pub loss: f64,
    pub fd_max_rel_err: f64,
}

/// Evaluates the loss on a literal batch and checks its gradient with step `h`.
pub fn run_selftest(input: &SelfTestInput, h: f64) -> Result<SelfTestOutput, LossError> {
    let params = LossParams::new(input.tau, input.beta)?;
    let generated = input
        .generated
        .iter()
        .map(|g| Matrix::from_rows(g.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let batch = LossBatch::new(
        Matrix::from_rows(input.video.clone())?,
        Matrix::from_rows(input.text.clone())?,
        generated,
    )?;
    Ok(SelfTestOutput {
        loss: hn_nce_forward(&batch, &params)?,
        fd_max_rel_err: finite_diff_check(&batch, &params, h)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_wire_format() {
        let input: SelfTestInput = serde_json::from_str(
            r#"{"tau":0.1,"beta":0.5,"V":[[1,0],[0,1]],"T":[[0.9,0.1],[0.2,0.8]],"G":[[[0.8,0.3]],[]]}"#,
        )
        .unwrap();
        let out = run_selftest(&input, 1e-5).unwrap();
        assert!(out.loss > 0.0);
        assert!(out.fd_max_rel_err < 1e-6, "{}", out.fd_max_rel_err);
        let json = serde_json::to_value(&out).unwrap();
        assert!(json.get("loss").is_some() && json.get("fd_max_rel_err").is_some());
    }
}
