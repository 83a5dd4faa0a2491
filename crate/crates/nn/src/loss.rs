//! Training loss on raw channels.

use crate::error::{NnError, Result};
use crate::tensor::CMat;

/// Batch mean of `sum |H - H_hat|^2` over the entries selected by `mask`
/// (all entries when `None`), together with its cotangent with respect to
/// the prediction.
pub fn squared_error(pred: &CMat, target: &CMat, mask: Option<&[bool]>) -> Result<(f64, CMat)> {
    if pred.rows != target.rows || pred.cols != target.cols {
        return Err(NnError::Shape {
            context: "loss target",
            expected: vec![pred.rows, pred.cols],
            got: vec![target.rows, target.cols],
        });
    }
    if let Some(m) = mask {
        if m.len() != pred.cols {
            return Err(NnError::Shape {
                context: "loss mask",
                expected: vec![pred.cols],
                got: vec![m.len()],
            });
        }
    }
    let n = pred.rows.max(1) as f64;
    let mut grad = CMat::zeros(pred.rows, pred.cols);
    let mut total = 0.0;
    for t in 0..pred.re.len() {
        if mask.is_some_and(|m| !m[t % pred.cols]) {
            continue;
        }
        let er = pred.re[t] - target.re[t];
        let ei = pred.im[t] - target.im[t];
        total += er * er + ei * ei;
        grad.re[t] = 2.0 * er / n;
        grad.im[t] = 2.0 * ei / n;
    }
    Ok((total / n, grad))
}
