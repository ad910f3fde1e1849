//! Numerically stable power mean M_s and its gradient for strongly
//! negative s.
//!
//! M_s(y) = ((1/k) sum y_i^s)^(1/s). Both routines factor out m = min(y)
//! and work with the ratios r_i = y_i / m: for s < 0 the smallest entry
//! dominates, so every r_i^s lies in (0, 1] and s = -100 neither overflows
//! nor underflows the result. Rescaling is exact for the mean itself
//! (homogeneity) and for the gradient (zero-homogeneity).

use crate::error::{Error, Result};

fn validate(y: &[f64], s: f64) -> Result<()> {
    if y.is_empty() {
        return Err(Error::Domain("empty input vector".into()));
    }
    if !s.is_finite() || s == 0.0 || s > 1.0 {
        return Err(Error::Domain(format!(
            "power must be finite, nonzero, and <= 1, got {s}"
        )));
    }
    for (i, v) in y.iter().enumerate() {
        if !(*v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!(
                "entry {i} must be positive and finite, got {v}"
            )));
        }
    }
    Ok(())
}

/// The power mean M_s(y) for positive y and s in (-inf, 1] \ {0}.
/// Always lies in [min(y), max(y)].
pub fn power_mean(y: &[f64], s: f64) -> Result<f64> {
    validate(y, s)?;
    Ok(power_mean_raw(y, s))
}

pub(crate) fn power_mean_raw(y: &[f64], s: f64) -> f64 {
    let m = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let k = y.len() as f64;
    let mut acc = 0.0;
    for &v in y {
        acc += (v / m).powf(s);
    }
    m * (acc / k).powf(1.0 / s)
}

/// Gradient of M_s at y: component j is ((1/k) sum y_i^s)^(1/s - 1) * (1/k) y_j^(s-1).
/// All components are positive; they sum to 1 at a constant vector.
pub fn power_mean_gradient(y: &[f64], s: f64) -> Result<Vec<f64>> {
    validate(y, s)?;
    let mut out = vec![0.0; y.len()];
    power_mean_gradient_into(y, s, &mut out);
    Ok(out)
}

/// Same computation without allocation or validation; `out` receives the
/// gradient row. In rescaled form: grad_j = (1/k) r_j^(s-1) A^(1/s - 1)
/// with r_j = y_j/min(y) and A = (1/k) sum r_i^s.
pub(crate) fn power_mean_gradient_into(y: &[f64], s: f64, out: &mut [f64]) {
    debug_assert_eq!(y.len(), out.len());
    let m = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let k = y.len() as f64;
    let mut acc = 0.0;
    for (o, &v) in out.iter_mut().zip(y) {
        let rs = (v / m).powf(s);
        acc += rs;
        // r^(s-1) = r^s / r
        *o = rs / (v / m);
    }
    let a = acc / k;
    let scale = a.powf(1.0 / s - 1.0) / k;
    for o in out.iter_mut() {
        *o *= scale;
    }
}
