use super::ConfidenceMethod;
use crate::error::{Error, Result};

/// Confidence that evidence `E` selects sense `S`.
///
/// `f_joint` counts labeled contexts with `E` and sense `S`, `f_labeled`
/// labeled contexts with `E`, `f_total` all contexts with `E`. The ratio
/// methods return 0 when their denominator is 0.
pub fn confidence(f_joint: u32, f_labeled: u32, f_total: u32, method: ConfidenceMethod) -> Result<f64> {
    if f_joint > f_labeled || f_labeled > f_total {
        return Err(Error::Contract(format!(
            "confidence needs f_joint <= f_labeled <= f_total, got ({f_joint}, {f_labeled}, {f_total})"
        )));
    }
    Ok(confidence_unchecked(f_joint, f_labeled, f_total, method))
}

pub(crate) fn confidence_unchecked(f_joint: u32, f_labeled: u32, f_total: u32, method: ConfidenceMethod) -> f64 {
    match method {
        ConfidenceMethod::RestrictedRatio => ratio(f_joint, f_labeled),
        ConfidenceMethod::Ml => ratio(f_joint, f_total),
        ConfidenceMethod::Smoothed => smoothed(f_joint, f_total),
        ConfidenceMethod::LogOdds => log_odds(f_joint, f_total),
    }
}

fn ratio(num: u32, den: u32) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn smoothed(f_joint: u32, f_total: u32) -> f64 {
    (f_joint as f64 + 1.0) / (f_total as f64 + 2.0)
}

/// Log-odds of the smoothed estimate `p = (f_joint + 1) / (f_total + 2)`.
///
/// `p / (1 - p)` reduces to `(f_joint + 1) / (f_total - f_joint + 1)`, which
/// is finite for every admissible count pair.
pub fn log_odds(f_joint: u32, f_total: u32) -> f64 {
    let odds = (f_joint as f64 + 1.0) / ((f_total - f_joint) as f64 + 1.0);
    odds.ln()
}
