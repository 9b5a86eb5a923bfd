//! TREC-style utility metrics and paired significance testing.
//!
//! T11U = 2R⁺ − N⁺; T11SU is its normalization into [0,1] with floor
//! MinNU = −0.5, so delivering nothing scores exactly 1/3.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MIN_NU: f64 = -0.5;

/// Delivery confusion counts for one topic run.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    /// R⁺: relevant documents delivered.
    pub relevant_delivered: u64,
    /// N⁺: non-relevant documents delivered.
    pub nonrelevant_delivered: u64,
    /// Relevant documents in the test stream.
    pub relevant_total: u64,
}

impl ConfusionCounts {
    pub fn delivered(&self) -> u64 {
        self.relevant_delivered + self.nonrelevant_delivered
    }
}

/// T11U = 2R⁺ − N⁺.
pub fn t11u(c: &ConfusionCounts) -> i64 {
    2 * c.relevant_delivered as i64 - c.nonrelevant_delivered as i64
}

/// Normalized utility in [0,1]. Undefined (None) when the stream holds
/// no relevant documents; such topics are excluded from macro averages.
pub fn t11su<S: Scalar>(c: &ConfusionCounts) -> Option<S> {
    if c.relevant_total == 0 {
        return None;
    }
    let max_u = 2.0 * c.relevant_total as f64;
    let ratio = t11u(c) as f64 / max_u;
    Some(S::c((ratio.max(MIN_NU) - MIN_NU) / (1.0 - MIN_NU)))
}

/// How topics with zero deliveries contribute to macro-precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroDeliveryPolicy {
    /// Count precision as 0 (default).
    Zero,
    /// Leave the topic out of the precision mean.
    Exclude,
}

pub fn precision(c: &ConfusionCounts, policy: ZeroDeliveryPolicy) -> Option<f64> {
    let delivered = c.delivered();
    if delivered == 0 {
        match policy {
            ZeroDeliveryPolicy::Zero => Some(0.0),
            ZeroDeliveryPolicy::Exclude => None,
        }
    } else {
        Some(c.relevant_delivered as f64 / delivered as f64)
    }
}

pub fn recall(c: &ConfusionCounts) -> Option<f64> {
    if c.relevant_total == 0 {
        None
    } else {
        Some(c.relevant_delivered as f64 / c.relevant_total as f64)
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Unweighted macro means of per-topic precision and recall.
pub fn macro_prec_recall(
    counts: &[ConfusionCounts],
    policy: ZeroDeliveryPolicy,
) -> (f64, f64) {
    let precisions: Vec<f64> = counts.iter().filter_map(|c| precision(c, policy)).collect();
    let recalls: Vec<f64> = counts.iter().filter_map(recall).collect();
    (mean(&precisions), mean(&recalls))
}

// --- Student-t CDF via the regularized incomplete beta function -----------

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7; coefficients kept at full published
    // precision
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut a = COEF[0];
        let t = x + 7.5;
        for (i, c) in COEF.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const FPMIN: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
pub fn betai(a: f64, b: f64, x: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x), "x out of range");
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let bt =
        (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        bt * betacf(a, b, x) / a
    } else {
        1.0 - bt * betacf(b, a, 1.0 - x) / b
    }
}

/// Two-sided paired t-test p-value over per-topic metric values.
pub fn paired_t_test(values_a: &[f64], values_b: &[f64]) -> Result<f64> {
    if values_a.len() != values_b.len() {
        return Err(Error::Degenerate(
            "paired t-test needs equal-length vectors".to_string(),
        ));
    }
    let n = values_a.len();
    if n < 2 {
        return Err(Error::Degenerate(
            "paired t-test needs at least 2 topics".to_string(),
        ));
    }
    let diffs: Vec<f64> = values_a
        .iter()
        .zip(values_b.iter())
        .map(|(a, b)| a - b)
        .collect();
    let d_mean = mean(&diffs);
    let var = diffs.iter().map(|d| (d - d_mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    if var == 0.0 {
        return Err(Error::Degenerate(
            "zero variance of paired differences".to_string(),
        ));
    }
    let t = d_mean / (var / n as f64).sqrt();
    let nu = n as f64 - 1.0;
    // two-sided: P(|T| ≥ |t|) = I_{ν/(ν+t²)}(ν/2, 1/2)
    Ok(betai(nu / 2.0, 0.5, nu / (nu + t * t)))
}

/// Per-topic metric row for reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopicMetrics {
    pub topic_id: String,
    pub t11u: i64,
    pub t11su: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub delivered: u64,
}
