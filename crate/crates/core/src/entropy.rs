//! Information measures of the selection index `T`.

use crate::error::{Error, Result};
use crate::joint::FiniteJointInstance;

/// Tolerance on the total mass of a [`SelectionMarginal`].
pub const MARGINAL_SUM_TOLERANCE: f64 = 1e-12;

/// A marginal is treated as deterministic when its largest entry is at least
/// `1 − DETERMINISTIC_TOLERANCE`.
pub const DETERMINISTIC_TOLERANCE: f64 = 1e-12;

/// The law `P_T` of the selected index over `{0, …, n−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionMarginal {
    probs: Vec<f64>,
}

impl SelectionMarginal {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("a marginal needs at least one entry".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidDistribution(format!("P_T({i}) = {p} is outside [0, 1]")));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MARGINAL_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("marginal sums to {total}, not 1")));
        }
        Ok(SelectionMarginal { probs })
    }

    /// Rescales `probs` to sum to one, provided the drift from one is at most
    /// `max_drift`.
    pub fn renormalized(probs: Vec<f64>, max_drift: f64) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if !((total - 1.0).abs() <= max_drift) {
            return Err(Error::InvalidDistribution(format!(
                "marginal sums to {total}; drift exceeds {max_drift}"
            )));
        }
        if probs.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidDistribution("negative probability".into()));
        }
        Self::new(probs.into_iter().map(|p| (p / total).min(1.0)).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("n must be at least 1".into()));
        }
        Ok(SelectionMarginal {
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn one_hot(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidDistribution(format!("index {index} out of range for n = {n}")));
        }
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Ok(SelectionMarginal { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_deterministic(&self) -> bool {
        self.max_prob() >= 1.0 - DETERMINISTIC_TOLERANCE
    }
}

/// `H(T) = Σ p ln(1/p)` in nats, with `0 ln(1/0) = 0`.
pub fn shannon_entropy(m: &SelectionMarginal) -> f64 {
    m.probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// `min_{x ∈ [0,1]} a(1−x)^q + (1−a)x^q` in closed form, with its minimizer.
///
/// For `q > 1` the value is `(a^{1/(1−q)} + (1−a)^{1/(1−q)})^{1−q}`, evaluated
/// as `m (1 + (M/m)^{1/(1−q)})^{1−q}` with `m = min(a, 1−a)` and
/// `M = max(a, 1−a)` so that no power overflows near `q = 1`. The minimizer
/// solves `x/(1−x) = (a/(1−a))^{1/(q−1)}`. For `q = 1` the objective is
/// linear and the minimum `min(a, 1−a)` sits at `x = 0` (ties) or `x = 1`.
pub fn pointwise_min_term(a: f64, q: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain {
            what: "a",
            expected: "in [0, 1]",
            value: a,
        });
    }
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::Domain {
            what: "q",
            expected: "a finite number >= 1",
            value: q,
        });
    }
    if a == 0.0 {
        return Ok((0.0, 0.0));
    }
    if a == 1.0 {
        return Ok((0.0, 1.0));
    }
    if q == 1.0 {
        return Ok(if a <= 1.0 - a { (a, 0.0) } else { (1.0 - a, 1.0) });
    }
    Ok((min_term_value(a, q), min_term_argmin(a, q)))
}

fn min_term_value(a: f64, q: f64) -> f64 {
    min_term_ln(a, q).exp()
}

// Log of the minimum; for large q the value itself underflows like 2^-q.
fn min_term_ln(a: f64, q: f64) -> f64 {
    let (lo, hi) = if a <= 1.0 - a { (a, 1.0 - a) } else { (1.0 - a, a) };
    let r = 1.0 / (1.0 - q);
    let ratio = (hi / lo).powf(r);
    lo.ln() + ratio.ln_1p() / r
}

fn min_term_argmin(a: f64, q: f64) -> f64 {
    let z = (a.ln() - (1.0 - a).ln()) / (q - 1.0);
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// The functional `H(T; q)` for `q ∈ [1, ∞]` (`q = f64::INFINITY` for ∞).
///
/// * `q = ∞`: `½ · 1(H(T) ≠ 0)`,
/// * `1 < q < ∞`: `(Σ_t (P^{1/(1−q)} + (1−P)^{1/(1−q)})^{1−q})^{1/q}`,
/// * `q = 1`: `Σ_t min(P, 1−P)`.
///
/// A marginal within [`DETERMINISTIC_TOLERANCE`] of a point mass counts as
/// deterministic and yields exactly 0 on every branch.
pub fn h_q(m: &SelectionMarginal, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::Domain {
            what: "q",
            expected: ">= 1 or inf",
            value: q,
        });
    }
    if m.is_deterministic() {
        return Ok(0.0);
    }
    if q == f64::INFINITY {
        return Ok(0.5);
    }
    // Both branches are at most Σ P = 1 exactly; the clamp only removes roundoff.
    if q == 1.0 {
        return Ok(m.probs.iter().map(|&p| p.min(1.0 - p)).sum::<f64>().min(1.0));
    }
    Ok(ln_h_q(m, q)?.exp())
}

/// `ln H(T; q)` for finite `q > 1`, computed without forming the terms, so
/// it stays accurate where `H(T; q)` itself is tiny or where it is combined
/// with other factors in log space. `-inf` for deterministic `T`.
pub fn ln_h_q(m: &SelectionMarginal, q: f64) -> Result<f64> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::Domain {
            what: "q",
            expected: "a finite number > 1",
            value: q,
        });
    }
    if m.is_deterministic() {
        return Ok(f64::NEG_INFINITY);
    }
    let logs: Vec<f64> = m
        .probs
        .iter()
        .filter(|&&p| p > 0.0 && p < 1.0)
        .map(|&p| min_term_ln(p, q))
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rest: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    Ok(((top + rest.ln()) / q).min(0.0))
}

/// `|H(T; q_large) − H(T; ∞)|`: how far the finite-`q` formula is from the
/// `q = ∞` branch at a large exponent. Reported as a diagnostic only.
pub fn h_infinity_gap(m: &SelectionMarginal, q_large: f64) -> Result<f64> {
    Ok((h_q(m, q_large)? - h_q(m, f64::INFINITY)?).abs())
}

/// `I(T; Z)` in nats for a finite joint law.
///
/// Support points with identical coordinates are merged first, so that the
/// result is the information about the value of `Z`, not about the label of
/// the support point.
pub fn mutual_information(joint: &FiniteJointInstance) -> f64 {
    let merged = joint.merged_support();
    let marginal = merged.selection_marginal();
    let mut total = 0.0;
    for (k, &pz) in merged.z_probs().iter().enumerate() {
        for (i, &kernel) in merged.kernel_row(k).iter().enumerate() {
            let cell = pz * kernel;
            if cell > 0.0 {
                // p(z,t) ln(p(z,t) / (p(z) p(t))) = p(z,t) ln(kernel / p(t)).
                total += cell * (kernel / marginal.probs[i]).ln();
            }
        }
    }
    total.max(0.0)
}
