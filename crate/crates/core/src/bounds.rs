//! Upper bounds on `E[Z_T]` (or `|E[Z_T]|`).
//!
//! The classical bounds need only `n`; the generalized ones additionally use
//! either the full conditional law of `T` given `Z` or just its marginal.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::entropy::{ln_h_q, SelectionMarginal};
use crate::error::{ensure_positive, Error, Result};
use crate::extended::ExtendedReal;
use crate::joint::FiniteJointInstance;
use crate::optimize::{golden_section, minimize_on_ray, RAY_CAP_HIGH};
use crate::orlicz::{OrliczSpec, YoungFunction};
use crate::rv::{amemiya_norm_with_scale, EmpiricalRV};

/// Width to which the `a` searches are run.
pub const A_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundName {
    MgfClassical,
    OrliczClassical,
    SoftMI,
    SoftEntropy,
    Thm1Conditional,
    Thm1Marginal,
    PnormConditional,
    PnormMarginalHq,
    P1Special,
}

impl BoundName {
    pub const ALL: [BoundName; 9] = [
        BoundName::MgfClassical,
        BoundName::OrliczClassical,
        BoundName::SoftMI,
        BoundName::SoftEntropy,
        BoundName::Thm1Conditional,
        BoundName::Thm1Marginal,
        BoundName::PnormConditional,
        BoundName::PnormMarginalHq,
        BoundName::P1Special,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::MgfClassical => "MgfClassical",
            BoundName::OrliczClassical => "OrliczClassical",
            BoundName::SoftMI => "SoftMI",
            BoundName::SoftEntropy => "SoftEntropy",
            BoundName::Thm1Conditional => "Thm1Conditional",
            BoundName::Thm1Marginal => "Thm1Marginal",
            BoundName::PnormConditional => "PnormConditional",
            BoundName::PnormMarginalHq => "PnormMarginalHq",
            BoundName::P1Special => "P1Special",
        }
    }

    /// Bounds stated for `|E[Z_T]|` rather than the signed mean.
    pub fn bounds_absolute_value(self) -> bool {
        matches!(
            self,
            BoundName::Thm1Conditional
                | BoundName::Thm1Marginal
                | BoundName::PnormConditional
                | BoundName::PnormMarginalHq
                | BoundName::P1Special
        )
    }

    /// Bounds that vanish when `T` is deterministic.
    pub fn is_generalized(self) -> bool {
        !matches!(self, BoundName::MgfClassical | BoundName::OrliczClassical)
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundName::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown bound name {s:?}")))
    }
}

/// The minimizing parameters. `t` has one entry per coordinate for the
/// conditional bound (each term has its own scale), one shared entry for the
/// marginal bound, and is empty where no scale is optimized.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerState {
    pub t: Vec<f64>,
    pub a: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: BoundName,
    pub value: ExtendedReal,
    pub optimizer_state: Option<OptimizerState>,
    /// Hex SHA-256 prefix of a canonical rendering of the inputs.
    pub inputs_digest: String,
    pub diagnostics: Vec<String>,
}

impl BoundReport {
    fn new(name: BoundName, value: f64, canonical_inputs: String) -> Result<Self> {
        Ok(BoundReport {
            name,
            value: ExtendedReal::new(value.max(0.0))?,
            optimizer_state: None,
            inputs_digest: digest_hex(&canonical_inputs),
            diagnostics: Vec::new(),
        })
    }
}

/// First 16 hex digits of the SHA-256 of `text`.
pub fn digest_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn ensure_sigma(sigma: f64) -> Result<()> {
    ensure_positive("sigma", sigma)
}

fn ensure_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDistribution("n must be at least 1".into()));
    }
    Ok(())
}

fn ensure_unbounded(spec: &OrliczSpec) -> Result<()> {
    if !spec.has_unbounded_domain() {
        return Err(Error::FiniteDomain(spec.domain_bound()));
    }
    Ok(())
}

/// `E[max_i Z_i] ≤ ψ*⁻¹(ln n)` when every `ln E e^{λ Z_i} ≤ ψ(λ)`.
pub fn mgf_bound(spec: &OrliczSpec, n: usize) -> Result<BoundReport> {
    ensure_n(n)?;
    let value = spec.conjugate_inverse((n as f64).ln())?;
    BoundReport::new(BoundName::MgfClassical, value, format!("mgf|{spec}|n={n}"))
}

/// `E[max_i Z_i] ≤ σ ψ⁻¹(n)` when every `‖Z_i‖_ψ ≤ σ`.
pub fn orlicz_bound(spec: &OrliczSpec, sigma: f64, n: usize) -> Result<BoundReport> {
    ensure_n(n)?;
    ensure_sigma(sigma)?;
    let value = sigma * spec.generalized_inverse(n as f64)?;
    BoundReport::new(BoundName::OrliczClassical, value, format!("orlicz|{spec}|sigma={sigma}|n={n}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InformationKind {
    MutualInformation,
    Entropy,
}

/// `E[Z_T] ≤ ψ*⁻¹(info)` with `info = I(T; Z)` or its upper bound `H(T)`.
pub fn soft_bound(spec: &OrliczSpec, info: f64, kind: InformationKind) -> Result<BoundReport> {
    if !(info >= 0.0) {
        return Err(Error::Domain {
            what: "information",
            expected: "a nonnegative number",
            value: info,
        });
    }
    let name = match kind {
        InformationKind::MutualInformation => BoundName::SoftMI,
        InformationKind::Entropy => BoundName::SoftEntropy,
    };
    let value = spec.conjugate_inverse(info)?;
    BoundReport::new(name, value, format!("soft|{spec}|{name}|info={info}"))
}

struct ConditionalTerm {
    value: f64,
    a: f64,
    t: f64,
}

/// `min_{a ∈ [0,1]} ‖X − a‖^A_{ψ*}`: golden-section on `a` around the
/// Amemiya `t`-search.
fn conditional_term(x: &EmpiricalRV, spec: &OrliczSpec) -> Result<ConditionalTerm> {
    let conj = spec.conjugate_fn();
    if let [atom] = x.atoms() {
        // A constant conditional probability is matched exactly by a.
        return Ok(ConditionalTerm {
            value: 0.0,
            a: atom.value,
            t: f64::INFINITY,
        });
    }
    let norm_at = |a: f64| -> Result<(ExtendedReal, f64)> {
        let shifted = x.map(|v| v - a)?;
        amemiya_norm_with_scale(&shifted, &conj)
    };
    let mut failure = None;
    let best = golden_section(
        |a| match norm_at(a) {
            Ok((v, _)) => v.to_f64(),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        1.0,
        A_TOLERANCE,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let (value, t) = norm_at(best.arg)?;
    Ok(ConditionalTerm {
        value: value.to_f64(),
        a: best.arg,
        t,
    })
}

/// `σ Σ_i min_{a_i} ‖P(T = i | Z) − a_i‖^A_{ψ*}` from the laws of the
/// conditional selection probabilities.
pub fn thm1_conditional_bound_from_rvs(
    conditionals: &[EmpiricalRV],
    spec: &OrliczSpec,
    sigma: f64,
) -> Result<BoundReport> {
    ensure_sigma(sigma)?;
    ensure_unbounded(spec)?;
    ensure_n(conditionals.len())?;
    let terms: Vec<ConditionalTerm> = conditionals
        .par_iter()
        .map(|x| conditional_term(x, spec))
        .collect::<Result<_>>()?;
    let total = terms.iter().fold(0.0, |acc, term| acc + term.value);
    let canonical = conditionals
        .iter()
        .map(|x| {
            x.atoms()
                .iter()
                .map(|a| format!("{}:{}", a.value, a.weight))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";");
    let mut report = BoundReport::new(
        BoundName::Thm1Conditional,
        sigma * total,
        format!("thm1-conditional|{spec}|sigma={sigma}|{canonical}"),
    )?;
    if total.is_infinite() {
        report.diagnostics.push("no feasible scale t: the conjugate is finite only at 0".into());
    }
    report.optimizer_state = Some(OptimizerState {
        t: terms.iter().map(|x| x.t).collect(),
        a: terms.iter().map(|x| x.a).collect(),
    });
    Ok(report)
}

/// The conditional bound on an exact finite joint law.
pub fn thm1_conditional_bound(joint: &FiniteJointInstance, spec: &OrliczSpec, sigma: f64) -> Result<BoundReport> {
    thm1_conditional_bound_from_rvs(&joint.conditional_probability_rvs()?, spec, sigma)
}

/// `inf_{a ∈ [0,1]} P ψ*(t(1−a)) + (1−P) ψ*(ta)` and its minimizer.
///
/// The search is confined to the `a` for which both arguments lie in the
/// effective domain of `ψ*`, so that `0 · ∞` never arises.
fn marginal_inner(conj: &impl YoungFunction, p: f64, t: f64) -> (f64, f64) {
    let d = conj.domain_end();
    let lo = if p > 0.0 { (1.0 - d / t).max(0.0) } else { 0.0 };
    let hi = if p < 1.0 { (d / t).min(1.0) } else { 1.0 };
    if lo > hi {
        return (f64::INFINITY, f64::NAN);
    }
    let objective = |a: f64| {
        let mut v = 0.0;
        if p > 0.0 {
            v += p * conj.value(t * (1.0 - a));
        }
        if p < 1.0 {
            v += (1.0 - p) * conj.value(t * a);
        }
        v
    };
    let best = golden_section(objective, lo, hi, A_TOLERANCE);
    (best.value, best.arg)
}

fn marginal_objective(conj: &impl YoungFunction, probs: &[f64], t: f64) -> f64 {
    let inner = probs.iter().fold(0.0, |acc, &p| acc + marginal_inner(conj, p, t).0);
    (probs.len() as f64 + inner) / t
}

/// `σ inf_{t > 0, a ∈ [0,1]ⁿ} (1/t)(n + Σ_i P_T(i) ψ*(t|1−a_i|) + (1−P_T(i)) ψ*(t|a_i|))`.
pub fn thm1_marginal_bound(m: &SelectionMarginal, spec: &OrliczSpec, sigma: f64) -> Result<BoundReport> {
    ensure_sigma(sigma)?;
    ensure_unbounded(spec)?;
    let probs = m.probs();
    let canonical = format!("thm1-marginal|{spec}|sigma={sigma}|{}", join(probs));
    if probs.iter().all(|&p| p == 0.0 || p == 1.0) {
        let mut report = BoundReport::new(BoundName::Thm1Marginal, 0.0, canonical)?;
        report.optimizer_state = Some(OptimizerState {
            t: vec![f64::INFINITY],
            a: probs.to_vec(),
        });
        return Ok(report);
    }
    let conj = spec.conjugate_fn();
    // With 0 < P < 1 some a must keep both t·a and t·(1−a) in the domain.
    let upper = 2.0 * conj.domain_end();
    let best = minimize_on_ray(|t| marginal_objective(&conj, probs, t), upper);
    let a = probs.iter().map(|&p| marginal_inner(&conj, p, best.arg).1).collect();
    let mut report = BoundReport::new(BoundName::Thm1Marginal, sigma * best.value, canonical)?;
    if best.hit_upper_cap {
        report
            .diagnostics
            .push(format!("t reached the expansion cap {RAY_CAP_HIGH:e}; the infimum may not be attained"));
    }
    report.optimizer_state = Some(OptimizerState { t: vec![best.arg], a });
    Ok(report)
}

/// The marginal bound with `a` held fixed, optimized over `t` only. With
/// `a = 0` this is `σ ψ⁻¹(n)`.
pub fn thm1_marginal_bound_at(m: &SelectionMarginal, spec: &OrliczSpec, sigma: f64, a: &[f64]) -> Result<BoundReport> {
    ensure_sigma(sigma)?;
    ensure_unbounded(spec)?;
    let probs = m.probs();
    if a.len() != probs.len() || a.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::InvalidDistribution("need one a_i in [0, 1] per coordinate".into()));
    }
    let conj = spec.conjugate_fn();
    let objective = |t: f64| {
        let mut s = probs.len() as f64;
        for (&p, &ai) in probs.iter().zip(a) {
            if p > 0.0 {
                s += p * conj.value(t * (1.0 - ai));
            }
            if p < 1.0 {
                s += (1.0 - p) * conj.value(t * ai);
            }
        }
        s / t
    };
    let best = minimize_on_ray(objective, f64::INFINITY);
    let mut report = BoundReport::new(
        BoundName::Thm1Marginal,
        sigma * best.value,
        format!("thm1-marginal-fixed-a|{spec}|sigma={sigma}|{}|a={}", join(probs), join(a)),
    )?;
    report.optimizer_state = Some(OptimizerState {
        t: vec![best.arg],
        a: a.to_vec(),
    });
    Ok(report)
}

fn conjugate_exponent(p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain {
            what: "p",
            expected: "a finite number > 1",
            value: p,
        });
    }
    Ok(p / (p - 1.0))
}

/// `min_{a ∈ [0,1]} E|X − a|^q` by golden-section.
fn pnorm_term(x: &EmpiricalRV, q: f64) -> (f64, f64) {
    if let [atom] = x.atoms() {
        return (0.0, atom.value);
    }
    let objective = |a: f64| {
        x.atoms()
            .iter()
            .fold(0.0, |acc, atom| acc + atom.weight * (atom.value - a).abs().powf(q))
    };
    let best = golden_section(objective, 0.0, 1.0, A_TOLERANCE);
    (best.value, best.arg)
}

/// `σ n^{1/p} (Σ_i min_{a_i} E|P(T = i | Z) − a_i|^q)^{1/q}` with `q = p/(p−1)`.
pub fn pnorm_conditional_bound_from_rvs(conditionals: &[EmpiricalRV], p: f64, sigma: f64) -> Result<BoundReport> {
    ensure_sigma(sigma)?;
    ensure_n(conditionals.len())?;
    let q = conjugate_exponent(p)?;
    let terms: Vec<(f64, f64)> = conditionals.par_iter().map(|x| pnorm_term(x, q)).collect();
    let sum = terms.iter().fold(0.0, |acc, t| acc + t.0);
    let n = conditionals.len() as f64;
    let canonical = conditionals
        .iter()
        .map(|x| {
            x.atoms()
                .iter()
                .map(|a| format!("{}:{}", a.value, a.weight))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";");
    let mut report = BoundReport::new(
        BoundName::PnormConditional,
        sigma * n.powf(1.0 / p) * sum.powf(1.0 / q),
        format!("pnorm-conditional|p={p}|sigma={sigma}|{canonical}"),
    )?;
    report.optimizer_state = Some(OptimizerState {
        t: Vec::new(),
        a: terms.iter().map(|t| t.1).collect(),
    });
    Ok(report)
}

pub fn pnorm_conditional_bound(joint: &FiniteJointInstance, p: f64, sigma: f64) -> Result<BoundReport> {
    pnorm_conditional_bound_from_rvs(&joint.conditional_probability_rvs()?, p, sigma)
}

/// `σ n^{1/p} H(T; q)` for `p > 1`; for `p = 1`, `σ n / 2` unless `T` is
/// deterministic, in which case 0.
pub fn pnorm_marginal_bound(m: &SelectionMarginal, p: f64, sigma: f64) -> Result<BoundReport> {
    ensure_sigma(sigma)?;
    let n = m.len() as f64;
    let canonical = format!("pnorm-marginal|p={p}|sigma={sigma}|{}", join(m.probs()));
    if p == 1.0 {
        let value = if m.is_deterministic() { 0.0 } else { sigma * n / 2.0 };
        return BoundReport::new(BoundName::P1Special, value, canonical);
    }
    let q = conjugate_exponent(p)?;
    // In log space the factor n^{1/p} cancels exactly against H for uniform marginals.
    let value = sigma * (n.ln() / p + ln_h_q(m, q)?).exp();
    BoundReport::new(BoundName::PnormMarginalHq, value, canonical)
}
