//! Finite-support random variables and their norms.

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::optimize::minimize_on_ray;
use crate::orlicz::YoungFunction;

/// Tolerance on the total weight of an [`EmpiricalRV`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub weight: f64,
}

/// A probability law with finitely many atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalRV {
    atoms: Vec<Atom>,
    centered: bool,
}

impl EmpiricalRV {
    /// Builds a law from `(value, weight)` pairs. Weights must be positive and
    /// sum to 1 within [`WEIGHT_SUM_TOLERANCE`].
    pub fn new<I: IntoIterator<Item = (f64, f64)>>(atoms: I) -> Result<Self> {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(value, weight)| Atom { value, weight })
            .collect();
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("a random variable needs at least one atom".into()));
        }
        let mut total = 0.0;
        for (k, a) in atoms.iter().enumerate() {
            if !a.value.is_finite() {
                return Err(Error::InvalidDistribution(format!("atom {k} has non-finite value {}", a.value)));
            }
            if !(a.weight > 0.0) || !a.weight.is_finite() {
                return Err(Error::InvalidDistribution(format!("atom {k} has weight {}", a.weight)));
            }
            total += a.weight;
        }
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
        }
        Ok(EmpiricalRV {
            atoms,
            centered: false,
        })
    }

    /// Like [`EmpiricalRV::new`] but rescales positive weights to sum to one.
    pub fn normalized<I: IntoIterator<Item = (f64, f64)>>(atoms: I) -> Result<Self> {
        let raw: Vec<(f64, f64)> = atoms.into_iter().collect();
        let total: f64 = raw.iter().map(|&(_, w)| w).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidDistribution(format!("total weight {total} cannot be normalized")));
        }
        Self::new(raw.into_iter().map(|(v, w)| (v, w / total)))
    }

    /// Equally weighted atoms.
    pub fn uniform(values: &[f64]) -> Result<Self> {
        let w = 1.0 / values.len() as f64;
        Self::normalized(values.iter().map(|&v| (v, w)))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.value).sum()
    }

    /// The law of `X − E[X]`.
    pub fn center(&self) -> EmpiricalRV {
        if self.centered {
            return self.clone();
        }
        let mu = self.mean();
        EmpiricalRV {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    value: a.value - mu,
                    weight: a.weight,
                })
                .collect(),
            centered: true,
        }
    }

    /// The law of `f(X)`; the centered flag is dropped.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<EmpiricalRV> {
        let atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom {
                value: f(a.value),
                weight: a.weight,
            })
            .collect();
        if let Some(a) = atoms.iter().find(|a| !a.value.is_finite()) {
            return Err(Error::InvalidDistribution(format!("mapped value {} is not finite", a.value)));
        }
        Ok(EmpiricalRV {
            atoms,
            centered: false,
        })
    }

    /// Merges atoms whose values are exactly equal, in order of first appearance.
    pub fn merged(&self) -> EmpiricalRV {
        let mut out: Vec<Atom> = Vec::with_capacity(self.atoms.len());
        let mut order: Vec<(u64, usize)> = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            // -0.0 and 0.0 are the same value.
            let key = if a.value == 0.0 { 0u64 } else { a.value.to_bits() };
            match order.binary_search_by_key(&key, |&(k, _)| k) {
                Ok(pos) => out[order[pos].1].weight += a.weight,
                Err(pos) => {
                    order.insert(pos, (key, out.len()));
                    out.push(*a);
                }
            }
        }
        EmpiricalRV {
            atoms: out,
            centered: self.centered,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.atoms.iter().map(|a| a.value.abs()).fold(0.0, f64::max)
    }

    /// `‖X‖_β = (E|X|^β)^{1/β}`; `beta = f64::INFINITY` gives the essential
    /// supremum of `|X|`, which for a finite law is the largest `|value|`.
    pub fn beta_norm(&self, beta: f64) -> Result<f64> {
        if beta.is_nan() || beta < 1.0 {
            return Err(Error::Domain {
                what: "beta",
                expected: ">= 1 or inf",
                value: beta,
            });
        }
        if beta == f64::INFINITY {
            return Ok(self.max_abs());
        }
        let s: f64 = self.atoms.iter().map(|a| a.weight * a.value.abs().powf(beta)).sum();
        Ok(s.powf(1.0 / beta))
    }

    /// `E ψ(|c X|)`; zero-valued atoms contribute nothing even where `ψ(0)` would be touched.
    fn young_expectation(&self, psi: &impl YoungFunction, c: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.value != 0.0)
            .map(|a| a.weight * psi.value(c * a.value.abs()))
            .sum()
    }
}

/// Luxemburg norm `inf{σ > 0 : E ψ(|X|/σ) ≤ 1}`, by bisection on the
/// nonincreasing map `σ ↦ E ψ(|X|/σ)` run to `f64` resolution.
pub fn luxemburg_norm(rv: &EmpiricalRV, psi: &impl YoungFunction) -> Result<f64> {
    let amax = rv.max_abs();
    if amax == 0.0 {
        return Ok(0.0);
    }
    let g = |sigma: f64| rv.young_expectation(psi, 1.0 / sigma);
    let mut hi = amax;
    while !(g(hi) <= 1.0) {
        if g(hi).is_nan() {
            return Err(Error::NotANumber("Luxemburg norm"));
        }
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::UndefinedNorm);
        }
    }
    let mut lo = hi;
    loop {
        lo *= 0.5;
        if lo == 0.0 {
            return Err(Error::UndefinedNorm);
        }
        if g(lo) > 1.0 {
            break;
        }
        hi = lo;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Amemiya norm `inf_{t > 0} (1 + E f(|tX|)) / t`.
///
/// The search over `t` is restricted to where `E f(|tX|)` can be finite,
/// i.e. `t · max|X| ≤ domain_end(f)`. Returns `+∞` only when no `t > 0` is
/// feasible.
pub fn amemiya_norm(rv: &EmpiricalRV, f: &impl YoungFunction) -> Result<ExtendedReal> {
    amemiya_norm_with_scale(rv, f).map(|(v, _)| v)
}

/// [`amemiya_norm`] together with the minimizing `t` (`+∞` for the zero variable).
pub fn amemiya_norm_with_scale(rv: &EmpiricalRV, f: &impl YoungFunction) -> Result<(ExtendedReal, f64)> {
    let amax = rv.max_abs();
    if amax == 0.0 {
        return Ok((ExtendedReal::ZERO, f64::INFINITY));
    }
    let end = f.domain_end();
    let t_max = end / amax;
    if !(t_max > 0.0) {
        return Ok((ExtendedReal::PosInf, 0.0));
    }
    let objective = |t: f64| (1.0 + rv.young_expectation(f, t)) / t;
    let m = minimize_on_ray(objective, t_max);
    if m.value.is_nan() {
        return Err(Error::NotANumber("Amemiya norm"));
    }
    Ok((ExtendedReal::new(m.value)?, m.arg))
}
