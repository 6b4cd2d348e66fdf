//! Orlicz functions, their convex conjugates and generalized inverses.
//!
//! An [`OrliczSpec`] describes a convex `ψ: [0, b) → [0, ∞)` with `ψ(0) = 0`,
//! extended by `+∞` on `[b, ∞)`. Three families are supported:
//!
//! | family                   | `ψ(x)`               | `ψ*(y)` (for `b = ∞`)            |
//! |--------------------------|----------------------|-----------------------------------|
//! | `Power { p }`, `p > 1`   | `x^p`                | `(p − 1)(y/p)^{p/(p−1)}`          |
//! | `Power { p }`, `p = 1`   | `x`                  | `0` on `[0, 1]`, `+∞` above       |
//! | `SubGaussianQuadratic`   | `x²σ₀²/2`            | `y²/(2σ₀²)`                       |
//! | `Tabulated`              | piecewise linear     | piecewise linear (exact)          |
//!
//! Every closed form is also valid with a finite `b`, where the supremum
//! defining `ψ*` may be attained at the boundary instead.

use std::fmt;
use std::str::FromStr;

use crate::error::{ensure_nonnegative, Error, Result};
use crate::extended::ExtendedReal;
use crate::optimize::{generalized_inverse_by_bisection, minimize_on_ray};

/// A nonnegative convex function on `[0, ∞)` that may jump to `+∞`.
///
/// This is the interface consumed by the norm routines, so that both an
/// [`OrliczSpec`] and its conjugate ([`ConjugateOf`]) can be used.
pub trait YoungFunction {
    /// Value at `x ≥ 0`, `f64::INFINITY` outside the effective domain.
    fn value(&self, x: f64) -> f64;

    /// `sup{x : value(x) < ∞}`.
    fn domain_end(&self) -> f64;

    /// Whether `value(domain_end())` is finite.
    fn domain_end_included(&self) -> bool;
}

/// One knot of a tabulated Orlicz function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Knot {
    pub x: f64,
    pub y: ExtendedReal,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrliczFamily {
    /// `ψ(x) = x^p`, `p ≥ 1`.
    Power { exponent: f64 },
    /// `ψ(λ) = λ²σ₀²/2`, the log-MGF envelope of a σ₀-sub-Gaussian variable.
    SubGaussianQuadratic { scale: f64 },
    /// Linear interpolation of the knots. The first knot is `(0, 0)`. Past the
    /// last knot the final slope continues. A knot with `y = +∞` may only come
    /// last and ends the domain at its `x`.
    Tabulated { knots: Vec<Knot> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrliczSpec {
    family: OrliczFamily,
    /// `b` as given by the caller.
    domain_bound: ExtendedReal,
    /// `b` after folding in a terminal `+∞` knot.
    effective_bound: f64,
    table: Option<Table>,
}

/// Finite knots of a tabulated family with precomputed segment slopes.
#[derive(Clone, Debug, PartialEq)]
struct Table {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// `slopes[j]` is the slope on `[xs[j], xs[j+1]]`; the last entry extends past the final knot.
    slopes: Vec<f64>,
}

impl Table {
    fn value(&self, x: f64) -> f64 {
        let k = self.xs.partition_point(|&xj| xj <= x);
        // k ≥ 1 because xs[0] = 0 ≤ x.
        let j = k - 1;
        self.ys[j] + self.slopes[j] * (x - self.xs[j])
    }
}

impl OrliczSpec {
    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent >= 1.0) || !exponent.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "power exponent must be a finite number >= 1, got {exponent}"
            )));
        }
        Ok(Self::from_family(OrliczFamily::Power { exponent }))
    }

    pub fn sub_gaussian(scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "sub-Gaussian scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self::from_family(OrliczFamily::SubGaussianQuadratic { scale }))
    }

    /// Builds a tabulated family, checking `ψ(0) = 0`, strictly increasing
    /// abscissae, nondecreasing slopes and that the function is not
    /// identically zero.
    pub fn tabulated(knots: Vec<Knot>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidSpec(format!("tabulated: {msg}")));
        if knots.len() < 2 {
            return bad("need at least two knots".into());
        }
        if knots[0].x != 0.0 || knots[0].y != ExtendedReal::ZERO {
            return bad("the first knot must be (0, 0)".into());
        }
        let mut xs = Vec::with_capacity(knots.len());
        let mut ys = Vec::with_capacity(knots.len());
        let mut end = f64::INFINITY;
        for (idx, k) in knots.iter().enumerate() {
            if !k.x.is_finite() || k.x < 0.0 {
                return bad(format!("knot {idx} has invalid x = {}", k.x));
            }
            if let Some(&prev) = xs.last() {
                if !(k.x > prev) {
                    return bad(format!("knot abscissae must increase strictly (knot {idx})"));
                }
            }
            match k.y {
                ExtendedReal::Finite(y) if y >= 0.0 => {
                    if end.is_finite() {
                        return bad("only the last knot may be +inf".into());
                    }
                    xs.push(k.x);
                    ys.push(y);
                }
                ExtendedReal::Finite(y) => return bad(format!("knot {idx} has negative y = {y}")),
                ExtendedReal::PosInf => {
                    if idx + 1 != knots.len() {
                        return bad("only the last knot may be +inf".into());
                    }
                    end = k.x;
                }
            }
        }
        if xs.len() < 2 {
            return bad("need at least two finite knots".into());
        }
        let mut slopes: Vec<f64> = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        for (j, w) in slopes.windows(2).enumerate() {
            if w[1] < w[0] * (1.0 - 1e-12) - 1e-300 {
                return bad(format!("slopes must be nondecreasing (convexity fails at knot {})", j + 1));
            }
        }
        if slopes.iter().all(|&s| s == 0.0) {
            return bad("function is identically zero".into());
        }
        slopes.push(*slopes.last().expect("at least one segment"));
        Ok(OrliczSpec {
            family: OrliczFamily::Tabulated { knots },
            domain_bound: ExtendedReal::PosInf,
            effective_bound: end,
            table: Some(Table { xs, ys, slopes }),
        })
    }

    fn from_family(family: OrliczFamily) -> Self {
        OrliczSpec {
            family,
            domain_bound: ExtendedReal::PosInf,
            effective_bound: f64::INFINITY,
            table: None,
        }
    }

    /// Restricts the domain to `[0, b)`.
    pub fn with_domain_bound(mut self, b: ExtendedReal) -> Result<Self> {
        if let ExtendedReal::Finite(v) = b {
            if !(v > 0.0) {
                return Err(Error::InvalidSpec(format!("domain bound must be positive, got {v}")));
            }
        }
        let table_end = match &self.family {
            OrliczFamily::Tabulated { knots } => match knots.last() {
                Some(Knot { x, y: ExtendedReal::PosInf }) => *x,
                _ => f64::INFINITY,
            },
            _ => f64::INFINITY,
        };
        self.domain_bound = b;
        self.effective_bound = b.to_f64().min(table_end);
        Ok(self)
    }

    pub fn family(&self) -> &OrliczFamily {
        &self.family
    }

    /// The effective upper end `b` of the domain `[0, b)`.
    pub fn domain_bound(&self) -> f64 {
        self.effective_bound
    }

    pub fn has_unbounded_domain(&self) -> bool {
        self.effective_bound == f64::INFINITY
    }

    pub fn power_exponent(&self) -> Option<f64> {
        match self.family {
            OrliczFamily::Power { exponent } => Some(exponent),
            _ => None,
        }
    }

    /// `ψ(x)`.
    pub fn evaluate(&self, x: f64) -> Result<ExtendedReal> {
        ensure_nonnegative("argument of psi", x)?;
        ExtendedReal::new(self.value_unchecked(x))
    }

    fn value_unchecked(&self, x: f64) -> f64 {
        if x >= self.effective_bound {
            return f64::INFINITY;
        }
        match (&self.family, &self.table) {
            (OrliczFamily::Power { exponent }, _) => {
                if *exponent == 1.0 {
                    x
                } else {
                    x.powf(*exponent)
                }
            }
            (OrliczFamily::SubGaussianQuadratic { scale }, _) => 0.5 * x * x * scale * scale,
            (OrliczFamily::Tabulated { .. }, Some(table)) => table.value(x),
            (OrliczFamily::Tabulated { .. }, None) => unreachable!("tabulated spec without table"),
        }
    }

    /// `ψ*(y) = sup_{λ ∈ (0, b)} (λy − ψ(λ))`.
    pub fn conjugate(&self, y: f64) -> Result<ExtendedReal> {
        self.conjugate_with_maximizer(y).map(|(v, _)| v)
    }

    /// `ψ*(y)` together with a maximizing `λ` (or the boundary point the
    /// supremum approaches). When `ψ*(y) = +∞` the returned `λ` is `+∞`.
    pub fn conjugate_with_maximizer(&self, y: f64) -> Result<(ExtendedReal, f64)> {
        ensure_nonnegative("argument of psi*", y)?;
        let (v, lambda) = self.conjugate_raw(y);
        Ok((ExtendedReal::new(v)?, lambda))
    }

    fn conjugate_raw(&self, y: f64) -> (f64, f64) {
        let b = self.effective_bound;
        match (&self.family, &self.table) {
            (OrliczFamily::Power { exponent }, _) if *exponent == 1.0 => {
                if y <= 1.0 {
                    (0.0, 0.0)
                } else if b.is_finite() {
                    (b * (y - 1.0), b)
                } else {
                    (f64::INFINITY, f64::INFINITY)
                }
            }
            (OrliczFamily::Power { exponent }, _) => {
                let p = *exponent;
                let lambda = (y / p).powf(1.0 / (p - 1.0));
                if lambda < b {
                    ((p - 1.0) * (y / p).powf(p / (p - 1.0)), lambda)
                } else {
                    (b * y - b.powf(p), b)
                }
            }
            (OrliczFamily::SubGaussianQuadratic { scale }, _) => {
                let s2 = scale * scale;
                let lambda = y / s2;
                if lambda < b {
                    (0.5 * y * y / s2, lambda)
                } else {
                    (b * y - 0.5 * b * b * s2, b)
                }
            }
            (OrliczFamily::Tabulated { .. }, Some(table)) => tabulated_conjugate(table, b, y),
            (OrliczFamily::Tabulated { .. }, None) => unreachable!("tabulated spec without table"),
        }
    }

    /// `sup{y : ψ*(y) < ∞}`, the asymptotic slope of `ψ`.
    pub fn conjugate_domain_end(&self) -> f64 {
        if self.effective_bound.is_finite() {
            return f64::INFINITY;
        }
        match (&self.family, &self.table) {
            (OrliczFamily::Power { exponent }, _) if *exponent == 1.0 => 1.0,
            (OrliczFamily::Tabulated { .. }, Some(table)) => *table.slopes.last().expect("nonempty"),
            _ => f64::INFINITY,
        }
    }

    /// `ψ⁻¹(y) = inf{t ≥ 0 : ψ(t) > y}`.
    ///
    /// Closed forms for the power and quadratic families, bisection on the
    /// tabulated family.
    pub fn generalized_inverse(&self, y: f64) -> Result<f64> {
        ensure_nonnegative("argument of psi^-1", y)?;
        let b = self.effective_bound;
        match &self.family {
            OrliczFamily::Power { exponent } => Ok(y.powf(1.0 / exponent).min(b)),
            OrliczFamily::SubGaussianQuadratic { scale } => Ok(((2.0 * y).sqrt() / scale).min(b)),
            OrliczFamily::Tabulated { .. } => {
                generalized_inverse_by_bisection(|t| self.value_unchecked(t), y)
            }
        }
    }

    /// `ψ*⁻¹(y) = inf{t ≥ 0 : ψ*(t) > y}`.
    ///
    /// Closed forms for the power and quadratic families with `b = ∞`,
    /// bisection otherwise.
    pub fn conjugate_inverse(&self, y: f64) -> Result<f64> {
        ensure_nonnegative("argument of psi*^-1", y)?;
        if self.effective_bound.is_finite() {
            return self.conjugate_inverse_by_bisection(y);
        }
        match &self.family {
            OrliczFamily::Power { exponent } if *exponent == 1.0 => Ok(1.0),
            OrliczFamily::Power { exponent } => {
                // ψ*(t) = (p − 1)(t/p)^{p/(p−1)}
                let p = *exponent;
                Ok(p * (y / (p - 1.0)).powf((p - 1.0) / p))
            }
            OrliczFamily::SubGaussianQuadratic { scale } => Ok(scale * (2.0 * y).sqrt()),
            OrliczFamily::Tabulated { .. } => self.conjugate_inverse_by_bisection(y),
        }
    }

    /// `ψ*⁻¹(y)` by bisection on the conjugate, for any family.
    pub fn conjugate_inverse_by_bisection(&self, y: f64) -> Result<f64> {
        ensure_nonnegative("argument of psi*^-1", y)?;
        generalized_inverse_by_bisection(|t| self.conjugate_raw(t).0, y)
    }

    /// `ψ*⁻¹(y)` through the variational identity
    /// `ψ*⁻¹(y) = inf_{λ ∈ (0, b)} (y + ψ(λ)) / λ`.
    pub fn conjugate_inverse_variational(&self, y: f64) -> Result<f64> {
        ensure_nonnegative("argument of psi*^-1", y)?;
        let m = minimize_on_ray(|l| (y + self.value_unchecked(l)) / l, self.effective_bound);
        Ok(m.value)
    }

    /// The conjugate `ψ*` viewed as a [`YoungFunction`].
    pub fn conjugate_fn(&self) -> ConjugateOf<'_> {
        ConjugateOf { spec: self }
    }
}

/// `sup_{λ ∈ [0, b)} (λy − ψ(λ))` for piecewise-linear `ψ`: the objective is
/// concave and piecewise linear, so its supremum sits at a knot, at `b`, or
/// is `+∞` when `y` exceeds the final slope on an unbounded domain.
fn tabulated_conjugate(table: &Table, b: f64, y: f64) -> (f64, f64) {
    let last_slope = *table.slopes.last().expect("nonempty");
    if b == f64::INFINITY && y > last_slope {
        return (f64::INFINITY, f64::INFINITY);
    }
    let mut best = (0.0, 0.0);
    for (&x, &fx) in table.xs.iter().zip(&table.ys) {
        if x >= b {
            break;
        }
        let v = x * y - fx;
        if v > best.0 {
            best = (v, x);
        }
    }
    if b.is_finite() {
        let v = b * y - table.value(b);
        if v > best.0 {
            best = (v, b);
        }
    }
    best
}

impl YoungFunction for OrliczSpec {
    fn value(&self, x: f64) -> f64 {
        self.value_unchecked(x)
    }

    fn domain_end(&self) -> f64 {
        self.effective_bound
    }

    fn domain_end_included(&self) -> bool {
        false
    }
}

/// The conjugate `ψ*` of an Orlicz specification.
#[derive(Clone, Copy, Debug)]
pub struct ConjugateOf<'a> {
    spec: &'a OrliczSpec,
}

impl ConjugateOf<'_> {
    pub fn spec(&self) -> &OrliczSpec {
        self.spec
    }
}

impl YoungFunction for ConjugateOf<'_> {
    fn value(&self, y: f64) -> f64 {
        self.spec.conjugate_raw(y).0
    }

    fn domain_end(&self) -> f64 {
        self.spec.conjugate_domain_end()
    }

    fn domain_end_included(&self) -> bool {
        // ψ*(d) = lim of chord values, finite for every family with a finite slope limit.
        self.domain_end().is_finite() && self.value(self.domain_end()).is_finite()
    }
}

impl fmt::Display for OrliczSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            OrliczFamily::Power { exponent } => write!(f, "power:{exponent}")?,
            OrliczFamily::SubGaussianQuadratic { scale } => write!(f, "subgaussian:{scale}")?,
            OrliczFamily::Tabulated { knots } => {
                f.write_str("tabulated:")?;
                for (i, k) in knots.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}/{}", k.x, k.y)?;
                }
            }
        }
        if let ExtendedReal::Finite(b) = self.domain_bound {
            write!(f, "@{b}")?;
        }
        Ok(())
    }
}

/// Parses `power:P`, `subgaussian:S` or `tabulated:x/y,x/y,...`, each with an
/// optional `@B` domain bound suffix.
impl FromStr for OrliczSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, bound) = match s.split_once('@') {
            Some((body, b)) => (body, Some(b.parse::<ExtendedReal>()?)),
            None => (s, None),
        };
        let (kind, arg) = body
            .split_once(':')
            .ok_or_else(|| Error::InvalidSpec(format!("expected <family>:<parameters>, got {s:?}")))?;
        let number = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("not a number: {t:?}")))
        };
        let spec = match kind.trim().to_ascii_lowercase().as_str() {
            "power" | "p" => OrliczSpec::power(number(arg)?)?,
            "subgaussian" | "sub-gaussian" | "quadratic" => OrliczSpec::sub_gaussian(number(arg)?)?,
            "tabulated" | "table" => {
                let knots = arg
                    .split(',')
                    .map(|pair| {
                        let (x, y) = pair
                            .split_once('/')
                            .ok_or_else(|| Error::InvalidSpec(format!("knot must be x/y, got {pair:?}")))?;
                        Ok(Knot {
                            x: number(x)?,
                            y: y.parse()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                OrliczSpec::tabulated(knots)?
            }
            other => return Err(Error::InvalidSpec(format!("unknown family {other:?}"))),
        };
        match bound {
            Some(b) => spec.with_domain_bound(b),
            None => Ok(spec),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    fn knots(pairs: &[(f64, f64)]) -> Vec<Knot> {
        pairs
            .iter()
            .map(|&(x, y)| Knot {
                x,
                y: ExtendedReal::new(y).unwrap(),
            })
            .collect()
    }

    #[test]
    fn evaluate_examples() {
        let p2 = OrliczSpec::power(2.0).unwrap();
        assert_eq!(p2.evaluate(3.0).unwrap(), ExtendedReal::Finite(9.0));
        let sg = OrliczSpec::sub_gaussian(1.0).unwrap();
        assert_eq!(sg.evaluate(2.0).unwrap(), ExtendedReal::Finite(2.0));
        let tab = OrliczSpec::tabulated(knots(&[(0.0, 0.0), (1.0, 0.5), (2.0, 2.0)])).unwrap();
        for spec in [&p2, &sg, &tab] {
            assert_eq!(spec.evaluate(0.0).unwrap(), ExtendedReal::ZERO);
        }
        assert_eq!(tab.evaluate(3.0).unwrap(), ExtendedReal::Finite(3.5));
        assert!(p2.evaluate(-1.0).is_err());
    }

    #[test]
    fn finite_domain_evaluates_to_infinity() {
        let spec = OrliczSpec::power(2.0)
            .unwrap()
            .with_domain_bound(ExtendedReal::Finite(1.5))
            .unwrap();
        assert_eq!(spec.evaluate(1.5).unwrap(), ExtendedReal::PosInf);
        assert_eq!(spec.evaluate(1.0).unwrap(), ExtendedReal::Finite(1.0));
        let tab = OrliczSpec::tabulated(vec![
            Knot { x: 0.0, y: ExtendedReal::ZERO },
            Knot { x: 1.0, y: ExtendedReal::Finite(1.0) },
            Knot { x: 4.0, y: ExtendedReal::PosInf },
        ])
        .unwrap();
        assert_eq!(tab.domain_bound(), 4.0);
        assert_eq!(tab.evaluate(3.0).unwrap(), ExtendedReal::Finite(3.0));
        assert_eq!(tab.evaluate(4.0).unwrap(), ExtendedReal::PosInf);
    }

    #[test]
    fn conjugate_examples() {
        let p2 = OrliczSpec::power(2.0).unwrap();
        // Independent oracle: grid sup over λ ∈ [0, 100] of 2λ − λ².
        let grid_sup = (0..=1_000_000)
            .map(|k| k as f64 * 1e-4)
            .map(|l| 2.0 * l - l * l)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(close(grid_sup, 1.0, 1e-12));
        assert!(close(p2.conjugate(2.0).unwrap().to_f64(), grid_sup, 1e-12));

        let p1 = OrliczSpec::power(1.0).unwrap();
        assert_eq!(p1.conjugate(0.5).unwrap(), ExtendedReal::ZERO);
        assert_eq!(p1.conjugate(1.0).unwrap(), ExtendedReal::ZERO);
        assert_eq!(p1.conjugate(2.0).unwrap(), ExtendedReal::PosInf);

        let sg = OrliczSpec::sub_gaussian(2.0).unwrap();
        let tab = OrliczSpec::tabulated(knots(&[(0.0, 0.0), (1.0, 0.5), (2.0, 2.0)])).unwrap();
        for spec in [&p2, &p1, &sg, &tab] {
            assert_eq!(spec.conjugate(0.0).unwrap(), ExtendedReal::ZERO);
        }
        assert!(p2.conjugate(-0.1).is_err());
    }

    #[test]
    fn tabulated_conjugate_matches_brute_force() {
        let tab = OrliczSpec::tabulated(knots(&[(0.0, 0.0), (1.0, 0.25), (2.0, 1.0), (3.0, 3.0)])).unwrap();
        for &y in &[0.0, 0.1, 0.25, 0.5, 1.0, 1.7, 2.0] {
            let brute = (0..=200_000)
                .map(|k| k as f64 * 1e-4)
                .map(|l| l * y - tab.value(l))
                .fold(f64::NEG_INFINITY, f64::max);
            let got = tab.conjugate(y).unwrap().to_f64();
            assert!(close(got, brute, 1e-9), "y={y}: {got} vs {brute}");
        }
        assert_eq!(tab.conjugate(2.5).unwrap(), ExtendedReal::PosInf);
        assert_eq!(tab.conjugate_domain_end(), 2.0);
    }

    #[test]
    fn finite_domain_conjugate_uses_boundary() {
        let spec = OrliczSpec::sub_gaussian(1.0)
            .unwrap()
            .with_domain_bound(ExtendedReal::Finite(1.0))
            .unwrap();
        // λ* = y = 3 lies outside (0, 1): supremum approaches λ = 1.
        let (v, l) = spec.conjugate_with_maximizer(3.0).unwrap();
        assert!(close(v.to_f64(), 2.5, 1e-15));
        assert_eq!(l, 1.0);
        let p1 = OrliczSpec::power(1.0)
            .unwrap()
            .with_domain_bound(ExtendedReal::Finite(2.0))
            .unwrap();
        assert_eq!(p1.conjugate(3.0).unwrap(), ExtendedReal::Finite(4.0));
    }

    #[test]
    fn generalized_inverse_examples() {
        let p2 = OrliczSpec::power(2.0).unwrap();
        assert!(close(p2.generalized_inverse(4.0).unwrap(), 2.0, 1e-15));
        let p1 = OrliczSpec::power(1.0).unwrap();
        assert_eq!(p1.generalized_inverse(5.0).unwrap(), 5.0);

        // √(2 ln 2) through bisection on y²/2 against the closed form √(2y).
        let ln2 = std::f64::consts::LN_2;
        let bisected = generalized_inverse_by_bisection(|t| t * t / 2.0, ln2).unwrap();
        let closed = (2.0 * ln2).sqrt();
        assert!((bisected - closed).abs() < 1e-10);
        assert!((closed - 1.177_410_022_515_474_7).abs() < 1e-12);
        let sg = OrliczSpec::sub_gaussian(1.0).unwrap();
        assert!((sg.conjugate_inverse(ln2).unwrap() - closed).abs() < 1e-10);
    }

    #[test]
    fn closed_form_inverse_agrees_with_bisection() {
        for spec in ["power:1", "power:1.5", "power:3", "subgaussian:0.7", "power:2@3"] {
            let spec: OrliczSpec = spec.parse().unwrap();
            for &y in &[0.0, 0.3, 1.0, 7.0, 20.0] {
                let bis = generalized_inverse_by_bisection(|t| spec.value(t), y).unwrap();
                let got = spec.generalized_inverse(y).unwrap();
                assert!(close(got, bis, 1e-12), "{spec} y={y}: {got} vs {bis}");
            }
        }
    }

    #[test]
    fn tabulated_inverse_respects_strict_inequality() {
        // ψ = 0 on [0, 1], then slope 1: ψ⁻¹(0) = 1, not 0.
        let tab = OrliczSpec::tabulated(knots(&[(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)])).unwrap();
        assert!(close(tab.generalized_inverse(0.0).unwrap(), 1.0, 1e-14));
        assert!(close(tab.generalized_inverse(2.0).unwrap(), 3.0, 1e-14));
    }

    #[test]
    fn conjugate_inverse_examples() {
        let p2 = OrliczSpec::power(2.0).unwrap();
        assert!(close(p2.conjugate_inverse(1.0).unwrap(), 2.0, 1e-14));
        assert_eq!(p2.conjugate_inverse(0.0).unwrap(), 0.0);
        // Bisection only resolves the boundary of {t : ψ*(t) > 0} down to where ψ* underflows.
        assert!(p2.conjugate_inverse_by_bisection(0.0).unwrap() < 1e-150);
        let sg = OrliczSpec::sub_gaussian(1.0).unwrap();
        assert_eq!(sg.conjugate_inverse(0.0).unwrap(), 0.0);
        let p1 = OrliczSpec::power(1.0).unwrap();
        assert!(close(p1.conjugate_inverse(0.3).unwrap(), 1.0, 1e-14));
        assert!(close(p1.conjugate_inverse_by_bisection(0.3).unwrap(), 1.0, 1e-14));
    }

    #[test]
    fn closed_form_conjugate_inverse_agrees_with_bisection() {
        for spec in ["power:1.5", "power:2", "power:4", "subgaussian:0.7", "subgaussian:3"] {
            let spec: OrliczSpec = spec.parse().unwrap();
            for &y in &[0.01, 0.3, 1.0, 7.0, 20.0] {
                let bis = spec.conjugate_inverse_by_bisection(y).unwrap();
                let got = spec.conjugate_inverse(y).unwrap();
                assert!(close(got, bis, 1e-12), "{spec} y={y}: {got} vs {bis}");
            }
        }
    }

    #[test]
    fn variational_path_matches_log_grid_oracle() {
        // Independent oracle: minimize (y + λ²/2)/λ on a dense log grid.
        let sg = OrliczSpec::sub_gaussian(1.0).unwrap();
        let y = std::f64::consts::LN_2;
        let grid = (0..=400_000)
            .map(|k| 10f64.powf(-4.0 + 8.0 * k as f64 / 400_000.0))
            .map(|l| (y + 0.5 * l * l) / l)
            .fold(f64::INFINITY, f64::min);
        let v = sg.conjugate_inverse_variational(y).unwrap();
        assert!(close(v, grid, 1e-9));
        assert!(close(v, (2.0 * y).sqrt(), 1e-10));
    }

    #[test]
    fn tabulated_validation() {
        assert!(OrliczSpec::tabulated(knots(&[(0.0, 0.0), (1.0, 2.0), (2.0, 3.0)])).is_err());
        assert!(OrliczSpec::tabulated(knots(&[(0.0, 0.0), (1.0, 0.0)])).is_err());
        assert!(OrliczSpec::tabulated(knots(&[(0.0, 1.0), (1.0, 2.0)])).is_err());
        assert!(OrliczSpec::tabulated(knots(&[(0.0, 0.0), (1.0, 1.0), (1.0, 2.0)])).is_err());
        assert!(OrliczSpec::power(0.5).is_err());
        assert!(OrliczSpec::sub_gaussian(0.0).is_err());
    }

    #[test]
    fn parse_and_display() {
        for s in ["power:2", "subgaussian:1.5", "tabulated:0/0,1/0.5,2/2", "power:1@3", "tabulated:0/0,1/1,3/inf"] {
            let spec: OrliczSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("gauss:1".parse::<OrliczSpec>().is_err());
        assert!("power".parse::<OrliczSpec>().is_err());
    }
}
