//! Exact finite joint laws of `(Z_1, …, Z_n, T)`.
//!
//! # Instance file format
//!
//! Plain text, one record per line; `#` starts a comment and blank lines are
//! ignored. Records may appear in any order, but the `support` and `kernel`
//! rows are matched up by position.
//!
//! ```text
//! # two coordinates, two equally likely support points, argmax selection
//! n 2
//! m 2
//! support 1 -1
//! support -1 1
//! probs 0.5 0.5
//! kernel 1 0
//! kernel 0 1
//! ```
//!
//! * `n N` – number of coordinates,
//! * `m M` – number of support points,
//! * `support z_1 … z_n` – one line per support point,
//! * `probs p_1 … p_m` – the probabilities of the support points,
//! * `kernel q_1 … q_n` – `P(T = i | Z = z_k)`, one line per support point.
//!
//! Probabilities must lie in `[0, 1]` and every distribution must sum to one
//! within `1e-12`; errors carry the offending line number.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::entropy::SelectionMarginal;
use crate::error::{Error, Result};
use crate::rv::EmpiricalRV;

/// Largest `m · n` accepted for exact computation.
pub const ORACLE_SCALE_CAP: usize = 1_000_000;

const SUM_TOLERANCE: f64 = 1e-12;

/// Joint law of `Z ∈ ℝⁿ` (finitely supported) and a selection index `T`
/// given through the kernel `P(T = · | Z = z_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteJointInstance {
    n: usize,
    support: Vec<f64>,
    z_probs: Vec<f64>,
    kernel: Vec<f64>,
}

/// Index of the largest coordinate; ties go to the lowest index.
pub fn argmax_index(z: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in z.iter().enumerate().skip(1) {
        if v > z[best] {
            best = i;
        }
    }
    best
}

fn check_distribution(what: &str, probs: &[f64]) -> std::result::Result<(), String> {
    for &p in probs {
        if !(0.0..=1.0).contains(&p) {
            return Err(format!("{what} has entry {p} outside [0, 1]"));
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(format!("{what} sums to {total}, not 1"));
    }
    Ok(())
}

impl FiniteJointInstance {
    pub fn new(z_support: Vec<Vec<f64>>, z_probs: Vec<f64>, kernel: Vec<Vec<f64>>) -> Result<Self> {
        let m = z_support.len();
        if m == 0 {
            return Err(Error::InvalidDistribution("instance needs at least one support point".into()));
        }
        let n = z_support[0].len();
        if n == 0 {
            return Err(Error::InvalidDistribution("instance needs at least one coordinate".into()));
        }
        if m.saturating_mul(n) > ORACLE_SCALE_CAP {
            return Err(Error::ScaleCap {
                what: "finite joint instance (m * n)",
                requested: m.saturating_mul(n),
                cap: ORACLE_SCALE_CAP,
            });
        }
        if z_probs.len() != m || kernel.len() != m {
            return Err(Error::InvalidDistribution(format!(
                "expected {m} probabilities and kernel rows, got {} and {}",
                z_probs.len(),
                kernel.len()
            )));
        }
        for (k, z) in z_support.iter().enumerate() {
            if z.len() != n {
                return Err(Error::InvalidDistribution(format!("support point {k} has {} coordinates, not {n}", z.len())));
            }
            if z.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidDistribution(format!("support point {k} is not finite")));
            }
        }
        check_distribution("z_probs", &z_probs).map_err(Error::InvalidDistribution)?;
        for (k, row) in kernel.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidDistribution(format!("kernel row {k} has {} entries, not {n}", row.len())));
            }
            check_distribution(&format!("kernel row {k}"), row).map_err(Error::InvalidDistribution)?;
        }
        Ok(FiniteJointInstance {
            n,
            support: z_support.into_iter().flatten().collect(),
            z_probs,
            kernel: kernel.into_iter().flatten().collect(),
        })
    }

    /// Instance whose kernel is `selection(z_k)` for every support point.
    pub fn with_selection<F>(z_support: Vec<Vec<f64>>, z_probs: Vec<f64>, selection: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let kernel = z_support.iter().map(|z| selection(z)).collect();
        Self::new(z_support, z_probs, kernel)
    }

    /// Instance with the argmax selection rule (lowest index on ties).
    pub fn with_argmax(z_support: Vec<Vec<f64>>, z_probs: Vec<f64>) -> Result<Self> {
        Self::with_selection(z_support, z_probs, |z| {
            let mut row = vec![0.0; z.len()];
            row[argmax_index(z)] = 1.0;
            row
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.z_probs.len()
    }

    pub fn support_point(&self, k: usize) -> &[f64] {
        &self.support[k * self.n..(k + 1) * self.n]
    }

    pub fn z_probs(&self) -> &[f64] {
        &self.z_probs
    }

    pub fn kernel_row(&self, k: usize) -> &[f64] {
        &self.kernel[k * self.n..(k + 1) * self.n]
    }

    /// The law of the coordinate `Z_i`.
    pub fn coordinate_law(&self, i: usize) -> Result<EmpiricalRV> {
        self.check_index(i)?;
        let atoms = (0..self.m())
            .filter(|&k| self.z_probs[k] > 0.0)
            .map(|k| (self.support_point(k)[i], self.z_probs[k]));
        Ok(EmpiricalRV::normalized(atoms)?.merged())
    }

    pub fn coordinate_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.n];
        for k in 0..self.m() {
            for (mean, &z) in means.iter_mut().zip(self.support_point(k)) {
                *mean += self.z_probs[k] * z;
            }
        }
        means
    }

    /// The same instance with every coordinate shifted to mean zero.
    pub fn centered(&self) -> FiniteJointInstance {
        let means = self.coordinate_means();
        let mut out = self.clone();
        for k in 0..self.m() {
            for i in 0..self.n {
                out.support[k * self.n + i] -= means[i];
            }
        }
        out
    }

    pub fn is_centered(&self, tol: f64) -> bool {
        self.coordinate_means().iter().all(|m| m.abs() <= tol)
    }

    /// `E[Z_T] = Σ_k P(z_k) Σ_i P(T = i | z_k) z_k[i]`.
    pub fn exact_selected_mean(&self) -> f64 {
        (0..self.m())
            .map(|k| {
                let inner: f64 = self
                    .kernel_row(k)
                    .iter()
                    .zip(self.support_point(k))
                    .map(|(q, z)| q * z)
                    .sum();
                self.z_probs[k] * inner
            })
            .sum()
    }

    /// `E[max_i Z_i]`.
    pub fn exact_max_mean(&self) -> f64 {
        (0..self.m())
            .map(|k| {
                let z = self.support_point(k);
                self.z_probs[k] * z[argmax_index(z)]
            })
            .sum()
    }

    /// `P_T(i) = Σ_k P(z_k) P(T = i | z_k)`.
    pub fn selection_marginal(&self) -> SelectionMarginal {
        let mut probs = vec![0.0; self.n];
        for k in 0..self.m() {
            for (p, &q) in probs.iter_mut().zip(self.kernel_row(k)) {
                *p += self.z_probs[k] * q;
            }
        }
        SelectionMarginal::renormalized(probs, 1e-9).expect("kernel rows and z_probs are normalized")
    }

    /// The law of the random variable `P(T = i | Z)`, atoms merged on exactly
    /// equal values.
    pub fn conditional_probability_rv(&self, i: usize) -> Result<EmpiricalRV> {
        self.check_index(i)?;
        let atoms = (0..self.m())
            .filter(|&k| self.z_probs[k] > 0.0)
            .map(|k| (self.kernel_row(k)[i], self.z_probs[k]));
        Ok(EmpiricalRV::normalized(atoms)?.merged())
    }

    /// All `n` conditional selection laws.
    pub fn conditional_probability_rvs(&self) -> Result<Vec<EmpiricalRV>> {
        (0..self.n).map(|i| self.conditional_probability_rv(i)).collect()
    }

    /// The law of `P(T = i | Z_i)`, computed from the joint cells
    /// `P(T = i, Z_i = v) / P(Z_i = v)`.
    pub fn coordinate_conditional_rv(&self, i: usize) -> Result<EmpiricalRV> {
        self.check_index(i)?;
        let mut cells: Vec<(f64, f64, f64)> = Vec::new();
        let mut index: HashMap<u64, usize> = HashMap::new();
        for k in 0..self.m() {
            let pz = self.z_probs[k];
            if pz == 0.0 {
                continue;
            }
            let v = self.support_point(k)[i];
            let key = if v == 0.0 { 0 } else { v.to_bits() };
            let slot = *index.entry(key).or_insert_with(|| {
                cells.push((v, 0.0, 0.0));
                cells.len() - 1
            });
            cells[slot].1 += pz * self.kernel_row(k)[i];
            cells[slot].2 += pz;
        }
        EmpiricalRV::normalized(cells.into_iter().map(|(_, joint, mass)| ((joint / mass).min(1.0), mass)))
            .map(|rv| rv.merged())
    }

    /// Merges support points with identical coordinates, averaging their kernels.
    pub fn merged_support(&self) -> FiniteJointInstance {
        let mut points: Vec<(Vec<f64>, f64, Vec<f64>)> = Vec::new();
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        for k in 0..self.m() {
            let z = self.support_point(k);
            let key: Vec<u64> = z.iter().map(|&v| if v == 0.0 { 0 } else { v.to_bits() }).collect();
            let pz = self.z_probs[k];
            match index.get(&key) {
                Some(&slot) => {
                    let entry = &mut points[slot];
                    entry.1 += pz;
                    for (acc, &q) in entry.2.iter_mut().zip(self.kernel_row(k)) {
                        *acc += pz * q;
                    }
                }
                None => {
                    index.insert(key, points.len());
                    points.push((z.to_vec(), pz, self.kernel_row(k).iter().map(|q| pz * q).collect()));
                }
            }
        }
        let mut out = FiniteJointInstance {
            n: self.n,
            support: Vec::with_capacity(points.len() * self.n),
            z_probs: Vec::with_capacity(points.len()),
            kernel: Vec::with_capacity(points.len() * self.n),
        };
        for (z, pz, mass) in points {
            out.support.extend(z);
            out.z_probs.push(pz);
            if pz > 0.0 {
                out.kernel.extend(mass.iter().map(|q| q / pz));
            } else {
                out.kernel.extend(std::iter::repeat_n(1.0 / self.n as f64, self.n));
            }
        }
        out
    }

    /// Relabels coordinates: coordinate `i` of the result is coordinate
    /// `perm[i]` of `self`, in both the support and the kernel.
    pub fn permuted(&self, perm: &[usize]) -> Result<FiniteJointInstance> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n || perm.iter().any(|&j| j >= self.n || std::mem::replace(&mut seen[j], true)) {
            return Err(Error::InvalidDistribution("not a permutation of the coordinates".into()));
        }
        let mut out = self.clone();
        for k in 0..self.m() {
            for (i, &j) in perm.iter().enumerate() {
                out.support[k * self.n + i] = self.support[k * self.n + j];
                out.kernel[k * self.n + i] = self.kernel[k * self.n + j];
            }
        }
        Ok(out)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::InvalidDistribution(format!("coordinate {i} out of range for n = {}", self.n)));
        }
        Ok(())
    }

    /// Serializes to the instance file format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n {}", self.n);
        let _ = writeln!(s, "m {}", self.m());
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        for k in 0..self.m() {
            let _ = writeln!(s, "support {}", join(self.support_point(k)));
        }
        let _ = writeln!(s, "probs {}", join(&self.z_probs));
        for k in 0..self.m() {
            let _ = writeln!(s, "kernel {}", join(self.kernel_row(k)));
        }
        s
    }

    /// Parses the instance file format, reporting the offending line.
    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { line, message };
        let mut n: Option<(usize, usize)> = None;
        let mut m: Option<(usize, usize)> = None;
        let mut support: Vec<(usize, Vec<f64>)> = Vec::new();
        let mut probs: Option<(usize, Vec<f64>)> = None;
        let mut kernel: Vec<(usize, Vec<f64>)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let key = fields.next().expect("nonempty line");
            let numbers = |fields: std::str::SplitWhitespace<'_>| -> Result<Vec<f64>> {
                fields
                    .map(|f| {
                        f.parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite())
                            .ok_or_else(|| err(line_no, format!("not a finite number: {f:?}")))
                    })
                    .collect()
            };
            let count = |mut fields: std::str::SplitWhitespace<'_>| -> Result<usize> {
                let v = fields
                    .next()
                    .and_then(|f| f.parse::<usize>().ok())
                    .ok_or_else(|| err(line_no, format!("{key} needs a positive integer")))?;
                if fields.next().is_some() {
                    return Err(err(line_no, format!("trailing fields after {key}")));
                }
                Ok(v)
            };
            match key {
                "n" => {
                    if n.is_some() {
                        return Err(err(line_no, "duplicate n".into()));
                    }
                    n = Some((count(fields)?, line_no));
                }
                "m" => {
                    if m.is_some() {
                        return Err(err(line_no, "duplicate m".into()));
                    }
                    m = Some((count(fields)?, line_no));
                }
                "support" => support.push((line_no, numbers(fields)?)),
                "kernel" => kernel.push((line_no, numbers(fields)?)),
                "probs" => {
                    if probs.is_some() {
                        return Err(err(line_no, "duplicate probs".into()));
                    }
                    probs = Some((line_no, numbers(fields)?));
                }
                other => return Err(err(line_no, format!("unknown record {other:?}"))),
            }
        }

        let last = text.lines().count().max(1);
        let (n, n_line) = n.ok_or_else(|| err(last, "missing n".into()))?;
        let (m, m_line) = m.ok_or_else(|| err(last, "missing m".into()))?;
        if n == 0 {
            return Err(err(n_line, "n must be at least 1".into()));
        }
        if m == 0 {
            return Err(err(m_line, "m must be at least 1".into()));
        }
        if m.saturating_mul(n) > ORACLE_SCALE_CAP {
            return Err(err(
                m_line,
                format!("m * n = {} exceeds the oracle scale cap of {ORACLE_SCALE_CAP}", m.saturating_mul(n)),
            ));
        }
        if support.len() != m {
            return Err(err(last, format!("expected {m} support lines, found {}", support.len())));
        }
        if kernel.len() != m {
            return Err(err(last, format!("expected {m} kernel lines, found {}", kernel.len())));
        }
        let (probs_line, probs) = probs.ok_or_else(|| err(last, "missing probs".into()))?;
        if probs.len() != m {
            return Err(err(probs_line, format!("expected {m} probabilities, found {}", probs.len())));
        }
        check_distribution("probs", &probs).map_err(|e| err(probs_line, e))?;
        for (line, row) in &support {
            if row.len() != n {
                return Err(err(*line, format!("expected {n} coordinates, found {}", row.len())));
            }
        }
        for (line, row) in &kernel {
            if row.len() != n {
                return Err(err(*line, format!("expected {n} kernel entries, found {}", row.len())));
            }
            check_distribution("kernel row", row).map_err(|e| err(*line, e))?;
        }
        FiniteJointInstance::new(
            support.into_iter().map(|(_, r)| r).collect(),
            probs,
            kernel.into_iter().map(|(_, r)| r).collect(),
        )
    }
}

impl FromStr for FiniteJointInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_text(s)
    }
}
