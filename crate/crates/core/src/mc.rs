//! Monte Carlo estimation of `E[Z_T]` and statistical checks of the bounds.
//!
//! Replicates are grouped into fixed blocks of [`BLOCK_SIZE`]; block `b` draws
//! from ChaCha8 stream `b` of the root seed, and block statistics are merged
//! in a fixed binary tree. The result is therefore bitwise identical for any
//! number of worker threads.

use std::fmt;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    digest_hex, mgf_bound, orlicz_bound, pnorm_conditional_bound_from_rvs, pnorm_marginal_bound, soft_bound,
    thm1_conditional_bound_from_rvs, thm1_marginal_bound, BoundName, BoundReport, InformationKind,
};
use crate::entropy::{mutual_information, shannon_entropy, SelectionMarginal};
use crate::error::{ensure_positive, Error, Result};
use crate::extended::ExtendedReal;
use crate::joint::{argmax_index, FiniteJointInstance, ORACLE_SCALE_CAP};
use crate::orlicz::{OrliczFamily, OrliczSpec};
use crate::rv::{luxemburg_norm, EmpiricalRV};

pub const BLOCK_SIZE: u64 = 8192;

/// Number of sampled `z` used for the plug-in conditional laws.
pub const CONDITIONAL_SAMPLE_CAP: u64 = 10_000;

/// Stream reserved for the plug-in conditional samples; block streams count up from 0.
const CONDITIONAL_STREAM: u64 = 1 << 63;

/// Points in the discretization of bounded uniform laws.
pub const UNIFORM_QUADRATURE_POINTS: usize = 10_000;

const GAUSSIAN_QUADRATURE_POINTS: usize = 100_000;
const GAUSSIAN_QUADRATURE_RANGE: f64 = 12.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZLaw {
    GaussianIid { sd: f64 },
    RademacherIid,
    BoundedUniform { half_width: f64 },
    /// Unit-variance Gaussians with common pairwise correlation.
    CorrelatedGaussian { correlation: f64 },
}

impl fmt::Display for ZLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZLaw::GaussianIid { sd } => write!(f, "gaussian:{sd}"),
            ZLaw::RademacherIid => f.write_str("rademacher"),
            ZLaw::BoundedUniform { half_width } => write!(f, "uniform:{half_width}"),
            ZLaw::CorrelatedGaussian { correlation } => write!(f, "correlated:{correlation}"),
        }
    }
}

/// The conditional law of `T` given `Z`. Indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SelectionRule {
    /// Largest coordinate, lowest index on ties.
    Argmax,
    Deterministic(usize),
    UniformRandom,
    /// `P(T = i | Z) ∝ exp(β Z_i)`.
    Softmax { beta: f64 },
}

impl fmt::Display for SelectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionRule::Argmax => f.write_str("argmax"),
            SelectionRule::Deterministic(i) => write!(f, "deterministic:{i}"),
            SelectionRule::UniformRandom => f.write_str("uniform"),
            SelectionRule::Softmax { beta } => write!(f, "softmax:{beta}"),
        }
    }
}

impl SelectionRule {
    /// Writes `P(T = · | Z = z)` into `out`.
    pub fn kernel(&self, z: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|p| *p = 0.0);
        match *self {
            SelectionRule::Argmax => out[argmax_index(z)] = 1.0,
            SelectionRule::Deterministic(i) => out[i] = 1.0,
            SelectionRule::UniformRandom => {
                let p = 1.0 / z.len() as f64;
                out.iter_mut().for_each(|x| *x = p);
            }
            SelectionRule::Softmax { beta } => {
                let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut total = 0.0;
                for (o, &zi) in out.iter_mut().zip(z) {
                    *o = (beta * (zi - top)).exp();
                    total += *o;
                }
                out.iter_mut().for_each(|x| *x /= total);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub z_law: ZLaw,
    pub selection: SelectionRule,
    pub replicates: u64,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidDistribution("n must be at least 1".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidDistribution("replicates must be at least 1".into()));
        }
        match self.z_law {
            ZLaw::GaussianIid { sd } => ensure_positive("sd", sd)?,
            ZLaw::BoundedUniform { half_width } => ensure_positive("half_width", half_width)?,
            ZLaw::CorrelatedGaussian { correlation } => {
                let lo = if self.n > 1 { -1.0 / (self.n - 1) as f64 } else { -1.0 };
                if !(correlation > lo && correlation < 1.0) {
                    return Err(Error::Domain {
                        what: "correlation",
                        expected: "in (-1/(n-1), 1)",
                        value: correlation,
                    });
                }
            }
            ZLaw::RademacherIid => {}
        }
        match self.selection {
            SelectionRule::Deterministic(i) if i >= self.n => Err(Error::InvalidDistribution(format!(
                "deterministic index {i} out of range for n = {}",
                self.n
            ))),
            SelectionRule::Softmax { beta } if !(beta >= 0.0 && beta.is_finite()) => Err(Error::Domain {
                what: "softmax inverse temperature",
                expected: "a finite number >= 0",
                value: beta,
            }),
            _ => Ok(()),
        }
    }

    /// A stable text rendering, hashed into `config_digest`.
    pub fn canonical(&self) -> String {
        format!(
            "n={};law={};selection={};replicates={};seed={}",
            self.n, self.z_law, self.selection, self.replicates, self.seed
        )
    }
}

struct Sampler {
    n: usize,
    law: ZLaw,
    // CorrelatedGaussian: z = alpha e + beta (Σ e) 1.
    alpha: f64,
    beta: f64,
}

impl Sampler {
    fn new(n: usize, law: ZLaw) -> Self {
        let (alpha, beta) = match law {
            ZLaw::CorrelatedGaussian { correlation } => {
                let alpha = (1.0 - correlation).sqrt();
                let nf = n as f64;
                (alpha, (-alpha + (alpha * alpha + nf * correlation).sqrt()) / nf)
            }
            _ => (1.0, 0.0),
        };
        Sampler { n, law, alpha, beta }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, z: &mut [f64]) {
        match self.law {
            ZLaw::GaussianIid { sd } => z.iter_mut().for_each(|x| {
                let e: f64 = StandardNormal.sample(rng);
                *x = sd * e;
            }),
            ZLaw::RademacherIid => z.iter_mut().for_each(|x| *x = if rng.random::<bool>() { 1.0 } else { -1.0 }),
            ZLaw::BoundedUniform { half_width } => {
                z.iter_mut().for_each(|x| *x = half_width * (2.0 * rng.random::<f64>() - 1.0))
            }
            ZLaw::CorrelatedGaussian { .. } => {
                let mut total = 0.0;
                for x in z.iter_mut() {
                    let e: f64 = StandardNormal.sample(rng);
                    *x = e;
                    total += e;
                }
                z.iter_mut().for_each(|x| *x = self.alpha * *x + self.beta * total);
            }
        }
        debug_assert_eq!(z.len(), self.n);
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.count == 0 {
            return b;
        }
        if b.count == 0 {
            return a;
        }
        let count = a.count + b.count;
        let delta = b.mean - a.mean;
        let (na, nb, n) = (a.count as f64, b.count as f64, count as f64);
        Moments {
            count,
            mean: a.mean + delta * nb / n,
            m2: a.m2 + b.m2 + delta * delta * na * nb / n,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct BlockStats {
    selected: Moments,
    t_counts: Vec<u64>,
    kernel_sums: Vec<f64>,
}

impl BlockStats {
    fn merge(mut a: BlockStats, b: BlockStats) -> BlockStats {
        a.selected = Moments::merge(a.selected, b.selected);
        a.t_counts.iter_mut().zip(&b.t_counts).for_each(|(x, y)| *x += y);
        a.kernel_sums.iter_mut().zip(&b.kernel_sums).for_each(|(x, y)| *x += y);
        a
    }
}

/// Pairwise reduction in a fixed tree over the block order.
fn tree_merge(mut blocks: Vec<BlockStats>) -> BlockStats {
    while blocks.len() > 1 {
        let mut next = Vec::with_capacity(blocks.len().div_ceil(2));
        let mut it = blocks.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => BlockStats::merge(a, b),
                None => a,
            });
        }
        blocks = next;
    }
    blocks.pop().expect("at least one block")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateWithCI {
    pub point: f64,
    pub std_error: f64,
    pub replicates: u64,
}

/// Everything one pass over the replicates produces.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationSummary {
    pub selected: EstimateWithCI,
    /// How often each index was drawn.
    pub t_counts: Vec<u64>,
    /// Average over replicates of the closed-form `P(T = i | Z)`.
    pub kernel_means: Vec<f64>,
}

impl SimulationSummary {
    /// The marginal of `T`, estimated by averaging the closed-form kernel.
    pub fn marginal_estimate(&self) -> Result<SelectionMarginal> {
        SelectionMarginal::renormalized(self.kernel_means.clone(), 1e-9)
    }
}

fn block_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_block(cfg: &GeneratorConfig, sampler: &Sampler, block: u64) -> BlockStats {
    let start = block * BLOCK_SIZE;
    let len = BLOCK_SIZE.min(cfg.replicates - start);
    let mut rng = block_rng(cfg.seed, block);
    let mut z = vec![0.0; cfg.n];
    let mut kernel = vec![0.0; cfg.n];
    let mut stats = BlockStats {
        selected: Moments::default(),
        t_counts: vec![0; cfg.n],
        kernel_sums: vec![0.0; cfg.n],
    };
    for _ in 0..len {
        sampler.draw(&mut rng, &mut z);
        cfg.selection.kernel(&z, &mut kernel);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut t = cfg.n - 1;
        for (i, &p) in kernel.iter().enumerate() {
            acc += p;
            if u < acc {
                t = i;
                break;
            }
        }
        // Guard against the rounding tail of the cumulative sum landing on a zero-probability index.
        while kernel[t] == 0.0 && t > 0 {
            t -= 1;
        }
        stats.selected.push(z[t]);
        stats.t_counts[t] += 1;
        stats.kernel_sums.iter_mut().zip(&kernel).for_each(|(s, k)| *s += k);
    }
    stats
}

/// Draws `cfg.replicates` copies of `(Z, T)`.
pub fn simulate(cfg: &GeneratorConfig) -> Result<SimulationSummary> {
    cfg.validate()?;
    let sampler = Sampler::new(cfg.n, cfg.z_law);
    let blocks = cfg.replicates.div_ceil(BLOCK_SIZE);
    let stats: Vec<BlockStats> = (0..blocks).into_par_iter().map(|b| run_block(cfg, &sampler, b)).collect();
    let total = tree_merge(stats);
    let n = total.selected.count as f64;
    let sd = if total.selected.count > 1 {
        (total.selected.m2 / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(SimulationSummary {
        selected: EstimateWithCI {
            point: total.selected.mean,
            std_error: sd / n.sqrt(),
            replicates: total.selected.count,
        },
        t_counts: total.t_counts,
        kernel_means: total.kernel_sums.iter().map(|s| s / n).collect(),
    })
}

pub fn estimate_selected_mean(cfg: &GeneratorConfig) -> Result<EstimateWithCI> {
    simulate(cfg).map(|s| s.selected)
}

/// Plug-in laws of `P(T = i | Z)` for every `i`, from the closed-form kernel
/// at `min(replicates, CONDITIONAL_SAMPLE_CAP)` sampled `z` (equal weights,
/// equal values merged).
pub fn empirical_conditional_rvs(cfg: &GeneratorConfig) -> Result<Vec<EmpiricalRV>> {
    cfg.validate()?;
    let k = cfg.replicates.min(CONDITIONAL_SAMPLE_CAP) as usize;
    let sampler = Sampler::new(cfg.n, cfg.z_law);
    let mut rng = block_rng(cfg.seed, CONDITIONAL_STREAM);
    let mut z = vec![0.0; cfg.n];
    let mut columns = vec![Vec::with_capacity(k); cfg.n];
    let mut kernel = vec![0.0; cfg.n];
    for _ in 0..k {
        sampler.draw(&mut rng, &mut z);
        cfg.selection.kernel(&z, &mut kernel);
        for (col, &p) in columns.iter_mut().zip(&kernel) {
            col.push(p);
        }
    }
    columns
        .iter()
        .map(|col| EmpiricalRV::uniform(col).map(|rv| rv.merged()))
        .collect()
}

pub fn empirical_conditional_rv(cfg: &GeneratorConfig, i: usize) -> Result<EmpiricalRV> {
    if i >= cfg.n {
        return Err(Error::InvalidDistribution(format!("coordinate {i} out of range for n = {}", cfg.n)));
    }
    Ok(empirical_conditional_rvs(cfg)?.swap_remove(i))
}

/// The exact joint law for Rademacher coordinates: all `2ⁿ` sign vectors.
pub fn exact_joint(cfg: &GeneratorConfig) -> Result<FiniteJointInstance> {
    cfg.validate()?;
    if cfg.z_law != ZLaw::RademacherIid {
        return Err(Error::Unsupported(format!("no finite exact law for {}", cfg.z_law)));
    }
    let m = 1usize.checked_shl(cfg.n as u32).filter(|m| m.saturating_mul(cfg.n) <= ORACLE_SCALE_CAP);
    let Some(m) = m else {
        return Err(Error::ScaleCap {
            what: "exact Rademacher joint (2^n * n)",
            requested: usize::MAX,
            cap: ORACLE_SCALE_CAP,
        });
    };
    let support: Vec<Vec<f64>> = (0..m)
        .map(|bits| (0..cfg.n).map(|i| if bits >> i & 1 == 1 { 1.0 } else { -1.0 }).collect())
        .collect();
    let probs = vec![1.0 / m as f64; m];
    let rule = cfg.selection;
    FiniteJointInstance::with_selection(support, probs, |z| {
        let mut row = vec![0.0; z.len()];
        rule.kernel(z, &mut row);
        row
    })
}

/// `‖Z_i‖_ψ` (Luxemburg) for the coordinate law.
///
/// Exact where a closed form is at hand (Rademacher, Gaussian under the
/// quadratic families); otherwise the Luxemburg norm of a discretization.
/// Uniform laws use atoms at the right ends of [`UNIFORM_QUADRATURE_POINTS`]
/// equal cells, which dominate `|U|` and so never understate the norm.
pub fn coordinate_sigma(law: ZLaw, spec: &OrliczSpec) -> Result<f64> {
    let gaussian_sd = match law {
        ZLaw::GaussianIid { sd } => Some(sd),
        ZLaw::CorrelatedGaussian { .. } => Some(1.0),
        _ => None,
    };
    match (law, spec.family(), gaussian_sd) {
        (ZLaw::RademacherIid, _, _) => luxemburg_norm(&EmpiricalRV::uniform(&[1.0])?, spec),
        (_, OrliczFamily::Power { exponent }, Some(sd)) if *exponent == 2.0 && spec.has_unbounded_domain() => Ok(sd),
        (_, OrliczFamily::SubGaussianQuadratic { scale }, Some(sd)) if spec.has_unbounded_domain() => {
            Ok(scale * sd / std::f64::consts::SQRT_2)
        }
        (_, _, Some(sd)) => {
            // Midpoint rule for the half-normal density on [0, 12 sd].
            let h = GAUSSIAN_QUADRATURE_RANGE / GAUSSIAN_QUADRATURE_POINTS as f64;
            let atoms = (0..GAUSSIAN_QUADRATURE_POINTS).map(|k| {
                let x = (k as f64 + 0.5) * h;
                (sd * x, (-0.5 * x * x).exp())
            });
            luxemburg_norm(&EmpiricalRV::normalized(atoms)?, spec)
        }
        (ZLaw::BoundedUniform { half_width }, _, None) => {
            let k = UNIFORM_QUADRATURE_POINTS as f64;
            let values: Vec<f64> = (1..=UNIFORM_QUADRATURE_POINTS).map(|j| half_width * j as f64 / k).collect();
            luxemburg_norm(&EmpiricalRV::uniform(&values)?, spec)
        }
        _ => unreachable!("every law is covered above"),
    }
}

/// Whether `ln E e^{λ Z_i} ≤ ψ(λ)` is known to hold, which the MGF and soft
/// bounds require. Only the quadratic family is certified: Gaussians with
/// `scale ≥ sd`, Rademacher with `scale ≥ 1`, and uniforms on `[−w, w]` with
/// `scale ≥ w/√3`.
pub fn mgf_hypothesis_holds(law: ZLaw, spec: &OrliczSpec) -> bool {
    let OrliczFamily::SubGaussianQuadratic { scale } = *spec.family() else {
        return false;
    };
    if !spec.has_unbounded_domain() {
        return false;
    }
    let needed = match law {
        ZLaw::GaussianIid { sd } => sd,
        ZLaw::CorrelatedGaussian { .. } => 1.0,
        ZLaw::RademacherIid => 1.0,
        ZLaw::BoundedUniform { half_width } => half_width / 3f64.sqrt(),
    };
    scale >= needed
}

/// One CSV row of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRow {
    pub bound_name: String,
    pub bound_value: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub passed: bool,
    pub seed: u64,
    pub config_digest: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub bound: BoundName,
    /// `estimate − 3 SE − bound` (on `|estimate|` for absolute-value bounds).
    pub gap: f64,
    pub seed: u64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated by {} (seed {})", self.bound, self.gap, self.seed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub estimate: EstimateWithCI,
    pub sigma: f64,
    pub reports: Vec<BoundReport>,
    pub rows: Vec<VerificationRow>,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn row(&self, name: BoundName) -> Option<&VerificationRow> {
        self.rows.iter().find(|r| r.bound_name == name.as_str())
    }
}

/// Computes every applicable bound for `cfg` and checks each against the
/// Monte Carlo estimate: `est − 3 SE ≤ bound`, with `|est|` in place of
/// `est` for bounds on `|E[Z_T]|`.
pub fn verify_bounds(cfg: &GeneratorConfig, spec: &OrliczSpec) -> Result<VerificationReport> {
    cfg.validate()?;
    let summary = simulate(cfg)?;
    let marginal = summary.marginal_estimate()?;
    let sigma = coordinate_sigma(cfg.z_law, spec)?;
    let n = cfg.n;

    let mut reports = vec![orlicz_bound(spec, sigma, n)?];
    if mgf_hypothesis_holds(cfg.z_law, spec) {
        reports.push(mgf_bound(spec, n)?);
        if cfg.z_law == ZLaw::RademacherIid {
            if let Ok(joint) = exact_joint(cfg) {
                reports.push(soft_bound(spec, mutual_information(&joint), InformationKind::MutualInformation)?);
            }
        }
        reports.push(soft_bound(spec, shannon_entropy(&marginal), InformationKind::Entropy)?);
    }
    if spec.has_unbounded_domain() {
        let conditionals = empirical_conditional_rvs(cfg)?;
        reports.push(thm1_conditional_bound_from_rvs(&conditionals, spec, sigma)?);
        reports.push(thm1_marginal_bound(&marginal, spec, sigma)?);
        if let Some(p) = spec.power_exponent() {
            if p > 1.0 {
                reports.push(pnorm_conditional_bound_from_rvs(&conditionals, p, sigma)?);
            }
            reports.push(pnorm_marginal_bound(&marginal, p, sigma)?);
        }
    }

    let digest = digest_hex(&format!("{}|spec={spec}", cfg.canonical()));
    let est = summary.selected;
    let mut rows = Vec::with_capacity(reports.len());
    let mut violations = Vec::new();
    for report in &reports {
        let centre = if report.name.bounds_absolute_value() { est.point.abs() } else { est.point };
        let gap = centre - 3.0 * est.std_error - report.value.to_f64();
        let passed = !(gap > 0.0);
        if !passed {
            violations.push(Violation {
                bound: report.name,
                gap,
                seed: cfg.seed,
            });
        }
        rows.push(VerificationRow {
            bound_name: report.name.to_string(),
            bound_value: report.value.to_f64(),
            estimate: est.point,
            std_error: est.std_error,
            passed,
            seed: cfg.seed,
            config_digest: digest.clone(),
        });
    }
    Ok(VerificationReport {
        estimate: est,
        sigma,
        reports,
        rows,
        violations,
    })
}

/// One row of a parameter sweep over `n` and the softmax inverse temperature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub beta: f64,
    pub bound_name: String,
    pub bound_value: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub passed: bool,
    pub seed: u64,
    pub config_digest: String,
}

/// Runs [`verify_bounds`] for every `(n, β)` with softmax selection.
pub fn sweep(
    z_law: ZLaw,
    ns: &[usize],
    betas: &[f64],
    replicates: u64,
    seed: u64,
    spec: &OrliczSpec,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for &beta in betas {
            let cfg = GeneratorConfig {
                n,
                z_law,
                selection: SelectionRule::Softmax { beta },
                replicates,
                seed,
            };
            let report = verify_bounds(&cfg, spec)?;
            rows.extend(report.rows.into_iter().map(|r| SweepRow {
                n,
                beta,
                bound_name: r.bound_name,
                bound_value: r.bound_value,
                estimate: r.estimate,
                std_error: r.std_error,
                passed: r.passed,
                seed: r.seed,
                config_digest: r.config_digest,
            }));
        }
    }
    Ok(rows)
}

pub fn write_csv<W: io::Write, R: Serialize>(writer: W, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read, T: for<'de> Deserialize<'de>>(reader: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// `bound_value` as an extended real (`inf` in the CSV).
pub fn row_bound(row: &VerificationRow) -> Result<ExtendedReal> {
    ExtendedReal::new(row.bound_value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, z_law: ZLaw, selection: SelectionRule, replicates: u64) -> GeneratorConfig {
        GeneratorConfig {
            n,
            z_law,
            selection,
            replicates,
            seed: 11,
        }
    }

    #[test]
    fn softmax_kernel_closed_form() {
        let mut out = [0.0; 2];
        SelectionRule::Softmax { beta: 1.0 }.kernel(&[1.0, 0.0], &mut out);
        let e = std::f64::consts::E;
        assert!((out[0] - e / (e + 1.0)).abs() < 1e-15);
        let mut u = [0.0; 3];
        SelectionRule::Softmax { beta: 0.0 }.kernel(&[5.0, -3.0, 0.0], &mut u);
        assert_eq!(u, [1.0 / 3.0; 3]);
    }

    #[test]
    fn conditional_rv_examples() {
        let det = cfg(3, ZLaw::GaussianIid { sd: 1.0 }, SelectionRule::Deterministic(0), 500);
        let rv = empirical_conditional_rv(&det, 0).unwrap();
        assert_eq!(rv.atoms().len(), 1);
        assert_eq!(rv.atoms()[0].value, 1.0);
        let uni = cfg(4, ZLaw::RademacherIid, SelectionRule::UniformRandom, 500);
        let rv = empirical_conditional_rv(&uni, 2).unwrap();
        assert_eq!(rv.atoms().len(), 1);
        assert_eq!(rv.atoms()[0].value, 0.25);
    }

    #[test]
    fn centered_selections_average_to_zero() {
        for selection in [SelectionRule::Deterministic(1), SelectionRule::UniformRandom] {
            let e = estimate_selected_mean(&cfg(3, ZLaw::BoundedUniform { half_width: 2.0 }, selection, 200_000)).unwrap();
            assert!(e.point.abs() <= 3.0 * e.std_error + 1e-12, "{selection}: {e:?}");
        }
    }

    #[test]
    fn block_boundaries_do_not_matter_for_counts() {
        let c = cfg(2, ZLaw::RademacherIid, SelectionRule::Argmax, 3 * BLOCK_SIZE + 17);
        let s = simulate(&c).unwrap();
        assert_eq!(s.selected.replicates, 3 * BLOCK_SIZE + 17);
        assert_eq!(s.t_counts.iter().sum::<u64>(), 3 * BLOCK_SIZE + 17);
    }

    #[test]
    fn correlated_gaussian_has_requested_covariance() {
        let sampler = Sampler::new(4, ZLaw::CorrelatedGaussian { correlation: -0.2 });
        let mut rng = block_rng(5, 0);
        let mut z = [0.0; 4];
        let (mut s00, mut s01) = (0.0, 0.0);
        let k = 200_000;
        for _ in 0..k {
            sampler.draw(&mut rng, &mut z);
            s00 += z[0] * z[0];
            s01 += z[0] * z[1];
        }
        assert!((s00 / k as f64 - 1.0).abs() < 0.02);
        assert!((s01 / k as f64 + 0.2).abs() < 0.02);
    }

    #[test]
    fn sigma_closed_forms_match_quadrature() {
        let p3 = OrliczSpec::power(3.0).unwrap();
        // E|N(0,1)|³ = 2√(2/π)
        let exact = (2.0 * (2.0 / std::f64::consts::PI).sqrt()).powf(1.0 / 3.0);
        let got = coordinate_sigma(ZLaw::GaussianIid { sd: 1.0 }, &p3).unwrap();
        assert!((got - exact).abs() < 1e-8, "{got} vs {exact}");
        // ‖U[−1,1]‖_2 = 1/√3, approached from above.
        let p2 = OrliczSpec::power(2.0).unwrap();
        let u = coordinate_sigma(ZLaw::BoundedUniform { half_width: 1.0 }, &p2).unwrap();
        assert!(u >= 1.0 / 3f64.sqrt() && u - 1.0 / 3f64.sqrt() < 1e-4);
        assert_eq!(coordinate_sigma(ZLaw::RademacherIid, &p2).unwrap(), 1.0);
        let sg = OrliczSpec::sub_gaussian(1.0).unwrap();
        let lux = coordinate_sigma(ZLaw::GaussianIid { sd: 2.0 }, &sg).unwrap();
        let tab: OrliczSpec = "tabulated:0/0,1/0.5,2/2,3/4.5".parse().unwrap();
        let quad = coordinate_sigma(ZLaw::GaussianIid { sd: 2.0 }, &tab).unwrap();
        assert!((lux - 2f64.sqrt()).abs() < 1e-15);
        assert!(quad > 0.0);
    }

    #[test]
    fn exact_rademacher_joint() {
        let c = cfg(3, ZLaw::RademacherIid, SelectionRule::Argmax, 10);
        let joint = exact_joint(&c).unwrap();
        assert_eq!(joint.m(), 8);
        assert!(joint.is_centered(0.0));
        // E max of three signs = 1 − 2·P(all −1) = 3/4.
        assert!((joint.exact_selected_mean() - 0.75).abs() < 1e-15);
        assert!(exact_joint(&cfg(30, ZLaw::RademacherIid, SelectionRule::Argmax, 10)).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![VerificationRow {
            bound_name: "OrliczClassical".into(),
            bound_value: f64::INFINITY,
            estimate: 0.1 + 0.2,
            std_error: 1e-300,
            passed: true,
            seed: u64::MAX,
            config_digest: "abc".into(),
        }];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("bound_name,bound_value,estimate,std_error,passed,seed,config_digest\n"));
        let back: Vec<VerificationRow> = read_csv(&buf[..]).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(cfg(0, ZLaw::RademacherIid, SelectionRule::Argmax, 1).validate().is_err());
        assert!(cfg(2, ZLaw::RademacherIid, SelectionRule::Argmax, 0).validate().is_err());
        assert!(cfg(2, ZLaw::RademacherIid, SelectionRule::Deterministic(2), 1).validate().is_err());
        assert!(cfg(3, ZLaw::CorrelatedGaussian { correlation: -0.5 }, SelectionRule::Argmax, 1).validate().is_err());
        assert!(cfg(2, ZLaw::GaussianIid { sd: 0.0 }, SelectionRule::Argmax, 1).validate().is_err());
        assert!(cfg(2, ZLaw::RademacherIid, SelectionRule::Softmax { beta: -1.0 }, 1).validate().is_err());
    }
}
