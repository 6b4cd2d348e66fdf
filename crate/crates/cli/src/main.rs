mod args;
mod config;
mod output;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::Parser;
use log::{error, info};

use args::{BoundArgs, BoundKind, Cli, Command, ConjugateArgs, EntropyArgs, NormArgs, NormKind, SweepArgs, VerifyArgs};
use selbound::bounds::{
    mgf_bound, orlicz_bound, pnorm_conditional_bound, pnorm_marginal_bound, soft_bound, thm1_conditional_bound,
    thm1_marginal_bound,
};
use selbound::mc::{sweep, verify_bounds, write_csv};
use selbound::{
    amemiya_norm, grid_minimize_bound, h_q, luxemburg_norm, mutual_information, shannon_entropy, BoundReport,
    EmpiricalRV, FiniteJointInstance, GeneratorConfig, InformationKind, OracleInput, OracleObjective, OrliczSpec,
    SelectionMarginal,
};

/// Largest drift from one in a typed-in marginal that is silently renormalized.
const MARGINAL_DRIFT: f64 = 1e-9;

/// What a command produced: the artifact and whether every check held.
struct Outcome {
    bytes: Vec<u8>,
    passed: bool,
}

impl Outcome {
    fn value(x: f64) -> Self {
        Outcome { bytes: format!("{}\n", output::number(x)).into_bytes(), passed: true }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();

    let argv = match config::merge(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    info!("resolved config: {cli:?}");

    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if let Some(threads) = cli.global.threads {
        if threads == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    let outcome = match &cli.command {
        Command::Conjugate(a) => conjugate(a)?,
        Command::Norm(a) => norm(a)?,
        Command::Entropy(a) => entropy(a)?,
        Command::Bound(a) => bound(a, cli)?,
        Command::Verify(a) => verify(a, cli)?,
        Command::Sweep(a) => run_sweep(a, cli)?,
    };
    output::emit(&outcome.bytes, cli.global.output.as_deref())
        .with_context(|| format!("cannot write {:?}", cli.global.output))?;
    Ok(outcome.passed)
}

fn conjugate(a: &ConjugateArgs) -> anyhow::Result<Outcome> {
    let s = &a.spec;
    let x = match (a.primal, a.inverse) {
        (true, false) => s.evaluate(a.at)?.to_f64(),
        (true, true) => s.generalized_inverse(a.at)?,
        (false, false) => s.conjugate(a.at)?.to_f64(),
        (false, true) => s.conjugate_inverse(a.at)?,
    };
    Ok(Outcome::value(x))
}

fn norm(a: &NormArgs) -> anyhow::Result<Outcome> {
    let rv = match &a.probs {
        Some(p) if p.len() != a.values.len() => bail!("{} values but {} probabilities", a.values.len(), p.len()),
        Some(p) => EmpiricalRV::new(a.values.iter().copied().zip(p.iter().copied()))?,
        None => EmpiricalRV::uniform(&a.values)?,
    };
    let x = match (a.kind, a.conjugate) {
        (NormKind::Luxemburg, false) => luxemburg_norm(&rv, &a.spec)?,
        (NormKind::Luxemburg, true) => luxemburg_norm(&rv, &a.spec.conjugate_fn())?,
        (NormKind::Amemiya, false) => amemiya_norm(&rv, &a.spec)?.to_f64(),
        (NormKind::Amemiya, true) => amemiya_norm(&rv, &a.spec.conjugate_fn())?.to_f64(),
    };
    Ok(Outcome::value(x))
}

fn read_instance(path: &Path) -> anyhow::Result<FiniteJointInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    text.parse().with_context(|| format!("in instance file {}", path.display()))
}

fn marginal_of(typed: Option<&Vec<f64>>, joint: Option<&FiniteJointInstance>) -> anyhow::Result<SelectionMarginal> {
    match (typed, joint) {
        (Some(p), _) => Ok(SelectionMarginal::renormalized(p.clone(), MARGINAL_DRIFT)?),
        (None, Some(j)) => Ok(j.selection_marginal()),
        (None, None) => bail!("give --marginal or --instance"),
    }
}

fn entropy(a: &EntropyArgs) -> anyhow::Result<Outcome> {
    let joint = a.instance.as_deref().map(read_instance).transpose()?;
    if a.mi {
        return Ok(Outcome::value(mutual_information(joint.as_ref().expect("clap requires --instance"))));
    }
    let m = marginal_of(a.marginal.as_ref(), joint.as_ref())?;
    let x = if a.hq { h_q(&m, a.q.expect("clap requires --q"))? } else { shannon_entropy(&m) };
    Ok(Outcome::value(x))
}

fn bound(a: &BoundArgs, cli: &Cli) -> anyhow::Result<Outcome> {
    let joint = a.instance.as_deref().map(read_instance).transpose()?;
    let spec = || -> anyhow::Result<OrliczSpec> {
        match (&a.spec, a.p) {
            (Some(s), _) => Ok(s.clone()),
            (None, Some(p)) => Ok(OrliczSpec::power(p)?),
            (None, None) => bail!("--kind {:?} needs --spec or --p", a.kind),
        }
    };
    let p = || a.p.or_else(|| a.spec.as_ref().and_then(OrliczSpec::power_exponent)).ok_or_else(|| anyhow!("give --p"));
    let need_joint = || joint.as_ref().ok_or_else(|| anyhow!("--kind {:?} needs --instance", a.kind));
    let marginal = || marginal_of(a.marginal.as_ref(), joint.as_ref());
    let n = || -> anyhow::Result<usize> {
        if let Some(n) = a.n {
            return Ok(n);
        }
        if let Some(j) = &joint {
            return Ok(j.n());
        }
        a.marginal.as_ref().map(Vec::len).ok_or_else(|| anyhow!("give --n"))
    };

    let report: BoundReport = match a.kind {
        BoundKind::Mgf => mgf_bound(&spec()?, n()?)?,
        BoundKind::Orlicz => orlicz_bound(&spec()?, a.sigma, n()?)?,
        BoundKind::SoftMi => {
            let info = match a.info {
                Some(i) => i,
                None => mutual_information(need_joint()?),
            };
            soft_bound(&spec()?, info, InformationKind::MutualInformation)?
        }
        BoundKind::SoftEntropy => {
            let info = match a.info {
                Some(i) => i,
                None => shannon_entropy(&marginal()?),
            };
            soft_bound(&spec()?, info, InformationKind::Entropy)?
        }
        BoundKind::Thm1Conditional => thm1_conditional_bound(need_joint()?, &spec()?, a.sigma)?,
        BoundKind::Thm1Marginal => thm1_marginal_bound(&marginal()?, &spec()?, a.sigma)?,
        BoundKind::PnormConditional => pnorm_conditional_bound(need_joint()?, p()?, a.sigma)?,
        BoundKind::PnormMarginal => pnorm_marginal_bound(&marginal()?, p()?, a.sigma)?,
    };

    let list = |v: &[f64]| v.iter().map(|x| output::number(*x)).collect::<Vec<_>>().join(";");
    let (t, av) = match &report.optimizer_state {
        Some(s) => (list(&s.t), list(&s.a)),
        None => (String::new(), String::new()),
    };
    let mut header = vec!["bound_name", "value", "inputs_digest", "t", "a", "diagnostics"];
    let mut row = vec![
        report.name.to_string(),
        output::number(report.value.to_f64()),
        report.inputs_digest.clone(),
        t,
        av,
        report.diagnostics.join("; "),
    ];

    if let Some(resolution) = a.oracle {
        let objective = match a.kind {
            BoundKind::Thm1Conditional => OracleObjective::ConditionalAmemiya,
            BoundKind::Thm1Marginal => OracleObjective::MarginalAmemiya,
            BoundKind::PnormConditional => OracleObjective::ConditionalPnorm,
            BoundKind::PnormMarginal => OracleObjective::MarginalPnorm,
            other => bail!("no grid oracle for --kind {other:?}"),
        };
        let m;
        let input = match objective {
            OracleObjective::ConditionalAmemiya | OracleObjective::ConditionalPnorm => OracleInput::Joint(need_joint()?),
            _ => {
                m = marginal()?;
                OracleInput::Marginal(&m)
            }
        };
        let grid_spec = match a.kind {
            BoundKind::PnormConditional | BoundKind::PnormMarginal => OrliczSpec::power(p()?)?,
            _ => spec()?,
        };
        let grid = grid_minimize_bound(input, objective, &grid_spec, a.sigma, resolution)?;
        header.extend(["oracle_value", "oracle_slack"]);
        row.extend([output::number(grid.value), output::number(grid.slack)]);
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    w.write_record(&row)?;
    let bytes = output::render(&w.into_inner()?, cli.global.format)?;
    Ok(Outcome { bytes, passed: true })
}

fn verify(a: &VerifyArgs, cli: &Cli) -> anyhow::Result<Outcome> {
    let cfg = GeneratorConfig {
        n: a.n,
        z_law: a.law,
        selection: a.selection,
        replicates: a.replicates,
        seed: cli.global.seed,
    };
    let report = verify_bounds(&cfg, &a.spec)?;
    info!(
        "estimate {} (se {}), sigma {}",
        report.estimate.point, report.estimate.std_error, report.sigma
    );
    for v in &report.violations {
        error!("{v}");
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, &report.rows)?;
    Ok(Outcome { bytes: output::render(&buf, cli.global.format)?, passed: report.passed() })
}

fn run_sweep(a: &SweepArgs, cli: &Cli) -> anyhow::Result<Outcome> {
    let rows = sweep(a.law, &a.n, &a.beta, a.replicates, cli.global.seed, &a.spec)?;
    for r in rows.iter().filter(|r| !r.passed) {
        error!(
            "{} violated at n={} beta={}: estimate {} (se {}) vs bound {} (seed {})",
            r.bound_name, r.n, r.beta, r.estimate, r.std_error, r.bound_value, r.seed
        );
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows)?;
    Ok(Outcome { bytes: output::render(&buf, cli.global.format)?, passed: rows.iter().all(|r| r.passed) })
}
