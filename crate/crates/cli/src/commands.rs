use graphstate_core::flow::max_flow_value;
use graphstate_core::moments::classify::classify_with;
use graphstate_core::moments::{asymptotic_moments, exact::exact_moment_with, ClassifyOptions};
use graphstate_core::rational::{self, Rational};
use graphstate_core::spectra::{law_density, mp_density};
use graphstate_core::{Budgets, EstimateConfig, MarginalSpec, MomentReport};

use crate::error::{CliError, Result};
use crate::report::{DensityGrid, Deviation, ExactMoment, GraphSummary, NetworkSummary, Predictions, Report};

/// Rescaled moments further than this many standard errors from their
/// limit are flagged by `verify`.
pub const FLAG_SIGMA: f64 = 4.0;

fn check_pmax(p_max: usize) -> Result<()> {
    if p_max == 0 {
        return Err(CliError::Usage("--pmax must be at least 1".into()));
    }
    Ok(())
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        return Err(CliError::Usage("--N must be at least 2".into()));
    }
    Ok(())
}

fn base_report(command: &str, m: &MarginalSpec) -> Report {
    let mut r = Report::new(command);
    r.graph = Some(GraphSummary::of(m));
    r.flow = Some(max_flow_value(m));
    r
}

/// Flow, leading-order moment table, limit law and its predictions.
pub fn cmd_analyze(m: &MarginalSpec, p_max: usize, n: Option<u64>, budgets: &Budgets) -> Result<Report> {
    check_pmax(p_max)?;
    if let Some(n) = n {
        check_n(n)?;
    }
    let mut r = base_report("analyze", m);
    r.network = Some(NetworkSummary::of(m));
    r.moments = asymptotic_moments(m, p_max, budgets)?;
    let options = ClassifyOptions {
        budgets: *budgets,
        posets: Vec::new(),
    };
    let class = classify_with(m, p_max, &options)?;
    let finite = |x: f64| x.is_finite().then_some(x);
    r.predictions = Some(Predictions {
        scale: class.scale.clone(),
        purity_coefficient: class.coefficient(2).map(|c| rational::format(&c)),
        entropy_offset: finite(class.entropy(1.0)),
        n,
        purity: n.and_then(|n| finite(class.purity(n as f64))),
        entropy: n.and_then(|n| finite(class.entropy(n as f64))),
    });
    r.distribution = Some(class.law);
    Ok(r)
}

pub fn cmd_exact(m: &MarginalSpec, n: u64, p_max: usize, budgets: &Budgets) -> Result<Report> {
    check_pmax(p_max)?;
    check_n(n)?;
    let mut r = base_report("exact", m);
    let x = r.flow.unwrap_or(0) as i32;
    for p in 1..=p_max {
        let value = exact_moment_with(m, p, n, budgets)?;
        let approx = rational::to_f64(&value);
        r.exact.push(ExactMoment {
            p,
            n,
            value,
            approx,
            rescaled: approx * (n as f64).powi(x * (p as i32 - 1)),
        });
    }
    Ok(r)
}

fn check_config(config: &EstimateConfig) -> Result<()> {
    if config.trials < 2 {
        return Err(CliError::Usage("--trials must be at least 2".into()));
    }
    if config.p_list.is_empty() || config.p_list.contains(&0) {
        return Err(CliError::Usage("moment orders must be at least 1".into()));
    }
    Ok(())
}

pub fn cmd_simulate(m: &MarginalSpec, n: u64, config: &EstimateConfig) -> Result<Report> {
    check_n(n)?;
    check_config(config)?;
    let mut r = base_report("simulate", m);
    r.estimate = Some(graphstate_core::montecarlo::estimate(m, n, config)?);
    Ok(r)
}

fn rescaled(n: u64, flow: u64, leading: &[MomentReport], est: &graphstate_core::EstimateReport, flag: bool) -> Vec<Deviation> {
    leading
        .iter()
        .filter_map(|lead| {
            let e = est.moment(lead.p)?;
            let scale = (n as f64).powi(flow as i32 * (lead.p as i32 - 1));
            let coefficient = rational::to_f64(&lead.coefficient);
            let (mean, stderr) = (e.mean * scale, e.stderr * scale);
            let diff = mean - coefficient;
            // p = 1 is the trace, constant up to rounding.
            let sigma = (stderr > 1e-12 * coefficient.abs().max(1.0)).then(|| diff / stderr);
            let exceeded = match sigma {
                Some(s) => s.abs() > FLAG_SIGMA,
                None => diff.abs() > 1e-9 * coefficient.abs().max(1.0),
            };
            Some(Deviation {
                n,
                p: lead.p,
                coefficient,
                rescaled_mean: mean,
                rescaled_stderr: stderr,
                sigma,
                flagged: flag && exceeded,
            })
        })
        .collect()
}

/// `analyze` and `simulate` at one `N`, with every rescaled moment checked
/// against its limit. `ladder` adds unflagged rows at further `N`.
pub fn cmd_verify(
    m: &MarginalSpec,
    n: u64,
    config: &EstimateConfig,
    ladder: &[u64],
    budgets: &Budgets,
) -> Result<Report> {
    check_n(n)?;
    check_config(config)?;
    for &l in ladder {
        check_n(l)?;
    }
    let p_max = config.p_list.iter().copied().max().unwrap_or(1);
    let mut r = cmd_analyze(m, p_max, Some(n), budgets)?;
    r.command = "verify".into();
    let flow = r.flow.unwrap_or(0);
    let est = graphstate_core::montecarlo::estimate(m, n, config)?;
    r.deviations = rescaled(n, flow, &r.moments, &est, true);
    for &l in ladder {
        let point = graphstate_core::montecarlo::estimate(m, l, config)?;
        r.ladder.extend(rescaled(l, flow, &r.moments, &point, false));
    }
    r.estimate = Some(est);
    Ok(r)
}

impl Report {
    /// True when `verify` found no deviation above [`FLAG_SIGMA`].
    pub fn all_green(&self) -> bool {
        self.deviations.iter().all(|d| !d.flagged)
    }
}

/// A limit law with a closed-form density.
#[derive(Clone, Debug, PartialEq)]
pub enum DistFamily {
    FussCatalan { s: usize },
    FreePoisson { c: Rational },
}

/// The density of `family` sampled at `grid` equally spaced points of its
/// support, the left end excluded.
pub fn cmd_dist(family: &DistFamily, grid: usize) -> Result<Report> {
    if grid == 0 {
        return Err(CliError::Usage("--grid must be at least 1".into()));
    }
    let (name, parameter, density) = match family {
        DistFamily::FussCatalan { s } => ("fc", format!("s={s}"), law_density(*s)?),
        DistFamily::FreePoisson { c } => ("mp", format!("c={}", rational::format(c)), mp_density(rational::to_f64(c))?),
    };
    let mut r = Report::new("dist");
    r.density = Some(DensityGrid {
        family: name.into(),
        parameter,
        support: [density.support.0, density.support.1],
        atom: density.atom,
        points: density.grid(grid).into_iter().map(|(x, y)| [x, y]).collect(),
    });
    Ok(r)
}
