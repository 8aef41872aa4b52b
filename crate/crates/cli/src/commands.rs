use fso_secrecy::channel::{joint_pdf, marginal_pdf, sample_pair, CorrelatedLink, MalagaParams, Preset};
use fso_secrecy::oracle::{normalization_check, pnzsc_mc, sop_mc, sop_quad2d};
use fso_secrecy::secrecy::{critical_rho, pnzsc_exact, sop_asymptotic, sop_exact};
use rayon::prelude::*;

use crate::args::Command;
use crate::error::{CliError, CliResult};
use crate::output::{num, value, Table};
use crate::settings::{db_to_linear, RunConfig};

const VALIDATE_SAMPLES: usize = 1_000_000;
const QUAD2D_ABS_TOL: f64 = 1e-8;
const QUAD2D_REL_TOL: f64 = 1e-3;
const NORMALIZATION_TOL: f64 = 1e-3;
const CONSISTENCY_TOL: f64 = 1e-4;
const MC_SIGMAS: f64 = 3.0;

pub fn run(command: &Command) -> CliResult<()> {
    let cfg = RunConfig::from_args(command.args())?;
    if command.args().dump_config {
        print!("{}", cfg.dump());
        return Ok(());
    }
    if command.args().plot && cfg.out.is_none() {
        return Err(CliError::invalid("plot", "needs --out"));
    }
    match command {
        Command::Sop(_) => metric(&cfg, "sop", Metric::Sop),
        Command::Pnzsc(_) => metric(&cfg, "pnzsc", Metric::Pnzsc),
        Command::Asymptotic(_) => metric(&cfg, "asymptotic", Metric::Asymptotic),
        Command::SweepRho(_) => sweep_rho(&cfg),
        Command::Sample(_) => sample(&cfg),
        Command::Validate(_) => validate(&cfg),
        Command::Pdf(_) => pdf(&cfg),
    }
    .and_then(|plot| match (plot, &cfg.out) {
        (Some((table, x, y, log_y)), Some(path)) if command.args().plot => table.write_plot(path, x, y, log_y),
        _ => Ok(()),
    })
}

type Plot = Option<(Table, usize, usize, bool)>;

#[derive(Clone, Copy, PartialEq)]
enum Metric {
    Sop,
    Pnzsc,
    Asymptotic,
}

fn link(params: MalagaParams, mu1_db: f64, mu2_db: f64, rho: f64) -> CliResult<CorrelatedLink> {
    Ok(CorrelatedLink::new(params, db_to_linear(mu1_db), db_to_linear(mu2_db), rho)?)
}

/// (μ1 dB, ρ) points with at most one of the two swept.
fn sweep_points(cfg: &RunConfig) -> CliResult<Vec<(f64, f64)>> {
    let (mu1, rho) = (cfg.mu1_list()?, cfg.rho_list()?);
    if mu1.len() > 1 && rho.len() > 1 {
        return Err(CliError::invalid("rho", "sweep one of mu1_db or rho, not both"));
    }
    Ok(mu1.iter().flat_map(|&m| rho.iter().map(move |&r| (m, r))).collect())
}

fn metric(cfg: &RunConfig, command: &str, which: Metric) -> CliResult<Plot> {
    let params = cfg.params()?;
    let mu2 = cfg.mu2()?;
    let points = sweep_points(cfg)?;
    let target = if which == Metric::Pnzsc { cfg.target_for(0.0)? } else { cfg.target()? };
    let rs = if which == Metric::Pnzsc { 0.0 } else { cfg.rs.unwrap_or(0.0) };
    let rows = points
        .par_iter()
        .map(|&(m, r)| -> CliResult<(f64, Option<f64>, Vec<String>)> {
            let l = link(params, m, mu2, r)?;
            match which {
                Metric::Sop => Ok((sop_exact(&l, &target, &cfg.num)?.value, None, Vec::new())),
                Metric::Pnzsc => Ok((pnzsc_exact(&l, &cfg.num)?.value, None, Vec::new())),
                Metric::Asymptotic => {
                    let a = sop_asymptotic(&l, &target, &cfg.num)?;
                    Ok((a.value, Some(a.slope), a.warnings))
                }
            }
        })
        .collect::<CliResult<Vec<_>>>()?;
    let header: &[&'static str] = if which == Metric::Asymptotic {
        &["mu1_db", "mu2_db", "rho", "rs", "value", "slope"]
    } else {
        &["mu1_db", "mu2_db", "rho", "rs", "value"]
    };
    let mut table = Table::new(cfg, command, header);
    let mut warned = std::collections::BTreeSet::new();
    for (&(m, r), (v, slope, warnings)) in points.iter().zip(rows) {
        let mut cells = vec![num(m), num(mu2), num(r), num(rs), value(v)];
        if let Some(s) = slope {
            cells.push(num(s));
        }
        table.row(&cells);
        for w in warnings {
            if warned.insert(w.clone()) {
                eprintln!("warning: {w}");
            }
        }
    }
    table.emit(cfg)?;
    let x = if cfg.mu1_list()?.len() > 1 { 1 } else { 3 };
    Ok(Some((table, x, 5, true)))
}

fn sweep_rho(cfg: &RunConfig) -> CliResult<Plot> {
    let params = cfg.params()?;
    let mu1 = RunConfig::single("mu1_db", cfg.mu1_list()?)?;
    let mu2 = cfg.mu2()?;
    let grid = cfg.rho_list()?;
    let target = cfg.target()?;
    let l = link(params, mu1, mu2, grid[0])?;
    let c = critical_rho(&l, &target, &cfg.num, grid)?;
    let mut table = Table::new(cfg, "sweep-rho", &["mu1_db", "mu2_db", "rho", "rs", "value"]);
    for &(r, v) in &c.sop_curve {
        table.row(&[num(mu1), num(mu2), num(r), num(cfg.rs.unwrap_or(0.0)), value(v)]);
    }
    table.comment(&format!("rho_star={}", c.rho_star));
    table.emit(cfg)?;
    Ok(Some((table, 3, 5, true)))
}

fn sample(cfg: &RunConfig) -> CliResult<Plot> {
    let params = cfg.params()?;
    let out = cfg.out.as_ref().ok_or_else(|| CliError::invalid("out", "required for sample"))?;
    let count = cfg.samples.ok_or_else(|| CliError::invalid("samples", "required for sample"))?;
    let l = link(
        params,
        RunConfig::single("mu1_db", cfg.mu1_list()?)?,
        cfg.mu2()?,
        RunConfig::single("rho", cfg.rho_list()?)?,
    )?;
    let batch = sample_pair(&l, count, cfg.seed)?;
    batch
        .write(out)
        .map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    eprintln!("wrote {count} pairs to {}", out.display());
    Ok(None)
}

fn pdf(cfg: &RunConfig) -> CliResult<Plot> {
    let params = cfg.params()?;
    let g1 = cfg.gamma1.as_deref().ok_or_else(|| CliError::invalid("gamma1", "required for pdf"))?;
    let mu1 = RunConfig::single("mu1_db", cfg.mu1_list()?)?;
    let table = match cfg.gamma2.as_deref() {
        None => {
            let mut t = Table::new(cfg, "pdf", &["gamma1", "pdf"]);
            for &g in g1 {
                t.row(&[num(g), value(marginal_pdf(&params, db_to_linear(mu1), g, &cfg.num)?)]);
            }
            t
        }
        Some(g2) => {
            let l = link(params, mu1, cfg.mu2()?, RunConfig::single("rho", cfg.rho_list()?)?)?;
            let mut t = Table::new(cfg, "pdf", &["gamma1", "gamma2", "pdf"]);
            for &a in g1 {
                for &b in g2 {
                    t.row(&[num(a), num(b), value(joint_pdf(&l, a, b, &cfg.num)?)]);
                }
            }
            t
        }
    };
    table.emit(cfg)?;
    let y = if cfg.gamma2.is_some() { 3 } else { 2 };
    Ok(Some((table, 1, y, false)))
}

struct Check {
    name: &'static str,
    point: String,
    value: f64,
    reference: f64,
    tolerance: String,
    pass: bool,
}

fn validate(cfg: &RunConfig) -> CliResult<Plot> {
    let channels: Vec<(String, MalagaParams)> = match cfg.params {
        Some(p) => vec![(cfg.preset.map(|p| p.to_string()).unwrap_or_else(|| "custom".into()), p)],
        None => [Preset::Strong, Preset::Weak].iter().map(|p| (p.to_string(), p.params())).collect(),
    };
    let rhos = cfg.rho.clone().unwrap_or_else(|| vec![0.1, 0.5, 0.9]);
    let mu1s = cfg.mu1_db.clone().unwrap_or_else(|| vec![10.0, 30.0, 50.0]);
    let mu2 = cfg.mu2_db.unwrap_or(5.0);
    let rates = match cfg.rs {
        Some(r) if r > 0.0 => vec![0.0, r],
        _ => vec![0.0, 0.5],
    };
    let samples = cfg.samples.unwrap_or(VALIDATE_SAMPLES);
    let mut checks = Vec::new();
    for (name, params) in &channels {
        for &rho in &rhos {
            let l = link(*params, mu1s[0], mu2, rho)?;
            let dev = normalization_check(&l, &cfg.num)?;
            checks.push(Check {
                name: "normalization",
                point: format!("{name} rho={rho} mu1={}dB", mu1s[0]),
                value: 1.0 + dev,
                reference: 1.0,
                tolerance: format!("abs {NORMALIZATION_TOL:e}"),
                pass: dev.abs() < NORMALIZATION_TOL,
            });
            for &mu1 in &mu1s {
                let l = link(*params, mu1, mu2, rho)?;
                let point = format!("{name} rho={rho} mu1={mu1}dB");
                let mut sop0 = None;
                for &rs in &rates {
                    let t = cfg.target_for(rs)?;
                    let exact = sop_exact(&l, &t, &cfg.num)?.value;
                    if rs == 0.0 {
                        sop0 = Some(exact);
                    }
                    let q = sop_quad2d(&l, &t, QUAD2D_ABS_TOL)?;
                    checks.push(Check {
                        name: "sop vs quad2d",
                        point: format!("{point} rs={rs}"),
                        value: exact,
                        reference: q,
                        tolerance: format!("rel {QUAD2D_REL_TOL:e}"),
                        pass: (exact - q).abs() <= QUAD2D_REL_TOL * q.abs(),
                    });
                    let mc = sop_mc(&l, &t, samples, cfg.seed)?;
                    checks.push(Check {
                        name: "sop vs mc",
                        point: format!("{point} rs={rs}"),
                        value: exact,
                        reference: mc.value,
                        tolerance: format!("{MC_SIGMAS} SE = {:.2e}", MC_SIGMAS * mc.std_error),
                        pass: mc.covers(exact, MC_SIGMAS),
                    });
                }
                let p = pnzsc_exact(&l, &cfg.num)?.value;
                let mc = pnzsc_mc(&l, samples, cfg.seed)?;
                checks.push(Check {
                    name: "pnzsc vs mc",
                    point: point.clone(),
                    value: p,
                    reference: mc.value,
                    tolerance: format!("{MC_SIGMAS} SE = {:.2e}", MC_SIGMAS * mc.std_error),
                    pass: mc.covers(p, MC_SIGMAS),
                });
                if let Some(s) = sop0 {
                    checks.push(Check {
                        name: "pnzsc = 1 - sop(0)",
                        point,
                        value: p,
                        reference: 1.0 - s,
                        tolerance: format!("abs {CONSISTENCY_TOL:e}"),
                        pass: (p - (1.0 - s)).abs() < CONSISTENCY_TOL,
                    });
                }
            }
        }
    }
    let mut report = String::new();
    for c in &checks {
        report.push_str(&format!(
            "{:<20} {:<36} {:>20} {:>20} {:>22}  {}\n",
            c.name,
            c.point,
            value(c.value),
            value(c.reference),
            c.tolerance,
            if c.pass { "PASS" } else { "FAIL" }
        ));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    report.push_str(&format!("{} checks, {failed} failed\n", checks.len()));
    match &cfg.out {
        Some(path) => std::fs::write(path, &report).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{report}"),
    }
    if failed > 0 {
        return Err(CliError::ValidationFailed(failed));
    }
    Ok(None)
}
