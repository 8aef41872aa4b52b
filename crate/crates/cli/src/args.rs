use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "fso-secrecy", version, about = "Secrecy outage metrics for FSO links under correlated Malaga fading")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact secrecy outage probability over a mu1 or rho sweep.
    Sop(RunArgs),
    /// Exact probability of non-zero secrecy capacity.
    Pnzsc(RunArgs),
    /// High-SNR approximation of the SOP and its slope.
    Asymptotic(RunArgs),
    /// SOP across a rho grid and the maximizing rho.
    SweepRho(RunArgs),
    /// Draw correlated SNR pairs to CSV with a metadata sidecar.
    Sample(RunArgs),
    /// Cross-check the closed forms against the oracles.
    Validate(RunArgs),
    /// Tabulate the joint or marginal SNR density.
    Pdf(RunArgs),
}

impl Command {
    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Sop(a)
            | Command::Pnzsc(a)
            | Command::Asymptotic(a)
            | Command::SweepRho(a)
            | Command::Sample(a)
            | Command::Validate(a)
            | Command::Pdf(a) => a,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Sop(_) => "sop",
            Command::Pnzsc(_) => "pnzsc",
            Command::Asymptotic(_) => "asymptotic",
            Command::SweepRho(_) => "sweep-rho",
            Command::Sample(_) => "sample",
            Command::Validate(_) => "validate",
            Command::Pdf(_) => "pdf",
        }
    }
}

/// Every value is kept as text here and parsed once, together with the
/// config file, so that errors name the offending field.
#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// strong, moderate or weak
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub b0: Option<String>,
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long)]
    pub omega1: Option<String>,
    #[arg(long)]
    pub omega_prime: Option<String>,
    #[arg(long)]
    pub phi_a: Option<String>,
    #[arg(long)]
    pub phi_b: Option<String>,
    /// v or start:stop:step
    #[arg(long)]
    pub mu1_db: Option<String>,
    #[arg(long)]
    pub mu2_db: Option<String>,
    /// v or start:stop:step
    #[arg(long)]
    pub rho: Option<String>,
    #[arg(long)]
    pub rs: Option<String>,
    /// nats or bits
    #[arg(long)]
    pub rs_unit: Option<String>,
    #[arg(long)]
    pub t_max: Option<String>,
    #[arg(long)]
    pub rel_tol: Option<String>,
    #[arg(long)]
    pub quad_order: Option<String>,
    /// factorial_t or gamma_t
    #[arg(long)]
    pub denominator: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// linear SNR values for `pdf`, v or start:stop:step
    #[arg(long)]
    pub gamma1: Option<String>,
    #[arg(long)]
    pub gamma2: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    /// key = value file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also write a gnuplot script next to --out.
    #[arg(long)]
    pub plot: bool,
    /// Print the effective configuration and exit.
    #[arg(long)]
    pub dump_config: bool,
}

impl RunArgs {
    /// Flags that were given, keyed like the config file.
    pub fn flag_map(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("preset", &self.preset),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("b0", &self.b0),
            ("delta", &self.delta),
            ("omega", &self.omega),
            ("omega1", &self.omega1),
            ("omega_prime", &self.omega_prime),
            ("phi_a", &self.phi_a),
            ("phi_b", &self.phi_b),
            ("mu1_db", &self.mu1_db),
            ("mu2_db", &self.mu2_db),
            ("rho", &self.rho),
            ("rs", &self.rs),
            ("rs_unit", &self.rs_unit),
            ("t_max", &self.t_max),
            ("rel_tol", &self.rel_tol),
            ("quad_order", &self.quad_order),
            ("denominator", &self.denominator),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("gamma1", &self.gamma1),
            ("gamma2", &self.gamma2),
            ("out", &self.out),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.trim().to_string())))
            .collect()
    }
}
