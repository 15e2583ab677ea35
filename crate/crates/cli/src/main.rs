//! `ife3d`: runs IFE convergence studies from a TOML config and/or flags.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use ife3d::config::{parse_raw, RawConfig};
use ife3d::runner;

#[derive(Debug, Parser)]
#[command(name = "ife3d", version, about = "Trilinear IFE convergence studies on Cartesian meshes")]
struct Cli {
    /// TOML configuration file; flags below override its entries.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in problem: sphere, orthocircle or torus_sphere.
    #[arg(long)]
    problem: Option<String>,
    /// Mesh ladder, e.g. `20,30,40`.
    #[arg(long, value_delimiter = ',', value_name = "N,N,...")]
    n: Option<Vec<usize>>,
    #[arg(long)]
    beta_minus: Option<f64>,
    #[arg(long)]
    beta_plus: Option<f64>,
    /// Symmetrization parameter, one of -1, 0, 1.
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<i64>,
    /// σ⁰ = factor · max(β⁻, β⁺).
    #[arg(long)]
    sigma0_factor: Option<f64>,
    /// interpolation, sppife, nppife or ippife.
    #[arg(long)]
    mode: Option<String>,
    /// Pick τ(T) from a random non-coplanar triple instead of the angle rules.
    #[arg(long)]
    wrong_plane: bool,
    /// Single-threaded, bit-reproducible run.
    #[arg(long)]
    deterministic: bool,
    /// per_axis (default) or per_unit.
    #[arg(long)]
    mesh_convention: Option<String>,
    /// length (default) or area.
    #[arg(long)]
    penalty_scaling: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for results.csv, results.md and run.log.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Cli {
    fn overrides(&self) -> RawConfig {
        RawConfig {
            problem: self.problem.clone(),
            beta_minus: self.beta_minus,
            beta_plus: self.beta_plus,
            ladder: self.n.clone(),
            mesh_convention: self.mesh_convention.clone(),
            mode: self.mode.clone(),
            epsilon: self.epsilon,
            sigma0_factor: self.sigma0_factor,
            penalty_scaling: self.penalty_scaling.clone(),
            wrong_plane: self.wrong_plane.then_some(true),
            seed: self.seed,
            output_dir: self.out.clone(),
            deterministic: self.deterministic.then_some(true),
            ..Default::default()
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let base = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_raw(&text)?
        }
        None => RawConfig::default(),
    };
    let config = base.merge(cli.overrides()).resolve()?;
    let outcome = runner::run(&config)?;
    print!("{}", outcome.table.to_markdown());
    eprintln!("wrote {}, {}, {}", outcome.csv.display(), outcome.markdown.display(), outcome.log.display());
    for row in outcome.table.rows.iter().filter(|r| r.failure.is_some()) {
        eprintln!("row {} failed: {}", row.label(), row.failure.as_deref().unwrap_or_default());
    }
    Ok(outcome.success())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
