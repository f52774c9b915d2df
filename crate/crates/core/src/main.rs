use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use stereo_error::scenario::{
    load_config, render_svg, run_sweep, run_sweep_with_model, write_csv, MonteCarloConfig,
};
use stereo_error::scenario::{ScenarioError, SweepResult};
use stereo_error::LensProjection;

/// Depth and range error budgets for pinhole and fisheye stereo rigs.
#[derive(Debug, Parser)]
#[command(name = "stereo-error", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelChoice {
    Pinhole,
    Fisheye,
    Both,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a scenario's sweep and write it as CSV (stdout by default) and SVG.
    Sweep {
        /// Scenario file (JSON)
        #[arg(long)]
        config: PathBuf,
        /// Write the CSV table here instead of stdout
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write an SVG plot of range error against the swept variable
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Override the configured projection; `both` keeps the focal length and plots both laws.
        #[arg(long, value_enum)]
        model: Option<ModelChoice>,
    },
    /// Compare the closed-form range error with the exact geometry over the scenario's sweep.
    Validate {
        /// Scenario file (JSON)
        #[arg(long)]
        config: PathBuf,
        /// Also run the Monte Carlo check at the middle of the sweep.
        #[arg(long)]
        mc: bool,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>, ScenarioError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn sweep(
    config: &Path,
    csv: Option<&Path>,
    svg: Option<&Path>,
    model: Option<ModelChoice>,
) -> Result<(), ScenarioError> {
    let config = load_config(config)?;
    let models = match model {
        None => vec![config.rig.projection],
        Some(ModelChoice::Pinhole) => vec![LensProjection::Pinhole],
        Some(ModelChoice::Fisheye) => vec![LensProjection::EquidistantFisheye],
        Some(ModelChoice::Both) => {
            vec![LensProjection::Pinhole, LensProjection::EquidistantFisheye]
        }
    };
    let results = models
        .into_iter()
        .map(|m| run_sweep_with_model(&config, m))
        .collect::<Result<Vec<SweepResult>, _>>()?;
    let refs: Vec<&SweepResult> = results.iter().collect();

    match csv {
        Some(path) => {
            let mut out = create(path)?;
            write_csv(&refs, &mut out)?;
            out.flush()?;
        }
        None => write_csv(&refs, io::stdout().lock())?,
    }
    if let Some(path) = svg {
        let doc = render_svg(&refs)?;
        let mut out = create(path)?;
        out.write_all(doc.as_bytes())?;
        out.flush()?;
    }
    for r in &results {
        if r.summary.failed_rows > 0 {
            eprintln!(
                "warning: {} of {} {} rows could not be validated",
                r.summary.failed_rows,
                r.rows.len(),
                r.model
            );
        }
    }
    Ok(())
}

fn validate(config: &Path, mc: bool) -> Result<(), ScenarioError> {
    let mut config = load_config(config)?;
    config.validation.enabled = true;
    if mc {
        config
            .validation
            .monte_carlo
            .get_or_insert(MonteCarloConfig {
                sigma_px: config.query.disparity_error_px,
                samples: 100_000,
                seed: 42,
            });
    } else {
        config.validation.monte_carlo = None;
    }
    let result = run_sweep(&config)?;
    let s = &result.summary;
    let var = result.variable.name();

    let mut out = io::stdout().lock();
    writeln!(out, "model: {}", result.model)?;
    writeln!(out, "focal length: {} px", config.focal_px())?;
    writeln!(
        out,
        "rows: {} ({} failed)",
        result.rows.len(),
        s.failed_rows
    )?;
    writeln!(
        out,
        "max analytic range error: {:.6} m at {var} = {}",
        s.max_analytic_range_error_m, s.sweep_value_at_max
    )?;
    if let (Some(dev), Some(at)) = (s.max_oracle_deviation, s.sweep_value_at_max_deviation) {
        writeln!(
            out,
            "max deviation from exact geometry: {dev:.6e} at {var} = {at}"
        )?;
    }
    for row in result.rows.iter().filter(|r| r.failed()) {
        writeln!(
            out,
            "  {var} = {}: {}",
            row.sweep_value,
            row.error.as_ref().unwrap()
        )?;
    }
    if let Some(mc) = &result.monte_carlo {
        writeln!(
            out,
            "monte carlo at {var} = {}: std {:.6} m over {} samples ({} rejected), \
             finite-difference {:.6} m, deviation {:.3}%",
            mc.sweep_value,
            mc.summary.std_range_m,
            mc.summary.sample_count,
            mc.summary.rejected_count,
            mc.oracle_range_error_m,
            100.0 * mc.relative_deviation
        )?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sweep {
            config,
            csv,
            svg,
            model,
        } => sweep(config, csv.as_deref(), svg.as_deref(), *model),
        Command::Validate { config, mc } => validate(config, *mc),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
