use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coarse_bell::quadrature::QuadratureSpec;
use coarse_bell::scenario::{
    apply_override, list_scenarios, load_spec, preset, run_oracle_check, run_scenario_with_threads, write_outputs,
    DistributionParams, Grid, ScenarioKind, SweepSpec, SweepVariable,
};
use coarse_bell::{Error, Result};

const EXIT_ORACLE_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(name = "coarse-bell", version, about = "Bell correlations with coarsened measurement references")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named preset and write `<out>` (CSV) and `<out>.json`.
    Run {
        #[arg(long)]
        scenario: String,
        /// `dotted.key=value`, may be repeated.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Run a sweep described by a TOML file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Tabulate the joint frequency/timing angle density.
    Dist {
        #[arg(long, allow_hyphen_values = true)]
        w0: f64,
        #[arg(long, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long)]
        dw: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -5.0)]
        min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 5.0)]
        max: f64,
        #[arg(long, default_value_t = 1001)]
        points: usize,
        #[arg(long, default_value_t = coarse_bell::coarsening::DEFAULT_POLE_EXCLUSION)]
        epsilon: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a preset against an independent Monte Carlo estimate.
    Check {
        #[arg(long)]
        scenario: String,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// List the named presets.
    List,
}

fn with_overrides(mut spec: SweepSpec, overrides: &[String]) -> Result<SweepSpec> {
    for o in overrides {
        spec = apply_override(&spec, o)?;
    }
    Ok(spec)
}

fn threads_or_default(threads: usize) -> usize {
    if threads == 0 {
        rayon::current_num_threads()
    } else {
        threads
    }
}

fn run_and_write(spec: &SweepSpec, out: &std::path::Path, threads: usize) -> Result<()> {
    let result = run_scenario_with_threads(spec, threads_or_default(threads))?;
    write_outputs(&result, out)?;
    eprintln!("{}: {} rows -> {}", spec.scenario, result.rows.len(), out.display());
    Ok(())
}

fn execute(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run {
            scenario,
            overrides,
            out,
            threads,
        } => {
            let spec = with_overrides(preset(&scenario)?, &overrides)?;
            run_and_write(&spec, &out, threads)?;
        }
        Command::Sweep {
            config,
            overrides,
            out,
            threads,
        } => {
            let spec = with_overrides(load_spec(&config)?, &overrides)?;
            run_and_write(&spec, &out, threads)?;
        }
        Command::Dist {
            w0,
            t0,
            dw,
            dt,
            min,
            max,
            points,
            epsilon,
            out,
        } => {
            let spec = SweepSpec {
                scenario: "dist".into(),
                kind: ScenarioKind::Density,
                sweep_variable: SweepVariable::Theta,
                grid: Grid::range(min, max, points),
                seed: 0,
                quadrature: QuadratureSpec::adaptive_simpson(),
                bell: None,
                noise: None,
                distribution: Some(DistributionParams {
                    w0,
                    t0,
                    delta_w: dw,
                    delta_t: dt,
                    epsilon,
                }),
                notes: Vec::new(),
            };
            run_and_write(&spec, &out, 0)?;
        }
        Command::Check {
            scenario,
            overrides,
            samples,
            seed,
            json,
        } => {
            let spec = with_overrides(preset(&scenario)?, &overrides)?;
            let report = run_oracle_check(&spec, samples, seed)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            }
            for c in &report.checks {
                println!(
                    "{:<6} {}: reference {:.6} mc {:.6} (z = {:.2})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.reference,
                    c.mc,
                    c.z
                );
            }
            println!(
                "{} {}: {} points, {:.1}% within 3 SE, max z = {:.2}",
                if report.pass { "PASS" } else { "FAIL" },
                report.scenario,
                report.points.len(),
                100.0 * report.frac_within_3,
                report.max_z
            );
            if !report.pass {
                return Ok(ExitCode::from(EXIT_ORACLE_FAILURE));
            }
        }
        Command::List => {
            for s in list_scenarios() {
                println!("{:<14} {}\n{:<14} {}", s.id, s.description, "", s.parameters);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Numeric { value, error_estimate, .. } = &e {
                eprintln!("  partial value {value:e}, error estimate {error_estimate:e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
