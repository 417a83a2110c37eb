//! Command-line driver: run a job configuration through the full
//! pipeline, or render an existing report to SVG.
//!
//! Exit codes: 0 when every verification passes, 1 when the pipeline ran
//! but some verification failed (the report is still written), 2 for
//! invalid configurations or I/O problems.

use clap::{Parser, Subcommand};
use tropicharge::error::Error;
use tropicharge::report::{execute, Report};

#[derive(Parser)]
#[command(name = "tropicharge", about = "Exact tropical central charges for canonical bundles of toric Fanos")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a job configuration and write the report (and optional SVG).
    Run {
        /// Path to the JSON job configuration.
        config: String,
        /// Override the truncation order.
        #[arg(long)]
        order: Option<u32>,
        /// Override the random seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Skip the amoeba experiment even if configured.
        #[arg(long)]
        skip_amoeba: bool,
    },
    /// Render an existing report to an SVG figure.
    Render {
        /// Path to a report written by `run`.
        report: String,
        /// Output SVG path.
        out: String,
    },
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::VerificationFailed(_) => 1,
        _ => 2,
    }
}

fn run(config_path: &str, order: Option<u32>, seed: Option<u64>, skip_amoeba: bool) -> i32 {
    let mut cfg = match tropicharge::config::JobConfig::load(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Some(o) = order {
        cfg.truncation_order = o;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = match execute(&cfg, skip_amoeba) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    if let Err(e) = std::fs::write(&cfg.outputs.report, report.to_json()) {
        eprintln!("error writing report: {e}");
        return 2;
    }
    if let Some(svg_path) = &cfg.outputs.svg {
        match tropicharge::render::render_svg(&report) {
            Ok(svg) => {
                if let Err(e) = std::fs::write(svg_path, svg) {
                    eprintln!("error writing svg: {e}");
                    return 2;
                }
            }
            Err(e) => {
                eprintln!("error rendering svg: {e}");
                return 2;
            }
        }
    }
    for check in &report.verifications {
        println!(
            "{} {} (order {})",
            if check.pass { "pass" } else { "FAIL" },
            check.name,
            check.order
        );
    }
    if report.all_pass() {
        println!("all verifications passed");
        0
    } else {
        eprintln!("error: {}", Error::VerificationFailed("see report".into()));
        1
    }
}

fn render(report_path: &str, out: &str) -> i32 {
    let report = match Report::load(report_path) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match tropicharge::render::render_svg(&report) {
        Ok(svg) => {
            if let Err(e) = std::fs::write(out, svg) {
                eprintln!("error writing svg: {e}");
                return 2;
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            config,
            order,
            seed,
            skip_amoeba,
        } => run(&config, order, seed, skip_amoeba),
        Command::Render { report, out } => render(&report, &out),
    };
    std::process::exit(code);
}
