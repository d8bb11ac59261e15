//! Thin command-line front end over the scenario runner.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use triphoton::scenario::{self, RunSummary, ScenarioError};

#[derive(Parser)]
#[command(name = "triphoton", version, about = "triple-photon downconversion lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a TOML config file.
    Run {
        config: PathBuf,
        /// Output directory (default: current directory).
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a shipped preset by name.
    Preset {
        name: String,
        /// Output directory; each scenario writes into a subdirectory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Acknowledge heavy scenarios (pump amplitudes >= sqrt(50)) and,
        /// for `fig6`, run the heavy pump variants as well.
        #[arg(long)]
        heavy: bool,
    },
    /// List the shipped presets.
    List,
}

fn init_threads() {
    if let Ok(n) = std::env::var("TRIPHOTON_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn report(summary: &RunSummary) {
    println!(
        "{}: {} files in {} ({:.2} s){}",
        summary.name,
        summary.files.len(),
        summary.out_dir.display(),
        summary.wall_time_s,
        if summary.all_converged {
            ""
        } else {
            " [convergence check FAILED; see manifest.json]"
        }
    );
}

fn fail(e: ScenarioError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => match scenario::run_file(&config, &out) {
            Ok(summary) => {
                report(&summary);
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Preset { name, out, heavy } => {
            let mut to_run: Vec<(String, scenario::Scenario)> = Vec::new();
            match scenario::preset(&name) {
                Some(s) => to_run.push((name.clone(), s)),
                None => {
                    eprintln!(
                        "error: parse stage failed: unknown preset `{name}` (see `triphoton list`)"
                    );
                    return ExitCode::FAILURE;
                }
            }
            if name == "fig6" && heavy {
                for variant in ["fig6-ap50", "fig6-ap100", "fig6-ap200"] {
                    to_run.push((variant.into(), scenario::preset(variant).expect("shipped")));
                }
            }
            for (pname, s) in &to_run {
                if s.heavy && !heavy {
                    eprintln!(
                        "error: `{pname}` is a heavy scenario ({}); pass --heavy to run it",
                        scenario::cost_estimate(s)
                    );
                    return ExitCode::FAILURE;
                }
            }
            for (pname, s) in &to_run {
                if s.heavy {
                    println!("running heavy scenario {pname}: {}", scenario::cost_estimate(s));
                }
                match scenario::run_scenario(s, &out.join(pname)) {
                    Ok(summary) => report(&summary),
                    Err(e) => return fail(e),
                }
            }
            ExitCode::SUCCESS
        }
        Command::List => {
            for (name, s) in scenario::builtin_scenarios() {
                println!(
                    "{name:<12} alpha_p^2 = {:>5}, {} time(s){}",
                    s.params.alpha_p_sq.unwrap_or_else(|| {
                        s.params.alpha_p.map(|a| a * a).unwrap_or(f64::NAN)
                    }),
                    s.params.times.len(),
                    if s.heavy { "  [heavy]" } else { "" }
                );
            }
            ExitCode::SUCCESS
        }
    }
}
