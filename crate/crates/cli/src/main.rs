//! `groupfair`: generate instances, run mechanisms, verify worst-case
//! families, and audit winners against adversarial groupings and
//! metrics. Exit codes: 0 success, 1 usage error, 2 violated internal
//! invariant (a bound or verification that should be impossible to
//! break).

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use groupfair_cli::ensemble::{gen_random_euclidean, instance_digest};
use groupfair_cli::experiment::{
    report_to_csv, report_to_summary_json, run_experiment, ExperimentConfig, ExperimentError,
};
use groupfair_core::adversary::{
    generate, grid_worst_metric, lp_worst_metric, worst_grouping, FamilyId, FamilyParams, LpOutcome,
};
use groupfair_core::{
    cost_profile, distortion, load_instance, run_mechanism, save_instance, Grouping, Instance,
    MechanismId, Objective, OrdinalProfile,
};

#[derive(Parser)]
#[command(
    name = "groupfair",
    version,
    about = "Group-fair metric voting: mechanisms, adversaries, sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random Euclidean instance file
    Gen {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Force equal-size groups (requires k to divide n)
        #[arg(long)]
        symmetric: bool,
        #[arg(long, default_value = "instance.json")]
        output: PathBuf,
    },
    /// Print the cost of every alternative under both objectives
    Eval {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run one mechanism and report its winner's costs
    Run {
        #[arg(long)]
        mechanism: MechanismId,
        #[arg(long)]
        input: PathBuf,
    },
    /// Build a worst-case family instance and verify its ratio
    Lowerbound {
        #[arg(long)]
        family: FamilyId,
        #[arg(long)]
        lambda: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Defaults to <family>.json
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Adversarial search against a mechanism's winner on one instance
    Audit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        mechanism: MechanismId,
        #[arg(long)]
        objective: Objective,
        #[arg(long, value_enum)]
        mode: AuditMode,
        /// Group count for worst-grouping search (default: the file's)
        #[arg(long)]
        k: Option<usize>,
        /// Restrict worst-grouping search to equal-size groups
        #[arg(long)]
        symmetric: bool,
        /// Grid resolution for grid mode
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        /// Grid extent for grid mode
        #[arg(long, default_value_t = 4.0)]
        span: f64,
        /// Witness path for lp mode
        #[arg(long, default_value = "witness.json")]
        output: PathBuf,
    },
    /// Seeded multi-trial experiment emitting CSV and a JSON summary
    Sweep {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 4)]
        n_min: usize,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        m_min: usize,
        #[arg(long, default_value_t = 4)]
        m_max: usize,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[arg(long, default_value_t = 1)]
        dim_min: usize,
        #[arg(long, default_value_t = 3)]
        dim_max: usize,
        #[arg(long)]
        symmetric: bool,
        /// Comma-separated mechanism ids
        #[arg(long, value_delimiter = ',', default_value = "min-total")]
        mechanisms: Vec<MechanismId>,
        /// Comma-separated objectives
        #[arg(long, value_delimiter = ',', default_value = "max-of-avg")]
        objectives: Vec<Objective>,
        /// Allow pairs without a registered bound (no per-row check)
        #[arg(long)]
        exploratory: bool,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long, default_value = "report.csv")]
        output: PathBuf,
        #[arg(long, default_value = "summary.json")]
        summary: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AuditMode {
    /// Exhaustive search over groupings of the given size
    WorstGrouping,
    /// Worst metric completion of the derived profile
    Lp,
    /// Grid-placement oracle over line metrics
    Grid,
}

enum CliError {
    Usage(String),
    Invariant(String),
}

impl CliError {
    fn usage(e: impl ToString) -> CliError {
        CliError::Usage(e.to_string())
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Invariant(msg)) => {
            eprintln!("invariant failure: {msg}");
            2
        }
    }
}

fn load(path: &Path) -> Result<(Instance, Option<Grouping>), CliError> {
    load_instance(path).map_err(CliError::usage)
}

fn require_groups(grouping: Option<Grouping>, path: &Path) -> Result<Grouping, CliError> {
    grouping.ok_or_else(|| {
        CliError::Usage(format!(
            "{} has no \"groups\" field; this command needs a grouping",
            path.display()
        ))
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gen {
            n,
            m,
            k,
            dim,
            seed,
            trial,
            symmetric,
            output,
        } => {
            let (instance, grouping) = gen_random_euclidean(n, m, k, dim, seed, trial, symmetric)
                .map_err(CliError::usage)?;
            save_instance(&instance, Some(&grouping), &output).map_err(CliError::usage)?;
            println!(
                "wrote {} (n={n}, m={m}, k={k}, dim={dim}, digest={:016x})",
                output.display(),
                instance_digest(&instance)
            );
            Ok(())
        }
        Command::Eval { input } => {
            let (instance, grouping) = load(&input)?;
            let grouping = require_groups(grouping, &input)?;
            println!("alt,max-of-avg,avg-of-max");
            let profiles: Vec<_> = Objective::ALL
                .into_iter()
                .map(|o| cost_profile(&instance, &grouping, o))
                .collect();
            for x in 0..instance.m() {
                println!("{x},{},{}", profiles[0].costs[x], profiles[1].costs[x]);
            }
            for (objective, p) in Objective::ALL.into_iter().zip(&profiles) {
                println!(
                    "optimal ({objective}): {} (cost {})",
                    p.best(),
                    p.min_cost()
                );
            }
            Ok(())
        }
        Command::Run { mechanism, input } => {
            let (instance, grouping) = load(&input)?;
            let grouping = match grouping {
                Some(g) => g,
                None if mechanism.is_group_aware() => {
                    return Err(CliError::Usage(format!(
                        "{mechanism} needs groups, but {} has none",
                        input.display()
                    )))
                }
                None => Grouping::singletons(instance.n()),
            };
            let winner = run_winner(mechanism, &instance, &grouping)?;
            println!("winner: {winner}");
            for objective in Objective::ALL {
                let rep = distortion(&instance, &grouping, objective, winner);
                println!(
                    "{objective}: winner_cost={} opt={} opt_cost={} ratio={}",
                    rep.winner_cost, rep.opt, rep.opt_cost, rep.ratio
                );
            }
            Ok(())
        }
        Command::Lowerbound {
            family,
            lambda,
            k,
            epsilon,
            output,
            tolerance,
        } => {
            let lb =
                generate(family, FamilyParams { lambda, k, epsilon }).map_err(CliError::usage)?;
            let measured = distortion(
                &lb.instance,
                &lb.grouping,
                lb.objective,
                lb.adversarial_winner,
            )
            .ratio;
            println!(
                "family={} objective={} winner={} predicted={} measured={}",
                lb.family, lb.objective, lb.adversarial_winner, lb.predicted_ratio, measured
            );
            if (measured - lb.predicted_ratio).abs() > tolerance {
                return Err(CliError::Invariant(format!(
                    "measured ratio {measured} differs from predicted {} beyond {tolerance}",
                    lb.predicted_ratio
                )));
            }
            let path = output.unwrap_or_else(|| PathBuf::from(format!("{}.json", lb.family)));
            save_instance(&lb.instance, Some(&lb.grouping), &path).map_err(CliError::usage)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Audit {
            input,
            mechanism,
            objective,
            mode,
            k,
            symmetric,
            step,
            span,
            output,
        } => audit(
            &input, mechanism, objective, mode, k, symmetric, step, span, &output,
        ),
        Command::Sweep {
            seed,
            trials,
            n_min,
            n_max,
            m_min,
            m_max,
            k_min,
            k_max,
            dim_min,
            dim_max,
            symmetric,
            mechanisms,
            objectives,
            exploratory,
            tolerance,
            output,
            summary,
        } => {
            let cfg = ExperimentConfig {
                seed,
                trials,
                n: (n_min, n_max),
                m: (m_min, m_max),
                k: (k_min, k_max),
                dims: (dim_min, dim_max),
                symmetric,
                mechanisms,
                objectives,
                exploratory,
                tolerance,
            };
            let report = run_experiment(&cfg).map_err(|e| match e {
                ExperimentError::Config(_) => CliError::Usage(e.to_string()),
                _ => CliError::Invariant(e.to_string()),
            })?;
            write_text(&output, &report_to_csv(&cfg, &report))?;
            write_text(&summary, &report_to_summary_json(&cfg, &report))?;
            println!(
                "wrote {} ({} rows) and {}",
                output.display(),
                report.rows.len(),
                summary.display()
            );
            for entry in &report.summary {
                match entry.max_ratio {
                    Some(max) => println!(
                        "{}/{}: rows={} max={} bound={}",
                        entry.mechanism,
                        entry.objective,
                        entry.rows,
                        max,
                        entry.bound.unwrap_or("none")
                    ),
                    None => println!(
                        "{}/{}: rows={}",
                        entry.mechanism, entry.objective, entry.rows
                    ),
                }
            }
            Ok(())
        }
    }
}

fn run_winner(
    mechanism: MechanismId,
    instance: &Instance,
    grouping: &Grouping,
) -> Result<usize, CliError> {
    run_mechanism(mechanism, instance, grouping).map_err(|e| match e {
        groupfair_core::MechanismError::NoMatchingAlternative => CliError::Invariant(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })
}

#[allow(clippy::too_many_arguments)]
fn audit(
    input: &Path,
    mechanism: MechanismId,
    objective: Objective,
    mode: AuditMode,
    k: Option<usize>,
    symmetric: bool,
    step: f64,
    span: f64,
    output: &Path,
) -> Result<(), CliError> {
    let (instance, file_grouping) = load(input)?;
    match mode {
        AuditMode::WorstGrouping => {
            if mechanism.is_group_aware() {
                return Err(CliError::Usage(format!(
                    "{mechanism} observes the grouping, so its winner is not fixed \
                     while groupings vary; audit a group-oblivious mechanism instead"
                )));
            }
            let k = match (k, &file_grouping) {
                (Some(k), _) => k,
                (None, Some(g)) => g.k(),
                (None, None) => {
                    return Err(CliError::Usage(
                        "pass --k or store groups in the instance file".into(),
                    ))
                }
            };
            // group-oblivious winner: any grouping works for the run
            let winner = run_winner(mechanism, &instance, &Grouping::singletons(instance.n()))?;
            let (worst, ratio) = worst_grouping(&instance, k, objective, winner, symmetric)
                .map_err(CliError::usage)?;
            println!("winner: {winner}");
            println!("worst {objective} ratio over k={k} groupings: {ratio}");
            println!("grouping: {:?}", worst.groups());
            Ok(())
        }
        AuditMode::Lp => {
            let grouping = require_groups(file_grouping, input)?;
            let winner = run_winner(mechanism, &instance, &grouping)?;
            let profile = OrdinalProfile::from_instance(&instance);
            let pins: Option<Vec<Vec<f64>>> = if mechanism.uses_alternative_distances() {
                Some(
                    (0..instance.m())
                        .map(|x| (0..instance.m()).map(|y| instance.alt_alt(x, y)).collect())
                        .collect(),
                )
            } else {
                None
            };
            let outcome = lp_worst_metric(&profile, &grouping, winner, objective, pins.as_deref())
                .map_err(|e| match e {
                    groupfair_core::AdversaryError::LpInfeasible
                    | groupfair_core::AdversaryError::InvalidWitness(_) => {
                        CliError::Invariant(e.to_string())
                    }
                    _ => CliError::Usage(e.to_string()),
                })?;
            println!("winner: {winner}");
            match outcome {
                LpOutcome::Bounded { ratio, witness } => {
                    println!("worst-metric {objective} ratio: {ratio}");
                    save_instance(&witness, Some(&grouping), output).map_err(CliError::usage)?;
                    println!("witness: {}", output.display());
                }
                LpOutcome::Unbounded => println!("worst-metric {objective} ratio: unbounded"),
            }
            Ok(())
        }
        AuditMode::Grid => {
            let grouping = require_groups(file_grouping, input)?;
            let winner = run_winner(mechanism, &instance, &grouping)?;
            let profile = OrdinalProfile::from_instance(&instance);
            let ratio = grid_worst_metric(&profile, &grouping, winner, objective, step, span)
                .map_err(CliError::usage)?;
            println!("winner: {winner}");
            println!("grid {objective} ratio (step {step}, span {span}): {ratio}");
            Ok(())
        }
    }
}
