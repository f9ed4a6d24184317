//! Command-line front end: load games, run solve/purify/verify flows, emit
//! machine-readable reports and plot-ready tables.
//!
//! Exit codes: 0 success (converged / verified / no violations), 1 the run
//! finished but the check did not pass, 2 invalid input (bad file, unknown
//! fixture, malformed profile), 3 a decomposition was required but missing.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bayespurify::dcpi::VerifyOptions;
use bayespurify::fixtures::FIXTURE_NAMES;
use bayespurify::io::{
    load_decomposition, load_game, read_strategy_csv, solve_report_json, write_pure_csv,
    write_strategy_csv,
};
use bayespurify::{
    fixture, payoff_security_probe, purified_equilibrium, purify_profile, solve_behavioral,
    verify_dcpi, verify_purification, BayesGame, DcpiDecomposition, FixtureParams, PurifyOptions,
    SolveOptions,
};

#[derive(Parser)]
#[command(
    name = "bayespurify",
    about = "Bayesian games on grids: solve, purify, verify decompositions, probe payoff security",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GameSource {
    /// Game description JSON file.
    #[arg(long, conflicts_with = "fixture")]
    game: Option<PathBuf>,
    /// Built-in fixture name (see `fixtures list`).
    #[arg(long)]
    fixture: Option<String>,
    /// Cycle length / branch count (cyclic, necessity).
    #[arg(long)]
    m: Option<usize>,
    /// Fine cells per player (1-D types) or per dimension (2-D types).
    #[arg(long)]
    cells: Option<usize>,
    /// Fine cells per coarse cell.
    #[arg(long)]
    coarse_factor: Option<usize>,
    /// Action grid size.
    #[arg(long)]
    actions: Option<usize>,
    /// State count for the all-pay fixture (1 = complete information).
    #[arg(long)]
    states: Option<usize>,
    /// Decomposition JSON file (defaults to the fixture's own, if any).
    #[arg(long)]
    decomp: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Solver / verification tolerance.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1.0)]
    damping: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker cap; computations are sequential, so any value reproduces the
    /// same results.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Output directory (default: BAYESPURIFY_OUT_DIR or the working dir).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for a behavioral ε-equilibrium and write report + strategy CSV.
    Solve {
        #[command(flatten)]
        source: GameSource,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Solve, purify, verify; write purify report + pure-strategy CSV.
    Purify {
        #[command(flatten)]
        source: GameSource,
        #[command(flatten)]
        opts: CommonOpts,
        /// Support threshold for belief consistency.
        #[arg(long, default_value_t = 1e-12)]
        support_eps: f64,
        /// Verification tolerance (defaults to the quantization bound).
        #[arg(long)]
        verify_tol: Option<f64>,
        /// Behavioral profile to purify (strategy CSV); default: solve first.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Verify a DCPI decomposition against its game.
    VerifyDcpi {
        #[command(flatten)]
        source: GameSource,
        #[command(flatten)]
        opts: CommonOpts,
        /// Cap on scanned action profiles (default: all).
        #[arg(long)]
        action_sample: Option<usize>,
    },
    /// Probe uniform payoff security on the all-pay fixture.
    ProbeSecurity {
        #[command(flatten)]
        source: GameSource,
        #[command(flatten)]
        opts: CommonOpts,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 10000)]
        samples: usize,
    },
    /// Fixture registry operations.
    Fixtures {
        #[command(subcommand)]
        op: FixturesOp,
    },
}

#[derive(Subcommand)]
enum FixturesOp {
    /// List the built-in fixtures.
    List,
}

struct Loaded {
    game: BayesGame,
    decomp: Option<DcpiDecomposition>,
    allpay: Option<bayespurify::fixtures::AllPaySpec>,
    label: String,
}

fn load(source: &GameSource) -> anyhow::Result<Loaded> {
    let loaded = if let Some(path) = &source.game {
        let game = load_game(path)
            .map_err(|e| anyhow::anyhow!("failed to load game file {}: {e}", path.display()))?;
        Loaded {
            game,
            decomp: None,
            allpay: None,
            label: path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "game".into()),
        }
    } else if let Some(name) = &source.fixture {
        let params = FixtureParams {
            cells: source.cells,
            coarse_factor: source.coarse_factor,
            actions: source.actions,
            m: source.m,
            states: source.states,
        };
        let built = fixture(name, &params)?;
        Loaded {
            label: built.name.clone(),
            game: built.game,
            decomp: built.decomp,
            allpay: built.allpay,
        }
    } else {
        anyhow::bail!("either --game or --fixture is required");
    };
    let mut loaded = loaded;
    if let Some(path) = &source.decomp {
        let decomp = load_decomposition(path, &loaded.game).map_err(|e| {
            anyhow::anyhow!("failed to load decomposition {}: {e}", path.display())
        })?;
        loaded.decomp = Some(decomp);
    }
    Ok(loaded)
}

fn out_dir(opts: &CommonOpts) -> PathBuf {
    opts.out_dir
        .clone()
        .or_else(|| std::env::var_os("BAYESPURIFY_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_json(path: &Path, value: &serde_json::Value) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn validate_or_fail(game: &BayesGame) -> anyhow::Result<()> {
    let report = game.validate();
    if !report.passed {
        let failures: Vec<String> = report
            .items
            .iter()
            .filter(|it| !it.passed)
            .map(|it| format!("{}: {}", it.check, it.detail))
            .collect();
        anyhow::bail!("game validation failed:\n  {}", failures.join("\n  "));
    }
    Ok(())
}

fn check_common(opts: &CommonOpts) -> anyhow::Result<()> {
    if !opts.tol.is_finite() || opts.tol <= 0.0 {
        anyhow::bail!("--tol must be positive, got {}", opts.tol);
    }
    if !opts.damping.is_finite() || opts.damping <= 0.0 || opts.damping > 1.0 {
        anyhow::bail!("--damping must lie in (0, 1], got {}", opts.damping);
    }
    Ok(())
}

fn run() -> anyhow::Result<u8> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Solve { opts, .. }
        | Command::Purify { opts, .. }
        | Command::VerifyDcpi { opts, .. }
        | Command::ProbeSecurity { opts, .. } => check_common(opts)?,
        Command::Fixtures { .. } => {}
    }
    match cli.command {
        Command::Solve { source, opts } => {
            let loaded = load(&source)?;
            validate_or_fail(&loaded.game)?;
            let report = solve_behavioral(
                &loaded.game,
                loaded.decomp.as_ref(),
                SolveOptions {
                    max_iters: opts.max_iters,
                    tol: opts.tol,
                    damping: opts.damping,
                    seed: opts.seed,
                },
            );
            let dir = out_dir(&opts);
            write_json(
                &dir.join(format!("{}_solve.json", loaded.label)),
                &solve_report_json(&report),
            )?;
            let mut csv = Vec::new();
            write_strategy_csv(&mut csv, &report.profile)?;
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join(format!("{}_strategy.csv", loaded.label)), csv)?;
            println!(
                "solve: {} iterations, max gap {:.3e}, converged = {}",
                report.iterations,
                report.gaps.iter().cloned().fold(0.0f64, f64::max),
                report.converged
            );
            Ok(if report.converged { 0 } else { 1 })
        }
        Command::Purify {
            source,
            opts,
            support_eps,
            verify_tol,
            profile,
        } => {
            let loaded = load(&source)?;
            validate_or_fail(&loaded.game)?;
            let decomp = match loaded.decomp.as_ref() {
                Some(d) => d,
                None => {
                    eprintln!("this game has no decomposition; supply one with --decomp");
                    return Ok(3);
                }
            };
            // Purification leans on the decomposition's interim payoffs;
            // verify it first (sampled action profiles) so a bad file fails
            // loudly instead of quietly skewing the rounding.
            let precheck = verify_dcpi(
                &loaded.game,
                decomp,
                opts.tol.max(1e-8),
                VerifyOptions {
                    action_sample: Some(64),
                },
            )?;
            if !precheck.pass {
                anyhow::bail!(
                    "decomposition failed verification: reconstruction {:?}, measurability spread {:.3e}",
                    precheck.reconstruction_error,
                    precheck.max_measurability_spread
                );
            }
            let purify_opts = PurifyOptions {
                support_eps,
                seed: opts.seed,
            };
            let result = match &profile {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    let behavioral = read_strategy_csv(&text, &loaded.game).map_err(|e| {
                        anyhow::anyhow!("profile file {}: {e}", path.display())
                    })?;
                    purify_profile(&loaded.game, decomp, behavioral, purify_opts)?
                }
                None => purified_equilibrium(
                    &loaded.game,
                    decomp,
                    SolveOptions {
                        max_iters: opts.max_iters,
                        tol: opts.tol,
                        damping: opts.damping,
                        seed: opts.seed,
                    },
                    purify_opts,
                )?,
            };
            // Quantization bound: max fine-cell mass relative to its coarse
            // cell, times half the action count.
            let bound = (0..loaded.game.num_players())
                .map(|i| {
                    let space = loaded.game.space(i);
                    let actions = loaded.game.action_grid(i).len() as f64;
                    (0..space.coarse().len())
                        .map(|d| {
                            let dm = space.coarse().mass(d);
                            let mm = space
                                .coarse()
                                .members(d)
                                .iter()
                                .map(|&t| space.mass(t))
                                .fold(0.0f64, f64::max);
                            if dm > 0.0 {
                                0.5 * actions * mm / dm
                            } else {
                                0.0
                            }
                        })
                        .fold(0.0f64, f64::max)
                })
                .fold(0.0f64, f64::max);
            let tol = verify_tol.unwrap_or(bound.max(opts.tol));
            let verdict = verify_purification(
                &loaded.game,
                &result.behavioral,
                &result.pure,
                tol,
                support_eps,
                opts.seed,
            );
            let dir = out_dir(&opts);
            std::fs::create_dir_all(&dir)?;
            write_json(
                &dir.join(format!("{}_purify.json", loaded.label)),
                &serde_json::json!({
                    "purify": result.purify,
                    "verify": verdict,
                    "behavioral_gaps": result.behavioral_gaps,
                    "pure_gaps": result.pure_gaps,
                    "bound_constant": result.bound_constant,
                    "mass_residual": result.mass_residual,
                }),
            )?;
            let mut csv = Vec::new();
            write_pure_csv(&mut csv, &result.pure)?;
            std::fs::write(dir.join(format!("{}_pure.csv", loaded.label)), csv)?;
            println!(
                "purify: max conditional TV {:.3e}, pure gap {:.3e}, behavioral gap {:.3e}, verified = {}",
                result.purify.max_conditional_tv(),
                result.pure_gaps.iter().cloned().fold(0.0f64, f64::max),
                result.behavioral_gaps.iter().cloned().fold(0.0f64, f64::max),
                verdict.pass
            );
            Ok(if verdict.pass { 0 } else { 1 })
        }
        Command::VerifyDcpi {
            source,
            opts,
            action_sample,
        } => {
            let loaded = load(&source)?;
            let decomp = match loaded.decomp.as_ref() {
                Some(d) => d,
                None => {
                    eprintln!("this game has no decomposition; supply one with --decomp");
                    return Ok(3);
                }
            };
            let report = verify_dcpi(
                &loaded.game,
                decomp,
                opts.tol,
                VerifyOptions { action_sample },
            )?;
            let dir = out_dir(&opts);
            write_json(
                &dir.join(format!("{}_dcpi.json", loaded.label)),
                &serde_json::to_value(&report)?,
            )?;
            println!(
                "verify-dcpi: reconstruction {:?}, measurability spread {:.3e}, pass = {}",
                report.reconstruction_error, report.max_measurability_spread, report.pass
            );
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::ProbeSecurity {
            source,
            opts,
            epsilon,
            samples,
        } => {
            let loaded = load(&source)?;
            let spec = loaded.allpay.as_ref().ok_or_else(|| {
                anyhow::anyhow!("probe-security needs the allpay fixture (--fixture allpay)")
            })?;
            let report = payoff_security_probe(spec, epsilon, samples, opts.seed);
            let dir = out_dir(&opts);
            write_json(
                &dir.join(format!("{}_security.json", loaded.label)),
                &serde_json::to_value(&report)?,
            )?;
            println!(
                "probe-security: delta {:.3e}, cases {:?}, violations {}",
                report.delta, report.case_counts, report.violation_count
            );
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Fixtures { op } => match op {
            FixturesOp::List => {
                for name in FIXTURE_NAMES {
                    println!("{name}");
                }
                Ok(0)
            }
        },
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
