use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mvgrover_core::io::{execute, load_config, load_state, save_state, write_records, RunRecord};
use mvgrover_core::operators::grover_weighted_with_phase;
use mvgrover_core::search::SearchConfig;
use mvgrover_core::verify::{run_checks, Level, VerifyOptions};
use mvgrover_core::{build_list, logical_zero, tensor, Error, JointState, ZetaSpec};

#[derive(Parser)]
#[command(name = "mvgrover", version, about = "Grover search over modular-variable CV qubits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more searches and write their records.
    Run {
        /// Configuration file; repeat for a batch (written as JSON lines).
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in invariant checks.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        #[arg(long, hide = true)]
        corrupt_sign: bool,
    },
    /// Save or inspect binary state files.
    State {
        #[command(subcommand)]
        action: StateAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stage {
    /// `|0̄…0̄⟩` before the Hadamard layer.
    Blank,
    /// The quantum list.
    List,
    /// The unnormalized state after the configured iterations.
    Final,
}

#[derive(Subcommand)]
enum StateAction {
    Save {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Stage::List)]
        stage: Stage,
    },
    Load {
        #[arg(long)]
        path: PathBuf,
    },
}

fn run(configs: &[PathBuf], out: &Path) -> Result<ExitCode> {
    let mut records: Vec<RunRecord> = Vec::new();
    let mut code = 0;
    for path in configs {
        match load_config(path) {
            Ok(cfg) => {
                let rec = execute(&cfg);
                if let Some(err) = &rec.error {
                    eprintln!("{}: {err}", path.display());
                }
                code = code.max(rec.exit_code());
                records.push(rec);
            }
            Err(e @ Error::Io(_)) | Err(e @ Error::ConfigInvalid { .. }) => {
                eprintln!("{}: {e}", path.display());
                code = code.max(1);
            }
            Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
        }
    }
    if !records.is_empty() {
        write_records(&records, out).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(ExitCode::from(code as u8))
}

fn verify(level: LevelArg, corrupt_sign: bool) -> ExitCode {
    let level = match level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let results = run_checks(&VerifyOptions { level, corrupt_sign });
    let mut failed = Vec::new();
    for r in &results {
        println!("{} {}: {}", if r.passed { "ok  " } else { "FAIL" }, r.name, r.detail);
        if !r.passed {
            failed.push(r.name.as_str());
        }
    }
    if failed.is_empty() {
        println!("{} checks passed", results.len());
        ExitCode::SUCCESS
    } else {
        eprintln!("failed invariants: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}

fn staged_state(config: &Path, stage: Stage) -> Result<JointState> {
    let cfg = load_config(config)?;
    let sc: SearchConfig = cfg.to_search_config()?;
    let mode_grid = sc.grid.mode_grid();
    let state = match stage {
        Stage::Blank => {
            let zeros = sc
                .envelopes
                .iter()
                .map(|e| logical_zero(e, &mode_grid))
                .collect::<mvgrover_core::Result<Vec<_>>>()?;
            tensor(&zeros)?
        }
        Stage::List => build_list(&sc.envelopes, &mode_grid)?,
        Stage::Final => {
            if sc.use_dilation {
                bail!("states with an ancilla bit cannot be saved; set use_dilation to false");
            }
            let zetas = if sc.zetas.is_empty() {
                vec![ZetaSpec::unit(); sc.n_modes()]
            } else {
                sc.zetas.clone()
            };
            let tables = zetas
                .iter()
                .map(|z| z.table(&mode_grid))
                .collect::<mvgrover_core::Result<Vec<_>>>()?;
            let g = grover_weighted_with_phase(&sc.target, &tables, &sc.grid, sc.phase)?;
            g.apply_n(&build_list(&sc.envelopes, &mode_grid)?, sc.resolved_iterations()?)?
        }
    };
    Ok(state)
}

fn state(action: StateAction) -> Result<ExitCode> {
    match action {
        StateAction::Save { path, config, stage } => {
            let s = staged_state(&config, stage)?;
            save_state(&s, &path).with_context(|| format!("writing {}", path.display()))?;
        }
        StateAction::Load { path } => {
            let s = load_state(&path).with_context(|| format!("reading {}", path.display()))?;
            let g = s.grid();
            let summary = serde_json::json!({
                "n_modes": g.n_modes(),
                "g_theta": g.g_theta(),
                "g_k": g.g_k(),
                "amplitudes": s.amplitudes().len(),
                "quad_norm": s.quad_norm(),
                "band_marginals": s.band_marginals(),
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { configs, out } => run(&configs, &out),
        Command::Verify { level, corrupt_sign } => Ok(verify(level, corrupt_sign)),
        Command::State { action } => state(action),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
