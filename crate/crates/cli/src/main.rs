//! Command line front end: single scenario runs and the topology
//! comparison matrix.
//!
//! Exit codes: 0 on success, 1 for model/solver failures, 2 for
//! configuration problems. Nothing is written until the scenario has
//! fully resolved, and every file goes through a temp-and-rename so a
//! failing run leaves no partial output.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use siif_pdn::error::Error as PdnError;
use siif_pdn::scenario::{
    run_compare, run_matrix, run_scenario, waveforms_csv, ScenarioConfig,
};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "siif-pdn",
    version,
    about = "Wafer-scale power delivery network simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario: floorplan, netlist, DC + transient solve, report.
    Run(RunArgs),
    /// Run several scenarios and compare them against the PT baseline.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Builtin application name (loihi, epyc, tpu).
    #[arg(long)]
    app: Option<String>,
    /// Topology name (pt, bt1, bt2_8, bt2_24, bt3).
    #[arg(long)]
    topology: Option<String>,
    /// Scenario config file (JSON); flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report output path (default: stdout or the config's outputs.report).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the interchange netlist here.
    #[arg(long)]
    export_netlist: Option<PathBuf>,
    /// Write the placed floorplan as JSON here.
    #[arg(long)]
    export_floorplan: Option<PathBuf>,
    /// Write transient waveforms (CSV) here.
    #[arg(long)]
    waveforms: Option<PathBuf>,
    /// Angular sector count for the lumped grid models.
    #[arg(long)]
    grid_granularity: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    /// Run the full builtin matrix: 3 applications x 5 topologies.
    #[arg(long)]
    matrix: bool,
    /// Scenario config file(s). With --matrix, a single base config; without
    /// it, one per scenario (at least two, same application).
    #[arg(long)]
    config: Vec<PathBuf>,
    /// Comparison CSV path (the JSON lands next to it). Default: comparison.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Angular sector count for the lumped grid models.
    #[arg(long)]
    grid_granularity: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => report_outcome(cmd_run(args)),
        Command::Compare(args) => report_outcome(cmd_compare(args)),
    };
    std::process::exit(code);
}

fn report_outcome(result: Result<(), CliError>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {:#}", e.source);
            e.code
        }
    }
}

struct CliError {
    code: i32,
    source: anyhow::Error,
}

impl CliError {
    fn config(source: anyhow::Error) -> Self {
        Self { code: 2, source }
    }
    fn model(source: anyhow::Error) -> Self {
        Self { code: 1, source }
    }
}

fn classify(err: PdnError) -> CliError {
    match &err {
        PdnError::Config(_)
        | PdnError::UnknownApplication(_)
        | PdnError::Validation(_)
        | PdnError::Parse { .. } => CliError::config(err.into()),
        _ => CliError::model(err.into()),
    }
}

fn load_config(path: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    match path {
        None => Ok(ScenarioConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))
                .map_err(CliError::config)?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", p.display()))
                .map_err(CliError::config)
        }
    }
}

/// Temp-and-rename write so failures leave no partial file behind.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name().unwrap_or_default().to_string_lossy()
        )),
        None => PathBuf::from(format!(
            ".{}.tmp",
            path.file_name().unwrap_or_default().to_string_lossy()
        )),
    };
    std::fs::write(&tmp, contents)
        .and_then(|_| std::fs::rename(&tmp, path))
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::model)
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(app) = args.app {
        config.app = Some(app);
        config.app_spec = None;
    }
    if let Some(topology) = args.topology {
        config.topology = Some(topology);
    }
    if let Some(g) = args.grid_granularity {
        config.solver.grid_granularity = Some(g);
    }

    let out = run_scenario(&config).map_err(classify)?;

    let meta = serde_json::json!({
        "tool": "siif-pdn",
        "version": env!("CARGO_PKG_VERSION"),
    });
    let payload = serde_json::json!({
        "meta": meta,
        "report": out.report,
        "power_balance": siif_pdn::solver::power_balance(&out.dc, &out.netlist),
        "solve_stats": out.dc.stats,
        "transient": {
            "worst_droop_v": out.transient.worst_droop,
            "worst_droop_node": out.transient.worst_droop_node,
            "settle_time_s": out.transient.settle_time,
        },
        "floorplan": {
            "placed_fd_count": out.floorplan.fd_count,
            "placed_ud_count": out.floorplan.ud_count,
        },
    });
    let report_text = serde_json::to_string_pretty(&payload).expect("serializable") + "\n";

    if let Some(path) = &args.export_netlist {
        write_atomic(path, &out.netlist.export_interchange())?;
    }
    if let Some(path) = &args.export_floorplan {
        let text =
            serde_json::to_string_pretty(&out.floorplan).expect("serializable floorplan") + "\n";
        write_atomic(path, &text)?;
    }
    if let Some(path) = &args.waveforms {
        write_atomic(path, &waveforms_csv(&out.transient))?;
    }
    if let Some(path) = &config.outputs.netlist {
        write_atomic(Path::new(path), &out.netlist.export_interchange())?;
    }
    if let Some(path) = &config.outputs.waveforms {
        write_atomic(Path::new(path), &waveforms_csv(&out.transient))?;
    }

    let report_path = args
        .out
        .or_else(|| config.outputs.report.as_ref().map(PathBuf::from));
    match report_path {
        Some(path) => write_atomic(&path, &report_text)?,
        None => print!("{report_text}"),
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let comparison = if args.matrix {
        if args.config.len() > 1 {
            return Err(CliError::config(anyhow::anyhow!(
                "--matrix takes at most one base config"
            )));
        }
        let mut base = load_config(args.config.first().map(|p| p.as_path()))?;
        if let Some(g) = args.grid_granularity {
            base.solver.grid_granularity = Some(g);
        }
        let weights = base.weights.unwrap_or_default();
        run_matrix(&base, weights).map_err(classify)?
    } else {
        if args.config.len() < 2 {
            return Err(CliError::config(anyhow::anyhow!(
                "compare needs --matrix or at least two --config files"
            )));
        }
        let mut configs = Vec::new();
        for p in &args.config {
            let mut cfg = load_config(Some(p))?;
            if let Some(g) = args.grid_granularity {
                cfg.solver.grid_granularity = Some(g);
            }
            configs.push(cfg);
        }
        let weights = configs[0].weights.unwrap_or_default();
        run_compare(&configs, weights).map_err(classify)?
    };

    let csv_path = args.out.unwrap_or_else(|| PathBuf::from("comparison.csv"));
    let json_path = csv_path.with_extension("json");
    let json = serde_json::json!({
        "meta": {
            "tool": "siif-pdn",
            "version": env!("CARGO_PKG_VERSION"),
        },
        "comparison": comparison.to_json(),
    });
    write_atomic(&csv_path, &comparison.to_csv())?;
    write_atomic(
        &json_path,
        &(serde_json::to_string_pretty(&json).expect("serializable") + "\n"),
    )?;
    for (app, ranked) in &comparison.rankings {
        let order: Vec<&str> = ranked.iter().map(|r| r.topology.name()).collect();
        println!("{app}: {}", order.join(" > "));
    }
    Ok(())
}
