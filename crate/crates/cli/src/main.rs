//! `greenroute` — synthetic city generation, single-query routing, and
//! comparison sweeps over elevation-annotated road networks.
//!
//! Exit codes: 0 success, 2 spec/input error, 3 unreachable OD pair.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use greenroute_core::analysis::{
    default_ratio_pairs, report_to_csv, run_sweep, summarize, summary_to_csv, traffic_ratio_pairs,
    ComparisonReport, RatioPair,
};
use greenroute_core::network::{
    generate_synthetic_city, load_network, save_network, validate_network, GridSpec,
};
use greenroute_core::physics::{TruckClass, VehicleParams};
use greenroute_core::routing::{
    asymptotic_greenest_path, fastest_path, greenest_path, path_metrics, shortest_path,
    PathMetrics, PolicyContext, Query, RoutingError,
};
use greenroute_core::speed::SpeedPolicyKind;

const EXIT_SPEC_ERROR: u8 = 2;
const EXIT_UNREACHABLE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "greenroute",
    version,
    about = "Fuel/CO2-minimal truck routing over elevation-annotated road networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic grid city with Gaussian-hill elevations
    Gen(GenArgs),
    /// Solve one origin-destination query and print its metrics
    Route(RouteArgs),
    /// Run the comparison ratios described by a JSON spec file
    Compare(CompareArgs),
    /// Run a factorial sweep over OD pairs, trucks, and payloads
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    /// RNG seed; the same seed and spec always produce identical bytes
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid side length (the city has NxN nodes)
    #[arg(long, default_value_t = 10)]
    grid: usize,
    /// Spacing between adjacent nodes in meters
    #[arg(long, default_value_t = 200.0)]
    spacing: f64,
    /// Number of Gaussian hills in the elevation field
    #[arg(long, default_value_t = 5)]
    hills: usize,
    /// Peak hill amplitude in meters (0 = flat city)
    #[arg(long, default_value_t = 40.0)]
    amp: f64,
    /// Lower speed bound for every arc (m/s)
    #[arg(long, default_value_t = 5.56)]
    vmin: f64,
    /// Upper speed bound for every arc (m/s)
    #[arg(long, default_value_t = 25.0)]
    vmax: f64,
    /// Assign per-arc traffic speeds drawn uniformly from LOW,HIGH (m/s)
    #[arg(long, value_name = "LOW,HIGH")]
    traffic: Option<String>,
    /// Output network file
    #[arg(short, long, value_name = "FILE")]
    output: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum PathChoice {
    Shortest,
    Fastest,
    Greenest,
    Asymptotic,
}

#[derive(Copy, Clone, ValueEnum)]
enum SpeedChoice {
    Static,
    Dynamic,
    Traffic,
}

impl From<SpeedChoice> for SpeedPolicyKind {
    fn from(c: SpeedChoice) -> Self {
        match c {
            SpeedChoice::Static => SpeedPolicyKind::Static,
            SpeedChoice::Dynamic => SpeedPolicyKind::Dynamic,
            SpeedChoice::Traffic => SpeedPolicyKind::Traffic,
        }
    }
}

#[derive(Args)]
struct RouteArgs {
    /// Network file
    #[arg(long, value_name = "FILE")]
    net: PathBuf,
    /// Source node id
    #[arg(long)]
    from: u64,
    /// Target node id
    #[arg(long)]
    to: u64,
    /// Truck class (hdd|mdd|ldd) or a key-value vehicle parameter file
    #[arg(long, default_value = "hdd")]
    truck: String,
    /// Payload as a percentage of the truck's maximum capacity
    #[arg(long, default_value_t = 60.0)]
    load_pct: f64,
    /// Which path to solve
    #[arg(long, value_enum, default_value_t = PathChoice::Greenest)]
    path: PathChoice,
    /// Speed policy for solving and traversal
    #[arg(long, value_enum, default_value_t = SpeedChoice::Dynamic)]
    speed: SpeedChoice,
    /// Emit machine-readable JSON instead of the human summary
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Network file
    #[arg(long, value_name = "FILE")]
    net: PathBuf,
    /// JSON comparison spec (ods, trucks, loads_pct, ratios)
    #[arg(long, value_name = "FILE")]
    spec: PathBuf,
    /// Output report CSV; a `.meta.json` sidecar records conventions
    #[arg(short, long, value_name = "FILE")]
    output: PathBuf,
    /// Also write per-group summary statistics to this CSV
    #[arg(long, value_name = "FILE")]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Network file
    #[arg(long, value_name = "FILE")]
    net: PathBuf,
    /// CSV of OD pairs with a `source,target` header
    #[arg(long, value_name = "FILE")]
    ods: PathBuf,
    /// Payload percentages of capacity
    #[arg(long, value_delimiter = ',', default_values_t = vec![30.0, 40.0, 50.0, 60.0, 70.0, 80.0])]
    loads: Vec<f64>,
    /// Truck classes or vehicle parameter files
    #[arg(long, value_delimiter = ',', default_values_t = vec!["hdd".to_string(), "mdd".to_string(), "ldd".to_string()])]
    trucks: Vec<String>,
    /// Add the traffic ratio set (requires traffic speeds on every arc)
    #[arg(long)]
    include_traffic: bool,
    /// Output report CSV; a `.meta.json` sidecar records conventions
    #[arg(short, long, value_name = "FILE")]
    output: PathBuf,
    /// Also write per-group summary statistics to this CSV
    #[arg(long, value_name = "FILE")]
    summary: Option<PathBuf>,
}

/// Error carrying the process exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn spec(err: anyhow::Error) -> Self {
        CliError {
            code: EXIT_SPEC_ERROR,
            message: format!("{err:#}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => gen(args),
        Command::Route(args) => route(args),
        Command::Compare(args) => compare(args),
        Command::Sweep(args) => sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn parse_traffic_range(text: &str) -> Result<(f64, f64)> {
    let (low, high) = text
        .split_once(',')
        .ok_or_else(|| anyhow!("--traffic expects LOW,HIGH"))?;
    Ok((
        low.trim().parse().context("traffic LOW is not a number")?,
        high.trim().parse().context("traffic HIGH is not a number")?,
    ))
}

fn gen(args: GenArgs) -> Result<(), CliError> {
    let run = || -> Result<()> {
        let traffic = args
            .traffic
            .as_deref()
            .map(parse_traffic_range)
            .transpose()?;
        let spec = GridSpec {
            n: args.grid,
            spacing: args.spacing,
            hills: args.hills,
            amplitude: args.amp,
            v_min: args.vmin,
            v_max: args.vmax,
            traffic,
        };
        let net = generate_synthetic_city(args.seed, &spec)?;
        let violations = validate_network(&net);
        if !violations.is_empty() {
            bail!("generated network failed validation: {}", violations[0]);
        }
        save_network(&net, &args.output)?;
        eprintln!(
            "wrote {} ({} nodes, {} arcs)",
            args.output.display(),
            net.nodes().len(),
            net.arcs().len()
        );
        Ok(())
    };
    run().map_err(CliError::spec)
}

fn resolve_vehicle(text: &str) -> Result<(String, VehicleParams)> {
    if let Ok(class) = text.parse::<TruckClass>() {
        return Ok((class.label().to_string(), class.params()));
    }
    let path = Path::new(text);
    if path.exists() {
        let contents = std::fs::read_to_string(path)
            .with_context(|| format!("reading vehicle file {}", path.display()))?;
        let params = VehicleParams::from_key_value_str(&contents)
            .with_context(|| format!("parsing vehicle file {}", path.display()))?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".to_string());
        return Ok((label, params));
    }
    bail!("`{text}` is neither a truck class (hdd|mdd|ldd) nor a vehicle file");
}

fn net_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "net".to_string())
}

fn route(args: RouteArgs) -> Result<(), CliError> {
    let net = load_network(&args.net)
        .map_err(|e| CliError::spec(anyhow!(e).context(format!("loading {}", args.net.display()))))?;
    let (truck_label, vehicle) = resolve_vehicle(&args.truck).map_err(CliError::spec)?;
    if !(0.0..=100.0).contains(&args.load_pct) {
        return Err(CliError::spec(anyhow!(
            "--load-pct must lie in [0, 100], got {}",
            args.load_pct
        )));
    }
    let load = args.load_pct / 100.0 * vehicle.l_max;
    let policy: SpeedPolicyKind = args.speed.into();
    let query = Query::new(args.from, args.to, vehicle, load, policy)
        .map_err(|e| CliError::spec(e.into()))?;

    let solve = || -> Result<(greenroute_core::routing::Path, PathMetrics), RoutingError> {
        let path = match args.path {
            PathChoice::Shortest => shortest_path(&net, args.from, args.to)?,
            PathChoice::Fastest => {
                let ctx = PolicyContext::new(vehicle, load, policy)?;
                fastest_path(&net, args.from, args.to, &ctx)?
            }
            PathChoice::Greenest => return greenest_path(&net, &query),
            PathChoice::Asymptotic => {
                asymptotic_greenest_path(&net, args.from, args.to, &vehicle, policy)?
            }
        };
        let metrics = path_metrics(&net, &path, &query)?;
        Ok((path, metrics))
    };
    let (path, metrics) = solve().map_err(|err| match err {
        RoutingError::Unreachable { .. } => CliError {
            code: EXIT_UNREACHABLE,
            message: err.to_string(),
        },
        other => CliError::spec(other.into()),
    })?;

    if args.json {
        let doc = serde_json::json!({
            "truck": truck_label,
            "load_kg": load,
            "path": path,
            "metrics": metrics,
        });
        println!("{doc}");
    } else {
        let nodes = path
            .nodes(&net)
            .map_err(|e| CliError::spec(e.into()))?
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(" -> ");
        let kind = match args.path {
            PathChoice::Shortest => "shortest",
            PathChoice::Fastest => "fastest",
            PathChoice::Greenest => "greenest",
            PathChoice::Asymptotic => "asymptotic",
        };
        println!("{kind} path for {truck_label} at {load:.0} kg payload:");
        println!("  nodes:    {nodes}");
        println!("  arcs:     {}", path.arcs.len());
        println!("  distance: {:.3} m", metrics.distance);
        println!("  time:     {:.3} s", metrics.time);
        println!("  fuel:     {:.6} L", metrics.fuel);
        println!("  co2:      {:.6} kg", metrics.co2);
    }
    Ok(())
}

#[derive(Deserialize)]
struct CompareSpec {
    ods: Vec<(u64, u64)>,
    trucks: Vec<String>,
    loads_pct: Vec<f64>,
    ratios: Vec<RatioPair>,
}

fn write_report(report: &ComparisonReport, output: &Path, summary: Option<&Path>) -> Result<()> {
    std::fs::write(output, report_to_csv(report))
        .with_context(|| format!("writing {}", output.display()))?;
    let meta_path = PathBuf::from(format!("{}.meta.json", output.display()));
    let meta = serde_json::json!({
        "conventions": report.metadata,
        "rows": report.rows.len(),
        "cell_errors": report.errors.len(),
    });
    std::fs::write(&meta_path, format!("{meta}\n"))
        .with_context(|| format!("writing {}", meta_path.display()))?;
    if let Some(summary_path) = summary {
        let rows = summarize(report)?;
        std::fs::write(summary_path, summary_to_csv(&rows))
            .with_context(|| format!("writing {}", summary_path.display()))?;
    }
    Ok(())
}

/// After the report is written, surface per-cell failures: unreachable ODs
/// exit with 3, anything else with 2.
fn finish_report(report: &ComparisonReport) -> Result<(), CliError> {
    if report.errors.is_empty() {
        return Ok(());
    }
    for err in &report.errors {
        eprintln!(
            "cell error: od ({}, {}), truck {}, load {}%, pair {}: {}",
            err.od_source, err.od_target, err.truck, err.load_pct, err.pair, err.message
        );
    }
    let code = if report.errors.iter().any(|e| e.unreachable) {
        EXIT_UNREACHABLE
    } else {
        EXIT_SPEC_ERROR
    };
    Err(CliError {
        code,
        message: format!("{} sweep cells failed", report.errors.len()),
    })
}

fn compare(args: CompareArgs) -> Result<(), CliError> {
    let run = || -> Result<ComparisonReport> {
        let net = load_network(&args.net)?;
        let text = std::fs::read_to_string(&args.spec)
            .with_context(|| format!("reading {}", args.spec.display()))?;
        let spec: CompareSpec = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", args.spec.display()))?;
        let vehicles = spec
            .trucks
            .iter()
            .map(|t| resolve_vehicle(t))
            .collect::<Result<Vec<_>>>()?;
        let report = run_sweep(
            &net,
            &net_label(&args.net),
            &spec.ods,
            &vehicles,
            &spec.loads_pct,
            &spec.ratios,
        )?;
        write_report(&report, &args.output, args.summary.as_deref())?;
        Ok(report)
    };
    let report = run().map_err(CliError::spec)?;
    finish_report(&report)
}

fn parse_ods_csv(path: &Path) -> Result<Vec<(u64, u64)>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut ods = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.eq_ignore_ascii_case("source,target") {
            continue;
        }
        let (s, t) = line.split_once(',').ok_or_else(|| {
            anyhow!("{}:{}: expected `source,target`", path.display(), lineno + 1)
        })?;
        ods.push((
            s.trim()
                .parse()
                .with_context(|| format!("{}:{}: bad source id", path.display(), lineno + 1))?,
            t.trim()
                .parse()
                .with_context(|| format!("{}:{}: bad target id", path.display(), lineno + 1))?,
        ));
    }
    if ods.is_empty() {
        bail!("{}: no OD pairs found", path.display());
    }
    Ok(ods)
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let run = || -> Result<ComparisonReport> {
        let net = load_network(&args.net)?;
        let ods = parse_ods_csv(&args.ods)?;
        let vehicles = args
            .trucks
            .iter()
            .map(|t| resolve_vehicle(t))
            .collect::<Result<Vec<_>>>()?;
        let mut pairs = default_ratio_pairs();
        if args.include_traffic {
            pairs.extend(traffic_ratio_pairs());
        }
        let report = run_sweep(
            &net,
            &net_label(&args.net),
            &ods,
            &vehicles,
            &args.loads,
            &pairs,
        )?;
        write_report(&report, &args.output, args.summary.as_deref())?;
        Ok(report)
    };
    let report = run().map_err(CliError::spec)?;
    finish_report(&report)
}
