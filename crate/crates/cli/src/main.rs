use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lzcat_cli::analytic::{evaluate, format_tsv, AnalyticQuery, Formula};
use lzcat_cli::scenario::write_run;
use lzcat_cli::sweep::write_sweep;
use lzcat_cli::{
    generate, run_scenario, run_sweep, CliError, CliResult, FigureOptions, ScenarioConfig,
    SweepSpec, FIGURE_IDS,
};

/// Landau-Zener sweeps of a two-level system coupled to a photon mode.
///
/// Any config key can also be set as `--section.key=value`, for example
/// `--params.delta=0.2` or `--initial.kind=fock --initial.n=2`.
#[derive(Parser, Debug)]
#[command(name = "lzcat", version)]
struct Cli {
    /// Worker threads for sweeps and figure curves.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Time-resolved observables of one scenario.
    Run(RunArgs),
    /// Long-time observables along one parameter axis.
    Sweep(SweepArgs),
    /// Regenerate the data behind a figure (or `all`).
    Figure(FigureArgs),
    /// Tabulate a closed form.
    Analytic(AnalyticArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_parser = ["rwa", "full"])]
    model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Photon cutoff, or `auto`.
    #[arg(long)]
    nmax: Option<String>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Output file stem.
    #[arg(long, default_value = "run")]
    name: String,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "sweep")]
    name: String,
    /// alpha2, theta, delta, omega or T.
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
    /// `start,stop,count`.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    linspace: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// One of 1a 1b 1c 1d 2a 2b 2c 3a 3b 3c 4a 4b 5 6a 6b 7, or `all`.
    id: String,
    /// Parent directory; each figure goes to `fig<id>/` inside it.
    #[arg(long, default_value = "figures")]
    out: PathBuf,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
}

#[derive(Args, Debug)]
struct AnalyticArgs {
    /// cat-rwa, yurke-stoler, even-cat, odd-cat, cat-full, thermal-rwa,
    /// thermal-full or thermal-full-reduced.
    formula: String,
    #[arg(long, value_delimiter = ',')]
    alpha2: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    v: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    omega: Option<Vec<f64>>,
    /// Temperature; defaults to ω for the thermal formulas.
    #[arg(long = "temperature", visible_alias = "T", value_delimiter = ',')]
    temperature: Option<Vec<f64>>,
    /// Add the brute-force sector sum and its absolute difference.
    #[arg(long)]
    oracle: bool,
}

/// Splits `--section.key=value` tokens off the argument list.
fn split_overrides(args: Vec<String>) -> (Vec<String>, Vec<(String, String)>) {
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    for a in args {
        let dotted = a
            .strip_prefix("--")
            .and_then(|s| s.split_once('='))
            .filter(|(k, _)| k.contains('.'));
        match dotted {
            Some((k, v)) => overrides.push((k.to_string(), v.to_string())),
            None => rest.push(a),
        }
    }
    (rest, overrides)
}

fn load(common: &Common, extra: Vec<(String, String)>, dotted: &[(String, String)]) -> CliResult<ScenarioConfig> {
    let text = match &common.config {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut overrides = Vec::new();
    let mut set = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            overrides.push((k.to_string(), v));
        }
    };
    set("params.model", common.model.as_ref().map(|m| format!("\"{m}\"")));
    set("integrator.t0", common.t0.map(|x| x.to_string()));
    set("integrator.t1", common.t1.map(|x| x.to_string()));
    set("integrator.rel_tol", common.rel_tol.map(|x| format!("{x:e}")));
    set("integrator.abs_tol", common.abs_tol.map(|x| format!("{x:e}")));
    set("truncation.n_max", common.nmax.clone());
    overrides.extend(extra);
    overrides.extend(dotted.iter().cloned());
    ScenarioConfig::from_toml(&text, &overrides)
}

fn cmd_run(args: RunArgs, dotted: &[(String, String)]) -> CliResult<()> {
    let cfg = load(&args.common, vec![], dotted)?;
    let out = run_scenario(&cfg)?;
    let path = write_run(&args.common.out, &args.name, &cfg, &out)?;
    eprintln!(
        "wrote {} ({} samples, final P_LZ {:.6})",
        path.display(),
        out.series.len(),
        out.series.final_p_lz()
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs, dotted: &[(String, String)]) -> CliResult<()> {
    let mut extra = Vec::new();
    if let Some(a) = &args.axis {
        extra.push(("sweep.axis".to_string(), format!("\"{a}\"")));
    }
    if let Some(v) = &args.values {
        let list: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
        extra.push(("sweep.values".to_string(), format!("[{}]", list.join(", "))));
    }
    if let Some(l) = &args.linspace {
        if l.len() != 3 {
            return Err(CliError::Config("--linspace takes start,stop,count".into()));
        }
        extra.push(("sweep.linspace".to_string(), format!("[{}]", l.join(", "))));
    }
    let cfg = load(&args.common, extra, dotted)?;
    let spec = SweepSpec::from_config(&cfg)?;
    let rows = run_sweep(&spec)?;
    let path = write_sweep(&args.common.out, &args.name, &spec, &rows)?;
    eprintln!("wrote {} ({} points)", path.display(), rows.len());
    Ok(())
}

fn cmd_figure(args: FigureArgs) -> CliResult<()> {
    let ids: Vec<&str> = if args.id == "all" {
        FIGURE_IDS.to_vec()
    } else if FIGURE_IDS.contains(&args.id.as_str()) {
        vec![args.id.as_str()]
    } else {
        return Err(CliError::UnknownFigure(args.id.clone()));
    };
    let opts = FigureOptions {
        rel_tol: args.rel_tol,
        abs_tol: args.abs_tol,
    };
    for id in ids {
        let dir = args.out.join(format!("fig{id}"));
        let m = generate(id, &dir, &opts)?;
        eprintln!("wrote {} ({} curves)", Path::new(&dir).join("manifest.json").display(), m.curves.len());
    }
    Ok(())
}

fn cmd_analytic(args: AnalyticArgs) -> CliResult<()> {
    let formula: Formula = args.formula.parse().map_err(CliError::Config)?;
    let mut q = AnalyticQuery::new(formula);
    if let Some(v) = args.alpha2 {
        q.alpha2 = v;
    }
    if let Some(v) = args.theta {
        q.theta = v;
    }
    if let Some(v) = args.delta {
        q.delta = v;
    }
    if let Some(v) = args.v {
        q.v = v;
    }
    if let Some(v) = args.omega {
        q.omega = v;
    }
    match args.temperature {
        Some(v) => q.temperature = v,
        None if formula.is_thermal() => q.temperature = q.omega.clone(),
        None => {}
    }
    q.oracle = args.oracle;
    let rows = evaluate(&q)?;
    print!("{}", format_tsv(formula, &rows, q.oracle));
    Ok(())
}

fn main() -> ExitCode {
    let (argv, dotted) = split_overrides(std::env::args().collect());
    let cli = Cli::parse_from(argv);
    if let Some(k) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    let needs_config = matches!(cli.cmd, Cmd::Run(_) | Cmd::Sweep(_));
    if !dotted.is_empty() && !needs_config {
        eprintln!("error: config overrides only apply to run and sweep");
        return ExitCode::from(2);
    }
    let res = match cli.cmd {
        Cmd::Run(a) => cmd_run(a, &dotted),
        Cmd::Sweep(a) => cmd_sweep(a, &dotted),
        Cmd::Figure(a) => cmd_figure(a),
        Cmd::Analytic(a) => cmd_analytic(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

