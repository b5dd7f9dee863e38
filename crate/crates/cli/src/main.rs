//! `drconic`: projections, orbits, basin renders, periodic-point scans,
//! stability certificates and divergence checks from the command line.
//!
//! Exit status: 0 on success, 1 when the mathematics rejects the input
//! (for example a stability query on a disjoint pair), 2 on usage errors.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use drconic::params::{self, json, LineSpec, SetSpec};
use drconic::report::{self, BasinRequest, ErrorKind, Pair, ReportError};

#[derive(Parser, Debug)]
#[command(name = "drconic", version, about = "Douglas-Rachford iteration for a conic and a line")]
struct Cli {
    /// TOML file with default values for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for scans and renders (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct PairArgs {
    /// ellipse:b=<b>, psphere:p=<p> or circle.
    #[arg(long)]
    set: Option<String>,
    /// slope=<m>[,intercept=<c>] or normal=<a>,<b>,<c>.
    #[arg(long)]
    line: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Nearest points of a set to a query point.
    Project {
        #[arg(long)]
        set: Option<String>,
        /// Query point x,y.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A DR orbit (the set is reflected in first).
    Orbit {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render basins of attraction to PPM and a JSON label grid.
    Basins {
        #[command(flatten)]
        pair: PairArgs,
        /// xmin:xmax:ymin:ymax.
        #[arg(long, allow_hyphen_values = true)]
        region: Option<String>,
        /// <width>x<height>.
        #[arg(long)]
        res: Option<String>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        match_tol: Option<f64>,
        #[arg(long)]
        max_period: Option<usize>,
        /// PPM image path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON label grid path.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Newton search for periodic points.
    Scan {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        region: Option<String>,
        #[arg(long)]
        max_period: Option<usize>,
        /// Seeds per side of the Newton grid.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Local convergence certificates at the feasible points.
    Stability {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Linear divergence and the shadow limit for a disjoint pair.
    Diverge {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        /// Listen address.
        #[arg(long)]
        addr: Option<String>,
        /// Renders allowed to run at once.
        #[arg(long)]
        workers: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e.kind {
            ErrorKind::Validation => Failure::Usage(e.to_string()),
            ErrorKind::Domain => Failure::Domain(e.to_string()),
        }
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn need<T>(v: Option<T>, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{name}")))
}

fn parse<T>(v: Option<String>, name: &str, f: impl Fn(&str) -> Result<T, params::ParseError>) -> Result<T, Failure> {
    let v = need(v, name)?;
    f(&v).map_err(|e| Failure::Usage(format!("--{name}: {e}")))
}

fn set_spec(v: Option<String>) -> Result<SetSpec, Failure> {
    parse(v, "set", str::parse)
}

fn load_pair(p: PairArgs, cfg: &RunConfig) -> Result<Pair, Failure> {
    let set = set_spec(pick(p.set, cfg.set.clone()))?;
    let line: LineSpec = parse(pick(p.line, cfg.line.clone()), "line", str::parse)?;
    Ok(Pair::new(set, line)?)
}

fn emit(bytes: &[u8], out: Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(&path, bytes).map_err(|e| Failure::Domain(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Domain(e.to_string())),
    }
}

fn emit_json<S: serde::Serialize>(v: &S, out: Option<PathBuf>) -> Result<(), Failure> {
    emit(&json::to_vec(v).map_err(|e| Failure::Domain(e.to_string()))?, out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(Failure::Usage)?,
        None => RunConfig::default(),
    };
    let threads = pick(cli.threads, cfg.threads).unwrap_or(0);
    if threads > 0 {
        // Only fails if a global pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let region_or_default = |flag: Option<String>| -> Result<drconic::Region<f64>, Failure> {
        let raw = pick(flag, cfg.region.clone()).unwrap_or_else(|| "-4:4:-4:4".into());
        params::parse_region(&raw).map_err(|e| Failure::Usage(format!("--region: {e}")))
    };
    match cli.command {
        Command::Project { set, point, out } => {
            let set = set_spec(pick(set, cfg.set.clone()))?;
            let q = parse(pick(point, cfg.point.clone()), "point", params::parse_point)?;
            emit_json(&report::projection(set, q)?, pick(out, cfg.out.clone()))
        }
        Command::Orbit { pair, start, iters, out } => {
            let pair = load_pair(pair, &cfg)?;
            let start = parse(pick(start, cfg.start.clone()), "start", params::parse_point)?;
            let iters = pick(iters, cfg.iters).unwrap_or(1000);
            emit_json(&report::orbit(&pair, start, iters)?, pick(out, cfg.out.clone()))
        }
        Command::Basins { pair, region, res, iters, match_tol, max_period, out, labels } => {
            let pair = load_pair(pair, &cfg)?;
            let res = pick(res, cfg.res.clone()).unwrap_or_else(|| "256x256".into());
            let (width, height) = params::parse_resolution(&res).map_err(|e| Failure::Usage(format!("--res: {e}")))?;
            let req = BasinRequest {
                region: region_or_default(region)?,
                width,
                height,
                iters: pick(iters, cfg.iters).unwrap_or(1000),
                match_tol: pick(match_tol, cfg.match_tol).unwrap_or(1e-3),
                max_period: pick(max_period, cfg.max_period).unwrap_or(3),
                threads,
            };
            let b = report::basins(&pair, &req, usize::MAX)?;
            let out = pick(out, cfg.out.clone());
            let labels = pick(labels, cfg.labels.clone());
            let doc = b.document(&pair, req.match_tol);
            if out.is_none() && labels.is_none() {
                return emit_json(&doc, None);
            }
            if let Some(path) = out {
                emit(&b.ppm(), Some(path))?;
            }
            if let Some(path) = labels {
                emit_json(&doc, Some(path))?;
            }
            Ok(())
        }
        Command::Scan { pair, region, max_period, grid, out } => {
            let pair = load_pair(pair, &cfg)?;
            let region = region_or_default(region)?;
            let max_period = pick(max_period, cfg.max_period).unwrap_or(3);
            let grid = pick(grid, cfg.grid).unwrap_or(32);
            emit_json(&report::scan(&pair, &region, max_period, grid)?, pick(out, cfg.out.clone()))
        }
        Command::Stability { pair, out } => {
            let pair = load_pair(pair, &cfg)?;
            emit_json(&report::stability(&pair)?, pick(out, cfg.out.clone()))
        }
        Command::Diverge { pair, start, steps, out } => {
            let pair = load_pair(pair, &cfg)?;
            let raw = pick(start, cfg.start.clone()).unwrap_or_else(|| "0.5,0".into());
            let start = params::parse_point(&raw).map_err(|e| Failure::Usage(format!("--start: {e}")))?;
            let steps = pick(steps, cfg.steps).unwrap_or(1000);
            emit_json(&report::diverge(&pair, start, steps)?, pick(out, cfg.out.clone()))
        }
        Command::Serve { addr, workers } => {
            let addr = pick(addr, cfg.addr.clone()).unwrap_or_else(|| "127.0.0.1:8080".into());
            let addr = addr
                .parse()
                .map_err(|_| Failure::Usage(format!("--addr: cannot parse {addr:?}")))?;
            let config = drconic_service::ServiceConfig {
                workers: pick(workers, cfg.workers).unwrap_or(2),
                render_threads: threads,
                ..Default::default()
            };
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Domain(e.to_string()))?;
            eprintln!("listening on http://{addr}");
            rt.block_on(drconic_service::serve(addr, config))
                .map_err(|e| Failure::Domain(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
