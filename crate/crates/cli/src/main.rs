mod cache;
mod config;
mod jobs;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use homcx::algebra::{Coeff, DEFAULT_BUDGET};
use homcx::spectral::spheres::Parity;
use homcx::{Error, Result};

use cache::Cache;
use config::Config;
use jobs::{graph_value, load_graph, parse_degrees, parse_range, resolve_involution, Context, Envelope, Flavor, Job};

#[derive(Parser)]
#[command(name = "homcx", version, about = "Graph homomorphism complexes, their (co)homology and Stiefel-Whitney heights")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Key-value config file (also `$HOMCX_CONFIG`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cache root (overrides `$HOMCX_CACHE_DIR` and the config file).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
    /// Maximum number of boundary incidences.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Re-check the report's certificates before writing it.
    #[arg(long, global = true)]
    verify: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Betti numbers and torsion of Hom(G,H), Hom₊(G,H) or Ind(G).
    Homology {
        #[arg(long, num_args = 2, value_names = ["G", "H"], conflicts_with_all = ["hom_plus", "ind"])]
        hom: Option<Vec<String>>,
        #[arg(long, num_args = 2, value_names = ["G", "H"], conflicts_with = "ind")]
        hom_plus: Option<Vec<String>>,
        #[arg(long, value_name = "G")]
        ind: Option<String>,
        #[arg(long, default_value = "Z")]
        coeff: String,
        /// Degree window `lo..hi`.
        #[arg(long)]
        degrees: Option<String>,
        #[arg(long)]
        reduced: bool,
        /// Build cells up to this dimension only.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Height of the first Stiefel-Whitney class of Hom(T,H).
    Sw {
        #[arg(long, num_args = 2, value_names = ["T", "H"], required = true)]
        hom: Vec<String>,
        /// swap, reflect, auto or a comma-separated vertex image.
        #[arg(long, default_value = "auto")]
        invol: String,
        #[arg(long)]
        route: Option<String>,
        /// Also decide this single power.
        #[arg(long)]
        check_power: Option<usize>,
    },
    /// Lower bound on the chromatic number of a graph from a test graph.
    Bound {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        test: String,
        #[arg(long, default_value = "auto")]
        invol: String,
        /// Range of m tried for the target K_m.
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        route: Option<String>,
    },
    /// Experimental: does ϖ₁^{n-2} of Hom(C_{2r+1},K_n) vanish on a grid.
    ScanConjecture {
        #[arg(long, default_value = "1..2")]
        r: String,
        #[arg(long, default_value = "3..5")]
        n: String,
        /// CSV copy of the grid.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Pages of the support-filtration spectral sequence of Hom₊(G,H) over ℤ₂.
    Pages {
        #[arg(long, num_args = 2, value_names = ["G", "H"], required = true)]
        hom_plus: Vec<String>,
        #[arg(long, default_value_t = 2)]
        r: u32,
    },
    /// Quotient census of a product of d-spheres.
    Spheres {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "odd")]
        parity: String,
    },
    /// Re-check a saved report.
    Verify { report: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Parse(_) | Error::Unsupported(_) => 2,
        Error::Resource(_) => 3,
        Error::Domain(_) | Error::Contract(_) => 4,
    }
}

fn route(s: &Option<String>) -> Result<Option<homcx::equivariant::Route>> {
    s.as_ref()
        .map(|r| serde_json::from_value(serde_json::Value::String(r.to_lowercase())).map_err(|_| Error::arg(format!("unknown route `{r}`"))))
        .transpose()
}

fn settings(g: &Global) -> Result<Config> {
    let file = g.config.clone().or_else(|| std::env::var_os("HOMCX_CONFIG").map(PathBuf::from));
    let base = file.map(|p| Config::load(&p)).transpose()?.unwrap_or_default();
    let env = Config { cache_dir: std::env::var_os("HOMCX_CACHE_DIR").map(PathBuf::from), ..Default::default() };
    let flags = Config { budget: g.budget, cache_dir: g.cache_dir.clone(), chromatic_limit: None, no_cache: g.no_cache };
    if g.budget == Some(0) {
        return Err(Error::arg("budget must be positive"));
    }
    Ok(base.overlay(env).overlay(flags))
}

fn job_of(cmd: &Cmd, cfg: &Config, budget: usize) -> Result<Job> {
    Ok(match cmd {
        Cmd::Homology { hom, hom_plus, ind, coeff, degrees, reduced, cap } => {
            let (flavor, g, h) = match (hom, hom_plus, ind) {
                (Some(v), _, _) => (Flavor::Hom, &v[0], Some(&v[1])),
                (_, Some(v), _) => (Flavor::HomPlus, &v[0], Some(&v[1])),
                (_, _, Some(g)) => (Flavor::Ind, g, None),
                _ => return Err(Error::arg("one of --hom, --hom-plus, --ind is required")),
            };
            Job::Homology {
                flavor,
                g: graph_value(&load_graph(g)?),
                h: h.map(|h| load_graph(h).map(|h| graph_value(&h))).transpose()?,
                coeff: Coeff::parse(coeff)?,
                degrees: degrees.as_deref().map(parse_degrees).transpose()?,
                reduced: *reduced,
                cap: *cap,
            }
        }
        Cmd::Sw { hom, invol, route: r, check_power } => {
            let (t, h) = (load_graph(&hom[0])?, load_graph(&hom[1])?);
            let gamma = resolve_involution(&t, invol)?;
            Job::Sw { t: graph_value(&t), h: graph_value(&h), involution: gamma.image, route: route(r)?, check_power: *check_power }
        }
        Cmd::Bound { graph, test, invol, m, route: r } => {
            let (g, t) = (load_graph(graph)?, load_graph(test)?);
            let gamma = resolve_involution(&t, invol)?;
            let m = match m {
                Some(m) => parse_range(m)?,
                None => (2, cfg.chromatic_limit.unwrap_or(8).max(2)),
            };
            Job::Bound { g: graph_value(&g), t: graph_value(&t), involution: gamma.image, m, route: route(r)? }
        }
        Cmd::ScanConjecture { r, n, .. } => Job::ScanConjecture { r: parse_range(r)?, n: parse_range(n)?, budget },
        Cmd::Pages { hom_plus, r } => {
            Job::Pages { g: graph_value(&load_graph(&hom_plus[0])?), h: graph_value(&load_graph(&hom_plus[1])?), r: *r }
        }
        Cmd::Spheres { t, d, parity } => {
            let parity = match parity.to_lowercase().as_str() {
                "odd" => Parity::Odd,
                "even" => Parity::Even,
                p => return Err(Error::arg(format!("parity must be odd or even, got `{p}`"))),
            };
            Job::Spheres { t: *t, d: *d, parity }
        }
        Cmd::Verify { .. } => unreachable!(),
    })
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    let res = match out {
        Some(p) => std::fs::write(p, bytes),
        None => std::io::stdout().write_all(bytes),
    };
    res.map_err(|e| Error::arg(format!("cannot write report: {e}")))
}

fn parse_envelope(bytes: &[u8]) -> Result<Envelope> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse(format!("not a report: {e}")))
}

fn main_inner(cli: Cli) -> Result<()> {
    let cfg = settings(&cli.global)?;
    let budget = cfg.budget.unwrap_or(DEFAULT_BUDGET);
    if let Cmd::Verify { report } = &cli.cmd {
        let bytes = std::fs::read(report).map_err(|e| Error::arg(format!("cannot read {}: {e}", report.display())))?;
        let n = jobs::verify(&parse_envelope(&bytes)?, budget)?;
        println!("ok: {n} certificates verified");
        return Ok(());
    }
    let job = job_of(&cli.cmd, &cfg, budget)?;
    let cache = if cfg.no_cache {
        None
    } else {
        cfg.cache_dir.clone().or_else(cache::default_root).and_then(|root| Cache::new(&root).ok())
    };
    let key = job.digest();
    let cached = cache.as_ref().and_then(|c| c.report(&key)).filter(|b| parse_envelope(b).is_ok());
    let bytes = match cached {
        Some(b) => b,
        None => {
            let start = Instant::now();
            let out = jobs::run(&job, &Context { budget, cache: cache.as_ref() })?;
            let bytes = Envelope::new(&job, out, start.elapsed().as_secs_f64()).to_bytes();
            if let Some(c) = &cache {
                let _ = c.store_report(&key, &bytes);
            }
            bytes
        }
    };
    if cli.global.verify {
        let n = jobs::verify(&parse_envelope(&bytes)?, budget)?;
        eprintln!("verified {n} certificates");
    }
    if let Cmd::ScanConjecture { csv: Some(p), .. } = &cli.cmd {
        std::fs::write(p, jobs::csv_of(&parse_envelope(&bytes)?)).map_err(|e| Error::arg(format!("cannot write {}: {e}", p.display())))?;
    }
    emit(&cli.global.output, &bytes)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("homcx: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
