//! `gvs`: norms, semigroup values and verification suites from the command line.

mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gvs_core::hermite::parse_function;
use gvs_core::lebesgue::{DiscreteMeasure, LpSpace};
use gvs_core::semigroups::{Path, SemigroupQuery, DEFAULT_KERNEL_NODES};
use gvs_core::smoothness::{self, SmoothnessContext, SmoothnessParams, SpaceKind};
use gvs_core::suites::{self, SuiteConfig, SuiteResult};
use gvs_core::{Error, ExponentFunction};
use serde_json::json;

use crate::config::{Config, NormConfig, SemigroupConfig};
use crate::output::{write_csv, CsvRow};

#[derive(Parser, Debug)]
#[command(
    name = "gvs",
    version,
    about = "Variable-exponent Gaussian Besov and Triebel-Lizorkin norms"
)]
struct Cli {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    /// Seed for random families.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiplier on all default grid resolutions.
    #[arg(long, global = true, env = "GVS_GRID_SCALE")]
    grid_scale: Option<f64>,
    /// Run independent cases concurrently.
    #[arg(long, global = true)]
    parallel: bool,
    /// Write a CSV table to this path.
    #[arg(long, global = true)]
    csv: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Space {
    Lp,
    Besov,
    Triebel,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Semigroup {
    Ou,
    Ph,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PathArg {
    Expansion,
    Kernel,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lebesgue, Besov or Triebel-Lizorkin norm of a function literal.
    Norm {
        #[arg(long, value_enum)]
        space: Option<Space>,
        /// `h:n`, `expand:[(ν,c),...]` or `family:random:N:seed`.
        #[arg(long = "f")]
        function: Option<String>,
        /// Exponent descriptor such as `const:2`, `gaussian:1.5:1` or `time:1.5:3`.
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        k: Option<u32>,
    },
    /// `T_t f(x)` or `∂ᵏP_t f(x)` by either computation path.
    Semigroup {
        #[arg(long = "f")]
        function: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        k: Option<u32>,
        /// Comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
        #[arg(long, value_enum)]
        kind: Option<Semigroup>,
        #[arg(long, value_enum)]
        path: Option<PathArg>,
    },
    /// Run one suite (or `all`) and print its JSON report.
    Verify { suite: String },
    /// Run suites and print a summary table.
    Report {
        /// Comma-separated suite ids; all suites when omitted.
        #[arg(long, value_delimiter = ',')]
        suites: Option<Vec<String>>,
    },
}

/// Exit codes.
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("gvs: {e}");
            if e.is_usage() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_NONCONVERGENCE)
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    cfg.seed = cli.seed.or(cfg.seed);
    cfg.grid_scale = cli.grid_scale.or(cfg.grid_scale);
    cfg.parallel = Some(cli.parallel || cfg.parallel.unwrap_or(false));
    cfg.csv = cli.csv.clone().or(cfg.csv);
    let suite_cfg = cfg.suite_config();
    match cli.command {
        Command::Norm {
            space,
            function,
            p,
            q,
            alpha,
            k,
        } => {
            let mut n = cfg.norm.take().unwrap_or_default();
            n.space = space.map(|s| format!("{s:?}").to_lowercase()).or(n.space);
            n.f = function.or(n.f);
            n.p = p.or(n.p);
            n.q = q.or(n.q);
            n.alpha = alpha.or(n.alpha);
            n.k = k.or(n.k);
            cmd_norm(&n, &cfg, &suite_cfg)
        }
        Command::Semigroup {
            function,
            t,
            k,
            x,
            kind,
            path,
        } => {
            let mut s = cfg.semigroup.take().unwrap_or_default();
            s.f = function.or(s.f);
            s.t = t.or(s.t);
            s.k = k.or(s.k);
            s.x = x.or(s.x);
            s.kind = kind.map(|v| format!("{v:?}").to_lowercase()).or(s.kind);
            s.path = path.map(|v| format!("{v:?}").to_lowercase()).or(s.path);
            cmd_semigroup(&s, &suite_cfg)
        }
        Command::Verify { suite } => cmd_verify(&suite, &cfg, &suite_cfg),
        Command::Report { suites } => cmd_report(suites.or(cfg.suites.clone()), &cfg, &suite_cfg),
    }
}

fn required<T: Clone>(v: &Option<T>, name: &str) -> Result<T, Error> {
    v.clone()
        .ok_or_else(|| Error::invalid(format!("missing --{name}")))
}

fn print_json(v: &impl serde::Serialize) -> Result<(), Error> {
    let s = serde_json::to_string_pretty(v)
        .map_err(|e| Error::invalid(format!("serializing report: {e}")))?;
    println!("{s}");
    Ok(())
}

fn cmd_norm(n: &NormConfig, cfg: &Config, scfg: &SuiteConfig) -> Result<bool, Error> {
    let space = required(&n.space, "space")?;
    let f_lit = required(&n.f, "f")?;
    let f = parse_function(&f_lit)?;
    let p = ExponentFunction::parse(&required(&n.p, "p")?)?;
    let ctx = SmoothnessContext::scaled(scfg.grid_scale)?;
    let (report, row) = match space.as_str() {
        "lp" => {
            let rule = ctx.rule(f.dim())?;
            let r = LpSpace::new(DiscreteMeasure::gaussian(&rule), &p)?
                .norm_of(|x| f.eval_unchecked(x))?;
            let row = CsvRow::new(
                "norm",
                &f_lit,
                None,
                None,
                &p.describe(),
                "",
                r.value,
                r.value,
                true,
            );
            (
                json!({ "space": "lp", "f": f_lit, "p": p.describe(), "norm": r }),
                row,
            )
        }
        "besov" | "triebel" => {
            let alpha = required(&n.alpha, "alpha")?;
            let q = ExponentFunction::parse(&required(&n.q, "q")?)?;
            let sp = SmoothnessParams::new(alpha, n.k, p, q)?;
            let kind = if space == "besov" {
                SpaceKind::Besov
            } else {
                SpaceKind::Triebel
            };
            let r = smoothness::smoothness_norms(&f, &sp, &ctx, &[kind])?.remove(0);
            let row = CsvRow::new(
                "norm",
                &f_lit,
                Some(alpha),
                Some(r.k_used),
                &sp.p().describe(),
                &sp.q().describe(),
                r.seminorm,
                r.lp_norm,
                r.member,
            );
            let value = json!({
                "space": space,
                "f": f_lit,
                "alpha": alpha,
                "p": sp.p().describe(),
                "q": sp.q().describe(),
                "report": r,
            });
            (value, row)
        }
        other => {
            return Err(Error::invalid(format!(
                "unknown space '{other}' (lp, besov or triebel)"
            )))
        }
    };
    print_json(&report)?;
    if let Some(path) = &cfg.csv {
        write_csv(path, &[row])?;
    }
    Ok(true)
}

fn cmd_semigroup(s: &SemigroupConfig, scfg: &SuiteConfig) -> Result<bool, Error> {
    let f_lit = required(&s.f, "f")?;
    let f = parse_function(&f_lit)?;
    let t = required(&s.t, "t")?;
    let x = s.x.clone().unwrap_or_else(|| vec![0.0; f.dim()]);
    let ou = match s.kind.as_deref().unwrap_or("ph") {
        "ou" => true,
        "ph" => false,
        other => {
            return Err(Error::invalid(format!(
                "unknown semigroup '{other}' (ou or ph)"
            )))
        }
    };
    let path = match s.path.as_deref().unwrap_or("expansion") {
        "expansion" => Path::Expansion,
        "kernel" => Path::Kernel,
        other => {
            return Err(Error::invalid(format!(
                "unknown path '{other}' (expansion or kernel)"
            )))
        }
    };
    let query = SemigroupQuery {
        t,
        k: s.k.unwrap_or(0),
        path,
        ou,
    };
    let nodes = ((DEFAULT_KERNEL_NODES as f64 * scfg.grid_scale).round() as usize).max(4);
    let rule = gvs_core::quadrature::GaussianRule::new(f.dim(), nodes)?;
    let value = query.evaluate(&f, &x, &rule)?;
    print_json(&json!({ "f": f_lit, "query": query, "x": x, "value": value }))?;
    Ok(true)
}

fn rows(results: &[SuiteResult]) -> Vec<CsvRow> {
    results
        .iter()
        .flat_map(|r| r.cases.iter().map(|c| CsvRow::from_case(&r.suite_id, c)))
        .collect()
}

fn run_suites(ids: &[String], scfg: &SuiteConfig) -> Result<Vec<SuiteResult>, Error> {
    ids.iter().map(|id| suites::run_suite(id, scfg)).collect()
}

fn all_ids() -> Vec<String> {
    suites::suite_ids().map(String::from).collect()
}

fn cmd_verify(suite: &str, cfg: &Config, scfg: &SuiteConfig) -> Result<bool, Error> {
    let results = if suite == "all" {
        run_suites(&all_ids(), scfg)?
    } else {
        vec![suites::run_suite(suite, scfg)?]
    };
    if suite == "all" {
        print_json(&results)?;
    } else {
        print_json(&results[0])?;
    }
    if let Some(path) = &cfg.csv {
        write_csv(path, &rows(&results))?;
    }
    Ok(results.iter().all(|r| r.pass))
}

fn cmd_report(ids: Option<Vec<String>>, cfg: &Config, scfg: &SuiteConfig) -> Result<bool, Error> {
    let ids = ids.unwrap_or_else(all_ids);
    let results = run_suites(&ids, scfg)?;
    println!(
        "{:<20} {:>6} {:>7} {:>7} {:>10}",
        "suite", "result", "cases", "failed", "seconds"
    );
    for r in &results {
        let failed = r.cases.iter().filter(|c| !c.pass).count();
        let verdict = if r.pass { "pass" } else { "FAIL" };
        println!(
            "{:<20} {:>6} {:>7} {:>7} {:>10.2}",
            r.suite_id,
            verdict,
            r.cases.len(),
            failed,
            r.wall_time
        );
    }
    if let Some(path) = &cfg.csv {
        write_csv(path, &rows(&results))?;
    }
    Ok(results.iter().all(|r| r.pass))
}
