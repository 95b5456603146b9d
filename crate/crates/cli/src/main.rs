use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use czset::compare::{bench_chain, comparison_plan, oracle_compare, MethodSpec};
use czset::io::{self, Csv, PdiffMeta};
use czset::pdiff::{self, InnerReport, PdiffResult};
use czset::rcset::{rc_run, Approx, RcOptions};
use czset::sets::boundary_sample;
use czset::Error;

#[derive(Parser)]
#[command(name = "czset", version, about = "Constrained zonotope Pontryagin differences and robust controllable sets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Inner,
    Outer,
    TwoStage,
}

#[derive(Subcommand)]
enum Cmd {
    /// Pontryagin difference of two sets given as JSON files.
    Pdiff {
        minuend: PathBuf,
        subtrahend: PathBuf,
        #[arg(long, value_enum, default_value = "inner")]
        mode: Mode,
        /// Result set JSON; metadata goes next to it as `<stem>.meta.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Robust controllable set recursion from a scenario config.
    Rc {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Boundary directions, overriding the config.
        #[arg(long)]
        directions: Option<usize>,
        /// Seed for `random-2d` models, overriding the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Inner recursion timing on the mass-spring-damper chain.
    BenchChain {
        /// Mass counts: `5`, `2..5` (inclusive) or `4,10,50`.
        #[arg(long, default_value = "2..5")]
        masses: String,
        #[arg(long = "horizon", short = 'T', default_value_t = 20)]
        horizon: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        parallel: bool,
    },
    /// Area ratios of the approximations against the exact planar recursion.
    OracleCompare {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Base directions of the support polygons, overriding the config.
        #[arg(long)]
        directions: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Command outcome besides hard errors.
enum Outcome {
    Done,
    Empty,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Pdiff { minuend, subtrahend, mode, out } => cmd_pdiff(&minuend, &subtrahend, mode, &out),
        Cmd::Rc { config, out, directions, seed } => cmd_rc(&config, &out, directions, seed),
        Cmd::BenchChain { masses, horizon, out, parallel } => cmd_bench_chain(&masses, horizon, &out, parallel),
        Cmd::OracleCompare { config, out, directions, seed } => cmd_oracle_compare(&config, &out, directions, seed),
    };
    match res {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Empty) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn meta_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("result");
    out.with_file_name(format!("{stem}.meta.json"))
}

fn ensure_dir(dir: &Path) -> czset::Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn cmd_pdiff(minuend: &Path, subtrahend: &Path, mode: Mode, out: &Path) -> czset::Result<Outcome> {
    let c = io::read_set(minuend)?.to_czono()?;
    let s = io::read_set(subtrahend)?.to_symmetric()?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    let start = Instant::now();
    let report = match mode {
        Mode::Inner => pdiff::inner_pdiff_report(&c, &s)?,
        Mode::TwoStage => pdiff::two_stage_report(&c, &s)?,
        Mode::Outer => InnerReport { result: pdiff::outer_pdiff(&c, &s)?, diag: None },
    };
    let millis = start.elapsed().as_secs_f64() * 1e3;
    let cx = report.result.set().map(|k| k.complexity());
    let meta = PdiffMeta {
        mode: format!("{mode:?}").to_lowercase(),
        empty: report.result.is_empty(),
        diag: report.diag.map(|d| d.d),
        constraints: cx.map(|c| c.constraints),
        generators: cx.map(|c| c.generators),
        dof: cx.map(|c| c.dof_order()),
        millis,
    };
    io::write_json(&meta_path(out), &serde_json::to_value(&meta).expect("plain metadata"))?;
    match report.result {
        PdiffResult::Set(k) => {
            io::write_json(out, &io::czono_to_value(&k))?;
            Ok(Outcome::Done)
        }
        PdiffResult::Empty => Ok(Outcome::Empty),
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> czset::Result<io::RcConfig> {
    let mut cfg = io::read_config(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn cmd_rc(config: &Path, out: &Path, directions: Option<usize>, seed: Option<u64>) -> czset::Result<Outcome> {
    let cfg = load_config(config, seed)?;
    let path = config.display().to_string();
    let sc = cfg.scenario(&path)?;
    let opts = match cfg.approx_kind()? {
        Approx::Inner => RcOptions::inner(),
        Approx::Outer => RcOptions::outer(),
        Approx::TwoStage => RcOptions::two_stage(),
    };
    let directions = directions.unwrap_or(cfg.directions);
    ensure_dir(out)?;
    let res = rc_run(&sc, opts)?;
    for rec in &res.records {
        if let Some(k) = &rec.set {
            io::write_json(&out.join(format!("K_{}.json", rec.t)), &io::czono_to_value(k))?;
            if cfg.emit_boundary && k.dim() == 2 {
                if let Some(pts) = boundary_sample(k, directions)? {
                    io::points_csv(&pts).write(&out.join(format!("boundary_{}.csv", rec.t)))?;
                }
            }
        }
    }
    io::summary_csv(&res).write(&out.join("summary.csv"))?;
    io::timings_csv(&res).write(&out.join("timings.csv"))?;
    Ok(if res.k0().is_some() { Outcome::Done } else { Outcome::Empty })
}

fn parse_masses(spec: &str) -> czset::Result<Vec<usize>> {
    let bad = || Error::InvalidInput(format!("--masses: cannot read `{spec}`"));
    let list: Vec<usize> = if let Some((a, b)) = spec.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        (a..=b).collect()
    } else {
        spec.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<czset::Result<_>>()?
    };
    if list.is_empty() {
        return Err(bad());
    }
    if let Some(m) = list.iter().find(|m| !(2..=50).contains(*m)) {
        return Err(Error::InvalidInput(format!("--masses: {m} is outside 2..50")));
    }
    Ok(list)
}

fn cmd_bench_chain(masses: &str, horizon: usize, out: &Path, parallel: bool) -> czset::Result<Outcome> {
    let list = parse_masses(masses)?;
    let rows = bench_chain(&list, horizon, parallel)?;
    let mut csv = Csv::new(&["masses", "n", "seconds", "M", "N", "dof", "empty"]);
    for r in &rows {
        let (m, n, dof) = match r.complexity {
            Some(c) => (c.constraints.to_string(), c.generators.to_string(), format!("{}", c.dof_order())),
            None => Default::default(),
        };
        csv.row(&[
            r.masses.to_string(),
            (2 * r.masses).to_string(),
            format!("{:.3}", r.seconds),
            m,
            n,
            dof,
            r.complexity.is_none().to_string(),
        ]);
    }
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    csv.write(out)?;
    Ok(Outcome::Done)
}

fn cmd_oracle_compare(config: &Path, out: &Path, directions: Option<usize>, seed: Option<u64>) -> czset::Result<Outcome> {
    let cfg = load_config(config, seed)?;
    let path = config.display().to_string();
    let sc = cfg.scenario(&path)?;
    if sc.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("oracle comparison needs n = 2, got {}", sc.dim())));
    }
    let plan = comparison_plan(&sc, cfg.methods.as_deref())?;
    let specs: Vec<MethodSpec<'_>> =
        plan.iter().map(|(label, scenario, approx)| MethodSpec { label, scenario, approx: *approx }).collect();
    let cmp = oracle_compare(&sc, &specs, directions.unwrap_or(cfg.directions))?;
    ensure_dir(out)?;
    let mut ratios = Csv::new(&["method", "area", "area_upper", "ratio", "M", "N", "dof"]);
    ratios.row(&[
        "exact".into(),
        format!("{:.6}", cmp.exact_area),
        format!("{:.6}", cmp.exact_area),
        "1".into(),
        String::new(),
        String::new(),
        String::new(),
    ]);
    let mut timings = Csv::new(&["method", "millis"]);
    for r in &cmp.rows {
        let (m, n, dof) = match r.complexity {
            Some(c) => (c.constraints.to_string(), c.generators.to_string(), format!("{}", c.dof_order())),
            None => Default::default(),
        };
        ratios.row(&[r.method.clone(), format!("{:.6}", r.area), format!("{:.6}", r.area_upper), format!("{:.4}", r.ratio), m, n, dof]);
        timings.row(&[r.method.clone(), format!("{:.3}", r.millis)]);
    }
    ratios.write(&out.join("ratios.csv"))?;
    timings.write(&out.join("timings.csv"))?;
    io::points_csv(cmp.exact.vertices()).write(&out.join("exact_polygon.csv"))?;
    Ok(Outcome::Done)
}
