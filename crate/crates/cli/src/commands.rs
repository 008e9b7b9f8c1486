//! `run` and `compare`: execute sweeps and write CSVs plus a manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{ExperimentConfig, Method};
use crate::error::CliError;
use crate::experiment::{execute, PointOutcome, Prepared};
use crate::report::{self, Manifest, PointRecord, SUMMARY_HEADER};

#[derive(Debug, Clone)]
pub struct Options {
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub seed: u64,
}

/// Outcome of a sweep command.
#[derive(Debug)]
pub struct Report {
    pub points: Vec<PointOutcome>,
    pub files: Vec<PathBuf>,
}

impl Report {
    pub fn failed(&self) -> usize {
        self.points.iter().filter(|p| p.result.is_err()).count()
    }
}

/// Runs `f` on a pool with `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}"))),
    }
}

pub fn run(config_text: &str, opts: &Options) -> Result<Report, CliError> {
    let cfg = ExperimentConfig::parse(config_text)?;
    if cfg.run.dt.is_empty() {
        return Err(CliError::Config("`dt` is required in [run]".into()));
    }
    sweep("run", config_text, cfg, &[], opts)
}

/// Runs every method in `methods` over its `dt` list and adds
/// `frontier.csv` with the error against wall time.
pub fn compare(config_text: &str, opts: &Options) -> Result<Report, CliError> {
    let cfg = ExperimentConfig::parse(config_text)?;
    let methods = cfg.run.methods.clone();
    for &m in &methods {
        if cfg.dt_for(m).is_empty() {
            return Err(CliError::Config(format!(
                "no dt list for {m}: set dt in [run] or dt.{m} in [compare]"
            )));
        }
    }
    let mut report = sweep("compare", config_text, cfg, &methods, opts)?;
    let path = opts.out.join("frontier.csv");
    fs::write(&path, frontier_csv(&report.points))?;
    report.files.push(path);
    Ok(report)
}

fn sweep(
    command: &str,
    config_text: &str,
    cfg: ExperimentConfig,
    methods: &[Method],
    opts: &Options,
) -> Result<Report, CliError> {
    let start = Instant::now();
    let methods = if methods.is_empty() {
        vec![cfg.run.method]
    } else {
        methods.to_vec()
    };
    let (prepared, points) = with_threads(opts.threads, || -> Result<_, CliError> {
        let prepared = Prepared::new(&cfg)?;
        let mut points = Vec::new();
        for &m in &methods {
            let dts = if command == "run" {
                &cfg.run.dt[..]
            } else {
                cfg.dt_for(m)
            };
            points.extend(execute(&cfg, &prepared, m, dts, &cfg.n_t_list(dts.len())));
        }
        Ok((prepared, points))
    })??;
    let derived = prepared.derived()?;

    // single collector: files are written in sweep order after all points finish
    fs::create_dir_all(&opts.out)?;
    let system = cfg.run.system.to_string();
    let mut files = Vec::new();
    let mut summary = String::from(SUMMARY_HEADER);
    summary.push('\n');
    let mut records = Vec::new();
    let mut index = std::collections::BTreeMap::<Method, usize>::new();
    for p in &points {
        let i = index.entry(p.method).or_insert(0);
        let name = report::point_file_name(&system, p, *i);
        *i += 1;
        if let Some(csv) = report::point_csv(p) {
            let path = opts.out.join(&name);
            fs::write(&path, csv)?;
            files.push(path);
        }
        summary.push_str(&report::summary_line(&name, p));
        summary.push('\n');
        records.push(PointRecord::new(name, p));
    }
    let path = opts.out.join("summary.csv");
    fs::write(&path, summary)?;
    files.push(path);

    let manifest = Manifest {
        version: report::VERSION,
        command: command.to_string(),
        seed: opts.seed,
        threads: opts.threads,
        config_text: config_text.to_string(),
        config: cfg,
        derived,
        points: records,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    let path = opts.out.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    files.push(path);
    Ok(Report { points, files })
}

/// `method,dt,eps_sol_max,wall_seconds,pareto`; a point is on the Pareto
/// front when no other point is at least as good in both columns and
/// strictly better in one.
pub fn frontier_csv(points: &[PointOutcome]) -> String {
    let ok: Vec<(&PointOutcome, f64)> = points
        .iter()
        .filter_map(|p| p.result.as_ref().ok().map(|d| (p, d.eps_sol_max)))
        .collect();
    let mut s = String::from("method,dt,eps_sol_max,wall_seconds,pareto\n");
    for &(p, e) in &ok {
        let dominated = ok
            .iter()
            .any(|&(q, f)| f <= e && q.wall_seconds <= p.wall_seconds && (f < e || q.wall_seconds < p.wall_seconds));
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            p.method,
            report::num(p.dt),
            report::num(e),
            report::num(p.wall_seconds),
            !dominated
        ));
    }
    s
}

pub fn read_config(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}
