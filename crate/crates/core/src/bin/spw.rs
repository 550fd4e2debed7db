use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use spw_core::corridors::build_decomposition;
use spw_core::domain::{parse_instance, random_instance, Instance, PathResult};
use spw_core::engine::{run_with, EngineOptions, RewindMode};
use spw_core::error::Error;
use spw_core::geom::Point;
use spw_core::oracle::{oracle_distance, path_is_valid};
use spw_core::render;
use spw_core::triangulate::triangulate;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "spw", version, about = "Shortest paths among polygonal obstacles")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rewind {
    Offset,
    Replay,
}

impl From<Rewind> for RewindMode {
    fn from(r: Rewind) -> Self {
        match r {
            Rewind::Offset => RewindMode::Offset,
            Rewind::Replay => RewindMode::Replay,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Shortest path by the wavefront engine.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the event trace (JSON lines) here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "offset")]
        rewind_mode: Rewind,
        /// Defer contact handling between windows of different triangles.
        #[arg(long)]
        lazy: bool,
    },
    /// Shortest path on the visibility graph.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Engine against oracle on a file or on seeded random instances.
    Compare {
        #[arg(long = "in", conflicts_with = "random")]
        input: Option<PathBuf>,
        /// `seed,m,k` of the first random instance; seeds count up from there.
        #[arg(long)]
        random: Option<String>,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Junction/corridor decomposition as JSON.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit the triangulation as an OFF listing instead.
        #[arg(long)]
        dump_tri: bool,
    },
    /// Event counts against the number of holes.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "5,10,20,40")]
        m_list: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        seeds: u64,
    },
    /// Event trace of an engine run.
    Trace {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dump_trees: bool,
        #[arg(long, value_enum, default_value = "offset")]
        rewind_mode: Rewind,
    },
    /// SVG of the domain, decomposition, path or the wavefront at a radius.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        /// domain | decomposition | path | wavefront:<d>
        #[arg(long)]
        what: String,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Disconnected) { 2 } else { 1 };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 1, msg: msg.into() }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    let bytes = std::fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(parse_instance(&bytes)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_lines(path: &Path, lines: &[String]) -> Result<(), Failure> {
    let mut text = lines.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Order-preserving parallel map over scoped worker threads.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|sc| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| sc.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

fn compare(input: Option<PathBuf>, random: Option<String>, count: u64, fault: bool) -> Result<ExitCode, Failure> {
    let jobs: Vec<(String, Option<Instance>, Option<(u64, usize, usize)>)> = match (input, random) {
        (Some(p), _) => vec![(p.display().to_string(), Some(load(&p)?), None)],
        (None, Some(triple)) => {
            let f: Vec<&str> = triple.split(',').collect();
            let parse = |s: &str| s.trim().parse::<u64>().map_err(|_| usage(format!("bad --random value: {triple}")));
            if f.len() != 3 {
                return Err(usage("--random takes seed,m,k"));
            }
            let (seed, m, k) = (parse(f[0])?, parse(f[1])? as usize, parse(f[2])? as usize);
            (0..count).map(|i| (format!("seed={},m={m},k={k}", seed + i), None, Some((seed + i, m, k)))).collect()
        }
        (None, None) => return Err(usage("compare needs --in or --random")),
    };
    let rows = par_map(&jobs, |(name, inst, gen)| -> Result<Value, String> {
        let inst = match (inst, gen) {
            (Some(i), _) => i.clone(),
            (None, Some((s, m, k))) => random_instance(*s, *m, *k).map_err(|e| e.to_string())?,
            _ => unreachable!(),
        };
        let mut a = run_with(&inst, EngineOptions::default()).map_err(|e| e.to_string())?;
        if fault {
            a.distance *= 1.0 + 1e-3;
        }
        let b = oracle_distance(&inst).map_err(|e| e.to_string())?;
        let work: Vec<Point> = a.path.iter().map(|p| Point::new(p.x / inst.scale, p.y / inst.scale)).collect();
        Ok(json!({
            "instance": name,
            "engine": a.distance,
            "oracle": b.distance,
            "rel_error": relative_error(a.distance, b.distance),
            "path_valid": path_is_valid(&inst, &work),
            "counters": a.counters,
        }))
    });
    let mut max_err: f64 = 0.0;
    let mut invalid = 0;
    let mut failures = Vec::new();
    let mut sums: BTreeMap<String, f64> = BTreeMap::new();
    let mut ok = 0usize;
    for (row, (name, _, _)) in rows.iter().zip(&jobs) {
        match row {
            Ok(v) => {
                ok += 1;
                max_err = max_err.max(v["rel_error"].as_f64().unwrap_or(f64::INFINITY));
                if v["path_valid"] != json!(true) {
                    invalid += 1;
                }
                if let Some(c) = v["counters"].as_object() {
                    for (k, x) in c {
                        *sums.entry(k.clone()).or_insert(0.0) += x.as_f64().unwrap_or(0.0);
                    }
                }
            }
            Err(e) => failures.push(json!({"instance": name, "error": e})),
        }
    }
    let means: BTreeMap<String, f64> = sums.into_iter().map(|(k, v)| (k, v / ok.max(1) as f64)).collect();
    let report = json!({
        "instances": jobs.len(),
        "max_rel_error": max_err,
        "path_failures": invalid,
        "failures": failures,
        "mean_counters": means,
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    let pass = max_err <= 1e-6 && invalid == 0 && failures.is_empty();
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

const BENCH_KEYS: [&str; 9] = [
    "type1",
    "type2",
    "type3",
    "type4",
    "bunch_peak",
    "bunches_created",
    "merges",
    "gateways",
    "splits",
];

fn bench(m_list: &[usize], k: usize, seeds: u64) -> Result<ExitCode, Failure> {
    let jobs: Vec<(usize, u64)> = m_list.iter().flat_map(|&m| (0..seeds).map(move |s| (m, s))).collect();
    let t0 = std::time::Instant::now();
    let results = par_map(&jobs, |&(m, s)| -> Result<BTreeMap<String, u64>, String> {
        let inst = random_instance(s, m, k).map_err(|e| e.to_string())?;
        Ok(run_with(&inst, EngineOptions::default()).map_err(|e| e.to_string())?.counters)
    });
    log::info!("bench ran {} instances in {:.2?}", jobs.len(), t0.elapsed());
    let mut rows = Vec::new();
    let mut means: Vec<BTreeMap<&str, f64>> = Vec::new();
    for &m in m_list {
        let mut sum: BTreeMap<&str, f64> = BTreeMap::new();
        let mut n = 0;
        for ((jm, _), r) in jobs.iter().zip(&results) {
            if *jm != m {
                continue;
            }
            let c = r.as_ref().map_err(|e| usage(format!("bench instance failed: {e}")))?;
            n += 1;
            for key in BENCH_KEYS {
                *sum.entry(key).or_insert(0.0) += c.get(key).copied().unwrap_or(0) as f64;
            }
        }
        let mean: BTreeMap<&str, f64> = sum.into_iter().map(|(k, v)| (k, v / n.max(1) as f64)).collect();
        means.push(mean.clone());
        rows.push(json!({"m": m, "mean": mean}));
    }
    let mut ratios = Vec::new();
    let mut flagged = Vec::new();
    for i in 1..m_list.len() {
        let mut r = BTreeMap::new();
        for key in BENCH_KEYS {
            let (a, b) = (means[i - 1][key], means[i][key]);
            let x = if a > 0.0 { b / a } else if b > 0.0 { f64::INFINITY } else { 1.0 };
            let x = if x.is_finite() { json!(x) } else { json!(null) };
            if key.starts_with("type") && x.as_f64().is_none_or(|v| v > 2.5) {
                flagged.push(json!({"from_m": m_list[i - 1], "to_m": m_list[i], "counter": key}));
            }
            r.insert(key, x);
        }
        ratios.push(json!({"from_m": m_list[i - 1], "to_m": m_list[i], "ratio": r}));
    }
    // Least-squares c for bunch_peak ≈ c·m, plus the worst per-m quotient.
    let (mut num, mut den, mut worst): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (&m, mean) in m_list.iter().zip(&means) {
        if m > 0 {
            num += m as f64 * mean["bunch_peak"];
            den += (m * m) as f64;
            worst = worst.max(mean["bunch_peak"] / m as f64);
        }
    }
    let report = json!({
        "k": k,
        "seeds": seeds,
        "rows": rows,
        "ratios": ratios,
        "flagged": flagged,
        "bunch_peak_fit": {"c": if den > 0.0 { num / den } else { 0.0 }, "max_peak_over_m": worst},
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(ExitCode::SUCCESS)
}

fn solve_opts(rewind: Rewind, lazy: bool, trace: bool, dump_trees: bool) -> EngineOptions {
    EngineOptions {
        rewind: rewind.into(),
        lazy,
        trace,
        dump_trees,
    }
}

fn real_main(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.cmd {
        Cmd::Solve {
            input,
            out,
            trace,
            rewind_mode,
            lazy,
        } => {
            let inst = load(&input)?;
            let r = run_with(&inst, solve_opts(rewind_mode, lazy, trace.is_some(), false))?;
            if let Some(t) = &trace {
                write_lines(t, &r.trace)?;
            }
            emit(&out, &(r.to_json() + "\n"))?;
        }
        Cmd::Oracle { input, out } => {
            let inst = load(&input)?;
            let r = oracle_distance(&inst)?;
            emit(&out, &(r.to_json() + "\n"))?;
        }
        Cmd::Compare {
            input,
            random,
            count,
            inject_fault,
        } => return compare(input, random, count, inject_fault),
        Cmd::Decompose { input, out, dump_tri } => {
            let inst = load(&input)?;
            let tri = triangulate(&inst)?;
            if dump_tri {
                emit(&out, &tri.to_off())?;
            } else {
                let dec = build_decomposition(&tri)?;
                emit(&out, &(dec.to_json() + "\n"))?;
            }
        }
        Cmd::Bench { m_list, k, seeds } => return bench(&m_list, k, seeds),
        Cmd::Trace {
            input,
            out,
            dump_trees,
            rewind_mode,
        } => {
            let inst = load(&input)?;
            let r = run_with(&inst, solve_opts(rewind_mode, false, true, dump_trees))?;
            match &out {
                Some(p) => write_lines(p, &r.trace)?,
                None => r.trace.iter().for_each(|l| println!("{l}")),
            }
        }
        Cmd::Render { input, what, out } => {
            let inst = load(&input)?;
            let svg = match what.as_str() {
                "domain" => render::render_domain(&inst),
                "decomposition" => render::render_decomposition(&inst)?,
                "path" => {
                    let r: PathResult = run_with(&inst, EngineOptions::default())?;
                    render::render_path(&inst, &r)
                }
                w => match w.strip_prefix("wavefront:").map(str::parse::<f64>) {
                    Some(Ok(d)) if d.is_finite() && d >= 0.0 => render::render_wavefront(&inst, d)?,
                    _ => return Err(usage(format!("unknown --what {w:?}; expected domain, decomposition, path or wavefront:<d>"))),
                },
            };
            emit(&Some(out), &svg)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SPW_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match real_main(cli) {
        Ok(c) => c,
        Err(f) => {
            eprintln!("spw: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
