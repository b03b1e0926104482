use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use brauer_core::model::SurfaceModel;
use brauer_core::ramgraph::SurgeryRecord;
use brauer_core::selfcheck::{run_suite, SUITES};
use brauer_core::splitdrv::{construct_splitting, index_is_q, verify_splitting, ConstructOptions};
use brauer_core::{bundled, Error};

const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Parser)]
#[command(
    name = "brauer",
    version,
    about = "Ramification and cyclic splitting of prime-order Brauer classes on surface models"
)]
struct Cli {
    /// Worker threads for verification (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the class of every node.
    Classify(ModelArg),
    /// Blow up cool nodes and break chilly loops; print the new model and the surgery log.
    Resolve {
        #[command(flatten)]
        model: ModelArg,
        /// Write resolved.model and surgery.log into this directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decide whether the index is q (no hot nodes).
    Index(ModelArg),
    /// Resolve, gate, construct the splitting datum and verify it.
    Split {
        #[command(flatten)]
        model: ModelArg,
        /// Read chilly nodes with this coefficient instead of the constructed one.
        #[arg(long, value_name = "T")]
        perturb_chilly: Option<u64>,
        /// Ignore the divisor relations and choose E formally.
        #[arg(long)]
        formal_mode: bool,
        /// Write datum.txt, report.json, report.txt and resolved.model into this directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the randomized consistency suites.
    Selfcheck {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run only these suites (repeatable).
        #[arg(long = "suite", value_name = "NAME")]
        suites: Vec<String>,
    },
}

#[derive(Args)]
struct ModelArg {
    /// Model file, or `bundled:NAME` for a shipped sample.
    model: String,
}

/// Exit status and message of a failed command.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Precondition(_) | Error::Infeasible(_) => 2,
            _ => 1,
        };
        Failure(code, e.to_string())
    }
}

fn io_fail(path: &Path, e: std::io::Error) -> Failure {
    Failure(1, format!("{}: {e}", path.display()))
}

fn load(arg: &ModelArg) -> Result<SurfaceModel, Failure> {
    let text = match arg.model.strip_prefix("bundled:") {
        Some(name) => bundled::by_name(name)
            .ok_or_else(|| {
                let names: Vec<&str> = bundled::ALL.iter().map(|(n, _)| *n).collect();
                Failure(1, format!("no bundled model {name}; known: {}", names.join(", ")))
            })?
            .to_string(),
        None => {
            let path = Path::new(&arg.model);
            fs::read_to_string(path).map_err(|e| io_fail(path, e))?
        }
    };
    SurfaceModel::parse(&text).map_err(|e| Failure(1, format!("{}: {e}", arg.model)))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io_fail(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| io_fail(&path, e))
}

fn show_record(r: &SurgeryRecord) -> String {
    let mut line = format!("{} {} ({}, {}) -> {}", r.event, r.node, r.curves[0], r.curves[1], r.created.join(" "));
    if !r.coefficients.is_empty() {
        let cs: Vec<String> = r.coefficients.iter().map(|(id, s)| format!("{id}:s={s}")).collect();
        line.push_str(&format!(" [{}]", cs.join(" ")));
    }
    line
}

fn surgery_log(log: &[SurgeryRecord]) -> String {
    log.iter().map(|r| format!("{}\n", show_record(r))).collect()
}

fn classify(arg: &ModelArg) -> Result<u8, Failure> {
    let model = load(arg)?;
    for (id, class) in model.graph.classify_all()? {
        println!("node {id}: {class}");
    }
    Ok(0)
}

fn resolve(arg: &ModelArg, output: Option<&Path>) -> Result<u8, Failure> {
    let (resolved, log) = load(arg)?.resolve()?;
    let text = resolved.to_text();
    match output {
        Some(dir) => {
            write(dir, "resolved.model", &text)?;
            write(dir, "surgery.log", &surgery_log(&log))?;
            print!("{}", surgery_log(&log));
        }
        None => {
            print!("{text}");
            for r in &log {
                println!("# surgery: {}", show_record(r));
            }
        }
    }
    Ok(0)
}

fn index(arg: &ModelArg) -> Result<u8, Failure> {
    let model = load(arg)?;
    if model.graph.ramified_curves().is_empty() {
        println!("index = q (trivially)");
        return Ok(0);
    }
    let (ok, hot) = index_is_q(&model)?;
    if ok {
        println!("index = q");
        Ok(0)
    } else {
        println!("index > q: hot points [{}]", hot.join(", "));
        Ok(2)
    }
}

fn split(arg: &ModelArg, perturb: Option<u64>, formal: bool, output: Option<&Path>) -> Result<u8, Failure> {
    let model = load(arg)?;
    if let Some(t) = perturb {
        if t >= model.q() {
            return Err(Failure(1, format!("--perturb-chilly must be below q = {}", model.q())));
        }
    }
    let (ok, hot) = index_is_q(&model)?;
    if !ok {
        println!("index > q: hot points [{}]", hot.join(", "));
        return Ok(2);
    }
    let (resolved, log) = model.resolve()?;
    print!("{}", surgery_log(&log));
    let mut datum = construct_splitting(&resolved, ConstructOptions { formal })?;
    datum.perturb_chilly = perturb;
    let report = verify_splitting(&resolved, &datum)?;
    println!("m = {}", datum.m_element());
    print!("{}", report.to_human());
    if let Some(dir) = output {
        write(dir, "resolved.model", &resolved.to_text())?;
        write(dir, "datum.txt", &datum.to_text(&resolved)?)?;
        write(dir, "report.json", &format!("{}\n", report.to_json()))?;
        write(dir, "report.txt", &report.to_human())?;
    }
    Ok(if report.overall { 0 } else { 2 })
}

fn selfcheck(seed: u64, filter: &[String]) -> Result<u8, Failure> {
    for name in filter {
        if !SUITES.contains(&name.as_str()) {
            return Err(Failure(1, format!("unknown suite {name}; known: {}", SUITES.join(", "))));
        }
    }
    let chosen: Vec<&str> =
        SUITES.iter().copied().filter(|s| filter.is_empty() || filter.iter().any(|f| f == s)).collect();
    let mut good = 0;
    for name in &chosen {
        let r = run_suite(name, seed)?;
        println!("{}: {}/{} {}", r.name, r.passed, r.total, if r.ok() { "pass" } else { "FAIL" });
        for f in &r.failures {
            println!("  {f}");
        }
        good += usize::from(r.ok());
    }
    println!("selfcheck: {good}/{} suites pass (seed {seed})", chosen.len());
    Ok(if good == chosen.len() { 0 } else { 2 })
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.cmd {
        Cmd::Classify(m) => classify(m),
        Cmd::Resolve { model, output } => resolve(model, output.as_deref()),
        Cmd::Index(m) => index(m),
        Cmd::Split { model, perturb_chilly, formal_mode, output } => {
            split(model, *perturb_chilly, *formal_mode, output.as_deref())
        }
        Cmd::Selfcheck { seed, suites } => selfcheck(*seed, suites),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        pool = pool.num_threads(n.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
