use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use paucity::counting::{brute_count_with_budget, case_partition, guided_count, maxnumreps_with_budget, SystemInstance};
use paucity::curve::{GroundSet, SeparatedSystem};
use paucity::elimination::{EliminantStrategy, EliminationKit};
use paucity::harness::config::{parse_point_set, SetRole};
use paucity::harness::suite::{run_suite, suite_exit_code, SUITES};
use paucity::harness::{
    improving_scan, paucity_scan, with_threads, ASampling, ExperimentConfig, HarnessError, OutputFormat, ScanReport,
    EXIT_ASSERTION, EXIT_OK,
};
use paucity::refinement::{refinement_certificate_with, CertificateOptions, TowerOptions};

#[derive(Parser)]
#[command(name = "paucity", version, about = "Counting and averaging experiments for polynomial curves")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Work budget for enumeration.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Defaults to csv for scans and json otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Brute,
    Guided,
    Partition,
}

#[derive(Args)]
struct CurveArg {
    /// `moment:R`, `monomials:D1,D2,...`, inline `{"polys":[[..],..]}` or a JSON file path.
    #[arg(long)]
    curve: String,
}

#[derive(Args)]
struct ScanArgs {
    /// JSON experiment config; other scan flags are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    curve: Option<String>,
    /// Ground-set specs: `range:N`, `random:N,DENSITY,SEED` or `file:PATH`.
    #[arg(long = "set", num_args = 1..)]
    sets: Vec<String>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// `uniform-box`, `realized` or `explicit:a1,a2;b1,b2`.
    #[arg(long)]
    a_sampling: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    /// Witness kinds for `improving`: delta, curve, box.
    #[arg(long = "witness")]
    witnesses: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Degrees, constants and elimination data of a curve.
    CurveInfo {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, default_value_t = false)]
        eliminant: bool,
    },
    /// Number of solutions of the s-fold system with target a.
    Count {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        set: String,
        #[arg(long)]
        s: usize,
        /// Comma-separated target.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[arg(long, default_value_t = false)]
        witnesses: bool,
    },
    /// Largest solution count over targets with nonzero coordinates.
    Maxreps {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        set: String,
        #[arg(long)]
        s: usize,
    },
    /// Eliminant Q and quotient R.
    Elim {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Refinement tower and certificate for a pair (E, F), as JSON.
    Refine {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        set: String,
        /// `points:..`, `box:LO:HI`, `witness:delta|curve|box` or `file:PATH`.
        #[arg(long)]
        e: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = false)]
        exhaustive_anchor: bool,
        #[arg(long)]
        tuple_budget: Option<u64>,
    },
    /// Restricted weak-type ratios of extremal witnesses against the conjectured bound.
    Improving(ScanArgs),
    /// max_a J_s(a) across ground sets.
    PaucityScan(ScanArgs),
    /// Runs a named check bundle.
    Suite {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        name: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.global.threads;
    let code = with_threads(threads, || match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    });
    ExitCode::from(code as u8)
}

fn parse_target(s: &str) -> Result<Vec<BigInt>, HarnessError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| HarnessError::Usage(format!("bad target coordinate `{t}`")))
        })
        .collect()
}

fn curve(spec: &str) -> Result<SeparatedSystem, HarnessError> {
    SeparatedSystem::parse_spec(spec).map_err(|e| HarnessError::Usage(e.to_string()))
}

fn ground(spec: &str) -> Result<GroundSet, HarnessError> {
    GroundSet::parse_spec(spec).map_err(|e| HarnessError::Usage(e.to_string()))
}

fn run(cli: &Cli) -> Result<i32, HarnessError> {
    let g = &cli.global;
    let budget = g.budget.unwrap_or(paucity::counting::DEFAULT_BUDGET);
    if budget == 0 {
        return Err(HarnessError::Usage("budget must be positive".into()));
    }
    match &cli.cmd {
        Cmd::CurveInfo { curve: c, eliminant } => {
            let sys = curve(&c.curve)?;
            let cfg = ExperimentConfig::new(c.curve.clone(), vec![]);
            let (p, q) = cfg.exponents(sys.r())?;
            let mut v = json!({
                "curve": sys.to_string(),
                "r": sys.r(),
                "degrees": sys.degrees(),
                "total_degree": sys.total_degree(),
                "degree_product": sys.degree_product(),
                "critical_exponent": sys.critical_exponent().to_string(),
                "p": p.to_string(),
                "q": q.to_string(),
                "jacobian_cofactor": paucity::elimination::jacobian_cofactor(&sys)?.to_string(),
            });
            if *eliminant {
                let kit = EliminationKit::build(&sys)?;
                v["strategy"] = json!(kit.strategy);
                v["eliminant"] = json!(kit.eliminant.to_string());
            }
            emit(g, &v)?;
            Ok(EXIT_OK)
        }
        Cmd::Count {
            curve: c,
            set,
            s,
            a,
            method,
            witnesses,
        } => {
            let inst = SystemInstance::new(curve(&c.curve)?, ground(set)?, *s, parse_target(a)?)?;
            let (route, tally) = match method {
                Method::Brute => ("brute".to_string(), brute_count_with_budget(&inst, *witnesses, budget)?),
                Method::Partition => ("partition".to_string(), case_partition(&inst, *witnesses)?),
                Method::Guided => {
                    let o = guided_count(&inst, *witnesses)?;
                    (format!("{:?}", o.route).to_lowercase(), o.tally)
                }
                Method::Auto => match guided_count(&inst, *witnesses) {
                    Ok(o) => (format!("{:?}", o.route).to_lowercase(), o.tally),
                    Err(_) => ("brute".to_string(), brute_count_with_budget(&inst, *witnesses, budget)?),
                },
            };
            let v = json!({
                "curve": inst.system.to_string(),
                "ground_len": inst.ground.len(),
                "s": s,
                "a": a,
                "route": route,
                "count": tally.count,
                "partition": tally.partition,
                "witnesses": tally.witnesses,
            });
            emit(g, &v)?;
            Ok(EXIT_OK)
        }
        Cmd::Maxreps { curve: c, set, s } => {
            let sys = curve(&c.curve)?;
            let gr = ground(set)?;
            let (m, arg) = maxnumreps_with_budget(&sys, &gr, *s, budget)?;
            let v = json!({
                "curve": sys.to_string(),
                "ground_len": gr.len(),
                "s": s,
                "maxnumreps": m,
                "argmax": arg.map(|a| a.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
            });
            emit(g, &v)?;
            Ok(EXIT_OK)
        }
        Cmd::Elim { curve: c, strategy } => {
            let sys = curve(&c.curve)?;
            let kit = match strategy {
                None => EliminationKit::build(&sys)?,
                Some(st) => {
                    let st = EliminantStrategy::parse(st)
                        .ok_or_else(|| HarnessError::Usage(format!("unknown strategy `{st}` (newton | resultant)")))?;
                    EliminationKit::build_with(&sys, st)?
                }
            };
            let v = json!({
                "curve": sys.to_string(),
                "strategy": kit.strategy,
                "vandermonde": kit.vandermonde.to_string(),
                "jacobian_cofactor": kit.jacobian_cofactor.to_string(),
                "eliminant": kit.eliminant.to_string(),
                "quotient": kit.quotient.to_string(),
            });
            emit(g, &v)?;
            Ok(EXIT_OK)
        }
        Cmd::Refine {
            curve: c,
            set,
            e,
            f,
            s,
            exhaustive_anchor,
            tuple_budget,
        } => {
            let sys = curve(&c.curve)?;
            let gr = ground(set)?;
            let e = parse_point_set(e, SetRole::E, &sys, &gr)?;
            let f = parse_point_set(f, SetRole::F, &sys, &gr)?;
            let mut tower = TowerOptions::default();
            if let Some(t) = tuple_budget {
                tower.tuple_budget = *t;
            }
            if let Some(b) = g.budget {
                tower.work_budget = b;
            }
            let opts = CertificateOptions {
                tower,
                exhaustive_anchor: *exhaustive_anchor,
            };
            let cert = refinement_certificate_with(&sys, &gr, &e, &f, *s, &opts)?;
            let text = serde_json::to_string_pretty(&cert).expect("certificate serializes") + "\n";
            write_text(g, &text)?;
            Ok(if cert.checks_hold() { EXIT_OK } else { EXIT_ASSERTION })
        }
        Cmd::Improving(args) => {
            let rep = improving_scan(&scan_config(args, g, budget)?)?;
            emit_report(g, &rep)?;
            Ok(EXIT_OK)
        }
        Cmd::PaucityScan(args) => {
            let rep = paucity_scan(&scan_config(args, g, budget)?)?;
            emit_report(g, &rep)?;
            Ok(EXIT_OK)
        }
        Cmd::Suite { name } => {
            let result = run_suite(name, g.seed);
            let code = suite_exit_code(&result);
            let summary = result?;
            for c in &summary.checks {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                eprintln!("{verdict} {} ({} cases) {}", c.name, c.cases, c.detail);
            }
            emit(g, &serde_json::to_value(&summary).expect("summary serializes"))?;
            Ok(code)
        }
    }
}

fn scan_config(args: &ScanArgs, g: &Global, budget: u64) -> Result<ExperimentConfig, HarnessError> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Usage(format!("cannot read `{}`: {e}", path.display())))?;
        return ExperimentConfig::from_json(&text);
    }
    let c = args
        .curve
        .clone()
        .ok_or_else(|| HarnessError::Usage("scan needs --curve or --config".into()))?;
    if args.sets.is_empty() {
        return Err(HarnessError::Usage("scan needs at least one --set".into()));
    }
    let mut cfg = ExperimentConfig::new(c, args.sets.clone());
    cfg.s = args.s;
    cfg.p = args.p.clone();
    cfg.q = args.q.clone();
    if let Some(a) = &args.a_sampling {
        cfg.a_sampling = ASampling::parse(a)?;
    }
    if let Some(n) = args.samples {
        cfg.samples = n;
    }
    cfg.witnesses = args
        .witnesses
        .iter()
        .map(|w| {
            paucity::averaging::WitnessKind::parse(w).ok_or_else(|| HarnessError::Usage(format!("unknown witness `{w}`")))
        })
        .collect::<Result<_, _>>()?;
    cfg.seed = g.seed;
    cfg.budget = budget;
    Ok(cfg)
}

fn scan_format(g: &Global) -> OutputFormat {
    g.format.unwrap_or(Format::Csv).into()
}

fn emit_report(g: &Global, rep: &ScanReport) -> Result<(), HarnessError> {
    match &g.out {
        Some(path) => {
            rep.write(path, scan_format(g))?;
        }
        None => print!("{}", rep.render(scan_format(g))?),
    }
    Ok(())
}

/// JSON as is; CSV as `field,value` rows with nested values inlined as JSON.
fn emit(g: &Global, v: &Value) -> Result<(), HarnessError> {
    let text = match g.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(v).expect("value serializes") + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["field", "value"]).map_err(csv_err)?;
            if let Value::Object(map) = v {
                for (k, x) in map {
                    let cell = match x {
                        Value::String(s) => s.clone(),
                        Value::Null => String::new(),
                        other => other.to_string(),
                    };
                    w.write_record([k.as_str(), cell.as_str()]).map_err(csv_err)?;
                }
            }
            String::from_utf8(w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?).expect("utf8")
        }
    };
    write_text(g, &text)
}

fn csv_err(e: csv::Error) -> HarnessError {
    HarnessError::Io(e.into())
}

fn write_text(g: &Global, text: &str) -> Result<(), HarnessError> {
    match &g.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
