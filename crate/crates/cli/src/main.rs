use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use curvemotive::checks::{run_suite, CheckConfig, Suite};
use curvemotive::hilb::fixed_generator_class;
use curvemotive::jets::{calibrate, count_jets, count_jets_stratified, CurvePoly, DEFAULT_CAP};
use curvemotive::resolution::{load_graph, resolve_pq, ResolutionGraph};
use curvemotive::semigroup::{enumerate_ideals, DEFAULT_SEARCH_BUDGET};
use curvemotive::zeta::{zeta_json, zeta_rational, zeta_series, ZetaOptions};
use curvemotive::NumericalSemigroup;

#[derive(Parser)]
#[command(name = "curvemotive", version, about = "Motivic invariants of unibranch plane curves")]
struct Cli {
    /// Enumeration cap; overrides MOTIVIC_CAP.
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generators, holes, delta and conductor.
    Semigroup {
        #[arg(long)]
        semigroup: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// All ideals of a given codimension.
    Ideals {
        #[arg(long)]
        semigroup: String,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Class of the length-n ideals with k generators.
    Hilb {
        #[arg(long)]
        semigroup: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Embedded resolution data.
    Resolve {
        #[command(flatten)]
        curve: GraphSource,
        #[arg(long, value_enum, default_value_t = GraphFormat::Text)]
        format: GraphFormat,
    },
    /// Truncated motivic zeta function.
    Zeta {
        #[command(flatten)]
        curve: GraphSource,
        #[arg(long, default_value_t = 12)]
        tmax: u64,
        #[arg(long)]
        origin_only: bool,
        /// Level shift; defaults to the calibrated one.
        #[arg(long, allow_hyphen_values = true)]
        kappa: Option<i64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Brute-force jet counts over a prime field.
    Oracle {
        #[command(subcommand)]
        action: OracleCommand,
    },
    /// Run a property suite.
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long)]
        tmax: Option<u64>,
        #[arg(long)]
        oracle_n_max: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    Count {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        origin_only: bool,
        /// Restrict to jets vanishing to order exactly k.
        #[arg(long)]
        k: Option<u64>,
    },
    Calibrate {
        #[arg(long)]
        curve: String,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long)]
        origin_only: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GraphSource {
    /// Coprime exponents of x^p = y^q, e.g. 2,3.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pq: Option<Vec<u64>>,
    /// JSON graph file.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Latex,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
    Text,
}

enum Failure {
    Domain(&'static str, String),
    Usage(String),
    ChecksFailed(String),
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("reports serialize");
    s.push('\n');
    s
}

fn cap_from_env(flag: Option<u64>) -> Result<Option<u64>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("MOTIVIC_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("MOTIVIC_CAP must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn parse_semigroup(literal: &str) -> Result<NumericalSemigroup, Failure> {
    NumericalSemigroup::parse(literal).map_err(|e| Failure::Domain(e.name(), e.to_string()))
}

fn parse_pq(values: &[u64]) -> Result<(u64, u64), Failure> {
    match values {
        [p, q] => Ok((*p, *q)),
        _ => Err(Failure::Usage(format!("expected two exponents p,q, got {values:?}"))),
    }
}

fn parse_curve(literal: &str) -> Result<(u64, u64), Failure> {
    let bad = || Failure::Domain("BadLiteral", format!("cannot parse curve {literal:?}, expected pq:P,Q"));
    let rest = literal.strip_prefix("pq:").ok_or_else(bad)?;
    let values: Vec<u64> = rest
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match values.as_slice() {
        [p, q] => Ok((*p, *q)),
        _ => Err(bad()),
    }
}

fn pq_graph(p: u64, q: u64) -> Result<ResolutionGraph, Failure> {
    resolve_pq(p, q).map_err(|e| Failure::Domain(e.name(), e.to_string()))
}

fn load_source(source: &GraphSource) -> Result<ResolutionGraph, Failure> {
    if let Some(pq) = &source.pq {
        let (p, q) = parse_pq(pq)?;
        return pq_graph(p, q);
    }
    let path = source.graph.as_ref().expect("clap enforces one source");
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Domain("IoError", format!("{}: {e}", path.display())))?;
    load_graph(&text).map_err(|e| Failure::Domain(e.name(), e.to_string()))
}

fn run(cli: Cli) -> Result<String, Failure> {
    let cap = cap_from_env(cli.cap)?;
    let budget = cap.unwrap_or(DEFAULT_SEARCH_BUDGET);
    let jet_cap = cap.unwrap_or(DEFAULT_CAP);
    match cli.command {
        Command::Semigroup { semigroup, format } => {
            let gamma = parse_semigroup(&semigroup)?;
            let report = gamma.to_json();
            Ok(match format {
                Format::Json => json(&report),
                Format::Text | Format::Latex => format!(
                    "generators {:?}\nholes {:?}\ndelta {}\nconductor {}\n",
                    report.generators, report.holes, report.delta, report.conductor
                ),
            })
        }
        Command::Ideals { semigroup, n, format } => {
            let gamma = parse_semigroup(&semigroup)?;
            let ideals = enumerate_ideals(&gamma, n, budget)
                .map_err(|e| Failure::Domain(e.name(), e.to_string()))?;
            Ok(match format {
                Format::Json => json(&ideals.iter().map(|i| i.to_json()).collect::<Vec<_>>()),
                Format::Text | Format::Latex => {
                    let mut out = String::new();
                    for i in &ideals {
                        let _ = writeln!(out, "{:?} missing {:?}", i.min_generators(), i.complement());
                    }
                    let _ = writeln!(out, "{} ideals", ideals.len());
                    out
                }
            })
        }
        Command::Hilb { semigroup, n, k, format } => {
            let gamma = parse_semigroup(&semigroup)?;
            let report = fixed_generator_class(&gamma, n, k, budget)
                .map_err(|e| Failure::Domain(e.name(), e.to_string()))?;
            Ok(match format {
                Format::Json => json(&report.to_json()),
                Format::Latex => format!("{}\n", report.total.to_latex()),
                Format::Text => {
                    let mut out = String::new();
                    for (t, s) in &report.tuples {
                        let _ = writeln!(out, "{:?} {}", t.values(), s);
                    }
                    let _ = writeln!(out, "total {}", report.total);
                    let _ = writeln!(out, "euler {}", report.euler);
                    if !report.exact {
                        out.push_str("combinatorial model, corrections not applied\n");
                    }
                    out
                }
            })
        }
        Command::Resolve { curve, format } => {
            let graph = load_source(&curve)?;
            Ok(match format {
                GraphFormat::Json => json(&graph.to_json()),
                GraphFormat::Dot => graph.to_dot(),
                GraphFormat::Text => graph.to_text(),
            })
        }
        Command::Zeta {
            curve,
            tmax,
            origin_only,
            kappa,
            format,
        } => {
            let graph = load_source(&curve)?;
            let mut options = ZetaOptions::calibrated(origin_only);
            if kappa.is_some() {
                options.kappa = kappa;
            }
            let series = zeta_series(&graph, tmax, options).map_err(|e| Failure::Domain(e.name(), e.to_string()))?;
            Ok(match format {
                Format::Json => json(&zeta_json(&series, &zeta_rational(&graph, origin_only))),
                Format::Text => series.to_text(),
                Format::Latex => format!("{}\n", series.to_latex()),
            })
        }
        Command::Oracle { action } => match action {
            OracleCommand::Count {
                curve,
                q,
                n,
                origin_only,
                k,
            } => {
                let (p, qq) = parse_curve(&curve)?;
                pq_graph(p, qq)?;
                let f = CurvePoly::pq(p as u32, qq as u32);
                let report = match k {
                    Some(k) => count_jets_stratified(&f, q, n, k, jet_cap),
                    None => count_jets(&f, q, n, origin_only, jet_cap),
                }
                .map_err(|e| Failure::Domain(e.name(), e.to_string()))?;
                Ok(json(&report))
            }
            OracleCommand::Calibrate {
                curve,
                q,
                n,
                origin_only,
            } => {
                let (p, qq) = parse_curve(&curve)?;
                let graph = pq_graph(p, qq)?;
                let f = CurvePoly::pq(p as u32, qq as u32);
                let calibration = calibrate(&graph, &f, &q, &n, origin_only, jet_cap)
                    .map_err(|e| Failure::Domain(e.name(), e.to_string()))?;
                Ok(json(&calibration))
            }
        },
        Command::Check {
            suite,
            n_max,
            tmax,
            oracle_n_max,
            format,
        } => {
            let suite: Suite = suite.parse().map_err(|e: curvemotive::checks::CheckError| {
                Failure::Usage(format!("{}: {e}", e.name()))
            })?;
            let mut config = CheckConfig {
                cap: jet_cap,
                budget,
                ..CheckConfig::default()
            };
            config.n_max = n_max.unwrap_or(config.n_max);
            config.t_max = tmax.unwrap_or(config.t_max);
            config.oracle_n_max = oracle_n_max.unwrap_or(config.oracle_n_max);
            let report = run_suite(suite, &config);
            let out = match format {
                Format::Json => json(&report),
                Format::Text | Format::Latex => report.to_text(),
            };
            if report.passed() {
                Ok(out)
            } else {
                Err(Failure::ChecksFailed(out))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(name, msg)) => {
            eprintln!("error: {name}: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::ChecksFailed(out)) => {
            print!("{out}");
            eprintln!("error: ChecksFailed");
            ExitCode::from(1)
        }
    }
}
