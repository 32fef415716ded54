use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcondent::harness::{self, CheckConfig, Property, PropertyReport, SuiteReport};
use qcondent::io::{self, SweepDocument};
use qcondent::truncation::{self, BasisChoice, ProjectorSequence, SweepPlan};
use qcondent::{catalog, channels, entropy, DensityMatrix, Error, ExtendedReal};

#[derive(Parser)]
#[command(name = "qcondent", version, about = "Conditional entropy checks, sweeps and computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run randomized property checks.
    Check(CheckArgs),
    /// Conditional entropy along a truncation schedule.
    Converge(ConvergeArgs),
    /// Evaluate one quantity on a state.
    Compute(ComputeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Report entropies in bits instead of nats.
    #[arg(long)]
    bits: bool,
    /// Output file (or prefix for `converge`); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Leave the timestamp out of suite reports.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Property name, or `all`.
    #[arg(long, default_value = "all")]
    property: String,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated subsystem dimensions, e.g. `2,2,2`.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Include per-trial margins.
    #[arg(long)]
    records: bool,
    /// Rerun the configurations embedded in a report file.
    #[arg(long, conflicts_with_all = ["property", "trials", "dims", "tolerance"])]
    replay: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ConvergeArgs {
    /// State file or catalog spec, e.g. `tmsv:nbar=1,cutoff=30`.
    #[arg(long)]
    state: String,
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    given: Option<String>,
    /// Equal ranks on both sides, `LO..HI` inclusive.
    #[arg(long, conflicts_with = "schedule")]
    ranks: Option<String>,
    /// Explicit rank pairs, `n:k,n:k,...`.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long, value_enum, default_value_t = Basis::Computational)]
    basis: Basis,
    /// Also compute H_nk, H̃_nk and the marginal terms.
    #[arg(long)]
    diagnostics: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum Basis {
    Computational,
    Eigen,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Entropy,
    Relent,
    Condent,
    Mutinfo,
    Cohinfo,
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(value_enum)]
    quantity: Quantity,
    /// State file or catalog spec.
    #[arg(long)]
    state: String,
    /// Second state for `relent`.
    #[arg(long)]
    sigma: Option<String>,
    /// Channel file or spec for `cohinfo`.
    #[arg(long)]
    channel: Option<String>,
    /// Comma-separated labels.
    #[arg(long, value_delimiter = ',')]
    target: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    given: Option<Vec<String>>,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(a) => check(a),
        Command::Converge(a) => converge(a),
        Command::Compute(a) => compute(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(common: &Common, path: Option<&Path>, text: &str) -> qcondent::Result<()> {
    match path.or(common.out.as_deref()) {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn check(a: CheckArgs) -> qcondent::Result<u8> {
    let suite = if let Some(path) = &a.replay {
        let text = std::fs::read_to_string(path)?;
        let context = path.display().to_string();
        let previous: Vec<PropertyReport> = match serde_json::from_str::<SuiteReport>(&text) {
            Ok(s) => s.reports,
            Err(_) => vec![serde_json::from_str(&text)
                .map_err(|e| Error::Parse { context: format!("{context}:{}:{}", e.line(), e.column()), message: e.to_string() })?],
        };
        let mut reports = Vec::new();
        for old in &previous {
            let new = harness::replay(old)?;
            if &new != old {
                eprintln!("replay of `{}` differs from the recorded report", old.property);
            }
            reports.push(new);
        }
        let identical = reports == previous;
        let suite = SuiteReport::new(reports, !a.common.no_timestamp);
        if !identical {
            write_suite(&a.common, &suite)?;
            return Ok(1);
        }
        suite
    } else {
        let properties: Vec<Property> = if a.property == "all" {
            Property::ALL.to_vec()
        } else {
            a.property.split(',').map(Property::from_name).collect::<qcondent::Result<_>>()?
        };
        let configs: Vec<CheckConfig> = properties
            .into_iter()
            .map(|p| {
                let mut c = p.default_config(a.common.seed);
                if let Some(t) = a.trials {
                    c.trials = t;
                }
                if let Some(d) = &a.dims {
                    c.dims = d.clone();
                }
                if let Some(t) = a.tolerance {
                    c.tolerance = t;
                }
                c.records = a.records;
                c
            })
            .collect();
        harness::run_suite(&configs, !a.common.no_timestamp)?
    };
    for r in &suite.reports {
        eprintln!("{}", r.summary());
    }
    write_suite(&a.common, &suite)?;
    Ok(suite.exit_code() as u8)
}

fn write_suite(common: &Common, suite: &SuiteReport) -> qcondent::Result<()> {
    match common.format {
        Format::Json => emit(common, None, &json(suite)),
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_reports_csv(&mut buf, &suite.reports)?;
            emit(common, None, &String::from_utf8_lossy(&buf))
        }
    }
}

fn parse_err(arg: &str, message: impl Into<String>) -> Error {
    Error::Parse { context: arg.to_string(), message: message.into() }
}

fn parse_schedule(ranks: Option<&str>, schedule: Option<&str>, dims: (usize, usize)) -> qcondent::Result<Vec<(usize, usize)>> {
    let num = |s: &str, whole: &str| s.trim().parse::<usize>().map_err(|_| parse_err(whole, format!("`{s}` is not a rank")));
    if let Some(s) = schedule {
        return s
            .split(',')
            .map(|pair| {
                let (n, k) = pair.split_once(':').ok_or_else(|| parse_err(s, format!("`{pair}` is not `n:k`")))?;
                Ok((num(n, s)?, num(k, s)?))
            })
            .collect();
    }
    let (lo, hi) = match ranks {
        Some(r) => {
            let (lo, hi) = r.split_once("..").ok_or_else(|| parse_err(r, "expected `LO..HI`"))?;
            (num(lo, r)?, num(hi, r)?)
        }
        None => (1, dims.0.min(dims.1)),
    };
    if lo == 0 || lo > hi {
        return Err(parse_err(&format!("{lo}..{hi}"), "ranks must satisfy 1 ≤ LO ≤ HI"));
    }
    Ok((lo..=hi).map(|c| (c, c)).collect())
}

fn sequence(rho: &DensityMatrix, label: &str, basis: Basis, ranks: Vec<usize>) -> qcondent::Result<ProjectorSequence> {
    match basis {
        Basis::Computational => ProjectorSequence::computational(label, rho.layout().dim_of(label)?, ranks),
        Basis::Eigen => ProjectorSequence::marginal_eigenbasis(label, &rho.partial_trace(&[label])?, ranks),
    }
}

fn converge(a: ConvergeArgs) -> qcondent::Result<u8> {
    let rho = io::resolve_state(&a.state)?;
    rho.validate().into_result()?;
    let labels = rho.layout().labels();
    let target = a.target.clone().unwrap_or_else(|| labels[0].to_string());
    let given = a.given.clone().unwrap_or_else(|| labels.get(1).copied().unwrap_or("B").to_string());
    let dims = (rho.layout().dim_of(&target)?, rho.layout().dim_of(&given)?);
    let schedule = parse_schedule(a.ranks.as_deref(), a.schedule.as_deref(), dims)?;
    let ranks = |pick: fn(&(usize, usize)) -> usize| {
        let mut r: Vec<usize> = schedule.iter().map(pick).collect();
        r.sort_unstable();
        r.dedup();
        r
    };
    let plan = SweepPlan {
        target: sequence(&rho, &target, a.basis, ranks(|p| p.0))?,
        given: sequence(&rho, &given, a.basis, ranks(|p| p.1))?,
        schedule: schedule.clone(),
        diagnostics: a.diagnostics,
    };
    let mut rows = truncation::conditional_entropy_sweep(&rho, &plan)?;
    let mut reference = catalog::parse(&a.state)
        .ok()
        .filter(|_| !Path::new(&a.state).is_file())
        .and_then(|e| e.reference(&format!("H({target}|{given})")));
    if a.common.bits {
        for r in &mut rows {
            r.conditional_entropy = r.conditional_entropy.map(ExtendedReal::to_bits_unit);
        }
        reference = reference.map(|v| v / std::f64::consts::LN_2);
    }
    let doc = SweepDocument {
        state: a.state.clone(),
        target: target.clone(),
        given: given.clone(),
        basis: match a.basis {
            Basis::Computational => BasisChoice::Computational,
            Basis::Eigen => BasisChoice::MarginalEigenbasis,
        },
        schedule,
        seed: a.common.seed,
        reference,
        rows,
    };
    let mut csv = Vec::new();
    io::write_sweep_csv(&mut csv, &target, &given, &doc.rows)?;
    match &a.common.out {
        Some(prefix) => {
            let with_ext = |ext: &str| {
                let mut p = prefix.clone().into_os_string();
                p.push(ext);
                PathBuf::from(p)
            };
            File::create(with_ext(".csv"))?.write_all(&csv)?;
            File::create(with_ext(".json"))?.write_all(json(&doc).as_bytes())?;
        }
        None => match a.common.format {
            Format::Json => emit(&a.common, None, &json(&doc))?,
            Format::Csv => emit(&a.common, None, &String::from_utf8_lossy(&csv))?,
        },
    }
    if let (Some(r), Some(last)) = (reference, doc.rows.last().and_then(|r| r.conditional_entropy)) {
        eprintln!("final H({target}|{given}) = {last}, reference {r}, error {:.3e}", (last.to_f64() - r).abs());
    }
    Ok(0)
}

fn labels_or(given: &Option<Vec<String>>, default: Vec<&str>) -> Vec<String> {
    given.clone().unwrap_or_else(|| default.into_iter().map(String::from).collect())
}

fn compute(a: ComputeArgs) -> qcondent::Result<u8> {
    let rho = io::resolve_state(&a.state)?;
    rho.validate().into_result()?;
    let labels = rho.layout().labels();
    let last = *labels.last().expect("nonempty layout");
    let as_refs = |v: &[String]| v.iter().map(String::as_str).collect::<Vec<_>>().join(",");
    let mut detail = serde_json::Map::new();
    let value: ExtendedReal = match a.quantity {
        Quantity::Entropy => {
            let t = labels_or(&a.target, labels.clone());
            let refs: Vec<&str> = t.iter().map(String::as_str).collect();
            detail.insert("target".into(), as_refs(&t).into());
            entropy::von_neumann_entropy(&rho.partial_trace(&refs)?)?.into()
        }
        Quantity::Relent => {
            let sigma_arg = a.sigma.as_deref().ok_or_else(|| parse_err("relent", "--sigma is required"))?;
            let sigma = io::resolve_state(sigma_arg)?;
            sigma.validate().into_result()?;
            detail.insert("sigma".into(), sigma_arg.into());
            entropy::relative_entropy(&rho, &sigma)?
        }
        Quantity::Condent | Quantity::Mutinfo => {
            let t = labels_or(&a.target, vec![last]);
            let g = match &a.given {
                Some(g) => g.clone(),
                None => labels.iter().filter(|l| !t.iter().any(|x| x == *l)).map(|l| l.to_string()).collect(),
            };
            let tr: Vec<&str> = t.iter().map(String::as_str).collect();
            let gr: Vec<&str> = g.iter().map(String::as_str).collect();
            detail.insert("target".into(), as_refs(&t).into());
            detail.insert("given".into(), as_refs(&g).into());
            if let Quantity::Condent = a.quantity {
                entropy::reduced_conditional_entropy(&rho, &tr, &gr)?
            } else {
                let mut keep = tr.clone();
                keep.extend(&gr);
                entropy::mutual_information(&rho.partial_trace(&keep)?, &tr, &gr)?.into()
            }
        }
        Quantity::Cohinfo => {
            let spec = a.channel.as_deref().ok_or_else(|| parse_err("cohinfo", "--channel is required"))?;
            let channel = io::resolve_channel(spec)?;
            detail.insert("channel".into(), spec.into());
            channels::coherent_information(&rho, &channel)?.into()
        }
    };
    let unit = if a.common.bits { "bits" } else { "nats" };
    let value = if a.common.bits { value.to_bits_unit() } else { value };
    let name = match a.quantity {
        Quantity::Entropy => "entropy",
        Quantity::Relent => "relent",
        Quantity::Condent => "condent",
        Quantity::Mutinfo => "mutinfo",
        Quantity::Cohinfo => "cohinfo",
    };
    let text = match a.common.format {
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("quantity".into(), name.into());
            obj.insert("state".into(), a.state.clone().into());
            obj.extend(detail);
            obj.insert("value".into(), serde_json::to_value(value).expect("serializable"));
            obj.insert("unit".into(), unit.into());
            json(&obj)
        }
        Format::Csv => format!("quantity,value,unit\n{name},{value},{unit}\n"),
    };
    emit(&a.common, None, &text)?;
    Ok(0)
}
