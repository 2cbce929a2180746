use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use orbitnest::artifact::CodeArtifact;
use orbitnest::bounds::{family_for_ratio, johnson, ratio_ceiling, ratio_report, to_csv, trend, ComparisonRow};
use orbitnest::constructions::{parse_blocks, Descriptor, Family, Ordering, TowerPlan, DEFAULT_ORBIT_BUDGET};
use orbitnest::distance::DEFAULT_SWEEP_BUDGET;
use orbitnest::field::DEFAULT_ELEMENT_BUDGET;
use orbitnest::verify::{run_checks, Budgets, Check, CheckRecord, Mode};
use orbitnest::{DuplicatePolicy, Error, FieldCtx};

#[derive(Parser)]
#[command(name = "orbitnest", version, about = "Cyclic subspace codes over finite field towers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest field to build, in elements
    #[arg(long, global = true, default_value_t = DEFAULT_ELEMENT_BUDGET)]
    max_field: u64,
    /// Largest exhaustive sweep, in intersection kernels
    #[arg(long, global = true, default_value_t = DEFAULT_SWEEP_BUDGET)]
    max_sweep: u64,
    /// Largest number of orbit representatives a construction may create
    #[arg(long, global = true, default_value_t = DEFAULT_ORBIT_BUDGET)]
    max_orbits: u64,
    /// More log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build F_(q^n) and print its modulus, generator and subfield lattice
    Field {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a construction and write the code artifact
    Construct {
        #[command(flatten)]
        desc: DescriptorArgs,
        #[arg(long, value_enum, default_value_t = OnDuplicate::Error)]
        on_duplicate: OnDuplicate,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a code artifact (or a construction built on the fly)
    Verify {
        #[arg(long, conflicts_with = "family")]
        artifact: Option<PathBuf>,
        #[command(flatten)]
        desc: OptDescriptorArgs,
        /// Comma separated: size,distance,fulllength,sidon,inequivalence
        #[arg(long, default_value = "size,distance,fulllength,sidon,inequivalence")]
        checks: String,
        /// exhaustive or sampled:N
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Johnson type bound II
    Bound {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sizes against the Johnson bound and earlier constructions over a grid
    Compare {
        /// q values, comma separated
        #[arg(long)]
        q: String,
        /// k values: a list "2,3" or a range "2..4"
        #[arg(long)]
        k: String,
        /// one family with its parameters; without it, --r picks the nested family per ratio
        #[arg(long)]
        family: Option<Family>,
        #[arg(long)]
        e: Option<u32>,
        #[arg(long)]
        p: Option<u64>,
        /// ratios n/k, comma separated
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        blocks: Option<String>,
        #[arg(long, default_value = "default")]
        ordering: Ordering,
        /// table rows to include
        #[arg(long, default_value = "1,2,3,4,5")]
        include: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DescriptorArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    family: Family,
    #[arg(long)]
    e: Option<u32>,
    #[arg(long)]
    p: Option<u64>,
    /// stage ratio for sidonchain / spread
    #[arg(long)]
    r: Option<u64>,
    /// odd prime blocks "p:e,p:e"
    #[arg(long)]
    blocks: Option<String>,
    #[arg(long, default_value = "default")]
    ordering: Ordering,
}

#[derive(Args)]
struct OptDescriptorArgs {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    family: Option<Family>,
    #[arg(long)]
    e: Option<u32>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    blocks: Option<String>,
    #[arg(long, default_value = "default")]
    ordering: Ordering,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnDuplicate {
    Error,
    DedupeWarn,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Exit 2: bad input or a violated hypothesis.
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

type CmdResult = Result<bool, Usage>;

#[allow(clippy::too_many_arguments)]
fn descriptor(
    q: u64,
    k: usize,
    family: Family,
    e: Option<u32>,
    p: Option<u64>,
    r: Option<u64>,
    blocks: Option<&str>,
    ordering: &Ordering,
) -> Result<Descriptor, Usage> {
    let mut d = Descriptor::new(family, q, k).with_ordering(ordering.clone());
    d.e = e;
    d.p = p;
    d.r = r;
    if let Some(b) = blocks {
        d.blocks = parse_blocks(b)?;
    }
    Ok(d)
}

impl DescriptorArgs {
    fn descriptor(&self) -> Result<Descriptor, Usage> {
        descriptor(self.q, self.k, self.family, self.e, self.p, self.r, self.blocks.as_deref(), &self.ordering)
    }
}

impl OptDescriptorArgs {
    fn descriptor(&self) -> Result<Descriptor, Usage> {
        let (Some(q), Some(k), Some(family)) = (self.q, self.k, self.family) else {
            return Err(Usage("give --artifact or --q, --k and --family".into()));
        };
        descriptor(q, k, family, self.e, self.p, self.r, self.blocks.as_deref(), &self.ordering)
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Usage> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_text<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn build(cli: &Cli, d: &Descriptor, policy: DuplicatePolicy) -> Result<CodeArtifact, Usage> {
    let plan = TowerPlan::from_descriptor(d)?;
    let f = plan.field(cli.max_field)?;
    info!("building {} in F_({}^{})", plan.label(), d.q, plan.n());
    let code = plan.build(&f, policy, cli.max_orbits)?;
    if code.provenance.duplicates_removed > 0 {
        warn!("{} duplicate orbits removed", code.provenance.duplicates_removed);
    }
    Ok(CodeArtifact::new(&f, d, &plan, &code)?)
}

fn cmd_field(cli: &Cli, q: u64, n: usize, out: Option<&PathBuf>) -> CmdResult {
    let f = FieldCtx::from_q(q, n).and_then(|f| {
        if f.size() > cli.max_field {
            Err(Error::BudgetExceeded {
                what: "field elements",
                needed: f.size().to_string(),
                limit: cli.max_field.to_string(),
            })
        } else {
            Ok(f)
        }
    })?;
    let report = f.report(1 << 18);
    emit(out, &json_text(&report))?;
    Ok(report.passed())
}

fn parse_mode(mode: &str, seed: Option<u64>) -> Result<Mode, Usage> {
    if mode == "exhaustive" {
        return Ok(Mode::Exhaustive);
    }
    let n = mode
        .strip_prefix("sampled:")
        .and_then(|n| n.parse::<u64>().ok())
        .ok_or_else(|| Usage(format!("mode must be exhaustive or sampled:N, got {mode:?}")))?;
    let seed = seed.ok_or_else(|| Usage("sampled mode needs --seed".into()))?;
    Ok(Mode::Sampled { samples: n, seed })
}

#[derive(serde::Serialize)]
struct VerifyReport<'a> {
    label: &'a str,
    q: u64,
    n: usize,
    k: usize,
    representatives: usize,
    checks: Vec<CheckRecord>,
}

fn cmd_verify(
    cli: &Cli,
    artifact: Option<&PathBuf>,
    desc: &OptDescriptorArgs,
    checks: &str,
    mode: &str,
    seed: Option<u64>,
    out: Option<&PathBuf>,
) -> CmdResult {
    let checks = checks
        .split(',')
        .map(|c| c.trim().parse::<Check>())
        .collect::<Result<Vec<_>, _>>()?;
    let mode = parse_mode(mode, seed)?;
    let art = match artifact {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
            CodeArtifact::from_json(&text)?
        }
        None => build(cli, &desc.descriptor()?, DuplicatePolicy::Error)?,
    };
    let (f, code) = art.open(cli.max_field)?;
    let budgets = Budgets {
        sweep: cli.max_sweep,
        ..Budgets::default()
    };
    let records = run_checks(&f, &code, &checks, mode, budgets)?;
    for r in &records {
        let status = if r.passed { "pass" } else { "FAIL" };
        eprintln!("{:<14} {status:<4} [{}] expected {} measured {}", r.check.name(), r.mode, r.expected, r.measured);
        if let (Some(seed), Some(samples)) = (r.seed, r.samples) {
            eprintln!("{:<14} seed {seed}, {samples} samples", "");
        }
    }
    let passed = records.iter().all(|r| r.passed);
    let report = VerifyReport {
        label: &code.provenance.label,
        q: f.q(),
        n: f.n(),
        k: code.k,
        representatives: code.reps.len(),
        checks: records,
    };
    emit(out, &json_text(&report))?;
    Ok(passed)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Usage> {
    let bad = || Usage(format!("bad {what} list {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        // ranges only make sense for integers; parse via u64
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        return (a..=b).map(|x| x.to_string().parse::<T>().map_err(|_| bad())).collect();
    }
    s.split(',').map(|t| t.trim().parse::<T>().map_err(|_| bad())).collect()
}

#[derive(serde::Serialize)]
struct CompareReport {
    grid: String,
    rows: Vec<ComparisonRow>,
    trends: Vec<TrendLine>,
}

#[derive(serde::Serialize)]
struct TrendLine {
    q: u64,
    r: u64,
    family: String,
    over_k: orbitnest::bounds::Trend,
}

#[allow(clippy::too_many_arguments)]
fn cmd_compare(
    qs: &str,
    ks: &str,
    family: Option<Family>,
    e: Option<u32>,
    p: Option<u64>,
    r: Option<&str>,
    blocks: Option<&str>,
    ordering: &Ordering,
    include: &str,
    format: Format,
    out: Option<&PathBuf>,
) -> CmdResult {
    let qs: Vec<u64> = parse_list(qs, "q")?;
    let ks: Vec<usize> = parse_list(ks, "k")?;
    let include: Vec<usize> = parse_list(include, "table row")?;
    // one series per (q, family parameters), in increasing k
    let mut series: Vec<Vec<Descriptor>> = Vec::new();
    match (family, r) {
        (Some(fam), None) => {
            for &q in &qs {
                series.push(
                    ks.iter()
                        .map(|&k| descriptor(q, k, fam, e, p, None, blocks, ordering))
                        .collect::<Result<_, _>>()?,
                );
            }
        }
        (None, Some(r)) => {
            let rs: Vec<u64> = parse_list(r, "r")?;
            for &q in &qs {
                for &r in &rs {
                    let row: Vec<Descriptor> = ks.iter().filter_map(|&k| family_for_ratio(q, k, r)).collect();
                    if row.is_empty() {
                        return Err(Usage(format!("ratio {r} has no nested family")));
                    }
                    series.push(row);
                }
            }
        }
        (Some(fam), Some(r)) => {
            let r: u64 = r.parse().map_err(|_| Usage(format!("bad ratio {r:?}")))?;
            for &q in &qs {
                series.push(
                    ks.iter()
                        .map(|&k| descriptor(q, k, fam, e, p, Some(r), blocks, ordering))
                        .collect::<Result<_, _>>()?,
                );
            }
        }
        (None, None) => return Err(Usage("compare needs --family or --r".into())),
    }
    let mut rows = Vec::new();
    let mut trends = Vec::new();
    for s in &series {
        // skip parameter points where the family's hypotheses fail
        let ok: Vec<Descriptor> = s
            .iter()
            .filter(|d| match TowerPlan::from_descriptor(d) {
                Ok(_) => true,
                Err(e) => {
                    warn!("skipping q={} k={} {}: {e}", d.q, d.k, d.family);
                    false
                }
            })
            .cloned()
            .collect();
        if ok.is_empty() {
            continue;
        }
        let part = ratio_report(&ok, &include)?;
        trends.push(TrendLine {
            q: ok[0].q,
            r: part[0].r,
            family: ok[0].family.to_string(),
            over_k: trend(&part, &ratio_ceiling(&ok[0])),
        });
        rows.extend(part);
    }
    if rows.is_empty() {
        return Err(Usage("no grid point satisfies the family hypotheses".into()));
    }
    for t in &trends {
        eprintln!(
            "q={} r={} {}: ratio increasing in k: {}, below {}: {}",
            t.q, t.r, t.family, t.over_k.strictly_increasing, t.over_k.ceiling, t.over_k.below_ceiling
        );
    }
    let text = match format {
        Format::Csv => to_csv(&rows),
        Format::Json => json_text(&CompareReport {
            grid: format!("q in {qs:?}, k in {ks:?}"),
            rows,
            trends,
        }),
    };
    emit(out, &text)?;
    Ok(true)
}

fn cmd_bound(q: u64, n: usize, d: usize, k: usize, format: Format, out: Option<&PathBuf>) -> CmdResult {
    let j = johnson(q, n, d, k)?;
    let text = match format {
        Format::Csv => format!("q,n,d,k,johnson\n{q},{n},{d},{k},{j}\n"),
        Format::Json => json_text(&serde_json::json!({ "q": q, "n": n, "d": d, "k": k, "johnson": j.to_string() })),
    };
    emit(out, &text)?;
    Ok(true)
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.cmd {
        Cmd::Field { q, n, out } => cmd_field(cli, *q, *n, out.as_ref()),
        Cmd::Construct { desc, on_duplicate, out } => {
            let policy = match on_duplicate {
                OnDuplicate::Error => DuplicatePolicy::Error,
                OnDuplicate::DedupeWarn => DuplicatePolicy::DedupeWarn,
            };
            let art = build(cli, &desc.descriptor()?, policy)?;
            eprintln!("{}: {} orbits, predicted size {}", art.provenance.label, art.reps.len(), art.predicted_size);
            emit(out.as_ref(), &art.to_json())?;
            Ok(true)
        }
        Cmd::Verify {
            artifact,
            desc,
            checks,
            mode,
            seed,
            out,
        } => cmd_verify(cli, artifact.as_ref(), desc, checks, mode, *seed, out.as_ref()),
        Cmd::Bound { q, n, d, k, format, out } => cmd_bound(*q, *n, *d, *k, *format, out.as_ref()),
        Cmd::Compare {
            q,
            k,
            family,
            e,
            p,
            r,
            blocks,
            ordering,
            include,
            format,
            out,
        } => cmd_compare(q, k, *family, *e, *p, r.as_deref(), blocks.as_deref(), ordering, include, *format, out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .expect("global pool is set once");
    }
    if cli.max_field == 0 || cli.max_sweep == 0 || cli.max_orbits == 0 {
        eprintln!("error: budgets must be positive");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
