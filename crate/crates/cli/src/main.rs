//! Command-line driver: one-shot sumsets and divisor bounds, the explicit
//! constructions, exhaustive minimum search backed by a JSONL cache, and the
//! claim-verification suites.
//!
//! Exit codes: 0 success, 1 invalid parameters or I/O faults, 2 usage
//! errors, 3 search budget exhausted (partial results were printed).

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rhohat::constructions::{
    analyze_special, construct_a, construct_b, special_family, ConstructionB, SpecialAnalysis,
    SpecialFamily,
};
use rhohat::formulas::{u, u_hat, Bound};
use rhohat::groups::{Group, GroupSubset};
use rhohat::search::{
    rho_hat_exact, rho_hat_table, ResultsCache, SearchRecord, SearchStatus, TableOptions,
};
use rhohat::verify::{
    audit_range, check_counterexamples, check_critical_number, check_half_range,
    check_pair_conjecture, check_prime_power_gap, check_prime_values, check_triple_bound, failures,
    write_audit_csv, write_audit_jsonl, write_checks_csv, write_checks_jsonl, CheckRow,
    VerifyOptions,
};
use rhohat::{Error, Result};

#[derive(Parser)]
#[command(
    name = "rhohat",
    version,
    about = "Restricted sumsets over Z_n: sizes, divisor bounds, constructions, and exact minima"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for results
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,

    /// Results cache file (JSONL, append-only)
    #[arg(long, env = "RHO_CACHE", default_value = "rho_hat_cache.jsonl", global = true)]
    cache: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Human-readable text
    Table,
    /// Comma-separated rows with a header line
    Csv,
    /// One JSON object per line
    Jsonl,
}

/// A set in a group: `--n 12 --set 0,1,4` for Z_12, or `--group 4:3 --set
/// 0:0,1:2,3:1` for Z_4 x Z_3 (factors and tuple digits colon-separated).
#[derive(Args)]
struct SetArgs {
    /// Cyclic group order
    #[arg(long, conflicts_with = "group")]
    n: Option<u32>,

    /// Product-group factors, colon-separated (e.g. 2:2:3)
    #[arg(long)]
    group: Option<String>,

    /// Comma-separated elements
    #[arg(long)]
    set: String,

    /// Number of summands
    #[arg(long)]
    h: u32,
}

#[derive(Args)]
struct CellArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    h: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// Prefix construction A_d(n,m): full cosets plus one partial coset
    A,
    /// Two-block construction B_d(n,m;k1,k2,g,j0)
    B,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    /// Every suite below except audit
    All,
    /// Exact minima over prime orders
    Primes,
    /// Half-range pair minima
    HalfRange,
    /// The pair-critical subset size
    CriticalNumber,
    /// Pair closed form vs search
    Pair,
    /// Triple closed form vs search
    Triple,
    /// Sets beating the classical patterns
    Counterexamples,
    /// Prime-power divisor-bound gap (needs --h, --p, --t)
    PrimePower,
    /// Per-cell bound-vs-search classification
    Audit,
}

#[derive(Subcommand)]
enum Command {
    /// h-fold sumset, repeated summands allowed
    Sumset(SetArgs),

    /// h-fold sumset over pairwise-distinct summands
    Rsumset(SetArgs),

    /// Divisor bound u(n,m,h) for unrestricted sumsets, with its table
    U(CellArgs),

    /// Divisor bound u^(n,m,h) for restricted sumsets, with its table
    Uhat(CellArgs),

    /// Print a divisor construction
    Construct {
        #[arg(long, value_enum, ignore_case = true)]
        kind: Kind,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u32,
        /// B only: size of the bottom partial coset
        #[arg(long)]
        k1: Option<u32>,
        /// B only: size of the top partial run
        #[arg(long)]
        k2: Option<u32>,
        /// B only: stride between consecutive cosets
        #[arg(long)]
        g: Option<u32>,
        /// B only: offset of the top run inside its coset
        #[arg(long)]
        j0: Option<u32>,
    },

    /// Match (h, n, m) against the special two-block families and analyze
    /// the extremal slices of the matched set
    Special(CellArgs),

    /// Exact minimum of |h^A| over m-subsets of Z_n, by exhaustive search
    RhoHat {
        #[command(flatten)]
        cell: CellArgs,
        /// Node budget; when exhausted the best bound found is printed and
        /// the exit code is 3
        #[arg(long)]
        budget: Option<u64>,
    },

    /// Compute every cell with n <= n-max into the cache
    Table {
        #[arg(long)]
        n_max: u32,
        /// Per-cell node budget
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 1)]
        threads: u32,
    },

    /// Check the library's claims against cached or freshly-searched minima
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Range limit for suites indexed by n
        #[arg(long, default_value_t = 20)]
        n_max: u32,
        /// Largest prime for the primes suite
        #[arg(long, default_value_t = 13)]
        p_max: u32,
        #[arg(long, default_value_t = 1)]
        threads: u32,
        /// Per-cell node budget for values missing from the cache
        #[arg(long)]
        budget: Option<u64>,
        /// Fold count for the prime-power suite
        #[arg(long)]
        h: Option<u32>,
        /// Odd prime for the prime-power suite
        #[arg(long)]
        p: Option<u32>,
        /// Exponent for the prime-power suite
        #[arg(long)]
        t: Option<u32>,
    },

    /// Replay the sets whose restricted sumsets beat the classical patterns
    Counterexamples {
        /// Per-cell node budget for the search-backed rows
        #[arg(long)]
        budget: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => code,
        // a closed pipe (e.g. piping into head) is not a fault
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli, out: &mut impl Write) -> Result<ExitCode> {
    let format = cli.format;
    match cli.command {
        Command::Sumset(args) => {
            let set = parse_set(&args)?;
            let sums = set.unrestricted_sumset(args.h)?;
            print_sumset(out, "sumset", &set, &sums, args.h, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Rsumset(args) => {
            let set = parse_set(&args)?;
            let sums = set.restricted_sumset(args.h);
            print_sumset(out, "rsumset", &set, &sums, args.h, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::U(c) => {
            let bound = u(c.n, c.m, c.h)?;
            print_bound(out, "u", &c, &bound, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Uhat(c) => {
            let bound = u_hat(c.n, c.m, c.h)?;
            print_bound(out, "u_hat", &c, &bound, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Construct { kind, n, m, d, k1, k2, g, j0 } => {
            let (set, params) = match kind {
                Kind::A => {
                    for (flag, val) in [("--k1", k1), ("--k2", k2), ("--g", g), ("--j0", j0)] {
                        if val.is_some() {
                            return Err(Error::OutOfRange(format!(
                                "{flag} only applies to --kind b"
                            )));
                        }
                    }
                    (
                        construct_a(n, m, d)?,
                        serde_json::json!({"kind": "A", "n": n, "m": m, "d": d}),
                    )
                }
                Kind::B => {
                    let (k1, k2, g, j0) = match (k1, k2, g, j0) {
                        (Some(k1), Some(k2), Some(g), Some(j0)) => (k1, k2, g, j0),
                        _ => {
                            return Err(Error::OutOfRange(
                                "--kind b needs --k1, --k2, --g, and --j0".into(),
                            ))
                        }
                    };
                    let b = ConstructionB::new(n, m, d, k1, k2, g, j0)?;
                    (construct_b(&b)?, serde_json::to_value(b).expect("plain fields"))
                }
            };
            print_construction(out, &set, params, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Special(c) => {
            match special_family(c.h, c.n, c.m) {
                None => match format {
                    Format::Table => {
                        writeln!(out, "no special family matches h={} n={} m={}", c.h, c.n, c.m)?
                    }
                    Format::Csv => writeln!(out, "matched\nfalse")?,
                    Format::Jsonl => writeln!(out, "{}", serde_json::json!({"matched": false}))?,
                },
                Some(fam) => {
                    let analysis = analyze_special(&fam.b, c.h)?;
                    print_special(out, &fam, &analysis, format)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::RhoHat { cell: c, budget } => {
            let mut cache = ResultsCache::open(&cli.cache)?;
            let rec = match cache.get(c.n, c.m, c.h) {
                Some(r) if r.status == SearchStatus::Exact => r.clone(),
                _ => {
                    let rec = rho_hat_exact(c.n, c.m, c.h, budget)?;
                    cache.insert(rec.clone())?;
                    rec
                }
            };
            print_record(out, &rec, format)?;
            Ok(if rec.status == SearchStatus::BudgetExhausted {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Table { n_max, budget, threads } => {
            let mut cache = ResultsCache::open(&cli.cache)?;
            let opts = TableOptions { n_max, budget, threads };
            let mut streamed = Vec::new();
            let summary = rho_hat_table(&opts, &mut cache, |rec| match format {
                Format::Table => {}
                Format::Csv => streamed.push(record_csv(rec)),
                Format::Jsonl => {
                    streamed.push(serde_json::to_string(rec).expect("serializable record"))
                }
            })?;
            match format {
                Format::Table => writeln!(
                    out,
                    "{} cells to n = {}: {} computed, {} reused, {} derived, {} exhausted",
                    summary.cells,
                    n_max,
                    summary.computed,
                    summary.reused,
                    summary.derived,
                    summary.exhausted
                )?,
                Format::Csv => {
                    writeln!(out, "{}", record_csv_header())?;
                    for line in streamed {
                        writeln!(out, "{line}")?;
                    }
                }
                Format::Jsonl => {
                    for line in streamed {
                        writeln!(out, "{line}")?;
                    }
                }
            }
            Ok(if summary.exhausted > 0 { ExitCode::from(3) } else { ExitCode::SUCCESS })
        }
        Command::Verify { suite, n_max, p_max, threads, budget, h, p, t } => {
            let cache = open_read_only(&cli.cache)?;
            let opts = VerifyOptions { threads, budget };
            if suite == Suite::Audit {
                let rows = audit_range(n_max, &cache)?;
                match format {
                    Format::Table => {
                        for r in &rows {
                            let rho =
                                r.rho_hat.map(|v| v.to_string()).unwrap_or_else(|| "?".into());
                            writeln!(
                                out,
                                "n={} m={} h={}: u={} u^={} rho^={} {}",
                                r.n,
                                r.m,
                                r.h,
                                r.u,
                                r.u_hat,
                                rho,
                                variant_name(r.classification)
                            )?;
                        }
                    }
                    Format::Csv => write_audit_csv(&rows, out)?,
                    Format::Jsonl => write_audit_jsonl(&rows, out)?,
                }
                return Ok(ExitCode::SUCCESS);
            }
            let mut rows = Vec::new();
            if matches!(suite, Suite::All | Suite::Primes) {
                rows.extend(check_prime_values(p_max, &cache, &opts)?);
            }
            if matches!(suite, Suite::All | Suite::HalfRange) {
                rows.extend(check_half_range(n_max, &cache, &opts)?);
            }
            if matches!(suite, Suite::All | Suite::CriticalNumber) {
                rows.extend(check_critical_number(n_max, &cache, &opts)?);
            }
            if matches!(suite, Suite::All | Suite::Pair) {
                rows.extend(check_pair_conjecture(n_max, &cache, &opts)?);
            }
            if matches!(suite, Suite::All | Suite::Triple) {
                rows.extend(check_triple_bound(n_max, &cache, &opts)?);
            }
            if matches!(suite, Suite::All | Suite::Counterexamples) {
                rows.extend(check_counterexamples(&cache, &opts)?);
            }
            if suite == Suite::PrimePower {
                let (h, p, t) = match (h, p, t) {
                    (Some(h), Some(p), Some(t)) => (h, p, t),
                    _ => {
                        return Err(Error::OutOfRange(
                            "--suite prime-power needs --h, --p, and --t".into(),
                        ))
                    }
                };
                rows.extend(check_prime_power_gap(h, p, t)?);
            }
            print_checks(out, &rows, format)?;
            // findings live in the rows; the exit status is for faults only
            Ok(ExitCode::SUCCESS)
        }
        Command::Counterexamples { budget } => {
            let cache = open_read_only(&cli.cache)?;
            let opts = VerifyOptions { threads: 1, budget };
            let rows = check_counterexamples(&cache, &opts)?;
            print_checks(out, &rows, format)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Opens the cache if the file exists, otherwise an in-memory one; the
/// read-only subcommands never create cache files as a side effect.
fn open_read_only(path: &Path) -> Result<ResultsCache> {
    if path.exists() {
        ResultsCache::open(path)
    } else {
        Ok(ResultsCache::in_memory())
    }
}

fn parse_set(args: &SetArgs) -> Result<GroupSubset> {
    let group = match (args.n, &args.group) {
        (Some(n), None) => Group::cyclic(n)?,
        (None, Some(spec)) => Group::product(parse_tuple(spec)?)?,
        _ => return Err(Error::OutOfRange("give exactly one of --n or --group".into())),
    };
    let mut elements = Vec::new();
    for tok in args.set.split(',') {
        let e = match &group {
            Group::Cyclic(_) => parse_int(tok)?,
            Group::Product(g) => g.encode(&parse_tuple(tok)?)?,
        };
        elements.push(e);
    }
    GroupSubset::new(group, elements)
}

fn parse_int(tok: &str) -> Result<u32> {
    tok.trim().parse().map_err(|_| Error::OutOfRange(format!("expected an integer, got {tok:?}")))
}

fn parse_tuple(tok: &str) -> Result<Vec<u32>> {
    tok.split(':').map(parse_int).collect()
}

/// The snake_case name a fieldless enum variant serializes to.
fn variant_name<T: serde::Serialize>(v: T) -> String {
    serde_json::to_value(v).expect("unit variant").as_str().expect("string variant").to_string()
}

/// Set elements for JSON output: plain numbers over Z_n, formatted tuples
/// over products.
fn json_elements(set: &GroupSubset) -> serde_json::Value {
    let vals: Vec<serde_json::Value> = set
        .elements()
        .into_iter()
        .map(|e| match set.group() {
            Group::Cyclic(_) => serde_json::Value::from(e),
            Group::Product(_) => serde_json::Value::from(set.group().format_element(e)),
        })
        .collect();
    serde_json::Value::from(vals)
}

fn joined_elements(set: &GroupSubset) -> String {
    set.elements().into_iter().map(|e| set.group().format_element(e)).collect::<Vec<_>>().join(" ")
}

fn print_sumset(
    out: &mut impl Write,
    kind: &str,
    set: &GroupSubset,
    sums: &GroupSubset,
    h: u32,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Table => {
            writeln!(out, "set: {set} ({} elements)", set.len())?;
            writeln!(out, "{kind}: {sums}")?;
            writeln!(out, "size: {}", sums.len())?;
        }
        Format::Csv => {
            writeln!(out, "kind,h,size,elements")?;
            writeln!(out, "{kind},{h},{},{}", sums.len(), joined_elements(sums))?;
        }
        Format::Jsonl => {
            writeln!(
                out,
                "{}",
                serde_json::json!({
                    "kind": kind,
                    "h": h,
                    "size": sums.len(),
                    "elements": json_elements(sums),
                })
            )?;
        }
    }
    Ok(())
}

fn print_bound(
    out: &mut impl Write,
    which: &str,
    c: &CellArgs,
    bound: &Bound,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Table => {
            writeln!(
                out,
                "{which}({}, {}, {}) = {} at d = {}",
                c.n, c.m, c.h, bound.value, bound.argmin
            )?;
            writeln!(
                out,
                "{:>4} {:>4} {:>4} {:>4} {:>4} {:>6} {:>6} {:>7}",
                "d", "c", "k", "q", "r", "f_d", "delta", "f_hat_d"
            )?;
            for r in &bound.rows {
                writeln!(
                    out,
                    "{:>4} {:>4} {:>4} {:>4} {:>4} {:>6} {:>6} {:>7}",
                    r.d, r.c, r.k, r.q, r.r, r.f_d, r.delta_d, r.f_hat_d
                )?;
            }
        }
        Format::Csv => {
            writeln!(out, "n,m,h,d,c,k,q,r,f_d,delta_d,f_hat_d,argmin")?;
            for r in &bound.rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    c.n,
                    c.m,
                    c.h,
                    r.d,
                    r.c,
                    r.k,
                    r.q,
                    r.r,
                    r.f_d,
                    r.delta_d,
                    r.f_hat_d,
                    r.d == bound.argmin
                )?;
            }
        }
        Format::Jsonl => {
            for r in &bound.rows {
                let mut v = serde_json::to_value(r).expect("plain fields");
                let obj = v.as_object_mut().expect("struct serializes to an object");
                obj.insert("n".into(), c.n.into());
                obj.insert("m".into(), c.m.into());
                obj.insert("h".into(), c.h.into());
                obj.insert("argmin".into(), (r.d == bound.argmin).into());
                writeln!(out, "{v}")?;
            }
            writeln!(
                out,
                "{}",
                serde_json::json!({
                    "bound": which, "n": c.n, "m": c.m, "h": c.h,
                    "value": bound.value, "argmin": bound.argmin,
                })
            )?;
        }
    }
    Ok(())
}

fn print_construction(
    out: &mut impl Write,
    set: &GroupSubset,
    params: serde_json::Value,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Table => {
            writeln!(out, "{set}")?;
            writeln!(out, "size: {}", set.len())?;
        }
        Format::Csv => {
            writeln!(out, "size,elements")?;
            writeln!(out, "{},{}", set.len(), joined_elements(set))?;
        }
        Format::Jsonl => {
            let mut v = params;
            let obj = v.as_object_mut().expect("params are an object");
            obj.insert("size".into(), set.len().into());
            obj.insert("elements".into(), json_elements(set));
            writeln!(out, "{v}")?;
        }
    }
    Ok(())
}

fn print_special(
    out: &mut impl Write,
    fam: &SpecialFamily,
    analysis: &SpecialAnalysis,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Table => {
            let b = &fam.b;
            writeln!(
                out,
                "family: {} -> B_{}({}, {}; k1={}, k2={}, g={}, j0={})",
                variant_name(fam.kind),
                b.d,
                b.n,
                b.m,
                b.k1,
                b.k2,
                b.g,
                b.j0
            )?;
            writeln!(out, "claimed size: {}", fam.claimed)?;
            writeln!(out, "block sizes: {:?}", analysis.block_sizes)?;
            writeln!(out, "index range: {} ..= {}", analysis.i_min, analysis.i_max)?;
            writeln!(out, "g condition: {}", analysis.g_condition_holds)?;
            writeln!(out, "bottom slice: {:?}", analysis.bottom_slice)?;
            writeln!(out, "top slice: {:?}", analysis.top_slice)?;
            writeln!(out, "special: {}", analysis.is_special)?;
        }
        Format::Csv => {
            writeln!(out, "matched,kind,n,m,d,k1,k2,g,j0,claimed,g_condition,special")?;
            let b = &fam.b;
            writeln!(
                out,
                "true,{},{},{},{},{},{},{},{},{},{},{}",
                variant_name(fam.kind),
                b.n,
                b.m,
                b.d,
                b.k1,
                b.k2,
                b.g,
                b.j0,
                fam.claimed,
                analysis.g_condition_holds,
                analysis.is_special
            )?;
        }
        Format::Jsonl => {
            writeln!(
                out,
                "{}",
                serde_json::json!({
                    "matched": true,
                    "family": fam,
                    "analysis": analysis,
                })
            )?;
        }
    }
    Ok(())
}

fn record_csv_header() -> &'static str {
    "n,m,h,rho_hat,status,nodes,witness"
}

fn record_csv(rec: &SearchRecord) -> String {
    let witness = rec.witness.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    format!(
        "{},{},{},{},{},{},{}",
        rec.n,
        rec.m,
        rec.h,
        rec.rho_hat,
        variant_name(rec.status),
        rec.nodes,
        witness
    )
}

fn print_record(out: &mut impl Write, rec: &SearchRecord, format: Format) -> io::Result<()> {
    match format {
        Format::Table => {
            let qualifier = match rec.status {
                SearchStatus::Exact => "=",
                SearchStatus::BudgetExhausted => "<=",
            };
            writeln!(out, "rho_hat({}, {}, {}) {qualifier} {}", rec.n, rec.m, rec.h, rec.rho_hat)?;
            writeln!(
                out,
                "witness: {{{}}}",
                rec.witness.iter().map(u32::to_string).collect::<Vec<_>>().join(", ")
            )?;
            writeln!(out, "nodes: {}", rec.nodes)?;
            if rec.status == SearchStatus::BudgetExhausted {
                writeln!(out, "status: budget exhausted, value is an upper bound")?;
            }
        }
        Format::Csv => {
            writeln!(out, "{}", record_csv_header())?;
            writeln!(out, "{}", record_csv(rec))?;
        }
        Format::Jsonl => {
            writeln!(out, "{}", serde_json::to_string(rec).expect("serializable record"))?;
        }
    }
    Ok(())
}

fn print_checks(out: &mut impl Write, rows: &[CheckRow], format: Format) -> io::Result<()> {
    match format {
        Format::Table => {
            for r in rows {
                let verdict = if r.pass { "ok  " } else { "FAIL" };
                writeln!(
                    out,
                    "{verdict} {} {}: expected {}, got {}",
                    r.check, r.params, r.expected, r.got
                )?;
            }
            writeln!(out, "{} checks, {} failures", rows.len(), failures(rows))?;
        }
        Format::Csv => write_checks_csv(rows, out)?,
        Format::Jsonl => write_checks_jsonl(rows, out)?,
    }
    Ok(())
}
