use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use esfrac::cascade::{decompose, decompose_with, Strategy};
use esfrac::coverage::{self, CoverConfig};
use esfrac::egyptian::{parse_param, DecompRecord, RecordJson};
use esfrac::families::{self, registry, ParamBinding, REGISTRY_VERSION};
use esfrac::lcmfn;
use esfrac::tables::{self, BrvsCaps, Format};
use esfrac::Error;

#[derive(Parser)]
#[command(name = "esfrac", version, about = "Exact Egyptian-fraction decompositions of k/n")]
struct Cli {
    /// Seed for every randomized procedure.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for searches; 1 runs everything sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decompose k/n into unit fractions.
    Decompose(DecomposeArgs),
    /// Re-verify decomposition records from a JSON file.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Inspect or verify the family registry.
    Families {
        #[command(subcommand)]
        cmd: FamiliesCmd,
    },
    /// Residue coverage of a family set modulo M.
    Cover(CoverArgs),
    /// Integer- or rational-size reachability of n.
    Reach(ReachArgs),
    /// Witness tables.
    Tables {
        #[command(subcommand)]
        cmd: TablesCmd,
    },
    /// The lcm counting functions Q, SQ, MQ.
    Lcmfn {
        #[command(subcommand)]
        cmd: LcmfnCmd,
    },
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    k: u64,
    #[arg(long)]
    n: u64,
    /// cascade, oracle or family:<id>
    #[arg(long, default_value = "cascade")]
    strategy: String,
    /// Every decomposition the strategy finds.
    #[arg(long)]
    all: bool,
    /// Explicit family parameter name=value (with --strategy family:<id>).
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum FamiliesCmd {
    /// List family ids with their parameters and identities.
    List,
    /// Sample and grid-check identities.
    Verify {
        /// Family or group id; all families when omitted.
        #[arg(long)]
        id: Option<String>,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
}

#[derive(Args)]
struct CoverArgs {
    #[arg(long = "mod")]
    modulus: u64,
    /// `all` or a comma-separated list of family or group ids.
    #[arg(long, default_value = "all")]
    families: String,
    #[arg(long, default_value_t = 12)]
    grid_max: i64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReachArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 4)]
    k: u64,
    #[arg(long)]
    rational: bool,
    #[arg(long)]
    bound: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrimeSet {
    #[value(name = "4a1")]
    FourA1,
    #[value(name = "120a1")]
    OneTwentyA1,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum TablesCmd {
    /// (b, r, v, s) rows for primes w = 1 (mod 4).
    Brvs {
        #[arg(long, value_enum, default_value = "4a1")]
        primes: PrimeSet,
        #[arg(long, default_value_t = 1009)]
        max: u64,
        #[arg(long, default_value_t = 64)]
        b_max: u64,
        #[arg(long, default_value_t = 10_000)]
        s_max: u64,
        /// Check the printed rows instead of searching.
        #[arg(long)]
        printed: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Size witnesses for every n in A..B.
    Witness {
        #[arg(long)]
        range: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The (a, b, c) search over m = 1 (mod 840).
    Mod840 {
        #[arg(long, default_value_t = 594_000)]
        m_max: u64,
        #[arg(long, default_value_t = 99)]
        c_max: u64,
        #[arg(long, default_value_t = 10)]
        b_max: u64,
    },
}

#[derive(Subcommand)]
enum LcmfnCmd {
    /// Q, SQ, MQ of (a, b).
    Q {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        /// Use the closed form (requires b | a).
        #[arg(long)]
        closed: bool,
    },
    /// Run the identity suite and report findings.
    Suite {
        /// Scales the brute-force ranges; defaults to the full suite.
        #[arg(long)]
        max_n: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failed run: exit code 1 for verification failures, 2 for bad input.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::IdentityViolation(_) => 1,
            _ => 2,
        };
        Fail(code, e.to_string())
    }
}

type Out = Result<(), Fail>;

fn usage(msg: impl Into<String>) -> Fail {
    Fail(2, format!("usage error: {}", msg.into()))
}

fn json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn write_or_print(out: &Option<PathBuf>, body: &str) -> Out {
    match out {
        Some(p) => std::fs::write(p, body).map_err(|e| Fail(2, format!("io error: {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn record_line(r: &DecompRecord) -> String {
    let params = match &r.sum.provenance {
        esfrac::egyptian::Provenance::Family { params, .. } => {
            params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
        }
        esfrac::egyptian::Provenance::Oracle => String::new(),
    };
    let tag = if params.is_empty() { r.family().to_string() } else { format!("{} {params}", r.family()) };
    format!("{}/{} {} [{tag}]", r.k, r.n, r.sum.to_string().split_once(" =").map_or("", |x| x.1).trim_start())
}

fn parse_params(raw: &[String]) -> Result<ParamBinding, Fail> {
    let mut p = BTreeMap::new();
    for kv in raw {
        let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("--param expects NAME=VALUE, got {kv:?}")))?;
        let v = parse_param(v).ok_or_else(|| usage(format!("bad value in --param {kv:?}")))?;
        p.insert(k.to_string(), v);
    }
    Ok(p)
}

fn run_decompose(a: &DecomposeArgs) -> Out {
    let strategy: Strategy = a.strategy.parse()?;
    let recs = if a.params.is_empty() {
        decompose(a.k, a.n, &strategy, a.all)?
    } else {
        let Strategy::Family(id) = &strategy else {
            return Err(usage("--param needs --strategy family:<id>"));
        };
        vec![decompose_with(id, a.k, a.n, &parse_params(&a.params)?)?]
    };
    if recs.iter().any(|r| !r.verified()) {
        return Err(Fail(1, "identity-violation: unverified record".into()));
    }
    if a.json {
        let js: Vec<RecordJson> = recs.iter().map(|r| r.to_json()).collect();
        println!("{}", json(&js));
    } else {
        for r in &recs {
            println!("{}", record_line(r));
        }
    }
    Ok(())
}

fn run_verify(input: &PathBuf) -> Out {
    let text = std::fs::read_to_string(input).map_err(|e| Fail(2, format!("io error: {}: {e}", input.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Fail(2, format!("parse error: {e}")))?;
    let items = match value {
        serde_json::Value::Array(xs) => xs,
        v => vec![v],
    };
    let mut bad = 0;
    for (i, item) in items.into_iter().enumerate() {
        let rec = serde_json::from_value::<RecordJson>(item)
            .map_err(|e| Error::Parse(e.to_string()))
            .and_then(|j| DecompRecord::from_json(&j));
        match rec {
            Ok(r) => println!("ok {i} {}", record_line(&r)),
            Err(e) => {
                bad += 1;
                println!("fail {i} {e}");
            }
        }
    }
    if bad > 0 {
        return Err(Fail(1, format!("identity-violation: {bad} record(s) failed verification")));
    }
    Ok(())
}

fn run_families(cmd: &FamiliesCmd, seed: u64) -> Out {
    match cmd {
        FamiliesCmd::List => {
            for f in &registry().families {
                println!("{}\t{}\t{}\t{}", f.id, f.signature(), f.identity(), f.class_template());
            }
            Ok(())
        }
        FamiliesCmd::Verify { id, samples } => {
            let fams: Vec<&families::FamilyDef> = match id {
                Some(id) => registry().select(id)?,
                None => registry().families.iter().collect(),
            };
            let mut failed = 0;
            for f in fams {
                let r = families::verify_identity(&f.id, *samples, seed)?;
                let grid = r.grid.as_ref().map_or((0, 0), |g| (g.in_domain, g.failures.len()));
                println!(
                    "{}\tsamples={}/{}\tdraws={}\tfailures={}\tgrid_in_domain={}\tgrid_failures={}\t{}",
                    r.id,
                    r.samples_verified,
                    r.samples_requested,
                    r.draws,
                    r.failures.len(),
                    grid.0,
                    grid.1,
                    if r.passed() { "pass" } else { "FAIL" }
                );
                failed += usize::from(!r.passed());
            }
            if failed > 0 {
                return Err(Fail(1, format!("identity-violation: {failed} family report(s) failed")));
            }
            Ok(())
        }
    }
}

fn run_cover(a: &CoverArgs) -> Out {
    let ids: Vec<String> = if a.families == "all" {
        coverage::all_families()
    } else {
        a.families.split(',').filter(|s| !s.is_empty()).map(|s| s.trim().to_string()).collect()
    };
    let cfg = CoverConfig { grid_max: a.grid_max, ..CoverConfig::default() };
    let rep = coverage::covers(&ids, a.modulus, &cfg)?;
    if a.json {
        println!("{}", json(&rep));
        return Ok(());
    }
    println!("modulus {} grid_max {} families {}", rep.modulus, cfg.grid_max, rep.families.len());
    for st in &rep.residues {
        if st.covered() {
            println!("{}\tcovered\t{}", st.form, st.covered_by.join(","));
        } else {
            println!("{}\tuncovered", st.form);
        }
    }
    Ok(())
}

fn run_reach(a: &ReachArgs) -> Out {
    if a.n == 0 || a.k == 0 {
        return Err(usage("--n and --k must be positive"));
    }
    if a.rational {
        let bound = a.bound.unwrap_or(a.n.div_ceil(2).max(1));
        match coverage::rational_size_reachable(a.n, a.k, bound) {
            Some(w) => {
                let dens = coverage::rational_witness_dens(a.n, &w);
                let dens = dens.map(|d| d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
                println!("rational e={} u={} f={} t={} dens={}", w.e, w.u, w.f, w.t, dens.unwrap_or_else(|| "-".into()));
            }
            None => println!("rational none within bound {bound}"),
        }
    } else {
        match coverage::integer_size_reachable(a.n, a.k) {
            Some(w) => println!("integer c={} d={} t={}", w.c, w.d, w.t),
            None => println!("integer none (bound {})", coverage::integer_bound(a.n, a.k)),
        }
    }
    Ok(())
}

fn parse_range(s: &str) -> Result<(u64, u64), Fail> {
    let (a, b) = s.split_once("..").ok_or_else(|| usage(format!("--range expects A..B, got {s:?}")))?;
    let a: u64 = a.parse().map_err(|_| usage(format!("bad range start {a:?}")))?;
    let b: u64 = b.parse().map_err(|_| usage(format!("bad range end {b:?}")))?;
    if a < 2 || a > b {
        return Err(usage(format!("--range needs 2 <= A <= B, got {s}")));
    }
    Ok((a, b))
}

fn run_tables(cmd: &TablesCmd) -> Out {
    match cmd {
        TablesCmd::Brvs { primes, max, b_max, s_max, printed, format, out } => {
            let format = match format {
                OutFormat::Csv => Format::Csv,
                OutFormat::Json => Format::Json,
            };
            let only_120 = matches!(primes, PrimeSet::OneTwentyA1);
            let rows: Vec<tables::BrvsRow> = if *printed {
                let src: &[[u64; 5]] = if only_120 { &tables::PRINTED_120A1 } else { &tables::PRINTED_4A1 };
                let rows: Vec<_> = src.iter().map(|&[w, b, r, v, s]| tables::BrvsRow::new(w, b, r, v, s)).collect();
                let bad: Vec<String> = rows.iter().filter(|r| !r.verified).map(|r| r.w.to_string()).collect();
                if !bad.is_empty() {
                    let good: Vec<_> = rows.into_iter().filter(|r| r.verified).collect();
                    write_body(&good, format, out)?;
                    return Err(Fail(1, format!("identity-violation: printed rows fail for w in {}", bad.join(","))));
                }
                rows
            } else {
                let ws = tables::brvs_primes(only_120, *max);
                let caps = BrvsCaps { b_max: *b_max, s_max: *s_max };
                let found = tables::search_brvs_many(&ws, caps)?;
                let missing: Vec<String> = found
                    .iter()
                    .filter_map(|f| match f {
                        tables::BrvsSearch::NoneWithinBounds { w, .. } => Some(w.to_string()),
                        _ => None,
                    })
                    .collect();
                if !missing.is_empty() {
                    eprintln!("none within b<={b_max}, s<={s_max} for w in {}", missing.join(","));
                }
                found.iter().filter_map(|f| f.row().cloned()).collect()
            };
            write_body(&rows, format, out)
        }
        TablesCmd::Witness { range, out } => {
            let (a, b) = parse_range(range)?;
            let rows = esfrac::par::map_range(a, b, tables::search_integer_witness).into_iter().collect::<Result<Vec<_>, _>>()?;
            write_or_print(out, &tables::witness_csv(&rows))
        }
        TablesCmd::Mod840 { m_max, c_max, b_max } => {
            println!("m,a,b,c,form");
            for r in tables::search_abc_mod840(*m_max, *c_max, *b_max)? {
                match r.hit {
                    Some(h) => println!("{},{},{},{},{}", r.m, h.a, h.b, h.c, h.form),
                    None => println!("{},,,,", r.m),
                }
            }
            Ok(())
        }
    }
}

fn write_body(rows: &[tables::BrvsRow], format: Format, out: &Option<PathBuf>) -> Out {
    match out {
        Some(p) => Ok(tables::emit_table(rows, format, p)?),
        None => {
            let body = match format {
                Format::Csv => tables::brvs_csv(rows),
                Format::Json => tables::brvs_json(rows)?,
            };
            print!("{body}");
            Ok(())
        }
    }
}

fn run_lcmfn(cmd: &LcmfnCmd) -> Out {
    match cmd {
        LcmfnCmd::Q { a, b, closed } => {
            if *a == 0 || *b == 0 {
                return Err(usage("--a and --b must be positive"));
            }
            let t = if *closed { lcmfn::q_closed(*a, *b)? } else { lcmfn::q_brute(*a, *b) };
            println!("Q={} SQ={} MQ={}", t.q, t.sq, t.mq);
            Ok(())
        }
        LcmfnCmd::Suite { max_n, out } => {
            let mut cfg = lcmfn::SuiteConfig::default();
            if let Some(n) = *max_n {
                cfg.q_max = n;
                cfg.tau_max = n;
                cfg.restricted_max = n;
                cfg.p2_max = n;
            }
            let rep = lcmfn::run_suite(&cfg);
            for s in &rep.sections {
                let kind = if s.gated { "gated" } else { "finding" };
                eprintln!("{}\t{kind}\tchecked={}\tmismatches={}", s.name, s.checked, s.failures);
            }
            write_or_print(out, &(json(&rep) + "\n"))?;
            if !rep.passed() {
                return Err(Fail(1, "identity-violation: a gated lcm identity failed".into()));
            }
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Out {
    eprintln!("# registry {REGISTRY_VERSION} seed {}", cli.seed);
    match &cli.cmd {
        Cmd::Decompose(a) => run_decompose(a),
        Cmd::Verify { input } => run_verify(input),
        Cmd::Families { cmd } => run_families(cmd, cli.seed),
        Cmd::Cover(a) => run_cover(a),
        Cmd::Reach(a) => run_reach(a),
        Cmd::Tables { cmd } => run_tables(cmd),
        Cmd::Lcmfn { cmd } => run_lcmfn(cmd),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("usage error: {line}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.jobs {
        Some(0) => Err(usage("--jobs must be at least 1")),
        Some(1) => esfrac::par::sequential(|| run(&cli)),
        #[cfg(feature = "parallel")]
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Fail(2, format!("usage error: {e}"))),
        },
        _ => run(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("{}", msg.replace('\n', " "));
            ExitCode::from(code)
        }
    }
}
