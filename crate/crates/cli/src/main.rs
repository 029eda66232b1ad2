mod catalog;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use eacws::construction::{GraphFile, GraphSpec};
use eacws::equivalence::{
    default_ebit_columns, reduce_check_matrix, verify_reduction, CheckMatrix, CheckMatrixFile,
};
use eacws::record::{
    fixture_check_matrix, fixture_record, verify_record, CodeRecord, ConflictModel, Instance,
    Status, Verification,
};
use eacws::search::{max_clique, Budget, SearchMode};
use eacws::{BitMatrix, QubitLayout};
use serde_json::json;

use catalog::{read_record, write_atomic, Catalog};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_INEXACT: u8 = 3;

/// Entanglement-assisted codeword stabilized codes with noisy ebits.
#[derive(Parser)]
#[command(name = "eacws", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the word stabilizers and effective-error catalog of an instance.
    Construct {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Search for a classical code, synthesize and verify the quantum code,
    /// and store the record in the catalog.
    Search(SearchArgs),
    /// Re-verify a record file, catalog entry or fixture.
    Verify {
        /// Path to a record, or the name of a catalog entry or fixture.
        record: String,
        #[arg(long, env = "EACWS_CATALOG", default_value = "catalog")]
        catalog: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Reduce a stabilizer check matrix to entanglement-assisted form.
    Equiv {
        /// Check-matrix file (JSON or 0/1 grid), or a fixture name.
        matrix: String,
        /// Comma-separated 1-based ebit columns.
        #[arg(long, value_delimiter = ',', conflicts_with = "c")]
        ebits: Option<Vec<usize>>,
        /// Use the rightmost `c` columns.
        #[arg(long)]
        c: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Inspect or move records in the catalog directory.
    Catalog {
        #[arg(long, env = "EACWS_CATALOG", default_value = "catalog")]
        catalog: PathBuf,
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// One line per record.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Full record; falls back to the shipped fixtures.
    Show { name: String },
    /// All records as one JSON array.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add the records in an exported array (or a single record file).
    Import { file: PathBuf },
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Alice's qubits.
    #[arg(long)]
    n: usize,
    /// Ebits.
    #[arg(long, default_value_t = 0)]
    c: usize,
    /// `ring` or a path to a graph JSON file.
    #[arg(long, default_value = "ring")]
    graph: String,
    /// Target minimum distance.
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Also forbid differences that break degenerate error pairs.
    #[arg(long)]
    degenerate_safe: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Run to completion unless `--budget` or `--max-nodes` cuts it short.
    #[arg(long)]
    exact: bool,
    /// Worker threads; 1 runs the deterministic single-threaded search.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Time budget in seconds (default 10 without `--exact`).
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Record name (default `ring-<n>-<K>-<d>-<c>`).
    #[arg(long)]
    name: Option<String>,
    #[arg(long, env = "EACWS_CATALOG", default_value = "catalog")]
    catalog: PathBuf,
    /// Also write the record to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl InstanceArgs {
    fn build(&self) -> Result<Instance> {
        let layout = QubitLayout::new(self.n, self.c)?;
        let graph = load_graph(&self.graph, self.n)?;
        let model = if self.degenerate_safe {
            ConflictModel::DegenerateSafe
        } else {
            ConflictModel::Effective
        };
        Ok(Instance::new(layout, graph, self.d, model)?)
    }
}

fn load_graph(spec: &str, n: usize) -> Result<GraphSpec> {
    if spec == "ring" {
        return Ok(GraphSpec::ring(n)?);
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("cannot read graph {spec}"))?;
    let file: GraphFile = serde_json::from_str(&text).with_context(|| format!("malformed graph {spec}"))?;
    let g = GraphSpec::from_file(&file)?;
    if g.n() != n {
        bail!("graph {spec} has {} vertices but --n is {n}", g.n());
    }
    Ok(g)
}

fn construct(args: &InstanceArgs, as_json: bool) -> Result<u8> {
    let inst = args.build()?;
    let (g, h) = inst.gens.strings();
    let pairs: Vec<[String; 2]> = inst
        .catalog
        .equivalence_pairs
        .iter()
        .map(|(b, a)| [b.to_string(), a.to_string()])
        .collect();
    let distinct: Vec<String> = inst
        .catalog
        .distinct_effective
        .iter()
        .filter(|e| !e.is_zero())
        .map(|e| e.to_bitstring())
        .collect();
    if as_json {
        let out = json!({
            "n": args.n,
            "c": args.c,
            "d": args.d,
            "graph": inst.graph.to_file(),
            "generators": { "g": g, "h": h },
            "errors": inst.catalog.to_json(),
            "effective_errors": distinct,
            "equivalence_pairs": pairs,
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
        return Ok(0);
    }
    println!("generators ({}):", g.len() + h.len());
    for (i, s) in g.iter().enumerate() {
        println!("  g{} = {s}", i + 1);
    }
    for (i, s) in h.iter().enumerate() {
        println!("  h{} = {s}", i + 1);
    }
    println!("errors: {}", inst.catalog.entries.len());
    for row in inst.catalog.rows() {
        println!("  {}  ->  {}", row.pauli, row.effective);
    }
    println!("effective errors: {}", distinct.len());
    println!("equivalence pairs: {}", pairs.len());
    for [b, a] in &pairs {
        println!("  {b} ~ {a}");
    }
    Ok(0)
}

fn search(args: &SearchArgs) -> Result<u8> {
    let inst = args.inst.build()?;
    if args.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let time = match (args.budget, args.exact) {
        (Some(s), _) if s.is_finite() && s > 0.0 => Some(Duration::from_secs_f64(s)),
        (Some(s), _) => bail!("--budget must be a positive number of seconds, got {s}"),
        (None, true) => None,
        (None, false) => Some(Duration::from_secs(10)),
    };
    let budget = Budget {
        max_nodes: args.max_nodes,
        time_limit: time,
    };
    let mode = if args.jobs == 1 {
        SearchMode::Deterministic
    } else {
        SearchMode::Parallel { jobs: args.jobs }
    };
    let outcome = max_clique(&inst.conflicts, budget, mode)?;
    let k = outcome.code.k();
    let name = args
        .name
        .clone()
        .unwrap_or_else(|| format!("ring-{}-{}-{}-{}", args.inst.n, k, args.inst.d, args.inst.c));
    let provenance = format!(
        "clique search ({} mode, {} nodes, {:.3} s)",
        if outcome.exact { "exact" } else { "budgeted" },
        outcome.nodes,
        outcome.elapsed.as_secs_f64()
    );
    let mut rec = CodeRecord::new(name, &inst, &outcome.code, Some(outcome.exact), provenance)?;
    let v = verify_record(&rec)?;
    rec.verification = Some(v.clone());

    let path = Catalog::new(&args.catalog).put(&rec)?;
    if let Some(out) = &args.out {
        write_atomic(out, &rec.to_json())?;
    }
    println!(
        "(({}, {}, {}; {})) exact={} nodes={} time={:.3}s",
        rec.n,
        rec.k,
        rec.d,
        rec.c,
        outcome.exact,
        outcome.nodes,
        outcome.elapsed.as_secs_f64()
    );
    for w in &rec.codewords {
        println!("  {w}");
    }
    print_verification(&v);
    println!("written to {}", path.display());
    Ok(exit_for(&v, outcome.exact))
}

fn exit_for(v: &Verification, exact: bool) -> u8 {
    if v.status == Status::Failed {
        EXIT_VERIFY
    } else if !exact {
        EXIT_INEXACT
    } else {
        0
    }
}

fn print_verification(v: &Verification) {
    println!("status: {}", serde_json::to_value(v.status).unwrap().as_str().unwrap_or("?"));
    match &v.classical_violation {
        None => println!("classical check: pass"),
        Some(x) => println!(
            "classical check: FAIL codewords {} and {} differ by forbidden {}",
            x.first, x.second, x.difference
        ),
    }
    match (v.operators_match, v.first_operator_mismatch) {
        (Some(true), _) => println!("word operators: match synthesis"),
        (Some(false), Some(i)) => println!("word operators: MISMATCH at codeword {i}"),
        _ => {}
    }
    if let Some(g) = v.gram_deviation {
        println!("gram deviation: {g:.3e}");
    }
    match (&v.kl_pass, &v.kl_violation) {
        (Some(true), _) => println!("Knill-Laflamme: pass"),
        (Some(false), Some(x)) => println!(
            "Knill-Laflamme: FAIL <w{}|{}^dag {}|w{}> = {:.6}{:+.6}i, expected {:.6}{:+.6}i",
            x.first, x.error_a, x.error_b, x.second, x.value[0], x.value[1], x.expected[0], x.expected[1]
        ),
        _ => println!("Knill-Laflamme: not run (too many qubits for the dense oracle)"),
    }
    if let Some(d) = &v.distance {
        match (&d.distance, &d.witness) {
            (Some(w), Some(p)) => println!("distance: {w} (undetectable {p})"),
            _ => println!("distance: > {}", d.checked_up_to),
        }
    }
}

/// A file path, a catalog entry, or a fixture, in that order.
fn resolve_record(arg: &str, catalog: &Path) -> Result<CodeRecord> {
    let path = Path::new(arg);
    if path.is_file() {
        return read_record(path);
    }
    if let Some(rec) = Catalog::new(catalog).get(arg)? {
        return Ok(rec);
    }
    fixture_record(arg).map_err(|_| anyhow!("no record file, catalog entry or fixture named {arg:?}"))
}

fn verify(arg: &str, catalog: &Path, as_json: bool) -> Result<u8> {
    let rec = resolve_record(arg, catalog)?;
    let v = verify_record(&rec)?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("{}: (({}, {}, {}; {}))", rec.name, rec.n, rec.k, rec.d, rec.c);
        print_verification(&v);
    }
    Ok(if v.status == Status::Failed { EXIT_VERIFY } else { 0 })
}

fn load_check_matrix(arg: &str) -> Result<CheckMatrix> {
    let path = Path::new(arg);
    if !path.is_file() {
        return fixture_check_matrix(arg)
            .map_err(|_| anyhow!("no check-matrix file or fixture named {arg:?}"));
    }
    let text = std::fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        let file: CheckMatrixFile =
            serde_json::from_str(&text).with_context(|| format!("malformed check matrix {arg}"))?;
        return Ok(CheckMatrix::from_file(&file)?);
    }
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let m = BitMatrix::from_strings(&rows)?;
    let n = m.ncols() / 2;
    let k = n
        .checked_sub(m.nrows())
        .ok_or_else(|| anyhow!("more rows than qubits in {arg}"))?;
    Ok(CheckMatrix::new(n, k, None, m)?)
}

fn equiv(arg: &str, ebits: Option<&[usize]>, c: Option<usize>, as_json: bool) -> Result<u8> {
    let cm = load_check_matrix(arg)?;
    let n = cm.n();
    let columns = match (ebits, c) {
        (Some(cols), _) => cols
            .iter()
            .map(|&q| {
                q.checked_sub(1)
                    .filter(|&q| q < n)
                    .ok_or_else(|| anyhow!("ebit column {q} outside 1..={n}"))
            })
            .collect::<Result<Vec<_>>>()?,
        (None, Some(c)) => default_ebit_columns(n, c),
        (None, None) => {
            // Largest c the rightmost columns support.
            let max = ((n - cm.k()) / 2).min(n);
            (0..=max)
                .rev()
                .map(|c| default_ebit_columns(n, c))
                .find(|cols| reduce_check_matrix(&cm, cols).is_ok())
                .unwrap_or_default()
        }
    };
    let red = reduce_check_matrix(&cm, &columns)?;
    let ok = verify_reduction(&red, &cm);
    let gens = red.generator_strings();
    if as_json {
        let out = json!({
            "n": n,
            "k": cm.k(),
            "c": red.c,
            "ebit_columns": columns.iter().map(|q| q + 1).collect::<Vec<_>>(),
            "column_order": red.column_order.iter().map(|q| q + 1).collect::<Vec<_>>(),
            "reduced": red.reduced.row_strings(),
            "generators": gens,
            "simplified": red.simplified_generators(),
            "verified": ok,
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        let d = cm.d().map_or("?".to_string(), |d| d.to_string());
        println!("[[{n},{},{d}]] -> [[{},{},{d};{}]]", cm.k(), n - red.c, cm.k(), red.c);
        println!("reduced check matrix:");
        for r in red.reduced.row_strings() {
            println!("  {r}");
        }
        println!("generators:");
        for g in &gens {
            println!("  {g}");
        }
        println!("verified: {ok}");
    }
    Ok(if ok { 0 } else { EXIT_VERIFY })
}

fn catalog_cmd(dir: &Path, action: &CatalogAction) -> Result<u8> {
    let cat = Catalog::new(dir);
    match action {
        CatalogAction::List { json: as_json } => {
            let recs = cat.records()?;
            if *as_json {
                let rows: Vec<_> = recs
                    .iter()
                    .map(|r| {
                        json!({
                            "name": r.name, "n": r.n, "c": r.c, "K": r.k, "d": r.d,
                            "exact": r.exact,
                            "status": r.verification.as_ref().map(|v| v.status),
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&rows)?);
            } else {
                for r in &recs {
                    let status = r
                        .verification
                        .as_ref()
                        .map(|v| serde_json::to_value(v.status).unwrap())
                        .and_then(|v| v.as_str().map(str::to_string))
                        .unwrap_or_else(|| "unverified".into());
                    let exact = r.exact.map_or("-".to_string(), |e| e.to_string());
                    println!(
                        "{}\t(({},{},{};{}))\texact={exact}\t{status}",
                        r.name, r.n, r.k, r.d, r.c
                    );
                }
            }
        }
        CatalogAction::Show { name } => {
            let rec = match cat.get(name)? {
                Some(r) => r,
                None => fixture_record(name)
                    .map_err(|_| anyhow!("no catalog entry or fixture named {name:?}"))?,
            };
            println!("{}", rec.to_json());
        }
        CatalogAction::Export { out } => {
            let recs = cat.records()?;
            let text = serde_json::to_string_pretty(&recs)?;
            match out {
                Some(p) => write_atomic(p, &text)?,
                None => println!("{text}"),
            }
        }
        CatalogAction::Import { file } => {
            let text = std::fs::read_to_string(file)
                .with_context(|| format!("cannot read {}", file.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .with_context(|| format!("malformed JSON in {}", file.display()))?;
            let items = match value {
                serde_json::Value::Array(items) => items,
                single => vec![single],
            };
            for item in items {
                let rec = CodeRecord::from_json(&item.to_string())?;
                let path = cat.put(&rec)?;
                println!("imported {} -> {}", rec.name, path.display());
            }
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Construct { inst, json } => construct(&inst, json),
        Command::Search(args) => search(&args),
        Command::Verify {
            record,
            catalog,
            json,
        } => verify(&record, &catalog, json),
        Command::Equiv {
            matrix,
            ebits,
            c,
            json,
        } => equiv(&matrix, ebits.as_deref(), c, json),
        Command::Catalog { catalog, action } => catalog_cmd(&catalog, &action),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
