//! Command line front end: encode GCNF instances to DIMACS, solve them with
//! the internal solver or an external command, verify models, generate
//! benchmark instances, and report elimination statistics.
//!
//! Solve follows the SAT-competition exit convention: 10 for SAT, 20 for
//! UNSAT, other values for errors.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gcnf::bench::{gen_grid_hc, gen_random, GridSpec};
use gcnf::encode::{encode_instance, EncodePlan, Method, OrderChoice};
use gcnf::formula::{
    parse_gcnf, parse_model, write_dimacs, write_gcnf, ConstraintKind, EncodedFormula,
    GraphInstance,
};
use gcnf::graph::{eliminate, order_min_degree, order_min_fill, EliminationOrdering};
use gcnf::oracle::{verify, Model, Witness};
use gcnf::solver::{solve_with_budget, SolveStatus};
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "gcnf",
    version,
    about = "Compile graph constraints (acyclicity, reachability) attached to CNF formulas into plain CNF"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Debug)]
enum OrderArg {
    MinDegree,
    MinFill,
    Given(PathBuf),
}

impl std::str::FromStr for OrderArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mindegree" => Ok(OrderArg::MinDegree),
            "minfill" => Ok(OrderArg::MinFill),
            other => match other.strip_prefix("given:") {
                Some(path) if !path.is_empty() => Ok(OrderArg::Given(PathBuf::from(path))),
                _ => Err(format!(
                    "unknown ordering `{other}` (expected mindegree, minfill, or given:<file>)"
                )),
            },
        }
    }
}

impl OrderArg {
    fn name(&self) -> &'static str {
        match self {
            OrderArg::MinDegree => "mindegree",
            OrderArg::MinFill => "minfill",
            OrderArg::Given(_) => "given",
        }
    }
}

#[derive(Clone, Debug)]
enum SolverArg {
    Internal,
    /// Command template; `{cnf}` expands to the DIMACS path.
    External(String),
}

impl std::str::FromStr for SolverArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "internal" {
            return Ok(SolverArg::Internal);
        }
        match s.strip_prefix("cmd:") {
            Some(tpl) if !tpl.trim().is_empty() => Ok(SolverArg::External(tpl.to_string())),
            _ => Err(format!(
                "unknown solver `{s}` (expected internal or cmd:<template>)"
            )),
        }
    }
}

#[derive(Args)]
struct EncodeOpts {
    /// Input GCNF file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Encoding method: ve | tc | tr | explicit | via-acyclic:{ve|tc|tr}.
    #[arg(long, default_value = "ve")]
    method: Method,
    /// Elimination ordering: mindegree | minfill | given:<file>.
    #[arg(long, default_value = "mindegree")]
    order: OrderArg,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a GCNF instance to DIMACS CNF.
    Encode {
        #[command(flatten)]
        opts: EncodeOpts,
        /// DIMACS output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Auxiliary-variable map sidecar (JSON).
        #[arg(long)]
        map: Option<PathBuf>,
        /// Run statistics document (JSON).
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Encode, solve, decode, and verify. Exits 10 on SAT, 20 on UNSAT.
    Solve {
        #[command(flatten)]
        opts: EncodeOpts,
        /// internal | cmd:<template with {cnf}>.
        #[arg(long, default_value = "internal")]
        solver: SolverArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Abort the internal solver after this many conflicts.
        #[arg(long)]
        conflict_budget: Option<u64>,
        /// Model output path (`v` lines, written on SAT).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run statistics document (JSON).
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Check a model against an instance's base clauses and constraints.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Model file: solver `v` lines or a raw literal list.
        #[arg(long)]
        model: PathBuf,
    },
    /// Generate benchmark instances as GCNF.
    Gen {
        #[command(subcommand)]
        what: GenCmd,
    },
    /// Order, eliminate, and report statistics without encoding.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "mindegree")]
        order: OrderArg,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Hamiltonian cycle on a rows x cols grid.
    GridHc {
        rows: u32,
        cols: u32,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random instance: n nodes, m arcs, constraint kind, seed.
    Random {
        n: u32,
        m: usize,
        /// acyclic | reach | noreach | ereach.
        kind: ConstraintKind,
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Encode {
            opts,
            out,
            map,
            stats,
        } => cmd_encode(&opts, out.as_deref(), map.as_deref(), stats.as_deref()),
        Cmd::Solve {
            opts,
            solver,
            seed,
            conflict_budget,
            out,
            stats,
        } => cmd_solve(
            &opts,
            &solver,
            seed,
            conflict_budget,
            out.as_deref(),
            stats.as_deref(),
        ),
        Cmd::Verify { input, model } => cmd_verify(&input, &model),
        Cmd::Gen { what } => cmd_gen(what),
        Cmd::Stats { input, order } => cmd_stats(&input, &order),
    }
}

fn load_instance(path: &Path) -> Result<GraphInstance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_gcnf(&text).with_context(|| format!("parsing {}", path.display()))
}

fn resolve_order(arg: &OrderArg, node_count: u32) -> Result<OrderChoice> {
    Ok(match arg {
        OrderArg::MinDegree => OrderChoice::MinDegree,
        OrderArg::MinFill => OrderChoice::MinFill,
        OrderArg::Given(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading ordering file {}", path.display()))?;
            let mut order = Vec::new();
            for (idx, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('c') {
                    continue;
                }
                let node: u32 = line
                    .parse()
                    .with_context(|| format!("ordering file line {}: `{line}`", idx + 1))?;
                order.push(node);
            }
            OrderChoice::Given(
                EliminationOrdering::new(order, node_count)
                    .map_err(|e| anyhow!("ordering file: {e}"))?,
            )
        }
    })
}

fn write_or_stdout(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn aux_map_json(enc: &EncodedFormula) -> serde_json::Value {
    let mut families = serde_json::Map::new();
    for (name, vars) in enc.aux.families() {
        let mut entries = serde_json::Map::new();
        for (key, &var) in vars {
            let rendered = format!(
                "({})",
                key.iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            entries.insert(rendered, json!(var));
        }
        families.insert(name.to_string(), serde_json::Value::Object(entries));
    }
    serde_json::Value::Object(families)
}

struct SolverOutcome {
    status: &'static str,
    millis: f64,
}

fn run_stats_json(
    inst: &GraphInstance,
    order_name: &str,
    width: Option<u32>,
    estar: Option<usize>,
    triangles: Option<usize>,
    encoded: Option<(&EncodedFormula, f64)>,
    solver: Option<&SolverOutcome>,
) -> serde_json::Value {
    json!({
        "nodes": inst.graph.node_count(),
        "arcs": inst.graph.arc_count(),
        "constraints": inst.constraints.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "order_heuristic": order_name,
        "width": width,
        "estar_arcs": estar,
        "triangles": triangles,
        "aux_vars": encoded.map(|(e, _)| e.stats.aux_vars),
        "added_clauses": encoded.map(|(e, _)| e.stats.added_clauses),
        "encode_ms": encoded.map(|(_, ms)| ms),
        "solver_status": solver.map(|s| s.status),
        "solver_ms": solver.map(|s| s.millis),
    })
}

fn encode_with_plan(inst: &GraphInstance, opts: &EncodeOpts) -> Result<(EncodedFormula, f64)> {
    let order = resolve_order(&opts.order, inst.graph.node_count())?;
    let plan = EncodePlan {
        method: opts.method,
        order,
    };
    let t0 = Instant::now();
    let enc = encode_instance(inst, &plan)?;
    Ok((enc, t0.elapsed().as_secs_f64() * 1e3))
}

fn cmd_encode(
    opts: &EncodeOpts,
    out: Option<&Path>,
    map: Option<&Path>,
    stats: Option<&Path>,
) -> Result<ExitCode> {
    let inst = load_instance(&opts.input)?;
    let (enc, encode_ms) = encode_with_plan(&inst, opts)?;
    write_or_stdout(out, &write_dimacs(&enc.combined(&inst)))?;
    if let Some(path) = map {
        let doc = serde_json::to_string_pretty(&aux_map_json(&enc))?;
        std::fs::write(path, doc).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = stats {
        let doc = run_stats_json(
            &inst,
            opts.order.name(),
            enc.stats.width,
            enc.stats.estar_arcs,
            enc.stats.triangles,
            Some((&enc, encode_ms)),
            None,
        );
        std::fs::write(path, serde_json::to_string_pretty(&doc)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!(
        "encoded {}: {} aux vars, {} clauses added in {:.1} ms",
        opts.input.display(),
        enc.stats.aux_vars,
        enc.stats.added_clauses,
        encode_ms
    );
    Ok(ExitCode::SUCCESS)
}

fn run_external_solver(
    template: &str,
    cnf_text: &str,
    var_count: u32,
) -> Result<(SolveStatus, Option<Model>, f64)> {
    let dir = tempfile::tempdir().context("creating temp dir for solver input")?;
    let cnf_path = dir.path().join("instance.cnf");
    std::fs::write(&cnf_path, cnf_text).context("writing solver input")?;
    let cnf_str = cnf_path.to_string_lossy();

    let mut parts: Vec<String> = template
        .split_whitespace()
        .map(|p| p.replace("{cnf}", &cnf_str))
        .collect();
    if parts.is_empty() {
        bail!("empty solver command template");
    }
    if !template.contains("{cnf}") {
        parts.push(cnf_str.to_string());
    }
    let t0 = Instant::now();
    let output = Command::new(&parts[0])
        .args(&parts[1..])
        .output()
        .with_context(|| format!("launching external solver `{}`", parts[0]))?;
    let millis = t0.elapsed().as_secs_f64() * 1e3;
    let stdout = String::from_utf8_lossy(&output.stdout);

    let status_line = stdout
        .lines()
        .map(str::trim)
        .find(|l| l.starts_with("s ") || *l == "s");
    let status = match status_line {
        Some(l) if l.contains("UNSATISFIABLE") => SolveStatus::Unsat,
        Some(l) if l.contains("SATISFIABLE") => SolveStatus::Sat,
        Some(l) => bail!("unrecognized solver status line `{l}`"),
        None => match output.status.code() {
            Some(10) => SolveStatus::Sat,
            Some(20) => SolveStatus::Unsat,
            code => bail!(
                "external solver produced no status line and exited with {:?}",
                code
            ),
        },
    };
    let model = match status {
        SolveStatus::Sat => Some(
            parse_model(&stdout, var_count).map_err(|e| anyhow!("parsing solver model: {e}"))?,
        ),
        _ => None,
    };
    Ok((status, model, millis))
}

fn cmd_solve(
    opts: &EncodeOpts,
    solver: &SolverArg,
    seed: u64,
    conflict_budget: Option<u64>,
    out: Option<&Path>,
    stats: Option<&Path>,
) -> Result<ExitCode> {
    let inst = load_instance(&opts.input)?;
    let (enc, encode_ms) = encode_with_plan(&inst, opts)?;
    let cnf = enc.combined(&inst);

    let (status, model, solver_ms) = match solver {
        SolverArg::Internal => {
            let t0 = Instant::now();
            let res = solve_with_budget(&cnf, seed, conflict_budget);
            (res.status, res.model, t0.elapsed().as_secs_f64() * 1e3)
        }
        SolverArg::External(template) => {
            run_external_solver(template, &write_dimacs(&cnf), cnf.var_count)?
        }
    };

    let outcome = SolverOutcome {
        status: match status {
            SolveStatus::Sat => "sat",
            SolveStatus::Unsat => "unsat",
            SolveStatus::Aborted => "aborted",
        },
        millis: solver_ms,
    };
    if let Some(path) = stats {
        let doc = run_stats_json(
            &inst,
            opts.order.name(),
            enc.stats.width,
            enc.stats.estar_arcs,
            enc.stats.triangles,
            Some((&enc, encode_ms)),
            Some(&outcome),
        );
        std::fs::write(path, serde_json::to_string_pretty(&doc)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }

    match status {
        SolveStatus::Sat => {
            let model = model.expect("sat result carries a model");
            let report = verify(&inst, &model).map_err(|e| anyhow!("verifying model: {e}"))?;
            if !report.all_pass() {
                bail!("solver returned a model that fails verification: {report:?}");
            }
            if let Some(path) = out {
                let mut text = String::new();
                let mut line = String::from("v");
                for var in 1..=model.var_count() {
                    let lit = if model.is_true(var) {
                        var as i64
                    } else {
                        -(var as i64)
                    };
                    write!(line, " {lit}").unwrap();
                    if line.len() > 72 {
                        text.push_str(&line);
                        text.push('\n');
                        line = String::from("v");
                    }
                }
                text.push_str(&line);
                text.push_str(" 0\n");
                std::fs::write(path, text)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            println!("SAT");
            for (u, v) in report.decoded_arcs {
                println!("arc {u} {v}");
            }
            Ok(ExitCode::from(10))
        }
        SolveStatus::Unsat => {
            println!("UNSAT");
            Ok(ExitCode::from(20))
        }
        SolveStatus::Aborted => {
            println!("UNKNOWN");
            bail!("conflict budget exhausted before an answer");
        }
    }
}

fn cmd_verify(input: &Path, model_path: &Path) -> Result<ExitCode> {
    let inst = load_instance(input)?;
    let text = std::fs::read_to_string(model_path)
        .with_context(|| format!("reading {}", model_path.display()))?;
    // Models produced from an encoded formula legitimately mention
    // auxiliary variables beyond the instance's own; widen the domain to
    // whatever the file uses.
    let max_lit = text
        .split_whitespace()
        .filter_map(|t| t.parse::<i64>().ok())
        .map(|l| l.unsigned_abs())
        .max()
        .unwrap_or(0);
    let bound = (inst.base.var_count as u64).max(max_lit) as u32;
    let model = parse_model(&text, bound).map_err(|e| anyhow!("parsing model: {e}"))?;
    let report = verify(&inst, &model).map_err(|e| anyhow!("verifying: {e}"))?;

    println!(
        "base formula: {}",
        if report.base_ok { "PASS" } else { "FAIL" }
    );
    for verdict in &report.verdicts {
        let mut line = format!(
            "{}: {}",
            verdict.constraint,
            if verdict.pass { "PASS" } else { "FAIL" }
        );
        match &verdict.witness {
            Some(Witness::Cycle(cycle)) => {
                let path = cycle
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" -> ");
                write!(line, " (cycle {path})").unwrap();
            }
            Some(Witness::Node(v)) => write!(line, " (node {v})").unwrap(),
            None => {}
        }
        println!("{line}");
    }
    println!("decoded arcs: {}", report.decoded_arcs.len());
    if report.all_pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_gen(what: GenCmd) -> Result<ExitCode> {
    let (inst, out) = match what {
        GenCmd::GridHc { rows, cols, out } => {
            let spec = GridSpec::new(rows, cols).map_err(|e| anyhow!("{e}"))?;
            (gen_grid_hc(&spec).map_err(|e| anyhow!("{e}"))?, out)
        }
        GenCmd::Random {
            n,
            m,
            kind,
            seed,
            out,
        } => (
            gen_random(n, m, kind, seed).map_err(|e| anyhow!("{e}"))?,
            out,
        ),
    };
    write_or_stdout(out.as_deref(), &write_gcnf(&inst))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_stats(input: &Path, order: &OrderArg) -> Result<ExitCode> {
    let inst = load_instance(input)?;
    let ordering = match resolve_order(order, inst.graph.node_count())? {
        OrderChoice::MinDegree => order_min_degree(&inst.graph, &[])?,
        OrderChoice::MinFill => order_min_fill(&inst.graph, &[])?,
        OrderChoice::Given(o) => o,
    };
    let res = eliminate(&inst.graph, &ordering)?;
    let doc = run_stats_json(
        &inst,
        order.name(),
        Some(res.width),
        Some(res.estar.len()),
        Some(res.delta.len()),
        None,
        None,
    );
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(ExitCode::SUCCESS)
}
