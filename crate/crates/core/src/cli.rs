//! Command-line front end. [`run`] does all the work and returns the exit
//! status together with the rendered report, so it can be driven from tests
//! without spawning a process.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Map, Number, Value};

use crate::automaton::{action_compose_check, is_fractaloid, CompositionReport, FractaloidReport, DEFAULT_DEPTH};
use crate::combinatorics::{
    brute_zero_sum, coeff_sum_zero, count_zero_sum, enumerate_f, lattice_paths, theta_bijection_check,
    DEFAULT_BUDGET, MAX_DP_LABELS,
};
use crate::error::{Error, Result};
use crate::freeprob::{cumulants_from_moments, MAX_NC};
use crate::graph::{DirectedGraph, Weighting};
use crate::groupoid::{check_groupoid_axioms, AxiomReport};
use crate::operator::{adjoint_check, basis_up_to, moment_operator};
use crate::Integer;

const BUILTIN: [(&str, &str); 4] = [
    ("c3", include_str!("../data/c3.json")),
    ("bouquet1", include_str!("../data/bouquet1.json")),
    ("bouquet2", include_str!("../data/bouquet2.json")),
    ("single-edge", include_str!("../data/single-edge.json")),
];

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status for bad input, unreadable graphs or exhausted budgets.
pub const EXIT_INVALID: i32 = 1;
/// Exit status when `--strict` is set and an internal cross-check fails.
pub const EXIT_DISAGREE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Fractaloid verdict with both criteria.
    Check,
    /// One moment by one method.
    Moments,
    /// All four methods side by side for n = 1..=max-n.
    Compare,
    /// Zero-sum tuples against axis lattice paths.
    Lattice,
    /// Free cumulants of the moment sequence.
    Cumulants,
    /// Groupoid axioms, action composition and adjoint identity.
    Axioms,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Enum,
    Operator,
    Zerosum,
    Pascal,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Enum, Method::Operator, Method::Zerosum, Method::Pascal];

    pub fn name(self) -> &'static str {
        match self {
            Method::Enum => "enum",
            Method::Operator => "operator",
            Method::Zerosum => "zerosum",
            Method::Pascal => "pascal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Parsed command line.
///
/// Defaults: `--depth 3`, `--method operator`, `--samples 1000`,
/// `--seed 0`, budget `2^26`. The output format defaults to JSON for
/// `check`, `moments` and `axioms` and to CSV otherwise.
#[derive(Clone, Debug, Parser)]
#[command(name = "fractaloid", version, about = "Graph groupoids, fractaloids and labeling-operator moments")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Graph JSON file, or one of: c3, bouquet1, bouquet2, single-edge.
    pub graph: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "max-n")]
    pub max_n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    #[arg(long, value_enum, default_value_t = Method::Operator)]
    pub method: Method,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Exit with status 2 when methods or criteria disagree.
    #[arg(long)]
    pub strict: bool,
    /// Cap on exhaustive enumeration sizes.
    #[arg(long, env = "FRACTALOID_BUDGET")]
    pub budget: Option<u128>,
    /// Random samples for the groupoid axiom check.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RunConfig {
    pub fn new(command: Command, graph: impl Into<String>) -> Self {
        RunConfig {
            command,
            graph: graph.into(),
            n: None,
            max_n: None,
            depth: DEFAULT_DEPTH,
            method: Method::Operator,
            format: None,
            strict: false,
            budget: None,
            samples: 1000,
            seed: 0,
        }
    }

    pub fn budget(&self) -> u128 {
        self.budget.unwrap_or(DEFAULT_BUDGET)
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(match self.command {
            Command::Check | Command::Moments | Command::Axioms => Format::Json,
            _ => Format::Csv,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let need = |v: Option<usize>, flag: &str| match v {
            Some(0) => Err(Error::InvalidArgument(format!("{flag} must be at least 1"))),
            Some(_) => Ok(()),
            None => Err(Error::InvalidArgument(format!("{flag} is required"))),
        };
        match self.command {
            Command::Moments => need(self.n, "--n")?,
            Command::Compare => need(self.max_n, "--max-n")?,
            Command::Cumulants => {
                need(self.max_n, "--max-n")?;
                if self.max_n > Some(MAX_NC) {
                    return Err(Error::InvalidArgument(format!("--max-n is at most {MAX_NC} for cumulants")));
                }
            }
            Command::Lattice => {
                if self.n.is_none() && self.max_n.is_none() {
                    return Err(Error::InvalidArgument("--n or --max-n is required".into()));
                }
                if self.n == Some(0) || self.max_n == Some(0) {
                    return Err(Error::InvalidArgument("--n and --max-n must be at least 1".into()));
                }
            }
            Command::Check | Command::Axioms => {}
        }
        if self.depth == 0 {
            return Err(Error::InvalidArgument("--depth must be at least 1".into()));
        }
        Ok(())
    }
}

/// Exit status and the text destined for stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Loads a graph from a file, falling back to the built-in graphs by name
/// (with or without a `.json` suffix).
pub fn load_graph(spec: &str) -> Result<DirectedGraph> {
    let path = Path::new(spec);
    if path.exists() {
        return DirectedGraph::from_json(&std::fs::read_to_string(path)?);
    }
    let stem = spec.strip_suffix(".json").unwrap_or(spec);
    let stem = Path::new(stem).file_name().and_then(|s| s.to_str()).unwrap_or(stem);
    match BUILTIN.iter().find(|(name, _)| *name == stem) {
        Some((_, text)) => DirectedGraph::from_json(text),
        None => Err(Error::Io(std::io::Error::new(std::io::ErrorKind::NotFound, format!("no graph file {spec}")))),
    }
}

fn budget_check(base: usize, n: usize, budget: u128) -> Result<()> {
    let required = (0..n).fold(1u128, |acc, _| acc.saturating_mul(base as u128));
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// `n`-th moment at every vertex, in declaration order, by one method.
///
/// `zerosum` and `pascal` only see the label count `N` and so return the
/// same value at each vertex.
pub fn compute_moment(g: &DirectedGraph, method: Method, n: usize, budget: u128) -> Result<Vec<Integer>> {
    if n == 0 {
        return Err(Error::InvalidArgument("moment order must be at least 1".into()));
    }
    let labels = Weighting::canonical(g).max_label();
    let branching = g.vertices().map(|v| g.shadow_out(v).len()).max().unwrap_or(0);
    let uniform = |x: Integer| vec![x; g.vertex_count()];
    match method {
        Method::Enum => {
            g.require_connected()?;
            g.vertices().map(|v| enumerate_f::<Integer>(g, v, n, budget)).collect()
        }
        Method::Operator => {
            budget_check(branching, n, budget)?;
            Ok(moment_operator(g, n)?.values)
        }
        Method::Zerosum => {
            g.require_connected()?;
            if labels > MAX_DP_LABELS {
                return Err(Error::InvalidArgument(format!("zerosum supports at most {MAX_DP_LABELS} labels")));
            }
            Ok(uniform(count_zero_sum(labels, n)?))
        }
        Method::Pascal => {
            g.require_connected()?;
            let multisets = binomial((n + 2 * labels - 1) as u128, (2 * labels - 1) as u128);
            if multisets > budget {
                return Err(Error::BudgetExceeded { required: multisets, budget });
            }
            Ok(uniform(coeff_sum_zero(labels, n)?))
        }
    }
}

fn number(x: &impl ToString) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integers are valid JSON numbers"))
}

fn uniform_value(values: &[Integer]) -> Option<&Integer> {
    let first = values.first()?;
    values.iter().all(|x| x == first).then_some(first)
}

fn per_vertex(g: &DirectedGraph, values: &[Integer]) -> Value {
    let mut map = Map::new();
    for (v, x) in g.vertices().zip(values) {
        map.insert(g.vertex_name(v).to_string(), number(x));
    }
    Value::Object(map)
}

/// One method's result in a comparison row.
#[derive(Clone, Debug, PartialEq)]
pub enum MethodResult {
    Value(Vec<Integer>),
    Skipped(String),
}

/// One line of `compare`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentRow {
    pub n: usize,
    pub results: Vec<(Method, MethodResult)>,
    /// Every pair of evaluated methods gives the same per-vertex values.
    pub agree: bool,
}

impl MomentRow {
    pub fn value(&self, method: Method) -> Option<&[Integer]> {
        self.results.iter().find(|(m, _)| *m == method).and_then(|(_, r)| match r {
            MethodResult::Value(v) => Some(v.as_slice()),
            MethodResult::Skipped(_) => None,
        })
    }
}

/// Output of `compare`: per-n, per-method moments with agreement flags and
/// the fractaloid verdict of the graph.
#[derive(Clone, Debug)]
pub struct MomentReport {
    pub rows: Vec<MomentRow>,
    pub verdict: Option<FractaloidReport>,
}

impl MomentReport {
    pub fn agree(&self) -> bool {
        self.rows.iter().all(|r| r.agree)
    }
}

pub fn compare(g: &DirectedGraph, max_n: usize, depth: usize, budget: u128) -> Result<MomentReport> {
    g.require_connected()?;
    let rows = (1..=max_n)
        .map(|n| {
            let results: Vec<(Method, MethodResult)> = Method::ALL
                .iter()
                .map(|&m| {
                    let r = match compute_moment(g, m, n, budget) {
                        Ok(v) => MethodResult::Value(v),
                        Err(e) => MethodResult::Skipped(e.to_string()),
                    };
                    (m, r)
                })
                .collect();
            let values: Vec<&Vec<Integer>> = results
                .iter()
                .filter_map(|(_, r)| match r {
                    MethodResult::Value(v) => Some(v),
                    MethodResult::Skipped(_) => None,
                })
                .collect();
            let agree = values.windows(2).all(|w| w[0] == w[1]);
            MomentRow { n, results, agree }
        })
        .collect();
    let verdict = is_fractaloid(g, &Weighting::canonical(g), depth).ok();
    Ok(MomentReport { rows, verdict })
}

fn csv_cell(g: &DirectedGraph, r: &MethodResult) -> String {
    match r {
        MethodResult::Skipped(_) => "skipped".into(),
        MethodResult::Value(v) => match uniform_value(v) {
            Some(x) => x.to_string(),
            None => g
                .vertices()
                .zip(v)
                .map(|(u, x)| format!("{}={x}", g.vertex_name(u)))
                .collect::<Vec<_>>()
                .join(";"),
        },
    }
}

fn render_compare(g: &DirectedGraph, report: &MomentReport, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("n,method_enum,method_operator,method_zerosum,method_pascal,agree\n");
            for row in &report.rows {
                let cells: Vec<String> = row.results.iter().map(|(_, r)| csv_cell(g, r)).collect();
                writeln!(out, "{},{},{}", row.n, cells.join(","), row.agree).unwrap();
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|row| {
                    let mut methods = Map::new();
                    for (m, r) in &row.results {
                        let cell = match r {
                            MethodResult::Value(v) => json!({
                                "per_vertex": per_vertex(g, v),
                                "value": uniform_value(v).map(number),
                            }),
                            MethodResult::Skipped(reason) => json!({ "skipped": reason }),
                        };
                        methods.insert(m.name().into(), cell);
                    }
                    json!({ "n": row.n, "methods": methods, "agree": row.agree })
                })
                .collect();
            let verdict = report.verdict.as_ref().map(|v| serde_json::to_value(v).expect("serializable"));
            let uniform_labels = report.verdict.as_ref().map(|v| v.uniform_labels);
            pretty(&json!({
                "rows": rows,
                "agree": report.agree(),
                "fractaloid": verdict,
                "uniform_labels": uniform_labels,
            }))
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

fn run_check(g: &DirectedGraph, cfg: &RunConfig) -> Result<(String, bool)> {
    let report = is_fractaloid(g, &Weighting::canonical(g), cfg.depth)?;
    let text = match cfg.format() {
        Format::Json => pretty(&serde_json::to_value(&report)?),
        Format::Csv => csv_table(
            "fractaloid,degree_ok,wpart_ok,uniform_labels,criteria_agree",
            [[report.fractaloid, report.degree_ok, report.wpart_ok, report.uniform_labels, report.criteria_agree]
                .iter()
                .map(bool::to_string)
                .collect()],
        ),
    };
    Ok((text, report.criteria_agree))
}

fn run_moments(g: &DirectedGraph, cfg: &RunConfig) -> Result<(String, bool)> {
    let n = cfg.n.expect("validated");
    let values = compute_moment(g, cfg.method, n, cfg.budget())?;
    let uniform = uniform_value(&values);
    let text = match cfg.format() {
        Format::Json => pretty(&json!({
            "n": n,
            "method": cfg.method.name(),
            "per_vertex": per_vertex(g, &values),
            "uniform": uniform.is_some(),
            "value": uniform.map(number),
        })),
        Format::Csv => csv_table(
            "n,vertex,value",
            g.vertices().zip(&values).map(|(v, x)| vec![n.to_string(), g.vertex_name(v).into(), x.to_string()]),
        ),
    };
    Ok((text, true))
}

fn run_compare(g: &DirectedGraph, cfg: &RunConfig) -> Result<(String, bool)> {
    let report = compare(g, cfg.max_n.expect("validated"), cfg.depth, cfg.budget())?;
    Ok((render_compare(g, &report, cfg.format()), report.agree()))
}

#[derive(Serialize)]
struct LatticeRow {
    n: usize,
    labels: usize,
    zero_sum_tuples: u64,
    axis_paths: u64,
    bijection: bool,
}

fn run_lattice(g: &DirectedGraph, cfg: &RunConfig) -> Result<(String, bool)> {
    let labels = Weighting::canonical(g).max_label();
    let orders: Vec<usize> = match (cfg.n, cfg.max_n) {
        (Some(n), _) => vec![n],
        (None, Some(m)) => (1..=m).collect(),
        (None, None) => unreachable!("validated"),
    };
    let budget = cfg.budget();
    let rows: Vec<LatticeRow> = orders
        .into_iter()
        .map(|n| {
            Ok(LatticeRow {
                n,
                labels,
                zero_sum_tuples: brute_zero_sum(labels, n, budget)?,
                axis_paths: lattice_paths(labels, n, true, budget)?.len() as u64,
                bijection: theta_bijection_check(labels, n, budget)?,
            })
        })
        .collect::<Result<_>>()?;
    let ok = rows.iter().all(|r| r.bijection && r.zero_sum_tuples == r.axis_paths);
    let text = match cfg.format() {
        Format::Json => pretty(&serde_json::to_value(&rows)?),
        Format::Csv => csv_table(
            "n,labels,zero_sum_tuples,axis_paths,bijection",
            rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    r.labels.to_string(),
                    r.zero_sum_tuples.to_string(),
                    r.axis_paths.to_string(),
                    r.bijection.to_string(),
                ]
            }),
        ),
    };
    Ok((text, ok))
}

fn run_cumulants(g: &DirectedGraph, cfg: &RunConfig) -> Result<(String, bool)> {
    let max_n = cfg.max_n.expect("validated");
    let moments: Vec<Integer> = (1..=max_n)
        .map(|n| {
            let values = compute_moment(g, Method::Operator, n, cfg.budget())?;
            uniform_value(&values)
                .cloned()
                .ok_or_else(|| Error::InvalidArgument(format!("moment {n} differs between vertices")))
        })
        .collect::<Result<_>>()?;
    let field: Vec<BigRational> = moments.iter().cloned().map(BigRational::from_integer).collect();
    let cumulants = cumulants_from_moments(&field)?;
    let text = match cfg.format() {
        Format::Csv => csv_table(
            "n,moment,cumulant",
            moments.iter().zip(&cumulants).enumerate().map(|(i, (m, k))| {
                vec![(i + 1).to_string(), m.to_string(), k.to_string()]
            }),
        ),
        Format::Json => pretty(&Value::Array(
            moments
                .iter()
                .zip(&cumulants)
                .enumerate()
                .map(|(i, (m, k))| json!({ "n": i + 1, "moment": number(m), "cumulant": k.to_string() }))
                .collect(),
        )),
    };
    Ok((text, true))
}

#[derive(Serialize)]
struct AxiomsSummary {
    groupoid: AxiomReport,
    composition: CompositionReport,
    adjoint: bool,
}

fn run_axioms(g: &DirectedGraph, cfg: &RunConfig) -> Result<(String, bool)> {
    let weighting = Weighting::canonical(g);
    let basis = basis_up_to(g, cfg.depth.max(2));
    let mut adjoint = true;
    for k in 1..=weighting.max_label() as i32 {
        adjoint &= adjoint_check(g, &weighting, &basis, k)?;
    }
    let summary = AxiomsSummary {
        groupoid: check_groupoid_axioms(g, cfg.samples, cfg.seed),
        composition: action_compose_check(g, &weighting, cfg.depth),
        adjoint,
    };
    let ok = summary.groupoid.passed && summary.composition.passed && summary.adjoint;
    let text = match cfg.format() {
        Format::Json => pretty(&serde_json::to_value(&summary)?),
        Format::Csv => csv_table(
            "check,passed",
            [
                vec!["groupoid".into(), summary.groupoid.passed.to_string()],
                vec!["composition".into(), summary.composition.passed.to_string()],
                vec!["adjoint".into(), summary.adjoint.to_string()],
            ],
        ),
    };
    Ok((text, ok))
}

/// Executes a validated configuration.
pub fn run(cfg: &RunConfig) -> Outcome {
    let result = cfg.validate().and_then(|_| {
        let g = load_graph(&cfg.graph)?;
        match cfg.command {
            Command::Check => run_check(&g, cfg),
            Command::Moments => run_moments(&g, cfg),
            Command::Compare => run_compare(&g, cfg),
            Command::Lattice => run_lattice(&g, cfg),
            Command::Cumulants => run_cumulants(&g, cfg),
            Command::Axioms => run_axioms(&g, cfg),
        }
    });
    match result {
        Ok((stdout, consistent)) => Outcome {
            status: if cfg.strict && !consistent { EXIT_DISAGREE } else { EXIT_OK },
            stderr: if consistent { String::new() } else { "warning: internal cross-check disagreement\n".into() },
            stdout,
        },
        Err(e) => Outcome { status: EXIT_INVALID, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

/// Parses `args` (including the program name) and runs them. Usage errors
/// exit with status 1; `--help` and `--version` with 0.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { status: EXIT_INVALID, stdout: String::new(), stderr: text }
            } else {
                Outcome { status: EXIT_OK, stdout: text, stderr: String::new() }
            }
        }
    }
}
