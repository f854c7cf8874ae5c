//! `wgg`: command-line front end for the weighted gain graph engine.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use wgg_core::activities::{forest_expansion, EdgeOrdering};
use wgg_core::coloring::{full_filter, ideal_filter, list_chromatic, lists_of, to_count};
use wgg_core::dichromatic::{q_total_delcon, q_total_subset};
use wgg_core::io::{parse_arrangement, parse_graph, parse_rows, AnyWeighted, ArrangementInput, GraphInput, Semigroup};
use wgg_core::lattice::LatticeVector;
use wgg_core::orthotope::{
    count_lists, count_lists_bounded, count_lists_bounded_bruteforce, count_lists_bruteforce, count_matrix,
    count_matrix_bruteforce, count_orthotope, count_orthotope_bruteforce, PiecewiseChi,
};
use wgg_core::verify::{run_all, Limits, DEFAULT_SEED};
use wgg_core::{ColorSet, EdgeSet, Weight, WeightedGainGraph};

#[derive(Parser, Debug)]
#[command(name = "wgg", version, about = "Exact computations on weighted integral gain graphs")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Args, Debug)]
struct GraphArgs {
    /// Graph file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Weight semigroup, overriding the file's `semigroup` field.
    #[arg(long)]
    semigroup: Option<Semigroup>,
}

#[derive(Args, Debug)]
struct CheckArg {
    /// Also run the brute-force oracle and fail with exit code 3 on disagreement.
    #[arg(long)]
    check: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Total dichromatic polynomial by subset expansion and by deletion-contraction.
    Qpoly(GraphArgs),
    /// Forest expansion for an edge ordering.
    Forest {
        #[command(flatten)]
        graph: GraphArgs,
        /// Edge permutation from smallest to largest, 1-based and comma separated.
        #[arg(long)]
        order: Option<String>,
    },
    /// Closed balanced edge sets with their Möbius values.
    Mobius {
        /// Graph file (JSON).
        #[arg(long)]
        input: PathBuf,
    },
    /// Number of proper list colorations.
    Chi {
        #[command(flatten)]
        graph: GraphArgs,
        /// Upper bounds `m_i`, rows separated by `;`.
        #[arg(long)]
        m: Option<String>,
        #[command(flatten)]
        check: CheckArg,
    },
    /// Lattice points of `[0,m]` outside a scalar arrangement.
    CountOrthotope {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: Option<String>,
        #[command(flatten)]
        check: CheckArg,
    },
    /// Points of a product of lists outside an arrangement, optionally inside `[0,m]`.
    CountLists {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: Option<String>,
        #[command(flatten)]
        check: CheckArg,
    },
    /// Integer matrices with `H <= X <= M` outside an arrangement.
    CountMatrix {
        #[arg(long)]
        input: PathBuf,
        /// Upper bound rows.
        #[arg(long)]
        m: Option<String>,
        /// Lower bound rows.
        #[arg(long)]
        h: Option<String>,
        #[command(flatten)]
        check: CheckArg,
    },
    /// Piecewise polynomial for cone-minus-finite weights.
    Piecewise {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        m: Option<String>,
        /// Evaluate the common-bound polynomial at this single bound instead.
        #[arg(long)]
        common: Option<String>,
    },
    /// Randomized oracle-equivalence suites.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, default_value_t = 5)]
        max_e: usize,
        #[arg(long, default_value_t = 2)]
        max_d: usize,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Semantic(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Parse(_) => 1,
            Self::Semantic(_) => 2,
            Self::Verification(_) => 3,
        }
    }
}

impl From<wgg_core::io::InputError> for CliError {
    fn from(e: wgg_core::io::InputError) -> Self {
        Self::Parse(e.to_string())
    }
}

fn semantic(e: impl ToString) -> CliError {
    CliError::Semantic(e.to_string())
}

/// Text for humans and a JSON value for machines.
struct Report {
    human: String,
    machine: Value,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<GraphInput, CliError> {
    Ok(parse_graph(&read(path)?)?)
}

fn load_arrangement(path: &Path) -> Result<ArrangementInput, CliError> {
    Ok(parse_arrangement(&read(path)?)?)
}

fn weighted(input: &GraphInput, flag: Option<Semigroup>) -> Result<AnyWeighted, CliError> {
    let semigroup = flag
        .or(input.semigroup)
        .ok_or_else(|| CliError::Parse("semigroup: give --semigroup or a `semigroup` field".into()))?;
    Ok(input.weighted(semigroup)?)
}

/// Bounds from the flag, falling back to the file.
fn bounds(flag: Option<&str>, file: Option<&Vec<LatticeVector>>, d: usize, n: usize) -> Result<Option<Vec<LatticeVector>>, CliError> {
    let rows = match flag {
        Some(text) => Some(parse_rows(text, d)?),
        None => file.cloned(),
    };
    if let Some(r) = &rows {
        if r.len() != n {
            return Err(CliError::Parse(format!("--m: expected {n} bounds, found {}", r.len())));
        }
    }
    Ok(rows)
}

fn polynomial_pair<W: Weight>(wg: &WeightedGainGraph<W>) -> Result<Report, CliError> {
    let subset = q_total_subset(wg);
    let delcon = q_total_delcon(wg);
    if subset != delcon {
        return Err(CliError::Verification(format!(
            "subset expansion {subset} differs from deletion-contraction {delcon}"
        )));
    }
    Ok(Report { human: format!("Q = {subset}"), machine: json!({ "command": "qpoly", "polynomial": subset.to_json() }) })
}

fn qpoly(args: &GraphArgs) -> Result<Report, CliError> {
    let input = load_graph(&args.input)?;
    match weighted(&input, args.semigroup)? {
        AnyWeighted::MaxZd(wg) => polynomial_pair(&wg),
        AnyWeighted::SumZd(wg) => polynomial_pair(&wg),
        AnyWeighted::FiniteList(wg) => polynomial_pair(&wg),
        AnyWeighted::ConeMinusFinite(wg) => polynomial_pair(&wg),
    }
}

fn parse_order(text: &str, m: usize) -> Result<EdgeOrdering, CliError> {
    let order = text
        .split(',')
        .map(|x| match x.trim().parse::<usize>() {
            Ok(k) if (1..=m).contains(&k) => Ok(k - 1),
            _ => Err(CliError::Parse(format!("--order: {:?} is not an edge between 1 and {m}", x.trim()))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    EdgeOrdering::new(order).map_err(|e| CliError::Parse(format!("--order: {e}")))
}

fn forest_report<W: Weight>(wg: &WeightedGainGraph<W>, ord: &EdgeOrdering) -> Result<Report, CliError> {
    let f = forest_expansion(wg, ord);
    let balanced = q_total_subset(wg).balanced_part();
    if f.shift_v(1) != balanced {
        return Err(CliError::Verification(format!("forest expansion {f} disagrees with Q(u, y-1, 0)")));
    }
    let order: Vec<usize> = ord.order().iter().map(|e| e + 1).collect();
    Ok(Report {
        human: format!("F(u,y) = {}", f.to_string().replace('v', "y")),
        machine: json!({ "command": "forest", "order": order, "variable": "y stored as v", "polynomial": f.to_json() }),
    })
}

fn forest(args: &GraphArgs, order: Option<&str>) -> Result<Report, CliError> {
    let input = load_graph(&args.input)?;
    let m = input.graph.edge_count();
    let ord = match order {
        Some(text) => parse_order(text, m)?,
        None => EdgeOrdering::identity(m),
    };
    match weighted(&input, args.semigroup)? {
        AnyWeighted::MaxZd(wg) => forest_report(&wg, &ord),
        AnyWeighted::SumZd(wg) => forest_report(&wg, &ord),
        AnyWeighted::FiniteList(wg) => forest_report(&wg, &ord),
        AnyWeighted::ConeMinusFinite(wg) => forest_report(&wg, &ord),
    }
}

fn one_based(s: EdgeSet) -> Vec<usize> {
    s.iter().map(|e| e + 1).collect()
}

fn mobius(path: &Path) -> Result<Report, CliError> {
    let input = load_graph(path)?;
    let lat = input.graph.lat_b();
    let mut human = Vec::new();
    let mut rows = Vec::new();
    for (set, mu) in lat.iter() {
        human.push(format!("{set}\tmu = {mu}"));
        rows.push(json!({ "set": one_based(set), "mu": mu }));
    }
    if !lat.empty_closed {
        human.push("the empty set is not closed, so every value is 0".into());
    }
    Ok(Report { human: human.join("\n"), machine: json!({ "command": "mobius", "elements": rows }) })
}

fn count_report(command: &str, value: impl ToString, oracle: Option<String>) -> Result<Report, CliError> {
    let value = value.to_string();
    if let Some(brute) = &oracle {
        if *brute != value {
            return Err(CliError::Verification(format!("formula gives {value}, enumeration gives {brute}")));
        }
    }
    let mut machine = json!({ "command": command, "count": value });
    if let Some(brute) = oracle {
        machine["bruteforce"] = json!(brute);
    }
    Ok(Report { human: value, machine })
}

fn chi(args: &GraphArgs, m: Option<&str>, check: bool) -> Result<Report, CliError> {
    let input = load_graph(&args.input)?;
    let g = &input.graph;
    let (n, d) = (g.vertex_count(), g.dim());
    let lists: Vec<ColorSet> = match (&input.lists, args.semigroup.or(input.semigroup)) {
        (Some(lists), _) => lists.clone(),
        (None, Some(_)) => match weighted(&input, args.semigroup)? {
            AnyWeighted::FiniteList(wg) => lists_of(&wg),
            AnyWeighted::ConeMinusFinite(wg) => lists_of(&wg),
            _ => return Err(CliError::Semantic("chi needs list weights: finite-list or cone-minus-finite".into())),
        },
        (None, None) => return Err(CliError::Parse("lists: give a `lists` field or list weights".into())),
    };
    let filter = match (&input.filter, bounds(m, input.m.as_ref(), d, n)?) {
        (Some(f), Some(bound)) => f.iter().zip(ideal_filter(&bound)).map(|(a, b)| a.intersect(&b)).collect(),
        (Some(f), None) => f.clone(),
        (None, Some(bound)) => ideal_filter(&bound),
        (None, None) => full_filter(n, d),
    };
    let value = list_chromatic(g, &lists, &filter).map_err(semantic)?;
    let oracle = if check {
        Some(wgg_core::coloring::count_proper_bruteforce(g, &lists, &filter).map_err(semantic)?.to_string())
    } else {
        None
    };
    count_report("chi", to_count(&value), oracle)
}

fn scalar_bounds(flag: Option<&str>, input: &ArrangementInput) -> Result<Vec<i64>, CliError> {
    let n = input.arrangement.n();
    let rows = bounds(flag, input.m.as_ref(), input.arrangement.d(), n)?
        .ok_or_else(|| CliError::Parse("m: give --m or an `m` field".into()))?;
    rows.iter()
        .map(|v| match v.coords() {
            [x] => Ok(*x),
            _ => Err(CliError::Semantic("this count needs a one-dimensional arrangement".into())),
        })
        .collect()
}

fn orthotope(path: &Path, m: Option<&str>, check: bool) -> Result<Report, CliError> {
    let input = load_arrangement(path)?;
    let m = scalar_bounds(m, &input)?;
    let value = count_orthotope(&input.arrangement, &m).map_err(semantic)?;
    let oracle = check
        .then(|| count_orthotope_bruteforce(&input.arrangement, &m).map(|c| c.to_string()))
        .transpose()
        .map_err(semantic)?;
    count_report("count-orthotope", value, oracle)
}

fn lists_count(path: &Path, m: Option<&str>, check: bool) -> Result<Report, CliError> {
    let input = load_arrangement(path)?;
    let arr = &input.arrangement;
    let lists = input.lists.clone().ok_or_else(|| CliError::Parse("lists: missing field".into()))?;
    if m.is_some() || input.m.is_some() {
        let m = scalar_bounds(m, &input)?;
        let value = count_lists_bounded(arr, &lists, &m).map_err(semantic)?;
        let oracle = check
            .then(|| count_lists_bounded_bruteforce(arr, &lists, &m).map(|c| c.to_string()))
            .transpose()
            .map_err(semantic)?;
        return count_report("count-lists", value, oracle);
    }
    let finite: Vec<BTreeSet<LatticeVector>> = lists
        .iter()
        .enumerate()
        .map(|(i, l)| {
            l.points()
                .map(|p| p.into_iter().collect())
                .ok_or_else(|| CliError::Semantic(format!("list of coordinate {} is infinite; give bounds with --m", i + 1)))
        })
        .collect::<Result<_, _>>()?;
    let value = count_lists(arr, &finite).map_err(semantic)?;
    let oracle =
        check.then(|| count_lists_bruteforce(arr, &finite).map(|c| c.to_string())).transpose().map_err(semantic)?;
    count_report("count-lists", value, oracle)
}

fn matrix(path: &Path, m: Option<&str>, h: Option<&str>, check: bool) -> Result<Report, CliError> {
    let input = load_arrangement(path)?;
    let arr = &input.arrangement;
    let (n, d) = (arr.n(), arr.d());
    let upper = bounds(m, input.m.as_ref(), d, n)?.ok_or_else(|| CliError::Parse("m: give --m or an `m` field".into()))?;
    let lower = match h {
        Some(text) => parse_rows(text, d)?,
        None => input.h.clone().ok_or_else(|| CliError::Parse("h: give --h or an `h` field".into()))?,
    };
    if lower.len() != n {
        return Err(CliError::Parse(format!("h: expected {n} rows, found {}", lower.len())));
    }
    let value = count_matrix(arr, &lower, &upper).map_err(semantic)?;
    let oracle = check
        .then(|| count_matrix_bruteforce(arr, &lower, &upper).map(|c| c.to_string()))
        .transpose()
        .map_err(semantic)?;
    count_report("count-matrix", value, oracle)
}

fn vectors_json(vs: &[LatticeVector]) -> Value {
    json!(vs.iter().map(|v| v.coords().to_vec()).collect::<Vec<_>>())
}

fn piecewise(args: &GraphArgs, m: Option<&str>, common: Option<&str>) -> Result<Report, CliError> {
    let input = load_graph(&args.input)?;
    let AnyWeighted::ConeMinusFinite(wg) = weighted(&input, args.semigroup)? else {
        return Err(CliError::Semantic("piecewise needs cone-minus-finite weights".into()));
    };
    let chi = PiecewiseChi::new(&wg).map_err(semantic)?;
    let (n, d) = (wg.vertex_count(), wg.graph().dim());
    if let Some(text) = common {
        let point = parse_rows(text, d)?;
        let [point] = point.as_slice() else {
            return Err(CliError::Parse("--common: expected a single bound vector".into()));
        };
        let eval = chi.common_bound(point).map_err(semantic)?;
        let exact = to_count(&chi.exact(&vec![point.clone(); n]).map_err(semantic)?);
        let human = format!(
            "value = {}\nexact = {exact}\nthreshold = {}\nabove threshold = {}\npolynomial = {}",
            eval.value, eval.threshold, eval.above_threshold, eval.polynomial
        );
        let machine = json!({
            "command": "piecewise", "common": point.coords(), "value": eval.value.to_string(),
            "exact": exact.to_string(), "threshold": eval.threshold.coords(),
            "above_threshold": eval.above_threshold, "polynomial": eval.polynomial.to_string(),
        });
        return Ok(Report { human, machine });
    }
    let m = bounds(m, input.m.as_ref(), d, n)?.ok_or_else(|| CliError::Parse("m: give --m or an `m` field".into()))?;
    let eval = chi.evaluate(&m).map_err(semantic)?;
    let exact = to_count(&chi.exact(&m).map_err(semantic)?);
    let poly = chi.chamber_polynomial(&m).map_err(semantic)?;
    let threshold: Vec<String> = eval.threshold.iter().map(ToString::to_string).collect();
    let human = format!(
        "value = {}\nexact = {exact}\nthreshold = {}\nabove threshold = {}\nchamber polynomial = {poly}",
        eval.value,
        threshold.join(" "),
        eval.above_threshold
    );
    let machine = json!({
        "command": "piecewise", "m": vectors_json(&m), "value": eval.value.to_string(), "exact": exact.to_string(),
        "threshold": vectors_json(&eval.threshold), "above_threshold": eval.above_threshold,
        "chamber_polynomial": poly.to_string(),
    });
    Ok(Report { human, machine })
}

fn verify(seed: u64, limits: Limits) -> Result<Report, CliError> {
    let reports = run_all(seed, limits);
    let mut human = Vec::new();
    for r in &reports {
        let status = if r.ok() { "pass" } else { "FAIL" };
        human.push(format!("[{}] {status} {}: {}/{} passed", r.criterion, r.name, r.passed, r.cases));
        if let Some(f) = &r.first_failure {
            human.push(format!("    first failure: {f}"));
        }
        for note in &r.notes {
            human.push(format!("    note: {note}"));
        }
    }
    let failed = reports.iter().filter(|r| !r.ok()).count();
    human.push(format!("{} suites, {failed} failed (seed {seed})", reports.len()));
    let machine = json!({ "command": "verify", "seed": seed, "limits": limits, "suites": reports, "failed": failed });
    let report = Report { human: human.join("\n"), machine };
    if failed > 0 {
        return Err(CliError::Verification(render(&report, Format::Human)));
    }
    Ok(report)
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Qpoly(args) => qpoly(args),
        Command::Forest { graph, order } => forest(graph, order.as_deref()),
        Command::Mobius { input } => mobius(input),
        Command::Chi { graph, m, check } => chi(graph, m.as_deref(), check.check),
        Command::CountOrthotope { input, m, check } => orthotope(input, m.as_deref(), check.check),
        Command::CountLists { input, m, check } => lists_count(input, m.as_deref(), check.check),
        Command::CountMatrix { input, m, h, check } => matrix(input, m.as_deref(), h.as_deref(), check.check),
        Command::Piecewise { graph, m, common } => piecewise(graph, m.as_deref(), common.as_deref()),
        Command::Verify { seed, max_n, max_e, max_d } => {
            verify(*seed, Limits { max_n: *max_n, max_e: *max_e, max_d: *max_d })
        }
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Human => report.human.clone(),
        Format::Machine => report.machine.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(report) => {
            println!("{}", render(&report, cli.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
