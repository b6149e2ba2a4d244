//! `minsup`: responsibility scores of database facts for monotone queries.

use clap::{Parser, Subcommand, ValueEnum};
use minsup::axioms::{report_tsv, run_report, REPORT_COLUMNS};
use minsup::measure::{Measure, MEASURE_NAMES};
use minsup::query::{
    count_automorphisms, core, hom_equals_minsup, is_acyclic, is_core, is_self_join_free, mergeable, self_join_width,
    unifiable,
};
use minsup::rational::{exact, format_decimal, parse_rational};
use minsup::rpq::{check_dag, classify_rpq, compile_regex, DagCheck};
use minsup::selfjoin::SelfJoinCounter;
use minsup::shapley::{shapley_all, shapley_permutation_form, CoefficientSpec, WealthSpec};
use minsup::sql::{build_rewriting, emit_sql, SqlRewriteCounter};
use minsup::supports::{EnumerationCounter, FmsCounter, FmsVector};
use minsup::wsms::WeightFunction;
use minsup::{parse_database, parse_query, ConjunctiveQuery, Error, Fact, PartitionedDatabase, Query, Rational, Schema};
use serde_json::{json, Map, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const SCHEMA_VERSION: u64 = 1;

#[derive(Parser)]
#[command(name = "minsup", version, about = "Responsibility scores based on minimal supports")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, global = true, default_value_t = Format::Tsv)]
    format: Format,
    /// Worker threads for scoring (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Lift the size guards (same as MINSUP_GUARD_OVERRIDE=1); may be very slow
    #[arg(long, global = true)]
    no_guards: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// enumerate the minimal supports
    Enum,
    /// unification partitions (CQs without inequalities)
    Selfjoin,
    /// count-query rewriting (CQs and UCQs)
    Sql,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Coeff {
    Shapley,
    Banzhaf,
}

#[derive(Subcommand)]
enum Command {
    /// Score every endogenous fact
    Score {
        /// Database file, one fact per line; `*` marks exogenous facts
        #[arg(long)]
        db: PathBuf,
        /// Query file: CQ/UCQ rules, an `rpq` line, or a JSON list of generators
        #[arg(long)]
        query: PathBuf,
        /// One of ms, s, sharp, wsms-custom, drastic-shapley, drastic-banzhaf,
        /// sa-shapley, p-shapley, mc-shapley, r-shapley
        #[arg(long, default_value = "ms")]
        measure: String,
        /// JSON weight table {"k,n": "num/den"} for wsms-custom
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Only report these facts (repeatable)
        #[arg(long = "fact")]
        facts: Vec<String>,
    },
    /// Total number of minimal supports
    CountMs {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        query: PathBuf,
        /// Counting route: support enumeration, the self-join counter, or SQL evaluation
        #[arg(long, value_enum, default_value_t = Method::Enum)]
        method: Method,
    },
    /// Minimal supports of size k, or of every size when k is omitted
    CountFms {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        /// Counting route: support enumeration, the self-join counter, or SQL evaluation
        #[arg(long, value_enum, default_value_t = Method::Enum)]
        method: Method,
    },
    /// SQL count queries whose weighted sum is countFMS(k) (always plain SQL)
    RewriteSql {
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        k: usize,
        /// Relation list, one `Name/arity` per line; inferred from the query otherwise
        #[arg(long)]
        schema: Option<PathBuf>,
    },
    /// Classify a path query and optionally score a graph database
    Rpq {
        #[arg(long)]
        query: PathBuf,
        /// Acyclic graph database to score
        #[arg(long)]
        db: Option<PathBuf>,
        /// Any score measure (default ms); WSMS measures use the path-counting route on DAGs
        #[arg(long)]
        measure: Option<String>,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Structural properties of a query
    Analyze {
        #[arg(long)]
        query: PathBuf,
    },
    /// Check the axioms on seeded generated instances
    Axioms {
        /// Comma-separated measure names (default: all except wsms-custom)
        #[arg(long, value_delimiter = ',')]
        measures: Vec<String>,
        /// Random instances drawn per axiom
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Shapley-like scores of an explicit wealth table
    Brute {
        /// JSON {"players": [facts], "table": [{"set": [facts], "value": "num/den"}]}
        #[arg(long)]
        wealth: PathBuf,
        #[arg(long, value_enum, default_value_t = Coeff::Shapley)]
        coeff: Coeff,
        /// Also compute the permutation form and fail on disagreement
        #[arg(long)]
        check_permutations: bool,
    },
}

/// Errors that are not the library's: unreadable files and malformed arguments.
enum Failure {
    Input(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_query(path: &Path) -> CliResult<Query> {
    Ok(parse_query(&read(path)?).map_err(|e| with_file(path, e))?)
}

fn load_db(path: &Path) -> CliResult<PartitionedDatabase> {
    Ok(parse_database(&read(path)?).map_err(|e| with_file(path, e))?)
}

fn with_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Syntax { line, msg } => Error::Syntax {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    }
}

fn load_measure(name: &str, weights: Option<&PathBuf>) -> CliResult<Measure> {
    let w = match weights {
        Some(p) => Some(WeightFunction::from_json(&read(p)?)?),
        None => None,
    };
    Ok(Measure::from_name(name, w)?)
}

/// What a subcommand prints: key/value fields and an optional table.
struct Report {
    command: &'static str,
    fields: Vec<(String, Value)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Report {
    fn new(command: &'static str) -> Self {
        Report {
            command,
            fields: vec![],
            columns: vec![],
            rows: vec![],
        }
    }

    fn field(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.fields.push((key.to_string(), v.into()));
        self
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut obj = Map::new();
                obj.insert("schema".into(), json!(SCHEMA_VERSION));
                obj.insert("command".into(), json!(self.command));
                for (k, v) in &self.fields {
                    obj.insert(k.clone(), v.clone());
                }
                if !self.columns.is_empty() {
                    let rows: Vec<Value> = self
                        .rows
                        .iter()
                        .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
                        .collect();
                    obj.insert("rows".into(), Value::Array(rows));
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
                s.push('\n');
                s
            }
            Format::Tsv => {
                let cell = |v: &Value| match v {
                    Value::String(s) => s.clone(),
                    Value::Null => "-".into(),
                    other => other.to_string(),
                };
                let mut out = String::new();
                let prefix = if self.columns.is_empty() { "" } else { "# " };
                for (k, v) in &self.fields {
                    out.push_str(&format!("{prefix}{k}\t{}\n", cell(v)));
                }
                if !self.columns.is_empty() {
                    out.push_str(&self.columns.join("\t"));
                    out.push('\n');
                    for r in &self.rows {
                        out.push_str(&r.iter().map(cell).collect::<Vec<_>>().join("\t"));
                        out.push('\n');
                    }
                }
                out
            }
        }
    }
}

fn floor_string(x: &Rational) -> String {
    x.floor().to_integer().to_string()
}

/// Rows sorted by descending score, then by fact.
fn score_table(report: &mut Report, scores: BTreeMap<Fact, Rational>) {
    let mut rows: Vec<(Fact, Rational)> = scores.into_iter().collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    report.columns = vec!["fact", "score", "decimal", "floor"];
    report.rows = rows
        .into_iter()
        .map(|(f, s)| vec![json!(f.to_string()), json!(exact(&s)), json!(format_decimal(&s, 12)), json!(floor_string(&s))])
        .collect();
}

fn parse_facts(texts: &[String]) -> CliResult<BTreeSet<Fact>> {
    Ok(texts.iter().map(|t| Fact::parse(t)).collect::<minsup::Result<_>>()?)
}

fn cmd_score(db: &Path, query: &Path, measure: &str, weights: Option<&PathBuf>, filter: &[String]) -> CliResult<Report> {
    let (db, q, m) = (load_db(db)?, load_query(query)?, load_measure(measure, weights)?);
    let keep = parse_facts(filter)?;
    for f in &keep {
        if !db.is_endogenous(f) {
            return Err(Error::NotEndogenous(f.to_string()).into());
        }
    }
    let mut scores = m.score_all(&q, &db)?;
    if !keep.is_empty() {
        scores.retain(|f, _| keep.contains(f));
    }
    let (n, x, total) = db.size();
    let mut r = Report::new("score")
        .field("measure", m.name())
        .field("endogenous", n)
        .field("exogenous", x)
        .field("facts", total);
    score_table(&mut r, scores);
    Ok(r)
}

fn counter(method: Method) -> Box<dyn FmsCounter> {
    match method {
        Method::Enum => Box::new(EnumerationCounter),
        Method::Selfjoin => Box::new(SelfJoinCounter),
        Method::Sql => Box::new(SqlRewriteCounter),
    }
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::Enum => "enum",
        Method::Selfjoin => "selfjoin",
        Method::Sql => "sql",
    }
}

fn fms(db: &Path, query: &Path, method: Method) -> CliResult<FmsVector> {
    let (db, q) = (load_db(db)?, load_query(query)?);
    Ok(counter(method).fms(&q, &db.all_facts())?)
}

fn cmd_count_ms(db: &Path, query: &Path, method: Method) -> CliResult<Report> {
    let v = fms(db, query, method)?;
    Ok(Report::new("count-ms").field("method", method_name(method)).field("count_ms", v.total()))
}

fn cmd_count_fms(db: &Path, query: &Path, k: Option<usize>, method: Method) -> CliResult<Report> {
    let v = fms(db, query, method)?;
    let mut r = Report::new("count-fms").field("method", method_name(method));
    r.columns = vec!["k", "count_fms"];
    r.rows = match k {
        Some(k) => vec![vec![json!(k), json!(v.get(k))]],
        None => v.counts.iter().enumerate().filter(|(_, c)| **c > 0).map(|(k, c)| vec![json!(k), json!(c)]).collect(),
    };
    Ok(r)
}

fn cmd_rewrite_sql(query: &Path, k: usize, schema: Option<&PathBuf>) -> CliResult<String> {
    let q = load_query(query)?;
    let ucq = match &q {
        Query::Cq(c) => minsup::query::UnionQuery::new(vec![c.clone()])?,
        Query::Ucq(u) => u.clone(),
        _ => return Err(Error::Unsupported("the rewriting needs a CQ or UCQ".into()).into()),
    };
    let schema = match schema {
        Some(p) => Schema::parse(&read(p)?)?,
        None => q.schema()?,
    };
    Ok(emit_sql(&build_rewriting(&ucq, k)?, &schema)?)
}

fn cmd_rpq(query: &Path, db: Option<&PathBuf>, measure: Option<&str>, weights: Option<&PathBuf>) -> CliResult<Report> {
    let Query::Rpq(q) = load_query(query)? else {
        return Err(Failure::Input("expected an `rpq <source> <target> : <regex>` query".into()));
    };
    let dfa = compile_regex(&q.regex);
    let mut r = Report::new("rpq")
        .field("query", q.to_string())
        .field("class", classify_rpq(&q).label())
        .field("dfa_states", dfa.num_states())
        .field("finite", dfa.is_finite())
        .field("accepts_empty", dfa.accepts_empty());
    if let Some(path) = db {
        let db = load_db(path)?;
        let all = db.all_facts();
        let acyclic = matches!(check_dag(&all)?, DagCheck::Order(_));
        r = r
            .field("acyclic", acyclic)
            .field("satisfied", minsup::rpq::evaluate_rpq(&q, &all));
        let m = load_measure(measure.unwrap_or("ms"), weights)?;
        let scores = m.score_all(&Query::Rpq(q), &db)?;
        r = r.field("measure", m.name());
        score_table(&mut r, scores);
    } else if measure.is_some() {
        return Err(Failure::Input("--measure needs --db".into()));
    }
    Ok(r)
}

fn analyze_cq(q: &ConjunctiveQuery) -> minsup::Result<Value> {
    let atoms = q.atoms();
    let mut unif = Vec::new();
    let mut merge = Vec::new();
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            if unifiable(&atoms[i], &atoms[j]) {
                unif.push(json!([i, j]));
            }
            if mergeable(&atoms[i], &atoms[j]) {
                merge.push(json!([i, j]));
            }
        }
    }
    let c = core(q);
    Ok(json!({
        "query": q.to_string(),
        "acyclic": is_acyclic(q),
        "self_join_free": is_self_join_free(q),
        "self_join_width": self_join_width(q),
        "unifiable_pairs": unif,
        "mergeable_pairs": merge,
        "core": c.to_string(),
        "is_core": is_core(q),
        "automorphisms": count_automorphisms(q),
        "hom_equals_minsup": hom_equals_minsup(q)?,
    }))
}

fn cmd_analyze(query: &Path) -> CliResult<Report> {
    let q = load_query(query)?;
    let r = Report::new("analyze");
    Ok(match &q {
        Query::Cq(c) => {
            let Value::Object(m) = analyze_cq(c)? else { unreachable!() };
            let mut r = r.field("kind", "cq");
            for (k, v) in m {
                r.fields.push((k, v));
            }
            r
        }
        Query::Ucq(u) => {
            let ds: Vec<Value> = u.disjuncts().iter().map(analyze_cq).collect::<minsup::Result<_>>()?;
            r.field("kind", "ucq").field("disjuncts", ds)
        }
        Query::Rpq(p) => r.field("kind", "rpq").field("class", classify_rpq(p).label()),
        Query::Explicit(e) => {
            let sizes: Vec<usize> = e.generators().iter().map(|g| g.len()).collect();
            r.field("kind", "explicit").field("generators", e.generators().len()).field("generator_sizes", sizes)
        }
    })
}

fn cmd_axioms(names: &[String], instances: usize, seed: u64, format: Format) -> CliResult<String> {
    let names: Vec<&str> = if names.is_empty() {
        MEASURE_NAMES.iter().copied().filter(|n| *n != "wsms-custom").collect()
    } else {
        names.iter().map(String::as_str).collect()
    };
    let measures: Vec<Measure> = names.iter().map(|n| load_measure(n, None)).collect::<CliResult<_>>()?;
    let rows = run_report(&measures, seed, instances)?;
    Ok(match format {
        Format::Tsv => report_tsv(&rows),
        Format::Json => {
            let cell = |x: &Option<Rational>| x.as_ref().map_or(Value::Null, |v| json!(exact(v)));
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    Value::Object(
                        REPORT_COLUMNS
                            .iter()
                            .map(|c| c.to_string())
                            .zip([
                                json!(r.axiom),
                                json!(r.instance),
                                json!(r.measure),
                                json!(r.verdict),
                                cell(&r.alpha_score),
                                cell(&r.beta_score),
                            ])
                            .collect(),
                    )
                })
                .collect();
            let v = json!({"schema": SCHEMA_VERSION, "command": "axioms", "seed": seed, "rows": rows});
            format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable"))
        }
    })
}

fn cmd_brute(path: &Path, coeff: Coeff, check: bool) -> CliResult<Report> {
    let v: Value = serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let bad = |m: &str| Failure::Input(format!("{}: {m}", path.display()));
    let strings = |v: &Value| -> CliResult<Vec<String>> {
        v.as_array()
            .ok_or_else(|| bad("expected an array of facts"))?
            .iter()
            .map(|s| s.as_str().map(String::from).ok_or_else(|| bad("facts are strings")))
            .collect()
    };
    let players: Vec<Fact> = parse_facts(&strings(&v["players"])?)?.into_iter().collect();
    let mut table = Vec::new();
    for e in v["table"].as_array().ok_or_else(|| bad("missing \"table\""))? {
        let set = parse_facts(&strings(&e["set"])?)?;
        let value = match &e["value"] {
            Value::String(s) => parse_rational(s)?,
            Value::Number(n) if n.is_i64() => Rational::from_integer(n.as_i64().unwrap().into()),
            _ => return Err(bad("values are integers or \"num/den\" strings")),
        };
        table.push((set, value));
    }
    let spec = WealthSpec::from_table(players, &table)?;
    let c = match coeff {
        Coeff::Shapley => CoefficientSpec::Shapley,
        Coeff::Banzhaf => CoefficientSpec::Banzhaf,
    };
    let scores = shapley_all(&spec, &c)?;
    if check && coeff == Coeff::Shapley {
        for (f, s) in &scores {
            if &shapley_permutation_form(&spec, f)? != s {
                return Err(Failure::Input(format!("permutation form disagrees on {f}")));
            }
        }
    }
    let mut r = Report::new("brute").field("coefficient", if coeff == Coeff::Shapley { "shapley" } else { "banzhaf" }).field("players", spec.players().len());
    score_table(&mut r, scores);
    Ok(r)
}

fn run(cli: &Cli) -> CliResult<String> {
    Ok(match &cli.command {
        Command::Score {
            db,
            query,
            measure,
            weights,
            facts,
        } => cmd_score(db, query, measure, weights.as_ref(), facts)?.render(cli.format),
        Command::CountMs { db, query, method } => cmd_count_ms(db, query, *method)?.render(cli.format),
        Command::CountFms { db, query, k, method } => cmd_count_fms(db, query, *k, *method)?.render(cli.format),
        Command::RewriteSql { query, k, schema } => cmd_rewrite_sql(query, *k, schema.as_ref())?,
        Command::Rpq {
            query,
            db,
            measure,
            weights,
        } => cmd_rpq(query, db.as_ref(), measure.as_deref(), weights.as_ref())?.render(cli.format),
        Command::Analyze { query } => cmd_analyze(query)?.render(cli.format),
        Command::Axioms { measures, instances, seed } => cmd_axioms(measures, *instances, *seed, cli.format)?,
        Command::Brute {
            wealth,
            coeff,
            check_permutations,
        } => cmd_brute(wealth, *coeff, *check_permutations)?.render(cli.format),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.no_guards {
        minsup::guard::set_override(true);
    }
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_guard() { 3 } else { 2 })
        }
    }
}
