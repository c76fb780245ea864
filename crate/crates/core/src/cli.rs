//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification mismatch or internal error, 2 parse
//! error, 3 violated precondition, 4 oracle cap or search budget exhausted.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{Elem, FiniteRing, Place, Ring};
use crate::charzero::{self, LocalProfile, RationalForm};
use crate::cliques;
use crate::construct;
use crate::error::{Error, Result};
use crate::oracle::{self, GraphMode, OracleOptions, SearchOptions, DEFAULT_CAP};
use crate::qform::{FormSpec, QForm};
use crate::verify::{self, Status, Suite};

pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_CAP: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "qfclique", version, about = "Cliques in graphs of quadratic forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphOutput {
    Edges,
    Dot,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// gf:p[^k], zmod:p^k, q, qp:p or r
    #[arg(long)]
    pub ring: Option<String>,
    /// diag:a,b,..., upper:[[..],..] or gram:[[..],..]
    #[arg(long)]
    pub form: Option<String>,
    /// Integer or rational; over GF(p^k) integers are element encodings.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub scalar: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Largest graph the oracle will build.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    /// Threads for the oracle's clique search.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Clique number and case.
    Omega(CommonArgs),
    /// Number of maximum cliques and group orders.
    Count(CommonArgs),
    /// An explicit maximum clique.
    Construct(CommonArgs),
    /// Formula against brute force, on one instance or a named suite.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// odd, char2, isotropic, residue, sos or all
        #[arg(long)]
        suite: Option<String>,
    },
    /// The representation graph as an edge list or DOT.
    Graph {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = GraphModeArg::Full)]
        mode: GraphModeArg,
        #[arg(long, value_enum, default_value_t = GraphOutput::Edges)]
        output: GraphOutput,
    },
    /// Invariants of the form and the case of the instance.
    Classify(CommonArgs),
    /// Local-global computation over Q with its certificate.
    LocalGlobal(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphModeArg {
    Full,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Omega,
    Count,
    Construct,
    Verify,
    Graph,
    Classify,
    LocalGlobal,
}

/// A validated invocation.
#[derive(Debug, Clone)]
pub struct Request {
    pub command: CommandKind,
    pub ring: Option<Ring>,
    pub form: Option<FormSpec>,
    pub scalar: BigRational,
    pub format: Format,
    pub cap: u64,
    pub workers: usize,
    pub suite: Option<Suite>,
    pub graph_mode: GraphMode,
    pub graph_output: GraphOutput,
}

/// Parses `gf:p[^k]`, `zmod:p^k`, `q`, `qp:p` or `r`.
pub fn parse_ring(s: &str) -> Result<Ring> {
    let bad = || Error::Parse(format!("bad ring {s:?}; expected gf:p[^k], zmod:p^k, q, qp:p or r"));
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
    match s.trim() {
        "q" => return Ok(Ring::Rationals),
        "r" => return Ok(Ring::Reals),
        _ => {}
    }
    let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
    let (p, k) = match rest.split_once('^') {
        Some((p, k)) => (num(p)?, u32::try_from(num(k)?).map_err(|_| bad())?),
        None => (num(rest)?, 1),
    };
    match kind {
        "gf" => Ok(Ring::Finite(FiniteRing::field(p, k)?)),
        "zmod" => {
            if rest.contains('^') {
                Ok(Ring::Finite(FiniteRing::residue(p, k)?))
            } else {
                Err(bad())
            }
        }
        "qp" if k == 1 && !rest.contains('^') => Ring::padic(p),
        _ => Err(bad()),
    }
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<i64>>> {
    serde_json::from_str(s).map_err(|e| Error::Parse(format!("bad matrix {s:?}: {e}")))
}

/// Parses `diag:...`, `upper:[[...]]` or `gram:[[...]]`.
pub fn parse_form(s: &str) -> Result<FormSpec> {
    let (kind, body) = s
        .trim()
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("bad form {s:?}; expected diag:, upper: or gram:")))?;
    match kind {
        "diag" => body
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad diagonal entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(FormSpec::Diagonal),
        "upper" => parse_matrix(body).map(FormSpec::Upper),
        "gram" => parse_matrix(body).map(FormSpec::Gram),
        _ => Err(Error::Parse(format!("unknown form kind {kind:?}"))),
    }
}

/// Canonical spelling of a form spec; [`parse_form`] inverts it.
pub fn format_form(spec: &FormSpec) -> String {
    let rows = |m: &Vec<Vec<i64>>| serde_json::to_string(m).expect("integers serialize");
    match spec {
        FormSpec::Diagonal(d) => {
            let parts: Vec<String> = d.iter().map(|x| x.to_string()).collect();
            format!("diag:{}", parts.join(","))
        }
        FormSpec::Upper(m) => format!("upper:{}", rows(m)),
        FormSpec::Gram(m) => format!("gram:{}", rows(m)),
    }
}

pub fn parse_scalar(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let parse_int = |x: &str| {
        x.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad scalar {s:?}")))
    };
    match t.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("bad scalar {s:?}: zero denominator")));
            }
            Ok(BigRational::new(parse_int(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(t)?)),
    }
}

/// Maps a parsed scalar into a finite ring. Integers go through
/// [`FiniteRing::from_literal`]; a denominator must be invertible.
pub fn scalar_in_ring(ring: &FiniteRing, x: &BigRational) -> Result<Elem> {
    let small = |v: &BigInt| {
        v.to_i64()
            .ok_or_else(|| Error::Parse(format!("scalar {x} does not fit in 64 bits")))
    };
    let num = ring.from_literal(small(x.numer())?)?;
    if x.denom().is_one() {
        return Ok(num);
    }
    let den = ring.from_int(small(x.denom())?);
    let inv = ring
        .inv(den)
        .ok_or_else(|| Error::Precondition(format!("denominator of {x} is not invertible in {ring}")))?;
    Ok(ring.mul(num, inv))
}

impl Request {
    pub fn from_cli(cli: Cli) -> Result<Request> {
        let (command, common, suite, graph_mode, graph_output) = match cli.command {
            Command::Omega(c) => (CommandKind::Omega, c, None, GraphMode::Full, GraphOutput::Edges),
            Command::Count(c) => (CommandKind::Count, c, None, GraphMode::Full, GraphOutput::Edges),
            Command::Construct(c) => (CommandKind::Construct, c, None, GraphMode::Full, GraphOutput::Edges),
            Command::Verify { common, suite } => {
                let suite = suite.map(|s| s.parse::<Suite>()).transpose()?;
                (CommandKind::Verify, common, suite, GraphMode::Full, GraphOutput::Edges)
            }
            Command::Graph { common, mode, output } => {
                let mode = match mode {
                    GraphModeArg::Full => GraphMode::Full,
                    GraphModeArg::Reduced => GraphMode::Reduced,
                };
                (CommandKind::Graph, common, None, mode, output)
            }
            Command::Classify(c) => (CommandKind::Classify, c, None, GraphMode::Full, GraphOutput::Edges),
            Command::LocalGlobal(c) => (CommandKind::LocalGlobal, c, None, GraphMode::Full, GraphOutput::Edges),
        };
        if common.workers == 0 {
            return Err(Error::Parse("--workers must be at least 1".into()));
        }
        let needs_instance = suite.is_none();
        let ring = common.ring.as_deref().map(parse_ring).transpose()?;
        let form = common.form.as_deref().map(parse_form).transpose()?;
        if needs_instance && (ring.is_none() || form.is_none()) {
            return Err(Error::Parse("--ring and --form are required".into()));
        }
        Ok(Request {
            command,
            ring,
            form,
            scalar: parse_scalar(&common.scalar)?,
            format: common.format,
            cap: common.cap,
            workers: common.workers,
            suite,
            graph_mode,
            graph_output,
        })
    }

    fn oracle_options(&self) -> OracleOptions {
        OracleOptions {
            cap: self.cap,
            search: SearchOptions {
                workers: self.workers,
                ..SearchOptions::default()
            },
            ..OracleOptions::default()
        }
    }
}

/// Result of a run: text for humans, JSON for machines, and an exit status.
#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    pub json: Value,
    pub warnings: Vec<String>,
    pub exit: i32,
}

impl Output {
    fn ok(text: String, json: Value, warnings: Vec<String>) -> Output {
        Output {
            text,
            json,
            warnings,
            exit: 0,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::NotPrime(_) => EXIT_PARSE,
        Error::CapExceeded { .. } | Error::BudgetExhausted(_) => EXIT_CAP,
        Error::Internal(_) => EXIT_MISMATCH,
        _ => EXIT_PRECONDITION,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        EXIT_PARSE => "parse",
        EXIT_CAP => "cap",
        EXIT_PRECONDITION => "precondition",
        _ => "internal",
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

enum Instance {
    Finite(QForm, Elem),
    Rational(RationalForm, BigRational, Ring),
}

fn instance(req: &Request) -> Result<Instance> {
    let ring = req
        .ring
        .as_ref()
        .ok_or_else(|| Error::Parse("--ring is required".into()))?;
    let spec = req
        .form
        .as_ref()
        .ok_or_else(|| Error::Parse("--form is required".into()))?;
    match ring {
        Ring::Finite(r) => Ok(Instance::Finite(QForm::new(r, spec)?, scalar_in_ring(r, &req.scalar)?)),
        _ => match spec {
            FormSpec::Diagonal(d) => Ok(Instance::Rational(
                RationalForm::new(d)?,
                req.scalar.clone(),
                ring.clone(),
            )),
            _ => Err(Error::Unsupported(format!(
                "forms over {ring} must be given diagonally (diag:...)"
            ))),
        },
    }
}

fn finite_only(ring: &Ring, what: &str) -> Error {
    Error::Unsupported(format!("{what} is available over finite rings, not over {ring}"))
}

pub fn run(req: &Request) -> Result<Output> {
    match req.command {
        CommandKind::Omega => run_omega(req),
        CommandKind::Count => run_count(req),
        CommandKind::Construct => run_construct(req),
        CommandKind::Verify => run_verify(req),
        CommandKind::Graph => run_graph(req),
        CommandKind::Classify => run_classify(req),
        CommandKind::LocalGlobal => run_local_global(req),
    }
}

fn run_omega(req: &Request) -> Result<Output> {
    match instance(req)? {
        Instance::Finite(q, a) => {
            let r = cliques::clique_number(&q, a)?;
            let text = format!(
                "omega={} case={} k={} extra={}",
                r.omega, r.case.label, r.case.k, r.case.extra
            );
            Ok(Output::ok(text, to_json(&r), r.warnings.clone()))
        }
        Instance::Rational(f, a, ring) => match ring {
            Ring::Rationals => {
                let r = charzero::rational_omega(&f, &a)?;
                Ok(Output::ok(format!("omega={} d={}", r.omega, r.d), to_json(&r), vec![]))
            }
            Ring::PAdic(p) => {
                let omega = charzero::local_omega(&f, &a, Place::Prime(p))?;
                let v = json!({ "omega": omega, "place": Place::Prime(p) });
                Ok(Output::ok(format!("omega={omega} place={p}"), v, vec![]))
            }
            _ => {
                let sig = f.signature();
                let omega = charzero::real_omega(sig, &a)?;
                let v = json!({ "omega": omega, "signature": sig });
                Ok(Output::ok(
                    format!("omega={omega} signature=({},{})", sig.plus, sig.minus),
                    v,
                    vec![],
                ))
            }
        },
    }
}

fn run_count(req: &Request) -> Result<Output> {
    match instance(req)? {
        Instance::Finite(q, a) => {
            let r = cliques::count_max_cliques(&q, a)?;
            let text = format!("count={} |O|={} |iso|={}", r.omega_max, r.o_order, r.iso_order);
            Ok(Output::ok(text, to_json(&r), r.warnings.clone()))
        }
        Instance::Rational(_, _, ring) => Err(finite_only(&ring, "counting")),
    }
}

fn run_construct(req: &Request) -> Result<Output> {
    match instance(req)? {
        Instance::Finite(q, a) => {
            let c = construct::construct_max_clique(&q, a)?;
            let check = construct::validate_clique(&q, a, &c.vertices)?;
            let mode = c.mode.map(|m| to_json(&m).as_str().unwrap_or_default().to_string());
            let mut text = format!("size={} k={} extra={}", c.len(), c.k, c.extra);
            if let Some(m) = mode {
                text.push_str(&format!(" mode={m}"));
            }
            text.push('\n');
            text.push_str(c.to_lines().trim_end());
            let mut v = to_json(&c);
            v["valid"] = Value::Bool(check.is_valid());
            Ok(Output::ok(text, v, vec![]))
        }
        Instance::Rational(_, _, ring) => Err(finite_only(&ring, "clique construction")),
    }
}

fn run_verify(req: &Request) -> Result<Output> {
    let opts = req.oracle_options();
    if let Some(suite) = req.suite {
        let r = verify::run_suite(suite, opts)?;
        let mut text = format!(
            "suite={} instances={} matched={} warnings={} mismatches={}",
            r.suite, r.instances, r.matched, r.warnings, r.mismatches
        );
        for rec in r.records.iter().filter(|x| x.status == Status::Mismatch) {
            text.push_str(&format!(
                "\nmismatch ring={} form={} scalar={} omega={}/{} count={}/{}",
                rec.ring,
                rec.form,
                rec.scalar,
                rec.formula_omega,
                rec.oracle_omega,
                rec.formula_count.as_ref().map_or("-".into(), |c| c.to_string()),
                rec.oracle_count.map_or("-".into(), |c| c.to_string()),
            ));
        }
        for s in r.sos.iter().filter(|x| x.status == Status::Mismatch) {
            text.push_str(&format!(
                "\nmismatch sos n={} fastpath={} local_global={}",
                s.n, s.fastpath, s.local_global
            ));
        }
        let exit = if r.passed() { 0 } else { EXIT_MISMATCH };
        let warnings = if r.warnings > 0 {
            vec![format!("{} instances matched with documented warnings", r.warnings)]
        } else {
            vec![]
        };
        return Ok(Output {
            text,
            json: to_json(&r),
            warnings,
            exit,
        });
    }
    match instance(req)? {
        Instance::Finite(q, a) => {
            let r = verify::verify_instance(&q, a, opts)?;
            let status = to_json(&r.status).as_str().unwrap_or_default().to_string();
            let mut text = format!(
                "status={status} omega={} oracle_omega={}",
                r.formula_omega, r.oracle_omega
            );
            if let Some(c) = &r.formula_count {
                text.push_str(&format!(" count={c}"));
            }
            if let Some(c) = r.oracle_count {
                text.push_str(&format!(" oracle_count={c}"));
            }
            let exit = if r.status == Status::Mismatch { EXIT_MISMATCH } else { 0 };
            Ok(Output {
                text,
                json: to_json(&r),
                warnings: r.warnings.clone(),
                exit,
            })
        }
        Instance::Rational(f, a, ring) => {
            let is_sos = f.entries().iter().all(|&e| e == 1) && a.is_one();
            if ring != Ring::Rationals || !is_sos {
                return Err(Error::Unsupported(
                    "over Q only n x <1> with a = 1 has an independent check".into(),
                ));
            }
            let r = verify::verify_sos(f.dim())?;
            let status = to_json(&r.status).as_str().unwrap_or_default().to_string();
            let text = format!("status={status} omega={} local_global={}", r.fastpath, r.local_global);
            let exit = if r.status == Status::Mismatch { EXIT_MISMATCH } else { 0 };
            Ok(Output {
                text,
                json: to_json(&r),
                warnings: vec![],
                exit,
            })
        }
    }
}

fn run_graph(req: &Request) -> Result<Output> {
    match instance(req)? {
        Instance::Finite(q, a) => {
            let g = oracle::build_graph(&q, a, req.graph_mode, req.cap)?;
            let text = match req.graph_output {
                GraphOutput::Edges => g.to_edge_list(),
                GraphOutput::Dot => g.to_dot(),
            };
            let edges: Vec<[u64; 2]> = g
                .adjacency
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    let g = &g;
                    row.iter()
                        .filter(move |&j| j > i)
                        .map(move |j| [g.vertices[i], g.vertices[j]])
                })
                .collect();
            let v = json!({
                "mode": g.mode,
                "vertices": g.vertices,
                "edges": edges,
                "vertex_count": g.vertex_count(),
                "edge_count": g.edge_count(),
            });
            Ok(Output::ok(text.trim_end().to_string(), v, vec![]))
        }
        Instance::Rational(_, _, ring) => Err(finite_only(&ring, "graph export")),
    }
}

fn run_classify(req: &Request) -> Result<Output> {
    match instance(req)? {
        Instance::Finite(q, a) => {
            let base = q.classification_form()?;
            let inv = base.invariants_ff()?;
            let case = cliques::classify_case(&q, a)?;
            let mut text = format!(
                "dim={} witt_index={} hyperbolic={}",
                inv.dimension, inv.witt_index, inv.hyperbolic
            );
            if let Some(d) = inv.det_class {
                text.push_str(&format!(" det={}", to_json(&d).as_str().unwrap_or_default()));
            }
            if let Some(arf) = inv.arf {
                text.push_str(&format!(" arf={arf}"));
            }
            if !q.ring().is_field() {
                text.push_str(&format!(" residue={}", base.ring()));
            }
            text.push_str(&format!(" case={} k={}", case.label, case.k));
            let v = json!({ "invariants": inv, "case": case });
            Ok(Output::ok(text, v, vec![]))
        }
        Instance::Rational(f, _, ring) => {
            let sig = f.signature();
            let det = f.det_class();
            let mut text = format!("dim={} signature=({},{}) det={det}", f.dim(), sig.plus, sig.minus);
            let v = match ring {
                Ring::Rationals => {
                    let profile = LocalProfile::of(&f)?;
                    for p in &profile.places {
                        text.push_str(&format!(" witt[{}]={}", p.place, p.witt_index));
                    }
                    text.push_str(&format!(" witt={}", profile.min_index()));
                    json!({ "dimension": f.dim(), "signature": sig, "det": det, "witt_index": profile.min_index(), "profile": profile })
                }
                Ring::PAdic(p) => {
                    let place = Place::Prime(p);
                    let w = charzero::local_witt_index(&f, place)?;
                    let h = f.hasse_invariant(place);
                    text.push_str(&format!(" hasse={h} witt={w}"));
                    json!({ "dimension": f.dim(), "signature": sig, "det": det, "hasse": h, "witt_index": w })
                }
                _ => {
                    let w = charzero::local_witt_index(&f, Place::Infinity)?;
                    text.push_str(&format!(" witt={w}"));
                    json!({ "dimension": f.dim(), "signature": sig, "det": det, "witt_index": w })
                }
            };
            Ok(Output::ok(text, v, vec![]))
        }
    }
}

fn run_local_global(req: &Request) -> Result<Output> {
    match instance(req)? {
        Instance::Rational(f, a, Ring::Rationals) => {
            let r = charzero::rational_omega(&f, &a)?;
            let text = format!(
                "omega={} d={} blocked_at={} place={}",
                r.omega, r.d, r.certificate.blocked_at, r.certificate.place
            );
            Ok(Output::ok(text, to_json(&r), vec![]))
        }
        Instance::Rational(_, _, ring) => Err(Error::Unsupported(format!(
            "local-global runs over q; use omega for {ring}"
        ))),
        Instance::Finite(q, _) => Err(Error::Unsupported(format!(
            "local-global runs over q, not over {}",
            q.ring()
        ))),
    }
}

fn scalar_json(x: &BigRational) -> Value {
    Value::String(if x.denom().is_one() {
        x.numer().to_string()
    } else {
        x.to_string()
    })
}

/// The JSON document printed for a successful run.
pub fn envelope(req: &Request, out: &Output) -> Value {
    json!({
        "command": req.command,
        "ring": req.ring.as_ref().map(|r| r.to_string()),
        "form": req.form.as_ref().map(format_form),
        "scalar": scalar_json(&req.scalar),
        "suite": req.suite.map(|s| s.to_string()),
        "result": out.json,
        "warnings": out.warnings,
    })
}

/// Parses `args`, runs, writes to `out` and `err`, and returns the exit status.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let json_mode = match &cli.command {
        Command::Omega(c)
        | Command::Count(c)
        | Command::Construct(c)
        | Command::Classify(c)
        | Command::LocalGlobal(c) => c.format == Format::Json,
        Command::Verify { common, .. } | Command::Graph { common, .. } => common.format == Format::Json,
    };
    let result = Request::from_cli(cli).and_then(|req| run(&req).map(|o| (req, o)));
    match result {
        Ok((req, o)) => {
            if req.format == Format::Json {
                let doc = serde_json::to_string_pretty(&envelope(&req, &o)).expect("json");
                let _ = writeln!(out, "{doc}");
            } else {
                let _ = writeln!(out, "{}", o.text);
                for w in &o.warnings {
                    let _ = writeln!(err, "warning: {w}");
                }
            }
            o.exit
        }
        Err(e) => {
            let code = exit_code(&e);
            let _ = writeln!(err, "error: {e}");
            if json_mode {
                let doc = json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            }
            code
        }
    }
}
