//! Batch front end shared by the `avlift` binary and the tests.
//!
//! Every subcommand consumes *items*. An item is a whitespace-separated list
//! of `key=value` fields, either given inline on the command line or one per
//! line of an `--input` file (`#` starts a comment). Command-line flags such
//! as `--g` supply default fields for every item.
//!
//! Record output is JSON with a `schema_version` field; see the README for
//! the per-subcommand layout.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dims::{self, DimError};
use crate::ec_arith::{self, CurveError, CurveSpec};
use crate::exact_seq::{self, Forcing, RankSolution, SequenceError};
use crate::isometry::{self, EndMatrix, EndRing, IsometryError, OrderElement};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

/// Coordinates accepted for ring parameters and matrix entries.
const COORD_LIMIT: i64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subcommand {
    LesSolve,
    Dims,
    EcAnalyze,
    EcDerivedEq,
    IsomCheck,
    IsomEnumerate,
    KernelReport,
}

impl Subcommand {
    pub const ALL: [Subcommand; 7] = [
        Subcommand::LesSolve,
        Subcommand::Dims,
        Subcommand::EcAnalyze,
        Subcommand::EcDerivedEq,
        Subcommand::IsomCheck,
        Subcommand::IsomEnumerate,
        Subcommand::KernelReport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::LesSolve => "les-solve",
            Subcommand::Dims => "dims",
            Subcommand::EcAnalyze => "ec-analyze",
            Subcommand::EcDerivedEq => "ec-derived-eq",
            Subcommand::IsomCheck => "isom-check",
            Subcommand::IsomEnumerate => "isom-enumerate",
            Subcommand::KernelReport => "kernel-report",
        }
    }

    fn allowed_fields(self) -> &'static [&'static str] {
        match self {
            Subcommand::LesSolve => &["dims", "left_closed", "right_open", "g", "paper_display"],
            Subcommand::Dims => &["g", "char"],
            Subcommand::EcAnalyze | Subcommand::KernelReport => &["p", "a", "b"],
            Subcommand::EcDerivedEq => &["e", "f"],
            Subcommand::IsomCheck => &["ring", "f"],
            Subcommand::IsomEnumerate => &["ring", "height"],
        }
    }
}

impl FromStr for Subcommand {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Subcommand::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::UnknownSubcommand(s.to_string()))
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Table,
    Record,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub input_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    /// Inline `key=value` fields forming a single item.
    pub fields: Vec<String>,
    pub g: Option<i64>,
    pub height: Option<i64>,
    pub paper_display: bool,
    pub characteristic: Option<i64>,
    /// `les-solve` only: exit with [`EXIT_INFEASIBLE`] when a sequence has no
    /// feasible rank profile.
    pub strict: bool,
}

impl RunConfig {
    pub fn new(subcommand: Subcommand) -> Self {
        RunConfig {
            subcommand,
            input_path: None,
            output_format: OutputFormat::Table,
            fields: Vec::new(),
            g: None,
            height: None,
            paper_display: false,
            characteristic: None,
            strict: false,
        }
    }

    pub fn with_fields<I, S>(mut self, fields: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.fields = fields.into_iter().map(Into::into).collect();
        self
    }

    pub fn record(mut self) -> Self {
        self.output_format = OutputFormat::Record;
        self
    }

    fn validate(&self) -> Result<(), CliError> {
        let sub = self.subcommand;
        let flag_ok = |flag: &str, allowed: &[Subcommand]| {
            if allowed.contains(&sub) {
                Ok(())
            } else {
                Err(CliError::bad(None, flag, format!("not accepted by `{sub}`")))
            }
        };
        if self.g.is_some() {
            flag_ok("--g", &[Subcommand::LesSolve, Subcommand::Dims])?;
        }
        if self.height.is_some() {
            flag_ok("--height", &[Subcommand::IsomEnumerate])?;
        }
        if self.paper_display {
            flag_ok("--paper-display", &[Subcommand::LesSolve])?;
        }
        if self.characteristic.is_some() {
            flag_ok("--char", &[Subcommand::Dims])?;
        }
        if self.strict {
            flag_ok("--strict", &[Subcommand::LesSolve])?;
        }
        if self.input_path.is_some() && !self.fields.is_empty() {
            return Err(CliError::bad(None, "--input", "cannot be combined with inline fields"));
        }
        Ok(())
    }

    fn flag_defaults(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if let Some(g) = self.g {
            out.push(("g", g.to_string()));
        }
        if let Some(h) = self.height {
            out.push(("height", h.to_string()));
        }
        if self.paper_display {
            out.push(("paper_display", "true".to_string()));
        }
        if let Some(c) = self.characteristic {
            out.push(("char", c.to_string()));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("unknown subcommand `{0}`")]
    UnknownSubcommand(String),
    #[error("{}field `{field}`: {message}", line_prefix(*.line))]
    BadInput {
        line: Option<usize>,
        field: String,
        message: String,
    },
    #[error("{}field `{field}`: {message}", line_prefix(*.line))]
    ResourceCap {
        line: Option<usize>,
        field: String,
        message: String,
    },
    #[error("{}sequence {dims:?} admits no exact rank profile", line_prefix(*.line))]
    Infeasible { line: Option<usize>, dims: Vec<usize> },
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

impl CliError {
    fn bad(line: Option<usize>, field: &str, message: impl Into<String>) -> Self {
        CliError::BadInput {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownSubcommand(_) | CliError::BadInput { .. } | CliError::Io { .. } => EXIT_BAD_INPUT,
            CliError::ResourceCap { .. } => EXIT_RESOURCE,
            CliError::Infeasible { .. } => EXIT_INFEASIBLE,
        }
    }
}

/// What [`run`] produced: an exit status and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone)]
struct Item {
    line: Option<usize>,
    fields: BTreeMap<String, String>,
}

impl Item {
    fn parse(line: Option<usize>, tokens: &[&str], allowed: &[&str]) -> Result<Self, CliError> {
        let mut fields = BTreeMap::new();
        for tok in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| CliError::bad(line, tok, "expected key=value"))?;
            if !allowed.contains(&key) {
                return Err(CliError::bad(
                    line,
                    key,
                    format!("unknown field (expected one of {})", allowed.join(", ")),
                ));
            }
            if fields.insert(key.to_string(), value.to_string()).is_some() {
                return Err(CliError::bad(line, key, "given twice"));
            }
        }
        Ok(Item { line, fields })
    }

    fn bad(&self, field: &str, message: impl Into<String>) -> CliError {
        CliError::bad(self.line, field, message)
    }

    fn cap(&self, field: &str, message: impl fmt::Display) -> CliError {
        CliError::ResourceCap {
            line: self.line,
            field: field.to_string(),
            message: message.to_string(),
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.fields.get(key).map(String::as_str)
    }

    fn int(&self, key: &str) -> Result<Option<i64>, CliError> {
        self.raw(key)
            .map(|v| {
                v.trim()
                    .parse::<i64>()
                    .map_err(|_| self.bad(key, format!("`{v}` is not an integer")))
            })
            .transpose()
    }

    fn require_int(&self, key: &str) -> Result<i64, CliError> {
        self.int(key)?.ok_or_else(|| self.bad(key, "missing"))
    }

    fn int_list(&self, key: &str) -> Result<Option<Vec<i64>>, CliError> {
        let Some(raw) = self.raw(key) else { return Ok(None) };
        raw.split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| self.bad(key, format!("`{t}` is not an integer")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn bool(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(self.bad(key, format!("`{v}` is not a boolean"))),
        }
    }
}

/// Result of one item: data and notes are kept apart.
#[derive(Debug, Clone, Serialize)]
struct ItemReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    input: BTreeMap<String, String>,
    data: Value,
    notes: Vec<String>,
    #[serde(skip)]
    table: String,
    #[serde(skip)]
    infeasible: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct Record<'a> {
    schema_version: u32,
    command: &'static str,
    results: &'a [ItemReport],
}

fn read_items(config: &RunConfig) -> Result<Vec<Item>, CliError> {
    let allowed = config.subcommand.allowed_fields();
    let mut items = match &config.input_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            let mut items = Vec::new();
            for (idx, line) in text.lines().enumerate() {
                let content = line.split('#').next().unwrap_or("").trim();
                if content.is_empty() {
                    continue;
                }
                let tokens: Vec<&str> = content.split_whitespace().collect();
                items.push(Item::parse(Some(idx + 1), &tokens, allowed)?);
            }
            items
        }
        None => {
            let tokens: Vec<&str> = config.fields.iter().map(String::as_str).collect();
            vec![Item::parse(None, &tokens, allowed)?]
        }
    };
    let defaults = config.flag_defaults();
    for item in &mut items {
        for (key, value) in &defaults {
            item.fields.entry(key.to_string()).or_insert_with(|| value.clone());
        }
    }
    Ok(items)
}

/// Runs one subcommand over all its items. Items are processed in parallel;
/// output follows input order and stops at the first failing item.
pub fn run(config: &RunConfig) -> RunOutput {
    match run_inner(config) {
        Ok(out) => out,
        Err(e) => RunOutput {
            exit_code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn run_inner(config: &RunConfig) -> Result<RunOutput, CliError> {
    config.validate()?;
    let items = read_items(config)?;
    let reports = items
        .par_iter()
        .map(|item| process(config.subcommand, item))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    let stdout = match config.output_format {
        OutputFormat::Record => {
            let record = Record {
                schema_version: SCHEMA_VERSION,
                command: config.subcommand.name(),
                results: &reports,
            };
            let mut s = serde_json::to_string_pretty(&record).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Table => {
            let mut s = String::new();
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    s.push('\n');
                }
                if let Some(l) = r.line {
                    s.push_str(&format!("# line {l}\n"));
                }
                s.push_str(&r.table);
                for n in &r.notes {
                    s.push_str(&format!("note: {n}\n"));
                }
            }
            s
        }
    };

    if config.strict {
        if let Some(r) = reports.iter().find(|r| r.infeasible.is_some()) {
            let err = CliError::Infeasible {
                line: r.line,
                dims: r.infeasible.clone().unwrap_or_default(),
            };
            return Ok(RunOutput {
                exit_code: err.exit_code(),
                stdout,
                stderr: format!("error: {err}\n"),
            });
        }
    }
    Ok(RunOutput {
        exit_code: EXIT_OK,
        stdout,
        stderr: String::new(),
    })
}

fn process(sub: Subcommand, item: &Item) -> Result<ItemReport, CliError> {
    let (data, table, notes, infeasible) = match sub {
        Subcommand::LesSolve => les_solve(item)?,
        Subcommand::Dims => dims_report(item)?,
        Subcommand::EcAnalyze => ec_analyze(item)?,
        Subcommand::EcDerivedEq => ec_derived_eq(item)?,
        Subcommand::IsomCheck => isom_check(item)?,
        Subcommand::IsomEnumerate => isom_enumerate(item)?,
        Subcommand::KernelReport => kernel(item)?,
    };
    Ok(ItemReport {
        line: item.line,
        input: item.fields.clone(),
        data,
        notes,
        table,
        infeasible,
    })
}

type Processed = (Value, String, Vec<String>, Option<Vec<usize>>);

fn dim_error(item: &Item, e: DimError) -> CliError {
    match e {
        DimError::GTooLarge(_) => item.cap("g", e),
        DimError::NonpositiveG(_) => item.bad("g", e.to_string()),
    }
}

fn sequence_error(item: &Item, e: SequenceError) -> CliError {
    match e {
        SequenceError::SearchSpaceTooLarge { .. } => item.cap("dims", e),
        _ => item.bad("dims", e.to_string()),
    }
}

fn les_solve(item: &Item) -> Result<Processed, CliError> {
    let from_g = item.int("g")?;
    let dims_given = item.int_list("dims")?;
    let paper_display = item.bool("paper_display", false)?;
    let spec = match (from_g, dims_given) {
        (Some(_), Some(_)) => return Err(item.bad("dims", "give either `dims` or `g`, not both")),
        (None, None) => return Err(item.bad("dims", "missing (or give `g`)")),
        (Some(g), None) => {
            if item.raw("left_closed").is_some() || item.raw("right_open").is_some() {
                return Err(item.bad("left_closed", "end markers are fixed when the sequence comes from `g`"));
            }
            dims::graph_les(g, paper_display).map_err(|e| dim_error(item, e))?
        }
        (None, Some(d)) => {
            if item.raw("paper_display").is_some() {
                return Err(item.bad("paper_display", "only meaningful together with `g`"));
            }
            let left_closed = item.bool("left_closed", true)?;
            let right_open = item.bool("right_open", true)?;
            exact_seq::build_sequence(&d, left_closed, right_open).map_err(|e| sequence_error(item, e))?
        }
    };

    let solution = exact_seq::solve_ranks(&spec);
    let graph = dims::recognize_graph_les(&spec);
    let mut notes = Vec::new();
    if !solution.is_feasible() {
        notes.push(format!(
            "no rank profile satisfies exactness: these dimensions cannot form an exact sequence (alternating sum {})",
            spec.euler_characteristic()
        ));
    }
    let label = |i: usize| {
        graph
            .map(|_| dims::GRAPH_LES_MAP_LABELS[i].to_string())
            .unwrap_or_else(|| format!("map {i}"))
    };
    if let Some((g, _)) = graph {
        if from_g.is_some() && paper_display && g.get() > 2 {
            notes.push(format!(
                "fourth term uses the printed 2g = {}; the rank-g normal bundle gives H1(N) of dimension g^2 = {}",
                2 * g.get(),
                g.get() * g.get()
            ));
        }
        for d in exact_seq::check_claims(&solution, &dims::graph_les_claims(g)) {
            notes.push(format!(
                "discrepancy with the stated lifting argument at g = {}: {d}",
                g.get()
            ));
        }
    }

    let maps: Vec<Value> = solution
        .classification
        .iter()
        .map(|c| {
            json!({
                "index": c.map,
                "label": label(c.map),
                "source_dim": c.source_dim,
                "target_dim": c.target_dim,
                "forced_rank": c.forced_rank,
                "injective": c.injective,
                "surjective": c.surjective,
                "zero": c.zero,
                "verdict": c.verdict(),
            })
        })
        .collect();
    let data = json!({
        "dims": spec.dims(),
        "left_closed": spec.left_closed(),
        "right_open": spec.right_open(),
        "graph_les": graph.map(|(g, paper)| json!({"g": g, "paper_display": paper})),
        "feasible": solution.is_feasible(),
        "profiles": solution.profiles,
        "maps": maps,
    });

    let table = les_table(&solution, &label);
    let infeasible = (!solution.is_feasible()).then(|| spec.dims().to_vec());
    Ok((data, table, notes, infeasible))
}

fn forcing_word(f: Forcing) -> &'static str {
    match f {
        Forcing::Always => "always",
        Forcing::Never => "never",
        Forcing::Varies => "varies",
    }
}

fn les_table(solution: &RankSolution, label: &dyn Fn(usize) -> String) -> String {
    let spec = &solution.spec;
    let mut s = format!(
        "sequence {}{:?}{}\n",
        if spec.left_closed() { "0 -> " } else { "" },
        spec.dims(),
        if spec.right_open() { " -> ..." } else { " -> 0" }
    );
    s.push_str(&format!("feasible profiles: {}\n", solution.profiles.len()));
    for p in &solution.profiles {
        s.push_str(&format!("  ranks {p:?}\n"));
    }
    if !solution.classification.is_empty() {
        s.push_str(&format!(
            "{:<14} {:>7} {:>5} {:>10} {:>10} {:>7}  verdict\n",
            "map", "dims", "rank", "injective", "surjective", "zero"
        ));
    }
    for c in &solution.classification {
        s.push_str(&format!(
            "{:<14} {:>7} {:>5} {:>10} {:>10} {:>7}  {}\n",
            label(c.map),
            format!("{}->{}", c.source_dim, c.target_dim),
            c.forced_rank.map(|r| r.to_string()).unwrap_or_else(|| "?".into()),
            forcing_word(c.injective),
            forcing_word(c.surjective),
            forcing_word(c.zero),
            c.verdict()
        ));
    }
    s
}

fn dims_report(item: &Item) -> Result<Processed, CliError> {
    let g = item.require_int("g")?;
    let characteristic = match item.int("char")? {
        Some(c) if c < 0 => return Err(item.bad("char", "characteristic must be 0 or a prime")),
        Some(c) if c != 0 && !ec_arith::is_prime(c as u64) => return Err(item.bad("char", format!("{c} is not prime"))),
        other => other.map(|c| c as u64),
    };
    let report = dims::dim_report(g, characteristic).map_err(|e| dim_error(item, e))?;
    let mut notes = Vec::new();
    if report.hkr_valid == Some(false) {
        notes.push(format!(
            "HKR needs char 0 or char > g; char {} <= g = {}, Hochschild values are the HKR formula only",
            characteristic.unwrap_or_default(),
            g
        ));
    }

    let gu = report.g.get();
    let mut s = format!("g = {gu}\n");
    s.push_str("hodge h^{p,q} (rows p, columns q)\n");
    s.push_str(&format!("{:>4}", "p\\q"));
    for q in 0..=gu {
        s.push_str(&format!(" {q:>8}"));
    }
    s.push('\n');
    for p in 0..=gu {
        s.push_str(&format!("{p:>4}"));
        for q in 0..=gu {
            s.push_str(&format!(" {:>8}", report.hodge[&(p, q)]));
        }
        s.push('\n');
    }
    for (n, h) in report.hochschild.iter().enumerate() {
        s.push_str(&format!("HH^{n} = {h}\n"));
    }
    let d = &report.deformation;
    s.push_str(&format!("formal_def_dim = {}\n", d.formal_def_dim));
    s.push_str(&format!("polarized_def_dim = {}\n", d.polarized_def_dim));
    s.push_str(&format!("aut_tangent_dim = {}\n", d.aut_tangent_dim));
    s.push_str(&format!("aut_obstruction_dim = {}\n", d.aut_obstruction_dim));
    s.push_str(&format!("extra_lift_tangent_dim = {}\n", report.extra_lift_tangent_dim));
    if let Some(v) = report.hkr_valid {
        s.push_str(&format!("hkr_valid = {v}\n"));
    }
    let data = serde_json::to_value(&report).expect("report serializes");
    Ok((data, s, notes, None))
}

fn curve_error(item: &Item, field: &str, e: CurveError) -> CliError {
    match e {
        CurveError::FieldTooLarge(_) => item.cap(field, e),
        _ => item.bad(field, e.to_string()),
    }
}

fn parse_curve_fields(item: &Item) -> Result<CurveSpec, CliError> {
    let p = item.require_int("p")?;
    let a = item.require_int("a")?;
    let b = item.require_int("b")?;
    ec_arith::parse_curve(p, a, b).map_err(|e| {
        let field = if matches!(e, CurveError::SingularCurve { .. }) {
            "a"
        } else {
            "p"
        };
        curve_error(item, field, e)
    })
}

fn parse_curve_triple(item: &Item, key: &str) -> Result<CurveSpec, CliError> {
    let v = item
        .int_list(key)?
        .ok_or_else(|| item.bad(key, "missing (expected p,a,b)"))?;
    let [p, a, b] = v[..] else {
        return Err(item.bad(key, format!("expected 3 integers p,a,b, got {}", v.len())));
    };
    ec_arith::parse_curve(p, a, b).map_err(|e| curve_error(item, key, e))
}

fn curve_notes(j: u64, p: u64) -> Vec<String> {
    match ec_arith::aut_order_geometric(j, p) {
        6 => vec!["j = 0: geometric automorphism group has order 6".to_string()],
        4 => vec!["j = 1728: geometric automorphism group has order 4".to_string()],
        _ => Vec::new(),
    }
}

fn ec_analyze(item: &Item) -> Result<Processed, CliError> {
    let curve = parse_curve_fields(item)?;
    let an = ec_arith::analyze(&curve).map_err(|e| curve_error(item, "p", e))?;
    let data = json!({
        "p": curve.p(),
        "a": curve.a(),
        "b": curve.b(),
        "point_count": an.point_count,
        "trace": an.trace,
        "p_rank": an.p_rank,
        "ordinary": an.ordinary,
        "j": an.j,
        "aut_order_geometric": an.aut_order_geometric,
        "aut_order_rational": an.aut_order_rational,
    });
    let table = format!(
        "curve y^2 = x^3 + {}x + {} over F_{}\n\
         N = {}\nt = {}\np_rank = {}\nordinary = {}\nj = {}\n\
         aut_order_geometric = {}\naut_order_rational (over F_p) = {}\n",
        curve.a(),
        curve.b(),
        curve.p(),
        an.point_count,
        an.trace,
        an.p_rank,
        an.ordinary,
        an.j,
        an.aut_order_geometric,
        an.aut_order_rational
    );
    Ok((data, table, curve_notes(an.j, curve.p()), None))
}

fn ec_derived_eq(item: &Item) -> Result<Processed, CliError> {
    let e = parse_curve_triple(item, "e")?;
    let f = parse_curve_triple(item, "f")?;
    let equivalent = ec_arith::derived_equivalent(&e, &f).map_err(|err| curve_error(item, "f", err))?;
    let ae = ec_arith::analyze(&e).map_err(|err| curve_error(item, "e", err))?;
    let af = ec_arith::analyze(&f).map_err(|err| curve_error(item, "f", err))?;
    let product_rank = ec_arith::product_p_rank(&[e, f]).map_err(|err| curve_error(item, "e", err))?;
    let over_base = ec_arith::isomorphic_over_base_field(&e, &f);

    let mut notes = vec![
        "derived equivalence is decided geometrically: equal j-invariants, i.e. isomorphic over the algebraic closure"
            .to_string(),
    ];
    if equivalent && !over_base {
        notes.push("the curves are twists: isomorphic over an extension of F_p but not over F_p itself".to_string());
    }
    let side = |c: &CurveSpec, a: &ec_arith::CurveAnalysis| json!({"p": c.p(), "a": c.a(), "b": c.b(), "j": a.j, "point_count": a.point_count, "trace": a.trace, "p_rank": a.p_rank});
    let data = json!({
        "e": side(&e, &ae),
        "f": side(&f, &af),
        "derived_equivalent": equivalent,
        "isomorphic_over_base_field": over_base,
        "p_rank_equal": ae.p_rank == af.p_rank,
        "product_p_rank": product_rank,
    });
    let table = format!(
        "E: y^2 = x^3 + {}x + {}  j = {}  p_rank = {}\n\
         F: y^2 = x^3 + {}x + {}  j = {}  p_rank = {}\n\
         over F_{}\nderived_equivalent = {}\nisomorphic_over_base_field = {}\nproduct_p_rank = {}\n",
        e.a(),
        e.b(),
        ae.j,
        ae.p_rank,
        f.a(),
        f.b(),
        af.j,
        af.p_rank,
        e.p(),
        equivalent,
        over_base,
        product_rank
    );
    Ok((data, table, notes, None))
}

fn parse_ring(item: &Item) -> Result<EndRing, CliError> {
    let raw = item.raw("ring").unwrap_or("int");
    let ring = match raw {
        "int" | "Z" => EndRing::Integers,
        "gaussian" => EndRing::gaussian(),
        "eisenstein" => EndRing::QuadraticOrder { b: 1, c: 1 },
        other => {
            let params = other.strip_prefix("quad:").ok_or_else(|| {
                item.bad(
                    "ring",
                    format!("`{other}`: expected int, gaussian, eisenstein or quad:B,C"),
                )
            })?;
            let bc: Vec<i64> = params
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<i64>()
                        .map_err(|_| item.bad("ring", format!("`{t}` is not an integer")))
                })
                .collect::<Result<_, _>>()?;
            let [b, c] = bc[..] else {
                return Err(item.bad("ring", "quad:B,C takes exactly two integers"));
            };
            if b.abs() > COORD_LIMIT || c.abs() > COORD_LIMIT {
                return Err(item.bad(
                    "ring",
                    format!("parameters must lie in [-{COORD_LIMIT}, {COORD_LIMIT}]"),
                ));
            }
            EndRing::quadratic(b, c).map_err(|e| item.bad("ring", e.to_string()))?
        }
    };
    Ok(ring)
}

fn ring_name(ring: EndRing) -> String {
    match ring {
        EndRing::Integers => "int".to_string(),
        EndRing::QuadraticOrder { b, c } => format!("quad:{b},{c}"),
    }
}

/// Flat coordinates: `a b c d` over `Z`, `a.u a.v b.u b.v ...` over an order.
fn matrix_coords(m: &EndMatrix) -> Vec<i64> {
    m.entries()
        .iter()
        .flat_map(|e| match m.ring {
            EndRing::Integers => vec![e.u],
            EndRing::QuadraticOrder { .. } => vec![e.u, e.v],
        })
        .collect()
}

fn isom_check(item: &Item) -> Result<Processed, CliError> {
    let ring = parse_ring(item)?;
    let coords = item.int_list("f")?.ok_or_else(|| item.bad("f", "missing"))?;
    let expected = 4 * ring.coords() as usize;
    if coords.len() != expected {
        return Err(item.bad(
            "f",
            format!(
                "expected {expected} integers for ring {}, got {}",
                ring_name(ring),
                coords.len()
            ),
        ));
    }
    if coords.iter().any(|c| c.abs() > COORD_LIMIT) {
        return Err(item.bad("f", format!("coordinates must lie in [-{COORD_LIMIT}, {COORD_LIMIT}]")));
    }
    let entries: Vec<OrderElement> = match ring {
        EndRing::Integers => coords.iter().map(|&u| OrderElement::int(u)).collect(),
        EndRing::QuadraticOrder { .. } => coords.chunks(2).map(|c| OrderElement { u: c[0], v: c[1] }).collect(),
    };
    let f = EndMatrix::new(ring, [entries[0], entries[1], entries[2], entries[3]])
        .map_err(|e| item.bad("f", e.to_string()))?;
    let h = isometry::hat(&f);
    let t = isometry::tilde(&f);
    let arith = |e: IsometryError| item.bad("f", e.to_string());
    let tf = isometry::multiply(&t, &f).map_err(arith)?;
    let ft = isometry::multiply(&f, &t).map_err(arith)?;
    let isometric = isometry::is_isometric(&f);
    let data = json!({
        "ring": ring_name(ring),
        "f": matrix_coords(&f),
        "hat": matrix_coords(&h),
        "tilde": matrix_coords(&t),
        "tilde_f": matrix_coords(&tf),
        "f_tilde": matrix_coords(&ft),
        "isometric": isometric,
    });
    let table = format!(
        "ring {ring}\nf       = {f}\nhat(f)  = {h}\ntilde(f)= {t}\ntilde(f)*f = {tf}\nf*tilde(f) = {ft}\nisometric = {isometric}\n"
    );
    Ok((data, table, Vec::new(), None))
}

fn isom_enumerate(item: &Item) -> Result<Processed, CliError> {
    let ring = parse_ring(item)?;
    let height = item.require_int("height")?;
    let height =
        u32::try_from(height).map_err(|_| item.bad("height", format!("{height} is not a nonnegative height")))?;
    let list = isometry::enumerate_isometric(ring, height).map_err(|e| match e {
        IsometryError::SearchSpaceTooLarge { .. } => item.cap("height", e),
        other => item.bad("height", other.to_string()),
    })?;
    let data = json!({
        "ring": ring_name(ring),
        "height": height,
        "count": list.len(),
        "matrices": list.iter().map(matrix_coords).collect::<Vec<_>>(),
    });
    let mut table = format!("ring {ring}, height {height}: {} isometric matrices\n", list.len());
    for m in &list {
        table.push_str(&format!("  {m}\n"));
    }
    Ok((data, table, Vec::new(), None))
}

fn kernel(item: &Item) -> Result<Processed, CliError> {
    let curve = parse_curve_fields(item)?;
    let report = isometry::kernel_report(&curve).map_err(|e| match e {
        IsometryError::Curve(c) => curve_error(item, "p", c),
        other => item.bad("p", other.to_string()),
    })?;
    let data = serde_json::to_value(report).expect("report serializes");
    let table = format!(
        "curve y^2 = x^3 + {}x + {} over F_{}\nfree_rank = {}\npoint_count = {}\nfinite_order = {}\n",
        curve.a(),
        curve.b(),
        curve.p(),
        report.free_rank,
        report.point_count,
        report.finite_order
    );
    Ok((data, table, Vec::new(), None))
}
