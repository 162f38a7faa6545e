//! The subcommands, as functions returning their output and exit status.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use catmn_core::fibered::{
    build_final_monad, build_initial_comonad, build_total_category, canonical_c2, check_extension_property,
    random_spec, trivial_spec, validate_spec, FiberedSpec, Limits, TotalCategory,
};
use catmn_core::maxnormal::{check_mn_hypotheses, run_mn_pipeline, MNPair, MnRun};
use catmn_core::monad::{ComonadDatum, MonadDatum};
use catmn_core::transport::{
    induce_comonad, induce_monad, powerset, validate_equivalence, verify_transfer, ContravariantEquivalence,
    TransportResult,
};
use catmn_core::{CatError, Category, ValidationReport};
use thiserror::Error;

use crate::dot::to_dot;
use crate::syntax::{parse_document, Document, ParseError};
use crate::workspace::{obj_names, spec_document, LoadError, Status, Workspace};

/// Exit status for a verification failure; 0 is success and 2 is reserved
/// for input errors.
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Load { path: PathBuf, source: LoadError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CatError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn new(text: String, ok: bool) -> Output {
        Output {
            text,
            code: if ok { 0 } else { EXIT_FAIL },
        }
    }
}

pub fn load(path: &Path) -> Result<(Document, Workspace), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let doc = parse_document(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let ws = Workspace::load(&doc, Some(path)).map_err(|source| CliError::Load {
        path: path.to_path_buf(),
        source,
    })?;
    Ok((doc, ws))
}

fn write_report(out: &mut String, report: &ValidationReport, indent: &str) {
    for v in report.violations() {
        writeln!(out, "{indent}- [{}] {}", v.check, v.witness).unwrap();
    }
    for n in report.notes() {
        writeln!(out, "{indent}note: {n}").unwrap();
    }
}

fn count(n: usize, what: &str) -> String {
    format!("{n} {what}{}", if n == 1 { "" } else { "s" })
}

/// Run the validator of every block.
///
/// One line per block, `<validator> <kind> <name>: ok|FAIL (n violations)|skipped (...)`,
/// followed by the indented violations of failing blocks.
pub fn cmd_validate(path: &Path) -> Result<Output, CliError> {
    let (_, ws) = load(path)?;
    let mut out = String::new();
    for o in &ws.outcomes {
        let verdict = match &o.status {
            Status::Valid => "ok".to_string(),
            Status::Invalid => format!("FAIL ({})", count(o.report.len(), "violation")),
            Status::Unvalidated { because } => format!("skipped (depends on {because}, which failed)"),
        };
        writeln!(out, "{} {} {}: {verdict}", o.validator, o.kind, o.name).unwrap();
        write_report(&mut out, &o.report, "  ");
    }
    Ok(Output::new(out, ws.all_passed()))
}

enum Verdict {
    Pass(ValidationReport),
    Fail(ValidationReport),
    Skipped(String),
    NotRun,
}

/// A stage table: `info` lines, then one row per stage, then a result line.
struct Table {
    title: String,
    info: Vec<String>,
    rows: Vec<(String, Verdict)>,
}

impl Table {
    fn new(title: String) -> Table {
        Table {
            title,
            info: Vec::new(),
            rows: Vec::new(),
        }
    }

    fn failed(&self) -> bool {
        self.rows.iter().any(|(_, v)| matches!(v, Verdict::Fail(_)))
    }

    /// Record a stage; returns whether it passed. Once a stage has failed,
    /// later stages are listed as not run.
    fn stage(&mut self, name: impl Into<String>, report: ValidationReport) -> bool {
        let name = name.into();
        if self.failed() {
            self.rows.push((name, Verdict::NotRun));
            return false;
        }
        let ok = report.is_empty();
        self.rows.push((name, if ok { Verdict::Pass(report) } else { Verdict::Fail(report) }));
        ok
    }

    fn result<T>(&mut self, name: &str, r: Result<T, CatError>) -> Option<T> {
        match r {
            Ok(v) => {
                self.stage(name, ValidationReport::new());
                Some(v)
            }
            Err(e) => {
                self.stage(name, error_report(e));
                None
            }
        }
    }

    fn skip(&mut self, name: impl Into<String>, why: impl Into<String>) {
        let v = if self.failed() { Verdict::NotRun } else { Verdict::Skipped(why.into()) };
        self.rows.push((name.into(), v));
    }

    fn not_run(&mut self, names: impl IntoIterator<Item = String>) {
        for n in names {
            self.rows.push((n, Verdict::NotRun));
        }
    }

    fn render(&self) -> Output {
        let mut out = String::new();
        writeln!(out, "{}", self.title).unwrap();
        for i in &self.info {
            writeln!(out, "  {i}").unwrap();
        }
        let width = self.rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(5);
        writeln!(out, "  {:width$}  result", "stage").unwrap();
        for (name, v) in &self.rows {
            let (word, report) = match v {
                Verdict::Pass(r) => ("ok".to_string(), Some(r)),
                Verdict::Fail(r) => (format!("FAIL ({})", count(r.len(), "violation")), Some(r)),
                Verdict::Skipped(why) => (format!("skipped ({why})"), None),
                Verdict::NotRun => ("not run".to_string(), None),
            };
            writeln!(out, "  {name:width$}  {word}").unwrap();
            if let Some(r) = report {
                write_report(&mut out, r, "    ");
            }
        }
        let failed = self.rows.iter().find(|(_, v)| matches!(v, Verdict::Fail(_)));
        match failed {
            None => writeln!(out, "result: pass").unwrap(),
            Some((name, _)) => writeln!(out, "result: FAIL (stage {name})").unwrap(),
        }
        Output::new(out, failed.is_none())
    }
}

fn error_report(e: CatError) -> ValidationReport {
    match e {
        CatError::Invalid { report, .. } => report,
        other => {
            let mut r = ValidationReport::new();
            r.push("error", other.to_string());
            r
        }
    }
}

fn pipeline_rows(table: &mut Table, prefix: &str, run: &MnRun) {
    for s in &run.stages {
        table.stage(format!("{prefix}{}", s.name), s.report.clone());
    }
    table.not_run(MnRun::STAGES[run.stages.len()..].iter().map(|s| format!("{prefix}{s}")));
}

const BUILD_STAGES: [&str; 5] = [
    "validation",
    "total_category",
    "extension_property",
    "final_monad",
    "initial_comonad",
];

/// Validate, build the total category and both (co)monads.
fn build_pair(table: &mut Table, spec: &FiberedSpec) -> Option<(TotalCategory, MonadDatum, ComonadDatum)> {
    if !table.stage("validation", validate_spec(spec)) {
        table.not_run(BUILD_STAGES[1..].iter().map(|s| s.to_string()));
        return None;
    }
    let Some(t) = table.result("total_category", build_total_category(spec)) else {
        table.not_run(BUILD_STAGES[2..].iter().map(|s| s.to_string()));
        return None;
    };
    table.info.push(format!(
        "total category: {}, {}",
        count(t.total().num_objects(), "object"),
        count(t.total().num_morphisms(), "morphism")
    ));
    table.stage("extension_property", check_extension_property(&t));
    let n = table.result("final_monad", build_final_monad(&t));
    let m = table.result("initial_comonad", build_initial_comonad(&t));
    Some((t, n?, m?))
}

fn fixed_line(c: &Category, label: &str, components: &[catmn_core::Mor]) -> String {
    let fixed: Vec<_> = c.objects().filter(|&x| c.is_isomorphism(components[x.index()])).collect();
    format!("fixed by {label}: {}: {}", count(fixed.len(), "object"), obj_names(c, fixed).join(" "))
}

fn pick_spec<'a>(ws: &'a Workspace, name: Option<&str>) -> Result<(String, &'a FiberedSpec), CliError> {
    match ws.spec(name) {
        Some((n, e)) => Ok((n.to_string(), e.value.as_ref().expect("specs are always assembled"))),
        None => Err(CliError::Usage(match name {
            Some(n) => format!("no spec named {n}"),
            None => "the document contains no SPEC block".into(),
        })),
    }
}

/// Build everything from a spec and run the maximal-normal pipeline.
pub fn mn_check_spec(name: &str, spec: &FiberedSpec) -> Output {
    let mut table = Table::new(format!("mn-check spec {name}"));
    let base = spec.base();
    table.info.push(format!(
        "base: {}, {}",
        count(base.num_objects(), "object"),
        count(base.num_morphisms(), "morphism")
    ));
    let Some((t, n, m)) = build_pair(&mut table, spec) else {
        table.not_run(MnRun::STAGES.iter().map(|s| s.to_string()));
        return table.render();
    };
    let c = t.total();
    table.info.push(fixed_line(c, "monad", n.unit().components()));
    table.info.push(fixed_line(c, "comonad", m.counit().components()));
    let yes = |b: bool| if b { "yes" } else { "no" };
    table.info.push(format!(
        "identity functors: monad {}, comonad {}",
        yes(n.functor().is_identity()),
        yes(m.functor().is_identity())
    ));
    let run = run_mn_pipeline(&n, &m);
    if let Some(e) = &run.equivalence {
        let bijective = |f: &catmn_core::Functor| {
            let mut seen: Vec<_> = f.obj_map().to_vec();
            seen.sort();
            seen.dedup();
            seen.len() == f.obj_map().len() && seen.len() == f.target().num_objects()
        };
        table.info.push(format!(
            "equivalence: {} <-> {}, object-bijective {}",
            count(e.forward.source().num_objects(), "object"),
            count(e.forward.target().num_objects(), "object"),
            yes(bijective(&e.forward) && bijective(&e.backward))
        ));
    }
    pipeline_rows(&mut table, "", &run);
    table.render()
}

pub fn cmd_mn_check(path: &Path, spec: Option<&str>) -> Result<Output, CliError> {
    let (_, ws) = load(path)?;
    let (name, s) = pick_spec(&ws, spec)?;
    Ok(mn_check_spec(&name, s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransportMode {
    RelabelOpposite,
    PowersetDualityDemo,
}

impl TransportMode {
    pub fn name(self) -> &'static str {
        match self {
            TransportMode::RelabelOpposite => "relabel-opposite",
            TransportMode::PowersetDualityDemo => "powerset-duality-demo",
        }
    }
}

const TRANSPORT_STAGES: [&str; 5] = [
    "equivalence",
    "induced_comonad",
    "induced_monad",
    "transfer",
    "hypotheses_transfer",
];

/// Transport `(n, m)` along `e`, check the transfer, and run the pipeline
/// on the induced pair when the hypotheses hold on the source side.
fn transport_rows(table: &mut Table, e: &ContravariantEquivalence, n: &MonadDatum, m: &ComonadDatum) {
    if !table.stage("equivalence", validate_equivalence(e)) {
        table.not_run(TRANSPORT_STAGES[1..].iter().map(|s| s.to_string()));
        table.not_run(MnRun::STAGES.iter().map(|s| format!("D.{s}")));
        return;
    }
    let t = table.result("induced_comonad", induce_comonad(e, n));
    let s = table.result("induced_monad", induce_monad(e, m));
    let (Some(t), Some(s)) = (t, s) else {
        table.not_run(TRANSPORT_STAGES[3..].iter().map(|s| s.to_string()));
        table.not_run(MnRun::STAGES.iter().map(|s| format!("D.{s}")));
        return;
    };
    let d = e.d();
    table.info.push(fixed_line(d, "induced monad S", s.unit().components()));
    table.info.push(fixed_line(d, "induced comonad T", t.counit().components()));
    let r = TransportResult {
        induced_comonad: t,
        induced_monad: s,
    };
    table.stage("transfer", verify_transfer(e, n, m, &r));

    let hyp_c = MNPair::new(n, m).map(|p| check_mn_hypotheses(&p));
    let hyp_d = MNPair::new(&r.induced_monad, &r.induced_comonad).map(|p| check_mn_hypotheses(&p));
    let (hyp_c, hyp_d) = match (hyp_c, hyp_d) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(err), _) | (_, Err(err)) => {
            table.stage("hypotheses_transfer", error_report(err));
            table.not_run(MnRun::STAGES.iter().map(|s| format!("D.{s}")));
            return;
        }
    };
    let mut report = ValidationReport::new();
    if hyp_c.is_empty() && !hyp_d.is_empty() {
        report.push("hypotheses.transfer", "hypotheses hold on C but fail on D");
        report.extend_scoped("D", hyp_d);
    } else if !hyp_c.is_empty() {
        report.note("maximal-normal hypotheses fail on C, nothing to transfer");
    }
    table.stage("hypotheses_transfer", report);
    if hyp_c.is_empty() {
        let run = run_mn_pipeline(&r.induced_monad, &r.induced_comonad);
        pipeline_rows(table, "D.", &run);
    } else {
        table.skip("D.pipeline", "hypotheses fail on C");
    }
}

pub fn transport_spec(name: &str, spec: &FiberedSpec, mode: TransportMode) -> Output {
    let mut table = Table::new(format!("transport spec {name} ({})", mode.name()));
    match mode {
        TransportMode::RelabelOpposite => {
            let Some((t, n, m)) = build_pair(&mut table, spec) else {
                table.not_run(TRANSPORT_STAGES.iter().map(|s| s.to_string()));
                return table.render();
            };
            let e = ContravariantEquivalence::relabeled_opposite(t.total());
            transport_rows(&mut table, &e, &n, &m);
        }
        TransportMode::PowersetDualityDemo => {
            // The spec only serves as a size gate here; the instance is built in.
            if !table.stage("validation", validate_spec(spec))
                || table.result("total_category", build_total_category(spec)).is_none()
            {
                table.not_run(TRANSPORT_STAGES.iter().map(|s| s.to_string()));
                return table.render();
            }
            let e = match powerset::equivalence() {
                Ok(e) => e,
                Err(err) => {
                    table.stage("equivalence", error_report(err));
                    return table.render();
                }
            };
            table.info.push(format!(
                "C = finite sets {{1}}, {{1,2}}: {}; D = their powerset algebras: {}",
                count(e.c().num_morphisms(), "morphism"),
                count(e.d().num_morphisms(), "morphism")
            ));
            let n = match powerset::terminal_monad(e.c()) {
                Ok(n) => n,
                Err(err) => {
                    table.stage("equivalence", error_report(err));
                    return table.render();
                }
            };
            let m = ComonadDatum::identity(e.c().clone());
            transport_rows(&mut table, &e, &n, &m);
        }
    }
    table.render()
}

pub fn cmd_transport(path: &Path, mode: TransportMode, spec: Option<&str>) -> Result<Output, CliError> {
    let (_, ws) = load(path)?;
    let (name, s) = pick_spec(&ws, spec)?;
    Ok(transport_spec(&name, s, mode))
}

/// DOT for the named (or first) spec's total category, or else the named
/// (or first) category of the document.
pub fn cmd_export_dot(path: &Path, name: Option<&str>) -> Result<Output, CliError> {
    let (doc, ws) = load(path)?;
    let spec = match name {
        Some(n) => ws.specs.contains_key(n).then_some(n),
        None => ws.spec_order.first().map(|(n, _)| n.as_str()),
    };
    if let Some(n) = spec {
        let s = ws.specs[n].value.as_ref().expect("assembled");
        return Ok(match build_total_category(s) {
            Ok(t) => {
                let c = t.total();
                let flags = |comps: Option<&[catmn_core::Mor]>| -> Vec<bool> {
                    match comps {
                        Some(cs) => cs.iter().map(|&m| c.is_isomorphism(m)).collect(),
                        None => Vec::new(),
                    }
                };
                let n_fixed = build_final_monad(&t).ok();
                let m_fixed = build_initial_comonad(&t).ok();
                Output::new(
                    to_dot(
                        n,
                        c,
                        &flags(n_fixed.as_ref().map(|d| d.unit().components())),
                        &flags(m_fixed.as_ref().map(|d| d.counit().components())),
                    ),
                    true,
                )
            }
            Err(e) => {
                let mut out = format!("export-dot spec {n}: cannot build the total category\n");
                write_report(&mut out, &error_report(e), "  ");
                Output::new(out, false)
            }
        });
    }
    let cat_name = match name {
        Some(n) if ws.categories.contains_key(n) => n.to_string(),
        Some(n) => return Err(CliError::Usage(format!("no spec or category named {n}"))),
        None => doc
            .blocks
            .iter()
            .find(|b| b.kind() == "category")
            .map(|b| b.name().to_string())
            .ok_or_else(|| CliError::Usage("the document contains no CATEGORY or SPEC block".into()))?,
    };
    let c: Arc<Category> = ws.categories[&cat_name].value.clone().expect("assembled");
    let (by_monad, by_comonad) = ws.fixed_objects(&c);
    Ok(Output::new(to_dot(&cat_name, &c, &by_monad, &by_comonad), true))
}

pub fn cmd_random(seed: u64, limits: Limits, json: bool) -> Result<Output, CliError> {
    let s = random_spec(seed, limits)?;
    let doc = spec_document(&format!("random{seed}"), "B", &s);
    let text = if json { doc.to_json() } else { doc.to_string() };
    Ok(Output::new(text, true))
}

/// Re-emit a document in canonical text or JSON form.
pub fn cmd_convert(path: &Path, json: bool) -> Result<Output, CliError> {
    let (doc, _) = load(path)?;
    Ok(Output::new(if json { doc.to_json() } else { doc.to_string() }, true))
}

pub fn demo_specs() -> Vec<(&'static str, FiberedSpec)> {
    vec![("c2", canonical_c2()), ("trivial", trivial_spec())]
}

/// mn-check and both transport modes on the built-in fixtures.
pub fn cmd_demo() -> Output {
    let mut text = String::new();
    let mut ok = true;
    for (name, spec) in demo_specs() {
        for out in [
            mn_check_spec(name, &spec),
            transport_spec(name, &spec, TransportMode::RelabelOpposite),
            transport_spec(name, &spec, TransportMode::PowersetDualityDemo),
        ] {
            ok &= out.code == 0;
            text.push_str(&out.text);
            text.push('\n');
        }
    }
    writeln!(text, "demo: {}", if ok { "pass" } else { "FAIL" }).unwrap();
    Output::new(text, ok)
}
