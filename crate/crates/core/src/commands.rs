//! The command-line surface as a library: every command takes a resolved
//! document and flags, and returns the exit code with the text for stdout
//! and stderr.
//!
//! Exit codes: 0 when the property holds or the computation succeeded, 1
//! when it is refuted (the report carries a witness) or an `--expect` check
//! fails, 2 on input errors, 3 when a resource budget is exceeded.
//!
//! Arguments come from the first `run COMMAND { ... }` directive of the
//! document, overridden by `--arg key=value`. Where a document declares a
//! single presentation, algebra, space or signature, it is the default.
//! `--expect path=value` compares a field of the JSON report, addressed by
//! dot-separated keys and array indices, with `value`.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::dist::Dist;
use crate::dsl::{self, Diagnostic, Name, Resolved, RunDecl, Value};
use crate::equations::{
    presentation_from_monad_with_budget, reflect_hypotheses, variety_membership, Equation, Presentation,
    DEFAULT_SUBSTITUTION_BUDGET,
};
use crate::error::Error;
use crate::free::{compare_with_oracle, free_algebra_with_budget, DEFAULT_CLASS_BUDGET};
use crate::metric::{check_colimit_conditions, directed_colimit, hausdorff_distance, MetricSpace, NonexpandingMap};
use crate::monads::{self, MonadInstance, MonadModel};
use crate::terms::enumerate_terms;

pub const SCHEMA_VERSION: u32 = 1;

pub const COMMANDS: &[&str] = &[
    "check-sat",
    "free",
    "reflect",
    "monad-laws",
    "monad-check",
    "hausdorff",
    "colimit",
    "enumerate-terms",
    "presentation-from-monad",
];

const DEFAULT_DEPTH: usize = 3;
const DEFAULT_TERM_BUDGET: usize = 100_000;
const LISTED_TERMS: usize = 50;

#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub json: bool,
    pub depth: Option<usize>,
    pub budget: Option<usize>,
    pub oracle: Option<String>,
    pub seed: Option<u64>,
    /// `path=value` checks on the report.
    pub expect: Vec<String>,
    /// `key=value` overrides, in `.qalg` value syntax.
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Diagnostic(Diagnostic),
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<Diagnostic> for Failure {
    fn from(d: Diagnostic) -> Self {
        Failure::Diagnostic(d)
    }
}

type CResult<T> = Result<T, Failure>;

/// A finished command: its report, whether the property held, and a human
/// summary.
struct Done {
    report: Json,
    holds: bool,
    text: String,
}

fn to_json<T: Serialize>(v: &T) -> Json {
    serde_json::to_value(v).unwrap_or(Json::Null)
}

struct Args<'a> {
    doc: &'a Resolved,
    items: Vec<(Name, Value)>,
}

impl<'a> Args<'a> {
    fn get(&self, key: &str) -> Option<&Value> {
        self.items.iter().rev().find(|(k, _)| k.text == key).map(|(_, v)| v)
    }

    fn name(&self, key: &str) -> CResult<Option<String>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Name(n)) => Ok(Some(n.text.clone())),
            Some(Value::Dist(d)) => Ok(Some(d.to_string())),
            Some(Value::List(_)) => Err(Failure::Usage(format!("`{key}` must be a name, not a list"))),
        }
    }

    fn required(&self, key: &str) -> CResult<String> {
        self.name(key)?
            .ok_or_else(|| Failure::Usage(format!("missing argument `{key}`")))
    }

    fn dist(&self, key: &str) -> CResult<Option<Dist>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Dist(d)) => Ok(Some(*d)),
            Some(_) => Err(Failure::Usage(format!("`{key}` must be a distance"))),
        }
    }

    fn natural(&self, key: &str) -> CResult<Option<usize>> {
        match self.dist(key)? {
            None => Ok(None),
            Some(d) => match d.parts() {
                Some((n, 1)) => Ok(Some(n as usize)),
                _ => Err(Failure::Usage(format!("`{key}` must be a natural number"))),
            },
        }
    }

    fn names(&self, key: &str) -> CResult<Vec<String>> {
        match self.get(key) {
            None => Err(Failure::Usage(format!("missing argument `{key}`"))),
            Some(Value::List(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Name(n) => Ok(n.text.clone()),
                    Value::Dist(d) => Ok(d.to_string()),
                    Value::List(_) => Err(Failure::Usage(format!("`{key}` must be a flat list"))),
                })
                .collect(),
            Some(Value::Name(n)) => Ok(vec![n.text.clone()]),
            Some(Value::Dist(d)) => Ok(vec![d.to_string()]),
        }
    }

    fn pick<T>(&self, key: &str, kind: &str, items: &'a [(String, T)]) -> CResult<&'a T> {
        match self.name(key)? {
            Some(n) => items
                .iter()
                .find(|(m, _)| *m == n)
                .map(|(_, v)| v)
                .ok_or_else(|| Failure::Usage(format!("no {kind} named `{n}`"))),
            None if items.len() == 1 => Ok(&items[0].1),
            None if items.is_empty() => Err(Failure::Usage(format!("the document declares no {kind}"))),
            None => Err(Failure::Usage(format!(
                "the document declares several {kind}s; choose one with `{key}`"
            ))),
        }
    }

    fn space(&self, key: &str) -> CResult<&'a Arc<MetricSpace>> {
        self.pick(key, "space", &self.doc.spaces)
    }

    fn map(&self, name: &str) -> CResult<&'a NonexpandingMap> {
        self.doc
            .map(name)
            .ok_or_else(|| Failure::Usage(format!("no map named `{name}`")))
    }

    fn monad(&self, flags: &Flags) -> CResult<Box<dyn MonadInstance>> {
        let name = self.required("monad")?;
        let size = self.natural("size")?.unwrap_or(flags.depth.unwrap_or(DEFAULT_DEPTH));
        let eps = self.dist("eps")?.unwrap_or(Dist::ratio(1, 2));
        monads::by_name(&name, size, eps).ok_or_else(|| {
            Failure::Usage(format!(
                "unknown monad `{name}` (known: {})",
                monads::INSTANCE_NAMES.join(", ")
            ))
        })
    }
}

/// Parses `key=value` with the value in `.qalg` syntax.
pub fn parse_arg(arg: &str) -> Result<(Name, Value), Diagnostic> {
    let doc = dsl::parse(&format!("run arg {{ {arg} }}"))?;
    match doc.blocks.as_slice() {
        [dsl::Block::Run(r)] if r.args.len() == 1 => Ok(r.args[0].clone()),
        _ => Err(Diagnostic::new(
            dsl::DiagnosticKind::Syntax,
            dsl::Pos { line: 1, col: 1 },
            format!("expected one `key=value`, found `{arg}`"),
        )),
    }
}

fn space_text(name: &str, m: &MetricSpace) -> String {
    dsl::print(&dsl::Document {
        blocks: vec![dsl::Block::Space(dsl::space_decl(name, m))],
    })
}

fn space_json(m: &MetricSpace) -> Json {
    let mut d = Vec::new();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if m.d(i, j).is_finite() {
                d.push(json!([m.label(i), m.label(j), m.d(i, j)]));
            }
        }
    }
    json!({ "points": m.labels(), "distances": d })
}

fn check_sat(a: &Args) -> CResult<Done> {
    let alg_name = a.name("algebra")?;
    let alg = a.pick("algebra", "algebra", &a.doc.algebras)?;
    let p = a.pick("presentation", "presentation", &a.doc.presentations)?;
    let failure = variety_membership(alg, p)?;
    let mut text = String::new();
    match &failure {
        None => {
            let _ = writeln!(
                text,
                "{} satisfies all {} equations of {}",
                alg_name.as_deref().unwrap_or("the algebra"),
                p.equations.len(),
                p.name
            );
        }
        Some(f) => {
            let _ = writeln!(text, "equation {} fails: {}", f.equation, f.text);
            let _ = writeln!(text, "witness: {}", f.witness);
        }
    }
    Ok(Done {
        report: json!({
            "presentation": p.name,
            "equations": p.equations.len(),
            "holds": failure.is_none(),
            "failure": failure,
        }),
        holds: failure.is_none(),
        text,
    })
}

fn free(a: &Args, flags: &Flags) -> CResult<Done> {
    let p = a.pick("presentation", "presentation", &a.doc.presentations)?;
    let m = a.space("space")?.clone();
    let depth = flags.depth.unwrap_or(DEFAULT_DEPTH);
    let mut fa = free_algebra_with_budget(p, m.clone(), depth, flags.budget.unwrap_or(DEFAULT_CLASS_BUDGET))?;
    let mut holds = true;
    let mut oracle_json = Json::Null;
    let mut text = String::new();
    if let Some(name) = &flags.oracle {
        let size = a.natural("size")?.unwrap_or(depth + 1);
        let eps = a.dist("eps")?.unwrap_or(Dist::ratio(1, 2));
        let t = monads::by_name(name, size, eps).ok_or_else(|| Failure::Usage(format!("unknown oracle `{name}`")))?;
        let model = MonadModel::new(t.as_ref(), m.clone());
        let (r, _) = compare_with_oracle(&mut fa, &model);
        holds = r.matches();
        if holds {
            let _ = writeln!(text, "oracle {name} agrees on all {} classes", r.classes);
        } else {
            let _ = writeln!(text, "oracle {name} disagrees:");
            for s in r.mismatches.iter().chain(&r.unevaluable).take(10) {
                let _ = writeln!(text, "  {s}");
            }
            if !r.injective {
                let _ = writeln!(text, "  two classes have the same value");
            }
        }
        oracle_json = to_json(&r);
    }
    let report = fa.report();
    let _ = writeln!(
        text,
        "{} classes at depth {} ({})",
        report.classes.len(),
        depth,
        serde_json::to_value(report.exactness).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    );
    for (i, c) in report.classes.iter().enumerate().take(LISTED_TERMS) {
        let _ = writeln!(text, "  [{i}] {c}");
    }
    if report.classes.len() > LISTED_TERMS {
        let _ = writeln!(text, "  ... {} more", report.classes.len() - LISTED_TERMS);
    }
    let mut finite = Vec::new();
    for (i, row) in report.distances.iter().enumerate() {
        for (j, d) in row.iter().enumerate().skip(i + 1) {
            if d.is_finite() {
                finite.push(format!("  d([{i}], [{j}]) = {d}"));
            }
        }
    }
    let _ = writeln!(text, "{} pairs at finite distance", finite.len());
    for l in finite.iter().take(LISTED_TERMS) {
        let _ = writeln!(text, "{l}");
    }
    if finite.len() > LISTED_TERMS {
        let _ = writeln!(text, "  ...");
    }
    let mut j = to_json(&report);
    j["oracle"] = oracle_json;
    Ok(Done { report: j, holds, text })
}

fn reflect(a: &Args) -> CResult<Done> {
    let p: &Presentation = a.pick("presentation", "presentation", &a.doc.presentations)?;
    let only = a.natural("equation")?;
    let mut out = Vec::new();
    let mut text = String::new();
    for (i, e) in p.equations.iter().enumerate() {
        if only.is_some_and(|k| k != i) {
            continue;
        }
        let Equation::Hypotheses(h) = e else { continue };
        let r = reflect_hypotheses(h)?;
        let ctx = &r.equation.context;
        let basic = Equation::Basic(r.equation.clone());
        let shown = basic.display(&p.signature).to_string();
        let _ = writeln!(text, "equation {i}: {}", e.display(&p.signature));
        let _ = write!(text, "{}", space_text(&format!("ctx{i}"), ctx));
        let _ = writeln!(text, "{shown}");
        let mut d = serde_json::Map::new();
        for x in 0..ctx.len() {
            let mut row = serde_json::Map::new();
            for y in 0..ctx.len() {
                row.insert(ctx.label(y).to_string(), to_json(&ctx.d(x, y)));
            }
            d.insert(ctx.label(x).to_string(), Json::Object(row));
        }
        out.push(json!({
            "index": i,
            "context": { "points": ctx.labels(), "d": d },
            "map": h.vars.iter().zip(&r.map).map(|(v, &p)| json!([v, ctx.label(p)])).collect::<Vec<_>>(),
            "basic": shown,
        }));
    }
    if out.is_empty() {
        return Err(Failure::Usage(format!("{} has no hypothesis-list equations to reflect", p.name)));
    }
    Ok(Done {
        report: json!({ "presentation": p.name, "equations": out }),
        holds: true,
        text,
    })
}

fn monad_laws(a: &Args, flags: &Flags) -> CResult<Done> {
    let t = a.monad(flags)?;
    let m = a.space("space")?;
    let r = monads::check_monad_laws(t.as_ref(), m, flags.seed.unwrap_or(0))?;
    let mut text = format!(
        "{} on {} points (|TM| = {}): {}\n",
        r.instance,
        m.len(),
        r.tm_size,
        if r.holds() { "all laws hold" } else { "laws fail" }
    );
    for (law, n) in &r.checked {
        let _ = writeln!(text, "  {law}: {n} instances");
    }
    for f in &r.failures {
        let _ = writeln!(text, "  FAIL {} at {}: {} vs {}", f.law, f.element, f.left, f.right);
    }
    Ok(Done {
        report: to_json(&r),
        holds: r.holds(),
        text,
    })
}

fn monad_check(a: &Args, flags: &Flags) -> CResult<Done> {
    let t = a.monad(flags)?;
    let check = a.required("check")?;
    let (report, holds, text) = match check.as_str() {
        "enriched" => {
            let from = a.space("from")?;
            let to = a.space("to")?;
            let r = monads::check_enriched(t.as_ref(), from, to)?;
            let mut text = format!(
                "{}: {} pairs of maps, {} violations\n",
                r.instance,
                r.pairs,
                r.violations.len()
            );
            for v in r.violations.iter().take(5) {
                let _ = writeln!(
                    text,
                    "  d({}, {}) = {} but d(Tf, Tg) = {} at {}",
                    v.f, v.g, v.d_maps, v.d_lifted, v.witness
                );
            }
            (to_json(&r), r.holds(), text)
        }
        "surjection" => {
            let f = a.map(&a.required("map")?)?;
            let r = monads::check_preserves_surjections(t.as_ref(), f)?;
            let mut text = format!(
                "{}: image has {} of {} elements{}\n",
                r.instance,
                r.image,
                r.target,
                if r.input_surjective { "" } else { " (the input map is not surjective)" }
            );
            for m in &r.missing {
                let _ = writeln!(text, "  missing {m}");
            }
            if r.missing_count > r.missing.len() {
                let _ = writeln!(text, "  ... {} more", r.missing_count - r.missing.len());
            }
            (to_json(&r), r.holds(), text)
        }
        "precongruence" => {
            let m = a.space("space")?;
            let r = monads::check_precongruence_preservation(t.as_ref(), m)?;
            let mut text = format!(
                "{}: {} pairs, {} witnessed, {} without witness\n",
                r.instance,
                r.pairs_checked,
                r.witnesses.len(),
                r.failures.len()
            );
            for f in r.failures.iter().take(5) {
                let _ = writeln!(text, "  {} ~ {} at {}: {}", f.a, f.b, f.eps, f.reason);
            }
            (to_json(&r), r.holds(), text)
        }
        "colimit" => {
            let (spaces, maps) = chain(a)?;
            let r = monads::check_directed_colimit_preservation(t.as_ref(), &spaces, &maps)?;
            let mut text = format!("{}: stage sizes {:?}\n", r.instance, r.stage_sizes);
            for f in &r.comparison_failures {
                let _ = writeln!(text, "  {f}");
            }
            for p in r.diverging.iter().take(5) {
                let ds: Vec<String> = p.distances.iter().map(|d| d.to_string()).collect();
                let _ = writeln!(text, "  still shrinking: {}, {}: {}", p.pair.0, p.pair.1, ds.join(", "));
            }
            (to_json(&r), r.holds(), text)
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown check `{other}` (enriched, surjection, precongruence, colimit)"
            )))
        }
    };
    Ok(Done {
        report: json!({ "check": check, "holds": holds, "result": report }),
        holds,
        text,
    })
}

/// The chain `D_0 → D_1 → …` of the maps named by `chain`, or the single
/// space `space` when there are none.
fn chain(a: &Args) -> CResult<(Vec<MetricSpace>, Vec<Vec<usize>>)> {
    let names = match a.get("chain") {
        Some(_) => a.names("chain")?,
        None => Vec::new(),
    };
    if names.is_empty() {
        return Ok((vec![(**a.space("space")?).clone()], Vec::new()));
    }
    let maps: Vec<&NonexpandingMap> = names.iter().map(|n| a.map(n)).collect::<CResult<_>>()?;
    let mut spaces = vec![(**maps[0].dom()).clone()];
    for (i, f) in maps.iter().enumerate() {
        if i > 0 && **maps[i - 1].cod() != **f.dom() {
            return Err(Failure::Usage(format!(
                "`{}` does not start where `{}` ends",
                names[i],
                names[i - 1]
            )));
        }
        spaces.push((**f.cod()).clone());
    }
    Ok((spaces, maps.iter().map(|f| f.assignment().to_vec()).collect()))
}

fn colimit(a: &Args) -> CResult<Done> {
    let (spaces, maps) = chain(a)?;
    let c = directed_colimit(&spaces, &maps)?;
    let conditions = check_colimit_conditions(&spaces, &maps, &c);
    let mut text = space_text("colim", &c.space);
    for (i, leg) in c.cocone.iter().enumerate() {
        let parts: Vec<String> = leg
            .iter()
            .enumerate()
            .map(|(x, &y)| format!("{}->{}", spaces[i].label(x), c.space.label(y)))
            .collect();
        let _ = writeln!(text, "leg {i}: {}", parts.join(" "));
    }
    if let Err(e) = &conditions {
        let _ = writeln!(text, "conditions fail: {e}");
    }
    Ok(Done {
        report: json!({
            "stages": spaces.len(),
            "colimit": space_json(&c.space),
            "cocone": c.cocone,
            "conditions_hold": conditions.is_ok(),
            "conditions_error": conditions.err(),
        }),
        holds: true,
        text,
    })
}

fn hausdorff(a: &Args) -> CResult<Done> {
    let m = a.space("space")?;
    let pts = |key: &str| -> CResult<Vec<usize>> {
        a.names(key)?
            .iter()
            .map(|n| m.point(n).map_err(Failure::from))
            .collect()
    };
    let (l, r) = (pts("left")?, pts("right")?);
    let d = hausdorff_distance(m, &l, &r);
    let dir = |x: &[usize], y: &[usize]| {
        if x.is_empty() {
            Dist::ZERO
        } else {
            x.iter()
                .map(|&p| y.iter().map(|&q| m.d(p, q)).min().unwrap_or(Dist::INF))
                .max()
                .unwrap_or(Dist::ZERO)
        }
    };
    let show = |x: &[usize]| x.iter().map(|&p| m.label(p)).collect::<Vec<_>>().join(", ");
    let bound = a.dist("eps")?;
    let holds = bound.is_none_or(|e| d <= e);
    let mut text = format!("d_H({{{}}}, {{{}}}) = {d}\n", show(&l), show(&r));
    if let Some(e) = bound {
        let _ = writeln!(text, "{} {e}", if holds { "within" } else { "exceeds" });
    }
    Ok(Done {
        report: json!({
            "left": l.iter().map(|&p| m.label(p)).collect::<Vec<_>>(),
            "right": r.iter().map(|&p| m.label(p)).collect::<Vec<_>>(),
            "distance": d,
            "left_to_right": dir(&l, &r),
            "right_to_left": dir(&r, &l),
            "bound": bound,
            "holds": holds,
        }),
        holds,
        text,
    })
}

fn enumerate(a: &Args, flags: &Flags) -> CResult<Done> {
    let sig = a.pick("signature", "signature", &a.doc.signatures)?.clone();
    let m = a.space("space")?.clone();
    let depth = flags.depth.unwrap_or(DEFAULT_DEPTH);
    let ts = enumerate_terms(sig.clone(), m.clone(), depth, flags.budget.unwrap_or(DEFAULT_TERM_BUDGET))?;
    let mut by_height = vec![0usize; depth + 1];
    for t in ts.terms() {
        by_height[t.height().min(depth)] += 1;
    }
    let listed: Vec<String> = ts
        .terms()
        .iter()
        .take(LISTED_TERMS)
        .map(|t| t.display(&sig, m.labels()).to_string())
        .collect();
    let mut text = format!("{} terms of height <= {depth}\n", ts.len());
    for t in &listed {
        let _ = writeln!(text, "  {t}");
    }
    if ts.len() > listed.len() {
        let _ = writeln!(text, "  ... {} more", ts.len() - listed.len());
    }
    Ok(Done {
        report: json!({ "depth": depth, "count": ts.len(), "by_height": by_height, "terms": listed }),
        holds: true,
        text,
    })
}

fn from_monad(a: &Args, flags: &Flags) -> CResult<Done> {
    let t = a.monad(flags)?;
    let n_max = a.natural("n_max")?.unwrap_or(2);
    let cap = a.natural("cap")?.unwrap_or(16);
    let budget = flags.budget.unwrap_or(DEFAULT_SUBSTITUTION_BUDGET);
    let p = presentation_from_monad_with_budget(t.as_ref(), n_max, cap, budget)?;
    if p.metadata.substitution_budget_exhausted {
        return Err(Error::budget("substitution equations", budget).into());
    }
    let doc = dsl::presentation_document(&p.presentation, "monad");
    let document = dsl::print(&doc);
    let mut text = String::new();
    for l in &p.legend {
        let _ = writeln!(text, "# {} : {} = {}", l.symbol, l.arity, l.element);
    }
    let m = &p.metadata;
    let _ = writeln!(
        text,
        "# {} distance, {} substitution, {} unit equations{}",
        m.distance_equations,
        m.substitution_equations,
        m.unit_equations,
        if m.truncated { "; truncated" } else { "" }
    );
    text.push_str(&document);
    Ok(Done {
        report: json!({
            "monad": t.name(),
            "metadata": m,
            "legend": p.legend,
            "equations": p.presentation.equations.len(),
            "document": document,
        }),
        holds: true,
        text,
    })
}

fn lookup_path<'j>(mut v: &'j Json, path: &str) -> Option<&'j Json> {
    for key in path.split('.').filter(|k| !k.is_empty()) {
        v = match v {
            Json::Object(m) => m.get(key)?,
            Json::Array(items) => items.get(key.parse::<usize>().ok()?)?,
            _ => return None,
        };
    }
    Some(v)
}

fn scalar(v: &Json) -> String {
    match v {
        Json::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn dispatch(command: &str, a: &Args, flags: &Flags) -> CResult<Done> {
    match command {
        "check-sat" => check_sat(a),
        "free" => free(a, flags),
        "reflect" => reflect(a),
        "monad-laws" => monad_laws(a, flags),
        "monad-check" => monad_check(a, flags),
        "hausdorff" => hausdorff(a),
        "colimit" => colimit(a),
        "enumerate-terms" => enumerate(a, flags),
        "presentation-from-monad" => from_monad(a, flags),
        other => Err(Failure::Usage(format!(
            "unknown command `{other}` (known: {})",
            COMMANDS.join(", ")
        ))),
    }
}

fn error_outcome(command: &str, flags: &Flags, f: Failure) -> Outcome {
    let (code, status, message, detail) = match f {
        Failure::Diagnostic(d) => (2, "input_error", d.to_string(), to_json(&d)),
        Failure::Usage(m) => (2, "input_error", format!("error: {m}"), Json::Null),
        Failure::Lib(e) if e.is_budget() => (3, "budget_exceeded", format!("error: {e}"), Json::Null),
        Failure::Lib(e) => (2, "input_error", format!("error: {e}"), Json::Null),
    };
    let stdout = if flags.json {
        let j = json!({
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "status": status,
            "exit_code": code,
            "error": { "message": message, "diagnostic": detail },
        });
        format!("{}\n", serde_json::to_string_pretty(&j).unwrap_or_default())
    } else {
        String::new()
    };
    Outcome {
        code,
        stdout,
        stderr: format!("{message}\n"),
    }
}

/// Runs `command` on a parsed document.
pub fn run(command: &str, doc: &Resolved, flags: &Flags) -> Outcome {
    let directive: Option<&RunDecl> = doc.runs.iter().find(|r| r.command.text == command);
    let mut items = directive.map(|r| r.args.clone()).unwrap_or_default();
    for arg in &flags.args {
        match parse_arg(arg) {
            Ok(kv) => items.push(kv),
            Err(d) => return error_outcome(command, flags, Failure::Diagnostic(d)),
        }
    }
    let args = Args { doc, items };
    let done = match dispatch(command, &args, flags) {
        Ok(d) => d,
        Err(f) => return error_outcome(command, flags, f),
    };
    let mut mismatches = Vec::new();
    for e in &flags.expect {
        let Some((path, want)) = e.split_once('=') else {
            return error_outcome(
                command,
                flags,
                Failure::Usage(format!("`--expect {e}` is not of the form path=value")),
            );
        };
        let got = lookup_path(&done.report, path.trim()).map(scalar);
        if got.as_deref() != Some(want.trim()) {
            mismatches.push(json!({ "path": path.trim(), "expected": want.trim(), "actual": got }));
        }
    }
    let code = if done.holds && mismatches.is_empty() { 0 } else { 1 };
    let status = match (code, done.holds) {
        (0, _) => "ok",
        (_, false) => "refuted",
        _ => "expectation_failed",
    };
    let mut text = done.text;
    for m in &mismatches {
        let _ = writeln!(
            text,
            "expectation failed: {} is {}, expected {}",
            m["path"].as_str().unwrap_or(""),
            m["actual"].as_str().map(String::from).unwrap_or_else(|| "missing".into()),
            m["expected"].as_str().unwrap_or("")
        );
    }
    let stdout = if flags.json {
        let j = json!({
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "status": status,
            "exit_code": code,
            "report": done.report,
            "expectations": mismatches,
        });
        format!("{}\n", serde_json::to_string_pretty(&j).unwrap_or_default())
    } else {
        text
    };
    Outcome {
        code,
        stdout,
        stderr: String::new(),
    }
}

/// Parses `text` and runs `command` on it; parse and resolution errors
/// exit with code 2.
pub fn run_text(command: &str, text: &str, flags: &Flags) -> Outcome {
    match dsl::load(text) {
        Ok(doc) => run(command, &doc, flags),
        Err(d) => error_outcome(command, flags, Failure::Diagnostic(d)),
    }
}
