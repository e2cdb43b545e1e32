use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::{tuple_index, QuantAlgebra};
use crate::dist::Dist;
use crate::equations::{BasicEquation, Equation, HypothesisListEquation, Presentation, QuantEquation};
use crate::error::Error;
use crate::metric::{MetricSpace, NonexpandingMap};
use crate::terms::{Arity, Signature, Symbol, Term};

use super::ast::*;
use super::parser::{parse, Diagnostic, DiagnosticKind};

/// A document with every declaration turned into its library value, in
/// declaration order per kind.
#[derive(Clone, Debug, Default)]
pub struct Resolved {
    pub spaces: Vec<(String, Arc<MetricSpace>)>,
    pub signatures: Vec<(String, Arc<Signature>)>,
    pub algebras: Vec<(String, QuantAlgebra)>,
    pub presentations: Vec<(String, Presentation)>,
    pub maps: Vec<(String, NonexpandingMap)>,
    pub runs: Vec<RunDecl>,
}

fn lookup<'a, T>(items: &'a [(String, T)], name: &str) -> Option<&'a T> {
    items.iter().find(|(n, _)| n == name).map(|(_, v)| v)
}

impl Resolved {
    pub fn space(&self, name: &str) -> Option<&Arc<MetricSpace>> {
        lookup(&self.spaces, name)
    }

    pub fn signature(&self, name: &str) -> Option<&Arc<Signature>> {
        lookup(&self.signatures, name)
    }

    pub fn algebra(&self, name: &str) -> Option<&QuantAlgebra> {
        lookup(&self.algebras, name)
    }

    pub fn presentation(&self, name: &str) -> Option<&Presentation> {
        lookup(&self.presentations, name)
    }

    pub fn map(&self, name: &str) -> Option<&NonexpandingMap> {
        lookup(&self.maps, name)
    }
}

fn diag(pos: Pos, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::new(DiagnosticKind::Resolution, pos, msg)
}

fn lib(pos: Pos) -> impl Fn(Error) -> Diagnostic {
    move |e| diag(pos, e.to_string())
}

fn term_pos(t: &STerm) -> Pos {
    match t {
        STerm::Name(n) | STerm::App(n, _) => n.pos,
    }
}

/// How bare names in an equation are read.
struct Scope<'a> {
    sig: &'a Signature,
    vars: Vec<String>,
    /// Names bound before symbols are consulted.
    bound: usize,
    /// New names become variables; otherwise they are errors.
    open: bool,
    context: &'a str,
}

impl Scope<'_> {
    fn var(&mut self, n: &Name) -> Result<Term, Diagnostic> {
        if let Some(i) = self.vars.iter().position(|v| *v == n.text) {
            return Ok(Term::Var(i));
        }
        if !self.open {
            return Err(diag(n.pos, format!("`{}` is not a point of {}", n.text, self.context)));
        }
        self.vars.push(n.text.clone());
        Ok(Term::Var(self.vars.len() - 1))
    }

    fn term(&mut self, t: &STerm) -> Result<Term, Diagnostic> {
        match t {
            STerm::Name(n) => {
                if self.vars[..self.bound].contains(&n.text) {
                    return self.var(n);
                }
                match self.sig.get(&n.text) {
                    Some(op) if self.sig.arity(op).size() == 0 => Ok(Term::App(op, Vec::new())),
                    Some(op) => Err(diag(
                        n.pos,
                        format!("`{}` takes {} arguments", n.text, self.sig.arity(op).size()),
                    )),
                    None => self.var(n),
                }
            }
            STerm::App(n, args) => {
                let op = self
                    .sig
                    .get(&n.text)
                    .ok_or_else(|| diag(n.pos, format!("unknown symbol `{}`", n.text)))?;
                let want = self.sig.arity(op).size();
                if args.len() != want {
                    return Err(diag(
                        n.pos,
                        format!("`{}` takes {want} arguments, found {}", n.text, args.len()),
                    ));
                }
                let args = args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?;
                Ok(Term::App(op, args))
            }
        }
    }
}

fn resolve_equation(
    e: &EquationDecl,
    sig: &Signature,
    spaces: &[(String, Arc<MetricSpace>)],
) -> Result<Equation, Diagnostic> {
    let pos = term_pos(&e.lhs);
    match &e.context {
        Context::None => {
            let mut s = Scope {
                sig,
                vars: Vec::new(),
                bound: 0,
                open: true,
                context: "",
            };
            let (l, r) = (s.term(&e.lhs)?, s.term(&e.rhs)?);
            QuantEquation::new(s.vars, l, r, e.eps)
                .map(Equation::Plain)
                .map_err(lib(pos))
        }
        Context::Space(m) => {
            let space = lookup(spaces, &m.text).ok_or_else(|| diag(m.pos, format!("unknown space `{}`", m.text)))?;
            let ctx = format!("`{}`", m.text);
            let mut s = Scope {
                sig,
                vars: space.labels().to_vec(),
                bound: space.len(),
                open: false,
                context: &ctx,
            };
            let (l, r) = (s.term(&e.lhs)?, s.term(&e.rhs)?);
            BasicEquation::new(space.clone(), l, r, e.eps)
                .map(Equation::Basic)
                .map_err(lib(pos))
        }
        Context::Hypotheses(h) => {
            let mut vars: Vec<String> = Vec::new();
            for (x, _, y) in h {
                for n in [x, y] {
                    if !vars.contains(&n.text) {
                        vars.push(n.text.clone());
                    }
                }
            }
            let bound = vars.len();
            let mut s = Scope {
                sig,
                vars,
                bound,
                open: true,
                context: "",
            };
            let (l, r) = (s.term(&e.lhs)?, s.term(&e.rhs)?);
            let index = |n: &Name| s.vars.iter().position(|v| *v == n.text).unwrap_or(0);
            let hyps: Vec<(usize, usize, Dist)> = h.iter().map(|(x, d, y)| (index(x), index(y), *d)).collect();
            HypothesisListEquation::new(s.vars.clone(), hyps, l, r, e.eps)
                .map(Equation::Hypotheses)
                .map_err(lib(pos))
        }
    }
}

fn check_unique(doc: &Document) -> Result<(), Diagnostic> {
    let mut seen: HashMap<(&str, &str), Pos> = HashMap::new();
    for b in &doc.blocks {
        if matches!(b, Block::Run(_)) {
            continue;
        }
        let n = b.name();
        if let Some(first) = seen.insert((b.kind(), &n.text), n.pos) {
            return Err(diag(
                n.pos,
                format!(
                    "{} `{}` already declared at {}:{}",
                    b.kind(),
                    n.text,
                    first.line,
                    first.col
                ),
            ));
        }
    }
    Ok(())
}

fn point(space: &MetricSpace, n: &Name, space_name: &str) -> Result<usize, Diagnostic> {
    space
        .index_of(&n.text)
        .ok_or_else(|| diag(n.pos, format!("`{}` is not a point of `{space_name}`", n.text)))
}

/// Builds library values for every declaration. Declarations may refer to
/// each other in any order.
pub fn resolve(doc: &Document) -> Result<Resolved, Diagnostic> {
    check_unique(doc)?;
    let mut out = Resolved::default();
    for b in &doc.blocks {
        if let Block::Space(s) = b {
            let points: Vec<&str> = s.points.iter().map(|p| p.text.as_str()).collect();
            for (x, y, _) in &s.distances {
                for p in [x, y] {
                    if !points.contains(&p.text.as_str()) {
                        return Err(diag(p.pos, format!("`{}` is not a point of `{}`", p.text, s.name.text)));
                    }
                }
            }
            let pairs: Vec<(&str, &str, Dist)> = s
                .distances
                .iter()
                .map(|(x, y, d)| (x.text.as_str(), y.text.as_str(), *d))
                .collect();
            let space = MetricSpace::from_pairs(&points, &pairs).map_err(lib(s.name.pos))?;
            out.spaces.push((s.name.text.clone(), Arc::new(space)));
        }
    }
    for b in &doc.blocks {
        if let Block::Signature(s) = b {
            let mut symbols = Vec::new();
            for (sym, arity) in &s.symbols {
                let arity = match arity {
                    ArityExpr::Finite(n) => Arity::Finite(*n),
                    ArityExpr::Space(m) => Arity::Space(
                        out.space(&m.text)
                            .ok_or_else(|| diag(m.pos, format!("unknown space `{}`", m.text)))?
                            .clone(),
                    ),
                };
                symbols.push(Symbol {
                    name: sym.text.clone(),
                    arity,
                });
            }
            let sig = Signature::new(symbols).map_err(lib(s.name.pos))?;
            out.signatures.push((s.name.text.clone(), Arc::new(sig)));
        }
    }
    for b in &doc.blocks {
        match b {
            Block::Algebra(a) => {
                let sig = out
                    .signature(&a.signature.text)
                    .ok_or_else(|| diag(a.signature.pos, format!("unknown signature `{}`", a.signature.text)))?
                    .clone();
                let space = out
                    .space(&a.space.text)
                    .ok_or_else(|| diag(a.space.pos, format!("unknown space `{}`", a.space.text)))?
                    .clone();
                let n = space.len();
                let mut tables: Vec<Vec<Option<usize>>> = sig
                    .symbols()
                    .iter()
                    .map(|s| vec![None; n.pow(s.arity.size() as u32)])
                    .collect();
                for e in &a.entries {
                    let op = sig
                        .get(&e.op.text)
                        .ok_or_else(|| diag(e.op.pos, format!("unknown symbol `{}`", e.op.text)))?;
                    let k = sig.arity(op).size();
                    if e.args.len() != k {
                        return Err(diag(
                            e.op.pos,
                            format!("`{}` takes {k} arguments, found {}", e.op.text, e.args.len()),
                        ));
                    }
                    let args = e
                        .args
                        .iter()
                        .map(|x| point(&space, x, &a.space.text))
                        .collect::<Result<Vec<_>, _>>()?;
                    let v = point(&space, &e.value, &a.space.text)?;
                    let slot = &mut tables[op][tuple_index(n, &args)];
                    if slot.is_some_and(|old| old != v) {
                        return Err(diag(e.op.pos, format!("conflicting entries for `{}`", e.op.text)));
                    }
                    *slot = Some(v);
                }
                let alg = if a.partial {
                    QuantAlgebra::new_partial(sig, space, tables)
                } else {
                    QuantAlgebra::new(sig, space, tables)
                }
                .map_err(lib(a.name.pos))?;
                out.algebras.push((a.name.text.clone(), alg));
            }
            Block::Presentation(p) => {
                let sig = out
                    .signature(&p.signature.text)
                    .ok_or_else(|| diag(p.signature.pos, format!("unknown signature `{}`", p.signature.text)))?
                    .clone();
                let equations = p
                    .equations
                    .iter()
                    .map(|e| resolve_equation(e, &sig, &out.spaces))
                    .collect::<Result<Vec<_>, _>>()?;
                let pres = Presentation::new(p.name.text.clone(), sig, equations).map_err(lib(p.name.pos))?;
                out.presentations.push((p.name.text.clone(), pres));
            }
            Block::Map(m) => {
                let dom = out
                    .space(&m.dom.text)
                    .ok_or_else(|| diag(m.dom.pos, format!("unknown space `{}`", m.dom.text)))?
                    .clone();
                let cod = out
                    .space(&m.cod.text)
                    .ok_or_else(|| diag(m.cod.pos, format!("unknown space `{}`", m.cod.text)))?
                    .clone();
                let mut assignment = vec![None; dom.len()];
                for (x, y) in &m.pairs {
                    let i = point(&dom, x, &m.dom.text)?;
                    let j = point(&cod, y, &m.cod.text)?;
                    if assignment[i].is_some_and(|old| old != j) {
                        return Err(diag(x.pos, format!("`{}` is mapped twice", x.text)));
                    }
                    assignment[i] = Some(j);
                }
                let assignment = assignment
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a.ok_or_else(|| diag(m.name.pos, format!("`{}` is not mapped", dom.label(i)))))
                    .collect::<Result<Vec<_>, _>>()?;
                let f = NonexpandingMap::new(dom, cod, assignment).map_err(lib(m.name.pos))?;
                out.maps.push((m.name.text.clone(), f));
            }
            Block::Run(r) => out.runs.push(r.clone()),
            _ => {}
        }
    }
    Ok(out)
}

/// Parses and resolves.
pub fn load(text: &str) -> Result<Resolved, Diagnostic> {
    resolve(&parse(text)?)
}

fn name_of(s: &str) -> Name {
    Name::new(s)
}

pub fn space_decl(name: &str, m: &MetricSpace) -> SpaceDecl {
    let mut distances = Vec::new();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if m.d(i, j).is_finite() {
                distances.push((name_of(m.label(i)), name_of(m.label(j)), m.d(i, j)));
            }
        }
    }
    SpaceDecl {
        name: name_of(name),
        points: m.labels().iter().map(|l| name_of(l)).collect(),
        distances,
    }
}

fn sterm(t: &Term, sig: &Signature, vars: &[String]) -> STerm {
    match t {
        Term::Var(x) => STerm::Name(name_of(&vars[*x])),
        Term::App(op, args) if args.is_empty() => STerm::Name(name_of(&sig.symbol(*op).name)),
        Term::App(op, args) => STerm::App(
            name_of(&sig.symbol(*op).name),
            args.iter().map(|a| sterm(a, sig, vars)).collect(),
        ),
    }
}

/// A document declaring `p`'s signature, the spaces it needs, and `p`.
/// Spaces are named `{prefix}_arity_i` and `{prefix}_ctx_i`.
pub fn presentation_document(p: &Presentation, prefix: &str) -> Document {
    let mut blocks = Vec::new();
    let sig_name = format!("{prefix}_sig");
    let mut symbols = Vec::new();
    for (i, s) in p.signature.symbols().iter().enumerate() {
        let arity = match &s.arity {
            Arity::Finite(n) => ArityExpr::Finite(*n),
            Arity::Space(m) => {
                let space = format!("{prefix}_arity_{i}");
                blocks.push(Block::Space(space_decl(&space, m)));
                ArityExpr::Space(name_of(&space))
            }
        };
        symbols.push((name_of(&s.name), arity));
    }
    blocks.push(Block::Signature(SignatureDecl {
        name: name_of(&sig_name),
        symbols,
    }));
    let mut equations = Vec::new();
    for (i, e) in p.equations.iter().enumerate() {
        let (l, r, eps) = e.sides();
        let vars = e.var_names();
        let context = match e {
            Equation::Plain(_) => Context::None,
            Equation::Basic(b) => {
                let space = format!("{prefix}_ctx_{i}");
                blocks.push(Block::Space(space_decl(&space, &b.context)));
                Context::Space(name_of(&space))
            }
            Equation::Hypotheses(h) => Context::Hypotheses(
                h.hypotheses
                    .iter()
                    .map(|&(x, y, d)| (name_of(&h.vars[x]), d, name_of(&h.vars[y])))
                    .collect(),
            ),
        };
        equations.push(EquationDecl {
            context,
            lhs: sterm(l, &p.signature, vars),
            eps,
            rhs: sterm(r, &p.signature, vars),
        });
    }
    blocks.push(Block::Presentation(PresentationDecl {
        name: name_of(&p.name),
        signature: name_of(&sig_name),
        equations,
    }));
    Document { blocks }
}
