use std::fmt::Write as _;

use super::ast::*;
use super::parser::is_op_char;

fn bare_ident(s: &str) -> bool {
    let mut chars = s.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    let all: Vec<char> = s.chars().collect();
    (first.is_alphabetic() || first == '_')
        && all.iter().enumerate().all(|(i, &c)| {
            c.is_alphanumeric()
                || c == '_'
                || c == '\''
                || (c == '-' && all.get(i + 1).is_some_and(|d| d.is_alphanumeric()))
        })
        && s != "inf"
}

fn is_symbolic(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_op_char)
}

/// A name as it must be written where symbolic operators are not allowed.
fn name(s: &str) -> String {
    if bare_ident(s) || (!s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())) {
        s.to_string()
    } else {
        format!("\"{s}\"")
    }
}

fn symbol(s: &str) -> String {
    if is_symbolic(s) {
        s.to_string()
    } else {
        name(s)
    }
}

fn infix(t: &STerm) -> bool {
    matches!(t, STerm::App(op, args) if args.len() == 2 && is_symbolic(&op.text))
}

pub fn print_term(t: &STerm) -> String {
    match t {
        STerm::Name(n) => name(&n.text),
        STerm::App(op, args) if infix(t) => {
            let side = |a: &STerm| {
                if infix(a) {
                    format!("({})", print_term(a))
                } else {
                    print_term(a)
                }
            };
            format!("{} {} {}", side(&args[0]), op.text, side(&args[1]))
        }
        STerm::App(op, args) => {
            let inner: Vec<String> = args.iter().map(print_term).collect();
            format!("{}({})", symbol(&op.text), inner.join(", "))
        }
    }
}

pub fn print_equation(e: &EquationDecl) -> String {
    let mut s = String::new();
    match &e.context {
        Context::None => {}
        Context::Space(m) => {
            let _ = write!(s, "{} |- ", name(&m.text));
        }
        Context::Hypotheses(h) => {
            let hyps: Vec<String> = h
                .iter()
                .map(|(x, d, y)| format!("{} ~[{d}] {}", name(&x.text), name(&y.text)))
                .collect();
            let _ = write!(s, "{} |- ", hyps.join(", "));
        }
    }
    let _ = write!(s, "{} =[{}] {}", print_term(&e.lhs), e.eps, print_term(&e.rhs));
    s
}

fn print_value(v: &Value) -> String {
    match v {
        Value::Name(n) if n.text.bytes().all(|b| b.is_ascii_digit()) => format!("\"{}\"", n.text),
        Value::Name(n) => symbol(&n.text),
        Value::Dist(d) => d.to_string(),
        Value::List(items) => {
            let inner: Vec<String> = items.iter().map(print_value).collect();
            format!("[{}]", inner.join(", "))
        }
    }
}

fn print_block(b: &Block, out: &mut String) {
    match b {
        Block::Space(s) => {
            let _ = writeln!(out, "space {} {{", name(&s.name.text));
            if !s.points.is_empty() {
                let pts: Vec<String> = s.points.iter().map(|p| name(&p.text)).collect();
                let _ = writeln!(out, "  {}", pts.join(" "));
            }
            for (x, y, d) in &s.distances {
                let _ = writeln!(out, "  d({}, {}) = {d}", name(&x.text), name(&y.text));
            }
        }
        Block::Signature(s) => {
            let _ = writeln!(out, "signature {} {{", name(&s.name.text));
            for (sym, arity) in &s.symbols {
                let a = match arity {
                    ArityExpr::Finite(n) => n.to_string(),
                    ArityExpr::Space(m) => format!("@{}", name(&m.text)),
                };
                let _ = writeln!(out, "  {} : {a}", symbol(&sym.text));
            }
        }
        Block::Algebra(a) => {
            let _ = writeln!(
                out,
                "{}algebra {} : {} on {} {{",
                if a.partial { "partial " } else { "" },
                name(&a.name.text),
                name(&a.signature.text),
                name(&a.space.text)
            );
            for e in &a.entries {
                let args: Vec<String> = e.args.iter().map(|x| name(&x.text)).collect();
                let lhs = if e.args.len() == 2 && is_symbolic(&e.op.text) {
                    format!("{} {} {}", args[0], e.op.text, args[1])
                } else if e.args.is_empty() && !is_symbolic(&e.op.text) {
                    name(&e.op.text)
                } else {
                    format!("{}({})", symbol(&e.op.text), args.join(", "))
                };
                let _ = writeln!(out, "  {lhs} = {}", name(&e.value.text));
            }
        }
        Block::Presentation(p) => {
            let _ = writeln!(out, "presentation {} : {} {{", name(&p.name.text), name(&p.signature.text));
            for e in &p.equations {
                let _ = writeln!(out, "  {}", print_equation(e));
            }
        }
        Block::Map(m) => {
            let _ = writeln!(
                out,
                "map {} : {} -> {} {{",
                name(&m.name.text),
                name(&m.dom.text),
                name(&m.cod.text)
            );
            for (x, y) in &m.pairs {
                let _ = writeln!(out, "  {} -> {}", name(&x.text), name(&y.text));
            }
        }
        Block::Run(r) => {
            let _ = writeln!(out, "run {} {{", name(&r.command.text));
            for (k, v) in &r.args {
                let _ = writeln!(out, "  {} = {}", name(&k.text), print_value(v));
            }
        }
    }
    out.push_str("}\n");
}

/// Canonical text of a document; parsing it gives the document back.
pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    for (i, b) in doc.blocks.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        print_block(b, &mut out);
    }
    out
}
