use qalg::dsl::{self, Block, Context, DiagnosticKind, STerm};
use qalg::equations::{satisfies_equation, Equation};
use qalg::Dist;

const ALMOST_COMMUTATIVE: &str = "
# monoids whose multiplication commutes up to 1/2
signature Mon { * : 2  e : 0 }
presentation AlmostComm : Mon {
  (x * y) * z =[0] x * (y * z)
  x * e =[0] x
  e * x =[0] x
  x * y =[1/2] y * x
}
";

fn roundtrip(text: &str) {
    let doc = dsl::parse(text).unwrap();
    let printed = dsl::print(&doc);
    let again = dsl::parse(&printed).unwrap_or_else(|e| panic!("{e}\n{printed}"));
    assert_eq!(doc, again, "{printed}");
    assert_eq!(printed, dsl::print(&again));
}

#[test]
fn almost_commutative_file_roundtrips() {
    roundtrip(ALMOST_COMMUTATIVE);
    let r = dsl::load(ALMOST_COMMUTATIVE).unwrap();
    let p = r.presentation("AlmostComm").unwrap();
    assert_eq!(p.equations.len(), 4);
    let (l, r, eps) = p.equations[3].sides();
    assert_eq!(eps, Dist::ratio(1, 2));
    assert_eq!(l.display(&p.signature, p.equations[3].var_names()).to_string(), "*(x, y)");
    assert_eq!(r.display(&p.signature, p.equations[3].var_names()).to_string(), "*(y, x)");
}

#[test]
fn distances_are_exact_rationals() {
    let r = dsl::load("space M { x y d(x,y)=1/3 }").unwrap();
    let m = r.space("M").unwrap();
    assert_eq!(m.d(0, 1), Dist::ratio(1, 3));
    let r = dsl::load("space M { x y }").unwrap();
    assert_eq!(r.space("M").unwrap().d(0, 1), Dist::INF);
}

#[test]
fn decimals_are_rejected() {
    let e = dsl::parse("signature S { f : 1 }\npresentation P : S { f(x) =[0.5] x }").unwrap_err();
    assert_eq!(e.kind, DiagnosticKind::Lexical);
    assert!(e.message.contains("rational p/q expected"), "{e}");
    assert_eq!((e.line, e.col), (2, 29));
}

#[test]
fn syntax_errors_name_what_was_expected() {
    let e = dsl::parse("space M { a b\n  d(a b) = 1 }").unwrap_err();
    assert_eq!(e.kind, DiagnosticKind::Syntax);
    assert_eq!((e.line, e.col), (2, 7));
    assert_eq!(e.expected, vec!["`,`"]);
    let e = dsl::parse("spaces M {}").unwrap_err();
    assert!(e.expected.contains(&"`space`".to_string()));
    let e = dsl::parse("signature S { f : 1 }\npresentation P : S { f(x) = x }").unwrap_err();
    assert!(e.expected.contains(&"`=[`".to_string()), "{e}");
}

#[test]
fn resolution_errors_point_at_the_name() {
    let e = dsl::load("signature S { f : 1 }\npresentation P : S { g(x) =[0] x }").unwrap_err();
    assert_eq!(e.kind, DiagnosticKind::Resolution);
    assert_eq!((e.line, e.col), (2, 22));
    assert!(e.message.contains("unknown symbol `g`"));
    let e = dsl::load("space M { a }\nspace M { b }").unwrap_err();
    assert!(e.message.contains("already declared at 1:7"), "{e}");
    let e = dsl::load("space M { a b d(a,b)=1 }\nspace N { c d(c,c)=0 }\nmap f : M -> N { a -> c }").unwrap_err();
    assert!(e.message.contains("`b` is not mapped"), "{e}");
    let e = dsl::load("space M { a b c d(a,b)=1 d(b,c)=1 d(a,c)=3 }").unwrap_err();
    assert!(e.message.contains("metric"), "{e}");
}

#[test]
fn contexts_and_hypotheses() {
    let text = "
space M { a b  d(a, b) = 1 }
signature S { * : 2 }
presentation P : S {
  M |- a * b =[1] b * a
  x ~[1] y, y ~[1] z |- x =[3] z
}";
    roundtrip(text);
    let doc = dsl::parse(text).unwrap();
    let Block::Presentation(p) = &doc.blocks[2] else { panic!() };
    assert!(matches!(p.equations[0].context, Context::Space(_)));
    assert!(matches!(&p.equations[1].context, Context::Hypotheses(h) if h.len() == 2));
    let r = dsl::load(text).unwrap();
    let p = r.presentation("P").unwrap();
    assert!(matches!(p.equations[0], Equation::Basic(_)));
    let Equation::Hypotheses(h) = &p.equations[1] else { panic!() };
    assert_eq!(h.vars, ["x", "y", "z"]);
}

#[test]
fn generalized_arities_and_tables() {
    let text = "
space Near { l r  d(l, r) = 1 }
space M { a b  d(a, b) = 1/2 }
signature S { sigma : @Near  s : 0 }
algebra A : S on M {
  sigma(a, a) = a
  sigma(a, b) = a
  sigma(b, a) = b
  sigma(b, b) = b
  s = a
}
presentation P : S {
  Near |- sigma(l, r) =[1] l
}
run check-sat { algebra = A  presentation = P }
";
    roundtrip(text);
    let r = dsl::load(text).unwrap();
    let a = r.algebra("A").unwrap();
    let p = r.presentation("P").unwrap();
    assert!(satisfies_equation(a, &p.equations[0]).unwrap().is_none());
    assert_eq!(r.runs.len(), 1);
    // A table entry on a tuple outside the arity is rejected.
    let bad = text.replace("space M { a b  d(a, b) = 1/2 }", "space M { a b  d(a, b) = 2 }");
    assert!(dsl::load(&bad).is_err());
}

#[test]
fn infix_printing_is_parenthesized() {
    let doc = dsl::parse("signature S { + : 2 }\npresentation P : S { x + (y + z) =[0] (x + y) + z }").unwrap();
    let Block::Presentation(p) = &doc.blocks[1] else { panic!() };
    let e = &p.equations[0];
    assert!(matches!(&e.lhs, STerm::App(op, args) if op.text == "+" && matches!(args[1], STerm::App(..))));
    assert_eq!(dsl::print_equation(e), "x + (y + z) =[0] (x + y) + z");
}

#[test]
fn odd_names_are_quoted() {
    let text = "space \"A 0\" { \"-1\" 1 \"1/2\" inf_ d(\"-1\", 1) = 2 }\nrun hausdorff { left = [\"-1\"] right = [1, \"7\"] eps = inf }";
    roundtrip(text);
    let r = dsl::load(text).unwrap();
    assert_eq!(r.space("A 0").unwrap().labels(), ["-1", "1", "1/2", "inf_"]);
}

#[test]
fn presentations_print_back_to_documents() {
    for name in ["almost_commutative", "semilattice_with_zero", "quasi_discrete", "almost_small"] {
        let p = qalg::equations::presets::by_name(name, Dist::ratio(1, 2)).unwrap();
        let doc = dsl::presentation_document(&p, "gen");
        let text = dsl::print(&doc);
        roundtrip(&text);
        let back = dsl::load(&text).unwrap();
        let q = back.presentation(&p.name).unwrap();
        assert_eq!(q.equations.len(), p.equations.len());
        for (a, b) in p.equations.iter().zip(&q.equations) {
            assert_eq!(a.sides(), b.sides(), "{name}\n{text}");
        }
    }
}
