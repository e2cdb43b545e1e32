//! The `.qalg` text format: spaces, signatures, algebras, presentations,
//! maps, and `run` directives for the command line.
//!
//! ```text
//! space M { a b c  d(a,b) = 1/2  d(b,c) = 1 }
//! signature S { * : 2  e : 0  sigma : @M }
//! algebra A : S on M { a * b = a  e = a  sigma(a, b, c) = b }
//! presentation P : S {
//!   x * y =[1/2] y * x
//!   M |- sigma(a, b, c) =[0] a
//!   x ~[1] y |- x * y =[1] y
//! }
//! map f : M -> M { a -> a  b -> a  c -> c }
//! run check-sat { algebra = A  presentation = P }
//! ```
//!
//! Distances are exact: `p/q`, a natural number, or `inf`. Names are
//! identifiers, natural numbers, or double-quoted strings; operation names
//! may also be runs of symbols such as `*` or `+`, written infix when
//! binary. A call's `(` must follow its name directly. `#` starts a
//! comment.

mod ast;
mod parser;
mod print;
mod resolve;

pub use ast::*;
pub use parser::{parse, Diagnostic, DiagnosticKind};
pub use print::{print, print_equation, print_term};
pub use resolve::{load, presentation_document, resolve, space_decl, Resolved};
