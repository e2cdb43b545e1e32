//! Signatures, terms over a metric space of generators, and the term-algebra
//! metric.
//!
//! Two terms are *similar* when they differ only in variable names; similar
//! terms are at the largest distance between corresponding leaves, all other
//! pairs at `∞`. Generalized symbols take a metric space as arity, and a
//! composite term is admitted only when its child assignment is nonexpanding
//! from that space into the term metric.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Pseudometric};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arity {
    Finite(usize),
    /// Generalized arity: children are indexed by the points of the space.
    Space(Arc<MetricSpace>),
}

impl Arity {
    pub fn size(&self) -> usize {
        match self {
            Arity::Finite(n) => *n,
            Arity::Space(s) => s.len(),
        }
    }

    pub fn is_finitary(&self) -> bool {
        matches!(self, Arity::Finite(_))
    }

    /// The arity as a space; a finitary arity `n` is the discrete space on `n`
    /// points.
    pub fn as_space(&self) -> MetricSpace {
        match self {
            Arity::Finite(n) => {
                let labels: Vec<String> = (0..*n).map(|i| i.to_string()).collect();
                MetricSpace::discrete(&labels)
            }
            Arity::Space(s) => (**s).clone(),
        }
    }

    /// Distance between argument positions `i` and `j`.
    pub fn d(&self, i: usize, j: usize) -> Dist {
        match self {
            Arity::Finite(_) if i == j => Dist::ZERO,
            Arity::Finite(_) => Dist::INF,
            Arity::Space(s) => s.d(i, j),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub arity: Arity,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Signature {
    symbols: Vec<Symbol>,
    index: HashMap<String, usize>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.name.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate symbol `{}`", s.name)));
            }
        }
        Ok(Signature { symbols, index })
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn finitary(symbols: &[(&str, usize)]) -> Self {
        Signature::new(
            symbols
                .iter()
                .map(|&(name, n)| Symbol {
                    name: name.to_string(),
                    arity: Arity::Finite(n),
                })
                .collect(),
        )
        .expect("symbol names must be unique")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, op: usize) -> &Symbol {
        &self.symbols[op]
    }

    pub fn arity(&self, op: usize) -> &Arity {
        &self.symbols[op].arity
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn op(&self, name: &str) -> Result<usize> {
        self.get(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn is_finitary(&self) -> bool {
        self.symbols.iter().all(|s| s.arity.is_finitary())
    }
}

/// A term over generators indexed `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(usize),
    App(usize, Vec<Term>),
}

impl Term {
    pub fn var(x: usize) -> Term {
        Term::Var(x)
    }

    pub fn app(op: usize, args: Vec<Term>) -> Term {
        Term::App(op, args)
    }

    /// 0 on variables; one more than the tallest child otherwise, so
    /// constants have height 1.
    pub fn height(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::height).max().unwrap_or(0),
        }
    }

    /// Same shape after erasing variable names.
    pub fn similar(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Var(_), Term::Var(_)) => true,
            (Term::App(f, a), Term::App(g, b)) => {
                f == g && a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.similar(y))
            }
            _ => false,
        }
    }

    /// Variables in left-to-right leaf order, with repetitions.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Term::Var(x) => out.push(*x),
            Term::App(_, args) => args.iter().for_each(|a| a.collect_leaves(out)),
        }
    }

    /// Largest variable index plus one.
    pub fn var_bound(&self) -> usize {
        self.leaves().into_iter().max().map_or(0, |m| m + 1)
    }

    /// Renames variables (the action of `T_Σ` on a map of generators).
    pub fn map_vars(&self, f: &impl Fn(usize) -> usize) -> Term {
        match self {
            Term::Var(x) => Term::Var(f(*x)),
            Term::App(op, args) => Term::App(*op, args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }

    /// Replaces each variable `x` by `f(x)`: the Kleisli extension `f*`.
    pub fn substitute(&self, f: &impl Fn(usize) -> Term) -> Term {
        match self {
            Term::Var(x) => f(*x),
            Term::App(op, args) => Term::App(*op, args.iter().map(|a| a.substitute(f)).collect()),
        }
    }

    /// Structural order: height, then symbol, then children left to right.
    /// Variables compare by index.
    pub fn cmp_structural(&self, other: &Term) -> Ordering {
        self.height().cmp(&other.height()).then_with(|| self.cmp_shape(other))
    }

    fn cmp_shape(&self, other: &Term) -> Ordering {
        match (self, other) {
            (Term::Var(x), Term::Var(y)) => x.cmp(y),
            (Term::Var(_), Term::App(..)) => Ordering::Less,
            (Term::App(..), Term::Var(_)) => Ordering::Greater,
            (Term::App(f, a), Term::App(g, b)) => f.cmp(g).then_with(|| {
                for (x, y) in a.iter().zip(b) {
                    let c = x.cmp_structural(y);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                a.len().cmp(&b.len())
            }),
        }
    }

    pub fn display<'a>(&'a self, sig: &'a Signature, vars: &'a [String]) -> TermDisplay<'a> {
        TermDisplay { term: self, sig, vars }
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_structural(other)
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
    vars: &'a [String],
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(x) => match self.vars.get(*x) {
                Some(l) => f.write_str(l),
                None => write!(f, "?{x}"),
            },
            Term::App(op, args) if args.is_empty() => f.write_str(&self.sig.symbol(*op).name),
            Term::App(op, args) => {
                write!(f, "{}(", self.sig.symbol(*op).name)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", a.display(self.sig, self.vars))?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Term-algebra distance: `∞` unless similar, else the largest distance
/// between corresponding leaves.
pub fn term_distance(t: &Term, s: &Term, generators: &Pseudometric) -> Dist {
    if !t.similar(s) {
        return Dist::INF;
    }
    t.leaves()
        .into_iter()
        .zip(s.leaves())
        .map(|(x, y)| generators.d(x, y))
        .max()
        .unwrap_or(Dist::ZERO)
}

/// Checks arities and, for generalized symbols, that every child assignment
/// is nonexpanding into the term metric over `generators`.
pub fn validate_term(t: &Term, sig: &Signature, generators: &Pseudometric) -> Result<()> {
    match t {
        Term::Var(x) if *x < generators.len() => Ok(()),
        Term::Var(x) => Err(Error::input(format!("variable index {x} out of range"))),
        Term::App(op, args) => {
            if *op >= sig.len() {
                return Err(Error::UnknownSymbol(format!("#{op}")));
            }
            let arity = sig.arity(*op);
            if arity.size() != args.len() {
                return Err(Error::input(format!(
                    "`{}` expects {} arguments, got {}",
                    sig.symbol(*op).name,
                    arity.size(),
                    args.len()
                )));
            }
            for a in args {
                validate_term(a, sig, generators)?;
            }
            if let Arity::Space(space) = arity {
                for i in 0..args.len() {
                    for j in (i + 1)..args.len() {
                        let dt = term_distance(&args[i], &args[j], generators);
                        if dt > space.d(i, j) {
                            return Err(Error::Expanding(format!(
                                "children {} and {} of `{}` are at distance {dt} > {}",
                                space.label(i),
                                space.label(j),
                                sig.symbol(*op).name,
                                space.d(i, j)
                            )));
                        }
                    }
                }
            }
            Ok(())
        }
    }
}

/// The default cap on the size of an enumerated term universe.
pub const DEFAULT_TERM_BUDGET: usize = 20_000;

/// All terms of height at most `depth` over a space of generators, with the
/// term-algebra metric.
#[derive(Clone, Debug)]
pub struct TermSpace {
    signature: Arc<Signature>,
    generators: Arc<MetricSpace>,
    depth: usize,
    terms: Vec<Term>,
    index: HashMap<Term, usize>,
    metric: MetricSpace,
}

impl TermSpace {
    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn generators(&self) -> &Arc<MetricSpace> {
        &self.generators
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn metric(&self) -> &MetricSpace {
        &self.metric
    }

    pub fn index_of(&self, t: &Term) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn distance(&self, t: &Term, s: &Term) -> Result<Dist> {
        let show = |x: &Term| x.display(&self.signature, self.generators.labels()).to_string();
        let i = self.index_of(t).ok_or_else(|| Error::input(format!("`{}` is not in the universe", show(t))))?;
        let j = self.index_of(s).ok_or_else(|| Error::input(format!("`{}` is not in the universe", show(s))))?;
        Ok(self.metric.d(i, j))
    }
}

/// Enumerates the term universe of height `≤ depth`.
///
/// Fails with a budget error rather than truncating when the universe would
/// exceed `budget` terms.
pub fn enumerate_terms(
    signature: Arc<Signature>,
    generators: Arc<MetricSpace>,
    depth: usize,
    budget: usize,
) -> Result<TermSpace> {
    let mut terms: Vec<Term> = (0..generators.len()).map(Term::Var).collect();
    if terms.len() > budget {
        return Err(Error::budget("term universe", budget));
    }
    for _ in 0..depth {
        let mut next = terms.clone();
        for (op, sym) in signature.symbols().iter().enumerate() {
            let k = sym.arity.size();
            let estimate = (terms.len() as f64).powi(k as i32);
            if next.len() as f64 + estimate > budget as f64 && sym.arity.is_finitary() {
                return Err(Error::budget("term universe", budget));
            }
            let mut tuple = Vec::with_capacity(k);
            extend_tuples(&terms, &sym.arity, &generators, &mut tuple, &mut |args| {
                next.push(Term::App(op, args.to_vec()));
                next.len() <= budget
            });
            if next.len() > budget {
                return Err(Error::budget("term universe", budget));
            }
        }
        next.sort();
        next.dedup();
        if next.len() == terms.len() {
            terms = next;
            break;
        }
        terms = next;
    }
    terms.sort();
    let index = terms.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let labels: Vec<String> = terms
        .iter()
        .map(|t| t.display(&signature, generators.labels()).to_string())
        .collect();
    let metric = MetricSpace::from_fn_unchecked(labels, |i, j| term_distance(&terms[i], &terms[j], &generators))?;
    Ok(TermSpace {
        signature,
        generators,
        depth,
        terms,
        index,
        metric,
    })
}

/// Calls `emit` on every admissible child tuple; stops early when `emit`
/// returns false.
fn extend_tuples(
    pool: &[Term],
    arity: &Arity,
    generators: &Pseudometric,
    tuple: &mut Vec<Term>,
    emit: &mut dyn FnMut(&[Term]) -> bool,
) -> bool {
    let i = tuple.len();
    if i == arity.size() {
        return emit(tuple);
    }
    for t in pool {
        if let Arity::Space(space) = arity {
            if !(0..i).all(|j| term_distance(&tuple[j], t, generators) <= space.d(j, i)) {
                continue;
            }
        }
        tuple.push(t.clone());
        let go_on = extend_tuples(pool, arity, generators, tuple, emit);
        tuple.pop();
        if !go_on {
            return false;
        }
    }
    true
}
