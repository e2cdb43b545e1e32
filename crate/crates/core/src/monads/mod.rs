//! Monads on finite metric spaces as executable instances, and property
//! checkers for them.
//!
//! An instance computes `TM` for a finite space `M` within its size policy
//! (word length caps and the like). Elements are trees of type [`Elem`]
//! whose leaves index points of `M`. Nesting one level deeper gives
//! elements of `TTM`: [`nest`] substitutes the `TM` elements back in, and
//! [`MonadInstance::join`] flattens the result.

mod checks;
mod instances;
mod oracle;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::par;

pub use checks::{
    check_directed_colimit_preservation, check_enriched, check_monad_laws, check_precongruence_preservation,
    check_preserves_surjections, ColimitPreservationReport, EnrichedReport, EnrichedViolation, LawFailure, LawReport,
    PairTrajectory, PrecongruenceFailure, PrecongruenceReport, PrecongruenceWitness, SurjectionReport,
};
pub use instances::{
    by_name, AlmostCommutative, BinTerms, CommutativeWord, FiniteHausdorff, QuasiDiscreteReflection, TensorWord, Word,
    WordDropLast, INSTANCE_NAMES,
};
pub use oracle::MonadModel;

/// Largest `TM` any instance will enumerate.
pub const DEFAULT_CARRIER_LIMIT: usize = 100_000;

/// An element of `TM`: a tree whose leaves are points of `M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Elem {
    Point(usize),
    Node(u8, Vec<Elem>),
}

impl Elem {
    pub const WORD: u8 = 0;
    pub const BAG: u8 = 1;
    pub const SET: u8 = 2;
    pub const CLASS: u8 = 3;
    pub const CONST: u8 = 4;
    pub const SIGMA: u8 = 5;

    pub fn node(tag: u8, kids: Vec<Elem>) -> Elem {
        Elem::Node(tag, kids)
    }

    pub fn points_node(tag: u8, points: impl IntoIterator<Item = usize>) -> Elem {
        Elem::Node(tag, points.into_iter().map(Elem::Point).collect())
    }

    pub fn children(&self) -> &[Elem] {
        match self {
            Elem::Point(_) => &[],
            Elem::Node(_, kids) => kids,
        }
    }

    pub fn as_point(&self) -> Option<usize> {
        match self {
            Elem::Point(x) => Some(*x),
            Elem::Node(..) => None,
        }
    }

    /// Leaves in left-to-right order.
    pub fn points(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_points(&mut out);
        out
    }

    fn collect_points(&self, out: &mut Vec<usize>) {
        match self {
            Elem::Point(x) => out.push(*x),
            Elem::Node(_, kids) => kids.iter().for_each(|k| k.collect_points(out)),
        }
    }

    pub fn map_points(&self, f: &impl Fn(usize) -> usize) -> Elem {
        match self {
            Elem::Point(x) => Elem::Point(f(*x)),
            Elem::Node(tag, kids) => Elem::Node(*tag, kids.iter().map(|k| k.map_points(f)).collect()),
        }
    }

    pub fn substitute(&self, f: &impl Fn(usize) -> Elem) -> Elem {
        match self {
            Elem::Point(x) => f(*x),
            Elem::Node(tag, kids) => Elem::Node(*tag, kids.iter().map(|k| k.substitute(f)).collect()),
        }
    }

    pub fn display(&self, labels: &[String]) -> String {
        let mut s = String::new();
        self.write(labels, &mut s);
        s
    }

    fn write(&self, labels: &[String], out: &mut String) {
        let (open, close) = match self {
            Elem::Point(x) => {
                match labels.get(*x) {
                    Some(l) => out.push_str(l),
                    None => {
                        let _ = write!(out, "#{x}");
                    }
                }
                return;
            }
            Elem::Node(Elem::WORD, _) => ("[", "]"),
            Elem::Node(Elem::BAG, _) => ("{|", "|}"),
            Elem::Node(Elem::SET, _) => ("{", "}"),
            Elem::Node(Elem::CLASS, _) => ("<", ">"),
            Elem::Node(Elem::CONST, _) => {
                out.push('s');
                return;
            }
            Elem::Node(Elem::SIGMA, _) => ("sigma(", ")"),
            Elem::Node(_, _) => ("(", ")"),
        };
        out.push_str(open);
        for (i, k) in self.children().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            k.write(labels, out);
        }
        out.push_str(close);
    }
}

/// Replaces every leaf `i` of `outer` by `inner[i]`, turning an element of
/// `T(TM)` into the nested tree that [`MonadInstance::join`] flattens.
pub fn nest(outer: &Elem, inner: &[Elem]) -> Elem {
    outer.substitute(&|i| inner[i].clone())
}

/// The carrier of `TM`: its elements in a fixed order.
#[derive(Clone, Debug)]
pub struct TSpace {
    pub base: Arc<MetricSpace>,
    pub elems: Vec<Elem>,
    index: HashMap<Elem, usize>,
}

impl TSpace {
    pub fn new(base: Arc<MetricSpace>, elems: Vec<Elem>) -> TSpace {
        let index = elems.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        TSpace { base, elems, index }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn index_of(&self, e: &Elem) -> Option<usize> {
        self.index.get(e).copied()
    }

    fn require(&self, e: &Elem) -> Result<usize> {
        self.index_of(e).ok_or_else(|| {
            Error::budget(
                format!("element {} outside the truncated carrier", self.show(e)),
                self.len(),
            )
        })
    }

    pub fn show(&self, e: &Elem) -> String {
        e.display(self.base.labels())
    }

    /// `TM` as a metric space, labelled by the displayed elements.
    pub fn metric(&self, t: &dyn MonadInstance) -> Result<Arc<MetricSpace>> {
        let all: Vec<usize> = (0..self.len()).collect();
        self.subspace_metric(t, &all)
    }

    /// The subspace of `TM` on the given elements.
    pub fn subspace_metric(&self, t: &dyn MonadInstance, which: &[usize]) -> Result<Arc<MetricSpace>> {
        let k = which.len();
        if k > 4_000 {
            return Err(Error::budget("points of a materialized TM", 4_000));
        }
        let d = par::map_collect(k * k, |ij| {
            let (i, j) = (ij / k, ij % k);
            if i == j {
                Ok(Dist::ZERO)
            } else {
                t.distance(&self.base, &self.elems[which[i]], &self.elems[which[j]])
            }
        })
        .into_iter()
        .collect::<Result<Vec<Dist>>>()?;
        let labels = which.iter().map(|&i| self.show(&self.elems[i])).collect();
        Ok(Arc::new(MetricSpace::new_unchecked(labels, d)?))
    }
}

/// A monad on finite metric spaces, computed within a size policy.
pub trait MonadInstance: Send + Sync {
    fn name(&self) -> String;

    /// The elements of `TM` allowed by the size policy.
    fn carrier(&self, m: &Arc<MetricSpace>) -> Result<TSpace>;

    /// `η_M(x)`.
    fn unit(&self, m: &Arc<MetricSpace>, x: usize) -> Result<Elem>;

    /// `μ_M` on a nested element (see [`nest`]).
    fn join(&self, tt: &Elem) -> Elem;

    /// Normal form of a tree after relabelling its leaves.
    fn canonical(&self, e: Elem) -> Elem {
        e
    }

    /// `Tf(e)` for `f : |M| → |cod|` given by its assignment.
    fn lift(&self, e: &Elem, f: &[usize], _cod: &Arc<MetricSpace>) -> Result<Elem> {
        Ok(self.canonical(e.map_points(&|x| f[x])))
    }

    fn distance(&self, m: &Arc<MetricSpace>, a: &Elem, b: &Elem) -> Result<Dist>;

    /// Names and arities of the operations understood by [`operation`](Self::operation).
    fn operations(&self) -> Vec<(&'static str, usize)> {
        Vec::new()
    }

    /// Operations of the corresponding variety on `TM`, by symbol name.
    fn operation(&self, _symbol: &str, _args: &[Elem]) -> Option<Elem> {
        None
    }

    /// A constructive witness for the precongruence criterion: an element
    /// `P` of `T` over the given pairs with `Tπ_l P = a` and `Tπ_r P = b`.
    /// `None` means the instance has no construction and a search is used.
    fn witness(&self, _m: &MetricSpace, _pairs: &[(usize, usize)], _a: &Elem, _b: &Elem) -> Option<Option<Elem>> {
        None
    }
}
