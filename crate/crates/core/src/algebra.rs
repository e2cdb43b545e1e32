//! Finite quantitative algebras, homomorphisms and the closure constructions
//! of products, generated subalgebras and homomorphic images.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::metric::{product, MetricSpace, Pseudometric};
use crate::par;
use crate::terms::{Arity, Signature, Term};

const UNDEF: u32 = u32::MAX;

/// Index of an argument tuple in a table over an `n`-point carrier, first
/// argument most significant.
pub(crate) fn tuple_index(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

fn tuple_at(n: usize, k: usize, mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    out
}

fn table_len(n: usize, k: usize) -> Result<usize> {
    let len = (n as u128).pow(k as u32);
    if len > 50_000_000 {
        return Err(Error::budget("operation table entries", 50_000_000));
    }
    Ok(len as usize)
}

/// Sup-metric distance between two argument tuples.
fn tuple_distance(carrier: &Pseudometric, a: &[usize], b: &[usize]) -> Dist {
    a.iter().zip(b).map(|(&x, &y)| carrier.d(x, y)).max().unwrap_or(Dist::ZERO)
}

/// A tuple is admissible for a symbol when it is nonexpanding from the arity
/// space into the carrier. Every tuple is admissible for a finitary symbol.
fn admissible(arity: &Arity, carrier: &Pseudometric, args: &[usize]) -> bool {
    match arity {
        Arity::Finite(_) => true,
        Arity::Space(s) => (0..args.len()).all(|i| (i + 1..args.len()).all(|j| carrier.d(args[i], args[j]) <= s.d(i, j))),
    }
}

/// A quantitative algebra on a finite carrier.
///
/// Operation tables are explicit. Tables of generalized symbols are defined
/// exactly on the admissible tuples; a *partial* algebra may leave further
/// entries undefined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantAlgebra {
    signature: Arc<Signature>,
    carrier: Arc<MetricSpace>,
    tables: Vec<Vec<u32>>,
    partial: bool,
}

impl QuantAlgebra {
    /// Builds a total algebra from explicit tables; generalized tables must be
    /// `Some` exactly on admissible tuples.
    pub fn new(signature: Arc<Signature>, carrier: Arc<MetricSpace>, tables: Vec<Vec<Option<usize>>>) -> Result<Self> {
        Self::build(signature, carrier, tables, false)
    }

    /// Like [`QuantAlgebra::new`] but entries may be missing anywhere.
    pub fn new_partial(
        signature: Arc<Signature>,
        carrier: Arc<MetricSpace>,
        tables: Vec<Vec<Option<usize>>>,
    ) -> Result<Self> {
        Self::build(signature, carrier, tables, true)
    }

    fn build(
        signature: Arc<Signature>,
        carrier: Arc<MetricSpace>,
        tables: Vec<Vec<Option<usize>>>,
        partial: bool,
    ) -> Result<Self> {
        let n = carrier.len();
        if tables.len() != signature.len() {
            return Err(Error::input(format!(
                "{} tables for {} symbols",
                tables.len(),
                signature.len()
            )));
        }
        let mut raw = Vec::with_capacity(tables.len());
        for (op, table) in tables.into_iter().enumerate() {
            let sym = signature.symbol(op);
            let k = sym.arity.size();
            if table.len() != table_len(n, k)? {
                return Err(Error::input(format!(
                    "table of `{}` has {} entries, expected {}",
                    sym.name,
                    table.len(),
                    n.pow(k as u32)
                )));
            }
            let mut out = Vec::with_capacity(table.len());
            for (idx, entry) in table.into_iter().enumerate() {
                let args = tuple_at(n, k, idx);
                let ok = admissible(&sym.arity, &carrier, &args);
                match entry {
                    Some(v) if v >= n => {
                        return Err(Error::input(format!("`{}` maps to point {v} outside the carrier", sym.name)))
                    }
                    Some(_) if !ok => {
                        return Err(Error::Expanding(format!(
                            "`{}` defined on a tuple that is not nonexpanding from its arity",
                            sym.name
                        )))
                    }
                    None if ok && !partial => {
                        return Err(Error::input(format!(
                            "`{}` undefined on ({})",
                            sym.name,
                            args.iter().map(|&a| carrier.label(a)).collect::<Vec<_>>().join(",")
                        )))
                    }
                    _ => out.push(entry.map_or(UNDEF, |v| v as u32)),
                }
            }
            raw.push(out);
        }
        Ok(QuantAlgebra {
            signature,
            carrier,
            tables: raw,
            partial,
        })
    }

    /// Tabulates `f` on every admissible tuple.
    pub fn from_fn(
        signature: Arc<Signature>,
        carrier: Arc<MetricSpace>,
        f: impl Fn(usize, &[usize]) -> usize,
    ) -> Result<Self> {
        let n = carrier.len();
        let mut tables = Vec::with_capacity(signature.len());
        for (op, sym) in signature.symbols().iter().enumerate() {
            let k = sym.arity.size();
            let len = table_len(n, k)?;
            tables.push(
                (0..len)
                    .map(|idx| {
                        let args = tuple_at(n, k, idx);
                        admissible(&sym.arity, &carrier, &args).then(|| f(op, &args))
                    })
                    .collect(),
            );
        }
        Self::new(signature, carrier, tables)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn carrier(&self) -> &Arc<MetricSpace> {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn is_partial(&self) -> bool {
        self.partial
    }

    /// True when every admissible tuple has a value.
    pub fn is_total(&self) -> bool {
        let n = self.len();
        self.tables.iter().enumerate().all(|(op, t)| {
            let arity = self.signature.arity(op);
            t.iter()
                .enumerate()
                .all(|(idx, &v)| v != UNDEF || !admissible(arity, &self.carrier, &tuple_at(n, arity.size(), idx)))
        })
    }

    pub fn apply(&self, op: usize, args: &[usize]) -> Option<usize> {
        let v = self.tables[op][tuple_index(self.len(), args)];
        (v != UNDEF).then_some(v as usize)
    }

    /// Defined entries of a table as `(args, value)`.
    pub fn entries(&self, op: usize) -> Vec<(Vec<usize>, usize)> {
        let (n, k) = (self.len(), self.signature.arity(op).size());
        self.tables[op]
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != UNDEF)
            .map(|(idx, &v)| (tuple_at(n, k, idx), v as usize))
            .collect()
    }

    /// Table of `op` with `None` on undefined entries.
    pub fn table(&self, op: usize) -> Vec<Option<usize>> {
        self.tables[op].iter().map(|&v| (v != UNDEF).then_some(v as usize)).collect()
    }

    /// Homomorphic extension of `assignment` (generators to carrier points)
    /// applied to `t`.
    pub fn eval(&self, t: &Term, assignment: &[usize]) -> Result<usize> {
        match t {
            Term::Var(x) => assignment
                .get(*x)
                .copied()
                .ok_or_else(|| Error::input(format!("variable index {x} has no interpretation"))),
            Term::App(op, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.eval(a, assignment))
                    .collect::<Result<Vec<_>>>()?;
                let arity = self.signature.arity(*op);
                let show = || {
                    let vars: Vec<String> = assignment.iter().map(|&p| self.carrier.label(p).to_string()).collect();
                    t.display(&self.signature, &vars).to_string()
                };
                if !admissible(arity, &self.carrier, &vals) {
                    return Err(Error::Undefined {
                        term: show(),
                        reason: format!(
                            "argument tuple of `{}` is not nonexpanding from its arity",
                            self.signature.symbol(*op).name
                        ),
                    });
                }
                self.apply(*op, &vals).ok_or_else(|| Error::Undefined {
                    term: show(),
                    reason: format!("`{}` has no table entry there", self.signature.symbol(*op).name),
                })
            }
        }
    }

    /// The algebra on the same tables with the carrier relabelled.
    pub fn with_carrier(&self, carrier: Arc<MetricSpace>) -> Result<Self> {
        if carrier.len() != self.len() {
            return Err(Error::input("relabelled carrier has a different size"));
        }
        Ok(QuantAlgebra {
            carrier,
            ..self.clone()
        })
    }
}

/// A violated nonexpansiveness instance: two argument tuples at distance
/// `input` whose values are at distance `output > input`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OpViolation {
    pub symbol: String,
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub input: Dist,
    pub output: Dist,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AlgebraReport {
    pub violations: Vec<OpViolation>,
    pub missing: Vec<String>,
}

impl AlgebraReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && self.missing.is_empty()
    }
}

/// Lists every failure of nonexpansiveness, and every missing entry of a
/// total algebra.
pub fn check_algebra(a: &QuantAlgebra) -> AlgebraReport {
    let mut report = AlgebraReport::default();
    let labels = |t: &[usize]| t.iter().map(|&x| a.carrier.label(x).to_string()).collect::<Vec<_>>();
    for op in 0..a.signature.len() {
        let entries = a.entries(op);
        let name = &a.signature.symbol(op).name;
        let found: Vec<OpViolation> = par::flat_map_collect(entries.len(), |i| {
            let (ta, va) = &entries[i];
            entries[i + 1..]
                .iter()
                .filter_map(|(tb, vb)| {
                    let input = tuple_distance(&a.carrier, ta, tb);
                    let output = a.carrier.d(*va, *vb);
                    (output > input).then(|| OpViolation {
                        symbol: name.clone(),
                        left: labels(ta),
                        right: labels(tb),
                        input,
                        output,
                    })
                })
                .collect()
        });
        report.violations.extend(found);
    }
    if !a.partial && !a.is_total() {
        report.missing.push("undefined admissible entries".into());
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum HomViolation {
    Expanding { x: String, y: String, before: Dist, after: Dist },
    Square { symbol: String, args: Vec<String>, expected: String, found: Option<String> },
    Shape(String),
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct HomReport {
    pub violations: Vec<HomViolation>,
}

impl HomReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `f` is nonexpanding and commutes with every defined entry of
/// the source tables.
pub fn check_homomorphism(f: &[usize], a: &QuantAlgebra, b: &QuantAlgebra) -> HomReport {
    let mut report = HomReport::default();
    if a.signature != b.signature {
        report.violations.push(HomViolation::Shape("signatures differ".into()));
        return report;
    }
    if f.len() != a.len() || f.iter().any(|&y| y >= b.len()) {
        report.violations.push(HomViolation::Shape("map does not go between the carriers".into()));
        return report;
    }
    for x in 0..a.len() {
        for y in x + 1..a.len() {
            let (before, after) = (a.carrier.d(x, y), b.carrier.d(f[x], f[y]));
            if after > before {
                report.violations.push(HomViolation::Expanding {
                    x: a.carrier.label(x).into(),
                    y: a.carrier.label(y).into(),
                    before,
                    after,
                });
            }
        }
    }
    for op in 0..a.signature.len() {
        for (args, v) in a.entries(op) {
            let image: Vec<usize> = args.iter().map(|&x| f[x]).collect();
            let found = b.apply(op, &image);
            if found != Some(f[v]) {
                report.violations.push(HomViolation::Square {
                    symbol: a.signature.symbol(op).name.clone(),
                    args: args.iter().map(|&x| a.carrier.label(x).to_string()).collect(),
                    expected: b.carrier.label(f[v]).into(),
                    found: found.map(|y| b.carrier.label(y).to_string()),
                });
            }
        }
    }
    report
}

fn require_finitary(sig: &Signature, what: &str) -> Result<()> {
    if sig.is_finitary() {
        Ok(())
    } else {
        Err(Error::input(format!("{what} is only supported for finitary signatures")))
    }
}

/// A product together with its projections.
#[derive(Clone, Debug)]
pub struct Product {
    pub algebra: QuantAlgebra,
    pub projections: Vec<Vec<usize>>,
}

/// Product with the supremum metric and coordinatewise operations. The empty
/// product is the one-point algebra over `signature`.
pub fn product_algebra(signature: &Arc<Signature>, factors: &[QuantAlgebra]) -> Result<Product> {
    require_finitary(signature, "product")?;
    if let Some(f) = factors.iter().find(|f| &f.signature != signature) {
        return Err(Error::input(format!(
            "factor on `{}` has a different signature",
            f.carrier.labels().join(",")
        )));
    }
    let mut carrier = MetricSpace::singleton("()");
    for (i, f) in factors.iter().enumerate() {
        carrier = if i == 0 {
            (**f.carrier()).clone()
        } else {
            product(&carrier, f.carrier())
        };
    }
    let sizes: Vec<usize> = factors.iter().map(QuantAlgebra::len).collect();
    let total: usize = sizes.iter().product();
    let coords = |mut p: usize| {
        let mut c = vec![0; sizes.len()];
        for (slot, &s) in c.iter_mut().zip(&sizes).rev() {
            *slot = p % s;
            p /= s;
        }
        c
    };
    let encode = |c: &[usize]| c.iter().zip(&sizes).fold(0, |acc, (&x, &s)| acc * s + x);
    let projections = (0..factors.len())
        .map(|i| (0..total).map(|p| coords(p)[i]).collect())
        .collect();
    let algebra = QuantAlgebra::from_fn(signature.clone(), Arc::new(carrier), |op, args| {
        let cs: Vec<Vec<usize>> = args.iter().map(|&p| coords(p)).collect();
        let out: Vec<usize> = factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let fa: Vec<usize> = cs.iter().map(|c| c[i]).collect();
                f.apply(op, &fa).expect("factors of a product are total")
            })
            .collect();
        encode(&out)
    })?;
    Ok(Product { algebra, projections })
}

/// A subalgebra with its isometric inclusion.
#[derive(Clone, Debug)]
pub struct Subalgebra {
    pub algebra: QuantAlgebra,
    pub inclusion: Vec<usize>,
}

/// The least subset containing `seed` closed under the operations, with the
/// inherited metric.
pub fn subalgebra_generated(a: &QuantAlgebra, seed: &[usize]) -> Result<Subalgebra> {
    if let Some(&p) = seed.iter().find(|&&p| p >= a.len()) {
        return Err(Error::UnknownPoint(format!("#{p}")));
    }
    let mut members: BTreeSet<usize> = seed.iter().copied().collect();
    loop {
        let current: Vec<usize> = members.iter().copied().collect();
        let mut grew = false;
        for op in 0..a.signature.len() {
            let k = a.signature.arity(op).size();
            let m = current.len();
            let count = (m as u128).pow(k as u32);
            if count > 50_000_000 {
                return Err(Error::budget("subalgebra closure tuples", 50_000_000));
            }
            for idx in 0..count as usize {
                let args: Vec<usize> = tuple_at(m.max(1), k, idx).into_iter().map(|i| current[i]).collect();
                if let Some(v) = a.apply(op, &args) {
                    grew |= members.insert(v);
                }
            }
        }
        if !grew {
            break;
        }
    }
    restrict(a, members.into_iter().collect())
}

/// Restricts `a` to a subset closed under its defined operations.
fn restrict(a: &QuantAlgebra, inclusion: Vec<usize>) -> Result<Subalgebra> {
    let mut position = vec![usize::MAX; a.len()];
    for (i, &p) in inclusion.iter().enumerate() {
        position[p] = i;
    }
    let carrier = Arc::new(a.carrier.subspace(&inclusion));
    let m = inclusion.len();
    let mut tables = Vec::with_capacity(a.signature.len());
    for op in 0..a.signature.len() {
        let k = a.signature.arity(op).size();
        let mut table = Vec::with_capacity(table_len(m, k)?);
        for idx in 0..table_len(m, k)? {
            let args: Vec<usize> = tuple_at(m.max(1), k, idx).into_iter().map(|i| inclusion[i]).collect();
            match a.apply(op, &args) {
                Some(v) if position[v] == usize::MAX => {
                    return Err(Error::input(format!(
                        "subset not closed under `{}`",
                        a.signature.symbol(op).name
                    )))
                }
                v => table.push(v.map(|v| position[v])),
            }
        }
        tables.push(table);
    }
    let algebra = if a.partial {
        QuantAlgebra::new_partial(a.signature.clone(), carrier, tables)?
    } else {
        QuantAlgebra::new(a.signature.clone(), carrier, tables)?
    };
    Ok(Subalgebra { algebra, inclusion })
}

/// Image factorization `f = embedding ∘ surjection` of a homomorphism.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub image: QuantAlgebra,
    pub surjection: Vec<usize>,
    pub embedding: Vec<usize>,
}

pub fn image_factorization(f: &[usize], a: &QuantAlgebra, b: &QuantAlgebra) -> Result<Factorization> {
    let report = check_homomorphism(f, a, b);
    if !report.is_valid() {
        return Err(Error::input(format!("not a homomorphism: {:?}", report.violations[0])));
    }
    let points: BTreeSet<usize> = f.iter().copied().collect();
    let sub = restrict(b, points.into_iter().collect())?;
    let surjection = f
        .iter()
        .map(|y| sub.inclusion.binary_search(y).expect("image point"))
        .collect();
    Ok(Factorization {
        image: sub.algebra,
        surjection,
        embedding: sub.inclusion,
    })
}

/// Default cap on the number of algebras [`enumerate_algebras`] returns.
pub const DEFAULT_ALGEBRA_CAP: usize = 100_000;

/// All nonexpanding tables of one finitary symbol on `carrier`, in
/// lexicographic order.
fn valid_tables(carrier: &Pseudometric, k: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
    let n = carrier.len();
    let len = table_len(n, k)?;
    let tuples: Vec<Vec<usize>> = (0..len).map(|i| tuple_at(n.max(1), k, i)).collect();
    if n == 0 {
        return Ok(if k == 0 { vec![] } else { vec![vec![]] });
    }
    // Bounds between each entry and the earlier ones.
    let bounds: Vec<Vec<Dist>> = (0..len)
        .map(|i| (0..i).map(|j| tuple_distance(carrier, &tuples[i], &tuples[j])).collect())
        .collect();
    let search = |first: usize| -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut table = vec![first];
        fn go(
            carrier: &Pseudometric,
            bounds: &[Vec<Dist>],
            table: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
            cap: usize,
        ) -> bool {
            let i = table.len();
            if i == bounds.len() {
                out.push(table.clone());
                return out.len() <= cap;
            }
            for v in 0..carrier.len() {
                if (0..i).all(|j| carrier.d(v, table[j]) <= bounds[i][j]) {
                    table.push(v);
                    let go_on = go(carrier, bounds, table, out, cap);
                    table.pop();
                    if !go_on {
                        return false;
                    }
                }
            }
            true
        }
        if !go(carrier, &bounds, &mut table, &mut out, cap) {
            return Err(Error::budget("operation tables", cap));
        }
        Ok(out)
    };
    let parts = par::map_collect(n, search);
    let mut all = Vec::new();
    for p in parts {
        all.extend(p?);
        if all.len() > cap {
            return Err(Error::budget("operation tables", cap));
        }
    }
    Ok(all)
}

/// Every algebra structure on `carrier`, in a deterministic order: tables of
/// later symbols vary fastest.
pub fn enumerate_algebras(signature: &Arc<Signature>, carrier: &Arc<MetricSpace>, cap: usize) -> Result<Vec<QuantAlgebra>> {
    require_finitary(signature, "algebra enumeration")?;
    let mut per_op = Vec::with_capacity(signature.len());
    let mut total: u128 = 1;
    for sym in signature.symbols() {
        let t = valid_tables(carrier, sym.arity.size(), cap)?;
        total *= t.len() as u128;
        per_op.push(t);
    }
    if total > cap as u128 {
        return Err(Error::budget("algebras", cap));
    }
    let total = total as usize;
    let out = par::map_collect(total, |mut idx| {
        let mut choice = vec![0; per_op.len()];
        for (slot, tables) in choice.iter_mut().zip(&per_op).rev() {
            *slot = idx % tables.len();
            idx /= tables.len();
        }
        let tables = choice
            .iter()
            .zip(&per_op)
            .map(|(&c, t)| t[c].iter().map(|&v| Some(v)).collect())
            .collect();
        QuantAlgebra::new(signature.clone(), carrier.clone(), tables).expect("enumerated tables are valid")
    });
    Ok(out)
}
