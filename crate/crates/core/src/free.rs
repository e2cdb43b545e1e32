//! Depth-bounded free algebras of a presented variety.
//!
//! The engine works on classes of terms rather than on the raw term universe.
//! Level `h` adds `σ(c_1, …, c_k)` for every tuple of classes built so far;
//! new classes start at distance `∞` and generators at their distance in `M`.
//! Distances then only decrease, under three kinds of bounds, until nothing
//! changes:
//!
//! * axiom instances: `d(f♯l, f♯r) ≤ ε` for every interpretation `f` whose
//!   images of `l` and `r` exist (nonexpanding into the current distances for
//!   basic equations);
//! * congruence: `d(σ(a_i), σ(b_i)) ≤ max_i d(a_i, b_i)`;
//! * the triangle inequality.
//!
//! Classes at distance zero are merged. Every bound holds in the free algebra,
//! so reported distances never undercut the true ones.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::QuantAlgebra;
use crate::dist::Dist;
use crate::equations::{Equation, Presentation};
use crate::error::{Error, Result};
use crate::metric::{MetricSpace, NonexpandingMap};
use crate::par;
use crate::terms::Term;

const UNDEF: u32 = u32::MAX;

/// Largest dense operation table the engine allocates.
pub const TABLE_LIMIT: usize = 16_000_000;

/// Default cap on the number of classes alive at once.
pub const DEFAULT_CLASS_BUDGET: usize = 6_000;

/// How far reported distances can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    /// Upper bounds on the free-algebra distances.
    UpperBound,
    /// Distances between classes of the previous level did not change at the
    /// last level. Evidence, not proof.
    StableAcrossDepth,
    /// The operation tables are total, so the quotient is itself an algebra
    /// of the variety generated by `M` and its distances are exact.
    Closed,
    /// A model of the free algebra matched the quotient isometrically.
    OracleCertified,
}

impl Exactness {
    pub fn is_exact(self) -> bool {
        matches!(self, Exactness::Closed | Exactness::OracleCertified)
    }
}

/// A depth-bounded approximation of the free algebra on `generators`.
#[derive(Clone, Debug)]
pub struct FreeAlgebraApprox {
    pub presentation: Presentation,
    pub generators: Arc<MetricSpace>,
    pub depth: usize,
    /// Least term of each class.
    pub reps: Vec<Term>,
    /// The classes with operations where defined.
    pub quotient: QuantAlgebra,
    pub unit: NonexpandingMap,
    pub exactness: Exactness,
    pub passes: u64,
    pub classes_created: usize,
}

impl FreeAlgebraApprox {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn d(&self, a: usize, b: usize) -> Dist {
        self.quotient.carrier().d(a, b)
    }

    /// The class of a term, when every subterm lies within the depth bound.
    pub fn class_of(&self, t: &Term) -> Option<usize> {
        match t {
            Term::Var(x) => (*x < self.generators.len()).then(|| self.unit.apply(*x)),
            Term::App(op, args) => {
                let cs = args.iter().map(|a| self.class_of(a)).collect::<Option<Vec<_>>>()?;
                self.quotient.apply(*op, &cs)
            }
        }
    }

    /// Distance between the classes of two terms.
    pub fn distance(&self, t: &Term, s: &Term) -> Result<Dist> {
        let labels = self.generators.labels();
        let find = |x: &Term| {
            self.class_of(x).ok_or_else(|| {
                Error::input(format!(
                    "`{}` is beyond the depth bound",
                    x.display(&self.presentation.signature, labels)
                ))
            })
        };
        Ok(self.d(find(t)?, find(s)?))
    }

    pub fn rep_string(&self, c: usize) -> String {
        self.reps[c]
            .display(&self.presentation.signature, self.generators.labels())
            .to_string()
    }

    pub fn report(&self) -> FreeReport {
        let n = self.len();
        FreeReport {
            presentation: self.presentation.name.clone(),
            depth: self.depth,
            classes: (0..n).map(|c| self.rep_string(c)).collect(),
            distances: (0..n).map(|a| (0..n).map(|b| self.d(a, b)).collect()).collect(),
            unit: self
                .generators
                .labels()
                .iter()
                .enumerate()
                .map(|(x, l)| (l.clone(), self.rep_string(self.unit.apply(x))))
                .collect(),
            exactness: self.exactness,
            passes: self.passes,
            total: self.quotient.is_total(),
        }
    }
}

/// Serializable summary of a free-algebra run.
#[derive(Clone, Debug, Serialize)]
pub struct FreeReport {
    pub presentation: String,
    pub depth: usize,
    pub classes: Vec<String>,
    pub distances: Vec<Vec<Dist>>,
    pub unit: Vec<(String, String)>,
    pub exactness: Exactness,
    pub passes: u64,
    pub total: bool,
}

/// Exact distances scaled to integers over a common denominator. Sums,
/// minima and maxima of the inputs stay integral, so the engine never needs
/// rational arithmetic.
#[derive(Clone, Copy, Debug)]
struct Scale {
    den: u64,
}

const WINF: u64 = u64::MAX;

impl Scale {
    fn for_inputs<'a>(dists: impl Iterator<Item = &'a Dist>) -> Result<Scale> {
        let mut den: u64 = 1;
        for d in dists {
            if let Some((_, q)) = d.parts() {
                den = num_integer::lcm(den, q);
                if den > 1 << 40 {
                    return Err(Error::budget("common denominator of the input distances", 1 << 40));
                }
            }
        }
        Ok(Scale { den })
    }

    fn to_w(self, d: Dist) -> u64 {
        match d.parts() {
            None => WINF,
            Some((p, q)) => p
                .checked_mul(self.den / q)
                .filter(|&v| v < 1 << 62)
                .expect("scaled distance fits"),
        }
    }

    fn to_dist(self, w: u64) -> Dist {
        if w == WINF {
            Dist::INF
        } else {
            Dist::ratio(w, self.den)
        }
    }
}

fn wadd(a: u64, b: u64) -> u64 {
    if a == WINF || b == WINF {
        WINF
    } else {
        a + b
    }
}

fn floyd_warshall_w(n: usize, d: &mut [u64]) {
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik == WINF {
                continue;
            }
            for j in 0..n {
                let dkj = d[k * n + j];
                if dkj != WINF && dik + dkj < d[i * n + j] {
                    d[i * n + j] = dik + dkj;
                }
            }
        }
    }
}

/// An equation compiled for evaluation by levels: subterm `i` becomes
/// evaluable once every variable it mentions is bound.
struct Compiled {
    nodes: Vec<CNode>,
    l: usize,
    r: usize,
    ground: Vec<usize>,
    /// `by_level[i]`: subterms whose largest variable is `i`, in post-order.
    by_level: Vec<Vec<usize>>,
    /// Row-major bounds on the distance between interpretations of two
    /// variables, when constrained.
    bounds: Option<Vec<u64>>,
    eps: u64,
    vars: usize,
}

enum CNode {
    Var(usize),
    App(usize, Vec<usize>),
}

impl Compiled {
    fn new(e: &Equation, scale: Scale) -> Compiled {
        let (l, r, eps) = e.sides();
        let vars = e.var_names().len();
        let mut nodes = Vec::new();
        let mut level = Vec::new();
        let mut memo = HashMap::new();
        fn add(
            t: &Term,
            nodes: &mut Vec<CNode>,
            level: &mut Vec<Option<usize>>,
            memo: &mut HashMap<Term, usize>,
        ) -> usize {
            if let Some(&i) = memo.get(t) {
                return i;
            }
            let (node, lv) = match t {
                Term::Var(x) => (CNode::Var(*x), Some(*x)),
                Term::App(op, args) => {
                    let kids: Vec<usize> = args.iter().map(|a| add(a, nodes, level, memo)).collect();
                    let lv = kids.iter().filter_map(|&k| level[k]).max();
                    (CNode::App(*op, kids), lv)
                }
            };
            nodes.push(node);
            level.push(lv);
            memo.insert(t.clone(), nodes.len() - 1);
            nodes.len() - 1
        }
        let li = add(l, &mut nodes, &mut level, &mut memo);
        let ri = add(r, &mut nodes, &mut level, &mut memo);
        let mut by_level = vec![Vec::new(); vars];
        let mut ground = Vec::new();
        for (i, lv) in level.iter().enumerate() {
            match lv {
                Some(v) => by_level[*v].push(i),
                None => ground.push(i),
            }
        }
        let bounds = match e {
            Equation::Plain(_) => None,
            _ => Some(e.bounds().into_iter().map(|d| scale.to_w(d)).collect()),
        };
        Compiled {
            nodes,
            l: li,
            r: ri,
            ground,
            by_level,
            bounds,
            eps: scale.to_w(eps),
            vars,
        }
    }
}

struct Engine {
    arities: Vec<usize>,
    compiled: Vec<Compiled>,
    scale: Scale,
    reps: Vec<Term>,
    n: usize,
    /// Scaled distances, row-major.
    d: Vec<u64>,
    /// Dense tables indexed by argument tuples over `0..n`.
    tables: Vec<Vec<u32>>,
    /// Defined entries `(op, args, value)`.
    entries: Vec<(usize, Vec<u32>, u32)>,
    /// Class of each generator.
    unit: Vec<u32>,
    passes: u64,
    created: usize,
    budget: usize,
}

impl Engine {
    fn new(p: &Presentation, m: &MetricSpace, budget: usize) -> Result<Self> {
        let arities = p.signature.symbols().iter().map(|s| s.arity.size()).collect();
        let mut inputs: Vec<Dist> = m.matrix().to_vec();
        for e in &p.equations {
            inputs.push(e.sides().2);
            inputs.extend(e.bounds());
        }
        let scale = Scale::for_inputs(inputs.iter())?;
        let n = m.len();
        let mut e = Engine {
            arities,
            compiled: p.equations.iter().map(|e| Compiled::new(e, scale)).collect(),
            scale,
            reps: (0..n).map(Term::Var).collect(),
            n,
            d: m.matrix().iter().map(|&d| scale.to_w(d)).collect(),
            tables: Vec::new(),
            entries: Vec::new(),
            unit: (0..n as u32).collect(),
            passes: 0,
            created: n,
            budget,
        };
        e.rebuild_tables()?;
        Ok(e)
    }

    fn rebuild_tables(&mut self) -> Result<()> {
        let n = self.n;
        let mut tables = Vec::with_capacity(self.arities.len());
        for &k in &self.arities {
            let len = (n as u128).pow(k as u32);
            if len > TABLE_LIMIT as u128 {
                return Err(Error::budget("dense operation table entries", TABLE_LIMIT));
            }
            tables.push(vec![UNDEF; len as usize]);
        }
        for (op, args, v) in &self.entries {
            let idx = args.iter().fold(0, |acc, &a| acc * n + a as usize);
            tables[*op][idx] = *v;
        }
        self.tables = tables;
        Ok(())
    }

    fn lookup(&self, op: usize, args: &[u32]) -> u32 {
        let idx = args.iter().fold(0, |acc, &a| acc * self.n + a as usize);
        self.tables[op][idx]
    }

    fn dist(&self, a: u32, b: u32) -> u64 {
        self.d[a as usize * self.n + b as usize]
    }

    /// Adds `σ(c_1, …, c_k)` for every tuple of existing classes lacking an
    /// entry.
    fn add_level(&mut self) -> Result<bool> {
        let old = self.n;
        let mut new_entries = Vec::new();
        for (op, &k) in self.arities.iter().enumerate() {
            let count = (old as u128).pow(k as u32);
            if count > self.budget as u128 * 64 {
                return Err(Error::budget("candidate terms per level", self.budget * 64));
            }
            let mut args = vec![0u32; k];
            for idx in 0..count as usize {
                let mut rest = idx;
                for slot in args.iter_mut().rev() {
                    *slot = (rest % old) as u32;
                    rest /= old;
                }
                if self.lookup(op, &args) == UNDEF {
                    new_entries.push((op, args.clone()));
                }
            }
        }
        if new_entries.is_empty() {
            return Ok(false);
        }
        let n = old + new_entries.len();
        if n > self.budget {
            return Err(Error::budget("free-algebra classes", self.budget));
        }
        let mut d = vec![WINF; n * n];
        for a in 0..old {
            d[a * n..a * n + old].copy_from_slice(&self.d[a * old..(a + 1) * old]);
        }
        for c in 0..n {
            d[c * n + c] = 0;
        }
        for (i, (op, args)) in new_entries.into_iter().enumerate() {
            let c = (old + i) as u32;
            let kids = args.iter().map(|&a| self.reps[a as usize].clone()).collect();
            self.reps.push(Term::App(op, kids));
            self.entries.push((op, args, c));
        }
        self.created += n - old;
        self.n = n;
        self.d = d;
        self.rebuild_tables()?;
        Ok(true)
    }

    fn run_to_fixpoint(&mut self) -> Result<()> {
        let pairs = (self.n as u64 * self.n.saturating_sub(1) as u64) / 2;
        let limit = pairs.saturating_mul(pairs).max(16);
        let mut local = 0u64;
        loop {
            let changed = self.pass();
            let merged = self.merge()?;
            self.passes += 1;
            local += 1;
            if !changed && !merged {
                return Ok(());
            }
            if local > limit {
                return Err(Error::Convergence { passes: local });
            }
        }
    }

    /// One round of axiom, congruence and triangle bounds. Returns whether
    /// any distance decreased.
    fn pass(&mut self) -> bool {
        let mut updates: Vec<(u32, u32, u64)> = Vec::new();
        for c in &self.compiled {
            updates.extend(self.axiom_updates(c));
        }
        updates.extend(self.congruence_updates());
        let n = self.n;
        let mut lowered = Vec::new();
        for (a, b, v) in updates {
            let (a, b) = (a as usize, b as usize);
            if v < self.d[a * n + b] {
                self.d[a * n + b] = v;
                self.d[b * n + a] = v;
                lowered.push((a, b, v));
            }
        }
        if lowered.is_empty() {
            return false;
        }
        let comp = self.components();
        let fw_cost: u128 = {
            let mut sizes: HashMap<u32, u128> = HashMap::new();
            for &c in &comp {
                *sizes.entry(c).or_default() += 1;
            }
            sizes.values().map(|&s| s * s * s).sum()
        };
        if (lowered.len() as u128) * (n as u128) * (n as u128) < fw_cost {
            for (a, b, _) in lowered {
                self.relax_edge(a, b);
            }
        } else {
            self.triangle_closure(&comp);
        }
        true
    }

    /// Restores the triangle inequality after lowering `d(a, b)` in a matrix
    /// that satisfied it before.
    fn relax_edge(&mut self, a: usize, b: usize) {
        let n = self.n;
        let w = self.d[a * n + b];
        let to_a: Vec<u64> = (0..n).map(|i| self.d[i * n + a]).collect();
        let to_b: Vec<u64> = (0..n).map(|i| self.d[i * n + b]).collect();
        for i in 0..n {
            let (ia, ib) = (to_a[i], to_b[i]);
            if ia == WINF && ib == WINF {
                continue;
            }
            let via_ab = wadd(ia, w);
            let via_ba = wadd(ib, w);
            for j in 0..n {
                let cand = wadd(via_ab, to_b[j]).min(wadd(via_ba, to_a[j]));
                if cand < self.d[i * n + j] {
                    self.d[i * n + j] = cand;
                }
            }
        }
    }

    fn axiom_updates(&self, c: &Compiled) -> Vec<(u32, u32, u64)> {
        let mut vals = vec![UNDEF; c.nodes.len()];
        if !self.eval_nodes(c, &c.ground, &mut vals) {
            return Vec::new();
        }
        if c.vars == 0 {
            return self.leaf_update(c, &vals).into_iter().collect();
        }
        par::flat_map_collect(self.n, |first| {
            let mut vals = vals.clone();
            let mut bound = vec![0u32; c.vars];
            let mut out = Vec::new();
            bound[0] = first as u32;
            self.bind(c, 0, &mut bound, &mut vals, &mut out);
            out
        })
    }

    fn bind(&self, c: &Compiled, i: usize, bound: &mut [u32], vals: &mut [u32], out: &mut Vec<(u32, u32, u64)>) {
        if let Some(b) = &c.bounds {
            let v = c.vars;
            if (0..i).any(|j| self.dist(bound[j], bound[i]) > b[j * v + i]) {
                return;
            }
        }
        if !self.eval_level(c, i, bound, vals) {
            return;
        }
        if i + 1 == c.vars {
            out.extend(self.leaf_update(c, vals));
            return;
        }
        for x in 0..self.n as u32 {
            bound[i + 1] = x;
            self.bind(c, i + 1, bound, vals, out);
        }
    }

    fn eval_app(&self, op: usize, kids: &[usize], vals: &[u32]) -> u32 {
        let idx = kids.iter().fold(0, |acc, &q| acc * self.n + vals[q] as usize);
        self.tables[op][idx]
    }

    fn eval_level(&self, c: &Compiled, i: usize, bound: &[u32], vals: &mut [u32]) -> bool {
        for &k in &c.by_level[i] {
            let v = match &c.nodes[k] {
                CNode::Var(x) => bound[*x],
                CNode::App(op, kids) => self.eval_app(*op, kids, vals),
            };
            if v == UNDEF {
                return false;
            }
            vals[k] = v;
        }
        true
    }

    fn eval_nodes(&self, c: &Compiled, which: &[usize], vals: &mut [u32]) -> bool {
        for &k in which {
            if let CNode::App(op, kids) = &c.nodes[k] {
                let v = self.eval_app(*op, kids, vals);
                if v == UNDEF {
                    return false;
                }
                vals[k] = v;
            }
        }
        true
    }

    fn leaf_update(&self, c: &Compiled, vals: &[u32]) -> Option<(u32, u32, u64)> {
        let (a, b) = (vals[c.l], vals[c.r]);
        (self.dist(a, b) > c.eps).then_some((a, b, c.eps))
    }

    /// Components of the graph of finite distances. The matrix is kept
    /// closed under the triangle inequality, so a component is a set of
    /// classes pairwise at finite distance.
    fn components(&self) -> Vec<u32> {
        let n = self.n;
        let mut comp = vec![UNDEF; n];
        let mut next = 0;
        for s in 0..n {
            if comp[s] != UNDEF {
                continue;
            }
            comp[s] = next;
            let mut stack = vec![s];
            while let Some(a) = stack.pop() {
                for (b, c) in comp.iter_mut().enumerate() {
                    if *c == UNDEF && self.d[a * n + b] != WINF {
                        *c = next;
                        stack.push(b);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    fn congruence_updates(&self) -> Vec<(u32, u32, u64)> {
        let comp = self.components();
        // Only entries whose arguments lie pairwise in the same components can
        // bound each other.
        let mut groups: HashMap<(usize, Vec<u32>), Vec<usize>> = HashMap::new();
        for (i, (op, args, _)) in self.entries.iter().enumerate() {
            if !args.is_empty() {
                let key = (*op, args.iter().map(|&a| comp[a as usize]).collect());
                groups.entry(key).or_default().push(i);
            }
        }
        let mut groups: Vec<Vec<usize>> = groups.into_values().filter(|g| g.len() > 1).collect();
        groups.sort();
        let work: Vec<(usize, usize)> = groups
            .iter()
            .enumerate()
            .flat_map(|(g, members)| (0..members.len()).map(move |i| (g, i)))
            .collect();
        par::flat_map_collect(work.len(), |w| {
            let (g, i) = work[w];
            let members = &groups[g];
            let (_, a, va) = &self.entries[members[i]];
            let mut out = Vec::new();
            for &j in &members[i + 1..] {
                let (_, b, vb) = &self.entries[j];
                let current = self.dist(*va, *vb);
                if current == 0 {
                    continue;
                }
                let bound = a.iter().zip(b).map(|(&x, &y)| self.dist(x, y)).max().unwrap_or(0);
                if bound < current {
                    out.push((*va, *vb, bound));
                }
            }
            out
        })
    }

    fn triangle_closure(&mut self, comp: &[u32]) {
        let n = self.n;
        let count = comp.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
        for (x, &c) in comp.iter().enumerate() {
            members[c as usize].push(x);
        }
        members.retain(|m| m.len() > 2);
        let closed: Vec<Vec<u64>> = par::map_slice(&members, |m| {
            let k = m.len();
            let mut sub = vec![WINF; k * k];
            for (i, &a) in m.iter().enumerate() {
                for (j, &b) in m.iter().enumerate() {
                    sub[i * k + j] = self.d[a * n + b];
                }
            }
            floyd_warshall_w(k, &mut sub);
            sub
        });
        for (m, sub) in members.iter().zip(closed) {
            let k = m.len();
            for (i, &a) in m.iter().enumerate() {
                for (j, &b) in m.iter().enumerate() {
                    self.d[a * n + b] = sub[i * k + j];
                }
            }
        }
    }

    /// Merges classes at distance zero and classes forced together by
    /// colliding table entries. Returns whether anything merged.
    fn merge(&mut self) -> Result<bool> {
        let n = self.n;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut any = false;
        for a in 0..n {
            for b in a + 1..n {
                if self.d[a * n + b] == 0 {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                        any = true;
                    }
                }
            }
        }
        // Colliding entries: same operation on the same classes.
        loop {
            let mut seen: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut grew = false;
            for (op, args, v) in &self.entries {
                let key = (*op, args.iter().map(|&a| find(&mut parent, a as usize)).collect());
                let rv = find(&mut parent, *v as usize);
                match seen.get(&key) {
                    Some(&other) => {
                        let ro = find(&mut parent, other);
                        if ro != rv {
                            parent[ro.max(rv)] = ro.min(rv);
                            grew = true;
                        }
                    }
                    None => {
                        seen.insert(key, rv);
                    }
                }
            }
            if !grew {
                break;
            }
            any = true;
        }
        if !any {
            return Ok(false);
        }
        let roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
        let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
        for (x, &r) in roots.iter().enumerate() {
            members.entry(r).or_default().push(x);
        }
        // New classes ordered by their least term.
        let mut classes: Vec<(Term, Vec<usize>)> = members
            .into_values()
            .map(|m| {
                let rep = m.iter().map(|&x| &self.reps[x]).min().expect("nonempty class").clone();
                (rep, m)
            })
            .collect();
        classes.sort_by(|a, b| a.0.cmp(&b.0));
        let k = classes.len();
        let mut class_of = vec![0u32; n];
        for (c, (_, m)) in classes.iter().enumerate() {
            for &x in m {
                class_of[x] = c as u32;
            }
        }
        let mut d = vec![WINF; k * k];
        for a in 0..n {
            let ca = class_of[a] as usize;
            for b in 0..n {
                let slot = &mut d[ca * k + class_of[b] as usize];
                *slot = (*slot).min(self.d[a * n + b]);
            }
        }
        let mut entries: Vec<(usize, Vec<u32>, u32)> = self
            .entries
            .iter()
            .map(|(op, args, v)| (*op, args.iter().map(|&a| class_of[a as usize]).collect(), class_of[*v as usize]))
            .collect();
        entries.sort();
        entries.dedup();
        self.reps = classes.into_iter().map(|(t, _)| t).collect();
        for u in &mut self.unit {
            *u = class_of[*u as usize];
        }
        self.n = k;
        self.d = d;
        self.entries = entries;
        self.rebuild_tables()?;
        // Members of a class may have carried different distances.
        let comp = self.components();
        self.triangle_closure(&comp);
        Ok(true)
    }

    fn is_total(&self) -> bool {
        self.tables.iter().all(|t| t.iter().all(|&v| v != UNDEF))
    }

    fn class_of(&self, t: &Term) -> Option<u32> {
        match t {
            Term::Var(x) => self.unit.get(*x).copied(),
            Term::App(op, args) => {
                let cs = args.iter().map(|a| self.class_of(a)).collect::<Option<Vec<_>>>()?;
                let v = self.lookup(*op, &cs);
                (v != UNDEF).then_some(v)
            }
        }
    }
}

/// Builds the depth-bounded free algebra of `p` on `m`.
pub fn free_algebra(p: &Presentation, m: Arc<MetricSpace>, depth: usize) -> Result<FreeAlgebraApprox> {
    free_algebra_with_budget(p, m, depth, DEFAULT_CLASS_BUDGET)
}

pub fn free_algebra_with_budget(
    p: &Presentation,
    m: Arc<MetricSpace>,
    depth: usize,
    budget: usize,
) -> Result<FreeAlgebraApprox> {
    if !p.signature.is_finitary() {
        return Err(Error::input("free algebras are built for finitary signatures only"));
    }
    let mut e = Engine::new(p, &m, budget)?;
    e.run_to_fixpoint()?;
    let mut previous: Option<(Vec<Term>, Vec<u64>)> = None;
    for _ in 0..depth {
        let snapshot = (e.reps.clone(), e.d.clone());
        if !e.add_level()? {
            break;
        }
        e.run_to_fixpoint()?;
        previous = Some(snapshot);
    }
    let exactness = if e.is_total() {
        Exactness::Closed
    } else if let Some((reps, d)) = previous {
        let k = reps.len();
        let now: Vec<Option<u32>> = reps.iter().map(|t| e.class_of(t)).collect();
        let stable = (0..k).all(|a| {
            (0..k).all(|b| match (now[a], now[b]) {
                (Some(x), Some(y)) => e.dist(x, y) == d[a * k + b],
                _ => false,
            })
        });
        if stable {
            Exactness::StableAcrossDepth
        } else {
            Exactness::UpperBound
        }
    } else {
        Exactness::UpperBound
    };
    let n = e.n;
    let labels: Vec<String> = e
        .reps
        .iter()
        .map(|t| t.display(&p.signature, m.labels()).to_string())
        .collect();
    let (d, scale) = (e.d.clone(), e.scale);
    let carrier = Arc::new(MetricSpace::from_fn_unchecked(labels, |a, b| scale.to_dist(d[a * n + b]))?);
    let tables = e
        .tables
        .iter()
        .map(|t| t.iter().map(|&v| (v != UNDEF).then_some(v as usize)).collect())
        .collect();
    let quotient = QuantAlgebra::new_partial(p.signature.clone(), carrier.clone(), tables)?;
    let unit = NonexpandingMap::new(m.clone(), carrier, e.unit.iter().map(|&c| c as usize).collect())?;
    Ok(FreeAlgebraApprox {
        presentation: p.clone(),
        generators: m,
        depth,
        reps: e.reps,
        quotient,
        unit,
        exactness,
        passes: e.passes,
        classes_created: e.created,
    })
}

/// Outcome of [`universal_property_check`].
#[derive(Clone, Debug, Default, Serialize)]
pub struct UniversalReport {
    /// The target algebra fails the presentation; nothing else is checked.
    pub precondition: Option<String>,
    /// `h(class) = f♯(representative)` on every class.
    pub h: Vec<String>,
    pub violations: Vec<String>,
    /// Every class is reached from the generators through the tables, so `h`
    /// is the only candidate.
    pub unique: bool,
    /// Tuples of classes without a table entry (the depth boundary).
    pub undefined_tuples: usize,
}

impl UniversalReport {
    pub fn holds(&self) -> bool {
        self.precondition.is_none() && self.violations.is_empty() && self.unique
    }
}

/// Checks that `f: M → A` extends along the unit to a homomorphism from the
/// quotient into `a`.
pub fn universal_property_check(free: &FreeAlgebraApprox, a: &QuantAlgebra, f: &NonexpandingMap) -> Result<UniversalReport> {
    let mut report = UniversalReport::default();
    if let Some(fail) = crate::equations::variety_membership(a, &free.presentation)? {
        report.precondition = Some(format!("target fails `{}`: {}", fail.text, fail.witness));
        return Ok(report);
    }
    if f.dom().len() != free.generators.len() || f.cod().len() != a.len() {
        return Err(Error::input("map must go from the generators to the target carrier"));
    }
    let h: Vec<usize> = free
        .reps
        .iter()
        .map(|t| a.eval(t, f.assignment()))
        .collect::<Result<_>>()?;
    report.h = h.iter().map(|&y| a.carrier().label(y).to_string()).collect();
    let q = &free.quotient;
    for x in 0..free.generators.len() {
        if h[free.unit.apply(x)] != f.apply(x) {
            report.violations.push(format!(
                "h(unit({})) = {} but f gives {}",
                free.generators.label(x),
                a.carrier().label(h[free.unit.apply(x)]),
                a.carrier().label(f.apply(x))
            ));
        }
    }
    let n = free.len();
    for op in 0..q.signature().len() {
        let k = q.signature().arity(op).size();
        report.undefined_tuples += n.pow(k as u32) - q.entries(op).len();
        for (args, v) in q.entries(op) {
            let image: Vec<usize> = args.iter().map(|&c| h[c]).collect();
            if a.apply(op, &image) != Some(h[v]) {
                report.violations.push(format!(
                    "h does not commute with `{}` at ({})",
                    q.signature().symbol(op).name,
                    args.iter().map(|&c| free.rep_string(c)).collect::<Vec<_>>().join(", ")
                ));
            }
        }
    }
    for c in 0..n {
        for e in c + 1..n {
            if a.carrier().d(h[c], h[e]) > free.d(c, e) {
                report.violations.push(format!(
                    "h expands d({}, {})",
                    free.rep_string(c),
                    free.rep_string(e)
                ));
            }
        }
    }
    // Uniqueness: every class is generated from the unit through the tables.
    let mut reached = vec![false; n];
    for x in 0..free.generators.len() {
        reached[free.unit.apply(x)] = true;
    }
    loop {
        let mut grew = false;
        for op in 0..q.signature().len() {
            for (args, v) in q.entries(op) {
                if !reached[v] && args.iter().all(|&c| reached[c]) {
                    reached[v] = true;
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    report.unique = reached.iter().all(|&r| r);
    Ok(report)
}

/// Outcome of comparing the quotient with a model of the free algebra.
#[derive(Clone, Debug, Default, Serialize)]
pub struct OracleReport {
    pub oracle: String,
    pub classes: usize,
    pub injective: bool,
    pub mismatches: Vec<String>,
    /// Some class representative could not be evaluated by the oracle.
    pub unevaluable: Vec<String>,
}

impl OracleReport {
    pub fn matches(&self) -> bool {
        self.injective && self.mismatches.is_empty() && self.unevaluable.is_empty()
    }
}

/// A model of the free algebra: generators, operations by symbol name, and
/// distances between its elements.
pub trait FreeModel: Sync {
    type Elem: Clone + Eq + std::hash::Hash + std::fmt::Debug + Send + Sync;

    fn name(&self) -> String;
    fn generator(&self, x: usize) -> Option<Self::Elem>;
    fn operation(&self, symbol: &str, args: &[Self::Elem]) -> Option<Self::Elem>;
    fn distance(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Dist>;
}

/// Evaluates every class representative in the model and checks that the
/// resulting map is injective and distance preserving. On success the
/// approximation is marked [`Exactness::OracleCertified`], unless it already
/// is closed.
pub fn compare_with_oracle<O: FreeModel>(free: &mut FreeAlgebraApprox, oracle: &O) -> (OracleReport, Vec<Option<O::Elem>>) {
    let sig = free.presentation.signature.clone();
    fn eval<O: FreeModel>(t: &Term, o: &O, sig: &crate::terms::Signature) -> Option<O::Elem> {
        match t {
            Term::Var(x) => o.generator(*x),
            Term::App(op, args) => {
                let vs = args.iter().map(|a| eval(a, o, sig)).collect::<Option<Vec<_>>>()?;
                o.operation(&sig.symbol(*op).name, &vs)
            }
        }
    }
    let images: Vec<Option<O::Elem>> = par::map_slice(&free.reps, |t| eval(t, oracle, &sig));
    let mut report = OracleReport {
        oracle: oracle.name(),
        classes: free.len(),
        injective: true,
        ..Default::default()
    };
    for (c, img) in images.iter().enumerate() {
        if img.is_none() {
            report.unevaluable.push(free.rep_string(c));
        }
    }
    let mut seen: HashMap<&O::Elem, usize> = HashMap::new();
    for (c, img) in images.iter().enumerate() {
        if let Some(e) = img {
            if let Some(&other) = seen.get(e) {
                report.injective = false;
                report.mismatches.push(format!(
                    "{} and {} map to the same element",
                    free.rep_string(other),
                    free.rep_string(c)
                ));
            } else {
                seen.insert(e, c);
            }
        }
    }
    let n = free.len();
    let found: Vec<String> = par::flat_map_collect(n, |a| {
        let mut out = Vec::new();
        for b in a + 1..n {
            if let (Some(x), Some(y)) = (&images[a], &images[b]) {
                let got = free.d(a, b);
                match oracle.distance(x, y) {
                    Ok(want) if want == got => {}
                    Ok(want) => out.push(format!(
                        "d({}, {}) = {got}, model gives {want}",
                        free.rep_string(a),
                        free.rep_string(b)
                    )),
                    Err(e) => out.push(format!(
                        "d({}, {}): model distance unavailable: {e}",
                        free.rep_string(a),
                        free.rep_string(b)
                    )),
                }
            }
        }
        out
    });
    report.mismatches.extend(found);
    if report.matches() && free.exactness != Exactness::Closed {
        free.exactness = Exactness::OracleCertified;
    }
    (report, images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::presets;
    use crate::metric::is_isometric;
    use crate::terms::Signature;

    fn space(points: &[&str], pairs: &[(&str, &str, Dist)]) -> Arc<MetricSpace> {
        Arc::new(MetricSpace::from_pairs(points, pairs).unwrap())
    }

    #[test]
    fn empty_presentation_is_the_space() {
        let p = Presentation::new("none", Arc::new(Signature::empty()), vec![]).unwrap();
        let m = space(&["a", "b", "c"], &[("a", "b", Dist::ONE), ("b", "c", Dist::ONE), ("a", "c", Dist::int(2))]);
        let f = free_algebra(&p, m.clone(), 3).unwrap();
        assert!(is_isometric(f.quotient.carrier(), &m));
        assert!(f.unit.is_isometric_embedding());
        assert_eq!(f.exactness, Exactness::Closed);
    }

    #[test]
    fn quasi_discrete_two_classes() {
        let p = presets::quasi_discrete();
        for n in 0..4u32 {
            let mut labels = vec!["-1".to_string()];
            labels.extend((0..=n).map(|k| format!("2^-{k}")));
            let pos = |k: u32| Dist::pow2_neg(k);
            let m = MetricSpace::from_fn(labels, |i, j| {
                let v = |i: usize| if i == 0 { None } else { Some(pos(i as u32 - 1)) };
                match (v(i), v(j)) {
                    _ if i == j => Dist::ZERO,
                    (None, Some(x)) | (Some(x), None) => Dist::ONE + x,
                    (Some(x), Some(y)) => {
                        if x > y {
                            subtract(x, y)
                        } else {
                            subtract(y, x)
                        }
                    }
                    (None, None) => Dist::ZERO,
                }
            })
            .unwrap();
            let f = free_algebra(&p, Arc::new(m), 2).unwrap();
            assert_eq!(f.len(), 2);
            assert_eq!(f.d(0, 1), Dist::ONE + Dist::pow2_neg(n));
        }
    }

    fn subtract(a: Dist, b: Dist) -> Dist {
        let ((p, q), (r, s)) = (a.parts().unwrap(), b.parts().unwrap());
        Dist::ratio(p * s - r * q, q * s)
    }

    #[test]
    fn almost_commutative_swap() {
        let eps = Dist::ratio(1, 2);
        let p = presets::almost_commutative(eps);
        let m = space(&["x", "y"], &[("x", "y", Dist::ONE)]);
        let f = free_algebra(&p, m, 2).unwrap();
        let xy = Term::app(0, vec![Term::var(0), Term::var(1)]);
        let yx = Term::app(0, vec![Term::var(1), Term::var(0)]);
        assert_eq!(f.distance(&xy, &yx).unwrap(), eps);
    }

    #[test]
    fn semilattice_on_two_points_closes() {
        let p = presets::semilattice();
        let m = space(&["a", "b"], &[("a", "b", Dist::ONE)]);
        let f = free_algebra(&p, m.clone(), 3).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.exactness, Exactness::Closed);
        let a = QuantAlgebra::from_fn(p.signature.clone(), f.quotient.carrier().clone(), |op, x| {
            f.quotient.apply(op, x).unwrap()
        })
        .unwrap();
        assert!(crate::equations::variety_membership(&a, &p).unwrap().is_none());
        let id = NonexpandingMap::new(m, a.carrier().clone(), f.unit.assignment().to_vec()).unwrap();
        let r = universal_property_check(&f, &a, &id).unwrap();
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn monoid_depth_bound_is_reported() {
        let p = presets::monoid();
        let m = space(&["x"], &[]);
        let f = free_algebra(&p, m, 2).unwrap();
        // e, x, xx, xxx, xxxx
        assert_eq!(f.len(), 5);
        assert!(!f.exactness.is_exact());
        assert!(!f.quotient.is_total());
    }
}
