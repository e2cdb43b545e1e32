use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::dist::Dist;
use crate::equations::presets;
use crate::error::{Error, Result};
use crate::free::{free_algebra, FreeAlgebraApprox};
use crate::metric::{hausdorff_by, MetricSpace};
use crate::terms::Term;

use super::{Elem, MonadInstance, TSpace, DEFAULT_CARRIER_LIMIT};

pub const INSTANCE_NAMES: &[&str] = &[
    "word",
    "commutative_word",
    "almost_commutative",
    "finite_hausdorff",
    "quasi_discrete_reflection",
    "tensor_word",
    "word_drop_last",
    "bin_terms",
];

/// Looks an instance up by name. `size` is the word length, subset size or
/// term depth cap; `eps` feeds `almost_commutative`.
pub fn by_name(name: &str, size: usize, eps: Dist) -> Option<Box<dyn MonadInstance>> {
    Some(match name {
        "word" => Box::new(Word::new(size)),
        "commutative_word" => Box::new(CommutativeWord::new(size)),
        "almost_commutative" => Box::new(AlmostCommutative::new(eps, size.min(4), 3)),
        "finite_hausdorff" => Box::new(FiniteHausdorff::new(Some(size))),
        "quasi_discrete_reflection" => Box::new(QuasiDiscreteReflection::new()),
        "tensor_word" => Box::new(TensorWord::new(size)),
        "word_drop_last" => Box::new(WordDropLast::new(size)),
        "bin_terms" => Box::new(BinTerms::new(size)),
        _ => return None,
    })
}

fn point(e: &Elem) -> usize {
    e.as_point().expect("leaf expected")
}

fn pair_index(pairs: &[(usize, usize)]) -> HashMap<(usize, usize), usize> {
    pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect()
}

/// All words of length `≤ max_len` over `n` letters, shorter first, then
/// lexicographic.
fn words(n: usize, max_len: usize) -> Result<Vec<Vec<usize>>> {
    let mut total: u128 = 0;
    for k in 0..=max_len {
        total += (n as u128).pow(k as u32);
        if total > DEFAULT_CARRIER_LIMIT as u128 {
            return Err(Error::budget("elements of TM", DEFAULT_CARRIER_LIMIT));
        }
    }
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for x in 0..n {
                let mut v: Vec<usize> = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    Ok(out)
}

/// Nondecreasing words, i.e. multisets, of size `≤ max_size`.
fn multisets(n: usize, max_size: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_size {
        let mut next = Vec::new();
        for w in &layer {
            let from = w.last().copied().unwrap_or(0);
            for x in from..n {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        if out.len() > DEFAULT_CARRIER_LIMIT {
            return Err(Error::budget("elements of TM", DEFAULT_CARRIER_LIMIT));
        }
        layer = next;
    }
    Ok(out)
}

fn flatten(tt: &Elem) -> Vec<Elem> {
    tt.children().iter().flat_map(|inner| inner.children().iter().cloned()).collect()
}

fn word_carrier(m: &Arc<MetricSpace>, max_len: usize) -> Result<TSpace> {
    let elems = words(m.len(), max_len)?
        .into_iter()
        .map(|w| Elem::points_node(Elem::WORD, w))
        .collect();
    Ok(TSpace::new(m.clone(), elems))
}

fn letterwise(m: &MetricSpace, a: &Elem, b: &Elem, sum: bool) -> Dist {
    let (a, b) = (a.children(), b.children());
    if a.len() != b.len() {
        return Dist::INF;
    }
    let ds = a.iter().zip(b).map(|(x, y)| m.d(point(x), point(y)));
    if sum {
        ds.fold(Dist::ZERO, |acc, d| acc + d)
    } else {
        ds.max().unwrap_or(Dist::ZERO)
    }
}

fn word_operation(symbol: &str, args: &[Elem]) -> Option<Elem> {
    match (symbol, args) {
        ("*", [a, b]) => Some(Elem::node(
            Elem::WORD,
            a.children().iter().chain(b.children()).cloned().collect(),
        )),
        ("e", []) => Some(Elem::node(Elem::WORD, Vec::new())),
        _ => None,
    }
}

/// Free quantitative monoids: words, with distance `∞` across lengths and
/// the maximum of letter distances within a length.
#[derive(Clone, Debug)]
pub struct Word {
    pub max_len: usize,
}

impl Word {
    pub fn new(max_len: usize) -> Self {
        Word { max_len }
    }
}

impl MonadInstance for Word {
    fn name(&self) -> String {
        "word".into()
    }

    fn carrier(&self, m: &Arc<MetricSpace>) -> Result<TSpace> {
        word_carrier(m, self.max_len)
    }

    fn unit(&self, _m: &Arc<MetricSpace>, x: usize) -> Result<Elem> {
        Ok(Elem::points_node(Elem::WORD, [x]))
    }

    fn join(&self, tt: &Elem) -> Elem {
        Elem::node(Elem::WORD, flatten(tt))
    }

    fn distance(&self, m: &Arc<MetricSpace>, a: &Elem, b: &Elem) -> Result<Dist> {
        Ok(letterwise(m, a, b, false))
    }

    fn operations(&self) -> Vec<(&'static str, usize)> {
        vec![("*", 2), ("e", 0)]
    }

    fn operation(&self, symbol: &str, args: &[Elem]) -> Option<Elem> {
        word_operation(symbol, args)
    }

    fn witness(&self, _m: &MetricSpace, pairs: &[(usize, usize)], a: &Elem, b: &Elem) -> Option<Option<Elem>> {
        let index = pair_index(pairs);
        let (a, b) = (a.children(), b.children());
        if a.len() != b.len() {
            return Some(None);
        }
        let zipped: Option<Vec<usize>> = a
            .iter()
            .zip(b)
            .map(|(x, y)| index.get(&(point(x), point(y))).copied())
            .collect();
        Some(zipped.map(|p| Elem::points_node(Elem::WORD, p)))
    }
}

/// Words under the tensor (sum) metric. This is the free monoid for the
/// tensor product; as a functor it is not enriched.
#[derive(Clone, Debug)]
pub struct TensorWord {
    pub max_len: usize,
}

impl TensorWord {
    pub fn new(max_len: usize) -> Self {
        TensorWord { max_len }
    }
}

impl MonadInstance for TensorWord {
    fn name(&self) -> String {
        "tensor_word".into()
    }

    fn carrier(&self, m: &Arc<MetricSpace>) -> Result<TSpace> {
        word_carrier(m, self.max_len)
    }

    fn unit(&self, _m: &Arc<MetricSpace>, x: usize) -> Result<Elem> {
        Ok(Elem::points_node(Elem::WORD, [x]))
    }

    fn join(&self, tt: &Elem) -> Elem {
        Elem::node(Elem::WORD, flatten(tt))
    }

    fn distance(&self, m: &Arc<MetricSpace>, a: &Elem, b: &Elem) -> Result<Dist> {
        Ok(letterwise(m, a, b, true))
    }

    fn operations(&self) -> Vec<(&'static str, usize)> {
        vec![("*", 2), ("e", 0)]
    }

    fn operation(&self, symbol: &str, args: &[Elem]) -> Option<Elem> {
        word_operation(symbol, args)
    }
}

/// The word monad with a broken multiplication that drops the last letter of
/// every concatenation. Used to see the law checker fail.
#[derive(Clone, Debug)]
pub struct WordDropLast {
    pub max_len: usize,
}

impl WordDropLast {
    pub fn new(max_len: usize) -> Self {
        WordDropLast { max_len }
    }
}

impl MonadInstance for WordDropLast {
    fn name(&self) -> String {
        "word_drop_last".into()
    }

    fn carrier(&self, m: &Arc<MetricSpace>) -> Result<TSpace> {
        word_carrier(m, self.max_len)
    }

    fn unit(&self, _m: &Arc<MetricSpace>, x: usize) -> Result<Elem> {
        Ok(Elem::points_node(Elem::WORD, [x]))
    }

    fn join(&self, tt: &Elem) -> Elem {
        let mut w = flatten(tt);
        w.pop();
        Elem::node(Elem::WORD, w)
    }

    fn distance(&self, m: &Arc<MetricSpace>, a: &Elem, b: &Elem) -> Result<Dist> {
        Ok(letterwise(m, a, b, false))
    }
}

/// `min` over bijections of the largest matched distance, with one optimal
/// matching (`matching[i]` is the partner of `a[i]`).
fn bottleneck(m: &MetricSpace, a: &[usize], b: &[usize]) -> Option<(Dist, Vec<usize>)> {
    if a.len() != b.len() {
        return None;
    }
    if a.is_empty() {
        return Some((Dist::ZERO, Vec::new()));
    }
    let mut thresholds: Vec<Dist> = a.iter().flat_map(|&x| b.iter().map(move |&y| m.d(x, y))).collect();
    thresholds.sort();
    thresholds.dedup();
    thresholds
        .into_iter()
        .find_map(|t| perfect_matching(a.len(), |i, j| m.d(a[i], b[j]) <= t).map(|mt| (t, mt)))
}

/// Kuhn's augmenting-path matching on an `n × n` bipartite graph.
fn perfect_matching(n: usize, edge: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    fn augment(i: usize, edge: &impl Fn(usize, usize) -> bool, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for j in 0..seen.len() {
            if edge(i, j) && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, edge, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; n];
    for i in 0..n {
        if !augment(i, &edge, &mut vec![false; n], &mut owner) {
            return None;
        }
    }
    let mut partner = vec![0; n];
    for (j, o) in owner.iter().enumerate() {
        partner[o.expect("perfect")] = j;
    }
    Some(partner)
}

/// Free commutative quantitative monoids: finite multisets, at the least
/// over permutations of the largest letter distance.
#[derive(Clone, Debug)]
pub struct CommutativeWord {
    pub max_size: usize,
}

impl CommutativeWord {
    pub fn new(max_size: usize) -> Self {
        CommutativeWord { max_size }
    }
}

fn sorted(tag: u8, mut kids: Vec<Elem>) -> Elem {
    kids.sort();
    Elem::node(tag, kids)
}

impl MonadInstance for CommutativeWord {
    fn name(&self) -> String {
        "commutative_word".into()
    }

    fn carrier(&self, m: &Arc<MetricSpace>) -> Result<TSpace> {
        let elems = multisets(m.len(), self.max_size)?
            .into_iter()
            .map(|w| Elem::points_node(Elem::BAG, w))
            .collect();
        Ok(TSpace::new(m.clone(), elems))
    }

    fn unit(&self, _m: &Arc<MetricSpace>, x: usize) -> Result<Elem> {
        Ok(Elem::points_node(Elem::BAG, [x]))
    }

    fn join(&self, tt: &Elem) -> Elem {
        sorted(Elem::BAG, flatten(tt))
    }

    fn canonical(&self, e: Elem) -> Elem {
        match e {
            Elem::Node(tag, kids) => sorted(tag, kids),
            p => p,
        }
    }

    fn distance(&self, m: &Arc<MetricSpace>, a: &Elem, b: &Elem) -> Result<Dist> {
        Ok(bottleneck(m, &a.points(), &b.points()).map_or(Dist::INF, |(d, _)| d))
    }

    fn operations(&self) -> Vec<(&'static str, usize)> {
        vec![("*", 2), ("e", 0)]
    }

    fn operation(&self, symbol: &str, args: &[Elem]) -> Option<Elem> {
        word_operation(symbol, args).map(|w| self.canonical(Elem::node(Elem::BAG, w.children().to_vec())))
    }

    fn witness(&self, m: &MetricSpace, pairs: &[(usize, usize)], a: &Elem, b: &Elem) -> Option<Option<Elem>> {
        let index = pair_index(pairs);
        let (xs, ys) = (a.points(), b.points());
        let found = bottleneck(m, &xs, &ys).and_then(|(_, partner)| {
            let p: Option<Vec<usize>> = (0..xs.len())
                .map(|i| index.get(&(xs[i], ys[partner[i]])).copied())
                .collect();
            p.map(|p| sorted(Elem::BAG, p.into_iter().map(Elem::Point).collect()))
        });
        Some(found)
    }
}

/// Finite subsets (including `∅`) under the Hausdorff metric; the monad of
/// quantitative semilattices with `0`. `max_size` caps the subset size.
#[derive(Clone, Debug)]
pub struct FiniteHausdorff {
    pub max_size: Option<usize>,
}

impl FiniteHausdorff {
    pub fn new(max_size: Option<usize>) -> Self {
        FiniteHausdorff { max_size }
    }
}

fn set_of(mut kids: Vec<Elem>) -> Elem {
    kids.sort();
    kids.dedup();
    Elem::node(Elem::SET, kids)
}

impl MonadInstance for FiniteHausdorff {
    fn name(&self) -> String {
        "finite_hausdorff".into()
    }

    fn carrier(&self, m: &Arc<MetricSpace>) -> Result<TSpace> {
        let n = m.len();
        let cap = self.max_size.unwrap_or(n).min(n);
        let mut subsets: Vec<Vec<usize>> = vec![Vec::new()];
        let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..cap {
            let mut next = Vec::new();
            for s in &layer {
                let from = s.last().map_or(0, |&l| l + 1);
                for x in from..n {
                    let mut v = s.clone();
                    v.push(x);
                    next.push(v);
                }
            }
            subsets.extend(next.iter().cloned());
            if subsets.len() > DEFAULT_CARRIER_LIMIT {
                return Err(Error::budget("elements of TM", DEFAULT_CARRIER_LIMIT));
            }
            layer = next;
        }
        let elems = subsets.into_iter().map(|s| Elem::points_node(Elem::SET, s)).collect();
        Ok(TSpace::new(m.clone(), elems))
    }

    fn unit(&self, _m: &Arc<MetricSpace>, x: usize) -> Result<Elem> {
        Ok(Elem::points_node(Elem::SET, [x]))
    }

    fn join(&self, tt: &Elem) -> Elem {
        set_of(flatten(tt))
    }

    fn canonical(&self, e: Elem) -> Elem {
        match e {
            Elem::Node(_, kids) => set_of(kids),
            p => p,
        }
    }

    fn distance(&self, m: &Arc<MetricSpace>, a: &Elem, b: &Elem) -> Result<Dist> {
        Ok(hausdorff_by(&a.points(), &b.points(), |&x, &y| m.d(x, y)))
    }

    fn operations(&self) -> Vec<(&'static str, usize)> {
        vec![("+", 2), ("0", 0)]
    }

    fn operation(&self, symbol: &str, args: &[Elem]) -> Option<Elem> {
        match (symbol, args) {
            ("+", [a, b]) => Some(set_of(a.children().iter().chain(b.children()).cloned().collect())),
            ("0", []) => Some(set_of(Vec::new())),
            _ => None,
        }
    }

    /// `P = {(a, b_a)} ∪ {(a^b, b)}` with `b_a` a nearest point of `B` to
    /// `a` and `a^b` one of `A` to `b`.
    fn witness(&self, m: &MetricSpace, pairs: &[(usize, usize)], a: &Elem, b: &Elem) -> Option<Option<Elem>> {
        let index = pair_index(pairs);
        let (xs, ys) = (a.points(), b.points());
        let nearest = |x: usize, to: &[usize]| to.iter().copied().min_by_key(|&y| m.d(x, y));
        let mut p = Vec::new();
        for &x in &xs {
            let Some(y) = nearest(x, &ys) else { return Some(None) };
            p.push(index.get(&(x, y)).copied());
        }
        for &y in &ys {
            let Some(x) = nearest(y, &xs) else { return Some(None) };
            p.push(index.get(&(x, y)).copied());
        }
        let p: Option<Vec<usize>> = p.into_iter().collect();
        Some(p.map(|p| set_of(p.into_iter().map(Elem::Point).collect())))
    }
}

type Cache = Mutex<HashMap<(Vec<String>, Vec<Dist>), Arc<FreeAlgebraApprox>>>;

fn cached(cache: &Cache, m: &Arc<MetricSpace>, build: impl FnOnce() -> Result<FreeAlgebraApprox>) -> Result<Arc<FreeAlgebraApprox>> {
    let key = (m.labels().to_vec(), m.matrix().to_vec());
    if let Some(f) = cache.lock().expect("cache lock").get(&key) {
        return Ok(f.clone());
    }
    let f = Arc::new(build()?);
    cache.lock().expect("cache lock").insert(key, f.clone());
    Ok(f)
}

/// Free almost commutative monoids: words, with the metric read off the
/// free-algebra approximation of the presentation at the given depth.
pub struct AlmostCommutative {
    pub eps: Dist,
    pub max_len: usize,
    pub depth: usize,
    cache: Cache,
}

impl AlmostCommutative {
    pub fn new(eps: Dist, max_len: usize, depth: usize) -> Self {
        AlmostCommutative {
            eps,
            max_len,
            depth,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn free(&self, m: &Arc<MetricSpace>) -> Result<Arc<FreeAlgebraApprox>> {
        cached(&self.cache, m, || {
            free_algebra(&presets::almost_commutative(self.eps), m.clone(), self.depth)
        })
    }

    /// The word as a balanced product; `e` for the empty word.
    fn term(letters: &[Elem]) -> Term {
        match letters {
            [] => Term::app(1, Vec::new()),
            [x] => Term::var(point(x)),
            _ => {
                let (l, r) = letters.split_at(letters.len().div_ceil(2));
                Term::app(0, vec![Self::term(l), Self::term(r)])
            }
        }
    }
}

impl MonadInstance for AlmostCommutative {
    fn name(&self) -> String {
        format!("almost_commutative({})", self.eps)
    }

    fn carrier(&self, m: &Arc<MetricSpace>) -> Result<TSpace> {
        word_carrier(m, self.max_len)
    }

    fn unit(&self, _m: &Arc<MetricSpace>, x: usize) -> Result<Elem> {
        Ok(Elem::points_node(Elem::WORD, [x]))
    }

    fn join(&self, tt: &Elem) -> Elem {
        Elem::node(Elem::WORD, flatten(tt))
    }

    fn distance(&self, m: &Arc<MetricSpace>, a: &Elem, b: &Elem) -> Result<Dist> {
        let free = self.free(m)?;
        let class = |w: &Elem| {
            free.class_of(&Self::term(w.children())).ok_or_else(|| {
                Error::budget(
                    format!("word {} beyond the free-algebra depth", w.display(m.labels())),
                    self.depth,
                )
            })
        };
        Ok(free.d(class(a)?, class(b)?))
    }

    fn operations(&self) -> Vec<(&'static str, usize)> {
        vec![("*", 2), ("e", 0)]
    }

    fn operation(&self, symbol: &str, args: &[Elem]) -> Option<Elem> {
        word_operation(symbol, args)
    }
}

/// The free quasi-discrete space: the reflection of `M` into spaces in which
/// any two points at distance `≤ 1` coincide. Elements are the classes.
pub struct QuasiDiscreteReflection {
    cache: Cache,
}

impl Default for QuasiDiscreteReflection {
    fn default() -> Self {
        Self::new()
    }
}

impl QuasiDiscreteReflection {
    pub fn new() -> Self {
        QuasiDiscreteReflection {
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn free(&self, m: &Arc<MetricSpace>) -> Result<Arc<FreeAlgebraApprox>> {
        cached(&self.cache, m, || free_algebra(&presets::quasi_discrete(), m.clone(), 0))
    }

    fn classes(&self, m: &Arc<MetricSpace>) -> Result<(Arc<FreeAlgebraApprox>, Vec<Vec<usize>>)> {
        let free = self.free(m)?;
        let mut members = vec![Vec::new(); free.len()];
        for x in 0..m.len() {
            members[free.unit.apply(x)].push(x);
        }
        Ok((free, members))
    }
}

impl MonadInstance for QuasiDiscreteReflection {
    fn name(&self) -> String {
        "quasi_discrete_reflection".into()
    }

    fn carrier(&self, m: &Arc<MetricSpace>) -> Result<TSpace> {
        let (_, members) = self.classes(m)?;
        let elems = members.into_iter().map(|c| Elem::points_node(Elem::CLASS, c)).collect();
        Ok(TSpace::new(m.clone(), elems))
    }

    fn unit(&self, m: &Arc<MetricSpace>, x: usize) -> Result<Elem> {
        let (free, members) = self.classes(m)?;
        Ok(Elem::points_node(Elem::CLASS, members[free.unit.apply(x)].clone()))
    }

    fn join(&self, tt: &Elem) -> Elem {
        let mut pts: Vec<Elem> = flatten(tt);
        pts.sort();
        pts.dedup();
        Elem::node(Elem::CLASS, pts)
    }

    fn lift(&self, e: &Elem, f: &[usize], cod: &Arc<MetricSpace>) -> Result<Elem> {
        let x = e
            .points()
            .first()
            .copied()
            .ok_or_else(|| Error::input("empty class"))?;
        self.unit(cod, f[x])
    }

    fn distance(&self, m: &Arc<MetricSpace>, a: &Elem, b: &Elem) -> Result<Dist> {
        let free = self.free(m)?;
        let class = |e: &Elem| {
            e.points()
                .first()
                .map(|&x| free.unit.apply(x))
                .ok_or_else(|| Error::input("empty class"))
        };
        Ok(free.d(class(a)?, class(b)?))
    }
}

/// Terms of the generalized signature with a constant `s` and a binary
/// symbol `sigma` of arity the two-point space at distance 1: `sigma(l, r)`
/// exists only when `d(l, r) ≤ 1`. Terms have height at most `depth`.
#[derive(Clone, Debug)]
pub struct BinTerms {
    pub depth: usize,
}

impl BinTerms {
    pub fn new(depth: usize) -> Self {
        BinTerms { depth }
    }

    fn tdist(m: &MetricSpace, a: &Elem, b: &Elem) -> Dist {
        match (a, b) {
            (Elem::Point(x), Elem::Point(y)) => m.d(*x, *y),
            (Elem::Node(Elem::CONST, _), Elem::Node(Elem::CONST, _)) => Dist::ZERO,
            (Elem::Node(Elem::SIGMA, p), Elem::Node(Elem::SIGMA, q)) => {
                Self::tdist(m, &p[0], &q[0]).max(Self::tdist(m, &p[1], &q[1]))
            }
            _ => Dist::INF,
        }
    }
}

impl MonadInstance for BinTerms {
    fn name(&self) -> String {
        "bin_terms".into()
    }

    fn carrier(&self, m: &Arc<MetricSpace>) -> Result<TSpace> {
        let mut all: Vec<Elem> = (0..m.len()).map(Elem::Point).collect();
        for _ in 0..self.depth {
            let mut next = all.clone();
            next.push(Elem::node(Elem::CONST, Vec::new()));
            for l in &all {
                for r in &all {
                    if Self::tdist(m, l, r) <= Dist::ONE {
                        next.push(Elem::node(Elem::SIGMA, vec![l.clone(), r.clone()]));
                        if next.len() > DEFAULT_CARRIER_LIMIT {
                            return Err(Error::budget("elements of TM", DEFAULT_CARRIER_LIMIT));
                        }
                    }
                }
            }
            next.sort();
            next.dedup();
            all = next;
        }
        Ok(TSpace::new(m.clone(), all))
    }

    fn unit(&self, _m: &Arc<MetricSpace>, x: usize) -> Result<Elem> {
        Ok(Elem::Point(x))
    }

    /// Substitution has already happened in the nested tree.
    fn join(&self, tt: &Elem) -> Elem {
        tt.clone()
    }

    fn distance(&self, m: &Arc<MetricSpace>, a: &Elem, b: &Elem) -> Result<Dist> {
        Ok(Self::tdist(m, a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(d: Dist) -> Arc<MetricSpace> {
        Arc::new(MetricSpace::from_pairs(&["x", "y"], &[("x", "y", d)]).unwrap())
    }

    #[test]
    fn word_counts_and_distances() {
        let m = two(Dist::ratio(1, 2));
        let t = Word::new(3);
        let tm = t.carrier(&m).unwrap();
        assert_eq!(tm.len(), 1 + 2 + 4 + 8);
        let xy = Elem::points_node(Elem::WORD, [0, 1]);
        let yy = Elem::points_node(Elem::WORD, [1, 1]);
        let x = Elem::points_node(Elem::WORD, [0]);
        assert_eq!(t.distance(&m, &xy, &yy).unwrap(), Dist::ratio(1, 2));
        assert_eq!(t.distance(&m, &xy, &x).unwrap(), Dist::INF);
        let tw = TensorWord::new(3);
        let xx = Elem::points_node(Elem::WORD, [0, 0]);
        assert_eq!(tw.distance(&m, &xx, &yy).unwrap(), Dist::ONE);
    }

    #[test]
    fn bags_use_the_best_permutation() {
        let m = Arc::new(
            MetricSpace::from_pairs(
                &["a", "b", "c"],
                &[("a", "b", Dist::ONE), ("a", "c", Dist::int(2)), ("b", "c", Dist::int(2))],
            )
            .unwrap(),
        );
        let t = CommutativeWord::new(2);
        assert_eq!(t.carrier(&m).unwrap().len(), 1 + 3 + 6);
        let ab = Elem::points_node(Elem::BAG, [0, 1]);
        let ba = t.canonical(Elem::points_node(Elem::BAG, [1, 0]));
        assert_eq!(ab, ba);
        let bc = Elem::points_node(Elem::BAG, [1, 2]);
        // a↦c, b↦b costs 2; a↦b, b↦c costs 2 as well.
        assert_eq!(t.distance(&m, &ab, &bc).unwrap(), Dist::int(2));
        let aa = Elem::points_node(Elem::BAG, [0, 0]);
        assert_eq!(t.distance(&m, &aa, &ab).unwrap(), Dist::ONE);
    }

    #[test]
    fn hausdorff_carrier_and_empty_set() {
        let m = two(Dist::ONE);
        let t = FiniteHausdorff::new(None);
        let tm = t.carrier(&m).unwrap();
        assert_eq!(tm.len(), 4);
        let empty = Elem::node(Elem::SET, vec![]);
        let x = Elem::points_node(Elem::SET, [0]);
        let xy = Elem::points_node(Elem::SET, [0, 1]);
        assert_eq!(t.distance(&m, &x, &empty).unwrap(), Dist::INF);
        assert_eq!(t.distance(&m, &empty, &empty).unwrap(), Dist::ZERO);
        assert_eq!(t.distance(&m, &x, &xy).unwrap(), Dist::ONE);
    }

    #[test]
    fn quasi_discrete_classes() {
        let t = QuasiDiscreteReflection::new();
        let near = two(Dist::ratio(1, 2));
        assert_eq!(t.carrier(&near).unwrap().len(), 1);
        let far = two(Dist::int(2));
        let tm = t.carrier(&far).unwrap();
        assert_eq!(tm.len(), 2);
        assert_eq!(t.distance(&far, &tm.elems[0], &tm.elems[1]).unwrap(), Dist::int(2));
    }

    #[test]
    fn bin_terms_on_discrete_and_near_pairs() {
        let t = BinTerms::new(2);
        let disc = Arc::new(MetricSpace::discrete(&["x", "y"]));
        let tm = t.carrier(&disc).unwrap();
        let uniform = |e: &Elem| {
            let mut leaves = Vec::new();
            fn walk(e: &Elem, out: &mut Vec<Option<usize>>) {
                match e {
                    Elem::Point(x) => out.push(Some(*x)),
                    Elem::Node(Elem::CONST, _) => out.push(None),
                    Elem::Node(_, kids) => kids.iter().for_each(|k| walk(k, out)),
                }
            }
            walk(e, &mut leaves);
            leaves.windows(2).all(|w| w[0] == w[1])
        };
        assert!(tm.elems.iter().all(&uniform));
        let near = two(Dist::ratio(1, 2));
        let tn = t.carrier(&near).unwrap();
        assert!(tn.elems.iter().any(|e| !uniform(e)));
        assert!(tn.elems.iter().filter(|e| e.points().is_empty()).all(&uniform));
    }

    #[test]
    fn almost_commutative_swap_distance() {
        let m = two(Dist::ONE);
        let t = AlmostCommutative::new(Dist::ratio(1, 2), 2, 2);
        let xy = Elem::points_node(Elem::WORD, [0, 1]);
        let yx = Elem::points_node(Elem::WORD, [1, 0]);
        assert_eq!(t.distance(&m, &xy, &yx).unwrap(), Dist::ratio(1, 2));
    }
}
