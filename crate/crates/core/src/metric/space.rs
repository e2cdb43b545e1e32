use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::dist::Dist;
use crate::error::{Error, Result};

/// A finite extended pseudometric space with labelled points.
///
/// Distances are stored as a dense `n × n` matrix. Reflexivity, symmetry and
/// the triangle inequality are checked by [`Pseudometric::new`]; separation is
/// not required.
#[derive(Clone, PartialEq, Eq)]
pub struct Pseudometric {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    d: Vec<Dist>,
}

impl Pseudometric {
    pub fn new(labels: Vec<String>, d: Vec<Dist>) -> Result<Self> {
        let space = Self::new_unchecked(labels, d)?;
        if let Some(v) = space.first_violation(false) {
            return Err(Error::Metric(v));
        }
        Ok(space)
    }

    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> Dist) -> Result<Self> {
        let n = labels.len();
        let d = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::new(labels, d)
    }

    /// Builds a space whose axioms hold by construction. Only label
    /// uniqueness and the matrix shape are checked.
    pub(crate) fn new_unchecked(labels: Vec<String>, d: Vec<Dist>) -> Result<Self> {
        let n = labels.len();
        if d.len() != n * n {
            return Err(Error::input(format!(
                "distance matrix has {} entries, expected {}",
                d.len(),
                n * n
            )));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate point label `{l}`")));
            }
        }
        Ok(Pseudometric { labels, index, d })
    }

    pub(crate) fn from_fn_unchecked(labels: Vec<String>, f: impl Fn(usize, usize) -> Dist) -> Result<Self> {
        let n = labels.len();
        let d = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::new_unchecked(labels, d)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> Dist {
        self.d[i * self.labels.len() + j]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn point(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    pub fn matrix(&self) -> &[Dist] {
        &self.d
    }

    /// Finite distances realized between (not necessarily distinct) points,
    /// sorted and deduplicated.
    pub fn realized_distances(&self) -> Vec<Dist> {
        let mut v: Vec<Dist> = self.d.iter().copied().filter(|x| x.is_finite()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Description of the first axiom violation in `(x, y, z)` order, if any.
    pub fn first_violation(&self, separated: bool) -> Option<String> {
        let n = self.len();
        for x in 0..n {
            if !self.d(x, x).is_zero() {
                return Some(format!("d({0},{0}) = {1} ≠ 0", self.label(x), self.d(x, x)));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if self.d(x, y) != self.d(y, x) {
                    return Some(format!(
                        "d({0},{1}) = {2} but d({1},{0}) = {3}",
                        self.label(x),
                        self.label(y),
                        self.d(x, y),
                        self.d(y, x)
                    ));
                }
                if separated && x != y && self.d(x, y).is_zero() {
                    return Some(format!(
                        "distinct points {} and {} at distance 0",
                        self.label(x),
                        self.label(y)
                    ));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let dxy = self.d(x, y);
                for z in 0..n {
                    if self.d(x, z) > dxy + self.d(y, z) {
                        return Some(format!(
                            "triangle: d({0},{2}) = {3} > d({0},{1}) + d({1},{2}) = {4}",
                            self.label(x),
                            self.label(y),
                            self.label(z),
                            self.d(x, z),
                            dxy + self.d(y, z)
                        ));
                    }
                }
            }
        }
        None
    }

    pub fn is_separated(&self) -> bool {
        let n = self.len();
        (0..n).all(|x| (0..n).all(|y| x == y || !self.d(x, y).is_zero()))
    }

    /// The subspace on `points`, in the given order.
    pub fn subspace(&self, points: &[usize]) -> Pseudometric {
        let labels = points.iter().map(|&p| self.labels[p].clone()).collect();
        Pseudometric::from_fn_unchecked(labels, |i, j| self.d(points[i], points[j]))
            .expect("subspace of a valid space")
    }

    /// Whether `f` (given as a point assignment into `cod`) is nonexpanding.
    pub fn is_nonexpanding_into(&self, cod: &Pseudometric, f: &[usize]) -> bool {
        self.expanding_witness(cod, f).is_none()
    }

    /// First pair `(x, y)` with `d(f x, f y) > d(x, y)`.
    pub fn expanding_witness(&self, cod: &Pseudometric, f: &[usize]) -> Option<(usize, usize)> {
        let n = self.len();
        for x in 0..n {
            for y in (x + 1)..n {
                if cod.d(f[x], f[y]) > self.d(x, y) {
                    return Some((x, y));
                }
            }
        }
        None
    }
}

impl fmt::Debug for Pseudometric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        for i in 0..self.len() {
            for j in 0..i {
                write!(f, " d({},{})={}", self.labels[i], self.labels[j], self.d(i, j))?;
            }
        }
        write!(f, "}}")
    }
}

/// A finite extended metric space: a [`Pseudometric`] whose distinct points
/// are at nonzero distance.
#[derive(Clone, PartialEq, Eq)]
pub struct MetricSpace {
    inner: Pseudometric,
}

impl MetricSpace {
    pub fn new(labels: Vec<String>, d: Vec<Dist>) -> Result<Self> {
        let inner = Pseudometric::new_unchecked(labels, d)?;
        if let Some(v) = inner.first_violation(true) {
            return Err(Error::Metric(v));
        }
        Ok(MetricSpace { inner })
    }

    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> Dist) -> Result<Self> {
        let n = labels.len();
        let d = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::new(labels, d)
    }

    /// Points plus a list of `(x, y, d)` entries; unlisted pairs are at `∞`.
    pub fn from_pairs<S: AsRef<str>>(points: &[S], pairs: &[(&str, &str, Dist)]) -> Result<Self> {
        let labels: Vec<String> = points.iter().map(|s| s.as_ref().to_string()).collect();
        let n = labels.len();
        let mut d = vec![Dist::INF; n * n];
        for i in 0..n {
            d[i * n + i] = Dist::ZERO;
        }
        let pos = |l: &str| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::UnknownPoint(l.to_string()))
        };
        for &(a, b, v) in pairs {
            let (i, j) = (pos(a)?, pos(b)?);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
        Self::new(labels, d)
    }

    pub(crate) fn new_unchecked(labels: Vec<String>, d: Vec<Dist>) -> Result<Self> {
        Ok(MetricSpace {
            inner: Pseudometric::new_unchecked(labels, d)?,
        })
    }

    pub(crate) fn from_fn_unchecked(labels: Vec<String>, f: impl Fn(usize, usize) -> Dist) -> Result<Self> {
        Ok(MetricSpace {
            inner: Pseudometric::from_fn_unchecked(labels, f)?,
        })
    }

    /// Promotes a separated pseudometric.
    pub fn from_pseudometric(p: Pseudometric) -> Result<Self> {
        if !p.is_separated() {
            return Err(Error::Metric("pseudometric is not separated".into()));
        }
        Ok(MetricSpace { inner: p })
    }

    /// Discrete space: all off-diagonal distances `∞`.
    pub fn discrete<S: AsRef<str>>(labels: &[S]) -> Self {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        MetricSpace::from_fn_unchecked(labels, |i, j| if i == j { Dist::ZERO } else { Dist::INF })
            .expect("discrete labels must be unique")
    }

    pub fn singleton(label: &str) -> Self {
        MetricSpace::discrete(&[label])
    }

    pub fn empty() -> Self {
        MetricSpace::discrete::<&str>(&[])
    }

    /// The discrete space `V_n = {x0, ..., x(n-1)}`.
    pub fn variables(n: usize) -> Self {
        let labels: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        MetricSpace::discrete(&labels)
    }

    pub fn as_pseudometric(&self) -> &Pseudometric {
        &self.inner
    }

    pub fn into_pseudometric(self) -> Pseudometric {
        self.inner
    }

    pub fn subspace(&self, points: &[usize]) -> MetricSpace {
        MetricSpace {
            inner: self.inner.subspace(points),
        }
    }

    /// Same points with every off-diagonal distance `∞` (the underlying set `|M|`).
    pub fn underlying_discrete(&self) -> MetricSpace {
        MetricSpace::discrete(self.labels())
    }
}

impl Deref for MetricSpace {
    type Target = Pseudometric;

    fn deref(&self) -> &Pseudometric {
        &self.inner
    }
}

impl fmt::Debug for MetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.inner.fmt(f)
    }
}

/// Canonical text: the point labels on one line, then row `i` of the
/// strictly lower-triangular distance matrix on line `i + 1`.
///
/// ```text
/// a b "c d"
/// 1/2
/// inf 1
/// ```
impl fmt::Display for MetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self
            .labels()
            .iter()
            .map(|l| {
                if l.is_empty() || l.chars().any(|c| c.is_whitespace() || c == '"') {
                    format!("\"{l}\"")
                } else {
                    l.clone()
                }
            })
            .collect();
        write!(f, "{}", labels.join(" "))?;
        for i in 1..self.len() {
            let row: Vec<String> = (0..i).map(|j| self.d(i, j).to_string()).collect();
            write!(f, "\n{}", row.join(" "))?;
        }
        Ok(())
    }
}

fn split_labels(line: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut rest = line.trim_start();
    while !rest.is_empty() {
        if let Some(quoted) = rest.strip_prefix('"') {
            let end = quoted
                .find('"')
                .ok_or_else(|| Error::input("unterminated quoted label"))?;
            out.push(quoted[..end].to_string());
            rest = quoted[end + 1..].trim_start();
        } else {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            out.push(rest[..end].to_string());
            rest = rest[end..].trim_start();
        }
    }
    Ok(out)
}

impl std::str::FromStr for MetricSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let labels = match lines.next() {
            Some(l) => split_labels(l)?,
            None => return Ok(MetricSpace::empty()),
        };
        let n = labels.len();
        let mut d = vec![Dist::ZERO; n * n];
        for i in 1..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::input(format!("missing row {i} of the distance matrix")))?;
            let row: Vec<Dist> = line
                .split_whitespace()
                .map(|t| t.parse::<Dist>().map_err(|_| Error::input(format!("bad distance `{t}`"))))
                .collect::<Result<_>>()?;
            if row.len() != i {
                return Err(Error::input(format!("row {i} has {} entries, expected {i}", row.len())));
            }
            for (j, x) in row.into_iter().enumerate() {
                d[i * n + j] = x;
                d[j * n + i] = x;
            }
        }
        if lines.next().is_some() {
            return Err(Error::input("trailing rows after the distance matrix"));
        }
        MetricSpace::new(labels, d)
    }
}

/// A nonexpanding map between finite metric spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonexpandingMap {
    dom: Arc<MetricSpace>,
    cod: Arc<MetricSpace>,
    assignment: Vec<usize>,
}

impl NonexpandingMap {
    pub fn new(dom: Arc<MetricSpace>, cod: Arc<MetricSpace>, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != dom.len() {
            return Err(Error::input(format!(
                "map assigns {} points but the domain has {}",
                assignment.len(),
                dom.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&y| y >= cod.len()) {
            return Err(Error::input(format!("map target index {bad} out of range")));
        }
        if let Some((x, y)) = dom.expanding_witness(&cod, &assignment) {
            return Err(Error::Expanding(format!(
                "d({},{}) = {} > d({},{}) = {}",
                cod.label(assignment[x]),
                cod.label(assignment[y]),
                cod.d(assignment[x], assignment[y]),
                dom.label(x),
                dom.label(y),
                dom.d(x, y)
            )));
        }
        Ok(NonexpandingMap { dom, cod, assignment })
    }

    /// Map given by labels: `pairs` lists `(source, target)`.
    pub fn from_labels(dom: Arc<MetricSpace>, cod: Arc<MetricSpace>, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut assignment = vec![usize::MAX; dom.len()];
        for &(a, b) in pairs {
            assignment[dom.point(a)?] = cod.point(b)?;
        }
        if let Some(x) = assignment.iter().position(|&y| y == usize::MAX) {
            return Err(Error::input(format!("map leaves `{}` unassigned", dom.label(x))));
        }
        Self::new(dom, cod, assignment)
    }

    pub fn identity(space: Arc<MetricSpace>) -> Self {
        let assignment = (0..space.len()).collect();
        NonexpandingMap {
            dom: space.clone(),
            cod: space,
            assignment,
        }
    }

    pub fn dom(&self) -> &Arc<MetricSpace> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<MetricSpace> {
        &self.cod
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.cod.len()];
        for &y in &self.assignment {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_isometric_embedding(&self) -> bool {
        let n = self.dom.len();
        (0..n).all(|x| {
            (0..n).all(|y| self.cod.d(self.assignment[x], self.assignment[y]) == self.dom.d(x, y))
        })
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &NonexpandingMap) -> Result<NonexpandingMap> {
        if self.cod.as_ref() != other.dom.as_ref() {
            return Err(Error::input("maps are not composable"));
        }
        let assignment = self.assignment.iter().map(|&y| other.assignment[y]).collect();
        Ok(NonexpandingMap {
            dom: self.dom.clone(),
            cod: other.cod.clone(),
            assignment,
        })
    }
}

/// Searches for a distance-preserving bijection `a → b`, by backtracking.
/// Exponential in the worst case; intended for spaces of at most a few dozen
/// points with distinctive distance profiles, and always fine up to 8 points.
pub fn find_isometry(a: &Pseudometric, b: &Pseudometric) -> Option<Vec<usize>> {
    let n = a.len();
    if n != b.len() {
        return None;
    }
    let profile = |s: &Pseudometric, x: usize| {
        let mut v: Vec<Dist> = (0..s.len()).map(|y| s.d(x, y)).collect();
        v.sort();
        v
    };
    let pa: Vec<Vec<Dist>> = (0..n).map(|x| profile(a, x)).collect();
    let pb: Vec<Vec<Dist>> = (0..n).map(|x| profile(b, x)).collect();
    let mut assignment = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn go(
        x: usize,
        a: &Pseudometric,
        b: &Pseudometric,
        pa: &[Vec<Dist>],
        pb: &[Vec<Dist>],
        assignment: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if x == a.len() {
            return true;
        }
        for y in 0..b.len() {
            if used[y] || pa[x] != pb[y] {
                continue;
            }
            if (0..x).all(|w| b.d(assignment[w], y) == a.d(w, x)) {
                assignment[x] = y;
                used[y] = true;
                if go(x + 1, a, b, pa, pb, assignment, used) {
                    return true;
                }
                used[y] = false;
            }
        }
        false
    }

    if go(0, a, b, &pa, &pb, &mut assignment, &mut used) {
        Some(assignment)
    } else {
        None
    }
}

pub fn is_isometric(a: &Pseudometric, b: &Pseudometric) -> bool {
    find_isometry(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(d: Dist) -> MetricSpace {
        MetricSpace::from_pairs(&["a", "b"], &[("a", "b", d)]).unwrap()
    }

    #[test]
    fn text_form_roundtrips() {
        let m = MetricSpace::from_pairs(&["a", "b", "c d"], &[("a", "b", Dist::ratio(1, 2))]).unwrap();
        let text = m.to_string();
        assert_eq!(text, "a b \"c d\"\n1/2\ninf inf");
        let back: MetricSpace = text.parse().unwrap();
        assert_eq!(back.labels(), m.labels());
        assert_eq!(back.matrix(), m.matrix());
        assert!("a b\n1 2".parse::<MetricSpace>().is_err());
        assert!("a b c\n1\n1 3".parse::<MetricSpace>().is_err());
    }

    #[test]
    fn rejects_axiom_violations() {
        let labels = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        let bad_triangle = MetricSpace::from_fn(labels.clone(), |i, j| match (i.min(j), i.max(j)) {
            (a, b) if a == b => Dist::ZERO,
            (0, 2) => Dist::int(3),
            _ => Dist::ONE,
        });
        assert!(matches!(bad_triangle, Err(Error::Metric(m)) if m.contains("triangle")));

        let not_separated = MetricSpace::from_fn(labels.clone(), |i, j| {
            if (i, j) == (0, 1) || (i, j) == (1, 0) || i == j {
                Dist::ZERO
            } else {
                Dist::ONE
            }
        });
        assert!(not_separated.is_err());
        let p = Pseudometric::from_fn(labels, |i, j| {
            if i == j || (i.min(j), i.max(j)) == (0, 1) {
                Dist::ZERO
            } else {
                Dist::ONE
            }
        })
        .unwrap();
        assert!(!p.is_separated());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let r = MetricSpace::new(vec!["a".into(), "a".into()], vec![Dist::ZERO; 4]);
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn maps_check_nonexpansion() {
        let near = Arc::new(two(Dist::ratio(1, 2)));
        let far = Arc::new(two(Dist::int(2)));
        assert!(NonexpandingMap::new(far.clone(), near.clone(), vec![0, 1]).is_ok());
        let err = NonexpandingMap::new(near, far, vec![0, 1]).unwrap_err();
        assert!(matches!(err, Error::Expanding(_)));
    }

    #[test]
    fn isometry_search() {
        let a = MetricSpace::from_pairs(
            &["p", "q", "r"],
            &[("p", "q", Dist::ONE), ("q", "r", Dist::int(2)), ("p", "r", Dist::int(2))],
        )
        .unwrap();
        let b = MetricSpace::from_pairs(
            &["u", "v", "w"],
            &[("u", "v", Dist::int(2)), ("v", "w", Dist::ONE), ("u", "w", Dist::int(2))],
        )
        .unwrap();
        let iso = find_isometry(&a, &b).unwrap();
        assert_eq!(iso, vec![1, 2, 0]);
        assert!(!is_isometric(&a, &two(Dist::ONE)));
    }
}
