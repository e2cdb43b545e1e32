use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::par;

use super::space::{MetricSpace, Pseudometric};

fn pair_labels(a: &Pseudometric, b: &Pseudometric) -> Vec<String> {
    let mut labels = Vec::with_capacity(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            labels.push(format!("({},{})", a.label(i), b.label(j)));
        }
    }
    labels
}

/// Cartesian product with the maximum metric. Point `(i, j)` sits at index
/// `i * |b| + j`.
pub fn product(a: &MetricSpace, b: &MetricSpace) -> MetricSpace {
    let nb = b.len();
    MetricSpace::from_fn_unchecked(pair_labels(a, b), |p, q| {
        a.d(p / nb, q / nb).max(b.d(p % nb, q % nb))
    })
    .expect("product labels are unique")
}

/// Cartesian product with the sum metric (the tensor of `Met`).
pub fn tensor(a: &MetricSpace, b: &MetricSpace) -> MetricSpace {
    let nb = b.len();
    MetricSpace::from_fn_unchecked(pair_labels(a, b), |p, q| a.d(p / nb, q / nb) + b.d(p % nb, q % nb))
        .expect("tensor labels are unique")
}

/// Iterated product `a^k`; the empty power is the one-point space.
pub fn power(a: &MetricSpace, k: usize) -> MetricSpace {
    let mut acc = MetricSpace::singleton("()");
    for _ in 0..k {
        acc = product(&acc, a);
    }
    acc
}

/// The space `[A, B]` of nonexpanding maps with the supremum metric.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub space: MetricSpace,
    /// `maps[k]` is the assignment of the `k`-th point of `space`.
    pub maps: Vec<Vec<usize>>,
}

impl HomSpace {
    pub fn index_of(&self, assignment: &[usize]) -> Option<usize> {
        self.maps.iter().position(|m| m == assignment)
    }
}

/// All nonexpanding maps `a → b` in lexicographic order of assignments.
pub fn nonexpanding_maps(a: &Pseudometric, b: &Pseudometric, limit: usize) -> Result<Vec<Vec<usize>>> {
    if a.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    if b.is_empty() {
        return Ok(Vec::new());
    }
    let chunks = par::map_collect(b.len(), |first| {
        let mut out = Vec::new();
        let mut cur = vec![first];
        extend_maps(a, b, &mut cur, &mut out, limit);
        out
    });
    let mut maps = Vec::new();
    for c in chunks {
        maps.extend(c);
        if maps.len() > limit {
            return Err(Error::budget("nonexpanding maps", limit));
        }
    }
    Ok(maps)
}

fn extend_maps(a: &Pseudometric, b: &Pseudometric, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) {
    if out.len() > limit {
        return;
    }
    let x = cur.len();
    if x == a.len() {
        out.push(cur.clone());
        return;
    }
    for y in 0..b.len() {
        if (0..x).all(|w| b.d(cur[w], y) <= a.d(w, x)) {
            cur.push(y);
            extend_maps(a, b, cur, out, limit);
            cur.pop();
        }
    }
}

pub const DEFAULT_HOM_LIMIT: usize = 200_000;

pub fn hom_space(a: &MetricSpace, b: &MetricSpace) -> Result<HomSpace> {
    hom_space_with_limit(a, b, DEFAULT_HOM_LIMIT)
}

pub fn hom_space_with_limit(a: &MetricSpace, b: &MetricSpace, limit: usize) -> Result<HomSpace> {
    let maps = nonexpanding_maps(a, b, limit)?;
    let labels = maps
        .iter()
        .map(|m| {
            let images: Vec<&str> = m.iter().map(|&y| b.label(y)).collect();
            format!("[{}]", images.join(","))
        })
        .collect();
    let space = MetricSpace::from_fn_unchecked(labels, |p, q| sup_distance(b, &maps[p], &maps[q]))?;
    Ok(HomSpace { space, maps })
}

/// `sup_x d(f x, g x)`; zero on an empty domain.
pub fn sup_distance(cod: &Pseudometric, f: &[usize], g: &[usize]) -> Dist {
    f.iter()
        .zip(g)
        .map(|(&x, &y)| cod.d(x, y))
        .max()
        .unwrap_or(Dist::ZERO)
}

/// Whether `d(x,z) ≤ max(d(x,y), d(y,z))` for all triples.
pub fn check_ultrametric(a: &Pseudometric) -> bool {
    let n = a.len();
    (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| a.d(x, z) <= a.d(x, y).max(a.d(y, z)))))
}

/// The pointwise-largest pseudometric on `points` with `d(x_i, y_i) ≤ δ_i` for
/// every constraint: the shortest-path metric of the constraint graph.
pub fn smallest_pseudometric<S: AsRef<str>>(points: &[S], constraints: &[(&str, &str, Dist)]) -> Result<Pseudometric> {
    let labels: Vec<String> = points.iter().map(|s| s.as_ref().to_string()).collect();
    let idx = |l: &str| {
        labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| Error::UnknownPoint(l.to_string()))
    };
    let mut edges = Vec::with_capacity(constraints.len());
    for &(x, y, delta) in constraints {
        edges.push((idx(x)?, idx(y)?, delta));
    }
    let n = labels.len();
    let d = shortest_path_closure(n, &edges);
    Pseudometric::new_unchecked(labels, d)
}

/// Floyd–Warshall over an undirected weighted graph; `∞` where disconnected.
pub(crate) fn shortest_path_closure(n: usize, edges: &[(usize, usize, Dist)]) -> Vec<Dist> {
    let mut d = vec![Dist::INF; n * n];
    for i in 0..n {
        d[i * n + i] = Dist::ZERO;
    }
    for &(x, y, w) in edges {
        if w < d[x * n + y] {
            d[x * n + y] = w;
            d[y * n + x] = w;
        }
    }
    floyd_warshall(n, &mut d);
    d
}

pub(crate) fn floyd_warshall(n: usize, d: &mut [Dist]) {
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let cand = dik + d[k * n + j];
                if cand < d[i * n + j] {
                    d[i * n + j] = cand;
                }
            }
        }
    }
}

/// Quotient of a pseudometric by its zero-distance equivalence.
#[derive(Clone, Debug)]
pub struct Reflection {
    pub space: MetricSpace,
    /// `quotient[x]` is the class of point `x`.
    pub quotient: Vec<usize>,
    /// Members of each class, in point order.
    pub classes: Vec<Vec<usize>>,
}

/// Merges points at distance zero. Classes are ordered by their least member
/// and labelled by it.
pub fn metric_reflection(p: &Pseudometric) -> Reflection {
    let n = p.len();
    let mut quotient = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for x in 0..n {
        if quotient[x] != usize::MAX {
            continue;
        }
        let c = classes.len();
        let members: Vec<usize> = (x..n).filter(|&y| p.d(x, y).is_zero()).collect();
        for &y in &members {
            quotient[y] = c;
        }
        classes.push(members);
    }
    let labels = classes.iter().map(|m| p.label(m[0]).to_string()).collect();
    let space = MetricSpace::from_fn_unchecked(labels, |i, j| p.d(classes[i][0], classes[j][0]))
        .expect("class labels are distinct point labels");
    Reflection {
        space,
        quotient,
        classes,
    }
}

/// Hausdorff distance between subsets of `m`; `∞` against the empty set
/// unless both are empty.
pub fn hausdorff_distance(m: &Pseudometric, a: &[usize], b: &[usize]) -> Dist {
    hausdorff_by(a, b, |x, y| m.d(*x, *y))
}

/// Hausdorff distance for arbitrary element types under a distance function.
pub fn hausdorff_by<T>(a: &[T], b: &[T], d: impl Fn(&T, &T) -> Dist) -> Dist {
    let directed = |from: &[T], to: &[T]| {
        from.iter()
            .map(|x| to.iter().map(|y| d(x, y)).min().unwrap_or(Dist::INF))
            .max()
            .unwrap_or(Dist::ZERO)
    };
    directed(a, b).max(directed(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(d: Dist) -> MetricSpace {
        MetricSpace::from_pairs(&["a", "b"], &[("a", "b", d)]).unwrap()
    }

    #[test]
    fn product_examples() {
        let a = two(Dist::ONE);
        let p = product(&a, &MetricSpace::singleton("*"));
        assert!(super::super::is_isometric(&p, &a));
        let b = MetricSpace::from_pairs(&["c", "c'"], &[("c", "c'", Dist::int(2))]).unwrap();
        let p = product(&a, &b);
        assert_eq!(p.d(p.point("(a,c)").unwrap(), p.point("(b,c')").unwrap()), Dist::int(2));
        assert_eq!(p.d(p.point("(a,c)").unwrap(), p.point("(b,c)").unwrap()), Dist::ONE);
    }

    #[test]
    fn tensor_examples() {
        let a = two(Dist::ONE);
        let b = MetricSpace::from_pairs(&["c", "c'"], &[("c", "c'", Dist::int(2))]).unwrap();
        let t = tensor(&a, &b);
        assert_eq!(t.d(t.point("(a,c)").unwrap(), t.point("(b,c')").unwrap()), Dist::int(3));
        assert!(super::super::is_isometric(&tensor(&a, &MetricSpace::singleton("*")), &a));
        let far = tensor(&two(Dist::INF), &b);
        assert_eq!(far.d(0, 3), Dist::INF);
    }

    #[test]
    fn hom_space_of_two_points() {
        let a = two(Dist::ONE);
        let h = hom_space(&a, &a).unwrap();
        assert_eq!(h.maps.len(), 4);
        let id = h.index_of(&[0, 1]).unwrap();
        let swap = h.index_of(&[1, 0]).unwrap();
        assert_eq!(h.space.d(id, swap), Dist::ONE);
        // Both constant maps are nonexpanding, at distance 1 from each other.
        let c0 = h.index_of(&[0, 0]).unwrap();
        let c1 = h.index_of(&[1, 1]).unwrap();
        assert_eq!(h.space.d(c0, c1), Dist::ONE);
    }

    #[test]
    fn ultrametric_examples() {
        assert!(check_ultrametric(&MetricSpace::discrete(&["a", "b", "c"])));
        let tri = |x: u64, y: u64, z: u64| {
            MetricSpace::from_pairs(
                &["p", "q", "r"],
                &[("p", "q", Dist::int(x)), ("q", "r", Dist::int(y)), ("p", "r", Dist::int(z))],
            )
            .unwrap()
        };
        assert!(!check_ultrametric(&tri(1, 1, 2)));
        assert!(check_ultrametric(&tri(1, 1, 1)));
    }

    #[test]
    fn smallest_pseudometric_examples() {
        let p = smallest_pseudometric(&["x", "y", "z"], &[("x", "y", Dist::ONE), ("y", "z", Dist::ONE)]).unwrap();
        assert_eq!(p.d(0, 2), Dist::int(2));
        let p = smallest_pseudometric(&["x", "y", "z"], &[]).unwrap();
        assert_eq!(p.d(0, 1), Dist::INF);
        assert_eq!(p.d(1, 1), Dist::ZERO);
        let p = smallest_pseudometric(&["x", "y"], &[("x", "y", Dist::ratio(2, 5))]).unwrap();
        assert_eq!(p.d(0, 1), Dist::ratio(2, 5));
        assert!(matches!(
            smallest_pseudometric(&["x"], &[("x", "w", Dist::ONE)]),
            Err(Error::UnknownPoint(_))
        ));
    }

    #[test]
    fn reflection_examples() {
        let p = Pseudometric::from_fn(vec!["x".into(), "y".into(), "z".into()], |i, j| {
            if i == j || i.max(j) == 1 && i.min(j) == 0 {
                Dist::ZERO
            } else {
                Dist::int(2)
            }
        })
        .unwrap();
        let r = metric_reflection(&p);
        assert_eq!(r.space.len(), 2);
        assert_eq!(r.space.d(0, 1), Dist::int(2));
        assert_eq!(r.quotient, vec![0, 0, 1]);

        let m = two(Dist::ONE);
        let r = metric_reflection(&m);
        assert_eq!(r.space, m);

        let zero = Pseudometric::from_fn(vec!["a".into(), "b".into(), "c".into()], |_, _| Dist::ZERO).unwrap();
        assert_eq!(metric_reflection(&zero).space.len(), 1);
    }

    #[test]
    fn hausdorff_examples() {
        let m = MetricSpace::from_pairs(&["0", "1"], &[("0", "1", Dist::ONE)]).unwrap();
        assert_eq!(hausdorff_distance(&m, &[0], &[]), Dist::INF);
        assert_eq!(hausdorff_distance(&m, &[], &[]), Dist::ZERO);
        assert_eq!(hausdorff_distance(&m, &[0, 1], &[0, 1]), Dist::ZERO);
        assert_eq!(hausdorff_distance(&m, &[0], &[0, 1]), Dist::ONE);
    }
}
