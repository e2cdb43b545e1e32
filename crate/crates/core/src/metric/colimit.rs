use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};

use super::construct::metric_reflection;
use super::space::{MetricSpace, Pseudometric};

/// Colimit of a finite chain `D_0 → D_1 → … → D_k` together with its cocone.
#[derive(Clone, Debug)]
pub struct Colimit {
    pub space: MetricSpace,
    /// `cocone[i][y]` is the image of point `y` of stage `i`.
    pub cocone: Vec<Vec<usize>>,
}

/// Composite of the connecting maps from stage `i` to stage `j ≥ i`.
fn connecting(maps: &[Vec<usize>], i: usize, j: usize, y: usize) -> usize {
    (i..j).fold(y, |p, s| maps[s][p])
}

fn validate_chain(spaces: &[MetricSpace], maps: &[Vec<usize>]) -> Result<()> {
    if spaces.is_empty() {
        return Err(Error::input("a chain needs at least one stage"));
    }
    if maps.len() + 1 != spaces.len() {
        return Err(Error::input(format!(
            "{} stages need {} connecting maps, got {}",
            spaces.len(),
            spaces.len() - 1,
            maps.len()
        )));
    }
    for (s, f) in maps.iter().enumerate() {
        let (dom, cod) = (&spaces[s], &spaces[s + 1]);
        if f.len() != dom.len() || f.iter().any(|&y| y >= cod.len()) {
            return Err(Error::input(format!("map {s} is not a map D_{s} → D_{}", s + 1)));
        }
        if let Some((x, y)) = dom.expanding_witness(cod, f) {
            return Err(Error::Expanding(format!(
                "map {s} expands d({},{})",
                dom.label(x),
                dom.label(y)
            )));
        }
    }
    Ok(())
}

/// Colimit of a finite chain in `Met`.
///
/// Built as the metric reflection of the disjoint union of all stages under
/// `d((i,y),(j,y')) = inf_{m ≥ max(i,j)} d_m(f_im y, f_jm y')`. Every class
/// contains a point of the last stage, whose label it takes.
pub fn directed_colimit(spaces: &[MetricSpace], maps: &[Vec<usize>]) -> Result<Colimit> {
    validate_chain(spaces, maps)?;
    let k = spaces.len() - 1;
    let mut stage_of = Vec::new();
    for (i, s) in spaces.iter().enumerate() {
        for y in 0..s.len() {
            stage_of.push((i, y));
        }
    }
    let labels: Vec<String> = stage_of.iter().map(|&(i, y)| format!("{i}:{}", spaces[i].label(y))).collect();
    let union = Pseudometric::from_fn_unchecked(labels, |p, q| {
        let ((i, y), (j, z)) = (stage_of[p], stage_of[q]);
        (i.max(j)..=k)
            .map(|m| spaces[m].d(connecting(maps, i, m, y), connecting(maps, j, m, z)))
            .min()
            .expect("nonempty stage range")
    })?;
    let refl = metric_reflection(&union);

    // Relabel each class by its last-stage member.
    let offset_k = stage_of.iter().position(|&(i, _)| i == k).unwrap_or(stage_of.len());
    let mut class_label = vec![String::new(); refl.classes.len()];
    for (c, members) in refl.classes.iter().enumerate() {
        let last = members
            .iter()
            .rev()
            .find(|&&p| p >= offset_k)
            .copied()
            .unwrap_or(members[0]);
        let (i, y) = stage_of[last];
        class_label[c] = spaces[i].label(y).to_string();
    }
    let space = MetricSpace::from_fn_unchecked(class_label, |a, b| refl.space.d(a, b))?;

    let mut cocone = Vec::with_capacity(spaces.len());
    let mut p = 0;
    for s in spaces {
        cocone.push((0..s.len()).map(|y| refl.quotient[p + y]).collect());
        p += s.len();
    }
    Ok(Colimit { space, cocone })
}

/// Checks the cocone against the two characterizing conditions of a directed
/// colimit: collective surjectivity, and `d(c_i y, c_i y') = inf_{j ≥ i}
/// d(f_ij y, f_ij y')`. Also checks compatibility `c_{i+1} ∘ f_i = c_i`.
pub fn check_colimit_conditions(spaces: &[MetricSpace], maps: &[Vec<usize>], colim: &Colimit) -> Result<(), String> {
    let k = spaces.len() - 1;
    let mut hit = vec![false; colim.space.len()];
    for c in &colim.cocone {
        for &p in c {
            hit[p] = true;
        }
    }
    if let Some(p) = hit.iter().position(|h| !h) {
        return Err(format!("cocone misses `{}`", colim.space.label(p)));
    }
    for (i, f) in maps.iter().enumerate() {
        for (y, &fy) in f.iter().enumerate().take(spaces[i].len()) {
            if colim.cocone[i + 1][fy] != colim.cocone[i][y] {
                return Err(format!("cocone not compatible at stage {i}"));
            }
        }
    }
    for (i, s) in spaces.iter().enumerate() {
        for y in 0..s.len() {
            for z in 0..s.len() {
                let inf = (i..=k)
                    .map(|j| spaces[j].d(connecting(maps, i, j, y), connecting(maps, i, j, z)))
                    .min()
                    .expect("nonempty stage range");
                let got = colim.space.d(colim.cocone[i][y], colim.cocone[i][z]);
                if got != inf {
                    return Err(format!(
                        "stage {i}: d(c({}), c({})) = {got}, infimum is {inf}",
                        s.label(y),
                        s.label(z)
                    ));
                }
            }
        }
    }
    Ok(())
}

/// One level `D_M^ε` of a precongruence: the pairs at distance `≤ ε`.
#[derive(Clone, Debug, Serialize)]
pub struct PrecongruenceLevel {
    pub eps: Dist,
    pub pairs: Vec<(usize, usize)>,
}

impl PrecongruenceLevel {
    /// The level as a discrete space with points labelled `(x,y)`.
    pub fn space(&self, base: &Pseudometric) -> MetricSpace {
        let labels: Vec<String> = self
            .pairs
            .iter()
            .map(|&(x, y)| format!("({},{})", base.label(x), base.label(y)))
            .collect();
        MetricSpace::discrete(&labels)
    }

    pub fn left(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn right(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.1).collect()
    }
}

/// The precongruence diagram of a finite space: its underlying discrete
/// space and one relation level per realized finite distance.
#[derive(Clone, Debug)]
pub struct PrecongruenceDiagram {
    pub base: MetricSpace,
    pub discrete: MetricSpace,
    pub levels: Vec<PrecongruenceLevel>,
}

pub fn precongruence(m: &MetricSpace) -> PrecongruenceDiagram {
    let n = m.len();
    let levels = m
        .realized_distances()
        .into_iter()
        .map(|eps| PrecongruenceLevel {
            eps,
            pairs: (0..n)
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .filter(|&(x, y)| m.d(x, y) <= eps)
                .collect(),
        })
        .collect();
    PrecongruenceDiagram {
        base: m.clone(),
        discrete: m.underlying_discrete(),
        levels,
    }
}

impl PrecongruenceDiagram {
    /// The level holding all pairs at distance `≤ eps`, i.e. the largest
    /// realized distance not exceeding `eps`.
    pub fn level_for(&self, eps: Dist) -> Option<&PrecongruenceLevel> {
        self.levels.iter().rev().find(|l| l.eps <= eps)
    }

    /// `f : |M| → target` satisfies `d(f π_l p, f π_r p) ≤ ε` on every level.
    /// This holds exactly when `f` is nonexpanding on `M`.
    pub fn levelwise_nonexpanding(&self, target: &Pseudometric, f: &[usize]) -> bool {
        self.levels
            .iter()
            .all(|l| l.pairs.iter().all(|&(x, y)| target.d(f[x], f[y]) <= l.eps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::is_isometric;

    fn two(label_a: &str, label_b: &str, d: Dist) -> MetricSpace {
        MetricSpace::from_pairs(&[label_a, label_b], &[(label_a, label_b, d)]).unwrap()
    }

    #[test]
    fn constant_chain() {
        let s = two("a", "b", Dist::ONE);
        let c = directed_colimit(&[s.clone(), s.clone(), s.clone()], &[vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(c.space, s);
        assert_eq!(c.cocone[2], vec![0, 1]);
        check_colimit_conditions(&[s.clone(), s.clone(), s], &[vec![0, 1], vec![0, 1]], &c).unwrap();
    }

    #[test]
    fn shrinking_chain_truncated() {
        for k in 0..6u32 {
            let spaces: Vec<MetricSpace> = (0..=k).map(|n| two("a", "b", Dist::pow2_neg(n))).collect();
            let maps = vec![vec![0, 1]; k as usize];
            let c = directed_colimit(&spaces, &maps).unwrap();
            assert_eq!(c.space.len(), 2);
            assert_eq!(c.space.d(0, 1), Dist::pow2_neg(k));
            check_colimit_conditions(&spaces, &maps, &c).unwrap();
        }
    }

    #[test]
    fn inclusion_chain_is_union() {
        let full = MetricSpace::from_pairs(
            &["a", "b", "c"],
            &[("a", "b", Dist::ONE), ("b", "c", Dist::ratio(1, 2)), ("a", "c", Dist::ONE)],
        )
        .unwrap();
        let s0 = full.subspace(&[0]);
        let s1 = full.subspace(&[0, 1]);
        let c = directed_colimit(&[s0.clone(), s1.clone(), full.clone()], &[vec![0], vec![0, 1]]).unwrap();
        assert_eq!(c.space, full);
        assert!(is_isometric(&c.space, &full));
        check_colimit_conditions(&[s0, s1, full], &[vec![0], vec![0, 1]], &c).unwrap();
    }

    #[test]
    fn broken_chains_rejected() {
        let s = two("a", "b", Dist::ONE);
        assert!(matches!(directed_colimit(&[s.clone(), s.clone()], &[]), Err(Error::Input(_))));
        assert!(matches!(directed_colimit(&[s.clone(), s.clone()], &[vec![0]]), Err(Error::Input(_))));
        let near = two("a", "b", Dist::ratio(1, 2));
        assert!(matches!(directed_colimit(&[near, s], &[vec![0, 1]]), Err(Error::Expanding(_))));
    }

    #[test]
    fn precongruence_levels() {
        let m = two("a", "b", Dist::ONE);
        let p = precongruence(&m);
        assert_eq!(p.levels.len(), 2);
        assert_eq!(p.levels[0].eps, Dist::ZERO);
        assert_eq!(p.levels[0].pairs, vec![(0, 0), (1, 1)]);
        assert_eq!(p.levels[1].eps, Dist::ONE);
        assert_eq!(p.levels[1].pairs.len(), 4);
        assert_eq!(p.level_for(Dist::ratio(1, 2)).unwrap().eps, Dist::ZERO);
        assert_eq!(p.level_for(Dist::int(7)).unwrap().eps, Dist::ONE);

        let d = MetricSpace::discrete(&["x", "y", "z"]);
        let p = precongruence(&d);
        assert_eq!(p.levels.len(), 1);
        let target = two("u", "v", Dist::int(9));
        assert!(p.levelwise_nonexpanding(&target, &[0, 1, 0]));
    }
}
