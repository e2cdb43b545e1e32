use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::metric::{
    check_colimit_conditions, directed_colimit, nonexpanding_maps, precongruence, sup_distance, MetricSpace,
    NonexpandingMap, DEFAULT_HOM_LIMIT,
};
use crate::par;

use super::{nest, Elem, MonadInstance, TSpace};

const FAILURES_PER_LAW: usize = 8;
const TTM_SUBSETS: usize = 24;
const TTTM_SUBSETS: usize = 24;
const SAMPLED_MAPS: usize = 6;

#[derive(Clone, Debug, Serialize)]
pub struct LawFailure {
    pub law: String,
    pub element: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LawReport {
    pub instance: String,
    pub space: Vec<String>,
    pub tm_size: usize,
    /// Instances checked per law.
    pub checked: BTreeMap<String, usize>,
    /// Instances skipped because an intermediate element fell outside the
    /// size policy.
    pub beyond_budget: usize,
    pub failures: Vec<LawFailure>,
}

impl LawReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, law: &str, labels: &[String], element: &Elem, left: &Elem, right: &Elem) {
        *self.checked.entry(law.to_string()).or_default() += 1;
        if left != right && self.failures.iter().filter(|f| f.law == law).count() < FAILURES_PER_LAW {
            self.failures.push(LawFailure {
                law: law.to_string(),
                element: element.display(labels),
                left: left.display(labels),
                right: right.display(labels),
            });
        }
    }
}

/// Seeded sample of elements of `T(X)` for `X` a materialized space with
/// carrier `tx`: the `T`-images of random small subspaces of `X`, with
/// leaves naming points of `X`.
fn sample_next_level(
    t: &dyn MonadInstance,
    x: &TSpace,
    rng: &mut ChaCha8Rng,
    subsets: usize,
    max_subset: usize,
) -> Result<Vec<Elem>> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    if x.is_empty() {
        return Ok(out);
    }
    for _ in 0..subsets {
        let k = rng.gen_range(1..=max_subset.min(x.len()));
        let mut which: Vec<usize> = (0..x.len()).choose_multiple(rng, k);
        which.sort();
        let sub = x.subspace_metric(t, &which)?;
        for e in t.carrier(&sub)?.elems {
            let e = t.canonical(e.map_points(&|i| which[i]));
            if seen.insert(e.clone()) {
                out.push(e);
            }
        }
    }
    Ok(out)
}

/// Unit, associativity, functoriality and naturality laws on `M`, checked
/// pointwise on all of `TM` and on seeded samples of `TTM`, `TTTM` and of
/// nonexpanding endomaps of `M`.
pub fn check_monad_laws(t: &dyn MonadInstance, m: &Arc<MetricSpace>, seed: u64) -> Result<LawReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = m.labels();
    let tm = t.carrier(m)?;
    let tm_space = tm.metric(t)?;
    let mut r = LawReport {
        instance: t.name(),
        space: labels.to_vec(),
        tm_size: tm.len(),
        ..Default::default()
    };
    let eta: Vec<usize> = (0..m.len())
        .map(|x| tm.require(&t.unit(m, x)?))
        .collect::<Result<_>>()?;

    for (i, a) in tm.elems.iter().enumerate() {
        let t_eta = t.lift(a, &eta, &tm_space)?;
        let left = t.join(&nest(&t_eta, &tm.elems));
        r.record("mu . T eta = id", labels, a, &left, a);
        let eta_t = t.unit(&tm_space, i)?;
        let right = t.join(&nest(&eta_t, &tm.elems));
        r.record("mu . eta T = id", labels, a, &right, a);
    }

    // TTM as a TSpace over the materialized TM, sampled.
    let ttm = sample_next_level(t, &tm, &mut rng, TTM_SUBSETS, 3)?;
    let ttm_space = TSpace::new(tm_space.clone(), ttm.clone());
    let mu: Vec<Option<usize>> = ttm.iter().map(|s| tm.index_of(&t.join(&nest(s, &tm.elems)))).collect();
    let tttm = sample_next_level(t, &ttm_space, &mut rng, TTTM_SUBSETS, 2)?;
    for w in &tttm {
        let pts = w.points();
        if pts.iter().any(|&s| mu[s].is_none()) {
            r.beyond_budget += 1;
            continue;
        }
        let mu_assign: Vec<usize> = mu.iter().map(|x| x.unwrap_or(0)).collect();
        let t_mu = t.lift(w, &mu_assign, &tm_space)?;
        let left = t.join(&nest(&t_mu, &tm.elems));
        let mu_t = t.join(&nest(w, &ttm));
        let right = t.join(&nest(&mu_t, &tm.elems));
        let shown = nest(&nest(w, &ttm), &tm.elems);
        r.record("mu . T mu = mu . mu T", labels, &shown, &left, &right);
    }

    // Functoriality and naturality along sampled endomaps.
    let all_maps = nonexpanding_maps(m, m, DEFAULT_HOM_LIMIT)?;
    let identity: Vec<usize> = (0..m.len()).collect();
    let mut maps: Vec<Vec<usize>> = vec![identity.clone()];
    maps.extend(all_maps.choose_multiple(&mut rng, SAMPLED_MAPS).cloned());
    let lifted: Vec<Vec<Elem>> = maps
        .iter()
        .map(|f| tm.elems.iter().map(|a| t.lift(a, f, m)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    for a in &tm.elems {
        r.record("T id = id", labels, a, &lifted[0][tm.require(a)?], a);
    }
    for (fi, f) in maps.iter().enumerate() {
        for (gi, g) in maps.iter().enumerate() {
            let gf: Vec<usize> = f.iter().map(|&x| g[x]).collect();
            for (ai, a) in tm.elems.iter().enumerate() {
                let left = t.lift(&lifted[fi][ai], g, m)?;
                let right = if gi == 0 { lifted[fi][ai].clone() } else { t.lift(a, &gf, m)? };
                r.record("T(g . f) = Tg . Tf", labels, a, &left, &right);
            }
        }
        for x in 0..m.len() {
            let left = t.lift(&t.unit(m, x)?, f, m)?;
            let right = t.unit(m, f[x])?;
            r.record("Tf . eta = eta . f", labels, &Elem::Point(x), &left, &right);
        }
        let tf: Vec<Option<usize>> = lifted[fi].iter().map(|e| tm.index_of(e)).collect();
        for s in &ttm {
            if s.points().iter().any(|&i| tf[i].is_none()) {
                r.beyond_budget += 1;
                continue;
            }
            let tf_assign: Vec<usize> = tf.iter().map(|x| x.unwrap_or(0)).collect();
            let left = t.lift(&t.join(&nest(s, &tm.elems)), f, m)?;
            let right = t.join(&nest(&t.lift(s, &tf_assign, &tm_space)?, &tm.elems));
            r.record("Tf . mu = mu . TTf", labels, &nest(s, &tm.elems), &left, &right);
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct EnrichedViolation {
    pub f: String,
    pub g: String,
    pub d_maps: Dist,
    pub d_lifted: Dist,
    pub witness: String,
    /// `d(Tf a, Tg a)` for every `a` in `TA`, when `TA` is small.
    pub profile: Vec<(String, Dist)>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct EnrichedReport {
    pub instance: String,
    pub maps: usize,
    pub pairs: usize,
    pub violations: Vec<EnrichedViolation>,
}

impl EnrichedReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn show_map(a: &MetricSpace, b: &MetricSpace, f: &[usize]) -> String {
    let parts: Vec<String> = f
        .iter()
        .enumerate()
        .map(|(x, &y)| format!("{}->{}", a.label(x), b.label(y)))
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// `d(Tf, Tg) ≤ d(f, g)` for all nonexpanding `f, g : A → B`, with the
/// supremum metric on both hom-spaces.
pub fn check_enriched(t: &dyn MonadInstance, a: &Arc<MetricSpace>, b: &Arc<MetricSpace>) -> Result<EnrichedReport> {
    let maps = nonexpanding_maps(a, b, DEFAULT_HOM_LIMIT)?;
    let ta = t.carrier(a)?;
    let lifted: Vec<Vec<Elem>> = maps
        .iter()
        .map(|f| ta.elems.iter().map(|e| t.lift(e, f, b)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..maps.len())
        .flat_map(|i| (i + 1..maps.len()).map(move |j| (i, j)))
        .collect();
    let found = par::map_collect(pairs.len(), |k| -> Result<Option<EnrichedViolation>> {
        let (i, j) = pairs[k];
        let d_maps = sup_distance(b, &maps[i], &maps[j]);
        let mut worst = (Dist::ZERO, 0);
        let mut profile = Vec::new();
        for (e, (li, lj)) in lifted[i].iter().zip(&lifted[j]).enumerate().take(ta.len()) {
            let d = t.distance(b, li, lj)?;
            if d > worst.0 {
                worst = (d, e);
            }
            profile.push((ta.show(&ta.elems[e]), d));
        }
        if worst.0 <= d_maps {
            return Ok(None);
        }
        if ta.len() > 64 {
            profile.clear();
        }
        Ok(Some(EnrichedViolation {
            f: show_map(a, b, &maps[i]),
            g: show_map(a, b, &maps[j]),
            d_maps,
            d_lifted: worst.0,
            witness: ta.show(&ta.elems[worst.1]),
            profile,
        }))
    });
    let mut report = EnrichedReport {
        instance: t.name(),
        maps: maps.len(),
        pairs: pairs.len(),
        violations: Vec::new(),
    };
    for v in found {
        report.violations.extend(v?);
    }
    Ok(report)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SurjectionReport {
    pub instance: String,
    pub input_surjective: bool,
    pub image: usize,
    pub target: usize,
    /// Elements of the target `T`-space not hit, first few.
    pub missing: Vec<String>,
    pub missing_count: usize,
}

impl SurjectionReport {
    pub fn holds(&self) -> bool {
        self.missing_count == 0
    }
}

/// Whether `Te` is surjective. A non-surjective input is reported, not
/// rejected.
pub fn check_preserves_surjections(t: &dyn MonadInstance, e: &NonexpandingMap) -> Result<SurjectionReport> {
    let ta = t.carrier(e.dom())?;
    let tb = t.carrier(e.cod())?;
    let mut hit = vec![false; tb.len()];
    for a in &ta.elems {
        let img = t.lift(a, e.assignment(), e.cod())?;
        hit[tb.require(&img)?] = true;
    }
    let missing: Vec<usize> = (0..tb.len()).filter(|&i| !hit[i]).collect();
    Ok(SurjectionReport {
        instance: t.name(),
        input_surjective: e.is_surjective(),
        image: tb.len() - missing.len(),
        target: tb.len(),
        missing: missing.iter().take(8).map(|&i| tb.show(&tb.elems[i])).collect(),
        missing_count: missing.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PairTrajectory {
    pub pair: (String, String),
    /// Distance of the images at each stage.
    pub distances: Vec<Dist>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ColimitPreservationReport {
    pub instance: String,
    pub stages: usize,
    /// Sizes of `TD_i`.
    pub stage_sizes: Vec<usize>,
    /// Problems with the comparison `colim TD_i → T(colim D_i)`.
    pub comparison_failures: Vec<String>,
    /// Trajectories of pairs of `TD_0` elements along the `T`-chain.
    pub trajectories: Vec<PairTrajectory>,
    /// Pairs whose distance still drops at the last step although the last
    /// connecting map is an isometric embedding on their preimages.
    pub diverging: Vec<PairTrajectory>,
}

impl ColimitPreservationReport {
    pub fn holds(&self) -> bool {
        self.comparison_failures.is_empty() && self.diverging.is_empty()
    }
}

const TRAJECTORY_PAIRS: usize = 64;

/// Compares the colimit of the `T`-image of a finite chain with `T` of its
/// colimit, and records how distances of `TD_0` elements evolve along the
/// chain.
///
/// For a finite chain the colimit is attained at the last stage, so the
/// comparison itself can only fail through a bug. The signal for the
/// ω-continuation is in the trajectories: a pair is diverging when the last
/// connecting map is isometric on the underlying points but `T` of it still
/// shrinks their distance.
pub fn check_directed_colimit_preservation(
    t: &dyn MonadInstance,
    spaces: &[MetricSpace],
    maps: &[Vec<usize>],
) -> Result<ColimitPreservationReport> {
    let colim = directed_colimit(spaces, maps)?;
    check_colimit_conditions(spaces, maps, &colim).map_err(Error::input)?;
    let spaces: Vec<Arc<MetricSpace>> = spaces.iter().cloned().map(Arc::new).collect();
    let carriers: Vec<TSpace> = spaces.iter().map(|s| t.carrier(s)).collect::<Result<_>>()?;
    let metrics: Vec<Arc<MetricSpace>> = carriers.iter().map(|c| c.metric(t)).collect::<Result<_>>()?;
    let mut tmaps = Vec::with_capacity(maps.len());
    for (i, f) in maps.iter().enumerate() {
        let img: Vec<usize> = carriers[i]
            .elems
            .iter()
            .map(|e| carriers[i + 1].require(&t.lift(e, f, &spaces[i + 1])?))
            .collect::<Result<_>>()?;
        tmaps.push(img);
    }
    let t_spaces: Vec<MetricSpace> = metrics.iter().map(|m| (**m).clone()).collect();
    let tcolim = directed_colimit(&t_spaces, &tmaps)?;
    let colim_space = Arc::new(colim.space.clone());
    let t_of_colim = t.carrier(&colim_space)?;
    let t_of_colim_metric = t_of_colim.metric(t)?;

    let mut report = ColimitPreservationReport {
        instance: t.name(),
        stages: spaces.len(),
        stage_sizes: carriers.iter().map(TSpace::len).collect(),
        ..Default::default()
    };
    let mut comparison: Vec<Option<usize>> = vec![None; tcolim.space.len()];
    for (i, c) in carriers.iter().enumerate() {
        for (a, e) in c.elems.iter().enumerate() {
            let q = t_of_colim.require(&t.lift(e, &colim.cocone[i], &colim_space)?)?;
            let p = tcolim.cocone[i][a];
            match comparison[p] {
                None => comparison[p] = Some(q),
                Some(q0) if q0 != q => report
                    .comparison_failures
                    .push(format!("comparison is not well defined at {}", tcolim.space.label(p))),
                _ => {}
            }
        }
    }
    let mut hit = vec![false; t_of_colim.len()];
    for q in comparison.iter().flatten() {
        hit[*q] = true;
    }
    for (q, h) in hit.iter().enumerate() {
        if !h {
            report
                .comparison_failures
                .push(format!("{} is not in the comparison image", t_of_colim_metric.label(q)));
        }
    }
    let n = tcolim.space.len();
    for p in 0..n {
        for p2 in p + 1..n {
            if let (Some(q), Some(q2)) = (comparison[p], comparison[p2]) {
                let (d1, d2) = (tcolim.space.d(p, p2), t_of_colim_metric.d(q, q2));
                if d1 != d2 {
                    report.comparison_failures.push(format!(
                        "d({}, {}) = {d1} in the colimit of the T-chain but {d2} in T of the colimit",
                        tcolim.space.label(p),
                        tcolim.space.label(p2)
                    ));
                }
            }
        }
    }

    // Push pairs of TD_0 elements along the chain.
    let k = spaces.len();
    let c0 = &carriers[0];
    let pairs: Vec<(usize, usize)> = (0..c0.len())
        .flat_map(|a| (a + 1..c0.len()).map(move |b| (a, b)))
        .take(TRAJECTORY_PAIRS)
        .collect();
    for (a, b) in pairs {
        let (mut x, mut y) = (a, b);
        let mut distances = vec![metrics[0].d(x, y)];
        for s in 0..k - 1 {
            x = tmaps[s][x];
            y = tmaps[s][y];
            distances.push(metrics[s + 1].d(x, y));
        }
        let traj = PairTrajectory {
            pair: (c0.show(&c0.elems[a]), c0.show(&c0.elems[b])),
            distances,
        };
        if k >= 2 {
            let last = k - 2;
            // Preimages of the pair at the second-to-last stage.
            let (mut u, mut v) = (a, b);
            for tm in tmaps.iter().take(last) {
                u = tm[u];
                v = tm[v];
            }
            let (eu, ev) = (&carriers[last].elems[u], &carriers[last].elems[v]);
            let isometric_below = eu.points().iter().chain(ev.points().iter()).all(|&p| {
                eu.points()
                    .iter()
                    .chain(ev.points().iter())
                    .all(|&q| spaces[last + 1].d(maps[last][p], maps[last][q]) == spaces[last].d(p, q))
            });
            let d = &traj.distances;
            if isometric_below && d[k - 1] < d[k - 2] {
                report.diverging.push(traj.clone());
            }
        }
        report.trajectories.push(traj);
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct PrecongruenceWitness {
    pub a: String,
    pub b: String,
    pub eps: Dist,
    pub witness: String,
    /// `constructive` or `search`.
    pub method: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrecongruenceFailure {
    pub a: String,
    pub b: String,
    pub eps: Dist,
    pub reason: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PrecongruenceReport {
    pub instance: String,
    /// Whether `T i_M : T|M| → TM` is a bijection, the setting of the
    /// criterion as usually stated.
    pub bijective_comparison: bool,
    pub pairs_checked: usize,
    pub witnesses: Vec<PrecongruenceWitness>,
    pub failures: Vec<PrecongruenceFailure>,
}

impl PrecongruenceReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Sufficient criterion for `T` preserving the precongruence colimit of `M`:
/// for all `u, v ∈ T|M|` whose images under `T i_M` lie at finite distance
/// `ε`, some `P ∈ T(D_M^ε)` has `Tπ_l P = u` and `Tπ_r P = v`. A passing
/// report is a proof for `M`; a failing one is inconclusive on its own.
pub fn check_precongruence_preservation(t: &dyn MonadInstance, m: &Arc<MetricSpace>) -> Result<PrecongruenceReport> {
    let diag = precongruence(m);
    let disc = Arc::new(diag.discrete.clone());
    let tm = t.carrier(m)?;
    let t_disc = t.carrier(&disc)?;
    let identity: Vec<usize> = (0..m.len()).collect();
    let to_tm: Vec<usize> = t_disc
        .elems
        .iter()
        .map(|e| tm.require(&t.lift(e, &identity, m)?))
        .collect::<Result<_>>()?;
    let mut report = PrecongruenceReport {
        instance: t.name(),
        bijective_comparison: t_disc.len() == tm.len() && {
            let mut seen = to_tm.clone();
            seen.sort();
            seen.dedup();
            seen.len() == tm.len()
        },
        ..Default::default()
    };
    let mut level_carriers: HashMap<usize, (Arc<MetricSpace>, TSpace)> = HashMap::new();
    let labels = m.labels();
    for u in 0..t_disc.len() {
        for v in 0..t_disc.len() {
            if u == v {
                continue;
            }
            let (eu, ev) = (&t_disc.elems[u], &t_disc.elems[v]);
            let eps = t.distance(m, &tm.elems[to_tm[u]], &tm.elems[to_tm[v]])?;
            if !eps.is_finite() {
                continue;
            }
            report.pairs_checked += 1;
            let (li, level) = diag
                .levels
                .iter()
                .enumerate()
                .rev()
                .find(|(_, l)| l.eps <= eps)
                .ok_or_else(|| Error::input("precongruence without a level"))?;
            let (left, right) = (level.left(), level.right());
            let check = |p: &Elem| -> Result<bool> {
                Ok(t.lift(p, &left, &disc)? == *eu && t.lift(p, &right, &disc)? == *ev)
            };
            let (found, method) = match t.witness(m, &level.pairs, eu, ev) {
                Some(w) => (w, "constructive"),
                None => {
                    if let std::collections::hash_map::Entry::Vacant(slot) = level_carriers.entry(li) {
                        let space = Arc::new(level.space(m));
                        let c = t.carrier(&space)?;
                        slot.insert((space, c));
                    }
                    let (_, c) = &level_carriers[&li];
                    let mut hit = None;
                    for p in &c.elems {
                        if check(p)? {
                            hit = Some(p.clone());
                            break;
                        }
                    }
                    (hit, "search")
                }
            };
            let pair_labels: Vec<String> = level
                .pairs
                .iter()
                .map(|&(x, y)| format!("({},{})", labels[x], labels[y]))
                .collect();
            match found {
                Some(p) if check(&p)? => report.witnesses.push(PrecongruenceWitness {
                    a: eu.display(labels),
                    b: ev.display(labels),
                    eps,
                    witness: p.display(&pair_labels),
                    method: method.into(),
                }),
                Some(p) => report.failures.push(PrecongruenceFailure {
                    a: eu.display(labels),
                    b: ev.display(labels),
                    eps,
                    reason: format!("candidate {} does not project correctly", p.display(&pair_labels)),
                }),
                None => report.failures.push(PrecongruenceFailure {
                    a: eu.display(labels),
                    b: ev.display(labels),
                    eps,
                    reason: format!("no element of T(D^{}) projects onto the pair", level.eps),
                }),
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monads::{BinTerms, FiniteHausdorff, QuasiDiscreteReflection, TensorWord, Word, WordDropLast};

    fn two(d: Dist) -> Arc<MetricSpace> {
        Arc::new(MetricSpace::from_pairs(&["a", "b"], &[("a", "b", d)]).unwrap())
    }

    #[test]
    fn word_laws_hold() {
        let r = check_monad_laws(&Word::new(3), &two(Dist::ONE), 7).unwrap();
        assert!(r.holds(), "{:?}", r.failures);
        assert!(r.checked["mu . T mu = mu . mu T"] > 0);
    }

    #[test]
    fn dropping_the_last_letter_breaks_a_law() {
        let r = check_monad_laws(&WordDropLast::new(3), &two(Dist::ONE), 7).unwrap();
        assert!(!r.holds());
    }

    #[test]
    fn hausdorff_laws_hold() {
        let r = check_monad_laws(&FiniteHausdorff::new(None), &two(Dist::ratio(1, 2)), 3).unwrap();
        assert!(r.holds(), "{:?}", r.failures);
    }

    #[test]
    fn tensor_word_is_not_enriched() {
        let a = Arc::new(MetricSpace::singleton("x"));
        let r = check_enriched(&TensorWord::new(4), &a, &two(Dist::ONE)).unwrap();
        assert!(!r.holds());
        let v = &r.violations[0];
        assert_eq!(v.d_maps, Dist::ONE);
        assert_eq!(v.d_lifted, Dist::int(4));
        let r = check_enriched(&Word::new(4), &a, &two(Dist::ONE)).unwrap();
        assert!(r.holds());
    }

    #[test]
    fn bin_terms_loses_surjectivity() {
        let disc = Arc::new(MetricSpace::discrete(&["a", "b"]));
        let e = NonexpandingMap::new(disc, two(Dist::ratio(1, 2)), vec![0, 1]).unwrap();
        let r = check_preserves_surjections(&BinTerms::new(2), &e).unwrap();
        assert!(r.input_surjective);
        assert!(!r.holds());
        let r = check_preserves_surjections(&Word::new(3), &e).unwrap();
        assert!(r.holds());
    }

    #[test]
    fn hausdorff_precongruence_has_constructive_witnesses() {
        let m = Arc::new(
            MetricSpace::from_pairs(
                &["a", "b", "c"],
                &[("a", "b", Dist::ratio(1, 2)), ("b", "c", Dist::ONE), ("a", "c", Dist::ONE)],
            )
            .unwrap(),
        );
        let r = check_precongruence_preservation(&FiniteHausdorff::new(None), &m).unwrap();
        assert!(r.holds(), "{:?}", r.failures);
        assert!(r.bijective_comparison);
        assert!(r.witnesses.iter().all(|w| w.method == "constructive"));
        let r = check_precongruence_preservation(&Word::new(2), &m).unwrap();
        assert!(r.holds(), "{:?}", r.failures);
    }

    #[test]
    fn quasi_discrete_precongruence_fails() {
        let m = Arc::new(
            MetricSpace::from_pairs(
                &["a", "b", "c"],
                &[("a", "b", Dist::ratio(1, 2)), ("b", "c", Dist::INF), ("a", "c", Dist::INF)],
            )
            .unwrap(),
        );
        let r = check_precongruence_preservation(&QuasiDiscreteReflection::new(), &m).unwrap();
        assert!(!r.holds());
        assert!(!r.bijective_comparison);
    }

    /// `{-1} ∪ {2^-k : k ≤ n}` as a subspace of the real line, with `-1` first.
    fn real_chain_stage(n: u32) -> MetricSpace {
        let den = 1u64 << n;
        let xs: Vec<i64> = std::iter::once(-(den as i64)).chain((0..=n).map(|k| (den >> k) as i64)).collect();
        let labels = xs
            .iter()
            .map(|&x| format!("{}{}", if x < 0 { "-" } else { "" }, Dist::ratio(x.unsigned_abs(), den)))
            .collect();
        let d = xs
            .iter()
            .flat_map(|&x| xs.iter().map(move |&y| Dist::ratio(x.abs_diff(y), den)))
            .collect();
        MetricSpace::new(labels, d).unwrap()
    }

    #[test]
    fn quasi_discrete_chain_keeps_shrinking() {
        let n = 4;
        let spaces: Vec<MetricSpace> = (0..n).map(real_chain_stage).collect();
        let maps: Vec<Vec<usize>> = (0..n as usize - 1).map(|k| (0..k + 2).collect()).collect();
        let r = check_directed_colimit_preservation(&QuasiDiscreteReflection::new(), &spaces, &maps).unwrap();
        assert!(r.comparison_failures.is_empty(), "{:?}", r.comparison_failures);
        assert_eq!(r.trajectories.len(), 1);
        let expect: Vec<Dist> = (0..n).map(|k| Dist::ONE + Dist::pow2_neg(k)).collect();
        assert_eq!(r.trajectories[0].distances, expect);
        assert!(!r.holds());

        let r = check_directed_colimit_preservation(&Word::new(2), &spaces, &maps).unwrap();
        assert!(r.holds());
    }
}
