//! Executable closure of a variety under products, generated subalgebras and
//! homomorphic images.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{check_algebra, product_algebra, subalgebra_generated, QuantAlgebra};
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::par;

use super::{satisfies_equation, variety_membership, MembershipFailure, Presentation};

#[derive(Clone, Debug, Serialize)]
pub struct ClosureViolation {
    /// `product`, `subalgebra` or `image`.
    pub kind: String,
    /// Indices into the sample of the algebras involved.
    pub sources: Vec<usize>,
    pub failure: MembershipFailure,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ClosureReport {
    pub members: Vec<usize>,
    pub products: usize,
    pub subalgebras: usize,
    pub images: usize,
    /// Images are only checked against unconditional equations.
    pub images_skipped: bool,
    pub violations: Vec<ClosureViolation>,
}

impl ClosureReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that binary products, all generated subalgebras, and all
/// homomorphic images (up to `image_cap` candidates per algebra) of the sample
/// members lying in the variety stay in it.
pub fn birkhoff_closure_check(p: &Presentation, sample: &[QuantAlgebra], image_cap: usize) -> Result<ClosureReport> {
    if !p.signature.is_finitary() {
        return Err(Error::input("closure checks need a finitary signature"));
    }
    let mut report = ClosureReport::default();
    let verdicts = par::map_slice(sample, |a| variety_membership(a, p));
    for (i, v) in verdicts.into_iter().enumerate() {
        if v?.is_none() {
            report.members.push(i);
        }
    }
    let members = report.members.clone();

    let pairs: Vec<(usize, usize)> = members
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| members[k..].iter().map(move |&j| (i, j)))
        .collect();
    let found = par::map_collect(pairs.len(), |k| -> Result<Option<ClosureViolation>> {
        let (i, j) = pairs[k];
        let prod = product_algebra(&p.signature, &[sample[i].clone(), sample[j].clone()])?;
        Ok(variety_membership(&prod.algebra, p)?.map(|failure| ClosureViolation {
            kind: "product".into(),
            sources: vec![i, j],
            failure,
        }))
    });
    report.products = pairs.len();
    for v in found {
        report.violations.extend(v?);
    }

    for &i in &members {
        let a = &sample[i];
        let n = a.len();
        if n > 16 {
            return Err(Error::budget("subalgebra seeds (carrier points)", 16));
        }
        let found = par::map_collect(1 << n, |mask| -> Result<Option<ClosureViolation>> {
            let seed: Vec<usize> = (0..n).filter(|b| mask & (1 << b) != 0).collect();
            let sub = subalgebra_generated(a, &seed)?;
            Ok(variety_membership(&sub.algebra, p)?.map(|failure| ClosureViolation {
                kind: "subalgebra".into(),
                sources: vec![i],
                failure,
            }))
        });
        report.subalgebras += 1 << n;
        for v in found {
            report.violations.extend(v?);
        }
    }

    report.images_skipped = p.has_conditional();
    if !report.images_skipped {
        for &i in &members {
            let images = homomorphic_images(&sample[i], image_cap)?;
            report.images += images.len();
            let found = par::map_slice(&images, |img| -> Result<Option<MembershipFailure>> {
                for (k, e) in p.equations.iter().enumerate() {
                    if let Some(witness) = satisfies_equation(img, e)? {
                        return Ok(Some(MembershipFailure {
                            equation: k,
                            text: e.display(&p.signature).to_string(),
                            witness,
                        }));
                    }
                }
                Ok(None)
            });
            for f in found {
                if let Some(failure) = f? {
                    report.violations.push(ClosureViolation {
                        kind: "image".into(),
                        sources: vec![i],
                        failure,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Set partitions of `0..n` as restricted growth strings: each entry is at
/// most one more than the largest before it.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rgs(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let limit = cur.iter().max().map_or(0, |m| m + 1);
        for c in 0..=limit {
            cur.push(c);
            rgs(n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rgs(n, &mut Vec::new(), &mut out);
    out
}

/// Candidate quotient distances: the realized distances of `a` together with
/// a fixed grid, all positive.
fn distance_grid(a: &QuantAlgebra) -> Vec<Dist> {
    let mut g = a.carrier().realized_distances();
    g.extend([Dist::ratio(1, 4), Dist::ratio(1, 2), Dist::ONE, Dist::int(2), Dist::INF]);
    g.retain(|d| !d.is_zero());
    g.sort();
    g.dedup();
    g
}

/// Homomorphic images of `a`: quotients by operation-compatible partitions,
/// carrying every separated metric from the grid that makes the quotient map
/// nonexpanding and the induced operations nonexpanding.
pub(crate) fn homomorphic_images(a: &QuantAlgebra, cap: usize) -> Result<Vec<QuantAlgebra>> {
    let n = a.len();
    if n > 8 {
        return Err(Error::budget("image enumeration carrier points", 8));
    }
    let sig = a.signature().clone();
    let grid = distance_grid(a);
    let mut out = Vec::new();
    for part in partitions(n) {
        let k = part.iter().max().map_or(0, |m| m + 1);
        let rep: Vec<usize> = (0..k).map(|c| part.iter().position(|&p| p == c).unwrap()).collect();
        // Congruence check and induced tables.
        let mut tables = Vec::with_capacity(sig.len());
        let mut congruence = true;
        for op in 0..sig.len() {
            let arity = sig.arity(op).size();
            let mut table: Vec<Option<usize>> = vec![None; k.pow(arity as u32)];
            for (args, v) in a.entries(op) {
                let idx = args.iter().fold(0, |acc, &x| acc * k + part[x]);
                match table[idx] {
                    None => table[idx] = Some(part[v]),
                    Some(c) if c != part[v] => congruence = false,
                    _ => {}
                }
            }
            tables.push(table);
        }
        if !congruence {
            continue;
        }
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|p| (p + 1..k).map(move |q| (p, q))).collect();
        let mut bound = vec![Dist::INF; k * k];
        for x in 0..n {
            for y in 0..n {
                let slot = &mut bound[part[x] * k + part[y]];
                *slot = (*slot).min(a.carrier().d(x, y));
            }
        }
        let options: Vec<Vec<Dist>> = pairs
            .iter()
            .map(|&(p, q)| grid.iter().copied().filter(|&d| d <= bound[p * k + q]).collect())
            .collect();
        if options.iter().any(Vec::is_empty) {
            continue;
        }
        let labels: Vec<String> = rep.iter().map(|&r| a.carrier().label(r).to_string()).collect();
        let mut choice = vec![0usize; pairs.len()];
        loop {
            let mut d = vec![Dist::ZERO; k * k];
            for (slot, &(p, q)) in pairs.iter().enumerate() {
                let v = options[slot][choice[slot]];
                d[p * k + q] = v;
                d[q * k + p] = v;
            }
            if let Ok(space) = MetricSpace::new(labels.clone(), d) {
                let img = QuantAlgebra::new(sig.clone(), Arc::new(space), tables.clone())?;
                if check_algebra(&img).is_valid() {
                    out.push(img);
                    if out.len() > cap {
                        return Err(Error::budget("homomorphic images", cap));
                    }
                }
            }
            // Odometer over the option lists.
            let mut slot = 0;
            while slot < choice.len() {
                choice[slot] += 1;
                if choice[slot] < options[slot].len() {
                    break;
                }
                choice[slot] = 0;
                slot += 1;
            }
            if slot == choice.len() {
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::enumerate_algebras;
    use crate::equations::presets;
    use crate::terms::Signature;

    #[test]
    fn partition_counts() {
        assert_eq!(partitions(0).len(), 1);
        assert_eq!(partitions(3).len(), 5);
        assert_eq!(partitions(4).len(), 15);
    }

    #[test]
    fn images_of_a_two_point_space() {
        let carrier = Arc::new(MetricSpace::from_pairs(&["a", "b"], &[("a", "b", Dist::ONE)]).unwrap());
        let a = QuantAlgebra::from_fn(Arc::new(Signature::empty()), carrier, |_, _| 0).unwrap();
        let images = homomorphic_images(&a, 100).unwrap();
        // One point, or two points at 1 or any larger grid distance.
        assert_eq!(images.len(), 1 + 3);
    }

    #[test]
    fn almost_small_closure() {
        let p = presets::almost_small(Dist::ONE);
        let sample: Vec<QuantAlgebra> = crate::metric::sample::all_small_spaces(3, &[Dist::ratio(1, 2), Dist::ONE, Dist::int(2)])
            .into_iter()
            .map(|m| QuantAlgebra::from_fn(p.signature.clone(), Arc::new(m), |_, _| 0).unwrap())
            .collect();
        let r = birkhoff_closure_check(&p, &sample, 10_000).unwrap();
        assert!(r.holds(), "{:?}", r.violations);
        assert!(!r.members.is_empty() && r.members.len() < sample.len());
    }

    #[test]
    fn one_point_is_closed() {
        let p = presets::almost_commutative(Dist::ratio(1, 2));
        let carrier = Arc::new(MetricSpace::singleton("*"));
        let sample = enumerate_algebras(&p.signature, &carrier, 10).unwrap();
        let r = birkhoff_closure_check(&p, &sample, 100).unwrap();
        assert_eq!(r.members, vec![0]);
        assert!(r.holds());
    }
}
