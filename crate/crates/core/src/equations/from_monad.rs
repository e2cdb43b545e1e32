use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;

use crate::dist::Dist;
use crate::error::Result;
use crate::metric::MetricSpace;
use crate::monads::{nest, Elem, MonadInstance};
use crate::terms::{Arity, Signature, Symbol, Term};

use super::{Equation, Presentation, QuantEquation};

/// Default cap on the number of equations of the form `k*(σ) = σ(k(x_i))`.
pub const DEFAULT_SUBSTITUTION_BUDGET: usize = 50_000;

#[derive(Clone, Debug, Serialize)]
pub struct LegendEntry {
    pub symbol: String,
    pub arity: usize,
    /// The element of `TV_n` the symbol stands for, over `x0, …`.
    pub element: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FromMonadMetadata {
    pub n_max: usize,
    pub size_cap: usize,
    /// `|TV_n|` when enumerable within the instance's size policy.
    pub carrier_sizes: Vec<Option<usize>>,
    /// Symbols kept for each `n`.
    pub retained: Vec<usize>,
    pub truncated: bool,
    pub distance_equations: usize,
    pub substitution_equations: usize,
    pub unit_equations: usize,
    /// Substitutions skipped because `k*(σ)` is not a retained symbol.
    pub substitutions_outside: usize,
    pub substitution_budget_exhausted: bool,
}

#[derive(Clone, Debug)]
pub struct MonadPresentation {
    pub presentation: Presentation,
    pub legend: Vec<LegendEntry>,
    pub metadata: FromMonadMetadata,
    /// Retained elements of `TV_n`, indexed by `n`.
    pub symbols: Vec<Vec<Elem>>,
}

impl MonadPresentation {
    /// The operation index of the symbol for `e ∈ TV_n`.
    pub fn symbol_of(&self, n: usize, e: &Elem) -> Option<usize> {
        let pos = self.symbols.get(n)?.iter().position(|s| s == e)?;
        Some(self.symbols[..n].iter().map(Vec::len).sum::<usize>() + pos)
    }
}

fn variables(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// Elements of `TV_n` kept as symbols: all of them when there are at most
/// `size_cap`, otherwise the closure of the unit images under the instance's
/// operations, breadth first, stopping at `size_cap`.
fn retained_symbols(
    t: &dyn MonadInstance,
    v: &Arc<MetricSpace>,
    size_cap: usize,
) -> Result<(Vec<Elem>, Option<usize>, bool)> {
    let carrier = match t.carrier(v) {
        Ok(c) => Some(c),
        Err(e) if e.is_budget() => None,
        Err(e) => return Err(e),
    };
    let size = carrier.as_ref().map(|c| c.len());
    if let Some(c) = &carrier {
        if c.len() <= size_cap {
            return Ok((c.elems.clone(), size, false));
        }
    }
    let admissible = |e: &Elem| carrier.as_ref().is_none_or(|c| c.index_of(e).is_some());
    let mut kept: Vec<Elem> = Vec::new();
    let mut seen = HashSet::new();
    for x in 0..v.len() {
        let e = t.unit(v, x)?;
        if kept.len() < size_cap && seen.insert(e.clone()) {
            kept.push(e);
        }
    }
    let ops = t.operations();
    let mut frontier = 0;
    while kept.len() < size_cap {
        let before = kept.len();
        let mut fresh = Vec::new();
        'ops: for &(sym, arity) in &ops {
            if arity > 0 && before == 0 {
                continue;
            }
            let mut args = vec![0usize; arity];
            loop {
                if args.iter().all(|&a| a < frontier) && arity > 0 {
                    // Only combinations involving something new.
                } else {
                    let elems: Vec<Elem> = args.iter().map(|&a| kept[a].clone()).collect();
                    if let Some(e) = t.operation(sym, &elems) {
                        if admissible(&e) && seen.insert(e.clone()) {
                            fresh.push(e);
                            if before + fresh.len() >= size_cap {
                                break 'ops;
                            }
                        }
                    }
                }
                let mut i = 0;
                while i < arity {
                    args[i] += 1;
                    if args[i] < before {
                        break;
                    }
                    args[i] = 0;
                    i += 1;
                }
                if i == arity {
                    break;
                }
            }
        }
        frontier = before;
        kept.extend(fresh);
        if kept.len() == before {
            break;
        }
    }
    let truncated = size.is_none_or(|s| kept.len() < s);
    Ok((kept, size, truncated))
}

/// The presentation of the variety of `T`-algebras read off from `T`:
/// a symbol of arity `n` for every retained `σ ∈ TV_n`, and the equations
/// `l =_ε r` for `d(l, r) = ε < ∞` in `TV_n`, `k*(σ) = σ(k(x_i))` for maps
/// `k : V_n → TV_m`, and `η(x_i) = x_i`, for `n, m ≤ n_max`.
pub fn presentation_from_monad(t: &dyn MonadInstance, n_max: usize, size_cap: usize) -> Result<MonadPresentation> {
    presentation_from_monad_with_budget(t, n_max, size_cap, DEFAULT_SUBSTITUTION_BUDGET)
}

pub fn presentation_from_monad_with_budget(
    t: &dyn MonadInstance,
    n_max: usize,
    size_cap: usize,
    substitution_budget: usize,
) -> Result<MonadPresentation> {
    let mut meta = FromMonadMetadata {
        n_max,
        size_cap,
        ..Default::default()
    };
    let spaces: Vec<Arc<MetricSpace>> = (0..=n_max).map(|n| Arc::new(MetricSpace::discrete(&variables(n)))).collect();
    let mut symbols = Vec::new();
    for v in &spaces {
        let (kept, size, truncated) = retained_symbols(t, v, size_cap)?;
        meta.carrier_sizes.push(size);
        meta.retained.push(kept.len());
        meta.truncated |= truncated;
        symbols.push(kept);
    }
    let mut offset = vec![0usize];
    for s in &symbols {
        offset.push(offset.last().unwrap() + s.len());
    }
    let mut syms = Vec::new();
    let mut legend = Vec::new();
    for (n, s) in symbols.iter().enumerate() {
        let labels = variables(n);
        for (i, e) in s.iter().enumerate() {
            let name = format!("s{n}_{i}");
            syms.push(Symbol {
                name: name.clone(),
                arity: Arity::Finite(n),
            });
            legend.push(LegendEntry {
                symbol: name,
                arity: n,
                element: e.display(&labels),
            });
        }
    }
    let signature = Arc::new(Signature::new(syms)?);
    let op = |n: usize, i: usize| offset[n] + i;
    let on_vars = |n: usize, i: usize| Term::app(op(n, i), (0..n).map(Term::var).collect());
    let index_of = |n: usize, e: &Elem| symbols[n].iter().position(|s| s == e);

    let mut equations = Vec::new();
    for (n, s) in symbols.iter().enumerate() {
        for l in 0..s.len() {
            for r in l..s.len() {
                let d = t.distance(&spaces[n], &s[l], &s[r])?;
                if d.is_finite() {
                    equations.push(Equation::Plain(QuantEquation::new(variables(n), on_vars(n, l), on_vars(n, r), d)?));
                    meta.distance_equations += 1;
                }
            }
        }
    }

    'subst: for (n, sn) in symbols.iter().enumerate() {
        for (m, sm) in symbols.iter().enumerate() {
            if sm.is_empty() && n > 0 {
                continue;
            }
            for (si, sigma) in sn.iter().enumerate() {
                let mut k = vec![0usize; n];
                loop {
                    let images: Vec<Elem> = k.iter().map(|&j| sm[j].clone()).collect();
                    let lifted = t.canonical(t.join(&nest(sigma, &images)));
                    match index_of(m, &lifted) {
                        Some(li) => {
                            if meta.substitution_equations >= substitution_budget {
                                meta.substitution_budget_exhausted = true;
                                meta.truncated = true;
                                break 'subst;
                            }
                            let rhs = Term::app(op(n, si), k.iter().map(|&j| on_vars(m, j)).collect());
                            equations.push(Equation::Plain(QuantEquation::new(
                                variables(m),
                                on_vars(m, li),
                                rhs,
                                Dist::ZERO,
                            )?));
                            meta.substitution_equations += 1;
                        }
                        None => meta.substitutions_outside += 1,
                    }
                    let mut i = 0;
                    while i < n {
                        k[i] += 1;
                        if k[i] < sm.len() {
                            break;
                        }
                        k[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                }
            }
        }
    }
    if meta.substitutions_outside > 0 {
        meta.truncated = true;
    }

    for (n, v) in spaces.iter().enumerate() {
        for x in 0..n {
            if let Some(i) = index_of(n, &t.unit(v, x)?) {
                equations.push(Equation::Plain(QuantEquation::new(
                    variables(n),
                    on_vars(n, i),
                    Term::var(x),
                    Dist::ZERO,
                )?));
                meta.unit_equations += 1;
            }
        }
    }

    let presentation = Presentation::new(format!("from {}", t.name()), signature, equations)?;
    Ok(MonadPresentation {
        presentation,
        legend,
        metadata: meta,
        symbols,
    })
}
