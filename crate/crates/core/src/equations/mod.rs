//! Quantitative equations, basic equations over metric contexts, hypothesis
//! lists, and their satisfaction deciders.
//!
//! Every decider returns the lexicographically first counterexample, with
//! variables ordered as declared and the first variable most significant.

mod closure;
mod from_monad;
pub mod presets;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::QuantAlgebra;
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::metric::{metric_reflection, smallest_pseudometric, MetricSpace};
use crate::par;
use crate::terms::{validate_term, Signature, Term};

pub use closure::{birkhoff_closure_check, ClosureReport, ClosureViolation};
pub use from_monad::{
    presentation_from_monad, presentation_from_monad_with_budget, FromMonadMetadata, LegendEntry, MonadPresentation,
    DEFAULT_SUBSTITUTION_BUDGET,
};

/// `l =_ε r` over discrete variables, holding under every interpretation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantEquation {
    pub vars: Vec<String>,
    pub l: Term,
    pub r: Term,
    pub eps: Dist,
}

/// `M ⊢ l =_ε r`: holds under every nonexpanding interpretation of `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicEquation {
    pub context: Arc<MetricSpace>,
    pub l: Term,
    pub r: Term,
    pub eps: Dist,
}

/// `x_0 =_{δ_0} y_0, … ⊢ l =_ε r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisListEquation {
    pub vars: Vec<String>,
    pub hypotheses: Vec<(usize, usize, Dist)>,
    pub l: Term,
    pub r: Term,
    pub eps: Dist,
}

impl QuantEquation {
    pub fn new(vars: Vec<String>, l: Term, r: Term, eps: Dist) -> Result<Self> {
        check_terms(vars.len(), &l, &r, eps)?;
        Ok(QuantEquation { vars, l, r, eps })
    }
}

impl BasicEquation {
    pub fn new(context: Arc<MetricSpace>, l: Term, r: Term, eps: Dist) -> Result<Self> {
        check_terms(context.len(), &l, &r, eps)?;
        Ok(BasicEquation { context, l, r, eps })
    }
}

impl HypothesisListEquation {
    pub fn new(vars: Vec<String>, hypotheses: Vec<(usize, usize, Dist)>, l: Term, r: Term, eps: Dist) -> Result<Self> {
        check_terms(vars.len(), &l, &r, eps)?;
        if hypotheses.iter().any(|&(x, y, _)| x >= vars.len() || y >= vars.len()) {
            return Err(Error::input("hypothesis mentions an undeclared variable"));
        }
        Ok(HypothesisListEquation {
            vars,
            hypotheses,
            l,
            r,
            eps,
        })
    }
}

fn check_terms(n: usize, l: &Term, r: &Term, eps: Dist) -> Result<()> {
    if !eps.is_finite() {
        return Err(Error::input("equations need a finite ε"));
    }
    if l.var_bound().max(r.var_bound()) > n {
        return Err(Error::input("equation mentions an undeclared variable"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equation {
    Plain(QuantEquation),
    Basic(BasicEquation),
    Hypotheses(HypothesisListEquation),
}

impl Equation {
    pub fn sides(&self) -> (&Term, &Term, Dist) {
        match self {
            Equation::Plain(e) => (&e.l, &e.r, e.eps),
            Equation::Basic(e) => (&e.l, &e.r, e.eps),
            Equation::Hypotheses(e) => (&e.l, &e.r, e.eps),
        }
    }

    pub fn var_names(&self) -> &[String] {
        match self {
            Equation::Plain(e) => &e.vars,
            Equation::Basic(e) => e.context.labels(),
            Equation::Hypotheses(e) => &e.vars,
        }
    }

    /// Unconditional equations are preserved by homomorphic images.
    pub fn is_unconditional(&self) -> bool {
        matches!(self, Equation::Plain(_))
    }

    /// Upper bounds on the distance between interpretations of each pair of
    /// variables; `∞` where unconstrained.
    pub fn bounds(&self) -> Vec<Dist> {
        match self {
            Equation::Plain(e) => unconstrained(e.vars.len()),
            Equation::Basic(e) => e.context.matrix().to_vec(),
            Equation::Hypotheses(e) => hypothesis_bounds(e),
        }
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> EquationDisplay<'a> {
        EquationDisplay { eq: self, sig }
    }
}

pub struct EquationDisplay<'a> {
    eq: &'a Equation,
    sig: &'a Signature,
}

impl fmt::Display for EquationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.eq.var_names();
        match self.eq {
            Equation::Plain(_) => {}
            Equation::Basic(e) => {
                let m = &e.context;
                let mut parts = Vec::new();
                for i in 0..m.len() {
                    for j in i + 1..m.len() {
                        if m.d(i, j).is_finite() {
                            parts.push(format!("{} ~[{}] {}", m.label(i), m.d(i, j), m.label(j)));
                        }
                    }
                }
                write!(f, "{{{}}} |- ", parts.join(", "))?;
            }
            Equation::Hypotheses(e) => {
                let hyps: Vec<String> = e
                    .hypotheses
                    .iter()
                    .map(|&(x, y, d)| format!("{} ~[{d}] {}", names[x], names[y]))
                    .collect();
                write!(f, "{} |- ", hyps.join(", "))?;
            }
        }
        let (l, r, eps) = self.eq.sides();
        write!(f, "{} =[{eps}] {}", l.display(self.sig, names), r.display(self.sig, names))
    }
}

fn unconstrained(n: usize) -> Vec<Dist> {
    (0..n * n)
        .map(|k| if k / n == k % n { Dist::ZERO } else { Dist::INF })
        .collect()
}

fn hypothesis_bounds(e: &HypothesisListEquation) -> Vec<Dist> {
    let n = e.vars.len();
    let mut b = unconstrained(n);
    for &(x, y, d) in &e.hypotheses {
        if x != y {
            b[x * n + y] = b[x * n + y].min(d);
            b[y * n + x] = b[y * n + x].min(d);
        }
    }
    b
}

/// A named set of equations over a signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub name: String,
    pub signature: Arc<Signature>,
    pub equations: Vec<Equation>,
}

impl Presentation {
    pub fn new(name: impl Into<String>, signature: Arc<Signature>, equations: Vec<Equation>) -> Result<Self> {
        for e in &equations {
            let (l, r, _) = e.sides();
            for t in [l, r] {
                match e {
                    Equation::Basic(b) => validate_term(t, &signature, &b.context)?,
                    _ => {
                        let vars = MetricSpace::discrete(e.var_names());
                        validate_term(t, &signature, &vars)?
                    }
                }
            }
        }
        Ok(Presentation {
            name: name.into(),
            signature,
            equations,
        })
    }

    pub fn has_conditional(&self) -> bool {
        self.equations.iter().any(|e| !e.is_unconditional())
    }
}

/// A violating interpretation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// `(variable, point)` pairs.
    pub assignment: Vec<(String, String)>,
    pub left: String,
    pub right: String,
    pub distance: Dist,
    pub eps: Dist,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let asg: Vec<String> = self.assignment.iter().map(|(x, p)| format!("{x}:={p}")).collect();
        write!(
            f,
            "[{}] gives d({}, {}) = {} > {}",
            asg.join(", "),
            self.left,
            self.right,
            self.distance,
            self.eps
        )
    }
}

/// Finds the first interpretation respecting `bounds` under which `l` and
/// `r` land further apart than `eps`.
fn search(
    a: &QuantAlgebra,
    names: &[String],
    bounds: &[Dist],
    l: &Term,
    r: &Term,
    eps: Dist,
) -> Result<Option<Counterexample>> {
    let n = names.len();
    let size = a.len();
    if size == 0 {
        return Ok(None);
    }
    if n == 0 {
        return check_one(a, names, &[], l, r, eps);
    }
    let found = par::find_map_first(size, |first| {
        let mut f = vec![first];
        dfs(a, names, bounds, l, r, eps, &mut f).transpose()
    });
    found.transpose()
}

fn dfs(
    a: &QuantAlgebra,
    names: &[String],
    bounds: &[Dist],
    l: &Term,
    r: &Term,
    eps: Dist,
    f: &mut Vec<usize>,
) -> Result<Option<Counterexample>> {
    let n = names.len();
    let i = f.len();
    if i == n {
        return check_one(a, names, f, l, r, eps);
    }
    for p in 0..a.len() {
        if (0..i).all(|j| a.carrier().d(f[j], p) <= bounds[j * n + i]) {
            f.push(p);
            let res = dfs(a, names, bounds, l, r, eps, f);
            f.pop();
            if !matches!(res, Ok(None)) {
                return res;
            }
        }
    }
    Ok(None)
}

fn check_one(
    a: &QuantAlgebra,
    names: &[String],
    f: &[usize],
    l: &Term,
    r: &Term,
    eps: Dist,
) -> Result<Option<Counterexample>> {
    let (vl, vr) = (a.eval(l, f)?, a.eval(r, f)?);
    let distance = a.carrier().d(vl, vr);
    if distance <= eps {
        return Ok(None);
    }
    Ok(Some(Counterexample {
        assignment: names
            .iter()
            .zip(f)
            .map(|(x, &p)| (x.clone(), a.carrier().label(p).to_string()))
            .collect(),
        left: a.carrier().label(vl).to_string(),
        right: a.carrier().label(vr).to_string(),
        distance,
        eps,
    }))
}

/// `None` when `a` satisfies `e` under every interpretation of its
/// variables, else the first counterexample.
pub fn satisfies(a: &QuantAlgebra, e: &QuantEquation) -> Result<Option<Counterexample>> {
    search(a, &e.vars, &unconstrained(e.vars.len()), &e.l, &e.r, e.eps)
}

/// As [`satisfies`], quantifying only over nonexpanding interpretations of
/// the context.
pub fn satisfies_basic(a: &QuantAlgebra, e: &BasicEquation) -> Result<Option<Counterexample>> {
    search(a, e.context.labels(), e.context.matrix(), &e.l, &e.r, e.eps)
}

/// Satisfaction of a hypothesis list, checked directly: interpretations
/// range over functions with `d(f x_i, f y_i) ≤ δ_i`.
pub fn satisfies_hypotheses(a: &QuantAlgebra, e: &HypothesisListEquation) -> Result<Option<Counterexample>> {
    search(a, &e.vars, &hypothesis_bounds(e), &e.l, &e.r, e.eps)
}

pub fn satisfies_equation(a: &QuantAlgebra, e: &Equation) -> Result<Option<Counterexample>> {
    match e {
        Equation::Plain(q) => satisfies(a, q),
        Equation::Basic(b) => satisfies_basic(a, b),
        Equation::Hypotheses(h) => satisfies_hypotheses(a, h),
    }
}

/// A hypothesis list turned into a basic equation, with the map sending
/// each variable to its point of the context.
#[derive(Clone, Debug)]
pub struct ReflectedHypotheses {
    pub equation: BasicEquation,
    pub map: Vec<usize>,
}

/// Builds the largest pseudometric on the variables obeying the hypotheses,
/// takes its metric reflection as the context, and renames the terms along
/// the quotient map.
pub fn reflect_hypotheses(h: &HypothesisListEquation) -> Result<ReflectedHypotheses> {
    let constraints: Vec<(&str, &str, Dist)> = h
        .hypotheses
        .iter()
        .map(|&(x, y, d)| (h.vars[x].as_str(), h.vars[y].as_str(), d))
        .collect();
    let pseudo = smallest_pseudometric(&h.vars, &constraints)?;
    let refl = metric_reflection(&pseudo);
    let map = refl.quotient.clone();
    let rename = |x: usize| map[x];
    let equation = BasicEquation::new(Arc::new(refl.space), h.l.map_vars(&rename), h.r.map_vars(&rename), h.eps)?;
    Ok(ReflectedHypotheses { equation, map })
}

/// The first equation of `p` that `a` fails, with its counterexample.
#[derive(Clone, Debug, Serialize)]
pub struct MembershipFailure {
    pub equation: usize,
    pub text: String,
    pub witness: Counterexample,
}

pub fn variety_membership(a: &QuantAlgebra, p: &Presentation) -> Result<Option<MembershipFailure>> {
    if a.signature() != &p.signature {
        return Err(Error::input("algebra and presentation have different signatures"));
    }
    for (i, e) in p.equations.iter().enumerate() {
        if let Some(witness) = satisfies_equation(a, e)? {
            return Ok(Some(MembershipFailure {
                equation: i,
                text: e.display(&p.signature).to_string(),
                witness,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::enumerate_algebras;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn two(d: Dist) -> Arc<MetricSpace> {
        Arc::new(MetricSpace::from_pairs(&["a", "b"], &[("a", "b", d)]).unwrap())
    }

    fn bare(space: Arc<MetricSpace>) -> QuantAlgebra {
        QuantAlgebra::from_fn(Arc::new(Signature::empty()), space, |_, _| 0).unwrap()
    }

    #[test]
    fn plain_satisfaction() {
        let e = QuantEquation::new(vars(&["x", "y"]), Term::var(0), Term::var(1), Dist::ONE).unwrap();
        assert_eq!(satisfies(&bare(two(Dist::ratio(1, 2))), &e).unwrap(), None);
        let w = satisfies(&bare(two(Dist::INF)), &e).unwrap().unwrap();
        assert_eq!(w.assignment, vec![("x".into(), "a".into()), ("y".into(), "b".into())]);
        assert_eq!(w.distance, Dist::INF);
        let trivial = QuantEquation::new(vars(&["x"]), Term::var(0), Term::var(0), Dist::ZERO).unwrap();
        assert_eq!(satisfies(&bare(two(Dist::INF)), &trivial).unwrap(), None);
    }

    #[test]
    fn quasi_discrete_axiom() {
        let ctx = Arc::new(MetricSpace::from_pairs(&["x", "y"], &[("x", "y", Dist::ONE)]).unwrap());
        let e = BasicEquation::new(ctx, Term::var(0), Term::var(1), Dist::ZERO).unwrap();
        assert_eq!(satisfies_basic(&bare(two(Dist::int(2))), &e).unwrap(), None);
        let w = satisfies_basic(&bare(two(Dist::ratio(1, 2))), &e).unwrap().unwrap();
        assert_eq!(w.distance, Dist::ratio(1, 2));
    }

    #[test]
    fn discrete_context_agrees_with_plain() {
        let sig = Arc::new(Signature::finitary(&[("m", 2)]));
        let carrier = two(Dist::ONE);
        let l = Term::app(0, vec![Term::var(0), Term::var(1)]);
        let r = Term::app(0, vec![Term::var(1), Term::var(0)]);
        let plain = QuantEquation::new(vars(&["x", "y"]), l.clone(), r.clone(), Dist::ratio(1, 2)).unwrap();
        let basic = BasicEquation::new(Arc::new(MetricSpace::discrete(&["x", "y"])), l, r, Dist::ratio(1, 2)).unwrap();
        for a in enumerate_algebras(&sig, &carrier, 1000).unwrap() {
            assert_eq!(satisfies(&a, &plain).unwrap(), satisfies_basic(&a, &basic).unwrap());
        }
    }

    #[test]
    fn reflection_examples() {
        let comm_l = Term::app(0, vec![Term::var(0), Term::var(1)]);
        let comm_r = Term::app(0, vec![Term::var(1), Term::var(0)]);
        let h = HypothesisListEquation::new(
            vars(&["x", "y"]),
            vec![(0, 1, Dist::ONE)],
            comm_l.clone(),
            comm_r.clone(),
            Dist::ZERO,
        )
        .unwrap();
        let r = reflect_hypotheses(&h).unwrap();
        assert_eq!(r.equation.context.d(0, 1), Dist::ONE);
        assert_eq!(r.equation.l, comm_l);

        let h = HypothesisListEquation::new(vars(&["x", "y"]), vec![(0, 1, Dist::ZERO)], comm_l, comm_r, Dist::ZERO)
            .unwrap();
        let r = reflect_hypotheses(&h).unwrap();
        assert_eq!(r.equation.context.len(), 1);
        assert_eq!(r.equation.l, r.equation.r);

        let h = HypothesisListEquation::new(
            vars(&["x", "y", "z"]),
            vec![(0, 1, Dist::ONE), (1, 2, Dist::ONE)],
            Term::var(0),
            Term::var(2),
            Dist::int(3),
        )
        .unwrap();
        let r = reflect_hypotheses(&h).unwrap();
        assert_eq!(r.equation.context.d(0, 2), Dist::int(2));
    }

    #[test]
    fn membership() {
        let p = presets::semilattice();
        let sig = p.signature.clone();
        let carrier = Arc::new(MetricSpace::discrete(&["0", "1"]));
        let join = QuantAlgebra::from_fn(sig.clone(), carrier.clone(), |_, x| x[0].max(x[1])).unwrap();
        assert!(variety_membership(&join, &p).unwrap().is_none());
        let xor = QuantAlgebra::from_fn(sig, carrier, |_, x| x[0] ^ x[1]).unwrap();
        let fail = variety_membership(&xor, &p).unwrap().unwrap();
        assert!(fail.text.contains("+(x, x)"), "{}", fail.text);
        let empty = Presentation::new("none", Arc::new(Signature::empty()), vec![]).unwrap();
        assert!(variety_membership(&bare(two(Dist::ONE)), &empty).unwrap().is_none());
    }

    #[test]
    fn infinite_eps_rejected() {
        assert!(QuantEquation::new(vars(&["x"]), Term::var(0), Term::var(0), Dist::INF).is_err());
    }
}
