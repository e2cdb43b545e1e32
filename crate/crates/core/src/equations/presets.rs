//! Presentations of standard varieties.

use std::sync::Arc;

use crate::dist::Dist;
use crate::metric::MetricSpace;
use crate::terms::{Signature, Term};

use super::{BasicEquation, Equation, Presentation, QuantEquation};

fn x() -> Term {
    Term::var(0)
}

fn y() -> Term {
    Term::var(1)
}

fn z() -> Term {
    Term::var(2)
}

fn mul(a: Term, b: Term) -> Term {
    Term::app(0, vec![a, b])
}

fn unit() -> Term {
    Term::app(1, vec![])
}

fn plain(n: usize, l: Term, r: Term, eps: Dist) -> Equation {
    let vars = ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect();
    Equation::Plain(QuantEquation::new(vars, l, r, eps).expect("preset equation"))
}

fn near_pair() -> Arc<MetricSpace> {
    Arc::new(MetricSpace::from_pairs(&["x", "y"], &[("x", "y", Dist::ONE)]).expect("two points"))
}

fn basic(l: Term, r: Term, eps: Dist) -> Equation {
    Equation::Basic(BasicEquation::new(near_pair(), l, r, eps).expect("preset equation"))
}

fn build(name: &str, sig: Signature, equations: Vec<Equation>) -> Presentation {
    Presentation::new(name, Arc::new(sig), equations).expect("preset presentation")
}

fn monoid_sig() -> Signature {
    Signature::finitary(&[("*", 2), ("e", 0)])
}

fn monoid_laws() -> Vec<Equation> {
    vec![
        plain(3, mul(mul(x(), y()), z()), mul(x(), mul(y(), z())), Dist::ZERO),
        plain(1, mul(unit(), x()), x(), Dist::ZERO),
        plain(1, mul(x(), unit()), x(), Dist::ZERO),
    ]
}

fn commutativity(eps: Dist) -> Equation {
    plain(2, mul(x(), y()), mul(y(), x()), eps)
}

/// Quantitative monoids: `*` associative with unit `e`.
pub fn monoid() -> Presentation {
    build("monoid", monoid_sig(), monoid_laws())
}

pub fn commutative_monoid() -> Presentation {
    let mut eqs = monoid_laws();
    eqs.push(commutativity(Dist::ZERO));
    build("commutative_monoid", monoid_sig(), eqs)
}

/// Monoids with `x * y =_ε y * x`.
pub fn almost_commutative(eps: Dist) -> Presentation {
    let mut eqs = monoid_laws();
    eqs.push(commutativity(eps));
    build("almost_commutative", monoid_sig(), eqs)
}

/// Semilattices without a neutral element: `+` associative, commutative and
/// idempotent. Free algebras are the nonempty finite subsets.
pub fn semilattice() -> Presentation {
    let sig = Signature::finitary(&[("+", 2)]);
    let eqs = vec![
        plain(3, mul(mul(x(), y()), z()), mul(x(), mul(y(), z())), Dist::ZERO),
        plain(2, mul(x(), y()), mul(y(), x()), Dist::ZERO),
        plain(1, mul(x(), x()), x(), Dist::ZERO),
    ];
    build("semilattice", sig, eqs)
}

/// Semilattices with `0`, i.e. commutative idempotent monoids.
pub fn semilattice_with_zero() -> Presentation {
    let sig = Signature::finitary(&[("+", 2), ("0", 0)]);
    let mut eqs = monoid_laws();
    eqs.push(commutativity(Dist::ZERO));
    eqs.push(plain(1, mul(x(), x()), x(), Dist::ZERO));
    build("semilattice_with_zero", sig, eqs)
}

/// Almost commutative monoids with `x * x =_ε x`.
pub fn almost_semilattice(eps: Dist) -> Presentation {
    let mut eqs = monoid_laws();
    eqs.push(commutativity(eps));
    eqs.push(plain(1, mul(x(), x()), x(), eps));
    build("almost_semilattice", monoid_sig(), eqs)
}

/// Spaces with all distances at most `ε`.
pub fn almost_small(eps: Dist) -> Presentation {
    build("almost_small", Signature::empty(), vec![plain(2, x(), y(), eps)])
}

/// `x =_1 y ⊢ x = y` over the empty signature.
pub fn quasi_discrete() -> Presentation {
    build("quasi_discrete", Signature::empty(), vec![basic(x(), y(), Dist::ZERO)])
}

/// Monoids commuting on pairs at distance at most 1.
pub fn quasi_commutative() -> Presentation {
    let mut eqs = monoid_laws();
    eqs.push(basic(mul(x(), y()), mul(y(), x()), Dist::ZERO));
    build("quasi_commutative", monoid_sig(), eqs)
}

pub fn almost_quasi_commutative(eps: Dist) -> Presentation {
    let mut eqs = monoid_laws();
    eqs.push(basic(mul(x(), y()), mul(y(), x()), eps));
    build("almost_quasi_commutative", monoid_sig(), eqs)
}

/// Looks a preset up by name; `eps` feeds the parametrized ones.
pub fn by_name(name: &str, eps: Dist) -> Option<Presentation> {
    Some(match name {
        "monoid" => monoid(),
        "commutative_monoid" => commutative_monoid(),
        "almost_commutative" => almost_commutative(eps),
        "semilattice" => semilattice(),
        "semilattice_with_zero" => semilattice_with_zero(),
        "almost_semilattice" => almost_semilattice(eps),
        "almost_small" => almost_small(eps),
        "quasi_discrete" => quasi_discrete(),
        "quasi_commutative" => quasi_commutative(),
        "almost_quasi_commutative" => almost_quasi_commutative(eps),
        _ => return None,
    })
}
