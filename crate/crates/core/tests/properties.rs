use std::sync::Arc;

use proptest::prelude::*;
use qalg::dsl;
use qalg::metric::sample::{random_space, standard_grid};
use qalg::metric::{hausdorff_distance, product, smallest_pseudometric, tensor, MetricSpace};
use qalg::monads::{self, check_monad_laws};
use qalg::terms::{Signature, Term};
use qalg::Dist;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dist() -> impl Strategy<Value = Dist> {
    prop_oneof![
        9 => (0u64..50, 1u64..17).prop_map(|(p, q)| Dist::ratio(p, q)),
        1 => Just(Dist::INF),
    ]
}

fn space(max_points: usize) -> impl Strategy<Value = MetricSpace> {
    any::<u64>().prop_map(move |seed| random_space(&mut ChaCha8Rng::seed_from_u64(seed), max_points, &standard_grid()))
}

fn term(vars: usize) -> impl Strategy<Value = Term> {
    let leaf = (0..vars).prop_map(Term::var);
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(0, vec![a, b])),
            Just(Term::app(1, vec![])),
            inner.prop_map(|a| Term::app(2, vec![a])),
        ]
    })
}

fn subset(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::btree_set(0..n, 1..=n).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #[test]
    fn dist_text_roundtrips(d in dist()) {
        prop_assert_eq!(d.to_string().parse::<Dist>().unwrap(), d);
    }

    #[test]
    fn dist_addition_is_a_commutative_monoid(a in dist(), b in dist(), c in dist()) {
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!(a + Dist::ZERO, a);
        prop_assert!(a + b >= a.max(b));
    }

    #[test]
    fn dist_order_matches_the_reals(a in dist(), b in dist()) {
        if a.is_finite() && b.is_finite() {
            prop_assert_eq!(a < b, a.to_f64() < b.to_f64());
        }
    }

    #[test]
    fn space_text_roundtrips(m in space(5)) {
        let back: MetricSpace = m.to_string().parse().unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn space_blocks_roundtrip(m in space(5)) {
        let doc = dsl::Document { blocks: vec![dsl::Block::Space(dsl::space_decl("M", &m))] };
        let r = dsl::load(&dsl::print(&doc)).unwrap();
        prop_assert_eq!(&**r.space("M").unwrap(), &m);
    }

    #[test]
    fn terms_print_and_parse_back(l in term(3), r in term(3), eps in dist()) {
        prop_assume!(eps.is_finite());
        let sig = Signature::finitary(&[("*", 2), ("e", 0), ("s", 1)]);
        let vars: Vec<String> = ["x", "y", "z"].map(String::from).to_vec();
        let text = format!(
            "signature S {{ * : 2  e : 0  s : 1 }}\npresentation P : S {{ {} =[{eps}] {} }}",
            l.display(&sig, &vars),
            r.display(&sig, &vars)
        );
        let doc = dsl::parse(&text).unwrap();
        prop_assert_eq!(dsl::parse(&dsl::print(&doc)).unwrap(), doc);
        let loaded = dsl::load(&text).unwrap();
        let p = loaded.presentation("P").unwrap();
        let (l2, r2, e2) = p.equations[0].sides();
        let names = p.equations[0].var_names();
        prop_assert_eq!(l2.display(&p.signature, names).to_string(), l.display(&sig, &vars).to_string());
        prop_assert_eq!(r2.display(&p.signature, names).to_string(), r.display(&sig, &vars).to_string());
        prop_assert_eq!(e2, eps);
    }

    #[test]
    fn hausdorff_is_a_metric_on_subsets(
        (m, a, b, c) in space(4).prop_flat_map(|m| {
            let n = m.len();
            (Just(m), subset(n), subset(n), subset(n))
        })
    ) {
        let n = m.len();
        let d = |x: &[usize], y: &[usize]| hausdorff_distance(&m, x, y);
        prop_assert_eq!(d(&a, &a), Dist::ZERO);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert!((0..n).all(|p| (0..n).all(|q| d(&[p], &[q]) == m.d(p, q))));
    }

    #[test]
    fn product_and_tensor_bound_each_other(a in space(3), b in space(3)) {
        let (p, t) = (product(&a, &b), tensor(&a, &b));
        for i in 0..p.len() {
            for j in 0..p.len() {
                prop_assert!(p.d(i, j) <= t.d(i, j));
                prop_assert!(t.d(i, j) <= p.d(i, j) + p.d(i, j));
                let (ai, bi, aj, bj) = (i / b.len(), i % b.len(), j / b.len(), j % b.len());
                prop_assert!(a.d(ai, aj) <= p.d(i, j) && b.d(bi, bj) <= p.d(i, j));
            }
        }
    }

    #[test]
    fn shortest_paths_respect_the_constraints(
        edges in proptest::collection::vec((0usize..5, 0usize..5, dist()), 0..10)
    ) {
        let labels: Vec<String> = (0..5).map(|i| format!("p{i}")).collect();
        let cons: Vec<(&str, &str, Dist)> =
            edges.iter().map(|&(x, y, d)| (labels[x].as_str(), labels[y].as_str(), d)).collect();
        let p = smallest_pseudometric(&labels, &cons).unwrap();
        prop_assert!(p.first_violation(false).is_none());
        for &(x, y, d) in &edges {
            prop_assert!(p.d(x, y) <= d);
        }
    }

    #[test]
    fn word_monad_laws(m in space(3), seed in any::<u64>()) {
        let t = monads::by_name("word", 2, Dist::ONE).unwrap();
        let r = check_monad_laws(t.as_ref(), &Arc::new(m), seed).unwrap();
        prop_assert!(r.holds(), "{:?}", r.failures);
    }
}
