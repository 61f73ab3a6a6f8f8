//! Shared strategies and independent oracles for the unit test suites.
//!
//! The oracles here deliberately take different routes than the library code
//! they vet: connectivity by literal bipartition search and bisimilarity by
//! coinductive pruning of the full atomic-harmony relation.

use std::collections::BTreeSet;

use proptest::prelude::*;

use crate::logic::Formula;
use crate::model::{Point, PointSet, QDModel};

/// Strategy for arbitrary models with 1 to `max_n` points, edge probability
/// 0.3 and propositions drawn from {p0, p1, p2}.
pub(crate) fn arb_model(max_n: usize) -> impl Strategy<Value = QDModel> {
    (1..=max_n)
        .prop_flat_map(|n| {
            let edges = proptest::collection::vec(proptest::bool::weighted(0.3), n * n);
            let props = proptest::collection::vec(
                proptest::sample::subsequence(vec!["p0", "p1", "p2"], 0..=3),
                n,
            );
            (Just(n), edges, props)
        })
        .prop_map(|(n, edges, props)| {
            let mut m = QDModel::new();
            let points: Vec<Point> = (0..n)
                .map(|i| m.add_point(format!("n{i}")).unwrap())
                .collect();
            for (k, &present) in edges.iter().enumerate() {
                if present {
                    m.add_edge(points[k / n], points[k % n]);
                }
            }
            for (i, ps) in props.iter().enumerate() {
                for p in ps {
                    m.add_prop(points[i], *p);
                }
            }
            m
        })
}

/// Strategy for arbitrary formulas over a small fixed atom alphabet,
/// including the derived operator kinds.
pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        proptest::sample::select(vec!["p0", "p1", "p2", "q", "zed_9"])
            .prop_map(|a| Formula::Atom(a.to_string())),
        Just(Formula::True),
        Just(Formula::False),
    ];
    leaf.prop_recursive(4, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::near),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::reach(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::prop(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::surr(a, b)),
        ]
    })
}

/// Strategy for formulas already in desugared shape: core kinds only, kept
/// shallow so the walk-enumeration oracle stays fast.
pub(crate) fn arb_core_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        proptest::sample::select(vec!["p0", "p1", "p2"])
            .prop_map(|a| Formula::Atom(a.to_string())),
        Just(Formula::True),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::near),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::reach(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::prop(a, b)),
        ]
    })
}

/// Connectivity decided exactly as defined: search all bipartitions into two
/// non-empty sets for a semi-separated one. Exponential; keep models small.
pub(crate) fn connected_by_bipartition_search(m: &QDModel) -> bool {
    let n = m.len();
    assert!(n <= 16, "bipartition search is exponential");
    if n == 0 {
        return true;
    }
    let points: Vec<Point> = m.points().collect();
    for mask in 1..(1u32 << n) - 1 {
        let u: PointSet = points
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &x)| x)
            .collect();
        let v: PointSet = points.iter().copied().filter(|x| !u.contains(x)).collect();
        if m.semi_separated(&u, &v) {
            return false;
        }
    }
    true
}

/// The greatest modal (or converse) bisimulation between two models, found
/// by pruning the full atomic-harmony relation until nothing violates the
/// step conditions. Every bisimulation of the same variant is a subset of
/// the result.
pub(crate) fn prune_greatest_bisim(
    m1: &QDModel,
    m2: &QDModel,
    converse: bool,
) -> BTreeSet<(Point, Point)> {
    let mut rel: BTreeSet<(Point, Point)> = m1
        .points()
        .flat_map(|a| m2.points().map(move |b| (a, b)))
        .filter(|&(a, b)| m1.props(a) == m2.props(b))
        .collect();
    loop {
        let keep: BTreeSet<(Point, Point)> = rel
            .iter()
            .copied()
            .filter(|&(a, b)| {
                let nb1: Vec<Point> = m1.min_nbhd(a).into_iter().collect();
                let nb2: Vec<Point> = m2.min_nbhd(b).into_iter().collect();
                let forth = nb1
                    .iter()
                    .all(|&y1| nb2.iter().any(|&y2| rel.contains(&(y1, y2))));
                let back = nb2
                    .iter()
                    .all(|&y2| nb1.iter().any(|&y1| rel.contains(&(y1, y2))));
                if !(forth && back) {
                    return false;
                }
                if !converse {
                    return true;
                }
                let cl1: Vec<Point> = {
                    let mut v: Vec<Point> = m1.predecessors(a).collect();
                    v.push(a);
                    v
                };
                let cl2: Vec<Point> = {
                    let mut v: Vec<Point> = m2.predecessors(b).collect();
                    v.push(b);
                    v
                };
                cl1.iter()
                    .all(|&y1| cl2.iter().any(|&y2| rel.contains(&(y1, y2))))
                    && cl2
                        .iter()
                        .all(|&y2| cl1.iter().any(|&y1| rel.contains(&(y1, y2))))
            })
            .collect();
        if keep.len() == rel.len() {
            return rel;
        }
        rel = keep;
    }
}
