//! Random models and formulas for the statistical test suites. Everything
//! is driven by a caller-supplied generator, so a fixed seed reproduces a
//! run exactly.

use rand::Rng;

use crate::logic::Formula;
use crate::model::{Point, QDModel};

/// A model with 1 to `max_points` points named `n0`, `n1`, ... Edges are
/// sparse (expected out-degree around 2.5, capped so small models are not
/// saturated) and each atom holds at each point with probability 0.4.
pub fn model<R: Rng + ?Sized>(rng: &mut R, max_points: usize, atoms: &[&str]) -> QDModel {
    let n = rng.random_range(1..=max_points);
    let mut m = QDModel::new();
    let points: Vec<Point> = (0..n)
        .map(|i| m.add_point(format!("n{i}")).unwrap())
        .collect();
    let edge_prob = (2.5 / n as f64).min(0.6);
    for &a in &points {
        for &b in &points {
            if a != b && rng.random_bool(edge_prob) {
                m.add_edge(a, b);
            }
        }
    }
    for &x in &points {
        for atom in atoms {
            if rng.random_bool(0.4) {
                m.add_prop(x, *atom);
            }
        }
    }
    m
}

/// Resamples [`model`] until the result is connected.
pub fn connected_model<R: Rng + ?Sized>(rng: &mut R, max_points: usize, atoms: &[&str]) -> QDModel {
    loop {
        let m = model(rng, max_points, atoms);
        if m.is_connected() {
            return m;
        }
    }
}

/// Splits random points of `m` into primed twins and rewires every stored
/// edge through a covering of the copies: each source copy keeps an
/// outgoing edge and each target copy an incoming one. Forgetting the
/// primes is then a bisimulation with converse, so the result always
/// shares the structure of `m` without being equal to it.
pub fn unfolding<R: Rng + ?Sized>(rng: &mut R, m: &QDModel) -> QDModel {
    let mut out = QDModel::new();
    let mut twins: Vec<Vec<Point>> = Vec::with_capacity(m.len());
    for x in m.points() {
        let count = if rng.random_bool(0.35) { 2 } else { 1 };
        let mut copies = Vec::with_capacity(count);
        for k in 0..count {
            let mut id = m.id(x).to_string();
            if k > 0 {
                id.push('\'');
                while out.point(&id).is_some() || m.point(&id).is_some() {
                    id.push('\'');
                }
            }
            let p = out.add_point(id).expect("twin ids are fresh");
            for prop in m.props(x) {
                out.add_prop(p, prop.clone());
            }
            copies.push(p);
        }
        twins.push(copies);
    }
    for (a, b) in m.edges() {
        let (from, to) = (&twins[a.ix()], &twins[b.ix()]);
        let mut covered = vec![false; to.len()];
        for &f in from {
            let k = rng.random_range(0..to.len());
            out.add_edge(f, to[k]);
            covered[k] = true;
        }
        for (k, done) in covered.into_iter().enumerate() {
            if !done {
                out.add_edge(from[rng.random_range(0..from.len())], to[k]);
            }
        }
        for &f in from {
            for &t in to {
                if rng.random_bool(0.25) {
                    out.add_edge(f, t);
                }
            }
        }
    }
    out
}

fn leaf<R: Rng + ?Sized>(rng: &mut R, atoms: &[&str], with_false: bool) -> Formula {
    if atoms.is_empty() || rng.random_bool(0.2) {
        if with_false && rng.random_bool(0.5) {
            Formula::False
        } else {
            Formula::True
        }
    } else {
        Formula::atom(atoms[rng.random_range(0..atoms.len())])
    }
}

/// A formula of nesting depth at most `depth` drawing on every operator.
pub fn formula<R: Rng + ?Sized>(rng: &mut R, depth: usize, atoms: &[&str]) -> Formula {
    if depth == 0 || rng.random_bool(0.25) {
        return leaf(rng, atoms, true);
    }
    let sub = |rng: &mut R| formula(rng, depth - 1, atoms);
    match rng.random_range(0..8) {
        0 => Formula::not(sub(rng)),
        1 => Formula::near(sub(rng)),
        2 => Formula::and(sub(rng), sub(rng)),
        3 => Formula::or(sub(rng), sub(rng)),
        4 => Formula::implies(sub(rng), sub(rng)),
        5 => Formula::reach(sub(rng), sub(rng)),
        6 => Formula::prop(sub(rng), sub(rng)),
        _ => Formula::surr(sub(rng), sub(rng)),
    }
}

/// Like [`formula`] but never produces `R`, nor `S` which unfolds into it.
pub fn reach_free_formula<R: Rng + ?Sized>(rng: &mut R, depth: usize, atoms: &[&str]) -> Formula {
    if depth == 0 || rng.random_bool(0.25) {
        return leaf(rng, atoms, true);
    }
    let sub = |rng: &mut R| reach_free_formula(rng, depth - 1, atoms);
    match rng.random_range(0..6) {
        0 => Formula::not(sub(rng)),
        1 => Formula::near(sub(rng)),
        2 => Formula::and(sub(rng), sub(rng)),
        3 => Formula::or(sub(rng), sub(rng)),
        4 => Formula::implies(sub(rng), sub(rng)),
        _ => Formula::prop(sub(rng), sub(rng)),
    }
}

/// A formula already in desugared shape: core operators only.
pub fn core_formula<R: Rng + ?Sized>(rng: &mut R, depth: usize, atoms: &[&str]) -> Formula {
    if depth == 0 || rng.random_bool(0.25) {
        return leaf(rng, atoms, false);
    }
    let sub = |rng: &mut R| core_formula(rng, depth - 1, atoms);
    match rng.random_range(0..5) {
        0 => Formula::not(sub(rng)),
        1 => Formula::near(sub(rng)),
        2 => Formula::and(sub(rng), sub(rng)),
        3 => Formula::reach(sub(rng), sub(rng)),
        _ => Formula::prop(sub(rng), sub(rng)),
    }
}
