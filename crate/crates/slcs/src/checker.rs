//! Satisfaction of SLCS formulas on finite models.
//!
//! Two evaluators that must agree. [`sat_set`] labels points bottom-up,
//! computing the reachability modalities as least fixpoints. [`oracle_sat_set`]
//! instead enumerates every stalling walk up to a length bound and applies
//! the path quantifiers one walk at a time. The oracle is exponentially
//! slower but has no clever parts, which makes it the reference: with a
//! bound of at least the point count, a satisfying walk never needs to
//! revisit a point except to stall, so the two results coincide.

use thiserror::Error;

use crate::logic::Formula;
use crate::model::{Point, PointSet, QDModel};

/// A finite walk: a non-empty point sequence whose consecutive pairs are
/// steps of the model (a stored edge or a reflexive self-step). It stands
/// for the infinite path that follows the sequence and then stalls on the
/// final point forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk<'m> {
    model: &'m QDModel,
    seq: Vec<Point>,
}

/// Rejected walk constructions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("a walk needs at least one point")]
    Empty,
    #[error("no step from {from:?} to {to:?}")]
    NotAStep { from: String, to: String },
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
}

impl<'m> Walk<'m> {
    /// Validates that `seq` is non-empty and that every consecutive pair is
    /// a step in `model`.
    pub fn new(model: &'m QDModel, seq: Vec<Point>) -> Result<Walk<'m>, WalkError> {
        if seq.is_empty() {
            return Err(WalkError::Empty);
        }
        for &x in &seq {
            model.check(x);
        }
        for pair in seq.windows(2) {
            if pair[0] != pair[1] && !model.has_edge(pair[0], pair[1]) {
                return Err(WalkError::NotAStep {
                    from: model.id(pair[0]).to_string(),
                    to: model.id(pair[1]).to_string(),
                });
            }
        }
        Ok(Walk { model, seq })
    }

    /// Like [`Walk::new`] but resolving point ids first.
    pub fn from_ids(model: &'m QDModel, ids: &[&str]) -> Result<Walk<'m>, WalkError> {
        let seq = ids
            .iter()
            .map(|id| {
                model
                    .point(id)
                    .ok_or_else(|| WalkError::UnknownPoint(id.to_string()))
            })
            .collect::<Result<Vec<Point>, WalkError>>()?;
        Walk::new(model, seq)
    }

    pub fn model(&self) -> &'m QDModel {
        self.model
    }

    pub fn points(&self) -> &[Point] {
        &self.seq
    }

    pub fn ids(&self) -> Vec<&'m str> {
        self.seq.iter().map(|&x| self.model.id(x)).collect()
    }
}

/// Rejected checker queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("walk bound must be at least 1")]
    InvalidBound,
}

/// The set of points satisfying `f`, via fixpoint labelling.
///
/// Derived operators are desugared first. `Near φ` holds where the minimal
/// neighbourhood meets the φ-points. `φ R ψ` is the least set containing
/// the ψ-points and closed under following edges forward into φ-points, so
/// a ψ-point alone satisfies it with no φ required. `φ P ψ` is the mirror
/// image over incoming edges. Atoms missing from the valuation are false
/// everywhere rather than an error.
///
/// ```
/// use slcs::{corpus, parse, sat_set};
///
/// let m = corpus::fig1_m1();
/// let near = parse("N p1").unwrap();
/// assert_eq!(m.ids(&sat_set(&m, &near)), ["x0", "x1"]);
/// ```
pub fn sat_set(m: &QDModel, f: &Formula) -> PointSet {
    let v = eval(m, &f.desugar());
    m.points().filter(|x| v[x.ix()]).collect()
}

/// Whether `x` satisfies `f`, as a membership test against [`sat_set`].
pub fn models(m: &QDModel, x: Point, f: &Formula) -> bool {
    m.check(x);
    sat_set(m, f).contains(&x)
}

fn eval(m: &QDModel, f: &Formula) -> Vec<bool> {
    match f {
        Formula::Atom(p) => m.points().map(|x| m.props(x).contains(p)).collect(),
        Formula::True => vec![true; m.len()],
        Formula::Not(g) => eval(m, g).into_iter().map(|b| !b).collect(),
        Formula::And(a, b) => {
            let vb = eval(m, b);
            let mut va = eval(m, a);
            for (a, &b) in va.iter_mut().zip(&vb) {
                *a = *a && b;
            }
            va
        }
        Formula::Near(g) => {
            let v = eval(m, g);
            m.points()
                .map(|x| m.min_nbhd(x).iter().any(|&y| v[y.ix()]))
                .collect()
        }
        Formula::Reach(a, b) => {
            let va = eval(m, a);
            let mut sat = eval(m, b);
            let mut work: Vec<Point> = m.points().filter(|x| sat[x.ix()]).collect();
            while let Some(w) = work.pop() {
                for x in m.successors(w) {
                    if va[x.ix()] && !sat[x.ix()] {
                        sat[x.ix()] = true;
                        work.push(x);
                    }
                }
            }
            sat
        }
        Formula::Prop(a, b) => {
            let va = eval(m, a);
            let mut sat = eval(m, b);
            let mut work: Vec<Point> = m.points().filter(|x| sat[x.ix()]).collect();
            while let Some(w) = work.pop() {
                for x in m.predecessors(w) {
                    if va[x.ix()] && !sat[x.ix()] {
                        sat[x.ix()] = true;
                        work.push(x);
                    }
                }
            }
            sat
        }
        Formula::False | Formula::Or(..) | Formula::Implies(..) | Formula::Surr(..) => {
            unreachable!("desugared formulas contain core kinds only")
        }
    }
}

/// Reference evaluator. Enumerates all walks of at most `bound` points and
/// applies the path quantifiers to each walk in turn, reading the walk as
/// its stalling infinite extension: `φ R ψ` marks position n of any walk
/// that starts in a ψ-point and passes through φ-points at positions 1..=n,
/// and `φ P ψ` marks the start of any walk that reaches a ψ-point at
/// position n through φ-points at positions 0..n. Equals [`sat_set`]
/// whenever `bound >= m.len()`.
pub fn oracle_sat_set(m: &QDModel, f: &Formula, bound: usize) -> Result<PointSet, CheckError> {
    if bound == 0 {
        return Err(CheckError::InvalidBound);
    }
    let v = oracle_eval(m, &f.desugar(), bound);
    Ok(m.points().filter(|x| v[x.ix()]).collect())
}

fn oracle_eval(m: &QDModel, f: &Formula, bound: usize) -> Vec<bool> {
    match f {
        Formula::Atom(p) => m.points().map(|x| m.props(x).contains(p)).collect(),
        Formula::True => vec![true; m.len()],
        Formula::Not(g) => oracle_eval(m, g, bound).into_iter().map(|b| !b).collect(),
        Formula::And(a, b) => {
            let vb = oracle_eval(m, b, bound);
            let mut va = oracle_eval(m, a, bound);
            for (a, &b) in va.iter_mut().zip(&vb) {
                *a = *a && b;
            }
            va
        }
        Formula::Near(g) => {
            let v = oracle_eval(m, g, bound);
            let inner: PointSet = m.points().filter(|x| v[x.ix()]).collect();
            let closed = m.closure(&inner);
            m.points().map(|x| closed.contains(&x)).collect()
        }
        Formula::Reach(a, b) => {
            let va = oracle_eval(m, a, bound);
            let vb = oracle_eval(m, b, bound);
            let mut sat = vec![false; m.len()];
            for_each_walk(m, bound, &mut |w| {
                if !vb[w[0].ix()] {
                    return;
                }
                for n in 0..w.len() {
                    if (1..=n).all(|i| va[w[i].ix()]) {
                        sat[w[n].ix()] = true;
                    }
                }
            });
            sat
        }
        Formula::Prop(a, b) => {
            let va = oracle_eval(m, a, bound);
            let vb = oracle_eval(m, b, bound);
            let mut sat = vec![false; m.len()];
            for_each_walk(m, bound, &mut |w| {
                for n in 0..w.len() {
                    if vb[w[n].ix()] && (0..n).all(|i| va[w[i].ix()]) {
                        sat[w[0].ix()] = true;
                    }
                }
            });
            sat
        }
        Formula::False | Formula::Or(..) | Formula::Implies(..) | Formula::Surr(..) => {
            unreachable!("desugared formulas contain core kinds only")
        }
    }
}

/// Calls `visit` on every walk of 1 to `max_points` points, in point order
/// at each branching. Self-steps are taken like any other step, so prefixes
/// and stalling repetitions are all visited.
pub(crate) fn for_each_walk(m: &QDModel, max_points: usize, visit: &mut impl FnMut(&[Point])) {
    fn go(m: &QDModel, walk: &mut Vec<Point>, max: usize, visit: &mut impl FnMut(&[Point])) {
        visit(walk);
        if walk.len() == max {
            return;
        }
        let last = *walk.last().unwrap();
        for next in m.min_nbhd(last) {
            walk.push(next);
            go(m, walk, max, visit);
            walk.pop();
        }
    }
    let mut walk = Vec::with_capacity(max_points);
    for x in m.points() {
        walk.push(x);
        go(m, &mut walk, max_points, visit);
        walk.pop();
    }
}
