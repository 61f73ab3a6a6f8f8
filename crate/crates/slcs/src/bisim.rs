//! Bisimulations between models: checking a given relation, computing the
//! coarsest one by partition refinement, lifting walks across a relation,
//! and a bounded verifier for the path-preserving conditions.
//!
//! Two flavours of step condition appear throughout. The modal conditions
//! match outgoing steps in both directions between related points; the
//! converse conditions additionally match incoming steps. A relation
//! satisfying the former preserves every formula without `R`, one
//! satisfying the latter preserves all of SLCS.

use std::collections::BTreeSet;

use serde::Deserialize;
use thiserror::Error;

use crate::checker::{for_each_walk, Walk};
use crate::model::{Partition, Point, PointSet, QDModel};

/// Which step conditions to check or refine against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Modal,
    Converse,
}

/// Inputs the relation operations reject.
#[derive(Debug, Error)]
pub enum BisimError {
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("model has {got} points, the exhaustive check allows at most {max}")]
    ModelTooLarge { got: usize, max: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// The first condition a candidate relation breaks, with the offending
/// pair and the step that found no counterpart.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("atomic harmony fails at ({left}, {right}): propositions differ")]
    Atomic { left: String, right: String },
    #[error("forth fails at ({left}, {right}): step to {witness} has no counterpart from {right}")]
    Forth { left: String, right: String, witness: String },
    #[error("back fails at ({left}, {right}): step to {witness} has no counterpart from {left}")]
    Back { left: String, right: String, witness: String },
    #[error("converse forth fails at ({left}, {right}): step from {witness} has no counterpart into {right}")]
    ConverseForth { left: String, right: String, witness: String },
    #[error("converse back fails at ({left}, {right}): step from {witness} has no counterpart into {left}")]
    ConverseBack { left: String, right: String, witness: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationFile {
    pairs: Vec<(String, String)>,
}

/// A relation between the points of two models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointRelation<'m> {
    left: &'m QDModel,
    right: &'m QDModel,
    pairs: BTreeSet<(Point, Point)>,
}

impl<'m> PointRelation<'m> {
    pub fn new(
        left: &'m QDModel,
        right: &'m QDModel,
        pairs: impl IntoIterator<Item = (Point, Point)>,
    ) -> PointRelation<'m> {
        let pairs: BTreeSet<(Point, Point)> = pairs.into_iter().collect();
        for &(a, b) in &pairs {
            left.check(a);
            right.check(b);
        }
        PointRelation { left, right, pairs }
    }

    pub fn from_ids(
        left: &'m QDModel,
        right: &'m QDModel,
        pairs: &[(&str, &str)],
    ) -> Result<PointRelation<'m>, BisimError> {
        let pairs = pairs
            .iter()
            .map(|&(a, b)| resolve_pair(left, right, a, b))
            .collect::<Result<BTreeSet<_>, BisimError>>()?;
        Ok(PointRelation { left, right, pairs })
    }

    /// Reads `{"pairs": [["x0", "y0"], ...]}`.
    pub fn from_json(
        left: &'m QDModel,
        right: &'m QDModel,
        text: &str,
    ) -> Result<PointRelation<'m>, BisimError> {
        let file: RelationFile = serde_json::from_str(text)?;
        let pairs = file
            .pairs
            .iter()
            .map(|(a, b)| resolve_pair(left, right, a, b))
            .collect::<Result<BTreeSet<_>, BisimError>>()?;
        Ok(PointRelation { left, right, pairs })
    }

    pub fn left(&self) -> &'m QDModel {
        self.left
    }

    pub fn right(&self) -> &'m QDModel {
        self.right
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn contains(&self, a: Point, b: Point) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The same relation read right-to-left.
    pub fn inverse(&self) -> PointRelation<'m> {
        PointRelation {
            left: self.right,
            right: self.left,
            pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }

    fn partners(&self, a: Point) -> impl Iterator<Item = Point> + '_ {
        self.pairs
            .iter()
            .filter(move |&&(l, _)| l == a)
            .map(|&(_, r)| r)
    }

    /// Checks atomic harmony and the forth/back conditions on outgoing
    /// steps for every pair, reporting the first failure.
    pub fn check_modal(&self) -> Result<(), Violation> {
        for &(a, b) in &self.pairs {
            if self.left.props(a) != self.right.props(b) {
                return Err(Violation::Atomic {
                    left: self.left.id(a).to_string(),
                    right: self.right.id(b).to_string(),
                });
            }
            let na = self.left.min_nbhd(a);
            let nb = self.right.min_nbhd(b);
            if let Some(&y1) = na.iter().find(|&&y1| !nb.iter().any(|&y2| self.contains(y1, y2))) {
                return Err(Violation::Forth {
                    left: self.left.id(a).to_string(),
                    right: self.right.id(b).to_string(),
                    witness: self.left.id(y1).to_string(),
                });
            }
            if let Some(&y2) = nb.iter().find(|&&y2| !na.iter().any(|&y1| self.contains(y1, y2))) {
                return Err(Violation::Back {
                    left: self.left.id(a).to_string(),
                    right: self.right.id(b).to_string(),
                    witness: self.right.id(y2).to_string(),
                });
            }
        }
        Ok(())
    }

    /// Checks the modal conditions plus forth/back on incoming steps.
    pub fn check_converse(&self) -> Result<(), Violation> {
        self.check_modal()?;
        for &(a, b) in &self.pairs {
            let ca = self.left.closure(&PointSet::from([a]));
            let cb = self.right.closure(&PointSet::from([b]));
            if let Some(&y1) = ca.iter().find(|&&y1| !cb.iter().any(|&y2| self.contains(y1, y2))) {
                return Err(Violation::ConverseForth {
                    left: self.left.id(a).to_string(),
                    right: self.right.id(b).to_string(),
                    witness: self.left.id(y1).to_string(),
                });
            }
            if let Some(&y2) = cb.iter().find(|&&y2| !ca.iter().any(|&y1| self.contains(y1, y2))) {
                return Err(Violation::ConverseBack {
                    left: self.left.id(a).to_string(),
                    right: self.right.id(b).to_string(),
                    witness: self.right.id(y2).to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn is_modal_bisimulation(&self) -> bool {
        self.check_modal().is_ok()
    }

    pub fn is_converse_bisimulation(&self) -> bool {
        self.check_converse().is_ok()
    }

    /// Checks the neighbourhood-bisimulation conditions by brute force,
    /// quantifying over every neighbourhood of each related point, that is,
    /// every superset of its minimal neighbourhood. Exponential; both
    /// models are capped at 6 points. Agrees with [`is_modal_bisimulation`]
    /// on every relation, and the test suites lean on that agreement.
    ///
    /// [`is_modal_bisimulation`]: PointRelation::is_modal_bisimulation
    pub fn is_nbhd_bisimulation_exhaustive(&self) -> Result<bool, BisimError> {
        const MAX: usize = 6;
        for m in [self.left, self.right] {
            if m.len() > MAX {
                return Err(BisimError::ModelTooLarge { got: m.len(), max: MAX });
            }
        }
        let (n1, n2) = (self.left.len(), self.right.len());
        let mask = |s: &PointSet| s.iter().fold(0u32, |acc, &x| acc | 1 << x.ix());
        let members = |set: u32, n: usize| (0..n).filter(move |i| set >> i & 1 == 1);
        let rel = |y1: usize, y2: usize| {
            self.pairs
                .contains(&(Point::from_ix(y1), Point::from_ix(y2)))
        };
        for &(a, b) in &self.pairs {
            if self.left.props(a) != self.right.props(b) {
                return Ok(false);
            }
            let min1 = mask(&self.left.min_nbhd(a));
            let min2 = mask(&self.right.min_nbhd(b));
            let forth = supersets(min2, n2).all(|set2| {
                supersets(min1, n1).any(|set1| {
                    members(set1, n1).all(|y1| members(set2, n2).any(|y2| rel(y1, y2)))
                })
            });
            let back = supersets(min1, n1).all(|set1| {
                supersets(min2, n2).any(|set2| {
                    members(set2, n2).all(|y2| members(set1, n1).any(|y1| rel(y1, y2)))
                })
            });
            if !forth || !back {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn resolve_pair(
    left: &QDModel,
    right: &QDModel,
    a: &str,
    b: &str,
) -> Result<(Point, Point), BisimError> {
    let pa = left
        .point(a)
        .ok_or_else(|| BisimError::UnknownPoint(a.to_string()))?;
    let pb = right
        .point(b)
        .ok_or_else(|| BisimError::UnknownPoint(b.to_string()))?;
    Ok((pa, pb))
}

fn supersets(min: u32, n: usize) -> impl Iterator<Item = u32> {
    (0..1u32 << n).filter(move |s| s & min == min)
}

/// Partition refinement. Points start in valuation classes and split until
/// the blocks hit by each point's outgoing steps (and incoming steps, for
/// the converse variant) are the same within every block. Block numbers
/// follow first occurrence in point order, so the result is deterministic.
fn refine(m: &QDModel, variant: Variant) -> Vec<usize> {
    fn number_by_first_occurrence<T: PartialEq>(keys: Vec<T>) -> Vec<usize> {
        let mut seen: Vec<&T> = Vec::new();
        keys.iter()
            .map(|key| match seen.iter().position(|&s| s == key) {
                Some(i) => i,
                None => {
                    seen.push(key);
                    seen.len() - 1
                }
            })
            .collect()
    }

    let mut block = number_by_first_occurrence(
        m.points().map(|x| m.props(x).clone()).collect::<Vec<_>>(),
    );
    loop {
        let sigs: Vec<(usize, BTreeSet<usize>, BTreeSet<usize>)> = m
            .points()
            .map(|x| {
                let fwd: BTreeSet<usize> =
                    m.min_nbhd(x).iter().map(|&y| block[y.ix()]).collect();
                let bwd: BTreeSet<usize> = match variant {
                    Variant::Modal => BTreeSet::new(),
                    Variant::Converse => {
                        let mut s: BTreeSet<usize> =
                            m.predecessors(x).map(|y| block[y.ix()]).collect();
                        s.insert(block[x.ix()]);
                        s
                    }
                };
                (block[x.ix()], fwd, bwd)
            })
            .collect();
        let next = number_by_first_occurrence(sigs);
        if next == block {
            return block;
        }
        block = next;
    }
}

fn blocks_of(m: &QDModel, block: &[usize]) -> Partition {
    let count = block.iter().copied().max().map_or(0, |b| b + 1);
    let mut blocks: Vec<Vec<Point>> = vec![Vec::new(); count];
    for x in m.points() {
        blocks[block[x.ix()]].push(x);
    }
    Partition::new(m, blocks).expect("refinement produces disjoint covering blocks")
}

/// The coarsest partition of a single model whose blocks respect the
/// variant's step conditions, starting from valuation classes.
pub fn coarsest_partition(m: &QDModel, variant: Variant) -> Partition {
    blocks_of(m, &refine(m, variant))
}

/// The coarsest bisimulation between two models, carried three ways: the
/// disjoint union the refinement ran on, its stable partition, and the
/// cross-model pairs sharing a block.
#[derive(Debug, Clone)]
pub struct Coarsest<'m> {
    pub union: QDModel,
    pub partition: Partition,
    pub relation: PointRelation<'m>,
}

/// Computes the coarsest bisimulation of the given variant. The returned
/// relation passes the matching check, and every relation of that variant
/// between the two models is a subset of it.
pub fn coarsest_bisimulation<'m>(
    m1: &'m QDModel,
    m2: &'m QDModel,
    variant: Variant,
) -> Coarsest<'m> {
    let union = m1.disjoint_union(m2);
    let block = refine(&union, variant);
    let partition = blocks_of(&union, &block);
    let n1 = m1.len();
    let mut pairs = Vec::new();
    for i in 0..n1 {
        for j in 0..m2.len() {
            if block[i] == block[n1 + j] {
                pairs.push((Point::from_ix(i), Point::from_ix(j)));
            }
        }
    }
    let relation = PointRelation::new(m1, m2, pairs);
    Coarsest { union, partition, relation }
}

/// Whether two points are related by the coarsest bisimulation of the
/// given variant.
///
/// ```
/// use slcs::{bisimilar, corpus, Variant};
///
/// let m1 = corpus::sec4_m1();
/// let m2 = corpus::sec4_m2();
/// let x = m1.point("x").unwrap();
/// let y2 = m2.point("y2").unwrap();
/// assert!(bisimilar(&m1, x, &m2, y2, Variant::Modal));
/// assert!(!bisimilar(&m1, x, &m2, y2, Variant::Converse));
/// ```
pub fn bisimilar(m1: &QDModel, x1: Point, m2: &QDModel, x2: Point, variant: Variant) -> bool {
    m1.check(x1);
    m2.check(x2);
    coarsest_bisimulation(m1, m2, variant)
        .relation
        .contains(x1, x2)
}

/// A walk and its image under a relation: equal length and pointwise
/// related, with the image a valid walk of the other model.
#[derive(Debug, Clone)]
pub struct LiftedPathMatch<'m> {
    source: Walk<'m>,
    lifted: Walk<'m>,
}

impl<'m> LiftedPathMatch<'m> {
    fn assemble(z: &PointRelation<'m>, source: Walk<'m>, lifted: Vec<Point>) -> LiftedPathMatch<'m> {
        debug_assert_eq!(source.points().len(), lifted.len());
        debug_assert!(source
            .points()
            .iter()
            .zip(&lifted)
            .all(|(&a, &b)| z.contains(a, b)));
        let lifted =
            Walk::new(z.right, lifted).expect("lift steps stay within minimal neighbourhoods");
        LiftedPathMatch { source, lifted }
    }

    pub fn source(&self) -> &Walk<'m> {
        &self.source
    }

    pub fn lifted(&self) -> &Walk<'m> {
        &self.lifted
    }
}

/// Why a walk could not be lifted. The relation's conditions are consulted
/// lazily, step by step, so a failure names the first step that lacks a
/// counterpart rather than pre-judging the whole relation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("start pair ({left}, {right}) is not in the relation")]
    UnrelatedStart { left: String, right: String },
    #[error("anchor index {index} is out of range for a walk of {len} points")]
    AnchorOutOfRange { index: usize, len: usize },
    #[error("not a bisimulation: the walk steps from {from} to {to}, but {at} has no related step")]
    NoForwardStep { from: String, to: String, at: String },
    #[error("not a converse bisimulation: the walk reaches {to} from {from}, but {at} has no related incoming step")]
    NoBackwardStep { from: String, to: String, at: String },
}

fn lift_forward_steps(
    z: &PointRelation<'_>,
    src: &[Point],
    start: Point,
) -> Result<Vec<Point>, LiftError> {
    if !z.contains(src[0], start) {
        return Err(LiftError::UnrelatedStart {
            left: z.left.id(src[0]).to_string(),
            right: z.right.id(start).to_string(),
        });
    }
    let mut lifted = vec![start];
    for k in 0..src.len() - 1 {
        let here = lifted[k];
        let target = src[k + 1];
        let next = z
            .right
            .min_nbhd(here)
            .into_iter()
            .filter(|&y| z.contains(target, y))
            .min_by_key(|&y| z.right.id(y));
        match next {
            Some(y) => lifted.push(y),
            None => {
                return Err(LiftError::NoForwardStep {
                    from: z.left.id(src[k]).to_string(),
                    to: z.left.id(target).to_string(),
                    at: z.right.id(here).to_string(),
                })
            }
        }
    }
    Ok(lifted)
}

fn lift_anchored_steps(
    z: &PointRelation<'_>,
    src: &[Point],
    n: usize,
    anchor: Point,
) -> Result<Vec<Point>, LiftError> {
    if n >= src.len() {
        return Err(LiftError::AnchorOutOfRange { index: n, len: src.len() });
    }
    let tail = lift_forward_steps(z, &src[n..], anchor)?;
    let mut head: Vec<Point> = Vec::with_capacity(n);
    let mut here = anchor;
    for k in (1..=n).rev() {
        let target = src[k - 1];
        let prev = z
            .right
            .closure(&PointSet::from([here]))
            .into_iter()
            .filter(|&y| z.contains(target, y))
            .min_by_key(|&y| z.right.id(y));
        match prev {
            Some(y) => {
                head.push(y);
                here = y;
            }
            None => {
                return Err(LiftError::NoBackwardStep {
                    from: z.left.id(target).to_string(),
                    to: z.left.id(src[k]).to_string(),
                    at: z.right.id(here).to_string(),
                })
            }
        }
    }
    head.reverse();
    head.extend(tail);
    Ok(head)
}

/// Builds the image of `source` under `z` starting at `start`: each step
/// is matched by a related outgoing step, the lowest point id winning ties.
pub fn lift_path_forward<'m>(
    z: &PointRelation<'m>,
    source: &Walk<'m>,
    start: Point,
) -> Result<LiftedPathMatch<'m>, LiftError> {
    z.right.check(start);
    let lifted = lift_forward_steps(z, source.points(), start)?;
    Ok(LiftedPathMatch::assemble(z, source.clone(), lifted))
}

/// Builds the image of `source` under `z` pinned to `anchor` at index `n`:
/// later indices are matched by outgoing steps as in [`lift_path_forward`],
/// earlier ones by related incoming steps, walking backwards from the
/// anchor. A reflexive self-step counts, so a stalling source step can
/// always be answered by stalling.
pub fn lift_path_anchored<'m>(
    z: &PointRelation<'m>,
    source: &Walk<'m>,
    n: usize,
    anchor: Point,
) -> Result<LiftedPathMatch<'m>, LiftError> {
    z.right.check(anchor);
    let lifted = lift_anchored_steps(z, source.points(), n, anchor)?;
    Ok(LiftedPathMatch::assemble(z, source.clone(), lifted))
}

/// A failed path-preserving check: either the relation was empty, which
/// the definition rules out, or one of its seven conditions broke.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PpbViolation {
    #[error("a path preserving bisimulation requires a non-empty relation")]
    EmptyRelation,
    #[error("condition {condition} fails: {detail}")]
    Condition { condition: u8, detail: String },
}

type WalkPair = (Vec<Point>, Vec<Point>);

/// Checks the seven path-preserving conditions with all path quantifiers
/// restricted to stalling walks of at most `max_len` points.
///
/// Condition 1 asks that the relation be a neighbourhood bisimulation,
/// checked through its minimal-neighbourhood reformulation. Conditions 2
/// and 3 demand forward and anchored lifts of every left walk; 5 and 6 are
/// their mirror images over the inverse relation. The walk relations that
/// conditions 4 and 7 quantify over are taken to be exactly the pairs the
/// lifts produce, index-preserving and pointwise related, and the interval
/// matching inside them is verified by existence search. Violations report
/// the lowest-numbered failing condition.
pub fn verify_path_preserving_on_walks(
    z: &PointRelation<'_>,
    max_len: usize,
) -> Result<(), PpbViolation> {
    if z.is_empty() {
        return Err(PpbViolation::EmptyRelation);
    }
    if let Err(v) = z.check_modal() {
        return Err(PpbViolation::Condition { condition: 1, detail: v.to_string() });
    }
    let inv = z.inverse();
    let walks_left = collect_walks(z.left, max_len);
    let walks_right = collect_walks(z.right, max_len);

    let mut z1 = BTreeSet::new();
    forward_lift_condition(z, &walks_left, 2, &mut z1)?;
    anchored_lift_condition(z, &walks_left, 3, &mut z1)?;
    interval_condition(z, &z1, 4)?;

    let mut z2 = BTreeSet::new();
    forward_lift_condition(&inv, &walks_right, 5, &mut z2)?;
    anchored_lift_condition(&inv, &walks_right, 6, &mut z2)?;
    interval_condition(&inv, &z2, 7)?;
    Ok(())
}

fn collect_walks(m: &QDModel, max_len: usize) -> Vec<Vec<Point>> {
    let mut out = Vec::new();
    for_each_walk(m, max_len, &mut |w| out.push(w.to_vec()));
    out
}

fn walk_label(m: &QDModel, w: &[Point]) -> String {
    w.iter().map(|&x| m.id(x)).collect::<Vec<_>>().join(",")
}

fn forward_lift_condition(
    z: &PointRelation<'_>,
    walks: &[Vec<Point>],
    condition: u8,
    seen: &mut BTreeSet<WalkPair>,
) -> Result<(), PpbViolation> {
    for &(x1, x2) in &z.pairs {
        for w in walks.iter().filter(|w| w[0] == x1 && w.len() > 1) {
            match lift_forward_steps(z, w, x2) {
                Ok(q) => {
                    seen.insert((w.clone(), q));
                }
                Err(e) => {
                    return Err(PpbViolation::Condition {
                        condition,
                        detail: format!(
                            "pair ({}, {}), walk [{}]: {e}",
                            z.left.id(x1),
                            z.right.id(x2),
                            walk_label(z.left, w)
                        ),
                    })
                }
            }
        }
    }
    Ok(())
}

fn anchored_lift_condition(
    z: &PointRelation<'_>,
    walks: &[Vec<Point>],
    condition: u8,
    seen: &mut BTreeSet<WalkPair>,
) -> Result<(), PpbViolation> {
    for w in walks {
        for n in 1..w.len() {
            for x2 in z.partners(w[n]) {
                match lift_anchored_steps(z, w, n, x2) {
                    Ok(q) => {
                        seen.insert((w.clone(), q));
                    }
                    Err(e) => {
                        return Err(PpbViolation::Condition {
                            condition,
                            detail: format!(
                                "pair ({}, {}), walk [{}] anchored at index {n}: {e}",
                                z.left.id(w[n]),
                                z.right.id(x2),
                                walk_label(z.left, w)
                            ),
                        })
                    }
                }
            }
        }
    }
    Ok(())
}

fn interval_condition(
    z: &PointRelation<'_>,
    entries: &BTreeSet<WalkPair>,
    condition: u8,
) -> Result<(), PpbViolation> {
    for (p, q) in entries {
        for n in 1..p.len() {
            for kq in 1..n {
                if !(1..n).any(|kp| z.contains(p[kp], q[kq])) {
                    return Err(PpbViolation::Condition {
                        condition,
                        detail: format!(
                            "no interior index of [{}] up to {n} relates to index {kq} of [{}]",
                            walk_label(z.left, p),
                            walk_label(z.right, q)
                        ),
                    });
                }
            }
        }
    }
    Ok(())
}
