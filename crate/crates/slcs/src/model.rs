//! Finite quasi-discrete closure models.
//!
//! A model is a finite set of named points, a stored edge relation, and a
//! valuation assigning a set of proposition names to each point. Self-loops
//! are never stored: the semantic edge relation `R` is the stored relation
//! plus the identity, so reflexivity is a structural constant rather than
//! data. The minimal neighbourhood of a point is `U(x) = {x} ∪ successors(x)`,
//! closure adds predecessors, and interior is its dual.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Handle to a point of a specific [`QDModel`].
///
/// Points are compared and ordered by their insertion position in the owning
/// model. A `Point` is only meaningful together with the model that produced
/// it; using it with a different model is not detected and gives unspecified
/// (but memory-safe) answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(u32);

impl Point {
    pub(crate) fn ix(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_ix(ix: usize) -> Point {
        Point(ix as u32)
    }
}

/// A subset of one model's points, ordered by insertion position.
pub type PointSet = BTreeSet<Point>;

/// Errors from model construction, JSON loading and quotienting.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("point id must be a non-empty string")]
    EmptyPointId,
    #[error("duplicate point id {0:?}")]
    DuplicatePoint(String),
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid model JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// T0/T1 separation flags of a model, see [`QDModel::separation_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparationReport {
    /// No two distinct points are related by stored edges in both directions.
    pub t0: bool,
    /// No stored edges at all; the space is discrete.
    pub t1: bool,
}

/// A finite quasi-discrete closure model.
///
/// Construction is incremental ([`add_point`](QDModel::add_point),
/// [`add_edge`](QDModel::add_edge), [`add_prop`](QDModel::add_prop)) or via
/// [`from_json`](QDModel::from_json); afterwards a model is used immutably.
/// All iteration orders follow point insertion order, so every operation is
/// deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QDModel {
    ids: Vec<String>,
    index: HashMap<String, u32>,
    succs: Vec<Vec<u32>>,
    preds: Vec<Vec<u32>>,
    props: Vec<BTreeSet<String>>,
}

/// Result of loading a model from JSON: the model itself plus warnings
/// emitted by normalization (currently only dropped self-loops).
#[derive(Debug)]
pub struct LoadedModel {
    pub model: QDModel,
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    points: Vec<String>,
    #[serde(default)]
    edges: Vec<(String, String)>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Serialize)]
struct ModelFileOut<'a> {
    points: &'a [String],
    edges: Vec<[&'a str; 2]>,
    valuation: BTreeMap<&'a str, Vec<&'a str>>,
}

impl QDModel {
    /// Creates an empty model.
    pub fn new() -> QDModel {
        QDModel::default()
    }

    /// Adds a point with the given id and returns its handle.
    pub fn add_point(&mut self, id: impl Into<String>) -> Result<Point, ModelError> {
        let id = id.into();
        if id.is_empty() {
            return Err(ModelError::EmptyPointId);
        }
        if self.index.contains_key(&id) {
            return Err(ModelError::DuplicatePoint(id));
        }
        let ix = self.ids.len() as u32;
        self.index.insert(id.clone(), ix);
        self.ids.push(id);
        self.succs.push(Vec::new());
        self.preds.push(Vec::new());
        self.props.push(BTreeSet::new());
        Ok(Point(ix))
    }

    /// Stores a directed edge. Returns `false` without storing anything if
    /// the edge is a self-loop (reflexivity is implicit) or already present.
    pub fn add_edge(&mut self, from: Point, to: Point) -> bool {
        self.check(from);
        self.check(to);
        if from == to {
            return false;
        }
        let fwd = &mut self.succs[from.ix()];
        match fwd.binary_search(&to.0) {
            Ok(_) => false,
            Err(pos) => {
                fwd.insert(pos, to.0);
                let back = &mut self.preds[to.ix()];
                let pos = back.binary_search(&from.0).unwrap_err();
                back.insert(pos, from.0);
                true
            }
        }
    }

    /// Adds a proposition to a point's valuation (idempotent).
    pub fn add_prop(&mut self, x: Point, prop: impl Into<String>) {
        self.check(x);
        self.props[x.ix()].insert(prop.into());
    }

    /// Looks up a point by id.
    pub fn point(&self, id: &str) -> Option<Point> {
        self.index.get(id).map(|&ix| Point(ix))
    }

    /// The id of a point.
    pub fn id(&self, x: Point) -> &str {
        self.check(x);
        &self.ids[x.ix()]
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Number of stored edges (self-loops are never stored).
    pub fn edge_count(&self) -> usize {
        self.succs.iter().map(Vec::len).sum()
    }

    /// All points in insertion order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.ids.len()).map(Point::from_ix)
    }

    /// All stored edges, ordered by source then target position.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.succs
            .iter()
            .enumerate()
            .flat_map(|(a, ts)| ts.iter().map(move |&b| (Point(a as u32), Point(b))))
    }

    /// The proposition set of a point.
    pub fn props(&self, x: Point) -> &BTreeSet<String> {
        self.check(x);
        &self.props[x.ix()]
    }

    /// Whether the stored edge `(from, to)` exists. Self-loops are semantic,
    /// not stored, so `has_edge(x, x)` is always `false`.
    pub fn has_edge(&self, from: Point, to: Point) -> bool {
        self.check(from);
        self.check(to);
        self.succs[from.ix()].binary_search(&to.0).is_ok()
    }

    /// Successors of a point under stored edges only.
    pub fn successors(&self, x: Point) -> impl Iterator<Item = Point> + '_ {
        self.check(x);
        self.succs[x.ix()].iter().map(|&ix| Point(ix))
    }

    /// Predecessors of a point under stored edges only.
    pub fn predecessors(&self, x: Point) -> impl Iterator<Item = Point> + '_ {
        self.check(x);
        self.preds[x.ix()].iter().map(|&ix| Point(ix))
    }

    /// The minimal neighbourhood `U(x) = {x} ∪ successors(x)`.
    pub fn min_nbhd(&self, x: Point) -> PointSet {
        self.check(x);
        let mut set: PointSet = self.successors(x).collect();
        set.insert(x);
        set
    }

    /// Closure of a set: `a` together with all its predecessors. Equivalently
    /// the points whose minimal neighbourhood meets `a`.
    pub fn closure(&self, a: &PointSet) -> PointSet {
        let mut out = a.clone();
        for &x in a {
            self.check(x);
            out.extend(self.predecessors(x));
        }
        out
    }

    /// Interior of a set: the points of `a` whose minimal neighbourhood is
    /// contained in `a`. Dual to [`closure`](QDModel::closure).
    pub fn interior(&self, a: &PointSet) -> PointSet {
        a.iter()
            .copied()
            .filter(|&x| {
                self.check(x);
                self.min_nbhd(x).is_subset(a)
            })
            .collect()
    }

    /// Whether `u` and `v` are semi-separated: neither set meets the closure
    /// of the other.
    pub fn semi_separated(&self, u: &PointSet, v: &PointSet) -> bool {
        self.closure(u).is_disjoint(v) && u.is_disjoint(&self.closure(v))
    }

    /// Whether the model is connected, i.e. admits no bipartition into two
    /// non-empty semi-separated sets. The empty model counts as connected.
    ///
    /// For a reflexive edge relation, semi-separation of a bipartition is
    /// exactly the absence of edges across it in either direction, so this
    /// reduces to reachability in the symmetrized graph. The reduction is
    /// validated against a brute-force bipartition search in the test suite.
    pub fn is_connected(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for &y in self.succs[x].iter().chain(&self.preds[x]) {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    reached += 1;
                    queue.push_back(y as usize);
                }
            }
        }
        reached == n
    }

    /// T0 and T1 separation. T0 holds when no two distinct points have stored
    /// edges in both directions; T1 holds when there are no stored edges at
    /// all. T1 implies T0, and the empty model satisfies both.
    pub fn separation_report(&self) -> SeparationReport {
        let t1 = self.edge_count() == 0;
        let t0 = self.edges().all(|(a, b)| !self.has_edge(b, a));
        SeparationReport { t0, t1 }
    }

    /// Whether the reflexive edge relation is transitive. Transitivity makes
    /// the closure operator idempotent, i.e. the space topological.
    pub fn is_topological(&self) -> bool {
        self.edges().all(|(a, b)| {
            self.successors(b)
                .all(|c| c == a || self.has_edge(a, c))
        })
    }

    /// Disjoint union of two models. Points are tagged with `L:`/`R:`
    /// prefixes to keep ids unique; edges and valuations carry over and no
    /// cross edges are introduced.
    pub fn disjoint_union(&self, other: &QDModel) -> QDModel {
        let mut out = QDModel::new();
        for (tag, m) in [("L:", self), ("R:", other)] {
            let base = out.len();
            for x in m.points() {
                out.add_point(format!("{tag}{}", m.id(x)))
                    .expect("tagged ids are unique");
            }
            for (a, b) in m.edges() {
                out.add_edge(Point::from_ix(base + a.ix()), Point::from_ix(base + b.ix()));
            }
            for x in m.points() {
                for p in m.props(x) {
                    out.add_prop(Point::from_ix(base + x.ix()), p.clone());
                }
            }
        }
        out
    }

    /// Quotient of the model by a partition whose blocks are uniform in their
    /// valuation. Each block becomes one point, named after the block member
    /// that comes first in insertion order; distinct blocks are connected
    /// exactly when some stored edge crosses between them.
    pub fn quotient(&self, part: &Partition) -> Result<QDModel, ModelError> {
        if part.n != self.len() {
            return Err(ModelError::InvalidPartition(format!(
                "partition covers {} points but the model has {}",
                part.n,
                self.len()
            )));
        }
        for block in part.blocks() {
            let first = self.props(block[0]);
            for &x in &block[1..] {
                if self.props(x) != first {
                    return Err(ModelError::InvalidPartition(format!(
                        "block of {:?} mixes valuations ({:?} vs {:?})",
                        self.id(block[0]),
                        first,
                        self.props(x)
                    )));
                }
            }
        }
        let mut out = QDModel::new();
        let mut reps = Vec::with_capacity(part.blocks().len());
        for block in part.blocks() {
            let rep = out
                .add_point(self.id(block[0]))
                .expect("block representatives are distinct");
            for p in self.props(block[0]) {
                out.add_prop(rep, p.clone());
            }
            reps.push(rep);
        }
        for (a, b) in self.edges() {
            let (ba, bb) = (part.block_of(a), part.block_of(b));
            if ba != bb {
                out.add_edge(reps[ba], reps[bb]);
            }
        }
        Ok(out)
    }

    /// Resolves a slice of ids into a [`PointSet`].
    pub fn point_set(&self, ids: &[&str]) -> Result<PointSet, ModelError> {
        ids.iter()
            .map(|id| {
                self.point(id)
                    .ok_or_else(|| ModelError::UnknownPoint(id.to_string()))
            })
            .collect()
    }

    /// The ids of a set's members, in insertion order.
    pub fn ids<'a>(&'a self, set: &PointSet) -> Vec<&'a str> {
        set.iter().map(|&x| self.id(x)).collect()
    }

    /// Parses the JSON model format. Self-loops in `edges` are dropped with a
    /// warning; unknown object keys, unknown points and duplicate ids are
    /// errors.
    pub fn from_json(text: &str) -> Result<LoadedModel, ModelError> {
        let file: ModelFile = serde_json::from_str(text)?;
        let mut model = QDModel::new();
        let mut warnings = Vec::new();
        for id in &file.points {
            model.add_point(id.clone())?;
        }
        for (from, to) in &file.edges {
            let a = model
                .point(from)
                .ok_or_else(|| ModelError::UnknownPoint(from.clone()))?;
            let b = model
                .point(to)
                .ok_or_else(|| ModelError::UnknownPoint(to.clone()))?;
            if a == b {
                warnings.push(format!("dropped self-loop on {from:?} (reflexivity is implicit)"));
            } else {
                model.add_edge(a, b);
            }
        }
        for (id, props) in &file.valuation {
            let x = model
                .point(id)
                .ok_or_else(|| ModelError::UnknownPoint(id.clone()))?;
            for p in props {
                model.add_prop(x, p.clone());
            }
        }
        Ok(LoadedModel { model, warnings })
    }

    /// Serializes to the JSON model format. Points keep insertion order,
    /// edges are sorted by endpoint positions, and points with an empty
    /// valuation are omitted from the `valuation` object.
    pub fn to_json(&self) -> String {
        let out = ModelFileOut {
            points: &self.ids,
            edges: self
                .edges()
                .map(|(a, b)| [self.id(a), self.id(b)])
                .collect(),
            valuation: self
                .points()
                .filter(|&x| !self.props(x).is_empty())
                .map(|x| (self.id(x), self.props(x).iter().map(String::as_str).collect()))
                .collect(),
        };
        serde_json::to_string_pretty(&out).expect("model serialization cannot fail")
    }

    #[track_caller]
    pub(crate) fn check(&self, x: Point) {
        assert!(x.ix() < self.len(), "point is not part of this model");
    }
}

/// A partition of a model's points into non-empty disjoint blocks.
///
/// Blocks are kept sorted internally: members by insertion position, blocks
/// by their first member. A `Partition` is tied to the model it was built
/// from only by point count, so callers must keep the pairing straight, just
/// as with [`Point`] handles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<Point>>,
    n: usize,
}

impl Partition {
    /// Builds a partition after checking that the blocks are non-empty,
    /// disjoint and cover all points of `m`.
    pub fn new(m: &QDModel, blocks: Vec<Vec<Point>>) -> Result<Partition, ModelError> {
        let mut seen = vec![false; m.len()];
        let mut covered = 0;
        let mut blocks: Vec<Vec<Point>> = blocks
            .into_iter()
            .map(|mut block| {
                block.sort_unstable();
                block
            })
            .collect();
        blocks.sort_unstable();
        for block in &blocks {
            if block.is_empty() {
                return Err(ModelError::InvalidPartition("empty block".into()));
            }
            for &x in block {
                if x.ix() >= m.len() {
                    return Err(ModelError::InvalidPartition(
                        "block member is not part of the model".into(),
                    ));
                }
                if seen[x.ix()] {
                    return Err(ModelError::InvalidPartition(format!(
                        "point {:?} appears in two blocks",
                        m.id(x)
                    )));
                }
                seen[x.ix()] = true;
                covered += 1;
            }
        }
        if covered != m.len() {
            return Err(ModelError::InvalidPartition(format!(
                "blocks cover {covered} of {} points",
                m.len()
            )));
        }
        Ok(Partition { blocks, n: m.len() })
    }

    /// The partition with one singleton block per point.
    pub fn identity(m: &QDModel) -> Partition {
        Partition {
            blocks: m.points().map(|x| vec![x]).collect(),
            n: m.len(),
        }
    }

    /// The blocks, each sorted by insertion position, listed in order of
    /// their first member.
    pub fn blocks(&self) -> &[Vec<Point>] {
        &self.blocks
    }

    /// Number of points covered.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Index of the block containing `x`.
    ///
    /// # Panics
    /// Panics if `x` is not covered, which cannot happen for a point of the
    /// model this partition was built from.
    pub fn block_of(&self, x: Point) -> usize {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&x).is_ok())
            .expect("partition covers all points")
    }
}

/// Whether two models are isomorphic: some bijection on points that exactly
/// preserves stored edges and valuations. Decided by backtracking search, so
/// only suitable for small models such as test fixtures and quotients.
pub fn isomorphic(a: &QDModel, b: &QDModel) -> bool {
    if a.len() != b.len() || a.edge_count() != b.edge_count() {
        return false;
    }
    let n = a.len();
    let mut to_b: Vec<Option<Point>> = vec![None; n];
    let mut used = vec![false; n];
    fn compatible(a: &QDModel, b: &QDModel, x: Point, y: Point, to_b: &[Option<Point>]) -> bool {
        if a.props(x) != b.props(y) {
            return false;
        }
        if a.successors(x).count() != b.successors(y).count()
            || a.predecessors(x).count() != b.predecessors(y).count()
        {
            return false;
        }
        // Edges between x and already-assigned points must match exactly.
        for (w, img) in to_b.iter().enumerate() {
            if let Some(img) = *img {
                let w = Point::from_ix(w);
                if a.has_edge(x, w) != b.has_edge(y, img) || a.has_edge(w, x) != b.has_edge(img, y)
                {
                    return false;
                }
            }
        }
        true
    }
    fn assign(
        a: &QDModel,
        b: &QDModel,
        next: usize,
        to_b: &mut Vec<Option<Point>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if next == a.len() {
            return true;
        }
        let x = Point::from_ix(next);
        for y in b.points() {
            if !used[y.ix()] && compatible(a, b, x, y, to_b) {
                to_b[next] = Some(y);
                used[y.ix()] = true;
                if assign(a, b, next + 1, to_b, used) {
                    return true;
                }
                to_b[next] = None;
                used[y.ix()] = false;
            }
        }
        false
    }
    assign(a, b, 0, &mut to_b, &mut used)
}
