//! Stepwise model selection over coloured-graph lattices.
//!
//! The search walks a lattice of colourings downward from the saturated
//! model. Each stage computes the rejection dual of the currently minimal
//! accepted models, drops candidates that lie below an already rejected
//! model, tests the remainder, and repeats until a stage accepts nothing.
//! Duals over the edge-regular class come from closed-form generators
//! combined with a fold recursion; the permutation-generated class on four
//! vertices is small enough to enumerate and scan directly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::classes::{all_subgroups, class_join, is_edge_regular, ModelClass};
use crate::gaussian::{fit_rcon, fit_to_json, GaussianData, GaussianError, RconFit};
use crate::graph::{complete_edges, ColouredGraph, Edge, GraphError, Label};
use crate::partition::SetPartition;

/// Errors from dual construction and search.
#[derive(Debug, Error)]
pub enum SearchError {
    /// Graph-side failure.
    #[error(transparent)]
    Graph(#[from] GraphError),
    /// Fitting-side failure other than a rejected candidate.
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    /// The request falls outside what the search supports.
    #[error("{0}")]
    Unsupported(String),
}

/// Which dual to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Minimal models lying below no member of the set.
    Accept,
    /// Maximal models lying above no member of the set.
    Reject,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Accept => write!(f, "accept"),
            Direction::Reject => write!(f, "reject"),
        }
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "a" | "A" | "accept" => Ok(Direction::Accept),
            "r" | "R" | "reject" => Ok(Direction::Reject),
            other => Err(format!("unknown direction {other:?}, expected a or r")),
        }
    }
}

/// Which extremes a [`ModelSet`] keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    /// Keep minimal members; a new model evicts everything above it.
    Minimal,
    /// Keep maximal members; a new model evicts everything below it.
    Maximal,
}

/// An antichain of coloured graphs over one vertex set, kept in canonical
/// order and reduced to extremes on every insertion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSet {
    reduction: Reduction,
    members: Vec<ColouredGraph>,
}

impl ModelSet {
    /// An empty set with the given reduction rule.
    pub fn new(reduction: Reduction) -> Self {
        Self {
            reduction,
            members: Vec::new(),
        }
    }

    /// Reduces a collection to its extreme members.
    pub fn from_models<I>(reduction: Reduction, models: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = ColouredGraph>,
    {
        let mut items: Vec<ColouredGraph> = models.into_iter().collect();
        // Feed likely extremes first so domination checks hit early. Small
        // edge sets and coarse partitions sit low in the order.
        items.sort_by_key(|g| {
            (
                g.edges().len(),
                g.vertex_classes().num_blocks(),
                g.edge_classes().num_blocks(),
            )
        });
        if reduction == Reduction::Maximal {
            items.reverse();
        }
        let mut set = Self::new(reduction);
        for g in items {
            set.insert(g)?;
        }
        Ok(set)
    }

    /// The reduction rule this set maintains.
    pub fn reduction(&self) -> Reduction {
        self.reduction
    }

    /// Members in canonical order.
    pub fn members(&self) -> &[ColouredGraph] {
        &self.members
    }

    /// Consumes the set, returning its members.
    pub fn into_members(self) -> Vec<ColouredGraph> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Exact membership.
    pub fn contains(&self, g: &ColouredGraph) -> bool {
        self.members.binary_search(g).is_ok()
    }

    /// Whether some member lies at or below `g`.
    pub fn any_leq(&self, g: &ColouredGraph) -> Result<bool, GraphError> {
        for m in &self.members {
            if m.leq(g)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Whether some member lies at or above `g`.
    pub fn any_geq(&self, g: &ColouredGraph) -> Result<bool, GraphError> {
        for m in &self.members {
            if g.leq(m)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Adds a model, evicting members it displaces under the reduction rule.
    /// Returns whether the model survived (false when a member already
    /// dominates it, including when it is already present).
    pub fn insert(&mut self, g: ColouredGraph) -> Result<bool, GraphError> {
        let dominated = match self.reduction {
            Reduction::Minimal => self.any_leq(&g)?,
            Reduction::Maximal => self.any_geq(&g)?,
        };
        if dominated {
            return Ok(false);
        }
        let mut displaced = Vec::with_capacity(self.members.len());
        for m in &self.members {
            displaced.push(match self.reduction {
                Reduction::Minimal => g.leq(m)?,
                Reduction::Maximal => m.leq(&g)?,
            });
        }
        let mut flags = displaced.into_iter();
        self.members.retain(|_| !flags.next().unwrap());
        let pos = self
            .members
            .binary_search(&g)
            .expect_err("dominated check covers exact duplicates");
        self.members.insert(pos, g);
        Ok(true)
    }
}

fn part<E: Ord + Clone>(ground: Vec<E>, blocks: Vec<Vec<E>>) -> Result<SetPartition<E>, GraphError> {
    SetPartition::new(ground, blocks).map_err(|e| GraphError::Invalid(e.to_string()))
}

fn atomic_blocks<E: Clone>(items: &[E]) -> Vec<Vec<E>> {
    items.iter().map(|e| vec![e.clone()]).collect()
}

fn require_edge_regular(g: &ColouredGraph) -> Result<(), SearchError> {
    if is_edge_regular(g) {
        Ok(())
    } else {
        Err(SearchError::Unsupported(
            "the dual generators need an edge-regular colouring".into(),
        ))
    }
}

/// The acceptance dual of a single edge-regular colouring: the minimal
/// colourings that are not below it. Two families cover everything. The
/// first puts one bipartition on the vertices, no edges, where the two
/// blocks fail to coarsen the vertex classes. The second keeps one vertex
/// class and places a single edge class that is not a union of the
/// colouring's edge classes.
pub fn dual_accept_b(g: &ColouredGraph) -> Result<ModelSet, SearchError> {
    require_edge_regular(g)?;
    let labels = g.labels().to_vec();
    let n = labels.len();
    let mut out: BTreeSet<ColouredGraph> = BTreeSet::new();

    let vblocks = g.vertex_classes().blocks();
    for mask in 0u32..(1u32 << (n - 1)) {
        let mut b1 = vec![0usize];
        let mut b2 = Vec::new();
        for v in 1..n {
            if mask >> (v - 1) & 1 == 1 {
                b1.push(v);
            } else {
                b2.push(v);
            }
        }
        if b2.is_empty() {
            continue;
        }
        let coarsens = vblocks.iter().all(|blk| {
            blk.iter().all(|v| b1.contains(v)) || blk.iter().all(|v| b2.contains(v))
        });
        if coarsens {
            continue;
        }
        let vp = part((0..n).collect(), vec![b1, b2])?;
        let ep = part(Vec::new(), Vec::new())?;
        out.insert(ColouredGraph::from_index_parts(labels.clone(), vp, ep)?);
    }

    let complete = complete_edges(n);
    if complete.len() > 20 {
        return Err(SearchError::Unsupported(
            "too many vertex pairs for the single-class family".into(),
        ));
    }
    let eset: BTreeSet<Edge> = g.edges().iter().copied().collect();
    let eblocks = g.edge_classes().blocks();
    for mask in 1u64..(1u64 << complete.len()) {
        let ea: BTreeSet<Edge> = complete
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| *e)
            .collect();
        let is_union = ea.iter().all(|e| eset.contains(e))
            && eblocks.iter().all(|blk| {
                let hit = blk.iter().filter(|e| ea.contains(e)).count();
                hit == 0 || hit == blk.len()
            });
        if is_union {
            continue;
        }
        let edges: Vec<Edge> = ea.into_iter().collect();
        let vp = part((0..n).collect(), vec![(0..n).collect()])?;
        let ep = part(edges.clone(), vec![edges])?;
        out.insert(ColouredGraph::from_index_parts(labels.clone(), vp, ep)?);
    }

    Ok(ModelSet::from_models(Reduction::Minimal, out)?)
}

/// The rejection dual of a single edge-regular colouring: the maximal
/// colourings that are not above it. Three families cover everything. The
/// first merges one pair of differently coloured vertices and keeps the
/// complete atomic edge set. The second deletes one present edge from the
/// complete atomic colouring. The third merges two disjoint same-coloured
/// vertex pairs (one may be a singleton) together with the crossing edge
/// pair, discarding results that still sit above the colouring.
pub fn dual_reject_b(g: &ColouredGraph) -> Result<ModelSet, SearchError> {
    require_edge_regular(g)?;
    let labels = g.labels().to_vec();
    let n = labels.len();
    let complete = complete_edges(n);
    let vc = g.vertex_classes();
    let mut out: BTreeSet<ColouredGraph> = BTreeSet::new();

    for a in 0..n {
        for b in (a + 1)..n {
            if vc.same_block(&a, &b) {
                continue;
            }
            let mut vblocks = vec![vec![a, b]];
            vblocks.extend((0..n).filter(|v| *v != a && *v != b).map(|v| vec![v]));
            let vp = part((0..n).collect(), vblocks)?;
            let ep = part(complete.clone(), atomic_blocks(&complete))?;
            out.insert(ColouredGraph::from_index_parts(labels.clone(), vp, ep)?);
        }
    }

    for e in g.edges() {
        let rest: Vec<Edge> = complete.iter().copied().filter(|x| x != e).collect();
        let vp = part((0..n).collect(), atomic_blocks(&(0..n).collect::<Vec<_>>()))?;
        let ep = part(rest.clone(), atomic_blocks(&rest))?;
        out.insert(ColouredGraph::from_index_parts(labels.clone(), vp, ep)?);
    }

    for a in 0..n {
        for b in a..n {
            if !vc.same_block(&a, &b) {
                continue;
            }
            for c in 0..n {
                for d in 0..n {
                    if !vc.same_block(&c, &d) {
                        continue;
                    }
                    if a == b && c == d {
                        continue;
                    }
                    if c == a || c == b || d == a || d == b {
                        continue;
                    }
                    let e1 = (a.min(c), a.max(c));
                    let e2 = (b.min(d), b.max(d));
                    if e1 == e2 {
                        continue;
                    }
                    let mut vblocks = Vec::new();
                    let pair_ab: Vec<usize> = if a == b { vec![a] } else { vec![a, b] };
                    let pair_cd: Vec<usize> = if c == d {
                        vec![c]
                    } else {
                        vec![c.min(d), c.max(d)]
                    };
                    let used: BTreeSet<usize> = pair_ab.iter().chain(&pair_cd).copied().collect();
                    vblocks.push(pair_ab);
                    vblocks.push(pair_cd);
                    vblocks.extend((0..n).filter(|v| !used.contains(v)).map(|v| vec![v]));
                    let vp = part((0..n).collect(), vblocks)?;
                    let mut merged = vec![e1, e2];
                    merged.sort_unstable();
                    let mut eblocks = vec![merged];
                    eblocks.extend(
                        complete
                            .iter()
                            .filter(|x| **x != e1 && **x != e2)
                            .map(|x| vec![*x]),
                    );
                    let ep = part(complete.clone(), eblocks)?;
                    let r = ColouredGraph::from_index_parts(labels.clone(), vp, ep)?;
                    if g.leq(&r)? {
                        continue;
                    }
                    out.insert(r);
                }
            }
        }
    }

    Ok(ModelSet::from_models(Reduction::Maximal, out)?)
}

/// The dual of a model set. Over `B` the singleton duals combine through a
/// fold: the rejection dual of a union is the maximal set of pairwise meets,
/// the acceptance dual the minimal set of pairwise joins taken in the class.
/// Over `Pi` the four-vertex lattice is enumerated and scanned. Other
/// classes are not supported.
pub fn dual_set(
    class: ModelClass,
    s: &ModelSet,
    direction: Direction,
) -> Result<ModelSet, SearchError> {
    let first = s.members().first().ok_or_else(|| {
        SearchError::Unsupported("the dual of an empty model set is not represented".into())
    })?;
    match class {
        ModelClass::B => {
            let single = |g: &ColouredGraph| match direction {
                Direction::Accept => dual_accept_b(g),
                Direction::Reject => dual_reject_b(g),
            };
            let mut acc = single(first)?;
            for t in &s.members()[1..] {
                let dt = single(t)?;
                let mut combined: BTreeSet<ColouredGraph> = BTreeSet::new();
                for a in acc.members() {
                    for b in dt.members() {
                        let c = match direction {
                            Direction::Reject => a.meet(b)?,
                            Direction::Accept => class_join(ModelClass::B, a, b)?,
                        };
                        combined.insert(c);
                    }
                }
                let reduction = match direction {
                    Direction::Accept => Reduction::Minimal,
                    Direction::Reject => Reduction::Maximal,
                };
                acc = ModelSet::from_models(reduction, combined)?;
            }
            Ok(acc)
        }
        ModelClass::Pi => {
            let lattice = enumerate_pi_lattice(first.labels())?;
            brute_force_duals(&lattice, s, direction)
        }
        _ => Err(SearchError::Unsupported(
            "duals are available for classes B and Pi".into(),
        )),
    }
}

/// Dual computation by direct scan of an explicit lattice. Used as the
/// oracle for the generator-based duals and as the backend for the
/// permutation-generated class.
pub fn brute_force_duals(
    lattice: &[ColouredGraph],
    s: &ModelSet,
    direction: Direction,
) -> Result<ModelSet, SearchError> {
    let mut survivors: Vec<ColouredGraph> = Vec::new();
    'outer: for m in lattice {
        for x in s.members() {
            let excluded = match direction {
                Direction::Reject => x.leq(m)?,
                Direction::Accept => m.leq(x)?,
            };
            if excluded {
                continue 'outer;
            }
        }
        survivors.push(m.clone());
    }
    let reduction = match direction {
        Direction::Accept => Reduction::Minimal,
        Direction::Reject => Reduction::Maximal,
    };
    Ok(ModelSet::from_models(reduction, survivors)?)
}

/// Enumerates the lattice of permutation-generated colourings on exactly
/// four vertices: every subgroup of the symmetric group contributes its
/// orbit colouring of the complete graph, closed under deletion of whole
/// edge classes, with duplicates removed.
pub fn enumerate_pi_lattice(labels: &[Label]) -> Result<Vec<ColouredGraph>, SearchError> {
    let mut sorted = labels.to_vec();
    sorted.sort();
    let n = sorted.len();
    if n != 4 {
        return Err(SearchError::Unsupported(
            "the permutation lattice enumeration supports exactly four vertices".into(),
        ));
    }
    let complete = complete_edges(n);
    let mut seen: BTreeSet<ColouredGraph> = BTreeSet::new();
    for grp in all_subgroups(n)? {
        let vp = grp.vertex_orbits();
        let eorb = grp.edge_orbits(&complete)?;
        let classes = eorb.blocks();
        for mask in 0u32..(1u32 << classes.len()) {
            let kept: Vec<Vec<Edge>> = classes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, blk)| blk.clone())
                .collect();
            let mut ground: Vec<Edge> = kept.iter().flatten().copied().collect();
            ground.sort_unstable();
            let ep = part(ground, kept)?;
            seen.insert(ColouredGraph::from_index_parts(
                sorted.clone(),
                vp.clone(),
                ep,
            )?);
        }
    }
    Ok(seen.into_iter().collect())
}

/// The test a search applies to each candidate model.
#[derive(Clone, Debug)]
pub enum SearchTest {
    /// Likelihood ratio test against the saturated model: accept when the
    /// deviance tail probability exceeds `alpha`.
    Lrt {
        /// Rejection threshold, strictly between zero and one.
        alpha: f64,
    },
    /// Accept exactly the models containing the target. An oracle whose
    /// search must end at the target alone.
    Membership {
        /// The model every accepted candidate must contain.
        target: ColouredGraph,
    },
    /// Accept everything; the search descends to the bottom model.
    AcceptAll,
}

/// Why a rejected candidate carries a flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectFlag {
    /// The likelihood is unbounded over the model; no estimate exists.
    NonexistentMle,
    /// The fit hit its iteration cap.
    NotConverged,
    /// A numerical failure stopped the fit.
    Numerical(String),
}

impl fmt::Display for RejectFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectFlag::NonexistentMle => write!(f, "no maximum likelihood estimate"),
            RejectFlag::NotConverged => write!(f, "fit did not converge"),
            RejectFlag::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

/// Outcome of testing one candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TestOutcome {
    Accepted,
    Rejected {
        /// Present when the rejection came from a failed fit rather than
        /// the test itself.
        flag: Option<RejectFlag>,
    },
}

impl TestOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, TestOutcome::Accepted)
    }
}

/// One tested candidate with its outcome and fit, when a fit was run.
#[derive(Clone, Debug)]
pub struct CandidateRecord {
    pub graph: ColouredGraph,
    pub outcome: TestOutcome,
    pub fit: Option<RconFit>,
}

/// All candidates of one stage, in canonical graph order.
#[derive(Clone, Debug, Default)]
pub struct StageRecord {
    pub candidates: Vec<CandidateRecord>,
}

impl StageRecord {
    /// Number of models tested in this stage.
    pub fn tested(&self) -> usize {
        self.candidates.len()
    }

    /// Number of models accepted in this stage.
    pub fn accepted(&self) -> usize {
        self.candidates
            .iter()
            .filter(|c| c.outcome.is_accepted())
            .count()
    }
}

/// Full record of a search run.
#[derive(Clone, Debug)]
pub struct SearchTrace {
    /// The lattice the search ran over.
    pub class: ModelClass,
    /// The initialisation stage; by default the saturated model alone.
    pub initial: StageRecord,
    /// The dual-driven stages, in order.
    pub stages: Vec<StageRecord>,
    /// Minimally accepted models at termination, with fits where available.
    pub final_accepted: Vec<CandidateRecord>,
    /// Total models fitted, the initialisation included.
    pub models_fitted: usize,
    /// Rejections flagged for a nonexistent maximum likelihood estimate.
    pub nonexistent_mle: usize,
}

impl SearchTrace {
    fn records(&self) -> impl Iterator<Item = &CandidateRecord> {
        self.initial
            .candidates
            .iter()
            .chain(self.stages.iter().flat_map(|s| s.candidates.iter()))
    }

    /// The minimally accepted models in canonical order.
    pub fn minimal_accepted(&self) -> Vec<&ColouredGraph> {
        self.final_accepted.iter().map(|r| &r.graph).collect()
    }

    /// Tested and accepted counts per dual-driven stage.
    pub fn stage_summary(&self) -> Vec<(usize, usize)> {
        self.stages
            .iter()
            .map(|s| (s.tested(), s.accepted()))
            .collect()
    }

    /// Checks that no accepted model lies below a rejected one, across every
    /// stage of the trace.
    pub fn audit_coherence(&self) -> Result<(), String> {
        let mut accepted: Vec<&ColouredGraph> = Vec::new();
        let mut rejected: Vec<&ColouredGraph> = Vec::new();
        for r in self.records() {
            match r.outcome {
                TestOutcome::Accepted => accepted.push(&r.graph),
                TestOutcome::Rejected { .. } => rejected.push(&r.graph),
            }
        }
        for a in &accepted {
            for r in &rejected {
                match a.leq(r) {
                    Ok(true) => {
                        return Err(format!(
                            "accepted model {} lies below rejected model {}",
                            a.to_json_value(),
                            r.to_json_value()
                        ));
                    }
                    Ok(false) => {}
                    Err(e) => return Err(format!("audit comparison failed: {e}")),
                }
            }
        }
        Ok(())
    }

    /// Renders the trace as JSON with stable keys.
    pub fn to_json_value(&self) -> Value {
        json!({
            "class": self.class.to_string(),
            "initial": stage_json(&self.initial),
            "stages": self.stages.iter().map(stage_json).collect::<Vec<_>>(),
            "final_accepted": self
                .final_accepted
                .iter()
                .map(record_json)
                .collect::<Vec<_>>(),
            "models_fitted": self.models_fitted,
            "nonexistent_mle": self.nonexistent_mle,
        })
    }
}

fn record_json(r: &CandidateRecord) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("graph".into(), r.graph.to_json_value());
    match &r.outcome {
        TestOutcome::Accepted => {
            obj.insert("outcome".into(), json!("accepted"));
        }
        TestOutcome::Rejected { flag } => {
            obj.insert("outcome".into(), json!("rejected"));
            if let Some(f) = flag {
                obj.insert("flag".into(), json!(f.to_string()));
            }
        }
    }
    if let Some(fit) = &r.fit {
        obj.insert("fit".into(), fit_to_json(fit));
    }
    Value::Object(obj)
}

fn stage_json(stage: &StageRecord) -> Value {
    json!({
        "tested": stage.tested(),
        "accepted": stage.accepted(),
        "candidates": stage.candidates.iter().map(record_json).collect::<Vec<_>>(),
    })
}

fn run_test(
    g: &ColouredGraph,
    test: &SearchTest,
    data: Option<&GaussianData>,
) -> Result<(TestOutcome, Option<RconFit>), SearchError> {
    match test {
        SearchTest::Lrt { alpha } => {
            let data = data.expect("validated before the search starts");
            match fit_rcon(g, data) {
                Ok(fit) => {
                    let outcome = if fit.p_value > *alpha {
                        TestOutcome::Accepted
                    } else {
                        TestOutcome::Rejected { flag: None }
                    };
                    Ok((outcome, Some(fit)))
                }
                Err(GaussianError::NonexistentMle(_)) => Ok((
                    TestOutcome::Rejected {
                        flag: Some(RejectFlag::NonexistentMle),
                    },
                    None,
                )),
                Err(GaussianError::NotConverged(_)) => Ok((
                    TestOutcome::Rejected {
                        flag: Some(RejectFlag::NotConverged),
                    },
                    None,
                )),
                Err(GaussianError::Numerical(m)) => Ok((
                    TestOutcome::Rejected {
                        flag: Some(RejectFlag::Numerical(m)),
                    },
                    None,
                )),
                Err(e) => Err(e.into()),
            }
        }
        SearchTest::Membership { target } => {
            let outcome = if target.leq(g)? {
                TestOutcome::Accepted
            } else {
                TestOutcome::Rejected { flag: None }
            };
            Ok((outcome, None))
        }
        SearchTest::AcceptAll => Ok((TestOutcome::Accepted, None)),
    }
}

/// Runs the stepwise selection over the `B` or `Pi` lattice on the given
/// vertex labels.
///
/// The saturated model initialises the accepted set. Each stage takes the
/// rejection dual of the minimal accepted models, removes candidates below
/// an already rejected model, and tests the rest in parallel; set updates
/// wait for the whole stage. Candidates whose fit fails are rejected and
/// flagged rather than aborting the search. The search stops when a stage
/// accepts nothing or no candidates remain.
///
/// `data` is required for the likelihood ratio test and ignored otherwise.
/// `seed`, when given, shuffles the candidate order within every stage; the
/// result is invariant to it because updates are stage-synchronous.
pub fn eh_search(
    class: ModelClass,
    labels: &[Label],
    test: &SearchTest,
    data: Option<&GaussianData>,
    seed: Option<u64>,
) -> Result<SearchTrace, SearchError> {
    match class {
        ModelClass::B | ModelClass::Pi => {}
        _ => {
            return Err(SearchError::Unsupported(
                "the search runs over the B and Pi lattices".into(),
            ));
        }
    }
    if let SearchTest::Lrt { alpha } = test {
        if data.is_none() {
            return Err(SearchError::Unsupported(
                "the likelihood ratio test needs data".into(),
            ));
        }
        if !(*alpha > 0.0 && *alpha < 1.0) {
            return Err(SearchError::Unsupported(
                "alpha must lie strictly between zero and one".into(),
            ));
        }
    }
    let unit = ColouredGraph::unit(labels.to_vec())?;
    let pi_lattice = match class {
        ModelClass::Pi => Some(enumerate_pi_lattice(unit.labels())?),
        _ => None,
    };

    let (outcome0, fit0) = run_test(&unit, test, data)?;
    let mut models_fitted = usize::from(fit0.is_some());
    let mut nonexistent_mle = 0usize;
    if matches!(
        outcome0,
        TestOutcome::Rejected {
            flag: Some(RejectFlag::NonexistentMle)
        }
    ) {
        nonexistent_mle += 1;
    }
    let mut accepted = ModelSet::new(Reduction::Minimal);
    let mut rejected = ModelSet::new(Reduction::Maximal);
    let mut tested: BTreeMap<ColouredGraph, (TestOutcome, Option<RconFit>)> = BTreeMap::new();
    tested.insert(unit.clone(), (outcome0.clone(), fit0.clone()));
    if outcome0.is_accepted() {
        accepted.insert(unit.clone())?;
    } else {
        rejected.insert(unit.clone())?;
    }
    let initial = StageRecord {
        candidates: vec![CandidateRecord {
            graph: unit,
            outcome: outcome0,
            fit: fit0,
        }],
    };

    let mut stages: Vec<StageRecord> = Vec::new();
    while !accepted.is_empty() {
        let dual = match class {
            ModelClass::B => dual_set(ModelClass::B, &accepted, Direction::Reject)?,
            ModelClass::Pi => brute_force_duals(
                pi_lattice.as_ref().expect("enumerated above"),
                &accepted,
                Direction::Reject,
            )?,
            _ => unreachable!(),
        };
        let mut candidates: Vec<ColouredGraph> = Vec::new();
        for m in dual.members() {
            if rejected.any_geq(m)? {
                continue;
            }
            debug_assert!(
                !tested.contains_key(m),
                "a dual candidate was already tested"
            );
            if tested.contains_key(m) {
                continue;
            }
            candidates.push(m.clone());
        }
        if candidates.is_empty() {
            break;
        }
        if let Some(s) = seed {
            let mut rng = ChaCha8Rng::seed_from_u64(s.wrapping_add(stages.len() as u64));
            candidates.shuffle(&mut rng);
        }
        type FitResult = Result<(TestOutcome, Option<RconFit>), SearchError>;
        let results: Vec<(ColouredGraph, FitResult)> = candidates
                .into_par_iter()
                .map(|g| {
                    let res = run_test(&g, test, data);
                    (g, res)
                })
                .collect();
        let mut records: Vec<CandidateRecord> = Vec::with_capacity(results.len());
        for (graph, res) in results {
            let (outcome, fit) = res?;
            models_fitted += usize::from(fit.is_some());
            if matches!(
                outcome,
                TestOutcome::Rejected {
                    flag: Some(RejectFlag::NonexistentMle)
                }
            ) {
                models_fitted += 1;
                nonexistent_mle += 1;
            } else if matches!(
                outcome,
                TestOutcome::Rejected {
                    flag: Some(RejectFlag::NotConverged) | Some(RejectFlag::Numerical(_))
                }
            ) {
                models_fitted += 1;
            }
            records.push(CandidateRecord { graph, outcome, fit });
        }
        records.sort_by(|a, b| a.graph.cmp(&b.graph));
        let mut any_accepted = false;
        for r in &records {
            tested.insert(r.graph.clone(), (r.outcome.clone(), r.fit.clone()));
            match r.outcome {
                TestOutcome::Accepted => {
                    accepted.insert(r.graph.clone())?;
                    any_accepted = true;
                }
                TestOutcome::Rejected { .. } => {
                    rejected.insert(r.graph.clone())?;
                }
            }
        }
        stages.push(StageRecord { candidates: records });
        if !any_accepted {
            break;
        }
        if stages.len() > 10_000 {
            return Err(SearchError::Unsupported(
                "the search exceeded ten thousand stages".into(),
            ));
        }
    }

    let final_accepted: Vec<CandidateRecord> = accepted
        .members()
        .iter()
        .map(|g| {
            let (outcome, fit) = tested
                .get(g)
                .cloned()
                .expect("accepted models were all tested");
            CandidateRecord {
                graph: g.clone(),
                outcome,
                fit,
            }
        })
        .collect();

    Ok(SearchTrace {
        class,
        initial,
        stages,
        final_accepted,
        models_fitted,
        nonexistent_mle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::is_permutation_generated;
    use crate::graph::enumerate_coloured_graphs;
    use crate::graph::test_fixtures::cg;
    use rand::Rng;

    fn int_labels(n: i64) -> Vec<Label> {
        (1..=n).map(Label::Int).collect()
    }

    fn b_lattice(n: i64) -> Vec<ColouredGraph> {
        enumerate_coloured_graphs(&int_labels(n), false)
            .unwrap()
            .filter(is_edge_regular)
            .collect()
    }

    fn singleton(g: &ColouredGraph) -> ModelSet {
        ModelSet::from_models(Reduction::Minimal, [g.clone()]).unwrap()
    }

    /// A five-edge cycle colouring with one long diagonal, used as the
    /// running dual example.
    fn pinwheel() -> ColouredGraph {
        cg(
            4,
            &[&[1, 3], &[2, 4]],
            &[&[(1, 2), (1, 4)], &[(2, 3), (3, 4)]],
        )
    }

    #[test]
    fn model_set_reduces_to_extremes() {
        let zero = ColouredGraph::zero(int_labels(4)).unwrap();
        let unit = ColouredGraph::unit(int_labels(4)).unwrap();
        let mid = pinwheel();

        let mut min_set = ModelSet::new(Reduction::Minimal);
        assert!(min_set.insert(unit.clone()).unwrap());
        assert!(min_set.insert(mid.clone()).unwrap());
        assert_eq!(min_set.members(), std::slice::from_ref(&mid));
        assert!(min_set.insert(zero.clone()).unwrap());
        assert_eq!(min_set.members(), std::slice::from_ref(&zero));
        assert!(!min_set.insert(mid.clone()).unwrap());

        let mut max_set = ModelSet::new(Reduction::Maximal);
        assert!(max_set.insert(zero.clone()).unwrap());
        assert!(max_set.insert(mid.clone()).unwrap());
        assert!(max_set.insert(unit.clone()).unwrap());
        assert_eq!(max_set.members(), std::slice::from_ref(&unit));

        assert!(max_set.contains(&unit));
        assert!(!max_set.contains(&mid));
        assert!(max_set.any_geq(&mid).unwrap());
        assert!(max_set.any_leq(&unit).unwrap());
        assert!(!max_set.any_leq(&mid).unwrap());
    }

    #[test]
    fn from_models_matches_incremental_insertion() {
        let lattice = b_lattice(3);
        let sample: Vec<ColouredGraph> = lattice.iter().step_by(3).cloned().collect();
        let bulk = ModelSet::from_models(Reduction::Minimal, sample.clone()).unwrap();
        let mut inc = ModelSet::new(Reduction::Minimal);
        for g in sample {
            inc.insert(g).unwrap();
        }
        assert_eq!(bulk, inc);
    }

    #[test]
    fn acceptance_duals_contain_the_worked_examples() {
        let dual = dual_accept_b(&pinwheel()).unwrap();
        let bipartition = cg(4, &[&[1, 4], &[2, 3]], &[]);
        let one_class = cg(4, &[&[1, 2, 3, 4]], &[&[(1, 2), (1, 3), (1, 4), (2, 3)]]);
        assert!(dual.contains(&bipartition));
        assert!(dual.contains(&one_class));
    }

    #[test]
    fn rejection_duals_contain_the_worked_examples() {
        let dual = dual_reject_b(&pinwheel()).unwrap();
        let merged = cg(
            4,
            &[&[1, 4], &[2], &[3]],
            &[
                &[(1, 2)],
                &[(1, 3)],
                &[(1, 4)],
                &[(2, 3)],
                &[(2, 4)],
                &[(3, 4)],
            ],
        );
        let deleted = cg(
            4,
            &[&[1], &[2], &[3], &[4]],
            &[&[(1, 2)], &[(1, 3)], &[(1, 4)], &[(2, 3)], &[(2, 4)]],
        );
        let paired = cg(
            4,
            &[&[1, 3], &[2], &[4]],
            &[
                &[(1, 2), (2, 3)],
                &[(1, 3)],
                &[(1, 4)],
                &[(2, 4)],
                &[(3, 4)],
            ],
        );
        assert!(dual.contains(&merged));
        assert!(dual.contains(&deleted));
        assert!(dual.contains(&paired));
    }

    #[test]
    fn saturated_rejection_dual_counts_pairs_and_edges() {
        let unit = ColouredGraph::unit(int_labels(5)).unwrap();
        let dual = dual_reject_b(&unit).unwrap();
        assert_eq!(dual.len(), 20);
        assert!(dual.members().iter().all(is_edge_regular));
    }

    #[test]
    fn bottom_duals_are_degenerate() {
        let zero = ColouredGraph::zero(int_labels(4)).unwrap();
        assert!(dual_reject_b(&zero).unwrap().is_empty());

        let atoms = dual_accept_b(&zero).unwrap();
        assert_eq!(atoms.len(), 70);
        let lattice = b_lattice(4);
        let oracle = brute_force_duals(&lattice, &singleton(&zero), Direction::Accept).unwrap();
        assert_eq!(atoms, oracle);
    }

    #[test]
    fn singleton_duals_match_brute_force_on_three_vertices() {
        let lattice = b_lattice(3);
        for g in &lattice {
            let s = singleton(g);
            let accept = dual_accept_b(g).unwrap();
            let reject = dual_reject_b(g).unwrap();
            assert_eq!(
                accept,
                brute_force_duals(&lattice, &s, Direction::Accept).unwrap(),
                "acceptance dual mismatch at {}",
                g.to_json_value()
            );
            assert_eq!(
                reject,
                brute_force_duals(&lattice, &s, Direction::Reject).unwrap(),
                "rejection dual mismatch at {}",
                g.to_json_value()
            );
        }
    }

    #[test]
    fn singleton_duals_match_brute_force_on_four_vertices() {
        let lattice = b_lattice(4);
        for g in lattice.iter().step_by(lattice.len() / 6) {
            let s = singleton(g);
            let accept = dual_accept_b(g).unwrap();
            let reject = dual_reject_b(g).unwrap();
            assert_eq!(
                accept,
                brute_force_duals(&lattice, &s, Direction::Accept).unwrap(),
                "acceptance dual mismatch at {}",
                g.to_json_value()
            );
            assert_eq!(
                reject,
                brute_force_duals(&lattice, &s, Direction::Reject).unwrap(),
                "rejection dual mismatch at {}",
                g.to_json_value()
            );
        }
    }

    #[test]
    fn pair_duals_match_brute_force() {
        let lattice = b_lattice(3);
        let picks: Vec<(usize, usize)> = vec![(0, 7), (3, 11), (5, 20), (9, 33), (14, 40)];
        for (i, j) in picks {
            let s = ModelSet::from_models(
                Reduction::Minimal,
                [lattice[i].clone(), lattice[j % lattice.len()].clone()],
            )
            .unwrap();
            let s_max = ModelSet::from_models(Reduction::Maximal, s.members().to_vec()).unwrap();
            let accept = dual_set(ModelClass::B, &s, Direction::Accept).unwrap();
            let reject = dual_set(ModelClass::B, &s_max, Direction::Reject).unwrap();
            assert_eq!(
                accept,
                brute_force_duals(&lattice, &s, Direction::Accept).unwrap()
            );
            assert_eq!(
                reject,
                brute_force_duals(&lattice, &s_max, Direction::Reject).unwrap()
            );
        }
    }

    #[test]
    fn pi_lattice_has_the_expected_shape() {
        let lattice = enumerate_pi_lattice(&int_labels(4)).unwrap();
        assert_eq!(lattice.len(), 251);
        let complete = lattice.iter().filter(|g| g.edges().len() == 6).count();
        assert_eq!(complete, 22);
        for g in &lattice {
            assert!(is_permutation_generated(g).unwrap());
        }
        let unit = ColouredGraph::unit(int_labels(4)).unwrap();
        let zero = ColouredGraph::zero(int_labels(4)).unwrap();
        assert!(lattice.binary_search(&unit).is_ok());
        assert!(lattice.binary_search(&zero).is_ok());
        assert!(enumerate_pi_lattice(&int_labels(5)).is_err());
    }

    #[test]
    fn pi_saturated_rejection_dual_has_fifteen_members() {
        let lattice = enumerate_pi_lattice(&int_labels(4)).unwrap();
        let unit = ColouredGraph::unit(int_labels(4)).unwrap();
        let dual = brute_force_duals(&lattice, &singleton(&unit), Direction::Reject).unwrap();
        assert_eq!(dual.len(), 15);
    }

    #[test]
    fn membership_search_recovers_the_target_over_b() {
        let lattice = b_lattice(4);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let target = lattice[rng.gen_range(0..lattice.len())].clone();
            let test = SearchTest::Membership {
                target: target.clone(),
            };
            let trace = eh_search(ModelClass::B, &int_labels(4), &test, None, None).unwrap();
            assert_eq!(
                trace.minimal_accepted(),
                vec![&target],
                "search missed {}",
                target.to_json_value()
            );
            trace.audit_coherence().unwrap();
        }
    }

    #[test]
    fn membership_search_recovers_the_target_over_pi() {
        let lattice = enumerate_pi_lattice(&int_labels(4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..6 {
            let target = lattice[rng.gen_range(0..lattice.len())].clone();
            let test = SearchTest::Membership {
                target: target.clone(),
            };
            let trace = eh_search(ModelClass::Pi, &int_labels(4), &test, None, None).unwrap();
            assert_eq!(trace.minimal_accepted(), vec![&target]);
            trace.audit_coherence().unwrap();
        }
    }

    #[test]
    fn accept_all_search_descends_to_the_bottom() {
        let zero = ColouredGraph::zero(int_labels(4)).unwrap();
        for class in [ModelClass::B, ModelClass::Pi] {
            let trace =
                eh_search(class, &int_labels(4), &SearchTest::AcceptAll, None, None).unwrap();
            assert_eq!(trace.minimal_accepted(), vec![&zero]);
            assert_eq!(trace.models_fitted, 0);
            trace.audit_coherence().unwrap();
        }
    }

    #[test]
    fn stage_order_does_not_change_the_result() {
        let target = pinwheel();
        let test = SearchTest::Membership {
            target: target.clone(),
        };
        let baseline = eh_search(ModelClass::B, &int_labels(4), &test, None, None).unwrap();
        for seed in [7u64, 991u64] {
            let shuffled =
                eh_search(ModelClass::B, &int_labels(4), &test, None, Some(seed)).unwrap();
            assert_eq!(shuffled.minimal_accepted(), baseline.minimal_accepted());
            assert_eq!(shuffled.stage_summary(), baseline.stage_summary());
        }
    }

    #[test]
    fn trace_json_reports_every_stage() {
        let test = SearchTest::Membership { target: pinwheel() };
        let trace = eh_search(ModelClass::B, &int_labels(4), &test, None, None).unwrap();
        let value = trace.to_json_value();
        assert_eq!(value["class"], json!("B"));
        assert_eq!(
            value["stages"].as_array().unwrap().len(),
            trace.stages.len()
        );
        assert_eq!(value["initial"]["tested"], json!(1));
    }

    #[test]
    fn searches_reject_unsupported_classes() {
        let err = eh_search(
            ModelClass::R,
            &int_labels(4),
            &SearchTest::AcceptAll,
            None,
            None,
        );
        assert!(err.is_err());
        let err = eh_search(
            ModelClass::B,
            &int_labels(4),
            &SearchTest::Lrt { alpha: 0.05 },
            None,
            None,
        );
        assert!(err.is_err());
    }
}
