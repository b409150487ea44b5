//! Vertex- and edge-coloured graphs and their model-inclusion lattice.
//!
//! A [`ColouredGraph`] is an undirected labelled graph together with a
//! partition 𝒱 of its vertices and a partition ℰ of its edges. Each such
//! colouring encodes one Gaussian concentration model: concentrations are
//! equal within colour classes. Colourings of a fixed vertex set are ordered
//! by model inclusion: `g ⪯ h` iff the edge set of `g` is contained in that
//! of `h`, the vertex colouring of `h` refines that of `g`, and every edge
//! class of `g` is a union of edge classes of `h`. Under this order the
//! colourings form a complete non-distributive lattice whose meet and join
//! are built from the partition lattice.

use crate::partition::{all_partitions, SetPartition};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

/// A vertex label: an integer or a piece of text.
///
/// Integers order before text; integers order numerically and text
/// lexicographically. This total order fixes the canonical vertex order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    /// Numeric label, e.g. `1`.
    Int(i64),
    /// Textual label, e.g. `"B1"`.
    Text(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Text(s) => write!(f, "{s}"),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Label::Int(a), Label::Int(b)) => a.cmp(b),
            (Label::Text(a), Label::Text(b)) => a.cmp(b),
            (Label::Int(_), Label::Text(_)) => Ordering::Less,
            (Label::Text(_), Label::Int(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Label {
    fn from(i: i64) -> Self {
        Label::Int(i)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Text(s.to_string())
    }
}

/// Integer labels `1..=n`, the default vertex set for size-driven commands.
pub fn int_labels(n: usize) -> Vec<Label> {
    (1..=n as i64).map(Label::Int).collect()
}

/// An edge as a pair of vertex indices `(i, j)` with `i < j` in canonical
/// vertex order.
pub type Edge = (usize, usize);

/// All pairs over `n` vertices in ascending order.
pub fn complete_edges(n: usize) -> Vec<Edge> {
    let mut out = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j));
        }
    }
    out
}

/// Errors raised by coloured-graph operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    /// Two graphs were combined but have different vertex label lists.
    #[error("graphs have different vertex sets")]
    VertexSetMismatch,
    /// A constructor was given data that does not form a coloured graph.
    #[error("invalid coloured graph: {0}")]
    Invalid(String),
    /// A file or string could not be parsed as a coloured graph.
    #[error("parse error: {0}")]
    Parse(String),
    /// A combinatorial size guard was exceeded.
    #[error("size guard exceeded: {0}")]
    Guard(String),
}

/// Identifies one colour class of a graph, in canonical class order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ClassId {
    /// The i-th vertex class.
    Vertex(usize),
    /// The i-th edge class.
    EdgeClass(usize),
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassId::Vertex(i) => write!(f, "v{i}"),
            ClassId::EdgeClass(i) => write!(f, "e{i}"),
        }
    }
}

/// An indicator matrix T^u for one colour class: for a vertex class, a 0/1
/// diagonal marking the members; for an edge class, a symmetric 0/1 matrix
/// with ones exactly at the member pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorMatrix {
    /// Which class this matrix indicates.
    pub class: ClassId,
    /// The |V|×|V| symmetric 0/1 matrix.
    pub matrix: DMatrix<f64>,
}

/// A vertex- and edge-coloured graph in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColouredGraph {
    labels: Vec<Label>,
    edges: Vec<Edge>,
    vertex_classes: SetPartition<usize>,
    edge_classes: SetPartition<Edge>,
    // Derived lookups, kept consistent by construction.
    vblock: Vec<usize>,
    eblock: Vec<usize>,
}

impl fmt::Debug for ColouredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColouredGraph{{V=")?;
        write!(f, "{:?}", self.vertex_classes_by_label())?;
        write!(f, ", E={:?}}}", self.edge_classes_by_label())
    }
}

impl ColouredGraph {
    /// Builds a coloured graph from label-level data. The edge set is the
    /// union of the edge classes. Everything is canonicalized; invalid input
    /// (duplicate labels, self-loops, non-partitions) is rejected.
    pub fn new(
        labels: Vec<Label>,
        vertex_classes: Vec<Vec<Label>>,
        edge_classes: Vec<Vec<(Label, Label)>>,
    ) -> Result<Self, GraphError> {
        let mut sorted = labels;
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::Invalid("duplicate vertex label".into()));
        }
        let index_of = |l: &Label| -> Result<usize, GraphError> {
            sorted
                .binary_search(l)
                .map_err(|_| GraphError::Invalid(format!("unknown vertex label {l}")))
        };
        let mut vblocks = Vec::new();
        for block in vertex_classes {
            let mut idx = Vec::new();
            for l in block {
                idx.push(index_of(&l)?);
            }
            vblocks.push(idx);
        }
        let vp = SetPartition::new((0..sorted.len()).collect(), vblocks)
            .map_err(|e| GraphError::Invalid(format!("vertex classes: {e}")))?;
        let mut eblocks = Vec::new();
        let mut edges = Vec::new();
        for block in edge_classes {
            let mut idx = Vec::new();
            for (a, b) in block {
                let (ia, ib) = (index_of(&a)?, index_of(&b)?);
                if ia == ib {
                    return Err(GraphError::Invalid(format!("self-loop at {a}")));
                }
                let e = (ia.min(ib), ia.max(ib));
                idx.push(e);
                edges.push(e);
            }
            eblocks.push(idx);
        }
        edges.sort();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::Invalid("duplicate edge".into()));
        }
        let ep = SetPartition::new(edges.clone(), eblocks)
            .map_err(|e| GraphError::Invalid(format!("edge classes: {e}")))?;
        Ok(Self::from_parts(sorted, vp, ep))
    }

    /// Assembles a graph from index-level partitions. `vertex_classes` must
    /// partition `0..labels.len()` and `edge_classes` a set of index pairs.
    pub fn from_index_parts(
        labels: Vec<Label>,
        vertex_classes: SetPartition<usize>,
        edge_classes: SetPartition<Edge>,
    ) -> Result<Self, GraphError> {
        let mut sorted = labels;
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::Invalid("duplicate vertex label".into()));
        }
        let n = sorted.len();
        if vertex_classes.ground() != (0..n).collect::<Vec<_>>() {
            return Err(GraphError::Invalid(
                "vertex classes do not partition the vertex indices".into(),
            ));
        }
        if edge_classes
            .ground()
            .iter()
            .any(|&(i, j)| i >= j || j >= n)
        {
            return Err(GraphError::Invalid("edge outside the vertex set".into()));
        }
        Ok(Self::from_parts(sorted, vertex_classes, edge_classes))
    }

    fn from_parts(
        labels: Vec<Label>,
        vertex_classes: SetPartition<usize>,
        edge_classes: SetPartition<Edge>,
    ) -> Self {
        let edges = edge_classes.ground().to_vec();
        let mut vblock = vec![0; labels.len()];
        for (i, b) in vertex_classes.blocks().iter().enumerate() {
            for &v in b {
                vblock[v] = i;
            }
        }
        let mut eblock = vec![0; edges.len()];
        for (i, b) in edge_classes.blocks().iter().enumerate() {
            for e in b {
                let pos = edges.binary_search(e).expect("class member is an edge");
                eblock[pos] = i;
            }
        }
        ColouredGraph {
            labels,
            edges,
            vertex_classes,
            edge_classes,
            vblock,
            eblock,
        }
    }

    /// The empty graph with a single vertex class: the lattice zero.
    pub fn zero(labels: Vec<Label>) -> Result<Self, GraphError> {
        let all = labels.clone();
        Self::new(labels, vec![all], Vec::new())
    }

    /// The complete graph with all classes atomic: the lattice unit.
    pub fn unit(labels: Vec<Label>) -> Result<Self, GraphError> {
        let mut sorted = labels;
        sorted.sort();
        let vp = SetPartition::atoms((0..sorted.len()).collect());
        let ep = SetPartition::atoms(complete_edges(sorted.len()));
        Self::from_index_parts(sorted, vp, ep)
    }

    /// Vertex labels in canonical order.
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Number of vertices.
    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    /// Edges as ascending index pairs, sorted.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// The vertex colouring 𝒱 over vertex indices.
    pub fn vertex_classes(&self) -> &SetPartition<usize> {
        &self.vertex_classes
    }

    /// The edge colouring ℰ over index pairs.
    pub fn edge_classes(&self) -> &SetPartition<Edge> {
        &self.edge_classes
    }

    /// Index of the vertex class containing vertex `v`.
    pub fn vertex_class_of(&self, v: usize) -> usize {
        self.vblock[v]
    }

    /// Index of the edge class containing `e`, if `e` is an edge.
    pub fn edge_class_of(&self, e: Edge) -> Option<usize> {
        self.edges.binary_search(&e).ok().map(|p| self.eblock[p])
    }

    /// Whether `(i, j)` is an edge (in either order).
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let e = (i.min(j), i.max(j));
        self.edges.binary_search(&e).is_ok()
    }

    /// Vertex classes spelled with labels.
    pub fn vertex_classes_by_label(&self) -> Vec<Vec<Label>> {
        self.vertex_classes
            .blocks()
            .iter()
            .map(|b| b.iter().map(|&v| self.labels[v].clone()).collect())
            .collect()
    }

    /// Edge classes spelled with label pairs.
    pub fn edge_classes_by_label(&self) -> Vec<Vec<(Label, Label)>> {
        self.edge_classes
            .blocks()
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&(i, j)| (self.labels[i].clone(), self.labels[j].clone()))
                    .collect()
            })
            .collect()
    }

    /// Adjacency lists over vertex indices.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.labels.len()];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    fn check_labels(&self, other: &Self) -> Result<(), GraphError> {
        if self.labels == other.labels {
            Ok(())
        } else {
            Err(GraphError::VertexSetMismatch)
        }
    }

    /// Model-inclusion order `self ⪯ other`: edge containment, `other`'s
    /// vertex colouring finer, and every edge class of `self` a union of
    /// edge classes of `other`.
    pub fn leq(&self, other: &Self) -> Result<bool, GraphError> {
        self.check_labels(other)?;
        // (i) E_g ⊆ E_h.
        if !subset_sorted(&self.edges, &other.edges) {
            return Ok(false);
        }
        // (ii) 𝒱_h finer than 𝒱_g: each h-block inside one g-block.
        for block in other.vertex_classes.blocks() {
            let target = self.vblock[block[0]];
            if block.iter().any(|&v| self.vblock[v] != target) {
                return Ok(false);
            }
        }
        // (iii) each g edge class is a union of h edge classes.
        let h_sizes: Vec<usize> = other
            .edge_classes
            .blocks()
            .iter()
            .map(|b| b.len())
            .collect();
        for block in self.edge_classes.blocks() {
            let mut touched: Vec<usize> = Vec::with_capacity(block.len());
            for e in block {
                match other.edges.binary_search(e) {
                    Ok(pos) => touched.push(other.eblock[pos]),
                    Err(_) => return Ok(false),
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let covered: usize = touched.iter().map(|&c| h_sizes[c]).sum();
            if covered != block.len() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Lattice meet `self ∧ other`: the vertex colourings are joined; the
    /// edge part keeps the largest common edge subset closed under both
    /// colourings and joins the restricted colourings there.
    pub fn meet(&self, other: &Self) -> Result<Self, GraphError> {
        self.check_labels(other)?;
        let vp = self
            .vertex_classes
            .join(&other.vertex_classes)
            .expect("same ground");
        // F starts at E_g ∩ E_h and shrinks: any class with a member outside
        // the current F is removed entirely, until both colourings restrict
        // to partitions of F. Classes are visited in canonical order for
        // reproducible traces; the fixpoint itself is unique.
        let mut f: Vec<Edge> = intersect_sorted(&self.edges, &other.edges);
        loop {
            let mut changed = false;
            for part in [&self.edge_classes, &other.edge_classes] {
                for block in part.blocks() {
                    let inside: Vec<&Edge> = block
                        .iter()
                        .filter(|e| f.binary_search(e).is_ok())
                        .collect();
                    if !inside.is_empty() && inside.len() != block.len() {
                        f.retain(|e| !block.contains(e));
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let ep_g = self.edge_classes.restrict(&f);
        let ep_h = other.edge_classes.restrict(&f);
        let ep = ep_g.join(&ep_h).expect("same ground");
        Ok(Self::from_parts(self.labels.clone(), vp, ep))
    }

    /// Lattice join `self ∨ other`: the vertex colourings are met; each edge
    /// colouring is extended with one class holding the other graph's
    /// missing edges, and the two extensions are met.
    pub fn join(&self, other: &Self) -> Result<Self, GraphError> {
        self.check_labels(other)?;
        let vp = self
            .vertex_classes
            .meet(&other.vertex_classes)
            .expect("same ground");
        let union: Vec<Edge> = union_sorted(&self.edges, &other.edges);
        let extend = |own: &SetPartition<Edge>, own_edges: &[Edge]| -> SetPartition<Edge> {
            let extra: Vec<Edge> = union
                .iter()
                .filter(|e| own_edges.binary_search(e).is_err())
                .copied()
                .collect();
            let mut blocks: Vec<Vec<Edge>> = own.blocks().to_vec();
            if !extra.is_empty() {
                blocks.push(extra);
            }
            SetPartition::new(union.clone(), blocks).expect("extension partitions the union")
        };
        let ep = extend(&self.edge_classes, &self.edges)
            .meet(&extend(&other.edge_classes, &other.edges))
            .expect("same ground");
        Ok(Self::from_parts(self.labels.clone(), vp, ep))
    }

    /// One indicator matrix per colour class, vertex classes first.
    pub fn indicator_matrices(&self) -> Vec<IndicatorMatrix> {
        let n = self.labels.len();
        let mut out = Vec::new();
        for (ci, block) in self.vertex_classes.blocks().iter().enumerate() {
            let mut m = DMatrix::zeros(n, n);
            for &v in block {
                m[(v, v)] = 1.0;
            }
            out.push(IndicatorMatrix {
                class: ClassId::Vertex(ci),
                matrix: m,
            });
        }
        for (ci, block) in self.edge_classes.blocks().iter().enumerate() {
            let mut m = DMatrix::zeros(n, n);
            for &(i, j) in block {
                m[(i, j)] = 1.0;
                m[(j, i)] = 1.0;
            }
            out.push(IndicatorMatrix {
                class: ClassId::EdgeClass(ci),
                matrix: m,
            });
        }
        out
    }

    /// Renders the colouring as text, marking composite vertex classes with
    /// asterisks and composite edge classes with dashes.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut vmark = 0;
        out.push_str("vertex classes:\n");
        for block in self.vertex_classes.blocks() {
            let names: Vec<String> = block.iter().map(|&v| self.labels[v].to_string()).collect();
            if block.len() > 1 {
                vmark += 1;
                out.push_str(&format!("  {{{}}} {}\n", names.join(", "), "*".repeat(vmark)));
            } else {
                out.push_str(&format!("  {{{}}}\n", names.join(", ")));
            }
        }
        out.push_str("edge classes:\n");
        let mut emark = 0;
        for block in self.edge_classes.blocks() {
            let names: Vec<String> = block
                .iter()
                .map(|&(i, j)| format!("{}-{}", self.labels[i], self.labels[j]))
                .collect();
            if block.len() > 1 {
                emark += 1;
                out.push_str(&format!("  {{{}}} {}\n", names.join(", "), "-".repeat(emark)));
            } else {
                out.push_str(&format!("  {{{}}}\n", names.join(", ")));
            }
        }
        out
    }

    /// Serializes to the canonical JSON object.
    pub fn to_json_value(&self) -> serde_json::Value {
        let label_json = |l: &Label| match l {
            Label::Int(i) => serde_json::json!(i),
            Label::Text(s) => serde_json::json!(s),
        };
        serde_json::json!({
            "vertices": self.labels.iter().map(label_json).collect::<Vec<_>>(),
            "vertex_classes": self
                .vertex_classes
                .blocks()
                .iter()
                .map(|b| b.iter().map(|&v| label_json(&self.labels[v])).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "edge_classes": self
                .edge_classes
                .blocks()
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|&(i, j)| {
                            serde_json::json!([label_json(&self.labels[i]), label_json(&self.labels[j])])
                        })
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>(),
        })
    }

    /// Serializes to a pretty canonical JSON string.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("graph JSON serializes")
    }

    /// Parses the JSON graph format. In strict mode (`normalize = false`)
    /// every list must already be in canonical order; with `normalize` the
    /// input is reordered instead.
    pub fn from_json_str(s: &str, normalize: bool) -> Result<Self, GraphError> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| GraphError::Parse(e.to_string()))?;
        Self::from_json_value(&v, normalize)
    }

    /// Like [`ColouredGraph::from_json_str`] for an already-parsed value.
    pub fn from_json_value(v: &serde_json::Value, normalize: bool) -> Result<Self, GraphError> {
        let obj = v
            .as_object()
            .ok_or_else(|| GraphError::Parse("top level must be an object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "vertices" | "vertex_classes" | "edge_classes") {
                return Err(GraphError::Parse(format!("unknown field {key:?}")));
            }
        }
        let parse_label = |v: &serde_json::Value, ctx: &str| -> Result<Label, GraphError> {
            if let Some(i) = v.as_i64() {
                Ok(Label::Int(i))
            } else if let Some(s) = v.as_str() {
                Ok(Label::Text(s.to_string()))
            } else {
                Err(GraphError::Parse(format!(
                    "{ctx}: label must be an integer or string, got {v}"
                )))
            }
        };
        let vertices_val = obj
            .get("vertices")
            .ok_or_else(|| GraphError::Parse("missing field \"vertices\"".into()))?
            .as_array()
            .ok_or_else(|| GraphError::Parse("\"vertices\" must be a list".into()))?;
        let labels: Vec<Label> = vertices_val
            .iter()
            .map(|x| parse_label(x, "vertices"))
            .collect::<Result<_, _>>()?;
        if !normalize && !is_sorted_strict(&labels) {
            return Err(GraphError::Parse(
                "\"vertices\" is not in canonical (ascending) order; pass --normalize to reorder"
                    .into(),
            ));
        }
        let vc_val = obj
            .get("vertex_classes")
            .ok_or_else(|| GraphError::Parse("missing field \"vertex_classes\"".into()))?
            .as_array()
            .ok_or_else(|| GraphError::Parse("\"vertex_classes\" must be a list".into()))?;
        let mut vertex_classes: Vec<Vec<Label>> = Vec::new();
        for (bi, block) in vc_val.iter().enumerate() {
            let block = block.as_array().ok_or_else(|| {
                GraphError::Parse(format!("vertex_classes[{bi}] must be a list"))
            })?;
            let members: Vec<Label> = block
                .iter()
                .map(|x| parse_label(x, &format!("vertex_classes[{bi}]")))
                .collect::<Result<_, _>>()?;
            if !normalize && !is_sorted_strict(&members) {
                return Err(GraphError::Parse(format!(
                    "vertex_classes[{bi}] is not in canonical order; pass --normalize"
                )));
            }
            vertex_classes.push(members);
        }
        if !normalize {
            let firsts: Vec<&Label> = vertex_classes.iter().filter_map(|b| b.first()).collect();
            if !is_sorted_strict(&firsts) {
                return Err(GraphError::Parse(
                    "vertex_classes blocks are not ordered by least member; pass --normalize"
                        .into(),
                ));
            }
        }
        let ec_val = obj
            .get("edge_classes")
            .ok_or_else(|| GraphError::Parse("missing field \"edge_classes\"".into()))?
            .as_array()
            .ok_or_else(|| GraphError::Parse("\"edge_classes\" must be a list".into()))?;
        let mut edge_classes: Vec<Vec<(Label, Label)>> = Vec::new();
        for (bi, block) in ec_val.iter().enumerate() {
            let block = block.as_array().ok_or_else(|| {
                GraphError::Parse(format!("edge_classes[{bi}] must be a list"))
            })?;
            let mut members: Vec<(Label, Label)> = Vec::new();
            for (ei, pair) in block.iter().enumerate() {
                let pair = pair.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                    GraphError::Parse(format!(
                        "edge_classes[{bi}][{ei}] must be a two-element pair"
                    ))
                })?;
                let a = parse_label(&pair[0], &format!("edge_classes[{bi}][{ei}]"))?;
                let b = parse_label(&pair[1], &format!("edge_classes[{bi}][{ei}]"))?;
                if !normalize && a >= b {
                    return Err(GraphError::Parse(format!(
                        "edge_classes[{bi}][{ei}]: endpoints not in ascending order; pass --normalize"
                    )));
                }
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                members.push((a, b));
            }
            if !normalize && !is_sorted_strict(&members) {
                return Err(GraphError::Parse(format!(
                    "edge_classes[{bi}] is not in canonical order; pass --normalize"
                )));
            }
            edge_classes.push(members);
        }
        if !normalize {
            let firsts: Vec<&(Label, Label)> =
                edge_classes.iter().filter_map(|b| b.first()).collect();
            if !is_sorted_strict(&firsts) {
                return Err(GraphError::Parse(
                    "edge_classes blocks are not ordered by least member; pass --normalize".into(),
                ));
            }
        }
        Self::new(labels, vertex_classes, edge_classes)
    }
}

fn is_sorted_strict<T: Ord>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

fn subset_sorted(a: &[Edge], b: &[Edge]) -> bool {
    let mut i = 0;
    for e in a {
        while i < b.len() && b[i] < *e {
            i += 1;
        }
        if i == b.len() || b[i] != *e {
            return false;
        }
        i += 1;
    }
    true
}

fn intersect_sorted(a: &[Edge], b: &[Edge]) -> Vec<Edge> {
    a.iter()
        .filter(|e| b.binary_search(e).is_ok())
        .copied()
        .collect()
}

fn union_sorted(a: &[Edge], b: &[Edge]) -> Vec<Edge> {
    let mut out: Vec<Edge> = a.iter().chain(b.iter()).copied().collect();
    out.sort();
    out.dedup();
    out
}

/// Streams every coloured graph on the given labels: all edge subsets, each
/// with every vertex partition and every edge partition. The total count is
/// `model_count(n)`. Guarded at `n ≤ 5` unless `allow_large` is set.
pub fn enumerate_coloured_graphs(
    labels: &[Label],
    allow_large: bool,
) -> Result<EnumerateColoured, GraphError> {
    let mut sorted = labels.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(GraphError::Invalid("duplicate vertex label".into()));
    }
    let n = sorted.len();
    if n > 5 && !allow_large {
        return Err(GraphError::Guard(format!(
            "enumeration over {n} vertices is huge; pass the override to proceed"
        )));
    }
    if complete_edges(n).len() >= 64 {
        return Err(GraphError::Guard("too many vertex pairs to enumerate".into()));
    }
    let vparts: Vec<SetPartition<usize>> = all_partitions(&(0..n).collect::<Vec<_>>()).collect();
    Ok(EnumerateColoured {
        labels: sorted,
        all_edges: complete_edges(n),
        vparts,
        mask: 0,
        current: None,
        done: false,
    })
}

/// Iterator over all coloured graphs on a label set.
/// See [`enumerate_coloured_graphs`].
pub struct EnumerateColoured {
    labels: Vec<Label>,
    all_edges: Vec<Edge>,
    vparts: Vec<SetPartition<usize>>,
    mask: u64,
    current: Option<(crate::partition::Partitions<Edge>, Option<SetPartition<Edge>>, usize)>,
    done: bool,
}

impl Iterator for EnumerateColoured {
    type Item = ColouredGraph;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            if let Some((ep_iter, current_ep, vp_idx)) = &mut self.current {
                if let Some(ep) = current_ep {
                    if *vp_idx < self.vparts.len() {
                        let g = ColouredGraph::from_parts(
                            self.labels.clone(),
                            self.vparts[*vp_idx].clone(),
                            ep.clone(),
                        );
                        *vp_idx += 1;
                        return Some(g);
                    }
                    *current_ep = None;
                }
                match ep_iter.next() {
                    Some(ep) => {
                        *current_ep = Some(ep);
                        *vp_idx = 0;
                        continue;
                    }
                    None => {
                        self.current = None;
                        self.mask += 1;
                    }
                }
            }
            let total = 1u64 << self.all_edges.len();
            if self.mask >= total {
                self.done = true;
                return None;
            }
            let edges: Vec<Edge> = self
                .all_edges
                .iter()
                .enumerate()
                .filter(|(i, _)| self.mask >> i & 1 == 1)
                .map(|(_, e)| *e)
                .collect();
            self.current = Some((all_partitions(&edges), None, 0));
        }
    }
}

#[cfg(test)]
pub(crate) mod test_fixtures {
    use super::*;

    /// Builds a coloured graph over integer labels from compact data.
    pub fn cg(n: i64, vclasses: &[&[i64]], eclasses: &[&[(i64, i64)]]) -> ColouredGraph {
        ColouredGraph::new(
            (1..=n).map(Label::Int).collect(),
            vclasses
                .iter()
                .map(|b| b.iter().map(|&v| Label::Int(v)).collect())
                .collect(),
            eclasses
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|&(a, x)| (Label::Int(a), Label::Int(x)))
                        .collect()
                })
                .collect(),
        )
        .unwrap()
    }

    /// The four-cycle with opposite vertices and opposite edges identified.
    pub fn g4() -> ColouredGraph {
        cg(
            4,
            &[&[1, 3], &[2, 4]],
            &[&[(1, 2), (3, 4)], &[(1, 4), (2, 3)]],
        )
    }

    /// Five edges, diagonal atomic, mirrored pairs identified.
    pub fn g5() -> ColouredGraph {
        cg(
            4,
            &[&[1, 3], &[2], &[4]],
            &[&[(1, 2), (2, 3)], &[(1, 4), (3, 4)], &[(1, 3)]],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::test_fixtures::{cg, g4, g5};
    use super::*;

    #[test]
    fn partial_order_worked_examples() {
        // A two-edge path with its ends identified, under two candidate
        // supergraphs: one refines compatibly, the other does not.
        let g1 = cg(4, &[&[1, 2], &[3], &[4]], &[&[(1, 2), (2, 3)]]);
        let g2 = cg(
            4,
            &[&[1, 2], &[3], &[4]],
            &[&[(1, 2)], &[(2, 3)], &[(1, 3), (1, 4), (3, 4)]],
        );
        let g3 = cg(
            4,
            &[&[1, 2], &[3, 4]],
            &[&[(1, 2), (1, 3), (2, 3)], &[(1, 4), (3, 4)]],
        );
        assert!(g1.leq(&g2).unwrap());
        assert!(!g1.leq(&g3).unwrap());
        assert!(g1.leq(&g1).unwrap());
    }

    #[test]
    fn meet_of_the_two_four_cycles() {
        let meet = g4().meet(&g5()).unwrap();
        let expected = cg(
            4,
            &[&[1, 3], &[2, 4]],
            &[&[(1, 2), (1, 4), (2, 3), (3, 4)]],
        );
        assert_eq!(meet, expected);
    }

    #[test]
    fn join_of_the_two_four_cycles() {
        let join = g4().join(&g5()).unwrap();
        let expected = cg(
            4,
            &[&[1, 3], &[2], &[4]],
            &[
                &[(1, 2)],
                &[(1, 3)],
                &[(1, 4)],
                &[(2, 3)],
                &[(3, 4)],
            ],
        );
        assert_eq!(join, expected);
    }

    #[test]
    fn zero_and_unit_behave_as_lattice_bounds() {
        let labels = int_labels(4);
        let zero = ColouredGraph::zero(labels.clone()).unwrap();
        let unit = ColouredGraph::unit(labels).unwrap();
        assert!(zero.leq(&unit).unwrap());
        for g in [g4(), g5()] {
            assert_eq!(g.meet(&unit).unwrap(), g);
            assert_eq!(g.meet(&zero).unwrap(), zero);
            assert_eq!(g.join(&zero).unwrap(), g);
            assert_eq!(g.join(&unit).unwrap(), unit);
            assert!(zero.leq(&g).unwrap());
            assert!(g.leq(&unit).unwrap());
        }
    }

    #[test]
    fn join_can_leave_the_edge_regular_class() {
        // Two edge-regular colourings of the same two-edge graph whose join
        // has atomic vertices but keeps the edges identified, which is no
        // longer edge regular.
        let a = cg(4, &[&[1, 3], &[2, 4]], &[&[(1, 4), (2, 3)]]);
        let b = cg(4, &[&[1, 2], &[3, 4]], &[&[(1, 4), (2, 3)]]);
        let join = a.join(&b).unwrap();
        let expected = cg(
            4,
            &[&[1], &[2], &[3], &[4]],
            &[&[(1, 4), (2, 3)]],
        );
        assert_eq!(join, expected);
    }

    #[test]
    fn non_distributive_triple() {
        let g6 = cg(4, &[&[1, 2, 4], &[3]], &[&[(1, 2), (1, 4), (2, 4)]]);
        let g7 = cg(4, &[&[2, 3, 4], &[1]], &[&[(2, 3), (2, 4), (3, 4)]]);
        let g8 = cg(
            4,
            &[&[1, 3], &[2, 4]],
            &[&[(1, 2), (1, 4), (2, 3), (3, 4)]],
        );
        let zero = ColouredGraph::zero(int_labels(4)).unwrap();
        assert_eq!(g7.meet(&g8).unwrap(), zero);
        let expected_join = cg(
            4,
            &[&[2, 4], &[1], &[3]],
            &[&[(1, 2), (1, 4)], &[(2, 3), (3, 4)], &[(2, 4)]],
        );
        assert_eq!(g6.join(&g7).unwrap(), expected_join);
        assert_eq!(g6.join(&g8).unwrap(), expected_join);
        let lhs = g6.join(&g7.meet(&g8).unwrap()).unwrap();
        let rhs = g6
            .join(&g7)
            .unwrap()
            .meet(&g6.join(&g8).unwrap())
            .unwrap();
        assert_eq!(lhs, g6);
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(
            enumerate_coloured_graphs(&int_labels(1), false).unwrap().count(),
            1
        );
        assert_eq!(
            enumerate_coloured_graphs(&int_labels(2), false).unwrap().count(),
            4
        );
        let three: Vec<ColouredGraph> =
            enumerate_coloured_graphs(&int_labels(3), false).unwrap().collect();
        assert_eq!(three.len(), 75);
        let mut dedup = three.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 75, "enumeration must not repeat graphs");
    }

    #[test]
    fn enumeration_guard() {
        assert!(matches!(
            enumerate_coloured_graphs(&int_labels(6), false),
            Err(GraphError::Guard(_))
        ));
    }

    #[test]
    fn indicator_matrices_sum_to_identity_and_adjacency() {
        let g = cg(
            5,
            &[&[1], &[2, 5], &[3, 4]],
            &[
                &[(1, 2)],
                &[(1, 3), (1, 4), (1, 5), (2, 4), (3, 5)],
            ],
        );
        let mats = g.indicator_matrices();
        assert_eq!(mats.len(), 5);
        let n = 5;
        let mut id_sum = DMatrix::zeros(n, n);
        let mut adj_sum = DMatrix::zeros(n, n);
        for m in &mats {
            match m.class {
                ClassId::Vertex(_) => id_sum += &m.matrix,
                ClassId::EdgeClass(_) => adj_sum += &m.matrix,
            }
        }
        assert_eq!(id_sum, DMatrix::identity(n, n));
        let big = mats
            .iter()
            .find(|m| m.class == ClassId::EdgeClass(1))
            .unwrap();
        let ones: usize = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| big.matrix[(i, j)] == 1.0)
            .count();
        assert_eq!(ones, 10);
        for (i, j) in [(0usize, 2usize), (0, 3), (0, 4), (1, 3), (2, 4)] {
            assert_eq!(big.matrix[(i, j)], 1.0);
            assert_eq!(adj_sum[(i, j)], 1.0);
        }
    }

    #[test]
    fn json_round_trip_and_canonical_checks() {
        let g = g5();
        let s = g.to_json_string();
        let back = ColouredGraph::from_json_str(&s, false).unwrap();
        assert_eq!(back, g);

        let shuffled = r#"{
            "vertices": [2, 1, 3, 4],
            "vertex_classes": [[1, 3], [2], [4]],
            "edge_classes": [[[1, 2], [2, 3]], [[1, 4], [3, 4]], [[1, 3]]]
        }"#;
        assert!(matches!(
            ColouredGraph::from_json_str(shuffled, false),
            Err(GraphError::Parse(_))
        ));
        assert_eq!(ColouredGraph::from_json_str(shuffled, true).unwrap(), g);

        let swapped_pair = r#"{
            "vertices": [1, 2, 3, 4],
            "vertex_classes": [[1, 3], [2], [4]],
            "edge_classes": [[[2, 1], [2, 3]], [[1, 4], [3, 4]], [[1, 3]]]
        }"#;
        assert!(ColouredGraph::from_json_str(swapped_pair, false).is_err());
        assert_eq!(ColouredGraph::from_json_str(swapped_pair, true).unwrap(), g);

        let bad_label = r#"{"vertices": [1.5], "vertex_classes": [[1.5]], "edge_classes": []}"#;
        assert!(ColouredGraph::from_json_str(bad_label, false).is_err());
    }

    #[test]
    fn leq_is_a_partial_order_on_small_lattices() {
        let all: Vec<ColouredGraph> =
            enumerate_coloured_graphs(&int_labels(3), false).unwrap().collect();
        for g in &all {
            assert!(g.leq(g).unwrap());
        }
        for g in &all {
            for h in &all {
                if g.leq(h).unwrap() && h.leq(g).unwrap() {
                    assert_eq!(g, h, "antisymmetry");
                }
            }
        }
        // Transitivity on a deterministic sample of triples.
        for (i, g) in all.iter().enumerate().step_by(3) {
            for (j, h) in all.iter().enumerate().step_by(4) {
                let k = &all[(i * 31 + j * 7) % all.len()];
                if g.leq(h).unwrap() && h.leq(k).unwrap() {
                    assert!(g.leq(k).unwrap(), "transitivity");
                }
            }
        }
    }

    #[test]
    fn meet_join_are_bounds_on_the_three_vertex_lattice() {
        let all: Vec<ColouredGraph> =
            enumerate_coloured_graphs(&int_labels(3), false).unwrap().collect();
        for (i, g) in all.iter().enumerate() {
            for h in all.iter().skip(i % 7).step_by(7) {
                let m = g.meet(h).unwrap();
                let j = g.join(h).unwrap();
                assert!(m.leq(g).unwrap() && m.leq(h).unwrap());
                assert!(g.leq(&j).unwrap() && h.leq(&j).unwrap());
                for c in all.iter().step_by(5) {
                    if c.leq(g).unwrap() && c.leq(h).unwrap() {
                        assert!(c.leq(&m).unwrap(), "meet is greatest lower bound");
                    }
                    if g.leq(c).unwrap() && h.leq(c).unwrap() {
                        assert!(j.leq(c).unwrap(), "join is least upper bound");
                    }
                }
            }
        }
    }
}
