//! Labeled graphs over the rose `R_k`: precovers, covers and based graphs.

mod canonical;
mod fold;
mod morphism;
mod ops;

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::check_rank;

pub use fold::{fold, fold_with_map, FoldResult};
pub(crate) use fold::Folder;
pub(crate) use ops::{path_edges, pullback_bounded};
pub use morphism::{count_morphisms, list_morphisms, Action, Adjacency, MorphismPlan};
pub use ops::{
    based_core, core, index_ratio, perms_from_cover, perms_from_cover_sorted, pullback,
    schreier_from_perms, stallings_graph, trace_word,
};

pub type VertexId = u32;

/// A directed edge labeled by a generator index (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub label: u8,
    pub from: VertexId,
    pub to: VertexId,
}

impl Edge {
    pub fn new(label: usize, from: VertexId, to: VertexId) -> Self {
        Edge { label: label as u8, from, to }
    }

    /// 0-based label.
    pub fn label_index(&self) -> usize {
        self.label as usize - 1
    }
}

/// A finite graph with edges labeled by generators of `F_rank`.
///
/// Vertices and edges are kept sorted and duplicate-free, so structural
/// equality is equality of vertex and edge sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    rank: usize,
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
}

impl LabeledGraph {
    pub fn new(rank: usize, vertices: Vec<VertexId>, edges: Vec<Edge>) -> Result<Self> {
        check_rank(rank)?;
        let set: BTreeSet<VertexId> = vertices.iter().copied().collect();
        if set.len() != vertices.len() {
            return Err(Error::InvalidInput("duplicate vertex id".into()));
        }
        for e in &edges {
            if e.label == 0 || e.label as usize > rank {
                return Err(Error::InvalidInput(format!("edge label {} outside 1..={rank}", e.label)));
            }
            if !set.contains(&e.from) || !set.contains(&e.to) {
                return Err(Error::InvalidInput(format!("edge {e:?} has an unknown endpoint")));
            }
        }
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        Ok(LabeledGraph { rank, vertices: set.into_iter().collect(), edges: edges.into_iter().collect() })
    }

    /// Internal constructor for data already known to be consistent.
    pub(crate) fn from_parts(rank: usize, vertices: impl IntoIterator<Item = VertexId>, edges: impl IntoIterator<Item = Edge>) -> Self {
        let vertices: BTreeSet<VertexId> = vertices.into_iter().collect();
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        debug_assert!(edges.iter().all(|e| vertices.contains(&e.from) && vertices.contains(&e.to)));
        LabeledGraph { rank, vertices: vertices.into_iter().collect(), edges: edges.into_iter().collect() }
    }

    pub fn empty(rank: usize) -> Self {
        LabeledGraph { rank, vertices: Vec::new(), edges: Vec::new() }
    }

    /// The rose `R_rank`: one vertex carrying a loop per generator.
    pub fn rose(rank: usize) -> Self {
        LabeledGraph::from_parts(rank, [0], (1..=rank).map(|j| Edge::new(j, 0, 0)))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Number of edges with the given 1-based label.
    pub fn label_count(&self, label: usize) -> usize {
        self.edges.iter().filter(|e| e.label as usize == label).count()
    }

    pub fn max_id(&self) -> Option<VertexId> {
        self.vertices.last().copied()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64
    }

    /// Checks the precover condition: at most one in- and one out-edge per label at each vertex.
    pub fn check_precover(&self) -> Result<()> {
        let mut out = BTreeSet::new();
        let mut inn = BTreeSet::new();
        for e in &self.edges {
            if !out.insert((e.from, e.label)) {
                return Err(Error::NotAPrecover(format!("vertex {} has two outgoing {}-edges", e.from, e.label)));
            }
            if !inn.insert((e.to, e.label)) {
                return Err(Error::NotAPrecover(format!("vertex {} has two incoming {}-edges", e.to, e.label)));
            }
        }
        Ok(())
    }

    pub fn is_precover(&self) -> bool {
        self.check_precover().is_ok()
    }

    /// A cover has exactly one in- and one out-edge per label everywhere.
    pub fn is_cover(&self) -> bool {
        self.is_precover() && self.edges.len() == self.vertices.len() * self.rank
    }

    pub fn adjacency(&self) -> Result<Adjacency> {
        Adjacency::new(self)
    }

    /// Connected components (ignoring orientation), each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let n = self.vertices.len();
        let idx = |v: VertexId| self.vertices.binary_search(&v).unwrap();
        let mut nbrs = vec![Vec::new(); n];
        for e in &self.edges {
            let (a, b) = (idx(e.from), idx(e.to));
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &nbrs[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            let mut comp: Vec<VertexId> = comp.into_iter().map(|i| self.vertices[i]).collect();
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// The subgraph induced on a vertex set.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> LabeledGraph {
        LabeledGraph::from_parts(
            self.rank,
            self.vertices.iter().copied().filter(|v| keep.contains(v)),
            self.edges.iter().copied().filter(|e| keep.contains(&e.from) && keep.contains(&e.to)),
        )
    }

    /// Renames vertices through `f`, which must be injective on this graph.
    pub fn relabeled(&self, f: impl Fn(VertexId) -> VertexId) -> LabeledGraph {
        LabeledGraph::from_parts(
            self.rank,
            self.vertices.iter().map(|&v| f(v)),
            self.edges.iter().map(|e| Edge { label: e.label, from: f(e.from), to: f(e.to) }),
        )
    }

    /// Disjoint union; `other`'s ids are shifted by the returned offset.
    pub fn disjoint_union(&self, other: &LabeledGraph) -> (LabeledGraph, VertexId) {
        let offset = self.max_id().map_or(0, |m| m + 1);
        let shifted = other.relabeled(|v| v + offset);
        let g = LabeledGraph::from_parts(
            self.rank.max(other.rank),
            self.vertices.iter().chain(shifted.vertices.iter()).copied(),
            self.edges.iter().chain(shifted.edges.iter()).copied(),
        );
        (g, offset)
    }

    /// `copies` disjoint copies of this graph.
    pub fn repeated(&self, copies: usize) -> LabeledGraph {
        (0..copies).fold(LabeledGraph::empty(self.rank), |acc, _| acc.disjoint_union(self).0)
    }

    /// Adds an edge (no validation beyond endpoint existence).
    pub fn with_edge(&self, e: Edge) -> Result<LabeledGraph> {
        let mut edges = self.edges.clone();
        edges.push(e);
        LabeledGraph::new(self.rank, self.vertices.clone(), edges)
    }

    pub fn canonical_code(&self) -> Vec<i64> {
        canonical::graph_code(self)
    }

    /// Isomorphism as labeled directed graphs.
    pub fn is_isomorphic(&self, other: &LabeledGraph) -> bool {
        self.rank == other.rank
            && self.vertex_count() == other.vertex_count()
            && self.edge_count() == other.edge_count()
            && self.canonical_code() == other.canonical_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson::from_graph(self, None)).expect("graph serializes")
    }

    /// Parses the JSON graph format; the basepoint field is ignored.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str::<GraphJson>(text)?.into_graph()?.0)
    }
}

/// A labeled graph with a distinguished basepoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasedGraph {
    graph: LabeledGraph,
    basepoint: VertexId,
}

impl BasedGraph {
    pub fn new(graph: LabeledGraph, basepoint: VertexId) -> Result<Self> {
        if !graph.contains_vertex(basepoint) {
            return Err(Error::InvalidInput(format!("basepoint {basepoint} is not a vertex")));
        }
        Ok(BasedGraph { graph, basepoint })
    }

    /// Single vertex, no edges: the graph of the trivial subgroup.
    pub fn trivial(rank: usize) -> Self {
        BasedGraph { graph: LabeledGraph::from_parts(rank, [0], []), basepoint: 0 }
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn into_graph(self) -> LabeledGraph {
        self.graph
    }

    pub fn basepoint(&self) -> VertexId {
        self.basepoint
    }

    pub fn rank(&self) -> usize {
        self.graph.rank
    }

    /// Component of the basepoint.
    pub fn base_component(&self) -> BasedGraph {
        let comp = self
            .graph
            .components()
            .into_iter()
            .find(|c| c.binary_search(&self.basepoint).is_ok())
            .expect("basepoint lies in some component");
        BasedGraph { graph: self.graph.induced(&comp.into_iter().collect()), basepoint: self.basepoint }
    }

    pub fn canonical_code(&self) -> Vec<i64> {
        canonical::based_code(self)
    }

    /// Isomorphism preserving basepoints.
    pub fn is_isomorphic(&self, other: &BasedGraph) -> bool {
        self.graph.rank == other.graph.rank
            && self.graph.vertex_count() == other.graph.vertex_count()
            && self.graph.edge_count() == other.graph.edge_count()
            && self.canonical_code() == other.canonical_code()
    }

    /// Renumbers vertices `0..` in breadth-first order from the basepoint.
    pub fn normalized(&self) -> BasedGraph {
        canonical::normalize_based(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson::from_graph(&self.graph, Some(self.basepoint))).expect("graph serializes")
    }

    /// Parses the JSON graph format; a basepoint is required.
    pub fn from_json(text: &str) -> Result<Self> {
        let (g, bp) = serde_json::from_str::<GraphJson>(text)?.into_graph()?;
        let bp = bp.ok_or_else(|| Error::InvalidInput("graph has no basepoint".into()))?;
        BasedGraph::new(g, bp)
    }
}

/// Wire form: `{"rank", "vertices", "edges": [{"label","from","to"}], "basepoint"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub rank: usize,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub basepoint: Option<VertexId>,
}

impl GraphJson {
    pub fn from_graph(g: &LabeledGraph, basepoint: Option<VertexId>) -> Self {
        GraphJson { rank: g.rank, vertices: g.vertices.clone(), edges: g.edges.clone(), basepoint }
    }

    pub fn into_graph(self) -> Result<(LabeledGraph, Option<VertexId>)> {
        let g = LabeledGraph::new(self.rank, self.vertices, self.edges)?;
        if let Some(b) = self.basepoint {
            if !g.contains_vertex(b) {
                return Err(Error::InvalidInput(format!("basepoint {b} is not a vertex")));
            }
        }
        Ok((g, self.basepoint))
    }
}

impl Serialize for LabeledGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson::from_graph(self, None).serialize(s)
    }
}

impl Serialize for BasedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson::from_graph(&self.graph, Some(self.basepoint)).serialize(s)
    }
}
