//! Stallings folding by union-find with per-class edge slots.

use std::collections::{BTreeMap, BTreeSet};

use super::{Edge, LabeledGraph, VertexId};

/// Union-find over vertex indices where every class remembers one neighbour per
/// (label, direction). A second neighbour in the same slot queues a merge.
pub(crate) struct Folder {
    rank: usize,
    parent: Vec<usize>,
    size: Vec<usize>,
    slots: Vec<Vec<Option<usize>>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    pub(crate) fn new(vertices: usize, rank: usize) -> Self {
        Folder {
            rank,
            parent: (0..vertices).collect(),
            size: vec![1; vertices],
            slots: vec![vec![None; 2 * rank]; vertices],
            pending: Vec::new(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Records edge `from --label0--> to` and folds as needed.
    pub(crate) fn add_edge(&mut self, from: usize, label0: usize, to: usize) {
        let rf = self.find(from);
        match self.slots[rf][label0] {
            Some(t) => self.pending.push((t, to)),
            None => self.slots[rf][label0] = Some(to),
        }
        let rt = self.find(to);
        match self.slots[rt][self.rank + label0] {
            Some(s) => self.pending.push((s, from)),
            None => self.slots[rt][self.rank + label0] = Some(from),
        }
        self.settle();
    }

    /// Identifies two vertices and folds until the graph is a precover again.
    pub(crate) fn merge(&mut self, a: usize, b: usize) {
        self.pending.push((a, b));
        self.settle();
    }

    fn settle(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (mut ra, mut rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            if self.size[ra] < self.size[rb] {
                std::mem::swap(&mut ra, &mut rb);
            }
            self.parent[rb] = ra;
            self.size[ra] += self.size[rb];
            let moved = std::mem::take(&mut self.slots[rb]);
            for (s, t) in moved.into_iter().enumerate() {
                if let Some(t) = t {
                    match self.slots[ra][s] {
                        Some(t2) => self.pending.push((t, t2)),
                        None => self.slots[ra][s] = Some(t),
                    }
                }
            }
        }
    }

    /// Class label of every index: the smallest index in its class.
    pub(crate) fn partition(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut least = vec![usize::MAX; n];
        for v in 0..n {
            let r = self.find(v);
            least[r] = least[r].min(v);
        }
        (0..n).map(|v| least[self.find(v)]).collect()
    }
}

pub struct FoldResult {
    pub graph: LabeledGraph,
    /// Old vertex id to new vertex id.
    pub map: BTreeMap<VertexId, VertexId>,
}

/// Folds `g` into a precover. Result vertices are renumbered `0..m` by the
/// smallest original id in each class.
pub fn fold_with_map(g: &LabeledGraph) -> FoldResult {
    let verts = g.vertices();
    let idx = |v: VertexId| verts.binary_search(&v).unwrap();
    let mut folder = Folder::new(verts.len(), g.rank());
    for e in g.edges() {
        folder.add_edge(idx(e.from), e.label_index(), idx(e.to));
    }
    let part = folder.partition();
    let reps: BTreeSet<usize> = part.iter().copied().collect();
    let new_id: BTreeMap<usize, VertexId> = reps.iter().enumerate().map(|(i, &r)| (r, i as VertexId)).collect();
    let map: BTreeMap<VertexId, VertexId> =
        verts.iter().enumerate().map(|(i, &v)| (v, new_id[&part[i]])).collect();
    let graph = LabeledGraph::from_parts(
        g.rank(),
        0..reps.len() as VertexId,
        g.edges().iter().map(|e| Edge { label: e.label, from: map[&e.from], to: map[&e.to] }),
    );
    FoldResult { graph, map }
}

pub fn fold(g: &LabeledGraph) -> LabeledGraph {
    fold_with_map(g).graph
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Pairwise-merge oracle: repeatedly pick some foldable pair of edges (in
    /// random order) and identify their far endpoints.
    fn naive_fold(g: &LabeledGraph, rng: &mut ChaCha8Rng) -> LabeledGraph {
        let mut g = g.clone();
        loop {
            let mut candidates = Vec::new();
            for (i, e) in g.edges().iter().enumerate() {
                for f in &g.edges()[i + 1..] {
                    if e.label == f.label && e.from == f.from && e.to != f.to {
                        candidates.push((e.to, f.to));
                    }
                    if e.label == f.label && e.to == f.to && e.from != f.from {
                        candidates.push((e.from, f.from));
                    }
                }
            }
            let Some(&(x, y)) = candidates.choose(rng) else { return g };
            let (keep, gone) = (x.min(y), x.max(y));
            g = LabeledGraph::from_parts(
                g.rank(),
                g.vertices().iter().copied().filter(|&v| v != gone),
                g.edges().iter().map(|e| Edge {
                    label: e.label,
                    from: if e.from == gone { keep } else { e.from },
                    to: if e.to == gone { keep } else { e.to },
                }),
            );
        }
    }

    fn graph(rank: usize, n: u32, edges: &[(usize, u32, u32)]) -> LabeledGraph {
        LabeledGraph::new(rank, (0..n).collect(), edges.iter().map(|&(l, a, b)| Edge::new(l, a, b)).collect())
            .unwrap()
    }

    #[test]
    fn single_fold_step() {
        let g = graph(1, 3, &[(1, 0, 1), (1, 0, 2)]);
        let f = fold(&g);
        assert_eq!(f.vertex_count(), 2);
        assert_eq!(f.edge_count(), 1);
    }

    #[test]
    fn precover_is_fixed() {
        let g = graph(2, 4, &[(1, 0, 1), (2, 1, 2), (1, 3, 2), (2, 0, 3)]);
        let f = fold(&g);
        assert_eq!((f.vertex_count(), f.edge_count()), (4, 4));
        assert!(f.is_isomorphic(&g));
    }

    #[test]
    fn wedge_of_aa_and_ab() {
        // base 0; "aa": 0->1->0 is a loop word, here paths 0-a->1-a->2 and 0-a->3-b->4
        let g = graph(2, 5, &[(1, 0, 1), (1, 1, 2), (1, 0, 3), (2, 3, 4)]);
        let f = fold(&g);
        assert_eq!((f.vertex_count(), f.edge_count()), (4, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(naive_fold(&g, &mut rng).is_isomorphic(&f));
    }

    fn arb_graph() -> impl Strategy<Value = LabeledGraph> {
        (1usize..4, 1u32..9).prop_flat_map(|(rank, n)| {
            prop::collection::vec((1..=rank, 0..n, 0..n), 0..14).prop_map(move |es| {
                LabeledGraph::new(rank, (0..n).collect(), es.into_iter().map(|(l, a, b)| Edge::new(l, a, b)).collect())
                    .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn fold_is_confluent_and_yields_precover(g in arb_graph(), seed in any::<u64>()) {
            let f = fold(&g);
            prop_assert!(f.is_precover());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..3 {
                let n = naive_fold(&g, &mut rng);
                prop_assert!(n.is_isomorphic(&f));
            }
            prop_assert_eq!(fold(&f).canonical_code(), f.canonical_code());
        }

        #[test]
        fn fold_order_does_not_matter(g in arb_graph(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = g.edges().to_vec();
            edges.shuffle(&mut rng);
            let mut folder = Folder::new(g.vertex_count(), g.rank());
            let idx = |v: VertexId| g.vertices().binary_search(&v).unwrap();
            for e in &edges {
                folder.add_edge(idx(e.from), e.label_index(), idx(e.to));
            }
            let p1 = folder.partition();
            let FoldResult { map, .. } = fold_with_map(&g);
            for (i, &v) in g.vertices().iter().enumerate() {
                for (j, &w) in g.vertices().iter().enumerate() {
                    prop_assert_eq!(p1[i] == p1[j], map[&v] == map[&w]);
                }
            }
        }
    }
}
