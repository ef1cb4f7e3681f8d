//! Canonical codes for precovers: breadth-first numbering from a root,
//! exploring labels in order (out-edge before in-edge). For a connected
//! precover the numbering is determined by the root alone.

use std::collections::VecDeque;

use super::{Adjacency, BasedGraph, Edge, LabeledGraph, VertexId};

/// BFS order of the component of `root` (indices into the adjacency).
fn bfs_order(adj: &Adjacency, root: usize) -> Vec<usize> {
    let mut number = vec![usize::MAX; adj.len()];
    let mut order = vec![root];
    number[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for label in 0..adj.rank() {
            for w in [adj.out(v, label), adj.inn(v, label)].into_iter().flatten() {
                if number[w] == usize::MAX {
                    number[w] = order.len();
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

fn code_from(adj: &Adjacency, root: usize) -> Vec<i64> {
    let order = bfs_order(adj, root);
    let mut number = vec![usize::MAX; adj.len()];
    for (i, &v) in order.iter().enumerate() {
        number[v] = i;
    }
    let mut code = Vec::with_capacity(1 + order.len() * adj.rank());
    code.push(order.len() as i64);
    for &v in &order {
        for label in 0..adj.rank() {
            code.push(adj.out(v, label).map_or(-1, |w| number[w] as i64));
        }
    }
    code
}

fn component_roots(adj: &Adjacency) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    let mut comps = Vec::new();
    for s in 0..adj.len() {
        if !seen[s] {
            let order = bfs_order(adj, s);
            for &v in &order {
                seen[v] = true;
            }
            comps.push(order);
        }
    }
    comps
}

fn min_code(adj: &Adjacency, comp: &[usize]) -> Vec<i64> {
    comp.iter().map(|&r| code_from(adj, r)).min().unwrap_or_default()
}

/// Canonical code of a precover. Non-precovers have no such normal form and
/// are coded by their sorted vertex and edge lists.
pub(super) fn graph_code(g: &LabeledGraph) -> Vec<i64> {
    let Ok(adj) = g.adjacency() else {
        return fallback_code(g);
    };
    let mut codes: Vec<Vec<i64>> = component_roots(&adj).iter().map(|c| min_code(&adj, c)).collect();
    codes.sort();
    let mut out = vec![g.rank() as i64, codes.len() as i64];
    for c in codes {
        out.extend(c);
    }
    out
}

pub(super) fn based_code(b: &BasedGraph) -> Vec<i64> {
    let g = b.graph();
    let Ok(adj) = g.adjacency() else {
        let mut code = vec![-2, b.basepoint() as i64];
        code.extend(fallback_code(g));
        return code;
    };
    let root = adj.position(b.basepoint()).expect("basepoint is a vertex");
    let mut out = vec![g.rank() as i64];
    out.extend(code_from(&adj, root));
    let mut rest: Vec<Vec<i64>> = component_roots(&adj)
        .iter()
        .filter(|c| !c.contains(&root))
        .map(|c| min_code(&adj, c))
        .collect();
    rest.sort();
    for c in rest {
        out.extend(c);
    }
    out
}

fn fallback_code(g: &LabeledGraph) -> Vec<i64> {
    let mut code = vec![-1, g.rank() as i64];
    code.extend(g.vertices().iter().map(|&v| v as i64));
    for e in g.edges() {
        code.extend([e.label as i64, e.from as i64, e.to as i64]);
    }
    code
}

pub(super) fn normalize_based(b: &BasedGraph) -> BasedGraph {
    let g = b.graph();
    let Ok(adj) = g.adjacency() else { return b.clone() };
    let root = adj.position(b.basepoint()).unwrap();
    let mut order = bfs_order(&adj, root);
    for comp in component_roots(&adj) {
        if !comp.contains(&root) {
            order.extend(comp);
        }
    }
    let mut number = vec![0 as VertexId; adj.len()];
    for (i, &v) in order.iter().enumerate() {
        number[v] = i as VertexId;
    }
    let pos = |v: VertexId| number[adj.position(v).unwrap()];
    let graph = LabeledGraph::from_parts(
        g.rank(),
        0..order.len() as VertexId,
        g.edges().iter().map(|e| Edge { label: e.label, from: pos(e.from), to: pos(e.to) }),
    );
    BasedGraph::new(graph, 0).unwrap()
}
