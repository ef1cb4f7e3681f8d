use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::perm::{Perm, PermTuple};
use crate::word::{check_rank, Word};

use super::morphism::{Action, Adjacency, MorphismPlan};
use super::{fold_with_map, BasedGraph, Edge, LabeledGraph, VertexId};

/// Edges for the path reading `word` from `start`; interior vertices get fresh
/// ids from `next_id`, the last letter ends at `end`.
pub(crate) fn path_edges(word: &Word, start: VertexId, end: VertexId, next_id: &mut VertexId) -> (Vec<VertexId>, Vec<Edge>) {
    let mut verts = Vec::new();
    let mut edges = Vec::new();
    let mut cur = start;
    for (i, l) in word.letters().iter().enumerate() {
        let nxt = if i + 1 == word.len() {
            end
        } else {
            let v = *next_id;
            *next_id += 1;
            verts.push(v);
            v
        };
        edges.push(if l.is_inverse() { Edge::new(l.generator(), nxt, cur) } else { Edge::new(l.generator(), cur, nxt) });
        cur = nxt;
    }
    (verts, edges)
}

/// Folded wedge of loops spelling the generators, based at vertex 0.
pub fn stallings_graph(generators: &[Word], rank: usize) -> Result<BasedGraph> {
    check_rank(rank)?;
    let mut vertices = vec![0];
    let mut edges = Vec::new();
    let mut next: VertexId = 1;
    for w in generators {
        if w.rank() > rank {
            return Err(Error::InvalidInput(format!("word {w} exceeds rank {rank}")));
        }
        let w = w.free_reduce();
        if w.is_empty() {
            continue;
        }
        let (vs, es) = path_edges(&w, 0, 0, &mut next);
        vertices.extend(vs);
        edges.extend(es);
    }
    let wedge = LabeledGraph::from_parts(rank, vertices, edges);
    let folded = fold_with_map(&wedge);
    BasedGraph::new(folded.graph, folded.map[&0])
}

/// Edge ends at every vertex (loops count twice), keyed by id.
fn valences(g: &LabeledGraph) -> HashMap<VertexId, usize> {
    let mut val: HashMap<VertexId, usize> = g.vertices().iter().map(|&v| (v, 0)).collect();
    for e in g.edges() {
        *val.get_mut(&e.from).unwrap() += 1;
        *val.get_mut(&e.to).unwrap() += 1;
    }
    val
}

/// Repeatedly deletes vertices of valence at most one, except `keep`.
fn prune(g: &LabeledGraph, keep: Option<VertexId>) -> LabeledGraph {
    let mut val = valences(g);
    let mut alive: BTreeSet<VertexId> = g.vertices().iter().copied().collect();
    let mut nbrs: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
    for e in g.edges() {
        nbrs.entry(e.from).or_default().push(e.to);
        nbrs.entry(e.to).or_default().push(e.from);
    }
    let mut queue: VecDeque<VertexId> = alive.iter().copied().filter(|v| val[v] <= 1).collect();
    while let Some(v) = queue.pop_front() {
        if Some(v) == keep || !alive.contains(&v) || val[&v] > 1 {
            continue;
        }
        alive.remove(&v);
        for &w in nbrs.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if w != v && alive.contains(&w) {
                let c = val.get_mut(&w).unwrap();
                *c -= 1;
                if *c <= 1 {
                    queue.push_back(w);
                }
            }
        }
    }
    g.induced(&alive)
}

/// All vertices and edges lying on some reduced closed path; trees vanish.
pub fn core(g: &LabeledGraph) -> LabeledGraph {
    prune(g, None)
}

/// Core of the basepoint component plus the path from the basepoint to it.
pub fn based_core(g: &BasedGraph) -> BasedGraph {
    let comp = g.base_component();
    BasedGraph::new(prune(comp.graph(), Some(g.basepoint())), g.basepoint()).expect("basepoint kept")
}

/// Follows `word` from `start`; `None` once an edge is missing.
pub fn trace_word<A: Action + ?Sized>(target: &A, start: usize, word: &Word) -> Option<usize> {
    word.letters().iter().try_fold(start, |p, l| target.step(p, l.label(), !l.is_inverse()))
}

/// The cover of `R_k` given by a permutation tuple, on vertices `1..=n`.
pub fn schreier_from_perms(t: &PermTuple) -> LabeledGraph {
    let n = t.degree() as VertexId;
    LabeledGraph::from_parts(
        t.rank(),
        1..=n,
        t.perms()
            .iter()
            .enumerate()
            .flat_map(|(j, p)| (0..n).map(move |i| Edge::new(j + 1, i + 1, p.apply(i) + 1))),
    )
}

/// Reads the permutation tuple off a cover; point `i` is `vertex_order[i]`.
pub fn perms_from_cover(g: &LabeledGraph, vertex_order: &[VertexId]) -> Result<PermTuple> {
    if !g.is_cover() {
        return Err(Error::NotACover(format!(
            "{} vertices, {} edges, rank {}",
            g.vertex_count(),
            g.edge_count(),
            g.rank()
        )));
    }
    let sorted: BTreeSet<VertexId> = vertex_order.iter().copied().collect();
    if sorted.len() != vertex_order.len() || sorted.iter().ne(g.vertices().iter()) {
        return Err(Error::InvalidInput("vertex order must list every vertex once".into()));
    }
    let pos: HashMap<VertexId, u32> = vertex_order.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let n = g.vertex_count();
    let mut images = vec![vec![0u32; n]; g.rank()];
    for e in g.edges() {
        images[e.label_index()][pos[&e.from] as usize] = pos[&e.to];
    }
    PermTuple::new(images.into_iter().map(Perm::from_images).collect::<Result<_>>()?)
}

/// `perms_from_cover` with vertices numbered in increasing id order.
pub fn perms_from_cover_sorted(g: &LabeledGraph) -> Result<PermTuple> {
    perms_from_cover(g, g.vertices())
}

/// Component of `(base_a, base_b)` in the fiber product of two precovers over `R_k`.
pub fn pullback(a: &BasedGraph, b: &BasedGraph) -> Result<BasedGraph> {
    pullback_bounded(a, b, usize::MAX)
}

pub(crate) fn pullback_bounded(a: &BasedGraph, b: &BasedGraph, limit: usize) -> Result<BasedGraph> {
    if a.rank() != b.rank() {
        return Err(Error::InvalidInput(format!("ranks differ: {} vs {}", a.rank(), b.rank())));
    }
    let rank = a.rank();
    let aa = a.graph().adjacency()?;
    let ab = b.graph().adjacency()?;
    let start = (aa.position(a.basepoint()).unwrap(), ab.position(b.basepoint()).unwrap());
    let mut ids: HashMap<(usize, usize), VertexId> = HashMap::from([(start, 0)]);
    let mut queue = VecDeque::from([start]);
    let mut edges = Vec::new();
    while let Some((u, v)) = queue.pop_front() {
        let here = ids[&(u, v)];
        for l in 0..rank {
            for forward in [true, false] {
                let (Some(u2), Some(v2)) = (aa.step(u, l, forward), ab.step(v, l, forward)) else { continue };
                let next = ids.len() as VertexId;
                let there = *ids.entry((u2, v2)).or_insert_with(|| {
                    queue.push_back((u2, v2));
                    next
                });
                if ids.len() > limit {
                    return Err(Error::PullbackTooLarge { guard: limit });
                }
                if forward {
                    edges.push(Edge::new(l + 1, here, there));
                }
            }
        }
    }
    let graph = LabeledGraph::from_parts(rank, 0..ids.len() as VertexId, edges);
    BasedGraph::new(graph, 0)
}

/// Degree of a covering map `a_core -> b_core` (which must exist), i.e.
/// `|V(a_core)| / |V(b_core)|`.
pub fn index_ratio(a_core: &LabeledGraph, b_core: &LabeledGraph) -> Result<usize> {
    if b_core.is_empty() || a_core.is_empty() || b_core.components().len() != 1 {
        return Err(Error::NotACoveringPair);
    }
    let plan = MorphismPlan::new(a_core)?;
    let target = Adjacency::new(b_core)?;
    let source = plan.source();
    let rank = source.rank();
    let mut map = vec![usize::MAX; source.len()];
    for c in 0..plan.component_count() {
        let verts = plan.component_vertices(c);
        let found = (0..target.len()).any(|x| {
            plan.extend(c, x, &target, &mut map)
                && verts.iter().all(|&v| {
                    (0..rank).all(|l| {
                        source.out(v, l).is_some() == target.out(map[v], l).is_some()
                            && source.inn(v, l).is_some() == target.inn(map[v], l).is_some()
                    })
                })
        });
        if !found {
            return Err(Error::NotACoveringPair);
        }
    }
    let (na, nb) = (a_core.vertex_count(), b_core.vertex_count());
    if na % nb != 0 {
        return Err(Error::NotACoveringPair);
    }
    Ok(na / nb)
}
