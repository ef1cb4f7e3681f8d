//! Label-preserving maps between precovers, and from precovers into
//! permutation actions. A map out of a connected precover is determined by
//! the image of a single vertex, so maps are found by propagation.

use crate::error::{Error, Result};
use crate::perm::PermTuple;

use super::{LabeledGraph, VertexId};

/// Something edges can be followed in: a precover or a permutation action.
pub trait Action {
    fn points(&self) -> usize;
    /// Follows the `label` (0-based) edge out of `p`, or into `p` backwards.
    fn step(&self, p: usize, label: usize, forward: bool) -> Option<usize>;
}

/// Dense adjacency of a precover, indexed by position in the sorted vertex list.
#[derive(Clone, Debug)]
pub struct Adjacency {
    rank: usize,
    ids: Vec<VertexId>,
    out: Vec<Option<u32>>,
    inn: Vec<Option<u32>>,
}

impl Adjacency {
    pub fn new(g: &LabeledGraph) -> Result<Self> {
        let rank = g.rank();
        let n = g.vertex_count();
        let ids = g.vertices().to_vec();
        let mut out = vec![None; n * rank];
        let mut inn = vec![None; n * rank];
        for e in g.edges() {
            let a = ids.binary_search(&e.from).unwrap();
            let b = ids.binary_search(&e.to).unwrap();
            let l = e.label_index();
            if out[a * rank + l].replace(b as u32).is_some() {
                return Err(Error::NotAPrecover(format!("vertex {} has two outgoing {}-edges", e.from, e.label)));
            }
            if inn[b * rank + l].replace(a as u32).is_some() {
                return Err(Error::NotAPrecover(format!("vertex {} has two incoming {}-edges", e.to, e.label)));
            }
        }
        Ok(Adjacency { rank, ids, out, inn })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, index: usize) -> VertexId {
        self.ids[index]
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn position(&self, id: VertexId) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    #[inline]
    pub fn out(&self, v: usize, label: usize) -> Option<usize> {
        self.out[v * self.rank + label].map(|w| w as usize)
    }

    #[inline]
    pub fn inn(&self, v: usize, label: usize) -> Option<usize> {
        self.inn[v * self.rank + label].map(|w| w as usize)
    }

    /// Number of edge ends at `v` (a loop counts twice).
    pub fn valence(&self, v: usize) -> usize {
        (0..self.rank).map(|l| self.out(v, l).is_some() as usize + self.inn(v, l).is_some() as usize).sum()
    }
}

impl Action for Adjacency {
    fn points(&self) -> usize {
        self.len()
    }

    #[inline]
    fn step(&self, p: usize, label: usize, forward: bool) -> Option<usize> {
        if label >= self.rank {
            return None;
        }
        if forward {
            self.out(p, label)
        } else {
            self.inn(p, label)
        }
    }
}

impl Action for PermTuple {
    fn points(&self) -> usize {
        self.degree()
    }

    #[inline]
    fn step(&self, p: usize, label: usize, forward: bool) -> Option<usize> {
        if label >= self.rank() {
            return None;
        }
        let perm = if forward { self.perm(label) } else { self.inverse_perm(label) };
        Some(perm.apply(p as u32) as usize)
    }
}

#[derive(Clone, Copy, Debug)]
struct Step {
    src: usize,
    label: usize,
    forward: bool,
    dst: usize,
    // dst already has an image when this step runs
    check: bool,
}

/// Per component of a source precover: a root and a sequence of edge
/// traversals, each starting at an already-mapped vertex.
#[derive(Clone, Debug)]
pub struct MorphismPlan {
    source: Adjacency,
    components: Vec<(usize, Vec<Step>)>,
}

impl MorphismPlan {
    pub fn new(source: &LabeledGraph) -> Result<Self> {
        Self::from_adjacency(Adjacency::new(source)?)
    }

    pub fn from_adjacency(source: Adjacency) -> Result<Self> {
        let n = source.len();
        let rank = source.rank;
        let mut seen = vec![false; n];
        let mut handled = vec![false; n * rank];
        let mut components = Vec::new();
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut steps = Vec::new();
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for label in 0..rank {
                    if let Some(w) = source.out(v, label) {
                        if !handled[v * rank + label] {
                            handled[v * rank + label] = true;
                            steps.push(Step { src: v, label, forward: true, dst: w, check: seen[w] });
                            if !seen[w] {
                                seen[w] = true;
                                queue.push_back(w);
                            }
                        }
                    }
                    if let Some(u) = source.inn(v, label) {
                        if !handled[u * rank + label] {
                            handled[u * rank + label] = true;
                            steps.push(Step { src: v, label, forward: false, dst: u, check: seen[u] });
                            if !seen[u] {
                                seen[u] = true;
                                queue.push_back(u);
                            }
                        }
                    }
                }
            }
            components.push((root, steps));
        }
        Ok(MorphismPlan { source, components })
    }

    pub fn source(&self) -> &Adjacency {
        &self.source
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Root (source index) of each component.
    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        self.components.iter().map(|(r, _)| *r)
    }

    /// Index of the component containing source vertex `v`.
    pub fn component_of(&self, v: usize) -> usize {
        self.components
            .iter()
            .position(|(r, steps)| *r == v || steps.iter().any(|s| s.dst == v && !s.check))
            .expect("every vertex lies in a component")
    }

    /// Tries to extend `root -> image` over component `c`, writing into `map`.
    pub fn extend<A: Action + ?Sized>(&self, c: usize, image: usize, target: &A, map: &mut [usize]) -> bool {
        let (root, steps) = &self.components[c];
        map[*root] = image;
        for s in steps {
            let Some(x) = target.step(map[s.src], s.label, s.forward) else { return false };
            if s.check {
                if map[s.dst] != x {
                    return false;
                }
            } else {
                map[s.dst] = x;
            }
        }
        true
    }

    /// Number of valid images for the root of each component.
    pub fn counts_per_component<A: Action + ?Sized>(&self, target: &A) -> Vec<u64> {
        let mut map = vec![usize::MAX; self.source.len()];
        (0..self.components.len())
            .map(|c| (0..target.points()).filter(|&x| self.extend(c, x, target, &mut map)).count() as u64)
            .collect()
    }

    /// Total number of label-preserving maps into `target`.
    pub fn count<A: Action + ?Sized>(&self, target: &A) -> u64 {
        let mut map = vec![usize::MAX; self.source.len()];
        let mut total: u64 = 1;
        for c in 0..self.components.len() {
            let k = (0..target.points()).filter(|&x| self.extend(c, x, target, &mut map)).count() as u64;
            total = total.saturating_mul(k);
            if total == 0 {
                return 0;
            }
        }
        total
    }

    /// Valid maps of one component, each as a full-length vector (other entries unspecified).
    pub fn component_maps<A: Action + ?Sized>(&self, c: usize, target: &A) -> Vec<Vec<usize>> {
        let mut map = vec![usize::MAX; self.source.len()];
        (0..target.points())
            .filter_map(|x| {
                map.iter_mut().for_each(|m| *m = usize::MAX);
                self.extend(c, x, target, &mut map).then(|| map.clone())
            })
            .collect()
    }

    /// Vertices (source indices) of component `c`.
    pub fn component_vertices(&self, c: usize) -> Vec<usize> {
        let (root, steps) = &self.components[c];
        let mut vs = vec![*root];
        vs.extend(steps.iter().filter(|s| !s.check).map(|s| s.dst));
        vs
    }
}

/// Number of label- and orientation-preserving maps `h -> x` between precovers.
pub fn count_morphisms(h: &LabeledGraph, x: &LabeledGraph) -> Result<u64> {
    let plan = MorphismPlan::new(h)?;
    Ok(plan.count(&Adjacency::new(x)?))
}

/// All maps `h -> x`, each as `(source id, target id)` pairs sorted by source id.
pub fn list_morphisms(h: &LabeledGraph, x: &LabeledGraph) -> Result<Vec<Vec<(VertexId, VertexId)>>> {
    let plan = MorphismPlan::new(h)?;
    let target = Adjacency::new(x)?;
    let per_comp: Vec<(Vec<usize>, Vec<Vec<usize>>)> = (0..plan.component_count())
        .map(|c| (plan.component_vertices(c), plan.component_maps(c, &target)))
        .collect();
    let mut out: Vec<Vec<(VertexId, VertexId)>> = vec![Vec::new()];
    for (verts, maps) in &per_comp {
        let mut next = Vec::with_capacity(out.len() * maps.len());
        for partial in &out {
            for m in maps {
                let mut p = partial.clone();
                p.extend(verts.iter().map(|&v| (plan.source.id(v), target.id(m[v]))));
                next.push(p);
            }
        }
        out = next;
    }
    for m in &mut out {
        m.sort_unstable();
    }
    Ok(out)
}
