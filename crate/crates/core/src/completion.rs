//! Completing a precover to a degree-`n` cover of the rose, at random or
//! exhaustively, and padding a precover so every label has as many edges.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{schreier_from_perms, Edge, LabeledGraph, VertexId};
use crate::perm::{Perm, PermTuple};

/// Largest number of completions `enumerate_completions` will walk.
pub const COMPLETION_GUARD: u64 = 10_000_000;

/// Stream selectors for `trial_rng`, so different uses of one seed never share draws.
pub mod purpose {
    pub const COMPLETION: u64 = 0x636f_6d70_6c65_7465;
    pub const RECOGNITION: u64 = 0x7265_636f_676e_697a;
    pub const TUPLE: u64 = 0x7475_706c_6573_0000;
}

/// Generator for trial `trial` of an experiment seeded with `seed`.
pub fn trial_rng(seed: u64, purpose: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ purpose);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletionSpec {
    pub condition: LabeledGraph,
    pub n: usize,
    pub seed: u64,
}

impl CompletionSpec {
    pub fn new(condition: LabeledGraph, n: usize, seed: u64) -> Result<Self> {
        condition.check_precover()?;
        if condition.vertex_count() > n {
            return Err(Error::ConditionTooLarge { vertices: condition.vertex_count(), n });
        }
        Ok(CompletionSpec { condition, n, seed })
    }
}

/// Precomputed slots of a condition padded to `n` vertices.
///
/// Points of the sampled tuples are the padded vertex ids in increasing order;
/// padding ids start right after the largest condition id.
#[derive(Clone, Debug)]
pub struct Completer {
    rank: usize,
    ids: Vec<VertexId>,
    base: Vec<Vec<u32>>,
    // per label: points lacking an out-edge and points lacking an in-edge, both sorted
    no: Vec<Vec<u32>>,
    ni: Vec<Vec<u32>>,
}

const MISSING: u32 = u32::MAX;

impl Completer {
    pub fn new(condition: &LabeledGraph, n: usize) -> Result<Self> {
        condition.check_precover()?;
        if condition.vertex_count() > n {
            return Err(Error::ConditionTooLarge { vertices: condition.vertex_count(), n });
        }
        let rank = condition.rank();
        let first_pad = condition.max_id().map_or(0, |m| m + 1);
        let mut ids = condition.vertices().to_vec();
        ids.extend((0..(n - condition.vertex_count()) as VertexId).map(|i| first_pad + i));
        let pos = |v: VertexId| ids.binary_search(&v).unwrap() as u32;
        let mut base = vec![vec![MISSING; n]; rank];
        let mut has_in = vec![vec![false; n]; rank];
        for e in condition.edges() {
            let (a, b) = (pos(e.from), pos(e.to));
            base[e.label_index()][a as usize] = b;
            has_in[e.label_index()][b as usize] = true;
        }
        let no = base.iter().map(|row| (0..n as u32).filter(|&i| row[i as usize] == MISSING).collect()).collect();
        let ni = has_in.iter().map(|row| (0..n as u32).filter(|&i| !row[i as usize]).collect()).collect();
        Ok(Completer { rank, ids, base, no, ni })
    }

    pub fn degree(&self) -> usize {
        self.ids.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Vertex id of each tuple point.
    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    /// `Π_j |V_j^no|!` as a float (it overflows integers quickly).
    pub fn completion_count(&self) -> f64 {
        self.no.iter().map(|s| (1..=s.len()).map(|i| i as f64).product::<f64>()).product()
    }

    fn fill(&self, label: usize, targets: &[u32]) -> Perm {
        let mut images = self.base[label].clone();
        for (&s, &t) in self.no[label].iter().zip(targets) {
            images[s as usize] = t;
        }
        Perm::from_images(images).expect("a completion is a bijection")
    }

    fn tuple(&self, perms: Vec<Perm>) -> PermTuple {
        PermTuple::new(perms).expect("equal degrees")
    }

    /// One uniform completion, as a tuple.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> PermTuple {
        let perms = (0..self.rank)
            .map(|j| {
                let mut targets = self.ni[j].clone();
                targets.shuffle(rng);
                self.fill(j, &targets)
            })
            .collect();
        self.tuple(perms)
    }

    /// The cover graph of a tuple, with this completer's vertex ids.
    pub fn cover(&self, tuple: &PermTuple) -> LabeledGraph {
        schreier_from_perms(tuple).relabeled(|v| self.ids[v as usize - 1])
    }
}

/// Completion number `trial` of `spec`: the cover and its tuple.
pub fn random_completion(spec: &CompletionSpec, trial: u64) -> Result<(LabeledGraph, PermTuple)> {
    let c = Completer::new(&spec.condition, spec.n)?;
    let tuple = c.sample(&mut trial_rng(spec.seed, purpose::COMPLETION, trial));
    Ok((c.cover(&tuple), tuple))
}

#[derive(Clone, Debug)]
pub struct WeightedCompletion {
    pub cover: LabeledGraph,
    pub tuple: PermTuple,
    pub weight: f64,
}

/// Every completion of `condition` to degree `n`, each once, with weight
/// `1 / Π_j |V_j^no|!`.
pub fn enumerate_completions(condition: &LabeledGraph, n: usize) -> Result<Completions> {
    let completer = Completer::new(condition, n)?;
    let count = completer.completion_count();
    if count > COMPLETION_GUARD as f64 {
        return Err(Error::TooManyCompletions { count, guard: COMPLETION_GUARD });
    }
    let state = completer.ni.to_vec();
    Ok(Completions { completer, state: Some(state), weight: 1.0 / count })
}

pub struct Completions {
    completer: Completer,
    // per label, the current arrangement of the missing targets
    state: Option<Vec<Vec<u32>>>,
    weight: f64,
}

impl Completions {
    pub fn completer(&self) -> &Completer {
        &self.completer
    }

    pub fn len_hint(&self) -> f64 {
        self.completer.completion_count()
    }

    /// Tuples only, skipping graph construction.
    pub fn tuples(self) -> impl Iterator<Item = PermTuple> {
        let mut it = self;
        std::iter::from_fn(move || it.next_tuple())
    }

    fn next_tuple(&mut self) -> Option<PermTuple> {
        let state = self.state.as_mut()?;
        let perms = state.iter().enumerate().map(|(j, t)| self.completer.fill(j, t)).collect();
        let tuple = self.completer.tuple(perms);
        let mut advanced = false;
        for t in state.iter_mut() {
            if next_permutation(t) {
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.state = None;
        }
        Some(tuple)
    }
}

impl Iterator for Completions {
    type Item = WeightedCompletion;

    fn next(&mut self) -> Option<WeightedCompletion> {
        let tuple = self.next_tuple()?;
        Some(WeightedCompletion { cover: self.completer.cover(&tuple), tuple, weight: self.weight })
    }
}

/// Advances to the next lexicographic arrangement; on the last one, wraps to
/// the first and returns false.
fn next_permutation(v: &mut [u32]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        v.reverse();
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Adds edges to fresh leaves until, in every component, all labels occur
/// equally often.
pub fn equalize_labels(g: &LabeledGraph) -> Result<LabeledGraph> {
    g.check_precover()?;
    let rank = g.rank();
    let mut vertices = g.vertices().to_vec();
    let mut edges = g.edges().to_vec();
    let mut next = g.max_id().map_or(0, |m| m + 1);
    for comp in g.components() {
        let mut has_out: std::collections::BTreeMap<VertexId, Vec<bool>> =
            comp.iter().map(|&v| (v, vec![false; rank])).collect();
        let mut counts = vec![0usize; rank];
        for e in g.edges() {
            if let Some(slots) = has_out.get_mut(&e.from) {
                counts[e.label_index()] += 1;
                slots[e.label_index()] = true;
            }
        }
        let max = counts.iter().copied().max().unwrap_or(0);
        for j in 0..rank {
            while counts[j] < max {
                let (&v, slots) = has_out.iter_mut().find(|(_, s)| !s[j]).expect("fewer j-edges than vertices");
                slots[j] = true;
                edges.push(Edge::new(j + 1, v, next));
                vertices.push(next);
                has_out.insert(next, vec![false; rank]);
                next += 1;
                counts[j] += 1;
            }
        }
    }
    LabeledGraph::new(rank, vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{core, stallings_graph};
    use crate::word::Word;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn commutator_core() -> LabeledGraph {
        core(stallings_graph(&[Word::parse("abAB", 2).unwrap()], 2).unwrap().graph())
    }

    #[test]
    fn empty_condition_gives_uniform_tuples() {
        let spec = CompletionSpec::new(LabeledGraph::empty(2), 5, 7).unwrap();
        let (cover, tuple) = random_completion(&spec, 0).unwrap();
        assert!(cover.is_cover());
        assert_eq!(tuple.degree(), 5);
        assert_eq!(cover.vertices(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn full_cover_is_reproduced() {
        let t = PermTuple::from_cycles(3, &[&[&[1, 2, 3]], &[&[1, 2]]]).unwrap();
        let g = schreier_from_perms(&t);
        for trial in 0..5 {
            let (cover, tuple) = random_completion(&CompletionSpec::new(g.clone(), 3, trial).unwrap(), trial).unwrap();
            assert_eq!(cover, g);
            assert_eq!(tuple, t);
        }
    }

    #[test]
    fn forced_bijection() {
        let g = LabeledGraph::new(1, vec![0, 1], vec![Edge::new(1, 0, 1)]).unwrap();
        let (cover, _) = random_completion(&CompletionSpec::new(g, 2, 3).unwrap(), 0).unwrap();
        assert_eq!(cover.edges(), &[Edge::new(1, 0, 1), Edge::new(1, 1, 0)]);
    }

    #[test]
    fn spec_validation() {
        let g = LabeledGraph::new(1, vec![0, 1, 2], vec![]).unwrap();
        assert_eq!(CompletionSpec::new(g, 2, 0), Err(Error::ConditionTooLarge { vertices: 3, n: 2 }));
        let bad = LabeledGraph::new(1, vec![0, 1, 2], vec![Edge::new(1, 0, 1), Edge::new(1, 0, 2)]).unwrap();
        assert!(matches!(CompletionSpec::new(bad, 4, 0), Err(Error::NotAPrecover(_))));
    }

    #[test]
    fn padding_ids_follow_condition() {
        let g = LabeledGraph::new(1, vec![3, 8], vec![Edge::new(1, 3, 8)]).unwrap();
        let c = Completer::new(&g, 4).unwrap();
        assert_eq!(c.ids(), &[3, 8, 9, 10]);
    }

    #[test]
    fn reproducible_per_trial() {
        let spec = CompletionSpec::new(commutator_core(), 20, 99).unwrap();
        let a: Vec<_> = (0..10).map(|t| random_completion(&spec, t).unwrap().1).collect();
        let b: Vec<_> = (0..10).rev().map(|t| random_completion(&spec, t).unwrap().1).collect();
        assert!(a.iter().eq(b.iter().rev()));
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_completions(&LabeledGraph::empty(1), 3).unwrap().count(), 6);
        assert_eq!(enumerate_completions(&LabeledGraph::empty(2), 3).unwrap().count(), 36);
        let loop_ = LabeledGraph::new(1, vec![0], vec![Edge::new(1, 0, 0)]).unwrap();
        let all: Vec<_> = enumerate_completions(&loop_, 3).unwrap().collect();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|c| (c.weight - 0.5).abs() < 1e-15));
        assert!(matches!(
            enumerate_completions(&LabeledGraph::empty(2), 11),
            Err(Error::TooManyCompletions { .. })
        ));
    }

    /// Oracle: all tuples in `S_n^k`, kept when they extend the condition.
    fn brute_completions(cond: &LabeledGraph, n: usize) -> Vec<PermTuple> {
        let c = Completer::new(cond, n).unwrap();
        let all_perms: Vec<Perm> = {
            let mut v: Vec<u32> = (0..n as u32).collect();
            let mut out = vec![Perm::from_images(v.clone()).unwrap()];
            while next_permutation(&mut v) {
                out.push(Perm::from_images(v.clone()).unwrap());
            }
            out
        };
        let mut tuples: Vec<Vec<Perm>> = vec![vec![]];
        for _ in 0..cond.rank() {
            tuples = tuples
                .into_iter()
                .flat_map(|t| all_perms.iter().map(move |p| [t.clone(), vec![p.clone()]].concat()))
                .collect();
        }
        let pos = |v: VertexId| c.ids().binary_search(&v).unwrap() as u32;
        tuples
            .into_iter()
            .map(|t| PermTuple::new(t).unwrap())
            .filter(|t| cond.edges().iter().all(|e| t.perm(e.label_index()).apply(pos(e.from)) == pos(e.to)))
            .collect()
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let conds = [
            LabeledGraph::empty(2),
            LabeledGraph::new(2, vec![0, 1], vec![Edge::new(1, 0, 1)]).unwrap(),
            LabeledGraph::new(2, vec![0, 1, 2], vec![Edge::new(1, 0, 1), Edge::new(2, 1, 2), Edge::new(1, 2, 2)])
                .unwrap(),
            commutator_core(),
        ];
        for cond in &conds {
            for n in cond.vertex_count().max(1)..=4 {
                let mut got: Vec<PermTuple> = enumerate_completions(cond, n).unwrap().map(|c| c.tuple).collect();
                let mut want = brute_completions(cond, n);
                let key = |t: &PermTuple| t.perms().to_vec();
                got.sort_by_key(key);
                want.sort_by_key(key);
                assert_eq!(got, want, "condition {cond:?}, n = {n}");
            }
        }
    }

    #[test]
    fn sampling_matches_enumeration() {
        let cond = LabeledGraph::new(2, vec![0, 1], vec![Edge::new(1, 0, 1)]).unwrap();
        let n = 3;
        let outcomes: Vec<PermTuple> = enumerate_completions(&cond, n).unwrap().map(|c| c.tuple).collect();
        let p = 1.0 / outcomes.len() as f64;
        let c = Completer::new(&cond, n).unwrap();
        let samples = 100_000u64;
        let mut freq: HashMap<Vec<Perm>, u64> = HashMap::new();
        for t in 0..samples {
            let tuple = c.sample(&mut trial_rng(5, purpose::COMPLETION, t));
            *freq.entry(tuple.perms().to_vec()).or_default() += 1;
        }
        assert_eq!(freq.len(), outcomes.len());
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        for o in &outcomes {
            let f = freq[&o.perms().to_vec()] as f64 / samples as f64;
            assert!((f - p).abs() <= 3.0 * se, "outcome {o:?}: {f} vs {p}");
        }
    }

    #[test]
    fn equalize_examples() {
        let loop_ = LabeledGraph::new(2, vec![0], vec![Edge::new(1, 0, 0)]).unwrap();
        let eq = equalize_labels(&loop_).unwrap();
        assert_eq!(eq.edges(), &[Edge::new(1, 0, 0), Edge::new(2, 0, 1)]);
        assert_eq!(equalize_labels(&commutator_core()).unwrap(), commutator_core());
        assert_eq!(equalize_labels(&LabeledGraph::empty(2)).unwrap(), LabeledGraph::empty(2));
    }

    fn arb_precover() -> impl Strategy<Value = LabeledGraph> {
        (1usize..4, 1u32..7, any::<u64>()).prop_map(|(rank, n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for label in 1..=rank {
                let mut targets: Vec<u32> = (0..n).collect();
                targets.shuffle(&mut rng);
                for (from, &to) in targets.iter().enumerate() {
                    if rand::Rng::gen_bool(&mut rng, 0.5) {
                        edges.push(Edge::new(label, from as u32, to));
                    }
                }
            }
            LabeledGraph::new(rank, (0..n).collect(), edges).unwrap()
        })
    }

    proptest! {
        #[test]
        fn completion_contains_condition(g in arb_precover(), extra in 0usize..5, seed in any::<u64>(), trial in 0u64..100) {
            let spec = CompletionSpec::new(g.clone(), g.vertex_count() + extra, seed).unwrap();
            let (cover, tuple) = random_completion(&spec, trial).unwrap();
            prop_assert!(cover.is_cover());
            prop_assert_eq!(cover.vertex_count(), spec.n);
            let restricted = cover.induced(&g.vertices().iter().copied().collect());
            let mut cond_edges: Vec<Edge> = g.edges().to_vec();
            cond_edges.sort();
            let kept: Vec<Edge> = restricted.edges().iter().copied().filter(|e| g.edges().contains(e)).collect();
            prop_assert_eq!(kept, cond_edges);
            prop_assert_eq!(crate::graph::perms_from_cover_sorted(&cover).unwrap(), tuple);
        }

        #[test]
        fn equalize_balances_and_keeps_rank(g in arb_precover()) {
            let eq = equalize_labels(&g).unwrap();
            prop_assert!(eq.is_precover());
            prop_assert_eq!(eq.components().len(), g.components().len());
            for comp in eq.components() {
                let set: std::collections::BTreeSet<_> = comp.iter().copied().collect();
                let sub = eq.induced(&set);
                let counts: Vec<usize> = (1..=eq.rank()).map(|j| sub.label_count(j)).collect();
                prop_assert!(counts.iter().all(|&c| c == counts[0]));
            }
            // leaves added on trees keep the Euler characteristic per component
            prop_assert_eq!(eq.euler_characteristic(), g.euler_characteristic());
            prop_assert_eq!(core(&eq), core(&g));
        }
    }
}
