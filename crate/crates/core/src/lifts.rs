//! Counting maps of a finite graph into a random completion: quotients of
//! `g ⊔ h`, the leading terms of the expectation and variance of the number of
//! lifts, and exact or sampled statistics.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::completion::{enumerate_completions, purpose, trial_rng, Completer};
use crate::error::{Error, Result};
use crate::graph::{count_morphisms, Action, Adjacency, BasedGraph, Edge, Folder, LabeledGraph, MorphismPlan, VertexId};
use crate::perm::PermTuple;

/// Largest `|V(g ⊔ h)|` for quotient enumeration.
pub const QUOTIENT_GUARD: usize = 14;

/// A quotient `K` of `g ⊔ h`. In `g ⊔ h`, `g` keeps its ids and `h` is shifted
/// by `h_offset`; each vertex of `K` carries the least id of its class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientDescriptor {
    pub quotient: LabeledGraph,
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub h_offset: VertexId,
    pub chi_rel: i64,
    pub g_injective: bool,
}

/// Number of label-preserving maps `h -> x`.
pub fn graph_morphisms(h: &LabeledGraph, x: &LabeledGraph) -> Result<u64> {
    if h.rank() != x.rank() {
        return Err(Error::InvalidInput(format!("ranks differ: {} vs {}", h.rank(), x.rank())));
    }
    count_morphisms(h, x)
}

/// Points `p` such that the based graph lifts to the cover with basepoint at `p`.
pub fn fixed_points(t: &PermTuple, h: &BasedGraph) -> Result<u64> {
    Ok(BasedTarget::new(h)?.count(t))
}

/// What is counted per completion: all maps of a graph (`τ`), or basepoint
/// images of a based graph (`fix`).
#[derive(Clone, Debug)]
pub enum LiftTarget {
    Unbased(LabeledGraph),
    Based(BasedGraph),
}

impl LiftTarget {
    pub fn rank(&self) -> usize {
        match self {
            LiftTarget::Unbased(g) => g.rank(),
            LiftTarget::Based(b) => b.rank(),
        }
    }

    fn counter(&self) -> Result<Counter> {
        Ok(match self {
            LiftTarget::Unbased(g) => Counter::Unbased(MorphismPlan::new(g)?),
            LiftTarget::Based(b) => Counter::Based(BasedTarget::new(b)?),
        })
    }
}

struct BasedTarget {
    plan: MorphismPlan,
    component: usize,
}

impl BasedTarget {
    fn new(h: &BasedGraph) -> Result<Self> {
        let comp = h.base_component();
        let plan = MorphismPlan::new(comp.graph())?;
        Ok(BasedTarget { plan, component: 0 })
    }

    fn count<A: Action + ?Sized>(&self, x: &A) -> u64 {
        let mut map = vec![usize::MAX; self.plan.source().len()];
        (0..x.points()).filter(|&p| self.plan.extend(self.component, p, x, &mut map)).count() as u64
    }
}

enum Counter {
    Unbased(MorphismPlan),
    Based(BasedTarget),
}

impl Counter {
    fn count<A: Action + ?Sized>(&self, x: &A) -> u64 {
        match self {
            Counter::Unbased(p) => p.count(x),
            Counter::Based(b) => b.count(x),
        }
    }
}

/// Canonical labels: each index mapped to the least index of its class.
fn partition_key(part: &[usize]) -> Vec<u32> {
    part.iter().map(|&c| c as u32).collect()
}

/// Closure of a partition under folding, given by class labels.
fn close(union: &LabeledGraph, classes: &[u32], extra: Option<(usize, usize)>) -> Vec<usize> {
    let verts = union.vertices();
    let idx = |v: VertexId| verts.binary_search(&v).unwrap();
    let mut folder = Folder::new(verts.len(), union.rank());
    for e in union.edges() {
        folder.add_edge(idx(e.from), e.label_index(), idx(e.to));
    }
    for (i, &c) in classes.iter().enumerate() {
        if c as usize != i {
            folder.merge(i, c as usize);
        }
    }
    if let Some((a, b)) = extra {
        folder.merge(a, b);
    }
    folder.partition()
}

fn descriptor(g: &LabeledGraph, union: &LabeledGraph, h_offset: VertexId, classes: &[u32]) -> QuotientDescriptor {
    let verts = union.vertices();
    let vertex_map: BTreeMap<VertexId, VertexId> =
        verts.iter().zip(classes).map(|(&v, &c)| (v, verts[c as usize])).collect();
    let quotient = LabeledGraph::from_parts(
        union.rank(),
        vertex_map.values().copied(),
        union.edges().iter().map(|e| Edge { label: e.label, from: vertex_map[&e.from], to: vertex_map[&e.to] }),
    );
    let g_injective = g.vertices().iter().all(|&v| vertex_map[&v] == v);
    let chi_rel = quotient.euler_characteristic() - g.euler_characteristic();
    QuotientDescriptor { quotient, vertex_map, h_offset, chi_rel, g_injective }
}

fn check_pair(g: &LabeledGraph, h: &LabeledGraph, guard: usize) -> Result<(LabeledGraph, VertexId)> {
    if g.rank() != h.rank() {
        return Err(Error::InvalidInput(format!("ranks differ: {} vs {}", g.rank(), h.rank())));
    }
    g.check_precover()?;
    h.check_precover()?;
    let vertices = g.vertex_count() + h.vertex_count();
    if vertices > guard {
        return Err(Error::TooManyQuotients { vertices, guard });
    }
    Ok(g.disjoint_union(h))
}

/// All quotients of `g ⊔ h`, counted as maps out of `g ⊔ h` (two quotients are
/// equal when they identify the same vertices).
pub fn enumerate_quotients(g: &LabeledGraph, h: &LabeledGraph) -> Result<Vec<QuotientDescriptor>> {
    enumerate_quotients_with_guard(g, h, QUOTIENT_GUARD)
}

pub fn enumerate_quotients_with_guard(g: &LabeledGraph, h: &LabeledGraph, guard: usize) -> Result<Vec<QuotientDescriptor>> {
    let (union, offset) = check_pair(g, h, guard)?;
    let n = union.vertex_count();
    let start = partition_key(&close(&union, &(0..n as u32).collect::<Vec<_>>(), None));
    let mut seen: HashSet<Vec<u32>> = HashSet::from([start.clone()]);
    let mut stack = vec![start];
    let mut found = Vec::new();
    while let Some(classes) = stack.pop() {
        let reps: Vec<usize> = (0..n).filter(|&i| classes[i] as usize == i).collect();
        for (i, &a) in reps.iter().enumerate() {
            for &b in &reps[i + 1..] {
                let next = partition_key(&close(&union, &classes, Some((a, b))));
                if seen.insert(next.clone()) {
                    stack.push(next);
                }
            }
        }
        found.push(classes);
    }
    found.sort();
    Ok(found.iter().map(|c| descriptor(g, &union, offset, c)).collect())
}

/// `r`: the largest `χ_G(K)` over quotients in which `g` embeds, and the
/// quotients attaining it.
pub fn relative_rank(g: &LabeledGraph, h: &LabeledGraph) -> Result<(i64, Vec<QuotientDescriptor>)> {
    let quotients = enumerate_quotients(g, h)?;
    let r = quotients.iter().filter(|q| q.g_injective).map(|q| q.chi_rel).max().expect("the trivial quotient");
    let critical = quotients.into_iter().filter(|q| q.g_injective && q.chi_rel == r).collect();
    Ok((r, critical))
}

/// `coefficient · n^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LeadingTerm {
    pub coefficient: i64,
    pub exponent: i64,
}

impl LeadingTerm {
    pub fn value_at(&self, n: f64) -> f64 {
        self.coefficient as f64 * n.powi(self.exponent as i32)
    }
}

/// Leading term of `E(τ_{h -> completion of g})`: one `n^r` per critical graph.
pub fn expected_lifts_leading(g: &LabeledGraph, h: &LabeledGraph) -> Result<LeadingTerm> {
    let (r, critical) = relative_rank(g, h)?;
    Ok(LeadingTerm { coefficient: critical.len() as i64, exponent: r })
}

/// Leading term of `Var(τ) = E(τ_{h ⊔ h}) - E(τ_h)^2`. When the orders match
/// and the coefficients cancel, the coefficient is 0 at that order (the true
/// leading term is then of lower order).
pub fn variance_leading(g: &LabeledGraph, h: &LabeledGraph) -> Result<LeadingTerm> {
    let single = expected_lifts_leading(g, h)?;
    let double = expected_lifts_leading(g, &h.repeated(2))?;
    if double.exponent == 2 * single.exponent {
        Ok(LeadingTerm { coefficient: double.coefficient - single.coefficient.pow(2), exponent: double.exponent })
    } else {
        Ok(double)
    }
}

/// Injective maps `k -> x` fixing each vertex in `fixed` (ids shared by `k` and `x`).
pub fn injective_extensions(k: &LabeledGraph, fixed: &[VertexId], x: &LabeledGraph) -> Result<u64> {
    let plan = MorphismPlan::new(k)?;
    let target = Adjacency::new(x)?;
    let source = plan.source();
    let mut pinned = vec![None; source.len()];
    for &v in fixed {
        let (Some(s), Some(t)) = (source.position(v), target.position(v)) else {
            return Err(Error::InvalidInput(format!("fixed vertex {v} missing")));
        };
        pinned[s] = Some(t);
    }
    let options: Vec<(Vec<usize>, Vec<Vec<usize>>)> = (0..plan.component_count())
        .map(|c| {
            let verts = plan.component_vertices(c);
            let maps = plan
                .component_maps(c, &target)
                .into_iter()
                .filter(|m| {
                    let mut used: Vec<usize> = verts.iter().map(|&v| m[v]).collect();
                    used.sort_unstable();
                    used.dedup();
                    used.len() == verts.len() && verts.iter().all(|&v| pinned[v].is_none_or(|t| t == m[v]))
                })
                .map(|m| verts.iter().map(|&v| m[v]).collect())
                .collect();
            (verts, maps)
        })
        .collect();
    fn count(options: &[(Vec<usize>, Vec<Vec<usize>>)], used: &mut Vec<bool>) -> u64 {
        let Some(((_, maps), rest)) = options.split_first() else { return 1 };
        let mut total = 0;
        for m in maps {
            if m.iter().any(|&t| used[t]) {
                continue;
            }
            m.iter().for_each(|&t| used[t] = true);
            total += count(rest, used);
            m.iter().for_each(|&t| used[t] = false);
        }
        total
    }
    Ok(count(&options, &mut vec![false; target.len()]))
}

/// `μ_{K -> x}` for a quotient: 0 unless `g` embeds in `K`.
pub fn quotient_mu(q: &QuotientDescriptor, g: &LabeledGraph, x: &LabeledGraph) -> Result<u64> {
    if !q.g_injective {
        return Ok(0);
    }
    injective_extensions(&q.quotient, g.vertices(), x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftStats {
    pub n: usize,
    pub trials: u64,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub seed: Option<u64>,
}

impl LiftStats {
    pub fn csv_header() -> &'static str {
        "n,trials,mean,variance,std_error,seed"
    }

    pub fn csv_row(&self) -> String {
        let seed = self.seed.map_or(String::new(), |s| s.to_string());
        format!("{},{},{},{},{},{}", self.n, self.trials, self.mean, self.variance, self.std_error, seed)
    }
}

/// Sample mean and (unbiased) variance of `τ` or `fix` over random completions.
pub fn monte_carlo_lift_stats(g: &LabeledGraph, target: &LiftTarget, n: usize, trials: u64, seed: u64) -> Result<LiftStats> {
    if g.rank() != target.rank() {
        return Err(Error::InvalidInput(format!("ranks differ: {} vs {}", g.rank(), target.rank())));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("at least one trial is needed".into()));
    }
    let completer = Completer::new(g, n)?;
    let counter = target.counter()?;
    let (sum, sum_sq) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let tuple = completer.sample(&mut trial_rng(seed, purpose::COMPLETION, t));
            let c = counter.count(&tuple) as u128;
            (c, c * c)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let nt = trials as f64;
    let mean = sum as f64 / nt;
    let variance = if trials > 1 {
        // exact integer numerator: N·Σx² − (Σx)²
        let num = trials as u128 * sum_sq - sum * sum;
        num as f64 / (nt * (nt - 1.0))
    } else {
        0.0
    };
    Ok(LiftStats { n, trials, mean, variance, std_error: (variance / nt).sqrt(), seed: Some(seed) })
}

/// Exact mean and variance over all completions, weighted uniformly.
pub fn exact_lift_stats(g: &LabeledGraph, target: &LiftTarget, n: usize) -> Result<LiftStats> {
    if g.rank() != target.rank() {
        return Err(Error::InvalidInput(format!("ranks differ: {} vs {}", g.rank(), target.rank())));
    }
    let completions = enumerate_completions(g, n)?;
    let counter = target.counter()?;
    let (mut total, mut sum, mut sum_sq) = (0u64, 0u128, 0u128);
    for tuple in completions.tuples() {
        let c = counter.count(&tuple) as u128;
        total += 1;
        sum += c;
        sum_sq += c * c;
    }
    let nt = total as f64;
    let mean = sum as f64 / nt;
    let variance = (total as u128 * sum_sq - sum * sum) as f64 / (nt * nt);
    Ok(LiftStats { n, trials: total, mean, variance, std_error: 0.0, seed: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{core, schreier_from_perms, stallings_graph};
    use crate::word::Word;
    use proptest::prelude::*;

    fn loop_word(k: usize, rank: usize) -> LabeledGraph {
        core(stallings_graph(&[Word::generator(1, rank).pow(k)], rank).unwrap().graph())
    }

    fn core_of(ws: &[&str], rank: usize) -> LabeledGraph {
        let words: Vec<Word> = ws.iter().map(|w| Word::parse(w, rank).unwrap()).collect();
        core(stallings_graph(&words, rank).unwrap().graph())
    }

    fn sigma(k: usize) -> i64 {
        (1..=k).filter(|d| k.is_multiple_of(*d)).count() as i64
    }

    fn divisor_sum(k: usize) -> i64 {
        (1..=k).filter(|d| k.is_multiple_of(*d)).sum::<usize>() as i64
    }

    /// Oracle: every set partition of `g ⊔ h` whose quotient graph is already a precover.
    fn brute_quotients(g: &LabeledGraph, h: &LabeledGraph) -> Vec<Vec<u32>> {
        let (union, _) = g.disjoint_union(h);
        let n = union.vertex_count();
        let verts = union.vertices();
        let mut out = Vec::new();
        let mut rgs = vec![0usize; n];
        fn rec(i: usize, max: usize, rgs: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
            if i == rgs.len() {
                f(rgs);
                return;
            }
            for c in 0..=max + 1 {
                rgs[i] = c;
                rec(i + 1, max.max(c), rgs, f);
            }
        }
        if n == 0 {
            return vec![vec![]];
        }
        let mut visit = |rgs: &[usize]| {
            let label: Vec<VertexId> = rgs.iter().map(|&c| verts[rgs.iter().position(|&x| x == c).unwrap()]).collect();
            let pos = |v: VertexId| verts.binary_search(&v).unwrap();
            let edges: Vec<Edge> = union
                .edges()
                .iter()
                .map(|e| Edge { label: e.label, from: label[pos(e.from)], to: label[pos(e.to)] })
                .collect();
            let k = LabeledGraph::from_parts(union.rank(), label.iter().copied(), edges);
            if k.is_precover() {
                out.push(rgs.iter().map(|&c| rgs.iter().position(|&x| x == c).unwrap() as u32).collect());
            }
        };
        rgs[0] = 0;
        rec(1, 0, &mut rgs, &mut visit);
        out.sort();
        out
    }

    fn enumerated_partitions(g: &LabeledGraph, h: &LabeledGraph) -> Vec<Vec<u32>> {
        let (union, _) = g.disjoint_union(h);
        let verts = union.vertices();
        let mut v: Vec<Vec<u32>> = enumerate_quotients(g, h)
            .unwrap()
            .iter()
            .map(|q| verts.iter().map(|x| verts.binary_search(&q.vertex_map[x]).unwrap() as u32).collect())
            .collect();
        v.sort();
        v
    }

    #[test]
    fn morphism_examples() {
        let a_loop = loop_word(1, 1);
        let three = schreier_from_perms(&PermTuple::from_cycles(3, &[&[&[1, 2, 3]]]).unwrap());
        assert_eq!(graph_morphisms(&a_loop, &three), Ok(0));
        let two = schreier_from_perms(&PermTuple::from_cycles(2, &[&[&[1, 2]]]).unwrap());
        assert_eq!(graph_morphisms(&loop_word(2, 1), &two), Ok(2));
    }

    #[test]
    fn fixed_point_examples() {
        let t = PermTuple::from_cycles(6, &[&[&[1, 2], &[4, 5, 6]]]).unwrap();
        let a2 = stallings_graph(&[Word::parse("aa", 1).unwrap()], 1).unwrap();
        assert_eq!(fixed_points(&t, &a2), Ok(3));
        let a = stallings_graph(&[Word::parse("a", 1).unwrap()], 1).unwrap();
        assert_eq!(fixed_points(&t, &a), Ok(1));
        let rose = BasedGraph::new(LabeledGraph::rose(2), 0).unwrap();
        let t2 = PermTuple::from_cycles(5, &[&[&[1, 2]], &[&[2, 3]]]).unwrap();
        assert_eq!(fixed_points(&t2, &rose), Ok(2));
        // the tail of a based core must lift too
        let conj = stallings_graph(&[Word::parse("baB", 2).unwrap()], 2).unwrap();
        let t3 = PermTuple::from_cycles(3, &[&[&[2, 3]], &[&[1, 2]]]).unwrap();
        let direct = (0..3u32).filter(|&p| t3.apply_word(p, &Word::parse("baB", 2).unwrap()) == p).count() as u64;
        assert_eq!(fixed_points(&t3, &conj), Ok(direct));
    }

    #[test]
    fn quotient_examples() {
        let empty = LabeledGraph::empty(1);
        assert_eq!(enumerate_quotients(&empty, &loop_word(2, 1)).unwrap().len(), 2);
        let dot = LabeledGraph::new(1, vec![0], vec![]).unwrap();
        assert_eq!(enumerate_quotients(&empty, &dot).unwrap().len(), 1);
        let qs = enumerate_quotients(&loop_word(1, 1), &loop_word(1, 1)).unwrap();
        assert_eq!(qs.len(), 2);
        let trivial = &qs.iter().find(|q| q.quotient.vertex_count() == 2).unwrap();
        assert_eq!(trivial.chi_rel, loop_word(1, 1).euler_characteristic());
        let big = LabeledGraph::new(1, (0..15).collect(), vec![]).unwrap();
        assert!(matches!(enumerate_quotients(&empty, &big), Err(Error::TooManyQuotients { .. })));
    }

    #[test]
    fn loop_word_multiplicities() {
        let empty = LabeledGraph::empty(2);
        for k in 1..=4 {
            let h = loop_word(k, 2);
            let single = expected_lifts_leading(&empty, &h).unwrap();
            assert_eq!(single, LeadingTerm { coefficient: sigma(k), exponent: 0 }, "k = {k}");
            let double = expected_lifts_leading(&empty, &h.repeated(2)).unwrap();
            assert_eq!(double.coefficient, sigma(k).pow(2) + divisor_sum(k), "k = {k}");
            assert_eq!(variance_leading(&empty, &h).unwrap(), LeadingTerm { coefficient: divisor_sum(k), exponent: 0 });
        }
    }

    #[test]
    fn leading_examples() {
        let a2 = loop_word(2, 2);
        assert_eq!(expected_lifts_leading(&a2, &a2).unwrap(), LeadingTerm { coefficient: 4, exponent: 0 });
        let comm = core_of(&["abAB"], 2);
        let empty = LabeledGraph::empty(2);
        assert_eq!(expected_lifts_leading(&empty, &comm).unwrap(), LeadingTerm { coefficient: 1, exponent: 0 });
        let (r, critical) = relative_rank(&comm, &comm).unwrap();
        assert_eq!(r, 0);
        // onto the planted copy, or disjoint (the commutator core is a circle)
        assert_eq!(critical.len() as u64, graph_morphisms(&comm, &comm).unwrap() + 1);
        assert_eq!(variance_leading(&comm, &comm).unwrap(), LeadingTerm { coefficient: 1, exponent: 0 });
        // a rank-2 core planted once: variance vanishes to leading order
        let gamma = core_of(&["aab", "abb"], 2);
        assert_eq!(gamma.euler_characteristic(), -1);
        let (r, critical) = relative_rank(&gamma, &gamma).unwrap();
        assert_eq!((r, critical.len() as u64), (0, graph_morphisms(&gamma, &gamma).unwrap()));
        assert_eq!(variance_leading(&gamma, &gamma).unwrap().coefficient, 0);
        assert_eq!(variance_leading(&empty, &loop_word(1, 2)).unwrap(), LeadingTerm { coefficient: 1, exponent: 0 });
    }

    #[test]
    fn quotients_match_brute_force() {
        let cases = [
            (LabeledGraph::empty(1), loop_word(3, 1)),
            (LabeledGraph::empty(2), loop_word(2, 2).repeated(2)),
            (loop_word(2, 2), loop_word(2, 2)),
            (LabeledGraph::empty(2), core_of(&["abAB"], 2)),
            (loop_word(1, 2), core_of(&["ab"], 2)),
            (LabeledGraph::empty(2), LabeledGraph::new(2, vec![0, 1, 2], vec![Edge::new(1, 0, 1)]).unwrap()),
        ];
        for (g, h) in &cases {
            assert_eq!(enumerated_partitions(g, h), brute_quotients(g, h), "g = {g:?}, h = {h:?}");
        }
    }

    #[test]
    fn exact_small_cases() {
        let empty = LabeledGraph::empty(1);
        let a2 = LiftTarget::Unbased(loop_word(2, 1));
        let s = exact_lift_stats(&empty, &a2, 3).unwrap();
        assert_eq!((s.trials, s.mean, s.variance), (6, 2.0, 2.0));
        let a1 = LiftTarget::Unbased(loop_word(1, 1));
        assert_eq!(exact_lift_stats(&empty, &a1, 6).unwrap().mean, 1.0);
    }

    #[test]
    fn total_equals_sum_over_quotients() {
        let pairs = [
            (LabeledGraph::empty(2), loop_word(2, 2)),
            (loop_word(2, 2), loop_word(2, 2)),
            (core_of(&["abAB"], 2), loop_word(1, 2)),
            (LabeledGraph::new(2, vec![0, 1], vec![Edge::new(2, 0, 1)]).unwrap(), core_of(&["ab"], 2)),
        ];
        for (g, h) in &pairs {
            let quotients = enumerate_quotients(g, h).unwrap();
            for n in g.vertex_count().max(1)..=4 {
                for c in enumerate_completions(g, n).unwrap() {
                    let tau = graph_morphisms(h, &c.cover).unwrap();
                    let mu: u64 = quotients.iter().map(|q| quotient_mu(q, g, &c.cover).unwrap()).sum();
                    assert_eq!(tau, mu, "n = {n}, cover {:?}", c.cover);
                }
            }
        }
    }

    #[test]
    fn monte_carlo_is_reproducible_and_close() {
        let empty = LabeledGraph::empty(2);
        let h = LiftTarget::Unbased(loop_word(2, 2));
        let a = monte_carlo_lift_stats(&empty, &h, 50, 4000, 11).unwrap();
        let b = monte_carlo_lift_stats(&empty, &h, 50, 4000, 11).unwrap();
        assert_eq!(a, b);
        assert!((a.mean - 2.0).abs() <= 4.0 * a.std_error, "{a:?}");
        assert_eq!(a.csv_row().split(',').count(), LiftStats::csv_header().split(',').count());
    }

    fn arb_tuple() -> impl Strategy<Value = PermTuple> {
        (1usize..7, any::<u64>()).prop_map(|(n, seed)| PermTuple::random(n, 2, &mut trial_rng(seed, purpose::TUPLE, 0)))
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        prop::collection::vec((1usize..=2, any::<bool>()), 0..6).prop_map(|l| {
            Word::from_letters(l.into_iter().map(|(g, i)| crate::word::Letter::new(g, i)).collect(), 2)
                .unwrap()
                .free_reduce()
        })
    }

    proptest! {
        #[test]
        fn fix_is_monotone(t in arb_tuple(), w1 in arb_word(), w2 in arb_word()) {
            // <w1> ⊆ <w1, w2>
            let small = stallings_graph(std::slice::from_ref(&w1), 2).unwrap();
            let big = stallings_graph(&[w1, w2], 2).unwrap();
            prop_assert!(fixed_points(&t, &small).unwrap() >= fixed_points(&t, &big).unwrap());
        }

        #[test]
        fn fix_counts_common_fixed_points(t in arb_tuple(), w1 in arb_word(), w2 in arb_word()) {
            let h = stallings_graph(&[w1.clone(), w2.clone()], 2).unwrap();
            let direct = t.common_fixed_points(&[w1, w2]).len() as u64;
            prop_assert_eq!(fixed_points(&t, &h).unwrap(), direct);
        }

        #[test]
        fn core_lifts_are_conjugation_invariant(t in arb_tuple(), w in arb_word(), c in arb_word()) {
            let conj = c.concat(&w).concat(&c.inverse()).free_reduce();
            let h1 = core(stallings_graph(&[w], 2).unwrap().graph());
            let h2 = core(stallings_graph(&[conj], 2).unwrap().graph());
            let x = schreier_from_perms(&t);
            prop_assert_eq!(graph_morphisms(&h1, &x).unwrap(), graph_morphisms(&h2, &x).unwrap());
        }
    }
}
