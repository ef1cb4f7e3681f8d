//! Finite quotients separating subgroups of a free group: membership, the
//! conjugacy-into preorder, index-`p` subgroups and their intersections, and
//! certificates that re-verify by evaluating permutations.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::completion::{purpose, trial_rng, Completer};
use crate::error::{Error, Result};
use crate::graph::{
    based_core, core, count_morphisms, fold_with_map, index_ratio, path_edges, pullback_bounded, stallings_graph, trace_word,
    Adjacency, BasedGraph, Edge, LabeledGraph, VertexId,
};
use crate::lifts::fixed_points;
use crate::perm::{Perm, PermTuple};
use crate::recognition::{classify, is_prime, Classification, Verdict, DEFAULT_BUDGET};
use crate::word::{Letter, Word};

/// Vertex limit for iterated pullbacks.
pub const PULLBACK_GUARD: usize = 5000;
/// Limit on `(p!)^r` actions walked by `index_p_subgroups`.
pub const ACTION_GUARD: f64 = 1e6;
pub const MAX_PRIME: u32 = 5;
pub const BRUTE_FORCE_MAX_DEGREE: usize = 8;

/// A finitely generated subgroup, by generators and Stallings graphs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupSpec {
    pub generators: Vec<Word>,
    pub based_core: BasedGraph,
    pub core: LabeledGraph,
    pub rank_of_subgroup: i64,
}

impl SubgroupSpec {
    pub fn new(generators: Vec<Word>, rank: usize) -> Result<Self> {
        let based = based_core(&stallings_graph(&generators, rank)?).normalized();
        let mut spec = Self::from_based_core(based);
        spec.generators = generators;
        Ok(spec)
    }

    pub fn parse(words: &[&str], rank: usize) -> Result<Self> {
        Self::new(words.iter().map(|w| Word::parse(w, rank)).collect::<Result<_>>()?, rank)
    }

    /// Reads a free basis off a based core: one word per edge outside a
    /// breadth-first spanning tree.
    pub fn from_based_core(based: BasedGraph) -> Self {
        let g = based.graph();
        let rank = g.rank();
        let mut path: BTreeMap<VertexId, Vec<Letter>> = BTreeMap::from([(based.basepoint(), Vec::new())]);
        let mut tree: HashSet<Edge> = HashSet::new();
        let mut queue = VecDeque::from([based.basepoint()]);
        while let Some(v) = queue.pop_front() {
            for e in g.edges() {
                let (w, letter) = if e.from == v {
                    (e.to, Letter::new(e.label as usize, false))
                } else if e.to == v {
                    (e.from, Letter::new(e.label as usize, true))
                } else {
                    continue;
                };
                if !path.contains_key(&w) {
                    let mut p = path[&v].clone();
                    p.push(letter);
                    path.insert(w, p);
                    tree.insert(*e);
                    queue.push_back(w);
                }
            }
        }
        let generators = g
            .edges()
            .iter()
            .filter(|e| !tree.contains(e))
            .map(|e| {
                let mut letters = path[&e.from].clone();
                letters.push(Letter::new(e.label as usize, false));
                letters.extend(path[&e.to].iter().rev().map(|l| l.inverse()));
                Word::from_letters(letters, rank).expect("letters within rank").free_reduce()
            })
            .collect();
        let c = core(g);
        SubgroupSpec { generators, rank_of_subgroup: 1 - g.euler_characteristic(), core: c, based_core: based }
    }

    pub fn rank(&self) -> usize {
        self.based_core.rank()
    }

    pub fn is_trivial(&self) -> bool {
        self.based_core.graph().edge_count() == 0
    }

    /// Finite index in `F_k` iff the core is a whole cover of the rose.
    pub fn is_finite_index(&self) -> bool {
        !self.core.is_empty() && self.core.is_cover()
    }

    /// `w ∈ H` iff `w` reads a closed path at the basepoint of the based core.
    pub fn contains(&self, w: &Word) -> bool {
        let adj = self.based_core.graph().adjacency().expect("a based core is a precover");
        let b = adj.position(self.based_core.basepoint()).unwrap();
        trace_word(&adj, b, &w.free_reduce()) == Some(b)
    }

    pub fn contains_subgroup(&self, other: &SubgroupSpec) -> bool {
        other.generators.iter().all(|w| self.contains(w))
    }
}

/// Some conjugate of `h1` lies in `h2`, decided by a map `Core(h1) -> Core(h2)`.
pub fn is_conjugate_into(h1: &SubgroupSpec, h2: &SubgroupSpec) -> bool {
    h1.is_trivial() || count_morphisms(&h1.core, &h2.core).map(|c| c > 0).unwrap_or(false)
}

fn check_prime(p: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > MAX_PRIME {
        return Err(Error::PrimeTooLarge { p, reason: format!("primes above {MAX_PRIME} are not enumerated") });
    }
    Ok(())
}

/// Every subgroup of index `p` in `h`, as stabilizers of a point in the
/// transitive degree-`p` actions of `h`'s free basis.
pub fn index_p_subgroups(h: &SubgroupSpec, p: u32) -> Result<Vec<SubgroupSpec>> {
    check_prime(p)?;
    let based = &h.based_core;
    let g = based.graph();
    let r = h.rank_of_subgroup.max(0) as u32;
    let actions = (1..=p as u64).product::<u64>() as f64;
    if actions.powi(r as i32) > ACTION_GUARD {
        return Err(Error::PrimeTooLarge { p, reason: format!("{actions}^{r} actions exceed {ACTION_GUARD}") });
    }
    if r == 0 {
        return Ok(Vec::new());
    }
    // spanning tree from the basepoint; the other edges carry the action
    let mut reached: BTreeSet<VertexId> = BTreeSet::from([based.basepoint()]);
    let mut tree: HashSet<Edge> = HashSet::new();
    let mut queue = VecDeque::from([based.basepoint()]);
    while let Some(v) = queue.pop_front() {
        for e in g.edges() {
            let w = if e.from == v { e.to } else if e.to == v { e.from } else { continue };
            if reached.insert(w) {
                tree.insert(*e);
                queue.push_back(w);
            }
        }
    }
    let free: Vec<Edge> = g.edges().iter().copied().filter(|e| !tree.contains(e)).collect();
    let all = all_perms(p as usize);
    let nv = g.vertex_count() as u32;
    let pos = |v: VertexId| g.vertices().binary_search(&v).unwrap() as u32;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut choice = vec![0usize; free.len()];
    loop {
        let perms: Vec<&Perm> = choice.iter().map(|&c| &all[c]).collect();
        if transitive(&perms, p as usize) {
            let id = |v: VertexId, s: u32| s * nv + pos(v);
            let mut edges = Vec::new();
            for e in g.edges() {
                let sigma = free.iter().position(|f| f == e).map(|i| perms[i]);
                for s in 0..p {
                    let t = sigma.map_or(s, |sg| sg.apply(s));
                    edges.push(Edge { label: e.label, from: id(e.from, s), to: id(e.to, t) });
                }
            }
            let cover = LabeledGraph::new(g.rank(), (0..nv * p).collect(), edges)?;
            let sub = based_core(&BasedGraph::new(cover, id(based.basepoint(), 0))?).normalized();
            if seen.insert(sub.canonical_code()) {
                out.push(SubgroupSpec::from_based_core(sub));
            }
        }
        let Some(i) = choice.iter().position(|&c| c + 1 < all.len()) else { break };
        choice[i] += 1;
        choice[..i].iter_mut().for_each(|c| *c = 0);
    }
    Ok(out)
}

fn all_perms(p: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut v: Vec<u32> = (0..p as u32).collect();
    loop {
        out.push(Perm::from_images(v.clone()).expect("a permutation"));
        let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else { break };
        let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
        v.swap(i - 1, j);
        v[i..].reverse();
    }
    out
}

fn transitive(perms: &[&Perm], p: usize) -> bool {
    let mut seen = vec![false; p];
    seen[0] = true;
    let mut stack = vec![0u32];
    while let Some(x) = stack.pop() {
        for s in perms {
            for y in [s.apply(x), s.inverse().apply(x)] {
                if !std::mem::replace(&mut seen[y as usize], true) {
                    stack.push(y);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Intersection of all index-`p` subgroups of `h`, by iterated pullback.
pub fn characteristic_intersection(h: &SubgroupSpec, p: u32) -> Result<SubgroupSpec> {
    let subs = index_p_subgroups(h, p)?;
    let mut acc = h.based_core.clone();
    for s in &subs {
        acc = based_core(&pullback_bounded(&acc, &s.based_core, PULLBACK_GUARD)?).normalized();
    }
    Ok(SubgroupSpec::from_based_core(acc))
}

/// Degree of `Core(sub) -> Core(sup)`, i.e. `[sup : sub]` for `sub` of finite index in `sup`.
pub fn relative_index(sub: &SubgroupSpec, sup: &SubgroupSpec) -> Result<usize> {
    index_ratio(&sub.core, &sup.core).map_err(|_| Error::NotFiniteIndex)
}

/// Whether every divisor `d > 1` of `[h1 : g]` exceeds `|V(Core(h2))|`. When it
/// does, `h1 ⊆ h2` follows.
pub fn lemma_subgroup_lifting_check(h1: &SubgroupSpec, h2: &SubgroupSpec, g: &SubgroupSpec) -> Result<bool> {
    if !h1.contains_subgroup(g) || !h2.contains_subgroup(g) {
        return Err(Error::InvalidInput("g must lie in both subgroups".into()));
    }
    let index = relative_index(g, h1)?;
    let bound = h2.core.vertex_count();
    Ok((2..=index).filter(|d| index % d == 0).all(|d| d > bound))
}

/// Whether some conjugate of `⟨a_gens⟩` lies in `⟨b_gens⟩` inside `S_m`.
pub fn brute_force_conjugate_into(a_gens: &[Perm], b_gens: &[Perm], m: usize) -> Result<bool> {
    if m > BRUTE_FORCE_MAX_DEGREE {
        return Err(Error::DegreeTooLarge { m, limit: BRUTE_FORCE_MAX_DEGREE });
    }
    if a_gens.iter().chain(b_gens).any(|g| g.degree() != m) {
        return Err(Error::InvalidInput(format!("permutations must have degree {m}")));
    }
    let id = Perm::identity(m);
    let mut group: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for s in b_gens {
            let y = x.then(s);
            if group.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    Ok(all_perms(m).iter().any(|sigma| {
        let inv = sigma.inverse();
        a_gens.iter().all(|a| group.contains(&inv.then(a).then(sigma)))
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CertificateKind {
    Membership,
    ConjugacyInto,
}

/// Which fixed-point counts separate a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Subgroup,
    Characteristic,
}

/// `fix(f(X_i)) < fix(f(X_j))` with `X` the subgroups or their characteristic
/// intersections, so `f(H_i)` is not conjugate into `f(H_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refutation {
    pub i: usize,
    pub j: usize,
    pub level: Level,
    pub fix_i: u64,
    pub fix_j: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// 1-based point fixed by every subgroup generator and moved by every element.
    Membership { basepoint: u32, subgroup: Vec<Word>, elements: Vec<Word> },
    ConjugacyInto { subgroups: Vec<Vec<Word>>, prime: u32, characteristic: Vec<Vec<Word>>, refutations: Vec<Refutation> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationCertificate {
    pub kind: CertificateKind,
    pub n: usize,
    pub tuple: PermTuple,
    pub alternating: bool,
    pub classification: Classification,
    pub evidence: Evidence,
    pub seed: u64,
    pub trial: u64,
}

/// Points fixed by every word, counted directly.
fn common_fixed(t: &PermTuple, words: &[Word]) -> u64 {
    t.common_fixed_points(words).len() as u64
}

impl SeparationCertificate {
    /// Re-checks the evidence and the classification by evaluating words.
    pub fn verify(&self) -> bool {
        let t = &self.tuple;
        if t.degree() != self.n || !self.classification.verify(t) {
            return false;
        }
        if self.alternating != (self.classification.verdict == Verdict::Alternating) {
            return false;
        }
        if !matches!(self.classification.verdict, Verdict::Alternating | Verdict::Symmetric) {
            return false;
        }
        match &self.evidence {
            Evidence::Membership { basepoint, subgroup, elements } => {
                let x = match basepoint.checked_sub(1) {
                    Some(x) if (x as usize) < t.degree() => x,
                    _ => return false,
                };
                subgroup.iter().all(|w| t.apply_word(x, w) == x) && elements.iter().all(|w| t.apply_word(x, w) != x)
            }
            Evidence::ConjugacyInto { subgroups, characteristic, refutations, .. } => refutations.iter().all(|r| {
                let sets = match r.level {
                    Level::Subgroup => subgroups,
                    Level::Characteristic => characteristic,
                };
                let (Some(a), Some(b)) = (sets.get(r.i), sets.get(r.j)) else { return false };
                let (fa, fb) = (common_fixed(t, a), common_fixed(t, b));
                fa == r.fix_i && fb == r.fix_j && fa < fb
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Degrees to try, in order; `None` means `n0 · 2^t`, `t = 0..6`.
    pub n_schedule: Option<Vec<usize>>,
    /// Completions sampled per degree (and per planted multiplicity).
    pub trials: u64,
    pub seed: u64,
    pub budget: usize,
    pub accept_symmetric: bool,
    /// Largest base for planted multiplicities `a_j = base^j`.
    pub max_base: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { n_schedule: None, trials: 200, seed: 0, budget: DEFAULT_BUDGET, accept_symmetric: false, max_base: 16 }
    }
}

fn schedule(opts: &SearchOptions, condition_vertices: usize) -> Vec<usize> {
    opts.n_schedule.clone().unwrap_or_else(|| {
        let n0 = (4 * condition_vertices).max(32);
        (0..=6).map(|t| n0 << t).collect()
    })
}

/// Stream id for sample `trial` at schedule position `step`, planting round `round`.
fn stream(step: usize, round: usize, trial: u64) -> u64 {
    ((step as u64) << 48) | ((round as u64) << 40) | trial
}

fn accepted(c: &Classification, opts: &SearchOptions) -> bool {
    c.verdict == Verdict::Alternating || (opts.accept_symmetric && c.verdict == Verdict::Symmetric)
}

/// The based core of `h` with a path spelling each element hung at the
/// basepoint, folded; returns the graph and each element's endpoint.
fn membership_condition(h: &SubgroupSpec, elements: &[Word]) -> Result<(BasedGraph, Vec<VertexId>)> {
    let g = h.based_core.graph();
    let adj = g.adjacency()?;
    let base = h.based_core.basepoint();
    let mut vertices = g.vertices().to_vec();
    let mut edges = g.edges().to_vec();
    let mut next = g.max_id().map_or(0, |m| m + 1);
    let mut ends = Vec::new();
    for w in elements {
        let w = w.free_reduce();
        let mut at = adj.position(base).unwrap();
        let mut consumed = 0;
        for l in w.letters() {
            match adj.step_letter(at, *l) {
                Some(x) => {
                    at = x;
                    consumed += 1;
                }
                None => break,
            }
        }
        let start = adj.id(at);
        if consumed == w.len() {
            ends.push(start);
            continue;
        }
        let rest = Word::from_letters(w.letters()[consumed..].to_vec(), w.rank())?;
        let end = next;
        next += 1;
        vertices.push(end);
        let (vs, es) = path_edges(&rest, start, end, &mut next);
        vertices.extend(vs);
        edges.extend(es);
        ends.push(end);
    }
    let folded = fold_with_map(&LabeledGraph::new(g.rank(), vertices, edges)?);
    let graph = BasedGraph::new(folded.graph, folded.map[&base])?;
    let ends = ends.iter().map(|e| folded.map[e]).collect();
    Ok((graph, ends))
}

trait StepLetter {
    fn step_letter(&self, p: usize, l: Letter) -> Option<usize>;
}

impl StepLetter for Adjacency {
    fn step_letter(&self, p: usize, l: Letter) -> Option<usize> {
        if l.is_inverse() {
            self.inn(p, l.label())
        } else {
            self.out(p, l.label())
        }
    }
}

/// Finds a tuple with alternating image in which a point is fixed by `h` and
/// moved by every element.
pub fn separate_membership(h: &SubgroupSpec, elements: &[Word], opts: &SearchOptions) -> Result<SeparationCertificate> {
    if h.is_finite_index() {
        return Err(Error::InvalidInput("the subgroup must have infinite index".into()));
    }
    if let Some(w) = elements.iter().find(|w| h.contains(w)) {
        return Err(Error::NotSeparable(w.to_string()));
    }
    let (condition, ends) = membership_condition(h, elements)?;
    debug_assert!(ends.iter().all(|&e| e != condition.basepoint()));
    let graph = condition.graph();
    for (step, n) in schedule(opts, graph.vertex_count()).into_iter().enumerate() {
        if n < graph.vertex_count() {
            continue;
        }
        let completer = Completer::new(graph, n)?;
        let x = completer.ids().binary_search(&condition.basepoint()).unwrap() as u32;
        let found = (0..opts.trials).into_par_iter().find_map_first(|trial| {
            let s = stream(step, 0, trial);
            let tuple = completer.sample(&mut trial_rng(opts.seed, purpose::COMPLETION, s));
            let c = classify(&tuple, opts.budget, &mut trial_rng(opts.seed, purpose::RECOGNITION, s));
            accepted(&c, opts).then_some((s, tuple, c))
        });
        if let Some((trial, tuple, classification)) = found {
            let cert = SeparationCertificate {
                kind: CertificateKind::Membership,
                n,
                alternating: classification.verdict == Verdict::Alternating,
                tuple,
                classification,
                evidence: Evidence::Membership {
                    basepoint: x + 1,
                    subgroup: h.generators.clone(),
                    elements: elements.to_vec(),
                },
                seed: opts.seed,
                trial,
            };
            debug_assert!(cert.verify());
            return Ok(cert);
        }
    }
    Err(Error::BudgetExhausted(format!("no accepted completion within {} trials per degree", opts.trials)))
}

/// Indices sorted so that `H_i ≺ H_j` (and not conversely) puts `i` first.
fn conjugacy_order(subgroups: &[SubgroupSpec]) -> Vec<usize> {
    let up: Vec<usize> = subgroups
        .iter()
        .map(|a| subgroups.iter().filter(|b| is_conjugate_into(a, b)).count())
        .collect();
    let mut order: Vec<usize> = (0..subgroups.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(up[i]));
    order
}

/// Finds a tuple with alternating image such that, for every pair with `H_i`
/// not conjugate into `H_j`, fixed-point counts show `f(H_i)` is not conjugate
/// into `f(H_j)`.
///
/// Only `p = 2` is accepted: the intersection of the index-2 subgroups is the
/// subgroup generated by squares, so its image is the same construction in the
/// quotient and conjugacy-into passes to it. For odd `p` that fails.
pub fn separate_conjugacy(subgroups: &[SubgroupSpec], primes: Option<&[u32]>, opts: &SearchOptions) -> Result<SeparationCertificate> {
    let prime = match primes {
        None => 2,
        Some(ps) => {
            if let Some(&p) = ps.iter().find(|&&p| p != 2) {
                return Err(if is_prime(p) { Error::UnsoundPrime(p) } else { Error::NotPrime(p) });
            }
            2
        }
    };
    let Some(first) = subgroups.first() else {
        return Err(Error::InvalidInput("no subgroups given".into()));
    };
    let rank = first.rank();
    if subgroups.iter().any(|h| h.rank() != rank) {
        return Err(Error::InvalidInput("subgroups of different ranks".into()));
    }
    if subgroups.iter().any(SubgroupSpec::is_finite_index) {
        return Err(Error::InvalidInput("subgroups must have infinite index".into()));
    }
    let order = conjugacy_order(subgroups);
    let chars: Vec<SubgroupSpec> = subgroups.iter().map(|h| characteristic_intersection(h, prime)).collect::<Result<_>>()?;
    let targets: Vec<(usize, usize)> = (0..subgroups.len())
        .flat_map(|i| (0..subgroups.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && !is_conjugate_into(&subgroups[i], &subgroups[j]))
        .collect();

    let plant = |base: usize| -> LabeledGraph {
        let mut g = LabeledGraph::empty(rank);
        let mut copies = 1usize;
        for &j in &order {
            if !chars[j].core.is_empty() {
                g = g.disjoint_union(&chars[j].core.repeated(copies)).0;
            }
            copies = copies.saturating_mul(base);
        }
        g
    };
    let degrees = schedule(opts, plant(1).vertex_count());
    let bases: Vec<usize> = std::iter::successors(Some(1usize), |b| Some(b * 2)).take_while(|&b| b <= opts.max_base.max(1)).collect();

    for (step, &n) in degrees.iter().enumerate() {
        for (round, &base) in bases.iter().enumerate() {
            let condition = plant(base);
            if condition.vertex_count() > n {
                break;
            }
            let completer = Completer::new(&condition, n)?;
            let found = (0..opts.trials).into_par_iter().find_map_first(|trial| {
                let s = stream(step, round, trial);
                let tuple = completer.sample(&mut trial_rng(opts.seed, purpose::COMPLETION, s));
                let fix_h: Vec<u64> = subgroups.iter().map(|h| fixed_points(&tuple, &h.based_core).unwrap()).collect();
                let fix_g: Vec<u64> = chars.iter().map(|g| fixed_points(&tuple, &g.based_core).unwrap()).collect();
                let mut refutations = Vec::with_capacity(targets.len());
                for &(i, j) in &targets {
                    let r = if fix_h[i] < fix_h[j] {
                        Refutation { i, j, level: Level::Subgroup, fix_i: fix_h[i], fix_j: fix_h[j] }
                    } else if fix_g[i] < fix_g[j] {
                        Refutation { i, j, level: Level::Characteristic, fix_i: fix_g[i], fix_j: fix_g[j] }
                    } else {
                        return None;
                    };
                    refutations.push(r);
                }
                let c = classify(&tuple, opts.budget, &mut trial_rng(opts.seed, purpose::RECOGNITION, s));
                accepted(&c, opts).then_some((s, tuple, c, refutations))
            });
            if let Some((trial, tuple, classification, refutations)) = found {
                let cert = SeparationCertificate {
                    kind: CertificateKind::ConjugacyInto,
                    n,
                    alternating: classification.verdict == Verdict::Alternating,
                    tuple,
                    classification,
                    evidence: Evidence::ConjugacyInto {
                        subgroups: subgroups.iter().map(|h| h.generators.clone()).collect(),
                        prime,
                        characteristic: chars.iter().map(|g| g.generators.clone()).collect(),
                        refutations,
                    },
                    seed: opts.seed,
                    trial,
                };
                debug_assert!(cert.verify());
                return Ok(cert);
            }
        }
    }
    Err(Error::BudgetExhausted(format!(
        "no accepted completion within {} trials per degree and multiplicity",
        opts.trials
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sub(ws: &[&str]) -> SubgroupSpec {
        SubgroupSpec::parse(ws, 2).unwrap()
    }

    #[test]
    fn spec_basics() {
        let h = sub(&["aa", "b"]);
        assert_eq!(h.rank_of_subgroup, 2);
        assert!(!h.is_finite_index());
        assert!(h.contains(&Word::parse("baaBaa", 2).unwrap()));
        assert!(!h.contains(&Word::parse("a", 2).unwrap()));
        assert!(sub(&["a", "b"]).is_finite_index());
        assert!(sub(&[]).is_trivial());
        assert_eq!(sub(&[]).rank_of_subgroup, 0);
        // generators read off the core generate the same subgroup
        let c = sub(&["abA", "bbaB"]);
        let again = SubgroupSpec::from_based_core(c.based_core.clone());
        assert_eq!(again.generators.len(), 2);
        assert!(again.generators.iter().all(|w| c.contains(w)));
        assert!(c.generators.iter().all(|w| again.contains(w)));
    }

    #[test]
    fn conjugate_into_examples() {
        assert!(is_conjugate_into(&sub(&["aa"]), &sub(&["a"])));
        assert!(!is_conjugate_into(&sub(&["a"]), &sub(&["aa"])));
        assert!(!is_conjugate_into(&sub(&["ab"]), &sub(&["a"])));
        assert!(is_conjugate_into(&sub(&["baB"]), &sub(&["a"])));
        assert!(is_conjugate_into(&sub(&[]), &sub(&["a"])));
    }

    #[test]
    fn index_p_counts() {
        let f2 = sub(&["a", "b"]);
        assert_eq!(index_p_subgroups(&f2, 2).unwrap().len(), 3);
        assert_eq!(index_p_subgroups(&f2, 3).unwrap().len(), 13);
        let a = sub(&["a"]);
        let two = index_p_subgroups(&a, 2).unwrap();
        assert_eq!(two.len(), 1);
        assert!(two[0].based_core.is_isomorphic(&sub(&["aa"]).based_core));
        assert_eq!(index_p_subgroups(&f2, 4), Err(Error::NotPrime(4)));
        assert!(matches!(index_p_subgroups(&f2, 7), Err(Error::PrimeTooLarge { .. })));
        for s in index_p_subgroups(&f2, 3).unwrap() {
            assert_eq!(relative_index(&s, &f2), Ok(3));
        }
    }

    #[test]
    fn characteristic_examples() {
        let f2 = sub(&["a", "b"]);
        let k = characteristic_intersection(&f2, 2).unwrap();
        assert_eq!((k.core.vertex_count(), k.core.edge_count(), k.rank_of_subgroup), (4, 8, 5));
        assert_eq!(relative_index(&k, &f2), Ok(4));
        let a3 = characteristic_intersection(&sub(&["a"]), 3).unwrap();
        assert!(a3.core.is_isomorphic(&sub(&["aaa"]).core));
        let h = sub(&["aa", "b"]);
        let g = characteristic_intersection(&h, 2).unwrap();
        let idx = relative_index(&g, &h).unwrap();
        assert_eq!(idx, g.core.vertex_count() / h.core.vertex_count());
        assert_eq!(idx, 4);
        for s in index_p_subgroups(&h, 2).unwrap() {
            assert!(s.contains_subgroup(&g));
        }
        // a Nielsen-equivalent generating set gives the same intersection
        let h2 = sub(&["aa", "baa"]);
        assert!(characteristic_intersection(&h2, 2).unwrap().based_core.is_isomorphic(&g.based_core));
    }

    #[test]
    fn lifting_lemma_examples() {
        let a = sub(&["a"]);
        assert_eq!(lemma_subgroup_lifting_check(&a, &a, &sub(&["aaaaa"])), Ok(true));
        assert_eq!(lemma_subgroup_lifting_check(&a, &sub(&["aa"]), &sub(&["aaaa"])), Ok(false));
        assert_eq!(lemma_subgroup_lifting_check(&a, &sub(&["aa"]), &sub(&["aaaaaa"])), Ok(false));
        assert_eq!(lemma_subgroup_lifting_check(&sub(&["aa"]), &a, &sub(&["aaaaaaaaaa"])), Ok(true));
        assert_eq!(lemma_subgroup_lifting_check(&sub(&["a", "b"]), &a, &sub(&["aa"])), Err(Error::NotFiniteIndex));
    }

    #[test]
    fn brute_force_examples() {
        let p = |n, c: &[&[u32]]| Perm::from_cycles(n, c).unwrap();
        assert_eq!(brute_force_conjugate_into(&[p(4, &[&[1, 2]])], &[p(4, &[&[1, 2]]), p(4, &[&[3, 4]])], 4), Ok(true));
        assert_eq!(brute_force_conjugate_into(&[p(3, &[&[1, 2, 3]])], &[p(3, &[&[1, 2]])], 3), Ok(false));
        assert_eq!(brute_force_conjugate_into(&[p(4, &[&[3, 4]])], &[p(4, &[&[1, 2]])], 4), Ok(true));
        assert!(matches!(brute_force_conjugate_into(&[], &[], 9), Err(Error::DegreeTooLarge { .. })));
    }

    #[test]
    fn membership_examples() {
        let opts = SearchOptions { seed: 5, ..Default::default() };
        let c = separate_membership(&sub(&["aa", "b"]), &[Word::parse("a", 2).unwrap()], &opts).unwrap();
        assert!(c.verify() && c.alternating);
        let c = separate_membership(&sub(&["a"]), &[Word::parse("b", 2).unwrap()], &opts).unwrap();
        assert!(c.verify());
        assert!(matches!(
            separate_membership(&sub(&["a"]), &[Word::parse("a", 2).unwrap()], &opts),
            Err(Error::NotSeparable(_))
        ));
        let mut forged = c.clone();
        forged.tuple = PermTuple::identity(c.n, 2);
        assert!(!forged.verify());
    }

    #[test]
    fn conjugacy_examples() {
        let opts = SearchOptions { seed: 9, ..Default::default() };
        let c = separate_conjugacy(&[sub(&["ab"]), sub(&["a"])], None, &opts).unwrap();
        assert!(c.verify());
        let Evidence::ConjugacyInto { refutations, .. } = &c.evidence else { panic!() };
        assert_eq!(refutations.len(), 2);
        let c = separate_conjugacy(&[sub(&["aa"]), sub(&["a"])], None, &opts).unwrap();
        let Evidence::ConjugacyInto { refutations, .. } = &c.evidence else { panic!() };
        assert_eq!(refutations.iter().map(|r| (r.i, r.j)).collect::<Vec<_>>(), vec![(1, 0)]);
        let single = separate_conjugacy(&[sub(&["ab"])], None, &opts).unwrap();
        assert!(single.verify());
        assert_eq!(separate_conjugacy(&[sub(&["a"])], Some(&[3]), &opts), Err(Error::UnsoundPrime(3)));
    }

    #[test]
    fn small_degree_certificates_agree_with_brute_force() {
        let corpus = [sub(&["ab"]), sub(&["a"]), sub(&["aa"]), sub(&["abAB"]), sub(&["b", "aba"])];
        let mut checked = 0;
        for (x, h1) in corpus.iter().enumerate() {
            for h2 in &corpus[x + 1..] {
                let opts = SearchOptions { n_schedule: Some(vec![7, 8]), trials: 400, seed: 3, accept_symmetric: true, ..Default::default() };
                let Ok(c) = separate_conjugacy(&[h1.clone(), h2.clone()], None, &opts) else { continue };
                assert!(c.verify());
                let Evidence::ConjugacyInto { subgroups, refutations, .. } = &c.evidence else { panic!() };
                for r in refutations {
                    let eval = |ws: &[Word]| ws.iter().map(|w| c.tuple.eval(w)).collect::<Vec<_>>();
                    assert_eq!(brute_force_conjugate_into(&eval(&subgroups[r.i]), &eval(&subgroups[r.j]), c.n), Ok(false));
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    fn arb_sub() -> impl Strategy<Value = SubgroupSpec> {
        prop::collection::vec(prop::collection::vec((1usize..=2, any::<bool>()), 1..5), 1..3).prop_map(|ws| {
            let words = ws
                .into_iter()
                .map(|l| Word::from_letters(l.into_iter().map(|(g, i)| Letter::new(g, i)).collect(), 2).unwrap())
                .collect();
            SubgroupSpec::new(words, 2).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn conjugacy_preorder(a in arb_sub(), b in arb_sub(), c in arb_sub()) {
            prop_assert!(is_conjugate_into(&a, &a));
            if is_conjugate_into(&a, &b) && is_conjugate_into(&b, &c) {
                prop_assert!(is_conjugate_into(&a, &c));
            }
            if is_conjugate_into(&a, &b) && is_conjugate_into(&b, &a) {
                prop_assert!(a.core.is_isomorphic(&b.core));
            }
        }

        #[test]
        fn conjugate_into_survives_every_quotient(a in arb_sub(), b in arb_sub(), seed in any::<u64>()) {
            let t = PermTuple::random(5, 2, &mut trial_rng(seed, purpose::TUPLE, 0));
            let eval = |h: &SubgroupSpec| h.generators.iter().map(|w| t.eval(w)).collect::<Vec<_>>();
            if is_conjugate_into(&a, &b) {
                prop_assert_eq!(brute_force_conjugate_into(&eval(&a), &eval(&b), 5), Ok(true));
            }
            if b.contains_subgroup(&a) {
                prop_assert!(fixed_points(&t, &a.based_core).unwrap() >= fixed_points(&t, &b.based_core).unwrap());
            }
        }

        #[test]
        fn index_p_subgroups_have_index_p(h in arb_sub(), p in 2u32..=3) {
            if let Ok(subs) = index_p_subgroups(&h, p) {
                for s in subs {
                    prop_assert_eq!(relative_index(&s, &h), Ok(p as usize));
                    prop_assert!(h.contains_subgroup(&s));
                }
            }
        }
    }
}
