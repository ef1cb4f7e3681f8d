//! Deciding whether a permutation tuple generates `S_n`, `A_n`, or something
//! visibly smaller: orbits, then blocks, then a power that is a prime cycle
//! (Jordan's theorem). Tiny degrees are settled by enumerating the group.
//!
//! Point lists in witnesses are 1-based, like the JSON form of tuples.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::{Perm, PermTuple};
use crate::word::{Letter, Word};

pub const DEFAULT_BUDGET: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    Intransitive,
    Imprimitive,
    Alternating,
    Symmetric,
    Undetermined,
}

/// A word whose value, raised to `exponent`, is a single `q`-cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QCycleCertificate {
    pub word: Word,
    pub q: u32,
    #[serde(serialize_with = "decimal")]
    pub exponent: BigUint,
}

fn decimal<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_str_radix(10))
}

impl QCycleCertificate {
    /// Re-evaluates the word and checks the power is a `q`-cycle with `q`
    /// prime and `q <= n - 3`.
    pub fn verify(&self, t: &PermTuple) -> bool {
        let n = t.degree();
        if !is_prime(self.q) || self.q as usize + 3 > n || self.word.rank() > t.rank() {
            return false;
        }
        let g = t.eval(&self.word);
        let e = &self.exponent;
        let p = g.pow_by(|len| (e % BigUint::from(len)).try_into().unwrap_or(0));
        nontrivial_cycles(&p) == [self.q as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Orbits { orbits: Vec<Vec<u32>> },
    Blocks { blocks: Vec<Vec<u32>> },
    QCycle(QCycleCertificate),
    ClosureOrder { order: u64 },
    Budget { evaluations: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub degree: usize,
    pub verdict: Verdict,
    pub witness: Witness,
}

impl Classification {
    /// Checks the witness against the tuple without reusing the search.
    pub fn verify(&self, t: &PermTuple) -> bool {
        let n = t.degree();
        match (&self.verdict, &self.witness) {
            (Verdict::Intransitive, Witness::Orbits { orbits }) => {
                orbits.len() > 1 && is_partition(orbits, n) && invariant_partition(t, orbits, false)
            }
            (Verdict::Imprimitive, Witness::Blocks { blocks }) => {
                blocks.len() > 1
                    && blocks.len() < n
                    && is_partition(blocks, n)
                    && invariant_partition(t, blocks, true)
                    && orbits(t).len() == 1
            }
            (v @ (Verdict::Alternating | Verdict::Symmetric), Witness::QCycle(c)) => {
                let even = t.perms().iter().all(Perm::is_even);
                c.verify(t)
                    && orbits(t).len() == 1
                    && is_primitive(t).map(|(p, _)| p).unwrap_or(false)
                    && (*v == Verdict::Alternating) == even
            }
            (v @ (Verdict::Alternating | Verdict::Symmetric | Verdict::Undetermined), Witness::ClosureOrder { order }) => {
                let full = factorial(n);
                let expected = match v {
                    Verdict::Symmetric => *order == full,
                    Verdict::Alternating => n >= 2 && *order == full / 2 && full != *order,
                    _ => *order != full && (n < 2 || *order != full / 2),
                };
                expected && n <= 10 && closure_order(t, u64::MAX) == Some(*order)
            }
            (Verdict::Undetermined, Witness::Budget { .. }) => true,
            _ => false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Sorted lengths of the cycles of length at least two.
pub fn nontrivial_cycles(g: &Perm) -> Vec<usize> {
    g.cycle_type().into_iter().filter(|&l| l > 1).collect()
}

fn is_partition(parts: &[Vec<u32>], n: usize) -> bool {
    let mut seen = vec![false; n];
    for &p in parts.iter().flatten() {
        if p == 0 || p as usize > n || std::mem::replace(&mut seen[p as usize - 1], true) {
            return false;
        }
    }
    seen.iter().all(|&s| s)
}

/// Each part maps into a part; `blocks` additionally requires the image to be
/// a single whole part (orbits are only required to be closed).
fn invariant_partition(t: &PermTuple, parts: &[Vec<u32>], blocks: bool) -> bool {
    let mut part_of = vec![0usize; t.degree()];
    for (i, p) in parts.iter().enumerate() {
        for &x in p {
            part_of[x as usize - 1] = i;
        }
    }
    t.perms().iter().all(|g| {
        parts.iter().enumerate().all(|(i, p)| {
            let first = part_of[g.apply(p[0] - 1) as usize];
            p.iter().all(|&x| {
                let y = part_of[g.apply(x - 1) as usize];
                if blocks {
                    y == first
                } else {
                    y == i
                }
            })
        })
    })
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub fn is_prime(q: u32) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

/// Orbits of the generated group, 1-based, each sorted, ordered by least point.
pub fn orbits(t: &PermTuple) -> Vec<Vec<u32>> {
    let n = t.degree();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut orbit = vec![s as u32];
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for g in t.perms() {
                let y = g.apply(x);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        out.push(orbit.into_iter().map(|x| x + 1).collect());
    }
    out
}

pub fn is_transitive(t: &PermTuple) -> (bool, Vec<Vec<u32>>) {
    let o = orbits(t);
    (o.len() <= 1, o)
}

/// Finest block system in which `0` and `beta` share a block (0-based class
/// labels: the least point of each class).
fn minimal_block(t: &PermTuple, beta: u32) -> Vec<u32> {
    let n = t.degree();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    let mut queue = VecDeque::from([(0u32, beta)]);
    parent[beta as usize] = 0;
    while let Some((a, b)) = queue.pop_front() {
        for g in t.perms() {
            let x = find(&mut parent, g.apply(a));
            let y = find(&mut parent, g.apply(b));
            if x != y {
                let (lo, hi) = (x.min(y), x.max(y));
                parent[hi as usize] = lo;
                queue.push_back((lo, hi));
            }
        }
    }
    (0..n as u32).map(|x| find(&mut parent, x)).collect()
}

/// Primitivity of a transitive tuple, with a nontrivial block system when
/// there is one.
pub fn is_primitive(t: &PermTuple) -> Result<(bool, Option<Vec<Vec<u32>>>)> {
    let n = t.degree();
    if orbits(t).len() > 1 {
        return Err(Error::NotTransitive);
    }
    for beta in 1..n as u32 {
        let labels = minimal_block(t, beta);
        if labels.iter().any(|&l| l != 0) {
            let mut blocks: Vec<Vec<u32>> = Vec::new();
            let mut index = vec![usize::MAX; n];
            for (x, &l) in labels.iter().enumerate() {
                if index[l as usize] == usize::MAX {
                    index[l as usize] = blocks.len();
                    blocks.push(Vec::new());
                }
                blocks[index[l as usize]].push(x as u32 + 1);
            }
            return Ok((false, Some(blocks)));
        }
    }
    Ok((true, None))
}

fn lcm(a: &BigUint, b: usize) -> BigUint {
    let b = BigUint::from(b);
    let g = gcd(a.clone(), b.clone());
    a / g * b
}

fn gcd(mut a: BigUint, mut b: BigUint) -> BigUint {
    while b != BigUint::from(0u8) {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn gcd_small(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The largest prime `q <= n - 3` such that `g` has exactly one cycle of
/// length `q` and every other cycle length is coprime to `q`, with the
/// exponent (lcm of the other lengths) that isolates that cycle.
pub fn q_cycle_power(g: &Perm) -> Option<(u32, BigUint)> {
    let n = g.degree();
    let ct = g.cycle_type();
    let mut candidates: Vec<usize> = ct.iter().copied().filter(|&l| l + 3 <= n && is_prime(l as u32)).collect();
    candidates.sort_unstable();
    candidates.dedup();
    candidates.into_iter().rev().find_map(|q| {
        let divisible = ct.iter().filter(|&&l| gcd_small(l, q) != 1).count();
        let exact = ct.iter().filter(|&&l| l == q).count();
        (divisible == 1 && exact == 1).then(|| {
            let mut e = BigUint::from(1u8);
            for &l in ct.iter().filter(|&&l| l != q) {
                e = lcm(&e, l);
            }
            (q as u32, e)
        })
    })
}

/// Searches for a word certifying a prime cycle: generators and their small
/// powers first, then random words of length at most `4 log2 n`.
pub fn find_tn_element<R: Rng + ?Sized>(t: &PermTuple, budget: usize, rng: &mut R) -> Option<QCycleCertificate> {
    let n = t.degree();
    let k = t.rank();
    let mut tried = 0;
    let attempt = |word: Word| -> Option<QCycleCertificate> {
        let (q, exponent) = q_cycle_power(&t.eval(&word))?;
        let c = QCycleCertificate { word, q, exponent };
        debug_assert!(c.verify(t));
        Some(c)
    };
    for m in 1..=3 {
        for j in 1..=k {
            if tried >= budget {
                return None;
            }
            tried += 1;
            if let Some(c) = attempt(Word::generator(j, k).pow(m)) {
                return Some(c);
            }
        }
    }
    let max_len = ((4.0 * (n.max(2) as f64).log2()).ceil() as usize).max(1);
    while tried < budget {
        tried += 1;
        let len = rng.gen_range(1..=max_len);
        let letters = (0..len).map(|_| Letter::new(rng.gen_range(1..=k), rng.gen_bool(0.5))).collect();
        if let Some(c) = attempt(Word::from_letters(letters, k).expect("letters within rank")) {
            return Some(c);
        }
    }
    None
}

/// Order of the generated group by breadth-first closure, or `None` past `limit` elements.
pub fn closure_order(t: &PermTuple, limit: u64) -> Option<u64> {
    let id = Perm::identity(t.degree());
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in t.perms() {
            let h = g.then(s);
            if !seen.contains(&h) {
                if seen.len() as u64 >= limit {
                    return None;
                }
                seen.insert(h.clone());
                queue.push_back(h);
            }
        }
    }
    Some(seen.len() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    pub budget: usize,
    /// Degrees up to this are settled by enumerating the whole group.
    pub brute_force_max_degree: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { budget: DEFAULT_BUDGET, brute_force_max_degree: 7 }
    }
}

pub fn classify<R: Rng + ?Sized>(t: &PermTuple, budget: usize, rng: &mut R) -> Classification {
    classify_with(t, ClassifyOptions { budget, ..Default::default() }, rng)
}

pub fn classify_with<R: Rng + ?Sized>(t: &PermTuple, opts: ClassifyOptions, rng: &mut R) -> Classification {
    let n = t.degree();
    let done = |verdict, witness| Classification { degree: n, verdict, witness };
    let (transitive, orbits) = is_transitive(t);
    if !transitive {
        return done(Verdict::Intransitive, Witness::Orbits { orbits });
    }
    if let Ok((false, Some(blocks))) = is_primitive(t) {
        return done(Verdict::Imprimitive, Witness::Blocks { blocks });
    }
    if n <= opts.brute_force_max_degree {
        let order = closure_order(t, u64::MAX).expect("unbounded");
        let full = factorial(n);
        let verdict = if order == full {
            Verdict::Symmetric
        } else if order == full / 2 {
            Verdict::Alternating
        } else {
            Verdict::Undetermined
        };
        return done(verdict, Witness::ClosureOrder { order });
    }
    match find_tn_element(t, opts.budget, rng) {
        Some(c) => {
            let verdict = if t.perms().iter().all(Perm::is_even) { Verdict::Alternating } else { Verdict::Symmetric };
            done(verdict, Witness::QCycle(c))
        }
        None => done(Verdict::Undetermined, Witness::Budget { evaluations: opts.budget }),
    }
}
