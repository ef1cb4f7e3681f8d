//! Permutations of `{0..n}` and k-tuples of them, i.e. homomorphisms `F_k -> S_n`.
//!
//! Points are 0-based in memory. The JSON form uses 1-based images.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::word::{Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    /// 0-based images; fails unless they form a bijection.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::InvalidInput(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    /// Builds a permutation from 1-based cycles, e.g. `&[&[1, 2, 3]]`.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &p) in cycle.iter().enumerate() {
                let q = cycle[(i + 1) % cycle.len()];
                if p == 0 || q == 0 || p as usize > n || q as usize > n || touched[p as usize - 1] {
                    return Err(Error::InvalidInput(format!("bad cycle {cycle:?} for degree {n}")));
                }
                touched[p as usize - 1] = true;
                images[p as usize - 1] = q - 1;
            }
        }
        Perm::from_images(images)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut images: Vec<u32> = (0..n as u32).collect();
        images.shuffle(rng);
        Perm(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, point: u32) -> u32 {
        self.0[point as usize]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm(inv)
    }

    /// `self` followed by `other` (left-to-right action).
    pub fn then(&self, other: &Perm) -> Self {
        Perm(self.0.iter().map(|&i| other.apply(i)).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|(i, &j)| *i as u32 == j).count()
    }

    /// Cycles including fixed points, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start as u32;
            while !seen[p as usize] {
                seen[p as usize] = true;
                cycle.push(p);
                p = self.apply(p);
            }
            out.push(cycle);
        }
        out
    }

    /// Sorted cycle lengths including 1-cycles.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable();
        t
    }

    pub fn is_even(&self) -> bool {
        let transpositions: usize = self.cycles().iter().map(|c| c.len() - 1).sum();
        transpositions.is_multiple_of(2)
    }

    /// `self^e` computed cycle by cycle, so `e` only matters modulo each cycle length.
    pub fn pow_by(&self, exponent_mod: impl Fn(usize) -> usize) -> Self {
        let mut images = vec![0u32; self.0.len()];
        for cycle in self.cycles() {
            let len = cycle.len();
            let shift = exponent_mod(len) % len;
            for (i, &p) in cycle.iter().enumerate() {
                images[p as usize] = cycle[(i + shift) % len];
            }
        }
        Perm(images)
    }

    pub fn pow(&self, e: u64) -> Self {
        self.pow_by(|len| (e % len as u64) as usize)
    }
}

/// A homomorphism `F_k -> S_n` given by the images of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermTuple {
    degree: usize,
    perms: Vec<Perm>,
    inverses: Vec<Perm>,
}

impl PermTuple {
    pub fn new(perms: Vec<Perm>) -> Result<Self> {
        let degree = perms.first().map(Perm::degree).ok_or_else(|| {
            Error::InvalidInput("a permutation tuple needs at least one generator".into())
        })?;
        if perms.iter().any(|p| p.degree() != degree) {
            return Err(Error::InvalidInput("permutations of different degrees".into()));
        }
        let inverses = perms.iter().map(Perm::inverse).collect();
        Ok(PermTuple { degree, perms, inverses })
    }

    /// Convenience constructor from 1-based cycle notation per generator.
    pub fn from_cycles(degree: usize, gens: &[&[&[u32]]]) -> Result<Self> {
        PermTuple::new(gens.iter().map(|c| Perm::from_cycles(degree, c)).collect::<Result<_>>()?)
    }

    pub fn identity(degree: usize, rank: usize) -> Self {
        PermTuple::new(vec![Perm::identity(degree); rank]).expect("rank >= 1")
    }

    pub fn random<R: Rng + ?Sized>(degree: usize, rank: usize, rng: &mut R) -> Self {
        PermTuple::new((0..rank).map(|_| Perm::random(degree, rng)).collect()).expect("rank >= 1")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.perms.len()
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    /// Image of generator `label` (0-based).
    pub fn perm(&self, label: usize) -> &Perm {
        &self.perms[label]
    }

    pub fn inverse_perm(&self, label: usize) -> &Perm {
        &self.inverses[label]
    }

    #[inline]
    pub fn apply_letter(&self, point: u32, letter: Letter) -> u32 {
        if letter.is_inverse() {
            self.inverses[letter.label()].apply(point)
        } else {
            self.perms[letter.label()].apply(point)
        }
    }

    /// Image of `point` under the word, letters acting left to right.
    pub fn apply_word(&self, point: u32, word: &Word) -> u32 {
        word.letters().iter().fold(point, |p, &l| self.apply_letter(p, l))
    }

    /// The permutation a word evaluates to.
    pub fn eval(&self, word: &Word) -> Perm {
        Perm((0..self.degree as u32).map(|p| self.apply_word(p, word)).collect())
    }

    /// Points fixed by every word in `words`.
    pub fn common_fixed_points(&self, words: &[Word]) -> Vec<u32> {
        (0..self.degree as u32)
            .filter(|&p| words.iter().all(|w| self.apply_word(p, w) == p))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct PermTupleJson {
    degree: usize,
    perms: Vec<Vec<u32>>,
}

impl Serialize for PermTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PermTupleJson {
            degree: self.degree,
            perms: self.perms.iter().map(|p| p.0.iter().map(|&i| i + 1).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PermTuple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PermTupleJson::deserialize(d)?;
        let perms = raw
            .perms
            .into_iter()
            .map(|imgs| {
                if imgs.len() != raw.degree || imgs.contains(&0) {
                    return Err(Error::InvalidInput("images must be 1..=degree".into()));
                }
                Perm::from_images(imgs.into_iter().map(|i| i - 1).collect())
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        PermTuple::new(perms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cycles_and_parity() {
        let p = Perm::from_cycles(6, &[&[1, 2], &[4, 5, 6]]).unwrap();
        assert_eq!(p.cycle_type(), vec![1, 2, 3]);
        assert!(!p.is_even());
        assert_eq!(p.pow(2).fixed_points(), 3);
        assert!(p.pow(6).is_identity());
        assert_eq!(p.then(&p.inverse()), Perm::identity(6));
    }

    #[test]
    fn word_evaluation_respects_inverses() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = PermTuple::random(7, 2, &mut rng);
        let w = Word::parse("abAB", 2).unwrap();
        let e = t.eval(&w);
        let manual = t.perm(0).then(t.perm(1)).then(&t.perm(0).inverse()).then(&t.perm(1).inverse());
        assert_eq!(e, manual);
        assert!(t.eval(&w.concat(&w.inverse())).is_identity());
    }

    #[test]
    fn json_is_one_based() {
        let t = PermTuple::from_cycles(3, &[&[&[1, 2, 3]], &[&[1, 2]]]).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"degree":3,"perms":[[2,3,1],[2,1,3]]}"#);
        let back: PermTuple = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<PermTuple>(r#"{"degree":2,"perms":[[1,1]]}"#).is_err());
    }
}
