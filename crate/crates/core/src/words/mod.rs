//! Reduced words in the free group F2 = <a, b>, word balls, evaluation in a
//! group, iterated commutators, closed-walk counts and girth search.
//!
//! Text form: `a`, `b` are the generators and `A`, `B` their inverses, so
//! `"aB"` is `a b^-1`. The empty word prints as `1`.

mod audit;
mod girth;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;

pub use audit::{tuple_vanishing_audit, TupleAudit};
pub use girth::{girth_test, GirthOutcome};

/// Letters in search order `a < a^-1 < b < b^-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Letter {
    A = 0,
    AInv = 1,
    B = 2,
    BInv = 3,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter::from_index(self as u8 ^ 1)
    }

    #[inline]
    pub fn from_index(i: u8) -> Letter {
        Letter::ALL[(i & 3) as usize]
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }
}

/// A freely reduced word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn a() -> Word {
        Word::letter(Letter::A)
    }

    pub fn b() -> Word {
        Word::letter(Letter::B)
    }

    /// Free reduction of an arbitrary letter string.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        Word::reduce(std::iter::repeat_n(base.0, k.unsigned_abs() as usize).flatten())
    }

    /// `[u, v] = u^-1 v^-1 u v`.
    pub fn commutator(&self, other: &Word) -> Word {
        Word::reduce(
            self.inverse()
                .0
                .into_iter()
                .chain(other.inverse().0)
                .chain(self.0.iter().copied())
                .chain(other.0.iter().copied()),
        )
    }

    /// The primitive root `r` with `self = r^k`, `k >= 1` (identity for the
    /// identity). Writes `self = c x c^-1` with `x` cyclically reduced and takes
    /// the shortest period of `x`.
    pub fn root(&self) -> Word {
        if self.is_identity() {
            return Word::identity();
        }
        let w = &self.0;
        let mut c = 0;
        while c < w.len() / 2 && w[c] == w[w.len() - 1 - c].inverse() {
            c += 1;
        }
        let core = &w[c..w.len() - c];
        let n = core.len();
        let period = (1..=n)
            .find(|&p| n % p == 0 && (p..n).all(|i| core[i] == core[i - p]))
            .unwrap_or(n);
        let conj = Word(w[..c].to_vec());
        conj.concat(&Word(core[..period].to_vec()))
            .concat(&conj.inverse())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        if s == "1" || s.is_empty() {
            return Ok(Word::identity());
        }
        let letters = s
            .chars()
            .map(|c| match c {
                'a' => Ok(Letter::A),
                'A' => Ok(Letter::AInv),
                'b' => Ok(Letter::B),
                'B' => Ok(Letter::BInv),
                other => Err(Error::InvalidParameter(format!("bad letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word::reduce(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// F2 itself, with concatenate-and-reduce as the product.
#[derive(Clone, Copy, Debug, Default)]
pub struct FreeGroup;

impl Group for FreeGroup {
    type Elem = Word;

    fn identity(&self) -> Word {
        Word::identity()
    }

    fn mul(&self, x: &Word, y: &Word) -> Word {
        x.concat(y)
    }

    fn inv(&self, x: &Word) -> Word {
        x.inverse()
    }

    fn commutator(&self, x: &Word, y: &Word) -> Word {
        x.commutator(y)
    }
}

pub const MAX_BALL_RADIUS: usize = 14;

/// Every reduced word of length at most `radius`, ordered by length and then
/// lexicographically. Has exactly `2 * 3^radius - 1` elements.
pub fn ball(radius: usize) -> Result<Vec<Word>> {
    if radius > MAX_BALL_RADIUS {
        return Err(Error::Capacity {
            what: format!("ball of radius {radius}"),
            limit: MAX_BALL_RADIUS as u64,
            hint: "the ball has 2*3^L - 1 words",
        });
    }
    let mut out = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    for _ in 0..radius {
        let mut next = Vec::with_capacity(frontier.len() * 3 + 4);
        for w in &frontier {
            for l in Letter::ALL {
                if w.0.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(l);
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}

/// Image of `w` under `a -> a`, `b -> b`.
pub fn evaluate<G: Group>(group: &G, w: &Word, a: &G::Elem, b: &G::Elem) -> G::Elem {
    let images = [a.clone(), group.inv(a), b.clone(), group.inv(b)];
    evaluate_with(group, w.letters(), &images)
}

/// Evaluates a (not necessarily reduced) letter string against precomputed
/// images of `a, a^-1, b, b^-1`.
pub fn evaluate_with<G: Group>(group: &G, letters: &[Letter], images: &[G::Elem; 4]) -> G::Elem {
    letters.iter().fold(group.identity(), |acc, &l| {
        group.mul(&acc, &images[l as usize])
    })
}

/// Iterated commutator of a `2^l`-tuple: `psi_0(g) = g`,
/// `psi_l = [psi_{l-1}(left half), psi_{l-1}(right half)]`.
pub fn psi<G: Group>(group: &G, l: u32, tuple: &[G::Elem]) -> Result<G::Elem> {
    if l > 4 {
        return Err(Error::InvalidParameter(format!(
            "commutator depth {l} exceeds 4"
        )));
    }
    let expected = 1usize << l;
    if tuple.len() != expected {
        return Err(Error::Arity {
            expected,
            got: tuple.len(),
        });
    }
    Ok(psi_unchecked(group, tuple))
}

fn psi_unchecked<G: Group>(group: &G, tuple: &[G::Elem]) -> G::Elem {
    if tuple.len() == 1 {
        return tuple[0].clone();
    }
    let (left, right) = tuple.split_at(tuple.len() / 2);
    group.commutator(&psi_unchecked(group, left), &psi_unchecked(group, right))
}

pub const MAX_EXHAUSTIVE_WALK: usize = 14;

/// Number of length-`n` strings over `{a, A, b, B}` that freely reduce to
/// the identity, by exhaustive depth-first enumeration of all `4^n` strings.
pub fn count_closed_walks(n: usize) -> Result<u64> {
    if n > MAX_EXHAUSTIVE_WALK {
        return Err(Error::Capacity {
            what: format!("exhaustive enumeration of 4^{n} strings"),
            limit: MAX_EXHAUSTIVE_WALK as u64,
            hint: "use closed_walks_on_tree for longer walks",
        });
    }
    fn go(stack: &mut Vec<Letter>, remaining: usize) -> u64 {
        if remaining == 0 {
            return stack.is_empty() as u64;
        }
        // Too deep to return in time.
        if stack.len() > remaining {
            return 0;
        }
        let mut total = 0;
        for l in Letter::ALL {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
                total += go(stack, remaining - 1);
                stack.push(l.inverse());
            } else {
                stack.push(l);
                total += go(stack, remaining - 1);
                stack.pop();
            }
        }
        total
    }
    Ok(go(&mut Vec::with_capacity(n), n))
}

/// Returns to the root of the 4-regular tree in `n` steps, counted by
/// dynamic programming over the distance from the root.
pub fn closed_walks_on_tree(n: usize) -> u128 {
    let mut dist = vec![0u128; n + 2];
    dist[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u128; n + 2];
        for k in 0..=n {
            let c = dist[k];
            if c == 0 {
                continue;
            }
            if k == 0 {
                next[1] += 4 * c;
            } else {
                next[k - 1] += c;
                next[k + 1] += 3 * c;
            }
        }
        dist = next;
    }
    dist[0]
}

/// `count <= (2 sqrt 3)^n`, compared exactly as `count^2 <= 12^n`.
pub fn within_kesten_bound(count: u128, n: u32) -> bool {
    match (count.checked_mul(count), 12u128.checked_pow(n)) {
        (Some(lhs), Some(rhs)) => lhs <= rhs,
        (None, Some(_)) => false,
        (_, None) => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suzuki::Suzuki;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(
            Word::reduce([Letter::A, Letter::AInv, Letter::B]),
            Word::b()
        );
        assert_eq!(Word::reduce([]), Word::identity());
        assert_eq!(w("aAbBba").to_string(), "ba");
        assert_eq!(w("1"), Word::identity());
        assert!("ax".parse::<Word>().is_err());
    }

    fn letters() -> impl Strategy<Value = Vec<Letter>> {
        proptest::collection::vec((0u8..4).prop_map(Letter::from_index), 0..=20)
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(s in letters()) {
            let r = Word::reduce(s.clone());
            prop_assert_eq!(Word::reduce(r.letters().to_vec()), r.clone());
            prop_assert_eq!(r.len() % 2, s.len() % 2);
        }

        #[test]
        fn free_group_evaluation_is_homomorphic(s in letters(), t in letters()) {
            let (u, v) = (Word::reduce(s), Word::reduce(t));
            let g = FreeGroup;
            let lhs = evaluate(&g, &u.concat(&v), &Word::a(), &Word::b());
            prop_assert_eq!(lhs, u.concat(&v));
        }
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(ball(0).unwrap().len(), 1);
        assert_eq!(ball(1).unwrap().len(), 5);
        assert_eq!(ball(3).unwrap().len(), 53);
        for l in 0..=10 {
            let b = ball(l).unwrap();
            assert_eq!(b.len(), 2 * 3usize.pow(l as u32) - 1);
            let distinct: std::collections::HashSet<_> = b.iter().collect();
            assert_eq!(distinct.len(), b.len());
        }
        assert!(ball(15).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let g = Suzuki::with_degree(3).unwrap();
        let t = g.t_element();
        let id = g.identity_element();
        assert_eq!(evaluate(&g, &Word::identity(), &t, &t), id);
        assert_eq!(evaluate(&g, &w("abAB"), &t, &id), id);
        assert_eq!(evaluate(&g, &w("aaaa"), &t, &t), id);
    }

    #[test]
    fn suzuki_evaluation_is_homomorphic() {
        use rand::SeedableRng;
        let g = Suzuki::with_degree(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let words = ball(4).unwrap();
        use rand::seq::IndexedRandom;
        let a = g.random_element(&mut rng);
        let b = g.random_element(&mut rng);
        for _ in 0..1000 {
            let u = words.choose(&mut rng).unwrap();
            let v = words.choose(&mut rng).unwrap();
            let lhs = evaluate(&g, &u.concat(v), &a, &b);
            let rhs = g.multiply(&evaluate(&g, u, &a, &b), &evaluate(&g, v, &a, &b));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn psi_examples() {
        let g = FreeGroup;
        let x = w("ab");
        assert_eq!(
            psi(&g, 1, &[x.clone(), x.clone()]).unwrap(),
            Word::identity()
        );
        assert_eq!(psi(&g, 0, std::slice::from_ref(&x)).unwrap(), x);
        assert!(matches!(
            psi(&g, 2, &[x.clone(), x.clone()]),
            Err(Error::Arity {
                expected: 4,
                got: 2
            })
        ));
        // abelian subgroup <a>
        let powers: Vec<Word> = (1..=8).map(|k| Word::a().pow(k)).collect();
        assert!(psi(&g, 3, &powers).unwrap().is_identity());
        assert_eq!(psi(&g, 1, &[Word::a(), Word::b()]).unwrap(), w("ABab"));
    }

    #[test]
    fn closed_walk_counts() {
        assert_eq!(count_closed_walks(1).unwrap(), 0);
        assert_eq!(count_closed_walks(2).unwrap(), 4);
        assert_eq!(count_closed_walks(3).unwrap(), 0);
        assert_eq!(count_closed_walks(0).unwrap(), 1);
        for n in 0..=10 {
            assert_eq!(
                count_closed_walks(n).unwrap() as u128,
                closed_walks_on_tree(n)
            );
        }
        assert!(count_closed_walks(15).is_err());
    }

    #[test]
    fn kesten_comparison() {
        assert!(within_kesten_bound(4, 2));
        assert!(within_kesten_bound(12, 2));
        assert!(!within_kesten_bound(13, 2));
        assert!(within_kesten_bound(0, 1));
    }

    #[test]
    fn commuting_words_share_a_root() {
        let words = ball(4).unwrap();
        for u in &words {
            for v in &words {
                if u.is_identity() || v.is_identity() {
                    continue;
                }
                if u.commutator(v).is_identity() {
                    let (ru, rv) = (u.root(), v.root());
                    assert!(ru == rv || ru == rv.inverse(), "{u} {v}");
                }
            }
        }
        assert_eq!(w("abab").root(), w("ab"));
        assert_eq!(w("baBAbaBA").root().to_string(), "baBA");
        assert_eq!(w("Aaba").root(), w("ba"));
        assert_eq!(w("abbA").root(), w("abA"));
    }
}
