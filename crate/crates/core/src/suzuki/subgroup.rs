use std::collections::{HashSet, VecDeque};

use super::{group_order, BruhatParams, Suzuki, SuzukiElement};
use crate::error::{Error, Result};
use crate::field::{Field, SubfieldEmbedding};
use crate::group::Group;

/// The copy of Sz(q0) inside Sz(q) whose Bruhat parameters all lie in GF(q0).
#[derive(Clone, Debug)]
pub struct SubfieldSubgroup {
    big: Suzuki,
    sub: Suzuki,
    embedding: SubfieldEmbedding,
}

impl SubfieldSubgroup {
    pub fn new(big: &Field, sub: &Field) -> Result<Self> {
        if big.degree() % 2 == 0 || sub.degree() % 2 == 0 {
            return Err(Error::InvalidParameter("both degrees must be odd".into()));
        }
        let embedding = SubfieldEmbedding::new(sub, big)?;
        Ok(SubfieldSubgroup {
            big: Suzuki::new(big.clone()),
            sub: Suzuki::new(sub.clone()),
            embedding,
        })
    }

    pub fn sub_group(&self) -> &Suzuki {
        &self.sub
    }

    pub fn order(&self) -> u128 {
        group_order(self.sub.q()).expect("odd degree")
    }

    pub fn contains(&self, g: &SuzukiElement) -> bool {
        g.params()
            .values()
            .into_iter()
            .all(|x| self.embedding.contains(x))
    }

    /// Image of an element of Sz(q0).
    pub fn embed(&self, g: &SuzukiElement) -> SuzukiElement {
        let p: BruhatParams = g.params().map(|x| self.embedding.embed(x));
        self.big.assemble(p)
    }

    /// All embedded elements (for small q0).
    pub fn elements(&self) -> impl Iterator<Item = SuzukiElement> + '_ {
        self.sub.elements().map(move |g| self.embed(&g))
    }
}

/// Outcome of a closure computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generation {
    Generates,
    /// The closure stabilized at this size, short of the whole group.
    Proper(u64),
    /// The cap was reached first.
    Indeterminate {
        explored: u64,
    },
}

impl Suzuki {
    /// Breadth-first closure of `{a, a^-1, b, b^-1}`, stopped after `cap`
    /// elements.
    pub fn generates(&self, a: &SuzukiElement, b: &SuzukiElement, cap: u64) -> Generation {
        let gens = [*a, self.inverse(a), *b, self.inverse(b)];
        let order = self.order();
        let mut seen: HashSet<SuzukiElement> = HashSet::new();
        let mut queue = VecDeque::new();
        let id = self.identity();
        seen.insert(id);
        queue.push_back(id);
        while let Some(x) = queue.pop_front() {
            for s in &gens {
                let y = self.multiply(&x, s);
                if seen.insert(y) {
                    if seen.len() as u128 == order {
                        return Generation::Generates;
                    }
                    if seen.len() as u64 >= cap {
                        return Generation::Indeterminate {
                            explored: seen.len() as u64,
                        };
                    }
                    queue.push_back(y);
                }
            }
        }
        if seen.len() as u128 == order {
            Generation::Generates
        } else {
            Generation::Proper(seen.len() as u64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sz2_inside_sz8() {
        let f8 = Field::new(3).unwrap();
        let f2 = Field::new(1).unwrap();
        let h = SubfieldSubgroup::new(&f8, &f2).unwrap();
        let g = Suzuki::new(f8);
        let members: Vec<SuzukiElement> = g.elements().filter(|e| h.contains(e)).collect();
        assert_eq!(members.len(), 20);
        assert_eq!(h.order(), 20);
        let embedded: HashSet<SuzukiElement> = h.elements().collect();
        assert_eq!(embedded.len(), 20);
        assert!(members.iter().all(|e| embedded.contains(e)));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        use rand::seq::IndexedRandom;
        for _ in 0..1000 {
            let x = members.choose(&mut rng).unwrap();
            let y = members.choose(&mut rng).unwrap();
            assert!(h.contains(&g.multiply(x, y)));
        }
    }

    #[test]
    fn sz8_inside_sz512() {
        let f512 = Field::new(9).unwrap();
        let f8 = Field::new(3).unwrap();
        let h = SubfieldSubgroup::new(&f512, &f8).unwrap();
        assert_eq!(h.order(), 29120);
        let g = Suzuki::new(f512);
        let small = h.sub_group().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let x = h.embed(&small.random_element(&mut rng));
            let y = h.embed(&small.random_element(&mut rng));
            assert!(h.contains(&g.multiply(&x, &y)));
        }
        // a generic element of Sz(512) is outside
        let z = g.random_big_cell(&mut rng);
        let _ = h.contains(&z);
    }

    #[test]
    fn non_divisor_rejected() {
        let f32 = Field::new(5).unwrap();
        let f8 = Field::new(3).unwrap();
        assert!(SubfieldSubgroup::new(&f32, &f8).is_err());
    }

    #[test]
    fn generation_examples() {
        let g = Suzuki::with_degree(3).unwrap();
        let id = g.identity_element();
        assert_eq!(g.generates(&id, &id, 100_000), Generation::Proper(1));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = g.random_borel(&mut rng);
        let b = g.random_borel(&mut rng);
        match g.generates(&a, &b, 100_000) {
            Generation::Proper(n) => assert!(n <= 448 && 448 % n == 0),
            other => panic!("{other:?}"),
        }
        let a = g.random_element(&mut rng);
        assert!(matches!(
            g.generates(&a, &g.t_element(), 10),
            Generation::Indeterminate { explored: 10 } | Generation::Proper(_)
        ));
    }
}
