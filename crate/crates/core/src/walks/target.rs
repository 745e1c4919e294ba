use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::rng;
use crate::suzuki::{GroupIndex, IndexMode, SubfieldSubgroup, Suzuki, SuzukiElement};

type Predicate = Arc<dyn Fn(&SuzukiElement) -> bool + Send + Sync>;
type Sampler = Arc<dyn Fn(&mut ChaCha8Rng) -> SuzukiElement + Send + Sync>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TargetTag {
    Borel,
    SubfieldSz { sub_degree: u32 },
    Cyclic { order: u64 },
    Custom(String),
}

impl fmt::Display for TargetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetTag::Borel => write!(f, "B"),
            TargetTag::SubfieldSz { sub_degree } => write!(f, "Sz(2^{sub_degree})"),
            TargetTag::Cyclic { order } => write!(f, "C{order}"),
            TargetTag::Custom(name) => write!(f, "{name}"),
        }
    }
}

/// A subgroup used as a non-concentration target: a membership predicate,
/// a sampler of its elements, and optionally a conjugator `x` (the target is
/// then `x^-1 H x`).
#[derive(Clone)]
pub struct SubgroupTarget {
    tag: TargetTag,
    group: Suzuki,
    order: Option<u128>,
    conjugator: Option<SuzukiElement>,
    base: Predicate,
    sampler: Sampler,
    listed: Option<Arc<Vec<SuzukiElement>>>,
}

impl fmt::Debug for SubgroupTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubgroupTarget")
            .field("tag", &self.tag)
            .field("order", &self.order)
            .field("conjugated", &self.conjugator.is_some())
            .finish()
    }
}

impl SubgroupTarget {
    pub fn borel(group: &Suzuki) -> SubgroupTarget {
        let g = group.clone();
        let q = group.q() as u128;
        SubgroupTarget {
            tag: TargetTag::Borel,
            group: group.clone(),
            order: Some(q * q * (q - 1)),
            conjugator: None,
            base: Arc::new(|e: &SuzukiElement| e.is_borel()),
            sampler: Arc::new(move |rng: &mut ChaCha8Rng| g.random_borel(rng)),
            listed: None,
        }
    }

    pub fn subfield(group: &Suzuki, sub_degree: u32) -> Result<SubgroupTarget> {
        let sub_field = Field::new(sub_degree)?;
        let sub = Arc::new(SubfieldSubgroup::new(group.field(), &sub_field)?);
        let listed = (sub_degree <= 3).then(|| Arc::new(sub.elements().collect::<Vec<_>>()));
        let (s1, s2) = (sub.clone(), sub.clone());
        Ok(SubgroupTarget {
            tag: TargetTag::SubfieldSz { sub_degree },
            group: group.clone(),
            order: Some(sub.order()),
            conjugator: None,
            base: Arc::new(move |e: &SuzukiElement| s1.contains(e)),
            sampler: Arc::new(move |rng: &mut ChaCha8Rng| {
                s2.embed(&s2.sub_group().random_element(rng))
            }),
            listed,
        })
    }

    /// The cyclic subgroup generated by `g` (its powers are stored).
    pub fn cyclic(group: &Suzuki, g: &SuzukiElement) -> Result<SubgroupTarget> {
        let mut powers = vec![group.identity_element()];
        let mut x = *g;
        while x != powers[0] {
            powers.push(x);
            x = group.multiply(&x, g);
            if powers.len() > 1 << 20 {
                return Err(Error::Capacity {
                    what: "cyclic subgroup".into(),
                    limit: 1 << 20,
                    hint: "choose an element of smaller order",
                });
            }
        }
        let set: Arc<HashSet<SuzukiElement>> = Arc::new(powers.iter().copied().collect());
        let list = Arc::new(powers);
        let l2 = list.clone();
        Ok(SubgroupTarget {
            tag: TargetTag::Cyclic {
                order: list.len() as u64,
            },
            group: group.clone(),
            order: Some(list.len() as u128),
            conjugator: None,
            base: Arc::new(move |e: &SuzukiElement| set.contains(e)),
            sampler: Arc::new(move |rng: &mut ChaCha8Rng| {
                use rand::seq::IndexedRandom;
                *l2.choose(rng).expect("nonempty")
            }),
            listed: Some(list),
        })
    }

    pub fn custom(
        name: &str,
        group: &Suzuki,
        predicate: impl Fn(&SuzukiElement) -> bool + Send + Sync + 'static,
        sampler: impl Fn(&mut ChaCha8Rng) -> SuzukiElement + Send + Sync + 'static,
    ) -> SubgroupTarget {
        SubgroupTarget {
            tag: TargetTag::Custom(name.to_string()),
            group: group.clone(),
            order: None,
            conjugator: None,
            base: Arc::new(predicate),
            sampler: Arc::new(sampler),
            listed: None,
        }
    }

    /// `x^-1 H x`.
    pub fn conjugated_by(&self, x: &SuzukiElement) -> SubgroupTarget {
        let x = match self.conjugator {
            Some(prev) => self.group.multiply(&prev, x),
            None => *x,
        };
        SubgroupTarget {
            conjugator: Some(x),
            ..self.clone()
        }
    }

    pub fn tag(&self) -> &TargetTag {
        &self.tag
    }

    /// Tag plus a conjugation marker, for reports.
    pub fn label(&self) -> String {
        match self.conjugator {
            Some(_) => format!("{}^x", self.tag),
            None => self.tag.to_string(),
        }
    }

    pub fn order(&self) -> Option<u128> {
        self.order
    }

    pub fn conjugator(&self) -> Option<&SuzukiElement> {
        self.conjugator.as_ref()
    }

    pub fn contains(&self, g: &SuzukiElement) -> bool {
        match &self.conjugator {
            // g in x^-1 H x  <=>  x g x^-1 in H
            Some(x) => {
                let xi = self.group.inverse(x);
                (self.base)(&self.group.multiply(&self.group.multiply(x, g), &xi))
            }
            None => (self.base)(g),
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> SuzukiElement {
        let h = (self.sampler)(rng);
        match &self.conjugator {
            Some(x) => self.group.conjugate(&h, x),
            None => h,
        }
    }

    /// Checks on `pairs` sampled pairs that samples are members and that
    /// products of members are members.
    pub fn self_check(&self, pairs: usize, seed: u64) -> Result<()> {
        let mut rng = rng::stream(seed, "target-self-check", 0);
        for _ in 0..pairs {
            let x = self.sample(&mut rng);
            let y = self.sample(&mut rng);
            if !self.contains(&x) || !self.contains(&y) {
                return Err(Error::Inconsistent(format!(
                    "sampler of {} produced a non-member",
                    self.label()
                )));
            }
            if !self.contains(&self.group.multiply(&x, &y)) {
                return Err(Error::Inconsistent(format!(
                    "predicate of {} is not closed under products",
                    self.label()
                )));
            }
        }
        Ok(())
    }

    /// Membership of every indexed element, by rank.
    pub fn mask(&self, index: &GroupIndex) -> Vec<bool> {
        let n = index.len();
        if let (Some(list), IndexMode::Full) = (&self.listed, index.mode()) {
            let mut mask = vec![false; n];
            for h in list.iter() {
                let h = match &self.conjugator {
                    Some(x) => self.group.conjugate(h, x),
                    None => *h,
                };
                mask[index.index_of(&h) as usize] = true;
            }
            return mask;
        }
        if self.tag == TargetTag::Borel && self.conjugator.is_none() {
            let b = index.borel_len() as usize;
            return (0..n).map(|r| r < b).collect();
        }
        (0..n as u64)
            .into_par_iter()
            .map(|r| self.contains(&index.element(r)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn targets_pass_self_check_and_have_correct_masks() {
        let g = Suzuki::with_degree(3).unwrap();
        let idx = GroupIndex::enumerate(g.field()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let x = g.random_element(&mut rng);
        let targets = vec![
            SubgroupTarget::borel(&g),
            SubgroupTarget::subfield(&g, 1).unwrap(),
            SubgroupTarget::cyclic(&g, &g.random_big_cell(&mut rng)).unwrap(),
            SubgroupTarget::borel(&g).conjugated_by(&x),
            SubgroupTarget::subfield(&g, 1).unwrap().conjugated_by(&x),
        ];
        for t in &targets {
            t.self_check(1000, 1).unwrap();
            let mask = t.mask(&idx);
            let count = mask.iter().filter(|&&b| b).count() as u128;
            assert_eq!(Some(count), t.order(), "{}", t.label());
            // mask agrees with the predicate
            for r in (0..idx.len()).step_by(97) {
                assert_eq!(mask[r], t.contains(&idx.element(r as u64)));
            }
        }
        assert_eq!(targets[0].order(), Some(448));
        assert_eq!(targets[1].order(), Some(20));
    }

    #[test]
    fn broken_predicate_is_caught() {
        let g = Suzuki::with_degree(3).unwrap();
        let g2 = g.clone();
        // the big cell is not a subgroup
        let t = SubgroupTarget::custom(
            "bigcell",
            &g,
            |e| !e.is_borel(),
            move |rng| g2.random_big_cell(rng),
        );
        assert!(t.self_check(1000, 0).is_err());
    }
}
