use serde::Serialize;

use super::{Letter, Word};
use crate::group::Group;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GirthOutcome {
    Pass,
    /// Shortest relation found; ties broken lexicographically (`a < A < b < B`).
    Fail(Word),
}

impl GirthOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, GirthOutcome::Pass)
    }
}

/// Checks that no nontrivial reduced word of length `<= max_len` evaluates to
/// the identity at `(a, b)`.
///
/// Depth-first over the tree of reduced words carrying the running product,
/// so each node costs one multiplication. Once a relation of length `k` is
/// found the depth limit drops to `k - 1`.
pub fn girth_test<G: Group>(group: &G, a: &G::Elem, b: &G::Elem, max_len: usize) -> GirthOutcome {
    let images = [a.clone(), group.inv(a), b.clone(), group.inv(b)];
    let mut best: Option<Vec<Letter>> = None;
    let mut limit = max_len;
    let mut path = Vec::with_capacity(max_len);
    dfs(
        group,
        &images,
        &group.identity(),
        &mut path,
        &mut limit,
        &mut best,
    );
    match best {
        None => GirthOutcome::Pass,
        Some(letters) => GirthOutcome::Fail(Word::reduce(letters)),
    }
}

fn dfs<G: Group>(
    group: &G,
    images: &[G::Elem; 4],
    current: &G::Elem,
    path: &mut Vec<Letter>,
    limit: &mut usize,
    best: &mut Option<Vec<Letter>>,
) {
    if path.len() >= *limit {
        return;
    }
    for l in Letter::ALL {
        if path.last() == Some(&l.inverse()) {
            continue;
        }
        if path.len() >= *limit {
            return;
        }
        let next = group.mul(current, &images[l as usize]);
        path.push(l);
        if group.is_identity(&next) {
            *best = Some(path.clone());
            *limit = path.len() - 1;
            path.pop();
            return;
        }
        dfs(group, images, &next, path, limit, best);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suzuki::Suzuki;
    use crate::words::{ball, evaluate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equal_generators_fail_with_ab_inverse() {
        let g = Suzuki::with_degree(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = g.random_big_cell(&mut rng);
        match girth_test(&g, &a, &a, 6) {
            GirthOutcome::Fail(w) => {
                assert_eq!(w.to_string(), "aB");
            }
            GirthOutcome::Pass => panic!("a = b must fail"),
        }
    }

    #[test]
    fn involution_fails_with_a_squared() {
        let g = Suzuki::with_degree(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = g.random_big_cell(&mut rng);
        let out = girth_test(&g, &g.t_element(), &b, 2);
        assert_eq!(out, GirthOutcome::Fail("aa".parse().unwrap()));
    }

    #[test]
    fn matches_brute_force_over_the_ball() {
        let g = Suzuki::with_degree(3).unwrap();
        let words = ball(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let a = g.random_element(&mut rng);
            let b = g.random_element(&mut rng);
            let brute = words
                .iter()
                .filter(|w| !w.is_identity())
                .find(|w| g.is_identity(&evaluate(&g, w, &a, &b)));
            match (girth_test(&g, &a, &b, 5), brute) {
                (GirthOutcome::Pass, None) => {}
                (GirthOutcome::Fail(w), Some(v)) => assert_eq!(&w, v),
                (x, y) => panic!("{x:?} vs {y:?}"),
            }
        }
    }
}
