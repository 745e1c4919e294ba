//! Minimal group interface shared by the word machinery and the walks.

pub trait Group {
    type Elem: Clone + PartialEq;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn inv(&self, x: &Self::Elem) -> Self::Elem;

    fn is_identity(&self, x: &Self::Elem) -> bool {
        *x == self.identity()
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    fn commutator(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let xi = self.inv(x);
        let yi = self.inv(y);
        self.mul(&self.mul(&xi, &yi), &self.mul(x, y))
    }

    fn pow(&self, x: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = x.clone();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}
