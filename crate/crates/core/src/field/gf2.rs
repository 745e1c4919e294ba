//! Dense polynomials over GF(2) packed into a `u64` (bit `i` is the
//! coefficient of `X^i`). Only used to select and verify field moduli.

pub(crate) fn degree(p: u64) -> Option<u32> {
    if p == 0 {
        None
    } else {
        Some(63 - p.leading_zeros())
    }
}

/// Carry-less product. Callers keep `deg a + deg b < 64`.
pub(crate) fn clmul(a: u64, b: u64) -> u64 {
    let mut acc = 0u64;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

pub(crate) fn rem(mut a: u64, m: u64) -> u64 {
    let dm = degree(m).expect("modulus must be nonzero");
    while let Some(da) = degree(a) {
        if da < dm {
            break;
        }
        a ^= m << (da - dm);
    }
    a
}

pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    rem(clmul(rem(a, m), rem(b, m)), m)
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// Rabin-style test: `f` of degree `m` is irreducible iff
/// `gcd(X^(2^i) - X, f) = 1` for every `1 <= i <= m/2`.
pub(crate) fn is_irreducible(f: u64) -> bool {
    let Some(m) = degree(f) else { return false };
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let x = rem(0b10, f);
    let mut xp = x;
    for _ in 1..=m / 2 {
        xp = mulmod(xp, xp, f);
        if gcd(f, xp ^ x) != 1 {
            return false;
        }
    }
    true
}

/// Least irreducible polynomial of degree `m` with nonzero constant term,
/// in the integer order of its coefficient bit vector.
pub(crate) fn least_irreducible(m: u32) -> u64 {
    let lo = (1u64 << m) | 1;
    let hi = 1u64 << (m + 1);
    (lo..hi)
        .step_by(2)
        .find(|&f| is_irreducible(f))
        .expect("irreducible polynomials exist in every degree")
}
