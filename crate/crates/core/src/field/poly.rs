//! Dense polynomials over F_p (low degree first), used only for the
//! modulus search.

use super::arith::inv_mod;

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let df = f.len() - 1;
    let lead_inv = inv_mod(f[df], p);
    while r.len() > df {
        let top = r.len() - 1;
        let c = r[top] * lead_inv % p;
        let shift = top - df;
        for (i, &fc) in f.iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p - c) * fc % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    rem(&out, f, p)
}

fn powmod(a: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = rem(a, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &base, f, p);
        }
        base = mulmod(&base, &base, f, p);
        e >>= 1;
    }
    acc
}

fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or test: `f` (monic, degree d) is irreducible iff
/// gcd(x^(p^i) - x, f) = 1 for all i <= d/2.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = vec![0u64, 1];
    let mut h = x.clone();
    for _ in 1..=d / 2 {
        h = powmod(&h, p, f, p);
        let mut t = h.clone();
        t.resize(t.len().max(2), 0);
        t[1] = (t[1] + p - 1) % p;
        let g = gcd(f, &t, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Least monic irreducible of degree `d`, scanning lower coefficients as a
/// base-p counter with the constant term varying fastest.
pub(crate) fn least_irreducible(p: u64, d: usize) -> Option<Vec<u64>> {
    let total = crate::numth::checked_pow(p, d)?;
    for idx in 0..total {
        let mut f = Vec::with_capacity(d + 1);
        let mut r = idx;
        for _ in 0..d {
            f.push(r % p);
            r /= p;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            return Some(f);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_least_irreducibles() {
        assert_eq!(least_irreducible(2, 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(least_irreducible(2, 3).unwrap(), vec![1, 1, 0, 1]);
        assert_eq!(least_irreducible(2, 4).unwrap(), vec![1, 1, 0, 0, 1]);
        // x^2 + 1 over F_3
        assert_eq!(least_irreducible(3, 2).unwrap(), vec![1, 0, 1]);
        assert!(!is_irreducible(&[1, 0, 1], 2));
        assert!(!is_irreducible(&[2, 0, 0, 1], 3)); // x^3 + 2 = (x + 2)^3 over F_3
    }
}
