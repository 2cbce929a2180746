//! The ambient field F_(q^n) with q = p^s, its subfields and F_q coordinates.

mod arith;
pub(crate) mod fq;
pub(crate) mod linop;
mod poly;
mod report;

pub use report::{FieldReport, SubfieldEntry};

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use rand::Rng;

use crate::error::{budget, Error, Result};
use crate::numth::{checked_pow, divisors, is_prime, prime_factors};
pub(crate) use arith::{inv_mod, Arith};
use fq::{FqArith, FQ_TABLE_LIMIT};
pub(crate) use linop::LinOp;

/// Default cap on the number of field elements.
pub const DEFAULT_ELEMENT_BUDGET: u64 = 1 << 26;

/// A field element in packed polynomial coordinates.
///
/// The derived order compares the highest-degree coordinate first, which
/// agrees with the integer encoding `sum c_i p^i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Elem(pub(crate) u64);

impl Elem {
    pub const ZERO: Elem = Elem(0);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Elem({:#x})", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct FieldCtx {
    pub(crate) ar: Arith,
    s: usize,
    n: usize,
    q: u64,
    size: u64,
    modulus: Vec<u64>,
    g: Elem,
    frob_p: LinOp,
    to_basis: LinOp,
    from_basis: LinOp,
    pub(crate) fq: FqArith,
    subfields: Vec<(usize, Elem)>,
    id: u64,
}

impl FieldCtx {
    /// F_(q^n) with q = p^s under the default element budget.
    pub fn new(p: u64, s: usize, n: usize) -> Result<Self> {
        Self::with_budget(p, s, n, DEFAULT_ELEMENT_BUDGET)
    }

    /// Same as [`FieldCtx::new`] with `q` given as a prime power.
    pub fn from_q(q: u64, n: usize) -> Result<Self> {
        let (p, s) = crate::numth::prime_power(q).ok_or(Error::NotPrime(q))?;
        Self::new(p, s, n)
    }

    pub fn with_budget(p: u64, s: usize, n: usize, element_budget: u64) -> Result<Self> {
        check_shape(p, s, n, element_budget)?;
        let modulus =
            poly::least_irreducible(p, s * n).ok_or(Error::NoIrreducibleFound(s * n))?;
        Self::build(p, s, n, modulus, None)
    }

    /// Rebuild a field from a stored modulus and generator, validating both.
    pub fn from_parts(
        p: u64,
        s: usize,
        n: usize,
        modulus: &[u64],
        g: &[u64],
        element_budget: u64,
    ) -> Result<Self> {
        check_shape(p, s, n, element_budget)?;
        let d = s * n;
        if modulus.len() != d + 1 {
            return Err(Error::BadLength {
                expected: d + 1,
                got: modulus.len(),
            });
        }
        if g.len() != d {
            return Err(Error::BadLength {
                expected: d,
                got: g.len(),
            });
        }
        if modulus[d] != 1 || modulus.iter().any(|&c| c >= p) || !poly::is_irreducible(modulus, p)
        {
            return Err(Error::BadParams("modulus is not monic irreducible".into()));
        }
        if g.iter().any(|&c| c >= p) {
            return Err(Error::BadParams("generator coordinate out of range".into()));
        }
        let ar = Arith::new(p, modulus);
        let g = Elem(ar.pack(g));
        Self::build(p, s, n, modulus.to_vec(), Some(g))
    }

    fn build(p: u64, s: usize, n: usize, modulus: Vec<u64>, g: Option<Elem>) -> Result<Self> {
        let d = s * n;
        let ar = Arith::new(p, &modulus);
        let size = checked_pow(p, d).expect("checked by shape");
        let order = size - 1;
        let factors = prime_factors(order);
        let is_primitive =
            |x: u64| x != 0 && factors.iter().all(|&r| ar.pow(x, order / r) != ar.one());
        let g = match g {
            Some(g) => {
                if !is_primitive(g.0) {
                    return Err(Error::BadParams("generator is not primitive".into()));
                }
                g
            }
            None => Elem(
                (1..size)
                    .map(|i| ar.from_index(i))
                    .find(|&x| is_primitive(x))
                    .expect("a finite field has a primitive element"),
            ),
        };
        let cols: Vec<u64> = (0..d).map(|i| ar.pow(1u64 << (i as u32 * ar.lane), p)).collect();
        let frob_p = LinOp::new(&ar, &cols);
        let q = checked_pow(p, s).expect("q <= p^d");
        let subfields: Vec<(usize, Elem)> = divisors(n)
            .into_iter()
            .map(|dd| {
                let qd = checked_pow(q, dd).unwrap();
                (dd, Elem(ar.pow(g.0, order / (qd - 1))))
            })
            .collect();
        let omega = subfields[0].1;
        // basis element (i, j) = w^j g^i at position i*s + j
        let mut basis = Vec::with_capacity(d);
        for i in 0..n {
            let gi = ar.pow(g.0, i as u64);
            for j in 0..s {
                basis.push(ar.mul(ar.pow(omega.0, j as u64), gi));
            }
        }
        let inv = linop::invert_columns(&ar, &basis)
            .ok_or_else(|| Error::BadParams("powers of g do not form an F_q basis".into()))?;
        let from_basis = LinOp::new(&ar, &basis);
        let to_basis = LinOp::new(&ar, &inv);
        let fq = if s == 1 {
            FqArith::Prime(p)
        } else {
            if q > FQ_TABLE_LIMIT {
                return Err(budget("F_q scalar tables", q, FQ_TABLE_LIMIT));
            }
            let qs = q as usize;
            let elem_of = |idx: usize| from_basis.apply(&ar, ar.from_index(idx as u64));
            let index_of = |x: u64| {
                let e = to_basis.apply(&ar, x);
                (0..s).rev().fold(0u64, |acc, j| acc * p + ar.lane_of(e, j)) as u32
            };
            let elems: Vec<u64> = (0..qs).map(elem_of).collect();
            let mut add = vec![0u32; qs * qs];
            let mut mul = vec![0u32; qs * qs];
            for a in 0..qs {
                for b in 0..qs {
                    add[a * qs + b] = index_of(ar.add(elems[a], elems[b]));
                    mul[a * qs + b] = index_of(ar.mul(elems[a], elems[b]));
                }
            }
            FqArith::table(qs, add, mul)
        };
        let mut h = DefaultHasher::new();
        (p, s, n, &modulus, g.0).hash(&mut h);
        Ok(FieldCtx {
            ar,
            s,
            n,
            q,
            size,
            modulus,
            g,
            frob_p,
            to_basis,
            from_basis,
            fq,
            subfields,
            id: h.finish(),
        })
    }

    pub fn p(&self) -> u64 {
        self.ar.p
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Degree over the prime field, s*n.
    pub fn prime_degree(&self) -> usize {
        self.ar.deg
    }
    /// Number of field elements.
    pub fn size(&self) -> u64 {
        self.size
    }
    /// Monic modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    /// Least primitive element.
    pub fn g(&self) -> Elem {
        self.g
    }
    pub(crate) fn id(&self) -> u64 {
        self.id
    }

    /// q^d for a divisor-sized exponent.
    pub fn q_pow(&self, d: usize) -> u64 {
        checked_pow(self.q, d).expect("q^d fits since d <= n")
    }

    pub fn zero(&self) -> Elem {
        Elem(0)
    }
    pub fn one(&self) -> Elem {
        Elem(self.ar.one())
    }

    /// Element with the given polynomial coordinates (constant term first).
    pub fn elem(&self, coords: &[u64]) -> Result<Elem> {
        if coords.len() != self.ar.deg {
            return Err(Error::BadLength {
                expected: self.ar.deg,
                got: coords.len(),
            });
        }
        if coords.iter().any(|&c| c >= self.ar.p) {
            return Err(Error::BadParams("coordinate not reduced mod p".into()));
        }
        Ok(Elem(self.ar.pack(coords)))
    }

    pub fn coords(&self, x: Elem) -> Vec<u64> {
        let mut v = vec![0u64; self.ar.deg];
        self.ar.unpack(x.0, &mut v);
        v
    }

    /// Element whose integer encoding `sum c_i p^i` is `idx`.
    pub fn from_index(&self, idx: u64) -> Elem {
        Elem(self.ar.from_index(idx))
    }

    pub fn to_index(&self, x: Elem) -> u64 {
        self.ar.to_index(x.0)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.ar.add(a.0, b.0))
    }
    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.ar.sub(a.0, b.0))
    }
    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.ar.neg(a.0))
    }
    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.ar.mul(a.0, b.0))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        Elem(self.ar.pow(a.0, e))
    }

    /// Power with a signed exponent; negative exponents need a unit.
    pub fn pow_signed(&self, a: Elem, e: i64) -> Result<Elem> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            let inv = self.inv(a)?;
            Ok(self.pow(inv, e.unsigned_abs()))
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.size - 2))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// x^(q^j).
    pub fn frobenius(&self, x: Elem, j: usize) -> Elem {
        let steps = (j % self.n) * self.s;
        let mut y = x.0;
        for _ in 0..steps {
            y = self.frob_p.apply(&self.ar, y);
        }
        Elem(y)
    }

    pub fn divisors(&self) -> Vec<usize> {
        divisors(self.n)
    }

    fn check_divisor(&self, d: usize) -> Result<()> {
        if d == 0 || !self.n.is_multiple_of(d) {
            return Err(Error::NotADivisor(d, self.n));
        }
        Ok(())
    }

    /// Generator g^((q^n-1)/(q^d-1)) of F_(q^d)^*.
    pub fn subfield_generator(&self, d: usize) -> Result<Elem> {
        self.check_divisor(d)?;
        Ok(self
            .subfields
            .iter()
            .find(|(dd, _)| *dd == d)
            .map(|&(_, x)| x)
            .expect("all divisors cached"))
    }

    pub fn in_subfield(&self, x: Elem, d: usize) -> Result<bool> {
        self.check_divisor(d)?;
        Ok(self.frobenius(x, d) == x)
    }

    /// 0 followed by the powers of the subfield generator.
    pub fn iterate_subfield(&self, d: usize) -> Result<impl Iterator<Item = Elem> + '_> {
        let gen = self.subfield_generator(d)?;
        let count = self.q_pow(d) - 1;
        let powers = std::iter::successors(Some(self.one()), move |&x| Some(self.mul(x, gen)))
            .take(count as usize);
        Ok(std::iter::once(self.zero()).chain(powers))
    }

    /// x^((q^m-1)/(q^d-1)), the norm from F_(q^m) to F_(q^d).
    pub fn norm(&self, x: Elem, m: usize, d: usize) -> Result<Elem> {
        self.check_divisor(m)?;
        if d == 0 || !m.is_multiple_of(d) {
            return Err(Error::NotADivisor(d, m));
        }
        if !self.in_subfield(x, m)? {
            return Err(Error::NotInSubfield(m));
        }
        Ok(self.pow(x, (self.q_pow(m) - 1) / (self.q_pow(d) - 1)))
    }

    /// Packed F_p coefficients with respect to the basis w^j g^i.
    #[inline]
    pub(crate) fn basis_coords(&self, x: Elem) -> u64 {
        self.to_basis.apply(&self.ar, x.0)
    }

    /// F_q coordinates w.r.t. {g^0, ..., g^(n-1)} as scalar indices.
    pub fn fq_indices(&self, x: Elem) -> Vec<u32> {
        let e = self.basis_coords(x);
        let (p, s) = (self.ar.p, self.s);
        (0..self.n)
            .map(|i| {
                (0..s)
                    .rev()
                    .fold(0u64, |acc, j| acc * p + self.ar.lane_of(e, i * s + j)) as u32
            })
            .collect()
    }

    pub fn elem_from_fq_indices(&self, idx: &[u32]) -> Result<Elem> {
        if idx.len() != self.n {
            return Err(Error::BadLength {
                expected: self.n,
                got: idx.len(),
            });
        }
        let (p, s) = (self.ar.p, self.s);
        let mut lanes = vec![0u64; self.ar.deg];
        for (i, &c) in idx.iter().enumerate() {
            if c as u64 >= self.q {
                return Err(Error::NotInSubfield(1));
            }
            let mut c = c as u64;
            for j in 0..s {
                lanes[i * s + j] = c % p;
                c /= p;
            }
        }
        Ok(Elem(self.from_basis.apply(&self.ar, self.ar.pack(&lanes))))
    }

    /// The F_q scalar with index `idx` as a field element.
    pub fn fq_elem(&self, idx: u32) -> Elem {
        if self.s == 1 {
            return Elem(idx as u64 % self.ar.p);
        }
        let mut lanes = vec![0u64; self.ar.deg];
        let mut c = idx as u64;
        for lane in lanes.iter_mut().take(self.s) {
            *lane = c % self.ar.p;
            c /= self.ar.p;
        }
        Elem(self.from_basis.apply(&self.ar, self.ar.pack(&lanes)))
    }

    /// Index of an element of F_q; `None` if `x` is not in F_q.
    pub fn fq_index(&self, x: Elem) -> Option<u32> {
        let idx = self.fq_indices(x);
        idx[1..].iter().all(|&c| c == 0).then_some(idx[0])
    }

    /// F_q coordinates of `x` as field elements lying in F_q.
    pub fn fq_coordinates(&self, x: Elem) -> Vec<Elem> {
        self.fq_indices(x)
            .into_iter()
            .map(|c| self.fq_elem(c))
            .collect()
    }

    pub fn elem_from_fq_coordinates(&self, c: &[Elem]) -> Result<Elem> {
        let idx = c
            .iter()
            .map(|&x| self.fq_index(x).ok_or(Error::NotInSubfield(1)))
            .collect::<Result<Vec<_>>>()?;
        self.elem_from_fq_indices(&idx)
    }

    /// Multiply a field element by the F_q scalar with index `c`.
    #[inline]
    pub(crate) fn scale_fq(&self, x: Elem, c: u32) -> Elem {
        if self.s == 1 {
            Elem(self.ar.scale(x.0, c as u64))
        } else {
            self.mul(x, self.fq_elem(c))
        }
    }

    /// F_p-linear operator x -> beta*x.
    pub(crate) fn mul_op(&self, beta: Elem) -> LinOp {
        let cols: Vec<u64> = (0..self.ar.deg)
            .map(|i| self.ar.mul(beta.0, 1u64 << (i as u32 * self.ar.lane)))
            .collect();
        LinOp::new(&self.ar, &cols)
    }

    #[inline]
    pub fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        self.from_index(rng.gen_range(0..self.size))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        self.from_index(rng.gen_range(1..self.size))
    }

    /// Uniform nonzero element of the subfield F_(q^d).
    pub fn random_nonzero_in<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Result<Elem> {
        if d == self.n {
            return Ok(self.random_nonzero(rng));
        }
        let gen = self.subfield_generator(d)?;
        Ok(self.pow(gen, rng.gen_range(0..self.q_pow(d) - 1)))
    }

    /// Uniform element of the subfield F_(q^d).
    pub fn random_in<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Result<Elem> {
        if d == self.n {
            return Ok(self.random_elem(rng));
        }
        let gen = self.subfield_generator(d)?;
        let e = rng.gen_range(0..self.q_pow(d));
        Ok(if e == 0 { self.zero() } else { self.pow(gen, e - 1) })
    }
}

fn check_shape(p: u64, s: usize, n: usize, element_budget: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if s == 0 || n == 0 {
        return Err(Error::BadParams("s and n must be positive".into()));
    }
    let d = s * n;
    let size = checked_pow(p, d)
        .ok_or_else(|| budget("field elements", format!("{p}^{d}"), element_budget))?;
    if size > element_budget {
        return Err(budget("field elements", size, element_budget));
    }
    let lane = if p == 2 { 1 } else { 64 - (p - 1).leading_zeros() as usize };
    let limit = if p == 2 { 63 } else { arith::MAX_DEG_ODD };
    if d * lane > 64 || d > limit || p >= 1 << 28 {
        return Err(budget("packed element width", d * lane, 64));
    }
    Ok(())
}
