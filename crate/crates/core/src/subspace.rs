//! F_q-subspaces of F_(q^n) in canonical reduced row echelon form.

use rand::Rng;

use crate::echelon::{fp_rank, FpEchelon};
use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};

/// A subspace stored as its RREF over F_q in the coordinates of
/// {g^0, ..., g^(n-1)}. Rows hold F_q scalar indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: u64,
    rows: Vec<Vec<u32>>,
    basis: Vec<Elem>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Field elements of the RREF rows.
    pub fn basis(&self) -> &[Elem] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }
}

fn rref(f: &FieldCtx, mut m: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    let fq = &f.fq;
    let cols = f.n();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = fq.inv(m[r][c]);
        for x in m[r].iter_mut() {
            *x = fq.mul(*x, inv);
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let factor = m[i][c];
                for j in 0..cols {
                    let t = fq.mul(factor, m[r][j]);
                    m[i][j] = fq.sub(m[i][j], t);
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

impl FieldCtx {
    fn subspace_from_rref(&self, rows: Vec<Vec<u32>>) -> Subspace {
        let basis = rows
            .iter()
            .map(|r| self.elem_from_fq_indices(r).expect("row length n"))
            .collect();
        Subspace {
            field: self.id(),
            rows,
            basis,
        }
    }

    /// Span over F_q of the given elements.
    pub fn span(&self, gens: &[Elem]) -> Subspace {
        let rows = gens.iter().map(|&x| self.fq_indices(x)).collect();
        self.subspace_from_rref(rref(self, rows))
    }

    pub fn zero_subspace(&self) -> Subspace {
        self.subspace_from_rref(Vec::new())
    }

    /// Subspace from explicit coordinate rows (any echelon state).
    pub fn subspace_from_rows(&self, rows: &[Vec<u32>]) -> Result<Subspace> {
        for r in rows {
            if r.len() != self.n() {
                return Err(Error::BadLength {
                    expected: self.n(),
                    got: r.len(),
                });
            }
            if r.iter().any(|&c| c as u64 >= self.q()) {
                return Err(Error::NotInSubfield(1));
            }
        }
        Ok(self.subspace_from_rref(rref(self, rows.to_vec())))
    }

    pub(crate) fn check_same(&self, v: &Subspace) -> Result<()> {
        if v.field != self.id() {
            return Err(Error::MixedFields);
        }
        Ok(())
    }

    /// Basis over F_p: w^j b for the F_q basis b and j < s.
    pub(crate) fn fp_basis(&self, v: &Subspace) -> Vec<Elem> {
        if self.s() == 1 {
            return v.basis.clone();
        }
        let scalars: Vec<Elem> = (0..self.s())
            .map(|j| self.fq_elem(self.p().pow(j as u32) as u32))
            .collect();
        v.basis
            .iter()
            .flat_map(|&b| scalars.iter().map(move |&w| (w, b)))
            .map(|(w, b)| self.mul(w, b))
            .collect()
    }

    fn fp_rank_of(&self, xs: &[Elem]) -> usize {
        let raw: Vec<u64> = xs.iter().map(|x| x.0).collect();
        fp_rank(&self.ar, &raw)
    }

    pub fn sum_dim(&self, u: &Subspace, v: &Subspace) -> Result<usize> {
        self.check_same(u)?;
        self.check_same(v)?;
        let mut all = self.fp_basis(u);
        all.extend(self.fp_basis(v));
        Ok(self.fp_rank_of(&all) / self.s())
    }

    pub fn intersect_dim(&self, u: &Subspace, v: &Subspace) -> Result<usize> {
        let sum = self.sum_dim(u, v)?;
        Ok(u.dim() + v.dim() - sum)
    }

    /// Subspace distance dim(U+V) - dim(U∩V).
    pub fn distance(&self, u: &Subspace, v: &Subspace) -> Result<usize> {
        let sum = self.sum_dim(u, v)?;
        Ok(2 * sum - u.dim() - v.dim())
    }

    pub fn scalar_mul(&self, alpha: Elem, v: &Subspace) -> Result<Subspace> {
        if alpha.is_zero() {
            return Err(Error::ZeroScalar);
        }
        self.check_same(v)?;
        let gens: Vec<Elem> = v.basis.iter().map(|&b| self.mul(alpha, b)).collect();
        Ok(self.span(&gens))
    }

    /// Fixed-width big-endian dump of the RREF rows.
    pub fn canonical_key(&self, v: &Subspace) -> Vec<u8> {
        let width = key_width(self.q());
        let mut out = Vec::with_capacity(v.dim() * self.n() * width);
        for r in &v.rows {
            for &c in r {
                out.extend_from_slice(&c.to_be_bytes()[4 - width..]);
            }
        }
        out
    }

    pub fn contains(&self, v: &Subspace, x: Elem) -> bool {
        let e = FpEchelon::from_vectors(&self.ar, &raw(&self.fp_basis(v)));
        e.reduce(&self.ar, x.0) == 0
    }

    /// Whether every element of `v` lies in F_(q^d).
    pub fn subspace_in_subfield(&self, v: &Subspace, d: usize) -> Result<bool> {
        for &b in &v.basis {
            if !self.in_subfield(b, d)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// One nonzero vector per 1-dimensional subspace, namely the
    /// combinations of the RREF basis whose first nonzero coefficient is 1.
    pub fn projective_points(&self, v: &Subspace) -> Vec<Elem> {
        let q = self.q() as u32;
        let k = v.dim();
        let scaled: Vec<Vec<Elem>> = v
            .basis
            .iter()
            .map(|&b| (0..q).map(|c| self.scale_fq(b, c)).collect())
            .collect();
        let mut out = Vec::new();
        for lead in 0..k {
            let rest = k - lead - 1;
            let mut digits = vec![0u32; rest];
            loop {
                let mut x = v.basis[lead];
                for (t, &d) in digits.iter().enumerate() {
                    x = self.add(x, scaled[lead + 1 + t][d as usize]);
                }
                out.push(x);
                // next combination of the trailing coefficients
                let mut i = 0;
                while i < rest {
                    digits[i] += 1;
                    if digits[i] < q {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                }
                if i == rest {
                    break;
                }
            }
        }
        out
    }

    /// Uniform random `k`-dimensional subspace of F_(q^d) (rejection).
    pub fn random_subspace<R: Rng + ?Sized>(&self, k: usize, d: usize, rng: &mut R) -> Result<Subspace> {
        if k > d {
            return Err(Error::BadParams(format!("dimension {k} exceeds {d}")));
        }
        loop {
            let gens: Vec<Elem> = (0..k)
                .map(|_| self.random_in(d, rng))
                .collect::<Result<_>>()?;
            let v = self.span(&gens);
            if v.dim() == k {
                return Ok(v);
            }
        }
    }
}

pub(crate) fn raw(xs: &[Elem]) -> Vec<u64> {
    xs.iter().map(|x| x.0).collect()
}

pub(crate) fn key_width(q: u64) -> usize {
    if q <= 1 << 8 {
        1
    } else if q <= 1 << 16 {
        2
    } else {
        4
    }
}
