//! Arithmetic on F_q scalars encoded as small integers.
//!
//! Index `i` stands for `sum_j d_j w^j` where `d_j` are the base-p digits of
//! `i` and `w` generates F_q^*. For q prime this is just the residue.

use super::arith::inv_mod;

pub(crate) const FQ_TABLE_LIMIT: u64 = 1 << 12;

#[derive(Clone, Debug)]
pub(crate) enum FqArith {
    Prime(u64),
    Table {
        q: usize,
        add: Vec<u32>,
        mul: Vec<u32>,
        neg: Vec<u32>,
        inv: Vec<u32>,
    },
}

impl FqArith {
    pub fn table(q: usize, add: Vec<u32>, mul: Vec<u32>) -> Self {
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u32)
            .collect();
        let inv = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u32
                }
            })
            .collect();
        FqArith::Table {
            q,
            add,
            mul,
            neg,
            inv,
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match self {
            FqArith::Prime(p) => ((a as u64 + b as u64) % p) as u32,
            FqArith::Table { q, add, .. } => add[a as usize * q + b as usize],
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match self {
            FqArith::Prime(p) => ((a as u64 * b as u64) % p) as u32,
            FqArith::Table { q, mul, .. } => mul[a as usize * q + b as usize],
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        match self {
            FqArith::Prime(p) => ((p - a as u64) % p) as u32,
            FqArith::Table { neg, .. } => neg[a as usize],
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// `a` must be nonzero.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        match self {
            FqArith::Prime(p) => inv_mod(a as u64, *p) as u32,
            FqArith::Table { inv, .. } => inv[a as usize],
        }
    }
}
