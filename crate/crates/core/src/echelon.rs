//! Incremental row echelon form over F_p on packed vectors.
//!
//! Rows are kept sorted by pivot (highest nonzero coordinate) in
//! descending order, each with pivot coefficient 1, so a single
//! descending pass reduces any vector.

use crate::field::Arith;

#[derive(Clone, Debug, Default)]
pub(crate) struct FpEchelon {
    rows: Vec<(u32, u64)>,
}

#[inline]
fn top_lane(ar: &Arith, v: u64) -> u32 {
    (63 - v.leading_zeros()) / ar.lane
}

impl FpEchelon {
    pub fn new() -> Self {
        FpEchelon { rows: Vec::new() }
    }

    pub fn from_vectors(ar: &Arith, vs: &[u64]) -> Self {
        let mut e = FpEchelon::new();
        for &v in vs {
            e.insert(ar, v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn reduce(&self, ar: &Arith, mut v: u64) -> u64 {
        if ar.p == 2 {
            for &(piv, row) in &self.rows {
                if (v >> piv) & 1 == 1 {
                    v ^= row;
                }
            }
            return v;
        }
        for &(piv, row) in &self.rows {
            let c = ar.lane_of(v, piv as usize);
            if c != 0 {
                v = ar.sub(v, ar.scale(row, c));
            }
        }
        v
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, ar: &Arith, v: u64) -> bool {
        let mut v = self.reduce(ar, v);
        if v == 0 {
            return false;
        }
        let piv = top_lane(ar, v);
        if ar.p != 2 {
            let c = ar.lane_of(v, piv as usize);
            v = ar.scale(v, crate::field::inv_mod(c, ar.p));
        }
        let pos = self.rows.partition_point(|&(p, _)| p > piv);
        self.rows.insert(pos, (piv, v));
        true
    }
}

/// Rank of a list of packed vectors.
pub(crate) fn fp_rank(ar: &Arith, vs: &[u64]) -> usize {
    if ar.p == 2 && vs.len() <= SMALL {
        return rank2_small(vs);
    }
    FpEchelon::from_vectors(ar, vs).rank()
}

const SMALL: usize = 16;

/// Rank over F_2 of at most 16 vectors; the basis is kept sorted by
/// decreasing value so `min(v, v ^ b)` clears leading bits in order.
#[inline]
pub(crate) fn rank2_small(vs: &[u64]) -> usize {
    let mut basis = [0u64; SMALL];
    let mut r = 0;
    for &v in vs {
        let mut v = v;
        for &b in &basis[..r] {
            v = v.min(v ^ b);
        }
        if v != 0 {
            let mut i = r;
            while i > 0 && basis[i - 1] < v {
                basis[i] = basis[i - 1];
                i -= 1;
            }
            basis[i] = v;
            r += 1;
        }
    }
    r
}

/// Expresses vectors in a fixed independent family over F_p.
#[derive(Clone, Debug)]
pub(crate) struct Solver {
    // (pivot, reduced vector, combination of the original family)
    rows: Vec<(u32, u64, Vec<u64>)>,
    len: usize,
}

impl Solver {
    /// `None` if the family is dependent.
    pub fn new(ar: &Arith, family: &[u64]) -> Option<Self> {
        let mut s = Solver {
            rows: Vec::new(),
            len: family.len(),
        };
        for (i, &v) in family.iter().enumerate() {
            let mut combo = vec![0u64; family.len()];
            combo[i] = 1;
            let (v, combo) = s.reduce(ar, v, combo);
            if v == 0 {
                return None;
            }
            let piv = top_lane(ar, v);
            let c = crate::field::inv_mod(ar.lane_of(v, piv as usize), ar.p);
            let v = ar.scale(v, c);
            let combo = combo.iter().map(|&x| x * c % ar.p).collect();
            let pos = s.rows.partition_point(|&(p, _, _)| p > piv);
            s.rows.insert(pos, (piv, v, combo));
        }
        Some(s)
    }

    fn reduce(&self, ar: &Arith, mut v: u64, mut combo: Vec<u64>) -> (u64, Vec<u64>) {
        for (piv, row, rc) in &self.rows {
            let c = ar.lane_of(v, *piv as usize);
            if c != 0 {
                v = ar.sub(v, ar.scale(*row, c));
                for (x, &y) in combo.iter_mut().zip(rc) {
                    *x = (*x + (ar.p - c) * y) % ar.p;
                }
            }
        }
        (v, combo)
    }

    /// Coefficients of `v` in the family, or `None` outside the span.
    pub fn solve(&self, ar: &Arith, v: u64) -> Option<Vec<u64>> {
        let (rest, combo) = self.reduce(ar, v, vec![0u64; self.len]);
        // v - sum combo_i b_i = rest, so the coefficients are -combo
        (rest == 0).then(|| combo.iter().map(|&x| (ar.p - x) % ar.p).collect())
    }
}
