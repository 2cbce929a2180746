//! F_p-linear maps on packed elements, stored by column images.

use super::arith::{Arith, MAX_DEG_ODD};

#[derive(Clone, Debug)]
pub(crate) struct LinOp {
    deg: usize,
    /// unpacked column-major matrix for odd p: entry (row j, col i) at i*deg+j
    mat: Vec<u64>,
    /// byte tables for p = 2
    tables: Vec<[u64; 256]>,
}

impl LinOp {
    /// `cols[i]` is the image of the i-th unit vector.
    pub fn new(ar: &Arith, cols: &[u64]) -> Self {
        let deg = ar.deg;
        if ar.p == 2 {
            let chunks = deg.div_ceil(8);
            let mut tables = vec![[0u64; 256]; chunks];
            for (c, table) in tables.iter_mut().enumerate() {
                for byte in 1..256usize {
                    let low = byte.trailing_zeros() as usize;
                    let bit = c * 8 + low;
                    let col = if bit < deg { cols[bit] } else { 0 };
                    table[byte] = table[byte & (byte - 1)] ^ col;
                }
            }
            LinOp {
                deg,
                mat: Vec::new(),
                tables,
            }
        } else {
            let mut mat = vec![0u64; deg * deg];
            for (i, &col) in cols.iter().enumerate() {
                for j in 0..deg {
                    mat[i * deg + j] = ar.lane_of(col, j);
                }
            }
            LinOp {
                deg,
                mat,
                tables: Vec::new(),
            }
        }
    }

    #[inline]
    pub fn apply(&self, ar: &Arith, v: u64) -> u64 {
        if ar.p == 2 {
            let mut r = 0u64;
            let mut v = v;
            for t in &self.tables {
                r ^= t[(v & 0xff) as usize];
                v >>= 8;
            }
            return r;
        }
        let d = self.deg;
        let mut acc = [0u64; MAX_DEG_ODD];
        for i in 0..d {
            let c = ar.lane_of(v, i);
            if c == 0 {
                continue;
            }
            let col = &self.mat[i * d..(i + 1) * d];
            for j in 0..d {
                acc[j] += c * col[j];
            }
        }
        let mut r = 0u64;
        for (j, &a) in acc.iter().enumerate().take(d) {
            r |= (a % ar.p) << (j as u32 * ar.lane);
        }
        r
    }
}

/// Inverse of a square matrix over F_p given by packed columns; `None` if singular.
pub(crate) fn invert_columns(ar: &Arith, cols: &[u64]) -> Option<Vec<u64>> {
    let d = ar.deg;
    let p = ar.p;
    // rows of [A | I], A[j][i] = coordinate j of column i
    let mut m = vec![vec![0u64; 2 * d]; d];
    for (i, &c) in cols.iter().enumerate() {
        for (j, row) in m.iter_mut().enumerate() {
            row[i] = ar.lane_of(c, j);
        }
    }
    for (j, row) in m.iter_mut().enumerate() {
        row[d + j] = 1;
    }
    for col in 0..d {
        let piv = (col..d).find(|&r| m[r][col] != 0)?;
        m.swap(col, piv);
        let inv = super::arith::inv_mod(m[col][col], p);
        for x in m[col].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..d {
            if r != col && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..2 * d {
                    m[r][c] = (m[r][c] + (p - f) * m[col][c]) % p;
                }
            }
        }
    }
    // column i of the inverse is the packed vector of entries m[j][d+i]
    Some(
        (0..d)
            .map(|i| {
                let v: Vec<u64> = (0..d).map(|j| m[j][d + i]).collect();
                ar.pack(&v)
            })
            .collect(),
    )
}
