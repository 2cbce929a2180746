//! Orbits of subspaces under the multiplicative group of a subfield
//! F_(q^m) of the ambient field, and cyclic orbit codes built from them.

use std::collections::HashSet;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::echelon::FpEchelon;
use crate::error::{budget, Error, Result};
use crate::field::{Elem, FieldCtx};
use crate::subspace::{raw, Subspace};

/// Default cap on codewords materialised by enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRep {
    pub rep: Subspace,
    pub stab_degree: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub label: String,
    #[serde(default)]
    pub duplicates_removed: usize,
}

/// A union of orbits of k-dimensional subspaces under F_(q^degree)^*.
#[derive(Clone, Debug)]
pub struct CyclicCode {
    pub degree: usize,
    pub k: usize,
    pub reps: Vec<OrbitRep>,
    pub provenance: Provenance,
    pub predicted_size: Option<BigUint>,
    pub predicted_min_distance: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeMode {
    Formula,
    Enumerate,
}

impl FieldCtx {
    fn check_orbit_arg(&self, v: &Subspace, degree: usize) -> Result<()> {
        self.check_same(v)?;
        if v.is_zero() {
            return Err(Error::ZeroSubspace);
        }
        if !self.subspace_in_subfield(v, degree)? {
            return Err(Error::NotInSubfield(degree));
        }
        Ok(())
    }

    fn fixes(&self, alpha: Elem, v: &Subspace) -> bool {
        let e = FpEchelon::from_vectors(&self.ar, &raw(&self.fp_basis(v)));
        v.basis()
            .iter()
            .all(|&b| e.reduce(&self.ar, self.mul(alpha, b).0) == 0)
    }

    /// Largest t | degree with F_(q^t)^* fixing `v`.
    pub fn stabilizer_degree(&self, v: &Subspace, degree: usize) -> Result<usize> {
        self.check_orbit_arg(v, degree)?;
        let mut divs = crate::numth::divisors(degree);
        divs.reverse();
        for t in divs {
            if self.fixes(self.subfield_generator(t)?, v) {
                return Ok(t);
            }
        }
        unreachable!("t = 1 always fixes a subspace")
    }

    /// (q^m - 1)/(q^t - 1).
    pub fn orbit_size(&self, v: &Subspace, degree: usize) -> Result<u64> {
        let t = self.stabilizer_degree(v, degree)?;
        Ok((self.q_pow(degree) - 1) / (self.q_pow(t) - 1))
    }

    pub fn is_full_length(&self, v: &Subspace, degree: usize) -> Result<bool> {
        Ok(self.stabilizer_degree(v, degree)? == 1)
    }

    /// The distinct subspaces a*v, one per coset of the stabilizer.
    pub fn enumerate_orbit<'a>(
        &'a self,
        v: &'a Subspace,
        degree: usize,
    ) -> Result<impl Iterator<Item = Subspace> + 'a> {
        let t = self.stabilizer_degree(v, degree)?;
        let gm = self.subfield_generator(degree)?;
        let count = (self.q_pow(degree) - 1) / (self.q_pow(t) - 1);
        let mut alpha = self.one();
        Ok((0..count).map(move |_| {
            let w = self.scalar_mul(alpha, v).expect("nonzero scalar");
            alpha = self.mul(alpha, gm);
            w
        }))
    }

    /// Orbit invariant: least canonical key among orbit members that
    /// contain 1. Those are exactly x^(-1) v for nonzero x in v.
    pub fn orbit_key(&self, v: &Subspace) -> Result<Vec<u8>> {
        self.check_same(v)?;
        if v.is_zero() {
            return Err(Error::ZeroSubspace);
        }
        let mut best: Option<Vec<u8>> = None;
        for x in self.projective_points(v) {
            let w = self.scalar_mul(self.inv(x)?, v)?;
            let key = self.canonical_key(&w);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
        Ok(best.expect("nonzero subspace has a point"))
    }

    /// Some `a` with a*u = w, searched over a in { y / u0 : y in w }.
    pub fn orbits_equivalent(&self, u: &Subspace, w: &Subspace) -> Result<Option<Elem>> {
        self.check_same(u)?;
        self.check_same(w)?;
        if u.is_zero() || w.is_zero() {
            return Err(Error::ZeroSubspace);
        }
        if u.dim() != w.dim() {
            return Ok(None);
        }
        let u0_inv = self.inv(u.basis()[0])?;
        for y in self.projective_points(w) {
            let alpha = self.mul(y, u0_inv);
            if self.fixes_into(alpha, u, w) {
                return Ok(Some(alpha));
            }
        }
        Ok(None)
    }

    fn fixes_into(&self, alpha: Elem, u: &Subspace, w: &Subspace) -> bool {
        let e = FpEchelon::from_vectors(&self.ar, &raw(&self.fp_basis(w)));
        u.basis()
            .iter()
            .all(|&b| e.reduce(&self.ar, self.mul(alpha, b).0) == 0)
    }

    /// Representative of the line F_q^* x: scaled so the leading F_p
    /// coordinate is 1 when q = p, else the least multiple.
    #[inline]
    pub(crate) fn projective_normal(&self, x: Elem) -> Elem {
        if x.is_zero() || self.p() == 2 && self.s() == 1 {
            return x;
        }
        if self.s() == 1 {
            let ar = &self.ar;
            let top = (63 - x.0.leading_zeros()) / ar.lane;
            let c = ar.lane_of(x.0, top as usize);
            return Elem(ar.scale(x.0, crate::field::inv_mod(c, ar.p)));
        }
        (1..self.q() as u32)
            .map(|c| self.scale_fq(x, c))
            .min()
            .expect("q >= 2")
    }

    /// Whether dim(v ∩ a v) <= 1 for every a outside F_q; on failure the
    /// witness a is returned.
    pub fn is_sidon(&self, v: &Subspace, degree: usize) -> Result<SidonResult> {
        self.check_orbit_arg(v, degree)?;
        let pd = PointData::new(self, v)?;
        let one = self.one();
        let hit = support_scan(self, &pd, &pd, |alpha, _dim| alpha != one);
        Ok(match hit {
            Some((dim, alpha)) if dim >= 2 => SidonResult {
                sidon: false,
                witness: Some(alpha),
                witness_dim: dim,
            },
            _ => SidonResult {
                sidon: true,
                witness: None,
                witness_dim: 0,
            },
        })
    }

    /// max over a in F_(q^degree)^* of dim(u ∩ a w); with `same_orbit`
    /// the a giving a w = u are skipped.
    pub fn max_alpha_intersection(
        &self,
        u: &Subspace,
        w: &Subspace,
        degree: usize,
        same_orbit: bool,
        strategy: SweepStrategy,
    ) -> Result<AlphaHit> {
        self.check_orbit_arg(u, degree)?;
        self.check_orbit_arg(w, degree)?;
        match strategy {
            SweepStrategy::Full => full_sweep(self, u, w, degree, same_orbit),
            SweepStrategy::Support => {
                let pu = PointData::new(self, u)?;
                let pw = PointData::new(self, w)?;
                Ok(support_hit(self, &pu, &pw, same_orbit))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SidonResult {
    pub sidon: bool,
    pub witness: Option<Elem>,
    pub witness_dim: usize,
}

/// How the scalars a are visited in an intersection sweep.
///
/// `Full` walks a = g_m^e over all cosets of F_q^*. `Support` visits only
/// the quotients x/y with x in u and y in w, which are the only scalars
/// where the intersection can be nonzero, and reads the dimension off the
/// number of point pairs sharing a quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepStrategy {
    Full,
    Support,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlphaHit {
    pub dim: usize,
    pub alpha: Option<Elem>,
}

/// Points of a subspace with their inverses.
#[derive(Clone, Debug)]
pub(crate) struct PointData {
    pub pts: Vec<Elem>,
    pub inv: Vec<Elem>,
    pub k: usize,
}

impl PointData {
    pub fn new(f: &FieldCtx, v: &Subspace) -> Result<Self> {
        let pts = f.projective_points(v);
        let inv = pts.iter().map(|&x| f.inv(x)).collect::<Result<_>>()?;
        Ok(PointData {
            pts,
            inv,
            k: v.dim(),
        })
    }
}

pub(crate) fn dim_from_count(q: u64, count: u64) -> usize {
    let mut d = 0;
    let mut pts = 0u64;
    while pts < count {
        pts = pts * q + 1;
        d += 1;
    }
    assert_eq!(pts, count, "point count {count} is not a projective size");
    d
}

/// Largest intersection among quotient classes accepted by `keep`,
/// smallest normalised scalar first on ties.
fn support_scan(
    f: &FieldCtx,
    pu: &PointData,
    pw: &PointData,
    keep: impl Fn(Elem, usize) -> bool,
) -> Option<(usize, Elem)> {
    let mut qs: Vec<Elem> = Vec::with_capacity(pu.pts.len() * pw.inv.len());
    for &x in &pu.pts {
        for &yi in &pw.inv {
            qs.push(f.projective_normal(f.mul(x, yi)));
        }
    }
    qs.sort_unstable();
    let mut best: Option<(usize, Elem)> = None;
    let mut i = 0;
    while i < qs.len() {
        let mut j = i + 1;
        while j < qs.len() && qs[j] == qs[i] {
            j += 1;
        }
        let dim = dim_from_count(f.q(), (j - i) as u64);
        if keep(qs[i], dim) && best.is_none_or(|(d, _)| dim > d) {
            best = Some((dim, qs[i]));
        }
        i = j;
    }
    best
}

pub(crate) fn support_hit(f: &FieldCtx, pu: &PointData, pw: &PointData, same_orbit: bool) -> AlphaHit {
    let k = pu.k;
    match support_scan(f, pu, pw, |_, dim| !(same_orbit && dim == k)) {
        Some((dim, alpha)) => AlphaHit {
            dim,
            alpha: Some(alpha),
        },
        None => AlphaHit {
            dim: 0,
            alpha: None,
        },
    }
}

const SWEEP_CHUNK: u64 = 1 << 14;

pub(crate) fn full_sweep(
    f: &FieldCtx,
    u: &Subspace,
    w: &Subspace,
    degree: usize,
    same_orbit: bool,
) -> Result<AlphaHit> {
    let gm = f.subfield_generator(degree)?;
    let count = (f.q_pow(degree) - 1) / (f.q() - 1);
    let red = FpEchelon::from_vectors(&f.ar, &raw(&f.fp_basis(u)));
    let wb = raw(&f.fp_basis(w));
    let s = f.s();
    let k = w.dim();
    let op = f.mul_op(gm);
    let nchunks = count.div_ceil(SWEEP_CHUNK);
    let best = (0..nchunks)
        .into_par_iter()
        .map(|c| {
            let start = c * SWEEP_CHUNK;
            let end = count.min(start + SWEEP_CHUNK);
            let a0 = f.pow(gm, start).0;
            let mut cur: Vec<u64> = wb.iter().map(|&x| f.ar.mul(a0, x)).collect();
            let mut buf = vec![0u64; cur.len()];
            let mut best: Option<(usize, u64)> = None;
            for e in start..end {
                for (b, &x) in buf.iter_mut().zip(&cur) {
                    *b = red.reduce(&f.ar, x);
                }
                let r = crate::echelon::fp_rank(&f.ar, &buf);
                let dim = (cur.len() - r) / s;
                if !(same_orbit && dim == k) && best.is_none_or(|(d, _)| dim > d) {
                    best = Some((dim, e));
                }
                for x in cur.iter_mut() {
                    *x = op.apply(&f.ar, *x);
                }
            }
            best
        })
        .reduce(|| None, better_hit);
    Ok(match best {
        Some((dim, e)) => AlphaHit {
            dim,
            alpha: Some(f.pow(gm, e)),
        },
        None => AlphaHit {
            dim: 0,
            alpha: None,
        },
    })
}

fn better_hit(a: Option<(usize, u64)>, b: Option<(usize, u64)>) -> Option<(usize, u64)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if x.0 > y.0 || (x.0 == y.0 && x.1 < y.1) {
                Some(x)
            } else {
                Some(y)
            }
        }
    }
}

impl CyclicCode {
    /// Builds a code from representatives, computing stabilizers.
    pub fn new(f: &FieldCtx, degree: usize, reps: Vec<Subspace>, label: &str) -> Result<Self> {
        let k = reps.first().map(|v| v.dim()).ok_or(Error::ZeroSubspace)?;
        let mut out = Vec::with_capacity(reps.len());
        for v in reps {
            if v.dim() != k {
                return Err(Error::BadParams(format!(
                    "representatives of dimensions {k} and {}",
                    v.dim()
                )));
            }
            let t = f.stabilizer_degree(&v, degree)?;
            out.push(OrbitRep {
                rep: v,
                stab_degree: t,
            });
        }
        Ok(CyclicCode {
            degree,
            k,
            reps: out,
            provenance: Provenance {
                label: label.to_string(),
                duplicates_removed: 0,
            },
            predicted_size: None,
            predicted_min_distance: None,
        })
    }

    pub fn orbit_sizes(&self, f: &FieldCtx) -> Vec<u64> {
        let qm = f.q_pow(self.degree) - 1;
        self.reps
            .iter()
            .map(|r| qm / (f.q_pow(r.stab_degree) - 1))
            .collect()
    }

    /// Number of codewords, from orbit sizes or by enumerating a*v for all
    /// a and deduplicating canonical keys.
    pub fn size(&self, f: &FieldCtx, mode: SizeMode) -> Result<BigUint> {
        match mode {
            SizeMode::Formula => Ok(self
                .orbit_sizes(f)
                .into_iter()
                .map(BigUint::from)
                .sum()),
            SizeMode::Enumerate => {
                let per = f.q_pow(self.degree) - 1;
                let total = per.saturating_mul(self.reps.len() as u64);
                if total > DEFAULT_ENUMERATION_BUDGET {
                    return Err(budget("enumerated codewords", total, DEFAULT_ENUMERATION_BUDGET));
                }
                let gm = f.subfield_generator(self.degree)?;
                let keys: HashSet<Vec<u8>> = self
                    .reps
                    .par_iter()
                    .flat_map_iter(|r| {
                        let mut alpha = f.one();
                        (0..per).map(move |_| {
                            let w = f.scalar_mul(alpha, &r.rep).expect("nonzero");
                            alpha = f.mul(alpha, gm);
                            f.canonical_key(&w)
                        })
                    })
                    .collect();
                Ok(BigUint::from(keys.len()))
            }
        }
    }

    pub fn all_full_length(&self) -> bool {
        self.reps.iter().all(|r| r.stab_degree == 1)
    }

    /// First pair of representatives lying in one orbit, by orbit keys.
    pub fn find_equivalent_pair(&self, f: &FieldCtx) -> Result<Option<(usize, usize)>> {
        let keys: Vec<Vec<u8>> = self
            .reps
            .par_iter()
            .map(|r| f.orbit_key(&r.rep))
            .collect::<Result<_>>()?;
        let mut seen = std::collections::HashMap::with_capacity(keys.len());
        for (j, key) in keys.iter().enumerate() {
            if let Some(&i) = seen.get(key) {
                return Ok(Some((i, j)));
            }
            seen.insert(key, j);
        }
        Ok(None)
    }

    pub fn subspaces(&self) -> Vec<Subspace> {
        self.reps.iter().map(|r| r.rep.clone()).collect()
    }
}
