//! Linearized maps between subfields and the nesting product of codes.
//!
//! For an outer code given by injective maps Phi_h : F_(q^m) -> F_(q^n) and
//! an inner code C1 in G_q(m, k), the product has representatives
//! Phi_h(a V) for every map, every a in a transversal of F_q^* in
//! F_(q^m)^*, and every inner representative V.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::echelon::{fp_rank, Solver};
use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};
use crate::orbit::{CyclicCode, OrbitRep, Provenance};
use crate::subspace::{raw, Subspace};

/// x -> sum_j c_j x^(q^j) from F_(q^dom) to F_(q^codom), with the images
/// of the basis h^0..h^(dom-1), h = generator of F_(q^dom)^*, cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinMap {
    field: u64,
    dom_degree: usize,
    codom_degree: usize,
    coeffs: Vec<Elem>,
    images: Vec<Elem>,
}

impl LinMap {
    pub fn dom_degree(&self) -> usize {
        self.dom_degree
    }
    pub fn codom_degree(&self) -> usize {
        self.codom_degree
    }
    pub fn lin_coeffs(&self) -> &[Elem] {
        &self.coeffs
    }
    /// Images of h^0, ..., h^(dom-1).
    pub fn basis_images(&self) -> &[Elem] {
        &self.images
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DuplicatePolicy {
    /// Fail with `DuplicateOrbits`.
    #[default]
    Error,
    /// Keep the first representative of each orbit and log the rest.
    DedupeWarn,
}

impl FieldCtx {
    pub fn lin_map(&self, dom_degree: usize, codom_degree: usize, coeffs: &[Elem]) -> Result<LinMap> {
        let n = self.n();
        for d in [dom_degree, codom_degree] {
            if d == 0 || !n.is_multiple_of(d) {
                return Err(Error::NotADivisor(d, n));
            }
        }
        if !codom_degree.is_multiple_of(dom_degree) {
            return Err(Error::DegreeMismatch(format!(
                "domain degree {dom_degree} does not divide codomain degree {codom_degree}"
            )));
        }
        for &c in coeffs {
            if !self.in_subfield(c, codom_degree)? {
                return Err(Error::NotInSubfield(codom_degree));
            }
        }
        // x^(q^dom) = x on the domain, so exponents fold mod dom
        let mut folded = vec![self.zero(); dom_degree];
        for (j, &c) in coeffs.iter().enumerate() {
            let t = j % dom_degree;
            folded[t] = self.add(folded[t], c);
        }
        while folded.len() > 1 && folded.last().is_some_and(|c| c.is_zero()) {
            folded.pop();
        }
        let h = self.subfield_generator(dom_degree)?;
        let mut map = LinMap {
            field: self.id(),
            dom_degree,
            codom_degree,
            coeffs: folded,
            images: Vec::new(),
        };
        map.images = (0..dom_degree)
            .map(|i| self.eval_poly(&map, self.pow(h, i as u64)))
            .collect();
        Ok(map)
    }

    fn eval_poly(&self, map: &LinMap, x: Elem) -> Elem {
        let mut acc = self.zero();
        let mut xq = x;
        for &c in &map.coeffs {
            if !c.is_zero() {
                acc = self.add(acc, self.mul(c, xq));
            }
            xq = self.frobenius(xq, 1);
        }
        acc
    }

    fn check_map(&self, map: &LinMap) -> Result<()> {
        if map.field != self.id() {
            return Err(Error::MixedFields);
        }
        Ok(())
    }

    /// Evaluate through the linearized polynomial.
    pub fn apply_map(&self, map: &LinMap, x: Elem) -> Result<Elem> {
        self.check_map(map)?;
        if !self.in_subfield(x, map.dom_degree)? {
            return Err(Error::DomainViolation(map.dom_degree));
        }
        Ok(self.eval_poly(map, x))
    }

    /// Evaluate through the cached basis images: expand x over F_q in
    /// h^0..h^(dom-1) and combine the images.
    pub fn apply_map_via_matrix(&self, map: &LinMap, x: Elem) -> Result<Elem> {
        self.check_map(map)?;
        let m = map.dom_degree;
        let s = self.s();
        let h = self.subfield_generator(m)?;
        let w_pows: Vec<Elem> = (0..s)
            .map(|j| self.fq_elem(self.p().pow(j as u32) as u32))
            .collect();
        let mut family = Vec::with_capacity(m * s);
        for i in 0..m {
            let hi = self.pow(h, i as u64);
            for &w in &w_pows {
                family.push(self.mul(w, hi).raw());
            }
        }
        let solver = Solver::new(&self.ar, &family).expect("subfield basis is independent");
        let coef = solver
            .solve(&self.ar, x.raw())
            .ok_or(Error::DomainViolation(m))?;
        let mut acc = self.zero();
        for i in 0..m {
            let c: u64 = (0..s).rev().fold(0, |a, j| a * self.p() + coef[i * s + j]);
            acc = self.add(acc, self.scale_fq(map.images[i], c as u32));
        }
        Ok(acc)
    }

    /// Rank over F_q.
    pub fn map_rank(&self, map: &LinMap) -> usize {
        self.span(&map.images).dim()
    }

    pub fn is_injective(&self, map: &LinMap) -> bool {
        self.map_rank(map) == map.dom_degree
    }

    /// F_q coordinates (in the ambient basis) of the basis images, one row
    /// per domain basis vector.
    pub fn map_matrix(&self, map: &LinMap) -> Vec<Vec<u32>> {
        map.images.iter().map(|&y| self.fq_indices(y)).collect()
    }

    /// outer ∘ inner.
    pub fn compose(&self, outer: &LinMap, inner: &LinMap) -> Result<LinMap> {
        self.check_map(outer)?;
        self.check_map(inner)?;
        if inner.codom_degree != outer.dom_degree {
            return Err(Error::DegreeMismatch(format!(
                "inner codomain degree {} vs outer domain degree {}",
                inner.codom_degree, outer.dom_degree
            )));
        }
        // sum_j c2_j (sum_i c1_i x^(q^i))^(q^j) = sum_{i,j} c2_j c1_i^(q^j) x^(q^(i+j))
        let m = inner.dom_degree;
        let mut out = vec![self.zero(); m];
        for (j, &c2) in outer.coeffs.iter().enumerate() {
            if c2.is_zero() {
                continue;
            }
            for (i, &c1) in inner.coeffs.iter().enumerate() {
                let t = self.mul(c2, self.frobenius(c1, j));
                out[(i + j) % m] = self.add(out[(i + j) % m], t);
            }
        }
        self.lin_map(m, outer.codom_degree, &out)
    }

    /// beta * Phi, for beta in the codomain.
    pub fn scale_map(&self, beta: Elem, map: &LinMap) -> Result<LinMap> {
        self.check_map(map)?;
        if beta.is_zero() {
            return Err(Error::ZeroScalar);
        }
        let c: Vec<Elem> = map.coeffs.iter().map(|&c| self.mul(beta, c)).collect();
        self.lin_map(map.dom_degree, map.codom_degree, &c)
    }

    /// Phi(V) for V inside the domain.
    pub fn odot_subspace(&self, map: &LinMap, v: &Subspace) -> Result<Subspace> {
        self.check_map(map)?;
        self.check_same(v)?;
        let imgs = v
            .basis()
            .iter()
            .map(|&b| self.apply_map(map, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.span(&imgs))
    }

    /// Im Phi.
    pub fn map_image(&self, map: &LinMap) -> Subspace {
        self.span(&map.images)
    }

    /// Cheap rank over F_p of the images; equals s * rank over F_q.
    pub(crate) fn map_fp_rank(&self, map: &LinMap) -> usize {
        let mut family = Vec::new();
        for &y in &map.images {
            for j in 0..self.s() {
                family.push(self.mul(self.fq_elem(self.p().pow(j as u32) as u32), y));
            }
        }
        fp_rank(&self.ar, &raw(&family))
    }
}

#[derive(Clone, Debug)]
pub struct MappedOrbit {
    pub map: LinMap,
    pub rep: OrbitRep,
}

/// A cyclic code whose representatives are images of injective maps
/// from F_(q^dom).
#[derive(Clone, Debug)]
pub struct MappedCode {
    pub dom_degree: usize,
    pub codom_degree: usize,
    pub orbits: Vec<MappedOrbit>,
    pub provenance: Provenance,
    pub predicted_size: Option<num_bigint::BigUint>,
    pub predicted_min_distance: Option<usize>,
}

impl MappedCode {
    pub fn from_maps(f: &FieldCtx, maps: Vec<LinMap>, label: &str) -> Result<Self> {
        let first = maps.first().ok_or(Error::ZeroSubspace)?;
        let (dom, codom) = (first.dom_degree, first.codom_degree);
        let orbits = maps
            .into_par_iter()
            .map(|map| mapped_orbit(f, map, dom, codom))
            .collect::<Result<Vec<_>>>()?;
        Ok(MappedCode {
            dom_degree: dom,
            codom_degree: codom,
            orbits,
            provenance: Provenance {
                label: label.to_string(),
                duplicates_removed: 0,
            },
            predicted_size: None,
            predicted_min_distance: None,
        })
    }

    pub fn code(&self) -> CyclicCode {
        CyclicCode {
            degree: self.codom_degree,
            k: self.dom_degree,
            reps: self.orbits.iter().map(|o| o.rep.clone()).collect(),
            provenance: self.provenance.clone(),
            predicted_size: self.predicted_size.clone(),
            predicted_min_distance: self.predicted_min_distance,
        }
    }

    pub fn maps(&self) -> Vec<LinMap> {
        self.orbits.iter().map(|o| o.map.clone()).collect()
    }
}

fn mapped_orbit(f: &FieldCtx, map: LinMap, dom: usize, codom: usize) -> Result<MappedOrbit> {
    if map.dom_degree != dom || map.codom_degree != codom {
        return Err(Error::DegreeMismatch("maps of a code share their degrees".into()));
    }
    let rank = f.map_fp_rank(&map) / f.s();
    if rank != dom {
        return Err(Error::NotInjective { rank, dim: dom });
    }
    let rep = f.map_image(&map);
    let stab = f.stabilizer_degree(&rep, codom)?;
    Ok(MappedOrbit {
        map,
        rep: OrbitRep {
            rep,
            stab_degree: stab,
        },
    })
}

/// Transversal g_m^e, e < (q^m-1)/(q-1), of F_q^* in F_(q^m)^*.
pub fn scalar_transversal(f: &FieldCtx, m: usize) -> Result<Vec<Elem>> {
    let gm = f.subfield_generator(m)?;
    let count = (f.q_pow(m) - 1) / (f.q() - 1);
    Ok(std::iter::successors(Some(f.one()), |&a| Some(f.mul(a, gm)))
        .take(count as usize)
        .collect())
}

/// Index positions to keep after applying the duplicate policy.
fn apply_policy(
    f: &FieldCtx,
    reps: &[Subspace],
    policy: DuplicatePolicy,
) -> Result<(Vec<usize>, usize)> {
    let keys = reps
        .par_iter()
        .map(|v| f.orbit_key(v))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = std::collections::HashMap::with_capacity(keys.len());
    let mut keep = Vec::with_capacity(keys.len());
    let mut dropped = 0;
    for (j, key) in keys.iter().enumerate() {
        match seen.get(key) {
            Some(&i) => match policy {
                DuplicatePolicy::Error => return Err(Error::DuplicateOrbits(i, j)),
                DuplicatePolicy::DedupeWarn => {
                    log::warn!("representative {j} repeats the orbit of {i}; dropped");
                    dropped += 1;
                }
            },
            None => {
                seen.insert(key, j);
                keep.push(j);
            }
        }
    }
    Ok((keep, dropped))
}

/// C2 ⊙ C1 for a mapped outer code and a plain inner code.
pub fn odot_codes(
    f: &FieldCtx,
    outer: &MappedCode,
    inner: &CyclicCode,
    policy: DuplicatePolicy,
) -> Result<CyclicCode> {
    if inner.degree != outer.dom_degree {
        return Err(Error::DegreeMismatch(format!(
            "inner code lives in degree {}, outer maps start at {}",
            inner.degree, outer.dom_degree
        )));
    }
    let alphas = scalar_transversal(f, outer.dom_degree)?;
    let mut jobs = Vec::new();
    for h2 in 0..outer.orbits.len() {
        for &a in &alphas {
            for h1 in 0..inner.reps.len() {
                jobs.push((h2, a, h1));
            }
        }
    }
    let reps = jobs
        .par_iter()
        .map(|&(h2, a, h1)| {
            let av = f.scalar_mul(a, &inner.reps[h1].rep)?;
            f.odot_subspace(&outer.orbits[h2].map, &av)
        })
        .collect::<Result<Vec<_>>>()?;
    let (keep, dropped) = apply_policy(f, &reps, policy)?;
    let kept: Vec<Subspace> = keep.into_iter().map(|i| reps[i].clone()).collect();
    let mut code = CyclicCode::new(f, outer.codom_degree, kept, "")?;
    code.provenance = Provenance {
        label: format!("({}) ⊙ ({})", outer.provenance.label, inner.provenance.label),
        duplicates_removed: dropped + inner.provenance.duplicates_removed,
    };
    Ok(code)
}

/// C2 ⊙ C1 keeping the composed maps Phi_h2 ∘ (a Psi_h1).
pub fn odot_mapped(
    f: &FieldCtx,
    outer: &MappedCode,
    inner: &MappedCode,
    policy: DuplicatePolicy,
) -> Result<MappedCode> {
    if inner.codom_degree != outer.dom_degree {
        return Err(Error::DegreeMismatch(format!(
            "inner code lives in degree {}, outer maps start at {}",
            inner.codom_degree, outer.dom_degree
        )));
    }
    let alphas = scalar_transversal(f, outer.dom_degree)?;
    let mut jobs = Vec::new();
    for h2 in 0..outer.orbits.len() {
        for &a in &alphas {
            for h1 in 0..inner.orbits.len() {
                jobs.push((h2, a, h1));
            }
        }
    }
    let maps = jobs
        .par_iter()
        .map(|&(h2, a, h1)| {
            let scaled = f.scale_map(a, &inner.orbits[h1].map)?;
            f.compose(&outer.orbits[h2].map, &scaled)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut code = MappedCode::from_maps(f, maps, "")?;
    let reps: Vec<Subspace> = code.orbits.iter().map(|o| o.rep.rep.clone()).collect();
    let (keep, dropped) = apply_policy(f, &reps, policy)?;
    if dropped > 0 {
        let mut orbits = std::mem::take(&mut code.orbits);
        let mut keep_iter = keep.into_iter().peekable();
        code.orbits = orbits
            .drain(..)
            .enumerate()
            .filter_map(|(i, o)| {
                (keep_iter.peek() == Some(&i)).then(|| {
                    keep_iter.next();
                    o
                })
            })
            .collect();
    }
    code.provenance = Provenance {
        label: format!("({}) ⊙ ({})", outer.provenance.label, inner.provenance.label),
        duplicates_removed: dropped + inner.provenance.duplicates_removed,
    };
    Ok(code)
}

/// Right-associated product stages[last] ⊙ (... ⊙ (stages[0] ⊙ inner)).
/// `stages` runs from innermost to outermost.
pub fn odot_chain(
    f: &FieldCtx,
    stages: &[MappedCode],
    inner: &MappedCode,
    policy: DuplicatePolicy,
) -> Result<MappedCode> {
    let mut acc = inner.clone();
    for stage in stages {
        acc = odot_mapped(f, stage, &acc, policy)?;
    }
    Ok(acc)
}

/// Lower bound 2k - 2 max(l, l') for the product distance, given the
/// inner distance 2k - 2l and outer distance 2m - 2l'.
pub fn odot_distance_bound(k: usize, m: usize, inner_distance: usize, outer_distance: usize) -> Option<usize> {
    let l = k.checked_sub(inner_distance / 2)?;
    let lp = m.checked_sub(outer_distance / 2)?;
    (2 * k).checked_sub(2 * l.max(lp))
}
