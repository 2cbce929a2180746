//! Concrete code families built from stage codes chained with ⊙.
//!
//! A family is described by a [`Descriptor`] and expanded into a
//! [`TowerPlan`]: a list of stage ratios, innermost first. Ratio 2 stages
//! use the two-block maps v -> v + v^q w^h g, odd prime stages use the large
//! multi-orbit maps u -> u P(g) + w^j (u^q + a u) g^(l1+1).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{budget, Error, Result};
use crate::field::{Elem, FieldCtx, DEFAULT_ELEMENT_BUDGET};
use crate::nesting::{odot_chain, scalar_transversal, DuplicatePolicy, LinMap, MappedCode};
use crate::numth::is_prime;
use crate::subspace::Subspace;

/// Default cap on the number of orbit representatives a build may create.
pub const DEFAULT_ORBIT_BUDGET: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Rrt,
    Zhang,
    Nested2e,
    Nestedpe,
    Multiprime,
    Mixed,
    /// Chain of one-orbit stages u -> u + u^q g.
    Sidonchain,
    /// Orbit of the subfield F_(q^k).
    Spread,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Rrt,
        Family::Zhang,
        Family::Nested2e,
        Family::Nestedpe,
        Family::Multiprime,
        Family::Mixed,
        Family::Sidonchain,
        Family::Spread,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Rrt => "rrt",
            Family::Zhang => "zhang",
            Family::Nested2e => "nested2e",
            Family::Nestedpe => "nestedpe",
            Family::Multiprime => "multiprime",
            Family::Mixed => "mixed",
            Family::Sidonchain => "sidonchain",
            Family::Spread => "spread",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::BadParams(format!("unknown family {s:?}")))
    }
}

/// Stage order: the default tower, or explicit stage ratios innermost first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum Ordering {
    #[default]
    Default,
    Custom(Vec<u64>),
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ordering::Default => f.write_str("default"),
            Ordering::Custom(r) => {
                let parts: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                write!(f, "custom:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for Ordering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "default" {
            return Ok(Ordering::Default);
        }
        let list = s
            .strip_prefix("custom:")
            .ok_or_else(|| Error::BadParams(format!("ordering must be default or custom:..., got {s:?}")))?;
        let ratios = list
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::BadParams(format!("bad custom ordering {s:?}")))?;
        Ok(Ordering::Custom(ratios))
    }
}

impl Serialize for Ordering {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordering {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parameters of a family; serialized as the construction descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Descriptor {
    pub family: Family,
    pub q: u64,
    pub k: usize,
    /// Exponent of the 2-power or p-power part.
    pub e: Option<u32>,
    /// Stage prime for zhang / nestedpe.
    pub p: Option<u64>,
    /// Stage ratio for sidonchain / spread.
    pub r: Option<u64>,
    /// Odd prime blocks (p_i, e_i) for multiprime / mixed.
    pub blocks: Vec<(u64, u32)>,
    pub ordering: Ordering,
    #[serde(rename = "seed-free")]
    pub seed_free: bool,
}

impl Descriptor {
    pub fn new(family: Family, q: u64, k: usize) -> Self {
        Descriptor {
            family,
            q,
            k,
            e: None,
            p: None,
            r: None,
            blocks: Vec::new(),
            ordering: Ordering::Default,
            seed_free: true,
        }
    }

    pub fn with_e(mut self, e: u32) -> Self {
        self.e = Some(e);
        self
    }

    pub fn with_p(mut self, p: u64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_r(mut self, r: u64) -> Self {
        self.r = Some(r);
        self
    }

    pub fn with_blocks(mut self, blocks: &[(u64, u32)]) -> Self {
        self.blocks = blocks.to_vec();
        self
    }

    pub fn with_ordering(mut self, ordering: Ordering) -> Self {
        self.ordering = ordering;
        self
    }

    pub fn rrt(q: u64, k: usize) -> Self {
        Self::new(Family::Rrt, q, k)
    }

    pub fn zhang(q: u64, k: usize, p: u64) -> Self {
        Self::new(Family::Zhang, q, k).with_p(p)
    }

    pub fn nested_2e(q: u64, k: usize, e: u32) -> Self {
        Self::new(Family::Nested2e, q, k).with_e(e)
    }

    pub fn nested_pe(q: u64, k: usize, p: u64, e: u32) -> Self {
        Self::new(Family::Nestedpe, q, k).with_p(p).with_e(e)
    }

    pub fn multi_prime(q: u64, k: usize, blocks: &[(u64, u32)]) -> Self {
        Self::new(Family::Multiprime, q, k).with_blocks(blocks)
    }

    pub fn mixed(q: u64, k: usize, e: u32, blocks: &[(u64, u32)]) -> Self {
        Self::new(Family::Mixed, q, k).with_e(e).with_blocks(blocks)
    }

    pub fn sidon_chain(q: u64, k: usize, r: u64, e: u32) -> Self {
        Self::new(Family::Sidonchain, q, k).with_r(r).with_e(e)
    }

    pub fn spread(q: u64, k: usize, r: u64) -> Self {
        Self::new(Family::Spread, q, k).with_r(r)
    }
}

/// Parse "5:1,3:2" into prime blocks.
pub fn parse_blocks(s: &str) -> Result<Vec<(u64, u32)>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|b| {
            let (p, e) = b
                .split_once(':')
                .ok_or_else(|| Error::BadParams(format!("block {b:?} is not p:e")))?;
            let p = p.trim().parse().map_err(|_| Error::BadParams(format!("bad prime in {b:?}")))?;
            let e = e.trim().parse().map_err(|_| Error::BadParams(format!("bad exponent in {b:?}")))?;
            Ok((p, e))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "ratio")]
pub enum StageKind {
    /// ratio 2, maps v -> v + v^q w^h g
    Rrt,
    /// odd prime ratio, the large multi-orbit maps
    Zhang(u64),
    /// ratio r >= 3, single map u -> u + u^q g
    Sidon(u64),
    /// ratio r >= 2, inclusion of F_(q^m)
    Spread(u64),
}

impl StageKind {
    pub fn ratio(self) -> u64 {
        match self {
            StageKind::Rrt => 2,
            StageKind::Zhang(p) | StageKind::Sidon(p) | StageKind::Spread(p) => p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerPlan {
    pub q: u64,
    pub k: usize,
    /// innermost first
    pub stages: Vec<StageKind>,
    pub ordering: Ordering,
}

fn tau(q: u64) -> u64 {
    (q - 1) / 2
}

fn big_pow(q: u64, e: usize) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

fn check_q(q: u64) -> Result<()> {
    crate::numth::prime_power(q).map(|_| ()).ok_or(Error::NotPrime(q))
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

fn need<T>(x: Option<T>, what: &str) -> Result<T> {
    x.ok_or_else(|| Error::BadParams(format!("missing parameter {what}")))
}

fn odd_blocks(blocks: &[(u64, u32)]) -> Result<Vec<StageKind>> {
    if blocks.is_empty() {
        return Err(Error::BadParams("at least one prime block is required".into()));
    }
    let mut sorted = blocks.to_vec();
    for &(p, e) in &sorted {
        check_odd_prime(p)?;
        if e == 0 {
            return Err(Error::BadParams(format!("block {p}:0 has zero exponent")));
        }
    }
    sorted.sort_by_key(|b| std::cmp::Reverse(b.0));
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::PrimesNotDistinct);
    }
    // largest prime innermost
    Ok(sorted
        .iter()
        .flat_map(|&(p, e)| std::iter::repeat_n(StageKind::Zhang(p), e as usize))
        .collect())
}

impl TowerPlan {
    /// Validate the family hypotheses and lay out the stages.
    pub fn from_descriptor(d: &Descriptor) -> Result<Self> {
        check_q(d.q)?;
        if d.k == 0 {
            return Err(Error::KTooSmall(0));
        }
        let q = d.q;
        let needs_q3 = |q: u64| if q < 3 { Err(Error::QTooSmall(q)) } else { Ok(()) };
        let needs_k2 = |k: usize| if k < 2 { Err(Error::KTooSmall(k)) } else { Ok(()) };
        let stages = match d.family {
            Family::Rrt => {
                needs_q3(q)?;
                vec![StageKind::Rrt]
            }
            Family::Zhang => {
                needs_k2(d.k)?;
                let p = need(d.p, "p")?;
                check_odd_prime(p)?;
                vec![StageKind::Zhang(p)]
            }
            Family::Nested2e => {
                needs_q3(q)?;
                let e = need(d.e, "e")?;
                if e == 0 {
                    return Err(Error::BadParams("e must be at least 1".into()));
                }
                vec![StageKind::Rrt; e as usize]
            }
            Family::Nestedpe => {
                needs_k2(d.k)?;
                let p = need(d.p, "p")?;
                check_odd_prime(p)?;
                let e = need(d.e, "e")?;
                if e == 0 {
                    return Err(Error::BadParams("e must be at least 1".into()));
                }
                vec![StageKind::Zhang(p); e as usize]
            }
            Family::Multiprime => {
                needs_k2(d.k)?;
                odd_blocks(&d.blocks)?
            }
            Family::Mixed => {
                needs_q3(q)?;
                needs_k2(d.k)?;
                let e = need(d.e, "e")?;
                if e == 0 {
                    return Err(Error::BadParams("mixed needs e >= 1; use multiprime for odd ratios".into()));
                }
                let mut s = odd_blocks(&d.blocks)?;
                s.extend(std::iter::repeat_n(StageKind::Rrt, e as usize));
                s
            }
            Family::Sidonchain => {
                needs_k2(d.k)?;
                let r = need(d.r, "r")?;
                if r < 3 {
                    return Err(Error::BadParams("sidonchain needs ratio r >= 3".into()));
                }
                let e = need(d.e, "e")?;
                if e == 0 {
                    return Err(Error::BadParams("e must be at least 1".into()));
                }
                vec![StageKind::Sidon(r); e as usize]
            }
            Family::Spread => {
                let r = need(d.r, "r")?;
                if r < 2 {
                    return Err(Error::BadParams("spread needs ratio r >= 2".into()));
                }
                vec![StageKind::Spread(r)]
            }
        };
        let stages = match &d.ordering {
            Ordering::Default => stages,
            Ordering::Custom(ratios) => reorder(&stages, ratios)?,
        };
        Ok(TowerPlan {
            q,
            k: d.k,
            stages,
            ordering: d.ordering.clone(),
        })
    }

    /// Ambient degree k * (product of ratios).
    pub fn n(&self) -> usize {
        self.k * self.stages.iter().map(|s| s.ratio() as usize).product::<usize>()
    }

    /// Input degree of every stage.
    pub fn stage_degrees(&self) -> Vec<usize> {
        let mut m = self.k;
        self.stages
            .iter()
            .map(|s| {
                let d = m;
                m *= s.ratio() as usize;
                d
            })
            .collect()
    }

    /// Size of each stage code from its closed formula.
    pub fn stage_sizes(&self) -> Vec<BigUint> {
        self.stages
            .iter()
            .zip(self.stage_degrees())
            .map(|(&s, m)| stage_size(self.q, m, s))
            .collect()
    }

    /// Number of orbit representatives each stage contributes.
    pub fn stage_map_counts(&self) -> Vec<BigUint> {
        self.stages
            .iter()
            .zip(self.stage_degrees())
            .map(|(&s, m)| stage_map_count(self.q, m, s))
            .collect()
    }

    /// Product of the stage sizes.
    pub fn predicted_size(&self) -> BigUint {
        self.stage_sizes().into_iter().product()
    }

    pub fn predicted_min_distance(&self) -> usize {
        match self.stages.as_slice() {
            [StageKind::Spread(_)] => 2 * self.k,
            _ => 2 * self.k - 2,
        }
    }

    /// Orbit count of the full product, before any deduplication.
    pub fn orbit_count(&self) -> BigUint {
        let degs = self.stage_degrees();
        let mut count = BigUint::one();
        for (i, (&s, &m)) in self.stages.iter().zip(&degs).enumerate() {
            count *= stage_map_count(self.q, m, s);
            if i > 0 {
                count *= (big_pow(self.q, m) - 1u32) / (self.q - 1);
            }
        }
        count
    }

    /// The ambient field F_(q^n).
    pub fn field(&self, element_budget: u64) -> Result<FieldCtx> {
        let (p, s) = crate::numth::prime_power(self.q).ok_or(Error::NotPrime(self.q))?;
        FieldCtx::with_budget(p, s, self.n(), element_budget)
    }

    pub fn default_field(&self) -> Result<FieldCtx> {
        self.field(DEFAULT_ELEMENT_BUDGET)
    }

    fn check_field(&self, f: &FieldCtx) -> Result<()> {
        if f.q() != self.q || !f.n().is_multiple_of(self.n()) {
            return Err(Error::DegreeMismatch(format!(
                "plan needs F_({}^{}) inside the field, got F_({}^{})",
                self.q,
                self.n(),
                f.q(),
                f.n()
            )));
        }
        Ok(())
    }

    /// Stage codes, innermost first.
    pub fn build_stages(&self, f: &FieldCtx) -> Result<Vec<MappedCode>> {
        self.check_field(f)?;
        self.stages
            .iter()
            .zip(self.stage_degrees())
            .map(|(&s, m)| build_stage(f, m, s))
            .collect()
    }

    /// Materialize the full product.
    pub fn build(&self, f: &FieldCtx, policy: DuplicatePolicy, orbit_budget: u64) -> Result<MappedCode> {
        let count = self.orbit_count();
        if count > BigUint::from(orbit_budget) {
            return Err(budget("orbit representatives", count.to_u64().unwrap_or(u64::MAX), orbit_budget));
        }
        let stages = self.build_stages(f)?;
        let mut code = odot_chain(f, &stages[1..], &stages[0], policy)?;
        code.predicted_size = Some(self.predicted_size());
        code.predicted_min_distance = Some(self.predicted_min_distance());
        code.provenance.label = self.label();
        Ok(code)
    }

    /// Index-addressable view of the product without materializing it.
    pub fn lazy(&self, f: &FieldCtx) -> Result<LazyChain> {
        let stages = self.build_stages(f)?;
        let transversals = stages
            .iter()
            .skip(1)
            .map(|s| scalar_transversal(f, s.dom_degree))
            .collect::<Result<Vec<_>>>()?;
        Ok(LazyChain {
            count: self.orbit_count(),
            stages,
            transversals,
        })
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .stages
            .iter()
            .zip(self.stage_degrees())
            .map(|(s, m)| match s {
                StageKind::Rrt => format!("rrt[{m}->{}]", 2 * m),
                StageKind::Zhang(p) => format!("zhang{p}[{m}->{}]", *p as usize * m),
                StageKind::Sidon(r) => format!("sidon{r}[{m}->{}]", *r as usize * m),
                StageKind::Spread(r) => format!("spread{r}[{m}->{}]", *r as usize * m),
            })
            .collect();
        format!("q={} k={} {}", self.q, self.k, parts.join(" "))
    }
}

fn reorder(stages: &[StageKind], ratios: &[u64]) -> Result<Vec<StageKind>> {
    let mut pool: Vec<StageKind> = stages.to_vec();
    let mut out = Vec::with_capacity(ratios.len());
    for &r in ratios {
        let pos = pool
            .iter()
            .position(|s| s.ratio() == r)
            .ok_or_else(|| Error::BadParams(format!("custom ordering uses ratio {r} more often than the family")))?;
        out.push(pool.remove(pos));
    }
    if !pool.is_empty() {
        return Err(Error::BadParams("custom ordering must list every stage ratio".into()));
    }
    Ok(out)
}

/// Closed-form size of one stage code at input degree m.
pub fn stage_size(q: u64, m: usize, stage: StageKind) -> BigUint {
    let qn = |e: usize| big_pow(q, e);
    match stage {
        StageKind::Rrt => BigUint::from(tau(q)) * (qn(2 * m) - 1u32) / (q - 1),
        StageKind::Zhang(p) => {
            let l = ((p - 3) / 2) as usize;
            qn(m) * (qn((l + 1) * m) - 1u32) * (qn(p as usize * m) - 1u32) / (qn(m) - 1u32)
        }
        StageKind::Sidon(r) => (qn(r as usize * m) - 1u32) / (q - 1),
        StageKind::Spread(r) => (qn(r as usize * m) - 1u32) / (qn(m) - 1u32),
    }
}

/// Number of maps (orbit representatives) in one stage code.
pub fn stage_map_count(q: u64, m: usize, stage: StageKind) -> BigUint {
    match stage {
        StageKind::Rrt => BigUint::from(tau(q)),
        StageKind::Zhang(p) => {
            let l = ((p - 3) / 2) as usize;
            let qm = big_pow(q, m);
            (0..=l)
                .map(|l0| {
                    let s = if l0 == 0 {
                        BigUint::one()
                    } else {
                        qm.pow(l0 as u32 - 1) * (&qm - 1u32)
                    };
                    s * &qm * (q - 1) * (l - l0 + 1)
                })
                .sum()
        }
        StageKind::Sidon(_) | StageKind::Spread(_) => BigUint::one(),
    }
}

/// Field elements chosen for one stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StageChoice {
    pub gamma: Elem,
    pub omega: Elem,
}

/// g = generator of F_(q^(rm)). For ratio 2, w is the generator of F_q (the
/// blocks use w^h, h <= (q-1)/2, and N(g) is primitive in F_(q^m) because g
/// is); otherwise w is the generator of F_(q^m).
pub fn stage_choice(f: &FieldCtx, m: usize, stage: StageKind) -> Result<StageChoice> {
    let r = stage.ratio() as usize;
    let gamma = f.subfield_generator(r * m)?;
    let omega = match stage {
        StageKind::Rrt => f.subfield_generator(1)?,
        _ => f.subfield_generator(m)?,
    };
    Ok(StageChoice { gamma, omega })
}

pub fn build_stage(f: &FieldCtx, m: usize, stage: StageKind) -> Result<MappedCode> {
    let maps = stage_map_count(f.q(), m, stage);
    if maps > BigUint::from(DEFAULT_ORBIT_BUDGET) {
        return Err(budget("stage maps", maps.to_u64().unwrap_or(u64::MAX), DEFAULT_ORBIT_BUDGET));
    }
    let mut code = match stage {
        StageKind::Rrt => rrt_stage(f, m)?,
        StageKind::Zhang(p) => zhang_stage(f, m, p)?,
        StageKind::Sidon(r) => {
            let c = stage_choice(f, m, stage)?;
            let map = f.lin_map(m, r as usize * m, &[f.one(), c.gamma])?;
            MappedCode::from_maps(f, vec![map], &format!("sidon{r}[{m}]"))?
        }
        StageKind::Spread(r) => {
            let map = f.lin_map(m, r as usize * m, &[f.one()])?;
            MappedCode::from_maps(f, vec![map], &format!("spread{r}[{m}]"))?
        }
    };
    code.predicted_size = Some(stage_size(f.q(), m, stage));
    code.predicted_min_distance = Some(match stage {
        StageKind::Spread(_) => 2 * m,
        _ => 2 * m - 2,
    });
    Ok(code)
}

/// Maps v -> v + v^q w^h g for h = 1..tau, from F_(q^m) to F_(q^2m).
pub fn rrt_maps(f: &FieldCtx, m: usize) -> Result<Vec<LinMap>> {
    if f.q() < 3 {
        return Err(Error::QTooSmall(f.q()));
    }
    let c = stage_choice(f, m, StageKind::Rrt)?;
    (1..=tau(f.q()))
        .map(|h| {
            let coeff = f.mul(f.pow(c.omega, h), c.gamma);
            f.lin_map(m, 2 * m, &[f.one(), coeff])
        })
        .collect()
}

pub fn rrt_stage(f: &FieldCtx, m: usize) -> Result<MappedCode> {
    let maps = rrt_maps(f, m)?;
    MappedCode::from_maps(f, maps, &format!("rrt[{m}]"))
}

/// One index tuple (alpha, a, j, l1) at a given l0 = alpha.len().
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZhangIndex {
    pub alphas: Vec<Elem>,
    pub a: Elem,
    pub j: u64,
    pub l1: usize,
}

impl ZhangIndex {
    pub fn l0(&self) -> usize {
        self.alphas.len()
    }
}

/// All index tuples at input degree m for prime p, in lexicographic order
/// of (l0, alphas, a, j, l1) with field elements in subfield-iteration order.
pub fn zhang_indices(f: &FieldCtx, m: usize, p: u64) -> Result<Vec<ZhangIndex>> {
    check_odd_prime(p)?;
    let l = ((p - 3) / 2) as usize;
    let elems: Vec<Elem> = f.iterate_subfield(m)?.collect();
    let units = &elems[1..];
    let mut out = Vec::new();
    for l0 in 0..=l {
        // S_(m,l0), last coordinate nonzero, last coordinate fastest
        let mut tuples: Vec<Vec<Elem>> = vec![Vec::new()];
        for i in 0..l0 {
            let choices = if i + 1 == l0 { units } else { &elems[..] };
            tuples = tuples
                .iter()
                .flat_map(|t| choices.iter().map(move |&c| [t.as_slice(), &[c]].concat()))
                .collect();
        }
        for alphas in tuples {
            for &a in &elems {
                for j in 0..f.q() - 1 {
                    for l1 in l0..=l {
                        out.push(ZhangIndex {
                            alphas: alphas.clone(),
                            a,
                            j,
                            l1,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// u -> u P(g) + w^j (u^q + a u) g^(l1+1), from F_(q^m) to F_(q^pm).
pub fn zhang_map(f: &FieldCtx, m: usize, p: u64, c: StageChoice, idx: &ZhangIndex) -> Result<LinMap> {
    // P(g) = 1 + a_1 g + ... + a_l0 g^l0
    let mut pg = f.one();
    let mut gp = f.one();
    for &alpha in &idx.alphas {
        gp = f.mul(gp, c.gamma);
        pg = f.add(pg, f.mul(alpha, gp));
    }
    let t = f.mul(f.pow(c.omega, idx.j), f.pow(c.gamma, idx.l1 as u64 + 1));
    let c0 = f.add(pg, f.mul(idx.a, t));
    f.lin_map(m, p as usize * m, &[c0, t])
}

pub fn zhang_stage(f: &FieldCtx, m: usize, p: u64) -> Result<MappedCode> {
    if m < 2 {
        return Err(Error::KTooSmall(m));
    }
    let c = stage_choice(f, m, StageKind::Zhang(p))?;
    let maps = zhang_indices(f, m, p)?
        .par_iter()
        .map(|idx| zhang_map(f, m, p, c, idx))
        .collect::<Result<Vec<_>>>()?;
    MappedCode::from_maps(f, maps, &format!("zhang{p}[{m}]"))
}

/// Stage codes of a product, addressed by orbit index in the order that
/// [`odot_chain`] produces them (outer map slowest, innermost map fastest).
pub struct LazyChain {
    count: BigUint,
    stages: Vec<MappedCode>,
    transversals: Vec<Vec<Elem>>,
}

impl LazyChain {
    pub fn count(&self) -> &BigUint {
        &self.count
    }

    pub fn degree(&self) -> usize {
        self.stages.last().map_or(0, |s| s.codom_degree)
    }

    pub fn k(&self) -> usize {
        self.stages.first().map_or(0, |s| s.dom_degree)
    }

    /// Composed map of orbit `index`.
    pub fn map(&self, f: &FieldCtx, index: &BigUint) -> Result<LinMap> {
        if index >= &self.count {
            return Err(Error::BadParams(format!("orbit index {index} out of range")));
        }
        // digits from the outermost stage inward
        let mut rest = index.clone();
        let mut inner_counts = Vec::with_capacity(self.stages.len());
        let mut c = BigUint::one();
        for (i, s) in self.stages.iter().enumerate() {
            inner_counts.push(c.clone());
            c *= s.orbits.len();
            if i > 0 {
                c *= self.transversals[i - 1].len();
            }
        }
        let mut acc: Option<LinMap> = None;
        let mut pending_alpha: Option<Elem> = None;
        for i in (0..self.stages.len()).rev() {
            let below = &inner_counts[i];
            let per_map = if i > 0 {
                below * self.transversals[i - 1].len()
            } else {
                below.clone()
            };
            let h = (&rest / &per_map).to_usize().expect("digit fits");
            rest %= &per_map;
            let mut map = self.stages[i].orbits[h].map.clone();
            if let Some(a) = pending_alpha.take() {
                map = f.scale_map(a, &map)?;
            }
            acc = Some(match acc {
                None => map,
                Some(outer) => f.compose(&outer, &map)?,
            });
            if i > 0 {
                let a = (&rest / below).to_usize().expect("digit fits");
                rest %= below;
                pending_alpha = Some(self.transversals[i - 1][a]);
            }
        }
        Ok(acc.expect("at least one stage"))
    }

    pub fn rep(&self, f: &FieldCtx, index: &BigUint) -> Result<Subspace> {
        Ok(f.map_image(&self.map(f, index)?))
    }
}
