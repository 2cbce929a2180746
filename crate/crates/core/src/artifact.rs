//! JSON encodings of fields, subspaces, maps and constructed codes.
//!
//! Elements are written as coordinate arrays over F_p (constant term
//! first), subspaces as their RREF rows over F_q. A code artifact embeds the
//! map of every representative so it can be checked against its subspace on
//! load.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::constructions::{stage_choice, Descriptor, StageKind, TowerPlan};
use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};
use crate::nesting::{LinMap, MappedCode};
use crate::orbit::{CyclicCode, OrbitRep, Provenance};
use crate::subspace::Subspace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: u64,
    pub s: usize,
    pub n: usize,
    pub modulus: Vec<u64>,
    pub g: Vec<u64>,
}

impl FieldJson {
    pub fn of(f: &FieldCtx) -> Self {
        FieldJson {
            p: f.p(),
            s: f.s(),
            n: f.n(),
            modulus: f.modulus().to_vec(),
            g: f.coords(f.g()),
        }
    }

    /// Rebuilds the field, checking the modulus and generator.
    pub fn open(&self, element_budget: u64) -> Result<FieldCtx> {
        FieldCtx::from_parts(self.p, self.s, self.n, &self.modulus, &self.g, element_budget)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub k: usize,
    pub rows: Vec<Vec<u32>>,
}

impl SubspaceJson {
    pub fn of(v: &Subspace) -> Self {
        SubspaceJson {
            k: v.dim(),
            rows: v.rows().to_vec(),
        }
    }

    pub fn open(&self, f: &FieldCtx) -> Result<Subspace> {
        let v = f.subspace_from_rows(&self.rows)?;
        if v.dim() != self.k || v.rows() != self.rows.as_slice() {
            return Err(Error::InvalidArtifact("subspace rows are not a reduced basis of dimension k".into()));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinMapJson {
    pub dom_degree: usize,
    pub codom_degree: usize,
    pub lin_coeffs: Vec<Vec<u64>>,
}

impl LinMapJson {
    pub fn of(f: &FieldCtx, map: &LinMap) -> Self {
        LinMapJson {
            dom_degree: map.dom_degree(),
            codom_degree: map.codom_degree(),
            lin_coeffs: map.lin_coeffs().iter().map(|&c| f.coords(c)).collect(),
        }
    }

    pub fn open(&self, f: &FieldCtx) -> Result<LinMap> {
        let coeffs = self.lin_coeffs.iter().map(|c| f.elem(c)).collect::<Result<Vec<Elem>>>()?;
        f.lin_map(self.dom_degree, self.codom_degree, &coeffs)
    }
}

/// The elements chosen for one stage of a tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    #[serde(flatten)]
    pub kind: StageKind,
    /// input degree m; the stage maps F_(q^m) into F_(q^(rm))
    pub degree: usize,
    pub gamma: Vec<u64>,
    pub omega: Vec<u64>,
    pub maps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepJson {
    pub map: LinMapJson,
    pub subspace: SubspaceJson,
    pub stab_degree: usize,
}

/// A constructed code with everything needed to replay and verify it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeArtifact {
    pub descriptor: Descriptor,
    pub field: FieldJson,
    pub k: usize,
    pub degree: usize,
    pub stages: Vec<StageRecord>,
    pub provenance: Provenance,
    pub predicted_size: String,
    pub predicted_min_distance: usize,
    pub reps: Vec<RepJson>,
}

impl CodeArtifact {
    pub fn new(f: &FieldCtx, d: &Descriptor, plan: &TowerPlan, code: &MappedCode) -> Result<Self> {
        let counts = plan.stage_map_counts();
        let stages = plan
            .stages
            .iter()
            .zip(plan.stage_degrees())
            .zip(counts)
            .map(|((&kind, m), maps)| {
                let c = stage_choice(f, m, kind)?;
                Ok(StageRecord {
                    kind,
                    degree: m,
                    gamma: f.coords(c.gamma),
                    omega: f.coords(c.omega),
                    maps: u64::try_from(maps).unwrap_or(u64::MAX),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CodeArtifact {
            descriptor: d.clone(),
            field: FieldJson::of(f),
            k: code.dom_degree,
            degree: code.codom_degree,
            stages,
            provenance: code.provenance.clone(),
            predicted_size: plan.predicted_size().to_string(),
            predicted_min_distance: plan.predicted_min_distance(),
            reps: code
                .orbits
                .iter()
                .map(|o| RepJson {
                    map: LinMapJson::of(f, &o.map),
                    subspace: SubspaceJson::of(&o.rep.rep),
                    stab_degree: o.rep.stab_degree,
                })
                .collect(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifact serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArtifact(e.to_string()))
    }

    /// Field and code, after checking that every map is injective with the
    /// stored image and that the stored stabilizers are right.
    pub fn open(&self, element_budget: u64) -> Result<(FieldCtx, CyclicCode)> {
        let f = self.field.open(element_budget)?;
        if self.reps.is_empty() {
            return Err(Error::InvalidArtifact("no representatives".into()));
        }
        let reps = self
            .reps
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let v = r.subspace.open(&f)?;
                let map = r.map.open(&f)?;
                if map.dom_degree() != self.k || map.codom_degree() != self.degree || v.dim() != self.k {
                    return Err(Error::InvalidArtifact(format!("representative {i} has the wrong shape")));
                }
                if !f.is_injective(&map) || f.map_image(&map) != v {
                    return Err(Error::InvalidArtifact(format!("map {i} does not have the stored image")));
                }
                let stab = f.stabilizer_degree(&v, self.degree)?;
                if stab != r.stab_degree {
                    return Err(Error::InvalidArtifact(format!("representative {i} has stabilizer degree {stab}")));
                }
                Ok(OrbitRep {
                    rep: v,
                    stab_degree: stab,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let predicted_size = self
            .predicted_size
            .parse::<BigUint>()
            .map_err(|e| Error::InvalidArtifact(format!("predicted_size: {e}")))?;
        Ok((
            f,
            CyclicCode {
                degree: self.degree,
                k: self.k,
                reps,
                provenance: self.provenance.clone(),
                predicted_size: Some(predicted_size),
                predicted_min_distance: Some(self.predicted_min_distance),
            },
        ))
    }
}
