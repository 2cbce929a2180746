//! Minimum distance of cyclic orbit codes: exhaustive pairwise sweeps,
//! seeded sampling, and a quotient-collision certificate for codes whose
//! intersections should never exceed one dimension.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::echelon::{fp_rank, FpEchelon};
use crate::error::{budget, Result};
use crate::field::{Elem, FieldCtx};
use crate::orbit::{full_sweep, support_hit, AlphaHit, CyclicCode, PointData, SweepStrategy};
use crate::subspace::raw;

/// Default cap on intersection kernels for an exhaustive sweep.
pub const DEFAULT_SWEEP_BUDGET: u64 = 10_000_000_000;

/// dim(U_i ∩ alpha U_j) = dim.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub alpha: u64,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    /// None when the code has fewer than two codewords.
    pub min_distance: Option<usize>,
    pub max_intersection: usize,
    pub witness: Option<Witness>,
    pub pairs: u64,
    pub kernels: u64,
}

pub fn sweep_cost(f: &FieldCtx, code: &CyclicCode, strategy: SweepStrategy) -> u64 {
    let s = code.reps.len() as u64;
    let pairs = s * (s + 1) / 2;
    let per = match strategy {
        SweepStrategy::Full => (f.q_pow(code.degree) - 1) / (f.q() - 1),
        SweepStrategy::Support => {
            let pts = (f.q_pow(code.k) - 1) / (f.q() - 1);
            pts * pts
        }
    };
    pairs.saturating_mul(per)
}

fn total_codewords(f: &FieldCtx, code: &CyclicCode) -> u64 {
    code.orbit_sizes(f).iter().sum()
}

/// Exact minimum distance over all distinct codeword pairs, using one
/// intersection sweep per unordered pair of representatives.
pub fn code_min_distance(
    f: &FieldCtx,
    code: &CyclicCode,
    strategy: SweepStrategy,
    sweep_budget: u64,
) -> Result<DistanceReport> {
    let cost = sweep_cost(f, code, strategy);
    if cost > sweep_budget {
        return Err(budget("intersection kernels", cost, sweep_budget));
    }
    let s = code.reps.len();
    let pairs = (s * (s + 1) / 2) as u64;
    if total_codewords(f, code) < 2 {
        return Ok(DistanceReport {
            min_distance: None,
            max_intersection: 0,
            witness: None,
            pairs,
            kernels: 0,
        });
    }
    let points: Vec<PointData> = match strategy {
        SweepStrategy::Support => code
            .reps
            .par_iter()
            .map(|r| PointData::new(f, &r.rep))
            .collect::<Result<_>>()?,
        SweepStrategy::Full => Vec::new(),
    };
    let best = (0..s)
        .into_par_iter()
        .map(|i| {
            let mut best: Option<Witness> = None;
            for j in i..s {
                let hit = match strategy {
                    SweepStrategy::Support => support_hit(f, &points[i], &points[j], i == j),
                    SweepStrategy::Full => {
                        match full_sweep(f, &code.reps[i].rep, &code.reps[j].rep, code.degree, i == j) {
                            Ok(h) => h,
                            Err(e) => return Err(e),
                        }
                    }
                };
                let AlphaHit { dim, alpha } = hit;
                if let Some(alpha) = alpha {
                    if best.is_none_or(|b| dim > b.dim) {
                        best = Some(Witness {
                            i,
                            j,
                            alpha: alpha.raw(),
                            dim,
                        });
                    }
                }
            }
            Ok(best)
        })
        .reduce(
            || Ok(None),
            |a, b| {
                let (a, b) = (a?, b?);
                Ok(match (a, b) {
                    (None, x) | (x, None) => x,
                    (Some(x), Some(y)) => {
                        if x.dim > y.dim || (x.dim == y.dim && (x.i, x.j) < (y.i, y.j)) {
                            Some(x)
                        } else {
                            Some(y)
                        }
                    }
                })
            },
        )?;
    let max = best.map_or(0, |w| w.dim);
    Ok(DistanceReport {
        min_distance: Some(2 * code.k - 2 * max),
        max_intersection: max,
        witness: best,
        pairs,
        kernels: cost,
    })
}

/// Per-representative data for repeated intersection kernels.
pub(crate) struct RepKernel {
    red: FpEchelon,
    fp: Vec<u64>,
}

impl RepKernel {
    pub fn new(f: &FieldCtx, v: &crate::Subspace) -> Self {
        let fp = raw(&f.fp_basis(v));
        RepKernel {
            red: FpEchelon::from_vectors(&f.ar, &fp),
            fp,
        }
    }
}

/// dim over F_q of U ∩ alpha W.
#[inline]
pub(crate) fn kernel_dim(f: &FieldCtx, u: &RepKernel, w: &RepKernel, alpha: Elem) -> usize {
    let mut buf = [0u64; 64];
    let n = w.fp.len().min(64);
    for (b, &x) in buf.iter_mut().zip(&w.fp[..n]) {
        *b = u.red.reduce(&f.ar, f.ar.mul(alpha.0, x));
    }
    let r = fp_rank(&f.ar, &buf[..n]);
    (n - r) / f.s()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleReport {
    pub seed: u64,
    pub samples: u64,
    /// samples with i = j and alpha in the stabilizer
    pub skipped_equal: u64,
    pub max_seen: usize,
    pub violations: u64,
    pub first_violation: Option<Witness>,
}

const SAMPLE_CHUNK: u64 = 1 << 16;

/// (equal-pair skips, max intersection, violations, first violation)
type ChunkTally = (u64, usize, u64, Option<Witness>);

/// Seeded random (pair, alpha) probes; a violation is an intersection
/// above `threshold` between distinct codewords. Chunk c draws from
/// ChaCha8 stream c, so results do not depend on the thread count.
pub fn sample_intersections(
    f: &FieldCtx,
    code: &CyclicCode,
    samples: u64,
    seed: u64,
    threshold: usize,
) -> Result<SampleReport> {
    let kernels: Vec<RepKernel> = code.reps.par_iter().map(|r| RepKernel::new(f, &r.rep)).collect();
    let s = code.reps.len();
    let k = code.k;
    let nchunks = samples.div_ceil(SAMPLE_CHUNK);
    let parts: Vec<Result<ChunkTally>> = (0..nchunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let todo = SAMPLE_CHUNK.min(samples - c * SAMPLE_CHUNK);
            let (mut skipped, mut max, mut viol, mut first) = (0u64, 0usize, 0u64, None);
            for _ in 0..todo {
                let i = rng.gen_range(0..s);
                let j = rng.gen_range(0..s);
                let alpha = f.random_nonzero_in(code.degree, &mut rng)?;
                let dim = kernel_dim(f, &kernels[i], &kernels[j], alpha);
                if i == j && dim == k {
                    skipped += 1;
                    continue;
                }
                max = max.max(dim);
                if dim > threshold {
                    viol += 1;
                    if first.is_none() {
                        first = Some(Witness {
                            i,
                            j,
                            alpha: alpha.raw(),
                            dim,
                        });
                    }
                }
            }
            Ok((skipped, max, viol, first))
        })
        .collect();
    let mut rep = SampleReport {
        seed,
        samples,
        skipped_equal: 0,
        max_seen: 0,
        violations: 0,
        first_violation: None,
    };
    for part in parts {
        let (skipped, max, viol, first) = part?;
        rep.skipped_equal += skipped;
        rep.max_seen = rep.max_seen.max(max);
        rep.violations += viol;
        if rep.first_violation.is_none() {
            rep.first_violation = first;
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    /// true when no two distinct codewords meet in two dimensions
    pub holds: bool,
    pub ratios: u64,
    pub collisions_checked: u64,
    pub witness: Option<Witness>,
}

/// Exhaustive test that dim(U_i ∩ a U_j) <= 1 for all distinct codewords.
///
/// Two independent points x1, x2 of U_i and y1, y2 of U_j satisfy
/// x1 = a y1, x2 = a y2 for some a exactly when x1/x2 and y1/y2 agree up to
/// F_q^*. So it suffices to bucket the normalised ratios of all ordered
/// point pairs and inspect collisions.
pub fn certify_intersections_at_most_one(
    f: &FieldCtx,
    code: &CyclicCode,
    ratio_budget: u64,
) -> Result<CertificateReport> {
    let points: Vec<PointData> = code
        .reps
        .par_iter()
        .map(|r| PointData::new(f, &r.rep))
        .collect::<Result<_>>()?;
    let per: u64 = points.iter().map(|p| (p.pts.len() * (p.pts.len().saturating_sub(1))) as u64).sum();
    if per > ratio_budget {
        return Err(budget("point-pair ratios", per, ratio_budget));
    }
    // (ratio, rep, a, b)
    let mut entries: Vec<(Elem, u32, u32, u32)> = points
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, pd)| {
            let n = pd.pts.len();
            (0..n).flat_map(move |a| {
                (0..n)
                    .filter(move |&b| b != a)
                    .map(move |b| (f.projective_normal(f.mul(pd.pts[a], pd.inv[b])), i as u32, a as u32, b as u32))
            })
        })
        .collect();
    entries.par_sort_unstable();
    let mut checked = 0u64;
    let mut witness = None;
    let mut start = 0;
    let kernels: std::collections::HashMap<usize, RepKernel> = Default::default();
    let mut kernels = kernels;
    'outer: while start < entries.len() {
        let mut end = start + 1;
        while end < entries.len() && entries[end].0 == entries[start].0 {
            end += 1;
        }
        for x in start..end {
            for y in x + 1..end {
                let (_, i, _, b) = entries[x];
                let (_, j, _, d) = entries[y];
                let (i, j) = (i as usize, j as usize);
                checked += 1;
                // a maps point d of U_j to point b of U_i
                let alpha = f.mul(points[i].pts[b as usize], points[j].inv[d as usize]);
                for r in [i, j] {
                    kernels.entry(r).or_insert_with(|| RepKernel::new(f, &code.reps[r].rep));
                }
                let dim = kernel_dim(f, &kernels[&i], &kernels[&j], alpha);
                if i == j && dim == code.k {
                    // a stabilizes U_i; not a pair of distinct codewords
                    continue;
                }
                witness = Some(Witness {
                    i,
                    j,
                    alpha: alpha.raw(),
                    dim,
                });
                break 'outer;
            }
        }
        start = end;
    }
    Ok(CertificateReport {
        holds: witness.is_none(),
        ratios: entries.len() as u64,
        collisions_checked: checked,
        witness,
    })
}
