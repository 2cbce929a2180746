use std::collections::HashSet;

use orbitnest::distance::{certify_intersections_at_most_one, sample_intersections, DEFAULT_SWEEP_BUDGET};
use orbitnest::{code_min_distance, CyclicCode, Elem, FieldCtx, SizeMode, Subspace, SweepStrategy};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn subfield_units(f: &FieldCtx, m: usize) -> Vec<Elem> {
    f.iterate_subfield(m).unwrap().skip(1).collect()
}

// brute force over every unit of F_(q^m)
fn brute_stabilizer_size(f: &FieldCtx, v: &Subspace, m: usize) -> usize {
    subfield_units(f, m)
        .into_iter()
        .filter(|&a| f.scalar_mul(a, v).unwrap() == *v)
        .count()
}

fn brute_orbit(f: &FieldCtx, v: &Subspace, m: usize) -> HashSet<Vec<u8>> {
    subfield_units(f, m)
        .into_iter()
        .map(|a| f.canonical_key(&f.scalar_mul(a, v).unwrap()))
        .collect()
}

fn brute_max_intersection(f: &FieldCtx, u: &Subspace, w: &Subspace, m: usize, same: bool) -> usize {
    subfield_units(f, m)
        .into_iter()
        .filter_map(|a| {
            let aw = f.scalar_mul(a, w).unwrap();
            (!(same && aw == *u)).then(|| f.intersect_dim(u, &aw).unwrap())
        })
        .max()
        .unwrap_or(0)
}

fn brute_sidon(f: &FieldCtx, v: &Subspace, m: usize) -> bool {
    subfield_units(f, m)
        .into_iter()
        .filter(|&a| !f.in_subfield(a, 1).unwrap())
        .all(|a| f.intersect_dim(v, &f.scalar_mul(a, v).unwrap()).unwrap() <= 1)
}

#[test]
fn all_planes_of_f81_sidon_iff_full_orbit_and_distance_two() {
    let f = FieldCtx::new(3, 1, 4).unwrap();
    let mut seen = HashSet::new();
    let mut planes = Vec::new();
    for a in 1..f.size() {
        for b in a + 1..f.size() {
            let v = f.span(&[f.from_index(a), f.from_index(b)]);
            if v.dim() == 2 && seen.insert(f.canonical_key(&v)) {
                planes.push(v);
            }
        }
    }
    assert_eq!(planes.len(), 130);
    let mut sidon_count = 0;
    for v in &planes {
        let sidon = f.is_sidon(v, 4).unwrap().sidon;
        assert_eq!(sidon, brute_sidon(&f, v, 4));
        let size = f.orbit_size(v, 4).unwrap();
        assert_eq!(size as usize, brute_orbit(&f, v, 4).len());
        let code = CyclicCode::new(&f, 4, vec![v.clone()], "single orbit").unwrap();
        let d = code_min_distance(&f, &code, SweepStrategy::Support, DEFAULT_SWEEP_BUDGET)
            .unwrap()
            .min_distance
            .unwrap();
        assert_eq!(sidon, size == 40 && d == 2, "{v:?}");
        sidon_count += sidon as usize;
    }
    // the 10 lines beta*F_9 are the only non-Sidon planes
    assert_eq!(sidon_count, 120);
}

#[test]
fn spread_orbit() {
    let f = FieldCtx::new(3, 1, 4).unwrap();
    let v = f.span(&[f.one(), f.subfield_generator(2).unwrap()]);
    assert_eq!(f.stabilizer_degree(&v, 4).unwrap(), 2);
    assert_eq!(f.orbit_size(&v, 4).unwrap(), 10);
    let sidon = f.is_sidon(&v, 4).unwrap();
    assert!(!sidon.sidon);
    let w = sidon.witness.unwrap();
    assert!(!f.in_subfield(w, 1).unwrap());
    assert_eq!(f.intersect_dim(&v, &f.scalar_mul(w, &v).unwrap()).unwrap(), 2);
    let code = CyclicCode::new(&f, 4, vec![v], "spread").unwrap();
    for strategy in [SweepStrategy::Full, SweepStrategy::Support] {
        let rep = code_min_distance(&f, &code, strategy, DEFAULT_SWEEP_BUDGET).unwrap();
        assert_eq!(rep.min_distance, Some(4));
    }
    assert_eq!(code.size(&f, SizeMode::Enumerate).unwrap(), 10u32.into());
}

fn small_fields() -> Vec<(FieldCtx, Vec<usize>)> {
    vec![
        (FieldCtx::new(3, 1, 4).unwrap(), vec![4, 2]),
        (FieldCtx::new(2, 1, 6).unwrap(), vec![6, 3, 2]),
        (FieldCtx::new(2, 2, 3).unwrap(), vec![3]),
        (FieldCtx::new(2, 1, 8).unwrap(), vec![8, 4]),
        (FieldCtx::new(5, 1, 2).unwrap(), vec![2]),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn orbit_quantities_match_brute_force(which in 0usize..5, mi in 0usize..3, k in 1usize..4, seed in any::<u64>()) {
        let fields = small_fields();
        let (f, degs) = &fields[which];
        let m = degs[mi % degs.len()];
        prop_assume!(k <= m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = f.random_subspace(k, m, &mut rng).unwrap();
        let w = f.random_subspace(k, m, &mut rng).unwrap();
        // stabilizer and orbit
        let stab = brute_stabilizer_size(f, &u, m) as u64;
        let t = f.stabilizer_degree(&u, m).unwrap();
        prop_assert_eq!(stab, f.q_pow(t) - 1);
        let orbit = brute_orbit(f, &u, m);
        prop_assert_eq!(orbit.len() as u64, f.orbit_size(&u, m).unwrap());
        let listed: HashSet<Vec<u8>> = f.enumerate_orbit(&u, m).unwrap().map(|x| f.canonical_key(&x)).collect();
        prop_assert_eq!(&listed, &orbit);
        // orbit key and equivalence test
        let same_orbit = orbit.contains(&f.canonical_key(&w));
        prop_assert_eq!(f.orbit_key(&u).unwrap() == f.orbit_key(&w).unwrap(), same_orbit);
        let eq = f.orbits_equivalent(&u, &w).unwrap();
        prop_assert_eq!(eq.is_some(), same_orbit);
        if let Some(a) = eq {
            prop_assert_eq!(f.scalar_mul(a, &u).unwrap(), w.clone());
        }
        let a = f.random_nonzero_in(m, &mut rng).unwrap();
        let au = f.scalar_mul(a, &u).unwrap();
        prop_assert_eq!(f.orbit_key(&au).unwrap(), f.orbit_key(&u).unwrap());
        // Sidon property
        prop_assert_eq!(f.is_sidon(&u, m).unwrap().sidon, brute_sidon(f, &u, m));
        // both sweep strategies against brute force
        for (x, y, same) in [(&u, &w, false), (&u, &u, true)] {
            let expect = brute_max_intersection(f, x, y, m, same);
            for strategy in [SweepStrategy::Full, SweepStrategy::Support] {
                let hit = f.max_alpha_intersection(x, y, m, same, strategy).unwrap();
                prop_assert_eq!(hit.dim, expect);
                if let Some(alpha) = hit.alpha {
                    let ay = f.scalar_mul(alpha, y).unwrap();
                    prop_assert_eq!(f.intersect_dim(x, &ay).unwrap(), hit.dim);
                }
            }
        }
    }

    #[test]
    fn code_distance_and_size_match_brute_force(which in 0usize..5, k in 1usize..3, reps in 1usize..4, seed in any::<u64>()) {
        let fields = small_fields();
        let (f, degs) = &fields[which];
        let m = degs[0];
        prop_assume!(k < m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vs: Vec<Subspace> = Vec::new();
        for _ in 0..40 {
            if vs.len() == reps {
                break;
            }
            let v = f.random_subspace(k, m, &mut rng).unwrap();
            if vs.iter().all(|x| f.orbits_equivalent(x, &v).unwrap().is_none()) {
                vs.push(v);
            }
        }
        let code = CyclicCode::new(f, m, vs.clone(), "random").unwrap();
        prop_assert_eq!(code.find_equivalent_pair(f).unwrap(), None);
        // brute force over all codewords
        let words: Vec<Subspace> = {
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for v in &vs {
                for a in subfield_units(f, m) {
                    let w = f.scalar_mul(a, v).unwrap();
                    if seen.insert(f.canonical_key(&w)) {
                        out.push(w);
                    }
                }
            }
            out
        };
        prop_assert_eq!(code.size(f, SizeMode::Formula).unwrap(), words.len().into());
        prop_assert_eq!(code.size(f, SizeMode::Enumerate).unwrap(), words.len().into());
        let mut dmin: Option<usize> = None;
        for x in 0..words.len() {
            for y in x + 1..words.len() {
                let d = f.distance(&words[x], &words[y]).unwrap();
                dmin = Some(dmin.map_or(d, |c| c.min(d)));
            }
        }
        for strategy in [SweepStrategy::Full, SweepStrategy::Support] {
            let rep = code_min_distance(f, &code, strategy, DEFAULT_SWEEP_BUDGET).unwrap();
            prop_assert_eq!(rep.min_distance, dmin);
        }
        if let Some(d) = dmin {
            let cert = certify_intersections_at_most_one(f, &code, 1 << 24).unwrap();
            prop_assert_eq!(cert.holds, d + 2 >= 2 * k);
            let sample = sample_intersections(f, &code, 2000, seed, k).unwrap();
            prop_assert!(2 * k - 2 * sample.max_seen >= d);
        }
    }
}
