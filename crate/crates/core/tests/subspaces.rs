use std::collections::{BTreeSet, HashSet};

use orbitnest::{Elem, Error, FieldCtx};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// every element of the F_q-span, built by closure
fn element_set(f: &FieldCtx, gens: &[Elem]) -> BTreeSet<Elem> {
    let scalars: Vec<Elem> = f.iterate_subfield(1).unwrap().collect();
    let mut set = BTreeSet::from([f.zero()]);
    for &g in gens {
        let mut next = BTreeSet::new();
        for &x in &set {
            for &c in &scalars {
                next.insert(f.add(x, f.mul(c, g)));
            }
        }
        set = next;
    }
    set
}

fn log_q(f: &FieldCtx, count: usize) -> usize {
    let mut d = 0;
    let mut c = 1usize;
    while c < count {
        c *= f.q() as usize;
        d += 1;
    }
    assert_eq!(c, count);
    d
}

fn fields() -> Vec<FieldCtx> {
    vec![
        FieldCtx::new(3, 1, 4).unwrap(),
        FieldCtx::new(2, 1, 6).unwrap(),
        FieldCtx::new(2, 2, 3).unwrap(),
    ]
}

#[test]
fn counts_two_dimensional_subspaces_of_f81() {
    let f = FieldCtx::new(3, 1, 4).unwrap();
    let mut keys = HashSet::new();
    for a in 1..f.size() {
        for b in a + 1..f.size() {
            let v = f.span(&[f.from_index(a), f.from_index(b)]);
            if v.dim() == 2 {
                keys.insert(f.canonical_key(&v));
            }
        }
    }
    // Gaussian binomial [4 choose 2]_3
    assert_eq!(keys.len(), 130);
}

#[test]
fn dimension_and_membership_match_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for f in fields() {
        for _ in 0..100 {
            let gens: Vec<Elem> = (0..3).map(|_| f.random_elem(&mut rng)).collect();
            let v = f.span(&gens);
            let set = element_set(&f, &gens);
            assert_eq!(log_q(&f, set.len()), v.dim());
            assert_eq!(element_set(&f, v.basis()), set);
            for x in [f.random_elem(&mut rng), gens[0]] {
                assert_eq!(f.contains(&v, x), set.contains(&x));
            }
            let pts = f.projective_points(&v);
            assert_eq!(pts.len() as u64 * (f.q() - 1), set.len() as u64 - 1);
            let scaled: HashSet<Elem> = pts
                .iter()
                .flat_map(|&x| f.iterate_subfield(1).unwrap().skip(1).map(move |c| (c, x)))
                .map(|(c, x)| f.mul(c, x))
                .collect();
            assert_eq!(scaled.len() + 1, set.len());
        }
    }
}

#[test]
fn errors() {
    let f = FieldCtx::new(3, 1, 4).unwrap();
    let h = FieldCtx::new(2, 1, 6).unwrap();
    let u = f.span(&[f.g()]);
    let w = h.span(&[h.g()]);
    assert_eq!(f.distance(&u, &w).unwrap_err(), Error::MixedFields);
    assert_eq!(f.scalar_mul(f.zero(), &u).unwrap_err(), Error::ZeroScalar);
    assert!(matches!(
        f.subspace_from_rows(&[vec![1, 0]]),
        Err(Error::BadLength { .. })
    ));
    let z = f.zero_subspace();
    assert_eq!(z.dim(), 0);
    assert_eq!(f.distance(&z, &u).unwrap(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_and_intersection_agree_with_sets(
        which in 0usize..3,
        seed in any::<u64>(),
        ku in 0usize..4,
        kv in 0usize..4,
    ) {
        let f = &fields()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gu: Vec<Elem> = (0..ku).map(|_| f.random_elem(&mut rng)).collect();
        let gv: Vec<Elem> = (0..kv).map(|_| f.random_elem(&mut rng)).collect();
        let u = f.span(&gu);
        let v = f.span(&gv);
        let su = element_set(f, &gu);
        let sv = element_set(f, &gv);
        let inter = su.intersection(&sv).count();
        prop_assert_eq!(f.intersect_dim(&u, &v).unwrap(), log_q(f, inter));
        let mut all = gu.clone();
        all.extend(&gv);
        prop_assert_eq!(f.sum_dim(&u, &v).unwrap(), log_q(f, element_set(f, &all).len()));
        let d = f.distance(&u, &v).unwrap();
        prop_assert_eq!(d, f.distance(&v, &u).unwrap());
        prop_assert_eq!(d == 0, u == v);
        prop_assert_eq!(d % 2, (u.dim() + v.dim()) % 2);
        // canonical form does not depend on the generating set
        let mut shuffled = gu.clone();
        shuffled.reverse();
        shuffled.push(f.zero());
        prop_assert_eq!(f.canonical_key(&f.span(&shuffled)), f.canonical_key(&u));
    }

    #[test]
    fn scalar_mul_is_a_group_action(which in 0usize..3, seed in any::<u64>(), k in 1usize..4) {
        let f = &fields()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = f.random_subspace(k, f.n(), &mut rng).unwrap();
        let a = f.random_nonzero(&mut rng);
        let b = f.random_nonzero(&mut rng);
        let av = f.scalar_mul(a, &v).unwrap();
        prop_assert_eq!(av.dim(), k);
        let lhs = f.scalar_mul(b, &av).unwrap();
        let rhs = f.scalar_mul(f.mul(a, b), &v).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(f.scalar_mul(f.one(), &v).unwrap(), v.clone());
        // the set map x -> a x sends the closure onto the closure
        let image: BTreeSet<Elem> = element_set(f, v.basis()).iter().map(|&x| f.mul(a, x)).collect();
        prop_assert_eq!(image, element_set(f, av.basis()));
        // distance is invariant under the action
        let w = f.random_subspace(k, f.n(), &mut rng).unwrap();
        let aw = f.scalar_mul(a, &w).unwrap();
        prop_assert_eq!(f.distance(&av, &aw).unwrap(), f.distance(&v, &w).unwrap());
    }
}
