use num_bigint::BigUint;
use num_rational::BigRational;
use orbitnest::bounds::{
    family_for_ratio, johnson, predicted_size, ratio_ceiling, ratio_report, table1_size, to_csv, trend, TableEntry,
};
use orbitnest::constructions::{Descriptor, Ordering, TowerPlan};
use orbitnest::Error;
use proptest::prelude::*;

fn big(x: u128) -> BigUint {
    BigUint::from(x)
}

/// J_q(n, d, k) = floor((q^n-1)/(q^k-1) * J_q(n-1, d, k-1)), ending at k = d/2.
fn johnson_oracle(q: u128, n: u32, d: u32, k: u32) -> u128 {
    let inner = if k == d / 2 { 1 } else { johnson_oracle(q, n - 1, d, k - 1) };
    (q.pow(n) - 1) * inner / (q.pow(k) - 1)
}

#[test]
fn johnson_values() {
    assert_eq!(johnson_oracle(3, 8, 2, 2), 820 * 1093);
    assert_eq!(johnson_oracle(2, 6, 2, 2), 21 * 31);
    assert_eq!(johnson(3, 8, 2, 2).unwrap(), big(896260));
    assert_eq!(johnson(2, 6, 2, 2).unwrap(), big(651));
    for q in [2u64, 3, 4, 5] {
        for n in 2..=12u32 {
            for k in 1..=n.min(6) {
                for d in (2..=2 * k).step_by(2) {
                    if (q as u128).checked_pow(n * (k - d / 2 + 1)).is_none() {
                        continue;
                    }
                    assert_eq!(
                        johnson(q, n as usize, d as usize, k as usize).unwrap(),
                        big(johnson_oracle(q as u128, n, d, k)),
                        "q={q} n={n} d={d} k={k}"
                    );
                }
            }
        }
    }
    // spread regime: at least the number of spread elements
    for (q, n, k) in [(2u64, 6usize, 2usize), (3, 8, 4), (2, 12, 3)] {
        let j = johnson(q, n, 2 * k, k).unwrap();
        assert!(j >= (BigUint::from(q).pow(n as u32) - 1u32) / (BigUint::from(q).pow(k as u32) - 1u32));
    }
}

proptest! {
    #[test]
    fn johnson_monotone(q in prop::sample::select(vec![2u64, 3, 4, 5, 7]), k in 1usize..6, extra in 0usize..8, dh in 1usize..6) {
        let n = k + extra;
        let d = 2 * dh.min(k);
        let j = johnson(q, n, d, k).unwrap();
        prop_assert!(johnson(q, n + 1, d, k).unwrap() >= j);
        if d + 2 <= 2 * k {
            prop_assert!(johnson(q, n, d + 2, k).unwrap() <= j);
        }
    }
}

#[test]
fn table_rows() {
    assert_eq!(table1_size(1, 3, 2, 2).unwrap(), big(40));
    // floor(7/2) * 8 * 6560
    assert_eq!(table1_size(2, 3, 2, 4).unwrap(), big(3 * 8 * 6560));
    for (q, k) in [(2u64, 2usize), (3, 2), (2, 3), (4, 2)] {
        let qk = (q as u128).pow(k as u32);
        assert_eq!(table1_size(3, q, k, 3).unwrap(), big(qk * (qk.pow(3) - 1)));
        // r = 5: h = 2, l = 1
        let s3 = qk * (qk.pow(2) - 1) / (qk - 1) * (qk.pow(5) - 1);
        assert_eq!(table1_size(3, q, k, 5).unwrap(), big(s3));
        let s4 = 2 * ((qk - 1).pow(2) * (qk.pow(5) - 1) + (qk - 1) * (qk.pow(5) - 1) / (q as u128 - 1));
        assert_eq!(table1_size(4, q, k, 5).unwrap(), big(s4));
        let s5 = 2 * qk * (qk - 1) * (qk.pow(5) - 1) + (qk.pow(5) - 1) / (qk - 1);
        assert_eq!(table1_size(5, q, k, 5).unwrap(), big(s5));
    }
    let guard = |i, q, k, r| matches!(table1_size(i, q, k, r), Err(Error::GuardViolation(_)));
    assert!(guard(4, 3, 2, 4));
    assert!(guard(5, 3, 2, 3));
    assert!(guard(1, 2, 2, 2));
    assert!(guard(1, 3, 2, 4));
    assert!(guard(2, 3, 2, 8));
    assert!(guard(3, 3, 2, 2));
    assert!(matches!(table1_size(6, 3, 2, 2), Err(Error::BadParams(_))));
}

#[test]
fn predicted_sizes() {
    assert_eq!(predicted_size(&Descriptor::rrt(3, 2)).unwrap(), big(40));
    assert_eq!(predicted_size(&Descriptor::zhang(2, 2, 3)).unwrap(), big(252));
    assert_eq!(predicted_size(&Descriptor::zhang(2, 2, 5)).unwrap(), big(20460));
    assert_eq!(predicted_size(&Descriptor::nested_2e(3, 2, 2)).unwrap(), big(131200));
    assert_eq!(predicted_size(&Descriptor::nested_pe(2, 2, 3, 2)).unwrap(), big(252 * 64 * 262143));
    assert_eq!(predicted_size(&Descriptor::sidon_chain(2, 2, 3, 2)).unwrap(), big(63 * 262143));
    assert_eq!(predicted_size(&Descriptor::spread(3, 2, 2)).unwrap(), big(10));
    assert_eq!(
        predicted_size(&Descriptor::mixed(2, 2, 1, &[(3, 1)])).unwrap_err(),
        Error::GuardViolation("q >= 3".into())
    );
    assert!(matches!(predicted_size(&Descriptor::zhang(2, 1, 3)), Err(Error::GuardViolation(_))));

    // the closed formulas agree with the stage-by-stage plan
    let descriptors = [
        Descriptor::rrt(5, 3),
        Descriptor::zhang(3, 2, 7),
        Descriptor::nested_2e(4, 3, 3),
        Descriptor::nested_pe(3, 2, 5, 3),
        Descriptor::multi_prime(2, 2, &[(3, 2), (5, 1), (7, 1)]),
        Descriptor::mixed(3, 2, 2, &[(3, 1), (5, 1)]),
        Descriptor::multi_prime(2, 3, &[(5, 1), (3, 2)]).with_ordering(Ordering::Custom(vec![3, 5, 3])),
        Descriptor::sidon_chain(2, 2, 5, 2),
        Descriptor::spread(2, 3, 4),
    ];
    for d in descriptors {
        let plan = TowerPlan::from_descriptor(&d).unwrap();
        assert_eq!(predicted_size(&d).unwrap(), plan.predicted_size(), "{d:?}");
    }
}

#[test]
fn ordered_towers_at_45k() {
    // the three orderings of 5 * 3 * 3
    let k = 2u32;
    let p = |e: u32| BigUint::from(2u32).pow(e * k);
    let one = || BigUint::from(1u32);
    let blocks = [(5u64, 1u32), (3, 2)];
    let d = |o: Ordering| predicted_size(&Descriptor::multi_prime(2, k as usize, &blocks).with_ordering(o)).unwrap();
    let default = d(Ordering::Default);
    let t1 = p(20) * (p(15) - one()) * (p(45) - one()) * p(1) * (p(2) - one()) * (p(5) - one()) / (p(1) - one());
    let t2 = p(13) * (p(18) - one()) * (p(45) - one()) * (p(3) - one());
    let t3 = p(19) * (p(45) - one()) * (p(6) - one()) * (p(15) - one());
    assert_eq!(default, t1);
    assert_eq!(d(Ordering::Custom(vec![3, 3, 5])), t2);
    assert_eq!(d(Ordering::Custom(vec![3, 5, 3])), t3);
    assert!(t1 > t3 && t3 > t2);
}

#[test]
fn ratio_trends() {
    let rows = ratio_report(&[Descriptor::nested_2e(3, 2, 2), Descriptor::nested_2e(3, 3, 2)], &[1, 2, 3, 4, 5]).unwrap();
    assert_eq!(rows[0].size, big(131200));
    assert_eq!(rows[0].johnson, big(896260));
    assert_eq!(rows[0].ratio, BigRational::new(131200.into(), 896260.into()));
    assert_eq!(rows[0].ratio_decimal, "0.146386");
    assert_eq!(rows[0].r, 4);
    let quarter = ratio_ceiling(&Descriptor::nested_2e(3, 2, 2));
    assert_eq!(quarter, BigRational::new(1.into(), 4.into()));
    let t = trend(&rows, &quarter);
    assert!(t.strictly_increasing && t.below_ceiling);
    assert!(matches!(rows[0].table[0], TableEntry::Guard(_)));
    assert!(rows[0].table[1].size().is_some());

    let rows = ratio_report(&(2..=5).map(|k| Descriptor::nested_pe(2, k, 3, 2)).collect::<Vec<_>>(), &[3]).unwrap();
    let one = ratio_ceiling(&Descriptor::nested_pe(2, 2, 3, 2));
    let t = trend(&rows, &one);
    assert!(t.strictly_increasing && t.below_ceiling);
    assert!(matches!(rows[0].table[0], TableEntry::Skipped));
    assert!(rows.iter().all(|r| r.dominates_s3 == Some(true)));
}

#[test]
fn sizes_stay_below_johnson() {
    let mut ds = vec![
        Descriptor::rrt(3, 2),
        Descriptor::rrt(5, 2),
        Descriptor::rrt(7, 3),
        Descriptor::zhang(2, 2, 3),
        Descriptor::zhang(2, 2, 5),
        Descriptor::zhang(3, 3, 7),
        Descriptor::sidon_chain(2, 2, 3, 2),
        Descriptor::multi_prime(2, 2, &[(5, 1), (3, 2)]),
    ];
    for q in [2u64, 3, 4, 5] {
        for k in 2..=4 {
            for r in [4u64, 6, 8, 9, 12, 15, 16, 18, 27] {
                if let Some(d) = family_for_ratio(q, k, r) {
                    if predicted_size(&d).is_ok() {
                        ds.push(d);
                    }
                }
            }
        }
    }
    for row in ratio_report(&ds, &[]).unwrap() {
        assert!(row.size <= row.johnson, "{row:?}");
    }
}

#[test]
fn dominance_over_table_row_three() {
    for q in [2u64, 3] {
        for k in [2usize, 3] {
            for r in [8u64, 9, 27] {
                let d = family_for_ratio(q, k, r).unwrap();
                let Ok(size) = predicted_size(&d) else {
                    assert_eq!((q, r), (2, 8));
                    continue;
                };
                assert!(size > table1_size(3, q, k, r).unwrap(), "q={q} k={k} r={r}");
            }
        }
    }
}

#[test]
fn csv_layout() {
    let rows = ratio_report(&[Descriptor::rrt(3, 2), Descriptor::nested_2e(3, 2, 2)], &[1, 2, 3, 4, 5]).unwrap();
    let csv = to_csv(&rows);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "q,k,r,family,size,johnson,ratio,s1,s2,s3,s4,s5");
    assert_eq!(lines[1], "3,2,2,rrt,40,130,0.307692,40,,,,");
    assert!(lines[2].starts_with("3,2,4,nested2e,131200,896260,0.146386,,157440,"));
    assert!(lines[2].ends_with(",,"));
    let json = serde_json::to_value(&rows[1]).unwrap();
    assert_eq!(json["size"], "131200");
    assert_eq!(json["table"][0]["guard"], "n = 2k");
}
