//! Johnson type bound II, the sizes of earlier cyclic code families, closed
//! size formulas for the nested families and size/bound comparison reports.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::constructions::{Descriptor, Family, Ordering};
use crate::error::{Error, Result};
use crate::numth::{is_prime, prime_power};

fn pw(q: u64, e: usize) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

fn pw_minus_one(q: u64, e: usize) -> BigUint {
    pw(q, e) - 1u32
}

fn guard(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::GuardViolation(what.to_string()))
    }
}

/// J_q(n, d, k): floor((q^n-1)/(q^k-1) floor((q^(n-1)-1)/(q^(k-1)-1) ... )),
/// the innermost factor at level d/2.
pub fn johnson(q: u64, n: usize, d: usize, k: usize) -> Result<BigUint> {
    if prime_power(q).is_none() {
        return Err(Error::NotPrime(q));
    }
    if k == 0 || k > n {
        return Err(Error::BadParams(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if !d.is_multiple_of(2) || d < 2 || d > 2 * k {
        return Err(Error::BadParams(format!("d must be even with 2 <= d <= 2k, got d={d}, k={k}")));
    }
    let mut val = BigUint::one();
    for i in d / 2..=k {
        val = (pw_minus_one(q, n - k + i) * val) / pw_minus_one(q, i);
    }
    Ok(val)
}

/// Size of row i (1..=5) of the table of earlier constructions in G_q(rk, k).
pub fn table1_size(i: usize, q: u64, k: usize, r: u64) -> Result<BigUint> {
    if prime_power(q).is_none() {
        return Err(Error::NotPrime(q));
    }
    guard(k >= 1, "k >= 1")?;
    let r = r as usize;
    let n = r * k;
    let qk1 = || pw_minus_one(q, k);
    match i {
        1 => {
            guard(r == 2, "n = 2k")?;
            guard(q > 2, "q > 2")?;
            Ok(BigUint::from((q - 1) / 2) * pw_minus_one(q, 2 * k) / (q - 1))
        }
        2 => {
            guard(r == 4, "n = 4k")?;
            let half = (pw(q, k) - 2u32) / 2u32;
            Ok(half * qk1() * pw_minus_one(q, 4 * k))
        }
        3 => {
            guard(r >= 3, "r >= 3")?;
            let l = r.div_ceil(2) - 2;
            Ok(pw(q, k) * pw_minus_one(q, (l + 1) * k) / qk1() * pw_minus_one(q, n))
        }
        4 => {
            guard(r % 2 == 1 && r >= 5, "r = 2h+1, h >= 2")?;
            let h = (r - 1) / 2;
            let a = qk1().pow(h as u32) * pw_minus_one(q, n);
            let b = qk1().pow(h as u32 - 1) * pw_minus_one(q, n) / (q - 1);
            Ok(BigUint::from(h) * (a + b))
        }
        5 => {
            guard(r % 2 == 1 && r >= 5, "r = 2h+1, h >= 2")?;
            let h = (r - 1) / 2;
            Ok(BigUint::from(h) * pw(q, k) * qk1().pow(h as u32 - 1) * pw_minus_one(q, n)
                + pw_minus_one(q, n) / qk1())
        }
        _ => Err(Error::BadParams(format!("table row {i} does not exist"))),
    }
}

/// Size of a two-block stage G_q(2m, m).
fn two_block_size(q: u64, m: usize) -> BigUint {
    BigUint::from((q - 1) / 2) * pw_minus_one(q, 2 * m) / (q - 1)
}

/// Size of the odd prime stage in G_q(pm, m).
fn large_prime_size(q: u64, m: usize, p: u64) -> BigUint {
    let half = (p as usize - 1) / 2;
    pw(q, m) * pw_minus_one(q, half * m) * pw_minus_one(q, p as usize * m) / pw_minus_one(q, m)
}

fn sidon_size(q: u64, m: usize, r: u64) -> BigUint {
    pw_minus_one(q, r as usize * m) / (q - 1)
}

/// Ratio n/k of the code a descriptor describes.
pub fn descriptor_ratio(d: &Descriptor) -> Result<u64> {
    let two_e = |e: Option<u32>| e.map(|e| 2u64.pow(e));
    let odd: u64 = d.blocks.iter().map(|&(p, e)| p.pow(e)).product();
    let r = match d.family {
        Family::Rrt => Some(2),
        Family::Zhang => d.p,
        Family::Nested2e => two_e(d.e),
        Family::Nestedpe => d.p.zip(d.e).map(|(p, e)| p.pow(e)),
        Family::Multiprime => Some(odd),
        Family::Mixed => two_e(d.e).map(|t| t * odd),
        Family::Sidonchain => d.r.zip(d.e).map(|(r, e)| r.pow(e)),
        Family::Spread => d.r,
    };
    r.ok_or_else(|| Error::BadParams(format!("incomplete {} descriptor", d.family)))
}

fn family_guards(d: &Descriptor) -> Result<()> {
    let q3 = || guard(d.q >= 3, "q >= 3");
    let k2 = || guard(d.k >= 2, "k >= 2");
    let odd_prime = |p: u64| guard(p % 2 == 1 && is_prime(p), "p odd prime");
    let e1 = || guard(d.e.is_some_and(|e| e >= 1), "e >= 1");
    let blocks = || -> Result<()> {
        guard(!d.blocks.is_empty(), "at least one prime block")?;
        for (i, &(p, e)) in d.blocks.iter().enumerate() {
            odd_prime(p)?;
            guard(e >= 1, "block exponents >= 1")?;
            guard(d.blocks[..i].iter().all(|b| b.0 != p), "distinct primes")?;
        }
        Ok(())
    };
    match d.family {
        Family::Rrt => q3(),
        Family::Zhang => k2().and_then(|_| odd_prime(d.p.unwrap_or(0))),
        Family::Nested2e => q3().and_then(|_| e1()),
        Family::Nestedpe => k2().and_then(|_| odd_prime(d.p.unwrap_or(0))).and_then(|_| e1()),
        Family::Multiprime => k2().and_then(|_| blocks()),
        Family::Mixed => q3().and_then(|_| k2()).and_then(|_| e1()).and_then(|_| blocks()),
        Family::Sidonchain => {
            k2()?;
            e1()?;
            guard(d.r.is_some_and(|r| r >= 3), "r >= 3")
        }
        Family::Spread => guard(d.r.is_some_and(|r| r >= 2), "r >= 2"),
    }
}

/// Stage ratios innermost first, as the closed formulas read them: odd primes
/// from the largest one outward, then the 2-power part.
fn formula_ratios(d: &Descriptor) -> Vec<u64> {
    let mut blocks = d.blocks.clone();
    blocks.sort_by_key(|b| std::cmp::Reverse(b.0));
    let odd = blocks.iter().flat_map(|&(p, e)| std::iter::repeat_n(p, e as usize));
    let e = d.e.unwrap_or(0) as usize;
    match d.family {
        Family::Rrt => vec![2],
        Family::Zhang => vec![d.p.unwrap_or(0)],
        Family::Nested2e => vec![2; e],
        Family::Nestedpe => vec![d.p.unwrap_or(0); e],
        Family::Multiprime => odd.collect(),
        Family::Mixed => odd.chain(std::iter::repeat_n(2, e)).collect(),
        Family::Sidonchain => vec![d.r.unwrap_or(0); e],
        Family::Spread => vec![d.r.unwrap_or(0)],
    }
}

/// Closed-form size of the code a descriptor describes.
pub fn predicted_size(d: &Descriptor) -> Result<BigUint> {
    if prime_power(d.q).is_none() {
        return Err(Error::NotPrime(d.q));
    }
    guard(d.k >= 1, "k >= 1")?;
    family_guards(d)?;
    let mut ratios = formula_ratios(d);
    if let Ordering::Custom(custom) = &d.ordering {
        let (mut a, mut b) = (ratios.clone(), custom.clone());
        a.sort_unstable();
        b.sort_unstable();
        guard(a == b, "custom ordering permutes the stage ratios")?;
        ratios = custom.clone();
    }
    let q = d.q;
    if d.family == Family::Spread {
        let r = ratios[0] as usize;
        return Ok(pw_minus_one(q, r * d.k) / pw_minus_one(q, d.k));
    }
    let mut size = BigUint::one();
    let mut m = d.k;
    for &r in &ratios {
        size *= match (d.family, r) {
            (Family::Sidonchain, r) => sidon_size(q, m, r),
            (_, 2) => two_block_size(q, m),
            (_, p) => large_prime_size(q, m, p),
        };
        m *= r as usize;
    }
    Ok(size)
}

/// The nested family for ratio r: odd primes alone give nestedpe or
/// multiprime, a 2-power part gives nested2e or mixed. None for prime r or r < 4.
pub fn family_for_ratio(q: u64, k: usize, r: u64) -> Option<Descriptor> {
    if r < 4 || is_prime(r) {
        return None;
    }
    let e = r.trailing_zeros();
    let mut odd = r >> e;
    let mut blocks = Vec::new();
    let mut p = 3;
    while odd > 1 {
        let mut c = 0;
        while odd.is_multiple_of(p) {
            odd /= p;
            c += 1;
        }
        if c > 0 {
            blocks.push((p, c));
        }
        p += 2;
    }
    blocks.sort_by_key(|b| std::cmp::Reverse(b.0));
    Some(match (e, blocks.as_slice()) {
        (_, []) => Descriptor::nested_2e(q, k, e),
        (0, [(p, pe)]) => Descriptor::nested_pe(q, k, *p, *pe),
        (0, _) => Descriptor::multi_prime(q, k, &blocks),
        _ => Descriptor::mixed(q, k, e, &blocks),
    })
}

/// An exact size, bound and ratio for one descriptor, plus the table sizes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub q: u64,
    pub k: usize,
    pub r: u64,
    pub family: String,
    #[serde(serialize_with = "ser_big")]
    pub size: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub johnson: BigUint,
    #[serde(serialize_with = "ser_ratio")]
    pub ratio: BigRational,
    pub ratio_decimal: String,
    /// Index i-1 holds S_i or the violated hypothesis.
    pub table: Vec<TableEntry>,
    /// size > S_3, when S_3 applies.
    pub dominates_s3: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableEntry {
    Size(#[serde(serialize_with = "ser_big")] BigUint),
    Guard(String),
    Skipped,
}

impl TableEntry {
    pub fn size(&self) -> Option<&BigUint> {
        match self {
            TableEntry::Size(s) => Some(s),
            _ => None,
        }
    }
}

fn ser_big<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_ratio<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Rounds half up to `digits` decimals; the ratio must be nonnegative.
pub fn render_decimal(x: &BigRational, digits: usize) -> String {
    let scale = num_bigint::BigInt::from(10u32).pow(digits as u32);
    let total = (x.numer() * &scale * 2 + x.denom()) / (x.denom() * 2);
    let whole: num_bigint::BigInt = &total / &scale;
    let frac: num_bigint::BigInt = &total % &scale;
    if digits == 0 {
        return whole.to_string();
    }
    format!("{whole}.{:0>digits$}", frac.to_string())
}

/// Rows for the given descriptors; `include` lists the table rows (1..=5) to evaluate.
pub fn ratio_report(rows: &[Descriptor], include: &[usize]) -> Result<Vec<ComparisonRow>> {
    rows.iter()
        .map(|d| {
            let r = descriptor_ratio(d)?;
            let size = predicted_size(d)?;
            let n = r as usize * d.k;
            guard(d.k >= 2, "k >= 2 for distance 2k-2")?;
            let johnson = johnson(d.q, n, 2 * d.k - 2, d.k)?;
            let ratio = BigRational::new(size.clone().into(), johnson.clone().into());
            let table: Vec<TableEntry> = (1..=5)
                .map(|i| {
                    if !include.contains(&i) {
                        return TableEntry::Skipped;
                    }
                    match table1_size(i, d.q, d.k, r) {
                        Ok(s) => TableEntry::Size(s),
                        Err(Error::GuardViolation(why)) => TableEntry::Guard(why),
                        Err(e) => TableEntry::Guard(e.to_string()),
                    }
                })
                .collect();
            let dominates_s3 = table1_size(3, d.q, d.k, r).ok().map(|s3| size > s3);
            Ok(ComparisonRow {
                q: d.q,
                k: d.k,
                r,
                family: d.family.to_string(),
                ratio_decimal: render_decimal(&ratio, 6),
                size,
                johnson,
                ratio,
                table,
                dominates_s3,
            })
        })
        .collect()
}

/// The ratio limit a family approaches: 1/2^e with a 2-power part, else 1.
pub fn ratio_ceiling(d: &Descriptor) -> BigRational {
    let e = match d.family {
        Family::Rrt => 1,
        Family::Nested2e | Family::Mixed => d.e.unwrap_or(0),
        _ => 0,
    };
    BigRational::new(1.into(), num_bigint::BigInt::from(2u32).pow(e))
}

/// Finite-sequence trend over rows taken in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trend {
    pub strictly_increasing: bool,
    pub below_ceiling: bool,
    pub ceiling: String,
}

pub fn trend(rows: &[ComparisonRow], ceiling: &BigRational) -> Trend {
    Trend {
        strictly_increasing: rows.windows(2).all(|w| w[0].ratio < w[1].ratio),
        below_ceiling: rows.iter().all(|r| &r.ratio < ceiling),
        ceiling: ceiling.to_string(),
    }
}

pub const CSV_HEADER: [&str; 12] = ["q", "k", "r", "family", "size", "johnson", "ratio", "s1", "s2", "s3", "s4", "s5"];

/// CSV with one line per row; table cells are empty where a guard fails.
pub fn to_csv(rows: &[ComparisonRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in rows {
        let mut rec = vec![
            row.q.to_string(),
            row.k.to_string(),
            row.r.to_string(),
            row.family.clone(),
            row.size.to_string(),
            row.johnson.to_string(),
            row.ratio_decimal.clone(),
        ];
        rec.extend(row.table.iter().map(|t| t.size().map(|s| s.to_string()).unwrap_or_default()));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
