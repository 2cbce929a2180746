use serde::Serialize;

use super::{poly, Elem, FieldCtx};
use crate::numth::prime_factors;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubfieldEntry {
    pub degree: usize,
    pub generator: Vec<u64>,
    pub generator_order_ok: bool,
    /// x^(q^d) = x holds for exactly q^d elements; None when not enumerated
    pub fixed_points_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldReport {
    pub q: u64,
    pub n: usize,
    pub p: u64,
    pub s: usize,
    pub size: u64,
    pub modulus: Vec<u64>,
    pub g: Vec<u64>,
    pub modulus_irreducible: bool,
    pub generator_primitive: bool,
    pub subfields: Vec<SubfieldEntry>,
}

impl FieldReport {
    pub fn passed(&self) -> bool {
        self.modulus_irreducible
            && self.generator_primitive
            && self
                .subfields
                .iter()
                .all(|s| s.generator_order_ok && s.fixed_points_ok != Some(false))
    }
}

impl FieldCtx {
    fn has_order(&self, x: Elem, order: u64) -> bool {
        self.pow(x, order) == self.one() && prime_factors(order).iter().all(|&r| self.pow(x, order / r) != self.one())
    }

    /// Modulus, generator and subfield lattice, each re-checked; the fixed
    /// points of x -> x^(q^d) are counted when the field has at most
    /// `enumerate_limit` elements.
    pub fn report(&self, enumerate_limit: u64) -> FieldReport {
        let enumerate = self.size() <= enumerate_limit;
        let subfields = self
            .divisors()
            .into_iter()
            .map(|d| {
                let gen = self.subfield_generator(d).expect("divisor");
                let qd = self.q_pow(d);
                let fixed_points_ok = enumerate.then(|| {
                    let fixed = (0..self.size())
                        .filter(|&i| {
                            let x = self.from_index(i);
                            self.pow(x, qd) == x
                        })
                        .count() as u64;
                    fixed == qd
                });
                SubfieldEntry {
                    degree: d,
                    generator: self.coords(gen),
                    generator_order_ok: self.has_order(gen, qd - 1),
                    fixed_points_ok,
                }
            })
            .collect();
        FieldReport {
            q: self.q(),
            n: self.n(),
            p: self.p(),
            s: self.s(),
            size: self.size(),
            modulus: self.modulus().to_vec(),
            g: self.coords(self.g()),
            modulus_irreducible: poly::is_irreducible(self.modulus(), self.p()),
            generator_primitive: self.has_order(self.g(), self.size() - 1),
            subfields,
        }
    }
}
