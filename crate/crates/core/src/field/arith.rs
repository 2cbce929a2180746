//! Packed polynomial-basis arithmetic over F_p[x]/(f).
//!
//! Coordinate `i` occupies bits `[i*lane, (i+1)*lane)` of a `u64`, where
//! `lane` is the bit length of `p - 1`. For p = 2 that is one bit per
//! coordinate and addition is XOR.

pub(crate) const MAX_DEG_ODD: usize = 32;

#[derive(Clone, Debug)]
pub(crate) struct Arith {
    pub p: u64,
    pub deg: usize,
    pub lane: u32,
    pub mask: u64,
    /// x^deg = sum tail[j] x^j
    pub tail: Vec<u64>,
    pub tail_packed: u64,
}

impl Arith {
    pub fn new(p: u64, modulus: &[u64]) -> Self {
        let deg = modulus.len() - 1;
        let lane = if p == 2 { 1 } else { 64 - (p - 1).leading_zeros() };
        let mask = (1u64 << lane) - 1;
        let tail: Vec<u64> = modulus[..deg].iter().map(|&m| (p - m % p) % p).collect();
        let mut ar = Arith {
            p,
            deg,
            lane,
            mask,
            tail,
            tail_packed: 0,
        };
        ar.tail_packed = ar.pack(&ar.tail.clone());
        ar
    }

    #[inline(always)]
    pub fn lane_of(&self, x: u64, i: usize) -> u64 {
        (x >> (i as u32 * self.lane)) & self.mask
    }

    #[inline]
    pub fn unpack(&self, x: u64, out: &mut [u64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.deg) {
            *o = self.lane_of(x, i);
        }
    }

    #[inline]
    pub fn pack(&self, c: &[u64]) -> u64 {
        let mut r = 0u64;
        for (i, &v) in c.iter().enumerate().take(self.deg) {
            r |= v << (i as u32 * self.lane);
        }
        r
    }

    /// Base-p digits of `idx`, packed.
    pub fn from_index(&self, mut idx: u64) -> u64 {
        let mut r = 0u64;
        for i in 0..self.deg {
            r |= (idx % self.p) << (i as u32 * self.lane);
            idx /= self.p;
        }
        r
    }

    pub fn to_index(&self, x: u64) -> u64 {
        let mut r = 0u64;
        for i in (0..self.deg).rev() {
            r = r * self.p + self.lane_of(x, i);
        }
        r
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            return a ^ b;
        }
        let mut r = 0u64;
        for i in 0..self.deg {
            let mut s = self.lane_of(a, i) + self.lane_of(b, i);
            if s >= self.p {
                s -= self.p;
            }
            r |= s << (i as u32 * self.lane);
        }
        r
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if self.p == 2 {
            return a;
        }
        let mut r = 0u64;
        for i in 0..self.deg {
            let c = self.lane_of(a, i);
            if c != 0 {
                r |= (self.p - c) << (i as u32 * self.lane);
            }
        }
        r
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            return a ^ b;
        }
        self.add(a, self.neg(b))
    }

    /// Multiply every coordinate by the prime-field scalar `c`.
    #[inline]
    pub fn scale(&self, a: u64, c: u64) -> u64 {
        let c = c % self.p;
        if c == 0 {
            return 0;
        }
        if c == 1 {
            return a;
        }
        let mut r = 0u64;
        for i in 0..self.deg {
            let v = self.lane_of(a, i) * c % self.p;
            r |= v << (i as u32 * self.lane);
        }
        r
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            self.mul2(a, b)
        } else {
            self.mul_odd(a, b)
        }
    }

    #[inline]
    fn mul2(&self, a: u64, b: u64) -> u64 {
        let top = 1u64 << self.deg;
        let mut r = 0u64;
        let mut i = self.deg;
        while i > 0 {
            i -= 1;
            r <<= 1;
            if r & top != 0 {
                r ^= top | self.tail_packed;
            }
            if (a >> i) & 1 == 1 {
                r ^= b;
            }
        }
        r
    }

    fn mul_odd(&self, a: u64, b: u64) -> u64 {
        let d = self.deg;
        let p = self.p;
        let mut ac = [0u64; MAX_DEG_ODD];
        let mut bc = [0u64; MAX_DEG_ODD];
        self.unpack(a, &mut ac);
        self.unpack(b, &mut bc);
        let mut conv = [0u64; 2 * MAX_DEG_ODD];
        for i in 0..d {
            let x = ac[i];
            if x == 0 {
                continue;
            }
            for j in 0..d {
                conv[i + j] += x * bc[j];
            }
        }
        for i in (d..2 * d - 1).rev() {
            let c = conv[i] % p;
            if c == 0 {
                continue;
            }
            for j in 0..d {
                conv[i - d + j] += c * self.tail[j];
            }
        }
        let mut r = 0u64;
        for (i, &c) in conv.iter().enumerate().take(d) {
            r |= (c % p) << (i as u32 * self.lane);
        }
        r
    }

    pub fn one(&self) -> u64 {
        if self.deg == 0 {
            0
        } else {
            1
        }
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}
