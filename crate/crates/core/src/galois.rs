//! Arithmetic in GF(2^s) over the polynomial basis {1, α, …, α^{s-1}}.
//!
//! Elements are stored as their bit-coefficient vectors: bit `l` of a
//! [`Symbol`] is the coefficient of α^l. Addition is XOR, multiplication goes
//! through log/antilog tables built from a primitive polynomial.

use crate::error::{Error, Result};

/// A field element as its coefficient vector over the polynomial basis.
pub type Symbol = u16;

/// Smallest and largest supported extension degree.
pub const MIN_DEGREE: u32 = 3;
pub const MAX_DEGREE: u32 = 16;

/// Default primitive polynomial (full coefficient mask, leading term included)
/// for a given extension degree.
pub fn default_primitive_poly(s: u32) -> Option<u32> {
    let poly = match s {
        3 => 0b1011,         // x^3 + x + 1
        4 => 0b1_0011,       // x^4 + x + 1
        5 => 0b10_0101,      // x^5 + x^2 + 1
        6 => 0b100_0011,     // x^6 + x + 1
        7 => 0b1000_1001,    // x^7 + x^3 + 1
        8 => 0x11d,          // x^8 + x^4 + x^3 + x^2 + 1
        9 => 0x211,          // x^9 + x^4 + 1
        10 => 0x409,         // x^10 + x^3 + 1
        11 => 0x805,         // x^11 + x^2 + 1
        12 => 0x1053,        // x^12 + x^6 + x^4 + x + 1
        13 => 0x201b,        // x^13 + x^4 + x^3 + x + 1
        14 => 0x4443,        // x^14 + x^10 + x^6 + x + 1
        15 => 0x8003,        // x^15 + x + 1
        16 => 0x1100b,       // x^16 + x^12 + x^3 + x + 1
        _ => return None,
    };
    Some(poly)
}

/// GF(2^s) arithmetic context. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    s: u32,
    primitive_poly: u32,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u32>,
    /// `antilog[i] = α^i`, stored twice over so that `log a + log b` never
    /// needs a reduction.
    antilog: Vec<Symbol>,
}

impl GaloisField {
    /// Builds the field from a primitive polynomial given as a full
    /// coefficient mask (bit `s` set).
    pub fn new(s: u32, primitive_poly: u32) -> Result<Self> {
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&s) {
            return Err(Error::UnsupportedDegree(s));
        }
        if primitive_poly >> s != 1 {
            return Err(Error::PolynomialDegree {
                poly: primitive_poly,
                s,
            });
        }
        let order = (1usize << s) - 1;
        let mut log = vec![0u32; order + 1];
        let mut antilog = vec![0 as Symbol; 2 * order];
        let mut seen = vec![false; order + 1];
        let mut x: u32 = 1;
        for i in 0..order {
            if seen[x as usize] {
                return Err(Error::NonPrimitivePolynomial {
                    poly: primitive_poly,
                    period: i,
                });
            }
            seen[x as usize] = true;
            antilog[i] = x as Symbol;
            antilog[i + order] = x as Symbol;
            log[x as usize] = i as u32;
            x <<= 1;
            if x >> s != 0 {
                x ^= primitive_poly;
            }
        }
        if x != 1 {
            // x^order != 1 means the sequence never closed up; α is not a unit
            // of the right order (cannot happen for an irreducible polynomial).
            return Err(Error::NonPrimitivePolynomial {
                poly: primitive_poly,
                period: order,
            });
        }
        Ok(Self {
            s,
            primitive_poly,
            log,
            antilog,
        })
    }

    /// Field built from [`default_primitive_poly`].
    pub fn with_default_poly(s: u32) -> Result<Self> {
        let poly = default_primitive_poly(s).ok_or(Error::UnsupportedDegree(s))?;
        Self::new(s, poly)
    }

    pub fn degree(&self) -> u32 {
        self.s
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// Number of field elements, 2^s.
    pub fn size(&self) -> usize {
        1 << self.s
    }

    /// Order of the multiplicative group, 2^s − 1.
    pub fn order(&self) -> usize {
        (1 << self.s) - 1
    }

    /// The primitive element α.
    pub fn alpha(&self) -> Symbol {
        2
    }

    #[inline]
    pub fn contains(&self, x: Symbol) -> bool {
        (x as usize) < self.size()
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        if a == 0 || b == 0 {
            return 0;
        }
        self.antilog[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Symbol) -> Option<Symbol> {
        if a == 0 {
            return None;
        }
        let order = self.order() as u32;
        Some(self.antilog[((order - self.log[a as usize]) % order) as usize])
    }

    /// α^e for any (possibly negative) exponent.
    #[inline]
    pub fn exp(&self, e: i64) -> Symbol {
        let order = self.order() as i64;
        self.antilog[e.rem_euclid(order) as usize]
    }

    /// Discrete log base α; `None` for zero.
    #[inline]
    pub fn log(&self, a: Symbol) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// a^e (with 0^0 = 1).
    pub fn pow(&self, a: Symbol, e: u64) -> Symbol {
        if e == 0 {
            return 1;
        }
        match self.log(a) {
            None => 0,
            Some(l) => {
                let order = self.order() as u64;
                self.antilog[((l as u64 * (e % order)) % order) as usize]
            }
        }
    }

    /// a · α^e, the workhorse of the transforms.
    #[inline]
    pub fn mul_exp(&self, a: Symbol, e: usize) -> Symbol {
        if a == 0 {
            return 0;
        }
        let order = self.order();
        self.antilog[self.log[a as usize] as usize + e % order]
    }

    /// Coefficients of `x` over {1, α, …, α^{s-1}}; bit `l` is the coefficient
    /// of α^l.
    pub fn decompose(&self, x: Symbol) -> Vec<u8> {
        (0..self.s).map(|l| ((x >> l) & 1) as u8).collect()
    }

    /// Inverse of [`decompose`](Self::decompose).
    pub fn compose(&self, bits: &[u8]) -> Result<Symbol> {
        if bits.len() != self.s as usize {
            return Err(Error::LengthMismatch {
                what: "basis coordinates",
                expected: self.s as usize,
                found: bits.len(),
            });
        }
        Ok(bits
            .iter()
            .enumerate()
            .fold(0, |acc, (l, &b)| acc | (((b & 1) as Symbol) << l)))
    }

    /// Returns the generator β = α^{(2^s−1)/n} of the order-`n` subgroup.
    pub fn element_of_order(&self, n: usize) -> Result<SubgroupGen> {
        let order = self.order();
        if n == 0 || order % n != 0 {
            return Err(Error::NotADivisor { n, order });
        }
        if !is_prime(n) {
            return Err(Error::NotPrime(n));
        }
        let step = order / n;
        Ok(SubgroupGen {
            beta: self.antilog[step],
            step,
            n,
        })
    }
}

/// Generator β of the cyclic subgroup G = {β^0, …, β^{n−1}}, n prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubgroupGen {
    beta: Symbol,
    /// β = α^step.
    step: usize,
    n: usize,
}

impl SubgroupGen {
    pub fn beta(&self) -> Symbol {
        self.beta
    }

    /// Exponent of β with respect to α.
    pub fn alpha_exponent(&self) -> usize {
        self.step
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// β^e, exponent reduced modulo n.
    #[inline]
    pub fn power(&self, field: &GaloisField, e: i64) -> Symbol {
        field.exp(e.rem_euclid(self.n as i64) * self.step as i64)
    }

    /// a · β^e.
    #[inline]
    pub fn mul_power(&self, field: &GaloisField, a: Symbol, e: usize) -> Symbol {
        field.mul_exp(a, (e % self.n) * self.step)
    }
}

pub(crate) fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Carry-less multiply then reduce; independent of the tables.
    fn slow_mul(a: u32, b: u32, poly: u32, s: u32) -> u32 {
        let mut acc = 0u32;
        for i in 0..s {
            if (b >> i) & 1 == 1 {
                acc ^= a << i;
            }
        }
        for bit in (s..2 * s).rev() {
            if (acc >> bit) & 1 == 1 {
                acc ^= poly << (bit - s);
            }
        }
        acc
    }

    #[test]
    fn gf8_period_and_alpha_cubed() {
        let f = GaloisField::new(3, 0b1011).unwrap();
        // enumerate powers of α by repeated slow multiplication
        let mut x = 1u32;
        let mut period = 0;
        loop {
            x = slow_mul(x, 2, 0b1011, 3);
            period += 1;
            if x == 1 {
                break;
            }
        }
        assert_eq!(period, 7);
        assert_eq!(f.order(), 7);
        assert_eq!(f.pow(2, 3), 0b011); // α^3 = α + 1
    }

    #[test]
    fn gf128_period() {
        let f = GaloisField::with_default_poly(7).unwrap();
        let a = f.alpha();
        let mut x = a;
        let mut t = 1;
        while x != 1 {
            x = f.mul(x, a);
            t += 1;
        }
        assert_eq!(t, 127);
    }

    #[test]
    fn reducible_poly_rejected() {
        let err = GaloisField::new(3, 0b1111).unwrap_err();
        assert!(matches!(err, Error::NonPrimitivePolynomial { .. }));
        // irreducible but not primitive: x^4+x^3+x^2+x+1 has α of order 5
        let err = GaloisField::new(4, 0b1_1111).unwrap_err();
        assert!(matches!(err, Error::NonPrimitivePolynomial { period: 5, .. }));
        assert!(GaloisField::new(3, 0b111).is_err());
        assert!(GaloisField::new(2, 0b111).is_err());
    }

    #[test]
    fn default_polys_are_primitive() {
        for s in MIN_DEGREE..=MAX_DEGREE {
            GaloisField::with_default_poly(s).unwrap();
        }
    }

    #[test]
    fn tables_match_slow_multiply() {
        for s in [3, 4, 7] {
            let f = GaloisField::with_default_poly(s).unwrap();
            let p = f.primitive_poly();
            for a in 0..f.size() as u32 {
                for b in 0..f.size() as u32 {
                    assert_eq!(f.mul(a as Symbol, b as Symbol) as u32, slow_mul(a, b, p, s));
                }
            }
        }
    }

    #[test]
    fn log_antilog_inverse() {
        let f = GaloisField::with_default_poly(11).unwrap();
        for x in 1..f.size() as Symbol {
            assert_eq!(f.exp(f.log(x).unwrap() as i64), x);
        }
        for i in 0..f.order() {
            assert_eq!(f.log(f.exp(i as i64)), Some(i as u32));
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for s in [3, 4] {
            let f = GaloisField::with_default_poly(s).unwrap();
            let q = f.size() as Symbol;
            for a in 0..q {
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..q {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn element_of_order_examples() {
        let f11 = GaloisField::with_default_poly(11).unwrap();
        let g = f11.element_of_order(89).unwrap();
        assert_eq!(g.alpha_exponent(), 23);
        assert_eq!(g.beta(), f11.exp(23));

        let f7 = GaloisField::with_default_poly(7).unwrap();
        let g = f7.element_of_order(127).unwrap();
        assert_eq!(g.alpha_exponent(), 1);
        assert_eq!(g.beta(), f7.alpha());

        let f4 = GaloisField::with_default_poly(4).unwrap();
        let g = f4.element_of_order(5).unwrap();
        assert_eq!(g.alpha_exponent(), 3);
        assert_eq!(f4.pow(g.beta(), 5), 1);
    }

    #[test]
    fn element_of_order_errors() {
        let f4 = GaloisField::with_default_poly(4).unwrap();
        assert!(matches!(f4.element_of_order(7), Err(Error::NotADivisor { .. })));
        assert!(matches!(f4.element_of_order(15), Err(Error::NotPrime(15))));
    }

    #[test]
    fn every_prime_divisor_has_exact_order() {
        for s in MIN_DEGREE..=12 {
            let f = GaloisField::with_default_poly(s).unwrap();
            for n in (2..=f.order()).filter(|&n| f.order() % n == 0 && is_prime(n)) {
                let g = f.element_of_order(n).unwrap();
                let mut x = g.beta();
                let mut t = 1;
                while x != 1 {
                    x = f.mul(x, g.beta());
                    t += 1;
                }
                assert_eq!(t, n, "s={s} n={n}");
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let f = GaloisField::with_default_poly(3).unwrap();
        assert_eq!(f.decompose(0), vec![0, 0, 0]);
        assert_eq!(f.decompose(f.pow(2, 2)), vec![0, 0, 1]);
        assert!(f.compose(&[1, 0]).is_err());
        for x in 0..f.size() as Symbol {
            assert_eq!(f.compose(&f.decompose(x)).unwrap(), x);
        }
    }

    proptest! {
        #[test]
        fn decompose_is_linear(x in 0u16..2048, y in 0u16..2048) {
            let f = GaloisField::with_default_poly(11).unwrap();
            let lhs = f.decompose(x ^ y);
            let rhs: Vec<u8> = f.decompose(x).iter().zip(f.decompose(y)).map(|(a, b)| a ^ b).collect();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(f.compose(&f.decompose(x)).unwrap(), x);
        }
    }
}
