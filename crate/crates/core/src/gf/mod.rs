//! Arithmetic in F_{p^m} = F_p[x]/P.
//!
//! An element is stored as its integer image `ã = Σ â_i p^{i-1}`, with digit
//! `â_1` the constant coefficient. All digit vectors in this crate are
//! LSB-first; "top" digits always means the `x^{m-1}` end. Conversion to the
//! MSB-first display order happens only in [`FieldParams::display_digits`].

mod expand;
mod matrix;
pub(crate) mod poly;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use expand::{digit_block, expand_operator, top_digit_block, top_digit_submatrix, ExpandedMatrix};
pub use matrix::FqMatrix;

/// Largest supported `log2(q)`; images live in `u128` and Manhattan totals must
/// not overflow for any realistic block length.
pub const MAX_FIELD_BITS: u32 = 100;

/// An element of F_q identified by its integer image in `[0, q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u128);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Integer image `ã`.
    #[inline]
    pub fn image(self) -> u128 {
        self.0
    }

    #[inline]
    pub(crate) fn from_image_unchecked(x: u128) -> Self {
        FieldElement(x)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldSpec {
    p: u32,
    m: usize,
    poly: Vec<u32>,
}

/// The field F_{p^m} with a validated irreducible modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FieldSpec", into = "FieldSpec")]
pub struct FieldParams {
    p: u32,
    m: usize,
    /// Non-leading coefficients of the monic modulus, LSB-first.
    poly: Vec<u32>,
    q: u128,
    powers: Vec<u128>,
    /// For p = 2: modulus bits without the leading term.
    mask: u128,
}

impl TryFrom<FieldSpec> for FieldParams {
    type Error = Error;
    fn try_from(s: FieldSpec) -> Result<Self> {
        FieldParams::new(s.p, s.m, Some(&s.poly))
    }
}

impl From<FieldParams> for FieldSpec {
    fn from(f: FieldParams) -> Self {
        FieldSpec { p: f.p, m: f.m, poly: f.poly }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Validates (or selects) a modulus and builds the field.
pub fn make_field(p: u32, m: usize, poly: Option<&[u32]>) -> Result<FieldParams> {
    FieldParams::new(p, m, poly)
}

impl FieldParams {
    /// `poly` holds the `m` non-leading coefficients LSB-first. When omitted,
    /// the smallest monic irreducible (ordered by `Σ poly_i p^i`) is chosen.
    pub fn new(p: u32, m: usize, poly: Option<&[u32]>) -> Result<Self> {
        if !is_prime(p) || p > u16::MAX as u32 {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::DegreeMismatch { expected: 1, got: 0 });
        }
        let bits = m as f64 * (p as f64).log2();
        if bits > MAX_FIELD_BITS as f64 {
            return Err(Error::FieldTooLarge { bits: bits.ceil() as u32, max_bits: MAX_FIELD_BITS });
        }
        let poly = match poly {
            Some(c) => {
                if c.len() != m {
                    return Err(Error::DegreeMismatch { expected: m, got: c.len() });
                }
                if let Some(bad) = c.iter().find(|&&x| x >= p) {
                    return Err(Error::OutOfRange(format!("coefficient {bad} not in F_{p}")));
                }
                let mut full = c.to_vec();
                full.push(1);
                if !poly::is_irreducible(&full, p) {
                    return Err(Error::Reducible(c.to_vec()));
                }
                c.to_vec()
            }
            None => smallest_irreducible(p, m),
        };
        let mut powers = Vec::with_capacity(m + 1);
        let mut acc = 1u128;
        for _ in 0..=m {
            powers.push(acc);
            acc = acc.saturating_mul(p as u128);
        }
        let q = powers[m];
        let mask = if p == 2 {
            poly.iter().enumerate().fold(0u128, |acc, (i, &c)| acc | ((c as u128) << i))
        } else {
            0
        };
        Ok(FieldParams { p, m, poly, q, powers, mask })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> u128 {
        self.q
    }

    /// `q` as a native index, when it fits.
    pub fn q_usize(&self) -> Option<usize> {
        usize::try_from(self.q).ok()
    }

    pub fn poly(&self) -> &[u32] {
        &self.poly
    }

    /// `p^i` for `0 <= i <= m`.
    #[inline]
    pub fn pow_p(&self, i: usize) -> u128 {
        self.powers[i]
    }

    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.q
    }

    pub fn check(&self, a: FieldElement) -> Result<FieldElement> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(Error::FieldMismatch(format!("image {} outside [0, {})", a.0, self.q)))
        }
    }

    pub fn from_integer(&self, x: u128) -> Result<FieldElement> {
        if x < self.q {
            Ok(FieldElement(x))
        } else {
            Err(Error::OutOfRange(format!("{x} not in [0, {})", self.q)))
        }
    }

    pub fn elements(&self, xs: &[u128]) -> Result<Vec<FieldElement>> {
        xs.iter().map(|&x| self.from_integer(x)).collect()
    }

    pub fn to_integer(&self, a: FieldElement) -> u128 {
        a.0
    }

    /// Digit `i` (0-based, LSB-first) of `a`.
    #[inline]
    pub fn digit(&self, a: FieldElement, i: usize) -> u32 {
        ((a.0 / self.powers[i]) % self.p as u128) as u32
    }

    /// LSB-first digit vector `â`.
    pub fn digits(&self, a: FieldElement) -> Vec<u32> {
        let p = self.p as u128;
        let mut x = a.0;
        (0..self.m)
            .map(|_| {
                let d = (x % p) as u32;
                x /= p;
                d
            })
            .collect()
    }

    /// MSB-first digits, the order used when printing labels.
    pub fn display_digits(&self, a: FieldElement) -> Vec<u32> {
        let mut d = self.digits(a);
        d.reverse();
        d
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<FieldElement> {
        if digits.len() != self.m {
            return Err(Error::LengthMismatch { expected: self.m, got: digits.len() });
        }
        if let Some(bad) = digits.iter().find(|&&d| d >= self.p) {
            return Err(Error::OutOfRange(format!("digit {bad} not in F_{}", self.p)));
        }
        Ok(self.pack(digits))
    }

    #[inline]
    fn pack(&self, digits: &[u32]) -> FieldElement {
        let p = self.p as u128;
        FieldElement(digits.iter().rev().fold(0u128, |acc, &d| acc * p + d as u128))
    }

    /// Digit-wise sum mod p, no carries.
    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        self.digitwise(a, b, |x, y| (x + y) % self.p)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        self.digitwise(a, b, |x, y| (x + self.p - y) % self.p)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.sub(FieldElement::ZERO, a)
    }

    /// `l`-fold sum `a + ... + a`, i.e. digit-wise `l·â mod p`.
    pub fn scale(&self, l: u32, a: FieldElement) -> FieldElement {
        let l = l % self.p;
        if self.p == 2 {
            return if l == 0 { FieldElement::ZERO } else { a };
        }
        self.digitwise(a, FieldElement::ZERO, |x, _| (x * l) % self.p)
    }

    fn digitwise(&self, a: FieldElement, b: FieldElement, f: impl Fn(u32, u32) -> u32) -> FieldElement {
        let p = self.p as u128;
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u128;
        for i in 0..self.m {
            let d = f((x % p) as u32, (y % p) as u32);
            out += d as u128 * self.powers[i];
            x /= p;
            y /= p;
        }
        FieldElement(out)
    }

    /// Polynomial product reduced modulo the field polynomial.
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return self.mul_binary(a, b);
        }
        let m = self.m;
        let p = self.p as u64;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // x^m ≡ -Σ poly_i x^i
        for deg in (m..2 * m - 1).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, &pc) in self.poly.iter().enumerate() {
                let slot = &mut prod[deg - m + i];
                *slot = (*slot + p * p - c * pc as u64) % p;
            }
        }
        let digits: Vec<u32> = prod[..m].iter().map(|&c| c as u32).collect();
        self.pack(&digits)
    }

    fn mul_binary(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let m = self.m;
        let top = 1u128 << (m - 1);
        let full = if m == 128 { u128::MAX } else { (1u128 << m) - 1 };
        let mut acc = 0u128;
        for i in (0..m).rev() {
            // acc <- acc * x mod P
            let carry = acc & top != 0;
            acc = (acc << 1) & full;
            if carry {
                acc ^= self.mask;
            }
            if (b.0 >> i) & 1 == 1 {
                acc ^= a.0;
            }
        }
        FieldElement(acc)
    }

    pub fn pow(&self, a: FieldElement, mut e: u128) -> FieldElement {
        let mut acc = FieldElement::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse as `a^{q-2}`.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn checked_add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.add(self.check(a)?, self.check(b)?))
    }

    pub fn checked_sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.sub(self.check(a)?, self.check(b)?))
    }

    pub fn checked_mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(self.check(a)?, self.check(b)?))
    }

    pub fn add_vec(&self, x: &[FieldElement], y: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
        }
        x.iter().zip(y).map(|(&a, &b)| self.checked_add(a, b)).collect()
    }

    pub fn sub_vec(&self, x: &[FieldElement], y: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
        }
        x.iter().zip(y).map(|(&a, &b)| self.checked_sub(a, b)).collect()
    }

    /// Concatenated digit expansion of a vector (coordinate-major, LSB-first).
    pub fn expand_vec(&self, x: &[FieldElement]) -> Vec<u32> {
        x.iter().flat_map(|&a| self.digits(a)).collect()
    }

    /// Inverse of [`FieldParams::expand_vec`].
    pub fn collapse_vec(&self, digits: &[u32]) -> Result<Vec<FieldElement>> {
        if digits.len() % self.m != 0 {
            return Err(Error::LengthMismatch {
                expected: digits.len().div_ceil(self.m) * self.m,
                got: digits.len(),
            });
        }
        digits.chunks(self.m).map(|c| self.from_digits(c)).collect()
    }
}

fn smallest_irreducible(p: u32, m: usize) -> Vec<u32> {
    let mut low = vec![0u32; m];
    loop {
        let mut full = low.clone();
        full.push(1);
        if poly::is_irreducible(&full, p) {
            return low;
        }
        let mut i = 0;
        while i < m {
            low[i] += 1;
            if low[i] < p {
                break;
            }
            low[i] = 0;
            i += 1;
        }
        assert!(i < m, "an irreducible polynomial of every degree exists");
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::rng::{random_element, seeded};
    use proptest::prelude::*;

    const FIELDS: [(u32, usize); 6] = [(2, 1), (2, 4), (2, 9), (3, 3), (5, 2), (7, 3)];

    proptest! {
        #[test]
        fn field_axioms(which in 0..FIELDS.len(), seed in any::<u64>()) {
            let (p, m) = FIELDS[which];
            let f = make_field(p, m, None).unwrap();
            let mut rng = seeded(seed);
            let [a, b, c] = [0; 3].map(|_| random_element(&f, &mut rng));
            prop_assert_eq!(f.add(a, b), f.add(b, a));
            prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
            prop_assert_eq!(f.sub(f.add(a, b), b), a);
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            }
            prop_assert_eq!(f.from_digits(&f.digits(a)).unwrap(), a);
        }
    }
}
