//! Arithmetic in GF(q) for odd prime powers q = p^d.
//!
//! An element is stored as its canonical code `c_0 + c_1 p + ... + c_{d-1} p^{d-1}`,
//! where `c_i` are the coefficients of its polynomial representative reduced
//! modulo the field's monic irreducible modulus. Ordering elements by code is the
//! lexicographic order on `(c_{d-1}, ..., c_1, c_0)`, so the constant term sits in
//! the last (least significant) position.
//!
//! Multiplication goes through discrete log tables built once per field, which
//! is cheap at the sizes this crate targets (q ≤ 1024 by default).

use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default upper bound on q for field construction.
pub const DEFAULT_FIELD_CAP: u64 = 1024;

const NO_ROOT: u32 = u32::MAX;

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut k = 3;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

/// Splits `q` into `(p, d)` with `q = p^d`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|k| q % k == 0)?;
    let mut rest = q;
    let mut d = 0;
    while rest % p == 0 {
        rest /= p;
        d += 1;
    }
    (rest == 1).then_some((p, d))
}

/// All odd prime powers in `lo..=hi`, ascending.
pub fn odd_prime_powers(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi)
        .filter(|&q| q % 2 == 1 && prime_power(q).is_some())
        .collect()
}

/// An element of a finite field. Carries a fingerprint of its field so that
/// mixing elements of different fields can be detected.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u32,
    tag: u64,
}

impl FieldElement {
    /// The canonical code of the element (see module docs).
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

struct Inner {
    p: u32,
    d: u32,
    q: u32,
    modulus: Vec<u32>,
    tag: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
    sqrt: Vec<u32>,
}

/// A finite field GF(p^d) with p odd. Cheap to clone.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.inner.p)
            .field("d", &self.inner.d)
            .field("q", &self.inner.q)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus
    }
}

impl Eq for FieldSpec {}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("FieldSpec", 3)?;
        s.serialize_field("p", &self.inner.p)?;
        s.serialize_field("d", &self.inner.d)?;
        s.serialize_field("modulus", &self.inner.modulus)?;
        s.end()
    }
}

impl FieldSpec {
    /// The prime field Z_p.
    pub fn prime(p: u64) -> Result<Self> {
        Self::prime_with_cap(p, DEFAULT_FIELD_CAP)
    }

    pub fn prime_with_cap(p: u64, cap: u64) -> Result<Self> {
        check_odd_prime(p)?;
        if p > cap {
            return Err(Error::CapExceeded { size: p, cap });
        }
        Ok(Self::build(p as u32, vec![0, 1]))
    }

    /// GF(p^d) for d ≥ 2, using the lexicographically smallest monic
    /// irreducible polynomial of degree d as modulus.
    pub fn extension(p: u64, d: u32) -> Result<Self> {
        Self::extension_with_cap(p, d, DEFAULT_FIELD_CAP)
    }

    pub fn extension_with_cap(p: u64, d: u32, cap: u64) -> Result<Self> {
        check_odd_prime(p)?;
        if d < 2 {
            return Err(Error::DegreeTooSmall(d));
        }
        let q = checked_order(p, d, cap)?;
        let p = p as u32;
        let modulus = smallest_irreducible(p, d, q)
            .expect("an irreducible polynomial exists in every degree");
        Ok(Self::build(p, modulus))
    }

    /// GF(p^d) with a caller-chosen modulus `[c_0, ..., c_d]`, which must be
    /// monic of degree ≥ 2 and irreducible over Z_p.
    pub fn with_modulus(p: u64, modulus: Vec<u32>, cap: u64) -> Result<Self> {
        check_odd_prime(p)?;
        if modulus.len() < 3 {
            return Err(Error::DegreeTooSmall(modulus.len().saturating_sub(1) as u32));
        }
        let d = (modulus.len() - 1) as u32;
        let q = checked_order(p, d, cap)?;
        let p = p as u32;
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus(format!(
                "coefficients must lie in [0, {p})"
            )));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        if !is_irreducible(&modulus, p, q) {
            return Err(Error::InvalidModulus(format!(
                "{modulus:?} is reducible over Z_{p}"
            )));
        }
        Ok(Self::build(p, modulus))
    }

    /// GF(q) for an odd prime power q, choosing the prime or extension
    /// constructor as appropriate.
    pub fn of_order(q: u64) -> Result<Self> {
        Self::of_order_with_cap(q, DEFAULT_FIELD_CAP)
    }

    pub fn of_order_with_cap(q: u64, cap: u64) -> Result<Self> {
        match prime_power(q) {
            Some((p, 1)) => Self::prime_with_cap(p, cap),
            Some((p, d)) if p != 2 => Self::extension_with_cap(p, d, cap),
            _ => Err(Error::NotOddPrime(q)),
        }
    }

    fn build(p: u32, modulus: Vec<u32>) -> Self {
        let d = (modulus.len() - 1) as u32;
        let q = p.pow(d);
        let tag = fingerprint(p, &modulus);

        // Locate a primitive element and fill exp/log tables.
        let order = q - 1;
        let factors = prime_factors(order);
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; q as usize];
        let generator = (1..q)
            .find(|&g| {
                factors.iter().all(|&r| {
                    poly_pow(&decode(g, p, d), (order / r) as u64, &modulus, p)
                        != decode(1, p, d)
                })
            })
            .expect("the multiplicative group is cyclic");
        let g = decode(generator, p, d);
        let mut acc = decode(1, p, d);
        for k in 0..order {
            let code = encode(&acc, p);
            exp[k as usize] = code;
            log[code as usize] = k;
            acc = poly_mulmod(&acc, &g, &modulus, p);
        }

        let neg: Vec<u32> = (0..q)
            .map(|x| encode(&decode(x, p, d).iter().map(|&c| (p - c) % p).collect::<Vec<_>>(), p))
            .collect();

        let add = (q as u64 <= DEFAULT_FIELD_CAP).then(|| {
            let mut table = Vec::with_capacity((q * q) as usize);
            for x in 0..q {
                for y in 0..q {
                    table.push(add_digits(x, y, p, d));
                }
            }
            table
        });

        let mut inner = Inner {
            p,
            d,
            q,
            modulus,
            tag,
            exp,
            log,
            neg,
            add,
            sqrt: Vec::new(),
        };

        // Exhaustive square-root table: ascending scan keeps the smaller root.
        let mut sqrt = vec![NO_ROOT; q as usize];
        for x in 0..q {
            let sq = mul_codes(&inner, x, x) as usize;
            if sqrt[sq] == NO_ROOT {
                sqrt[sq] = x;
            }
        }
        inner.sqrt = sqrt;

        Self {
            inner: Arc::new(inner),
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.d
    }

    /// The field order q = p^d.
    pub fn order(&self) -> u32 {
        self.inner.q
    }

    /// Modulus coefficients `[c_0, ..., c_d]`.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    /// True when q ≡ 1 (mod 4), i.e. when −1 is a square.
    pub fn minus_one_is_square(&self) -> bool {
        self.inner.q % 4 == 1
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(0)
    }

    pub fn one(&self) -> FieldElement {
        self.wrap(1)
    }

    /// Element with the given canonical code.
    pub fn element(&self, value: u64) -> Result<FieldElement> {
        if value >= self.inner.q as u64 {
            return Err(Error::ElementOutOfRange {
                value,
                q: self.inner.q,
            });
        }
        Ok(self.wrap(value as u32))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        self.wrap(n.rem_euclid(self.inner.p as i64) as u32)
    }

    /// Element with polynomial coefficients `[c_0, ..., c_{d-1}]`.
    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<FieldElement> {
        let p = self.inner.p;
        if coeffs.len() != self.inner.d as usize || coeffs.iter().any(|&c| c >= p) {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients in [0, {p})",
                self.inner.d
            )));
        }
        Ok(self.wrap(encode(coeffs, p)))
    }

    pub fn coefficients(&self, x: FieldElement) -> Vec<u32> {
        decode(x.value, self.inner.p, self.inner.d)
    }

    /// All q elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.inner.q).map(|v| self.wrap(v))
    }

    /// Whether `x` was produced by this field.
    pub fn contains(&self, x: FieldElement) -> bool {
        x.tag == self.inner.tag && x.value < self.inner.q
    }

    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.debug_check(x, y);
        self.wrap(self.add_code(x.value, y.value))
    }

    pub fn neg(&self, x: FieldElement) -> FieldElement {
        self.wrap(self.inner.neg[x.value as usize])
    }

    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.debug_check(x, y);
        self.wrap(mul_codes(&self.inner, x.value, y.value))
    }

    pub fn square(&self, x: FieldElement) -> FieldElement {
        self.mul(x, x)
    }

    pub fn pow(&self, x: FieldElement, mut e: u64) -> FieldElement {
        let mut base = x.value;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_codes(&self.inner, acc, base);
            }
            base = mul_codes(&self.inner, base, base);
            e >>= 1;
        }
        self.wrap(acc)
    }

    /// Multiplicative inverse, computed as x^(q−2).
    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(x, self.inner.q as u64 - 2))
    }

    pub fn div(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// Quadratic character: 0 at 0, 1 on nonzero squares, −1 otherwise.
    pub fn quadratic_character(&self, x: FieldElement) -> i8 {
        if x.is_zero() {
            return 0;
        }
        let r = self.pow(x, (self.inner.q as u64 - 1) / 2);
        if r == self.one() {
            1
        } else if r == self.neg(self.one()) {
            -1
        } else {
            unreachable!("x^((q-1)/2) is always ±1 for x ≠ 0")
        }
    }

    pub fn is_square(&self, x: FieldElement) -> bool {
        self.quadratic_character(x) >= 0
    }

    /// The smaller (in canonical order) square root of `x`, if one exists.
    pub fn sqrt(&self, x: FieldElement) -> Option<FieldElement> {
        match self.inner.sqrt[x.value as usize] {
            NO_ROOT => None,
            r => Some(self.wrap(r)),
        }
    }

    /// JSON form of an element: a bare integer for prime fields, the
    /// coefficient array `[c_0, ..., c_{d-1}]` otherwise.
    pub fn element_json(&self, x: FieldElement) -> serde_json::Value {
        if self.inner.d == 1 {
            serde_json::Value::from(x.value)
        } else {
            serde_json::Value::from(self.coefficients(x))
        }
    }

    pub(crate) fn wrap(&self, value: u32) -> FieldElement {
        FieldElement {
            value,
            tag: self.inner.tag,
        }
    }

    pub(crate) fn add_code(&self, x: u32, y: u32) -> u32 {
        let inner = &*self.inner;
        match &inner.add {
            Some(table) => table[(x * inner.q + y) as usize],
            None => add_digits(x, y, inner.p, inner.d),
        }
    }

    pub(crate) fn mul_code(&self, x: u32, y: u32) -> u32 {
        mul_codes(&self.inner, x, y)
    }

    pub(crate) fn neg_code(&self, x: u32) -> u32 {
        self.inner.neg[x as usize]
    }

    fn debug_check(&self, x: FieldElement, y: FieldElement) {
        debug_assert!(
            x.tag == self.inner.tag && y.tag == self.inner.tag,
            "field element used with a foreign field"
        );
    }
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

fn checked_order(p: u64, d: u32, cap: u64) -> Result<u32> {
    let q = p.checked_pow(d).unwrap_or(u64::MAX);
    if q > cap || q > u32::MAX as u64 {
        return Err(Error::CapExceeded { size: q, cap });
    }
    Ok(q as u32)
}

fn mul_codes(inner: &Inner, x: u32, y: u32) -> u32 {
    if x == 0 || y == 0 {
        return 0;
    }
    let order = inner.q - 1;
    let e = (inner.log[x as usize] + inner.log[y as usize]) % order;
    inner.exp[e as usize]
}

fn fingerprint(p: u32, modulus: &[u32]) -> u64 {
    // FNV-1a over the defining data.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in std::iter::once(p).chain(modulus.iter().copied()) {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn decode(mut value: u32, p: u32, d: u32) -> Vec<u32> {
    (0..d)
        .map(|_| {
            let c = value % p;
            value /= p;
            c
        })
        .collect()
}

fn add_digits(mut x: u32, mut y: u32, p: u32, d: u32) -> u32 {
    let mut out = 0;
    let mut place = 1;
    for _ in 0..d {
        out += ((x % p + y % p) % p) * place;
        x /= p;
        y /= p;
        place *= p;
    }
    out
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            out.push(k);
            while n % k == 0 {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Product of two residues (length d, low to high) reduced modulo a monic
/// `modulus` of degree d.
fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let d = modulus.len() - 1;
    let p64 = p as u64;
    let mut prod = vec![0u64; 2 * d];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    for top in (d..prod.len()).rev() {
        let lead = prod[top];
        if lead == 0 {
            continue;
        }
        prod[top] = 0;
        for (k, &m) in modulus[..d].iter().enumerate() {
            let idx = top - d + k;
            prod[idx] = (prod[idx] + (p64 - lead) * m as u64) % p64;
        }
    }
    prod.truncate(d);
    prod.into_iter().map(|c| c as u32).collect()
}

fn poly_pow(base: &[u32], mut e: u64, modulus: &[u32], p: u32) -> Vec<u32> {
    let d = modulus.len() - 1;
    let mut acc = decode(1, p, d as u32);
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, modulus, p);
        }
        b = poly_mulmod(&b, &b, modulus, p);
        e >>= 1;
    }
    acc
}

/// Remainder of `a` modulo monic `m`; both low to high.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let p64 = p as u64;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    while r.len() > dm {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let off = r.len() - dm;
            for (k, &c) in m[..dm].iter().enumerate() {
                r[off + k] = (r[off + k] + (p64 - lead) * c as u64) % p64;
            }
        }
    }
    r.into_iter().map(|c| c as u32).collect()
}

/// Irreducibility by trial division against every monic polynomial of
/// degree 1..=d/2.
pub(crate) fn is_irreducible(modulus: &[u32], p: u32, q: u32) -> bool {
    let d = (modulus.len() - 1) as u32;
    debug_assert_eq!(p.pow(d), q);
    for k in 1..=d / 2 {
        for low in 0..p.pow(k) {
            let mut g = decode(low, p, k);
            g.push(1);
            if poly_rem(modulus, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// The first monic irreducible polynomial of degree d when candidates are
/// ordered lexicographically by `(c_{d-1}, ..., c_0)`.
fn smallest_irreducible(p: u32, d: u32, q: u32) -> Option<Vec<u32>> {
    (0..q).find_map(|low| {
        let mut m = decode(low, p, d);
        m.push(1);
        is_irreducible(&m, p, q).then_some(m)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> FieldSpec {
        FieldSpec::of_order(q).unwrap()
    }

    #[test]
    fn prime_field_construction() {
        let f = FieldSpec::prime(7).unwrap();
        assert_eq!((f.characteristic(), f.degree(), f.order()), (7, 1, 7));
        assert_eq!(FieldSpec::prime(2), Err(Error::NotOddPrime(2)));
        assert_eq!(FieldSpec::prime(9), Err(Error::NotOddPrime(9)));
        assert_eq!(FieldSpec::prime(1), Err(Error::NotOddPrime(1)));
    }

    #[test]
    fn extension_construction() {
        assert_eq!(FieldSpec::extension(3, 1), Err(Error::DegreeTooSmall(1)));
        assert!(matches!(
            FieldSpec::extension(31, 3),
            Err(Error::CapExceeded { size: 29791, .. })
        ));
        let f9 = FieldSpec::extension(3, 2).unwrap();
        assert_eq!(f9.order(), 9);
        // x^2 + 1: first candidate in (c1, c0) order without a root mod 3.
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        let f25 = FieldSpec::extension(5, 2).unwrap();
        assert_eq!(f25.modulus(), &[2, 0, 1]);
    }

    #[test]
    fn smallest_modulus_has_no_root_and_no_smaller_candidate_does() {
        for (p, d) in [(3u32, 2u32), (5, 2), (7, 2), (11, 2)] {
            let f = FieldSpec::extension(p as u64, d).unwrap();
            let m = f.modulus();
            let eval = |poly: &[u32], x: u32| {
                poly.iter()
                    .rev()
                    .fold(0u64, |acc, &c| (acc * x as u64 + c as u64) % p as u64)
            };
            assert!((0..p).all(|x| eval(m, x) != 0));
            // Every quadratic candidate before it must have a root.
            let code = m[1] * p + m[0];
            for low in 0..code {
                let cand = [low % p, low / p, 1];
                assert!((0..p).any(|x| eval(&cand, x) == 0), "{cand:?}");
            }
        }
    }

    #[test]
    fn user_modulus_is_validated() {
        // x^2 + 1 is reducible mod 5 (2^2 = -1).
        assert!(matches!(
            FieldSpec::with_modulus(5, vec![1, 0, 1], 1024),
            Err(Error::InvalidModulus(_))
        ));
        assert!(matches!(
            FieldSpec::with_modulus(5, vec![2, 0, 2], 1024),
            Err(Error::InvalidModulus(_))
        ));
        let f = FieldSpec::with_modulus(5, vec![3, 0, 1], 1024).unwrap();
        assert_eq!(f.order(), 25);
        assert_ne!(f, FieldSpec::extension(5, 2).unwrap());
    }

    #[test]
    fn small_arithmetic_examples() {
        let f = gf(7);
        let e = |v| f.element(v).unwrap();
        assert_eq!(f.inv(f.one()).unwrap(), f.one());
        assert_eq!(f.mul(e(3), e(5)), e(1));
        assert_eq!(f.inv(e(4)).unwrap(), e(2));
        assert_eq!(f.inv(f.zero()), Err(Error::DivisionByZero));
        assert_eq!(f.sub(e(2), e(5)), e(4));
    }

    #[test]
    fn quadratic_character_examples() {
        let f = gf(7);
        assert_eq!(f.quadratic_character(f.zero()), 0);
        assert_eq!(f.quadratic_character(f.one()), 1);
        assert_eq!(f.quadratic_character(f.element(3).unwrap()), -1);
        let squares: Vec<u32> = (1..7).map(|x| x * x % 7).collect();
        for x in 1..7u32 {
            let expected = if squares.contains(&x) { 1 } else { -1 };
            assert_eq!(f.quadratic_character(f.element(x as u64).unwrap()), expected);
        }
    }

    #[test]
    fn sqrt_examples() {
        let f = gf(7);
        assert_eq!(f.sqrt(f.zero()), Some(f.zero()));
        assert_eq!(f.sqrt(f.element(2).unwrap()), f.element(3).ok());
        assert_eq!(f.sqrt(f.element(3).unwrap()), None);
    }

    #[test]
    fn enumeration_order() {
        let f3 = gf(3);
        let v: Vec<u32> = f3.elements().map(|x| x.value()).collect();
        assert_eq!(v, vec![0, 1, 2]);
        let f9 = gf(9);
        let mut v: Vec<_> = f9.elements().collect();
        assert_eq!(v.len(), 9);
        v.dedup();
        assert_eq!(v.len(), 9);
        let f7 = gf(7);
        assert_eq!(f7.elements().next().unwrap().value(), 0);
        assert_eq!(f7.elements().last().unwrap().value(), 6);
        // Ordering is lexicographic on (c_{d-1}, ..., c_0).
        let coeffs: Vec<Vec<u32>> = f9.elements().map(|x| {
            let mut c = f9.coefficients(x);
            c.reverse();
            c
        }).collect();
        assert!(coeffs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn fermat_and_square_count_exhaustive() {
        for q in [3u64, 5, 7, 9, 11, 13, 25, 27, 49, 81, 121, 125] {
            let f = gf(q);
            let mut squares = 0;
            for x in f.elements().filter(|x| !x.is_zero()) {
                assert_eq!(f.pow(x, q - 1), f.one(), "q={q} x={x}");
                assert_eq!(f.mul(x, f.inv(x).unwrap()), f.one());
                if f.quadratic_character(x) == 1 {
                    squares += 1;
                }
            }
            assert_eq!(squares, (q - 1) / 2, "q={q}");
        }
    }

    #[test]
    fn character_is_multiplicative() {
        for q in [5u64, 7, 9, 13, 27] {
            let f = gf(q);
            for x in f.elements() {
                for y in f.elements() {
                    assert_eq!(
                        f.quadratic_character(f.mul(x, y)),
                        f.quadratic_character(x) * f.quadratic_character(y)
                    );
                }
            }
        }
    }

    #[test]
    fn sqrt_matches_exponent_shortcut_when_q_is_3_mod_4() {
        for q in [3u64, 7, 11, 19, 23, 27, 43, 343] {
            let f = gf(q);
            for x in f.elements() {
                let root = f.sqrt(x);
                if let Some(r) = root {
                    assert_eq!(f.square(r), x);
                }
                if f.quadratic_character(x) >= 0 {
                    let cand = f.pow(x, (q + 1) / 4);
                    assert_eq!(f.square(cand), x);
                    let canonical = cand.min(f.neg(cand));
                    assert_eq!(root, Some(canonical));
                } else {
                    assert_eq!(root, None);
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for q in [9u64, 25] {
            let f = gf(q);
            for x in f.elements() {
                for y in f.elements() {
                    assert_eq!(f.add(x, y), f.add(y, x));
                    assert_eq!(f.mul(x, y), f.mul(y, x));
                    assert_eq!(f.sub(f.add(x, y), y), x);
                    for z in f.elements().step_by(3) {
                        assert_eq!(
                            f.mul(x, f.add(y, z)),
                            f.add(f.mul(x, y), f.mul(x, z))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn prime_power_helpers() {
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(odd_prime_powers(3, 30), vec![3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29]);
        assert_eq!(FieldSpec::of_order(4), Err(Error::NotOddPrime(4)));
    }

    #[test]
    fn json_shapes() {
        let f7 = gf(7);
        assert_eq!(
            serde_json::to_value(&f7).unwrap(),
            serde_json::json!({"p": 7, "d": 1, "modulus": [0, 1]})
        );
        assert_eq!(f7.element_json(f7.element(5).unwrap()), serde_json::json!(5));
        let f9 = gf(9);
        assert_eq!(f9.element_json(f9.element(5).unwrap()), serde_json::json!([2, 1]));
    }
}
