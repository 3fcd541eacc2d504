//! Finite fields `F_{p^e}` with table-driven arithmetic.
//!
//! An element is stored as the integer `c_0 + c_1 p + ... + c_{e-1} p^{e-1}` encoding the
//! residue `c_0 + c_1 t + ... + c_{e-1} t^{e-1}` modulo a fixed irreducible polynomial.
//! This integer also defines the deterministic element order used throughout the crate
//! (smallest-element searches, canonical iteration). The modulus is the smallest monic
//! irreducible polynomial of degree `e` when monic polynomials are ordered by the same
//! integer encoding of their non-leading coefficients.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field order supported by the lookup tables.
pub const MAX_FIELD_ORDER: u32 = 1 << 16;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a raw index. The caller is responsible for `index < q`.
    pub const fn from_index(index: u32) -> Self {
        FieldElement(index)
    }

    pub const fn index(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    // exp has length 2(q-1) so that exp[log a + log b] needs no reduction
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u16>>,
}

/// A finite field `F_{p^e}`. Cheap to clone; equality is by `(p, e)`.
#[derive(Clone)]
pub struct GaloisField(Arc<Tables>);

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.e == other.0.e
    }
}

impl Eq for GaloisField {}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.e == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}", self.0.p, self.0.e)
        }
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p used only while building tables.
fn fp_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = fp_trim(a.to_vec());
    let b = fp_trim(b.to_vec());
    let db = b.len() - 1;
    let inv_lead = pow_mod(b[db], p - 2, p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = (r[r.len() - 1] as u64 * inv_lead as u64 % p as u64) as u32;
        for (i, &bi) in b.iter().enumerate() {
            let t = (c as u64 * bi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        r = fp_trim(r);
    }
    r
}

fn pow_mod(b: u32, mut exp: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = b as u64 % p as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    acc as u32
}

fn is_irreducible_fp(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut cand = digits(idx, p, d);
            cand.push(1);
            if fp_rem(poly, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn digits(mut idx: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(idx % p);
        idx /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    if e == 1 {
        return vec![0, 1];
    }
    let count = p.pow(e);
    for idx in 0..count {
        let mut cand = digits(idx, p, e as usize);
        cand.push(1);
        if cand[0] != 0 && is_irreducible_fp(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl GaloisField {
    pub fn new(p: u32, e: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let q = (p as u64).checked_pow(e.max(1)).unwrap_or(u64::MAX);
        if e == 0 || q > MAX_FIELD_ORDER as u64 {
            return Err(Error::FieldTooLarge { p, e, limit: MAX_FIELD_ORDER });
        }
        let q = q as u32;
        let modulus = smallest_irreducible(p, e);

        let slow_mul = |a: u32, b: u32| -> u32 {
            let da = digits(a, p, e as usize);
            let db = digits(b, p, e as usize);
            let mut prod = vec![0u32; 2 * e as usize];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
                }
            }
            let mut r = fp_rem(&prod, &modulus, p);
            r.resize(e as usize, 0);
            undigits(&r, p)
        };

        let order = q - 1;
        let factors = prime_factors(order);
        let mut generator = 1;
        if q > 2 {
            'search: for cand in 2..q {
                let power = |k: u32| {
                    let mut acc = 1u32;
                    let mut base = cand;
                    let mut k = k;
                    while k > 0 {
                        if k & 1 == 1 {
                            acc = slow_mul(acc, base);
                        }
                        base = slow_mul(base, base);
                        k >>= 1;
                    }
                    acc
                };
                for &r in &factors {
                    if power(order / r) == 1 {
                        continue 'search;
                    }
                }
                generator = cand;
                break;
            }
        }

        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for k in 0..order {
            exp[k as usize] = cur;
            log[cur as usize] = k;
            cur = slow_mul(cur, generator);
        }
        for k in order..2 * order {
            exp[k as usize] = exp[(k - order) as usize];
        }

        let neg: Vec<u32> = (0..q)
            .map(|a| {
                let d: Vec<u32> = digits(a, p, e as usize).into_iter().map(|c| (p - c) % p).collect();
                undigits(&d, p)
            })
            .collect();

        let add = if e > 1 && q <= 1024 {
            let mut table = vec![0u16; (q * q) as usize];
            for a in 0..q {
                let da = digits(a, p, e as usize);
                for b in 0..q {
                    let db = digits(b, p, e as usize);
                    let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    table[(a * q + b) as usize] = undigits(&s, p) as u16;
                }
            }
            Some(table)
        } else {
            None
        };

        Ok(GaloisField(Arc::new(Tables { p, e, q, modulus, exp, log, neg, add })))
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.e
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    /// Coefficients of the defining modulus, constant term first (monic).
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// Element from its index; `None` when out of range.
    pub fn element(&self, index: u32) -> Option<FieldElement> {
        (index < self.0.q).then_some(FieldElement(index))
    }

    /// All elements in the deterministic order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.0.q).map(FieldElement)
    }

    /// The class of `t`; `None` for a prime field.
    pub fn extension_generator(&self) -> Option<FieldElement> {
        (self.0.e > 1).then_some(FieldElement(self.0.p))
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let t = &*self.0;
        if t.e == 1 {
            let s = a.0 + b.0;
            FieldElement(if s >= t.p { s - t.p } else { s })
        } else if let Some(table) = &t.add {
            FieldElement(table[(a.0 * t.q + b.0) as usize] as u32)
        } else {
            let (mut x, mut y) = (a.0, b.0);
            let mut out = 0;
            let mut place = 1;
            for _ in 0..t.e {
                out += ((x % t.p + y % t.p) % t.p) * place;
                x /= t.p;
                y /= t.p;
                place *= t.p;
            }
            FieldElement(out)
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let t = &*self.0;
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        if t.e == 1 {
            FieldElement(((a.0 as u64 * b.0 as u64) % t.p as u64) as u32)
        } else {
            FieldElement(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
        }
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: FieldElement) -> FieldElement {
        assert!(!a.is_zero(), "inverse of zero in {:?}", self);
        let t = &*self.0;
        let l = t.log[a.0 as usize];
        FieldElement(t.exp[((t.q - 1 - l) % (t.q - 1)) as usize])
    }

    pub fn checked_inv(&self, a: FieldElement) -> Option<FieldElement> {
        (!a.is_zero()).then(|| self.inv(a))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: FieldElement, k: u64) -> FieldElement {
        if k == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let t = &*self.0;
        let l = (t.log[a.0 as usize] as u64 * (k % (t.q as u64 - 1))) % (t.q as u64 - 1);
        FieldElement(t.exp[l as usize])
    }

    /// The inverse of the Frobenius `c -> c^p`.
    pub fn pth_root(&self, a: FieldElement) -> FieldElement {
        self.pow(a, (self.0.q / self.0.p) as u64)
    }

    /// Coordinates of `a` over the prime field, constant term first.
    pub fn coordinates(&self, a: FieldElement) -> Vec<u32> {
        digits(a.0, self.0.p, self.0.e as usize)
    }

    /// The embedding of `self` into `larger`, sending the generator to the smallest root
    /// of the modulus in `larger`.
    pub fn embedding_into(&self, larger: &GaloisField) -> Result<FieldEmbedding> {
        if self.0.p != larger.0.p {
            return Err(Error::FieldMismatch(self.0.q, larger.0.q));
        }
        if larger.0.e % self.0.e != 0 {
            return Err(Error::BadDegree { base: self.0.e, target: larger.0.e });
        }
        let modulus: Vec<FieldElement> =
            self.0.modulus.iter().map(|&c| larger.from_int(c as i64)).collect();
        let eval = |x: FieldElement| {
            modulus.iter().rev().fold(FieldElement::ZERO, |acc, &c| larger.add(larger.mul(acc, x), c))
        };
        let beta = larger
            .elements()
            .find(|&x| eval(x).is_zero())
            .expect("a subfield modulus splits in the larger field");
        let mut powers = vec![FieldElement::ONE];
        for _ in 1..self.0.e {
            let last = *powers.last().unwrap();
            powers.push(larger.mul(last, beta));
        }
        let image = self
            .elements()
            .map(|a| {
                self.coordinates(a).iter().zip(&powers).fold(FieldElement::ZERO, |acc, (&c, &bp)| {
                    larger.add(acc, larger.mul(larger.from_int(c as i64), bp))
                })
            })
            .collect();
        Ok(FieldEmbedding { source: self.clone(), target: larger.clone(), image })
    }

    /// Human readable form: integers for prime fields, polynomials in `t` otherwise.
    pub fn format(&self, a: FieldElement) -> String {
        if self.0.e == 1 {
            return a.0.to_string();
        }
        let d = self.coordinates(a);
        let terms: Vec<String> = d
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}*t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}*t^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// A field homomorphism `F_{p^e} -> F_{p^{e'}}`.
#[derive(Clone, Debug)]
pub struct FieldEmbedding {
    source: GaloisField,
    target: GaloisField,
    image: Vec<FieldElement>,
}

impl FieldEmbedding {
    pub fn source(&self) -> &GaloisField {
        &self.source
    }

    pub fn target(&self) -> &GaloisField {
        &self.target
    }

    pub fn apply(&self, a: FieldElement) -> FieldElement {
        self.image[a.0 as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli_are_smallest_irreducibles() {
        assert_eq!(GaloisField::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(GaloisField::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        // t^2 + 1 is irreducible over F_3 and has the smallest encoding
        assert_eq!(GaloisField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(GaloisField::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(GaloisField::new(2, 17), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn every_nonzero_element_is_invertible() {
        for (p, e) in [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 4), (7, 2)] {
            let f = GaloisField::new(p, e).unwrap();
            for a in f.elements().skip(1) {
                assert_eq!(f.mul(a, f.inv(a)), f.one(), "{f:?} {a}");
            }
        }
    }

    #[test]
    fn frobenius_is_additive_without_add_table() {
        // q = 3^7 > 1024 exercises digit-wise addition
        let f = GaloisField::new(3, 7).unwrap();
        for a in f.elements().step_by(97) {
            for b in f.elements().step_by(131) {
                let lhs = f.pow(f.add(a, b), 3);
                let rhs = f.add(f.pow(a, 3), f.pow(b, 3));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let small = GaloisField::new(2, 2).unwrap();
        let big = GaloisField::new(2, 4).unwrap();
        let emb = small.embedding_into(&big).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(emb.apply(small.mul(a, b)), big.mul(emb.apply(a), emb.apply(b)));
                assert_eq!(emb.apply(small.add(a, b)), big.add(emb.apply(a), emb.apply(b)));
            }
        }
        assert!(matches!(
            small.embedding_into(&GaloisField::new(2, 3).unwrap()),
            Err(Error::BadDegree { .. })
        ));
    }
}
