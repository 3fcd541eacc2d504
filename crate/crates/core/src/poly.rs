//! Univariate polynomials over a finite field.

use crate::error::{Error, Result};
use crate::field::{FieldElement, GaloisField};

/// Dense coefficient vector, constant term first, never with a trailing zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly(Vec<FieldElement>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.0.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn lead(&self) -> FieldElement {
        self.0.last().copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == FieldElement::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }
}

/// The ring `k[x]`. All polynomial arithmetic goes through this context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRing {
    field: GaloisField,
}

impl PolyRing {
    pub fn new(field: GaloisField) -> Self {
        PolyRing { field }
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn one(&self) -> Poly {
        Poly(vec![FieldElement::ONE])
    }

    pub fn x(&self) -> Poly {
        Poly(vec![FieldElement::ZERO, FieldElement::ONE])
    }

    pub fn constant(&self, c: FieldElement) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    pub fn monomial(&self, c: FieldElement, k: usize) -> Poly {
        let mut v = vec![FieldElement::ZERO; k + 1];
        v[k] = c;
        Poly::from_coeffs(v)
    }

    /// `x - alpha`
    pub fn linear(&self, alpha: FieldElement) -> Poly {
        Poly(vec![self.field.neg(alpha), FieldElement::ONE])
    }

    /// Polynomial from integer coefficients (constant first) reduced mod `p`.
    pub fn from_ints(&self, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&n| self.field.from_int(n)).collect())
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let f = &self.field;
        let n = a.0.len().max(b.0.len());
        Poly::from_coeffs((0..n).map(|i| f.add(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        let f = &self.field;
        let n = a.0.len().max(b.0.len());
        Poly::from_coeffs((0..n).map(|i| f.sub(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly(a.0.iter().map(|&c| self.field.neg(c)).collect())
    }

    pub fn scale(&self, a: &Poly, c: FieldElement) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(a.0.iter().map(|&x| self.field.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let f = &self.field;
        let mut out = vec![FieldElement::ZERO; a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        Poly::from_coeffs(out)
    }

    /// `a - c * b`
    pub fn sub_mul(&self, a: &Poly, c: &Poly, b: &Poly) -> Poly {
        self.sub(a, &self.mul(c, b))
    }

    pub fn pow(&self, a: &Poly, mut k: u64) -> Poly {
        let mut acc = self.one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Euclidean division. Panics when `b` is zero.
    pub fn div_rem(&self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        assert!(!b.is_zero(), "polynomial division by zero");
        let f = &self.field;
        let db = b.0.len() - 1;
        if a.0.len() <= db {
            return (Poly::zero(), a.clone());
        }
        let inv = f.inv(b.lead());
        let mut r = a.0.clone();
        let mut q = vec![FieldElement::ZERO; a.0.len() - db];
        for shift in (0..q.len()).rev() {
            let c = f.mul(r[shift + db], inv);
            if c.is_zero() {
                continue;
            }
            q[shift] = c;
            for (i, &bi) in b.0.iter().enumerate() {
                r[shift + i] = f.sub(r[shift + i], f.mul(c, bi));
            }
        }
        r.truncate(db);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Poly {
        self.div_rem(a, b).1
    }

    /// `a / b` when `b` divides `a`.
    pub fn exact_div(&self, a: &Poly, b: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(a, b);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, b: &Poly, a: &Poly) -> bool {
        if b.is_zero() {
            return a.is_zero();
        }
        self.rem(a, b).is_zero()
    }

    pub fn monic(&self, a: &Poly) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        self.scale(a, self.field.inv(a.lead()))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// `(g, s, t)` with `g = s a + t b` and `g` monic (or zero).
    pub fn xgcd(&self, a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (self.one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), self.one());
        while !r1.is_zero() {
            let (q, r) = self.div_rem(&r0, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = self.sub_mul(&s0, &q, &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = self.sub_mul(&t0, &q, &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = self.field.inv(r0.lead());
        (self.scale(&r0, inv), self.scale(&s0, inv), self.scale(&t0, inv))
    }

    pub fn lcm(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(a, b);
        self.monic(&self.mul(&self.div_rem(a, &g).0, b))
    }

    pub fn eval(&self, a: &Poly, at: FieldElement) -> FieldElement {
        let f = &self.field;
        a.0.iter().rev().fold(FieldElement::ZERO, |acc, &c| f.add(f.mul(acc, at), c))
    }

    pub fn derivative(&self, a: &Poly) -> Poly {
        let f = &self.field;
        Poly::from_coeffs(
            a.0.iter().enumerate().skip(1).map(|(i, &c)| f.mul(f.from_int(i as i64), c)).collect(),
        )
    }

    /// Every root of `a` in the base field, in element order, by exhaustive evaluation.
    pub fn roots_in_field(&self, a: &Poly) -> Result<Vec<FieldElement>> {
        if a.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.field.elements().filter(|&z| self.eval(a, z).is_zero()).collect())
    }

    /// The monic product of the distinct irreducible factors of `a` (radical).
    pub fn squarefree_part(&self, a: &Poly) -> Result<Poly> {
        if a.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let a = self.monic(a);
        if a.is_constant() {
            return Ok(self.one());
        }
        let d = self.derivative(&a);
        if d.is_zero() {
            // a(x) = b(x^p) = (b^{1/p}(x))^p
            let p = self.field.characteristic() as usize;
            let root: Vec<FieldElement> =
                a.0.iter().step_by(p).map(|&c| self.field.pth_root(c)).collect();
            return self.squarefree_part(&Poly::from_coeffs(root));
        }
        let g = self.gcd(&a, &d);
        let simple = self.div_rem(&a, &g).0;
        let rest = self.squarefree_part(&g)?;
        Ok(self.lcm(&simple, &rest))
    }

    pub fn format(&self, a: &Poly, var: &str) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let f = &self.field;
        let terms: Vec<String> = a
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| {
                let coeff = f.format(c);
                let coeff = if f.degree() > 1 && coeff.contains('+') { format!("({coeff})") } else { coeff };
                match (i, c == FieldElement::ONE) {
                    (0, _) => coeff,
                    (1, true) => var.to_string(),
                    (1, false) => format!("{coeff}*{var}"),
                    (_, true) => format!("{var}^{i}"),
                    (_, false) => format!("{coeff}*{var}^{i}"),
                }
            })
            .collect();
        terms.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u32) -> PolyRing {
        PolyRing::new(GaloisField::prime(p).unwrap())
    }

    fn idx(v: Vec<FieldElement>) -> Vec<u32> {
        v.into_iter().map(|c| c.index()).collect()
    }

    #[test]
    fn roots_in_small_fields() {
        let r5 = ring(5);
        assert_eq!(idx(r5.roots_in_field(&r5.from_ints(&[-1, 0, 1])).unwrap()), vec![1, 4]);
        let r2 = ring(2);
        assert!(r2.roots_in_field(&r2.from_ints(&[1, 1, 1])).unwrap().is_empty());
        let r3 = ring(3);
        assert_eq!(idx(r3.roots_in_field(&r3.from_ints(&[0, -1, 0, 1])).unwrap()), vec![0, 1, 2]);
        assert_eq!(r3.roots_in_field(&Poly::zero()), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn division_and_gcd() {
        let r = ring(5);
        let a = r.from_ints(&[-1, 0, 1]); // (x-1)(x+1)
        let b = r.from_ints(&[-1, 1]);
        let (q, rem) = r.div_rem(&a, &b);
        assert!(rem.is_zero());
        assert_eq!(q, r.from_ints(&[1, 1]));
        assert_eq!(r.gcd(&a, &r.from_ints(&[2, 2])), r.from_ints(&[1, 1]));
        let (g, s, t) = r.xgcd(&a, &r.from_ints(&[3, 1]));
        assert_eq!(g, r.one());
        assert_eq!(r.add(&r.mul(&s, &a), &r.mul(&t, &r.from_ints(&[3, 1]))), g);
    }

    #[test]
    fn squarefree_part_handles_pth_powers() {
        let r = ring(3);
        // (x+1)^3 (x+2)^2 x over F_3
        let x1 = r.from_ints(&[1, 1]);
        let x2 = r.from_ints(&[2, 1]);
        let f = r.mul(&r.mul(&r.pow(&x1, 3), &r.pow(&x2, 2)), &r.x());
        let expected = r.mul(&r.mul(&x1, &x2), &r.x());
        assert_eq!(r.squarefree_part(&f).unwrap(), expected);
        assert_eq!(r.squarefree_part(&r.pow(&x1, 9)).unwrap(), x1);
    }

    #[test]
    fn extension_field_formatting() {
        let r = PolyRing::new(GaloisField::new(2, 2).unwrap());
        let t = r.field().extension_generator().unwrap();
        let p = Poly::from_coeffs(vec![t, FieldElement::ONE]);
        assert_eq!(r.format(&p, "x"), "x+t");
    }
}
