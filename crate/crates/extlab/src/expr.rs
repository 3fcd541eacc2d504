//! The polynomial string grammar used in workspace files.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := integer | name ['^' integer]
//! ```
//!
//! Coefficients are integers and get reduced mod p by the caller. `x` is reserved for the
//! polynomial variable of `A[x]`.

use std::collections::BTreeMap;

use extlab_core::{AlgebraElement, FiniteAlgebra, GaloisField, Poly, PolyElement, PolyRing};

use crate::error::HarnessError;

/// A parsed term `c * v1^a1 * v2^a2 ...` with repeated variables merged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: i64,
    pub powers: BTreeMap<String, u32>,
}

pub const POLY_VAR: &str = "x";

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn error(&self, message: impl Into<String>) -> HarnessError {
        HarnessError::Parse { location: format!("`{}` at offset {}", self.src, self.pos), message: message.into() }
    }

    fn integer(&mut self) -> Result<i64, HarnessError> {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().map_err(|_| self.error("expected an integer"))
    }

    fn name(&mut self) -> Result<String, HarnessError> {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a variable or an integer"));
        }
        Ok(self.src[start..self.pos].to_string())
    }
}

/// Parses an expression into its terms, in source order.
pub fn parse_expr(src: &str) -> Result<Vec<Term>, HarnessError> {
    let mut lx = Lexer { src, pos: 0 };
    let mut terms = Vec::new();
    let mut sign = if lx.eat('-') { -1 } else { 1 };
    loop {
        let mut term = Term { coeff: sign, powers: BTreeMap::new() };
        loop {
            match lx.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let n = lx.integer()?;
                    term.coeff = term.coeff.checked_mul(n).ok_or_else(|| lx.error("coefficient overflow"))?;
                }
                Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                    let v = lx.name()?;
                    let e = if lx.eat('^') {
                        u32::try_from(lx.integer()?).map_err(|_| lx.error("exponent too large"))?
                    } else {
                        1
                    };
                    *term.powers.entry(v).or_insert(0) += e;
                }
                _ => return Err(lx.error("expected a variable or an integer")),
            }
            if !lx.eat('*') {
                break;
            }
        }
        terms.push(term);
        if lx.eat('+') {
            sign = 1;
        } else if lx.eat('-') {
            sign = -1;
        } else if lx.peek().is_none() {
            return Ok(terms);
        } else {
            return Err(lx.error("expected `+`, `-`, `*` or end of input"));
        }
    }
}

fn unknown(name: &str, src: &str) -> HarnessError {
    HarnessError::Validation(format!("unknown variable `{name}` in `{src}`"))
}

/// The algebra element `src`, written in the generators of `alg`.
pub fn parse_element(alg: &FiniteAlgebra, src: &str) -> Result<AlgebraElement, HarnessError> {
    let mut out = alg.zero();
    for term in parse_expr(src)? {
        let mut t = alg.scalar(alg.field().from_int(term.coeff));
        for (name, &e) in &term.powers {
            if name == POLY_VAR {
                return Err(HarnessError::Validation(format!("`{POLY_VAR}` is reserved for A[x] entries, in `{src}`")));
            }
            let g = alg.generator(name).ok_or_else(|| unknown(name, src))?;
            t = alg.mul(&t, &alg.pow(g, e as u64));
        }
        out = alg.add(&out, &t);
    }
    Ok(out)
}

/// An element of `A[x]` as its coordinate polynomials.
pub fn parse_poly_element(alg: &FiniteAlgebra, src: &str) -> Result<PolyElement, HarnessError> {
    let ring = PolyRing::new(alg.field().clone());
    let mut out = vec![Poly::zero(); alg.dim()];
    for mut term in parse_expr(src)? {
        let k = term.powers.remove(POLY_VAR).unwrap_or(0) as usize;
        let mut a = alg.scalar(alg.field().from_int(term.coeff));
        for (name, &e) in &term.powers {
            a = alg.mul(&a, &alg.pow(alg.generator(name).ok_or_else(|| unknown(name, src))?, e as u64));
        }
        for (slot, &c) in out.iter_mut().zip(&a) {
            *slot = ring.add(slot, &ring.monomial(c, k));
        }
    }
    Ok(out)
}

/// The exponent vector of a monomial in `vars`.
pub fn parse_monomial(vars: &[String], src: &str) -> Result<Vec<u32>, HarnessError> {
    let terms = parse_expr(src)?;
    let [term] = terms.as_slice() else {
        return Err(HarnessError::Validation(format!("`{src}` is not a single monomial")));
    };
    if term.coeff != 1 {
        return Err(HarnessError::Validation(format!("monomial `{src}` must have coefficient 1")));
    }
    let mut exps = vec![0; vars.len()];
    for (name, &e) in &term.powers {
        let i = vars.iter().position(|v| v == name).ok_or_else(|| unknown(name, src))?;
        exps[i] = e;
    }
    Ok(exps)
}

/// A polynomial in a single variable (whatever its name) over `field`.
pub fn parse_univariate(field: &GaloisField, src: &str) -> Result<Poly, HarnessError> {
    let ring = PolyRing::new(field.clone());
    let mut var: Option<&String> = None;
    let terms = parse_expr(src)?;
    let mut out = Poly::zero();
    for term in &terms {
        let mut k = 0;
        for (name, &e) in &term.powers {
            if var.is_some_and(|v| v != name) {
                return Err(HarnessError::Validation(format!("`{src}` has more than one variable")));
            }
            var = Some(name);
            k = e as usize;
        }
        out = ring.add(&out, &ring.monomial(field.from_int(term.coeff), k));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn powers(v: &[(&str, u32)]) -> BTreeMap<String, u32> {
        v.iter().map(|(s, e)| (s.to_string(), *e)).collect()
    }

    #[test]
    fn terms_and_signs() {
        let t = parse_expr("3*y^2*z + y*y - 4 ").unwrap();
        assert_eq!(
            t,
            vec![
                Term { coeff: 3, powers: powers(&[("y", 2), ("z", 1)]) },
                Term { coeff: 1, powers: powers(&[("y", 2)]) },
                Term { coeff: -4, powers: powers(&[]) },
            ]
        );
        assert_eq!(parse_expr("-x^3").unwrap()[0].coeff, -1);
        assert_eq!(parse_expr("2*3*y").unwrap()[0].coeff, 6);
    }

    #[test]
    fn errors_carry_offsets() {
        for bad in ["", "y +", "y^", "y ** 2", "y z", "(y)"] {
            match parse_expr(bad) {
                Err(HarnessError::Parse { location, .. }) => assert!(location.contains("offset")),
                other => panic!("{bad:?} parsed to {other:?}"),
            }
        }
    }

    #[test]
    fn evaluation_in_algebras() {
        let f = GaloisField::prime(3).unwrap();
        let vars = vec!["y".to_string(), "z".to_string()];
        let alg = FiniteAlgebra::monomial_quotient(&f, &vars, &[vec![3, 0], vec![0, 2]]).unwrap();
        assert_eq!(parse_monomial(&vars, "y^2*z").unwrap(), vec![2, 1]);
        assert!(matches!(parse_monomial(&vars, "y+z"), Err(HarnessError::Validation(_))));
        assert!(matches!(parse_monomial(&vars, "w"), Err(HarnessError::Validation(_))));
        let a = parse_element(&alg, "4*y*z - y + 3").unwrap();
        let y = alg.generator("y").unwrap();
        let z = alg.generator("z").unwrap();
        let expected = alg.sub(&alg.mul(y, z), y);
        assert_eq!(a, expected);
        assert!(parse_element(&alg, "y^3 + z^2").map(|a| alg.is_zero(&a)).unwrap());
        assert!(matches!(parse_element(&alg, "x*y"), Err(HarnessError::Validation(_))));
        let p = parse_poly_element(&alg, "x^2*y + 2*x + z").unwrap();
        let ring = PolyRing::new(f.clone());
        let at = |label: &str| alg.labels().iter().position(|l| l == label).unwrap();
        assert_eq!(p[0], ring.from_ints(&[0, 2]));
        assert_eq!(p[at("y")], ring.from_ints(&[0, 0, 1]));
        assert_eq!(p[at("z")], ring.one());
        let u = parse_univariate(&f, "u^2 - 1").unwrap();
        assert_eq!(u, ring.from_ints(&[-1, 0, 1]));
        assert!(parse_univariate(&f, "u + v").is_err());
    }
}
