//! Finite-dimensional commutative algebras given by structure constants.
//!
//! Elements are dense coordinate vectors on the distinguished basis. Every constructor
//! validates commutativity, associativity and the unit on all basis pairs and triples.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::field::{FieldElement, GaloisField};
use crate::matrix::Matrix;
use crate::module::FiniteModule;
use crate::poly::{Poly, PolyRing};
use crate::sparse::{Echelon, SparseVec};

pub type AlgebraElement = Vec<FieldElement>;

/// Data attached to a local algebra `(A, m, k)`.
#[derive(Clone, Debug)]
pub struct LocalData {
    /// Basis of the maximal ideal (equal to the nilradical).
    pub max_ideal: Vec<AlgebraElement>,
    /// `[A/m : base field]`
    pub residue_degree: usize,
    /// Least `s` with `m^s = 0`.
    pub nilpotency_index: usize,
    max_ideal_echelon: Echelon,
}

impl LocalData {
    pub fn contains(&self, a: &[FieldElement]) -> bool {
        self.max_ideal_echelon.contains(&SparseVec::from_dense(a))
    }
}

/// A subspace of the algebra closed under multiplication by the algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealSubspace {
    pub basis: Vec<AlgebraElement>,
}

impl IdealSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// One local factor `eA` of a decomposition `A = e_1 A x ... x e_r A`.
#[derive(Clone, Debug)]
pub struct LocalFactor {
    pub algebra: Arc<FiniteAlgebra>,
    pub idempotent: AlgebraElement,
    /// Images in `A` of the factor's basis vectors.
    pub basis_in_parent: Vec<AlgebraElement>,
}

pub struct FiniteAlgebra {
    field: GaloisField,
    dim: usize,
    labels: Vec<String>,
    // products[i * dim + j] = b_i * b_j
    products: Vec<SparseVec>,
    unit: AlgebraElement,
    generators: Vec<(String, AlgebraElement)>,
    socle_witness: Option<AlgebraElement>,
    local: OnceLock<Option<LocalData>>,
}

impl Clone for FiniteAlgebra {
    fn clone(&self) -> Self {
        FiniteAlgebra {
            field: self.field.clone(),
            dim: self.dim,
            labels: self.labels.clone(),
            products: self.products.clone(),
            unit: self.unit.clone(),
            generators: self.generators.clone(),
            socle_witness: self.socle_witness.clone(),
            local: OnceLock::new(),
        }
    }
}

impl PartialEq for FiniteAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.dim == other.dim && self.products == other.products && self.unit == other.unit
    }
}

impl fmt::Debug for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteAlgebra({:?}, dim {}, basis [{}])", self.field, self.dim, self.labels.join(", "))
    }
}

/// Reduced echelon basis of a subspace of `F^n`, with coordinates read at pivot positions.
struct SubspaceBasis {
    rows: Vec<AlgebraElement>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    fn from_spanning(field: &GaloisField, n: usize, vectors: &[AlgebraElement]) -> Self {
        if vectors.is_empty() {
            return SubspaceBasis { rows: Vec::new(), pivots: Vec::new() };
        }
        let (r, pivots) = Matrix::from_rows(vectors.to_vec()).rref(field);
        let rows = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        debug_assert!(vectors.iter().all(|v| v.len() == n));
        SubspaceBasis { rows, pivots }
    }

    fn coords(&self, v: &[FieldElement]) -> AlgebraElement {
        self.pivots.iter().map(|&p| v[p]).collect()
    }
}

impl FiniteAlgebra {
    /// Validates and builds an algebra from `constants[(i * d + j) * d + k] = c_{ijk}`.
    pub fn build(
        field: GaloisField,
        labels: Vec<String>,
        constants: &[FieldElement],
        unit: AlgebraElement,
    ) -> Result<Self> {
        let d = labels.len();
        if d == 0 || constants.len() != d * d * d || unit.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "dimension {d} needs {} structure constants and a unit of length {d}",
                d * d * d
            )));
        }
        let products = (0..d * d).map(|ij| SparseVec::from_dense(&constants[ij * d..(ij + 1) * d])).collect();
        Self::from_products(field, labels, products, unit, Vec::new())
    }

    fn from_products(
        field: GaloisField,
        labels: Vec<String>,
        products: Vec<SparseVec>,
        unit: AlgebraElement,
        generators: Vec<(String, AlgebraElement)>,
    ) -> Result<Self> {
        let a = FiniteAlgebra {
            field,
            dim: labels.len(),
            labels,
            products,
            unit,
            generators,
            socle_witness: None,
            local: OnceLock::new(),
        };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim;
        for i in 0..d {
            for j in i + 1..d {
                if self.products[i * d + j] != self.products[j * d + i] {
                    return Err(Error::NotCommutative(i, j));
                }
            }
        }
        for j in 0..d {
            if self.mul(&self.unit, &self.basis_vector(j)) != self.basis_vector(j) {
                return Err(Error::BadUnit(j));
            }
        }
        for i in 0..d {
            for j in i..d {
                let ij = self.products[i * d + j].to_dense(d);
                for k in 0..d {
                    let left = self.mul(&ij, &self.basis_vector(k));
                    let jk = self.products[j * d + k].to_dense(d);
                    let right = self.mul(&self.basis_vector(i), &jk);
                    if left != right {
                        return Err(Error::NotAssociative(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> &AlgebraElement {
        &self.unit
    }

    /// Named elements used when parsing element strings (variables of the presentation).
    pub fn generators(&self) -> &[(String, AlgebraElement)] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<&AlgebraElement> {
        self.generators.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn with_generators(mut self, generators: Vec<(String, AlgebraElement)>) -> Self {
        self.generators = generators;
        self
    }

    /// The element `x = (0, 1)` recorded by [`FiniteAlgebra::residue_trivial_extension`].
    pub fn socle_witness(&self) -> Option<&AlgebraElement> {
        self.socle_witness.as_ref()
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> FieldElement {
        self.products[i * self.dim + j].get(k as u32)
    }

    /// `b_i * b_j` as a sparse vector.
    pub fn basis_product(&self, i: usize, j: usize) -> &SparseVec {
        &self.products[i * self.dim + j]
    }

    pub fn zero(&self) -> AlgebraElement {
        vec![FieldElement::ZERO; self.dim]
    }

    pub fn basis_vector(&self, i: usize) -> AlgebraElement {
        let mut v = self.zero();
        v[i] = FieldElement::ONE;
        v
    }

    pub fn scalar(&self, c: FieldElement) -> AlgebraElement {
        self.unit.iter().map(|&u| self.field.mul(u, c)).collect()
    }

    pub fn add(&self, a: &[FieldElement], b: &[FieldElement]) -> AlgebraElement {
        a.iter().zip(b).map(|(&x, &y)| self.field.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[FieldElement], b: &[FieldElement]) -> AlgebraElement {
        a.iter().zip(b).map(|(&x, &y)| self.field.sub(x, y)).collect()
    }

    pub fn scale(&self, a: &[FieldElement], c: FieldElement) -> AlgebraElement {
        a.iter().map(|&x| self.field.mul(x, c)).collect()
    }

    pub fn is_zero(&self, a: &[FieldElement]) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    pub fn mul(&self, a: &[FieldElement], b: &[FieldElement]) -> AlgebraElement {
        let f = &self.field;
        let d = self.dim;
        let mut out = self.zero();
        for (i, &ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let c = f.mul(ai, bj);
                for &(k, v) in self.products[i * d + j].entries() {
                    out[k as usize] = f.add(out[k as usize], f.mul(c, v));
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &[FieldElement], mut k: u64) -> AlgebraElement {
        let mut acc = self.unit.clone();
        let mut base = a.to_vec();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Matrix of `v -> a v` on the basis (column `j` is `a b_j`).
    pub fn multiplication_matrix(&self, a: &[FieldElement]) -> Matrix {
        let cols: Vec<AlgebraElement> = (0..self.dim).map(|j| self.mul(a, &self.basis_vector(j))).collect();
        Matrix::from_columns(self.dim, &cols)
    }

    pub fn format_element(&self, a: &[FieldElement]) -> String {
        let f = &self.field;
        let terms: Vec<String> = a
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| {
                let label = &self.labels[i];
                if c == FieldElement::ONE {
                    label.clone()
                } else {
                    format!("{}*{}", f.format(c), label)
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    /// `F[vars] / (monomials)`; every variable needs a pure power among the generators.
    /// Generators are exponent vectors aligned with `vars`.
    pub fn monomial_quotient(field: &GaloisField, vars: &[String], ideal: &[Vec<u32>]) -> Result<Self> {
        let n = vars.len();
        if ideal.iter().any(|g| g.len() != n) {
            return Err(Error::DimensionMismatch("exponent vector length differs from variable count".into()));
        }
        let divides = |g: &[u32], m: &[u32]| g.iter().zip(m).all(|(a, b)| a <= b);
        let mut bounds = Vec::with_capacity(n);
        for (v, name) in vars.iter().enumerate() {
            let pure = ideal
                .iter()
                .filter(|g| g.iter().enumerate().all(|(i, &e)| (i == v) == (e > 0)))
                .map(|g| g[v])
                .min();
            match pure {
                Some(b) => bounds.push(b),
                None => return Err(Error::InfiniteDimensional(name.clone())),
            }
        }
        let mut monomials: Vec<Vec<u32>> = vec![Vec::new()];
        for &b in &bounds {
            monomials = monomials
                .into_iter()
                .flat_map(|m| {
                    (0..b).map(move |e| {
                        let mut m = m.clone();
                        m.push(e);
                        m
                    })
                })
                .collect();
        }
        monomials.retain(|m| !ideal.iter().any(|g| divides(g, m)));
        if monomials.is_empty() {
            return Err(Error::UnitIdeal);
        }
        // graded, then larger exponent of earlier variables first
        monomials.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let index_of = |m: &[u32]| monomials.iter().position(|x| x == m);
        let d = monomials.len();
        let mut products = Vec::with_capacity(d * d);
        for a in &monomials {
            for b in &monomials {
                let prod: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push(match index_of(&prod) {
                    Some(k) => SparseVec::unit(k),
                    None => SparseVec::new(),
                });
            }
        }
        let labels = monomials.iter().map(|m| monomial_label(vars, m)).collect();
        let mut unit = vec![FieldElement::ZERO; d];
        unit[0] = FieldElement::ONE;
        let generators = vars
            .iter()
            .enumerate()
            .map(|(v, name)| {
                let mut m = vec![0; n];
                m[v] = 1;
                let mut vec = vec![FieldElement::ZERO; d];
                if let Some(k) = index_of(&m) {
                    vec[k] = FieldElement::ONE;
                }
                (name.clone(), vec)
            })
            .collect();
        Self::from_products(field.clone(), labels, products, unit, generators)
    }

    /// `A / (elements)`. The quotient keeps the original labels of the surviving basis vectors.
    pub fn quotient_by_elements(&self, elements: &[AlgebraElement]) -> Result<Self> {
        let ideal = self.ideal_generated_by(elements);
        let mut ech = Echelon::new(&self.field, self.dim);
        for v in &ideal.basis {
            ech.insert(SparseVec::from_dense(v));
        }
        if ech.rank() == self.dim {
            return Err(Error::UnitIdeal);
        }
        let keep = ech.complement();
        let mut position = vec![usize::MAX; self.dim];
        for (t, &i) in keep.iter().enumerate() {
            position[i] = t;
        }
        let project = |v: &SparseVec| -> AlgebraElement {
            let r = ech.reduce_full(v);
            let mut out = vec![FieldElement::ZERO; keep.len()];
            for &(i, c) in r.entries() {
                out[position[i as usize]] = c;
            }
            out
        };
        let mut products = Vec::with_capacity(keep.len() * keep.len());
        for &i in &keep {
            for &j in &keep {
                products.push(SparseVec::from_dense(&project(self.basis_product(i, j))));
            }
        }
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let unit = project(&SparseVec::from_dense(&self.unit));
        let generators =
            self.generators.iter().map(|(n, g)| (n.clone(), project(&SparseVec::from_dense(g)))).collect();
        Self::from_products(self.field.clone(), labels, products, unit, generators)
    }

    /// The ideal `A e_1 + ... + A e_r`.
    pub fn ideal_generated_by(&self, elements: &[AlgebraElement]) -> IdealSubspace {
        let mut ech = Echelon::new(&self.field, self.dim);
        let mut basis = Vec::new();
        for e in elements {
            for i in 0..self.dim {
                let v = self.mul(&self.basis_vector(i), e);
                if ech.insert(SparseVec::from_dense(&v)) {
                    basis.push(v);
                }
            }
        }
        IdealSubspace { basis }
    }

    /// `A[u]/(f(u))` for a monic `f` over the base field, basis `b_i u^j` (i major).
    pub fn extend_by_polynomial(&self, f: &Poly) -> Result<Self> {
        let n = match f.degree() {
            Some(n) if n >= 1 && f.is_monic() => n,
            _ => return Err(Error::NonMonic),
        };
        let ring = PolyRing::new(self.field.clone());
        let fld = &self.field;
        let powers: Vec<Poly> = (0..2 * n - 1).map(|s| ring.rem(&ring.monomial(FieldElement::ONE, s), f)).collect();
        let d = self.dim;
        let dn = d * n;
        let mut products = Vec::with_capacity(dn * dn);
        for i in 0..d {
            for j in 0..n {
                for k in 0..d {
                    for l in 0..n {
                        let mut entries = Vec::new();
                        for &(m, c) in self.basis_product(i, k).entries() {
                            for (s, &pc) in powers[j + l].coeffs().iter().enumerate() {
                                if !pc.is_zero() {
                                    entries.push((m * n as u32 + s as u32, fld.mul(c, pc)));
                                }
                            }
                        }
                        products.push(SparseVec::from_entries(entries, fld));
                    }
                }
            }
        }
        let mut labels = Vec::with_capacity(dn);
        for i in 0..d {
            for j in 0..n {
                labels.push(match j {
                    0 => self.labels[i].clone(),
                    1 => format!("{}·u", self.labels[i]),
                    _ => format!("{}·u^{j}", self.labels[i]),
                });
            }
        }
        let lift = |a: &[FieldElement]| -> AlgebraElement {
            let mut v = vec![FieldElement::ZERO; dn];
            for (i, &c) in a.iter().enumerate() {
                v[i * n] = c;
            }
            v
        };
        let unit = lift(&self.unit);
        let mut generators: Vec<(String, AlgebraElement)> =
            self.generators.iter().map(|(name, g)| (name.clone(), lift(g))).collect();
        let x_mod_f = ring.rem(&ring.x(), f);
        let mut u = vec![FieldElement::ZERO; dn];
        for (i, &c) in self.unit.iter().enumerate() {
            for (s, &xc) in x_mod_f.coeffs().iter().enumerate() {
                u[i * n + s] = fld.add(u[i * n + s], fld.mul(c, xc));
            }
        }
        generators.push(("u".into(), u));
        Self::from_products(self.field.clone(), labels, products, unit, generators)
    }

    /// `A(M) = A ⊕ M` with `(a, m)(a', m') = (aa', am' + a'm)`. Requires `A` local.
    pub fn trivial_extension(&self, module: &FiniteModule) -> Result<Self> {
        if !self.is_local() {
            return Err(Error::NotLocal);
        }
        if module.algebra().as_ref() != self {
            return Err(Error::InvalidModule("module is over a different algebra".into()));
        }
        let d = self.dim;
        let n = module.dim();
        let total = d + n;
        let mut products = vec![SparseVec::new(); total * total];
        for i in 0..d {
            for k in 0..d {
                products[i * total + k] = self.basis_product(i, k).clone();
            }
            let action = module.action(i);
            for j in 0..n {
                let col = SparseVec::from_dense(&action.column(j)).shifted(d as u32);
                products[i * total + d + j] = col.clone();
                products[(d + j) * total + i] = col;
            }
        }
        let mut labels: Vec<String> = self.labels.iter().map(|l| format!("({l};0)")).collect();
        labels.extend((0..n).map(|j| format!("(0;m{})", j + 1)));
        let lift = |a: &[FieldElement]| -> AlgebraElement {
            let mut v = a.to_vec();
            v.resize(total, FieldElement::ZERO);
            v
        };
        let unit = lift(&self.unit);
        let mut generators: Vec<(String, AlgebraElement)> =
            self.generators.iter().map(|(name, g)| (name.clone(), lift(g))).collect();
        for j in 0..n {
            let mut v = vec![FieldElement::ZERO; total];
            v[d + j] = FieldElement::ONE;
            generators.push((format!("e{}", j + 1), v));
        }
        Self::from_products(self.field.clone(), labels, products, unit, generators)
    }

    /// `A(k)` for the residue field `k`, recording `x = (0, 1)` as the socle witness and
    /// exposing it as the generator `e`.
    pub fn residue_trivial_extension(self: &Arc<Self>) -> Result<Self> {
        let k = crate::module::residue_module(self)?;
        let one = k.residue_of_unit();
        let mut ext = self.trivial_extension(&k)?;
        let mut x = ext.zero();
        for (j, c) in one.iter().enumerate() {
            x[self.dim + j] = *c;
        }
        ext.generators.retain(|(n, _)| !(n.starts_with('e') && n[1..].chars().all(|c| c.is_ascii_digit())));
        ext.generators.push(("e".into(), x.clone()));
        ext.socle_witness = Some(x);
        Ok(ext)
    }

    /// `A1 × A2` with unit `(1, 1)`.
    pub fn product(a1: &FiniteAlgebra, a2: &FiniteAlgebra) -> Result<Self> {
        if a1.field != a2.field {
            return Err(Error::FieldMismatch(a1.field.order(), a2.field.order()));
        }
        let (d1, d2) = (a1.dim, a2.dim);
        let total = d1 + d2;
        let mut products = vec![SparseVec::new(); total * total];
        for i in 0..d1 {
            for j in 0..d1 {
                products[i * total + j] = a1.basis_product(i, j).clone();
            }
        }
        for i in 0..d2 {
            for j in 0..d2 {
                products[(d1 + i) * total + d1 + j] = a2.basis_product(i, j).shifted(d1 as u32);
            }
        }
        let mut labels: Vec<String> = a1.labels.iter().map(|l| format!("({l};0)")).collect();
        labels.extend(a2.labels.iter().map(|l| format!("(0;{l})")));
        let left = |a: &[FieldElement]| {
            let mut v = a.to_vec();
            v.resize(total, FieldElement::ZERO);
            v
        };
        let right = |a: &[FieldElement]| {
            let mut v = vec![FieldElement::ZERO; d1];
            v.extend_from_slice(a);
            v
        };
        let mut unit = left(&a1.unit);
        unit[d1..].copy_from_slice(&a2.unit);
        let mut generators = vec![("i_1".to_string(), left(&a1.unit)), ("i_2".to_string(), right(&a2.unit))];
        generators.extend(a1.generators.iter().map(|(n, g)| (format!("{n}_1"), left(g))));
        generators.extend(a2.generators.iter().map(|(n, g)| (format!("{n}_2"), right(g))));
        Self::from_products(a1.field.clone(), labels, products, unit, generators)
    }

    /// The same structure constants over `F_{p^target}`; `target` must be a multiple of `e`.
    pub fn base_change(&self, target: u32) -> Result<Self> {
        let e = self.field.degree();
        if target == 0 || target % e != 0 {
            return Err(Error::BadDegree { base: e, target });
        }
        let big = GaloisField::new(self.field.characteristic(), target)?;
        let emb = self.field.embedding_into(&big)?;
        let map = |v: &SparseVec| {
            SparseVec::from_entries(v.entries().iter().map(|&(i, c)| (i, emb.apply(c))).collect(), &big)
        };
        let products = self.products.iter().map(map).collect();
        let unit = self.unit.iter().map(|&c| emb.apply(c)).collect();
        let generators = self
            .generators
            .iter()
            .map(|(n, g)| (n.clone(), g.iter().map(|&c| emb.apply(c)).collect()))
            .collect();
        let mut out = Self::from_products(big, self.labels.clone(), products, unit, generators)?;
        out.socle_witness = self.socle_witness.as_ref().map(|w| w.iter().map(|&c| emb.apply(c)).collect());
        Ok(out)
    }

    /// Matrix of `a -> a^q` (linear over the base field `F_q`).
    fn frobenius_matrix(&self) -> Matrix {
        let q = self.field.order() as u64;
        let cols: Vec<AlgebraElement> = (0..self.dim).map(|i| self.pow(&self.basis_vector(i), q)).collect();
        Matrix::from_columns(self.dim, &cols)
    }

    /// The nilradical, as the kernel of a high enough power of the `q`-Frobenius.
    pub fn nilradical(&self) -> IdealSubspace {
        let f = &self.field;
        let q = f.order() as u128;
        let frob = self.frobenius_matrix();
        let mut power = frob.clone();
        let mut reach = q;
        while reach < self.dim as u128 {
            power = frob.mul(&power, f);
            reach *= q;
        }
        IdealSubspace { basis: power.kernel_image(f).kernel }
    }

    /// Number of local factors: `dim {a : a^q - a in nil(A)} - dim nil(A)`.
    fn count_local_factors(&self, nil: &IdealSubspace) -> (usize, Vec<AlgebraElement>) {
        let f = &self.field;
        let mut nil_ech = Echelon::new(f, self.dim);
        for v in &nil.basis {
            nil_ech.insert(SparseVec::from_dense(v));
        }
        let frob = self.frobenius_matrix();
        let cols: Vec<AlgebraElement> = (0..self.dim)
            .map(|j| {
                let mut c = frob.column(j);
                c[j] = f.sub(c[j], FieldElement::ONE);
                nil_ech.reduce_full(&SparseVec::from_dense(&c)).to_dense(self.dim)
            })
            .collect();
        let fixed = Matrix::from_columns(self.dim, &cols).kernel_image(f).kernel;
        (fixed.len() - nil.dim(), fixed)
    }

    pub fn local_data(&self) -> Option<&LocalData> {
        self.local
            .get_or_init(|| {
                let nil = self.nilradical();
                let (factors, _) = self.count_local_factors(&nil);
                (factors == 1).then(|| self.compute_local_data(nil))
            })
            .as_ref()
    }

    fn compute_local_data(&self, nil: IdealSubspace) -> LocalData {
        let f = &self.field;
        let mut ech = Echelon::new(f, self.dim);
        for v in &nil.basis {
            ech.insert(SparseVec::from_dense(v));
        }
        let mut power = nil.basis.clone();
        let mut s = 1;
        while !power.is_empty() {
            let mut next = Echelon::new(f, self.dim);
            let mut basis = Vec::new();
            for m in &nil.basis {
                for v in &power {
                    let prod = self.mul(m, v);
                    if next.insert(SparseVec::from_dense(&prod)) {
                        basis.push(prod);
                    }
                }
            }
            power = basis;
            s += 1;
        }
        LocalData {
            residue_degree: self.dim - nil.dim(),
            max_ideal: nil.basis,
            nilpotency_index: s,
            max_ideal_echelon: ech,
        }
    }

    pub fn is_local(&self) -> bool {
        self.local_data().is_some()
    }

    fn require_local(&self) -> Result<&LocalData> {
        self.local_data().ok_or(Error::NotLocal)
    }

    pub fn residue_degree(&self) -> Result<usize> {
        Ok(self.require_local()?.residue_degree)
    }

    /// `(0 :_A a)`
    pub fn annihilator(&self, a: &[FieldElement]) -> IdealSubspace {
        IdealSubspace { basis: self.multiplication_matrix(a).kernel_image(&self.field).kernel }
    }

    /// `(0 : m)` for a local algebra.
    pub fn socle(&self) -> Result<IdealSubspace> {
        let local = self.require_local()?;
        if local.max_ideal.is_empty() {
            return Ok(IdealSubspace { basis: (0..self.dim).map(|i| self.basis_vector(i)).collect() });
        }
        let mut rows = Vec::new();
        for g in &local.max_ideal {
            let m = self.multiplication_matrix(g);
            rows.extend((0..self.dim).map(|i| m.row(i).to_vec()));
        }
        Ok(IdealSubspace { basis: Matrix::from_rows(rows).kernel_image(&self.field).kernel })
    }

    /// Socle of dimension one over the residue field.
    pub fn is_gorenstein(&self) -> Result<bool> {
        let f = self.residue_degree()?;
        Ok(self.socle()?.dim() == f)
    }

    /// Decomposition into local factors with pairwise orthogonal idempotents summing to 1.
    pub fn local_decompose(&self) -> Vec<LocalFactor> {
        let identity: Vec<AlgebraElement> = (0..self.dim).map(|i| self.basis_vector(i)).collect();
        let me = Arc::new(self.clone());
        let mut out = Vec::new();
        me.split_into(self.unit.clone(), identity, &mut out);
        out
    }

    fn split_into(self: &Arc<Self>, idempotent: AlgebraElement, basis_in_parent: Vec<AlgebraElement>, out: &mut Vec<LocalFactor>) {
        let f = &self.field;
        let nil = self.nilradical();
        let (count, fixed) = self.count_local_factors(&nil);
        if count <= 1 {
            out.push(LocalFactor { algebra: Arc::clone(self), idempotent, basis_in_parent });
            return;
        }
        let mut trivial = Echelon::new(f, self.dim);
        for v in nil.basis.iter().chain(std::iter::once(&self.unit)) {
            trivial.insert(SparseVec::from_dense(v));
        }
        let splitter = fixed
            .iter()
            .find(|v| !trivial.contains(&SparseVec::from_dense(v)))
            .expect("more than one factor implies a non-scalar fixed element")
            .clone();
        let lmul = self.multiplication_matrix(&splitter);
        let eigen = f
            .elements()
            .find(|&c| {
                let shifted = lmul.add(&Matrix::identity(self.dim).scale(f.neg(c), f), f);
                shifted.rank(f) < self.dim
            })
            .expect("residue images of a fixed element lie in the base field");
        let shifted = self.sub(&splitter, &self.scalar(eigen));
        let q = f.order() as u64;
        let mut eps = self.pow(&shifted, q - 1);
        let mut reach = 1u64;
        while reach < self.dim as u64 {
            eps = self.pow(&eps, q);
            reach = reach.saturating_mul(q);
        }
        let comp = self.sub(&self.unit, &eps);
        for e in [comp, eps] {
            let (sub, basis) = self.corner_algebra(&e);
            let sub = Arc::new(sub);
            let to_parent = |v: &[FieldElement]| -> AlgebraElement {
                let mut acc = vec![FieldElement::ZERO; basis_in_parent[0].len()];
                for (t, &c) in v.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for (i, &m) in basis[t].iter().enumerate() {
                        if m.is_zero() {
                            continue;
                        }
                        for (k, &pv) in basis_in_parent[i].iter().enumerate() {
                            acc[k] = f.add(acc[k], f.mul(f.mul(c, m), pv));
                        }
                    }
                }
                acc
            };
            let sub_basis_in_parent: Vec<AlgebraElement> =
                (0..sub.dim).map(|t| to_parent(&sub.basis_vector(t))).collect();
            let parent_idem = to_parent(&sub.unit);
            sub.split_into(parent_idem, sub_basis_in_parent, out);
        }
    }

    /// The algebra `eA` for an idempotent `e`, and its basis expressed in `A`.
    fn corner_algebra(&self, e: &[FieldElement]) -> (FiniteAlgebra, Vec<AlgebraElement>) {
        let f = &self.field;
        let spanning: Vec<AlgebraElement> = (0..self.dim).map(|j| self.mul(e, &self.basis_vector(j))).collect();
        let sb = SubspaceBasis::from_spanning(f, self.dim, &spanning);
        let m = sb.rows.len();
        let mut products = Vec::with_capacity(m * m);
        for a in &sb.rows {
            for b in &sb.rows {
                products.push(SparseVec::from_dense(&sb.coords(&self.mul(a, b))));
            }
        }
        let labels = sb.rows.iter().map(|v| self.format_element(v)).collect();
        let unit = sb.coords(e);
        let generators =
            self.generators.iter().map(|(n, g)| (n.clone(), sb.coords(&self.mul(e, g)))).collect();
        let alg = Self::from_products(f.clone(), labels, products, unit, generators)
            .expect("a corner eAe of a commutative algebra is an algebra");
        (alg, sb.rows)
    }
}

fn monomial_label(vars: &[String], m: &[u32]) -> String {
    let parts: Vec<String> = vars
        .iter()
        .zip(m)
        .filter(|(_, &e)| e > 0)
        .map(|(v, &e)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn f(p: u32) -> GaloisField {
        GaloisField::prime(p).unwrap()
    }

    pub(crate) fn dual_numbers(p: u32) -> FiniteAlgebra {
        FiniteAlgebra::monomial_quotient(&f(p), &vars(&["y"]), &[vec![2]]).unwrap()
    }

    #[test]
    fn field_as_algebra() {
        let k = FiniteAlgebra::build(f(2), vec!["1".into()], &[FieldElement::ONE], vec![FieldElement::ONE]).unwrap();
        assert_eq!(k.dim(), 1);
        assert!(k.is_local());
        assert_eq!(k.local_data().unwrap().nilpotency_index, 1);
    }

    #[test]
    fn idempotent_structure_is_valid() {
        // basis {1, y}, y^2 = y
        let o = FieldElement::ONE;
        let z = FieldElement::ZERO;
        let c = vec![o, z, z, o, z, o, z, o];
        let a = FiniteAlgebra::build(f(2), vars(&["1", "y"]), &c, vec![o, z]).unwrap();
        assert!(!a.is_local());
        assert_eq!(a.local_decompose().len(), 2);
    }

    #[test]
    fn construction_errors_name_the_violation() {
        let o = FieldElement::ONE;
        let z = FieldElement::ZERO;
        // y*1 = 0 but 1*y = y
        let c = vec![o, z, z, o, z, z, z, z];
        let err = FiniteAlgebra::build(f(2), vars(&["1", "y"]), &c, vec![o, z]).unwrap_err();
        assert_eq!(err, Error::NotCommutative(0, 1));
        let c = vec![o, z, z, o, z, o, z, z];
        assert_eq!(FiniteAlgebra::build(f(2), vars(&["1", "y"]), &c, vec![z, o]).unwrap_err(), Error::BadUnit(0));
    }

    #[test]
    fn monomial_quotients() {
        assert_eq!(dual_numbers(2).dim(), 2);
        let a = FiniteAlgebra::monomial_quotient(&f(3), &vars(&["y", "z"]), &[vec![2, 0], vec![1, 1], vec![0, 2]])
            .unwrap();
        assert_eq!(a.labels(), &["1", "y", "z"]);
        let err = FiniteAlgebra::monomial_quotient(&f(2), &vars(&["y", "z"]), &[vec![2, 0]]).unwrap_err();
        assert_eq!(err, Error::InfiniteDimensional("z".into()));
    }

    #[test]
    fn quotients_by_elements() {
        let a = FiniteAlgebra::monomial_quotient(&f(2), &vars(&["y", "z"]), &[vec![2, 0], vec![0, 2]]).unwrap();
        let yz = a.mul(a.generator("y").unwrap(), a.generator("z").unwrap());
        assert_eq!(a.quotient_by_elements(&[yz]).unwrap().dim(), 3);
        assert_eq!(a.quotient_by_elements(&[a.zero()]).unwrap().dim(), 4);
        assert_eq!(a.quotient_by_elements(&[a.unit().clone()]).unwrap_err(), Error::UnitIdeal);
    }

    #[test]
    fn extensions_by_polynomials() {
        let r2 = PolyRing::new(f(2));
        let f4 = FiniteAlgebra::monomial_quotient(&f(2), &[], &[]).unwrap().extend_by_polynomial(&r2.from_ints(&[1, 1, 1])).unwrap();
        assert_eq!(f4.dim(), 2);
        assert!(f4.is_local());
        assert!(f4.local_data().unwrap().max_ideal.is_empty());

        let e = dual_numbers(2).extend_by_polynomial(&r2.from_ints(&[1, 1, 1])).unwrap();
        assert_eq!(e.dim(), 4);
        assert_eq!(e.residue_degree().unwrap(), 2);

        let r5 = PolyRing::new(f(5));
        let split = FiniteAlgebra::monomial_quotient(&f(5), &[], &[]).unwrap().extend_by_polynomial(&r5.from_ints(&[-1, 0, 1])).unwrap();
        assert!(!split.is_local());
        assert_eq!(split.local_decompose().len(), 2);
        assert_eq!(dual_numbers(2).extend_by_polynomial(&r2.from_ints(&[1, 0, 1]).clone()).map(|a| a.dim()), Ok(4));
        assert_eq!(dual_numbers(2).extend_by_polynomial(&r5.from_ints(&[1, 2])).unwrap_err(), Error::NonMonic);
    }

    #[test]
    fn socles_and_gorenstein() {
        let a = dual_numbers(2);
        assert!(a.is_gorenstein().unwrap());
        assert_eq!(a.socle().unwrap().basis, vec![a.generator("y").unwrap().clone()]);
        let b = FiniteAlgebra::monomial_quotient(&f(2), &vars(&["y", "z"]), &[vec![2, 0], vec![1, 1], vec![0, 2]])
            .unwrap();
        assert_eq!(b.socle().unwrap().dim(), 2);
        assert!(!b.is_gorenstein().unwrap());
        let prod = FiniteAlgebra::product(&a, &b).unwrap();
        assert_eq!(prod.socle().unwrap_err(), Error::NotLocal);
    }

    #[test]
    fn products_decompose_back() {
        let a = dual_numbers(2);
        let k = FiniteAlgebra::monomial_quotient(&f(2), &[], &[]).unwrap();
        let p = FiniteAlgebra::product(&a, &k).unwrap();
        assert_eq!(p.dim(), 3);
        let factors = p.local_decompose();
        let mut dims: Vec<usize> = factors.iter().map(|fa| fa.algebra.dim()).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 2]);
        assert!(FiniteAlgebra::product(&a, &dual_numbers(3)).is_err());
    }

    #[test]
    fn base_change_splits_the_field_f4() {
        let r2 = PolyRing::new(f(2));
        let f4 = FiniteAlgebra::monomial_quotient(&f(2), &[], &[]).unwrap().extend_by_polynomial(&r2.from_ints(&[1, 1, 1])).unwrap();
        let over_f4 = f4.base_change(2).unwrap();
        assert_eq!(over_f4.dim(), 2);
        assert_eq!(over_f4.local_decompose().len(), 2);
        assert_eq!(dual_numbers(2).base_change(1).unwrap(), dual_numbers(2));
        assert!(matches!(GaloisField::new(2, 2).map(|_| dual_numbers(2).base_change(3)), Ok(Ok(_))));
        let over4 = dual_numbers(2).base_change(2).unwrap();
        assert!(matches!(over4.base_change(3), Err(Error::BadDegree { .. })));
    }

    fn check_decomposition(a: &FiniteAlgebra) -> Vec<LocalFactor> {
        let factors = a.local_decompose();
        let mut sum = a.zero();
        for (i, fa) in factors.iter().enumerate() {
            assert!(fa.algebra.is_local());
            assert_eq!(a.mul(&fa.idempotent, &fa.idempotent), fa.idempotent);
            for other in &factors[i + 1..] {
                assert!(a.is_zero(&a.mul(&fa.idempotent, &other.idempotent)));
            }
            sum = a.add(&sum, &fa.idempotent);
        }
        assert_eq!(&sum, a.unit());
        assert_eq!(factors.iter().map(|fa| fa.algebra.dim()).sum::<usize>(), a.dim());
        factors
    }

    #[test]
    fn idempotents_of_a_split_quadratic() {
        let r2 = PolyRing::new(f(2));
        let k = FiniteAlgebra::monomial_quotient(&f(2), &[], &[]).unwrap();
        let a = k.extend_by_polynomial(&r2.from_ints(&[0, 1, 1])).unwrap();
        let factors = check_decomposition(&a);
        let mut idem: Vec<AlgebraElement> = factors.iter().map(|fa| fa.idempotent.clone()).collect();
        idem.sort();
        let x = a.generator("u").unwrap().clone();
        let mut expected = vec![x.clone(), a.add(&x, a.unit())];
        expected.sort();
        assert_eq!(idem, expected);
        assert_eq!(check_decomposition(&dual_numbers(3)).len(), 1);
        assert_eq!(check_decomposition(&dual_numbers(3))[0].idempotent, *dual_numbers(3).unit());
    }

    #[test]
    fn decomposition_of_larger_products() {
        let a = dual_numbers(3);
        let b = FiniteAlgebra::monomial_quotient(&f(3), &vars(&["y", "z"]), &[vec![2, 0], vec![1, 1], vec![0, 3]])
            .unwrap();
        let k = FiniteAlgebra::monomial_quotient(&f(3), &[], &[]).unwrap();
        let p = FiniteAlgebra::product(&FiniteAlgebra::product(&a, &b).unwrap(), &k).unwrap();
        let factors = check_decomposition(&p);
        let mut dims: Vec<usize> = factors.iter().map(|fa| fa.algebra.dim()).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 2, 4]);
    }

    #[test]
    fn trivial_extension_by_the_residue_field() {
        let k = Arc::new(FiniteAlgebra::monomial_quotient(&f(2), &[], &[]).unwrap());
        let eps = k.residue_trivial_extension().unwrap();
        assert_eq!(eps.dim(), 2);
        assert_eq!(eps.local_data().unwrap().nilpotency_index, 2);

        let a = Arc::new(dual_numbers(2));
        let ak = a.residue_trivial_extension().unwrap();
        assert_eq!(ak.dim(), 3);
        assert!(ak.is_local());
        assert_eq!(ak.socle().unwrap().dim(), 2);
        assert!(!ak.is_gorenstein().unwrap());
        let x = ak.socle_witness().unwrap().clone();
        assert!(ak.is_zero(&ak.mul(&x, &x)));
        let ann = ak.annihilator(&x);
        let mut max = Echelon::new(ak.field(), ak.dim());
        for v in &ak.local_data().unwrap().max_ideal {
            max.insert(SparseVec::from_dense(v));
        }
        assert_eq!(ann.dim(), max.rank());
        assert!(ann.basis.iter().all(|v| max.contains(&SparseVec::from_dense(v))));
        let socle = ak.socle().unwrap();
        let mut soc = Echelon::new(ak.field(), ak.dim());
        for v in &socle.basis {
            soc.insert(SparseVec::from_dense(v));
        }
        assert!(soc.contains(&SparseVec::from_dense(&x)));
    }

    #[test]
    fn base_change_of_residue_extension_splits_residue_field() {
        let r2 = PolyRing::new(f(2));
        let a = dual_numbers(2).extend_by_polynomial(&r2.from_ints(&[1, 1, 1])).unwrap();
        let big = a.base_change(2).unwrap();
        let factors = check_decomposition(&big);
        assert_eq!(factors.len(), 2);
        for fa in &factors {
            assert_eq!(fa.algebra.residue_degree().unwrap(), 1);
        }
    }
}
