//! Finite-dimensional modules over a [`FiniteAlgebra`], stored by their action operators.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{AlgebraElement, FiniteAlgebra, LocalFactor};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::matrix::Matrix;
use crate::sparse::{Echelon, SparseVec};

/// A finite presentation `A^a -> A^b`: row `r` of `relations` is a relation in `A^b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: usize,
    pub relations: Vec<Vec<AlgebraElement>>,
}

#[derive(Clone)]
pub struct FiniteModule {
    algebra: Arc<FiniteAlgebra>,
    dim: usize,
    action: Vec<Matrix>,
    provenance: Option<Presentation>,
    generator_images: Vec<Vec<FieldElement>>,
}

impl fmt::Debug for FiniteModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteModule(dim {} over {:?})", self.dim, self.algebra)
    }
}

impl PartialEq for FiniteModule {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.action == other.action
    }
}

impl FiniteModule {
    /// Validates the action: the unit acts as the identity and
    /// `L(b_i) L(b_j) = sum_k c_ijk L(b_k)`.
    pub fn new(algebra: Arc<FiniteAlgebra>, action: Vec<Matrix>) -> Result<Self> {
        let d = algebra.dim();
        if action.len() != d {
            return Err(Error::InvalidModule(format!("{} action operators for an algebra of dimension {d}", action.len())));
        }
        let n = action.first().map_or(0, Matrix::rows);
        if action.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::InvalidModule("action operators must be square of equal size".into()));
        }
        let m = Self::trusted(algebra, action, n);
        m.validate()?;
        Ok(m)
    }

    fn trusted(algebra: Arc<FiniteAlgebra>, action: Vec<Matrix>, dim: usize) -> Self {
        FiniteModule { algebra, dim, action, provenance: None, generator_images: Vec::new() }
    }

    fn validate(&self) -> Result<()> {
        let f = self.algebra.field();
        let d = self.algebra.dim();
        if self.action_of(self.algebra.unit()) != Matrix::identity(self.dim) {
            return Err(Error::InvalidModule("the unit does not act as the identity".into()));
        }
        for i in 0..d {
            for j in i..d {
                let lhs = self.action[i].mul(&self.action[j], f);
                let rhs = self.action_of(&self.algebra.basis_product(i, j).to_dense(d));
                if lhs != rhs {
                    return Err(Error::InvalidModule(format!(
                        "L({}) L({}) does not match the structure constants",
                        self.algebra.labels()[i],
                        self.algebra.labels()[j]
                    )));
                }
            }
        }
        Ok(())
    }

    /// `A` as a module over itself.
    pub fn regular(algebra: &Arc<FiniteAlgebra>) -> Self {
        let d = algebra.dim();
        let action = (0..d).map(|i| algebra.multiplication_matrix(&algebra.basis_vector(i))).collect();
        let mut m = Self::trusted(Arc::clone(algebra), action, d);
        m.provenance = Some(Presentation { generators: 1, relations: Vec::new() });
        m.generator_images = vec![algebra.unit().clone()];
        m
    }

    pub fn zero(algebra: &Arc<FiniteAlgebra>) -> Self {
        let action = vec![Matrix::zeros(0, 0); algebra.dim()];
        Self::trusted(Arc::clone(algebra), action, 0)
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.dim == 0
    }

    /// Operator of the basis element `b_i`.
    pub fn action(&self, i: usize) -> &Matrix {
        &self.action[i]
    }

    pub fn actions(&self) -> &[Matrix] {
        &self.action
    }

    pub fn provenance(&self) -> Option<&Presentation> {
        self.provenance.as_ref()
    }

    /// Image of the `j`-th presentation generator, when the module came from a presentation.
    pub fn generator_image(&self, j: usize) -> Option<&[FieldElement]> {
        self.generator_images.get(j).map(Vec::as_slice)
    }

    /// For the residue module: the class of `1`.
    pub(crate) fn residue_of_unit(&self) -> Vec<FieldElement> {
        self.generator_images[0].clone()
    }

    /// Operator of an arbitrary algebra element.
    pub fn action_of(&self, a: &[FieldElement]) -> Matrix {
        let f = self.algebra.field();
        let mut out = Matrix::zeros(self.dim, self.dim);
        for (i, &c) in a.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.action[i].scale(c, f), f);
            }
        }
        out
    }

    pub fn act(&self, a: &[FieldElement], v: &[FieldElement]) -> Vec<FieldElement> {
        let f = self.algebra.field();
        let mut out = vec![FieldElement::ZERO; self.dim];
        for (i, &c) in a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let w = self.action[i].mul_vec(v, f);
            for (o, x) in out.iter_mut().zip(w) {
                *o = f.add(*o, f.mul(c, x));
            }
        }
        out
    }

    /// `Hom_F(M, F)` with the transposed action.
    pub fn matlis_dual(&self) -> Self {
        let action = self.action.iter().map(Matrix::transpose).collect();
        Self::trusted(Arc::clone(&self.algebra), action, self.dim)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.algebra != other.algebra {
            return Err(Error::InvalidModule("direct sum of modules over different algebras".into()));
        }
        let (n1, n2) = (self.dim, other.dim);
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| {
                let mut m = Matrix::zeros(n1 + n2, n1 + n2);
                for i in 0..n1 {
                    for j in 0..n1 {
                        m.set(i, j, a.get(i, j));
                    }
                }
                for i in 0..n2 {
                    for j in 0..n2 {
                        m.set(n1 + i, n1 + j, b.get(i, j));
                    }
                }
                m
            })
            .collect();
        Ok(Self::trusted(Arc::clone(&self.algebra), action, n1 + n2))
    }

    /// Restriction of scalars along an algebra map `source -> A` given by the images of the
    /// basis of `source`.
    pub fn restrict_along(&self, source: &Arc<FiniteAlgebra>, images: &[AlgebraElement]) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(Error::DimensionMismatch("one image per source basis element".into()));
        }
        let action = images.iter().map(|a| self.action_of(a)).collect();
        Self::new(Arc::clone(source), action)
    }

    /// Restriction along the projection `A(N) = A ⊕ N -> A`, the first `dim A` basis vectors
    /// of `ext` mapping identically.
    pub fn restrict_to_trivial_extension(&self, ext: &Arc<FiniteAlgebra>) -> Result<Self> {
        let d = self.algebra.dim();
        let images: Vec<AlgebraElement> = (0..ext.dim())
            .map(|i| if i < d { self.algebra.basis_vector(i) } else { self.algebra.zero() })
            .collect();
        self.restrict_along(ext, &images)
    }

    /// `M1 × M2` over `product = A1 × A2`, the basis of `product` being that of `A1` followed
    /// by that of `A2`.
    pub fn product_module(product: &Arc<FiniteAlgebra>, m1: &Self, m2: &Self) -> Result<Self> {
        let (d1, d2) = (m1.algebra.dim(), m2.algebra.dim());
        if product.dim() != d1 + d2 {
            return Err(Error::DimensionMismatch("product algebra dimension".into()));
        }
        let (n1, n2) = (m1.dim, m2.dim);
        let action = (0..d1 + d2)
            .map(|i| {
                let mut m = Matrix::zeros(n1 + n2, n1 + n2);
                let (op, offset, n) = if i < d1 { (&m1.action[i], 0, n1) } else { (&m2.action[i - d1], n1, n2) };
                for r in 0..n {
                    for c in 0..n {
                        m.set(offset + r, offset + c, op.get(r, c));
                    }
                }
                m
            })
            .collect();
        Self::new(Arc::clone(product), action)
    }

    /// The summand `eM` as a module over the factor `eA`.
    pub fn restrict_to_factor(&self, factor: &LocalFactor) -> Self {
        let f = self.algebra.field();
        let e = self.action_of(&factor.idempotent);
        let spanning: Vec<Vec<FieldElement>> = (0..self.dim).map(|j| e.column(j)).collect();
        let (rows, pivots) = if spanning.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            let (r, pivots) = Matrix::from_rows(spanning).rref(f);
            ((0..pivots.len()).map(|i| r.row(i).to_vec()).collect::<Vec<_>>(), pivots)
        };
        let coords = |v: &[FieldElement]| pivots.iter().map(|&p| v[p]).collect::<Vec<_>>();
        let m = rows.len();
        let action = factor
            .basis_in_parent
            .iter()
            .map(|b| {
                let op = self.action_of(b);
                let cols: Vec<Vec<FieldElement>> = rows.iter().map(|v| coords(&op.mul_vec(v, f))).collect();
                Matrix::from_columns(m, &cols)
            })
            .collect();
        Self::trusted(Arc::clone(&factor.algebra), action, m)
    }

    /// The same action matrices over a base-changed algebra.
    pub fn base_change(&self, target: &Arc<FiniteAlgebra>) -> Result<Self> {
        if target.dim() != self.algebra.dim() {
            return Err(Error::DimensionMismatch("base change target has a different basis".into()));
        }
        let emb = self.algebra.field().embedding_into(target.field())?;
        let action = self
            .action
            .iter()
            .map(|m| {
                let rows = (0..m.rows()).map(|i| m.row(i).iter().map(|&c| emb.apply(c)).collect()).collect();
                if m.rows() == 0 {
                    Matrix::zeros(0, 0)
                } else {
                    Matrix::from_rows(rows)
                }
            })
            .collect();
        Self::new(Arc::clone(target), action)
    }

    /// Generators of `M/mM` lifted to `M`, chosen greedily along the basis; their number is the
    /// minimal number of generators.
    pub fn minimal_generators(&self) -> Result<Vec<Vec<FieldElement>>> {
        let local = self.algebra.local_data().ok_or(Error::NotLocal)?;
        let f = self.algebra.field();
        let mut span = Echelon::new(f, self.dim);
        for m in &local.max_ideal {
            let op = self.action_of(m);
            for j in 0..self.dim {
                span.insert(SparseVec::from_dense(&op.column(j)));
            }
        }
        let mut gens = Vec::new();
        for t in 0..self.dim {
            if span.rank() == self.dim {
                break;
            }
            let mut v = vec![FieldElement::ZERO; self.dim];
            v[t] = FieldElement::ONE;
            if span.contains(&SparseVec::from_dense(&v)) {
                continue;
            }
            for op in &self.action {
                span.insert(SparseVec::from_dense(&op.mul_vec(&v, f)));
            }
            gens.push(v);
        }
        Ok(gens)
    }
}

/// `coker(A^a -> A^b)` with rows of `relations` the images of the basis of `A^a`.
///
/// The ambient `A^b` is realized as `F^{d b}` with index `j * d + l` for `b_l e_j`.
pub fn module_from_presentation(
    algebra: &Arc<FiniteAlgebra>,
    generators: usize,
    relations: &[Vec<AlgebraElement>],
) -> Result<FiniteModule> {
    if !algebra.is_local() {
        return Err(Error::NotLocal);
    }
    presented_module(algebra, generators, relations)
}

pub(crate) fn presented_module(
    algebra: &Arc<FiniteAlgebra>,
    generators: usize,
    relations: &[Vec<AlgebraElement>],
) -> Result<FiniteModule> {
    let f = algebra.field();
    let d = algebra.dim();
    if relations.iter().any(|r| r.len() != generators || r.iter().any(|a| a.len() != d)) {
        return Err(Error::DimensionMismatch(format!("relations must have {generators} entries of length {d}")));
    }
    let total = d * generators;
    let mut sub = Echelon::new(f, total);
    for rel in relations {
        for l in 0..d {
            let bl = algebra.basis_vector(l);
            let mut v = Vec::with_capacity(total);
            for a in rel {
                v.extend(algebra.mul(&bl, a));
            }
            sub.insert(SparseVec::from_dense(&v));
        }
    }
    let keep = sub.complement();
    let mut position = vec![usize::MAX; total];
    for (t, &i) in keep.iter().enumerate() {
        position[i] = t;
    }
    let n = keep.len();
    let project = |v: &SparseVec| -> Vec<FieldElement> {
        let r = sub.reduce_full(v);
        let mut out = vec![FieldElement::ZERO; n];
        for &(i, c) in r.entries() {
            out[position[i as usize]] = c;
        }
        out
    };
    let action = (0..d)
        .map(|i| {
            let cols: Vec<Vec<FieldElement>> = keep
                .iter()
                .map(|&idx| {
                    let (j, l) = (idx / d, idx % d);
                    project(&algebra.basis_product(i, l).shifted((j * d) as u32))
                })
                .collect();
            Matrix::from_columns(n, &cols)
        })
        .collect();
    let generator_images = (0..generators)
        .map(|j| project(&SparseVec::from_dense(algebra.unit()).shifted((j * d) as u32)))
        .collect();
    let mut m = FiniteModule::trusted(Arc::clone(algebra), action, n);
    m.provenance = Some(Presentation { generators, relations: relations.to_vec() });
    m.generator_images = generator_images;
    Ok(m)
}

/// `A/m`.
pub fn residue_module(algebra: &Arc<FiniteAlgebra>) -> Result<FiniteModule> {
    let local = algebra.local_data().ok_or(Error::NotLocal)?;
    let relations: Vec<Vec<AlgebraElement>> = local.max_ideal.iter().map(|m| vec![m.clone()]).collect();
    presented_module(algebra, 1, &relations)
}

/// `E(k) = Hom_F(A, F)` for a local `A`.
pub fn injective_envelope_of_residue(algebra: &Arc<FiniteAlgebra>) -> Result<FiniteModule> {
    if !algebra.is_local() {
        return Err(Error::NotLocal);
    }
    Ok(FiniteModule::regular(algebra).matlis_dual())
}

/// Free iff the minimal cover `A^{b_0} -> M` is injective.
pub fn is_free(m: &FiniteModule) -> Result<bool> {
    Ok(m.dim() == m.algebra().dim() * m.minimal_generators()?.len())
}

pub fn is_injective(m: &FiniteModule) -> Result<bool> {
    is_free(&m.matlis_dual())
}
