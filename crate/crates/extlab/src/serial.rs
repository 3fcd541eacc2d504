//! Self-contained serialized forms of algebras and modules, used for witnesses and replay.
//! Field elements are written as their integer encodings.

use std::sync::Arc;

use extlab_core::{FieldElement, FiniteAlgebra, FiniteModule, GaloisField, Matrix, Poly, PolyPresentedModule};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub p: u32,
    pub e: u32,
    pub labels: Vec<String>,
    /// Nonzero structure constants `(i, j, k, c)` with `i <= j`: `b_i b_j` has `c` at `b_k`.
    pub constants: Vec<(usize, usize, usize, u32)>,
    pub unit: Vec<u32>,
    pub generators: Vec<(String, Vec<u32>)>,
}

fn indices(v: &[FieldElement]) -> Vec<u32> {
    v.iter().map(|c| c.index()).collect()
}

fn elements(field: &GaloisField, v: &[u32]) -> Result<Vec<FieldElement>> {
    v.iter()
        .map(|&i| field.element(i).ok_or_else(|| HarnessError::Validation(format!("{i} is not an element of F_{}", field.order()))))
        .collect()
}

impl AlgebraSpec {
    pub fn of(alg: &FiniteAlgebra) -> Self {
        let d = alg.dim();
        let mut constants = Vec::new();
        for i in 0..d {
            for j in i..d {
                for &(k, c) in alg.basis_product(i, j).entries() {
                    constants.push((i, j, k as usize, c.index()));
                }
            }
        }
        AlgebraSpec {
            p: alg.field().characteristic(),
            e: alg.field().degree(),
            labels: alg.labels().to_vec(),
            constants,
            unit: indices(alg.unit()),
            generators: alg.generators().iter().map(|(n, g)| (n.clone(), indices(g))).collect(),
        }
    }

    pub fn build(&self) -> Result<Arc<FiniteAlgebra>> {
        let field = GaloisField::new(self.p, self.e)?;
        let d = self.labels.len();
        let mut constants = vec![FieldElement::ZERO; d * d * d];
        for &(i, j, k, c) in &self.constants {
            if i >= d || j >= d || k >= d {
                return Err(HarnessError::Validation(format!("structure constant index ({i}, {j}, {k}) out of range")));
            }
            let c = elements(&field, &[c])?[0];
            constants[(i * d + j) * d + k] = c;
            constants[(j * d + i) * d + k] = c;
        }
        let unit = elements(&field, &self.unit)?;
        let alg = FiniteAlgebra::build(field.clone(), self.labels.clone(), &constants, unit)?;
        let generators =
            self.generators.iter().map(|(n, g)| Ok((n.clone(), elements(&field, g)?))).collect::<Result<Vec<_>>>()?;
        Ok(Arc::new(alg.with_generators(generators)))
    }
}

/// A module by its action matrices, one per basis element of the algebra, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub dim: usize,
    pub action: Vec<Vec<Vec<u32>>>,
}

impl ModuleSpec {
    pub fn of(m: &FiniteModule) -> Self {
        let action = m.actions().iter().map(|a| (0..a.rows()).map(|i| indices(a.row(i))).collect()).collect();
        ModuleSpec { dim: m.dim(), action }
    }

    pub fn build(&self, alg: &Arc<FiniteAlgebra>) -> Result<FiniteModule> {
        let action = self
            .action
            .iter()
            .map(|rows| {
                if rows.len() != self.dim {
                    return Err(HarnessError::Validation("action matrix has the wrong number of rows".into()));
                }
                if self.dim == 0 {
                    return Ok(Matrix::zeros(0, 0));
                }
                Ok(Matrix::from_rows(rows.iter().map(|r| elements(alg.field(), r)).collect::<Result<_>>()?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteModule::new(Arc::clone(alg), action)?)
    }
}

/// An `A[x]`-module presentation: `relations[r][j][l]` is the coefficient list of the
/// polynomial in front of `b_l` in entry `j` of relation `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyModuleSpec {
    pub generators: usize,
    pub relations: Vec<Vec<Vec<Vec<u32>>>>,
}

impl PolyModuleSpec {
    pub fn of(m: &PolyPresentedModule) -> Self {
        let relations =
            m.relations().iter().map(|r| r.iter().map(|e| e.iter().map(|p| indices(p.coeffs())).collect()).collect()).collect();
        PolyModuleSpec { generators: m.generators(), relations }
    }

    pub fn build(&self, alg: &Arc<FiniteAlgebra>) -> Result<PolyPresentedModule> {
        let relations = self
            .relations
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| e.iter().map(|p| Ok(Poly::from_coeffs(elements(alg.field(), p)?))).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyPresentedModule::new(Arc::clone(alg), self.generators, relations)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use extlab_core::module::residue_module;

    #[test]
    fn algebra_and_module_round_trip() {
        let f = GaloisField::new(2, 2).unwrap();
        let r = Arc::new(FiniteAlgebra::monomial_quotient(&f, &["y".into(), "z".into()], &[vec![2, 0], vec![0, 2]]).unwrap());
        let a = Arc::new(r.residue_trivial_extension().unwrap());
        let spec = AlgebraSpec::of(&a);
        let back = spec.build().unwrap();
        assert_eq!(AlgebraSpec::of(&back), spec);
        assert_eq!(back.generator("e"), a.generator("e"));
        let k = residue_module(&a).unwrap();
        let m = FiniteModule::regular(&a).direct_sum(&k).unwrap();
        let ms = ModuleSpec::of(&m);
        assert_eq!(ms.build(&back).unwrap().actions(), m.actions());
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<AlgebraSpec>(&json).unwrap(), spec);
    }

    #[test]
    fn malformed_specs_are_rejected() {
        let mut spec = AlgebraSpec::of(&FiniteAlgebra::monomial_quotient(&GaloisField::prime(3).unwrap(), &["y".into()], &[vec![2]]).unwrap());
        spec.unit = vec![0, 1];
        assert!(matches!(spec.build(), Err(HarnessError::Core(extlab_core::Error::BadUnit(_)))));
        spec.unit = vec![7, 0];
        assert!(matches!(spec.build(), Err(HarnessError::Validation(_))));
    }
}
