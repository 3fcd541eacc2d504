//! Seeded random instances: module presentations over local algebras and over `A[x]`.

use std::sync::Arc;

use extlab_core::module::{is_free, is_injective, module_from_presentation};
use extlab_core::{AlgebraElement, FiniteAlgebra, FiniteModule, Poly, PolyPresentedModule, PolyRing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleParams {
    pub max_generators: usize,
    pub max_relations: usize,
    /// Probability that a presentation entry is forced to zero.
    pub zero_probability: f64,
    pub max_attempts: usize,
    /// Largest `x`-degree of an entry of an `A[x]` presentation.
    pub max_x_degree: usize,
    /// Probability that an `A[x]` entry gets a component outside `m[x]`.
    pub unit_probability: f64,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams { max_generators: 4, max_relations: 4, zero_probability: 0.25, max_attempts: 200, max_x_degree: 2, unit_probability: 0.2 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub nonzero: bool,
    pub non_free: bool,
    pub non_injective: bool,
}

impl Flags {
    pub const NONZERO: Flags = Flags { nonzero: true, non_free: false, non_injective: false };
    pub const NON_FREE: Flags = Flags { nonzero: true, non_free: true, non_injective: false };
    pub const NON_INJECTIVE: Flags = Flags { nonzero: true, non_free: false, non_injective: true };

    fn accepts(&self, m: &FiniteModule) -> Result<bool> {
        Ok(!(self.nonzero && m.is_zero() || self.non_free && is_free(m)? || self.non_injective && is_injective(m)?))
    }
}

/// The generator for case `case` of a run seeded with `seed`.
pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

fn random_in_max_ideal(alg: &FiniteAlgebra, rng: &mut ChaCha8Rng, zero_probability: f64) -> AlgebraElement {
    let f = alg.field();
    let mut a = alg.zero();
    if rng.gen_bool(zero_probability) {
        return a;
    }
    for v in &alg.local_data().expect("caller checked locality").max_ideal {
        let c = f.element(rng.gen_range(0..f.order())).expect("in range");
        a = alg.add(&a, &alg.scale(v, c));
    }
    a
}

/// Cokernel of a random `a x b` matrix with entries in the maximal ideal, `b >= 1`, resampled
/// until it satisfies `flags`.
pub fn random_module_from(
    alg: &Arc<FiniteAlgebra>,
    rng: &mut ChaCha8Rng,
    params: &SampleParams,
    flags: Flags,
) -> Result<FiniteModule> {
    if !alg.is_local() {
        return Err(extlab_core::Error::NotLocal.into());
    }
    for _ in 0..params.max_attempts {
        let gens = rng.gen_range(1..=params.max_generators.max(1));
        let rels = rng.gen_range(0..=params.max_relations);
        let relations: Vec<Vec<AlgebraElement>> = (0..rels)
            .map(|_| (0..gens).map(|_| random_in_max_ideal(alg, rng, params.zero_probability)).collect())
            .collect();
        let m = module_from_presentation(alg, gens, &relations)?;
        if flags.accepts(&m)? {
            return Ok(m);
        }
    }
    Err(HarnessError::SamplingExhausted { attempts: params.max_attempts, reason: format!("no module satisfying {flags:?}") })
}

pub fn random_module(alg: &Arc<FiniteAlgebra>, seed: u64, params: &SampleParams, flags: Flags) -> Result<FiniteModule> {
    random_module_from(alg, &mut ChaCha8Rng::seed_from_u64(seed), params, flags)
}

/// A random presentation over `A[x]` with at most two generators and two relations. Entries
/// lie in `m[x]` except that, with probability `params.unit_probability`, a multiple of `1` is
/// added; `x`-degrees are at most `params.max_x_degree`.
pub fn random_poly_module(alg: &Arc<FiniteAlgebra>, rng: &mut ChaCha8Rng, params: &SampleParams) -> Result<PolyPresentedModule> {
    let local = alg.local_data().ok_or(extlab_core::Error::NotLocal)?;
    let f = alg.field();
    let ring = PolyRing::new(f.clone());
    let gens = rng.gen_range(1..=params.max_generators.clamp(1, 2));
    let rels = rng.gen_range(1..=params.max_relations.clamp(1, 2));
    let poly = |rng: &mut ChaCha8Rng| {
        let deg = rng.gen_range(0..=params.max_x_degree);
        Poly::from_coeffs((0..=deg).map(|_| f.element(rng.gen_range(0..f.order())).expect("in range")).collect())
    };
    let entry = |rng: &mut ChaCha8Rng| -> Vec<Poly> {
        let mut out = vec![Poly::zero(); alg.dim()];
        if rng.gen_bool(params.zero_probability) {
            return out;
        }
        let unit = rng.gen_bool(params.unit_probability);
        for v in local.max_ideal.iter().chain(unit.then_some(alg.unit())) {
            let p = poly(rng);
            for (slot, &c) in out.iter_mut().zip(v) {
                *slot = ring.add(slot, &ring.scale(&p, c));
            }
        }
        out
    };
    let relations = (0..rels).map(|_| (0..gens).map(|_| entry(rng)).collect()).collect();
    Ok(PolyPresentedModule::new(Arc::clone(alg), gens, relations)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stock::stock_ring;
    use extlab_core::GaloisField;

    #[test]
    fn non_free_flag_is_enforced() {
        let r = stock_ring("F2_y2").unwrap().unwrap();
        let params = SampleParams::default();
        for seed in 0..500 {
            let m = random_module(&r, seed, &params, Flags::NON_FREE).unwrap();
            assert!(!m.is_zero() && !is_free(&m).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn same_seed_same_module() {
        let a = stock_ring("F3_y3_k").unwrap().unwrap();
        let params = SampleParams::default();
        for seed in 0..20 {
            let m1 = random_module(&a, seed, &params, Flags::NON_INJECTIVE).unwrap();
            let m2 = random_module(&a, seed, &params, Flags::NON_INJECTIVE).unwrap();
            assert_eq!(m1.actions(), m2.actions());
            assert!(!is_injective(&m1).unwrap());
        }
        let mut r1 = case_rng(7, 3);
        let mut r2 = case_rng(7, 3);
        let p1 = random_poly_module(&a, &mut r1, &params).unwrap();
        let p2 = random_poly_module(&a, &mut r2, &params).unwrap();
        assert_eq!(p1.relations(), p2.relations());
        assert_ne!(case_rng(7, 3).gen::<u64>(), case_rng(7, 4).gen::<u64>());
    }

    #[test]
    fn fields_exhaust_non_free_sampling() {
        let f = GaloisField::prime(2).unwrap();
        let k = Arc::new(FiniteAlgebra::monomial_quotient(&f, &[], &[]).unwrap());
        let params = SampleParams { max_attempts: 30, ..SampleParams::default() };
        assert!(matches!(random_module(&k, 1, &params, Flags::NON_FREE), Err(HarnessError::SamplingExhausted { attempts: 30, .. })));
        assert!(random_module(&k, 1, &params, Flags::NONZERO).is_ok());
    }
}
