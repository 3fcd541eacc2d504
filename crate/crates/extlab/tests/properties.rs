use std::sync::Arc;

use extlab::expr::{parse_element, parse_poly_element};
use extlab::sample::{case_rng, random_module_from, random_poly_module, Flags, SampleParams};
use extlab::serial::{AlgebraSpec, ModuleSpec, PolyModuleSpec};
use extlab::stock::{stock_ring, STOCK_RINGS};
use extlab::suites::{generate_case, SuiteConfig};
use extlab_core::FiniteAlgebra;
use proptest::prelude::*;

fn stock(i: usize) -> Arc<FiniteAlgebra> {
    stock_ring(STOCK_RINGS[i % STOCK_RINGS.len()]).unwrap().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn module_specs_round_trip(seed in any::<u64>(), which in 0usize..8) {
        let base = stock(which);
        let alg = if which >= 4 { Arc::new(base.residue_trivial_extension().unwrap()) } else { base };
        let spec = AlgebraSpec::of(&alg);
        let rebuilt = spec.build().unwrap();
        prop_assert_eq!(&AlgebraSpec::of(&rebuilt), &spec);
        let mut rng = case_rng(seed, 0);
        let m = random_module_from(&alg, &mut rng, &SampleParams::default(), Flags::NONZERO).unwrap();
        let ms = ModuleSpec::of(&m);
        let json = serde_json::to_string(&ms).unwrap();
        let back: ModuleSpec = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(ModuleSpec::of(&back.build(&rebuilt).unwrap()), ms);
    }

    #[test]
    fn poly_module_specs_round_trip(seed in any::<u64>()) {
        let alg = stock(3);
        let m = random_poly_module(&alg, &mut case_rng(seed, 1), &SampleParams::default()).unwrap();
        let spec = PolyModuleSpec::of(&m);
        prop_assert_eq!(PolyModuleSpec::of(&spec.build(&alg).unwrap()), spec);
    }

    #[test]
    fn expressions_add_and_multiply(a in 0i64..7, b in 0i64..7, i in 0u32..4, j in 0u32..4) {
        let alg = stock(1);
        let lhs = parse_element(&alg, &format!("{a}*y^{i} + {b}*y^{j}")).unwrap();
        let rhs = alg.add(&parse_element(&alg, &format!("{a}*y^{i}")).unwrap(), &parse_element(&alg, &format!("{b}*y^{j}")).unwrap());
        prop_assert_eq!(&lhs, &rhs);
        let prod = parse_element(&alg, &format!("y^{i}*y^{j}")).unwrap();
        prop_assert_eq!(prod, alg.mul(&parse_element(&alg, &format!("y^{i}")).unwrap(), &parse_element(&alg, &format!("y^{j}")).unwrap()));
        let constant = parse_poly_element(&alg, &format!("{a}*y^{i}")).unwrap();
        prop_assert!(constant.iter().all(|p| p.degree().unwrap_or(0) == 0));
    }

    #[test]
    fn case_generation_is_deterministic(seed in any::<u64>(), index in 0u64..64, which in 0usize..4) {
        let ring = stock(which);
        for name in ["trivial-ext-tor", "tor-splitting", "ext-gap-scan"] {
            let config = SuiteConfig::new(name);
            let a = generate_case(&config, &ring, 1, &mut case_rng(seed, index)).unwrap();
            let b = generate_case(&config, &ring, 1, &mut case_rng(seed, index)).unwrap();
            prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        }
    }
}
