use std::sync::Arc;

use extlab_core::homology::{ext_dims, minimal_resolution, tor_dims};
use extlab_core::module::{module_from_presentation, residue_module};
use extlab_core::poly_matrix::{kernel_over_poly, smith_normal_form};
use extlab_core::{AlgebraElement, FieldElement, FiniteAlgebra, FiniteModule, GaloisField, Poly, PolyMatrix, PolyRing};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_poly(rng: &mut ChaCha8Rng, ring: &PolyRing, max_deg: usize) -> Poly {
    let q = ring.field().order();
    let coeffs = (0..=max_deg).map(|_| ring.field().element(rng.gen_range(0..q)).unwrap()).collect();
    Poly::from_coeffs(coeffs)
}

fn random_matrix(rng: &mut ChaCha8Rng, ring: &PolyRing, rows: usize, cols: usize, max_deg: usize) -> PolyMatrix {
    PolyMatrix::from_rows(
        (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| {
                        if rng.gen_bool(0.3) {
                            Poly::zero()
                        } else {
                            let deg = rng.gen_range(0..=max_deg);
                            random_poly(rng, ring, deg)
                        }
                    })
                    .collect()
            })
            .collect(),
    )
}

/// Determinant by cofactor expansion along the first row.
fn det(ring: &PolyRing, m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 0 {
        return ring.one();
    }
    let mut acc = Poly::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect()).collect();
        let term = ring.mul(&m[0][j], &det(ring, &minor));
        acc = if j % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
    }
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors as quotients of consecutive gcds of k x k minors.
fn invariant_factors_by_minors(ring: &PolyRing, a: &PolyMatrix) -> Vec<Poly> {
    let mut out = Vec::new();
    let mut prev = ring.one();
    for k in 1..=a.rows().min(a.cols()) {
        let mut g = Poly::zero();
        for rs in subsets(a.rows(), k) {
            for cs in subsets(a.cols(), k) {
                let sub: Vec<Vec<Poly>> = rs.iter().map(|&i| cs.iter().map(|&j| a.get(i, j).clone()).collect()).collect();
                g = ring.gcd(&g, &det(ring, &sub));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(ring.exact_div(&g, &prev).expect("gcd of minors divides the next"));
        prev = g;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_matches_minors(seed in any::<u64>(), rows in 1usize..=4, cols in 1usize..=4) {
        let ring = PolyRing::new(GaloisField::prime(5).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, &ring, rows, cols, 3);
        let snf = smith_normal_form(&a, &ring);
        prop_assert_eq!(&snf.diagonal, &invariant_factors_by_minors(&ring, &a));
        prop_assert_eq!(snf.u.mul(&a, &ring).mul(&snf.v, &ring), snf.d);
    }

    #[test]
    fn kernel_vectors_are_annihilated(seed in any::<u64>(), rows in 1usize..=4, cols in 1usize..=5) {
        let ring = PolyRing::new(GaloisField::new(3, 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, &ring, rows, cols, 2);
        let kernel = kernel_over_poly(&a, &ring);
        let rank = smith_normal_form(&a, &ring).diagonal.len();
        prop_assert_eq!(kernel.len() + rank, cols);
        for v in &kernel {
            prop_assert!(a.mul_vec(v, &ring).iter().all(Poly::is_zero));
        }
    }

    #[test]
    fn field_axioms(p_idx in 0usize..4, e in 1u32..=3, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let p = [2u32, 3, 5, 7][p_idx];
        let f = GaloisField::new(p, e).unwrap();
        let q = f.order();
        let (a, b, c) = (f.element(a % q).unwrap(), f.element(b % q).unwrap(), f.element(c % q).unwrap());
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a)), FieldElement::ONE);
        }
        prop_assert_eq!(f.pow(a, q as u64), a);
    }

    #[test]
    fn roots_agree_with_evaluation(seed in any::<u64>(), deg in 1usize..=6, e in 1u32..=2) {
        let ring = PolyRing::new(GaloisField::new(3, e).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_poly(&mut rng, &ring, deg);
        prop_assume!(!f.is_zero());
        let roots = ring.roots_in_field(&f).unwrap();
        let brute: Vec<FieldElement> = ring.field().elements().filter(|&a| ring.eval(&f, a).is_zero()).collect();
        prop_assert_eq!(roots, brute);
        let sq = ring.squarefree_part(&f).unwrap();
        prop_assert!(ring.divides(&sq, &f));
        prop_assert!(ring.gcd(&sq, &ring.derivative(&sq)).is_constant());
    }

    #[test]
    fn products_of_local_algebras_decompose(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = GaloisField::prime(3).unwrap();
        let pick = |rng: &mut ChaCha8Rng| {
            let a = rng.gen_range(1..=3u32);
            let b = rng.gen_range(1..=2u32);
            FiniteAlgebra::monomial_quotient(&f, &["y".into(), "z".into()], &[vec![a, 0], vec![0, b], vec![1, 1]]).unwrap()
        };
        let (a1, a2) = (pick(&mut rng), pick(&mut rng));
        let p = FiniteAlgebra::product(&a1, &a2).unwrap();
        prop_assert!(!p.is_local());
        let factors = p.local_decompose();
        prop_assert_eq!(factors.len(), 2);
        let mut sum = p.zero();
        for fa in &factors {
            prop_assert!(fa.algebra.is_local());
            prop_assert_eq!(p.mul(&fa.idempotent, &fa.idempotent), fa.idempotent.clone());
            sum = p.add(&sum, &fa.idempotent);
        }
        prop_assert_eq!(&sum, p.unit());
        let mut dims: Vec<usize> = factors.iter().map(|fa| fa.algebra.dim()).collect();
        dims.sort();
        let mut expected = vec![a1.dim(), a2.dim()];
        expected.sort();
        prop_assert_eq!(dims, expected);
    }
}

fn stock_algebra(i: usize) -> Arc<FiniteAlgebra> {
    let (p, vars, ideal): (u32, Vec<&str>, Vec<Vec<u32>>) = match i {
        0 => (2, vec!["y"], vec![vec![2]]),
        1 => (3, vec!["y"], vec![vec![3]]),
        _ => (2, vec!["y", "z"], vec![vec![2, 0], vec![1, 1], vec![0, 2]]),
    };
    let f = GaloisField::prime(p).unwrap();
    let vars: Vec<String> = vars.into_iter().map(String::from).collect();
    Arc::new(FiniteAlgebra::monomial_quotient(&f, &vars, &ideal).unwrap())
}

fn random_module(alg: &Arc<FiniteAlgebra>, rng: &mut ChaCha8Rng) -> FiniteModule {
    let m = &alg.local_data().unwrap().max_ideal;
    let f = alg.field();
    let gens = rng.gen_range(1..=3);
    let rels = rng.gen_range(0..=3);
    let relations: Vec<Vec<AlgebraElement>> = (0..rels)
        .map(|_| {
            (0..gens)
                .map(|_| {
                    let mut a = alg.zero();
                    for v in m {
                        let c = f.element(rng.gen_range(0..f.order())).unwrap();
                        a = alg.add(&a, &alg.scale(v, c));
                    }
                    a
                })
                .collect()
        })
        .collect();
    module_from_presentation(alg, gens, &relations).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homology_identities_on_random_pairs(seed in any::<u64>(), which in 0usize..3) {
        let alg = stock_algebra(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module(&alg, &mut rng);
        let n = random_module(&alg, &mut rng);
        let bound = 4;
        minimal_resolution(&m, bound + 1).unwrap().verify().unwrap();
        let tor = tor_dims(&m, &n, bound).unwrap();
        prop_assert_eq!(&tor.dims, &tor_dims(&n, &m, bound).unwrap().dims);
        prop_assert_eq!(&tor.dims, &ext_dims(&m, &n.matlis_dual(), bound).unwrap().dims);
        let k = residue_module(&alg).unwrap();
        let res = minimal_resolution(&m, bound + 1).unwrap();
        let ext_k = ext_dims(&m, &k, bound).unwrap();
        for i in 0..=bound {
            prop_assert_eq!(ext_k.get(i), res.betti(i).unwrap());
        }
    }
}
