//! Stock rings used by the suites when no workspace ring is named.

use std::sync::Arc;

use extlab_core::{FiniteAlgebra, GaloisField};

use crate::error::Result;

/// `F2[y]/(y^2)`, `F3[y]/(y^3)`, `F2[y,z]/(y,z)^2`, `F5[y]/(y^2)`.
pub const STOCK_RINGS: [&str; 4] = ["F2_y2", "F3_y3", "F2_yz2", "F5_y2"];

/// Suffix selecting the trivial extension `R(k)` of a stock ring, as in `F2_y2_k`.
pub const TRIVIAL_EXTENSION_SUFFIX: &str = "_k";

fn base(name: &str) -> Option<Result<FiniteAlgebra>> {
    let (p, vars, ideal): (u32, &[&str], Vec<Vec<u32>>) = match name {
        "F2_y2" => (2, &["y"], vec![vec![2]]),
        "F3_y3" => (3, &["y"], vec![vec![3]]),
        "F2_yz2" => (2, &["y", "z"], vec![vec![2, 0], vec![1, 1], vec![0, 2]]),
        "F5_y2" => (5, &["y"], vec![vec![2]]),
        _ => return None,
    };
    let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    Some(GaloisField::prime(p).and_then(|f| FiniteAlgebra::monomial_quotient(&f, &vars, &ideal)).map_err(Into::into))
}

/// A stock ring by name, or `None` if the name is not a stock ring.
pub fn stock_ring(name: &str) -> Option<Result<Arc<FiniteAlgebra>>> {
    if let Some(r) = base(name) {
        return Some(r.map(Arc::new));
    }
    let r = base(name.strip_suffix(TRIVIAL_EXTENSION_SUFFIX)?)?;
    Some(r.and_then(|r| Ok(Arc::new(Arc::new(r).residue_trivial_extension()?))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stock_dimensions() {
        let dims: Vec<(usize, usize)> = STOCK_RINGS
            .iter()
            .map(|n| {
                let r = stock_ring(n).unwrap().unwrap();
                let a = stock_ring(&format!("{n}{TRIVIAL_EXTENSION_SUFFIX}")).unwrap().unwrap();
                assert!(r.is_local() && a.is_local());
                (r.dim(), a.dim())
            })
            .collect();
        assert_eq!(dims, vec![(2, 3), (3, 4), (3, 4), (2, 3)]);
        assert!(stock_ring("F7_y2").is_none());
        assert!(stock_ring("F2_y2_k_k").is_none());
    }
}
