//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2;

use bitension_core::catalog::{self, CatalogEntry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn entries() -> Vec<CatalogEntry> {
    vec![
        catalog::make_hypersphere(2, FRAC_1_SQRT_2).unwrap(),
        catalog::make_hypersphere(3, FRAC_1_SQRT_2).unwrap(),
        catalog::make_hypersphere(2, 0.6).unwrap(),
        catalog::make_hypersphere(3, 0.6).unwrap(),
        catalog::make_hypersphere(2, 1.0).unwrap(),
        catalog::make_clifford(1, 2, FRAC_1_SQRT_2).unwrap(),
        catalog::make_clifford(2, 1, FRAC_1_SQRT_2).unwrap(),
        catalog::make_clifford(1, 2, 0.6).unwrap(),
        catalog::make_clifford(1, 1, FRAC_1_SQRT_2).unwrap(),
        catalog::make_clifford(1, 2, 1.0 / 3f64.sqrt()).unwrap(),
        catalog::make_legendre_torus(),
        catalog::make_anti_invariant_torus(),
        catalog::make_perturbed_graph(0.2),
        catalog::make_composed_equator(),
    ]
}

pub fn random_points(entry: &CatalogEntry, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = &entry.spec;
    (0..count)
        .map(|_| {
            spec.domain()
                .iter()
                .zip(spec.periodic())
                .map(|(&(lo, hi), &periodic)| {
                    let margin = if periodic { 0.0 } else { 0.05 * (hi - lo) };
                    rng.random_range(lo + margin..hi - margin)
                })
                .collect()
        })
        .collect()
}
