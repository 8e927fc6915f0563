//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;

use malab_core::{make_domain, manufactured, normalize_rhs, weierstrass, ScalarField, TrigPotential};

/// Normalized Weierstrass right-hand side with `α = 0.5`.
pub fn weierstrass_rhs(n: usize, resolution: usize, levels: u32) -> ScalarField {
    let d = make_domain(n, resolution).expect("valid domain");
    normalize_rhs(&weierstrass(&d, 0.5, levels, 0.2, 1).expect("valid levels")).expect("normalizable")
}

/// Manufactured pair `(φ, F)` with a diagonal and a mixed mode.
pub fn manufactured_pair(n: usize, resolution: usize) -> (ScalarField, ScalarField) {
    let d = make_domain(n, resolution).expect("valid domain");
    let dims = 2 * n;
    let mut k1 = vec![0; dims];
    k1[0] = 1;
    let mut k2 = vec![0; dims];
    k2[dims - 2] = 1;
    k2[1] = 1;
    let pot = TrigPotential::cosine(-0.2 / (PI * PI), k1).with_term(0.05 / (PI * PI), k2);
    manufactured(&d, &pot).expect("positive potential")
}
