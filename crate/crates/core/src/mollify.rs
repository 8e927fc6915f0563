//! Periodic mollification `F_r = F ∗ ρ_r` and the good/bad split of `F`.
//!
//! The kernel is `ρ(y) = c (1 − |y|²)³` on the unit ball of `R^{2n}`, unit
//! mass, and `ρ_r(y) = r^{−2n} ρ(y/r)`. Its Fourier transform is radial and is
//! obtained from the one-dimensional marginal
//! `P(t) ∝ (1 − t²)^{3 + (2n−1)/2}` by quadrature:
//! `ρ̂(ξ) = ∫ P(t) cos(ξ t) dt`.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moduli::ModulusOfContinuity;
use crate::torus::{gradient, Domain, ScalarField, Spectrum};

const QUAD_INTERVALS: usize = 4096;

fn simpson<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut acc = g(a) + g(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn marginal_exponent(n: usize) -> f64 {
    3.0 + (2 * n - 1) as f64 / 2.0
}

/// Simpson weights times the marginal `P` on `[0, 1]`, normalized to unit mass.
fn marginal_weights(n: usize) -> Vec<f64> {
    let e = marginal_exponent(n);
    let h = 1.0 / QUAD_INTERVALS as f64;
    let mut w: Vec<f64> = (0..=QUAD_INTERVALS)
        .map(|i| {
            let t = i as f64 * h;
            let simpson = if i == 0 || i == QUAD_INTERVALS {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            simpson * (1.0 - t * t).max(0.0).powf(e)
        })
        .collect();
    let mass: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= mass);
    w
}

fn transform_with(weights: &[f64], xi: f64) -> f64 {
    if xi == 0.0 {
        return 1.0;
    }
    // cos(ξ t_i) by rotation recurrence along the uniform nodes.
    let step = Complex64::from_polar(1.0, xi / QUAD_INTERVALS as f64);
    let mut z = Complex64::new(1.0, 0.0);
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        if i % 256 == 0 {
            z = Complex64::from_polar(1.0, xi * i as f64 / QUAD_INTERVALS as f64);
        }
        acc += w * z.re;
        z *= step;
    }
    acc
}

/// `ρ̂(ξ)` for the unit-radius kernel in `R^{2n}`.
pub fn kernel_transform(n: usize, xi: f64) -> f64 {
    transform_with(&marginal_weights(n), xi)
}

/// `K_ρ = ∫ |∇ρ|`, so that `sup |∇(f ∗ ρ_r)| ≤ K_ρ sup|f| / r`.
pub fn gradient_mass(n: usize) -> f64 {
    let d = (2 * n) as i32;
    let num = simpson(|s| (1.0 - s * s).powi(2) * s.powi(d), 0.0, 1.0, QUAD_INTERVALS);
    let den = simpson(|s| (1.0 - s * s).powi(3) * s.powi(d - 1), 0.0, 1.0, QUAD_INTERVALS);
    6.0 * num / den
}

fn check_radius(domain: &Domain, r: f64) -> Result<()> {
    if !(r < 0.5) {
        return Err(Error::KernelWraps { r });
    }
    if !(r >= 4.0 * domain.spacing()) {
        return Err(Error::KernelUnresolved {
            r,
            spacing: domain.spacing(),
        });
    }
    Ok(())
}

/// Multiplier table indexed by `|k|²`, cached per domain and radius.
fn multiplier(domain: &Domain, r: f64) -> Arc<Vec<f64>> {
    let key = r.to_bits();
    let mut cache = domain.kernel_cache.lock().expect("kernel cache poisoned");
    cache
        .entry(key)
        .or_insert_with(|| {
            let half = domain.resolution() / 2;
            let max = domain.real_dims() * half * half;
            let weights = marginal_weights(domain.n());
            Arc::new(
                (0..=max)
                    .into_par_iter()
                    .map(|m| transform_with(&weights, 2.0 * PI * r * (m as f64).sqrt()))
                    .collect(),
            )
        })
        .clone()
}

/// Fourier multiplier `γ(r)` acting on the mode with integer wavevector `k`.
pub fn multiplier_for(domain: &Domain, r: f64, k_norm_sq: usize) -> Result<f64> {
    check_radius(domain, r)?;
    multiplier(domain, r)
        .get(k_norm_sq)
        .copied()
        .ok_or_else(|| Error::InvalidParameter("wavevector outside the grid".into()))
}

pub fn mollify(f: &ScalarField, r: f64) -> Result<ScalarField> {
    let domain = f.domain();
    check_radius(domain, r)?;
    let table = multiplier(domain, r);
    let v = Spectrum::of(f).real_one(|m| Complex64::new(table[m.norm_sq() as usize], 0.0));
    ScalarField::new(domain, v)
}

/// `(F_g, F_b) = (F_r, F − F_r)`.
pub fn decompose(f: &ScalarField, r: f64) -> Result<(ScalarField, ScalarField)> {
    let good = mollify(f, r)?;
    let bad = f.sub(&good)?;
    Ok((good, bad))
}

/// Sup of the Euclidean norm of the real gradient.
pub fn sup_real_gradient(f: &ScalarField) -> f64 {
    // For real f, Σ_a (∂_a f)² = 4 Σ_α |∂_{z_α} f|².
    2.0 * gradient(f).norm_squared().sup().max(0.0).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifyReport {
    pub radii: Vec<f64>,
    /// `r · sup |∇F_r|`.
    pub grad_products: Vec<f64>,
    /// `sup |F − F_r| / (ω(r) + r)`.
    pub diff_ratios: Vec<f64>,
    /// Radii skipped because the kernel is not resolved by the grid.
    pub unresolved: Vec<f64>,
    /// `K_ρ`.
    pub kernel_constant: f64,
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

impl MollifyReport {
    /// `max / min` of the gradient products.
    pub fn grad_spread(&self) -> f64 {
        spread(&self.grad_products)
    }

    /// `max / min` of the difference ratios.
    pub fn diff_spread(&self) -> f64 {
        spread(&self.diff_ratios)
    }

    /// CSV with header `r,grad_product,diff_ratio`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "grad_product", "diff_ratio"])?;
        for i in 0..self.radii.len() {
            w.write_record([
                format!("{:e}", self.radii[i]),
                format!("{:e}", self.grad_products[i]),
                format!("{:e}", self.diff_ratios[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

pub fn verify_bounds(
    f: &ScalarField,
    m: &ModulusOfContinuity,
    radii: &[f64],
) -> Result<MollifyReport> {
    let domain = f.domain();
    let mut report = MollifyReport {
        radii: Vec::new(),
        grad_products: Vec::new(),
        diff_ratios: Vec::new(),
        unresolved: Vec::new(),
        kernel_constant: gradient_mass(domain.n()),
    };
    for &r in radii {
        match check_radius(domain, r) {
            Err(Error::KernelUnresolved { .. }) => {
                report.unresolved.push(r);
                continue;
            }
            Err(e) => return Err(e),
            Ok(()) => {}
        }
        let (good, bad) = decompose(f, r)?;
        report.radii.push(r);
        report.grad_products.push(r * sup_real_gradient(&good));
        report.diff_ratios.push(bad.sup_abs() / (m.eval(r)? + r));
    }
    Ok(report)
}
