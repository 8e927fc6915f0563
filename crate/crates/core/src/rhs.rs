//! Seeded right-hand sides `F` and manufactured solution pairs.
//!
//! # Generator
//!
//! Random draws are counter-based so that any term can be regenerated in
//! isolation, in any language:
//!
//! ```text
//! mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!          z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!          return z ^ (z >> 31)                       (wrapping u64 arithmetic)
//! draw(seed, stream, counter) = mix(seed ^ mix(stream * 0x9E3779B97F4A7C15 + counter + 1))
//! unit(u) = (u >> 11) * 2^-53                          (uniform in [0,1))
//! ```
//!
//! Weierstrass level `j` takes its direction from `draw(seed, 0, j)` and its
//! phase `θ_j = 2π·unit(draw(seed, 1, j))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian;
use crate::torus::{integrate, Domain, HermitianField, ScalarField};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn draw(seed: u64, stream: u64, counter: u64) -> u64 {
    mix64(seed ^ mix64(stream.wrapping_mul(GOLDEN).wrapping_add(counter).wrapping_add(1)))
}

pub fn unit(u: u64) -> f64 {
    (u >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `c · cos(2π k·x + θ)` with an integer wavevector over the `2n` real axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub coef: f64,
    pub k: Vec<i64>,
    #[serde(default)]
    pub phase: f64,
}

impl TrigTerm {
    fn arg(&self, x: &[f64]) -> f64 {
        2.0 * PI * self.k.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum::<f64>() + self.phase
    }
}

/// A trigonometric polynomial, used as an exact potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPotential {
    pub terms: Vec<TrigTerm>,
}

impl TrigPotential {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn cosine(coef: f64, k: Vec<i64>) -> Self {
        Self::new(vec![TrigTerm {
            coef,
            k,
            phase: 0.0,
        }])
    }

    pub fn with_term(mut self, coef: f64, k: Vec<i64>) -> Self {
        self.terms.push(TrigTerm {
            coef,
            k,
            phase: 0.0,
        });
        self
    }

    /// Largest absolute wavenumber component.
    pub fn max_frequency(&self) -> i64 {
        self.terms
            .iter()
            .flat_map(|t| t.k.iter().map(|k| k.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Errors unless every wavevector fits the domain below Nyquist.
    pub fn check(&self, domain: &Domain) -> Result<()> {
        if self.terms.iter().any(|t| t.k.len() != domain.real_dims()) {
            return Err(Error::InvalidParameter(format!(
                "potential wavevectors must have {} components",
                domain.real_dims()
            )));
        }
        if 2 * self.max_frequency() as usize >= domain.resolution() {
            return Err(Error::InvalidParameter(
                "potential frequency at or above Nyquist".into(),
            ));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.coef * t.arg(x).cos()).sum()
    }

    /// Analytic complex Hessian `φ_{αβ̄}` at `x`, written row-major into `out`.
    pub fn complex_hessian_at(&self, n: usize, x: &[f64], out: &mut [Complex64]) {
        out[..n * n].fill(Complex64::default());
        for t in &self.terms {
            let c = -t.coef * (2.0 * PI).powi(2) * t.arg(x).cos();
            for alpha in 0..n {
                for beta in 0..n {
                    let (ka, kb) = (t.k[2 * alpha] as f64, t.k[2 * alpha + 1] as f64);
                    let (kc, kd) = (t.k[2 * beta] as f64, t.k[2 * beta + 1] as f64);
                    out[alpha * n + beta] +=
                        0.25 * c * Complex64::new(ka * kc + kb * kd, ka * kd - kb * kc);
                }
            }
        }
    }

    pub fn field(&self, domain: &Domain) -> Result<ScalarField> {
        self.check(domain)?;
        ScalarField::from_fn(domain, |x| self.eval(x))
    }

    /// Potential sampled on the grid translated by `shift`.
    pub fn field_translated(&self, domain: &Domain, shift: &[f64]) -> Result<ScalarField> {
        self.check(domain)?;
        ScalarField::from_fn(domain, |x| {
            let xs: Vec<f64> = x.iter().zip(shift).map(|(a, b)| a + b).collect();
            self.eval(&xs)
        })
    }

    pub fn hessian_field(&self, domain: &Domain) -> Result<HermitianField> {
        self.check(domain)?;
        let n = domain.n();
        HermitianField::from_fn(domain, |x, m| self.complex_hessian_at(n, x, m))
    }

    /// `log det(I + φ_{αβ̄})` on the grid translated by `shift`.
    pub fn log_det_translated(&self, domain: &Domain, shift: &[f64]) -> Result<ScalarField> {
        self.check(domain)?;
        let n = domain.n();
        let mut worst = f64::INFINITY;
        let mut vals = Vec::with_capacity(domain.len());
        let mut x = vec![0.0; domain.real_dims()];
        let mut h = [Complex64::default(); 16];
        let mut m = [Complex64::default(); 16];
        for p in 0..domain.len() {
            domain.coords(p, &mut x);
            for (xi, s) in x.iter_mut().zip(shift) {
                *xi += s;
            }
            self.complex_hessian_at(n, &x, &mut h);
            hermitian::shifted_identity(&h, n, &mut m);
            worst = worst.min(hermitian::min_eigenvalue(&m, n));
            vals.push(hermitian::determinant(&m, n).re.ln());
        }
        if !(worst > 0.0) {
            return Err(Error::NotPositive { min_eig: worst });
        }
        ScalarField::new(domain, vals)
    }
}

/// Family of right-hand sides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RhsSpec {
    /// `amplitude / m · Σ_{i<m} cos(2π k_i·x)`.
    TrigPoly {
        amplitude: f64,
        frequencies: Vec<Vec<i64>>,
    },
    /// `amplitude · Σ_{j=0..=levels} 2^{-jα} cos(2π m_j·x + θ_j)`.
    Weierstrass {
        alpha: f64,
        levels: u32,
        amplitude: f64,
        seed: u64,
    },
    /// `F = log det(I + φ_{αβ̄})` for the stored potential `φ`.
    Manufactured { potential: TrigPotential },
}

impl RhsSpec {
    /// Bound on `sup|F|` before normalization (`None` for manufactured).
    pub fn sup_bound(&self) -> Option<f64> {
        match self {
            RhsSpec::TrigPoly { amplitude, .. } => Some(amplitude.abs()),
            RhsSpec::Weierstrass {
                alpha,
                levels,
                amplitude,
                ..
            } => Some(
                amplitude.abs()
                    * (0..=*levels)
                        .map(|j| 2f64.powf(-(j as f64) * alpha))
                        .sum::<f64>(),
            ),
            RhsSpec::Manufactured { .. } => None,
        }
    }

    /// The raw field (manufactured: `log det`; others: unnormalized).
    pub fn generate(&self, domain: &Domain) -> Result<ScalarField> {
        match self {
            RhsSpec::TrigPoly {
                amplitude,
                frequencies,
            } => {
                if frequencies.is_empty() {
                    return ScalarField::zeros(domain);
                }
                let pot = TrigPotential::new(
                    frequencies
                        .iter()
                        .map(|k| TrigTerm {
                            coef: amplitude / frequencies.len() as f64,
                            k: k.clone(),
                            phase: 0.0,
                        })
                        .collect(),
                );
                pot.field(domain)
            }
            RhsSpec::Weierstrass {
                alpha,
                levels,
                amplitude,
                seed,
            } => weierstrass(domain, *alpha, *levels, *amplitude, *seed),
            RhsSpec::Manufactured { potential } => Ok(manufactured(domain, potential)?.1),
        }
    }

    /// Normalized right-hand side plus the exact potential when known.
    pub fn build(&self, domain: &Domain) -> Result<(ScalarField, Option<ScalarField>)> {
        match self {
            RhsSpec::Manufactured { potential } => {
                let (phi, f) = manufactured(domain, potential)?;
                Ok((f, Some(phi)))
            }
            _ => Ok((normalize_rhs(&self.generate(domain)?)?, None)),
        }
    }
}

/// Integer directions with `0 < |d|₂ ≤ 4`, in lexicographic order.
fn direction_table(dims: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let side = 9usize;
    for code in 0..side.pow(dims as u32) {
        let mut c = code;
        let mut d = vec![0i64; dims];
        for a in (0..dims).rev() {
            d[a] = (c % side) as i64 - 4;
            c /= side;
        }
        let norm2: i64 = d.iter().map(|v| v * v).sum();
        if norm2 > 0 && norm2 <= 16 {
            out.push(d);
        }
    }
    out
}

/// Wavevector of Weierstrass level `j`: `round(2^j d/|d|)`.
pub fn weierstrass_wavevector(dims: usize, seed: u64, j: u32) -> Vec<i64> {
    let table = direction_table(dims);
    let d = &table[(draw(seed, 0, j as u64) % table.len() as u64) as usize];
    let norm = (d.iter().map(|v| (v * v) as f64).sum::<f64>()).sqrt();
    let scale = 2f64.powi(j as i32) / norm;
    let mut m: Vec<i64> = d.iter().map(|&v| (v as f64 * scale).round() as i64).collect();
    if m.iter().all(|&v| v == 0) {
        let (i, v) = d.iter().enumerate().max_by_key(|(_, v)| v.abs()).unwrap();
        m[i] = v.signum();
    }
    m
}

/// Lacunary cosine series with Hoelder exponent `alpha` on resolved scales.
pub fn weierstrass(
    domain: &Domain,
    alpha: f64,
    levels: u32,
    amplitude: f64,
    seed: u64,
) -> Result<ScalarField> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::OutOfRange {
            what: "alpha",
            value: alpha,
            expected: "(0, 1]",
        });
    }
    if 2usize.saturating_pow(levels) * 2 >= domain.resolution() {
        return Err(Error::InvalidParameter(format!(
            "2^{levels} is not below the Nyquist frequency {}",
            domain.resolution() / 2
        )));
    }
    let dims = domain.real_dims();
    let terms: Vec<TrigTerm> = (0..=levels)
        .map(|j| TrigTerm {
            coef: amplitude * 2f64.powf(-(j as f64) * alpha),
            k: weierstrass_wavevector(dims, seed, j),
            phase: 2.0 * PI * unit(draw(seed, 1, j as u64)),
        })
        .collect();
    TrigPotential::new(terms).field(domain)
}

/// Shifts `f` by `-log ∫ e^f` so that `∫ e^F = 1`.
pub fn normalize_rhs(f: &ScalarField) -> Result<ScalarField> {
    let sup = f.sup();
    if sup > 300.0 {
        return Err(Error::Overflow {
            what: "sup F",
            value: sup,
            limit: 300.0,
        });
    }
    let mass = integrate(&f.map(f64::exp)?);
    if (mass - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Ok(f.clone());
    }
    Ok(f.add_constant(-mass.ln()))
}

/// Exact pair `(φ, F)` with `F = log det(I + φ_{αβ̄})` evaluated from the
/// analytic Hessian of the potential.
pub fn manufactured(domain: &Domain, potential: &TrigPotential) -> Result<(ScalarField, ScalarField)> {
    let zero = vec![0.0; domain.real_dims()];
    let f = potential.log_det_translated(domain, &zero)?;
    Ok((potential.field(domain)?, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{complex_hessian, make_domain, min_eigenvalue};

    #[test]
    fn generator_reference_values() {
        // SplitMix64 finalizer of 0 is 0; of 1 is the published constant.
        assert_eq!(mix64(0), 0);
        assert_eq!(mix64(1), 0x5692_161D_100B_05E5);
        let u = unit(u64::MAX);
        assert!(u < 1.0 && u > 0.999_999);
    }

    #[test]
    fn single_level_is_one_cosine() {
        let d = make_domain(1, 32).unwrap();
        let f = weierstrass(&d, 0.5, 0, 0.7, 11).unwrap();
        assert!((f.sup() - 0.7).abs() < 0.05);
        let k = weierstrass_wavevector(2, 11, 0);
        let theta = 2.0 * PI * unit(draw(11, 1, 0));
        let exact = ScalarField::from_fn(&d, |x| {
            0.7 * (2.0 * PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1]) + theta).cos()
        })
        .unwrap();
        assert!(f.max_abs_diff(&exact).unwrap() < 1e-14);
    }

    #[test]
    fn weierstrass_is_deterministic() {
        let d = make_domain(1, 64).unwrap();
        let a = weierstrass(&d, 0.5, 4, 1.0, 7).unwrap();
        let b = weierstrass(&d, 0.5, 4, 1.0, 7).unwrap();
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert!(weierstrass(&d, 0.5, 4, 1.0, 8).unwrap().max_abs_diff(&a).unwrap() > 1e-3);
    }

    #[test]
    fn weierstrass_rejects_nyquist() {
        let d = make_domain(1, 32).unwrap();
        assert!(weierstrass(&d, 0.5, 4, 1.0, 1).is_err());
        assert!(weierstrass(&d, 0.5, 3, 1.0, 1).is_ok());
    }

    #[test]
    fn wavevector_lengths_double() {
        for j in 0..6 {
            let m = weierstrass_wavevector(4, 3, j);
            let len = (m.iter().map(|v| (v * v) as f64).sum::<f64>()).sqrt();
            let target = 2f64.powi(j as i32);
            assert!(len > 0.0 && (len - target).abs() <= 1.0 + 0.1 * target, "{m:?}");
            assert!(m.iter().all(|v| v.abs() <= 2i64.pow(j)));
        }
    }

    #[test]
    fn normalize_examples() {
        let d = make_domain(1, 64).unwrap();
        let zero = ScalarField::zeros(&d).unwrap();
        assert_eq!(normalize_rhs(&zero).unwrap().sup_abs(), 0.0);
        let c = ScalarField::from_fn(&d, |x| (2.0 * PI * x[0]).cos()).unwrap();
        let n = normalize_rhs(&c).unwrap();
        assert!((integrate(&n.map(f64::exp).unwrap()) - 1.0).abs() < 1e-12);
        let twice = normalize_rhs(&n).unwrap();
        assert!(twice.max_abs_diff(&n).unwrap() < 1e-12);
        let big = ScalarField::constant(&d, 400.0).unwrap();
        assert!(matches!(normalize_rhs(&big), Err(Error::Overflow { .. })));
    }

    #[test]
    fn manufactured_examples() {
        let d = make_domain(1, 64).unwrap();
        let pot = TrigPotential::cosine(-0.5 / (PI * PI), vec![1, 0]);
        let (phi, f) = manufactured(&d, &pot).unwrap();
        let exact = ScalarField::from_fn(&d, |x| (1.0 + 0.5 * (2.0 * PI * x[0]).cos()).ln()).unwrap();
        assert!(f.max_abs_diff(&exact).unwrap() < 1e-14);
        assert!((integrate(&f.map(f64::exp).unwrap()) - 1.0).abs() < 1e-12);
        let h = complex_hessian(&phi);
        assert!((min_eigenvalue(&h) - 0.5).abs() < 1e-12);

        let d2 = make_domain(2, 8).unwrap();
        let pot2 = TrigPotential::cosine(0.05, vec![1, 0, 0, 0]).with_term(0.05, vec![0, 0, 1, 0]);
        let (_, f2) = manufactured(&d2, &pot2).unwrap();
        let e = 0.05 * PI * PI;
        let exact2 = ScalarField::from_fn(&d2, |x| {
            ((1.0 - e * (2.0 * PI * x[0]).cos()) * (1.0 - e * (2.0 * PI * x[2]).cos())).ln()
        })
        .unwrap();
        assert!(f2.max_abs_diff(&exact2).unwrap() < 1e-14);

        let (phi0, f0) = manufactured(&d2, &TrigPotential::zero()).unwrap();
        assert_eq!(phi0.sup_abs(), 0.0);
        assert_eq!(f0.sup_abs(), 0.0);
    }

    #[test]
    fn manufactured_rejects_nonpositive() {
        let d = make_domain(1, 32).unwrap();
        let pot = TrigPotential::cosine(-2.0 / (PI * PI), vec![1, 0]);
        assert!(matches!(manufactured(&d, &pot), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn spec_json_roundtrip() {
        let s = RhsSpec::Weierstrass {
            alpha: 0.5,
            levels: 3,
            amplitude: 0.2,
            seed: 9,
        };
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<RhsSpec>(&json).unwrap(), s);
        assert!(serde_json::from_str::<RhsSpec>(r#"{"kind":"weierstrass","alpha":0.5}"#).is_err());
    }
}
