//! The singular solution `u = n^{2/n} ρ |z_n|^{2/n}`, `ρ = 1 + Σ_{i<n} |z_i|²`,
//! of `det u_{ij̄} = 1` away from `{z_n = 0}`.
//!
//! With `a = n^{2/n}`, `s = 1/n`, `w = z_n`:
//!
//! ```text
//! u_{ij̄} = a |w|^{2s} δ_ij                 (i, j < n)
//! u_{in̄} = a s z̄_i w |w|^{2s−2}            (i < n)
//! u_{nn̄} = a s² ρ |w|^{2s−2}
//! ∂u/∂w  = a s ρ w̄ |w|^{2s−2}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PogorelovPoint {
    n: usize,
    z: Vec<Complex64>,
}

impl PogorelovPoint {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        let n = z.len();
        if !(2..=4).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "dimension {n} not in 2..=4"
            )));
        }
        if z[n - 1].norm() == 0.0 {
            return Err(Error::InvalidParameter(
                "point lies on the singular set z_n = 0".into(),
            ));
        }
        Ok(Self { n, z })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    fn parts(&self) -> (f64, f64, f64, Complex64) {
        let n = self.n as f64;
        let a = n.powf(2.0 / n);
        let rho = 1.0 + self.z[..self.n - 1].iter().map(|v| v.norm_sqr()).sum::<f64>();
        (a, 1.0 / n, rho, self.z[self.n - 1])
    }
}

pub fn eval_u(pt: &PogorelovPoint) -> f64 {
    let (a, s, rho, w) = pt.parts();
    a * rho * w.norm_sqr().powf(s)
}

/// Closed-form complex Hessian `u_{ij̄}`, row-major.
pub fn hessian(pt: &PogorelovPoint) -> Vec<Complex64> {
    let n = pt.n;
    let (a, s, rho, w) = pt.parts();
    let r2 = w.norm_sqr();
    let mut h = vec![Complex64::default(); n * n];
    for i in 0..n - 1 {
        h[i * n + i] = Complex64::new(a * r2.powf(s), 0.0);
        let v = a * s * pt.z[i].conj() * w * r2.powf(s - 1.0);
        h[i * n + n - 1] = v;
        h[(n - 1) * n + i] = v.conj();
    }
    h[n * n - 1] = Complex64::new(a * s * s * rho * r2.powf(s - 1.0), 0.0);
    h
}

/// `|det u_{ij̄} − 1|`.
pub fn det_residual(pt: &PogorelovPoint) -> f64 {
    (hermitian::determinant(&hessian(pt), pt.n) - 1.0).norm()
}

/// `|∂u/∂z_n|`.
pub fn grad_zn(pt: &PogorelovPoint) -> f64 {
    let (a, s, rho, w) = pt.parts();
    a * s * rho * w.norm() * w.norm_sqr().powf(s - 1.0)
}

/// One annulus sample: `sup |∂u/∂z_n|` over `|z_n| ∈ [2^{−k−1}, 2^{−k}]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSample {
    pub k: u32,
    /// Radius where the sampled sup is attained.
    pub radius: f64,
    pub sup_grad: f64,
}

const RADIAL_SAMPLES: usize = 33;
const ANGULAR_SAMPLES: usize = 16;

/// Samples with `z_1 = … = z_{n−1} = 0` on annuli `k = 1..=annuli`.
pub fn gradient_profile(n: usize, annuli: u32) -> Result<Vec<AnnulusSample>> {
    if !(2..=4).contains(&n) || annuli < 4 {
        return Err(Error::InvalidParameter(
            "need 2 <= n <= 4 and at least 4 annuli".into(),
        ));
    }
    (1..=annuli)
        .map(|k| {
            let outer = 2f64.powi(-(k as i32));
            let inner = 0.5 * outer;
            let mut best = AnnulusSample {
                k,
                radius: inner,
                sup_grad: f64::NEG_INFINITY,
            };
            for i in 0..RADIAL_SAMPLES {
                let r = inner + (outer - inner) * i as f64 / (RADIAL_SAMPLES - 1) as f64;
                for j in 0..ANGULAR_SAMPLES {
                    let th = 2.0 * std::f64::consts::PI * j as f64 / ANGULAR_SAMPLES as f64;
                    let mut z = vec![Complex64::default(); n];
                    z[n - 1] = Complex64::from_polar(r, th);
                    let g = grad_zn(&PogorelovPoint::new(z)?);
                    if g > best.sup_grad {
                        best.sup_grad = g;
                        best.radius = r;
                    }
                }
            }
            Ok(best)
        })
        .collect()
}

/// Least-squares slope of `log sup|∂u/∂z_n|` against `log radius`.
pub fn slope(samples: &[AnnulusSample]) -> f64 {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| (s.radius.ln(), s.sup_grad.ln()))
        .collect();
    let m = pts.len() as f64;
    let xbar = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ybar = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - xbar).powi(2)).sum();
    sxy / sxx
}

/// Fitted blow-up exponent of the gradient near `z_n = 0`.
pub fn gradient_exponent(n: usize, annuli: u32) -> Result<f64> {
    Ok(slope(&gradient_profile(n, annuli)?))
}
