//! Measurements on computed solutions: gradient norms, exponential moments,
//! the Bochner identity, the pointwise differential inequality for
//! `u = e^H (|∇φ|² + K)`, Skoda-type integrals and the companion comparison.
//!
//! Conventions: `|∇φ|² = Σ_α |φ_α|²` with `φ_α = ∂_{z_α} φ`; for
//! `M = I + φ_{αβ̄}`, `Δ_φ h = tr(M⁻¹ h_{αβ̄})`, `tr_φ g = tr M⁻¹` and
//! `|∇_φ φ|²_φ = φ̄ᵀ M⁻¹ φ`.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian;
use crate::solver::residual;
use crate::sum;
use crate::torus::{
    complex_hessian, ensure_same, gradient, holomorphic_hessian, integrate, ScalarField,
};

/// Constants of the estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSet {
    #[serde(rename = "C")]
    pub c: f64,
    pub delta: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub c4: f64,
    /// Curvature constant, zero on the flat torus.
    #[serde(rename = "C0")]
    pub c0: f64,
    pub chi: f64,
    pub eps: f64,
    pub alpha0: f64,
    pub q: f64,
}

/// Optional user overrides of auto-derived parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub delta: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub c4: Option<f64>,
    pub chi: Option<f64>,
    pub eps: Option<f64>,
    pub alpha0: Option<f64>,
    pub q: Option<f64>,
}

fn centered(phi: &ScalarField) -> ScalarField {
    phi.add_constant(-integrate(phi))
}

impl ParamSet {
    /// Parameters derived from `φ` (re-centered to mean zero) and `F`:
    /// `C = 10 e^{sup F}`, so `(C/4) e^{−sup F} = 2.5`; `δ = C / (4 sup|φ|)`,
    /// so `2δ sup|φ| = C/2`; `K = 2n + 1`.
    pub fn auto(phi: &ScalarField, f: &ScalarField) -> Self {
        let n = phi.domain().n();
        let c = 10.0 * f.sup().exp();
        let sup_phi = centered(phi).sup_abs();
        let delta = if sup_phi > 0.0 { c / (4.0 * sup_phi) } else { c / 4.0 };
        Self {
            c,
            delta,
            k: (2 * n + 1) as f64,
            c4: 1.0,
            c0: 0.0,
            chi: (2 * n) as f64 / (2 * n - 1) as f64,
            eps: 0.25,
            alpha0: 1.0,
            q: 9.0,
        }
    }

    pub fn with_overrides(mut self, o: &ParamOverrides) -> Self {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut self.c, o.c);
        set(&mut self.delta, o.delta);
        set(&mut self.k, o.k);
        set(&mut self.c4, o.c4);
        set(&mut self.chi, o.chi);
        set(&mut self.eps, o.eps);
        set(&mut self.alpha0, o.alpha0);
        set(&mut self.q, o.q);
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let positive = [
            ("C", self.c),
            ("delta", self.delta),
            ("c4", self.c4),
            ("alpha0", self.alpha0),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if !(self.k > (2 * n) as f64) {
            return Err(Error::OutOfRange {
                what: "K",
                value: self.k,
                expected: "K > 2n",
            });
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(Error::OutOfRange {
                what: "eps",
                value: self.eps,
                expected: "(0, 1/2)",
            });
        }
        if !(self.c0 >= 0.0 && self.chi > 1.0 && self.q >= 1.0) {
            return Err(Error::InvalidParameter(
                "need C0 >= 0, chi > 1 and q >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Volume form for [`grad_lp`].
#[derive(Clone, Copy, Debug)]
pub enum Weight<'a> {
    Background,
    /// `e^F ω₀ⁿ`, the volume of the solution metric.
    Ma(&'a ScalarField),
}

/// `(∫ |∇φ|^p dvol)^{1/p}`.
pub fn grad_lp(phi: &ScalarField, p: f64, weight: Weight<'_>) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::OutOfRange {
            what: "p",
            value: p,
            expected: "p >= 1",
        });
    }
    let g2 = gradient(phi).norm_squared();
    let v = g2.values();
    let total = match weight {
        Weight::Background => sum::mean(&v.iter().map(|x| x.powf(0.5 * p)).collect::<Vec<_>>()),
        Weight::Ma(f) => {
            ensure_same(phi.domain(), f.domain())?;
            let fv = f.values();
            sum::sum_by(v.len(), |i| v[i].powf(0.5 * p) * fv[i].exp()) / v.len() as f64
        }
    };
    Ok(total.powf(1.0 / p))
}

/// `∫ exp(ε |∇φ|²)`.
pub fn exp_moment(phi: &ScalarField, eps: f64) -> Result<f64> {
    let g2 = gradient(phi).norm_squared();
    let top = eps * g2.sup();
    if top > 300.0 {
        return Err(Error::Overflow {
            what: "eps sup|grad phi|^2",
            value: top,
            limit: 300.0,
        });
    }
    Ok(integrate(&g2.map(|v| (eps * v).exp())?))
}

/// Envelope `m_k ≤ c₂ L^k k^k` of the moments `m_k = ∫ (|∇φ|² + K)^k e^F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentFit {
    pub c2: f64,
    #[serde(rename = "L")]
    pub l: f64,
    /// `(k, m_k)`.
    pub moments: Vec<(u32, f64)>,
    /// `log m_k − k log k` minus the least-squares line.
    pub residuals: Vec<f64>,
}

pub fn moment_fit(phi: &ScalarField, f: &ScalarField, k: f64, kmax: u32) -> Result<MomentFit> {
    ensure_same(phi.domain(), f.domain())?;
    if kmax < 4 {
        return Err(Error::InvalidParameter("kmax must be at least 4".into()));
    }
    let g2 = gradient(phi).norm_squared();
    let (gv, fv) = (g2.values(), f.values());
    let moments: Vec<(u32, f64)> = (1..=kmax)
        .map(|j| {
            let m = sum::sum_by(gv.len(), |i| (gv[i] + k).powi(j as i32) * fv[i].exp())
                / gv.len() as f64;
            (j, m)
        })
        .collect();
    if moments.iter().any(|(_, m)| !(m.is_finite() && *m > 0.0)) {
        return Err(Error::NonFinite("moments"));
    }
    let ys: Vec<(f64, f64)> = moments
        .iter()
        .map(|&(j, m)| {
            let j = j as f64;
            (j, m.ln() - j * j.ln())
        })
        .collect();
    let cnt = ys.len() as f64;
    let xbar = ys.iter().map(|p| p.0).sum::<f64>() / cnt;
    let ybar = ys.iter().map(|p| p.1).sum::<f64>() / cnt;
    let sxy: f64 = ys.iter().map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let sxx: f64 = ys.iter().map(|(x, _)| (x - xbar).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let residuals: Vec<f64> = ys.iter().map(|(x, y)| y - (intercept + slope * x)).collect();
    let lift = ys
        .iter()
        .map(|(x, y)| y - slope * x)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(MomentFit {
        c2: lift.exp(),
        l: slope.exp(),
        moments,
        residuals,
    })
}

fn require_solution(phi: &ScalarField, f: &ScalarField, c: f64) -> Result<()> {
    let res = residual(phi, &f.add_constant(c))?.sup_abs();
    if !(res <= 1e-9) {
        return Err(Error::NotASolution { residual: res });
    }
    Ok(())
}

/// Inverse metric `M⁻¹`, point-major; errors if `M` is not positive.
fn inverse_metric(phi: &ScalarField) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = phi.domain().n();
    let nn = n * n;
    let hess = complex_hessian(phi);
    let mut minv = vec![Complex64::default(); hess.values().len()];
    let lam = minv
        .par_chunks_mut(nn)
        .zip(hess.values().par_chunks(nn))
        .map(|(out, h)| {
            let mut m = [Complex64::default(); 16];
            hermitian::shifted_identity(h, n, &mut m);
            hermitian::inverse(&m, n, out);
            hermitian::min_eigenvalue(&m, n)
        })
        .reduce(|| f64::INFINITY, f64::min);
    if !(lam > 0.0) {
        return Err(Error::NotPositive { min_eig: lam });
    }
    Ok((minv, hess.values().to_vec()))
}

/// Both sides of the flat Bochner identity and their mismatch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BochnerReport {
    /// `sup |LHS − RHS|`.
    pub mismatch: f64,
    /// Largest pointwise magnitude among the assembled terms.
    pub scale: f64,
}

impl BochnerReport {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.mismatch / self.scale
        } else {
            self.mismatch
        }
    }
}

/// `Δ_φ |∇φ|²` against `2 Re Σ F_α φ̄_α + tr(M⁻¹ P P̄) + tr(M⁻¹ Q Q)`,
/// with `P = (φ_{αβ})` and `Q = (φ_{αβ̄})`.
///
/// `compat_shift` is the constant `c` of a computed solution of
/// `det M = e^{F + c}` (zero for exact pairs).
pub fn check_bochner(phi: &ScalarField, f: &ScalarField, compat_shift: f64) -> Result<BochnerReport> {
    ensure_same(phi.domain(), f.domain())?;
    require_solution(phi, f, compat_shift)?;
    let n = phi.domain().n();
    let nn = n * n;
    let (minv, q) = inverse_metric(phi)?;
    let grad_phi = gradient(phi);
    let grad_f = gradient(f);
    let lhs_hess = complex_hessian(&grad_phi.norm_squared());
    let p = holomorphic_hessian(phi);
    let len = phi.len();
    let stats: Vec<(f64, f64)> = (0..len)
        .into_par_iter()
        .map(|i| {
            let mi = &minv[i * nn..(i + 1) * nn];
            let lhs = hermitian::trace_product(mi, lhs_hess.at(i), n).re;
            let cross: f64 = grad_f
                .at(i)
                .iter()
                .zip(grad_phi.at(i))
                .map(|(fa, pa)| 2.0 * (fa * pa.conj()).re)
                .sum();
            let pi = p.at(i);
            let pbar: Vec<Complex64> = pi.iter().map(|z| z.conj()).collect();
            let mut pp = [Complex64::default(); 16];
            hermitian::matmul(pi, &pbar, n, &mut pp);
            let qi = &q[i * nn..(i + 1) * nn];
            let mut qq = [Complex64::default(); 16];
            hermitian::matmul(qi, qi, n, &mut qq);
            let t_p = hermitian::trace_product(mi, &pp, n).re;
            let t_q = hermitian::trace_product(mi, &qq, n).re;
            let rhs = cross + t_p + t_q;
            let scale = lhs.abs().max(cross.abs()).max(t_p.abs()).max(t_q.abs());
            ((lhs - rhs).abs(), scale)
        })
        .collect();
    Ok(BochnerReport {
        mismatch: sum::max_by(len, |i| stats[i].0),
        scale: sum::max_by(len, |i| stats[i].1),
    })
}

/// Result of the pointwise differential-inequality check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffIneqReport {
    /// `min (LHS − RHS)` over the grid.
    pub min_slack: f64,
    /// Largest pointwise magnitude among LHS and the six RHS terms.
    pub term_scale: f64,
    pub params: ParamSet,
}

impl DiffIneqReport {
    pub fn relative(&self) -> f64 {
        self.min_slack / self.term_scale
    }
}

/// Evaluates `Δ_φ u − RHS` for `u = e^H (|∇φ|² + K)`, `H = −Cφ + δφ²`, where
///
/// `RHS = (C/4) tr_φ g · u + 2δ e^H |∇_φ φ|²_φ |∇φ|² + e^H (n + Δφ)
///      + 2 e^H Re Σ F_α φ̄_α − (1 + 4.5C) u + e^H (C²K/4) |∇_φ φ|²_φ`.
///
/// `φ` is re-centered to mean zero before `H` is formed.
pub fn check_diff_ineq(
    phi: &ScalarField,
    f: &ScalarField,
    params: &ParamSet,
    compat_shift: f64,
) -> Result<DiffIneqReport> {
    ensure_same(phi.domain(), f.domain())?;
    let n = phi.domain().n();
    params.validate(n)?;
    require_solution(phi, f, compat_shift)?;
    let phi = centered(phi);
    let nn = n * n;
    let (minv, q) = inverse_metric(&phi)?;
    let grad_phi = gradient(&phi);
    let grad_f = gradient(f);
    let g2 = grad_phi.norm_squared();
    let (c, delta, k) = (params.c, params.delta, params.k);
    let h: Vec<f64> = phi.values().iter().map(|&v| -c * v + delta * v * v).collect();
    let u = ScalarField::new(
        phi.domain(),
        h.iter()
            .zip(g2.values())
            .map(|(hv, gv)| hv.exp() * (gv + k))
            .collect(),
    )?;
    let u_hess = complex_hessian(&u);
    let len = phi.len();
    let stats: Vec<(f64, f64)> = (0..len)
        .into_par_iter()
        .map(|i| {
            let mi = &minv[i * nn..(i + 1) * nn];
            let lhs = hermitian::trace_product(mi, u_hess.at(i), n).re;
            let eh = h[i].exp();
            let ui = u.values()[i];
            let gp = grad_phi.at(i);
            let tr_inv = hermitian::trace(mi, n);
            let mut grad_phi_phi = 0.0;
            for a in 0..n {
                for b in 0..n {
                    grad_phi_phi += (gp[a].conj() * mi[a * n + b] * gp[b]).re;
                }
            }
            let tr_m = n as f64 + hermitian::trace(&q[i * nn..(i + 1) * nn], n);
            let cross: f64 = grad_f
                .at(i)
                .iter()
                .zip(gp)
                .map(|(fa, pa)| (fa * pa.conj()).re)
                .sum();
            let terms = [
                0.25 * c * tr_inv * ui,
                2.0 * delta * eh * grad_phi_phi * g2.values()[i],
                eh * tr_m,
                2.0 * eh * cross,
                -(1.0 + 4.5 * c) * ui,
                eh * 0.25 * c * c * k * grad_phi_phi,
            ];
            let rhs: f64 = terms.iter().sum();
            let scale = terms.iter().fold(lhs.abs(), |acc, t| acc.max(t.abs()));
            (lhs - rhs, scale)
        })
        .collect();
    Ok(DiffIneqReport {
        min_slack: sum::min_by(len, |i| stats[i].0),
        term_scale: sum::max_by(len, |i| stats[i].1),
        params: params.clone(),
    })
}

/// `∫ e^{−p(φ − sup φ)}`.
pub fn skoda(phi: &ScalarField, p: f64) -> Result<f64> {
    let top = phi.sup();
    let exponent = p * (top - phi.inf());
    if exponent > 300.0 {
        return Err(Error::Overflow {
            what: "p osc(phi)",
            value: exponent,
            limit: 300.0,
        });
    }
    Ok(integrate(&phi.map(|v| (-p * (v - top)).exp())?))
}

/// `min (φ − ε ψ)` for sup-normalized `φ, ψ`.
pub fn compare_companion(phi: &ScalarField, psi: &ScalarField, eps: f64) -> Result<f64> {
    ensure_same(phi.domain(), psi.domain())?;
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::OutOfRange {
            what: "eps",
            value: eps,
            expected: "[0, 1/2)",
        });
    }
    if phi.sup().abs() > 1e-12 || psi.sup().abs() > 1e-12 {
        return Err(Error::InvalidParameter(
            "both potentials must be normalized to sup = 0".into(),
        ));
    }
    Ok(phi.zip_with(psi, |a, b| a - eps * b)?.inf())
}

/// Measured estimate quantities for one solution.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    /// `(p, ||∇φ||_{L^p})`.
    pub lp_ladder: Vec<(f64, f64)>,
    /// `(ε, ∫ exp(ε|∇φ|²))`.
    pub exp_moments: Vec<(f64, f64)>,
    pub moment_fit: Option<MomentFit>,
    pub bochner_mismatch: Option<f64>,
    pub diff_ineq_slack: Option<f64>,
    /// `(p, ∫ e^{−p(φ − sup φ)})`.
    pub skoda: Vec<(f64, f64)>,
    pub companion_min: Option<f64>,
}

impl EstimateReport {
    /// CSV with header `p,lp_norm`.
    pub fn write_ladder_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["p", "lp_norm"])?;
        for (p, v) in &self.lp_ladder {
            w.write_record([format!("{p:e}"), format!("{v:e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    /// CSV with header `p,skoda_integral`.
    pub fn write_skoda_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["p", "skoda_integral"])?;
        for (p, v) in &self.skoda {
            w.write_record([format!("{p:e}"), format!("{v:e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}
