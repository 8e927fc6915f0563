//! Solvers for `det(I + φ_{αβ̄}) = e^F` with mean-zero `φ`.
//!
//! For `n = 1` the equation is linear and is solved by one Fourier division.
//! In general a damped Newton iteration runs on
//! `G(φ, c) = log det(I + φ_{αβ̄}) − F − c`, where the scalar `c` absorbs the
//! one-dimensional cokernel of the linearization (it vanishes for compatible
//! data up to discretization error and is reported as `compat_shift`).
//! The Newton system `Δ_φ ψ − dc = −G`, with `Δ_φ ψ = tr((I + φ_{αβ̄})⁻¹ ψ_{αβ̄})`,
//! is solved by BiCGSTAB after the substitution `ψ = Δ⁻¹(v − v̄)`, `dc = −v̄`,
//! which turns the flat metric into the identity operator.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian;
use crate::rhs::normalize_rhs;
use crate::sum;
use crate::torus::{
    complex_hessian, complex_hessian_translated, ensure_same, integrate, invert_laplacian,
    min_eigenvalue, Domain, ScalarField, Spectrum,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Target for `sup |det(I + φ_{αβ̄}) − e^{F+c}|`.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Step reduction factor of the backtracking line search.
    pub damping: f64,
    pub min_step: f64,
    /// Smallest eigenvalue of `I + φ_{αβ̄}` accepted for an iterate.
    pub positivity_margin: f64,
    /// Relative residual target of the inner Krylov solve.
    pub krylov_tol: f64,
    pub max_krylov: usize,
    /// Number of homotopy stages `F_t = normalize(t F)`, `t = 1/k, ..., 1`.
    pub continuation_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            max_newton: 50,
            damping: 0.5,
            min_step: 2f64.powi(-20),
            positivity_margin: 1e-3,
            krylov_tol: 1e-12,
            max_krylov: 300,
            continuation_steps: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("newton_tol", self.newton_tol),
            ("min_step", self.min_step),
            ("positivity_margin", self.positivity_margin),
            ("krylov_tol", self.krylov_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::OutOfRange {
                what: "damping",
                value: self.damping,
                expected: "(0, 1)",
            });
        }
        if self.max_newton == 0 || self.max_krylov == 0 || self.continuation_steps == 0 {
            return Err(Error::InvalidParameter(
                "iteration counts must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// Mean-zero solution.
    pub phi: ScalarField,
    /// `sup |det(I + φ_{αβ̄}) − e^{F + compat_shift}|`.
    pub residual_sup: f64,
    pub newton_iters: usize,
    /// Minimum over the grid of the smallest eigenvalue of `I + φ_{αβ̄}`.
    pub min_eig_final: f64,
    /// Seconds.
    pub wall_time: f64,
    pub compat_shift: f64,
    /// Residual sup-norm of every accepted iterate, starting with the initial one.
    pub history: Vec<f64>,
}

/// Scalar part of a [`SolveReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub residual_sup: f64,
    pub newton_iters: usize,
    pub min_eig_final: f64,
    pub wall_time: f64,
    pub compat_shift: f64,
    pub history: Vec<f64>,
}

impl SolveReport {
    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            residual_sup: self.residual_sup,
            newton_iters: self.newton_iters,
            min_eig_final: self.min_eig_final,
            wall_time: self.wall_time,
            compat_shift: self.compat_shift,
            history: self.history.clone(),
        }
    }
}

/// Pointwise `det(I + φ_{αβ̄}) − e^F`.
pub fn residual(phi: &ScalarField, f: &ScalarField) -> Result<ScalarField> {
    ensure_same(phi.domain(), f.domain())?;
    complex_hessian(phi).det_shifted().zip_with(f, |d, fv| d - fv.exp())
}

/// `sup |det(I + φ_{αβ̄}) − e^F|` on the grid refined `2×` per axis.
///
/// The refined grid is the union of the `2^{2n}` half-cell translates of the
/// base grid; `f_at(shift)` must return `F` sampled on the translate.
pub fn refined_residual<G>(phi: &ScalarField, f_at: G) -> Result<f64>
where
    G: Fn(&[f64]) -> Result<ScalarField>,
{
    let domain = phi.domain();
    let dims = domain.real_dims();
    let half = 0.5 * domain.spacing();
    let mut worst: f64 = 0.0;
    for mask in 0..(1usize << dims) {
        let shift: Vec<f64> = (0..dims)
            .map(|a| if mask >> a & 1 == 1 { half } else { 0.0 })
            .collect();
        let f = f_at(&shift)?;
        ensure_same(domain, f.domain())?;
        let det = complex_hessian_translated(phi, &shift).det_shifted();
        let r = sum::max_by(det.len(), |i| (det.values()[i] - f.values()[i].exp()).abs());
        worst = worst.max(r);
    }
    Ok(worst)
}

fn check_rhs(f: &ScalarField) -> Result<()> {
    let sup = f.sup_abs();
    if sup > 300.0 {
        return Err(Error::Overflow {
            what: "sup |F|",
            value: sup,
            limit: 300.0,
        });
    }
    let mass = integrate(&f.map(f64::exp)?);
    if (mass - 1.0).abs() > 1e-10 {
        return Err(Error::Compatibility { integral: mass });
    }
    Ok(())
}

/// Exact solve for `n = 1`: `φ = Δ⁻¹(e^F − 1)`.
pub fn solve_n1(f: &ScalarField) -> Result<SolveReport> {
    let start = Instant::now();
    if f.domain().n() != 1 {
        return Err(Error::InvalidParameter("solve_n1 requires n = 1".into()));
    }
    check_rhs(f)?;
    let phi = invert_laplacian(&f.map(|v| v.exp() - 1.0)?);
    let hess = complex_hessian(&phi);
    let res = residual(&phi, f)?.sup_abs();
    Ok(SolveReport {
        min_eig_final: min_eigenvalue(&hess),
        phi,
        residual_sup: res,
        newton_iters: 0,
        wall_time: start.elapsed().as_secs_f64(),
        compat_shift: 0.0,
        history: vec![res],
    })
}

struct State {
    phi: Vec<f64>,
    c: f64,
    res_sup: f64,
    min_eig: f64,
    /// `−G` at every point.
    rhs: Vec<f64>,
    /// `(I + φ_{αβ̄})⁻¹`, point-major.
    minv: Vec<Complex64>,
}

fn evaluate(domain: &Domain, phi: Vec<f64>, f: &[f64], c: f64) -> State {
    let n = domain.n();
    let nn = n * n;
    let len = domain.len();
    let hess = Spectrum::of_values(domain, &phi).complex_hessian(None);
    let mut minv = vec![Complex64::default(); len * nn];
    let mut rhs = vec![0.0; len];
    let mut stats = vec![(0.0, 0.0); len];
    minv.par_chunks_mut(nn)
        .zip(rhs.par_iter_mut())
        .zip(stats.par_iter_mut())
        .enumerate()
        .for_each(|(p, ((mi, g), st))| {
            let mut m = [Complex64::default(); 16];
            hermitian::shifted_identity(&hess[p * nn..(p + 1) * nn], n, &mut m);
            let lam = hermitian::min_eigenvalue(&m, n);
            let det = hermitian::determinant(&m, n).re;
            hermitian::inverse(&m, n, mi);
            *g = if det > 0.0 { f[p] + c - det.ln() } else { f64::INFINITY };
            *st = (lam, (det - (f[p] + c).exp()).abs());
        });
    let min_eig = sum::min_by(len, |i| stats[i].0);
    let res_sup = sum::max_by(len, |i| stats[i].1);
    State {
        phi,
        c,
        res_sup,
        min_eig,
        rhs,
        minv,
    }
}

fn inverse_laplacian_symbol(m: &crate::torus::Mode) -> Complex64 {
    if m.is_zero() {
        Complex64::default()
    } else {
        Complex64::new(1.0 / m.laplacian(), 0.0)
    }
}

/// `v ↦ Δ_φ Δ⁻¹(v − v̄) + v̄`.
fn apply_operator(domain: &Domain, minv: &[Complex64], v: &[f64]) -> Vec<f64> {
    let n = domain.n();
    let nn = n * n;
    let vbar = sum::mean(v);
    let h = Spectrum::of_values(domain, v)
        .map(inverse_laplacian_symbol)
        .complex_hessian(None);
    h.par_chunks(nn)
        .zip(minv.par_chunks(nn))
        .map(|(h, mi)| hermitian::trace_product(mi, h, n).re + vbar)
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    sum::sum_by(a.len(), |i| a[i] * b[i])
}

/// BiCGSTAB from a zero initial guess; returns the best iterate found.
fn bicgstab<A>(apply: A, b: &[f64], tol: f64, max_iter: usize) -> Vec<f64>
where
    A: Fn(&[f64]) -> Vec<f64>,
{
    let len = b.len();
    let mut x = vec![0.0; len];
    let target = tol * dot(b, b).sqrt();
    let mut r = b.to_vec();
    let r0 = b.to_vec();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; len];
    let mut p = vec![0.0; len];
    for _ in 0..max_iter {
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 || !rho_new.is_finite() {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        p.par_iter_mut()
            .zip(r.par_iter().zip(v.par_iter()))
            .for_each(|(pi, (ri, vi))| *pi = ri + beta * (*pi - omega * vi));
        v = apply(&p);
        let denom = dot(&r0, &v);
        if denom == 0.0 {
            break;
        }
        alpha = rho_new / denom;
        let s: Vec<f64> = r.par_iter().zip(v.par_iter()).map(|(ri, vi)| ri - alpha * vi).collect();
        if dot(&s, &s).sqrt() <= target {
            x.par_iter_mut().zip(p.par_iter()).for_each(|(xi, pi)| *xi += alpha * pi);
            break;
        }
        let t = apply(&s);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        x.par_iter_mut()
            .zip(p.par_iter().zip(s.par_iter()))
            .for_each(|(xi, (pi, si))| *xi += alpha * pi + omega * si);
        r.par_iter_mut()
            .zip(s.par_iter().zip(t.par_iter()))
            .for_each(|(ri, (si, ti))| *ri = si - omega * ti);
        if dot(&r, &r).sqrt() <= target || omega == 0.0 {
            break;
        }
        rho = rho_new;
    }
    x
}

enum StepFailure {
    Positivity(f64),
    Stagnation,
}

fn newton(
    domain: &Domain,
    f: &[f64],
    mut state: State,
    cfg: &SolverConfig,
    iters: &mut usize,
    history: &mut Vec<f64>,
    start: Instant,
) -> Result<State> {
    let report = |s: &State, iters: usize, history: &[f64]| SolveReport {
        phi: ScalarField::from_raw(domain, s.phi.clone()),
        residual_sup: s.res_sup,
        newton_iters: iters,
        min_eig_final: s.min_eig,
        wall_time: start.elapsed().as_secs_f64(),
        compat_shift: s.c,
        history: history.to_vec(),
    };
    loop {
        if state.res_sup <= cfg.newton_tol {
            return Ok(state);
        }
        if *iters >= cfg.max_newton {
            return Err(Error::NonConvergence {
                iterations: *iters,
                residual: state.res_sup,
                last: Box::new(report(&state, *iters, history)),
            });
        }
        let v = bicgstab(
            |x| apply_operator(domain, &state.minv, x),
            &state.rhs,
            cfg.krylov_tol,
            cfg.max_krylov,
        );
        let dc = -sum::mean(&v);
        let psi = Spectrum::of_values(domain, &v).real_one(inverse_laplacian_symbol);
        let mut t = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = state
                .phi
                .par_iter()
                .zip(psi.par_iter())
                .map(|(a, b)| a + t * b)
                .collect();
            let next = evaluate(domain, trial, f, state.c + t * dc);
            let failure = if !(next.min_eig >= cfg.positivity_margin) {
                Some(StepFailure::Positivity(next.min_eig))
            } else if !(next.res_sup < state.res_sup) {
                Some(StepFailure::Stagnation)
            } else {
                None
            };
            match failure {
                None => break Ok(next),
                Some(reason) => {
                    t *= cfg.damping;
                    if t < cfg.min_step {
                        break Err(reason);
                    }
                }
            }
        };
        *iters += 1;
        match accepted {
            Ok(next) => {
                state = next;
                history.push(state.res_sup);
            }
            Err(StepFailure::Positivity(min_eig)) => {
                return Err(Error::PositivityBreakdown {
                    iteration: *iters,
                    min_eig,
                    last: Box::new(report(&state, *iters, history)),
                })
            }
            Err(StepFailure::Stagnation) => {
                return Err(Error::NonConvergence {
                    iterations: *iters,
                    residual: state.res_sup,
                    last: Box::new(report(&state, *iters, history)),
                })
            }
        }
    }
}

/// Damped Newton-Krylov solve from `φ = 0`.
pub fn solve(f: &ScalarField, cfg: &SolverConfig) -> Result<SolveReport> {
    let start = Instant::now();
    cfg.validate()?;
    let domain = f.domain().clone();
    if domain.n() > 2 {
        return Err(Error::InvalidParameter(
            "the solver supports n = 1 and n = 2".into(),
        ));
    }
    check_rhs(f)?;
    let mut iters = 0;
    let mut history = Vec::new();
    let mut phi = vec![0.0; domain.len()];
    let mut c = 0.0;
    let mut last = None;
    for stage in 1..=cfg.continuation_steps {
        let target = if stage == cfg.continuation_steps {
            f.clone()
        } else {
            let t = stage as f64 / cfg.continuation_steps as f64;
            normalize_rhs(&f.scaled(t))?
        };
        let state = evaluate(&domain, phi, target.values(), c);
        history.push(state.res_sup);
        let done = newton(
            &domain,
            target.values(),
            state,
            cfg,
            &mut iters,
            &mut history,
            start,
        )?;
        phi = done.phi.clone();
        c = done.c;
        last = Some(done);
    }
    let state = last.expect("at least one continuation stage");
    Ok(SolveReport {
        phi: ScalarField::new(&domain, state.phi)?,
        residual_sup: state.res_sup,
        newton_iters: iters,
        min_eig_final: state.min_eig,
        wall_time: start.elapsed().as_secs_f64(),
        compat_shift: state.c,
        history,
    })
}

/// Monotone map `Φ` of the companion equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case", deny_unknown_fields)]
pub enum CompanionMap {
    /// `Φ(t) = log(e + t)`.
    LogShift,
    /// `Φ(t) = t^s`, `0 < s < 1`.
    Power { s: f64 },
}

impl CompanionMap {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CompanionMap::LogShift => Ok(()),
            CompanionMap::Power { s } if s > 0.0 && s < 1.0 => Ok(()),
            CompanionMap::Power { s } => Err(Error::OutOfRange {
                what: "s",
                value: s,
                expected: "(0, 1)",
            }),
        }
    }

    pub fn apply(&self, t: f64) -> f64 {
        match *self {
            CompanionMap::LogShift => (std::f64::consts::E + t).ln(),
            CompanionMap::Power { s } => t.powf(s),
        }
    }

    /// `log Φ(e^f)`.
    fn log_of_exp(&self, f: f64) -> f64 {
        match *self {
            CompanionMap::LogShift => self.apply(f.exp()).ln(),
            CompanionMap::Power { s } => s * f,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompanionReport {
    /// Solve of `det(I + ψ_{αβ̄}) = e^F Φ(e^F) / A`, mean-zero `ψ`.
    pub report: SolveReport,
    /// `A = ∫ e^F Φ(e^F)`.
    pub a: f64,
    /// `log(e^F Φ(e^F) / A)`.
    pub rhs: ScalarField,
    /// `ψ − sup ψ`.
    pub psi_normalized: ScalarField,
}

/// Right-hand side `log(e^F Φ(e^F) / A)` and the constant `A`.
pub fn companion_rhs(f: &ScalarField, map: CompanionMap) -> Result<(ScalarField, f64)> {
    map.validate()?;
    let a = integrate(&f.map(|v| v.exp() * map.apply(v.exp()))?);
    let log_a = a.ln();
    Ok((f.map(|v| v + map.log_of_exp(v) - log_a)?, a))
}

pub fn companion_psi(
    f: &ScalarField,
    map: CompanionMap,
    cfg: &SolverConfig,
) -> Result<CompanionReport> {
    let (rhs, a) = companion_rhs(f, map)?;
    let report = if f.domain().n() == 1 {
        solve_n1(&rhs)?
    } else {
        solve(&rhs, cfg)?
    };
    let psi_normalized = report.phi.add_constant(-report.phi.sup());
    Ok(CompanionReport {
        report,
        a,
        rhs,
        psi_normalized,
    })
}
