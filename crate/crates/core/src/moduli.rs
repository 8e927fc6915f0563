//! Moduli of continuity, the Dini-type integral `∫₀¹ ω²(r)/r dr`, the radius
//! schedule `r_q` used by the Moser iteration and the iteration sum it feeds.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::ScalarField;

/// A continuous, increasing `ω: [0,1] → [0,∞)` with `ω(0) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulusOfContinuity {
    /// `A r^α`
    Hoelder { a: f64, alpha: f64 },
    /// `A (log(e/r))^{-β}`
    LogPower { a: f64, beta: f64 },
    /// `L r`
    Linear { l: f64 },
    /// Piecewise-linear through `(0,0)` and the samples.
    Tabulated(Tabulated),
    /// `ω(r) + r`, the normalization that guarantees `ω(r) ≥ r`.
    Augmented { base: Box<ModulusOfContinuity> },
}

/// Sampled modulus. Radii are strictly increasing; values are nondecreasing,
/// and `strict` records whether they are strictly increasing and positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tabulated {
    r: Vec<f64>,
    omega: Vec<f64>,
    strict: bool,
    #[serde(default)]
    unresolved: Vec<bool>,
}

impl Tabulated {
    pub fn new(r: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        let unresolved = vec![false; r.len()];
        Self::with_flags(r, omega, unresolved)
    }

    pub fn with_flags(r: Vec<f64>, omega: Vec<f64>, unresolved: Vec<bool>) -> Result<Self> {
        if r.is_empty() || r.len() != omega.len() || r.len() != unresolved.len() {
            return Err(Error::InvalidParameter(
                "tabulated modulus needs matching, nonempty columns".into(),
            ));
        }
        if r.iter().chain(&omega).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tabulated modulus"));
        }
        if r[0] <= 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "tabulated radii must be positive and strictly increasing".into(),
            ));
        }
        if omega[0] < 0.0 || omega.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "tabulated values must be nonnegative and nondecreasing".into(),
            ));
        }
        let strict = omega[0] > 0.0 && omega.windows(2).all(|w| w[1] > w[0]);
        Ok(Self {
            r,
            omega,
            strict,
            unresolved,
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.omega
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn unresolved(&self) -> &[bool] {
        &self.unresolved
    }

    fn eval(&self, r: f64) -> f64 {
        let (rs, ws) = (&self.r, &self.omega);
        if r <= rs[0] {
            return ws[0] * r / rs[0];
        }
        let last = rs.len() - 1;
        if r >= rs[last] {
            let slope = if last == 0 {
                ws[0] / rs[0]
            } else {
                (ws[last] - ws[last - 1]) / (rs[last] - rs[last - 1])
            };
            return ws[last] + slope * (r - rs[last]);
        }
        let i = rs.partition_point(|&x| x <= r);
        let (r0, r1, w0, w1) = (rs[i - 1], rs[i], ws[i - 1], ws[i]);
        w0 + (w1 - w0) * (r - r0) / (r1 - r0)
    }

    /// Writes `r,omega` rows with a header line.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["r", "omega"])?;
        for (r, o) in self.r.iter().zip(&self.omega) {
            w.write_record([format!("{r:e}"), format!("{o:e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "omega" {
            return Err(Error::Format("expected header `r,omega`".into()));
        }
        let (mut r, mut omega) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("bad number {s:?}: {e}")))
            };
            r.push(parse(&rec[0])?);
            omega.push(parse(&rec[1])?);
        }
        let t = Self::new(r, omega)?;
        if !t.strict {
            return Err(Error::Format("rows must be strictly increasing".into()));
        }
        Ok(t)
    }
}

/// Outcome of the Dini-type integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum DiniResult {
    Finite(f64),
    Divergent,
}

impl DiniResult {
    pub fn value(self) -> Option<f64> {
        match self {
            DiniResult::Finite(v) => Some(v),
            DiniResult::Divergent => None,
        }
    }
}

impl ModulusOfContinuity {
    pub fn hoelder(a: f64, alpha: f64) -> Result<Self> {
        if !(a > 0.0 && alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("Hoelder({a}, {alpha})")));
        }
        Ok(Self::Hoelder { a, alpha })
    }

    pub fn log_power(a: f64, beta: f64) -> Result<Self> {
        if !(a > 0.0 && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("LogPower({a}, {beta})")));
        }
        Ok(Self::LogPower { a, beta })
    }

    pub fn linear(l: f64) -> Result<Self> {
        if !(l > 0.0) {
            return Err(Error::InvalidParameter(format!("Linear({l})")));
        }
        Ok(Self::Linear { l })
    }

    pub fn augmented(self) -> Self {
        Self::Augmented {
            base: Box::new(self),
        }
    }

    fn raw(&self, r: f64) -> f64 {
        match self {
            Self::Hoelder { a, alpha } => a * r.powf(*alpha),
            Self::LogPower { a, beta } => {
                if r == 0.0 {
                    0.0
                } else {
                    a * (1.0 - r.ln()).powf(-beta)
                }
            }
            Self::Linear { l } => l * r,
            Self::Tabulated(t) => t.eval(r),
            Self::Augmented { base } => base.raw(r) + r,
        }
    }

    /// `ω(r)` for `r ∈ [0,1]`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::OutOfRange {
                what: "r",
                value: r,
                expected: "[0, 1]",
            });
        }
        Ok(self.raw(r))
    }

    /// `ω(1)`, the largest value the inverse accepts.
    pub fn max_value(&self) -> f64 {
        self.raw(1.0)
    }

    /// `ω⁻¹(s)` by bisection; `Saturated` when `s > ω(1)`.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::OutOfRange {
                what: "s",
                value: s,
                expected: "s >= 0",
            });
        }
        let max = self.max_value();
        if s > max {
            return Err(Error::Saturated { s, max });
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..1100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.raw(mid) < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }

    /// `log(1/ω⁻¹(s))`, in closed form where available so that it stays
    /// finite when `ω⁻¹(s)` underflows.
    pub fn log_inverse_recip(&self, s: f64) -> Result<f64> {
        let max = self.max_value();
        if s > max {
            return Err(Error::Saturated { s, max });
        }
        if !(s > 0.0) {
            return Ok(f64::INFINITY);
        }
        Ok(match self {
            Self::Hoelder { a, alpha } => (a / s).ln() / alpha,
            Self::Linear { l } => (l / s).ln(),
            // ω⁻¹(s) = e · exp(-(a/s)^{1/β})
            Self::LogPower { a, beta } => (a / s).powf(1.0 / beta) - 1.0,
            _ => -self.inverse(s)?.ln(),
        }
        .max(0.0))
    }

    /// `∫₀¹ ω²(r)/r dr` via `r = e^{-t}`.
    ///
    /// The transformed integrand `g(t) = ω²(e^{-t})` is integrated by adaptive
    /// Simpson on `[0, T]` with `T = 700`. The tail is modelled as a power of
    /// `1+t`: with `p = -d log g / d log(1+t)` measured between `T/2` and `T`,
    /// the tail is `g(T)(1+T)/(p-1)`. The integral is declared divergent when
    /// `p ≤ 1 + 1e-3` (non-integrable decay) or the tail exceeds `1e6`.
    pub fn dini2(&self) -> DiniResult {
        const T_MAX: f64 = 700.0;
        const TOL: f64 = 1e-10;
        let g = |t: f64| {
            let w = self.raw((-t).exp());
            w * w
        };
        let mut breaks = vec![0.0, 1.0];
        while *breaks.last().unwrap() < T_MAX {
            let next = (2.0 * breaks.last().unwrap()).min(T_MAX);
            breaks.push(next);
        }
        let per = TOL / breaks.len() as f64;
        let body: f64 = breaks
            .windows(2)
            .map(|w| adaptive_simpson(&g, w[0], w[1], per))
            .sum();

        let (g_end, g_mid) = (g(T_MAX), g(T_MAX / 2.0));
        let tail = if g_end == 0.0 {
            0.0
        } else {
            let p = -(g_end / g_mid).ln() / ((1.0 + T_MAX) / (1.0 + T_MAX / 2.0)).ln();
            if p <= 1.0 + 1e-3 {
                return DiniResult::Divergent;
            }
            g_end * (1.0 + T_MAX) / (p - 1.0)
        };
        if !body.is_finite() || tail > 1e6 {
            return DiniResult::Divergent;
        }
        DiniResult::Finite(body + tail)
    }
}

fn simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let fm = g(m);
    ((b - a) / 6.0 * (g(a) + 4.0 * fm + g(b)), fm)
}

/// Adaptive Simpson with absolute tolerance `tol` and Richardson correction.
pub(crate) fn adaptive_simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<G: Fn(f64) -> f64>(
        g: &G,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (g(lm), g(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (g(a), g(b));
    let (whole, fm) = simpson(g, a, b);
    rec(g, a, b, fa, fm, fb, whole, tol, 50)
}

/// `A_q(r) = 1 - 2c₄ω(r) - 2(q-1)c₄²ω²(r)`.
pub fn a_q(m: &ModulusOfContinuity, r: f64, q: f64, c4: f64) -> Result<f64> {
    let w = m.eval(r)?;
    Ok(1.0 - 2.0 * c4 * w - 2.0 * (q - 1.0) * c4 * c4 * w * w)
}

fn rq_level(q: f64, c4: f64) -> f64 {
    1.0 / (c4 * (8.0 * (q - 1.0)).sqrt())
}

fn check_rq_args(q: f64, c4: f64) -> Result<()> {
    if !(q >= 9.0) {
        return Err(Error::OutOfRange {
            what: "q",
            value: q,
            expected: "q >= 9",
        });
    }
    if !(c4 > 0.0) {
        return Err(Error::OutOfRange {
            what: "c4",
            value: c4,
            expected: "c4 > 0",
        });
    }
    Ok(())
}

/// `r_q = sup{0 < r ≤ 1 : c₄ω(r) ≤ 1/√(8(q-1))}`.
pub fn r_q(m: &ModulusOfContinuity, q: f64, c4: f64) -> Result<f64> {
    check_rq_args(q, c4)?;
    let s = rq_level(q, c4);
    if s >= m.max_value() {
        return Ok(1.0);
    }
    m.inverse(s)
}

/// `log(1/r_q)`, finite even when `r_q` underflows.
pub fn log_recip_r_q(m: &ModulusOfContinuity, q: f64, c4: f64) -> Result<f64> {
    check_rq_args(q, c4)?;
    let s = rq_level(q, c4);
    if s >= m.max_value() {
        return Ok(0.0);
    }
    m.log_inverse_recip(s)
}

/// The constant `[2χ^{-1/2}(1-χ^{-1/2})]^{-1}` of the iteration-sum bound.
pub fn iteration_constant(chi: f64) -> f64 {
    let s = chi.powf(-0.5);
    1.0 / (2.0 * s * (1.0 - s))
}

/// Variant that keeps the `1/(4c₄)` scale of the interval bounds:
/// `16c₄²` times [`iteration_constant`].
pub fn iteration_constant_rescaled(chi: f64, c4: f64) -> f64 {
    16.0 * c4 * c4 * iteration_constant(chi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationSum {
    /// First index: smallest `k₀` with `χ^{k₀} > 9.5`.
    pub k0: u32,
    /// `Σ_{k≥k₀} χ^{-k} log(1/r_{χ^k+½})`, `None` when divergent.
    pub sum: Option<f64>,
    /// Partial sums, one per term evaluated.
    pub partial_sums: Vec<f64>,
    pub dini: DiniResult,
    /// `iteration_constant(χ) · dini2`.
    pub bound: Option<f64>,
    /// `iteration_constant_rescaled(χ, c₄) · dini2`.
    pub rescaled_bound: Option<f64>,
    pub holds: bool,
    pub holds_rescaled: bool,
    /// True when `ω(1) < 1` forced the `ω + r` normalization.
    pub normalized: bool,
}

const MAX_TERMS: usize = 20_000;

/// Brute-force evaluation of the Moser iteration sum against its Dini bound.
pub fn iteration_sum(m: &ModulusOfContinuity, chi: f64, c4: f64) -> Result<IterationSum> {
    if !(chi > 1.0) {
        return Err(Error::OutOfRange {
            what: "chi",
            value: chi,
            expected: "chi > 1",
        });
    }
    if !(c4 > 0.0) {
        return Err(Error::OutOfRange {
            what: "c4",
            value: c4,
            expected: "c4 > 0",
        });
    }
    let normalized = m.max_value() < 1.0;
    let owned;
    let m = if normalized {
        owned = m.clone().augmented();
        &owned
    } else {
        m
    };

    let mut k0 = 0u32;
    while chi.powi(k0 as i32) <= 9.5 {
        k0 += 1;
    }

    let mut partial = Vec::new();
    let mut total = 0.0;
    let mut prev_term = f64::INFINITY;
    let mut converged = false;
    for k in k0.. {
        let chik = chi.powi(k as i32);
        if !chik.is_finite() || partial.len() >= MAX_TERMS {
            break;
        }
        let log_r = log_recip_r_q(m, chik + 0.5, c4)?;
        let term = log_r / chik;
        if !term.is_finite() {
            break;
        }
        total += term;
        partial.push(total);
        if log_r > 0.0 && term < 1e-12 && term <= prev_term {
            converged = true;
            break;
        }
        prev_term = term;
    }

    let dini = m.dini2();
    let sum = converged.then_some(total);
    let bound = dini.value().map(|d| iteration_constant(chi) * d);
    let rescaled_bound = dini.value().map(|d| iteration_constant_rescaled(chi, c4) * d);
    let holds = matches!((sum, bound), (Some(s), Some(b)) if s <= b);
    let holds_rescaled = matches!((sum, rescaled_bound), (Some(s), Some(b)) if s <= b);
    Ok(IterationSum {
        k0,
        sum,
        partial_sums: partial,
        dini,
        bound,
        rescaled_bound,
        holds,
        holds_rescaled,
        normalized,
    })
}

/// Empirical modulus of a grid function over the given radii.
///
/// For each radius, the maximum over lattice shifts `s` of flat length `≤ r`
/// of `sup_x |f(x+s) - f(x)|`. Radii below one grid spacing have no shift to
/// test and are flagged unresolved (value 0).
pub fn empirical_modulus(f: &ScalarField, radii: &[f64]) -> Result<Tabulated> {
    if radii.is_empty()
        || radii.windows(2).any(|w| w[1] <= w[0])
        || radii[0] <= 0.0
        || *radii.last().unwrap() > 0.5
    {
        return Err(Error::InvalidParameter(
            "radii must be increasing within (0, 0.5]".into(),
        ));
    }
    let d = f.domain();
    let res = d.resolution() as i64;
    let dims = d.real_dims();
    let h = d.spacing();
    let r_max = *radii.last().unwrap();
    let reach = ((r_max / h).floor() as i64).min(res / 2);

    // Half-space of shifts (first nonzero component positive).
    let mut shifts: Vec<(Vec<i64>, f64)> = Vec::new();
    let side = 2 * reach + 1;
    let total = (side as usize).pow(dims as u32);
    for code in 0..total {
        let mut c = code;
        let mut s = vec![0i64; dims];
        for a in (0..dims).rev() {
            s[a] = (c % side as usize) as i64 - reach;
            c /= side as usize;
        }
        match s.iter().find(|&&v| v != 0) {
            Some(&v) if v > 0 => {}
            _ => continue,
        }
        let len = s.iter().map(|&v| (v as f64 * h).powi(2)).sum::<f64>().sqrt();
        if len <= r_max * (1.0 + 1e-12) {
            shifts.push((s, len));
        }
    }

    let values = f.values();
    let npts = d.len();
    let strides: Vec<usize> = (0..dims)
        .map(|a| (d.resolution()).pow((dims - 1 - a) as u32))
        .collect();
    let diffs: Vec<f64> = shifts
        .par_iter()
        .map(|(s, _)| {
            let mut worst: f64 = 0.0;
            let mut digits = [0usize; 8];
            for p in 0..npts {
                d.digits(p, &mut digits);
                let mut q = 0usize;
                for a in 0..dims {
                    let j = (digits[a] as i64 + s[a]).rem_euclid(res) as usize;
                    q += j * strides[a];
                }
                worst = worst.max((values[q] - values[p]).abs());
            }
            worst
        })
        .collect();

    let mut omega = Vec::with_capacity(radii.len());
    let mut unresolved = Vec::with_capacity(radii.len());
    let mut running = 0.0f64;
    for &r in radii {
        let mut any = false;
        for ((_, len), &dv) in shifts.iter().zip(&diffs) {
            if *len <= r * (1.0 + 1e-12) {
                any = true;
                running = running.max(dv);
            }
        }
        omega.push(running);
        unresolved.push(!any);
    }
    Tabulated::with_flags(radii.to_vec(), omega, unresolved)
}
