//! The flat Kähler torus `C^n / Z^{2n}` on a uniform periodic grid.
//!
//! Real axes are ordered `x_1, ..., x_{2n}` with complex coordinates
//! `z_α = x_{2α-1} + i x_{2α}`; storage is row-major with `x_1` slowest.
//! Every axis has period 1, so the torus has unit volume and the integral of a
//! grid function is its mean.
//!
//! Derivatives are computed spectrally:
//! `∂_{z_α} = ½(∂_{x_{2α-1}} - i ∂_{x_{2α}})`, `∂_{z̄_α} = ½(∂_{x_{2α-1}} + i ∂_{x_{2α}})`.
//! Odd derivatives drop the Nyquist mode; pure second derivatives keep it
//! (with wavenumber `N/2`), so the complex Laplacian is invertible on
//! mean-zero fields.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::FftNd;
use crate::hermitian;
use crate::sum;

/// Default allocation cap (grid points) for fields on domains with n > 2.
pub const DEFAULT_FIELD_CAP: usize = 1 << 24;

pub const MAX_COMPLEX_DIM: usize = 4;
const MAX_AXES: usize = 2 * MAX_COMPLEX_DIM;

pub type Domain = Arc<TorusDomain>;

pub struct TorusDomain {
    n: usize,
    resolution: usize,
    field_cap: usize,
    fft: OnceLock<FftNd>,
    pub(crate) kernel_cache: Mutex<HashMap<u64, Arc<Vec<f64>>>>,
}

/// Builds a domain of complex dimension `n` with `resolution` points per real axis.
pub fn make_domain(n: usize, resolution: usize) -> Result<Domain> {
    TorusDomain::with_field_cap(n, resolution, DEFAULT_FIELD_CAP)
}

impl TorusDomain {
    pub fn new(n: usize, resolution: usize) -> Result<Domain> {
        make_domain(n, resolution)
    }

    pub fn with_field_cap(n: usize, resolution: usize, field_cap: usize) -> Result<Domain> {
        if !(1..=MAX_COMPLEX_DIM).contains(&n) {
            return Err(Error::InvalidDomain(format!(
                "complex dimension {n} not in 1..={MAX_COMPLEX_DIM}"
            )));
        }
        if resolution < 8 || !resolution.is_power_of_two() {
            return Err(Error::InvalidDomain(format!(
                "resolution {resolution} is not a power of two >= 8"
            )));
        }
        resolution
            .checked_pow(2 * n as u32)
            .ok_or_else(|| Error::InvalidDomain("grid size overflows".into()))?;
        Ok(Arc::new(Self {
            n,
            resolution,
            field_cap,
            fft: OnceLock::new(),
            kernel_cache: Mutex::new(HashMap::new()),
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn real_dims(&self) -> usize {
        2 * self.n
    }

    /// Total number of grid points, `resolution^(2n)`.
    pub fn len(&self) -> usize {
        self.resolution.pow(2 * self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    pub fn field_cap(&self) -> usize {
        self.field_cap
    }

    pub fn same_grid(&self, other: &TorusDomain) -> bool {
        self.n == other.n && self.resolution == other.resolution
    }

    /// Integer grid coordinates of flat index `idx`, axis 0 first.
    pub fn digits(&self, mut idx: usize, out: &mut [usize]) {
        let dims = self.real_dims();
        for a in (0..dims).rev() {
            out[a] = idx % self.resolution;
            idx /= self.resolution;
        }
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .fold(0, |acc, &d| acc * self.resolution + d % self.resolution)
    }

    /// Physical coordinates in `[0,1)^{2n}` of flat index `idx`.
    pub fn coords(&self, idx: usize, out: &mut [f64]) {
        let mut d = [0usize; MAX_AXES];
        self.digits(idx, &mut d);
        let h = self.spacing();
        for a in 0..self.real_dims() {
            out[a] = d[a] as f64 * h;
        }
    }

    pub(crate) fn check_allocation(&self) -> Result<()> {
        if self.n > 2 && self.len() > self.field_cap {
            return Err(Error::MemoryCap {
                n: self.n,
                points: self.len(),
                cap: self.field_cap,
            });
        }
        Ok(())
    }

    pub(crate) fn fft(&self) -> &FftNd {
        self.fft
            .get_or_init(|| FftNd::new(self.resolution, self.real_dims()))
    }

    fn mode(&self, idx: usize) -> Mode {
        let mut d = [0usize; MAX_AXES];
        self.digits(idx, &mut d);
        let n = self.resolution;
        let half = n / 2;
        let mut mode = Mode {
            k: [0.0; MAX_AXES],
            kt: [0.0; MAX_AXES],
            nyquist: [false; MAX_AXES],
            dims: self.real_dims(),
        };
        for a in 0..self.real_dims() {
            let j = d[a];
            if j == half {
                mode.k[a] = half as f64;
                mode.nyquist[a] = true;
            } else {
                let k = if j < half { j as f64 } else { j as f64 - n as f64 };
                mode.k[a] = k;
                mode.kt[a] = k;
            }
        }
        mode
    }
}

impl fmt::Debug for TorusDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusDomain")
            .field("n", &self.n)
            .field("resolution", &self.resolution)
            .finish()
    }
}

/// Wavenumbers of one Fourier mode.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Mode {
    /// Signed wavenumber; Nyquist reported as `+N/2`.
    k: [f64; MAX_AXES],
    /// Same with the Nyquist entry zeroed (used by odd derivatives).
    kt: [f64; MAX_AXES],
    nyquist: [bool; MAX_AXES],
    dims: usize,
}

impl Mode {
    pub(crate) fn d1(&self, a: usize) -> Complex64 {
        Complex64::new(0.0, 2.0 * PI * self.kt[a])
    }

    pub(crate) fn d2(&self, a: usize, b: usize) -> f64 {
        if a == b {
            -(2.0 * PI * self.k[a]).powi(2)
        } else {
            -(2.0 * PI).powi(2) * self.kt[a] * self.kt[b]
        }
    }

    /// Symbol of the complex Laplacian `Σ_α ∂_α ∂_ᾱ = ¼ Δ_real`.
    pub(crate) fn laplacian(&self) -> f64 {
        0.25 * (0..self.dims).map(|a| self.d2(a, a)).sum::<f64>()
    }

    pub(crate) fn is_zero(&self) -> bool {
        (0..self.dims).all(|a| self.k[a] == 0.0)
    }

    /// Translation by `shift`; a Nyquist mode is treated as a cosine.
    pub(crate) fn translation(&self, shift: &[f64], resolution: usize) -> Complex64 {
        let mut phase = Complex64::new(1.0, 0.0);
        for (a, &s) in shift.iter().enumerate().take(self.dims) {
            if s == 0.0 {
                continue;
            }
            if self.nyquist[a] {
                phase *= (PI * resolution as f64 * s).cos();
            } else {
                phase *= Complex64::from_polar(1.0, 2.0 * PI * self.k[a] * s);
            }
        }
        phase
    }

    pub(crate) fn norm_sq(&self) -> f64 {
        (0..self.dims).map(|a| self.k[a] * self.k[a]).sum()
    }
}

/// Fourier transform of a real grid function (unnormalized forward FFT).
pub(crate) struct Spectrum {
    pub(crate) domain: Domain,
    pub(crate) hat: Vec<Complex64>,
}

impl Spectrum {
    pub(crate) fn of(f: &ScalarField) -> Self {
        Self::of_values(&f.domain, &f.values)
    }

    pub(crate) fn of_values(domain: &Domain, values: &[f64]) -> Self {
        let mut hat: Vec<Complex64> = values.par_iter().map(|&v| Complex64::new(v, 0.0)).collect();
        domain.fft().forward(&mut hat);
        Self {
            domain: domain.clone(),
            hat,
        }
    }

    pub(crate) fn map<S>(&self, sym: S) -> Self
    where
        S: Fn(&Mode) -> Complex64 + Sync,
    {
        let domain = &self.domain;
        let hat = self
            .hat
            .par_iter()
            .enumerate()
            .map(|(i, h)| sym(&domain.mode(i)) * h)
            .collect();
        Self {
            domain: domain.clone(),
            hat,
        }
    }

    /// Applies the real-output operators `a` and `b` in one inverse FFT.
    ///
    /// Both symbols must be conjugate-symmetric (they map real fields to real
    /// fields); the real part of the result is `a f`, the imaginary part `b f`.
    pub(crate) fn real_pair<A, B>(&self, a: A, b: B) -> (Vec<f64>, Vec<f64>)
    where
        A: Fn(&Mode) -> Complex64 + Sync,
        B: Fn(&Mode) -> Complex64 + Sync,
    {
        let buf = self.apply_complex(|m| a(m) + Complex64::i() * b(m));
        buf.par_iter().map(|z| (z.re, z.im)).unzip()
    }

    pub(crate) fn real_one<A>(&self, a: A) -> Vec<f64>
    where
        A: Fn(&Mode) -> Complex64 + Sync,
    {
        self.apply_complex(a).into_par_iter().map(|z| z.re).collect()
    }

    /// Inverse transform of `sym * hat`, returned in physical space.
    pub(crate) fn apply_complex<A>(&self, sym: A) -> Vec<Complex64>
    where
        A: Fn(&Mode) -> Complex64 + Sync,
    {
        let domain = &self.domain;
        let mut buf: Vec<Complex64> = self
            .hat
            .par_iter()
            .enumerate()
            .map(|(i, h)| sym(&domain.mode(i)) * h)
            .collect();
        domain.fft().inverse(&mut buf);
        buf
    }

    /// Complex gradient `(∂_{z_α} f)_α`, point-major, evaluated at `x + shift`.
    pub(crate) fn gradient(&self, shift: Option<&[f64]>) -> Vec<Complex64> {
        let n = self.domain.n();
        let len = self.domain.len();
        let res = self.domain.resolution();
        let tr = |m: &Mode| shift.map_or(Complex64::new(1.0, 0.0), |s| m.translation(s, res));
        let mut out = vec![Complex64::default(); len * n];
        for alpha in 0..n {
            let (a, b) = (2 * alpha, 2 * alpha + 1);
            // f_a + i f_b in one transform; then ∂_z f = ½(f_a - i f_b).
            let packed = self.apply_complex(|m| {
                let t = tr(m);
                (m.d1(a) + Complex64::i() * m.d1(b)) * t
            });
            out.par_chunks_mut(n)
                .zip(packed.par_iter())
                .for_each(|(o, p)| o[alpha] = Complex64::new(0.5 * p.re, -0.5 * p.im));
        }
        out
    }

    /// Complex Hessian `f_{αβ̄}`, point-major `n x n` row-major, at `x + shift`.
    pub(crate) fn complex_hessian(&self, shift: Option<&[f64]>) -> Vec<Complex64> {
        let n = self.domain.n();
        let len = self.domain.len();
        let res = self.domain.resolution();
        let tr = |m: &Mode| shift.map_or(Complex64::new(1.0, 0.0), |s| m.translation(s, res));
        let nn = n * n;
        let mut out = vec![Complex64::default(); len * nn];
        let diag = |m: &Mode, alpha: usize| {
            let (a, b) = (2 * alpha, 2 * alpha + 1);
            0.25 * (m.d2(a, a) + m.d2(b, b))
        };
        // Diagonal entries are real: pack two per transform.
        let mut alpha = 0;
        while alpha < n {
            let beta = alpha + 1;
            if beta < n {
                let (da, db) = self.real_pair(
                    |m| diag(m, alpha) * tr(m),
                    |m| diag(m, beta) * tr(m),
                );
                out.par_chunks_mut(nn).enumerate().for_each(|(p, o)| {
                    o[alpha * n + alpha] = Complex64::new(da[p], 0.0);
                    o[beta * n + beta] = Complex64::new(db[p], 0.0);
                });
            } else {
                let da = self.real_one(|m| diag(m, alpha) * tr(m));
                out.par_chunks_mut(nn).enumerate().for_each(|(p, o)| {
                    o[alpha * n + alpha] = Complex64::new(da[p], 0.0);
                });
            }
            alpha += 2;
        }
        // Off-diagonal: f_{αβ̄} = ¼[(f_ac + f_bd) + i(f_ad - f_bc)] with
        // (a,b) the real axes of z_α and (c,d) those of z_β.
        for alpha in 0..n {
            for beta in alpha + 1..n {
                let (a, b, c, d) = (2 * alpha, 2 * alpha + 1, 2 * beta, 2 * beta + 1);
                let packed = self.apply_complex(|m| {
                    let re = 0.25 * (m.d2(a, c) + m.d2(b, d));
                    let im = 0.25 * (m.d2(a, d) - m.d2(b, c));
                    Complex64::new(re, im) * tr(m)
                });
                out.par_chunks_mut(nn).zip(packed.par_iter()).for_each(|(o, v)| {
                    o[alpha * n + beta] = *v;
                    o[beta * n + alpha] = v.conj();
                });
            }
        }
        out
    }

    /// Holomorphic Hessian `f_{αβ}` (complex symmetric), point-major.
    pub(crate) fn holomorphic_hessian(&self) -> Vec<Complex64> {
        let n = self.domain.n();
        let len = self.domain.len();
        let nn = n * n;
        let mut out = vec![Complex64::default(); len * nn];
        for alpha in 0..n {
            for beta in alpha..n {
                let (a, b, c, d) = (2 * alpha, 2 * alpha + 1, 2 * beta, 2 * beta + 1);
                // ¼(∂_a - i∂_b)(∂_c - i∂_d) = ¼[(f_ac - f_bd) - i(f_ad + f_bc)]
                let packed = self.apply_complex(|m| {
                    let re = 0.25 * (m.d2(a, c) - m.d2(b, d));
                    let im = -0.25 * (m.d2(a, d) + m.d2(b, c));
                    Complex64::new(re, im)
                });
                out.par_chunks_mut(nn).zip(packed.par_iter()).for_each(|(o, v)| {
                    o[alpha * n + beta] = *v;
                    o[beta * n + alpha] = *v;
                });
            }
        }
        out
    }
}

/// A real grid function.
#[derive(Clone)]
pub struct ScalarField {
    domain: Domain,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(domain: &Domain, values: Vec<f64>) -> Result<Self> {
        domain.check_allocation()?;
        if values.len() != domain.len() {
            return Err(Error::InvalidDomain(format!(
                "expected {} values, got {}",
                domain.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scalar field"));
        }
        Ok(Self {
            domain: domain.clone(),
            values,
        })
    }

    pub(crate) fn from_raw(domain: &Domain, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), domain.len());
        Self {
            domain: domain.clone(),
            values,
        }
    }

    /// Samples `f` at every grid point; `f` receives the 2n real coordinates.
    pub fn from_fn<F>(domain: &Domain, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        domain.check_allocation()?;
        let dims = domain.real_dims();
        let values = (0..domain.len())
            .into_par_iter()
            .map(|i| {
                let mut x = [0.0; MAX_AXES];
                domain.coords(i, &mut x);
                f(&x[..dims])
            })
            .collect();
        Self::new(domain, values)
    }

    pub fn constant(domain: &Domain, c: f64) -> Result<Self> {
        domain.check_allocation()?;
        Self::new(domain, vec![c; domain.len()])
    }

    pub fn zeros(domain: &Domain) -> Result<Self> {
        Self::constant(domain, 0.0)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup(&self) -> f64 {
        sum::max_by(self.len(), |i| self.values[i])
    }

    pub fn inf(&self) -> f64 {
        sum::min_by(self.len(), |i| self.values[i])
    }

    pub fn sup_abs(&self) -> f64 {
        sum::max_by(self.len(), |i| self.values[i].abs())
    }

    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        Self::new(&self.domain, self.values.par_iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with<F>(&self, other: &ScalarField, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        ensure_same(&self.domain, &other.domain)?;
        Self::new(
            &self.domain,
            self.values
                .par_iter()
                .zip(other.values.par_iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn add_constant(&self, c: f64) -> Self {
        Self::from_raw(&self.domain, self.values.iter().map(|v| v + c).collect())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_raw(&self.domain, self.values.iter().map(|v| v * c).collect())
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `sup |self - other|`.
    pub fn max_abs_diff(&self, other: &ScalarField) -> Result<f64> {
        ensure_same(&self.domain, &other.domain)?;
        Ok(sum::max_by(self.len(), |i| (self.values[i] - other.values[i]).abs()))
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("domain", &self.domain)
            .field("min", &self.inf())
            .field("max", &self.sup())
            .finish()
    }
}

/// Per-point complex gradient `(φ_α)`, `n` entries per point.
#[derive(Clone, Debug)]
pub struct GradientField {
    domain: Domain,
    values: Vec<Complex64>,
}

impl GradientField {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn at(&self, point: usize) -> &[Complex64] {
        let n = self.domain.n();
        &self.values[point * n..(point + 1) * n]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `Σ_α φ_α φ̄_α`.
    pub fn norm_squared(&self) -> ScalarField {
        let n = self.domain.n();
        let v = self
            .values
            .par_chunks(n)
            .map(|g| g.iter().map(|z| z.norm_sqr()).sum())
            .collect();
        ScalarField::from_raw(&self.domain, v)
    }
}

/// Per-point `n x n` Hermitian matrices (row-major).
#[derive(Clone, Debug)]
pub struct HermitianField {
    domain: Domain,
    values: Vec<Complex64>,
}

impl HermitianField {
    /// Validates Hermitian symmetry to `1e-12` relative to each matrix norm.
    pub fn new(domain: &Domain, values: Vec<Complex64>) -> Result<Self> {
        domain.check_allocation()?;
        let n = domain.n();
        if values.len() != domain.len() * n * n {
            return Err(Error::InvalidDomain("hermitian field has wrong length".into()));
        }
        for m in values.chunks(n * n) {
            let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
            if hermitian::hermitian_defect(m, n) > 1e-12 * scale {
                return Err(Error::InvalidParameter("matrix is not Hermitian".into()));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("hermitian field"));
            }
        }
        Ok(Self {
            domain: domain.clone(),
            values,
        })
    }

    pub(crate) fn from_raw(domain: &Domain, values: Vec<Complex64>) -> Self {
        Self {
            domain: domain.clone(),
            values,
        }
    }

    /// Builds a field from a per-point closure writing the `n x n` matrix.
    pub fn from_fn<F>(domain: &Domain, f: F) -> Result<Self>
    where
        F: Fn(&[f64], &mut [Complex64]) + Sync,
    {
        domain.check_allocation()?;
        let n = domain.n();
        let dims = domain.real_dims();
        let mut values = vec![Complex64::default(); domain.len() * n * n];
        values.par_chunks_mut(n * n).enumerate().for_each(|(i, m)| {
            let mut x = [0.0; MAX_AXES];
            domain.coords(i, &mut x);
            f(&x[..dims], m);
        });
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn at(&self, point: usize) -> &[Complex64] {
        let nn = self.domain.n() * self.domain.n();
        &self.values[point * nn..(point + 1) * nn]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Pointwise `det(I + h)`.
    pub fn det_shifted(&self) -> ScalarField {
        let n = self.domain.n();
        let v = self
            .values
            .par_chunks(n * n)
            .map(|m| {
                let mut a = [Complex64::default(); 16];
                hermitian::shifted_identity(m, n, &mut a);
                hermitian::determinant(&a, n).re
            })
            .collect();
        ScalarField::from_raw(&self.domain, v)
    }

    /// Pointwise trace `Σ h_{αᾱ}`.
    pub fn trace(&self) -> ScalarField {
        let n = self.domain.n();
        let v = self
            .values
            .par_chunks(n * n)
            .map(|m| hermitian::trace(m, n))
            .collect();
        ScalarField::from_raw(&self.domain, v)
    }
}

/// Per-point holomorphic Hessian `φ_{αβ}` (complex symmetric).
#[derive(Clone, Debug)]
pub struct HolomorphicHessian {
    domain: Domain,
    values: Vec<Complex64>,
}

impl HolomorphicHessian {
    pub fn at(&self, point: usize) -> &[Complex64] {
        let nn = self.domain.n() * self.domain.n();
        &self.values[point * nn..(point + 1) * nn]
    }
}

pub(crate) fn ensure_same(a: &Domain, b: &Domain) -> Result<()> {
    if a.same_grid(b) {
        Ok(())
    } else {
        Err(Error::DomainMismatch)
    }
}

/// Gradient and complex Hessian of `f`.
pub fn spectral_derivatives(f: &ScalarField) -> (GradientField, HermitianField) {
    let spec = Spectrum::of(f);
    (
        GradientField {
            domain: f.domain.clone(),
            values: spec.gradient(None),
        },
        HermitianField::from_raw(&f.domain, spec.complex_hessian(None)),
    )
}

pub fn gradient(f: &ScalarField) -> GradientField {
    GradientField {
        domain: f.domain.clone(),
        values: Spectrum::of(f).gradient(None),
    }
}

pub fn complex_hessian(f: &ScalarField) -> HermitianField {
    HermitianField::from_raw(&f.domain, Spectrum::of(f).complex_hessian(None))
}

pub fn holomorphic_hessian(f: &ScalarField) -> HolomorphicHessian {
    HolomorphicHessian {
        domain: f.domain.clone(),
        values: Spectrum::of(f).holomorphic_hessian(),
    }
}

/// Complex Laplacian `Δf = Σ_α f_{αᾱ}` of the flat metric (a quarter of the real one).
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let v = Spectrum::of(f).real_one(|m| Complex64::new(m.laplacian(), 0.0));
    ScalarField::from_raw(&f.domain, v)
}

/// Mean-zero `u` with `Δu = g - mean(g)`.
pub fn invert_laplacian(g: &ScalarField) -> ScalarField {
    let v = Spectrum::of(g).real_one(|m| {
        if m.is_zero() {
            Complex64::default()
        } else {
            Complex64::new(1.0 / m.laplacian(), 0.0)
        }
    });
    ScalarField::from_raw(&g.domain, v)
}

/// Real partial derivative along axis `a`.
pub fn real_partial(f: &ScalarField, a: usize) -> ScalarField {
    ScalarField::from_raw(&f.domain, Spectrum::of(f).real_one(|m| m.d1(a)))
}

/// Fourier coefficients `c_k` with `f(x) = Σ c_k e^{2πi k·x}`.
pub fn fourier_coefficients(f: &ScalarField) -> Vec<Complex64> {
    let spec = Spectrum::of(f);
    let scale = 1.0 / f.len() as f64;
    spec.hat.into_iter().map(|c| c * scale).collect()
}

/// Spectral interpolant of `f` evaluated on the grid translated by `shift`.
pub fn translate(f: &ScalarField, shift: &[f64]) -> ScalarField {
    let res = f.domain.resolution();
    let v = Spectrum::of(f).real_one(|m| m.translation(shift, res));
    ScalarField::from_raw(&f.domain, v)
}

/// Complex Hessian of the spectral interpolant of `f` on the translated grid.
pub fn complex_hessian_translated(f: &ScalarField, shift: &[f64]) -> HermitianField {
    HermitianField::from_raw(&f.domain, Spectrum::of(f).complex_hessian(Some(shift)))
}

/// `∫_M f ω₀ⁿ`, i.e. the grid mean.
pub fn integrate(f: &ScalarField) -> f64 {
    sum::mean(&f.values)
}

/// Minimum over the grid of the smallest eigenvalue of `I + h`.
pub fn min_eigenvalue(h: &HermitianField) -> f64 {
    let n = h.domain.n();
    sum::min_by(h.domain.len(), |p| 1.0 + hermitian::min_eigenvalue(h.at(p), n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_sizes() {
        assert_eq!(make_domain(1, 128).unwrap().len(), 16384);
        assert_eq!(make_domain(2, 32).unwrap().len(), 1_048_576);
        assert!(matches!(make_domain(2, 33), Err(Error::InvalidDomain(_))));
        assert!(make_domain(1, 4).is_err());
        assert!(make_domain(5, 8).is_err());
    }

    #[test]
    fn memory_cap_applies_above_n2() {
        let d = TorusDomain::with_field_cap(3, 16, 1000).unwrap();
        assert!(matches!(ScalarField::zeros(&d), Err(Error::MemoryCap { .. })));
        let d2 = TorusDomain::with_field_cap(2, 16, 1000).unwrap();
        assert!(ScalarField::zeros(&d2).is_ok());
    }

    #[test]
    fn index_roundtrip() {
        let d = make_domain(2, 8).unwrap();
        let mut digits = [0usize; 4];
        for idx in [0, 1, 77, 4095] {
            d.digits(idx, &mut digits);
            assert_eq!(d.index(&digits), idx);
        }
    }

    #[test]
    fn integrate_examples() {
        let d = make_domain(1, 64).unwrap();
        let one = ScalarField::constant(&d, 1.0).unwrap();
        assert_eq!(integrate(&one), 1.0);
        let c = ScalarField::from_fn(&d, |x| (2.0 * PI * x[0]).cos()).unwrap();
        assert!(integrate(&c).abs() < 1e-15);
        let c2 = ScalarField::from_fn(&d, |x| (2.0 * PI * x[0]).cos().powi(2)).unwrap();
        assert!((integrate(&c2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cosine_derivatives_n1() {
        let d = make_domain(1, 32).unwrap();
        let f = ScalarField::from_fn(&d, |x| (2.0 * PI * x[0]).cos()).unwrap();
        let (g, h) = spectral_derivatives(&f);
        let mut x = [0.0; 2];
        for p in 0..d.len() {
            d.coords(p, &mut x);
            let dz = g.at(p)[0];
            assert!((dz.re + PI * (2.0 * PI * x[0]).sin()).abs() < 1e-12);
            assert!(dz.im.abs() < 1e-12);
            let hzz = h.at(p)[0];
            assert!((hzz.re + PI * PI * (2.0 * PI * x[0]).cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn constant_has_no_derivatives() {
        let d = make_domain(2, 8).unwrap();
        let f = ScalarField::constant(&d, 3.5).unwrap();
        let (g, h) = spectral_derivatives(&f);
        assert!(g.values().iter().all(|z| z.norm() < 1e-13));
        assert!(h.values().iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn min_eigenvalue_examples() {
        let d = make_domain(1, 16).unwrap();
        let zero = HermitianField::from_fn(&d, |_, m| m.fill(Complex64::default())).unwrap();
        assert_eq!(min_eigenvalue(&zero), 1.0);
        let h = HermitianField::from_fn(&d, |x, m| {
            m[0] = Complex64::new(-0.5 * (2.0 * PI * x[0]).cos(), 0.0)
        })
        .unwrap();
        assert!((min_eigenvalue(&h) - 0.5).abs() < 1e-15);

        let d2 = make_domain(2, 8).unwrap();
        let a = 0.4935;
        let h2 = HermitianField::from_fn(&d2, |x, m| {
            m.fill(Complex64::default());
            m[0] = Complex64::new(-a * (2.0 * PI * x[0]).cos(), 0.0);
            m[3] = Complex64::new(-a * (2.0 * PI * x[2]).cos(), 0.0);
        })
        .unwrap();
        assert!((min_eigenvalue(&h2) - 0.5065).abs() < 1e-12);
    }

    #[test]
    fn hermitian_field_rejects_asymmetric() {
        let d = make_domain(2, 8).unwrap();
        let r = HermitianField::from_fn(&d, |_, m| {
            m.fill(Complex64::default());
            m[1] = Complex64::new(1.0, 0.0);
        });
        assert!(r.is_err());
    }

    #[test]
    fn mixed_domains_rejected() {
        let a = ScalarField::zeros(&make_domain(1, 8).unwrap()).unwrap();
        let b = ScalarField::zeros(&make_domain(1, 16).unwrap()).unwrap();
        assert!(matches!(a.add(&b), Err(Error::DomainMismatch)));
    }

    #[test]
    fn inverse_laplacian_roundtrip() {
        let d = make_domain(2, 8).unwrap();
        let g = ScalarField::from_fn(&d, |x| {
            (2.0 * PI * (x[0] + 2.0 * x[3])).sin() + 0.3 * (2.0 * PI * 4.0 * x[1]).cos()
        })
        .unwrap();
        let u = invert_laplacian(&g);
        assert!(integrate(&u).abs() < 1e-14);
        let back = laplacian(&u);
        assert!(back.max_abs_diff(&g).unwrap() < 1e-12);
    }

    #[test]
    fn translation_by_half_cell_matches_analytic() {
        let d = make_domain(1, 16).unwrap();
        let f = ScalarField::from_fn(&d, |x| (2.0 * PI * (3.0 * x[0] - x[1])).sin()).unwrap();
        let s = [0.5 / 16.0, 0.5 / 16.0];
        let t = translate(&f, &s);
        let exact = ScalarField::from_fn(&d, |x| {
            (2.0 * PI * (3.0 * (x[0] + s[0]) - (x[1] + s[1]))).sin()
        })
        .unwrap();
        assert!(t.max_abs_diff(&exact).unwrap() < 1e-13);
    }
}
