//! Pointwise algebra on small (n <= 4) complex matrices stored row-major.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub const MAX_DIM: usize = 4;

pub fn determinant(m: &[Complex64], n: usize) -> Complex64 {
    match n {
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        _ => {
            let mut a = [Complex64::default(); MAX_DIM * MAX_DIM];
            a[..n * n].copy_from_slice(&m[..n * n]);
            let mut det = Complex64::new(1.0, 0.0);
            for col in 0..n {
                let pivot = (col..n)
                    .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
                    .unwrap();
                if a[pivot * n + col].norm() == 0.0 {
                    return Complex64::default();
                }
                if pivot != col {
                    for k in 0..n {
                        a.swap(pivot * n + k, col * n + k);
                    }
                    det = -det;
                }
                let p = a[col * n + col];
                det *= p;
                for row in col + 1..n {
                    let factor = a[row * n + col] / p;
                    for k in col..n {
                        let v = a[col * n + k];
                        a[row * n + k] -= factor * v;
                    }
                }
            }
            det
        }
    }
}

/// Writes the inverse of `m` into `out`; returns false for a singular matrix.
pub fn inverse(m: &[Complex64], n: usize, out: &mut [Complex64]) -> bool {
    match n {
        1 => {
            if m[0].norm() == 0.0 {
                return false;
            }
            out[0] = m[0].inv();
            true
        }
        2 => {
            let det = m[0] * m[3] - m[1] * m[2];
            if det.norm() == 0.0 {
                return false;
            }
            let inv = det.inv();
            out[0] = m[3] * inv;
            out[1] = -m[1] * inv;
            out[2] = -m[2] * inv;
            out[3] = m[0] * inv;
            true
        }
        _ => {
            let mut a = [Complex64::default(); MAX_DIM * MAX_DIM];
            a[..n * n].copy_from_slice(&m[..n * n]);
            for (i, v) in out[..n * n].iter_mut().enumerate() {
                *v = if i / n == i % n { Complex64::new(1.0, 0.0) } else { Complex64::default() };
            }
            for col in 0..n {
                let pivot = (col..n)
                    .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
                    .unwrap();
                if a[pivot * n + col].norm() == 0.0 {
                    return false;
                }
                if pivot != col {
                    for k in 0..n {
                        a.swap(pivot * n + k, col * n + k);
                        out.swap(pivot * n + k, col * n + k);
                    }
                }
                let p = a[col * n + col].inv();
                for k in 0..n {
                    a[col * n + k] *= p;
                    out[col * n + k] *= p;
                }
                for row in 0..n {
                    if row == col {
                        continue;
                    }
                    let factor = a[row * n + col];
                    if factor.norm() == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        let (va, vo) = (a[col * n + k], out[col * n + k]);
                        a[row * n + k] -= factor * va;
                        out[row * n + k] -= factor * vo;
                    }
                }
            }
            true
        }
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &[Complex64], n: usize) -> f64 {
    match n {
        1 => m[0].re,
        2 => {
            let (a, d) = (m[0].re, m[3].re);
            let half = 0.5 * (a - d);
            0.5 * (a + d) - (half * half + m[1].norm_sqr()).sqrt()
        }
        _ => {
            let mat = DMatrix::from_row_slice(n, n, &m[..n * n]);
            mat.symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// tr(AB).
pub fn trace_product(a: &[Complex64], b: &[Complex64], n: usize) -> Complex64 {
    let mut acc = Complex64::default();
    for i in 0..n {
        for j in 0..n {
            acc += a[i * n + j] * b[j * n + i];
        }
    }
    acc
}

pub fn trace(a: &[Complex64], n: usize) -> f64 {
    (0..n).map(|i| a[i * n + i].re).sum()
}

pub fn matmul(a: &[Complex64], b: &[Complex64], n: usize, out: &mut [Complex64]) {
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::default();
            for k in 0..n {
                acc += a[i * n + k] * b[k * n + j];
            }
            out[i * n + j] = acc;
        }
    }
}

/// `I + m`, written into `out`.
pub fn shifted_identity(m: &[Complex64], n: usize, out: &mut [Complex64]) {
    out[..n * n].copy_from_slice(&m[..n * n]);
    for i in 0..n {
        out[i * n + i] += 1.0;
    }
}

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermitian_defect(m: &[Complex64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[i * n + j] - m[j * n + i].conj()).norm());
        }
    }
    worst
}
