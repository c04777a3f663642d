use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::Matrix;
use crate::error::{Error, Result};

/// Largest order accepted by [`eigenvalues`].
pub const MAX_EIGEN_ORDER: usize = 32;

/// Shifted QR iterations allowed per deflated eigenvalue before giving up.
const ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues of a real square matrix.
///
/// Ordered by descending real part, then descending imaginary part, so that
/// conjugate pairs sit next to each other with the positive imaginary part first.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<Complex64>) -> Self {
        eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Spectral abscissa, `max Re λ`.
    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Spectral radius, `max |λ|`.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max)
    }

    pub fn product(&self) -> Complex64 {
        self.eigenvalues.iter().product()
    }
}

impl Serialize for Spectrum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            re: f64,
            im: f64,
        }
        let mut seq = serializer.serialize_seq(Some(self.eigenvalues.len()))?;
        for l in &self.eigenvalues {
            seq.serialize_element(&Entry { re: l.re, im: l.im })?;
        }
        seq.end()
    }
}

/// Eigenvalues of a real square matrix of order at most [`MAX_EIGEN_ORDER`].
///
/// Balances the matrix, reduces it to upper Hessenberg form with Householder
/// reflections and runs Francis double-shift QR sweeps with deflation.
pub fn eigenvalues(a: &Matrix) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("eigenvalues of a non-square matrix".into()));
    }
    let n = a.rows();
    if n > MAX_EIGEN_ORDER {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalue kernel supports order ≤ {MAX_EIGEN_ORDER}, got {n}"
        )));
    }
    let mut h: Vec<Vec<f64>> = a.to_rows();
    balance(&mut h);
    hessenberg(&mut h);
    let values = hqr(&mut h)?;
    Ok(Spectrum::new(values))
}

fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i][j] *= g;
                }
                for row in a.iter_mut() {
                    row[i] *= f;
                }
            }
        }
    }
}

fn hessenberg(a: &mut [Vec<f64>]) {
    let n = a.len();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let norm: f64 = ((k + 1)..n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k + 1][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = ((k + 1)..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vnorm);
        // A <- H A
        for j in 0..n {
            let dot: f64 = v.iter().enumerate().map(|(t, vt)| vt * a[k + 1 + t][j]).sum();
            for (t, vt) in v.iter().enumerate() {
                a[k + 1 + t][j] -= 2.0 * vt * dot;
            }
        }
        // A <- A H
        for row in a.iter_mut() {
            let dot: f64 = v.iter().enumerate().map(|(t, vt)| vt * row[k + 1 + t]).sum();
            for (t, vt) in v.iter().enumerate() {
                row[k + 1 + t] -= 2.0 * vt * dot;
            }
        }
        for row in a.iter_mut().skip(k + 2) {
            row[k] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (eigenvalues only).
fn hqr(a: &mut [Vec<f64>]) -> Result<Vec<Complex64>> {
    let n = a.len();
    let eps = f64::EPSILON;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let mut sweeps = 0usize;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= eps * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                out[nu] = Complex64::new(x + t, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    let z = p + sign(z, p);
                    out[nu - 1] = Complex64::new(x + z, 0.0);
                    out[nu] = if z != 0.0 {
                        Complex64::new(x - w / z, 0.0)
                    } else {
                        Complex64::new(x + z, 0.0)
                    };
                } else {
                    out[nu] = Complex64::new(x + p, -z);
                    out[nu - 1] = Complex64::new(x + p, z);
                }
                nn -= 2;
                break;
            }
            if its == ITERATIONS_PER_EIGENVALUE {
                return Err(Error::ConvergenceFailure { sweeps });
            }
            if its > 0 && its % 10 == 0 {
                // Exceptional shift.
                t += x;
                for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                    row[i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            sweeps += 1;

            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[m][m];
                let r0 = x - z;
                let s0 = y - z;
                p = (r0 * s0 - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r0 - s0;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nu - 1 {
                a[i + 2][i] = 0.0;
                if i != m {
                    a[i + 2][i - 1] = 0.0;
                }
            }
            for k in m..nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k + 1 != nu { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[k][k - 1] = -a[k][k - 1];
                    }
                } else {
                    a[k][k - 1] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=nu {
                    let mut pp = a[k][j] + q * a[k + 1][j];
                    if k + 1 != nu {
                        pp += r * a[k + 2][j];
                        a[k + 2][j] -= pp * z;
                    }
                    a[k + 1][j] -= pp * y;
                    a[k][j] -= pp * x;
                }
                let mmin = if nu < k + 3 { nu } else { k + 3 };
                for row in a.iter_mut().take(mmin + 1).skip(l) {
                    let mut pp = x * row[k] + y * row[k + 1];
                    if k + 1 != nu {
                        pp += z * row[k + 2];
                        row[k + 2] -= pp * r;
                    }
                    row[k + 1] -= pp * q;
                    row[k] -= pp;
                }
            }
        }
    }
    Ok(out)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
///
/// Only the symmetric part `(A + Aᵀ)/2` is used.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("eigenvalues of a non-square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.symmetrize().to_rows();
    let total: f64 = m.iter().flatten().map(|v| v * v).sum();
    const MAX_SWEEPS: usize = 100;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off == 0.0 || off <= 1e-32 * total {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = sign(1.0, theta) / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in m.iter_mut() {
                    let (rp, rq) = (row[p], row[q]);
                    row[p] = c * rp - s * rq;
                    row[q] = s * rp + c * rq;
                }
                for k in 0..n {
                    let (pk, qk) = (m[p][k], m[q][k]);
                    m[p][k] = c * pk - s * qk;
                    m[q][k] = s * pk + c * qk;
                }
                m[p][q] = 0.0;
                m[q][p] = 0.0;
            }
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS });
    }
    let mut values: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, re: f64, im: f64, tol: f64) -> bool {
        (a.re - re).abs() <= tol && (a.im - im).abs() <= tol
    }

    #[test]
    fn diagonal() {
        let s = eigenvalues(&Matrix::diag(&[-1.0, -2.0])).unwrap();
        assert_eq!(s.eigenvalues(), &[Complex64::new(-1.0, 0.0), Complex64::new(-2.0, 0.0)]);
    }

    #[test]
    fn rotation_block() {
        let a = Matrix::from_rows(&[[0.0, 2.0], [-2.0, 0.0]]).unwrap();
        let s = eigenvalues(&a).unwrap();
        assert!(close(s.eigenvalues()[0], 0.0, 2.0, 1e-15));
        assert!(close(s.eigenvalues()[1], 0.0, -2.0, 1e-15));
    }

    #[test]
    fn triangular_plant() {
        let a = Matrix::from_rows(&[[1.0, 0.08015], [0.0, 0.6313]]).unwrap();
        let s = eigenvalues(&a).unwrap();
        assert!(close(s.eigenvalues()[0], 1.0, 0.0, 1e-15));
        assert!(close(s.eigenvalues()[1], 0.6313, 0.0, 1e-15));
    }

    #[test]
    fn companion_of_known_roots() {
        // Roots 1, 2, 3, 4: z^4 - 10 z^3 + 35 z^2 - 50 z + 24.
        let a = Matrix::from_rows(&[
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [-24.0, 50.0, -35.0, 10.0],
        ])
        .unwrap();
        let s = eigenvalues(&a).unwrap();
        for (l, want) in s.eigenvalues().iter().zip([4.0, 3.0, 2.0, 1.0]) {
            assert!(close(*l, want, 0.0, 1e-10), "{l} vs {want}");
        }
    }

    #[test]
    fn order_limit() {
        assert!(matches!(
            eigenvalues(&Matrix::identity(MAX_EIGEN_ORDER + 1)),
            Err(Error::DimensionMismatch(_))
        ));
        assert_eq!(eigenvalues(&Matrix::identity(MAX_EIGEN_ORDER)).unwrap().len(), MAX_EIGEN_ORDER);
    }

    #[test]
    fn symmetric_jacobi() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let v = symmetric_eigenvalues(&a).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
        let m = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(symmetric_eigenvalues(&m).unwrap()[0].abs() < 1e-15);
    }
}
