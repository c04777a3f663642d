#![allow(dead_code)]

pub mod golden;

use ltikit::matrix::{eigenvalues, Lu};
use ltikit::statespace::controllability_matrix;
use ltikit::{Matrix, StateSpaceModel};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn m(rows: &[&[f64]]) -> Matrix {
    Matrix::from_rows(rows).unwrap()
}

pub fn rotation(omega: f64) -> StateSpaceModel {
    StateSpaceModel::continuous(
        m(&[&[0.0, omega], &[-omega, 0.0]]),
        Matrix::column(&[0.0, 1.0]),
        Matrix::row_vector(&[1.0, 1.0]),
    )
    .unwrap()
}

pub fn double_integrator() -> StateSpaceModel {
    StateSpaceModel::discrete(
        m(&[&[1.0, 1.0], &[0.0, 1.0]]),
        Matrix::column(&[0.0, 1.0]),
        Matrix::row_vector(&[1.0, 1.0]),
    )
    .unwrap()
}

pub fn digital_position() -> StateSpaceModel {
    StateSpaceModel::discrete(
        m(&[&[1.0, 0.08015], &[0.0, 0.6313]]),
        Matrix::column(&[0.003396, 0.06308]),
        Matrix::row_vector(&[1.0, 0.0]),
    )
    .unwrap()
}

pub fn random_matrix(rng: &mut TestRng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(-scale..scale)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

pub fn random_vec(rng: &mut TestRng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

/// Random model whose controllability matrix is comfortably nonsingular.
pub fn random_controllable(rng: &mut TestRng, discrete: bool, n: usize, m_in: usize) -> StateSpaceModel {
    loop {
        let a = random_matrix(rng, n, n, 1.0);
        let b = random_matrix(rng, n, m_in, 1.0);
        let c = random_matrix(rng, 1, n, 1.0);
        let ctrb = controllability_matrix(&a, &b).unwrap();
        let ok = if m_in == 1 {
            Lu::factor(&ctrb).map(|lu| lu.condition_inf() < 1e4).unwrap_or(false)
        } else {
            let g = &ctrb * &ctrb.transpose();
            Lu::factor(&g).map(|lu| lu.condition_inf() < 1e6).unwrap_or(false)
        };
        if ok {
            return if discrete {
                StateSpaceModel::discrete(a, b, c).unwrap()
            } else {
                StateSpaceModel::continuous(a, b, c).unwrap()
            };
        }
    }
}

/// Random model whose observability matrix is comfortably nonsingular.
pub fn random_observable(rng: &mut TestRng, discrete: bool, n: usize, p: usize) -> StateSpaceModel {
    loop {
        let a = random_matrix(rng, n, n, 1.0);
        let b = random_matrix(rng, n, 1, 1.0);
        let c = random_matrix(rng, p, n, 1.0);
        let obsv = controllability_matrix(&a.transpose(), &c.transpose()).unwrap();
        let g = &obsv * &obsv.transpose();
        if Lu::factor(&g).map(|lu| lu.condition_inf() < 1e6).unwrap_or(false) {
            return if discrete {
                StateSpaceModel::discrete(a, b, c).unwrap()
            } else {
                StateSpaceModel::continuous(a, b, c).unwrap()
            };
        }
    }
}

pub fn to_na(a: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice())
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Minimum of the regulator criterion over the stacked input sequence,
/// solved directly from the normal equations of the quadratic in `U`.
///
/// Returns the optimal cost and the optimal inputs `u(0..N)`.
pub fn stacked_lqr_oracle(
    a: &Matrix,
    b: &Matrix,
    r1: &Matrix,
    r: &Matrix,
    p1: &Matrix,
    horizon: usize,
    x0: &[f64],
) -> (f64, Vec<Vec<f64>>) {
    let (a, b, r1, r, p1) = (to_na(a), to_na(b), to_na(r1), to_na(r), to_na(p1));
    let (n, mi) = (a.nrows(), b.ncols());
    let x0 = DVector::from_column_slice(x0);
    // x(k) = A^k x0 + Σ_{j<k} A^{k-1-j} B u(j) = free_k + G_k U
    let mut powers = vec![DMatrix::<f64>::identity(n, n)];
    for k in 1..=horizon {
        powers.push(&a * &powers[k - 1]);
    }
    let dim = horizon * mi;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let mut g = DVector::<f64>::zeros(dim);
    let mut c = 0.0;
    for k in 1..=horizon {
        let mut gk = DMatrix::<f64>::zeros(n, dim);
        for j in 0..k {
            gk.view_mut((0, j * mi), (n, mi)).copy_from(&(&powers[k - 1 - j] * &b));
        }
        let free = &powers[k] * &x0;
        let w = if k == horizon { &r1 + &p1 } else { r1.clone() };
        h += gk.transpose() * &w * &gk;
        g += gk.transpose() * &w * &free;
        c += (free.transpose() * &w * &free)[(0, 0)];
    }
    for j in 0..horizon {
        let mut block = h.view_mut((j * mi, j * mi), (mi, mi));
        block += &r;
    }
    let u = h.clone().cholesky().expect("positive definite Hessian").solve(&(-&g));
    let cost = (u.transpose() * &h * &u)[(0, 0)] + 2.0 * g.dot(&u) + c;
    let inputs = (0..horizon).map(|j| u.rows(j * mi, mi).iter().copied().collect()).collect();
    (cost, inputs)
}

/// Eigenvalue residual `σ_min(A − λI) / ‖A‖₂`, computed with nalgebra.
pub fn eigen_residuals(a: &Matrix) -> Vec<f64> {
    let na = to_na(a);
    let norm = na.singular_values().max().max(1e-300);
    let n = a.rows();
    eigenvalues(a)
        .unwrap()
        .eigenvalues()
        .iter()
        .map(|&lam| {
            let shifted = na.map(|v| nalgebra::Complex::new(v, 0.0))
                - DMatrix::<nalgebra::Complex<f64>>::identity(n, n) * nalgebra::Complex::new(lam.re, lam.im);
            let sv = shifted.singular_values();
            sv.iter().cloned().fold(f64::INFINITY, f64::min) / norm
        })
        .collect()
}

/// Multiset match of two complex lists, greedy nearest pairing.
pub fn multiset_distance(a: &[num_complex::Complex64], b: &[num_complex::Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}
