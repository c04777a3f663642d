use super::Matrix;
use crate::error::{Error, Result};

/// A matrix whose infinity-norm condition number exceeds this is treated as singular.
pub const COND_LIMIT: f64 = 1e12;

/// Pivots smaller than `PIVOT_RTOL * ‖A‖∞` are treated as zero.
pub const PIVOT_RTOL: f64 = 1e-13;

/// LU factorization with partial pivoting, `P A = L U`.
///
/// Factorization itself never fails; singularity is reported by [`Lu::check`]
/// and by the solving entry points.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    swaps_even: bool,
    norm_inf: f64,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps_even = true;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps_even = !swaps_even;
            }
            if pmax == 0.0 {
                continue;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    for j in (k + 1)..n {
                        let delta = factor * lu[(k, j)];
                        lu[(i, j)] -= delta;
                    }
                }
            }
        }
        Ok(Self { lu, perm, swaps_even, norm_inf: a.norm_inf() })
    }

    pub fn order(&self) -> usize {
        self.lu.rows()
    }

    /// Smallest pivot magnitude.
    pub fn min_pivot(&self) -> f64 {
        (0..self.order()).map(|i| self.lu[(i, i)].abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn determinant(&self) -> f64 {
        let prod: f64 = (0..self.order()).map(|i| self.lu[(i, i)]).product();
        if self.swaps_even {
            prod
        } else {
            -prod
        }
    }

    /// Fails with `SingularMatrix` when a pivot is below the relative
    /// threshold or the estimated condition number exceeds [`COND_LIMIT`].
    pub fn check(&self) -> Result<()> {
        self.check_with(COND_LIMIT)
    }

    /// As [`Lu::check`] with a caller-supplied condition-number limit.
    pub fn check_with(&self, cond_limit: f64) -> Result<()> {
        let min_pivot = self.min_pivot();
        if self.norm_inf == 0.0 || min_pivot <= PIVOT_RTOL * self.norm_inf {
            return Err(Error::SingularMatrix(format!(
                "pivot {min_pivot:e} below {PIVOT_RTOL:e}·‖A‖∞"
            )));
        }
        let cond = self.condition_inf();
        if !(cond <= cond_limit) {
            return Err(Error::SingularMatrix(format!("condition number {cond:e} exceeds {cond_limit:e}")));
        }
        Ok(())
    }

    /// Infinity-norm condition number, computed from the explicit inverse.
    pub fn condition_inf(&self) -> f64 {
        let n = self.order();
        let inv = self.solve_unchecked(&Matrix::identity(n));
        self.norm_inf * inv.norm_inf()
    }

    fn solve_unchecked(&self, b: &Matrix) -> Matrix {
        let n = self.order();
        let mut x = Matrix::zeros(n, b.cols());
        for col in 0..b.cols() {
            let mut y: Vec<f64> = self.perm.iter().map(|&p| b[(p, col)]).collect();
            for i in 0..n {
                let s: f64 = (0..i).map(|j| self.lu[(i, j)] * y[j]).sum();
                y[i] -= s;
            }
            for i in (0..n).rev() {
                let s: f64 = ((i + 1)..n).map(|j| self.lu[(i, j)] * y[j]).sum();
                y[i] = (y[i] - s) / self.lu[(i, i)];
            }
            for i in 0..n {
                x[(i, col)] = y[i];
            }
        }
        x
    }

    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        self.solve_with(b, COND_LIMIT)
    }

    /// As [`Lu::solve`] with a caller-supplied condition-number limit.
    pub fn solve_with(&self, b: &Matrix, cond_limit: f64) -> Result<Matrix> {
        if b.rows() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} rows, expected {}",
                b.rows(),
                self.order()
            )));
        }
        self.check_with(cond_limit)?;
        let x = self.solve_unchecked(b);
        if !x.is_finite() {
            return Err(Error::NonFinite("linear solve result".into()));
        }
        Ok(x)
    }
}

/// Solves `A X = B` with partial pivoting.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    Lu::factor(a)?.solve(b)
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let lu = Lu::factor(a)?;
    lu.solve(&Matrix::identity(a.rows()))
}

/// Determinant. Triangular inputs return the plain diagonal product.
pub fn determinant(a: &Matrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
    }
    if a.is_upper_triangular() || a.is_lower_triangular() {
        return Ok((0..a.rows()).map(|i| a[(i, i)]).product());
    }
    Ok(Lu::factor(a)?.determinant())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let x = solve(&Matrix::identity(2), &Matrix::column(&[3.0, 4.0])).unwrap();
        assert_eq!(x.col(0), vec![3.0, 4.0]);
    }

    #[test]
    fn rotation_equilibrium_solve() {
        // A x = -B u for the rotation system with omega = 2, u = 1.
        let a = Matrix::from_rows(&[[0.0, 2.0], [-2.0, 0.0]]).unwrap();
        let x = solve(&a, &Matrix::column(&[0.0, -1.0])).unwrap();
        assert!((x[(0, 0)] - 0.5).abs() < 1e-15);
        assert!(x[(1, 0)].abs() < 1e-15);
    }

    #[test]
    fn rank_one_is_singular() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(solve(&a, &Matrix::column(&[1.0, 0.0])), Err(Error::SingularMatrix(_))));
        assert_eq!(determinant(&a).unwrap(), 0.0);
    }

    #[test]
    fn ill_conditioned_is_singular() {
        let a = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0 + 1e-14]]).unwrap();
        assert!(matches!(inverse(&a), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&Matrix::identity(3)).unwrap(), 1.0);
        let w = Matrix::from_rows(&[[1.0, 1.0], [1.0, 2.0]]).unwrap();
        assert!((determinant(&w).unwrap() - 1.0).abs() < 1e-15);
        let lower = Matrix::from_rows(&[[1.0, 0.0], [5.0, 3.0]]).unwrap();
        assert_eq!(determinant(&lower).unwrap(), 3.0);
        let perm = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(determinant(&perm).unwrap(), -1.0);
    }

    #[test]
    fn dimension_errors() {
        let a = Matrix::zeros(2, 3);
        assert!(matches!(solve(&a, &Matrix::column(&[1.0, 2.0])), Err(Error::DimensionMismatch(_))));
        assert!(matches!(
            solve(&Matrix::identity(2), &Matrix::column(&[1.0, 2.0, 3.0])),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
