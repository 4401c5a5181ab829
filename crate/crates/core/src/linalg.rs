//! SVD-based numerical rank, conditioning and minimum-norm least squares.
//!
//! Every rank decision in the crate goes through [`rank_threshold`] so that
//! PE verdicts, invertibility checks and dictionary solves agree.

use nalgebra::{DMatrix, DVector};

/// Default relative rank tolerance, `100 * machine epsilon`.
pub const DEFAULT_RANK_TOL: f64 = 100.0 * f64::EPSILON;

/// Thin SVD `m = u diag(s) v_t` with singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

/// Thin SVD computed by faer. nalgebra's own iteration can return factors
/// that do not reproduce exactly rank-deficient Hankel matrices.
pub fn thin_svd(m: &DMatrix<f64>) -> Svd {
    let (r, c) = m.shape();
    let fm = faer::Mat::<f64>::from_fn(r, c, |i, j| m[(i, j)]);
    match fm.thin_svd() {
        Ok(svd) => {
            let (u, v, s) = (svd.U(), svd.V(), svd.S().column_vector());
            let k = s.nrows();
            Svd {
                u: DMatrix::from_fn(r, k, |i, j| u[(i, j)]),
                singular_values: DVector::from_fn(k, |i, _| s[i]),
                v_t: DMatrix::from_fn(k, c, |i, j| v[(j, i)]),
            }
        }
        Err(_) => {
            let svd = m.clone().svd(true, true);
            Svd {
                u: svd.u.expect("U requested"),
                singular_values: svd.singular_values,
                v_t: svd.v_t.expect("V^T requested"),
            }
        }
    }
}

/// Singular values in descending order. Empty matrices have none.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = thin_svd(m).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Absolute cutoff `tol * sigma_max * max(rows, cols)`.
pub fn rank_threshold(sigma_max: f64, rows: usize, cols: usize, tol: f64) -> f64 {
    tol * sigma_max * rows.max(cols) as f64
}

/// Count of singular values strictly above [`rank_threshold`].
pub fn rank_from_singular_values(sv: &[f64], rows: usize, cols: usize, tol: f64) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    let cut = rank_threshold(smax, rows, cols, tol);
    sv.iter().filter(|&&s| s > cut).count()
}

pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    rank_from_singular_values(&singular_values(m), m.nrows(), m.ncols(), tol)
}

/// `sigma_max / sigma_min` over the `min(rows, cols)` singular values;
/// infinite when the smallest one is zero.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Minimum-norm least-squares solution of `m x = b` through the SVD
/// pseudo-inverse, discarding singular values at or below the rank cutoff.
pub fn min_norm_solve(m: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> DVector<f64> {
    assert_eq!(m.nrows(), b.len(), "right-hand side length mismatch");
    if m.nrows() == 0 || m.ncols() == 0 {
        return DVector::zeros(m.ncols());
    }
    let svd = thin_svd(m);
    let (u, v_t) = (&svd.u, &svd.v_t);
    let smax = svd.singular_values.max();
    let cut = rank_threshold(smax, m.nrows(), m.ncols(), tol);
    let mut x = DVector::zeros(m.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cut {
            let coeff = u.column(i).dot(b) / s;
            x.axpy(coeff, &v_t.row(i).transpose(), 1.0);
        }
    }
    x
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn svd_reconstructs_low_rank_wide_matrices() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (r, k, c) = (rng.gen_range(2..8), rng.gen_range(1..5), rng.gen_range(4..14));
            let a = DMatrix::from_fn(r, k, |_, _| rng.gen_range(-1.0..1.0));
            let b = DMatrix::from_fn(k, c, |_, _| rng.gen_range(-1.0..1.0));
            let m = a * b;
            let svd = thin_svd(&m);
            let k = svd.singular_values.len();
            let back = &svd.u * DMatrix::from_diagonal(&svd.singular_values) * &svd.v_t;
            assert!((back - &m).amax() < 1e-12);
            let eye = DMatrix::<f64>::identity(k, k);
            assert!((svd.u.transpose() * &svd.u - &eye).amax() < 1e-12);
            assert!((&svd.v_t * svd.v_t.transpose() - &eye).amax() < 1e-12);
        }
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(numerical_rank(&DMatrix::zeros(3, 4), DEFAULT_RANK_TOL), 0);
        assert!(condition_number(&DMatrix::zeros(2, 2)).is_infinite());
    }

    #[test]
    fn rank_of_duplicate_columns() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(numerical_rank(&m, DEFAULT_RANK_TOL), 1);
    }

    #[test]
    fn min_norm_solution_of_underdetermined_system() {
        // x1 + x2 = 2 has minimum-norm solution (1, 1).
        let m = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let x = min_norm_solve(&m, &DVector::from_vec(vec![2.0]), DEFAULT_RANK_TOL);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn least_squares_of_overdetermined_system() {
        let m = DMatrix::from_row_slice(3, 1, &[1.0, 1.0, 1.0]);
        let x = min_norm_solve(&m, &DVector::from_vec(vec![1.0, 2.0, 3.0]), DEFAULT_RANK_TOL);
        assert!((x[0] - 2.0).abs() < 1e-14);
    }
}
