//! Cyclic Jacobi rotations for dense symmetric matrices.
//!
//! Each rotation zeroes one off-diagonal pair; a sweep visits every pair once.
//! Convergence is quadratic once the off-diagonal mass is small, so a handful
//! of sweeps suffices for the matrix sizes handled here (a few dozen assets).

use ndarray::Array2;

/// Sweep cap before giving up.
pub const MAX_SWEEPS: usize = 64;

pub(crate) struct Decomposition {
    /// Unsorted eigenvalues.
    pub values: Vec<f64>,
    /// Column `j` pairs with `values[j]`.
    pub vectors: Array2<f64>,
}

fn off_diagonal_norm(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            sum += a[[p, q]] * a[[p, q]];
        }
    }
    (2.0 * sum).sqrt()
}

/// Diagonalizes the symmetric matrix `a`. On failure returns the residual
/// off-diagonal norm reached after [`MAX_SWEEPS`].
pub(crate) fn decompose(a: &Array2<f64>) -> Result<Decomposition, f64> {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = Array2::<f64>::eye(n);
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = f64::EPSILON * scale;

    let mut converged = n < 2 || scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
        converged = off_diagonal_norm(&a) <= target;
    }
    if !converged {
        return Err(off_diagonal_norm(&a));
    }
    Ok(Decomposition {
        values: (0..n).map(|i| a[[i, i]]).collect(),
        vectors: v,
    })
}

/// Applies `A <- Jᵀ A J` and `V <- V J` for the plane rotation in (p, q).
fn rotate(a: &mut Array2<f64>, v: &mut Array2<f64>, p: usize, q: usize, c: f64, s: f64) {
    let n = a.nrows();
    for k in 0..n {
        let akp = a[[k, p]];
        let akq = a[[k, q]];
        a[[k, p]] = c * akp - s * akq;
        a[[k, q]] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[[p, k]];
        let aqk = a[[q, k]];
        a[[p, k]] = c * apk - s * aqk;
        a[[q, k]] = s * apk + c * aqk;
    }
    a[[p, q]] = 0.0;
    a[[q, p]] = 0.0;
    for k in 0..n {
        let vkp = v[[k, p]];
        let vkq = v[[k, q]];
        v[[k, p]] = c * vkp - s * vkq;
        v[[k, q]] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn two_by_two_analytic() {
        let d = decompose(&array![[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let mut vals = d.values.clone();
        vals.sort_by(|a, b| b.total_cmp(a));
        assert!((vals[0] - 3.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_input_needs_no_rotation() {
        let a = array![[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]];
        let d = decompose(&a).unwrap();
        assert_eq!(d.values, vec![3.0, 1.0, 2.0]);
        assert_eq!(d.vectors, Array2::eye(3));
    }

    #[test]
    fn zero_matrix_is_trivially_diagonal() {
        let d = decompose(&Array2::zeros((3, 3))).unwrap();
        assert_eq!(d.values, vec![0.0; 3]);
    }
}
