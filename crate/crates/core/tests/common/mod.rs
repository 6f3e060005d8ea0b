//! Test-only oracles, kept independent of the library's numerical paths.
#![allow(dead_code)]

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

/// `B Bᵀ` with `B` uniform on `[-1, 1]`, shape `n x (n + 3)`.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize) -> Array2<f64> {
    let b = Array2::from_shape_fn((n, n + 3), |_| rng.random_range(-1.0..1.0));
    b.dot(&b.t())
}

/// Coefficients of `det(λI - A)`, highest power first, for `n <= 3`.
fn char_poly(a: &Array2<f64>) -> Vec<f64> {
    match a.nrows() {
        1 => vec![1.0, -a[[0, 0]]],
        2 => {
            let tr = a[[0, 0]] + a[[1, 1]];
            let det = a[[0, 0]] * a[[1, 1]] - a[[0, 1]] * a[[1, 0]];
            vec![1.0, -tr, det]
        }
        3 => {
            let tr = a[[0, 0]] + a[[1, 1]] + a[[2, 2]];
            let minor = |i: usize, j: usize| a[[i, i]] * a[[j, j]] - a[[i, j]] * a[[j, i]];
            let m = minor(0, 1) + minor(0, 2) + minor(1, 2);
            let det = a[[0, 0]] * minor(1, 2) - a[[0, 1]] * (a[[1, 0]] * a[[2, 2]] - a[[1, 2]] * a[[2, 0]])
                + a[[0, 2]] * (a[[1, 0]] * a[[2, 1]] - a[[1, 1]] * a[[2, 0]]);
            vec![1.0, -tr, m, -det]
        }
        n => panic!("characteristic polynomial oracle supports n <= 3, got {n}"),
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, c| acc * x + c)
}

fn bisect(coeffs: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = horner(coeffs, lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fmid = horner(coeffs, mid);
        if fmid == 0.0 {
            return mid;
        }
        if (fmid < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvalues of a symmetric matrix with `n <= 3`, descending, by
/// bisection on the characteristic polynomial between its critical points.
pub fn char_poly_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    let p = char_poly(a);
    let bound = a.iter().map(|x| x.abs()).sum::<f64>() + 1.0;
    let mut breaks = vec![-bound];
    match p.len() {
        3 => breaks.push(-p[1] / 2.0),
        4 => {
            // p'(x) = 3x² + 2 p1 x + p2
            let disc = (4.0 * p[1] * p[1] - 12.0 * p[2]).max(0.0).sqrt();
            breaks.push((-2.0 * p[1] - disc) / 6.0);
            breaks.push((-2.0 * p[1] + disc) / 6.0);
        }
        _ => {}
    }
    breaks.push(bound);
    let mut roots: Vec<f64> = breaks.windows(2).map(|w| bisect(&p, w[0], w[1])).collect();
    roots.sort_by(|x, y| y.total_cmp(x));
    roots
}

/// First fractional eigenvalue of a return block (assets by periods) via
/// nalgebra's symmetric eigensolver.
pub fn nalgebra_first_fraction(block: &Array2<f64>) -> f64 {
    let (n, t) = block.dim();
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, t);
    for i in 0..n {
        let mean = block.row(i).sum() / t as f64;
        for k in 0..t {
            m[(i, k)] = block[[i, k]] - mean;
        }
    }
    let cov = &m * m.transpose();
    let eig = nalgebra::SymmetricEigen::new(cov);
    let total: f64 = eig.eigenvalues.iter().map(|v| v.max(0.0)).sum();
    let top = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    top / total
}

/// Mean first fraction over `draws` independent standard-normal blocks.
pub fn monte_carlo_first_fraction<R: Rng>(rng: &mut R, n: usize, window: usize, draws: usize) -> f64 {
    let total: f64 = (0..draws)
        .map(|_| {
            let block = Array2::from_shape_fn((n, window), |_| rng.sample::<f64, _>(StandardNormal));
            nalgebra_first_fraction(&block)
        })
        .sum();
    total / draws as f64
}

/// Pearson correlation of two equal-length slices.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}
