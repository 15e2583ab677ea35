//! Gauss rules on intervals, triangles, tetrahedra and boxes.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

/// Points and weights on a reference cell.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Gauss–Jacobi nodes and weights on `[-1, 1]` for `(1−x)^α (1+x)^β`,
/// integer exponents, by Golub–Welsch.
pub fn gauss_jacobi(n: usize, alpha: u32, beta: u32) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (f64::from(alpha), f64::from(beta));
    let mut t = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        t[(k, k)] = if k == 0 { (b - a) / (a + b + 2.0) } else { (b * b - a * a) / (s * (s + 2.0)) };
        if k + 1 < n {
            let m = kf + 1.0;
            let s = 2.0 * m + a + b;
            let off = (4.0 * m * (m + a) * (m + b) * (m + a + b) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            t[(k, k + 1)] = off;
            t[(k + 1, k)] = off;
        }
    }
    let mu0 = 2f64.powi((alpha + beta + 1) as i32) * factorial(alpha) * factorial(beta) / factorial(alpha + beta + 1);
    let eig = SymmetricEigen::new(t);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    pairs.into_iter().unzip()
}

/// Gauss–Legendre rule on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_jacobi(n, 0, 0);
    (x.iter().map(|t| 0.5 * (t + 1.0)).collect(), w.iter().map(|v| 0.5 * v).collect())
}

/// Rule on `[0, 1]` for the weight `(1−t)^α`.
fn jacobi_unit(n: usize, alpha: u32) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_jacobi(n, alpha, 0);
    let scale = 0.5f64.powi(alpha as i32 + 1);
    (x.iter().map(|t| 0.5 * (t + 1.0)).collect(), w.iter().map(|v| v * scale).collect())
}

/// Collapsed product rule on the unit tetrahedron with `n³` points,
/// exact to degree `2n − 1`.
pub fn tet_rule(n: usize) -> QuadratureRule {
    let (u, wu) = jacobi_unit(n, 2);
    let (v, wv) = jacobi_unit(n, 1);
    let (w, ww) = gauss_legendre_unit(n);
    let mut points = Vec::with_capacity(n * n * n);
    let mut weights = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let x = u[i];
                let y = v[j] * (1.0 - u[i]);
                let z = w[k] * (1.0 - u[i]) * (1.0 - v[j]);
                points.push([x, y, z]);
                weights.push(wu[i] * wv[j] * ww[k]);
            }
        }
    }
    QuadratureRule { points, weights }
}

/// Collapsed product rule on the unit triangle with `n²` points.
pub fn triangle_rule(n: usize) -> QuadratureRule {
    let (u, wu) = jacobi_unit(n, 1);
    let (v, wv) = gauss_legendre_unit(n);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for i in 0..n {
        for j in 0..n {
            points.push([u[i], v[j] * (1.0 - u[i]), 0.0]);
            weights.push(wu[i] * wv[j]);
        }
    }
    QuadratureRule { points, weights }
}

/// Tensor Gauss rule on the unit cube.
pub fn cube_rule(n: usize) -> QuadratureRule {
    let (x, w) = gauss_legendre_unit(n);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                points.push([x[i], x[j], x[k]]);
                weights.push(w[i] * w[j] * w[k]);
            }
        }
    }
    QuadratureRule { points, weights }
}

/// Tensor Gauss rule on the unit square.
pub fn square_rule(n: usize) -> QuadratureRule {
    let (x, w) = gauss_legendre_unit(n);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for j in 0..n {
        for i in 0..n {
            points.push([x[i], x[j], 0.0]);
            weights.push(w[i] * w[j]);
        }
    }
    QuadratureRule { points, weights }
}

/// Default rules: degree 5 on simplices and boxes.
pub fn default_tet() -> &'static QuadratureRule {
    static R: OnceLock<QuadratureRule> = OnceLock::new();
    R.get_or_init(|| tet_rule(3))
}

pub fn default_triangle() -> &'static QuadratureRule {
    static R: OnceLock<QuadratureRule> = OnceLock::new();
    R.get_or_init(|| triangle_rule(3))
}

pub fn default_cube() -> &'static QuadratureRule {
    static R: OnceLock<QuadratureRule> = OnceLock::new();
    R.get_or_init(|| cube_rule(3))
}

pub fn default_square() -> &'static QuadratureRule {
    static R: OnceLock<QuadratureRule> = OnceLock::new();
    R.get_or_init(|| square_rule(3))
}
