//! Jacobi-preconditioned Krylov solvers with order-independent reductions.

use rayon::prelude::*;

use crate::sparse::CsrMatrix;
use crate::{Error, Result};

const CHUNK: usize = 4096;

/// Dot product with a fixed reduction tree, identical for any thread count.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum())
        .collect();
    partial.iter().sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(y, x)| *y += alpha * x);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Cg,
    BiCgStab,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub kind: SolverKind,
    pub rel_tol: f64,
    /// Defaults to `20·√n`.
    pub max_iter: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { kind: SolverKind::Cg, rel_tol: 1e-10, max_iter: None }
    }
}

#[derive(Debug, Clone)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
}

fn true_residual(a: &CsrMatrix, x: &[f64], b: &[f64], r: &mut [f64]) -> f64 {
    a.matvec(x, r);
    r.par_iter_mut().zip(b.par_iter()).for_each(|(r, b)| *r = b - *r);
    norm(r)
}

pub fn solve(a: &CsrMatrix, b: &[f64], x0: Option<&[f64]>, opts: &SolverOptions) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.dim();
    let max_iter = opts.max_iter.unwrap_or_else(|| (20.0 * (n as f64).sqrt()).ceil() as usize).max(1);
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| if *d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut x = x0.map_or_else(|| vec![0.0; n], |x| x.to_vec());
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], SolveStats { iterations: 0, residual: 0.0, history: vec![0.0] }));
    }
    let mut history = Vec::new();
    let mut used = 0;
    // restart from the true residual if the recursive one drifted
    for _ in 0..3 {
        let remaining = max_iter - used;
        let it = match opts.kind {
            SolverKind::Cg => pcg(a, b, &mut x, &inv_diag, bnorm, opts.rel_tol, remaining, &mut history),
            SolverKind::BiCgStab => bicgstab(a, b, &mut x, &inv_diag, bnorm, opts.rel_tol, remaining, &mut history),
        };
        used += it;
        let mut r = vec![0.0; n];
        let res = true_residual(a, &x, b, &mut r) / bnorm;
        if res <= opts.rel_tol {
            return Ok((x, SolveStats { iterations: used, residual: res, history }));
        }
        if used >= max_iter {
            return Err(Error::NotConverged { iterations: used, residual: res, history });
        }
    }
    let mut r = vec![0.0; n];
    let res = true_residual(a, &x, b, &mut r) / bnorm;
    Err(Error::NotConverged { iterations: used, residual: res, history })
}

#[allow(clippy::too_many_arguments)]
fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    inv_diag: &[f64],
    bnorm: f64,
    tol: f64,
    max_iter: usize,
    history: &mut Vec<f64>,
) -> usize {
    let n = b.len();
    let mut r = vec![0.0; n];
    let mut rn = true_residual(a, x, b, &mut r);
    history.push(rn / bnorm);
    if rn <= tol * bnorm {
        return 0;
    }
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    for it in 1..=max_iter {
        a.matvec(&p, &mut q);
        let alpha = rz / dot(&p, &q);
        axpy(alpha, &p, x);
        axpy(-alpha, &q, &mut r);
        rn = norm(&r);
        history.push(rn / bnorm);
        if rn <= tol * bnorm {
            return it;
        }
        z.par_iter_mut().zip(r.par_iter().zip(inv_diag.par_iter())).for_each(|(z, (r, d))| *z = r * d);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut().zip(z.par_iter()).for_each(|(p, z)| *p = z + beta * *p);
    }
    max_iter
}

#[allow(clippy::too_many_arguments)]
fn bicgstab(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    inv_diag: &[f64],
    bnorm: f64,
    tol: f64,
    max_iter: usize,
    history: &mut Vec<f64>,
) -> usize {
    let n = b.len();
    let mut r = vec![0.0; n];
    let rn = true_residual(a, x, b, &mut r);
    history.push(rn / bnorm);
    if rn <= tol * bnorm {
        return 0;
    }
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut zt = vec![0.0; n];
    let mut t = vec![0.0; n];
    for it in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || omega == 0.0 {
            return it;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        p.par_iter_mut()
            .zip(r.par_iter().zip(v.par_iter()))
            .for_each(|(p, (r, v))| *p = r + beta * (*p - omega * v));
        y.par_iter_mut().zip(p.par_iter().zip(inv_diag.par_iter())).for_each(|(y, (p, d))| *y = p * d);
        a.matvec(&y, &mut v);
        alpha = rho / dot(&r_hat, &v);
        s.par_iter_mut().zip(r.par_iter().zip(v.par_iter())).for_each(|(s, (r, v))| *s = r - alpha * v);
        axpy(alpha, &y, x);
        let sn = norm(&s);
        if sn <= tol * bnorm {
            history.push(sn / bnorm);
            return it;
        }
        zt.par_iter_mut().zip(s.par_iter().zip(inv_diag.par_iter())).for_each(|(z, (s, d))| *z = s * d);
        a.matvec(&zt, &mut t);
        omega = dot(&t, &s) / dot(&t, &t);
        axpy(omega, &zt, x);
        r.par_iter_mut().zip(s.par_iter().zip(t.par_iter())).for_each(|(r, (s, t))| *r = s - omega * t);
        let rn = norm(&r);
        history.push(rn / bnorm);
        if rn <= tol * bnorm {
            return it;
        }
    }
    max_iter
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize, shift: f64, skew: f64) -> CsrMatrix {
        let rows = (0..n).map(|i| {
            let mut r = Vec::new();
            if i > 0 {
                r.push(i as u32 - 1);
            }
            r.push(i as u32);
            if i + 1 < n {
                r.push(i as u32 + 1);
            }
            r
        });
        let mut m = CsrMatrix::from_rows(rows);
        for i in 0..n {
            m.add(i, i, 2.0 + shift);
            if i > 0 {
                m.add(i, i - 1, -1.0 - skew);
            }
            if i + 1 < n {
                m.add(i, i + 1, -1.0 + skew);
            }
        }
        m
    }

    #[test]
    fn identity_converges_immediately() {
        let a = CsrMatrix::identity(5);
        let b = [1.0, 2.0, 3.0, 4.0, 5.0];
        let (x, st) = solve(&a, &b, None, &SolverOptions::default()).unwrap();
        assert_eq!(x, b.to_vec());
        assert!(st.iterations <= 1);
    }

    #[test]
    fn cg_and_bicgstab_reach_tolerance() {
        let n = 400;
        let b: Vec<f64> = (0..n).map(|i| ((i * 7) % 13) as f64 - 6.0).collect();
        let a = laplace_1d(n, 0.01, 0.0);
        let (x, st) = solve(&a, &b, None, &SolverOptions::default()).unwrap();
        let mut r = vec![0.0; n];
        assert!(true_residual(&a, &x, &b, &mut r) / norm(&b) <= 1e-10);
        assert!(st.residual <= 1e-10);
        let a = laplace_1d(n, 0.05, 0.2);
        let opts = SolverOptions { kind: SolverKind::BiCgStab, max_iter: Some(4000), ..Default::default() };
        let (x, _) = solve(&a, &b, None, &opts).unwrap();
        assert!(true_residual(&a, &x, &b, &mut r) / norm(&b) <= 1e-10);
    }

    #[test]
    fn iteration_cap_reports_history() {
        let a = laplace_1d(2000, 0.0, 0.0);
        let b = vec![1.0; 2000];
        let opts = SolverOptions { max_iter: Some(5), ..Default::default() };
        match solve(&a, &b, None, &opts) {
            Err(Error::NotConverged { iterations, history, .. }) => {
                assert_eq!(iterations, 5);
                assert!(history.len() >= 5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dot_is_thread_count_independent() {
        let v: Vec<f64> = (0..100_000).map(|i| (i as f64).sin()).collect();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| dot(&v, &v));
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| dot(&v, &v));
        assert_eq!(one.to_bits(), many.to_bits());
    }
}
