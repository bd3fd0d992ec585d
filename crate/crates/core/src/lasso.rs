//! `min ‖y - Dx‖² + μ‖x‖₁` by monotone FISTA with adaptive restart.

use nalgebra::{DMatrix, DVector};

use crate::graph::symmetric_eigen_sorted;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct LassoOptions {
    /// Relative objective change that ends the iteration.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LassoOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 5000 }
    }
}

#[derive(Debug, Clone)]
pub struct LassoResult<T: Scalar> {
    pub x: DVector<T>,
    pub objective: T,
    pub iterations: usize,
    pub converged: bool,
}

pub fn objective<T: Scalar>(y: &DVector<T>, d: &DMatrix<T>, x: &DVector<T>, mu: T) -> T {
    (y - d * x).norm_squared() + mu * x.lp_norm(1)
}

/// Largest squared singular value of `d`, from the smaller Gram matrix.
pub fn sigma_max_sq<T: Scalar>(d: &DMatrix<T>) -> T {
    let g = if d.nrows() < d.ncols() { d * d.transpose() } else { d.tr_mul(d) };
    match symmetric_eigen_sorted(&g) {
        Ok((vals, _)) => vals[vals.len() - 1].max(T::zero()),
        Err(_) => g.norm(),
    }
}

fn soft<T: Scalar>(v: T, th: T) -> T {
    if v > th {
        v - th
    } else if v < -th {
        v + th
    } else {
        T::zero()
    }
}

pub fn lasso<T: Scalar>(y: &DVector<T>, d: &DMatrix<T>, mu: T, opts: LassoOptions) -> LassoResult<T> {
    lasso_warm(y, d, mu, None, opts)
}

/// Lasso from an optional starting point; the returned objective never exceeds the
/// objective at the start.
pub fn lasso_warm<T: Scalar>(y: &DVector<T>, d: &DMatrix<T>, mu: T, x0: Option<&DVector<T>>, opts: LassoOptions) -> LassoResult<T> {
    let k = d.ncols();
    let mut x = x0.cloned().unwrap_or_else(|| DVector::zeros(k));
    let lip = T::lit(2.0) * sigma_max_sq(d);
    if lip <= T::zero() {
        let obj = objective(y, d, &x, mu);
        return LassoResult { x: DVector::zeros(k), objective: y.norm_squared().min(obj), iterations: 0, converged: true };
    }
    let step = T::one() / lip;
    let th = mu * step;
    let dty = d.tr_mul(y);
    // Wide dictionaries are cheaper to apply through `D` and `Dᵀ` than through the Gram.
    let gram = (k <= d.nrows()).then(|| d.tr_mul(d));
    let two = T::lit(2.0);
    let tol = T::lit(opts.tol);

    let mut f = objective(y, d, &x, mu);
    let mut zpt = x.clone();
    let mut t = T::one();
    for it in 1..=opts.max_iter {
        let grad = normal_product(d, gram.as_ref(), &zpt, &dty) * two;
        let cand = DVector::from_iterator(k, (0..k).map(|i| soft(zpt[i] - step * grad[i], th)));
        let fc = objective(y, d, &cand, mu);
        let t_next = (T::one() + (T::one() + T::lit(4.0) * t * t).sqrt()) * T::lit(0.5);
        let x_prev = x.clone();
        let f_prev = f;
        if fc <= f {
            x = cand.clone();
            f = fc;
            zpt = &x + (&x - &x_prev) * ((t - T::one()) / t_next);
            t = t_next;
        } else {
            // Restart momentum from the best point.
            zpt = x.clone();
            t = T::one();
        }
        let rel = (f_prev - f).abs() / f.abs().max(T::lit(1e-30));
        if fc <= f_prev && rel <= tol && prox_residual(d, gram.as_ref(), &dty, &x, step, th) <= T::lit(1e-7) * (T::one() + dty.amax()) {
            return LassoResult { x, objective: f, iterations: it, converged: true };
        }
    }
    LassoResult { x, objective: f, iterations: opts.max_iter, converged: false }
}

/// `DᵀD x − Dᵀy`.
fn normal_product<T: Scalar>(d: &DMatrix<T>, gram: Option<&DMatrix<T>>, x: &DVector<T>, dty: &DVector<T>) -> DVector<T> {
    match gram {
        Some(g) => g * x - dty,
        None => d.tr_mul(&(d * x)) - dty,
    }
}

fn prox_residual<T: Scalar>(d: &DMatrix<T>, gram: Option<&DMatrix<T>>, dty: &DVector<T>, x: &DVector<T>, step: T, th: T) -> T {
    let grad = normal_product(d, gram, x, dty) * T::lit(2.0);
    let mut r = T::zero();
    for i in 0..x.len() {
        let p = soft(x[i] - step * grad[i], th);
        r = r.max((p - x[i]).abs());
    }
    r / step
}

/// Largest KKT violation `|Dᵀ(Dx - y)|` beyond `μ/2` on the zero coordinates.
pub fn kkt_violation<T: Scalar>(y: &DVector<T>, d: &DMatrix<T>, x: &DVector<T>, mu: T) -> T {
    let g = d.tr_mul(&(d * x - y));
    let half = mu * T::lit(0.5);
    let mut worst = T::zero();
    for i in 0..x.len() {
        if x[i] == T::zero() {
            worst = worst.max(g[i].abs() - half);
        }
    }
    worst
}
