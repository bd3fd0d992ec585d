//! Helpers and independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vertex_time::graph::{Graph, SpectralBasis};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn er(n: usize, p: f64, seed: u64) -> (Graph<f64>, SpectralBasis<f64>) {
    let g = Graph::erdos_renyi(n, p, &mut rng(seed)).unwrap();
    let b = SpectralBasis::of_graph(&g).unwrap();
    (g, b)
}

pub fn subset<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut s = sample(rng, n, k).into_vec();
    s.sort_unstable();
    s
}

pub fn gaussian_vec<R: Rng>(rng: &mut R, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal))
}

pub fn gaussian_mat<R: Rng>(rng: &mut R, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal))
}

/// Ascending eigenvalues and matching eigenvectors of a symmetric matrix.
pub fn sym_eig(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(m.nrows(), idx.len());
    for (j, &i) in idx.iter().enumerate() {
        vecs.set_column(j, &e.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn lambda_max_dense(m: &DMatrix<f64>) -> f64 {
    *sym_eig(m).0.last().unwrap()
}

pub fn sym_residual(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

pub fn idem_residual(m: &DMatrix<f64>) -> f64 {
    (m * m - m).amax()
}

/// Trapezoid weights on a uniform grid.
pub fn trapezoid(start: f64, end: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (end - start) / (m - 1) as f64;
    let t = (0..m).map(|i| start + h * i as f64).collect();
    let w = (0..m).map(|i| if i == 0 || i == m - 1 { h / 2.0 } else { h }).collect();
    (t, w)
}

/// Low-pass projector built directly from the sinc kernel, isometric coordinates.
pub fn sinc_band_projector(t: &[f64], w: &[f64], band: f64) -> DMatrix<f64> {
    let m = t.len();
    let k = DMatrix::from_fn(m, m, |i, j| {
        let d = t[i] - t[j];
        let kij = if d == 0.0 { band / std::f64::consts::PI } else { (band * d).sin() / (std::f64::consts::PI * d) };
        w[i].sqrt() * kij * w[j].sqrt()
    });
    let (vals, vecs) = sym_eig(&k);
    let mut p = DMatrix::zeros(m, m);
    for (j, &v) in vals.iter().enumerate() {
        if v >= 0.5 {
            let c = vecs.column(j);
            p += &c * c.transpose();
        }
    }
    p
}

pub fn diag_mask(mask: &[bool]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_iterator(mask.len(), mask.iter().map(|&b| if b { 1.0 } else { 0.0 })))
}

pub fn interval_mask(t: &[f64], center: f64, length: f64) -> Vec<bool> {
    let (lo, hi) = (center - length / 2.0, center + length / 2.0);
    t.iter().map(|&x| x >= lo - 1e-12 && x <= hi + 1e-12).collect()
}

/// Cyclic coordinate descent for `‖y - Dx‖² + μ‖x‖₁`.
pub fn lasso_cd(y: &DVector<f64>, d: &DMatrix<f64>, mu: f64, sweeps: usize) -> DVector<f64> {
    let n = d.ncols();
    let mut x = DVector::zeros(n);
    let mut r = y.clone();
    let norms: Vec<f64> = (0..n).map(|j| d.column(j).norm_squared()).collect();
    for _ in 0..sweeps {
        let mut delta = 0.0f64;
        for j in 0..n {
            if norms[j] == 0.0 {
                continue;
            }
            let col = d.column(j);
            let rho = col.dot(&r) + norms[j] * x[j];
            let new: f64 = if rho > mu / 2.0 {
                (rho - mu / 2.0) / norms[j]
            } else if rho < -mu / 2.0 {
                (rho + mu / 2.0) / norms[j]
            } else {
                0.0
            };
            let step: f64 = new - x[j];
            if step != 0.0 {
                r.axpy(-step, &col, 1.0);
                x[j] = new;
                delta = delta.max(step.abs());
            }
        }
        if delta < 1e-15 {
            break;
        }
    }
    x
}

pub fn lasso_objective(y: &DVector<f64>, d: &DMatrix<f64>, x: &DVector<f64>, mu: f64) -> f64 {
    (y - d * x).norm_squared() + mu * x.iter().map(|v| v.abs()).sum::<f64>()
}

/// All size-`k` subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// `λ_max(Π_Λ' Π_V' Π_Λ')` through the `|Λ'|×|Λ'|` compression `U_Λ'ᵀ D_V' U_Λ'`.
pub fn vertex_concentration(u: &DMatrix<f64>, spectrum: &[usize], vertices: &[usize]) -> f64 {
    let k = spectrum.len();
    let g = DMatrix::from_fn(k, k, |a, b| vertices.iter().map(|&v| u[(v, spectrum[a])] * u[(v, spectrum[b])]).sum());
    lambda_max_dense(&g)
}

/// Water-filling oracle: enumerate active sets of `min Σ c_k λ_k + μ Σ λ_k²` over
/// `λ ≥ 0, Σ λ = p` and keep the best KKT point.
pub fn water_filling_oracle(c: &[f64], p: f64, mu: f64) -> Vec<f64> {
    let free: Vec<usize> = (0..c.len()).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << free.len()) {
        let act: Vec<usize> = free.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, &k)| k).collect();
        // stationarity on the active set: c_k + 2 μ λ_k = ν
        let nu = (2.0 * mu * p + act.iter().map(|&k| c[k]).sum::<f64>()) / act.len() as f64;
        let mut lam = vec![0.0; c.len()];
        let mut ok = true;
        for &k in &act {
            lam[k] = (nu - c[k]) / (2.0 * mu);
            ok &= lam[k] >= -1e-12;
        }
        for &k in &free {
            if !act.contains(&k) {
                ok &= c[k] >= nu - 1e-12;
            }
        }
        if ok {
            let obj: f64 = (0..c.len()).map(|k| c[k] * lam[k] + mu * lam[k] * lam[k]).sum();
            if best.as_ref().map_or(true, |(b, _)| obj < *b) {
                best = Some((obj, lam));
            }
        }
    }
    best.expect("feasible active set").1
}

/// Best Frobenius-norm retention over all row subsets of size `k`.
pub fn block_sparse_oracle(c: &DMatrix<f64>, k: usize) -> f64 {
    combinations(c.nrows(), k)
        .iter()
        .map(|rows| rows.iter().map(|&r| c.row(r).norm_squared()).sum::<f64>())
        .fold(f64::MIN, f64::max)
}

/// Greedy selection score `cos(max(0, cos⁻¹√(λ_V λ_T) − cos⁻¹β))` written out directly.
pub fn score_oracle(lv: f64, lt: f64, beta: f64) -> f64 {
    let gap = (lv * lt).clamp(0.0, 1.0).sqrt().acos() - beta.clamp(0.0, 1.0).acos();
    if gap <= 0.0 {
        1.0
    } else {
        gap.cos()
    }
}
