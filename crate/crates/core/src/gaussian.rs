//! Diffusion-scale search for a maximally concentrated bandlimited basis built from
//! heat-kernel atoms, and projection reconstruction onto it.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{symmetric_eigen_sorted, SpectralBasis};
use crate::operators::{heat_subspace_projector, joint_sqrt_weights, weighted_inner, GaussianSubspace, Projector};
use crate::scalar::Scalar;
use crate::time_axis::TimeAxis;

/// Relative threshold defining the numerical rank of `A`.
pub const RANK_TOL: f64 = 1e-10;

/// Candidate diffusion scales and, after a search, the score table `Φ(τ_v, τ_t)`.
#[derive(Debug, Clone, Serialize)]
pub struct ScaleGrid<T: Scalar> {
    pub vertex_scales: Vec<T>,
    pub time_scales: Vec<T>,
    /// Rows follow `vertex_scales`, columns `time_scales`.
    pub score_table: Option<DMatrix<T>>,
}

impl<T: Scalar> ScaleGrid<T> {
    pub fn new(vertex_scales: Vec<T>, time_scales: Vec<T>) -> Result<Self> {
        if vertex_scales.is_empty() || time_scales.is_empty() {
            return Err(Error::Config("empty scale grid".into()));
        }
        if vertex_scales.iter().chain(&time_scales).any(|s| !(*s > T::zero())) {
            return Err(Error::Config("diffusion scales must be positive".into()));
        }
        Ok(Self { vertex_scales, time_scales, score_table: None })
    }
}

/// Spectrum of `Π_Σ Π_H Π_Σ` restricted to its nonzero part.
#[derive(Debug, Clone)]
pub struct ConcentratedBasis<T: Scalar> {
    /// Descending eigenvalues above the rank threshold.
    pub eigenvalues: Vec<T>,
    /// Eigenvectors in sample coordinates, orthonormal under the weighted inner product.
    pub vectors: DMatrix<T>,
    /// `Φ`, the sum of the retained eigenvalues.
    pub score: T,
}

#[derive(Debug, Clone)]
pub struct ScaleSearch<T: Scalar> {
    pub tau_v: T,
    pub tau_t: T,
    pub grid: ScaleGrid<T>,
    pub basis: ConcentratedBasis<T>,
}

/// Eigenpairs of `A = Π_Σ Π_H Π_Σ` via the small matrix `Q_Hᵀ Π_Σ Q_H`.
pub fn concentrated_basis<T: Scalar>(p_sigma: &Projector<T>, p_h: &Projector<T>) -> Result<ConcentratedBasis<T>> {
    if p_sigma.dim() != p_h.dim() {
        return Err(Error::DimensionMismatch { expected: p_sigma.dim(), got: p_h.dim() });
    }
    let q = p_h.range_basis().ok_or_else(|| Error::Config("heat subspace needs a range basis".into()))?;
    let sq = p_sigma.apply_isometric_cols(&q);
    let small = q.tr_mul(&sq);
    let small = (&small + small.transpose()) * T::lit(0.5);
    let (vals, vecs) = symmetric_eigen_sorted(&small)?;
    let k = vals.len();
    let top = vals[k - 1].max(T::zero());
    let floor = top * T::lit(RANK_TOL);
    let mut eigenvalues = Vec::new();
    let mut cols = Vec::new();
    for j in (0..k).rev() {
        let l = vals[j];
        if l <= floor || l <= T::zero() {
            continue;
        }
        // ξ = Π_Σ Q w / √λ has unit norm and A ξ = λ ξ.
        let z = &sq * vecs.column(j) / l.sqrt();
        eigenvalues.push(l.min(T::one()));
        cols.push(z.component_div(p_sigma.sqrt_weights()));
    }
    if cols.is_empty() {
        return Err(Error::DegenerateSpectrum(top.to_f()));
    }
    let score = eigenvalues.iter().fold(T::zero(), |a, &b| a + b);
    Ok(ConcentratedBasis { eigenvalues, vectors: DMatrix::from_columns(&cols), score })
}

/// Grid search for the diffusion pair maximizing `Φ`; ties go to the smaller `τ_v`, then
/// the smaller `τ_t`.
pub fn scale_search<T: Scalar>(
    basis: &SpectralBasis<T>,
    axis: &TimeAxis<T>,
    p_sigma: &Projector<T>,
    centers: &[(usize, T)],
    grid: &ScaleGrid<T>,
) -> Result<ScaleSearch<T>> {
    let (nv, nt) = (grid.vertex_scales.len(), grid.time_scales.len());
    let cells: Vec<(usize, usize)> = (0..nv).flat_map(|i| (0..nt).map(move |j| (i, j))).collect();
    let results: Vec<Result<ConcentratedBasis<T>>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let gs = GaussianSubspace::new(grid.vertex_scales[i], grid.time_scales[j], centers.to_vec())?;
            let ph = heat_subspace_projector(basis, axis, &gs)?;
            concentrated_basis(p_sigma, &ph)
        })
        .collect();

    let mut table = DMatrix::zeros(nv, nt);
    let mut bases = Vec::with_capacity(cells.len());
    for (&(i, j), r) in cells.iter().zip(results) {
        let b = r?;
        table[(i, j)] = b.score;
        bases.push(((i, j), b));
    }
    let order = |idx: &[T]| {
        let mut o: Vec<usize> = (0..idx.len()).collect();
        o.sort_by(|&a, &b| idx[a].partial_cmp(&idx[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
        o
    };
    let (ov, ot) = (order(&grid.vertex_scales), order(&grid.time_scales));
    let mut best: Option<(usize, usize)> = None;
    for &i in &ov {
        for &j in &ot {
            if best.map_or(true, |(bi, bj)| table[(i, j)] > table[(bi, bj)]) {
                best = Some((i, j));
            }
        }
    }
    let (bi, bj) = best.expect("nonempty grid");
    let basis_star = bases.into_iter().find(|(c, _)| *c == (bi, bj)).map(|(_, b)| b).expect("cell present");
    let mut grid = grid.clone();
    grid.score_table = Some(table);
    Ok(ScaleSearch {
        tau_v: grid.vertex_scales[bi],
        tau_t: grid.time_scales[bj],
        grid,
        basis: basis_star,
    })
}

/// `f̂ = Σ_k ⟨f_obs, ξ_k⟩ ξ_k` under the joint quadrature weights.
pub fn project_reconstruct<T: Scalar>(f_obs: &DVector<T>, vectors: &DMatrix<T>, axis: &TimeAxis<T>) -> Result<DVector<T>> {
    if f_obs.len() != vectors.nrows() {
        return Err(Error::DimensionMismatch { expected: vectors.nrows(), got: f_obs.len() });
    }
    let n = vectors.nrows() / axis.len();
    let sw = joint_sqrt_weights(n, axis);
    let mut out = DVector::zeros(f_obs.len());
    for c in vectors.column_iter() {
        let c = c.into_owned();
        out += &c * weighted_inner(&sw, f_obs, &c);
    }
    Ok(out)
}

/// `sin(x)/x` with the limit value at zero.
pub fn sinc<T: Scalar>(x: T) -> T {
    if x.abs() < T::lit(1e-12) {
        T::one()
    } else {
        x.sin() / x
    }
}

/// `2 sinc(ω₀t) − sinc((ω₀−2)t) + ½ sinc((ω₀−4)t)`.
pub fn sinc_mixture<T: Scalar>(omega0: T, t: T) -> T {
    let two = T::lit(2.0);
    two * sinc(omega0 * t) - sinc((omega0 - two) * t) + T::lit(0.5) * sinc((omega0 - T::lit(4.0)) * t)
}

/// `Σ_{i<K} u_i ⊗ f` with the sinc mixture as `f`, vertex-major on the joint grid.
pub fn synthetic_signal<T: Scalar>(basis: &SpectralBasis<T>, axis: &TimeAxis<T>, k: usize, omega0: T) -> Result<DVector<T>> {
    let n = basis.len();
    if k == 0 || k > n {
        return Err(Error::RankExceeded { requested: k, available: n });
    }
    let u = basis.eigenvectors();
    let m = axis.len();
    let f: Vec<T> = axis.points().iter().map(|&t| sinc_mixture(omega0, t)).collect();
    Ok(DVector::from_fn(n * m, |i, _| {
        let (v, j) = (i / m, i % m);
        let s = (0..k).fold(T::zero(), |a, c| a + u[(v, c)]);
        s * f[j]
    }))
}
