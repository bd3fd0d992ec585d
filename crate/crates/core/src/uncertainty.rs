//! Vertex-time uncertainty: the feasible spread region, its boundary-achieving signals,
//! product-structure spread bounds and the perfect-localization test.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SpectralBasis;
use crate::operators::{lambda_max, lambda_max_value, spectral_mask, vertex_mask, Projector};
use crate::scalar::Scalar;
use crate::time_axis::{band_limit, band_spectrum, time_limit, FrequencyBand, TimeAxis, TimeInterval};

/// Slack allowed on inverse-cosine arguments before they are reported as out of domain.
pub const ACOS_SLACK: f64 = 1e-9;

/// `cos⁻¹ x` for `x ∈ [0, 1]`, clamping drift up to [`ACOS_SLACK`].
pub fn acos_unit<T: Scalar>(x: T) -> Result<T> {
    let s = T::lit(ACOS_SLACK);
    if !(x >= -s && x <= T::one() + s) {
        return Err(Error::DomainError(x.to_f()));
    }
    Ok(x.clamp_to(T::zero(), T::one()).acos())
}

fn angle_of_eig<T: Scalar>(lambda: T) -> T {
    lambda.clamp_to(T::zero(), T::one()).sqrt().acos()
}

/// `cos(max(0, θ - φ))`: the upper arc; saturates at 1 once `φ ≥ θ`.
pub fn arc_upper<T: Scalar>(theta: T, phi: T) -> T {
    (theta - phi).max(T::zero()).cos()
}

/// `sin(max(0, θ - φ))`: the lower arc, clamped at 0.
pub fn arc_lower<T: Scalar>(theta: T, phi: T) -> T {
    (theta - phi).max(T::zero()).sin()
}

/// Region of achievable `(α_VT, β_SF)` pairs.
///
/// Field names read `outer_inner_outer`; a trailing `c` marks a complement.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FeasibleRegion<T> {
    pub sf_vt_sf: T,
    pub sf_vtc_sf: T,
    pub sfc_vt_sfc: T,
    pub sfc_vtc_sfc: T,
    pub vt_sf_vt: T,
    pub vt_sfc_vt: T,
    pub vtc_sf_vtc: T,
    pub vtc_sfc_vtc: T,
}

impl<T: Scalar> FeasibleRegion<T> {
    pub fn corner_eigs(&self) -> [T; 8] {
        [
            self.sf_vt_sf,
            self.sf_vtc_sf,
            self.sfc_vt_sfc,
            self.sfc_vtc_sfc,
            self.vt_sf_vt,
            self.vt_sfc_vt,
            self.vtc_sf_vtc,
            self.vtc_sfc_vtc,
        ]
    }

    fn alpha_angles(alpha: T) -> (T, T) {
        let a = alpha.clamp_to(T::zero(), T::one());
        let abar = (T::one() - a * a).max(T::zero()).sqrt();
        (a.acos(), abar.acos())
    }

    /// Largest admissible `β_SF` at a given `α_VT`.
    pub fn beta_max(&self, alpha: T) -> T {
        let (pa, pabar) = Self::alpha_angles(alpha);
        arc_upper(angle_of_eig(self.sf_vt_sf), pa).min(arc_upper(angle_of_eig(self.sf_vtc_sf), pabar))
    }

    /// Smallest admissible `β_SF` at a given `α_VT`.
    pub fn beta_min(&self, alpha: T) -> T {
        let (pa, pabar) = Self::alpha_angles(alpha);
        arc_lower(angle_of_eig(self.sfc_vt_sfc), pa).max(arc_lower(angle_of_eig(self.sfc_vtc_sfc), pabar))
    }

    pub fn contains(&self, alpha: T, beta: T, tol: T) -> bool {
        alpha >= -tol
            && alpha <= T::one() + tol
            && beta >= self.beta_min(alpha) - tol
            && beta <= self.beta_max(alpha) + tol
    }

    /// `(α², β²_max, β²_min)` sampled on a uniform `α²` grid of `points` values.
    pub fn boundary(&self, points: usize) -> Vec<(T, T, T)> {
        let denom = T::from_usize_lossy(points.max(2) - 1);
        (0..points)
            .map(|i| {
                let a2 = T::from_usize_lossy(i) / denom;
                let a = a2.sqrt();
                let bmax = self.beta_max(a);
                let bmin = self.beta_min(a).min(bmax);
                (a2, bmax * bmax, bmin * bmin)
            })
            .collect()
    }
}

/// Number of `α²` samples used when the boundary is emitted as a table.
pub const BOUNDARY_POINTS: usize = 512;

/// Sandwich eigenvalues that determine the feasible region.
pub fn feasible_region<T: Scalar>(p_vt: &Projector<T>, p_sf: &Projector<T>) -> Result<FeasibleRegion<T>> {
    let vtc = p_vt.complement();
    let sfc = p_sf.complement();
    Ok(FeasibleRegion {
        sf_vt_sf: lambda_max_value(p_sf, p_vt)?,
        sf_vtc_sf: lambda_max_value(p_sf, &vtc)?,
        sfc_vt_sfc: lambda_max_value(&sfc, p_vt)?,
        sfc_vtc_sfc: lambda_max_value(&sfc, &vtc)?,
        vt_sf_vt: lambda_max_value(p_vt, p_sf)?,
        vt_sfc_vt: lambda_max_value(p_vt, &sfc)?,
        vtc_sf_vtc: lambda_max_value(&vtc, p_sf)?,
        vtc_sfc_vtc: lambda_max_value(&vtc, &sfc)?,
    })
}

/// Unit-norm signal `f = pψ₀ + qΠ_VT ψ₀` on the upper-right arc, where `ψ₀` is the leading
/// eigenvector of `Π_SF Π_VT Π_SF`. The arc equality holds for `α ≥ √λ_max`.
pub fn boundary_achiever<T: Scalar>(p_vt: &Projector<T>, p_sf: &Projector<T>, alpha: T) -> Result<DVector<T>> {
    let (lam, psi) = lambda_max(p_sf, p_vt)?;
    let eps = T::lit(1e-10);
    if lam <= eps || lam >= T::one() - eps {
        return Err(Error::DegenerateSpectrum(lam.to_f()));
    }
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::DomainError(alpha.to_f()));
    }
    let p = ((T::one() - alpha * alpha) / (T::one() - lam)).sqrt();
    let q = alpha / lam.sqrt() - p;
    Ok(&psi * p + p_vt.apply(&psi) * q)
}

/// Perfect localization: `λ_max(Π_SF Π_VT Π_SF) ≥ 1 - 1e-8`; the witness is the leading
/// eigenvector.
pub fn perfect_localization_test<T: Scalar>(p_vt: &Projector<T>, p_sf: &Projector<T>) -> Result<(bool, Option<DVector<T>>)> {
    let (lam, w) = lambda_max(p_sf, p_vt)?;
    if lam >= T::one() - T::lit(1e-8) {
        Ok((true, Some(w)))
    } else {
        Ok((false, None))
    }
}

/// Product-structure subsets `S = V' × T'` and `Σ = Λ' × Ω'`.
#[derive(Debug, Clone)]
pub struct ProductSubsets<T> {
    pub vertices: Vec<usize>,
    pub interval: TimeInterval<T>,
    pub spectrum: Vec<usize>,
    pub band: FrequencyBand<T>,
}

/// Factor spreads and the product bounds they imply. Spreads are stored squared.
#[derive(Debug, Clone, Serialize)]
pub struct SpreadBounds<T> {
    /// `α_T'(v)²` per vertex, `None` for a zero slice.
    pub time_spread: Vec<Option<T>>,
    /// `α_V'(t)²` per grid time, `None` for a zero slice.
    pub vertex_spread: Vec<Option<T>>,
    /// `β_Ω'(λ_k)²` per graph frequency.
    pub frequency_spread: Vec<Option<T>>,
    /// `β_Λ'(ω)²` per temporal frequency mode.
    pub spectral_spread: Vec<Option<T>>,
    pub alpha_time_min: T,
    pub alpha_time_max: T,
    pub alpha_vertex_min: T,
    pub alpha_vertex_max: T,
    pub beta_spectral_min: T,
    pub beta_spectral_max: T,
    pub beta_frequency_min: T,
    pub beta_frequency_max: T,
    /// Bounds on `α_S²`.
    pub alpha2_lo: T,
    pub alpha2_hi: T,
    /// Bounds on `β_Σ²`.
    pub beta2_lo: T,
    pub beta2_hi: T,
    /// Measured `α_S²` and `β_Σ²`.
    pub alpha2: T,
    pub beta2: T,
}

fn ratio<T: Scalar>(num: T, den: T, total: T) -> Option<T> {
    if den <= total * T::lit(1e-30) || den <= T::zero() {
        None
    } else {
        Some(num / den)
    }
}

fn min_max<T: Scalar>(v: &[Option<T>]) -> (T, T) {
    let mut lo: Option<T> = None;
    let mut hi: Option<T> = None;
    for x in v.iter().flatten() {
        lo = Some(lo.map_or(*x, |l| l.min(*x)));
        hi = Some(hi.map_or(*x, |h| h.max(*x)));
    }
    (lo.unwrap_or(T::zero()), hi.unwrap_or(T::zero()))
}

/// Factor spreads of `f` (vertex-major, length `N·M`) and the product bounds on
/// `α_S²` and `β_Σ²`. Temporal frequency is resolved in the eigenbasis of the discretized
/// band-limiting kernel, in which `Π_Ω'` is diagonal.
pub fn product_spread_bounds<T: Scalar>(
    f: &DVector<T>,
    basis: &SpectralBasis<T>,
    axis: &TimeAxis<T>,
    subsets: &ProductSubsets<T>,
) -> Result<SpreadBounds<T>> {
    let n = basis.len();
    let m = axis.len();
    if f.len() != n * m {
        return Err(Error::DimensionMismatch { expected: n * m, got: f.len() });
    }
    let w = axis.weights();
    let sw = axis.sqrt_weights();
    let x = DMatrix::from_row_slice(n, m, f.as_slice());
    let vmask = {
        let mut mk = vec![false; n];
        for &v in &subsets.vertices {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, size: n });
            }
            mk[v] = true;
        }
        mk
    };
    let tmask = subsets.interval.mask(axis);
    let mut lmask = vec![false; n];
    for &k in &subsets.spectrum {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, size: n });
        }
        lmask[k] = true;
    }

    let mut total = T::zero();
    for v in 0..n {
        for k in 0..m {
            total += w[k] * x[(v, k)] * x[(v, k)];
        }
    }
    if total <= T::zero() {
        return Err(Error::ZeroSignal);
    }

    let time_spread: Vec<Option<T>> = (0..n)
        .map(|v| {
            let (mut num, mut den) = (T::zero(), T::zero());
            for k in 0..m {
                let e = w[k] * x[(v, k)] * x[(v, k)];
                den += e;
                if tmask[k] {
                    num += e;
                }
            }
            ratio(num, den, total)
        })
        .collect();
    let vertex_spread: Vec<Option<T>> = (0..m)
        .map(|k| {
            let (mut num, mut den) = (T::zero(), T::zero());
            for v in 0..n {
                let e = x[(v, k)] * x[(v, k)];
                den += e;
                if vmask[v] {
                    num += e;
                }
            }
            ratio(num, den, total / axis.span())
        })
        .collect();

    let mut alpha_num = T::zero();
    for v in 0..n {
        if vmask[v] {
            for k in 0..m {
                if tmask[k] {
                    alpha_num += w[k] * x[(v, k)] * x[(v, k)];
                }
            }
        }
    }

    let spec = band_spectrum(axis, &subsets.band)?;
    let mut z = x.clone();
    for k in 0..m {
        z.column_mut(k).scale_mut(sw[k]);
    }
    let coeffs = basis.eigenvectors().tr_mul(&z) * &spec.vectors;
    let in_band = spec.in_band;
    let frequency_spread: Vec<Option<T>> = (0..n)
        .map(|kk| {
            let row = coeffs.row(kk);
            let den = row.norm_squared();
            let num = row.columns(0, in_band).norm_squared();
            ratio(num, den, total)
        })
        .collect();
    let spectral_spread: Vec<Option<T>> = (0..m)
        .map(|j| {
            let col = coeffs.column(j);
            let den = col.norm_squared();
            let mut num = T::zero();
            for kk in 0..n {
                if lmask[kk] {
                    num += col[kk] * col[kk];
                }
            }
            ratio(num, den, total)
        })
        .collect();
    let mut beta_num = T::zero();
    for kk in 0..n {
        if lmask[kk] {
            beta_num += coeffs.row(kk).columns(0, in_band).norm_squared();
        }
    }

    let (at_lo, at_hi) = min_max(&time_spread);
    let (av_lo, av_hi) = min_max(&vertex_spread);
    let (bl_lo, bl_hi) = min_max(&spectral_spread);
    let (bo_lo, bo_hi) = min_max(&frequency_spread);
    Ok(SpreadBounds {
        time_spread,
        vertex_spread,
        frequency_spread,
        spectral_spread,
        alpha_time_min: at_lo,
        alpha_time_max: at_hi,
        alpha_vertex_min: av_lo,
        alpha_vertex_max: av_hi,
        beta_spectral_min: bl_lo,
        beta_spectral_max: bl_hi,
        beta_frequency_min: bo_lo,
        beta_frequency_max: bo_hi,
        alpha2_lo: at_lo * av_lo,
        alpha2_hi: at_hi * av_hi,
        beta2_lo: bo_lo * bl_lo,
        beta2_hi: bo_hi * bl_hi,
        alpha2: alpha_num / total,
        beta2: beta_num / coeffs.norm_squared(),
    })
}

/// Largest sandwich eigenvalues of the vertex and time factors. Index order:
/// `[P Q P, P̄ Q P̄, P Q̄ P, P̄ Q̄ P̄]` with `P` spectral/band and `Q` vertex/time mask.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProductEigs<T> {
    pub vertex: [T; 4],
    pub time: [T; 4],
}

pub fn product_eigs<T: Scalar>(basis: &SpectralBasis<T>, axis: &TimeAxis<T>, subsets: &ProductSubsets<T>) -> Result<ProductEigs<T>> {
    let pl = spectral_mask(basis, &subsets.spectrum)?;
    let pv = vertex_mask(basis.len(), &subsets.vertices)?;
    let po = band_limit(axis, &subsets.band)?;
    let pt = time_limit(axis, &subsets.interval)?;
    let four = |p: &Projector<T>, q: &Projector<T>| -> Result<[T; 4]> {
        let (pc, qc) = (p.complement(), q.complement());
        Ok([
            lambda_max_value(p, q)?,
            lambda_max_value(&pc, q)?,
            lambda_max_value(p, &qc)?,
            lambda_max_value(&pc, &qc)?,
        ])
    };
    Ok(ProductEigs { vertex: four(&pl, &pv)?, time: four(&po, &pt)? })
}

/// Upper and lower bounds on `α_S` from the factor eigenvalues and frequency spreads.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaBounds<T> {
    pub upper: [T; 2],
    pub lower: [T; 2],
}

impl<T: Scalar> AlphaBounds<T> {
    pub fn upper_bound(&self) -> T {
        self.upper[0].min(self.upper[1])
    }

    pub fn lower_bound(&self) -> T {
        self.lower[0].max(self.lower[1])
    }
}

/// The four α_S bounds. `beta_*` arguments are unsquared spreads.
pub fn product_alpha_bounds<T: Scalar>(
    eigs: &ProductEigs<T>,
    beta_spectral_min: T,
    beta_spectral_max: T,
    beta_frequency_min: T,
    beta_frequency_max: T,
) -> Result<AlphaBounds<T>> {
    let th = |i: usize| acos_unit((eigs.vertex[i] * eigs.time[i]).max(T::zero()).sqrt());
    let bmin = beta_spectral_min * beta_frequency_min;
    let bmax = beta_spectral_max * beta_frequency_max;
    let phi_min = acos_unit(bmin)?;
    let phi_max = acos_unit((T::one() - bmax * bmax).max(T::zero()).sqrt())?;
    Ok(AlphaBounds {
        upper: [arc_upper(th(0)?, phi_min), arc_upper(th(1)?, phi_max)],
        lower: [arc_lower(th(2)?, phi_min), arc_lower(th(3)?, phi_max)],
    })
}

/// Upper bound on `β_Σ` given the minimal vertex and time spreads (unsquared).
pub fn beta_sigma_upper<T: Scalar>(eigs: &ProductEigs<T>, alpha_vertex_min: T, alpha_time_min: T) -> Result<T> {
    let th = acos_unit((eigs.vertex[0] * eigs.time[0]).max(T::zero()).sqrt())?;
    Ok(arc_upper(th, acos_unit(alpha_vertex_min * alpha_time_min)?))
}
