//! Uniform time quadrature, time- and frequency-limiting operators, and discrete PSWFs.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::symmetric_eigen_sorted;
use crate::operators::{EigenMethod, Projector, ProjectorKind, Sandwich};
use crate::scalar::Scalar;

/// Uniform grid on `[start, end]` with trapezoid weights.
#[derive(Debug, Clone)]
pub struct TimeAxis<T: Scalar> {
    start: T,
    end: T,
    step: T,
    points: DVector<T>,
    weights: DVector<T>,
    sqrt_w: DVector<T>,
}

impl<T: Scalar> TimeAxis<T> {
    pub fn uniform(start: T, end: T, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidAxis(format!("need at least 2 grid points, got {m}")));
        }
        if !(end > start) {
            return Err(Error::InvalidAxis("span must have positive length".into()));
        }
        let step = (end - start) / T::from_usize_lossy(m - 1);
        let points = DVector::from_fn(m, |i, _| {
            if i == m - 1 {
                end
            } else {
                start + step * T::from_usize_lossy(i)
            }
        });
        let half = step * T::lit(0.5);
        let weights = DVector::from_fn(m, |i, _| if i == 0 || i == m - 1 { half } else { step });
        let sqrt_w = weights.map(|w| w.sqrt());
        Ok(Self { start, end, step, points, weights, sqrt_w })
    }

    /// Grid on `[-δ/2, δ/2]`.
    pub fn centered(delta: T, m: usize) -> Result<Self> {
        let h = delta * T::lit(0.5);
        Self::uniform(-h, h, m)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn end(&self) -> T {
        self.end
    }

    /// `δ = end - start`.
    pub fn span(&self) -> T {
        self.end - self.start
    }

    pub fn step(&self) -> T {
        self.step
    }

    /// Grid Nyquist rate `π/Δt`.
    pub fn nyquist(&self) -> T {
        T::pi() / self.step
    }

    pub fn points(&self) -> &DVector<T> {
        &self.points
    }

    pub fn weights(&self) -> &DVector<T> {
        &self.weights
    }

    pub fn sqrt_weights(&self) -> DVector<T> {
        self.sqrt_w.clone()
    }

    pub fn inner(&self, f: &DVector<T>, g: &DVector<T>) -> T {
        f.component_mul(g).dot(&self.weights)
    }

    pub fn norm(&self, f: &DVector<T>) -> T {
        self.inner(f, f).sqrt()
    }

    pub fn contains(&self, t: T) -> bool {
        let s = self.slack();
        t >= self.start - s && t <= self.end + s
    }

    /// Index of the nearest grid point (clamped to the span).
    pub fn nearest_index(&self, t: T) -> usize {
        let x = ((t - self.start) / self.step).round().to_f();
        x.clamp(0.0, (self.len() - 1) as f64) as usize
    }

    /// Tolerance used for inclusive endpoint comparisons.
    pub fn slack(&self) -> T {
        let scale = self.start.abs().max(self.end.abs()).max(T::one());
        T::lit(1e-12) * scale + T::default_epsilon() * T::lit(8.0) * scale
    }
}

/// `[center - length/2, center + length/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeInterval<T> {
    pub center: T,
    pub length: T,
}

impl<T: Scalar> TimeInterval<T> {
    pub fn new(center: T, length: T) -> Result<Self> {
        if !(length >= T::zero()) || !center.is_finite() || !length.is_finite() {
            return Err(Error::InvalidInterval(format!(
                "center {} length {}",
                center.to_f(),
                length.to_f()
            )));
        }
        Ok(Self { center, length })
    }

    pub fn from_bounds(lo: T, hi: T) -> Result<Self> {
        Self::new((lo + hi) * T::lit(0.5), hi - lo)
    }

    /// The whole span of `axis`.
    pub fn full(axis: &TimeAxis<T>) -> Self {
        Self { center: (axis.start() + axis.end()) * T::lit(0.5), length: axis.span() }
    }

    pub fn lower(&self) -> T {
        self.center - self.length * T::lit(0.5)
    }

    pub fn upper(&self) -> T {
        self.center + self.length * T::lit(0.5)
    }

    /// Intersection with the span of `axis`.
    pub fn clamped(&self, axis: &TimeAxis<T>) -> Self {
        let lo = self.lower().max(axis.start()).min(axis.end());
        let hi = self.upper().min(axis.end()).max(lo);
        Self { center: (lo + hi) * T::lit(0.5), length: hi - lo }
    }

    /// Grid membership; a point exactly on an endpoint is inside.
    pub fn mask(&self, axis: &TimeAxis<T>) -> Vec<bool> {
        let s = axis.slack();
        let (lo, hi) = (self.lower() - s, self.upper() + s);
        axis.points().iter().map(|&t| t >= lo && t <= hi).collect()
    }
}

/// `[ω_c - W, ω_c + W]` together with its mirror image for real signals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBand<T> {
    pub center: T,
    pub half_width: T,
}

impl<T: Scalar> FrequencyBand<T> {
    /// `center` must be 0 (lowpass) or at least `half_width` (two disjoint mirrored bands).
    pub fn new(center: T, half_width: T) -> Result<Self> {
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::InvalidBand(format!("half width {} must be positive", half_width.to_f())));
        }
        if center < T::zero() || (center > T::zero() && center < half_width) {
            return Err(Error::InvalidBand(format!(
                "center {} must be 0 or at least the half width {}",
                center.to_f(),
                half_width.to_f()
            )));
        }
        Ok(Self { center, half_width })
    }

    pub fn lowpass(half_width: T) -> Result<Self> {
        Self::new(T::zero(), half_width)
    }

    /// Highest angular frequency in the band.
    pub fn upper_edge(&self) -> T {
        self.center + self.half_width
    }

    /// Total (two-sided) bandwidth divided by π: the kernel diagonal value.
    pub fn kernel_diagonal(&self) -> T {
        let w = self.half_width / T::pi();
        if self.center == T::zero() {
            w
        } else {
            w * T::lit(2.0)
        }
    }

    /// Band-limiting kernel `K(t, s)` as a function of `τ = t - s`.
    pub fn kernel(&self, tau: T) -> T {
        if tau.abs() <= T::default_epsilon() {
            return self.kernel_diagonal();
        }
        let base = (self.half_width * tau).sin() / (T::pi() * tau);
        if self.center == T::zero() {
            base
        } else {
            base * T::lit(2.0) * (self.center * tau).cos()
        }
    }
}

/// Spectrum of the weighted band-limiting kernel `W^{1/2} K W^{1/2}` on the grid.
#[derive(Debug, Clone)]
pub struct BandSpectrum<T: Scalar> {
    /// Eigenvalues, descending.
    pub values: DVector<T>,
    /// Matching orthonormal eigenvectors (isometric coordinates), as columns.
    pub vectors: DMatrix<T>,
    /// Number of leading modes that form the band (eigenvalue ≥ 1/2).
    pub in_band: usize,
}

impl<T: Scalar> BandSpectrum<T> {
    pub fn band_basis(&self) -> DMatrix<T> {
        self.vectors.columns(0, self.in_band).into_owned()
    }
}

fn check_nyquist<T: Scalar>(axis: &TimeAxis<T>, band: &FrequencyBand<T>) -> Result<()> {
    if band.upper_edge() >= axis.nyquist() {
        return Err(Error::NyquistViolation { edge: band.upper_edge().to_f(), nyquist: axis.nyquist().to_f() });
    }
    Ok(())
}

/// Weighted band kernel matrix `W^{1/2} K W^{1/2}`.
pub fn band_kernel<T: Scalar>(axis: &TimeAxis<T>, band: &FrequencyBand<T>) -> Result<DMatrix<T>> {
    check_nyquist(axis, band)?;
    let m = axis.len();
    let t = axis.points();
    let sw = axis.sqrt_weights();
    Ok(DMatrix::from_fn(m, m, |i, j| sw[i] * band.kernel(t[i] - t[j]) * sw[j]))
}

pub fn band_spectrum<T: Scalar>(axis: &TimeAxis<T>, band: &FrequencyBand<T>) -> Result<BandSpectrum<T>> {
    let k = band_kernel(axis, band)?;
    let (vals, vecs) = symmetric_eigen_sorted(&k)?;
    let m = vals.len();
    let values = DVector::from_iterator(m, (0..m).rev().map(|i| vals[i]));
    let mut vectors = DMatrix::zeros(m, m);
    for (dst, src) in (0..m).rev().enumerate() {
        vectors.set_column(dst, &vecs.column(src));
    }
    let half = T::lit(0.5);
    let in_band = values.iter().take_while(|&&v| v >= half).count();
    Ok(BandSpectrum { values, vectors, in_band })
}

/// Time-limiting projector: 0/1 mask of grid points inside `interval`.
pub fn time_limit<T: Scalar>(axis: &TimeAxis<T>, interval: &TimeInterval<T>) -> Result<Projector<T>> {
    let mask = interval.mask(axis);
    if !mask.iter().any(|&b| b) {
        return Err(Error::EmptySupport);
    }
    Projector::diagonal(ProjectorKind::TimeMask, &mask, axis.sqrt_weights())
}

/// Frequency-limiting projector onto the grid-representable band `Ω'`: the spectral
/// projector of the discretized sinc operator onto its eigenvalues ≥ 1/2.
pub fn band_limit<T: Scalar>(axis: &TimeAxis<T>, band: &FrequencyBand<T>) -> Result<Projector<T>> {
    let spec = band_spectrum(axis, band)?;
    if spec.in_band == 0 {
        return Err(Error::InvalidBand("band too narrow for the time span".into()));
    }
    Projector::from_isometric_basis(ProjectorKind::FrequencyBand, spec.band_basis(), axis.sqrt_weights())
}

/// Prolate spheroidal functions sampled on the grid.
#[derive(Debug, Clone)]
pub struct PswfBasis<T: Scalar> {
    /// `M×J`, column `j` is `ψ_j` with unit quadrature norm.
    pub functions: DMatrix<T>,
    /// Time concentrations `λ_j`, nonincreasing.
    pub concentrations: DVector<T>,
}

/// Top-`count` eigenfunctions of `Π_Ω' Π_T' Π_Ω'`.
pub fn pswf<T: Scalar>(axis: &TimeAxis<T>, interval: &TimeInterval<T>, band: &FrequencyBand<T>, count: usize) -> Result<PswfBasis<T>> {
    let pb = band_limit(axis, band)?;
    let pt = time_limit(axis, interval)?;
    pswf_from(&pb, &pt, count)
}

/// PSWFs from prebuilt band and time projectors.
pub fn pswf_from<T: Scalar>(band: &Projector<T>, time: &Projector<T>, count: usize) -> Result<PswfBasis<T>> {
    if count > band.rank() {
        return Err(Error::RankExceeded { requested: count, available: band.rank() });
    }
    let e = Sandwich::new(band, time)?.eigen(count, EigenMethod::Auto)?;
    Ok(PswfBasis { functions: e.vectors, concentrations: e.values })
}

/// Shannon interpolation of grid samples at an arbitrary time; exact at grid points.
pub fn sinc_interpolate<T: Scalar>(axis: &TimeAxis<T>, samples: &[T], t: T) -> T {
    let x = (t - axis.start()) / axis.step();
    let r = x.round();
    if (x - r).abs() <= T::lit(1e-9) {
        let i = r.to_f();
        if i >= 0.0 && (i as usize) < samples.len() {
            return samples[i as usize];
        }
    }
    let pi = T::pi();
    let mut acc = T::zero();
    for (m, &s) in samples.iter().enumerate() {
        let u = pi * (x - T::from_usize_lossy(m));
        acc += s * u.sin() / u;
    }
    acc
}
