//! Orthogonal projectors on the vertex space, the time grid and the joint vertex-time grid.
//!
//! Joint signals are vectors of length `N·M` in vertex-major order (`v*M + m`). Every inner
//! product carries the time quadrature weights. Internally each projector is stored in
//! isometric coordinates `z = diag(√w) f`, where it is an ordinary symmetric idempotent
//! matrix; [`Projector::apply`] converts to and from sample values.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{sign_normalize, symmetric_eigen_sorted, SpectralBasis};
use crate::scalar::Scalar;
use crate::time_axis::TimeAxis;

/// Joint dimension above which sandwich eigenproblems fall back to power iteration.
pub const DENSE_LIMIT: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectorKind {
    Identity,
    VertexMask,
    TimeMask,
    SpectralMask,
    FrequencyBand,
    JointMask,
    Product,
    Subspace,
    Complement,
}

#[derive(Debug, Clone)]
enum Repr<T: Scalar> {
    /// 0/1 diagonal.
    Diagonal(DVector<T>),
    /// Orthonormal basis `Q` of the range, `P = QQᵀ`.
    Range(DMatrix<T>),
    Dense(DMatrix<T>),
    /// `A ⊗ B` with `A` acting on vertices and `B` on time.
    Kron(Box<Projector<T>>, Box<Projector<T>>),
    Complement(Box<Projector<T>>),
}

/// Orthogonal projector under the weighted inner product.
#[derive(Debug, Clone)]
pub struct Projector<T: Scalar> {
    kind: ProjectorKind,
    repr: Repr<T>,
    sqrt_w: DVector<T>,
}

impl<T: Scalar> Projector<T> {
    pub fn identity(sqrt_w: DVector<T>) -> Self {
        let n = sqrt_w.len();
        Self {
            kind: ProjectorKind::Identity,
            repr: Repr::Diagonal(DVector::from_element(n, T::one())),
            sqrt_w,
        }
    }

    /// 0/1 mask projector.
    pub fn diagonal(kind: ProjectorKind, mask: &[bool], sqrt_w: DVector<T>) -> Result<Self> {
        if mask.len() != sqrt_w.len() {
            return Err(Error::DimensionMismatch { expected: sqrt_w.len(), got: mask.len() });
        }
        let d = DVector::from_iterator(
            mask.len(),
            mask.iter().map(|&b| if b { T::one() } else { T::zero() }),
        );
        Ok(Self { kind, repr: Repr::Diagonal(d), sqrt_w })
    }

    /// Projector onto the span of orthonormal columns `q` given in isometric coordinates.
    pub fn from_isometric_basis(kind: ProjectorKind, q: DMatrix<T>, sqrt_w: DVector<T>) -> Result<Self> {
        if q.nrows() != sqrt_w.len() {
            return Err(Error::DimensionMismatch { expected: sqrt_w.len(), got: q.nrows() });
        }
        Ok(Self { kind, repr: Repr::Range(q), sqrt_w })
    }

    /// Wraps a dense symmetric idempotent matrix given in isometric coordinates.
    pub fn from_isometric_matrix(kind: ProjectorKind, p: DMatrix<T>, sqrt_w: DVector<T>) -> Result<Self> {
        let n = sqrt_w.len();
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.nrows() });
        }
        Ok(Self { kind, repr: Repr::Dense(p), sqrt_w })
    }

    /// Projector onto the weighted span of arbitrary signals (columns of `samples`),
    /// orthonormalized through the inverse square root of their Gram matrix.
    pub fn from_signals(kind: ProjectorKind, samples: &DMatrix<T>, sqrt_w: DVector<T>, floor: T) -> Result<Self> {
        if samples.nrows() != sqrt_w.len() {
            return Err(Error::DimensionMismatch { expected: sqrt_w.len(), got: samples.nrows() });
        }
        let mut z = samples.clone();
        for mut col in z.column_iter_mut() {
            col.component_mul_assign(&sqrt_w);
        }
        let q = gram_orthonormalize(&z, floor)?;
        Ok(Self { kind, repr: Repr::Range(q), sqrt_w })
    }

    pub fn kind(&self) -> ProjectorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.sqrt_w.len()
    }

    pub fn sqrt_weights(&self) -> &DVector<T> {
        &self.sqrt_w
    }

    /// True when the projector is an exact 0/1 mask in sample coordinates.
    pub fn is_mask(&self) -> bool {
        match &self.repr {
            Repr::Diagonal(_) => true,
            Repr::Kron(a, b) => a.is_mask() && b.is_mask(),
            Repr::Complement(p) => p.is_mask(),
            _ => false,
        }
    }

    /// Mask entries when the projector is diagonal.
    pub fn mask(&self) -> Option<Vec<bool>> {
        match &self.repr {
            Repr::Diagonal(d) => Some(d.iter().map(|&x| x > T::lit(0.5)).collect()),
            Repr::Kron(a, b) => {
                let ma = a.mask()?;
                let mb = b.mask()?;
                Some(ma.iter().flat_map(|&x| mb.iter().map(move |&y| x && y)).collect())
            }
            Repr::Complement(p) => p.mask().map(|m| m.into_iter().map(|b| !b).collect()),
            _ => None,
        }
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        match &self.repr {
            Repr::Complement(inner) => (**inner).clone(),
            Repr::Diagonal(d) => Self {
                kind: ProjectorKind::Complement,
                repr: Repr::Diagonal(d.map(|x| T::one() - x)),
                sqrt_w: self.sqrt_w.clone(),
            },
            _ => Self {
                kind: ProjectorKind::Complement,
                repr: Repr::Complement(Box::new(self.clone())),
                sqrt_w: self.sqrt_w.clone(),
            },
        }
    }

    /// Trace, equal to the rank for an exact projector.
    pub fn trace(&self) -> T {
        match &self.repr {
            Repr::Diagonal(d) => d.sum(),
            Repr::Range(q) => q.norm_squared(),
            Repr::Dense(p) => p.trace(),
            Repr::Kron(a, b) => a.trace() * b.trace(),
            Repr::Complement(p) => T::from_usize_lossy(self.dim()) - p.trace(),
        }
    }

    pub fn rank(&self) -> usize {
        self.trace().round().to_f().max(0.0) as usize
    }

    /// Orthonormal basis of the range in isometric coordinates, when cheaply available.
    pub fn range_basis(&self) -> Option<DMatrix<T>> {
        match &self.repr {
            Repr::Diagonal(d) => {
                let idx: Vec<usize> = (0..d.len()).filter(|&i| d[i] > T::lit(0.5)).collect();
                let mut q = DMatrix::zeros(d.len(), idx.len());
                for (j, &i) in idx.iter().enumerate() {
                    q[(i, j)] = T::one();
                }
                Some(q)
            }
            Repr::Range(q) => Some(q.clone()),
            Repr::Kron(a, b) => Some(a.range_basis()?.kronecker(&b.range_basis()?)),
            Repr::Dense(_) | Repr::Complement(_) => None,
        }
    }

    /// Applies the projector to the columns of `x` (isometric coordinates).
    pub fn apply_isometric_cols(&self, x: &DMatrix<T>) -> DMatrix<T> {
        assert_eq!(x.nrows(), self.dim(), "projector dimension mismatch");
        match &self.repr {
            Repr::Diagonal(d) => {
                let mut y = x.clone();
                for (i, mut row) in y.row_iter_mut().enumerate() {
                    row *= d[i];
                }
                y
            }
            Repr::Range(q) => q * q.tr_mul(x),
            Repr::Dense(p) => p * x,
            Repr::Kron(a, b) => {
                let (n, m) = (a.dim(), b.dim());
                let mut out = DMatrix::zeros(x.nrows(), x.ncols());
                for c in 0..x.ncols() {
                    let grid = DMatrix::from_row_slice(n, m, x.column(c).as_slice());
                    let left = a.apply_isometric_cols(&grid);
                    let both = b.apply_isometric_cols(&left.transpose());
                    // `both` is M×N holding (A X Bᵀ)ᵀ in column-major, i.e. vertex-major order.
                    out.column_mut(c).copy_from_slice(both.as_slice());
                }
                out
            }
            Repr::Complement(p) => x - p.apply_isometric_cols(x),
        }
    }

    pub fn apply_isometric(&self, z: &DVector<T>) -> DVector<T> {
        let m = DMatrix::from_column_slice(z.len(), 1, z.as_slice());
        self.apply_isometric_cols(&m).column(0).into_owned()
    }

    /// Applies the projector to sample values.
    pub fn apply(&self, f: &DVector<T>) -> DVector<T> {
        let z = f.component_mul(&self.sqrt_w);
        self.apply_isometric(&z).component_div(&self.sqrt_w)
    }

    /// Dense matrix of the projector in isometric coordinates (symmetric).
    pub fn isometric_matrix(&self) -> DMatrix<T> {
        match &self.repr {
            Repr::Dense(p) => p.clone(),
            Repr::Range(q) => q * q.transpose(),
            _ => self.apply_isometric_cols(&DMatrix::identity(self.dim(), self.dim())),
        }
    }

    /// Dense matrix acting on sample values, `S⁻¹ P̃ S` with `S = diag(√w)`.
    pub fn matrix(&self) -> DMatrix<T> {
        let mut p = self.isometric_matrix();
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] = p[(i, j)] * self.sqrt_w[j] / self.sqrt_w[i];
            }
        }
        p
    }

    pub fn inner(&self, f: &DVector<T>, g: &DVector<T>) -> T {
        weighted_inner(&self.sqrt_w, f, g)
    }

    pub fn norm(&self, f: &DVector<T>) -> T {
        self.inner(f, f).sqrt()
    }
}

/// `Σ w_i f_i g_i` with `w = sqrt_w²`.
pub fn weighted_inner<T: Scalar>(sqrt_w: &DVector<T>, f: &DVector<T>, g: &DVector<T>) -> T {
    let mut acc = T::zero();
    for i in 0..f.len() {
        acc += sqrt_w[i] * sqrt_w[i] * f[i] * g[i];
    }
    acc
}

/// Orthonormal basis of the span of the columns of `z` via `Z G^{-1/2}`.
pub fn gram_orthonormalize<T: Scalar>(z: &DMatrix<T>, floor: T) -> Result<DMatrix<T>> {
    let g = z.tr_mul(z);
    let g = (&g + g.transpose()) * T::lit(0.5);
    let (vals, vecs) = symmetric_eigen_sorted(&g)?;
    let top = vals[vals.len() - 1];
    if top <= T::zero() || vals[0] < floor * top {
        return Err(Error::RankDeficient(vals[0].to_f()));
    }
    let mut inv_sqrt = vecs.clone();
    for k in 0..vals.len() {
        inv_sqrt.column_mut(k).scale_mut(T::one() / vals[k].sqrt());
    }
    Ok(z * (inv_sqrt * vecs.transpose()))
}

/// Diagonal projector onto signals supported on `subset` of `n` vertices.
pub fn vertex_mask<T: Scalar>(n: usize, subset: &[usize]) -> Result<Projector<T>> {
    let mask = index_mask(n, subset)?;
    Projector::diagonal(ProjectorKind::VertexMask, &mask, DVector::from_element(n, T::one()))
}

/// `U Σ_Λ' Uᵀ`.
pub fn spectral_mask<T: Scalar>(basis: &SpectralBasis<T>, subset: &[usize]) -> Result<Projector<T>> {
    let n = basis.len();
    index_mask(n, subset)?;
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let q = basis.columns(&sorted)?;
    Projector::from_isometric_basis(ProjectorKind::SpectralMask, q, DVector::from_element(n, T::one()))
}

/// Mask on the joint grid; `mask[v*M + m]` selects sample `(v, t_m)`.
pub fn joint_mask<T: Scalar>(n: usize, axis: &TimeAxis<T>, mask: &[bool]) -> Result<Projector<T>> {
    Projector::diagonal(ProjectorKind::JointMask, mask, joint_sqrt_weights(n, axis))
}

/// Identity on the joint space.
pub fn joint_identity<T: Scalar>(n: usize, axis: &TimeAxis<T>) -> Projector<T> {
    Projector::identity(joint_sqrt_weights(n, axis))
}

/// `√w` replicated across vertices.
pub fn joint_sqrt_weights<T: Scalar>(n: usize, axis: &TimeAxis<T>) -> DVector<T> {
    let sw = axis.sqrt_weights();
    DVector::from_iterator(n * sw.len(), (0..n).flat_map(|_| sw.iter().copied()))
}

/// Tensor product `A ⊗ B` of a vertex projector and a time projector.
pub fn product_projector<T: Scalar>(vertex_part: &Projector<T>, time_part: &Projector<T>) -> Projector<T> {
    let sqrt_w = vertex_part.sqrt_w.kronecker(&time_part.sqrt_w);
    Projector {
        kind: ProjectorKind::Product,
        repr: Repr::Kron(Box::new(vertex_part.clone()), Box::new(time_part.clone())),
        sqrt_w,
    }
}

fn index_mask(n: usize, subset: &[usize]) -> Result<Vec<bool>> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut mask = vec![false; n];
    for &i in subset {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, size: n });
        }
        mask[i] = true;
    }
    Ok(mask)
}

/// Strategy for sandwich eigenproblems.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EigenMethod {
    /// Small reduced problem when the outer projector has a cheap range basis, dense
    /// decomposition up to [`DENSE_LIMIT`], power iteration beyond.
    #[default]
    Auto,
    Dense,
    Power,
}

#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 10_000 }
    }
}

/// Leading eigenpairs of a sandwich; values descending, vectors in sample coordinates with
/// unit weighted norm.
#[derive(Debug, Clone)]
pub struct EigenPairs<T: Scalar> {
    pub values: DVector<T>,
    pub vectors: DMatrix<T>,
}

/// Symmetric sandwich `P Q P` of two projectors on the same space.
#[derive(Debug, Clone, Copy)]
pub struct Sandwich<'a, T: Scalar> {
    outer: &'a Projector<T>,
    inner: &'a Projector<T>,
}

impl<'a, T: Scalar> Sandwich<'a, T> {
    pub fn new(outer: &'a Projector<T>, inner: &'a Projector<T>) -> Result<Self> {
        if outer.dim() != inner.dim() {
            return Err(Error::DimensionMismatch { expected: outer.dim(), got: inner.dim() });
        }
        Ok(Self { outer, inner })
    }

    pub fn apply_isometric_cols(&self, x: &DMatrix<T>) -> DMatrix<T> {
        let px = self.outer.apply_isometric_cols(x);
        let qpx = self.inner.apply_isometric_cols(&px);
        self.outer.apply_isometric_cols(&qpx)
    }

    /// Top `count` eigenpairs.
    pub fn eigen(&self, count: usize, method: EigenMethod) -> Result<EigenPairs<T>> {
        let dim = self.outer.dim();
        if count > dim {
            return Err(Error::RankExceeded { requested: count, available: dim });
        }
        let (values, iso) = match method {
            EigenMethod::Auto => match self.outer.range_basis() {
                Some(r) => self.reduced(&r, count)?,
                None if dim <= DENSE_LIMIT => self.dense(count)?,
                None => self.power(count, PowerOptions::default())?,
            },
            EigenMethod::Dense => self.dense(count)?,
            EigenMethod::Power => self.power(count, PowerOptions::default())?,
        };
        let sw = &self.outer.sqrt_w;
        let mut vectors = DMatrix::zeros(dim, values.len());
        for j in 0..values.len() {
            let mut f = iso.column(j).component_div(sw);
            sign_normalize(&mut f);
            vectors.set_column(j, &f);
        }
        Ok(EigenPairs { values, vectors })
    }

    pub fn lambda_max(&self, method: EigenMethod) -> Result<(T, DVector<T>)> {
        let e = self.eigen(1, method)?;
        Ok((e.values[0], e.vectors.column(0).into_owned()))
    }

    pub fn power_with(&self, count: usize, opts: PowerOptions) -> Result<EigenPairs<T>> {
        let (values, iso) = self.power(count, opts)?;
        let sw = &self.outer.sqrt_w;
        let mut vectors = DMatrix::zeros(self.outer.dim(), values.len());
        for j in 0..values.len() {
            let mut f = iso.column(j).component_div(sw);
            sign_normalize(&mut f);
            vectors.set_column(j, &f);
        }
        Ok(EigenPairs { values, vectors })
    }

    fn reduced(&self, r: &DMatrix<T>, count: usize) -> Result<(DVector<T>, DMatrix<T>)> {
        if count > r.ncols() {
            return Err(Error::RankExceeded { requested: count, available: r.ncols() });
        }
        let qr = self.inner.apply_isometric_cols(r);
        let m = r.tr_mul(&qr);
        let m = (&m + m.transpose()) * T::lit(0.5);
        let (vals, vecs) = symmetric_eigen_sorted(&m)?;
        let k = vals.len();
        let values = DVector::from_iterator(count, (0..count).map(|j| vals[k - 1 - j]));
        let mut sel = DMatrix::zeros(k, count);
        for j in 0..count {
            sel.set_column(j, &vecs.column(k - 1 - j));
        }
        Ok((values, r * sel))
    }

    fn dense(&self, count: usize) -> Result<(DVector<T>, DMatrix<T>)> {
        let dim = self.outer.dim();
        let m = self.apply_isometric_cols(&DMatrix::identity(dim, dim));
        let m = (&m + m.transpose()) * T::lit(0.5);
        let (vals, vecs) = symmetric_eigen_sorted(&m)?;
        let values = DVector::from_iterator(count, (0..count).map(|j| vals[dim - 1 - j]));
        let mut sel = DMatrix::zeros(dim, count);
        for j in 0..count {
            sel.set_column(j, &vecs.column(dim - 1 - j));
        }
        Ok((values, sel))
    }

    /// Subspace iteration with Rayleigh–Ritz extraction.
    fn power(&self, count: usize, opts: PowerOptions) -> Result<(DVector<T>, DMatrix<T>)> {
        let dim = self.outer.dim();
        let mut x = DMatrix::from_fn(dim, count, |i, j| {
            T::lit(1.0 + 0.5 * ((i as f64 + 1.0) * (j as f64 + 1.3) * 0.618).sin())
        });
        x = orthonormalize_columns(&x);
        let tol = T::lit(opts.tol);
        let mut prev: Option<DVector<T>> = None;
        for _ in 0..opts.max_iter {
            let ax = self.apply_isometric_cols(&x);
            let h = x.tr_mul(&ax);
            let h = (&h + h.transpose()) * T::lit(0.5);
            let (vals, vecs) = symmetric_eigen_sorted(&h)?;
            let values = DVector::from_iterator(count, (0..count).map(|j| vals[count - 1 - j]));
            let mut rot = DMatrix::zeros(count, count);
            for j in 0..count {
                rot.set_column(j, &vecs.column(count - 1 - j));
            }
            let ritz = &x * &rot;
            let ax_rot = &ax * &rot;
            let mut resid = T::zero();
            for j in 0..count {
                let r = ax_rot.column(j) - ritz.column(j) * values[j];
                resid = resid.max(r.norm());
            }
            let stalled = prev
                .as_ref()
                .map(|p| (p - &values).amax() <= tol * values[0].abs().max(T::one()))
                .unwrap_or(false);
            if resid <= tol.sqrt() * T::lit(1e-2) || (stalled && resid <= tol.sqrt()) {
                return Ok((values, ritz));
            }
            if values[0] == T::zero() && ax.amax() == T::zero() {
                return Ok((values, ritz));
            }
            prev = Some(values);
            x = orthonormalize_columns(&ax_rot);
        }
        Err(Error::NoConvergence { iterations: opts.max_iter })
    }
}

/// Leading eigenpair of `outer · inner · outer` (automatic method).
pub fn lambda_max<T: Scalar>(outer: &Projector<T>, inner: &Projector<T>) -> Result<(T, DVector<T>)> {
    Sandwich::new(outer, inner)?.lambda_max(EigenMethod::Auto)
}

/// Largest eigenvalue only.
pub fn lambda_max_value<T: Scalar>(outer: &Projector<T>, inner: &Projector<T>) -> Result<T> {
    Ok(lambda_max(outer, inner)?.0)
}

/// Modified Gram–Schmidt on the columns; numerically null columns are replaced by zeros.
pub fn orthonormalize_columns<T: Scalar>(x: &DMatrix<T>) -> DMatrix<T> {
    let mut q = x.clone();
    for j in 0..q.ncols() {
        for _ in 0..2 {
            for i in 0..j {
                let d = q.column(i).dot(&q.column(j));
                let ci = q.column(i).into_owned();
                q.column_mut(j).axpy(-d, &ci, T::one());
            }
        }
        let n = q.column(j).norm();
        if n > T::lit(1e-300_f64.max(f64::MIN_POSITIVE)) {
            q.column_mut(j).scale_mut(T::one() / n);
        } else {
            q.column_mut(j).fill(T::zero());
        }
    }
    q
}

/// Vertex-time and spectral-frequency spreads `(‖Π_VT f‖/‖f‖, ‖Π_SF f‖/‖f‖)`.
pub fn spread<T: Scalar>(f: &DVector<T>, p_vt: &Projector<T>, p_sf: &Projector<T>) -> Result<(T, T)> {
    if p_vt.dim() != f.len() || p_sf.dim() != f.len() {
        return Err(Error::DimensionMismatch { expected: p_vt.dim(), got: f.len() });
    }
    let nf = p_vt.norm(f);
    if nf <= T::zero() {
        return Err(Error::ZeroSignal);
    }
    Ok((p_vt.norm(&p_vt.apply(f)) / nf, p_sf.norm(&p_sf.apply(f)) / nf))
}

/// Gaussian heat-kernel subspace parameters; centers are `(vertex, time)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSubspace<T: Scalar> {
    pub vertex_scale: T,
    pub time_scale: T,
    pub centers: Vec<(usize, T)>,
}

impl<T: Scalar> GaussianSubspace<T> {
    pub fn new(vertex_scale: T, time_scale: T, centers: Vec<(usize, T)>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptySubset);
        }
        if !(vertex_scale > T::zero()) || !(time_scale > T::zero()) {
            return Err(Error::Config("diffusion scales must be positive".into()));
        }
        Ok(Self { vertex_scale, time_scale, centers })
    }
}

/// Floor applied to Gram eigenvalues (relative to the largest) when orthonormalizing atoms.
pub const GRAM_FLOOR: f64 = 1e-10;

/// Separable heat-kernel atoms `(e^{-τ_v L} δ_{v0}) ⊗ g_{t0}` sampled on the joint grid,
/// each factor normalized (vertex part in ℓ², time part under the quadrature weights).
pub fn heat_atoms<T: Scalar>(basis: &SpectralBasis<T>, axis: &TimeAxis<T>, gs: &GaussianSubspace<T>) -> Result<DMatrix<T>> {
    let n = basis.len();
    let m = axis.len();
    let heat = basis.heat_kernel(gs.vertex_scale);
    let mut atoms = DMatrix::zeros(n * m, gs.centers.len());
    let four = T::lit(4.0);
    let norm_c = T::one() / (four * T::pi() * gs.time_scale).sqrt();
    for (c, &(v0, t0)) in gs.centers.iter().enumerate() {
        if v0 >= n {
            return Err(Error::VertexOutOfRange { index: v0, n });
        }
        let mut vpart = heat.column(v0).into_owned();
        let vn = vpart.norm();
        if vn <= T::zero() {
            return Err(Error::RankDeficient(0.0));
        }
        vpart /= vn;
        let mut tpart = DVector::from_iterator(
            m,
            axis.points().iter().map(|&t| {
                let d = t - t0;
                norm_c * (-(d * d) / (four * gs.time_scale)).exp()
            }),
        );
        let tn = axis.norm(&tpart);
        if tn <= T::zero() {
            return Err(Error::RankDeficient(0.0));
        }
        tpart /= tn;
        for v in 0..n {
            for k in 0..m {
                atoms[(v * m + k, c)] = vpart[v] * tpart[k];
            }
        }
    }
    Ok(atoms)
}

/// Projector onto the Gaussian heat-kernel subspace.
pub fn heat_subspace_projector<T: Scalar>(basis: &SpectralBasis<T>, axis: &TimeAxis<T>, gs: &GaussianSubspace<T>) -> Result<Projector<T>> {
    let atoms = heat_atoms(basis, axis, gs)?;
    Projector::from_signals(
        ProjectorKind::Subspace,
        &atoms,
        joint_sqrt_weights(basis.len(), axis),
        T::lit(GRAM_FLOOR),
    )
}
