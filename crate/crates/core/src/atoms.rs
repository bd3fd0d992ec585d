//! Separable vertex-time dictionaries: Slepian product atoms and the baseline families.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::SpectralBasis;
use crate::jecd::greedy_vertex_core;
use crate::operators::{spectral_mask, vertex_mask, EigenMethod, EigenPairs, Projector, Sandwich};
use crate::scalar::Scalar;
use crate::time_axis::{pswf, sinc_interpolate, FrequencyBand, TimeAxis, TimeInterval};

/// Real or imaginary part of a complex atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Re,
    Im,
}

/// Time factor of a separable atom, evaluable at any time.
#[derive(Debug, Clone)]
pub enum TimeProfile<T: Scalar> {
    /// Grid samples; off-grid values by Shannon interpolation.
    Sampled(Vec<T>),
    Constant,
    Cos { freq: T, origin: T },
    Sin { freq: T, origin: T },
    /// `e^{-(t-c)²/(2ρ²)} e^{j n ω₀ t} / (√(2π) ρ)`.
    Gabor { center: T, width: T, freq: T, part: Part },
    /// `e^{-(t-b)²/(2a²)} e^{j ω₀ (t-b)/a} / √a`.
    Morlet { scale: T, shift: T, omega0: T, part: Part },
}

impl<T: Scalar> TimeProfile<T> {
    pub fn eval(&self, axis: &TimeAxis<T>, t: T) -> T {
        match self {
            TimeProfile::Sampled(s) => sinc_interpolate(axis, s, t),
            TimeProfile::Constant => T::one(),
            TimeProfile::Cos { freq, origin } => (*freq * (t - *origin)).cos(),
            TimeProfile::Sin { freq, origin } => (*freq * (t - *origin)).sin(),
            TimeProfile::Gabor { center, width, freq, part } => {
                let d = t - *center;
                let env = (-(d * d) / (T::lit(2.0) * *width * *width)).exp() / (T::two_pi().sqrt() * *width);
                let ph = *freq * t;
                env * match part {
                    Part::Re => ph.cos(),
                    Part::Im => ph.sin(),
                }
            }
            TimeProfile::Morlet { scale, shift, omega0, part } => {
                let u = (t - *shift) / *scale;
                let env = (-(u * u) * T::lit(0.5)).exp() / scale.sqrt();
                let ph = *omega0 * u;
                env * match part {
                    Part::Re => ph.cos(),
                    Part::Im => ph.sin(),
                }
            }
        }
    }

    fn describe(&self) -> Value {
        match self {
            TimeProfile::Sampled(s) => json!({"type": "sampled", "len": s.len()}),
            TimeProfile::Constant => json!({"type": "constant"}),
            TimeProfile::Cos { freq, origin } => json!({"type": "cos", "freq": freq.to_f(), "origin": origin.to_f()}),
            TimeProfile::Sin { freq, origin } => json!({"type": "sin", "freq": freq.to_f(), "origin": origin.to_f()}),
            TimeProfile::Gabor { center, width, freq, part } => json!({
                "type": "gabor", "center": center.to_f(), "width": width.to_f(), "freq": freq.to_f(), "part": part
            }),
            TimeProfile::Morlet { scale, shift, omega0, part } => json!({
                "type": "morlet", "scale": scale.to_f(), "shift": shift.to_f(), "omega0": omega0.to_f(), "part": part
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomKind {
    Slepian,
    Jft,
    Stvft,
    Stvwt,
    Negup,
    Custom,
}

/// Provenance of an atom.
#[derive(Debug, Clone, Serialize)]
pub struct AtomMeta {
    pub kind: AtomKind,
    /// Vertex-factor index.
    pub k: usize,
    /// Time-factor index.
    pub n: usize,
    pub concentration: Option<f64>,
    pub params: Vec<(String, f64)>,
}

/// Separable atom `scale · vertex(v) · time(t)`.
#[derive(Debug, Clone)]
pub struct Atom<T: Scalar> {
    pub vertex: DVector<T>,
    pub time: TimeProfile<T>,
    pub scale: T,
    pub meta: AtomMeta,
}

/// Ordered atoms with their joint-grid samples.
#[derive(Debug, Clone)]
pub struct Dictionary<T: Scalar> {
    atoms: Vec<Atom<T>>,
    axis: TimeAxis<T>,
    n_vertices: usize,
    grid: DMatrix<T>,
    norms: Vec<T>,
}

impl<T: Scalar> Dictionary<T> {
    /// Samples atoms on the grid. With `normalize`, each atom is rescaled to unit weighted
    /// norm and atoms with norm ≤ 1e-12 are dropped.
    pub fn new(atoms: Vec<Atom<T>>, axis: &TimeAxis<T>, normalize: bool) -> Result<Self> {
        let n = atoms.first().map(|a| a.vertex.len()).ok_or(Error::InvalidSpec("no atoms".into()))?;
        let m = axis.len();
        let w = axis.weights();
        let mut kept = Vec::with_capacity(atoms.len());
        let mut cols: Vec<DVector<T>> = Vec::with_capacity(atoms.len());
        let mut norms = Vec::with_capacity(atoms.len());
        for mut a in atoms {
            if a.vertex.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: a.vertex.len() });
            }
            let tvals: Vec<T> = match &a.time {
                TimeProfile::Sampled(s) => {
                    if s.len() != m {
                        return Err(Error::DimensionMismatch { expected: m, got: s.len() });
                    }
                    s.clone()
                }
                p => axis.points().iter().map(|&t| p.eval(axis, t)).collect(),
            };
            let tn2: T = (0..m).fold(T::zero(), |acc, k| acc + w[k] * tvals[k] * tvals[k]);
            let norm = (tn2 * a.vertex.norm_squared()).sqrt() * a.scale.abs();
            if !norm.is_finite() {
                return Err(Error::InvalidSpec("atom has non-finite norm".into()));
            }
            if normalize {
                if norm <= T::lit(1e-12) {
                    continue;
                }
                a.scale /= norm;
            }
            let mut col = DVector::zeros(n * m);
            for v in 0..n {
                let c = a.scale * a.vertex[v];
                for k in 0..m {
                    col[v * m + k] = c * tvals[k];
                }
            }
            norms.push(if normalize { T::one() } else { norm });
            cols.push(col);
            kept.push(a);
        }
        if kept.is_empty() {
            return Err(Error::InvalidSpec("all atoms vanish on the grid".into()));
        }
        let grid = DMatrix::from_columns(&cols);
        Ok(Self { atoms: kept, axis: axis.clone(), n_vertices: n, grid, norms })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn axis(&self) -> &TimeAxis<T> {
        &self.axis
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn norms(&self) -> &[T] {
        &self.norms
    }

    /// `N·M × K` grid samples, vertex-major rows.
    pub fn grid_samples(&self) -> &DMatrix<T> {
        &self.grid
    }

    fn grid_index(&self, t: T) -> Option<usize> {
        let x = (t - self.axis.start()) / self.axis.step();
        let r = x.round();
        if (x - r).abs() <= T::lit(1e-9) && r >= T::zero() && r.to_f() < self.axis.len() as f64 {
            Some(r.to_f() as usize)
        } else {
            None
        }
    }

    /// Value of atom `i` at `(v, t)`; grid points return the stored sample.
    pub fn eval(&self, i: usize, v: usize, t: T) -> T {
        if let Some(k) = self.grid_index(t) {
            return self.grid[(v * self.axis.len() + k, i)];
        }
        let a = &self.atoms[i];
        a.scale * a.vertex[v] * a.time.eval(&self.axis, t)
    }

    /// Rows = sample points, columns = atoms.
    pub fn matrix_at(&self, points: &[(usize, T)]) -> Result<DMatrix<T>> {
        let k = self.len();
        let mut out = DMatrix::zeros(points.len(), k);
        for (r, &(v, t)) in points.iter().enumerate() {
            if v >= self.n_vertices {
                return Err(Error::VertexOutOfRange { index: v, n: self.n_vertices });
            }
            match self.grid_index(t) {
                Some(m) => out.row_mut(r).copy_from(&self.grid.row(v * self.axis.len() + m)),
                None => {
                    for i in 0..k {
                        let a = &self.atoms[i];
                        out[(r, i)] = a.scale * a.vertex[v] * a.time.eval(&self.axis, t);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Joint-grid signal `Σ_i c_i atom_i`.
    pub fn synthesize(&self, coeffs: &DVector<T>) -> DVector<T> {
        &self.grid * coeffs
    }

    /// Weighted Gram matrix of the atoms.
    pub fn gram(&self) -> DMatrix<T> {
        let sw = crate::operators::joint_sqrt_weights(self.n_vertices, &self.axis);
        let mut z = self.grid.clone();
        for mut c in z.column_iter_mut() {
            c.component_mul_assign(&sw);
        }
        z.tr_mul(&z)
    }

    /// Parameter and provenance manifest; grid samples are regenerable from it.
    pub fn manifest(&self) -> Value {
        json!({
            "n_vertices": self.n_vertices,
            "axis": {"start": self.axis.start().to_f(), "end": self.axis.end().to_f(), "points": self.axis.len()},
            "atoms": self.atoms.iter().zip(&self.norms).map(|(a, nrm)| json!({
                "kind": a.meta.kind,
                "k": a.meta.k,
                "n": a.meta.n,
                "concentration": a.meta.concentration,
                "params": a.meta.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
                "time": a.time.describe(),
                "norm": nrm.to_f(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Top-`count` eigenpairs of `Π_Σ Π_VT Π_Σ`.
pub fn slepian_atoms<T: Scalar>(p_sigma: &Projector<T>, p_vt: &Projector<T>, count: usize) -> Result<EigenPairs<T>> {
    let rank = p_sigma.rank();
    if count > rank {
        return Err(Error::RankExceeded { requested: count, available: rank });
    }
    Sandwich::new(p_sigma, p_vt)?.eigen(count, EigenMethod::Auto)
}

/// Eigenvectors of `Π_Λ' Π_V' Π_Λ'` restricted to the range of `Π_Λ'`, concentration
/// descending.
pub fn vertex_slepians<T: Scalar>(basis: &SpectralBasis<T>, vertices: &[usize], spectrum: &[usize]) -> Result<(DMatrix<T>, DVector<T>)> {
    let pl = spectral_mask(basis, spectrum)?;
    let pv = vertex_mask(basis.len(), vertices)?;
    let e = Sandwich::new(&pl, &pv)?.eigen(pl.rank(), EigenMethod::Auto)?;
    Ok((e.vectors, e.values))
}

/// `Φ(V') ⊗ Ψ(T')` with `n_vertex` vertex Slepians and `n_time` PSWFs, ordered by
/// decreasing concentration product, ties by `(k, n)`.
#[allow(clippy::too_many_arguments)]
pub fn product_dictionary<T: Scalar>(
    basis: &SpectralBasis<T>,
    axis: &TimeAxis<T>,
    vertices: &[usize],
    spectrum: &[usize],
    interval: &TimeInterval<T>,
    band: &FrequencyBand<T>,
    n_vertex: usize,
    n_time: usize,
) -> Result<Dictionary<T>> {
    product_dictionary_kind(basis, axis, vertices, spectrum, interval, band, n_vertex, n_time, AtomKind::Slepian)
}

#[allow(clippy::too_many_arguments)]
fn product_dictionary_kind<T: Scalar>(
    basis: &SpectralBasis<T>,
    axis: &TimeAxis<T>,
    vertices: &[usize],
    spectrum: &[usize],
    interval: &TimeInterval<T>,
    band: &FrequencyBand<T>,
    n_vertex: usize,
    n_time: usize,
    kind: AtomKind,
) -> Result<Dictionary<T>> {
    let (phi, lv) = vertex_slepians(basis, vertices, spectrum)?;
    if n_vertex > phi.ncols() {
        return Err(Error::RankExceeded { requested: n_vertex, available: phi.ncols() });
    }
    let ps = pswf(axis, interval, band, n_time)?;
    let mut order: Vec<(usize, usize, T)> = Vec::with_capacity(n_vertex * n_time);
    for k in 0..n_vertex {
        for n in 0..n_time {
            order.push((k, n, lv[k] * ps.concentrations[n]));
        }
    }
    order.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap_or(std::cmp::Ordering::Equal));
    let atoms = order
        .into_iter()
        .map(|(k, n, c)| Atom {
            vertex: phi.column(k).into_owned(),
            time: TimeProfile::Sampled(ps.functions.column(n).iter().copied().collect()),
            scale: T::one(),
            meta: AtomMeta {
                kind,
                k,
                n,
                concentration: Some(c.to_f()),
                params: vec![
                    ("vertex_concentration".into(), lv[k].to_f()),
                    ("time_concentration".into(), ps.concentrations[n].to_f()),
                    ("center".into(), interval.center.to_f()),
                    ("length".into(), interval.length.to_f()),
                ],
            },
        })
        .collect();
    Dictionary::new(atoms, axis, false)
}

/// Itersine kernel `sin(π/2 · cos²(πx/2))` on `|x| ≤ 1`, zero outside.
pub fn itersine<T: Scalar>(x: T) -> T {
    if x.abs() > T::one() {
        return T::zero();
    }
    let c = (T::pi() * x * T::lit(0.5)).cos();
    (T::frac_pi_2() * c * c).sin()
}

/// Baseline dictionary families.
#[derive(Debug, Clone)]
pub enum BaselineSpec<T: Scalar> {
    /// Graph Fourier modes `u_1..u_K` times `{1, cos(l ω_b t), sin(l ω_b t)}_{l ≤ L}`.
    Jft { k: usize, l: usize },
    /// Itersine vertex atoms with `q` spectral translations times Gabor atoms centered at
    /// `m τ₀` inside the span with modulations `n ω₀`, `n = 0..=n_freq`.
    Stvft { q: usize, tau0: T, omega0: T, rho: T, n_freq: usize },
    /// Itersine vertex wavelets at `scales` times Morlet atoms on the `(a, b)` grid.
    Stvwt { scales: Vec<T>, a: Vec<T>, b: Vec<T>, omega0: T },
    /// Vertex-only greedy support with a fixed centered interval of given length.
    Negup { spectrum: Vec<usize>, band: FrequencyBand<T>, length: T, beta_spectral: T, n_time: usize },
}

impl<T: Scalar> BaselineSpec<T> {
    /// Wavelet baseline with dyadic vertex scales `2^0..2^{n_scales-1}`, dyadic time scales
    /// `a = δ/2^j` for `j = 2..2+n_a`, and `n_b` uniform translations over the span.
    pub fn stvwt_dyadic(axis: &TimeAxis<T>, n_scales: usize, n_a: usize, n_b: usize, omega0: T) -> Self {
        let scales = (0..n_scales).map(|j| T::lit(2f64.powi(j as i32))).collect();
        let a = (0..n_a).map(|j| axis.span() / T::lit(2f64.powi(j as i32 + 2))).collect();
        let b = (0..n_b)
            .map(|j| axis.start() + axis.span() * T::from_usize_lossy(j) / T::from_usize_lossy(n_b.max(2) - 1))
            .collect();
        BaselineSpec::Stvwt { scales, a, b, omega0 }
    }

    fn validate(&self) -> Result<()> {
        let pos = |x: T, what: &str| {
            if x > T::zero() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{what} must be positive")))
            }
        };
        match self {
            BaselineSpec::Jft { k, .. } if *k == 0 => Err(Error::InvalidSpec("K must be positive".into())),
            BaselineSpec::Jft { .. } => Ok(()),
            BaselineSpec::Stvft { q, tau0, omega0, rho, .. } => {
                if *q == 0 {
                    return Err(Error::InvalidSpec("Q must be positive".into()));
                }
                pos(*tau0, "tau0")?;
                pos(*omega0, "omega0")?;
                pos(*rho, "rho")
            }
            BaselineSpec::Stvwt { scales, a, b, omega0 } => {
                if scales.is_empty() || a.is_empty() || b.is_empty() {
                    return Err(Error::InvalidSpec("empty wavelet grid".into()));
                }
                for &s in scales {
                    pos(s, "scale")?;
                }
                for &x in a {
                    pos(x, "a")?;
                }
                pos(*omega0, "omega0")
            }
            BaselineSpec::Negup { length, beta_spectral, n_time, .. } => {
                pos(*length, "length")?;
                pos(*beta_spectral, "beta")?;
                if *n_time == 0 {
                    return Err(Error::InvalidSpec("n_time must be positive".into()));
                }
                Ok(())
            }
        }
    }
}

/// Itersine-localized vertex atoms `(U h(·) Uᵀ) δ_p`, unit norm; vanishing atoms dropped.
fn localized_vertex_atoms<T: Scalar, F: Fn(T) -> T>(basis: &SpectralBasis<T>, h: F) -> Vec<(usize, DVector<T>)> {
    let op = basis.filter(h);
    let mut out = Vec::new();
    for p in 0..basis.len() {
        let col = op.column(p).into_owned();
        let nrm = col.norm();
        if nrm > T::lit(1e-12) {
            out.push((p, col / nrm));
        }
    }
    out
}

pub fn baseline_dictionary<T: Scalar>(spec: &BaselineSpec<T>, basis: &SpectralBasis<T>, axis: &TimeAxis<T>) -> Result<Dictionary<T>> {
    spec.validate()?;
    let n = basis.len();
    let mut atoms = Vec::new();
    match spec {
        BaselineSpec::Jft { k, l } => {
            if *k > n {
                return Err(Error::InvalidSpec(format!("K = {k} exceeds N = {n}")));
            }
            let base = T::two_pi() / (axis.step() * T::from_usize_lossy(axis.len()));
            let origin = axis.start();
            for kk in 0..*k {
                let u = basis.eigenvectors().column(kk).into_owned();
                let meta = |nn: usize, freq: f64| AtomMeta {
                    kind: AtomKind::Jft,
                    k: kk,
                    n: nn,
                    concentration: None,
                    params: vec![("freq".into(), freq)],
                };
                atoms.push(Atom { vertex: u.clone(), time: TimeProfile::Constant, scale: T::one() / T::two_pi().sqrt(), meta: meta(0, 0.0) });
                for ll in 1..=*l {
                    let freq = base * T::from_usize_lossy(ll);
                    let s = T::one() / T::pi().sqrt();
                    atoms.push(Atom { vertex: u.clone(), time: TimeProfile::Cos { freq, origin }, scale: s, meta: meta(2 * ll - 1, freq.to_f()) });
                    atoms.push(Atom { vertex: u.clone(), time: TimeProfile::Sin { freq, origin }, scale: s, meta: meta(2 * ll, freq.to_f()) });
                }
            }
        }
        BaselineSpec::Stvft { q, tau0, omega0, rho, n_freq } => {
            let lmax = basis.lambda_max();
            let qf = T::from_usize_lossy(*q);
            let mut vatoms = Vec::new();
            for qq in 1..=*q {
                let shift = lmax * T::from_usize_lossy(qq) / qf;
                for (p, a) in localized_vertex_atoms(basis, |lam| itersine((lam - shift) * qf / lmax)) {
                    vatoms.push((p, qq, a));
                }
            }
            let m_lo = (axis.start() / *tau0).ceil().to_f() as i64;
            let m_hi = (axis.end() / *tau0).floor().to_f() as i64;
            let mut tprof = Vec::new();
            for mm in m_lo..=m_hi {
                let center = *tau0 * T::lit(mm as f64);
                for nn in 0..=*n_freq {
                    let freq = *omega0 * T::from_usize_lossy(nn);
                    tprof.push((center, freq, Part::Re));
                    if nn > 0 {
                        tprof.push((center, freq, Part::Im));
                    }
                }
            }
            for (vi, (p, qq, a)) in vatoms.iter().enumerate() {
                for (ti, &(center, freq, part)) in tprof.iter().enumerate() {
                    atoms.push(Atom {
                        vertex: a.clone(),
                        time: TimeProfile::Gabor { center, width: *rho, freq, part },
                        scale: T::one(),
                        meta: AtomMeta {
                            kind: AtomKind::Stvft,
                            k: vi,
                            n: ti,
                            concentration: None,
                            params: vec![
                                ("p".into(), *p as f64),
                                ("q".into(), *qq as f64),
                                ("center".into(), center.to_f()),
                                ("freq".into(), freq.to_f()),
                            ],
                        },
                    });
                }
            }
        }
        BaselineSpec::Stvwt { scales, a, b, omega0 } => {
            let lmax = basis.lambda_max();
            let mut vatoms = Vec::new();
            for &s in scales {
                for (p, v) in localized_vertex_atoms(basis, |lam| itersine(s * lam / lmax)) {
                    vatoms.push((p, s, v));
                }
            }
            for (vi, (p, s, v)) in vatoms.iter().enumerate() {
                let mut ti = 0;
                for &aa in a {
                    for &bb in b {
                        for part in [Part::Re, Part::Im] {
                            atoms.push(Atom {
                                vertex: v.clone(),
                                time: TimeProfile::Morlet { scale: aa, shift: bb, omega0: *omega0, part },
                                scale: T::one(),
                                meta: AtomMeta {
                                    kind: AtomKind::Stvwt,
                                    k: vi,
                                    n: ti,
                                    concentration: None,
                                    params: vec![
                                        ("p".into(), *p as f64),
                                        ("s".into(), s.to_f()),
                                        ("a".into(), aa.to_f()),
                                        ("b".into(), bb.to_f()),
                                    ],
                                },
                            });
                            ti += 1;
                        }
                    }
                }
            }
        }
        BaselineSpec::Negup { spectrum, band, length, beta_spectral, n_time } => {
            let vertices = negup_vertices(basis, spectrum, *beta_spectral)?;
            let interval = TimeInterval::new((axis.start() + axis.end()) * T::lit(0.5), length.min(axis.span()))?;
            return product_dictionary_kind(basis, axis, &vertices, spectrum, &interval, band, spectrum.len(), *n_time, AtomKind::Negup);
        }
    }
    Dictionary::new(atoms, axis, true)
}

/// Vertex-only greedy support: maximizes `cos(cos⁻¹√λ_max(Π_Λ'Π_V'Π_Λ') - cos⁻¹β_Λ')`
/// until `|V'| = |Λ'|`.
pub fn negup_vertices<T: Scalar>(basis: &SpectralBasis<T>, spectrum: &[usize], beta_spectral: T) -> Result<Vec<usize>> {
    let g = greedy_vertex_core(basis, spectrum, spectrum.len(), T::one(), beta_spectral)?;
    Ok(g.vertices)
}
