//! Joint energy concentrated dictionary learning: greedy vertex selection, alternating
//! Lasso / interval refinement, reconstruction and relative square error.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::atoms::{product_dictionary, Dictionary};
use crate::error::{Error, Result};
use crate::graph::{symmetric_eigen_sorted, SpectralBasis};
use crate::lasso::{lasso_warm, objective, LassoOptions};
use crate::operators::lambda_max_value;
use crate::scalar::Scalar;
use crate::time_axis::{band_limit, time_limit, FrequencyBand, TimeAxis, TimeInterval};
use crate::uncertainty::arc_upper;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Train,
    Test,
    Validation,
}

impl std::str::FromStr for Role {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Role::Train),
            "test" => Ok(Role::Test),
            "validation" | "val" => Ok(Role::Validation),
            other => Err(Error::Parse(format!("unknown role '{other}'"))),
        }
    }
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Role::Train => "train",
            Role::Test => "test",
            Role::Validation => "validation",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<T> {
    pub vertex: usize,
    pub time: T,
    pub value: T,
}

/// Observations `y_m = f(v_m, t_m) + ε_m` sharing one role.
#[derive(Debug, Clone)]
pub struct SampleSet<T: Scalar> {
    pub samples: Vec<Sample<T>>,
    pub role: Role,
    pub noise_variance: T,
}

impl<T: Scalar> SampleSet<T> {
    pub fn new(samples: Vec<Sample<T>>, role: Role) -> Self {
        Self { samples, role, noise_variance: T::zero() }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn points(&self) -> Vec<(usize, T)> {
        self.samples.iter().map(|s| (s.vertex, s.time)).collect()
    }

    pub fn values(&self) -> DVector<T> {
        DVector::from_iterator(self.len(), self.samples.iter().map(|s| s.value))
    }

    pub fn validate(&self, n: usize, axis: &TimeAxis<T>) -> Result<()> {
        for s in &self.samples {
            if s.vertex >= n {
                return Err(Error::VertexOutOfRange { index: s.vertex, n });
            }
            if !axis.contains(s.time) {
                return Err(Error::InvalidInterval(format!("sample time {} outside the axis", s.time.to_f())));
            }
        }
        Ok(())
    }
}

/// Spectral and temporal frequency supports with their energy fractions.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralPrior<T> {
    pub spectrum: Vec<usize>,
    pub band: FrequencyBand<T>,
    pub beta_spectral: T,
    pub beta_frequency: T,
}

/// Samples placed on the nearest grid point; duplicates averaged, gaps zero-filled.
pub fn grid_samples<T: Scalar>(samples: &SampleSet<T>, n: usize, axis: &TimeAxis<T>) -> Result<DMatrix<T>> {
    samples.validate(n, axis)?;
    let m = axis.len();
    let mut sum = DMatrix::zeros(n, m);
    let mut cnt = DMatrix::<usize>::zeros(n, m);
    for s in &samples.samples {
        let k = axis.nearest_index(s.time);
        sum[(s.vertex, k)] += s.value;
        cnt[(s.vertex, k)] += 1;
    }
    for v in 0..n {
        for k in 0..m {
            if cnt[(v, k)] > 1 {
                sum[(v, k)] /= T::from_usize_lossy(cnt[(v, k)]);
            }
        }
    }
    Ok(sum)
}

/// Smallest graph-frequency set (greedy by energy) and smallest symmetric lowpass band
/// holding the requested energy fractions.
pub fn estimate_priors<T: Scalar>(
    samples: &SampleSet<T>,
    basis: &SpectralBasis<T>,
    axis: &TimeAxis<T>,
    beta_spectral: T,
    beta_frequency: T,
) -> Result<SpectralPrior<T>> {
    for b in [beta_spectral, beta_frequency] {
        if !(b > T::zero() && b <= T::one()) {
            return Err(Error::Config(format!("energy fraction {} outside (0, 1]", b.to_f())));
        }
    }
    let n = basis.len();
    let x = grid_samples(samples, n, axis)?;
    let total: f64 = x.iter().map(|v| v.to_f() * v.to_f()).sum();
    if total <= 0.0 {
        return Err(Error::InsufficientData);
    }

    let coeffs = basis.eigenvectors().tr_mul(&x);
    let energy: Vec<f64> = (0..n)
        .map(|k| (0..axis.len()).map(|m| axis.weights()[m].to_f() * coeffs[(k, m)].to_f().powi(2)).sum())
        .collect();
    let spectrum = energy_prefix(&energy, beta_spectral.to_f(), |a, b| energy[*b].total_cmp(&energy[*a]).then(a.cmp(b)));

    let m = axis.len();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    let mut power = vec![0.0f64; m / 2 + 1];
    for v in 0..n {
        let mut buf: Vec<Complex<f64>> = (0..m).map(|k| Complex::new(x[(v, k)].to_f(), 0.0)).collect();
        fft.process(&mut buf);
        for (j, p) in power.iter_mut().enumerate() {
            let mut e = buf[j].norm_sqr();
            let mirror = (m - j) % m;
            if mirror != j {
                e += buf[mirror].norm_sqr();
            }
            *p += e;
        }
    }
    let ptot: f64 = power.iter().sum();
    let target = beta_frequency.to_f() * ptot * (1.0 - 1e-12);
    let mut acc = 0.0;
    let mut jmax = power.len() - 1;
    for (j, p) in power.iter().enumerate() {
        acc += p;
        if acc >= target {
            jmax = j;
            break;
        }
    }
    let dw = 2.0 * std::f64::consts::PI / (m as f64 * axis.step().to_f());
    let w = ((jmax as f64 + 0.5) * dw).min(axis.nyquist().to_f() * (1.0 - 1e-6));
    Ok(SpectralPrior {
        spectrum,
        band: FrequencyBand::lowpass(T::lit(w))?,
        beta_spectral,
        beta_frequency,
    })
}

/// Greedy prefix of indices (in `order`) whose energy reaches `fraction` of the total.
fn energy_prefix<F: FnMut(&usize, &usize) -> std::cmp::Ordering>(energy: &[f64], fraction: f64, mut order: F) -> Vec<usize> {
    let total: f64 = energy.iter().sum();
    let mut idx: Vec<usize> = (0..energy.len()).filter(|&k| energy[k] > 0.0).collect();
    idx.sort_by(|a, b| order(a, b));
    let target = fraction * total * (1.0 - 1e-12);
    let mut acc = 0.0;
    let mut out = Vec::new();
    for k in idx {
        out.push(k);
        acc += energy[k];
        if acc >= target {
            break;
        }
    }
    out.sort_unstable();
    out
}

/// Greedy concentration score `cos(max(0, cos⁻¹√(λ_V λ_T) - cos⁻¹ β))`.
pub fn greedy_score<T: Scalar>(lambda_vertex: T, lambda_time: T, beta: T) -> T {
    let th = (lambda_vertex * lambda_time).clamp_to(T::zero(), T::one()).sqrt().acos();
    arc_upper(th, beta.clamp_to(T::zero(), T::one()).acos())
}

/// Output of the greedy vertex selection.
#[derive(Debug, Clone, Serialize)]
pub struct GreedyResult<T> {
    /// Selected vertices in insertion order.
    pub vertices: Vec<usize>,
    /// Score after each insertion.
    pub scores: Vec<T>,
    /// `λ_max(Π_Λ' Π_V' Π_Λ')` after each insertion.
    pub lambda_vertex: Vec<T>,
}

/// `λ_max(U_Λ'ᵀ D_S U_Λ')` for the subset `S` given as rows of `U_Λ'`.
pub fn subset_lambda<T: Scalar>(rows: &DMatrix<T>, subset: &[usize]) -> T {
    let k = rows.ncols();
    let mut g = DMatrix::zeros(k, k);
    for &v in subset {
        let r = rows.row(v);
        g += r.transpose() * r;
    }
    match symmetric_eigen_sorted(&g) {
        Ok((vals, _)) => vals[k - 1].clamp_to(T::zero(), T::one()),
        Err(_) => T::zero(),
    }
}

/// Greedy selection of `k` vertices; ties go to the smallest index.
pub fn greedy_vertex_core<T: Scalar>(basis: &SpectralBasis<T>, spectrum: &[usize], k: usize, lambda_time: T, beta: T) -> Result<GreedyResult<T>> {
    if spectrum.is_empty() || k == 0 {
        return Err(Error::EmptySubset);
    }
    let n = basis.len();
    let k = k.min(n);
    let rows = basis.columns(spectrum)?;
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; n];
    let mut scores = Vec::with_capacity(k);
    let mut lams = Vec::with_capacity(k);
    while chosen.len() < k {
        let mut best: Option<(usize, T, T)> = None;
        for v in 0..n {
            if used[v] {
                continue;
            }
            chosen.push(v);
            let lv = subset_lambda(&rows, &chosen);
            chosen.pop();
            let s = greedy_score(lv, lambda_time, beta);
            if best.map_or(true, |(_, bs, _)| s > bs) {
                best = Some((v, s, lv));
            }
        }
        let (v, s, lv) = best.expect("candidate available");
        used[v] = true;
        chosen.push(v);
        scores.push(s);
        lams.push(lv);
    }
    Ok(GreedyResult { vertices: chosen, scores, lambda_vertex: lams })
}

/// `λ_max(Π_Ω' Π_T' Π_Ω')`.
pub fn time_concentration<T: Scalar>(axis: &TimeAxis<T>, interval: &TimeInterval<T>, band: &FrequencyBand<T>) -> Result<T> {
    let pb = band_limit(axis, band)?;
    let pt = time_limit(axis, interval)?;
    lambda_max_value(&pb, &pt)
}

/// Greedy vertex selection with `K = |Λ'|` for the current interval.
pub fn greedy_vertex_selection<T: Scalar>(
    prior: &SpectralPrior<T>,
    interval: &TimeInterval<T>,
    basis: &SpectralBasis<T>,
    axis: &TimeAxis<T>,
) -> Result<GreedyResult<T>> {
    let lt = time_concentration(axis, interval, &prior.band)?;
    greedy_vertex_core(
        basis,
        &prior.spectrum,
        prior.spectrum.len(),
        lt,
        prior.beta_spectral * prior.beta_frequency,
    )
}

/// How the learning loop picks its starting interval.
#[derive(Debug, Clone)]
pub enum IntervalInit<T> {
    Fixed(TimeInterval<T>),
    /// Best profile loss over `centers` uniformly spaced centers × `lengths`.
    GridSearch { centers: usize, lengths: Vec<T> },
}

#[derive(Debug, Clone)]
pub struct JecdOptions<T> {
    /// Initial step on the center, applied to the gradient of the loss normalized by
    /// `‖y‖²`; `None` selects `0.1 δ²`.
    pub eta_center: Option<T>,
    pub eta_length: Option<T>,
    /// Outer stop: change of the normalized loss.
    pub tol: T,
    pub max_outer: usize,
    /// Absolute Lasso weight; `None` selects `mu_rel · ‖D_0ᵀ y‖_∞`.
    pub mu: Option<T>,
    pub mu_rel: T,
    /// PSWFs per vertex Slepian.
    pub time_atoms: usize,
    /// Lower clamp on the length; `None` selects two grid steps.
    pub min_length: Option<T>,
    pub init: IntervalInit<T>,
    pub lasso: LassoOptions,
}

impl<T: Scalar> JecdOptions<T> {
    pub fn new(init: IntervalInit<T>, time_atoms: usize) -> Self {
        Self {
            eta_center: None,
            eta_length: None,
            tol: T::lit(1e-10),
            max_outer: 200,
            mu: None,
            mu_rel: T::lit(0.01),
            time_atoms,
            min_length: None,
            init,
            lasso: LassoOptions::default(),
        }
    }
}

/// Learned dictionary parameters and coefficients.
#[derive(Debug, Clone, Serialize)]
pub struct JecdState<T> {
    pub vertices: Vec<usize>,
    pub center: T,
    pub length: T,
    pub coefficients: Vec<T>,
    pub mu: T,
    /// Full objective after each Lasso step.
    pub loss_history: Vec<T>,
    /// `(before, after)` objective of each Lasso step.
    pub lasso_steps: Vec<(T, T)>,
    /// `(center, length)` at every iterate.
    pub interval_trace: Vec<(T, T)>,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Scalar> JecdState<T> {
    pub fn interval(&self) -> TimeInterval<T> {
        TimeInterval { center: self.center, length: self.length }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&serde_json::json!({
            "vertices": self.vertices,
            "center": self.center.to_f(),
            "length": self.length.to_f(),
            "mu": self.mu.to_f(),
            "coefficients": self.coefficients.iter().map(|c| c.to_f()).collect::<Vec<_>>(),
            "loss_history": self.loss_history.iter().map(|c| c.to_f()).collect::<Vec<_>>(),
            "iterations": self.iterations,
            "converged": self.converged,
        }))?)
    }
}

/// Dictionary `Ξ(V', t_c, ℓ)` used by the learning loop.
pub fn jecd_dictionary<T: Scalar>(
    basis: &SpectralBasis<T>,
    axis: &TimeAxis<T>,
    prior: &SpectralPrior<T>,
    vertices: &[usize],
    interval: &TimeInterval<T>,
    time_atoms: usize,
) -> Result<Dictionary<T>> {
    product_dictionary(
        basis,
        axis,
        vertices,
        &prior.spectrum,
        &interval.clamped(axis),
        &prior.band,
        prior.spectrum.len(),
        time_atoms,
    )
}

struct Learner<'a, T: Scalar> {
    basis: &'a SpectralBasis<T>,
    axis: &'a TimeAxis<T>,
    prior: &'a SpectralPrior<T>,
    points: Vec<(usize, T)>,
    y: DVector<T>,
    opts: &'a JecdOptions<T>,
    mu: T,
    cache: HashMap<(Vec<usize>, usize, usize), (T, DVector<T>)>,
    greedy_cache: HashMap<(usize, usize), Vec<usize>>,
}

impl<T: Scalar> Learner<'_, T> {
    fn mask_key(&self, interval: &TimeInterval<T>) -> (usize, usize) {
        let mask = interval.clamped(self.axis).mask(self.axis);
        let lo = mask.iter().position(|&b| b).unwrap_or(0);
        let hi = mask.iter().rposition(|&b| b).unwrap_or(0);
        (lo, hi)
    }

    fn design(&self, vertices: &[usize], interval: &TimeInterval<T>) -> Result<DMatrix<T>> {
        let d = jecd_dictionary(self.basis, self.axis, self.prior, vertices, interval, self.opts.time_atoms)?;
        d.matrix_at(&self.points)
    }

    fn greedy(&mut self, interval: &TimeInterval<T>) -> Result<Vec<usize>> {
        let key = self.mask_key(interval);
        if let Some(v) = self.greedy_cache.get(&key) {
            return Ok(v.clone());
        }
        let v = greedy_vertex_selection(self.prior, &interval.clamped(self.axis), self.basis, self.axis)?.vertices;
        self.greedy_cache.insert(key, v.clone());
        Ok(v)
    }

    /// `min_x` of the objective for a fixed dictionary (cached by grid support).
    fn profile(&mut self, vertices: &[usize], interval: &TimeInterval<T>) -> Result<(T, DVector<T>)> {
        let mut vs = vertices.to_vec();
        vs.sort_unstable();
        let (lo, hi) = self.mask_key(interval);
        let key = (vs, lo, hi);
        if let Some(r) = self.cache.get(&key) {
            return Ok(r.clone());
        }
        let d = self.design(vertices, interval)?;
        let r = lasso_warm(&self.y, &d, self.mu, None, self.opts.lasso);
        let out = (r.objective, r.x);
        self.cache.insert(key, out.clone());
        Ok(out)
    }
}

/// Alternates greedy vertex selection, Lasso and finite-difference gradient steps on the
/// interval center and length. Returns the best state seen.
pub fn jecd_learn<T: Scalar>(
    train: &SampleSet<T>,
    basis: &SpectralBasis<T>,
    axis: &TimeAxis<T>,
    prior: &SpectralPrior<T>,
    opts: &JecdOptions<T>,
) -> Result<JecdState<T>> {
    if train.is_empty() {
        return Err(Error::InsufficientData);
    }
    train.validate(basis.len(), axis)?;
    let y = train.values();
    let ynorm2 = y.norm_squared();
    if ynorm2 <= T::zero() {
        return Err(Error::InsufficientData);
    }
    let dt = axis.step();
    let (t_lo, t_hi) = (axis.start(), axis.end());
    let min_len = opts.min_length.unwrap_or(dt * T::lit(2.0)).min(axis.span());
    let clamp_c = |c: T| c.clamp_to(t_lo, t_hi);
    let clamp_l = |l: T| l.clamp_to(min_len, axis.span());

    let mut lr = Learner {
        basis,
        axis,
        prior,
        points: train.points(),
        y: y.clone(),
        opts,
        mu: T::zero(),
        cache: HashMap::new(),
        greedy_cache: HashMap::new(),
    };

    let candidates: Vec<TimeInterval<T>> = match &opts.init {
        IntervalInit::Fixed(iv) => vec![TimeInterval { center: clamp_c(iv.center), length: clamp_l(iv.length) }],
        IntervalInit::GridSearch { centers, lengths } => {
            let nc = (*centers).max(1);
            let mut out = Vec::new();
            for j in 0..nc {
                let c = if nc == 1 {
                    (t_lo + t_hi) * T::lit(0.5)
                } else {
                    t_lo + axis.span() * T::from_usize_lossy(j) / T::from_usize_lossy(nc - 1)
                };
                for &l in lengths {
                    out.push(TimeInterval { center: c, length: clamp_l(l) });
                }
            }
            out
        }
    };
    if candidates.is_empty() {
        return Err(Error::Config("no initial interval candidates".into()));
    }

    let v0 = lr.greedy(&candidates[0])?;
    let d0 = lr.design(&v0, &candidates[0])?;
    lr.mu = opts.mu.unwrap_or_else(|| opts.mu_rel * d0.tr_mul(&y).amax());

    let mut interval = candidates[0];
    let mut vertices = v0;
    let mut best_init: Option<T> = None;
    for iv in &candidates {
        let vs = lr.greedy(iv)?;
        let (loss, _) = lr.profile(&vs, iv)?;
        if best_init.map_or(true, |b| loss < b) {
            best_init = Some(loss);
            interval = *iv;
            vertices = vs;
        }
    }

    let mut x = lr.profile(&vertices, &interval)?.1;
    let mut loss_history = Vec::new();
    let mut lasso_steps = Vec::new();
    let mut interval_trace = vec![(interval.center, interval.length)];
    let mut best: Option<(T, Vec<usize>, TimeInterval<T>, DVector<T>)> = None;
    let mut converged = false;
    let mut iterations = 0;
    let eta_c = opts.eta_center.unwrap_or(axis.span() * axis.span() * T::lit(0.1));
    let eta_l = opts.eta_length.unwrap_or(axis.span() * axis.span() * T::lit(0.1));
    let mut scale = T::one();

    for u in 0..opts.max_outer {
        iterations = u + 1;
        let d_cur = lr.design(&vertices, &interval)?;
        let cur_obj = objective(&y, &d_cur, &x, lr.mu);
        let vn = lr.greedy(&interval)?;
        let mut d = d_cur;
        let mut x_start = x.clone();
        let mut start_obj = cur_obj;
        if vn != vertices {
            let dn = lr.design(&vn, &interval)?;
            let (ln, xn) = lr.profile(&vn, &interval)?;
            if ln <= cur_obj {
                vertices = vn;
                d = dn;
                x_start = xn;
                start_obj = objective(&y, &d, &x_start, lr.mu);
            }
        }
        let r = lasso_warm(&y, &d, lr.mu, Some(&x_start), opts.lasso);
        lasso_steps.push((start_obj, r.objective));
        x = r.x;
        let loss = r.objective;
        loss_history.push(loss);
        if best.as_ref().map_or(true, |b| loss < b.0) {
            best = Some((loss, vertices.clone(), interval, x.clone()));
        }
        if u > 0 {
            let prev = loss_history[loss_history.len() - 2];
            if (loss - prev).abs() <= opts.tol * ynorm2 {
                converged = true;
                break;
            }
        }

        let shifted = |c: T, l: T| TimeInterval { center: c, length: l };
        let lp = lr.profile(&vertices, &shifted(clamp_c(interval.center + dt), interval.length))?.0;
        let lm = lr.profile(&vertices, &shifted(clamp_c(interval.center - dt), interval.length))?.0;
        let gc = (lp - lm) / (T::lit(2.0) * dt) / ynorm2;
        let h = dt * T::lit(2.0);
        let lp = lr.profile(&vertices, &shifted(interval.center, clamp_l(interval.length + h)))?.0;
        let lm = lr.profile(&vertices, &shifted(interval.center, clamp_l(interval.length - h)))?.0;
        let gl = (lp - lm) / (T::lit(2.0) * h) / ynorm2;
        // Backtrack on the step until the profile loss drops or the move falls below
        // half a grid step.
        let mut moved = false;
        loop {
            let next = TimeInterval {
                center: clamp_c(interval.center - eta_c * scale * gc),
                length: clamp_l(interval.length - eta_l * scale * gl),
            };
            let half = dt * T::lit(0.5);
            if (next.center - interval.center).abs() < half && (next.length - interval.length).abs() < half {
                break;
            }
            let (ln, xn) = lr.profile(&vertices, &next)?;
            if ln < loss {
                x = xn;
                interval = next;
                moved = true;
                scale = (scale * T::lit(2.0)).min(T::lit(16.0));
                break;
            }
            scale *= T::lit(0.5);
        }
        if !moved {
            // Fall back to the best grid move: shift, grow or shrink both endpoints, or move one.
            let half = dt * T::lit(0.5);
            let two = dt * T::lit(2.0);
            let z = T::zero();
            let mut best_move: Option<(T, TimeInterval<T>, DVector<T>)> = None;
            let moves = [(dt, z), (-dt, z), (z, two), (z, -two), (half, dt), (-half, dt), (half, -dt), (-half, -dt)];
            for (dc, dl) in moves {
                let cand = TimeInterval { center: clamp_c(interval.center + dc), length: clamp_l(interval.length + dl) };
                let (ln, xn) = lr.profile(&vertices, &cand)?;
                if ln < loss && best_move.as_ref().map_or(true, |b| ln < b.0) {
                    best_move = Some((ln, cand, xn));
                }
            }
            match best_move {
                Some((_, cand, xn)) => {
                    interval = cand;
                    x = xn;
                    scale = T::one();
                }
                None => {
                    converged = true;
                    break;
                }
            }
        }
        interval_trace.push((interval.center, interval.length));
    }

    let (_, vertices, interval, x) = best.expect("at least one iteration");
    Ok(JecdState {
        vertices,
        center: interval.center,
        length: interval.length,
        coefficients: x.iter().copied().collect(),
        mu: lr.mu,
        loss_history,
        lasso_steps,
        interval_trace,
        iterations,
        converged,
    })
}

/// Reconstruction on the grid and its validation error.
#[derive(Debug, Clone)]
pub struct Reconstruction<T: Scalar> {
    pub coefficients: DVector<T>,
    /// Estimate on the joint grid, vertex-major.
    pub grid: DVector<T>,
    pub rse: T,
}

/// `Σ (f - f̂)² / Σ f²`.
pub fn rse<T: Scalar>(truth: &DVector<T>, estimate: &DVector<T>) -> Result<T> {
    let den = truth.norm_squared();
    if den <= T::zero() {
        return Err(Error::ZeroValidationEnergy);
    }
    Ok((truth - estimate).norm_squared() / den)
}

/// Fits the dictionary on observed `test` samples and scores it on `validation`.
/// `mu = None` selects `0.01 · ‖Dᵀy‖_∞`.
pub fn reconstruct<T: Scalar>(
    test: &SampleSet<T>,
    validation: &SampleSet<T>,
    dictionary: &Dictionary<T>,
    mu: Option<T>,
    opts: LassoOptions,
) -> Result<Reconstruction<T>> {
    let d = dictionary.matrix_at(&test.points())?;
    let y = test.values();
    let mu = mu.unwrap_or_else(|| T::lit(0.01) * d.tr_mul(&y).amax());
    let r = lasso_warm(&y, &d, mu, None, opts);
    let dv = dictionary.matrix_at(&validation.points())?;
    let est = &dv * &r.x;
    let err = rse(&validation.values(), &est)?;
    Ok(Reconstruction { grid: dictionary.synthesize(&r.x), coefficients: r.x, rse: err })
}
