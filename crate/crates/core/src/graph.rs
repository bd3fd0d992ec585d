//! Weighted undirected graphs, the combinatorial Laplacian and its spectral basis.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Weighted undirected connected graph without self-loops.
#[derive(Debug, Clone)]
pub struct Graph<T: Scalar> {
    adjacency: DMatrix<T>,
}

impl<T: Scalar> Graph<T> {
    /// Validates `adjacency` (square, symmetric, nonnegative, zero diagonal, connected).
    pub fn new(adjacency: DMatrix<T>) -> Result<Self> {
        let (rows, cols) = adjacency.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::EmptyGraph);
        }
        for i in 0..rows {
            if adjacency[(i, i)] != T::zero() {
                return Err(Error::SelfLoop(i));
            }
            for j in 0..rows {
                if adjacency[(i, j)] < T::zero() {
                    return Err(Error::NegativeWeight { i, j });
                }
                if adjacency[(i, j)] != adjacency[(j, i)] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        let g = Self { adjacency };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Builds a graph from undirected weighted edges; repeated edges accumulate.
    pub fn from_edges(n: usize, edges: &[(usize, usize, T)]) -> Result<Self> {
        let mut a = DMatrix::zeros(n, n);
        for &(i, j, w) in edges {
            if i >= n {
                return Err(Error::VertexOutOfRange { index: i, n });
            }
            if j >= n {
                return Err(Error::VertexOutOfRange { index: j, n });
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            a[(i, j)] += w;
            a[(j, i)] += w;
        }
        Self::new(a)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i, T::one())).collect();
        Self::from_edges(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut a = DMatrix::from_element(n, n, T::one());
        a.fill_diagonal(T::zero());
        Self::new(a)
    }

    /// Unit-weight Erdős–Rényi graph G(n, p); redraws until the sample is connected.
    pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Config(format!("edge probability {p} outside (0, 1]")));
        }
        for _ in 0..10_000 {
            let mut a = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.random::<f64>() < p {
                        a[(i, j)] = T::one();
                        a[(j, i)] = T::one();
                    }
                }
            }
            match Self::new(a) {
                Ok(g) => return Ok(g),
                Err(Error::Disconnected) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::Disconnected)
    }

    pub fn n_vertices(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<T> {
        &self.adjacency
    }

    pub fn degrees(&self) -> DVector<T> {
        DVector::from_iterator(
            self.n_vertices(),
            self.adjacency.row_iter().map(|r| r.sum()),
        )
    }

    pub fn laplacian(&self) -> DMatrix<T> {
        laplacian(self)
    }

    /// Undirected edges `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, T)> {
        let n = self.n_vertices();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.adjacency[(i, j)];
                if w > T::zero() {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    fn is_connected(&self) -> bool {
        let n = self.n_vertices();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if !seen[j] && self.adjacency[(i, j)] > T::zero() {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == n
    }
}

/// Combinatorial Laplacian `D - A`.
pub fn laplacian<T: Scalar>(g: &Graph<T>) -> DMatrix<T> {
    let mut l = -g.adjacency().clone();
    let d = g.degrees();
    for i in 0..g.n_vertices() {
        l[(i, i)] = d[i];
    }
    l
}

/// Full Laplacian eigendecomposition, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralBasis<T: Scalar> {
    eigenvalues: DVector<T>,
    eigenvectors: DMatrix<T>,
}

/// Eigendecomposition of a symmetric matrix sorted ascending, each eigenvector signed so
/// that its first entry of non-negligible magnitude is positive.
pub fn symmetric_eigen_sorted<T: Scalar>(m: &DMatrix<T>) -> Result<(DVector<T>, DMatrix<T>)> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.ncols() });
    }
    let eig = SymmetricEigen::try_new(m.clone(), T::default_epsilon(), 100 * n.max(10))
        .ok_or(Error::DecompositionFailed)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        sign_normalize(&mut col);
        vectors.set_column(dst, &col);
    }
    Ok((values, vectors))
}

/// Flips `v` so that its first entry whose magnitude exceeds 1e-8 of the max is positive.
pub fn sign_normalize<T: Scalar>(v: &mut DVector<T>) {
    let scale = v.amax();
    let thresh = scale * T::lit(1e-8);
    if let Some(x) = v.iter().find(|x| x.abs() > thresh) {
        if *x < T::zero() {
            v.neg_mut();
        }
    }
}

/// Eigendecomposition of a graph Laplacian.
pub fn spectral_basis<T: Scalar>(l: &DMatrix<T>) -> Result<SpectralBasis<T>> {
    let (mut values, vectors) = symmetric_eigen_sorted(l)?;
    if values.len() > 0 && values[0].abs() <= T::lit(1e-10) {
        values[0] = T::zero();
    }
    Ok(SpectralBasis { eigenvalues: values, eigenvectors: vectors })
}

impl<T: Scalar> SpectralBasis<T> {
    pub fn of_graph(g: &Graph<T>) -> Result<Self> {
        spectral_basis(&g.laplacian())
    }

    /// Builds a basis from given eigenpairs (columns of `u` orthonormal).
    pub fn from_parts(eigenvalues: DVector<T>, eigenvectors: DMatrix<T>) -> Result<Self> {
        if eigenvectors.nrows() != eigenvectors.ncols() {
            return Err(Error::NotSquare { rows: eigenvectors.nrows(), cols: eigenvectors.ncols() });
        }
        if eigenvalues.len() != eigenvectors.ncols() {
            return Err(Error::DimensionMismatch {
                expected: eigenvectors.ncols(),
                got: eigenvalues.len(),
            });
        }
        Ok(Self { eigenvalues, eigenvectors })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &DVector<T> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<T> {
        &self.eigenvectors
    }

    pub fn lambda_max(&self) -> T {
        self.eigenvalues[self.len() - 1]
    }

    /// Columns `u_k` for `k` in `subset`, in the given order.
    pub fn columns(&self, subset: &[usize]) -> Result<DMatrix<T>> {
        let n = self.len();
        let mut out = DMatrix::zeros(n, subset.len());
        for (j, &k) in subset.iter().enumerate() {
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, size: n });
            }
            out.set_column(j, &self.eigenvectors.column(k));
        }
        Ok(out)
    }

    pub fn gft(&self, x: &DVector<T>) -> Result<DVector<T>> {
        self.check_len(x.len())?;
        Ok(self.eigenvectors.tr_mul(x))
    }

    pub fn igft(&self, xhat: &DVector<T>) -> Result<DVector<T>> {
        self.check_len(xhat.len())?;
        Ok(&self.eigenvectors * xhat)
    }

    /// Spectral filter `U h(Λ) Uᵀ`.
    pub fn filter<F: Fn(T) -> T>(&self, h: F) -> DMatrix<T> {
        let n = self.len();
        let mut scaled = self.eigenvectors.clone();
        for k in 0..n {
            let g = h(self.eigenvalues[k]);
            scaled.column_mut(k).scale_mut(g);
        }
        scaled * self.eigenvectors.transpose()
    }

    /// Heat kernel `e^{-τL}`.
    pub fn heat_kernel(&self, tau: T) -> DMatrix<T> {
        self.filter(|l| (-tau * l).exp())
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got });
        }
        Ok(())
    }
}
