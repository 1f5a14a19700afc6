//! Dense complex-matrix kernels for bipartite (and multipartite-cut)
//! quantum states: tensor products, partial trace, partial transpose,
//! realignment, trace norm, Schmidt decomposition, entropies, fidelity.
//!
//! All operations are pure functions of their inputs; the types are
//! immutable after validation.

use ndarray::{Array1, Array2, ArrayView2};
use ndarray_linalg::{Eigh, SVDInto, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;

pub(crate) fn dim_product(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Row-major strides for a multi-index over `dims`.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn hermiticity_deviation(m: &ArrayView2<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    dev
}

/// Hermitian eigendecomposition (ascending eigenvalues; eigenvectors in
/// columns).
///
/// The backend hands back the eigenvector matrix of the transposed
/// (row-major reinterpreted) input, so columns arrive conjugated;
/// undo that here so that A v_k = lambda_k v_k holds for every column.
pub(crate) fn eigh(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let (vals, vecs) = m.eigh(UPLO::Lower)?;
    Ok((vals, vecs.mapv(|z| z.conj())))
}

/// Eigenvalues only, ascending.
pub(crate) fn eigvalsh(m: &Array2<C64>) -> Result<Array1<f64>> {
    Ok(eigh(m)?.0)
}

pub(crate) fn min_eigenvalue(m: &Array2<C64>) -> Result<f64> {
    let vals = eigvalsh(m)?;
    Ok(vals.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Singular values of a general complex matrix, descending.
pub(crate) fn singular_values(m: &Array2<C64>) -> Result<Array1<f64>> {
    let (_, s, _) = m.clone().svd_into(false, false)?;
    Ok(s)
}

/// Kronecker product.
pub fn kron(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Array2<C64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[[i * rb + k, j * cb + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Embed `op` (acting on the listed subsystem `positions`, in that order)
/// into the full space described by `dims`, acting as the identity
/// elsewhere.
pub fn embed_operator(op: &ArrayView2<C64>, positions: &[usize], dims: &[usize]) -> Array2<C64> {
    let side = dim_product(dims);
    let st = strides(dims);
    let sub_dims: Vec<usize> = positions.iter().map(|&p| dims[p]).collect();
    let sub_side = dim_product(&sub_dims);
    assert_eq!(op.nrows(), sub_side, "operator side must match subsystems");
    let sub_strides = strides(&sub_dims);

    let mut out = Array2::zeros((side, side));
    // Enumerate the indices of the untouched subsystems once.
    let rest: Vec<usize> = (0..dims.len()).filter(|p| !positions.contains(p)).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&p| dims[p]).collect();
    let rest_side = dim_product(&rest_dims);
    let rest_strides = strides(&rest_dims);

    for r in 0..rest_side {
        let mut base = 0usize;
        for (ri, &p) in rest.iter().enumerate() {
            let digit = (r / rest_strides[ri]) % rest_dims[ri];
            base += digit * st[p];
        }
        for si in 0..sub_side {
            for sj in 0..sub_side {
                let v = op[[si, sj]];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut row = base;
                let mut col = base;
                for (pi, &p) in positions.iter().enumerate() {
                    row += ((si / sub_strides[pi]) % sub_dims[pi]) * st[p];
                    col += ((sj / sub_strides[pi]) % sub_dims[pi]) * st[p];
                }
                out[[row, col]] = v;
            }
        }
    }
    out
}

fn validate_dims(dims: &[usize], side: usize) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidParameter(
            "subsystem dimensions must all be at least 2".into(),
        ));
    }
    if dim_product(dims) != side {
        return Err(Error::DimensionMismatch(format!(
            "matrix side {side} does not match product of dims {dims:?}"
        )));
    }
    Ok(())
}

/// A density matrix with declared subsystem dimensions.
///
/// Validated on construction: Hermitian, unit trace, positive
/// semidefinite (all within the tolerances of [`crate::tol`]).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    dims: Vec<usize>,
    matrix: Array2<C64>,
}

impl DenseState {
    pub fn new(dims: Vec<usize>, matrix: Array2<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch("matrix is not square".into()));
        }
        validate_dims(&dims, matrix.nrows())?;
        let dev = hermiticity_deviation(&matrix.view());
        if dev > tol::HERMITICITY {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr: C64 = matrix.diag().sum();
        let tdev = (tr - C64::new(1.0, 0.0)).norm();
        if tdev > tol::TRACE {
            return Err(Error::TraceNotOne { deviation: tdev });
        }
        let min = min_eigenvalue(&matrix)?;
        if min < tol::PSD {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { dims, matrix })
    }

    /// Construct without re-running the validation eigensolve.
    ///
    /// For internal builders whose output is a valid state by
    /// construction (projectors of normalized vectors, convex mixtures
    /// of validated states).
    pub(crate) fn new_unchecked(dims: Vec<usize>, matrix: Array2<C64>) -> Self {
        debug_assert_eq!(dim_product(&dims), matrix.nrows());
        Self { dims, matrix }
    }

    /// Projector onto a normalized pure state.
    pub fn from_pure(dims: Vec<usize>, psi: &Array1<C64>) -> Result<Self> {
        validate_dims(&dims, psi.len())?;
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol::STATE_NORM {
            return Err(Error::NotNormalized { norm });
        }
        let n = psi.len();
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] = psi[i] * psi[j].conj();
            }
        }
        Ok(Self::new_unchecked(dims, m))
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let side = dim_product(&dims);
        let m = Array2::eye(side).mapv(|z: C64| z / side as f64);
        Self::new_unchecked(dims, m)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn side(&self) -> usize {
        self.matrix.nrows()
    }

    /// The (d_A, d_B) pair; errors unless exactly two subsystems are declared.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        if self.dims.len() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected a bipartite state, got {} subsystems",
                self.dims.len()
            )));
        }
        Ok((self.dims[0], self.dims[1]))
    }

    pub fn eigenvalues(&self) -> Result<Array1<f64>> {
        eigvalsh(&self.matrix)
    }

    /// Number of eigenvalues above 1e-10.
    pub fn rank(&self) -> Result<usize> {
        Ok(self
            .eigenvalues()?
            .iter()
            .filter(|&&v| v > 1e-10)
            .count())
    }

    pub fn purity(&self) -> f64 {
        self.matrix
            .iter()
            .map(|z| z.norm_sqr())
            .sum()
    }
}

/// A Hermitian observable with declared subsystem dimensions; no trace or
/// positivity constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dims: Vec<usize>,
    matrix: Array2<C64>,
}

impl HermitianOperator {
    pub fn new(dims: Vec<usize>, matrix: Array2<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch("matrix is not square".into()));
        }
        validate_dims(&dims, matrix.nrows())?;
        let dev = hermiticity_deviation(&matrix.view());
        if dev > tol::HERMITICITY {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self { dims, matrix })
    }

    pub(crate) fn new_unchecked(dims: Vec<usize>, matrix: Array2<C64>) -> Self {
        Self { dims, matrix }
    }

    pub fn from_state(state: &DenseState) -> Self {
        Self {
            dims: state.dims.to_vec(),
            matrix: state.matrix.clone(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn side(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        if self.dims.len() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected a bipartite operator, got {} subsystems",
                self.dims.len()
            )));
        }
        Ok((self.dims[0], self.dims[1]))
    }

    pub fn eigenvalues(&self) -> Result<Array1<f64>> {
        eigvalsh(&self.matrix)
    }

    /// Real expectation value Tr(K rho).
    pub fn expectation(&self, state: &DenseState) -> Result<f64> {
        if self.side() != state.side() {
            return Err(Error::DimensionMismatch(
                "operator and state sides differ".into(),
            ));
        }
        Ok(trace_product(&self.matrix.view(), state.matrix()))
    }
}

/// Re(Tr(A B)) for Hermitian A, B (the trace is real in that case).
pub(crate) fn trace_product(a: &ArrayView2<C64>, b: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[[i, j]] * b[[j, i]];
        }
    }
    acc.re
}

/// Schmidt decomposition of a bipartite pure state.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Nonincreasing, nonnegative; squares sum to one.
    pub coefficients: Vec<f64>,
    /// Orthonormal columns on the A side, one per coefficient.
    pub left: Array2<C64>,
    /// Orthonormal columns on the B side, one per coefficient.
    pub right: Array2<C64>,
}

impl SchmidtDecomposition {
    /// Number of coefficients above 1e-10.
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&c| c > 1e-10).count()
    }
}

/// Reduced state on the kept subsystems (`keep` strictly increasing).
pub fn partial_trace(state: &DenseState, keep: &[usize]) -> Result<DenseState> {
    let dims = state.dims();
    let n = dims.len();
    if keep.is_empty()
        || keep.len() >= n
        || keep.windows(2).any(|w| w[0] >= w[1])
        || keep.iter().any(|&p| p >= n)
    {
        return Err(Error::InvalidSubsystem {
            index: keep.to_vec(),
            count: n,
        });
    }
    let traced: Vec<usize> = (0..n).filter(|p| !keep.contains(p)).collect();
    let st = strides(dims);

    let keep_dims: Vec<usize> = keep.iter().map(|&p| dims[p]).collect();
    let keep_side = dim_product(&keep_dims);
    let keep_strides = strides(&keep_dims);
    let traced_dims: Vec<usize> = traced.iter().map(|&p| dims[p]).collect();
    let traced_side = dim_product(&traced_dims);
    let traced_strides = strides(&traced_dims);

    let mut out = Array2::zeros((keep_side, keep_side));
    let m = state.matrix();
    for i in 0..keep_side {
        let mut row_base = 0usize;
        for (ki, &p) in keep.iter().enumerate() {
            row_base += ((i / keep_strides[ki]) % keep_dims[ki]) * st[p];
        }
        for j in 0..keep_side {
            let mut col_base = 0usize;
            for (ki, &p) in keep.iter().enumerate() {
                col_base += ((j / keep_strides[ki]) % keep_dims[ki]) * st[p];
            }
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..traced_side {
                let mut off = 0usize;
                for (ti, &p) in traced.iter().enumerate() {
                    off += ((t / traced_strides[ti]) % traced_dims[ti]) * st[p];
                }
                acc += m[[row_base + off, col_base + off]];
            }
            out[[i, j]] = acc;
        }
    }
    Ok(DenseState::new_unchecked(keep_dims, out))
}

/// Transpose the listed subsystems (low-level, no validation).
pub(crate) fn partial_transpose_matrix(
    matrix: &ArrayView2<C64>,
    dims: &[usize],
    parts: &[usize],
) -> Array2<C64> {
    let side = matrix.nrows();
    let st = strides(dims);
    let mut out = Array2::zeros((side, side));
    for i in 0..side {
        for j in 0..side {
            let mut r = i;
            let mut c = j;
            for &p in parts {
                let di = (i / st[p]) % dims[p];
                let dj = (j / st[p]) % dims[p];
                r = r - di * st[p] + dj * st[p];
                c = c - dj * st[p] + di * st[p];
            }
            out[[r, c]] = matrix[[i, j]];
        }
    }
    out
}

fn check_parts(dims: &[usize], parts: &[usize]) -> Result<()> {
    if parts.is_empty()
        || parts.iter().any(|&p| p >= dims.len())
        || parts.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidSubsystem {
            index: parts.to_vec(),
            count: dims.len(),
        });
    }
    Ok(())
}

impl DenseState {
    /// Partial transpose of one subsystem; Hermiticity and trace are
    /// preserved but positivity generally is not.
    pub fn partial_transpose(&self, part: usize) -> Result<HermitianOperator> {
        self.partial_transpose_parts(&[part])
    }

    /// Partial transpose of a set of subsystems (a declared cut).
    pub fn partial_transpose_parts(&self, parts: &[usize]) -> Result<HermitianOperator> {
        check_parts(&self.dims, parts)?;
        let m = partial_transpose_matrix(&self.matrix.view(), &self.dims, parts);
        Ok(HermitianOperator::new_unchecked(self.dims.clone(), m))
    }
}

impl HermitianOperator {
    pub fn partial_transpose(&self, part: usize) -> Result<HermitianOperator> {
        check_parts(&self.dims, &[part])?;
        let m = partial_transpose_matrix(&self.matrix.view(), &self.dims, &[part]);
        Ok(HermitianOperator::new_unchecked(self.dims.clone(), m))
    }
}

/// Realignment R: |i><j| (x) |k><l|  ->  |i><k| (x) |j><l|, as the
/// d_A^2 x d_B^2 array R[(i,j),(k,l)] = rho[(i,k),(j,l)].
pub fn realign(state: &DenseState) -> Result<Array2<C64>> {
    let (da, db) = state.bipartite_dims()?;
    Ok(realign_matrix(&state.matrix().view(), da, db))
}

pub(crate) fn realign_matrix(m: &ArrayView2<C64>, da: usize, db: usize) -> Array2<C64> {
    let mut out = Array2::zeros((da * da, db * db));
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[[i * da + j, k * db + l]] = m[[i * db + k, j * db + l]];
                }
            }
        }
    }
    out
}

/// Sum of singular values.
pub fn trace_norm(m: &ArrayView2<C64>) -> Result<f64> {
    let s = singular_values(&m.to_owned())?;
    Ok(s.sum())
}

/// Schmidt decomposition of a normalized bipartite pure state.
pub fn schmidt_decompose(psi: &Array1<C64>, dims: (usize, usize)) -> Result<SchmidtDecomposition> {
    let (da, db) = dims;
    if psi.len() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} does not match {}x{}",
            psi.len(),
            da,
            db
        )));
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > tol::STATE_NORM {
        return Err(Error::NotNormalized { norm });
    }
    let mut m = Array2::zeros((da, db));
    for i in 0..da {
        for j in 0..db {
            m[[i, j]] = psi[i * db + j];
        }
    }
    let (u, s, vt) = m
        .svd_into(true, true)
        .map_err(|e| Error::Backend(e.to_string()))?;
    let u = u.expect("requested U");
    let vt = vt.expect("requested V^T");
    let r = s.len();
    let mut left = Array2::zeros((da, r));
    let mut right = Array2::zeros((db, r));
    for k in 0..r {
        for i in 0..da {
            left[[i, k]] = u[[i, k]];
        }
        for j in 0..db {
            right[[j, k]] = vt[[k, j]];
        }
    }
    Ok(SchmidtDecomposition {
        coefficients: s.to_vec(),
        left,
        right,
    })
}

/// Von Neumann entropy in bits, counting eigenvalues above 1e-14.
pub fn von_neumann_entropy(state: &DenseState) -> Result<f64> {
    let vals = state.eigenvalues()?;
    Ok(vals
        .iter()
        .filter(|&&v| v > tol::EIGEN_ZERO)
        .map(|&v| -v * v.log2())
        .sum())
}

/// Quantum relative entropy S(rho || sigma) in bits; +inf when the
/// support of rho is not contained in the support of sigma.
pub fn relative_entropy(rho: &DenseState, sigma: &DenseState) -> Result<f64> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimensionMismatch(
            "relative entropy requires matching dims".into(),
        ));
    }
    let (rvals, rvecs) = eigh(rho.matrix())?;
    let (svals, svecs) = eigh(sigma.matrix())?;
    let n = rvals.len();

    let mut s = 0.0;
    for i in 0..n {
        if rvals[i] > tol::EIGEN_ZERO {
            s += rvals[i] * rvals[i].log2();
        }
    }
    // Overlap weights p_ij = |<psi_i|phi_j>|^2.
    for j in 0..n {
        let mut mass = 0.0;
        let mut contrib = 0.0;
        for i in 0..n {
            if rvals[i] <= tol::EIGEN_ZERO {
                continue;
            }
            let mut ip = C64::new(0.0, 0.0);
            for a in 0..n {
                ip += rvecs[[a, i]].conj() * svecs[[a, j]];
            }
            let p = ip.norm_sqr();
            mass += rvals[i] * p;
            contrib += rvals[i] * p;
        }
        if svals[j] <= tol::EIGEN_ZERO {
            if mass > 1e-10 {
                return Ok(f64::INFINITY);
            }
        } else {
            s -= contrib * svals[j].log2();
        }
    }
    Ok(s.max(0.0))
}

/// Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
pub fn state_fidelity(rho: &DenseState, sigma: &DenseState) -> Result<f64> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimensionMismatch(
            "fidelity requires matching dims".into(),
        ));
    }
    let (vals, vecs) = eigh(rho.matrix())?;
    let n = vals.len();
    // Eigenvalues at round-off scale are clamped to zero before the
    // square roots; sqrt would otherwise amplify 1e-16 noise to 1e-8.
    let mut sqrt_rho = Array2::<C64>::zeros((n, n));
    for k in 0..n {
        if vals[k] <= tol::EIGEN_ZERO {
            continue;
        }
        let s = vals[k].sqrt();
        for i in 0..n {
            for j in 0..n {
                sqrt_rho[[i, j]] += C64::new(s, 0.0) * vecs[[i, k]] * vecs[[j, k]].conj();
            }
        }
    }
    let inner = sqrt_rho.dot(sigma.matrix()).dot(&sqrt_rho);
    let ivals = eigvalsh(&inner)?;
    let tr: f64 = ivals
        .iter()
        .map(|&v| if v > tol::EIGEN_ZERO { v.sqrt() } else { 0.0 })
        .sum();
    Ok(tr * tr)
}

/// Seeded random constructions used by tests, validation gates, and the
/// see-saw optimizers.
pub mod sample {
    use super::*;
    use ndarray::Array1;
    use rand::Rng;
    use rand_distr::StandardNormal;

    pub fn random_unit_vector<R: Rng>(rng: &mut R, d: usize) -> Array1<C64> {
        let mut v = Array1::zeros(d);
        loop {
            for z in v.iter_mut() {
                *z = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            }
            let norm = v.iter().map(|z: &C64| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                v.mapv_inplace(|z| z / norm);
                return v;
            }
        }
    }

    pub fn random_product_vector<R: Rng>(rng: &mut R, dims: &[usize]) -> Array1<C64> {
        let mut psi = Array1::from_elem(1, C64::new(1.0, 0.0));
        for &d in dims {
            let factor = random_unit_vector(rng, d);
            let mut next = Array1::zeros(psi.len() * d);
            for (i, a) in psi.iter().enumerate() {
                for (j, b) in factor.iter().enumerate() {
                    next[i * d + j] = a * b;
                }
            }
            psi = next;
        }
        psi
    }

    pub fn random_product_state<R: Rng>(rng: &mut R, dims: &[usize]) -> DenseState {
        let psi = random_product_vector(rng, dims);
        DenseState::from_pure(dims.to_vec(), &psi).expect("product vector is normalized")
    }

    /// Convex mixture of `terms` random pure product states.
    pub fn random_separable_mixture<R: Rng>(
        rng: &mut R,
        dims: &[usize],
        terms: usize,
    ) -> DenseState {
        let side = dim_product(dims);
        let mut weights: Vec<f64> = (0..terms).map(|_| -rng.random::<f64>().ln()).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let mut m = Array2::zeros((side, side));
        for &w in &weights {
            let psi = random_product_vector(rng, dims);
            for i in 0..side {
                for j in 0..side {
                    m[[i, j]] += C64::new(w, 0.0) * psi[i] * psi[j].conj();
                }
            }
        }
        DenseState::new_unchecked(dims.to_vec(), m)
    }

    /// Hilbert-Schmidt ensemble: G G^dagger normalized, G Ginibre.
    pub fn random_density_matrix<R: Rng>(rng: &mut R, dims: &[usize]) -> DenseState {
        let side = dim_product(dims);
        let mut g = Array2::zeros((side, side));
        for z in g.iter_mut() {
            *z = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        let mut m: Array2<C64> = g.dot(&g.mapv(|z| z.conj()).reversed_axes());
        let tr: f64 = m.diag().iter().map(|z| z.re).sum();
        m.mapv_inplace(|z| z / tr);
        // Symmetrize away round-off.
        let mh = m.mapv(|z| z.conj()).reversed_axes();
        let m = (&m + &mh).mapv(|z| z / 2.0);
        DenseState::new_unchecked(dims.to_vec(), m)
    }

    /// Haar-distributed unitary via QR of a Ginibre matrix.
    pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> Array2<C64> {
        use ndarray_linalg::QR;
        let mut g: Array2<C64> = Array2::zeros((d, d));
        for z in g.iter_mut() {
            *z = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        let (q, r) = g.qr().expect("qr of a random matrix");
        let mut u = q;
        for k in 0..d {
            let rkk = r[[k, k]];
            let phase = if rkk.norm() > 0.0 {
                rkk / rkk.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            for i in 0..d {
                u[[i, k]] *= phase;
            }
        }
        u
    }
}

// ---------------------------------------------------------------------------
// Shared JSON file format.
// ---------------------------------------------------------------------------

fn fmt_f64(x: f64) -> String {
    // 17 significant digits: lossless f64 round-trip.
    format!("{:.16e}", x)
}

impl DenseState {
    /// Shared toolkit-wide file format:
    /// `{"kind":"dense","dims":[...],"entries":[[re,im],...]}` row-major.
    pub fn to_json(&self) -> String {
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        let mut entries = String::new();
        let side = self.side();
        for i in 0..side {
            for j in 0..side {
                if !(i == 0 && j == 0) {
                    entries.push(',');
                }
                let z = self.matrix[[i, j]];
                entries.push_str(&format!("[{},{}]", fmt_f64(z.re), fmt_f64(z.im)));
            }
        }
        format!(
            "{{\"kind\":\"dense\",\"dims\":[{}],\"entries\":[{}]}}",
            dims.join(","),
            entries
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        if v.get("kind").and_then(|k| k.as_str()) != Some("dense") {
            return Err(Error::Parse("expected kind \"dense\"".into()));
        }
        let dims: Vec<usize> = v
            .get("dims")
            .and_then(|d| d.as_array())
            .ok_or_else(|| Error::Parse("missing dims".into()))?
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|u| u as usize)
                    .ok_or_else(|| Error::Parse("dims must be integers".into()))
            })
            .collect::<Result<_>>()?;
        let side = dim_product(&dims);
        let entries = v
            .get("entries")
            .and_then(|e| e.as_array())
            .ok_or_else(|| Error::Parse("missing entries".into()))?;
        if entries.len() != side * side {
            return Err(Error::Parse(format!(
                "expected {} entries, got {}",
                side * side,
                entries.len()
            )));
        }
        let mut m = Array2::zeros((side, side));
        for (idx, pair) in entries.iter().enumerate() {
            let p = pair
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Parse("entries must be [re,im] pairs".into()))?;
            let re = p[0]
                .as_f64()
                .ok_or_else(|| Error::Parse("entry is not a number".into()))?;
            let im = p[1]
                .as_f64()
                .ok_or_else(|| Error::Parse("entry is not a number".into()))?;
            m[[idx / side, idx % side]] = C64::new(re, im);
        }
        DenseState::new(dims, m)
    }
}

impl HermitianOperator {
    /// Same layout as the state format with `"kind":"hermitian"`.
    pub fn to_json(&self) -> String {
        self.to_json_with_kind("hermitian")
    }

    pub(crate) fn to_json_with_kind(&self, kind: &str) -> String {
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        let mut entries = String::new();
        let side = self.side();
        for i in 0..side {
            for j in 0..side {
                if !(i == 0 && j == 0) {
                    entries.push(',');
                }
                let z = self.matrix[[i, j]];
                entries.push_str(&format!("[{},{}]", fmt_f64(z.re), fmt_f64(z.im)));
            }
        }
        format!(
            "{{\"kind\":\"{}\",\"dims\":[{}],\"entries\":[{}]}}",
            kind,
            dims.join(","),
            entries
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bell_projector_standard(d: usize) -> DenseState {
        let mut psi = Array1::zeros(d * d);
        for i in 0..d {
            psi[i * d + i] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        DenseState::from_pure(vec![d, d], &psi).unwrap()
    }

    #[test]
    fn partial_trace_of_bell_projector_is_maximally_mixed() {
        let p = bell_projector_standard(3);
        let red = partial_trace(&p, &[0]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert_abs_diff_eq!(red.matrix()[[i, j]].re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(red.matrix()[[i, j]].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_factorizes_product_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = sample::random_density_matrix(&mut rng, &[3]);
        let b = sample::random_density_matrix(&mut rng, &[4]);
        let m = kron(&a.matrix().view(), &b.matrix().view());
        let ab = DenseState::new_unchecked(vec![3, 4], m);
        let ra = partial_trace(&ab, &[0]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((ra.matrix()[[i, j]] - a.matrix()[[i, j]]).norm() < 1e-12);
            }
        }
        let rb = partial_trace(&ab, &[1]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((rb.matrix()[[i, j]] - b.matrix()[[i, j]]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_of_maximally_mixed_keeps_one_subsystem_mixed() {
        let rho = DenseState::maximally_mixed(vec![3, 3]);
        let red = partial_trace(&rho, &[1]).unwrap();
        let vals = red.eigenvalues().unwrap();
        for v in vals {
            assert_abs_diff_eq!(v, 1.0 / 3.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(
            red.matrix().diag().iter().map(|z| z.re).sum::<f64>(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn partial_trace_preserves_trace_and_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let rho = sample::random_density_matrix(&mut rng, &[2, 3, 2]);
            let red = partial_trace(&rho, &[0, 2]).unwrap();
            let tr: f64 = red.matrix().diag().iter().map(|z| z.re).sum();
            assert_abs_diff_eq!(tr, 1.0, epsilon = 1e-10);
            let min = red.eigenvalues().unwrap()[0];
            assert!(min > -1e-12);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_subsystems() {
        let rho = DenseState::maximally_mixed(vec![2, 2]);
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[0, 1]).is_err());
        assert!(partial_trace(&rho, &[5]).is_err());
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = sample::random_density_matrix(&mut rng, &[3, 3]);
        let once = rho.partial_transpose(1).unwrap();
        let twice = once.partial_transpose(1).unwrap();
        for (a, b) in twice.matrix().iter().zip(rho.matrix().iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn partial_transpose_of_qubit_bell_projector_has_min_eigenvalue_minus_half() {
        // Frozen from a direct 4x4 eigensolve of the flip operator / 2.
        let p = bell_projector_standard(2);
        let pt = p.partial_transpose(1).unwrap();
        let vals = pt.eigenvalues().unwrap();
        assert_abs_diff_eq!(vals[0], -0.5, epsilon = 1e-12);
    }

    #[test]
    fn partial_transpose_keeps_product_states_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = sample::random_density_matrix(&mut rng, &[3]);
            let b = sample::random_density_matrix(&mut rng, &[3]);
            let m = kron(&a.matrix().view(), &b.matrix().view());
            let ab = DenseState::new_unchecked(vec![3, 3], m);
            let pt = ab.partial_transpose(1).unwrap();
            assert!(pt.eigenvalues().unwrap()[0] > -1e-12);
        }
    }

    #[test]
    fn realign_trace_norms_match_closed_forms() {
        // Reshaped maximally entangled projector: singular values oracle
        // gives trace norm d.
        let p = bell_projector_standard(3);
        let r = realign(&p).unwrap();
        assert_abs_diff_eq!(trace_norm(&r.view()).unwrap(), 3.0, epsilon = 1e-10);

        // Realigned identity is d |Omega><Omega| / d^2: trace norm 1/d.
        let mm = DenseState::maximally_mixed(vec![3, 3]);
        let r = realign(&mm).unwrap();
        assert_abs_diff_eq!(trace_norm(&r.view()).unwrap(), 1.0 / 3.0, epsilon = 1e-10);

        // Rank-1 reshaping of a pure product state.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let prod = sample::random_product_state(&mut rng, &[3, 3]);
        let r = realign(&prod).unwrap();
        assert_abs_diff_eq!(trace_norm(&r.view()).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn realignment_of_separable_mixtures_stays_at_most_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let sep = sample::random_separable_mixture(&mut rng, &[3, 3], 5);
            let r = realign(&sep).unwrap();
            assert!(trace_norm(&r.view()).unwrap() <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn trace_norm_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        // PSD Hermitian: trace norm equals trace.
        let rho = sample::random_density_matrix(&mut rng, &[4]);
        assert_abs_diff_eq!(trace_norm(&rho.matrix().view()).unwrap(), 1.0, epsilon = 1e-10);

        let diag = ndarray::array![
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]
        ];
        assert_abs_diff_eq!(trace_norm(&diag.view()).unwrap(), 2.0, epsilon = 1e-14);

        // Independent oracle: sqrt of eigenvalues of A^dagger A.
        let mut a: Array2<C64> = Array2::zeros((5, 5));
        for z in a.iter_mut() {
            *z = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        let ah = a.mapv(|z| z.conj()).reversed_axes();
        let gram = ah.dot(&a);
        let oracle: f64 = eigvalsh(&gram)
            .unwrap()
            .iter()
            .map(|&v| v.max(0.0).sqrt())
            .sum();
        assert_abs_diff_eq!(trace_norm(&a.view()).unwrap(), oracle, epsilon = 1e-10);
    }

    #[test]
    fn schmidt_decomposition_examples() {
        // Maximally entangled qutrit state: coefficients 1/sqrt(3).
        let d = 3;
        let mut psi = Array1::zeros(d * d);
        for i in 0..d {
            psi[i * d + i] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        let sd = schmidt_decompose(&psi, (d, d)).unwrap();
        for c in &sd.coefficients {
            assert_abs_diff_eq!(*c, 1.0 / 3.0_f64.sqrt(), epsilon = 1e-12);
        }

        // Product vector: single coefficient 1.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let prod = sample::random_product_vector(&mut rng, &[3, 4]);
        let sd = schmidt_decompose(&prod, (3, 4)).unwrap();
        assert_abs_diff_eq!(sd.coefficients[0], 1.0, epsilon = 1e-10);
        assert_eq!(sd.rank(), 1);

        // a|00> + b|11> is already in Schmidt form.
        let (a, b) = (0.6_f64, 0.8_f64);
        let mut psi = Array1::zeros(4);
        psi[0] = C64::new(a, 0.0);
        psi[3] = C64::new(b, 0.0);
        let sd = schmidt_decompose(&psi, (2, 2)).unwrap();
        assert_abs_diff_eq!(sd.coefficients[0], 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(sd.coefficients[1], 0.6, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_reconstruction_is_accurate() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let psi = sample::random_unit_vector(&mut rng, 12);
            let sd = schmidt_decompose(&psi, (3, 4)).unwrap();
            let mut rec = Array1::<C64>::zeros(12);
            for (k, &c) in sd.coefficients.iter().enumerate() {
                for i in 0..3 {
                    for j in 0..4 {
                        rec[i * 4 + j] += C64::new(c, 0.0) * sd.left[[i, k]] * sd.right[[j, k]];
                    }
                }
            }
            let err: f64 = rec
                .iter()
                .zip(psi.iter())
                .map(|(r, p)| (r - p).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-10, "reconstruction error {err}");
        }
    }

    #[test]
    fn entropy_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let psi = sample::random_unit_vector(&mut rng, 6);
        let pure = DenseState::from_pure(vec![6], &psi).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&pure).unwrap(), 0.0, epsilon = 1e-10);

        let mm = DenseState::maximally_mixed(vec![5]);
        assert_abs_diff_eq!(
            von_neumann_entropy(&mm).unwrap(),
            5.0_f64.log2(),
            epsilon = 1e-10
        );

        // Entropy of entanglement of the maximally entangled state.
        let p = bell_projector_standard(4);
        let red = partial_trace(&p, &[0]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&red).unwrap(), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn entropy_is_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..10 {
            let rho = sample::random_density_matrix(&mut rng, &[5]);
            let u = sample::random_unitary(&mut rng, 5);
            let uh = u.mapv(|z| z.conj()).reversed_axes();
            let rotated = u.dot(rho.matrix()).dot(&uh);
            let rotated = DenseState::new_unchecked(vec![5], rotated);
            assert_abs_diff_eq!(
                von_neumann_entropy(&rho).unwrap(),
                von_neumann_entropy(&rotated).unwrap(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn relative_entropy_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let rho = sample::random_density_matrix(&mut rng, &[2, 2]);
        assert_abs_diff_eq!(relative_entropy(&rho, &rho).unwrap(), 0.0, epsilon = 1e-9);

        // Closed-form oracle: S(P00 || I/d^2) = 2 log2 d.
        let p = bell_projector_standard(3);
        let mm = DenseState::maximally_mixed(vec![3, 3]);
        assert_abs_diff_eq!(
            relative_entropy(&p, &mm).unwrap(),
            2.0 * 3.0_f64.log2(),
            epsilon = 1e-9
        );

        // Orthogonal pure states: support violation.
        let mut e0 = Array1::zeros(4);
        e0[0] = C64::new(1.0, 0.0);
        let mut e1 = Array1::zeros(4);
        e1[1] = C64::new(1.0, 0.0);
        let r0 = DenseState::from_pure(vec![2, 2], &e0).unwrap();
        let r1 = DenseState::from_pure(vec![2, 2], &e1).unwrap();
        assert!(relative_entropy(&r0, &r1).unwrap().is_infinite());
    }

    #[test]
    fn fidelity_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let rho = sample::random_density_matrix(&mut rng, &[3]);
        assert_abs_diff_eq!(state_fidelity(&rho, &rho).unwrap(), 1.0, epsilon = 1e-9);
        let psi = sample::random_unit_vector(&mut rng, 3);
        let pure = DenseState::from_pure(vec![3], &psi).unwrap();
        let direct = pure.matrix().dot(rho.matrix()).diag().iter().map(|z| z.re).sum::<f64>();
        assert_abs_diff_eq!(state_fidelity(&pure, &rho).unwrap(), direct, epsilon = 1e-9);
    }

    #[test]
    fn dense_state_validation_rejects_bad_inputs() {
        let mut m = Array2::<C64>::eye(4);
        m.mapv_inplace(|z| z / 4.0);
        m[[0, 1]] = C64::new(0.3, 0.1);
        assert!(matches!(
            DenseState::new(vec![2, 2], m),
            Err(Error::NotHermitian { .. })
        ));

        let m = Array2::<C64>::eye(4);
        assert!(matches!(
            DenseState::new(vec![2, 2], m),
            Err(Error::TraceNotOne { .. })
        ));

        let mut m = Array2::<C64>::zeros((2, 2));
        m[[0, 0]] = C64::new(1.5, 0.0);
        m[[1, 1]] = C64::new(-0.5, 0.0);
        assert!(matches!(
            DenseState::new(vec![2], m),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let rho = sample::random_density_matrix(&mut rng, &[2, 3]);
        let text = rho.to_json();
        let back = DenseState::from_json(&text).unwrap();
        assert_eq!(back.dims(), rho.dims());
        for (a, b) in back.matrix().iter().zip(rho.matrix().iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn embed_operator_matches_kron_for_adjacent_subsystems() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let u = sample::random_unitary(&mut rng, 2);
        let full = embed_operator(&u.view(), &[1], &[3, 2]);
        let expect = kron(&Array2::eye(3).view(), &u.view());
        for (a, b) in full.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
