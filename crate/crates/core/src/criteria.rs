//! The entanglement-criteria stack and the classifier fusing criterion
//! outcomes into a verdict with evidence.
//!
//! Every criterion fires only when its statistic exceeds the analytic
//! separable bound by more than [`tol::FIRE_SLACK`], so classifier
//! outcomes are stable under round-off. A state is only ever called
//! separable on the strength of an explicit kernel-polytope certificate;
//! no criterion can certify separability of a general dense state.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::bell::{kernel_contains, KernelCertificate, SimplexState};
use crate::error::{Error, Result};
use crate::linalg::{self, realign, trace_norm, DenseState};
use crate::tol;
use crate::witnesses::{GSICSet, SICSet};

pub const PPT_ID: &str = "ppt";
pub const REALIGNMENT_ID: &str = "realignment";
pub const CORRELATION_TENSOR_ID: &str = "correlation-tensor";
pub const ESIC_ID: &str = "esic";
pub const GSIC_ID: &str = "gsic";
pub const QUASI_PURE_ID: &str = "quasi-pure";
pub const REDUCTION_ID: &str = "reduction";

/// Outcome of one criterion evaluation. `fired` means entanglement was
/// detected: the score violates the threshold in the criterion's
/// documented direction.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: String,
    pub fired: bool,
    pub score: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EntanglementClass {
    Separable,
    BoundEntangled,
    NptEntangled,
    PptUndetermined,
}

impl std::fmt::Display for EntanglementClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            EntanglementClass::Separable => "Separable",
            EntanglementClass::BoundEntangled => "BoundEntangled",
            EntanglementClass::NptEntangled => "NPTEntangled",
            EntanglementClass::PptUndetermined => "PPTUndetermined",
        };
        write!(f, "{name}")
    }
}

/// Classification outcome with the evidence chain of evaluated criteria
/// (ordered by criterion id) and, for separable verdicts, the kernel
/// mixing certificate.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub class: EntanglementClass,
    pub evidence: Vec<CriterionOutcome>,
    pub certificate: Option<KernelCertificate>,
}

/// Minimal eigenvalue of the partial transpose; fires (NPT, hence
/// entangled) when it is negative beyond tolerance.
pub fn ppt_check(rho: &DenseState) -> Result<CriterionOutcome> {
    rho.bipartite_dims()?;
    ppt_check_cut(rho, &[1])
}

/// PPT check across a declared cut: the listed subsystems are
/// transposed.
pub fn ppt_check_cut(rho: &DenseState, transpose_parts: &[usize]) -> Result<CriterionOutcome> {
    let pt = rho.partial_transpose_parts(transpose_parts)?;
    let score = pt.eigenvalues()?[0];
    Ok(CriterionOutcome {
        id: PPT_ID.into(),
        fired: score < -1e-10,
        score,
        threshold: -1e-10,
    })
}

/// Trace norm of the realigned matrix; greater than one implies
/// entanglement.
pub fn realignment_check(rho: &DenseState) -> Result<CriterionOutcome> {
    let r = realign(rho)?;
    let score = trace_norm(&r.view())?;
    let threshold = 1.0 + tol::FIRE_SLACK;
    Ok(CriterionOutcome {
        id: REALIGNMENT_ID.into(),
        fired: score > threshold,
        score,
        threshold,
    })
}

/// Orthonormal Hermitian operator basis with G_0 = 1/sqrt(d): the
/// normalized identity followed by the generalized Gell-Mann matrices.
fn gell_mann_basis(d: usize) -> Vec<Array2<C64>> {
    let mut basis = Vec::with_capacity(d * d);
    let mut g0 = Array2::<C64>::eye(d);
    g0.mapv_inplace(|z| z / (d as f64).sqrt());
    basis.push(g0);
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = Array2::<C64>::zeros((d, d));
            sym[[j, k]] = C64::new(inv_sqrt2, 0.0);
            sym[[k, j]] = C64::new(inv_sqrt2, 0.0);
            basis.push(sym);
            let mut asym = Array2::<C64>::zeros((d, d));
            asym[[j, k]] = C64::new(0.0, -inv_sqrt2);
            asym[[k, j]] = C64::new(0.0, inv_sqrt2);
            basis.push(asym);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = Array2::<C64>::zeros((d, d));
        for j in 0..l {
            diag[[j, j]] = C64::new(norm, 0.0);
        }
        diag[[l, l]] = C64::new(-(l as f64) * norm, 0.0);
        basis.push(diag);
    }
    basis
}

/// Bloch-coefficient matrix C_{ab} = Tr((G_a (x) G_b) rho), computed via
/// the realigned matrix so the cost stays cubic in the side length.
fn bloch_matrix(rho: &DenseState) -> Result<Array2<f64>> {
    let (da, db) = rho.bipartite_dims()?;
    let r = realign(rho)?;
    let ga = gell_mann_basis(da);
    let gb = gell_mann_basis(db);
    // C = A^T R B with A[(j,i), a] = G_a[i, j] (and likewise for B):
    // Tr((G_a (x) G_b) rho) = sum_{ij,kl} G_a[i,j] G_b[k,l] R[(j,i),(l,k)].
    let mut a = Array2::<C64>::zeros((da * da, da * da));
    for (col, g) in ga.iter().enumerate() {
        for i in 0..da {
            for j in 0..da {
                a[[j * da + i, col]] = g[[i, j]];
            }
        }
    }
    let mut b = Array2::<C64>::zeros((db * db, db * db));
    for (col, g) in gb.iter().enumerate() {
        for k in 0..db {
            for l in 0..db {
                b[[l * db + k, col]] = g[[k, l]];
            }
        }
    }
    let prod = a.t().dot(&r).dot(&b);
    Ok(prod.mapv(|z| z.re))
}

fn correlation_tensor_excess(c: &Array2<f64>, da: usize, db: usize, x: f64, y: f64) -> Result<f64> {
    let mut scaled = c.mapv(|v| C64::new(v, 0.0));
    for col in 0..scaled.ncols() {
        scaled[[0, col]] *= x;
    }
    for row in 0..scaled.nrows() {
        scaled[[row, 0]] *= y;
    }
    let value = trace_norm(&scaled.view())?;
    let bound = ((da as f64 - 1.0 + x * x) / da as f64).sqrt()
        * ((db as f64 - 1.0 + y * y) / db as f64).sqrt();
    Ok(value - bound)
}

/// Correlation-tensor criterion at one (x, y) point: compares
/// ||D_x C D_y||_tr against the separable bound
/// sqrt((d_A-1+x^2)/d_A) sqrt((d_B-1+y^2)/d_B). The point (1,1)
/// reproduces the realignment criterion, (0,0) the de Vicente criterion,
/// and (sqrt(d_A+1), sqrt(d_B+1)) the ESIC criterion.
pub fn correlation_tensor_check(rho: &DenseState, x: f64, y: f64) -> Result<CriterionOutcome> {
    if x < 0.0 || y < 0.0 {
        return Err(Error::InvalidParameter(
            "correlation-tensor weights must be nonnegative".into(),
        ));
    }
    let (da, db) = rho.bipartite_dims()?;
    let c = bloch_matrix(rho)?;
    let score = correlation_tensor_excess(&c, da, db, x, y)?;
    Ok(CriterionOutcome {
        id: CORRELATION_TENSOR_ID.into(),
        fired: score > tol::FIRE_SLACK,
        score,
        threshold: tol::FIRE_SLACK,
    })
}

/// The default scan grid: the three special points plus a 5x5 grid with
/// a zero row/column and geometric spacing up to sqrt(d+1).
pub fn default_xy_grid(da: usize, db: usize) -> Vec<(f64, f64)> {
    let xmax = ((da + 1) as f64).sqrt();
    let ymax = ((db + 1) as f64).sqrt();
    let axis = |top: f64| -> Vec<f64> {
        let mut v = vec![0.0];
        let lo: f64 = 0.1;
        for k in 0..4 {
            v.push(lo * (top / lo).powf(k as f64 / 3.0));
        }
        v
    };
    let mut pts = vec![(1.0, 1.0), (0.0, 0.0), (xmax, ymax)];
    for &x in &axis(xmax) {
        for &y in &axis(ymax) {
            pts.push((x, y));
        }
    }
    pts
}

/// Existential scan over a grid of (x, y) points; fires if any point
/// fires. The reported score is the largest excess over the bound.
pub fn correlation_tensor_scan(
    rho: &DenseState,
    points: &[(f64, f64)],
) -> Result<CriterionOutcome> {
    let (da, db) = rho.bipartite_dims()?;
    let c = bloch_matrix(rho)?;
    let mut best = f64::NEG_INFINITY;
    for &(x, y) in points {
        if x < 0.0 || y < 0.0 {
            return Err(Error::InvalidParameter(
                "correlation-tensor weights must be nonnegative".into(),
            ));
        }
        best = best.max(correlation_tensor_excess(&c, da, db, x, y)?);
    }
    Ok(CriterionOutcome {
        id: CORRELATION_TENSOR_ID.into(),
        fired: best > tol::FIRE_SLACK,
        score: best,
        threshold: tol::FIRE_SLACK,
    })
}

fn povm_correlation_trace_norm(
    rho: &DenseState,
    elements_a: &[Array2<C64>],
    elements_b: &[Array2<C64>],
) -> Result<f64> {
    let (da, db) = rho.bipartite_dims()?;
    let r = realign(rho)?;
    let na = elements_a.len();
    let nb = elements_b.len();
    let mut a = Array2::<C64>::zeros((da * da, na));
    for (col, e) in elements_a.iter().enumerate() {
        for i in 0..da {
            for j in 0..da {
                a[[j * da + i, col]] = e[[i, j]];
            }
        }
    }
    let mut b = Array2::<C64>::zeros((db * db, nb));
    for (col, e) in elements_b.iter().enumerate() {
        for k in 0..db {
            for l in 0..db {
                b[[l * db + k, col]] = e[[k, l]];
            }
        }
    }
    let p = a.t().dot(&r).dot(&b);
    trace_norm(&p.view())
}

/// ESIC criterion: trace norm of the SIC-POVM correlation matrix
/// P_{ab} = Tr((Pi_a/d_A) (x) (Pi_b/d_B) rho) against the separable
/// bound 2 / sqrt(d_A (d_A+1) d_B (d_B+1)).
pub fn esic_check(rho: &DenseState, sic_a: &SICSet, sic_b: &SICSet) -> Result<CriterionOutcome> {
    let (da, db) = rho.bipartite_dims()?;
    if sic_a.d() != da || sic_b.d() != db {
        return Err(Error::DimensionMismatch(
            "SIC sets do not match the state dimensions".into(),
        ));
    }
    let ea: Vec<Array2<C64>> = (0..da * da).map(|s| sic_a.povm_element(s)).collect();
    let eb: Vec<Array2<C64>> = (0..db * db).map(|s| sic_b.povm_element(s)).collect();
    let score = povm_correlation_trace_norm(rho, &ea, &eb)?;
    let bound = 2.0 / ((da * (da + 1) * db * (db + 1)) as f64).sqrt();
    let threshold = bound + tol::FIRE_SLACK;
    Ok(CriterionOutcome {
        id: ESIC_ID.into(),
        fired: score > threshold,
        score,
        threshold,
    })
}

/// GSIC criterion with the purity-dependent separable bound
/// sqrt((a_A d_A^2 + 1)/(d_A (d_A+1))) sqrt((a_B d_B^2 + 1)/(d_B (d_B+1))).
pub fn gsic_check(rho: &DenseState, gsic_a: &GSICSet, gsic_b: &GSICSet) -> Result<CriterionOutcome> {
    let (da, db) = rho.bipartite_dims()?;
    if gsic_a.d() != da || gsic_b.d() != db {
        return Err(Error::DimensionMismatch(
            "GSIC sets do not match the state dimensions".into(),
        ));
    }
    let score = povm_correlation_trace_norm(rho, gsic_a.elements(), gsic_b.elements())?;
    let (aa, ab) = (gsic_a.purity(), gsic_b.purity());
    let bound = ((aa * (da * da) as f64 + 1.0) / (da * (da + 1)) as f64).sqrt()
        * ((ab * (db * db) as f64 + 1.0) / (db * (db + 1)) as f64).sqrt();
    let threshold = bound + tol::FIRE_SLACK;
    Ok(CriterionOutcome {
        id: GSIC_ID.into(),
        fired: score > threshold,
        score,
        threshold,
    })
}

/// Quasi-pure concurrence approximation for a general d x d bipartite
/// state: builds |chi> from the antisymmetric-subspace image of the
/// dominant eigenvector pair, forms the matrix
/// T_ij = sqrt(lambda_i lambda_j) (<psi_i| (x) <psi_j|) |chi>, and scores
/// max(0, S_0 - sum_{i>0} S_i) over the singular values of T. Positive
/// score certifies entanglement (the statistic lower-bounds the
/// concurrence for any choice of dominant eigenvector, so degenerate
/// spectra remain sound).
pub fn quasi_pure_concurrence(rho: &DenseState) -> Result<CriterionOutcome> {
    let (da, db) = rho.bipartite_dims()?;
    if da != db {
        return Err(Error::DimensionMismatch(
            "quasi-pure concurrence needs equal local dimensions".into(),
        ));
    }
    let d = da;
    let (vals, vecs) = linalg::eigh(rho.matrix())?;
    // Descending order; keep the support.
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| vals[i] > 1e-12)
        .collect();
    let psi: Vec<Array1<C64>> = kept.iter().map(|&i| vecs.column(i).to_owned()).collect();
    let lambda: Vec<f64> = kept.iter().map(|&i| vals[i]).collect();

    let score = quasi_pure_score(&psi, &lambda, d)?;
    Ok(CriterionOutcome {
        id: QUASI_PURE_ID.into(),
        fired: score > tol::FIRE_SLACK,
        score,
        threshold: tol::FIRE_SLACK,
    })
}

fn quasi_pure_score(psi: &[Array1<C64>], lambda: &[f64], d: usize) -> Result<f64> {
    let r = psi.len();
    if r == 0 {
        return Ok(0.0);
    }
    let psi0 = &psi[0];
    // chi(a,b,a',b') ~ psi0(a,b) psi0(a',b') - psi0(a',b) psi0(a,b'),
    // the (normalized) antisymmetric-subspace image of psi0 (x) psi0.
    let idx = |a: usize, b: usize| a * d + b;
    let mut chi = vec![C64::new(0.0, 0.0); d * d * d * d];
    let mut norm_sq = 0.0;
    for a in 0..d {
        for b in 0..d {
            for a2 in 0..d {
                for b2 in 0..d {
                    let v = psi0[idx(a, b)] * psi0[idx(a2, b2)]
                        - psi0[idx(a2, b)] * psi0[idx(a, b2)];
                    norm_sq += v.norm_sqr();
                    chi[((a * d + b) * d + a2) * d + b2] = v;
                }
            }
        }
    }
    if norm_sq < 1e-24 {
        // Dominant eigenvector is (numerically) a product state.
        return Ok(0.0);
    }
    let norm = norm_sq.sqrt();
    let mut t = Array2::<C64>::zeros((r, r));
    for i in 0..r {
        for j in 0..r {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..d {
                for b in 0..d {
                    let ci = psi[i][idx(a, b)].conj();
                    if ci == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for a2 in 0..d {
                        for b2 in 0..d {
                            acc += ci
                                * psi[j][idx(a2, b2)].conj()
                                * chi[((a * d + b) * d + a2) * d + b2];
                        }
                    }
                }
            }
            t[[i, j]] = acc * (lambda[i] * lambda[j]).sqrt() / norm;
        }
    }
    let s = linalg::singular_values(&t)?;
    let s0 = s[0];
    let rest: f64 = s.iter().skip(1).sum();
    Ok((s0 - rest).max(0.0))
}

/// Closed-form quasi-pure singular values for standard Bell-diagonal
/// states:
/// S_{k,l} = sqrt( d/(2(d-1)) * c_{k,l} [ (1-2/d) c_{n,m} delta_{(k,l),(n,m)}
///           + c_{2n-k, 2m-l} / d^2 ] )
/// with (n, m) the largest-weight index (ties broken lexicographically)
/// and indices read mod d.
pub fn quasi_pure_simplex(state: &SimplexState) -> Result<CriterionOutcome> {
    if !state.basis().is_standard() {
        return Err(Error::Unsupported(
            "the closed form applies to the standard Bell basis".into(),
        ));
    }
    let d = state.d();
    let c = state.coeffs();
    // Largest weight, lexicographic tie-break beyond 1e-12.
    let (mut n, mut m) = (0usize, 0usize);
    for k in 0..d {
        for l in 0..d {
            if c[[k, l]] > c[[n, m]] + 1e-12 {
                n = k;
                m = l;
            }
        }
    }
    let df = d as f64;
    let prefactor = df / (2.0 * (df - 1.0));
    let mut s = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in 0..d {
            let mirror_k = (2 * n + d - (k % d)) % d;
            let mirror_l = (2 * m + d - (l % d)) % d;
            let delta = if k == n && l == m { 1.0 } else { 0.0 };
            let inner = (1.0 - 2.0 / df) * c[[n, m]] * delta
                + c[[mirror_k, mirror_l]] / (df * df);
            s.push((prefactor * c[[k, l]] * inner.max(0.0)).sqrt());
        }
    }
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let score = (s[0] - s[1..].iter().sum::<f64>()).max(0.0);
    Ok(CriterionOutcome {
        id: QUASI_PURE_ID.into(),
        fired: score > tol::FIRE_SLACK,
        score,
        threshold: tol::FIRE_SLACK,
    })
}

/// Reduction criterion: minimal eigenvalue of 1_A (x) rho_B - rho; any
/// state it detects is also NPT, so it never adds bound-entanglement
/// detections on its own.
pub fn reduction_check(rho: &DenseState) -> Result<CriterionOutcome> {
    let (da, db) = rho.bipartite_dims()?;
    let rho_b = linalg::partial_trace(rho, &[1])?;
    let mut m = rho.matrix().mapv(|z| -z);
    for a in 0..da {
        for i in 0..db {
            for j in 0..db {
                m[[a * db + i, a * db + j]] += rho_b.matrix()[[i, j]];
            }
        }
    }
    let score = linalg::eigvalsh(&m)?[0];
    Ok(CriterionOutcome {
        id: REDUCTION_ID.into(),
        fired: score < -1e-10,
        score,
        threshold: -1e-10,
    })
}

/// Which detection criteria the classifier evaluates on PPT states.
#[derive(Debug, Clone)]
pub struct CriteriaChain {
    pub realignment: bool,
    pub quasi_pure: bool,
    pub reduction: bool,
    pub correlation_scan: bool,
    /// Evaluate the ESIC criterion with the bundled SICs (d = 2, 3 only).
    pub esic: bool,
}

impl Default for CriteriaChain {
    fn default() -> Self {
        Self {
            realignment: true,
            quasi_pure: true,
            reduction: true,
            correlation_scan: false,
            esic: false,
        }
    }
}

impl CriteriaChain {
    /// Lean chain used by the Monte Carlo surveys.
    pub fn survey_default() -> Self {
        Self {
            realignment: true,
            quasi_pure: true,
            reduction: false,
            correlation_scan: false,
            esic: false,
        }
    }
}

/// Classify a state. NPT wins immediately; otherwise any fired detection
/// criterion certifies bound entanglement; otherwise a kernel-polytope
/// certificate (available only when the Bell-diagonal form is supplied)
/// certifies separability; everything else stays undetermined.
pub fn classify(rho: &DenseState, simplex: Option<&SimplexState>) -> Result<Verdict> {
    classify_with(rho, simplex, &CriteriaChain::default())
}

pub fn classify_with(
    rho: &DenseState,
    simplex: Option<&SimplexState>,
    chain: &CriteriaChain,
) -> Result<Verdict> {
    let mut evidence = Vec::new();
    let ppt = ppt_check(rho)?;
    let npt = ppt.fired;
    evidence.push(ppt);
    if npt {
        return Ok(Verdict {
            class: EntanglementClass::NptEntangled,
            evidence,
            certificate: None,
        });
    }

    let mut detected = false;
    if chain.realignment {
        let out = realignment_check(rho)?;
        detected |= out.fired;
        evidence.push(out);
    }
    if chain.quasi_pure {
        let out = match simplex {
            Some(s) if s.basis().is_standard() => quasi_pure_simplex(s)?,
            _ => quasi_pure_concurrence(rho)?,
        };
        detected |= out.fired;
        evidence.push(out);
    }
    if chain.correlation_scan {
        let (da, db) = rho.bipartite_dims()?;
        let out = correlation_tensor_scan(rho, &default_xy_grid(da, db))?;
        detected |= out.fired;
        evidence.push(out);
    }
    if chain.esic {
        let (da, db) = rho.bipartite_dims()?;
        let sa = SICSet::bundled(da)?;
        let sb = SICSet::bundled(db)?;
        let out = esic_check(rho, &sa, &sb)?;
        detected |= out.fired;
        evidence.push(out);
    }
    if chain.reduction {
        evidence.push(reduction_check(rho)?);
    }
    evidence.sort_by(|a, b| a.id.cmp(&b.id));

    if detected {
        return Ok(Verdict {
            class: EntanglementClass::BoundEntangled,
            evidence,
            certificate: None,
        });
    }
    if let Some(s) = simplex {
        if s.basis().is_standard() {
            if let Some(cert) = kernel_contains(s)? {
                return Ok(Verdict {
                    class: EntanglementClass::Separable,
                    evidence,
                    certificate: Some(cert),
                });
            }
        }
    }
    Ok(Verdict {
        class: EntanglementClass::PptUndetermined,
        evidence,
        certificate: None,
    })
}

impl Verdict {
    pub fn to_json(&self) -> String {
        let mut ev = String::new();
        for (i, e) in self.evidence.iter().enumerate() {
            if i > 0 {
                ev.push(',');
            }
            ev.push_str(&format!(
                "{{\"id\":\"{}\",\"fired\":{},\"score\":{:.16e},\"threshold\":{:.16e}}}",
                e.id, e.fired, e.score, e.threshold
            ));
        }
        let cert = match &self.certificate {
            None => "null".to_string(),
            Some(c) => {
                let terms: Vec<String> = c
                    .weights
                    .iter()
                    .map(|(coset, w)| {
                        let pts: Vec<String> = coset
                            .iter()
                            .map(|(k, l)| format!("[{k},{l}]"))
                            .collect();
                        format!("{{\"coset\":[{}],\"weight\":{:.16e}}}", pts.join(","), w)
                    })
                    .collect();
                format!("[{}]", terms.join(","))
            }
        };
        format!(
            "{{\"class\":\"{}\",\"evidence\":[{}],\"certificate\":{}}}",
            self.class, ev, cert
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{enumerate_subgroups, max_entangled_projector};
    use crate::linalg::sample;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ppt_examples() {
        let mm = DenseState::maximally_mixed(vec![3, 3]);
        assert!(!ppt_check(&mm).unwrap().fired);

        let p = max_entangled_projector(3);
        let out = ppt_check(&p).unwrap();
        assert!(out.fired);
        assert_abs_diff_eq!(out.score, -1.0 / 3.0, epsilon = 1e-12);

        let rb = crate::zoo::rho_bound();
        assert!(!ppt_check(&rb).unwrap().fired);
    }

    #[test]
    fn realignment_examples() {
        let mm = DenseState::maximally_mixed(vec![3, 3]);
        let out = realignment_check(&mm).unwrap();
        assert!(!out.fired);
        assert_abs_diff_eq!(out.score, 1.0 / 3.0, epsilon = 1e-10);

        let p = max_entangled_projector(3);
        let out = realignment_check(&p).unwrap();
        assert!(out.fired);
        assert_abs_diff_eq!(out.score, 3.0, epsilon = 1e-10);

        let rb = crate::zoo::rho_bound();
        assert!(realignment_check(&rb).unwrap().fired);
    }

    #[test]
    fn correlation_tensor_at_one_one_matches_realignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..100 {
            let rho = sample::random_density_matrix(&mut rng, &[3, 3]);
            let ct = correlation_tensor_check(&rho, 1.0, 1.0).unwrap();
            let re = realignment_check(&rho).unwrap();
            assert_eq!(ct.fired, re.fired);
            // Scores agree up to the bound offset.
            assert_abs_diff_eq!(ct.score, re.score - 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn correlation_tensor_at_zero_zero_is_de_vicente() {
        // Independent oracle: build the traceless correlation block
        // directly and compare against the de Vicente bound.
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..25 {
            let rho = sample::random_density_matrix(&mut rng, &[2, 3]);
            let out = correlation_tensor_check(&rho, 0.0, 0.0).unwrap();
            let ga = gell_mann_basis(2);
            let gb = gell_mann_basis(3);
            let mut t = Array2::<C64>::zeros((3, 8));
            for i in 1..4 {
                for j in 1..9 {
                    let mut acc = C64::new(0.0, 0.0);
                    let big = crate::linalg::kron(&ga[i].view(), &gb[j].view());
                    for a in 0..6 {
                        for b in 0..6 {
                            acc += big[[a, b]] * rho.matrix()[[b, a]];
                        }
                    }
                    t[[i - 1, j - 1]] = acc;
                }
            }
            let oracle = trace_norm(&t.view()).unwrap()
                - ((2.0 - 1.0) / 2.0_f64).sqrt() * ((3.0 - 1.0) / 3.0_f64).sqrt();
            assert_abs_diff_eq!(out.score, oracle, epsilon = 1e-9);
        }
    }

    #[test]
    fn esic_examples() {
        let sic2 = SICSet::bundled(2).unwrap();
        let p = max_entangled_projector(2);
        assert!(esic_check(&p, &sic2, &sic2).unwrap().fired);

        let mm = DenseState::maximally_mixed(vec![2, 2]);
        assert!(!esic_check(&mm, &sic2, &sic2).unwrap().fired);

        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..50 {
            let prod = sample::random_product_state(&mut rng, &[2, 2]);
            assert!(!esic_check(&prod, &sic2, &sic2).unwrap().fired);
        }
    }

    #[test]
    fn gsic_reduces_to_esic_at_full_purity() {
        let sic = SICSet::bundled(2).unwrap();
        let gsic = GSICSet::depolarized(&sic, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..40 {
            let rho = sample::random_density_matrix(&mut rng, &[2, 2]);
            let e = esic_check(&rho, &sic, &sic).unwrap();
            let g = gsic_check(&rho, &gsic, &gsic).unwrap();
            assert_eq!(e.fired, g.fired);
            assert_abs_diff_eq!(e.score, g.score, epsilon = 1e-10);
        }

        // A strictly depolarized GSIC still flags the Bell state and
        // stays quiet on the maximally mixed state.
        let gsic = GSICSet::depolarized(&sic, 0.8).unwrap();
        let p = max_entangled_projector(2);
        assert!(gsic_check(&p, &gsic, &gsic).unwrap().fired);
        let mm = DenseState::maximally_mixed(vec![2, 2]);
        assert!(!gsic_check(&mm, &gsic, &gsic).unwrap().fired);
    }

    #[test]
    fn quasi_pure_agrees_with_simplex_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for _ in 0..100 {
            let s = crate::survey::sample_simplex(3, &mut rng);
            let dense = s.to_dense();
            let general = quasi_pure_concurrence(&dense).unwrap();
            let closed = quasi_pure_simplex(&s).unwrap();
            assert_abs_diff_eq!(general.score, closed.score, epsilon = 1e-8);
        }
    }

    #[test]
    fn quasi_pure_examples() {
        // Kernel (line) states score zero.
        let d = 3;
        for subgroup in enumerate_subgroups(d) {
            let mut c = Array2::zeros((d, d));
            for &(k, l) in &subgroup {
                c[[k, l]] = 1.0 / d as f64;
            }
            let s = SimplexState::standard(d, c).unwrap();
            assert_abs_diff_eq!(quasi_pure_simplex(&s).unwrap().score, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(
                quasi_pure_concurrence(&s.to_dense()).unwrap().score,
                0.0,
                epsilon = 1e-9
            );
        }

        // Maximally mixed scores zero.
        let mm = DenseState::maximally_mixed(vec![3, 3]);
        assert_abs_diff_eq!(quasi_pure_concurrence(&mm).unwrap().score, 0.0, epsilon = 1e-10);

        // A pure Bell state only populates S_{0,0}.
        let mut c = Array2::zeros((3, 3));
        c[[0, 0]] = 1.0;
        let s = SimplexState::standard(3, c).unwrap();
        let out = quasi_pure_simplex(&s).unwrap();
        assert!(out.fired);
        // S_00 = sqrt((d-1)/(2d)) for the pure Bell state.
        assert_abs_diff_eq!(out.score, (2.0 / 6.0_f64).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn reduction_examples_and_hierarchy() {
        let p = max_entangled_projector(3);
        assert!(reduction_check(&p).unwrap().fired);

        let mm = DenseState::maximally_mixed(vec![3, 3]);
        assert!(!reduction_check(&mm).unwrap().fired);

        // Reduction fired implies PPT fired (the criterion is weaker).
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for _ in 0..200 {
            let rho = sample::random_density_matrix(&mut rng, &[3, 3]);
            if reduction_check(&rho).unwrap().fired {
                assert!(ppt_check(&rho).unwrap().fired);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let p = max_entangled_projector(3);
        let v = classify(&p, None).unwrap();
        assert_eq!(v.class, EntanglementClass::NptEntangled);

        let rb = crate::zoo::rho_bound();
        let v = classify(&rb, None).unwrap();
        assert_eq!(v.class, EntanglementClass::BoundEntangled);
        assert!(v
            .evidence
            .iter()
            .any(|e| e.id == REALIGNMENT_ID && e.fired));

        // Subgroup states come back separable with a certificate.
        let d = 3;
        let subgroup = &enumerate_subgroups(d)[0];
        let mut c = Array2::zeros((d, d));
        for &(k, l) in subgroup {
            c[[k, l]] = 1.0 / d as f64;
        }
        let s = SimplexState::standard(d, c).unwrap();
        let v = classify(&s.to_dense(), Some(&s)).unwrap();
        assert_eq!(v.class, EntanglementClass::Separable);
        assert!(v.certificate.is_some());

        // Without the simplex form no separability certificate exists.
        let mm = DenseState::maximally_mixed(vec![3, 3]);
        let v = classify(&mm, None).unwrap();
        assert_eq!(v.class, EntanglementClass::PptUndetermined);
    }

    #[test]
    fn evidence_is_sorted_by_criterion_id() {
        let rb = crate::zoo::rho_bound();
        let v = classify(&rb, None).unwrap();
        let ids: Vec<&str> = v.evidence.iter().map(|e| e.id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn classify_is_invariant_under_phase_space_symmetries() {
        use crate::bell::{apply_symmetry, PhaseSpaceSymmetry};
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        let generators = [
            PhaseSpaceSymmetry::Translation { p: 1, q: 2 },
            PhaseSpaceSymmetry::MomentumInversion,
            PhaseSpaceSymmetry::QuarterRotation,
            PhaseSpaceSymmetry::Shear,
        ];
        for _ in 0..100 {
            let s = crate::survey::sample_simplex(3, &mut rng);
            let base = classify(&s.to_dense(), Some(&s)).unwrap().class;
            for g in generators {
                let mapped = apply_symmetry(g, &s).unwrap();
                let got = classify(&mapped.to_dense(), Some(&mapped)).unwrap().class;
                assert_eq!(base, got, "class changed under {g:?}");
            }
        }
    }

    #[test]
    fn no_criterion_fires_on_separable_mixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        let sic = SICSet::bundled(3).unwrap();
        for _ in 0..300 {
            let sep = sample::random_separable_mixture(&mut rng, &[3, 3], 4);
            assert!(!realignment_check(&sep).unwrap().fired);
            assert!(!quasi_pure_concurrence(&sep).unwrap().fired);
            assert!(!esic_check(&sep, &sic, &sic).unwrap().fired);
            let scan =
                correlation_tensor_scan(&sep, &default_xy_grid(3, 3)).unwrap();
            assert!(!scan.fired);
        }
    }

    #[test]
    fn isotropic_threshold_matches_mub_witness_transition() {
        use crate::witnesses::{build_mub_set, mub_witness};
        let d = 3;
        let p_star = crate::zoo::isotropic_ppt_threshold(d).unwrap();
        assert_abs_diff_eq!(p_star, 0.25, epsilon = 1e-9);
        let mubs = build_mub_set(d, d + 1).unwrap();
        let w = mub_witness(&mubs, 0, true).unwrap();
        // The witness fires exactly on the NPT side of the threshold.
        for (p, expect_detect) in [
            (p_star - 1e-3, false),
            (p_star + 1e-3, true),
            (0.9, true),
            (0.0, false),
        ] {
            let rho = crate::zoo::isotropic(d, p).unwrap();
            let val = w.expectation(&rho).unwrap();
            assert_eq!(val < 0.0, expect_detect, "p = {p}, value = {val}");
        }
    }
}
