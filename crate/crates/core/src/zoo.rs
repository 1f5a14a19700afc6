//! Catalog of named states and constructive families: isotropic states,
//! the cataloged Bell-violating bound state, the activation-protocol
//! states, the experiment slice families, UPB-based bound entangled
//! states, and the conversion-assist state.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::bell::{max_entangled_projector, BellBasis, SimplexState};
use crate::error::{Error, Result};
use crate::linalg::{kron, DenseState, HermitianOperator};
use crate::radicals::Radical;
use crate::witnesses;

/// Isotropic family p P_00 + (1-p) 1/d^2; p must stay in the PSD range
/// [-1/(d^2-1), 1].
pub fn isotropic(d: usize, p: f64) -> Result<DenseState> {
    if d < 2 {
        return Err(Error::InvalidParameter("need d >= 2".into()));
    }
    let lo = -1.0 / ((d * d - 1) as f64);
    if !(lo..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "p = {p} outside the PSD range [{lo}, 1]"
        )));
    }
    let side = d * d;
    let bell = max_entangled_projector(d);
    let mut m = bell.matrix().mapv(|z| z * p);
    for i in 0..side {
        m[[i, i]] += C64::new((1.0 - p) / side as f64, 0.0);
    }
    Ok(DenseState::new_unchecked(vec![d, d], m))
}

/// The p where the isotropic family switches from PPT to NPT, bracketed
/// by bisection on the minimal eigenvalue of the partial transpose.
pub fn isotropic_ppt_threshold(d: usize) -> Result<f64> {
    let min_eig = |p: f64| -> Result<f64> {
        let rho = isotropic(d, p)?;
        Ok(rho.partial_transpose(1)?.eigenvalues()?[0])
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    if min_eig(hi)? >= 0.0 {
        return Err(Error::ValidationFailed("family never turns NPT".into()));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if min_eig(mid)? < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The cataloged qutrit-qutrit bound entangled state violating a Bell
/// inequality; exact rational/radical entries realized at load.
pub fn rho_bound() -> DenseState {
    let q = Radical::rational;
    let r = |n: i64, d: i64| Radical::new(n, d, 131, 2);
    let table: Vec<(usize, usize, Radical)> = vec![
        (0, 0, q(9789, 27536)),
        (0, 4, q(3239, 27536)),
        (0, 5, r(5, 13768)),
        (0, 6, r(45, 6884)),
        (1, 1, q(3311, 27536)),
        (1, 2, r(5, 13768)),
        (1, 3, q(3239, 27536)),
        (1, 7, r(-45, 6884)),
        (1, 8, q(-9, 6884)),
        (2, 2, q(1, 13768)),
        (2, 3, r(5, 13768)),
        (2, 7, q(-9, 6884)),
        (3, 3, q(3311, 27536)),
        (3, 7, r(-45, 6884)),
        (3, 8, q(9, 6884)),
        (4, 4, q(9789, 27536)),
        (4, 5, r(-5, 13768)),
        (4, 6, r(-45, 6884)),
        (5, 5, q(1, 13768)),
        (5, 6, q(9, 6884)),
        (6, 6, q(81, 3442)),
        (7, 7, q(81, 3442)),
        (8, 8, q(9, 6884)),
    ];
    let mut m = Array2::<C64>::zeros((9, 9));
    for (i, j, rad) in table {
        let v = C64::new(rad.value(), 0.0);
        m[[i, j]] = v;
        m[[j, i]] = v;
    }
    DenseState::new(vec![3, 3], m).expect("cataloged state is a valid density matrix")
}

/// Free entangled activation input: F0 P_00 + (1-F0)/3 sum_i P_{i,1}.
pub fn activation_fe(f0: f64) -> Result<SimplexState> {
    activation_fe_line(f0, 1)
}

/// Variant with the line at shift 2 used to activate the 1 <= alpha < 2
/// region.
pub fn activation_fe_tilde(f0: f64) -> Result<SimplexState> {
    activation_fe_line(f0, 2)
}

fn activation_fe_line(f0: f64, shift: usize) -> Result<SimplexState> {
    if !(0.0..=1.0).contains(&f0) || f0 == 0.0 || f0 == 1.0 {
        return Err(Error::InvalidParameter(format!(
            "singlet fraction must satisfy 0 < F0 < 1, got {f0}"
        )));
    }
    let mut c = Array2::zeros((3, 3));
    c[[0, 0]] = f0;
    for i in 0..3 {
        c[[i, shift]] += (1.0 - f0) / 3.0;
    }
    SimplexState::standard(3, c)
}

/// Activation resource state (2/7) P_00 + (alpha/21) sum_i P_{i,1}
/// + ((5-alpha)/21) sum_i P_{i,2}.
pub fn activation_be(alpha: f64) -> Result<SimplexState> {
    if !(0.0..=5.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in [0, 5], got {alpha}"
        )));
    }
    let mut c = Array2::zeros((3, 3));
    c[[0, 0]] = 2.0 / 7.0;
    for i in 0..3 {
        c[[i, 1]] = alpha / 21.0;
        c[[i, 2]] = (5.0 - alpha) / 21.0;
    }
    SimplexState::standard(3, c)
}

/// Slice family rho_A = ((1-a-b)/9) 1 + a P_00 + b P_10.
pub fn experiment_family_a(alpha: f64, beta: f64) -> Result<SimplexState> {
    let base = (1.0 - alpha - beta) / 9.0;
    let mut c = Array2::from_elem((3, 3), base);
    c[[0, 0]] += alpha;
    c[[1, 0]] += beta;
    SimplexState::standard(3, c)
}

/// Slice family rho_B = ((1 - a/5 - b/4 - g)/9) 1 + (a/5) P_00
/// + (b/8)(P_10 + P_20) + (g/3)(P_01 + P_11 + P_21).
pub fn experiment_family_b(alpha: f64, beta: f64, gamma: f64) -> Result<SimplexState> {
    let base = (1.0 - alpha / 5.0 - beta / 4.0 - gamma) / 9.0;
    let mut c = Array2::from_elem((3, 3), base);
    c[[0, 0]] += alpha / 5.0;
    c[[1, 0]] += beta / 8.0;
    c[[2, 0]] += beta / 8.0;
    for i in 0..3 {
        c[[i, 1]] += gamma / 3.0;
    }
    SimplexState::standard(3, c)
}

/// B1 slice (gamma = -1/sqrt 3); defaults to the experimentally measured
/// point alpha = -0.07, beta = -1.73.
pub fn experiment_b1(alpha: f64, beta: f64) -> Result<SimplexState> {
    experiment_family_b(alpha, beta, -1.0 / 3.0_f64.sqrt())
}

pub const EXPERIMENT_B1_ALPHA: f64 = -0.07;
pub const EXPERIMENT_B1_BETA: f64 = -1.73;

/// B2 slice (gamma = -0.83).
pub fn experiment_b2(alpha: f64, beta: f64) -> Result<SimplexState> {
    experiment_family_b(alpha, beta, -0.83)
}

/// An unextendible product basis: m mutually orthogonal product vectors
/// whose complement contains no product vector.
#[derive(Debug, Clone)]
pub struct UPB {
    dims: Vec<usize>,
    /// vectors[j][party] is the normalized local column of member j.
    vectors: Vec<Vec<Array1<C64>>>,
}

impl UPB {
    pub fn new(dims: Vec<usize>, vectors: Vec<Vec<Array1<C64>>>) -> Result<Self> {
        if dims.len() < 2 || dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidParameter(
                "a UPB needs at least two parties of dimension >= 2".into(),
            ));
        }
        if dims.len() == 2 && dims.contains(&2) {
            // No UPBs exist in 2 x n.
            return Err(Error::Unsupported(
                "no unextendible product bases exist in 2 x n systems".into(),
            ));
        }
        let total: usize = dims.iter().product();
        let m = vectors.len();
        let m_min = 1 + dims.iter().map(|&d| d - 1).sum::<usize>();
        if m < m_min {
            return Err(Error::ValidationFailed(format!(
                "UPB needs at least {m_min} members, got {m}"
            )));
        }
        if m > total - 4 {
            return Err(Error::ValidationFailed(format!(
                "UPB cannot have more than {} members, got {m}",
                total - 4
            )));
        }
        for (j, member) in vectors.iter().enumerate() {
            if member.len() != dims.len() {
                return Err(Error::DimensionMismatch(format!(
                    "member {j} does not list one column per party"
                )));
            }
            for (p, col) in member.iter().enumerate() {
                if col.len() != dims[p] {
                    return Err(Error::DimensionMismatch(format!(
                        "member {j}, party {p}: wrong local dimension"
                    )));
                }
                let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-10 {
                    return Err(Error::NotNormalized { norm });
                }
            }
        }
        let upb = Self { dims, vectors };
        for i in 0..m {
            for j in (i + 1)..m {
                let ip: C64 = upb
                    .product_vector(i)
                    .iter()
                    .zip(upb.product_vector(j).iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                if ip.norm() > 1e-10 {
                    return Err(Error::ValidationFailed(format!(
                        "members {i} and {j} are not orthogonal (|<i|j>| = {})",
                        ip.norm()
                    )));
                }
            }
        }
        Ok(upb)
    }

    /// The bundled qutrit-qutrit five-member UPB (tiles construction),
    /// re-validated on every load.
    pub fn bundled_tiles() -> Result<Self> {
        Self::from_json(include_str!("../data/upb_3x3_tiles.json"))
    }

    /// Data format: `{"kind":"upb","dims":[..],"vectors":[[[ [re,im],..],..],..]}`
    /// listing per-party complex columns for each member.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if v.get("kind").and_then(|k| k.as_str()) != Some("upb") {
            return Err(Error::Parse("expected kind \"upb\"".into()));
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
        let members = v
            .get("vectors")
            .and_then(|m| m.as_array())
            .ok_or_else(|| Error::Parse("missing vectors".into()))?;
        let mut vectors = Vec::with_capacity(members.len());
        for member in members {
            let parties = member
                .as_array()
                .ok_or_else(|| Error::Parse("member must be a list of columns".into()))?;
            let mut cols = Vec::with_capacity(parties.len());
            for col in parties {
                let entries = col
                    .as_array()
                    .ok_or_else(|| Error::Parse("column must be a list of [re,im]".into()))?;
                let mut c = Array1::zeros(entries.len());
                for (i, pair) in entries.iter().enumerate() {
                    let p = pair
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| Error::Parse("entries are [re,im] pairs".into()))?;
                    c[i] = C64::new(
                        p[0].as_f64().ok_or_else(|| Error::Parse("bad entry".into()))?,
                        p[1].as_f64().ok_or_else(|| Error::Parse("bad entry".into()))?,
                    );
                }
                cols.push(c);
            }
            vectors.push(cols);
        }
        Self::new(dims, vectors)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn member_count(&self) -> usize {
        self.vectors.len()
    }

    /// Full tensor-product vector of member j.
    pub fn product_vector(&self, j: usize) -> Array1<C64> {
        let mut psi = Array1::from_elem(1, C64::new(1.0, 0.0));
        for col in &self.vectors[j] {
            let mut next = Array1::zeros(psi.len() * col.len());
            for (i, a) in psi.iter().enumerate() {
                for (k, b) in col.iter().enumerate() {
                    next[i * col.len() + k] = a * b;
                }
            }
            psi = next;
        }
        psi
    }
}

/// rho_UPB = (1_D - sum_j |phi_j><phi_j|) / (D - m): the normalized
/// projector onto the complementary subspace. PPT is re-verified on
/// every construction.
pub fn upb_state(upb: &UPB) -> Result<DenseState> {
    let total: usize = upb.dims().iter().product();
    let m = upb.member_count();
    let mut mat = Array2::<C64>::eye(total);
    for j in 0..m {
        let psi = upb.product_vector(j);
        for a in 0..total {
            for b in 0..total {
                mat[[a, b]] -= psi[a] * psi[b].conj();
            }
        }
    }
    mat.mapv_inplace(|z| z / (total - m) as f64);
    let state = DenseState::new(upb.dims().to_vec(), mat)?;
    for part in 0..upb.dims().len() {
        let min = state.partial_transpose(part)?.eigenvalues()?[0];
        if min < -1e-10 {
            return Err(Error::ValidationFailed(format!(
                "UPB state unexpectedly NPT on part {part} (min eig {min})"
            )));
        }
    }
    Ok(state)
}

/// See-saw maximization of <ab|Pi|ab> over product vectors. Values near
/// one certify a near-member product vector; values bounded away from
/// one across many restarts are heuristic (not conclusive) evidence that
/// the subspace contains no product vector.
pub fn product_vector_search(
    projector: &HermitianOperator,
    restarts: usize,
    seed: u64,
) -> Result<f64> {
    // Idempotence gate.
    let m = projector.matrix();
    let sq = m.dot(m);
    let dev = sq
        .iter()
        .zip(m.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0_f64, f64::max);
    if dev > 1e-8 {
        return Err(Error::ValidationFailed(format!(
            "operator is not a projector (||P^2 - P|| = {dev:.3e})"
        )));
    }
    witnesses::product_overlap_maximum(projector, restarts, seed)
}

/// Projector onto the range (eigenvalue > 1e-10 eigenspace) of a state.
pub fn range_projector(state: &DenseState) -> Result<HermitianOperator> {
    let (vals, vecs) = crate::linalg::eigh(state.matrix())?;
    let n = vals.len();
    let mut p = Array2::<C64>::zeros((n, n));
    for k in 0..n {
        if vals[k] > 1e-10 {
            for i in 0..n {
                for j in 0..n {
                    p[[i, j]] += vecs[[i, k]] * vecs[[j, k]].conj();
                }
            }
        }
    }
    HermitianOperator::new(state.dims().to_vec(), p)
}

/// The conversion-assist state sigma_{m->d} on four subsystems
/// (A1, B1, A2, B2) with dims [d, d, m, m]; PPT across A1 A2 | B1 B2.
pub fn conversion_assist(m: usize, d: usize) -> Result<DenseState> {
    if m < 2 || m > d {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= m <= d, got m = {m}, d = {d}"
        )));
    }
    let pd = max_entangled_projector(d);
    let pm = max_entangled_projector(m);
    let id_d2 = Array2::<C64>::eye(d * d);
    let id_m2 = Array2::<C64>::eye(m * m);
    let comp_d = &id_d2 - pd.matrix();
    let comp_m = &id_m2 - pm.matrix();

    let top = kron(&pd.matrix().view(), &pm.matrix().view());
    let rest = kron(&comp_d.view(), &comp_m.view());
    let mut mat = top.mapv(|z| z * (m as f64 - 1.0))
        + rest.mapv(|z| z / (d as f64 + 1.0));
    let tr: f64 = mat.diag().iter().map(|z| z.re).sum();
    mat.mapv_inplace(|z| z / tr);

    // Dims in kron order (A1, B1, A2, B2).
    let state = DenseState::new(vec![d, d, m, m], mat)?;
    let pt = state.partial_transpose_parts(&[1, 3])?;
    let min = pt.eigenvalues()?[0];
    if min < -1e-10 {
        return Err(Error::ValidationFailed(format!(
            "conversion-assist state is not PPT across A1A2|B1B2 (min eig {min})"
        )));
    }
    Ok(state)
}

/// A catalog entry output: either a dense matrix or a Bell-diagonal
/// coefficient form.
#[derive(Debug, Clone)]
pub enum CatalogState {
    Dense(DenseState),
    Simplex(SimplexState),
}

impl CatalogState {
    pub fn to_dense(&self) -> DenseState {
        match self {
            CatalogState::Dense(s) => s.clone(),
            CatalogState::Simplex(s) => s.to_dense(),
        }
    }

    pub fn simplex(&self) -> Option<&SimplexState> {
        match self {
            CatalogState::Simplex(s) => Some(s),
            CatalogState::Dense(_) => None,
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            CatalogState::Dense(s) => s.to_json(),
            CatalogState::Simplex(s) => s.to_json(),
        }
    }
}

pub fn catalog_names() -> &'static [&'static str] {
    &[
        "rho_bound",
        "isotropic",
        "max_entangled",
        "maximally_mixed",
        "activation_fe",
        "activation_fe_tilde",
        "activation_be",
        "experiment_A",
        "experiment_B",
        "experiment_B1",
        "experiment_B2",
        "upb_tiles",
        "conversion_assist",
    ]
}

fn param(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    params.get(key).copied().ok_or_else(|| {
        Error::InvalidParameter(format!("missing required parameter \"{key}\""))
    })
}

fn param_or(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

fn usize_param(params: &BTreeMap<String, f64>, key: &str) -> Result<usize> {
    let v = param(params, key)?;
    if v < 0.0 || v.fract() != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "parameter \"{key}\" must be a nonnegative integer, got {v}"
        )));
    }
    Ok(v as usize)
}

/// Build a cataloged state by name; `--param k=v` values arrive as a map.
pub fn catalog_get(name: &str, params: &BTreeMap<String, f64>) -> Result<CatalogState> {
    match name {
        "rho_bound" => Ok(CatalogState::Dense(rho_bound())),
        "isotropic" => {
            let d = usize_param(params, "d")?;
            let p = param(params, "p")?;
            Ok(CatalogState::Dense(isotropic(d, p)?))
        }
        "max_entangled" => {
            let d = usize_param(params, "d")?;
            if d < 2 {
                return Err(Error::InvalidParameter("need d >= 2".into()));
            }
            Ok(CatalogState::Dense(max_entangled_projector(d)))
        }
        "maximally_mixed" => {
            let d = usize_param(params, "d")?;
            if d < 2 {
                return Err(Error::InvalidParameter("need d >= 2".into()));
            }
            let mut c = Array2::from_elem((d, d), 1.0 / (d * d) as f64);
            c[[0, 0]] = 1.0 - c.iter().skip(1).sum::<f64>();
            Ok(CatalogState::Simplex(SimplexState::new(
                BellBasis::standard(d),
                c,
            )?))
        }
        "activation_fe" => Ok(CatalogState::Simplex(activation_fe(param(params, "f0")?)?)),
        "activation_fe_tilde" => Ok(CatalogState::Simplex(activation_fe_tilde(param(
            params, "f0",
        )?)?)),
        "activation_be" => Ok(CatalogState::Simplex(activation_be(param(
            params, "alpha",
        )?)?)),
        "experiment_A" => Ok(CatalogState::Simplex(experiment_family_a(
            param(params, "alpha")?,
            param(params, "beta")?,
        )?)),
        "experiment_B" => Ok(CatalogState::Simplex(experiment_family_b(
            param(params, "alpha")?,
            param(params, "beta")?,
            param(params, "gamma")?,
        )?)),
        "experiment_B1" => Ok(CatalogState::Simplex(experiment_b1(
            param_or(params, "alpha", EXPERIMENT_B1_ALPHA),
            param_or(params, "beta", EXPERIMENT_B1_BETA),
        )?)),
        "experiment_B2" => Ok(CatalogState::Simplex(experiment_b2(
            param(params, "alpha")?,
            param(params, "beta")?,
        )?)),
        "upb_tiles" => {
            let upb = UPB::bundled_tiles()?;
            Ok(CatalogState::Dense(upb_state(&upb)?))
        }
        "conversion_assist" => {
            let m = usize_param(params, "m")?;
            let d = usize_param(params, "d")?;
            Ok(CatalogState::Dense(conversion_assist(m, d)?))
        }
        _ => Err(Error::InvalidParameter(format!(
            "unknown catalog state \"{name}\"; known: {}",
            catalog_names().join(", ")
        ))),
    }
}
