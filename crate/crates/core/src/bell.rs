//! Weyl-Heisenberg operators, standard and generalized Bell bases,
//! Bell-diagonal (Magic Simplex) states, polytope membership, and the
//! phase-space symmetries that permute the Bell basis.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::DenseState;
use crate::simplexlp;
use crate::tol;

/// A point (k, l) of the discrete phase space Z_d x Z_d: k is the phase
/// index, l the shift index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeylIndex {
    pub k: usize,
    pub l: usize,
    pub d: usize,
}

impl WeylIndex {
    /// Indices are reduced mod d; negative values wrap into [0, d).
    pub fn new(k: i64, l: i64, d: usize) -> Self {
        let m = d as i64;
        Self {
            k: (k.rem_euclid(m)) as usize,
            l: (l.rem_euclid(m)) as usize,
            d,
        }
    }
}

fn omega_pow(d: usize, e: i64) -> C64 {
    let m = d as i64;
    C64::from_polar(
        1.0,
        2.0 * std::f64::consts::PI * (e.rem_euclid(m)) as f64 / d as f64,
    )
}

/// W_{k,l} = sum_j omega^{jk} |j><j+l|.
pub fn weyl_operator(idx: WeylIndex) -> Array2<C64> {
    let d = idx.d;
    let mut w = Array2::zeros((d, d));
    for j in 0..d {
        w[[j, (j + idx.l) % d]] = omega_pow(d, (j * idx.k) as i64);
    }
    w
}

/// A Bell basis defined by unit-modulus phases alpha_{s,t}; the all-ones
/// phase table gives the standard (Weyl-Heisenberg) Bell basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BellBasis {
    d: usize,
    phases: Array2<C64>,
    standard: bool,
}

impl BellBasis {
    pub fn standard(d: usize) -> Self {
        Self {
            d,
            phases: Array2::from_elem((d, d), C64::new(1.0, 0.0)),
            standard: true,
        }
    }

    /// User-supplied phases; validates unit modulus and the induced
    /// projector orthonormality and completeness.
    pub fn generalized(d: usize, phases: Array2<C64>) -> Result<Self> {
        if phases.dim() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "phase table must be {d}x{d}"
            )));
        }
        for z in phases.iter() {
            if (z.norm() - 1.0).abs() > tol::PHASE_UNIT {
                return Err(Error::ValidationFailed(format!(
                    "phase modulus {} deviates from 1",
                    z.norm()
                )));
            }
        }
        let standard = phases
            .iter()
            .all(|z| (z - C64::new(1.0, 0.0)).norm() <= tol::PHASE_UNIT);
        let basis = Self {
            d,
            phases,
            standard,
        };
        basis.validate_orthonormal()?;
        Ok(basis)
    }

    /// Phases drawn uniformly on the unit circle from a declared seed.
    pub fn random_generalized(d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut phases = Array2::zeros((d, d));
        for z in phases.iter_mut() {
            let angle: f64 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
            *z = C64::from_polar(1.0, angle);
        }
        Self::generalized(d, phases).expect("unit-modulus phases define a Bell basis")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }

    pub fn phases(&self) -> &Array2<C64> {
        &self.phases
    }

    /// |Phi^alpha_{k,l}> = (V^alpha_{k,l} (x) 1) |Omega_00>
    ///                   = (1/sqrt d) sum_j omega^{jk} alpha_{j+l,l} |j>|j+l>.
    pub fn vector(&self, idx: WeylIndex) -> Array1<C64> {
        let d = self.d;
        let norm = 1.0 / (d as f64).sqrt();
        let mut psi = Array1::zeros(d * d);
        for j in 0..d {
            let col = (j + idx.l) % d;
            psi[j * d + col] =
                omega_pow(d, (j * idx.k) as i64) * self.phases[[col, idx.l]] * norm;
        }
        psi
    }

    /// Rank-1 Bell projector P^alpha_{k,l}.
    pub fn projector(&self, idx: WeylIndex) -> DenseState {
        let psi = self.vector(idx);
        DenseState::from_pure(vec![self.d, self.d], &psi)
            .expect("Bell vectors are normalized")
    }

    fn validate_orthonormal(&self) -> Result<()> {
        let d = self.d;
        let vectors: Vec<Array1<C64>> = (0..d)
            .flat_map(|k| (0..d).map(move |l| (k, l)))
            .map(|(k, l)| self.vector(WeylIndex::new(k as i64, l as i64, d)))
            .collect();
        for (i, vi) in vectors.iter().enumerate() {
            for (j, vj) in vectors.iter().enumerate() {
                let ip: C64 = vi.iter().zip(vj.iter()).map(|(a, b)| a.conj() * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (ip.norm() - expect).abs() > tol::HERMITICITY {
                    return Err(Error::ValidationFailed(
                        "generalized Bell vectors are not orthonormal".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A Bell-diagonal state: a probability vector c_{k,l} over a declared
/// Bell basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexState {
    basis: BellBasis,
    coeffs: Array2<f64>,
}

impl SimplexState {
    pub fn new(basis: BellBasis, coeffs: Array2<f64>) -> Result<Self> {
        let d = basis.d();
        if coeffs.dim() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "coefficient table must be {d}x{d}"
            )));
        }
        for &c in coeffs.iter() {
            if c < -1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "negative mixing probability {c}"
                )));
            }
        }
        let sum: f64 = coeffs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "mixing probabilities sum to {sum}"
            )));
        }
        let coeffs = coeffs.mapv(|c| c.max(0.0));
        Ok(Self { basis, coeffs })
    }

    pub fn standard(d: usize, coeffs: Array2<f64>) -> Result<Self> {
        Self::new(BellBasis::standard(d), coeffs)
    }

    pub fn d(&self) -> usize {
        self.basis.d()
    }

    pub fn basis(&self) -> &BellBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &Array2<f64> {
        &self.coeffs
    }

    /// The dense form sum_{k,l} c_{k,l} P^alpha_{k,l}.
    pub fn to_dense(&self) -> DenseState {
        let d = self.d();
        let side = d * d;
        let mut m = Array2::zeros((side, side));
        for k in 0..d {
            for l in 0..d {
                let c = self.coeffs[[k, l]];
                if c == 0.0 {
                    continue;
                }
                let psi = self.basis.vector(WeylIndex::new(k as i64, l as i64, d));
                for i in 0..side {
                    if psi[i] == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for j in 0..side {
                        m[[i, j]] += C64::new(c, 0.0) * psi[i] * psi[j].conj();
                    }
                }
            }
        }
        DenseState::new_unchecked(vec![d, d], m)
    }

    /// File format:
    /// `{"kind":"simplex","d":3,"basis":"standard"|{"alpha":[[..]]},"coeffs":[...]}`
    /// with coeffs row-major in (k, l).
    pub fn to_json(&self) -> String {
        let d = self.d();
        let basis = if self.basis.is_standard() {
            "\"standard\"".to_string()
        } else {
            let mut rows = Vec::with_capacity(d);
            for s in 0..d {
                let row: Vec<String> = (0..d)
                    .map(|t| {
                        let z = self.basis.phases()[[s, t]];
                        format!("[{:.16e},{:.16e}]", z.re, z.im)
                    })
                    .collect();
                rows.push(format!("[{}]", row.join(",")));
            }
            format!("{{\"alpha\":[{}]}}", rows.join(","))
        };
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| format!("{:.16e}", c)).collect();
        format!(
            "{{\"kind\":\"simplex\",\"d\":{},\"basis\":{},\"coeffs\":[{}]}}",
            d,
            basis,
            coeffs.join(",")
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        if v.get("kind").and_then(|k| k.as_str()) != Some("simplex") {
            return Err(Error::Parse("expected kind \"simplex\"".into()));
        }
        let d = v
            .get("d")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Parse("missing dimension d".into()))? as usize;
        let basis = match v.get("basis") {
            Some(Value::String(s)) if s == "standard" => BellBasis::standard(d),
            Some(Value::Object(o)) => {
                let alpha = o
                    .get("alpha")
                    .and_then(|a| a.as_array())
                    .ok_or_else(|| Error::Parse("generalized basis needs alpha".into()))?;
                if alpha.len() != d {
                    return Err(Error::Parse("alpha must have d rows".into()));
                }
                let mut phases = Array2::zeros((d, d));
                for (s, row) in alpha.iter().enumerate() {
                    let row = row
                        .as_array()
                        .filter(|r| r.len() == d)
                        .ok_or_else(|| Error::Parse("alpha rows must have d entries".into()))?;
                    for (t, pair) in row.iter().enumerate() {
                        let p = pair
                            .as_array()
                            .filter(|p| p.len() == 2)
                            .ok_or_else(|| Error::Parse("alpha entries are [re,im]".into()))?;
                        let re = p[0].as_f64().ok_or_else(|| Error::Parse("bad phase".into()))?;
                        let im = p[1].as_f64().ok_or_else(|| Error::Parse("bad phase".into()))?;
                        phases[[s, t]] = C64::new(re, im);
                    }
                }
                BellBasis::generalized(d, phases)?
            }
            _ => return Err(Error::Parse("missing or malformed basis".into())),
        };
        let coeffs = v
            .get("coeffs")
            .and_then(|c| c.as_array())
            .ok_or_else(|| Error::Parse("missing coeffs".into()))?;
        if coeffs.len() != d * d {
            return Err(Error::Parse(format!(
                "expected {} coefficients, got {}",
                d * d,
                coeffs.len()
            )));
        }
        let mut table = Array2::zeros((d, d));
        for (i, c) in coeffs.iter().enumerate() {
            table[[i / d, i % d]] = c
                .as_f64()
                .ok_or_else(|| Error::Parse("coefficient is not a number".into()))?;
        }
        Self::new(basis, table)
    }
}

/// All subgroups of Z_d x Z_d with exactly d elements, deduplicated and
/// returned as sorted element lists. Every subgroup of Z_d^2 is generated
/// by at most two elements, so enumerating generator pairs is exhaustive.
pub fn enumerate_subgroups(d: usize) -> Vec<Vec<(usize, usize)>> {
    let mut seen = std::collections::BTreeSet::new();
    let points: Vec<(usize, usize)> = (0..d)
        .flat_map(|k| (0..d).map(move |l| (k, l)))
        .collect();
    for &g1 in &points {
        for &g2 in &points {
            let mut elems = std::collections::BTreeSet::new();
            elems.insert((0usize, 0usize));
            // Close under addition of the two generators.
            loop {
                let mut added = false;
                let current: Vec<(usize, usize)> = elems.iter().cloned().collect();
                for &(a, b) in &current {
                    for &(ga, gb) in &[g1, g2] {
                        let cand = ((a + ga) % d, (b + gb) % d);
                        if elems.insert(cand) {
                            added = true;
                        }
                    }
                }
                if !added {
                    break;
                }
            }
            if elems.len() == d {
                seen.insert(elems.into_iter().collect::<Vec<_>>());
            }
        }
    }
    seen.into_iter().collect()
}

/// Coefficient vectors of all line states: uniform mixtures 1/d over the
/// cosets of every d-element subgroup. These are the vertices of the
/// kernel polytope.
pub fn kernel_vertices(d: usize) -> Vec<Array2<f64>> {
    let mut seen = std::collections::BTreeSet::new();
    for subgroup in enumerate_subgroups(d) {
        for p in 0..d {
            for q in 0..d {
                let coset: std::collections::BTreeSet<(usize, usize)> = subgroup
                    .iter()
                    .map(|&(a, b)| ((a + p) % d, (b + q) % d))
                    .collect();
                seen.insert(coset.into_iter().collect::<Vec<_>>());
            }
        }
    }
    seen.into_iter()
        .map(|coset| {
            let mut c = Array2::zeros((d, d));
            for (a, b) in coset {
                c[[a, b]] = 1.0 / d as f64;
            }
            c
        })
        .collect()
}

/// True iff every coefficient lies in [0, 1/d] (tolerance 1e-12). The
/// enclosure polytope contains every PPT simplex state, so a state
/// outside it is necessarily NPT.
pub fn enclosure_contains(state: &SimplexState) -> bool {
    let bound = 1.0 / state.d() as f64 + 1e-12;
    state.coeffs().iter().all(|&c| (-1e-12..=bound).contains(&c))
}

/// A membership certificate: mixing weights over the kernel-polytope
/// vertex set reproducing the coefficients within 1e-9.
#[derive(Debug, Clone)]
pub struct KernelCertificate {
    /// (coset elements, weight) pairs with nonzero weight.
    pub weights: Vec<(Vec<(usize, usize)>, f64)>,
}

/// Kernel-polytope membership for standard-basis states; `Ok(Some(..))`
/// returns the feasibility certificate. Kernel states are separable, so
/// membership certifies separability.
pub fn kernel_contains(state: &SimplexState) -> Result<Option<KernelCertificate>> {
    if !state.basis().is_standard() {
        return Err(Error::Unsupported(
            "kernel polytope requires the standard Bell basis".into(),
        ));
    }
    let d = state.d();
    let verts = kernel_vertices(d);
    let rows = d * d + 1;
    let cols = verts.len();
    let mut v = vec![0.0_f64; rows * cols];
    for (j, vert) in verts.iter().enumerate() {
        for k in 0..d {
            for l in 0..d {
                v[(k * d + l) * cols + j] = vert[[k, l]];
            }
        }
        v[(rows - 1) * cols + j] = 1.0;
    }
    let mut c = vec![0.0_f64; rows];
    for k in 0..d {
        for l in 0..d {
            c[k * d + l] = state.coeffs()[[k, l]];
        }
    }
    c[rows - 1] = 1.0;
    match simplexlp::feasible_nonnegative(&v, rows, cols, &c, tol::KERNEL_RESIDUAL) {
        Some(q) => {
            let weights = verts
                .iter()
                .zip(q.iter())
                .filter(|(_, &w)| w > 1e-12)
                .map(|(vert, &w)| {
                    let coset: Vec<(usize, usize)> = (0..d)
                        .flat_map(|k| (0..d).map(move |l| (k, l)))
                        .filter(|&(k, l)| vert[[k, l]] > 0.0)
                        .collect();
                    (coset, w)
                })
                .collect();
            Ok(Some(KernelCertificate { weights }))
        }
        None => Ok(None),
    }
}

/// Generators of the symmetry group of the Magic Simplex, acting as
/// permutations of the Bell-basis indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSpaceSymmetry {
    /// t_{p,q}: (k,l) -> (k+p, l+q)
    Translation { p: i64, q: i64 },
    /// m: (k,l) -> (-k, l)
    MomentumInversion,
    /// r: (k,l) -> (l, -k)
    QuarterRotation,
    /// v: (k,l) -> (k+l, l)
    Shear,
}

impl PhaseSpaceSymmetry {
    pub fn map(&self, k: usize, l: usize, d: usize) -> (usize, usize) {
        let (k, l, m) = (k as i64, l as i64, d as i64);
        let (nk, nl) = match self {
            PhaseSpaceSymmetry::Translation { p, q } => (k + p, l + q),
            PhaseSpaceSymmetry::MomentumInversion => (-k, l),
            PhaseSpaceSymmetry::QuarterRotation => (l, -k),
            PhaseSpaceSymmetry::Shear => (k + l, l),
        };
        ((nk.rem_euclid(m)) as usize, (nl.rem_euclid(m)) as usize)
    }
}

/// Permute the coefficients of a standard-basis simplex state by a
/// symmetry generator. These transformations conserve the entanglement
/// class.
pub fn apply_symmetry(sym: PhaseSpaceSymmetry, state: &SimplexState) -> Result<SimplexState> {
    if !state.basis().is_standard() {
        return Err(Error::Unsupported(
            "phase-space symmetries act on the standard basis".into(),
        ));
    }
    let d = state.d();
    let mut out = Array2::zeros((d, d));
    for k in 0..d {
        for l in 0..d {
            let (nk, nl) = sym.map(k, l, d);
            out[[nk, nl]] = state.coeffs()[[k, l]];
        }
    }
    SimplexState::standard(d, out)
}

/// The maximally entangled reference projector P_{0,0} in dimension d.
pub fn max_entangled_projector(d: usize) -> DenseState {
    BellBasis::standard(d).projector(WeylIndex::new(0, 0, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace, C64};
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn weyl_identity_and_qubit_shift() {
        let w = weyl_operator(WeylIndex::new(0, 0, 4));
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(w[[i, j]].re, expect, epsilon = 1e-15);
            }
        }
        // d=2 shift operator: evaluated directly from the defining sum.
        let x = weyl_operator(WeylIndex::new(0, 1, 2));
        assert_abs_diff_eq!(x[[0, 1]].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[[1, 0]].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[[0, 0]].norm(), 0.0, epsilon = 1e-15);
    }

    fn omega(d: usize) -> C64 {
        C64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64)
    }

    #[test]
    fn weyl_relations_hold_to_1e12() {
        for d in 2..=7 {
            let om = omega(d);
            for k1 in 0..d {
                for l1 in 0..d {
                    for k2 in 0..d {
                        for l2 in 0..d {
                            let lhs = weyl_operator(WeylIndex::new(k1 as i64, l1 as i64, d))
                                .dot(&weyl_operator(WeylIndex::new(k2 as i64, l2 as i64, d)));
                            let phase = om.powu((l1 * k2) as u32);
                            let rhs = weyl_operator(WeylIndex::new(
                                (k1 + k2) as i64,
                                (l1 + l2) as i64,
                                d,
                            ))
                            .mapv(|z| z * phase);
                            for (a, b) in lhs.iter().zip(rhs.iter()) {
                                assert!((a - b).norm() < 1e-12);
                            }
                        }
                    }
                }
            }
            // Adjoint relation W+_{k,l} = omega^{kl} W_{-k,-l}.
            for k in 0..d {
                for l in 0..d {
                    let w = weyl_operator(WeylIndex::new(k as i64, l as i64, d));
                    let adj = w.mapv(|z| z.conj()).reversed_axes();
                    let rhs = weyl_operator(WeylIndex::new(-(k as i64), -(l as i64), d))
                        .mapv(|z| z * om.powu((k * l) as u32));
                    for (a, b) in adj.iter().zip(rhs.iter()) {
                        assert!((a - b).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn weyl_product_for_qutrits() {
        // W_{1,0} W_{0,1} = W_{1,1} with unit phase.
        let lhs = weyl_operator(WeylIndex::new(1, 0, 3)).dot(&weyl_operator(WeylIndex::new(0, 1, 3)));
        let rhs = weyl_operator(WeylIndex::new(1, 1, 3));
        for (a, b) in lhs.iter().zip(rhs.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn bell_projectors_are_locally_maximally_mixed() {
        for d in 2..=5 {
            let basis = BellBasis::standard(d);
            for k in 0..d {
                for l in 0..d {
                    let p = basis.projector(WeylIndex::new(k as i64, l as i64, d));
                    for keep in [[0usize], [1usize]] {
                        let red = partial_trace(&p, &keep).unwrap();
                        for i in 0..d {
                            for j in 0..d {
                                let expect = if i == j { 1.0 / d as f64 } else { 0.0 };
                                assert!(
                                    (red.matrix()[[i, j]] - C64::new(expect, 0.0)).norm() < 1e-10
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bell_vectors_form_an_orthonormal_complete_basis() {
        for d in 2..=4 {
            for basis in [BellBasis::standard(d), BellBasis::random_generalized(d, 99)] {
                let side = d * d;
                let mut sum = Array2::<C64>::zeros((side, side));
                let mut vectors = Vec::new();
                for k in 0..d {
                    for l in 0..d {
                        let v = basis.vector(WeylIndex::new(k as i64, l as i64, d));
                        for i in 0..side {
                            for j in 0..side {
                                sum[[i, j]] += v[i] * v[j].conj();
                            }
                        }
                        vectors.push(v);
                    }
                }
                // Gram-matrix oracle over all pairs.
                for (i, vi) in vectors.iter().enumerate() {
                    for (j, vj) in vectors.iter().enumerate() {
                        let ip: C64 =
                            vi.iter().zip(vj.iter()).map(|(a, b)| a.conj() * b).sum();
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert!((ip.norm() - expect).abs() < 1e-10);
                    }
                }
                for i in 0..side {
                    for j in 0..side {
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert!((sum[[i, j]] - C64::new(expect, 0.0)).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn qubit_standard_projector_is_phi_plus() {
        let p = max_entangled_projector(2);
        let m = p.matrix();
        for (i, j, expect) in [
            (0, 0, 0.5),
            (0, 3, 0.5),
            (3, 0, 0.5),
            (3, 3, 0.5),
            (1, 1, 0.0),
            (2, 2, 0.0),
        ] {
            assert_abs_diff_eq!(m[[i, j]].re, expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn to_dense_examples() {
        // Uniform coefficients give the maximally mixed state.
        let d = 3;
        let uniform = SimplexState::standard(d, Array2::from_elem((d, d), 1.0 / 9.0)).unwrap();
        let dense = uniform.to_dense();
        for i in 0..9 {
            for j in 0..9 {
                let expect = if i == j { 1.0 / 9.0 } else { 0.0 };
                assert!((dense.matrix()[[i, j]] - C64::new(expect, 0.0)).norm() < 1e-10);
            }
        }

        // A delta at (0,0) gives the Bell projector.
        let mut c = Array2::zeros((d, d));
        c[[0, 0]] = 1.0;
        let s = SimplexState::standard(d, c).unwrap();
        let dense = s.to_dense();
        let p = max_entangled_projector(d);
        for (a, b) in dense.matrix().iter().zip(p.matrix().iter()) {
            assert!((a - b).norm() < 1e-12);
        }

        // Subgroup states are PPT.
        for subgroup in enumerate_subgroups(d) {
            let mut c = Array2::zeros((d, d));
            for &(k, l) in &subgroup {
                c[[k, l]] = 1.0 / d as f64;
            }
            let s = SimplexState::standard(d, c).unwrap();
            let dense = s.to_dense();
            let min = dense
                .partial_transpose(1)
                .unwrap()
                .eigenvalues()
                .unwrap()[0];
            assert!(min > -1e-10, "subgroup state must be PPT, min eig {min}");
        }
    }

    #[test]
    fn simplex_state_rejects_invalid_coefficients() {
        let mut c = Array2::from_elem((3, 3), 1.0 / 9.0);
        c[[0, 0]] = -0.1;
        c[[1, 1]] = 1.0 / 9.0 + 0.1;
        assert!(SimplexState::standard(3, c).is_err());

        let c = Array2::from_elem((3, 3), 0.2);
        assert!(SimplexState::standard(3, c).is_err());
    }

    #[test]
    fn subgroup_enumeration_counts() {
        // Brute-force enumeration oracle for small d.
        assert_eq!(enumerate_subgroups(2).len(), 3);
        assert_eq!(enumerate_subgroups(3).len(), 4);
        // d=4: six cyclic subgroups plus the Klein subgroup {0,2}^2.
        assert_eq!(enumerate_subgroups(4).len(), 7);
        for d in 2..=5 {
            for s in enumerate_subgroups(d) {
                assert!(s.contains(&(0, 0)));
                for &(a, b) in &s {
                    for &(c, e) in &s {
                        assert!(s.contains(&(((a + c) % d), ((b + e) % d))));
                    }
                }
            }
        }
    }

    #[test]
    fn enclosure_examples() {
        let d = 3;
        let uniform = SimplexState::standard(d, Array2::from_elem((d, d), 1.0 / 9.0)).unwrap();
        assert!(enclosure_contains(&uniform));
        let mut c = Array2::zeros((d, d));
        c[[0, 0]] = 1.0;
        let bell = SimplexState::standard(d, c).unwrap();
        assert!(!enclosure_contains(&bell));
    }

    #[test]
    fn kernel_membership_examples() {
        let d = 3;
        // Each line state certifies itself with unit weight.
        let verts = kernel_vertices(d);
        assert_eq!(verts.len(), 12);
        for vert in &verts {
            let s = SimplexState::standard(d, vert.clone()).unwrap();
            let cert = kernel_contains(&s).unwrap().expect("vertex is in the hull");
            let total: f64 = cert.weights.iter().map(|(_, w)| w).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
            assert_eq!(cert.weights.len(), 1);
            assert_abs_diff_eq!(cert.weights[0].1, 1.0, epsilon = 1e-9);
        }

        // Maximally mixed state: uniform mix over all line states.
        let uniform = SimplexState::standard(d, Array2::from_elem((d, d), 1.0 / 9.0)).unwrap();
        assert!(kernel_contains(&uniform).unwrap().is_some());

        // The Bell projector is outside (LP infeasibility oracle).
        let mut c = Array2::zeros((d, d));
        c[[0, 0]] = 1.0;
        let bell = SimplexState::standard(d, c).unwrap();
        assert!(kernel_contains(&bell).unwrap().is_none());
    }

    #[test]
    fn kernel_requires_standard_basis() {
        let basis = BellBasis::random_generalized(3, 5);
        let s = SimplexState::new(basis, Array2::from_elem((3, 3), 1.0 / 9.0)).unwrap();
        assert!(kernel_contains(&s).is_err());
        assert!(apply_symmetry(PhaseSpaceSymmetry::Shear, &s).is_err());
    }

    #[test]
    fn kernel_membership_certificate_reproduces_coefficients() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let d = 3;
        let verts = kernel_vertices(d);
        for _ in 0..20 {
            // Random convex combination of vertices must be certified.
            let mut weights: Vec<f64> =
                (0..verts.len()).map(|_| -rng.random::<f64>().ln()).collect();
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            let mut c = Array2::zeros((d, d));
            for (vert, &w) in verts.iter().zip(weights.iter()) {
                c = c + vert.mapv(|x| x * w);
            }
            let s = SimplexState::standard(d, c.clone()).unwrap();
            let cert = kernel_contains(&s).unwrap().expect("mixture is in hull");
            let mut rec = Array2::<f64>::zeros((d, d));
            for (coset, w) in &cert.weights {
                for &(k, l) in coset {
                    rec[[k, l]] += w / d as f64;
                }
            }
            for (a, b) in rec.iter().zip(c.iter()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn symmetry_examples() {
        let d = 3;
        let mut c = Array2::zeros((d, d));
        c[[0, 0]] = 1.0;
        let s = SimplexState::standard(d, c).unwrap();

        // Translation moves the delta.
        let t = apply_symmetry(PhaseSpaceSymmetry::Translation { p: 1, q: 2 }, &s).unwrap();
        assert_abs_diff_eq!(t.coeffs()[[1, 2]], 1.0, epsilon = 1e-15);

        // Quarter rotation has order four.
        let mut cur = s.clone();
        for _ in 0..4 {
            cur = apply_symmetry(PhaseSpaceSymmetry::QuarterRotation, &cur).unwrap();
        }
        for (a, b) in cur.coeffs().iter().zip(s.coeffs().iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }

        // Sum and nonnegativity preserved exactly.
        let arr = array![[0.1, 0.2, 0.0], [0.3, 0.0, 0.1], [0.1, 0.1, 0.1]];
        let s = SimplexState::standard(3, arr).unwrap();
        for sym in [
            PhaseSpaceSymmetry::Translation { p: 2, q: 1 },
            PhaseSpaceSymmetry::MomentumInversion,
            PhaseSpaceSymmetry::QuarterRotation,
            PhaseSpaceSymmetry::Shear,
        ] {
            let mapped = apply_symmetry(sym, &s).unwrap();
            assert_abs_diff_eq!(
                mapped.coeffs().iter().sum::<f64>(),
                1.0,
                epsilon = 1e-15
            );
            assert!(mapped.coeffs().iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn simplex_json_round_trip() {
        let basis = BellBasis::random_generalized(3, 12);
        let mut c = Array2::from_elem((3, 3), 0.1);
        c[[0, 0]] = 0.2;
        let s = SimplexState::new(basis, c).unwrap();
        let text = s.to_json();
        let back = SimplexState::from_json(&text).unwrap();
        assert_eq!(back.d(), 3);
        for (a, b) in back.coeffs().iter().zip(s.coeffs().iter()) {
            assert_eq!(a, b);
        }
        for (a, b) in back.basis().phases().iter().zip(s.basis().phases().iter()) {
            assert_eq!(a, b);
        }
    }
}
