//! Entanglement witnesses: MUB and SIC machinery, witness operators and
//! their partial transposes, separability windows estimated by see-saw
//! optimization over product states, mirrored witnesses, nonlinear
//! functionals, and the cataloged Bell-violation witness.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bell::{weyl_operator, WeylIndex};
use crate::error::{Error, Result};
use crate::linalg::{self, kron, DenseState, HermitianOperator};
use crate::radicals::Radical;
use crate::seesaw::{self, SeeSawParams};
use crate::tol;
use crate::zoo;

/// Fixed seed for the product-state validation gate, so witness
/// construction is deterministic.
const GATE_SEED: u64 = 0x5717_6a7e;

/// m orthonormal bases of C^d that are pairwise mutually unbiased;
/// basis 0 is the computational basis. Columns are basis vectors.
#[derive(Debug, Clone)]
pub struct MUBSet {
    d: usize,
    bases: Vec<Array2<C64>>,
}

impl MUBSet {
    /// Weyl-eigenbasis family for prime d: the computational basis plus
    /// the Gauss-sum bases (for d = 2 the X and Y eigenbases).
    pub fn weyl_family(d: usize, m: usize) -> Result<Self> {
        if !is_prime(d) {
            return Err(Error::Unsupported(format!(
                "automatic MUB construction requires prime d (got {d}); \
                 supply validated bases instead"
            )));
        }
        if m < 2 || m > d + 1 {
            return Err(Error::InvalidParameter(format!(
                "need 2 <= m <= d+1 MUBs, got m={m} for d={d}"
            )));
        }
        let mut bases = vec![Array2::eye(d)];
        if d == 2 {
            let h = 1.0 / 2.0_f64.sqrt();
            bases.push(ndarray::array![
                [C64::new(h, 0.0), C64::new(h, 0.0)],
                [C64::new(h, 0.0), C64::new(-h, 0.0)]
            ]);
            bases.push(ndarray::array![
                [C64::new(h, 0.0), C64::new(h, 0.0)],
                [C64::new(0.0, h), C64::new(0.0, -h)]
            ]);
        } else {
            // Columns (1/sqrt d) sum_j w^{a j^2 + i j} |j> for a = 0..d-1;
            // Gauss sums make distinct a mutually unbiased for odd primes.
            for a in 0..d {
                let mut b = Array2::zeros((d, d));
                for i in 0..d {
                    for j in 0..d {
                        let e = (a * j * j + i * j) % d;
                        b[[j, i]] = C64::from_polar(
                            1.0 / (d as f64).sqrt(),
                            2.0 * std::f64::consts::PI * e as f64 / d as f64,
                        );
                    }
                }
                bases.push(b);
            }
        }
        bases.truncate(m);
        let set = Self { d, bases };
        set.validate()?;
        Ok(set)
    }

    /// Validation path for user-supplied bases (columns are vectors).
    pub fn from_bases(d: usize, bases: Vec<Array2<C64>>) -> Result<Self> {
        if bases.len() < 2 {
            return Err(Error::InvalidParameter("need at least two bases".into()));
        }
        let set = Self { d, bases };
        set.validate()?;
        Ok(set)
    }

    /// Bundled complete MUB set for d = 4 (five bases), built from the
    /// joint eigenbases of maximal commuting two-qubit Pauli classes and
    /// re-validated at load. `selection` picks bases by index; index 0
    /// is the computational basis.
    pub fn bundled_d4(selection: &[usize]) -> Result<Self> {
        let all = complete_d4()?;
        if selection.is_empty() || selection.iter().any(|&i| i >= all.len()) {
            return Err(Error::InvalidParameter(
                "selection indices must lie in 0..5".into(),
            ));
        }
        let bases: Vec<Array2<C64>> = selection.iter().map(|&i| all[i].clone()).collect();
        let set = Self { d: 4, bases };
        set.validate()?;
        Ok(set)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn count(&self) -> usize {
        self.bases.len()
    }

    pub fn basis(&self, k: usize) -> &Array2<C64> {
        &self.bases[k]
    }

    fn validate(&self) -> Result<()> {
        let d = self.d;
        for b in &self.bases {
            if b.dim() != (d, d) {
                return Err(Error::DimensionMismatch("basis must be d x d".into()));
            }
        }
        for (k, bk) in self.bases.iter().enumerate() {
            for (l, bl) in self.bases.iter().enumerate() {
                for i in 0..d {
                    for j in 0..d {
                        let ip: C64 = (0..d).map(|a| bk[[a, i]].conj() * bl[[a, j]]).sum();
                        let expect = if k == l {
                            if i == j {
                                1.0
                            } else {
                                0.0
                            }
                        } else {
                            1.0 / d as f64
                        };
                        let got = if k == l { ip.norm() } else { ip.norm_sqr() };
                        if (got - expect).abs() > tol::POVM_OVERLAP {
                            return Err(Error::ValidationFailed(format!(
                                "bases {k},{l} fail the unbiasedness condition \
                                 (overlap {got}, expected {expect})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn require_computational_first(&self) -> Result<()> {
        let d = self.d;
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (self.bases[0][[i, j]] - C64::new(expect, 0.0)).norm() > 1e-12 {
                    return Err(Error::ValidationFailed(
                        "basis 0 must be the computational basis".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Spec-level constructor: Weyl family for prime d.
pub fn build_mub_set(d: usize, m: usize) -> Result<MUBSet> {
    MUBSet::weyl_family(d, m)
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

fn pauli(which: char) -> Array2<C64> {
    match which {
        'i' => Array2::eye(2),
        'x' => ndarray::array![
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
        ],
        'y' => ndarray::array![
            [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
            [C64::new(0.0, 1.0), C64::new(0.0, 0.0)]
        ],
        'z' => ndarray::array![
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]
        ],
        _ => unreachable!(),
    }
}

/// Joint eigenbasis of a maximal commuting class of two-qubit Pauli
/// operators, extracted from a generic member combination (the weights
/// split all joint eigenvalues).
fn pauli_class_basis(class: [(char, char); 3]) -> Result<Array2<C64>> {
    let mut combo = Array2::<C64>::zeros((4, 4));
    for (w, (a, b)) in [1.0, 2.0, 4.0].iter().zip(class.iter()) {
        combo = combo + kron(&pauli(*a).view(), &pauli(*b).view()).mapv(|v| v * *w);
    }
    Ok(linalg::eigh(&combo)?.1)
}

/// The five pairwise-unbiased bases of C^4.
fn complete_d4() -> Result<Vec<Array2<C64>>> {
    let classes: [[(char, char); 3]; 4] = [
        [('x', 'i'), ('i', 'x'), ('x', 'x')],
        [('y', 'i'), ('i', 'y'), ('y', 'y')],
        [('x', 'y'), ('y', 'z'), ('z', 'x')],
        [('y', 'x'), ('z', 'y'), ('x', 'z')],
    ];
    let mut bases = vec![Array2::eye(4)];
    for class in classes {
        bases.push(pauli_class_basis(class)?);
    }
    Ok(bases)
}

/// An unextendible MUB triple for d = 4: computational basis, the X(x)X
/// product basis, and the joint eigenbasis of {ZX, XZ, YY}. The six
/// remaining Pauli operators admit no further commuting class, so no
/// fourth unbiased basis exists. Its see-saw lower bound (0.5) differs
/// from the complete-set triples (0.25).
pub fn unextendible_d4_triple() -> Result<MUBSet> {
    let xx = pauli_class_basis([('x', 'i'), ('i', 'x'), ('x', 'x')])?;
    let mixed = pauli_class_basis([('z', 'x'), ('x', 'z'), ('y', 'y')])?;
    MUBSet::from_bases(4, vec![Array2::eye(4), xx, mixed])
}

/// The two inequivalent three-element MUB sets for d = 4 whose window
/// lower bounds realize the tabulated pair: a complete-set subset
/// (L = 0.25) and the unextendible triple (L = 0.5).
pub fn inequivalent_d4_mub_triples() -> Result<(MUBSet, MUBSet)> {
    Ok((MUBSet::bundled_d4(&[0, 1, 2])?, unextendible_d4_triple()?))
}

/// d^2 rank-1 projectors with uniform pairwise overlap 1/(d+1).
#[derive(Debug, Clone)]
pub struct SICSet {
    d: usize,
    projectors: Vec<Array2<C64>>,
}

impl SICSet {
    /// Bundled fiducials expanded by the Weyl orbit: the qubit
    /// tetrahedron for d = 2 and the Hesse fiducial (0, 1, -1)/sqrt 2
    /// for d = 3. Overlaps are re-validated on every load.
    pub fn bundled(d: usize) -> Result<Self> {
        let fiducial: Array1<C64> = match d {
            2 => {
                let c = ((1.0 + 1.0 / 3.0_f64.sqrt()) / 2.0).sqrt();
                let s = ((1.0 - 1.0 / 3.0_f64.sqrt()) / 2.0).sqrt();
                ndarray::array![
                    C64::new(c, 0.0),
                    C64::from_polar(s, std::f64::consts::FRAC_PI_4)
                ]
            }
            3 => {
                let h = 1.0 / 2.0_f64.sqrt();
                ndarray::array![C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)]
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "no bundled SIC fiducial for d = {d}"
                )))
            }
        };
        Self::from_fiducial(d, &fiducial)
    }

    /// Weyl orbit of a fiducial vector, validated.
    pub fn from_fiducial(d: usize, fiducial: &Array1<C64>) -> Result<Self> {
        if fiducial.len() != d {
            return Err(Error::DimensionMismatch("fiducial length must be d".into()));
        }
        let mut projectors = Vec::with_capacity(d * d);
        for k in 0..d {
            for l in 0..d {
                let w = weyl_operator(WeylIndex::new(k as i64, l as i64, d));
                let v: Array1<C64> = w.dot(fiducial);
                let mut p = Array2::zeros((d, d));
                for i in 0..d {
                    for j in 0..d {
                        p[[i, j]] = v[i] * v[j].conj();
                    }
                }
                projectors.push(p);
            }
        }
        let set = Self { d, projectors };
        set.validate()?;
        Ok(set)
    }

    pub fn from_projectors(d: usize, projectors: Vec<Array2<C64>>) -> Result<Self> {
        let set = Self { d, projectors };
        set.validate()?;
        Ok(set)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn projectors(&self) -> &[Array2<C64>] {
        &self.projectors
    }

    /// POVM elements Pi_s / d.
    pub fn povm_element(&self, s: usize) -> Array2<C64> {
        self.projectors[s].mapv(|z| z / self.d as f64)
    }

    fn validate(&self) -> Result<()> {
        let d = self.d;
        if self.projectors.len() != d * d {
            return Err(Error::ValidationFailed(format!(
                "a SIC for d = {d} needs {} projectors",
                d * d
            )));
        }
        let mut sum = Array2::<C64>::zeros((d, d));
        for p in &self.projectors {
            sum = sum + p;
        }
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { d as f64 } else { 0.0 };
                if (sum[[i, j]] - C64::new(expect, 0.0)).norm() > tol::POVM_OVERLAP {
                    return Err(Error::ValidationFailed(
                        "SIC projectors do not resolve the identity".into(),
                    ));
                }
            }
        }
        for (s, ps) in self.projectors.iter().enumerate() {
            for (r, pr) in self.projectors.iter().enumerate() {
                let overlap = linalg::trace_product(&ps.view(), pr);
                let expect = (1.0 + d as f64 * if s == r { 1.0 } else { 0.0 }) / (d as f64 + 1.0);
                if (overlap - expect).abs() > tol::POVM_OVERLAP {
                    return Err(Error::ValidationFailed(format!(
                        "SIC overlap ({s},{r}) = {overlap}, expected {expect}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// General SIC POVM: d^2 positive elements summing to the identity with
/// uniform purity a = Tr(Pi^2) and uniform cross overlaps
/// (1 - d a) / (d (d^2 - 1)).
#[derive(Debug, Clone)]
pub struct GSICSet {
    d: usize,
    elements: Vec<Array2<C64>>,
    purity: f64,
}

impl GSICSet {
    /// Depolarized family Pi'_s = t Pi_s/d + (1-t) 1/d^2 built from a
    /// rank-1 SIC; t = 1 recovers the SIC POVM itself.
    pub fn depolarized(sic: &SICSet, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) || t == 0.0 {
            return Err(Error::InvalidParameter(
                "depolarization weight t must lie in (0, 1]".into(),
            ));
        }
        let d = sic.d();
        let elements: Vec<Array2<C64>> = sic
            .projectors()
            .iter()
            .map(|p| {
                let mut e = p.mapv(|z| z * t / d as f64);
                for i in 0..d {
                    e[[i, i]] += C64::new((1.0 - t) / (d * d) as f64, 0.0);
                }
                e
            })
            .collect();
        Self::from_elements(d, elements)
    }

    pub fn from_elements(d: usize, elements: Vec<Array2<C64>>) -> Result<Self> {
        if elements.len() != d * d {
            return Err(Error::ValidationFailed(format!(
                "a GSIC for d = {d} needs {} elements",
                d * d
            )));
        }
        let purity = linalg::trace_product(&elements[0].view(), &elements[0]);
        let cross_expect = (1.0 - d as f64 * purity) / (d as f64 * ((d * d - 1) as f64));
        let mut sum = Array2::<C64>::zeros((d, d));
        for (s, es) in elements.iter().enumerate() {
            let min = linalg::min_eigenvalue(es)?;
            if min < tol::PSD {
                return Err(Error::NotPositive {
                    min_eigenvalue: min,
                });
            }
            sum = sum + es;
            for (r, er) in elements.iter().enumerate() {
                let overlap = linalg::trace_product(&es.view(), er);
                let expect = if s == r { purity } else { cross_expect };
                if (overlap - expect).abs() > tol::POVM_OVERLAP {
                    return Err(Error::ValidationFailed(format!(
                        "GSIC overlap ({s},{r}) = {overlap}, expected {expect}"
                    )));
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (sum[[i, j]] - C64::new(expect, 0.0)).norm() > tol::POVM_OVERLAP {
                    return Err(Error::ValidationFailed(
                        "GSIC elements do not sum to the identity".into(),
                    ));
                }
            }
        }
        Ok(Self { d, elements, purity })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn elements(&self) -> &[Array2<C64>] {
        &self.elements
    }

    pub fn purity(&self) -> f64 {
        self.purity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundProvenance {
    PaperTable,
    SeeSaw,
    Analytic,
}

#[derive(Debug, Clone, Copy)]
pub struct WitnessBounds {
    pub lower: f64,
    pub upper: f64,
    pub provenance: BoundProvenance,
}

/// Positive-but-not-completely-positive maps used for witness
/// construction; both are self-dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PncpMap {
    /// sigma -> sigma^T
    Transpose,
    /// sigma -> 1 Tr(sigma) - sigma
    Reduction,
}

impl PncpMap {
    fn apply_block(&self, block: &Array2<C64>) -> Array2<C64> {
        match self {
            PncpMap::Transpose => block.t().to_owned(),
            PncpMap::Reduction => {
                let tr: C64 = block.diag().sum();
                let n = block.nrows();
                let mut out = block.mapv(|z| -z);
                for i in 0..n {
                    out[[i, i]] += tr;
                }
                out
            }
        }
    }
}

/// Apply 1 (x) Lambda to an operator on A (x) B (blockwise on B).
fn apply_map_on_second(map: PncpMap, m: &Array2<C64>, da: usize, db: usize) -> Array2<C64> {
    let mut out = Array2::zeros((da * db, da * db));
    for ia in 0..da {
        for ja in 0..da {
            let mut block = Array2::zeros((db, db));
            for ib in 0..db {
                for jb in 0..db {
                    block[[ib, jb]] = m[[ia * db + ib, ja * db + jb]];
                }
            }
            let mapped = map.apply_block(&block);
            for ib in 0..db {
                for jb in 0..db {
                    out[[ia * db + ib, ja * db + jb]] = mapped[[ib, jb]];
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub enum WitnessKind {
    Mub {
        d: usize,
        m: usize,
        s: usize,
        transposed: bool,
    },
    Sic {
        d: usize,
        count: usize,
    },
    Pncp {
        map: PncpMap,
        phi: Array1<C64>,
    },
    Mirror {
        mu: f64,
    },
    BellCatalog,
}

/// A Hermitian operator with witness metadata. `is_witness` records that
/// the operator passed both construction gates: a strictly negative
/// eigenvalue and nonnegative expectation on sampled product states.
#[derive(Debug, Clone)]
pub struct Witness {
    pub operator: HermitianOperator,
    pub kind: WitnessKind,
    pub bounds: Option<WitnessBounds>,
    pub is_witness: bool,
}

impl Witness {
    pub fn expectation(&self, state: &DenseState) -> Result<f64> {
        self.operator.expectation(state)
    }
}

/// Gate: Tr(W sigma) >= -1e-8 for 1000 seeded product states.
fn product_gate(op: &HermitianOperator) -> Result<bool> {
    let dims = op.dims().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(GATE_SEED);
    for _ in 0..1000 {
        let sigma = linalg::sample::random_product_state(&mut rng, &dims);
        if op.expectation(&sigma)? < tol::WITNESS_GATE {
            return Ok(false);
        }
    }
    Ok(true)
}

fn has_negative_eigenvalue(op: &HermitianOperator) -> Result<bool> {
    Ok(op.eigenvalues()?[0] < -1e-10)
}

/// The correlation operator built from m MUBs:
/// B(M_m, s) = sum_l |l><l| (x) |l+s><l+s|
///           + sum_{k>=1} sum_i |i_k><i_k| (x) |i_k><i_k|,
/// with the second factors complex-conjugated when `conjugated` (the
/// partial-transpose form B^Gamma).
pub fn mub_correlation_operator(
    mubs: &MUBSet,
    s: usize,
    conjugated: bool,
) -> Result<HermitianOperator> {
    mubs.require_computational_first()?;
    let d = mubs.d();
    if s >= d {
        return Err(Error::InvalidParameter(format!(
            "shift s = {s} out of range for d = {d}"
        )));
    }
    let side = d * d;
    let mut b = Array2::<C64>::zeros((side, side));
    for l in 0..d {
        let t = (l + s) % d;
        b[[l * d + t, l * d + t]] += C64::new(1.0, 0.0);
    }
    for k in 1..mubs.count() {
        let basis = mubs.basis(k);
        for i in 0..d {
            for a in 0..d {
                for a2 in 0..d {
                    let left = basis[[a, i]] * basis[[a2, i]].conj();
                    for c in 0..d {
                        for c2 in 0..d {
                            let right = if conjugated {
                                basis[[c, i]].conj() * basis[[c2, i]]
                            } else {
                                basis[[c, i]] * basis[[c2, i]].conj()
                            };
                            b[[a * d + c, a2 * d + c2]] += left * right;
                        }
                    }
                }
            }
        }
    }
    HermitianOperator::new(vec![d, d], b)
}

/// W(M_m, s) = ((d + m - 1)/d) 1 - B(M_m, s), optionally the partially
/// transposed variant. Construction fails unless the operator has a
/// strictly negative eigenvalue and passes the product-state gate.
pub fn mub_witness(mubs: &MUBSet, s: usize, transposed: bool) -> Result<Witness> {
    let d = mubs.d();
    let m = mubs.count();
    let b = mub_correlation_operator(mubs, s, transposed)?;
    let shift = (d + m - 1) as f64 / d as f64;
    let mut w = b.matrix().mapv(|z| -z);
    for i in 0..d * d {
        w[[i, i]] += C64::new(shift, 0.0);
    }
    let operator = HermitianOperator::new(vec![d, d], w)?;
    if !has_negative_eigenvalue(&operator)? {
        return Err(Error::ValidationFailed(
            "operator has no negative eigenvalue; it detects nothing".into(),
        ));
    }
    if !product_gate(&operator)? {
        return Err(Error::ValidationFailed(
            "operator failed the product-state gate".into(),
        ));
    }
    Ok(Witness {
        operator,
        kind: WitnessKind::Mub {
            d,
            m,
            s,
            transposed,
        },
        bounds: Some(WitnessBounds {
            lower: 0.0,
            upper: shift,
            provenance: BoundProvenance::Analytic,
        }),
        is_witness: true,
    })
}

/// Correlation statistic of the first experiment's convention: the
/// computational-basis term carries the index shift s and the unbiased
/// bases enter with conjugated second factors,
/// C_m = sum_l <l, l+s| rho |l, l+s> + sum_{k>=1} sum_i Tr(P_ik (x) P_ik^* rho).
pub fn correlation_value(rho: &DenseState, mubs: &MUBSet, s: usize) -> Result<f64> {
    let b = mub_correlation_operator(mubs, s, true)?;
    b.expectation(rho)
}

/// Single-basis term of the correlation statistic: the k = 0 term is the
/// shifted computational contribution, k >= 1 the conjugated MUB terms.
pub fn correlation_term(rho: &DenseState, mubs: &MUBSet, s: usize, k: usize) -> Result<f64> {
    mubs.require_computational_first()?;
    let d = mubs.d();
    if k >= mubs.count() {
        return Err(Error::InvalidParameter(format!("basis index {k} out of range")));
    }
    let m = rho.matrix();
    if rho.dims() != [d, d] {
        return Err(Error::DimensionMismatch("state does not match the MUB dimension".into()));
    }
    if k == 0 {
        let mut acc = 0.0;
        for l in 0..d {
            let idx = l * d + (l + s) % d;
            acc += m[[idx, idx]].re;
        }
        return Ok(acc);
    }
    let basis = mubs.basis(k);
    let mut acc = 0.0;
    for i in 0..d {
        let mut ip = C64::new(0.0, 0.0);
        // <v_i (x) v_i^* | rho | v_i (x) v_i^*>
        for a in 0..d {
            for c in 0..d {
                let bra = basis[[a, i]].conj() * basis[[c, i]];
                for a2 in 0..d {
                    for c2 in 0..d {
                        let ket = basis[[a2, i]] * basis[[c2, i]].conj();
                        ip += bra * m[[a * d + c, a2 * d + c2]] * ket;
                    }
                }
            }
        }
        acc += ip.re;
    }
    Ok(acc)
}

/// The plain window observable sum_{k<m} sum_i P_ik (x) P_ik whose
/// product-state extrema are tabulated per (d, m). Built from the actual
/// basis vectors, so sets that do not contain the computational basis
/// are fine here.
pub fn mub_window_operator(mubs: &MUBSet) -> Result<HermitianOperator> {
    let d = mubs.d();
    let side = d * d;
    let mut b = Array2::<C64>::zeros((side, side));
    for k in 0..mubs.count() {
        let basis = mubs.basis(k);
        for i in 0..d {
            for a in 0..d {
                for a2 in 0..d {
                    let left = basis[[a, i]] * basis[[a2, i]].conj();
                    for c in 0..d {
                        for c2 in 0..d {
                            b[[a * d + c, a2 * d + c2]] +=
                                left * basis[[c, i]] * basis[[c2, i]].conj();
                        }
                    }
                }
            }
        }
    }
    HermitianOperator::new(vec![d, d], b)
}

/// SIC correlation statistic over the first `count` projectors of the
/// orbit: C = sum_k Tr(Pi_k (x) Pi_k rho).
pub fn sic_correlation_value(rho: &DenseState, sic: &SICSet, count: usize) -> Result<f64> {
    let op = sic_window_operator(sic, count)?;
    op.expectation(rho)
}

pub fn sic_window_operator(sic: &SICSet, count: usize) -> Result<HermitianOperator> {
    let d = sic.d();
    if count == 0 || count > d * d {
        return Err(Error::InvalidParameter(format!(
            "SIC subset size must lie in 1..={}",
            d * d
        )));
    }
    let side = d * d;
    let mut k = Array2::<C64>::zeros((side, side));
    for p in sic.projectors().iter().take(count) {
        let term = kron(&p.view(), &p.view());
        k = k + term;
    }
    HermitianOperator::new(vec![d, d], k)
}

/// Product-state extremum estimates for an observable.
#[derive(Debug, Clone, Copy)]
pub struct SeparabilityWindow {
    /// Best-found minimum of <ab|K|ab> (an upper estimate of the true min).
    pub lower: f64,
    /// Best-found maximum (a lower estimate of the true max).
    pub upper: f64,
    pub restarts: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct WindowParams {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for WindowParams {
    fn default() -> Self {
        Self {
            restarts: 200,
            iterations: 500,
            seed: SeeSawParams::default().seed,
        }
    }
}

/// Estimate the separability window [L, U] of a bipartite observable by
/// alternating eigenvector ascent over pure product states. Extrema of
/// Tr(K sigma) over separable states are attained on pure products, so
/// the window over products is the separability window.
pub fn separability_window(
    observable: &HermitianOperator,
    params: &WindowParams,
) -> Result<SeparabilityWindow> {
    let (da, db) = observable.bipartite_dims()?;
    let ss = SeeSawParams {
        restarts: params.restarts,
        iterations: params.iterations,
        seed: params.seed,
        convergence: tol::SEESAW_CONVERGENCE,
    };
    let max = seesaw::product_extremum(observable.matrix(), da, db, true, &ss)?;
    let min = seesaw::product_extremum(observable.matrix(), da, db, false, &ss)?;
    Ok(SeparabilityWindow {
        lower: min.value,
        upper: max.value,
        restarts: params.restarts,
        iterations: params.iterations,
        converged: max.converged && min.converged,
    })
}

/// Mirrored operator W_M = mu 1 - W with mu taken from the upper edge of
/// the separability window of W. `is_witness` is false when
/// lambda_max(W) <= mu (the mirror detects nothing).
pub fn mirror_witness(witness: &Witness, window: &SeparabilityWindow) -> Result<Witness> {
    let mu = window.upper;
    let side = witness.operator.side();
    let mut m = witness.operator.matrix().mapv(|z| -z);
    for i in 0..side {
        m[[i, i]] += C64::new(mu, 0.0);
    }
    let operator = HermitianOperator::new(witness.operator.dims().to_vec(), m)?;
    let lambda_max = *witness
        .operator
        .eigenvalues()?
        .last()
        .expect("nonempty spectrum");
    let detecting = lambda_max > mu && has_negative_eigenvalue(&operator)?;
    let gated = detecting && product_gate(&operator)?;
    Ok(Witness {
        operator,
        kind: WitnessKind::Mirror { mu },
        bounds: None,
        is_witness: gated,
    })
}

/// Witness from a PNCP map and a target state it detects:
/// W = (1 (x) Lambda*)(|phi><phi|) with |phi> the most negative
/// eigenvector of (1 (x) Lambda)(rho).
pub fn witness_from_pncp(map: PncpMap, rho: &DenseState) -> Result<Witness> {
    let (da, db) = rho.bipartite_dims()?;
    let mapped = apply_map_on_second(map, rho.matrix(), da, db);
    let (vals, vecs) = linalg::eigh(&mapped)?;
    if vals[0] >= -1e-10 {
        return Err(Error::ValidationFailed(
            "the map does not detect this state (no negative eigenvalue)".into(),
        ));
    }
    let phi: Array1<C64> = vecs.column(0).to_owned();
    let n = phi.len();
    let mut proj = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            proj[[i, j]] = phi[i] * phi[j].conj();
        }
    }
    // Both maps are self-dual.
    let w = apply_map_on_second(map, &proj, da, db);
    let operator = HermitianOperator::new(vec![da, db], w)?;
    if !product_gate(&operator)? {
        return Err(Error::ValidationFailed(
            "operator failed the product-state gate".into(),
        ));
    }
    if operator.expectation(rho)? >= 0.0 {
        return Err(Error::ValidationFailed(
            "constructed operator does not detect the target state".into(),
        ));
    }
    Ok(Witness {
        operator,
        kind: WitnessKind::Pncp { map, phi },
        bounds: None,
        is_witness: true,
    })
}

/// Nonlinear functional improving a PNCP-map witness:
/// F[rho] = Tr(W rho) - Tr(X rho) Tr(X^dag rho) / s(chi)^2 with
/// X = (1 (x) Lambda*)(|phi><chi|) and s(chi) the largest Schmidt
/// coefficient of chi.
pub fn nonlinear_functional(
    witness: &Witness,
    chi: &Array1<C64>,
    rho: &DenseState,
) -> Result<f64> {
    let WitnessKind::Pncp { map, phi } = &witness.kind else {
        return Err(Error::InvalidParameter(
            "nonlinear functional requires a PNCP-map witness".into(),
        ));
    };
    let (da, db) = rho.bipartite_dims()?;
    if chi.len() != da * db {
        return Err(Error::DimensionMismatch("chi length must be dA*dB".into()));
    }
    let schmidt = linalg::schmidt_decompose(chi, (da, db))?;
    let s = schmidt.coefficients[0];
    if s < 1e-12 {
        return Err(Error::InvalidParameter(
            "chi has vanishing largest Schmidt coefficient".into(),
        ));
    }
    let linear = witness.expectation(rho)?;
    let n = chi.len();
    let mut ketbra = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            ketbra[[i, j]] = phi[i] * chi[j].conj();
        }
    }
    let x = apply_map_on_second(*map, &ketbra, da, db);
    let xnorm: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    if xnorm < 1e-28 {
        return Ok(linear);
    }
    // Tr(X rho) * Tr(X^dag rho) = |Tr(X rho)|^2 for Hermitian rho.
    let mut tr = C64::new(0.0, 0.0);
    let rm = rho.matrix();
    for i in 0..n {
        for j in 0..n {
            tr += x[[i, j]] * rm[[j, i]];
        }
    }
    Ok(linear - tr.norm_sqr() / (s * s))
}

/// The cataloged qutrit-qutrit Bell-violation witness, with exact
/// rational/radical entries realized at load.
pub fn bell_violation_witness() -> Witness {
    let table: Vec<(usize, usize, Radical)> = {
        let q = Radical::rational;
        let r2 = |n: i64| Radical::new(n, 25, 2, 1);
        let r21 = |n: i64| Radical::new(n, 25, 21, 1);
        let r42 = |n: i64| Radical::new(n, 25, 42, 1);
        vec![
            (0, 0, q(1, 25)),
            (0, 4, q(-1, 25)),
            (0, 5, r2(1)),
            (0, 6, r21(-1)),
            (1, 1, q(3, 25)),
            (1, 2, r2(1)),
            (1, 3, q(-1, 25)),
            (1, 7, r21(1)),
            (1, 8, r42(1)),
            (2, 2, q(46, 25)),
            (2, 3, r2(1)),
            (2, 7, r42(1)),
            (3, 3, q(3, 25)),
            (3, 7, r21(1)),
            (3, 8, r42(-1)),
            (4, 4, q(1, 25)),
            (4, 5, r2(-1)),
            (4, 6, r21(1)),
            (5, 5, q(46, 25)),
            (5, 6, r42(-1)),
            (6, 6, q(21, 25)),
            (7, 7, q(21, 25)),
            (8, 8, q(8, 25)),
        ]
    };
    let mut m = Array2::<C64>::zeros((9, 9));
    for (i, j, rad) in table {
        let v = C64::new(rad.value(), 0.0);
        m[[i, j]] = v;
        m[[j, i]] = v;
    }
    let operator =
        HermitianOperator::new(vec![3, 3], m).expect("symmetric real table is Hermitian");
    let is_witness = has_negative_eigenvalue(&operator).unwrap_or(false)
        && product_gate(&operator).unwrap_or(false);
    Witness {
        operator,
        kind: WitnessKind::BellCatalog,
        bounds: Some(WitnessBounds {
            lower: 0.0,
            upper: f64::INFINITY,
            provenance: BoundProvenance::Analytic,
        }),
        is_witness,
    }
}

/// Tr(W_Bell rho_bound).
pub fn bell_violation_value() -> f64 {
    let w = bell_violation_witness();
    let rho = zoo::rho_bound();
    w.expectation(&rho).expect("matching 3x3 dimensions")
}

/// See-saw maximum of <ab|Pi|ab> over product vectors; high values
/// certify a near-member product vector, values bounded away from one
/// across many restarts are heuristic evidence of unextendibility.
pub(crate) fn product_overlap_maximum(
    projector: &HermitianOperator,
    restarts: usize,
    seed: u64,
) -> Result<f64> {
    let (da, db) = projector.bipartite_dims()?;
    let params = SeeSawParams {
        restarts,
        iterations: 500,
        seed,
        convergence: tol::SEESAW_CONVERGENCE,
    };
    Ok(seesaw::product_extremum(projector.matrix(), da, db, true, &params)?.value)
}
