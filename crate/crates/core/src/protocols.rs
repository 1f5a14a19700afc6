//! Quantitative protocol layer: singlet fraction and teleportation
//! fidelity bounds, the measure-and-prepare baseline, the activation
//! protocol (exact postselected simulation plus closed form), Choi
//! channel/state duality, and quantum Fisher information.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::bell::max_entangled_projector;
use crate::error::{Error, Result};
use crate::linalg::{self, embed_operator, kron, DenseState, HermitianOperator};
use crate::zoo;

/// A quantum channel in Kraus or Choi representation.
#[derive(Debug, Clone)]
pub enum QuantumChannel {
    Kraus {
        ops: Vec<Array2<C64>>,
        in_dim: usize,
        out_dim: usize,
    },
    Choi {
        matrix: Array2<C64>,
        in_dim: usize,
        out_dim: usize,
    },
}

impl QuantumChannel {
    /// Kraus-given channel; validates trace preservation
    /// sum K^dag K = 1 within 1e-9.
    pub fn from_kraus(ops: Vec<Array2<C64>>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidParameter("need at least one Kraus operator".into()));
        }
        let out_dim = ops[0].nrows();
        let in_dim = ops[0].ncols();
        let mut acc = Array2::<C64>::zeros((in_dim, in_dim));
        for k in &ops {
            if k.nrows() != out_dim || k.ncols() != in_dim {
                return Err(Error::DimensionMismatch(
                    "Kraus operators must share one shape".into(),
                ));
            }
            let kh = k.mapv(|z| z.conj()).reversed_axes();
            acc = acc + kh.dot(k);
        }
        for i in 0..in_dim {
            for j in 0..in_dim {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (acc[[i, j]] - C64::new(expect, 0.0)).norm() > 1e-9 {
                    return Err(Error::ValidationFailed(
                        "Kraus operators are not trace preserving".into(),
                    ));
                }
            }
        }
        Ok(QuantumChannel::Kraus {
            ops,
            in_dim,
            out_dim,
        })
    }

    pub fn identity(d: usize) -> Self {
        QuantumChannel::Kraus {
            ops: vec![Array2::eye(d)],
            in_dim: d,
            out_dim: d,
        }
    }

    /// E(rho) = (1-p) rho + p Tr(rho) 1/d, via the Weyl-twirl Kraus set.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter("need 0 <= p <= 1".into()));
        }
        let mut ops = Vec::with_capacity(d * d);
        let keep = (1.0 - p + p / (d * d) as f64).sqrt();
        ops.push(Array2::eye(d).mapv(|z: C64| z * keep));
        let w = (p / (d * d) as f64).sqrt();
        for k in 0..d {
            for l in 0..d {
                if k == 0 && l == 0 {
                    continue;
                }
                let op = crate::bell::weyl_operator(crate::bell::WeylIndex::new(
                    k as i64, l as i64, d,
                ));
                ops.push(op.mapv(|z| z * w));
            }
        }
        Self::from_kraus(ops)
    }

    /// The transposition map, represented by its Choi matrix (the swap
    /// operator); positive but not completely positive.
    pub fn transpose_map(d: usize) -> Self {
        let mut swap = Array2::zeros((d * d, d * d));
        for i in 0..d {
            for j in 0..d {
                swap[[j * d + i, i * d + j]] = C64::new(1.0, 0.0);
            }
        }
        QuantumChannel::Choi {
            matrix: swap,
            in_dim: d,
            out_dim: d,
        }
    }

    pub fn in_dim(&self) -> usize {
        match self {
            QuantumChannel::Kraus { in_dim, .. } | QuantumChannel::Choi { in_dim, .. } => *in_dim,
        }
    }

    pub fn out_dim(&self) -> usize {
        match self {
            QuantumChannel::Kraus { out_dim, .. } | QuantumChannel::Choi { out_dim, .. } => {
                *out_dim
            }
        }
    }

    /// Apply the map to an operator on the input space.
    pub fn apply(&self, x: &Array2<C64>) -> Result<Array2<C64>> {
        let din = self.in_dim();
        if x.dim() != (din, din) {
            return Err(Error::DimensionMismatch("operator side must match in_dim".into()));
        }
        match self {
            QuantumChannel::Kraus { ops, out_dim, .. } => {
                let mut out = Array2::zeros((*out_dim, *out_dim));
                for k in ops {
                    let kh = k.mapv(|z| z.conj()).reversed_axes();
                    out = out + k.dot(x).dot(&kh);
                }
                Ok(out)
            }
            QuantumChannel::Choi {
                matrix,
                in_dim,
                out_dim,
            } => {
                // E(X) = Tr_in[ J (1_out (x) X^T) ].
                let mut out = Array2::zeros((*out_dim, *out_dim));
                for a in 0..*out_dim {
                    for b in 0..*out_dim {
                        let mut acc = C64::new(0.0, 0.0);
                        for i in 0..*in_dim {
                            for j in 0..*in_dim {
                                acc += matrix[[a * in_dim + i, b * in_dim + j]] * x[[i, j]];
                            }
                        }
                        out[[a, b]] = acc;
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Unnormalized Choi operator J(E) = sum_ij E(|i><j|) (x) |i><j| on
/// out_dim x in_dim; its positivity decides complete positivity.
pub fn choi_operator(channel: &QuantumChannel) -> Result<HermitianOperator> {
    let din = channel.in_dim();
    let dout = channel.out_dim();
    let mut j = Array2::zeros((dout * din, dout * din));
    for a in 0..din {
        for b in 0..din {
            let mut unit = Array2::zeros((din, din));
            unit[[a, b]] = C64::new(1.0, 0.0);
            let image = channel.apply(&unit)?;
            for x in 0..dout {
                for y in 0..dout {
                    j[[x * din + a, y * din + b]] += image[[x, y]];
                }
            }
        }
    }
    HermitianOperator::new(vec![dout, din], j)
}

/// Choi's criterion: the map is completely positive iff J(E) >= 0.
pub fn is_completely_positive(channel: &QuantumChannel) -> Result<bool> {
    let j = choi_operator(channel)?;
    Ok(j.eigenvalues()?[0] >= -1e-10)
}

/// The normalized Choi state (E (x) id) P_00 = J(E)/d; fails (with a
/// negative-eigenvalue report) when the channel is not CP.
pub fn choi_state(channel: &QuantumChannel) -> Result<DenseState> {
    let din = channel.in_dim();
    let j = choi_operator(channel)?;
    let m = j.matrix().mapv(|z| z / din as f64);
    DenseState::new(j.dims().to_vec(), m)
}

/// Alias carrying the protocol reading: the state obtained by sending
/// one half of a maximally entangled state through the channel.
pub fn state_from_channel(channel: &QuantumChannel) -> Result<DenseState> {
    choi_state(channel)
}

/// Singlet fraction Tr(P_00 rho) for equal local dimensions.
pub fn singlet_fraction(rho: &DenseState) -> Result<f64> {
    let (da, db) = rho.bipartite_dims()?;
    if da != db {
        return Err(Error::DimensionMismatch(
            "singlet fraction needs equal local dimensions".into(),
        ));
    }
    let p = max_entangled_projector(da);
    Ok(linalg::trace_product(&p.matrix().view(), rho.matrix()))
}

/// Optimal teleportation fidelity (d F + 1)/(d + 1) from the singlet
/// fraction.
pub fn max_teleport_fidelity(singlet_fraction: f64, d: usize) -> f64 {
    (d as f64 * singlet_fraction + 1.0) / (d as f64 + 1.0)
}

/// Fidelity of the classical measure-and-prepare protocol, 2/(d+1): the
/// floor any entanglement-assisted scheme has to beat.
pub fn measure_prepare_fidelity(d: usize) -> f64 {
    2.0 / (d as f64 + 1.0)
}

/// One activation round, exactly simulated: both parties apply the
/// generalized XOR gate (free pair controls, bound pair targets),
/// measure the targets in the computational basis, and postselect on
/// equal outcomes. Returns the success probability and the normalized
/// post-state of the control pair.
pub fn activation_step_simulate(
    rho_free: &DenseState,
    rho_bound: &DenseState,
) -> Result<(f64, DenseState)> {
    let (da, db) = rho_free.bipartite_dims()?;
    let (ba, bb) = rho_bound.bipartite_dims()?;
    if da != db || ba != bb || da != ba {
        return Err(Error::DimensionMismatch(
            "activation needs two d x d bipartite states".into(),
        ));
    }
    let d = da;
    let dims = [d, d, d, d]; // (A1, B1, A2, B2)
    let total = kron(&rho_free.matrix().view(), &rho_bound.matrix().view());

    // U_XOR = sum_ij |i><i| (x) |j+i><j| (control first, target second).
    let mut xor = Array2::<C64>::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            xor[[i * d + (j + i) % d, i * d + j]] = C64::new(1.0, 0.0);
        }
    }
    let ua = embed_operator(&xor.view(), &[0, 2], &dims);
    let ub = embed_operator(&xor.view(), &[1, 3], &dims);
    let u = ua.dot(&ub);
    let uh = u.mapv(|z| z.conj()).reversed_axes();
    let evolved = u.dot(&total).dot(&uh);

    // Postselect equal computational outcomes on (A2, B2) and discard.
    let side = d * d;
    let mut post = Array2::<C64>::zeros((side, side));
    let mut prob = 0.0;
    for m in 0..d {
        for a in 0..d {
            for b in 0..d {
                let row = ((a * d + b) * d + m) * d + m;
                for a2 in 0..d {
                    for b2 in 0..d {
                        let col = ((a2 * d + b2) * d + m) * d + m;
                        post[[a * d + b, a2 * d + b2]] += evolved[[row, col]];
                    }
                }
            }
        }
    }
    for i in 0..side {
        prob += post[[i, i]].re;
    }
    if prob <= 0.0 {
        return Err(Error::ValidationFailed(
            "postselection succeeded with zero probability".into(),
        ));
    }
    post.mapv_inplace(|z| z / prob);
    Ok((prob, DenseState::new(vec![d, d], post)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ActivationVariant {
    /// Free state on the shift-1 line; boosts for 3 < alpha <= 5.
    Standard,
    /// Free state on the shift-2 line; boosts for 0 <= alpha < 2.
    Tilde,
}

/// Closed-form activation round: success probability and updated singlet
/// fraction.
///
/// Standard: P = (2F + (1-F)(5-alpha))/7, F' = 2F / (2F + (1-F)(5-alpha)).
/// Tilde:    P = (2F + (1-F) alpha)/7,    F' = 2F / (2F + (1-F) alpha).
pub fn activation_step_closed_form(f: f64, alpha: f64, variant: ActivationVariant) -> (f64, f64) {
    let weight = match variant {
        ActivationVariant::Standard => 5.0 - alpha,
        ActivationVariant::Tilde => alpha,
    };
    let denom = 2.0 * f + (1.0 - f) * weight;
    (denom / 7.0, 2.0 * f / denom)
}

#[derive(Debug, Clone, Serialize)]
pub struct ActivationRound {
    pub round: usize,
    /// Singlet fraction after this round.
    pub fidelity: f64,
    pub success_probability: f64,
    pub cumulative_probability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ActivationTrace {
    pub f0: f64,
    pub alpha: f64,
    pub variant: ActivationVariant,
    pub rounds: Vec<ActivationRound>,
    /// True when every round strictly increased the singlet fraction
    /// (rounds starting at F = 1 cannot increase it further and do not
    /// count against this).
    pub boosting: bool,
}

impl ActivationTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,fidelity,success_probability,cumulative_probability\n");
        for r in &self.rounds {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e}\n",
                r.round, r.fidelity, r.success_probability, r.cumulative_probability
            ));
        }
        out
    }
}

/// Iterate the closed-form recurrence; with `cross_check` every round is
/// also simulated exactly and must agree to 1e-10.
pub fn run_activation(
    f0: f64,
    alpha: f64,
    rounds: usize,
    variant: ActivationVariant,
    cross_check: bool,
) -> Result<ActivationTrace> {
    if !(0.0 < f0 && f0 < 1.0) {
        return Err(Error::InvalidParameter("need 0 < F0 < 1".into()));
    }
    if !(0.0..=5.0).contains(&alpha) {
        return Err(Error::InvalidParameter("need 0 <= alpha <= 5".into()));
    }
    let mut f = f0;
    let mut cumulative = 1.0;
    let mut out = Vec::with_capacity(rounds);
    let mut boosting = true;
    for round in 1..=rounds {
        let (p, fnext) = activation_step_closed_form(f, alpha, variant);
        if cross_check {
            let free = match variant {
                ActivationVariant::Standard => zoo::activation_fe(f)?,
                ActivationVariant::Tilde => zoo::activation_fe_tilde(f)?,
            };
            let bound = zoo::activation_be(alpha)?;
            let (sim_p, post) = activation_step_simulate(&free.to_dense(), &bound.to_dense())?;
            let sim_f = singlet_fraction(&post)?;
            if (sim_p - p).abs() > 1e-10 || (sim_f - fnext).abs() > 1e-10 {
                return Err(Error::ValidationFailed(format!(
                    "simulator disagrees with the closed form at round {round}: \
                     P {sim_p} vs {p}, F' {sim_f} vs {fnext}"
                )));
            }
        }
        boosting &= fnext > f || f >= 1.0 - 1e-12;
        cumulative *= p;
        f = fnext;
        out.push(ActivationRound {
            round,
            fidelity: f,
            success_probability: p,
            cumulative_probability: cumulative,
        });
    }
    Ok(ActivationTrace {
        f0,
        alpha,
        variant,
        rounds: out,
        boosting,
    })
}

/// Quantum Fisher information
/// F_Q = 2 sum_{ij} (l_i - l_j)^2 / (l_i + l_j) |<psi_i|H|psi_j>|^2,
/// summing only terms with l_i + l_j above 1e-12.
pub fn qfi(rho: &DenseState, hamiltonian: &HermitianOperator) -> Result<f64> {
    if rho.side() != hamiltonian.side() {
        return Err(Error::DimensionMismatch(
            "state and Hamiltonian sides differ".into(),
        ));
    }
    let (vals, vecs) = linalg::eigh(rho.matrix())?;
    let n = vals.len();
    let h = hamiltonian.matrix();
    // Transform H into the eigenbasis.
    let mut hv = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    acc += vecs[[a, i]].conj() * h[[a, b]] * vecs[[b, j]];
                }
            }
            hv[[i, j]] = acc;
        }
    }
    let mut f = 0.0;
    for i in 0..n {
        for j in 0..n {
            let denom = vals[i] + vals[j];
            if denom > 1e-12 {
                let diff = vals[i] - vals[j];
                f += 2.0 * diff * diff / denom * hv[[i, j]].norm_sqr();
            }
        }
    }
    Ok(f.max(0.0))
}

/// Universal bound F_Q <= 4 (<H^2> - <H>^2).
pub fn qfi_upper_bound(rho: &DenseState, hamiltonian: &HermitianOperator) -> Result<f64> {
    if rho.side() != hamiltonian.side() {
        return Err(Error::DimensionMismatch(
            "state and Hamiltonian sides differ".into(),
        ));
    }
    let h = hamiltonian.matrix();
    let h2 = h.dot(h);
    let mean = linalg::trace_product(&h.view(), rho.matrix());
    let mean2 = linalg::trace_product(&h2.view(), rho.matrix());
    Ok(4.0 * (mean2 - mean * mean))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sample;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn singlet_fraction_examples() {
        let p = max_entangled_projector(3);
        assert_abs_diff_eq!(singlet_fraction(&p).unwrap(), 1.0, epsilon = 1e-12);
        let mm = DenseState::maximally_mixed(vec![3, 3]);
        assert_abs_diff_eq!(singlet_fraction(&mm).unwrap(), 1.0 / 9.0, epsilon = 1e-12);
        let fe = zoo::activation_fe(0.37).unwrap().to_dense();
        assert_abs_diff_eq!(singlet_fraction(&fe).unwrap(), 0.37, epsilon = 1e-12);
    }

    #[test]
    fn teleportation_formulas() {
        assert_abs_diff_eq!(max_teleport_fidelity(1.0, 5), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(max_teleport_fidelity(0.5, 3), 5.0 / 8.0, epsilon = 1e-15);
        for d in 2..=6 {
            assert_abs_diff_eq!(
                max_teleport_fidelity(1.0 / d as f64, d),
                measure_prepare_fidelity(d),
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(
                measure_prepare_fidelity(d),
                2.0 / (d as f64 + 1.0),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn activation_specific_point() {
        // Direct substitution into the closed form.
        let (p, f1) = activation_step_closed_form(0.5, 4.0, ActivationVariant::Standard);
        assert_abs_diff_eq!(p, 3.0 / 14.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f1, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn simulator_matches_closed_form_on_a_grid() {
        for f0 in [0.1, 0.5, 0.9] {
            for alpha in [3.25, 4.0, 5.0] {
                let free = zoo::activation_fe(f0).unwrap().to_dense();
                let bound = zoo::activation_be(alpha).unwrap().to_dense();
                let (p, post) = activation_step_simulate(&free, &bound).unwrap();
                let (pc, fc) =
                    activation_step_closed_form(f0, alpha, ActivationVariant::Standard);
                assert_abs_diff_eq!(p, pc, epsilon = 1e-10);
                assert_abs_diff_eq!(
                    singlet_fraction(&post).unwrap(),
                    fc,
                    epsilon = 1e-10
                );
            }
        }
        // Tilde variant against the shifted free state.
        for f0 in [0.2, 0.7] {
            for alpha in [0.5, 1.5] {
                let free = zoo::activation_fe_tilde(f0).unwrap().to_dense();
                let bound = zoo::activation_be(alpha).unwrap().to_dense();
                let (p, post) = activation_step_simulate(&free, &bound).unwrap();
                let (pc, fc) = activation_step_closed_form(f0, alpha, ActivationVariant::Tilde);
                assert_abs_diff_eq!(p, pc, epsilon = 1e-10);
                assert_abs_diff_eq!(singlet_fraction(&post).unwrap(), fc, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn activation_post_state_keeps_the_structural_form() {
        // The post-state must again be F' P_00 + (1-F')/3 sum_i P_{i,1}.
        let (_, post) = activation_step_simulate(
            &zoo::activation_fe(0.4).unwrap().to_dense(),
            &zoo::activation_be(4.0).unwrap().to_dense(),
        )
        .unwrap();
        let f = singlet_fraction(&post).unwrap();
        let expect = zoo::activation_fe(f).unwrap().to_dense();
        let residual: f64 = post
            .matrix()
            .iter()
            .zip(expect.matrix().iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(residual < 1e-9, "coefficient-fit residual {residual}");
    }

    #[test]
    fn activation_traces() {
        let trace = run_activation(0.3, 4.0, 10, ActivationVariant::Standard, false).unwrap();
        assert!(trace.boosting);
        let mut prev = 0.3;
        let mut cumulative = 1.0;
        for r in &trace.rounds {
            assert!(r.fidelity > prev);
            prev = r.fidelity;
            cumulative *= r.success_probability;
            assert!(r.success_probability > 0.0 && r.success_probability < 1.0);
            assert_abs_diff_eq!(r.cumulative_probability, cumulative, epsilon = 1e-14);
        }
        assert!(cumulative > 0.0 && cumulative < 1.0);

        // alpha = 5 from F = 0.3: strictly increasing and approaching 1.
        let t5 = run_activation(0.3, 5.0, 10, ActivationVariant::Standard, false).unwrap();
        assert!(t5.boosting);
        assert!(t5.rounds.last().unwrap().fidelity > 0.99);

        // A separable activator does not boost.
        let sep = run_activation(0.5, 2.5, 3, ActivationVariant::Standard, false).unwrap();
        assert!(!sep.boosting);
        assert!(sep.rounds[0].fidelity < 0.5);

        // Tilde variant boosts in the lower bound entangled window.
        let tilde = run_activation(0.4, 1.5, 5, ActivationVariant::Tilde, false).unwrap();
        assert!(tilde.boosting);
    }

    #[test]
    fn choi_examples() {
        // Identity channel: J = d P_00.
        let id3 = QuantumChannel::identity(3);
        let j = choi_operator(&id3).unwrap();
        let expect = max_entangled_projector(3);
        for (a, b) in j
            .matrix()
            .iter()
            .zip(expect.matrix().iter().map(|z| z * 3.0))
        {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(is_completely_positive(&id3).unwrap());

        // Fully depolarizing channel: state form is maximally mixed.
        let dep = QuantumChannel::depolarizing(3, 1.0).unwrap();
        let state = state_from_channel(&dep).unwrap();
        for (i, row) in state.matrix().outer_iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                let expect = if i == j { 1.0 / 9.0 } else { 0.0 };
                assert!((z - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }

        // Transposition: Choi operator has a negative eigenvalue.
        let t = QuantumChannel::transpose_map(3);
        assert!(!is_completely_positive(&t).unwrap());
        assert!(choi_state(&t).is_err());
    }

    #[test]
    fn choi_positivity_tracks_complete_positivity_both_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for p in [0.0, 0.3, 1.0] {
            let dep = QuantumChannel::depolarizing(2, p).unwrap();
            assert!(is_completely_positive(&dep).unwrap());
            let state = choi_state(&dep).unwrap();
            assert!(state.eigenvalues().unwrap()[0] >= -1e-10);
        }
        let _ = &mut rng;
        assert!(!is_completely_positive(&QuantumChannel::transpose_map(2)).unwrap());
    }

    #[test]
    fn qfi_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        // Pure state: 4x the variance (rank-1 evaluation oracle).
        for _ in 0..10 {
            let psi = sample::random_unit_vector(&mut rng, 4);
            let rho = DenseState::from_pure(vec![4], &psi).unwrap();
            let h = random_hermitian(&mut rng, 4);
            assert_abs_diff_eq!(
                qfi(&rho, &h).unwrap(),
                qfi_upper_bound(&rho, &h).unwrap(),
                epsilon = 1e-8
            );
        }

        // Commuting pair: zero information.
        let mut diag_rho = Array2::<C64>::zeros((3, 3));
        let mut diag_h = Array2::<C64>::zeros((3, 3));
        for (i, (r, h)) in [(0.5, 1.0), (0.3, -2.0), (0.2, 0.5)].iter().enumerate() {
            diag_rho[[i, i]] = C64::new(*r, 0.0);
            diag_h[[i, i]] = C64::new(*h, 0.0);
        }
        let rho = DenseState::new(vec![3], diag_rho).unwrap();
        let h = HermitianOperator::new(vec![3], diag_h).unwrap();
        assert_abs_diff_eq!(qfi(&rho, &h).unwrap(), 0.0, epsilon = 1e-12);

        // The universal bound holds on random pairs.
        for _ in 0..50 {
            let rho = sample::random_density_matrix(&mut rng, &[2, 2]);
            let h = random_hermitian(&mut rng, 4);
            assert!(qfi(&rho, &h).unwrap() <= qfi_upper_bound(&rho, &h).unwrap() + 1e-8);
        }
    }

    fn random_hermitian<R: rand::Rng>(rng: &mut R, d: usize) -> HermitianOperator {
        use rand_distr::StandardNormal;
        let mut m = Array2::<C64>::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            }
        }
        let mh = m.mapv(|z| z.conj()).reversed_axes();
        let herm = (&m + &mh).mapv(|z| z / 2.0);
        HermitianOperator::new(vec![d], herm).unwrap()
    }
}
