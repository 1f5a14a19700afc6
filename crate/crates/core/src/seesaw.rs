//! Alternating ("see-saw") optimization of <a b| K |a b> over pure
//! product states of a bipartite operator.
//!
//! With one side fixed, the objective is a Hermitian quadratic form on
//! the other side, so the optimum is an extremal eigenvector of the
//! contracted operator. Alternating contractions is monotone in the
//! objective; multiple seeded restarts guard against local extrema.
//! Restart randomness is derived from (seed, restart index), so
//! concurrent and serial runs produce identical best values.

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{self, C64};
use crate::tol;

#[derive(Debug, Clone, Copy)]
pub(crate) struct SeeSawParams {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub convergence: f64,
}

impl Default for SeeSawParams {
    fn default() -> Self {
        Self {
            restarts: 200,
            iterations: 500,
            seed: 0x0b0e_571a,
            convergence: tol::SEESAW_CONVERGENCE,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SeeSawOutcome {
    pub value: f64,
    pub converged: bool,
}

fn contract_left(op: &Array2<C64>, da: usize, db: usize, b: &Array1<C64>) -> Array2<C64> {
    let mut m = Array2::zeros((da, da));
    for a in 0..da {
        for a2 in 0..da {
            let mut acc = C64::new(0.0, 0.0);
            for beta in 0..db {
                let row = a * db + beta;
                let bconj = b[beta].conj();
                for beta2 in 0..db {
                    acc += bconj * op[[row, a2 * db + beta2]] * b[beta2];
                }
            }
            m[[a, a2]] = acc;
        }
    }
    m
}

fn contract_right(op: &Array2<C64>, da: usize, db: usize, a: &Array1<C64>) -> Array2<C64> {
    let mut m = Array2::zeros((db, db));
    for beta in 0..db {
        for beta2 in 0..db {
            let mut acc = C64::new(0.0, 0.0);
            for ai in 0..da {
                let aconj = a[ai].conj();
                for aj in 0..da {
                    acc += aconj * op[[ai * db + beta, aj * db + beta2]] * a[aj];
                }
            }
            m[[beta, beta2]] = acc;
        }
    }
    m
}

fn extremal_eigenvector(m: &Array2<C64>, maximize: bool) -> Result<(f64, Array1<C64>)> {
    let (vals, vecs) = linalg::eigh(m)?;
    let idx = if maximize { vals.len() - 1 } else { 0 };
    Ok((vals[idx], vecs.column(idx).to_owned()))
}

/// Best value of <a b| K |a b> over product states found across restarts.
pub(crate) fn product_extremum(
    op: &Array2<C64>,
    da: usize,
    db: usize,
    maximize: bool,
    params: &SeeSawParams,
) -> Result<SeeSawOutcome> {
    let mut best: Option<SeeSawOutcome> = None;
    for restart in 0..params.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(restart as u64);
        let mut b = linalg::sample::random_unit_vector(&mut rng, db);
        let mut value = f64::NAN;
        let mut converged = false;
        for _ in 0..params.iterations {
            let ma = contract_left(op, da, db, &b);
            let (_, a) = extremal_eigenvector(&ma, maximize)?;
            let mb = contract_right(op, da, db, &a);
            let (vb, bnew) = extremal_eigenvector(&mb, maximize)?;
            b = bnew;
            if !value.is_nan() && (vb - value).abs() < params.convergence {
                value = vb;
                converged = true;
                break;
            }
            value = vb;
        }
        let better = match &best {
            None => true,
            Some(prev) => {
                if maximize {
                    value > prev.value
                } else {
                    value < prev.value
                }
            }
        };
        if better {
            best = Some(SeeSawOutcome { value, converged });
        }
    }
    Ok(best.expect("at least one restart"))
}
