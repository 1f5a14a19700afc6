//! Phase-1 simplex for small linear feasibility problems:
//! find q >= 0 with V q = c, or report infeasibility.
//!
//! Bland's pivoting rule keeps the method deterministic and cycle-free;
//! problem sizes here are a few dozen columns at most, so the dense
//! tableau is perfectly adequate.

/// Solve V q = c, q >= 0. `v` is row-major with `rows x cols` entries.
/// Returns the weights on success; `None` when the residual of the best
/// basic solution exceeds `residual_tol`.
pub(crate) fn feasible_nonnegative(
    v: &[f64],
    rows: usize,
    cols: usize,
    c: &[f64],
    residual_tol: f64,
) -> Option<Vec<f64>> {
    assert_eq!(v.len(), rows * cols);
    assert_eq!(c.len(), rows);

    // Tableau over structural columns, artificial columns and rhs.
    let width = cols + rows + 1;
    let mut t = vec![0.0_f64; rows * width];
    for r in 0..rows {
        let sign = if c[r] >= 0.0 { 1.0 } else { -1.0 };
        for j in 0..cols {
            t[r * width + j] = sign * v[r * cols + j];
        }
        t[r * width + cols + r] = 1.0;
        t[r * width + width - 1] = sign * c[r];
    }
    // basis[r] = column currently basic in row r (artificials initially).
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    // Objective: minimize the sum of artificials. Reduced costs kept as
    // z[j] = sum over rows of artificial-basis coefficients.
    let mut z = vec![0.0_f64; width];
    for r in 0..rows {
        for j in 0..width {
            z[j] += t[r * width + j];
        }
    }

    let pivot_eps = 1e-11;
    loop {
        // Bland: smallest index with positive reduced cost among
        // structural columns (artificials never re-enter).
        let mut enter = None;
        for j in 0..cols {
            if basis.contains(&j) {
                continue;
            }
            if z[j] > pivot_eps {
                enter = Some(j);
                break;
            }
        }
        let Some(enter) = enter else { break };

        // Ratio test, Bland tie-break on the leaving row's basis index.
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for r in 0..rows {
            let a = t[r * width + enter];
            if a > pivot_eps {
                let ratio = t[r * width + width - 1] / a;
                if ratio < best_ratio - 1e-12
                    || (ratio < best_ratio + 1e-12
                        && leave.map(|l| basis[r] < basis[l]).unwrap_or(false))
                {
                    best_ratio = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(leave) = leave else { break };

        // Pivot.
        let piv = t[leave * width + enter];
        for j in 0..width {
            t[leave * width + j] /= piv;
        }
        for r in 0..rows {
            if r == leave {
                continue;
            }
            let f = t[r * width + enter];
            if f != 0.0 {
                for j in 0..width {
                    t[r * width + j] -= f * t[leave * width + j];
                }
            }
        }
        let zf = z[enter];
        if zf != 0.0 {
            for j in 0..width {
                z[j] -= zf * t[leave * width + j];
            }
        }
        basis[leave] = enter;
    }

    // Extract weights and check the residual directly against V q = c.
    let mut q = vec![0.0_f64; cols];
    for r in 0..rows {
        if basis[r] < cols {
            q[basis[r]] = t[r * width + width - 1].max(0.0);
        }
    }
    let mut worst = 0.0_f64;
    for r in 0..rows {
        let mut acc = 0.0;
        for j in 0..cols {
            acc += v[r * cols + j] * q[j];
        }
        worst = worst.max((acc - c[r]).abs());
    }
    if worst <= residual_tol {
        Some(q)
    } else {
        None
    }
}
