//! Small fitting utilities: linear least squares over explicit basis
//! functions and a Gauss-Newton loop with Levenberg damping for the damped
//! cosine used in decoherence analysis.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("design matrix is rank deficient (pivot {0:e})")]
    RankDeficient(f64),
    #[error("fit did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("not enough data: need at least {need}, got {got}")]
    NotEnoughData { need: usize, got: usize },
}

/// Solve the dense linear system a·x = b in place by Gaussian elimination
/// with partial pivoting. `a` is row-major n x n.
pub(crate) fn solve_linear(a: &mut [f64], b: &mut [f64], n: usize) -> Result<Vec<f64>, FitError> {
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val < 1e-300 {
            return Err(FitError::RankDeficient(pivot_val));
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let inv = 1.0 / a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] * inv;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in (col + 1)..n {
            s -= a[col * n + k] * x[k];
        }
        x[col] = s / a[col * n + col];
    }
    Ok(x)
}

/// Result of a linear least-squares fit.
#[derive(Debug, Clone)]
pub struct LinearFit {
    pub coeffs: Vec<f64>,
    pub rms_residual: f64,
    /// 1-sigma uncertainty per coefficient from the residual-scaled normal
    /// matrix inverse.
    pub coeff_sigmas: Vec<f64>,
}

/// Linear least squares: find coefficients c minimizing ||design·c - y||².
/// `design` is row-major with one row per observation.
pub fn linear_least_squares(
    design: &[f64],
    y: &[f64],
    n_params: usize,
) -> Result<LinearFit, FitError> {
    let n_obs = y.len();
    if n_obs < n_params {
        return Err(FitError::NotEnoughData {
            need: n_params,
            got: n_obs,
        });
    }
    assert_eq!(design.len(), n_obs * n_params);
    // Normal equations: (XᵀX) c = Xᵀy. Rank deficiency shows up as a tiny
    // pivot relative to the diagonal scale.
    let mut xtx = vec![0.0; n_params * n_params];
    let mut xty = vec![0.0; n_params];
    for row in 0..n_obs {
        for i in 0..n_params {
            let di = design[row * n_params + i];
            xty[i] += di * y[row];
            for j in 0..n_params {
                xtx[i * n_params + j] += di * design[row * n_params + j];
            }
        }
    }
    let scale = (0..n_params)
        .map(|i| xtx[i * n_params + i])
        .fold(0.0f64, f64::max)
        .max(1e-300);
    // Reject near-singular systems before elimination masks them.
    for i in 0..n_params {
        if xtx[i * n_params + i] < 1e-12 * scale {
            return Err(FitError::RankDeficient(xtx[i * n_params + i]));
        }
    }
    let coeffs = solve_linear(&mut xtx.clone(), &mut xty.clone(), n_params)?;
    let mut rss = 0.0;
    for row in 0..n_obs {
        let mut pred = 0.0;
        for i in 0..n_params {
            pred += design[row * n_params + i] * coeffs[i];
        }
        rss += (y[row] - pred) * (y[row] - pred);
    }
    // Diagonal of (XᵀX)⁻¹ for the coefficient covariance, one solve per
    // basis vector.
    let dof = (n_obs as f64 - n_params as f64).max(1.0);
    let sigma2 = rss / dof;
    let mut coeff_sigmas = vec![0.0; n_params];
    for i in 0..n_params {
        let mut rhs = vec![0.0; n_params];
        rhs[i] = 1.0;
        let col = solve_linear(&mut xtx.clone(), &mut rhs, n_params)?;
        coeff_sigmas[i] = (sigma2 * col[i].max(0.0)).sqrt();
    }
    Ok(LinearFit {
        coeffs,
        rms_residual: (rss / n_obs as f64).sqrt(),
        coeff_sigmas,
    })
}

/// Result of the damped-cosine fit y = A·cos(2π ν t + φ)·exp(-t/T).
#[derive(Debug, Clone, Copy)]
pub struct DampedCosineFit {
    pub amplitude: f64,
    pub phase: f64,
    /// Fitted decay time, seconds. May exceed the data span or be infinite
    /// for undamped data; `exceeds_span` flags that case.
    pub decay_time: f64,
    /// 1-sigma uncertainty of the decay time from the fit covariance.
    pub decay_time_sigma: f64,
    pub exceeds_span: bool,
    pub rms_residual: f64,
}

/// Fit A·cos(2πνt + φ)·e^{-t/T} at fixed modulation frequency `nu_mod`.
///
/// Internally the model is (a·cos + b·sin)·e^{-u·t} with u = 1/T, solved by
/// Gauss-Newton with Levenberg damping; `u` is initialized from a linear fit
/// to the log envelope. At most 200 iterations, relative step tolerance
/// 1e-10.
pub fn fit_damped_cosine(
    times: &[f64],
    values: &[f64],
    nu_mod: f64,
) -> Result<DampedCosineFit, FitError> {
    const MAX_ITER: usize = 200;
    const STEP_TOL: f64 = 1e-10;
    let n = times.len();
    if n < 6 || n != values.len() {
        return Err(FitError::NotEnoughData { need: 6, got: n });
    }
    let span = times[n - 1] - times[0];
    let omega = std::f64::consts::TAU * nu_mod;
    let cs: Vec<f64> = times.iter().map(|&t| (omega * t).cos()).collect();
    let sn: Vec<f64> = times.iter().map(|&t| (omega * t).sin()).collect();

    // Log-envelope initialization: block maxima of |y| over one period,
    // straight-line fit of the log.
    let period = 1.0 / nu_mod;
    let mut env_t = Vec::new();
    let mut env_v = Vec::new();
    let mut block_start = times[0];
    let mut block_max = 0.0f64;
    let mut block_t = times[0];
    for (&t, &v) in times.iter().zip(values.iter()) {
        if t - block_start > period {
            if block_max > 0.0 {
                env_t.push(block_t);
                env_v.push(block_max);
            }
            block_start = t;
            block_max = 0.0;
        }
        if v.abs() > block_max {
            block_max = v.abs();
            block_t = t;
        }
    }
    if block_max > 0.0 {
        env_t.push(block_t);
        env_v.push(block_max);
    }
    let mut u = if env_t.len() >= 2 {
        let m = env_t.len() as f64;
        let sx: f64 = env_t.iter().sum();
        let sy: f64 = env_v.iter().map(|v| v.ln()).sum();
        let sxx: f64 = env_t.iter().map(|t| t * t).sum();
        let sxy: f64 = env_t
            .iter()
            .zip(env_v.iter())
            .map(|(t, v)| t * v.ln())
            .sum();
        let denom = m * sxx - sx * sx;
        if denom.abs() > 1e-300 {
            -(m * sxy - sx * sy) / denom
        } else {
            1.0 / span
        }
    } else {
        1.0 / span
    };
    if !u.is_finite() {
        u = 1.0 / span;
    }

    // Linear subproblem for (a, b) at fixed u.
    let solve_ab = |u: f64| -> Result<(f64, f64), FitError> {
        let mut design = Vec::with_capacity(2 * n);
        for i in 0..n {
            let e = (-u * times[i]).exp();
            design.push(cs[i] * e);
            design.push(sn[i] * e);
        }
        let fit = linear_least_squares(&design, values, 2)?;
        Ok((fit.coeffs[0], fit.coeffs[1]))
    };
    let (mut a, mut b) = solve_ab(u)?;

    let rss_of = |a: f64, b: f64, u: f64| -> f64 {
        (0..n)
            .map(|i| {
                let pred = (a * cs[i] + b * sn[i]) * (-u * times[i]).exp();
                (values[i] - pred) * (values[i] - pred)
            })
            .sum()
    };

    let mut lambda = 1e-3;
    let mut rss = rss_of(a, b, u);
    let mut converged = false;
    let mut jtj_diag_u = 1.0;
    for _ in 0..MAX_ITER {
        // Jacobian columns: d/da, d/db, d/du of the model.
        let mut jtj = [0.0f64; 9];
        let mut jtr = [0.0f64; 3];
        for i in 0..n {
            let e = (-u * times[i]).exp();
            let model = (a * cs[i] + b * sn[i]) * e;
            let r = values[i] - model;
            let j = [cs[i] * e, sn[i] * e, -times[i] * model];
            for p in 0..3 {
                jtr[p] += j[p] * r;
                for q in 0..3 {
                    jtj[p * 3 + q] += j[p] * j[q];
                }
            }
        }
        jtj_diag_u = jtj[8].max(1e-300);
        let mut step = None;
        for _ in 0..12 {
            let mut lhs = jtj;
            for p in 0..3 {
                lhs[p * 3 + p] *= 1.0 + lambda;
            }
            let mut rhs = jtr;
            match solve_linear(&mut lhs, &mut rhs, 3) {
                Ok(delta) => {
                    let (na, nb, nu) = (a + delta[0], b + delta[1], u + delta[2]);
                    let new_rss = rss_of(na, nb, nu);
                    if new_rss <= rss {
                        step = Some((na, nb, nu, new_rss, delta));
                        break;
                    }
                    lambda *= 10.0;
                }
                Err(_) => lambda *= 10.0,
            }
        }
        let Some((na, nb, nu, new_rss, delta)) = step else {
            break;
        };
        let rel_step = delta
            .iter()
            .zip([a.abs(), b.abs(), u.abs()])
            .map(|(d, s)| d.abs() / s.max(1e-12))
            .fold(0.0f64, f64::max);
        a = na;
        b = nb;
        u = nu;
        rss = new_rss;
        lambda = (lambda * 0.3).max(1e-12);
        if rel_step < STEP_TOL {
            converged = true;
            break;
        }
    }
    if !converged && rss > 1e-20 {
        // Accept slow convergence only when the residual is already at
        // numerical noise; otherwise report failure.
        let rel = rss.sqrt()
            / values
                .iter()
                .map(|v| v.abs())
                .fold(0.0f64, f64::max)
                .max(1e-300);
        if rel > 1e-6 && lambda >= 1e11 {
            return Err(FitError::NoConvergence(MAX_ITER));
        }
    }

    let amplitude = (a * a + b * b).sqrt();
    let phase = (-b).atan2(a);
    let decay_time = 1.0 / u;
    // Covariance of u from the converged normal matrix: var(u) ≈ σ²/(JᵀJ)_uu
    // (diagonal approximation); var(T) = var(u)/u⁴.
    let dof = (n as f64 - 3.0).max(1.0);
    let sigma2 = rss / dof;
    let var_u = sigma2 / jtj_diag_u;
    let decay_time_sigma = if u.abs() > 1e-300 {
        var_u.sqrt() / (u * u)
    } else {
        f64::INFINITY
    };
    let exceeds_span = decay_time.is_nan() || decay_time <= 0.0 || decay_time > span;
    Ok(DampedCosineFit {
        amplitude,
        phase,
        decay_time,
        decay_time_sigma,
        exceeds_span,
        rms_residual: (rss / n as f64).sqrt(),
    })
}
