//! Deterministic reference solvers: the uplink-downlink duality iteration for
//! the classic problem and the closed-form SCA iteration for RIS-aided power
//! transfer.

use num_complex::Complex64;

use crate::numerics::{
    dominant_eigvec, max_eig_hermitian, quad_form_unchecked, solve_hpd, ComplexMatrix,
};
use crate::problems::{wpt_objective, ClassicScenario, WptScenario};
use crate::{Error, Result};

/// State of the dual-uplink fixed-point iteration.
#[derive(Debug, Clone)]
pub struct DualityState {
    /// Dual uplink powers, entrywise positive after the first update.
    pub p: Vec<f64>,
    /// Unit-norm uplink beamforming directions.
    pub w_hat: Vec<ComplexMatrix>,
    /// Iterations actually performed.
    pub iteration: usize,
}

/// State of the SCA solve for the power-transfer problem.
#[derive(Debug, Clone)]
pub struct ScaState {
    /// Common energy beam, `‖w‖² = P` up to eigenvector normalization error.
    pub w: ComplexMatrix,
    /// Unit-modulus phase shifts.
    pub theta: ComplexMatrix,
    /// Objective after each iteration (non-decreasing).
    pub objective_history: Vec<f64>,
}

/// `Q_i(p) = Σ_{t≠i} p_t R_t + σ²_i I`.
fn uplink_covariance(scenario: &ClassicScenario, p: &[f64], i: usize) -> ComplexMatrix {
    let m_t = scenario.antennas();
    let mut q = ComplexMatrix::zeros(m_t, m_t);
    for (t, r_t) in scenario.r.iter().enumerate() {
        if t == i {
            continue;
        }
        for row in 0..m_t {
            for col in 0..m_t {
                q[(row, col)] += r_t[(row, col)].scale(p[t]);
            }
        }
    }
    for d in 0..m_t {
        q[(d, d)] += Complex64::new(scenario.sigma2[i], 0.0);
    }
    q
}

/// Dominant eigenvector of `p_i·Q_i⁻¹(p)·R_i` plus the interference ratio
/// `t_i(p) = ŵᴴQ_iŵ / ŵᴴR_iŵ`.
fn uplink_step(
    scenario: &ClassicScenario,
    p: &[f64],
    i: usize,
) -> Result<(ComplexMatrix, f64)> {
    let q = uplink_covariance(scenario, p, i);
    let r_i = &scenario.r[i];
    let m_t = scenario.antennas();
    // G_i = p_i·Q_i⁻¹·R_i, column by column through the Cholesky solve.
    let mut g = ComplexMatrix::zeros(m_t, m_t);
    for c in 0..m_t {
        let col = solve_hpd(&q, &r_i.column(c))?;
        for row in 0..m_t {
            g[(row, c)] = col[(row, 0)].scale(p[i]);
        }
    }
    let eig = dominant_eigvec(&g, 1e-12, 4000)?;
    let w_hat = eig.vector;
    let denom = quad_form_unchecked(&w_hat, r_i);
    if denom <= f64::MIN_POSITIVE * 16.0 {
        return Err(Error::DegenerateChannel { user: i });
    }
    let t_i = quad_form_unchecked(&w_hat, &q) / denom;
    Ok((w_hat, t_i))
}

/// Runs the duality iteration: `p ← Γ·t(p)` with MVDR-style directions, then
/// returns `W` with `w_i = √p_i·ŵ_i` (dual powers assigned directly, exactly
/// as printed) alongside the final state.
///
/// `early_exit`: optional relative fixed-point residual threshold; `None`
/// runs all `t` iterations.
pub fn duality_solve(
    scenario: &ClassicScenario,
    t: usize,
    p0: &[f64],
    early_exit: Option<f64>,
) -> Result<(ComplexMatrix, DualityState)> {
    let users = scenario.users();
    if p0.len() != users || p0.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::InvalidConfig(
            "p0 must be entrywise positive with one entry per user".into(),
        ));
    }
    if t == 0 {
        return Err(Error::InvalidConfig("need at least one iteration".into()));
    }
    let mut p = p0.to_vec();
    let mut iterations = 0;
    for _ in 0..t {
        let mut next = vec![0.0; users];
        for i in 0..users {
            let (_, t_i) = uplink_step(scenario, &p, i)?;
            next[i] = scenario.gamma[i] * t_i;
        }
        iterations += 1;
        let diff: f64 = next
            .iter()
            .zip(&p)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale: f64 = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        p = next;
        if let Some(tol) = early_exit {
            if diff <= tol * scale.max(f64::MIN_POSITIVE) {
                break;
            }
        }
    }
    // Directions at the final powers.
    let mut w_hat = Vec::with_capacity(users);
    for i in 0..users {
        let (w, _) = uplink_step(scenario, &p, i)?;
        w_hat.push(w);
    }
    let m_t = scenario.antennas();
    let mut w = ComplexMatrix::zeros(m_t, users);
    for i in 0..users {
        w.set_column(i, &w_hat[i].scale_real(p[i].sqrt()));
    }
    Ok((
        w,
        DualityState {
            p,
            w_hat,
            iteration: iterations,
        },
    ))
}

/// Relative fixed-point residual `‖p − Γ·t(p)‖ / ‖p‖` of a duality state.
pub fn duality_residual(scenario: &ClassicScenario, state: &DualityState) -> Result<f64> {
    let users = scenario.users();
    let mut mapped = vec![0.0; users];
    for i in 0..users {
        let (_, t_i) = uplink_step(scenario, &state.p, i)?;
        mapped[i] = scenario.gamma[i] * t_i;
    }
    let num: f64 = mapped
        .iter()
        .zip(&state.p)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let den: f64 = state.p.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(num / den.max(f64::MIN_POSITIVE))
}

/// Recovers downlink powers for fixed unit directions by making every SINR
/// constraint tight, returning `W` with `sinr_classic(W, i) = γ_i` within
/// 1e-8.
///
/// The dual powers from [`duality_solve`] do not generally satisfy the
/// downlink constraints; this solves the U×U linear system that does. Fails
/// when the system is singular or yields a non-positive power.
pub fn downlink_power_recovery(
    scenario: &ClassicScenario,
    w_hat: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    let users = scenario.users();
    if w_hat.len() != users {
        return Err(Error::InvalidConfig(format!(
            "{} directions for {} users",
            w_hat.len(),
            users
        )));
    }
    // a[i][j] = ŵ_jᴴ R_i ŵ_j.
    let mut a = vec![vec![0.0; users]; users];
    for i in 0..users {
        for j in 0..users {
            a[i][j] = quad_form_unchecked(&w_hat[j], &scenario.r[i]);
        }
    }
    // Tight constraints: q_i·a[i][i] − γ_i·Σ_{j≠i} q_j·a[i][j] = γ_i·σ²_i.
    let mut system = vec![vec![0.0; users + 1]; users];
    for i in 0..users {
        for j in 0..users {
            system[i][j] = if i == j {
                a[i][i]
            } else {
                -scenario.gamma[i] * a[i][j]
            };
        }
        system[i][users] = scenario.gamma[i] * scenario.sigma2[i];
    }
    let q = solve_real_system(&mut system)?;
    for (i, &qi) in q.iter().enumerate() {
        if !(qi > 0.0) || !qi.is_finite() {
            return Err(Error::InfeasibleRecovery { user: i, power: qi });
        }
    }
    let m_t = scenario.antennas();
    let mut w = ComplexMatrix::zeros(m_t, users);
    for i in 0..users {
        w.set_column(i, &w_hat[i].scale_real(q[i].sqrt()));
    }
    Ok(w)
}

/// Gaussian elimination with partial pivoting on an augmented system.
fn solve_real_system(system: &mut [Vec<f64>]) -> Result<Vec<f64>> {
    let n = system.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&a, &b| {
                system[a][col]
                    .abs()
                    .partial_cmp(&system[b][col].abs())
                    .unwrap()
            })
            .unwrap();
        if system[pivot_row][col].abs() <= f64::MIN_POSITIVE * 16.0 {
            return Err(Error::SingularSystem { index: col });
        }
        system.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = system[row][col] / system[col][col];
            for k in col..=n {
                system[row][k] -= factor * system[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = system[row][n];
        for k in row + 1..n {
            s -= system[row][k] * x[k];
        }
        x[row] = s / system[row][row];
    }
    Ok(x)
}

/// Closed-form SCA iteration for the power-transfer problem.
///
/// Each iteration sets the common beam to `√P` times the principal unit
/// eigenvector of `Σ_i α_i G_i θ θᴴ G_iᴴ`, then aligns each phase shift with
/// `μ_k = [Σ_i α_i G_iᴴ w wᴴ G_i θ]_k` (`μ_k = 0` maps to 1). The objective
/// history records the harvested power with the single common beam after each
/// iteration and is non-decreasing.
pub fn sca_wpt_solve(
    scenario: &WptScenario,
    theta0: &ComplexMatrix,
    m0: usize,
) -> Result<ScaState> {
    let n_t = scenario.ris_elements();
    let m_t = scenario.antennas();
    if theta0.shape() != (n_t, 1) {
        return Err(Error::DimensionMismatch {
            op: "sca_wpt_solve",
            details: format!("theta0 is {}x{}, expected {n_t}x1", theta0.rows(), theta0.cols()),
        });
    }
    if theta0
        .entries()
        .iter()
        .any(|z| (z.norm() - 1.0).abs() > 1e-9)
    {
        return Err(Error::InvalidConfig(
            "theta0 entries must be unit modulus".into(),
        ));
    }
    if m0 == 0 {
        return Err(Error::InvalidConfig("m0 must be at least 1".into()));
    }

    let sqrt_p = scenario.power_budget.sqrt();
    let mut theta = theta0.clone();
    let mut w = ComplexMatrix::zeros(m_t, 1);
    let mut history = Vec::with_capacity(m0);
    for _ in 0..m0 {
        // u_i = G_i θ; beam matrix A = Σ α_i u_i u_iᴴ.
        let mut a = ComplexMatrix::zeros(m_t, m_t);
        for (i, cascade) in scenario.cascades.iter().enumerate() {
            if scenario.alpha[i] == 0.0 {
                continue;
            }
            let u = cascade.hermitian().matmul(&theta)?;
            let outer = u.outer().scale_real(scenario.alpha[i]);
            a = a.add(&outer)?;
        }
        let eig = max_eig_hermitian(&a)?;
        w = eig.vector.scale_real(sqrt_p);

        // μ = Σ α_i G_iᴴ w wᴴ G_i θ = Σ α_i (G_iᴴw)·(wᴴ·G_iθ).
        let mut mu = ComplexMatrix::zeros(n_t, 1);
        for (i, cascade) in scenario.cascades.iter().enumerate() {
            if scenario.alpha[i] == 0.0 {
                continue;
            }
            let v = cascade.matmul(&w)?; // G_iᴴ w
            let u = cascade.hermitian().matmul(&theta)?; // G_i θ
            let s = w.dot(&u) * scenario.alpha[i];
            mu = mu.add(&v.scale(s))?;
        }
        theta = ComplexMatrix::from_fn(n_t, 1, |k, _| {
            let m = mu[(k, 0)];
            if m.norm() <= f64::MIN_POSITIVE {
                Complex64::ONE
            } else {
                m / m.norm()
            }
        });
        history.push(wpt_objective(&w, &theta, scenario));
    }
    Ok(ScaState {
        w,
        theta,
        objective_history: history,
    })
}
