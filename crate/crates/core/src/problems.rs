//! The four downlink beamforming problem instances as [`ProblemSpec`]
//! builders with their SINR and power evaluators.
//!
//! All SINR targets and powers are linear here; dB conversion lives at the
//! harness boundary. Statistical and instantaneous CSI both flow through the
//! same covariance interface (`R = hhᴴ` or `E[hhᴴ]`).
//!
//! Constraint conventions follow the printed problem rewrites: the classic
//! SINR constraint `d_i` is unnormalized while the RIS constraint `φ_i`
//! divides by the noise power. The scaling difference affects penalty
//! magnitudes, not feasibility sets.

use std::sync::Arc;

use num_complex::Complex64;

use crate::fa::{DecisionSet, ProblemSpec, Sense, VariableSpec};
use crate::numerics::{is_psd_within, quad_form_unchecked, ComplexMatrix, HERMITIAN_TOL};
use crate::{Error, Result};

/// PSD tolerance for scenario covariance validation.
const PSD_TOL: f64 = 1e-10;

fn validate_covariances(label: &str, mats: &[ComplexMatrix], dim: Option<usize>) -> Result<usize> {
    let mut m_t = dim;
    for (i, r) in mats.iter().enumerate() {
        if !r.is_square() {
            return Err(Error::InvalidConfig(format!(
                "{label}[{i}] must be square, got {}x{}",
                r.rows(),
                r.cols()
            )));
        }
        if let Some(d) = m_t {
            if r.rows() != d {
                return Err(Error::InvalidConfig(format!(
                    "{label}[{i}] is {}x{}, expected {d}x{d}",
                    r.rows(),
                    r.cols()
                )));
            }
        } else {
            m_t = Some(r.rows());
        }
        if !r.is_hermitian(HERMITIAN_TOL) || !is_psd_within(r, PSD_TOL) {
            return Err(Error::InvalidConfig(format!(
                "{label}[{i}] is not Hermitian PSD within tolerance"
            )));
        }
    }
    m_t.ok_or_else(|| Error::InvalidConfig(format!("{label} must not be empty")))
}

fn validate_positive(label: &str, values: &[f64], expected: usize) -> Result<()> {
    if values.len() != expected {
        return Err(Error::InvalidConfig(format!(
            "{label} has {} entries, expected {expected}",
            values.len()
        )));
    }
    if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidConfig(format!("{label} must be positive")));
    }
    Ok(())
}

/// Power-minimization beamforming under per-user SINR targets.
#[derive(Debug, Clone)]
pub struct ClassicScenario {
    /// Per-user channel covariances, Hermitian PSD `M_t×M_t`.
    pub r: Vec<ComplexMatrix>,
    /// Per-user noise powers (linear).
    pub sigma2: Vec<f64>,
    /// Per-user SINR targets (linear).
    pub gamma: Vec<f64>,
}

impl ClassicScenario {
    pub fn new(r: Vec<ComplexMatrix>, sigma2: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        let users = r.len();
        validate_covariances("R", &r, None)?;
        validate_positive("sigma2", &sigma2, users)?;
        validate_positive("gamma", &gamma, users)?;
        Ok(Self { r, sigma2, gamma })
    }

    pub fn users(&self) -> usize {
        self.r.len()
    }

    pub fn antennas(&self) -> usize {
        self.r[0].rows()
    }
}

/// Cognitive variant: secondary-user SINR targets plus interference caps at
/// primary users.
#[derive(Debug, Clone)]
pub struct CognitiveScenario {
    /// Covariances toward the secondary users.
    pub r_s: Vec<ComplexMatrix>,
    /// Covariances toward the primary users.
    pub r_p: Vec<ComplexMatrix>,
    pub sigma2: Vec<f64>,
    /// Secondary-user SINR targets (linear).
    pub eta: Vec<f64>,
    /// Tolerable interference per primary user (linear).
    pub i_to: Vec<f64>,
}

impl CognitiveScenario {
    pub fn new(
        r_s: Vec<ComplexMatrix>,
        r_p: Vec<ComplexMatrix>,
        sigma2: Vec<f64>,
        eta: Vec<f64>,
        i_to: Vec<f64>,
    ) -> Result<Self> {
        let users = r_s.len();
        let m_t = validate_covariances("R_s", &r_s, None)?;
        validate_covariances("R_p", &r_p, Some(m_t)).or_else(|e| {
            if r_p.is_empty() {
                Ok(m_t) // K = 0 is allowed
            } else {
                Err(e)
            }
        })?;
        validate_positive("sigma2", &sigma2, users)?;
        validate_positive("eta", &eta, users)?;
        validate_positive("i_to", &i_to, r_p.len())?;
        Ok(Self {
            r_s,
            r_p,
            sigma2,
            eta,
            i_to,
        })
    }

    pub fn users(&self) -> usize {
        self.r_s.len()
    }

    pub fn primary_users(&self) -> usize {
        self.r_p.len()
    }

    pub fn antennas(&self) -> usize {
        self.r_s[0].rows()
    }
}

/// RIS-aided beamforming: active beams at the BS plus a passive phase-shift
/// vector at the surface.
#[derive(Debug, Clone)]
pub struct RisScenario {
    /// Per-user cascade matrices `G_iᴴ = diag(g_i*)·Hᴴ`, each `N_t×M_t`.
    pub cascades: Vec<ComplexMatrix>,
    pub sigma2: Vec<f64>,
    /// SINR targets (linear).
    pub eta: Vec<f64>,
}

impl RisScenario {
    pub fn new(cascades: Vec<ComplexMatrix>, sigma2: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        let users = cascades.len();
        if users == 0 {
            return Err(Error::InvalidConfig("need at least one user".into()));
        }
        let shape = cascades[0].shape();
        if cascades.iter().any(|g| g.shape() != shape) {
            return Err(Error::InvalidConfig("cascade shapes differ".into()));
        }
        validate_positive("sigma2", &sigma2, users)?;
        validate_positive("eta", &eta, users)?;
        Ok(Self {
            cascades,
            sigma2,
            eta,
        })
    }

    pub fn users(&self) -> usize {
        self.cascades.len()
    }

    pub fn ris_elements(&self) -> usize {
        self.cascades[0].rows()
    }

    pub fn antennas(&self) -> usize {
        self.cascades[0].cols()
    }
}

/// RIS-aided wireless power transfer: maximize weighted harvested power under
/// a transmit budget and unit-modulus phase shifts.
#[derive(Debug, Clone)]
pub struct WptScenario {
    /// Per-receiver cascade matrices `G_iᴴ`, each `N_t×M_t`.
    pub cascades: Vec<ComplexMatrix>,
    /// Nonnegative harvest weights.
    pub alpha: Vec<f64>,
    /// Transmit power budget (linear).
    pub power_budget: f64,
}

impl WptScenario {
    pub fn new(cascades: Vec<ComplexMatrix>, alpha: Vec<f64>, power_budget: f64) -> Result<Self> {
        let users = cascades.len();
        if users == 0 {
            return Err(Error::InvalidConfig("need at least one receiver".into()));
        }
        let shape = cascades[0].shape();
        if cascades.iter().any(|g| g.shape() != shape) {
            return Err(Error::InvalidConfig("cascade shapes differ".into()));
        }
        if alpha.len() != users || alpha.iter().any(|&a| !(a >= 0.0) || !a.is_finite()) {
            return Err(Error::InvalidConfig(
                "alpha must be nonnegative, one per receiver".into(),
            ));
        }
        if !(power_budget > 0.0) {
            return Err(Error::InvalidConfig("power budget must be positive".into()));
        }
        Ok(Self {
            cascades,
            alpha,
            power_budget,
        })
    }

    pub fn users(&self) -> usize {
        self.cascades.len()
    }

    pub fn ris_elements(&self) -> usize {
        self.cascades[0].rows()
    }

    pub fn antennas(&self) -> usize {
        self.cascades[0].cols()
    }
}

/// Total transmit power `Σ_i w_iᴴw_i = ‖W‖_F²`.
pub fn total_power(w: &ComplexMatrix) -> f64 {
    w.entries().iter().map(|z| z.norm_sqr()).sum()
}

fn link_terms(w: &ComplexMatrix, r_i: &ComplexMatrix, i: usize) -> (f64, f64) {
    let mut signal = 0.0;
    let mut interference = 0.0;
    for j in 0..w.cols() {
        let q = quad_form_unchecked(&w.column(j), r_i);
        if j == i {
            signal = q;
        } else {
            interference += q;
        }
    }
    (signal.max(0.0), interference.max(0.0))
}

/// Own-signal and interference powers of user `i`: `(w_iᴴR_iw_i,
/// Σ_{j≠i}w_jᴴR_iw_j)`.
pub fn classic_link_terms(w: &ComplexMatrix, scenario: &ClassicScenario, i: usize) -> (f64, f64) {
    assert_eq!(w.rows(), scenario.antennas(), "beamformer row mismatch");
    assert_eq!(w.cols(), scenario.users(), "beamformer column mismatch");
    link_terms(w, &scenario.r[i], i)
}

/// Own-signal and interference powers of secondary user `t`.
pub fn cognitive_link_terms(
    w: &ComplexMatrix,
    scenario: &CognitiveScenario,
    t: usize,
) -> (f64, f64) {
    assert_eq!(w.rows(), scenario.antennas(), "beamformer row mismatch");
    assert_eq!(w.cols(), scenario.users(), "beamformer column mismatch");
    link_terms(w, &scenario.r_s[t], t)
}

/// SINR of user `i`: `w_iᴴR_i w_i / (Σ_{j≠i} w_jᴴR_i w_j + σ²_i)`.
pub fn sinr_classic(w: &ComplexMatrix, scenario: &ClassicScenario, i: usize) -> f64 {
    let (signal, interference) = classic_link_terms(w, scenario, i);
    signal / (interference + scenario.sigma2[i])
}

/// Classic constraint `d_i(W) = −w_iᴴR_iw_i + γ_i·Σ_{j≠i}w_jᴴR_iw_j + γ_iσ²_i`.
fn classic_constraint(w: &ComplexMatrix, scenario: &ClassicScenario, i: usize) -> f64 {
    let r_i = &scenario.r[i];
    let mut value = scenario.gamma[i] * scenario.sigma2[i];
    for j in 0..scenario.users() {
        let q = quad_form_unchecked(&w.column(j), r_i);
        if j == i {
            value -= q;
        } else {
            value += scenario.gamma[i] * q;
        }
    }
    value
}

/// Builds the classic power-minimization problem: objective `Σ w_iᴴw_i`,
/// inequalities `d_i(W) ≤ 0`, no equalities. The decision variable is the
/// stacked beamformer matrix `W`.
pub fn classic_problem(scenario: ClassicScenario) -> ProblemSpec {
    let scenario = Arc::new(scenario);
    let users = scenario.users();
    let m_t = scenario.antennas();
    let mut spec = ProblemSpec::new(
        vec![VariableSpec::new("W", m_t, users)],
        Sense::Minimize,
        |x: &DecisionSet| total_power(x.value(0)),
    )
    .expect("valid variable spec");
    for i in 0..users {
        let sc = Arc::clone(&scenario);
        spec = spec.with_inequality(move |x: &DecisionSet| classic_constraint(x.value(0), &sc, i));
    }
    spec
}

/// Interference at primary user `k`: `Σ_j w_jᴴ R_{p,k} w_j`.
pub fn primary_interference(w: &ComplexMatrix, scenario: &CognitiveScenario, k: usize) -> f64 {
    let r_p = &scenario.r_p[k];
    (0..scenario.users())
        .map(|j| quad_form_unchecked(&w.column(j), r_p))
        .sum()
}

/// SINR of secondary user `t` under the cognitive scenario.
pub fn sinr_cognitive(w: &ComplexMatrix, scenario: &CognitiveScenario, t: usize) -> f64 {
    let (signal, interference) = cognitive_link_terms(w, scenario, t);
    signal / (interference + scenario.sigma2[t])
}

/// Builds the cognitive problem: objective `Σ w_tᴴw_t`, SINR inequalities
/// `φ_t ≤ 0` followed by interference inequalities `φ_k ≤ 0`.
///
/// With `K = 0` this reduces exactly to [`classic_problem`]'s evaluators.
pub fn cognitive_problem(scenario: CognitiveScenario) -> ProblemSpec {
    let scenario = Arc::new(scenario);
    let users = scenario.users();
    let m_t = scenario.antennas();
    let mut spec = ProblemSpec::new(
        vec![VariableSpec::new("W", m_t, users)],
        Sense::Minimize,
        |x: &DecisionSet| total_power(x.value(0)),
    )
    .expect("valid variable spec");
    for t in 0..users {
        let sc = Arc::clone(&scenario);
        spec = spec.with_inequality(move |x: &DecisionSet| {
            let w = x.value(0);
            let r_t = &sc.r_s[t];
            let mut value = sc.eta[t] * sc.sigma2[t];
            for j in 0..sc.users() {
                let q = quad_form_unchecked(&w.column(j), r_t);
                if j == t {
                    value -= q;
                } else {
                    value += sc.eta[t] * q;
                }
            }
            value
        });
    }
    for k in 0..scenario.primary_users() {
        let sc = Arc::clone(&scenario);
        spec = spec.with_inequality(move |x: &DecisionSet| {
            primary_interference(x.value(0), &sc, k) - sc.i_to[k]
        });
    }
    spec
}

/// Received amplitude `θᴴ G_iᴴ w` through a cascade.
fn cascade_amplitude(theta: &ComplexMatrix, cascade: &ComplexMatrix, w: &ComplexMatrix) -> Complex64 {
    // cascade · w is N_t×1; then θᴴ·(·).
    let n_t = cascade.rows();
    let m_t = cascade.cols();
    let mut acc = Complex64::ZERO;
    for r in 0..n_t {
        let mut row = Complex64::ZERO;
        for c in 0..m_t {
            row += cascade[(r, c)] * w[(c, 0)];
        }
        acc += theta[(r, 0)].conj() * row;
    }
    acc
}

/// Own-signal and interference powers of user `i` through the RIS cascade.
pub fn ris_link_terms(
    w: &ComplexMatrix,
    theta: &ComplexMatrix,
    scenario: &RisScenario,
    i: usize,
) -> (f64, f64) {
    assert_eq!(w.rows(), scenario.antennas());
    assert_eq!(w.cols(), scenario.users());
    assert_eq!(theta.rows(), scenario.ris_elements());
    let g = &scenario.cascades[i];
    let mut signal = 0.0;
    let mut interference = 0.0;
    for j in 0..scenario.users() {
        let a = cascade_amplitude(theta, g, &w.column(j)).norm_sqr();
        if j == i {
            signal = a;
        } else {
            interference += a;
        }
    }
    (signal, interference)
}

/// SINR of user `i` in the RIS-aided link:
/// `|θᴴG_iᴴw_i|² / (Σ_{j≠i}|θᴴG_iᴴw_j|² + σ²_i)`.
pub fn sinr_ris(
    w: &ComplexMatrix,
    theta: &ComplexMatrix,
    scenario: &RisScenario,
    i: usize,
) -> f64 {
    let (signal, interference) = ris_link_terms(w, theta, scenario, i);
    signal / (interference + scenario.sigma2[i])
}

/// Builds the RIS-aided power-minimization problem over `{W, θ}`.
///
/// Inequalities are the noise-normalized SINR constraints
/// `φ_i = η_i·Σ_j|θᴴG_iᴴw_j|²/σ²_i + η_i − (1+η_i)·|θᴴG_iᴴw_i|²/σ²_i ≤ 0`
/// followed by the per-element magnitude bounds `|θ_k| − 1 ≤ 0`.
pub fn ris_problem(scenario: RisScenario) -> ProblemSpec {
    let scenario = Arc::new(scenario);
    let users = scenario.users();
    let m_t = scenario.antennas();
    let n_t = scenario.ris_elements();
    let mut spec = ProblemSpec::new(
        vec![
            VariableSpec::new("W", m_t, users),
            VariableSpec::unit_modulus("theta", n_t, 1),
        ],
        Sense::Minimize,
        |x: &DecisionSet| total_power(x.value(0)),
    )
    .expect("valid variable spec");
    for i in 0..users {
        let sc = Arc::clone(&scenario);
        spec = spec.with_inequality(move |x: &DecisionSet| {
            let w = x.value(0);
            let theta = x.value(1);
            let g = &sc.cascades[i];
            let eta = sc.eta[i];
            let sigma2 = sc.sigma2[i];
            let mut total = 0.0;
            let mut own = 0.0;
            for j in 0..sc.users() {
                let a = cascade_amplitude(theta, g, &w.column(j)).norm_sqr();
                total += a;
                if j == i {
                    own = a;
                }
            }
            eta * total / sigma2 + eta - (1.0 + eta) * own / sigma2
        });
    }
    for k in 0..n_t {
        spec = spec.with_inequality(move |x: &DecisionSet| x.value(1)[(k, 0)].norm() - 1.0);
    }
    spec
}

/// Weighted harvested power `Σ_i α_i Σ_j w_jᴴ G_i θ θᴴ G_iᴴ w_j`.
pub fn wpt_objective(w: &ComplexMatrix, theta: &ComplexMatrix, scenario: &WptScenario) -> f64 {
    assert_eq!(w.rows(), scenario.antennas());
    assert_eq!(theta.rows(), scenario.ris_elements());
    let mut total = 0.0;
    for (i, g) in scenario.cascades.iter().enumerate() {
        if scenario.alpha[i] == 0.0 {
            continue;
        }
        let mut sum = 0.0;
        for j in 0..w.cols() {
            sum += cascade_amplitude(theta, g, &w.column(j)).norm_sqr();
        }
        total += scenario.alpha[i] * sum;
    }
    total
}

/// Builds the power-transfer problem over `{W, θ}`: maximize the weighted
/// harvested power under `Σ_j w_jᴴw_j ≤ P` and `|θ_k| = 1` equalities
/// (penalized without the max clamp, as equalities are).
pub fn wpt_problem(scenario: WptScenario) -> ProblemSpec {
    let scenario = Arc::new(scenario);
    let users = scenario.users();
    let m_t = scenario.antennas();
    let n_t = scenario.ris_elements();
    let budget = scenario.power_budget;
    let obj_sc = Arc::clone(&scenario);
    let mut spec = ProblemSpec::new(
        vec![
            VariableSpec::new("W", m_t, users),
            VariableSpec::unit_modulus("theta", n_t, 1),
        ],
        Sense::Maximize,
        move |x: &DecisionSet| wpt_objective(x.value(0), x.value(1), &obj_sc),
    )
    .expect("valid variable spec");
    spec = spec.with_inequality(move |x: &DecisionSet| total_power(x.value(0)) - budget);
    for k in 0..n_t {
        spec = spec.with_equality(move |x: &DecisionSet| x.value(1)[(k, 0)].norm() - 1.0);
    }
    spec
}

/// Projects phase shifts onto the unit circle: `θ_k/|θ_k|`, with zero mapped
/// to one. Used for hardware-valid reporting; the penalized search itself
/// never projects.
pub fn project_unit_modulus(theta: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(theta.rows(), theta.cols(), |r, c| {
        let z = theta[(r, c)];
        if z.norm() <= f64::MIN_POSITIVE {
            Complex64::ONE
        } else {
            z / z.norm()
        }
    })
}
