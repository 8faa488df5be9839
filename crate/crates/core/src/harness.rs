//! Monte Carlo experiment runner, complexity-order estimators,
//! radiation-pattern export, and CSV/JSON result emission.
//!
//! Trials execute in parallel with independent derived seeds; row order and
//! every field except wall time are deterministic for a fixed base seed.

use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{downlink_power_recovery, duality_solve, sca_wpt_solve};
use crate::channels::{
    build_scenario, lin_to_db, BuiltScenario, GeneratedScenario, ScenarioConfig, ScenarioKind,
};
use crate::fa::{
    run_fa, DecisionSet, FAConfig, PenaltyWeights, ProblemSpec, Randomization, SolveTrace,
};
use crate::numerics::ComplexMatrix;
use crate::problems::{
    classic_link_terms, classic_problem, cognitive_link_terms, cognitive_problem,
    primary_interference, project_unit_modulus, ris_link_terms, ris_problem, total_power,
    wpt_objective, wpt_problem, ClassicScenario, CognitiveScenario, RisScenario, WptScenario,
};
use crate::{Error, Result};

/// Relative violation above which a firefly solution is flagged infeasible
/// and excluded from mean aggregation.
pub const FEASIBILITY_THRESHOLD: f64 = 1e-3;

/// Convergence rule for best-objective traces: relative change below 1e-3
/// over this many consecutive generations.
const CONVERGENCE_WINDOW: usize = 5;
const CONVERGENCE_REL_TOL: f64 = 1e-3;

/// Iterations of the as-printed duality baseline in experiment rows.
const DUALITY_ITERATIONS: usize = 30;
/// Iterations of the SCA baseline.
const SCA_ITERATIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Fa,
    IterativePrinted,
    IterativeRecovered,
    Sca,
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolverKind::Fa => "fa",
            SolverKind::IterativePrinted => "iterative_printed",
            SolverKind::IterativeRecovered => "iterative_recovered",
            SolverKind::Sca => "sca",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fa" => Ok(SolverKind::Fa),
            "iterative_printed" => Ok(SolverKind::IterativePrinted),
            "iterative_recovered" => Ok(SolverKind::IterativeRecovered),
            "sca" => Ok(SolverKind::Sca),
            other => Err(Error::InvalidConfig(format!("unknown solver `{other}`"))),
        }
    }
}

/// Which quantity the experiment sweeps.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    SinrDb(Vec<f64>),
    Generations(Vec<usize>),
    Population(Vec<usize>),
    PowerDbm(Vec<f64>),
}

impl SweepAxis {
    pub fn len(&self) -> usize {
        match self {
            SweepAxis::SinrDb(v) | SweepAxis::PowerDbm(v) => v.len(),
            SweepAxis::Generations(v) | SweepAxis::Population(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, i: usize) -> f64 {
        match self {
            SweepAxis::SinrDb(v) | SweepAxis::PowerDbm(v) => v[i],
            SweepAxis::Generations(v) | SweepAxis::Population(v) => v[i] as f64,
        }
    }
}

/// Firefly parameter overrides; unset fields take per-kind defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FaSettings {
    pub population: Option<usize>,
    pub generations: Option<usize>,
    pub alpha0: Option<f64>,
    pub alpha_decay: Option<f64>,
    pub beta0: Option<f64>,
    pub gamma: Option<f64>,
    pub uniform_randomization: bool,
}

/// Full description of one Monte Carlo experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub kind: ScenarioKind,
    pub sweep: SweepAxis,
    pub trials: usize,
    pub solvers: Vec<SolverKind>,
    pub base_seed: u64,
    #[serde(default)]
    pub fa: FaSettings,
    pub scenario: ScenarioConfig,
}

impl ExperimentPlan {
    /// Single-sweep-point plan with per-kind scenario defaults.
    pub fn single_point(kind: ScenarioKind) -> Self {
        let scenario = ScenarioConfig::defaults_for(kind);
        let sweep = match kind {
            ScenarioKind::Wpt => SweepAxis::PowerDbm(vec![scenario.power_dbm]),
            _ => SweepAxis::SinrDb(vec![scenario.sinr_db]),
        };
        Self {
            kind,
            sweep,
            trials: 50,
            solvers: vec![SolverKind::Fa],
            base_seed: 1,
            fa: FaSettings::default(),
            scenario,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.solvers.is_empty() {
            return Err(Error::InvalidConfig("need at least one solver".into()));
        }
        if self.sweep.is_empty() {
            return Err(Error::InvalidConfig("sweep must have at least one point".into()));
        }
        for &s in &self.solvers {
            let ok = match self.kind {
                ScenarioKind::Classic => matches!(
                    s,
                    SolverKind::Fa | SolverKind::IterativePrinted | SolverKind::IterativeRecovered
                ),
                ScenarioKind::Cognitive | ScenarioKind::Ris => matches!(s, SolverKind::Fa),
                ScenarioKind::Wpt => matches!(s, SolverKind::Fa | SolverKind::Sca),
            };
            if !ok {
                return Err(Error::InvalidConfig(format!(
                    "solver {s} is not available for the {} scenario",
                    self.kind
                )));
            }
        }
        Ok(())
    }

    fn resolved_at(&self, sweep_idx: usize) -> (ScenarioConfig, FaSettings) {
        let mut config = self.scenario.clone();
        let mut fa = self.fa.clone();
        match &self.sweep {
            SweepAxis::SinrDb(v) => config.sinr_db = v[sweep_idx],
            SweepAxis::PowerDbm(v) => config.power_dbm = v[sweep_idx],
            SweepAxis::Generations(v) => fa.generations = Some(v[sweep_idx]),
            SweepAxis::Population(v) => fa.population = Some(v[sweep_idx]),
        }
        (config, fa)
    }
}

/// One solver result at one trial and sweep point.
///
/// `objective_linear` is in watts for link-budget scenarios (normalized units
/// otherwise); `objective_db = 10·log10(objective_linear)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRow {
    pub trial: usize,
    pub sweep: f64,
    pub solver: SolverKind,
    pub objective_db: f64,
    pub objective_linear: f64,
    pub max_violation: f64,
    pub generations: usize,
    pub wall_ms: f64,
}

fn default_population(kind: ScenarioKind) -> usize {
    match kind {
        ScenarioKind::Classic => 30,
        ScenarioKind::Cognitive => 100,
        ScenarioKind::Ris => 120,
        ScenarioKind::Wpt => 100,
    }
}

fn default_generations(kind: ScenarioKind) -> usize {
    match kind {
        ScenarioKind::Classic => 150,
        ScenarioKind::Cognitive => 150,
        ScenarioKind::Ris => 60,
        ScenarioKind::Wpt => 50,
    }
}

fn derive_seed(base: u64, trial: usize, sweep_idx: usize) -> u64 {
    let mut z = base
        ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (sweep_idx as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generation at which a best-objective trace levels off per the harness
/// convergence rule, or the trace length if it never does.
pub fn convergence_generation(trace: &[f64]) -> usize {
    for g in CONVERGENCE_WINDOW..trace.len() {
        let prev = trace[g - CONVERGENCE_WINDOW];
        let cur = trace[g];
        if (prev - cur).abs() <= CONVERGENCE_REL_TOL * prev.abs().max(1e-12) {
            return g + 1;
        }
    }
    trace.len()
}

/// A reported firefly solve: the decision set after feasibility repair (or
/// projection, for the power-transfer problem), its objective in search
/// units, the worst relative constraint violation of the reported solution,
/// and convergence bookkeeping.
#[derive(Debug, Clone)]
pub struct FaSolve {
    pub reported: DecisionSet,
    pub objective_search: f64,
    pub violation: f64,
    pub convergence_generation: usize,
    pub trace: SolveTrace,
}

fn resolved_fa_config(
    kind: ScenarioKind,
    problem: &ProblemSpec,
    built: &BuiltScenario,
    settings: &FaSettings,
    seed: u64,
) -> FAConfig {
    let n_vars = problem.variables().len();
    let population = settings.population.unwrap_or_else(|| default_population(kind));
    let generations = settings
        .generations
        .unwrap_or_else(|| default_generations(kind));
    let mut config = FAConfig::paper_defaults(n_vars, population, generations, seed ^ 0xFA5E_ED01);
    if let Some(a0) = settings.alpha0 {
        config.alpha0 = a0;
    }
    if let Some(d) = settings.alpha_decay {
        config.alpha_decay = d;
    }
    if let Some(b) = settings.beta0 {
        config.beta0 = vec![b; n_vars];
    }
    if let Some(g) = settings.gamma {
        config.gamma = vec![g; n_vars];
    }
    if settings.uniform_randomization {
        config.randomization = Randomization::Uniform;
    }
    let spec0 = &problem.variables()[0];
    let beam_scale =
        (built.units.power_hint / (spec0.rows * spec0.cols) as f64).sqrt();
    config.init_scale = std::iter::once(beam_scale)
        .chain(std::iter::repeat(1.0))
        .take(n_vars)
        .collect();
    config
}

fn classic_violation(scen: &ClassicScenario, w: &ComplexMatrix) -> f64 {
    (0..scen.users())
        .map(|i| {
            let (signal, interference) = classic_link_terms(w, scen, i);
            let sinr = signal / (interference + scen.sigma2[i]);
            ((scen.gamma[i] - sinr) / scen.gamma[i]).max(0.0)
        })
        .fold(0.0, f64::max)
}

/// Smallest `c² ≥ 1` such that scaling `W` by `c` meets every SINR target;
/// `None` when some user is interference-limited below its target.
fn sinr_repair_scale(
    terms: impl Iterator<Item = (f64, f64, f64, f64)>, // (signal, interference, target, sigma2)
) -> Option<f64> {
    let mut c2: f64 = 1.0;
    for (signal, interference, target, sigma2) in terms {
        let margin = signal - target * interference;
        if margin <= 0.0 {
            return None;
        }
        c2 = c2.max(target * sigma2 / margin);
    }
    Some(c2)
}

fn scale_variable(x: &DecisionSet, index: usize, factor: f64) -> DecisionSet {
    let vars = x
        .variables()
        .iter()
        .enumerate()
        .map(|(i, (name, value))| {
            let v = if i == index {
                value.scale_real(factor)
            } else {
                value.clone()
            };
            (name.clone(), v)
        })
        .collect();
    DecisionSet::new(vars).expect("names unchanged")
}

fn replace_variable(x: &DecisionSet, index: usize, value: ComplexMatrix) -> DecisionSet {
    let vars = x
        .variables()
        .iter()
        .enumerate()
        .map(|(i, (name, v))| {
            let v = if i == index { value.clone() } else { v.clone() };
            (name.clone(), v)
        })
        .collect();
    DecisionSet::new(vars).expect("names unchanged")
}

fn report_classic(scen: &ClassicScenario, best: &DecisionSet) -> (DecisionSet, f64, f64) {
    let w = best.value(0);
    let raw = classic_violation(scen, w);
    if raw == 0.0 {
        return (best.clone(), total_power(w), 0.0);
    }
    // Penalty methods land epsilon-infeasible; scale up to the targets
    // whenever the directions allow it and record what remains.
    let terms = (0..scen.users()).map(|i| {
        let (s, n) = classic_link_terms(w, scen, i);
        (s, n, scen.gamma[i], scen.sigma2[i])
    });
    if let Some(c2) = sinr_repair_scale(terms) {
        let repaired = scale_variable(best, 0, c2.sqrt());
        let viol = classic_violation(scen, repaired.value(0));
        return (repaired.clone(), total_power(repaired.value(0)), viol);
    }
    (best.clone(), total_power(w), raw)
}

fn cognitive_violation(scen: &CognitiveScenario, w: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for t in 0..scen.users() {
        let (signal, interference) = cognitive_link_terms(w, scen, t);
        let sinr = signal / (interference + scen.sigma2[t]);
        worst = worst.max(((scen.eta[t] - sinr) / scen.eta[t]).max(0.0));
    }
    for k in 0..scen.primary_users() {
        let i = primary_interference(w, scen, k);
        worst = worst.max(((i - scen.i_to[k]) / scen.i_to[k]).max(0.0));
    }
    worst
}

fn report_cognitive(scen: &CognitiveScenario, best: &DecisionSet) -> (DecisionSet, f64, f64) {
    let w = best.value(0);
    let raw = cognitive_violation(scen, w);
    if raw == 0.0 {
        return (best.clone(), total_power(w), 0.0);
    }
    let terms = (0..scen.users()).map(|t| {
        let (s, n) = cognitive_link_terms(w, scen, t);
        (s, n, scen.eta[t], scen.sigma2[t])
    });
    if let Some(needed) = sinr_repair_scale(terms) {
        // Scaling up must not break the interference caps; scale as far as
        // they allow and record what remains.
        let cap = (0..scen.primary_users())
            .map(|k| scen.i_to[k] / primary_interference(w, scen, k))
            .fold(f64::INFINITY, f64::min);
        let c2 = needed.min(cap).max(1.0);
        let repaired = scale_variable(best, 0, c2.sqrt());
        let viol = cognitive_violation(scen, repaired.value(0));
        return (repaired.clone(), total_power(repaired.value(0)), viol);
    }
    (best.clone(), total_power(w), raw)
}

fn ris_violation(scen: &RisScenario, w: &ComplexMatrix, theta: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..scen.users() {
        let (signal, interference) = ris_link_terms(w, theta, scen, i);
        let sinr = signal / (interference + scen.sigma2[i]);
        worst = worst.max(((scen.eta[i] - sinr) / scen.eta[i]).max(0.0));
    }
    for z in theta.entries() {
        worst = worst.max(z.norm() - 1.0);
    }
    worst
}

fn report_ris(scen: &RisScenario, best: &DecisionSet) -> (DecisionSet, f64, f64) {
    let w = best.value(0);
    let theta = best.value(1);
    let raw = ris_violation(scen, w, theta);
    if raw == 0.0 {
        return (best.clone(), total_power(w), 0.0);
    }
    // Clamp overshooting phase magnitudes onto the unit circle, then scale
    // the beams up to the SINR targets.
    let clamped = ComplexMatrix::from_fn(theta.rows(), 1, |k, _| {
        let z = theta[(k, 0)];
        if z.norm() > 1.0 {
            z / z.norm()
        } else {
            z
        }
    });
    let terms = (0..scen.users()).map(|i| {
        let (s, n) = ris_link_terms(w, &clamped, scen, i);
        (s, n, scen.eta[i], scen.sigma2[i])
    });
    if let Some(c2) = sinr_repair_scale(terms) {
        let mut repaired = replace_variable(best, 1, clamped);
        repaired = scale_variable(&repaired, 0, c2.sqrt());
        let viol = ris_violation(scen, repaired.value(0), repaired.value(1));
        return (repaired.clone(), total_power(repaired.value(0)), viol);
    }
    let reported = replace_variable(best, 1, clamped);
    let viol = ris_violation(scen, reported.value(0), reported.value(1));
    (reported.clone(), total_power(reported.value(0)), viol)
}

fn report_wpt(scen: &WptScenario, best: &DecisionSet) -> (DecisionSet, f64, f64) {
    // Hardware-valid report: project the phases onto the unit circle and
    // scale the beams down onto the budget when they exceed it. The raw
    // penalized search never projects.
    let w = best.value(0);
    let theta_proj = project_unit_modulus(best.value(1));
    let power = total_power(w);
    let w_rep = if power > scen.power_budget {
        w.scale_real((scen.power_budget / power).sqrt())
    } else {
        w.clone()
    };
    let objective = wpt_objective(&w_rep, &theta_proj, scen);
    let mut reported = replace_variable(best, 0, w_rep);
    reported = replace_variable(&reported, 1, theta_proj);
    let viol = {
        let w = reported.value(0);
        let theta = reported.value(1);
        let budget = ((total_power(w) - scen.power_budget) / scen.power_budget).max(0.0);
        let modulus = theta
            .entries()
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        budget.max(modulus)
    };
    (reported, objective, viol)
}

/// Runs the firefly solver on a built scenario and applies the reporting
/// convention for its kind.
pub fn solve_fa(built: &BuiltScenario, settings: &FaSettings, seed: u64) -> Result<FaSolve> {
    let (problem, weights) = match &built.scenario {
        GeneratedScenario::Classic(s) => {
            let p = classic_problem(s.clone());
            let w = PenaltyWeights::generation_squared(p.n_inequalities(), p.n_equalities());
            (p, w)
        }
        GeneratedScenario::Cognitive(s) => {
            let p = cognitive_problem(s.clone());
            let w = PenaltyWeights::generation_squared(p.n_inequalities(), p.n_equalities());
            (p, w)
        }
        GeneratedScenario::Ris(s) => {
            let p = ris_problem(s.clone());
            let w = PenaltyWeights::generation_squared(p.n_inequalities(), p.n_equalities());
            (p, w)
        }
        GeneratedScenario::Wpt(s) => {
            let p = wpt_problem(s.clone());
            let w = PenaltyWeights::generation_squared(p.n_inequalities(), p.n_equalities());
            (p, w)
        }
    };
    let kind = match &built.scenario {
        GeneratedScenario::Classic(_) => ScenarioKind::Classic,
        GeneratedScenario::Cognitive(_) => ScenarioKind::Cognitive,
        GeneratedScenario::Ris(_) => ScenarioKind::Ris,
        GeneratedScenario::Wpt(_) => ScenarioKind::Wpt,
    };
    let config = resolved_fa_config(kind, &problem, built, settings, seed);
    let trace = run_fa(&problem, &weights, &config)?;
    let (reported, objective_search, violation) = match &built.scenario {
        GeneratedScenario::Classic(s) => report_classic(s, &trace.best),
        GeneratedScenario::Cognitive(s) => report_cognitive(s, &trace.best),
        GeneratedScenario::Ris(s) => report_ris(s, &trace.best),
        GeneratedScenario::Wpt(s) => report_wpt(s, &trace.best),
    };
    Ok(FaSolve {
        reported,
        objective_search,
        violation,
        convergence_generation: convergence_generation(&trace.best_penalized_objective),
        trace,
    })
}

struct SolverOutcome {
    objective_search: f64,
    violation: f64,
    generations: usize,
}

fn run_solver(
    built: &BuiltScenario,
    solver: SolverKind,
    fa: &FaSettings,
    seed: u64,
) -> Result<SolverOutcome> {
    match solver {
        SolverKind::Fa => {
            let solve = solve_fa(built, fa, seed)?;
            Ok(SolverOutcome {
                objective_search: solve.objective_search,
                violation: solve.violation,
                generations: solve.convergence_generation,
            })
        }
        SolverKind::IterativePrinted => {
            let GeneratedScenario::Classic(scen) = &built.scenario else {
                return Err(Error::InvalidConfig(
                    "iterative baseline needs a classic scenario".into(),
                ));
            };
            let p0 = vec![1.0; scen.users()];
            let (w, state) = duality_solve(scen, DUALITY_ITERATIONS, &p0, None)?;
            Ok(SolverOutcome {
                objective_search: total_power(&w),
                violation: classic_violation(scen, &w),
                generations: state.iteration,
            })
        }
        SolverKind::IterativeRecovered => {
            let GeneratedScenario::Classic(scen) = &built.scenario else {
                return Err(Error::InvalidConfig(
                    "iterative baseline needs a classic scenario".into(),
                ));
            };
            let p0 = vec![1.0; scen.users()];
            let (_, state) = duality_solve(scen, DUALITY_ITERATIONS, &p0, None)?;
            let w = downlink_power_recovery(scen, &state.w_hat)?;
            Ok(SolverOutcome {
                objective_search: total_power(&w),
                violation: classic_violation(scen, &w),
                generations: state.iteration,
            })
        }
        SolverKind::Sca => {
            let GeneratedScenario::Wpt(scen) = &built.scenario else {
                return Err(Error::InvalidConfig(
                    "the SCA baseline needs a power-transfer scenario".into(),
                ));
            };
            let theta0 = ComplexMatrix::from_fn(scen.ris_elements(), 1, |_, _| {
                num_complex::Complex64::ONE
            });
            let state = sca_wpt_solve(scen, &theta0, SCA_ITERATIONS)?;
            Ok(SolverOutcome {
                objective_search: *state.objective_history.last().expect("m0 >= 1"),
                violation: 0.0,
                generations: SCA_ITERATIONS,
            })
        }
    }
}

/// Runs every trial × sweep point × solver of the plan. Trials run in
/// parallel with independent derived seeds; the returned row order and all
/// fields except `wall_ms` are deterministic.
///
/// Solver failures are recorded per row (NaN objective, infinite violation)
/// and the run continues.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<Vec<ResultRow>> {
    plan.validate()?;
    let points: Vec<(usize, usize)> = (0..plan.trials)
        .flat_map(|t| (0..plan.sweep.len()).map(move |s| (t, s)))
        .collect();
    let nested: Vec<Vec<ResultRow>> = points
        .par_iter()
        .map(|&(trial, sweep_idx)| run_point(plan, trial, sweep_idx))
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

fn run_point(plan: &ExperimentPlan, trial: usize, sweep_idx: usize) -> Result<Vec<ResultRow>> {
    let (config, fa) = plan.resolved_at(sweep_idx);
    let seed = derive_seed(plan.base_seed, trial, sweep_idx);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let built = build_scenario(plan.kind, &config, &mut rng)?;
    let sweep_value = plan.sweep.value(sweep_idx);
    let mut rows = Vec::with_capacity(plan.solvers.len());
    for &solver in &plan.solvers {
        let start = Instant::now();
        let outcome = run_solver(&built, solver, &fa, seed);
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let row = match outcome {
            Ok(o) => {
                let linear = o.objective_search * built.units.objective_unit_w;
                ResultRow {
                    trial,
                    sweep: sweep_value,
                    solver,
                    objective_db: if linear > 0.0 {
                        lin_to_db(linear)
                    } else {
                        f64::NEG_INFINITY
                    },
                    objective_linear: linear,
                    max_violation: o.violation,
                    generations: o.generations,
                    wall_ms,
                }
            }
            Err(_) => ResultRow {
                trial,
                sweep: sweep_value,
                solver,
                objective_db: f64::NAN,
                objective_linear: f64::NAN,
                max_violation: f64::INFINITY,
                generations: 0,
                wall_ms,
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

fn aggregable(row: &ResultRow, solver: SolverKind) -> bool {
    row.solver == solver
        && row.objective_linear.is_finite()
        && (solver != SolverKind::Fa || row.max_violation <= FEASIBILITY_THRESHOLD)
}

/// Mean linear objective over a solver's rows. Infeasible firefly rows
/// (violation above the threshold) are excluded; order-invariant.
pub fn mean_objective(rows: &[ResultRow], solver: SolverKind) -> Option<f64> {
    let values: Vec<f64> = rows
        .iter()
        .filter(|r| aggregable(r, solver))
        .map(|r| r.objective_linear)
        .collect();
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Median linear objective over a solver's rows, same filtering as the mean.
pub fn median_objective(rows: &[ResultRow], solver: SolverKind) -> Option<f64> {
    let mut values: Vec<f64> = rows
        .iter()
        .filter(|r| aggregable(r, solver))
        .map(|r| r.objective_linear)
        .collect();
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    })
}

/// Firefly rows flagged infeasible (excluded from aggregation).
pub fn infeasible_count(rows: &[ResultRow]) -> usize {
    rows.iter()
        .filter(|r| r.solver == SolverKind::Fa && !(r.max_violation <= FEASIBILITY_THRESHOLD))
        .count()
}

/// Radiation pattern of a beamformer bank over a half-wavelength-style ULA:
/// `10·log10(Σ_t |a(θ)ᴴ w_t|²)` with `a_m(θ) = exp(j·2π·ratio·(m−1)·sin θ)`,
/// floored at −200 dB.
pub fn radiation_pattern(w: &ComplexMatrix, angles_deg: &[f64], spacing_ratio: f64) -> Vec<f64> {
    angles_deg
        .iter()
        .map(|&deg| {
            let s = deg.to_radians().sin();
            let mut total = 0.0;
            for t in 0..w.cols() {
                let mut acc = num_complex::Complex64::ZERO;
                for m in 0..w.rows() {
                    let phase = 2.0 * std::f64::consts::PI * spacing_ratio * m as f64 * s;
                    acc += num_complex::Complex64::from_polar(1.0, -phase) * w[(m, t)];
                }
                total += acc.norm_sqr();
            }
            lin_to_db(total.max(1e-20))
        })
        .collect()
}

/// Parameters for [`complexity_estimate`]; each lemma requires its own
/// subset.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct LemmaParams {
    /// Generations / iterations T.
    pub t: Option<f64>,
    /// Population N.
    pub n: Option<f64>,
    /// Users U.
    pub u: Option<f64>,
    /// Primary users K.
    pub k: Option<f64>,
    /// BS antennas M_t.
    pub m_t: Option<f64>,
    /// RIS elements N_t.
    pub n_t: Option<f64>,
    /// Alternating-optimization iterations n₀.
    pub n0: Option<f64>,
    /// SCA iterations m₀.
    pub m0: Option<f64>,
    /// IPM solution accuracy ε.
    pub epsilon: Option<f64>,
}

fn req(v: Option<f64>, name: &'static str) -> Result<f64> {
    v.ok_or(Error::MissingParameter(name))
}

fn log2(x: f64) -> f64 {
    x.log2()
}

/// Evaluates the printed complexity expression of one of the eight lemmas
/// verbatim (operation-count order). Logs are base 2; `ln(ε⁻¹)` is natural.
pub fn complexity_estimate(lemma: usize, params: &LemmaParams) -> Result<f64> {
    match lemma {
        1 => {
            let t = req(params.t, "T")?;
            let u = req(params.u, "U")?;
            let m = req(params.m_t, "M_t")?;
            Ok(t * (u * (m.powi(3) + m.powi(2) + m * log2(m)) + u))
        }
        2 => {
            let t = req(params.t, "T")?;
            let n = req(params.n, "N")?;
            let u = req(params.u, "U")?;
            let m = req(params.m_t, "M_t")?;
            let light = n * u * m * (1.0 + u * m);
            Ok(t * n.powi(2) * (m.powi(2) + light)
                + t * n * log2(n)
                + n * m * u
                + light
                + n * log2(n))
        }
        3 => {
            let eps = req(params.epsilon, "epsilon")?;
            let u = req(params.u, "U")?;
            let k = req(params.k, "K")?;
            let m = req(params.m_t, "M_t")?;
            Ok((1.0 / eps).ln()
                * (u * (m + 1.0) + k).sqrt()
                * ((m.powi(2) + 1.0) * (u + k) + u * m.powi(2) * (m.powi(2) + m) + m.powi(4))
                * m.powi(2))
        }
        4 => {
            let t = req(params.t, "T")?;
            let n = req(params.n, "N")?;
            let u = req(params.u, "U")?;
            let k = req(params.k, "K")?;
            let m = req(params.m_t, "M_t")?;
            let light = n * u * m * (1.0 + u * m + k * m);
            Ok(t * n.powi(2) * (m.powi(2) + light)
                + t * n * log2(n)
                + n * m * u
                + light
                + n * log2(n))
        }
        5 => {
            let eps = req(params.epsilon, "epsilon")?;
            let u = req(params.u, "U")?;
            let m = req(params.m_t, "M_t")?;
            let nt = req(params.n_t, "N_t")?;
            let n0 = req(params.n0, "n0")?;
            let tau1 = (1.0 / eps).ln()
                * (u * (m + 1.0)).sqrt()
                * ((m.powi(2) + 1.0) * u + u * m.powi(2) * (m.powi(2) + m) + m.powi(4))
                * m.powi(2);
            let tau2 = (1.0 / eps).ln()
                * (u + 2.0 * nt).sqrt()
                * ((nt.powi(2) + 1.0) * (u + 2.0 * nt.powi(2)) + nt.powi(4))
                * nt.powi(2);
            Ok(n0 * (tau1 + tau2))
        }
        6 | 8 => {
            let t = req(params.t, "T")?;
            let n = req(params.n, "N")?;
            let u = req(params.u, "U")?;
            let m = req(params.m_t, "M_t")?;
            let nt = req(params.n_t, "N_t")?;
            let light = n * (u * m + u * (nt.powi(2) + m * nt) + nt);
            Ok(t * n.powi(2) * (m.powi(2) + nt + light)
                + t * n * log2(n)
                + n * m * u
                + nt * n
                + n * log2(n)
                + light)
        }
        7 => {
            let m0 = req(params.m0, "m0")?;
            let u = req(params.u, "U")?;
            let m = req(params.m_t, "M_t")?;
            let nt = req(params.n_t, "N_t")?;
            Ok(m0
                * (u * m * (m + nt) + m.powi(3) + m * log2(m) + nt.powi(3) + nt.powi(2) * m))
        }
        other => Err(Error::InvalidConfig(format!(
            "lemma index must be 1..=8, got {other}"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
}

impl std::str::FromStr for EmitFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(EmitFormat::Csv),
            "json" => Ok(EmitFormat::Json),
            other => Err(Error::InvalidConfig(format!("unknown format `{other}`"))),
        }
    }
}

pub const CSV_HEADER: &str =
    "trial,sweep,solver,objective_db,objective_linear,max_violation,generations,wall_ms";

/// Serializes rows to the fixed-header CSV or a JSON array.
pub fn render(rows: &[ResultRow], format: EmitFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidConfig("no rows to emit".into()));
    }
    match format {
        EmitFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.trial,
                    r.sweep,
                    r.solver,
                    r.objective_db,
                    r.objective_linear,
                    r.max_violation,
                    r.generations,
                    r.wall_ms
                ));
            }
            Ok(out)
        }
        EmitFormat::Json => {
            serde_json::to_string_pretty(rows).map_err(|e| Error::InvalidConfig(e.to_string()))
        }
    }
}

/// Writes rows to a file in the requested format.
pub fn emit(rows: &[ResultRow], format: EmitFormat, path: &Path) -> Result<()> {
    let contents = render(rows, format)?;
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
