//! Generalized firefly algorithm over named sets of complex matrices.
//!
//! The engine minimizes `f + P` where `P` is a quadratic penalty built from
//! inequality and equality constraint evaluators; maximization problems are
//! folded to `-f + P`. Fireflies are [`DecisionSet`]s; attraction decays with
//! the per-variable Frobenius distance and a seeded random walk shrinks
//! geometrically with the generation index. Everything is deterministic given
//! the seed.
//!
//! Comparisons between fireflies always use the penalized objective directly
//! (smaller is brighter): the reciprocal light intensity is order-reversing
//! only for positive denominators and the power-transfer problem's `-f + P`
//! can be negative. [`brightness`] keeps the reciprocal for reporting parity.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{frobenius_distance, ComplexMatrix};
use crate::{Error, Result};

/// One firefly: a named, ordered collection of complex matrices.
///
/// Names are unique and shapes are fixed per [`ProblemSpec`], identical across
/// all fireflies of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionSet {
    variables: Vec<(String, ComplexMatrix)>,
}

impl DecisionSet {
    pub fn new(variables: Vec<(String, ComplexMatrix)>) -> Result<Self> {
        for (i, (name, _)) in variables.iter().enumerate() {
            if variables[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate decision variable name `{name}`"
                )));
            }
        }
        Ok(Self { variables })
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[(String, ComplexMatrix)] {
        &self.variables
    }

    /// Value of the `i`-th variable (order is fixed by the problem).
    pub fn value(&self, i: usize) -> &ComplexMatrix {
        &self.variables[i].1
    }

    pub fn get(&self, name: &str) -> Option<&ComplexMatrix> {
        self.variables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }
}

/// How a variable's initial population entries are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableInit {
    /// Complex Gaussian entries scaled by the per-variable init scale.
    Gaussian,
    /// Unit-modulus entries with uniform phase (phase-shift vectors).
    UnitModulus,
}

/// Shape and initialization class of one decision variable.
#[derive(Debug, Clone)]
pub struct VariableSpec {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub init: VariableInit,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, rows: usize, cols: usize) -> Self {
        Self {
            name: name.into(),
            rows,
            cols,
            init: VariableInit::Gaussian,
        }
    }

    pub fn unit_modulus(name: impl Into<String>, rows: usize, cols: usize) -> Self {
        Self {
            name: name.into(),
            rows,
            cols,
            init: VariableInit::UnitModulus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

pub type ScalarFn = Arc<dyn Fn(&DecisionSet) -> f64 + Send + Sync>;

/// Objective plus constraint evaluators over shape-conforming decision sets.
///
/// Evaluators must be total: defined for every shape-conforming input.
#[derive(Clone)]
pub struct ProblemSpec {
    variables: Vec<VariableSpec>,
    sense: Sense,
    objective: ScalarFn,
    inequalities: Vec<ScalarFn>,
    equalities: Vec<ScalarFn>,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("variables", &self.variables)
            .field("sense", &self.sense)
            .field("inequalities", &self.inequalities.len())
            .field("equalities", &self.equalities.len())
            .finish()
    }
}

impl ProblemSpec {
    pub fn new(
        variables: Vec<VariableSpec>,
        sense: Sense,
        objective: impl Fn(&DecisionSet) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::InvalidConfig(
                "a problem needs at least one decision variable".into(),
            ));
        }
        for (i, v) in variables.iter().enumerate() {
            if v.rows == 0 || v.cols == 0 {
                return Err(Error::InvalidConfig(format!(
                    "variable `{}` has zero dimension",
                    v.name
                )));
            }
            if variables[..i].iter().any(|u| u.name == v.name) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate variable name `{}`",
                    v.name
                )));
            }
        }
        Ok(Self {
            variables,
            sense,
            objective: Arc::new(objective),
            inequalities: Vec::new(),
            equalities: Vec::new(),
        })
    }

    /// Adds one inequality evaluator `g(x) ≤ 0`.
    pub fn with_inequality(
        mut self,
        g: impl Fn(&DecisionSet) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.inequalities.push(Arc::new(g));
        self
    }

    /// Adds one equality evaluator `h(x) = 0`.
    pub fn with_equality(
        mut self,
        h: impl Fn(&DecisionSet) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.equalities.push(Arc::new(h));
        self
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn n_inequalities(&self) -> usize {
        self.inequalities.len()
    }

    pub fn n_equalities(&self) -> usize {
        self.equalities.len()
    }

    /// Raw objective `f(x)` in the problem's original sense.
    pub fn objective(&self, x: &DecisionSet) -> f64 {
        (self.objective)(x)
    }

    pub fn inequality_values(&self, x: &DecisionSet) -> Vec<f64> {
        self.inequalities.iter().map(|g| g(x)).collect()
    }

    pub fn equality_values(&self, x: &DecisionSet) -> Vec<f64> {
        self.equalities.iter().map(|h| h(x)).collect()
    }

    pub fn conforms(&self, x: &DecisionSet) -> bool {
        x.len() == self.variables.len()
            && self
                .variables
                .iter()
                .zip(x.variables())
                .all(|(spec, (name, value))| {
                    &spec.name == name && value.shape() == (spec.rows, spec.cols)
                })
    }
}

pub type ScheduleFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Per-constraint penalty weights with a generation schedule.
///
/// The effective weight of inequality `l` at generation `n` is
/// `lambda[l]·schedule(n)` (and likewise `rho[k]` for equalities). The default
/// schedule is `n²`, the dynamic setting used throughout the experiments;
/// problems may override it.
#[derive(Clone)]
pub struct PenaltyWeights {
    pub lambda: Vec<f64>,
    pub rho: Vec<f64>,
    schedule: ScheduleFn,
}

impl std::fmt::Debug for PenaltyWeights {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PenaltyWeights")
            .field("lambda", &self.lambda)
            .field("rho", &self.rho)
            .finish()
    }
}

impl PenaltyWeights {
    /// Unit base weights with the `n²` generation schedule.
    pub fn generation_squared(n_inequalities: usize, n_equalities: usize) -> Self {
        Self {
            lambda: vec![1.0; n_inequalities],
            rho: vec![1.0; n_equalities],
            schedule: Arc::new(|gen| (gen * gen) as f64),
        }
    }

    /// Fixed weights, schedule identically one.
    pub fn constant(lambda: Vec<f64>, rho: Vec<f64>) -> Self {
        Self {
            lambda,
            rho,
            schedule: Arc::new(|_| 1.0),
        }
    }

    pub fn with_schedule(mut self, schedule: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        self.schedule = Arc::new(schedule);
        self
    }

    /// Schedule multiplier at a generation index (clamped to 1 so the initial
    /// evaluation is never weightless).
    pub fn multiplier(&self, gen: usize) -> f64 {
        (self.schedule)(gen.max(1))
    }

    pub fn validate(&self, problem: &ProblemSpec) -> Result<()> {
        if self.lambda.len() != problem.n_inequalities()
            || self.rho.len() != problem.n_equalities()
        {
            return Err(Error::InvalidConfig(format!(
                "penalty weights cover {}/{} constraints, problem has {}/{}",
                self.lambda.len(),
                self.rho.len(),
                problem.n_inequalities(),
                problem.n_equalities()
            )));
        }
        if self.lambda.iter().chain(&self.rho).any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidConfig("penalty weights must be positive".into()));
        }
        Ok(())
    }
}

/// Distribution of the random-walk entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Randomization {
    /// Standard complex Gaussian (variance 1/2 per component).
    Gaussian,
    /// Uniform on `[-0.5, 0.5]` per component.
    Uniform,
}

/// Firefly algorithm parameters.
///
/// `beta0`, `gamma` and `init_scale` are per decision variable and must match
/// the problem's variable count.
#[derive(Debug, Clone)]
pub struct FAConfig {
    pub population: usize,
    pub generations: usize,
    pub beta0: Vec<f64>,
    pub gamma: Vec<f64>,
    pub alpha0: f64,
    pub alpha_decay: f64,
    pub init_scale: Vec<f64>,
    pub rng_seed: u64,
    pub randomization: Randomization,
}

impl FAConfig {
    /// The experiment defaults: `β₀ = 1`, `γ = 1`, `α⁽⁰⁾ = 0.9` decaying by
    /// `0.9` per generation, Gaussian randomization, unit init scale.
    pub fn paper_defaults(n_vars: usize, population: usize, generations: usize, seed: u64) -> Self {
        Self {
            population,
            generations,
            beta0: vec![1.0; n_vars],
            gamma: vec![1.0; n_vars],
            alpha0: 0.9,
            alpha_decay: 0.9,
            init_scale: vec![1.0; n_vars],
            rng_seed: seed,
            randomization: Randomization::Gaussian,
        }
    }

    pub fn validate(&self, problem: &ProblemSpec) -> Result<()> {
        let nv = problem.variables().len();
        if self.population < 2 {
            return Err(Error::InvalidConfig("population must be at least 2".into()));
        }
        if self.generations < 1 {
            return Err(Error::InvalidConfig("need at least one generation".into()));
        }
        if self.beta0.len() != nv || self.gamma.len() != nv || self.init_scale.len() != nv {
            return Err(Error::InvalidConfig(format!(
                "per-variable parameter lengths must equal {nv}"
            )));
        }
        if self.beta0.iter().any(|&b| !(b >= 0.0) || !b.is_finite()) {
            return Err(Error::InvalidConfig("beta0 must be nonnegative".into()));
        }
        if self.gamma.iter().any(|&g| !(g >= 0.0)) {
            return Err(Error::InvalidConfig("gamma must be nonnegative".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha0) {
            return Err(Error::InvalidConfig("alpha0 must lie in [0, 1]".into()));
        }
        if !(self.alpha_decay > 0.0 && self.alpha_decay < 1.0) {
            return Err(Error::InvalidConfig("alpha_decay must lie in (0, 1)".into()));
        }
        if self.init_scale.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::InvalidConfig("init_scale must be positive".into()));
        }
        Ok(())
    }

    /// Randomization factor `α⁽ⁿ⁾ = α₀·decayⁿ`.
    pub fn alpha_at(&self, gen: usize) -> f64 {
        self.alpha0 * self.alpha_decay.powi(gen as i32)
    }
}

/// Solve record: best decision set, per-generation best penalized objective
/// (non-increasing), final raw objective, worst constraint violations.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub best: DecisionSet,
    pub best_penalized_objective: Vec<f64>,
    pub final_objective: f64,
    pub max_inequality_violation: f64,
    pub max_equality_violation: f64,
    pub generations_run: usize,
}

/// Quadratic penalty `Σ_l λ_l(gen)·max{0, g_l}² + Σ_k ρ_k(gen)·h_k²`.
///
/// Zero exactly when every `g_l ≤ 0` and every `h_k = 0`.
pub fn penalty(
    problem: &ProblemSpec,
    weights: &PenaltyWeights,
    x: &DecisionSet,
    gen: usize,
) -> Result<f64> {
    let mul = weights.multiplier(gen);
    let mut p = 0.0;
    for (l, g) in problem.inequality_values(x).into_iter().enumerate() {
        if !g.is_finite() {
            return Err(Error::NonFinite { op: "penalty" });
        }
        let v = g.max(0.0);
        p += weights.lambda[l] * mul * v * v;
    }
    for (k, h) in problem.equality_values(x).into_iter().enumerate() {
        if !h.is_finite() {
            return Err(Error::NonFinite { op: "penalty" });
        }
        p += weights.rho[k] * mul * h * h;
    }
    Ok(p)
}

/// Penalized objective in minimization sense: `f + P`, or `-f + P` for
/// maximization problems. This is the quantity all firefly comparisons use.
pub fn penalized_objective(
    problem: &ProblemSpec,
    weights: &PenaltyWeights,
    x: &DecisionSet,
    gen: usize,
) -> Result<f64> {
    let f = problem.objective(x);
    if !f.is_finite() {
        return Err(Error::NonFinite { op: "objective" });
    }
    let signed = match problem.sense() {
        Sense::Minimize => f,
        Sense::Maximize => -f,
    };
    Ok(signed + penalty(problem, weights, x, gen)?)
}

/// Reciprocal light intensity `1/(f + P)`, reporting-only.
///
/// `None` when the denominator is not positive; firefly ordering is
/// unaffected because comparisons run on the penalized objective itself.
pub fn brightness(
    problem: &ProblemSpec,
    weights: &PenaltyWeights,
    x: &DecisionSet,
    gen: usize,
) -> Result<Option<f64>> {
    let pen = penalized_objective(problem, weights, x, gen)?;
    Ok(if pen > 0.0 { Some(1.0 / pen) } else { None })
}

fn draw_complex<R: Rng + ?Sized>(rng: &mut R, kind: Randomization) -> Complex64 {
    match kind {
        Randomization::Gaussian => {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        }
        Randomization::Uniform => {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        }
    }
}

/// Moves firefly `xi` toward a brighter `xj`.
///
/// Per variable `V`: `V_i' = V_i + β₀·exp(−γ·r²)·(V_j − V_i) + α⁽ᵍᵉⁿ⁾·Λ`
/// with `r` the per-variable Frobenius distance and `Λ` a same-shape matrix
/// of random entries from the seeded stream. The caller enforces that `xj` is
/// brighter.
pub fn move_toward(
    xi: &DecisionSet,
    xj: &DecisionSet,
    config: &FAConfig,
    gen: usize,
    rng: &mut ChaCha8Rng,
) -> Result<DecisionSet> {
    if xi.len() != xj.len() {
        return Err(Error::DimensionMismatch {
            op: "move_toward",
            details: format!("{} vs {} variables", xi.len(), xj.len()),
        });
    }
    let alpha = config.alpha_at(gen);
    let mut out = Vec::with_capacity(xi.len());
    for (v, ((name, vi), (_, vj))) in xi.variables().iter().zip(xj.variables()).enumerate() {
        if vi.shape() != vj.shape() {
            return Err(Error::DimensionMismatch {
                op: "move_toward",
                details: format!("variable `{name}` shapes differ"),
            });
        }
        let r = frobenius_distance(vj, vi)?;
        let attraction = config.beta0[v] * (-config.gamma[v] * r * r).exp();
        let (rows, cols) = vi.shape();
        let mut next = vi.clone();
        for row in 0..rows {
            for col in 0..cols {
                let pull = attraction * (vj[(row, col)] - vi[(row, col)]);
                let walk = draw_complex(rng, config.randomization) * alpha;
                next[(row, col)] = vi[(row, col)] + pull + walk;
            }
        }
        out.push((name.clone(), next));
    }
    DecisionSet::new(out)
}

/// Draws `N` shape-conforming decision sets.
///
/// Gaussian variables get complex Gaussian entries scaled by the per-variable
/// init scale; unit-modulus variables get unit-magnitude entries with uniform
/// phase. Deterministic given the stream. The config must have been validated
/// against the problem.
pub fn init_population(
    problem: &ProblemSpec,
    config: &FAConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<DecisionSet> {
    (0..config.population)
        .map(|_| {
            let vars = problem
                .variables()
                .iter()
                .enumerate()
                .map(|(v, spec)| {
                    let value = match spec.init {
                        VariableInit::Gaussian => {
                            let scale = config.init_scale[v];
                            ComplexMatrix::from_fn(spec.rows, spec.cols, |_, _| {
                                draw_complex(rng, Randomization::Gaussian) * scale
                            })
                        }
                        VariableInit::UnitModulus => {
                            ComplexMatrix::from_fn(spec.rows, spec.cols, |_, _| {
                                let phase =
                                    (rng.random::<f64>() * 2.0 - 1.0) * std::f64::consts::PI;
                                Complex64::from_polar(1.0, phase)
                            })
                        }
                    };
                    (spec.name.clone(), value)
                })
                .collect();
            DecisionSet { variables: vars }
        })
        .collect()
}

/// Stable rank: ascending penalized objective, ties keep prior order.
fn rank(pop: &mut [DecisionSet], pen: &mut [f64]) {
    let mut idx: Vec<usize> = (0..pop.len()).collect();
    idx.sort_by(|&a, &b| pen[a].partial_cmp(&pen[b]).expect("finite penalized objectives"));
    let new_pop: Vec<DecisionSet> = idx.iter().map(|&i| pop[i].clone()).collect();
    let new_pen: Vec<f64> = idx.iter().map(|&i| pen[i]).collect();
    pop.clone_from_slice(&new_pop);
    pen.copy_from_slice(&new_pen);
}

struct Swarm<'a> {
    problem: &'a ProblemSpec,
    weights: &'a PenaltyWeights,
    config: &'a FAConfig,
    rng: ChaCha8Rng,
    pop: Vec<DecisionSet>,
    pen: Vec<f64>,
    best: DecisionSet,
    envelope: f64,
}

impl<'a> Swarm<'a> {
    fn new(
        problem: &'a ProblemSpec,
        weights: &'a PenaltyWeights,
        config: &'a FAConfig,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let pop = init_population(problem, config, &mut rng);
        let mut pen = Vec::with_capacity(pop.len());
        for x in &pop {
            pen.push(Self::eval(problem, weights, x, 1, 0)?);
        }
        let mut swarm = Self {
            problem,
            weights,
            config,
            rng,
            envelope: pen.iter().cloned().fold(f64::INFINITY, f64::min),
            best: pop[0].clone(),
            pop,
            pen,
        };
        rank(&mut swarm.pop, &mut swarm.pen);
        swarm.best = swarm.pop[0].clone();
        Ok(swarm)
    }

    fn eval(
        problem: &ProblemSpec,
        weights: &PenaltyWeights,
        x: &DecisionSet,
        gen: usize,
        report_gen: usize,
    ) -> Result<f64> {
        penalized_objective(problem, weights, x, gen).map_err(|_| Error::EvaluatorFailure {
            generation: report_gen,
        })
    }

    /// One generation of the pairwise loop; returns the running best
    /// penalized objective.
    fn step(&mut self, gen: usize) -> Result<f64> {
        let n = self.pop.len();
        // Refresh all intensities and the incumbent under this generation's
        // penalty weights. A no-op for constant schedules (evaluators are
        // pure); with growing weights it keeps comparisons on one yardstick.
        for i in 0..n {
            self.pen[i] = Self::eval(self.problem, self.weights, &self.pop[i], gen, gen)?;
            self.envelope = self.envelope.min(self.pen[i]);
        }
        let mut best_pen = Self::eval(self.problem, self.weights, &self.best, gen, gen)?;
        for i in 0..n {
            for j in 0..n {
                if self.pen[i] < best_pen {
                    best_pen = self.pen[i];
                    self.best = self.pop[i].clone();
                }
                if self.pen[j] < best_pen {
                    best_pen = self.pen[j];
                    self.best = self.pop[j].clone();
                }
                if self.pen[j] < self.pen[i] {
                    self.pop[i] =
                        move_toward(&self.pop[i], &self.pop[j], self.config, gen, &mut self.rng)?;
                    self.pen[i] =
                        Self::eval(self.problem, self.weights, &self.pop[i], gen, gen)?;
                    self.envelope = self.envelope.min(self.pen[i]);
                }
            }
        }
        rank(&mut self.pop, &mut self.pen);
        if self.pen[0] < best_pen {
            self.best = self.pop[0].clone();
        }
        Ok(self.envelope)
    }
}

/// Runs the full double-loop firefly algorithm.
///
/// Each generation performs the N×N pairwise comparisons with in-place moves
/// (a firefly may move once per brighter peer, re-evaluated after each move),
/// then re-ranks and updates the best-so-far on strict improvement. Fully
/// deterministic given the seed.
pub fn run_fa(
    problem: &ProblemSpec,
    weights: &PenaltyWeights,
    config: &FAConfig,
) -> Result<SolveTrace> {
    config.validate(problem)?;
    weights.validate(problem)?;
    let mut swarm = Swarm::new(problem, weights, config)?;
    let mut trace = Vec::with_capacity(config.generations);
    for gen in 1..=config.generations {
        trace.push(swarm.step(gen)?);
    }
    let best = swarm.best;
    let final_objective = problem.objective(&best);
    let max_inequality_violation = problem
        .inequality_values(&best)
        .into_iter()
        .map(|g| g.max(0.0))
        .fold(0.0, f64::max);
    let max_equality_violation = problem
        .equality_values(&best)
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max);
    Ok(SolveTrace {
        best,
        best_penalized_objective: trace,
        final_objective,
        max_inequality_violation,
        max_equality_violation,
        generations_run: config.generations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_set(re: f64, im: f64) -> DecisionSet {
        DecisionSet::new(vec![(
            "w".into(),
            ComplexMatrix::column_from(&[Complex64::new(re, im)]),
        )])
        .unwrap()
    }

    fn scalar_problem() -> ProblemSpec {
        ProblemSpec::new(
            vec![VariableSpec::new("w", 1, 1)],
            Sense::Minimize,
            |x: &DecisionSet| x.value(0).frobenius_norm().powi(2),
        )
        .unwrap()
    }

    /// Problem whose constraints return fixed values regardless of the point.
    fn fixed_constraint_problem(gs: Vec<f64>, hs: Vec<f64>) -> ProblemSpec {
        let mut p = ProblemSpec::new(
            vec![VariableSpec::new("w", 1, 1)],
            Sense::Minimize,
            |_: &DecisionSet| 0.0,
        )
        .unwrap();
        for g in gs {
            p = p.with_inequality(move |_| g);
        }
        for h in hs {
            p = p.with_equality(move |_| h);
        }
        p
    }

    #[test]
    fn penalty_feasible_point_is_zero() {
        let p = fixed_constraint_problem(vec![-1.0, -1.0], vec![0.0]);
        let w = PenaltyWeights::constant(vec![1.0, 1.0], vec![1.0]);
        let x = scalar_set(0.0, 0.0);
        assert_eq!(penalty(&p, &w, &x, 1).unwrap(), 0.0);
    }

    #[test]
    fn penalty_single_inequality() {
        let p = fixed_constraint_problem(vec![2.0], vec![]);
        let w = PenaltyWeights::constant(vec![1.0], vec![]);
        assert_eq!(penalty(&p, &w, &scalar_set(0.0, 0.0), 1).unwrap(), 4.0);
    }

    #[test]
    fn penalty_single_equality() {
        let p = fixed_constraint_problem(vec![], vec![0.5]);
        let w = PenaltyWeights::constant(vec![], vec![4.0]);
        assert_eq!(penalty(&p, &w, &scalar_set(0.0, 0.0), 1).unwrap(), 1.0);
    }

    #[test]
    fn penalty_schedule_scales_with_generation() {
        let p = fixed_constraint_problem(vec![1.0], vec![]);
        let w = PenaltyWeights::generation_squared(1, 0);
        assert_eq!(penalty(&p, &w, &scalar_set(0.0, 0.0), 1).unwrap(), 1.0);
        assert_eq!(penalty(&p, &w, &scalar_set(0.0, 0.0), 5).unwrap(), 25.0);
    }

    #[test]
    fn penalty_rejects_non_finite_constraint() {
        let p = fixed_constraint_problem(vec![f64::NAN], vec![]);
        let w = PenaltyWeights::constant(vec![1.0], vec![]);
        assert!(matches!(
            penalty(&p, &w, &scalar_set(0.0, 0.0), 1),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn brightness_reciprocal_and_ordering() {
        let p = scalar_problem();
        let w = PenaltyWeights::constant(vec![], vec![]);
        let x = scalar_set(2.0f64.sqrt(), 0.0); // f = 2
        assert!((brightness(&p, &w, &x, 1).unwrap().unwrap() - 0.5).abs() < 1e-12);
        let y = scalar_set(0.1f64.sqrt(), 0.0); // f = 0.1
        assert!((brightness(&p, &w, &y, 1).unwrap().unwrap() - 10.0).abs() < 1e-9);

        // Ordering definition: smaller penalized objective is brighter.
        let a = penalized_objective(&p, &w, &scalar_set(3.0f64.sqrt(), 0.0), 1).unwrap();
        let b = penalized_objective(&p, &w, &scalar_set(5.0f64.sqrt(), 0.0), 1).unwrap();
        assert!(a < b);
    }

    #[test]
    fn brightness_suppressed_for_nonpositive_denominator() {
        let p = ProblemSpec::new(
            vec![VariableSpec::new("w", 1, 1)],
            Sense::Maximize,
            |x: &DecisionSet| x.value(0).frobenius_norm().powi(2),
        )
        .unwrap();
        let w = PenaltyWeights::constant(vec![], vec![]);
        assert_eq!(brightness(&p, &w, &scalar_set(2.0, 0.0), 1).unwrap(), None);
    }

    fn move_config(beta0: f64, gamma: f64, alpha0: f64) -> FAConfig {
        FAConfig {
            population: 2,
            generations: 1,
            beta0: vec![beta0],
            gamma: vec![gamma],
            alpha0,
            alpha_decay: 0.9,
            init_scale: vec![1.0],
            rng_seed: 0,
            randomization: Randomization::Gaussian,
        }
    }

    #[test]
    fn move_is_identity_when_both_terms_vanish() {
        let xi = scalar_set(1.25, -0.5);
        let xj = scalar_set(3.0, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = move_toward(&xi, &xj, &move_config(0.0, 1.0, 0.0), 1, &mut rng).unwrap();
        assert_eq!(out, xi);
    }

    #[test]
    fn move_full_attraction_reaches_target() {
        let xi = scalar_set(1.0, 0.0);
        let xj = scalar_set(2.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = move_toward(&xi, &xj, &move_config(1.0, 0.0, 0.0), 1, &mut rng).unwrap();
        assert_eq!(out, xj);
    }

    #[test]
    fn move_scalar_hand_evaluation() {
        // xi = 0, xj = 2, γ = 1: r = 2, factor e^{-4}, result 2e^{-4}.
        let xi = scalar_set(0.0, 0.0);
        let xj = scalar_set(2.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = move_toward(&xi, &xj, &move_config(1.0, 1.0, 0.0), 1, &mut rng).unwrap();
        let expected = 2.0 * (-4.0f64).exp();
        assert!((out.value(0)[(0, 0)].re - expected).abs() < 1e-18);
        assert_eq!(out.value(0)[(0, 0)].im, 0.0);
    }

    #[test]
    fn attraction_factor_extremes() {
        // γ → 0 keeps the factor at 1; γ huge underflows to zero.
        assert_eq!((-0.0f64 * 4.0).exp(), 1.0);
        assert_eq!((-1e9f64 * 1.0).exp(), 0.0);
        let xi = scalar_set(0.5, 0.5);
        let xj = scalar_set(-1.0, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = move_toward(&xi, &xj, &move_config(1.0, 1e9, 0.0), 1, &mut rng).unwrap();
        assert_eq!(out, xi);
    }

    #[test]
    fn move_rejects_shape_mismatch() {
        let xi = scalar_set(0.0, 0.0);
        let xj = DecisionSet::new(vec![(
            "w".into(),
            ComplexMatrix::column_from(&[Complex64::ZERO, Complex64::ZERO]),
        )])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            move_toward(&xi, &xj, &move_config(1.0, 1.0, 0.0), 1, &mut rng),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn init_population_shapes_distinct_and_deterministic() {
        let p = ProblemSpec::new(
            vec![
                VariableSpec::new("W", 3, 2),
                VariableSpec::unit_modulus("theta", 4, 1),
            ],
            Sense::Minimize,
            |_| 0.0,
        )
        .unwrap();
        let mut config = FAConfig::paper_defaults(2, 3, 1, 7);
        config.init_scale = vec![0.5, 1.0];

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pop = init_population(&p, &config, &mut rng);
        assert_eq!(pop.len(), 3);
        for x in &pop {
            assert!(p.conforms(x));
            // Unit-modulus variable really is unit modulus.
            for z in x.get("theta").unwrap().entries() {
                assert!((z.norm() - 1.0).abs() <= 1e-12);
            }
        }
        assert_ne!(pop[0], pop[1]);
        assert_ne!(pop[1], pop[2]);

        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        let pop2 = init_population(&p, &config, &mut rng2);
        assert_eq!(pop, pop2);
    }

    #[test]
    fn run_fa_unconstrained_scalar_quadratic() {
        let p = scalar_problem();
        let w = PenaltyWeights::constant(vec![], vec![]);
        let config = FAConfig::paper_defaults(1, 20, 50, 11);
        let trace = run_fa(&p, &w, &config).unwrap();
        assert!(
            trace.final_objective <= 1e-3,
            "final {}",
            trace.final_objective
        );
        assert_eq!(trace.generations_run, 50);
        assert_eq!(trace.best_penalized_objective.len(), 50);
    }

    #[test]
    fn run_fa_scalar_constrained_boundary() {
        // min p subject to p ≥ 3 on the real part of a 1x1 variable.
        // Independent oracle: grid search over p ∈ [0, 10] step 1e-3.
        let mut oracle = f64::INFINITY;
        for k in 0..=10_000 {
            let pv = k as f64 * 1e-3;
            if 3.0 - pv <= 0.0 {
                oracle = oracle.min(pv);
                break;
            }
        }
        assert!((oracle - 3.0).abs() < 1e-9);

        let p = ProblemSpec::new(
            vec![VariableSpec::new("p", 1, 1)],
            Sense::Minimize,
            |x: &DecisionSet| x.value(0)[(0, 0)].re,
        )
        .unwrap()
        .with_inequality(|x: &DecisionSet| 3.0 - x.value(0)[(0, 0)].re);
        // Hard-wall constant weight keeps the boundary-shaving band below
        // sampling resolution.
        let w = PenaltyWeights::constant(vec![1e12], vec![]);
        let mut config = FAConfig::paper_defaults(1, 30, 60, 3);
        config.init_scale = vec![4.0];
        let trace = run_fa(&p, &w, &config).unwrap();
        // The hard wall keeps any boundary shave below sampling resolution.
        assert!(
            trace.final_objective >= 3.0 - 1e-9 && trace.final_objective <= 3.05,
            "final {}",
            trace.final_objective
        );
        assert_eq!(trace.max_inequality_violation, 0.0);
    }

    #[test]
    fn run_fa_is_bitwise_deterministic() {
        let p = scalar_problem().with_inequality(|x: &DecisionSet| {
            1.0 - x.value(0).frobenius_norm().powi(2)
        });
        let w = PenaltyWeights::generation_squared(1, 0);
        let config = FAConfig::paper_defaults(1, 10, 20, 99);
        let a = run_fa(&p, &w, &config).unwrap();
        let b = run_fa(&p, &w, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn run_fa_envelope_non_increasing_across_seeds() {
        for seed in [1u64, 2, 3, 4, 5] {
            let p = scalar_problem().with_inequality(|x: &DecisionSet| {
                0.5 - x.value(0)[(0, 0)].re
            });
            let w = PenaltyWeights::generation_squared(1, 0);
            let config = FAConfig::paper_defaults(1, 8, 25, seed);
            let trace = run_fa(&p, &w, &config).unwrap();
            for pair in trace.best_penalized_objective.windows(2) {
                assert!(pair[1] <= pair[0], "seed {seed}: {pair:?}");
            }
        }
    }

    #[test]
    fn run_fa_aborts_on_non_finite_objective() {
        let p = ProblemSpec::new(
            vec![VariableSpec::new("w", 1, 1)],
            Sense::Minimize,
            |x: &DecisionSet| 1.0 / (x.value(0)[(0, 0)].re - x.value(0)[(0, 0)].re), // NaN
        )
        .unwrap();
        let w = PenaltyWeights::constant(vec![], vec![]);
        let config = FAConfig::paper_defaults(1, 4, 3, 1);
        assert!(matches!(
            run_fa(&p, &w, &config),
            Err(Error::EvaluatorFailure { .. })
        ));
    }

    #[test]
    fn one_generation_argmax_collapse() {
        // α₀ = 0, γ = 0, β₀ = 1, one strictly brightest firefly: after one
        // generation every firefly coincides with it.
        let p = scalar_problem();
        let w = PenaltyWeights::constant(vec![], vec![]);
        let config = FAConfig {
            population: 5,
            generations: 1,
            beta0: vec![1.0],
            gamma: vec![0.0],
            alpha0: 0.0,
            alpha_decay: 0.9,
            init_scale: vec![1.0],
            rng_seed: 21,
            randomization: Randomization::Gaussian,
        };
        let mut swarm = Swarm::new(&p, &w, &config).unwrap();
        swarm.step(1).unwrap();
        let champion = swarm.best.clone();
        for x in &swarm.pop {
            let d = frobenius_distance(x.value(0), champion.value(0)).unwrap();
            assert!(d <= 1e-12, "firefly strayed by {d}");
        }
    }

    #[test]
    fn config_validation_catches_bad_inputs() {
        let p = scalar_problem();
        let mut c = FAConfig::paper_defaults(1, 1, 10, 0);
        assert!(c.validate(&p).is_err()); // population < 2
        c.population = 4;
        c.generations = 0;
        assert!(c.validate(&p).is_err());
        c.generations = 5;
        c.beta0 = vec![1.0, 1.0];
        assert!(c.validate(&p).is_err()); // arity mismatch
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            /// Penalty is zero exactly on feasible constraint values.
            #[test]
            fn penalty_iff_feasible(
                gs in prop::collection::vec(-2.0f64..2.0, 0..4),
                hs in prop::collection::vec(-2.0f64..2.0, 0..4),
            ) {
                let feasible = gs.iter().all(|&g| g <= 0.0) && hs.iter().all(|&h| h == 0.0);
                let p = fixed_constraint_problem(gs.clone(), hs.clone());
                let w = PenaltyWeights::generation_squared(gs.len(), hs.len());
                let x = scalar_set(0.0, 0.0);
                let pen = penalty(&p, &w, &x, 3).unwrap();
                prop_assert!(pen >= 0.0);
                prop_assert_eq!(pen == 0.0, feasible);
            }

            /// Best-so-far penalized objective never increases.
            #[test]
            fn envelope_monotone(seed in 0u64..200) {
                let p = scalar_problem()
                    .with_inequality(|x: &DecisionSet| 0.3 - x.value(0)[(0, 0)].re);
                let w = PenaltyWeights::generation_squared(1, 0);
                let config = FAConfig::paper_defaults(1, 6, 12, seed);
                let trace = run_fa(&p, &w, &config).unwrap();
                for pair in trace.best_penalized_objective.windows(2) {
                    prop_assert!(pair[1] <= pair[0]);
                }
            }
        }
    }
}
