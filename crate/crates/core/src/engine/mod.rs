//! Alternating cost/mixer evolution, its expectation objective and the
//! multistart parameter search.

pub mod nelder_mead;

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::check_applicability;
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::mixers::{
    build_distance_mixer, build_ring_xy_mixer, build_star_mixer, build_transverse_field, MixerOperator,
    MixerPropagator,
};
use crate::problems::{FeasibleSet, ProblemInstance, DEFAULT_ENUMERATION_CAP};
use crate::qstate::{DiagonalCost, Distribution, ExpmOptions, QuantumState};
use crate::scalar::Real;
use nelder_mead::{minimize, NelderMeadOptions};

/// Angles for `p` layers. Layer `l` applies `exp(-i gammas[l] C)` then `exp(-i betas[l] B)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QaoaSchedule<T: Real = f64> {
    gammas: Vec<T>,
    betas: Vec<T>,
}

impl<T: Real> QaoaSchedule<T> {
    pub fn new(gammas: Vec<T>, betas: Vec<T>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::InvalidSchedule("p must be at least 1".into()));
        }
        if gammas.len() != betas.len() {
            return Err(Error::InvalidSchedule(format!(
                "{} gammas but {} betas",
                gammas.len(),
                betas.len()
            )));
        }
        if gammas.iter().chain(&betas).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSchedule("angles must be finite".into()));
        }
        Ok(Self { gammas, betas })
    }

    pub fn zeros(p: usize) -> Result<Self> {
        Self::new(vec![T::zero(); p], vec![T::zero(); p])
    }

    /// `params = [gamma_1..gamma_p, beta_1..beta_p]`.
    pub fn from_params(params: &[T]) -> Result<Self> {
        if !params.len().is_multiple_of(2) {
            return Err(Error::InvalidSchedule("odd parameter count".into()));
        }
        let (g, b) = params.split_at(params.len() / 2);
        Self::new(g.to_vec(), b.to_vec())
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[T] {
        &self.gammas
    }

    pub fn betas(&self) -> &[T] {
        &self.betas
    }

    pub fn layers(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.gammas.iter().copied().zip(self.betas.iter().copied())
    }
}

/// Mixer selection for a run. `ProjectedCost` is the transverse field driven by
/// the cost restricted to the feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixerChoice {
    Distance2,
    Distance1,
    RingXy,
    Star,
    Transverse,
    #[serde(rename = "projected-c")]
    ProjectedCost,
}

impl MixerChoice {
    pub const ALL: [MixerChoice; 6] =
        [Self::Distance2, Self::Distance1, Self::RingXy, Self::Star, Self::Transverse, Self::ProjectedCost];

    pub fn name(self) -> &'static str {
        match self {
            Self::Distance2 => "distance2",
            Self::Distance1 => "distance1",
            Self::RingXy => "ring-xy",
            Self::Star => "star",
            Self::Transverse => "transverse",
            Self::ProjectedCost => "projected-c",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown mixer {s:?}")))
    }

    /// Whether runs confined to the feasible set are expected.
    pub fn is_constrained(self) -> bool {
        !matches!(self, Self::Transverse | Self::ProjectedCost)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    UniformFeasible,
    /// Basis state on the star center, or the problem's trivial solution.
    TrivialBasis,
    UniformAll,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub p: usize,
    pub mixer: MixerChoice,
    /// `None` selects uniform over the feasible set for constrained mixers and
    /// uniform over all strings otherwise.
    #[serde(default)]
    pub initial_state: Option<InitialState>,
    pub restarts: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_evaluations: usize,
    #[serde(default)]
    pub star_center: Option<BitString>,
    #[serde(default = "default_cap")]
    pub enumeration_cap: usize,
    /// Worker threads for restarts; `None` uses the global pool. Never affects results.
    #[serde(skip)]
    pub threads: Option<usize>,
}

fn default_cap() -> usize {
    DEFAULT_ENUMERATION_CAP
}

impl RunConfig {
    pub fn new(p: usize, mixer: MixerChoice) -> Self {
        Self {
            p,
            mixer,
            initial_state: None,
            restarts: 20,
            seed: 0,
            tolerance: 1e-8,
            max_evaluations: 5000,
            star_center: None,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidSchedule("p must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if self.max_evaluations == 0 {
            return Err(Error::InvalidConfig("max evaluations must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidConfig("threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn resolved_initial_state(&self) -> InitialState {
        self.initial_state.unwrap_or(if self.mixer.is_constrained() {
            InitialState::UniformFeasible
        } else {
            InitialState::UniformAll
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartTrace {
    pub restart: usize,
    pub seed: u64,
    pub expectation: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RunResult<T: Real = f64> {
    pub schedule: QaoaSchedule<T>,
    pub expectation: T,
    /// Probabilities at or above the default floor.
    pub distribution: Distribution<T>,
    pub optima: Vec<BitString>,
    pub optimal_probability: T,
    pub infeasible_probability: T,
    pub trace: Vec<RestartTrace>,
    /// Cost weights actually optimized when the cost was projected onto the feasible set.
    pub projected_cost: Option<Vec<T>>,
}

impl<T: Real> RunResult<T> {
    /// The `k` most probable strings, ties broken by string order.
    pub fn top(&self, k: usize) -> Vec<(BitString, T)> {
        let mut v: Vec<_> = self.distribution.iter().map(|(&x, &p)| (x, p)).collect();
        v.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
        v.truncate(k);
        v
    }

    pub fn argmax(&self) -> Option<BitString> {
        self.top(1).first().map(|t| t.0)
    }
}

/// Applies `p` layers of cost phase followed by mixer exponential to `initial`.
pub fn evolve<T: Real>(
    cost: &DiagonalCost<T>,
    mixer: &MixerPropagator<T>,
    schedule: &QaoaSchedule<T>,
    initial: &QuantumState<T>,
) -> Result<QuantumState<T>> {
    let mut state = initial.clone();
    for (gamma, beta) in schedule.layers() {
        state.apply_cost_phase_mut(gamma, cost)?;
        mixer.apply_mut(beta, &mut state)?;
    }
    Ok(state)
}

/// `<C>` in the evolved state.
pub fn objective<T: Real>(
    cost: &DiagonalCost<T>,
    mixer: &MixerPropagator<T>,
    schedule: &QaoaSchedule<T>,
    initial: &QuantumState<T>,
) -> Result<T> {
    evolve(cost, mixer, schedule, initial)?.expectation(cost)
}

/// Zeroes the weight of every string outside `omega`.
pub fn project_cost<T: Real>(cost: &DiagonalCost<T>, omega: &FeasibleSet) -> Result<DiagonalCost<T>> {
    crate::qstate::check_dim(cost.n(), omega.n())?;
    DiagonalCost::from_fn(cost.n(), |x| if omega.contains(x) { cost.weight(x) } else { T::zero() })
}

/// Everything fixed for a run: cost, mixer, initial state and the brute-force reference.
#[derive(Debug, Clone)]
pub struct PreparedRun<T: Real = f64> {
    pub omega: FeasibleSet,
    pub optima: Vec<BitString>,
    pub cost: DiagonalCost<T>,
    pub mixer: MixerOperator<T>,
    pub propagator: MixerPropagator<T>,
    pub initial: QuantumState<T>,
    projected: bool,
}

impl<T: Real> PreparedRun<T> {
    pub fn new(problem: &ProblemInstance, config: &RunConfig) -> Result<Self> {
        config.validate()?;
        problem.check()?;
        let cap = config.enumeration_cap;
        let omega = problem.feasible_set_with_cap(cap)?;
        if omega.is_empty() {
            return Err(Error::NoFeasibleSolution);
        }
        check_applicability(problem, &omega, config.mixer)?;
        let optima = problem.brute_force_optima_with_cap(cap)?;
        let raw_cost = problem.cost_operator_with_cap::<T>(cap)?;
        let n = problem.qubit_count();

        let center = match config.star_center {
            Some(c) => c,
            None => problem.trivial_feasible()?,
        };
        let mixer = match config.mixer {
            MixerChoice::Distance2 => build_distance_mixer(&omega, 2)?,
            MixerChoice::Distance1 => build_distance_mixer(&omega, 1)?,
            MixerChoice::RingXy => build_ring_xy_mixer(n)?,
            MixerChoice::Star => build_star_mixer(&omega, center)?,
            MixerChoice::Transverse | MixerChoice::ProjectedCost => build_transverse_field(n)?,
        };
        let projected = config.mixer == MixerChoice::ProjectedCost;
        let cost = if projected { project_cost(&raw_cost, &omega)? } else { raw_cost };

        let initial = match config.resolved_initial_state() {
            InitialState::UniformFeasible => QuantumState::uniform_state_over(omega.iter(), n)?,
            InitialState::TrivialBasis => {
                if !omega.contains(center) {
                    return Err(Error::StarCenterInfeasible(center.to_bits(n)));
                }
                QuantumState::basis(n, center)?
            }
            InitialState::UniformAll => QuantumState::uniform_all(n),
        };
        let propagator = mixer.propagator(ExpmOptions::default())?;
        Ok(Self { omega, optima, cost, mixer, propagator, initial, projected })
    }

    pub fn evolve(&self, schedule: &QaoaSchedule<T>) -> Result<QuantumState<T>> {
        evolve(&self.cost, &self.propagator, schedule, &self.initial)
    }

    pub fn objective(&self, schedule: &QaoaSchedule<T>) -> Result<T> {
        objective(&self.cost, &self.propagator, schedule, &self.initial)
    }

    /// Full result for a fixed schedule.
    pub fn result(&self, schedule: QaoaSchedule<T>, trace: Vec<RestartTrace>) -> Result<RunResult<T>> {
        let state = self.evolve(&schedule)?;
        let expectation = state.expectation(&self.cost)?;
        let mut optimal = T::zero();
        let mut feasible = T::zero();
        for x in self.omega.iter() {
            let p = state.probability(x);
            feasible += p;
            if self.optima.binary_search(&x).is_ok() {
                optimal += p;
            }
        }
        let infeasible = (state.norm().powi(2) - feasible).max(T::zero());
        Ok(RunResult {
            schedule,
            expectation,
            distribution: state.distribution(),
            optima: self.optima.clone(),
            optimal_probability: optimal,
            infeasible_probability: infeasible,
            trace,
            projected_cost: self.projected.then(|| self.cost.weights().to_vec()),
        })
    }
}

/// Multistart Nelder-Mead maximization of the expectation.
pub fn optimize<T: Real>(problem: &ProblemInstance, config: &RunConfig) -> Result<RunResult<T>> {
    let prepared = PreparedRun::<T>::new(problem, config)?;
    optimize_prepared(&prepared, config)
}

/// `optimize` with the transverse-field mixer, projected cost and uniform start over all strings.
pub fn run_projected_scheme<T: Real>(problem: &ProblemInstance, config: &RunConfig) -> Result<RunResult<T>> {
    let config = RunConfig { mixer: MixerChoice::ProjectedCost, initial_state: Some(InitialState::UniformAll), ..config.clone() };
    optimize(problem, &config)
}

/// Per-restart seeds derived from the run seed.
pub fn restart_seeds(seed: u64, restarts: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..restarts).map(|_| rng.random()).collect()
}

pub fn optimize_prepared<T: Real>(prepared: &PreparedRun<T>, config: &RunConfig) -> Result<RunResult<T>> {
    config.validate()?;
    let options = NelderMeadOptions {
        tolerance: config.tolerance,
        max_evaluations: config.max_evaluations,
        ..NelderMeadOptions::default()
    };
    let seeds = restart_seeds(config.seed, config.restarts);
    let run_one = |(restart, &seed): (usize, &u64)| -> Result<(Vec<T>, T, RestartTrace)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0: Vec<T> = (0..2 * config.p).map(|_| T::lit(rng.random::<f64>() * TAU)).collect();
        let m = minimize(
            |x: &[T]| prepared.objective(&QaoaSchedule::from_params(x)?).map(|v| -v),
            &x0,
            &options,
        )?;
        let value = -m.value;
        let trace = RestartTrace {
            restart,
            seed,
            expectation: value.as_f64(),
            evaluations: m.evaluations,
            converged: m.converged,
        };
        Ok((m.x, value, trace))
    };
    let outcomes: Vec<Result<_>> = match config.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(|| seeds.par_iter().enumerate().map(run_one).collect()),
        None => seeds.par_iter().enumerate().map(run_one).collect(),
    };
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;

    // Strictly greater keeps the lowest restart index on ties.
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.1 > outcomes[best].1 {
            best = i;
        }
    }
    let trace = outcomes.iter().map(|o| o.2.clone()).collect();
    let schedule = QaoaSchedule::from_params(&outcomes[best].0)?;
    prepared.result(schedule, trace)
}
