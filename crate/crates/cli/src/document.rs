//! JSON shape of a single run.

use std::collections::BTreeMap;

use cqaoa::analysis::MixerReport;
use cqaoa::engine::{RestartTrace, RunConfig, RunResult};
use cqaoa::problems::ProblemInstance;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub problem: ProblemInstance,
    pub config: RunConfig,
    pub result: ResultBody,
    pub mixer_report: MixerReport,
    /// Wall-clock time; the only field that differs between identical runs.
    pub duration_seconds: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultBody {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub expectation: f64,
    pub optimal_probability: f64,
    pub infeasible_probability: f64,
    /// Bit strings, highest qubit first.
    pub optima: Vec<String>,
    /// Bit string -> probability, for probabilities at or above 1e-12.
    pub distribution: BTreeMap<String, f64>,
    pub trace: Vec<RestartTrace>,
    pub projected_cost: Option<Vec<f64>>,
}

impl ResultDocument {
    pub fn new(
        problem: &ProblemInstance,
        config: &RunConfig,
        result: &RunResult,
        mixer_report: MixerReport,
        duration_seconds: f64,
    ) -> Self {
        let n = problem.qubit_count();
        let result = ResultBody {
            gammas: result.schedule.gammas().to_vec(),
            betas: result.schedule.betas().to_vec(),
            expectation: result.expectation,
            optimal_probability: result.optimal_probability,
            infeasible_probability: result.infeasible_probability,
            optima: result.optima.iter().map(|x| x.to_bits(n)).collect(),
            distribution: result.distribution.iter().map(|(x, &p)| (x.to_bits(n), p)).collect(),
            trace: result.trace.clone(),
            projected_cost: result.projected_cost.clone(),
        };
        Self {
            schema_version: SCHEMA_VERSION,
            problem: problem.clone(),
            config: config.clone(),
            result,
            mixer_report,
            duration_seconds,
        }
    }
}
