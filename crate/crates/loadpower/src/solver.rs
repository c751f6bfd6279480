//! Fixed-point computation for both coupled directions, feasibility
//! certificates, and the bracketed power planner.
//!
//! Both the load mapping (fixed power) and the extended power mapping (fixed
//! target load) are standard interference mappings, so a fixed point, when it
//! exists, is unique and is the limit of plain repeated application from any
//! non-negative start. Starting from zero gives a componentwise non-decreasing
//! iterate sequence; starting from a certificate point `x` with
//! `map(x) ≤ x` gives a non-increasing one, and such a point also proves the
//! fixed point exists.
//!
//! The planner exploits this: to move a consistent pair `(ν′, p′)` to a
//! higher target load `ν″`, it iterates the power mapping for `ν″` in
//! lockstep from below (zero) and from above (`p′` scaled by `ν′/ν″`). The
//! gap `ε̃ = ‖lower − upper‖_∞` never increases and bounds the distance of
//! either iterate from the true fixed point, so every iteration carries a
//! certified error.

use crate::mappings::{load_map, power_map, MappingError};
use crate::model::{LoadVector, NetworkModel, PowerVector};
use thiserror::Error;

/// Convergence test applied to the ∞-norm of successive iterate differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvergenceCriterion {
    /// `‖x_{n+1} − x_n‖_∞ ≤ tolerance`.
    #[default]
    Absolute,
    /// `‖x_{n+1} − x_n‖_∞ ≤ tolerance · ‖x_{n+1}‖_∞`.
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Any iterate component above this aborts the solve; growth past it is
    /// read as "no fixed point found", never as proof of infeasibility.
    pub divergence_cap: f64,
    pub record_trace: bool,
    pub criterion: ConvergenceCriterion,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 100_000,
            divergence_cap: 1e12,
            record_trace: false,
            criterion: ConvergenceCriterion::Absolute,
        }
    }
}

impl SolverConfig {
    fn assert_valid(&self) {
        assert!(self.tolerance > 0.0, "tolerance must be > 0");
        assert!(self.max_iterations >= 1, "max_iterations must be >= 1");
        assert!(self.divergence_cap > 0.0, "divergence_cap must be > 0");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterationsReached,
    DivergenceCapExceeded,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::MaxIterationsReached => "MaxIterationsReached",
            SolveStatus::DivergenceCapExceeded => "DivergenceCapExceeded",
        }
    }
}

/// Outcome of a fixed-point solve.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub solution: Vec<f64>,
    /// ∞-norm of the last successive-iterate difference.
    pub residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    /// All iterates including the start, when requested.
    pub trace: Option<Vec<Vec<f64>>>,
}

/// One of the two coupled mappings with its fixed side bound.
#[derive(Debug, Clone, Copy)]
pub enum InterferenceMap<'a> {
    LoadGivenPower {
        model: &'a NetworkModel,
        power: &'a PowerVector,
    },
    PowerGivenLoad {
        model: &'a NetworkModel,
        load: &'a LoadVector,
    },
}

impl InterferenceMap<'_> {
    pub fn dimension(&self) -> usize {
        match self {
            InterferenceMap::LoadGivenPower { model, .. }
            | InterferenceMap::PowerGivenLoad { model, .. } => model.num_stations(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, MappingError> {
        match self {
            InterferenceMap::LoadGivenPower { model, power } => {
                load_map(model, power, &LoadVector::new(x.to_vec())).map(|e| e.into_output())
            }
            InterferenceMap::PowerGivenLoad { model, load } => {
                power_map(model, load, &PowerVector::new(x.to_vec())).map(|e| e.into_output())
            }
        }
    }
}

/// True iff `map(candidate) ≤ candidate` componentwise, which certifies that
/// the mapping's fixed point exists (and is unique).
pub fn check_certificate(
    map: &InterferenceMap<'_>,
    candidate: &[f64],
) -> Result<bool, MappingError> {
    let value = map.eval(candidate)?;
    Ok(value.iter().zip(candidate).all(|(v, c)| v <= c))
}

/// Iterate the load mapping to the load induced by `power`.
///
/// `initial` defaults to the zero vector, which makes the recorded trace
/// componentwise non-decreasing.
pub fn solve_load(
    model: &NetworkModel,
    power: &PowerVector,
    config: &SolverConfig,
    initial: Option<&LoadVector>,
) -> Result<FixedPointReport, MappingError> {
    let start = match initial {
        Some(v) => v.values().to_vec(),
        None => vec![0.0; model.num_stations()],
    };
    iterate(
        &InterferenceMap::LoadGivenPower { model, power },
        config,
        start,
    )
}

/// Iterate the extended power mapping to the power inducing `target_load`.
pub fn solve_power(
    model: &NetworkModel,
    target_load: &LoadVector,
    config: &SolverConfig,
    initial: Option<&PowerVector>,
) -> Result<FixedPointReport, MappingError> {
    let start = match initial {
        Some(v) => v.values().to_vec(),
        None => vec![0.0; model.num_stations()],
    };
    iterate(
        &InterferenceMap::PowerGivenLoad {
            model,
            load: target_load,
        },
        config,
        start,
    )
}

fn iterate(
    map: &InterferenceMap<'_>,
    config: &SolverConfig,
    start: Vec<f64>,
) -> Result<FixedPointReport, MappingError> {
    config.assert_valid();
    let mut x = start;
    let mut trace = config.record_trace.then(|| vec![x.clone()]);
    let mut residual = f64::INFINITY;
    for n in 1..=config.max_iterations {
        let next = map.eval(&x)?;
        residual = inf_norm_diff(&next, &x);
        let diverged = next
            .iter()
            .any(|v| !v.is_finite() || v.abs() > config.divergence_cap);
        if let Some(t) = &mut trace {
            t.push(next.clone());
        }
        x = next;
        if diverged {
            return Ok(FixedPointReport {
                solution: x,
                residual,
                iterations: n,
                status: SolveStatus::DivergenceCapExceeded,
                trace,
            });
        }
        let converged = match config.criterion {
            ConvergenceCriterion::Absolute => residual <= config.tolerance,
            ConvergenceCriterion::Relative => residual <= config.tolerance * inf_norm(&x),
        };
        if converged {
            return Ok(FixedPointReport {
                solution: x,
                residual,
                iterations: n,
                status: SolveStatus::Converged,
                trace,
            });
        }
    }
    Ok(FixedPointReport {
        solution: x,
        residual,
        iterations: config.max_iterations,
        status: SolveStatus::MaxIterationsReached,
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Target certified error ε for the returned power estimate.
    pub epsilon: f64,
    /// Iteration budget `m`; `None` runs until ε is reached. The loop guard
    /// is `n ≤ m`, so a bounded run may take m+1 iterations.
    pub max_iterations: Option<usize>,
    /// Accepted relative ∞-norm residual of the (current load, current
    /// power) pair under the power mapping.
    pub consistency_tol: f64,
    pub record_trace: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-9,
            max_iterations: None,
            consistency_tol: 1e-6,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanStatus {
    PrecisionReached,
    MaxIterationsReached,
}

impl PlanStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlanStatus::PrecisionReached => "PrecisionReached",
            PlanStatus::MaxIterationsReached => "MaxIterationsReached",
        }
    }
}

/// One recorded planner iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketStep {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub gap: f64,
}

/// Planner output: the final upper iterate and its certified error.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketReport {
    /// Final upper iterate; within `certified_error` of the true fixed point.
    pub power_estimate: PowerVector,
    /// Final `ε̃ = ‖lower − upper‖_∞`.
    pub certified_error: f64,
    pub iterations: usize,
    pub status: PlanStatus,
    /// Bracket history including the starting bracket, when requested.
    pub bracket_trace: Option<Vec<BracketStep>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum PlannerError {
    #[error("target load at station {station} is below the current load")]
    TargetBelowCurrent { station: usize },
    #[error("target load equals the current load; nothing to plan")]
    TargetUnchanged,
    #[error(
        "inputs are not a load/power fixed-point pair \
         (relative residual {residual:.3e} > {tolerance:.3e})"
    )]
    InconsistentPair { residual: f64, tolerance: f64 },
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

/// Unbounded planner runs stop once the gap has not improved for this many
/// iterations; at that point the bracket has hit the arithmetic's floor.
const STALL_LIMIT: usize = 10_000;

/// Compute the power assignment for a load increase from `current_load` to
/// `target_load`, with a certified error bound.
///
/// Starts the upper sequence at `p_i = p′_i·ν′_i/ν″_i`, which is a
/// certificate point of the target mapping, and the lower sequence at zero;
/// both converge monotonically to the new power from opposite sides.
pub fn plan_power_for_load_increase(
    model: &NetworkModel,
    current_load: &LoadVector,
    current_power: &PowerVector,
    target_load: &LoadVector,
    config: &PlannerConfig,
) -> Result<BracketReport, PlannerError> {
    assert!(config.epsilon > 0.0, "epsilon must be > 0");
    model.check_station_dim("target_load", target_load.len()).map_err(MappingError::from)?;

    for (i, (t, c)) in target_load
        .values()
        .iter()
        .zip(current_load.values())
        .enumerate()
    {
        if t < c {
            return Err(PlannerError::TargetBelowCurrent { station: i + 1 });
        }
    }
    if target_load.values() == current_load.values() {
        return Err(PlannerError::TargetUnchanged);
    }

    // The pair must already sit on the coupling fixed point, up to solver
    // precision, or the scaled start is not a valid upper bracket.
    let mapped = power_map(model, current_load, current_power)?;
    let residual = inf_norm_diff(mapped.output(), current_power.values())
        / inf_norm(current_power.values());
    if residual > config.consistency_tol {
        return Err(PlannerError::InconsistentPair {
            residual,
            tolerance: config.consistency_tol,
        });
    }

    let upper_start: Vec<f64> = current_power
        .values()
        .iter()
        .zip(current_load.values().iter().zip(target_load.values()))
        .map(|(p, (current, target))| p * current / target)
        .collect();
    let mut lower = vec![0.0; model.num_stations()];
    let mut upper = upper_start;
    let mut gap = inf_norm(&upper);
    let mut trace = config.record_trace.then(|| {
        vec![BracketStep {
            lower: lower.clone(),
            upper: upper.clone(),
            gap,
        }]
    });

    let map = InterferenceMap::PowerGivenLoad {
        model,
        load: target_load,
    };
    let mut iterations = 0usize;
    let mut best_gap = gap;
    let mut stalled = 0usize;
    while gap > config.epsilon && config.max_iterations.is_none_or(|m| iterations <= m) {
        let (lower_next, upper_next) = rayon::join(|| map.eval(&lower), || map.eval(&upper));
        lower = lower_next?;
        upper = upper_next?;
        gap = inf_norm_diff(&lower, &upper);
        iterations += 1;
        if let Some(t) = &mut trace {
            t.push(BracketStep {
                lower: lower.clone(),
                upper: upper.clone(),
                gap,
            });
        }
        if config.max_iterations.is_none() {
            if gap < best_gap {
                best_gap = gap;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= STALL_LIMIT {
                    break;
                }
            }
        }
    }

    let status = if gap <= config.epsilon {
        PlanStatus::PrecisionReached
    } else {
        PlanStatus::MaxIterationsReached
    };
    Ok(BracketReport {
        power_estimate: PowerVector::new(upper),
        certified_error: gap,
        iterations,
        status,
        bracket_trace: trace,
    })
}

pub(crate) fn inf_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub(crate) fn inf_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}
