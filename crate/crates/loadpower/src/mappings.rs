//! The rate function ω, the load mapping, and the extended power mapping.
//!
//! For stations `i`, users `j`, loads `ν`, per-RB powers `p`:
//!
//! ```text
//! ω_{i,j}(ν,p) = B·log2(1 + p_i·g_{i,j} / (Σ_{k≠i} ν_k·p_k·g_{k,j} + σ²))
//! ```
//!
//! The load mapping sends `ν` to `[Σ_{j∈N_i} d_j/(K·ω_{i,j}(ν,p))]_i` for a
//! fixed power `p`; its fixed point is the load induced by `p`. The power
//! mapping sends `p` to `[(p_i/ν_i)·Σ_{j∈N_i} d_j/(K·ω_{i,j}(ν,p))]_i` for a
//! fixed target load `ν`, continuously extended to `p_i = 0` by
//! `Σ_{j∈N_i} d_j·ln2/(K·B·g_{i,j}·ν_i)·(Σ_{k≠i} ν_k·p_k·g_{k,j} + σ²)`;
//! its fixed point is the power inducing `ν`. Both are standard interference
//! mappings: positive, scalable, and monotone on their domains.
//!
//! All evaluations are pure. Inner sums use compensated (Neumaier) summation
//! in a fixed index order, so results are bitwise-deterministic and station
//! components may be evaluated in parallel.

use crate::model::{LoadVector, ModelError, NetworkModel, PowerVector};
use rayon::prelude::*;
use std::f64::consts::LN_2;
use thiserror::Error;

/// Station count at or above which components are evaluated in parallel.
/// Components are independent, so the results are identical either way.
const PARALLEL_MIN_STATIONS: usize = 32;

#[derive(Debug, Error, PartialEq)]
pub enum MappingError {
    #[error("zero serving power at station {station}")]
    ZeroServingPower { station: usize },
    #[error("load map undefined at zero power (station {station})")]
    LoadMapZeroPower { station: usize },
    #[error("power map requires strictly positive target load (station {station})")]
    NonPositiveTargetLoad { station: usize },
    #[error("{name} entry at station {station} is negative or not finite")]
    InvalidEntry { name: &'static str, station: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Result of one mapping evaluation: strictly positive per-station outputs,
/// with the per-user addends behind each component available on request.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingEval {
    output: Vec<f64>,
    terms: Option<Vec<Vec<UserTerm>>>,
}

/// One user's contribution to a station component, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserTerm {
    pub user: usize,
    pub value: f64,
}

impl MappingEval {
    pub fn output(&self) -> &[f64] {
        &self.output
    }

    pub fn into_output(self) -> Vec<f64> {
        self.output
    }

    /// Per-station, per-user addends; present only for `*_with_terms` calls.
    pub fn terms(&self) -> Option<&[Vec<UserTerm>]> {
        self.terms.as_deref()
    }
}

/// Reliable downlink rate per resource block, bits/s.
///
/// Computable for any (station, user) pair, including cross rates for users
/// the station does not serve.
pub fn rate_per_rb(
    model: &NetworkModel,
    load: &LoadVector,
    power: &PowerVector,
    station: usize,
    user: usize,
) -> Result<f64, MappingError> {
    model.check_station_dim("load", load.len())?;
    model.check_station_dim("power", power.len())?;
    check_non_negative("load", load.values())?;
    check_non_negative("power", power.values())?;
    let p_i = power.values()[station];
    if p_i == 0.0 {
        return Err(MappingError::ZeroServingPower {
            station: station + 1,
        });
    }
    Ok(rate_unchecked(
        model,
        load.values(),
        power.values(),
        station,
        user,
    ))
}

/// Evaluate the load mapping at `load` for a fixed `power`.
pub fn load_map(
    model: &NetworkModel,
    power: &PowerVector,
    load: &LoadVector,
) -> Result<MappingEval, MappingError> {
    load_map_impl(model, power, load, false)
}

/// [`load_map`] plus the per-user addends behind each component.
pub fn load_map_with_terms(
    model: &NetworkModel,
    power: &PowerVector,
    load: &LoadVector,
) -> Result<MappingEval, MappingError> {
    load_map_impl(model, power, load, true)
}

/// Evaluate the extended power mapping at `power` for a fixed target `load`.
pub fn power_map(
    model: &NetworkModel,
    load: &LoadVector,
    power: &PowerVector,
) -> Result<MappingEval, MappingError> {
    power_map_impl(model, load, power, false)
}

/// [`power_map`] plus the per-user addends behind each component.
pub fn power_map_with_terms(
    model: &NetworkModel,
    load: &LoadVector,
    power: &PowerVector,
) -> Result<MappingEval, MappingError> {
    power_map_impl(model, load, power, true)
}

fn load_map_impl(
    model: &NetworkModel,
    power: &PowerVector,
    load: &LoadVector,
    with_terms: bool,
) -> Result<MappingEval, MappingError> {
    model.check_station_dim("power", power.len())?;
    model.check_station_dim("load", load.len())?;
    check_non_negative("load", load.values())?;
    check_non_negative("power", power.values())?;
    if let Some(i) = power.values().iter().position(|&p| p == 0.0) {
        return Err(MappingError::LoadMapZeroPower { station: i + 1 });
    }
    let (load_vals, power_vals) = (load.values(), power.values());
    Ok(eval_stations(model.num_stations(), with_terms, |i| {
        load_component(model, load_vals, power_vals, i)
    }))
}

fn power_map_impl(
    model: &NetworkModel,
    load: &LoadVector,
    power: &PowerVector,
    with_terms: bool,
) -> Result<MappingEval, MappingError> {
    model.check_station_dim("load", load.len())?;
    model.check_station_dim("power", power.len())?;
    check_non_negative("power", power.values())?;
    if let Some(i) = load
        .values()
        .iter()
        .position(|&nu| !nu.is_finite() || nu <= 0.0)
    {
        return Err(MappingError::NonPositiveTargetLoad { station: i + 1 });
    }
    let (load_vals, power_vals) = (load.values(), power.values());
    Ok(eval_stations(model.num_stations(), with_terms, |i| {
        power_component(model, load_vals, power_vals, i)
    }))
}

fn check_non_negative(name: &'static str, values: &[f64]) -> Result<(), MappingError> {
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(MappingError::InvalidEntry {
                name,
                station: i + 1,
            });
        }
    }
    Ok(())
}

fn eval_stations<F>(num_stations: usize, with_terms: bool, component: F) -> MappingEval
where
    F: Fn(usize) -> (f64, Vec<UserTerm>) + Sync,
{
    let pairs: Vec<(f64, Vec<UserTerm>)> = if num_stations >= PARALLEL_MIN_STATIONS {
        (0..num_stations).into_par_iter().map(&component).collect()
    } else {
        (0..num_stations).map(&component).collect()
    };
    let mut output = Vec::with_capacity(num_stations);
    let mut terms = with_terms.then(|| Vec::with_capacity(num_stations));
    for (value, user_terms) in pairs {
        output.push(value);
        if let Some(t) = &mut terms {
            t.push(user_terms);
        }
    }
    MappingEval { output, terms }
}

/// Interference plus noise seen by `user` from everyone but `station`:
/// `Σ_{k≠i} ν_k·p_k·g_{k,j} + σ²`.
fn interference_at_user(
    model: &NetworkModel,
    load: &[f64],
    power: &[f64],
    station: usize,
    user: usize,
) -> f64 {
    let mut sum = NeumaierSum::default();
    for k in 0..model.num_stations() {
        if k != station {
            sum.add(load[k] * power[k] * model.gain(k, user));
        }
    }
    sum.add(model.noise_power());
    sum.value()
}

fn rate_unchecked(
    model: &NetworkModel,
    load: &[f64],
    power: &[f64],
    station: usize,
    user: usize,
) -> f64 {
    let denom = interference_at_user(model, load, power, station, user);
    let snr = power[station] * model.gain(station, user) / denom;
    // log2(1+x) via ln_1p keeps the upper branch accurate down to p_i -> 0,
    // where it must agree with the ln 2 lower branch.
    model.rb_bandwidth() * snr.ln_1p() / LN_2
}

fn load_component(
    model: &NetworkModel,
    load: &[f64],
    power: &[f64],
    station: usize,
) -> (f64, Vec<UserTerm>) {
    let k = model.num_rb() as f64;
    let mut sum = NeumaierSum::default();
    let mut terms = Vec::with_capacity(model.users_of(station).len());
    for &j in model.users_of(station) {
        let value = model.demand(j) / (k * rate_unchecked(model, load, power, station, j));
        sum.add(value);
        terms.push(UserTerm { user: j, value });
    }
    (sum.value(), terms)
}

fn power_component(
    model: &NetworkModel,
    target_load: &[f64],
    power: &[f64],
    station: usize,
) -> (f64, Vec<UserTerm>) {
    let nu_i = target_load[station];
    let p_i = power[station];
    // The branch condition is exactly p_i = 0; the upper branch is defined
    // for every p_i > 0 and a positive threshold would change results.
    if p_i != 0.0 {
        let (load_value, terms) = load_component(model, target_load, power, station);
        let scale = p_i / nu_i;
        let scaled = terms
            .iter()
            .map(|t| UserTerm {
                user: t.user,
                value: scale * t.value,
            })
            .collect();
        (scale * load_value, scaled)
    } else {
        let kb = model.num_rb() as f64 * model.rb_bandwidth();
        let mut sum = NeumaierSum::default();
        let mut terms = Vec::with_capacity(model.users_of(station).len());
        for &j in model.users_of(station) {
            let value = model.demand(j) * LN_2 / (kb * model.gain(station, j) * nu_i)
                * interference_at_user(model, target_load, power, station, j);
            sum.add(value);
            terms.push(UserTerm { user: j, value });
        }
        (sum.value(), terms)
    }
}

/// Compensated summation (Neumaier variant of Kahan's algorithm).
#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
