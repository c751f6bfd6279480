//! Static network scenario and the load/power vector types.
//!
//! A [`NetworkModel`] is immutable after construction: `M` base stations,
//! `N` users, a dense `M×N` linear-scale gain matrix, per-user rate demands,
//! the user→station assignment, and the resource-grid constants `K`, `B`,
//! `σ²`. Shape consistency is enforced by the constructor; value-level rules
//! (strict positivity, serving range, no empty stations) are reported by
//! [`NetworkModel::validate`] as data rather than failures.

use thiserror::Error;

/// Structural errors raised while assembling a model or combining it with
/// per-station vectors.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("gains matrix must not be empty")]
    EmptyGains,
    #[error("gains row {row} has {found} entries, expected {expected}")]
    RaggedGains {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("demands has {found} entries, expected {expected}")]
    DemandsLength { found: usize, expected: usize },
    #[error("serving has {found} entries, expected {expected}")]
    ServingLength { found: usize, expected: usize },
    #[error("{name} has {found} entries, expected {expected} (one per station)")]
    DimensionMismatch {
        name: &'static str,
        found: usize,
        expected: usize,
    },
}

/// A violation of one of the model's value-level invariants.
///
/// Indices in the rendered message are 1-based, matching the file format.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("gains[{station}][{user}] not > 0")]
    NonPositiveGain { station: usize, user: usize },
    #[error("demands[{user}] not > 0")]
    NonPositiveDemand { user: usize },
    #[error("serving[{user}] = {station} out of range [1, {num_stations}]")]
    ServingOutOfRange {
        user: usize,
        station: usize,
        num_stations: usize,
    },
    #[error("station {station} serves no user")]
    EmptyStation { station: usize },
    #[error("num_rb not >= 1")]
    NonPositiveNumRb,
    #[error("rb_bandwidth not > 0")]
    NonPositiveBandwidth,
    #[error("noise_power not > 0")]
    NonPositiveNoise,
}

/// Outcome of [`NetworkModel::validate`]: empty means the model is valid.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationResult {
    violations: Vec<Violation>,
}

impl ValidationResult {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

/// Immutable network scenario.
///
/// Stations and users are indexed from 0 in this API; file formats and
/// rendered messages use 1-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    num_stations: usize,
    num_users: usize,
    /// Row-major M×N linear-scale gains.
    gains: Vec<f64>,
    /// Per-user demanded rate, bits/s.
    demands: Vec<f64>,
    /// Serving station per user, 0-based.
    serving: Vec<usize>,
    /// Users attached to each station, ascending, derived from `serving`.
    users_of: Vec<Vec<usize>>,
    num_rb: u64,
    rb_bandwidth: f64,
    noise_power: f64,
}

impl NetworkModel {
    /// Assemble a model from row-per-station gains. Only shape consistency is
    /// checked here; call [`validate`](Self::validate) for the value rules.
    pub fn new(
        gains: Vec<Vec<f64>>,
        demands: Vec<f64>,
        serving: Vec<usize>,
        num_rb: u64,
        rb_bandwidth: f64,
        noise_power: f64,
    ) -> Result<Self, ModelError> {
        let num_stations = gains.len();
        if num_stations == 0 {
            return Err(ModelError::EmptyGains);
        }
        let num_users = gains[0].len();
        if num_users == 0 {
            return Err(ModelError::EmptyGains);
        }
        for (row, r) in gains.iter().enumerate() {
            if r.len() != num_users {
                return Err(ModelError::RaggedGains {
                    row,
                    found: r.len(),
                    expected: num_users,
                });
            }
        }
        if demands.len() != num_users {
            return Err(ModelError::DemandsLength {
                found: demands.len(),
                expected: num_users,
            });
        }
        if serving.len() != num_users {
            return Err(ModelError::ServingLength {
                found: serving.len(),
                expected: num_users,
            });
        }

        let mut users_of = vec![Vec::new(); num_stations];
        for (user, &station) in serving.iter().enumerate() {
            // Out-of-range assignments are reported by validate(), not here.
            if station < num_stations {
                users_of[station].push(user);
            }
        }

        Ok(Self {
            num_stations,
            num_users,
            gains: gains.into_iter().flatten().collect(),
            demands,
            serving,
            users_of,
            num_rb,
            rb_bandwidth,
            noise_power,
        })
    }

    pub fn num_stations(&self) -> usize {
        self.num_stations
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    /// Linear-scale gain between station `i` and user `j`.
    pub fn gain(&self, station: usize, user: usize) -> f64 {
        self.gains[station * self.num_users + user]
    }

    /// Gain matrix as row-per-station vectors.
    pub fn gain_rows(&self) -> Vec<Vec<f64>> {
        self.gains
            .chunks(self.num_users)
            .map(|r| r.to_vec())
            .collect()
    }

    /// Demanded rate of user `j`, bits/s.
    pub fn demand(&self, user: usize) -> f64 {
        self.demands[user]
    }

    pub fn demands(&self) -> &[f64] {
        &self.demands
    }

    /// Serving station of user `j`, 0-based.
    pub fn serving_station(&self, user: usize) -> usize {
        self.serving[user]
    }

    pub fn serving(&self) -> &[usize] {
        &self.serving
    }

    /// Users attached to station `i`, ascending.
    pub fn users_of(&self, station: usize) -> &[usize] {
        &self.users_of[station]
    }

    pub fn num_rb(&self) -> u64 {
        self.num_rb
    }

    pub fn rb_bandwidth(&self) -> f64 {
        self.rb_bandwidth
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    /// Check every value-level invariant; violations are returned as data.
    pub fn validate(&self) -> ValidationResult {
        let mut violations = Vec::new();
        for i in 0..self.num_stations {
            for j in 0..self.num_users {
                // NaN is flagged like any other bad gain.
                let g = self.gain(i, j);
                if !g.is_finite() || g <= 0.0 {
                    violations.push(Violation::NonPositiveGain {
                        station: i + 1,
                        user: j + 1,
                    });
                }
            }
        }
        for (j, &d) in self.demands.iter().enumerate() {
            if !d.is_finite() || d <= 0.0 {
                violations.push(Violation::NonPositiveDemand { user: j + 1 });
            }
        }
        for (j, &s) in self.serving.iter().enumerate() {
            if s >= self.num_stations {
                violations.push(Violation::ServingOutOfRange {
                    user: j + 1,
                    station: s + 1,
                    num_stations: self.num_stations,
                });
            }
        }
        for (i, users) in self.users_of.iter().enumerate() {
            if users.is_empty() {
                violations.push(Violation::EmptyStation { station: i + 1 });
            }
        }
        if self.num_rb == 0 {
            violations.push(Violation::NonPositiveNumRb);
        }
        if !self.rb_bandwidth.is_finite() || self.rb_bandwidth <= 0.0 {
            violations.push(Violation::NonPositiveBandwidth);
        }
        if !self.noise_power.is_finite() || self.noise_power <= 0.0 {
            violations.push(Violation::NonPositiveNoise);
        }
        ValidationResult { violations }
    }

    /// Per-station total transmit power `K·ν_i·p_i`, watts.
    pub fn total_power(
        &self,
        load: &LoadVector,
        power: &PowerVector,
    ) -> Result<Vec<f64>, ModelError> {
        self.check_station_dim("load", load.len())?;
        self.check_station_dim("power", power.len())?;
        let k = self.num_rb as f64;
        Ok(load
            .values()
            .iter()
            .zip(power.values())
            .map(|(nu, p)| k * nu * p)
            .collect())
    }

    pub(crate) fn check_station_dim(
        &self,
        name: &'static str,
        found: usize,
    ) -> Result<(), ModelError> {
        if found != self.num_stations {
            return Err(ModelError::DimensionMismatch {
                name,
                found,
                expected: self.num_stations,
            });
        }
        Ok(())
    }
}

/// Per-station load: the fraction of the `K` resource blocks requested.
///
/// Entries may exceed 1; [`is_operational`](Self::is_operational) reports
/// whether the vector is physically servable within the resource grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadVector(Vec<f64>);

impl LoadVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// True when every component is at most 1.
    pub fn is_operational(&self) -> bool {
        self.0.iter().all(|&v| v <= 1.0)
    }
}

impl From<Vec<f64>> for LoadVector {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

/// Per-station transmit power per resource block, watts.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerVector(Vec<f64>);

impl PowerVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for PowerVector {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}
