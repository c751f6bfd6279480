//! Random scenario generation and scenario/result file I/O.
//!
//! Scenario files are self-describing JSON: dimensions, the dense gain
//! matrix, demands, the 1-based serving assignment, and the grid constants,
//! each physical quantity tagged with an explicit unit. Files are written in
//! canonical units (linear gains, bps, Hz, W) with shortest round-trip float
//! formatting, so save → load → save is byte-identical and every float
//! survives exactly. The loader normalizes the small set of accepted
//! alternative units (dB gains, kbps/Mbps, kHz/MHz, mW/dBm).

use crate::model::{ModelError, NetworkModel};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: serving[{user}] must be >= 1 (station indices are 1-based)")]
    ZeroServingIndex { path: String, user: usize },
    #[error("{path}: unknown {field} unit \"{unit}\"")]
    UnknownUnit {
        path: String,
        field: &'static str,
        unit: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Parameters for random scenario generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub num_stations: usize,
    pub num_users: usize,
    /// Side of the square deployment area, meters.
    pub area_side: f64,
    pub pathloss_exponent: f64,
    /// Linear gain at 1 m.
    pub reference_gain: f64,
    /// Per-user demand drawn uniformly from this range, bits/s.
    pub demand_range: (f64, f64),
    pub rb_bandwidth: f64,
    pub num_rb: u64,
    pub noise_power: f64,
    pub rng_seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            num_stations: 3,
            num_users: 30,
            area_side: 500.0,
            pathloss_exponent: 3.5,
            reference_gain: 1e-2,
            demand_range: (5e5, 2e6),
            rb_bandwidth: 180e3,
            num_rb: 100,
            // Kept well above per-RB thermal noise so generated instances sit
            // in a balanced noise/interference regime; deeply
            // interference-dominated scenarios make the power-direction
            // iteration contract at 1 minus the noise share and need far more
            // iterations than the default cap.
            noise_power: 1e-13,
            rng_seed: 0,
        }
    }
}

impl GeneratorSpec {
    fn check(&self) -> Result<(), ScenarioError> {
        let bad = |msg: &str| Err(ScenarioError::InvalidSpec(msg.to_string()));
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.num_stations == 0 {
            return bad("num_stations must be >= 1");
        }
        if self.num_users == 0 {
            return bad("num_users must be >= 1");
        }
        if !positive(self.area_side) {
            return bad("area_side must be > 0");
        }
        if !self.pathloss_exponent.is_finite() || self.pathloss_exponent < 2.0 {
            return bad("pathloss_exponent must be >= 2");
        }
        if !positive(self.reference_gain) {
            return bad("reference_gain must be > 0");
        }
        if !positive(self.demand_range.0) || self.demand_range.0 > self.demand_range.1 {
            return bad("demand_range must satisfy 0 < min <= max");
        }
        if !positive(self.rb_bandwidth) {
            return bad("rb_bandwidth must be > 0");
        }
        if self.num_rb == 0 {
            return bad("num_rb must be >= 1");
        }
        if !positive(self.noise_power) {
            return bad("noise_power must be > 0");
        }
        Ok(())
    }
}

/// Generate a scenario: stations and users placed uniformly in the square,
/// distance-law gains with a 1 m floor, max-gain association, and uniform
/// demands. Stations left without users are removed and indices compacted.
/// Fully determined by `rng_seed`.
pub fn generate(spec: &GeneratorSpec) -> Result<NetworkModel, ScenarioError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    // Sampling order is part of the determinism contract: station positions,
    // then user positions, then demands.
    let stations: Vec<(f64, f64)> = (0..spec.num_stations)
        .map(|_| {
            (
                rng.random_range(0.0..spec.area_side),
                rng.random_range(0.0..spec.area_side),
            )
        })
        .collect();
    let users: Vec<(f64, f64)> = (0..spec.num_users)
        .map(|_| {
            (
                rng.random_range(0.0..spec.area_side),
                rng.random_range(0.0..spec.area_side),
            )
        })
        .collect();
    let demands: Vec<f64> = (0..spec.num_users)
        .map(|_| {
            if spec.demand_range.0 == spec.demand_range.1 {
                spec.demand_range.0
            } else {
                rng.random_range(spec.demand_range.0..spec.demand_range.1)
            }
        })
        .collect();

    let gain = |s: (f64, f64), u: (f64, f64)| {
        let dist = ((s.0 - u.0).powi(2) + (s.1 - u.1).powi(2)).sqrt().max(1.0);
        spec.reference_gain * dist.powf(-spec.pathloss_exponent)
    };
    let all_gains: Vec<Vec<f64>> = stations
        .iter()
        .map(|&s| users.iter().map(|&u| gain(s, u)).collect())
        .collect();

    // Max-gain association; ties go to the lower station index.
    let serving_full: Vec<usize> = (0..spec.num_users)
        .map(|j| {
            (0..spec.num_stations)
                .max_by(|&a, &b| all_gains[a][j].partial_cmp(&all_gains[b][j]).unwrap())
                .unwrap()
        })
        .collect();

    let kept: Vec<usize> = (0..spec.num_stations)
        .filter(|i| serving_full.contains(i))
        .collect();
    let remap: Vec<Option<usize>> = {
        let mut v = vec![None; spec.num_stations];
        for (new, &old) in kept.iter().enumerate() {
            v[old] = Some(new);
        }
        v
    };
    let gains: Vec<Vec<f64>> = kept.iter().map(|&i| all_gains[i].clone()).collect();
    let serving: Vec<usize> = serving_full
        .iter()
        .map(|&i| remap[i].expect("serving station was kept"))
        .collect();

    Ok(NetworkModel::new(
        gains,
        demands,
        serving,
        spec.num_rb,
        spec.rb_bandwidth,
        spec.noise_power,
    )?)
}

/// A network model plus optional reference solutions, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub model: NetworkModel,
    pub reference_load: Option<ReferenceSolution>,
    pub reference_power: Option<ReferenceSolution>,
}

impl Scenario {
    pub fn from_model(model: NetworkModel) -> Self {
        Self {
            model,
            reference_load: None,
            reference_power: None,
        }
    }
}

/// A stored per-station solution with the solver settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub values: Vec<f64>,
    pub solver: SolverMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub tolerance: f64,
    pub max_iterations: u64,
    pub iterations: u64,
    pub residual: f64,
    pub status: String,
}

const SCENARIO_FORMAT: &str = "loadpower-scenario";
const RESULT_FORMAT: &str = "loadpower-result";

#[derive(Serialize, Deserialize)]
struct ScenarioFileDoc {
    format: String,
    version: u32,
    scenario: ScenarioDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference_load: Option<ReferenceSolution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference_power: Option<ReferenceSolution>,
}

#[derive(Serialize, Deserialize)]
struct ScenarioDoc {
    num_stations: usize,
    num_users: usize,
    num_rb: u64,
    rb_bandwidth: f64,
    rb_bandwidth_unit: String,
    noise_power: f64,
    noise_power_unit: String,
    gain_unit: String,
    gains: Vec<Vec<f64>>,
    demand_unit: String,
    demands: Vec<f64>,
    /// 1-based station index per user.
    serving: Vec<usize>,
}

/// Write a scenario in canonical units (linear, bps, Hz, W).
pub fn save_scenario(scenario: &Scenario, path: &Path) -> Result<(), ScenarioError> {
    let model = &scenario.model;
    let doc = ScenarioFileDoc {
        format: SCENARIO_FORMAT.to_string(),
        version: 1,
        scenario: ScenarioDoc {
            num_stations: model.num_stations(),
            num_users: model.num_users(),
            num_rb: model.num_rb(),
            rb_bandwidth: model.rb_bandwidth(),
            rb_bandwidth_unit: "Hz".to_string(),
            noise_power: model.noise_power(),
            noise_power_unit: "W".to_string(),
            gain_unit: "linear".to_string(),
            gains: model.gain_rows(),
            demand_unit: "bps".to_string(),
            demands: model.demands().to_vec(),
            serving: model.serving().iter().map(|&s| s + 1).collect(),
        },
        reference_load: scenario.reference_load.clone(),
        reference_power: scenario.reference_power.clone(),
    };
    write_json(&doc, path)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioFileDoc = read_json(path)?;
    let path_str = path.display().to_string();
    if doc.format != SCENARIO_FORMAT {
        return Err(ScenarioError::Parse {
            path: path_str,
            message: format!("unexpected format \"{}\"", doc.format),
        });
    }
    let s = doc.scenario;
    if s.gains.len() != s.num_stations {
        return Err(ScenarioError::Parse {
            path: path_str,
            message: format!(
                "gains has {} rows, num_stations is {}",
                s.gains.len(),
                s.num_stations
            ),
        });
    }
    if s.gains.iter().any(|r| r.len() != s.num_users) {
        return Err(ScenarioError::Parse {
            path: path_str,
            message: format!("every gains row must have num_users = {} entries", s.num_users),
        });
    }

    let gain_scale: fn(f64) -> f64 = match s.gain_unit.as_str() {
        "linear" => |g| g,
        "dB" => |db| 10f64.powf(db / 10.0),
        other => {
            return Err(ScenarioError::UnknownUnit {
                path: path_str,
                field: "gain",
                unit: other.to_string(),
            })
        }
    };
    let demand_factor = unit_factor(&path_str, "demand", &s.demand_unit, &[
        ("bps", 1.0),
        ("kbps", 1e3),
        ("Mbps", 1e6),
    ])?;
    let bandwidth_factor = unit_factor(&path_str, "rb_bandwidth", &s.rb_bandwidth_unit, &[
        ("Hz", 1.0),
        ("kHz", 1e3),
        ("MHz", 1e6),
    ])?;
    let noise = match s.noise_power_unit.as_str() {
        "W" => s.noise_power,
        "mW" => s.noise_power * 1e-3,
        "dBm" => 10f64.powf((s.noise_power - 30.0) / 10.0),
        other => {
            return Err(ScenarioError::UnknownUnit {
                path: path_str,
                field: "noise_power",
                unit: other.to_string(),
            })
        }
    };

    let gains = s
        .gains
        .into_iter()
        .map(|row| row.into_iter().map(gain_scale).collect())
        .collect();
    let demands = s.demands.into_iter().map(|d| d * demand_factor).collect();
    let mut serving = Vec::with_capacity(s.serving.len());
    for (j, &station) in s.serving.iter().enumerate() {
        if station == 0 {
            return Err(ScenarioError::ZeroServingIndex {
                path: path_str,
                user: j + 1,
            });
        }
        serving.push(station - 1);
    }

    let model = NetworkModel::new(
        gains,
        demands,
        serving,
        s.num_rb,
        s.rb_bandwidth * bandwidth_factor,
        noise,
    )?;
    Ok(Scenario {
        model,
        reference_load: doc.reference_load,
        reference_power: doc.reference_power,
    })
}

fn unit_factor(
    path: &str,
    field: &'static str,
    unit: &str,
    table: &[(&str, f64)],
) -> Result<f64, ScenarioError> {
    table
        .iter()
        .find(|(name, _)| *name == unit)
        .map(|(_, factor)| *factor)
        .ok_or_else(|| ScenarioError::UnknownUnit {
            path: path.to_string(),
            field,
            unit: unit.to_string(),
        })
}

/// Machine-readable outcome of one CLI command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub format: String,
    pub version: u32,
    pub command: String,
    pub status: String,
    pub iterations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operational: Option<bool>,
    /// Per-station K·ν_i·p_i, watts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_power: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_before: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_after: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_delta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roundtrip_error: Option<f64>,
}

impl ResultBundle {
    pub fn new(command: &str, status: &str, iterations: u64) -> Self {
        Self {
            format: RESULT_FORMAT.to_string(),
            version: 1,
            command: command.to_string(),
            status: status.to_string(),
            iterations,
            tolerance: None,
            max_iterations: None,
            divergence_cap: None,
            epsilon: None,
            residual: None,
            certified_error: None,
            load: None,
            power: None,
            operational: None,
            total_power: None,
            energy_before: None,
            energy_after: None,
            energy_delta: None,
            roundtrip_error: None,
        }
    }
}

pub fn save_results(bundle: &ResultBundle, path: &Path) -> Result<(), ScenarioError> {
    write_json(bundle, path)
}

pub fn load_results(path: &Path) -> Result<ResultBundle, ScenarioError> {
    read_json(path)
}

pub fn load_generator_spec(path: &Path) -> Result<GeneratorSpec, ScenarioError> {
    read_json(path)
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), ScenarioError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| ScenarioError::Write {
        path: path.display().to_string(),
        source: e.into(),
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| ScenarioError::Write {
        path: path.display().to_string(),
        source: e,
    })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|e| ScenarioError::Read {
        path: path.display().to_string(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| ScenarioError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LoadVector, PowerVector};
    use crate::solver::{solve_load, SolverConfig};

    fn spec(stations: usize, users: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            num_stations: stations,
            num_users: users,
            rng_seed: seed,
            ..GeneratorSpec::default()
        }
    }

    #[test]
    fn minimal_generation_is_valid() {
        let model = generate(&spec(1, 1, 42)).unwrap();
        assert_eq!(model.num_stations(), 1);
        assert_eq!(model.num_users(), 1);
        assert!(model.validate().is_ok());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(&spec(4, 20, 7)).unwrap();
        let b = generate(&spec(4, 20, 7)).unwrap();
        assert_eq!(a, b);
        let c = generate(&spec(4, 20, 8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empty_stations_are_removed() {
        let model = generate(&spec(5, 3, 123)).unwrap();
        assert!(model.num_stations() <= 3);
        assert!(model.validate().is_ok());
    }

    #[test]
    fn generated_models_are_valid_across_seeds() {
        for seed in 0..50 {
            let model = generate(&spec(6, 25, seed)).unwrap();
            assert!(model.validate().is_ok(), "seed {seed}");
        }
    }

    #[test]
    fn degenerate_specs_are_rejected() {
        assert!(matches!(
            generate(&spec(3, 0, 1)),
            Err(ScenarioError::InvalidSpec(_))
        ));
        assert!(matches!(
            generate(&GeneratorSpec {
                pathloss_exponent: 1.5,
                ..spec(3, 5, 1)
            }),
            Err(ScenarioError::InvalidSpec(_))
        ));
        assert!(matches!(
            generate(&GeneratorSpec {
                demand_range: (2e6, 1e6),
                ..spec(3, 5, 1)
            }),
            Err(ScenarioError::InvalidSpec(_))
        ));
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.json");
        let model = generate(&spec(4, 20, 99)).unwrap();
        let scenario = Scenario::from_model(model);
        save_scenario(&scenario, &path).unwrap();
        let loaded = load_scenario(&path).unwrap();
        assert_eq!(scenario, loaded);

        // Re-saving the loaded scenario is byte-identical.
        let path2 = dir.path().join("scenario2.json");
        save_scenario(&loaded, &path2).unwrap();
        assert_eq!(
            fs::read(&path).unwrap(),
            fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn loaded_model_solves_identically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.json");
        let model = generate(&spec(3, 12, 5)).unwrap();
        let power = PowerVector::new(vec![0.4; model.num_stations()]);
        let before = solve_load(&model, &power, &SolverConfig::default(), None).unwrap();

        save_scenario(&Scenario::from_model(model), &path).unwrap();
        let loaded = load_scenario(&path).unwrap();
        let after = solve_load(&loaded.model, &power, &SolverConfig::default(), None).unwrap();
        assert_eq!(before.solution, after.solution);
        assert_eq!(before.iterations, after.iterations);
    }

    #[test]
    fn reference_blocks_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.json");
        let model = generate(&spec(2, 6, 11)).unwrap();
        let m = model.num_stations();
        let scenario = Scenario {
            model,
            reference_load: Some(ReferenceSolution {
                values: vec![0.25; m],
                solver: SolverMeta {
                    tolerance: 1e-10,
                    max_iterations: 100_000,
                    iterations: 17,
                    residual: 3.5e-11,
                    status: "Converged".to_string(),
                },
            }),
            reference_power: None,
        };
        save_scenario(&scenario, &path).unwrap();
        assert_eq!(load_scenario(&path).unwrap(), scenario);
    }

    #[test]
    fn missing_gains_is_a_parse_error_naming_the_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(
            &path,
            r#"{"format":"loadpower-scenario","version":1,"scenario":{
                "num_stations":1,"num_users":1,"num_rb":1,
                "rb_bandwidth":1.0,"rb_bandwidth_unit":"Hz",
                "noise_power":1.0,"noise_power_unit":"W",
                "gain_unit":"linear",
                "demand_unit":"bps","demands":[1.0],"serving":[1]}}"#,
        )
        .unwrap();
        let err = load_scenario(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gains"), "message was: {msg}");
        assert!(msg.contains("line"), "message was: {msg}");
    }

    #[allow(clippy::too_many_arguments)]
    fn write_minimal_scenario(
        path: &Path,
        gain_unit: &str,
        gain: f64,
        demand_unit: &str,
        demand: f64,
        bw_unit: &str,
        bw: f64,
        noise_unit: &str,
        noise: f64,
    ) {
        fs::write(
            path,
            format!(
                r#"{{"format":"loadpower-scenario","version":1,"scenario":{{
                    "num_stations":1,"num_users":1,"num_rb":1,
                    "rb_bandwidth":{bw},"rb_bandwidth_unit":"{bw_unit}",
                    "noise_power":{noise},"noise_power_unit":"{noise_unit}",
                    "gain_unit":"{gain_unit}","gains":[[{gain}]],
                    "demand_unit":"{demand_unit}","demands":[{demand}],
                    "serving":[1]}}}}"#
            ),
        )
        .unwrap();
    }

    #[test]
    fn db_gains_are_converted_to_linear() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.json");
        write_minimal_scenario(&path, "dB", -30.0, "bps", 1.0, "Hz", 1.0, "W", 1.0);
        let loaded = load_scenario(&path).unwrap();
        assert!((loaded.model.gain(0, 0) - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn alternative_units_are_normalized() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("units.json");
        write_minimal_scenario(&path, "linear", 0.5, "Mbps", 2.0, "kHz", 180.0, "dBm", -90.0);
        let m = load_scenario(&path).unwrap().model;
        assert!((m.demand(0) - 2e6).abs() < 1e-9);
        assert!((m.rb_bandwidth() - 180e3).abs() < 1e-9);
        assert!((m.noise_power() - 1e-12).abs() < 1e-24);
    }

    #[test]
    fn unknown_units_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad_unit.json");
        write_minimal_scenario(&path, "linear", 1.0, "furlongs", 1.0, "Hz", 1.0, "W", 1.0);
        assert!(matches!(
            load_scenario(&path),
            Err(ScenarioError::UnknownUnit { field: "demand", .. })
        ));
    }

    #[test]
    fn zero_serving_index_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("serving.json");
        fs::write(
            &path,
            r#"{"format":"loadpower-scenario","version":1,"scenario":{
                "num_stations":1,"num_users":1,"num_rb":1,
                "rb_bandwidth":1.0,"rb_bandwidth_unit":"Hz",
                "noise_power":1.0,"noise_power_unit":"W",
                "gain_unit":"linear","gains":[[1.0]],
                "demand_unit":"bps","demands":[1.0],"serving":[0]}}"#,
        )
        .unwrap();
        assert!(matches!(
            load_scenario(&path),
            Err(ScenarioError::ZeroServingIndex { user: 1, .. })
        ));
    }

    #[test]
    fn result_bundle_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("result.json");
        let mut bundle = ResultBundle::new("load", "Converged", 12);
        bundle.tolerance = Some(1e-10);
        bundle.residual = Some(4.2e-11);
        bundle.load = Some(vec![0.5, 0.25]);
        bundle.operational = Some(true);
        bundle.total_power = Some(vec![20.0, 10.0]);
        save_results(&bundle, &path).unwrap();
        assert_eq!(load_results(&path).unwrap(), bundle);
    }

    #[test]
    fn total_power_consistency_on_loaded_fixture() {
        // K·ν·p stays consistent through a save/load cycle.
        let model = generate(&spec(2, 8, 3)).unwrap();
        let m = model.num_stations();
        let load = LoadVector::new(vec![0.5; m]);
        let power = PowerVector::new(vec![0.4; m]);
        let tp = model.total_power(&load, &power).unwrap();
        for v in tp {
            assert!((v - 0.5 * 0.4 * model.num_rb() as f64).abs() < 1e-12);
        }
    }
}
