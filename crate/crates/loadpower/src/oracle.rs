//! Independent reference solutions for small instances.
//!
//! Everything here is transcribed directly from the scalar equations and
//! shares no code with the mapping or solver modules, so agreement between
//! the two routes catches transcription mistakes in either. Only the
//! single-cell closed form and the symmetric two-station instance are
//! covered; uniqueness plus round-trip checks handle larger cases.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("no solution located while expanding the bracket up to {limit:.1e}")]
    NoSolutionLocated { limit: f64 },
    #[error("bisection stalled before reaching precision {requested:.1e} (achieved {achieved:.1e})")]
    PrecisionNotReached { requested: f64, achieved: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    ClosedFormSingleCell,
    ScalarBisection,
    GridRefinement,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub method: OracleMethod,
    /// Bound on both the bracketing interval half-width and the equation
    /// residual at `value`; at most the requested precision on success.
    pub achieved_precision: f64,
}

/// Exact single-cell inversion: the per-RB power making the load come out as
/// `load` is `(σ²/g)·(2^(d/(K·B·ν)) − 1)`.
pub fn single_cell_power(
    demand: f64,
    num_rb: f64,
    rb_bandwidth: f64,
    gain: f64,
    noise_power: f64,
    load: f64,
) -> f64 {
    (noise_power / gain) * ((demand / (num_rb * rb_bandwidth * load)).exp2() - 1.0)
}

/// [`single_cell_power`] wrapped as an [`OracleResult`].
pub fn single_cell_power_oracle(
    demand: f64,
    num_rb: f64,
    rb_bandwidth: f64,
    gain: f64,
    noise_power: f64,
    load: f64,
) -> OracleResult {
    let value = single_cell_power(demand, num_rb, rb_bandwidth, gain, noise_power, load);
    OracleResult {
        value,
        method: OracleMethod::ClosedFormSingleCell,
        achieved_precision: value.abs() * f64::EPSILON,
    }
}

/// Which scalar unknown to solve for on the symmetric instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetricMode {
    /// Solve for the common load given the common per-RB power.
    LoadGivenPower { power: f64 },
    /// Solve for the common per-RB power given the common load.
    PowerGivenLoad { load: f64 },
}

/// Symmetric two-station, one-user-each instance: both stations share the
/// same self gain, cross gain, demand, and constants, so the unknown vector
/// collapses to a scalar and the symmetric solution is the solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricTwoCell {
    pub g_self: f64,
    pub g_cross: f64,
    pub demand: f64,
    pub num_rb: f64,
    pub rb_bandwidth: f64,
    pub noise_power: f64,
}

const BRACKET_LO: f64 = 1e-12;
const BRACKET_CAP: f64 = 1e15;

impl SymmetricTwoCell {
    /// Load the equation assigns at `x` minus `x` itself (load mode), or the
    /// load produced by power `x` minus the target load (power mode). A root
    /// of this imbalance is the fixed point of the coupled system.
    fn imbalance(&self, mode: SymmetricMode, x: f64) -> f64 {
        let kb = self.num_rb * self.rb_bandwidth;
        match mode {
            SymmetricMode::LoadGivenPower { power } => {
                let sinr =
                    power * self.g_self / (x * power * self.g_cross + self.noise_power);
                self.demand / (kb * (1.0 + sinr).log2()) - x
            }
            SymmetricMode::PowerGivenLoad { load } => {
                let sinr = x * self.g_self / (load * x * self.g_cross + self.noise_power);
                self.demand / (kb * (1.0 + sinr).log2()) - load
            }
        }
    }

    fn bracket(&self, mode: SymmetricMode) -> Result<(f64, f64), OracleError> {
        let f_lo = self.imbalance(mode, BRACKET_LO);
        if f_lo.is_nan() || f_lo <= 0.0 {
            return Err(OracleError::NoSolutionLocated { limit: BRACKET_CAP });
        }
        let mut hi = 1.0;
        while self.imbalance(mode, hi) > 0.0 {
            hi *= 2.0;
            if hi > BRACKET_CAP {
                return Err(OracleError::NoSolutionLocated { limit: BRACKET_CAP });
            }
        }
        Ok((BRACKET_LO, hi))
    }

    /// Locate the scalar fixed point by bisection, to the point where both
    /// the bracket half-width and the equation residual are within
    /// `precision`.
    pub fn solve(
        &self,
        mode: SymmetricMode,
        precision: f64,
    ) -> Result<OracleResult, OracleError> {
        assert!(precision > 0.0, "precision must be > 0");
        let (mut lo, mut hi) = self.bracket(mode)?;
        let mut f_lo = self.imbalance(mode, lo);
        let mut mid = 0.5 * (lo + hi);
        for _ in 0..10_000 {
            mid = 0.5 * (lo + hi);
            let f_mid = self.imbalance(mode, mid);
            let half_width = 0.5 * (hi - lo);
            if half_width <= precision && f_mid.abs() <= precision {
                return Ok(OracleResult {
                    value: mid,
                    method: OracleMethod::ScalarBisection,
                    achieved_precision: half_width.max(f_mid.abs()),
                });
            }
            if mid <= lo || mid >= hi {
                // Interval has collapsed to adjacent floats.
                break;
            }
            if (f_mid > 0.0) == (f_lo > 0.0) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        let achieved = (0.5 * (hi - lo)).max(self.imbalance(mode, mid).abs());
        Err(OracleError::PrecisionNotReached {
            requested: precision,
            achieved,
        })
    }

    /// Same root located by repeated grid scans instead of bisection; a
    /// second route for checking the oracle itself.
    pub fn solve_by_grid(
        &self,
        mode: SymmetricMode,
        precision: f64,
    ) -> Result<OracleResult, OracleError> {
        assert!(precision > 0.0, "precision must be > 0");
        const CELLS: usize = 64;
        let (mut lo, mut hi) = self.bracket(mode)?;
        for _ in 0..1_000 {
            let mid = 0.5 * (lo + hi);
            let f_mid = self.imbalance(mode, mid);
            let half_width = 0.5 * (hi - lo);
            if half_width <= precision && f_mid.abs() <= precision {
                return Ok(OracleResult {
                    value: mid,
                    method: OracleMethod::GridRefinement,
                    achieved_precision: half_width.max(f_mid.abs()),
                });
            }
            let step = (hi - lo) / CELLS as f64;
            if step <= 0.0 {
                break;
            }
            let mut f_left = self.imbalance(mode, lo);
            let mut found = false;
            for cell in 0..CELLS {
                let right = if cell + 1 == CELLS {
                    hi
                } else {
                    lo + step * (cell + 1) as f64
                };
                let f_right = self.imbalance(mode, right);
                if (f_left > 0.0) != (f_right > 0.0) {
                    lo += step * cell as f64;
                    hi = right;
                    found = true;
                    break;
                }
                f_left = f_right;
            }
            if !found {
                break;
            }
        }
        let mid = 0.5 * (lo + hi);
        let achieved = (0.5 * (hi - lo)).max(self.imbalance(mode, mid).abs());
        Err(OracleError::PrecisionNotReached {
            requested: precision,
            achieved,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_closed_forms() {
        assert!((single_cell_power(1.0, 1.0, 1.0, 1.0, 1.0, 1.0) - 1.0).abs() < 1e-15);
        let sqrt2_minus_1 = 2f64.sqrt() - 1.0;
        assert!((single_cell_power(1.0, 1.0, 1.0, 1.0, 1.0, 2.0) - sqrt2_minus_1).abs() < 1e-15);
        assert!((single_cell_power(1.0, 1.0, 1.0, 1.0, 1.0, 0.5) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn single_cell_oracle_wrapper() {
        let r = single_cell_power_oracle(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(r.method, OracleMethod::ClosedFormSingleCell);
        assert!((r.value - 1.0).abs() < 1e-15);
    }

    fn reference_instance() -> SymmetricTwoCell {
        SymmetricTwoCell {
            g_self: 1.0,
            g_cross: 0.5,
            demand: 1.0,
            num_rb: 1.0,
            rb_bandwidth: 1.0,
            noise_power: 1.0,
        }
    }

    #[test]
    fn load_mode_regression_baseline() {
        let r = reference_instance()
            .solve(SymmetricMode::LoadGivenPower { power: 1.0 }, 1e-12)
            .unwrap();
        assert_eq!(r.method, OracleMethod::ScalarBisection);
        assert!(r.achieved_precision <= 1e-12);
        // Regression baseline for v = 1/log2(1 + 1/(0.5v + 1)).
        assert!((r.value - 1.5518285930918883).abs() <= 2e-12);
    }

    #[test]
    fn power_mode_regression_baseline() {
        let r = reference_instance()
            .solve(SymmetricMode::PowerGivenLoad { load: 1.0 }, 1e-12)
            .unwrap();
        assert!((r.value - 2.0).abs() <= 2e-12);
    }

    #[test]
    fn zero_cross_gain_reduces_to_single_cell() {
        let decoupled = SymmetricTwoCell {
            g_cross: 0.0,
            ..reference_instance()
        };
        let load = decoupled
            .solve(SymmetricMode::LoadGivenPower { power: 1.0 }, 1e-12)
            .unwrap();
        // v = 1/log2(1 + p·g_self/σ²) = 1/log2(2) = 1.
        assert!((load.value - 1.0).abs() <= 2e-12);

        let power = decoupled
            .solve(SymmetricMode::PowerGivenLoad { load: 1.0 }, 1e-12)
            .unwrap();
        let closed = single_cell_power(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        assert!((power.value - closed).abs() <= 2e-12);
    }

    #[test]
    fn self_consistency_residual_within_precision() {
        let inst = reference_instance();
        for mode in [
            SymmetricMode::LoadGivenPower { power: 3.0 },
            SymmetricMode::PowerGivenLoad { load: 0.7 },
        ] {
            let r = inst.solve(mode, 1e-11).unwrap();
            assert!(inst.imbalance(mode, r.value).abs() <= r.achieved_precision);
            assert!(r.achieved_precision <= 1e-11);
        }
    }

    #[test]
    fn grid_refinement_agrees_with_bisection() {
        let inst = reference_instance();
        let mode = SymmetricMode::LoadGivenPower { power: 1.0 };
        let a = inst.solve(mode, 1e-11).unwrap();
        let b = inst.solve_by_grid(mode, 1e-11).unwrap();
        assert_eq!(b.method, OracleMethod::GridRefinement);
        assert!((a.value - b.value).abs() <= 2e-11);
    }

    #[test]
    fn infeasible_load_is_detected() {
        // Asymptotic slope d·ln2·g_cross/(K·B·g_self) > 1: no load fixed point.
        let inst = SymmetricTwoCell {
            demand: 1e7,
            ..reference_instance()
        };
        assert_eq!(
            inst.solve(SymmetricMode::LoadGivenPower { power: 1.0 }, 1e-10),
            Err(OracleError::NoSolutionLocated { limit: 1e15 })
        );
    }

    #[test]
    fn infeasible_power_target_is_detected() {
        // Interference-limited load floor exceeds the requested target.
        let inst = SymmetricTwoCell {
            g_cross: 1.0,
            ..reference_instance()
        };
        // Floor: d/(K·B·log2(1 + g_self/(ν·g_cross))) at ν = 0.1 is ≈ 0.29 > 0.1.
        assert_eq!(
            inst.solve(SymmetricMode::PowerGivenLoad { load: 0.1 }, 1e-10),
            Err(OracleError::NoSolutionLocated { limit: 1e15 })
        );
    }
}
