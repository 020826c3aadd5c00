use serde::{Deserialize, Serialize};

use super::{step, SchemeConfig, StepCounters};
use crate::error::{Error, Result};
use crate::model::{HamiltonianSystem, PhaseState};

/// Relative slack allowed when checking that `t_end` is a whole number of steps.
const STEP_COUNT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub energies: Vec<f64>,
    pub counters: StepCounters,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn final_state(&self) -> &PhaseState {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectory holds the initial time")
    }

    /// `max_k |H_k - H_0|`.
    pub fn max_energy_drift(&self) -> f64 {
        let h0 = self.energies[0];
        self.energies.iter().fold(0.0, |m, e| m.max((e - h0).abs()))
    }
}

/// Number of steps of size `h` that make up `t_end`, if it is whole.
pub fn step_count(t_end: f64, h: f64) -> Result<usize> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t_end must be non-negative, got {t_end}"
        )));
    }
    let n = t_end / h;
    let rounded = n.round();
    if (n - rounded).abs() > STEP_COUNT_SLACK * rounded.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "t_end = {t_end} is not a whole number of steps h = {h}"
        )));
    }
    Ok(rounded as usize)
}

/// Runs `t_end / h` fixed steps of the configured scheme from `y0` at `t = 0`.
pub fn integrate_trajectory(
    sys: &HamiltonianSystem,
    config: &SchemeConfig,
    y0: &PhaseState,
    t_end: f64,
) -> Result<Trajectory> {
    config.validate()?;
    let n = step_count(t_end, config.h)?;
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut energies = Vec::with_capacity(n + 1);
    let mut counters = StepCounters::default();
    times.push(0.0);
    energies.push(sys.energy(y0)?);
    states.push(y0.clone());
    let mut y = y0.clone();
    for k in 0..n {
        let wrap = |e: Error| Error::StepFailed {
            step: k,
            source: Box::new(e),
        };
        y = step(sys, config, &y, config.h, &mut counters).map_err(wrap)?;
        energies.push(sys.energy(&y).map_err(wrap)?);
        times.push((k + 1) as f64 * config.h);
        states.push(y.clone());
    }
    Ok(Trajectory {
        times,
        states,
        energies,
        counters,
    })
}
