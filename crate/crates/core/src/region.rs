//! Rasterization of coalition compliance over the (θ, γ) plane.

use crate::coalition::coalition_best_event;
use crate::error::GridError;
use crate::exec::Execution;
use crate::model::{Event, SanctionBaseMode, TaxPolicy, TransactionEndowments};

/// Evenly spaced values `min, min + step, ...` not exceeding `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(min: f64, max: f64, step: f64) -> Self {
        Axis { min, max, step }
    }

    fn validate(&self, axis: &'static str) -> Result<(), GridError> {
        if self.step.is_nan() || self.step <= 0.0 || !self.step.is_finite() {
            return Err(GridError::Step { axis, step: self.step });
        }
        let unit = 0.0..=1.0;
        if !unit.contains(&self.min) || !unit.contains(&self.max) || self.min > self.max {
            return Err(GridError::Range { axis, min: self.min, max: self.max });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        // the small slack keeps e.g. 0..1 step 0.01 at 101 points
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        (self.min + self.step * i as f64).min(self.max)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.value(i))
    }
}

/// θ outer, γ inner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionGrid {
    pub theta: Axis,
    pub gamma: Axis,
}

impl RegionGrid {
    pub fn validate(&self) -> Result<(), GridError> {
        self.theta.validate("theta")?;
        self.gamma.validate("gamma")
    }

    pub fn len(&self) -> usize {
        self.theta.len() * self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionCell {
    pub theta: f64,
    pub gamma: f64,
    /// Coalition maximizers in canonical order.
    pub best: Vec<Event>,
    /// Joint compliance is among the maximizers.
    pub complies: bool,
}

/// Evaluates the coalition's best joint strategy at every grid point, in
/// row-major order (θ outer, γ inner). The deduction share of `policy` is
/// replaced by each grid θ.
pub fn rasterize(
    grid: &RegionGrid,
    policy: &TaxPolicy,
    te: &TransactionEndowments,
    mode: SanctionBaseMode,
    exec: Execution,
) -> Result<Vec<RegionCell>, GridError> {
    grid.validate()?;
    let columns = grid.gamma.len();
    exec.map_indexed(grid.len(), |k| {
        let theta = grid.theta.value(k / columns);
        let gamma = grid.gamma.value(k % columns);
        let p = TaxPolicy { deduction_share: theta, ..*policy };
        let best = coalition_best_event(gamma, &p, te, mode)?;
        let complies = best.contains(&Event::Comply);
        Ok(RegionCell { theta, gamma, best, complies })
    })
    .into_iter()
    .collect()
}
