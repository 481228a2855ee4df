//! Exploration-rate schedule: a cyclic exponent over a slowly decaying base.

/// Exploration rate for the p-th parameter update: `a^(1 + (p mod 8))`.
pub fn epsilon_schedule(p: u64, base: f64) -> f64 {
    debug_assert!(base > 0.0 && base <= 1.0);
    base.powi(1 + (p % 8) as i32)
}

/// Exponential decay of the schedule base from `start` to `end` over
/// `horizon_ttis` of training time; clamps at `end` afterwards.
#[derive(Debug, Clone)]
pub struct ExplorationSchedule {
    pub start: f64,
    pub end: f64,
    pub horizon_ttis: u64,
}

impl ExplorationSchedule {
    pub fn base_at(&self, ttis_since_training_start: u64) -> f64 {
        if self.horizon_ttis == 0 || ttis_since_training_start >= self.horizon_ttis {
            return self.end;
        }
        let frac = ttis_since_training_start as f64 / self.horizon_ttis as f64;
        self.start * (self.end / self.start).powf(frac)
    }
}
