use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Stalled,
}

/// State after iteration `t` (`t = 0` is the starting point).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    /// `psi(X^t) = 0.5 ||A(X^t) - b||^2`.
    pub objective: f64,
    /// Numerical rank of the iterate.
    pub rank: usize,
    /// Two-sided incoherence `max(m max U_ij^2, n max V_ij^2)`.
    pub mu: Option<f64>,
    /// Left-factor incoherence `sqrt(m) max |U_ij|`.
    pub mu_left: Option<f64>,
    /// Step used to produce this iterate (0 for `t = 0`).
    pub step: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub records: Vec<IterationRecord>,
    pub status: SolveStatus,
}

impl SolveTrace {
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.t)
    }

    pub fn final_objective(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.objective)
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }

    /// `max_t mu_left(X^t)` over recorded iterates with `t >= 1`.
    pub fn max_mu_left(&self) -> Option<f64> {
        self.records.iter().filter(|r| r.t >= 1).filter_map(|r| r.mu_left).reduce(f64::max)
    }

    pub fn max_mu(&self) -> Option<f64> {
        self.records.iter().filter(|r| r.t >= 1).filter_map(|r| r.mu).reduce(f64::max)
    }

    pub fn wall_ms(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.wall_ms)
    }

    /// Traces compared on everything except timing.
    pub fn same_numerics(&self, other: &SolveTrace) -> bool {
        self.status == other.status
            && self.records.len() == other.records.len()
            && self.records.iter().zip(&other.records).all(|(a, b)| {
                a.t == b.t
                    && a.objective.to_bits() == b.objective.to_bits()
                    && a.rank == b.rank
                    && a.mu.map(f64::to_bits) == b.mu.map(f64::to_bits)
                    && a.mu_left.map(f64::to_bits) == b.mu_left.map(f64::to_bits)
                    && a.step.to_bits() == b.step.to_bits()
            })
    }
}
