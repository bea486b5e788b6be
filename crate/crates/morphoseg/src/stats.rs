//! Optimizer accounting shared by the iterative trainers.

/// Step and acceptance counters plus the best-cost trajectory, recorded
/// so runs can be compared by optimization effort as well as by outcome.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainStats {
    /// Candidate evaluations: words visited (splitting trainers) or
    /// proposals drawn (annealing).
    pub steps: u64,
    /// Committed changes / accepted proposals.
    pub acceptances: u64,
    /// Best total cost in bits after each epoch or temperature level;
    /// non-increasing by construction.
    pub trajectory: Vec<f64>,
}

impl TrainStats {
    /// Record a new best-so-far cost at the end of an epoch or level.
    pub fn push_cost(&mut self, cost: f64) {
        let best = self.trajectory.last().copied().unwrap_or(f64::INFINITY);
        self.trajectory.push(cost.min(best));
    }
}
