use std::collections::VecDeque;

use rand::Rng;
use rand_distr::StandardNormal;

use super::ArModel;

/// A running realisation of an [`ArModel`].
///
/// Values before the first step are treated as zero, so the first `p`
/// steps only use the history that exists.
#[derive(Debug, Clone)]
pub struct ProcessState<'m> {
    model: &'m ArModel,
    history: VecDeque<f64>,
    step_count: usize,
}

impl<'m> ProcessState<'m> {
    pub fn new(model: &'m ArModel) -> Self {
        Self {
            model,
            history: VecDeque::with_capacity(model.order()),
            step_count: 0,
        }
    }

    pub fn model(&self) -> &ArModel {
        self.model
    }

    /// Past values, most recent first.
    pub fn history(&self) -> impl Iterator<Item = f64> + '_ {
        self.history.iter().copied()
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    /// Deterministic part of the next value: `sum_{k <= min(p,t)} phi_k X_{t-k}`.
    pub fn predicted(&self) -> f64 {
        let mut sum = 0.0;
        for (phi, x) in self.model.coeffs().iter().zip(&self.history) {
            sum += phi * x;
        }
        sum
    }

    /// Advance by one step using a standard normal draw.
    pub fn step(&mut self, noise: f64) -> f64 {
        let x = self.predicted() + self.model.noise_std() * noise;
        self.history.push_front(x);
        self.history.truncate(self.model.order());
        self.step_count += 1;
        x
    }

    pub fn step_with<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        let eps: f64 = rng.sample(StandardNormal);
        self.step(eps)
    }
}

/// `steps` consecutive values of a fresh realisation.
pub fn sample_path<R: Rng + ?Sized>(model: &ArModel, steps: usize, rng: &mut R) -> Vec<f64> {
    let mut state = ProcessState::new(model);
    (0..steps).map(|_| state.step_with(rng)).collect()
}
