use std::collections::VecDeque;

/// One remembered step: the state, the action taken there, and the
/// normalised residual `(a - mu(s)) / sigma(s)` computed when it was taken.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    pub obs: Vec<f64>,
    pub action: Vec<f64>,
    pub residual: Option<Vec<f64>>,
    /// Set once the parameters that produced `residual` have been replaced.
    pub frozen: bool,
}

/// State of the history-extended MDP: the current observation plus the
/// last `min(p, t)` (state, action, residual) triples, most recent first.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedState {
    order: usize,
    act_dim: usize,
    initial: Vec<f64>,
    current: Vec<f64>,
    history: VecDeque<HistoryEntry>,
    t: usize,
}

impl ExtendedState {
    pub fn new(order: usize, act_dim: usize, initial_obs: Vec<f64>) -> Self {
        Self {
            order,
            act_dim,
            current: initial_obs.clone(),
            initial: initial_obs,
            history: VecDeque::with_capacity(order),
            t: 0,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn act_dim(&self) -> usize {
        self.act_dim
    }

    pub fn current(&self) -> &[f64] {
        &self.current
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Real history entries, most recent first; length `min(p, t)`.
    pub fn history(&self) -> impl ExactSizeIterator<Item = &HistoryEntry> {
        self.history.iter()
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    /// Record the action taken in the current state and move to `next_obs`.
    pub fn push(&mut self, action: Vec<f64>, residual: Option<Vec<f64>>, next_obs: Vec<f64>) {
        debug_assert_eq!(action.len(), self.act_dim);
        if self.order > 0 {
            let obs = std::mem::replace(&mut self.current, next_obs);
            self.history.push_front(HistoryEntry {
                obs,
                action,
                residual,
                frozen: false,
            });
            self.history.truncate(self.order);
        } else {
            self.current = next_obs;
        }
        self.t += 1;
    }

    /// Mark every cached residual as computed under superseded parameters.
    /// Sampling keeps using them, so the process stays continuous for the
    /// next `p` steps; later entries are produced under the new parameters.
    pub fn on_params_updated(&mut self) {
        for e in self.history.iter_mut() {
            e.frozen = true;
        }
    }

    pub fn frozen_count(&self) -> usize {
        self.history.iter().filter(|e| e.frozen).count()
    }

    /// The formal extended state `(s_{t-p}, a_{t-p}, ..., s_{t-1}, a_{t-1})`,
    /// oldest first, padded with `(s_0, 0)` where `t - k < 0`.
    pub fn formal_history(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        let pad = self.order - self.history.len();
        let mut out = Vec::with_capacity(self.order);
        for _ in 0..pad {
            out.push((self.initial.clone(), vec![0.0; self.act_dim]));
        }
        for e in self.history.iter().rev() {
            out.push((e.obs.clone(), e.action.clone()));
        }
        out
    }
}
