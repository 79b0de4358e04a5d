//! Tabular Q store keyed by canonical state and action strings.

use std::collections::HashMap;

/// Map from (state key, action key) to learned value. Entries are created
/// explicitly by seeding; reading or updating a missing entry is a bug in
/// the caller, not a silent zero.
#[derive(Debug, Clone, Default)]
pub struct QTable {
    map: HashMap<(String, String), f64>,
}

impl QTable {
    pub fn new() -> Self {
        QTable::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, state: &str, action: &str) -> Option<f64> {
        self.map.get(&(state.to_string(), action.to_string())).copied()
    }

    pub fn contains(&self, state: &str, action: &str) -> bool {
        self.map
            .contains_key(&(state.to_string(), action.to_string()))
    }

    pub fn set(&mut self, state: &str, action: &str, value: f64) {
        self.map
            .insert((state.to_string(), action.to_string()), value);
    }

    /// All entries, for diagnostics and bound checks.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.map
            .iter()
            .map(|((s, a), v)| (s.as_str(), a.as_str(), *v))
    }

    fn expect(&self, state: &str, action: &str) -> f64 {
        self.get(state, action)
            .unwrap_or_else(|| panic!("Q entry for ({state}, {action}) was never initialized"))
    }

    /// Largest value among the given actions of a state.
    pub fn max_over(&self, state: &str, actions: &[String]) -> f64 {
        actions
            .iter()
            .map(|a| self.expect(state, a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the best action; ties take the smallest action key.
    pub fn argmax(&self, state: &str, action_keys: &[String]) -> usize {
        debug_assert!(!action_keys.is_empty());
        let mut best = 0;
        for i in 1..action_keys.len() {
            let vi = self.expect(state, &action_keys[i]);
            let vb = self.expect(state, &action_keys[best]);
            if vi > vb || (vi == vb && action_keys[i] < action_keys[best]) {
                best = i;
            }
        }
        best
    }

    /// One Bellman update:
    /// `Q(s,a) <- (1-alpha)*Q(s,a) + alpha*(r + gamma*max_a' Q(s',a'))`.
    /// `next` is `None` for terminal successor states, whose future value
    /// is zero.
    pub fn update(
        &mut self,
        state: &str,
        action: &str,
        reward: f64,
        next: Option<(&str, &[String])>,
        alpha: f64,
        gamma: f64,
    ) {
        let old = self.expect(state, action);
        let future = match next {
            None => 0.0,
            Some((next_state, next_actions)) => self.max_over(next_state, next_actions),
        };
        let new = (1.0 - alpha) * old + alpha * (reward + gamma * future);
        self.set(state, action, new);
    }
}
