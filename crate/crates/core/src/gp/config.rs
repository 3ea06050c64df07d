use serde::{Deserialize, Serialize};

use super::GpError;
use crate::expr::{TreeGenConfig, MAX_DEPTH};

/// How the next population is chosen from parents plus offspring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Survival {
    /// Keep the `pop_size` best by the total ranking order.
    #[default]
    Truncation,
    /// Binary tournaments over the pooled `2 * pop_size` individuals.
    Tournament,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpConfig {
    pub pop_size: usize,
    pub generations: usize,
    pub p_crossover: f64,
    pub p_subtree_mut: f64,
    pub p_hoist_mut: f64,
    pub p_point_mut: f64,
    pub tree_gen: TreeGenConfig,
    pub max_depth: usize,
    pub seed: u64,
    pub survival: Survival,
    /// Worker threads for fitness evaluation; 1 evaluates inline.
    pub jobs: usize,
    /// Test mode: stop updating score bounds after the initial population.
    pub freeze_bounds: bool,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig {
            pop_size: 100,
            generations: 50,
            p_crossover: 0.6,
            p_subtree_mut: 0.15,
            p_hoist_mut: 0.1,
            p_point_mut: 0.1,
            tree_gen: TreeGenConfig::default(),
            max_depth: MAX_DEPTH,
            seed: 0,
            survival: Survival::Truncation,
            jobs: 1,
            freeze_bounds: false,
        }
    }
}

impl GpConfig {
    /// Remaining probability mass, used for plain reproduction.
    pub fn p_reproduce(&self) -> f64 {
        (1.0 - self.p_crossover - self.p_subtree_mut - self.p_hoist_mut - self.p_point_mut).max(0.0)
    }

    pub fn validate(&self) -> Result<(), GpError> {
        let bad = |msg: String| Err(GpError::Config(msg));
        if self.pop_size < 2 || !self.pop_size.is_multiple_of(2) {
            return bad(format!("pop_size must be even and >= 2, got {}", self.pop_size));
        }
        if self.generations < 1 {
            return bad("generations must be >= 1".into());
        }
        let probs = [
            ("p_crossover", self.p_crossover),
            ("p_subtree_mut", self.p_subtree_mut),
            ("p_hoist_mut", self.p_hoist_mut),
            ("p_point_mut", self.p_point_mut),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        let sum: f64 = probs.iter().map(|(_, p)| p).sum();
        if sum > 1.0 + 1e-9 {
            return bad(format!("variation probabilities sum to {sum} > 1"));
        }
        if self.max_depth != MAX_DEPTH {
            return bad(format!("max_depth is fixed at {MAX_DEPTH}"));
        }
        if self.jobs == 0 {
            return bad("jobs must be >= 1".into());
        }
        self.tree_gen
            .validate()
            .map_err(|e| GpError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = GpConfig::default();
        c.validate().unwrap();
        assert!((c.p_reproduce() - 0.05).abs() < 1e-12);
        assert_eq!((c.pop_size, c.generations), (100, 50));
    }

    #[test]
    fn rejects_bad_values() {
        let odd = GpConfig {
            pop_size: 101,
            ..GpConfig::default()
        };
        assert!(odd.validate().unwrap_err().to_string().contains("even"));
        let zero_gens = GpConfig {
            generations: 0,
            ..GpConfig::default()
        };
        assert!(zero_gens.validate().is_err());
        let over = GpConfig {
            p_crossover: 0.9,
            p_point_mut: 0.2,
            ..GpConfig::default()
        };
        assert!(over.validate().is_err());
        let neg = GpConfig {
            p_hoist_mut: -0.1,
            ..GpConfig::default()
        };
        assert!(neg.validate().is_err());
    }
}
