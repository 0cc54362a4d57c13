use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Gumbel,
    Vanilla,
}

/// Search hyperparameters. Defaults are the published ones: 200 simulations,
/// halving width 16, `c1 = 50`, `c2 = 0.1` for Gumbel search and
/// `c_puct = 20`, mixing weight 0.25, Dirichlet `α = 1/|A|` for PUCT search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub num_sim: usize,
    /// Initial sequential-halving width.
    pub k: usize,
    pub c1: f64,
    pub c2: f64,
    pub c_puct: f64,
    /// Dirichlet concentration; `None` means `1/|A|`.
    pub dirichlet_alpha: Option<f64>,
    pub epsilon_mix: f64,
    /// Keep per-simulation trajectories in the output.
    pub record_trace: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: SearchMode::Gumbel,
            num_sim: 200,
            k: 16,
            c1: 50.0,
            c2: 0.1,
            c_puct: 20.0,
            dirichlet_alpha: None,
            epsilon_mix: 0.25,
            record_trace: false,
        }
    }
}

impl SearchConfig {
    pub fn vanilla() -> Self {
        SearchConfig { mode: SearchMode::Vanilla, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.num_sim == 0 {
            return Err("num_sim must be positive".into());
        }
        match self.mode {
            SearchMode::Gumbel => {
                if self.k < 2 || !self.k.is_power_of_two() {
                    return Err(format!("k = {} must be a power of two and at least 2", self.k));
                }
                if self.num_sim < self.k {
                    return Err(format!("num_sim = {} must be at least k = {}", self.num_sim, self.k));
                }
                if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
                    return Err("c1 and c2 must be nonnegative".into());
                }
            }
            SearchMode::Vanilla => {
                if !(self.c_puct > 0.0) {
                    return Err("c_puct must be positive".into());
                }
                if !(0.0..=1.0).contains(&self.epsilon_mix) {
                    return Err("epsilon_mix must lie in [0, 1]".into());
                }
                if let Some(a) = self.dirichlet_alpha {
                    if !(a > 0.0) {
                        return Err("dirichlet_alpha must be positive".into());
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert!(SearchConfig::default().validate().is_ok());
        assert!(SearchConfig::vanilla().validate().is_ok());
    }

    #[test]
    fn non_power_of_two_width_is_rejected() {
        let c = SearchConfig { k: 12, ..Default::default() };
        assert!(c.validate().is_err());
        let c = SearchConfig { k: 1, ..Default::default() };
        assert!(c.validate().is_err());
        let c = SearchConfig { num_sim: 8, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn parses_from_toml() {
        let c: SearchConfig = toml::from_str("mode = \"vanilla\"\nnum_sim = 50\n").unwrap();
        assert_eq!(c.mode, SearchMode::Vanilla);
        assert_eq!(c.num_sim, 50);
        assert_eq!(c.c_puct, 20.0);
    }
}
