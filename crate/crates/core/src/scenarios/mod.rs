//! The two worked examples: a two-projector estimation toy model and the
//! PBC00 three-state QKD finite-size key rate.

pub mod qkd;
pub mod toy;

pub use qkd::{
    pbc00_asymptotic_rate, pbc00_key_rate, pbc00_operators, pbc00_phase_error_upper, KeyRate,
    QkdParams,
};
pub use toy::{
    constraint_operator, expectation_upper_bound, failure_region, tangent_region, toy_delta,
    toy_epsilon, ToyModelParams,
};

use serde::{Deserialize, Serialize};

/// Paper-default model values shared by the scenarios.
pub mod defaults {
    /// Tilt of the second projective pair.
    pub const R: f64 = 0.01;
    /// Estimation-direction parameter minimizing the asymptotic bound.
    pub const GAMMA: f64 = 1.662;
    /// Failure probability for deviation sweeps.
    pub const EPSILON_TOY: f64 = 1e-30;
    /// Fixed deviation for failure-probability sweeps.
    pub const DELTA: f64 = 0.01;
    /// Prior expectation of the tilted-pair count, as a fraction of N.
    pub const B_STAR_FRACTION: f64 = 0.01;
    /// Phase-error-correction failure probability (2^−102).
    pub const EPSILON_QKD: f64 = 2.350988701644575e-31;
    /// Secrecy-parameter shortening.
    pub const S: f64 = 102.0;
    /// Correctness-verification cost.
    pub const S_PRIME: f64 = 50.0;
    /// Observed bit error rate in the model channel.
    pub const BIT_ERROR_RATE: f64 = 0.01;
}

/// On-disk scenario preset.  Unknown keys are rejected; missing keys take
/// the paper defaults above.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub r: Option<f64>,
    pub gamma: Option<f64>,
    #[serde(rename = "N_grid")]
    pub n_grid: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    #[serde(rename = "Delta")]
    pub delta: Option<f64>,
    #[serde(rename = "B_star_fraction")]
    pub b_star_fraction: Option<f64>,
    pub s: Option<f64>,
    pub s_prime: Option<f64>,
    pub bit_error_rate: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_unknown_keys_and_defaults_missing() {
        let cfg: ScenarioConfig = serde_json::from_str(r#"{"r": 0.02, "gamma": 1.5}"#).unwrap();
        assert_eq!(cfg.r, Some(0.02));
        assert_eq!(cfg.epsilon, None);
        let bad = serde_json::from_str::<ScenarioConfig>(r#"{"radius": 0.02}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn qkd_epsilon_default_is_the_power_of_two() {
        assert_eq!(defaults::EPSILON_QKD, 2f64.powi(-102));
    }
}
