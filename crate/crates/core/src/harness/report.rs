use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;

/// Outcome of a gated check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The target event is too rare for the replica budget.
    InsufficientMass,
    /// A simulation hit the event cap.
    Capped,
    /// Zero variance on both sides; nothing to compare.
    Degenerate,
    /// Reported without a gate.
    Info,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Combines verdicts: any failure fails, then capped or underpowered.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        let rank = |v: Verdict| match v {
            Fail => 4,
            Capped => 3,
            InsufficientMass => 2,
            Degenerate => 1,
            Pass | Info => 0,
        };
        if rank(other) > rank(self) {
            other
        } else if self == Info {
            other
        } else {
            self
        }
    }

    pub fn is_pass(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::Info)
    }
}

/// Thresholds of the gated checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct Thresholds {
    pub p_min: f64,
    pub z_max: f64,
    pub rel_err: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            p_min: 0.001,
            z_max: 3.0,
            rel_err: 0.05,
        }
    }
}

/// A Monte Carlo estimate compared with a target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub test: String,
    #[serde(rename = "config-hash")]
    pub config_hash: String,
    pub seed: u64,
    pub estimate: f64,
    pub se: f64,
    pub target: f64,
    /// Standard error of the target when it is itself estimated.
    pub target_se: f64,
    pub z: f64,
    pub replicas: u64,
    pub verdict: Verdict,
}

impl EstimateReport {
    /// `z = (estimate - target) / sqrt(se^2 + target_se^2)`, passing when
    /// `|z| <= z_max`.
    pub fn compare(test: &str, estimate: f64, se: f64, target: f64, target_se: f64, replicas: u64, seed: u64, z_max: f64) -> Self {
        let combined = (se * se + target_se * target_se).sqrt();
        let (z, verdict) = if combined > 0.0 {
            let z = (estimate - target) / combined;
            (z, Verdict::from_bool(z.abs() <= z_max))
        } else if estimate == target {
            (0.0, Verdict::Degenerate)
        } else {
            (f64::INFINITY, Verdict::Fail)
        };
        EstimateReport {
            test: test.to_string(),
            config_hash: String::new(),
            seed,
            estimate,
            se,
            target,
            target_se,
            z,
            replicas,
            verdict,
        }
    }

    pub fn with_hash(mut self, hash: &str) -> Self {
        self.config_hash = hash.to_string();
        self
    }
}

/// Hex SHA-256 of configuration text.
pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Maps a simulation error to the verdict it implies, if any.
pub fn verdict_for_error(e: &Error) -> Option<Verdict> {
    match e {
        Error::Capped { .. } => Some(Verdict::Capped),
        Error::TooFewSamples { .. } => Some(Verdict::InsufficientMass),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_scores_and_degenerate_cases() {
        let r = EstimateReport::compare("x", 0.5, 0.01, 0.52, 0.0, 100, 1, 3.0);
        assert!((r.z + 2.0).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Pass);
        let d = EstimateReport::compare("x", 1.0, 0.0, 1.0, 0.0, 100, 1, 3.0);
        assert_eq!(d.verdict, Verdict::Degenerate);
        let f = EstimateReport::compare("x", 1.0, 0.0, 0.9, 0.0, 100, 1, 3.0);
        assert_eq!(f.verdict, Verdict::Fail);
    }

    #[test]
    fn combining_verdicts() {
        assert_eq!(Verdict::Pass.and(Verdict::Fail), Verdict::Fail);
        assert_eq!(Verdict::Capped.and(Verdict::Pass), Verdict::Capped);
        assert_eq!(Verdict::Info.and(Verdict::Pass), Verdict::Pass);
        assert_eq!(Verdict::InsufficientMass.and(Verdict::Capped), Verdict::Capped);
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            config_hash("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
