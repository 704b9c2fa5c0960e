use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Reinforcement function `f: {1, 2, ...} -> (0, inf)` for the directed
/// edge-reinforced walk. The rate of `(i, j)` after `m` crossings is `f(m + 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Reinforcement {
    /// `f(j) = c`.
    Constant { c: f64 },
    /// `f(j) = intercept + slope * j`.
    Affine { intercept: f64, slope: f64 },
    /// `f(j) = limit - scale / j`.
    Saturating { limit: f64, scale: f64 },
    /// `f(1) = a`, `f(j) = 1` for `j >= 2`.
    Once { a: f64 },
    /// Explicit values `f(1), f(2), ...`; the last value repeats.
    Table { values: Vec<f64> },
}

impl Reinforcement {
    /// Evaluates `f(j)` for `j >= 1`.
    pub fn eval(&self, j: u64) -> f64 {
        debug_assert!(j >= 1, "reinforcement index starts at 1");
        let x = j as f64;
        match self {
            Reinforcement::Constant { c } => *c,
            Reinforcement::Affine { intercept, slope } => intercept + slope * x,
            Reinforcement::Saturating { limit, scale } => limit - scale / x,
            Reinforcement::Once { a } => {
                if j == 1 {
                    *a
                } else {
                    1.0
                }
            }
            Reinforcement::Table { values } => {
                let idx = (j as usize - 1).min(values.len() - 1);
                values[idx]
            }
        }
    }

    /// `f(1), ..., f(n)`.
    pub fn values(&self, n: u64) -> Vec<f64> {
        (1..=n).map(|j| self.eval(j)).collect()
    }

    /// Checks positivity of `f(1..=n)` and of the asymptotic value.
    pub fn validate(&self, n: u64) -> Result<()> {
        if let Reinforcement::Table { values } = self {
            if values.is_empty() {
                return Err(Error::InvalidParameter("empty reinforcement table".into()));
            }
        }
        if let Reinforcement::Affine { slope, .. } = self {
            if *slope < 0.0 {
                return Err(Error::InvalidParameter("affine reinforcement must not decrease".into()));
            }
        }
        if let Reinforcement::Saturating { limit, scale } = self {
            if *scale < 0.0 || *limit <= 0.0 {
                return Err(Error::InvalidParameter("saturating reinforcement needs limit > 0, scale >= 0".into()));
            }
        }
        for j in 1..=n.max(1) {
            let v = self.eval(j);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("f({j}) = {v} is not positive")));
            }
        }
        Ok(())
    }
}

/// Walk family and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProcessSpec {
    /// Once-reinforced walk: an undirected edge has rate `a` until it is
    /// first crossed in either direction, then rate 1.
    Orrw { a: f64 },
    /// Directed once-reinforced walk: each oriented edge has rate `a` until
    /// it is first crossed in that direction, then rate 1.
    Dorrw { a: f64 },
    /// Directed edge-reinforced walk with reinforcement function `f`.
    Derrw { f: Reinforcement },
    /// Walk with fixed rates `omega` per oriented edge (a quenched environment).
    Rwre { omega: Vec<f64> },
}

impl ProcessSpec {
    /// The rate-1-per-edge simple random walk.
    pub fn simple() -> Self {
        ProcessSpec::Orrw { a: 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProcessSpec::Orrw { .. } => "orrw",
            ProcessSpec::Dorrw { .. } => "dorrw",
            ProcessSpec::Derrw { .. } => "derrw",
            ProcessSpec::Rwre { .. } => "rwre",
        }
    }

    pub fn is_directed(&self) -> bool {
        !matches!(self, ProcessSpec::Orrw { .. })
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        match self {
            ProcessSpec::Orrw { a } | ProcessSpec::Dorrw { a } => {
                if !(*a > 0.0 && a.is_finite()) {
                    return Err(Error::InvalidParameter(format!("a = {a} must be positive")));
                }
            }
            ProcessSpec::Derrw { f } => f.validate(64)?,
            ProcessSpec::Rwre { omega } => {
                if omega.len() != g.num_oriented() {
                    return Err(Error::InvalidParameter(format!(
                        "environment has {} rates, graph has {} oriented edges",
                        omega.len(),
                        g.num_oriented()
                    )));
                }
                if let Some(w) = omega.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
                    return Err(Error::InvalidParameter(format!("environment rate {w} is not positive")));
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
    fn reinforcement_values() {
        assert_eq!(Reinforcement::Once { a: 0.3 }.values(3), vec![0.3, 1.0, 1.0]);
        assert_eq!(Reinforcement::Affine { intercept: 0.0, slope: 1.0 }.values(3), vec![1.0, 2.0, 3.0]);
        assert_eq!(Reinforcement::Saturating { limit: 2.0, scale: 1.0 }.eval(2), 1.5);
        let t = Reinforcement::Table { values: vec![2.0, 5.0] };
        assert_eq!(t.values(4), vec![2.0, 5.0, 5.0, 5.0]);
    }

    #[test]
    fn validation() {
        let g = Graph::complete(2).unwrap();
        assert!(ProcessSpec::Orrw { a: 0.0 }.validate(&g).is_err());
        assert!(ProcessSpec::Dorrw { a: 0.5 }.validate(&g).is_ok());
        assert!(ProcessSpec::Rwre { omega: vec![1.0] }.validate(&g).is_err());
        assert!(ProcessSpec::Rwre { omega: vec![1.0, -1.0] }.validate(&g).is_err());
        let f = Reinforcement::Affine { intercept: -1.0, slope: 1.0 };
        assert!(ProcessSpec::Derrw { f }.validate(&g).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let spec = ProcessSpec::Derrw {
            f: Reinforcement::Affine { intercept: 0.0, slope: 1.0 },
        };
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<ProcessSpec>(&s).unwrap(), spec);
    }
}
