//! Experiment configuration and the set-spec grammar used by the CLI.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::averaging::{extremal_witnesses, Point, PointSet, WitnessKind};
use crate::curve::{Exponent, GroundSet, SeparatedSystem};

/// How targets `a` are drawn for a paucity scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
#[derive(Default)]
pub enum ASampling {
    /// Exactly these targets.
    Explicit { targets: Vec<Vec<i64>> },
    /// Uniform over `prod_j [-s max|phi_j|, s max|phi_j|]` minus the origin.
    #[default]
    UniformBox,
    /// `sum gamma(n) - sum gamma(m)` for uniform tuples, zero excluded, so
    /// every target has at least one solution.
    Realized,
}


impl ASampling {
    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        match s {
            "uniform-box" | "uniform_box" | "box" => Ok(ASampling::UniformBox),
            "realized" | "all-realized" => Ok(ASampling::Realized),
            _ => {
                let body = s.strip_prefix("explicit:").ok_or_else(|| {
                    HarnessError::Usage(format!("unknown a-sampling `{s}` (uniform-box | realized | explicit:a;b;...)"))
                })?;
                let targets = body
                    .split(';')
                    .filter(|t| !t.trim().is_empty())
                    .map(parse_ints)
                    .collect::<Result<_, _>>()?;
                Ok(ASampling::Explicit { targets })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Everything that determines a scan's output. Thread count and output path
/// are deliberately absent: they must not change the bytes written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub curve: String,
    /// Ground-set specs, one scan column each.
    pub sets: Vec<String>,
    #[serde(default)]
    pub s: Option<usize>,
    #[serde(default)]
    pub p: Option<String>,
    #[serde(default)]
    pub q: Option<String>,
    #[serde(default)]
    pub a_sampling: ASampling,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub witnesses: Vec<WitnessKind>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
}

fn default_samples() -> usize {
    20
}

fn default_budget() -> u64 {
    crate::counting::DEFAULT_BUDGET
}

impl ExperimentConfig {
    pub fn new(curve: impl Into<String>, sets: Vec<String>) -> Self {
        ExperimentConfig {
            curve: curve.into(),
            sets,
            s: None,
            p: None,
            q: None,
            a_sampling: ASampling::default(),
            samples: default_samples(),
            witnesses: Vec::new(),
            seed: 0,
            budget: default_budget(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Usage(format!("bad config: {e}")))
    }

    /// Parses every spec, so missing files and bad budgets fail up front.
    pub fn validate(&self) -> Result<(SeparatedSystem, Vec<GroundSet>), HarnessError> {
        if self.budget == 0 {
            return Err(HarnessError::Usage("budget must be positive".into()));
        }
        if self.s == Some(0) {
            return Err(HarnessError::Usage("s must be at least 1".into()));
        }
        let sys = SeparatedSystem::parse_spec(&self.curve).map_err(|e| HarnessError::Usage(e.to_string()))?;
        let grounds = self
            .sets
            .iter()
            .map(|spec| GroundSet::parse_spec(spec).map_err(|e| HarnessError::Usage(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if let ASampling::Explicit { targets } = &self.a_sampling {
            if let Some(t) = targets.iter().find(|t| t.len() != sys.r()) {
                return Err(HarnessError::Usage(format!("target {t:?} needs {} coordinates", sys.r())));
            }
        }
        Ok((sys, grounds))
    }

    /// `(p, q)`, defaulting to `p = 2 - 1/(r+1)` and `q = p'`.
    pub fn exponents(&self, r: usize) -> Result<(Exponent, Exponent), HarnessError> {
        let parse = |s: &str| Exponent::parse(s).ok_or_else(|| HarnessError::Usage(format!("bad exponent `{s}`")));
        let p = match &self.p {
            Some(p) => parse(p)?,
            None => Exponent::Finite(crate::curve::Rational::new(2 * r as i64 + 1, r as i64 + 1)),
        };
        let q = match &self.q {
            Some(q) => parse(q)?,
            None => p.dual(),
        };
        Ok((p, q))
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub(crate) fn parse_ints(s: &str) -> Result<Vec<i64>, HarnessError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| HarnessError::Usage(format!("bad integer `{t}` in `{s}`")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetRole {
    E,
    F,
}

/// Parses a point-set spec:
///
/// * `points:1,2;3,4` explicit points
/// * `box:LO1,LO2:HI1,HI2` inclusive box
/// * `witness:delta|curve|box` the matching side of an extremal pair
/// * `file:PATH` a JSON array of points, or any spec above stored in a file
pub fn parse_point_set(
    spec: &str,
    role: SetRole,
    sys: &SeparatedSystem,
    ground: &GroundSet,
) -> Result<PointSet, HarnessError> {
    let usage = |m: String| HarnessError::Usage(m);
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("set spec `{spec}` has no kind prefix")))?;
    let set = match kind {
        "points" => {
            let pts = body
                .split(';')
                .filter(|t| !t.trim().is_empty())
                .map(parse_ints)
                .collect::<Result<Vec<Point>, _>>()?;
            PointSet::explicit(pts)
        }
        "box" => {
            let (lo, hi) = body
                .split_once(':')
                .ok_or_else(|| usage(format!("box spec `{spec}` needs LO:HI")))?;
            PointSet::Box {
                lo: parse_ints(lo)?,
                hi: parse_ints(hi)?,
            }
        }
        "witness" => {
            let w = WitnessKind::parse(body).ok_or_else(|| usage(format!("unknown witness `{body}`")))?;
            let (e, f) = extremal_witnesses(sys, ground, w)?;
            match role {
                SetRole::E => e,
                SetRole::F => f,
            }
        }
        "file" => {
            let text = std::fs::read_to_string(Path::new(body))
                .map_err(|e| usage(format!("cannot read `{body}`: {e}")))?;
            let text = text.trim();
            if text.starts_with('[') {
                let pts: Vec<Point> =
                    serde_json::from_str(text).map_err(|e| usage(format!("bad point file `{body}`: {e}")))?;
                PointSet::explicit(pts)
            } else {
                return parse_point_set(text, role, sys, ground);
            }
        }
        _ => return Err(usage(format!("unknown set kind `{kind}`"))),
    };
    if let Some(d) = set.dim() {
        if d != sys.r() {
            return Err(usage(format!("set `{spec}` lives in Z^{d}, the curve in Z^{}", sys.r())));
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::new("monomials:1,2", vec!["range:20".into()]);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn json_round_trip() {
        let mut a = ExperimentConfig::new("moment:2", vec!["range:8".into()]);
        a.a_sampling = ASampling::Explicit {
            targets: vec![vec![1, 3]],
        };
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), a);
        let minimal = ExperimentConfig::from_json(r#"{"curve":"moment:2","sets":["range:4"]}"#).unwrap();
        assert_eq!(minimal.samples, 20);
        assert_eq!(minimal.a_sampling, ASampling::UniformBox);
    }

    #[test]
    fn validation_errors() {
        let mut a = ExperimentConfig::new("moment:2", vec!["file:/nonexistent/set.txt".into()]);
        assert!(matches!(a.validate(), Err(HarnessError::Usage(_))));
        a.sets = vec!["range:5".into()];
        a.budget = 0;
        assert!(a.validate().is_err());
        a.budget = 10;
        a.a_sampling = ASampling::parse("explicit:1,2,3").unwrap();
        assert!(a.validate().is_err());
        a.a_sampling = ASampling::parse("explicit:1,2;0,4").unwrap();
        assert!(a.validate().is_ok());
    }

    #[test]
    fn default_exponents() {
        let a = ExperimentConfig::new("moment:3", vec![]);
        let (p, q) = a.exponents(3).unwrap();
        assert_eq!(p.to_string(), "7/4");
        assert_eq!(q.to_string(), "7/3");
    }

    #[test]
    fn point_set_specs() {
        let sys = SeparatedSystem::moment(2);
        let ground = GroundSet::range(3);
        let p = parse_point_set("points:0,0;1,1", SetRole::E, &sys, &ground).unwrap();
        assert_eq!(p.len(), 2.into());
        let b = parse_point_set("box:0,0:2,3", SetRole::F, &sys, &ground).unwrap();
        assert_eq!(b.len(), 12.into());
        let w = parse_point_set("witness:curve", SetRole::E, &sys, &ground).unwrap();
        assert_eq!(w.len(), 3.into());
        assert!(parse_point_set("points:1,2,3", SetRole::E, &sys, &ground).is_err());
        assert!(parse_point_set("blob:1", SetRole::E, &sys, &ground).is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.json");
        std::fs::write(&path, "[[0,0],[2,4]]").unwrap();
        let f = parse_point_set(&format!("file:{}", path.display()), SetRole::E, &sys, &ground).unwrap();
        assert!(f.contains(&[2, 4]));
    }
}
