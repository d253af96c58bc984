//! Flat TOML experiment configuration.
//!
//! Keys: `experiment`, `group` (`"su2"` or `"torus<d>"`), `lambda`, `tau`,
//! `k_range` (list, or `"a..b"` inclusive), `output_dir`, `seed`, and the
//! optional `grid_group`, `grid_polar`, `grid_azimuth`, `samples`. Unknown
//! keys are rejected.

use std::path::PathBuf;

use grauert_core::{GroupKind, GroupSpec, LabError, Resolution, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    TorusExample,
    KernelDiagonal,
    Scaling,
    RapidDecay,
    KirillovCheck,
    HusimiBound,
    LpNorm,
    Orthogonality,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::TorusExample,
        Experiment::KirillovCheck,
        Experiment::Orthogonality,
        Experiment::KernelDiagonal,
        Experiment::RapidDecay,
        Experiment::HusimiBound,
        Experiment::LpNorm,
        Experiment::Scaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::TorusExample => "torus-example",
            Experiment::KernelDiagonal => "kernel-diagonal",
            Experiment::Scaling => "scaling",
            Experiment::RapidDecay => "rapid-decay",
            Experiment::KirillovCheck => "kirillov-check",
            Experiment::HusimiBound => "husimi-bound",
            Experiment::LpNorm => "lp-norm",
            Experiment::Orthogonality => "orthogonality",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum RawRange {
    List(Vec<usize>),
    Text(String),
}

/// Ladder indices, given as a list or an inclusive `"a..b"` range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRange", into = "Vec<usize>")]
pub struct KRange(pub Vec<usize>);

impl TryFrom<RawRange> for KRange {
    type Error = String;

    fn try_from(raw: RawRange) -> std::result::Result<Self, String> {
        match raw {
            RawRange::List(v) => Ok(KRange(v)),
            RawRange::Text(s) => {
                let (a, b) = s.split_once("..").ok_or_else(|| format!("bad k_range {s:?}"))?;
                let b = b.trim_start_matches('=');
                let a: usize = a.trim().parse().map_err(|_| format!("bad k_range start {a:?}"))?;
                let b: usize = b.trim().parse().map_err(|_| format!("bad k_range end {b:?}"))?;
                Ok(KRange((a..=b).collect()))
            }
        }
    }
}

impl From<KRange> for Vec<usize> {
    fn from(k: KRange) -> Self {
        k.0
    }
}

impl KRange {
    pub fn inclusive(a: usize, b: usize) -> Self {
        KRange((a..=b).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub group: String,
    pub lambda: Vec<i64>,
    pub tau: f64,
    pub k_range: KRange,
    pub output_dir: PathBuf,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_group: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_polar: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_azimuth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

const NON_GOALS: &str = "only T^d (d ≤ 3 for X^τ grids) and SU(2) are instantiated";

pub fn parse_group(name: &str) -> Result<GroupKind> {
    if name == "su2" {
        return Ok(GroupKind::Su2);
    }
    if let Some(d) = name.strip_prefix("torus") {
        let d: usize = d.parse().map_err(|_| LabError::Config(format!("bad group {name:?}")))?;
        if d == 0 {
            return Err(LabError::Config("torus dimension must be positive".into()));
        }
        return Ok(GroupKind::Torus { d });
    }
    Err(LabError::Unimplemented(format!("group {name:?}: {NON_GOALS}")))
}

impl ExperimentConfig {
    /// Configuration reproducing the acceptance run of `experiment`.
    pub fn default_for(experiment: Experiment) -> Self {
        let su2 = |k: KRange, tau: f64| ExperimentConfig {
            experiment,
            group: "su2".into(),
            lambda: vec![1],
            tau,
            k_range: k,
            output_dir: PathBuf::from("out"),
            seed: 20240601,
            grid_group: None,
            grid_polar: None,
            grid_azimuth: None,
            samples: None,
        };
        match experiment {
            Experiment::TorusExample => ExperimentConfig {
                group: "torus2".into(),
                lambda: vec![3, 4],
                grid_azimuth: Some(256),
                samples: Some(8),
                ..su2(KRange::inclusive(1, 64), 0.4)
            },
            Experiment::Scaling => ExperimentConfig {
                group: "torus2".into(),
                lambda: vec![3, 4],
                grid_azimuth: Some(256),
                ..su2(KRange::inclusive(1, 64), 0.4)
            },
            Experiment::KirillovCheck => ExperimentConfig { samples: Some(16), ..su2(KRange::inclusive(0, 20), 1.0) },
            Experiment::Orthogonality => su2(KRange::inclusive(0, 20), 0.3),
            Experiment::KernelDiagonal => su2(KRange::inclusive(8, 32), 0.3),
            Experiment::RapidDecay => ExperimentConfig { samples: Some(8), ..su2(KRange::inclusive(4, 32), 0.3) },
            Experiment::HusimiBound => {
                ExperimentConfig { samples: Some(16), ..su2(KRange((8..=32).step_by(4).collect()), 0.3) }
            }
            Experiment::LpNorm => su2(KRange::inclusive(2, 8), 0.3),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LabError::Serialization(e.to_string()))
    }

    pub fn group_kind(&self) -> Result<GroupKind> {
        parse_group(&self.group)
    }

    pub fn spec(&self) -> Result<GroupSpec> {
        Ok(GroupSpec::from_kind(self.group_kind()?))
    }

    pub fn ks(&self) -> &[usize] {
        &self.k_range.0
    }

    /// Grid resolution with explicit overrides applied to `default`.
    pub fn resolution_or(&self, default: Resolution) -> Resolution {
        Resolution {
            group: self.grid_group.unwrap_or(default.group),
            polar: self.grid_polar.unwrap_or(default.polar),
            azimuth: self.grid_azimuth.unwrap_or(default.azimuth),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::Config(m));
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau must be positive and finite, got {}", self.tau));
        }
        let ks = self.ks();
        if ks.is_empty() {
            return bad("k_range is empty".into());
        }
        if ks.windows(2).any(|w| w[1] <= w[0]) {
            return bad("k_range must be strictly increasing".into());
        }
        let kind = self.group_kind()?;
        if let GroupKind::Torus { d } = kind {
            if d > 3 {
                return Err(LabError::Unimplemented(format!("torus{d}: {NON_GOALS}")));
            }
        }
        let spec = GroupSpec::from_kind(kind);
        let lambda = spec.weight(&self.lambda)?;
        if !spec.is_dominant(&lambda) {
            return bad(format!("lambda {:?} is not dominant", self.lambda));
        }
        if lambda.is_zero() {
            return bad("lambda must be nonzero".into());
        }
        let needs_k0 = matches!(self.experiment, Experiment::KirillovCheck | Experiment::Orthogonality);
        if !needs_k0 && ks[0] == 0 {
            return bad("k_range entries must be ≥ 1".into());
        }
        for (name, v) in [
            ("grid_group", self.grid_group),
            ("grid_polar", self.grid_polar),
            ("grid_azimuth", self.grid_azimuth),
            ("samples", self.samples),
        ] {
            if v == Some(0) {
                return bad(format!("{name} must be positive"));
            }
        }
        let su2_only = matches!(
            self.experiment,
            Experiment::KirillovCheck
                | Experiment::Orthogonality
                | Experiment::KernelDiagonal
                | Experiment::RapidDecay
                | Experiment::HusimiBound
        );
        if su2_only && kind != GroupKind::Su2 {
            return Err(LabError::Unimplemented(format!(
                "{} is an SU(2) experiment; {NON_GOALS}",
                self.experiment.name()
            )));
        }
        if self.experiment == Experiment::TorusExample && kind == GroupKind::Su2 {
            return Err(LabError::Unimplemented("torus-example needs a torus group".into()));
        }
        if matches!(self.experiment, Experiment::RapidDecay) && ks.len() < 5 {
            return bad("rapid-decay needs at least 5 values of k".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_roundtrip() {
        for e in Experiment::ALL {
            let c = ExperimentConfig::default_for(e);
            c.validate().unwrap();
            let back = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn range_strings_parse() {
        let text = r#"
experiment = "torus-example"
group = "torus2"
lambda = [3, 4]
tau = 0.4
k_range = "1..64"
output_dir = "out"
seed = 1
"#;
        let c = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(c.ks().len(), 64);
        assert_eq!((c.ks()[0], c.ks()[63]), (1, 64));
    }

    #[test]
    fn invalid_configs_fail_fast() {
        let base = ExperimentConfig::default_for(Experiment::TorusExample);
        let mut c = base.clone();
        c.tau = 0.0;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.k_range = KRange(vec![3, 2]);
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.group = "su3".into();
        assert!(matches!(c.validate(), Err(LabError::Unimplemented(_))));
        let mut c = base.clone();
        c.group = "torus5".into();
        c.lambda = vec![1; 5];
        assert!(matches!(c.validate(), Err(LabError::Unimplemented(_))));
        let mut c = ExperimentConfig::default_for(Experiment::KernelDiagonal);
        c.lambda = vec![-1];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default_for(Experiment::RapidDecay);
        c.group = "torus2".into();
        c.lambda = vec![1, 0];
        assert!(matches!(c.validate(), Err(LabError::Unimplemented(_))));
        let unknown = "experiment = \"scaling\"\ngroup = \"su2\"\nlambda = [1]\ntau = 0.3\nk_range = [1, 2]\noutput_dir = \"o\"\nseed = 1\ncolour = 3\n";
        assert!(ExperimentConfig::from_toml(unknown).is_err());
    }
}
