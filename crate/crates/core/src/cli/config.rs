//! Scenario files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cover::{Caps, Theta};
use crate::error::{Error, Result};
use crate::estimate::{Method, Source};
use crate::metric::FiniteMetricNDS;
use crate::symbolic::{Alphabet, BlockCode, MapSpec, Symbol, SymbolicNDS, TailedPoint, TargetSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub system: SystemSpec,
    #[serde(default)]
    pub target: TargetSpec,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub output: OutputSpec,
    /// Read only by the `laws` command.
    #[serde(default)]
    pub laws: LawsSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Symbolic {
        alphabet: usize,
        #[serde(default)]
        preperiod: Vec<MapConfig>,
        period: Vec<MapConfig>,
    },
    Metric {
        dist: Vec<Vec<f64>>,
        #[serde(default)]
        preperiod: Vec<Vec<usize>>,
        period: Vec<Vec<usize>>,
    },
}

/// A shift step, or a block-code table over the window `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapConfig {
    Shift(u32),
    Code { lo: i64, hi: i64, table: Vec<Symbol> },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    #[default]
    Whole,
    Family { tail: Symbol, k_max: i64 },
    Window { tail: Symbol, lo: i64, hi: i64 },
    Points { points: Vec<PointSpec> },
    Union { parts: Vec<TargetSpec> },
    /// Point indices of a metric system.
    Subset { points: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    #[serde(default)]
    pub left: Symbol,
    #[serde(default)]
    pub right: Symbol,
    #[serde(default)]
    pub core: Vec<Symbol>,
    #[serde(default)]
    pub start: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub theta: Vec<Theta>,
    pub n_min: usize,
    pub n_max: usize,
    pub radius: Option<u32>,
    pub eps: Option<f64>,
    #[serde(default)]
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawsSpec {
    pub filter: Option<String>,
}

/// Settings of the `laws` command; every table is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LawsConfig {
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub laws: LawsSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.caps.validate()?;
        if self.sweep.theta.is_empty() {
            return Err(Error::invalid("sweep.theta must list at least one value"));
        }
        if self.sweep.n_min == 0 || self.sweep.n_min > self.sweep.n_max {
            return Err(Error::invalid("sweep needs 1 <= n_min <= n_max"));
        }
        self.source()?;
        Ok(())
    }

    pub fn ns(&self) -> Vec<usize> {
        (self.sweep.n_min..=self.sweep.n_max).collect()
    }

    /// Sorted, deduplicated θ grid.
    pub fn grid(&self) -> Vec<Theta> {
        let mut g = self.sweep.theta.clone();
        g.sort();
        g.dedup();
        g
    }

    pub fn source(&self) -> Result<Source> {
        match &self.system {
            SystemSpec::Symbolic { alphabet, preperiod, period } => {
                let a = Alphabet::new(*alphabet)?;
                let maps = |v: &[MapConfig]| v.iter().map(|m| m.to_map(a)).collect::<Result<Vec<_>>>();
                let system = SymbolicNDS::new(a, maps(preperiod)?, maps(period)?)?;
                let target = self.target.to_target()?;
                target.check_alphabet(a)?;
                if self.sweep.eps.is_some() {
                    return Err(Error::invalid("symbolic systems take sweep.radius, not sweep.eps"));
                }
                Ok(Source::symbolic(system, target, self.sweep.radius.unwrap_or(0)))
            }
            SystemSpec::Metric { dist, preperiod, period } => {
                let system = FiniteMetricNDS::new(dist.clone(), preperiod.clone(), period.clone())?;
                let subset = match &self.target {
                    TargetSpec::Whole => (0..system.points()).collect(),
                    TargetSpec::Subset { points } => points.clone(),
                    _ => return Err(Error::invalid("metric systems take target kind \"whole\" or \"subset\"")),
                };
                if subset.is_empty() || subset.iter().any(|&p| p >= system.points()) {
                    return Err(Error::invalid("metric subset must be nonempty and index existing points"));
                }
                let eps = self.sweep.eps.ok_or_else(|| Error::invalid("metric systems need sweep.eps"))?;
                if eps.is_nan() || eps <= 0.0 || self.sweep.radius.is_some() {
                    return Err(Error::invalid("metric systems need sweep.eps > 0 and no radius"));
                }
                Ok(Source::Metric { system, subset, eps })
            }
        }
    }
}

impl LawsConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = toml::from_str(&read(path)?).map_err(|e| Error::invalid(format!("config: {e}")))?;
        cfg.caps.validate()?;
        Ok(cfg)
    }
}

impl MapConfig {
    fn to_map(&self, alphabet: Alphabet) -> Result<MapSpec> {
        match self {
            MapConfig::Shift(k) => MapSpec::shift(*k),
            MapConfig::Code { lo, hi, table } => Ok(MapSpec::BlockCode(BlockCode::new(alphabet, *lo, *hi, table.clone())?)),
        }
    }
}

impl TargetSpec {
    pub fn to_target(&self) -> Result<TargetSet> {
        Ok(match self {
            TargetSpec::Whole => TargetSet::WholeSpace,
            TargetSpec::Family { tail, k_max } => TargetSet::family(*tail, *k_max),
            TargetSpec::Window { tail, lo, hi } => TargetSet::FreeWindow { tail: *tail, lo: *lo, hi: *hi },
            TargetSpec::Points { points } => TargetSet::points(
                points.iter().map(|p| TailedPoint::new(p.left, p.right, p.core.clone(), p.start)).collect(),
            )?,
            TargetSpec::Union { parts } => TargetSet::Union(parts.iter().map(TargetSpec::to_target).collect::<Result<_>>()?),
            TargetSpec::Subset { .. } => return Err(Error::invalid("target kind \"subset\" needs a metric system")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
[system]
kind = "symbolic"
alphabet = 2
preperiod = [2]
period = [1]

[target]
kind = "family"
tail = 1
k_max = 2

[sweep]
theta = ["1", "1/2"]
n_min = 4
n_max = 8
radius = 0
"#;

    #[test]
    fn parses_symbolic_scenario() {
        let cfg = ScenarioConfig::parse(FULL).unwrap();
        assert_eq!(cfg.grid(), vec![Theta::new(1, 2).unwrap(), Theta::ONE]);
        assert_eq!(cfg.ns(), vec![4, 5, 6, 7, 8]);
        match cfg.source().unwrap() {
            Source::Symbolic { system, target, radius } => {
                assert_eq!(system, SymbolicNDS::two_shift_example());
                assert_eq!(target, TargetSet::family(1, 2));
                assert_eq!(radius, 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_theta_and_keys() {
        assert!(ScenarioConfig::parse(&FULL.replace("\"1/2\"", "\"-1\"")).is_err());
        assert!(ScenarioConfig::parse(&FULL.replace("\"1/2\"", "\"0.5\"")).is_err());
        assert!(ScenarioConfig::parse(&FULL.replace("radius = 0", "radius = 0\nbogus = 1")).is_err());
        assert!(ScenarioConfig::parse(&FULL.replace("n_min = 4", "n_min = 9")).is_err());
    }

    #[test]
    fn parses_code_tables_and_metric() {
        let codes = FULL.replace("period = [1]", "period = [{ lo = 0, hi = 1, table = [0, 1, 1, 0] }]");
        assert!(ScenarioConfig::parse(&codes).is_ok());
        let metric = r#"
[system]
kind = "metric"
dist = [[0.0, 1.0], [1.0, 0.0]]
period = [[1, 0]]

[sweep]
theta = ["1"]
n_min = 2
n_max = 5
eps = 0.5
"#;
        let cfg = ScenarioConfig::parse(metric).unwrap();
        assert!(matches!(cfg.source().unwrap(), Source::Metric { .. }));
    }
}
