//! Scenario configuration files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::atlas::{Atlas, ChartSpec};
use crate::dynamics::{Integrator, SimConfig, DEFAULT_SIM_R_MIN};
use crate::error::{Error, Result};
use crate::fields::FieldOneForm;
use crate::geom::Vec2;

use super::spec::split_top_level;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub atlas: Option<AtlasSpec>,
    #[serde(default)]
    pub simulation: SimulationBlock,
    #[serde(default)]
    pub outputs: OutputsBlock,
    #[serde(default)]
    pub sweep: Option<SweepBlock>,
}

/// Either `builtin` or both `fx` and `fy`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub builtin: Option<String>,
    pub name: Option<String>,
    pub fx: Option<String>,
    pub fy: Option<String>,
    #[serde(default)]
    pub singular_points: Vec<[f64; 2]>,
}

/// Either `builtin` (`quadrant`, or `single` with `basepoint`) or `charts`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasSpec {
    pub builtin: Option<String>,
    pub basepoint: Option<[f64; 2]>,
    pub charts: Option<Vec<ChartSpec>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationBlock {
    pub m: Option<f64>,
    pub q0: Option<[f64; 2]>,
    pub p0: Option<[f64; 2]>,
    pub h: Option<f64>,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    pub r_min: Option<f64>,
    pub integrator: Option<Integrator>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsBlock {
    /// Trajectory CSV.
    pub csv: Option<String>,
    /// Transition log; defaults to `<csv stem>.transitions.json`.
    pub transitions: Option<String>,
    pub svg: Option<String>,
}

/// Independent runs that differ only in step size.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub h: Vec<f64>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<ScenarioConfig> {
        Ok(serde_json::from_str(text)?)
    }
}

impl FieldSpec {
    /// `--field` argument: a built-in name or `fx,fy` expressions.
    pub fn from_arg(s: &str, singular: &[Vec2]) -> Result<FieldSpec> {
        if FieldOneForm::builtin(s.trim()).is_some() {
            return Ok(FieldSpec {
                builtin: Some(s.trim().to_string()),
                ..FieldSpec::default()
            });
        }
        let parts = split_top_level(s, ',');
        if parts.len() != 2 {
            return Err(Error::invalid(format!(
                "field `{s}` is neither a built-in ({}) nor `fx,fy`",
                FieldOneForm::BUILTIN_NAMES.join(", ")
            )));
        }
        Ok(FieldSpec {
            builtin: None,
            name: None,
            fx: Some(parts[0].trim().to_string()),
            fy: Some(parts[1].trim().to_string()),
            singular_points: singular.iter().map(|p| [p.x, p.y]).collect(),
        })
    }

    pub fn build(&self) -> Result<FieldOneForm> {
        match (&self.builtin, &self.fx, &self.fy) {
            (Some(b), None, None) => {
                let mut f = FieldOneForm::builtin(b).ok_or_else(|| {
                    Error::invalid(format!(
                        "unknown built-in field `{b}` ({})",
                        FieldOneForm::BUILTIN_NAMES.join(", ")
                    ))
                })?;
                if !self.singular_points.is_empty() {
                    f.singular_points = self.singular_points.iter().map(|&p| Vec2::from(p)).collect();
                }
                Ok(f)
            }
            (None, Some(fx), Some(fy)) => FieldOneForm::parse(
                self.name.clone().unwrap_or_else(|| format!("({fx}) dx + ({fy}) dy")),
                fx,
                fy,
                self.singular_points.iter().map(|&p| Vec2::from(p)).collect(),
            ),
            _ => Err(Error::invalid("field needs either `builtin` or both `fx` and `fy`")),
        }
    }
}

impl AtlasSpec {
    /// `--atlas` argument: `quadrant` or `single:x,y`.
    pub fn from_arg(s: &str) -> Result<AtlasSpec> {
        let s = s.trim();
        if s == "quadrant" {
            return Ok(AtlasSpec {
                builtin: Some("quadrant".into()),
                ..AtlasSpec::default()
            });
        }
        if let Some(bp) = s.strip_prefix("single:") {
            let p = super::spec::parse_point(bp)?;
            return Ok(AtlasSpec {
                builtin: Some("single".into()),
                basepoint: Some([p.x, p.y]),
                charts: None,
            });
        }
        Err(Error::invalid(format!(
            "unknown atlas `{s}` (quadrant, single:x,y, or charts in a config file)"
        )))
    }

    pub fn build(&self, punctures: &[Vec2]) -> Result<Atlas> {
        match (self.builtin.as_deref(), &self.charts) {
            (Some("quadrant"), None) => Ok(Atlas::quadrant()),
            (Some("single"), None) => {
                let bp = self.basepoint.ok_or_else(|| Error::invalid("single-chart atlas needs `basepoint`"))?;
                Ok(Atlas::single(Vec2::from(bp)))
            }
            (Some(b), None) => Err(Error::invalid(format!("unknown built-in atlas `{b}`"))),
            (None, Some(charts)) => Atlas::from_specs(charts, punctures),
            _ => Err(Error::invalid("atlas needs either `builtin` or `charts`")),
        }
    }
}

impl SimulationBlock {
    pub fn apply(&self, cfg: &mut SimConfig) {
        if let Some(v) = self.m {
            cfg.m = v;
        }
        if let Some(v) = self.q0 {
            cfg.q0 = Vec2::from(v);
        }
        if let Some(v) = self.p0 {
            cfg.p0 = Vec2::from(v);
        }
        if let Some(v) = self.h {
            cfg.h = v;
        }
        if let Some(v) = self.t_end {
            cfg.t_end = v;
        }
        cfg.r_min = self.r_min.unwrap_or(DEFAULT_SIM_R_MIN);
        if let Some(v) = self.integrator {
            cfg.integrator = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config_roundtrip() {
        let text = r#"{
            "field": {"builtin": "vortex"},
            "atlas": {"builtin": "quadrant"},
            "simulation": {"m": 2, "q0": [1, 0], "p0": [0, 1], "h": 0.01, "T": 1, "integrator": "rk4"},
            "outputs": {"csv": "out.csv"},
            "sweep": {"h": [0.01, 0.005]}
        }"#;
        let c = ScenarioConfig::from_json(text).unwrap();
        let f = c.field.as_ref().unwrap().build().unwrap();
        assert_eq!(f.name, "vortex");
        let at = c.atlas.as_ref().unwrap().build(&f.singular_points).unwrap();
        let mut sim = SimConfig::new(f, at);
        c.simulation.apply(&mut sim);
        assert_eq!((sim.m, sim.h, sim.t_end, sim.integrator), (2.0, 0.01, 1.0, Integrator::Rk4));
        assert_eq!(c.sweep.unwrap().h.len(), 2);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ScenarioConfig::from_json(r#"{"feild": {}}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"simulation": {"dt": 1}}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"field": {"builtin": "vortex", "colour": 1}}"#).is_err());
    }

    #[test]
    fn field_and_atlas_args() {
        let f = FieldSpec::from_arg("-y/(x^2+y^2), x/(x^2+y^2)", &[Vec2::ZERO]).unwrap().build().unwrap();
        assert_eq!(f.eval(Vec2::new(1.0, 0.0)).unwrap(), Vec2::new(0.0, 1.0));
        assert_eq!(f.singular_points, vec![Vec2::ZERO]);
        assert!(FieldSpec::from_arg("spiral", &[]).is_err());
        assert!(FieldSpec::from_arg("x+,y", &[]).unwrap().build().is_err());
        assert!(FieldSpec { builtin: Some("vortex".into()), fx: Some("x".into()), ..Default::default() }.build().is_err());
        assert_eq!(AtlasSpec::from_arg("quadrant").unwrap().build(&[]).unwrap().ids().len(), 4);
        assert_eq!(AtlasSpec::from_arg("single:1,2").unwrap().build(&[]).unwrap().ids().len(), 1);
        assert!(AtlasSpec::from_arg("hexagon").is_err());
    }

    #[test]
    fn chart_list_atlas() {
        let text = r#"{"atlas": {"charts": [
            {"id": 1, "constraints": [[0, 1, 0]], "basepoint": [0, 1]},
            {"id": 2, "constraints": [[0, -1, 0]], "basepoint": [0, -1]}
        ]}}"#;
        let c = ScenarioConfig::from_json(text).unwrap();
        let at = c.atlas.unwrap().build(&[]).unwrap();
        assert_eq!(at.ids().len(), 2);
    }
}
