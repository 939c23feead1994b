//! TOML run configuration, shipped presets and default provenance.

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::atomic::{doppler_scale_rb87, LevelScheme};
use crate::calibration::EffectiveParams;
use crate::drive::DriveConfig;
use crate::error::{Error, Result};
use crate::medium::MediumConfig;
use crate::scenarios::{SlowLightSpec, SlpSpec, StorageSpec};
use crate::solver::SimulationGrid;
use crate::spectra::QuadratureSpec;

/// Embedded preset documents, by name.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig2b", include_str!("../presets/fig2b.toml")),
    ("fig2c", include_str!("../presets/fig2c.toml")),
    ("fig3a", include_str!("../presets/fig3a.toml")),
    ("fig3b", include_str!("../presets/fig3b.toml")),
    ("fig3c_slp", include_str!("../presets/fig3c_slp.toml")),
];

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Phase mismatch of the Rb-87 ground splitting over a 10 cm medium.
pub fn default_phase_mismatch() -> f64 {
    LevelScheme::rb87_d2().phase_mismatch_for_length(0.10)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemeChoice {
    Named(String),
    Explicit(LevelScheme),
}

impl Default for SchemeChoice {
    fn default() -> Self {
        SchemeChoice::Named("rb87_d2".into())
    }
}

impl SchemeChoice {
    pub fn resolve(&self) -> Result<LevelScheme> {
        match self {
            SchemeChoice::Named(n) => LevelScheme::by_name(n).ok_or_else(|| {
                Error::invalid(
                    "scheme",
                    format!("unknown scheme `{n}` (rb87_d2, three_level, two_level)"),
                )
            }),
            SchemeChoice::Explicit(s) => {
                s.validate()?;
                Ok(*s)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MediumSection {
    pub od: f64,
    pub length: f64,
    /// Kelvin.
    pub theta: f64,
    pub gamma_trd: f64,
    pub gamma_inh: f64,
    pub sigma_pc: f64,
    pub sigma_a: f64,
    /// Doppler scale k v_th / Gamma; derived from `theta` for Rb-87 when absent.
    pub k_thermal: Option<f64>,
    pub phase_mismatch: f64,
}

impl Default for MediumSection {
    fn default() -> Self {
        MediumSection {
            od: 20.0,
            length: 1.0,
            theta: 0.0,
            gamma_trd: 0.0,
            gamma_inh: 0.0,
            sigma_pc: 1.0,
            sigma_a: 0.32,
            k_thermal: None,
            phase_mismatch: default_phase_mismatch(),
        }
    }
}

impl MediumSection {
    pub fn to_medium(&self) -> Result<MediumConfig> {
        let m = MediumConfig {
            od: self.od,
            length: self.length,
            theta: self.theta,
            gamma_trd: self.gamma_trd,
            gamma_inh: self.gamma_inh,
            sigma_pc: self.sigma_pc,
            sigma_a: self.sigma_a,
            k_thermal: self.k_thermal.unwrap_or_else(|| doppler_scale_rb87(self.theta)),
            phase_mismatch: self.phase_mismatch,
        };
        m.validate()?;
        Ok(m)
    }
}

/// Control-amplitude scale applied to every time-domain and homogeneous run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EffectiveSection {
    pub beta: f64,
}

impl Default for EffectiveSection {
    fn default() -> Self {
        EffectiveSection { beta: 1.0 }
    }
}

impl EffectiveSection {
    pub fn scale(&self, drive: &DriveConfig) -> Result<DriveConfig> {
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::invalid("effective.beta", "must be positive"));
        }
        Ok(drive.with_control_scale(self.beta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumModel {
    Homogeneous,
    Inhomogeneous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub model: SpectrumModel,
    pub omega_c: f64,
    pub delta_c: f64,
    pub center: f64,
    pub half_span: f64,
    pub points: usize,
    pub quadrature: QuadratureSpec,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        SpectrumSection {
            model: SpectrumModel::Inhomogeneous,
            omega_c: 0.0,
            delta_c: 0.0,
            center: 0.0,
            half_span: 8.0,
            points: 161,
            quadrature: QuadratureSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSection {
    pub omega_c: f64,
    pub delta_c: f64,
    /// Grid half width around the inhomogeneous EIT peak.
    pub half_span: f64,
    pub points: usize,
}

impl Default for CalibrationSection {
    fn default() -> Self {
        CalibrationSection {
            omega_c: 3.7,
            delta_c: 1.0,
            half_span: 3.0,
            points: 61,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted key path, e.g. `slp.omega_c_minus`.
    pub param: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Subcommand run for every parameter tuple.
    pub command: String,
    pub axes: Vec<SweepAxis>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub snapshot_stride: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Preset the document is layered on (resolved before deserialization).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default)]
    pub scheme: SchemeChoice,
    #[serde(default)]
    pub medium: MediumSection,
    #[serde(default)]
    pub effective: EffectiveSection,
    #[serde(default)]
    pub grid: SimulationGrid,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slowlight: Option<SlowLightSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub storage: Option<StorageSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slp: Option<SlpSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

impl RunConfig {
    pub fn scheme(&self) -> Result<LevelScheme> {
        self.scheme.resolve()
    }

    pub fn medium(&self) -> Result<MediumConfig> {
        self.medium.to_medium()
    }

    pub fn validate(&self) -> Result<()> {
        self.scheme()?;
        self.medium()?;
        self.grid.validate()?;
        self.effective.scale(&DriveConfig::cw(0.0, 0.0, 0.0))?;
        if let Some(s) = &self.spectrum {
            if s.points < 2 || !(s.half_span > 0.0) {
                return Err(Error::invalid(
                    "spectrum.points",
                    "need >= 2 points over a positive span",
                ));
            }
        }
        if let Some(c) = &self.calibration {
            if c.points < 2 || !(c.half_span > 0.0) {
                return Err(Error::invalid(
                    "calibration.points",
                    "need >= 2 points over a positive span",
                ));
            }
        }
        if let Some(s) = &self.storage {
            if !(s.storage_time >= 0.0) {
                return Err(Error::invalid("storage.storage_time", "must be >= 0"));
            }
        }
        if let Some(s) = &self.slp {
            if !(s.backward_off > s.backward_on) {
                return Err(Error::invalid("slp.backward_off", "must come after slp.backward_on"));
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.axes.is_empty() || sw.axes.iter().any(|a| a.values.is_empty()) {
                return Err(Error::invalid("sweep.axes", "need at least one axis with values"));
            }
        }
        Ok(())
    }

    /// Homogeneous 1D parameters after the effective control scale.
    pub fn effective_params(&self) -> EffectiveParams {
        EffectiveParams {
            beta: self.effective.beta,
            gamma_inh: self.medium.gamma_inh,
            residual: 0.0,
        }
    }
}

/// Where a resolved value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Config,
    Preset,
    Default,
}

/// A parsed configuration together with the documents it was built from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    /// Preset and user document merged, before defaults.
    pub merged: Table,
    pub user: Table,
    pub preset: Option<Table>,
}

fn parse_table(text: &str, origin: &str) -> Result<Table> {
    text.parse::<Table>()
        .map_err(|e| Error::Config(format!("{origin}: {e}")))
}

/// Recursively overlays `over` onto `base`.
pub fn merge(base: &mut Table, over: &Table) {
    for (k, v) in over {
        match (base.get_mut(k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

/// Sets a dotted key path, creating intermediate tables.
pub fn set_path(table: &mut Table, path: &str, value: Value) -> Result<()> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::Config(format!("empty key path `{path}`")))?;
    let mut cur = table;
    for p in parts {
        let entry = cur.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        cur = match entry {
            Value::Table(t) => t,
            _ => return Err(Error::Config(format!("`{p}` in `{path}` is not a table"))),
        };
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

fn contains_path(table: &Table, path: &str) -> bool {
    let mut cur = table;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, p) in parts.iter().enumerate() {
        match cur.get(*p) {
            Some(Value::Table(t)) if i + 1 < parts.len() => cur = t,
            Some(_) if i + 1 == parts.len() => return true,
            Some(Value::Table(_)) => return true,
            _ => return false,
        }
    }
    false
}

impl LoadedConfig {
    /// Parses a user document, layering it over `preset` (or the preset it
    /// names itself).
    pub fn parse(text: &str, preset: Option<&str>) -> Result<Self> {
        let user = parse_table(text, "config")?;
        let named = match (preset, user.get("preset")) {
            (Some(p), _) => Some(p.to_string()),
            (None, Some(Value::String(p))) => Some(p.clone()),
            (None, Some(_)) => return Err(Error::invalid("preset", "must be a preset name")),
            (None, None) => None,
        };
        let preset = match named {
            Some(name) => {
                let text = preset_text(&name).ok_or_else(|| {
                    let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
                    Error::invalid(
                        "preset",
                        format!("unknown preset `{name}` (available: {})", names.join(", ")),
                    )
                })?;
                Some(parse_table(text, &format!("preset {name}"))?)
            }
            None => None,
        };
        Self::from_tables(user, preset)
    }

    pub fn from_preset(name: &str) -> Result<Self> {
        Self::parse("", Some(name))
    }

    fn from_tables(user: Table, preset: Option<Table>) -> Result<Self> {
        let mut merged = preset.clone().unwrap_or_default();
        merge(&mut merged, &user);
        let config: RunConfig = merged
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(LoadedConfig {
            config,
            merged,
            user,
            preset,
        })
    }

    /// Same documents with one dotted key overridden in the user layer.
    pub fn with_override(&self, path: &str, value: Value) -> Result<Self> {
        let mut user = self.user.clone();
        set_path(&mut user, path, value)?;
        Self::from_tables(user, self.preset.clone())
    }

    pub fn provenance(&self, path: &str) -> Provenance {
        if contains_path(&self.user, path) {
            Provenance::Config
        } else if self.preset.as_ref().is_some_and(|p| contains_path(p, path)) {
            Provenance::Preset
        } else {
            Provenance::Default
        }
    }

    pub fn is_set(&self, path: &str) -> bool {
        self.provenance(path) != Provenance::Default
    }

    /// Resolved configuration plus a `[provenance]` table naming the source
    /// of every leaf value.
    pub fn resolved_toml(&self, extra: &[(&str, Value)]) -> Result<String> {
        let mut resolved = Table::try_from(&self.config).map_err(|e| Error::Config(e.to_string()))?;
        resolved.remove("preset");
        for (path, v) in extra {
            set_path(&mut resolved, path, v.clone())?;
        }
        let mut leaves = Vec::new();
        flatten("", &resolved, &mut leaves);
        let mut prov = Table::new();
        for path in leaves {
            let source = if extra.iter().any(|(p, _)| *p == path) {
                "auto".to_string()
            } else {
                format!("{:?}", self.provenance(&path)).to_lowercase()
            };
            prov.insert(path, Value::String(source));
        }
        let mut doc = Table::new();
        doc.insert(
            "format_version".into(),
            Value::Integer(crate::io::FORMAT_VERSION as i64),
        );
        if let Some(Value::String(p)) = self.merged.get("preset") {
            doc.insert("preset".into(), Value::String(p.clone()));
        }
        merge(&mut doc, &resolved);
        doc.insert("provenance".into(), Value::Table(prov));
        toml::to_string(&doc).map_err(|e| Error::Config(e.to_string()))
    }
}

fn flatten(prefix: &str, table: &Table, out: &mut Vec<String>) {
    for (k, v) in table {
        let path = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Table(t) if !t.is_empty() => flatten(&path, t, out),
            _ => out.push(path),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_gets_defaults() {
        let c = LoadedConfig::parse("scheme = \"rb87_d2\"\n[spectrum]\n", None).unwrap();
        let s = c.config.spectrum.as_ref().unwrap();
        assert_eq!(s.points, 161);
        assert_eq!(s.half_span, 8.0);
        assert_eq!(c.config.grid.n_max, 3);
        assert_eq!(c.provenance("scheme"), Provenance::Config);
        assert_eq!(c.provenance("medium.od"), Provenance::Default);
        let text = c.resolved_toml(&[]).unwrap();
        assert!(text.contains("[provenance]"));
        assert!(text.contains("\"medium.od\" = \"default\""));
    }

    #[test]
    fn negative_od_names_the_key() {
        let err = LoadedConfig::parse("[medium]\nod = -3.0\n", None).unwrap_err();
        match err {
            Error::InvalidParameter { name, .. } => assert_eq!(name, "medium.od"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = LoadedConfig::parse("[medium]\nodd = 3.0\n", None).unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("odd")), "{err}");
        assert!(LoadedConfig::parse("colour = 1\n", None).is_err());
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = LoadedConfig::parse("[medium\nod = 1\n", None).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn every_preset_parses_and_validates() {
        for (name, _) in PRESETS {
            let c = LoadedConfig::from_preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(c.provenance("medium.od"), Provenance::Preset, "{name}");
        }
    }

    #[test]
    fn slp_preset_carries_the_published_parameters() {
        let c = LoadedConfig::from_preset("fig3c_slp").unwrap();
        let slp = c.config.slp.unwrap();
        assert_eq!(c.config.medium.od, 53.0);
        assert_eq!(c.config.medium.theta, 350e-6);
        assert_eq!((slp.omega_c_plus, slp.omega_c_minus), (2.6, 3.8));
        assert_eq!(
            (slp.delta_c_plus, slp.delta_p_plus, slp.delta_c_minus),
            (1.0, 0.45, -2.5)
        );
    }

    #[test]
    fn user_document_overrides_preset() {
        let c = LoadedConfig::parse("preset = \"fig3b\"\n[medium]\nod = 100.0\n", None).unwrap();
        assert_eq!(c.config.medium.od, 100.0);
        assert_eq!(c.config.medium.theta, 450e-6);
        assert_eq!(c.provenance("medium.od"), Provenance::Config);
        assert_eq!(c.provenance("medium.theta"), Provenance::Preset);
        let o = c.with_override("storage.storage_time", Value::Float(38.0)).unwrap();
        assert_eq!(o.config.storage.unwrap().storage_time, 38.0);
    }
}
