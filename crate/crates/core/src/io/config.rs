//! JSON run configuration for the `evolve` command.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::snapshot::load_header;
use crate::error::{InlsError, Result};
use crate::evolution::EvolutionConfig;
use crate::model::{CartesianGrid, Centering, Params};
use crate::transforms::SFamilyParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(rename = "N")]
    pub dim: usize,
    pub b: f64,
    /// Non-critical power; omitted for the critical `p = 1 + (4-2b)/N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl ParamsSpec {
    pub fn build(&self) -> Result<Params> {
        let params = match self.p {
            None => Params::new(self.dim, self.b),
            Some(p) => Params::with_power(self.dim, self.b, p),
        };
        params.map_err(|e| {
            let field = if self.dim == 0 { "params.N" } else { "params.b" };
            InlsError::validation(field, e.to_string())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "M")]
    pub points: usize,
    #[serde(rename = "L")]
    pub extent: f64,
    #[serde(default = "default_centering")]
    pub centering: Centering,
}

fn default_centering() -> Centering {
    Centering::Cell
}

impl GridSpec {
    pub fn build(&self, dim: usize) -> Result<CartesianGrid> {
        CartesianGrid::new(dim, self.points, self.extent, self.centering)
            .map_err(|e| InlsError::validation("grid", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    GroundState,
    SFamily {
        #[serde(rename = "T")]
        t_blowup: f64,
        lambda0: f64,
        gamma0: f64,
    },
    Gaussian {
        amplitude: f64,
        width: f64,
    },
    Snapshot {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Directory for every output; created if missing.
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_diagnostics")]
    pub diagnostics: String,
    /// Snapshots are written as `<prefix>_<index>.inls`.
    #[serde(default = "default_prefix")]
    pub snapshot_prefix: String,
    #[serde(default = "default_final")]
    pub final_state: String,
    /// Copy of the effective configuration.
    #[serde(default = "default_echo")]
    pub echo: String,
}

fn default_directory() -> PathBuf {
    PathBuf::from(".")
}
fn default_diagnostics() -> String {
    "diagnostics.csv".into()
}
fn default_prefix() -> String {
    "snapshot".into()
}
fn default_final() -> String {
    "final.inls".into()
}
fn default_echo() -> String {
    "config.json".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            directory: default_directory(),
            diagnostics: default_diagnostics(),
            snapshot_prefix: default_prefix(),
            final_state: default_final(),
            echo: default_echo(),
        }
    }
}

impl OutputSpec {
    pub fn path(&self, name: &str) -> PathBuf {
        self.directory.join(name)
    }

    pub fn snapshot_path(&self, index: usize) -> PathBuf {
        self.directory.join(format!("{}_{index:04}.inls", self.snapshot_prefix))
    }

    fn validate(&self) -> Result<()> {
        for (field, name) in [
            ("outputs.diagnostics", &self.diagnostics),
            ("outputs.snapshot_prefix", &self.snapshot_prefix),
            ("outputs.final_state", &self.final_state),
            ("outputs.echo", &self.echo),
        ] {
            if name.is_empty() || name.contains('/') || name.contains('\\') {
                return Err(InlsError::validation(field, "must be a plain file name"));
            }
        }
        // The directory itself, or its closest existing ancestor, must be a
        // writable directory.
        let mut probe: &Path = &self.directory;
        loop {
            if probe.as_os_str().is_empty() {
                probe = Path::new(".");
            }
            if probe.exists() {
                let meta = probe.metadata()?;
                if !meta.is_dir() {
                    return Err(InlsError::validation(
                        "outputs.directory",
                        format!("{} is not a directory", probe.display()),
                    ));
                }
                if meta.permissions().readonly() {
                    return Err(InlsError::validation(
                        "outputs.directory",
                        format!("{} is read-only", probe.display()),
                    ));
                }
                return Ok(());
            }
            match probe.parent() {
                Some(p) => probe = p,
                None => return Ok(()),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsSpec,
    pub grid: GridSpec,
    pub initial_condition: InitialCondition,
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    /// Checks every field; reads the header of a snapshot initial condition.
    pub fn validate(&self) -> Result<(Params, CartesianGrid)> {
        let params = self.params.build()?;
        let grid = self.grid.build(params.dim())?;
        self.evolution.validate().map_err(|e| prefix(e, "evolution"))?;
        match &self.initial_condition {
            InitialCondition::GroundState => {}
            InitialCondition::SFamily {
                t_blowup,
                lambda0,
                gamma0,
            } => {
                SFamilyParams::new(*t_blowup, *lambda0, *gamma0)
                    .map_err(|e| InlsError::validation("initial_condition", e.to_string()))?;
            }
            InitialCondition::Gaussian { amplitude, width } => {
                if !(amplitude.is_finite() && *width > 0.0 && width.is_finite()) {
                    return Err(InlsError::validation(
                        "initial_condition",
                        "gaussian needs a finite amplitude and a positive width",
                    ));
                }
            }
            InitialCondition::Snapshot { path } => {
                let h = load_header(path)?;
                if h.grid != grid {
                    return Err(InlsError::validation(
                        "initial_condition.path",
                        format!(
                            "snapshot grid (N = {}, M = {}, L = {}) differs from the configured grid",
                            h.grid.dim(),
                            h.grid.points(),
                            h.grid.extent()
                        ),
                    ));
                }
            }
        }
        self.outputs.validate()?;
        Ok((params, grid))
    }

    pub fn to_json(&self) -> String {
        super::json::to_string(self)
    }
}

fn prefix(e: InlsError, section: &str) -> InlsError {
    match e {
        InlsError::ConfigValidation { field, message } => InlsError::ConfigValidation {
            field: format!("{section}.{field}"),
            message,
        },
        other => other,
    }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| InlsError::ConfigParse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "params": {"N": 1, "b": 0.5},
        "grid": {"M": 64, "L": 10},
        "initial_condition": {"type": "gaussian", "amplitude": 0.5, "width": 1},
        "evolution": {"dt0": 0.001, "t_end": 0.01}
    }"#;

    #[test]
    fn minimal_config_fills_defaults_and_echoes() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.evolution.record_every, 1);
        assert_eq!(cfg.outputs, OutputSpec::default());
        assert_eq!(cfg.grid.centering, Centering::Cell);
        assert_eq!(parse_config(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn b_out_of_range_names_the_field() {
        let text = MINIMAL.replace("\"b\": 0.5", "\"b\": 3");
        match parse_config(&text) {
            Err(InlsError::ConfigValidation { field, message }) => {
                assert_eq!(field, "params.b");
                assert!(message.contains("0 < b < min{2, N}"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let text = MINIMAL.replace("\"seed\"", "x").replace("\"dt0\"", "\"dt_zero\": 1, \"dt0\"");
        match parse_config(&text) {
            Err(InlsError::ConfigParse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }
}
