use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::matrix::Matrix;
use crate::statespace::{StateSpaceModel, TimeDomain};

/// On-disk JSON model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub time_domain: TimeDomain,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<BTreeMap<String, f64>>,
}

impl ModelFile {
    pub fn from_model(model: &StateSpaceModel, metadata: Option<Metadata>) -> Self {
        Self {
            time_domain: model.domain(),
            a: model.a().to_rows(),
            b: model.b().to_rows(),
            c: model.c().to_rows(),
            metadata,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_model(&self) -> Result<StateSpaceModel, CliError> {
        let mat = |rows: &[Vec<f64>], name: &str| {
            Matrix::from_rows(rows).map_err(|e| CliError::Dimension(format!("{name}: {e}")))
        };
        StateSpaceModel::new(self.time_domain, mat(&self.a, "A")?, mat(&self.b, "B")?, mat(&self.c, "C")?)
            .map_err(|e| CliError::Dimension(e.to_string()))
    }

    /// Canonical serialization: two-space pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model file serializes");
        s.push('\n');
        s
    }
}

/// Reads and validates a model file.
pub fn parse_model(path: impl AsRef<Path>) -> Result<StateSpaceModel, CliError> {
    let (file, _) = read_model_file(path.as_ref())?;
    file.to_model()
}

pub(crate) fn read_model_file(path: &Path) -> Result<(ModelFile, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let file = ModelFile::parse(text)?;
    Ok((file, bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    const WELL_FORMED: &str = r#"{"time_domain": "continuous", "A": [[0, 1], [-1, 0]], "B": [[0], [1]], "C": [[1, 1]]}"#;

    #[test]
    fn parses_dimensions() {
        let m = ModelFile::parse(WELL_FORMED).unwrap().to_model().unwrap();
        assert_eq!((m.order(), m.inputs(), m.outputs()), (2, 1, 1));
    }

    #[test]
    fn rejects_bad_dimensions() {
        let text = r#"{"time_domain": "discrete", "A": [[1, 0], [0, 1]], "B": [[0], [1], [2]], "C": [[1, 1]]}"#;
        assert!(matches!(ModelFile::parse(text).unwrap().to_model(), Err(CliError::Dimension(_))));
        let ragged = r#"{"time_domain": "discrete", "A": [[1, 0], [0]], "B": [[0], [1]], "C": [[1, 1]]}"#;
        assert!(matches!(ModelFile::parse(ragged).unwrap().to_model(), Err(CliError::Dimension(_))));
    }

    #[test]
    fn rejects_bad_json() {
        assert!(matches!(ModelFile::parse("{"), Err(CliError::Parse(_))));
        let unknown = r#"{"time_domain": "sometimes", "A": [[1]], "B": [[1]], "C": [[1]]}"#;
        assert!(matches!(ModelFile::parse(unknown), Err(CliError::Parse(_))));
    }
}
