//! On-disk layout for trained ensembles.
//!
//! A model is a directory:
//!
//! ```text
//! model_dir/
//!   manifest.json      decoding, learner spec, column value maps
//!   matrix.csv         the coding matrix (see `matrix_csv`)
//!   columns/col_000.json   one JSON file per trained column
//! ```
//!
//! Degenerate columns have no model file; the manifest records them
//! with `"model_file": null`. Loading reassembles and re-validates the
//! ensemble, so a directory that loads is usable.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use nary_ecoc_core::ensemble::{self, ColumnModel, EcocModel};
use nary_ecoc_core::learners::{BaseModel, LearnerSpec};
use nary_ecoc_core::metrics::Distance;

use crate::error::{AppError, Result};
use crate::io::matrix_csv;

const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    decoding: Distance,
    learner_spec: LearnerSpec,
    columns: Vec<ManifestColumn>,
}

#[derive(Serialize, Deserialize)]
struct ManifestColumn {
    values: Vec<i32>,
    model_file: Option<String>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

/// Writes a trained ensemble into `dir`, creating it if needed.
pub fn save_model(dir: &Path, model: &EcocModel) -> Result<()> {
    let columns_dir = dir.join("columns");
    fs::create_dir_all(&columns_dir).map_err(|e| AppError::io(&columns_dir, e))?;
    matrix_csv::save_matrix(&dir.join("matrix.csv"), &model.matrix)?;

    let mut manifest_columns = Vec::with_capacity(model.columns.len());
    for (s, column) in model.columns.iter().enumerate() {
        let model_file = match &column.model {
            Some(base) => {
                let name = format!("columns/col_{s:03}.json");
                write_json(&dir.join(&name), base)?;
                Some(name)
            }
            None => None,
        };
        manifest_columns.push(ManifestColumn { values: column.values.clone(), model_file });
    }
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        decoding: model.decoding,
        learner_spec: model.learner_spec,
        columns: manifest_columns,
    };
    write_json(&dir.join("manifest.json"), &manifest)
}

/// Loads an ensemble saved by [`save_model`], re-validating everything.
pub fn load_model(dir: &Path) -> Result<EcocModel> {
    let manifest_path = dir.join("manifest.json");
    let text = fs::read_to_string(&manifest_path).map_err(|e| AppError::io(&manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| AppError::parse(&manifest_path, e.line(), e.to_string()))?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(AppError::parse(
            &manifest_path,
            1,
            format!(
                "unsupported format_version {} (this build reads {FORMAT_VERSION})",
                manifest.format_version
            ),
        ));
    }

    let matrix = matrix_csv::load_matrix(&dir.join("matrix.csv"))?;

    let mut columns = Vec::with_capacity(manifest.columns.len());
    for entry in manifest.columns {
        let model = match entry.model_file {
            Some(name) => {
                let path = dir.join(&name);
                let text = fs::read_to_string(&path).map_err(|e| AppError::io(&path, e))?;
                let base: BaseModel = serde_json::from_str(&text)
                    .map_err(|e| AppError::parse(&path, e.line(), e.to_string()))?;
                Some(base)
            }
            None => None,
        };
        columns.push(ColumnModel { model, values: entry.values });
    }

    ensemble::assemble(matrix, manifest.learner_spec, manifest.decoding, columns)
        .map_err(|e| AppError::parse(&manifest_path, 1, e.to_string()))
}
