//! File formats: coding matrices, datasets, and trained models.

pub mod csv_data;
pub mod matrix_csv;
pub mod model_store;
pub mod sparse;
