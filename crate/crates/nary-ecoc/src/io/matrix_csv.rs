//! Coding-matrix file format.
//!
//! A matrix file is a comment header followed by one CSV row per class:
//!
//! ```text
//! # scheme=nary n=4 seed=1234
//! 1,1,2,4,1,1
//! 2,1,1,3,2,1
//! ```
//!
//! The header carries everything `CodingMatrix` cannot recover from the
//! entries alone; loading re-runs full matrix validation, so a file
//! that parses is also structurally sound.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nary_ecoc_core::coding::{CodingMatrix, Scheme};

use crate::error::{AppError, Result};

/// Renders a matrix in the format described in the module docs.
pub fn render_matrix(matrix: &CodingMatrix) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "# scheme={} n={} seed={}",
        matrix.scheme().name(),
        matrix.n(),
        matrix.seed()
    )
    .expect("writing to a string cannot fail");
    for r in 0..matrix.n_classes() {
        let row: Vec<String> = matrix.row(r).iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", row.join(",")).expect("writing to a string cannot fail");
    }
    out
}

/// Writes a matrix file.
pub fn save_matrix(path: &Path, matrix: &CodingMatrix) -> Result<()> {
    fs::write(path, render_matrix(matrix)).map_err(|e| AppError::io(path, e))
}

/// Reads a matrix file, validating header, shape, and matrix structure.
pub fn load_matrix(path: &Path) -> Result<CodingMatrix> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| AppError::parse(path, 1, "empty matrix file"))?;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| AppError::parse(path, 1, "expected a `# scheme=... n=... seed=...` header"))?;
    let mut scheme = None;
    let mut n = None;
    let mut seed = None;
    for token in header.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| AppError::parse(path, 1, format!("bad header token `{token}`")))?;
        match key {
            "scheme" => {
                scheme = Some(
                    Scheme::parse(value)
                        .map_err(|e| AppError::parse(path, 1, e.to_string()))?,
                )
            }
            "n" => {
                n = Some(value.parse::<u32>().map_err(|_| {
                    AppError::parse(path, 1, format!("bad group count `{value}`"))
                })?)
            }
            "seed" => {
                seed = Some(value.parse::<u64>().map_err(|_| {
                    AppError::parse(path, 1, format!("bad seed `{value}`"))
                })?)
            }
            other => {
                return Err(AppError::parse(path, 1, format!("unknown header key `{other}`")))
            }
        }
    }
    let scheme = scheme.ok_or_else(|| AppError::parse(path, 1, "header is missing `scheme=`"))?;
    let n = n.ok_or_else(|| AppError::parse(path, 1, "header is missing `n=`"))?;
    let seed = seed.ok_or_else(|| AppError::parse(path, 1, "header is missing `seed=`"))?;

    let mut entries: Vec<i32> = Vec::new();
    let mut code_length = None;
    let mut n_classes = 0usize;
    for (index, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<i32> = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<i32>().map_err(|_| {
                    AppError::parse(path, index + 1, format!("bad matrix entry `{}`", cell.trim()))
                })
            })
            .collect::<Result<_>>()?;
        match code_length {
            None => code_length = Some(row.len()),
            Some(len) if len != row.len() => {
                return Err(AppError::parse(
                    path,
                    index + 1,
                    format!("row has {} entries, expected {len}", row.len()),
                ));
            }
            _ => {}
        }
        entries.extend(row);
        n_classes += 1;
    }
    let code_length =
        code_length.ok_or_else(|| AppError::parse(path, 1, "matrix file has no rows"))?;

    CodingMatrix::new(entries, n_classes, code_length, scheme, n, seed)
        .map_err(|e| AppError::parse(path, 2, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nary_ecoc_core::coding;

    fn roundtrip(matrix: &CodingMatrix) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("matrix.csv");
        save_matrix(&path, matrix).unwrap();
        let loaded = load_matrix(&path).unwrap();
        assert_eq!(&loaded, matrix);
    }

    #[test]
    fn save_and_load_preserve_every_scheme() {
        roundtrip(&coding::generate(Scheme::Nary, 7, 6, 4, 1234).unwrap());
        roundtrip(&coding::generate(Scheme::Ova, 5, 0, 2, 0).unwrap());
        roundtrip(&coding::generate(Scheme::Ovo, 6, 0, 2, 0).unwrap());
        roundtrip(&coding::generate(Scheme::SparseRandom, 8, 20, 2, 9).unwrap());
    }

    #[test]
    fn file_bytes_are_reproducible() {
        let matrix = coding::generate(Scheme::Nary, 4, 5, 3, 7).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        save_matrix(&a, &matrix).unwrap();
        save_matrix(&b, &matrix).unwrap();
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        let text = fs::read_to_string(&a).unwrap();
        assert!(text.starts_with("# scheme=nary n=3 seed=7\n"));
    }

    #[test]
    fn malformed_files_are_rejected_with_locations() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("matrix.csv");

        let cases: &[(&str, &str)] = &[
            ("", "empty"),
            ("1,2\n2,1\n", "header"),
            ("# scheme=wat n=2 seed=0\n1,2\n2,1\n", "scheme"),
            ("# scheme=nary seed=0\n1,2\n2,1\n", "missing `n=`"),
            ("# scheme=nary n=2 seed=0\n1,x\n2,1\n", "entry"),
            ("# scheme=nary n=2 seed=0\n1,2\n2\n", "expected"),
            // Entry 9 is outside the n=2 alphabet.
            ("# scheme=nary n=2 seed=0\n1,9\n2,1\n", "alphabet"),
        ];
        for (content, needle) in cases {
            fs::write(&path, content).unwrap();
            let err = load_matrix(&path).unwrap_err();
            assert_eq!(err.exit_code(), 2, "content {content:?}");
            let message = err.to_string();
            assert!(
                message.contains(needle),
                "error `{message}` does not mention `{needle}`"
            );
        }
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let err = load_matrix(Path::new("/nonexistent/matrix.csv")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(matches!(err, AppError::Io { .. }));
    }
}
