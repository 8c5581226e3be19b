//! Matrix Market coordinate-format reader and writer.
//!
//! Supports the `real` and `integer` fields with `general`, `symmetric` and
//! `skew-symmetric` qualifiers. Indices in files are 1-based.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<Symmetry> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(line_no, "malformed header"));
    }
    if tokens[1] != "matrix" {
        return Err(parse_err(line_no, format!("unsupported object \"{}\"", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(line_no, format!("unsupported format \"{}\"", tokens[2])));
    }
    match tokens[3].as_str() {
        "real" | "integer" => {}
        other => return Err(parse_err(line_no, format!("unsupported field \"{other}\""))),
    }
    match tokens[4].as_str() {
        "general" => Ok(Symmetry::General),
        "symmetric" => Ok(Symmetry::Symmetric),
        "skew-symmetric" => Ok(Symmetry::SkewSymmetric),
        other => Err(parse_err(line_no, format!("unsupported qualifier \"{other}\""))),
    }
}

fn parse_index(line_no: usize, tok: Option<&str>, bound: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(line_no, format!("missing {what} index")))?;
    let idx: usize = tok
        .parse()
        .map_err(|_| parse_err(line_no, format!("invalid {what} index \"{tok}\"")))?;
    if idx == 0 || idx > bound {
        return Err(parse_err(
            line_no,
            format!("{what} index {idx} out of range 1..={bound}"),
        ));
    }
    Ok(idx - 1)
}

/// Parses a Matrix Market coordinate stream.
pub fn parse_matrix_market<R: Read>(reader: R) -> Result<SparseMatrix> {
    let reader = BufReader::new(reader);
    let mut symmetry = None;
    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut last_line = 0;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = line.map_err(|e| parse_err(line_no, e.to_string()))?;
        if line_no == 1 {
            symmetry = Some(parse_header(line_no, &line)?);
            continue;
        }
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        match size {
            None => {
                let mut dims = [0usize; 3];
                for d in dims.iter_mut() {
                    let tok = toks
                        .next()
                        .ok_or_else(|| parse_err(line_no, "size line needs rows, cols, entries"))?;
                    *d = tok
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("invalid size value \"{tok}\"")))?;
                }
                size = Some((dims[0], dims[1], dims[2]));
                triplets.reserve(dims[2]);
            }
            Some((rows, cols, nnz)) => {
                if triplets.len() >= nnz {
                    return Err(parse_err(line_no, "more entries than declared"));
                }
                let i = parse_index(line_no, toks.next(), rows, "row")?;
                let j = parse_index(line_no, toks.next(), cols, "column")?;
                let tok = toks
                    .next()
                    .ok_or_else(|| parse_err(line_no, "missing value"))?;
                let v: f64 = tok
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("invalid value \"{tok}\"")))?;
                if !v.is_finite() {
                    return Err(parse_err(line_no, "non-finite value"));
                }
                triplets.push((i, j, v));
            }
        }
    }

    let symmetry = symmetry.ok_or_else(|| parse_err(1, "empty stream"))?;
    let (rows, cols, nnz) = size.ok_or_else(|| parse_err(last_line, "missing size line"))?;
    if triplets.len() != nnz {
        return Err(parse_err(
            last_line,
            format!("declared {nnz} entries, found {}", triplets.len()),
        ));
    }
    if symmetry != Symmetry::General && rows != cols {
        return Err(parse_err(2, "symmetric qualifiers require a square matrix"));
    }
    let mut expanded = Vec::with_capacity(2 * triplets.len());
    for &(i, j, v) in &triplets {
        expanded.push((i, j, v));
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => expanded.push((j, i, v)),
                Symmetry::SkewSymmetric => expanded.push((j, i, -v)),
            }
        }
    }
    SparseMatrix::from_triplets(rows, cols, &expanded)
}

pub fn parse_matrix_market_str(text: &str) -> Result<SparseMatrix> {
    parse_matrix_market(text.as_bytes())
}

/// Reads a `.mtx` file from disk.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_matrix_market(file).map_err(|e| e.context(path.display().to_string()))
}

/// Writes every stored entry as a `general` coordinate file with 17
/// significant digits.
pub fn emit_matrix_market(a: &SparseMatrix) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    out.push_str(&format!("{} {} {}\n", a.n_rows(), a.n_cols(), a.nnz()));
    for (i, j, v) in a.triplets() {
        out.push_str(&format!("{} {} {:.16e}\n", i + 1, j + 1, v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_general_diagonal() {
        let a = parse_matrix_market_str(
            "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 3.0\n2 2 4.0\n",
        )
        .unwrap();
        assert_eq!(a.to_dense().unwrap().to_rows(), vec![vec![3.0, 0.0], vec![0.0, 4.0]]);
    }

    #[test]
    fn expands_symmetric_and_skew() {
        let a = parse_matrix_market_str(
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n2 1 5.0\n",
        )
        .unwrap();
        assert_eq!(a.get(0, 1), 5.0);
        assert_eq!(a.get(1, 0), 5.0);
        assert_eq!(a.nnz(), 3);

        let s = parse_matrix_market_str(
            "%%MatrixMarket matrix coordinate integer skew-symmetric\n2 2 1\n2 1 3\n",
        )
        .unwrap();
        assert_eq!(s.get(1, 0), 3.0);
        assert_eq!(s.get(0, 1), -3.0);
    }

    #[test]
    fn sums_duplicates() {
        let a = parse_matrix_market_str(
            "%%MatrixMarket matrix coordinate real general\n1 1 2\n1 1 1.5\n1 1 2.5\n",
        )
        .unwrap();
        assert_eq!(a.get(0, 0), 4.0);
    }

    #[test]
    fn rejects_unsupported_fields() {
        for field in ["pattern", "complex"] {
            let err = parse_matrix_market_str(&format!(
                "%%MatrixMarket matrix coordinate {field} general\n1 1 1\n1 1\n"
            ))
            .unwrap_err();
            match err {
                Error::Parse { line, message } => {
                    assert_eq!(line, 1);
                    assert!(message.contains("unsupported field"), "{message}");
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn reports_line_of_bad_index() {
        let err = parse_matrix_market_str(
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n3 1 1.0\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err:?}");
        let err = parse_matrix_market_str("%%MatrixMarket matrix\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_matrix_market_str(
            "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn emitted_text_parses_back() {
        let a = crate::sparse::gen_random(12, 3).unwrap();
        assert_eq!(parse_matrix_market_str(&emit_matrix_market(&a)).unwrap(), a);
    }
}
