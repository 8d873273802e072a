use std::fs;
use std::path::Path;

use gaussq_core::{CovMat, Error as CoreError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("empty input")]
    Empty,
    #[error("line 1: expected a positive mode count, found {0:?}")]
    Header(String),
    #[error("expected {expected} matrix rows after the header, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("line {line}: expected {expected} entries, found {found}")]
    ColumnCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: {token:?} is not a finite number")]
    Number { line: usize, token: String },
    #[error("invalid covariance matrix: {0}")]
    Matrix(#[from] CoreError),
}

/// Parses the text format. Blank lines and lines starting with `#` are
/// ignored.
pub fn parse_covmat(text: &str) -> Result<CovMat, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or(ParseError::Empty)?;
    let n: usize = match header.parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(ParseError::Header(header.to_string())),
    };
    let dim = 2 * n;
    let mut values = Vec::with_capacity(dim * dim);
    let mut found = 0;
    for (line, row) in lines {
        found += 1;
        if found > dim {
            continue;
        }
        let tokens: Vec<&str> = row.split_whitespace().collect();
        if tokens.len() != dim {
            return Err(ParseError::ColumnCount { line, expected: dim, found: tokens.len() });
        }
        for token in tokens {
            match token.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => return Err(ParseError::Number { line, token: token.to_string() }),
            }
        }
    }
    if found != dim {
        return Err(ParseError::RowCount { expected: dim, found });
    }
    Ok(CovMat::from_row_slice(dim, &values)?)
}

pub fn read_covmat(path: impl AsRef<Path>) -> Result<CovMat, ParseError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ParseError::Io { path: path.display().to_string(), source })?;
    parse_covmat(&text)
}

/// Writes the text format with round-trip exact numbers.
pub fn format_covmat(sigma: &CovMat) -> String {
    let m = sigma.entries();
    let mut out = format!("{}\n", sigma.n_modes());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let sigma = CovMat::from_row_slice(2, &[1.5, 0.1, 0.1, 0.7 + 1e-17]).unwrap();
        let text = format_covmat(&sigma);
        assert_eq!(parse_covmat(&text).unwrap(), sigma);
    }

    #[test]
    fn comments_and_blank_lines() {
        let sigma = parse_covmat("# vacuum\n1\n\n1 0\n0 1\n").unwrap();
        assert_eq!(sigma, CovMat::identity(1));
    }

    #[test]
    fn diagnostics() {
        assert!(matches!(parse_covmat(""), Err(ParseError::Empty)));
        assert!(matches!(parse_covmat("two\n"), Err(ParseError::Header(_))));
        assert!(matches!(parse_covmat("0\n"), Err(ParseError::Header(_))));
        assert!(matches!(parse_covmat("1\n1 0\n"), Err(ParseError::RowCount { expected: 2, found: 1 })));
        assert!(matches!(parse_covmat("1\n1 0\n0\n"), Err(ParseError::ColumnCount { line: 3, .. })));
        assert!(matches!(parse_covmat("1\n1 x\n0 1\n"), Err(ParseError::Number { line: 2, .. })));
        assert!(matches!(parse_covmat("1\n1 NaN\n0 1\n"), Err(ParseError::Number { .. })));
        assert!(matches!(parse_covmat("1\n1 0.5\n0 1\n"), Err(ParseError::Matrix(_))));
    }
}
