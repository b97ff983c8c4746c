//! Matrix Market coordinate format.
//!
//! Symmetric matrices are written with the `symmetric` qualifier, storing
//! only the lower triangle. The reader accepts `real` or `integer` fields with
//! `symmetric` or `general` symmetry.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::SparseSym;
use crate::error::{Error, Result};

pub fn write_matrix_market<W: Write>(s: &SparseSym, mut out: W) -> std::io::Result<()> {
    if s.is_symmetric() {
        let lower: Vec<_> = s.triplets().filter(|&(i, j, _)| j <= i).collect();
        writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(out, "{} {} {}", s.n(), s.n(), lower.len())?;
        for (i, j, v) in lower {
            writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
        }
    } else {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", s.n(), s.n(), s.nnz())?;
        for (i, j, v) in s.triplets() {
            writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
        }
    }
    out.flush()
}

pub fn read_matrix_market<R: Read>(input: R) -> Result<SparseSym> {
    let reader = BufReader::new(input);
    let mut lines = reader.lines().enumerate();
    let parse_err = |line: usize, message: String| Error::Parse {
        line: line + 1,
        message,
    };
    let io_err = |line: usize, e: std::io::Error| parse_err(line, e.to_string());

    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "empty input".into()))?;
    let header = header.map_err(|e| io_err(ln, e))?.to_ascii_lowercase();
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(ln, "missing %%MatrixMarket matrix header".into()));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(ln, format!("unsupported format '{}'", tokens[2])));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(ln, format!("unsupported field '{}'", tokens[3])));
    }
    let symmetric = match tokens[4] {
        "symmetric" => true,
        "general" => false,
        other => return Err(parse_err(ln, format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    for (ln, line) in lines {
        let line = line.map_err(|e| io_err(ln, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                let nums: Vec<usize> = fields
                    .iter()
                    .map(|f| f.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| parse_err(ln, format!("bad size line: {e}")))?;
                if nums.len() != 3 || nums[0] != nums[1] {
                    return Err(parse_err(ln, "expected 'n n nnz' for a square matrix".into()));
                }
                size = Some((nums[0], nums[2]));
                triplets.reserve(if symmetric { 2 * nums[2] } else { nums[2] });
            }
            Some((n, _)) => {
                if fields.len() != 3 {
                    return Err(parse_err(ln, "expected 'row col value'".into()));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|e| parse_err(ln, format!("bad row index: {e}")))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|e| parse_err(ln, format!("bad column index: {e}")))?;
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|e| parse_err(ln, format!("bad value: {e}")))?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(parse_err(ln, format!("index ({i}, {j}) out of range")));
                }
                if symmetric && j > i {
                    return Err(parse_err(
                        ln,
                        "symmetric file has an upper-triangular entry".into(),
                    ));
                }
                triplets.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| parse_err(0, "missing size line".into()))?;
    let stored = if symmetric {
        triplets.iter().filter(|t| t.1 <= t.0).count()
    } else {
        triplets.len()
    };
    if stored != nnz {
        return Err(parse_err(0, format!("expected {nnz} entries, found {stored}")));
    }
    SparseSym::from_triplets(n, &triplets)
}

pub fn save_matrix_market(s: &SparseSym, path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let f = File::create(path).map_err(io)?;
    write_matrix_market(s, BufWriter::new(f)).map_err(io)
}

pub fn load_matrix_market(path: &Path) -> Result<SparseSym> {
    let f = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_matrix_market(f)
}
