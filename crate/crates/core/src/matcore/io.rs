//! Plain-text matrix format.
//!
//! ```text
//! 2 3
//! 1.0 0.0 -2.5
//! 0.0 1.0 3.0
//! ```
//!
//! A header line `rows cols`, then `rows` lines of `cols` whitespace-separated
//! decimal values. Blank lines are ignored. Values are written with 17
//! significant digits so that a write/read cycle is lossless.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::DenseMatrix;
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let mut dims = header.split_whitespace().map(|t| t.parse::<usize>());
    let (rows, cols) = match (dims.next(), dims.next(), dims.next()) {
        (Some(Ok(r)), Some(Ok(c)), None) => (r, c),
        _ => return Err(parse_err(hline, "header must be `rows cols`")),
    };
    if rows == 0 || cols == 0 {
        return Err(parse_err(hline, "dimensions must be positive"));
    }
    let total = rows
        .checked_mul(cols)
        .ok_or_else(|| parse_err(hline, "dimensions overflow"))?;

    // grow with the input rather than trusting the header for allocation
    let mut data = Vec::with_capacity(total.min(1 << 16));
    let mut seen_rows = 0;
    for (lineno, line) in lines {
        if seen_rows == rows {
            return Err(parse_err(lineno, "trailing data after last row"));
        }
        let before = data.len();
        for tok in line.split_whitespace() {
            let x: f64 = tok
                .parse()
                .map_err(|_| parse_err(lineno, format!("invalid number `{tok}`")))?;
            if !x.is_finite() {
                return Err(parse_err(lineno, format!("non-finite value `{tok}`")));
            }
            if data.len() - before == cols {
                return Err(parse_err(lineno, format!("expected {cols} values")));
            }
            data.push(x);
        }
        if data.len() - before != cols {
            return Err(parse_err(
                lineno,
                format!("expected {cols} values, found {}", data.len() - before),
            ));
        }
        seen_rows += 1;
    }
    if seen_rows != rows {
        return Err(parse_err(
            text.lines().count().max(1),
            format!("expected {rows} rows, found {seen_rows}"),
        ));
    }
    DenseMatrix::new(rows, cols, data)
}

pub fn write_matrix<W: Write>(m: &DenseMatrix, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{} {}", m.rows(), m.cols())?;
    for i in 0..m.rows() {
        let mut first = true;
        for x in m.row(i) {
            if !first {
                out.write_all(b" ")?;
            }
            first = false;
            write!(out, "{x:.16e}")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut buf = Vec::new();
    write_matrix(m, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn write_matrix_file(m: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let file = std::io::BufWriter::new(fs::File::create(path)?);
    write_matrix(m, file)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_example() {
        let m = parse_matrix("2 3\n1 0 -2.5\n\n0 1 3e0\n").unwrap();
        assert_eq!(m.shape(), (2, 3));
        assert_eq!(m.get(0, 2), -2.5);
        assert_eq!(m.get(1, 2), 3.0);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "2",
            "2 2 2\n1 2\n3 4",
            "0 1\n",
            "2 2\n1 2\n3",
            "2 2\n1 2\n3 4 5",
            "2 2\n1 2\n3 4\n5 6",
            "1 1\nNaN",
            "1 1\ninf",
            "1 1\nx",
            "99999999999 99999999999\n1",
        ] {
            assert!(parse_matrix(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn reports_line_numbers() {
        match parse_matrix("2 2\n1 2\n3 oops\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn write_read_is_lossless(
            rows in 1usize..6,
            cols in 1usize..6,
            seed in prop::collection::vec(-1e300f64..1e300, 36),
        ) {
            let m = DenseMatrix::from_fn(rows, cols, |i, j| seed[i * 6 + j] * 1e-7f64.powi((i + j) as i32));
            let back = parse_matrix(&format_matrix(&m)).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
