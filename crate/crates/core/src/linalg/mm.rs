use std::io::{self, Write};

use super::CsrMatrix;

/// Matrix Market coordinate format, 1-based.
pub fn write_matrix_market<W: Write>(a: &CsrMatrix, mut out: W) -> io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        for (&j, v) in cols.iter().zip(vals) {
            writeln!(out, "{} {} {:.17e}", i + 1, j + 1, v)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_dump() {
        let mut buf = Vec::new();
        write_matrix_market(&CsrMatrix::identity(2), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "2 2 2");
        assert!(lines[2].starts_with("1 1 1.0"));
        assert_eq!(lines.len(), 4);
    }
}
