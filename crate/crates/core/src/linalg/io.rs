//! Matrix serialization: CSV (optional header row) and the `SSM1` binary
//! format (magic, u64 LE rows, u64 LE cols, f64 LE entries row-major).

use std::io::{Read, Write};
use std::path::Path;

use super::matrix::Matrix;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SSM1";

pub fn write_binary<W: Write>(m: &Matrix, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(m.rows() as u64).to_le_bytes())?;
    w.write_all(&(m.cols() as u64).to_le_bytes())?;
    for v in m.as_slice() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Matrix> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic bytes {magic:?}")));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::Format("matrix size overflows".into()))?;
    let mut data = Vec::with_capacity(count.min(1 << 24));
    for _ in 0..count {
        r.read_exact(&mut word)?;
        data.push(f64::from_le_bytes(word));
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Format(format!("{} trailing bytes", rest.len())));
    }
    Matrix::new(rows, cols, data)
}

/// Writes one CSV row per matrix row, with an optional header.
pub fn write_csv<W: Write>(m: &Matrix, header: Option<&[String]>, w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    if let Some(h) = header {
        if h.len() != m.cols() {
            return Err(Error::dims(
                format!("{} header fields", m.cols()),
                format!("{}", h.len()),
            ));
        }
        wr.write_record(h)?;
    }
    for i in 0..m.rows() {
        wr.write_record(m.row(i).iter().map(|v| format!("{v:e}")))?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads a numeric CSV. A first row that does not parse as numbers is taken
/// as a header and returned separately.
pub fn read_csv<R: Read>(r: R) -> Result<(Matrix, Option<Vec<String>>)> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut header = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        let parsed: std::result::Result<Vec<f64>, _> =
            rec.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(vals) => rows.push(vals),
            Err(_) if line == 0 => header = Some(rec.iter().map(str::to_owned).collect()),
            Err(e) => {
                return Err(Error::Format(format!("line {}: {e}", line + 1)));
            }
        }
    }
    let m = Matrix::from_rows(&rows)?;
    Ok((m, header))
}

/// Loads a matrix, choosing the format by extension (`.csv` or binary).
pub fn load(path: &Path) -> Result<Matrix> {
    let file = std::fs::File::open(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        Ok(read_csv(std::io::BufReader::new(file))?.0)
    } else {
        read_binary(std::io::BufReader::new(file))
    }
}

pub fn save(m: &Matrix, path: &Path) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        write_csv(m, None, file)
    } else {
        write_binary(m, file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_layout_is_exact() {
        let m = Matrix::from_rows(&[[1.0, -2.5]]).unwrap();
        let mut buf = Vec::new();
        write_binary(&m, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"SSM1");
        assert_eq!(&buf[4..12], &1u64.to_le_bytes());
        assert_eq!(&buf[12..20], &2u64.to_le_bytes());
        assert_eq!(&buf[20..28], &1.0f64.to_le_bytes());
        assert_eq!(&buf[28..36], &(-2.5f64).to_le_bytes());
        assert_eq!(read_binary(&buf[..]).unwrap(), m);
    }

    #[test]
    fn binary_rejects_garbage() {
        assert!(matches!(read_binary(&b"SSM2"[..]), Err(Error::Format(_))));
        let mut buf = Vec::new();
        write_binary(&Matrix::zeros(1, 1), &mut buf).unwrap();
        buf.push(0);
        assert!(read_binary(&buf[..]).is_err());
        buf.truncate(10);
        assert!(read_binary(&buf[..]).is_err());
    }

    #[test]
    fn csv_with_and_without_header() {
        let (m, h) = read_csv("a,b\n1,2\n3,4\n".as_bytes()).unwrap();
        assert_eq!(h.unwrap(), vec!["a", "b"]);
        assert_eq!(m.shape(), (2, 2));
        let (m2, h2) = read_csv("1,2\n3,4\n".as_bytes()).unwrap();
        assert!(h2.is_none());
        assert_eq!(m, m2);
        assert!(read_csv("1,2\nx,4\n".as_bytes()).is_err());
        assert!(read_csv("1,2\n3\n".as_bytes()).is_err());
    }
}
